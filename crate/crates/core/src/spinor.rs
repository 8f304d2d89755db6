//! Gamma matrices, Krein forms, chirality and charge conjugation on the
//! irreducible spinor module of dimension `2^{n/2}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clifford::{volume_element, AdmissibleRealStructure, BladeIndex, Multivector, Signature};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};

/// Largest spinor dimension for which the `N^2`-dimensional intertwiner
/// systems are solved.
pub const INTERTWINER_CAP: usize = 64;

const SIGN_TOL: f64 = 1e-9;

fn pauli() -> [CMat; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Generator matrices `gamma_1 .. gamma_n` of the spinor representation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    sig: Signature,
    gammas: Vec<CMat>,
}

impl GammaSet {
    /// Hermitian Euclidean generators from a ladder of 2x2 tensor factors,
    /// `X..X Z I..I` and `X..X Y I..I`, with the last `q` multiplied by `i`.
    /// `gamma_1` comes out diagonal.
    pub fn new(sig: Signature) -> Self {
        let k = sig.half();
        let [id, sx, sy, sz] = pauli();
        let mut gammas = Vec::with_capacity(sig.n());
        for j in 0..k {
            for last in [&sz, &sy] {
                let mut m = CMat::identity(1, 1);
                for pos in 0..k {
                    let factor = match pos.cmp(&j) {
                        std::cmp::Ordering::Less => &sx,
                        std::cmp::Ordering::Equal => last,
                        std::cmp::Ordering::Greater => &id,
                    };
                    m = m.kronecker(factor);
                }
                gammas.push(m);
            }
        }
        for g in gammas.iter_mut().skip(sig.p()) {
            *g *= c(0.0, 1.0);
        }
        Self { sig, gammas }
    }

    /// Wrap explicit generator matrices after checking the Clifford relations.
    pub fn from_matrices(sig: Signature, gammas: Vec<CMat>) -> Result<Self> {
        let n = sig.spinor_dim();
        if gammas.len() != sig.n() || gammas.iter().any(|g| g.shape() != (n, n)) {
            return Err(Error::ConstructionFailed("wrong number or size of generators".into()));
        }
        let set = Self { sig, gammas };
        let res = set.anticommutation_residual();
        if res > 1e-10 {
            return Err(Error::ConstructionFailed(format!("anticommutation residual {res:e}")));
        }
        Ok(set)
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.spinor_dim()
    }

    /// `gamma_i`, 1-based.
    pub fn gamma(&self, i: usize) -> &CMat {
        &self.gammas[i - 1]
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    /// Ordered product of the generators in a blade.
    pub fn blade_matrix(&self, blade: BladeIndex) -> CMat {
        blade
            .indices()
            .into_iter()
            .fold(linalg::identity(self.dim()), |acc, i| acc * self.gamma(i))
    }

    /// The algebra homomorphism `rho`.
    pub fn represent(&self, a: &Multivector) -> Result<CMat> {
        if a.signature() != self.sig {
            return Err(Error::SignatureMismatch { left: a.signature(), right: self.sig });
        }
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (blade, coeff) in a.terms() {
            m += self.blade_matrix(blade) * coeff;
        }
        Ok(m)
    }

    /// `chi = (-i)^{n/2 + q} rho(omega)`.
    pub fn chirality(&self) -> CMat {
        let power = (self.sig.half() + self.sig.q()) % 4;
        let phase = c(0.0, -1.0).powu(power as u32);
        self.blade_matrix(volume_element(self.sig).terms().next().expect("omega").0) * phase
    }

    /// Worst violation of `gamma_i gamma_j + gamma_j gamma_i = 2 eta_i delta_ij`.
    pub fn anticommutation_residual(&self) -> f64 {
        let n = self.sig.n();
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                let ac = self.gamma(i) * self.gamma(j) + self.gamma(j) * self.gamma(i);
                let expect = if i == j {
                    linalg::identity(self.dim()) * c(2.0 * f64::from(self.sig.metric(i)), 0.0)
                } else {
                    CMat::zeros(self.dim(), self.dim())
                };
                worst = worst.max(linalg::max_diff(&ac, &expect));
            }
        }
        worst
    }

    /// Dimension of the commutant of the generators; 1 certifies irreducibility.
    pub fn commutant_dimension(&self) -> Result<usize> {
        let n = self.dim();
        check_cap(n)?;
        let id = linalg::identity(n);
        let blocks: Vec<CMat> = self
            .gammas
            .iter()
            .map(|g| linalg::sandwich_operator(g, &id) - linalg::sandwich_operator(&id, g))
            .collect();
        Ok(common_null_space(&blocks, 1e-10).ncols())
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > INTERTWINER_CAP {
        return Err(Error::DimensionOverCap { dim: n * n, cap: INTERTWINER_CAP * INTERTWINER_CAP });
    }
    Ok(())
}

/// Null space shared by several square-or-tall linear maps, from the
/// eigenvectors of `sum_k A_k^dagger A_k` with eigenvalue ~0.
pub fn common_null_space(blocks: &[CMat], tol: f64) -> CMat {
    let cols = blocks[0].ncols();
    let mut gram = CMat::zeros(cols, cols);
    for b in blocks {
        gram += b.adjoint() * b;
    }
    let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(1.0);
    let picks: Vec<usize> =
        (0..cols).filter(|&i| eig.eigenvalues[i].abs() <= tol * top).collect();
    let mut out = CMat::zeros(cols, picks.len());
    for (k, &i) in picks.iter().enumerate() {
        out.set_column(k, &eig.eigenvectors.column(i));
    }
    out
}

/// Hermitian involution `beta` with `beta gamma_i beta^{-1} = gamma_i^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct KreinForm {
    beta: CMat,
    sign: i8,
}

impl KreinForm {
    /// Wrap an arbitrary hermitian fundamental symmetry.
    pub fn from_matrix(beta: CMat) -> Result<Self> {
        let res = linalg::hermitian_residual(&beta);
        if res > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(res));
        }
        Ok(Self { beta, sign: 1 })
    }

    pub fn matrix(&self) -> &CMat {
        &self.beta
    }

    /// Sign applied to the raw solution to make the leading diagonal entry positive.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `A^x = beta^{-1} A^dagger beta`.
    pub fn adjoint(&self, a: &CMat) -> CMat {
        let inv = linalg::inverse(&self.beta).expect("Krein form is invertible");
        inv * a.adjoint() * &self.beta
    }

    /// Krein adjoint of an antilinear operator `psi -> m conj(psi)`.
    pub fn antilinear_adjoint(&self, op: &AntilinearOp) -> AntilinearOp {
        let inv = linalg::inverse(&self.beta).expect("Krein form is invertible");
        AntilinearOp::new(inv * op.matrix().transpose() * linalg::conj(&self.beta))
    }
}

fn product_candidate(g: &GammaSet) -> CMat {
    let sig = g.signature();
    let gens: Vec<usize> =
        if sig.p() % 2 == 1 { (1..=sig.p()).collect() } else { (sig.p() + 1..=sig.n()).collect() };
    gens.iter().fold(linalg::identity(g.dim()), |acc, &i| acc * g.gamma(i))
}

fn intertwines(beta: &CMat, g: &GammaSet) -> bool {
    g.gammas()
        .iter()
        .all(|gm| linalg::max_diff(&(beta * gm), &(gm.adjoint() * beta)) <= 1e-10)
}

/// Turn a solution `X` of the intertwining system into a hermitian involution.
fn hermitian_involution(x: &CMat) -> Option<CMat> {
    let herm = x + x.adjoint();
    let anti = (x - x.adjoint()) * c(0.0, 1.0);
    let h = if linalg::max_abs(&herm) >= linalg::max_abs(&anti) { herm } else { anti };
    let sq = &h * &h;
    let s = linalg::as_scalar(&sq, 1e-10)?;
    if s.re <= 0.0 {
        return None;
    }
    Some(h / c(s.re.sqrt(), 0.0))
}

/// Sign convention: largest diagonal entry positive; for a hollow matrix, the
/// first largest entry (row-major) gets positive real part, or positive
/// imaginary part when its real part vanishes.
fn fix_sign(beta: CMat) -> (CMat, i8) {
    let n = beta.nrows();
    let diag_top = (0..n).map(|i| beta[(i, i)].norm()).fold(0.0, f64::max);
    let flip = if diag_top > 1e-10 {
        let i = (0..n).find(|&i| beta[(i, i)].norm() >= diag_top * (1.0 - 1e-10)).expect("max");
        beta[(i, i)].re < 0.0
    } else {
        let top = linalg::max_abs(&beta);
        let z = (0..n)
            .flat_map(|r| (0..n).map(move |col| (r, col)))
            .map(|(r, col)| beta[(r, col)])
            .find(|z| z.norm() >= top * (1.0 - 1e-10))
            .expect("nonzero");
        if z.re.abs() > 1e-10 {
            z.re < 0.0
        } else {
            z.im < 0.0
        }
    };
    if flip {
        (-beta, -1)
    } else {
        (beta, 1)
    }
}

/// Null space of `X gamma_i - gamma_i^dagger X = 0`, as `vec(X)` columns.
pub fn krein_intertwiner_space(g: &GammaSet) -> Result<CMat> {
    check_cap(g.dim())?;
    let id = linalg::identity(g.dim());
    let blocks: Vec<CMat> = g
        .gammas()
        .iter()
        .map(|gm| linalg::sandwich_operator(&id, gm) - linalg::sandwich_operator(&gm.adjoint(), &id))
        .collect();
    Ok(common_null_space(&blocks, 1e-10))
}

/// Solve the intertwining system directly, without the product ansatz.
pub fn solve_krein_form(g: &GammaSet) -> Result<KreinForm> {
    let space = krein_intertwiner_space(g)?;
    if space.ncols() == 0 {
        return Err(Error::NoKreinForm);
    }
    let x = linalg::unvec(space.column(0).as_slice(), g.dim());
    let h = hermitian_involution(&x).ok_or(Error::NoKreinForm)?;
    if !intertwines(&h, g) {
        return Err(Error::NoKreinForm);
    }
    let (beta, sign) = fix_sign(h);
    Ok(KreinForm { beta, sign })
}

/// Krein form making every real vector self-adjoint.
pub fn build_krein_form(g: &GammaSet) -> Result<KreinForm> {
    let candidate = hermitian_involution(&product_candidate(g)).filter(|h| intertwines(h, g));
    match candidate {
        Some(h) => {
            let (beta, sign) = fix_sign(h);
            Ok(KreinForm { beta, sign })
        }
        None => solve_krein_form(g),
    }
}

/// Antilinear operator `psi -> m conj(psi)` in the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOp {
    m: CMat,
}

impl AntilinearOp {
    pub fn new(m: CMat) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn apply(&self, psi: &CVec) -> CVec {
        &self.m * psi.map(|z| z.conj())
    }

    /// `self o other`, a linear map.
    pub fn compose(&self, other: &AntilinearOp) -> CMat {
        &self.m * linalg::conj(&other.m)
    }

    pub fn square(&self) -> CMat {
        self.compose(self)
    }

    pub fn inverse(&self) -> Result<AntilinearOp> {
        Ok(AntilinearOp::new(linalg::conj(&linalg::inverse(&self.m)?)))
    }

    /// `L o self`.
    pub fn left_mul(&self, l: &CMat) -> AntilinearOp {
        AntilinearOp::new(l * &self.m)
    }

    /// `self o L`.
    pub fn right_mul(&self, l: &CMat) -> AntilinearOp {
        AntilinearOp::new(&self.m * linalg::conj(l))
    }

    /// `self X self^{-1}` for a linear `X`.
    pub fn conjugate(&self, x: &CMat) -> Result<CMat> {
        Ok(&self.m * linalg::conj(x) * linalg::inverse(&self.m)?)
    }
}

fn to_sign(m: &CMat, what: &str) -> Result<i8> {
    linalg::as_scalar(m, SIGN_TOL)
        .and_then(|s| linalg::as_sign(s, SIGN_TOL))
        .ok_or_else(|| Error::NotASign(what.to_string()))
}

/// Antilinear `C` with `C rho(a) C^{-1} = rho(c(a))`, normalized so that
/// `C^x C = kappa~` is a sign, with the first nonzero entry (column-major)
/// real and positive.
pub fn build_charge_conjugation(g: &GammaSet, beta: &KreinForm) -> Result<AntilinearOp> {
    let n = g.dim();
    check_cap(n)?;
    let id = linalg::identity(n);
    // m conj(gamma_i) - gamma_i m = 0
    let blocks: Vec<CMat> = g
        .gammas()
        .iter()
        .map(|gm| linalg::sandwich_operator(&id, &linalg::conj(gm)) - linalg::sandwich_operator(gm, &id))
        .collect();
    let space = common_null_space(&blocks, 1e-10);
    if space.ncols() != 1 {
        return Err(Error::NullSpaceDimension { expected: 1, found: space.ncols() });
    }
    let m = linalg::unvec(space.column(0).as_slice(), n);
    let raw = AntilinearOp::new(m);
    let kk = beta.antilinear_adjoint(&raw).compose(&raw);
    let k = linalg::as_scalar(&kk, 1e-8).ok_or_else(|| Error::NotASign("C^x C".into()))?;
    if k.im.abs() > 1e-8 * k.norm() || k.re == 0.0 {
        return Err(Error::NotASign("C^x C".into()));
    }
    let mut m = raw.m / c(k.re.abs().sqrt(), 0.0);
    let lead = m.iter().copied().find(|z| z.norm() > 1e-10).expect("nonzero");
    m *= lead.conj() / lead.norm();
    Ok(AntilinearOp::new(m))
}

/// `J = chi C`.
pub fn graded_charge_conjugation(cc: &AntilinearOp, chi: &CMat) -> AntilinearOp {
    cc.left_mul(chi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Euclidean,
    Lorentz,
    Antilorentz,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Euclidean, Case::Antilorentz, Case::Lorentz];

    pub fn signature(self, n: usize) -> Result<Signature> {
        match self {
            Case::Euclidean => Signature::euclidean(n),
            Case::Lorentz => Signature::lorentz(n),
            Case::Antilorentz => Signature::antilorentz(n),
        }
    }

    pub fn admits(self, sig: Signature) -> bool {
        match self {
            Case::Euclidean => sig.is_euclidean(),
            Case::Lorentz => sig.is_lorentz(),
            Case::Antilorentz => sig.is_antilorentz(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Euclidean => "euclidean",
            Case::Lorentz => "lorentz",
            Case::Antilorentz => "antilorentz",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Case::Euclidean),
            "lorentz" => Ok(Case::Lorentz),
            "antilorentz" => Ok(Case::Antilorentz),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

/// Sign data of charge conjugation in both conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KOSigns {
    pub eps: i8,
    pub eps_dprime: i8,
    pub eps_tilde: i8,
    pub kappa: i8,
    pub kappa_tilde: i8,
    pub metric_dim_mod8: usize,
    pub ko_dim_mod8: usize,
}

/// Everything built from one signature: gammas, Krein form, chirality, `C`.
#[derive(Clone, Debug)]
pub struct SpinorModule {
    pub gammas: GammaSet,
    pub krein: KreinForm,
    pub chirality: CMat,
    pub charge: AntilinearOp,
}

impl SpinorModule {
    pub fn new(sig: Signature) -> Result<Self> {
        let gammas = GammaSet::new(sig);
        let krein = build_krein_form(&gammas)?;
        let chirality = gammas.chirality();
        let charge = build_charge_conjugation(&gammas, &krein)?;
        Ok(Self { gammas, krein, chirality, charge })
    }

    pub fn signature(&self) -> Signature {
        self.gammas.signature()
    }

    pub fn graded_charge(&self) -> AntilinearOp {
        graded_charge_conjugation(&self.charge, &self.chirality)
    }

    /// Measure every sign from the constructed operators.
    pub fn signs(&self) -> Result<KOSigns> {
        let sig = self.signature();
        let cc = &self.charge;
        let eps_tilde = to_sign(&cc.square(), "C^2")?;
        let kappa_tilde = to_sign(&self.krein.antilinear_adjoint(cc).compose(cc), "C^x C")?;
        let eps_dprime = to_sign(&(cc.conjugate(&self.chirality)? * &self.chirality), "C chi C^-1 chi")?;
        let j = self.graded_charge();
        let eps = to_sign(&j.square(), "J^2")?;
        let kappa = to_sign(&self.krein.antilinear_adjoint(&j).compose(&j), "J^x J")?;
        Ok(KOSigns {
            eps,
            eps_dprime,
            eps_tilde,
            kappa,
            kappa_tilde,
            metric_dim_mod8: sig.n() % 8,
            ko_dim_mod8: (sig.p() as i64 - sig.q() as i64).rem_euclid(8) as usize,
        })
    }
}

/// KO signs of `sig`, computed from the constructed operators.
pub fn ko_signs(sig: Signature, case: Case) -> Result<KOSigns> {
    if !case.admits(sig) {
        return Err(Error::CaseMismatch { sig, case: case.to_string() });
    }
    SpinorModule::new(sig)?.signs()
}

/// `beta_sigma`: `beta rho(b)^{-1}` if `b^x = b`, `beta (i rho(b))^{-1}` if `b^x = -b`.
pub fn sigma_compatible_product(beta: &KreinForm, g: &GammaSet, b: &Multivector) -> Result<CMat> {
    if b.max_imag() > 1e-12 {
        return Err(Error::NotNormalized("b has imaginary coefficients".into()));
    }
    let sq = b * b;
    let s = sq.normalized_trace().re;
    if (sq.clone() - Multivector::scalar(b.signature(), s)).max_abs() > 1e-10 || (s.abs() - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized("b^2 is not ±1".into()));
    }
    let cross = b.cross();
    let rb = g.represent(b)?;
    let out = if cross.exact_eq(b, 1e-10) {
        beta.matrix() * linalg::inverse(&rb)?
    } else if cross.exact_eq(&-b, 1e-10) {
        beta.matrix() * linalg::inverse(&(rb * c(0.0, 1.0)))?
    } else {
        return Err(Error::NotNormalized("b^x is not ±b".into()));
    };
    let res = linalg::hermitian_residual(&out);
    if res > 1e-10 {
        return Err(Error::NotHermitian(res));
    }
    Ok(out)
}

/// All `x` with `e_i^x x = x e_i^{x sigma}` for every generator, i.e. every
/// weight making `beta rho(x)` implement `x sigma`. Expected to be the line
/// through `b^{-1}`.
pub fn sigma_compatible_weights(sigma: &AdmissibleRealStructure) -> Vec<Multivector> {
    let sig = sigma.signature();
    let blocks: Vec<CMat> = (1..=sig.n())
        .map(|i| {
            let e = Multivector::generator(sig, i);
            e.cross().left_mult_matrix() - sigma.sigma_cross(&e).right_mult_matrix()
        })
        .collect();
    let ns = common_null_space(&blocks, 1e-10);
    (0..ns.ncols())
        .map(|k| Multivector::from_dense(sig, ns.column(k).as_slice()))
        .collect()
}

/// Adjoint with respect to an arbitrary hermitian form `h`: `h^{-1} A^dagger h`.
pub fn form_adjoint(h: &CMat, a: &CMat) -> Result<CMat> {
    Ok(linalg::inverse(h)? * a.adjoint() * h)
}

/// Signs `(eps~, kappa~, eps'')`, the part that moves under Wick rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTriple {
    pub eps_tilde: i8,
    pub kappa_tilde: i8,
    pub eps_dprime: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WickSignReport {
    pub from_case: Case,
    pub signature: Signature,
    pub source: SignTriple,
    pub measured: SignTriple,
    pub predicted: SignTriple,
    pub holds: bool,
}

/// Check that `b` is a rotation element for `case`: a unit vector with
/// `b^2 = 1` (anti-Lorentz) or `omega v` with `v^2 = -1` (Lorentz).
fn check_rotation_element(case: Case, b: &Multivector) -> Result<AdmissibleRealStructure> {
    let sig = b.signature();
    let sigma = AdmissibleRealStructure::new(b.clone())
        .map_err(|e| Error::InvalidRotationElement(e.to_string()))?;
    if !sigma.b().exact_eq(b, 1e-10) {
        return Err(Error::InvalidRotationElement("b is not real and normalized".into()));
    }
    match case {
        Case::Antilorentz => {
            let v = b.vector_coords(1e-12).ok_or_else(|| Error::InvalidRotationElement("b is not a vector".into()))?;
            if (sig.quadratic_form(&v) - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidRotationElement("v^2 != 1".into()));
            }
        }
        Case::Lorentz => {
            let w = volume_element(sig);
            let v = (&w.inverse()? * b)
                .vector_coords(1e-12)
                .ok_or_else(|| Error::InvalidRotationElement("b is not omega v".into()))?;
            if (sig.quadratic_form(&v) + 1.0).abs() > 1e-10 {
                return Err(Error::InvalidRotationElement("v^2 != -1".into()));
            }
        }
        Case::Euclidean => {
            return Err(Error::InvalidRotationElement("source must be Lorentzian or anti-Lorentzian".into()))
        }
    }
    if !sigma.is_euclidean() {
        return Err(Error::InvalidRotationElement("sigma_b is not Euclidean".into()));
    }
    Ok(sigma)
}

/// Measure `(eps~, kappa~, eps'')` for `C_E = rho(b) C`, `chi_E = -chi`, with
/// `kappa~` taken against `beta_sigma`, and compare with the transition rules.
pub fn wick_sign_transition(from_case: Case, sig: Signature, b: &Multivector) -> Result<WickSignReport> {
    if !from_case.admits(sig) || from_case == Case::Euclidean {
        return Err(Error::CaseMismatch { sig, case: from_case.to_string() });
    }
    if b.signature() != sig {
        return Err(Error::SignatureMismatch { left: b.signature(), right: sig });
    }
    check_rotation_element(from_case, b)?;
    let module = SpinorModule::new(sig)?;
    let src = module.signs()?;
    let source = SignTriple { eps_tilde: src.eps_tilde, kappa_tilde: src.kappa_tilde, eps_dprime: src.eps_dprime };

    let rb = module.gammas.represent(b)?;
    let beta_sigma = KreinForm::from_matrix(sigma_compatible_product(&module.krein, &module.gammas, b)?)?;
    let ce = module.charge.left_mul(&rb);
    let chi_e = -module.chirality.clone();
    let measured = SignTriple {
        eps_tilde: to_sign(&ce.square(), "C_E^2")?,
        kappa_tilde: to_sign(&beta_sigma.antilinear_adjoint(&ce).compose(&ce), "C_E^x C_E")?,
        eps_dprime: to_sign(&(ce.conjugate(&chi_e)? * &chi_e), "C_E chi_E C_E^-1 chi_E")?,
    };
    let s: i8 = match from_case {
        Case::Antilorentz => 1,
        _ => {
            if (sig.half() + 1).is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
    };
    let predicted = SignTriple {
        eps_tilde: s * source.eps_tilde,
        kappa_tilde: s * source.kappa_tilde,
        eps_dprime: -source.eps_dprime,
    };
    Ok(WickSignReport { from_case, signature: sig, source, measured, predicted, holds: measured == predicted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FormClass;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn gammas_satisfy_relations() {
        for (p, q) in [(2, 0), (1, 1), (0, 2), (1, 3), (3, 1), (2, 2), (1, 5), (6, 2), (4, 4)] {
            let g = GammaSet::new(sig(p, q));
            assert!(g.anticommutation_residual() <= 1e-14, "({p},{q})");
            for i in 1..=p + q {
                let h = g.gamma(i).adjoint();
                let expect = if i <= p { g.gamma(i).clone() } else { -g.gamma(i) };
                assert!(linalg::max_diff(&h, &expect) == 0.0);
            }
        }
    }

    #[test]
    fn first_gamma_is_diagonal() {
        let g = GammaSet::new(sig(1, 3));
        let d = CMat::from_diagonal(&g.gamma(1).diagonal());
        assert_eq!(&d, g.gamma(1));
        assert_eq!(g.gamma(1).diagonal().iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn representation_is_a_homomorphism_on_blades() {
        let s = sig(1, 3);
        let g = GammaSet::new(s);
        for a in 0..16u32 {
            for b in 0..16u32 {
                let (ba, bb) = (BladeIndex(a), BladeIndex(b));
                let prod = &Multivector::blade(s, ba, 1.0) * &Multivector::blade(s, bb, 1.0);
                let lhs = g.represent(&prod).unwrap();
                let rhs = g.blade_matrix(ba) * g.blade_matrix(bb);
                assert!(linalg::max_diff(&lhs, &rhs) <= 1e-14);
            }
        }
        assert!(g.represent(&Multivector::one(sig(2, 0))).is_err());
    }

    #[test]
    fn chirality_properties() {
        for (p, q) in [(1, 1), (2, 0), (1, 3), (3, 1), (2, 2), (1, 5)] {
            let s = sig(p, q);
            let m = SpinorModule::new(s).unwrap();
            let chi = &m.chirality;
            let n = m.gammas.dim();
            assert!(linalg::max_diff(&(chi * chi), &linalg::identity(n)) <= 1e-14);
            for gm in m.gammas.gammas() {
                assert!(linalg::max_abs(&(chi * gm + gm * chi)) <= 1e-14);
            }
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            assert!(linalg::max_diff(&m.krein.adjoint(chi), &(chi * c(sign, 0.0))) <= 1e-12);
        }
    }

    #[test]
    fn krein_form_examples() {
        let g = GammaSet::new(sig(1, 3));
        let k = build_krein_form(&g).unwrap();
        assert!(linalg::max_diff(k.matrix(), g.gamma(1)) <= 1e-14);

        let g = GammaSet::new(sig(2, 0));
        assert!(linalg::max_diff(build_krein_form(&g).unwrap().matrix(), &linalg::identity(2)) <= 1e-14);

        // Lorentz: beta = ±gamma_n chi
        let g = GammaSet::new(sig(3, 1));
        let k = build_krein_form(&g).unwrap();
        let cand = g.gamma(4) * g.chirality();
        assert!(
            linalg::max_diff(k.matrix(), &cand) <= 1e-14 || linalg::max_diff(k.matrix(), &-cand) <= 1e-14
        );
    }

    #[test]
    fn solver_agrees_with_product_ansatz() {
        for (p, q) in [(1, 1), (2, 0), (1, 3), (3, 1), (2, 2), (0, 4), (1, 5), (3, 3)] {
            let g = GammaSet::new(sig(p, q));
            let a = build_krein_form(&g).unwrap();
            let b = solve_krein_form(&g).unwrap();
            assert!(linalg::max_diff(a.matrix(), b.matrix()) <= 1e-10, "({p},{q})");
            assert_eq!(krein_intertwiner_space(&g).unwrap().ncols(), 1);
            assert_eq!(g.commutant_dimension().unwrap(), 1);
        }
    }

    #[test]
    fn krein_adjoint_of_generators() {
        let s = sig(2, 2);
        let g = GammaSet::new(s);
        let k = build_krein_form(&g).unwrap();
        for gm in g.gammas() {
            assert!(linalg::max_diff(&k.adjoint(gm), gm) <= 1e-14);
        }
    }

    #[test]
    fn charge_conjugation_implements_c() {
        for (p, q) in [(1, 1), (2, 0), (1, 3), (3, 1), (4, 0)] {
            let m = SpinorModule::new(sig(p, q)).unwrap();
            for gm in m.gammas.gammas() {
                let img = m.charge.conjugate(gm).unwrap();
                assert!(linalg::max_diff(&img, gm) <= 1e-12);
                let j = m.graded_charge();
                assert!(linalg::max_diff(&j.conjugate(gm).unwrap(), &-gm) <= 1e-12);
            }
        }
    }

    #[test]
    fn ko_sign_examples() {
        let s = ko_signs(sig(1, 1), Case::Antilorentz).unwrap();
        assert_eq!((s.eps, s.eps_dprime, s.eps_tilde, s.kappa, s.kappa_tilde), (1, 1, 1, -1, 1));
        let s = ko_signs(sig(3, 1), Case::Lorentz).unwrap();
        assert_eq!((s.eps, s.eps_dprime, s.eps_tilde, s.kappa, s.kappa_tilde), (-1, -1, 1, 1, -1));
        let s = ko_signs(sig(6, 0), Case::Euclidean).unwrap();
        assert_eq!((s.eps, s.eps_dprime, s.eps_tilde), (1, -1, -1));
        let s = ko_signs(sig(1, 3), Case::Antilorentz).unwrap();
        assert_eq!((s.eps_tilde, s.kappa_tilde, s.eps), (-1, 1, 1));
        let s = ko_signs(sig(4, 0), Case::Euclidean).unwrap();
        assert_eq!((s.eps_tilde, s.kappa_tilde, s.eps_dprime), (-1, 1, 1));
        assert_eq!(s.ko_dim_mod8, 4);
        assert!(matches!(ko_signs(sig(2, 2), Case::Lorentz), Err(Error::CaseMismatch { .. })));
    }

    #[test]
    fn sigma_product_examples() {
        let s = sig(1, 3);
        let m = SpinorModule::new(s).unwrap();
        let bs = sigma_compatible_product(&m.krein, &m.gammas, &Multivector::generator(s, 1)).unwrap();
        assert!(linalg::max_diff(&bs, &linalg::identity(4)) <= 1e-14);

        let s = sig(3, 1);
        let m = SpinorModule::new(s).unwrap();
        let b = AdmissibleRealStructure::from_vector(&Multivector::generator(s, 4), true).unwrap();
        let bs = sigma_compatible_product(&m.krein, &m.gammas, b.b()).unwrap();
        assert!(linalg::hermitian_residual(&bs) <= 1e-12);
        assert!(linalg::classify_hermitian(&bs).unwrap().classification.is_definite());
        assert_eq!(
            linalg::classify_hermitian(m.krein.matrix()).unwrap().classification,
            FormClass::Neutral
        );
        let two = Multivector::generator(s, 1).scale(2.0);
        assert!(matches!(sigma_compatible_product(&m.krein, &m.gammas, &two), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn wick_transition_examples() {
        let s = sig(1, 3);
        let r = wick_sign_transition(Case::Antilorentz, s, &Multivector::generator(s, 1)).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.measured.eps_tilde, -1);
        assert_eq!(r.measured.eps_dprime, -r.source.eps_dprime);

        let s = sig(3, 1);
        let b = AdmissibleRealStructure::from_vector(&Multivector::generator(s, 4), true).unwrap();
        let r = wick_sign_transition(Case::Lorentz, s, b.b()).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!((r.source.eps_tilde, r.measured.eps_tilde), (1, -1));

        let bad = Multivector::generator(s, 1);
        assert!(matches!(wick_sign_transition(Case::Lorentz, s, &bad), Err(Error::InvalidRotationElement(_))));
    }

    #[test]
    fn krein_weight_is_b_inverse() {
        for (p, q, graded) in [(1, 1, false), (1, 3, false), (3, 1, true), (2, 2, false)] {
            let s = sig(p, q);
            let v = Multivector::generator(s, if graded { s.n() } else { 1 });
            let sigma = AdmissibleRealStructure::from_vector(&v, graded).unwrap();
            let w = sigma_compatible_weights(&sigma);
            assert_eq!(w.len(), 1, "({p},{q})");
            // w = z b^{-1} for one scalar z
            let ratio = &w[0] * sigma.b();
            let z = ratio.normalized_trace();
            assert!(z.norm() > 1e-6);
            assert!(ratio.distance(&Multivector::scalar(s, z)) <= 1e-10, "({p},{q})");
        }
    }
}
