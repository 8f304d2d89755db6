//! Minimal left ideals `S_e = Cl(V) e`, the sigma-product restricted to them,
//! and the C*-norm attached to a Euclidean real structure.

use nalgebra::Cholesky;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{AdmissibleRealStructure, BladeIndex, Multivector, Signature};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, FormSignatureReport};
use crate::spinor::{self, SpinorModule};

/// Tolerance for idempotency, rank and span decisions.
pub const IDEAL_TOL: f64 = 1e-10;

/// A primitive idempotent together with a basis of its left ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct IdempotentIdeal {
    e: Multivector,
    basis: Vec<Multivector>,
}

impl IdempotentIdeal {
    /// Check that `e` is a primitive idempotent and pick a basis of `Cl(V) e`
    /// among the products `e_I e`.
    pub fn new(e: Multivector) -> Result<Self> {
        let sig = e.signature();
        if !sig.n().is_multiple_of(2) {
            return Err(Error::InvalidSignature { p: sig.p(), q: sig.q(), reason: "dimension must be even" });
        }
        let scale = e.max_abs().max(1.0);
        let sq_err = (&e * &e).distance(&e);
        if sq_err > IDEAL_TOL * scale * scale {
            return Err(Error::NotPrimitive(format!("e^2 differs from e by {sq_err:e}")));
        }
        let g = spinor::GammaSet::new(sig);
        let r = linalg::rank(&g.represent(&e)?, IDEAL_TOL * scale);
        if r != 1 {
            return Err(Error::NotPrimitive(format!("rank of rho(e) is {r}")));
        }
        let basis = independent_products(&e, sig.spinor_dim());
        if basis.len() != sig.spinor_dim() {
            return Err(Error::NotPrimitive(format!("ideal has dimension {}", basis.len())));
        }
        Ok(Self { e, basis })
    }

    pub fn idempotent(&self) -> &Multivector {
        &self.e
    }

    pub fn basis(&self) -> &[Multivector] {
        &self.basis
    }

    pub fn signature(&self) -> Signature {
        self.e.signature()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether `S_self = S_other`: the stacked coordinate matrix has the rank
    /// of either ideal alone.
    pub fn same_ideal(&self, other: &Self) -> Result<bool> {
        if self.signature() != other.signature() {
            return Err(Error::SignatureMismatch { left: self.signature(), right: other.signature() });
        }
        let stacked: Vec<&Multivector> = self.basis.iter().chain(&other.basis).collect();
        Ok(linalg::rank(&coordinate_matrix(&stacked), IDEAL_TOL) == self.dim())
    }
}

fn coordinate_matrix(items: &[&Multivector]) -> CMat {
    let rows = items.first().map_or(0, |m| m.signature().blade_count());
    let mut out = CMat::zeros(rows, items.len());
    for (j, m) in items.iter().enumerate() {
        out.set_column(j, &m.to_dense());
    }
    out
}

/// Greedy Gram-Schmidt over `e_I e` in blade order, keeping the first
/// `target` independent products.
fn independent_products(e: &Multivector, target: usize) -> Vec<Multivector> {
    let sig = e.signature();
    let mut kept = Vec::new();
    let mut ortho: Vec<CVec> = Vec::new();
    for i in 0..sig.blade_count() {
        let m = &Multivector::blade(sig, BladeIndex(i as u32), 1.0) * e;
        let mut v = m.to_dense();
        let norm0 = v.norm();
        if norm0 <= IDEAL_TOL {
            continue;
        }
        for u in &ortho {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 * norm0 {
            ortho.push(v / c(norm, 0.0));
            kept.push(m);
            if kept.len() == target {
                break;
            }
        }
    }
    kept
}

/// Commuting square-one elements `omega_j`: the first generator, then the
/// bivectors `e_2 e_3`, `e_4 e_5`, ..., each times `i` when it squares to -1.
pub fn commuting_set(sig: Signature) -> Vec<Multivector> {
    let mut out = Vec::with_capacity(sig.half());
    let mut push = |m: Multivector| {
        let sq = (&m * &m).normalized_trace().re;
        out.push(if sq > 0.0 { m } else { m.scale(c(0.0, 1.0)) });
    };
    push(Multivector::generator(sig, 1));
    for j in 1..sig.half() {
        push(Multivector::blade(sig, BladeIndex::from_indices(&[2 * j, 2 * j + 1]), 1.0));
    }
    out
}

/// `e = prod_j (1 + s_j omega_j) / 2` over [`commuting_set`], with
/// `s_j = -1` where `flip[j]` is set (missing entries count as unset).
pub fn build_primitive_idempotent(sig: Signature, flip: &[bool]) -> Result<IdempotentIdeal> {
    if !sig.n().is_multiple_of(2) || sig.n() == 0 {
        return Err(Error::InvalidSignature { p: sig.p(), q: sig.q(), reason: "dimension must be even and positive" });
    }
    let mut e = Multivector::one(sig);
    for (j, w) in commuting_set(sig).into_iter().enumerate() {
        let s = if flip.get(j).copied().unwrap_or(false) { -1.0 } else { 1.0 };
        let factor = (Multivector::one(sig) + w.scale(s)).scale(0.5);
        e = &e * &factor;
    }
    IdempotentIdeal::new(e)
}

/// Gram matrix of `(.,.)_sigma` on the ideal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedGram {
    pub gram: CMat,
    pub report: FormSignatureReport,
    /// `e e^{x sigma} = 0`.
    pub isotropic: bool,
}

pub fn restricted_sigma_product(ideal: &IdempotentIdeal, sigma: &AdmissibleRealStructure) -> Result<RestrictedGram> {
    if ideal.signature() != sigma.signature() {
        return Err(Error::SignatureMismatch { left: ideal.signature(), right: sigma.signature() });
    }
    let b = ideal.basis();
    let k = b.len();
    let gram = CMat::from_fn(k, k, |i, j| sigma.sigma_product(&b[i], &b[j]));
    let report = linalg::classify_hermitian(&gram)?;
    let e = ideal.idempotent();
    let isotropic = (e * &sigma.sigma_cross(e)).max_abs() <= IDEAL_TOL * e.max_abs().max(1.0).powi(2);
    Ok(RestrictedGram { gram, report, isotropic })
}

/// Largest violation of `(a x, y)_sigma = (x, a^{x sigma} y)_sigma` over the
/// ideal basis and the generators `a = e_i`.
pub fn left_compatibility_residual(ideal: &IdempotentIdeal, sigma: &AdmissibleRealStructure) -> f64 {
    let sig = ideal.signature();
    let mut worst: f64 = 0.0;
    for i in 1..=sig.n() {
        let a = Multivector::generator(sig, i);
        let ax = sigma.sigma_cross(&a);
        for x in ideal.basis() {
            for y in ideal.basis() {
                let lhs = sigma.sigma_product(&(&a * x), y);
                let rhs = sigma.sigma_product(x, &(&ax * y));
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    worst
}

/// The primitive idempotent `f` with `f^{x sigma} = f` and `S_f = S_e`.
///
/// `L_e` is a rank one projection on `S_e`; its sigma-adjoint `L_{e^{x sigma}}`
/// has image spanned by a non-isotropic `v`, and the orthogonal projection
/// `q = (v, .) v / (v, v)` is left multiplication by `f = q(e)`.
pub fn canonical_selfadjoint_idempotent(ideal: &IdempotentIdeal, sigma: &AdmissibleRealStructure) -> Result<Multivector> {
    if restricted_sigma_product(ideal, sigma)?.isotropic {
        return Err(Error::DegenerateIdempotent);
    }
    let e = ideal.idempotent();
    let ex = sigma.sigma_cross(e);
    let v = ideal
        .basis()
        .iter()
        .map(|x| &ex * x)
        .max_by(|a, b| a.max_abs().total_cmp(&b.max_abs()))
        .ok_or(Error::DegenerateIdempotent)?;
    let vv = sigma.sigma_product(&v, &v);
    if vv.norm() <= IDEAL_TOL * v.max_abs().powi(2) {
        return Err(Error::DegenerateIdempotent);
    }
    let f = v.scale(sigma.sigma_product(&v, e) / vv);

    let tol = IDEAL_TOL * e.max_abs().max(1.0).powi(2);
    let checks = [
        ("f^2 = f", (&f * &f).distance(&f)),
        ("f^x = f", sigma.sigma_cross(&f).distance(&f)),
        ("e f = e", (e * &f).distance(e)),
        ("f e = f", (&f * e).distance(&f)),
    ];
    for (name, err) in checks {
        if err > tol {
            return Err(Error::ConstructionFailed(format!("{name}: {err:e}")));
        }
    }
    let fi = IdempotentIdeal::new(f.clone())?;
    if !ideal.same_ideal(&fi)? {
        return Err(Error::ConstructionFailed("ideals differ".into()));
    }
    Ok(f)
}

/// Summary of the construction on one idempotent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealReport {
    pub signature: Signature,
    pub e: Multivector,
    pub gram_inertia: FormSignatureReport,
    pub isotropic: bool,
    pub f: Option<Multivector>,
    pub tau_f: Option<[f64; 2]>,
    pub residuals: IdealResiduals,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdealResiduals {
    pub gram_max: f64,
    pub compatibility: f64,
    pub f_selfadjoint: Option<f64>,
    pub f_idempotent: Option<f64>,
    pub tau_vs_rank: Option<f64>,
    pub same_ideal: Option<bool>,
}

pub fn ideal_report(ideal: &IdempotentIdeal, sigma: &AdmissibleRealStructure) -> Result<IdealReport> {
    let g = restricted_sigma_product(ideal, sigma)?;
    let mut residuals = IdealResiduals {
        gram_max: linalg::max_abs(&g.gram),
        compatibility: left_compatibility_residual(ideal, sigma),
        ..Default::default()
    };
    let (f, tau_f) = if g.isotropic {
        (None, None)
    } else {
        let f = canonical_selfadjoint_idempotent(ideal, sigma)?;
        let tau = f.normalized_trace();
        let sig = ideal.signature();
        let rho_rank = linalg::rank(&spinor::GammaSet::new(sig).represent(&f)?, IDEAL_TOL);
        residuals.f_selfadjoint = Some(sigma.sigma_cross(&f).distance(&f));
        residuals.f_idempotent = Some((&f * &f).distance(&f));
        residuals.tau_vs_rank = Some((tau - c(rho_rank as f64 / sig.spinor_dim() as f64, 0.0)).norm());
        residuals.same_ideal = Some(ideal.same_ideal(&IdempotentIdeal::new(f.clone())?)?);
        (Some(f), Some([tau.re, tau.im]))
    };
    Ok(IdealReport {
        signature: ideal.signature(),
        e: ideal.idempotent().clone(),
        gram_inertia: g.report,
        isotropic: g.isotropic,
        f,
        tau_f,
        residuals,
    })
}

fn require_euclidean(sigma: &AdmissibleRealStructure) -> Result<()> {
    if sigma.is_euclidean() {
        Ok(())
    } else {
        Err(Error::NotEuclidean)
    }
}

/// Operator norm of `X` from the form `h = L L^dagger` to itself, i.e. the
/// spectral norm of `L^dagger X L^{-dagger}`.
fn weighted_norm(chol: &Cholesky<Complex64, nalgebra::Dyn>, x: &CMat) -> Result<f64> {
    let l = chol.l();
    let lt = l.adjoint();
    let lt_inv = lt.clone().try_inverse().ok_or(Error::Singular)?;
    Ok(linalg::spectral_norm(&(lt * x * lt_inv)))
}

fn positive_cholesky(h: &CMat) -> Result<Cholesky<Complex64, nalgebra::Dyn>> {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    Cholesky::new(sym).ok_or(Error::NotEuclidean)
}

/// `||a||_{inf,sigma} = sup { ||a x||_sigma : ||x||_sigma = 1 }`, the norm of
/// left multiplication on `Cl(V)` for the positive definite sigma-product.
pub fn cstar_norm(sigma: &AdmissibleRealStructure, a: &Multivector) -> Result<f64> {
    require_euclidean(sigma)?;
    if a.signature() != sigma.signature() {
        return Err(Error::SignatureMismatch { left: a.signature(), right: sigma.signature() });
    }
    let chol = positive_cholesky(&sigma.blade_gram())?;
    weighted_norm(&chol, &a.left_mult_matrix())
}

/// Operator norm of `rho(a)` for the positive definite form `beta_sigma`
/// on the spinor module.
pub fn rho_norm(sigma: &AdmissibleRealStructure, a: &Multivector) -> Result<f64> {
    require_euclidean(sigma)?;
    let module = SpinorModule::new(sigma.signature())?;
    let h = spinor::sigma_compatible_product(&module.krein, &module.gammas, sigma.b())?;
    let trace = h.trace().re;
    let h = if trace < 0.0 { -h } else { h };
    let chol = positive_cholesky(&h)?;
    weighted_norm(&chol, &module.gammas.represent(a)?)
}

/// `| ||a^{x sigma} a|| - ||a||^2 |` in the C*-norm.
pub fn cstar_identity_check(sigma: &AdmissibleRealStructure, a: &Multivector) -> Result<f64> {
    let n = cstar_norm(sigma, a)?;
    let aa = &sigma.sigma_cross(a) * a;
    Ok((cstar_norm(sigma, &aa)? - n * n).abs())
}

/// `Ad_g(a) = g a g^{-1}`.
pub fn adjoint_action(g: &Multivector, a: &Multivector) -> Result<Multivector> {
    Ok(&(g * a) * &g.inverse()?)
}

/// `| ||Ad_g(a)||_{inf,sigma'} - ||a||_{inf,sigma} |` for `g = b b'^{-1}`.
pub fn ad_isometry_residual(
    sigma: &AdmissibleRealStructure,
    sigma_prime: &AdmissibleRealStructure,
    a: &Multivector,
) -> Result<f64> {
    let g = sigma.b() * &sigma_prime.b_inverse();
    isometry_residual(&g, sigma, sigma_prime, a)
}

/// Same comparison for `g = (b' b^{-1})^{1/2}`, the square root with
/// spectrum in the right half plane.
pub fn half_angle_isometry_residual(
    sigma: &AdmissibleRealStructure,
    sigma_prime: &AdmissibleRealStructure,
    a: &Multivector,
) -> Result<f64> {
    let g = principal_sqrt(&(sigma_prime.b() * &sigma.b_inverse()))?;
    isometry_residual(&g, sigma, sigma_prime, a)
}

fn isometry_residual(
    g: &Multivector,
    sigma: &AdmissibleRealStructure,
    sigma_prime: &AdmissibleRealStructure,
    a: &Multivector,
) -> Result<f64> {
    let image = adjoint_action(g, a)?;
    Ok((cstar_norm(sigma_prime, &image)? - cstar_norm(sigma, a)?).abs())
}

/// Principal square root through the spinor representation (Denman-Beavers),
/// read back with the normalized trace `x_I = tau(e_I^{-1} x)`.
pub fn principal_sqrt(x: &Multivector) -> Result<Multivector> {
    let sig = x.signature();
    let g = spinor::GammaSet::new(sig);
    let mut y = g.represent(x)?;
    let mut z = linalg::identity(y.nrows());
    for _ in 0..100 {
        let y_inv = linalg::inverse(&y)?;
        let z_inv = linalg::inverse(&z)?;
        let ny = (&y + z_inv) * c(0.5, 0.0);
        let nz = (&z + y_inv) * c(0.5, 0.0);
        let step = linalg::max_diff(&ny, &y);
        y = ny;
        z = nz;
        if step <= 1e-15 * linalg::max_abs(&y).max(1.0) {
            break;
        }
    }
    let check = linalg::max_diff(&(&y * &y), &g.represent(x)?);
    if check > 1e-9 * x.max_abs().max(1.0) {
        return Err(Error::NoConvergence);
    }
    let dim = y.nrows() as f64;
    let mut out = Multivector::zero(sig);
    for i in 0..sig.blade_count() {
        let blade = BladeIndex(i as u32);
        let inv = g.represent(&Multivector::blade(sig, blade, 1.0).inverse()?)?;
        out.add_term(blade, (inv * &y).trace() / dim);
    }
    Ok(out)
}
