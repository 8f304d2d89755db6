//! Property suites over every module, reported check by check.
//!
//! Each check records the measured worst case (a residual, or a count of
//! failing cases) against its tolerance. A check that errors is reported as
//! failed with the error text.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{volume_element, AdmissibleRealStructure, BladeIndex, Multivector, Signature};
use crate::detect::{self, CausalCharacter, Component};
use crate::error::{Error, Result};
use crate::ideals;
use crate::lattice::{self, LatticeSpec};
use crate::linalg::{self, c, FormClass};
use crate::sample;
use crate::spinor::{self, Case, GammaSet, KOSigns, SpinorModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Spinor,
    Cone,
    Wick,
    Ideals,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [Suite::Core, Suite::Spinor, Suite::Cone, Suite::Wick, Suite::Ideals];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Spinor => "spinor",
            Suite::Cone => "cone",
            Suite::Wick => "wick",
            Suite::Ideals => "ideals",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst residual, or number of failing cases for counting checks.
    pub value: f64,
    pub tolerance: f64,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub ok: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder {
    prefix: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(prefix: &'static str) -> Self {
        Self { prefix, checks: Vec::new() }
    }

    fn push(&mut self, name: &str, tolerance: f64, cases: usize, outcome: Result<f64>) {
        let name = format!("{}/{name}", self.prefix);
        let check = match outcome {
            Ok(value) => Check { name, passed: value <= tolerance, value, tolerance, cases, error: None },
            Err(e) => Check { name, passed: false, value: f64::NAN, tolerance, cases, error: Some(e.to_string()) },
        };
        self.checks.push(check);
    }

    /// Worst residual over the cases must stay within `tolerance`.
    fn residual(&mut self, name: &str, tolerance: f64, cases: usize, f: impl FnOnce() -> Result<f64>) {
        self.push(name, tolerance, cases, f());
    }

    /// Every case must pass.
    fn count(&mut self, name: &str, cases: usize, f: impl FnOnce() -> Result<usize>) {
        self.push(name, 0.0, cases, f().map(|n| n as f64));
    }
}

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).expect("valid signature")
}

/// Every even signature with `n` in `dims`.
pub fn signatures_with(dims: &[usize]) -> Vec<Signature> {
    dims.iter().flat_map(|&n| (0..=n).map(move |p| sig(p, n - p))).collect()
}

pub fn run(suite: Suite, seed: u64) -> SuiteReport {
    let checks = match suite {
        Suite::Core => core_suite(seed),
        Suite::Spinor => spinor_suite(seed),
        Suite::Cone => cone_suite(seed),
        Suite::Wick => wick_suite(seed),
        Suite::Ideals => ideals_suite(seed),
        Suite::All => Suite::PARTS.into_iter().flat_map(|s| run(s, seed).checks).collect(),
    };
    let ok = checks.iter().all(|c| c.passed);
    SuiteReport { suite, seed, ok, checks }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

fn try_worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut acc: f64 = 0.0;
    for v in values {
        let v = v?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        acc = acc.max(v);
    }
    Ok(acc)
}

// ---------------------------------------------------------------- core

const CORE_SIGS: [(usize, usize); 6] = [(2, 0), (1, 1), (0, 2), (1, 3), (3, 1), (2, 2)];

/// Sign of `e_A e_B` by sorting the concatenated index word with adjacent
/// swaps and contracting repeated generators.
fn reordering_sign(a: BladeIndex, b: BladeIndex, s: Signature) -> i8 {
    let mut word: Vec<usize> = a.indices().into_iter().chain(b.indices()).collect();
    let mut sign = 1i8;
    let len = word.len();
    for i in 0..len {
        for j in 0..len.saturating_sub(i + 1) {
            if word[j] > word[j + 1] {
                word.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut stack: Vec<usize> = Vec::new();
    for x in word {
        if stack.last() == Some(&x) {
            stack.pop();
            sign *= s.metric(x);
        } else {
            stack.push(x);
        }
    }
    sign
}

fn core_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("core");
    let mut rng = sample::rng(seed);
    let sigs: Vec<Signature> = CORE_SIGS.iter().map(|&(p, q)| sig(p, q)).chain([sig(3, 3), sig(1, 5)]).collect();

    r.count("blade_product_matches_reordering", sigs.iter().map(|s| s.blade_count().pow(2)).sum(), || {
        let mut bad = 0;
        for &s in &sigs {
            for a in 0..s.blade_count() as u32 {
                for b in 0..s.blade_count() as u32 {
                    let (blade, sign) = crate::clifford::blade_product(BladeIndex(a), BladeIndex(b), s);
                    if blade.0 != a ^ b || sign != reordering_sign(BladeIndex(a), BladeIndex(b), s) {
                        bad += 1;
                    }
                }
            }
        }
        Ok(bad)
    });

    r.residual("associativity", 0.0, 200 * CORE_SIGS.len(), || {
        let mut w: f64 = 0.0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            for _ in 0..200 {
                let a = sample::integer_multivector(s, 6, 3, &mut rng);
                let b = sample::integer_multivector(s, 6, 3, &mut rng);
                let cc = sample::integer_multivector(s, 6, 3, &mut rng);
                w = w.max((&(&a * &b) * &cc).distance(&(&a * &(&b * &cc))));
            }
        }
        Ok(w)
    });

    r.residual("vector_square_is_quadratic_form", 0.0, 100 * CORE_SIGS.len(), || {
        let mut w: f64 = 0.0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            for _ in 0..100 {
                let v: Vec<f64> = (0..s.n()).map(|_| f64::from(rng.random_range(-5..=5))).collect();
                let m = Multivector::vector(s, &v)?;
                w = w.max((&m * &m).distance(&Multivector::scalar(s, s.quadratic_form(&v))));
            }
        }
        Ok(w)
    });

    r.residual("trace_laws", 1e-12, 50 * CORE_SIGS.len(), || {
        let mut w: f64 = 0.0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            let sigma = AdmissibleRealStructure::euclidean_for(s);
            for _ in 0..50 {
                let a = sample::multivector(s, &mut rng);
                let b = sample::multivector(s, &mut rng);
                let t = a.normalized_trace();
                w = w
                    .max(((&a * &b).normalized_trace() - (&b * &a).normalized_trace()).norm())
                    .max((a.reversal().normalized_trace() - t).norm())
                    .max((a.grade_involution().normalized_trace() - t).norm())
                    .max((sigma.apply(&a).normalized_trace() - t.conj()).norm());
            }
        }
        Ok(w)
    });

    r.residual("sigma_product_hermitian", 1e-12, 50 * CORE_SIGS.len(), || {
        let mut w: f64 = 0.0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            for sigma in [AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)] {
                for _ in 0..25 {
                    let a = sample::multivector(s, &mut rng);
                    let b = sample::multivector(s, &mut rng);
                    w = w.max((sigma.sigma_product(&a, &b) - sigma.sigma_product(&b, &a).conj()).norm());
                }
            }
        }
        Ok(w)
    });

    r.residual("sigma_is_involution_commuting_with_c", 1e-12, 20 * CORE_SIGS.len(), || {
        let mut w: f64 = 0.0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            let mut structures = vec![AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)];
            structures.push(AdmissibleRealStructure::from_vector(&Multivector::generator(s, 1), false)?);
            structures.push(AdmissibleRealStructure::from_vector(&Multivector::generator(s, s.n()), true)?);
            for sigma in &structures {
                for _ in 0..5 {
                    let a = sample::multivector(s, &mut rng);
                    w = w
                        .max(sigma.apply(&a.conjugation_c()).distance(&sigma.apply(&a).conjugation_c()))
                        .max(sigma.apply(&sigma.apply(&a)).distance(&a));
                }
            }
        }
        Ok(w)
    });

    let vol_sigs = signatures_with(&[2, 4, 6, 8]);
    r.count("volume_element_laws", vol_sigs.len(), || {
        let mut bad = 0;
        for &s in &vol_sigs {
            let w = volume_element(s);
            let sq = if (s.half() + s.q()) % 2 == 0 { 1.0 } else { -1.0 };
            let rev = if s.half() % 2 == 0 { 1.0 } else { -1.0 };
            let mut ok = (&w * &w).distance(&Multivector::scalar(s, sq)) == 0.0;
            ok &= w.reversal().distance(&w.scale(rev)) == 0.0;
            for i in 1..=s.n() {
                let e = Multivector::generator(s, i);
                ok &= (&(&w * &e) + &(&e * &w)).is_zero();
            }
            bad += usize::from(!ok);
        }
        Ok(bad)
    });

    let garling_sigs = signatures_with(&[2, 4, 6]);
    r.count("garling_dichotomy", 2 * garling_sigs.len(), || {
        let mut bad = 0;
        for &s in &garling_sigs {
            for sigma in [AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)] {
                bad += usize::from(!crate::clifford::real_structure::garling_consistent(&sigma));
            }
        }
        Ok(bad)
    });

    r.count("vector_structures_are_pin", 40 * CORE_SIGS.len(), || {
        let mut bad = 0;
        for &(p, q) in &CORE_SIGS {
            let s = sig(p, q);
            for k in 0..40 {
                let v = sample::cube_vector(s.n(), &mut rng);
                if s.quadratic_form(&v).abs() < 1e-3 {
                    continue;
                }
                let sigma = AdmissibleRealStructure::from_vector(&Multivector::vector(s, &v)?, k % 2 == 1)?;
                let n = sigma.b() * &sigma.b().cross();
                let t = n.normalized_trace();
                let scalar = n.distance(&Multivector::scalar(s, t)) <= 1e-10;
                bad += usize::from(!(scalar && t.im.abs() <= 1e-10 && (t.re.abs() - 1.0).abs() <= 1e-10));
            }
        }
        Ok(bad)
    });

    r.residual("wick_rotated_vector_carries_induced_form", 1e-12, 100 * 3, || {
        let mut w: f64 = 0.0;
        for s in [sig(1, 3), sig(3, 1), sig(2, 2)] {
            let sigma = AdmissibleRealStructure::euclidean_for(s);
            for _ in 0..100 {
                let v = Multivector::vector(s, &sample::cube_vector(s.n(), &mut rng))?;
                let u = sigma.wick_rotate_vector(&v)?;
                let q = (&u * &u).normalized_trace();
                w = w
                    .max((q - c(sigma.induced_bilinear(&v, &v)?, 0.0)).norm())
                    .max(sigma.apply(&u).distance(&u));
            }
        }
        Ok(w)
    });

    r.checks
}

// -------------------------------------------------------------- spinor

/// Signs `(eps, eps'', eps~, kappa, kappa~)` for `n = 0, 2, 4, 6 mod 8`.
pub fn reference_ko_row(case: Case, n: usize) -> [i8; 5] {
    let col = (n % 8) / 2;
    type Column = [i8; 4];
    let (eps, epp, ept, kap, kat): (Column, Column, Column, Column, Column) = match case {
        Case::Euclidean => ([1, -1, -1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, 1, 1, 1], [1, 1, 1, 1]),
        Case::Antilorentz => ([-1, 1, 1, -1], [-1, 1, -1, 1], [1, 1, -1, -1], [-1, -1, -1, -1], [1, 1, 1, 1]),
        Case::Lorentz => ([1, 1, -1, -1], [-1, 1, -1, 1], [-1, 1, 1, -1], [1, -1, 1, -1], [-1, 1, -1, 1]),
    };
    [eps[col], epp[col], ept[col], kap[col], kat[col]]
}

/// KO dimension `p - q mod 8` for `n = 0, 2, 4, 6 mod 8`.
pub fn reference_ko_dim(case: Case, n: usize) -> usize {
    let col = (n % 8) / 2;
    match case {
        Case::Euclidean => n % 8,
        Case::Antilorentz => [2, 0, 6, 4][col],
        Case::Lorentz => [6, 0, 2, 4][col],
    }
}

fn row_of(s: &KOSigns) -> [i8; 5] {
    [s.eps, s.eps_dprime, s.eps_tilde, s.kappa, s.kappa_tilde]
}

fn spinor_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("spinor");
    let mut rng = sample::rng(seed.wrapping_add(1));
    let sigs: Vec<Signature> = signatures_with(&[2, 4, 6]).into_iter().chain([sig(1, 7), sig(7, 1), sig(8, 0), sig(4, 4)]).collect();
    let modules: Result<Vec<SpinorModule>> = sigs.iter().map(|&s| SpinorModule::new(s)).collect();
    let modules = match modules {
        Ok(m) => m,
        Err(e) => {
            r.push("module_construction", 0.0, sigs.len(), Err(e));
            return r.checks;
        }
    };

    r.residual("gamma_relations", 1e-14, sigs.len(), || Ok(worst(modules.iter().map(|m| m.gammas.anticommutation_residual()))));

    r.residual("representation_is_homomorphism", 1e-12, 300, || {
        let mut w: f64 = 0.0;
        for s in [sig(1, 3), sig(3, 1), sig(2, 2)] {
            let g = GammaSet::new(s);
            for _ in 0..100 {
                let a = sample::multivector(s, &mut rng);
                let b = sample::multivector(s, &mut rng);
                let lhs = g.represent(&(&a * &b))?;
                w = w.max(linalg::max_diff(&lhs, &(g.represent(&a)? * g.represent(&b)?)) / lhs.norm().max(1.0));
            }
        }
        Ok(w)
    });

    r.count("commutant_is_scalar", sigs.len(), || {
        let mut bad = 0;
        for m in &modules {
            bad += usize::from(m.gammas.commutant_dimension()? != 1);
        }
        Ok(bad)
    });

    r.residual("krein_form_laws", 1e-12, sigs.len(), || {
        let mut w: f64 = 0.0;
        for m in &modules {
            let beta = m.krein.matrix();
            let id = linalg::identity(beta.nrows());
            w = w.max(linalg::hermitian_residual(beta)).max(linalg::max_diff(&(beta * beta), &id));
            for gm in m.gammas.gammas() {
                w = w.max(linalg::max_diff(&(beta * gm * beta), &gm.adjoint()));
            }
            if spinor::krein_intertwiner_space(&m.gammas)?.ncols() != 1 {
                w = f64::INFINITY;
            }
        }
        Ok(w)
    });

    r.residual("cross_is_krein_adjoint", 1e-12, 150, || {
        let mut w: f64 = 0.0;
        for m in modules.iter().filter(|m| m.signature().n() == 4) {
            for _ in 0..30 {
                let a = sample::multivector(m.signature(), &mut rng);
                w = w.max(linalg::max_diff(&m.gammas.represent(&a.cross())?, &m.krein.adjoint(&m.gammas.represent(&a)?)));
            }
        }
        Ok(w)
    });

    r.residual("charge_conjugation_implements_c", 1e-12, sigs.len() * 10, || {
        let mut w: f64 = 0.0;
        for m in &modules {
            let s = m.signature();
            for _ in 0..10 {
                let a = sample::multivector(s, &mut rng);
                let lhs = m.charge.conjugate(&m.gammas.represent(&a)?)?;
                w = w.max(linalg::max_diff(&lhs, &m.gammas.represent(&a.conjugation_c())?));
            }
        }
        Ok(w)
    });

    r.count("sign_rules", sigs.len(), || {
        let mut bad = 0;
        for m in &modules {
            let s = m.signature();
            let k = m.signs()?;
            let mut ok = k.eps == k.eps_dprime * k.eps_tilde;
            if s.q() == 0 {
                ok &= k.kappa == k.kappa_tilde;
            } else if s.is_lorentz() || s.is_antilorentz() {
                ok &= k.kappa == -k.kappa_tilde;
            }
            bad += usize::from(!ok);
        }
        Ok(bad)
    });

    r.count("ko_tables", 3 * 4, || {
        let mut bad = 0;
        for case in Case::ALL {
            for n in [2, 4, 6, 8] {
                let k = spinor::ko_signs(case.signature(n)?, case)?;
                let ok = row_of(&k) == reference_ko_row(case, n) && k.ko_dim_mod8 == reference_ko_dim(case, n);
                bad += usize::from(!ok);
            }
        }
        Ok(bad)
    });

    r.count("wick_sign_transitions", 2 * 4, || {
        let mut bad = 0;
        for n in [2, 4, 6, 8] {
            let al = Case::Antilorentz.signature(n)?;
            bad += usize::from(!spinor::wick_sign_transition(Case::Antilorentz, al, &Multivector::generator(al, 1))?.holds);
            let lo = Case::Lorentz.signature(n)?;
            let b = AdmissibleRealStructure::from_vector(&Multivector::generator(lo, n), true)?;
            bad += usize::from(!spinor::wick_sign_transition(Case::Lorentz, lo, b.b())?.holds);
        }
        Ok(bad)
    });

    let rob_sigs = signatures_with(&[2, 4, 6]);
    r.count("robinson_alternative", rob_sigs.len(), || {
        let mut bad = 0;
        for &s in &rob_sigs {
            let m = SpinorModule::new(s)?;
            let canonical = linalg::classify_hermitian(m.krein.matrix())?;
            let ok_c = if s.q() == 0 { canonical.classification.is_definite() } else { canonical.classification == FormClass::Neutral };
            let sigma = AdmissibleRealStructure::euclidean_for(s);
            let bs = spinor::sigma_compatible_product(&m.krein, &m.gammas, sigma.b())?;
            let ok_e = linalg::classify_hermitian(&bs)?.classification.is_definite();
            bad += usize::from(!(ok_c && ok_e));
        }
        Ok(bad)
    });

    r.residual("sigma_product_adjunction", 1e-12, 300, || {
        let mut w: f64 = 0.0;
        for s in [sig(1, 3), sig(3, 1), sig(2, 2)] {
            let m = SpinorModule::new(s)?;
            let sigma = AdmissibleRealStructure::euclidean_for(s);
            let bs = spinor::sigma_compatible_product(&m.krein, &m.gammas, sigma.b())?;
            for _ in 0..100 {
                let a = sample::multivector(s, &mut rng);
                let lhs = m.gammas.represent(&sigma.sigma_cross(&a))?;
                w = w.max(linalg::max_diff(&lhs, &spinor::form_adjoint(&bs, &m.gammas.represent(&a)?)?));
            }
        }
        Ok(w)
    });

    r.count("euclidean_b_has_unit_norm", rob_sigs.len(), || {
        let mut bad = 0;
        for &s in &rob_sigs {
            let sigma = AdmissibleRealStructure::euclidean_for(s);
            let n = sigma.b() * &sigma.b().cross();
            bad += usize::from(n.distance(&Multivector::one(s)) > 1e-12);
        }
        Ok(bad)
    });

    r.count("krein_weight_is_b_inverse", 4, || {
        let mut bad = 0;
        for (p, q, graded) in [(1, 1, false), (1, 3, false), (3, 1, true), (1, 5, false)] {
            let s = sig(p, q);
            let v = Multivector::generator(s, if graded { s.n() } else { 1 });
            let sigma = AdmissibleRealStructure::from_vector(&v, graded)?;
            let w = spinor::sigma_compatible_weights(&sigma);
            let ok = w.len() == 1 && {
                let ratio = &w[0] * sigma.b();
                let z = ratio.normalized_trace();
                z.norm() > 1e-6 && ratio.distance(&Multivector::scalar(s, z)) <= 1e-10
            };
            bad += usize::from(!ok);
        }
        Ok(bad)
    });

    r.checks
}

// ---------------------------------------------------------------- cone

/// Signatures for the cone checks.
pub const CONE_SIGS: [(usize, usize); 4] = [(1, 3), (3, 1), (1, 5), (5, 1)];

/// Cone verdict against the sign of `Q`, skipping vectors with
/// `|Q| < band |v|^2`. Returns `(disagreements, compared)`.
pub fn cone_oracle_disagreements(s: Signature, vectors: &[Vec<f64>], band: f64) -> Result<(usize, usize)> {
    let m = SpinorModule::new(s)?;
    let mut bad = 0;
    let mut compared = 0;
    for v in vectors {
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if s.quadratic_form(v).abs() < band * norm2 {
            continue;
        }
        compared += 1;
        let verdict = detect::cone_test(&m.gammas, &m.krein, v)?;
        let timelike = detect::cone_membership_oracle(s, v)? == CausalCharacter::Timelike;
        bad += usize::from(verdict.in_cone != timelike);
    }
    Ok((bad, compared))
}

fn cone_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("cone");
    let mut rng = sample::rng(seed.wrapping_add(2));

    r.count("oracle_agreement", 1000 * CONE_SIGS.len(), || {
        let mut bad = 0;
        for &(p, q) in &CONE_SIGS {
            let s = sig(p, q);
            let vs: Vec<Vec<f64>> = (0..1000).map(|_| sample::ball_vector(s.n(), &mut rng)).collect();
            bad += cone_oracle_disagreements(s, &vs, detect::NEAR_NULL)?.0;
        }
        Ok(bad)
    });

    r.count("antipodal_swap", 100 * CONE_SIGS.len(), || {
        let mut bad = 0;
        for &(p, q) in &CONE_SIGS {
            let s = sig(p, q);
            let m = SpinorModule::new(s)?;
            for _ in 0..100 {
                let v = sample::future_timelike(s, 0.05, &mut rng);
                let neg: Vec<f64> = v.iter().map(|x| -x).collect();
                let a = detect::cone_test(&m.gammas, &m.krein, &v)?;
                let b = detect::cone_test(&m.gammas, &m.krein, &neg)?;
                bad += usize::from(!(a.component == Component::Future && b.component == Component::Past));
            }
        }
        Ok(bad)
    });

    r.count("sign_constant_along_paths", 10 * 101 * CONE_SIGS.len(), || {
        let mut bad = 0;
        for &(p, q) in &CONE_SIGS {
            let s = sig(p, q);
            let m = SpinorModule::new(s)?;
            for _ in 0..10 {
                let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
                let a: Vec<f64> = sample::future_timelike(s, 0.05, &mut rng).iter().map(|x| x * flip).collect();
                let b: Vec<f64> = sample::future_timelike(s, 0.05, &mut rng).iter().map(|x| x * flip).collect();
                let start = detect::cone_test(&m.gammas, &m.krein, &a)?.definiteness.classification;
                for k in 0..=100 {
                    let t = k as f64 / 100.0;
                    let v: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
                    bad += usize::from(detect::cone_test(&m.gammas, &m.krein, &v)?.definiteness.classification != start);
                }
            }
        }
        Ok(bad)
    });

    r.count("krein_positive_products_have_positive_trace", 100 * 2, || {
        let mut bad = 0;
        for s in [sig(1, 3), sig(1, 5)] {
            let m = SpinorModule::new(s)?;
            for _ in 0..100 {
                let a = Multivector::vector(s, &sample::future_timelike(s, 0.05, &mut rng))?;
                let b = Multivector::vector(s, &sample::future_timelike(s, 0.05, &mut rng))?;
                let pos = detect::krein_positive(&m.krein, &m.gammas.represent(&a)?)?
                    && detect::krein_positive(&m.krein, &m.gammas.represent(&b)?)?;
                bad += usize::from(!(pos && (&a * &b).normalized_trace().re > 0.0));
            }
        }
        Ok(bad)
    });

    r.count("chi_shifted_positivity_equivalence", 500 * 2, || {
        let mut bad = 0;
        for s in [sig(1, 3), sig(1, 5)] {
            bad += chi_shift_disagreements(s, 500, &mut rng)?;
        }
        Ok(bad)
    });

    r.count("positive_odd_elements_have_future_part", 3 + 2 * 200, || {
        let mut bad = 0;
        let s = sig(1, 3);
        for t in [-0.9, 0.0, 0.9] {
            bad += usize::from(!dominant_part_is_future(&paired_rotation_family(s, t))?);
        }
        for s in [sig(1, 3), sig(1, 5)] {
            for a in krein_positive_odd_elements(s, 200, &mut rng)? {
                bad += usize::from(!dominant_part_is_future(&a)?);
            }
        }
        Ok(bad)
    });

    r.count("half_spinor_neutrality", 50 * 2, || {
        let mut bad = 0;
        for s in [sig(1, 3), sig(1, 5)] {
            let m = SpinorModule::new(s)?;
            for _ in 0..50 {
                let w = sample::spacelike(s, 0.05, &mut rng);
                bad += usize::from(!detect::half_spinor_neutrality(&m.krein, &m.chirality, &m.gammas, &w)?.neutral);
            }
        }
        Ok(bad)
    });

    r.checks
}

/// Disagreements between the two sides of the chi-shift equivalence on
/// `count` random pairs `(u, v)`.
pub fn chi_shift_disagreements(s: Signature, count: usize, rng: &mut impl Rng) -> Result<usize> {
    let m = SpinorModule::new(s)?;
    let mut bad = 0;
    for _ in 0..count {
        let u = if rng.random_bool(0.7) {
            sample::future_timelike(s, 0.0, rng)
        } else {
            sample::cube_vector(s.n(), rng)
        };
        let scale = rng.random_range(0.0..1.5);
        let v: Vec<f64> = sample::cube_vector(s.n(), rng).iter().map(|x| x * scale).collect();
        let (positive, future) = detect::chi_shifted_positivity(&m.krein, &m.chirality, &m.gammas, &u, &v)?;
        bad += usize::from(positive != future);
    }
    Ok(bad)
}

/// `e_1 + i t e_2 e_3`.
pub fn paired_rotation_family(s: Signature, t: f64) -> Multivector {
    Multivector::generator(s, 1) + Multivector::blade(s, BladeIndex::from_indices(&[2, 3]), c(0.0, t))
}

/// `count` random odd `x`-self-adjoint elements with Krein-positive image.
pub fn krein_positive_odd_elements(s: Signature, count: usize, rng: &mut impl Rng) -> Result<Vec<Multivector>> {
    let m = SpinorModule::new(s)?;
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100 * count {
            return Err(Error::ConstructionFailed("too few Krein-positive samples".into()));
        }
        let spread = rng.random_range(0.02..0.4);
        let a = sample::odd_selfadjoint(s, spread, rng);
        if detect::krein_positive(&m.krein, &m.gammas.represent(&a)?)? {
            out.push(a);
        }
    }
    Ok(out)
}

/// Whether a Krein-positive `a` has a future timelike grade-1 part.
pub fn dominant_part_is_future(a: &Multivector) -> Result<bool> {
    let s = a.signature();
    let m = SpinorModule::new(s)?;
    if !detect::krein_positive(&m.krein, &m.gammas.represent(a)?)? {
        return Ok(false);
    }
    let u = detect::dominant_vector_extraction(a)?;
    Ok(detect::cone_test(&m.gammas, &m.krein, &u)?.component == Component::Future)
}

// ---------------------------------------------------------------- wick

/// Lattice demos: source, lattice size, target case.
pub const WICK_DEMOS: [((usize, usize), usize, Case); 8] = [
    ((4, 0), 4, Case::Antilorentz),
    ((4, 0), 4, Case::Lorentz),
    ((1, 3), 4, Case::Euclidean),
    ((3, 1), 4, Case::Euclidean),
    ((2, 0), 16, Case::Antilorentz),
    ((2, 0), 16, Case::Lorentz),
    ((1, 1), 16, Case::Euclidean),
    ((6, 0), 3, Case::Antilorentz),
];

fn wick_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("wick");
    let reports: Result<Vec<lattice::WickReport>> = WICK_DEMOS
        .iter()
        .map(|&((p, q), n, to)| lattice::wick_demo(sig(p, q), n, to, 8, seed))
        .collect();
    match reports {
        Ok(reports) => {
            let pick = |f: fn(&lattice::WickResiduals) -> f64| worst(reports.iter().map(|x| f(&x.residuals)));
            r.residual("rotated_operator_is_krein_selfadjoint", 1e-12, reports.len(), || Ok(pick(|x| x.selfadjoint)));
            r.residual("rotated_operator_anticommutes_with_charge", 1e-12, reports.len(), || Ok(pick(|x| x.anticommute)));
            r.residual("rotation_round_trip", 1e-13, reports.len(), || Ok(pick(|x| x.roundtrip)));
            r.residual("rotated_operator_matches_direct_assembly", 1e-12, reports.len(), || Ok(pick(|x| x.direct_compare)));
            r.residual("momentum_symbol_matches_rotated_gammas", 1e-12, reports.len(), || Ok(pick(|x| x.symbol)));
        }
        Err(e) => r.push("demos", 0.0, WICK_DEMOS.len(), Err(e)),
    }

    r.residual("rotated_gammas_satisfy_target_relations", 1e-12, WICK_DEMOS.len(), || {
        try_worst(WICK_DEMOS.iter().map(|&((p, q), _, to)| {
            let s = sig(p, q);
            let (b, target) = lattice::rotation_plan(s, to)?;
            let m = SpinorModule::new(s)?;
            let bs = spinor::sigma_compatible_product(&m.krein, &m.gammas, &b)?;
            let raised = lattice::rotated_gammas(&m.gammas, &bs)?;
            let id = linalg::identity(m.gammas.dim());
            let mut w: f64 = 0.0;
            for (i, a) in raised.iter().enumerate() {
                for (j, b) in raised.iter().enumerate() {
                    let want = if i == j { &id * c(2.0 * f64::from(target.metric(i + 1)), 0.0) } else { id.clone() * c(0.0, 0.0) };
                    w = w.max(linalg::max_diff(&(a * b + b * a), &want));
                }
            }
            Ok(w)
        }))
    });

    r.residual("charge_anticommutes_and_graded_charge_commutes", 1e-12, 5, || {
        try_worst([(2usize, 0usize, 6usize), (1, 1, 6), (1, 3, 3), (3, 1, 3), (4, 0, 3)].into_iter().map(|(p, q, n)| {
            let s = sig(p, q);
            let m = SpinorModule::new(s)?;
            let spec = LatticeSpec::new(s, n, 1.0)?;
            let d = lattice::build_flat_dirac(&spec, &m.gammas)?;
            Ok(lattice::anticommutator_residual(&d, &m.charge)?.max(lattice::commutator_residual(&d, &m.graded_charge())?))
        }))
    });

    r.residual("free_spectrum_matches_dispersion", 1e-6, 3, || {
        try_worst([(2usize, 0usize, 16usize), (1, 1, 16), (1, 3, 4)].into_iter().map(|(p, q, n)| {
            let spec = LatticeSpec::new(sig(p, q), n, 1.0)?;
            let d = lattice::build_flat_dirac(&spec, &GammaSet::new(spec.signature()))?;
            let mut got = lattice::spectrum(&d, spec.dim(), seed)?;
            let mut want = lattice::free_spectrum_oracle(&spec);
            lattice::sort_spectrum(&mut got);
            lattice::sort_spectrum(&mut want);
            Ok(worst(got.iter().zip(&want).map(|(a, b)| (a.norm() - b.norm()).abs())))
        }))
    });

    r.residual("euclidean_spectrum_is_paired", 1e-10, 1, || {
        let spec = LatticeSpec::new(sig(2, 0), 16, 1.0)?;
        let d = lattice::build_flat_dirac(&spec, &GammaSet::new(spec.signature()))?;
        let mut ev = lattice::spectrum(&d, spec.dim(), seed)?;
        let mut neg: Vec<Complex64> = ev.iter().map(|z| -z).collect();
        lattice::sort_spectrum(&mut ev);
        lattice::sort_spectrum(&mut neg);
        Ok(worst(ev.iter().zip(&neg).map(|(a, b)| (a - b).norm())).max(worst(ev.iter().map(|z| z.im.abs()))))
    });

    r.checks
}

// -------------------------------------------------------------- ideals

/// Euclidean structures for the C*-checks: `c` on `(2,0)` and `b = e_1` on
/// `(1,1)` and `(1,3)`.
pub fn cstar_structures() -> Result<Vec<AdmissibleRealStructure>> {
    let mut out = vec![AdmissibleRealStructure::canonical(sig(2, 0))];
    for s in [sig(1, 1), sig(1, 3)] {
        out.push(AdmissibleRealStructure::from_vector(&Multivector::generator(s, 1), false)?);
    }
    Ok(out)
}

/// Euclidean structure from a random unit future timelike vector.
pub fn random_boosted_structure(s: Signature, rng: &mut impl Rng) -> Result<AdmissibleRealStructure> {
    let v = sample::future_timelike(s, 0.1, rng);
    AdmissibleRealStructure::from_vector(&Multivector::vector(s, &v)?, false)
}

fn ideals_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("ideals");
    let mut rng = sample::rng(seed.wrapping_add(4));
    let sigs = signatures_with(&[2, 4, 6]);

    r.count("constructed_idempotents_are_primitive", sigs.len(), || {
        let mut bad = 0;
        for &s in &sigs {
            let ideal = ideals::build_primitive_idempotent(s, &[])?;
            let e = ideal.idempotent();
            let tau = (e.normalized_trace() - c(1.0 / s.spinor_dim() as f64, 0.0)).norm();
            bad += usize::from(ideal.dim() != s.spinor_dim() || (e * e).distance(e) > 1e-12 || tau > 1e-12);
        }
        Ok(bad)
    });

    r.count("isotropic_witness_has_zero_gram", 1, || {
        let s = sig(1, 1);
        let e = (Multivector::one(s) + Multivector::blade(s, BladeIndex::from_indices(&[1, 2]), 1.0)).scale(0.5);
        let g = ideals::restricted_sigma_product(&ideals::IdempotentIdeal::new(e)?, &AdmissibleRealStructure::canonical(s))?;
        Ok(usize::from(!(g.isotropic && linalg::max_abs(&g.gram) == 0.0)))
    });

    r.count("gram_dichotomy_and_selfadjoint_idempotent", sigs.len() * 4, || {
        let mut bad = 0;
        for &s in &sigs {
            for flip in [vec![], vec![true], vec![false, true], vec![true, true, true]] {
                let ideal = ideals::build_primitive_idempotent(s, &flip)?;
                for sigma in [AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)] {
                    bad += usize::from(!ideal_case_holds(&ideal, &sigma)?);
                }
            }
        }
        Ok(bad)
    });

    r.count("perturbed_idempotents_recover_selfadjoint_f", 20, || {
        let mut bad = 0;
        let s = sig(1, 3);
        let sigma = AdmissibleRealStructure::euclidean_for(s);
        let base = ideals::build_primitive_idempotent(s, &[])?;
        for _ in 0..20 {
            let g = Multivector::one(s) + sample::multivector(s, &mut rng).scale(0.3);
            let e = &(&g * base.idempotent()) * &g.inverse()?;
            let ideal = ideals::IdempotentIdeal::new(e)?;
            bad += usize::from(!ideal_case_holds(&ideal, &sigma)?);
        }
        Ok(bad)
    });

    r.count("euclidean_restriction_is_definite", sigs.len(), || {
        let mut bad = 0;
        for &s in &sigs {
            let ideal = ideals::build_primitive_idempotent(s, &[])?;
            let g = ideals::restricted_sigma_product(&ideal, &AdmissibleRealStructure::euclidean_for(s))?;
            bad += usize::from(g.report.classification != FormClass::PositiveDefinite);
        }
        Ok(bad)
    });

    let structures = cstar_structures();
    r.residual("cstar_identity", 1e-9, 300, || {
        let mut w: f64 = 0.0;
        for sigma in structures.clone()? {
            for _ in 0..100 {
                let a = sample::multivector(sigma.signature(), &mut rng);
                let n = ideals::cstar_norm(&sigma, &a)?;
                w = w.max(ideals::cstar_identity_check(&sigma, &a)? / (n * n));
            }
        }
        Ok(w)
    });

    r.residual("cstar_norm_equals_representation_norm", 1e-9, 150, || {
        let mut w: f64 = 0.0;
        for sigma in structures.clone()? {
            for _ in 0..50 {
                let a = sample::multivector(sigma.signature(), &mut rng);
                let n = ideals::cstar_norm(&sigma, &a)?;
                w = w.max((n - ideals::rho_norm(&sigma, &a)?).abs() / n.max(1.0));
            }
        }
        Ok(w)
    });

    r.residual("half_angle_conjugation_is_isometric", 1e-9, 100, || {
        let mut w: f64 = 0.0;
        for s in [sig(1, 1), sig(1, 3)] {
            let sigma = AdmissibleRealStructure::from_vector(&Multivector::generator(s, 1), false)?;
            for _ in 0..5 {
                let other = random_boosted_structure(s, &mut rng)?;
                for _ in 0..10 {
                    let a = sample::multivector(s, &mut rng);
                    w = w.max(ideals::half_angle_isometry_residual(&sigma, &other, &a)? / ideals::cstar_norm(&sigma, &a)?);
                }
            }
        }
        Ok(w)
    });

    r.checks
}

/// Dichotomy for one `(e, sigma)`: isotropic with zero Gram, or a
/// non-degenerate Gram and a self-adjoint `f` with every stated property.
pub fn ideal_case_holds(ideal: &ideals::IdempotentIdeal, sigma: &AdmissibleRealStructure) -> Result<bool> {
    let g = ideals::restricted_sigma_product(ideal, sigma)?;
    if g.isotropic {
        return Ok(linalg::max_abs(&g.gram) <= 1e-12);
    }
    if g.report.n_zero != 0 {
        return Ok(false);
    }
    let report = ideals::ideal_report(ideal, sigma)?;
    let res = &report.residuals;
    Ok(res.f_selfadjoint.is_some_and(|x| x <= 1e-10)
        && res.f_idempotent.is_some_and(|x| x <= 1e-10)
        && res.tau_vs_rank.is_some_and(|x| x <= 1e-10)
        && res.same_ideal == Some(true)
        && res.compatibility <= 1e-10
        && report.tau_f.is_some_and(|[re, im]| (re - 1.0 / ideal.dim() as f64).abs() <= 1e-10 && im.abs() <= 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::PARTS.into_iter().chain([Suite::All]) {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn reordering_oracle_examples() {
        let s = sig(1, 1);
        let (e1, e2) = (BladeIndex::from_indices(&[1]), BladeIndex::from_indices(&[2]));
        assert_eq!(reordering_sign(e1, e1, s), 1);
        assert_eq!(reordering_sign(e2, e2, s), -1);
        assert_eq!(reordering_sign(e2, e1, s), -1);
    }

    #[test]
    fn reference_rows_satisfy_sign_rules() {
        for case in Case::ALL {
            for n in [2, 4, 6, 8] {
                let [eps, epp, ept, kap, kat] = reference_ko_row(case, n);
                assert_eq!(eps, epp * ept);
                if case == Case::Euclidean {
                    assert_eq!(kap, kat);
                } else {
                    assert_eq!(kap, -kat);
                }
            }
        }
    }

    #[test]
    fn core_and_spinor_suites_pass() {
        for suite in [Suite::Core, Suite::Spinor] {
            let rep = run(suite, 0);
            let bad: Vec<_> = rep.failures().collect();
            assert!(rep.ok, "{bad:?}");
        }
    }
}
