//! Light-cone and Krein-positivity tests on the spinor module of a
//! Lorentzian or anti-Lorentzian signature.

use serde::{Deserialize, Serialize};

use crate::clifford::{volume_element, BladeIndex, Multivector, Signature};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, FormClass, FormSignatureReport};
use crate::spinor::{GammaSet, KreinForm};

pub use crate::linalg::classify_hermitian;

/// `|Q(v)| < NEAR_NULL * |v|^2` counts as null.
pub const NEAR_NULL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Future,
    Past,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Timelike,
    Spacelike,
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub in_cone: bool,
    pub component: Component,
    pub definiteness: FormSignatureReport,
    /// Set when `v` was within the near-null band and rejected on that basis.
    pub near_null: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Antilorentz,
    Lorentz,
}

fn class_of(sig: Signature) -> Result<Class> {
    if sig.is_antilorentz() {
        Ok(Class::Antilorentz)
    } else if sig.is_lorentz() {
        Ok(Class::Lorentz)
    } else {
        Err(Error::WrongSignatureClass(sig))
    }
}

fn check_vector(sig: Signature, v: &[f64]) -> Result<()> {
    if v.len() != sig.n() {
        return Err(Error::VectorLength { expected: sig.n(), found: v.len() });
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::NullVector);
    }
    Ok(())
}

/// Causal character from the sign of `Q(v)`: timelike means `Q > 0` in
/// anti-Lorentz signature and `Q < 0` in Lorentz signature.
pub fn cone_membership_oracle(sig: Signature, v: &[f64]) -> Result<CausalCharacter> {
    let class = class_of(sig)?;
    check_vector(sig, v)?;
    let q = sig.quadratic_form(v);
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    if q.abs() < NEAR_NULL * norm2 {
        return Ok(CausalCharacter::Null);
    }
    let timelike = match class {
        Class::Antilorentz => q > 0.0,
        Class::Lorentz => q < 0.0,
    };
    Ok(if timelike { CausalCharacter::Timelike } else { CausalCharacter::Spacelike })
}

/// The element whose image tests the cone: `v` itself (anti-Lorentz) or
/// `omega v` (Lorentz).
fn cone_element(sig: Signature, v: &[f64]) -> Result<Multivector> {
    let vec = Multivector::vector(sig, v)?;
    Ok(match class_of(sig)? {
        Class::Antilorentz => vec,
        Class::Lorentz => &volume_element(sig) * &vec,
    })
}

/// Extra factor `i` for Lorentz signature with `n = 0, 4 mod 8`.
fn cone_phase(sig: Signature) -> num_complex::Complex64 {
    if sig.is_antilorentz() || sig.n() % 8 == 2 || sig.n() % 8 == 6 {
        c(1.0, 0.0)
    } else {
        c(0.0, 1.0)
    }
}

fn cone_form(g: &GammaSet, beta: &KreinForm, v: &[f64], invert: bool) -> Result<CMat> {
    let sig = g.signature();
    let x = cone_element(sig, v)?;
    let phase = cone_phase(sig);
    let m = if invert {
        // x squares to a real scalar, so x^{-1} = x / x^2 exactly
        let square = (&x * &x).normalized_trace();
        if square.norm() == 0.0 {
            return Err(Error::Singular);
        }
        g.represent(&x)? / (square * phase)
    } else {
        g.represent(&x)? * phase
    };
    Ok(beta.matrix() * m)
}

fn canonical_timelike(sig: Signature) -> Result<Vec<f64>> {
    let mut v = vec![0.0; sig.n()];
    match class_of(sig)? {
        Class::Antilorentz => v[0] = 1.0,
        Class::Lorentz => v[sig.n() - 1] = 1.0,
    }
    Ok(v)
}

/// `+1` or `-1` such that the canonical timelike generator lands in the
/// future component.
fn calibration(g: &GammaSet, beta: &KreinForm) -> Result<f64> {
    let v0 = canonical_timelike(g.signature())?;
    let rep = classify_hermitian(&cone_form(g, beta, &v0, true)?)?;
    match rep.classification {
        FormClass::PositiveDefinite => Ok(1.0),
        FormClass::NegativeDefinite => Ok(-1.0),
        other => Err(Error::ConstructionFailed(format!(
            "canonical timelike vector gives a {} form",
            other.as_str()
        ))),
    }
}

/// Cone test: the hermitian form `beta rho(v)^{-1}` (anti-Lorentz),
/// `beta rho(omega v)^{-1}` (Lorentz, `n = 2, 6 mod 8`) or
/// `beta (i rho(omega v))^{-1}` (Lorentz, `n = 0, 4 mod 8`) is definite
/// exactly on the open light cone.
pub fn cone_test(g: &GammaSet, beta: &KreinForm, v: &[f64]) -> Result<ConeVerdict> {
    let sig = g.signature();
    class_of(sig)?;
    check_vector(sig, v)?;
    let lambda = calibration(g, beta)?;
    let q = sig.quadratic_form(v);
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    if q.abs() < NEAR_NULL * norm2 {
        // rho(v) is (nearly) singular here; classify the uninverted form with
        // a zero band scaled to |v| so the report comes out degenerate
        let h = cone_form(g, beta, v, false)? * c(lambda, 0.0);
        let ev = linalg::hermitian_eigenvalues(&h)?;
        let band = NEAR_NULL * norm2.sqrt().max(1.0) * 1.000_001;
        let n_plus = ev.iter().filter(|&&x| x > band).count();
        let n_minus = ev.iter().filter(|&&x| x < -band).count();
        let mut report = FormSignatureReport::from_inertia(n_plus, n_minus, ev.len() - n_plus - n_minus);
        if report.classification.is_definite() {
            report = FormSignatureReport::from_inertia(n_plus.min(ev.len() - 1), n_minus.min(ev.len() - 1), 1);
        }
        return Ok(ConeVerdict { in_cone: false, component: Component::None, definiteness: report, near_null: true });
    }
    let h = cone_form(g, beta, v, true)? * c(lambda, 0.0);
    let report = classify_hermitian(&h)?;
    let component = match report.classification {
        FormClass::PositiveDefinite => Component::Future,
        FormClass::NegativeDefinite => Component::Past,
        _ => Component::None,
    };
    Ok(ConeVerdict {
        in_cone: component != Component::None,
        component,
        definiteness: report,
        near_null: false,
    })
}

/// Whether `(psi, A psi) = psi^dagger beta A psi` is positive definite.
pub fn krein_positive(beta: &KreinForm, a: &CMat) -> Result<bool> {
    let h = beta.matrix() * a;
    Ok(classify_hermitian(&h)?.classification == FormClass::PositiveDefinite)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpinorReport {
    pub plus: FormSignatureReport,
    pub minus: FormSignatureReport,
    /// Largest entry of the block pairing the two chirality eigenspaces.
    pub cross_residual: f64,
    pub neutral: bool,
}

/// Orthonormal bases of the `chi = +1` and `chi = -1` eigenspaces.
fn chirality_eigenspaces(chi: &CMat) -> Result<(CMat, CMat)> {
    let res = linalg::hermitian_residual(chi);
    if res > 1e-10 {
        return Err(Error::NotHermitian(res));
    }
    let eig = ((chi + chi.adjoint()) * c(0.5, 0.0)).symmetric_eigen();
    let n = chi.nrows();
    let split = |positive: bool| {
        let idx: Vec<usize> = (0..n).filter(|&i| (eig.eigenvalues[i] > 0.0) == positive).collect();
        let mut out = CMat::zeros(n, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            out.set_column(k, &eig.eigenvectors.column(i));
        }
        out
    };
    Ok((split(true), split(false)))
}

/// `(psi, rho(w) psi)` restricted to each half-spinor module for spacelike `w`.
pub fn half_spinor_neutrality(
    beta: &KreinForm,
    chi: &CMat,
    g: &GammaSet,
    w: &[f64],
) -> Result<HalfSpinorReport> {
    let sig = g.signature();
    if sig.n() == 2 {
        return Err(Error::ExcludedDimension);
    }
    if cone_membership_oracle(sig, w)? != CausalCharacter::Spacelike {
        return Err(Error::NotSpacelike);
    }
    let h = beta.matrix() * g.represent(&Multivector::vector(sig, w)?)?;
    let (vp, vm) = chirality_eigenspaces(chi)?;
    let plus = classify_hermitian(&(vp.adjoint() * &h * &vp))?;
    let minus = classify_hermitian(&(vm.adjoint() * &h * &vm))?;
    let cross_residual = linalg::max_abs(&(vp.adjoint() * &h * &vm));
    let neutral = plus.classification == FormClass::Neutral
        && minus.classification == FormClass::Neutral
        && cross_residual <= 1e-12;
    Ok(HalfSpinorReport { plus, minus, cross_residual, neutral })
}

fn require_antilorentz_above_two(sig: Signature) -> Result<()> {
    if !sig.is_antilorentz() {
        return Err(Error::WrongSignatureClass(sig));
    }
    if sig.n() == 2 {
        return Err(Error::ExcludedDimension);
    }
    Ok(())
}

/// `(krein_positive(rho(u) + chi rho(v)), u + v and u - v both future)`.
pub fn chi_shifted_positivity(
    beta: &KreinForm,
    chi: &CMat,
    g: &GammaSet,
    u: &[f64],
    v: &[f64],
) -> Result<(bool, bool)> {
    let sig = g.signature();
    require_antilorentz_above_two(sig)?;
    let ru = g.represent(&Multivector::vector(sig, u)?)?;
    let rv = g.represent(&Multivector::vector(sig, v)?)?;
    let positive = krein_positive(beta, &(ru + chi * rv))?;
    let future = |x: Vec<f64>| -> Result<bool> {
        if x.iter().all(|&t| t == 0.0) {
            return Ok(false);
        }
        Ok(cone_test(g, beta, &x)?.component == Component::Future)
    };
    let plus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    Ok((positive, future(plus)? && future(minus)?))
}

/// Grade-1 part `u` of an odd self-adjoint `a = u + chi v + r`, read off as
/// `u_i = (e_i, a)_c / (e_i, e_i)_c`.
pub fn dominant_vector_extraction(a: &Multivector) -> Result<Vec<f64>> {
    let sig = a.signature();
    require_antilorentz_above_two(sig)?;
    let res = a.cross().distance(a);
    if res > 1e-10 * a.max_abs().max(1.0) {
        return Err(Error::NotSelfAdjoint(res));
    }
    if a.odd_part().is_zero() {
        return Err(Error::EvenInput);
    }
    let sigma = crate::clifford::AdmissibleRealStructure::canonical(sig);
    (1..=sig.n())
        .map(|i| {
            let e = Multivector::blade(sig, BladeIndex::generator(i), 1.0);
            let num = sigma.sigma_product(&e, a);
            let den = sigma.sigma_product(&e, &e);
            let u = num / den;
            if u.im.abs() > 1e-10 {
                return Err(Error::NotReal(u.im));
            }
            Ok(u.re)
        })
        .collect()
}
