use nalgebra::DMatrix;
use num_complex::Complex64;

use super::blade::{blade_product, BladeIndex};
use super::multivector::{volume_element, Multivector};
use super::Signature;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, FormClass, FormSignatureReport};

const TOL: f64 = 1e-12;

/// Admissible real structure `sigma = Ad_b o c` with `b` real and `b^2 = lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleRealStructure {
    b: Multivector,
    lambda: i8,
    alpha: i8,
}

impl AdmissibleRealStructure {
    /// The canonical structure `c` itself (`b = 1`).
    pub fn canonical(sig: Signature) -> Self {
        Self { b: Multivector::one(sig), lambda: 1, alpha: 1 }
    }

    /// A Euclidean structure for any signature.
    ///
    /// For even `q`, `b` is the product of the negative generators; for odd
    /// `q` it is the product of the positive ones. Either way `Ad_b` flips
    /// exactly the negative directions.
    pub fn euclidean_for(sig: Signature) -> Self {
        let gens: Vec<usize> =
            if sig.q().is_multiple_of(2) { (sig.p() + 1..=sig.n()).collect() } else { (1..=sig.p()).collect() };
        let b = gens
            .iter()
            .fold(Multivector::one(sig), |acc, &i| &acc * &Multivector::generator(sig, i));
        Self::new(b).expect("product of generators is an admissible element")
    }

    /// Normalize a Clifford-group element `b_raw` with `c(b_raw) = e^{i theta} b_raw`.
    ///
    /// The phase is fixed by making the largest coefficient real and positive
    /// (first in blade order among ties).
    pub fn new(b_raw: Multivector) -> Result<Self> {
        let sig = b_raw.signature();
        let top = b_raw.max_abs();
        if top == 0.0 {
            return Err(Error::NotInCliffordGroup("zero element".into()));
        }
        let lead = b_raw
            .terms()
            .find(|(_, c)| c.norm() >= top * (1.0 - TOL))
            .map(|(_, c)| c)
            .expect("nonempty");
        let rotated = b_raw.scale(lead.conj() / lead.norm());
        if rotated.max_imag() > TOL * top {
            return Err(Error::NotAdmissible);
        }
        let real = Multivector::from_terms(sig, rotated.terms().map(|(b, c)| (b, Complex64::new(c.re, 0.0))))?;

        let sq = &real * &real;
        let s = sq.normalized_trace().re;
        let off = (&sq - &Multivector::scalar(sig, s)).max_abs();
        if off > TOL * top * top {
            return Err(Error::NotInCliffordGroup("b c(b) is not a scalar".into()));
        }
        if s.abs() <= TOL * top * top {
            return Err(Error::NotInCliffordGroup("b c(b) vanishes".into()));
        }
        let lambda: i8 = if s > 0.0 { 1 } else { -1 };
        let b = real.scale(1.0 / s.abs().sqrt());

        for i in 1..=sig.n() {
            let img = (&(&b * &Multivector::generator(sig, i)) * &b).scale(f64::from(lambda));
            if !img.is_grade(1, 1e-10) {
                return Err(Error::NotInCliffordGroup(format!("Ad_b(e_{i}) leaves grade 1")));
            }
        }

        let rev = b.reversal();
        let alpha = if rev.exact_eq(&b, 1e-10) {
            1
        } else if rev.exact_eq(&-&b, 1e-10) {
            -1
        } else {
            return Err(Error::NotInCliffordGroup("b^T is not a multiple of b".into()));
        };
        Ok(Self { b, lambda, alpha })
    }

    /// `sigma_v` (graded = false, `b = v`) or `sigma_{omega v}` (graded = true).
    pub fn from_vector(v: &Multivector, graded: bool) -> Result<Self> {
        let sig = v.signature();
        let coords = v.vector_coords(TOL).ok_or(Error::NotAVector)?;
        let qv = sig.quadratic_form(&coords);
        let norm2: f64 = coords.iter().map(|x| x * x).sum();
        if norm2 == 0.0 || qv.abs() <= 1e-12 * norm2 {
            return Err(Error::IsotropicVector(qv));
        }
        let raw = if graded { &volume_element(sig) * v } else { v.clone() };
        Self::new(raw)
    }

    pub fn signature(&self) -> Signature {
        self.b.signature()
    }

    pub fn b(&self) -> &Multivector {
        &self.b
    }

    /// `b^2 = lambda`.
    pub fn lambda(&self) -> i8 {
        self.lambda
    }

    /// `b^T = alpha b`.
    pub fn alpha(&self) -> i8 {
        self.alpha
    }

    pub fn b_inverse(&self) -> Multivector {
        self.b.scale(f64::from(self.lambda))
    }

    /// `sigma(a) = b c(a) b^{-1}`.
    pub fn apply(&self, a: &Multivector) -> Multivector {
        &(&self.b * &a.conjugation_c()) * &self.b_inverse()
    }

    /// `a^{x sigma} = sigma(a^T)`.
    pub fn sigma_cross(&self, a: &Multivector) -> Multivector {
        self.apply(&a.reversal())
    }

    /// `(a, b)_sigma = tau(sigma(a^T) b)`, antilinear in `a`.
    pub fn sigma_product(&self, a: &Multivector, b: &Multivector) -> Complex64 {
        (&self.sigma_cross(a) * b).normalized_trace()
    }

    /// `u_sigma(v) = (v + sigma v)/2 + i (v - sigma v)/2`.
    pub fn wick_rotate_vector(&self, v: &Multivector) -> Result<Multivector> {
        if !v.is_grade(1, TOL) {
            return Err(Error::NotAVector);
        }
        let sv = self.apply(v);
        let plus = (v + &sv).scale(0.5);
        let minus = (v - &sv).scale(Complex64::new(0.0, 0.5));
        Ok(plus + minus)
    }

    /// `B_sigma(v, w) = (B(sigma v, w) + B(sigma w, v)) / 2` for real vectors.
    pub fn induced_bilinear(&self, v: &Multivector, w: &Multivector) -> Result<f64> {
        for x in [v, w] {
            if x.vector_coords(TOL).is_none() {
                return Err(Error::NotAVector);
            }
        }
        let (sv, sw) = (self.apply(v), self.apply(w));
        let sum = &(&(&sv * w) + &(w * &sv)) + &(&(&sw * v) + &(v * &sw));
        let t = sum.normalized_trace() * 0.25;
        if t.im.abs() > TOL {
            return Err(Error::NotReal(t.im));
        }
        Ok(t.re)
    }

    /// Gram matrix of `B_sigma` on the generators.
    pub fn induced_gram(&self) -> DMatrix<f64> {
        let sig = self.signature();
        let n = sig.n();
        DMatrix::from_fn(n, n, |i, j| {
            self.induced_bilinear(&Multivector::generator(sig, i + 1), &Multivector::generator(sig, j + 1))
                .expect("generators are real vectors")
        })
    }

    /// Whether `B_sigma` is positive definite.
    pub fn is_euclidean(&self) -> bool {
        let ev = self.induced_gram().symmetric_eigenvalues();
        let top = ev.iter().map(|x| x.abs()).fold(1.0, f64::max);
        ev.iter().all(|&x| x > linalg::INERTIA_TOL * top)
    }

    /// Gram matrix `G_IJ = (e_I, e_J)_sigma` on the full blade basis.
    pub fn blade_gram(&self) -> CMat {
        let sig = self.signature();
        let dim = sig.blade_count();
        let mut g = CMat::zeros(dim, dim);
        for i in 0..dim {
            let blade = BladeIndex(i as u32);
            let img = self.apply(&Multivector::blade(sig, blade, 1.0));
            let rev = f64::from(blade.reversal_sign());
            for (k, c) in img.terms() {
                // tau(X e_J) only sees the K = J term of X
                let (_, sign) = blade_product(k, k, sig);
                g[(i, k.0 as usize)] = c * rev * f64::from(sign);
            }
        }
        g
    }

    /// Inertia of [`Self::blade_gram`].
    pub fn gram_signature(&self) -> FormSignatureReport {
        linalg::classify_hermitian(&self.blade_gram()).expect("sigma-product Gram is hermitian")
    }
}

/// Convenience for the Garling dichotomy: positive definite exactly when
/// Euclidean.
pub fn garling_consistent(sigma: &AdmissibleRealStructure) -> bool {
    let report = sigma.gram_signature();
    let half = sigma.signature().blade_count() / 2;
    if sigma.is_euclidean() {
        report.classification == FormClass::PositiveDefinite
    } else {
        report.classification == FormClass::Neutral && report.n_plus == half
    }
}
