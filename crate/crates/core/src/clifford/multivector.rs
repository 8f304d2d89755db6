use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::blade::{blade_product, BladeIndex};
use super::Signature;
use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped after every operation.
pub const PRUNE_TOL: f64 = 1e-14;

/// Element of the complexified Clifford algebra, stored sparsely by blade.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    sig: Signature,
    coeffs: BTreeMap<BladeIndex, Complex64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Self { sig, coeffs: BTreeMap::new() }
    }

    pub fn scalar(sig: Signature, c: impl Into<Complex64>) -> Self {
        Self::blade(sig, BladeIndex::SCALAR, c)
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, 1.0)
    }

    pub fn blade(sig: Signature, blade: BladeIndex, c: impl Into<Complex64>) -> Self {
        debug_assert!(blade.is_valid_for(sig));
        let mut m = Self::zero(sig);
        m.add_term(blade, c.into());
        m
    }

    /// Generator `e_i`, 1-based.
    pub fn generator(sig: Signature, i: usize) -> Self {
        Self::blade(sig, BladeIndex::generator(i), 1.0)
    }

    /// Real grade-1 element `sum_i v_i e_i`.
    pub fn vector(sig: Signature, v: &[f64]) -> Result<Self> {
        if v.len() != sig.n() {
            return Err(Error::VectorLength { expected: sig.n(), found: v.len() });
        }
        let mut m = Self::zero(sig);
        for (i, &x) in v.iter().enumerate() {
            m.add_term(BladeIndex::generator(i + 1), Complex64::new(x, 0.0));
        }
        Ok(m)
    }

    pub fn from_terms(
        sig: Signature,
        terms: impl IntoIterator<Item = (BladeIndex, Complex64)>,
    ) -> Result<Self> {
        let mut m = Self::zero(sig);
        for (blade, c) in terms {
            if !blade.is_valid_for(sig) {
                return Err(Error::Parse(format!("blade {blade} out of range for {sig}")));
            }
            m.add_term(blade, c);
        }
        Ok(m)
    }

    /// Dense coefficient vector of length `2^n`, indexed by blade bitmask.
    pub fn from_dense(sig: Signature, coords: &[Complex64]) -> Self {
        debug_assert_eq!(coords.len(), sig.blade_count());
        let mut m = Self::zero(sig);
        for (i, &c) in coords.iter().enumerate() {
            m.add_term(BladeIndex(i as u32), c);
        }
        m
    }

    pub fn to_dense(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.sig.blade_count());
        for (b, c) in &self.coeffs {
            v[b.0 as usize] = *c;
        }
        v
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coeff(&self, blade: BladeIndex) -> Complex64 {
        self.coeffs.get(&blade).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (BladeIndex, Complex64)> + '_ {
        self.coeffs.iter().map(|(b, c)| (*b, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, blade: BladeIndex, c: Complex64) {
        let entry = self.coeffs.entry(blade).or_default();
        *entry += c;
        if entry.norm() <= PRUNE_TOL {
            self.coeffs.remove(&blade);
        }
    }

    fn map_coeffs(&self, f: impl Fn(BladeIndex, Complex64) -> Complex64) -> Self {
        let mut out = Self::zero(self.sig);
        for (&b, &c) in &self.coeffs {
            out.add_term(b, f(b, c));
        }
        out
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        self.map_coeffs(|_, c| c * s)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch { left: self.sig, right: other.sig });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&b, &c) in &other.coeffs {
            out.add_term(b, c);
        }
        Ok(out)
    }

    pub fn try_product(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.sig);
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                let (blade, sign) = blade_product(a, b, self.sig);
                out.add_term(blade, ca * cb * f64::from(sign));
            }
        }
        Ok(out)
    }

    /// Principal anti-involution `a^T`.
    pub fn reversal(&self) -> Self {
        self.map_coeffs(|b, c| c * f64::from(b.reversal_sign()))
    }

    /// Principal involution, `-id` on vectors.
    pub fn grade_involution(&self) -> Self {
        self.map_coeffs(|b, c| c * f64::from(b.involution_sign()))
    }

    /// Canonical real structure `c`: conjugates every coefficient.
    pub fn conjugation_c(&self) -> Self {
        self.map_coeffs(|_, c| c.conj())
    }

    /// `a^x = c(a^T)`.
    pub fn cross(&self) -> Self {
        self.map_coeffs(|b, c| c.conj() * f64::from(b.reversal_sign()))
    }

    /// Coefficient of the unit blade; `tau(1) = 1`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.coeff(BladeIndex::SCALAR)
    }

    pub fn grade_part(&self, k: usize) -> Self {
        let mut out = Self::zero(self.sig);
        for (&b, &c) in &self.coeffs {
            if b.grade() == k {
                out.add_term(b, c);
            }
        }
        out
    }

    pub fn even_part(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (&b, &c) in &self.coeffs {
            if b.grade() % 2 == 0 {
                out.add_term(b, c);
            }
        }
        out
    }

    pub fn odd_part(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (&b, &c) in &self.coeffs {
            if b.grade() % 2 == 1 {
                out.add_term(b, c);
            }
        }
        out
    }

    /// Whether every term has grade `k`, ignoring coefficients up to `tol`.
    pub fn is_grade(&self, k: usize, tol: f64) -> bool {
        self.coeffs.iter().all(|(b, c)| b.grade() == k || c.norm() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-coefficient distance; panics on signature mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Real coordinates of a grade-1 element; `None` if it has other grades.
    pub fn vector_coords(&self, tol: f64) -> Option<Vec<f64>> {
        if !self.is_grade(1, tol) || self.max_imag() > tol {
            return None;
        }
        Some((1..=self.sig.n()).map(|i| self.coeff(BladeIndex::generator(i)).re).collect())
    }

    /// Matrix of `x -> a x` on the dense blade coordinates.
    pub fn left_mult_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.sig.blade_count();
        let mut m = DMatrix::zeros(dim, dim);
        for (&a, &ca) in &self.coeffs {
            for col in 0..dim {
                let (row, sign) = blade_product(a, BladeIndex(col as u32), self.sig);
                m[(row.0 as usize, col)] += ca * f64::from(sign);
            }
        }
        m
    }

    /// Matrix of `x -> x a` on the dense blade coordinates.
    pub fn right_mult_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.sig.blade_count();
        let mut m = DMatrix::zeros(dim, dim);
        for (&a, &ca) in &self.coeffs {
            for col in 0..dim {
                let (row, sign) = blade_product(BladeIndex(col as u32), a, self.sig);
                m[(row.0 as usize, col)] += ca * f64::from(sign);
            }
        }
        m
    }

    /// Two-sided inverse. Tries the versor shortcut `a^T / (a a^T)` first and
    /// falls back to a dense solve of the left-multiplication system.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Singular);
        }
        let rev = self.reversal();
        let norm = self * &rev;
        let s = norm.normalized_trace();
        let scale = self.max_abs().powi(2).max(1.0);
        if s.norm() > 1e-12 * scale && (&norm - &Self::scalar(self.sig, s)).max_abs() <= 1e-12 * scale
        {
            return Ok(rev.scale(s.inv()));
        }
        let lu = self.left_mult_matrix().lu();
        let mut rhs = DVector::zeros(self.sig.blade_count());
        rhs[0] = Complex64::new(1.0, 0.0);
        let x = lu.solve(&rhs).ok_or(Error::Singular)?;
        let inv = Self::from_dense(self.sig, x.as_slice());
        let check = (self * &inv - Self::one(self.sig)).max_abs();
        if !check.is_finite() || check > 1e-9 {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    pub fn exact_eq(&self, other: &Self, tol: f64) -> bool {
        self.sig == other.sig && self.distance(other) <= tol
    }
}

/// Bilinear extension of [`blade_product`].
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.try_product(b)
}

/// `omega = e_1 ... e_n`.
pub fn volume_element(sig: Signature) -> Multivector {
    Multivector::blade(sig, BladeIndex(((1u64 << sig.n()) - 1) as u32), 1.0)
}

impl<'a> Mul<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &'a Multivector) -> Multivector {
        self.try_product(rhs).expect("multivector signature mismatch")
    }
}

impl Mul for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        &self * &rhs
    }
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    fn add(self, rhs: &'a Multivector) -> Multivector {
        self.try_add(rhs).expect("multivector signature mismatch")
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &'a Multivector) -> Multivector {
        self.try_add(&-rhs).expect("multivector signature mismatch")
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn e(s: Signature, idx: &[usize]) -> Multivector {
        // ordered product of generators, so e(&[2,1]) = e_2 e_1
        idx.iter()
            .fold(Multivector::one(s), |acc, &i| &acc * &Multivector::generator(s, i))
    }

    #[test]
    fn unit_and_isotropic_square() {
        let s = sig(1, 1);
        let x = Multivector::from_terms(
            s,
            [(BladeIndex(1), Complex64::new(2.0, 1.0)), (BladeIndex(3), Complex64::new(-1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(&Multivector::one(s) * &x, x);
        let v = Multivector::vector(s, &[1.0, 1.0]).unwrap();
        assert!((&v * &v).is_zero());
    }

    #[test]
    fn bivector_squares() {
        let e12 = e(sig(1, 1), &[1, 2]);
        assert_eq!(&e12 * &e12, Multivector::one(sig(1, 1)));
        let s = sig(1, 1);
        let t = (&e(s, &[1, 2]) * &e(s, &[2, 1])).normalized_trace();
        assert_eq!(t, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn volume_element_squares() {
        // omega^2 = (-1)^{n/2 + q}, computed here by explicit generator products
        for (p, q, expect) in [(1, 1, 1.0), (1, 3, -1.0), (2, 0, -1.0), (3, 1, -1.0), (2, 2, 1.0)] {
            let s = sig(p, q);
            let gens: Vec<usize> = (1..=s.n()).collect();
            let w = e(s, &gens);
            assert_eq!(w, volume_element(s));
            assert_eq!(&w * &w, Multivector::scalar(s, expect), "{s}");
        }
    }

    #[test]
    fn volume_element_reversal_and_anticommutation() {
        let s = sig(2, 2);
        let w = volume_element(s);
        assert_eq!(w.reversal(), w);
        for i in 1..=4 {
            let g = Multivector::generator(s, i);
            assert!((&w * &g + &g * &w).is_zero());
        }
    }

    #[test]
    fn reversal_of_bivector() {
        let s = sig(1, 1);
        assert_eq!(e(s, &[1, 2]).reversal(), e(s, &[2, 1]));
        assert_eq!(e(s, &[2, 1]), -e(s, &[1, 2]));
    }

    #[test]
    fn cross_of_imaginary_bivector() {
        let s = sig(1, 1);
        let a = e(s, &[1, 2]).scale(Complex64::i());
        assert_eq!(a.cross(), a);
    }

    #[test]
    fn involutions() {
        let s = sig(2, 0);
        let v = Multivector::generator(s, 1);
        assert_eq!(v.grade_involution(), -&v);
        assert_eq!(e(s, &[1, 2]).grade_involution(), e(s, &[1, 2]));
        let iv = v.scale(Complex64::i());
        assert_eq!(iv.conjugation_c(), iv.scale(-1.0));
    }

    #[test]
    fn inverse_of_non_versor() {
        let s = sig(2, 0);
        let a = Multivector::from_terms(
            s,
            [
                (BladeIndex(0), Complex64::new(2.0, 0.0)),
                (BladeIndex(1), Complex64::new(0.5, 0.0)),
                (BladeIndex(3), Complex64::new(0.0, 0.3)),
            ],
        )
        .unwrap();
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).exact_eq(&Multivector::one(s), 1e-12));
        assert!((&inv * &a).exact_eq(&Multivector::one(s), 1e-12));
        let null = Multivector::vector(sig(1, 1), &[1.0, 1.0]).unwrap();
        assert_eq!(null.inverse(), Err(Error::Singular));
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = Multivector::one(sig(2, 0));
        let b = Multivector::one(sig(1, 1));
        assert!(matches!(geometric_product(&a, &b), Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn left_mult_matrix_matches_product() {
        let s = sig(1, 3);
        let a = e(s, &[1, 3]) + Multivector::generator(s, 2).scale(Complex64::new(0.0, 2.0));
        let x = e(s, &[2, 3, 4]) + Multivector::one(s);
        let dense = a.left_mult_matrix() * x.to_dense();
        assert!(Multivector::from_dense(s, dense.as_slice()).exact_eq(&(&a * &x), 1e-14));
    }
}
