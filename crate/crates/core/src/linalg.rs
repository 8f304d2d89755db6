//! Dense complex linear algebra shared by the spinor, cone and ideal code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const INERTIA_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    max_diff(m, &m.adjoint())
}

/// Inertia class of a hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormClass {
    PositiveDefinite,
    NegativeDefinite,
    Neutral,
    Indefinite,
    Degenerate,
}

impl FormClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FormClass::PositiveDefinite => "positive_definite",
            FormClass::NegativeDefinite => "negative_definite",
            FormClass::Neutral => "neutral",
            FormClass::Indefinite => "indefinite",
            FormClass::Degenerate => "degenerate",
        }
    }

    pub fn is_definite(self) -> bool {
        matches!(self, FormClass::PositiveDefinite | FormClass::NegativeDefinite)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSignatureReport {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub classification: FormClass,
}

impl FormSignatureReport {
    pub fn from_inertia(n_plus: usize, n_minus: usize, n_zero: usize) -> Self {
        let classification = if n_zero > 0 {
            FormClass::Degenerate
        } else if n_minus == 0 && n_plus > 0 {
            FormClass::PositiveDefinite
        } else if n_plus == 0 && n_minus > 0 {
            FormClass::NegativeDefinite
        } else if n_plus == n_minus {
            FormClass::Neutral
        } else {
            FormClass::Indefinite
        };
        Self { n_plus, n_minus, n_zero, classification }
    }

    pub fn inertia(&self) -> [usize; 3] {
        [self.n_plus, self.n_minus, self.n_zero]
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

/// Eigenvalues of a hermitian matrix after symmetrizing, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>> {
    let scale = max_abs(h).max(1.0);
    let res = hermitian_residual(h);
    if res > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(res));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Inertia of a hermitian matrix; eigenvalues below
/// `1e-9 * max(max|lambda|, 1)` count as zero.
pub fn classify_hermitian(h: &CMat) -> Result<FormSignatureReport> {
    let ev = hermitian_eigenvalues(h)?;
    Ok(inertia_of(&ev))
}

pub fn inertia_of(eigenvalues: &[f64]) -> FormSignatureReport {
    let top = eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let tol = INERTIA_TOL * top;
    let n_plus = eigenvalues.iter().filter(|&&x| x > tol).count();
    let n_minus = eigenvalues.iter().filter(|&&x| x < -tol).count();
    FormSignatureReport::from_inertia(n_plus, n_minus, eigenvalues.len() - n_plus - n_minus)
}

/// Orthonormal basis (as columns) of the null space of `a`, via SVD.
///
/// Singular values below `tol * max(sigma_max, 1)` count as zero. Short, wide
/// systems are padded with zero rows so the SVD sees every column.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let cols = a.ncols();
    let padded = if a.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), a.shape()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max).max(1.0);
    let picks: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol * top)
        .collect();
    let mut out = CMat::zeros(cols, picks.len());
    for (k, &i) in picks.iter().enumerate() {
        let row = v_t.row(i);
        for j in 0..cols {
            out[(j, k)] = row[j].conj();
        }
    }
    out
}

/// Numerical rank via singular values relative to the largest one.
pub fn rank(a: &CMat, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone().try_inverse().ok_or(Error::Singular)
}

/// Column-major `vec(X)` operator of `X -> A X B`: `B^T (x) A`.
pub fn sandwich_operator(a: &CMat, b: &CMat) -> CMat {
    b.transpose().kronecker(a)
}

/// Reshape a column-major `vec` back to an `n x n` matrix.
pub fn unvec(v: &[Complex64], n: usize) -> CMat {
    CMat::from_column_slice(n, n, v)
}

/// Whether `m` is `s * I` for some `s`; returns `s` when it is.
pub fn as_scalar(m: &CMat, tol: f64) -> Option<Complex64> {
    let s = m[(0, 0)];
    let off = max_diff(m, &(identity(m.nrows()) * s));
    (off <= tol * m.nrows() as f64 * max_abs(m).max(1.0)).then_some(s)
}

/// Round a scalar to a sign `+1` / `-1`.
pub fn as_sign(z: Complex64, tol: f64) -> Option<i8> {
    if z.im.abs() > tol {
        return None;
    }
    if (z.re - 1.0).abs() <= tol {
        Some(1)
    } else if (z.re + 1.0).abs() <= tol {
        Some(-1)
    } else {
        None
    }
}

/// Operator 2-norm of `m` (largest singular value).
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}
