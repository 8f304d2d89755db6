use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension; blade bitmasks are `u32` and the dense
/// Gram computations are `2^n x 2^n`.
pub const MAX_DIM: usize = 16;

/// Signature `(p, q)` of a non-degenerate quadratic form.
///
/// Generators `e_1 .. e_p` square to `+1` and `e_{p+1} .. e_n` square to `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        if n < 2 {
            return Err(Error::InvalidSignature { p, q, reason: "dimension must be at least 2" });
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidSignature { p, q, reason: "dimension must be even" });
        }
        if n > MAX_DIM {
            return Err(Error::InvalidSignature { p, q, reason: "dimension exceeds 16" });
        }
        Ok(Self { p, q })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// Lorentz signature `(n-1, 1)`.
    pub fn lorentz(n: usize) -> Result<Self> {
        Self::new(n.saturating_sub(1), 1)
    }

    /// Anti-Lorentz signature `(1, n-1)`.
    pub fn antilorentz(n: usize) -> Result<Self> {
        Self::new(1, n.saturating_sub(1))
    }

    pub fn p(self) -> usize {
        self.p
    }

    pub fn q(self) -> usize {
        self.q
    }

    pub fn n(self) -> usize {
        self.p + self.q
    }

    pub fn half(self) -> usize {
        self.n() / 2
    }

    /// Number of basis blades, `2^n`.
    pub fn blade_count(self) -> usize {
        1 << self.n()
    }

    /// Spinor dimension `2^{n/2}`.
    pub fn spinor_dim(self) -> usize {
        1 << self.half()
    }

    /// Metric sign of generator `i` (1-based).
    pub fn metric(self, i: usize) -> i8 {
        debug_assert!((1..=self.n()).contains(&i));
        if i <= self.p {
            1
        } else {
            -1
        }
    }

    /// Bitmask of the generators squaring to `-1`.
    pub fn negative_mask(self) -> u32 {
        (((1u64 << self.n()) - 1) as u32) & !(((1u64 << self.p) - 1) as u32)
    }

    /// `Q(v) = sum_i eta_i v_i^2` for a real coordinate vector.
    pub fn quadratic_form(self, v: &[f64]) -> f64 {
        v.iter()
            .enumerate()
            .map(|(i, x)| f64::from(self.metric(i + 1)) * x * x)
            .sum()
    }

    pub fn is_euclidean(self) -> bool {
        self.q == 0
    }

    pub fn is_lorentz(self) -> bool {
        self.q == 1
    }

    pub fn is_antilorentz(self) -> bool {
        self.p == 1
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

impl TryFrom<(usize, usize)> for Signature {
    type Error = Error;

    fn try_from((p, q): (usize, usize)) -> Result<Self> {
        Self::new(p, q)
    }
}

impl From<Signature> for (usize, usize) {
    fn from(sig: Signature) -> Self {
        (sig.p, sig.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small() {
        assert!(Signature::new(1, 0).is_err());
        assert!(Signature::new(2, 1).is_err());
        assert!(Signature::new(0, 0).is_err());
        assert!(Signature::new(0, 2).is_ok());
    }

    #[test]
    fn negative_mask_marks_last_q() {
        let sig = Signature::new(1, 3).unwrap();
        assert_eq!(sig.negative_mask(), 0b1110);
        assert_eq!(Signature::new(4, 0).unwrap().negative_mask(), 0);
        assert_eq!(Signature::new(0, 2).unwrap().negative_mask(), 0b11);
    }

    #[test]
    fn serde_as_pair() {
        let sig = Signature::new(3, 1).unwrap();
        assert_eq!(serde_json::to_string(&sig).unwrap(), "[3,1]");
        let back: Signature = serde_json::from_str("[1,3]").unwrap();
        assert_eq!(back, Signature::new(1, 3).unwrap());
        assert!(serde_json::from_str::<Signature>("[1,2]").is_err());
    }
}
