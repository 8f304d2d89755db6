use std::fmt;

use serde::{Deserialize, Serialize};

use super::Signature;

/// Basis blade `e_I` encoded as a bitmask; bit `i-1` set means `e_i` present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BladeIndex(pub u32);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Single generator `e_i`, 1-based.
    pub fn generator(i: usize) -> Self {
        debug_assert!(i >= 1);
        BladeIndex(1 << (i - 1))
    }

    /// Blade from 1-based generator indices. Repeated indices cancel in pairs,
    /// so callers wanting a product with metric signs should use
    /// [`blade_product`] instead.
    pub fn from_indices(indices: &[usize]) -> Self {
        BladeIndex(indices.iter().fold(0, |acc, &i| acc ^ (1 << (i - 1))))
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 1-based generator indices in ascending order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn is_valid_for(self, sig: Signature) -> bool {
        (self.0 as u64) < (1u64 << sig.n())
    }

    /// Sign picked up under the principal anti-involution, `(-1)^{k(k-1)/2}`.
    pub fn reversal_sign(self) -> i8 {
        let k = self.grade();
        if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Sign under the principal involution, `(-1)^k`.
    pub fn involution_sign(self) -> i8 {
        if self.grade().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        let idx = self.indices();
        if idx.iter().all(|&i| i < 10) {
            write!(f, "e_")?;
            for i in idx {
                write!(f, "{i}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            write!(f, "e_{{{}}}", parts.join(","))
        }
    }
}

/// Product of two basis blades: `e_I e_J = sign * e_{I xor J}`.
///
/// The sign combines the number of transpositions needed to reach canonical
/// order with the metric signs of the generators common to both blades. Pure
/// integer arithmetic.
pub fn blade_product(a: BladeIndex, b: BladeIndex, sig: Signature) -> (BladeIndex, i8) {
    let mut swaps = 0u32;
    let mut shifted = a.0 >> 1;
    while shifted != 0 {
        swaps += (shifted & b.0).count_ones();
        shifted >>= 1;
    }
    let negatives = (a.0 & b.0 & sig.negative_mask()).count_ones();
    let sign = if (swaps + negatives).is_multiple_of(2) { 1 } else { -1 };
    (BladeIndex(a.0 ^ b.0), fault::apply(sign))
}

#[cfg(feature = "fault-injection")]
pub mod fault {
    //! Deliberately corrupts [`super::blade_product`] so that tests can check
    //! the verification suites notice.
    use std::sync::atomic::{AtomicBool, Ordering};

    static FLIP: AtomicBool = AtomicBool::new(false);

    pub fn set_blade_sign_flip(on: bool) {
        FLIP.store(on, Ordering::SeqCst);
    }

    pub(super) fn apply(sign: i8) -> i8 {
        if FLIP.load(Ordering::Relaxed) {
            -sign
        } else {
            sign
        }
    }
}

#[cfg(not(feature = "fault-injection"))]
mod fault {
    #[inline(always)]
    pub(super) fn apply(sign: i8) -> i8 {
        sign
    }
}
