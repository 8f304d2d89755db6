//! Seeded random inputs for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{BladeIndex, Multivector, Signature};
use crate::linalg::c;

/// Default seed, overridable from the command line.
pub const DEFAULT_SEED: u64 = 0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(rng: &mut impl Rng) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Complex coefficients uniform in `[-1, 1]^2` on every blade.
pub fn multivector(sig: Signature, rng: &mut impl Rng) -> Multivector {
    let coords: Vec<_> = (0..sig.blade_count()).map(|_| c(unit(rng), unit(rng))).collect();
    Multivector::from_dense(sig, &coords)
}

/// Real coefficients uniform in `[-1, 1]` on every blade.
pub fn real_multivector(sig: Signature, rng: &mut impl Rng) -> Multivector {
    let coords: Vec<_> = (0..sig.blade_count()).map(|_| c(unit(rng), 0.0)).collect();
    Multivector::from_dense(sig, &coords)
}

/// Gaussian-integer coefficients in `[-range, range]`, a few blades only.
pub fn integer_multivector(sig: Signature, terms: usize, range: i32, rng: &mut impl Rng) -> Multivector {
    let mut m = Multivector::zero(sig);
    for _ in 0..terms {
        let blade = BladeIndex(rng.random_range(0..sig.blade_count() as u32));
        let z = c(f64::from(rng.random_range(-range..=range)), f64::from(rng.random_range(-range..=range)));
        m.add_term(blade, z);
    }
    m
}

/// Uniform in the cube `[-1, 1]^n`.
pub fn cube_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| unit(rng)).collect()
}

/// Uniform in the open unit ball, excluding the origin.
pub fn ball_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v = cube_vector(n, rng);
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 < 1.0 && r2 > 0.0 {
            return v;
        }
    }
}

/// Index of the time direction: the first generator in anti-Lorentz
/// signature, the last one in Lorentz signature.
pub fn time_index(sig: Signature) -> usize {
    if sig.is_antilorentz() {
        0
    } else {
        sig.n() - 1
    }
}

fn spatial_norm(sig: Signature, v: &[f64]) -> f64 {
    let t = time_index(sig);
    v.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, x)| x * x).sum::<f64>().sqrt()
}

/// Future timelike vector with `|v_t| >= (1 + margin) |v_space|`, where the
/// future direction is positive time component.
pub fn future_timelike(sig: Signature, margin: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut v = cube_vector(sig.n(), rng);
    let t = time_index(sig);
    let s = spatial_norm(sig, &v);
    v[t] = (1.0 + margin) * s + rng.random_range(0.05..1.0);
    v
}

/// Spacelike vector with `|v_space| >= (1 + margin) |v_t|`.
pub fn spacelike(sig: Signature, margin: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut v = cube_vector(sig.n(), rng);
        let t = time_index(sig);
        let s = spatial_norm(sig, &v);
        if s < 0.05 {
            continue;
        }
        v[t] = rng.random_range(-1.0..1.0) * s / (1.0 + margin);
        return v;
    }
}

/// Real odd element `a` with `a^x = a`: a future timelike vector of unit
/// time component plus `spread` times random odd blades, symmetrized.
pub fn odd_selfadjoint(sig: Signature, spread: f64, rng: &mut impl Rng) -> Multivector {
    let mut a = Multivector::vector(sig, &future_timelike(sig, 0.2, rng)).expect("length n");
    for i in 0..sig.blade_count() {
        let blade = BladeIndex(i as u32);
        if blade.grade() % 2 == 1 {
            let z = c(unit(rng), unit(rng)) * spread;
            a.add_term(blade, z);
        }
    }
    (&a + &a.cross()).scale(0.5)
}
