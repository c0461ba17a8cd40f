//! Baseline sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointSet, Provenance};
use crate::error::{Error, Result};
use crate::torus::wrap;

/// Name of the generator behind [`random_points`]: ChaCha8 seeded through
/// `SeedableRng::seed_from_u64`, one `f64` in `[0, 1)` per coordinate.
pub const RANDOM_GENERATOR: &str = "ChaCha8Rng/seed_from_u64";

/// `x_m = {m alpha}` for `m = 1..=n`.
pub fn kronecker(alpha: f64, n: usize) -> PointSet {
    let coords = (1..=n).map(|m| wrap(m as f64 * alpha)).collect();
    PointSet::new(1, coords, Provenance::Kronecker { alpha }).expect("finite alpha")
}

/// Radical inverse of `m` in `base`: digits mirrored about the radix point.
pub fn radical_inverse(base: u64, mut m: u64) -> f64 {
    let mut num = 0u64;
    let mut den = 1u64;
    while m > 0 {
        num = num * base + m % base;
        den *= base;
        m /= base;
    }
    num as f64 / den as f64
}

/// van der Corput points `x_m = radical_inverse(base, m)`, `m = 1..=n`.
pub fn van_der_corput(base: u64, n: usize) -> Result<PointSet> {
    if base < 2 {
        return Err(Error::config(format!("van der Corput base must be >= 2, got {base}")));
    }
    let coords = (1..=n as u64).map(|m| radical_inverse(base, m)).collect();
    PointSet::new(1, coords, Provenance::VanDerCorput { base })
}

/// `n` i.i.d. uniform points on `T^d`; see [`RANDOM_GENERATOR`].
pub fn random_points(seed: u64, n: usize, d: usize) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * d).map(|_| rng.random::<f64>()).collect();
    PointSet::new(d, coords, Provenance::Random { seed, generator: RANDOM_GENERATOR.into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Digit reversal through the base-b string representation.
    fn reversal_oracle(base: u64, m: u64) -> f64 {
        let mut digits = Vec::new();
        let mut r = m;
        while r > 0 {
            digits.push(r % base);
            r /= base;
        }
        digits.iter().enumerate().map(|(i, &d)| d as f64 / (base as f64).powi(i as i32 + 1)).sum()
    }

    #[test]
    fn kronecker_values() {
        let s = kronecker(2f64.sqrt(), 2);
        assert!((s.coords()[0] - 0.414_213_562_373_095).abs() < 1e-12);
        assert!((s.coords()[1] - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let g = kronecker(phi, 3);
        for (got, want) in g.coords().iter().zip([0.618_033_988_749_895, 0.236_067_977_499_79, 0.854_101_966_249_685]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn van_der_corput_values() {
        assert_eq!(van_der_corput(2, 4).unwrap().coords(), &[0.5, 0.25, 0.75, 0.125]);
        assert_eq!(van_der_corput(2, 1).unwrap().coords(), &[0.5]);
        let v = van_der_corput(3, 3).unwrap();
        for (got, want) in v.coords().iter().zip([1.0 / 3.0, 2.0 / 3.0, 1.0 / 9.0]) {
            assert!((got - want).abs() < 1e-16);
        }
        for base in [2, 3, 5, 7] {
            for m in 1..500 {
                assert!((radical_inverse(base, m) - reversal_oracle(base, m)).abs() < 1e-15);
            }
        }
        assert!(van_der_corput(1, 3).is_err());
    }

    #[test]
    fn random_is_seeded_and_in_range() {
        let a = random_points(7, 100, 2).unwrap();
        let b = random_points(7, 100, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert!(a.coords().iter().all(|&c| (0.0..1.0).contains(&c)));
        let c = random_points(8, 100, 1).unwrap();
        let d = random_points(7, 100, 1).unwrap();
        assert_ne!(c.coords(), d.coords());
    }
}
