use crate::diagnostics::bernoulli::BernoulliPotential;
use crate::error::{Error, Result};

/// Exact global minimizer of `x -> sum_k B2({x - x_k})`.
///
/// Each arc between circularly consecutive points carries one quadratic
/// with leading coefficient `n`; its vertex, clamped to the arc, is the arc
/// minimum. Returns `(location, value)`; near-ties go to the smallest
/// location. Input need not be sorted.
pub fn exact_bernoulli_argmin(points: &[f64]) -> Result<(f64, f64)> {
    BernoulliPotential::new(points).argmin().ok_or(Error::NoPoints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::bernoulli2;
    use crate::torus::wrap;

    fn grid_oracle(points: &[f64], m: usize) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for j in 0..m {
            let x = j as f64 / m as f64;
            let v: f64 = points.iter().map(|&p| bernoulli2(wrap(x - p))).sum();
            if v < best.1 {
                best = (x, v);
            }
        }
        best
    }

    #[test]
    fn single_point_goes_antipodal() {
        let (x, v) = exact_bernoulli_argmin(&[0.0]).unwrap();
        assert_eq!(x, 0.5);
        assert!((v + 1.0 / 12.0).abs() < 1e-15);
        let (x, _) = exact_bernoulli_argmin(&[0.25]).unwrap();
        assert!((x - 0.75).abs() < 1e-15);
    }

    #[test]
    fn symmetric_pair_breaks_tie_low() {
        let (x, v) = exact_bernoulli_argmin(&[0.0, 0.5]).unwrap();
        assert_eq!(x, 0.25);
        assert!((v + 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn paper_seed_third_point() {
        let seed = [1.0 / 3.0, 0.8];
        let (x, v) = exact_bernoulli_argmin(&seed).unwrap();
        assert!((x - 1.0 / 15.0).abs() < 1e-15, "{x}");
        let (gx, gv) = grid_oracle(&seed, 1_000_000);
        assert!((x - gx).abs() < 1e-6);
        assert!(v <= gv + 1e-15 && gv - v < 1e-11);
        // Vertex of the wrapping arc: mean(x_k) + 1/2 mod 1.
        assert!((x - wrap((1.0 / 3.0 + 0.8) / 2.0 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(exact_bernoulli_argmin(&[]), Err(Error::NoPoints)));
    }
}
