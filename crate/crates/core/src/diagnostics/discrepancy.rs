use crate::error::{Error, Result};
use crate::sequence::PointSet;
use crate::torus::wrap;

fn sorted(points: &PointSet) -> Result<Vec<f64>> {
    let mut ys = points.require_1d()?.to_vec();
    if ys.is_empty() {
        return Err(Error::NoPoints);
    }
    ys.sort_by(f64::total_cmp);
    Ok(ys)
}

/// Star discrepancy over anchored intervals `[0, t)`:
/// `max_i max(i/n - y_(i), y_(i) - (i-1)/n)`.
pub fn star_discrepancy(points: &PointSet) -> Result<f64> {
    let ys = sorted(points)?;
    let n = ys.len() as f64;
    Ok(ys
        .iter()
        .enumerate()
        .map(|(i, &y)| ((i + 1) as f64 / n - y).max(y - i as f64 / n))
        .fold(0.0, f64::max))
}

/// Extreme discrepancy over all intervals of the circle, wrapping ones
/// included: `1/n + max_i (i/n - y_(i)) - min_i (i/n - y_(i))`.
pub fn extreme_discrepancy(points: &PointSet) -> Result<f64> {
    let ys = sorted(points)?;
    let n = ys.len() as f64;
    let (lo, hi) = ys
        .iter()
        .enumerate()
        .map(|(i, &y)| (i + 1) as f64 / n - y)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(1.0 / n + hi - lo)
}

/// `|#{x_i in J}/n - |J||` for the arc `J = [left, left + length)`, wrapping
/// past 1.
pub fn interval_count_error(points: &PointSet, left: f64, length: f64) -> Result<f64> {
    let xs = points.require_1d()?;
    if xs.is_empty() {
        return Err(Error::NoPoints);
    }
    if !(0.0..=1.0).contains(&length) {
        return Err(Error::InvalidConfig(format!("interval length {length} outside [0, 1]")));
    }
    let count = if length >= 1.0 { xs.len() } else { xs.iter().filter(|&&x| wrap(x - left) < length).count() };
    Ok((count as f64 / xs.len() as f64 - length).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::van_der_corput;
    use proptest::prelude::*;

    fn set(xs: &[f64]) -> PointSet {
        PointSet::from_1d(xs)
    }

    /// `sup_t |#{x < t}/n - t|`, evaluated at and just past every point.
    fn star_brute(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mut worst = 0.0f64;
        for &t in xs.iter().chain([1.0].iter()) {
            let below = xs.iter().filter(|&&x| x < t).count() as f64;
            let upto = xs.iter().filter(|&&x| x <= t).count() as f64;
            worst = worst.max((below / n - t).abs()).max((upto / n - t).abs());
        }
        worst
    }

    /// All arcs with endpoints at points, open or closed.
    fn extreme_brute(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mut worst = 1.0 / n;
        for &a in xs {
            for &b in xs {
                let len = wrap(b - a);
                let inside = xs.iter().filter(|&&x| wrap(x - a) <= len).count() as f64;
                worst = worst.max(inside / n - len);
                // The open arc (a, b); for a == b it is the circle minus a
                // point, which gives 1/n.
                if a != b {
                    worst = worst.max(len - (inside - 2.0) / n);
                }
            }
        }
        worst
    }

    #[test]
    fn midpoint_lattice() {
        for n in [1usize, 4, 33] {
            let pts: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
            assert!((star_discrepancy(&set(&pts)).unwrap() - 0.5 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn origin() {
        assert_eq!(star_discrepancy(&set(&[0.0])).unwrap(), 1.0);
    }

    #[test]
    fn van_der_corput_against_brute_force() {
        for n in [4usize, 64] {
            let p = van_der_corput(2, n).unwrap();
            let got = star_discrepancy(&p).unwrap();
            assert!((got - star_brute(p.coords())).abs() < 1e-15);
        }
        let p = van_der_corput(2, 4).unwrap();
        assert!((star_discrepancy(&p).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn interval_errors() {
        assert_eq!(interval_count_error(&set(&[0.2, 0.9]), 0.4, 1.0).unwrap(), 0.0);
        let mid: Vec<f64> = (1..=6).map(|i| (2 * i - 1) as f64 / 12.0).collect();
        assert!(interval_count_error(&set(&mid), 0.0, 0.5).unwrap() < 1e-15);
        assert_eq!(interval_count_error(&set(&[0.0]), 0.25, 0.5).unwrap(), 0.5);
        // Wrapping arc [0.9, 1.1) holds 0.95 and 0.05.
        assert!((interval_count_error(&set(&[0.95, 0.05, 0.5]), 0.9, 0.2).unwrap() - (2.0 / 3.0 - 0.2)).abs() < 1e-15);
        assert!(interval_count_error(&set(&[0.1]), 0.0, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn star_matches_brute_force(xs in proptest::collection::vec(0.0f64..1.0, 1..30)) {
            prop_assert!((star_discrepancy(&set(&xs)).unwrap() - star_brute(&xs)).abs() < 1e-14);
        }

        #[test]
        fn extreme_matches_brute_force(xs in proptest::collection::vec(0.0f64..1.0, 1..25)) {
            let got = extreme_discrepancy(&set(&xs)).unwrap();
            prop_assert!((got - extreme_brute(&xs)).abs() < 1e-13);
            prop_assert!(got >= star_discrepancy(&set(&xs)).unwrap() - 1e-15);
        }

        #[test]
        fn relabel_invariant(mut xs in proptest::collection::vec(0.0f64..1.0, 1..30)) {
            let a = star_discrepancy(&set(&xs)).unwrap();
            xs.reverse();
            prop_assert_eq!(a, star_discrepancy(&set(&xs)).unwrap());
        }
    }
}
