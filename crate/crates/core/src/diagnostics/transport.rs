use crate::error::{Error, Result};
use crate::sequence::PointSet;

/// Offsets `z_i = y_(i) - (i - 1/2)/n` of the sorted points from the
/// midpoint lattice. On `((i-1)/n, i/n]` the lifted displacement
/// `F^{-1}(v) - v` is uniform on `[z_i - 1/(2n), z_i + 1/(2n)]`.
fn lattice_offsets(points: &PointSet) -> Result<Vec<f64>> {
    let mut ys = points.require_1d()?.to_vec();
    if ys.is_empty() {
        return Err(Error::NoPoints);
    }
    ys.sort_by(f64::total_cmp);
    let n = ys.len() as f64;
    Ok(ys.iter().enumerate().map(|(i, &y)| y - (i as f64 + 0.5) / n).collect())
}

/// Exact `W_2` between the empirical measure and Lebesgue measure on the
/// circle. Optimal plans are monotone up to a rotation; the cost of rotation
/// `c` is `int (F^{-1}(v) - v - c)^2 dv`, minimized at the mean, so
/// `W_2^2 = Var(z) + 1/(12 n^2)`.
pub fn w2_circle_exact(points: &PointSet) -> Result<f64> {
    let z = lattice_offsets(points)?;
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((var + 1.0 / (12.0 * n * n)).sqrt())
}

/// Exact `W_1` on the circle: the rotation minimizing
/// `int |F^{-1}(v) - v - c| dv` is a median of the mixture of the uniform
/// pieces, found by scanning their endpoints.
pub fn w1_circle_exact(points: &PointSet) -> Result<f64> {
    let z = lattice_offsets(points)?;
    let n = z.len() as f64;
    let h = 0.5 / n;
    // Breakpoints with slope changes of the mass-below function.
    let mut events: Vec<(f64, f64)> = z.iter().flat_map(|&c| [(c - h, 1.0), (c + h, -1.0)]).collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut mass = 0.0;
    let mut slope = 0.0;
    let mut median = events[0].0;
    for w in events.windows(2) {
        slope += w[0].1;
        let gain = slope * (w[1].0 - w[0].0);
        if mass + gain >= 0.5 {
            median = w[0].0 + if slope > 0.0 { (0.5 - mass) / slope } else { 0.0 };
            break;
        }
        mass += gain;
        median = w[1].0;
    }
    let cost: f64 = z
        .iter()
        .map(|&c| {
            let (lo, hi) = (c - h, c + h);
            if median <= lo {
                2.0 * h * (c - median)
            } else if median >= hi {
                2.0 * h * (median - c)
            } else {
                ((hi - median).powi(2) + (median - lo).powi(2)) / 2.0
            }
        })
        .sum();
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::torus_dist;
    use proptest::prelude::*;

    /// Uniform measure discretized into `m` atoms, optimal cyclic
    /// assignment of the sorted atoms against the sorted points.
    fn cyclic_assignment(points: &[f64], m: usize, p: i32) -> f64 {
        let n = points.len();
        assert_eq!(m % n, 0);
        let mut ys = points.to_vec();
        ys.sort_by(f64::total_cmp);
        let reps: Vec<f64> = ys.iter().flat_map(|&y| std::iter::repeat_n(y, m / n)).collect();
        (0..m)
            .map(|s| {
                (0..m)
                    .map(|j| torus_dist(reps[j], (((j + s) % m) as f64 + 0.5) / m as f64).powi(p))
                    .sum::<f64>()
                    / m as f64
            })
            .fold(f64::INFINITY, f64::min)
            .powf(1.0 / p as f64)
    }

    fn set(xs: &[f64]) -> PointSet {
        PointSet::from_1d(xs)
    }

    #[test]
    fn midpoint_lattice() {
        for n in [1usize, 2, 7, 100] {
            let pts: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
            let w = w2_circle_exact(&set(&pts)).unwrap();
            assert!((w - 1.0 / (2.0 * 3f64.sqrt() * n as f64)).abs() < 1e-12);
            let w1 = w1_circle_exact(&set(&pts)).unwrap();
            assert!((w1 - 1.0 / (4.0 * n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point() {
        let w = w2_circle_exact(&set(&[0.0])).unwrap();
        assert!((w - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((w1_circle_exact(&set(&[0.0])).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(w2_circle_exact(&set(&[])), Err(Error::NoPoints)));
    }

    #[test]
    fn matches_cyclic_assignment() {
        let cases: [&[f64]; 5] = [
            &[0.1],
            &[0.0, 0.05],
            &[0.9, 0.2, 0.25],
            &[0.33, 0.34, 0.35, 0.8],
            &[0.01, 0.99, 0.5, 0.51, 0.2, 0.7],
        ];
        for pts in cases {
            let w2 = w2_circle_exact(&set(pts)).unwrap();
            assert!((w2 - cyclic_assignment(pts, 600, 2)).abs() < 2e-3, "{pts:?}");
            let w1 = w1_circle_exact(&set(pts)).unwrap();
            assert!((w1 - cyclic_assignment(pts, 600, 1)).abs() < 2e-3, "{pts:?}");
        }
    }

    proptest! {
        #[test]
        fn rotation_invariant(xs in proptest::collection::vec(0.0f64..1.0, 1..40), t in 0.0f64..1.0) {
            let a = w2_circle_exact(&set(&xs)).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + t).collect();
            let b = w2_circle_exact(&set(&shifted)).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            let a1 = w1_circle_exact(&set(&xs)).unwrap();
            let b1 = w1_circle_exact(&set(&shifted)).unwrap();
            prop_assert!((a1 - b1).abs() < 1e-12);
        }

        #[test]
        fn bounded_and_ordered(xs in proptest::collection::vec(0.0f64..1.0, 1..40)) {
            let w2 = w2_circle_exact(&set(&xs)).unwrap();
            let w1 = w1_circle_exact(&set(&xs)).unwrap();
            prop_assert!((0.0..=0.5).contains(&w2));
            prop_assert!(w1 <= w2 + 1e-15);
        }

        #[test]
        fn oracle_small_sets(xs in proptest::collection::vec(0.0f64..1.0, 1..=6)) {
            let w2 = w2_circle_exact(&set(&xs)).unwrap();
            prop_assert!((w2 - cyclic_assignment(&xs, 600, 2)).abs() < 2e-3);
        }
    }
}
