use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::half_window;
use crate::sequence::PointSet;
use crate::torus::wrap;

/// Phases are re-anchored with an exact `sin_cos` this often; in between,
/// powers are advanced by multiplication.
const ANCHOR_EVERY: usize = 32;

/// Running exponential sums `S_n(k) = sum_{m <= n} e^{-2 pi i k x_m}` for
/// `k = 1..=k_max`; negative frequencies are conjugates.
#[derive(Debug, Clone)]
pub struct SpectralState {
    k_max: usize,
    sums: Vec<Complex64>,
    n: usize,
}

impl SpectralState {
    pub fn new(k_max: usize) -> Self {
        Self { k_max, sums: vec![Complex64::new(0.0, 0.0); k_max], n: 0 }
    }

    pub fn from_points(points: &[f64], k_max: usize) -> Self {
        let mut s = Self::new(k_max);
        s.extend(points);
        s
    }

    pub fn from_point_set(points: &PointSet, k_max: usize) -> Result<Self> {
        Ok(Self::from_points(points.require_1d()?, k_max))
    }

    pub fn push(&mut self, x: f64) {
        let base = Complex64::from_polar(1.0, -2.0 * PI * wrap(x));
        let mut cur = Complex64::new(1.0, 0.0);
        for (i, s) in self.sums.iter_mut().enumerate() {
            let k = i + 1;
            cur = if i % ANCHOR_EVERY == 0 {
                Complex64::from_polar(1.0, -2.0 * PI * wrap(k as f64 * x))
            } else {
                cur * base
            };
            *s += cur;
        }
        self.n += 1;
    }

    pub fn extend(&mut self, points: &[f64]) {
        for &x in points {
            self.push(x);
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `S_n(k)` for any `k` with `|k| <= k_max`; `S_n(0) = n`.
    pub fn sum(&self, k: i64) -> Option<Complex64> {
        match k {
            0 => Some(Complex64::new(self.n as f64, 0.0)),
            k if k.unsigned_abs() as usize > self.k_max => None,
            k if k > 0 => Some(self.sums[k as usize - 1]),
            k => Some(self.sums[(-k) as usize - 1].conj()),
        }
    }

    /// `(k, S_n(k))` for `k = 1..=k_max`.
    pub fn positive(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.sums.iter().enumerate().map(|(i, &s)| (i as u64 + 1, s))
    }
}

/// Exponential sums on `T^d` over the half window `0 < |k|_inf <= K`
/// (first nonzero component positive).
#[derive(Debug, Clone)]
pub struct SpectralStateTd {
    dim: usize,
    cutoff: usize,
    freqs: Vec<i32>,
    norms2: Vec<f64>,
    sums: Vec<Complex64>,
    n: usize,
}

impl SpectralStateTd {
    pub fn new(dim: usize, cutoff: usize) -> Self {
        let freqs = half_window(dim, cutoff);
        let norms2 = freqs
            .chunks_exact(dim)
            .map(|k| k.iter().map(|&c| (c as f64) * (c as f64)).sum())
            .collect::<Vec<f64>>();
        let sums = vec![Complex64::new(0.0, 0.0); norms2.len()];
        Self { dim, cutoff, freqs, norms2, sums, n: 0 }
    }

    pub fn from_point_set(points: &PointSet, cutoff: usize) -> Self {
        let mut s = Self::new(points.dim(), cutoff);
        for p in points.points() {
            s.push(p).expect("dimension matches by construction");
        }
        s
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        for (k, s) in self.freqs.chunks_exact(self.dim).zip(self.sums.iter_mut()) {
            let phase: f64 = k.iter().zip(p).map(|(&c, &x)| c as f64 * x).sum();
            *s += Complex64::from_polar(1.0, -2.0 * PI * wrap(phase));
        }
        self.n += 1;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(k, |k|^2, S_n(k))` over the half window.
    pub fn half(&self) -> impl Iterator<Item = (&[i32], f64, Complex64)> + '_ {
        self.freqs
            .chunks_exact(self.dim)
            .zip(&self.norms2)
            .zip(&self.sums)
            .map(|((k, &n2), &s)| (k, n2, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct(points: &[f64], k: i64) -> Complex64 {
        points.iter().map(|&x| Complex64::from_polar(1.0, -2.0 * PI * k as f64 * x)).sum()
    }

    #[test]
    fn matches_direct_sums() {
        let pts = [0.1, 0.77, 0.5, 0.0, 0.333];
        let s = SpectralState::from_points(&pts, 200);
        for k in [-200i64, -7, -1, 1, 2, 31, 32, 33, 64, 199, 200] {
            assert!((s.sum(k).unwrap() - direct(&pts, k)).norm() < 1e-12, "k = {k}");
        }
        assert_eq!(s.sum(0).unwrap().re, 5.0);
        assert!(s.sum(201).is_none());
    }

    #[test]
    fn antipodal_pair() {
        let s = SpectralState::from_points(&[0.0, 0.5], 4);
        assert!(s.sum(1).unwrap().norm() < 1e-15);
        assert!((s.sum(2).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn td_sums_match_direct() {
        let pts = [[0.1, 0.2, 0.3], [0.9, 0.4, 0.05]];
        let mut s = SpectralStateTd::new(3, 2);
        for p in &pts {
            s.push(p).unwrap();
        }
        for (k, n2, v) in s.half() {
            let want: Complex64 = pts
                .iter()
                .map(|p| {
                    let ph: f64 = k.iter().zip(p).map(|(&c, &x)| c as f64 * x).sum();
                    Complex64::from_polar(1.0, -2.0 * PI * ph)
                })
                .sum();
            assert!((v - want).norm() < 1e-13);
            assert_eq!(n2, k.iter().map(|&c| (c * c) as f64).sum::<f64>());
        }
        assert!(s.push(&[0.1]).is_err());
    }

    proptest! {
        #[test]
        fn modulus_bounded_by_n(xs in proptest::collection::vec(0.0f64..1.0, 1..30)) {
            let s = SpectralState::from_points(&xs, 64);
            for (_, v) in s.positive() {
                prop_assert!(v.norm() <= xs.len() as f64 * (1.0 + 1e-12));
            }
        }
    }
}
