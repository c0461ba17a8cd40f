use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Rule for the amplitudes `a_k` multiplying `1 / (4 pi^2 |k|^2)`.
#[derive(Debug, Clone, Copy)]
pub enum Amplitude {
    /// `a_k = a` for every `k`; `a = 1` is the Green kernel.
    Constant(f64),
    /// Arbitrary rule over the frequency vector. Must be even in `k`.
    Rule(fn(&[i32]) -> f64),
}

/// Spectrally truncated kernel on the flat torus `T^d`,
/// `G_K(x) = sum_{0 < |k|_inf <= K} a_k e^{2 pi i k.x} / (4 pi^2 |k|^2)`.
#[derive(Debug, Clone)]
pub struct KernelTd {
    dim: usize,
    cutoff: usize,
    amplitude: Amplitude,
    bounds: (f64, f64),
    /// Half window, flattened with stride `dim`.
    freqs: Vec<i32>,
    /// `a_k / (4 pi^2 |k|^2)` per half-window frequency.
    weights: Vec<f64>,
}

/// Nonzero frequencies with `|k|_inf <= cutoff` whose first nonzero
/// component is positive, in lexicographic order, flattened with stride `dim`.
/// Together with their negatives they cover the whole window exactly once.
pub fn half_window(dim: usize, cutoff: usize) -> Vec<i32> {
    let k = cutoff as i32;
    let side = 2 * cutoff + 1;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total / 2 * dim);
    let mut v = vec![0i32; dim];
    for idx in 0..total {
        let mut r = idx;
        for c in (0..dim).rev() {
            v[c] = (r % side) as i32 - k;
            r /= side;
        }
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.extend_from_slice(&v);
        }
    }
    out
}

impl KernelTd {
    /// Green kernel of `-Delta` on `T^d`, truncated at `|k|_inf <= cutoff`.
    pub fn green(dim: usize, cutoff: usize) -> Result<Self> {
        Self::new(dim, cutoff, Amplitude::Constant(1.0))
    }

    pub fn new(dim: usize, cutoff: usize, amplitude: Amplitude) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidKernel(format!("torus kernels need d >= 2, got {dim}")));
        }
        if cutoff == 0 {
            return Err(Error::InvalidKernel("cutoff must be positive".into()));
        }
        let freqs = half_window(dim, cutoff);
        let mut weights = Vec::with_capacity(freqs.len() / dim);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in freqs.chunks_exact(dim) {
            let a = match amplitude {
                Amplitude::Constant(a) => a,
                Amplitude::Rule(rule) => rule(k),
            };
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidKernel(format!("amplitude at {k:?} is {a}")));
            }
            lo = lo.min(a);
            hi = hi.max(a);
            let k2: i64 = k.iter().map(|&c| (c as i64) * (c as i64)).sum();
            weights.push(a / (4.0 * PI * PI * k2 as f64));
        }
        // Strict two-sided bounds c1 < a_k < c2 on the window.
        let bounds = (0.5 * lo, 2.0 * hi);
        Ok(Self { dim, cutoff, amplitude, bounds, freqs, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self) -> Amplitude {
        self.amplitude
    }

    /// Stored `(c1, c2)` with `c1 < a_k < c2` on the window.
    pub fn amplitude_bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn is_green(&self) -> bool {
        matches!(self.amplitude, Amplitude::Constant(a) if a == 1.0)
    }

    pub fn half_frequencies(&self) -> &[i32] {
        &self.freqs
    }

    pub fn half_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `G_K(x)` for `x` taken componentwise mod 1.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut s = 0.0;
        for (k, &w) in self.freqs.chunks_exact(self.dim).zip(&self.weights) {
            let phase: f64 = k.iter().zip(x).map(|(&c, &xi)| c as f64 * xi).sum();
            s += w * (2.0 * PI * phase).cos();
        }
        Ok(2.0 * s)
    }

    /// `G(x, y) = G_K(x - y)`.
    pub fn eval_pair(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.eval(&d)
    }

    /// `G_K(0)`, the sum of all window coefficients.
    pub fn value_at_zero(&self) -> f64 {
        2.0 * self.weights.iter().sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Full-window enumeration, independent of the half-window bookkeeping.
    fn lattice_sum(dim: usize, cutoff: i32, x: &[f64]) -> f64 {
        let side = (2 * cutoff + 1) as usize;
        let mut s = 0.0;
        for idx in 0..side.pow(dim as u32) {
            let mut r = idx;
            let mut k2 = 0i64;
            let mut phase = 0.0;
            for xi in x.iter().take(dim) {
                let c = (r % side) as i32 - cutoff;
                r /= side;
                k2 += (c * c) as i64;
                phase += c as f64 * xi;
            }
            if k2 > 0 {
                s += (2.0 * PI * phase).cos() / (4.0 * PI * PI * k2 as f64);
            }
        }
        s
    }

    #[test]
    fn half_window_covers_window_once() {
        for (d, k) in [(2, 1), (2, 3), (3, 2)] {
            let h = half_window(d, k);
            let side = 2 * k + 1;
            assert_eq!(h.len() / d, (side.pow(d as u32) - 1) / 2);
            let mut seen = std::collections::HashSet::new();
            for v in h.chunks_exact(d) {
                assert!(seen.insert(v.to_vec()));
                let neg: Vec<i32> = v.iter().map(|c| -c).collect();
                assert!(!seen.contains(&neg));
            }
        }
    }

    #[test]
    fn green_2d_at_origin() {
        let g = KernelTd::green(2, 1).unwrap();
        let v = g.eval(&[0.0, 0.0]).unwrap();
        let expected = 6.0 / (4.0 * PI * PI);
        assert!((v - expected).abs() < 1e-15);
        assert!((expected - 0.151_982).abs() < 1e-6);
        assert!((g.value_at_zero() - expected).abs() < 1e-15);
    }

    #[test]
    fn green_3d_matches_enumeration() {
        let g = KernelTd::green(3, 1).unwrap();
        let x = [0.5, 0.5, 0.5];
        let v = g.eval(&x).unwrap();
        let oracle = lattice_sum(3, 1, &x);
        // 6 axis (-1), 12 face diagonals (+1/2), 8 corners (-1/3).
        let by_hand = (-6.0 + 12.0 / 2.0 - 8.0 / 3.0) / (4.0 * PI * PI);
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - by_hand).abs() < 1e-14);
        for x in [[0.1, 0.7, 0.3], [0.9, 0.05, 0.5]] {
            let g4 = KernelTd::green(3, 4).unwrap();
            assert!((g4.eval(&x).unwrap() - lattice_sum(3, 4, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_symmetries() {
        let g = KernelTd::green(3, 5).unwrap();
        let x = [0.13, 0.42, 0.77];
        let v = g.eval(&x).unwrap();
        let neg: Vec<f64> = x.iter().map(|c| crate::torus::wrap(-c)).collect();
        assert!((g.eval(&neg).unwrap() - v).abs() < 1e-12);
        assert!((g.eval(&[0.42, 0.77, 0.13]).unwrap() - v).abs() < 1e-12);
        assert!((g.eval(&[1.0 - 0.13, 0.42, 0.77]).unwrap() - v).abs() < 1e-12);
        let y = [0.5, 0.25, 0.9];
        let a = g.eval_pair(&x, &y).unwrap();
        let b = g.eval_pair(&y, &x).unwrap();
        assert!((a - b).abs() < 1e-12);
        let shifted: Vec<f64> = x.iter().map(|c| c + 3.0).collect();
        assert!((g.eval(&shifted).unwrap() - v).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(KernelTd::green(1, 4).is_err());
        assert!(KernelTd::green(2, 0).is_err());
        assert!(KernelTd::new(2, 2, Amplitude::Constant(-1.0)).is_err());
        let g = KernelTd::green(2, 2).unwrap();
        assert!(matches!(g.eval(&[0.1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn amplitude_bounds_are_strict() {
        let g = KernelTd::new(2, 3, Amplitude::Rule(|k| 1.0 + 0.5 * ((k[0] * k[0] + k[1] * k[1]) % 2) as f64))
            .unwrap();
        let (c1, c2) = g.amplitude_bounds();
        assert!(c1 < 1.0 && c2 > 1.5 && c1 > 0.0);
        assert!(!g.is_green());
        assert!(KernelTd::green(2, 3).unwrap().is_green());
    }
}
