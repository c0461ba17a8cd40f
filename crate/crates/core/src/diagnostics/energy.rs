use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Kernel1D, KernelTd, KernelVariant};
use crate::parallel::det_sum;
use crate::sequence::PointSet;
use crate::torus::wrap;

use super::spectral::{SpectralState, SpectralStateTd};
use super::Estimate;

/// `sum_{k,l} f(x_k - x_l)` over the whole set. LogSin excludes the
/// diagonal. Kernels on `T^d` are summed through their (finite) spectrum,
/// which is exact for the truncated kernel.
pub fn pair_energy(points: &PointSet, kernel: &Kernel) -> Result<f64> {
    match kernel {
        Kernel::OneD(k) => {
            let xs = points.require_1d()?;
            Ok(pair_energy_profile(xs, k).last().copied().unwrap_or(0.0))
        }
        Kernel::Td(k) => {
            if points.dim() != k.dim() {
                return Err(Error::DimensionMismatch { expected: k.dim(), found: points.dim() });
            }
            let state = SpectralStateTd::from_point_set(points, k.cutoff());
            energy_td(&state, k)
        }
    }
}

/// Energies of every prefix: `E_n = E_{n-1} + f(0) + 2 sum_{k<n} f(x_n - x_k)`.
/// Explicit series are evaluated through running exponential sums.
pub fn pair_energy_profile(points: &[f64], kernel: &Kernel1D) -> Vec<f64> {
    let diag = kernel.value_at_zero().unwrap_or(0.0);
    let mut out = Vec::with_capacity(points.len());
    let mut e = 0.0;
    match kernel.variant() {
        KernelVariant::ExplicitFourier => {
            let mut state = SpectralState::new(kernel.cutoff());
            for &x in points {
                let cross = spectral_potential(&state, kernel, x);
                e += diag + 2.0 * cross;
                out.push(e);
                state.push(x);
            }
        }
        _ => {
            for (n, &x) in points.iter().enumerate() {
                let cross = det_sum(n, |k| kernel.eval_or_inf(x - points[k]));
                e += diag + 2.0 * cross;
                out.push(e);
            }
        }
    }
    out
}

/// `sum_k f(x - x_k)` from exponential sums of the points.
pub(crate) fn spectral_potential(state: &SpectralState, kernel: &Kernel1D, x: f64) -> f64 {
    let mut acc = 0.0;
    for (&k, &c) in kernel.coefficients() {
        let Some(s) = state.sum(k as i64) else { break };
        let e = Complex64::from_polar(1.0, 2.0 * PI * wrap(k as f64 * x));
        acc += c * (s * e).re;
    }
    2.0 * acc
}

/// `sum_{0<|k|<=K} hat f(k) |S_n(k)|^2`; the tail bound is
/// `n^2 sum_{|k|>K} hat f(k)`.
pub fn energy_spectral(state: &SpectralState, kernel: &Kernel1D) -> Estimate {
    let value = 2.0
        * state
            .positive()
            .map(|(k, s)| kernel.coefficient_unchecked(k) * s.norm_sqr())
            .sum::<f64>();
    let n = state.n() as f64;
    Estimate { value, tail_bound: n * n * kernel.coefficient_tail(state.k_max()) }
}

/// Energy of the truncated kernel `G_K` on `T^d`, including the diagonal.
pub fn energy_td(state: &SpectralStateTd, kernel: &KernelTd) -> Result<f64> {
    if state.dim() != kernel.dim() || state.cutoff() != kernel.cutoff() {
        return Err(Error::InvalidConfig(format!(
            "spectral window (d={}, K={}) does not match kernel (d={}, K={})",
            state.dim(),
            state.cutoff(),
            kernel.dim(),
            kernel.cutoff()
        )));
    }
    Ok(2.0 * state.half().zip(kernel.half_weights()).map(|((_, _, s), &w)| w * s.norm_sqr()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::bernoulli2;
    use crate::sequence::Provenance;

    fn direct(points: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        points.iter().flat_map(|&a| points.iter().map(move |&b| (a, b))).map(|(a, b)| f(a - b)).sum()
    }

    fn xorshift(seed: &mut u64) -> f64 {
        *seed ^= *seed << 13;
        *seed ^= *seed >> 7;
        *seed ^= *seed << 17;
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn small_sets() {
        let k = Kernel::from(Kernel1D::bernoulli2());
        assert!((pair_energy(&PointSet::from_1d(&[0.3]), &k).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((pair_energy(&PointSet::from_1d(&[0.0, 0.5]), &k).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(pair_energy(&PointSet::from_1d(&[]), &k).unwrap(), 0.0);
    }

    #[test]
    fn profile_matches_double_sum() {
        let mut s = 99;
        let pts: Vec<f64> = (0..40).map(|_| xorshift(&mut s)).collect();
        let prof = pair_energy_profile(&pts, &Kernel1D::bernoulli2());
        for n in [1, 2, 17, 40] {
            assert!((prof[n - 1] - direct(&pts[..n], |x| bernoulli2(wrap(x)))).abs() < 1e-12);
        }
    }

    #[test]
    fn log_sin_is_off_diagonal() {
        let pts = [0.1, 0.35, 0.8];
        let k = Kernel1D::log_sin();
        let want: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| k.eval(pts[i] - pts[j]).unwrap())
            .sum();
        let got = *pair_energy_profile(&pts, &k).last().unwrap();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn explicit_series_profile() {
        let k = Kernel1D::explicit_fourier([(1, 0.3), (2, 0.1), (5, 0.02)]).unwrap();
        let pts = [0.1, 0.35, 0.8, 0.61];
        let got = *pair_energy_profile(&pts, &k).last().unwrap();
        let want = direct(&pts, |x| k.eval(x).unwrap());
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn spectral_two_point() {
        let k = Kernel1D::bernoulli2();
        let st = SpectralState::from_points(&[0.0, 0.5], 2);
        let e = energy_spectral(&st, &k);
        let h2 = 1.0 / (2.0 * std::f64::consts::PI.powi(2) * 4.0);
        assert!((e.value - 2.0 * h2 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_empty_window() {
        let st = SpectralState::from_points(&[0.1, 0.2, 0.7], 0);
        let e = energy_spectral(&st, &Kernel1D::bernoulli2());
        assert_eq!(e.value, 0.0);
        assert!((e.tail_bound - 9.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_agrees_within_tail() {
        let k = Kernel1D::bernoulli2();
        let mut s = 5;
        for _ in 0..50 {
            let pts: Vec<f64> = (0..50).map(|_| xorshift(&mut s)).collect();
            let st = SpectralState::from_points(&pts, 1000);
            let e = energy_spectral(&st, &k);
            let d = *pair_energy_profile(&pts, &k).last().unwrap();
            assert!((e.value - d).abs() <= e.tail_bound + 1e-9, "{} vs {}", e.value, d);
        }
    }

    #[test]
    fn td_energy_matches_pair_sum() {
        let k = KernelTd::green(2, 3).unwrap();
        let pts = PointSet::new(2, vec![0.1, 0.2, 0.7, 0.4, 0.33, 0.9], Provenance::Imported { source: "test".into() }).unwrap();
        let mut want = 0.0;
        for a in pts.points() {
            for b in pts.points() {
                want += k.eval_pair(a, b).unwrap();
            }
        }
        let got = pair_energy(&pts, &Kernel::Td(k)).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!(got >= 0.0);
    }
}
