use crate::error::{Error, Result};
use crate::kernel::{Kernel1D, KernelVariant};
use crate::parallel::det_sum;
use crate::sequence::PointSet;

use super::bernoulli::BernoulliPotential;
use super::energy::spectral_potential;
use super::spectral::SpectralState;
use super::Estimate;

/// `f_n(x) = sum_k f(x - x_k)` for a fixed point list. Closed-form kernels
/// are summed directly; explicit series through exponential sums.
#[derive(Debug, Clone)]
pub struct PotentialField {
    kernel: Kernel1D,
    points: Vec<f64>,
    spectral: Option<SpectralState>,
}

impl PotentialField {
    pub fn new(kernel: &Kernel1D, points: &[f64]) -> Self {
        let spectral = (kernel.variant() == KernelVariant::ExplicitFourier).then(|| SpectralState::new(kernel.cutoff()));
        let mut field = Self { kernel: kernel.clone(), points: Vec::with_capacity(points.len()), spectral };
        for &x in points {
            field.push(x);
        }
        field
    }

    pub fn push(&mut self, x: f64) {
        self.points.push(x);
        if let Some(s) = &mut self.spectral {
            s.push(x);
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kernel(&self) -> &Kernel1D {
        &self.kernel
    }

    /// `+inf` at a point of a LogSin field.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.spectral {
            Some(s) => spectral_potential(s, &self.kernel, x),
            None => det_sum(self.points.len(), |k| self.kernel.eval_or_inf(x - self.points[k])),
        }
    }

    /// `f_n` on the nodes `(j + shift) / grid`.
    pub fn sample(&self, grid: usize, shift: f64) -> Vec<f64> {
        use rayon::prelude::*;
        (0..grid).into_par_iter().map(|j| self.eval((j as f64 + shift) / grid as f64)).collect()
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 2 {
        return Err(Error::InvalidConfig(format!("quadrature grid must be >= 2, got {grid}")));
    }
    Ok(())
}

/// `||f_n||_inf`. Exact for Bernoulli2, `+inf` for LogSin (the points are
/// singularities); otherwise the maximum over the grid and the points.
pub fn potential_sup_norm(points: &PointSet, kernel: &Kernel1D, grid: usize) -> Result<f64> {
    check_grid(grid)?;
    let xs = points.require_1d()?;
    match kernel.variant() {
        KernelVariant::Bernoulli2 => Ok(BernoulliPotential::new(xs).sup_norm()),
        KernelVariant::LogSin if xs.is_empty() => Ok(0.0),
        KernelVariant::LogSin => Ok(f64::INFINITY),
        KernelVariant::ExplicitFourier => {
            let field = PotentialField::new(kernel, xs);
            let on_grid = field.sample(grid, 0.0).into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(xs.iter().fold(on_grid, |m, &x| m.max(field.eval(x).abs())))
        }
    }
}

/// Bound on how far the grid maximum of `|f_n|` can fall below the true
/// one, from `|f_n'| <= n sum_k 4 pi k |hat f(k)|` and node spacing `1/grid`.
pub fn sup_grid_error_bound(kernel: &Kernel1D, n: usize, grid: usize) -> f64 {
    let lip: f64 = kernel.coefficients().iter().map(|(&k, &c)| 4.0 * std::f64::consts::PI * k as f64 * c.abs()).sum();
    n as f64 * lip / (2.0 * grid as f64)
}

/// `||f_n||_1`. Exact for Bernoulli2 (tail bound 0). Otherwise a periodic
/// midpoint rule on `grid` nodes, whose error is estimated by comparison
/// with the rule on `grid / 2` nodes.
pub fn potential_l1_norm(points: &PointSet, kernel: &Kernel1D, grid: usize) -> Result<Estimate> {
    check_grid(grid)?;
    let xs = points.require_1d()?;
    if kernel.variant() == KernelVariant::Bernoulli2 {
        return Ok(Estimate::exact(BernoulliPotential::new(xs).l1_norm()));
    }
    let field = PotentialField::new(kernel, xs);
    let fine = field.sample(grid, 0.5);
    let value = fine.iter().map(|v| v.abs()).sum::<f64>() / grid as f64;
    let half = grid / 2;
    let coarse = field.sample(half, 0.5).iter().map(|v| v.abs()).sum::<f64>() / half as f64;
    Ok(Estimate { value, tail_bound: (value - coarse).abs() })
}

/// `||f_n'||_2` from the spectrum, `(sum_{0<|k|<=K} 4 pi^2 k^2 hat f(k)^2 |S_n(k)|^2)^{1/2}`,
/// with the tail bound from `n^2 sum_{|k|>K} 4 pi^2 k^2 hat f(k)^2`.
pub fn potential_deriv_l2(state: &SpectralState, kernel: &Kernel1D) -> Estimate {
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let s: f64 = 2.0
        * state
            .positive()
            .map(|(k, s)| {
                let c = kernel.coefficient_unchecked(k);
                four_pi2 * (k * k) as f64 * c * c * s.norm_sqr()
            })
            .sum::<f64>();
    let n = state.n() as f64;
    Estimate::sqrt_of_sum(s, n * n * kernel.derivative_tail(state.k_max()))
}
