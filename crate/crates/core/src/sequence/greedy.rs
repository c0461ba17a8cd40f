
use rayon::prelude::*;

use super::{greedy_td, PointSet, Provenance, SolverConfig, SolverMode, TieBreak};
use crate::diagnostics::{BernoulliPotential, PotentialField};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, Kernel1D};
use crate::parallel::{argmin_tied, det_sum};
use crate::torus::wrap;

/// How many grid local minima are refined before giving up on the gate.
const MAX_GATE_RETRIES: usize = 16;

/// Result of a greedy extension together with the potential each new point
/// saw, `sum_{k < n} f(x_n - x_k)`.
#[derive(Debug, Clone)]
pub struct GreedyTrace {
    pub points: PointSet,
    pub gate_values: Vec<f64>,
}

impl GreedyTrace {
    /// Largest potential accepted at any appended point.
    pub fn max_gate_value(&self) -> f64 {
        self.gate_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Appends `steps` greedy points to `points`.
pub fn greedy_extend(points: &PointSet, kernel: &Kernel, config: &SolverConfig, steps: usize) -> Result<PointSet> {
    greedy_extend_traced(points, kernel, config, steps).map(|t| t.points)
}

pub fn greedy_extend_traced(
    points: &PointSet,
    kernel: &Kernel,
    config: &SolverConfig,
    steps: usize,
) -> Result<GreedyTrace> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    if points.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), found: points.dim() });
    }
    config.validate(kernel)?;

    let mut out = points.clone().with_provenance(extended_provenance(points, kernel, config));
    let mut gate_values = Vec::with_capacity(steps);
    match (kernel, config.mode) {
        (Kernel::OneD(_), SolverMode::ExactPiecewise) => extend_exact(&mut out, config, steps, &mut gate_values)?,
        (Kernel::OneD(k), SolverMode::GridRefine) => extend_grid_refine(&mut out, k, config, steps, &mut gate_values)?,
        (Kernel::Td(k), SolverMode::Grid) => greedy_td::extend(&mut out, k, config, steps, &mut gate_values)?,
        _ => unreachable!("rejected by SolverConfig::validate"),
    }
    Ok(GreedyTrace { points: out, gate_values })
}

/// Keeps an existing greedy provenance when the run continues with the same
/// kernel and solver, so the whole set stays reproducible from its seed.
fn extended_provenance(points: &PointSet, kernel: &Kernel, config: &SolverConfig) -> Provenance {
    let id = kernel.id();
    if let Provenance::Greedy { kernel: k, solver, .. } = points.provenance() {
        if *k == id && solver == config {
            return points.provenance().clone();
        }
    }
    Provenance::Greedy {
        kernel: id,
        kernel_spec: kernel.spec(),
        seed_literals: points.coords().iter().map(|c| format!("{c:.16e}")).collect(),
        seed_points: points.coords().to_vec(),
        solver: *config,
    }
}

fn extend_exact(out: &mut PointSet, config: &SolverConfig, steps: usize, gates: &mut Vec<f64>) -> Result<()> {
    let mut sorted = out.coords().to_vec();
    sorted.sort_by(f64::total_cmp);
    let gate = config.gate();
    for _ in 0..steps {
        let (x, _) = BernoulliPotential::from_sorted(&sorted).argmin_tied(config.tie_break).ok_or(Error::NoPoints)?;
        let current = out.coords();
        let value = det_sum(current.len(), |k| crate::kernel::bernoulli2(wrap(x - current[k])));
        if value > gate {
            return Err(Error::NoNonpositiveCandidate { step: out.len() + 1, best: value, gate });
        }
        let pos = sorted.partition_point(|&p| p < x);
        sorted.insert(pos, x);
        out.push(&[x]);
        gates.push(value);
    }
    Ok(())
}

/// Golden-section search for a minimum of `f` on `[a, b]` (lifted).
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn extend_grid_refine(
    out: &mut PointSet,
    kernel: &Kernel1D,
    config: &SolverConfig,
    steps: usize,
    gates: &mut Vec<f64>,
) -> Result<()> {
    let m = config.grid_size;
    let h = 1.0 / m as f64;
    let gate = config.gate();
    let mut potential = PotentialField::new(kernel, out.coords());
    let mut grid = vec![0.0; m];
    for &p in out.coords() {
        add_translate(&mut grid, kernel, p);
    }

    for _ in 0..steps {
        let n = out.len();
        let tie_tol = 1e-12 * n as f64;
        let (j0, _) = argmin_tied(&grid, tie_tol, config.tie_break == TieBreak::LargestCoordinate).ok_or(Error::NoNonpositiveCandidate {
            step: n + 1,
            best: f64::INFINITY,
            gate,
        })?;
        let mut best = refine_around(&potential, j0, h, config.refine_tol);
        if best.1 > gate {
            // Fall back to the next-best grid local minima.
            for j in local_minima_by_value(&grid).into_iter().filter(|&j| j != j0).take(MAX_GATE_RETRIES) {
                let cand = refine_around(&potential, j, h, config.refine_tol);
                if better(cand, best) {
                    best = cand;
                }
            }
        }
        if best.1 > gate {
            return Err(Error::NoNonpositiveCandidate { step: n + 1, best: best.1, gate });
        }
        let x = best.0;
        out.push(&[x]);
        potential.push(x);
        add_translate(&mut grid, kernel, x);
        gates.push(best.1);
    }
    Ok(())
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.1 < b.1 || (a.1 == b.1 && a.0 < b.0)
}

/// Best of the grid node and the golden-section minimum on its two cells.
fn refine_around(potential: &PotentialField, j: usize, h: f64, tol: f64) -> (f64, f64) {
    let xg = j as f64 * h;
    let node = (xg, potential.eval(xg));
    let (xr, vr) = golden_section(|x| potential.eval(wrap(x)), xg - h, xg + h, tol);
    let refined = (wrap(xr), vr);
    if better(refined, node) {
        refined
    } else {
        node
    }
}

fn add_translate(grid: &mut [f64], kernel: &Kernel1D, p: f64) {
    let m = grid.len() as f64;
    grid.par_iter_mut().enumerate().for_each(|(j, g)| {
        *g += kernel.eval_or_inf(j as f64 / m - p);
    });
}

fn local_minima_by_value(grid: &[f64]) -> Vec<usize> {
    let m = grid.len();
    let mut mins: Vec<usize> = (0..m)
        .filter(|&j| {
            let v = grid[j];
            v.is_finite() && v <= grid[(j + m - 1) % m] && v <= grid[(j + 1) % m]
        })
        .collect();
    mins.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]).then(a.cmp(&b)));
    mins
}
