//! Greedy steps on `T^d` over a uniform grid.
//!
//! With the window strictly inside the grid's Nyquist range the grid values
//! of a truncated kernel are an inverse DFT of its coefficients, and they
//! average to exactly zero over the grid (only `k = 0` aliases to `0`), so
//! the best grid node always satisfies the gate up to rounding. Points
//! placed on grid nodes contribute a shifted copy of one precomputed table;
//! off-grid seeds go through one FFT of their exponential sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{PointSet, SolverConfig, TieBreak};
use crate::error::{Error, Result};
use crate::kernel::KernelTd;
use crate::parallel::argmin_tied;

/// Absolute tie tolerance between grid values; well above FFT rounding.
const TIE_TOL: f64 = 1e-10;

pub(super) fn extend(
    out: &mut PointSet,
    kernel: &KernelTd,
    config: &SolverConfig,
    steps: usize,
    gates: &mut Vec<f64>,
) -> Result<()> {
    let grid = TorusGrid::new(kernel.dim(), config.grid_size);
    let table = grid.kernel_table(kernel);
    let gate = config.gate();

    let mut potential = vec![0.0; grid.len()];
    let mut off_grid = Vec::new();
    for p in out.points() {
        match grid.node_of(p) {
            Some(idx) => grid.add_shifted(&mut potential, &table, idx),
            None => off_grid.extend_from_slice(p),
        }
    }
    if !off_grid.is_empty() {
        let seeds = grid.potential_of(kernel, &off_grid);
        potential.par_iter_mut().zip(seeds).for_each(|(a, b)| *a += b);
    }

    for _ in 0..steps {
        let step = out.len() + 1;
        let (idx, value) = argmin_tied(&potential, TIE_TOL, config.tie_break == TieBreak::LargestCoordinate)
            .ok_or(Error::NoNonpositiveCandidate { step, best: f64::INFINITY, gate })?;
        if value > gate {
            return Err(Error::NoNonpositiveCandidate { step, best: value, gate });
        }
        out.push(&grid.coordinates(idx));
        grid.add_shifted(&mut potential, &table, idx);
        gates.push(value);
    }
    Ok(())
}

/// `M^d` nodes `j / M`, flattened row-major with axis 0 most significant, so
/// a smaller flat index is a lexicographically smaller coordinate.
pub(crate) struct TorusGrid {
    dim: usize,
    m: usize,
}

impl TorusGrid {
    pub(crate) fn new(dim: usize, m: usize) -> Self {
        Self { dim, m }
    }

    pub(crate) fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub(crate) fn coordinates(&self, mut idx: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for axis in (0..self.dim).rev() {
            c[axis] = (idx % self.m) as f64 / self.m as f64;
            idx /= self.m;
        }
        c
    }

    /// Flat index of `p` if it sits exactly on a node.
    fn node_of(&self, p: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for &x in p {
            let s = x * self.m as f64;
            if s.fract() != 0.0 {
                return None;
            }
            idx = idx * self.m + (s as usize % self.m);
        }
        Some(idx)
    }

    /// `G_K` on the grid: inverse DFT of the coefficient array.
    fn kernel_table(&self, kernel: &KernelTd) -> Vec<f64> {
        let mut spec = vec![Complex64::new(0.0, 0.0); self.len()];
        for (k, &w) in kernel.half_frequencies().chunks_exact(self.dim).zip(kernel.half_weights()) {
            spec[self.wrap_index(k, 1)] += w;
            spec[self.wrap_index(k, -1)] += w;
        }
        self.inverse_dft(&mut spec);
        spec.into_iter().map(|c| c.re).collect()
    }

    /// `sum_p G_K(x - p)` on the grid for arbitrary points `p`.
    fn potential_of(&self, kernel: &KernelTd, points: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut spec = vec![Complex64::new(0.0, 0.0); self.len()];
        for (k, &w) in kernel.half_frequencies().chunks_exact(d).zip(kernel.half_weights()) {
            let mut s = Complex64::new(0.0, 0.0);
            for p in points.chunks_exact(d) {
                let phase: f64 = k.iter().zip(p).map(|(&c, &x)| c as f64 * x).sum();
                s += Complex64::from_polar(1.0, -2.0 * PI * phase);
            }
            spec[self.wrap_index(k, 1)] += w * s;
            spec[self.wrap_index(k, -1)] += w * s.conj();
        }
        self.inverse_dft(&mut spec);
        spec.into_iter().map(|c| c.re).collect()
    }

    fn wrap_index(&self, k: &[i32], sign: i32) -> usize {
        let m = self.m as i64;
        k.iter().fold(0usize, |acc, &c| acc * self.m + ((sign * c) as i64).rem_euclid(m) as usize)
    }

    /// Unnormalized `sum_k A[k] e^{+2 pi i k.j / M}` along every axis.
    fn inverse_dft(&self, data: &mut [Complex64]) {
        let m = self.m;
        let fft = FftPlanner::new().plan_fft_inverse(m);
        for axis in 0..self.dim {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            data.par_chunks_mut(m * stride).for_each(|block| {
                let mut line = vec![Complex64::new(0.0, 0.0); m];
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                for inner in 0..stride {
                    for s in 0..m {
                        line[s] = block[inner + s * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for s in 0..m {
                        block[inner + s * stride] = line[s];
                    }
                }
            });
        }
    }

    /// `potential[j] += table[j - node]` componentwise mod M.
    fn add_shifted(&self, potential: &mut [f64], table: &[f64], node: usize) {
        let m = self.m;
        let d = self.dim;
        let mut shift = vec![0usize; d];
        let mut r = node;
        for axis in (0..d).rev() {
            shift[axis] = r % m;
            r /= m;
        }
        potential.par_iter_mut().enumerate().for_each(|(j, v)| {
            let mut r = j;
            let mut src = 0;
            let mut scale = 1;
            for axis in (0..d).rev() {
                let c = r % m;
                r /= m;
                src += ((c + m - shift[axis]) % m) * scale;
                scale *= m;
            }
            *v += table[src];
        });
    }
}
