use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{BernoulliPotential, PotentialField};
use crate::error::{Error, Result};
use crate::kernel::{Kernel1D, KernelVariant};
use crate::parallel::argmin_with_ties;
use crate::sequence::io::{format_coordinate, write_atomic};
use crate::sequence::PointSet;

pub const CURVE_SAMPLES: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub n: usize,
    /// `f_n(j / samples)`.
    pub values: Vec<f64>,
    /// Minimizer of `f_n` (exact for Bernoulli2, grid node otherwise).
    pub argmin: f64,
    pub min: f64,
    /// `x_{n+1}`, the greedy point chosen at that minimum, when present.
    pub next_point: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub curves: Vec<Curve>,
    /// `(i / N, x_i)` for `i = 1..=N`.
    pub scatter: Vec<(f64, f64)>,
}

/// Sampled potentials `f_n` for each requested `n` and the scatter of the
/// whole run.
pub fn figure_data(points: &PointSet, kernel: &Kernel1D, n_list: &[usize]) -> Result<FigureData> {
    let xs = points.require_1d()?;
    if xs.is_empty() {
        return Err(Error::NoPoints);
    }
    let samples = CURVE_SAMPLES;
    let curves = n_list
        .iter()
        .map(|&n| {
            if n == 0 || n > xs.len() {
                return Err(Error::InvalidConfig(format!("curve n = {n} outside 1..={}", xs.len())));
            }
            let field = PotentialField::new(kernel, &xs[..n]);
            let values = field.sample(samples, 0.0);
            let (argmin, min) = if kernel.variant() == KernelVariant::Bernoulli2 {
                BernoulliPotential::new(&xs[..n]).argmin().expect("nonempty")
            } else {
                let (j, v) = argmin_with_ties(&values, 0.0).ok_or(Error::NoPoints)?;
                (j as f64 / samples as f64, v)
            };
            Ok(Curve { n, values, argmin, min, next_point: xs.get(n).copied() })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = xs.len() as f64;
    let scatter = xs.iter().enumerate().map(|(i, &x)| ((i + 1) as f64 / total, x)).collect();
    Ok(FigureData { curves, scatter })
}

impl FigureData {
    /// `curve_<n>.csv` (`x,f`) per curve and `scatter.csv` (`t,x`).
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for c in &self.curves {
            let m = c.values.len();
            let mut text = String::from("x,f\n");
            for (j, v) in c.values.iter().enumerate() {
                text.push_str(&format!("{},{}\n", format_coordinate(j as f64 / m as f64), format_coordinate(*v)));
            }
            let path = dir.join(format!("curve_{}.csv", c.n));
            write_atomic(&path, text.as_bytes())?;
            written.push(path);
        }
        let mut text = String::from("t,x\n");
        for (t, x) in &self.scatter {
            text.push_str(&format!("{},{}\n", format_coordinate(*t), format_coordinate(*x)));
        }
        let path = dir.join("scatter.csv");
        write_atomic(&path, text.as_bytes())?;
        written.push(path);
        Ok(written)
    }
}
