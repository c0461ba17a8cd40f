use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Metric, MetricEvaluator};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, Kernel1D};
use crate::sequence::EPS_POT_EXACT;

use super::fit::{fit_growth, Fit, GrowthModel};
use super::generator::GeneratorSpec;
use super::scan::powers_of_two;

/// Relative slack on the `f(0) sqrt n` and Weyl bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// Window for the Weyl ratio.
pub const WEYL_CUTOFF: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub n: usize,
    pub energy: f64,
    pub sup_norm: f64,
    pub w2_exact: f64,
    pub weyl_ratio: f64,
    pub energy_over_log: f64,
    pub sup_over_log: f64,
    /// `w2_exact n / sqrt(log n)`.
    pub w2_scaled: f64,
    /// Running maximum of `w2_scaled` over the checkpoints so far.
    pub w2_scaled_max: f64,
    /// `energy <= n f(0) + n eps`; greedy runs only.
    pub energy_bound: Option<bool>,
    /// `sup_norm <= f(0) sqrt n (1 + slack)`; greedy runs only.
    pub sup_bound: Option<bool>,
    /// `weyl_ratio <= 1 + slack`; greedy runs only.
    pub weyl_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureSeries {
    pub generator: String,
    pub rows: Vec<ConjectureRow>,
    pub energy_fit: Option<Fit>,
    pub sup_fit: Option<Fit>,
    pub w2_fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n_max: usize,
    pub series: Vec<ConjectureSeries>,
}

impl ConjectureReport {
    /// Every theorem column that applies holds.
    pub fn theorem_columns_pass(&self) -> bool {
        self.series
            .iter()
            .flat_map(|s| &s.rows)
            .flat_map(|r| [r.energy_bound, r.sup_bound, r.weyl_bound])
            .all(|b| b != Some(false))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "generator,n,energy,sup_norm,w2_exact,weyl_ratio,energy_over_log,sup_over_log,w2_scaled,w2_scaled_max,energy_bound,sup_bound,weyl_bound"
        )?;
        let flag = |b: Option<bool>| b.map_or("", |b| if b { "pass" } else { "fail" });
        for s in &self.series {
            for r in &s.rows {
                writeln!(
                    w,
                    "\"{}\",{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                    s.generator,
                    r.n,
                    r.energy,
                    r.sup_norm,
                    r.w2_exact,
                    r.weyl_ratio,
                    r.energy_over_log,
                    r.sup_over_log,
                    r.w2_scaled,
                    r.w2_scaled_max,
                    flag(r.energy_bound),
                    flag(r.sup_bound),
                    flag(r.weyl_bound)
                )?;
            }
        }
        Ok(())
    }
}

/// Bernoulli2 energy and sup norm over `log n`, and `w2_exact n / sqrt(log n)`
/// with its running maximum, at powers of two `2..=n_max`. Greedy rows also
/// carry the proven bounds.
pub fn conjecture_report(generators: &[GeneratorSpec], n_max: usize) -> Result<ConjectureReport> {
    if n_max < 2 {
        return Err(Error::config("conjecture report needs n_max >= 2"));
    }
    let kernel = Kernel1D::bernoulli2();
    let f0 = kernel.value_at_zero().expect("bounded");
    let evaluator = MetricEvaluator::new(
        &[Metric::Energy, Metric::SupNorm, Metric::W2Exact, Metric::WeylMaxRatio],
        Some(Kernel::OneD(kernel)),
    )?
    .with_cutoff(WEYL_CUTOFF);
    let checkpoints: Vec<usize> = powers_of_two(n_max).into_iter().filter(|&n| n >= 2).collect();
    let series = generators
        .iter()
        .map(|g| {
            if g.dim() != 1 {
                return Err(Error::config(format!("conjecture report is 1D only, got `{g}`")));
            }
            let greedy = matches!(g, GeneratorSpec::Greedy { .. });
            let points = g.generate(n_max)?.points;
            let reports = evaluator.evaluate_at(&points, &checkpoints)?;
            let mut running = 0.0f64;
            let rows: Vec<ConjectureRow> = reports
                .iter()
                .map(|r| {
                    let n = r.n as f64;
                    let get = |m| r.get(m).expect("requested");
                    let (energy, sup_norm, w2_exact, weyl_ratio) =
                        (get(Metric::Energy), get(Metric::SupNorm), get(Metric::W2Exact), get(Metric::WeylMaxRatio));
                    let w2_scaled = w2_exact * n / n.ln().sqrt();
                    running = running.max(w2_scaled);
                    ConjectureRow {
                        n: r.n,
                        energy,
                        sup_norm,
                        w2_exact,
                        weyl_ratio,
                        energy_over_log: energy / n.ln(),
                        sup_over_log: sup_norm / n.ln(),
                        w2_scaled,
                        w2_scaled_max: running,
                        energy_bound: greedy.then_some(energy <= n * f0 + n * EPS_POT_EXACT),
                        sup_bound: greedy.then(|| sup_norm <= f0 * n.sqrt() * (1.0 + BOUND_SLACK)),
                        weyl_bound: greedy.then_some(weyl_ratio <= 1.0 + BOUND_SLACK),
                    }
                })
                .collect();
            let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
            let fit = |model, f: fn(&ConjectureRow) -> f64| {
                fit_growth(model, &ns, &rows.iter().map(f).collect::<Vec<_>>()).ok()
            };
            Ok(ConjectureSeries {
                generator: g.to_string(),
                energy_fit: fit(GrowthModel::Log, |r| r.energy),
                sup_fit: fit(GrowthModel::Log, |r| r.sup_norm),
                w2_fit: fit(GrowthModel::SqrtLogOverN, |r| r.w2_exact),
                rows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjectureReport { n_max, series })
}
