use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Kernel1D, KernelVariant, DEFAULT_CUTOFF};
use crate::sequence::PointSet;

use super::bernoulli::BernoulliPotential;
use super::discrepancy::{extreme_discrepancy, star_discrepancy};
use super::energy::{energy_td, pair_energy_profile};
use super::potential::{potential_deriv_l2, potential_l1_norm, potential_sup_norm, sup_grid_error_bound};
use super::spectral::{SpectralState, SpectralStateTd};
use super::transport::{w1_circle_exact, w2_circle_exact};
use super::uniformity::{diaphony, w2_proxy, w2_proxy_td, weyl_ratio};
use super::Estimate;

/// Default number of quadrature / search nodes for potential norms.
pub const DEFAULT_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Energy,
    SupNorm,
    L1Norm,
    DerivL2,
    Diaphony,
    StarDiscrepancy,
    W2Exact,
    W2Proxy,
    WeylMaxRatio,
    W1Exact,
    ExtremeDiscrepancy,
}

impl Metric {
    pub const ALL: [Metric; 11] = [
        Metric::Energy,
        Metric::SupNorm,
        Metric::L1Norm,
        Metric::DerivL2,
        Metric::Diaphony,
        Metric::StarDiscrepancy,
        Metric::W2Exact,
        Metric::W2Proxy,
        Metric::WeylMaxRatio,
        Metric::W1Exact,
        Metric::ExtremeDiscrepancy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Energy => "energy",
            Metric::SupNorm => "sup_norm",
            Metric::L1Norm => "l1_norm",
            Metric::DerivL2 => "deriv_l2",
            Metric::Diaphony => "diaphony",
            Metric::StarDiscrepancy => "star_discrepancy",
            Metric::W2Exact => "w2_exact",
            Metric::W2Proxy => "w2_proxy",
            Metric::WeylMaxRatio => "weyl_max_ratio",
            Metric::W1Exact => "w1_exact",
            Metric::ExtremeDiscrepancy => "extreme_discrepancy",
        }
    }

    pub fn needs_kernel(self) -> bool {
        matches!(self, Metric::Energy | Metric::SupNorm | Metric::L1Norm | Metric::DerivL2 | Metric::WeylMaxRatio)
    }

    /// Metrics defined for point sets on `T^d`, `d >= 2`.
    pub fn supports_td(self) -> bool {
        matches!(self, Metric::Energy | Metric::W2Proxy)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown metric `{s}`")))
    }
}

/// One serialized line `n,metric,value,tail_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub n: usize,
    pub metric: Metric,
    pub value: f64,
    pub tail_bound: f64,
}

/// Requested metrics of one prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub metrics: BTreeMap<Metric, Estimate>,
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.metrics.get(&metric).map(|e| e.value)
    }

    pub fn estimate(&self, metric: Metric) -> Option<Estimate> {
        self.metrics.get(&metric).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = MetricRow> + '_ {
        self.metrics
            .iter()
            .map(|(&metric, e)| MetricRow { n: self.n, metric, value: e.value, tail_bound: e.tail_bound })
    }

    pub fn write_csv<W: Write>(reports: &[MetricReport], mut w: W) -> Result<()> {
        writeln!(w, "n,metric,value,tail_bound")?;
        for row in reports.iter().flat_map(|r| r.rows()) {
            writeln!(w, "{},{},{:.16e},{:.16e}", row.n, row.metric, row.value, row.tail_bound)?;
        }
        Ok(())
    }
}

/// Evaluates a fixed metric list at increasing prefixes of one point set,
/// sharing the running exponential sums and pair energies between prefixes.
#[derive(Debug, Clone)]
pub struct MetricEvaluator {
    metrics: Vec<Metric>,
    kernel: Option<Kernel>,
    cutoff: Option<usize>,
    grid: usize,
}

impl MetricEvaluator {
    pub fn new(metrics: &[Metric], kernel: Option<Kernel>) -> Result<Self> {
        if metrics.is_empty() {
            return Err(Error::config("no metrics requested"));
        }
        if kernel.is_none() {
            if let Some(m) = metrics.iter().find(|m| m.needs_kernel()) {
                return Err(Error::InvalidConfig(format!("metric `{m}` needs a kernel")));
            }
        }
        let mut metrics = metrics.to_vec();
        metrics.sort();
        metrics.dedup();
        Ok(Self { metrics, kernel, cutoff: None, grid: DEFAULT_GRID })
    }

    /// Spectral window `K` (default `10^4` in 1D, the kernel's or
    /// 32 / 16 on `T^2` / `T^d`).
    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn metrics(&self) -> &[Metric] {
        &self.metrics
    }

    pub fn evaluate(&self, points: &PointSet) -> Result<MetricReport> {
        Ok(self.evaluate_at(points, &[points.len()])?.remove(0))
    }

    /// Reports at each checkpoint, which must be strictly increasing and in
    /// `1..=points.len()`.
    pub fn evaluate_at(&self, points: &PointSet, checkpoints: &[usize]) -> Result<Vec<MetricReport>> {
        Ok(self.evaluate_at_timed(points, checkpoints)?.into_iter().map(|(r, _)| r).collect())
    }

    /// As [`Self::evaluate_at`], with the time spent on each checkpoint
    /// (including absorbing the points since the previous one).
    pub fn evaluate_at_timed(&self, points: &PointSet, checkpoints: &[usize]) -> Result<Vec<(MetricReport, Duration)>> {
        if points.is_empty() {
            return Err(Error::NoPoints);
        }
        if checkpoints.is_empty() {
            return Err(Error::config("no checkpoints"));
        }
        if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("checkpoints must be positive and strictly increasing"));
        }
        let last = *checkpoints.last().unwrap();
        if last > points.len() {
            return Err(Error::InvalidConfig(format!("checkpoint {last} exceeds the {} available points", points.len())));
        }
        if let Some(k) = &self.kernel {
            if k.dim() != points.dim() {
                return Err(Error::DimensionMismatch { expected: k.dim(), found: points.dim() });
            }
        }
        if points.dim() == 1 {
            self.evaluate_1d(points, checkpoints)
        } else {
            self.evaluate_td(points, checkpoints)
        }
    }

    fn has(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    fn kernel_1d(&self) -> Option<&Kernel1D> {
        match &self.kernel {
            Some(Kernel::OneD(k)) => Some(k),
            _ => None,
        }
    }

    fn evaluate_1d(&self, points: &PointSet, checkpoints: &[usize]) -> Result<Vec<(MetricReport, Duration)>> {
        let xs = points.coords();
        let kernel = self.kernel_1d();
        let last = *checkpoints.last().unwrap();
        let t0 = Instant::now();
        let energies = match (self.has(Metric::Energy), kernel) {
            (true, Some(k)) => pair_energy_profile(&xs[..last], k),
            _ => Vec::new(),
        };
        let spectral = [Metric::DerivL2, Metric::Diaphony, Metric::W2Proxy, Metric::WeylMaxRatio]
            .iter()
            .any(|&m| self.has(m));
        let mut state = SpectralState::new(if spectral { self.cutoff.unwrap_or(DEFAULT_CUTOFF) } else { 0 });
        let mut absorbed = 0;
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut energy_time = t0.elapsed();
        for &n in checkpoints {
            let start = Instant::now();
            if spectral {
                state.extend(&xs[absorbed..n]);
                absorbed = n;
            }
            let prefix = points.prefix(n);
            let mut metrics = BTreeMap::new();
            for &m in &self.metrics {
                let e = match m {
                    Metric::Energy => Estimate::exact(energies[n - 1]),
                    Metric::SupNorm => {
                        let k = kernel.expect("checked");
                        let v = potential_sup_norm(&prefix, k, self.grid)?;
                        let tail = if k.variant() == KernelVariant::ExplicitFourier {
                            sup_grid_error_bound(k, n, self.grid)
                        } else {
                            0.0
                        };
                        Estimate { value: v, tail_bound: tail }
                    }
                    Metric::L1Norm => potential_l1_norm(&prefix, kernel.expect("checked"), self.grid)?,
                    Metric::DerivL2 => {
                        let k = kernel.expect("checked");
                        if k.variant() == KernelVariant::Bernoulli2 {
                            Estimate::exact(BernoulliPotential::new(&xs[..n]).deriv_l2())
                        } else {
                            potential_deriv_l2(&state, k)
                        }
                    }
                    Metric::Diaphony => diaphony(&state),
                    Metric::W2Proxy => w2_proxy(&state),
                    Metric::WeylMaxRatio => Estimate::exact(weyl_ratio(&state, kernel.expect("checked"))?),
                    Metric::StarDiscrepancy => Estimate::exact(star_discrepancy(&prefix)?),
                    Metric::ExtremeDiscrepancy => Estimate::exact(extreme_discrepancy(&prefix)?),
                    Metric::W2Exact => Estimate::exact(w2_circle_exact(&prefix)?),
                    Metric::W1Exact => Estimate::exact(w1_circle_exact(&prefix)?),
                };
                metrics.insert(m, e);
            }
            // The energy profile is computed once; charge it to the first checkpoint.
            out.push((MetricReport { n, metrics }, start.elapsed() + std::mem::take(&mut energy_time)));
        }
        Ok(out)
    }

    fn evaluate_td(&self, points: &PointSet, checkpoints: &[usize]) -> Result<Vec<(MetricReport, Duration)>> {
        if let Some(m) = self.metrics.iter().find(|m| !m.supports_td()) {
            return Err(Error::Unsupported(format!("metric `{m}` is only defined for d = 1")));
        }
        let d = points.dim();
        let kernel = match &self.kernel {
            Some(Kernel::Td(k)) => Some(k),
            _ => None,
        };
        let default_k = if d == 2 { 32 } else { 16 };
        let proxy_k = self.cutoff.or(kernel.map(|k| k.cutoff())).unwrap_or(default_k);
        let mut proxy_state = SpectralStateTd::new(d, proxy_k);
        let mut energy_state = match kernel {
            Some(k) if self.has(Metric::Energy) && k.cutoff() != proxy_k => Some(SpectralStateTd::new(d, k.cutoff())),
            _ => None,
        };
        let mut absorbed = 0;
        let mut out = Vec::with_capacity(checkpoints.len());
        for &n in checkpoints {
            let start = Instant::now();
            for i in absorbed..n {
                proxy_state.push(points.point(i))?;
                if let Some(s) = &mut energy_state {
                    s.push(points.point(i))?;
                }
            }
            absorbed = n;
            let mut metrics = BTreeMap::new();
            for &m in &self.metrics {
                let e = match m {
                    Metric::Energy => {
                        let k = kernel.expect("checked");
                        Estimate::exact(energy_td(energy_state.as_ref().unwrap_or(&proxy_state), k)?)
                    }
                    Metric::W2Proxy => w2_proxy_td(&proxy_state),
                    _ => unreachable!("filtered above"),
                };
                metrics.insert(m, e);
            }
            out.push((MetricReport { n, metrics }, start.elapsed()));
        }
        Ok(out)
    }
}
