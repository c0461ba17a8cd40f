use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Metric, MetricEvaluator, MetricReport};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::sequence::io::write_atomic;

use super::fit::{fit_growth, Fit, GrowthModel};
use super::generator::GeneratorSpec;

/// `1, 2, 4, ...` up to `n_max`, with `n_max` appended when it is not a
/// power of two.
pub fn powers_of_two(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |&n| n.checked_mul(2)).take_while(|&n| n <= n_max).collect();
    if n_max > 0 && out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// A scaling scan read from an experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub name: String,
    pub generator: GeneratorSpec,
    /// Prefix sizes; defaults to powers of two up to `n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    pub metrics: Vec<Metric>,
    /// Growth model fitted to every metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<GrowthModel>,
    /// Kernel for kernel-dependent metrics; defaults to the greedy kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl ScanSpec {
    pub fn new(name: &str, generator: GeneratorSpec, checkpoints: Vec<usize>, metrics: &[Metric]) -> Self {
        Self {
            name: name.to_string(),
            generator,
            checkpoints: Some(checkpoints),
            n_max: None,
            metrics: metrics.to_vec(),
            fit: None,
            kernel: None,
            spectral_cutoff: None,
            grid: None,
        }
    }

    pub fn with_fit(mut self, fit: GrowthModel) -> Self {
        self.fit = Some(fit);
        self
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = Some(kernel);
        self
    }

    pub fn with_spectral_cutoff(mut self, k: usize) -> Self {
        self.spectral_cutoff = Some(k);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("scan spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn resolved_checkpoints(&self) -> Result<Vec<usize>> {
        match (&self.checkpoints, self.n_max) {
            (Some(c), _) => Ok(c.clone()),
            (None, Some(n)) => Ok(powers_of_two(n)),
            (None, None) => Err(Error::config("scan needs `checkpoints` or `n_max`")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return Err(Error::InvalidConfig(format!("scan name `{}` is not a plain file name", self.name)));
        }
        if self.metrics.is_empty() {
            return Err(Error::config("scan needs at least one metric"));
        }
        let c = self.resolved_checkpoints()?;
        if c.is_empty() || c[0] == 0 || c.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("checkpoints must be positive and strictly increasing"));
        }
        Ok(())
    }

    fn metric_kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref().or(self.generator.kernel())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFit {
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
    /// Why no fit was produced (e.g. too few positive values).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub name: String,
    pub generator: String,
    pub kernel: Option<String>,
    pub reports: Vec<MetricReport>,
    pub fits: Vec<MetricFit>,
    pub generation_seconds: f64,
    pub checkpoint_seconds: Vec<f64>,
    /// Largest potential at an appended greedy point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gate_value: Option<f64>,
}

impl ScanResult {
    pub fn series(&self, metric: Metric) -> (Vec<usize>, Vec<f64>) {
        self.reports.iter().filter_map(|r| r.get(metric).map(|v| (r.n, v))).unzip()
    }

    pub fn fit(&self, metric: Metric) -> Option<&Fit> {
        self.fits.iter().find(|f| f.metric == metric).and_then(|f| f.fit.as_ref())
    }

    /// Writes `<dir>/<name>/<metric>.csv` per metric and
    /// `<dir>/<name>/summary.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let root = dir.join(&self.name);
        std::fs::create_dir_all(&root)?;
        let mut written = Vec::new();
        let metrics: Vec<Metric> = self.reports.first().map(|r| r.metrics.keys().copied().collect()).unwrap_or_default();
        for m in metrics {
            let mut buf = Vec::new();
            let only: Vec<MetricReport> = self
                .reports
                .iter()
                .map(|r| MetricReport { n: r.n, metrics: r.metrics.iter().filter(|(k, _)| **k == m).map(|(k, v)| (*k, *v)).collect() })
                .collect();
            MetricReport::write_csv(&only, &mut buf)?;
            let path = root.join(format!("{m}.csv"));
            write_atomic(&path, &buf)?;
            written.push(path);
        }
        let path = root.join("summary.json");
        write_atomic(&path, serde_json::to_string_pretty(self)?.as_bytes())?;
        written.push(path);
        Ok(written)
    }
}

/// Generates the sequence once, evaluates the metrics at every checkpoint
/// incrementally and fits the growth model.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let checkpoints = spec.resolved_checkpoints()?;
    let n_max = *checkpoints.last().expect("validated");
    let kernel = spec.metric_kernel().map(|k| k.build()).transpose()?;
    let mut evaluator = MetricEvaluator::new(&spec.metrics, kernel.clone())?;
    if let Some(k) = spec.spectral_cutoff {
        evaluator = evaluator.with_cutoff(k);
    }
    if let Some(g) = spec.grid {
        evaluator = evaluator.with_grid(g);
    }

    let t0 = Instant::now();
    let generated = spec.generator.generate(n_max)?;
    let generation_seconds = t0.elapsed().as_secs_f64();
    let timed = evaluator.evaluate_at_timed(&generated.points, &checkpoints)?;
    let (reports, times): (Vec<MetricReport>, Vec<_>) = timed.into_iter().unzip();

    let fits = match spec.fit {
        None => Vec::new(),
        Some(model) => evaluator
            .metrics()
            .iter()
            .map(|&metric| {
                let (n, y): (Vec<usize>, Vec<f64>) = reports.iter().filter_map(|r| r.get(metric).map(|v| (r.n, v))).unzip();
                match fit_growth(model, &n, &y) {
                    Ok(fit) => MetricFit { metric, fit: Some(fit), error: None },
                    Err(e) => MetricFit { metric, fit: None, error: Some(e.to_string()) },
                }
            })
            .collect(),
    };
    let max_gate_value = (!generated.gate_values.is_empty())
        .then(|| generated.gate_values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(ScanResult {
        name: spec.name.clone(),
        generator: spec.generator.to_string(),
        kernel: kernel.map(|k| k.id()),
        reports,
        fits,
        generation_seconds,
        checkpoint_seconds: times.iter().map(|t| t.as_secs_f64()).collect(),
        max_gate_value,
    })
}

/// Quotes a CSV field when it contains a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Side-by-side scans of several generators at shared checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub checkpoints: Vec<usize>,
    pub results: Vec<ScanResult>,
}

impl Comparison {
    /// Rows `generator,n,metric,value,tail_bound`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "generator,n,metric,value,tail_bound")?;
        for r in &self.results {
            for row in r.reports.iter().flat_map(|rep| rep.rows()) {
                writeln!(w, "{},{},{},{:.16e},{:.16e}", csv_field(&r.generator), row.n, row.metric, row.value, row.tail_bound)?;
            }
        }
        Ok(())
    }

    /// Rows `generator,metric,model,c,exponent,rms_residual,max_ratio`.
    pub fn write_fit_summary<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "generator,metric,model,c,exponent,rms_residual,max_ratio")?;
        for r in &self.results {
            for f in &r.fits {
                if let Some(fit) = &f.fit {
                    let model = serde_json::to_value(fit.model)?;
                    writeln!(
                        w,
                        "{},{},{},{:.6e},{},{:.3e},{:.6e}",
                        csv_field(&r.generator),
                        f.metric,
                        model["model"].as_str().unwrap_or("?"),
                        fit.c,
                        fit.exponent.map(|a| format!("{a:.6}")).unwrap_or_default(),
                        fit.rms_residual,
                        fit.max_ratio()
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Runs one scan per generator (concurrently) with shared settings.
pub fn compare(
    generators: &[GeneratorSpec],
    checkpoints: &[usize],
    metrics: &[Metric],
    kernel: Option<KernelSpec>,
    fit: Option<GrowthModel>,
) -> Result<Comparison> {
    if generators.len() < 2 {
        return Err(Error::config("need two generators"));
    }
    let results = generators
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut spec = ScanSpec::new(&format!("g{i}"), g.clone(), checkpoints.to_vec(), metrics);
            spec.fit = fit;
            spec.kernel = kernel.clone();
            run_scan(&spec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison { checkpoints: checkpoints.to_vec(), results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_default_to_powers_of_two() {
        assert_eq!(powers_of_two(8), vec![1, 2, 4, 8]);
        assert_eq!(powers_of_two(10), vec![1, 2, 4, 8, 10]);
        assert!(powers_of_two(0).is_empty());
    }

    #[test]
    fn spec_from_json() {
        let spec = ScanSpec::from_json(
            r#"{"name":"w2","generator":{"type":"greedy","kernel":{"type":"bernoulli2"},"seed":["1/3","4/5"]},
                "n_max":64,"metrics":["w2_exact"],"fit":{"model":"power","exponent":-0.5}}"#,
        )
        .unwrap();
        assert_eq!(spec.resolved_checkpoints().unwrap(), vec![1, 2, 4, 8, 16, 32, 64]);
        let r = run_scan(&spec).unwrap();
        assert_eq!(r.reports.len(), 7);
        let fit = r.fit(Metric::W2Exact).unwrap();
        assert!(fit.c.is_finite() && fit.c > 0.0);
        assert!(r.max_gate_value.unwrap() <= 1e-9);
        assert_eq!(r.checkpoint_seconds.len(), 7);
    }

    #[test]
    fn invalid_specs() {
        let g: GeneratorSpec = "vdc:2".parse().unwrap();
        assert!(ScanSpec::new("a", g.clone(), vec![4, 2], &[Metric::W2Exact]).validate().is_err());
        assert!(ScanSpec::new("a", g.clone(), vec![2, 4], &[]).validate().is_err());
        assert!(ScanSpec::new("../a", g.clone(), vec![2, 4], &[Metric::W2Exact]).validate().is_err());
        // Energy on a baseline needs an explicit kernel.
        assert!(run_scan(&ScanSpec::new("a", g.clone(), vec![2, 4], &[Metric::Energy])).is_err());
        let ok = ScanSpec::new("a", g, vec![2, 4], &[Metric::Energy]).with_kernel(KernelSpec::Bernoulli2 { cutoff: None });
        assert!(run_scan(&ok).is_ok());
    }

    #[test]
    fn writes_one_file_per_metric() {
        let dir = std::env::temp_dir().join(format!("greedyseq-scan-{}", std::process::id()));
        let spec = ScanSpec::new("vdc", "vdc:2".parse().unwrap(), vec![4, 8], &[Metric::W2Exact, Metric::StarDiscrepancy]);
        let files = run_scan(&spec).unwrap().write(&dir).unwrap();
        assert_eq!(files.len(), 3);
        let text = std::fs::read_to_string(dir.join("vdc").join("w2_exact.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("n,metric,value,tail_bound\n4,w2_exact,"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn compare_needs_two() {
        let g: GeneratorSpec = "vdc:2".parse().unwrap();
        let e = compare(std::slice::from_ref(&g), &[4], &[Metric::W2Exact], None, None).unwrap_err();
        assert!(e.to_string().contains("need two generators"));
        let c = compare(&[g, "kronecker:sqrt2".parse().unwrap()], &[4, 8], &[Metric::W2Exact], None, None).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn generator_names_are_quoted() {
        assert_eq!(csv_field("vdc:2"), "vdc:2");
        assert_eq!(csv_field("greedy:bernoulli2:1/3,4/5"), "\"greedy:bernoulli2:1/3,4/5\"");
        let gens: Vec<GeneratorSpec> = vec!["greedy:bernoulli2:1/3,4/5".parse().unwrap(), "vdc:2".parse().unwrap()];
        let c = compare(&gens, &[4], &[Metric::W2Exact], None, Some(GrowthModel::Log)).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.matches(',').count() == 4 || l.starts_with('"')));
        assert!(text.contains("\"greedy:bernoulli2:1/3,4/5\",4,w2_exact,"));
    }
}
