use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greedyseq::diagnostics::{pair_energy, Metric, MetricEvaluator, MetricReport};
use greedyseq::experiments::{compare, figure_data, parse_seed_list, powers_of_two, run_scan, GeneratorSpec, GrowthModel, ScanSpec};
use greedyseq::sequence::io::{format_coordinate, load, save, write_atomic};
use greedyseq::sequence::TieBreak;
use greedyseq::{Error, Kernel, KernelSpec, PointSet, SolverConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "greedyseq", version, about = "Greedy kernel-minimizing sequences on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extend seed points greedily and write the sequence as CSV.
    Generate(GenerateArgs),
    /// Evaluate metrics of a point file at checkpoints.
    Analyze(AnalyzeArgs),
    /// Scan several generators at shared checkpoints.
    Compare(CompareArgs),
    /// Run a scan described by a JSON experiment file.
    Scan(ScanArgs),
    /// Sampled potentials and the point scatter of a 1D greedy run.
    Figures(FiguresArgs),
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// bernoulli2, logsin, green, a JSON kernel object or a path to one.
    #[arg(long)]
    kernel: Option<String>,
    /// Dimension for the green kernel.
    #[arg(long)]
    dim: Option<usize>,
    /// Kernel frequency cutoff.
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    GridRefine,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Smallest,
    Largest,
}

#[derive(Args)]
struct SeedArgs {
    /// Seed coordinates, e.g. `1/3,4/5`; points of dimension d are
    /// flattened.
    #[arg(long, conflicts_with = "seed_file")]
    seed: Option<String>,
    /// Point CSV whose rows are used as seeds.
    #[arg(long)]
    seed_file: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Candidates per axis for the grid solvers.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value = "smallest")]
    tie_break: TieArg,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    seeds: SeedArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Total number of points, seeds included.
    #[arg(long)]
    n: usize,
    #[arg(long, short, default_value = "points.csv")]
    out: PathBuf,
    /// Also report the pair energy of the whole set (off-diagonal for
    /// logsin).
    #[arg(long)]
    energy: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Point CSV.
    #[arg(long)]
    points: PathBuf,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Comma-separated metric names; defaults to every applicable metric.
    #[arg(long)]
    metrics: Option<String>,
    /// Comma-separated prefix sizes; defaults to powers of two and the
    /// full set.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Spectral window K.
    #[arg(long)]
    window: Option<usize>,
    /// Quadrature grid.
    #[arg(long)]
    grid: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CompareArgs {
    /// Generator, e.g. `greedy:bernoulli2:1/3,4/5`, `kronecker:sqrt2`,
    /// `vdc:2`, `random:7`; repeat for each.
    #[arg(long = "generator", short = 'g', required = true)]
    generators: Vec<String>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value = "energy,w2_exact,star_discrepancy")]
    metrics: String,
    #[arg(long, default_value_t = 4096)]
    n_max: usize,
    #[arg(long)]
    checkpoints: Option<String>,
    /// Growth model fitted per metric: log, power, power:<a>,
    /// sqrt_log_over_n, sqrt_log_over_sqrt_n.
    #[arg(long)]
    fit: Option<String>,
    #[arg(long, short, default_value = "compare")]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON experiment file.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, short, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct FiguresArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    seeds: SeedArgs,
    /// Use an existing run instead of generating one.
    #[arg(long, conflicts_with_all = ["seed", "seed_file"])]
    points: Option<PathBuf>,
    /// Length of the run to generate.
    #[arg(long, default_value_t = 250)]
    n: usize,
    /// Comma-separated `n` whose potentials `f_n` are sampled.
    #[arg(long, default_value = "")]
    curves: String,
    #[arg(long, short, default_value = "figures")]
    out: PathBuf,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::SingularEvaluation => "singular_evaluation",
        Error::MeanValueFrequency => "mean_value_frequency",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NoNonpositiveCandidate { .. } => "gate_failure",
        Error::InvalidConfig(_) => "invalid_config",
        Error::InvalidKernel(_) => "invalid_kernel",
        Error::Unsupported(_) => "unsupported",
        Error::NoPoints => "no_points",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// 0 success, 2 configuration, 3 numeric gate, 4 I/O.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoNonpositiveCandidate { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message, "exit_code": code }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.to_string().trim(), 2),
    };
    if let Err(e) = configure_threads() {
        return report_error(error_kind(&e), &e.to_string(), exit_code(&e));
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Figures(a) => cmd_figures(a),
    };
    match result {
        Ok(summary) => {
            if let Some(summary) = summary {
                println!("{}", serde_json::to_string_pretty(&summary).expect("json value"));
            }
            ExitCode::SUCCESS
        }
        Err(e) => report_error(error_kind(&e), &e.to_string(), exit_code(&e)),
    }
}

/// Caps the worker pool at `GREEDYSEQ_THREADS` when set.
fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("GREEDYSEQ_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config_error(format!("GREEDYSEQ_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config_error(e.to_string()))
}

/// Loads a point file, naming the path in I/O errors.
fn load_points(path: &Path) -> Result<PointSet, Error> {
    load(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        e => e,
    })
}

fn kernel_spec(args: &KernelArgs) -> Result<Option<KernelSpec>, Error> {
    let Some(name) = args.kernel.as_deref() else {
        if args.dim.is_some() || args.cutoff.is_some() {
            return Err(config_error("--dim and --cutoff need --kernel"));
        }
        return Ok(None);
    };
    let one_d = |spec: KernelSpec| match args.dim {
        Some(d) if d != 1 => Err(config_error(format!("kernel `{name}` is one-dimensional, got --dim {d}"))),
        _ => Ok(spec),
    };
    let spec = match name {
        "bernoulli2" => one_d(KernelSpec::Bernoulli2 { cutoff: args.cutoff })?,
        "logsin" => one_d(KernelSpec::Logsin { cutoff: args.cutoff })?,
        "green" => {
            let dim = args.dim.unwrap_or(2);
            KernelSpec::Green { dim, cutoff: args.cutoff.unwrap_or(if dim == 2 { 32 } else { 16 }) }
        }
        s if s.trim_start().starts_with('{') => KernelSpec::from_json(s)?,
        s if Path::new(s).is_file() => KernelSpec::from_file(Path::new(s))?,
        s => return Err(config_error(format!("unknown kernel `{s}`"))),
    };
    Ok(Some(spec))
}

fn require_kernel(args: &KernelArgs) -> Result<KernelSpec, Error> {
    kernel_spec(args)?.ok_or_else(|| config_error("--kernel is required"))
}

fn seed_literals(args: &SeedArgs) -> Result<Vec<String>, Error> {
    match (&args.seed, &args.seed_file) {
        (Some(list), _) => parse_seed_list(list),
        (None, Some(path)) => Ok(load_points(path)?.coords().iter().map(|&x| format_coordinate(x)).collect()),
        (None, None) => Err(config_error("--seed or --seed-file is required")),
    }
}

fn solver_config(args: &SolverArgs, kernel: &Kernel) -> SolverConfig {
    let mut config = match (args.solver, args.grid) {
        (Some(SolverArg::Exact), _) => SolverConfig::exact(),
        (Some(SolverArg::GridRefine), g) => SolverConfig::grid_refine(g.unwrap_or(4096)),
        (Some(SolverArg::Grid), g) => SolverConfig::grid(g.unwrap_or(SolverConfig::default_for(kernel).grid_size)),
        (None, Some(g)) if kernel.dim() > 1 => SolverConfig::grid(g),
        (None, Some(g)) => SolverConfig::grid_refine(g),
        (None, None) => SolverConfig::default_for(kernel),
    };
    if let TieArg::Largest = args.tie_break {
        config = config.with_tie_break(TieBreak::LargestCoordinate);
    }
    config
}

fn parse_list<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>, Error> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad {what} `{s}`"))))
        .collect()
}

fn parse_metrics(list: &str) -> Result<Vec<Metric>, Error> {
    let metrics: Vec<Metric> = parse_list(list, "metric")?;
    if metrics.is_empty() {
        return Err(config_error("no metrics requested"));
    }
    Ok(metrics)
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_generate(a: GenerateArgs) -> Result<Option<serde_json::Value>, Error> {
    let spec = require_kernel(&a.kernel)?;
    let kernel = spec.build()?;
    let config = solver_config(&a.solver, &kernel);
    let generator = GeneratorSpec::Greedy { kernel: spec, seed: seed_literals(&a.seeds)?, solver: Some(config) };
    let generated = generator.generate(a.n)?;
    save(&generated.points, &a.out)?;
    let gates = &generated.gate_values;
    let mut summary = json!({
        "output": path_string(&a.out),
        "points": generated.points.len(),
        "dim": generated.points.dim(),
        "kernel": kernel.id(),
        "gate": config.gate(),
        "final_gate_value": gates.last(),
        "max_gate_value": gates.iter().copied().reduce(f64::max),
    });
    if a.energy {
        summary["energy"] = json!(pair_energy(&generated.points, &kernel)?);
        let singular = matches!(&kernel, Kernel::OneD(k) if k.value_at_zero().is_none());
        summary["energy_diagonal_included"] = json!(!singular);
    }
    Ok(Some(summary))
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<Option<serde_json::Value>, Error> {
    let points = load_points(&a.points)?;
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    let kernel = kernel_spec(&a.kernel)?.map(|k| k.build()).transpose()?;
    let metrics = match &a.metrics {
        Some(list) => parse_metrics(list)?,
        None => Metric::ALL
            .iter()
            .copied()
            .filter(|m| (kernel.is_some() || !m.needs_kernel()) && (points.dim() == 1 || m.supports_td()))
            .collect(),
    };
    let checkpoints = match &a.checkpoints {
        Some(list) => parse_list(list, "checkpoint")?,
        None => powers_of_two(points.len()),
    };
    let mut evaluator = MetricEvaluator::new(&metrics, kernel)?;
    if let Some(k) = a.window {
        evaluator = evaluator.with_cutoff(k);
    }
    if let Some(g) = a.grid {
        evaluator = evaluator.with_grid(g);
    }
    let reports = evaluator.evaluate_at(&points, &checkpoints)?;
    let mut buf = Vec::new();
    match a.format {
        Format::Csv => MetricReport::write_csv(&reports, &mut buf)?,
        Format::Json => serde_json::to_writer_pretty(&mut buf, &reports)?,
    }
    // Without --out the table itself is the output.
    let Some(path) = &a.out else {
        let mut out = std::io::stdout().lock();
        out.write_all(&buf)?;
        out.flush()?;
        return Ok(None);
    };
    write_atomic(path, &buf)?;
    Ok(Some(json!({
        "points": points.len(),
        "checkpoints": checkpoints,
        "metrics": metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "output": path_string(path),
    })))
}

fn cmd_compare(a: CompareArgs) -> Result<Option<serde_json::Value>, Error> {
    let generators = a.generators.iter().map(|g| g.parse()).collect::<Result<Vec<GeneratorSpec>, _>>()?;
    let metrics = parse_metrics(&a.metrics)?;
    let checkpoints = match &a.checkpoints {
        Some(list) => parse_list(list, "checkpoint")?,
        None => powers_of_two(a.n_max),
    };
    let fit = a.fit.as_deref().map(str::parse::<GrowthModel>).transpose()?;
    let comparison = compare(&generators, &checkpoints, &metrics, kernel_spec(&a.kernel)?, fit)?;

    std::fs::create_dir_all(&a.out)?;
    let mut table = Vec::new();
    comparison.write_csv(&mut table)?;
    let table_path = a.out.join("comparison.csv");
    write_atomic(&table_path, &table)?;
    let mut fits = Vec::new();
    comparison.write_fit_summary(&mut fits)?;
    let fits_path = a.out.join("fits.csv");
    write_atomic(&fits_path, &fits)?;
    let json_path = a.out.join("comparison.json");
    write_atomic(&json_path, serde_json::to_string_pretty(&comparison)?.as_bytes())?;
    Ok(Some(json!({
        "generators": comparison.results.iter().map(|r| r.generator.clone()).collect::<Vec<_>>(),
        "checkpoints": comparison.checkpoints,
        "files": [path_string(&table_path), path_string(&fits_path), path_string(&json_path)],
        "fits": String::from_utf8_lossy(&fits).lines().collect::<Vec<_>>(),
    })))
}

fn cmd_scan(a: ScanArgs) -> Result<Option<serde_json::Value>, Error> {
    let spec = ScanSpec::from_file(&a.spec)?;
    let result = run_scan(&spec)?;
    let files = result.write(&a.out)?;
    Ok(Some(json!({
        "name": result.name,
        "generator": result.generator,
        "checkpoints": result.reports.iter().map(|r| r.n).collect::<Vec<_>>(),
        "max_gate_value": result.max_gate_value,
        "fits": result.fits,
        "files": files.iter().map(|p| path_string(p)).collect::<Vec<_>>(),
    })))
}

fn cmd_figures(a: FiguresArgs) -> Result<Option<serde_json::Value>, Error> {
    let spec = require_kernel(&a.kernel)?;
    let kernel = spec.build_1d()?;
    let points = match &a.points {
        Some(path) => load_points(path)?,
        None => {
            let config = SolverConfig::default_for(&Kernel::OneD(kernel.clone()));
            let generator = GeneratorSpec::Greedy { kernel: spec, seed: seed_literals(&a.seeds)?, solver: Some(config) };
            generator.generate(a.n)?.points
        }
    };
    let curves: Vec<usize> = parse_list(&a.curves, "curve index")?;
    let data = figure_data(&points, &kernel, &curves)?;
    let files = data.write(&a.out)?;
    Ok(Some(json!({
        "points": points.len(),
        "curves": data.curves.iter().map(|c| json!({
            "n": c.n,
            "argmin": c.argmin,
            "min": c.min,
            "next_point": c.next_point,
        })).collect::<Vec<_>>(),
        "files": files.iter().map(|p| path_string(p)).collect::<Vec<_>>(),
    })))
}
