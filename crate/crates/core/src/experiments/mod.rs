//! Scans over `n`, theorem checks and baseline comparisons.

mod conjecture;
mod figures;
mod fit;
mod generator;
mod gn;
mod lemma;
mod scan;
mod td;

pub use conjecture::{conjecture_report, ConjectureReport, ConjectureRow, ConjectureSeries, BOUND_SLACK, WEYL_CUTOFF};
pub use figures::{figure_data, Curve, FigureData, CURVE_SAMPLES};
pub use fit::{fit_growth, Fit, GrowthModel};
pub use generator::{parse_alpha, parse_seed_list, Generated, GeneratorSpec};
pub use gn::{fit_gn_constant, gn_rigorous_constant, random_peaked_poly, random_trig_poly, GnFit, TrigPoly};
pub use lemma::{
    bernoulli_prefix_norms, doubling_window_l1_check, doubling_windows, theorem2_envelope, DoublingReport,
    EnvelopeReport, EnvelopeRow, Window, WitnessCheck,
};
pub use scan::{compare, powers_of_two, run_scan, Comparison, MetricFit, ScanResult, ScanSpec};
pub use td::{td_scaling, TdRow, TdScalingReport, TD_BOUND_FACTOR, TD_REFERENCE_N};
