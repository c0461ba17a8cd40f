//! Point sequences on `T^d`: the greedy construction and classical baselines.

mod classical;
mod exact;
mod greedy;
mod greedy_td;
pub mod io;

pub use classical::{kronecker, radical_inverse, random_points, van_der_corput, RANDOM_GENERATOR};
pub use exact::exact_bernoulli_argmin;
pub use greedy::{greedy_extend, greedy_extend_traced, GreedyTrace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelSpec, KernelVariant};
use crate::torus::wrap;

/// Gate for exact piecewise minimization.
pub const EPS_POT_EXACT: f64 = 1e-9;
/// Gate for grid-based minimization (with or without refinement).
pub const EPS_POT_GRID: f64 = 1e-6;
/// Golden-section refinement stops once the bracket is this narrow.
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    /// Exact per-arc vertex formula; Bernoulli2 on `T` only.
    ExactPiecewise,
    /// Uniform grid on `T` followed by golden-section refinement.
    GridRefine,
    /// Uniform grid per axis on `T^d`, `d >= 2`, no refinement.
    Grid,
}

/// Tie-break rule between equally good candidates, in lexicographic
/// coordinate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    SmallestCoordinate,
    LargestCoordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolverMode,
    /// Candidates per axis.
    pub grid_size: usize,
    pub refine_tol: f64,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl SolverConfig {
    pub fn exact() -> Self {
        Self {
            mode: SolverMode::ExactPiecewise,
            grid_size: 4096,
            refine_tol: DEFAULT_REFINE_TOL,
            tie_break: TieBreak::SmallestCoordinate,
        }
    }

    pub fn grid_refine(grid_size: usize) -> Self {
        Self { mode: SolverMode::GridRefine, grid_size, ..Self::exact() }
    }

    pub fn grid(grid_size: usize) -> Self {
        Self { mode: SolverMode::Grid, grid_size, ..Self::exact() }
    }

    /// Exact for Bernoulli2, grid-refine (M = 4096) for other 1D kernels,
    /// plain grids of 256^2, 64^3 and 16^d beyond.
    pub fn default_for(kernel: &Kernel) -> Self {
        match kernel {
            Kernel::OneD(k) if k.variant() == KernelVariant::Bernoulli2 => Self::exact(),
            Kernel::OneD(_) => Self::grid_refine(4096),
            Kernel::Td(k) => Self::grid(match k.dim() {
                2 => 256,
                3 => 64,
                _ => 16,
            }),
        }
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    /// Potential allowed at an accepted greedy point.
    pub fn gate(&self) -> f64 {
        match self.mode {
            SolverMode::ExactPiecewise => EPS_POT_EXACT,
            SolverMode::GridRefine | SolverMode::Grid => EPS_POT_GRID,
        }
    }

    pub fn validate(&self, kernel: &Kernel) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::config(format!("grid size must be >= 2, got {}", self.grid_size)));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::config("refine tolerance must be positive"));
        }
        match (self.mode, kernel) {
            (SolverMode::ExactPiecewise, Kernel::OneD(k)) if k.variant() == KernelVariant::Bernoulli2 => Ok(()),
            (SolverMode::ExactPiecewise, _) => {
                Err(Error::config("exact_piecewise mode needs the bernoulli2 kernel on T"))
            }
            (SolverMode::GridRefine, Kernel::OneD(_)) => Ok(()),
            (SolverMode::GridRefine, Kernel::Td(_)) => Err(Error::config("grid_refine mode is 1D only")),
            (SolverMode::Grid, Kernel::Td(k)) => {
                if self.grid_size <= 2 * k.cutoff() {
                    Err(Error::config(format!(
                        "grid size {} must exceed twice the cutoff {}",
                        self.grid_size,
                        k.cutoff()
                    )))
                } else {
                    Ok(())
                }
            }
            (SolverMode::Grid, Kernel::OneD(_)) => Err(Error::config("grid mode needs d >= 2")),
        }
    }
}

/// How a point set came to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Greedy {
        kernel: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel_spec: Option<KernelSpec>,
        /// Seed coordinates as given by the user (e.g. `"1/3"`).
        seed_literals: Vec<String>,
        /// Seed block, flattened with stride `dim`.
        seed_points: Vec<f64>,
        solver: SolverConfig,
    },
    Kronecker { alpha: f64 },
    VanDerCorput { base: u64 },
    Random { seed: u64, generator: String },
    /// Read from a file without a recognized sidecar, or built by hand.
    Imported { source: String },
}

/// Ordered points on `T^d`, flattened with stride `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    provenance: Provenance,
}

impl PointSet {
    /// Coordinates are reduced mod 1.
    pub fn new(dim: usize, coords: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() % dim });
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parse(format!("non-finite coordinate {bad}")));
        }
        let coords = coords.into_iter().map(wrap).collect();
        Ok(Self { dim, coords, provenance })
    }

    pub fn from_1d(points: &[f64]) -> Self {
        Self::new(1, points.to_vec(), Provenance::Imported { source: "inline".into() })
            .expect("finite 1D coordinates")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    /// All coordinates, flattened with stride `dim`; for `d = 1` this is
    /// simply the sequence.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// The first `n` points, with the same provenance.
    pub fn prefix(&self, n: usize) -> PointSet {
        let n = n.min(self.len());
        PointSet {
            dim: self.dim,
            coords: self.coords[..n * self.dim].to_vec(),
            provenance: self.provenance.clone(),
        }
    }

    pub(crate) fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend(p.iter().copied().map(wrap));
    }

    /// Coordinates for `d = 1`, or an error.
    pub fn require_1d(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::Unsupported(format!("operation is 1D only, got d = {}", self.dim)));
        }
        Ok(&self.coords)
    }
}
