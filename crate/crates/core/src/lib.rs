//! Greedy kernel-minimizing sequences on the torus.
//!
//! Starting from a seed block `x_1, ..., x_m`, each new point is chosen as a
//! global minimizer of the potential `x -> sum_k f(x - x_k)` for an even,
//! mean-zero, positive-definite kernel `f`. The crate provides the kernels,
//! the generators (plus Kronecker, van der Corput and random baselines), the
//! distribution diagnostics used to judge the resulting point sets, and the
//! scan machinery that evaluates them over growing prefixes.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod parallel;
pub mod sequence;
pub mod torus;

pub use error::{Error, Result};
pub use kernel::{Kernel, Kernel1D, KernelSpec, KernelTd};
pub use sequence::{PointSet, Provenance, SolverConfig, SolverMode};
