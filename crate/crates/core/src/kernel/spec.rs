use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Kernel, Kernel1D, KernelTd};
use crate::error::{Error, Result};

/// Serializable kernel description, e.g.
/// `{"type":"fourier","coeffs":[[1,0.5],[2,0.125]]}` or
/// `{"type":"green","dim":3,"cutoff":16}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    Bernoulli2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Logsin {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Fourier {
        coeffs: Vec<(i64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Green { dim: usize, cutoff: usize },
}

impl KernelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Green { dim, .. } => *dim,
            _ => 1,
        }
    }

    pub fn build(&self) -> Result<Kernel> {
        let with_cutoff = |k: Kernel1D, c: &Option<usize>| match c {
            Some(c) => k.with_cutoff(*c),
            None => Ok(k),
        };
        Ok(match self {
            KernelSpec::Bernoulli2 { cutoff } => Kernel::OneD(with_cutoff(Kernel1D::bernoulli2(), cutoff)?),
            KernelSpec::Logsin { cutoff } => Kernel::OneD(with_cutoff(Kernel1D::log_sin(), cutoff)?),
            KernelSpec::Fourier { coeffs, cutoff } => Kernel::OneD(with_cutoff(
                Kernel1D::explicit_fourier(coeffs.iter().copied())?,
                cutoff,
            )?),
            KernelSpec::Green { dim, cutoff } => Kernel::Td(KernelTd::green(*dim, *cutoff)?),
        })
    }

    pub fn build_1d(&self) -> Result<Kernel1D> {
        match self.build()? {
            Kernel::OneD(k) => Ok(k),
            Kernel::Td(k) => Err(Error::DimensionMismatch { expected: 1, found: k.dim() }),
        }
    }
}
