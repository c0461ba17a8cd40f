//! Admissible kernels: even, mean-zero, positive-definite functions on the
//! circle and on flat tori.

mod spec;
mod td;

pub use spec::KernelSpec;
pub use td::{half_window, Amplitude, KernelTd};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::wrap;

/// A kernel of either dimension.
#[derive(Debug, Clone)]
pub enum Kernel {
    OneD(Kernel1D),
    Td(KernelTd),
}

impl Kernel {
    pub fn dim(&self) -> usize {
        match self {
            Kernel::OneD(_) => 1,
            Kernel::Td(k) => k.dim(),
        }
    }

    /// Serializable description, when one exists (custom amplitude rules
    /// have none).
    pub fn spec(&self) -> Option<KernelSpec> {
        match self {
            Kernel::OneD(k) => Some(k.spec()),
            Kernel::Td(k) => k.is_green().then(|| KernelSpec::Green { dim: k.dim(), cutoff: k.cutoff() }),
        }
    }

    /// Short human-readable identifier.
    pub fn id(&self) -> String {
        match self {
            Kernel::OneD(k) => k.name().to_string(),
            Kernel::Td(k) if k.is_green() => format!("green(d={},K={})", k.dim(), k.cutoff()),
            Kernel::Td(k) => format!("torus(d={},K={})", k.dim(), k.cutoff()),
        }
    }
}

impl From<Kernel1D> for Kernel {
    fn from(k: Kernel1D) -> Self {
        Kernel::OneD(k)
    }
}

impl From<KernelTd> for Kernel {
    fn from(k: KernelTd) -> Self {
        Kernel::Td(k)
    }
}

/// Default spectral cutoff for the closed-form kernels.
pub const DEFAULT_CUTOFF: usize = 10_000;

/// Relative slack used when certifying `hat f(k) >= c / k^2`, so that
/// `c = hat f(k) k^2` computed in floating point certifies itself.
const CERTIFY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    /// `x^2 - x + 1/6` on `[0, 1)`.
    Bernoulli2,
    /// `-log(2 sin(pi |x|))`, integrable but unbounded at 0.
    LogSin,
    /// Cosine series with explicitly given coefficients.
    ExplicitFourier,
}

/// A kernel on the circle `T = [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D {
    variant: KernelVariant,
    /// `hat f(k)` for `k >= 1`; negative frequencies follow by evenness.
    coeffs: BTreeMap<u64, f64>,
    cutoff: usize,
    certified_c: Option<f64>,
}

/// Outcome of [`Kernel1D::verify_admissibility`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub holds: bool,
    pub requested_c: f64,
    /// `min_{1 <= k <= k_max} hat f(k) k^2`.
    pub largest_c: f64,
    pub k_max: u64,
}

impl Kernel1D {
    pub fn bernoulli2() -> Self {
        Self {
            variant: KernelVariant::Bernoulli2,
            coeffs: BTreeMap::new(),
            cutoff: DEFAULT_CUTOFF,
            certified_c: Some(1.0 / (2.0 * PI * PI)),
        }
    }

    pub fn log_sin() -> Self {
        Self {
            variant: KernelVariant::LogSin,
            coeffs: BTreeMap::new(),
            cutoff: DEFAULT_CUTOFF,
            certified_c: Some(0.5),
        }
    }

    /// Builds a cosine-series kernel from `(k, hat f(k))` pairs.
    ///
    /// Negative `k` are folded onto `|k|`; a pair `k, -k` with different
    /// values is rejected, as are `k = 0` and nonpositive coefficients.
    /// The cutoff defaults to the largest stored frequency.
    pub fn explicit_fourier<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, v) in pairs {
            if k == 0 {
                return Err(Error::InvalidKernel(
                    "coefficient at k = 0 (kernels are mean zero)".into(),
                ));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidKernel(format!(
                    "coefficient at k = {k} must be positive and finite, got {v}"
                )));
            }
            let key = k.unsigned_abs();
            if let Some(prev) = coeffs.insert(key, v) {
                if prev != v {
                    return Err(Error::InvalidKernel(format!(
                        "coefficients at k = {key} and k = -{key} differ ({prev} vs {v})"
                    )));
                }
            }
        }
        let cutoff = coeffs.keys().next_back().copied().unwrap_or(0) as usize;
        if cutoff == 0 {
            return Err(Error::InvalidKernel("no coefficients given".into()));
        }
        Ok(Self {
            variant: KernelVariant::ExplicitFourier,
            coeffs,
            cutoff,
            certified_c: None,
        })
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidKernel("cutoff must be positive".into()));
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn spec(&self) -> KernelSpec {
        let cutoff = (self.cutoff != DEFAULT_CUTOFF).then_some(self.cutoff);
        match self.variant {
            KernelVariant::Bernoulli2 => KernelSpec::Bernoulli2 { cutoff },
            KernelVariant::LogSin => KernelSpec::Logsin { cutoff },
            KernelVariant::ExplicitFourier => KernelSpec::Fourier {
                coeffs: self.coeffs.iter().map(|(&k, &v)| (k as i64, v)).collect(),
                cutoff: Some(self.cutoff),
            },
        }
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            KernelVariant::Bernoulli2 => "bernoulli2",
            KernelVariant::LogSin => "logsin",
            KernelVariant::ExplicitFourier => "fourier",
        }
    }

    /// Stored positive-frequency coefficients (empty for closed-form kernels).
    pub fn coefficients(&self) -> &BTreeMap<u64, f64> {
        &self.coeffs
    }

    pub fn satisfies_c_over_k2(&self) -> bool {
        self.certified_c.is_some()
    }

    pub fn certified_c(&self) -> Option<f64> {
        self.certified_c
    }

    /// `f(x)` for `x` taken mod 1.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = wrap(x);
        match self.variant {
            KernelVariant::Bernoulli2 => Ok(bernoulli2(x)),
            KernelVariant::LogSin => {
                if x == 0.0 {
                    Err(Error::SingularEvaluation)
                } else {
                    Ok(log_sin(x))
                }
            }
            KernelVariant::ExplicitFourier => Ok(self.eval_series(x)),
        }
    }

    /// Like [`eval`](Self::eval) but maps the LogSin singularity to `+inf`.
    #[inline]
    pub fn eval_or_inf(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(f64::INFINITY)
    }

    fn eval_series(&self, x: f64) -> f64 {
        let cutoff = self.cutoff as u64;
        let mut s = 0.0;
        for (&k, &c) in self.coeffs.range(1..=cutoff) {
            s += c * (2.0 * PI * wrap(k as f64 * x)).cos();
        }
        2.0 * s
    }

    /// `hat f(k)`.
    pub fn fourier_coefficient(&self, k: i64) -> Result<f64> {
        if k == 0 {
            return Err(Error::MeanValueFrequency);
        }
        let k = k.unsigned_abs();
        Ok(self.coefficient_unchecked(k))
    }

    #[inline]
    pub(crate) fn coefficient_unchecked(&self, k: u64) -> f64 {
        let kf = k as f64;
        match self.variant {
            KernelVariant::Bernoulli2 => 1.0 / (2.0 * PI * PI * kf * kf),
            KernelVariant::LogSin => 1.0 / (2.0 * kf),
            KernelVariant::ExplicitFourier => self.coeffs.get(&k).copied().unwrap_or(0.0),
        }
    }

    /// `f(0) = sum_k hat f(k)`; `None` when infinite (LogSin).
    ///
    /// For explicit series this is the truncated value at the cutoff.
    pub fn value_at_zero(&self) -> Option<f64> {
        match self.variant {
            KernelVariant::Bernoulli2 => Some(1.0 / 6.0),
            KernelVariant::LogSin => None,
            KernelVariant::ExplicitFourier => Some(self.eval_series(0.0)),
        }
    }

    /// Upper bound on `sum_{|k| > cutoff} hat f(k)` (both signs), i.e. the
    /// truncation error of a cosine-series evaluation at the cutoff.
    pub fn truncation_tail(&self) -> f64 {
        self.coefficient_tail(self.cutoff)
    }

    /// Upper bound on `sum_{|k| > k_max} hat f(k)`.
    pub fn coefficient_tail(&self, k_max: usize) -> f64 {
        match self.variant {
            // sum_{k > K} 1/k^2 < 1/K
            KernelVariant::Bernoulli2 => {
                if k_max == 0 {
                    1.0 / 6.0
                } else {
                    1.0 / (PI * PI * k_max as f64)
                }
            }
            KernelVariant::LogSin => f64::INFINITY,
            KernelVariant::ExplicitFourier => {
                2.0 * self
                    .coeffs
                    .range((k_max as u64 + 1)..)
                    .map(|(_, &c)| c)
                    .sum::<f64>()
            }
        }
    }

    /// Upper bound on `sum_{|k| > k_max} 4 pi^2 k^2 hat f(k)^2`, the tail of
    /// the squared derivative norm of a single translate.
    pub fn derivative_tail(&self, k_max: usize) -> f64 {
        match self.variant {
            // 4 pi^2 k^2 / (4 pi^4 k^4) = 1 / (pi^2 k^2)
            KernelVariant::Bernoulli2 => {
                if k_max == 0 {
                    1.0 / 3.0
                } else {
                    2.0 / (PI * PI * k_max as f64)
                }
            }
            KernelVariant::LogSin => f64::INFINITY,
            KernelVariant::ExplicitFourier => {
                2.0 * self
                    .coeffs
                    .range((k_max as u64 + 1)..)
                    .map(|(&k, &c)| 4.0 * PI * PI * (k as f64).powi(2) * c * c)
                    .sum::<f64>()
            }
        }
    }

    /// Checks `hat f(k) >= c k^{-2}` for `1 <= k <= k_max`.
    pub fn verify_admissibility(&self, c: f64, k_max: u64) -> AdmissibilityReport {
        let largest_c = (1..=k_max.max(1))
            .map(|k| self.coefficient_unchecked(k) * (k as f64).powi(2))
            .fold(f64::INFINITY, f64::min);
        AdmissibilityReport {
            holds: c > 0.0 && largest_c >= c * (1.0 - CERTIFY_RTOL),
            requested_c: c,
            largest_c,
            k_max,
        }
    }

    /// Runs [`verify_admissibility`](Self::verify_admissibility) and records
    /// `c` on success.
    pub fn certify(mut self, c: f64, k_max: u64) -> (Self, AdmissibilityReport) {
        let report = self.verify_admissibility(c, k_max);
        if report.holds {
            self.certified_c = Some(c);
        }
        (self, report)
    }

    /// `(c1, c2)` with `c1 / k^2 <= hat f(k) <= c2 / k^2` for every `k != 0`,
    /// if such bounds are known.
    pub fn two_sided_bounds(&self) -> Option<(f64, f64)> {
        match self.variant {
            KernelVariant::Bernoulli2 => {
                let c = 1.0 / (2.0 * PI * PI);
                Some((c, c))
            }
            // 1/(2k) is not O(k^-2); a finite series is not bounded below.
            KernelVariant::LogSin | KernelVariant::ExplicitFourier => None,
        }
    }
}

/// `B_2` on `[0, 1)`; callers reduce the argument first.
#[inline]
pub fn bernoulli2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

#[inline]
fn log_sin(x: f64) -> f64 {
    let t = x.min(1.0 - x);
    -(2.0 * (PI * t).sin()).ln()
}
