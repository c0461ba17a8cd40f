use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth models `y ~ c g(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GrowthModel {
    /// `c log n`, fitted linearly.
    Log,
    /// `c n^alpha`, fitted in log space; `alpha` is fitted when absent.
    Power {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
    },
    /// `c sqrt(log n) / n`, fitted linearly.
    SqrtLogOverN,
    /// `c sqrt(log n) / sqrt(n)`, fitted linearly.
    SqrtLogOverSqrtN,
}

/// `log`, `power`, `power:<exponent>`, `sqrt_log_over_n` or
/// `sqrt_log_over_sqrt_n`.
impl std::str::FromStr for GrowthModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "log" => GrowthModel::Log,
            "power" => GrowthModel::Power { exponent: None },
            "sqrt_log_over_n" => GrowthModel::SqrtLogOverN,
            "sqrt_log_over_sqrt_n" => GrowthModel::SqrtLogOverSqrtN,
            _ => match s.strip_prefix("power:").map(str::parse::<f64>) {
                Some(Ok(a)) if a.is_finite() => GrowthModel::Power { exponent: Some(a) },
                _ => return Err(Error::Parse(format!("unknown growth model `{s}`"))),
            },
        })
    }
}

impl GrowthModel {
    /// Shape `g(n)` for a given exponent.
    fn shape(&self, n: f64, alpha: f64) -> f64 {
        match self {
            GrowthModel::Log => n.ln(),
            GrowthModel::Power { .. } => n.powf(alpha),
            GrowthModel::SqrtLogOverN => n.ln().sqrt() / n,
            GrowthModel::SqrtLogOverSqrtN => (n.ln() / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: GrowthModel,
    pub c: f64,
    /// Exponent used (fitted or fixed) for power models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Checkpoints used (those where the model and the data are usable).
    pub n: Vec<usize>,
    /// `y / g(n)` at each used checkpoint.
    pub ratios: Vec<f64>,
    /// Residuals in the space of the fit: `log y - log(c g)` for power
    /// models, `y - c g` otherwise.
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
}

impl Fit {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Least-squares fit of `y ~ c g(n)`.
pub fn fit_growth(model: GrowthModel, n: &[usize], y: &[f64]) -> Result<Fit> {
    if n.len() != y.len() {
        return Err(Error::config("fit: length mismatch"));
    }
    let power = matches!(model, GrowthModel::Power { .. });
    // Log space needs y > 0; log-type shapes vanish at n = 1.
    let (ns, ys): (Vec<f64>, Vec<f64>) = n
        .iter()
        .zip(y)
        .map(|(&n, &y)| (n as f64, y))
        .filter(|&(n, y)| y.is_finite() && n >= 1.0 && (!power || y > 0.0) && (power || n > 1.0))
        .unzip();
    let free = matches!(model, GrowthModel::Power { exponent: None });
    if ns.len() < if free { 2 } else { 1 } {
        return Err(Error::InvalidConfig(format!("fit: too few usable points ({})", ns.len())));
    }
    let (c, alpha) = match model {
        GrowthModel::Power { exponent } => {
            let lx: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
            let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
            let m = lx.len() as f64;
            let alpha = match exponent {
                Some(a) => a,
                None => {
                    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
                    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
                    if sxx == 0.0 {
                        return Err(Error::config("fit: exponent needs two distinct checkpoints"));
                    }
                    lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx
                }
            };
            let logc = lx.iter().zip(&ly).map(|(x, y)| y - alpha * x).sum::<f64>() / m;
            (logc.exp(), alpha)
        }
        _ => {
            let g: Vec<f64> = ns.iter().map(|&v| model.shape(v, 0.0)).collect();
            let c = g.iter().zip(&ys).map(|(g, y)| g * y).sum::<f64>() / g.iter().map(|g| g * g).sum::<f64>();
            (c, 0.0)
        }
    };
    let ratios: Vec<f64> = ns.iter().zip(&ys).map(|(&v, &y)| y / model.shape(v, alpha)).collect();
    let residuals: Vec<f64> = ns
        .iter()
        .zip(&ys)
        .map(|(&v, &y)| {
            let pred = c * model.shape(v, alpha);
            if power {
                y.ln() - pred.ln()
            } else {
                y - pred
            }
        })
        .collect();
    let rms_residual = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(Fit {
        model,
        c,
        exponent: power.then_some(alpha),
        n: ns.iter().map(|&v| v as usize).collect(),
        ratios,
        residuals,
        rms_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_models() {
        assert_eq!("log".parse::<GrowthModel>().unwrap(), GrowthModel::Log);
        assert_eq!("power".parse::<GrowthModel>().unwrap(), GrowthModel::Power { exponent: None });
        assert_eq!("power:-0.5".parse::<GrowthModel>().unwrap(), GrowthModel::Power { exponent: Some(-0.5) });
        assert_eq!("sqrt_log_over_n".parse::<GrowthModel>().unwrap(), GrowthModel::SqrtLogOverN);
        assert!("power:x".parse::<GrowthModel>().is_err());
        assert!("cubic".parse::<GrowthModel>().is_err());
    }

    #[test]
    fn recovers_exact_models() {
        let n = [32usize, 64, 128, 256, 512];
        let y: Vec<f64> = n.iter().map(|&v| 3.0 * (v as f64).powf(-0.5)).collect();
        let f = fit_growth(GrowthModel::Power { exponent: None }, &n, &y).unwrap();
        assert!((f.c - 3.0).abs() < 1e-12 && (f.exponent.unwrap() + 0.5).abs() < 1e-12);
        assert!(f.rms_residual < 1e-12);
        let f = fit_growth(GrowthModel::Power { exponent: Some(-0.5) }, &n, &y).unwrap();
        assert!((f.c - 3.0).abs() < 1e-12);
        let y: Vec<f64> = n.iter().map(|&v| 0.7 * (v as f64).ln()).collect();
        let f = fit_growth(GrowthModel::Log, &n, &y).unwrap();
        assert!((f.c - 0.7).abs() < 1e-12);
        let y: Vec<f64> = n.iter().map(|&v| 2.0 * (v as f64).ln().sqrt() / v as f64).collect();
        let f = fit_growth(GrowthModel::SqrtLogOverN, &n, &y).unwrap();
        assert!((f.c - 2.0).abs() < 1e-12);
        assert!((f.max_ratio() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn skips_unusable_points() {
        let f = fit_growth(GrowthModel::Log, &[1, 2, 4], &[5.0, 2.0f64.ln(), 4.0f64.ln()]).unwrap();
        assert_eq!(f.n, vec![2, 4]);
        assert!(fit_growth(GrowthModel::Power { exponent: None }, &[4], &[1.0]).is_err());
        assert!(fit_growth(GrowthModel::Log, &[1, 2], &[1.0]).is_err());
    }

    #[test]
    fn serde_shape() {
        let m: GrowthModel = serde_json::from_str(r#"{"model":"power","exponent":-0.5}"#).unwrap();
        assert_eq!(m, GrowthModel::Power { exponent: Some(-0.5) });
        let m: GrowthModel = serde_json::from_str(r#"{"model":"log"}"#).unwrap();
        assert_eq!(m, GrowthModel::Log);
    }

    proptest! {
        #[test]
        fn scaling_data_scales_constant(k in 0.1f64..10.0) {
            let n = [8usize, 16, 32, 64];
            let y = [0.3, 0.25, 0.19, 0.14];
            let ky: Vec<f64> = y.iter().map(|v| v * k).collect();
            for m in [GrowthModel::Log, GrowthModel::Power { exponent: None }, GrowthModel::SqrtLogOverN] {
                let a = fit_growth(m, &n, &y).unwrap();
                let b = fit_growth(m, &n, &ky).unwrap();
                prop_assert!((b.c / a.c - k).abs() < 1e-9 * k);
            }
        }
    }
}
