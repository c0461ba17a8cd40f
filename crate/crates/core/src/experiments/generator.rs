use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelSpec};
use crate::sequence::{greedy_extend_traced, kronecker, random_points, van_der_corput, PointSet, Provenance, SolverConfig};
use crate::torus::parse_coordinate;

/// A reproducible source of points: a greedy run or a classical baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Greedy {
        kernel: KernelSpec,
        /// Seed coordinates, flattened with stride `dim`; rationals allowed.
        seed: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        solver: Option<SolverConfig>,
    },
    Kronecker {
        /// `sqrt2`, `golden`, `sqrt(p)`, or a number.
        alpha: String,
    },
    VanDerCorput {
        base: u64,
    },
    Random {
        seed: u64,
        #[serde(default = "one")]
        dim: usize,
    },
}

fn one() -> usize {
    1
}

/// Output of [`GeneratorSpec::generate`]: the points and, for greedy runs,
/// the potential at each appended point.
#[derive(Debug, Clone)]
pub struct Generated {
    pub points: PointSet,
    pub gate_values: Vec<f64>,
}

pub fn parse_alpha(literal: &str) -> Result<f64> {
    let s = literal.trim();
    let v = match s {
        "sqrt2" => 2f64.sqrt(),
        "golden" => (5f64.sqrt() - 1.0) / 2.0,
        _ => {
            if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
                let p: f64 = inner.trim().parse().map_err(|_| Error::Parse(format!("bad alpha `{literal}`")))?;
                p.sqrt()
            } else {
                parse_coordinate(s).ok_or_else(|| Error::Parse(format!("bad alpha `{literal}`")))?
            }
        }
    };
    if !v.is_finite() {
        return Err(Error::Parse(format!("bad alpha `{literal}`")));
    }
    Ok(v)
}

/// Parses a comma-separated seed list; each entry is a decimal or `p/q`.
pub fn parse_seed_list(list: &str) -> Result<Vec<String>> {
    let items: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::config("empty seed list"));
    }
    for s in &items {
        parse_coordinate(s).ok_or_else(|| Error::Parse(format!("bad seed coordinate `{s}`")))?;
    }
    Ok(items)
}

impl GeneratorSpec {
    pub fn greedy(kernel: KernelSpec, seed: &[&str]) -> Self {
        GeneratorSpec::Greedy { kernel, seed: seed.iter().map(|s| s.to_string()).collect(), solver: None }
    }

    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::Greedy { kernel, .. } => kernel.dim(),
            GeneratorSpec::Random { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// The kernel a greedy generator runs with.
    pub fn kernel(&self) -> Option<&KernelSpec> {
        match self {
            GeneratorSpec::Greedy { kernel, .. } => Some(kernel),
            _ => None,
        }
    }

    /// The first `n` points, seeds included.
    pub fn generate(&self, n: usize) -> Result<Generated> {
        match self {
            GeneratorSpec::Greedy { kernel, seed, solver } => {
                let kernel = kernel.build()?;
                let config = solver.unwrap_or_else(|| SolverConfig::default_for(&kernel));
                let seeds = seed_points(&kernel, seed, &config)?;
                if n < seeds.len() {
                    return Err(Error::InvalidConfig(format!(
                        "n = {n} is smaller than the {} seed points",
                        seeds.len()
                    )));
                }
                let trace = greedy_extend_traced(&seeds, &kernel, &config, n - seeds.len())?;
                Ok(Generated { points: trace.points, gate_values: trace.gate_values })
            }
            GeneratorSpec::Kronecker { alpha } => {
                Ok(Generated { points: kronecker(parse_alpha(alpha)?, n), gate_values: Vec::new() })
            }
            GeneratorSpec::VanDerCorput { base } => {
                Ok(Generated { points: van_der_corput(*base, n)?, gate_values: Vec::new() })
            }
            GeneratorSpec::Random { seed, dim } => {
                Ok(Generated { points: random_points(*seed, n, *dim)?, gate_values: Vec::new() })
            }
        }
    }
}

/// Seed block with a greedy provenance that records the literals.
fn seed_points(kernel: &Kernel, literals: &[String], config: &SolverConfig) -> Result<PointSet> {
    let coords = literals
        .iter()
        .map(|s| parse_coordinate(s).ok_or_else(|| Error::Parse(format!("bad seed coordinate `{s}`"))))
        .collect::<Result<Vec<f64>>>()?;
    let d = kernel.dim();
    if coords.is_empty() || coords.len() % d != 0 {
        return Err(Error::InvalidConfig(format!(
            "{} seed coordinates do not form points of dimension {d}",
            coords.len()
        )));
    }
    let provenance = Provenance::Greedy {
        kernel: kernel.id(),
        kernel_spec: kernel.spec(),
        seed_literals: literals.to_vec(),
        seed_points: coords.iter().map(|&c| crate::torus::wrap(c)).collect(),
        solver: *config,
    };
    PointSet::new(d, coords, provenance)
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Greedy { kernel, seed, .. } => {
                let k = match kernel {
                    KernelSpec::Bernoulli2 { .. } => "bernoulli2".to_string(),
                    KernelSpec::Logsin { .. } => "logsin".to_string(),
                    KernelSpec::Fourier { .. } => "fourier".to_string(),
                    KernelSpec::Green { dim, .. } => format!("green{dim}"),
                };
                write!(f, "greedy:{k}:{}", seed.join(","))
            }
            GeneratorSpec::Kronecker { alpha } => write!(f, "kronecker:{alpha}"),
            GeneratorSpec::VanDerCorput { base } => write!(f, "vdc:{base}"),
            GeneratorSpec::Random { seed, dim: 1 } => write!(f, "random:{seed}"),
            GeneratorSpec::Random { seed, dim } => write!(f, "random:{seed}:{dim}"),
        }
    }
}

/// Short forms `greedy:<kernel>:<seeds>`, `kronecker:<alpha>`, `vdc:<base>`,
/// `random:<seed>[:<dim>]`, or a JSON object. Kernels: `bernoulli2`,
/// `logsin`, `green2` (K = 32), `green3` (K = 16).
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(format!("generator JSON: {e}")));
        }
        let bad = || Error::Parse(format!("unrecognized generator `{s}`"));
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().ok_or_else(bad)?;
        let arg = parts.next().ok_or_else(bad)?;
        let rest = parts.next();
        match kind {
            "greedy" => {
                let kernel = match arg {
                    "bernoulli2" => KernelSpec::Bernoulli2 { cutoff: None },
                    "logsin" => KernelSpec::Logsin { cutoff: None },
                    "green2" => KernelSpec::Green { dim: 2, cutoff: 32 },
                    "green3" => KernelSpec::Green { dim: 3, cutoff: 16 },
                    _ => return Err(Error::Parse(format!("unknown kernel `{arg}` in `{s}`"))),
                };
                let seed = parse_seed_list(rest.ok_or_else(bad)?)?;
                Ok(GeneratorSpec::Greedy { kernel, seed, solver: None })
            }
            "kronecker" if rest.is_none() => {
                parse_alpha(arg)?;
                Ok(GeneratorSpec::Kronecker { alpha: arg.to_string() })
            }
            "vdc" if rest.is_none() => Ok(GeneratorSpec::VanDerCorput { base: arg.parse().map_err(|_| bad())? }),
            "random" => Ok(GeneratorSpec::Random {
                seed: arg.parse().map_err(|_| bad())?,
                dim: rest.map(|d| d.parse()).transpose().map_err(|_| bad())?.unwrap_or(1),
            }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms_round_trip() {
        for s in ["greedy:bernoulli2:1/3,4/5", "kronecker:sqrt2", "vdc:3", "random:7", "random:7:2", "greedy:green3:0.5,0.5,0.5"] {
            let g: GeneratorSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("greedy:bernoulli2".parse::<GeneratorSpec>().is_err());
        assert!("kronecker:pi".parse::<GeneratorSpec>().is_err());
        assert!("vdc:x".parse::<GeneratorSpec>().is_err());
        assert!("greedy:bernoulli2:1/0".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn json_form() {
        let g: GeneratorSpec = r#"{"type":"greedy","kernel":{"type":"bernoulli2"},"seed":["1/3","4/5"]}"#.parse().unwrap();
        assert_eq!(g, "greedy:bernoulli2:1/3,4/5".parse().unwrap());
        let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn greedy_counts_seeds() {
        let g: GeneratorSpec = "greedy:bernoulli2:1/3,4/5".parse().unwrap();
        let out = g.generate(8).unwrap();
        assert_eq!(out.points.len(), 8);
        assert_eq!(out.gate_values.len(), 6);
        assert!((out.points.coords()[2] - 1.0 / 15.0).abs() < 1e-15);
        match out.points.provenance() {
            Provenance::Greedy { seed_literals, .. } => assert_eq!(seed_literals, &["1/3", "4/5"]),
            p => panic!("{p:?}"),
        }
        assert!(g.generate(1).is_err());
    }

    #[test]
    fn seed_dimension_checked() {
        let g: GeneratorSpec = "greedy:green3:0.5,0.5".parse().unwrap();
        assert!(g.generate(4).is_err());
    }

    #[test]
    fn alphas() {
        assert_eq!(parse_alpha("sqrt2").unwrap(), 2f64.sqrt());
        assert_eq!(parse_alpha("sqrt(3)").unwrap(), 3f64.sqrt());
        assert_eq!(parse_alpha("1/3").unwrap(), 1.0 / 3.0);
    }
}
