//! Parameter sweeps over synthetic datasets with per-evaluation timing.
//!
//! A sweep is described by a flat `key = value` file (`#` starts a comment):
//!
//! ```text
//! family   = blobs          # blobs | tree | manifold
//! variable = dim            # the parameter swept over
//! grid     = 16, 64, 256
//! methods  = dsmi, csmi     # any of dse, cse, dsmi, csmi
//! seeds    = 0, 1, 2
//! n = 300
//! k = 3
//! sigma = 10                # or "median"
//! ```
//!
//! Every `(grid value, seed)` pair generates one dataset, every method is
//! evaluated on it and timed, and the results come out in long format: one
//! row per grid value × method × seed.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::classic::{cse, csmi, BinningConfig};
use crate::cloud::PointCloud;
use crate::dsmi::{dsmi, DsmiConfig, SigmaPolicy};
use crate::error::{invalid, Error, Result};
use crate::kernel::{Bandwidth, KernelConfig};
use crate::spectrum::dse_of_cloud;
use crate::synth::{corrupt_labels, gen_blobs, gen_manifold, gen_tree, ManifoldDist, ManifoldSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Blobs,
    Tree,
    Manifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    Dse,
    Cse,
    Dsmi,
    Csmi,
}

impl SweepMethod {
    pub fn name(self) -> &'static str {
        match self {
            SweepMethod::Dse => "dse",
            SweepMethod::Cse => "cse",
            SweepMethod::Dsmi => "dsmi",
            SweepMethod::Csmi => "csmi",
        }
    }

    fn needs_labels(self) -> bool {
        matches!(self, SweepMethod::Dsmi | SweepMethod::Csmi)
    }
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    N,
    Dim,
    IntrinsicDim,
    K,
    Noise,
    Corruption,
    Separation,
    T,
    Sigma,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::Dim => "dim",
            SweepVariable::IntrinsicDim => "intrinsic_dim",
            SweepVariable::K => "k",
            SweepVariable::Noise => "noise",
            SweepVariable::Corruption => "corruption",
            SweepVariable::Separation => "separation",
            SweepVariable::T => "t",
            SweepVariable::Sigma => "sigma",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "n" => SweepVariable::N,
            "dim" => SweepVariable::Dim,
            "intrinsic_dim" => SweepVariable::IntrinsicDim,
            "k" => SweepVariable::K,
            "noise" => SweepVariable::Noise,
            "corruption" => SweepVariable::Corruption,
            "separation" => SweepVariable::Separation,
            "t" => SweepVariable::T,
            "sigma" => SweepVariable::Sigma,
            _ => return None,
        })
    }

    fn is_integer(self) -> bool {
        matches!(
            self,
            SweepVariable::N | SweepVariable::Dim | SweepVariable::IntrinsicDim | SweepVariable::K
        )
    }
}

/// A fully resolved sweep. Every field has a value; nothing is defaulted at
/// run time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub family: Family,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub methods: Vec<SweepMethod>,
    pub seeds: Vec<u64>,
    pub n: usize,
    /// Number of blobs or tree branches.
    pub k: usize,
    /// Ambient dimension.
    pub dim: usize,
    pub intrinsic_dim: usize,
    pub separation: f64,
    /// Noise std for blobs and trees; noise fraction for manifolds.
    pub noise: f64,
    pub dist: ManifoldDist,
    pub rotate: bool,
    /// Label corruption fraction applied before the MI methods.
    pub corruption: f64,
    pub t: f64,
    pub sigma: Bandwidth,
    pub repeats: usize,
    pub sigma_policy: SigmaPolicy,
    pub bins: usize,
}

const KEYS: &[&str] = &[
    "family",
    "variable",
    "grid",
    "methods",
    "seeds",
    "n",
    "k",
    "dim",
    "intrinsic_dim",
    "separation",
    "noise",
    "dist",
    "rotate",
    "corruption",
    "t",
    "sigma",
    "repeats",
    "sigma_policy",
    "bins",
];

fn parse_list<T>(line: usize, key: &str, value: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).ok_or_else(|| invalid(format!("line {line}: bad {key} entry '{s}'"))))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(invalid(format!("line {line}: {key} must not be empty")));
    }
    Ok(items)
}

fn parse_one<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(format!("line {line}: cannot parse {key} = '{value}'")))
}

fn parse_bandwidth(s: &str) -> Option<Bandwidth> {
    if s == "median" {
        Some(Bandwidth::MedianHeuristic)
    } else {
        s.parse().ok().map(Bandwidth::Fixed)
    }
}

impl SweepConfig {
    /// Parses a sweep file. Unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(&str, &str, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(invalid(format!("line {line}: unknown key '{key}'")));
            }
            if entries.iter().any(|(k, _, _)| *k == key) {
                return Err(invalid(format!("line {line}: duplicate key '{key}'")));
            }
            entries.push((key, value, line));
        }
        let get = |key: &str| entries.iter().find(|(k, _, _)| *k == key).map(|&(_, v, l)| (v, l));
        let required = |key: &str| get(key).ok_or_else(|| invalid(format!("missing required key '{key}'")));

        let (v, l) = required("family")?;
        let family = match v {
            "blobs" => Family::Blobs,
            "tree" => Family::Tree,
            "manifold" => Family::Manifold,
            _ => return Err(invalid(format!("line {l}: unknown family '{v}'"))),
        };
        let (v, l) = required("variable")?;
        let variable = SweepVariable::parse(v)
            .ok_or_else(|| invalid(format!("line {l}: unknown sweep variable '{v}'")))?;
        let (v, l) = required("grid")?;
        let grid = parse_list(l, "grid", v, |s| s.parse::<f64>().ok().filter(|x| x.is_finite()))?;
        if variable.is_integer() {
            if let Some(bad) = grid.iter().find(|x| x.fract() != 0.0 || **x < 0.0) {
                return Err(invalid(format!(
                    "line {l}: {} takes nonnegative integers, got {bad}",
                    variable.name()
                )));
            }
        }
        let methods = match get("methods") {
            Some((v, l)) => parse_list(l, "methods", v, |s| match s {
                "dse" => Some(SweepMethod::Dse),
                "cse" => Some(SweepMethod::Cse),
                "dsmi" => Some(SweepMethod::Dsmi),
                "csmi" => Some(SweepMethod::Csmi),
                _ => None,
            })?,
            None => vec![SweepMethod::Dse],
        };
        let seeds = match get("seeds") {
            Some((v, l)) => parse_list(l, "seeds", v, |s| s.parse().ok())?,
            None => vec![0],
        };
        let num = |key: &str, default: f64| -> Result<f64> {
            get(key).map_or(Ok(default), |(v, l)| parse_one(l, key, v))
        };
        let int = |key: &str, default: usize| -> Result<usize> {
            get(key).map_or(Ok(default), |(v, l)| parse_one(l, key, v))
        };
        let default_noise = match family {
            Family::Blobs => 1.0,
            Family::Tree => 0.1,
            Family::Manifold => 0.0,
        };
        let dist = match get("dist") {
            None | Some(("uniform", _)) => ManifoldDist::Uniform,
            Some(("gaussian", _)) => ManifoldDist::Gaussian,
            Some((v, l)) => return Err(invalid(format!("line {l}: unknown dist '{v}'"))),
        };
        let sigma = match get("sigma") {
            None => Bandwidth::MedianHeuristic,
            Some((v, l)) => parse_bandwidth(v)
                .ok_or_else(|| invalid(format!("line {l}: sigma must be 'median' or a number")))?,
        };
        let sigma_policy = match get("sigma_policy") {
            None | Some(("subset", _)) => SigmaPolicy::PerSubset,
            Some(("global", _)) => SigmaPolicy::Global,
            Some((v, l)) => return Err(invalid(format!("line {l}: unknown sigma_policy '{v}'"))),
        };
        let rotate = match get("rotate") {
            None => true,
            Some((v, l)) => parse_one(l, "rotate", v)?,
        };
        let config = SweepConfig {
            family,
            variable,
            grid,
            methods,
            seeds,
            n: int("n", 500)?,
            k: int("k", 3)?,
            dim: int("dim", 10)?,
            intrinsic_dim: int("intrinsic_dim", 2)?,
            separation: num("separation", 50.0)?,
            noise: num("noise", default_noise)?,
            dist,
            rotate,
            corruption: num("corruption", 0.0)?,
            t: num("t", 1.0)?,
            sigma,
            repeats: int("repeats", 5)?,
            sigma_policy,
            bins: int("bins", 2)?,
        };
        if family == Family::Manifold && config.methods.iter().any(|m| m.needs_labels()) {
            return Err(invalid("manifold datasets carry no labels; use dse or cse"));
        }
        Ok(config)
    }

    /// The configuration with the sweep variable set to `value`.
    fn at(&self, value: f64) -> Self {
        let mut c = self.clone();
        match self.variable {
            SweepVariable::N => c.n = value as usize,
            SweepVariable::Dim => c.dim = value as usize,
            SweepVariable::IntrinsicDim => c.intrinsic_dim = value as usize,
            SweepVariable::K => c.k = value as usize,
            SweepVariable::Noise => c.noise = value,
            SweepVariable::Corruption => c.corruption = value,
            SweepVariable::Separation => c.separation = value,
            SweepVariable::T => c.t = value,
            SweepVariable::Sigma => c.sigma = Bandwidth::Fixed(value),
        }
        c
    }

    fn dataset(&self, seed: u64) -> Result<PointCloud> {
        let cloud = match self.family {
            Family::Blobs => gen_blobs(self.n, self.k, self.dim, self.separation, self.noise, seed)?,
            Family::Tree => gen_tree(self.n, self.k, self.dim, self.noise, seed)?,
            Family::Manifold => {
                let spec = ManifoldSpec {
                    n: self.n,
                    intrinsic_dim: self.intrinsic_dim,
                    ambient_dim: self.dim,
                    dist: self.dist,
                    noise_level: self.noise,
                    rotate: self.rotate,
                };
                return gen_manifold(&spec, seed);
            }
        };
        if self.corruption > 0.0 {
            let labels = cloud.labels().expect("labelled family").to_vec();
            // Corruption draws are decoupled from the dataset draws.
            let corrupted = corrupt_labels(&labels, self.corruption, self.k, seed ^ 0x0C02_20B7)?;
            // Corruption can empty a class; keep the ids dense.
            let mut map = vec![usize::MAX; self.k];
            let mut next = 0;
            let dense: Vec<usize> = corrupted
                .iter()
                .map(|&l| {
                    if map[l] == usize::MAX {
                        map[l] = next;
                        next += 1;
                    }
                    map[l]
                })
                .collect();
            return cloud.relabel(dense);
        }
        Ok(cloud)
    }

    fn evaluate(&self, method: SweepMethod, cloud: &PointCloud, seed: u64) -> Result<f64> {
        let kernel = KernelConfig {
            bandwidth: self.sigma,
            ..KernelConfig::default()
        };
        let bins = BinningConfig {
            bins_per_dim: self.bins,
        };
        Ok(match method {
            SweepMethod::Dse => dse_of_cloud(cloud, &kernel, self.t)?.value,
            SweepMethod::Cse => cse(cloud, &bins)?.value,
            SweepMethod::Dsmi => {
                let config = DsmiConfig {
                    kernel,
                    t: self.t,
                    repeats: self.repeats,
                    seed,
                    sigma_policy: self.sigma_policy,
                };
                dsmi(cloud, &config)?.value
            }
            SweepMethod::Csmi => csmi(cloud, &bins)?.value,
        })
    }
}

/// One evaluation of one method on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub variable: &'static str,
    pub grid_value: f64,
    pub method: &'static str,
    pub seed: u64,
    pub value_bits: f64,
    pub runtime_ms: f64,
}

/// Runs every grid value × seed × method. Evaluations run one after another
/// so that their wall-clock times do not compete with each other.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &value in &config.grid {
        let point = config.at(value);
        for &seed in &config.seeds {
            let cloud = point.dataset(seed)?;
            for &method in &config.methods {
                let start = Instant::now();
                let value_bits = point.evaluate(method, &cloud, seed)?;
                let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                rows.push(SweepRow {
                    variable: config.variable.name(),
                    grid_value: value,
                    method: method.name(),
                    seed,
                    value_bits,
                    runtime_ms,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with header
/// `variable,grid_value,method,seed,value_bits,runtime_ms`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("cannot write sweep CSV: {e}"));
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("cannot write sweep CSV: {e}")))?;
    Ok(())
}
