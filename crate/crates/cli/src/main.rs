//! `diffspec`: diffusion spectral entropy and mutual information from the
//! command line.
//!
//! Exit codes: 0 success, 1 a claim check failed, 2 input error, 3 numerical
//! failure.

mod cloudfile;
mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use diffspec::classic::{cse, csmi, BinningConfig};
use diffspec::dsmi::{dsmi, dsmi_with_input, DsmiConfig, SigmaPolicy};
use diffspec::harness::{ablation_entropies, run_all_claims, run_claim, write_claims_csv};
use diffspec::kernel::{Bandwidth, KernelConfig, DEFAULT_MAX_POINTS};
use diffspec::spectrum::{dse, dse_with_spectrum, eigenvalues_symmetric};
use diffspec::sweep::{run_sweep, write_sweep_csv, SweepConfig};
use diffspec::synth::{
    corrupt_labels, gen_blobs, gen_manifold, gen_psd_identity_mix, gen_tree, ManifoldDist, ManifoldSpec,
};
use diffspec::PointCloud;

use cloudfile::{densify, read_cloud, write_cloud, CloudFile};
use report::{EigenvalueSummary, LabelProvenance, Report};

#[derive(Parser)]
#[command(name = "diffspec", version, about = "Diffusion spectral entropy and mutual information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_sigma(s: &str) -> std::result::Result<Bandwidth, String> {
    if s == "median" {
        return Ok(Bandwidth::MedianHeuristic);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Bandwidth::Fixed(v)),
        _ => Err(format!("expected 'median' or a positive number, got '{s}'")),
    }
}

#[derive(Args)]
struct KernelArgs {
    /// Diffusion time.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Gaussian bandwidth in squared-distance units, or "median".
    #[arg(long, default_value = "median", value_parser = parse_sigma)]
    sigma: Bandwidth,
    /// Largest accepted number of points.
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
}

impl KernelArgs {
    fn config(&self) -> KernelConfig {
        KernelConfig {
            bandwidth: self.sigma,
            max_points: self.max_points,
            ..KernelConfig::default()
        }
    }

    fn sigma_source(&self) -> &'static str {
        match self.sigma {
            Bandwidth::MedianHeuristic => "median",
            Bandwidth::Fixed(_) => "fixed",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Subset,
    Global,
}

#[derive(Args)]
struct MiArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Subsamples averaged for each unconditional entropy.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resolve the median bandwidth per subset or once on the full cloud.
    #[arg(long, value_enum, default_value = "subset")]
    sigma_policy: PolicyArg,
}

impl MiArgs {
    fn config(&self) -> DsmiConfig {
        DsmiConfig {
            kernel: self.kernel.config(),
            t: self.kernel.t,
            repeats: self.repeats,
            seed: self.seed,
            sigma_policy: match self.sigma_policy {
                PolicyArg::Subset => SigmaPolicy::PerSubset,
                PolicyArg::Global => SigmaPolicy::Global,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Blobs,
    Tree,
    UniformManifold,
    GaussianManifold,
    PsdIdentityMix,
}

#[derive(Subcommand)]
enum Command {
    /// Diffusion spectral entropy of a point file.
    Dse {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Treat the input as a symmetric operator and use its eigenvalues
        /// directly, without building a kernel.
        #[arg(long)]
        matrix: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Diffusion spectral mutual information between points and their labels.
    Dsmi {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        mi: MiArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// DSMI between a representation and spectral clusters of an input.
    DsmiInput {
        /// The representation whose information is measured.
        #[arg(long)]
        repr: PathBuf,
        /// The points that are clustered to produce labels.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        clusters: usize,
        #[command(flatten)]
        mi: MiArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Binned Shannon entropy.
    Cse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        bins: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Binned Shannon mutual information against labels.
    Csmi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        bins: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// DSE next to the DMEE, k-NN and Gaussian-affinity variants.
    Ablation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = diffspec::harness::DEFAULT_KNN_K)]
        knn_k: usize,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Writes a synthetic dataset as a point file.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 300)]
        n: usize,
        /// Blobs or branches.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Ambient dimension.
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        intrinsic_dim: usize,
        #[arg(long, default_value_t = 50.0)]
        separation: f64,
        /// Noise std (blobs, tree) or noise fraction (manifolds).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Keep manifold samples axis-aligned.
        #[arg(long)]
        no_rotate: bool,
        /// Fraction of labels to corrupt.
        #[arg(long, default_value_t = 0.0)]
        corruption: f64,
        /// Identity weight of the PSD mix.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs a sweep file and writes long-format CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the claim checks and writes the summary CSV.
    Claims {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single claim by id.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: &Option<PathBuf>) -> Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn labelled_cloud(file: CloudFile, path: &Path) -> Result<(PointCloud, Vec<u64>)> {
    let Some(raw) = file.labels else {
        bail!("{} has no label column", path.display());
    };
    let (ids, values) = densify(&raw);
    Ok((PointCloud::with_labels(file.points, ids)?, values))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Dse {
            input,
            kernel,
            matrix,
            output,
        } => {
            let file = read_cloud(&input, kernel.max_points)?;
            let (n, d) = (file.n(), file.dim());
            let mut report = if matrix {
                let spectrum = eigenvalues_symmetric(&file.points)?;
                let value = dse(&spectrum, kernel.t)?.value;
                let mut r = Report::new("dse", value, n, d);
                r.eigenvalue_summary = Some(EigenvalueSummary::of(&spectrum));
                r
            } else {
                let cloud = PointCloud::new(file.points)?;
                let (entropy, spectrum) = dse_with_spectrum(&cloud, &kernel.config(), kernel.t)?;
                let mut r = Report::new("dse", entropy.value, n, d);
                r.sigma = entropy.sigma;
                r.sigma_source = Some(kernel.sigma_source());
                r.alpha = Some(diffspec::kernel::STANDARD_ALPHA);
                r.eigenvalue_summary = Some(EigenvalueSummary::of(&spectrum));
                r
            };
            report.t = Some(kernel.t);
            write_json(&report, &output)?;
        }
        Command::Dsmi { input, mi, output } => {
            let file = read_cloud(&input, mi.kernel.max_points)?;
            let (n, d) = (file.n(), file.dim());
            let (cloud, values) = labelled_cloud(file, &input)?;
            let result = dsmi(&cloud, &mi.config())?;
            let mut report = Report::from_mi("dsmi", result, values, n, d);
            report.sigma_source = Some(mi.kernel.sigma_source());
            report.alpha = Some(diffspec::kernel::STANDARD_ALPHA);
            report.seed = Some(mi.seed);
            report.labels = Some(LabelProvenance {
                source: "file",
                clusters: None,
            });
            write_json(&report, &output)?;
        }
        Command::DsmiInput {
            repr,
            input,
            clusters,
            mi,
            output,
        } => {
            let rep = read_cloud(&repr, mi.kernel.max_points)?;
            let inp = read_cloud(&input, mi.kernel.max_points)?;
            if rep.n() != inp.n() {
                bail!(
                    "{} has {} rows but {} has {}",
                    repr.display(),
                    rep.n(),
                    input.display(),
                    inp.n()
                );
            }
            let (n, d) = (rep.n(), rep.dim());
            let rep = PointCloud::new(rep.points)?;
            let inp = PointCloud::new(inp.points)?;
            let result = dsmi_with_input(&rep, &inp, clusters, &mi.config())?;
            let values = (0..result.class_sizes.len() as u64).collect();
            let mut report = Report::from_mi("dsmi", result, values, n, d);
            report.sigma_source = Some(mi.kernel.sigma_source());
            report.alpha = Some(diffspec::kernel::STANDARD_ALPHA);
            report.seed = Some(mi.seed);
            report.labels = Some(LabelProvenance {
                source: "clustering",
                clusters: Some(clusters),
            });
            write_json(&report, &output)?;
        }
        Command::Cse {
            input,
            bins,
            max_points,
            output,
        } => {
            let file = read_cloud(&input, max_points)?;
            let (n, d) = (file.n(), file.dim());
            let value = cse(&PointCloud::new(file.points)?, &BinningConfig { bins_per_dim: bins })?.value;
            let mut report = Report::new("cse", value, n, d);
            report.bins_per_dim = Some(bins);
            write_json(&report, &output)?;
        }
        Command::Csmi {
            input,
            bins,
            max_points,
            output,
        } => {
            let file = read_cloud(&input, max_points)?;
            let (n, d) = (file.n(), file.dim());
            let (cloud, values) = labelled_cloud(file, &input)?;
            let result = csmi(&cloud, &BinningConfig { bins_per_dim: bins })?;
            let mut report = Report::from_mi("csmi", result, values, n, d);
            report.bins_per_dim = Some(bins);
            report.labels = Some(LabelProvenance {
                source: "file",
                clusters: None,
            });
            write_json(&report, &output)?;
        }
        Command::Ablation {
            input,
            knn_k,
            kernel,
            output,
        } => {
            let file = read_cloud(&input, kernel.max_points)?;
            let (n, d) = (file.n(), file.dim());
            let cloud = PointCloud::new(file.points)?;
            let variants = ablation_entropies(&cloud, knn_k, &kernel.config(), kernel.t)?;
            let reports: BTreeMap<String, Report> = variants
                .into_values()
                .map(|e| {
                    let name = serde_json::to_value(e.method)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default();
                    let mut r = Report::new("ablation", e.value, n, d);
                    r.t = e.t;
                    r.sigma = e.sigma;
                    r.sigma_source = Some(kernel.sigma_source());
                    (name, r)
                })
                .collect();
            write_json(&reports, &output)?;
        }
        Command::Generate {
            family,
            n,
            k,
            dim,
            intrinsic_dim,
            separation,
            noise,
            no_rotate,
            corruption,
            weight,
            seed,
            output,
        } => {
            let out = open_output(&output)?;
            let manifold = |dist| {
                gen_manifold(
                    &ManifoldSpec {
                        n,
                        intrinsic_dim,
                        ambient_dim: dim,
                        dist,
                        noise_level: noise,
                        rotate: !no_rotate,
                    },
                    seed,
                )
            };
            let cloud = match family {
                FamilyArg::Blobs => gen_blobs(n, k, dim, separation, noise, seed)?,
                FamilyArg::Tree => gen_tree(n, k, dim, noise, seed)?,
                FamilyArg::UniformManifold => manifold(ManifoldDist::Uniform)?,
                FamilyArg::GaussianManifold => manifold(ManifoldDist::Gaussian)?,
                FamilyArg::PsdIdentityMix => {
                    let m = gen_psd_identity_mix(n, weight, seed)?;
                    write_cloud(out, m.view(), None)?;
                    return Ok(ExitCode::SUCCESS);
                }
            };
            let labels = match cloud.labels() {
                Some(l) if corruption > 0.0 => Some(corrupt_labels(l, corruption, k, seed.wrapping_add(1))?),
                Some(l) => Some(l.to_vec()),
                None => None,
            };
            write_cloud(out, cloud.points(), labels.as_deref())?;
        }
        Command::Sweep { config, output } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read {}", config.display()))?;
            let parsed = SweepConfig::parse(&text).with_context(|| format!("in {}", config.display()))?;
            let rows = run_sweep(&parsed)?;
            write_sweep_csv(&rows, open_output(&output)?)?;
        }
        Command::Claims { seed, only, output } => {
            let checks = match only {
                Some(id) => match run_claim(&id, seed) {
                    Some(c) => vec![c],
                    None => bail!("unknown claim '{id}'"),
                },
                None => run_all_claims(seed),
            };
            for c in &checks {
                eprintln!(
                    "{} {:<26} measured={} ({})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.claim_id,
                    c.measured,
                    c.detail
                );
            }
            write_claims_csv(&checks, open_output(&output)?)?;
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DIFFSPEC_THREADS") {
        let threads: usize = v
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .with_context(|| format!("DIFFSPEC_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<diffspec::Error>()) {
        Some(diffspec::Error::NumericalFailure(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
