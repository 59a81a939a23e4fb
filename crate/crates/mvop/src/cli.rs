//! Argument parsing and the subcommands. Exit codes: 0 success, 1 a failing check,
//! 2 bad usage or config, 3 a numerical failure (conditioning, degree budget, quadrature).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mvop_core::deformation::{lax_evolve, BlockTridiag};
use mvop_core::hermite_fast::FastHermite;
use mvop_core::ladder::LadderPair;
use mvop_core::oracle::gram_schmidt_family;
use mvop_core::{ExponentialWeight, MvopFamily, DEFAULT_GRID};
use serde_json::json;

use crate::config::{Config, ConfigError, FamilyKind};
use crate::export;
use crate::suites::{self, Custom, Options, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "mvop",
    version,
    about = "Matrix-valued orthogonal polynomials for exponential weights"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the family of a config by quadrature and Gram–Schmidt; write it as JSON.
    Compute {
        #[command(flatten)]
        family: FamilyArgs,
        /// Largest acceptable three-term recurrence residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms, xi table and sampled P(x,n) from the fast path for the weight with parameters alpha.
    FastHermite {
        /// alpha_1,...,alpha_N
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        alpha: Vec<f64>,
        /// Largest degree.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write its JSON report.
    Verify {
        #[arg(value_enum)]
        suite_name: Option<Suite>,
        #[arg(long, value_enum, conflicts_with = "suite_name")]
        suite: Option<Suite>,
        /// Weight for `ladder` and `string` (and `t` for `dpainleve`) instead of the built-in families.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Replace every tolerance with this value.
        #[arg(long)]
        tol: Option<f64>,
        /// Finite-difference step of the `toda` suite.
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate L' = [L, (L^j)_+] on a block truncation and write a CSV time series.
    TodaEvolve {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        flow_j: usize,
        /// End time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Time step.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the quadrature oracle against the fast path (CSV).
    Bench {
        /// Hermite-type weight; default rows are N = 1, 2, 3.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write family.json, norms.csv, lowering.json and raising.json into a directory.
    Export {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `n_max` of the config.
    #[arg(long)]
    pub n_max: Option<usize>,
}

const DEFAULT_N_MAX: usize = 10;

impl FamilyArgs {
    fn load(&self) -> anyhow::Result<(Config, ExponentialWeight, usize)> {
        let config = Config::load(&self.config)?;
        let weight = config.weight()?;
        let n_max = self.n_max.unwrap_or(config.n_max(DEFAULT_N_MAX));
        Ok((config, weight, n_max))
    }

    fn family(&self) -> anyhow::Result<(Config, ExponentialWeight, MvopFamily)> {
        let (config, weight, n_max) = self.load()?;
        let fam = gram_schmidt_family(&weight, n_max)?;
        Ok((config, weight, fam))
    }
}

/// Parses the arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<mvop_core::Error>() {
        Some(
            mvop_core::Error::InvalidParameter { .. }
            | mvop_core::Error::DimensionMismatch { .. }
            | mvop_core::Error::NotUnitLowerTriangular,
        ) => 2,
        Some(_) => 3,
        None => 2,
    }
}

fn writer(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn run(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Compute { family, tol, out } => compute(&family, tol, out.as_deref()),
        Command::FastHermite { alpha, n, out } => {
            let fast = FastHermite::new(&alpha, n)?;
            write_json(out.as_deref(), &export::fast_hermite_json(&fast, &DEFAULT_GRID)?)?;
            Ok(0)
        }
        Command::Verify {
            suite_name,
            suite,
            config,
            n_max,
            tol,
            h,
            out,
        } => {
            let suite = suite.or(suite_name).unwrap_or(Suite::All);
            verify(suite, config.as_deref(), n_max, tol, h, out.as_deref())
        }
        Command::TodaEvolve {
            family,
            flow_j,
            t,
            h,
            out,
        } => toda_evolve(&family, flow_j, t, h, out.as_deref()),
        Command::Bench { config, n_max, out } => bench(config.as_deref(), n_max, out.as_deref()),
        Command::Export { family, out } => export_all(&family, &out),
    }
}

fn compute(args: &FamilyArgs, tol: f64, out: Option<&Path>) -> anyhow::Result<i32> {
    let (config, weight, fam) = args.family()?;
    let recurrence = suites::recurrence_summary(&fam)?;
    let orthogonality = fam.orthogonality_defect();
    let mut value = export::family_json(Some(&config), &weight, &fam);
    value["residuals"] = json!({ "recurrence": recurrence, "orthogonality": orthogonality });
    write_json(out, &value)?;
    eprintln!(
        "{} N={} n_max={}: recurrence residual {recurrence:.3e}, orthogonality defect {orthogonality:.3e}",
        config.family.name(),
        fam.dim(),
        fam.n_max()
    );
    Ok(if recurrence < tol { 0 } else { 1 })
}

fn verify(
    suite: Suite,
    config: Option<&Path>,
    n_max: Option<usize>,
    tol: Option<f64>,
    h: f64,
    out: Option<&Path>,
) -> anyhow::Result<i32> {
    if !(h.is_finite() && h > 0.0) {
        bail!(ConfigError(format!("--h must be positive, got {h}")));
    }
    let custom = match config {
        Some(path) => {
            let config = Config::load(path)?;
            let weight = config.weight()?;
            let n_max = n_max.unwrap_or(config.n_max(12));
            // fail early with exit 3 rather than inside every check
            gram_schmidt_family(&weight, n_max)?;
            Some(Custom { config, weight, n_max })
        }
        None => None,
    };
    let opts = Options { custom, h, tol };
    opts.validate(suite)?;
    let report = suites::run(suite, &opts);
    write_json(out, &serde_json::to_value(&report)?)?;
    eprint!("{}", report.summary());
    Ok(if report.pass { 0 } else { 1 })
}

fn toda_evolve(args: &FamilyArgs, j: usize, t_end: f64, step: f64, out: Option<&Path>) -> anyhow::Result<i32> {
    if j == 0 {
        bail!(ConfigError("--flow-j must be at least 1".into()));
    }
    if !(step.is_finite() && step > 0.0 && t_end.is_finite() && t_end >= 0.0) {
        bail!(ConfigError(format!(
            "need --h > 0 and --t >= 0, got h = {step}, t = {t_end}"
        )));
    }
    let (_, weight, n_blocks) = args.load()?;
    let fam = gram_schmidt_family(&weight, n_blocks)?;
    let l = BlockTridiag::from_family(&fam, n_blocks)?;
    let steps = (t_end / step).round() as usize;
    let samples = lax_evolve(&l, j, t_end, step, (steps / 100).max(1))?;

    let mut wtr = csv::Writer::from_writer(writer(out)?);
    wtr.write_record(["t", "n", "kind", "i", "j", "re", "im"])?;
    for s in &samples {
        for (kind, blocks) in [("B", s.state.b()), ("C", s.state.c())] {
            for (n, m) in blocks.iter().enumerate() {
                if kind == "C" && n == 0 {
                    continue;
                }
                for i in 0..m.dim() {
                    for k in 0..m.dim() {
                        let z = m[(i, k)];
                        wtr.write_record([
                            s.t.to_string(),
                            n.to_string(),
                            kind.to_string(),
                            i.to_string(),
                            k.to_string(),
                            format!("{:e}", z.re),
                            format!("{:e}", z.im),
                        ])?;
                    }
                }
            }
        }
    }
    wtr.flush()?;
    Ok(0)
}

fn bench(config: Option<&Path>, n_max: usize, out: Option<&Path>) -> anyhow::Result<i32> {
    let rows: Vec<(String, Vec<f64>)> = match config {
        Some(path) => {
            let config = Config::load(path)?;
            let Some(alpha) = config.alpha()? else {
                bail!(ConfigError(format!(
                    "bench needs a Hermite-type family, got {}",
                    config.family.name()
                )));
            };
            if config.t.unwrap_or(0.0) != 0.0 {
                bail!(ConfigError("bench compares paths at t = 0 only".into()));
            }
            vec![(config.family.name().to_string(), alpha)]
        }
        None => [vec![1.0], vec![1.0, 0.7], vec![1.0, 1.3, 0.6]]
            .into_iter()
            .map(|a| (FamilyKind::HermiteAlpha.name().to_string(), a))
            .collect(),
    };
    let mut wtr = csv::Writer::from_writer(writer(out)?);
    wtr.write_record(["family", "N", "n_max", "oracle_ms", "fast_ms", "max_residual"])?;
    for (family, alpha) in rows {
        let (oracle_ms, fast_ms, worst) = suites::timed_paths(&alpha, n_max)?;
        wtr.write_record([
            family,
            alpha.len().to_string(),
            n_max.to_string(),
            format!("{oracle_ms:.3}"),
            format!("{fast_ms:.3}"),
            format!("{worst:.3e}"),
        ])?;
    }
    wtr.flush()?;
    Ok(0)
}

fn export_all(args: &FamilyArgs, dir: &Path) -> anyhow::Result<i32> {
    let (config, weight, fam) = args.family()?;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_json(
        Some(&dir.join("family.json")),
        &export::family_json(Some(&config), &weight, &fam),
    )?;
    let norms = fs::File::create(dir.join("norms.csv"))?;
    export::norms_csv(&fam.norms()[..=fam.n_max()], io::BufWriter::new(norms))?;
    let pair = LadderPair::new(&fam, weight.potential(), weight.ladder_matrix())?;
    write_json(Some(&dir.join("lowering.json")), &export::operator_json(&pair.m))?;
    write_json(Some(&dir.join("raising.json")), &export::operator_json(&pair.mdag))?;
    Ok(0)
}
