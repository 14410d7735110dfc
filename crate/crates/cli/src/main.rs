//! `chemospec` — batch driver for the attraction–repulsion chemotaxis analysis.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "chemospec", version, about = "Stability analysis and simulation of attraction-repulsion chemotaxis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config file (flat object); flags below override its keys.
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any config key, value parsed as JSON (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    /// Steady-state amplitude A.
    #[arg(short = 'A', long = "amplitude", allow_negative_numbers = true)]
    amplitude: Option<f64>,
    /// Spatial dimension (1 or 2).
    #[arg(long = "dim")]
    n: Option<usize>,
    /// Grid points per axis (N).
    #[arg(short = 'N', long = "points")]
    points: Option<usize>,
    /// Box length (L).
    #[arg(short = 'L', long = "length", allow_negative_numbers = true)]
    length: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(short, long, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(short, long, env = "CHEMOSPEC_JOBS")]
    jobs: Option<usize>,
    /// Suppress the report on stdout.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Positivity,
    Monotonicity,
}

#[derive(Subcommand)]
enum Command {
    /// Classify parameters: case, A*, c*, monotonicity threshold, M(A), τ*.
    Classify(Common),
    /// Rasterize region cases over the (λ, β) plane (PPM, optional SVG).
    RegionMap {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Also write an SVG with labeled boundary curves.
        #[arg(long)]
        svg: bool,
    },
    /// Solve the critical-point quartic (depressed form, Ferrari factors, τ values).
    Roots(Common),
    /// Evaluate the Bessel kernel on radii and against closed forms.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
    },
    /// Linear propagation with a decay/growth rate fit.
    Propagate(Common),
    /// Nonlinear pseudospectral run (or the instability experiment).
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Run the instability experiment (A > A*).
        #[arg(long)]
        instability: bool,
    },
    /// Fit an algebraic or exponential rate to a time-series CSV.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
    },
    /// Parallel parameter sweep written as one CSV row per grid point.
    Sweep(Common),
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, Value)>, CliError> {
        let mut out = self
            .set
            .iter()
            .map(|s| config::parse_override(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        put("beta1", self.beta1.map(json_f64));
        put("beta2", self.beta2.map(json_f64));
        put("lambda1", self.lambda1.map(json_f64));
        put("lambda2", self.lambda2.map(json_f64));
        put("A", self.amplitude.map(json_f64));
        put("n", self.n.map(Value::from));
        put("N", self.points.map(Value::from));
        put("L", self.length.map(json_f64));
        put("dt", self.dt.map(json_f64));
        put("t_end", self.t_end.map(json_f64));
        put("seed", self.seed.map(Value::from));
        put("output", self.output.as_ref().map(|p| Value::from(p.display().to_string())));
        put("jobs", self.jobs.map(Value::from));
        Ok(out)
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("jobs must be >= 1".into()));
    }
    #[cfg(feature = "parallel")]
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {j} workers: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(commands::Outcome, bool), CliError> {
    let (common, extra): (&Common, Vec<(String, Value)>) = match &cli.command {
        Command::RegionMap { common, mode, resolution, svg } => {
            let mut e = Vec::new();
            if let Some(m) = mode {
                let name = match m {
                    ModeArg::Positivity => "positivity",
                    ModeArg::Monotonicity => "monotonicity",
                };
                e.push(("mode".into(), Value::from(name)));
            }
            if let Some(r) = resolution {
                e.push(("resolution".into(), Value::from(*r)));
            }
            if *svg {
                e.push(("svg".into(), Value::Bool(true)));
            }
            (common, e)
        }
        Command::Kernel { common, lambda } => (common, lambda.map(|l| vec![("lambda".into(), json_f64(l))]).unwrap_or_default()),
        Command::Simulate { common, instability } => {
            let e = if *instability { vec![("instability".into(), Value::Bool(true))] } else { vec![] };
            (common, e)
        }
        Command::Fit { common, input } => (
            common,
            input
                .as_ref()
                .map(|p| vec![("input".into(), Value::from(p.display().to_string()))])
                .unwrap_or_default(),
        ),
        Command::Classify(c) | Command::Roots(c) | Command::Propagate(c) | Command::Sweep(c) => (c, vec![]),
    };
    let mut overrides = common.overrides()?;
    overrides.extend(extra);
    let cfg: ExperimentConfig = config::load(common.config.as_deref(), &overrides)?;
    configure_jobs(cfg.jobs)?;
    let outcome = match cli.command {
        Command::Classify(_) => commands::classify(cfg)?,
        Command::RegionMap { .. } => commands::region_map(cfg)?,
        Command::Roots(_) => commands::roots(cfg)?,
        Command::Kernel { .. } => commands::kernel(cfg)?,
        Command::Propagate(_) => commands::propagate(cfg)?,
        Command::Simulate { .. } => commands::simulate(cfg)?,
        Command::Fit { .. } => commands::fit(cfg)?,
        Command::Sweep(_) => commands::sweep(cfg)?,
    };
    Ok((outcome, common.quiet))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, quiet)) => {
            if !quiet {
                println!("{}", outcome.report);
            }
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("chemospec: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("chemospec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
