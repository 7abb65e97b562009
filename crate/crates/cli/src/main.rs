//! `bipokit`: command-line front end for bipotential verification, covers,
//! Fitzpatrick analysis and history solving.
//!
//! Exit codes: 0 pass, 1 mathematical failure (witness in the report),
//! 2 usage or configuration error.

mod commands;
mod config;
mod expr;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::cover::CoverFlags;
use commands::Common;
use config::{LawFlags, RunConfig};
use report::Report;

const THREADS_ENV: &str = "BIPOKIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "bipokit", version, about = "Bipotentials and implicit constitutive laws")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON run configuration; flags override its keys, unknown keys are fatal.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid `lo:hi:n` for every axis, or one `lo:hi:n` per axis separated by commas.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Absolute tolerance; each command documents its default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled probes and graphs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file for the command's artefact (CSV or JSON).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LawArgs {
    /// coulomb, drucker-prager, cauchy, hill, vonmises, or a law JSON file.
    #[arg(long)]
    law: Option<String>,
    /// Friction coefficient (coulomb; default 0.5).
    #[arg(long)]
    mu: Option<f64>,
    /// Friction angle in degrees (drucker-prager; default 30).
    #[arg(long = "phi-deg")]
    phi_deg: Option<f64>,
    /// Dilatancy angle in degrees (drucker-prager; default 10).
    #[arg(long = "theta-deg")]
    theta_deg: Option<f64>,
    /// Cohesion or yield radius (drucker-prager, vonmises; default 1).
    #[arg(long)]
    c: Option<f64>,
    /// Dimension (cauchy; default 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Matrix size (hill; default 3).
    #[arg(long)]
    k: Option<usize>,
}

impl From<&LawArgs> for LawFlags {
    fn from(a: &LawArgs) -> Self {
        LawFlags {
            law: a.law.clone(),
            mu: a.mu,
            phi_deg: a.phi_deg,
            theta_deg: a.theta_deg,
            c: a.c,
            dim: a.dim,
            k: a.k,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the bipotential axioms for a law or an expression b(x, y) (tol 1e-8).
    Verify {
        #[command(flatten)]
        law: LawArgs,
        /// Scalar expression in x and y, e.g. "abs(x)*abs(y)".
        #[arg(long = "fn", allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Discrete conjugate of an expression f(x), with a biconjugate convexity check (tol 1e-6).
    Conjugate {
        /// Scalar expression in x, e.g. "x^2/2" or "if(abs(x) <= 1, 0, inf)".
        #[arg(long = "fn", allow_hyphen_values = true)]
        expr: Option<String>,
        /// Dual grid `lo:hi:n` (default -5:5:1001); a step coarser than the primal one
        /// adds an interpolation defect of order step² · f'' / 8.
        #[arg(long, allow_hyphen_values = true)]
        dual: Option<String>,
    },
    /// Sample a law's graph and check that every pair closes the gap (tol 1e-8).
    Graph {
        #[command(flatten)]
        law: LawArgs,
        /// Samples per branch (default 5).
        #[arg(long = "per-branch")]
        per_branch: Option<usize>,
    },
    /// Resolve a load history from CSV (time, driver components; tol 1e-7).
    Solve {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        history: Option<PathBuf>,
        /// Initial (reference) dual value, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        initial: Option<String>,
    },
    /// Build a bipotential from a cover and check it against its oracles (tol 1e-6).
    Cover {
        /// quadratic-scaling, shifted-quadratics, adversarial-indicators, single or explicit.
        #[arg(long)]
        family: Option<String>,
        /// Cover JSON file.
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Member of the single family: quad, abs or ball.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        /// Parameter interval `lo:hi`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Mesh nodes on the parameter interval.
        #[arg(long)]
        nodes: Option<usize>,
        /// Finite parameter set for shifted quadratics, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        shifts: Option<String>,
        /// Indicator points, `;` between points and `,` between coordinates.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Number of seeded probe pairs (default 8).
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Fitzpatrick analysis of a scalar graph CSV (x_1,y_1).
    Fitz {
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("{THREADS_ENV}={v:?} is not a positive thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Report> {
    configure_threads()?;
    let config = match &cli.global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let common = Common {
        config,
        grid: cli.global.grid,
        tol: cli.global.tol,
        seed: cli.global.seed,
        out: cli.global.out,
    };
    if let Some(t) = common.tol {
        anyhow::ensure!(t.is_finite() && t >= 0.0, "--tol must be a finite non-negative number");
    }
    match cli.command {
        Command::Verify { law, expr } => commands::verify::run(&common, &(&law).into(), expr.as_deref()),
        Command::Conjugate { expr, dual } => commands::conjugate::run(&common, expr.as_deref(), dual.as_deref()),
        Command::Graph { law, per_branch } => commands::graph::run(&common, &(&law).into(), per_branch),
        Command::Solve { law, history, initial } => {
            commands::solve::run(&common, &(&law).into(), history, initial.as_deref())
        }
        Command::Cover {
            family,
            cover,
            phi,
            dim,
            lambda,
            nodes,
            shifts,
            points,
            probes,
        } => commands::cover::run(
            &common,
            &CoverFlags {
                family,
                cover,
                phi,
                dim,
                lambda,
                nodes,
                shifts,
                points,
                probes,
            },
        ),
        Command::Fitz { graph } => commands::fitz::run(&common, graph),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("report serializes"));
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("bipokit: {e:#}");
            ExitCode::from(2)
        }
    }
}
