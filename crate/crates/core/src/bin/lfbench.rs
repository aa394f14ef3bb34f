use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfbench::workbench::{self, RunConfig, RunOutput, WorkbenchError};

#[derive(Parser)]
#[command(name = "lfbench", version, about = "Local-Friendliness and Bell polytope workbench")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` config file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Vertices and facets of a polytope
    Enumerate {
        /// Settings and outcomes, e.g. 3,2
        #[arg(long)]
        scenario: Option<String>,
        /// lhv, ns or lf
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        vertex_cap: Option<usize>,
    },
    /// Sort a facet file into relabeling classes
    Classify {
        #[arg(long)]
        facets: PathBuf,
        /// List every orbit instead of matching the nine LF classes
        #[arg(long)]
        orbits: bool,
    },
    /// Certified membership of a behavior file
    Membership {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// Facet file used to report the most violated facet
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Inequality values along the rho_mu family
    Sweep {
        /// phi_1,...,phi_N,beta in degrees
        #[arg(long)]
        angles: Option<String>,
        /// Comma-separated mu values
        #[arg(long)]
        mu: Option<String>,
    },
    /// See-saw maximization of an inequality
    Seesaw {
        /// Library label or inequality file
        #[arg(long)]
        ineq: Option<String>,
        /// Local dimensions, e.g. 3,3
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Two-dimensional slice through behavior space
    Slice {
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn configure(common: &Common, overrides: &[(&str, Option<String>)]) -> Result<RunConfig, WorkbenchError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.load_file(path)?;
    }
    let global = [
        ("out", common.out.as_ref().map(|p| p.display().to_string())),
        ("threads", common.threads.map(|t| t.to_string())),
        ("seed", common.seed.map(|s| s.to_string())),
    ];
    for (k, v) in global.iter().chain(overrides) {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| WorkbenchError::Computation(e.to_string()))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<RunOutput, WorkbenchError> {
    let c = &cli.common;
    match cli.command {
        Command::Enumerate { scenario, model, vertex_cap } => {
            let cfg = configure(c, &[("scenario", scenario), ("model", model), ("vertex_cap", vertex_cap.map(|v| v.to_string()))])?;
            workbench::run_enumerate(&cfg)
        }
        Command::Classify { facets, orbits } => workbench::run_classify(&configure(c, &[])?, &facets, orbits),
        Command::Membership { behavior, model, facets } => {
            let cfg = configure(c, &[("model", model)])?;
            workbench::run_membership(&cfg, &behavior, facets.as_deref())
        }
        Command::Sweep { angles, mu } => workbench::run_sweep(&configure(c, &[("angles", angles), ("mu", mu)])?),
        Command::Seesaw { ineq, dims, restarts } => {
            let cfg = configure(c, &[("ineq", ineq), ("dims", dims), ("restarts", restarts.map(|r| r.to_string()))])?;
            workbench::run_seesaw(&cfg)
        }
        Command::Slice { resolution } => {
            workbench::run_slice(&configure(c, &[("resolution", resolution.map(|r| r.to_string()))])?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = WorkbenchError::Validation(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            let text = match out.table {
                Some(t) => t,
                None => format!("{}\n", serde_json::to_string_pretty(&out.summary).unwrap()),
            };
            // a closed pipe on stdout is not an error of the run
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
