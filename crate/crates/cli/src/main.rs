//! `swg`: single runs and convergence studies for the spline Galerkin
//! shallow water solver.
//!
//! Each study writes a CSV with a `#` metadata preamble and a companion
//! `.plot.csv` of log10 values, and prints the table. The exit status is 0 on
//! success, 2 on a usage error, 3 if any run diverged and 1 on other errors.

mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig};
use error::CliError;
use run::Outcome;

const EXIT_DIVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "swg",
    version,
    about = "Spline Galerkin solver for the 1D shallow water equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// TOML run configuration; flags given on the command line override it.
    /// Without a subcommand, runs the command named in the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run the solver once and write a snapshot of the final state.
    Solve,
    /// Errors at the final time over a list of N, with orders in h.
    SpatialStudy,
    /// Differences to a fine-step reference run over a list of M, with orders in k.
    TemporalStudy,
    /// L2 projection errors of a fixed target over a list of N.
    ProjectionStudy,
}

impl Cmd {
    fn command(&self) -> Command {
        match self {
            Cmd::Solve => Command::Solve,
            Cmd::SpatialStudy => Command::SpatialStudy,
            Cmd::TemporalStudy => Command::TemporalStudy,
            Cmd::ProjectionStudy => Command::ProjectionStudy,
        }
    }
}

#[derive(Debug, Args)]
struct Opts {
    /// Spline order (degree r - 1) [default: 4]
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Smoothness C^mu of the splines, 1 <= mu <= r - 2 [default: 2]
    #[arg(long, global = true)]
    mu: Option<usize>,
    /// Mesh family: uniform, quasi-a or quasi-b [default: quasi-a]
    #[arg(long, global = true)]
    mesh: Option<String>,
    /// Number of elements, comma separated for studies
    #[arg(long = "N", global = true, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Final time [default: 1]
    #[arg(long = "T", global = true)]
    t_final: Option<f64>,
    /// Courant number k / h [default: 0.05 when no other time step is given]
    #[arg(long, global = true, conflicts_with_all = ["k", "m"])]
    lambda: Option<f64>,
    /// Fixed time step
    #[arg(long, global = true, conflicts_with = "m")]
    k: Option<f64>,
    /// Number of time steps, comma separated for temporal studies
    #[arg(long = "M", id = "m", global = true, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Number of steps of the temporal reference run
    #[arg(long = "M-ref", global = true)]
    m_ref: Option<usize>,
    /// Manufactured solution 1 or 2 (solve also takes 0: zero data, no forcing) [default: 1]
    #[arg(long, global = true)]
    mms: Option<u8>,
    /// Projection target: smooth or nonsmooth [default: nonsmooth]
    #[arg(long, global = true)]
    target: Option<String>,
    /// Output CSV path [default: $SWG_OUTPUT_DIR/<command>.csv]
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Gauss points per element [default: r + 2]
    #[arg(long, global = true)]
    quad_points: Option<usize>,
    /// Interior samples per element for the maximum norm [default: 20]
    #[arg(long, global = true)]
    linf_samples: Option<usize>,
}

impl Opts {
    fn apply(self, cfg: &mut RunConfig) {
        let time_given = self.lambda.is_some() || self.k.is_some() || self.m.is_some();
        if time_given {
            cfg.time.lambda = self.lambda;
            cfg.time.k = self.k;
            cfg.time.m = self.m;
        }
        if let Some(r) = self.r {
            cfg.space.r = r;
        }
        if let Some(mu) = self.mu {
            cfg.space.mu = mu;
        }
        if let Some(mesh) = self.mesh {
            cfg.mesh.family = mesh;
        }
        if let Some(n) = self.n {
            cfg.mesh.n = n;
        }
        if let Some(t) = self.t_final {
            cfg.time.t_final = t;
        }
        cfg.time.m_ref = self.m_ref.or(cfg.time.m_ref);
        if let Some(mms) = self.mms {
            cfg.mms = mms;
        }
        cfg.target = self.target.or(cfg.target.take());
        cfg.output = self.output.or(cfg.output.take());
        cfg.quad_points = self.quad_points.or(cfg.quad_points);
        cfg.linf_samples = self.linf_samples.or(cfg.linf_samples);
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut cfg = RunConfig::from_toml(&text)?;
            if let Some(cmd) = &cli.command {
                cfg.command = cmd.command();
            }
            cfg
        }
        None => match &cli.command {
            Some(cmd) => RunConfig::new(cmd.command()),
            None => return error::usage("a subcommand or --config is required (see --help)"),
        },
    };
    cli.opts.apply(&mut cfg);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dump = cli.dump_config;
    let result = resolve(cli).and_then(|cfg| {
        if dump {
            cfg.validate()?;
            print!("{}", cfg.to_toml());
            return Ok(Outcome::Completed);
        }
        let report = run::run(&cfg)?;
        print!("{}", report.summary);
        for f in &report.files {
            eprintln!("wrote {}", f.display());
        }
        Ok(report.outcome)
    });
    match result {
        Ok(Outcome::Completed) => ExitCode::SUCCESS,
        Ok(Outcome::Diverged) => {
            eprintln!("swg: at least one run diverged");
            ExitCode::from(EXIT_DIVERGED)
        }
        Err(e) => {
            eprintln!("swg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
