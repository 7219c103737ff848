use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use swg_core::mms::{ExactSolution, Mms};
use swg_core::projection::{error_norms, NormOptions};
use swg_core::solver::{MmsForcing, ShallowWaterSolver};
use swg_core::studies::{
    projection_study, spatial_study, temporal_study, ProjectionStudy, RateTable, SpaceParams,
    SpatialStudy, TemporalStudy,
};
use swg_core::Error;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

/// Directory used for outputs when no `--output` is given.
pub const OUTPUT_DIR_ENV: &str = "SWG_OUTPUT_DIR";

/// Interior sample points per element in a solve snapshot.
const SNAPSHOT_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// At least one run blew up; its row or snapshot records where.
    Diverged,
}

#[derive(Debug)]
pub struct Report {
    pub outcome: Outcome,
    /// Text for standard output.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Solve => solve(cfg),
        Command::SpatialStudy => {
            let study = SpatialStudy {
                space: space(cfg),
                family: cfg.family()?,
                ns: cfg.mesh.n.clone(),
                time: cfg.time_step()?,
                t_final: cfg.time.t_final,
                mms: Mms::from_id(cfg.mms)?,
                quad_points: cfg.quad_points,
                norms: norms(cfg),
            };
            write_table(cfg, &spatial_study(&study)?)
        }
        Command::TemporalStudy => {
            let study = TemporalStudy {
                space: space(cfg),
                family: cfg.family()?,
                n: cfg.mesh.n[0],
                ms: cfg.time.m.clone().unwrap_or_default(),
                m_ref: cfg.time.m_ref.unwrap_or(0),
                t_final: cfg.time.t_final,
                mms: Mms::from_id(cfg.mms)?,
                quad_points: cfg.quad_points,
            };
            let result = temporal_study(&study)?;
            let mut report = write_table(cfg, &result.table)?;
            let _ = writeln!(
                report.summary,
                "E_ref(eta) = {:.4e}  E_ref(u) = {:.4e}  (M_ref = {})",
                result.e_ref_eta, result.e_ref_u, study.m_ref
            );
            Ok(report)
        }
        Command::ProjectionStudy => {
            let study = ProjectionStudy {
                space: space(cfg),
                family: cfg.family()?,
                ns: cfg.mesh.n.clone(),
                target: cfg.projection_target()?,
                quad_points: cfg.quad_points,
                norms: norms(cfg),
            };
            write_table(cfg, &projection_study(&study)?)
        }
    }
}

fn space(cfg: &RunConfig) -> SpaceParams {
    SpaceParams {
        r: cfg.space.r,
        mu: cfg.space.mu,
    }
}

fn norms(cfg: &RunConfig) -> NormOptions {
    let defaults = NormOptions::default();
    NormOptions {
        quad_points: cfg.quad_points,
        linf_samples: cfg.linf_samples.unwrap_or(defaults.linf_samples),
    }
}

/// Where the main CSV goes: `--output`, else `$SWG_OUTPUT_DIR/<command>.csv`,
/// else `./<command>.csv`.
pub fn output_path(cfg: &RunConfig) -> PathBuf {
    if let Some(p) = &cfg.output {
        return p.clone();
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
    dir.join(format!("{}.csv", cfg.command))
}

/// `results/t1.csv` -> `results/t1.plot.csv`.
pub fn plot_path(main: &Path) -> PathBuf {
    let stem = main
        .file_stem()
        .map_or_else(Default::default, |s| s.to_os_string());
    let mut name = stem;
    name.push(".plot.csv");
    main.with_file_name(name)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

fn write_table(cfg: &RunConfig, table: &RateTable) -> Result<Report, CliError> {
    let main = output_path(cfg);
    let plot = plot_path(&main);
    write_file(&main, &table.to_csv())?;
    write_file(&plot, &table.plot_csv())?;
    let outcome = if table.any_diverged() {
        Outcome::Diverged
    } else {
        Outcome::Completed
    };
    Ok(Report {
        outcome,
        summary: table.render(),
        files: vec![main, plot],
    })
}

fn solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let family = cfg.family()?;
    let n = cfg.mesh.n[0];
    let mesh = family.build(n)?;
    let t_final = cfg.time.t_final;
    let steps = cfg.time_step()?.steps(&mesh, t_final)?;
    let k = t_final / steps as f64;
    let solver = ShallowWaterSolver::new(mesh, cfg.space.r, cfg.space.mu, cfg.quad_points)?;

    let mms = match cfg.mms {
        0 => None,
        id => Some(Mms::from_id(id)?),
    };
    let (initial, forcing) = match mms {
        None => (solver.zero_state(), None),
        Some(m) => (
            solver.initial_state(|x| m.eta(x, 0.0), |x| m.u(x, 0.0))?,
            Some(MmsForcing(m)),
        ),
    };
    let forcing = forcing.as_ref().map(|f| f as &dyn swg_core::Forcing);

    let mut preamble = String::new();
    let _ = writeln!(
        preamble,
        "# solve: r={} mu={} mesh={family} N={n}",
        cfg.space.r, cfg.space.mu
    );
    let _ = writeln!(preamble, "# swg-core {}", swg_core::VERSION);
    for (key, value) in [
        ("r", cfg.space.r.to_string()),
        ("mu", cfg.space.mu.to_string()),
        ("mesh", family.to_string()),
        ("N", n.to_string()),
        ("T", t_final.to_string()),
        ("M", steps.to_string()),
        ("k", k.to_string()),
        ("mms", cfg.mms.to_string()),
    ] {
        let _ = writeln!(preamble, "# {key} = {value}");
    }

    let main = output_path(cfg);
    match solver.evolve(&initial, k, steps, forcing) {
        Ok(state) => {
            let mut summary = format!("solve: N={n} M={steps} k={k:.6e} T={t_final}\n");
            if let Some(m) = mms {
                let t = state.time;
                let opts = norms(cfg);
                let eta = |x: f64, d: usize| if d == 0 { m.eta(x, t) } else { m.eta_x(x, t) };
                let u = |x: f64, d: usize| if d == 0 { m.u(x, t) } else { m.u_x(x, t) };
                let ne = error_norms(&state.eta, eta, &[], 1, opts)?;
                let nu = error_norms(&state.vel, u, &[], 1, opts)?;
                let _ = writeln!(
                    summary,
                    "eta: L2 {:.4e}  Linf {:.4e}  H1 {:.4e}",
                    ne.l2, ne.linf, ne.h1_semi
                );
                let _ = writeln!(
                    summary,
                    "u:   L2 {:.4e}  Linf {:.4e}  H1 {:.4e}",
                    nu.l2, nu.linf, nu.h1_semi
                );
                let _ = writeln!(preamble, "# L2_eta = {:.6e}", ne.l2);
                let _ = writeln!(preamble, "# L2_u = {:.6e}", nu.l2);
            }
            write_file(
                &main,
                &(preamble + &solver.snapshot_csv(&state, SNAPSHOT_SAMPLES)),
            )?;
            Ok(Report {
                outcome: Outcome::Completed,
                summary,
                files: vec![main],
            })
        }
        Err(Error::BlowUp {
            step,
            time,
            max_abs,
        }) => {
            let _ = writeln!(
                preamble,
                "# {} at step {step}, t = {time}",
                swg_core::studies::DIVERGED
            );
            write_file(&main, &preamble)?;
            Ok(Report {
                outcome: Outcome::Diverged,
                summary: format!(
                    "solve: diverged at step {step} of {steps} (t = {time:.6}, max |coefficient| = {max_abs:.3e})\n"
                ),
                files: vec![main],
            })
        }
        Err(e) => Err(e.into()),
    }
}
