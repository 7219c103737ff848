//! Convergence studies: spatial orders against a manufactured solution,
//! temporal orders through the difference with a fine-step reference run
//! (`E*`), and projection errors of smooth and non-smooth targets.
//!
//! Rows of a study run in parallel; output order follows the input list.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::mesh::{Mesh, MeshFamily};
use crate::mms::{ExactSolution, Mms};
use crate::nonsmooth::{smooth_v, NonSmoothV};
use crate::projection::{error_norms, NormOptions, Projector};
use crate::solver::{MmsForcing, ShallowWaterSolver, State};
use crate::spline::SplineSpace;

/// Marker written in place of an undefined rate.
pub const UNDEFINED_RATE: &str = "-";
/// Marker written in place of the errors of a diverged row.
pub const DIVERGED: &str = "diverged";

/// `log(e1 / e2) / log(m1 / m2)`; `None` unless all inputs are positive,
/// finite and `m1 != m2`.
pub fn order(e1: f64, e2: f64, m1: f64, m2: f64) -> Option<f64> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if !(ok(e1) && ok(e2) && ok(m1) && ok(m2)) || m1 == m2 {
        return None;
    }
    Some((e1 / e2).ln() / (m1 / m2).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceParams {
    pub r: usize,
    pub mu: usize,
}

impl SpaceParams {
    pub const CUBIC: SpaceParams = SpaceParams { r: 4, mu: 2 };
    pub const QUARTIC: SpaceParams = SpaceParams { r: 5, mu: 3 };
    pub const QUINTIC: SpaceParams = SpaceParams { r: 6, mu: 4 };
}

/// How the time step of a run is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `k = lambda * h`, with `h` the mesh family parameter.
    Courant(f64),
    /// A fixed `k`.
    Fixed(f64),
    /// A fixed number of steps `M`, `k = T / M`.
    Steps(usize),
}

impl TimeStep {
    /// Number of steps for final time `t_final`; `k` is then `t_final / M`
    /// so that the last step lands exactly on `t_final`.
    pub fn steps(self, mesh: &Mesh, t_final: f64) -> Result<usize> {
        let k = match self {
            TimeStep::Steps(m) if m > 0 => return Ok(m),
            TimeStep::Steps(_) => return invalid("number of time steps must be positive"),
            TimeStep::Courant(lambda) => lambda * mesh.nominal_h(),
            TimeStep::Fixed(k) => k,
        };
        if !(k > 0.0 && k.is_finite()) {
            return invalid(format!("time step must be positive, got {k}"));
        }
        Ok(((t_final / k).round() as usize).max(1))
    }
}

/// Errors and orders of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub title: String,
    /// `key = value` pairs echoed in the CSV preamble.
    pub metadata: Vec<(String, String)>,
    /// What the rates are measured against: `h_max` or `k`.
    pub measure_label: String,
    pub columns: Vec<String>,
    pub rows: Vec<RateRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    /// `N` or `M`.
    pub resolution: usize,
    /// `h_max` or `k`.
    pub measure: f64,
    /// One error per column; `None` if the run diverged.
    pub errors: Option<Vec<f64>>,
}

impl RateTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn error(&self, row: usize, col: usize) -> Option<f64> {
        self.rows.get(row)?.errors.as_ref().map(|e| e[col])
    }

    /// Order between row `row - 1` and `row` for column `col`.
    pub fn rate(&self, row: usize, col: usize) -> Option<f64> {
        if row == 0 || row >= self.rows.len() {
            return None;
        }
        let (prev, cur) = (&self.rows[row - 1], &self.rows[row]);
        order(
            self.error(row - 1, col)?,
            self.error(row, col)?,
            prev.measure,
            cur.measure,
        )
    }

    /// Order between the last two rows.
    pub fn final_rate(&self, col: usize) -> Option<f64> {
        self.rate(self.rows.len().checked_sub(1)?, col)
    }

    pub fn any_diverged(&self) -> bool {
        self.rows.iter().any(|r| r.errors.is_none())
    }

    pub fn header(&self) -> String {
        let mut h = String::from("resolution");
        for c in &self.columns {
            let _ = write!(h, ",{c},rate_{c}");
        }
        h
    }

    /// CSV body: header row then one row per resolution.
    pub fn csv_body(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{}", row.resolution);
            for c in 0..self.columns.len() {
                match &row.errors {
                    Some(e) => {
                        let _ = write!(out, ",{:.6e}", e[c]);
                    }
                    None => {
                        let _ = write!(out, ",{DIVERGED}");
                    }
                }
                match self.rate(i, c) {
                    Some(r) => {
                        let _ = write!(out, ",{r:.4}");
                    }
                    None => {
                        let _ = write!(out, ",{UNDEFINED_RATE}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// `# key = value` preamble followed by the CSV body.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.title);
        let _ = writeln!(out, "# swg-core {}", crate::VERSION);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&self.csv_body());
        out
    }

    /// Log-log pairs for plotting: `measure,log10_measure,log10_<col>...`.
    pub fn plot_csv(&self) -> String {
        let mut out = format!("{},log10_{}", self.measure_label, self.measure_label);
        for c in &self.columns {
            let _ = write!(out, ",log10_{c}");
        }
        out.push('\n');
        for row in &self.rows {
            let Some(errors) = &row.errors else { continue };
            let _ = write!(out, "{:.6e},{:.6}", row.measure, row.measure.log10());
            for e in errors {
                let _ = write!(out, ",{:.6}", e.log10());
            }
            out.push('\n');
        }
        out
    }

    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.title);
        let _ = write!(out, "{:>8}", "res");
        for c in &self.columns {
            let _ = write!(out, " {:>12} {:>7}", c, "rate");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:>8}", row.resolution);
            for c in 0..self.columns.len() {
                match &row.errors {
                    Some(e) => {
                        let _ = write!(out, " {:>12.4e}", e[c]);
                    }
                    None => {
                        let _ = write!(out, " {DIVERGED:>12}");
                    }
                }
                let rate = self
                    .rate(i, c)
                    .map_or(UNDEFINED_RATE.to_string(), |r| format!("{r:.3}"));
                let _ = write!(out, " {rate:>7}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_family(family: MeshFamily, ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return invalid("resolution list is empty");
    }
    if let Some(&bad) = ns.iter().find(|&&n| !family.accepts(n)) {
        return invalid(format!("N = {bad} is not admissible for the {family} mesh"));
    }
    Ok(())
}

/// Runs the forced problem with exact solution `mms` from `t = 0` over
/// `steps` steps of size `t_final / steps`.
pub fn run_mms(solver: &ShallowWaterSolver, mms: Mms, t_final: f64, steps: usize) -> Result<State> {
    let initial = solver.initial_state(|x| mms.eta(x, 0.0), |x| mms.u(x, 0.0))?;
    let k = t_final / steps as f64;
    solver.evolve(&initial, k, steps, Some(&MmsForcing(mms)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialStudy {
    pub space: SpaceParams,
    pub family: MeshFamily,
    pub ns: Vec<usize>,
    pub time: TimeStep,
    pub t_final: f64,
    pub mms: Mms,
    pub quad_points: Option<usize>,
    pub norms: NormOptions,
}

pub const SPATIAL_COLUMNS: [&str; 6] = ["L2_eta", "Linf_eta", "H1_eta", "L2_u", "Linf_u", "H1_u"];

/// Errors at `t_final` in L2, L-infinity and the H1 seminorm for both
/// components, with orders in `h_max`. Diverged runs are kept as rows.
pub fn spatial_study(cfg: &SpatialStudy) -> Result<RateTable> {
    check_family(cfg.family, &cfg.ns)?;
    let rows = cfg
        .ns
        .par_iter()
        .map(|&n| -> Result<RateRow> {
            let mesh = cfg.family.build(n)?;
            let h_max = mesh.h_max();
            let steps = cfg.time.steps(&mesh, cfg.t_final)?;
            let solver = ShallowWaterSolver::new(mesh, cfg.space.r, cfg.space.mu, cfg.quad_points)?;
            let state = match run_mms(&solver, cfg.mms, cfg.t_final, steps) {
                Ok(s) => s,
                Err(Error::BlowUp { .. }) => {
                    return Ok(RateRow {
                        resolution: n,
                        measure: h_max,
                        errors: None,
                    })
                }
                Err(e) => return Err(e),
            };
            let t = cfg.t_final;
            let mms = cfg.mms;
            let eta_exact = |x: f64, d: usize| {
                if d == 0 {
                    mms.eta(x, t)
                } else {
                    mms.eta_x(x, t)
                }
            };
            let u_exact = |x: f64, d: usize| if d == 0 { mms.u(x, t) } else { mms.u_x(x, t) };
            let ne = error_norms(&state.eta, eta_exact, &[], 1, cfg.norms)?;
            let nu = error_norms(&state.vel, u_exact, &[], 1, cfg.norms)?;
            Ok(RateRow {
                resolution: n,
                measure: h_max,
                errors: Some(vec![ne.l2, ne.linf, ne.h1_semi, nu.l2, nu.linf, nu.h1_semi]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let time = match cfg.time {
        TimeStep::Courant(l) => ("lambda".to_string(), l.to_string()),
        TimeStep::Fixed(k) => ("k".to_string(), k.to_string()),
        TimeStep::Steps(m) => ("M".to_string(), m.to_string()),
    };
    Ok(RateTable {
        title: format!(
            "spatial study: r={} mu={} mesh={} mms={}",
            cfg.space.r, cfg.space.mu, cfg.family, cfg.mms
        ),
        metadata: vec![
            ("study".into(), "spatial".into()),
            ("r".into(), cfg.space.r.to_string()),
            ("mu".into(), cfg.space.mu.to_string()),
            ("mesh".into(), cfg.family.to_string()),
            time,
            ("T".into(), cfg.t_final.to_string()),
            ("mms".into(), cfg.mms.to_string()),
        ],
        measure_label: "h_max".into(),
        columns: SPATIAL_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalStudy {
    pub space: SpaceParams,
    pub family: MeshFamily,
    pub n: usize,
    pub ms: Vec<usize>,
    pub m_ref: usize,
    pub t_final: f64,
    pub mms: Mms,
    pub quad_points: Option<usize>,
}

pub const TEMPORAL_COLUMNS: [&str; 2] = ["Estar_eta", "Estar_u"];

/// Result of a temporal study: the `E*` table and the true L2 errors of
/// the reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalResult {
    pub table: RateTable,
    pub e_ref_eta: f64,
    pub e_ref_u: f64,
}

/// `E* = ||V^M - V^{M_ref}||` for each `M`, on one spatial grid, with
/// orders in `k = T / M`. The reference run is computed once, before the
/// other rows.
pub fn temporal_study(cfg: &TemporalStudy) -> Result<TemporalResult> {
    check_family(cfg.family, &[cfg.n])?;
    if cfg.ms.is_empty() {
        return invalid("list of step counts is empty");
    }
    let max_m = cfg.ms.iter().copied().max().unwrap_or(0);
    if cfg.m_ref <= max_m {
        return invalid(format!(
            "reference step count M_ref = {} must exceed every M (max {max_m})",
            cfg.m_ref
        ));
    }
    if cfg.ms.contains(&0) {
        return invalid("step counts must be positive");
    }
    let mesh = cfg.family.build(cfg.n)?;
    let solver = ShallowWaterSolver::new(mesh, cfg.space.r, cfg.space.mu, cfg.quad_points)?;
    let reference = run_mms(&solver, cfg.mms, cfg.t_final, cfg.m_ref)?;
    let (t, mms) = (cfg.t_final, cfg.mms);
    let e_ref_eta = error_norms(
        &reference.eta,
        |x, _| mms.eta(x, t),
        &[],
        1,
        NormOptions::default(),
    )?
    .l2;
    let e_ref_u = error_norms(
        &reference.vel,
        |x, _| mms.u(x, t),
        &[],
        1,
        NormOptions::default(),
    )?
    .l2;

    let rows = cfg
        .ms
        .par_iter()
        .map(|&m| -> Result<RateRow> {
            let k = cfg.t_final / m as f64;
            let state = match run_mms(&solver, cfg.mms, cfg.t_final, m) {
                Ok(s) => s,
                Err(Error::BlowUp { .. }) => {
                    return Ok(RateRow {
                        resolution: m,
                        measure: k,
                        errors: None,
                    })
                }
                Err(e) => return Err(e),
            };
            Ok(RateRow {
                resolution: m,
                measure: k,
                errors: Some(vec![
                    coeff_distance(
                        solver.eta_projector(),
                        state.eta.coeffs(),
                        reference.eta.coeffs(),
                    ),
                    coeff_distance(
                        solver.vel_projector(),
                        state.vel.coeffs(),
                        reference.vel.coeffs(),
                    ),
                ]),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let table = RateTable {
        title: format!(
            "temporal study: r={} mu={} mesh={} N={} M_ref={} mms={}",
            cfg.space.r, cfg.space.mu, cfg.family, cfg.n, cfg.m_ref, cfg.mms
        ),
        metadata: vec![
            ("study".into(), "temporal".into()),
            ("r".into(), cfg.space.r.to_string()),
            ("mu".into(), cfg.space.mu.to_string()),
            ("mesh".into(), cfg.family.to_string()),
            ("N".into(), cfg.n.to_string()),
            ("M_ref".into(), cfg.m_ref.to_string()),
            ("T".into(), cfg.t_final.to_string()),
            ("mms".into(), cfg.mms.to_string()),
            ("E_ref_eta".into(), format!("{e_ref_eta:.6e}")),
            ("E_ref_u".into(), format!("{e_ref_u:.6e}")),
        ],
        measure_label: "k".into(),
        columns: TEMPORAL_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    };
    Ok(TemporalResult {
        table,
        e_ref_eta,
        e_ref_u,
    })
}

/// Exact L2 distance of two expansions in the same space.
fn coeff_distance(projector: &Projector, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    projector.l2_norm_of_coeffs(&diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionTarget {
    /// `sin(pi x / 2 + 1)`
    Smooth,
    /// The `C^2` function with jumps of `v'''` at 1/4, 1/2, 3/4.
    NonSmooth,
}

impl ProjectionTarget {
    pub fn name(self) -> &'static str {
        match self {
            ProjectionTarget::Smooth => "smooth",
            ProjectionTarget::NonSmooth => "nonsmooth",
        }
    }
}

impl std::str::FromStr for ProjectionTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(ProjectionTarget::Smooth),
            "nonsmooth" => Ok(ProjectionTarget::NonSmooth),
            other => invalid(format!(
                "unknown projection target `{other}` (expected smooth or nonsmooth)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionStudy {
    pub space: SpaceParams,
    pub family: MeshFamily,
    pub ns: Vec<usize>,
    pub target: ProjectionTarget,
    pub quad_points: Option<usize>,
    pub norms: NormOptions,
}

pub const PROJECTION_COLUMNS: [&str; 6] = ["L2", "H1semi", "H2semi", "H3semi", "H3", "Linf"];

/// Errors `Pv - v` in L2, the H1/H2/H3 seminorms, the full H3 norm and
/// L-infinity, with orders in `h_max`.
pub fn projection_study(cfg: &ProjectionStudy) -> Result<RateTable> {
    check_family(cfg.family, &cfg.ns)?;
    if cfg.space.r < 4 {
        return invalid(format!(
            "projection study measures H^3 errors and needs degree >= 3 (r >= 4), got r = {}",
            cfg.space.r
        ));
    }
    let v = NonSmoothV::new();
    let rows = cfg
        .ns
        .par_iter()
        .map(|&n| -> Result<RateRow> {
            let mesh = cfg.family.build(n)?;
            let h_max = mesh.h_max();
            let space = SplineSpace::new(mesh, cfg.space.r, cfg.space.mu, false)?;
            let projector = Projector::new(space, cfg.quad_points)?;
            let norms = match cfg.target {
                ProjectionTarget::Smooth => {
                    let pf = projector.project(|x| smooth_v(x, 0), &[])?;
                    error_norms(&pf, smooth_v, &[], 3, cfg.norms)?
                }
                ProjectionTarget::NonSmooth => {
                    let pf = projector.project(|x| v.eval(x, 0), v.breaks())?;
                    error_norms(&pf, |x, d| v.eval(x, d), v.breaks(), 3, cfg.norms)?
                }
            };
            Ok(RateRow {
                resolution: n,
                measure: h_max,
                errors: Some(vec![
                    norms.l2,
                    norms.h1_semi,
                    norms.h2_semi.unwrap_or(f64::NAN),
                    norms.h3_semi.unwrap_or(f64::NAN),
                    norms.h3.unwrap_or(f64::NAN),
                    norms.linf,
                ]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        title: format!(
            "projection study: r={} mu={} mesh={} target={}",
            cfg.space.r,
            cfg.space.mu,
            cfg.family,
            cfg.target.name()
        ),
        metadata: vec![
            ("study".into(), "projection".into()),
            ("r".into(), cfg.space.r.to_string()),
            ("mu".into(), cfg.space.mu.to_string()),
            ("mesh".into(), cfg.family.to_string()),
            ("target".into(), cfg.target.name().into()),
        ],
        measure_label: "h_max".into(),
        columns: PROJECTION_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}
