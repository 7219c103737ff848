//! Mass matrices, L2 projections onto `S_h` and `S_{h,0}`, and error norms
//! up to `H^3`.

use std::sync::Arc;

use crate::banded::BandedSpdMatrix;
use crate::error::{invalid, Result};
use crate::quadrature::{subintervals, validate_breaks, QuadratureRule};
use crate::spline::{BasisTable, SplineSpace, MAX_DERIV};

/// Default number of Gauss points per (sub-)element for a space of order `r`.
pub fn default_quad_points(r: usize) -> usize {
    r + 2
}

/// `M_ij = (B_i, B_j)` over the degrees of freedom of `space`.
pub fn assemble_mass(space: &SplineSpace, table: &BasisTable) -> Result<BandedSpdMatrix> {
    let r = space.order();
    let mut mass = BandedSpdMatrix::zeros(space.dim(), space.bandwidth());
    let mut local = vec![0.0; r * r];
    for e in 0..space.mesh().num_elements() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..table.points_per_element() {
            let (_, w) = table.node(e, q);
            let b = table.basis(e, q, 0);
            for i in 0..r {
                let wb = w * b[i];
                for j in 0..r {
                    local[i * r + j] += wb * b[j];
                }
            }
        }
        let first = space.first_active(e);
        for i in 0..r {
            let Some(di) = space.dof(first + i) else {
                continue;
            };
            for j in 0..r {
                if let Some(dj) = space.dof(first + j) {
                    mass.add(di, dj, local[i * r + j])?;
                }
            }
        }
    }
    Ok(mass)
}

/// A spline space together with its quadrature tables and Gram matrix.
#[derive(Debug, Clone)]
pub struct Projector {
    space: Arc<SplineSpace>,
    rule: QuadratureRule,
    table: BasisTable,
    mass: Arc<BandedSpdMatrix>,
}

impl Projector {
    /// `quad_points` defaults to `r + 2` per element.
    pub fn new(space: SplineSpace, quad_points: Option<usize>) -> Result<Self> {
        let n = quad_points.unwrap_or_else(|| default_quad_points(space.order()));
        let rule = QuadratureRule::gauss(n)?;
        let table = space.tabulate(&rule, 1.min(space.degree()));
        let mass = assemble_mass(&space, &table)?;
        Ok(Self {
            space: Arc::new(space),
            rule,
            table,
            mass: Arc::new(mass),
        })
    }

    pub fn space(&self) -> &Arc<SplineSpace> {
        &self.space
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Basis values and first derivatives at the Gauss points.
    pub fn table(&self) -> &BasisTable {
        &self.table
    }

    pub fn mass(&self) -> &BandedSpdMatrix {
        &self.mass
    }

    /// `b_i = (f, B_i)`, integrating over elements split at `breaks`.
    pub fn load_vector(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> Result<Vec<f64>> {
        validate_breaks(breaks)?;
        let space = &*self.space;
        let r = space.order();
        let mut b = vec![0.0; space.dim()];
        let mut vals = vec![0.0; r];
        let mesh = space.mesh();
        let mut add = |e: usize, x: f64, w: f64, vals: &[f64]| {
            let fx = w * f(x);
            let first = space.first_active(e);
            for (j, v) in vals.iter().enumerate() {
                if let Some(d) = space.dof(first + j) {
                    b[d] += fx * v;
                }
            }
        };
        for (e, lo, hi) in subintervals(mesh, breaks) {
            if (lo, hi) == mesh.element(e) {
                for q in 0..self.table.points_per_element() {
                    let (x, w) = self.table.node(e, q);
                    add(e, x, w, self.table.basis(e, q, 0));
                }
            } else {
                for (x, w) in self.rule.mapped(lo, hi) {
                    space.basis_in_element(e, x, 0, &mut vals);
                    add(e, x, w, &vals);
                }
            }
        }
        Ok(b)
    }

    /// L2 projection of `f`: solves `M c = b`, `b_i = (f, B_i)`.
    pub fn project(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> Result<ProjectedFunction> {
        let mut c = self.load_vector(f, breaks)?;
        self.mass.solve_in_place(&mut c)?;
        Ok(ProjectedFunction {
            space: Arc::clone(&self.space),
            coeffs: c,
        })
    }

    /// `||sum_i c_i B_i||_{L2}` through the Gram matrix.
    pub fn l2_norm_of_coeffs(&self, coeffs: &[f64]) -> f64 {
        self.mass.quadratic_form(coeffs).max(0.0).sqrt()
    }
}

/// One-shot L2 projection onto `space` with the default quadrature.
pub fn project(
    space: &SplineSpace,
    f: impl Fn(f64) -> f64,
    breaks: &[f64],
) -> Result<ProjectedFunction> {
    Projector::new(space.clone(), None)?.project(f, breaks)
}

/// An element of a spline space given by its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedFunction {
    space: Arc<SplineSpace>,
    coeffs: Vec<f64>,
}

impl ProjectedFunction {
    pub fn new(space: Arc<SplineSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return invalid(format!(
                "coefficient vector has length {}, space dimension is {}",
                coeffs.len(),
                space.dim()
            ));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: Arc<SplineSpace>) -> Self {
        let coeffs = vec![0.0; space.dim()];
        Self { space, coeffs }
    }

    pub fn space(&self) -> &Arc<SplineSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn eval(&self, x: f64, deriv: usize) -> Result<f64> {
        self.space.eval_function(&self.coeffs, x, deriv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Gauss points per (sub-)element; `None` means `r + 2`.
    pub quad_points: Option<usize>,
    /// Interior sampling points per element for the maximum norm.
    pub linf_samples: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            quad_points: None,
            linf_samples: 20,
        }
    }
}

/// Norms of `pf - f`. Seminorms above the requested order are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
    pub h1_semi: f64,
    pub h2_semi: Option<f64>,
    pub h3_semi: Option<f64>,
    /// Full `H^3` norm, present when `h3_semi` is.
    pub h3: Option<f64>,
}

/// L2, maximum and Sobolev (semi)norms of `pf - f` up to derivative order
/// `max_order` (1 to 3). `f(x, k)` must return the `k`-th derivative of the
/// target; `breaks` lists the points where the target loses smoothness.
pub fn error_norms(
    pf: &ProjectedFunction,
    f: impl Fn(f64, usize) -> f64,
    breaks: &[f64],
    max_order: usize,
    opts: NormOptions,
) -> Result<ErrorNorms> {
    let space = &**pf.space();
    if max_order == 0 || max_order > MAX_DERIV {
        return invalid(format!(
            "error norm order must be 1..={MAX_DERIV}, got {max_order}"
        ));
    }
    if max_order > space.degree() {
        return invalid(format!(
            "H^{max_order} error requested for a space of degree {}",
            space.degree()
        ));
    }
    validate_breaks(breaks)?;
    let rule = QuadratureRule::gauss(
        opts.quad_points
            .unwrap_or(default_quad_points(space.order())),
    )?;
    let r = space.order();
    let mesh = space.mesh();
    let full = space.to_full(pf.coeffs());
    let mut vals = vec![0.0; (max_order + 1) * r];
    let eval_err = |e: usize, x: f64, k: usize, vals: &[f64]| -> f64 {
        let first = space.first_active(e);
        let row = &vals[k * r..(k + 1) * r];
        let approx: f64 = row
            .iter()
            .zip(&full[first..first + r])
            .map(|(b, c)| b * c)
            .sum();
        approx - f(x, k)
    };

    let mut sq = [0.0f64; MAX_DERIV + 1];
    for (e, lo, hi) in subintervals(mesh, breaks) {
        for (x, w) in rule.mapped(lo, hi) {
            space.basis_in_element(e, x, max_order, &mut vals);
            for (k, s) in sq.iter_mut().enumerate().take(max_order + 1) {
                let d = eval_err(e, x, k, &vals);
                *s += w * d * d;
            }
        }
    }

    let m = opts.linf_samples;
    let mut linf: f64 = 0.0;
    let mut sample = |e: usize, x: f64, vals: &mut [f64]| {
        space.basis_in_element(e, x, 0, &mut vals[..r]);
        linf = linf.max(eval_err(e, x, 0, vals).abs());
    };
    for e in 0..mesh.num_elements() {
        let (a, b) = mesh.element(e);
        for i in 0..=m + 1 {
            let x = if i == m + 1 {
                b
            } else {
                a + (b - a) * i as f64 / (m + 1) as f64
            };
            sample(e, x, &mut vals);
        }
        for &x in breaks.iter().filter(|&&x| x > a && x < b) {
            sample(e, x, &mut vals);
        }
    }

    let h2_semi = (max_order >= 2).then(|| sq[2].sqrt());
    let h3_semi = (max_order >= 3).then(|| sq[3].sqrt());
    let h3 = (max_order >= 3).then(|| (sq[0] + sq[1] + sq[2] + sq[3]).sqrt());
    Ok(ErrorNorms {
        l2: sq[0].sqrt(),
        linf,
        h1_semi: sq[1].sqrt(),
        h2_semi,
        h3_semi,
        h3,
    })
}
