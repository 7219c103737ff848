//! Clamped B-spline spaces `S_h^{r,mu}` of degree `r - 1` and smoothness
//! `C^mu` over a [`Mesh`], and the subspace vanishing at both endpoints.
//!
//! Interior breakpoints are repeated `r - 1 - mu` times in the knot vector;
//! the endpoints are repeated `r` times. Only the first and last B-splines
//! are nonzero at `x = 0` and `x = 1`, so the zero-boundary subspace is
//! spanned by all the others.

use crate::error::{invalid, Result};
use crate::mesh::Mesh;
use crate::quadrature::QuadratureRule;

/// Highest derivative order supported by evaluation.
pub const MAX_DERIV: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    mesh: Mesh,
    order: usize,
    smoothness: usize,
    multiplicity: usize,
    knots: Vec<f64>,
    full_dim: usize,
    zero_bc: bool,
}

impl SplineSpace {
    /// Spline space of order `r` (degree `r - 1`) and smoothness `mu`,
    /// `r >= 3`, `1 <= mu <= r - 2`.
    pub fn new(mesh: Mesh, r: usize, mu: usize, zero_bc: bool) -> Result<Self> {
        if r < 3 {
            return invalid(format!("spline order r must be at least 3, got {r}"));
        }
        if mu < 1 || mu > r - 2 {
            return invalid(format!(
                "smoothness mu must satisfy 1 <= mu <= r - 2 = {}, got {mu}",
                r - 2
            ));
        }
        let n = mesh.num_elements();
        let multiplicity = r - 1 - mu;
        let mut knots = Vec::with_capacity(2 * r + (n - 1) * multiplicity);
        knots.extend(std::iter::repeat_n(0.0, r));
        for &x in &mesh.breakpoints()[1..n] {
            knots.extend(std::iter::repeat_n(x, multiplicity));
        }
        knots.extend(std::iter::repeat_n(1.0, r));
        let full_dim = (n - 1) * multiplicity + r;
        if zero_bc && full_dim < 3 {
            return invalid("zero-boundary space would be empty");
        }
        Ok(Self {
            mesh,
            order: r,
            smoothness: mu,
            multiplicity,
            knots,
            full_dim,
            zero_bc,
        })
    }

    /// The same basis with the boundary restriction switched on or off.
    pub fn with_zero_bc(&self, zero_bc: bool) -> Self {
        Self {
            zero_bc,
            ..self.clone()
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// `r`, the number of B-splines active on each element.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.order - 1
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn zero_bc(&self) -> bool {
        self.zero_bc
    }

    /// Number of degrees of freedom (after the boundary restriction).
    pub fn dim(&self) -> usize {
        if self.zero_bc {
            self.full_dim - 2
        } else {
            self.full_dim
        }
    }

    /// Number of B-splines before the boundary restriction.
    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Maps a B-spline index to its degree of freedom, if it has one.
    #[inline]
    pub fn dof(&self, full_index: usize) -> Option<usize> {
        if !self.zero_bc {
            Some(full_index)
        } else if full_index == 0 || full_index + 1 == self.full_dim {
            None
        } else {
            Some(full_index - 1)
        }
    }

    /// Largest `|i - j|` for which B-splines `i` and `j` can overlap.
    pub fn bandwidth(&self) -> usize {
        self.order - 1
    }

    /// Index of the first B-spline active on element `e`.
    #[inline]
    pub fn first_active(&self, e: usize) -> usize {
        e * self.multiplicity
    }

    /// Derivatives `0..=nd` of the `r` B-splines active on element `e`,
    /// evaluated at `x`. Row `k` of the output (`out[k * r..(k + 1) * r]`)
    /// holds the `k`-th derivatives. `x` is not required to lie in the
    /// element; the polynomial pieces are extended.
    pub fn basis_in_element(&self, e: usize, x: f64, nd: usize, out: &mut [f64]) {
        let p = self.order - 1;
        let span = p + e * self.multiplicity;
        ders_basis_funs(&self.knots, span, x, p, nd, out);
    }

    /// Values of the `r` B-splines supported at `x`, differentiated `deriv`
    /// times, together with the index of the first one. Indices refer to the
    /// full (unrestricted) basis; see [`SplineSpace::dof`].
    pub fn eval_basis(&self, x: f64, deriv: usize) -> Result<(usize, Vec<f64>)> {
        self.check_point(x, deriv)?;
        let e = self.mesh.locate(x);
        let r = self.order;
        let mut buf = vec![0.0; (deriv + 1) * r];
        self.basis_in_element(e, x, deriv, &mut buf);
        Ok((self.first_active(e), buf[deriv * r..].to_vec()))
    }

    /// `sum_i c_i B_i^{(deriv)}(x)` with `coeffs` in degree-of-freedom numbering.
    pub fn eval_function(&self, coeffs: &[f64], x: f64, deriv: usize) -> Result<f64> {
        if coeffs.len() != self.dim() {
            return invalid(format!(
                "coefficient vector has length {}, space dimension is {}",
                coeffs.len(),
                self.dim()
            ));
        }
        self.check_point(x, deriv)?;
        let e = self.mesh.locate(x);
        Ok(self.eval_in_element(coeffs, e, x, deriv))
    }

    /// Unchecked evaluation on a known element.
    pub(crate) fn eval_in_element(&self, coeffs: &[f64], e: usize, x: f64, deriv: usize) -> f64 {
        let r = self.order;
        let mut buf = [0.0; (MAX_DERIV + 1) * MAX_STACK_ORDER];
        let mut heap;
        let vals: &mut [f64] = if r <= MAX_STACK_ORDER {
            &mut buf[..(deriv + 1) * r]
        } else {
            heap = vec![0.0; (deriv + 1) * r];
            &mut heap
        };
        self.basis_in_element(e, x, deriv, vals);
        let first = self.first_active(e);
        let row = &vals[deriv * r..(deriv + 1) * r];
        row.iter()
            .enumerate()
            .filter_map(|(j, b)| self.dof(first + j).map(|d| coeffs[d] * b))
            .sum()
    }

    fn check_point(&self, x: f64, deriv: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return invalid(format!("evaluation point {x} is outside [0, 1]"));
        }
        if deriv > MAX_DERIV || deriv > self.degree() {
            return invalid(format!(
                "derivative order {deriv} exceeds min(degree {}, {MAX_DERIV})",
                self.degree()
            ));
        }
        Ok(())
    }

    /// Expands degree-of-freedom coefficients to the full basis (zero
    /// boundary coefficients for a restricted space).
    pub fn to_full(&self, coeffs: &[f64]) -> Vec<f64> {
        if !self.zero_bc {
            return coeffs.to_vec();
        }
        let mut full = vec![0.0; self.full_dim];
        full[1..self.full_dim - 1].copy_from_slice(coeffs);
        full
    }

    /// Greville abscissae of the full basis: the coefficients of the
    /// identity function `x`.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.order - 1;
        (0..self.full_dim)
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Tabulates the active basis functions and their derivatives up to
    /// `nd` at the Gauss points of every element.
    pub fn tabulate(&self, rule: &QuadratureRule, nd: usize) -> BasisTable {
        let r = self.order;
        let nq = rule.len();
        let n = self.mesh.num_elements();
        let stride = (nd + 1) * r;
        let mut values = vec![0.0; n * nq * stride];
        let mut points = Vec::with_capacity(n * nq);
        let mut weights = Vec::with_capacity(n * nq);
        for e in 0..n {
            let (a, b) = self.mesh.element(e);
            for (q, (x, w)) in rule.mapped(a, b).enumerate() {
                points.push(x);
                weights.push(w);
                let off = (e * nq + q) * stride;
                self.basis_in_element(e, x, nd, &mut values[off..off + stride]);
            }
        }
        BasisTable {
            order: r,
            nq,
            nd,
            points,
            weights,
            values,
        }
    }
}

const MAX_STACK_ORDER: usize = 12;

/// Basis values at the quadrature points of every element.
#[derive(Debug, Clone)]
pub struct BasisTable {
    order: usize,
    nq: usize,
    nd: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl BasisTable {
    pub fn points_per_element(&self) -> usize {
        self.nq
    }

    pub fn max_deriv(&self) -> usize {
        self.nd
    }

    /// Physical point and mapped weight of node `q` on element `e`.
    #[inline]
    pub fn node(&self, e: usize, q: usize) -> (f64, f64) {
        let i = e * self.nq + q;
        (self.points[i], self.weights[i])
    }

    /// The `r` values of the `k`-th derivatives of the active B-splines.
    #[inline]
    pub fn basis(&self, e: usize, q: usize, k: usize) -> &[f64] {
        let r = self.order;
        let off = (e * self.nq + q) * (self.nd + 1) * r + k * r;
        &self.values[off..off + r]
    }
}

/// Nonzero B-splines of degree `p` and their derivatives up to `nd` at `x`
/// in knot span `span` (Cox–de Boor recursion with the derivative
/// recurrence of Piegl and Tiller). `out` is row-major `(nd + 1) x (p + 1)`.
fn ders_basis_funs(knots: &[f64], span: usize, x: f64, p: usize, nd: usize, out: &mut [f64]) {
    let r = p + 1;
    let mut ndu = vec![0.0; r * r];
    let mut left = vec![0.0; r];
    let mut right = vec![0.0; r];
    let idx = |i: usize, j: usize| i * r + j;

    ndu[idx(0, 0)] = 1.0;
    for j in 1..=p {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for k in 0..j {
            ndu[idx(j, k)] = right[k + 1] + left[j - k];
            let temp = ndu[idx(k, j - 1)] / ndu[idx(j, k)];
            ndu[idx(k, j)] = saved + right[k + 1] * temp;
            saved = left[j - k] * temp;
        }
        ndu[idx(j, j)] = saved;
    }
    for j in 0..=p {
        out[j] = ndu[idx(j, p)];
    }
    if nd == 0 {
        return;
    }

    let mut a = [vec![0.0; r], vec![0.0; r]];
    for k_fn in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=nd {
            let mut d = 0.0;
            let rk = k_fn as isize - k as isize;
            let pk = p as isize - k as isize;
            if k_fn >= k {
                let v = a[s1][0] / ndu[idx((pk + 1) as usize, rk as usize)];
                a[s2][0] = v;
                d = v * ndu[idx(rk as usize, pk as usize)];
            }
            let j1: isize = if rk >= -1 { 1 } else { -rk };
            let j2: isize = if (k_fn as isize) - 1 <= pk {
                k as isize - 1
            } else {
                p as isize - k_fn as isize
            };
            let mut j = j1;
            while j <= j2 {
                let ju = j as usize;
                let v =
                    (a[s1][ju] - a[s1][ju - 1]) / ndu[idx((pk + 1) as usize, (rk + j) as usize)];
                a[s2][ju] = v;
                d += v * ndu[idx((rk + j) as usize, pk as usize)];
                j += 1;
            }
            if k_fn as isize <= pk {
                let v = -a[s1][k - 1] / ndu[idx((pk + 1) as usize, k_fn)];
                a[s2][k] = v;
                d += v * ndu[idx(k_fn, pk as usize)];
            }
            out[k * r + k_fn] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=nd {
        for j in 0..=p {
            out[k * r + j] *= factor;
        }
        factor *= p as f64 - k as f64;
    }
}
