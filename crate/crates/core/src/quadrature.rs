//! Gauss–Legendre rules and element-wise integration over a mesh.

use crate::error::{invalid, Result};
use crate::mesh::Mesh;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

pub const MAX_POINTS: usize = 32;

impl QuadratureRule {
    /// Nodes and weights by Newton iteration on the Legendre three-term
    /// recurrence, starting from the Tricomi approximation of the roots.
    pub fn gauss(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_POINTS {
            return invalid(format!("gauss rule needs 1..={MAX_POINTS} points, got {n}"));
        }
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            points[i] = -x;
            points[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&p, &w)| (mid + half * p, half * w))
    }

    /// `int_a^b f`.
    pub fn integrate_interval(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Checks that `breaks` is strictly increasing and inside `(0, 1)`.
pub fn validate_breaks(breaks: &[f64]) -> Result<()> {
    if breaks.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
        return invalid("extra breakpoints must lie in the open interval (0, 1)");
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("extra breakpoints must be strictly increasing");
    }
    Ok(())
}

/// Splits every element at the points of `breaks` falling strictly inside it.
/// Yields `(element, a, b)` in left-to-right order. `breaks` must already be
/// validated.
pub fn subintervals<'a>(
    mesh: &'a Mesh,
    breaks: &'a [f64],
) -> impl Iterator<Item = (usize, f64, f64)> + 'a {
    (0..mesh.num_elements()).flat_map(move |e| {
        let (a, b) = mesh.element(e);
        let inner = breaks.iter().copied().filter(move |&x| x > a && x < b);
        let mut cuts = vec![a];
        cuts.extend(inner);
        cuts.push(b);
        (0..cuts.len() - 1)
            .map(move |j| (e, cuts[j], cuts[j + 1]))
            .collect::<Vec<_>>()
    })
}

/// `int_0^1 f` as a sum of Gauss sums over the (split) elements of `mesh`.
pub fn integrate(
    mesh: &Mesh,
    rule: &QuadratureRule,
    mut f: impl FnMut(f64) -> f64,
    extra_breaks: &[f64],
) -> Result<f64> {
    validate_breaks(extra_breaks)?;
    Ok(subintervals(mesh, extra_breaks)
        .map(|(_, a, b)| rule.integrate_interval(a, b, &mut f))
        .sum())
}
