use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

/// Symmetric positive definite band matrix with `bandwidth` sub-diagonals.
///
/// Both triangles are stored so that assembly errors show up as asymmetry.
/// The Cholesky factor is computed on the first solve and cached; call
/// [`BandedSpdMatrix::factorize`] up front to share a matrix across threads
/// without racing on the first solve.
#[derive(Debug)]
pub struct BandedSpdMatrix {
    dim: usize,
    bandwidth: usize,
    /// Row `i` holds columns `i - bw ..= i + bw` at offsets `0 ..= 2 bw`.
    entries: Vec<f64>,
    factor: OnceLock<std::result::Result<Vec<f64>, Error>>,
}

impl Clone for BandedSpdMatrix {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            bandwidth: self.bandwidth,
            entries: self.entries.clone(),
            factor: OnceLock::new(),
        }
    }
}

impl BandedSpdMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth,
            entries: vec![0.0; dim * (2 * bandwidth + 1)],
            factor: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let bw = self.bandwidth;
        if i >= self.dim || j >= self.dim || i.abs_diff(j) > bw {
            return None;
        }
        Some(i * (2 * bw + 1) + (j + bw - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.entries[s])
    }

    /// Adds `v` to entry `(i, j)` only. Invalidates a cached factorization.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let Some(s) = self.slot(i, j) else {
            return invalid(format!(
                "entry ({i}, {j}) is outside a band of width {} in dimension {}",
                self.bandwidth, self.dim
            ));
        };
        self.entries[s] += v;
        self.factor = OnceLock::new();
        Ok(())
    }

    /// `max |A - A^T|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i.saturating_sub(self.bandwidth)..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let bw = self.bandwidth;
        (0..self.dim)
            .map(|i| {
                let lo = i.saturating_sub(bw);
                let hi = (i + bw).min(self.dim - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Computes (or returns the cached) lower Cholesky factor.
    pub fn factorize(&self) -> Result<()> {
        self.cholesky().map(|_| ())
    }

    fn cholesky(&self) -> Result<&[f64]> {
        self.factor
            .get_or_init(|| self.compute_cholesky())
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// `L` stored row-wise as `l[i * (bw + 1) + (j + bw - i)]`, `j <= i`.
    fn compute_cholesky(&self) -> std::result::Result<Vec<f64>, Error> {
        let n = self.dim;
        let bw = self.bandwidth;
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.get(i, j);
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= l[i * w + (k + bw - i)] * l[j * w + (k + bw - j)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::SingularMatrix { row: i, pivot: s });
                    }
                    l[i * w + bw] = s.sqrt();
                } else {
                    l[i * w + (j + bw - i)] = s / l[j * w + bw];
                }
            }
        }
        Ok(l)
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        if b.len() != self.dim {
            return invalid(format!(
                "right-hand side has length {}, matrix dimension is {}",
                b.len(),
                self.dim
            ));
        }
        let l = self.cholesky()?;
        let n = self.dim;
        let bw = self.bandwidth;
        let w = bw + 1;
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= l[i * w + (k + bw - i)] * b[k];
            }
            b[i] = s / l[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= l[k * w + (i + bw - k)] * b[k];
            }
            b[i] = s / l[i * w + bw];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}
