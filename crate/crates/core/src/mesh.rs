//! Partitions of `[0, 1]`.
//!
//! Three families are provided: the uniform mesh, the alternating
//! `1.2h / 0.8h` mesh (`N` even) and the alternating `h/2 / 3h/2` mesh
//! (`N` odd). Their quasiuniformity ratios are 1, 1.5 and 3.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    Uniform,
    /// Lengths `1.2h` on odd elements and `0.8h` on even ones, `h = 1/N`.
    QuasiA,
    /// Lengths `h/2` on odd elements and `3h/2` on even ones, `h = 2/(2N - 1)`.
    QuasiB,
}

impl MeshFamily {
    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::QuasiA => "quasi-a",
            MeshFamily::QuasiB => "quasi-b",
        }
    }

    /// Whether `n` is an admissible element count for this family.
    pub fn accepts(self, n: usize) -> bool {
        match self {
            MeshFamily::Uniform => n >= 1,
            MeshFamily::QuasiA => n >= 2 && n.is_multiple_of(2),
            MeshFamily::QuasiB => n % 2 == 1,
        }
    }

    pub fn build(self, n: usize) -> Result<Mesh> {
        match self {
            MeshFamily::Uniform => Mesh::uniform(n),
            MeshFamily::QuasiA => Mesh::quasiuniform_a(n),
            MeshFamily::QuasiB => Mesh::quasiuniform_b(n),
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshFamily::Uniform),
            "quasi-a" => Ok(MeshFamily::QuasiA),
            "quasi-b" => Ok(MeshFamily::QuasiB),
            other => invalid(format!(
                "unknown mesh family `{other}` (expected uniform, quasi-a or quasi-b)"
            )),
        }
    }
}

/// An ordered partition `0 = x_1 < x_2 < ... < x_{N+1} = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    family: MeshFamily,
    breakpoints: Vec<f64>,
    lengths: Vec<f64>,
    nominal_h: f64,
}

impl Mesh {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("uniform mesh needs at least one element");
        }
        let h = 1.0 / n as f64;
        let points = (0..=n).map(|i| i as f64 / n as f64).collect();
        Ok(Self::from_points(MeshFamily::Uniform, points, h))
    }

    pub fn quasiuniform_a(n: usize) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return invalid(format!(
                "quasi-a mesh needs a positive even number of elements, got {n}"
            ));
        }
        let h = 1.0 / n as f64;
        // Every pair of elements spans exactly 2h.
        let points = (0..=n)
            .map(|i| {
                let pairs = (i / 2) as f64;
                let odd = if i % 2 == 1 { 1.2 * h } else { 0.0 };
                2.0 * pairs * h + odd
            })
            .collect();
        Ok(Self::from_points(MeshFamily::QuasiA, points, h))
    }

    pub fn quasiuniform_b(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return invalid(format!(
                "quasi-b mesh needs an odd number of elements, got {n}; use the uniform mesh for even N"
            ));
        }
        let h = 2.0 / (2 * n - 1) as f64;
        // A pair (short, long) spans 2h; odd-indexed elements are short.
        let points = (0..=n)
            .map(|i| {
                let pairs = (i / 2) as f64;
                let odd = if i % 2 == 1 { 0.5 * h } else { 0.0 };
                2.0 * pairs * h + odd
            })
            .collect();
        Ok(Self::from_points(MeshFamily::QuasiB, points, h))
    }

    fn from_points(family: MeshFamily, mut breakpoints: Vec<f64>, nominal_h: f64) -> Self {
        if let Some(last) = breakpoints.last_mut() {
            *last = 1.0;
        }
        breakpoints[0] = 0.0;
        let lengths = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            family,
            breakpoints,
            lengths,
            nominal_h,
        }
    }

    pub fn family(&self) -> MeshFamily {
        self.family
    }

    /// Number of elements `N`.
    pub fn num_elements(&self) -> usize {
        self.lengths.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn element_lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.breakpoints[e], self.breakpoints[e + 1])
    }

    pub fn h_max(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn quasiuniformity_ratio(&self) -> f64 {
        self.h_max() / self.h_min()
    }

    /// The family parameter `h` used to define the mesh and the Courant
    /// number: `1/N` for the uniform and quasi-a meshes, `2/(2N-1)` for quasi-b.
    pub fn nominal_h(&self) -> f64 {
        self.nominal_h
    }

    /// Index of the element containing `x`. Points on an interior breakpoint
    /// belong to the element on their right; `x = 1` belongs to the last element.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.num_elements();
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// One-column CSV of the breakpoints.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x\n");
        for x in &self.breakpoints {
            out.push_str(&format!("{x:.17e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_points(mesh: &Mesh, expected: &[f64]) {
        assert_eq!(mesh.breakpoints().len(), expected.len());
        for (a, b) in mesh.breakpoints().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn uniform_examples() {
        assert_points(&Mesh::uniform(4).unwrap(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_points(&Mesh::uniform(1).unwrap(), &[0.0, 1.0]);
        let m = Mesh::uniform(60).unwrap();
        assert!((m.h_max() - 1.0 / 60.0).abs() < 1e-16);
        assert!((m.quasiuniformity_ratio() - 1.0).abs() < 1e-12);
        assert!(Mesh::uniform(0).is_err());
    }

    #[test]
    fn quasi_a_examples() {
        assert_points(
            &Mesh::quasiuniform_a(4).unwrap(),
            &[0.0, 0.3, 0.5, 0.8, 1.0],
        );
        assert_points(&Mesh::quasiuniform_a(2).unwrap(), &[0.0, 0.6, 1.0]);
        let m = Mesh::quasiuniform_a(160).unwrap();
        assert!((m.quasiuniformity_ratio() - 1.5).abs() < 1e-12);
        assert!(matches!(
            Mesh::quasiuniform_a(5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn quasi_b_examples() {
        let m = Mesh::quasiuniform_b(3).unwrap();
        assert_points(&m, &[0.0, 0.2, 0.8, 1.0]);
        assert!((m.nominal_h() - 0.4).abs() < 1e-16);

        let m = Mesh::quasiuniform_b(9).unwrap();
        let h = 2.0 / 17.0;
        let short = m
            .element_lengths()
            .iter()
            .filter(|&&l| (l - h / 2.0).abs() < 1e-14);
        let long = m
            .element_lengths()
            .iter()
            .filter(|&&l| (l - 1.5 * h).abs() < 1e-14);
        assert_eq!(short.count(), 5);
        assert_eq!(long.count(), 4);
        let total: f64 = m.element_lengths().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((m.quasiuniformity_ratio() - 3.0).abs() < 1e-12);
        assert!(Mesh::quasiuniform_b(8).is_err());
    }

    #[test]
    fn locate_conventions() {
        let m = Mesh::uniform(4).unwrap();
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.25), 1);
        assert_eq!(m.locate(0.2499), 0);
        assert_eq!(m.locate(1.0), 3);
    }

    #[test]
    fn csv_has_one_row_per_breakpoint() {
        let csv = Mesh::uniform(3).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv.lines().next(), Some("x"));
    }

    #[test]
    fn family_parsing() {
        for fam in [MeshFamily::Uniform, MeshFamily::QuasiA, MeshFamily::QuasiB] {
            assert_eq!(fam.name().parse::<MeshFamily>().unwrap(), fam);
        }
        assert!("graded".parse::<MeshFamily>().is_err());
    }
}
