//! Manufactured solutions of the forced shallow water system
//!
//! ```text
//!   eta_t + u_x + (eta u)_x = g_eta
//!   u_t + eta_x + u u_x     = g_u
//! ```
//!
//! with `u(0, t) = u(1, t) = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// A closed-form solution `(eta, u)` with the partial derivatives needed to
/// build its forcing and to measure errors.
pub trait ExactSolution: Send + Sync {
    fn eta(&self, x: f64, t: f64) -> f64;
    fn eta_x(&self, x: f64, t: f64) -> f64;
    fn eta_t(&self, x: f64, t: f64) -> f64;
    fn u(&self, x: f64, t: f64) -> f64;
    fn u_x(&self, x: f64, t: f64) -> f64;
    fn u_t(&self, x: f64, t: f64) -> f64;

    /// `g_eta = eta_t + u_x + (eta u)_x`.
    fn forcing_eta(&self, x: f64, t: f64) -> f64 {
        let (eta, u) = (self.eta(x, t), self.u(x, t));
        self.eta_t(x, t) + self.u_x(x, t) * (1.0 + eta) + self.eta_x(x, t) * u
    }

    /// `g_u = u_t + eta_x + u u_x`.
    fn forcing_u(&self, x: f64, t: f64) -> f64 {
        self.u_t(x, t) + self.eta_x(x, t) + self.u(x, t) * self.u_x(x, t)
    }
}

/// The two manufactured solutions used by the convergence studies.
///
/// * `One`: `eta = exp(2t) (x + cos(pi x) + 2)`, `u = exp(-x t) sin(pi x)`
/// * `Two`: `eta = exp(-4t^2) (x + cos(pi x))`, `u = exp(-x t) sin(pi x)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mms {
    One,
    Two,
}

impl Mms {
    pub fn id(self) -> u8 {
        match self {
            Mms::One => 1,
            Mms::Two => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Mms::One),
            2 => Ok(Mms::Two),
            other => invalid(format!(
                "unknown manufactured solution {other} (expected 1 or 2)"
            )),
        }
    }

    /// Time factor of `eta` and its derivative.
    fn time_factor(self, t: f64) -> (f64, f64) {
        match self {
            Mms::One => {
                let a = (2.0 * t).exp();
                (a, 2.0 * a)
            }
            Mms::Two => {
                let a = (-4.0 * t * t).exp();
                (a, -8.0 * t * a)
            }
        }
    }

    fn shift(self) -> f64 {
        match self {
            Mms::One => 2.0,
            Mms::Two => 0.0,
        }
    }
}

impl fmt::Display for Mms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Mms {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().parse::<u8>() {
            Ok(id) => Mms::from_id(id),
            Err(_) => invalid(format!(
                "manufactured solution id must be 1 or 2, got `{s}`"
            )),
        }
    }
}

impl ExactSolution for Mms {
    fn eta(&self, x: f64, t: f64) -> f64 {
        self.time_factor(t).0 * (x + (PI * x).cos() + self.shift())
    }

    fn eta_x(&self, x: f64, t: f64) -> f64 {
        self.time_factor(t).0 * (1.0 - PI * (PI * x).sin())
    }

    fn eta_t(&self, x: f64, t: f64) -> f64 {
        self.time_factor(t).1 * (x + (PI * x).cos() + self.shift())
    }

    fn u(&self, x: f64, t: f64) -> f64 {
        (-x * t).exp() * (PI * x).sin()
    }

    fn u_x(&self, x: f64, t: f64) -> f64 {
        (-x * t).exp() * (PI * (PI * x).cos() - t * (PI * x).sin())
    }

    fn u_t(&self, x: f64, t: f64) -> f64 {
        -x * (-x * t).exp() * (PI * x).sin()
    }
}
