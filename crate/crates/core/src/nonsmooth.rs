//! A `C^2` function on `[0, 1]` whose third derivative is piecewise smooth
//! with jumps at `1/4`, `1/2` and `3/4`:
//!
//! ```text
//!   v'''(x) = exp(x)     0   <= x < 1/4
//!             sin(pi x)  1/4 <= x < 1/2
//!             exp(-x)    1/2 <= x < 3/4
//!             cos(pi x)  3/4 <= x <= 1
//! ```
//!
//! normalized by `v(0) = v'(0) = v''(0) = 0`. It lies in `H^3` but not in
//! `H^4`. On each piece `v`, `v'`, `v''` are the exact repeated integrals of
//! `v'''` from the left end of the piece, summed from their Taylor series
//! (the pieces are entire functions), which avoids the cancellation of the
//! closed-form antiderivatives near the piece boundaries.

use std::f64::consts::PI;

const JUMPS: [f64; 3] = [0.25, 0.5, 0.75];
const PIECE_STARTS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];
const TAYLOR_TERMS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Exp,
    SinPi,
    ExpNeg,
    CosPi,
}

impl Branch {
    fn value(self, x: f64) -> f64 {
        match self {
            Branch::Exp => x.exp(),
            Branch::SinPi => (PI * x).sin(),
            Branch::ExpNeg => (-x).exp(),
            Branch::CosPi => (PI * x).cos(),
        }
    }

    /// `n`-th derivative at `x`.
    fn derivative(self, n: usize, x: f64) -> f64 {
        let quarter_turns = (n % 4) as f64 * 0.5 * PI;
        match self {
            Branch::Exp => x.exp(),
            Branch::SinPi => PI.powi(n as i32) * (PI * x + quarter_turns).sin(),
            Branch::ExpNeg => {
                let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                s * (-x).exp()
            }
            Branch::CosPi => PI.powi(n as i32) * (PI * x + quarter_turns).cos(),
        }
    }
}

#[derive(Debug, Clone)]
struct Piece {
    branch: Branch,
    start: f64,
    /// `v''`, `v'`, `v` at `start`.
    d2: f64,
    d1: f64,
    d0: f64,
    /// Derivatives of the branch at `start`.
    taylor: Vec<f64>,
}

impl Piece {
    /// `int_start^x` applied `j` times to the branch, `j` in 1..=3.
    fn repeated_integral(&self, j: usize, d: f64) -> f64 {
        // term_n = g^{(n)}(start) d^{n+j} / (n+j)!
        let mut power = (1..=j).fold(1.0, |acc, i| acc * d / i as f64);
        let mut sum = 0.0;
        for (n, g) in self.taylor.iter().enumerate() {
            let term = g * power;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && n > 4 {
                break;
            }
            power *= d / (n + j + 1) as f64;
        }
        sum
    }

    fn eval(&self, x: f64, deriv: usize) -> f64 {
        let d = x - self.start;
        match deriv {
            0 => self.d0 + self.d1 * d + 0.5 * self.d2 * d * d + self.repeated_integral(3, d),
            1 => self.d1 + self.d2 * d + self.repeated_integral(2, d),
            2 => self.d2 + self.repeated_integral(1, d),
            3 => self.branch.value(x),
            _ => 0.0,
        }
    }
}

/// The non-smooth projection target `v` and its derivatives up to order 3.
#[derive(Debug, Clone)]
pub struct NonSmoothV {
    pieces: Vec<Piece>,
}

impl Default for NonSmoothV {
    fn default() -> Self {
        Self::new()
    }
}

impl NonSmoothV {
    pub fn new() -> Self {
        let branches = [Branch::Exp, Branch::SinPi, Branch::ExpNeg, Branch::CosPi];
        let mut pieces: Vec<Piece> = Vec::with_capacity(4);
        let (mut d0, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, (&branch, &start)) in branches.iter().zip(&PIECE_STARTS).enumerate() {
            if k > 0 {
                let prev = &pieces[k - 1];
                d2 = prev.eval(start, 2);
                d1 = prev.eval(start, 1);
                d0 = prev.eval(start, 0);
            }
            let taylor = (0..TAYLOR_TERMS)
                .map(|n| branch.derivative(n, start))
                .collect();
            pieces.push(Piece {
                branch,
                start,
                d2,
                d1,
                d0,
                taylor,
            });
        }
        Self { pieces }
    }

    /// Points where `v'''` jumps.
    pub fn breaks(&self) -> &'static [f64] {
        &JUMPS
    }

    fn piece(&self, x: f64) -> &Piece {
        let k = JUMPS.partition_point(|&b| b <= x);
        &self.pieces[k]
    }

    /// `v^{(deriv)}(x)` for `deriv <= 3`; higher derivatives are reported as 0.
    pub fn eval(&self, x: f64, deriv: usize) -> f64 {
        self.piece(x).eval(x, deriv)
    }

    /// One-sided limit from the left of `v^{(deriv)}` at `x`.
    pub fn eval_left(&self, x: f64, deriv: usize) -> f64 {
        let k = JUMPS.partition_point(|&b| b < x);
        self.pieces[k].eval(x, deriv)
    }
}

/// The smooth target `sin(pi x / 2 + 1)`.
pub fn smooth_v(x: f64, deriv: usize) -> f64 {
    let a = 0.5 * PI;
    let phase = a * x + 1.0;
    match deriv % 4 {
        0 => a.powi(deriv as i32) * phase.sin(),
        1 => a.powi(deriv as i32) * phase.cos(),
        2 => -a.powi(deriv as i32) * phase.sin(),
        _ => -a.powi(deriv as i32) * phase.cos(),
    }
}
