//! Gragg-Bulirsch-Stoer extrapolation stepper for small complex systems.
//!
//! The modified midpoint rule has an error expansion in even powers of the
//! substep, so polynomial extrapolation in h² raises the order by two per
//! tableau column. Steps are adapted to a relative tolerance on the state
//! norm and are clipped so that every requested output abscissa is hit exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

/// Right-hand side of a first-order system y' = f(x, y).
pub trait System {
    fn rhs(&self, x: f64, y: &State) -> State;
}

impl<F: Fn(f64, &State) -> State> System for F {
    fn rhs(&self, x: f64, y: &State) -> State {
        self(x, y)
    }
}

const SEQUENCE: [usize; 10] = [2, 4, 6, 8, 10, 12, 14, 16, 18, 20];
const MAX_COLUMNS: usize = 9;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    pub rel_tol: f64,
    /// Floor for the error scale, guards against states passing through zero.
    pub abs_floor: f64,
    pub initial_step: f64,
    /// Largest step permitted; zero means unlimited.
    pub max_step: f64,
}

impl Stepper {
    pub fn new(rel_tol: f64) -> Self {
        Stepper {
            rel_tol,
            abs_floor: 1e-300,
            initial_step: 1e-2,
            max_step: 0.0,
        }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn with_initial_step(mut self, h: f64) -> Self {
        self.initial_step = h;
        self
    }

    /// Integrates from `(x0, y0)` through the abscissae `xs` (monotone in the
    /// direction of integration, possibly beginning with `x0`), returning the
    /// state at each abscissa and the largest accepted normalized error.
    pub fn integrate<S: System>(
        &self,
        sys: &S,
        x0: f64,
        y0: State,
        xs: &[f64],
    ) -> Result<(Vec<State>, f64)> {
        let mut out = Vec::with_capacity(xs.len());
        let mut x = x0;
        let mut y = y0;
        let dir = match xs.last() {
            Some(&last) if last < x0 => -1.0,
            _ => 1.0,
        };
        let mut h = self.initial_step.abs() * dir;
        let mut worst = 0.0f64;
        let mut steps = 0usize;
        for &target in xs {
            if (target - x) * dir < 0.0 {
                return Err(Error::Domain(format!(
                    "output abscissa {target} is behind the integration front {x}"
                )));
            }
            while (target - x) * dir > 0.0 {
                let remaining = target - x;
                if self.max_step > 0.0 && h.abs() > self.max_step {
                    h = self.max_step * dir;
                }
                let last = h.abs() >= remaining.abs() * (1.0 - 1e-12);
                let step = if last { remaining } else { h };
                match self.try_step(sys, x, &y, step) {
                    StepOutcome::Accepted { y: yn, err, next_factor } => {
                        x = if last { target } else { x + step };
                        y = yn;
                        worst = worst.max(err);
                        // a step truncated to hit an output point says little
                        // about the nominal step unless it was comparable
                        if !last || (next_factor < 1.0 && step.abs() >= 0.5 * h.abs()) {
                            h = step * next_factor;
                        }
                    }
                    StepOutcome::Rejected { factor, err } => {
                        h = step * factor;
                        if h.abs() < 1e-14 * x.abs().max(1.0) {
                            return Err(Error::numeric("Bulirsch-Stoer step size underflow", err, 1.0));
                        }
                    }
                }
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::numeric("Bulirsch-Stoer step budget", f64::NAN, 1.0));
                }
            }
            out.push(y);
        }
        Ok((out, worst))
    }

    fn try_step<S: System>(&self, sys: &S, x: f64, y: &State, big_h: f64) -> StepOutcome {
        let zero = [Complex64::new(0.0, 0.0); 2];
        let mut prev: [State; MAX_COLUMNS] = [zero; MAX_COLUMNS];
        let mut cur: [State; MAX_COLUMNS] = [zero; MAX_COLUMNS];
        let f0 = sys.rhs(x, y);
        let mut err = f64::INFINITY;
        for k in 0..MAX_COLUMNS {
            cur[0] = midpoint(sys, x, y, &f0, big_h, SEQUENCE[k]);
            // Neville extrapolation towards h -> 0 in powers of h^2
            for j in 1..=k {
                let ratio = (SEQUENCE[k] as f64 / SEQUENCE[k - j] as f64).powi(2);
                for i in 0..2 {
                    cur[j][i] = cur[j - 1][i] + (cur[j - 1][i] - prev[j - 1][i]) / (ratio - 1.0);
                }
            }
            if k >= 1 {
                let scale = self.abs_floor + self.rel_tol * norm(&cur[k]).max(norm(y));
                err = (0..2)
                    .map(|i| (cur[k][i] - cur[k - 1][i]).norm())
                    .fold(0.0, f64::max)
                    / scale;
                if err <= 1.0 {
                    let exponent = 1.0 / (2.0 * k as f64 + 1.0);
                    let mut factor = 0.94 * (0.65 / err.max(1e-30)).powf(exponent);
                    factor = factor.clamp(0.25, 4.0);
                    if k >= 6 {
                        factor = factor.min(1.0);
                    }
                    return StepOutcome::Accepted {
                        y: cur[k],
                        err,
                        next_factor: factor,
                    };
                }
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        let factor = (0.94 * (0.65 / err).powf(1.0 / (2.0 * MAX_COLUMNS as f64))).clamp(0.1, 0.7);
        StepOutcome::Rejected { factor, err }
    }
}

enum StepOutcome {
    Accepted { y: State, err: f64, next_factor: f64 },
    Rejected { factor: f64, err: f64 },
}

fn norm(y: &State) -> f64 {
    y[0].norm().max(y[1].norm())
}

fn midpoint<S: System>(sys: &S, x: f64, y: &State, f0: &State, big_h: f64, n: usize) -> State {
    let h = big_h / n as f64;
    let mut z0 = *y;
    let mut z1 = [y[0] + f0[0] * h, y[1] + f0[1] * h];
    for m in 1..n {
        let f = sys.rhs(x + m as f64 * h, &z1);
        let z2 = [z0[0] + f[0] * (2.0 * h), z0[1] + f[1] * (2.0 * h)];
        z0 = z1;
        z1 = z2;
    }
    let f = sys.rhs(x + big_h, &z1);
    [
        (z1[0] + z0[0] + f[0] * h) * 0.5,
        (z1[1] + z0[1] + f[1] * h) * 0.5,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn harmonic_oscillator_to_high_accuracy() {
        let omega = 7.3;
        let sys = move |_x: f64, y: &State| [y[1], -y[0] * (omega * omega)];
        let xs: Vec<f64> = (1..=20).map(|k| k as f64 * 0.5).collect();
        let (ys, _) = Stepper::new(1e-13)
            .integrate(&sys, 0.0, [c(1.0), c(0.0)], &xs)
            .unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y[0].re - (omega * x).cos()).abs() < 1e-11, "x={x}");
            assert!((y[1].re + omega * (omega * x).sin()).abs() < 1e-10 * omega);
        }
    }

    #[test]
    fn backward_integration_of_growing_mode() {
        // y'' = y, integrating backwards from x=10 with y = e^{-x} seed
        let sys = |_x: f64, y: &State| [y[1], y[0]];
        let x0: f64 = 10.0;
        let y0 = [c((-x0).exp()), c(-(-x0).exp())];
        let xs = [8.0, 5.0, 0.0];
        let (ys, _) = Stepper::new(1e-13).integrate(&sys, x0, y0, &xs).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let exact = (-x).exp();
            assert!((y[0].re - exact).abs() < 1e-12 * exact, "x={x}: {} vs {exact}", y[0].re);
        }
    }

    #[test]
    fn complex_rotation() {
        let lam = Complex64::new(2.0, -0.5);
        let sys = move |_x: f64, y: &State| [y[1], -y[0] * lam * lam];
        let (ys, _) = Stepper::new(1e-13)
            .integrate(&sys, 0.0, [c(1.0), Complex64::new(0.0, 1.0) * lam], &[3.0])
            .unwrap();
        let exact = (Complex64::new(0.0, 1.0) * lam * 3.0).exp();
        assert!((ys[0][0] - exact).norm() < 1e-11 * exact.norm());
    }
}
