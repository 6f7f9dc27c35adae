//! Adaptive Dormand–Prince 5(4) integration for second-order scalar ODEs
//! `y'' = f(t, y, y')`, with C² quintic Hermite dense output.
//!
//! The dense output interpolates `(y, y', y'')` at both ends of every
//! accepted step, so the interpolant's second derivative is continuous and
//! can be substituted back into the ODE to measure a residual.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size; keeps the Hermite interpolant accurate.
    pub max_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-11, atol: 1e-14, max_step: 0.05 }
    }
}

/// Value and first two derivatives at one accepted node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub y: f64,
    pub dy: f64,
    pub ddy: f64,
}

/// Piecewise quintic Hermite interpolant through solver nodes.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    nodes: Vec<Node>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

#[inline]
fn axpy(y: State, terms: &[(f64, State)], h: f64) -> State {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrates `y'' = f(t, y, y')` from `(t0, y0, dy0)` to `t_end > t0`.
pub fn integrate<F>(f: F, t0: f64, y0: f64, dy0: f64, t_end: f64, tol: Tolerances) -> Result<DenseSolution>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(t_end > t0) || !tol.rtol.is_finite() || tol.rtol <= 0.0 {
        return Err(Error::Solver(format!("bad interval [{t0}, {t_end}] or tolerance")));
    }
    let rhs = |t: f64, s: State| -> State { [s[1], f(t, s[0], s[1])] };

    let mut t = t0;
    let mut y: State = [y0, dy0];
    let mut k1 = rhs(t, y);
    let mut nodes = vec![Node { t, y: y[0], dy: y[1], ddy: k1[1] }];
    let mut h = (tol.max_step).min(1e-3).min(t_end - t0);
    let mut rejections = 0usize;

    while t < t_end {
        if nodes.len() > 10_000_000 {
            return Err(Error::Solver("step budget exhausted".into()));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = rhs(t + C2 * h, axpy(y, &[(A21, k1)], h));
        let k3 = rhs(t + C3 * h, axpy(y, &[(A31, k1), (A32, k2)], h));
        let k4 = rhs(t + C4 * h, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
        let k5 = rhs(t + C5 * h, axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
        let k6 = rhs(
            t + h,
            axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h),
        );
        let y_new = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
        let k7 = rhs(t + h, y_new);

        let mut err = 0.0f64;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::Solver(format!("non-finite error estimate at t = {t}")));
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            nodes.push(Node { t, y: y[0], dy: y[1], ddy: k1[1] });
            rejections = 0;
        } else {
            rejections += 1;
            if rejections > 50 {
                return Err(Error::Solver(format!("step size underflow at t = {t}")));
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(tol.max_step);
    }

    Ok(DenseSolution { nodes })
}

impl DenseSolution {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn t_start(&self) -> f64 {
        self.nodes[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].t
    }

    /// `(y, y', y'')` of the interpolant at `t`, or `None` outside the range.
    pub fn eval(&self, t: f64) -> Option<(f64, f64, f64)> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return None;
        }
        let idx = self.nodes.partition_point(|n| n.t <= t);
        let i = idx.clamp(1, self.nodes.len() - 1) - 1;
        Some(hermite5(&self.nodes[i], &self.nodes[i + 1], t))
    }
}

/// Quintic Hermite interpolation on `[n0.t, n1.t]`.
fn hermite5(n0: &Node, n1: &Node, t: f64) -> (f64, f64, f64) {
    let h = n1.t - n0.t;
    let s = (t - n0.t) / h;
    let c0 = n0.y;
    let c1 = h * n0.dy;
    let c2 = 0.5 * h * h * n0.ddy;
    let d0 = n1.y - c0 - c1 - c2;
    let d1 = h * n1.dy - c1 - 2.0 * c2;
    let d2 = h * h * n1.ddy - 2.0 * c2;
    let c3 = 10.0 * d0 - 4.0 * d1 + 0.5 * d2;
    let c4 = -15.0 * d0 + 7.0 * d1 - d2;
    let c5 = 6.0 * d0 - 3.0 * d1 + 0.5 * d2;
    let p = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
    let dp = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
    let ddp = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
    (p, dp / h, ddp / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y, y(0) = 0, y'(0) = 1  =>  y = sin t
        let sol = integrate(|_, y, _| -y, 0.0, 0.0, 1.0, 10.0, Tolerances::default()).unwrap();
        for i in 0..=1000 {
            let t = 10.0 * i as f64 / 1000.0;
            let (y, dy, ddy) = sol.eval(t).unwrap();
            assert!((y - t.sin()).abs() < 1e-9, "t={t}");
            assert!((dy - t.cos()).abs() < 1e-9);
            assert!((ddy + t.sin()).abs() < 1e-8);
        }
        assert_eq!(sol.t_end(), 10.0);
        assert!(sol.eval(10.5).is_none());
        assert!(sol.eval(-0.1).is_none());
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t.powi(3) - t.powi(5);
        let df = |t: f64| -2.0 + 1.5 * t * t - 5.0 * t.powi(4);
        let ddf = |t: f64| 3.0 * t - 20.0 * t.powi(3);
        let n0 = Node { t: 0.3, y: f(0.3), dy: df(0.3), ddy: ddf(0.3) };
        let n1 = Node { t: 1.1, y: f(1.1), dy: df(1.1), ddy: ddf(1.1) };
        for t in [0.3, 0.5, 0.77, 1.1] {
            let (p, dp, ddp) = hermite5(&n0, &n1, t);
            assert!((p - f(t)).abs() < 1e-13);
            assert!((dp - df(t)).abs() < 1e-12);
            assert!((ddp - ddf(t)).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(integrate(|_, y, _| y, 1.0, 0.0, 0.0, 1.0, Tolerances::default()).is_err());
    }
}
