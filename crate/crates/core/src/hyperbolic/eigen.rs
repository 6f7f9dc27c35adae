use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution, Tolerances};

/// Parameters of the radial eigenproblem `Δv + λv = 0`, `v(0) = 1`.
///
/// Only `λ = ¼` (the bottom of the spectrum of H²) yields the harmonic
/// construction; other values exist for negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    pub lambda: f64,
    pub r_max: f64,
    pub rtol: f64,
    /// End of the power-series segment near the pole.
    pub series_end: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { lambda: 0.25, r_max: 20.0, rtol: 1e-11, series_end: 1e-3 }
    }
}

/// Radial solution `v(r)` of `Δv + λv = 0` on H² with `v(0) = 1`.
///
/// For a radial function the hyperbolic Laplacian is
/// `Δv = v'' + coth(r) v'` (area element `sinh r dr dθ`), so `v` solves
///
/// ```text
/// v'' + coth(r) v' + λ v = 0,   v(0) = 1, v'(0) = 0.
/// ```
///
/// `coth` is singular at the pole; on `[0, series_end]` the even series
/// `v = 1 − (λ/4) r² + c₄ r⁴` is used, with `c₄ = (λ/4)(2/3 + λ)/16`
/// (`1 − r²/16 + 11 r⁴/3072` for `λ = ¼`). Beyond it an adaptive
/// Dormand–Prince integration with quintic Hermite dense output takes over.
#[derive(Debug, Clone)]
pub struct RadialEigenfunction {
    config: EigenConfig,
    dense: DenseSolution,
}

impl RadialEigenfunction {
    pub fn solve(config: EigenConfig) -> Result<Self> {
        if !(config.r_max.is_finite() && config.r_max > config.series_end && config.series_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eigenfunction range must satisfy 0 < series_end < r_max, got r_max = {}",
                config.r_max
            )));
        }
        if !(config.rtol > 0.0 && config.lambda.is_finite()) {
            return Err(Error::InvalidConfig("bad eigen tolerance or eigenvalue".into()));
        }
        let lambda = config.lambda;
        let (v0, dv0, _) = series(lambda, config.series_end);
        let tol = Tolerances { rtol: config.rtol, ..Tolerances::default() };
        let dense = ode::integrate(
            move |r, v, dv| -dv / r.tanh() - lambda * v,
            config.series_end,
            v0,
            dv0,
            config.r_max,
            tol,
        )?;
        Ok(RadialEigenfunction { config, dense })
    }

    pub fn config(&self) -> &EigenConfig {
        &self.config
    }

    pub fn r_max(&self) -> f64 {
        self.config.r_max
    }

    pub fn lambda(&self) -> f64 {
        self.config.lambda
    }

    /// `(v(r), v'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        self.eval_interpolant(r).map(|(v, dv, _)| (v, dv))
    }

    /// `v''` from the ODE itself: `−coth(r) v' − λ v` (limit `−λ/2` at 0).
    pub fn second_derivative(&self, r: f64, v: f64, dv: f64) -> f64 {
        if r == 0.0 {
            -0.5 * self.config.lambda * v
        } else {
            -dv / r.tanh() - self.config.lambda * v
        }
    }

    /// `(v, v', v'')` of the dense-output interpolant (not the ODE) at `r`.
    pub fn eval_interpolant(&self, r: f64) -> Result<(f64, f64, f64)> {
        if !(r >= 0.0 && r <= self.config.r_max) {
            return Err(Error::OutOfRange { r, r_max: self.config.r_max });
        }
        if r <= self.config.series_end {
            return Ok(series(self.config.lambda, r));
        }
        self.dense
            .eval(r)
            .ok_or(Error::OutOfRange { r, r_max: self.config.r_max })
    }

    /// `v'' + coth(r) v' + λ₀ v` of the interpolant for a given `λ₀`.
    ///
    /// Uses the interpolant's own second derivative, so it measures how well
    /// the dense output satisfies the equation with eigenvalue `λ₀`.
    pub fn ode_residual(&self, r: f64, lambda: f64) -> Result<f64> {
        let (v, dv, ddv) = self.eval_interpolant(r)?;
        let coth_term = if r == 0.0 { ddv } else { dv / r.tanh() };
        Ok(ddv + coth_term + lambda * v)
    }

    pub fn node_count(&self) -> usize {
        self.dense.nodes().len()
    }
}

/// Even power series about the pole: `(v, v', v'')`.
fn series(lambda: f64, r: f64) -> (f64, f64, f64) {
    let b = -0.25 * lambda;
    let c = -b * (2.0 / 3.0 + lambda) / 16.0;
    let r2 = r * r;
    (
        1.0 + r2 * (b + c * r2),
        r * (2.0 * b + 4.0 * c * r2),
        2.0 * b + 12.0 * c * r2,
    )
}
