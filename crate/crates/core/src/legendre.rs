//! Reference values of the conical Legendre function `P_{−1/2}(cosh r)`.
//!
//! The radial eigenfunction of `Δv + ¼v = 0` on H² with `v(0) = 1` equals
//! `P_{−1/2}(cosh r)`. This module evaluates it from Laplace's integral
//!
//! ```text
//! P_{−1/2}(cosh r) = (1/π) ∫₀^π (cosh r + sinh r cos θ)^{−1/2} dθ
//! ```
//!
//! by adaptive quadrature, independently of the ODE solver in
//! [`crate::hyperbolic`].

use crate::quadrature;

/// `P_{−1/2}(cosh r)` for `r ≥ 0` by adaptive Gauss–Kronrod quadrature.
pub fn p_minus_half_cosh(r: f64) -> f64 {
    let (emr, s) = ((-r).exp(), r.sinh());
    // cosh r + sinh r cos θ = e^{−r} + 2 sinh r cos²(θ/2), cancellation-free near θ = π.
    let integrand = |theta: f64| {
        let base = emr + 2.0 * s * (0.5 * theta).cos().powi(2);
        base.powf(-0.5)
    };
    // The integrand peaks at θ = π with width ~ e^{−r}; split there.
    let split = std::f64::consts::PI - (4.0 * emr).min(1.0);
    let tol = 1e-14;
    let head = quadrature::integrate(integrand, 0.0, split, tol);
    let tail = quadrature::integrate(integrand, split, std::f64::consts::PI, tol);
    (head.value + tail.value) / std::f64::consts::PI
}
