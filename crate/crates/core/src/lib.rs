//! Numerical geometry of Sol₃ = R²⋊_A R with A = [[1,a],[0,−1]], a ≥ 0.
//!
//! The crate builds the canonical left-invariant metric of the whole family,
//! assembles an explicit positive, nonconstant harmonic function ũ on it,
//! and checks every identity behind that construction numerically:
//!
//! * [`liegroup`]: group law, `e^{Az}`, metric, frame, Christoffel symbols,
//!   Laplacian coefficients.
//! * [`hyperbolic`]: the half-plane quotient, horocycle (Busemann) distance,
//!   the drift operator `L(u) = Δu − ⟨∇u, J⟩` and the radial eigenfunction
//!   of `Δv + ¼v = 0`.
//! * [`harmonic`]: `u = v·w` on H² and its lift ũ to Sol₃ with analytic
//!   derivatives.
//! * [`verify`]: finite-difference Laplacians, residual grids and the
//!   identity suite.
//! * [`stochastic`]: Brownian motion on Sol₃ (transience, martingale check).

// Index loops follow the tensor notation; `!(x > 0.0)` is used to reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harmonic;
pub mod hyperbolic;
pub mod legendre;
pub mod liegroup;
pub mod ode;
pub mod quadrature;
pub mod stochastic;
pub mod verify;

pub use error::{Error, Result};

pub use harmonic::{HarmonicFunction, SolJet};
pub use hyperbolic::{HPoint, Jet2, RadialEigenfunction};
pub use liegroup::{GroupParam, Mat2, Metric3, Point};
pub use stochastic::{Diffusion, Ensemble, MartingaleReport, PathConfig, TransienceReport};
pub use verify::{GridResiduals, GridSpec, IdentityReport, ResidualReport, SuiteConfig};
