//! The positive nonconstant harmonic function on Sol₃.
//!
//! On H² let `s` be the horocycle distance ([`busemann_s`]), `w = e^{s/2}`
//! and `v(r)` the radial eigenfunction of `Δv + ¼v = 0` centred at `o`.
//! Then `Δw = ¾w`, `J(w) = ½w`, and for `u = v·w`
//!
//! ```text
//! Δu   = vΔw + wΔv + 2⟨∇v, ∇w⟩ = ½vw + w J(v)
//! J(u) = vJ(w) + wJ(v)          = ½vw + w J(v)
//! ```
//!
//! so `L(u) = Δu − J(u) = 0`, and the lift `ũ(x, y, z) = u(y, e^{−z})` is
//! harmonic on Sol₃ for every shear `a ≥ 0`: it does not depend on `x`, so
//! the `a`-dependent `u_xx` and `u_xy` terms of the Laplacian vanish.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{
    busemann_s, cosh_distance_minus_one, h2_distance, to_halfplane, EigenConfig, H2Field, HPoint,
    Jet2, RadialEigenfunction,
};
use crate::liegroup::{LaplacianCoeffs, Point};

/// Radius of the ball around the base point where the radial chart is
/// not used for derivatives.
pub const BASE_POINT_EXCLUSION: f64 = 1e-6;

/// `u = v(d(·, o)) · e^{k (s − s₀)}` on H² and its lift to Sol₃.
#[derive(Debug, Clone)]
pub struct HarmonicFunction {
    eigen: Arc<RadialEigenfunction>,
    base: HPoint,
    horocycle_offset: f64,
    w_exponent: f64,
}

/// Value, gradient and Hessian of ũ in Sol coordinates `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolJet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

impl SolJet {
    /// Coordinate Laplacian with the given second-order coefficients.
    pub fn laplacian(&self, c: &LaplacianCoeffs) -> f64 {
        c.apply(self.hess[0][0], self.hess[0][1], self.hess[1][1], self.hess[2][2])
    }
}

/// Both sides of the product computation at one point of H².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductSides {
    /// `Δu` from the Hessian of `u`.
    pub laplacian_u: f64,
    /// `J(u) = −h u_h` from the gradient of `u`.
    pub j_u: f64,
    /// `½vw + wJ(v)`.
    pub half_vw_plus_w_jv: f64,
}

/// Distance to the base point with first and second partials in `(ξ, h)`.
struct RadialJet {
    r: f64,
    d_xi: f64,
    d_h: f64,
    d_xixi: f64,
    d_xih: f64,
    d_hh: f64,
}

fn radial_jet(p: HPoint, o: HPoint) -> Result<RadialJet> {
    let r = h2_distance(p, o);
    if r < BASE_POINT_EXCLUSION {
        return Err(Error::NearBasePoint { r });
    }
    let (xi, h) = (p.xi(), p.h());
    let dxi = xi - o.xi();
    let h0 = o.h();
    // C = cosh r = 1 + (Δξ² + (h − h₀)²) / (2 h h₀)
    let c = 1.0 + cosh_distance_minus_one(p, o);
    let sinh_r = r.sinh();
    let c_xi = dxi / (h * h0);
    let c_h = (h * h - h0 * h0 - dxi * dxi) / (2.0 * h * h * h0);
    let c_xixi = 1.0 / (h * h0);
    let c_xih = -dxi / (h * h * h0);
    let c_hh = (dxi * dxi + h0 * h0) / (h * h * h * h0);
    // r_i = C_i / sinh r,  r_ij = (C_ij − cosh r · r_i r_j) / sinh r
    let r_xi = c_xi / sinh_r;
    let r_h = c_h / sinh_r;
    Ok(RadialJet {
        r,
        d_xi: r_xi,
        d_h: r_h,
        d_xixi: (c_xixi - c * r_xi * r_xi) / sinh_r,
        d_xih: (c_xih - c * r_xi * r_h) / sinh_r,
        d_hh: (c_hh - c * r_h * r_h) / sinh_r,
    })
}

impl HarmonicFunction {
    /// The construction with `o = (0, 1)`, `s(o) = 0` and `w = e^{s/2}`.
    pub fn new(eigen: Arc<RadialEigenfunction>) -> Self {
        HarmonicFunction { eigen, base: HPoint::BASE, horocycle_offset: 0.0, w_exponent: 0.5 }
    }

    /// Solves the `λ = ¼` eigenfunction with default settings.
    pub fn standard() -> Result<Self> {
        let ef = RadialEigenfunction::solve(EigenConfig::default())?;
        Ok(HarmonicFunction::new(Arc::new(ef)))
    }

    /// Moves the base point `o` of the radial factor.
    pub fn with_base_point(mut self, o: HPoint) -> Self {
        self.base = o;
        self
    }

    /// Uses `w = e^{s − s₀}` with `s₀` the value of `s` on the reference horocycle.
    pub fn with_horocycle_offset(mut self, s0: f64) -> Self {
        self.horocycle_offset = s0;
        self
    }

    /// Replaces the `½` in `w = e^{s/2}`; only for negative controls.
    pub fn with_w_exponent(mut self, k: f64) -> Self {
        self.w_exponent = k;
        self
    }

    pub fn eigenfunction(&self) -> &RadialEigenfunction {
        &self.eigen
    }

    pub fn base_point(&self) -> HPoint {
        self.base
    }

    pub fn w_exponent(&self) -> f64 {
        self.w_exponent
    }

    fn w(&self, p: HPoint) -> f64 {
        (self.w_exponent * (busemann_s(p) - self.horocycle_offset)).exp()
    }

    /// `u(p) = v(d(p, o)) · w(p)`.
    pub fn u_h2(&self, p: HPoint) -> Result<f64> {
        let (v, _) = self.eigen.eval(h2_distance(p, self.base))?;
        Ok(v * self.w(p))
    }

    /// `ũ(x, y, z) = u(y, e^{−z})`.
    pub fn lift_u(&self, p: Point) -> Result<f64> {
        self.u_h2(to_halfplane(p))
    }

    /// Analytic jet of `u` in `(ξ, h)` coordinates. Fails within
    /// [`BASE_POINT_EXCLUSION`] of the base point.
    pub fn jet_h2(&self, p: HPoint) -> Result<Jet2> {
        Ok(self.pieces(p)?.jet)
    }

    fn pieces(&self, p: HPoint) -> Result<Pieces> {
        let rj = radial_jet(p, self.base)?;
        let (v, dv) = self.eigen.eval(rj.r)?;
        let ddv = self.eigen.second_derivative(rj.r, v, dv);
        let k = self.w_exponent;
        let h = p.h();
        let w = self.w(p);
        let w_h = -k * w / h;
        let w_hh = k * (k + 1.0) * w / (h * h);
        let jet = Jet2 {
            value: v * w,
            d_xi: dv * rj.d_xi * w,
            d_h: dv * rj.d_h * w + v * w_h,
            d_xixi: (ddv * rj.d_xi * rj.d_xi + dv * rj.d_xixi) * w,
            d_xih: (ddv * rj.d_xi * rj.d_h + dv * rj.d_xih) * w + dv * rj.d_xi * w_h,
            d_hh: (ddv * rj.d_h * rj.d_h + dv * rj.d_hh) * w + 2.0 * dv * rj.d_h * w_h + v * w_hh,
        };
        Ok(Pieces { v, w, j_v: -h * dv * rj.d_h, jet })
    }

    /// Evaluates `Δu`, `J(u)` and `½vw + wJ(v)` independently at `p`.
    pub fn product_sides(&self, p: HPoint) -> Result<ProductSides> {
        let pc = self.pieces(p)?;
        Ok(ProductSides {
            laplacian_u: pc.jet.laplacian(p),
            j_u: pc.jet.along_j(p),
            half_vw_plus_w_jv: 0.5 * pc.v * pc.w + pc.w * pc.j_v,
        })
    }

    /// Value, gradient and Hessian of ũ by the chain rule through
    /// `(ξ, h) = (y, e^{−z})`:
    ///
    /// ```text
    /// ũ_y = u_ξ        ũ_z = −h u_h
    /// ũ_yy = u_ξξ      ũ_yz = −h u_ξh      ũ_zz = h u_h + h² u_hh
    /// ```
    ///
    /// Every x-derivative is exactly zero.
    pub fn lift_u_derivatives(&self, p: Point) -> Result<SolJet> {
        let q = to_halfplane(p);
        let j = self.jet_h2(q)?;
        let h = q.h();
        let u_yz = -h * j.d_xih;
        Ok(SolJet {
            value: j.value,
            grad: [0.0, j.d_xi, -h * j.d_h],
            hess: [
                [0.0, 0.0, 0.0],
                [0.0, j.d_xixi, u_yz],
                [0.0, u_yz, h * j.d_h + h * h * j.d_hh],
            ],
        })
    }
}

struct Pieces {
    v: f64,
    w: f64,
    j_v: f64,
    jet: Jet2,
}

impl H2Field for HarmonicFunction {
    fn jet(&self, p: HPoint) -> Result<Jet2> {
        self.jet_h2(p)
    }

    fn value(&self, p: HPoint) -> Result<f64> {
        self.u_h2(p)
    }
}
