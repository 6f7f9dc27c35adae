//! The quotient geometry Sol₃ → H².
//!
//! The projection `π(x, y, z) = (0, y, z)` onto the slice
//! `M = {x = 0}` is a Riemannian submersion, and `M` (metric
//! `e^{2z} dy² + dz²`) is isometric to the half-plane
//! `(ξ, h) = (y, e^{−z})` with metric `(dξ² + dh²)/h²`.
//!
//! In half-plane coordinates
//!
//! ```text
//! ∇f  = h² (f_ξ, f_h)          |∇f|² = h² (f_ξ² + f_h²)
//! Δf  = h² (f_ξξ + f_hh)
//! ```
//!
//! The projected mean-curvature field is `J = ∂z = −h ∂h`, the gradient of
//! the horocycle distance `s = −ln h` (`s = z` on Sol₃). Its flow lines are
//! the vertical geodesics, which all tend to the boundary point `h → 0`.

mod eigen;

pub use eigen::{EigenConfig, RadialEigenfunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegroup::Point;

/// A point `(ξ, h)`, `h > 0`, of the upper half-plane model of H².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    xi: f64,
    h: f64,
}

impl HPoint {
    pub fn new(xi: f64, h: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::NonPositiveHeight(h));
        }
        Ok(HPoint { xi, h })
    }

    /// The image of the group origin, `(0, 1)`.
    pub const BASE: HPoint = HPoint { xi: 0.0, h: 1.0 };

    #[inline]
    pub fn xi(&self) -> f64 {
        self.xi
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }
}

/// `π` followed by the slice isometry: `(x, y, z) ↦ (y, e^{−z})`.
pub fn to_halfplane(p: Point) -> HPoint {
    HPoint { xi: p.y, h: (-p.z).exp() }
}

/// Inverse of [`to_halfplane`] onto the slice `x = 0`.
pub fn from_halfplane(q: HPoint) -> Point {
    Point::new(0.0, q.xi, -q.h.ln())
}

/// `cosh d − 1 = (Δξ² + Δh²) / (2 h_p h_q)`.
#[inline]
pub(crate) fn cosh_distance_minus_one(p: HPoint, q: HPoint) -> f64 {
    let dxi = p.xi - q.xi;
    let dh = p.h - q.h;
    (dxi * dxi + dh * dh) / (2.0 * p.h * q.h)
}

/// Hyperbolic distance in the half-plane model.
pub fn h2_distance(p: HPoint, q: HPoint) -> f64 {
    // d = 2 asinh(|p − q|_E / (2 √(h_p h_q))), well conditioned for small d.
    let dxi = p.xi - q.xi;
    let dh = p.h - q.h;
    2.0 * (dxi.hypot(dh) / (2.0 * (p.h * q.h).sqrt())).asinh()
}

/// Signed distance to the horocycle `{h = 1}`, increasing along `J`:
/// `s(ξ, h) = −ln h`.
pub fn busemann_s(p: HPoint) -> f64 {
    -p.h.ln()
}

/// Value, gradient and Hessian of a scalar field in `(ξ, h)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub d_xi: f64,
    pub d_h: f64,
    pub d_xixi: f64,
    pub d_xih: f64,
    pub d_hh: f64,
}

impl Jet2 {
    /// `Δ_{H²} f = h² (f_ξξ + f_hh)`.
    pub fn laplacian(&self, p: HPoint) -> f64 {
        p.h * p.h * (self.d_xixi + self.d_hh)
    }

    /// `|∇f|² = h² (f_ξ² + f_h²)`.
    pub fn grad_norm_sq(&self, p: HPoint) -> f64 {
        p.h * p.h * (self.d_xi * self.d_xi + self.d_h * self.d_h)
    }

    /// `J(f) = ⟨∇f, J⟩ = df(−h ∂h)`.
    pub fn along_j(&self, p: HPoint) -> f64 {
        -p.h * self.d_h
    }
}

/// A scalar field on H² that can report its second-order jet.
pub trait H2Field {
    fn jet(&self, p: HPoint) -> Result<Jet2>;

    fn value(&self, p: HPoint) -> Result<f64> {
        self.jet(p).map(|j| j.value)
    }
}

impl<F: H2Field + ?Sized> H2Field for &F {
    fn jet(&self, p: HPoint) -> Result<Jet2> {
        (**self).jet(p)
    }

    fn value(&self, p: HPoint) -> Result<f64> {
        (**self).value(p)
    }
}

/// The drift operator `L(u) = Δu − ⟨∇u, J⟩` at `p`.
///
/// `L(v) = 0` on H² is equivalent to `Δṽ = 0` on Sol₃ for the lift `ṽ = v∘π`.
pub fn drift_l<F: H2Field + ?Sized>(u: &F, p: HPoint) -> Result<f64> {
    let j = u.jet(p)?;
    Ok(j.laplacian(p) - j.along_j(p))
}

/// The Busemann function `s = −ln h` with its closed-form jet.
#[derive(Debug, Clone, Copy, Default)]
pub struct Busemann;

impl H2Field for Busemann {
    fn jet(&self, p: HPoint) -> Result<Jet2> {
        let h = p.h;
        Ok(Jet2 {
            value: busemann_s(p),
            d_xi: 0.0,
            d_h: -1.0 / h,
            d_xixi: 0.0,
            d_xih: 0.0,
            d_hh: 1.0 / (h * h),
        })
    }

    fn value(&self, p: HPoint) -> Result<f64> {
        Ok(busemann_s(p))
    }
}

/// `w = e^{k s} = h^{−k}`; the construction uses `k = ½`.
#[derive(Debug, Clone, Copy)]
pub struct HorocycleExp {
    pub exponent: f64,
}

impl HorocycleExp {
    pub const HALF: HorocycleExp = HorocycleExp { exponent: 0.5 };
}

impl H2Field for HorocycleExp {
    fn jet(&self, p: HPoint) -> Result<Jet2> {
        let k = self.exponent;
        let h = p.h;
        let w = (k * busemann_s(p)).exp();
        Ok(Jet2 {
            value: w,
            d_xi: 0.0,
            d_h: -k * w / h,
            d_xixi: 0.0,
            d_xih: 0.0,
            d_hh: k * (k + 1.0) * w / (h * h),
        })
    }
}

/// Any value-only field, with derivatives from central differences.
pub struct FiniteDifferenceJet<F> {
    pub field: F,
    pub step: f64,
}

impl<F> FiniteDifferenceJet<F>
where
    F: Fn(HPoint) -> Result<f64>,
{
    pub fn new(field: F, step: f64) -> Self {
        FiniteDifferenceJet { field, step }
    }
}

impl<F> H2Field for FiniteDifferenceJet<F>
where
    F: Fn(HPoint) -> Result<f64>,
{
    fn jet(&self, p: HPoint) -> Result<Jet2> {
        // Steps are relative in h so stencils stay inside the half-plane.
        let dx = self.step * p.h;
        let at = |a: f64, b: f64| HPoint::new(p.xi + a, p.h + b).and_then(|q| (self.field)(q));
        let c = (self.field)(p)?;
        let xp = at(dx, 0.0)?;
        let xm = at(-dx, 0.0)?;
        let hp = at(0.0, dx)?;
        let hm = at(0.0, -dx)?;
        let pp = at(dx, dx)?;
        let pm = at(dx, -dx)?;
        let mp = at(-dx, dx)?;
        let mm = at(-dx, -dx)?;
        Ok(Jet2 {
            value: c,
            d_xi: (xp - xm) / (2.0 * dx),
            d_h: (hp - hm) / (2.0 * dx),
            d_xixi: (xp - 2.0 * c + xm) / (dx * dx),
            d_xih: (pp - pm - mp + mm) / (4.0 * dx * dx),
            d_hh: (hp - 2.0 * c + hm) / (dx * dx),
        })
    }

    fn value(&self, p: HPoint) -> Result<f64> {
        (self.field)(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn hp(xi: f64, h: f64) -> HPoint {
        HPoint::new(xi, h).unwrap()
    }

    #[test]
    fn halfplane_map_examples() {
        assert_eq!(to_halfplane(Point::ORIGIN), hp(0.0, 1.0));
        assert_eq!(to_halfplane(Point::new(7.0, 0.0, 0.0)), hp(0.0, 1.0));
        let q = to_halfplane(Point::new(0.0, 2.0, -1.0));
        assert_eq!(q.xi(), 2.0);
        assert!((q.h() - E).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_heights() {
        assert_eq!(HPoint::new(0.0, 0.0), Err(Error::NonPositiveHeight(0.0)));
        assert!(HPoint::new(0.0, -1.0).is_err());
        assert!(HPoint::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = hp(0.3, 0.7);
        assert_eq!(h2_distance(p, p), 0.0);
        assert!((h2_distance(hp(0.0, 1.0), hp(0.0, E)) - 1.0).abs() < 1e-15);

        // Geodesic through (0,1) and (1,1): the semicircle centred at (1/2, 0),
        // radius √5/2. With ξ = c + R cos φ, h = R sin φ, ds = dφ / sin φ.
        let phi0 = (1.0f64 / 5.0f64.sqrt()).acos();
        let phi1 = std::f64::consts::PI - phi0;
        let length = quadrature::integrate(|phi| 1.0 / phi.sin(), phi0, phi1, 1e-14).value;
        let d = h2_distance(hp(0.0, 1.0), hp(1.0, 1.0));
        assert!((d - length).abs() <= 1e-8);
        assert!((d - 1.5f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn busemann_examples() {
        assert_eq!(busemann_s(hp(0.0, 1.0)), 0.0);
        for z in [-2.0f64, 0.3, 4.0] {
            for xi in [-1.0, 0.0, 5.0] {
                assert!((busemann_s(hp(xi, (-z).exp())) - z).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn busemann_laplacian_and_gradient() {
        for &(xi, h) in &[(0.0, 1.0), (-3.0, 0.01), (2.0, 7.5)] {
            let p = hp(xi, h);
            let j = Busemann.jet(p).unwrap();
            assert!((j.laplacian(p) - 1.0).abs() <= 1e-12);
            assert!((j.grad_norm_sq(p) - 1.0).abs() <= 1e-12);
            let fd = FiniteDifferenceJet::new(|q| Ok(busemann_s(q)), 1e-4).jet(p).unwrap();
            assert!((fd.laplacian(p) - 1.0).abs() <= 1e-6);
            assert!((fd.grad_norm_sq(p) - 1.0).abs() <= 1e-6);
            // J = ∇s: J(s) = |∇s|² = 1
            assert!((j.along_j(p) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn drift_examples() {
        struct Constant;
        impl H2Field for Constant {
            fn jet(&self, _: HPoint) -> Result<Jet2> {
                Ok(Jet2 { value: 3.0, ..Jet2::default() })
            }
        }
        assert_eq!(drift_l(&Constant, hp(1.0, 2.0)).unwrap(), 0.0);

        for &(xi, h) in &[(0.0, 1.0), (1.0, 0.2), (-2.0, 3.0)] {
            let p = hp(xi, h);
            let w = HorocycleExp::HALF;
            let j = w.jet(p).unwrap();
            assert!((j.laplacian(p) - 0.75 * j.value).abs() <= 1e-12 * j.value);
            assert!((j.along_j(p) - 0.5 * j.value).abs() <= 1e-12 * j.value);
            let l = drift_l(&w, p).unwrap();
            assert!((l - 0.25 * j.value).abs() <= 1e-12 * j.value);
        }
    }

    #[test]
    fn slice_map_is_an_isometry() {
        // Pull back (dξ² + dh²)/h² through (y, z) ↦ (y, e^{−z}) by finite
        // differences and compare with e^{2z} dy² + dz².
        let step = 1e-5;
        for &(y, z) in &[(0.0f64, 0.0f64), (1.0, -1.5), (-2.0, 2.0)] {
            let q = to_halfplane(Point::new(0.0, y, z));
            let f = |dy: f64, dz: f64| {
                let a = to_halfplane(Point::new(0.0, y + dy, z + dz));
                let b = to_halfplane(Point::new(0.0, y - dy, z - dz));
                [(a.xi() - b.xi()) / (2.0 * step), (a.h() - b.h()) / (2.0 * step)]
            };
            let jy = f(step, 0.0);
            let jz = f(0.0, step);
            let g = |u: [f64; 2], v: [f64; 2]| (u[0] * v[0] + u[1] * v[1]) / (q.h() * q.h());
            assert!((g(jy, jy) - (2.0 * z).exp()).abs() <= 1e-6 * (2.0 * z).exp());
            assert!((g(jz, jz) - 1.0).abs() <= 1e-6);
            assert!(g(jy, jz).abs() <= 1e-6);
        }
    }

    proptest! {
        #[test]
        fn distance_invariances(
            x1 in -5.0..5.0f64, h1 in 0.05..5.0f64,
            x2 in -5.0..5.0f64, h2 in 0.05..5.0f64,
            x3 in -5.0..5.0f64, h3 in 0.05..5.0f64,
            shift in -10.0..10.0f64, lambda in 0.1..10.0f64,
        ) {
            let (p, q, r) = (hp(x1, h1), hp(x2, h2), hp(x3, h3));
            let d = h2_distance(p, q);
            prop_assert!(d >= 0.0);
            prop_assert!((d - h2_distance(q, p)).abs() == 0.0);
            prop_assert!(h2_distance(p, r) <= d + h2_distance(q, r) + 1e-10);
            let dt = h2_distance(hp(x1 + shift, h1), hp(x2 + shift, h2));
            let ds = h2_distance(hp(lambda * x1, lambda * h1), hp(lambda * x2, lambda * h2));
            prop_assert!((dt - d).abs() <= 1e-12 * (1.0 + d));
            prop_assert!((ds - d).abs() <= 1e-12 * (1.0 + d));
            // agrees with the acosh form away from the diagonal
            let c = 1.0 + cosh_distance_minus_one(p, q);
            prop_assert!((c.acosh() - d).abs() <= 1e-7 * (1.0 + d));
        }
    }
}
