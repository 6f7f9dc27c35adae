//! The semidirect product R²⋊_A R with A = [[1, a], [0, −1]].
//!
//! Points are global coordinates `(x, y, z)`; the group law is
//! `(p₁, z₁) * (p₂, z₂) = (p₁ + e^{Az₁} p₂, z₁ + z₂)`.
//!
//! Since `A² = I`, the exponential has the closed form
//! `e^{Az} = cosh z · I + sinh z · A = [[e^z, a sinh z], [0, e^{−z}]]`,
//! so the upper-right entry is `p(z) = a sinh z`.
//!
//! The canonical left-invariant metric makes the columns of `e^{Az}`
//! (together with `∂z`) orthonormal. Writing `B = e^{Az}`:
//!
//! ```text
//! g    = B^{-T} B^{-1} ⊕ 1,        det g = det(B)^{-2} = 1
//! g^-1 = B B^T ⊕ 1               = [[e^{2z} + p², p e^{-z}], [p e^{-z}, e^{-2z}]] ⊕ 1
//! ```
//!
//! Laplacian without first-order terms: in coordinates
//! `Δu = |g|^{-1/2} ∂_i (|g|^{1/2} g^{ij} ∂_j u)`. Here `|g| ≡ 1` and every
//! `g^{ij}` depends on `z` only, so the only surviving derivative of a
//! coefficient is `∂_z g^{zj}`, which vanishes because `g^{zj} = δ_{zj}`.
//! Hence `Δu = g^{ij} ∂_i ∂_j u` exactly, see [`laplacian_coeffs`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shear parameter `a ≥ 0` selecting the left-invariant metric.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GroupParam(f64);

impl GroupParam {
    /// The unsheared Thurston model `A = diag(1, −1)`.
    pub const ZERO: GroupParam = GroupParam(0.0);

    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a >= 0.0 {
            Ok(GroupParam(a))
        } else {
            Err(Error::NegativeShear(a))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for GroupParam {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        GroupParam::new(a)
    }
}

impl From<GroupParam> for f64 {
    fn from(a: GroupParam) -> f64 {
        a.0
    }
}

/// A point of R²⋊_A R in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn checked(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Point { x, y, z })
        } else {
            Err(Error::NonFinite)
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(c: [f64; 3]) -> Self {
        Point::new(c[0], c[1], c[2])
    }

    /// Euclidean norm of the coordinates (used for coordinate balls).
    #[inline]
    pub fn coord_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn coord_distance(self, other: Point) -> f64 {
        Point::new(self.x - other.x, self.y - other.y, self.z - other.z).coord_norm()
    }
}

/// A real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    /// General inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }
}

/// Symmetric 3×3 tensor in the coordinate basis `(∂x, ∂y, ∂z)`.
///
/// Used both for the metric `g_ij` and its inverse `g^ij`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric3(pub [[f64; 3]; 3]);

impl Metric3 {
    pub const IDENTITY: Metric3 = Metric3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Assembles `m ⊕ 1` from a symmetric (x, y) block.
    fn from_block(xx: f64, xy: f64, yy: f64) -> Self {
        Metric3([[xx, xy, 0.0], [xy, yy, 0.0], [0.0, 0.0, 1.0]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul(&self, o: &Metric3) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        out
    }

    /// `⟨u, v⟩ = g_ij u^i v^j`.
    pub fn inner(&self, u: [f64; 3], v: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * u[i] * v[j];
            }
        }
        s
    }

    /// `Σ |g_ij u^i v^j|`: the rounding scale of [`Metric3::inner`].
    pub fn inner_abs(&self, u: [f64; 3], v: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += (self.0[i][j] * u[i] * v[j]).abs();
            }
        }
        s
    }
}

/// Left-invariant frame `(E₁, E₂, E₃)` as coordinate-basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame3 {
    pub e: [[f64; 3]; 3],
}

/// Christoffel symbols, indexed `gamma[k][i][j] = Γ^k_ij`.
pub type Christoffel = [[[f64; 3]; 3]; 3];

/// `e^{Az}` for `A = [[1, a], [0, −1]]`, from `A² = I`.
pub fn exp_az(a: GroupParam, z: f64) -> Mat2 {
    Mat2::new(z.exp(), a.0 * z.sinh(), 0.0, (-z).exp())
}

/// `p(z) = a sinh z`, the upper-right entry of `e^{Az}`.
#[inline]
pub fn shear(a: GroupParam, z: f64) -> f64 {
    a.0 * z.sinh()
}

/// Group law `(p₁, z₁) * (p₂, z₂) = (p₁ + e^{Az₁} p₂, z₁ + z₂)`.
pub fn multiply(p: Point, q: Point, a: GroupParam) -> Point {
    let b = exp_az(a, p.z);
    let [dx, dy] = b.apply([q.x, q.y]);
    Point::new(p.x + dx, p.y + dy, p.z + q.z)
}

/// Group inverse: `(−e^{−Az} (x, y), −z)`.
pub fn inverse(p: Point, a: GroupParam) -> Point {
    let b = exp_az(a, -p.z);
    let [x, y] = b.apply([p.x, p.y]);
    Point::new(-x, -y, -p.z)
}

/// Jacobian of left translation `q ↦ g * q`; constant in `q`.
pub fn left_translation_jacobian(g: Point, a: GroupParam) -> [[f64; 3]; 3] {
    let b = exp_az(a, g.z);
    [[b.a11, b.a12, 0.0], [b.a21, b.a22, 0.0], [0.0, 0.0, 1.0]]
}

/// Coordinate metric `g_ij` at `p`: `B^{-T} B^{-1} ⊕ 1` with `B = e^{Az}`.
pub fn metric_at(p: Point, a: GroupParam) -> Metric3 {
    // B^{-1} = [[e^{-z}, -s], [0, e^{z}]] with s = a sinh z (det B = 1).
    let ez = p.z.exp();
    let emz = (-p.z).exp();
    let s = shear(a, p.z);
    Metric3::from_block(emz * emz, -s * emz, s * s + ez * ez)
}

/// Inverse metric `g^ij` at `p`: `B B^T ⊕ 1`.
pub fn inverse_metric_at(p: Point, a: GroupParam) -> Metric3 {
    let ez = p.z.exp();
    let emz = (-p.z).exp();
    let s = shear(a, p.z);
    Metric3::from_block(ez * ez + s * s, s * emz, emz * emz)
}

/// `E₁, E₂` are the columns of `e^{Az}`; `E₃ = ∂z`.
pub fn frame_at(p: Point, a: GroupParam) -> Frame3 {
    let b = exp_az(a, p.z);
    Frame3 {
        e: [[b.a11, b.a21, 0.0], [b.a12, b.a22, 0.0], [0.0, 0.0, 1.0]],
    }
}

/// `∂_z g_ij`, in closed form. The metric has no x or y dependence.
fn metric_z_derivative(z: f64, a: GroupParam) -> [[f64; 3]; 3] {
    let a = a.0;
    let e2 = (2.0 * z).exp();
    let em2 = (-2.0 * z).exp();
    // g_xy = -a sinh z e^{-z} = -a (1 - e^{-2z}) / 2
    let xx = -2.0 * em2;
    let xy = -a * em2;
    let yy = 2.0 * a * a * z.sinh() * z.cosh() + 2.0 * e2;
    [[xx, xy, 0.0], [xy, yy, 0.0], [0.0, 0.0, 0.0]]
}

/// `Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)` from an inverse
/// metric and the partials `dg[l][i][j] = ∂_l g_ij`.
pub fn christoffel_from_partials(ginv: &Metric3, dg: &[[[f64; 3]; 3]; 3]) -> Christoffel {
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    let gkl = ginv.0[k][l];
                    if gkl != 0.0 {
                        s += gkl * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                }
                gk[i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Christoffel symbols of [`metric_at`], `gamma[k][i][j] = Γ^k_ij`.
pub fn christoffel_at(p: Point, a: GroupParam) -> Christoffel {
    let zero = [[0.0; 3]; 3];
    let dg = [zero, zero, metric_z_derivative(p.z, a)];
    christoffel_from_partials(&inverse_metric_at(p, a), &dg)
}

/// Covariant derivative `∇_X Y` of a field `Y` at `p`, given `Y(p)` and the
/// partials `dy[i] = ∂_i Y`.
pub fn covariant_derivative(
    gamma: &Christoffel,
    x: [f64; 3],
    y: [f64; 3],
    dy: [[f64; 3]; 3],
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..3 {
            s += x[i] * dy[i][k];
            for j in 0..3 {
                s += gamma[k][i][j] * x[i] * y[j];
            }
        }
        *o = s;
    }
    out
}

/// Mean-curvature vector of the orbit `{(x + t, y, z)}` through `p`,
/// computed as the normal part of `∇_{E₁}E₁` (`E₁` is the unit tangent).
///
/// Only the unsheared model `a = 0` is accepted.
pub fn orbit_mean_curvature(p: Point, a: GroupParam) -> Result<[f64; 3]> {
    if a.0 != 0.0 {
        return Err(Error::ShearedModel(a.0));
    }
    let gamma = christoffel_at(p, a);
    let frame = frame_at(p, a);
    let e1 = frame.e[0];
    // E₁ = (e^z, 0, 0): only ∂_z E₁ = E₁ is nonzero.
    let de1 = [[0.0; 3], [0.0; 3], e1];
    let nabla = covariant_derivative(&gamma, e1, e1, de1);
    let g = metric_at(p, a);
    let t = g.inner(nabla, e1);
    Ok([nabla[0] - t * e1[0], nabla[1] - t * e1[1], nabla[2] - t * e1[2]])
}

/// Second-order coefficients of the Laplacian at height `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacianCoeffs {
    pub xx: f64,
    /// Coefficient of `u_xy` as it appears in Δu, i.e. `2 g^{xy}`.
    pub xy: f64,
    pub yy: f64,
    pub zz: f64,
}

impl LaplacianCoeffs {
    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yy.abs()).max(self.zz.abs())
    }

    /// `c_xx u_xx + c_xy u_xy + c_yy u_yy + c_zz u_zz`, always in this order.
    #[inline]
    pub fn apply(&self, u_xx: f64, u_xy: f64, u_yy: f64, u_zz: f64) -> f64 {
        self.xx * u_xx + self.xy * u_xy + self.yy * u_yy + self.zz * u_zz
    }
}

/// `Δu = (e^{2z} + p²) u_xx + 2 p e^{−z} u_xy + e^{−2z} u_yy + u_zz`.
///
/// There are no first-order terms, see the module documentation.
pub fn laplacian_coeffs(z: f64, a: GroupParam) -> LaplacianCoeffs {
    let g = inverse_metric_at(Point::new(0.0, 0.0, z), a);
    LaplacianCoeffs {
        xx: g.0[0][0],
        xy: 2.0 * g.0[0][1],
        yy: g.0[1][1],
        zz: g.0[2][2],
    }
}
