//! Numerical verification of the harmonic construction.
//!
//! Two independent channels measure `Δũ` on Sol₃:
//!
//! * **analytic**: the Laplacian coefficients applied to the chain-rule
//!   derivatives of [`HarmonicFunction::lift_u_derivatives`];
//! * **finite-difference**: [`fd_laplacian_sol`] applied to point values of
//!   [`HarmonicFunction::lift_u`].
//!
//! The FD stencil at step `h` is
//!
//! ```text
//! u_xx ≈ (u(x+h) − 2u + u(x−h)) / h²            (same for y, z)
//! u_xy ≈ ((u(+,+) − u(−,+)) − (u(+,−) − u(−,−))) / (4h²)
//! ```
//!
//! all second-order accurate. The cross difference is grouped so that it
//! returns exactly zero for fields that do not depend on `x`.
//!
//! Residuals are reported absolutely and relative to `|ũ(p)| · max|c_ij(p)|`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{HarmonicFunction, BASE_POINT_EXCLUSION};
use crate::hyperbolic::{
    busemann_s, drift_l, h2_distance, to_halfplane, Busemann, EigenConfig, FiniteDifferenceJet,
    H2Field, HPoint, HorocycleExp, RadialEigenfunction,
};
use crate::legendre::p_minus_half_cosh;
use crate::liegroup::{
    christoffel_at, christoffel_from_partials, exp_az, frame_at, inverse, inverse_metric_at,
    laplacian_coeffs, left_translation_jacobian, metric_at, multiply, orbit_mean_curvature,
    GroupParam, Point,
};

/// Acceptance threshold on the analytic channel (relative).
pub const ANALYTIC_REL_TOL: f64 = 1e-9;
/// Acceptance threshold on the finite-difference channel (relative).
pub const FD_REL_TOL: f64 = 1e-5;
/// Bound on `|v(r) − P_{−1/2}(cosh r)|`.
pub const EIGEN_ORACLE_TOL: f64 = 1e-8;
/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-3;
/// Default seed of the identity suite.
pub const DEFAULT_SEED: u64 = 20_240_229;

/// One coordinate axis of a grid: `count` equispaced values in `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    fn value(&self, i: usize) -> f64 {
        let t = i as f64 / (self.count - 1) as f64;
        self.min * (1.0 - t) + self.max * t
    }
}

/// Rectangular sample grid in Sol coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: [AxisRange; 3],
    /// Hyperbolic radius around the base point skipped by the analytic channel.
    pub exclusion_radius: f64,
}

/// Largest `|z|` a grid may reach; keeps `e^{±2z}` well inside f64.
pub const GRID_Z_LIMIT: f64 = 5.0;

impl GridSpec {
    pub fn new(axes: [AxisRange; 3], exclusion_radius: f64) -> Result<Self> {
        for (name, ax) in ["x", "y", "z"].iter().zip(&axes) {
            if ax.count < 2 {
                return Err(Error::InvalidGrid(format!("{name}: need at least 2 points, got {}", ax.count)));
            }
            if !(ax.min.is_finite() && ax.max.is_finite() && ax.min < ax.max) {
                return Err(Error::InvalidGrid(format!("{name}: range {}..{} is not a finite interval", ax.min, ax.max)));
            }
        }
        if axes[2].min < -GRID_Z_LIMIT || axes[2].max > GRID_Z_LIMIT {
            return Err(Error::InvalidGrid(format!("z range must lie within ±{GRID_Z_LIMIT}")));
        }
        if !(exclusion_radius >= 0.0) {
            return Err(Error::InvalidGrid("exclusion radius must be >= 0".into()));
        }
        Ok(GridSpec { axes, exclusion_radius })
    }

    /// `[−2, 2]³` with 21 points per axis.
    pub fn acceptance() -> Self {
        let ax = AxisRange { min: -2.0, max: 2.0, count: 21 };
        GridSpec { axes: [ax; 3], exclusion_radius: BASE_POINT_EXCLUSION }
    }

    /// Parses `"x0:x1:nx,y0:y1:ny,z0:z1:nz"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected 3 comma-separated axes, got {:?}", s)));
        }
        let mut axes = [AxisRange { min: 0.0, max: 0.0, count: 0 }; 3];
        for (ax, part) in axes.iter_mut().zip(parts) {
            let f: Vec<&str> = part.split(':').collect();
            let bad = || Error::InvalidGrid(format!("axis {part:?} is not lo:hi:count"));
            if f.len() != 3 {
                return Err(bad());
            }
            ax.min = f[0].trim().parse().map_err(|_| bad())?;
            ax.max = f[1].trim().parse().map_err(|_| bad())?;
            ax.count = f[2].trim().parse().map_err(|_| bad())?;
        }
        GridSpec::new(axes, BASE_POINT_EXCLUSION)
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.axes[0].count, self.axes[1].count, self.axes[2].count]
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th grid point, x slowest and z fastest.
    pub fn point(&self, i: usize) -> Point {
        let [_, ny, nz] = self.counts();
        let iz = i % nz;
        let iy = (i / nz) % ny;
        let ix = i / (nz * ny);
        Point::new(self.axes[0].value(ix), self.axes[1].value(iy), self.axes[2].value(iz))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// Coordinate Laplacian of `field` at `p` by central differences.
pub fn fd_laplacian_sol<F>(field: &F, p: Point, a: GroupParam, h: f64) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + ?Sized,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("finite-difference step must be > 0, got {h}")));
    }
    let at = |dx: f64, dy: f64, dz: f64| field(Point::new(p.x + dx, p.y + dy, p.z + dz));
    let c = field(p)?;
    let h2 = h * h;
    let u_xx = (at(h, 0.0, 0.0)? - 2.0 * c + at(-h, 0.0, 0.0)?) / h2;
    let u_yy = (at(0.0, h, 0.0)? - 2.0 * c + at(0.0, -h, 0.0)?) / h2;
    let u_zz = (at(0.0, 0.0, h)? - 2.0 * c + at(0.0, 0.0, -h)?) / h2;
    let upper = at(h, h, 0.0)? - at(-h, h, 0.0)?;
    let lower = at(h, -h, 0.0)? - at(-h, -h, 0.0)?;
    let u_xy = (upper - lower) / (4.0 * h2);
    Ok(laplacian_coeffs(p.z, a).apply(u_xx, u_xy, u_yy, u_zz))
}

/// Ratio of the FD Laplacian errors at steps `h` and `h/2` against a known
/// `exact` value; close to 4 for a second-order stencil.
pub fn fd_convergence_ratio<F>(field: &F, exact: f64, p: Point, a: GroupParam, h: f64) -> Result<f64>
where
    F: Fn(Point) -> Result<f64> + ?Sized,
{
    let coarse = (fd_laplacian_sol(field, p, a, h)? - exact).abs();
    let fine = (fd_laplacian_sol(field, p, a, 0.5 * h)? - exact).abs();
    Ok(coarse / fine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Analytic,
    FiniteDifference,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Analytic => "analytic",
            Channel::FiniteDifference => "finite_difference",
        })
    }
}

/// Residual statistics of one channel over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub channel: Channel,
    pub max_abs: f64,
    pub max_rel: f64,
    pub mean_abs: f64,
    pub worst_point: Point,
    pub grid: [usize; 3],
    pub evaluated: usize,
    pub skipped: usize,
    pub h: Option<f64>,
    pub a: f64,
    pub seed: Option<u64>,
}

impl ResidualReport {
    fn from_samples(
        channel: Channel,
        samples: impl Iterator<Item = (Point, f64, f64)>,
        spec: &GridSpec,
        a: GroupParam,
        h: Option<f64>,
    ) -> Self {
        let mut report = ResidualReport {
            channel,
            max_abs: 0.0,
            max_rel: 0.0,
            mean_abs: 0.0,
            worst_point: Point::ORIGIN,
            grid: spec.counts(),
            evaluated: 0,
            skipped: 0,
            h,
            a: a.value(),
            seed: None,
        };
        let mut sum = 0.0;
        for (p, abs, rel) in samples {
            report.evaluated += 1;
            sum += abs;
            report.max_abs = report.max_abs.max(abs);
            if rel > report.max_rel || report.evaluated == 1 {
                report.max_rel = rel;
                report.worst_point = p;
            }
        }
        report.skipped = spec.len() - report.evaluated;
        if report.evaluated > 0 {
            report.mean_abs = sum / report.evaluated as f64;
        }
        report
    }

    pub fn passes(&self, rel_tol: f64) -> bool {
        self.evaluated > 0 && self.max_rel <= rel_tol
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<17} a={:<6} max_rel={:.3e} max_abs={:.3e} mean_abs={:.3e} worst=({:.3}, {:.3}, {:.3}) points={} skipped={}",
            self.channel.to_string(),
            self.a,
            self.max_rel,
            self.max_abs,
            self.mean_abs,
            self.worst_point.x,
            self.worst_point.y,
            self.worst_point.z,
            self.evaluated,
            self.skipped
        )?;
        if let Some(h) = self.h {
            write!(f, " h={h:e}")?;
        }
        Ok(())
    }
}

/// Residuals of ũ at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub point: Point,
    pub value: f64,
    /// `|ũ(p)| · max |c_ij(p)|`.
    pub scale: f64,
    /// `None` inside the exclusion ball around the base point.
    pub analytic: Option<f64>,
    pub fd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResiduals {
    pub analytic: ResidualReport,
    pub fd: ResidualReport,
    pub samples: Vec<ResidualSample>,
}

impl GridResiduals {
    pub fn passes(&self) -> bool {
        self.analytic.passes(ANALYTIC_REL_TOL) && self.fd.passes(FD_REL_TOL)
    }

    /// `(min, max)` of ũ over the grid.
    pub fn value_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)))
    }
}

/// Evaluates `Δũ` on every grid point through both channels.
pub fn residual_grid(hf: &HarmonicFunction, spec: &GridSpec, a: GroupParam, h: f64) -> Result<GridResiduals> {
    let samples: Vec<ResidualSample> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let p = spec.point(i);
            let coeffs = laplacian_coeffs(p.z, a);
            let value = hf.lift_u(p)?;
            let scale = value.abs() * coeffs.max_abs();
            let r = h2_distance(to_halfplane(p), hf.base_point());
            let analytic = if r < spec.exclusion_radius.max(BASE_POINT_EXCLUSION) {
                None
            } else {
                Some(hf.lift_u_derivatives(p)?.laplacian(&coeffs))
            };
            let fd = fd_laplacian_sol(&|q| hf.lift_u(q), p, a, h)?;
            Ok(ResidualSample { point: p, value, scale, analytic, fd })
        })
        .collect::<Result<_>>()?;

    let analytic = ResidualReport::from_samples(
        Channel::Analytic,
        samples
            .iter()
            .filter_map(|s| s.analytic.map(|r| (s.point, r.abs(), r.abs() / s.scale))),
        spec,
        a,
        None,
    );
    let fd = ResidualReport::from_samples(
        Channel::FiniteDifference,
        samples.iter().map(|s| (s.point, s.fd.abs(), s.fd.abs() / s.scale)),
        spec,
        a,
        Some(h),
    );
    Ok(GridResiduals { analytic, fd, samples })
}

// ---------------------------------------------------------------------------
// Identity suite

/// Settings of [`identity_suite`]. The eigenvalue and the exponent of `w`
/// are exposed only so that negative controls can perturb them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random H² points for the hyperbolic and harmonic identities.
    pub samples: usize,
    /// Random points for the group and metric identities.
    pub group_samples: usize,
    /// Random points for the mean-curvature claim.
    pub curvature_samples: usize,
    pub lambda: f64,
    pub w_exponent: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            samples: 500,
            group_samples: 1000,
            curvature_samples: 100,
            lambda: 0.25,
            w_exponent: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl IdentityReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<34} measured={:.3e} tol={:.0e} n={}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.samples
            )?;
        }
        write!(f, "identity suite (seed {}): {}", self.seed, if self.passed { "PASS" } else { "FAIL" })
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn push(&mut self, name: &str, measured: f64, tolerance: f64, samples: usize) {
        // NaN must fail.
        let passed = measured <= tolerance;
        self.0.push(CheckResult { name: name.to_string(), measured, tolerance, samples, passed });
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Largest absolute term in the coordinates of `p * q`; the rounding scale.
fn product_scale(p: Point, q: Point, a: GroupParam) -> f64 {
    let b = exp_az(a, p.z);
    let sx = p.x.abs() + (b.a11 * q.x).abs() + (b.a12 * q.y).abs();
    let sy = p.y.abs() + (b.a22 * q.y).abs();
    sx.max(sy).max(p.z.abs() + q.z.abs()).max(1.0)
}

fn coord_err(p: Point, q: Point) -> f64 {
    (p.x - q.x).abs().max((p.y - q.y).abs()).max((p.z - q.z).abs())
}

fn random_sol_point(rng: &mut ChaCha8Rng, half_width: f64) -> Point {
    Point::new(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    )
}

/// Random half-plane points, images of `(y, z) ∈ [−2, 2]²`, at hyperbolic
/// distance at least `min_r` from the base point.
fn random_h2_points(rng: &mut ChaCha8Rng, n: usize, min_r: f64) -> Vec<HPoint> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let q = to_halfplane(Point::new(0.0, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        if h2_distance(q, HPoint::BASE) >= min_r {
            out.push(q);
        }
    }
    out
}

fn group_checks(checks: &mut Checks, rng: &mut ChaCha8Rng, n: usize) {
    let mut assoc = 0.0f64;
    let mut ident = 0.0f64;
    let mut inv = 0.0f64;
    let mut hom = 0.0f64;
    let mut left = 0.0f64;
    let mut det = 0.0f64;
    let mut ginv = 0.0f64;
    let mut frame = 0.0f64;
    for _ in 0..n {
        let a = GroupParam::new(rng.random_range(0.0..2.0)).expect("nonnegative");
        let p = random_sol_point(rng, 5.0);
        let q = random_sol_point(rng, 5.0);
        let r = random_sol_point(rng, 5.0);

        let pq = multiply(p, q, a);
        let qr = multiply(q, r, a);
        let scale = product_scale(p, q, a)
            .max(product_scale(pq, r, a))
            .max(product_scale(q, r, a))
            .max(product_scale(p, qr, a));
        assoc = assoc.max(coord_err(multiply(pq, r, a), multiply(p, qr, a)) / scale);

        let e = Point::ORIGIN;
        let (ep, pe) = (multiply(e, p, a), multiply(p, e, a));
        let z_exact = ep.z == p.z && pe.z == p.z;
        ident = ident.max(if z_exact { coord_err(ep, p).max(coord_err(pe, p)) } else { f64::INFINITY });

        let pi = inverse(p, a);
        let scale = product_scale(p, pi, a).max(product_scale(pi, p, a));
        inv = inv.max(coord_err(multiply(p, pi, a), e).max(coord_err(multiply(pi, p, a), e)) / scale);

        let (z1, z2) = (p.z, q.z);
        let lhs = exp_az(a, z1 + z2);
        let rhs = exp_az(a, z1).mul(&exp_az(a, z2));
        let scale = exp_az(a, z1).max_abs() * exp_az(a, z2).max_abs();
        let d = (lhs.a11 - rhs.a11)
            .abs()
            .max((lhs.a12 - rhs.a12).abs())
            .max((lhs.a21 - rhs.a21).abs())
            .max((lhs.a22 - rhs.a22).abs());
        hom = hom.max(d / scale);

        // Pull-back of g(g*p) by the Jacobian of left translation by g = q.
        let jac = left_translation_jacobian(q, a);
        let g_moved = metric_at(multiply(q, p, a), a);
        let g_here = metric_at(p, a);
        for i in 0..3 {
            for j in 0..3 {
                let (mut s, mut sa) = (0.0, 0.0);
                for k in 0..3 {
                    for l in 0..3 {
                        let t = jac[k][i] * g_moved.0[k][l] * jac[l][j];
                        s += t;
                        sa += t.abs();
                    }
                }
                left = left.max((s - g_here.0[i][j]).abs() / sa.max(1.0));
            }
        }

        let g = metric_at(p, a);
        let det_scale = (g.0[0][0] * g.0[1][1]).abs() + (g.0[0][1] * g.0[1][0]).abs();
        det = det.max((g.det() - 1.0).abs() / det_scale.max(1.0));

        let gi = inverse_metric_at(p, a);
        let prod = gi.mul(&g);
        for i in 0..3 {
            for j in 0..3 {
                let sa: f64 = (0..3).map(|k| (gi.0[i][k] * g.0[k][j]).abs()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                ginv = ginv.max((prod[i][j] - want).abs() / sa.max(1.0));
            }
        }

        let f = frame_at(p, a);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                frame = frame.max((g.inner(f.e[i], f.e[j]) - want).abs() / g.inner_abs(f.e[i], f.e[j]).max(1.0));
            }
        }
    }
    checks.push("group_associativity", assoc, 1e-11, n);
    checks.push("group_identity", ident, 1e-13, n);
    checks.push("group_inverse_round_trip", inv, 1e-11, n);
    checks.push("exp_homomorphism", hom, 1e-12, n);
    checks.push("metric_left_invariance", left, 1e-11, n);
    checks.push("metric_det_one", det, 1e-12, n);
    checks.push("inverse_metric_product", ginv, 1e-12, n);
    checks.push("frame_orthonormal", frame, 1e-12, n);
}

fn christoffel_check(checks: &mut Checks, rng: &mut ChaCha8Rng, n: usize) {
    let step = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let a = GroupParam::new(rng.random_range(0.0..2.0)).expect("nonnegative");
        let p = random_sol_point(rng, 3.0);
        let mut dg = [[[0.0; 3]; 3]; 3];
        for (l, dgl) in dg.iter_mut().enumerate() {
            let mut c = p.to_array();
            c[l] += step;
            let gp = metric_at(Point::from_array(c), a);
            c[l] -= 2.0 * step;
            let gm = metric_at(Point::from_array(c), a);
            for i in 0..3 {
                for j in 0..3 {
                    dgl[i][j] = (gp.0[i][j] - gm.0[i][j]) / (2.0 * step);
                }
            }
        }
        let fd = christoffel_from_partials(&inverse_metric_at(p, a), &dg);
        let exact = christoffel_at(p, a);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((fd[k][i][j] - exact[k][i][j]).abs() / (1.0 + exact[k][i][j].abs()));
                }
            }
        }
    }
    checks.push("christoffel_vs_fd", worst, 1e-6, n);
}

fn curvature_check(checks: &mut Checks, rng: &mut ChaCha8Rng, n: usize) {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let p = random_sol_point(rng, 5.0);
        let err = match orbit_mean_curvature(p, GroupParam::ZERO) {
            Ok(h) => h[0].abs().max(h[1].abs()).max((h[2] - 1.0).abs()),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    checks.push("orbit_mean_curvature_is_dz", worst, 1e-10, n);
}

fn hyperbolic_checks(checks: &mut Checks, rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<()> {
    let pts = random_h2_points(rng, cfg.samples, 0.0);
    let n = pts.len();

    let mut lap = 0.0f64;
    let mut grad = 0.0f64;
    let mut lap_fd = 0.0f64;
    let mut grad_fd = 0.0f64;
    let s_fd = FiniteDifferenceJet::new(|q: HPoint| Ok(busemann_s(q)), 1e-4);
    for &p in &pts {
        let j = Busemann.jet(p)?;
        lap = lap.max((j.laplacian(p) - 1.0).abs());
        grad = grad.max((j.grad_norm_sq(p) - 1.0).abs());
        let jf = s_fd.jet(p)?;
        lap_fd = lap_fd.max((jf.laplacian(p) - 1.0).abs());
        grad_fd = grad_fd.max((jf.grad_norm_sq(p) - 1.0).abs());
    }
    checks.push("busemann_laplacian_closed_form", lap, 1e-12, n);
    checks.push("busemann_grad_norm_closed_form", grad, 1e-12, n);
    checks.push("busemann_laplacian_fd", lap_fd, 1e-6, n);
    checks.push("busemann_grad_norm_fd", grad_fd, 1e-6, n);

    let w = HorocycleExp { exponent: cfg.w_exponent };
    let mut dw = 0.0f64;
    let mut jw = 0.0f64;
    for &p in &pts {
        let j = w.jet(p)?;
        dw = dw.max((j.laplacian(p) - 0.75 * j.value).abs());
        jw = jw.max((j.along_j(p) - 0.5 * j.value).abs());
    }
    checks.push("w_laplacian_three_quarters", dw, 1e-10, n);
    checks.push("w_along_j_half", jw, 1e-10, n);

    let mut inv = 0.0f64;
    for _ in 0..cfg.samples {
        let (x1, h1) = (rng.random_range(-5.0..5.0), rng.random_range(0.05..5.0));
        let (x2, h2) = (rng.random_range(-5.0..5.0), rng.random_range(0.05..5.0));
        let shift = rng.random_range(-10.0..10.0);
        let lambda = rng.random_range(0.1..10.0);
        let d = h2_distance(HPoint::new(x1, h1)?, HPoint::new(x2, h2)?);
        let dt = h2_distance(HPoint::new(x1 + shift, h1)?, HPoint::new(x2 + shift, h2)?);
        let ds = h2_distance(HPoint::new(lambda * x1, lambda * h1)?, HPoint::new(lambda * x2, lambda * h2)?);
        inv = inv.max((dt - d).abs().max((ds - d).abs()) / (1.0 + d));
    }
    checks.push("h2_distance_isometry_invariance", inv, 1e-12, cfg.samples);

    let step = 1e-5;
    let mut iso = 0.0f64;
    for &p in pts.iter().take(100) {
        let (y, z) = (p.xi(), -p.h().ln());
        let diff = |dy: f64, dz: f64| {
            let a = to_halfplane(Point::new(0.0, y + dy, z + dz));
            let b = to_halfplane(Point::new(0.0, y - dy, z - dz));
            [(a.xi() - b.xi()) / (2.0 * step), (a.h() - b.h()) / (2.0 * step)]
        };
        let (jy, jz) = (diff(step, 0.0), diff(0.0, step));
        let g = |u: [f64; 2], v: [f64; 2]| (u[0] * v[0] + u[1] * v[1]) / (p.h() * p.h());
        let e2z = (2.0 * z).exp();
        iso = iso
            .max((g(jy, jy) - e2z).abs() / e2z)
            .max((g(jz, jz) - 1.0).abs())
            .max(g(jy, jz).abs());
    }
    checks.push("slice_map_isometry_fd", iso, 1e-6, pts.len().min(100));
    Ok(())
}

fn eigen_checks(checks: &mut Checks, ef: &RadialEigenfunction) -> Result<()> {
    let n = 2001;
    let r_max = ef.r_max();
    let mut residual = 0.0f64;
    let mut monotone = true;
    let mut positive = true;
    let mut prev = f64::INFINITY;
    for i in 0..n {
        let r = r_max * i as f64 / (n - 1) as f64;
        residual = residual.max(ef.ode_residual(r, 0.25)?.abs());
        let (v, dv) = ef.eval(r)?;
        if i > 0 {
            positive &= v > 0.0;
            monotone &= v < prev && dv < 0.0;
        }
        prev = v;
    }
    checks.push("eigen_ode_residual", residual, 1e-9, n);
    checks.push("eigen_positive", if positive { 0.0 } else { 1.0 }, 0.0, n - 1);
    checks.push("eigen_strictly_decreasing", if monotone { 0.0 } else { 1.0 }, 0.0, n - 1);
    checks.push("eigen_vs_legendre_oracle", eigen_oracle_deviation(ef, 10.0, 1001)?, EIGEN_ORACLE_TOL, 1001);
    Ok(())
}

/// `max |v(r) − P_{−1/2}(cosh r)|` over `points` equispaced radii in `[0, r_max]`.
pub fn eigen_oracle_deviation(ef: &RadialEigenfunction, r_max: f64, points: usize) -> Result<f64> {
    let devs: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| {
            let r = r_max * i as f64 / (points - 1).max(1) as f64;
            Ok((ef.eval(r)?.0 - p_minus_half_cosh(r)).abs())
        })
        .collect::<Result<_>>()?;
    Ok(max_of(devs.into_iter()))
}

fn harmonic_checks(checks: &mut Checks, rng: &mut ChaCha8Rng, hf: &HarmonicFunction, n: usize) -> Result<()> {
    let pts = random_h2_points(rng, n, 1e-3);
    let mut drift = 0.0f64;
    let mut lap_side = 0.0f64;
    let mut j_side = 0.0f64;
    for &p in &pts {
        drift = drift.max(drift_l(hf, p)?.abs());
        let s = hf.product_sides(p)?;
        lap_side = lap_side.max((s.laplacian_u - s.half_vw_plus_w_jv).abs());
        j_side = j_side.max((s.j_u - s.half_vw_plus_w_jv).abs());
    }
    checks.push("drift_of_u_vanishes", drift, 1e-8, n);
    checks.push("product_laplacian_side", lap_side, 1e-9, n);
    checks.push("product_j_side", j_side, 1e-9, n);

    let mut positive = true;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut x_indep = true;
    for &p in &pts {
        let sp = Point::new(rng.random_range(-5.0..5.0), p.xi(), -p.h().ln());
        let u = hf.lift_u(sp)?;
        positive &= u > 0.0;
        lo = lo.min(u);
        hi = hi.max(u);
        x_indep &= hf.lift_u(Point::new(sp.x + 1.0, sp.y, sp.z))? == u;
    }
    checks.push("lift_positive", if positive { 0.0 } else { 1.0 }, 0.0, n);
    checks.push("lift_independent_of_x", if x_indep { 0.0 } else { 1.0 }, 0.0, n);
    // Nonconstancy: the spread must be at least 0.1.
    checks.push("lift_nonconstant", (0.1 - (hi - lo)).max(0.0), 0.0, n);
    Ok(())
}

/// Runs every identity of the construction at seeded random samples.
pub fn identity_suite(cfg: &SuiteConfig) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Checks(Vec::new());

    group_checks(&mut checks, &mut rng, cfg.group_samples);
    christoffel_check(&mut checks, &mut rng, cfg.curvature_samples);
    curvature_check(&mut checks, &mut rng, cfg.curvature_samples);
    hyperbolic_checks(&mut checks, &mut rng, cfg)?;

    let ef = RadialEigenfunction::solve(EigenConfig { lambda: cfg.lambda, ..EigenConfig::default() })?;
    eigen_checks(&mut checks, &ef)?;
    let hf = HarmonicFunction::new(std::sync::Arc::new(ef)).with_w_exponent(cfg.w_exponent);
    harmonic_checks(&mut checks, &mut rng, &hf, cfg.samples)?;

    let passed = checks.0.iter().all(|c| c.passed);
    Ok(IdentityReport { seed: cfg.seed, checks: checks.0, passed })
}
