//! Brownian motion on Sol₃ in coordinates.
//!
//! The generator is `½Δ`, which has no first-order part, so Euler–Maruyama
//! needs no drift:
//!
//! ```text
//! X_{n+1} = X_n + √dt · σ(z_n) ξ,    σ = [[e^z, a·sinh z, 0], [0, e^{−z}, 0], [0, 0, 1]]
//! ```
//!
//! with `σσᵀ = g⁻¹`. Balls are coordinate balls. Every path draws from its
//! own ChaCha8 stream (`stream = path index`) keyed by the master seed, so
//! ensembles are identical regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegroup::{exp_az, GroupParam, Point};

/// Default step for transience runs.
pub const TRANSIENCE_DT: f64 = 1e-3;
/// Default step for martingale checks.
pub const MARTINGALE_DT: f64 = 1e-4;
/// Weak-error allowance of the martingale check, in units of `dt`.
pub const BIAS_PER_DT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diffusion {
    Sol,
    /// Coefficients frozen to the identity: flat Brownian motion in R³.
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub start: Point,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    pub a: GroupParam,
    pub diffusion: Diffusion,
    /// Times at which every path records its position.
    pub checkpoints: Vec<f64>,
    /// Keep every `k`-th step of each path (for dumps).
    pub record_stride: Option<usize>,
}

impl PathConfig {
    pub fn new(start: Point, horizon: f64, dt: f64, seed: u64, a: GroupParam) -> Self {
        PathConfig {
            start,
            horizon,
            dt,
            seed,
            a,
            diffusion: Diffusion::Sol,
            checkpoints: Vec::new(),
            record_stride: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon {} must be >= dt {}", self.horizon, self.dt)));
        }
        if !(self.start.x.is_finite() && self.start.y.is_finite() && self.start.z.is_finite()) {
            return Err(Error::NonFinite);
        }
        for &t in &self.checkpoints {
            if !(t > 0.0 && t <= self.horizon) {
                return Err(Error::InvalidConfig(format!("checkpoint {t} outside (0, {}]", self.horizon)));
            }
        }
        if self.record_stride == Some(0) {
            return Err(Error::InvalidConfig("record stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    fn step_index(&self, t: f64) -> usize {
        ((t / self.dt).round() as usize).clamp(1, self.steps())
    }
}

/// The random stream of path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_noise(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

/// One driftless Euler–Maruyama step.
pub fn bm_step(p: Point, dt: f64, noise: [f64; 3], a: GroupParam) -> Point {
    let s = dt.sqrt();
    let b = exp_az(a, p.z);
    Point::new(
        p.x + s * (b.a11 * noise[0] + b.a12 * noise[1]),
        p.y + s * b.a22 * noise[1],
        p.z + s * noise[2],
    )
}

fn flat_step(p: Point, dt: f64, noise: [f64; 3]) -> Point {
    let s = dt.sqrt();
    Point::new(p.x + s * noise[0], p.y + s * noise[1], p.z + s * noise[2])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub id: usize,
    pub end: Point,
    /// Positions at [`PathConfig::checkpoints`], in order.
    pub snapshots: Vec<Point>,
    /// Last time in `[0, T]` at which the path was in the unit coordinate
    /// ball about the origin; `T` if it is still inside, `None` if never.
    pub last_in_unit_ball: Option<f64>,
    /// `(t, position)` every `record_stride` steps, starting at `t = 0`.
    pub trajectory: Vec<(f64, Point)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub config: PathConfig,
    pub paths: Vec<PathSummary>,
}

fn simulate(cfg: &PathConfig, id: usize) -> PathSummary {
    let steps = cfg.steps();
    let mut marks: Vec<(usize, usize)> =
        cfg.checkpoints.iter().enumerate().map(|(k, &t)| (cfg.step_index(t), k)).collect();
    marks.sort_unstable();
    let mut snapshots = vec![cfg.start; cfg.checkpoints.len()];
    let mut next_mark = 0;

    let mut rng = path_rng(cfg.seed, id as u64);
    let mut p = cfg.start;
    let mut last_in = (p.coord_norm() <= 1.0).then_some(0usize);
    let mut trajectory = Vec::new();
    if cfg.record_stride.is_some() {
        trajectory.push((0.0, p));
    }
    for n in 1..=steps {
        let noise = draw_noise(&mut rng);
        p = match cfg.diffusion {
            Diffusion::Sol => bm_step(p, cfg.dt, noise, cfg.a),
            Diffusion::Euclidean => flat_step(p, cfg.dt, noise),
        };
        if p.coord_norm() <= 1.0 {
            last_in = Some(n);
        }
        while next_mark < marks.len() && marks[next_mark].0 == n {
            snapshots[marks[next_mark].1] = p;
            next_mark += 1;
        }
        if let Some(k) = cfg.record_stride {
            if n % k == 0 || n == steps {
                trajectory.push((n as f64 * cfg.dt, p));
            }
        }
    }
    PathSummary {
        id,
        end: p,
        snapshots,
        last_in_unit_ball: last_in.map(|n| n as f64 * cfg.dt),
        trajectory,
    }
}

/// Simulates `n` independent paths in parallel.
pub fn sample_paths(cfg: &PathConfig, n: usize) -> Result<Ensemble> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one path".into()));
    }
    let paths = (0..n).into_par_iter().map(|i| simulate(cfg, i)).collect();
    Ok(Ensemble { config: cfg.clone(), paths })
}

/// Fraction of `n` Bernoulli outcomes with its standard error `std/√n`.
fn fraction(hits: usize, n: usize) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    if n < 2 {
        return (p, 0.0);
    }
    let var = p * (1.0 - p) * n as f64 / (n - 1) as f64;
    (p, (var / n as f64).sqrt())
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub t: f64,
    pub inside_unit_fraction: f64,
    pub inside_unit_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransienceReport {
    pub paths: usize,
    pub horizon: f64,
    pub radius: f64,
    /// Fraction of paths outside the radius-`R` coordinate ball at `T`.
    pub escape_fraction: f64,
    pub escape_se: f64,
    pub inside_unit_fraction: f64,
    pub inside_unit_se: f64,
    /// Mean of [`PathSummary::last_in_unit_ball`] over the paths that visited.
    pub mean_last_exit: f64,
    pub last_exit_se: f64,
    pub checkpoints: Vec<CheckpointStats>,
}

impl TransienceReport {
    /// Whether the unit-ball fractions at the checkpoints never rise by more
    /// than `k` times the larger of the two standard errors.
    pub fn non_increasing_within(&self, k: f64) -> bool {
        self.checkpoints.windows(2).all(|w| {
            let tol = k * w[0].inside_unit_se.max(w[1].inside_unit_se);
            w[1].inside_unit_fraction <= w[0].inside_unit_fraction + tol
        })
    }
}

pub fn transience_stats(ens: &Ensemble, radius: f64) -> Result<TransienceReport> {
    let n = ens.paths.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty ensemble".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!("radius must be > 0, got {radius}")));
    }
    let escaped = ens.paths.iter().filter(|p| p.end.coord_norm() > radius).count();
    let inside = ens.paths.iter().filter(|p| p.end.coord_norm() <= 1.0).count();
    let (escape_fraction, escape_se) = fraction(escaped, n);
    let (inside_unit_fraction, inside_unit_se) = fraction(inside, n);
    let exits: Vec<f64> = ens.paths.iter().filter_map(|p| p.last_in_unit_ball).collect();
    let (mean_last_exit, last_exit_se) = if exits.is_empty() { (0.0, 0.0) } else { mean_se(&exits) };
    let checkpoints = ens
        .config
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let hits = ens.paths.iter().filter(|p| p.snapshots[k].coord_norm() <= 1.0).count();
            let (f, se) = fraction(hits, n);
            CheckpointStats { t, inside_unit_fraction: f, inside_unit_se: se }
        })
        .collect();
    Ok(TransienceReport {
        paths: n,
        horizon: ens.config.horizon,
        radius,
        escape_fraction,
        escape_se,
        inside_unit_fraction,
        inside_unit_se,
        mean_last_exit,
        last_exit_se,
        checkpoints,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub paths: usize,
    pub rho: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub start: Point,
    pub initial_value: f64,
    pub mean_stopped: f64,
    /// `|mean f(X_τ) − f(X₀)|`.
    pub difference: f64,
    pub std_error: f64,
    pub bias_allowance: f64,
    /// Fraction of paths stopped by leaving the ball rather than at `T`.
    pub exited_fraction: f64,
    pub passed: bool,
}

impl MartingaleReport {
    /// Difference in units of the standard error.
    pub fn z_score(&self) -> f64 {
        self.difference / self.std_error
    }
}

/// Runs `n` paths from `cfg.start` until they leave the coordinate ball of
/// radius `rho` about the start (or reach `T`) and compares the mean stopped
/// value of `field` with its initial value.
///
/// Passes when the difference is within `3·SE + BIAS_PER_DT·dt`.
pub fn martingale_check<F>(field: &F, cfg: &PathConfig, n: usize, rho: f64) -> Result<MartingaleReport>
where
    F: Fn(Point) -> Result<f64> + Sync + ?Sized,
{
    cfg.validate()?;
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two paths".into()));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidConfig(format!("stop radius must be >= 0, got {rho}")));
    }
    let x0 = cfg.start;
    let initial_value = field(x0)?;
    // The field is checked on the corners of a box around the ball with some
    // room for overshoot; fields of x, y and z alone peak on corners there.
    let reach = 1.1 * rho + 10.0 * cfg.dt.sqrt();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                field(Point::new(x0.x + sx * reach, x0.y + sy * reach, x0.z + sz * reach))?;
            }
        }
    }

    let steps = cfg.steps();
    let outcomes: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i as u64);
            let mut p = x0;
            let mut exited = p.coord_distance(x0) >= rho;
            let mut k = 0;
            while !exited && k < steps {
                let noise = draw_noise(&mut rng);
                p = match cfg.diffusion {
                    Diffusion::Sol => bm_step(p, cfg.dt, noise, cfg.a),
                    Diffusion::Euclidean => flat_step(p, cfg.dt, noise),
                };
                exited = p.coord_distance(x0) >= rho;
                k += 1;
            }
            Ok((field(p)?, exited))
        })
        .collect::<Result<_>>()?;

    let values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let (mean_stopped, std_error) = mean_se(&values);
    let difference = (mean_stopped - initial_value).abs();
    let bias_allowance = BIAS_PER_DT * cfg.dt;
    let exited_fraction = outcomes.iter().filter(|o| o.1).count() as f64 / n as f64;
    Ok(MartingaleReport {
        paths: n,
        rho,
        dt: cfg.dt,
        horizon: cfg.horizon,
        seed: cfg.seed,
        start: x0,
        initial_value,
        mean_stopped,
        difference,
        std_error,
        bias_allowance,
        exited_fraction,
        passed: difference <= 3.0 * std_error + bias_allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn ga(a: f64) -> GroupParam {
        GroupParam::new(a).unwrap()
    }

    #[test]
    fn zero_noise_is_a_fixed_point() {
        let p = Point::new(0.3, -1.2, 2.5);
        assert_eq!(bm_step(p, 0.1, [0.0; 3], ga(1.5)), p);
    }

    #[test]
    fn step_is_isotropic_at_identity() {
        let p = bm_step(Point::ORIGIN, 0.04, [1.0, -2.0, 0.5], ga(0.0));
        assert_eq!(p, Point::new(0.2, -0.4, 0.1));
    }

    #[test]
    fn one_step_covariance_matches_inverse_metric() {
        use crate::liegroup::inverse_metric_at;
        let n = 1_000_000usize;
        let dt = 1e-2;
        for (p, a) in [(Point::new(0.0, 0.0, 1.0), ga(0.0)), (Point::new(0.5, -0.5, -0.7), ga(1.3))] {
            let mut rng = path_rng(7, 0);
            let mut m = [[0.0f64; 3]; 3];
            let mut m4 = [[0.0f64; 3]; 3];
            for _ in 0..n {
                let q = bm_step(p, dt, draw_noise(&mut rng), a);
                let d = [q.x - p.x, q.y - p.y, q.z - p.z];
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] += d[i] * d[j];
                        m4[i][j] += (d[i] * d[j]).powi(2);
                    }
                }
            }
            let ginv = inverse_metric_at(p, a);
            for i in 0..3 {
                for j in 0..3 {
                    let mean = m[i][j] / n as f64;
                    let var = m4[i][j] / n as f64 - mean * mean;
                    let se = (var / n as f64).sqrt();
                    let want = ginv.0[i][j] * dt;
                    assert!((mean - want).abs() <= 3.0 * se, "({i},{j}) {mean} vs {want} se {se}");
                }
            }
        }
    }

    #[test]
    fn single_step_path_matches_bm_step() {
        let start = Point::new(0.1, 0.2, 0.3);
        let cfg = PathConfig::new(start, 0.01, 0.01, 99, ga(0.7));
        let ens = sample_paths(&cfg, 1).unwrap();
        let mut rng = path_rng(99, 0);
        assert_eq!(ens.paths[0].end, bm_step(start, 0.01, draw_noise(&mut rng), ga(0.7)));
    }

    #[test]
    fn ensembles_are_deterministic_across_thread_counts() {
        let mut cfg = PathConfig::new(Point::ORIGIN, 1.0, 1e-2, 5, ga(1.0));
        cfg.checkpoints = vec![0.5, 1.0];
        cfg.record_stride = Some(10);
        let a = sample_paths(&cfg, 64).unwrap();
        let b = sample_paths(&cfg, 64).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_paths(&cfg, 64).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, serial);
        assert_eq!(a.paths[3].trajectory.len(), 11);
        assert_eq!(a.paths[3].snapshots[1], a.paths[3].end);
        let other = sample_paths(&PathConfig { seed: 6, ..cfg }, 64).unwrap();
        assert_ne!(a.paths[0].end, other.paths[0].end);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let ok = PathConfig::new(Point::ORIGIN, 1.0, 0.1, 0, ga(0.0));
        assert!(sample_paths(&ok, 0).is_err());
        assert!(sample_paths(&PathConfig { dt: 0.0, ..ok.clone() }, 1).is_err());
        assert!(sample_paths(&PathConfig { horizon: 0.05, ..ok.clone() }, 1).is_err());
        assert!(sample_paths(&PathConfig { checkpoints: vec![2.0], ..ok.clone() }, 1).is_err());
        assert!(martingale_check(&|_: Point| Ok(1.0), &ok, 10, -1.0).is_err());
    }

    #[test]
    fn frozen_ensemble_never_escapes() {
        let cfg = PathConfig::new(Point::ORIGIN, 1.0, 0.1, 0, ga(0.0));
        let paths = (0..10)
            .map(|id| PathSummary {
                id,
                end: Point::ORIGIN,
                snapshots: vec![],
                last_in_unit_ball: Some(1.0),
                trajectory: vec![],
            })
            .collect();
        let rep = transience_stats(&Ensemble { config: cfg, paths }, 2.0).unwrap();
        assert_eq!(rep.escape_fraction, 0.0);
        assert_eq!(rep.inside_unit_fraction, 1.0);
        assert_eq!(rep.escape_se, 0.0);
    }

    #[test]
    fn euclidean_control_matches_chi_squared() {
        // |B_T|² / T ~ χ²(3) for flat Brownian motion started at 0.
        let (t, r, n) = (2.0, 2.0, 4000);
        let mut cfg = PathConfig::new(Point::ORIGIN, t, 1e-3, 11, ga(0.0));
        cfg.diffusion = Diffusion::Euclidean;
        let rep = transience_stats(&sample_paths(&cfg, n).unwrap(), r).unwrap();
        let chi = ChiSquared::new(3.0).unwrap();
        let escape = chi.sf(r * r / t);
        let inside = chi.cdf(1.0 / t);
        assert!((rep.escape_fraction - escape).abs() <= 4.0 * rep.escape_se, "{} vs {}", rep.escape_fraction, escape);
        assert!((rep.inside_unit_fraction - inside).abs() <= 4.0 * rep.inside_unit_se.max(1e-3));
    }

    #[test]
    fn zero_radius_stops_immediately() {
        let cfg = PathConfig::new(Point::new(0.0, 0.3, 0.1), 1.0, 1e-3, 3, ga(0.0));
        let f = |p: Point| Ok(p.z.exp() + p.y);
        let rep = martingale_check(&f, &cfg, 20, 0.0).unwrap();
        assert_eq!(rep.difference, 0.0);
        assert_eq!(rep.exited_fraction, 1.0);
        assert!(rep.passed);
    }

    #[test]
    fn martingale_check_separates_harmonic_from_not() {
        let cfg = PathConfig::new(Point::ORIGIN, 10.0, 1e-3, 21, ga(0.0));
        // z is harmonic for every a; e^z is not.
        let lin = martingale_check(&|p: Point| Ok(p.z), &cfg, 2000, 1.0).unwrap();
        assert!(lin.passed, "{lin:?}");
        let exp = martingale_check(&|p: Point| Ok(p.z.exp()), &cfg, 2000, 1.0).unwrap();
        assert!(exp.z_score() > 5.0, "{exp:?}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn ensembles_depend_only_on_inputs(seed in 0u64..1000, n in 1usize..20, a in 0.0..2.0f64) {
            let cfg = PathConfig::new(Point::new(0.1, -0.2, 0.3), 0.05, 1e-3, seed, ga(a));
            let first = sample_paths(&cfg, n).unwrap();
            proptest::prop_assert_eq!(&first, &sample_paths(&cfg, n).unwrap());
            // A larger ensemble extends, never reshuffles, a smaller one.
            let more = sample_paths(&cfg, n + 3).unwrap();
            proptest::prop_assert_eq!(&first.paths[..], &more.paths[..n]);
        }
    }
}
