use rayon::prelude::*;
use serde::Serialize;

use solharm_core::hyperbolic::EigenConfig;
use solharm_core::legendre::p_minus_half_cosh;
use solharm_core::stochastic::{martingale_check, sample_paths, transience_stats};
use solharm_core::verify::{identity_suite, residual_grid, EIGEN_ORACLE_TOL};
use solharm_core::{
    Error, GridSpec, GroupParam, HarmonicFunction, IdentityReport, MartingaleReport, PathConfig, Point,
    RadialEigenfunction, ResidualReport, SuiteConfig, TransienceReport,
};

use crate::args::{BmArgs, EigenArgs, Format, VerifyArgs};
use crate::output::{csv, json, num, SCHEMA_VERSION};

/// Largest `--rmax` accepted by `eigenfunction`.
const MAX_RMAX: f64 = 100.0;

#[derive(Debug)]
pub enum Failure {
    /// Rejected input; exit code 2.
    Invalid(String),
    /// Computation failed; exit code 1.
    Runtime(String),
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(e.to_string())
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

pub struct Outcome {
    pub body: String,
    pub passed: bool,
    /// One-line summary for stderr.
    pub summary: String,
}

fn check_step(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{name} must be > 0, got {v}")))
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    command: &'static str,
    a: f64,
    h: f64,
    seed: u64,
    grid: &'a GridSpec,
    passed: bool,
    identity: &'a IdentityReport,
    residuals: Residuals<'a>,
    lift_min: f64,
    lift_max: f64,
}

#[derive(Serialize)]
struct Residuals<'a> {
    analytic: &'a ResidualReport,
    finite_difference: &'a ResidualReport,
}

pub fn verify(args: &VerifyArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    let a = GroupParam::new(args.a).map_err(invalid)?;
    check_step("h", args.h)?;
    let grid = GridSpec::parse(&args.grid).map_err(invalid)?;
    if args.samples == 0 {
        return Err(Failure::Invalid("samples must be >= 1".into()));
    }

    let suite = identity_suite(&SuiteConfig { seed: args.seed, samples: args.samples, ..SuiteConfig::default() })
        .map_err(runtime)?;
    let hf = HarmonicFunction::standard().map_err(runtime)?;
    let res = residual_grid(&hf, &grid, a, args.h).map_err(runtime)?;
    let passed = suite.passed && res.passes();
    let (lift_min, lift_max) = res.value_range();

    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(&VerifyReport {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            a: a.value(),
            h: args.h,
            seed: args.seed,
            grid: &grid,
            passed,
            identity: &suite,
            residuals: Residuals { analytic: &res.analytic, finite_difference: &res.fd },
            lift_min,
            lift_max,
        }),
        Format::Csv => csv(
            &["x", "y", "z", "u", "scale", "analytic_residual", "fd_residual"],
            res.samples.iter().map(|s| {
                vec![
                    num(s.point.x),
                    num(s.point.y),
                    num(s.point.z),
                    num(s.value),
                    num(s.scale),
                    s.analytic.map(num).unwrap_or_default(),
                    num(s.fd),
                ]
            }),
        ),
        Format::Text => format!(
            "{suite}\n{}\n{}\nlift range [{}, {}]\nverify: {}\n",
            res.analytic,
            res.fd,
            num(lift_min),
            num(lift_max),
            if passed { "PASS" } else { "FAIL" }
        ),
    };
    let summary = format!(
        "verify a={}: identities {}, analytic max_rel {:.3e}, fd max_rel {:.3e}",
        num(a.value()),
        if suite.passed { "pass" } else { "FAIL" },
        res.analytic.max_rel,
        res.fd.max_rel
    );
    Ok(Outcome { body, passed, summary })
}

#[derive(Serialize)]
struct EigenRow {
    r: f64,
    v: f64,
    dv: f64,
    oracle: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct EigenReport<'a> {
    schema_version: u32,
    command: &'static str,
    rmax: f64,
    points: usize,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
    rows: &'a [EigenRow],
}

pub fn eigenfunction(args: &EigenArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    if !(args.rmax > 0.0 && args.rmax <= MAX_RMAX) {
        return Err(Failure::Invalid(format!("rmax must lie in (0, {MAX_RMAX}], got {}", args.rmax)));
    }
    if args.points < 2 {
        return Err(Failure::Invalid(format!("points must be >= 2, got {}", args.points)));
    }
    let cfg = EigenConfig { r_max: args.rmax.max(EigenConfig::default().r_max), ..EigenConfig::default() };
    let ef = RadialEigenfunction::solve(cfg).map_err(runtime)?;
    let rows: Vec<EigenRow> = (0..args.points)
        .into_par_iter()
        .map(|i| {
            let r = if i + 1 == args.points { args.rmax } else { args.rmax * i as f64 / (args.points - 1) as f64 };
            let (v, dv) = ef.eval(r)?;
            let oracle = p_minus_half_cosh(r);
            Ok(EigenRow { r, v, dv, oracle, deviation: (v - oracle).abs() })
        })
        .collect::<Result<_, Error>>()
        .map_err(runtime)?;
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let passed = max_deviation <= EIGEN_ORACLE_TOL;

    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            &["r", "v", "dv", "oracle", "deviation"],
            rows.iter().map(|r| vec![num(r.r), num(r.v), num(r.dv), num(r.oracle), num(r.deviation)]),
        ),
        Format::Json => json(&EigenReport {
            schema_version: SCHEMA_VERSION,
            command: "eigenfunction",
            rmax: args.rmax,
            points: args.points,
            max_deviation,
            tolerance: EIGEN_ORACLE_TOL,
            passed,
            rows: &rows,
        }),
        Format::Text => format!(
            "points {} on [0, {}]\nv(rmax) = {}\nmax oracle deviation {:.3e} (tol {:.0e}): {}\n",
            args.points,
            num(args.rmax),
            num(rows.last().map_or(f64::NAN, |r| r.v)),
            max_deviation,
            EIGEN_ORACLE_TOL,
            if passed { "PASS" } else { "FAIL" }
        ),
    };
    let summary = format!("max oracle deviation {max_deviation:.3e}");
    Ok(Outcome { body, passed, summary })
}

#[derive(Serialize)]
struct BmReport<'a> {
    schema_version: u32,
    command: &'static str,
    a: f64,
    paths: usize,
    horizon: f64,
    dt: f64,
    seed: u64,
    transience: &'a TransienceReport,
    inside_unit_non_increasing: bool,
    martingale: Option<&'a MartingaleReport>,
    passed: bool,
}

/// Default checkpoints: 10, 25 and 50 where they fit, and always `T`.
fn default_checkpoints(horizon: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = [10.0, 25.0, 50.0].into_iter().filter(|&t| t < horizon).collect();
    ts.push(horizon);
    ts
}

pub fn bm(args: &BmArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    let a = GroupParam::new(args.a).map_err(invalid)?;
    if args.paths == 0 {
        return Err(Failure::Invalid("paths must be >= 1".into()));
    }
    check_step("radius", args.radius)?;
    if args.dump_stride == 0 {
        return Err(Failure::Invalid("dump-stride must be >= 1".into()));
    }
    let mut cfg = PathConfig::new(Point::ORIGIN, args.horizon, args.dt, args.seed, a);
    cfg.checkpoints = args.checkpoints.clone().unwrap_or_else(|| default_checkpoints(args.horizon));
    cfg.record_stride = args.dump_paths.as_ref().map(|_| args.dump_stride);
    cfg.validate().map_err(invalid)?;

    let mart_cfg = PathConfig::new(Point::ORIGIN, args.martingale_horizon, args.martingale_dt, args.seed, a);
    if args.martingale {
        mart_cfg.validate().map_err(invalid)?;
        if args.martingale_paths < 2 {
            return Err(Failure::Invalid("martingale-paths must be >= 2".into()));
        }
        if !(args.rho >= 0.0 && args.rho.is_finite()) {
            return Err(Failure::Invalid(format!("rho must be >= 0, got {}", args.rho)));
        }
    }

    let ens = sample_paths(&cfg, args.paths).map_err(runtime)?;
    let transience = transience_stats(&ens, args.radius).map_err(runtime)?;
    let monotone = transience.non_increasing_within(2.0);

    if let Some(path) = &args.dump_paths {
        let rows = ens.paths.iter().flat_map(|p| {
            p.trajectory
                .iter()
                .map(move |(t, q)| vec![p.id.to_string(), num(*t), num(q.x), num(q.y), num(q.z)])
        });
        let body = csv(&["path_id", "t", "x", "y", "z"], rows);
        std::fs::write(path, body)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }

    let martingale = if args.martingale {
        let hf = HarmonicFunction::standard().map_err(runtime)?;
        // Errors here come from a stop radius that leaves the domain of ũ.
        Some(martingale_check(&|p| hf.lift_u(p), &mart_cfg, args.martingale_paths, args.rho).map_err(invalid)?)
    } else {
        None
    };
    let passed = monotone && martingale.as_ref().is_none_or(|m| m.passed);

    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(&BmReport {
            schema_version: SCHEMA_VERSION,
            command: "bm",
            a: a.value(),
            paths: args.paths,
            horizon: args.horizon,
            dt: args.dt,
            seed: args.seed,
            transience: &transience,
            inside_unit_non_increasing: monotone,
            martingale: martingale.as_ref(),
            passed,
        }),
        Format::Csv => csv(
            &["t", "inside_unit_fraction", "inside_unit_se"],
            transience
                .checkpoints
                .iter()
                .map(|c| vec![num(c.t), num(c.inside_unit_fraction), num(c.inside_unit_se)]),
        ),
        Format::Text => {
            let mut s = format!(
                "paths {} T {} dt {} seed {}\nescape fraction (R = {}) {} ± {}\nmean last exit from unit ball {} ± {}\n",
                args.paths,
                num(args.horizon),
                num(args.dt),
                args.seed,
                num(args.radius),
                num(transience.escape_fraction),
                num(transience.escape_se),
                num(transience.mean_last_exit),
                num(transience.last_exit_se),
            );
            for c in &transience.checkpoints {
                s += &format!("inside unit ball at t = {}: {} ± {}\n", num(c.t), num(c.inside_unit_fraction), num(c.inside_unit_se));
            }
            if let Some(m) = &martingale {
                s += &format!(
                    "martingale rho {}: |mean - u0| = {:.3e}, se {:.3e}, bias allowance {:.0e}: {}\n",
                    num(m.rho),
                    m.difference,
                    m.std_error,
                    m.bias_allowance,
                    if m.passed { "PASS" } else { "FAIL" }
                );
            }
            s += &format!("bm: {}\n", if passed { "PASS" } else { "FAIL" });
            s
        }
    };
    let summary = format!(
        "bm: inside-unit fractions {}{}",
        transience.checkpoints.iter().map(|c| num(c.inside_unit_fraction)).collect::<Vec<_>>().join(" -> "),
        martingale.as_ref().map_or(String::new(), |m| format!(", martingale z = {:.2}", m.z_score()))
    );
    Ok(Outcome { body, passed, summary })
}
