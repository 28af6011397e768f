//! Newton's method on the complex plane for `x^d - S`, with seed selection by
//! angular sector. Seeding is the only place these radicals branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::BranchTrace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Convergence radius `r`.
    pub threshold_r: f64,
    /// Iteration cap `N`.
    pub max_iters: u32,
    /// Orbits leaving this modulus are declared divergent.
    pub divergence_bailout: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { threshold_r: 0.1, max_iters: 100, divergence_bailout: 1e8 }
    }
}

impl NewtonConfig {
    pub fn with_threshold(threshold_r: f64) -> Self {
        Self { threshold_r, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.threshold_r.is_finite() || self.threshold_r <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "threshold_r must be positive, got {}",
                self.threshold_r
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if self.divergence_bailout.is_nan() || self.divergence_bailout <= 0.0 {
            return Err(Error::InvalidArgument("divergence_bailout must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIters,
    Diverged,
    /// The iterate hit `x = 0` exactly, where the Newton step divides by zero.
    CriticalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub converged: bool,
    pub value: Complex64,
    pub iterations: u32,
    pub stop: StopReason,
}

impl NewtonOutcome {
    fn stopped(value: Complex64, iterations: u32, stop: StopReason) -> Self {
        Self { converged: stop == StopReason::Converged, value, iterations, stop }
    }
}

/// `(x^{d-1}, x^d)` by repeated multiplication.
#[inline]
fn powers(x: Complex64, d: u32) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 1..d {
        p *= x;
    }
    (p, p * x)
}

/// One Newton step for `x^d - s`; `None` at the critical point `x = 0`.
#[inline]
pub fn newton_step(d: u32, s: Complex64, x: Complex64) -> Option<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return None;
    }
    let (xd1, xd) = powers(x, d);
    Some(x - (xd - s) / (xd1 * d as f64))
}

/// Residual tolerance used by the solver path: `r^d * d * max(1, |S|)`,
/// floored at the rounding noise of evaluating `x^d - S` in double precision.
fn residual_tolerance(d: u32, s_norm: f64, x_pow_norm: f64, r: f64) -> f64 {
    let nominal = r.powi(d as i32) * d as f64 * s_norm.max(1.0);
    let floor = 4.0 * d as f64 * f64::EPSILON * (x_pow_norm + s_norm);
    nominal.max(floor)
}

/// Newton iteration for a root of `x^d - s` from `seed`.
///
/// Stops once the last step is shorter than `threshold_r` and the residual
/// `|x^d - s|` is within `threshold_r^d * d * max(1, |s|)` (never tighter than
/// double-precision rounding allows). An exact root as seed converges with
/// zero iterations. The first step from a unit seed lands near `s/d`, so the
/// divergence bailout is scaled by `max(1, |s|)`.
pub fn newton_root(d: u32, s: Complex64, seed: Complex64, cfg: &NewtonConfig) -> Result<NewtonOutcome> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d as usize));
    }
    if seed == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSeed);
    }
    let s_norm = s.norm();
    let r = cfg.threshold_r;
    let bailout = cfg.divergence_bailout * s_norm.max(1.0);
    let mut x = seed;
    if powers(x, d).1 == s {
        return Ok(NewtonOutcome::stopped(x, 0, StopReason::Converged));
    }
    for it in 1..=cfg.max_iters {
        let Some(next) = newton_step(d, s, x) else {
            return Ok(NewtonOutcome::stopped(x, it - 1, StopReason::CriticalPoint));
        };
        if !next.is_finite() || next.norm() > bailout {
            return Ok(NewtonOutcome::stopped(next, it, StopReason::Diverged));
        }
        let step = (next - x).norm();
        x = next;
        let xd = powers(x, d).1;
        let residual = (xd - s).norm();
        if step < r && residual < residual_tolerance(d, s_norm, xd.norm(), r) {
            return Ok(NewtonOutcome::stopped(x, it, StopReason::Converged));
        }
    }
    Ok(NewtonOutcome::stopped(x, cfg.max_iters, StopReason::MaxIters))
}

/// Distance from `x` to the nearest exact `d`-th root of `s`, with the roots
/// taken analytically as `|s|^{1/d} e^{i(arg s + 2 pi j)/d}`.
pub fn nearest_root_distance(d: u32, s: Complex64, x: Complex64) -> f64 {
    let (rho, theta) = s.to_polar();
    let modulus = rho.powf(1.0 / d as f64);
    (0..d)
        .map(|j| {
            let root = Complex64::from_polar(modulus, (theta + 2.0 * PI * j as f64) / d as f64);
            (x - root).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Escape-time run used by fractal diagrams: convergence means the iterate
/// lies within `threshold_r` of a true root. The seed itself is checked as
/// iterate zero, and `s = 0` is converged at zero iterations.
pub fn newton_escape(d: u32, s: Complex64, seed: Complex64, cfg: &NewtonConfig) -> NewtonOutcome {
    if s == Complex64::new(0.0, 0.0) {
        return NewtonOutcome::stopped(Complex64::new(0.0, 0.0), 0, StopReason::Converged);
    }
    let mut x = seed;
    for it in 0..=cfg.max_iters {
        if nearest_root_distance(d, s, x) < cfg.threshold_r {
            return NewtonOutcome::stopped(x, it, StopReason::Converged);
        }
        if it == cfg.max_iters {
            break;
        }
        let Some(next) = newton_step(d, s, x) else {
            return NewtonOutcome::stopped(x, it, StopReason::CriticalPoint);
        };
        if !next.is_finite() || next.norm() > cfg.divergence_bailout {
            return NewtonOutcome::stopped(next, it + 1, StopReason::Diverged);
        }
        x = next;
    }
    NewtonOutcome::stopped(x, cfg.max_iters, StopReason::MaxIters)
}

/// `arg(z)` normalised to `[-pi, pi)`.
fn arg_half_open(z: Complex64) -> f64 {
    let a = z.arg();
    if a >= PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Sector `k` holds every `S` with `arg(S e^{-2 pi i k/d})` in `[-pi/d, pi/d)`:
/// the region where seed `e^{2 pi i k/d^2}` plays the role seed 1 plays for
/// `S` near the positive real axis.
pub fn sector_of(d: u32, s: Complex64) -> usize {
    // (arg/pi * d + 1) / 2 is exact at arg = -pi
    let k = ((arg_half_open(s) / PI * d as f64 + 1.0) / 2.0).floor() as i64;
    k.rem_euclid(d as i64) as usize
}

/// Seed `e^{2 pi i k / d^2}` for sector `k`.
pub fn sector_seed(d: u32, k: usize) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (d as f64 * d as f64))
}

fn seed_for(d: u32, s: Complex64, trace: &mut BranchTrace) -> (Complex64, usize) {
    if d == 2 {
        // the quadratic table {1, i}, keyed on the sign of Re(S)
        return if trace.record_decision("re_s_neg", s.re < 0.0) {
            (Complex64::new(0.0, 1.0), 1)
        } else {
            (Complex64::new(1.0, 0.0), 0)
        };
    }
    let target = sector_of(d, s);
    // chain of at most d - 1 comparisons; the last sector needs no test
    for k in 0..d as usize - 1 {
        if trace.record_decision(&format!("sector_{k}"), target == k) {
            return (sector_seed(d, k), k);
        }
    }
    (sector_seed(d, d as usize - 1), d as usize - 1)
}

/// Pick the Newton seed for a `d`-th root of `s` and report its sector.
pub fn select_seed(d: u32, s: Complex64) -> Result<(Complex64, usize)> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d as usize));
    }
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroRadicand);
    }
    Ok(seed_for(d, s, &mut BranchTrace::disabled()))
}

/// Like [`select_seed`] but records each comparison on `trace`. `s = 0` is
/// accepted and lands in sector 0.
pub fn select_seed_traced(d: u32, s: Complex64, trace: &mut BranchTrace) -> (Complex64, usize) {
    seed_for(d, s, trace)
}

/// Fixed Newton steps applied after convergence inside [`radical`].
pub const RADICAL_POLISH_STEPS: u32 = 3;

/// A `d`-th root of `s` computed by seeded Newton, recording the seed
/// decisions on `trace`. This is the only radical the solvers use.
///
/// A converged root is refined by [`RADICAL_POLISH_STEPS`] further Newton
/// steps. They are computation nodes with a fixed count, so they add no
/// decisions, and they keep the threshold `r` from bounding the accuracy.
pub fn radical(d: u32, s: Complex64, cfg: &NewtonConfig, trace: &mut BranchTrace) -> Result<NewtonOutcome> {
    let (seed, _) = select_seed_traced(d, s, trace);
    let mut out = newton_root(d, s, seed, cfg)?;
    trace.record_computations(out.iterations as u64);
    if !out.converged {
        return Err(Error::NoConvergence(out));
    }
    for _ in 0..RADICAL_POLISH_STEPS {
        out.value = newton_step(d, s, out.value).filter(|x| x.is_finite()).unwrap_or(out.value);
    }
    trace.record_computations(RADICAL_POLISH_STEPS as u64);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurePowerSolution {
    pub roots: Vec<Complex64>,
    /// Newton iterations spent on the principal root; the rest are rotations.
    pub iterations: u32,
}

/// All roots of `t^d - s`: one seeded Newton root times the `d`-th roots of
/// unity. Records at most `d` decisions (the zero test plus the sector chain).
pub fn solve_pure_power(d: u32, s: Complex64, cfg: &NewtonConfig, trace: &mut BranchTrace) -> Result<PurePowerSolution> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d as usize));
    }
    cfg.validate()?;
    if trace.record_decision("s_is_zero", s == Complex64::new(0.0, 0.0)) {
        return Ok(PurePowerSolution { roots: vec![Complex64::new(0.0, 0.0); d as usize], iterations: 0 });
    }
    let principal = radical(d, s, cfg, trace)?;
    let roots = (0..d)
        .map(|j| {
            if j == 0 {
                principal.value
            } else {
                principal.value * Complex64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)
            }
        })
        .collect();
    Ok(PurePowerSolution { roots, iterations: principal.iterations })
}
