//! Self-checks for the headline properties, shared by the `verify` command
//! and the acceptance tests. Every check is deterministic for a given seed.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{solve_cubic, solve_quadratic, solve_quartic};
use crate::complexity::{max_cup_length, pairs_within_weight, smale_bound, verify_lemma_claim};
use crate::fractal::{ppm_bytes, render, render_sector_frame, rotate_polar, sector_statistics_in_annulus, Window};
use crate::newton::{newton_escape, solve_pure_power, NewtonConfig};
use crate::poly::{min_separation, roots_to_poly, MonicPolynomial};
use crate::power_iter::{companion, power_iterate, PowerIterResult};
use crate::report::{solve, Method, SolveRequest};
use crate::trace::{make_report, BranchTrace};

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(criterion: u8, name: &str, passed: bool, detail: String) -> Self {
        Self { criterion, name: name.to_owned(), passed, detail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub rng_seed: u64,
    /// Random polynomials per degree for the solver suites.
    pub samples: usize,
    /// Render workers.
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { rng_seed: 0x5eed, samples: 10_000, workers: 8 }
    }
}

/// Minimum root separation for inputs kept in the random suites.
pub const SUITE_SEPARATION: f64 = 0.05;
/// Coefficients are drawn uniformly from the disk of this radius.
pub const COEFF_RADIUS: f64 = 10.0;
/// Newton threshold used by the accuracy suites.
pub const ACCURACY_THRESHOLD: f64 = 1e-8;

pub fn random_in_disk(rng: &mut impl Rng, radius: f64) -> C {
    let rho = radius * rng.gen::<f64>().sqrt();
    C::from_polar(rho, rng.gen_range(-PI..PI))
}

pub fn random_monic(rng: &mut impl Rng, degree: usize) -> MonicPolynomial {
    MonicPolynomial::new((0..degree).map(|_| random_in_disk(rng, COEFF_RADIUS)).collect())
        .expect("finite coefficients")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedCase {
    pub poly: MonicPolynomial,
    pub roots: Vec<C>,
    pub branches: usize,
    /// The quartic took a degenerate path.
    pub degenerate: bool,
}

/// Closed-form solve of a degree 2..=4 polynomial with a fresh trace.
pub fn solve_traced(p: &MonicPolynomial, cfg: &NewtonConfig) -> crate::Result<SolvedCase> {
    let a = p.coeffs();
    let mut trace = BranchTrace::new();
    let (roots, degenerate) = match p.degree() {
        2 => (solve_quadratic(a[1], a[0], cfg, &mut trace)?.roots, false),
        3 => (solve_cubic(a[2], a[1], a[0], cfg, &mut trace)?.roots, false),
        4 => {
            let s = solve_quartic(a[3], a[2], a[1], a[0], cfg, &mut trace)?;
            (s.roots, s.path.is_degenerate())
        }
        d => return Err(crate::Error::DegreeTooSmall(d)),
    };
    Ok(SolvedCase { poly: p.clone(), roots, branches: trace.len(), degenerate })
}

/// `count` seeded random polynomials of `degree` that pass `keep`, solved by
/// the closed form at the accuracy threshold. Inputs whose solve errors are
/// returned as `Err` so callers can count them.
pub fn closed_form_suite<F>(
    degree: usize,
    count: usize,
    seed: u64,
    keep: F,
) -> Vec<crate::Result<SolvedCase>>
where
    F: Fn(&MonicPolynomial, &[C]) -> bool + Sync,
{
    let cfg = NewtonConfig::with_threshold(ACCURACY_THRESHOLD);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (degree as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let batch: Vec<MonicPolynomial> = (0..(count - out.len())).map(|_| random_monic(&mut rng, degree)).collect();
        let solved: Vec<_> = batch.par_iter().map(|p| solve_traced(p, &cfg)).collect();
        out.extend(solved.into_iter().filter(|r| match r {
            Ok(case) => keep(&case.poly, &case.roots),
            Err(_) => true,
        }));
    }
    out
}

/// Separation filter applied to the solver's own roots.
fn separated(_: &MonicPolynomial, roots: &[C]) -> bool {
    min_separation(roots) >= SUITE_SEPARATION
}

pub fn relative_residual_bound(p: &MonicPolynomial) -> f64 {
    1e-6 * p.max_coeff_modulus().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSummary {
    pub quadratic_min: usize,
    pub quadratic_max: usize,
    pub cubic_max: usize,
    pub quartic_generic_max: usize,
    pub quartic_degenerate: Vec<usize>,
    pub pure_power_max: Vec<(u32, usize)>,
    pub solver_errors: usize,
    pub residual_failures: usize,
    pub worst_relative_residual: f64,
}

/// Runs the closed-form suites for degrees 2 to 4 and the `t^d - S` suites
/// for `d = 2..=16`, collecting worst-case branch counts and residuals.
pub fn measure_suites(opts: &VerifyOptions) -> BranchSummary {
    let mut summary = BranchSummary {
        quadratic_min: usize::MAX,
        quadratic_max: 0,
        cubic_max: 0,
        quartic_generic_max: 0,
        quartic_degenerate: Vec::new(),
        pure_power_max: Vec::new(),
        solver_errors: 0,
        residual_failures: 0,
        worst_relative_residual: 0.0,
    };
    for degree in 2..=4 {
        for case in closed_form_suite(degree, opts.samples, opts.rng_seed, separated) {
            let Ok(case) = case else {
                summary.solver_errors += 1;
                continue;
            };
            let bound = relative_residual_bound(&case.poly);
            for r in &case.roots {
                let res = case.poly.evaluate(*r).norm();
                summary.worst_relative_residual = summary.worst_relative_residual.max(res / bound);
                if res >= bound {
                    summary.residual_failures += 1;
                }
            }
            match degree {
                2 => {
                    summary.quadratic_min = summary.quadratic_min.min(case.branches);
                    summary.quadratic_max = summary.quadratic_max.max(case.branches);
                }
                3 => summary.cubic_max = summary.cubic_max.max(case.branches),
                _ if case.degenerate => summary.quartic_degenerate.push(case.branches),
                _ => summary.quartic_generic_max = summary.quartic_generic_max.max(case.branches),
            }
        }
    }
    let cfg = NewtonConfig::with_threshold(ACCURACY_THRESHOLD);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed ^ 0x7075_7265);
    for d in 2..=16u32 {
        let inputs: Vec<C> = (0..opts.samples).map(|_| random_in_disk(&mut rng, COEFF_RADIUS)).collect();
        let results: Vec<_> = inputs
            .par_iter()
            .map(|&s| {
                let mut trace = BranchTrace::new();
                solve_pure_power(d, s, &cfg, &mut trace).map(|sol| (s, sol.roots, trace.len()))
            })
            .collect();
        let mut worst = 0;
        for r in results {
            let Ok((s, roots, branches)) = r else {
                summary.solver_errors += 1;
                continue;
            };
            worst = worst.max(branches);
            let p = MonicPolynomial::pure_power(d as usize, s).expect("valid degree");
            let bound = relative_residual_bound(&p);
            for root in roots {
                let res = p.evaluate(root).norm();
                summary.worst_relative_residual = summary.worst_relative_residual.max(res / bound);
                if res >= bound {
                    summary.residual_failures += 1;
                }
            }
        }
        summary.pure_power_max.push((d, worst));
    }
    summary
}

pub fn check_branch_counts(summary: &BranchSummary, elapsed_secs: f64) -> CheckResult {
    let pure_ok = summary.pure_power_max.iter().all(|&(d, w)| w <= d as usize);
    let passed = summary.quadratic_min == 1
        && summary.quadratic_max == 1
        && summary.cubic_max <= 5
        && summary.quartic_generic_max <= 7
        && pure_ok
        && summary.solver_errors == 0
        && elapsed_secs < 60.0;
    let pure: Vec<String> = summary.pure_power_max.iter().map(|(d, w)| format!("{d}:{w}")).collect();
    CheckResult::new(
        1,
        "branch-count reproduction",
        passed,
        format!(
            "quadratic {}..{}, cubic <= {}, quartic generic <= {}, quartic degenerate paths {:?}, t^d-S [{}], solver errors {}, {:.1}s",
            summary.quadratic_min,
            summary.quadratic_max,
            summary.cubic_max,
            summary.quartic_generic_max,
            summary.quartic_degenerate,
            pure.join(" "),
            summary.solver_errors,
            elapsed_secs
        ),
    )
}

pub fn check_strict_bound(summary: &BranchSummary) -> CheckResult {
    let measured = [(2u64, summary.quadratic_max), (3, summary.cubic_max), (4, summary.quartic_generic_max)];
    let mut passed = smale_bound(2) == Ok(0.0);
    let mut parts = Vec::new();
    for (d, m) in measured {
        let r = make_report(d, m as u64).expect("d >= 2");
        passed &= r.bound_satisfied;
        parts.push(format!("d={d}: {m} > {:.6}", r.smale_lower_bound));
    }
    CheckResult::new(2, "strict bound chain", passed, parts.join(", "))
}

pub fn check_accuracy(summary: &BranchSummary) -> CheckResult {
    CheckResult::new(
        3,
        "root accuracy (residuals)",
        summary.residual_failures == 0 && summary.solver_errors == 0,
        format!(
            "{} residuals above 1e-6*max(1,max|a|); worst residual/bound {:.3e}",
            summary.residual_failures,
            summary.worst_relative_residual
        ),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractalMeasurement {
    pub d: u32,
    pub seconds: f64,
    pub home_fraction: f64,
    pub non_home_max_fraction: f64,
    pub home_mean_iterations: f64,
    pub non_home_mean_iterations: f64,
}

/// Seed-1 diagram of `x^d - S` at 512x512 on the default window, with
/// convergence fractions over the annulus `0.5 <= |S| <= 2`.
pub fn measure_fractal(d: u32, workers: usize) -> crate::Result<FractalMeasurement> {
    let start = Instant::now();
    let grid = render(d, C::new(1.0, 0.0), &NewtonConfig::default(), &Window::default(), (512, 512), workers)?;
    let seconds = start.elapsed().as_secs_f64();
    let stats = sector_statistics_in_annulus(&grid, 0.5, 2.0);
    let home = &stats.sectors[0];
    let others = &stats.sectors[1..];
    Ok(FractalMeasurement {
        d,
        seconds,
        home_fraction: home.converged_fraction,
        non_home_max_fraction: others.iter().map(|s| s.converged_fraction).fold(0.0, f64::max),
        home_mean_iterations: home.mean_iterations,
        non_home_mean_iterations: others.iter().map(|s| s.mean_iterations).sum::<f64>() / others.len() as f64,
    })
}

pub fn check_fractal(opts: &VerifyOptions) -> CheckResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for d in [2, 3, 5] {
        match measure_fractal(d, opts.workers) {
            Ok(m) => {
                let fast_enough = d == 5 || m.seconds < 5.0;
                passed &= fast_enough && m.home_fraction >= 0.99 && m.non_home_max_fraction <= 0.6;
                parts.push(format!(
                    "d={d}: {:.2}s home {:.4} (mean {:.2} it) non-home max {:.4} (mean {:.2} it)",
                    m.seconds, m.home_fraction, m.home_mean_iterations, m.non_home_max_fraction, m.non_home_mean_iterations
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("d={d}: {e}"));
            }
        }
    }
    CheckResult::new(4, "fractal sector contrast", passed, parts.join("; "))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMeasurement {
    pub k: usize,
    pub cells: usize,
    pub analytic_mismatches: usize,
    /// Cells where the directly seeded run differs by more than one
    /// iteration or in convergence.
    pub floating_outliers: usize,
}

/// Compare the seed `e^{2 pi i k/d^2}` diagram with the seed-1 diagram of the
/// rotated plane on a 64x64 grid.
pub fn measure_rotation(d: u32, k: usize, workers: usize) -> crate::Result<RotationMeasurement> {
    let cfg = NewtonConfig::default();
    let window = Window::default();
    let res = (64, 64);
    let frame = render_sector_frame(d, k, &cfg, &window, res, workers)?;
    let direct = render(d, crate::newton::sector_seed(d, k), &cfg, &window, res, workers)?;
    let turn = 2.0 * PI * k as f64 / d as f64;
    let one = C::new(1.0, 0.0);
    let mut analytic_mismatches = 0;
    let mut floating_outliers = 0;
    for row in 0..res.1 {
        for col in 0..res.0 {
            let s = frame.center(col, row);
            let want = newton_escape(d, rotate_polar(s, -turn), one, &cfg);
            let got = frame.cell(col, row);
            if got.iterations != want.iterations || got.converged != want.converged {
                analytic_mismatches += 1;
            }
            let other = direct.cell(col, row);
            if other.converged != got.converged || other.iterations.abs_diff(got.iterations) > 1 {
                floating_outliers += 1;
            }
        }
    }
    Ok(RotationMeasurement { k, cells: res.0 * res.1, analytic_mismatches, floating_outliers })
}

pub fn check_rotation(opts: &VerifyOptions) -> CheckResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for k in [1, 2] {
        match measure_rotation(3, k, opts.workers) {
            Ok(m) => {
                let agree = 1.0 - m.floating_outliers as f64 / m.cells as f64;
                passed &= m.analytic_mismatches == 0 && agree >= 0.999;
                parts.push(format!(
                    "k={k}: analytic mismatches {}, floating within 1 iteration {:.4}",
                    m.analytic_mismatches, agree
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("k={k}: {e}"));
            }
        }
    }
    CheckResult::new(5, "rotation equivariance", passed, parts.join("; "))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCase {
    pub roots: Vec<C>,
    /// `|lambda_2 / lambda_1|`.
    pub ratio: f64,
}

/// Polynomials with a known dominance ratio in `[0.3, 0.9]`: a dominant root,
/// a second root at the chosen ratio, and up to three much smaller ones.
pub fn rate_suite(seed: u64, count: usize) -> Vec<RateCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7261_7465);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(2..=5);
            let big = rng.gen_range(1.0..3.0);
            let ratio = rng.gen_range(0.3..0.9);
            let mut roots = vec![
                C::from_polar(big, rng.gen_range(-PI..PI)),
                C::from_polar(big * ratio, rng.gen_range(-PI..PI)),
            ];
            for _ in 2..degree {
                let m = big * ratio * rng.gen_range(0.05..0.5);
                roots.push(C::from_polar(m, rng.gen_range(-PI..PI)));
            }
            RateCase { roots, ratio }
        })
        .collect()
}

pub const RATE_TOL: f64 = 1e-10;
pub const RATE_MAX_ITERS: u32 = 10_000;

pub fn predicted_iterations(ratio: f64, tol: f64) -> u32 {
    (tol.ln() / ratio.ln()).ceil() as u32 + 50
}

pub fn run_rate_case(case: &RateCase) -> crate::Result<PowerIterResult> {
    let p = roots_to_poly(&case.roots)?;
    power_iterate(&companion(&p), RATE_MAX_ITERS, RATE_TOL)
}

pub fn check_power_rate(opts: &VerifyOptions) -> CheckResult {
    let suite = rate_suite(opts.rng_seed, 50);
    let mut bad_rate = 0;
    let mut slow = 0;
    let mut worst_rel = 0.0f64;
    for case in &suite {
        match run_rate_case(case) {
            Ok(r) => {
                let rel = r.rate_estimate.map_or(f64::INFINITY, |x| (x - case.ratio).abs() / case.ratio);
                worst_rel = worst_rel.max(rel);
                if rel > 0.1 {
                    bad_rate += 1;
                }
                if !r.converged || r.iterations > predicted_iterations(case.ratio, RATE_TOL) {
                    slow += 1;
                }
            }
            Err(_) => {
                bad_rate += 1;
                slow += 1;
            }
        }
    }
    CheckResult::new(
        6,
        "power-iteration rate",
        bad_rate == 0 && slow == 0,
        format!(
            "{} of 50 fitted ratios off by > 10% (worst relative error {:.1e}), {} over the iteration bound",
            bad_rate,
            worst_rel,
            slow
        ),
    )
}

pub fn check_equal_magnitude(opts: &VerifyOptions) -> CheckResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, coeffs) in [("t^2-1", [-1.0, 0.0]), ("t^2+1", [1.0, 0.0])] {
        let p = MonicPolynomial::from_real(&coeffs).expect("finite");
        let flagged = matches!(power_iterate(&companion(&p), 1000, RATE_TOL), Ok(r) if !r.converged && r.equal_magnitude);
        passed &= flagged;
        parts.push(format!("{name} flagged: {flagged}"));
    }
    let false_flags = rate_suite(opts.rng_seed, 50)
        .iter()
        .filter(|c| run_rate_case(c).map_or(true, |r| r.equal_magnitude))
        .count();
    passed &= false_flags == 0;
    parts.push(format!("false flags on separated suite: {false_flags}"));
    CheckResult::new(7, "equal-magnitude detection", passed, parts.join(", "))
}

/// Exact maximum number of distinct pairs within `budget`, by 0/1 knapsack
/// over all pairs of weight at most `budget`.
pub fn knapsack_cup_length(budget: u32) -> usize {
    let b = budget as usize;
    // best[w] = most pairs with total weight exactly w
    let mut best: Vec<Option<usize>> = vec![None; b + 1];
    best[0] = Some(0);
    for weight in 1..=b {
        for _copy in 0..weight {
            for w in (weight..=b).rev() {
                if let Some(n) = best[w - weight] {
                    best[w] = Some(best[w].map_or(n + 1, |m| m.max(n + 1)));
                }
            }
        }
    }
    best.iter().flatten().copied().max().unwrap_or(0)
}

pub fn check_cup_length() -> CheckResult {
    let pairs_ok = (0..=1000u64).all(|n| {
        let enumerated: u64 = (1..=n).map(|m| n - m + 1).sum();
        pairs_within_weight(n) == enumerated
    });
    let greedy_ok = (1..=20u32).all(|b| {
        max_cup_length(1u64 << b).is_ok_and(|c| c.is_valid() && c.cardinality == knapsack_cup_length(b))
    });
    let failing: Vec<u32> = (1..=60u32).filter(|&j| verify_lemma_claim(1u64 << j) != Ok(true)).collect();
    let bound_ok = smale_bound(256) == Ok(3.0);
    CheckResult::new(
        8,
        "cup-length counting",
        pairs_ok && greedy_ok && failing.is_empty() && bound_ok,
        format!(
            "pair count {}, greedy vs exhaustive {}, smale_bound(256)=3 {}, lemma claim fails for j in {:?}",
            pairs_ok, greedy_ok, bound_ok, failing
        ),
    )
}

/// Library-level determinism: renders at different worker counts and
/// repeated solves are bit-identical.
pub fn check_determinism(opts: &VerifyOptions) -> CheckResult {
    let cfg = NewtonConfig::default();
    let window = Window::default();
    let seed = C::new(0.77, 0.64);
    let a = render(3, seed, &cfg, &window, (96, 80), 1).map(|g| ppm_bytes(&g));
    let b = render(3, seed, &cfg, &window, (96, 80), opts.workers.max(2)).map(|g| ppm_bytes(&g));
    let renders_ok = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let p = random_monic(&mut rng, 4);
    let solves_ok = [Method::ClosedForm, Method::PowerIteration].iter().all(|&method| {
        let req = SolveRequest { coefficients: p.coeffs().to_vec(), method, epsilon: 1e-8, max_iters: 1000 };
        let x = solve(&req);
        let y = solve(&req);
        match (x, y) {
            (Ok(x), Ok(y)) => format!("{x:?}") == format!("{y:?}"),
            (Err(x), Err(y)) => x == y,
            _ => false,
        }
    });
    CheckResult::new(
        9,
        "determinism",
        renders_ok && solves_ok,
        format!("render identical across workers {renders_ok}, repeated solves identical {solves_ok}"),
    )
}

/// Every check in order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    let start = Instant::now();
    let summary = measure_suites(opts);
    let elapsed = start.elapsed().as_secs_f64();
    vec![
        check_branch_counts(&summary, elapsed),
        check_strict_bound(&summary),
        check_accuracy(&summary),
        check_fractal(opts),
        check_rotation(opts),
        check_power_rate(opts),
        check_equal_magnitude(opts),
        check_cup_length(),
        check_determinism(opts),
    ]
}
