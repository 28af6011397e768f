//! Solver dispatch and the JSON report every solver produces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_form::{solve_cubic, solve_quadratic, solve_quartic};
use crate::error::{Error, Result};
use crate::newton::{solve_pure_power, NewtonConfig};
use crate::poly::{has_repeated_roots, MonicPolynomial};
use crate::power_iter::solve_by_power_iteration;
use crate::trace::BranchTrace;

type C = Complex64;

pub const SCHEMA_VERSION: u32 = 1;

/// Roots closer than this are reported as a repeated-root warning.
pub const REPEATED_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    PowerIteration,
    PurePower,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(Method::ClosedForm),
            "power-iteration" => Ok(Method::PowerIteration),
            "pure-power" => Ok(Method::PurePower),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Output of any solver. A complete report has one root, residual and
/// iteration count per degree; an incomplete one carries the roots found
/// before the failure and a warning naming the failed stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub schema: u32,
    pub method: Method,
    pub degree: usize,
    /// Requested tolerance: Newton threshold or power-iteration step tolerance.
    pub epsilon: f64,
    pub roots: Vec<C>,
    /// `|p(root)|` against the input polynomial.
    pub residuals: Vec<f64>,
    pub branch_count: usize,
    pub per_root_iterations: Vec<u32>,
    pub warnings: Vec<String>,
    pub complete: bool,
}

impl RootReport {
    pub fn new(method: Method, degree: usize, epsilon: f64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            method,
            degree,
            epsilon,
            roots: Vec::with_capacity(degree),
            residuals: Vec::with_capacity(degree),
            branch_count: 0,
            per_root_iterations: Vec::with_capacity(degree),
            warnings: Vec::new(),
            complete: true,
        }
    }

    pub fn push_root(&mut self, p: &MonicPolynomial, root: C, iterations: u32) {
        self.roots.push(root);
        self.residuals.push(p.evaluate(root).norm());
        self.per_root_iterations.push(iterations);
    }

    pub fn fail(&mut self, warning: String) {
        self.complete = false;
        self.warnings.push(warning);
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    fn flag_repeated_roots(&mut self) {
        if has_repeated_roots(&self.roots, REPEATED_ROOT_TOL) {
            self.warnings.push(format!("repeated roots within {REPEATED_ROOT_TOL:e}"));
        }
    }
}

/// Roots of a degree 2, 3 or 4 polynomial by the closed-form solvers.
/// Every root is charged the Newton iterations of all radicals, since each
/// root depends on all of them.
pub fn solve_closed_form(p: &MonicPolynomial, cfg: &NewtonConfig) -> Result<RootReport> {
    let a = p.coeffs();
    let mut trace = BranchTrace::new();
    let mut note = None;
    let (roots, iterations) = match p.degree() {
        2 => {
            let s = solve_quadratic(a[1], a[0], cfg, &mut trace)?;
            (s.roots, s.newton_iterations)
        }
        3 => {
            let s = solve_cubic(a[2], a[1], a[0], cfg, &mut trace)?;
            (s.roots, s.newton_iterations)
        }
        4 => {
            let s = solve_quartic(a[3], a[2], a[1], a[0], cfg, &mut trace)?;
            if s.path.is_degenerate() {
                note = Some(format!("degenerate quartic path: {:?}", s.path));
            }
            (s.roots, s.newton_iterations)
        }
        d => return Err(Error::InvalidArgument(format!("closed form needs degree 2, 3 or 4, got {d}"))),
    };
    let mut report = RootReport::new(Method::ClosedForm, p.degree(), cfg.threshold_r);
    for r in roots {
        report.push_root(p, r, iterations);
    }
    report.branch_count = trace.len();
    report.warnings.extend(note);
    Ok(report)
}

/// Roots of `t^d - s` by one seeded Newton root and rotations.
pub fn solve_pure_power_report(d: usize, s: C, cfg: &NewtonConfig) -> Result<RootReport> {
    let p = MonicPolynomial::pure_power(d, s)?;
    let mut trace = BranchTrace::new();
    let sol = solve_pure_power(d as u32, s, cfg, &mut trace)?;
    let mut report = RootReport::new(Method::PurePower, d, cfg.threshold_r);
    for r in sol.roots {
        report.push_root(&p, r, sol.iterations);
    }
    report.branch_count = trace.len();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRequest {
    /// `a_0 .. a_{d-1}`.
    pub coefficients: Vec<C>,
    pub method: Method,
    pub epsilon: f64,
    pub max_iters: u32,
}

impl SolveRequest {
    pub fn validate(&self) -> Result<MonicPolynomial> {
        let p = MonicPolynomial::new(self.coefficients.clone())?;
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        match self.method {
            Method::ClosedForm if !(2..=4).contains(&p.degree()) => Err(Error::InvalidArgument(format!(
                "closed-form needs degree 2, 3 or 4, got {}",
                p.degree()
            ))),
            Method::PurePower if p.degree() < 2 => Err(Error::InvalidArgument("pure-power needs degree >= 2".into())),
            Method::PurePower if p.coeffs()[1..].iter().any(|a| a.norm() != 0.0) => Err(Error::InvalidArgument(
                "pure-power needs every coefficient except a0 to be zero".into(),
            )),
            _ => Ok(p),
        }
    }

    fn newton_config(&self) -> NewtonConfig {
        NewtonConfig { threshold_r: self.epsilon, max_iters: self.max_iters, ..NewtonConfig::default() }
    }
}

/// Validate and dispatch. A Newton radical that fails to converge yields an
/// incomplete report rather than an error; malformed requests are errors.
pub fn solve(req: &SolveRequest) -> Result<RootReport> {
    let p = req.validate()?;
    let cfg = req.newton_config();
    let result = match req.method {
        Method::ClosedForm => solve_closed_form(&p, &cfg),
        Method::PurePower => solve_pure_power_report(p.degree(), -p.coeffs()[0], &cfg),
        Method::PowerIteration => solve_by_power_iteration(&p, req.max_iters, req.epsilon),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(Error::NoConvergence(out)) => {
            let mut r = RootReport::new(req.method, p.degree(), req.epsilon);
            r.fail(format!(
                "newton radical did not converge ({:?} after {} iterations)",
                out.stop, out.iterations
            ));
            r
        }
        Err(e) => return Err(e),
    };
    report.flag_repeated_roots();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn req(coeffs: &[f64], method: Method) -> SolveRequest {
        SolveRequest {
            coefficients: coeffs.iter().map(|&x| c(x, 0.0)).collect(),
            method,
            epsilon: 1e-8,
            max_iters: 1000,
        }
    }

    #[test]
    fn closed_form_quadratic_report() {
        let r = solve(&req(&[-1.0, 0.0], Method::ClosedForm)).unwrap();
        assert_eq!(r.branch_count, 1);
        assert!(r.complete);
        assert!((r.roots[0] - c(1.0, 0.0)).norm() < 1e-9);
        assert!((r.roots[1] - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn pure_power_report() {
        let r = solve(&req(&[-8.0, 0.0, 0.0], Method::PurePower)).unwrap();
        assert!(r.branch_count <= 3);
        assert!((r.roots[0] - c(2.0, 0.0)).norm() < 1e-9);
        assert!(r.max_residual() < 1e-6);
    }

    #[test]
    fn method_mismatch_rejected() {
        assert!(matches!(solve(&req(&[1.0], Method::ClosedForm)), Err(Error::InvalidArgument(_))));
        assert!(matches!(solve(&req(&[1.0, 1.0, 0.0, 0.0, 0.0], Method::ClosedForm)), Err(Error::InvalidArgument(_))));
        assert!(matches!(solve(&req(&[1.0, 1.0], Method::PurePower)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn repeated_roots_warn() {
        let r = solve(&req(&[0.0, 0.0, 0.0], Method::PurePower)).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("repeated")));
        let r = solve(&req(&[-1.0, 0.0], Method::ClosedForm)).unwrap();
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn json_schema_fields() {
        let r = solve(&req(&[2.0, -3.0], Method::PowerIteration)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["method"], "power-iteration");
        assert_eq!(v["branch_count"], 0);
        assert_eq!(v["roots"].as_array().unwrap().len(), 2);
        let back: RootReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
