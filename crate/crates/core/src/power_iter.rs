//! Roots as eigenvalues of the companion matrix, found by power iteration
//! from the fixed seed `e_d`, with deflation between roots. The method has no
//! decision nodes; when the two largest eigenvalues share a modulus it does
//! not converge, and that case is detected and reported.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MonicPolynomial;
use crate::report::{Method, RootReport};

type C = Complex64;

/// Companion matrix of a monic polynomial: ones on the subdiagonal and
/// `-a_0 .. -a_{d-1}` down the last column. Stored as the coefficients only.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionMatrix {
    coeffs: Vec<C>,
}

pub fn companion(p: &MonicPolynomial) -> CompanionMatrix {
    CompanionMatrix { coeffs: p.coeffs().to_vec() }
}

impl CompanionMatrix {
    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    /// Entry at zero-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> C {
        let d = self.dimension();
        if col == d - 1 {
            -self.coeffs[row]
        } else if row == col + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<C>> {
        let d = self.dimension();
        (0..d).map(|i| (0..d).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `F b` in O(d): shift down by one, then add the last column times `b_{d-1}`.
    pub fn apply(&self, b: &[C]) -> Vec<C> {
        let d = self.dimension();
        let last = b[d - 1];
        (0..d)
            .map(|i| {
                let shifted = if i == 0 { C::new(0.0, 0.0) } else { b[i - 1] };
                shifted - self.coeffs[i] * last
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let ones = (self.dimension() - 1) as f64;
        (ones + self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = sum conj(a_i) b_i`
fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerIterResult {
    pub eigenvalue: C,
    /// Unit-norm final iterate.
    pub eigenvector: Vec<C>,
    pub iterations: u32,
    pub converged: bool,
    /// Fitted geometric ratio of the residuals, once ten are available.
    pub rate_estimate: Option<f64>,
    /// The dominant eigenvalue is not unique in modulus.
    pub equal_magnitude: bool,
    /// Phase-aligned step lengths `||b_n - e^{i phi} b_{n-1}||`.
    pub residuals: Vec<f64>,
}

/// Power iteration on `f` from `b_0 = e_d`.
///
/// The iterate carries a factor `(lambda_1/|lambda_1|)^n`, so the
/// convergence test compares `b_n` with `b_{n-1}` after rotating out the
/// phase between them. The eigenvalue is the Rayleigh quotient of the final
/// iterate.
pub fn power_iterate(f: &CompanionMatrix, max_iters: u32, tol: f64) -> Result<PowerIterResult> {
    if max_iters == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("power iteration needs max_iters >= 1 and tol > 0".into()));
    }
    let d = f.dimension();
    let mut b = vec![C::new(0.0, 0.0); d];
    b[d - 1] = C::new(1.0, 0.0);
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for n in 1..=max_iters {
        let w = f.apply(&b);
        let nw = norm(&w);
        if nw == 0.0 {
            return Err(Error::ZeroEigenvalue);
        }
        let next: Vec<C> = w.iter().map(|x| x / nw).collect();
        let overlap = inner(&b, &next);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C::new(1.0, 0.0) };
        let step = next.iter().zip(&b).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt();
        residuals.push(step);
        b = next;
        iterations = n;
        if step < tol {
            converged = true;
            break;
        }
    }
    let fb = f.apply(&b);
    let eigenvalue = inner(&b, &fb) / inner(&b, &b);
    let rate_estimate = fit_rate(&residuals);
    let equal_magnitude = !converged && detect_equal_magnitude(&residuals, residuals.len().min(EQUAL_MAGNITUDE_WINDOW));
    Ok(PowerIterResult { eigenvalue, eigenvector: b, iterations, converged, rate_estimate, equal_magnitude, residuals })
}

const EQUAL_MAGNITUDE_WINDOW: usize = 64;

/// Least-squares slope of `ln r_n` over the trailing half of the history,
/// returned as a ratio. Needs at least ten positive residuals.
pub fn fit_rate(residuals: &[f64]) -> Option<f64> {
    if residuals.len() < 10 {
        return None;
    }
    let tail_len = (residuals.len() / 2).max(10);
    let start = residuals.len() - tail_len;
    let pts: Vec<(f64, f64)> = residuals[start..]
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0.0)
        .map(|(i, &r)| (i as f64, r.ln()))
        .collect();
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

/// Per-step decay below which residuals count as decaying.
const STALL_RATIO: f64 = 0.99;
/// Residual envelopes below this are treated as converged, not stalled.
const STALL_FLOOR: f64 = 1e-12;

/// Detects the oscillating, non-decaying residual pattern of two dominant
/// eigenvalues with equal modulus. Compares the residual envelope (running
/// maximum) of the two halves of the trailing `window`; a per-step decay
/// ratio at or above 0.99 while residuals stay above `1e-12` is flagged.
pub fn detect_equal_magnitude(residuals: &[f64], window: usize) -> bool {
    if window < 4 || residuals.len() < window {
        return false;
    }
    let tail = &residuals[residuals.len() - window..];
    let half = window / 2;
    let first = tail[..half].iter().cloned().fold(0.0, f64::max);
    let second = tail[window - half..].iter().cloned().fold(0.0, f64::max);
    if second < STALL_FLOOR || first <= 0.0 {
        return false;
    }
    let per_step = (second / first).powf(1.0 / (window - half) as f64);
    per_step >= STALL_RATIO
}

/// Fixed number of full-polynomial Newton steps applied to each extracted
/// eigenvalue before deflating.
const POLISH_STEPS: usize = 3;

fn polish(p: &MonicPolynomial, mut z: C) -> C {
    for _ in 0..POLISH_STEPS {
        let (v, dv) = p.evaluate_with_derivative(z);
        let next = z - v / dv;
        if next.is_finite() {
            z = next;
        }
    }
    z
}

/// All roots by repeated power iteration and deflation. No decision nodes are
/// recorded: the seed is always `e_d` and the step counts are fixed. If a
/// stage fails (equal-magnitude dominant pair, or a nilpotent remainder) the
/// report is partial and says which stage failed.
pub fn solve_by_power_iteration(p: &MonicPolynomial, max_iters: u32, tol: f64) -> Result<RootReport> {
    let mut report = RootReport::new(Method::PowerIteration, p.degree(), tol);
    let mut current = p.clone();
    let mut stage = 0;
    while current.degree() > 1 {
        stage += 1;
        let f = companion(&current);
        let result = match power_iterate(&f, max_iters, tol) {
            Ok(r) => r,
            Err(Error::ZeroEigenvalue) => {
                report.fail(format!(
                    "stage {stage}: zero eigenvalue present at degree {} (deflate t first)",
                    current.degree()
                ));
                break;
            }
            Err(e) => return Err(e),
        };
        if !result.converged {
            let why = if result.equal_magnitude { "equal-magnitude dominant eigenvalues" } else { "no convergence" };
            report.fail(format!(
                "stage {stage}: {why} at degree {} after {} iterations",
                current.degree(),
                result.iterations
            ));
            break;
        }
        let root = polish(&current, result.eigenvalue);
        report.push_root(p, root, result.iterations);
        current = current.deflate(root)?.0;
    }
    if report.complete {
        report.push_root(p, -current.coeffs()[0], 0);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::roots_to_poly;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> MonicPolynomial {
        MonicPolynomial::from_real(coeffs).unwrap()
    }

    #[test]
    fn companion_examples() {
        let f = companion(&poly(&[2.0, -3.0]));
        assert_eq!(f.to_dense(), vec![vec![c(0.0, 0.0), c(-2.0, 0.0)], vec![c(1.0, 0.0), c(3.0, 0.0)]]);
        let f = companion(&poly(&[0.0, 0.0, 0.0]));
        assert!((0..3).all(|i| f.entry(i, 2) == c(0.0, 0.0)));
        assert_eq!(f.entry(1, 0), c(1.0, 0.0));
        assert_eq!(f.entry(2, 1), c(1.0, 0.0));
        let f = companion(&poly(&[1.0, 0.0]));
        assert_eq!(f.to_dense(), vec![vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
    }

    #[test]
    fn structured_product_matches_dense() {
        let p = MonicPolynomial::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0)]).unwrap();
        let f = companion(&p);
        let b = vec![c(0.3, -0.1), c(1.0, 0.0), c(-2.0, 0.5), c(0.0, 1.0)];
        let dense = f.to_dense();
        let want: Vec<C> = dense.iter().map(|row| row.iter().zip(&b).map(|(a, x)| a * x).sum()).collect();
        assert_eq!(f.apply(&b), want);
    }

    #[test]
    fn seed_reaches_every_basis_direction() {
        // F e_i = e_{i+1}: every basis vector maps into the e_d chain
        let f = companion(&poly(&[5.0, 4.0, 3.0, 2.0]));
        for i in 0..3 {
            let mut e = vec![c(0.0, 0.0); 4];
            e[i] = c(1.0, 0.0);
            let mut want = vec![c(0.0, 0.0); 4];
            want[i + 1] = c(1.0, 0.0);
            assert_eq!(f.apply(&e), want);
        }
    }

    #[test]
    fn dominant_eigenvalue_of_two_and_one() {
        let r = power_iterate(&companion(&poly(&[2.0, -3.0])), 500, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.eigenvalue - c(2.0, 0.0)).norm() < 1e-9);
        let rate = r.rate_estimate.unwrap();
        assert!((rate - 0.5).abs() < 0.05, "rate {rate}");
        assert!((norm(&r.eigenvector) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_eigenvalue_of_cubic() {
        let r = power_iterate(&companion(&poly(&[-6.0, 11.0, -6.0])), 500, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.eigenvalue - c(3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn equal_magnitude_is_flagged() {
        for coeffs in [[-1.0, 0.0], [1.0, 0.0]] {
            let r = power_iterate(&companion(&poly(&coeffs)), 500, 1e-10).unwrap();
            assert!(!r.converged);
            assert!(r.equal_magnitude);
            assert!(detect_equal_magnitude(&r.residuals, 16));
        }
        let r = power_iterate(&companion(&poly(&[2.0, -3.0])), 500, 1e-14).unwrap();
        assert!(!detect_equal_magnitude(&r.residuals, 8));
        let geometric: Vec<f64> = (0..20).map(|i| 0.5f64.powi(i)).collect();
        assert!(!detect_equal_magnitude(&geometric, 8));
        assert!(!detect_equal_magnitude(&geometric, 3));
    }

    #[test]
    fn nilpotent_companion_errors() {
        let r = power_iterate(&companion(&poly(&[0.0, 0.0])), 10, 1e-10);
        assert_eq!(r, Err(Error::ZeroEigenvalue));
    }

    #[test]
    fn solve_two_and_one() {
        let rep = solve_by_power_iteration(&poly(&[2.0, -3.0]), 1000, 1e-12).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.branch_count, 0);
        assert!((rep.roots[0] - c(2.0, 0.0)).norm() < 1e-9);
        assert!((rep.roots[1] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(rep.residuals.iter().all(|&r| r < 1e-9));
    }

    #[test]
    fn solve_flags_equal_magnitude_stage() {
        // t^3 - t: roots 0, 1, -1; |1| = |-1| at the first stage
        let rep = solve_by_power_iteration(&poly(&[0.0, -1.0, 0.0]), 1000, 1e-10).unwrap();
        assert!(!rep.complete);
        assert!(rep.warnings.iter().any(|w| w.contains("equal-magnitude")));
        assert!(rep.roots.len() < 3);
    }

    #[test]
    fn linear_short_circuits() {
        let rep = solve_by_power_iteration(&MonicPolynomial::new(vec![c(1.5, -2.0)]).unwrap(), 10, 1e-10).unwrap();
        assert_eq!(rep.roots, vec![c(-1.5, 2.0)]);
        assert_eq!(rep.per_root_iterations, vec![0]);
    }

    #[test]
    fn round_trip_separated_moduli() {
        let roots = vec![c(4.0, 1.0), c(-2.0, 0.5), c(0.0, -1.0), c(0.3, 0.1)];
        let p = roots_to_poly(&roots).unwrap();
        let rep = solve_by_power_iteration(&p, 2000, 1e-12).unwrap();
        assert!(rep.complete);
        for want in &roots {
            assert!(rep.roots.iter().any(|z| (z - want).norm() < 1e-6));
        }
    }
}
