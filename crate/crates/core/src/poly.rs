//! Complex monic polynomials stored as `a_0 .. a_{d-1}` with an implicit
//! leading one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tuple of roots; its length is the degree of the polynomial it
/// answers for.
pub type RootTuple = Vec<Complex64>;

/// `t^d + a_{d-1} t^{d-1} + ... + a_1 t + a_0`, coefficients in ascending
/// order of power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicPolynomial {
    coeffs: Vec<Complex64>,
}

impl MonicPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `t^d - s`.
    pub fn pure_power(degree: usize, s: Complex64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::EmptyPolynomial);
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree];
        coeffs[0] = -s;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Non-leading coefficients, `a_0` first.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * t + a)
    }

    /// Value and first derivative in a single Horner pass.
    pub fn evaluate_with_derivative(&self, t: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(1.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            deriv = deriv * t + value;
            value = value * t + a;
        }
        (value, deriv)
    }

    /// Synthetic division by `t - root`. Returns the monic quotient and the
    /// remainder, which equals `self.evaluate(root)`.
    pub fn deflate(&self, root: Complex64) -> Result<(MonicPolynomial, Complex64)> {
        let d = self.degree();
        if d < 2 {
            return Err(Error::DegreeTooSmall(d));
        }
        // quotient b_{d-2} .. b_0 with leading 1: b_{i-1} = a_i + root * b_i
        let mut quotient = vec![Complex64::new(0.0, 0.0); d - 1];
        let mut carry = Complex64::new(1.0, 0.0);
        for i in (1..d).rev() {
            carry = self.coeffs[i] + root * carry;
            quotient[i - 1] = carry;
        }
        let remainder = self.coeffs[0] + root * carry;
        Ok((MonicPolynomial { coeffs: quotient }, remainder))
    }

    /// True iff every `|a_i| <= k`. An infinite `k` is an unbounded box.
    pub fn in_b_k(&self, k: f64) -> bool {
        k.is_infinite() || self.coeffs.iter().all(|c| c.norm() <= k)
    }
}

/// `prod (t - r)` expanded by multiplying the factors in input order.
pub fn roots_to_poly(roots: &[Complex64]) -> Result<MonicPolynomial> {
    if roots.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    // full coefficient vector including the leading term, ascending
    let mut full = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); full.len() + 1];
        for (i, &c) in full.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        full = next;
    }
    full.pop();
    MonicPolynomial::new(full)
}

/// True iff two roots lie within `tol` of each other (absolute distance).
/// `tol = 0` tests exact coincidence.
pub fn has_repeated_roots(roots: &[Complex64], tol: f64) -> bool {
    roots.iter().enumerate().any(|(i, a)| {
        roots[i + 1..].iter().any(|b| (a - b).norm() <= tol)
    })
}

/// Smallest pairwise distance between roots, `inf` for fewer than two.
pub fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Default coefficient box for degree `d`: every polynomial whose roots lie
/// in the closed unit disk has `|a_i| <= C(d, i) < 2^d`.
pub fn default_k(degree: usize) -> f64 {
    2f64.powi(degree as i32)
}
