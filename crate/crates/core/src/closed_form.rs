//! Closed-form solvers for degrees 2, 3 and 4. Every radical goes through
//! [`radical`], so each seed choice is a recorded decision:
//!
//! * quadratic: one square root, exactly one decision;
//! * cubic: a triple-root test, one square root, a sign choice and one cube
//!   root, at most five decisions;
//! * quartic: square root and cube root for `Q`, one degeneracy test, then
//!   three square roots, at most seven decisions on the generic path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::newton::{radical, NewtonConfig};
use crate::trace::BranchTrace;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Primitive cube root of unity `e^{2 pi i / 3}`.
fn omega3() -> C {
    C::from_polar(1.0, 2.0 * PI / 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    pub roots: Vec<C>,
    /// Total Newton iterations spent across all radicals.
    pub newton_iterations: u32,
}

struct Radicals<'a> {
    cfg: &'a NewtonConfig,
    trace: &'a mut BranchTrace,
    iterations: u32,
}

impl Radicals<'_> {
    fn root(&mut self, d: u32, s: C) -> Result<C> {
        let out = radical(d, s, self.cfg, self.trace)?;
        self.iterations += out.iterations;
        Ok(out.value)
    }
}

pub fn solve_quadratic(a1: C, a0: C, cfg: &NewtonConfig, trace: &mut BranchTrace) -> Result<ClosedFormSolution> {
    cfg.validate()?;
    let mut rad = Radicals { cfg, trace, iterations: 0 };
    let omega = a1 * a1 - 4.0 * a0;
    let w = rad.root(2, omega)?;
    Ok(ClosedFormSolution { roots: vec![(-a1 + w) * 0.5, (-a1 - w) * 0.5], newton_iterations: rad.iterations })
}

/// Cardano on the depressed cubic `y^3 + p y + q` with `t = y - a2/3`.
pub fn solve_cubic(a2: C, a1: C, a0: C, cfg: &NewtonConfig, trace: &mut BranchTrace) -> Result<ClosedFormSolution> {
    cfg.validate()?;
    let mut rad = Radicals { cfg, trace, iterations: 0 };
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = a2 * a2 * a2 * (2.0 / 27.0) - a2 * a1 / 3.0 + a0;
    let half_q = -q * 0.5;

    // p = q = 0 is the triple root; otherwise -q/2 + s below cannot vanish
    let scale = a2.norm().max(a1.norm()).max(a0.norm()).max(1.0);
    let triple = p.norm() <= 1e-14 * scale * scale && q.norm() <= 1e-14 * scale * scale * scale;
    let ys = if rad.trace.record_decision("cardano_triple_root", triple) {
        [ZERO; 3]
    } else {
        let mut s = rad.root(2, q * q * 0.25 + p * p * p / 27.0)?;
        // take the sign that avoids cancellation in -q/2 + s
        if rad.trace.record_decision("flip_sqrt_sign", (half_q - s).norm() > (half_q + s).norm()) {
            s = -s;
        }
        let u = rad.root(3, half_q + s)?;
        let v = -p / (u * 3.0);
        let w = omega3();
        let w2 = w.conj();
        [u + v, u * w + v * w2, u * w2 + v * w]
    };
    Ok(ClosedFormSolution { roots: ys.iter().map(|y| y - shift).collect(), newton_iterations: rad.iterations })
}

/// Intermediate quantities of the quartic formula for
/// `t^4 + a3 t^3 + a2 t^2 + a1 t + a0`. The polynomial part needs no
/// decisions; `q_root` and `s_res` are filled once the radicals are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticResolvent {
    pub p: C,
    pub q: C,
    pub omega0: C,
    pub omega1: C,
    /// `Q`, the cube root of `(omega1 + sqrt(omega1^2 - 4 omega0^3)) / 2`.
    pub q_root: Option<C>,
    /// `S = sqrt(-2p/3 + (Q + omega0/Q)/3) / 2`.
    pub s_res: Option<C>,
}

/// `p`, `q`, `omega0`, `omega1` of the quartic formula. `omega0` uses the
/// squared `a2` term; the cubed variant does not reproduce the roots.
pub fn quartic_resolvent(a3: C, a2: C, a1: C, a0: C) -> QuarticResolvent {
    let a3_2 = a3 * a3;
    QuarticResolvent {
        p: (a2 * 8.0 - a3_2 * 3.0) / 8.0,
        q: (a3_2 * a3 - a3 * a2 * 4.0 + a1 * 8.0) / 8.0,
        omega0: a2 * a2 - a3 * a1 * 3.0 + a0 * 12.0,
        omega1: a2 * a2 * a2 * 2.0 - a3 * a2 * a1 * 9.0 + a3_2 * a0 * 27.0 + a1 * a1 * 27.0
            - a2 * a0 * 72.0,
        q_root: None,
        s_res: None,
    }
}

/// Which branch of the quartic algorithm produced the roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuarticPath {
    /// `Q != 0` and `S != 0`: the two-pair formula.
    Generic,
    /// `S = 0` with `Q != 0`, which forces `q = 0`: solved as a quadratic in `y^2`.
    Biquadratic,
    /// `omega0 = omega1 = 0`: a root of multiplicity at least three.
    TripleRoot,
    /// `omega0 = 0` but `omega1 != 0`: `Q` taken as the cube root of `omega1`.
    AlternateSign,
}

impl QuarticPath {
    pub fn is_degenerate(self) -> bool {
        self != QuarticPath::Generic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuarticSolution {
    pub roots: Vec<C>,
    pub newton_iterations: u32,
    pub resolvent: QuarticResolvent,
    pub path: QuarticPath,
}

fn tiny(x: C, scale: f64) -> bool {
    x.norm() < 1e-10 * scale
}

/// `12 Q S^2`: the `S` radicand times `3Q`.
fn s_numerator(q_root: C, res: &QuarticResolvent) -> C {
    q_root * q_root - res.p * q_root * 2.0 + res.omega0
}

pub fn solve_quartic(a3: C, a2: C, a1: C, a0: C, cfg: &NewtonConfig, trace: &mut BranchTrace) -> Result<QuarticSolution> {
    cfg.validate()?;
    let mut res = quartic_resolvent(a3, a2, a1, a0);
    let mut rad = Radicals { cfg, trace, iterations: 0 };
    let shift = -a3 / 4.0;

    let disc_root = rad.root(2, res.omega1 * res.omega1 - res.omega0 * res.omega0 * res.omega0 * 4.0)?;
    let mut q_root = rad.root(3, (res.omega1 + disc_root) * 0.5)?;
    let scale = a3.norm().max(a2.norm()).max(a1.norm()).max(a0.norm()).max(1.0);
    let omega0_zero = tiny(res.omega0, scale * scale);
    let n_scale = |q_root: C| q_root.norm_sqr().max(res.omega0.norm()).max((res.p * q_root).norm() * 2.0).max(1.0);
    let s_zero = |q_root: C| tiny(s_numerator(q_root, &res), n_scale(q_root));

    // Q = 0 forces omega0 = 0, and S = 0 is Q^2 - 2pQ + omega0 = 0: one test
    let degenerate = rad.trace.record_decision("quartic_degenerate", omega0_zero || s_zero(q_root));
    let path = if !degenerate {
        QuarticPath::Generic
    } else if rad.trace.record_decision("omega0_is_zero", omega0_zero) {
        if rad.trace.record_decision("omega1_is_zero", tiny(res.omega1, scale.powi(3))) {
            QuarticPath::TripleRoot
        } else {
            // with omega0 = 0 the nonzero choice for Q^3 is omega1 itself
            q_root = rad.root(3, res.omega1)?;
            if rad.trace.record_decision("s_is_zero", s_zero(q_root)) {
                QuarticPath::Biquadratic
            } else {
                QuarticPath::AlternateSign
            }
        }
    } else {
        QuarticPath::Biquadratic
    };
    res.q_root = Some(q_root);

    let roots = match path {
        QuarticPath::Generic | QuarticPath::AlternateSign => {
            let radicand = (q_root * q_root - res.p * q_root * 2.0 + res.omega0) / (q_root * 3.0);
            let s = rad.root(2, radicand)? * 0.5;
            res.s_res = Some(s);
            let base = -s * s * 4.0 - res.p * 2.0;
            let qs = res.q / s;
            let w12 = rad.root(2, base + qs)? * 0.5;
            let w34 = rad.root(2, base - qs)? * 0.5;
            vec![shift - s + w12, shift - s - w12, shift + s + w34, shift + s - w34]
        }
        QuarticPath::Biquadratic => {
            // y^4 + p y^2 + r with y = t - shift
            res.s_res = Some(ZERO);
            let r = a0 + shift * (a1 + shift * (a2 + shift * (a3 + shift)));
            let disc = rad.root(2, res.p * res.p - r * 4.0)?;
            let z1 = (-res.p + disc) * 0.5;
            let z2 = (-res.p - disc) * 0.5;
            let y1 = rad.root(2, z1)?;
            let y2 = rad.root(2, z2)?;
            vec![shift + y1, shift - y1, shift + y2, shift - y2]
        }
        QuarticPath::TripleRoot => {
            // depressed roots {alpha, alpha, alpha, -3 alpha}: p = -6 alpha^2, q = 8 alpha^3
            let scale = res.p.norm().max(1.0);
            let alpha = if rad.trace.record_decision("p_is_zero", res.p.norm() < 1e-14 * scale) {
                ZERO
            } else {
                -res.q * 3.0 / (res.p * 4.0)
            };
            vec![shift + alpha, shift + alpha, shift + alpha, shift - alpha * 3.0]
        }
    };
    Ok(QuarticSolution { roots, newton_iterations: rad.iterations, resolvent: res, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonicPolynomial;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn r(x: f64) -> C {
        c(x, 0.0)
    }

    fn tight() -> NewtonConfig {
        NewtonConfig::with_threshold(1e-10)
    }

    fn assert_root_set(got: &[C], want: &[C], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; want.len()];
        for g in got {
            let j = (0..want.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| (want[a] - g).norm().total_cmp(&(want[b] - g).norm()))
                .unwrap();
            assert!((want[j] - g).norm() < tol, "got {got:?}, want {want:?}");
            used[j] = true;
        }
    }

    #[test]
    fn quadratic_examples() {
        let mut t = BranchTrace::new();
        let sol = solve_quadratic(r(0.0), r(-1.0), &tight(), &mut t).unwrap();
        assert_root_set(&sol.roots, &[r(1.0), r(-1.0)], 1e-9);
        assert_eq!(t.len(), 1);

        let mut t = BranchTrace::new();
        let sol = solve_quadratic(r(0.0), r(1.0), &tight(), &mut t).unwrap();
        assert_root_set(&sol.roots, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-9);
        assert_eq!(t.decisions()[0].label, "re_s_neg");
        assert!(t.decisions()[0].predicate_value);
        assert_eq!(t.len(), 1);

        let mut t = BranchTrace::new();
        let sol = solve_quadratic(r(-5.0), r(6.0), &tight(), &mut t).unwrap();
        assert_root_set(&sol.roots, &[r(3.0), r(2.0)], 1e-9);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn cubic_examples() {
        let w = omega3();
        let cases: [([C; 3], Vec<C>); 3] = [
            ([r(0.0), r(0.0), r(-1.0)], vec![r(1.0), w, w.conj()]),
            ([r(-6.0), r(11.0), r(-6.0)], vec![r(1.0), r(2.0), r(3.0)]),
            ([r(0.0), r(1.0), r(0.0)], vec![r(0.0), c(0.0, 1.0), c(0.0, -1.0)]),
        ];
        for ([a2, a1, a0], want) in cases {
            let mut t = BranchTrace::new();
            let sol = solve_cubic(a2, a1, a0, &tight(), &mut t).unwrap();
            assert_root_set(&sol.roots, &want, 1e-8);
            assert!(t.len() <= 5, "{} decisions", t.len());
        }
    }

    #[test]
    fn cubic_triple_root() {
        let mut t = BranchTrace::new();
        // (t - 2)^3
        let sol = solve_cubic(r(-6.0), r(12.0), r(-8.0), &tight(), &mut t).unwrap();
        let p = MonicPolynomial::from_real(&[-8.0, 12.0, -6.0]).unwrap();
        for z in &sol.roots {
            assert!(p.evaluate(*z).norm() < 1e-8);
        }
        assert!(t.len() <= 5);
    }

    #[test]
    fn resolvent_of_t4() {
        let res = quartic_resolvent(ZERO, ZERO, ZERO, ZERO);
        assert_eq!((res.p, res.q, res.omega0, res.omega1), (ZERO, ZERO, ZERO, ZERO));
        let mut t = BranchTrace::new();
        let sol = solve_quartic(ZERO, ZERO, ZERO, ZERO, &tight(), &mut t).unwrap();
        assert_eq!(sol.path, QuarticPath::TripleRoot);
        assert!(sol.roots.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn resolvent_of_t4_minus_1() {
        // hand evaluation with a3 = a2 = a1 = 0, a0 = -1
        let res = quartic_resolvent(ZERO, ZERO, ZERO, r(-1.0));
        assert_eq!(res.p, ZERO);
        assert_eq!(res.q, ZERO);
        assert_eq!(res.omega0, r(-12.0));
        assert_eq!(res.omega1, ZERO);
        let mut t = BranchTrace::new();
        let sol = solve_quartic(ZERO, ZERO, ZERO, r(-1.0), &tight(), &mut t).unwrap();
        assert_root_set(&sol.roots, &[r(1.0), r(-1.0), c(0.0, 1.0), c(0.0, -1.0)], 1e-8);
        assert!(t.len() <= 7, "{:?}", t.decisions());
    }

    #[test]
    fn resolvent_of_fourth_power() {
        // (t + 1)^4
        let res = quartic_resolvent(r(4.0), r(6.0), r(4.0), r(1.0));
        assert_eq!(res.omega0, ZERO);
        assert_eq!(res.omega1, ZERO);
        assert_eq!(res.omega1 * res.omega1 - res.omega0 * res.omega0 * res.omega0 * 4.0, ZERO);
        let mut t = BranchTrace::new();
        let sol = solve_quartic(r(4.0), r(6.0), r(4.0), r(1.0), &tight(), &mut t).unwrap();
        assert_eq!(sol.path, QuarticPath::TripleRoot);
        assert!(crate::poly::has_repeated_roots(&sol.roots, 1e-12));
        assert_root_set(&sol.roots, &[r(-1.0); 4], 1e-12);
    }

    #[test]
    fn quartic_examples() {
        let mut t = BranchTrace::new();
        let sol = solve_quartic(r(0.0), r(-10.0), r(0.0), r(9.0), &tight(), &mut t).unwrap();
        assert_root_set(&sol.roots, &[r(1.0), r(-1.0), r(3.0), r(-3.0)], 1e-8);
        assert_eq!(sol.path, QuarticPath::Generic);
        assert!(t.len() <= 7);
        assert!(sol.resolvent.q_root.is_some() && sol.resolvent.s_res.is_some());
    }

    #[test]
    fn triple_plus_simple_root() {
        // (t - 1)^3 (t + 2) = t^4 - t^3 - 3t^2 + 5t - 2
        let mut t = BranchTrace::new();
        let sol = solve_quartic(r(-1.0), r(-3.0), r(5.0), r(-2.0), &tight(), &mut t).unwrap();
        assert_eq!(sol.path, QuarticPath::TripleRoot);
        assert_root_set(&sol.roots, &[r(1.0), r(1.0), r(1.0), r(-2.0)], 1e-9);
    }

    #[test]
    fn cubed_omega0_variant_fails_on_fourth_power() {
        // the a2^3 spelling of omega0 gives 180 for (t + 1)^4 instead of 0
        let (a3, a2, a1, a0) = (4.0f64, 6.0f64, 4.0f64, 1.0f64);
        let cubed = a2.powi(3) - 3.0 * a3 * a1 + 12.0 * a0;
        assert_eq!(cubed, 180.0);
        assert_eq!(quartic_resolvent(r(a3), r(a2), r(a1), r(a0)).omega0, ZERO);
    }
}
