use std::f64::consts::PI;

use polybranch::newton::{newton_root, sector_of, sector_seed};
use polybranch::poly::min_separation;
use polybranch::power_iter::solve_by_power_iteration;
use polybranch::verify::{random_in_disk, random_monic, solve_traced};
use polybranch::{roots_to_poly, BranchTrace, Complex64, MonicPolynomial, NewtonConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

/// Greedy nearest matching; returns the worst matched distance.
fn multiset_distance(a: &[C], b: &[C]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn closed_form_matches_power_iteration_oracle() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for degree in 2..=4 {
        let mut compared = 0;
        while compared < 1000 {
            let p = random_monic(&mut rng, degree);
            let oracle = solve_by_power_iteration(&p, 20_000, 1e-13).unwrap();
            if !oracle.complete || min_separation(&oracle.roots) < 0.05 {
                continue;
            }
            let got = solve_traced(&p, &cfg).unwrap();
            let dist = multiset_distance(&got.roots, &oracle.roots);
            assert!(dist < 1e-4, "degree {degree}: {p:?} off by {dist}");
            compared += 1;
        }
    }
}

#[test]
fn residual_bounds_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (r, factor) in [(0.1, 1e-3), (1e-6, 1e-8)] {
        let cfg = NewtonConfig::with_threshold(r);
        for degree in 2..=4 {
            for _ in 0..500 {
                let p = random_monic(&mut rng, degree);
                let bound = factor * p.max_coeff_modulus().max(1.0);
                let case = solve_traced(&p, &cfg).unwrap();
                for z in &case.roots {
                    assert!(p.evaluate(*z).norm() < bound, "{p:?} at r = {r}");
                }
                let back = roots_to_poly(&case.roots).unwrap();
                let coeff_err = back.coeffs().iter().zip(p.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(coeff_err < 1e-3 * p.max_coeff_modulus().max(1.0));
            }
        }
    }
}

#[test]
fn branch_ceilings_on_random_suite() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (degree, ceiling) in [(2, 1), (3, 5), (4, 7)] {
        for _ in 0..1000 {
            let case = solve_traced(&random_monic(&mut rng, degree), &cfg).unwrap();
            if degree == 2 {
                assert_eq!(case.branches, 1);
            } else if !case.degenerate {
                assert!(case.branches <= ceiling);
            }
        }
    }
}

#[test]
fn tracing_is_observation_only() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let p = random_monic(&mut rng, 4);
        let a = p.coeffs();
        let mut on = BranchTrace::new();
        let mut off = BranchTrace::disabled();
        let x = polybranch::solve_quartic(a[3], a[2], a[1], a[0], &cfg, &mut on).unwrap();
        let y = polybranch::solve_quartic(a[3], a[2], a[1], a[0], &cfg, &mut off).unwrap();
        for (u, v) in x.roots.iter().zip(&y.roots) {
            assert_eq!(u.re.to_bits(), v.re.to_bits());
            assert_eq!(u.im.to_bits(), v.im.to_bits());
        }
        assert_eq!(on.len(), off.len());
    }
}

#[test]
fn sector_seeds_cover_their_sectors() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for d in 2..=5u32 {
        for k in 0..d as usize {
            let mut ok = 0;
            let n = 500;
            for _ in 0..n {
                let width = 2.0 * PI / d as f64;
                let theta = 2.0 * PI * k as f64 / d as f64 + rng.gen_range(-width / 2.0..width / 2.0);
                let s = C::from_polar(rng.gen_range(0.5..2.0), theta);
                assert_eq!(sector_of(d, s), k);
                let out = newton_root(d, s, sector_seed(d, k), &cfg).unwrap();
                if out.converged && out.iterations <= cfg.max_iters {
                    ok += 1;
                }
            }
            assert!(ok as f64 >= 0.99 * n as f64, "d = {d}, sector {k}: {ok}/{n}");
        }
    }
}

#[test]
fn converged_radicals_meet_the_residual_invariant() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for d in 2..=8u32 {
        for _ in 0..300 {
            let s = random_in_disk(&mut rng, 10.0);
            let (seed, _) = polybranch::select_seed(d, s).unwrap();
            let out = newton_root(d, s, seed, &cfg).unwrap();
            if out.converged {
                let bound = 10.0 * cfg.threshold_r.powi(d as i32) * d as f64 * s.norm().max(1.0);
                assert!((out.value.powu(d) - s).norm() < bound);
            }
        }
    }
}

#[test]
fn power_iteration_round_trip_and_no_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let degree = rng.gen_range(2..=7);
        // moduli spaced by a factor of at least 1.3
        let roots: Vec<C> = (0..degree)
            .map(|i| C::from_polar(0.4 * 1.3f64.powi(i) * rng.gen_range(1.0..1.05), rng.gen_range(-PI..PI)))
            .collect();
        let p: MonicPolynomial = roots_to_poly(&roots).unwrap();
        let rep = solve_by_power_iteration(&p, 20_000, 1e-12).unwrap();
        assert!(rep.complete, "{:?}", rep.warnings);
        assert_eq!(rep.branch_count, 0);
        assert!(multiset_distance(&rep.roots, &roots) < 1e-6);
    }
}
