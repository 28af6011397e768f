use std::f64::consts::PI;

use polybranch::fractal::{ppm_bytes, render_sector_frame, sector_statistics_in_annulus};
use polybranch::newton::{newton_escape, sector_seed};
use polybranch::{render, Complex64, NewtonConfig, Window};

#[test]
fn rotated_frame_matches_pointwise_seed_one() {
    let cfg = NewtonConfig::default();
    let w = Window::default();
    for k in 1..=2usize {
        let g = render_sector_frame(3, k, &cfg, &w, (64, 64), 4).unwrap();
        for row in 0..64 {
            for col in 0..64 {
                let s = g.center(col, row);
                let (rho, theta) = s.to_polar();
                let rotated = Complex64::from_polar(rho, theta - 2.0 * PI * k as f64 / 3.0);
                let want = newton_escape(3, rotated, Complex64::new(1.0, 0.0), &cfg);
                assert_eq!(g.cell(col, row).iterations, want.iterations);
                assert_eq!(g.cell(col, row).converged, want.converged);
            }
        }
    }
}

#[test]
fn seeded_render_tracks_rotated_frame() {
    let cfg = NewtonConfig::default();
    let w = Window::default();
    for k in 1..=2usize {
        let frame = render_sector_frame(3, k, &cfg, &w, (64, 64), 2).unwrap();
        let direct = render(3, sector_seed(3, k), &cfg, &w, (64, 64), 3).unwrap();
        let close = frame
            .cells
            .iter()
            .zip(&direct.cells)
            .filter(|(a, b)| a.converged == b.converged && a.iterations.abs_diff(b.iterations) <= 1)
            .count();
        assert!(close as f64 >= 0.999 * 4096.0, "k = {k}: {close}/4096");
    }
}

#[test]
fn figure_one_home_half_plane_is_fast() {
    let g = render(2, Complex64::new(1.0, 0.0), &NewtonConfig::default(), &Window::default(), (128, 128), 0).unwrap();
    let stats = sector_statistics_in_annulus(&g, 0.5, 2.0);
    assert_eq!(stats.home_sector, Some(0));
    let home = &stats.sectors[0];
    let other = &stats.sectors[1];
    assert!(home.converged_fraction >= 0.99);
    assert!(home.mean_iterations < other.mean_iterations);
}

#[test]
fn renders_are_bit_identical() {
    let cfg = NewtonConfig::default();
    let w = Window { re_min: -1.5, re_max: 2.5, im_min: -1.0, im_max: 1.0 };
    let a = render(5, Complex64::new(1.0, 0.0), &cfg, &w, (70, 40), 1).unwrap();
    let b = render(5, Complex64::new(1.0, 0.0), &cfg, &w, (70, 40), 6).unwrap();
    assert_eq!(ppm_bytes(&a), ppm_bytes(&b));
    assert_eq!(a, b);
}
