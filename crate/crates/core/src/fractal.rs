//! Escape-time diagrams over the `S`-plane: for each cell centre `S`, how many
//! Newton steps from a fixed seed it takes to come within `r` of a true
//! `d`-th root of `S`.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::{newton_escape, sector_of, sector_seed, NewtonConfig};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { re_min: -2.0, re_max: 2.0, im_min: -2.0, im_max: 2.0 }
    }
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if !all_finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidArgument(format!("degenerate window {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub iterations: u32,
    pub converged: bool,
}

/// Row-major cells, row 0 at `im_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalGrid {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub d: u32,
    pub seed: C,
    pub threshold_r: f64,
    pub max_iters: u32,
    pub cells: Vec<Cell>,
}

impl FractalGrid {
    pub fn cell(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn center(&self, col: usize, row: usize) -> C {
        cell_center(&self.window, self.width, self.height, col, row)
    }
}

fn cell_center(w: &Window, width: usize, height: usize, col: usize, row: usize) -> C {
    let dx = (w.re_max - w.re_min) / width as f64;
    let dy = (w.im_max - w.im_min) / height as f64;
    C::new(w.re_min + (col as f64 + 0.5) * dx, w.im_max - (row as f64 + 0.5) * dy)
}

/// Run `f` on every cell centre in parallel with `workers` threads (0 means
/// the rayon default). Output does not depend on the worker count.
fn sample<F>(width: usize, height: usize, window: &Window, workers: usize, f: F) -> Result<Vec<Cell>>
where
    F: Fn(C) -> Cell + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..width * height)
            .into_par_iter()
            .map(|i| f(cell_center(window, width, height, i % width, i / width)))
            .collect()
    }))
}

fn check_inputs(d: u32, cfg: &NewtonConfig, window: &Window, (width, height): (usize, usize)) -> Result<()> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d as usize));
    }
    if width < 1 || height < 1 {
        return Err(Error::InvalidArgument(format!("resolution {width}x{height} is empty")));
    }
    cfg.validate()?;
    window.validate()
}

fn escape_cell(d: u32, s: C, seed: C, cfg: &NewtonConfig) -> Cell {
    let out = newton_escape(d, s, seed, cfg);
    Cell { iterations: out.iterations, converged: out.converged }
}

/// Escape-time grid for `x^d - S` from `seed`.
pub fn render(
    d: u32,
    seed: C,
    cfg: &NewtonConfig,
    window: &Window,
    resolution: (usize, usize),
    workers: usize,
) -> Result<FractalGrid> {
    check_inputs(d, cfg, window, resolution)?;
    if seed == C::new(0.0, 0.0) {
        return Err(Error::ZeroSeed);
    }
    let cells = sample(resolution.0, resolution.1, window, workers, |s| escape_cell(d, s, seed, cfg))?;
    Ok(FractalGrid {
        width: resolution.0,
        height: resolution.1,
        window: *window,
        d,
        seed,
        threshold_r: cfg.threshold_r,
        max_iters: cfg.max_iters,
        cells,
    })
}

/// The sector-`k` diagram computed in the rotated frame: each `S` is first
/// rotated by `e^{-2 pi i k/d}` in polar form, then iterated from seed 1.
/// Equal to [`render`] with seed `e^{2 pi i k/d^2}` in exact arithmetic.
pub fn render_sector_frame(
    d: u32,
    k: usize,
    cfg: &NewtonConfig,
    window: &Window,
    resolution: (usize, usize),
    workers: usize,
) -> Result<FractalGrid> {
    check_inputs(d, cfg, window, resolution)?;
    let turn = 2.0 * PI * k as f64 / d as f64;
    let one = C::new(1.0, 0.0);
    let cells = sample(resolution.0, resolution.1, window, workers, |s| {
        escape_cell(d, rotate_polar(s, -turn), one, cfg)
    })?;
    Ok(FractalGrid {
        width: resolution.0,
        height: resolution.1,
        window: *window,
        d,
        seed: sector_seed(d, k),
        threshold_r: cfg.threshold_r,
        max_iters: cfg.max_iters,
        cells,
    })
}

/// `s e^{i angle}` through the polar form; zero stays zero.
pub fn rotate_polar(s: C, angle: f64) -> C {
    let (rho, theta) = s.to_polar();
    C::from_polar(rho, theta + angle)
}

// Plasma-like anchors, dark purple to yellow, with increasing luminance.
const RAMP_ANCHORS: [[f64; 3]; 5] = [
    [13.0, 8.0, 135.0],
    [126.0, 8.0, 168.0],
    [204.0, 71.0, 120.0],
    [248.0, 149.0, 64.0],
    [240.0, 249.0, 33.0],
];

pub const DIVERGENCE_RGB: [u8; 3] = [173, 216, 230];

/// Entry `i` of the 256-colour ramp, linear between anchors.
pub fn ramp(i: u8) -> [u8; 3] {
    let t = i as f64 / 255.0 * (RAMP_ANCHORS.len() - 1) as f64;
    let seg = (t.floor() as usize).min(RAMP_ANCHORS.len() - 2);
    let f = t - seg as f64;
    let (a, b) = (RAMP_ANCHORS[seg], RAMP_ANCHORS[seg + 1]);
    [0, 1, 2].map(|c| (a[c] + (b[c] - a[c]) * f).round() as u8)
}

/// Colour of a cell: the ramp at `iterations / max_iters`, or light blue.
pub fn cell_color(cell: Cell, max_iters: u32) -> [u8; 3] {
    if !cell.converged {
        return DIVERGENCE_RGB;
    }
    let idx = (255.0 * cell.iterations as f64 / max_iters.max(1) as f64).round().min(255.0);
    ramp(idx as u8)
}

/// Binary PPM bytes: `P6\n{w} {h}\n255\n` followed by RGB triples.
pub fn ppm_bytes(grid: &FractalGrid) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.reserve(grid.cells.len() * 3);
    for &cell in &grid.cells {
        out.extend_from_slice(&cell_color(cell, grid.max_iters));
    }
    out
}

/// Plain PGM of raw iteration counts; non-converged cells read `max_iters`.
pub fn pgm_bytes(grid: &FractalGrid) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n{}\n", grid.width, grid.height, grid.max_iters);
    for row in grid.cells.chunks(grid.width) {
        let line: Vec<String> = row
            .iter()
            .map(|c| if c.converged { c.iterations } else { grid.max_iters }.to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

fn write_bytes(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()
}

pub fn write_ppm(grid: &FractalGrid, path: impl AsRef<Path>) -> io::Result<()> {
    write_bytes(path.as_ref(), &ppm_bytes(grid))
}

pub fn write_pgm(grid: &FractalGrid, path: impl AsRef<Path>) -> io::Result<()> {
    write_bytes(path.as_ref(), &pgm_bytes(grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorStats {
    pub sector: usize,
    pub cells: usize,
    pub converged_fraction: f64,
    /// Mean iterations over converged cells.
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub d: u32,
    pub seed: C,
    /// Sector whose seed is the grid's seed, if any.
    pub home_sector: Option<usize>,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub sectors: Vec<SectorStats>,
}

/// Per-sector convergence over cells with `|S| >= 0.1`.
pub fn sector_statistics(grid: &FractalGrid) -> SectorSummary {
    sector_statistics_in_annulus(grid, 0.1, f64::INFINITY)
}

/// Per-sector convergence over cells with `min_modulus <= |S| <= max_modulus`.
pub fn sector_statistics_in_annulus(grid: &FractalGrid, min_modulus: f64, max_modulus: f64) -> SectorSummary {
    let d = grid.d as usize;
    let mut count = vec![0usize; d];
    let mut conv = vec![0usize; d];
    let mut iters = vec![0u64; d];
    for row in 0..grid.height {
        for col in 0..grid.width {
            let s = grid.center(col, row);
            let m = s.norm();
            if m < min_modulus || m > max_modulus {
                continue;
            }
            let k = sector_of(grid.d, s);
            let cell = grid.cell(col, row);
            count[k] += 1;
            if cell.converged {
                conv[k] += 1;
                iters[k] += cell.iterations as u64;
            }
        }
    }
    let home_sector = (0..d).find(|&k| (sector_seed(grid.d, k) - grid.seed).norm() < 1e-9);
    let sectors = (0..d)
        .map(|k| SectorStats {
            sector: k,
            cells: count[k],
            converged_fraction: if count[k] == 0 { 0.0 } else { conv[k] as f64 / count[k] as f64 },
            mean_iterations: if conv[k] == 0 { 0.0 } else { iters[k] as f64 / conv[k] as f64 },
        })
        .collect();
    SectorSummary { d: grid.d, seed: grid.seed, home_sector, min_modulus, max_modulus, sectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn luminance(rgb: [u8; 3]) -> f64 {
        0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64
    }

    fn synthetic(width: usize, height: usize, cell: Cell) -> FractalGrid {
        FractalGrid {
            width,
            height,
            window: Window::default(),
            d: 2,
            seed: c(1.0, 0.0),
            threshold_r: 0.1,
            max_iters: 100,
            cells: vec![cell; width * height],
        }
    }

    #[test]
    fn ramp_is_monotone_in_luminance() {
        for i in 0..255u8 {
            assert!(luminance(ramp(i)) <= luminance(ramp(i + 1)), "entry {i}");
        }
        assert_eq!(ramp(0), [13, 8, 135]);
        assert_eq!(ramp(255), [240, 249, 33]);
    }

    #[test]
    fn ppm_of_constant_grids() {
        let g = synthetic(2, 2, Cell { iterations: 0, converged: true });
        let bytes = ppm_bytes(&g);
        assert_eq!(&bytes[..11], b"P6\n2 2\n255\n");
        assert_eq!(bytes.len(), 11 + 12);
        assert!(bytes[11..].chunks(3).all(|px| px == [13, 8, 135]));

        let g = synthetic(1, 1, Cell { iterations: 100, converged: false });
        let bytes = ppm_bytes(&g);
        assert_eq!(&bytes[bytes.len() - 3..], &[173, 216, 230]);
    }

    #[test]
    fn pgm_layout() {
        let mut g = synthetic(2, 1, Cell { iterations: 3, converged: true });
        g.cells[1].converged = false;
        assert_eq!(String::from_utf8(pgm_bytes(&g)).unwrap(), "P2\n2 1\n100\n3 100\n");
    }

    #[test]
    fn centres_and_orientation() {
        let g = synthetic(4, 4, Cell { iterations: 0, converged: true });
        assert_eq!(g.center(0, 0), c(-1.5, 1.5));
        assert_eq!(g.center(3, 3), c(1.5, -1.5));
    }

    #[test]
    fn figure_one_cells() {
        let w = Window::default();
        let g = render(2, c(1.0, 0.0), &NewtonConfig::default(), &w, (5, 5), 2).unwrap();
        // the middle-right cell sits at S = 1.6; the centre is S = 0
        assert_eq!(g.center(2, 2), c(0.0, 0.0));
        assert_eq!(g.cell(2, 2), Cell { iterations: 0, converged: true });
        let right = g.cell(4, 2);
        assert!(right.converged && right.iterations <= 5);
        let left = g.cell(0, 2);
        assert!(!left.converged || left.iterations > right.iterations);
    }

    #[test]
    fn degenerate_window_rejected() {
        let w = Window { re_min: 1.0, re_max: 1.0, ..Window::default() };
        assert!(render(2, c(1.0, 0.0), &NewtonConfig::default(), &w, (4, 4), 1).is_err());
    }

    #[test]
    fn render_independent_of_workers() {
        let w = Window::default();
        let cfg = NewtonConfig::default();
        let a = render(3, c(1.0, 0.0), &cfg, &w, (33, 17), 1).unwrap();
        let b = render(3, c(1.0, 0.0), &cfg, &w, (33, 17), 4).unwrap();
        assert_eq!(ppm_bytes(&a), ppm_bytes(&b));
    }

    #[test]
    fn uniform_grid_statistics() {
        let g = synthetic(8, 8, Cell { iterations: 2, converged: true });
        let s = sector_statistics(&g);
        assert_eq!(s.home_sector, Some(0));
        assert!(s.sectors.iter().all(|x| x.converged_fraction == 1.0 && x.mean_iterations == 2.0));
    }
}
