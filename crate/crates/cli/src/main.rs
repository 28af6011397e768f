use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polybranch::complexity::max_cup_length;
use polybranch::fractal::{sector_statistics, sector_statistics_in_annulus, write_pgm, write_ppm};
use polybranch::report::{solve, Method, SolveRequest};
use polybranch::verify::{closed_form_suite, run_all, VerifyOptions};
use polybranch::{make_report, render, smale_bound, Complex64, NewtonConfig, Window};
use serde_json::json;

#[derive(Parser)]
#[command(name = "polybranch", version, about = "Branch-accounted polynomial root finding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one monic polynomial and print a JSON root report.
    Solve(SolveArgs),
    /// Render a Newton escape-time diagram for x^d - S.
    Fractal(FractalArgs),
    /// Tabulate the lower bound, cup length and measured branch counts.
    Bound(BoundArgs),
    /// Run the built-in self-checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Coefficients a0..a_{d-1}: "re,im;re,im;..." or a comma list of reals.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    #[arg(long, default_value = "closed-form")]
    method: String,
    /// Solve t^d - S; needs --d and --S.
    #[arg(long)]
    pure_power: bool,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "S", allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// Defaults to 100 for Newton-based methods and 10000 for power iteration.
    #[arg(long)]
    max_iters: Option<u32>,
    /// Alias for --epsilon on the Newton-based methods.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct FractalArgs {
    #[arg(long)]
    d: u32,
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    seed: String,
    #[arg(long)]
    out: PathBuf,
    /// "re_min,re_max,im_min,im_max"
    #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    window: String,
    /// "WxH"
    #[arg(long, default_value = "512x512")]
    resolution: String,
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: u32,
    /// Also write raw iteration counts as plain PGM.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Comma-separated degrees.
    #[arg(long, default_value = "2,3,4")]
    degrees: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0x5eed)]
    rng_seed: u64,
    /// Random polynomials per degree for the measured branch counts.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0x5eed)]
    rng_seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    json: bool,
}

type CliResult<T> = Result<T, String>;

fn parse_complex(s: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad number {x:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

fn parse_coeffs(s: &str) -> CliResult<Vec<Complex64>> {
    if s.contains(';') {
        s.split(';').filter(|p| !p.trim().is_empty()).map(parse_complex).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map(|v| Complex64::new(v, 0.0)).map_err(|e| format!("bad number {x:?}: {e}")))
            .collect()
    }
}

fn parse_window(s: &str) -> CliResult<Window> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad window value {x:?}: {e}")))
        .collect::<CliResult<_>>()?;
    let [re_min, re_max, im_min, im_max] = v[..] else {
        return Err(format!("window needs four values, got {s:?}"));
    };
    Ok(Window { re_min, re_max, im_min, im_max })
}

fn parse_resolution(s: &str) -> CliResult<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("resolution must be WxH, got {s:?}"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad resolution {x:?}: {e}"));
    Ok((n(w)?, n(h)?))
}

/// Render workers from `POLYBRANCH_THREADS`; 0 lets rayon decide.
fn workers() -> CliResult<usize> {
    match std::env::var("POLYBRANCH_THREADS") {
        Ok(v) => v.trim().parse().map_err(|e| format!("POLYBRANCH_THREADS={v:?}: {e}")),
        Err(_) => Ok(0),
    }
}

fn print_json(v: &impl serde::Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(v).map_err(|e| e.to_string())?);
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CliResult<ExitCode> {
    let (coefficients, method) = if args.pure_power {
        let d = args.d.ok_or("--pure-power needs --d")?;
        let s = parse_complex(args.s.as_deref().ok_or("--pure-power needs --S")?)?;
        if d < 2 {
            return Err("--d must be at least 2".into());
        }
        let mut c = vec![Complex64::new(0.0, 0.0); d];
        c[0] = -s;
        (c, Method::PurePower)
    } else {
        let coeffs = parse_coeffs(args.coeffs.as_deref().ok_or("--coeffs is required")?)?;
        (coeffs, args.method.parse::<Method>().map_err(|e| e.to_string())?)
    };
    let epsilon = args.threshold.unwrap_or(args.epsilon);
    let max_iters = args.max_iters.unwrap_or(if method == Method::PowerIteration { 10_000 } else { 100 });
    let report = solve(&SolveRequest { coefficients, method, epsilon, max_iters }).map_err(|e| e.to_string())?;
    print_json(&report)?;
    Ok(if report.complete && report.warnings.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_fractal(args: FractalArgs) -> CliResult<ExitCode> {
    let seed = parse_complex(&args.seed)?;
    let window = parse_window(&args.window)?;
    let resolution = parse_resolution(&args.resolution)?;
    let cfg = NewtonConfig { threshold_r: args.threshold, max_iters: args.max_iters, ..NewtonConfig::default() };
    let grid = render(args.d, seed, &cfg, &window, resolution, workers()?).map_err(|e| e.to_string())?;
    write_ppm(&grid, &args.out).map_err(|e| format!("writing {}: {e}", args.out.display()))?;
    if let Some(pgm) = &args.pgm {
        write_pgm(&grid, pgm).map_err(|e| format!("writing {}: {e}", pgm.display()))?;
    }
    print_json(&json!({
        "schema": 1,
        "sectors": sector_statistics(&grid),
        "annulus": sector_statistics_in_annulus(&grid, 0.5, 2.0),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bound(args: BoundArgs) -> CliResult<ExitCode> {
    let degrees: Vec<u64> = args
        .degrees
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("bad degree {x:?}: {e}")))
        .collect::<CliResult<_>>()?;
    let mut rows = Vec::new();
    for d in degrees {
        let bound = smale_bound(d).map_err(|e| e.to_string())?;
        let cert = max_cup_length(d).map_err(|e| e.to_string())?;
        let measured = (2..=4).contains(&d).then(|| {
            closed_form_suite(d as usize, args.samples, args.rng_seed, |_, _| true)
                .iter()
                .filter_map(|r| r.as_ref().ok())
                .map(|c| c.branches as u64)
                .max()
                .unwrap_or(0)
        });
        let report = measured.map(|m| make_report(d, m)).transpose().map_err(|e| e.to_string())?;
        rows.push(json!({
            "degree": d,
            "smale_lower_bound": bound,
            "measured_branches": measured,
            "bound_satisfied": report.as_ref().map(|r| r.bound_satisfied),
            "cup_length": cert,
        }));
    }
    if args.json {
        print_json(&json!({ "schema": 1, "rng_seed": args.rng_seed, "samples": args.samples, "rows": rows }))?;
    } else {
        println!("{:>8} {:>14} {:>9} {:>10} {:>8}", "degree", "smale_bound", "measured", "satisfied", "cup_len");
        for r in &rows {
            let opt = |v: &serde_json::Value| if v.is_null() { "-".to_string() } else { v.to_string() };
            println!(
                "{:>8} {:>14.6} {:>9} {:>10} {:>8}",
                r["degree"].to_string(),
                r["smale_lower_bound"].as_f64().unwrap_or(f64::NAN),
                opt(&r["measured_branches"]),
                opt(&r["bound_satisfied"]),
                r["cup_length"]["cardinality"].to_string()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> CliResult<ExitCode> {
    let w = workers()?;
    let opts = VerifyOptions { rng_seed: args.rng_seed, samples: args.samples, workers: if w == 0 { 8 } else { w } };
    let results = run_all(&opts);
    if args.json {
        print_json(&results)?;
    } else {
        for r in &results {
            println!("{} [{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.criterion, r.name, r.detail);
        }
    }
    Ok(if results.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Fractal(a) => cmd_fractal(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
