//! `maskit` — cusps, pleating rays, the coordinate grid, coordinate
//! conversion and limit sets of the Maskit slice from the command line.
//!
//! Exit codes: 0 on success, 1 when a computation fails (diagnostic JSON on
//! stdout), 2 for unparseable input or invalid preconditions.

mod config;
mod figure;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use maskit::limitset::{self, LimitSetOptions, RenderStyle};
use maskit::numfmt::{full, g9, json_f64};
use maskit::pleatmap::{self, GridOptions};
use maskit::solver::{find_cusp, trace_ray_with};
use maskit::{Complex64, Slope};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "maskit", version, about = "Pleating coordinates for the Maskit slice")]
struct Cli {
    /// Flat key/value config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Newton residual tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Denominator bound for ray enumeration
    #[arg(long, global = true)]
    q_max: Option<i64>,
    /// Output directory for generated files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find the boundary cusp of a rational slope (JSON to stdout)
    Cusp { slope: String },
    /// Trace the pleating ray of a slope down to its cusp (CSV file)
    Ray {
        slope: String,
        /// Trace value at the top of the ray
        #[arg(long)]
        t_max: Option<f64>,
        /// Number of CSV rows including the cusp row
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Generate the coordinate-grid figure (SVG + JSON files)
    Grid {
        /// Comma-separated pleating lengths for the level curves
        #[arg(long)]
        lengths: Option<String>,
        /// Slope strip `lo,hi`
        #[arg(long)]
        strip: Option<String>,
        /// Denominator bound for boundary cusps
        #[arg(long)]
        boundary_depth: Option<i64>,
    },
    /// Convert between pleating coordinates and mu (JSON to stdout)
    Coords {
        /// `to-mu` or `from-mu`
        direction: String,
        /// `to-mu LAMBDA LENGTH` (lambda as `p/q`, an integer, or a decimal)
        /// or `from-mu RE IM`
        values: Vec<String>,
        /// Convergent depth for decimal lambda
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Sample and render the limit set at a parameter mu (CSV + SVG files)
    Limitset {
        /// Complex parameter in the form `a+bi` with no spaces
        mu: String,
        /// DFS depth
        #[arg(long)]
        depth: Option<usize>,
        /// Pruning diameter
        #[arg(long)]
        prune: Option<f64>,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn run(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn fail_from(err: &maskit::Error) -> Failure {
    if err.is_usage() {
        Failure::usage(err.to_string())
    } else {
        Failure::run(err.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(f) => {
            if f.code == 1 {
                // diagnostic JSON on stdout for computation failures
                println!("{}", json!({ "error": f.message }));
            } else {
                eprintln!("maskit: {}", f.message);
            }
            std::process::exit(f.code);
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| Failure::usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
        }
        cfg.root_tol = tol;
    }
    if let Some(q_max) = cli.q_max {
        if q_max < 1 {
            return Err(Failure::usage(format!("--q-max must be >= 1, got {q_max}")));
        }
        cfg.q_max = q_max;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn parse_slope(text: &str) -> Result<Slope, Failure> {
    Slope::from_str(text).map_err(|e| Failure::usage(e.to_string()))
}

/// Parse `a+bi` with no spaces; accepts pure-real (`-3`), pure-imaginary
/// (`4i`, `-i`) and full forms (`1.5-2e-3i`).
fn parse_complex(text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::usage(format!("cannot parse complex number `{text}`: expected a+bi"));
    let t = text.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(bad());
    }
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag_of = |s: &str| -> Result<f64, Failure> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag_of(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, imag_of(body)?)),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::run(format!("creating {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::run(format!("writing {}: {e}", path.display())))
}

fn write_run_config(cfg: &RunConfig) -> Result<(), Failure> {
    write_file(&cfg.out_dir.join("run.config"), &cfg.to_flat())
}

fn slope_tag(s: Slope) -> String {
    format!("{}_{}", s.p(), s.q())
}

fn fnv1a64(data: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in data.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = effective_config(&cli)?;
    match &cli.cmd {
        Cmd::Cusp { slope } => cmd_cusp(&cfg, slope, cli.out.is_some()),
        Cmd::Ray {
            slope,
            t_max,
            samples,
        } => cmd_ray(&cfg, slope, *t_max, *samples),
        Cmd::Grid {
            lengths,
            strip,
            boundary_depth,
        } => cmd_grid(&cfg, lengths.as_deref(), strip.as_deref(), *boundary_depth),
        Cmd::Coords {
            direction,
            values,
            depth,
        } => cmd_coords(&cfg, direction, values, *depth),
        Cmd::Limitset { mu, depth, prune } => cmd_limitset(&cfg, mu, *depth, *prune),
    }
}

fn cmd_cusp(cfg: &RunConfig, slope_text: &str, to_file: bool) -> Result<(), Failure> {
    let slope = parse_slope(slope_text)?;
    if slope.is_infinity() {
        return Err(Failure::usage("slope 1/0 has constant trace 2; no cusp"));
    }
    let cusp = find_cusp(slope, cfg.root_tol).map_err(|e| fail_from(&e))?;
    let out = cusp.to_json();
    println!("{out}");
    if to_file {
        write_file(
            &cfg.out_dir.join(format!("cusp_{}.json", slope_tag(slope))),
            &format!("{out}\n"),
        )?;
        write_run_config(cfg)?;
    }
    Ok(())
}

fn cmd_ray(
    cfg: &RunConfig,
    slope_text: &str,
    t_max: Option<f64>,
    samples: Option<usize>,
) -> Result<(), Failure> {
    let slope = parse_slope(slope_text)?;
    if slope.q() < 1 {
        return Err(Failure::usage(format!(
            "slope {slope} does not index a pleating ray (needs q >= 1)"
        )));
    }
    let mut opts = cfg.ray_options();
    if let Some(t) = t_max {
        opts.t_max = t;
    }
    if let Some(n) = samples {
        opts.samples = n;
    }
    let ray = trace_ray_with(slope, &opts).map_err(|e| fail_from(&e))?;
    let path = cfg.out_dir.join(format!("ray_{}.csv", slope_tag(slope)));
    write_file(&path, &ray.to_csv())?;
    write_run_config(cfg)?;
    println!(
        "{}",
        json!({
            "file": path.display().to_string(),
            "rows": ray.samples.len() + 1,
            "cusp": [json_f64(ray.endpoint.mu.re), json_f64(ray.endpoint.mu.im)],
        })
    );
    Ok(())
}

fn cmd_grid(
    cfg: &RunConfig,
    lengths: Option<&str>,
    strip: Option<&str>,
    boundary_depth: Option<i64>,
) -> Result<(), Failure> {
    let mut cfg = cfg.clone();
    if let Some(ls) = lengths {
        cfg.apply_kv("lengths", ls)
            .map_err(|e| Failure::usage(format!("{e:#}")))?;
    }
    if let Some(st) = strip {
        cfg.apply_kv("strip", st)
            .map_err(|e| Failure::usage(format!("{e:#}")))?;
    }
    if let Some(bd) = boundary_depth {
        cfg.boundary_depth = bd;
    }
    let opts = GridOptions {
        q_max: cfg.q_max,
        lengths: cfg.lengths.clone(),
        strip: cfg.strip,
        boundary_depth: cfg.boundary_depth,
        ray: cfg.ray_options(),
        viewport: cfg.viewport,
    };
    let figure = pleatmap::build_grid(&opts).map_err(|e| fail_from(&e))?;
    let json_path = cfg.out_dir.join("grid.json");
    let svg_path = cfg.out_dir.join("grid.svg");
    write_file(
        &json_path,
        &format!("{}\n", serde_json::to_string_pretty(&figure.to_json()).unwrap()),
    )?;
    write_file(&svg_path, &figure::grid_to_svg(&figure, cfg.svg_width))?;
    write_run_config(&cfg)?;
    let frac = figure.ray_success_fraction();
    println!(
        "{}",
        json!({
            "rays": figure.rays.len(),
            "ray_failures": figure.ray_failures.len(),
            "ray_success_fraction": json_f64(frac),
            "boundary": figure.boundary.len(),
            "boundary_failures": figure.boundary_failures.len(),
            "svg": svg_path.display().to_string(),
            "json": json_path.display().to_string(),
        })
    );
    if frac < 0.9 {
        return Err(Failure::run(format!(
            "only {} of {} rays traced successfully",
            figure.rays.len(),
            figure.rays.len() + figure.ray_failures.len()
        )));
    }
    Ok(())
}

fn cmd_coords(
    cfg: &RunConfig,
    direction: &str,
    values: &[String],
    depth: Option<usize>,
) -> Result<(), Failure> {
    match direction {
        "to-mu" => {
            if values.len() != 2 {
                return Err(Failure::usage("to-mu wants LAMBDA LENGTH"));
            }
            let length: f64 = values[1]
                .parse()
                .map_err(|_| Failure::usage(format!("bad length `{}`", values[1])))?;
            // `p/q` or a bare integer is an exact rational; decimals go
            // through convergents
            if let Ok(slope) = Slope::from_str(&values[0]) {
                let mu = pleatmap::coords_to_mu_rational(slope, length, cfg.root_tol)
                    .map_err(|e| fail_from(&e))?;
                println!(
                    "{}",
                    json!({
                        "lambda": slope.to_string(),
                        "length": json_f64(length),
                        "mu": [json_f64(mu.re), json_f64(mu.im)],
                        "mu_full": [full(mu.re), full(mu.im)],
                    })
                );
                return Ok(());
            }
            let lambda: f64 = values[0]
                .parse()
                .map_err(|_| Failure::usage(format!("bad lambda `{}`", values[0])))?;
            let depth = depth.unwrap_or(cfg.depth);
            let out = pleatmap::coords_to_mu(lambda, length, depth, cfg.root_tol)
                .map_err(|e| fail_from(&e))?;
            println!(
                "{}",
                json!({
                    "lambda": json_f64(lambda),
                    "length": json_f64(length),
                    "mu": [json_f64(out.mu.re), json_f64(out.mu.im)],
                    "mu_full": [full(out.mu.re), full(out.mu.im)],
                    "convergents": out.points.iter().map(|(s, _)| s.to_string()).collect::<Vec<_>>(),
                    "points": out.points.iter().map(|(_, m)| json!([json_f64(m.re), json_f64(m.im)])).collect::<Vec<_>>(),
                    "spread": json_f64(out.spread),
                })
            );
            Ok(())
        }
        "from-mu" => {
            if values.len() != 2 {
                return Err(Failure::usage("from-mu wants RE IM"));
            }
            let re: f64 = values[0]
                .parse()
                .map_err(|_| Failure::usage(format!("bad re `{}`", values[0])))?;
            let im: f64 = values[1]
                .parse()
                .map_err(|_| Failure::usage(format!("bad im `{}`", values[1])))?;
            let mu = Complex64::new(re, im);
            let out = pleatmap::mu_to_coords(mu, cfg.lambda_tol, cfg.q_max).map_err(|e| match e {
                maskit::Error::NotLocalized(_) => Failure::run("not localized".to_string()),
                other => fail_from(&other),
            })?;
            println!(
                "{}",
                json!({
                    "lambda": json_f64(out.coords.lambda),
                    "length": json_f64(out.coords.length),
                    "on_ray": out.on_ray.map(|s| s.to_string()),
                    "bracket": [out.bracket.0.to_string(), out.bracket.1.to_string()],
                    "l_bracket": [
                        [json_f64(out.l_bracket.0.re), json_f64(out.l_bracket.0.im)],
                        [json_f64(out.l_bracket.1.re), json_f64(out.l_bracket.1.im)],
                    ],
                })
            );
            Ok(())
        }
        other => Err(Failure::usage(format!(
            "direction must be to-mu or from-mu, got `{other}`"
        ))),
    }
}

fn cmd_limitset(
    cfg: &RunConfig,
    mu_text: &str,
    depth: Option<usize>,
    prune: Option<f64>,
) -> Result<(), Failure> {
    let mu = parse_complex(mu_text)?;
    let opts = LimitSetOptions {
        max_depth: depth.unwrap_or(cfg.limit_depth),
        prune_eps: prune.unwrap_or(cfg.prune_eps),
        max_points: cfg.point_cap,
    };
    let sample = limitset::limit_points_with(mu, &opts).map_err(|e| fail_from(&e))?;
    let style = RenderStyle {
        px_width: cfg.svg_width,
        ..Default::default()
    };
    let svg = limitset::render_points(&sample, cfg.viewport, &style).map_err(|e| fail_from(&e))?;

    let mu_tag: String = mu_text
        .chars()
        .map(|c| match c {
            '+' => 'p',
            '-' => 'm',
            '.' => 'd',
            c => c,
        })
        .collect();
    let hash = fnv1a64(&format!("{}|{mu_text}|{}|{}", cfg.to_flat(), opts.max_depth, full(opts.prune_eps)));
    let base = format!("limitset_{mu_tag}_{hash:016x}");
    let csv_path = cfg.out_dir.join(format!("{base}.csv"));
    let svg_path = cfg.out_dir.join(format!("{base}.svg"));
    write_file(&csv_path, &sample.to_csv())?;
    write_file(&svg_path, &svg)?;
    write_run_config(cfg)?;
    println!(
        "{}",
        json!({
            "points": sample.points.len(),
            "depth_reached": sample.depth_reached,
            "truncated": sample.truncated,
            "dropped_at_infinity": sample.dropped_at_infinity,
            "csv": csv_path.display().to_string(),
            "svg": svg_path.display().to_string(),
        })
    );
    Ok(())
}
