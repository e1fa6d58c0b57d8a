//! Run configuration: a flat key/value text file that fully determines a run.
//!
//! Environment variables are never consulted; CLI flags override file values,
//! and the effective configuration is written next to every file-producing
//! command so a run can be replayed exactly.

use anyhow::{bail, Context, Result};
use maskit::numfmt::full;
use maskit::solver::RayOptions;
use maskit::Rect;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Newton residual tolerance (root residual).
    pub root_tol: f64,
    /// Bound on |Im tr| at accepted ray samples.
    pub realness_tol: f64,
    /// Bracket width at which slope bisection stops.
    pub lambda_tol: f64,
    /// Ray enumeration bound.
    pub q_max: i64,
    /// Denominator bound for boundary cusps.
    pub boundary_depth: i64,
    /// Trace value at the top of each ray.
    pub t_max: f64,
    /// Rows per ray CSV (including the cusp row).
    pub ray_samples: usize,
    /// Geometric ratio in t - 2 between ray samples.
    pub ratio: f64,
    /// Degree cap for exact trace polynomials.
    pub exact_cap: i64,
    /// Convergent depth for irrational pleating slopes.
    pub depth: usize,
    /// Limit-set DFS depth.
    pub limit_depth: usize,
    /// Limit-set pruning diameter.
    pub prune_eps: f64,
    /// Limit-set point budget.
    pub point_cap: usize,
    /// Strip of slopes covered by the grid.
    pub strip: (f64, f64),
    /// Constant-pleating-length levels for the grid.
    pub lengths: Vec<f64>,
    /// Viewport rectangle in the mu plane (x0, x1, y0, y1).
    pub viewport: Rect,
    /// SVG width in pixels.
    pub svg_width: f64,
    /// Output directory.
    pub out_dir: PathBuf,
    /// Seed reserved for test-point generation.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            root_tol: 1e-10,
            realness_tol: 1e-9,
            lambda_tol: 1e-6,
            q_max: 12,
            boundary_depth: 20,
            t_max: 1e6,
            ray_samples: 128,
            ratio: 0.8,
            exact_cap: 64,
            depth: 12,
            limit_depth: 14,
            prune_eps: 1e-3,
            point_cap: 2_000_000,
            strip: (0.0, 2.0),
            lengths: vec![0.25, 0.5, 1.0, 2.0],
            viewport: Rect::new(-0.25, 2.25, 0.0, 4.0),
            svg_width: 900.0,
            out_dir: PathBuf::from("out"),
            seed: 7,
        }
    }
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter().map(|x| full(*x)).collect::<Vec<_>>().join(",")
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{x}`"))
        })
        .collect()
}

impl RunConfig {
    /// Canonical flat serialization; parsing it back reproduces the config.
    pub fn to_flat(&self) -> String {
        let mut s = String::from("# maskit run configuration\n");
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("root_tol", full(self.root_tol));
        kv("realness_tol", full(self.realness_tol));
        kv("lambda_tol", full(self.lambda_tol));
        kv("q_max", self.q_max.to_string());
        kv("boundary_depth", self.boundary_depth.to_string());
        kv("t_max", full(self.t_max));
        kv("ray_samples", self.ray_samples.to_string());
        kv("ratio", full(self.ratio));
        kv("exact_cap", self.exact_cap.to_string());
        kv("depth", self.depth.to_string());
        kv("limit_depth", self.limit_depth.to_string());
        kv("prune_eps", full(self.prune_eps));
        kv("point_cap", self.point_cap.to_string());
        kv("strip", join_f64(&[self.strip.0, self.strip.1]));
        kv("lengths", join_f64(&self.lengths));
        kv(
            "viewport",
            join_f64(&[
                self.viewport.x0,
                self.viewport.x1,
                self.viewport.y0,
                self.viewport.y1,
            ]),
        );
        kv("svg_width", full(self.svg_width));
        kv("out_dir", self.out_dir.display().to_string());
        kv("seed", self.seed.to_string());
        s
    }

    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "root_tol" => self.root_tol = v.parse()?,
            "realness_tol" => self.realness_tol = v.parse()?,
            "lambda_tol" => self.lambda_tol = v.parse()?,
            "q_max" => self.q_max = v.parse()?,
            "boundary_depth" => self.boundary_depth = v.parse()?,
            "t_max" => self.t_max = v.parse()?,
            "ray_samples" => self.ray_samples = v.parse()?,
            "ratio" => self.ratio = v.parse()?,
            "exact_cap" => self.exact_cap = v.parse()?,
            "depth" => self.depth = v.parse()?,
            "limit_depth" => self.limit_depth = v.parse()?,
            "prune_eps" => self.prune_eps = v.parse()?,
            "point_cap" => self.point_cap = v.parse()?,
            "strip" => {
                let xs = parse_f64_list(v)?;
                if xs.len() != 2 {
                    bail!("strip wants `lo,hi`, got `{v}`");
                }
                self.strip = (xs[0], xs[1]);
            }
            "lengths" => self.lengths = parse_f64_list(v)?,
            "viewport" => {
                let xs = parse_f64_list(v)?;
                if xs.len() != 4 {
                    bail!("viewport wants `x0,x1,y0,y1`, got `{v}`");
                }
                self.viewport = Rect::new(xs[0], xs[1], xs[2], xs[3]);
            }
            "svg_width" => self.svg_width = v.parse()?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "seed" => self.seed = v.parse()?,
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = RunConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected `key = value`", path.display(), no + 1))?;
            cfg.apply_kv(k.trim(), v)
                .with_context(|| format!("{}:{}", path.display(), no + 1))?;
        }
        Ok(cfg)
    }

    pub fn ray_options(&self) -> RayOptions {
        RayOptions {
            t_max: self.t_max,
            samples: self.ray_samples,
            ratio: self.ratio,
            tol: self.root_tol,
            realness_tol: self.realness_tol,
            max_iter: 64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_roundtrip() {
        let mut cfg = RunConfig::default();
        cfg.q_max = 7;
        cfg.lengths = vec![0.5, 2.0];
        cfg.strip = (-1.0, 1.5);
        cfg.out_dir = PathBuf::from("/tmp/x");
        let dir = std::env::temp_dir().join("maskit-config-test.config");
        std::fs::write(&dir, cfg.to_flat()).unwrap();
        let back = RunConfig::from_file(&dir).unwrap();
        assert_eq!(back, cfg);
        std::fs::remove_file(&dir).ok();
    }

    #[test]
    fn unknown_key_is_an_error() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_kv("no_such_key", "1").is_err());
        assert!(cfg.apply_kv("strip", "1,2,3").is_err());
        assert!(cfg.apply_kv("lengths", "").is_ok());
        assert!(cfg.lengths.is_empty());
    }
}
