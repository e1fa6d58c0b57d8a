//! Pleating length, the `L` family, and the coordinate map.
//!
//! On the ray of slope `p/q` the pleating length is the translation length of
//! `W_{p/q}` divided by the intersection number `q` with the slope-infinity
//! curve: `PL = (2/q) arccosh(t/2)`. The same formula read off-ray defines
//! `L_{p/q}(mu)`, with the arccosh branch fixed by being real on the ray and
//! continued off it. That branch is computed by continuation in `mu` down the
//! vertical line from large `Im mu` (where the principal branch is correct)
//! to the evaluation point; the candidates at each step differ by the sign
//! and the `4 pi i / q` lattice of the multivalued arccosh.

use crate::error::{Error, Result};
use crate::farey::{self, intersection_number, Slope};
use crate::numfmt::json_f64;
use crate::solver::{
    self, ray_point_at_trace, trace_ray_with, CuspCache, CuspPoint, PleatingRay, RayOptions,
};
use crate::svg::Rect;
use crate::traces::TraceEvaluator;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Complex translation length `2 arccosh(t/2)`, principal branch: real and
/// nonnegative for real `t >= 2`, with the excluded slit `t in [-2, 2)`.
pub fn translation_length(t: Complex64) -> Result<Complex64> {
    if t.im == 0.0 && t.re >= -2.0 && t.re < 2.0 {
        return Err(Error::BranchSlit { t });
    }
    Ok(2.0 * (t / 2.0).acosh())
}

/// Pleating length of the slope at trace value `t > 2`:
/// `2 arccosh(t/2) / q` with `q = intersection_number(slope, 1/0)`.
pub fn pleating_length(slope: Slope, t: f64) -> Result<f64> {
    let q = intersection_number(slope, Slope::INFINITY);
    if q == 0 {
        return Err(Error::NoRay(slope));
    }
    if !(t > 2.0) {
        return Err(Error::TraceTooSmall(t));
    }
    Ok(2.0 * (t / 2.0).acosh() / q as f64)
}

/// Inverse of [`pleating_length`]: the trace value `2 cosh(q l / 2)`.
pub fn trace_for_length(slope: Slope, length: f64) -> Result<f64> {
    let q = intersection_number(slope, Slope::INFINITY);
    if q == 0 {
        return Err(Error::NoRay(slope));
    }
    if !(length > 0.0) {
        return Err(Error::NonPositiveLength(length));
    }
    Ok(2.0 * (q as f64 * length / 2.0).cosh())
}

fn principal_l(ev: &TraceEvaluator, q: f64, mu: Complex64) -> Result<Complex64> {
    let (t, _) = ev.eval(mu);
    Ok(translation_length(t)? / q)
}

fn nearest_branch(a: Complex64, w: Complex64, lattice: f64) -> Complex64 {
    let mut best = a;
    let mut best_d = f64::INFINITY;
    for base in [a, -a] {
        let k0 = ((w.im - base.im) / lattice).round();
        for dk in [-1.0, 0.0, 1.0] {
            let cand = base + Complex64::new(0.0, lattice * (k0 + dk));
            let d = (cand - w).norm();
            if d < best_d {
                best_d = d;
                best = cand;
            }
        }
    }
    best
}

/// Height above which the principal branch agrees with the tracked one: all
/// roots of the trace polynomial sit low in the strip, so the argument of the
/// trace is small once `Im mu` clears `q (2 + |x|) + 2|p|` comfortably.
fn safe_height(slope: Slope, x: f64) -> f64 {
    20.0 + 2.0 * slope.p().abs() as f64 + slope.q() as f64 * (2.0 + x.abs())
}

/// `L_slope(mu) = translation_length(tr W_slope(mu)) / q`, on the branch that
/// is real on the slope's pleating ray and continuous off it.
pub fn l_function(slope: Slope, mu: Complex64) -> Result<Complex64> {
    let q = slope.q();
    if q < 1 {
        return Err(Error::NoRay(slope));
    }
    if !(mu.im > 0.0) || !mu.re.is_finite() {
        return Err(Error::Param(format!(
            "L is defined above the boundary; got mu = {mu}"
        )));
    }
    let ev = TraceEvaluator::new(slope);
    l_tracked(&ev, slope, mu)
}

fn l_tracked(ev: &TraceEvaluator, slope: Slope, mu: Complex64) -> Result<Complex64> {
    let qf = slope.q() as f64;
    let x = mu.re;
    let y_start = safe_height(slope, x);
    if mu.im >= y_start {
        return principal_l(ev, qf, mu);
    }
    let lattice = 4.0 * PI / qf;
    let jump_cap = (0.25 * lattice).min(0.35);
    let n = 192usize.max(24 * slope.q() as usize).min(4096);
    let ratio = (mu.im / y_start).powf(1.0 / n as f64);
    let mut w = principal_l(ev, qf, Complex64::new(x, y_start))?;
    let mut y = y_start;
    let mut stack: Vec<f64> = (1..=n)
        .map(|k| {
            if k == n {
                mu.im
            } else {
                y_start * ratio.powi(k as i32)
            }
        })
        .rev()
        .collect();
    let mut splits = 0u32;
    while let Some(&y_next) = stack.last() {
        match principal_l(ev, qf, Complex64::new(x, y_next)) {
            Ok(a) => {
                let cand = nearest_branch(a, w, lattice);
                if (cand - w).norm() > jump_cap && splits < 64 && y / y_next > 1.0 + 1e-12 {
                    splits += 1;
                    stack.push((y * y_next).sqrt());
                    continue;
                }
                w = cand;
                y = y_next;
                stack.pop();
            }
            Err(e) => {
                // exactly on the slit mid-track: split around it
                if y_next == mu.im || splits >= 64 {
                    return Err(e);
                }
                splits += 1;
                stack.push((y * y_next).sqrt());
            }
        }
    }
    Ok(w)
}

/// Convergence report for `L` along the convergents of a real pleating slope.
#[derive(Clone, Debug)]
pub struct LSequence {
    pub lambda: f64,
    pub convergents: Vec<Slope>,
    pub values: Vec<Complex64>,
    /// `|L_{n+1} - L_n|`.
    pub diffs: Vec<f64>,
    pub value: Complex64,
    /// Diffs are strictly decreasing after their maximum.
    pub eventually_decreasing: bool,
}

/// Evaluate `L` at the continued-fraction convergents of `lambda` and report
/// the convergence quality (non-Cauchy behavior is reported, not an error).
pub fn l_irrational(lambda: f64, mu: Complex64, depth: usize) -> Result<LSequence> {
    if depth < 2 {
        return Err(Error::DepthBound { min: 2, got: depth });
    }
    let convergents = farey::convergents_of_real(lambda, depth)?;
    let mut values = Vec::with_capacity(convergents.len());
    for &s in &convergents {
        values.push(l_function(s, mu)?);
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let eventually_decreasing = match diffs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
    {
        Some(imax) => diffs[imax..].windows(2).all(|w| w[1] < w[0]),
        None => true,
    };
    Ok(LSequence {
        lambda,
        value: *values.last().expect("depth >= 2"),
        convergents,
        values,
        diffs,
        eventually_decreasing,
    })
}

/// A point of the coordinate plane: pleating slope and pleating length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PleatingCoordinates {
    pub lambda: f64,
    pub length: f64,
}

/// Inverse coordinate map for a rational pleating slope: the point on the
/// `slope` ray whose pleating length is `length`.
pub fn coords_to_mu_rational(slope: Slope, length: f64, tol: f64) -> Result<Complex64> {
    let t = trace_for_length(slope, length)?;
    ray_point_at_trace(slope, t, tol)
}

/// Inverse coordinate map through convergents, with a spread diagnostic.
#[derive(Clone, Debug)]
pub struct IrrationalPoint {
    pub mu: Complex64,
    pub points: Vec<(Slope, Complex64)>,
    /// Max pairwise distance among the last three convergent points.
    pub spread: f64,
}

pub fn coords_to_mu(lambda: f64, length: f64, depth: usize, tol: f64) -> Result<IrrationalPoint> {
    if depth < 1 {
        return Err(Error::DepthBound { min: 1, got: depth });
    }
    let convergents = farey::convergents_of_real(lambda, depth)?;
    let mut points = Vec::with_capacity(convergents.len());
    for &s in &convergents {
        let mu = coords_to_mu_rational(s, length, tol)?;
        points.push((s, mu));
    }
    let tail: Vec<Complex64> = points
        .iter()
        .rev()
        .take(3)
        .map(|&(_, mu)| mu)
        .collect();
    let mut spread = 0.0f64;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            spread = spread.max((tail[i] - tail[j]).norm());
        }
    }
    Ok(IrrationalPoint {
        mu: points.last().expect("depth >= 1").1,
        points,
        spread,
    })
}

/// Forward coordinate map result at grid resolution.
#[derive(Clone, Debug)]
pub struct MuCoords {
    pub coords: PleatingCoordinates,
    /// Set when `mu` lies on a rational ray within the realness tolerance.
    pub on_ray: Option<Slope>,
    pub bracket: (Slope, Slope),
    pub l_bracket: (Complex64, Complex64),
}

/// Localize the pleating slope of `mu` by Farey bisection with the
/// side-of-ray test (sign of `Im tr`), then read the length off the
/// bracketing rays.
pub fn mu_to_coords(mu: Complex64, lambda_tol: f64, q_max: i64) -> Result<MuCoords> {
    const REALNESS: f64 = 1e-9;
    if !(mu.im > 0.0) || !mu.re.is_finite() {
        return Err(Error::NotLocalized(mu));
    }
    let side = |s: Slope| -> (f64, f64) {
        let (v, _) = TraceEvaluator::new(s).eval(mu);
        (v.im, v.norm())
    };
    let on_ray_result = |s: Slope| -> Result<MuCoords> {
        let l = l_function(s, mu)?;
        Ok(MuCoords {
            coords: PleatingCoordinates {
                lambda: s.value(),
                length: l.re,
            },
            on_ray: Some(s),
            bracket: (s, s),
            l_bracket: (l, l),
        })
    };

    let n = (mu.re / 2.0).floor() as i64;
    let mut lo = Slope::new(n, 1)?;
    let mut hi = Slope::new(n + 1, 1)?;
    for s in [lo, hi] {
        let (im, norm) = side(s);
        if im.abs() <= REALNESS * norm.max(1.0) {
            return on_ray_result(s);
        }
    }
    loop {
        let m = Slope::new(lo.p() + hi.p(), lo.q() + hi.q())?;
        if m.q() > q_max {
            break;
        }
        let (im, norm) = side(m);
        if im.abs() <= REALNESS * norm.max(1.0) {
            return on_ray_result(m);
        }
        if im < 0.0 {
            // mu lies to the right of the m-ray
            lo = m;
        } else {
            hi = m;
        }
        if hi.value() - lo.value() <= lambda_tol {
            break;
        }
    }
    let l_lo = l_function(lo, mu)?;
    let l_hi = l_function(hi, mu)?;
    Ok(MuCoords {
        coords: PleatingCoordinates {
            lambda: 0.5 * (lo.value() + hi.value()),
            length: 0.5 * (l_lo.re + l_hi.re),
        },
        on_ray: None,
        bracket: (lo, hi),
        l_bracket: (l_lo, l_hi),
    })
}

/// Options for assembling the coordinate-grid figure.
#[derive(Clone, Debug)]
pub struct GridOptions {
    pub q_max: i64,
    pub lengths: Vec<f64>,
    pub strip: (f64, f64),
    pub boundary_depth: i64,
    pub ray: RayOptions,
    pub viewport: Rect,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            q_max: 12,
            lengths: vec![0.25, 0.5, 1.0, 2.0],
            strip: (0.0, 2.0),
            boundary_depth: 20,
            ray: RayOptions::default(),
            viewport: Rect::new(-0.25, 2.25, 0.0, 4.0),
        }
    }
}

/// A constant-pleating-length curve sampled with one point per ray.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub length: f64,
    pub points: Vec<(Slope, Complex64)>,
}

/// The assembled figure: rays, level curves, boundary cusps.
#[derive(Clone, Debug)]
pub struct GridFigure {
    pub rays: Vec<PleatingRay>,
    pub level_curves: Vec<LevelCurve>,
    pub boundary: Vec<CuspPoint>,
    pub viewport: Rect,
    pub ray_failures: Vec<(Slope, String)>,
    pub level_failures: Vec<(f64, Slope, String)>,
    pub boundary_failures: Vec<(Slope, String)>,
}

impl GridFigure {
    /// Fraction of requested rays that traced successfully.
    pub fn ray_success_fraction(&self) -> f64 {
        let total = self.rays.len() + self.ray_failures.len();
        if total == 0 {
            1.0
        } else {
            self.rays.len() as f64 / total as f64
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rays: Vec<_> = self
            .rays
            .iter()
            .map(|r| {
                serde_json::json!({
                    "slope": r.slope.to_string(),
                    "samples": r.samples.iter().map(|s| {
                        serde_json::json!([
                            json_f64(s.t), json_f64(s.mu.re), json_f64(s.mu.im),
                            json_f64(s.length), json_f64(s.residual)
                        ])
                    }).collect::<Vec<_>>(),
                    "cusp": r.endpoint.to_json(),
                })
            })
            .collect();
        let levels: Vec<_> = self
            .level_curves
            .iter()
            .map(|c| {
                serde_json::json!({
                    "length": json_f64(c.length),
                    "slopes": c.points.iter().map(|(s, _)| s.to_string()).collect::<Vec<_>>(),
                    "points": c.points.iter().map(|(_, mu)| {
                        serde_json::json!([json_f64(mu.re), json_f64(mu.im)])
                    }).collect::<Vec<_>>(),
                })
            })
            .collect();
        let boundary: Vec<_> = self.boundary.iter().map(|c| c.to_json()).collect();
        serde_json::json!({
            "viewport": [
                json_f64(self.viewport.x0), json_f64(self.viewport.x1),
                json_f64(self.viewport.y0), json_f64(self.viewport.y1)
            ],
            "rays": rays,
            "level_curves": levels,
            "boundary": boundary,
            "failures": {
                "rays": self.ray_failures.iter().map(|(s, e)| {
                    serde_json::json!({"slope": s.to_string(), "error": e})
                }).collect::<Vec<_>>(),
                "levels": self.level_failures.iter().map(|(l, s, e)| {
                    serde_json::json!({"length": json_f64(*l), "slope": s.to_string(), "error": e})
                }).collect::<Vec<_>>(),
                "boundary": self.boundary_failures.iter().map(|(s, e)| {
                    serde_json::json!({"slope": s.to_string(), "error": e})
                }).collect::<Vec<_>>(),
            },
        })
    }
}

/// Solve for the point on an already-traced ray at trace value `t`, seeding
/// Newton from the nearest sample.
fn point_on_ray_at_trace(ray: &PleatingRay, t: f64, tol: f64) -> Result<Complex64> {
    let nearest = ray
        .samples
        .iter()
        .min_by(|a, b| {
            let da = ((a.t - 2.0) / (t - 2.0)).ln().abs();
            let db = ((b.t - 2.0) / (t - 2.0)).ln().abs();
            da.total_cmp(&db)
        })
        .expect("rays have samples");
    let out = solver::newton(ray.slope, t.into(), nearest.mu, tol, 64)?;
    Ok(out.mu)
}

/// Assemble the figure: rays for every slope with `q <= q_max` in the strip,
/// one level-curve point per ray per requested length, and the boundary
/// polyline through the cusps with `q <= boundary_depth`.
pub fn build_grid(opts: &GridOptions) -> Result<GridFigure> {
    if opts.q_max < 1 {
        return Err(Error::Param(format!("q_max must be >= 1, got {}", opts.q_max)));
    }
    if let Some(&bad) = opts.lengths.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::NonPositiveLength(bad));
    }
    let slopes = farey::enumerate_slopes(opts.q_max, opts.strip.0, opts.strip.1)?;

    // rays are independent; solve them in parallel and merge in slope order
    let results: Vec<(Slope, crate::error::Result<PleatingRay>)> = slopes
        .par_iter()
        .map(|&s| (s, trace_ray_with(s, &opts.ray)))
        .collect();
    let mut rays = Vec::new();
    let mut ray_failures = Vec::new();
    for (s, r) in results {
        match r {
            Ok(ray) => rays.push(ray),
            Err(e) => ray_failures.push((s, e.to_string())),
        }
    }

    let mut level_curves = Vec::new();
    let mut level_failures = Vec::new();
    for &length in &opts.lengths {
        let mut points = Vec::new();
        for ray in &rays {
            match trace_for_length(ray.slope, length)
                .and_then(|t| point_on_ray_at_trace(ray, t, opts.ray.tol))
            {
                Ok(mu) => points.push((ray.slope, mu)),
                Err(e) => level_failures.push((length, ray.slope, e.to_string())),
            }
        }
        level_curves.push(LevelCurve { length, points });
    }

    let boundary_slopes = farey::enumerate_slopes(opts.boundary_depth, opts.strip.0, opts.strip.1)?;
    let mut cache = CuspCache::new(opts.ray.tol);
    let mut boundary = Vec::new();
    let mut boundary_failures = Vec::new();
    for s in boundary_slopes {
        match cache.find(s) {
            Ok(c) => boundary.push(c),
            Err(e) => boundary_failures.push((s, e.to_string())),
        }
    }

    Ok(GridFigure {
        rays,
        level_curves,
        boundary,
        viewport: opts.viewport,
        ray_failures,
        level_failures,
        boundary_failures,
    })
}
