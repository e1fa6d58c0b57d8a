//! Newton cusp finding and pleating-ray continuation.
//!
//! A pleating ray is traced as the level set `tr W_{p/q}(mu) = t` for real
//! `t` descending from `t_max` to 2: the starting point comes from the
//! asymptote `Re mu = 2p/q` (bisection on the imaginary offset until
//! `|tr| = t_max`, then Newton onto the real locus), and each successive
//! target is solved by Newton seeded at the previous sample, with geometric
//! spacing in `t - 2` and step halving on failure. The endpoint `t = 2` is
//! the cusp.

use crate::error::{Error, Result};
use crate::farey::{farey_parents, Slope};
use crate::numfmt::{full, json_f64};
use crate::traces::TraceEvaluator;
use num_complex::Complex64;
use std::collections::HashMap;

/// Derivative magnitudes below this are treated as singular Newton steps.
pub const SINGULAR_DERIV: f64 = 1e-14;

/// Outcome of a Newton run.
#[derive(Clone, Copy, Debug)]
pub struct NewtonOutcome {
    pub mu: Complex64,
    pub residual: f64,
    pub iterations: u32,
}

/// The endpoint of a rational pleating ray on the slice boundary.
#[derive(Clone, Debug)]
pub struct CuspPoint {
    pub slope: Slope,
    pub mu: Complex64,
    pub residual: f64,
    pub iterations: u32,
}

impl CuspPoint {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope.to_string(),
            "mu": [json_f64(self.mu.re), json_f64(self.mu.im)],
            "mu_full": [full(self.mu.re), full(self.mu.im)],
            "residual": json_f64(self.residual),
            "iterations": self.iterations,
        })
    }
}

/// One accepted continuation sample on a ray.
#[derive(Clone, Copy, Debug)]
pub struct RaySample {
    pub t: f64,
    pub mu: Complex64,
    /// Pleating length at this sample, `2 arccosh(t/2) / q`.
    pub length: f64,
    pub residual: f64,
}

/// A sampled pleating ray; samples have strictly decreasing `t > 2` and the
/// endpoint is the cusp at `t = 2`.
#[derive(Clone, Debug)]
pub struct PleatingRay {
    pub slope: Slope,
    pub samples: Vec<RaySample>,
    pub endpoint: CuspPoint,
}

impl PleatingRay {
    /// CSV with columns `slope,t,Re(mu),Im(mu),pleating_length,residual`;
    /// the final row is the cusp.
    pub fn to_csv(&self) -> String {
        use crate::numfmt::g9;
        let mut out = String::from("slope,t,Re(mu),Im(mu),pleating_length,residual\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.slope,
                g9(s.t),
                g9(s.mu.re),
                g9(s.mu.im),
                g9(s.length),
                g9(s.residual)
            ));
        }
        let e = &self.endpoint;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            self.slope,
            g9(2.0),
            g9(e.mu.re),
            g9(e.mu.im),
            g9(0.0),
            g9(e.residual)
        ));
        out
    }
}

/// Options for ray tracing and continuation.
#[derive(Clone, Copy, Debug)]
pub struct RayOptions {
    /// Trace value at the top of the ray.
    pub t_max: f64,
    /// Total number of CSV rows including the cusp row.
    pub samples: usize,
    /// Geometric ratio in `t - 2` between successive samples.
    pub ratio: f64,
    /// Newton residual tolerance (scaled by `max(1, |target|)`).
    pub tol: f64,
    /// Bound on `|Im tr|` at accepted samples.
    pub realness_tol: f64,
    pub max_iter: u32,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            t_max: 1e6,
            samples: 128,
            ratio: 0.8,
            tol: 1e-10,
            realness_tol: 1e-9,
            max_iter: 64,
        }
    }
}

fn escape_bound(slope: Slope, t_ref: f64) -> f64 {
    let q = slope.q().max(1) as f64;
    10.0 + 2.0 * slope.value().abs() + t_ref.abs().powf(1.0 / q)
}

fn newton_ev(
    ev: &TraceEvaluator,
    target: Complex64,
    mu0: Complex64,
    tol: f64,
    max_iter: u32,
    escape: f64,
) -> Result<NewtonOutcome> {
    let scale = target.norm().max(1.0);
    let mut mu = mu0;
    let mut best_mu = mu0;
    let mut best_res = f64::INFINITY;
    let mut converged_at: Option<u32> = None;
    let mut it = 0u32;
    while it < max_iter {
        let (v, d) = ev.eval(mu);
        let res = (v - target).norm();
        if res < best_res {
            best_res = res;
            best_mu = mu;
        }
        if converged_at.is_none() && res <= tol * scale {
            converged_at = Some(it);
        }
        if let Some(c) = converged_at {
            // a couple of polish steps drive the residual to the noise floor
            if it >= c + 2 || res > best_res {
                break;
            }
        }
        if d.norm() < SINGULAR_DERIV {
            if converged_at.is_some() {
                break;
            }
            return Err(Error::SingularDerivative {
                mu,
                deriv: d.norm(),
            });
        }
        mu -= (v - target) / d;
        it += 1;
        if !(mu.re.is_finite() && mu.im.is_finite()) || mu.norm() > escape {
            if converged_at.is_some() {
                break;
            }
            return Err(Error::Escaped { mu, bound: escape });
        }
    }
    if converged_at.is_some() {
        Ok(NewtonOutcome {
            mu: best_mu,
            residual: best_res,
            iterations: it,
        })
    } else {
        Err(Error::NoConvergence {
            mu: best_mu,
            residual: best_res,
            max_iter,
        })
    }
}

/// Newton iteration `mu <- mu - (tr(mu) - target)/tr'(mu)` for
/// `tr W_slope(mu) = target`.
pub fn newton(
    slope: Slope,
    target: Complex64,
    mu0: Complex64,
    tol: f64,
    max_iter: u32,
) -> Result<NewtonOutcome> {
    let ev = TraceEvaluator::new(slope);
    let escape = escape_bound(slope, target.norm().max(4.0));
    newton_ev(&ev, target, mu0, tol, max_iter, escape)
}

/// Walk the continuation from `(mu_from, t_from)` to the real target
/// `t_to > 2`, halving steps geometrically in `t - 2` on Newton failure.
fn advance(
    ev: &TraceEvaluator,
    slope: Slope,
    mu_from: Complex64,
    t_from: f64,
    t_to: f64,
    opts: &RayOptions,
    escape: f64,
) -> Result<NewtonOutcome> {
    let mut pending = vec![t_to];
    let mut cur_mu = mu_from;
    let mut cur_t = t_from;
    let mut retries = 0u32;
    let mut last = None;
    while let Some(&t_next) = pending.last() {
        let attempt = newton_ev(ev, t_next.into(), cur_mu, opts.tol, opts.max_iter, escape);
        match attempt {
            Ok(out) if out.mu.im > 0.0 => {
                pending.pop();
                cur_mu = out.mu;
                cur_t = t_next;
                last = Some(out);
            }
            _ => {
                retries += 1;
                if retries > 20 {
                    return Err(Error::ContinuationFailed {
                        slope,
                        t: t_next,
                        retries,
                        mu: cur_mu,
                    });
                }
                let mid = if t_next > 2.0 {
                    2.0 + ((cur_t - 2.0) * (t_next - 2.0)).sqrt()
                } else {
                    2.0 + (cur_t - 2.0) * 0.3
                };
                pending.push(mid);
            }
        }
    }
    last.ok_or(Error::ContinuationFailed {
        slope,
        t: t_to,
        retries,
        mu: cur_mu,
    })
}

/// First point of a ray: bisect the imaginary offset on the asymptote
/// `Re mu = 2p/q` until `|tr| = t_start`, then Newton onto the real locus.
fn ray_start(
    ev: &TraceEvaluator,
    slope: Slope,
    t_start: f64,
    opts: &RayOptions,
    escape: f64,
) -> Result<NewtonOutcome> {
    let x0 = 2.0 * slope.value();
    let f = |y: f64| ev.eval(Complex64::new(x0, y)).0.norm();
    let mut y_hi = 2.0;
    let mut grow = 0;
    while f(y_hi) < t_start {
        y_hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::ContinuationFailed {
                slope,
                t: t_start,
                retries: 0,
                mu: Complex64::new(x0, y_hi),
            });
        }
    }
    let mut y_lo = 0.5_f64.min(y_hi / 2.0);
    while f(y_lo) >= t_start && y_lo > 1e-9 {
        y_lo *= 0.5;
    }
    for _ in 0..100 {
        let ym = 0.5 * (y_lo + y_hi);
        if f(ym) < t_start {
            y_lo = ym;
        } else {
            y_hi = ym;
        }
    }
    let seed = Complex64::new(x0, 0.5 * (y_lo + y_hi));
    newton_ev(ev, t_start.into(), seed, opts.tol, opts.max_iter, escape)
}

/// Enforce sample invariants: real trace and nonsingular derivative.
fn check_sample(
    ev: &TraceEvaluator,
    slope: Slope,
    out: &NewtonOutcome,
    opts: &RayOptions,
) -> Result<()> {
    let (v, d) = ev.eval(out.mu);
    if v.im.abs() > opts.realness_tol {
        return Err(Error::ContinuationFailed {
            slope,
            t: v.re,
            retries: 0,
            mu: out.mu,
        });
    }
    if d.norm() < SINGULAR_DERIV {
        return Err(Error::SingularDerivative {
            mu: out.mu,
            deriv: d.norm(),
        });
    }
    Ok(())
}

fn length_at(slope: Slope, t: f64) -> f64 {
    2.0 * (t / 2.0).acosh() / slope.q() as f64
}

/// Trace the pleating ray of `slope` from `t_max` down to its cusp.
pub fn trace_ray(slope: Slope, t_max: f64, samples: usize, tol: f64) -> Result<PleatingRay> {
    trace_ray_with(
        slope,
        &RayOptions {
            t_max,
            samples,
            tol,
            ..Default::default()
        },
    )
}

pub fn trace_ray_with(slope: Slope, opts: &RayOptions) -> Result<PleatingRay> {
    if slope.q() < 1 {
        return Err(Error::NoRay(slope));
    }
    if !(opts.t_max > 2.0) {
        return Err(Error::TraceTooSmall(opts.t_max));
    }
    if opts.samples < 2 {
        return Err(Error::Param(format!(
            "need at least 2 samples, got {}",
            opts.samples
        )));
    }
    let ev = TraceEvaluator::new(slope);
    let escape = escape_bound(slope, opts.t_max);

    let first = ray_start(&ev, slope, opts.t_max, opts, escape)?;
    check_sample(&ev, slope, &first, opts)?;
    let mut samples_out = vec![RaySample {
        t: opts.t_max,
        mu: first.mu,
        length: length_at(slope, opts.t_max),
        residual: first.residual,
    }];

    let mut cur_mu = first.mu;
    let mut cur_t = opts.t_max;
    for k in 1..=(opts.samples - 2) {
        let t_k = 2.0 + (opts.t_max - 2.0) * opts.ratio.powi(k as i32);
        let out = advance(&ev, slope, cur_mu, cur_t, t_k, opts, escape)?;
        check_sample(&ev, slope, &out, opts)?;
        samples_out.push(RaySample {
            t: t_k,
            mu: out.mu,
            length: length_at(slope, t_k),
            residual: out.residual,
        });
        cur_mu = out.mu;
        cur_t = t_k;
    }

    let end = advance(&ev, slope, cur_mu, cur_t, 2.0, opts, escape)?;
    let (_, d) = ev.eval(end.mu);
    if end.mu.im <= 0.0 || d.norm() < SINGULAR_DERIV {
        return Err(Error::CuspSearchFailed {
            slope,
            detail: format!("endpoint mu = {} rejected (Im <= 0 or singular)", end.mu),
        });
    }
    Ok(PleatingRay {
        slope,
        samples: samples_out,
        endpoint: CuspPoint {
            slope,
            mu: end.mu,
            residual: end.residual,
            iterations: end.iterations,
        },
    })
}

/// The unique point on the ray of `slope` with `tr W(mu) = t`, by truncated
/// continuation from the asymptotic seed.
pub fn ray_point_at_trace(slope: Slope, t: f64, tol: f64) -> Result<Complex64> {
    if slope.q() < 1 {
        return Err(Error::NoRay(slope));
    }
    if !(t > 2.0) {
        return Err(Error::TraceTooSmall(t));
    }
    let opts = RayOptions {
        tol,
        ..Default::default()
    };
    let t_hi = (2.0 + 10.0 * (t - 2.0)).max(1e4);
    let ev = TraceEvaluator::new(slope);
    let escape = escape_bound(slope, t_hi);
    let start = ray_start(&ev, slope, t_hi, &opts, escape)?;
    let mut cur_mu = start.mu;
    let mut cur_t = t_hi;
    while cur_t - 2.0 > (t - 2.0) * 1.0001 {
        let next = (2.0 + (cur_t - 2.0) * opts.ratio).max(t);
        let out = advance(&ev, slope, cur_mu, cur_t, next, &opts, escape)?;
        cur_mu = out.mu;
        cur_t = next;
    }
    let fin = advance(&ev, slope, cur_mu, cur_t, t, &opts, escape)?;
    check_sample(&ev, slope, &fin, &opts)?;
    Ok(fin.mu)
}

/// Memoizing cusp finder: the initial point for `p/q` is the midpoint of the
/// parent cusps; integer slopes seed at the exact twist image `2p + 2i`.
pub struct CuspCache {
    tol: f64,
    map: HashMap<Slope, CuspPoint>,
}

impl CuspCache {
    pub fn new(tol: f64) -> CuspCache {
        CuspCache {
            tol,
            map: HashMap::new(),
        }
    }

    pub fn find(&mut self, slope: Slope) -> Result<CuspPoint> {
        if slope.is_infinity() {
            return Err(Error::NoCusp);
        }
        if let Some(hit) = self.map.get(&slope) {
            return Ok(hit.clone());
        }
        let seed = if slope.q() == 1 {
            Complex64::new(2.0 * slope.p() as f64, 2.0)
        } else {
            let (l, r) = farey_parents(slope)?;
            let cl = self.find(l)?;
            let cr = self.find(r)?;
            (cl.mu + cr.mu) / 2.0
        };
        let ev = TraceEvaluator::new(slope);
        let escape = escape_bound(slope, 100.0);
        let x0 = 2.0 * slope.value();
        let direct = newton_ev(&ev, 2.0.into(), seed, self.tol, 64, escape)
            .ok()
            .filter(|out| out.mu.im > 0.0 && (out.mu.re - x0).abs() <= 1.0);
        let out = match direct {
            Some(out) => out,
            None => {
                // parent-midpoint Newton left the expected region; fall back
                // to continuation along the ray
                let ray = trace_ray_with(
                    slope,
                    &RayOptions {
                        tol: self.tol,
                        ..Default::default()
                    },
                )
                .map_err(|e| Error::CuspSearchFailed {
                    slope,
                    detail: format!("midpoint Newton and ray fallback both failed: {e}"),
                })?;
                NewtonOutcome {
                    mu: ray.endpoint.mu,
                    residual: ray.endpoint.residual,
                    iterations: ray.endpoint.iterations,
                }
            }
        };
        let (v, d) = ev.eval(out.mu);
        if (v - 2.0).norm() > self.tol.max(1e-9) || out.mu.im <= 0.0 || d.norm() < SINGULAR_DERIV {
            return Err(Error::CuspSearchFailed {
                slope,
                detail: format!(
                    "candidate mu = {} has residual {:.3e}, derivative {:.3e}",
                    out.mu,
                    (v - 2.0).norm(),
                    d.norm()
                ),
            });
        }
        let cusp = CuspPoint {
            slope,
            mu: out.mu,
            residual: out.residual,
            iterations: out.iterations,
        };
        self.map.insert(slope, cusp.clone());
        Ok(cusp)
    }
}

/// One-shot cusp search (see [`CuspCache`] for batch use).
pub fn find_cusp(slope: Slope, tol: f64) -> Result<CuspPoint> {
    CuspCache::new(tol).find(slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn newton_closed_forms() {
        // -i mu = 2  =>  mu = 2i
        let out = newton(sl(0, 1), 2.0.into(), Complex64::new(0.0, 1.0), 1e-12, 32).unwrap();
        assert!((out.mu - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        // -i(mu - 2) = 2  =>  mu = 2 + 2i
        let out = newton(sl(1, 1), 2.0.into(), Complex64::new(1.0, 1.0), 1e-12, 32).unwrap();
        assert!((out.mu - Complex64::new(2.0, 2.0)).norm() < 1e-12);
        // quadratic: root of mu^2 - 2mu + 4 in the upper half plane
        let out = newton(sl(1, 2), 2.0.into(), Complex64::new(1.0, 2.0), 1e-12, 32).unwrap();
        assert!((out.mu - Complex64::new(1.0, SQRT3)).norm() < 1e-10);
    }

    #[test]
    fn newton_error_paths() {
        // constant trace: singular derivative unless already at the target
        let r = newton(Slope::INFINITY, 3.0.into(), Complex64::new(0.0, 1.0), 1e-12, 8);
        assert!(matches!(r, Err(Error::SingularDerivative { .. })));
        // zero iterations allowed only if the seed is already converged
        let r = newton(sl(0, 1), 2.0.into(), Complex64::new(5.0, 5.0), 1e-12, 0);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn cusp_closed_forms() {
        assert!(
            (find_cusp(sl(0, 1), 1e-10).unwrap().mu - Complex64::new(0.0, 2.0)).norm() < 1e-9
        );
        assert!(
            (find_cusp(sl(1, 1), 1e-10).unwrap().mu - Complex64::new(2.0, 2.0)).norm() < 1e-9
        );
        assert!(
            (find_cusp(sl(1, 2), 1e-10).unwrap().mu - Complex64::new(1.0, SQRT3)).norm() < 1e-9
        );
        // twist and reflection images of the 1/2 cusp
        assert!(
            (find_cusp(sl(3, 2), 1e-10).unwrap().mu - Complex64::new(3.0, SQRT3)).norm() < 1e-8
        );
        assert!(
            (find_cusp(sl(-1, 2), 1e-10).unwrap().mu - Complex64::new(-1.0, SQRT3)).norm() < 1e-8
        );
        assert!(matches!(
            find_cusp(Slope::INFINITY, 1e-10),
            Err(Error::NoCusp)
        ));
    }

    #[test]
    fn ray_closed_forms() {
        // slope 0/1: the ray is exactly { i t : t > 2 }
        let ray = trace_ray(sl(0, 1), 100.0, 40, 1e-10).unwrap();
        assert_eq!(ray.samples.len(), 39);
        for s in &ray.samples {
            assert!(s.mu.re.abs() < 1e-9);
            assert!((s.mu.im - s.t).abs() < 1e-8);
        }
        assert!((ray.endpoint.mu - Complex64::new(0.0, 2.0)).norm() < 1e-9);
        // slope 1/1: { 2 + i t }
        let ray = trace_ray(sl(1, 1), 100.0, 40, 1e-10).unwrap();
        for s in &ray.samples {
            assert!((s.mu.re - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ray_samples_monotone() {
        let ray = trace_ray(sl(1, 2), 1e4, 60, 1e-10).unwrap();
        for w in ray.samples.windows(2) {
            assert!(w[1].t < w[0].t);
            assert!(w[1].length < w[0].length);
        }
        assert!(ray.samples.last().unwrap().t > 2.0);
        assert!((ray.endpoint.mu - Complex64::new(1.0, SQRT3)).norm() < 1e-8);
    }

    #[test]
    fn ray_asymptote_near_top() {
        // at t = 1e4 the 1/2 sample is within 0.05 of Re mu = 1
        let ray = trace_ray(sl(1, 2), 1e4, 60, 1e-10).unwrap();
        assert!((ray.samples[0].mu.re - 1.0).abs() < 0.05);
    }

    #[test]
    fn ray_rejects_bad_inputs() {
        assert!(matches!(
            trace_ray(Slope::INFINITY, 100.0, 10, 1e-10),
            Err(Error::NoRay(_))
        ));
        assert!(matches!(
            trace_ray(sl(0, 1), 1.0, 10, 1e-10),
            Err(Error::TraceTooSmall(_))
        ));
        assert!(trace_ray(sl(0, 1), 100.0, 1, 1e-10).is_err());
    }

    #[test]
    fn ray_point_examples() {
        let mu = ray_point_at_trace(sl(0, 1), 3.0, 1e-10).unwrap();
        assert!((mu - Complex64::new(0.0, 3.0)).norm() < 1e-9);
        let t = 2.0 * 1f64.cosh();
        let mu = ray_point_at_trace(sl(1, 1), t, 1e-10).unwrap();
        assert!((mu - Complex64::new(2.0, t)).norm() < 1e-9);
        // continuity at the endpoint
        let mu = ray_point_at_trace(sl(1, 2), 2.0 + 1e-6, 1e-10).unwrap();
        assert!((mu - Complex64::new(1.0, SQRT3)).norm() < 1e-3);
        assert!(ray_point_at_trace(sl(1, 2), 2.0, 1e-10).is_err());
    }

    #[test]
    fn endpoint_matches_find_cusp() {
        for s in crate::farey::enumerate_slopes(5, 0.0, 1.0).unwrap() {
            let ray = trace_ray_with(s, &RayOptions::default()).unwrap();
            let cusp = find_cusp(s, 1e-10).unwrap();
            assert!(
                (ray.endpoint.mu - cusp.mu).norm() <= 1e-8,
                "slope {s}: ray {} vs cusp {}",
                ray.endpoint.mu,
                cusp.mu
            );
        }
    }

    #[test]
    fn csv_shape() {
        let ray = trace_ray(sl(1, 2), 100.0, 50, 1e-10).unwrap();
        let csv = ray.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 51); // header + 49 samples + cusp row
        assert!(lines[0].starts_with("slope,t,"));
        assert!(lines[50].starts_with("1/2,2,"));
    }
}
