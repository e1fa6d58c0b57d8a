//! Limit-set point clouds by depth-first enumeration of reduced words.
//!
//! Seeds are the fixed points of the generators and of the commutator; each
//! reduced word's matrix is applied to the seeds, and a branch stops once its
//! seed images have collapsed below the pruning diameter. Output order is the
//! DFS order with the fixed letter order `A, B, A^-1, B^-1`, so identical
//! inputs give identical point lists.

use crate::error::{Error, Result};
use crate::numfmt::g9;
use crate::svg::{Rect, SvgCanvas};
use crate::traces::{generators, Letter, Mobius};
use num_complex::Complex64;

/// A point on the Riemann sphere; infinity is an explicit tag, never a
/// large-magnitude sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }
}

/// Apply a Möbius matrix to a sphere point.
pub fn apply(m: &Mobius, p: SpherePoint) -> SpherePoint {
    match p {
        SpherePoint::Infinity => {
            if m.c.norm() == 0.0 {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite(m.a / m.c)
            }
        }
        SpherePoint::Finite(z) => {
            let den = m.c * z + m.d;
            if den.norm() < 1e-280 {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite((m.a * z + m.b) / den)
            }
        }
    }
}

/// Conjugacy type of an SL(2,C) element read off its trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobiusClass {
    Parabolic,
    Loxodromic,
    Elliptic,
}

/// Fixed points with their type tag.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub class: MobiusClass,
    pub points: Vec<SpherePoint>,
}

/// Fixed points of `m` as roots of `c z^2 + (d - a) z - b = 0`; parabolic
/// (tr^2 = 4 within 1e-10) elements get a single point.
pub fn fixed_points(m: &Mobius) -> Result<FixedPoints> {
    let tr = m.trace();
    let off = m.b.norm() + m.c.norm() + (m.a - m.d).norm();
    if off < 1e-14 {
        return Err(Error::IdentityMatrix);
    }
    let disc = tr * tr - 4.0; // det = 1
    let class = if disc.norm() <= 1e-10 {
        MobiusClass::Parabolic
    } else if tr.im.abs() <= 1e-10 && tr.re.abs() < 2.0 {
        MobiusClass::Elliptic
    } else {
        MobiusClass::Loxodromic
    };
    let points = if m.c.norm() == 0.0 {
        // z -> (a z + b)/d fixes infinity; a second finite point unless parabolic
        let mut pts = vec![SpherePoint::Infinity];
        if class != MobiusClass::Parabolic {
            pts.push(SpherePoint::Finite(m.b / (m.d - m.a)));
        }
        pts
    } else if class == MobiusClass::Parabolic {
        vec![SpherePoint::Finite((m.a - m.d) / (2.0 * m.c))]
    } else {
        let root = disc.sqrt();
        vec![
            SpherePoint::Finite((m.a - m.d + root) / (2.0 * m.c)),
            SpherePoint::Finite((m.a - m.d - root) / (2.0 * m.c)),
        ]
    };
    Ok(FixedPoints { class, points })
}

/// Tuning knobs for the DFS.
#[derive(Clone, Copy, Debug)]
pub struct LimitSetOptions {
    pub max_depth: usize,
    pub prune_eps: f64,
    pub max_points: usize,
}

impl Default for LimitSetOptions {
    fn default() -> Self {
        LimitSetOptions {
            max_depth: 14,
            prune_eps: 1e-3,
            max_points: 2_000_000,
        }
    }
}

/// A sampled limit set.
#[derive(Clone, Debug)]
pub struct LimitSample {
    pub mu: Complex64,
    pub points: Vec<Complex64>,
    pub depth_reached: usize,
    pub seed_description: String,
    pub truncated: bool,
    /// Images that landed at infinity and were dropped from `points`.
    pub dropped_at_infinity: usize,
}

impl LimitSample {
    /// CSV with one `re,im` pair per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", g9(p.re), g9(p.im)));
        }
        out
    }
}

const DFS_ORDER: [Letter; 4] = [Letter::A, Letter::B, Letter::AInv, Letter::BInv];

fn diameter(points: &[SpherePoint]) -> Option<f64> {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        let zi = points[i].finite()?;
        for pj in &points[i + 1..] {
            let zj = pj.finite()?;
            d = d.max((zi - zj).norm());
        }
    }
    Some(d)
}

/// Depth-first limit-set sampling with the default point budget.
pub fn limit_points(mu: Complex64, max_depth: usize, prune_eps: f64) -> Result<LimitSample> {
    limit_points_with(
        mu,
        &LimitSetOptions {
            max_depth,
            prune_eps,
            ..Default::default()
        },
    )
}

pub fn limit_points_with(mu: Complex64, opts: &LimitSetOptions) -> Result<LimitSample> {
    if opts.max_depth < 1 {
        return Err(Error::Param("max_depth must be >= 1".into()));
    }
    if !(opts.prune_eps > 0.0) {
        return Err(Error::Param(format!(
            "prune_eps must be positive, got {}",
            opts.prune_eps
        )));
    }
    let marking = generators(mu);
    let mats: [Mobius; 4] = [
        marking.a,
        marking.b,
        marking.a.inverse(),
        marking.b.inverse(),
    ];
    let mut seeds = Vec::new();
    for m in [marking.a, marking.b, marking.commutator()] {
        seeds.extend(fixed_points(&m)?.points);
    }
    let seed_description = "fixed points of A, B and the commutator [A,B]".to_string();

    let mut sample = LimitSample {
        mu,
        points: Vec::new(),
        depth_reached: 0,
        seed_description,
        truncated: false,
        dropped_at_infinity: 0,
    };

    // stack of (word matrix, index of last letter, depth)
    let mut stack: Vec<(Mobius, usize, usize)> = Vec::new();
    for i in (0..4).rev() {
        stack.push((mats[i], i, 1));
    }
    'dfs: while let Some((m, last, depth)) = stack.pop() {
        let images: Vec<SpherePoint> = seeds.iter().map(|&s| apply(&m, s)).collect();
        let converged = diameter(&images).is_some_and(|d| d < opts.prune_eps);
        if converged || depth == opts.max_depth {
            sample.depth_reached = sample.depth_reached.max(depth);
            for img in images {
                match img {
                    SpherePoint::Finite(z) => {
                        if sample.points.len() >= opts.max_points {
                            sample.truncated = true;
                            break 'dfs;
                        }
                        sample.points.push(z);
                    }
                    SpherePoint::Infinity => sample.dropped_at_infinity += 1,
                }
            }
            continue;
        }
        // extend by every letter except the inverse of the last, in reverse
        // so pop order follows DFS_ORDER
        let banned = DFS_ORDER[last].inverse();
        for i in (0..4).rev() {
            if DFS_ORDER[i] == banned {
                continue;
            }
            stack.push((m.mul(&mats[i]), i, depth + 1));
        }
    }
    Ok(sample)
}

/// Directed Hausdorff distance `sup_a inf_b |a - b|` (brute force).
pub fn hausdorff_directed(from: &[Complex64], to: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for a in from {
        let mut best = f64::INFINITY;
        for b in to {
            best = best.min((a - b).norm());
            if best == 0.0 {
                break;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Rendering style for limit-set SVGs.
#[derive(Clone, Debug)]
pub struct RenderStyle {
    pub px_width: f64,
    pub point_radius: f64,
    pub color: String,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            px_width: 900.0,
            point_radius: 0.7,
            color: "#1a1a60".to_string(),
        }
    }
}

/// Deterministic SVG of the sample; points outside the viewport are clipped.
pub fn render_points(sample: &LimitSample, viewport: Rect, style: &RenderStyle) -> Result<String> {
    if sample.points.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut canvas = SvgCanvas::new(viewport, style.px_width);
    canvas.comment(&format!(
        "limit set at mu = {}, {} points, depth {}",
        sample.mu,
        sample.points.len(),
        sample.depth_reached
    ));
    if sample.dropped_at_infinity > 0 {
        canvas.comment(&format!(
            "warning: {} images at infinity omitted",
            sample.dropped_at_infinity
        ));
    }
    if sample.truncated {
        canvas.comment("warning: sample truncated at the point budget");
    }
    canvas.axes();
    for p in &sample.points {
        canvas.dot(p.re, p.im, style.point_radius, &style.color);
    }
    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::Slope;
    use crate::solver::find_cusp;
    use crate::traces::word_for_slope;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn fixed_points_of_b_is_infinity() {
        let b = generators(Complex64::new(0.3, 1.7)).b;
        let fp = fixed_points(&b).unwrap();
        assert_eq!(fp.class, MobiusClass::Parabolic);
        assert_eq!(fp.points, vec![SpherePoint::Infinity]);
    }

    #[test]
    fn fixed_points_of_a_at_cusp_and_off() {
        // mu = 2i is the 0/1 cusp: A is parabolic with the double root i
        let a = generators(Complex64::new(0.0, 2.0)).a;
        let fp = fixed_points(&a).unwrap();
        assert_eq!(fp.class, MobiusClass::Parabolic);
        assert_eq!(fp.points.len(), 1);
        let z = fp.points[0].finite().unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        // mu = 4i: loxodromic with fixed points i(2 +/- sqrt 3)
        let a = generators(Complex64::new(0.0, 4.0)).a;
        let fp = fixed_points(&a).unwrap();
        assert_eq!(fp.class, MobiusClass::Loxodromic);
        let mut ys: Vec<f64> = fp
            .points
            .iter()
            .map(|p| p.finite().unwrap().im)
            .collect();
        ys.sort_by(f64::total_cmp);
        assert!((ys[0] - (2.0 - SQRT3)).abs() < 1e-12);
        assert!((ys[1] - (2.0 + SQRT3)).abs() < 1e-12);
        // each claimed point actually satisfies m(z) = z
        for p in &fp.points {
            let z = p.finite().unwrap();
            let img = apply(&a, SpherePoint::Finite(z)).finite().unwrap();
            assert!((img - z).norm() < 1e-12);
        }
    }

    #[test]
    fn commutator_is_parabolic_everywhere() {
        for mu in [
            Complex64::new(0.7, 2.1),
            Complex64::new(-1.3, 1.4),
            Complex64::new(2.0, 3.0),
        ] {
            let k = generators(mu).commutator();
            let fp = fixed_points(&k).unwrap();
            assert_eq!(fp.class, MobiusClass::Parabolic);
            assert_eq!(fp.points.len(), 1);
        }
    }

    #[test]
    fn identity_is_rejected() {
        assert!(matches!(
            fixed_points(&Mobius::identity()),
            Err(Error::IdentityMatrix)
        ));
    }

    #[test]
    fn depth_one_is_generator_applied_seeds() {
        let mu = Complex64::new(0.0, 4.0);
        let sample = limit_points(mu, 1, 1e-3).unwrap();
        let marking = generators(mu);
        let mats = [
            marking.a,
            marking.b,
            marking.a.inverse(),
            marking.b.inverse(),
        ];
        let mut seeds = Vec::new();
        for m in [marking.a, marking.b, marking.commutator()] {
            seeds.extend(fixed_points(&m).unwrap().points);
        }
        let mut expected = Vec::new();
        for m in &mats {
            for &s in &seeds {
                if let SpherePoint::Finite(z) = apply(m, s) {
                    expected.push(z);
                }
            }
        }
        assert_eq!(sample.points.len(), expected.len());
        assert!(sample.points.len() <= 4 * seeds.len());
        for (a, b) in sample.points.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn determinism_and_translation_invariance() {
        let mu = Complex64::new(0.0, 4.0);
        let s1 = limit_points(mu, 9, 1e-2).unwrap();
        let s2 = limit_points(mu, 9, 1e-2).unwrap();
        assert_eq!(s1.points.len(), s2.points.len());
        assert!(s1
            .points
            .iter()
            .zip(&s2.points)
            .all(|(a, b)| a == b));
        // B acts as z + 2: the sample is close to its own translate
        let translated: Vec<Complex64> = s1.points.iter().map(|z| z + 2.0).collect();
        let d = hausdorff_directed(&translated[..500.min(translated.len())], &s1.points);
        assert!(d < 3.0 * 1e-2 + 0.15, "translation defect {d}");
    }

    #[test]
    fn parabolic_dynamics_at_cusp() {
        let cusp = find_cusp(Slope::new(1, 2).unwrap(), 1e-12).unwrap();
        let w = word_for_slope(Slope::new(1, 2).unwrap()).matrix(cusp.mu);
        assert!((w.trace() - 2.0).norm() <= 1e-8);
        let fp = fixed_points(&w).unwrap();
        assert_eq!(fp.class, MobiusClass::Parabolic);
        let z0 = fp.points[0].finite().unwrap();
        let z = z0 + 0.1;
        let mut powers = vec![w];
        powers.push(w.mul(&w));
        powers.push(powers[1].mul(&powers[1]));
        let d: Vec<f64> = powers
            .iter()
            .map(|m| {
                (apply(m, SpherePoint::Finite(z)).finite().unwrap() - z0).norm()
            })
            .collect();
        // parabolic: distance to the fixed point decays like 1/k, so the
        // ratios d1/d2 and d2/d4 sit near 2, far from exponential decay
        let r1 = d[0] / d[1];
        let r2 = d[1] / d[2];
        assert!((1.2..3.2).contains(&r1), "d {d:?}");
        assert!((1.2..3.2).contains(&r2), "d {d:?}");
    }

    #[test]
    fn render_is_deterministic_and_clips() {
        let sample = limit_points(Complex64::new(0.0, 4.0), 6, 1e-2).unwrap();
        let style = RenderStyle::default();
        let rect = Rect::new(-2.0, 4.0, -1.0, 3.0);
        let a = render_points(&sample, rect, &style).unwrap();
        let b = render_points(&sample, rect, &style).unwrap();
        assert_eq!(a, b);
        let empty = LimitSample {
            mu: Complex64::new(0.0, 4.0),
            points: vec![],
            depth_reached: 0,
            seed_description: String::new(),
            truncated: false,
            dropped_at_infinity: 0,
        };
        assert!(matches!(
            render_points(&empty, rect, &style),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn point_budget_truncates() {
        let sample = limit_points_with(
            Complex64::new(0.0, 4.0),
            &LimitSetOptions {
                max_depth: 12,
                prune_eps: 1e-4,
                max_points: 200,
            },
        )
        .unwrap();
        assert!(sample.truncated);
        assert_eq!(sample.points.len(), 200);
    }
}
