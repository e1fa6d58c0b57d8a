//! Marked groups, canonical words and trace polynomials over the Farey tree.
//!
//! The marking fixes the generators
//!
//! ```text
//! A = [ -i*mu  -i ]        B = [ 1  2 ]
//!     [ -i      0 ]            [ 0  1 ]
//! ```
//!
//! so `tr A = -i*mu`, `B` is parabolic fixing infinity, and the commutator
//! trace is -2 (once-punctured torus relation). Words are assigned to slopes
//! by `W_{0/1} = A`, `W_{1/0} = B^-1` and the mediant rule
//! `W_{mediant(l,r)} = W_l W_r` (left parent first); on the reflected
//! (negative) side of the tree the root `-1/0` carries `B`. With this
//! orientation the cusp equation is `tr = +2` and the ray of slope `p/q` is
//! asymptotic to `Re mu = 2p/q`.
//!
//! Traces satisfy `tr W_m = tr W_l * tr W_r - tr W_d` over each Farey triple,
//! where `d` is the parents' difference slope. The recursion is run in two
//! forms: exactly on Gaussian-integer polynomials ([`trace_polynomial`]), and
//! numerically on value/derivative pairs ([`eval_trace`]); the latter is the
//! backend for all solving because polynomial evaluation in `f64` loses the
//! cusp-scale values to cancellation once q grows past ~20.

use crate::error::{Error, Result};
use crate::farey::{parents_signed, Slope};
use crate::gauss::{GaussInt, GaussPoly};
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;

/// Default cap on the degree of exact trace polynomials.
pub const DEFAULT_EXACT_CAP: i64 = 64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A Möbius transformation as an SL(2,C) matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Mobius {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Mobius {
        Mobius::new(1.0.into(), 0.0.into(), 0.0.into(), 1.0.into())
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse by the adjugate; exact for det = 1.
    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn mul(&self, rhs: &Mobius) -> Mobius {
        Mobius::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl std::ops::Mul for Mobius {
    type Output = Mobius;
    fn mul(self, rhs: Mobius) -> Mobius {
        Mobius::mul(&self, &rhs)
    }
}

/// The marked group at a given `mu`: the `mu`-dependent generator `A` and the
/// constant parabolic generator `B`.
#[derive(Clone, Copy, Debug)]
pub struct GroupMarking {
    pub mu: Complex64,
    pub a: Mobius,
    pub b: Mobius,
}

impl GroupMarking {
    pub fn commutator(&self) -> Mobius {
        self.a * self.b * self.a.inverse() * self.b.inverse()
    }
}

/// The fixed marking `A = [[-i mu, -i], [-i, 0]]`, `B = [[1, 2], [0, 1]]`.
pub fn generators(mu: Complex64) -> GroupMarking {
    GroupMarking {
        mu,
        a: Mobius::new(-I * mu, -I, -I, 0.0.into()),
        b: Mobius::new(1.0.into(), 2.0.into(), 0.0.into(), 1.0.into()),
    }
}

/// `tr(A B A^-1 B^-1)`; identically -2 in `mu`.
pub fn commutator_trace(mu: Complex64) -> Complex64 {
    generators(mu).commutator().trace()
}

/// Generator letters of the free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
    AInv,
    BInv,
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn matrix(&self, marking: &GroupMarking) -> Mobius {
        match self {
            Letter::A => marking.a,
            Letter::B => marking.b,
            Letter::AInv => marking.a.inverse(),
            Letter::BInv => marking.b.inverse(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::A => write!(f, "A"),
            Letter::B => write!(f, "B"),
            Letter::AInv => write!(f, "A^-1"),
            Letter::BInv => write!(f, "B^-1"),
        }
    }
}

/// A word in the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matrix(&self, mu: Complex64) -> Mobius {
        let marking = generators(mu);
        self.0
            .iter()
            .fold(Mobius::identity(), |m, l| m * l.matrix(&marking))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn word_signed(p: i64, q: i64, out: &mut Vec<Letter>) {
    match (p, q) {
        (1, 0) => out.push(Letter::BInv),
        (-1, 0) => out.push(Letter::B),
        (0, 1) => out.push(Letter::A),
        _ => {
            let (l, r) = parents_signed(p, q);
            word_signed(l.0, l.1, out);
            word_signed(r.0, r.1, out);
        }
    }
}

/// Canonical word of a slope; `q + |p|` letters.
pub fn word_for_slope(s: Slope) -> Word {
    let mut out = Vec::new();
    word_signed(s.p(), s.q(), &mut out);
    Word(out)
}

// The four base slopes of the trace recursion. 1/1 and -1/1 are bases because
// the difference of the root triple (0/1, 1/0) is -1/1, which would otherwise
// recurse onto itself.
#[derive(Clone, Copy, Debug)]
enum BaseTrace {
    Infinity, // tr = 2
    Zero,     // tr = -i mu
    One,      // tr = -i (mu - 2)
    NegOne,   // tr = -i (mu + 2)
}

fn base_for(p: i64, q: i64) -> Option<BaseTrace> {
    match (p, q) {
        (1, 0) | (-1, 0) => Some(BaseTrace::Infinity),
        (0, 1) => Some(BaseTrace::Zero),
        (1, 1) => Some(BaseTrace::One),
        (-1, 1) => Some(BaseTrace::NegOne),
        _ => None,
    }
}

fn canon_pair(p: i64, q: i64) -> (i64, i64) {
    let s = Slope::new(p, q).expect("nonzero pair");
    (s.p(), s.q())
}

/// Farey triple at a slope: canonical parents and their difference slope.
fn triple(p: i64, q: i64) -> ((i64, i64), (i64, i64), (i64, i64)) {
    let (l, r) = parents_signed(p, q);
    let d = canon_pair(r.0 - l.0, r.1 - l.1);
    (canon_pair(l.0, l.1), canon_pair(r.0, r.1), d)
}

/// Exact trace polynomial of a slope, built along the Stern-Brocot ancestry.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePolynomial {
    slope: Slope,
    poly: GaussPoly,
}

impl TracePolynomial {
    pub fn slope(&self) -> Slope {
        self.slope
    }

    pub fn poly(&self) -> &GaussPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Value and derivative at `mu` (f64 Horner; see module docs for limits).
    pub fn eval(&self, mu: Complex64) -> (Complex64, Complex64) {
        self.poly.eval(mu)
    }

    /// JSON export with exact integers as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope.to_string(),
            "coeffs": self.poly.coeff_strings(),
        })
    }
}

fn base_poly(base: BaseTrace) -> GaussPoly {
    let c = |r, i| GaussInt::new(r, i);
    match base {
        BaseTrace::Infinity => GaussPoly::from_coeffs(vec![c(2, 0)]),
        BaseTrace::Zero => GaussPoly::from_coeffs(vec![c(0, 0), c(0, -1)]),
        BaseTrace::One => GaussPoly::from_coeffs(vec![c(0, 2), c(0, -1)]),
        BaseTrace::NegOne => GaussPoly::from_coeffs(vec![c(0, -2), c(0, -1)]),
    }
}

fn poly_rec(p: i64, q: i64, memo: &mut HashMap<(i64, i64), GaussPoly>) -> GaussPoly {
    if let Some(hit) = memo.get(&(p, q)) {
        return hit.clone();
    }
    let out = if let Some(base) = base_for(p, q) {
        base_poly(base)
    } else {
        let (l, r, d) = triple(p, q);
        let pl = poly_rec(l.0, l.1, memo);
        let pr = poly_rec(r.0, r.1, memo);
        let pd = poly_rec(d.0, d.1, memo);
        pl.mul(&pr).sub(&pd)
    };
    memo.insert((p, q), out.clone());
    out
}

/// Exact trace polynomial with the default degree cap.
pub fn trace_polynomial(s: Slope) -> Result<TracePolynomial> {
    trace_polynomial_capped(s, DEFAULT_EXACT_CAP)
}

/// Exact trace polynomial, rejecting slopes with `q` above `cap`.
pub fn trace_polynomial_capped(s: Slope, cap: i64) -> Result<TracePolynomial> {
    if s.q() > cap {
        return Err(Error::ExactCap {
            slope: s,
            q: s.q(),
            cap,
        });
    }
    let mut memo = HashMap::new();
    let poly = poly_rec(s.p(), s.q(), &mut memo);
    Ok(TracePolynomial { slope: s, poly })
}

/// A compiled straight-line program evaluating `(tr W_s, d/dmu tr W_s)` at a
/// point by the trace recursion. Build once per slope, evaluate many times.
#[derive(Clone, Debug)]
pub struct TraceEvaluator {
    ops: Vec<EvalOp>,
}

#[derive(Clone, Copy, Debug)]
enum EvalOp {
    Base(BaseTrace),
    Combine { l: u32, r: u32, d: u32 },
}

impl TraceEvaluator {
    pub fn new(s: Slope) -> TraceEvaluator {
        let mut ops = Vec::new();
        let mut index = HashMap::new();
        Self::build(s.p(), s.q(), &mut ops, &mut index);
        TraceEvaluator { ops }
    }

    fn build(
        p: i64,
        q: i64,
        ops: &mut Vec<EvalOp>,
        index: &mut HashMap<(i64, i64), u32>,
    ) -> u32 {
        if let Some(&i) = index.get(&(p, q)) {
            return i;
        }
        let op = if let Some(base) = base_for(p, q) {
            EvalOp::Base(base)
        } else {
            let (l, r, d) = triple(p, q);
            let li = Self::build(l.0, l.1, ops, index);
            let ri = Self::build(r.0, r.1, ops, index);
            let di = Self::build(d.0, d.1, ops, index);
            EvalOp::Combine {
                l: li,
                r: ri,
                d: di,
            }
        };
        ops.push(op);
        let i = (ops.len() - 1) as u32;
        index.insert((p, q), i);
        i
    }

    /// `(value, derivative)` of the trace at `mu`.
    pub fn eval(&self, mu: Complex64) -> (Complex64, Complex64) {
        let mut vals: Vec<(Complex64, Complex64)> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let out = match *op {
                EvalOp::Base(BaseTrace::Infinity) => (Complex64::new(2.0, 0.0), 0.0.into()),
                EvalOp::Base(BaseTrace::Zero) => (-I * mu, -I),
                EvalOp::Base(BaseTrace::One) => (-I * (mu - 2.0), -I),
                EvalOp::Base(BaseTrace::NegOne) => (-I * (mu + 2.0), -I),
                EvalOp::Combine { l, r, d } => {
                    let (lv, ld) = vals[l as usize];
                    let (rv, rd) = vals[r as usize];
                    let (dv, dd) = vals[d as usize];
                    (lv * rv - dv, ld * rv + lv * rd - dd)
                }
            };
            vals.push(out);
        }
        *vals.last().expect("nonempty program")
    }
}

/// `(tr W_s(mu), d/dmu tr W_s(mu))` via the trace recursion.
pub fn eval_trace(s: Slope, mu: Complex64) -> (Complex64, Complex64) {
    TraceEvaluator::new(s).eval(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sl(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn random_mu(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
        Complex64::new(
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        )
    }

    #[test]
    fn generator_normalization() {
        let g = generators(Complex64::new(0.0, 2.0));
        // A at mu = 2i is [[2, -i], [-i, 0]]
        assert!((g.a.a - 2.0).norm() < 1e-15);
        assert!((g.a.b + I).norm() < 1e-15);
        assert!((g.a.c + I).norm() < 1e-15);
        assert!(g.a.d.norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = generators(random_mu(&mut rng, 10.0));
            assert!((g.a.det() - 1.0).norm() < 1e-15);
            assert!((g.b.det() - 1.0).norm() < 1e-15);
            assert!((g.b.trace() - 2.0).norm() == 0.0);
        }
    }

    #[test]
    fn commutator_is_minus_two() {
        for mu in [
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-3.0, 0.5),
        ] {
            assert!((commutator_trace(mu) + 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn word_examples() {
        use Letter::*;
        assert_eq!(word_for_slope(sl(0, 1)).0, vec![A]);
        assert_eq!(word_for_slope(Slope::INFINITY).0, vec![BInv]);
        assert_eq!(word_for_slope(sl(1, 1)).0, vec![A, BInv]);
        assert_eq!(word_for_slope(sl(1, 2)).0, vec![A, A, BInv]);
        assert_eq!(word_for_slope(sl(-1, 1)).0, vec![B, A]);
        assert_eq!(word_for_slope(sl(1, 2)).to_string(), "A A B^-1");
    }

    #[test]
    fn word_length_is_q_plus_p() {
        for (p, q) in [(0, 1), (1, 1), (1, 2), (3, 5), (-2, 5), (7, 3), (-8, 3)] {
            let s = sl(p, q);
            assert_eq!(
                word_for_slope(s).len() as i64,
                s.q() + s.p().abs(),
                "slope {s}"
            );
        }
    }

    #[test]
    fn polynomial_closed_forms() {
        let p01 = trace_polynomial(sl(0, 1)).unwrap();
        assert_eq!(p01.poly().coeff_strings(), vec![["0", "0"], ["0", "-1"]]);
        let p11 = trace_polynomial(sl(1, 1)).unwrap();
        assert_eq!(p11.poly().coeff_strings(), vec![["0", "2"], ["0", "-1"]]);
        let p12 = trace_polynomial(sl(1, 2)).unwrap();
        assert_eq!(
            p12.poly().coeff_strings(),
            vec![["-2", "0"], ["2", "0"], ["-1", "0"]]
        );
    }

    #[test]
    fn eval_trace_examples() {
        // tr W_{1/2} = 2 at mu = 1 + i sqrt(3)
        let (v, _) = eval_trace(sl(1, 2), Complex64::new(1.0, 3f64.sqrt()));
        assert!((v - 2.0).norm() < 1e-12);
        // constant word: tr = 2, derivative 0
        let (v, d) = eval_trace(Slope::INFINITY, Complex64::new(0.3, 1.2));
        assert!((v - 2.0).norm() == 0.0 && d.norm() == 0.0);
        // linear word at mu = 2i
        let (v, d) = eval_trace(sl(0, 1), Complex64::new(0.0, 2.0));
        assert!((v - 2.0).norm() < 1e-15);
        assert!((d + I).norm() < 1e-15);
    }

    #[test]
    fn polynomial_matches_word_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for s in crate::farey::enumerate_slopes(12, -2.0, 2.0).unwrap() {
            let poly = trace_polynomial(s).unwrap();
            assert_eq!(poly.degree() as i64, s.q());
            let lead = poly.poly().leading().unwrap();
            assert_eq!(lead.norm_sqr(), num_bigint::BigInt::from(1));
            let word = word_for_slope(s);
            for _ in 0..3 {
                let mu = random_mu(&mut rng, 10.0);
                let tm = word.matrix(mu).trace();
                let (tv, _) = poly.eval(mu);
                assert!(
                    (tm - tv).norm() <= 1e-9 * tm.norm().max(1.0),
                    "slope {s} at {mu}"
                );
            }
        }
    }

    #[test]
    fn evaluator_agrees_with_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for s in crate::farey::enumerate_slopes(12, 0.0, 1.0).unwrap() {
            let poly = trace_polynomial(s).unwrap();
            let ev = TraceEvaluator::new(s);
            for _ in 0..5 {
                let mu = random_mu(&mut rng, 10.0);
                let (pv, pd) = poly.eval(mu);
                let (ev_v, ev_d) = ev.eval(mu);
                assert!((pv - ev_v).norm() <= 1e-10 * pv.norm().max(1.0));
                assert!((pd - ev_d).norm() <= 1e-10 * pd.norm().max(1.0));
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let h = 1e-6;
        for s in [sl(1, 2), sl(3, 5), sl(2, 7), sl(-3, 4)] {
            let ev = TraceEvaluator::new(s);
            for _ in 0..5 {
                let mu = random_mu(&mut rng, 5.0);
                let (_, d) = ev.eval(mu);
                let (vp, _) = ev.eval(mu + h);
                let (vm, _) = ev.eval(mu - h);
                let fd = (vp - vm) / (2.0 * h);
                assert!((fd - d).norm() <= 1e-5 * d.norm().max(1.0), "slope {s}");
            }
        }
    }

    #[test]
    fn twist_symmetry_exact() {
        for s in crate::farey::enumerate_slopes(10, 0.0, 1.0).unwrap() {
            let twisted = trace_polynomial(s.twist(1)).unwrap();
            let shifted = trace_polynomial(s).unwrap().poly().shift(-2);
            assert_eq!(twisted.poly(), &shifted, "slope {s}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for s in crate::farey::enumerate_slopes(10, 0.0, 1.0).unwrap() {
            for _ in 0..5 {
                let mu = random_mu(&mut rng, 8.0);
                let (v, _) = eval_trace(s, mu);
                let (vn, _) = eval_trace(s.neg(), -mu.conj());
                assert!((vn - v.conj()).norm() <= 1e-10 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn trace_identity_over_farey_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mus: Vec<Complex64> = (0..200).map(|_| random_mu(&mut rng, 10.0)).collect();
        for s in crate::farey::enumerate_slopes(8, -1.0, 2.0).unwrap() {
            if s == Slope::ZERO {
                continue;
            }
            let (l, r, d) = triple(s.p(), s.q());
            let (es, el, er, ed) = (
                TraceEvaluator::new(s),
                TraceEvaluator::new(sl(l.0, l.1)),
                TraceEvaluator::new(sl(r.0, r.1)),
                TraceEvaluator::new(sl(d.0, d.1)),
            );
            for &mu in mus.iter().step_by(10) {
                let m = es.eval(mu).0;
                let rhs = el.eval(mu).0 * er.eval(mu).0 - ed.eval(mu).0;
                assert!((m - rhs).norm() <= 1e-10 * m.norm().max(1.0), "slope {s}");
            }
        }
    }

    #[test]
    fn exact_cap_is_enforced() {
        let s = sl(1, 65);
        assert!(matches!(
            trace_polynomial(s),
            Err(Error::ExactCap { q: 65, .. })
        ));
        assert!(trace_polynomial_capped(s, 65).is_ok());
    }

    #[test]
    fn polynomial_json_export() {
        let j = trace_polynomial(sl(1, 2)).unwrap().to_json();
        assert_eq!(j["slope"], "1/2");
        assert_eq!(j["coeffs"][0][0], "-2");
        assert_eq!(j["coeffs"][2][0], "-1");
    }
}
