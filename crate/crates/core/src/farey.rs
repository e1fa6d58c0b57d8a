//! Rational slopes and the Farey/Stern-Brocot machinery that indexes simple
//! closed curves on the once-punctured torus by `Q ∪ {∞}`.
//!
//! Everything here is exact integer arithmetic; no floating point enters the
//! slope representation.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// A slope `p/q` in lowest terms with `q >= 0`; the slope `∞` is the unique
/// value with `q = 0`, canonically `1/0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const ZERO: Slope = Slope { p: 0, q: 1 };
    pub const ONE: Slope = Slope { p: 1, q: 1 };
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };

    /// Canonicalize `p/q`: positive denominator, lowest terms, `1/0` for any
    /// infinite input. `0/0` is rejected.
    pub fn new(p: i64, q: i64) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::ParseSlope("0/0".into()));
        }
        if q == 0 {
            return Ok(Slope::INFINITY);
        }
        let (mut p, mut q) = (p, q);
        if q < 0 {
            p = -p;
            q = -q;
        }
        let g = gcd(p, q);
        Ok(Slope { p: p / g, q: q / g })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    /// Value as a float; `∞` maps to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        if self.q == 0 {
            f64::INFINITY
        } else {
            self.p as f64 / self.q as f64
        }
    }

    /// Reflection `p/q ↦ -p/q`; fixes `0/1` and `1/0`.
    pub fn neg(&self) -> Slope {
        if self.q == 0 {
            *self
        } else {
            Slope {
                p: -self.p,
                q: self.q,
            }
        }
    }

    /// Twist `p/q ↦ (p + kq)/q`.
    pub fn twist(&self, k: i64) -> Slope {
        Slope {
            p: self.p + k * self.q,
            q: self.q,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let bad = || Error::ParseSlope(s.to_string());
        match s.split_once('/') {
            Some((ps, qs)) => {
                let p: i64 = ps.trim().parse().map_err(|_| bad())?;
                let q: i64 = qs.trim().parse().map_err(|_| bad())?;
                Slope::new(p, q).map_err(|_| bad())
            }
            None => {
                let p: i64 = s.trim().parse().map_err(|_| bad())?;
                Slope::new(p, 1)
            }
        }
    }
}

// Total order by rational value; `∞` sorts above every finite slope.
impl Ord for Slope {
    fn cmp(&self, other: &Slope) -> Ordering {
        let lhs = self.p as i128 * other.q as i128;
        let rhs = other.p as i128 * self.q as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Slope) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Geometric intersection number `|p s' - q p'|` of the curves indexed by two
/// slopes; zero iff the slopes coincide.
pub fn intersection_number(s: Slope, t: Slope) -> u64 {
    (s.p as i128 * t.q as i128 - s.q as i128 * t.p as i128).unsigned_abs() as u64
}

/// Signed parent pairs in the Stern-Brocot tree, without canonicalization.
///
/// The right parent of a positive integer slope is `(1, 0)` and the left
/// parent of a negative integer slope is `(-1, 0)`, so that the mediant
/// identity `p = l.0 + r.0, q = l.1 + r.1` holds componentwise on the raw
/// pairs. Negative slopes are the reflection of the positive tree.
pub(crate) fn parents_signed(p: i64, q: i64) -> ((i64, i64), (i64, i64)) {
    debug_assert!(q >= 1 && (p, q) != (0, 1));
    if q == 1 {
        return if p >= 1 {
            ((p - 1, 1), (1, 0))
        } else {
            ((-1, 0), (p + 1, 1))
        };
    }
    if p > 0 {
        // Stern-Brocot descent from (0/1, 1/0) to p/q.
        let (mut l, mut r) = ((0i64, 1i64), (1i64, 0i64));
        let mut m = (1i64, 1i64);
        while m != (p, q) {
            if p * m.1 - q * m.0 < 0 {
                r = m;
            } else {
                l = m;
            }
            m = (l.0 + r.0, l.1 + r.1);
        }
        (l, r)
    } else {
        let (l, r) = parents_signed(-p, q);
        ((-r.0, r.1), (-l.0, l.1))
    }
}

/// Farey parents `(l, r)` with `l < s < r`, `intersection_number(l, r) = 1`
/// and `s` their mediant. The roots `0/1` and `1/0` have no parents.
pub fn farey_parents(s: Slope) -> Result<(Slope, Slope)> {
    if s == Slope::ZERO || s == Slope::INFINITY {
        return Err(Error::NoParents(s));
    }
    let (l, r) = parents_signed(s.p, s.q);
    Ok((Slope::new(l.0, l.1)?, Slope::new(r.0, r.1)?))
}

/// A canonical simple continued fraction `[a0; a1, ..., an]` with positive
/// partial quotients after `a0` and the last quotient `>= 2` unless `n = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<i64>,
}

impl ContinuedFraction {
    pub fn quotients(&self) -> &[i64] {
        &self.quotients
    }

    /// Exact value of the continued fraction as a slope.
    pub fn value(&self) -> Slope {
        *self.convergents().last().expect("nonempty expansion")
    }

    /// Convergents `h_k/k_k` in order; the last one is the value itself.
    pub fn convergents(&self) -> Vec<Slope> {
        convergents_of_quotients(&self.quotients)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.quotients[0])?;
        for (i, a) in self.quotients[1..].iter().enumerate() {
            write!(f, "{}{}", if i == 0 { ";" } else { "," }, a)?;
        }
        write!(f, "]")
    }
}

fn convergents_of_quotients(quotients: &[i64]) -> Vec<Slope> {
    let mut out = Vec::with_capacity(quotients.len());
    let (mut h0, mut k0) = (1i64, 0i64); // h_{-1}/k_{-1}
    let (mut h1, mut k1) = (quotients[0], 1i64);
    out.push(Slope { p: h1, q: k1 });
    for &a in &quotients[1..] {
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        (h0, k0) = (h1, k1);
        (h1, k1) = (h2, k2);
        out.push(Slope { p: h1, q: k1 });
    }
    out
}

/// Euclidean continued-fraction expansion of a finite slope.
pub fn continued_fraction(s: Slope) -> Result<ContinuedFraction> {
    if s.is_infinity() {
        return Err(Error::Param("slope 1/0 has no continued fraction".into()));
    }
    let mut quotients = Vec::new();
    let (mut num, mut den) = (s.p, s.q);
    loop {
        let a = num.div_euclid(den);
        quotients.push(a);
        let r = num - a * den;
        if r == 0 {
            break;
        }
        (num, den) = (den, r);
    }
    // Euclid with floor division always ends with a quotient >= 2 when n >= 1.
    debug_assert!(quotients.len() == 1 || *quotients.last().unwrap() >= 2);
    Ok(ContinuedFraction { quotients })
}

/// Convergents of a real number to the requested depth (number of
/// convergents). Terminates early if the expansion becomes exact.
pub fn convergents_of_real(x: f64, depth: usize) -> Result<Vec<Slope>> {
    if depth == 0 {
        return Err(Error::DepthBound { min: 1, got: 0 });
    }
    if !x.is_finite() {
        return Err(Error::Param(format!("not a finite real: {x}")));
    }
    let mut quotients = Vec::with_capacity(depth);
    let mut rem = x;
    for _ in 0..depth {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break; // the tail no longer carries f64 information
        }
        quotients.push(a as i64);
        let frac = rem - a;
        if frac < 1e-12 {
            break;
        }
        rem = 1.0 / frac;
    }
    Ok(convergents_of_quotients(&quotients))
}

/// Farey sequence of order `q_max` on `[0, 1]` as raw `(p, q)` pairs.
fn farey_unit(q_max: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, q_max);
    while (a, b) != (1, 1) {
        out.push((c, d));
        let k = (q_max + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    out
}

/// All canonical slopes with `1 <= q <= q_max` whose value lies in
/// `[lo, hi]`, in increasing order.
pub fn enumerate_slopes(q_max: i64, lo: f64, hi: f64) -> Result<Vec<Slope>> {
    if q_max < 1 {
        return Err(Error::Param(format!("q_max must be >= 1, got {q_max}")));
    }
    if !(lo <= hi) {
        return Err(Error::EmptyRange { lo, hi });
    }
    let unit = farey_unit(q_max);
    let mut out = Vec::new();
    let n0 = lo.floor() as i64;
    let n1 = hi.ceil() as i64;
    for n in n0..n1.max(n0 + 1) {
        // window [n, n+1]; skip the left endpoint except in the first window
        for (i, &(p, q)) in unit.iter().enumerate() {
            if n > n0 && i == 0 {
                continue;
            }
            let (sp, sq) = (p + n * q, q);
            let v = sp as f64 / sq as f64;
            if v >= lo && v <= hi {
                out.push(Slope { p: sp, q: sq });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(sl(2, 4), sl(1, 2));
        assert_eq!(sl(-2, 4), sl(1, -2));
        assert_eq!(sl(3, 0), Slope::INFINITY);
        assert_eq!(sl(-3, 0), Slope::INFINITY);
        assert!(Slope::new(0, 0).is_err());
        assert_eq!(sl(-1, 2).to_string(), "-1/2");
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        for text in ["1/2", "1/0", "-2/3", "7/5"] {
            let s: Slope = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert_eq!("3".parse::<Slope>().unwrap(), sl(3, 1));
        assert!("a/b".parse::<Slope>().is_err());
        assert!("0/0".parse::<Slope>().is_err());
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(sl(1, 2), Slope::INFINITY), 2);
        assert_eq!(intersection_number(sl(0, 1), Slope::INFINITY), 1);
        assert_eq!(intersection_number(sl(2, 5), sl(1, 3)), 1);
        assert_eq!(intersection_number(sl(2, 5), sl(2, 5)), 0);
    }

    #[test]
    fn parent_examples() {
        assert_eq!(farey_parents(sl(1, 2)).unwrap(), (sl(0, 1), sl(1, 1)));
        assert_eq!(farey_parents(sl(3, 5)).unwrap(), (sl(1, 2), sl(2, 3)));
        assert_eq!(farey_parents(sl(1, 1)).unwrap(), (sl(0, 1), Slope::INFINITY));
        assert!(farey_parents(Slope::ZERO).is_err());
        assert!(farey_parents(Slope::INFINITY).is_err());
    }

    #[test]
    fn negative_parents_reflect() {
        // parents of -1/2 are the reflected, swapped parents of 1/2
        let (l, r) = farey_parents(sl(-1, 2)).unwrap();
        assert_eq!((l, r), (sl(-1, 1), sl(0, 1)));
        // signed mediant identity, including the -1/0 representative
        let (l, r) = parents_signed(-2, 1);
        assert_eq!(l, (-1, 0));
        assert_eq!(r, (-1, 1));
        assert_eq!((l.0 + r.0, l.1 + r.1), (-2, 1));
    }

    #[test]
    fn continued_fraction_examples() {
        let cf = continued_fraction(sl(3, 5)).unwrap();
        assert_eq!(cf.quotients(), &[0, 1, 1, 2]);
        assert_eq!(
            cf.convergents(),
            vec![sl(0, 1), sl(1, 1), sl(1, 2), sl(3, 5)]
        );
        let cf = continued_fraction(sl(0, 1)).unwrap();
        assert_eq!(cf.quotients(), &[0]);
        assert_eq!(cf.convergents(), vec![sl(0, 1)]);
        let cf = continued_fraction(sl(-3, 5)).unwrap();
        assert_eq!(cf.value(), sl(-3, 5));
        assert!(continued_fraction(Slope::INFINITY).is_err());
    }

    #[test]
    fn golden_mean_convergents() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let conv = convergents_of_real(phi, 6).unwrap();
        assert_eq!(
            conv,
            vec![sl(1, 1), sl(2, 1), sl(3, 2), sl(5, 3), sl(8, 5), sl(13, 8)]
        );
        assert!(convergents_of_real(phi, 0).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let f = |q, lo, hi| {
            enumerate_slopes(q, lo, hi)
                .unwrap()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(f(2, 0.0, 1.0), ["0/1", "1/2", "1/1"]);
        assert_eq!(f(3, 0.0, 1.0), ["0/1", "1/3", "1/2", "2/3", "1/1"]);
        assert_eq!(f(1, 0.0, 2.0), ["0/1", "1/1", "2/1"]);
        assert!(enumerate_slopes(2, 1.0, 0.0).is_err());
        assert!(enumerate_slopes(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn enumerate_matches_brute_force() {
        for q_max in [1, 2, 5, 12, 20] {
            for (lo, hi) in [(0.0, 1.0), (0.0, 2.0), (-1.5, 0.75)] {
                let fast = enumerate_slopes(q_max, lo, hi).unwrap();
                let mut brute = Vec::new();
                for q in 1..=q_max {
                    for p in (lo * q as f64).floor() as i64 - 1..=(hi * q as f64).ceil() as i64 + 1
                    {
                        let v = p as f64 / q as f64;
                        if gcd(p, q) == 1 && v >= lo && v <= hi {
                            brute.push(sl(p, q));
                        }
                    }
                }
                brute.sort();
                brute.dedup();
                assert_eq!(fast, brute, "q_max={q_max} range=[{lo},{hi}]");
                assert!(fast.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    proptest! {
        #[test]
        fn prop_parents_mediant(p in -400i64..400, q in 1i64..400) {
            let s = sl(p, q);
            prop_assume!(s != Slope::ZERO && !s.is_infinity());
            let (l, r) = farey_parents(s).unwrap();
            prop_assert!(l < s && s < r);
            prop_assert_eq!(intersection_number(l, r), 1);
            // componentwise mediant identity on the signed representatives
            let (ls, rs) = parents_signed(s.p(), s.q());
            prop_assert_eq!((ls.0 + rs.0, ls.1 + rs.1), (s.p(), s.q()));
        }

        #[test]
        fn prop_cf_convergents(p in -400i64..400, q in 1i64..400) {
            let s = sl(p, q);
            let conv = continued_fraction(s).unwrap().convergents();
            prop_assert_eq!(*conv.last().unwrap(), s);
            for w in conv.windows(2) {
                prop_assert_eq!(intersection_number(w[0], w[1]), 1);
            }
        }

        #[test]
        fn prop_display_parse_roundtrip(p in -1000i64..1000, q in 0i64..1000) {
            prop_assume!(p != 0 || q != 0);
            let s = sl(p, q);
            let back: Slope = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
