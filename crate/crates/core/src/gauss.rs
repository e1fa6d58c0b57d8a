//! Arbitrary-precision Gaussian integers and dense polynomials over them.
//!
//! Trace polynomials have coefficients in `Z[i]` whose magnitudes grow like
//! `e^{Kq}`, so coefficients are `BigInt` pairs and all ring operations are
//! exact. Floating-point only appears in [`GaussPoly::eval`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// A Gaussian integer `re + im*i` with arbitrary-precision parts.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: i64, im: i64) -> GaussInt {
        GaussInt {
            re: BigInt::from(re),
            im: BigInt::from(im),
        }
    }

    pub fn zero() -> GaussInt {
        GaussInt::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Exact norm `re^2 + im^2`.
    pub fn norm_sqr(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::INFINITY),
            self.im.to_f64().unwrap_or(f64::INFINITY),
        )
    }

    fn add(&self, other: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    fn sub(&self, other: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    fn mul(&self, other: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn scale(&self, k: &BigInt) -> GaussInt {
        GaussInt {
            re: &self.re * k,
            im: &self.im * k,
        }
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Dense polynomial over `Z[i]`, constant term first, trailing zeros trimmed.
/// The empty coefficient list is the zero polynomial.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GaussPoly {
    coeffs: Vec<GaussInt>,
}

impl GaussPoly {
    pub fn from_coeffs(mut coeffs: Vec<GaussInt>) -> GaussPoly {
        while coeffs.last().is_some_and(GaussInt::is_zero) {
            coeffs.pop();
        }
        GaussPoly { coeffs }
    }

    pub fn constant(c: GaussInt) -> GaussPoly {
        GaussPoly::from_coeffs(vec![c])
    }

    pub fn coeffs(&self) -> &[GaussInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussInt> {
        self.coeffs.last()
    }

    pub fn mul(&self, other: &GaussPoly) -> GaussPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return GaussPoly::default();
        }
        let mut out = vec![GaussInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        GaussPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &GaussPoly) -> GaussPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = GaussInt::zero();
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a.sub(b)
            })
            .collect();
        GaussPoly::from_coeffs(out)
    }

    /// Exact formal derivative.
    pub fn derivative(&self) -> GaussPoly {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&BigInt::from(k)))
            .collect();
        GaussPoly::from_coeffs(out)
    }

    /// Exact composition with `x ↦ x + k` (Taylor shift by an integer).
    pub fn shift(&self, k: i64) -> GaussPoly {
        // Horner over the polynomial ring: P(x+k) = (...((c_n)(x+k) + c_{n-1})(x+k) + ...)
        let k = BigInt::from(k);
        let mut acc: Vec<GaussInt> = Vec::new();
        for c in self.coeffs.iter().rev() {
            // acc = acc*(x+k) + c
            let mut next = vec![GaussInt::zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i + 1] = next[i + 1].add(a);
                next[i] = next[i].add(&a.scale(&k));
            }
            if next.is_empty() {
                next.push(GaussInt::zero());
            }
            next[0] = next[0].add(c);
            acc = next;
        }
        GaussPoly::from_coeffs(acc)
    }

    /// Value and derivative at `mu` by a joint Horner pass in `f64`.
    ///
    /// Accurate only while the coefficient magnitudes stay modest relative to
    /// the value; see `traces::eval_trace` for the numerically stable route.
    pub fn eval(&self, mu: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            d = d * mu + v;
            v = v * mu + c.to_complex();
        }
        (v, d)
    }

    /// Coefficients as decimal-string pairs `[re, im]`, constant term first.
    pub fn coeff_strings(&self) -> Vec<[String; 2]> {
        self.coeffs
            .iter()
            .map(|c| [c.re.to_string(), c.im.to_string()])
            .collect()
    }
}
