//! Error type shared across the crate.

use crate::farey::Slope;
use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("cannot parse slope from `{0}`: expected `p/q` with coprime integers")]
    ParseSlope(String),
    #[error("cannot parse complex number from `{0}`: expected `a+bi` with no spaces")]
    ParseComplex(String),
    #[error("slope {0} is a root of the Stern-Brocot tree and has no parents")]
    NoParents(Slope),
    #[error("slope 1/0 has constant trace 2; no cusp")]
    NoCusp,
    #[error("slope {0} does not index a pleating ray (needs q >= 1)")]
    NoRay(Slope),
    #[error("empty range [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("depth must be at least {min}, got {got}")]
    DepthBound { min: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("exact trace polynomial for {slope} has degree {q}, above the cap {cap}")]
    ExactCap { slope: Slope, q: i64, cap: i64 },
    #[error("trace derivative {deriv:.3e} below 1e-14 at mu = {mu} (singular Newton step)")]
    SingularDerivative { mu: Complex64, deriv: f64 },
    #[error("Newton did not converge in {max_iter} iterations (mu = {mu}, residual {residual:.3e})")]
    NoConvergence {
        mu: Complex64,
        residual: f64,
        max_iter: u32,
    },
    #[error("Newton iterate escaped |mu| > {bound:.3} (mu = {mu})")]
    Escaped { mu: Complex64, bound: f64 },
    #[error("continuation for {slope} stalled near t = {t:.6} after {retries} retries (last good mu = {mu})")]
    ContinuationFailed {
        slope: Slope,
        t: f64,
        retries: u32,
        mu: Complex64,
    },
    #[error("cusp search for {slope} failed: {detail}")]
    CuspSearchFailed { slope: Slope, detail: String },
    #[error("trace {t} lies on the arccosh branch slit [-2, 2)")]
    BranchSlit { t: Complex64 },
    #[error("trace must exceed 2, got {0}")]
    TraceTooSmall(f64),
    #[error("pleating length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("mu = {0} not localized between rays")]
    NotLocalized(Complex64),
    #[error("matrix is +/-identity; fixed points are undefined")]
    IdentityMatrix,
    #[error("empty sample")]
    EmptySample,
}

impl Error {
    /// True for errors caused by malformed input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::ParseSlope(_)
                | Error::ParseComplex(_)
                | Error::NoCusp
                | Error::NoRay(_)
                | Error::EmptyRange { .. }
                | Error::DepthBound { .. }
                | Error::Param(_)
        )
    }
}
