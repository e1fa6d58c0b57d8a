//! Pleating coordinates for the Maskit slice of the once-punctured torus.
//!
//! The slice is parametrized by `mu` in the upper half plane; each `mu` gives a
//! marked two-generator group whose trace polynomials `tr W_{p/q}(mu)` are
//! indexed by rational slopes. This crate provides:
//!
//! - [`farey`]: exact slope arithmetic (Stern-Brocot parents, continued
//!   fractions, Farey enumeration);
//! - [`traces`]: canonical words, exact Gaussian-integer trace polynomials and
//!   fast trace evaluation via the trace-identity recursion;
//! - [`solver`]: Newton cusp finding and pleating-ray continuation in the
//!   trace parameter;
//! - [`pleatmap`]: pleating length, the `L` family with branch tracking, the
//!   coordinate map in both directions and coordinate-grid assembly;
//! - [`limitset`]: limit-set point clouds by depth-first word enumeration and
//!   deterministic SVG rendering.

pub mod error;
pub mod farey;
pub mod gauss;
pub mod limitset;
pub mod numfmt;
pub mod pleatmap;
pub mod solver;
pub mod svg;
pub mod traces;

pub use error::{Error, Result};
pub use farey::Slope;
pub use num_complex::Complex64;
pub use solver::{CuspPoint, PleatingRay};
pub use svg::Rect;
