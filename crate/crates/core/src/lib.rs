//! Explicit red/blue colourings of Euclidean space that contain no red copy of
//! a given non-spherical configuration and no blue unit-spaced progression of
//! some length, together with the equidistribution tooling used to check them.
//!
//! The pipeline is
//! [`certify::compute_certificate`] → [`spec_builder::build_spec`] →
//! [`coloring`] / [`redcheck`] / [`lineseq`] / [`equidist`].

pub mod certify;
pub mod coloring;
pub mod equidist;
pub mod error;
pub mod lineseq;
pub mod numfield;
pub mod precision;
pub mod redcheck;
pub mod spec_builder;

pub use error::{Error, Result};
pub use numfield::{FieldElement, Interval, RationalVector};
