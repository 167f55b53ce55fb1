//! Finite-scale machinery for balanced words, one- and two-dimensional
//! shifts of finite type, the gap-spacer transform and the three-layer
//! balanced-plane shift.

pub mod error;
pub mod experiments;
pub mod grid2d;
pub mod layers;
pub mod shift1d;
pub mod slope;
pub mod spacer1d;
pub mod spacer2d;
pub mod words;

pub use error::{Error, Result};
pub use slope::{Quadratic, Rational, Slope, SlopeInterval};
pub use words::Word;
