//! Complex dimensions of self-similar systems, von Koch type fractals,
//! their tube functions and heat content, and the explicit formulas that
//! tie the two together.

pub mod error;
pub mod explicit;
pub mod field;
pub mod geometry;
pub mod heat;
pub mod ifs;
pub mod mellin;
pub mod point;
pub mod quad;
pub mod sampled;
pub mod vonkoch;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use point::Point;
