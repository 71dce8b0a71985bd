//! Hurwitz algebras, their principal isotopes, triality and the
//! classification of isotopes of quaternion and composition algebras.

pub mod batch;
pub mod error;
pub mod hurwitz;
pub mod isotope;
pub mod json;
pub mod linear;
pub mod oracle;
pub mod scalar;
pub mod triality;

pub use error::{Error, Result};
pub use hurwitz::{Algebra, Element, HurwitzAlgebra};
pub use isotope::{DoubleSign, Isotope};
pub use linear::LinMap;
pub use scalar::{Backend, Rational, Scalar, Tolerance};
