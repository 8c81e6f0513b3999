//! Body representations and their pointwise functions.

mod body;
mod eval;
mod ops;

pub use body::{Atom, Body, Exponent, LinearMap, PowerTerm, RadialCache, SpdMatrix};
pub use ops::{contains, contains_with_tol, Containment, Direction, DEFAULT_CONTAINMENT_TOL};

pub(crate) use body::mat_vec;
pub(crate) use eval::{dot, norm2};
pub(crate) use ops::{refine_max, refine_min};
