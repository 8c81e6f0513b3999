//! Numerical toolkit for asymptotic convex geometry.
//!
//! Bodies are described by [`geom::Body`], integrated against seeded
//! [`quadra::SphereRule`]s, brought into classical positions by
//! [`positions`], and checked against known identities and sandwich
//! inequalities by the [`verify`] catalog.

pub mod error;
pub mod geom;
pub mod linalg;
pub mod lp;
pub mod quadra;
pub mod positions;
pub mod radon;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
