//! Numerical geometry of SL(3,R)/SO(3) and of CAT(1) model spaces.
//!
//! - [`symspace`]: the affine-invariant metric on positive-definite matrices.
//! - [`isometry`]: the SL(3,R) action, real Jordan forms, translation lengths.
//! - [`building`]: flags, apartments and Tits distances on the ideal boundary.
//! - [`gradflow`]: convex functionals, proximal gradient curves, Busemann functions.
//! - [`cat1`]: spherical comparison, suspensions, simplices, minimax centers, Sperner search.

pub mod building;
pub mod cat1;
pub mod error;
pub mod gradflow;
pub mod io;
pub mod isometry;
pub mod symspace;
pub mod verify;

pub use error::{Error, Result};
