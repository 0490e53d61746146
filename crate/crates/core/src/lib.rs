//! Diagonal-space screens of quadrilaterals and the planar four-bar linkages
//! built on them.
//!
//! A quadrilateral with sides `a, b, c, d` (in cyclic order, `c` opposite
//! `a`) and diagonals `x, y` is also the planar, zero-volume limit of a
//! tetrahedron whose six edges are arranged as the symbol
//! `{a b x; c d y}`. This crate works with both readings:
//!
//! - [`geometry`]: areas, caustic, ridges, gates and bounds of the `(x, y)`
//!   screen;
//! - [`classification`]: Grashof test, Regge variables, the 27-case table and
//!   Regge conjugation;
//! - [`symmetry`]: the 144-element symmetry group acting on six-tuples;
//! - [`kinematics`]: position analysis and configuration-cycle tracing;
//! - [`render`]: sampled screens serialized as CSV, SVG and JSON.

pub mod classification;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod render;
pub mod sides;
pub mod symmetry;

pub use error::{Error, Result};
pub use sides::{Label, QuadSides};

/// Relative tolerance for closed-form identities.
pub const REL_TOL: f64 = 1e-9;

/// Absolute tolerance, in normalized screen units, for point coincidence.
pub const COINCIDENCE_TOL: f64 = 1e-6;
