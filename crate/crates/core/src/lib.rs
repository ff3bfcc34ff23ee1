//! Containment functionals of planar convex polygons.
//!
//! Circumradius, inradius, diameter and width under a gauge body, Minkowski
//! asymmetry, the containment factors `τ`, `α`, `γ`, and generators for the
//! bodies that attain the boundary of the `(s, τ)` and `(s, D/w)` regions.

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod functionals;
pub mod geom;
pub mod io;
pub mod lp;
pub mod sample;

pub use error::{Error, Result};
pub use geom::{ConvexPolygon, HalfPlane, Vec2};
