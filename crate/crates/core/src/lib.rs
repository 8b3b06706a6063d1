//! Width, diameter, thickness and the Lipschitz moduli of the width and
//! directional-diameter functions of convex bodies, with the point-diameter
//! field and a randomized verification harness.

pub mod body;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod hull;
pub mod lp;
pub mod metrics;
pub mod point_diameter;
pub mod search;
pub mod sphere;

pub use body::{parse_body, Ball, Body, BodyDocument, ContactSet, Ellipsoid, Polytope, SlabBall};
pub use error::{GeometryError, Result};
pub use sphere::{projective_distance, UnitDirection, Vector};

/// Formats a number with 17 significant digits, enough to round-trip an f64.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}
