//! Named test bodies and seeded random polygons.

use std::f64::consts::PI;

use rand::Rng;

use crate::body::{Ball, Body, Ellipsoid, Polytope, SlabBall};
use crate::sphere::{keyed_rng, vector, Vector};

const DOMAIN_POLYGONS: u64 = 0x706f_6c79;

/// Triangle with sides 3, 4, 5 and the side of length 5 on the x-axis.
pub fn triangle_345() -> Polytope {
    Polytope::from_rows(&[&[0.0, 0.0], &[5.0, 0.0], &[3.2, 2.4]]).unwrap()
}

/// Equilateral triangle with unit sides and one side on the x-axis.
pub fn equilateral_triangle() -> Polytope {
    Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]).unwrap()
}

pub fn unit_square() -> Polytope {
    Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap()
}

/// Parallelogram (0,0), (4,0), (5,1), (1,1).
pub fn parallelogram() -> Polytope {
    Polytope::from_rows(&[&[0.0, 0.0], &[4.0, 0.0], &[5.0, 1.0], &[1.0, 1.0]]).unwrap()
}

/// Box `[0, a₁] × ⋯ × [0, aₙ]`.
pub fn axis_box(sides: &[f64]) -> Polytope {
    let n = sides.len();
    let pts: Vec<Vector> = (0..1usize << n)
        .map(|mask| Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { sides[i] } else { 0.0 }))
        .collect();
    Polytope::new(&pts).unwrap()
}

/// Regular `m`-gon circumscribed about the unit circle, touching it at the
/// angles `2πk/m`.
pub fn circumscribed_polygon(m: usize) -> Polytope {
    let r = 1.0 / (PI / m as f64).cos();
    let pts: Vec<Vector> = (0..m)
        .map(|k| {
            let t = (2 * k + 1) as f64 * PI / m as f64;
            vector(&[r * t.cos(), r * t.sin()])
        })
        .collect();
    Polytope::new(&pts).unwrap()
}

/// Convex polygon with exactly `vertices` vertices: random points on a
/// random rotated ellipse, translated off the origin.
pub fn random_polygon(vertices: usize, seed: u64) -> Polytope {
    let mut rng = keyed_rng(seed, DOMAIN_POLYGONS, vertices as u64);
    let a = rng.random_range(1.0..3.0);
    let b = rng.random_range(0.4..1.5);
    let rot = rng.random_range(0.0..PI);
    let shift = vector(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
    loop {
        let mut angles: Vec<f64> = (0..vertices).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        // Keep neighbours apart so that no vertex is nearly flat.
        let min_gap = (0..vertices)
            .map(|i| (angles[(i + 1) % vertices] - angles[i]).rem_euclid(2.0 * PI))
            .fold(f64::INFINITY, f64::min);
        if min_gap < 0.02 / vertices as f64 {
            continue;
        }
        let pts: Vec<Vector> = angles
            .iter()
            .map(|t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                vector(&[x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos()]) + &shift
            })
            .collect();
        if let Ok(p) = Polytope::new(&pts) {
            if p.vertices().len() == vertices {
                return p;
            }
        }
    }
}

pub fn ellipse_2_1() -> Body {
    Body::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap())
}

pub fn unit_disc() -> Body {
    Body::Ball(Ball::unit(2))
}

/// B(0, 1) ∩ {|x₁| ≤ ω/2} in the plane.
pub fn slab_disc(omega: f64) -> Body {
    Body::SlabBall(SlabBall::new(omega / 2.0, 2).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_polygons_have_requested_size() {
        for (k, n) in [8, 13, 40].into_iter().enumerate() {
            let p = random_polygon(n, k as u64);
            assert_eq!(p.vertices().len(), n);
            assert_eq!(random_polygon(n, k as u64).vertices(), p.vertices());
        }
    }

    #[test]
    fn circumscribed_polygon_touches_unit_circle() {
        let p = circumscribed_polygon(8);
        for f in p.hull().facets() {
            assert!((f.offset - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn box_has_corner_vertices() {
        assert_eq!(axis_box(&[1.0, 2.0, 3.0]).vertices().len(), 8);
    }
}
