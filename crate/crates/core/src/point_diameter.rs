//! The point-diameter field e(O): the longest chord of the body cut by a
//! line through O.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{Body, Polytope};
use crate::csv_number;
use crate::error::{GeometryError, Result};
use crate::metrics::global_diameter;
use crate::search::{golden_section_max, maximize_on_sphere, maximize_periodic};
use crate::sphere::{keyed_rng, random_direction, vector, UnitDirection, Vector};

/// Angular sweep size for bodies without a finite candidate set.
pub const SWEEP: usize = 512;
/// Direction tolerance of the golden-section refinement.
pub const DIRECTION_TOL: f64 = 1e-8;
/// Boundary membership tolerance, relative to δ.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct PointDiameterSample {
    pub o: Vec<f64>,
    pub e: f64,
    pub best_direction: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityVerdict {
    pub o: Vec<f64>,
    pub continuous: bool,
    pub e_value: f64,
    pub farthest_value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonEstimate {
    pub value: f64,
    pub argmin: Vec<f64>,
}

/// Rectangular raster of e values at cell centres, row-major with x fastest.
#[derive(Clone, Debug, Serialize)]
pub struct EkGrid {
    pub nx: usize,
    pub ny: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl EkGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// CSV with header `x,y,e`, numbers in round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,e\n");
        for (j, y) in self.ys.iter().enumerate() {
            for (i, x) in self.xs.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", csv_number(*x), csv_number(*y), csv_number(self.get(i, j))));
            }
        }
        out
    }
}

/// Length of the chord of K on the line `o + t·dir` (zero if it misses).
pub fn chord_length(body: &Body, o: &Vector, dir: &Vector) -> f64 {
    match body.clip_line(o, dir) {
        Some((lo, hi)) => ((hi - lo) * dir.norm()).max(0.0),
        None => 0.0,
    }
}

fn polygon_candidates(p: &Polytope, o: &Vector) -> Vec<Vector> {
    let tol = 1e-12 * p.scale().max(o.norm());
    let mut dirs: Vec<Vector> = p
        .vertices()
        .iter()
        .map(|v| v - o)
        .filter(|d| d.norm() > tol)
        .map(|d| {
            let n = d.norm();
            d / n
        })
        .collect();
    let facets = p.hull().facets();
    for (i, f) in facets.iter().enumerate() {
        for g in &facets[i + 1..] {
            if (&f.normal + &g.normal).norm() < 1e-12 {
                dirs.push(vector(&[-f.normal[1], f.normal[0]]));
            }
        }
    }
    dirs
}

/// Samples per cell before the golden-section refinement.
const CELL_SAMPLES: usize = 8;

/// Exact planar path. Inside K the chord length is convex in the angle
/// between consecutive vertex directions, so its maximum is at a vertex
/// direction (or along a pair of parallel edges). Outside K it is a
/// difference of such terms and may peak inside a cell, so each cell the
/// line meets is searched as well.
fn polygon_e(p: &Polytope, body: &Body, o: &Vector) -> (f64, Vector) {
    let mut best = (0.0, vector(&[1.0, 0.0]));
    let mut consider = |d: Vector| {
        let len = chord_length(body, o, &d);
        if len > best.0 {
            best = (len, d);
        }
    };
    let candidates = polygon_candidates(p, o);
    let mut angles: Vec<f64> = candidates.iter().map(|d| d[1].atan2(d[0]).rem_euclid(PI)).collect();
    for d in candidates {
        consider(d);
    }
    if p.hull().signed_distance(o) > 0.0 && !angles.is_empty() {
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let f = |t: f64| chord_length(body, o, &vector(&[t.cos(), t.sin()]));
        let m = angles.len();
        for k in 0..m {
            let lo = angles[k];
            let hi = if k + 1 < m { angles[k + 1] } else { angles[0] + PI };
            let h = (hi - lo) / CELL_SAMPLES as f64;
            if h <= 0.0 || f(lo + (hi - lo) / 2.0) <= 0.0 {
                continue;
            }
            let j = (1..CELL_SAMPLES)
                .max_by(|&a, &b| f(lo + a as f64 * h).total_cmp(&f(lo + b as f64 * h)))
                .expect("cell has interior samples");
            let centre = lo + j as f64 * h;
            let (t, _) = golden_section_max(f, centre - h, centre + h, 1e-12);
            consider(vector(&[t.cos(), t.sin()]));
        }
    }
    best
}

/// e(O) with the direction of a longest chord through O.
pub fn e_of(body: &Body, o: &Vector) -> Result<PointDiameterSample> {
    body.check_dim(o)?;
    if o.iter().any(|x| !x.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let (e, dir) = match body {
        Body::Polytope(p) if p.dim() == 2 => polygon_e(p, body, o),
        _ if body.dim() == 2 => {
            let f = |t: f64| chord_length(body, o, &vector(&[t.cos(), t.sin()]));
            let (t, v) = maximize_periodic(f, PI, SWEEP, 8, DIRECTION_TOL);
            (v, vector(&[t.cos(), t.sin()]))
        }
        _ => {
            let (u, v) = maximize_on_sphere(body.dim(), |u| chord_length(body, o, u), SWEEP, 0x65_6b, DIRECTION_TOL);
            (v, u.into_vector())
        }
    };
    Ok(PointDiameterSample { o: o.iter().copied().collect(), e, best_direction: dir.iter().copied().collect() })
}

fn e_value(body: &Body, o: &Vector) -> f64 {
    e_of(body, o).map(|s| s.e).unwrap_or(0.0)
}

/// Centre of the axis-aligned bounding box.
pub fn bounding_centre(body: &Body) -> Vector {
    let dim = body.dim();
    Vector::from_fn(dim, |i, _| {
        let axis = UnitDirection::axis(dim, i);
        (body.support_value(&axis) - body.support_value(&axis.neg())) / 2.0
    })
}

/// Minimum of e over a `grid × grid` lattice on the square of half-side
/// `search_radius` centred on the body. Estimates inf e = ω from above.
pub fn epsilon_estimate(body: &Body, search_radius: f64, grid: usize) -> Result<EpsilonEstimate> {
    if body.dim() != 2 {
        return Err(GeometryError::Unsupported("planar bodies"));
    }
    if !(search_radius > 0.0) {
        return Err(GeometryError::NonPositive { what: "search radius", value: search_radius });
    }
    if grid < 2 {
        return Err(GeometryError::Invalid("grid needs at least 2 points per side".into()));
    }
    let c = bounding_centre(body);
    let step = 2.0 * search_radius / (grid - 1) as f64;
    let (value, argmin) = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let o = vector(&[c[0] - search_radius + (k % grid) as f64 * step, c[1] - search_radius + (k / grid) as f64 * step]);
            (e_value(body, &o), k)
        })
        .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let o = vec![c[0] - search_radius + (argmin % grid) as f64 * step, c[1] - search_radius + (argmin / grid) as f64 * step];
    Ok(EpsilonEstimate { value, argmin: o })
}

/// Classifies e at a boundary point: continuous iff some chord of maximal
/// length through O ends at O, i.e. e(O) equals the farthest distance from O.
pub fn continuity_check(body: &Body, o: &Vector, tol: f64) -> Result<ContinuityVerdict> {
    body.check_dim(o)?;
    let (delta, _) = global_diameter(body);
    let residual = body.boundary_residual(o);
    if residual.abs() > BOUNDARY_TOL * delta {
        return Err(GeometryError::NotOnBoundary(residual));
    }
    let e = e_of(body, o)?.e;
    let farthest = body.farthest_distance(o);
    let gap = (e - farthest).max(0.0);
    Ok(ContinuityVerdict {
        o: o.iter().copied().collect(),
        continuous: gap <= tol,
        e_value: e,
        farthest_value: farthest,
        gap,
    })
}

/// `count` boundary points of a planar polygon (equally spaced in arc length,
/// starting at the first vertex) or of a planar smooth body (equally spaced
/// in angle).
pub fn boundary_samples(body: &Body, count: usize) -> Result<Vec<Vector>> {
    if body.dim() != 2 {
        return Err(GeometryError::Unsupported("planar bodies"));
    }
    match body {
        Body::Polytope(p) => {
            let verts = p.vertices();
            let m = verts.len();
            let lengths: Vec<f64> = (0..m).map(|i| (&verts[(i + 1) % m] - &verts[i]).norm()).collect();
            let perimeter: f64 = lengths.iter().sum();
            let mut out = Vec::with_capacity(count);
            let (mut edge, mut start) = (0, 0.0);
            for k in 0..count {
                let s = perimeter * k as f64 / count as f64;
                while edge + 1 < m && s >= start + lengths[edge] - 1e-12 * perimeter {
                    start += lengths[edge];
                    edge += 1;
                }
                let t = ((s - start) / lengths[edge]).clamp(0.0, 1.0);
                let a = &verts[edge];
                let b = &verts[(edge + 1) % m];
                out.push(if t == 0.0 { a.clone() } else { a + (b - a) * t });
            }
            Ok(out)
        }
        _ => {
            let c = bounding_centre(body);
            Ok((0..count)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / count as f64;
                    let d = vector(&[t.cos(), t.sin()]);
                    let (_, hi) = body.clip_line(&c, &d).expect("centre is interior");
                    &c + d * hi
                })
                .collect())
        }
    }
}

/// Max of e over `count` uniform points of the disc B(O, radius).
pub fn usc_probe(body: &Body, o: &Vector, radius: f64, count: usize, seed: u64) -> Result<f64> {
    body.check_dim(o)?;
    if !(radius > 0.0) {
        return Err(GeometryError::NonPositive { what: "probe radius", value: radius });
    }
    let dim = body.dim();
    let best = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed_rng(seed, 0x7573_63, i as u64);
            let dir = random_direction(dim, &mut rng);
            let rad = radius * rng.random::<f64>().powf(1.0 / dim as f64);
            e_value(body, &(o + dir.as_vector() * rad))
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// e at `o + t·direction` for each `t`; the minimum over shrinking `t`
/// estimates the liminf of e approaching O along that ray.
pub fn approach_values(body: &Body, o: &Vector, direction: &UnitDirection, steps: &[f64]) -> Result<Vec<f64>> {
    body.check_dim(o)?;
    Ok(steps.iter().map(|t| e_value(body, &(o + direction.as_vector() * *t))).collect())
}

/// e at the cell centres of `bounds = [x_min, x_max, y_min, y_max]` split into
/// `nx × ny` cells.
pub fn ek_grid(body: &Body, bounds: [f64; 4], nx: usize, ny: usize) -> Result<EkGrid> {
    if body.dim() != 2 {
        return Err(GeometryError::Unsupported("planar bodies"));
    }
    if nx < 2 || ny < 2 {
        return Err(GeometryError::Invalid("grid needs at least 2 cells per side".into()));
    }
    let [x0, x1, y0, y1] = bounds;
    if bounds.iter().any(|b| !b.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if !(x1 > x0 && y1 > y0) {
        return Err(GeometryError::Invalid("grid bounds have zero area".into()));
    }
    let xs: Vec<f64> = (0..nx).map(|i| x0 + (x1 - x0) * (i as f64 + 0.5) / nx as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|j| y0 + (y1 - y0) * (j as f64 + 0.5) / ny as f64).collect();
    let values: Vec<f64> = (0..nx * ny).into_par_iter().map(|k| e_value(body, &vector(&[xs[k % nx], ys[k / nx]]))).collect();
    Ok(EkGrid { nx, ny, xs, ys, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Ball;

    fn equilateral() -> Body {
        Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]).unwrap())
    }

    fn brute_force(body: &Body, o: &Vector, n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let t = PI * k as f64 / n as f64;
                chord_length(body, o, &vector(&[t.cos(), t.sin()]))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn centroid_of_equilateral_triangle() {
        let body = equilateral();
        let o = vector(&[0.5, 3f64.sqrt() / 6.0]);
        let e = e_of(&body, &o).unwrap().e;
        assert!((e - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((brute_force(&body, &o, 100_000) - e).abs() < 1e-4);
    }

    #[test]
    fn ball_centre_gives_diameter() {
        let body = Body::Ball(Ball::new(1.0, vector(&[2.0, -1.0])).unwrap());
        assert!((e_of(&body, &vector(&[2.0, -1.0])).unwrap().e - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_point_below_side() {
        let body = Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[5.0, 0.0], &[3.2, 2.4]]).unwrap());
        let e = e_of(&body, &vector(&[3.2, -5.0])).unwrap().e;
        assert!((e - 2.4).abs() < 1e-9, "{e}");
    }

    #[test]
    fn continuity_examples() {
        let body = equilateral();
        let top = vector(&[0.5, 3f64.sqrt() / 2.0]);
        assert!(continuity_check(&body, &top, 1e-9).unwrap().continuous);
        let mid = vector(&[0.5, 0.0]);
        let v = continuity_check(&body, &mid, 1e-9).unwrap();
        assert!(!v.continuous);
        assert!((v.gap - (1.0 - 0.75f64.sqrt())).abs() < 1e-12);
        assert!(continuity_check(&body, &vector(&[0.5, 0.2]), 1e-9).is_err());
        let disc = Body::Ball(Ball::unit(2));
        for o in boundary_samples(&disc, 16).unwrap() {
            assert!(continuity_check(&disc, &o, 1e-9).unwrap().continuous);
        }
    }

    #[test]
    fn boundary_samples_hit_vertices() {
        let pts = boundary_samples(&equilateral(), 300).unwrap();
        assert_eq!(pts.len(), 300);
        assert_eq!(pts[0], vector(&[0.0, 0.0]));
        assert_eq!(pts[100], vector(&[1.0, 0.0]));
        assert!((&pts[200] - vector(&[0.5, 3f64.sqrt() / 2.0])).norm() < 1e-15);
    }

    #[test]
    fn probes_near_interior_point() {
        let sq = Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap());
        let o = vector(&[0.5, 0.5]);
        let e = e_of(&sq, &o).unwrap().e;
        let probe = usc_probe(&sq, &o, 1e-4, 200, 1).unwrap();
        assert!(probe - e <= 1e-3 * 2f64.sqrt());
        assert!((usc_probe(&sq, &o, 1e-6, 50, 2).unwrap() - e).abs() <= 1e-4);
    }

    #[test]
    fn approaching_edge_midpoint_from_outside_drops() {
        let body = equilateral();
        let o = vector(&[0.5, 0.0]);
        let e = e_of(&body, &o).unwrap().e;
        let vals = approach_values(&body, &o, &UnitDirection::axis(2, 1).neg(), &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(vals.iter().all(|v| *v < e - 0.05), "{vals:?}");
    }

    #[test]
    fn grid_examples() {
        let disc = Body::Ball(Ball::unit(2));
        let g = ek_grid(&disc, [-2.0, 2.0, -2.0, 2.0], 3, 3).unwrap();
        assert!((g.get(1, 1) - 2.0).abs() < 1e-12);
        assert!(g.to_csv().starts_with("x,y,e\n"));
        assert!(ek_grid(&disc, [0.0, 0.0, -1.0, 1.0], 3, 3).is_err());
    }

    #[test]
    fn epsilon_estimate_of_disc() {
        let disc = Body::Ball(Ball::unit(2));
        let est = epsilon_estimate(&disc, 4.0, 21).unwrap();
        assert!(est.value >= 1.98 && est.value <= 2.0 + 1e-9);
    }
}
