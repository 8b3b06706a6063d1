//! Convex bodies: vertex polytopes, axis-aligned ellipsoids, balls and the
//! slab-truncated unit ball.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::hull::Hull;
use crate::search::maximize_on_sphere;
use crate::sphere::{vector, UnitDirection, Vector};

/// Default contact tolerance, relative to the body scale.
pub const DEFAULT_CONTACT_TOL: f64 = 1e-9;

/// Convex polytope stored by its extreme points.
///
/// The hull of the difference body is computed once at construction; width
/// and directional diameter queries read it without mutation.
#[derive(Clone, Debug)]
pub struct Polytope {
    hull: Hull,
    difference: Hull,
}

impl Polytope {
    pub fn new(points: &[Vector]) -> Result<Self> {
        let hull = Hull::from_points(points)?;
        let verts = hull.vertices();
        let mut diffs = Vec::with_capacity(verts.len() * verts.len());
        for a in verts {
            for b in verts {
                diffs.push(a - b);
            }
        }
        let difference = Hull::from_points(&diffs)?;
        Ok(Self { hull, difference })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let pts: Vec<Vector> = rows.iter().map(|r| vector(r)).collect();
        Self::new(&pts)
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn vertices(&self) -> &[Vector] {
        self.hull.vertices()
    }

    pub fn hull(&self) -> &Hull {
        &self.hull
    }

    pub fn difference_hull(&self) -> &Hull {
        &self.difference
    }

    /// Largest vertex norm.
    pub fn scale(&self) -> f64 {
        self.hull.scale()
    }

    /// K + (−K) as a polytope in its own right.
    pub fn difference_body(&self) -> Polytope {
        Polytope::new(self.difference.vertices()).expect("difference body is full-dimensional")
    }

    /// Image under `x ↦ M x + t`.
    pub fn transformed(&self, matrix: &DMatrix<f64>, shift: &Vector) -> Result<Polytope> {
        let pts: Vec<Vector> = self.vertices().iter().map(|v| matrix * v + shift).collect();
        Polytope::new(&pts)
    }

    pub fn scaled(&self, factor: f64) -> Result<Polytope> {
        let pts: Vec<Vector> = self.vertices().iter().map(|v| v * factor).collect();
        Polytope::new(&pts)
    }

    /// max over vertices of ⟨v, u⟩.
    pub fn support_value(&self, u: &Vector) -> f64 {
        self.vertices().iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of vertices with ⟨v, u⟩ ≥ h(u) − tol·scale.
    pub fn contact_indices(&self, u: &Vector, tol: f64) -> Vec<usize> {
        let h = self.support_value(u);
        let cut = h - tol * self.scale();
        (0..self.vertices().len()).filter(|&i| self.vertices()[i].dot(u) >= cut).collect()
    }

    pub fn contact_set(&self, u: &UnitDirection, tol: f64) -> ContactSet {
        ContactSet::Points(self.contact_indices(u, tol).into_iter().map(|i| self.vertices()[i].clone()).collect())
    }

    /// Index of the vertex equal to `x` within the contact tolerance.
    pub fn vertex_index(&self, x: &Vector) -> Option<usize> {
        let tol = DEFAULT_CONTACT_TOL * self.scale();
        self.vertices().iter().position(|v| (v - x).norm() <= tol)
    }

    /// Arc of outward normal angles at a vertex of a planar polygon.
    pub fn normal_cone_2d(&self, vertex: &Vector) -> Result<AngleInterval> {
        if self.dim() != 2 {
            return Err(GeometryError::Unsupported("planar polygon"));
        }
        let i = self.vertex_index(vertex).ok_or(GeometryError::NotAVertex)?;
        Ok(self.vertex_cone_2d(i))
    }

    pub(crate) fn vertex_cone_2d(&self, i: usize) -> AngleInterval {
        let m = self.vertices().len();
        let facets = self.hull.facets();
        let incoming = &facets[(i + m - 1) % m].normal;
        let outgoing = &facets[i].normal;
        AngleInterval::between(angle_of(incoming), angle_of(outgoing))
    }
}

fn angle_of(v: &Vector) -> f64 {
    v[1].atan2(v[0]).rem_euclid(2.0 * PI)
}

/// Closed arc of angles `[start, start + width]` on the circle, `width < π`
/// for polygon normal cones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleInterval {
    pub start: f64,
    pub width: f64,
}

impl AngleInterval {
    /// Counterclockwise arc from `from` to `to`.
    pub fn between(from: f64, to: f64) -> Self {
        let start = from.rem_euclid(2.0 * PI);
        let width = (to - from).rem_euclid(2.0 * PI);
        Self { start, width }
    }

    pub fn point(angle: f64) -> Self {
        Self { start: angle.rem_euclid(2.0 * PI), width: 0.0 }
    }

    pub fn end(&self) -> f64 {
        self.start + self.width
    }

    pub fn contains(&self, angle: f64, tol: f64) -> bool {
        let d = (angle - self.start).rem_euclid(2.0 * PI);
        d <= self.width + tol || d >= 2.0 * PI - tol
    }

    /// Arc rotated by π (the normals of the opposite side).
    pub fn opposite(&self) -> Self {
        Self { start: (self.start + PI).rem_euclid(2.0 * PI), width: self.width }
    }

    /// Intersection of two arcs shorter than π; arcs touching within `tol`
    /// radians meet in a single angle.
    pub fn intersect(&self, other: &AngleInterval, tol: f64) -> Option<AngleInterval> {
        let delta = (other.start - self.start).rem_euclid(2.0 * PI);
        if delta <= self.width + tol {
            let hi = self.width.min(delta + other.width);
            let lo = delta.min(hi);
            return Some(AngleInterval { start: (self.start + lo).rem_euclid(2.0 * PI), width: hi - lo });
        }
        let wrapped = delta - 2.0 * PI;
        if wrapped + other.width >= -tol {
            let hi = self.width.min(wrapped + other.width).max(0.0);
            return Some(AngleInterval { start: self.start, width: hi });
        }
        None
    }
}

/// Centered, axis-aligned ellipsoid Σ xᵢ²/aᵢ² ≤ 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ellipsoid {
    semiaxes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(semiaxes: Vec<f64>) -> Result<Self> {
        if semiaxes.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(semiaxes.len()));
        }
        for &a in &semiaxes {
            if !a.is_finite() {
                return Err(GeometryError::NonFinite);
            }
            if a <= 0.0 {
                return Err(GeometryError::NonPositive { what: "semiaxis", value: a });
            }
        }
        Ok(Self { semiaxes })
    }

    pub fn semiaxes(&self) -> &[f64] {
        &self.semiaxes
    }
}

/// Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    radius: f64,
    center: Vector,
}

impl Ball {
    pub fn new(radius: f64, center: Vector) -> Result<Self> {
        if center.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(center.len()));
        }
        if !radius.is_finite() || center.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(GeometryError::NonPositive { what: "radius", value: radius });
        }
        Ok(Self { radius, center })
    }

    pub fn unit(dim: usize) -> Self {
        Self { radius: 1.0, center: DVector::zeros(dim) }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }
}

/// B(0, 1) ∩ {−h ≤ x₁ ≤ h}. For `h ≥ 1` this is the unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabBall {
    half_width: f64,
    dim: usize,
}

impl SlabBall {
    pub fn new(half_width: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeometryError::DimensionTooSmall(dim));
        }
        if !half_width.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if half_width <= 0.0 {
            return Err(GeometryError::NonPositive { what: "half_width", value: half_width });
        }
        Ok(Self { half_width, dim })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// min(h, 1): the half-width that actually cuts the ball.
    pub fn effective_half_width(&self) -> f64 {
        self.half_width.min(1.0)
    }

    /// Radius of the flat faces, √(1 − h²).
    pub fn rim_radius(&self) -> f64 {
        let h = self.effective_half_width();
        (1.0 - h * h).max(0.0).sqrt()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Points of the body lying on a supporting hyperplane.
#[derive(Clone, Debug, PartialEq)]
pub enum ContactSet {
    /// Finitely many points (polytope vertices or a smooth touching point).
    Points(Vec<Vector>),
    /// A flat (n−1)-disk: `{x : ⟨x − center, axis⟩ = 0, |x − center| ≤ radius}`.
    Disk { center: Vector, axis: Vector, radius: f64 },
}

impl ContactSet {
    pub fn is_singleton(&self) -> bool {
        match self {
            ContactSet::Points(p) => p.len() == 1,
            ContactSet::Disk { radius, .. } => *radius == 0.0,
        }
    }

    /// Some point of the set.
    pub fn representative(&self) -> &Vector {
        match self {
            ContactSet::Points(p) => &p[0],
            ContactSet::Disk { center, .. } => center,
        }
    }

    /// max over x in the set of |x − p|.
    pub fn farthest_from(&self, p: &Vector) -> f64 {
        match self {
            ContactSet::Points(pts) => pts.iter().map(|x| (x - p).norm()).fold(0.0, f64::max),
            ContactSet::Disk { center, axis, radius } => {
                let d = p - center;
                let along = d.dot(axis);
                let across = (d - axis * along).norm();
                (along * along + (across + radius).powi(2)).sqrt()
            }
        }
    }

    /// max over x in `self`, y in `other` of |x − y|.
    pub fn max_distance(&self, other: &ContactSet) -> f64 {
        match (self, other) {
            (ContactSet::Points(pts), _) => pts.iter().map(|x| other.farthest_from(x)).fold(0.0, f64::max),
            (_, ContactSet::Points(pts)) => pts.iter().map(|x| self.farthest_from(x)).fold(0.0, f64::max),
            (
                ContactSet::Disk { center: c1, axis, radius: r1 },
                ContactSet::Disk { center: c2, radius: r2, .. },
            ) => {
                // Parallel disks: the farthest pair sits on opposite rims.
                let d = c2 - c1;
                let along = d.dot(axis);
                let across = (d - axis * along).norm();
                (along * along + (across + r1 + r2).powi(2)).sqrt()
            }
        }
    }
}

/// Value of the support function and the points where it is attained.
#[derive(Clone, Debug)]
pub struct Support {
    pub value: f64,
    pub contact: ContactSet,
}

/// A convex body with nonempty interior.
#[derive(Clone, Debug)]
pub enum Body {
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    Ball(Ball),
    SlabBall(SlabBall),
}

/// Body description document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyDocument {
    Polytope { vertices: Vec<Vec<f64>> },
    Ellipsoid { semiaxes: Vec<f64> },
    Ball { radius: f64, center: Vec<f64> },
    SlabBall { half_width: f64, dim: usize },
}

/// Parses and validates a body description (JSON).
pub fn parse_body(text: &str) -> Result<Body> {
    let doc: BodyDocument = serde_json::from_str(text)?;
    Body::from_document(&doc)
}

impl Body {
    pub fn from_document(doc: &BodyDocument) -> Result<Self> {
        match doc {
            BodyDocument::Polytope { vertices } => {
                let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
                if dim < 2 {
                    return Err(GeometryError::DimensionTooSmall(dim));
                }
                for v in vertices {
                    if v.len() != dim {
                        return Err(GeometryError::DimensionMismatch { expected: dim, got: v.len() });
                    }
                }
                let pts: Vec<Vector> = vertices.iter().map(|v| vector(v)).collect();
                Ok(Body::Polytope(Polytope::new(&pts)?))
            }
            BodyDocument::Ellipsoid { semiaxes } => Ok(Body::Ellipsoid(Ellipsoid::new(semiaxes.clone())?)),
            BodyDocument::Ball { radius, center } => Ok(Body::Ball(Ball::new(*radius, vector(center))?)),
            BodyDocument::SlabBall { half_width, dim } => Ok(Body::SlabBall(SlabBall::new(*half_width, *dim)?)),
        }
    }

    pub fn to_document(&self) -> BodyDocument {
        match self {
            Body::Polytope(p) => BodyDocument::Polytope {
                vertices: p.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
            },
            Body::Ellipsoid(e) => BodyDocument::Ellipsoid { semiaxes: e.semiaxes.clone() },
            Body::Ball(b) => BodyDocument::Ball { radius: b.radius, center: b.center.iter().copied().collect() },
            Body::SlabBall(s) => BodyDocument::SlabBall { half_width: s.half_width, dim: s.dim },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Body::Polytope(_) => "polytope",
            Body::Ellipsoid(_) => "ellipsoid",
            Body::Ball(_) => "ball",
            Body::SlabBall(_) => "slab_ball",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ellipsoid(e) => e.semiaxes.len(),
            Body::Ball(b) => b.center.len(),
            Body::SlabBall(s) => s.dim,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::Polytope(p) => Some(p),
            _ => None,
        }
    }

    /// Length scale used for relative tolerances.
    pub fn scale(&self) -> f64 {
        match self {
            Body::Polytope(p) => p.scale(),
            Body::Ellipsoid(e) => e.semiaxes.iter().copied().fold(0.0, f64::max),
            Body::Ball(b) => b.center.norm() + b.radius,
            Body::SlabBall(_) => 1.0,
        }
    }

    pub fn check_dim(&self, u: &Vector) -> Result<()> {
        if u.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: u.len() });
        }
        Ok(())
    }

    /// h_K(u) = max over x in K of ⟨x, u⟩.
    pub fn support_value(&self, u: &Vector) -> f64 {
        match self {
            Body::Polytope(p) => p.support_value(u),
            Body::Ellipsoid(e) => e.semiaxes.iter().zip(u.iter()).map(|(a, x)| (a * x).powi(2)).sum::<f64>().sqrt(),
            Body::Ball(b) => b.center.dot(u) + b.radius * u.norm(),
            Body::SlabBall(s) => {
                let h = s.effective_half_width();
                let u1 = u[0].abs();
                let rest = u.rows(1, u.len() - 1).norm();
                if u1 <= h * u.norm() {
                    u.norm()
                } else {
                    h * u1 + s.rim_radius() * rest
                }
            }
        }
    }

    /// Support value with the contact set, using [`DEFAULT_CONTACT_TOL`].
    pub fn support(&self, u: &UnitDirection) -> Result<Support> {
        self.support_with_tol(u, DEFAULT_CONTACT_TOL)
    }

    pub fn support_with_tol(&self, u: &UnitDirection, tol: f64) -> Result<Support> {
        self.check_dim(u)?;
        let value = self.support_value(u);
        let contact = match self {
            Body::Polytope(p) => p.contact_set(u, tol),
            Body::Ellipsoid(e) => {
                let x = DVector::from_fn(u.len(), |i, _| e.semiaxes[i].powi(2) * u[i]) / value;
                ContactSet::Points(vec![x])
            }
            Body::Ball(b) => ContactSet::Points(vec![&b.center + u.as_vector() * b.radius]),
            Body::SlabBall(s) => {
                let h = s.effective_half_width();
                if u[0].abs() <= h {
                    ContactSet::Points(vec![u.as_vector().clone()])
                } else {
                    let sign = u[0].signum();
                    let rest = u.rows(1, u.len() - 1).into_owned();
                    let rest_norm = rest.norm();
                    let mut center = DVector::zeros(u.len());
                    center[0] = sign * h;
                    if rest_norm > tol {
                        let mut x = center;
                        let dir = rest / rest_norm;
                        for i in 1..u.len() {
                            x[i] = s.rim_radius() * dir[i - 1];
                        }
                        ContactSet::Points(vec![x])
                    } else {
                        let mut axis = DVector::zeros(u.len());
                        axis[0] = 1.0;
                        ContactSet::Disk { center, axis, radius: s.rim_radius() }
                    }
                }
            }
        };
        Ok(Support { value, contact })
    }

    /// Parameter interval `{t : x + t·dir ∈ K}`, `None` if the line misses K.
    pub fn clip_line(&self, x: &Vector, dir: &Vector) -> Option<(f64, f64)> {
        match self {
            Body::Polytope(p) => p.hull().clip_line(x, dir),
            Body::Ellipsoid(e) => {
                let (mut qa, mut qb, mut qc) = (0.0, 0.0, -1.0);
                for (i, a) in e.semiaxes.iter().enumerate() {
                    let a2 = a * a;
                    qa += dir[i] * dir[i] / a2;
                    qb += 2.0 * x[i] * dir[i] / a2;
                    qc += x[i] * x[i] / a2;
                }
                solve_quadratic_interval(qa, qb, qc)
            }
            Body::Ball(b) => {
                let off = x - &b.center;
                solve_quadratic_interval(dir.dot(dir), 2.0 * off.dot(dir), off.dot(&off) - b.radius * b.radius)
            }
            Body::SlabBall(s) => {
                let (mut lo, mut hi) =
                    solve_quadratic_interval(dir.dot(dir), 2.0 * x.dot(dir), x.dot(x) - 1.0)?;
                let h = s.effective_half_width();
                if dir[0].abs() < 1e-300 {
                    if x[0].abs() > h {
                        return None;
                    }
                } else {
                    let t1 = (-h - x[0]) / dir[0];
                    let t2 = (h - x[0]) / dir[0];
                    lo = lo.max(t1.min(t2));
                    hi = hi.min(t1.max(t2));
                }
                (lo <= hi).then_some((lo, hi))
            }
        }
    }

    /// Signed distance-like boundary residual: negative inside, ≈ 0 on ∂K.
    /// Exact Euclidean distance for polytopes outside facets, balls and
    /// slab-balls; a gauge residual scaled by the body size for ellipsoids.
    pub fn boundary_residual(&self, x: &Vector) -> f64 {
        match self {
            Body::Polytope(p) => p.hull().signed_distance(x),
            Body::Ellipsoid(e) => {
                let g: f64 = e.semiaxes.iter().zip(x.iter()).map(|(a, xi)| (xi / a).powi(2)).sum::<f64>().sqrt();
                let amin = e.semiaxes.iter().copied().fold(f64::INFINITY, f64::min);
                (g - 1.0) * amin
            }
            Body::Ball(b) => (x - &b.center).norm() - b.radius,
            Body::SlabBall(s) => (x.norm() - 1.0).max(x[0].abs() - s.effective_half_width()),
        }
    }

    /// max over x in K of |x − p|, which equals max over unit u of h(u) − ⟨p, u⟩.
    pub fn farthest_distance(&self, p: &Vector) -> f64 {
        match self {
            Body::Polytope(poly) => poly.vertices().iter().map(|v| (v - p).norm()).fold(0.0, f64::max),
            Body::Ball(b) => (p - &b.center).norm() + b.radius,
            _ => {
                let (_, v) = maximize_on_sphere(self.dim(), |u| self.support_value(u) - p.dot(u), 512, 17, 1e-10);
                v
            }
        }
    }
}

/// Interval where `a t² + b t + c ≤ 0` for `a > 0`.
fn solve_quadratic_interval(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Stable roots.
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some((r1.min(r2), r1.max(r2)))
}

/// Outward normal angle of a planar polygon vertex; free function form.
pub fn normal_cone_2d(body: &Polytope, vertex: &Vector) -> Result<AngleInterval> {
    body.normal_cone_2d(vertex)
}

/// Vertex list of the difference body K + (−K).
pub fn difference_body(body: &Polytope) -> Polytope {
    body.difference_body()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sample_directions;

    fn square() -> Polytope {
        Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap()
    }

    fn sorted_points(set: &ContactSet) -> Vec<Vec<f64>> {
        let ContactSet::Points(p) = set else { panic!("expected points") };
        let mut v: Vec<Vec<f64>> = p.iter().map(|x| x.iter().copied().collect()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn parse_unit_square() {
        let body = parse_body(r#"{"type":"polytope","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(body.as_polytope().unwrap().vertices().len(), 4);
    }

    #[test]
    fn parse_reduces_duplicates_and_interior_points() {
        let body =
            parse_body(r#"{"type":"polytope","vertices":[[0,0],[1,0],[1,1],[0,1],[1,0],[0.5,0.25]]}"#).unwrap();
        assert_eq!(body.as_polytope().unwrap().vertices().len(), 4);
    }

    #[test]
    fn parse_rejects_flat_and_invalid_bodies() {
        let err = parse_body(r#"{"type":"polytope","vertices":[[0,0],[1,1]]}"#).unwrap_err();
        assert!(matches!(err, GeometryError::NotFullDimensional(_)), "{err}");
        let err = parse_body(r#"{"type":"polytope","vertices":[[0,0],[1,0],[0,1,2]]}"#).unwrap_err();
        assert!(matches!(err, GeometryError::DimensionMismatch { .. }));
        assert!(parse_body(r#"{"type":"ellipsoid","semiaxes":[2,0]}"#).is_err());
        assert!(parse_body(r#"{"type":"ball","radius":-1,"center":[0,0]}"#).is_err());
        assert!(parse_body(r#"{"type":"slab_ball","half_width":0,"dim":2}"#).is_err());
        assert!(parse_body(r#"{"type":"cube"}"#).is_err());
        assert!(parse_body(r#"{"type":"ball","radius":1,"center":[0,0],"extra":1}"#).is_err());
    }

    #[test]
    fn document_round_trip() {
        for text in [
            r#"{"type":"ellipsoid","semiaxes":[2.0,1.0]}"#,
            r#"{"type":"ball","radius":1.5,"center":[0.0,1.0,2.0]}"#,
            r#"{"type":"slab_ball","half_width":0.5,"dim":3}"#,
        ] {
            let body = parse_body(text).unwrap();
            assert_eq!(serde_json::to_string(&body.to_document()).unwrap(), text);
        }
    }

    #[test]
    fn square_support_and_contact() {
        let body = Body::Polytope(square());
        let s = body.support(&UnitDirection::axis(2, 0)).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(sorted_points(&s.contact), vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn ellipse_support_matches_lagrange_point() {
        let body = Body::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap());
        for k in 0..16 {
            let alpha = k as f64 * PI / 8.0 + 0.1;
            let u = UnitDirection::from_angle(alpha);
            let s = body.support(&u).unwrap();
            let value = (4.0 * alpha.cos().powi(2) + alpha.sin().powi(2)).sqrt();
            assert!((s.value - value).abs() < 1e-14);
            let x = s.contact.representative();
            assert!((x[0] - 4.0 * alpha.cos() / value).abs() < 1e-14);
            assert!((x[1] - alpha.sin() / value).abs() < 1e-14);
            assert!((x.dot(&u) - s.value).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_ball_support() {
        let body = Body::Ball(Ball::unit(3));
        for u in sample_directions(3, 20, 1) {
            let s = body.support(&u).unwrap();
            assert!((s.value - 1.0).abs() < 1e-15);
            assert!((s.contact.representative() - u.as_vector()).norm() < 1e-15);
        }
    }

    #[test]
    fn contact_set_examples() {
        let sq = square();
        let diag = UnitDirection::from_slice(&[1.0, 1.0]).unwrap();
        assert_eq!(sorted_points(&sq.contact_set(&diag, 1e-9)), vec![vec![1.0, 1.0]]);
        let tri = Polytope::from_rows(&[&[0.0, 0.0], &[5.0, 0.0], &[3.2, 2.4]]).unwrap();
        let down = UnitDirection::axis(2, 1).neg();
        assert_eq!(sorted_points(&tri.contact_set(&down, 1e-9)), vec![vec![0.0, 0.0], vec![5.0, 0.0]]);
    }

    #[test]
    fn normal_cone_examples() {
        let sq = square();
        let cone = sq.normal_cone_2d(&vector(&[1.0, 1.0])).unwrap();
        assert!((cone.start - 0.0).abs() < 1e-15 && (cone.width - PI / 2.0).abs() < 1e-15);
        let cone = sq.normal_cone_2d(&vector(&[0.0, 0.0])).unwrap();
        assert!((cone.start - PI).abs() < 1e-15 && (cone.width - PI / 2.0).abs() < 1e-15);
        assert!(sq.normal_cone_2d(&vector(&[0.5, 0.5])).is_err());

        let h = 3f64.sqrt() / 2.0;
        let tri = Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]).unwrap();
        let cone = tri.normal_cone_2d(&vector(&[0.5, h])).unwrap();
        // Edge normals of the two sides meeting at the apex point at 30° and 150°.
        assert!((cone.start - PI / 6.0).abs() < 1e-12);
        assert!((cone.width - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(cone.contains(PI / 2.0, 0.0));
    }

    #[test]
    fn angle_interval_intersections() {
        let a = AngleInterval::between(PI, 1.5 * PI);
        let b = AngleInterval::between(0.5 * PI, PI);
        let i = a.intersect(&b, 1e-12).unwrap();
        assert!((i.start - PI).abs() < 1e-12 && i.width.abs() < 1e-12);
        let c = AngleInterval::between(1.9 * PI, 0.3 * PI);
        let d = AngleInterval::between(0.1 * PI, 0.8 * PI);
        let i = c.intersect(&d, 1e-12).unwrap();
        assert!((i.start - 0.1 * PI).abs() < 1e-12 && (i.width - 0.2 * PI).abs() < 1e-12);
        let i = d.intersect(&c, 1e-12).unwrap();
        assert!((i.start - 0.1 * PI).abs() < 1e-12 && (i.width - 0.2 * PI).abs() < 1e-12);
        assert!(AngleInterval::between(0.0, 0.2).intersect(&AngleInterval::between(1.0, 2.0), 1e-12).is_none());
    }

    #[test]
    fn difference_body_examples() {
        let dk = square().difference_body();
        let mut verts: Vec<Vec<f64>> = dk.vertices().iter().map(|v| v.iter().copied().collect()).collect();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(verts, vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]);

        let tri = Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let mut verts: Vec<Vec<f64>> =
            tri.difference_body().vertices().iter().map(|v| v.iter().copied().collect()).collect();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            verts,
            vec![vec![-1.0, 0.0], vec![-1.0, 1.0], vec![0.0, -1.0], vec![0.0, 1.0], vec![1.0, -1.0], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn slab_ball_piecewise_support() {
        let slab = Body::SlabBall(SlabBall::new(0.5, 2).unwrap());
        let alpha = (0.5f64).acos();
        for k in 0..=20 {
            let theta = k as f64 * (PI / 2.0) / 20.0;
            let s = slab.support_value(&UnitDirection::from_angle(theta));
            let expected = if theta >= alpha { 1.0 } else { (alpha - theta).cos() };
            assert!((s - expected).abs() < 1e-14, "theta {theta}: {s} vs {expected}");
        }
        let e1 = slab.support(&UnitDirection::axis(2, 0)).unwrap();
        assert!(matches!(e1.contact, ContactSet::Disk { .. }));
        assert!((e1.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wide_slab_ball_matches_unit_ball() {
        let slab = Body::SlabBall(SlabBall::new(1.3, 3).unwrap());
        let ball = Body::Ball(Ball::unit(3));
        for u in sample_directions(3, 1000, 8) {
            assert_eq!(slab.support_value(&u), ball.support_value(&u));
        }
    }

    #[test]
    fn clip_line_matches_known_chords() {
        let ball = Body::Ball(Ball::new(2.0, vector(&[1.0, 1.0])).unwrap());
        let (lo, hi) = ball.clip_line(&vector(&[-5.0, 1.0]), &vector(&[1.0, 0.0])).unwrap();
        assert!((lo - 4.0).abs() < 1e-12 && (hi - 8.0).abs() < 1e-12);
        let ell = Body::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap());
        let (lo, hi) = ell.clip_line(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
        assert!((lo + 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        let slab = Body::SlabBall(SlabBall::new(0.5, 2).unwrap());
        let (lo, hi) = slab.clip_line(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
        assert!((lo + 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        assert!(slab.clip_line(&vector(&[0.7, 0.0]), &vector(&[0.0, 1.0])).is_none());
    }

    #[test]
    fn farthest_distance_of_ellipse() {
        let ell = Body::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap());
        assert!((ell.farthest_distance(&vector(&[2.0, 0.0])) - 4.0).abs() < 1e-9);
        assert!((ell.farthest_distance(&vector(&[0.0, 0.0])) - 2.0).abs() < 1e-9);
    }
}
