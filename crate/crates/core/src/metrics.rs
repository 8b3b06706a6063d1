//! Directional functionals: width, directional diameter, thickness, diameter,
//! the Lipschitz constants, and the contact/chord quantities s, p, r, q.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{AngleInterval, Body, ContactSet, Polytope};
use crate::error::{GeometryError, Result};
use crate::lp::{maximize, LpOutcome};
use crate::sphere::{sample_directions, UnitDirection, Vector};

/// Radicands of p and q down to this value are treated as rounding and clamped.
pub const RADICAND_CLAMP: f64 = 1e-12;
/// Radicands at or below this (relative) are treated as exact zeros.
const ROUNDING_FLOOR: f64 = 16.0 * f64::EPSILON;

/// Relative tolerance for chord membership and diametral-chord ties.
pub const CHORD_TOL: f64 = 1e-9;

/// Angular tolerance (radians) when intersecting planar normal cones.
/// Relative distance within which a chord end counts as lying on a facet.
pub const FACE_TOL: f64 = 1e-7;
pub const CONE_ANGLE_TOL: f64 = 1e-9;

/// Segment `[a, b]` inside the body.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chord {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub length: f64,
}

impl Chord {
    fn new(a: &Vector, b: &Vector) -> Self {
        Self { a: a.iter().copied().collect(), b: b.iter().copied().collect(), length: (b - a).norm() }
    }
}

/// Global scalars of a body.
#[derive(Clone, Debug, Serialize)]
pub struct BodyStats {
    pub delta: f64,
    pub omega: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub omega_direction: Vec<f64>,
    pub diameter_chord: Chord,
}

/// Per-direction bundle of all functionals.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionalSample {
    pub u: Vec<f64>,
    pub w: f64,
    pub d: f64,
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub q: f64,
}

/// Outward normals `v` admitted at the chord ends: `v` normal at `a` and
/// `−v` normal at `b`.
#[derive(Clone, Debug)]
pub enum AdmissibleNormals {
    /// Planar bodies: an arc of normal angles.
    Arc(AngleInterval),
    /// Extreme rays of the (pointed) polyhedral cone, or the unique normal.
    Rays(Vec<UnitDirection>),
}

impl AdmissibleNormals {
    /// Unit normals at which ⟨a − b, v⟩ can be minimal.
    pub fn candidates(&self) -> Vec<Vector> {
        match self {
            AdmissibleNormals::Arc(arc) => {
                let mut out = vec![UnitDirection::from_angle(arc.start).into_vector()];
                if arc.width > 0.0 {
                    out.push(UnitDirection::from_angle(arc.end()).into_vector());
                }
                out
            }
            AdmissibleNormals::Rays(rays) => rays.iter().map(|r| r.as_vector().clone()).collect(),
        }
    }
}

/// Maximal chord `[a, b]` parallel to `direction`, oriented so that
/// `b − a = |ab|·direction`.
#[derive(Clone, Debug)]
pub struct DiametralChord {
    pub a: Vector,
    pub b: Vector,
    pub direction: UnitDirection,
    /// Smallest distance between parallel supporting hyperplanes through `a`
    /// and `b`.
    pub strip_width: f64,
    pub admissible_normals: AdmissibleNormals,
}

impl DiametralChord {
    pub fn length(&self) -> f64 {
        (&self.b - &self.a).norm()
    }
}

/// Whether a direction avoids the exceptional sets of a polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityFlag {
    pub generic_for_width: bool,
    pub generic_for_diameter: bool,
}

/// Maxima of p and q over the sphere.
#[derive(Clone, Debug, Serialize)]
pub struct HatConstants {
    pub m_hat: f64,
    pub n_hat: f64,
    pub m_hat_direction: Vec<f64>,
    pub n_hat_direction: Vec<f64>,
    /// Sup of p and q over directions just off the candidate set, which
    /// approximates the sup over generic directions.
    pub m_hat_generic: f64,
    pub n_hat_generic: f64,
    /// True for planar polytopes, where the candidate set is complete.
    pub exact: bool,
}

fn check_dim(body: &Body, u: &Vector) {
    assert_eq!(u.len(), body.dim(), "direction dimension does not match the body");
}

/// w(u) = h(u) + h(−u).
///
/// # Panics
/// If `u` and the body have different dimensions.
pub fn width(body: &Body, u: &UnitDirection) -> f64 {
    check_dim(body, u);
    match body {
        Body::Polytope(p) => {
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for v in p.vertices() {
                let x = v.dot(u);
                hi = hi.max(x);
                lo = lo.min(x);
            }
            hi - lo
        }
        Body::Ball(b) => 2.0 * b.radius(),
        Body::SlabBall(s) if u[0].abs() <= s.effective_half_width() => 2.0,
        _ => body.support_value(u) + body.support_value(&-u.as_vector()),
    }
}

/// d(u): length of the longest chord parallel to `u`.
///
/// Polytopes shoot the ray `t·u` against the facets of the difference body.
/// The other bodies are centrally symmetric, so d(u) is twice the radial
/// function of the body about its centre.
///
/// # Panics
/// If `u` and the body have different dimensions.
pub fn dir_diameter(body: &Body, u: &UnitDirection) -> f64 {
    check_dim(body, u);
    match body {
        Body::Polytope(p) => ray_shoot(p, u),
        Body::Ellipsoid(e) => {
            let g: f64 = e.semiaxes().iter().zip(u.iter()).map(|(a, x)| (x / a).powi(2)).sum();
            2.0 / g.sqrt()
        }
        Body::Ball(b) => 2.0 * b.radius(),
        Body::SlabBall(s) => {
            let h = s.effective_half_width();
            let u1 = u[0].abs();
            if u1 <= h {
                2.0
            } else {
                2.0 * h / u1
            }
        }
    }
}

fn ray_shoot(p: &Polytope, u: &Vector) -> f64 {
    let reach = p
        .difference_hull()
        .facets()
        .iter()
        .map(|f| f.normal.dot(u) / f.offset)
        .fold(f64::NEG_INFINITY, f64::max);
    1.0 / reach
}

/// d(u) for a polytope from the linear program
/// `max t : Σμⱼvⱼ − Σλᵢvᵢ = t·u, Σλ = Σμ = 1, λ, μ, t ≥ 0`.
pub fn dir_diameter_lp(p: &Polytope, u: &UnitDirection) -> Result<f64> {
    lp_chord(p, u).map(|(t, _, _)| t)
}

fn lp_chord(p: &Polytope, u: &Vector) -> Result<(f64, Vector, Vector)> {
    let verts = p.vertices();
    let m = verts.len();
    let n = p.dim();
    let cols = 2 * m + 1;
    let mut a = vec![vec![0.0; cols]; n + 2];
    for (i, v) in verts.iter().enumerate() {
        for k in 0..n {
            a[k][i] = -v[k];
            a[k][m + i] = v[k];
        }
        a[n][i] = 1.0;
        a[n + 1][m + i] = 1.0;
    }
    for k in 0..n {
        a[k][2 * m] = -u[k];
    }
    let mut b = vec![0.0; n + 2];
    b[n] = 1.0;
    b[n + 1] = 1.0;
    let mut c = vec![0.0; cols];
    c[2 * m] = 1.0;
    match maximize(&a, &b, &c) {
        LpOutcome::Optimal { x, value } => {
            let mut from = DVector::zeros(n);
            let mut to = DVector::zeros(n);
            for (i, v) in verts.iter().enumerate() {
                from += v * x[i];
                to += v * x[m + i];
            }
            Ok((value, from, to))
        }
        other => Err(GeometryError::Inconsistent(format!("chord program ended with {other:?}"))),
    }
}

/// δ and a witnessing chord.
pub fn global_diameter(body: &Body) -> (f64, Chord) {
    match body {
        Body::Polytope(p) => {
            let verts = p.vertices();
            let mut best = (0.0, 0, 0);
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    let d = (&verts[i] - &verts[j]).norm();
                    if d > best.0 {
                        best = (d, i, j);
                    }
                }
            }
            (best.0, Chord::new(&verts[best.1], &verts[best.2]))
        }
        Body::Ellipsoid(e) => {
            let (k, a) = argmax(e.semiaxes());
            let mut x = DVector::zeros(e.semiaxes().len());
            x[k] = a;
            (2.0 * a, Chord::new(&-&x, &x))
        }
        Body::Ball(b) => {
            let mut x = DVector::zeros(b.center().len());
            x[0] = b.radius();
            (2.0 * b.radius(), Chord::new(&(b.center() - &x), &(b.center() + &x)))
        }
        Body::SlabBall(s) => {
            let mut x = DVector::zeros(s.dim());
            x[1] = 1.0;
            (2.0, Chord::new(&-&x, &x))
        }
    }
}

fn argmax(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc })
}

/// ω and a direction attaining it.
pub fn thickness(body: &Body) -> (f64, UnitDirection) {
    let dim = body.dim();
    match body {
        Body::Polytope(p) if dim == 2 => rotating_calipers(p),
        Body::Polytope(p) => {
            // Widths are the support function of the difference body, whose
            // minimum over the sphere sits at a facet normal.
            let f = p
                .difference_hull()
                .facets()
                .iter()
                .min_by(|a, b| a.offset.total_cmp(&b.offset))
                .expect("difference body has facets");
            (f.offset, UnitDirection::normalize(f.normal.clone()).expect("unit facet normal"))
        }
        Body::Ellipsoid(e) => {
            let (k, a) = e.semiaxes().iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, x)| {
                if x < acc.1 {
                    (i, x)
                } else {
                    acc
                }
            });
            (2.0 * a, UnitDirection::axis(dim, k))
        }
        Body::Ball(b) => (2.0 * b.radius(), UnitDirection::axis(dim, 0)),
        Body::SlabBall(s) => (2.0 * s.effective_half_width(), UnitDirection::axis(dim, 0)),
    }
}

fn rotating_calipers(p: &Polytope) -> (f64, UnitDirection) {
    let verts = p.vertices();
    let facets = p.hull().facets();
    let m = verts.len();
    let mut j = (0..m).min_by(|&a, &b| facets[0].normal.dot(&verts[a]).total_cmp(&facets[0].normal.dot(&verts[b]))).unwrap();
    let mut best = (f64::INFINITY, 0);
    for (i, f) in facets.iter().enumerate() {
        let mut steps = 0;
        while steps < m && f.normal.dot(&verts[(j + 1) % m]) < f.normal.dot(&verts[j]) {
            j = (j + 1) % m;
            steps += 1;
        }
        let w = f.offset - f.normal.dot(&verts[j]);
        if w < best.0 {
            best = (w, i);
        }
    }
    (best.0, UnitDirection::normalize(facets[best.1].normal.clone()).expect("unit edge normal"))
}

/// M = √(δ² − ω²) and N = (δ/ω)·M.
pub fn lipschitz_constants(delta: f64, omega: f64) -> Result<(f64, f64)> {
    if !(delta.is_finite() && omega.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if omega <= 0.0 {
        return Err(GeometryError::NonPositive { what: "thickness", value: omega });
    }
    if delta < omega * (1.0 - 1e-12) {
        return Err(GeometryError::Invalid(format!("diameter {delta} is below thickness {omega}")));
    }
    let m = (delta * delta - omega * omega).max(0.0).sqrt();
    Ok((m, delta / omega * m))
}

/// δ, ω, M, N with witnesses.
pub fn body_stats(body: &Body) -> BodyStats {
    let (delta, chord) = global_diameter(body);
    let (omega, dir) = thickness(body);
    let (m, n) = lipschitz_constants(delta, omega).expect("δ ≥ ω > 0 for convex bodies");
    BodyStats { delta, omega, m, n, omega_direction: dir.iter().copied().collect(), diameter_chord: chord }
}

/// Contact sets of `u` and `−u`.
pub fn contact_pair(body: &Body, u: &UnitDirection) -> Result<(ContactSet, ContactSet)> {
    let plus = body.support(u)?.contact;
    let minus = body.support(&u.neg())?.contact;
    Ok((plus, minus))
}

/// s(u): largest distance between a contact point of `u` and one of `−u`.
pub fn s_of(body: &Body, u: &UnitDirection) -> Result<f64> {
    let (plus, minus) = contact_pair(body, u)?;
    Ok(plus.max_distance(&minus))
}

fn clamped_root(radicand: f64, scale: f64, what: &str) -> Result<f64> {
    if radicand < -RADICAND_CLAMP * scale.max(1.0) {
        return Err(GeometryError::Inconsistent(format!("{what} radicand {radicand:e} is negative")));
    }
    // A radicand within a few ulps of zero is rounding, not signal.
    if radicand <= ROUNDING_FLOOR * scale.max(1.0) {
        return Ok(0.0);
    }
    Ok(radicand.sqrt())
}

/// p(u) = √(s² − w²).
pub fn p_of(body: &Body, u: &UnitDirection) -> Result<f64> {
    let s = s_of(body, u)?;
    let w = width(body, u);
    clamped_root(s * s - w * w, s * s, "p")
}

/// Unit outward normal cone of a planar polygon at a boundary point.
fn boundary_cone_2d(p: &Polytope, x: &Vector) -> AngleInterval {
    let tol = CHORD_TOL * p.scale();
    if let Some(i) = p.vertex_index(x).or_else(|| p.vertices().iter().position(|v| (v - x).norm() <= tol)) {
        return p.vertex_cone_2d(i);
    }
    let facet = p
        .hull()
        .facets()
        .iter()
        .max_by(|a, b| (a.normal.dot(x) - a.offset).total_cmp(&(b.normal.dot(x) - b.offset)))
        .expect("polygon has edges");
    AngleInterval::point(facet.normal[1].atan2(facet.normal[0]))
}

/// H-description `{v : ⟨g, v⟩ ≤ 0}` of the normal cone at `x`, rows normalized.
///
/// The rows come from vertex coordinates only. `x` picks out its minimal
/// face F (the vertices shared by every facet within tolerance), and the cone
/// is written as ⟨w − f₀, v⟩ ≤ 0 for all vertices w together with
/// ⟨f − f₀, v⟩ = 0 along F. Rows built from `x` itself would inherit its
/// rounding, which is enough to empty a cone that is a single ray.
fn normal_cone_rows(p: &Polytope, x: &Vector, sign: f64, rows: &mut Vec<Vector>) {
    let tol = FACE_TOL * p.scale();
    let facets = p.hull().facets();
    let mut face: Option<Vec<usize>> = None;
    for f in facets.iter().filter(|f| (f.normal.dot(x) - f.offset).abs() <= tol) {
        face = Some(match face {
            None => f.vertices.clone(),
            Some(cur) => cur.into_iter().filter(|i| f.vertices.contains(i)).collect(),
        });
    }
    let face = match face {
        Some(f) if !f.is_empty() => f,
        _ => {
            let nearest = facets
                .iter()
                .min_by(|a, b| (a.normal.dot(x) - a.offset).abs().total_cmp(&(b.normal.dot(x) - b.offset).abs()))
                .expect("polytope has facets");
            nearest.vertices.clone()
        }
    };
    let verts = p.vertices();
    let base = &verts[face[0]];
    let mut push = |g: Vector| {
        let norm = g.norm();
        if norm > 0.0 {
            rows.push(g / norm);
        }
    };
    for w in verts {
        push((w - base) * sign);
    }
    for &i in &face[1..] {
        push((base - &verts[i]) * sign);
    }
}

/// Unit null vector of `n − 1` rows in ℝⁿ by generalized cross product.
fn null_vector(rows: &[&Vector], dim: usize) -> Option<Vector> {
    let mut z = DVector::zeros(dim);
    let mut minor = DMatrix::zeros(dim - 1, dim - 1);
    for skip in 0..dim {
        for (r, row) in rows.iter().enumerate() {
            let mut c = 0;
            for k in 0..dim {
                if k != skip {
                    minor[(r, c)] = row[k];
                    c += 1;
                }
            }
        }
        let det = minor.determinant();
        z[skip] = if skip % 2 == 0 { det } else { -det };
    }
    let norm = z.norm();
    (norm > 1e-10).then(|| z / norm)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

/// Extreme rays of the pointed cone `{v : G v ≤ 0}` by enumerating every
/// choice of `n − 1` active constraints.
pub fn cone_extreme_rays(rows: &[Vector], dim: usize) -> Vec<UnitDirection> {
    let mut unique: Vec<Vector> = Vec::new();
    for r in rows {
        if !unique.iter().any(|u| (u - r).norm() < 1e-12) {
            unique.push(r.clone());
        }
    }
    let mut rays: Vec<Vector> = Vec::new();
    for_each_subset(unique.len(), dim - 1, &mut |idx| {
        let sub: Vec<&Vector> = idx.iter().map(|&i| &unique[i]).collect();
        let Some(z) = null_vector(&sub, dim) else { return };
        for cand in [z.clone(), -z] {
            if unique.iter().all(|g| g.dot(&cand) <= 1e-9) && !rays.iter().any(|r| (r - &cand).norm() < 1e-9) {
                rays.push(cand);
            }
        }
    });
    rays.into_iter().map(|r| UnitDirection::normalize(r).expect("unit ray")).collect()
}

fn polygon_chord(p: &Polytope, a: Vector, b: Vector, u: &UnitDirection) -> Result<DiametralChord> {
    let cone_a = boundary_cone_2d(p, &a);
    let cone_b = boundary_cone_2d(p, &b);
    let arc = cone_a.intersect(&cone_b.opposite(), CONE_ANGLE_TOL).ok_or_else(|| {
        GeometryError::Inconsistent(format!(
            "diametral chord without parallel supporting lines at angle {}",
            u.angle_2d()
        ))
    })?;
    let admissible = AdmissibleNormals::Arc(arc);
    let strip = strip_width(&a, &b, &admissible);
    Ok(DiametralChord { a, b, direction: u.clone(), strip_width: strip, admissible_normals: admissible })
}

fn strip_width(a: &Vector, b: &Vector, normals: &AdmissibleNormals) -> f64 {
    let ab = a - b;
    normals.candidates().iter().map(|v| ab.dot(v)).fold(f64::INFINITY, f64::min)
}

fn polygon_chords(p: &Polytope, u: &UnitDirection) -> Result<Vec<DiametralChord>> {
    let perp = Vector::from_column_slice(&[-u[1], u[0]]);
    let tol = CHORD_TOL * p.scale();
    let mut lines: Vec<(f64, f64, Vector, Vector)> = Vec::new();
    for v in p.vertices() {
        if let Some((lo, hi)) = p.hull().clip_line(v, u) {
            // `v` is on the boundary, so it is one end of its chord; keep it
            // exact rather than reconstructing it from the clip parameters.
            let (a, b) = if lo.abs() <= hi.abs() {
                (v.clone(), v + u.as_vector() * hi)
            } else {
                (v + u.as_vector() * lo, v.clone())
            };
            lines.push((perp.dot(v), hi - lo, a, b));
        }
    }
    let best = lines.iter().map(|l| l.1).fold(0.0, f64::max);
    let mut top: Vec<&(f64, f64, Vector, Vector)> = lines.iter().filter(|l| l.1 >= best - tol).collect();
    top.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut picked = vec![top[0]];
    let last = top[top.len() - 1];
    if last.0 - top[0].0 > tol {
        picked.push(last);
    }
    // Near a vertex-pair direction two chords can tie within tolerance while
    // only one is exactly diametral; the other has no parallel support.
    let mut chords = Vec::new();
    let mut last_err = None;
    for l in picked {
        match polygon_chord(p, l.2.clone(), l.3.clone(), u) {
            Ok(c) => chords.push(c),
            Err(e) => last_err = Some(e),
        }
    }
    match last_err {
        Some(e) if chords.is_empty() => Err(e),
        _ => Ok(chords),
    }
}

fn polytope_chords_nd(p: &Polytope, u: &UnitDirection) -> Result<Vec<DiametralChord>> {
    let d = ray_shoot(p, u);
    let step = u.as_vector() * d;
    let tol = CHORD_TOL * p.scale();
    let mut ends: Vec<(Vector, Vector)> = Vec::new();
    for v in p.vertices() {
        for (a, b) in [(v.clone(), v + &step), (v - &step, v.clone())] {
            let other = if &a == v { &b } else { &a };
            if p.hull().signed_distance(other) <= tol && !ends.iter().any(|(x, _)| (x - &a).norm() <= tol) {
                ends.push((a, b));
            }
        }
    }
    let chord_at = |a: Vector, b: Vector| {
        let mut rows = Vec::new();
        normal_cone_rows(p, &a, 1.0, &mut rows);
        normal_cone_rows(p, &b, -1.0, &mut rows);
        let rays = cone_extreme_rays(&rows, p.dim());
        if rays.is_empty() {
            return None;
        }
        let admissible = AdmissibleNormals::Rays(rays);
        let strip = strip_width(&a, &b, &admissible);
        Some(DiametralChord { a, b, direction: u.clone(), strip_width: strip, admissible_normals: admissible })
    };
    // Vertex ray-shooting accepts chords within tolerance of maximal; those
    // that are not exactly diametral have no admissible normal and drop out.
    let mut chords: Vec<DiametralChord> = ends.into_iter().filter_map(|(a, b)| chord_at(a, b)).collect();
    if chords.is_empty() {
        let (_, a, b) = lp_chord(p, u)?;
        chords.extend(chord_at(a, b));
    }
    if chords.is_empty() {
        return Err(GeometryError::Inconsistent(format!("empty admissible normal cone at {:?}", u.as_slice())));
    }
    Ok(chords)
}

/// Outward unit normals at a boundary point of a smooth or slab body.
fn smooth_normals(body: &Body, x: &Vector) -> Vec<UnitDirection> {
    match body {
        Body::Ellipsoid(e) => {
            let g = DVector::from_fn(x.len(), |i, _| x[i] / e.semiaxes()[i].powi(2));
            vec![UnitDirection::normalize(g).expect("nonzero gradient")]
        }
        Body::Ball(b) => vec![UnitDirection::normalize(x - b.center()).expect("boundary point off centre")],
        Body::SlabBall(s) => {
            let h = s.effective_half_width();
            let on_face = x[0].abs() >= h - 1e-12;
            let on_sphere = x.norm() >= 1.0 - 1e-12;
            let mut out = Vec::new();
            if on_sphere {
                out.push(UnitDirection::normalize(x.clone()).expect("unit point"));
            }
            if on_face {
                let e1 = UnitDirection::axis(x.len(), 0);
                out.push(if x[0] < 0.0 { e1.neg() } else { e1 });
            }
            out
        }
        Body::Polytope(_) => unreachable!("polytopes use the cone enumeration"),
    }
}

/// All diametral chords parallel to `u`. Families of parallel chords in the
/// plane are represented by their two extreme members.
pub fn diametral_chords(body: &Body, u: &UnitDirection) -> Result<Vec<DiametralChord>> {
    body.check_dim(u)?;
    match body {
        Body::Polytope(p) if p.dim() == 2 => polygon_chords(p, u),
        Body::Polytope(p) => polytope_chords_nd(p, u),
        _ => {
            // Centrally symmetric bodies: the central chord is diametral.
            let centre = match body {
                Body::Ball(b) => b.center().clone(),
                _ => DVector::zeros(body.dim()),
            };
            let half = u.as_vector() * (dir_diameter(body, u) / 2.0);
            let a = &centre - &half;
            let b = &centre + &half;
            let na = smooth_normals(body, &a);
            let nb: Vec<UnitDirection> = smooth_normals(body, &b).into_iter().map(|v| v.neg()).collect();
            // For a centrally symmetric body N(b) = −N(a), so the admissible
            // set is N(a); keep only normals shared by both ends.
            let rays: Vec<UnitDirection> = na
                .into_iter()
                .filter(|v| nb.iter().any(|w| (v.as_vector() - w.as_vector()).norm() < 1e-9))
                .collect();
            if rays.is_empty() {
                return Err(GeometryError::Inconsistent("empty admissible normal set".into()));
            }
            let admissible = AdmissibleNormals::Rays(rays);
            let strip = strip_width(&a, &b, &admissible);
            Ok(vec![DiametralChord { a, b, direction: u.clone(), strip_width: strip, admissible_normals: admissible }])
        }
    }
}

/// r(u): infimum over diametral chords and admissible normals of the strip width.
pub fn r_of(body: &Body, u: &UnitDirection) -> Result<f64> {
    Ok(diametral_chords(body, u)?.iter().map(|c| c.strip_width).fold(f64::INFINITY, f64::min))
}

/// q(u) = d·√(d²/r² − 1).
pub fn q_of(body: &Body, u: &UnitDirection) -> Result<f64> {
    let d = dir_diameter(body, u);
    let r = r_of(body, u)?;
    q_from(d, r)
}

fn q_from(d: f64, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(GeometryError::Inconsistent(format!("strip width {r} is not positive")));
    }
    let ratio = d / r;
    Ok(d * clamped_root(ratio * ratio - 1.0, 1.0, "q")?)
}

/// All six functionals at `u`.
pub fn sample(body: &Body, u: &UnitDirection) -> Result<DirectionalSample> {
    body.check_dim(u)?;
    let w = width(body, u);
    let d = dir_diameter(body, u);
    let s = s_of(body, u)?;
    let p = clamped_root(s * s - w * w, s * s, "p")?;
    let r = r_of(body, u)?;
    let q = q_from(d, r)?;
    Ok(DirectionalSample { u: u.iter().copied().collect(), w, d, s, p, r, q })
}

/// [`sample`] over many directions, evaluated in parallel, in input order.
pub fn profile(body: &Body, directions: &[UnitDirection]) -> Result<Vec<DirectionalSample>> {
    directions.par_iter().map(|u| sample(body, u)).collect()
}

/// Width- and diameter-genericity of `u` for a polytope.
pub fn genericity(p: &Polytope, u: &UnitDirection) -> Result<GenericityFlag> {
    let body = Body::Polytope(p.clone());
    genericity_of(&body, p, u)
}

fn genericity_of(body: &Body, p: &Polytope, u: &UnitDirection) -> Result<GenericityFlag> {
    let (plus, minus) = contact_pair(body, u)?;
    let generic_for_width = plus.is_singleton() && minus.is_singleton();
    let chords = diametral_chords(body, u)?;
    let generic_for_diameter = chords.len() == 1 && {
        let c = &chords[0];
        let tol = CHORD_TOL * p.scale();
        let facets_at = |x: &Vector| p.hull().facets().iter().filter(|f| (f.normal.dot(x) - f.offset).abs() <= tol).count();
        let (va, vb) = (p.vertex_index(&c.a).is_some(), p.vertex_index(&c.b).is_some());
        (va && !vb && facets_at(&c.b) == 1) || (vb && !va && facets_at(&c.a) == 1)
    };
    Ok(GenericityFlag { generic_for_width, generic_for_diameter })
}

/// Offset used to step off exceptional directions when estimating the sup
/// over generic directions.
const GENERIC_OFFSET: f64 = 1e-7;

/// Candidate directions where p or q can peak.
fn hat_candidates(p: &Polytope) -> Vec<UnitDirection> {
    let dim = p.dim();
    let mut out = Vec::new();
    let mut push = |v: Vector| {
        if let Ok(u) = UnitDirection::normalize(v) {
            out.push(u);
        }
    };
    for f in p.hull().facets() {
        push(f.normal.clone());
    }
    for f in p.difference_hull().facets() {
        push(f.normal.clone());
    }
    let verts = p.vertices();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let e = &verts[j] - &verts[i];
            if dim == 2 {
                push(Vector::from_column_slice(&[-e[1], e[0]]));
            }
            push(e);
        }
    }
    out
}

/// Prefix-stable sweep: resolution `k` uses the first `k` directions of a
/// fixed sequence, so the maxima are nondecreasing in `k`.
fn sweep_directions(dim: usize, resolution: usize) -> Vec<UnitDirection> {
    if dim == 2 {
        const GOLDEN: f64 = 0.618_033_988_749_894_9;
        (0..resolution).map(|k| UnitDirection::from_angle(PI * (k as f64 * GOLDEN).fract())).collect()
    } else {
        sample_directions(dim, resolution, 0x68_6174)
    }
}

/// M̂ = max p and N̂ = max q over the sphere, from the exceptional candidate
/// directions plus a sweep of `resolution` directions.
pub fn hat_constants(p: &Polytope, resolution: usize) -> Result<HatConstants> {
    let body = Body::Polytope(p.clone());
    let dim = p.dim();
    let candidates = hat_candidates(p);
    let mut dirs = candidates.clone();
    dirs.extend(sweep_directions(dim, resolution));
    let values: Vec<(f64, f64)> = dirs
        .par_iter()
        .map(|u| Ok((p_of(&body, u)?, q_of(&body, u)?)))
        .collect::<Result<_>>()?;
    let (mut mi, mut ni) = (0, 0);
    for (i, v) in values.iter().enumerate() {
        if v.0 > values[mi].0 {
            mi = i;
        }
        if v.1 > values[ni].1 {
            ni = i;
        }
    }
    let mut generic_dirs = Vec::new();
    for (k, u) in candidates.iter().enumerate() {
        if dim == 2 {
            let t = u.angle_2d();
            generic_dirs.push(UnitDirection::from_angle(t + GENERIC_OFFSET));
            generic_dirs.push(UnitDirection::from_angle(t - GENERIC_OFFSET));
        } else {
            let mut rng = crate::sphere::keyed_rng(0x67_656e, 0, k as u64);
            let t = crate::sphere::random_tangent(u, &mut rng);
            generic_dirs.push(crate::sphere::exp_map(u, &t, GENERIC_OFFSET));
            generic_dirs.push(crate::sphere::exp_map(u, &t, -GENERIC_OFFSET));
        }
    }
    let generic: Vec<(f64, f64)> = generic_dirs
        .par_iter()
        .map(|u| {
            let g = genericity_of(&body, p, u)?;
            let pv = if g.generic_for_width { p_of(&body, u)? } else { 0.0 };
            let qv = if g.generic_for_diameter { q_of(&body, u)? } else { 0.0 };
            Ok((pv, qv))
        })
        .collect::<Result<_>>()?;
    let m_hat_generic = generic.iter().map(|v| v.0).fold(0.0, f64::max);
    let n_hat_generic = generic.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok(HatConstants {
        m_hat: values[mi].0,
        n_hat: values[ni].1,
        m_hat_direction: dirs[mi].iter().copied().collect(),
        n_hat_direction: dirs[ni].iter().copied().collect(),
        m_hat_generic,
        n_hat_generic,
        exact: dim == 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{Ball, Ellipsoid, SlabBall};
    use crate::sphere::vector;

    fn square() -> Body {
        Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap())
    }

    fn triangle_345() -> Body {
        Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[5.0, 0.0], &[3.2, 2.4]]).unwrap())
    }

    fn ellipse() -> Body {
        Body::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap())
    }

    fn diag() -> UnitDirection {
        UnitDirection::from_slice(&[1.0, 1.0]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn width_examples() {
        assert_eq!(width(&square(), &UnitDirection::axis(2, 0)), 1.0);
        let ball = Body::Ball(Ball::unit(3));
        assert_eq!(width(&ball, &UnitDirection::from_slice(&[1.0, 2.0, 3.0]).unwrap()), 2.0);
        let w = width(&ellipse(), &UnitDirection::from_angle(PI / 4.0));
        assert!(close(w, 2.0 * 2.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn dir_diameter_examples() {
        assert!(close(dir_diameter(&square(), &diag()), 2f64.sqrt(), 1e-14));
        assert_eq!(dir_diameter(&Body::Ball(Ball::unit(2)), &diag()), 2.0);
        let d = dir_diameter(&ellipse(), &UnitDirection::from_angle(PI / 4.0));
        assert!(close(d, 4.0 / 2.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn lp_agrees_with_ray_shooting() {
        let Body::Polytope(p) = triangle_345() else { unreachable!() };
        for k in 0..50 {
            let u = UnitDirection::from_angle(k as f64 * 0.123);
            let lp = dir_diameter_lp(&p, &u).unwrap();
            assert!(close(lp, ray_shoot(&p, &u), 1e-9), "{k}");
        }
    }

    #[test]
    fn global_diameter_examples() {
        let (d, chord) = global_diameter(&triangle_345());
        assert_eq!(d, 5.0);
        assert_eq!(chord.length, 5.0);
        let boxed = Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0], &[0.0, 2.0]]).unwrap());
        assert!(close(global_diameter(&boxed).0, 5f64.sqrt(), 1e-15));
        let slab = Body::SlabBall(SlabBall::new(0.5, 2).unwrap());
        assert_eq!(global_diameter(&slab).0, 2.0);
    }

    #[test]
    fn thickness_examples() {
        let (w, u) = thickness(&triangle_345());
        assert!(close(w, 2.4, 1e-12));
        assert!(close(u[1].abs(), 1.0, 1e-12));
        let (w, u) = thickness(&square());
        assert_eq!(w, 1.0);
        assert!(u[0].abs() == 1.0 || u[1].abs() == 1.0);
        assert_eq!(thickness(&Body::Ball(Ball::unit(2))).0, 2.0);
    }

    #[test]
    fn thickness_3d_uses_difference_body_facets() {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..8 {
            rows.push(vec![(i & 1) as f64, 2.0 * ((i >> 1) & 1) as f64, 3.0 * ((i >> 2) & 1) as f64]);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let body = Body::Polytope(Polytope::from_rows(&refs).unwrap());
        let (w, u) = thickness(&body);
        assert!(close(w, 1.0, 1e-12));
        assert!(close(u[0].abs(), 1.0, 1e-12));
        for v in sample_directions(3, 2000, 3) {
            assert!(width(&body, &v) >= w - 1e-9);
        }
    }

    #[test]
    fn lipschitz_constant_examples() {
        let (m, n) = lipschitz_constants(5.0, 2.4).unwrap();
        assert!(close(m, 19.24f64.sqrt(), 1e-14) && close(n, 5.0 / 2.4 * 19.24f64.sqrt(), 1e-13));
        assert_eq!(lipschitz_constants(2.0, 2.0).unwrap(), (0.0, 0.0));
        let (m, n) = lipschitz_constants(5f64.sqrt(), 1.0).unwrap();
        assert!(close(m, 2.0, 1e-15) && close(n, 2.0 * 5f64.sqrt(), 1e-14));
        assert!(lipschitz_constants(1.0, 0.0).is_err());
        assert!(lipschitz_constants(1.0, 2.0).is_err());
    }

    #[test]
    fn s_and_p_examples() {
        let e1 = UnitDirection::axis(2, 0);
        assert!(close(s_of(&square(), &e1).unwrap(), 2f64.sqrt(), 1e-15));
        assert!(close(p_of(&square(), &e1).unwrap(), 1.0, 1e-15));
        let ball = Body::Ball(Ball::unit(2));
        assert!(close(s_of(&ball, &diag()).unwrap(), 2.0, 1e-15));
        assert!(p_of(&ball, &diag()).unwrap() < 1e-7);
        let u = UnitDirection::from_angle(PI / 4.0);
        assert!(close(s_of(&ellipse(), &u).unwrap(), 2.0 * (8.5f64 / 2.5).sqrt(), 1e-14));
        assert!(close(p_of(&ellipse(), &u).unwrap(), 3.0 / 2.5f64.sqrt(), 1e-13));
    }

    #[test]
    fn diametral_chord_examples() {
        let chords = diametral_chords(&square(), &UnitDirection::axis(2, 0)).unwrap();
        assert_eq!(chords.len(), 2);
        for c in &chords {
            assert!(close(c.length(), 1.0, 1e-15));
        }
        let ys: Vec<f64> = chords.iter().map(|c| c.a[1]).collect();
        assert_eq!(ys, vec![0.0, 1.0]);

        let chords = diametral_chords(&ellipse(), &UnitDirection::axis(2, 0)).unwrap();
        assert_eq!(chords.len(), 1);
        assert!((&chords[0].a - vector(&[-2.0, 0.0])).norm() < 1e-15);
        assert!((&chords[0].b - vector(&[2.0, 0.0])).norm() < 1e-15);

        let h = 3f64.sqrt() / 2.0;
        let tri = Body::Polytope(Polytope::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]).unwrap());
        let chords = diametral_chords(&tri, &UnitDirection::from_slice(&[0.5, h]).unwrap()).unwrap();
        assert_eq!(chords.len(), 1);
        assert!(chords[0].a.norm() < 1e-12);
        assert!((&chords[0].b - vector(&[0.5, h])).norm() < 1e-12);
    }

    #[test]
    fn r_and_q_examples() {
        let e1 = UnitDirection::axis(2, 0);
        assert!(close(r_of(&square(), &e1).unwrap(), 1.0, 1e-15));
        assert_eq!(q_of(&square(), &e1).unwrap(), 0.0);
        let ball = Body::Ball(Ball::new(1.0, vector(&[3.0, -1.0])).unwrap());
        assert!(close(r_of(&ball, &diag()).unwrap(), 2.0, 1e-15));
        assert!(q_of(&ball, &diag()).unwrap() < 1e-6);
        let u = UnitDirection::from_angle(PI / 4.0);
        assert!(close(r_of(&ellipse(), &u).unwrap(), 4.0 * (2.5f64 / 8.5).sqrt(), 1e-14));
        assert!(close(q_of(&ellipse(), &u).unwrap(), 6.0 / 2.5f64.powf(1.5), 1e-13));
        // Side c of the 3-4-5 triangle: strip width h_b = 3.
        assert!(close(r_of(&triangle_345(), &e1).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn planar_cone_path_matches_ray_enumeration() {
        let Body::Polytope(p) = triangle_345() else { unreachable!() };
        for k in 0..40 {
            let u = UnitDirection::from_angle(0.05 + k as f64 * 0.157);
            let arc = r_of(&triangle_345(), &u).unwrap();
            let rays = polytope_chords_nd(&p, &u).unwrap().iter().map(|c| c.strip_width).fold(f64::INFINITY, f64::min);
            assert!(close(arc, rays, 1e-9), "{k}: {arc} vs {rays}");
        }
    }

    #[test]
    fn slab_ball_r_is_piecewise() {
        let slab = Body::SlabBall(SlabBall::new(0.5, 3).unwrap());
        assert!(close(r_of(&slab, &UnitDirection::axis(3, 1)).unwrap(), 2.0, 1e-15));
        assert!(close(r_of(&slab, &UnitDirection::axis(3, 0)).unwrap(), 1.0, 1e-15));
        let tilted = UnitDirection::from_slice(&[0.9, 0.3, 0.1]).unwrap();
        assert!(close(r_of(&slab, &tilted).unwrap(), 1.0, 1e-12));
        assert!(close(s_of(&slab, &UnitDirection::axis(3, 0)).unwrap(), 2.0, 1e-15));
    }

    #[test]
    fn genericity_examples() {
        let Body::Polytope(sq) = square() else { unreachable!() };
        assert!(genericity(&sq, &UnitDirection::from_slice(&[1.0, 2.0]).unwrap()).unwrap().generic_for_width);
        assert!(!genericity(&sq, &UnitDirection::axis(2, 0)).unwrap().generic_for_width);
        let Body::Polytope(tri) = triangle_345() else { unreachable!() };
        assert!(!genericity(&tri, &UnitDirection::axis(2, 1)).unwrap().generic_for_width);
    }

    #[test]
    fn hat_constants_of_triangle() {
        let Body::Polytope(tri) = triangle_345() else { unreachable!() };
        let h = hat_constants(&tri, 256).unwrap();
        assert!(close(h.m_hat, 4.0, 1e-9), "{}", h.m_hat);
        assert!(close(h.n_hat, 20.0 / 3.0, 1e-9), "{}", h.n_hat);
        assert!(h.exact);
        assert!(h.m_hat_generic <= h.m_hat + 1e-9 && h.m_hat_generic > 3.9);
    }

    #[test]
    fn hat_constants_are_monotone_in_resolution() {
        let Body::Polytope(tri) = triangle_345() else { unreachable!() };
        let coarse = hat_constants(&tri, 16).unwrap();
        let fine = hat_constants(&tri, 512).unwrap();
        assert!(fine.m_hat >= coarse.m_hat && fine.n_hat >= coarse.n_hat);
    }
}

