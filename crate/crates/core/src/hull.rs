//! Convex hulls in the plane (monotone chain) and in ℝⁿ (beneath-beyond).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::sphere::Vector;

/// Relative tolerance for orientation and coplanarity tests.
pub const HULL_EPS: f64 = 1e-10;

/// Supporting halfspace `⟨normal, x⟩ ≤ offset` whose boundary carries a facet.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    /// Indices into [`Hull::vertices`] of the extreme points on this facet.
    pub vertices: Vec<usize>,
}

/// Vertex and facet description of a full-dimensional polytope.
#[derive(Clone, Debug)]
pub struct Hull {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
}

impl Hull {
    /// Hull of a point cloud; fails unless the points span ℝⁿ.
    pub fn from_points(points: &[Vector]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| {
            GeometryError::NotFullDimensional("no points".into())
        })?;
        if dim < 2 {
            return Err(GeometryError::DimensionTooSmall(dim));
        }
        for p in points {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::NonFinite);
            }
        }
        if points.len() < dim + 1 {
            return Err(GeometryError::NotFullDimensional(format!(
                "{} points cannot span dimension {dim}",
                points.len()
            )));
        }
        if dim == 2 {
            hull_2d(points)
        } else {
            hull_nd(points, dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points. In the plane they are listed counterclockwise.
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Facets. In the plane, facet `i` is the edge from vertex `i` to `i + 1`.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Largest vertex norm; the length scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }

    /// max over facets of `⟨n, x⟩ − offset`: negative inside, zero on the boundary.
    pub fn signed_distance(&self, x: &Vector) -> f64 {
        self.facets.iter().map(|f| f.normal.dot(x) - f.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Parameter interval `{t : x + t·dir ∈ hull}`, or `None` if the line misses.
    pub fn clip_line(&self, x: &Vector, dir: &Vector) -> Option<(f64, f64)> {
        let tol = HULL_EPS * self.scale();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for f in &self.facets {
            let slope = f.normal.dot(dir);
            let gap = f.offset - f.normal.dot(x);
            if slope.abs() <= 1e-15 * dir.norm() {
                if gap < -tol {
                    return None;
                }
            } else if slope > 0.0 {
                hi = hi.min(gap / slope);
            } else {
                lo = lo.max(gap / slope);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn cross2(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn hull_2d(points: &[Vector]) -> Result<Hull> {
    let mut pts: Vec<&Vector> = points.iter().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = HULL_EPS * scale * scale;
    let mut chain: Vec<&Vector> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &&Vector>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while chain.len() >= start + 2 && cross2(chain[chain.len() - 2], chain[chain.len() - 1], p) <= tol {
                chain.pop();
            }
            chain.push(p);
        }
        chain.pop();
    }
    if chain.len() < 3 {
        return Err(GeometryError::NotFullDimensional("points are collinear".into()));
    }
    let vertices: Vec<Vector> = chain.into_iter().cloned().collect();
    let m = vertices.len();
    let facets = (0..m)
        .map(|i| {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % m]);
            let d = b - a;
            let normal = DVector::from_column_slice(&[d[1], -d[0]]) / d.norm();
            let offset = normal.dot(a);
            Facet { normal, offset, vertices: vec![i, (i + 1) % m] }
        })
        .collect();
    Ok(Hull { dim: 2, vertices, facets })
}

/// Unit normal of the hyperplane through `pts` (exactly `dim` points).
fn hyperplane_normal(pts: &[&Vector], dim: usize) -> Option<Vector> {
    let edges = DMatrix::from_fn(dim - 1, dim, |r, c| pts[r + 1][c] - pts[0][c]);
    let mut normal = DVector::zeros(dim);
    for k in 0..dim {
        let minor = edges.clone().remove_column(k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        normal[k] = sign * minor.determinant();
    }
    let norm = normal.norm();
    let edge_scale: f64 = (0..dim - 1).map(|r| edges.row(r).norm()).product();
    (norm > 1e-12 * edge_scale.max(f64::MIN_POSITIVE)).then(|| normal / norm)
}

struct WorkFacet {
    verts: Vec<usize>,
    normal: Vector,
    offset: f64,
}

fn make_facet(verts: Vec<usize>, pts: &[Vector], interior: &Vector, dim: usize) -> Option<WorkFacet> {
    let refs: Vec<&Vector> = verts.iter().map(|&i| &pts[i]).collect();
    let mut normal = hyperplane_normal(&refs, dim)?;
    let mut offset = normal.dot(refs[0]);
    if normal.dot(interior) > offset {
        normal = -normal;
        offset = -offset;
    }
    Some(WorkFacet { verts, normal, offset })
}

fn hull_nd(points: &[Vector], dim: usize) -> Result<Hull> {
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = HULL_EPS * scale;

    let mut pts: Vec<Vector> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| (q - p).norm() <= eps) {
            pts.push(p.clone());
        }
    }

    // Initial simplex: greedily maximize distance to the current affine span.
    let first = (0..pts.len()).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
    let mut simplex = vec![first];
    let mut basis: Vec<Vector> = Vec::new();
    while simplex.len() < dim + 1 {
        let origin = &pts[simplex[0]];
        let mut best = (0usize, -1.0f64);
        for (i, p) in pts.iter().enumerate() {
            let mut r = p - origin;
            for b in &basis {
                r -= b * b.dot(&r);
            }
            let d = r.norm();
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 <= 1e3 * eps {
            return Err(GeometryError::NotFullDimensional(format!(
                "affine hull has dimension {} < {dim}",
                simplex.len() - 1
            )));
        }
        let mut r = &pts[best.0] - origin;
        for b in &basis {
            r -= b * b.dot(&r);
        }
        basis.push(&r / r.norm());
        simplex.push(best.0);
    }
    let interior = simplex.iter().fold(DVector::zeros(dim), |acc, &i| acc + &pts[i]) / (dim + 1) as f64;

    let mut facets: Vec<WorkFacet> = Vec::new();
    for skip in 0..=dim {
        let mut verts: Vec<usize> = simplex.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
        verts.sort_unstable();
        facets.push(make_facet(verts, &pts, &interior, dim).expect("simplex facet"));
    }

    let mut order: Vec<usize> = (0..pts.len()).filter(|i| !simplex.contains(i)).collect();
    order.sort_by(|&a, &b| {
        (&pts[b] - &interior).norm().total_cmp(&(&pts[a] - &interior).norm()).then(a.cmp(&b))
    });

    for p in order {
        let dists: Vec<f64> = facets.iter().map(|f| f.normal.dot(&pts[p]) - f.offset).collect();
        if dists.iter().all(|&d| d < -eps) {
            continue;
        }
        let visible: Vec<bool> = dists.iter().map(|&d| d >= -eps).collect();
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
            for skip in 0..f.verts.len() {
                let ridge: Vec<usize> =
                    f.verts.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        let mut kept: Vec<WorkFacet> =
            facets.into_iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| f).collect();
        for mut ridge in horizon {
            ridge.push(p);
            ridge.sort_unstable();
            if let Some(f) = make_facet(ridge, &pts, &interior, dim) {
                kept.push(f);
            }
        }
        facets = kept;
    }

    // Merge coplanar simplicial facets.
    let mut merged: Vec<WorkFacet> = Vec::new();
    for f in facets {
        match merged.iter_mut().find(|g| (&g.normal - &f.normal).norm() < 1e-9 && (g.offset - f.offset).abs() <= 1e2 * eps) {
            Some(g) => {
                for v in f.verts {
                    if !g.verts.contains(&v) {
                        g.verts.push(v);
                    }
                }
            }
            None => merged.push(f),
        }
    }

    // A hull point is extreme iff the normals of its facets span ℝⁿ.
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut candidates: Vec<usize> = merged.iter().flat_map(|f| f.verts.iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();
    for i in candidates {
        let normals: Vec<&Vector> = merged.iter().filter(|f| f.verts.contains(&i)).map(|f| &f.normal).collect();
        let m = DMatrix::from_fn(normals.len(), dim, |r, c| normals[r][c]);
        let sv = m.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-7).count();
        if rank == dim {
            remap.insert(i, vertices.len());
            vertices.push(pts[i].clone());
        }
    }
    let facets = merged
        .into_iter()
        .map(|f| {
            let mut vs: Vec<usize> = f.verts.iter().filter_map(|v| remap.get(v).copied()).collect();
            vs.sort_unstable();
            Facet { normal: f.normal, offset: f.offset, vertices: vs }
        })
        .collect();
    Ok(Hull { dim, vertices, facets })
}
