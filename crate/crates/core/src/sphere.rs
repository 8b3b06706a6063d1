//! Vectors, unit directions and the projective metric on the sphere.
//!
//! All samplers are counter-based: the `i`-th draw depends only on the seed
//! and `i`, so results do not depend on evaluation order or thread count.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GeometryError, Result};

/// A point or vector of ℝⁿ.
pub type Vector = DVector<f64>;

/// Tolerance on the Euclidean norm of a [`UnitDirection`].
pub const UNIT_TOL: f64 = 1e-12;

/// Builds a [`Vector`] from a slice.
pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// A point of S^{n-1}.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitDirection(Vector);

impl UnitDirection {
    /// Wraps `v`, which must already have unit norm.
    pub fn new(v: Vector) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit(norm));
        }
        Ok(Self(v))
    }

    /// Normalizes a nonzero finite vector.
    pub fn normalize(v: Vector) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let norm = v.norm();
        if norm < 1e-300 {
            return Err(GeometryError::NotUnit(norm));
        }
        Ok(Self(v / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::normalize(vector(coords))
    }

    /// `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        Self(vector(&[theta.cos(), theta.sin()]))
    }

    /// The `i`-th standard basis vector of ℝⁿ.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }

    /// Polar angle of a planar direction, in `[0, 2π)`.
    pub fn angle_2d(&self) -> f64 {
        let a = self.0[1].atan2(self.0[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }
}

impl Deref for UnitDirection {
    type Target = Vector;

    fn deref(&self) -> &Vector {
        &self.0
    }
}

/// Great-circle angle between two unit vectors, in `[0, π]`.
pub fn spherical_angle(u: &UnitDirection, v: &UnitDirection) -> f64 {
    let diff = (u.as_vector() - v.as_vector()).norm();
    let sum = (u.as_vector() + v.as_vector()).norm();
    2.0 * diff.atan2(sum)
}

/// ρ(u, v) = arccos |⟨u, v⟩|, the spherical distance with antipodes identified.
///
/// Evaluated through half-angle `atan2` so that tiny separations keep full
/// relative precision.
pub fn projective_distance(u: &UnitDirection, v: &UnitDirection) -> f64 {
    let diff = (u.as_vector() - v.as_vector()).norm();
    let sum = (u.as_vector() + v.as_vector()).norm();
    let (near, far) = if diff <= sum { (diff, sum) } else { (sum, diff) };
    (2.0 * near.atan2(far)).clamp(0.0, PI / 2.0)
}

/// min(‖u − v‖, ‖u + v‖); the alternative denominator probed in euclid-min mode.
pub fn euclid_min_distance(u: &UnitDirection, v: &UnitDirection) -> f64 {
    let diff = (u.as_vector() - v.as_vector()).norm();
    let sum = (u.as_vector() + v.as_vector()).norm();
    diff.min(sum)
}

/// Moves from `u` along the unit tangent `tangent` by `angle` radians.
pub fn exp_map(u: &UnitDirection, tangent: &Vector, angle: f64) -> UnitDirection {
    let v = u.as_vector() * angle.cos() + tangent * angle.sin();
    let norm = v.norm();
    UnitDirection(v / norm)
}

/// Unit vector orthogonal to `u`, obtained by projecting `v`. `None` when `v ∥ u`.
pub fn tangent_toward(u: &UnitDirection, v: &Vector) -> Option<Vector> {
    let w = v - u.as_vector() * u.dot(v);
    let norm = w.norm();
    (norm > 1e-14 * v.norm().max(1e-300)).then(|| w / norm)
}

/// A shorter-than-π arc of a great circle.
#[derive(Clone, Debug)]
pub struct GeodesicArc {
    start: UnitDirection,
    end: UnitDirection,
    tangent: Vector,
    angle: f64,
}

impl GeodesicArc {
    pub fn new(start: UnitDirection, end: UnitDirection) -> Result<Self> {
        if start.dim() != end.dim() {
            return Err(GeometryError::DimensionMismatch { expected: start.dim(), got: end.dim() });
        }
        let angle = spherical_angle(&start, &end);
        if angle < UNIT_TOL || PI - angle < UNIT_TOL {
            return Err(GeometryError::DegenerateArc);
        }
        let tangent = tangent_toward(&start, end.as_vector()).ok_or(GeometryError::DegenerateArc)?;
        Ok(Self { start, end, tangent, angle })
    }

    pub fn start(&self) -> &UnitDirection {
        &self.start
    }

    pub fn end(&self) -> &UnitDirection {
        &self.end
    }

    /// Arc length in radians.
    pub fn length(&self) -> f64 {
        self.angle
    }

    /// Unit tangent at the start, pointing toward the end.
    pub fn tangent(&self) -> &Vector {
        &self.tangent
    }

    /// Point at fraction `t ∈ [0, 1]` of the arc; endpoints are returned exactly.
    pub fn point(&self, t: f64) -> UnitDirection {
        if t == 0.0 {
            return self.start.clone();
        }
        if t == 1.0 {
            return self.end.clone();
        }
        exp_map(&self.start, &self.tangent, t * self.angle)
    }
}

/// Convenience wrapper for [`GeodesicArc::point`].
pub fn geodesic_point(arc: &GeodesicArc, t: f64) -> UnitDirection {
    arc.point(t)
}

const DOMAIN_DIRECTIONS: u64 = 0x6469_7273;
const DOMAIN_PAIRS: u64 = 0x7061_6972;

/// Generator for draw `index` of stream `domain` under `seed`.
pub fn keyed_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let key = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ domain.rotate_left(29);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Uniform direction from normalized standard-normal coordinates.
pub fn random_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitDirection {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-9 {
            return UnitDirection(v / norm);
        }
    }
}

/// Uniform unit tangent vector at `u`.
pub fn random_tangent<R: Rng + ?Sized>(u: &UnitDirection, rng: &mut R) -> Vector {
    loop {
        let v = DVector::from_fn(u.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(t) = tangent_toward(u, &v) {
            return t;
        }
    }
}

/// `count` approximately uniform directions on S^{n-1}, deterministic in `seed`.
pub fn sample_directions(dim: usize, count: usize, seed: u64) -> Vec<UnitDirection> {
    (0..count)
        .map(|i| random_direction(dim, &mut keyed_rng(seed, DOMAIN_DIRECTIONS, i as u64)))
        .collect()
}

/// Default lower bound on ρ for sampled pairs.
pub const DEFAULT_MIN_RHO: f64 = 1e-6;

/// `count` independent uniform pairs with ρ(u, v) ≥ `min_rho`.
pub fn sample_pairs(
    dim: usize,
    count: usize,
    seed: u64,
    min_rho: f64,
) -> Vec<(UnitDirection, UnitDirection)> {
    (0..count).map(|i| sample_pair(dim, seed, min_rho, i as u64)).collect()
}

/// The `index`-th pair of [`sample_pairs`].
pub fn sample_pair(dim: usize, seed: u64, min_rho: f64, index: u64) -> (UnitDirection, UnitDirection) {
    let mut rng = keyed_rng(seed, DOMAIN_PAIRS, index);
    loop {
        let u = random_direction(dim, &mut rng);
        let v = random_direction(dim, &mut rng);
        if projective_distance(&u, &v) >= min_rho {
            return (u, v);
        }
    }
}

/// Random rotation of ℝⁿ (QR of a Gaussian matrix with sign fix).
pub fn random_rotation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> nalgebra::DMatrix<f64> {
    let g = nalgebra::DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        let mut col = q.column_mut(0);
        col.neg_mut();
    }
    q
}
