//! Randomized and geodesic checks of the Lipschitz bounds: pair ratios,
//! sup estimation, finite-difference derivatives, and the sharpness and
//! approximation suites.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{Body, Polytope};
use crate::error::{GeometryError, Result};
use crate::fixtures;
use crate::metrics::{self, body_stats, dir_diameter, hat_constants, width, BodyStats};
use crate::search::maximize_on_sphere;
use crate::sphere::{
    euclid_min_distance, exp_map, keyed_rng, projective_distance, random_direction, random_tangent, sample_pair,
    GeodesicArc, UnitDirection, DEFAULT_MIN_RHO,
};

pub const REPORT_VERSION: &str = "report_v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default derivative meshes.
pub const DEFAULT_MESHES: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
/// Random geodesic orientations per mesh.
pub const ORIENTATIONS: usize = 64;
/// Default refinement stages of the sup estimator.
pub const DEFAULT_STAGES: usize = 12;
/// Smallest pair separation used by the sup estimator; below this rounding
/// in w and d is amplified past the violation tolerance.
pub const MIN_REFINE_RHO: f64 = 1e-5;
/// Cap on verbatim violating pairs kept in a report.
pub const MAX_LISTED_VIOLATIONS: usize = 100;

const DOMAIN_SUP: u64 = 0x7375_70;
const DOMAIN_ORIENT: u64 = 0x6f72_69;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "projective")]
    Projective,
    #[serde(rename = "euclidean-min")]
    EuclidMin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Width,
    Diameter,
}

impl Kind {
    pub fn eval(self, body: &Body, u: &UnitDirection) -> f64 {
        match self {
            Kind::Width => width(body, u),
            Kind::Diameter => dir_diameter(body, u),
        }
    }
}

/// Named tolerances. `bound` and `continuity` are relative to δ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub bound: f64,
    pub continuity: f64,
    pub min_rho: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { bound: 1e-9, continuity: 1e-9, min_rho: DEFAULT_MIN_RHO }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 3] = ["bound", "continuity", "min_rho"];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(GeometryError::NonPositive { what: "tolerance", value });
        }
        match name {
            "bound" => self.bound = value,
            "continuity" => self.continuity = value,
            "min_rho" => {
                if value >= PI / 2.0 {
                    return Err(GeometryError::Invalid("min_rho must be below π/2".into()));
                }
                self.min_rho = value
            }
            other => return Err(GeometryError::Invalid(format!("unknown tolerance {other:?}"))),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairStats {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub rho: f64,
    pub delta_w: f64,
    pub delta_d: f64,
}

fn denominator(u: &UnitDirection, v: &UnitDirection, metric: Metric) -> f64 {
    match metric {
        Metric::Projective => projective_distance(u, v),
        Metric::EuclidMin => euclid_min_distance(u, v),
    }
}

/// Δw and Δd for a pair under the projective metric.
pub fn delta_ratios(body: &Body, u: &UnitDirection, v: &UnitDirection) -> Result<PairStats> {
    delta_ratios_with(body, u, v, Metric::Projective)
}

/// Δw and Δd with the chosen denominator; `rho` is always the projective
/// distance.
pub fn delta_ratios_with(body: &Body, u: &UnitDirection, v: &UnitDirection, metric: Metric) -> Result<PairStats> {
    body.check_dim(u)?;
    body.check_dim(v)?;
    let rho = projective_distance(u, v);
    if rho < 1e-9 {
        return Err(GeometryError::CoincidentDirections(rho));
    }
    let den = denominator(u, v, metric);
    Ok(PairStats {
        u: u.iter().copied().collect(),
        v: v.iter().copied().collect(),
        rho,
        delta_w: (width(body, u) - width(body, v)).abs() / den,
        delta_d: (dir_diameter(body, u) - dir_diameter(body, v)).abs() / den,
    })
}

/// Bounds that a report checks against.
#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    pub delta: f64,
    pub omega: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "M_hat")]
    pub m_hat: f64,
    #[serde(rename = "N_hat")]
    pub n_hat: f64,
    /// True when M̂ and N̂ come from the complete planar candidate set.
    pub hat_exact: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ViolationCounts {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M_hat")]
    pub m_hat: usize,
    #[serde(rename = "N_hat")]
    pub n_hat: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub bound: &'static str,
    pub index: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub ratio: f64,
    pub limit: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupEstimate {
    pub kind: Kind,
    pub value: f64,
    pub stage_values: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub version: &'static str,
    pub tool_version: &'static str,
    pub body: String,
    pub dim: usize,
    pub seed: u64,
    pub pairs: usize,
    pub metric: Metric,
    pub tolerances: Tolerances,
    pub bounds: Bounds,
    /// Bounds whose violation makes the run fail.
    pub asserted: Vec<&'static str>,
    pub max_delta_w: f64,
    pub max_delta_d: f64,
    pub max_delta_w_pair: Option<PairStats>,
    pub max_delta_d_pair: Option<PairStats>,
    pub violations: ViolationCounts,
    pub violating_pairs: Vec<Violation>,
    pub sup_estimates: Vec<SupEstimate>,
}

impl VerificationReport {
    /// True if an asserted bound was exceeded.
    pub fn failed(&self) -> bool {
        self.asserted.iter().any(|b| match *b {
            "M" => self.violations.m > 0,
            "N" => self.violations.n > 0,
            "M_hat" => self.violations.m_hat > 0,
            "N_hat" => self.violations.n_hat > 0,
            _ => false,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Folds sup estimates into the report, counting any that exceed a bound.
    pub fn add_sup_estimate(&mut self, est: SupEstimate) {
        let tol = self.tolerances.bound * self.bounds.delta;
        if self.metric == Metric::Projective {
            let (plain, hat, plain_name, hat_name) = match est.kind {
                Kind::Width => (self.bounds.m, self.bounds.m_hat, "M", "M_hat"),
                Kind::Diameter => (self.bounds.n, self.bounds.n_hat, "N", "N_hat"),
            };
            for (limit, name) in [(plain, plain_name), (hat, hat_name)] {
                if est.value > limit + tol {
                    self.bump(name);
                    if self.violating_pairs.len() < MAX_LISTED_VIOLATIONS {
                        self.violating_pairs.push(Violation {
                            bound: name,
                            index: usize::MAX,
                            u: est.u.clone(),
                            v: est.v.clone(),
                            ratio: est.value,
                            limit,
                        });
                    }
                }
            }
        }
        self.sup_estimates.push(est);
    }

    fn bump(&mut self, name: &str) {
        match name {
            "M" => self.violations.m += 1,
            "N" => self.violations.n += 1,
            "M_hat" => self.violations.m_hat += 1,
            _ => self.violations.n_hat += 1,
        }
    }
}

/// M̂ and N̂: exact candidate enumeration for planar polytopes, sampled
/// maximization otherwise.
pub fn hat_bounds(body: &Body) -> Result<(f64, f64, bool)> {
    match body {
        Body::Polytope(p) => {
            let res = if p.dim() == 2 { 4096 } else { 512 };
            let h = hat_constants(p, res)?;
            Ok((h.m_hat, h.n_hat, h.exact))
        }
        _ => {
            let dim = body.dim();
            let (_, m) = maximize_on_sphere(dim, |u| metrics::p_of(body, u).unwrap_or(0.0), 2048, 0x6d68, 1e-10);
            let (_, n) = maximize_on_sphere(dim, |u| metrics::q_of(body, u).unwrap_or(0.0), 2048, 0x6e68, 1e-10);
            Ok((m, n, false))
        }
    }
}

fn bounds_of(body: &Body) -> Result<(BodyStats, Bounds)> {
    let stats = body_stats(body);
    let (m_hat, n_hat, hat_exact) = hat_bounds(body)?;
    let bounds = Bounds { delta: stats.delta, omega: stats.omega, m: stats.m, n: stats.n, m_hat, n_hat, hat_exact };
    Ok((stats, bounds))
}

/// Samples `pairs` seeded direction pairs and checks Δw ≤ M, Δd ≤ N, and the
/// refined bounds. Only projective-metric runs assert anything.
pub fn verify_bounds(
    body: &Body,
    pairs: usize,
    seed: u64,
    tol: Tolerances,
    metric: Metric,
) -> Result<VerificationReport> {
    if pairs == 0 {
        return Err(GeometryError::Invalid("pairs must be at least 1".into()));
    }
    let (_, bounds) = bounds_of(body)?;
    let dim = body.dim();
    let stats: Vec<PairStats> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let (u, v) = sample_pair(dim, seed, tol.min_rho, i as u64);
            delta_ratios_with(body, &u, &v, metric)
        })
        .collect::<Result<_>>()?;
    let slack = tol.bound * bounds.delta;
    let mut report = VerificationReport {
        version: REPORT_VERSION,
        tool_version: TOOL_VERSION,
        body: body.kind().to_string(),
        dim,
        seed,
        pairs,
        metric,
        tolerances: tol,
        asserted: match metric {
            Metric::Projective if bounds.hat_exact => vec!["M", "N", "M_hat", "N_hat"],
            Metric::Projective => vec!["M", "N"],
            Metric::EuclidMin => vec![],
        },
        bounds,
        max_delta_w: 0.0,
        max_delta_d: 0.0,
        max_delta_w_pair: None,
        max_delta_d_pair: None,
        violations: ViolationCounts::default(),
        violating_pairs: Vec::new(),
        sup_estimates: Vec::new(),
    };
    let b = report.bounds.clone();
    for (i, s) in stats.iter().enumerate() {
        if report.max_delta_w_pair.is_none() || s.delta_w > report.max_delta_w {
            report.max_delta_w = s.delta_w;
            report.max_delta_w_pair = Some(s.clone());
        }
        if report.max_delta_d_pair.is_none() || s.delta_d > report.max_delta_d {
            report.max_delta_d = s.delta_d;
            report.max_delta_d_pair = Some(s.clone());
        }
        for (ratio, limit, name) in
            [(s.delta_w, b.m, "M"), (s.delta_d, b.n, "N"), (s.delta_w, b.m_hat, "M_hat"), (s.delta_d, b.n_hat, "N_hat")]
        {
            if ratio > limit + slack {
                report.bump(name);
                if report.violating_pairs.len() < MAX_LISTED_VIOLATIONS {
                    report.violating_pairs.push(Violation {
                        bound: name,
                        index: i,
                        u: s.u.clone(),
                        v: s.v.clone(),
                        ratio,
                        limit,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn ratio(body: &Body, kind: Kind, u: &UnitDirection, v: &UnitDirection) -> f64 {
    let rho = projective_distance(u, v);
    if rho < MIN_REFINE_RHO {
        return f64::NEG_INFINITY;
    }
    (kind.eval(body, u) - kind.eval(body, v)).abs() / rho
}

/// Lower estimate of sup Δ over all pairs: a coarse pass over uniform and
/// short pairs, then `stages` rounds of geodesic perturbation with halving
/// radius around the best pairs. Stage values never decrease.
pub fn sup_delta_estimate(body: &Body, kind: Kind, stages: usize, seed: u64) -> Result<SupEstimate> {
    if stages == 0 {
        return Err(GeometryError::Invalid("stages must be at least 1".into()));
    }
    const COARSE: usize = 4096;
    const STARTS: usize = 8;
    const TRIALS: usize = 48;
    let dim = body.dim();
    let mut coarse: Vec<(f64, UnitDirection, UnitDirection)> = (0..COARSE)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed_rng(seed, DOMAIN_SUP, i as u64);
            let u = random_direction(dim, &mut rng);
            let v = if i % 2 == 0 {
                random_direction(dim, &mut rng)
            } else {
                let t = random_tangent(&u, &mut rng);
                let angle = 10f64.powf(-5.0 + 5.0 * rng.random::<f64>()).min(PI / 2.0);
                exp_map(&u, &t, angle)
            };
            (ratio(body, kind, &u, &v), u, v)
        })
        .collect();
    coarse.sort_by(|a, b| b.0.total_cmp(&a.0));
    coarse.truncate(STARTS);
    let mut incumbents = coarse;
    let mut stage_values = Vec::with_capacity(stages);
    let mut radius = 0.25;
    for stage in 0..stages {
        incumbents = incumbents
            .into_par_iter()
            .enumerate()
            .map(|(j, (mut best, mut u, mut v))| {
                let mut rng = keyed_rng(seed, DOMAIN_SUP + 1, (stage * STARTS + j) as u64);
                for trial in 0..TRIALS {
                    let step = radius * rng.random::<f64>();
                    let (nu, nv) = match trial % 4 {
                        0 => (exp_map(&u, &random_tangent(&u, &mut rng), step), v.clone()),
                        1 => (u.clone(), exp_map(&v, &random_tangent(&v, &mut rng), step)),
                        2 => {
                            let t = random_tangent(&u, &mut rng);
                            (exp_map(&u, &t, step), exp_map(&v, &t, step))
                        }
                        _ => match GeodesicArc::new(u.clone(), v.clone()) {
                            Ok(arc) => (u.clone(), arc.point(rng.random_range(0.25..1.0))),
                            Err(_) => continue,
                        },
                    };
                    let r = ratio(body, kind, &nu, &nv);
                    if r > best {
                        best = r;
                        u = nu;
                        v = nv;
                    }
                }
                (best, u, v)
            })
            .collect();
        let top = incumbents.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
        stage_values.push(top.max(stage_values.last().copied().unwrap_or(f64::NEG_INFINITY)));
        radius *= 0.5;
    }
    let (value, u, v) = incumbents
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one incumbent");
    Ok(SupEstimate {
        kind,
        value: value.max(0.0),
        stage_values: stage_values.into_iter().map(|x| x.max(0.0)).collect(),
        u: u.iter().copied().collect(),
        v: v.iter().copied().collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeEstimate {
    pub u: Vec<f64>,
    pub kind: Kind,
    pub meshes: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolated: f64,
}

/// Finite-difference estimate of limsup Δ at `u`: for each mesh h, the max
/// ratio over pairs within geodesic distance h of `u` along 64 seeded
/// orientations, then one Richardson step on the last two meshes.
pub fn derivative_estimate(body: &Body, u: &UnitDirection, kind: Kind, meshes: &[f64]) -> Result<DerivativeEstimate> {
    body.check_dim(u)?;
    if meshes.is_empty() {
        return Err(GeometryError::Invalid("at least one mesh is needed".into()));
    }
    if meshes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GeometryError::Invalid("meshes must be strictly decreasing".into()));
    }
    if meshes[meshes.len() - 1] < 1e-7 {
        return Err(GeometryError::Invalid("meshes must be at least 1e-7".into()));
    }
    let tangents: Vec<_> =
        (0..ORIENTATIONS).map(|k| random_tangent(u, &mut keyed_rng(0, DOMAIN_ORIENT, k as u64))).collect();
    let values: Vec<f64> = meshes
        .iter()
        .map(|&h| {
            tangents
                .iter()
                .flat_map(|t| {
                    [(0.0, 1.0), (-1.0, 0.0), (-1.0, 1.0)].map(|(a, b)| {
                        let p = exp_map(u, t, a * h);
                        let q = exp_map(u, t, b * h);
                        let rho = projective_distance(&p, &q);
                        (kind.eval(body, &p) - kind.eval(body, &q)).abs() / rho
                    })
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let k = values.len() - 1;
    let extrapolated = if k == 0 {
        values[0]
    } else {
        values[k] + (values[k] - values[k - 1]) * meshes[k] / (meshes[k - 1] - meshes[k])
    };
    Ok(DerivativeEstimate {
        u: u.iter().copied().collect(),
        kind,
        meshes: meshes.to_vec(),
        values,
        extrapolated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessRow {
    pub omega: f64,
    pub width_derivative: f64,
    pub width_expected: f64,
    pub diameter_derivative: f64,
    pub diameter_expected: f64,
    pub pass: bool,
}

/// Tolerance of the sharpness comparison.
pub const SHARPNESS_TOL: f64 = 1e-3;

/// For each ω, the truncated disc B(0,1) ∩ {|x₁| ≤ ω/2}: the width derivative
/// at e₁ against √(4 − ω²), and the diameter derivative at the direction
/// where the chord through the centre meets the slab corners against
/// (2/ω)√(4 − ω²).
pub fn sharpness_suite(omegas: &[f64]) -> Result<Vec<SharpnessRow>> {
    omegas
        .iter()
        .map(|&omega| {
            if !(omega > 0.0 && omega <= 2.0) {
                return Err(GeometryError::Invalid(format!("omega {omega} outside (0, 2]")));
            }
            let body = fixtures::slab_disc(omega);
            let h = omega / 2.0;
            let e1 = UnitDirection::axis(2, 0);
            let critical = UnitDirection::from_angle(h.min(1.0).acos());
            let wd = derivative_estimate(&body, &e1, Kind::Width, &DEFAULT_MESHES)?.extrapolated;
            let dd = derivative_estimate(&body, &critical, Kind::Diameter, &DEFAULT_MESHES)?.extrapolated;
            let width_expected = (4.0 - omega * omega).max(0.0).sqrt();
            let diameter_expected = 2.0 / omega * width_expected;
            let pass = (wd - width_expected).abs() <= SHARPNESS_TOL && (dd - diameter_expected).abs() <= SHARPNESS_TOL;
            Ok(SharpnessRow {
                omega,
                width_derivative: wd,
                width_expected,
                diameter_derivative: dd,
                diameter_expected,
                pass,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxRow {
    pub sides: usize,
    pub width: f64,
    pub s_excess: f64,
    pub r_excess: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub direction: Vec<f64>,
    pub rows: Vec<ApproxRow>,
    pub widths_decreasing: bool,
    /// The last s excess is at most the tolerance.
    pub s_limsup_ok: bool,
    /// No r excess below −tolerance.
    pub r_liminf_ok: bool,
}

/// Circumscribed regular polygons K_m ↓ `smooth` (the unit disc): s, r and w
/// of K_m at `u` compared with the disc values.
pub fn monotone_approx_suite(sides: &[usize], u: &UnitDirection, tol: f64) -> Result<ApproxReport> {
    if sides.windows(2).any(|w| w[1] <= w[0]) || sides.first().is_some_and(|&m| m < 3) {
        return Err(GeometryError::Invalid("polygon sides must be increasing and at least 3".into()));
    }
    let disc = fixtures::unit_disc();
    let (s_ref, r_ref) = (metrics::s_of(&disc, u)?, metrics::r_of(&disc, u)?);
    let rows: Vec<ApproxRow> = sides
        .iter()
        .map(|&m| {
            let k = Body::Polytope(fixtures::circumscribed_polygon(m));
            Ok(ApproxRow {
                sides: m,
                width: width(&k, u),
                s_excess: metrics::s_of(&k, u)? - s_ref,
                r_excess: metrics::r_of(&k, u)? - r_ref,
            })
        })
        .collect::<Result<_>>()?;
    let widths_decreasing = rows.windows(2).all(|w| w[1].width <= w[0].width + tol);
    let s_limsup_ok = rows.last().is_none_or(|r| r.s_excess <= tol);
    let r_liminf_ok = rows.iter().all(|r| r.r_excess >= -tol);
    Ok(ApproxReport { direction: u.iter().copied().collect(), rows, widths_decreasing, s_limsup_ok, r_liminf_ok })
}

/// Δ between `from` and the point at each arc length along the great circle
/// from `from` toward `toward`.
pub fn geodesic_limit(
    body: &Body,
    from: &UnitDirection,
    toward: &UnitDirection,
    kind: Kind,
    arcs: &[f64],
) -> Result<Vec<f64>> {
    let arc = GeodesicArc::new(from.clone(), toward.clone())?;
    let base = kind.eval(body, from);
    Ok(arcs
        .iter()
        .map(|&a| {
            let p = exp_map(from, arc.tangent(), a);
            (kind.eval(body, &p) - base).abs() / projective_distance(from, &p)
        })
        .collect())
}

/// One row of the worked-examples table.
#[derive(Clone, Debug, Serialize)]
pub struct ExampleRow {
    pub example: String,
    pub quantity: String,
    pub computed: f64,
    pub expected: f64,
    /// Relative tolerance if `relative`, absolute otherwise.
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl ExampleRow {
    fn new(example: &str, quantity: &str, computed: f64, expected: f64, tolerance: f64, relative: bool) -> Self {
        let err = (computed - expected).abs();
        let pass = if relative { err <= tolerance * expected.abs() } else { err <= tolerance };
        Self {
            example: example.into(),
            quantity: quantity.into(),
            computed,
            expected,
            tolerance,
            relative,
            pass,
        }
    }
}

/// Closed forms for the ellipse x²/a² + y²/b² ≤ 1 at angle α:
/// `[w, d, s, p, r, q]`.
pub fn ellipse_closed_forms(a: f64, b: f64, alpha: f64) -> [f64; 6] {
    let (c, s) = (alpha.cos(), alpha.sin());
    let (a2, b2) = (a * a, b * b);
    let h = a2 * c * c + b2 * s * s;
    let k = a2 * s * s + b2 * c * c;
    let lift = ((a2 - b2) * (2.0 * alpha).sin()).abs();
    [
        2.0 * h.sqrt(),
        2.0 * a * b / k.sqrt(),
        2.0 * ((a2 * a2 * c * c + b2 * b2 * s * s) / h).sqrt(),
        lift / h.sqrt(),
        2.0 * a * b * (k / (a2 * a2 * s * s + b2 * b2 * c * c)).sqrt(),
        a * b * lift / k.powf(1.5),
    ]
}

/// Angles `(k + ½)π/count`, k < count.
pub fn ellipse_angles(count: usize) -> Vec<f64> {
    (0..count).map(|k| (k as f64 + 0.5) * PI / count as f64).collect()
}

fn box_rows(rows: &mut Vec<ExampleRow>, sides: &[f64], seed_arcs: &[f64]) -> Result<()> {
    let p = fixtures::axis_box(sides);
    let body = Body::Polytope(p);
    let stats = body_stats(&body);
    let n = sides.len();
    let e1 = UnitDirection::axis(n, 0);
    let a = UnitDirection::from_slice(sides)?;
    let name = format!("box {sides:?}");
    let dw = geodesic_limit(&body, &e1, &a, Kind::Width, seed_arcs)?;
    let dd = geodesic_limit(&body, &a, &e1, Kind::Diameter, seed_arcs)?;
    rows.push(ExampleRow::new(&name, "geodesic Δw at e1 vs M", *dw.last().unwrap(), stats.m, 0.01, true));
    rows.push(ExampleRow::new(&name, "geodesic Δd at a/|a| vs N", *dd.last().unwrap(), stats.n, 0.01, true));
    Ok(())
}

/// Reproduces the triangle, box and ellipse examples with computed and
/// expected values.
pub fn worked_examples(seed: u64) -> Result<Vec<ExampleRow>> {
    let mut rows = Vec::new();
    let tri = Body::Polytope(fixtures::triangle_345());
    let (c, hb) = (5.0f64, 3.0f64);
    let m_hat = (c * c - hb * hb).sqrt();
    let n_hat = c / hb * m_hat;
    let sup_w = sup_delta_estimate(&tri, Kind::Width, DEFAULT_STAGES, seed)?.value;
    let sup_d = sup_delta_estimate(&tri, Kind::Diameter, DEFAULT_STAGES, seed)?.value;
    let hats = hat_constants(tri.as_polytope().unwrap(), 4096)?;
    rows.push(ExampleRow::new("triangle 3-4-5", "sup Δw vs √(c²−h_b²)", sup_w, m_hat, 0.01, true));
    rows.push(ExampleRow::new("triangle 3-4-5", "sup Δd vs (c/h_b)√(c²−h_b²)", sup_d, n_hat, 0.01, true));
    rows.push(ExampleRow::new("triangle 3-4-5", "max p vs √(c²−h_b²)", hats.m_hat, m_hat, 1e-9, true));
    rows.push(ExampleRow::new("triangle 3-4-5", "max q vs (c/h_b)√(c²−h_b²)", hats.n_hat, n_hat, 1e-9, true));

    let arcs = [1e-2, 1e-3, 1e-4];
    box_rows(&mut rows, &[1.0, 2.0], &arcs)?;
    box_rows(&mut rows, &[1.0, 2.0, 3.0], &arcs)?;

    let ell = fixtures::ellipse_2_1();
    let names = ["w", "d", "s", "p", "r", "q"];
    let mut worst = [0.0f64; 6];
    for alpha in ellipse_angles(100) {
        let sample = metrics::sample(&ell, &UnitDirection::from_angle(alpha))?;
        let computed = [sample.w, sample.d, sample.s, sample.p, sample.r, sample.q];
        for (k, expected) in ellipse_closed_forms(2.0, 1.0, alpha).iter().enumerate() {
            worst[k] = worst[k].max((computed[k] - expected).abs());
        }
    }
    for (k, name) in names.iter().enumerate() {
        rows.push(ExampleRow::new("ellipse (2,1)", &format!("max |{name} − closed form|"), worst[k], 0.0, 1e-9, false));
    }
    Ok(rows)
}

/// Directions at least `gap` (in ρ) away from every edge normal and every
/// vertex-pair direction of a polygon, where both w and d are smooth.
pub fn is_smooth_direction(p: &Polytope, u: &UnitDirection, gap: f64) -> bool {
    let verts = p.vertices();
    let far = |v: crate::sphere::Vector| match UnitDirection::normalize(v) {
        Ok(x) => projective_distance(u, &x) >= gap,
        Err(_) => true,
    };
    p.hull().facets().iter().all(|f| far(f.normal.clone()))
        && (0..verts.len()).all(|i| (i + 1..verts.len()).all(|j| far(&verts[j] - &verts[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Ball;

    #[test]
    fn delta_ratio_examples() {
        let ball = Body::Ball(Ball::unit(2));
        let s = delta_ratios(&ball, &UnitDirection::from_angle(0.2), &UnitDirection::from_angle(1.0)).unwrap();
        assert_eq!((s.delta_w, s.delta_d), (0.0, 0.0));
        let sq = Body::Polytope(fixtures::unit_square());
        let diag = UnitDirection::from_slice(&[1.0, 1.0]).unwrap();
        let s = delta_ratios(&sq, &UnitDirection::axis(2, 0), &diag).unwrap();
        let expected = (2f64.sqrt() - 1.0) / (PI / 4.0);
        assert!((s.delta_w - expected).abs() < 1e-14);
        assert!((s.delta_d - expected).abs() < 1e-14);
        assert!(delta_ratios(&sq, &diag, &diag.neg()).is_err());
    }

    #[test]
    fn ball_report_is_clean() {
        let ball = Body::Ball(Ball::unit(3));
        let r = verify_bounds(&ball, 2000, 1, Tolerances::default(), Metric::Projective).unwrap();
        assert_eq!(r.max_delta_w, 0.0);
        assert_eq!(r.max_delta_d, 0.0);
        assert!(!r.failed());
    }

    #[test]
    fn tolerance_names_are_checked() {
        let mut t = Tolerances::default();
        t.set("bound", 1e-8).unwrap();
        assert_eq!(t.bound, 1e-8);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("bound", -1.0).is_err());
    }

    #[test]
    fn ellipse_derivative_matches_p() {
        let ell = fixtures::ellipse_2_1();
        let est = derivative_estimate(&ell, &UnitDirection::from_angle(PI / 4.0), Kind::Width, &DEFAULT_MESHES).unwrap();
        assert!((est.extrapolated - 3.0 / 2.5f64.sqrt()).abs() < 1e-6, "{}", est.extrapolated);
    }

    #[test]
    fn ball_derivatives_vanish() {
        let ball = Body::Ball(Ball::unit(3));
        let u = UnitDirection::from_slice(&[1.0, 2.0, 2.0]).unwrap();
        for kind in [Kind::Width, Kind::Diameter] {
            assert!(derivative_estimate(&ball, &u, kind, &DEFAULT_MESHES).unwrap().extrapolated.abs() < 1e-9);
        }
    }

    #[test]
    fn sharpness_at_full_ball_is_zero() {
        let rows = sharpness_suite(&[2.0]).unwrap();
        assert!(rows[0].width_derivative.abs() < 1e-9 && rows[0].diameter_derivative.abs() < 1e-9);
    }

    #[test]
    fn ellipse_closed_forms_at_quarter_turn() {
        let f = ellipse_closed_forms(2.0, 1.0, PI / 4.0);
        let expected = [
            2.0 * 2.5f64.sqrt(),
            4.0 / 2.5f64.sqrt(),
            2.0 * (8.5f64 / 2.5).sqrt(),
            3.0 / 2.5f64.sqrt(),
            4.0 * (2.5f64 / 8.5).sqrt(),
            6.0 / 2.5f64.powf(1.5),
        ];
        for k in 0..6 {
            assert!((f[k] - expected[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn octagon_contact_spread() {
        let rep = monotone_approx_suite(&[8, 16], &UnitDirection::from_angle(0.3), 1e-9).unwrap();
        assert!((rep.rows[0].s_excess - (2.0 / (PI / 8.0).cos() - 2.0)).abs() < 1e-12);
        assert!(rep.widths_decreasing && rep.r_liminf_ok);
    }
}
