//! One-dimensional and spherical maximization used by the sweep-based paths.

use std::f64::consts::PI;

use crate::sphere::{exp_map, keyed_rng, random_direction, random_tangent, UnitDirection};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes a `period`-periodic function: uniform sweep, then golden-section
/// refinement around the `starts` best local maxima of the sweep.
pub fn maximize_periodic<F: Fn(f64) -> f64>(f: F, period: f64, sweep: usize, starts: usize, tol: f64) -> (f64, f64) {
    let step = period / sweep as f64;
    let values: Vec<f64> = (0..sweep).map(|k| f(k as f64 * step)).collect();
    let mut peaks: Vec<usize> = (0..sweep)
        .filter(|&k| {
            let prev = values[(k + sweep - 1) % sweep];
            let next = values[(k + 1) % sweep];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(starts.max(1));
    let mut best = (0.0, f64::NEG_INFINITY);
    for (k, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (k as f64 * step, v);
        }
    }
    for k in peaks {
        let centre = k as f64 * step;
        let (x, v) = golden_section_max(&f, centre - step, centre + step, tol);
        if v > best.1 {
            best = (x.rem_euclid(period), v);
        }
    }
    best
}

/// Maximizes `f` over S^{n-1}. Planar problems use [`maximize_periodic`];
/// higher dimensions use seeded samples followed by golden-section line
/// searches along great circles of shrinking radius.
pub fn maximize_on_sphere<F: Fn(&UnitDirection) -> f64>(
    dim: usize,
    f: F,
    samples: usize,
    seed: u64,
    tol: f64,
) -> (UnitDirection, f64) {
    if dim == 2 {
        let (theta, v) = maximize_periodic(|t| f(&UnitDirection::from_angle(t)), 2.0 * PI, samples, 8, tol);
        return (UnitDirection::from_angle(theta), v);
    }
    let mut starts: Vec<(UnitDirection, f64)> = (0..samples)
        .map(|i| {
            let u = random_direction(dim, &mut keyed_rng(seed, 0x7377_6565, i as u64));
            let v = f(&u);
            (u, v)
        })
        .collect();
    starts.sort_by(|a, b| b.1.total_cmp(&a.1));
    starts.truncate(4);
    let mut best = starts[0].clone();
    for (s, (mut u, mut val)) in starts.into_iter().enumerate() {
        let mut rng = keyed_rng(seed, 0x7265_6669, s as u64);
        let mut radius = 0.2;
        while radius > tol {
            for _ in 0..2 * dim {
                let t = random_tangent(&u, &mut rng);
                let (a, v) = golden_section_max(|a| f(&exp_map(&u, &t, a)), -radius, radius, tol.max(radius * 1e-3));
                if v > val {
                    u = exp_map(&u, &t, a);
                    val = v;
                }
            }
            radius *= 0.5;
        }
        if val > best.1 {
            best = (u, val);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_max_of_shifted_cosine() {
        let (x, v) = maximize_periodic(|t| (t - 1.234).cos(), 2.0 * PI, 64, 4, 1e-10);
        assert!((x - 1.234).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_max_of_linear_function() {
        let target = UnitDirection::from_slice(&[1.0, -2.0, 0.5]).unwrap();
        let (u, v) = maximize_on_sphere(3, |u| u.dot(&target), 256, 4, 1e-9);
        assert!((v - 1.0).abs() < 1e-12);
        assert!((u.as_vector() - target.as_vector()).norm() < 1e-5);
    }
}
