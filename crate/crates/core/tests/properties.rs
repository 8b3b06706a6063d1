use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;

use convex_width::body::SlabBall;
use convex_width::fixtures::random_polygon;
use convex_width::metrics::{
    body_stats, dir_diameter, dir_diameter_lp, lipschitz_constants, p_of, q_of, r_of, s_of, width,
};
use convex_width::point_diameter::e_of;
use convex_width::sphere::{keyed_rng, random_direction, random_rotation, spherical_angle};
use convex_width::{parse_body, projective_distance, Ball, Body, Polytope, UnitDirection, Vector};

fn polygon() -> impl Strategy<Value = Polytope> {
    (3usize..16, any::<u64>()).prop_map(|(n, seed)| random_polygon(n, seed))
}

fn polytope_3d() -> impl Strategy<Value = Polytope> {
    (5usize..14, any::<u64>()).prop_filter_map("degenerate point cloud", |(n, seed)| {
        let mut rng = keyed_rng(seed, 3, 0);
        let pts: Vec<Vector> =
            (0..n).map(|_| Vector::from_fn(3, |_, _| rng.random_range(-2.0..2.0))).collect();
        Polytope::new(&pts).ok()
    })
}

fn direction(dim: usize) -> impl Strategy<Value = UnitDirection> {
    any::<u64>().prop_map(move |seed| random_direction(dim, &mut keyed_rng(seed, 11, 0)))
}

fn angle() -> impl Strategy<Value = UnitDirection> {
    (0.0..2.0 * PI).prop_map(UnitDirection::from_angle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projective_distance_is_a_bounded_symmetric_metric(u in direction(4), v in direction(4)) {
        let rho = projective_distance(&u, &v);
        prop_assert!((0.0..=PI / 2.0 + 1e-15).contains(&rho));
        prop_assert!((rho - projective_distance(&v, &u)).abs() < 1e-15);
        prop_assert!((rho - projective_distance(&u, &v.neg())).abs() < 1e-15);
        prop_assert!(rho <= spherical_angle(&u, &v) + 1e-15);
    }

    #[test]
    fn width_is_support_of_difference_body(p in polygon(), u in angle()) {
        let body = Body::Polytope(p.clone());
        let dk = p.difference_body();
        prop_assert!((width(&body, &u) - dk.support_value(u.as_vector())).abs() <= 1e-12 * p.scale());
    }

    #[test]
    fn width_and_diameter_are_even(p in polygon(), u in angle()) {
        let body = Body::Polytope(p);
        prop_assert_eq!(width(&body, &u), width(&body, &u.neg()));
        prop_assert!((dir_diameter(&body, &u) - dir_diameter(&body, &u.neg())).abs() <= 1e-12 * body.scale());
    }

    #[test]
    fn planar_ordering_of_widths(p in polygon(), u in angle()) {
        let body = Body::Polytope(p);
        let st = body_stats(&body);
        let tol = 1e-9 * st.delta;
        let (w, d) = (width(&body, &u), dir_diameter(&body, &u));
        prop_assert!(st.omega <= d + tol);
        prop_assert!(d <= w + tol);
        prop_assert!(w <= st.delta + tol);
        prop_assert!(st.omega <= w + tol);
    }

    #[test]
    fn ordering_in_three_dimensions(p in polytope_3d(), u in direction(3)) {
        let body = Body::Polytope(p);
        let st = body_stats(&body);
        let tol = 1e-9 * st.delta;
        let (w, d) = (width(&body, &u), dir_diameter(&body, &u));
        prop_assert!(st.omega <= d + tol && d <= w + tol && w <= st.delta + tol);
    }

    #[test]
    fn lp_matches_ray_shooting(p in polytope_3d(), u in direction(3)) {
        let body = Body::Polytope(p.clone());
        let lp = dir_diameter_lp(&p, &u).unwrap();
        prop_assert!((lp - dir_diameter(&body, &u)).abs() <= 1e-9 * p.scale().max(1.0));
    }

    #[test]
    fn lp_matches_ray_shooting_along_vertex_pairs(p in polytope_3d(), i in 0usize..64, j in 0usize..64) {
        let vs = p.vertices();
        let (a, b) = (&vs[i % vs.len()], &vs[j % vs.len()]);
        prop_assume!(i % vs.len() != j % vs.len());
        let u = UnitDirection::normalize(b - a).unwrap();
        let lp = dir_diameter_lp(&p, &u).unwrap();
        prop_assert!((lp - dir_diameter(&Body::Polytope(p.clone()), &u)).abs() <= 1e-9 * p.scale().max(1.0));
    }

    #[test]
    fn slab_thicker_than_ball_is_the_ball(h in 1.0..4.0f64, u in direction(3)) {
        let slab = Body::SlabBall(SlabBall::new(h, 3).unwrap());
        let ball = Body::Ball(Ball::unit(3));
        prop_assert!((width(&slab, &u) - width(&ball, &u)).abs() < 1e-12);
        prop_assert!((dir_diameter(&slab, &u) - dir_diameter(&ball, &u)).abs() < 1e-12);
    }

    #[test]
    fn local_rates_respect_global_constants(p in polygon(), u in angle()) {
        let body = Body::Polytope(p);
        let st = body_stats(&body);
        let slack = 1e-9 * st.delta;
        prop_assert!(p_of(&body, &u).unwrap() <= st.m + slack);
        prop_assert!(q_of(&body, &u).unwrap() <= st.n + slack);
        let s = s_of(&body, &u).unwrap();
        prop_assert!(width(&body, &u) <= s + slack && s <= st.delta + slack);
        let r = r_of(&body, &u).unwrap();
        prop_assert!(st.omega <= r + slack && r <= dir_diameter(&body, &u) + slack);
    }

    #[test]
    fn pair_ratios_respect_global_constants(p in polygon(), u in angle(), v in angle()) {
        let rho = projective_distance(&u, &v);
        prop_assume!(rho > 1e-6);
        let body = Body::Polytope(p);
        let st = body_stats(&body);
        let slack = 1e-9 * st.delta;
        prop_assert!((width(&body, &u) - width(&body, &v)).abs() / rho <= st.m + slack);
        prop_assert!((dir_diameter(&body, &u) - dir_diameter(&body, &v)).abs() / rho <= st.n + slack);
    }

    #[test]
    fn scaling_is_equivariant(p in polygon(), u in angle(), factor in 0.1..10.0f64) {
        let body = Body::Polytope(p.clone());
        let big = Body::Polytope(p.scaled(factor).unwrap());
        let (a, b) = (body_stats(&body), body_stats(&big));
        prop_assert!((b.delta - factor * a.delta).abs() <= 1e-12 * b.delta);
        prop_assert!((b.omega - factor * a.omega).abs() <= 1e-9 * b.delta);
        prop_assert!((b.m - factor * a.m).abs() <= 1e-8 * b.m);
        prop_assert!((width(&big, &u) - factor * width(&body, &u)).abs() <= 1e-12 * b.delta);
        prop_assert!((dir_diameter(&big, &u) - factor * dir_diameter(&body, &u)).abs() <= 1e-9 * b.delta);
    }

    #[test]
    fn rigid_motions_are_equivariant(p in polytope_3d(), u in direction(3), seed in any::<u64>()) {
        let mut rng = keyed_rng(seed, 12, 0);
        let rot = random_rotation(3, &mut rng);
        let shift = Vector::from_fn(3, |_, _| rng.random_range(-5.0..5.0));
        let body = Body::Polytope(p.clone());
        let moved = Body::Polytope(p.transformed(&rot, &shift).unwrap());
        let ru = UnitDirection::normalize(&rot * u.as_vector()).unwrap();
        let tol = 1e-9 * p.scale();
        prop_assert!((width(&moved, &ru) - width(&body, &u)).abs() <= tol);
        prop_assert!((dir_diameter(&moved, &ru) - dir_diameter(&body, &u)).abs() <= tol);
        let (a, b) = (body_stats(&body), body_stats(&moved));
        prop_assert!((a.delta - b.delta).abs() <= tol && (a.omega - b.omega).abs() <= tol);
    }

    #[test]
    fn point_diameter_lies_between_thickness_and_diameter(p in polygon(), t in 0.0..1.0f64, k in 0usize..64) {
        let body = Body::Polytope(p.clone());
        let st = body_stats(&body);
        let vs = p.vertices();
        let (a, b) = (&vs[k % vs.len()], &vs[(k / 3 + 1) % vs.len()]);
        let inside = a * (1.0 - t) + b * t;
        let e = e_of(&body, &inside).unwrap().e;
        prop_assert!(e <= st.delta + 1e-9 * st.delta);
        prop_assert!(e >= st.omega - 1e-9 * st.delta);
    }

    #[test]
    fn spatial_polytopes_have_consistent_chords(p in polytope_3d(), u in direction(3)) {
        let body = Body::Polytope(p);
        let r = r_of(&body, &u).unwrap();
        let st = body_stats(&body);
        prop_assert!(r >= st.omega - 1e-7 * st.delta && r <= dir_diameter(&body, &u) + 1e-7 * st.delta);
        prop_assert!(q_of(&body, &u).unwrap() <= st.n + 1e-7 * st.delta);
    }

    #[test]
    fn constants_grow_with_eccentricity(omega in 0.1..10.0f64, extra in 0.0..10.0f64) {
        let delta = omega + extra;
        let (m, n) = lipschitz_constants(delta, omega).unwrap();
        prop_assert!(m >= 0.0 && n >= m - 1e-12 * n.max(1.0));
    }

    #[test]
    fn body_documents_round_trip(p in polygon()) {
        let body = Body::Polytope(p);
        let text = serde_json::to_string(&body.to_document()).unwrap();
        let back = parse_body(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back.to_document()).unwrap(), text);
    }
}
