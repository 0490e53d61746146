//! Property tests against the oracles in `common`.

mod common;

use std::f64::consts::TAU;

use common::{cayley_menger_relative, planar_y, polygon_ok, rel_close};
use proptest::prelude::*;
use quadscreen::classification::{conjugation_sign_law, grashof_test, regge_conjugate, ReggeVariables};
use quadscreen::geometry::{
    bretschneider_area, caustic_residual, caustic_x, caustic_y, diagonal_band, heron_area, ridge_x, ridge_y,
    screen_bounds, Axis, DiagonalPair,
};
use quadscreen::kinematics::{
    input_angle_limits, solve_position, trace_cycle, Branch, ChiralityProfile, LinkageAssignment, TraceOptions,
};
use quadscreen::render::{build_screen, csv_string, fmt_sig, parse_csv, OutputFormat, RenderSpec};
use quadscreen::symmetry::{symmetry_orbit, triad_feasible, SixTuple};
use quadscreen::{Label, QuadSides};

fn quad() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(1.0f64..100.0).prop_filter("closes", |s| polygon_ok(*s))
}

/// A quadruple with a fraction in `[0, 1]` for picking a point in a band.
fn quad_and_t() -> impl Strategy<Value = ([f64; 4], f64)> {
    (quad(), 0.0f64..=1.0)
}

fn in_band(s: &QuadSides, axis: Axis, t: f64) -> f64 {
    let (lo, hi) = diagonal_band(s, axis);
    lo + (hi - lo) * t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_relabeling_keeps_opposite_pairs(s in quad()) {
        let q = QuadSides::canonicalize(s).unwrap();
        prop_assert!(q.a <= q.b && q.a <= q.c && q.a <= q.d && q.d >= q.b);
        prop_assert_eq!(q.to_original(), s);
        let pair = |u: f64, v: f64| if u < v { (u, v) } else { (v, u) };
        let orig = [pair(s[0], s[2]), pair(s[1], s[3])];
        let now = [pair(q.a, q.c), pair(q.b, q.d)];
        prop_assert!(orig == now || orig == [now[1], now[0]]);
    }

    #[test]
    fn caustic_matches_planar_construction((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, t);
        prop_assume!(x > 1e-9);
        let br = caustic_y(&q, x).unwrap();
        let (lo, hi) = planar_y(q.a, q.b, q.c, q.d, x);
        prop_assert!(rel_close(br.lower, lo, 1e-7), "{} vs {}", br.lower, lo);
        prop_assert!(rel_close(br.upper, hi, 1e-7), "{} vs {}", br.upper, hi);
    }

    #[test]
    fn caustic_points_have_zero_volume((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, t);
        for y in caustic_y(&q, x).unwrap().values() {
            let cm = cayley_menger_relative(q.a, q.b, q.c, q.d, x, y);
            prop_assert!(cm.abs() < 1e-8, "cm = {cm}");
            prop_assert!(caustic_residual(&q, DiagonalPair::new(x, y)).abs() < 1e-8);
        }
    }

    #[test]
    fn x_and_y_parametrizations_agree((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, t);
        for y in caustic_y(&q, x).unwrap().values() {
            let xs = caustic_x(&q, y).unwrap();
            let hit = (xs.lower - x).abs().min((xs.upper - x).abs());
            prop_assert!(hit <= 1e-6 * q.longest(), "x = {x}, back = {xs:?}");
        }
    }

    #[test]
    fn bretschneider_equals_triangle_sums_on_caustic((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, t);
        let br = caustic_y(&q, x).unwrap();
        let f1 = heron_area(q.a, q.b, x).unwrap();
        let f2 = heron_area(q.c, q.d, x).unwrap();
        let scale = q.longest().powi(2);
        let up = bretschneider_area(&q, DiagonalPair::new(x, br.upper)).unwrap();
        let low = bretschneider_area(&q, DiagonalPair::new(x, br.lower)).unwrap();
        prop_assert!((up - (f1 + f2)).abs() <= 1e-9 * scale);
        prop_assert!((low - (f1 - f2).abs()).abs() <= 1e-7 * scale);
    }

    #[test]
    fn ridge_lies_between_branches((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, t);
        let br = caustic_y(&q, x).unwrap();
        let r = ridge_y(&q, x).unwrap();
        let tol = 1e-9 * q.longest();
        prop_assert!(br.lower - tol <= r && r <= br.upper + tol);
        let y = in_band(&q, Axis::Y, t);
        let bx = caustic_x(&q, y).unwrap();
        let rx = ridge_x(&q, y).unwrap();
        prop_assert!(bx.lower - tol <= rx && rx <= bx.upper + tol);
    }

    #[test]
    fn conjugation_is_an_involution(s in quad()) {
        let q = QuadSides::from_array(s).unwrap();
        let back = regge_conjugate(&regge_conjugate(&q).unwrap()).unwrap();
        for (u, v) in back.as_array().iter().zip(s) {
            prop_assert!(rel_close(*u, v, 1e-12));
        }
        prop_assert!(conjugation_sign_law(&q).unwrap().holds);
    }

    #[test]
    fn conjugate_shares_the_screen((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let c = regge_conjugate(&q).unwrap();
        let (b1, b2) = (diagonal_band(&q, Axis::X), diagonal_band(&c, Axis::X));
        prop_assert!(rel_close(b1.0, b2.0, 1e-12) && rel_close(b1.1, b2.1, 1e-12));
        let x = in_band(&q, Axis::X, t);
        let (p, r) = (caustic_y(&q, x).unwrap(), caustic_y(&c, x).unwrap());
        prop_assert!(rel_close(p.upper, r.upper, 1e-9) && rel_close(p.lower, r.lower, 1e-9));
    }

    #[test]
    fn grashof_flips_under_conjugation(s in quad()) {
        let q = QuadSides::from_array(s).unwrap();
        let rv = ReggeVariables::from_sides(&q);
        prop_assume!(rv.triple().iter().all(|v| v.abs() > 1e-6 * rv.s));
        let c = regge_conjugate(&q).unwrap();
        prop_assert_ne!(grashof_test(q.as_array()).satisfied, grashof_test(c.as_array()).satisfied);
    }

    #[test]
    fn integer_regge_round_trip(s in prop::array::uniform4(1u32..500)) {
        let f = s.map(f64::from);
        prop_assume!(polygon_ok(f));
        let rv = ReggeVariables::from_array(f);
        prop_assert_eq!(rv.to_sides(), f);
        prop_assert_eq!(rv.t0, 2.0 * rv.s);
    }

    #[test]
    fn csv_round_trip_keeps_twelve_digits(s in quad()) {
        let q = QuadSides::from_array(s).unwrap();
        let spec = RenderSpec::new(16, OutputFormat::Csv, false).unwrap();
        let sg = build_screen(&q, &spec).unwrap();
        let parsed = parse_csv(&csv_string(&sg)).unwrap();
        let want = sg.curves();
        prop_assert_eq!(parsed.len(), want.len());
        for ((n1, p1), (n2, p2)) in parsed.iter().zip(&want) {
            prop_assert_eq!(n1, n2);
            for (u, v) in p1.iter().zip(p2) {
                prop_assert_eq!(u[0], fmt_sig(v[0]).parse::<f64>().unwrap());
                prop_assert_eq!(u[1], fmt_sig(v[1]).parse::<f64>().unwrap());
            }
        }
        for p in &parsed[0].1 {
            prop_assert!(caustic_residual(&q, DiagonalPair::new(p[0], p[1])).abs() < 1e-9);
        }
    }

    #[test]
    fn solved_positions_close_the_loop(s in quad(), k in 0usize..4, theta in 0.0f64..TAU) {
        let q = QuadSides::from_array(s).unwrap();
        let asg = LinkageAssignment::with_ground(&q, Label::from_index(k));
        let Ok(up) = solve_position(&asg, theta, Branch::ElbowUp) else { return Ok(()); };
        let down = solve_position(&asg, theta, Branch::ElbowDown).unwrap();
        let v = &up.vertices;
        let d = |i: usize, j: usize| (v[i][0] - v[j][0]).hypot(v[i][1] - v[j][1]);
        let lens = [d(3, 0), d(0, 1), d(1, 2), d(2, 3)];
        for (l, want) in lens.iter().zip(s) {
            prop_assert!(rel_close(*l, want, 1e-9));
        }
        // opposite branches are reflections across the line through the
        // input tip and output pivot, so areas differ in sign only when that
        // line is the ground line; their diagonals stay on the caustic
        for cfg in [up, down] {
            let r = caustic_residual(&q, cfg.diagonals);
            prop_assert!(r.abs() < 1e-8, "residual {r}");
        }
        let mirror = solve_position(&asg, -theta, Branch::ElbowDown).unwrap();
        prop_assert!((up.signed_area + mirror.signed_area).abs() <= 1e-9 * q.longest().powi(2));
    }

    #[test]
    fn full_circle_iff_grashof_for_shortest_link(s in quad()) {
        let q = QuadSides::from_array(s).unwrap();
        let shortest = (0..4).min_by(|&i, &j| s[i].total_cmp(&s[j])).unwrap();
        let grashof = grashof_test(s);
        prop_assume!(!grashof.boundary);
        let short = Label::from_index(shortest);
        // shortest link as input next to either neighbor as ground
        for ground in short.neighbors() {
            let asg = LinkageAssignment::new(&q, ground, short).unwrap();
            prop_assert_eq!(input_angle_limits(&asg).unwrap().full_circle, grashof.satisfied);
        }
    }

    #[test]
    fn regge_orbits_of_real_tetrahedra_stay_feasible((s, t) in quad_and_t()) {
        let q = QuadSides::from_array(s).unwrap();
        let x = in_band(&q, Axis::X, 0.1 + 0.8 * t);
        let br = caustic_y(&q, x).unwrap();
        let y = 0.5 * (br.lower + br.upper);
        let tuple = SixTuple::new(q.a, q.b, x, q.c, q.d, y);
        prop_assume!(triad_feasible(&tuple));
        let orbit = symmetry_orbit(&tuple);
        prop_assert_eq!(144 % orbit.len(), 0);
        for m in &orbit.members {
            prop_assert!(triad_feasible(&m.tuple));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_lie_on_caustic_and_close(s in quad(), k in 0usize..4) {
        let q = QuadSides::from_array(s).unwrap();
        let rv = ReggeVariables::from_sides(&q);
        prop_assume!(rv.triple().iter().all(|v| v.abs() > 1e-3 * rv.s));
        let asg = LinkageAssignment::with_ground(&q, Label::from_index(k));
        let tr = trace_cycle(&asg, TraceOptions { samples_per_turn: 360, start_branch: None }).unwrap();
        for smp in &tr.samples {
            let r = caustic_residual(&q, smp.config.diagonals);
            prop_assert!(r.abs() < 1e-6, "residual {r}");
        }
        let grashof = grashof_test(s).satisfied;
        let turns = tr.cycle_period / TAU;
        prop_assert!(turns == 1.0 || turns == 2.0, "period {} turns", turns);
        prop_assert_eq!(turns == 1.0, grashof);
        if !grashof {
            prop_assert_eq!(tr.chirality_profile, ChiralityProfile::BothChiralitiesOnOnePath);
        }
        let b = screen_bounds(&q);
        for smp in &tr.samples {
            let d = smp.config.diagonals;
            let tol = 1e-9 * q.longest();
            prop_assert!(d.x >= b.x_min - tol && d.x <= b.x_max + tol);
            prop_assert!(d.y >= b.y_min - tol && d.y <= b.y_max + tol);
        }
    }
}
