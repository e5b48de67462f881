use proptest::prelude::*;
use vgrowth_core::grig::{BoundaryPoint, GrigWord, Letter, Vertex};
use vgrowth_core::schreier::*;

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..4).prop_map(Letter::from_index), 0..=max)
}

proptest! {
    #[test]
    fn inverted_orbit_suffix_recursion(w in letters(20), s in (0usize..4).prop_map(Letter::from_index)) {
        let omega = BoundaryPoint::rho();
        let o = inverted_orbit(&w, &omega, &BoundaryAction);
        let mut ws = w.clone();
        ws.push(s);
        let mut expected: Vec<BoundaryPoint> = o.points.iter().map(|p| p.act_letter(s)).collect();
        expected.push(omega);
        expected.sort();
        expected.dedup();
        let next = inverted_orbit(&ws, &omega, &BoundaryAction);
        prop_assert_eq!(next.points, expected);
        prop_assert_eq!(next.depth, w.len() + 1);
    }

    #[test]
    fn orbits_on_levels_project_boundary_orbits(w in letters(16), n in 1usize..10) {
        let on_boundary = inverted_orbit(&w, &BoundaryPoint::rho(), &BoundaryAction);
        let on_level = inverted_orbit(&w, &rho_n(n), &LevelAction);
        let mut projected: Vec<Vertex> = on_boundary.points.iter().map(|p| p.prefix(n)).collect();
        projected.sort();
        projected.dedup();
        prop_assert_eq!(on_level.points, projected);
    }

    #[test]
    fn distances_are_symmetric(n in 1usize..9, u in any::<u64>(), v in any::<u64>()) {
        let g = build_level_graph(n).unwrap();
        let u = Vertex::from_index((u % (1 << n)) as usize, n);
        let v = Vertex::from_index((v % (1 << n)) as usize, n);
        prop_assert_eq!(g.distance(&u, &v).unwrap(), g.distance(&v, &u).unwrap());
    }

    #[test]
    fn balls_are_nested(n in 2usize..9, r in 0usize..12) {
        let g = build_level_graph(n).unwrap();
        let small = g.labeled_ball(&rho_n(n), r).unwrap();
        let big = g.labeled_ball(&rho_n(n), r + 1).unwrap();
        prop_assert!(small.points().iter().all(|p| big.contains(p)));
        prop_assert!((0..small.len()).all(|i| small.distance_of(i) <= r));
    }

    #[test]
    fn level_balls_match_the_boundary_up_to_radius(n in 2usize..10) {
        let g = build_level_graph(n).unwrap();
        let r = (1 << n) - 2;
        prop_assert!(balls_equal(&g.labeled_ball(&rho_n(n), r).unwrap(), &orbit_ball_infinite(r)).unwrap());
        prop_assert!(balls_equal(&g.labeled_ball(&eta_n(n), r).unwrap(), &orbit_ball_infinite(r)).unwrap());
    }
}

#[test]
fn graphs_are_connected_involutive() {
    for n in 1..=12 {
        let g = build_level_graph(n).unwrap();
        assert_eq!(g.len(), 1 << n);
        assert!(g.is_connected() && g.edges_are_involutions(), "n={n}");
    }
}

#[test]
fn ball_equality_breaks_at_the_diameter() {
    for n in 2..=9 {
        let g = build_level_graph(n).unwrap();
        let r = (1 << n) - 1;
        assert!(!balls_equal(&g.labeled_ball(&rho_n(n), r).unwrap(), &orbit_ball_infinite(r)).unwrap(), "n={n}");
    }
}

#[test]
fn action_ball_agrees_with_graph_ball() {
    let g = build_level_graph(7).unwrap();
    let a = action_ball(&LevelAction, eta_n(7), 9);
    let b = g.labeled_ball(&eta_n(7), 9).unwrap();
    assert!(balls_equal(&a, &b).unwrap());
    assert_eq!(a.len(), b.len());
}

#[test]
fn boundary_ball_points_are_canonical() {
    let ball = orbit_ball_infinite(12);
    for p in ball.points() {
        assert_eq!(BoundaryPoint::from_stem(p.stem()), *p);
        assert_eq!(p.act(&GrigWord::identity()), *p);
    }
}
