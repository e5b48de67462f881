use proptest::prelude::*;
use vgrowth_core::grig::*;

fn word(max: usize) -> impl Strategy<Value = GrigWord> {
    prop::collection::vec(0usize..4, 0..=max).prop_map(|v| GrigWord(v.into_iter().map(Letter::from_index).collect()))
}

fn vertex(max_level: usize) -> impl Strategy<Value = Vertex> {
    (0..=max_level).prop_flat_map(|n| (0u64..(1 << n)).prop_map(move |b| Vertex::new(b, n)))
}

proptest! {
    #[test]
    fn reduction_preserves_the_element(w in word(24)) {
        let r = reduce_word(&w);
        prop_assert_eq!(reduce_word(&r), r.clone());
        prop_assert!(is_trivial(&w.concat(&r.inverse())));
        prop_assert_eq!(level_permutation(&w, 7), level_permutation(&r, 7));
    }

    #[test]
    fn state_product_rule(u in word(12), v in word(12), x in vertex(6)) {
        let uv = u.concat(&v);
        let lhs = state(&uv, x);
        let rhs = state(&u, x).concat(&state(&v, act_vertex(x, &u)));
        prop_assert!(words_equal(&lhs, &rhs));
    }

    #[test]
    fn word_problem_matches_level_nine(w in word(20)) {
        prop_assert_eq!(is_trivial(&w), level_permutation(&w, 9).is_identity());
    }

    #[test]
    fn vertex_and_boundary_actions_agree(w in word(16), stem in vertex(8), n in 0usize..12) {
        let p = BoundaryPoint::from_stem(stem);
        prop_assert_eq!(act_boundary(p, &w).prefix(n), act_vertex(p.prefix(n), &w));
    }

    #[test]
    fn inverse_acts_inversely(w in word(16), x in vertex(10)) {
        prop_assert_eq!(act_vertex(act_vertex(x, &w), &w.inverse()), x);
    }

    #[test]
    fn level_permutation_is_a_homomorphism(u in word(10), v in word(10)) {
        let n = 6;
        prop_assert_eq!(level_permutation(&u.concat(&v), n), level_permutation(&u, n).then(&level_permutation(&v, n)));
    }

    #[test]
    fn text_round_trip(w in word(20)) {
        prop_assert_eq!(w.to_string().parse::<GrigWord>().unwrap(), w);
    }
}

#[test]
fn involutions_and_klein_four() {
    for s in Letter::ALL {
        assert!(is_trivial(&GrigWord(vec![s, s])));
    }
    let bcd = [Letter::B, Letter::C, Letter::D];
    for len in 0..=5 {
        for code in 0..3usize.pow(len) {
            let w = GrigWord((0..len).map(|i| bcd[code / 3usize.pow(i) % 3]).collect());
            assert!(reduce_word(&w).len() <= 1, "{w}");
        }
    }
    assert!(is_trivial(&"bcd".parse().unwrap()));
}

#[test]
fn reduced_word_counts() {
    // One word of length 0, four of length 1, then each alternating word extends in three or one ways.
    let counts: Vec<usize> = (0..=4).map(|l| reduced_words(l).len()).collect();
    assert_eq!(counts, [1, 5, 11, 23, 41]);
}
