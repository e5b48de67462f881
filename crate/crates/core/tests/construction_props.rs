use std::sync::LazyLock;

use proptest::prelude::*;
use vgrowth_core::construction::*;
use vgrowth_core::grig::{level_permutation, GrigWord, Letter};

static C6: LazyLock<Construction> = LazyLock::new(|| Construction::new(6).unwrap());

fn letter() -> impl Strategy<Value = Gen> {
    let alphabet = Gen::alphabet();
    (0..alphabet.len()).prop_map(move |i| alphabet[i])
}

fn gen_word(max: usize) -> impl Strategy<Value = Vec<Gen>> {
    prop::collection::vec(letter(), 0..=max)
}

fn grig_word(max: usize) -> impl Strategy<Value = GrigWord> {
    prop::collection::vec(0usize..4, 0..=max).prop_map(|v| GrigWord(v.into_iter().map(Letter::from_index).collect()))
}

proptest! {
    #[test]
    fn normal_form_realizes_the_word(w in gen_word(4)) {
        let nf = normal_form(&w, 6).unwrap();
        prop_assert_eq!(nf.realize(&C6), C6.word_element(&w));
    }

    #[test]
    fn fold_matches_of_word(w in gen_word(12)) {
        let folded = w.iter().fold(NormalForm::trivial(6), |acc, &g| acc.step(g));
        prop_assert_eq!(folded, NormalForm::of_word(&w, 6));
    }

    #[test]
    fn free_cancellation_is_trivial(w in gen_word(10)) {
        let back: Vec<Gen> = w.iter().rev().map(Gen::inverse).collect();
        let ww: Vec<Gen> = w.iter().chain(back.iter()).copied().collect();
        prop_assert!(NormalForm::of_word(&ww, 6).is_trivial());
    }

    #[test]
    fn tuple_keys_round_trip(w in gen_word(12), n in prop::sample::select(vec![4usize, 8, 10])) {
        let nf = NormalForm::of_word(&w, n);
        let mut key = Vec::new();
        nf.write_key(&mut key);
        prop_assert_eq!(NormalForm::from_key(n, &key), nf);
    }

    #[test]
    fn word_text_round_trip(w in gen_word(10)) {
        prop_assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
    }

    #[test]
    fn conjugate_supports(g in grig_word(10), pick in 0usize..4) {
        let (kind, sigma) = [(2, Gen::Sym("(1 3)".parse().unwrap())), (3, Gen::Tau), (4, Gen::X0), (4, Gen::X1)][pick];
        let conj = C6.element(sigma).conjugate_by(&C6.grig_element(&g)).unwrap();
        prop_assert_eq!(project_support(&conj.support(), 6), conjugate_support_projection(kind, &g, 6).unwrap());
    }

    #[test]
    fn diagonal_is_a_homomorphism(u in grig_word(8), v in grig_word(8)) {
        let uv = u.concat(&v);
        prop_assert_eq!(C6.grig_element(&uv), C6.grig_element(&u).compose(&C6.grig_element(&v)).unwrap());
        prop_assert_eq!(C6.grig_element(&u).is_identity(), level_permutation(&u, 6).is_identity());
    }
}

#[test]
fn alphabet_inverses() {
    for n in [2, 5, 8] {
        let c = Construction::new(n).unwrap();
        for g in Gen::alphabet() {
            assert_eq!(c.element(g.inverse()), &c.element(g).invert(), "n={n} {g}");
        }
    }
}

#[test]
fn generating_set_shape() {
    let gens = build_generators(5).unwrap();
    assert_eq!(gens.len(), 31);
    let kinds: Vec<usize> = (1..=4).map(|k| gens.iter().filter(|g| g.gen.kind() == k).count()).collect();
    assert_eq!(kinds, [4, 24, 1, 2]);
    assert_eq!(Gen::alphabet().len(), 33);
}
