//! Seeded invariant suites run by `vgrowth verify`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vgrowth_core::construction::{
    check_commuting, conjugate_support_projection, normal_form, project_support, Construction, Gen,
};
use vgrowth_core::grig::*;
use vgrowth_core::schreier::r_n;
use vgrowth_core::thompson::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub cases: usize,
    pub failures: usize,
}

struct Tally(Vec<CheckResult>);

impl Tally {
    fn record(&mut self, check: &'static str, outcomes: impl IntoIterator<Item = bool>) {
        let (mut cases, mut failures) = (0, 0);
        for ok in outcomes {
            cases += 1;
            failures += !ok as usize;
        }
        self.0.push(CheckResult { check, cases, failures });
    }
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> GrigWord {
    let len = rng.random_range(0..=max_len);
    GrigWord((0..len).map(|_| Letter::from_index(rng.random_range(0..4))).collect())
}

fn words_up_to(max_len: usize) -> Vec<GrigWord> {
    let mut out = vec![GrigWord::identity()];
    let mut layer = out.clone();
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|w| Letter::ALL.map(|s| w.concat(&GrigWord::letter(s)))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Involutions, Klein four, state products, the word problem against level
/// permutations, the nucleus and fixation transfer.
pub fn grig(seed: u64, samples: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally(Vec::new());
    t.record("involution", Letter::ALL.map(|s| is_trivial(&GrigWord(vec![s, s]))));
    let bcd = [Letter::B, Letter::C, Letter::D];
    t.record(
        "klein-four",
        (0..samples).map(|_| {
            let w = GrigWord((0..rng.random_range(0..12)).map(|_| bcd[rng.random_range(0..3)]).collect());
            reduce_word(&w).len() <= 1
        }),
    );
    t.record(
        "state-product",
        (0..samples).map(|_| {
            let (u, v) = (random_word(&mut rng, 12), random_word(&mut rng, 12));
            let n = rng.random_range(0..=6);
            let x = Vertex::new(rng.random_range(0..1u64 << n), n);
            words_equal(&state(&u.concat(&v), x), &state(&u, x).concat(&state(&v, act_vertex(x, &u))))
        }),
    );
    t.record(
        "word-problem-level-9",
        (0..samples).map(|_| {
            let w = random_word(&mut rng, 20);
            is_trivial(&w) == level_permutation(&w, 9).is_identity()
        }),
    );
    t.record(
        "nucleus",
        reduced_words(12).iter().map(|g| nucleus_states(g, ceil_log2(g.len()) + 1).iter().all(in_nucleus)),
    );
    let rho = BoundaryPoint::rho();
    t.record(
        "fixation-transfer",
        words_up_to(6).iter().flat_map(|g| {
            let fixes = act_boundary(rho, g) == rho;
            (ceil_log2(reduce_word(g).len()) + 2..=8)
                .map(move |n| (act_vertex(Vertex::ones(n), g) == Vertex::ones(n)) == fixes)
        }),
    );
    t.0
}

/// A random element of `V_Z` with `splits + |Z|` pairs.
pub fn random_element(rng: &mut ChaCha8Rng, roots: &Arc<RootSet>, splits: usize) -> VElement {
    let mut sides: Vec<Vec<Address>> = Vec::new();
    for _ in 0..2 {
        let mut leaves: Vec<Address> = (0..roots.len() as u32).map(Address::root_cylinder).collect();
        for _ in 0..splits {
            let leaf = leaves.swap_remove(rng.random_range(0..leaves.len()));
            leaves.extend([leaf.child(false), leaf.child(true)]);
        }
        sides.push(leaves);
    }
    sides[1].shuffle(rng);
    let pairs = sides[0].iter().zip(&sides[1]).map(|(&d, &r)| Pair::new(d, r)).collect();
    VElement::new(roots.clone(), pairs).expect("two partitions of equal size")
}

/// F relations, the factorization of `X_0`, group laws and encodings.
pub fn thompson(seed: u64, samples: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally(Vec::new());
    t.record(
        "f-relations",
        (0..5).flat_map(|i| (i + 1..6).map(move |j| (i, j))).map(|(i, j)| {
            let xi = std_generator_x(i);
            xi.invert().compose(&std_generator_x(j)).and_then(|e| e.compose(&xi)).ok() == Some(std_generator_x(j + 1))
        }),
    );
    let single = RootSet::single();
    let [l, m, r] = [Interval::Left, Interval::Middle, Interval::Right].map(interval_generator);
    t.record("x0-factorization", [product(&single, [&l, &m, &r]).ok() == Some(x0())]);
    let roots = RootSet::indexed(2);
    let mut triple = || {
        let mut draw = || {
            let splits = rng.random_range(0..10);
            random_element(&mut rng, &roots, splits)
        };
        (draw(), draw(), draw())
    };
    let triples: Vec<_> = (0..samples).map(|_| triple()).collect();
    t.record(
        "associativity",
        triples
            .iter()
            .map(|(f, g, h)| f.compose(g).unwrap().compose(h).unwrap() == f.compose(&g.compose(h).unwrap()).unwrap()),
    );
    t.record(
        "inverses",
        triples.iter().map(|(f, g, _)| {
            f.compose(&f.invert()).unwrap().is_identity()
                && f.compose(g).unwrap().invert() == g.invert().compose(&f.invert()).unwrap()
        }),
    );
    t.record(
        "encodings",
        triples.iter().map(|(f, _, _)| {
            VElement::from_key(roots.clone(), &f.to_key()) == *f
                && parse_element(roots.clone(), &f.to_string()).as_ref() == Ok(f)
        }),
    );
    t.0
}

/// Letter inverses, conjugate supports, commuting conjugates and normal forms at level `n`.
pub fn construction(n: usize, seed: u64, samples: usize) -> vgrowth_core::Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = Construction::new(n)?;
    let alphabet = Gen::alphabet();
    let mut t = Tally(Vec::new());
    t.record("letter-inverses", alphabet.iter().map(|&g| *c.element(g.inverse()) == c.element(g).invert()));
    let reps = [(2, Gen::Sym("(1 2 3 4)".parse().expect("cycle"))), (3, Gen::Tau), (4, Gen::X0), (4, Gen::X1)];
    let mut supports = Vec::new();
    for _ in 0..samples {
        let g = random_word(&mut rng, 10);
        let (kind, sigma) = reps[rng.random_range(0..reps.len())];
        let conj = c.element(sigma).conjugate_by(&c.grig_element(&g))?;
        supports.push(project_support(&conj.support(), n) == conjugate_support_projection(kind, &g, n)?);
    }
    t.record("conjugate-supports", supports);
    let bound = r_n(n).min(4);
    let report = check_commuting(n, bound)?;
    for pair in &report.pairs {
        let name = match pair.types {
            (2, 3) => "commuting-2-3",
            (2, 4) => "commuting-2-4",
            _ => "commuting-3-4",
        };
        t.0.push(CheckResult { check: name, cases: pair.checked, failures: pair.failures.len() });
    }
    let max_len = r_n(n).min(6);
    let mut nf = Vec::new();
    for _ in 0..samples {
        let len = rng.random_range(0..=max_len);
        let w: Vec<Gen> = (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect();
        nf.push(match normal_form(&w, n) {
            Ok(form) => form.realize(&c) == c.word_element(&w),
            Err(_) => false,
        });
    }
    t.record("normal-form", nf);
    Ok(t.0)
}
