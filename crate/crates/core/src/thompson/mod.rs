//! Thompson's group `V` and the Higman–Thompson groups `V_Z`, as reduced
//! prefix-replacement tables. Products read left to right: `f.compose(g)`
//! applies `f` first.

mod element;
mod text;
mod word;

use std::sync::Arc;

pub use element::{complement, reduce, Pair, RootSet, VElement};
pub(crate) use element::{read_varint, write_varint};
pub use text::parse_element;
pub use word::{Address, Word, MAX_WORD_LEN};

fn single(pairs: &[(&str, &str)]) -> VElement {
    let pairs = pairs
        .iter()
        .map(|(d, r)| {
            Pair::new(
                Address::new(0, Word::parse(d).expect("valid word")),
                Address::new(0, Word::parse(r).expect("valid word")),
            )
        })
        .collect();
    VElement::new(RootSet::single(), pairs).expect("valid table")
}

/// `X_0`: `00ξ ↦ 0ξ`, `01ξ ↦ 10ξ`, `1ξ ↦ 11ξ`.
pub fn x0() -> VElement {
    single(&[("00", "0"), ("01", "10"), ("1", "11")])
}

/// `X_k = 1^k X_0`.
pub fn std_generator_x(k: usize) -> VElement {
    let target = Address::new(0, Word::from_raw(if k == 0 { 0 } else { u128::MAX << (128 - k) }, k));
    VElement::embed_cylinder(&x0(), RootSet::single(), target).expect("single root")
}

/// Dyadic subintervals carrying a copy of `X_0` in the generation of `V`
/// from `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interval {
    /// `[0, 1/2]`, the cylinder `0`.
    Left,
    /// `[1/4, 3/4]`, the union of the cylinders `01` and `10`.
    Middle,
    /// `[1/2, 1]`, the cylinder `1`.
    Right,
}

pub fn interval_generator(which: Interval) -> VElement {
    let roots = RootSet::single();
    let at = |s: &str| Address::new(0, Word::parse(s).expect("valid word"));
    match which {
        Interval::Left => VElement::embed_cylinder(&x0(), roots, at("0")),
        Interval::Middle => VElement::transport(&x0(), roots, at("01"), at("10")),
        Interval::Right => VElement::embed_cylinder(&x0(), roots, at("1")),
    }
    .expect("single root")
}

/// Convenience for products of several elements over one root set.
pub fn product<'a>(roots: &Arc<RootSet>, factors: impl IntoIterator<Item = &'a VElement>) -> crate::Result<VElement> {
    factors.into_iter().try_fold(VElement::identity(roots.clone()), |acc, f| acc.compose(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn addr(s: &str) -> Address {
        Address::new(0, Word::parse(s).unwrap())
    }

    #[test]
    fn make_element_reduces() {
        let id = single(&[("0", "0"), ("1", "1")]);
        assert!(id.is_identity());
        assert_eq!(id.pairs().len(), 1);
        let id4 = single(&[("00", "00"), ("01", "01"), ("10", "10"), ("11", "11")]);
        assert_eq!(id4, VElement::identity(RootSet::single()));
        assert_eq!(x0().pairs().len(), 3);
    }

    #[test]
    fn make_element_errors() {
        let roots = RootSet::single();
        let p = |d: &str, r: &str| Pair::new(addr(d), addr(r));
        assert!(matches!(
            VElement::new(roots.clone(), vec![p("0", "0")]),
            Err(Error::NotAPartition { side: "domain", .. })
        ));
        assert!(matches!(
            VElement::new(roots.clone(), vec![p("0", "0"), p("1", "1"), p("1", "1")]),
            Err(Error::DuplicateAddress { .. })
        ));
        assert!(matches!(
            VElement::new(roots.clone(), vec![p("0", "0"), p("1", "0")]),
            Err(Error::DuplicateAddress { side: "range", .. })
        ));
        assert!(matches!(
            VElement::new(roots.clone(), vec![p("0", "00"), p("1", "01")]),
            Err(Error::NotAPartition { side: "range", .. })
        ));
        assert!(matches!(
            VElement::new(roots, vec![Pair::new(Address::new(1, Word::EMPTY), addr(""))]),
            Err(Error::RootOutOfRange { root: 1, .. })
        ));
    }

    #[test]
    fn apply_and_invert() {
        let x = x0();
        assert_eq!(x.apply(&addr("00101")).unwrap(), addr("0101"));
        assert_eq!(x.apply(&addr("1")).unwrap(), addr("11"));
        assert_eq!(x.apply(&addr("01")).unwrap(), addr("10"));
        assert!(matches!(x.apply(&addr("0")), Err(Error::NeedsRefinement(_))));
        let xi = x.invert();
        assert_eq!(xi.to_string(), "0 -> 00\n10 -> 01\n11 -> 1\n");
        assert!(x.compose(&xi).unwrap().is_identity());
        assert_eq!(xi.invert(), x);
    }

    #[test]
    fn generators_and_relations() {
        assert_eq!(std_generator_x(0), x0());
        let x1 = std_generator_x(1);
        assert_eq!(x1.to_string(), "0 -> 0\n100 -> 10\n101 -> 110\n11 -> 111\n");
        assert_eq!(x1.support(), vec![addr("1")]);
        for i in 0..4 {
            for j in i + 1..5 {
                let xi = std_generator_x(i);
                let lhs = xi.invert().compose(&std_generator_x(j)).unwrap().compose(&xi).unwrap();
                assert_eq!(lhs, std_generator_x(j + 1), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn interval_generators() {
        assert_eq!(interval_generator(Interval::Right), std_generator_x(1));
        let mid = interval_generator(Interval::Middle);
        assert_eq!(mid.to_string(), "00 -> 00\n010 -> 01\n011 -> 100\n10 -> 101\n11 -> 11\n");
        assert_eq!(mid.support(), vec![addr("01"), addr("10")]);
        let left = interval_generator(Interval::Left);
        assert_eq!(left.support(), vec![addr("0")]);
    }

    #[test]
    fn x0_factors_through_interval_generators() {
        let [l, m, r] = [Interval::Left, Interval::Middle, Interval::Right].map(interval_generator);
        let roots = RootSet::single();
        // Left piece first, right piece last.
        assert_eq!(product(&roots, [&l, &m, &r]).unwrap(), x0());
        assert_ne!(product(&roots, [&r, &m, &l]).unwrap(), x0());
    }

    #[test]
    fn support_examples() {
        assert!(VElement::identity(RootSet::single()).support().is_empty());
        let roots = RootSet::single();
        let swap = parse_element(roots, "00 -> 11\n11 -> 00\n01 -> 01\n10 -> 10").unwrap();
        assert_eq!(swap.support(), vec![addr("00"), addr("11")]);
    }

    #[test]
    fn text_round_trip() {
        let roots = RootSet::indexed(2);
        let e = parse_element(roots.clone(), "0:ε -> 1:0\n1:0 -> 1:1\n1:1 -> 0:").unwrap();
        assert_eq!(parse_element(roots.clone(), &e.to_string()).unwrap(), e);
        assert!(matches!(parse_element(roots.clone(), "0 -> 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_element(roots, "# c\n\n9: -> 0:"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn key_round_trip() {
        let roots = RootSet::indexed(3);
        let e = parse_element(roots.clone(), "0: -> 2:\n1:0 -> 0:0\n1:1 -> 0:1\n2: -> 1:").unwrap();
        let key = e.to_key();
        assert_eq!(VElement::from_key(roots.clone(), &key), e);
        let id = VElement::identity(roots.clone());
        assert_eq!(id.to_key(), vec![0, 2, 4]);
        assert_eq!(VElement::from_key(roots, &id.to_key()), id);
    }

    #[test]
    fn root_permutations() {
        let roots = RootSet::indexed(3);
        let p = VElement::root_permutation(roots.clone(), &[1, 2, 0]).unwrap();
        assert_eq!(p.as_root_permutation(), Some(vec![1, 2, 0]));
        assert!(p.pow(3).is_identity());
        assert_eq!(p.pow(-1), p.invert());
        assert!(VElement::root_permutation(roots.clone(), &[1, 1, 0]).is_err());
        let x = VElement::embed_cylinder(&x0(), roots.clone(), Address::root_cylinder(0)).unwrap();
        // Conjugating by a root permutation relabels the supporting root.
        let moved = x.conjugate_by(&p).unwrap();
        assert_eq!(moved, x.relabel_roots(&[1, 2, 0]));
        assert_eq!(moved, p.invert().compose(&x).unwrap().compose(&p).unwrap());
        assert_eq!(moved.support(), vec![Address::root_cylinder(1)]);
    }

    #[test]
    fn embedding_and_transport_errors() {
        let roots = RootSet::indexed(2);
        let x = VElement::embed_cylinder(&x0(), roots.clone(), Address::root_cylinder(0)).unwrap();
        assert!(matches!(
            VElement::embed_cylinder(&x, roots.clone(), Address::root_cylinder(1)),
            Err(Error::NotSingleRoot)
        ));
        assert!(matches!(
            VElement::transport(
                &x0(),
                roots.clone(),
                Address::root_cylinder(0),
                Address::new(0, Word::parse("1").unwrap())
            ),
            Err(Error::OverlappingCylinders(..))
        ));
        assert!(matches!(
            VElement::embed_cylinder(&x0(), roots.clone(), Address::root_cylinder(5)),
            Err(Error::RootOutOfRange { .. })
        ));
        assert!(matches!(x.compose(&x0()), Err(Error::RootSetMismatch)));
    }

    #[test]
    fn complement_partition() {
        let c = complement(2, &[Address::new(0, Word::parse("01").unwrap())]);
        let s: Vec<String> = c.iter().map(|a| format!("{a:?}")).collect();
        assert_eq!(s, ["0:00", "0:1", "1:ε"]);
    }
}
