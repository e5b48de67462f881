use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::word::{Address, Word};
use crate::error::{Error, Result};

/// The finite index set `Z` of a Higman–Thompson group `V_Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    labels: Vec<String>,
    index: FxHashMap<String, u32>,
}

impl RootSet {
    pub fn new(labels: Vec<String>) -> Result<Arc<RootSet>> {
        if labels.is_empty() {
            return Err(Error::Parse { line: 0, message: "a root set needs at least one label".into() });
        }
        let mut index = FxHashMap::default();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(Error::Parse { line: 0, message: format!("duplicate root label {l:?}") });
            }
        }
        Ok(Arc::new(RootSet { labels, index }))
    }

    /// The root set of plain `V`.
    pub fn single() -> Arc<RootSet> {
        RootSet::new(vec!["r".into()]).expect("valid labels")
    }

    /// Roots labeled `0, 1, …, m-1`.
    pub fn indexed(m: usize) -> Arc<RootSet> {
        RootSet::new((0..m).map(|i| i.to_string()).collect()).expect("valid labels")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_single(&self) -> bool {
        self.labels.len() == 1
    }

    pub fn label(&self, root: u32) -> &str {
        &self.labels[root as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }
}

pub(crate) fn same_roots(a: &Arc<RootSet>, b: &Arc<RootSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// One prefix replacement `domain·ξ ↦ range·ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub domain: Address,
    pub range: Address,
}

impl Pair {
    pub fn new(domain: Address, range: Address) -> Pair {
        Pair { domain, range }
    }
}

/// An element of `V_Z` in reduced canonical form: pairs sorted by domain, no
/// two sibling domains mapped to sibling ranges.
#[derive(Debug, Clone)]
pub struct VElement {
    roots: Arc<RootSet>,
    pairs: Vec<Pair>,
}

impl PartialEq for VElement {
    fn eq(&self, other: &VElement) -> bool {
        self.pairs == other.pairs && same_roots(&self.roots, &other.roots)
    }
}

impl Eq for VElement {}

impl Hash for VElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.pairs.hash(state);
    }
}

/// Checks that `addrs` (sorted) form a dyadic partition of every root.
fn check_partition(roots: &RootSet, addrs: &[Address], side: &'static str) -> Result<()> {
    for a in addrs {
        if a.root as usize >= roots.len() {
            return Err(Error::RootOutOfRange { root: a.root, size: roots.len() });
        }
    }
    for w in addrs.windows(2) {
        if w[0].is_prefix_of(&w[1]) {
            return Err(Error::DuplicateAddress { side, address: display_address(roots, &w[1]) });
        }
    }
    // In sorted order the leaves of a complete tree collapse pairwise to the root.
    let mut stack: Vec<Address> = Vec::new();
    let mut next_root = 0u32;
    for &a in addrs {
        if stack.is_empty() {
            if a.root != next_root {
                return Err(Error::NotAPartition { side, root: next_root });
            }
        } else if stack[0].root != a.root {
            return Err(Error::NotAPartition { side, root: stack[0].root });
        }
        let mut top = a;
        while let Some(prev) = stack.last() {
            match prev.sibling_parent(&top) {
                Some(parent) => {
                    stack.pop();
                    top = parent;
                }
                None => break,
            }
        }
        if top.word.is_empty() {
            debug_assert!(stack.is_empty());
            next_root += 1;
        } else {
            stack.push(top);
        }
    }
    if let Some(a) = stack.first() {
        return Err(Error::NotAPartition { side, root: a.root });
    }
    if (next_root as usize) < roots.len() {
        return Err(Error::NotAPartition { side, root: next_root });
    }
    Ok(())
}

pub(crate) fn display_address(roots: &RootSet, a: &Address) -> String {
    if roots.is_single() {
        a.word.to_string()
    } else {
        format!("{}:{}", roots.label(a.root), a.word)
    }
}

/// Reduces pairs already sorted by domain by merging sibling pairs to a fixpoint.
fn reduce_sorted(pairs: impl IntoIterator<Item = Pair>) -> Vec<Pair> {
    let mut stack: Vec<Pair> = Vec::new();
    for p in pairs {
        let mut top = p;
        while let Some(prev) = stack.last() {
            let merged = prev.domain.sibling_parent(&top.domain).zip(prev.range.sibling_parent(&top.range));
            match merged {
                Some((d, r)) => {
                    stack.pop();
                    top = Pair::new(d, r);
                }
                None => break,
            }
        }
        stack.push(top);
    }
    stack
}

/// Canonical reduced form of a valid pair table.
pub fn reduce(mut pairs: Vec<Pair>) -> Vec<Pair> {
    pairs.sort_unstable();
    reduce_sorted(pairs)
}

impl VElement {
    /// Validates both columns and returns the reduced element.
    pub fn new(roots: Arc<RootSet>, pairs: Vec<Pair>) -> Result<VElement> {
        let mut domains: Vec<Address> = pairs.iter().map(|p| p.domain).collect();
        let mut ranges: Vec<Address> = pairs.iter().map(|p| p.range).collect();
        domains.sort_unstable();
        ranges.sort_unstable();
        check_partition(&roots, &domains, "domain")?;
        check_partition(&roots, &ranges, "range")?;
        Ok(VElement { pairs: reduce(pairs), roots })
    }

    pub fn identity(roots: Arc<RootSet>) -> VElement {
        let pairs =
            (0..roots.len() as u32).map(|r| Pair::new(Address::root_cylinder(r), Address::root_cylinder(r))).collect();
        VElement { roots, pairs }
    }

    /// The element moving root `r` rigidly onto root `images[r]`.
    pub fn root_permutation(roots: Arc<RootSet>, images: &[u32]) -> Result<VElement> {
        if images.len() != roots.len() {
            return Err(Error::CardinalityMismatch { domain: roots.len(), range: images.len() });
        }
        let pairs = images
            .iter()
            .enumerate()
            .map(|(r, &t)| Pair::new(Address::root_cylinder(r as u32), Address::root_cylinder(t)))
            .collect();
        VElement::new(roots, pairs)
    }

    pub fn roots(&self) -> &Arc<RootSet> {
        &self.roots
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|p| p.domain == p.range && p.domain.word.is_empty())
    }

    /// The root images if the element moves whole roots rigidly.
    pub fn as_root_permutation(&self) -> Option<Vec<u32>> {
        if self.pairs.len() != self.roots.len() {
            return None;
        }
        self.pairs
            .iter()
            .map(|p| (p.domain.word.is_empty() && p.range.word.is_empty()).then_some(p.range.root))
            .collect()
    }

    fn check_same(&self, other: &VElement) -> Result<()> {
        if same_roots(&self.roots, &other.roots) {
            Ok(())
        } else {
            Err(Error::RootSetMismatch)
        }
    }

    /// Index of the domain cylinder of `self` containing or contained in `a`:
    /// either `Ok(i)` with `domain_i ⊇ a`, or `Err(range)` listing the domains
    /// strictly inside `a`.
    fn locate(&self, a: &Address) -> std::result::Result<usize, std::ops::Range<usize>> {
        let upper = self.pairs.partition_point(|p| p.domain <= *a);
        if upper > 0 && self.pairs[upper - 1].domain.is_prefix_of(a) {
            return Ok(upper - 1);
        }
        let end = upper + self.pairs[upper..].partition_point(|p| a.is_prefix_of(&p.domain));
        Err(upper..end)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &VElement) -> Result<VElement> {
        self.check_same(other)?;
        let mut out = Vec::with_capacity(self.pairs.len().max(other.pairs.len()));
        for p in &self.pairs {
            match other.locate(&p.range) {
                Ok(j) => {
                    let q = &other.pairs[j];
                    let tail = p.range.word.suffix_after(q.domain.word.len());
                    out.push(Pair::new(p.domain, q.range.extend(tail)));
                }
                Err(inside) => {
                    let k = p.range.word.len();
                    for q in &other.pairs[inside] {
                        let tail = q.domain.word.suffix_after(k);
                        out.push(Pair::new(p.domain.extend(tail), q.range));
                    }
                }
            }
        }
        Ok(VElement { roots: self.roots.clone(), pairs: reduce_sorted(out) })
    }

    /// `self` followed by the rigid root permutation `images`; equal to
    /// composing with [`VElement::root_permutation`] but linear time.
    pub fn then_root_permutation(&self, images: &[u32]) -> VElement {
        assert_eq!(images.len(), self.roots.len());
        let pairs = self
            .pairs
            .iter()
            .map(|p| Pair::new(p.domain, Address::new(images[p.range.root as usize], p.range.word)))
            .collect();
        VElement { roots: self.roots.clone(), pairs }
    }

    pub fn invert(&self) -> VElement {
        let mut pairs: Vec<Pair> = self.pairs.iter().map(|p| Pair::new(p.range, p.domain)).collect();
        pairs.sort_unstable();
        VElement { roots: self.roots.clone(), pairs }
    }

    /// `self^k`, with negative powers through the inverse.
    pub fn pow(&self, k: i64) -> VElement {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = VElement::identity(self.roots.clone());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base).expect("same root set");
        }
        acc
    }

    /// `g^{-1}·self·g`.
    pub fn conjugate_by(&self, g: &VElement) -> Result<VElement> {
        if !same_roots(&self.roots, &g.roots) {
            return Err(Error::RootSetMismatch);
        }
        if let Some(images) = g.as_root_permutation() {
            return Ok(self.relabel_roots(&images));
        }
        g.invert().compose(self)?.compose(g)
    }

    pub fn commutes_with(&self, other: &VElement) -> Result<bool> {
        Ok(self.compose(other)? == other.compose(self)?)
    }

    /// Image of the cylinder `a` under prefix replacement.
    pub fn apply(&self, a: &Address) -> Result<Address> {
        match self.locate(a) {
            Ok(i) => {
                let p = &self.pairs[i];
                Ok(p.range.extend(a.word.suffix_after(p.domain.word.len())))
            }
            Err(_) => Err(Error::NeedsRefinement(display_address(&self.roots, a))),
        }
    }

    /// The pair table refined until every domain word has length at least `depth`.
    pub fn refined(&self, depth: usize) -> Vec<Pair> {
        let mut out = Vec::new();
        for p in &self.pairs {
            let extra = depth.saturating_sub(p.domain.word.len());
            for s in 0..1u128 << extra {
                let tail = Word::from_raw(if extra == 0 { 0 } else { s << (128 - extra) }, extra);
                out.push(Pair::new(p.domain.extend(tail), p.range.extend(tail)));
            }
        }
        out
    }

    /// Maximal cylinders made of moved domain cylinders of the reduced table.
    /// Each returned cylinder meets the support and their union contains it.
    pub fn support(&self) -> Vec<Address> {
        let moved = self.pairs.iter().filter(|p| p.domain != p.range).map(|p| p.domain);
        let mut stack: Vec<Address> = Vec::new();
        for a in moved {
            let mut top = a;
            while let Some(parent) = stack.last().and_then(|prev| prev.sibling_parent(&top)) {
                stack.pop();
                top = parent;
            }
            stack.push(top);
        }
        stack
    }

    /// Acts as `f` on the cylinder `target` and trivially elsewhere.
    pub fn embed_cylinder(f: &VElement, roots: Arc<RootSet>, target: Address) -> Result<VElement> {
        if !f.roots.is_single() {
            return Err(Error::NotSingleRoot);
        }
        if target.root as usize >= roots.len() {
            return Err(Error::RootOutOfRange { root: target.root, size: roots.len() });
        }
        let inside = f.pairs.iter().map(|p| Pair::new(target.extend(p.domain.word), target.extend(p.range.word)));
        Ok(with_identity_outside(roots, &[target], inside.collect()))
    }

    /// Transports `f` along `0ξ ↦ c0·ξ`, `1ξ ↦ c1·ξ`; trivial off `c0 ∪ c1`.
    pub fn transport(f: &VElement, roots: Arc<RootSet>, c0: Address, c1: Address) -> Result<VElement> {
        if !f.roots.is_single() {
            return Err(Error::NotSingleRoot);
        }
        for c in [c0, c1] {
            if c.root as usize >= roots.len() {
                return Err(Error::RootOutOfRange { root: c.root, size: roots.len() });
            }
        }
        if c0.comparable(&c1) {
            return Err(Error::OverlappingCylinders(display_address(&roots, &c0), display_address(&roots, &c1)));
        }
        let carry = |w: Word| {
            let base = if w.bit(0) { c1 } else { c0 };
            base.extend(w.suffix_after(1))
        };
        let inside = f.refined(1).into_iter().map(|p| Pair::new(carry(p.domain.word), carry(p.range.word)));
        Ok(with_identity_outside(roots, &[c0, c1], inside.collect()))
    }

    /// Moves every root label through `images` (conjugation by a root permutation).
    pub fn relabel_roots(&self, images: &[u32]) -> VElement {
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                Pair::new(
                    Address::new(images[p.domain.root as usize], p.domain.word),
                    Address::new(images[p.range.root as usize], p.range.word),
                )
            })
            .collect();
        VElement { roots: self.roots.clone(), pairs: reduce(pairs) }
    }

    /// Appends a compact byte encoding of the canonical table.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        let mut i = 0;
        while i < self.pairs.len() {
            let root = self.pairs[i].domain.root;
            let end = i + self.pairs[i..].partition_point(|p| p.domain.root == root);
            let first = &self.pairs[i];
            if end == i + 1 && first.range.word.is_empty() {
                write_varint(out, 2 * first.range.root as u64);
            } else {
                write_varint(out, 2 * (end - i) as u64 + 1);
                for p in &self.pairs[i..end] {
                    p.domain.word.write_packed(out);
                    write_varint(out, p.range.root as u64);
                    p.range.word.write_packed(out);
                }
            }
            i = end;
        }
    }

    pub fn to_key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_key(&mut out);
        out
    }

    /// Inverse of [`VElement::write_key`].
    pub fn from_key(roots: Arc<RootSet>, key: &[u8]) -> VElement {
        let mut pairs = Vec::with_capacity(roots.len());
        let mut pos = 0;
        for root in 0..roots.len() as u32 {
            let h = read_varint(key, &mut pos);
            if h.is_multiple_of(2) {
                pairs.push(Pair::new(Address::root_cylinder(root), Address::root_cylinder((h / 2) as u32)));
            } else {
                for _ in 0..h / 2 {
                    let dw = Word::read_packed(key, &mut pos);
                    let rr = read_varint(key, &mut pos) as u32;
                    let rw = Word::read_packed(key, &mut pos);
                    pairs.push(Pair::new(Address::new(root, dw), Address::new(rr, rw)));
                }
            }
        }
        debug_assert_eq!(pos, key.len());
        VElement { roots, pairs }
    }
}

/// Adds identity pairs on the complement of `cylinders` (pairwise incomparable).
fn with_identity_outside(roots: Arc<RootSet>, cylinders: &[Address], mut pairs: Vec<Pair>) -> VElement {
    for c in complement(roots.len(), cylinders) {
        pairs.push(Pair::new(c, c));
    }
    VElement { pairs: reduce(pairs), roots }
}

/// A dyadic partition of the complement of the given incomparable cylinders.
pub fn complement(root_count: usize, cylinders: &[Address]) -> Vec<Address> {
    fn walk(at: Address, cylinders: &[Address], out: &mut Vec<Address>) {
        if cylinders.contains(&at) {
            return;
        }
        if cylinders.iter().any(|c| at.is_prefix_of(c)) {
            walk(at.child(false), cylinders, out);
            walk(at.child(true), cylinders, out);
        } else {
            out.push(at);
        }
    }
    let mut out = Vec::new();
    for r in 0..root_count as u32 {
        walk(Address::root_cylinder(r), cylinders, &mut out);
    }
    out
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

pub(crate) fn read_varint(bytes: &[u8], pos: &mut usize) -> u64 {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let b = bytes[*pos];
        *pos += 1;
        v |= ((b & 0x7f) as u64) << shift;
        if b < 0x80 {
            return v;
        }
        shift += 7;
    }
}
