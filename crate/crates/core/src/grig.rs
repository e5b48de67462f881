//! The first Grigorchuk group `G = <a, b, c, d>` acting on the binary rooted
//! tree and on its boundary.
//!
//! Every action here is a right action: `v.act(w)` is the image `v·w`, and a
//! word `s1 s2 … sk` applies `s1` first. States follow the product rule
//! `(gh)_v = g_v · h_{v·g}`.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest tree level a [`Vertex`] (and a [`BoundaryPoint`] stem) can address.
pub const MAX_LEVEL: usize = 64;

/// One of the four generators. Each is an involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i & 3]
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'a' => Ok(Letter::A),
            'b' => Ok(Letter::B),
            'c' => Ok(Letter::C),
            'd' => Ok(Letter::D),
            other => Err(Error::InvalidLetter(other)),
        }
    }

    /// States `(x_0, x_1)` of a letter that fixes the first level.
    /// `None` means the identity.
    fn sections(self) -> [Option<Letter>; 2] {
        match self {
            Letter::A => [None, None],
            Letter::B => [Some(Letter::A), Some(Letter::C)],
            Letter::C => [Some(Letter::A), Some(Letter::D)],
            Letter::D => [None, Some(Letter::B)],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A word over `{a, b, c, d}`. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GrigWord(pub Vec<Letter>);

impl GrigWord {
    pub fn identity() -> Self {
        GrigWord(Vec::new())
    }

    pub fn letter(s: Letter) -> Self {
        GrigWord(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &GrigWord) -> GrigWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GrigWord(v)
    }

    /// Inverse element; the generators are involutions so this is the reversal.
    pub fn inverse(&self) -> GrigWord {
        GrigWord(self.0.iter().rev().copied().collect())
    }

    pub fn reduced(&self) -> GrigWord {
        reduce_word(self)
    }
}

impl FromStr for GrigWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim().chars().map(Letter::from_char).collect::<Result<Vec<_>>>().map(GrigWord)
    }
}

impl fmt::Display for GrigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl From<&[Letter]> for GrigWord {
    fn from(v: &[Letter]) -> Self {
        GrigWord(v.to_vec())
    }
}

/// Root permutation plus the two first-level states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathDecomp {
    pub root_swap: bool,
    pub child0: GrigWord,
    pub child1: GrigWord,
}

impl WreathDecomp {
    pub fn child(&self, x: u8) -> &GrigWord {
        if x == 0 {
            &self.child0
        } else {
            &self.child1
        }
    }
}

/// A vertex of the tree: a binary word of length `level`, first letter in the
/// most significant position. The vertex index is `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    bits: u64,
    level: u8,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { bits: 0, level: 0 }
    }

    /// Vertex with index `bits` on `level`. Panics if `level > MAX_LEVEL` or the
    /// index does not fit.
    pub fn new(bits: u64, level: usize) -> Self {
        assert!(level <= MAX_LEVEL, "level {level} exceeds {MAX_LEVEL}");
        assert!(level == 64 || bits >> level == 0, "index {bits} does not fit level {level}");
        Vertex { bits, level: level as u8 }
    }

    pub fn from_index(index: usize, level: usize) -> Self {
        Vertex::new(index as u64, level)
    }

    /// `1^n`.
    pub fn ones(level: usize) -> Self {
        Vertex::new(low_mask(level), level)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_LEVEL {
            return Err(Error::LevelTooLarge { level: s.len(), max: MAX_LEVEL });
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidBits(s.to_string())),
                };
        }
        Ok(Vertex { bits, level: s.len() as u8 })
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// The `i`-th letter, counting from the root.
    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i < self.level());
        ((self.bits >> (self.level() - 1 - i)) & 1) as u8
    }

    pub fn push(&self, bit: u8) -> Vertex {
        assert!(self.level() < MAX_LEVEL, "vertex deeper than {MAX_LEVEL}");
        Vertex { bits: (self.bits << 1) | bit as u64, level: self.level + 1 }
    }

    pub fn children(&self) -> [Vertex; 2] {
        [self.push(0), self.push(1)]
    }

    pub fn act_letter(&self, s: Letter) -> Vertex {
        Vertex { bits: act_letter_bits(self.bits, self.level(), s), level: self.level }
    }

    pub fn act(&self, w: &GrigWord) -> Vertex {
        act_vertex(*self, w)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.level() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

fn low_mask(level: usize) -> u64 {
    if level >= 64 {
        u64::MAX
    } else {
        (1u64 << level) - 1
    }
}

/// Action of a single generator on the `level`-bit word `bits`.
fn act_letter_bits(bits: u64, level: usize, s: Letter) -> u64 {
    if level == 0 {
        return bits;
    }
    if s == Letter::A {
        return bits ^ (1u64 << (level - 1));
    }
    // Walk down the tree: along 1s the state cycles b -> c -> d -> b; at the
    // first 0 the state is a (for b, c) or trivial (for d).
    let mut state = s;
    for pos in (0..level).rev() {
        if (bits >> pos) & 1 == 0 {
            return match state {
                Letter::B | Letter::C if pos > 0 => bits ^ (1u64 << (pos - 1)),
                _ => bits,
            };
        }
        state = match state {
            Letter::B => Letter::C,
            Letter::C => Letter::D,
            _ => Letter::B,
        };
    }
    bits
}

/// A point `stem·1^∞` of the boundary. The stem is canonical: empty or ending
/// in `0`. The empty stem is `ρ = 1^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    stem: Vertex,
}

impl BoundaryPoint {
    /// `ρ = 1^∞`.
    pub fn rho() -> Self {
        BoundaryPoint { stem: Vertex::root() }
    }

    /// The point `stem·1^∞`; trailing 1s of the stem are stripped.
    pub fn from_stem(stem: Vertex) -> Self {
        let mut bits = stem.bits;
        let mut level = stem.level();
        while level > 0 && bits & 1 == 1 {
            bits >>= 1;
            level -= 1;
        }
        BoundaryPoint { stem: Vertex { bits, level: level as u8 } }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Vertex::parse(s).map(BoundaryPoint::from_stem)
    }

    pub fn stem(&self) -> Vertex {
        self.stem
    }

    /// The length-`n` prefix of the infinite sequence.
    pub fn prefix(&self, n: usize) -> Vertex {
        let l = self.stem.level();
        if n <= l {
            Vertex::new(self.stem.bits >> (l - n), n)
        } else {
            let extra = n - l;
            Vertex::new((self.stem.bits << extra) | low_mask(extra), n)
        }
    }

    pub fn act_letter(&self, s: Letter) -> BoundaryPoint {
        act_boundary_letter(*self, s)
    }

    pub fn act(&self, w: &GrigWord) -> BoundaryPoint {
        act_boundary(*self, w)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}1^inf", self.stem)
    }
}

fn act_boundary_letter(p: BoundaryPoint, s: Letter) -> BoundaryPoint {
    let l = p.stem.level();
    if l == 0 {
        // Every element of {b, c, d} fixes 1^∞; a turns it into 0·1^∞.
        return if s == Letter::A { BoundaryPoint { stem: Vertex::new(0, 1) } } else { p };
    }
    // The stem ends in 0, so the generator acts within the stem plus at most
    // the first bit of the tail. Extend by one 1 and act as on a vertex.
    let extended = p.stem.push(1);
    BoundaryPoint::from_stem(extended.act_letter(s))
}

/// Image of a boundary point under a word.
pub fn act_boundary(p: BoundaryPoint, w: &GrigWord) -> BoundaryPoint {
    w.0.iter().fold(p, |q, &s| act_boundary_letter(q, s))
}

/// Image of a vertex under a word; preserves the level.
pub fn act_vertex(v: Vertex, w: &GrigWord) -> Vertex {
    let bits = w.0.iter().fold(v.bits, |b, &s| act_letter_bits(b, v.level(), s));
    Vertex { bits, level: v.level }
}

/// Alternating normal form `[a] x a x … [a]` with `x ∈ {b, c, d}`.
pub fn reduce_word(w: &GrigWord) -> GrigWord {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &s in &w.0 {
        match out.last().copied() {
            Some(t) if (t == Letter::A) == (s == Letter::A) => {
                out.pop();
                // Klein four-group on {1, b, c, d}: with b=1, c=2, d=3 the
                // product is the xor of the indices.
                let prod = t.index() ^ s.index();
                if s != Letter::A && prod != 0 {
                    out.push(Letter::from_index(prod));
                }
            }
            _ => out.push(s),
        }
    }
    GrigWord(out)
}

/// Wreath decomposition `(σ_w, w_0, w_1)` with reduced children.
pub fn wreath_decompose(w: &GrigWord) -> WreathDecomp {
    let mut children = [Vec::new(), Vec::new()];
    let mut swap = false;
    for (start, child) in children.iter_mut().enumerate() {
        let mut pos = start;
        for &s in &w.0 {
            if s == Letter::A {
                pos ^= 1;
            } else if let Some(t) = s.sections()[pos] {
                child.push(t);
            }
        }
        if start == 0 {
            swap = pos == 1;
        }
    }
    let [c0, c1] = children;
    WreathDecomp { root_swap: swap, child0: reduce_word(&GrigWord(c0)), child1: reduce_word(&GrigWord(c1)) }
}

/// The state `w_v`, reduced.
pub fn state(w: &GrigWord, v: Vertex) -> GrigWord {
    let mut cur = reduce_word(w);
    for i in 0..v.level() {
        if cur.is_empty() {
            break;
        }
        let dec = wreath_decompose(&cur);
        cur = if v.bit(i) == 0 { dec.child0 } else { dec.child1 };
    }
    cur
}

/// `⌈log2 x⌉` for `x ≥ 1`, and 0 for `x = 0`.
pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Word problem solver by contraction, memoised on reduced words.
#[derive(Debug, Default)]
pub struct TrivialityOracle {
    memo: FxHashMap<GrigWord, bool>,
}

impl TrivialityOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_trivial(&mut self, w: &GrigWord) -> bool {
        let r = reduce_word(w);
        let bound = ceil_log2(r.len()) + 2;
        self.trivial_reduced(r, 0, bound)
    }

    fn trivial_reduced(&mut self, w: GrigWord, depth: usize, bound: usize) -> bool {
        if w.is_empty() {
            return true;
        }
        if w.0.iter().filter(|&&s| s == Letter::A).count() % 2 == 1 {
            return false;
        }
        if let Some(&known) = self.memo.get(&w) {
            return known;
        }
        debug_assert!(depth < bound, "contraction exceeded depth {bound} on {w}");
        let dec = wreath_decompose(&w);
        let result =
            self.trivial_reduced(dec.child0, depth + 1, bound) && self.trivial_reduced(dec.child1, depth + 1, bound);
        self.memo.insert(w, result);
        result
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

thread_local! {
    static ORACLE: RefCell<TrivialityOracle> = RefCell::new(TrivialityOracle::new());
}

/// True iff `w` represents the identity. Uses a thread-local memo table.
pub fn is_trivial(w: &GrigWord) -> bool {
    ORACLE.with(|o| o.borrow_mut().is_trivial(w))
}

/// True iff `u` and `v` represent the same element.
pub fn words_equal(u: &GrigWord, v: &GrigWord) -> bool {
    is_trivial(&u.concat(&v.inverse()))
}

/// A permutation of the `2^level` vertices of one level, in the right action:
/// `images[v]` is the index of `v·g`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LevelPermutation {
    level: u8,
    images: Vec<u32>,
}

/// Levels above this are refused by [`LevelPermutation`] constructors.
pub const MAX_PERMUTATION_LEVEL: usize = 24;

impl LevelPermutation {
    pub fn identity(level: usize) -> Self {
        assert!(level <= MAX_PERMUTATION_LEVEL);
        LevelPermutation { level: level as u8, images: (0..1u32 << level).collect() }
    }

    /// The permutation induced by one generator.
    pub fn generator(s: Letter, level: usize) -> Self {
        assert!(level <= MAX_PERMUTATION_LEVEL);
        let images = (0..1u64 << level).map(|b| act_letter_bits(b, level, s) as u32).collect();
        LevelPermutation { level: level as u8, images }
    }

    pub fn from_images(level: usize, images: Vec<u32>) -> Option<Self> {
        if level > MAX_PERMUTATION_LEVEL || images.len() != 1 << level {
            return None;
        }
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(LevelPermutation { level: level as u8, images })
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn image(&self, v: usize) -> usize {
        self.images[v] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LevelPermutation) -> LevelPermutation {
        assert_eq!(self.level, other.level);
        LevelPermutation { level: self.level, images: self.images.iter().map(|&i| other.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> LevelPermutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        LevelPermutation { level: self.level, images: inv }
    }

    /// Little-endian byte encoding used as a deduplication key.
    pub fn to_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.images.len() * 4);
        self.write_key(&mut out);
        out
    }

    pub fn write_key(&self, out: &mut Vec<u8>) {
        if self.level <= 16 {
            for &i in &self.images {
                out.extend_from_slice(&(i as u16).to_le_bytes());
            }
        } else {
            for &i in &self.images {
                out.extend_from_slice(&i.to_le_bytes());
            }
        }
    }

    pub fn from_key(level: usize, key: &[u8]) -> LevelPermutation {
        let images = if level <= 16 {
            key.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect()
        } else {
            key.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect()
        };
        LevelPermutation { level: level as u8, images }
    }
}

/// `π_n(w)`.
pub fn level_permutation(w: &GrigWord, n: usize) -> LevelPermutation {
    assert!(n <= MAX_PERMUTATION_LEVEL, "level {n} exceeds {MAX_PERMUTATION_LEVEL}");
    let images = (0..1u64 << n).map(|b| w.0.iter().fold(b, |x, &s| act_letter_bits(x, n, s)) as u32).collect();
    LevelPermutation { level: n as u8, images }
}

/// Level used by [`canonical_key`] for elements of length at most `max_len`.
pub fn canonical_key_level(max_len: usize) -> usize {
    ceil_log2(max_len.max(1)) + 4
}

/// `π_N(w)` with `N = ⌈log2 L⌉ + 4`; separates elements of length `≤ L`.
pub fn canonical_key(w: &GrigWord, max_len: usize) -> LevelPermutation {
    level_permutation(w, canonical_key_level(max_len))
}

/// The `2^n` states of `w` at the vertices of level `n`, ordered by vertex index.
pub fn nucleus_states(w: &GrigWord, n: usize) -> Vec<GrigWord> {
    let mut states = vec![reduce_word(w)];
    for _ in 0..n {
        states = states
            .iter()
            .flat_map(|s| {
                let dec = wreath_decompose(s);
                [dec.child0, dec.child1]
            })
            .collect();
    }
    states
}

/// Is the reduced word one of `1, a, b, c, d`?
pub fn in_nucleus(w: &GrigWord) -> bool {
    reduce_word(w).len() <= 1
}

/// All reduced (alternating) words of length at most `max_len`, shortest first.
pub fn reduced_words(max_len: usize) -> Vec<GrigWord> {
    let mut out = vec![GrigWord::identity()];
    let mut layer = vec![GrigWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            let choices: &[Letter] = match w.0.last() {
                None => &Letter::ALL,
                Some(Letter::A) => &[Letter::B, Letter::C, Letter::D],
                Some(_) => &[Letter::A],
            };
            for &s in choices {
                let mut v = w.0.clone();
                v.push(s);
                next.push(GrigWord(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
