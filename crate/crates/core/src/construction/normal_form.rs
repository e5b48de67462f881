use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{check_commuting, Construction, Gen, Sym4};
use crate::error::{BudgetExceeded, Error, Result};
use crate::grig::{LevelPermutation, Vertex};
use crate::growth::engine::{enumerate, BallSpace, KeySet, Limits};
use crate::schreier::r_n;
use crate::thompson::{read_varint, write_varint, VElement};

/// The factors `p_1 · p_2 · p_3 · p_4` of a short word over `T_n`. Sites are
/// vertex indices of level `n`; only non-trivial values are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NormalForm {
    /// `π_n(g_1 ⋯ g_ℓ)`.
    pub p1: LevelPermutation,
    /// Sheet permutation at each site.
    pub p2: BTreeMap<u32, Sym4>,
    /// Permutation of the sites acting on sheet 1, as `x ↦ image`.
    pub p3: BTreeMap<u32, u32>,
    /// Exponents of the two Thompson generators at each site.
    pub p4: BTreeMap<u32, (i64, i64)>,
}

impl NormalForm {
    pub fn trivial(n: usize) -> NormalForm {
        NormalForm { p1: LevelPermutation::identity(n), p2: BTreeMap::new(), p3: BTreeMap::new(), p4: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.p1.level()
    }

    pub fn is_trivial(&self) -> bool {
        self.p1.is_identity() && self.p2.is_empty() && self.p3.is_empty() && self.p4.is_empty()
    }

    fn sites(&self) -> (u32, u32, u32) {
        let n = self.n();
        let rho = (1u32 << n) - 1;
        (rho, rho - 1, rho >> 1)
    }

    /// The normal form of `w·letter` from that of `w`.
    pub fn step(&self, letter: Gen) -> NormalForm {
        let n = self.n();
        let (rho, eta, theta) = self.sites();
        let mut out = self.clone();
        match letter {
            Gen::S(s) => {
                let mv = |x: u32| Vertex::from_index(x as usize, n).act_letter(s).index() as u32;
                out.p1 = self.p1.then(&LevelPermutation::generator(s, n));
                out.p2 = self.p2.iter().map(|(&x, &v)| (mv(x), v)).collect();
                out.p3 = self.p3.iter().map(|(&x, &y)| (mv(x), mv(y))).collect();
                out.p4 = self.p4.iter().map(|(&x, &v)| (mv(x), v)).collect();
            }
            Gen::Sym(sigma) => {
                let v = self.p2.get(&eta).copied().unwrap_or(Sym4::IDENTITY).then(&sigma);
                if v.is_identity() {
                    out.p2.remove(&eta);
                } else {
                    out.p2.insert(eta, v);
                }
            }
            Gen::Tau => {
                let image = |x: u32| self.p3.get(&x).copied().unwrap_or(x);
                let preimage = |y: u32| self.p3.iter().find(|(_, &v)| v == y).map(|(&k, _)| k).unwrap_or(y);
                let (from_rho, from_theta) = (preimage(rho), preimage(theta));
                debug_assert_eq!(image(from_rho), rho);
                for (x, y) in [(from_rho, theta), (from_theta, rho)] {
                    if x == y {
                        out.p3.remove(&x);
                    } else {
                        out.p3.insert(x, y);
                    }
                }
            }
            _ => {
                let (d0, d1) = match letter {
                    Gen::X0 => (1, 0),
                    Gen::X0Inv => (-1, 0),
                    Gen::X1 => (0, 1),
                    _ => (0, -1),
                };
                let e = self.p4.get(&rho).copied().unwrap_or((0, 0));
                let e = (e.0 + d0, e.1 + d1);
                if e == (0, 0) {
                    out.p4.remove(&rho);
                } else {
                    out.p4.insert(rho, e);
                }
            }
        }
        out
    }

    /// Folds [`NormalForm::step`] over `word` without checking hypotheses.
    pub fn of_word(word: &[Gen], n: usize) -> NormalForm {
        word.iter().fold(NormalForm::trivial(n), |acc, &g| acc.step(g))
    }

    /// The element `p_1 · p_2 · p_3 · p_4` of `V_{Y_n}`.
    pub fn realize(&self, c: &Construction) -> VElement {
        assert_eq!(c.n(), self.n());
        let n = self.n();
        let site = |x: u32| Vertex::from_index(x as usize, n);
        let p1 = c.diagonal(&self.p1);
        let mut images: Vec<u32> = (0..c.roots().len() as u32).collect();
        for (&x, sigma) in &self.p2 {
            for i in 1..=4u8 {
                images[c.root(site(x), i) as usize] = c.root(site(x), sigma.apply(i));
            }
        }
        let p2 = VElement::root_permutation(c.roots().clone(), &images).expect("a permutation");
        let p3 = c.sheet_one_permutation(self.p3.iter().map(|(&x, &y)| (site(x), site(y))));
        let mut acc = p1.compose(&p2).and_then(|e| e.compose(&p3)).expect("same roots");
        for (&x, &(e0, e1)) in &self.p4 {
            acc = acc.compose(&c.x0_at(site(x)).pow(e0)).expect("same roots");
            acc = acc.compose(&c.x1_at(site(x)).pow(e1)).expect("same roots");
        }
        acc
    }

    /// Writes the four factors as consecutive byte segments.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        let wide = self.n() > 8;
        for &i in self.p1.images() {
            if wide {
                out.extend_from_slice(&(i as u16).to_le_bytes());
            } else {
                out.push(i as u8);
            }
        }
        write_varint(out, self.p2.len() as u64);
        for (&x, s) in &self.p2 {
            write_varint(out, x as u64);
            out.push(s.rank());
        }
        write_varint(out, self.p3.len() as u64);
        for (&x, &y) in &self.p3 {
            write_varint(out, x as u64);
            write_varint(out, y as u64);
        }
        write_varint(out, self.p4.len() as u64);
        for (&x, &(a, b)) in &self.p4 {
            write_varint(out, x as u64);
            write_varint(out, zigzag(a));
            write_varint(out, zigzag(b));
        }
    }

    pub fn from_key(n: usize, key: &[u8]) -> NormalForm {
        let size = 1usize << n;
        let (images, mut pos): (Vec<u32>, usize) = if n > 8 {
            (key[..2 * size].chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect(), 2 * size)
        } else {
            (key[..size].iter().map(|&b| b as u32).collect(), size)
        };
        let p1 = LevelPermutation::from_images(n, images).expect("valid key");
        let mut p2 = BTreeMap::new();
        for _ in 0..read_varint(key, &mut pos) {
            let x = read_varint(key, &mut pos) as u32;
            p2.insert(x, Sym4::from_rank(key[pos]));
            pos += 1;
        }
        let mut p3 = BTreeMap::new();
        for _ in 0..read_varint(key, &mut pos) {
            let x = read_varint(key, &mut pos) as u32;
            p3.insert(x, read_varint(key, &mut pos) as u32);
        }
        let mut p4 = BTreeMap::new();
        for _ in 0..read_varint(key, &mut pos) {
            let x = read_varint(key, &mut pos) as u32;
            let a = unzigzag(read_varint(key, &mut pos));
            p4.insert(x, (a, unzigzag(read_varint(key, &mut pos))));
        }
        debug_assert_eq!(pos, key.len());
        NormalForm { p1, p2, p3, p4 }
    }
}

/// Byte boundaries of the four factor segments in a key.
fn split_key(n: usize, key: &[u8]) -> [usize; 5] {
    let mut pos = if n > 8 { 2 << n } else { 1 << n };
    let mut cuts = [0, pos, 0, 0, key.len()];
    for _ in 0..read_varint(key, &mut pos) {
        read_varint(key, &mut pos);
        pos += 1;
    }
    cuts[2] = pos;
    for _ in 0..2 * read_varint(key, &mut pos) {
        read_varint(key, &mut pos);
    }
    cuts[3] = pos;
    cuts
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let site = |x: &u32| Vertex::from_index(*x as usize, n).to_string();
        let moved = self.p1.images().iter().enumerate().filter(|(i, &j)| *i as u32 != j).count();
        writeln!(f, "p1: permutation of level {n} moving {moved} vertices")?;
        let p2: Vec<String> = self.p2.iter().map(|(x, s)| format!("{} -> {s}", site(x))).collect();
        writeln!(f, "p2: {{{}}}", p2.join(", "))?;
        let p3: Vec<String> = self.p3.iter().map(|(x, y)| format!("{} -> {}", site(x), site(y))).collect();
        writeln!(f, "p3: {{{}}}", p3.join(", "))?;
        let p4: Vec<String> = self.p4.iter().map(|(x, (a, b))| format!("{} -> ({a}, {b})", site(x))).collect();
        writeln!(f, "p4: {{{}}}", p4.join(", "))
    }
}

/// The normal form of `word`, after checking that `|word| ≤ r_n` and that
/// conjugates of distinct types commute for conjugators of length `≤ |word|`.
pub fn normal_form(word: &[Gen], n: usize) -> Result<NormalForm> {
    let l = word.len();
    if l > r_n(n) {
        return Err(Error::HypothesisViolated(format!("word length {l} exceeds r_n = {}", r_n(n))));
    }
    if !check_commuting(n, l)?.passed() {
        return Err(Error::HypothesisViolated(format!("conjugates fail to commute at n = {n}, length {l}")));
    }
    Ok(NormalForm::of_word(word, n))
}

/// Normal-form tuples as a ball space over the 33-letter alphabet.
pub struct TupleSpace {
    n: usize,
    letters: Vec<Gen>,
}

impl TupleSpace {
    pub fn new(n: usize) -> TupleSpace {
        TupleSpace { n, letters: Gen::alphabet() }
    }
}

impl BallSpace for TupleSpace {
    type State = NormalForm;
    fn identity(&self) -> NormalForm {
        NormalForm::trivial(self.n)
    }
    fn encode(&self, s: &NormalForm, out: &mut Vec<u8>) {
        s.write_key(out);
    }
    fn decode(&self, key: &[u8]) -> NormalForm {
        NormalForm::from_key(self.n, key)
    }
    fn generator_count(&self) -> usize {
        self.letters.len()
    }
    fn step(&self, s: &NormalForm, g: usize, out: &mut Vec<u8>) {
        s.step(self.letters[g]).write_key(out);
    }
}

/// `|P_1(ℓ)|, …, |P_4(ℓ)|` and the number of distinct tuples for `|w| ≤ ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorRow {
    pub ell: usize,
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
    pub p4: usize,
    pub tuples: usize,
}

impl FactorRow {
    /// `|P_1|·|P_2|·|P_3|·|P_4|`.
    pub fn product(&self) -> u128 {
        [self.p1, self.p2, self.p3, self.p4].iter().map(|&x| x as u128).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorCounts {
    pub n: usize,
    pub rows: Vec<FactorRow>,
    /// The depth is at most `r_n` and the commuting check passed at it, so
    /// every tuple is the normal form of the element it was reached with.
    pub within_hypothesis: bool,
    pub peak_bytes: usize,
}

impl FactorCounts {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,p1,p2,p3,p4,tuples\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", r.ell, r.p1, r.p2, r.p3, r.p4, r.tuples));
        }
        out
    }
}

/// Enumerates normal-form tuples of all words of length `≤ depth` by BFS.
pub fn count_factors(n: usize, depth: usize, limits: Limits) -> Result<FactorCounts, BudgetExceeded<FactorCounts>> {
    let within_hypothesis = depth <= r_n(n) && check_commuting(n, depth).map(|r| r.passed()).unwrap_or(false);
    let space = TupleSpace::new(n);
    let mut parts: [KeySet; 4] = Default::default();
    let mut rows: Vec<FactorRow> = Vec::new();
    let mut current = 0usize;
    let mut tuples = 0usize;
    let snapshot = |ell: usize, parts: &[KeySet; 4], tuples: usize| FactorRow {
        ell,
        p1: parts[0].len(),
        p2: parts[1].len(),
        p3: parts[2].len(),
        p4: parts[3].len(),
        tuples,
    };
    let run = enumerate(&space, depth, limits, |k, key| {
        if k != current {
            rows.push(snapshot(current, &parts, tuples));
            current = k;
        }
        tuples += 1;
        let cuts = split_key(n, key);
        for (i, part) in parts.iter_mut().enumerate() {
            part.insert(&key[cuts[i]..cuts[i + 1]]);
        }
    });
    let done = run.as_ref().map(|s| s.sizes.len() - 1).unwrap_or_else(|e| e.completed_depth);
    let peak = run.as_ref().map(|s| s.peak_bytes).unwrap_or_else(|e| e.partial.peak_bytes);
    // Depths with empty spheres never trigger a visit.
    while rows.len() <= done {
        rows.push(snapshot(rows.len(), &parts, tuples));
    }
    rows.truncate(done + 1);
    let counts = FactorCounts { n, rows, within_hypothesis, peak_bytes: peak };
    match run {
        Ok(_) => Ok(counts),
        Err(e) => Err(BudgetExceeded { budget: e.budget, completed_depth: e.completed_depth, partial: counts }),
    }
}
