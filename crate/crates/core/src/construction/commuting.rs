use std::sync::{Arc, LazyLock, Mutex};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::{Construction, Gen, Sym4};
use crate::error::Result;
use crate::grig::{GrigWord, Letter, LevelPermutation};
use crate::thompson::{Address, VElement};

/// A pair of conjugates `σ^g`, `(σ')^{g'}` that do not commute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutingFailure {
    pub first: Gen,
    pub g: String,
    pub second: Gen,
    pub g_prime: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypePairReport {
    pub types: (u8, u8),
    /// Distinct pairs of conjugate elements compared.
    pub checked: usize,
    pub failures: Vec<CommutingFailure>,
}

/// Outcome of comparing all conjugates by elements of `G_n` of length at
/// most `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutingReport {
    pub n: usize,
    pub bound: usize,
    /// Distinct elements of `G_n` of length at most `bound`.
    pub ball_size: usize,
    pub pairs: Vec<TypePairReport>,
}

impl CommutingReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.failures.is_empty())
    }

    pub fn pair(&self, a: u8, b: u8) -> Option<&TypePairReport> {
        let key = (a.min(b), a.max(b));
        self.pairs.iter().find(|p| p.types == key)
    }
}

/// Distinct elements of `G_n` of length at most `bound`, each with a
/// shortest word, in BFS order.
pub(crate) fn level_ball(n: usize, bound: usize) -> Vec<(LevelPermutation, GrigWord)> {
    let gens: Vec<LevelPermutation> = Letter::ALL.iter().map(|&s| LevelPermutation::generator(s, n)).collect();
    let mut seen: FxHashMap<LevelPermutation, ()> = FxHashMap::default();
    let mut out = vec![(LevelPermutation::identity(n), GrigWord::identity())];
    seen.insert(out[0].0.clone(), ());
    let mut start = 0;
    for _ in 0..bound {
        let end = out.len();
        for i in start..end {
            for (k, s) in gens.iter().enumerate() {
                let p = out[i].0.then(s);
                if seen.insert(p.clone(), ()).is_none() {
                    let w = out[i].1.concat(&GrigWord::letter(Letter::from_index(k)));
                    out.push((p, w));
                }
            }
        }
        start = end;
    }
    out
}

type Memo = Mutex<FxHashMap<(usize, usize), Arc<CommutingReport>>>;

static MEMO: LazyLock<Memo> = LazyLock::new(Default::default);

/// Checks that `σ^g` and `(σ')^{g'}` commute for generators of distinct
/// types in `{2, 3, 4}` and all `g, g'` of length at most `bound`, by exact
/// composition in `V_{Y_n}`. Type 2 is represented by every non-identity
/// element of `Sym(4)`, type 4 by both Thompson generators. Memoized.
pub fn check_commuting(n: usize, bound: usize) -> Result<Arc<CommutingReport>> {
    if let Some(r) = MEMO.lock().expect("memo lock").get(&(n, bound)) {
        return Ok(r.clone());
    }
    let c = Construction::new(n)?;
    let ball = level_ball(n, bound);
    let reps: [Vec<Gen>; 3] =
        [Sym4::all().into_iter().skip(1).map(Gen::Sym).collect(), vec![Gen::Tau], vec![Gen::X0, Gen::X1]];

    // Distinct conjugates per type with their supports, keeping one witness each.
    type Conjugate<'a> = (VElement, Vec<Address>, Gen, &'a GrigWord);
    let mut conjugates: Vec<Vec<Conjugate>> = vec![Vec::new(); 3];
    let mut seen: [FxHashSet<VElement>; 3] = Default::default();
    for (perm, word) in &ball {
        let g = c.diagonal(perm);
        for (t, gens) in reps.iter().enumerate() {
            for &s in gens {
                let conj = c.element(s).conjugate_by(&g)?;
                if seen[t].insert(conj.clone()) {
                    let support = conj.support();
                    conjugates[t].push((conj, support, s, word));
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let mut report = TypePairReport { types: (a as u8 + 2, b as u8 + 2), checked: 0, failures: Vec::new() };
        for (x, sx, s, g) in &conjugates[a] {
            for (y, sy, s2, g2) in &conjugates[b] {
                report.checked += 1;
                // Elements with disjoint supports commute.
                let overlap = sx.iter().any(|p| sy.iter().any(|q| p.comparable(q)));
                if overlap && !x.commutes_with(y)? {
                    report.failures.push(CommutingFailure {
                        first: *s,
                        g: g.to_string(),
                        second: *s2,
                        g_prime: g2.to_string(),
                    });
                }
            }
        }
        pairs.push(report);
    }
    let report = Arc::new(CommutingReport { n, bound, ball_size: ball.len(), pairs });
    MEMO.lock().expect("memo lock").insert((n, bound), report.clone());
    Ok(report)
}
