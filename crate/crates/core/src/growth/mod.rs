//! Exact growth functions by ball enumeration, and rate estimates.

pub mod engine;

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{BudgetExceeded, Error, Result};
use crate::grig::{canonical_key_level, Letter, LevelPermutation};
use crate::thompson::{RootSet, VElement};
pub use engine::{enumerate, BallSpace, Limits, Spheres};

/// How elements are deduplicated during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyKind {
    /// Reduced prefix-replacement tables.
    ReducedTable,
    /// Level permutations at a level separating all elements of the ball.
    LevelPermutation,
    /// Normal-form tuples.
    NormalFormTuple,
}

/// `γ(ℓ)` for `ℓ = 0..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallStats {
    pub sizes: Vec<usize>,
    pub generator_count: usize,
    pub key_kind: KeyKind,
    pub peak_bytes: usize,
}

impl BallStats {
    fn from_spheres(s: &Spheres, generator_count: usize, key_kind: KeyKind) -> BallStats {
        let sizes = s
            .sizes
            .iter()
            .scan(0usize, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        BallStats { sizes, generator_count, key_kind, peak_bytes: s.peak_bytes }
    }

    pub fn depth(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Every `(m, n)` with `m + n ≤ L` where `γ(m+n) > γ(m)·γ(n)`.
    pub fn submultiplicativity_violations(&self) -> Vec<(usize, usize)> {
        let l = self.depth();
        let mut bad = Vec::new();
        for m in 0..=l {
            for n in m..=l - m {
                if self.sizes[m + n] as u128 > self.sizes[m] as u128 * self.sizes[n] as u128 {
                    bad.push((m, n));
                }
            }
        }
        bad
    }
}

/// Partial results when a ball enumeration runs out of budget.
pub type Truncated = BudgetExceeded<BallStats>;

fn finish(
    run: std::result::Result<Spheres, BudgetExceeded<Spheres>>,
    generator_count: usize,
    kind: KeyKind,
) -> std::result::Result<BallStats, Truncated> {
    match run {
        Ok(s) => Ok(BallStats::from_spheres(&s, generator_count, kind)),
        Err(e) => Err(BudgetExceeded {
            budget: e.budget,
            completed_depth: e.completed_depth,
            partial: BallStats::from_spheres(&e.partial, generator_count, kind),
        }),
    }
}

/// Ball enumeration in `V_Z` over an explicit generating set.
pub struct VBallSpace {
    roots: Arc<RootSet>,
    generators: Vec<VElement>,
    rigid: Vec<Option<Vec<u32>>>,
}

impl VBallSpace {
    /// Adds missing inverses and drops duplicates; the identity is kept out.
    pub fn new(generators: &[VElement]) -> Result<VBallSpace> {
        let roots = generators.first().ok_or(Error::RootSetMismatch)?.roots().clone();
        let mut closed: Vec<VElement> = Vec::new();
        for g in generators {
            if g.roots() != &roots && **g.roots() != *roots {
                return Err(Error::RootSetMismatch);
            }
            for h in [g.clone(), g.invert()] {
                if !h.is_identity() && !closed.contains(&h) {
                    closed.push(h);
                }
            }
        }
        let rigid = closed.iter().map(VElement::as_root_permutation).collect();
        Ok(VBallSpace { roots, generators: closed, rigid })
    }

    pub fn generators(&self) -> &[VElement] {
        &self.generators
    }
}

impl BallSpace for VBallSpace {
    type State = VElement;
    fn identity(&self) -> VElement {
        VElement::identity(self.roots.clone())
    }
    fn encode(&self, s: &VElement, out: &mut Vec<u8>) {
        s.write_key(out);
    }
    fn decode(&self, key: &[u8]) -> VElement {
        VElement::from_key(self.roots.clone(), key)
    }
    fn generator_count(&self) -> usize {
        self.generators.len()
    }
    fn step(&self, s: &VElement, g: usize, out: &mut Vec<u8>) {
        match &self.rigid[g] {
            Some(images) => s.then_root_permutation(images).write_key(out),
            None => s.compose(&self.generators[g]).expect("common root set").write_key(out),
        }
    }
}

/// `γ(ℓ)` over the inverse closure of `generators`.
pub fn ball_sizes(
    generators: &[VElement],
    depth: usize,
    limits: Limits,
) -> Result<std::result::Result<BallStats, Truncated>> {
    let space = VBallSpace::new(generators)?;
    let run = enumerate(&space, depth, limits, |_, _| {});
    Ok(finish(run, space.generator_count(), KeyKind::ReducedTable))
}

/// Ball enumeration in the Grigorchuk group through level permutations.
pub struct GrigBallSpace {
    level: usize,
    generators: Vec<LevelPermutation>,
}

impl GrigBallSpace {
    /// Keys separate all elements of length at most `max_len`.
    pub fn new(max_len: usize) -> GrigBallSpace {
        let level = canonical_key_level(max_len);
        GrigBallSpace {
            level,
            generators: Letter::ALL.iter().map(|&s| LevelPermutation::generator(s, level)).collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }
}

impl BallSpace for GrigBallSpace {
    type State = LevelPermutation;
    fn identity(&self) -> LevelPermutation {
        LevelPermutation::identity(self.level)
    }
    fn encode(&self, s: &LevelPermutation, out: &mut Vec<u8>) {
        s.write_key(out);
    }
    fn decode(&self, key: &[u8]) -> LevelPermutation {
        LevelPermutation::from_key(self.level, key)
    }
    fn generator_count(&self) -> usize {
        4
    }
    fn step(&self, s: &LevelPermutation, g: usize, out: &mut Vec<u8>) {
        s.then(&self.generators[g]).write_key(out);
    }
}

/// Exact `γ_G(ℓ)` over `{a, b, c, d}`.
pub fn grig_ball_sizes(depth: usize, limits: Limits) -> std::result::Result<BallStats, Truncated> {
    // Two words of length ≤ depth are equal iff their quotient of length ≤ 2·depth is trivial.
    let space = GrigBallSpace::new(2 * depth.max(1));
    finish(enumerate(&space, depth, limits, |_, _| {}), 4, KeyKind::LevelPermutation)
}

/// `(γ(ℓ))^{1/ℓ}` for one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub ell: usize,
    pub gamma: usize,
    pub rate: f64,
}

/// Rate estimates and their minimum, the finite-depth proxy for `ω(G, S)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<RateRow>,
    pub min_rate: Option<f64>,
    pub stats: BallStats,
}

pub fn rate_estimates(stats: &BallStats) -> GrowthReport {
    let rows: Vec<RateRow> = stats
        .sizes
        .iter()
        .enumerate()
        .map(|(ell, &gamma)| {
            let rate = if ell == 0 { 1.0 } else { (gamma as f64).powf(1.0 / ell as f64) };
            RateRow { ell, gamma, rate }
        })
        .collect();
    let min_rate = rows.iter().skip(1).map(|r| r.rate).reduce(f64::min);
    GrowthReport { rows, min_rate, stats: stats.clone() }
}

impl GrowthReport {
    /// `ell,gamma,rate` with rates to six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,gamma,rate\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.6}", r.ell, r.gamma, r.rate);
        }
        out
    }
}
