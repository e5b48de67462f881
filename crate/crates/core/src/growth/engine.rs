//! Breadth-first ball enumeration over canonical byte keys.
//!
//! Generating sets are inverse-closed, so the neighbors of the sphere of
//! radius `k` lie in the spheres `k-1`, `k` and `k+1`; only three spheres are
//! kept in memory. Frontiers are processed in fixed-size chunks whose results
//! are merged in chunk order, which makes every output independent of the
//! number of worker threads.

use std::hash::Hasher;

use hashbrown::HashTable;
use rayon::prelude::*;
use rustc_hash::FxHasher;
use serde::Serialize;

use crate::error::BudgetExceeded;

/// A group presented through canonical byte keys of its elements.
pub trait BallSpace: Sync {
    type State;

    fn identity(&self) -> Self::State;
    fn encode(&self, state: &Self::State, out: &mut Vec<u8>);
    fn decode(&self, key: &[u8]) -> Self::State;
    /// Size of the inverse-closed generating set.
    fn generator_count(&self) -> usize;
    /// Appends the key of `state·s_gen` to `out`.
    fn step(&self, state: &Self::State, gen: usize, out: &mut Vec<u8>);
}

fn hash_key(key: &[u8]) -> u64 {
    let mut h = FxHasher::default();
    h.write(key);
    h.write_usize(key.len());
    h.finish()
}

/// Insertion-ordered set of byte keys stored in one arena.
#[derive(Default)]
pub(crate) struct KeySet {
    bytes: Vec<u8>,
    ends: Vec<usize>,
    table: HashTable<u32>,
}

impl KeySet {
    pub(crate) fn len(&self) -> usize {
        self.ends.len()
    }

    pub(crate) fn get(&self, i: usize) -> &[u8] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.bytes[start..self.ends[i]]
    }

    fn contains_hashed(&self, key: &[u8], hash: u64) -> bool {
        self.table.find(hash, |&i| self.get(i as usize) == key).is_some()
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, key: &[u8]) -> bool {
        self.contains_hashed(key, hash_key(key))
    }

    /// Inserts `key`; returns `false` if it was present.
    fn insert_hashed(&mut self, key: &[u8], hash: u64) -> bool {
        if self.contains_hashed(key, hash) {
            return false;
        }
        let id = self.ends.len() as u32;
        self.bytes.extend_from_slice(key);
        self.ends.push(self.bytes.len());
        let (bytes, ends) = (&self.bytes, &self.ends);
        let get = |i: u32| {
            let i = i as usize;
            let start = if i == 0 { 0 } else { ends[i - 1] };
            &bytes[start..ends[i]]
        };
        self.table.insert_unique(hash, id, |&j| hash_key(get(j)));
        true
    }

    pub(crate) fn insert(&mut self, key: &[u8]) -> bool {
        self.insert_hashed(key, hash_key(key))
    }

    pub(crate) fn heap_bytes(&self) -> usize {
        self.bytes.capacity() + self.ends.capacity() * 8 + self.table.capacity() * 5
    }
}

/// Resource limits for an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Approximate cap on the memory held by stored keys.
    pub budget_bytes: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { budget_bytes: 3 << 30, threads: None }
    }
}

/// Sphere sizes of a completed (or partial) enumeration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Spheres {
    /// `sizes[k]` is the number of elements of word length exactly `k`.
    pub sizes: Vec<usize>,
    /// Largest memory footprint of the stored keys, in bytes.
    pub peak_bytes: usize,
}

const CHUNK: usize = 256;

/// Enumerates spheres up to radius `depth`. `visit(k, key)` is called once
/// for every element, in a deterministic order.
pub fn enumerate<S, V>(space: &S, depth: usize, limits: Limits, visit: V) -> Result<Spheres, BudgetExceeded<Spheres>>
where
    S: BallSpace,
    V: FnMut(usize, &[u8]) + Send,
{
    match limits.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build().expect("thread pool");
            pool.install(|| enumerate_in_pool(space, depth, limits.budget_bytes, visit))
        }
        None => enumerate_in_pool(space, depth, limits.budget_bytes, visit),
    }
}

fn enumerate_in_pool<S, V>(
    space: &S,
    depth: usize,
    budget: usize,
    mut visit: V,
) -> Result<Spheres, BudgetExceeded<Spheres>>
where
    S: BallSpace,
    V: FnMut(usize, &[u8]),
{
    let mut identity = Vec::new();
    space.encode(&space.identity(), &mut identity);
    let mut previous = KeySet::default();
    let mut current = KeySet::default();
    current.insert(&identity);
    visit(0, &identity);
    let mut out = Spheres { sizes: vec![1], peak_bytes: current.heap_bytes() };
    let batch = CHUNK * rayon::current_num_threads().max(1) * 4;

    for k in 1..=depth {
        let mut next = KeySet::default();
        let mut start = 0;
        while start < current.len() {
            let end = (start + batch).min(current.len());
            let chunks: Vec<(usize, usize)> = (start..end).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(end))).collect();
            let found: Vec<KeySet> = chunks
                .into_par_iter()
                .map(|(s, e)| {
                    let mut local = KeySet::default();
                    let mut buf = Vec::new();
                    for i in s..e {
                        let state = space.decode(current.get(i));
                        for g in 0..space.generator_count() {
                            buf.clear();
                            space.step(&state, g, &mut buf);
                            let h = hash_key(&buf);
                            if !current.contains_hashed(&buf, h) && !previous.contains_hashed(&buf, h) {
                                local.insert_hashed(&buf, h);
                            }
                        }
                    }
                    local
                })
                .collect();
            for local in &found {
                for i in 0..local.len() {
                    let key = local.get(i);
                    if next.insert(key) {
                        visit(k, key);
                    }
                }
            }
            drop(found);
            let used = previous.heap_bytes() + current.heap_bytes() + next.heap_bytes();
            out.peak_bytes = out.peak_bytes.max(used);
            if used > budget {
                return Err(BudgetExceeded { budget, completed_depth: k - 1, partial: out });
            }
            start = end;
        }
        out.sizes.push(next.len());
        previous = std::mem::replace(&mut current, next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The integers mod `m` with generators `±1`.
    struct Cyclic(u32);

    impl BallSpace for Cyclic {
        type State = u32;
        fn identity(&self) -> u32 {
            0
        }
        fn encode(&self, s: &u32, out: &mut Vec<u8>) {
            out.extend_from_slice(&s.to_le_bytes());
        }
        fn decode(&self, key: &[u8]) -> u32 {
            u32::from_le_bytes(key.try_into().unwrap())
        }
        fn generator_count(&self) -> usize {
            2
        }
        fn step(&self, s: &u32, g: usize, out: &mut Vec<u8>) {
            let t = if g == 0 { (s + 1) % self.0 } else { (s + self.0 - 1) % self.0 };
            self.encode(&t, out);
        }
    }

    #[test]
    fn cyclic_spheres() {
        let run = enumerate(&Cyclic(7), 5, Limits::default(), |_, _| {}).unwrap();
        assert_eq!(run.sizes, vec![1, 2, 2, 2, 0, 0]);
        let run = enumerate(&Cyclic(100_000), 3000, Limits::default(), |_, _| {}).unwrap();
        assert!(run.sizes[1..].iter().all(|&s| s == 2));
    }

    #[test]
    fn visit_order_is_thread_independent() {
        let collect = |threads| {
            let mut seen = Vec::new();
            enumerate(&Cyclic(5000), 2000, Limits { threads: Some(threads), ..Limits::default() }, |k, key| {
                seen.push((k, key.to_vec()))
            })
            .unwrap();
            seen
        };
        assert_eq!(collect(1), collect(3));
    }

    /// `Z²` with the four unit steps.
    struct Grid;

    impl BallSpace for Grid {
        type State = (i32, i32);
        fn identity(&self) -> (i32, i32) {
            (0, 0)
        }
        fn encode(&self, s: &(i32, i32), out: &mut Vec<u8>) {
            out.extend_from_slice(&s.0.to_le_bytes());
            out.extend_from_slice(&s.1.to_le_bytes());
        }
        fn decode(&self, key: &[u8]) -> (i32, i32) {
            (i32::from_le_bytes(key[..4].try_into().unwrap()), i32::from_le_bytes(key[4..].try_into().unwrap()))
        }
        fn generator_count(&self) -> usize {
            4
        }
        fn step(&self, s: &(i32, i32), g: usize, out: &mut Vec<u8>) {
            let (dx, dy) = [(1, 0), (-1, 0), (0, 1), (0, -1)][g];
            self.encode(&(s.0 + dx, s.1 + dy), out);
        }
    }

    #[test]
    fn grid_spheres_and_budget() {
        let run = enumerate(&Grid, 6, Limits::default(), |_, _| {}).unwrap();
        assert_eq!(run.sizes, vec![1, 4, 8, 12, 16, 20, 24]);
        let err = enumerate(&Grid, 10_000, Limits { budget_bytes: 1 << 16, threads: None }, |_, _| {}).unwrap_err();
        assert_eq!(err.partial.sizes.len(), err.completed_depth + 1);
        assert_eq!(err.partial.sizes[..7], run.sizes[..]);
    }

    #[test]
    fn key_set_basics() {
        let mut s = KeySet::default();
        assert!(s.insert(b"ab"));
        assert!(s.insert(b""));
        assert!(!s.insert(b"ab"));
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(1), b"");
        assert!(s.contains(b"ab"));
        assert!(!s.contains(b"a"));
    }
}
