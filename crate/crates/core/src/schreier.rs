//! Schreier graphs of the Grigorchuk group: the level graphs `Γ_n`, balls in
//! the orbital graph `Γ_∞` of `ρ = 1^∞`, labeled-ball comparison and inverted
//! orbits.

use std::collections::VecDeque;
use std::fmt::{self, Display, Write as _};
use std::hash::Hash;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{BudgetExceeded, Error, Result};
use crate::grig::{BoundaryPoint, Letter, Vertex};

/// Largest level accepted by [`build_level_graph`] (`2^20` vertices).
pub const MAX_GRAPH_LEVEL: usize = 20;

/// `ρ_n = 1^n`.
pub fn rho_n(n: usize) -> Vertex {
    Vertex::ones(n)
}

/// `η_n = 1^{n-1}0`.
pub fn eta_n(n: usize) -> Vertex {
    assert!(n >= 1);
    Vertex::new(Vertex::ones(n).bits() & !1, n)
}

/// `θ_n = ρ_n·a = 01^{n-1}`.
pub fn theta_n(n: usize) -> Vertex {
    rho_n(n).act_letter(Letter::A)
}

/// `r_n = 2^{⌊n/2⌋}`.
pub fn r_n(n: usize) -> usize {
    1usize << (n / 2)
}

/// A right action of `G` on some set of points.
pub trait RightAction: Sync {
    type Point: Clone + Eq + Hash + Ord + Send + Sync + Display;
    fn act(&self, p: &Self::Point, s: Letter) -> Self::Point;
}

/// The action on the vertices of one level (the level is carried by the vertex).
#[derive(Debug, Clone, Copy, Default)]
pub struct LevelAction;

impl RightAction for LevelAction {
    type Point = Vertex;
    fn act(&self, p: &Vertex, s: Letter) -> Vertex {
        p.act_letter(s)
    }
}

/// The action on the boundary, restricted to points `u·1^∞`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryAction;

impl RightAction for BoundaryAction {
    type Point = BoundaryPoint;
    fn act(&self, p: &BoundaryPoint, s: Letter) -> BoundaryPoint {
        p.act_letter(s)
    }
}

/// Labeled Schreier graph with a total edge function.
#[derive(Debug, Clone)]
pub struct SchreierGraph<P> {
    points: Vec<P>,
    index: FxHashMap<P, u32>,
    edges: Vec<[u32; 4]>,
}

impl<P: Clone + Eq + Hash + Display> SchreierGraph<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn index_of(&self, p: &P) -> Result<usize> {
        self.index.get(p).map(|&i| i as usize).ok_or_else(|| Error::VertexNotInGraph(p.to_string()))
    }

    /// Target of the `s`-edge at the vertex with index `i`.
    pub fn neighbor(&self, i: usize, s: Letter) -> usize {
        self.edges[i][s.index()] as usize
    }

    /// BFS distances from `from`; `u32::MAX` marks unreachable vertices.
    pub fn distances_from(&self, from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::from([from]);
        dist[from] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.edges[u] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        dist
    }

    /// Unweighted shortest-path length; `None` if `v` is unreachable.
    pub fn distance(&self, u: &P, v: &P) -> Result<Option<usize>> {
        let (iu, iv) = (self.index_of(u)?, self.index_of(v)?);
        let d = self.distances_from(iu)[iv];
        Ok((d != u32::MAX).then_some(d as usize))
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.distances_from(0).iter().all(|&d| d != u32::MAX)
    }

    /// Every generator induces an involution on the vertices.
    pub fn edges_are_involutions(&self) -> bool {
        (0..self.len()).all(|u| Letter::ALL.iter().all(|&s| self.neighbor(self.neighbor(u, s), s) == u))
    }

    /// Induced labeled subgraph on the vertices within distance `r` of `p`.
    pub fn labeled_ball(&self, p: &P, r: usize) -> Result<LabeledBall<P>> {
        self.index_of(p)?;
        Ok(bfs_ball(p.clone(), r, |q: &P| {
            let i = self.index[q] as usize;
            Letter::ALL.map(|s| self.points[self.neighbor(i, s)].clone())
        }))
    }

    /// Graphviz rendering; each involutive edge pair is printed once.
    pub fn to_dot(&self, name: &str) -> String {
        let edges = (0..self.len()).map(|u| self.edges[u].map(Some));
        render_dot(name, &self.points, edges)
    }
}

/// `Γ_n`: vertex set `X_n` in index order, edges `v ↦ v·s`.
pub fn build_level_graph(n: usize) -> Result<SchreierGraph<Vertex>> {
    if n > MAX_GRAPH_LEVEL {
        return Err(Error::LevelTooLarge { level: n, max: MAX_GRAPH_LEVEL });
    }
    let size = 1usize << n;
    let points: Vec<Vertex> = (0..size).map(|i| Vertex::from_index(i, n)).collect();
    let index = points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let edges = points.iter().map(|v| Letter::ALL.map(|s| v.act_letter(s).index() as u32)).collect();
    Ok(SchreierGraph { points, index, edges })
}

/// An induced labeled ball. Vertex 0 is the basepoint; vertices are in BFS
/// order with generators tried in the order `a, b, c, d`.
#[derive(Debug, Clone)]
pub struct LabeledBall<P> {
    radius: usize,
    points: Vec<P>,
    dist: Vec<u32>,
    // `None` when the neighbor lies outside the ball
    edges: Vec<[Option<u32>; 4]>,
}

impl<P: Clone + Eq + Hash + Display> LabeledBall<P> {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn basepoint(&self) -> &P {
        &self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn distance_of(&self, i: usize) -> usize {
        self.dist[i] as usize
    }

    pub fn edge(&self, i: usize, s: Letter) -> Option<usize> {
        self.edges[i][s.index()].map(|v| v as usize)
    }

    pub fn contains(&self, p: &P) -> bool {
        self.points.contains(p)
    }

    pub fn to_dot(&self, name: &str) -> String {
        render_dot(name, &self.points, self.edges.iter().copied())
    }
}

/// Builds the induced ball of radius `r` around `base` by BFS; `neighbors`
/// returns `[p·a, p·b, p·c, p·d]`.
fn bfs_ball<P, F>(base: P, r: usize, mut neighbors: F) -> LabeledBall<P>
where
    P: Clone + Eq + Hash,
    F: FnMut(&P) -> [P; 4],
{
    let mut points = vec![base.clone()];
    let mut dist = vec![0u32];
    let mut index: FxHashMap<P, u32> = FxHashMap::default();
    index.insert(base, 0);
    let mut adjacent: Vec<[P; 4]> = Vec::new();
    let mut head = 0;
    while head < points.len() {
        let nb = neighbors(&points[head]);
        if (dist[head] as usize) < r {
            for q in &nb {
                if !index.contains_key(q) {
                    index.insert(q.clone(), points.len() as u32);
                    points.push(q.clone());
                    dist.push(dist[head] + 1);
                }
            }
        }
        adjacent.push(nb);
        head += 1;
    }
    let edges = adjacent.iter().map(|nb| nb.clone().map(|q| index.get(&q).copied())).collect();
    LabeledBall { radius: r, points, dist, edges }
}

/// `Γ_∞(ρ, r)`, generated lazily from canonical boundary points.
pub fn orbit_ball_infinite(r: usize) -> LabeledBall<BoundaryPoint> {
    action_ball(&BoundaryAction, BoundaryPoint::rho(), r)
}

/// The ball of radius `r` around `base` in the Schreier graph of `action`.
pub fn action_ball<A: RightAction>(action: &A, base: A::Point, r: usize) -> LabeledBall<A::Point> {
    bfs_ball(base, r, |p| Letter::ALL.map(|s| action.act(p, s)))
}

/// Decides whether `base1·h ↦ base2·h` is a well-defined label-preserving
/// isomorphism between the two balls, by a simultaneous label-directed BFS.
pub fn balls_equal<P, Q>(b1: &LabeledBall<P>, b2: &LabeledBall<Q>) -> Result<bool>
where
    P: Clone + Eq + Hash + Display,
    Q: Clone + Eq + Hash + Display,
{
    if b1.radius != b2.radius {
        return Err(Error::RadiusMismatch(b1.radius, b2.radius));
    }
    if b1.len() != b2.len() {
        return Ok(false);
    }
    let mut forward = vec![u32::MAX; b1.len()];
    let mut backward = vec![u32::MAX; b2.len()];
    forward[0] = 0;
    backward[0] = 0;
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((u, v)) = queue.pop_front() {
        if b1.dist[u] != b2.dist[v] {
            return Ok(false);
        }
        for s in Letter::ALL {
            match (b1.edge(u, s), b2.edge(v, s)) {
                (None, None) => {}
                (Some(u2), Some(v2)) => {
                    let (fu, bv) = (forward[u2], backward[v2]);
                    if fu == u32::MAX && bv == u32::MAX {
                        forward[u2] = v2 as u32;
                        backward[v2] = u2 as u32;
                        queue.push_back((u2, v2));
                    } else if fu != v2 as u32 || bv != u2 as u32 {
                        return Ok(false);
                    }
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(forward.iter().all(|&x| x != u32::MAX))
}

fn render_dot<P, I>(name: &str, points: &[P], edges: I) -> String
where
    P: Display,
    I: Iterator<Item = [Option<u32>; 4]>,
{
    let mut out = String::new();
    let _ = writeln!(out, "graph {name} {{");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{p}\"];");
    }
    for (u, row) in edges.enumerate() {
        for (si, v) in row.iter().enumerate() {
            if let Some(v) = *v {
                if u <= v as usize {
                    let _ = writeln!(out, "  n{u} -- n{v} [label=\"{}\"];", Letter::from_index(si));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// One row of the separation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparationRow {
    pub n: usize,
    pub distance: usize,
    pub bound: usize,
}

impl SeparationRow {
    pub fn holds(&self) -> bool {
        self.distance >= self.bound
    }
}

/// Exact `d_{Γ_n}(ρ_n, η_n)` against `⌈2^{n-3}⌉` for `n ≥ 1` in the range.
pub fn separation_table(n_min: usize, n_max: usize) -> Result<Vec<SeparationRow>> {
    (n_min.max(1)..=n_max)
        .map(|n| {
            let g = build_level_graph(n)?;
            let d = g.distance(&rho_n(n), &eta_n(n))?.expect("Γ_n is connected");
            Ok(SeparationRow { n, distance: d, bound: 1 << n.saturating_sub(3) })
        })
        .collect()
}

pub fn separation_csv(rows: &[SeparationRow]) -> String {
    let mut out = String::from("n,distance,bound\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.n, r.distance, r.bound);
    }
    out
}

/// Outcome of comparing `Γ_n(ρ_n, r)` and `Γ_n(η_n, r)` with `Γ_∞(ρ, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub radius: usize,
    pub rho_ball_equal: bool,
    pub eta_ball_equal: bool,
    /// Both equalities also hold at every radius below `radius`.
    pub smaller_radii_equal: bool,
}

/// Compares balls of radius `r_n` (and every smaller radius) at level `n`.
pub fn local_convergence(n: usize) -> Result<ConvergenceRow> {
    let g = build_level_graph(n)?;
    let radius = r_n(n);
    let same_at = |r: usize| -> Result<(bool, bool)> {
        let inf = orbit_ball_infinite(r);
        let rho = balls_equal(&g.labeled_ball(&rho_n(n), r)?, &inf)?;
        let eta = balls_equal(&g.labeled_ball(&eta_n(n), r)?, &inf)?;
        Ok((rho, eta))
    };
    let (rho_ball_equal, eta_ball_equal) = same_at(radius)?;
    let mut smaller_radii_equal = true;
    for r in 0..radius {
        let (a, b) = same_at(r)?;
        smaller_radii_equal &= a && b;
    }
    Ok(ConvergenceRow { n, radius, rho_ball_equal, eta_ball_equal, smaller_radii_equal })
}

/// An inverted orbit `O_ω(w)` as a sorted point list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertedOrbitState<P> {
    pub points: Vec<P>,
    pub depth: usize,
}

impl<P> InvertedOrbitState<P> {
    /// `δ_ω(w)`.
    pub fn delta(&self) -> usize {
        self.points.len()
    }
}

/// `O_ω(w) = {ω, ω s_ℓ, ω s_{ℓ-1} s_ℓ, …, ω s_1 ⋯ s_ℓ}`, computed suffix by suffix.
pub fn inverted_orbit<A: RightAction>(word: &[Letter], omega: &A::Point, action: &A) -> InvertedOrbitState<A::Point> {
    let mut points: Vec<A::Point> =
        (0..=word.len()).map(|i| word[i..].iter().fold(omega.clone(), |p, &s| action.act(&p, s))).collect();
    points.sort();
    points.dedup();
    InvertedOrbitState { points, depth: word.len() }
}

/// `Δ(k)` and `N(k)` for one depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    pub k: usize,
    pub delta: usize,
    pub count: usize,
}

/// Exact `Δ_ω(k)` and `N_ω(k)` for `k = 0..=depth` by BFS over orbit states
/// with transitions `O ↦ O·s ∪ {ω}`.
pub fn inverted_orbit_bfs<A: RightAction>(
    omega: &A::Point,
    action: &A,
    depth: usize,
    budget_bytes: usize,
) -> std::result::Result<Vec<OrbitRow>, BudgetExceeded<Vec<OrbitRow>>> {
    // Points are interned in discovery order; `moves[i][s]` caches `point_i·s`.
    let mut points: Vec<A::Point> = vec![omega.clone()];
    let mut ids: FxHashMap<A::Point, u32> = FxHashMap::default();
    ids.insert(omega.clone(), 0);
    let mut moves: Vec<[u32; 4]> = vec![[u32::MAX; 4]];

    let start: Box<[u32]> = vec![0u32].into_boxed_slice();
    let mut seen: FxHashSet<Box<[u32]>> = FxHashSet::default();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    let mut rows = vec![OrbitRow { k: 0, delta: 1, count: 1 }];
    let mut delta = 1;
    let mut bytes = 64usize;

    for k in 1..=depth {
        let mut next = Vec::new();
        for state in &frontier {
            for s in Letter::ALL {
                let mut image: Vec<u32> = Vec::with_capacity(state.len() + 1);
                for &p in state.iter() {
                    let mut t = moves[p as usize][s.index()];
                    if t == u32::MAX {
                        let q = action.act(&points[p as usize], s);
                        t = match ids.get(&q) {
                            Some(&id) => id,
                            None => {
                                let id = points.len() as u32;
                                ids.insert(q.clone(), id);
                                points.push(q);
                                moves.push([u32::MAX; 4]);
                                id
                            }
                        };
                        moves[p as usize][s.index()] = t;
                    }
                    image.push(t);
                }
                image.push(0);
                image.sort_unstable();
                image.dedup();
                let image = image.into_boxed_slice();
                if !seen.contains(&image) {
                    bytes += image.len() * 8 + 48;
                    delta = delta.max(image.len());
                    seen.insert(image.clone());
                    next.push(image);
                }
            }
        }
        if bytes > budget_bytes {
            return Err(BudgetExceeded { budget: budget_bytes, completed_depth: k - 1, partial: rows });
        }
        rows.push(OrbitRow { k, delta, count: seen.len() });
        frontier = next;
    }
    Ok(rows)
}

pub fn orbit_csv(rows: &[OrbitRow]) -> String {
    let mut out = String::from("k,delta,count\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.k, r.delta, r.count);
    }
    out
}

impl fmt::Display for OrbitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} Δ={} N={}", self.k, self.delta, self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grig::GrigWord;

    #[test]
    fn special_vertices() {
        assert_eq!(rho_n(3).to_string(), "111");
        assert_eq!(eta_n(3).to_string(), "110");
        assert_eq!(theta_n(3).to_string(), "011");
        assert_eq!(eta_n(1), theta_n(1));
        assert_eq!(r_n(6), 8);
        assert_eq!(r_n(7), 8);
    }

    #[test]
    fn level_one_graph() {
        let g = build_level_graph(1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.neighbor(0, Letter::A), 1);
        for s in [Letter::B, Letter::C, Letter::D] {
            assert_eq!(g.neighbor(0, s), 0);
            assert_eq!(g.neighbor(1, s), 1);
        }
        assert_eq!(g.distance(&rho_n(1), &eta_n(1)).unwrap(), Some(1));
    }

    #[test]
    fn level_graphs_connected_and_involutive() {
        for n in 1..=10 {
            let g = build_level_graph(n).unwrap();
            assert_eq!(g.len(), 1 << n);
            assert!(g.is_connected(), "n={n}");
            assert!(g.edges_are_involutions(), "n={n}");
        }
        assert!(matches!(build_level_graph(MAX_GRAPH_LEVEL + 1), Err(Error::LevelTooLarge { .. })));
    }

    #[test]
    fn distance_errors_and_zero() {
        let g = build_level_graph(4).unwrap();
        assert_eq!(g.distance(&rho_n(4), &rho_n(4)).unwrap(), Some(0));
        assert!(matches!(g.distance(&rho_n(5), &rho_n(4)), Err(Error::VertexNotInGraph(_))));
    }

    #[test]
    fn small_balls() {
        let b0 = orbit_ball_infinite(0);
        assert_eq!(b0.len(), 1);
        // ρ is fixed by b, c, d: loops at the basepoint survive the induced rule.
        assert_eq!(b0.edge(0, Letter::B), Some(0));
        assert_eq!(b0.edge(0, Letter::A), None);
        let b1 = orbit_ball_infinite(1);
        assert_eq!(b1.len(), 2);
        assert!(b1.contains(&BoundaryPoint::parse("0").unwrap()));
        assert_eq!(b1.edge(0, Letter::A), Some(1));
        // Regression value: Γ_∞ is a one-ended line at ρ.
        assert_eq!(orbit_ball_infinite(5).len(), 6);
    }

    #[test]
    fn balls_are_monotone() {
        let g = build_level_graph(7).unwrap();
        for r in 0..20 {
            let small = g.labeled_ball(&rho_n(7), r).unwrap();
            let big = g.labeled_ball(&rho_n(7), r + 1).unwrap();
            assert!(small.points().iter().all(|p| big.contains(p)));
        }
    }

    #[test]
    fn ball_equality() {
        let inf = orbit_ball_infinite(6);
        assert!(balls_equal(&inf, &inf).unwrap());
        assert!(matches!(balls_equal(&inf, &orbit_ball_infinite(5)), Err(Error::RadiusMismatch(6, 5))));
        // Γ_3 is a path of 8 vertices and the radius-7 ball reaches its far end.
        let g = build_level_graph(3).unwrap();
        assert!(balls_equal(&g.labeled_ball(&rho_n(3), 6).unwrap(), &inf).unwrap());
        let inf7 = orbit_ball_infinite(7);
        assert!(!balls_equal(&g.labeled_ball(&rho_n(3), 7).unwrap(), &inf7).unwrap());
        let g = build_level_graph(8).unwrap();
        assert!(balls_equal(&g.labeled_ball(&rho_n(8), 6).unwrap(), &inf).unwrap());
        assert!(balls_equal(&g.labeled_ball(&eta_n(8), 6).unwrap(), &inf).unwrap());
    }

    #[test]
    fn ball_equality_detects_label_swap() {
        // Around θ_n the a-edge leads back to ρ_n, whereas around ρ the
        // a-edge leads to 0·1^∞ whose b-edge is not a loop; balls of radius 2
        // around a generic vertex differ from the one-ended ball at ρ.
        let g = build_level_graph(8).unwrap();
        let mid = Vertex::parse("01010101").unwrap();
        let inf = orbit_ball_infinite(2);
        assert!(!balls_equal(&g.labeled_ball(&mid, 2).unwrap(), &inf).unwrap());
    }

    #[test]
    fn inverted_orbit_examples() {
        let rho = rho_n(5);
        let o = inverted_orbit(&[], &rho, &LevelAction);
        assert_eq!(o.points, vec![rho]);
        let o = inverted_orbit(&[Letter::A], &rho, &LevelAction);
        assert_eq!(o.delta(), 2);
        assert!(o.points.contains(&theta_n(5)));
    }

    #[test]
    fn inverted_orbit_bfs_small() {
        let rows = inverted_orbit_bfs(&BoundaryPoint::rho(), &BoundaryAction, 3, usize::MAX).unwrap();
        assert_eq!(rows[0], OrbitRow { k: 0, delta: 1, count: 1 });
        assert_eq!(rows[1].delta, 2);
        let err = inverted_orbit_bfs(&BoundaryPoint::rho(), &BoundaryAction, 8, 200).unwrap_err();
        assert!(err.completed_depth < 8);
        assert_eq!(err.partial.len(), err.completed_depth + 1);
        let g = GrigWord::identity();
        assert!(g.is_empty());
    }

    #[test]
    fn dot_output() {
        let g = build_level_graph(1).unwrap();
        let dot = g.to_dot("G1");
        assert!(dot.starts_with("graph G1 {"));
        assert!(dot.contains("n0 -- n1 [label=\"a\"]"));
        assert!(dot.contains("n0 -- n0 [label=\"b\"]"));
    }

    #[test]
    fn csv_output() {
        let rows = separation_table(4, 5).unwrap();
        let csv = separation_csv(&rows);
        assert!(csv.starts_with("n,distance,bound\n4,"));
        assert!(rows.iter().all(SeparationRow::holds));
    }
}
