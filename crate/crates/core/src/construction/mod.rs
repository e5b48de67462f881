//! The generating family `T_n` of a Higman–Thompson group `V_{Y_n}` with
//! `Y_n = X_n × {1, 2, 3, 4}`, the commuting-conjugates check, and the
//! normal form of short words.

mod commuting;
mod normal_form;
mod sym4;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grig::{GrigWord, Letter, LevelPermutation, Vertex};
use crate::schreier::{eta_n, rho_n, theta_n};
use crate::thompson::{x0, Address, RootSet, VElement};

pub use commuting::{check_commuting, CommutingFailure, CommutingReport, TypePairReport};
pub use normal_form::{count_factors, normal_form, FactorCounts, FactorRow, NormalForm, TupleSpace};
pub use sym4::Sym4;

/// Largest `n` for which [`Construction`] builds `V_{Y_n}` (`2^{n+2}` roots).
pub const MAX_CONSTRUCTION_LEVEL: usize = 14;

/// A point `(x, i)` of `Y_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SheetIndex {
    pub x: Vertex,
    pub sheet: u8,
}

impl SheetIndex {
    /// Root index `4·index(x) + i - 1`.
    pub fn root(&self) -> u32 {
        (self.x.index() * 4 + self.sheet as usize - 1) as u32
    }

    pub fn from_root(root: u32, n: usize) -> SheetIndex {
        SheetIndex { x: Vertex::from_index(root as usize / 4, n), sheet: (root % 4) as u8 + 1 }
    }

    /// `pr_n`.
    pub fn project(&self) -> Vertex {
        self.x
    }
}

impl fmt::Display for SheetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.x, self.sheet)
    }
}

/// A letter of `T_n ∪ {X_0^{(n)-1}, X_1^{(n)-1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// Type 1: a truncated Grigorchuk generator acting diagonally.
    S(Letter),
    /// Type 2: a permutation of the sheets over `η_n`.
    Sym(Sym4),
    /// Type 3: the transposition of `(ρ_n, 1)` and `(θ_n, 1)`.
    Tau,
    /// Type 4: `X_0^{(n)}`.
    X0,
    X0Inv,
    /// Type 4: `X_1^{(n)}`.
    X1,
    X1Inv,
}

impl Gen {
    /// The type `1..=4`.
    pub fn kind(&self) -> u8 {
        match self {
            Gen::S(_) => 1,
            Gen::Sym(_) => 2,
            Gen::Tau => 3,
            _ => 4,
        }
    }

    pub fn inverse(&self) -> Gen {
        match *self {
            Gen::Sym(s) => Gen::Sym(s.inverse()),
            Gen::X0 => Gen::X0Inv,
            Gen::X0Inv => Gen::X0,
            Gen::X1 => Gen::X1Inv,
            Gen::X1Inv => Gen::X1,
            g => g,
        }
    }

    /// `T_n`: four type-1, 24 type-2, one type-3 and two type-4 letters.
    pub fn generating_set() -> Vec<Gen> {
        let mut out: Vec<Gen> = Letter::ALL.iter().map(|&s| Gen::S(s)).collect();
        out.extend(Sym4::all().into_iter().map(Gen::Sym));
        out.extend([Gen::Tau, Gen::X0, Gen::X1]);
        out
    }

    /// `T_n` together with the inverses of the type-4 letters.
    pub fn alphabet() -> Vec<Gen> {
        let mut out = Gen::generating_set();
        out.extend([Gen::X0Inv, Gen::X1Inv]);
        out
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::S(s) => write!(f, "s:{s}"),
            Gen::Sym(p) => write!(f, "sym:{p}"),
            Gen::Tau => f.write_str("tau"),
            Gen::X0 => f.write_str("x0"),
            Gen::X0Inv => f.write_str("x0inv"),
            Gen::X1 => f.write_str("x1"),
            Gen::X1Inv => f.write_str("x1inv"),
        }
    }
}

impl Serialize for Gen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Gen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Gen> {
        let s = s.trim();
        let bad = || Error::Parse { line: 0, message: format!("unknown letter {s:?}") };
        if let Some(l) = s.strip_prefix("s:") {
            let mut chars = l.trim().chars();
            return match (chars.next(), chars.next()) {
                (Some(c), None) => Letter::from_char(c).map(Gen::S),
                _ => Err(bad()),
            };
        }
        if let Some(p) = s.strip_prefix("sym:") {
            return p.parse().map(Gen::Sym);
        }
        match s {
            "tau" => Ok(Gen::Tau),
            "x0" => Ok(Gen::X0),
            "x0inv" => Ok(Gen::X0Inv),
            "x1" => Ok(Gen::X1),
            "x1inv" => Ok(Gen::X1Inv),
            _ => Err(bad()),
        }
    }
}

/// Parses a comma-separated list of letter tokens.
pub fn parse_word(s: &str) -> Result<Vec<Gen>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    // Commas also appear inside `sym:(1,2)`, so split outside parentheses only.
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].parse()?);
    Ok(out)
}

pub fn format_word(w: &[Gen]) -> String {
    w.iter().map(Gen::to_string).collect::<Vec<_>>().join(",")
}

/// The generator of the letter together with its element.
#[derive(Debug, Clone)]
pub struct GeneratorTagged {
    pub gen: Gen,
    pub element: VElement,
}

/// `V_{Y_n}` with its designated vertices and the elements of all letters.
#[derive(Debug, Clone)]
pub struct Construction {
    n: usize,
    roots: Arc<RootSet>,
    rho: Vertex,
    eta: Vertex,
    theta: Vertex,
    letters: Vec<(Gen, VElement)>,
}

impl Construction {
    pub fn new(n: usize) -> Result<Construction> {
        if n == 0 || n > MAX_CONSTRUCTION_LEVEL {
            return Err(Error::LevelTooLarge { level: n, max: MAX_CONSTRUCTION_LEVEL });
        }
        let labels = (0..4u32 << n).map(|r| SheetIndex::from_root(r, n).to_string()).collect();
        let roots = RootSet::new(labels)?;
        let mut c = Construction { n, roots, rho: rho_n(n), eta: eta_n(n), theta: theta_n(n), letters: Vec::new() };
        c.letters = Gen::alphabet().into_iter().map(|g| (g, c.build(g))).collect();
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn roots(&self) -> &Arc<RootSet> {
        &self.roots
    }

    /// `(ρ_n, η_n, θ_n)`.
    pub fn special_vertices(&self) -> (Vertex, Vertex, Vertex) {
        (self.rho, self.eta, self.theta)
    }

    pub fn root(&self, x: Vertex, sheet: u8) -> u32 {
        SheetIndex { x, sheet }.root()
    }

    /// The element moving `(x, i)` onto `(x·p, i)`.
    pub fn diagonal(&self, p: &LevelPermutation) -> VElement {
        let images: Vec<u32> = (0..4u32 << self.n).map(|r| (p.image(r as usize / 4) * 4) as u32 + r % 4).collect();
        VElement::root_permutation(self.roots.clone(), &images).expect("a permutation")
    }

    /// `σ` acting on the sheets over the site `x`.
    pub fn sheet_permutation(&self, x: Vertex, sigma: Sym4) -> VElement {
        let mut images: Vec<u32> = (0..4u32 << self.n).collect();
        for i in 1..=4u8 {
            images[self.root(x, i) as usize] = self.root(x, sigma.apply(i));
        }
        VElement::root_permutation(self.roots.clone(), &images).expect("a permutation")
    }

    /// The permutation of sheet 1 given by `perm` on the sites.
    pub fn sheet_one_permutation(&self, perm: impl IntoIterator<Item = (Vertex, Vertex)>) -> VElement {
        let mut images: Vec<u32> = (0..4u32 << self.n).collect();
        for (x, y) in perm {
            images[self.root(x, 1) as usize] = self.root(y, 1);
        }
        VElement::root_permutation(self.roots.clone(), &images).expect("a permutation")
    }

    /// `X_0` acting on `C_{(x,2)} ⊔ C_{(x,3)}` through `(ξ, (x, i)) ↦ (i-2)ξ`.
    pub fn x0_at(&self, x: Vertex) -> VElement {
        let c2 = Address::root_cylinder(self.root(x, 2));
        let c3 = Address::root_cylinder(self.root(x, 3));
        VElement::transport(&x0(), self.roots.clone(), c2, c3).expect("disjoint roots")
    }

    /// `X_0` acting on `C_{(x,4)}`.
    pub fn x1_at(&self, x: Vertex) -> VElement {
        VElement::embed_cylinder(&x0(), self.roots.clone(), Address::root_cylinder(self.root(x, 4)))
            .expect("valid root")
    }

    fn build(&self, g: Gen) -> VElement {
        match g {
            Gen::S(s) => self.diagonal(&LevelPermutation::generator(s, self.n)),
            Gen::Sym(p) => self.sheet_permutation(self.eta, p),
            Gen::Tau => self.sheet_one_permutation([(self.rho, self.theta), (self.theta, self.rho)]),
            Gen::X0 => self.x0_at(self.rho),
            Gen::X0Inv => self.x0_at(self.rho).invert(),
            Gen::X1 => self.x1_at(self.rho),
            Gen::X1Inv => self.x1_at(self.rho).invert(),
        }
    }

    pub fn element(&self, g: Gen) -> &VElement {
        &self.letters.iter().find(|(h, _)| *h == g).expect("every letter is built").1
    }

    /// The product of the letters of `w`, first letter first.
    pub fn word_element(&self, w: &[Gen]) -> VElement {
        w.iter()
            .fold(VElement::identity(self.roots.clone()), |acc, &g| acc.compose(self.element(g)).expect("same roots"))
    }

    /// The type-1 element of a Grigorchuk word.
    pub fn grig_element(&self, g: &GrigWord) -> VElement {
        self.diagonal(&crate::grig::level_permutation(g, self.n))
    }

    /// Elements of the 33-letter enumeration alphabet.
    pub fn alphabet_elements(&self) -> Vec<VElement> {
        self.letters.iter().map(|(_, e)| e.clone()).collect()
    }
}

/// The 31 generators of `T_n`.
pub fn build_generators(n: usize) -> Result<Vec<GeneratorTagged>> {
    let c = Construction::new(n)?;
    Ok(Gen::generating_set().into_iter().map(|gen| GeneratorTagged { gen, element: c.element(gen).clone() }).collect())
}

/// `(ρ_n, η_n, θ_n)`.
pub fn special_vertices(n: usize) -> (Vertex, Vertex, Vertex) {
    (rho_n(n), eta_n(n), theta_n(n))
}

/// `pr_n(supp(σ^g))` for a generator of type 2, 3 or 4, sorted.
pub fn conjugate_support_projection(kind: u8, g: &GrigWord, n: usize) -> Result<Vec<Vertex>> {
    let (rho, eta, theta) = special_vertices(n);
    let mut out = match kind {
        2 => vec![eta.act(g)],
        3 => vec![theta.act(g), rho.act(g)],
        4 => vec![rho.act(g)],
        _ => return Err(Error::HypothesisViolated(format!("type {kind} has no support formula"))),
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// `pr_n` of the roots met by a list of support cylinders, sorted.
pub fn project_support(support: &[Address], n: usize) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = support.iter().map(|a| SheetIndex::from_root(a.root, n).project()).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_vertices_small() {
        let (r, e, t) = special_vertices(3);
        assert_eq!((r.to_string(), e.to_string(), t.to_string()), ("111".into(), "110".into(), "011".into()));
        let (r, e, t) = special_vertices(1);
        assert_eq!((r.to_string(), e.to_string(), t.to_string()), ("1".into(), "0".into(), "0".into()));
        for n in 1..=10 {
            assert_eq!(rho_n(n).act_letter(Letter::A), theta_n(n));
        }
    }

    #[test]
    fn sheet_index_roots() {
        let s = SheetIndex { x: Vertex::parse("110").unwrap(), sheet: 2 };
        assert_eq!(s.root(), 6 * 4 + 1);
        assert_eq!(SheetIndex::from_root(s.root(), 3), s);
        assert_eq!(s.to_string(), "110.2");
    }

    #[test]
    fn tokens() {
        let w = parse_word("s:a, sym:(1 2),tau,x0,x0inv,x1,x1inv,sym:(1,2,3)").unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(w[1], Gen::Sym("(1 2)".parse().unwrap()));
        assert_eq!(format_word(&w), "s:a,sym:(1 2),tau,x0,x0inv,x1,x1inv,sym:(1 2 3)");
        assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
        assert!(parse_word("s:e").is_err());
        assert!(parse_word("x2").is_err());
        assert!(parse_word("").unwrap().is_empty());
    }

    #[test]
    fn generators() {
        let gens = build_generators(3).unwrap();
        assert_eq!(gens.len(), 31);
        let c = Construction::new(3).unwrap();
        let tau = c.element(Gen::Tau);
        assert!(tau.compose(tau).unwrap().is_identity());
        assert!(c.element(Gen::X0).commutes_with(c.element(Gen::X1)).unwrap());
        for g in &gens {
            if g.gen.kind() < 4 {
                assert!(g.element.as_root_permutation().is_some(), "{}", g.gen);
            } else {
                let (rho, _, _) = c.special_vertices();
                for p in g.element.pairs() {
                    if !p.domain.word.is_empty() || !p.range.word.is_empty() {
                        let y = SheetIndex::from_root(p.domain.root, 3);
                        assert_eq!(y.x, rho);
                        assert!(y.sheet >= 2);
                    }
                }
            }
        }
        assert_eq!(
            c.element(Gen::X0).to_string().lines().filter(|l| l.starts_with("111.")).collect::<Vec<_>>(),
            [
                "111.1:ε -> 111.1:ε",
                "111.2:0 -> 111.2:ε",
                "111.2:1 -> 111.3:0",
                "111.3:ε -> 111.3:1",
                "111.4:ε -> 111.4:ε"
            ]
        );
        assert!(matches!(Construction::new(0), Err(Error::LevelTooLarge { .. })));
    }

    #[test]
    fn sym4_copy_is_closed() {
        let c = Construction::new(2).unwrap();
        let all = Sym4::all();
        for a in &all {
            for b in &all {
                let prod = c.element(Gen::Sym(*a)).compose(c.element(Gen::Sym(*b))).unwrap();
                assert_eq!(&prod, c.element(Gen::Sym(a.then(b))));
            }
        }
    }

    #[test]
    fn support_projections() {
        let n = 5;
        let c = Construction::new(n).unwrap();
        assert_eq!(conjugate_support_projection(2, &GrigWord::identity(), n).unwrap(), vec![eta_n(n)]);
        let a: GrigWord = "a".parse().unwrap();
        let mut both = vec![rho_n(n), theta_n(n)];
        both.sort();
        assert_eq!(conjugate_support_projection(3, &a, n).unwrap(), both);
        let g: GrigWord = "abacad".parse().unwrap();
        for (kind, gen) in [(2, Gen::Sym("(1 2)".parse().unwrap())), (3, Gen::Tau), (4, Gen::X0), (4, Gen::X1)] {
            let conj = c.element(gen).conjugate_by(&c.grig_element(&g)).unwrap();
            assert_eq!(project_support(&conj.support(), n), conjugate_support_projection(kind, &g, n).unwrap());
        }
    }
}
