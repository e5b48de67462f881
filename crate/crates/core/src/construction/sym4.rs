use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of the four sheets `{1, 2, 3, 4}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym4([u8; 4]);

impl Sym4 {
    pub const IDENTITY: Sym4 = Sym4([0, 1, 2, 3]);

    /// From the images of `1, 2, 3, 4`.
    pub fn from_images(images: [u8; 4]) -> Result<Sym4> {
        let mut seen = [false; 4];
        for &i in &images {
            if !(1..=4).contains(&i) || seen[i as usize - 1] {
                return Err(Error::Parse { line: 0, message: format!("{images:?} is not a permutation of 1..4") });
            }
            seen[i as usize - 1] = true;
        }
        Ok(Sym4(images.map(|i| i - 1)))
    }

    /// All 24 permutations, identity first, in lexicographic order of images.
    pub fn all() -> Vec<Sym4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    if a != b && a != c && b != c {
                        out.push(Sym4([a, b, c, 6 - a - b - c]));
                    }
                }
            }
        }
        out
    }

    /// Image of sheet `i ∈ {1, 2, 3, 4}`.
    pub fn apply(&self, i: u8) -> u8 {
        self.0[i as usize - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        *self == Sym4::IDENTITY
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Sym4) -> Sym4 {
        Sym4(self.0.map(|i| other.0[i as usize]))
    }

    pub fn inverse(&self) -> Sym4 {
        let mut inv = [0u8; 4];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Sym4(inv)
    }

    /// Rank in [`Sym4::all`].
    pub fn rank(&self) -> u8 {
        const FACT: [u8; 4] = [6, 2, 1, 1];
        (0..4).map(|i| FACT[i] * self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count() as u8).sum()
    }

    pub fn from_rank(r: u8) -> Sym4 {
        assert!(r < 24);
        let mut pool = vec![0u8, 1, 2, 3];
        let digits = [r / 6, (r % 6) / 2, r % 2, 0];
        Sym4(digits.map(|d| pool.remove(d as usize)))
    }

    fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = [false; 4];
        let mut out = Vec::new();
        for start in 0..4u8 {
            if seen[start as usize] || self.0[start as usize] == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start as usize] = true;
            let mut x = self.0[start as usize];
            while x != start {
                seen[x as usize] = true;
                cycle.push(x + 1);
                x = self.0[x as usize];
            }
            out.push(cycle);
        }
        out
    }
}

/// Cycle notation, e.g. `(1 2)(3 4)`; the identity prints as `()`.
impl fmt::Display for Sym4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(u8::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Sym4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym4{self}")
    }
}

impl Serialize for Sym4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses cycle notation; cycles compose left to right.
impl FromStr for Sym4 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sym4> {
        let bad = || Error::Parse { line: 0, message: format!("invalid permutation {s:?}") };
        let mut acc = Sym4::IDENTITY;
        let mut rest = s.trim();
        if rest.is_empty() || rest == "id" {
            return Ok(acc);
        }
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let points: Vec<u8> = body[..close]
                .split([' ', ','])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u8>().ok().filter(|p| (1..=4).contains(p)).ok_or_else(bad))
                .collect::<Result<_>>()?;
            let mut images = [0u8, 1, 2, 3];
            for (k, &p) in points.iter().enumerate() {
                if points[..k].contains(&p) {
                    return Err(bad());
                }
                images[p as usize - 1] = points[(k + 1) % points.len()] - 1;
            }
            acc = acc.then(&Sym4(images));
            rest = body[close + 1..].trim_start();
        }
        Ok(acc)
    }
}
