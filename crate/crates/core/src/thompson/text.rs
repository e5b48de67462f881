//! Line-oriented text format: one pair per line, `root:word -> root:word`.
//! Over a single root the `root:` prefix is omitted; `ε` (or nothing) is the
//! empty word. Blank lines and lines starting with `#` are ignored.

use std::fmt;
use std::sync::Arc;

use super::element::{display_address, Pair, RootSet, VElement};
use super::word::{Address, Word};
use crate::error::{Error, Result};

impl fmt::Display for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.pairs() {
            writeln!(f, "{} -> {}", display_address(self.roots(), &p.domain), display_address(self.roots(), &p.range))?;
        }
        Ok(())
    }
}

fn parse_address(roots: &RootSet, s: &str, line: usize) -> Result<Address> {
    let s = s.trim();
    let err = |message: String| Error::Parse { line, message };
    let (root, word) = match s.rsplit_once(':') {
        Some((label, word)) => {
            let root = roots.index_of(label.trim()).ok_or_else(|| err(format!("unknown root {label:?}")))?;
            (root, word.trim())
        }
        None if roots.is_single() => (0, s),
        None => return Err(err(format!("address {s:?} needs a root label"))),
    };
    let word = Word::parse(word).map_err(|e| err(e.to_string()))?;
    Ok(Address::new(root, word))
}

/// Parses and validates an element over `roots`.
pub fn parse_element(roots: Arc<RootSet>, text: &str) -> Result<VElement> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (d, r) = line
            .split_once("->")
            .ok_or_else(|| Error::Parse { line: i + 1, message: "expected `domain -> range`".into() })?;
        pairs.push(Pair::new(parse_address(&roots, d, i + 1)?, parse_address(&roots, r, i + 1)?));
    }
    VElement::new(roots, pairs)
}
