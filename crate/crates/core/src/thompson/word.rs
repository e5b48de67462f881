use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest binary word representable by [`Word`].
pub const MAX_WORD_LEN: usize = 128;

/// A finite binary word of length at most [`MAX_WORD_LEN`].
///
/// Bits are stored left-aligned and zero-padded, so the derived ordering is
/// lexicographic with every word preceding its proper extensions.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: u128,
    len: u8,
}

impl Word {
    pub const EMPTY: Word = Word { bits: 0, len: 0 };

    /// Builds a word from its left-aligned bit pattern; bits past `len` must be zero.
    pub fn from_raw(bits: u128, len: usize) -> Word {
        assert!(len <= MAX_WORD_LEN, "binary word longer than {MAX_WORD_LEN}");
        debug_assert!(len == MAX_WORD_LEN || bits & (u128::MAX >> len) == 0);
        Word { bits, len: len as u8 }
    }

    pub fn parse(s: &str) -> Result<Word> {
        if s == "ε" {
            return Ok(Word::EMPTY);
        }
        if s.len() > MAX_WORD_LEN {
            return Err(Error::InvalidBits(s.to_string()));
        }
        s.chars().try_fold(Word::EMPTY, |w, c| match c {
            '0' => Ok(w.push(false)),
            '1' => Ok(w.push(true)),
            _ => Err(Error::InvalidBits(s.to_string())),
        })
    }

    pub fn raw_bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> (127 - i)) & 1 == 1
    }

    pub fn push(self, b: bool) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "binary word longer than {MAX_WORD_LEN}");
        Word { bits: self.bits | ((b as u128) << (127 - self.len())), len: self.len + 1 }
    }

    pub fn concat(self, other: Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= MAX_WORD_LEN, "binary word longer than {MAX_WORD_LEN}");
        let tail = if self.len == 0 { other.bits } else { other.bits.checked_shr(self.len as u32).unwrap_or(0) };
        Word { bits: self.bits | tail, len: len as u8 }
    }

    /// The first `k` letters.
    pub fn prefix(self, k: usize) -> Word {
        debug_assert!(k <= self.len());
        Word { bits: self.bits & top_mask(k), len: k as u8 }
    }

    /// The word with its first `k` letters removed.
    pub fn suffix_after(self, k: usize) -> Word {
        debug_assert!(k <= self.len());
        Word { bits: self.bits.checked_shl(k as u32).unwrap_or(0), len: self.len - k as u8 }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len <= other.len && other.bits & top_mask(self.len()) == self.bits
    }

    /// `self` and `other` are `p0` and `p1` for some `p`; returns `p`.
    pub fn sibling_parent(&self, other: &Word) -> Option<Word> {
        if self.len == 0 || self.len != other.len {
            return None;
        }
        let k = self.len() - 1;
        let last = 1u128 << (127 - k);
        (self.bits & last == 0 && other.bits == self.bits | last).then(|| self.prefix(k))
    }

    pub(crate) fn byte_len(&self) -> usize {
        self.len().div_ceil(8)
    }

    /// Appends `len` followed by the leading bytes of the bit pattern.
    pub(crate) fn write_packed(&self, out: &mut Vec<u8>) {
        out.push(self.len);
        out.extend_from_slice(&self.bits.to_be_bytes()[..self.byte_len()]);
    }

    pub(crate) fn read_packed(bytes: &[u8], pos: &mut usize) -> Word {
        let len = bytes[*pos] as usize;
        let nb = len.div_ceil(8);
        let mut buf = [0u8; 16];
        buf[..nb].copy_from_slice(&bytes[*pos + 1..*pos + 1 + nb]);
        *pos += 1 + nb;
        Word { bits: u128::from_be_bytes(buf), len: len as u8 }
    }
}

fn top_mask(k: usize) -> u128 {
    if k == 0 {
        0
    } else {
        u128::MAX << (128 - k)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

/// The cylinder `root·word·C` inside `C_Z`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    pub root: u32,
    pub word: Word,
}

impl Address {
    pub fn new(root: u32, word: Word) -> Address {
        Address { root, word }
    }

    pub fn root_cylinder(root: u32) -> Address {
        Address { root, word: Word::EMPTY }
    }

    pub fn child(self, b: bool) -> Address {
        Address { root: self.root, word: self.word.push(b) }
    }

    pub fn extend(self, w: Word) -> Address {
        Address { root: self.root, word: self.word.concat(w) }
    }

    /// `self` contains `other`.
    pub fn is_prefix_of(&self, other: &Address) -> bool {
        self.root == other.root && self.word.is_prefix_of(&other.word)
    }

    pub fn comparable(&self, other: &Address) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn sibling_parent(&self, other: &Address) -> Option<Address> {
        if self.root != other.root {
            return None;
        }
        self.word.sibling_parent(&other.word).map(|word| Address { root: self.root, word })
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.root, self.word)
    }
}
