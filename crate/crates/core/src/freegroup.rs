//! Reduced words in a free group `F_n` and their abelian invariants.
//!
//! Generators are numbered from 0. In text, generator `i` is the `i`-th
//! lowercase letter and its inverse the matching uppercase letter; the empty
//! word is written `1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum rank that has a letter-based text form.
pub const MAX_TEXT_RANK: usize = 26;

/// The generating set of `F_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> impl Iterator<Item = Letter> {
        (0..self.rank).map(Letter::gen)
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if letter.index() < self.rank {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange {
                index: letter.index(),
                rank: self.rank,
            })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        word.letters().iter().try_for_each(|&l| self.check_letter(l))
    }

    /// Freely reduces a raw letter sequence after checking it against the alphabet.
    pub fn reduce(&self, raw: &[Letter]) -> Result<Word> {
        raw.iter().try_for_each(|&l| self.check_letter(l))?;
        Ok(Word::from_letters(raw.iter().copied()))
    }

    /// Parses a word and checks that it only uses generators of this alphabet.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let word: Word = text.parse()?;
        self.check_word(&word)?;
        Ok(word)
    }

    /// Image of `w` under the abelianization `F_n -> Z^n`.
    pub fn abelianize(&self, w: &Word) -> Vec<i64> {
        let mut out = vec![0i64; self.rank];
        for l in w.letters() {
            if let Some(slot) = out.get_mut(l.index()) {
                *slot += l.exponent();
            }
        }
        out
    }
}

/// A generator or the inverse of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    index: u32,
    inverse: bool,
}

impl Letter {
    pub fn gen(index: usize) -> Self {
        Letter {
            index: index as u32,
            inverse: false,
        }
    }

    pub fn gen_inv(index: usize) -> Self {
        Letter {
            index: index as u32,
            inverse: true,
        }
    }

    /// Builds a letter from a nonzero 1-based signed index (`+1` = first generator).
    pub fn from_signed(signed: i64) -> Option<Self> {
        match signed {
            0 => None,
            s if s > 0 => Some(Letter::gen((s - 1) as usize)),
            s => Some(Letter::gen_inv((-s - 1) as usize)),
        }
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// `+1` for a generator, `-1` for an inverse.
    pub fn exponent(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// 1-based signed index, the inverse of [`Letter::from_signed`].
    pub fn signed(&self) -> i64 {
        (self.index as i64 + 1) * self.exponent()
    }

    /// Position in the canonical edge ordering: `a, A, b, B, ...`.
    pub fn slot(&self) -> usize {
        2 * self.index() + self.inverse as usize
    }

    pub fn from_slot(slot: usize) -> Self {
        Letter {
            index: (slot / 2) as u32,
            inverse: slot % 2 == 1,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::gen(c as usize - 'a' as usize)),
            'A'..='Z' => Some(Letter::gen_inv(c as usize - 'A' as usize)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index() < MAX_TEXT_RANK {
            let base = if self.inverse { b'A' } else { b'a' };
            write!(f, "{}", (base + self.index as u8) as char)
        } else if self.inverse {
            write!(f, "G{}", self.index + 1)
        } else {
            write!(f, "g{}", self.index + 1)
        }
    }
}

/// A freely reduced word. Every constructor reduces, so no value of this
/// type contains an adjacent pair `x x^-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Free reduction by a single stack scan.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        let mut rest = other.letters.as_slice();
        while let (Some(&last), Some(&first)) = (letters.last(), rest.first()) {
            if last != first.inverse() {
                break;
            }
            letters.pop();
            rest = &rest[1..];
        }
        letters.extend_from_slice(rest);
        Word { letters }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| acc.multiply(&base))
    }

    /// Signed count of occurrences of generator `gen` (0-based).
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.index() == gen)
            .map(Letter::exponent)
            .sum()
    }

    /// Largest generator index used, plus one.
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Word::identity());
        }
        if s.is_empty() {
            return Err(Error::WordSyntax("empty string (write 1 for the identity)".into()));
        }
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::WordSyntax(format!("unexpected character {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::from_letters(letters))
    }
}
