//! Constant-length substitutions over small dense alphabets.
//!
//! A substitution maps every letter to a word of the same length `Q`. The
//! Thue–Morse rule `0 ↦ 01, 1 ↦ 10` and the generalised rules
//! `0 ↦ 0^p 1^q, 1 ↦ 1^p 0^q` are the two families used throughout the crate,
//! but any rule over at most [`MAX_ALPHABET`](crate::MAX_ALPHABET) letters is
//! accepted.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_ALPHABET;

/// Default cap on the number of letters [`Substitution::iterate`] will materialize.
pub const DEFAULT_ITERATE_CAP: u64 = 1 << 28;

/// A letter, stored as a dense index into its alphabet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u8);

impl Letter {
    pub const ZERO: Letter = Letter(0);
    pub const ONE: Letter = Letter(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Binary complement. Only meaningful on a two-letter alphabet.
    #[inline]
    pub fn bar(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    fn to_char(self) -> char {
        char::from_digit(self.0 as u32, 36).unwrap_or('?')
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite word. Letters are written as base-36 digits when displayed or parsed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn into_inner(self) -> Vec<Letter> {
        self.0
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| Letter(d as u8))
                    .ok_or_else(|| Error::InvalidParameter(format!("bad letter {c:?} in word {s:?}")))
            })
            .collect()
    }
}

/// A constant-length substitution: every letter maps to a word of length `Q`.
///
/// Images are stored flat, letter-major, so `image(a)[j]` is `images[a * Q + j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    alphabet_size: usize,
    length: usize,
    images: Vec<Letter>,
}

impl Substitution {
    /// Builds a substitution from one image per letter, in alphabet order.
    pub fn new(images: Vec<Vec<Letter>>) -> Result<Self> {
        let alphabet_size = images.len();
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if alphabet_size > MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge(alphabet_size));
        }
        let length = images[0].len();
        if length == 0 {
            return Err(Error::ZeroLength);
        }
        let mut flat = Vec::with_capacity(alphabet_size * length);
        for (letter, image) in images.iter().enumerate() {
            if image.len() != length {
                return Err(Error::UnequalImageLengths {
                    letter,
                    expected: length,
                    found: image.len(),
                });
            }
            for &l in image {
                if l.index() >= alphabet_size {
                    return Err(Error::InvalidLetter {
                        letter: l.index(),
                        alphabet_size,
                    });
                }
            }
            flat.extend_from_slice(image);
        }
        Ok(Substitution {
            alphabet_size,
            length,
            images: flat,
        })
    }

    /// Parses images written as digit strings, e.g. `["01", "10"]`.
    pub fn from_strs(images: &[&str]) -> Result<Self> {
        let images = images
            .iter()
            .map(|s| s.parse::<Word>().map(Word::into_inner))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// The Thue–Morse rule `0 ↦ 01, 1 ↦ 10`.
    pub fn thue_morse() -> Self {
        Self::generalised(1, 1).expect("p = q = 1 is valid")
    }

    /// The generalised Thue–Morse rule `0 ↦ 0^p 1^q, 1 ↦ 1^p 0^q`.
    pub fn generalised(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!(
                "generalised Thue-Morse needs p, q >= 1 (got p={p}, q={q})"
            )));
        }
        let zero: Vec<Letter> = std::iter::repeat_n(Letter::ZERO, p)
            .chain(std::iter::repeat_n(Letter::ONE, q))
            .collect();
        let one: Vec<Letter> = zero.iter().map(|l| l.bar()).collect();
        Self::new(vec![zero, one])
    }

    #[inline]
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// The common image length `Q`.
    #[inline]
    pub fn length(&self) -> usize {
        self.length
    }

    #[inline]
    pub fn image(&self, a: Letter) -> &[Letter] {
        let start = a.index() * self.length;
        &self.images[start..start + self.length]
    }

    pub fn check_letter(&self, a: Letter) -> Result<()> {
        if a.index() < self.alphabet_size {
            Ok(())
        } else {
            Err(Error::InvalidLetter {
                letter: a.index(),
                alphabet_size: self.alphabet_size,
            })
        }
    }

    pub fn check_word(&self, w: &[Letter]) -> Result<()> {
        w.iter().try_for_each(|&a| self.check_letter(a))
    }

    /// Concatenates the images of the letters of `w`.
    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        self.check_word(w)?;
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(w.len() * self.length);
        for &a in w {
            out.extend_from_slice(self.image(a));
        }
        Word(out)
    }

    /// The level-`n` superword `θⁿ(a)`, refusing anything longer than
    /// [`DEFAULT_ITERATE_CAP`] letters.
    pub fn iterate(&self, a: Letter, n: u32) -> Result<Word> {
        self.iterate_capped(a, n, DEFAULT_ITERATE_CAP)
    }

    pub fn iterate_capped(&self, a: Letter, n: u32, cap: u64) -> Result<Word> {
        self.check_letter(a)?;
        let size = (self.length as u128).checked_pow(n).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::CapExceeded {
                requested: size,
                cap: cap as u128,
            });
        }
        let mut w = Word(vec![a]);
        for _ in 0..n {
            w = self.apply_unchecked(&w);
        }
        Ok(w)
    }

    /// The letter at position `i` of `θⁿ(a)`, without materializing it.
    ///
    /// Walks the `n` base-`Q` digits of `i` from the most significant one.
    pub fn superword_letter(&self, a: Letter, n: u32, i: u64) -> Letter {
        let q = self.length as u64;
        let mut digits = [0u8; 64];
        let mut rest = i;
        for slot in digits.iter_mut().take(n as usize) {
            *slot = (rest % q) as u8;
            rest /= q;
        }
        debug_assert_eq!(rest, 0, "index {i} outside superword of level {n}");
        let mut letter = a;
        for &digit in digits[..n as usize].iter().rev() {
            letter = self.image(letter)[digit as usize];
        }
        letter
    }

    /// True when every image column is a permutation of the alphabet.
    pub fn is_bijective(&self) -> bool {
        (0..self.length).all(|j| {
            let mut seen = 0u32;
            for a in 0..self.alphabet_size {
                seen |= 1 << self.images[a * self.length + j].index();
            }
            seen.count_ones() as usize == self.alphabet_size
        })
    }

    /// True when some power of the incidence matrix is strictly positive.
    ///
    /// Checks powers up to `σ²`, which is above the Wielandt bound `(σ-1)² + 1`.
    pub fn is_primitive(&self) -> bool {
        let full: u32 = (1 << self.alphabet_size) - 1;
        // rows[a] is the set of letters reachable from a in exactly k steps.
        let base: Vec<u32> = (0..self.alphabet_size)
            .map(|a| {
                self.image(Letter(a as u8))
                    .iter()
                    .fold(0u32, |acc, l| acc | (1 << l.index()))
            })
            .collect();
        let mut rows = base.clone();
        for _ in 0..self.alphabet_size * self.alphabet_size {
            if rows.iter().all(|&r| r == full) {
                return true;
            }
            rows = rows
                .iter()
                .map(|&r| {
                    (0..self.alphabet_size)
                        .filter(|b| r & (1 << b) != 0)
                        .fold(0u32, |acc, b| acc | base[b])
                })
                .collect();
        }
        rows.iter().all(|&r| r == full)
    }

    /// True for binary rules that commute with the letter complement,
    /// `θ(ā) = bar(θ(a))`.
    pub fn has_bar_symmetry(&self) -> bool {
        self.alphabet_size == 2
            && self
                .image(Letter::ZERO)
                .iter()
                .zip(self.image(Letter::ONE))
                .all(|(a, b)| a.bar() == *b)
    }
}

/// Letterwise binary complement of `w`.
pub fn bar(w: &[Letter]) -> Result<Word> {
    w.iter()
        .map(|&a| {
            if a.0 < 2 {
                Ok(a.bar())
            } else {
                Err(Error::NotBinary(a.index() + 1))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn thue_morse_images() {
        let tm = Substitution::thue_morse();
        assert_eq!(tm.image(Letter::ZERO), &*w("01"));
        assert_eq!(tm.image(Letter::ONE), &*w("10"));
        assert_eq!(tm.apply(&w("0")).unwrap(), w("01"));
        assert_eq!(tm, Substitution::generalised(1, 1).unwrap());
    }

    #[test]
    fn generalised_images() {
        let s = Substitution::generalised(1, 2).unwrap();
        assert_eq!(s.image(Letter::ZERO), &*w("011"));
        assert_eq!(s.image(Letter::ONE), &*w("100"));
        let s = Substitution::generalised(2, 2).unwrap();
        assert_eq!(s.image(Letter::ZERO), &*w("0011"));
        assert_eq!(s.image(Letter::ONE), &*w("1100"));
        assert!(Substitution::generalised(0, 2).is_err());
        assert!(Substitution::generalised(3, 0).is_err());
    }

    #[test]
    fn apply_concatenates() {
        let s = Substitution::generalised(1, 2).unwrap();
        assert_eq!(s.apply(&w("01")).unwrap(), w("011100"));
        assert_eq!(s.apply(&[]).unwrap(), Word::new());
        assert!(matches!(s.apply(&w("02")), Err(Error::InvalidLetter { letter: 2, .. })));
    }

    #[test]
    fn iterate_small() {
        let tm = Substitution::thue_morse();
        assert_eq!(tm.iterate(Letter::ZERO, 2).unwrap(), w("0110"));
        assert_eq!(tm.iterate(Letter::ONE, 0).unwrap(), w("1"));
        let s = Substitution::generalised(1, 2).unwrap();
        assert_eq!(s.iterate(Letter::ZERO, 2).unwrap(), w("011100100"));
    }

    #[test]
    fn iterate_cap() {
        let tm = Substitution::thue_morse();
        assert!(matches!(
            tm.iterate_capped(Letter::ZERO, 11, 1024),
            Err(Error::CapExceeded {
                requested: 2048,
                cap: 1024
            })
        ));
        assert_eq!(tm.iterate_capped(Letter::ZERO, 10, 1024).unwrap().len(), 1024);
        assert!(tm.iterate(Letter::ZERO, 200).is_err());
    }

    #[test]
    fn superword_letter_matches_iterate() {
        for s in [
            Substitution::thue_morse(),
            Substitution::generalised(2, 1).unwrap(),
            Substitution::from_strs(&["012", "120", "201"]).unwrap(),
        ] {
            for a in 0..s.alphabet_size() {
                let a = Letter(a as u8);
                let word = s.iterate(a, 4).unwrap();
                for (i, &l) in word.iter().enumerate() {
                    assert_eq!(s.superword_letter(a, 4, i as u64), l);
                }
            }
        }
    }

    #[test]
    fn bar_complements() {
        assert_eq!(bar(&w("0110")).unwrap(), w("1001"));
        assert_eq!(bar(&[]).unwrap(), Word::new());
        assert_eq!(bar(&bar(&w("00101")).unwrap()).unwrap(), w("00101"));
        assert!(matches!(bar(&w("012")), Err(Error::NotBinary(3))));
    }

    #[test]
    fn bar_swaps_thue_morse_superwords() {
        let tm = Substitution::thue_morse();
        for n in 0..=10 {
            let zero = tm.iterate(Letter::ZERO, n).unwrap();
            let one = tm.iterate(Letter::ONE, n).unwrap();
            assert_eq!(bar(&zero).unwrap(), one);
        }
    }

    #[test]
    fn bijectivity() {
        assert!(Substitution::thue_morse().is_bijective());
        for p in 1..5 {
            for q in 1..5 {
                assert!(Substitution::generalised(p, q).unwrap().is_bijective());
            }
        }
        assert!(!Substitution::from_strs(&["00", "10"]).unwrap().is_bijective());
        assert!(Substitution::from_strs(&["012", "120", "201"]).unwrap().is_bijective());
    }

    #[test]
    fn primitivity() {
        assert!(Substitution::thue_morse().is_primitive());
        assert!(!Substitution::from_strs(&["00", "11"]).unwrap().is_primitive());
        assert!(Substitution::generalised(3, 2).unwrap().is_primitive());
        // Fibonacci-like reachability: 0 -> 01, 1 -> 00 needs two steps.
        assert!(Substitution::from_strs(&["01", "00"]).unwrap().is_primitive());
        // 2 is never reached from 0 or 1.
        assert!(!Substitution::from_strs(&["01", "10", "22"]).unwrap().is_primitive());
    }

    #[test]
    fn bar_symmetry() {
        assert!(Substitution::thue_morse().has_bar_symmetry());
        assert!(Substitution::generalised(2, 3).unwrap().has_bar_symmetry());
        assert!(!Substitution::from_strs(&["00", "10"]).unwrap().has_bar_symmetry());
        assert!(!Substitution::from_strs(&["012", "120", "201"])
            .unwrap()
            .has_bar_symmetry());
    }

    #[test]
    fn constructor_rejects_bad_rules() {
        assert_eq!(Substitution::new(vec![]), Err(Error::EmptyAlphabet));
        assert!(matches!(
            Substitution::from_strs(&["01", "100"]),
            Err(Error::UnequalImageLengths {
                letter: 1,
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            Substitution::from_strs(&["01", "12"]),
            Err(Error::InvalidLetter {
                letter: 2,
                alphabet_size: 2
            })
        ));
        assert_eq!(Substitution::from_strs(&["", ""]), Err(Error::ZeroLength));
    }

    #[test]
    fn word_display_roundtrip() {
        let word = w("0110");
        assert_eq!(word.to_string(), "0110");
        assert_eq!(word.reversed(), w("0110"));
        assert_eq!(w("011").reversed(), w("110"));
        assert!("0x1".parse::<Word>().is_ok());
        assert!("0-1".parse::<Word>().is_err());
    }
}
