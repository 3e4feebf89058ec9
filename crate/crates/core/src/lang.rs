//! Exact factor languages of primitive constant-length substitutions.
//!
//! Factor sets are computed by closure rather than by sampling a prefix, so a
//! negative membership answer is certain. The language of a primitive rule does
//! not depend on which fixed point is used, so no seed is involved.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subst::{Letter, Substitution, Word};
use crate::word::WordSource;

/// Longest factor length computed by default.
pub const DEFAULT_FACTOR_CAP: usize = 1 << 14;

/// The length-`ℓ` factors of a language, packed contiguously in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorSet {
    word_len: usize,
    packed: Vec<Letter>,
}

impl FactorSet {
    fn from_sorted(word_len: usize, words: BTreeSet<Vec<Letter>>) -> Self {
        let mut packed = Vec::with_capacity(word_len * words.len());
        for w in words {
            packed.extend_from_slice(&w);
        }
        FactorSet { word_len, packed }
    }

    /// Length of every member word.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// Number of member words.
    pub fn len(&self) -> usize {
        self.packed.len().checked_div(self.word_len).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Letter]> {
        let n = self.len();
        (0..n).map(move |i| &self.packed[i * self.word_len..(i + 1) * self.word_len])
    }

    pub fn words(&self) -> Vec<Word> {
        self.iter().map(Word::from).collect()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        if w.len() != self.word_len {
            return false;
        }
        if self.word_len == 0 {
            return true;
        }
        let n = self.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let probe = &self.packed[mid * self.word_len..(mid + 1) * self.word_len];
            match probe.cmp(w) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// All length-`len` factors of the language of `s`.
pub fn factors(s: &Substitution, len: usize) -> Result<FactorSet> {
    factors_capped(s, len, DEFAULT_FACTOR_CAP)
}

pub fn factors_capped(s: &Substitution, len: usize, cap: usize) -> Result<FactorSet> {
    if len > cap {
        return Err(Error::CapExceeded {
            requested: len as u128,
            cap: cap as u128,
        });
    }
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    Ok(FactorSet::from_sorted(len, factor_words(s, len)))
}

fn factor_words(s: &Substitution, len: usize) -> BTreeSet<Vec<Letter>> {
    let sigma = s.alphabet_size();
    if len == 0 {
        return BTreeSet::from([Vec::new()]);
    }
    if len == 1 {
        return (0..sigma).map(|a| vec![Letter(a as u8)]).collect();
    }
    if s.length() == 1 {
        // Primitive with Q = 1 means a single letter.
        return BTreeSet::from([vec![Letter::ZERO; len]]);
    }
    if len == 2 {
        return two_letter_closure(s);
    }
    // A factor of length ℓ lies in the image of a factor of length
    // ceil((ℓ-1)/Q) + 1, which is shorter than ℓ once ℓ >= 3.
    let q = s.length();
    let shorter = (len - 1).div_ceil(q) + 1;
    let mut out = BTreeSet::new();
    for u in factor_words(s, shorter) {
        let image = s.apply_unchecked(&u);
        for window in image.windows(len) {
            if !out.contains(window) {
                out.insert(window.to_vec());
            }
        }
    }
    out
}

// Two-letter factors: those inside single images, closed under taking the
// boundary pair of θ(x)θ(y) for every known factor xy.
fn two_letter_closure(s: &Substitution) -> BTreeSet<Vec<Letter>> {
    let mut set: BTreeSet<Vec<Letter>> = BTreeSet::new();
    for a in 0..s.alphabet_size() {
        for pair in s.image(Letter(a as u8)).windows(2) {
            set.insert(pair.to_vec());
        }
    }
    loop {
        let boundary: Vec<Vec<Letter>> = set
            .iter()
            .map(|xy| {
                let left = *s.image(xy[0]).last().expect("non-empty image");
                let right = s.image(xy[1])[0];
                vec![left, right]
            })
            .filter(|pair| !set.contains(pair))
            .collect();
        if boundary.is_empty() {
            return set;
        }
        set.extend(boundary);
    }
}

/// Whether `w` is a factor of the language of `s`.
pub fn contains(s: &Substitution, w: &[Letter]) -> Result<bool> {
    s.check_word(w)?;
    Ok(factors(s, w.len())?.contains(w))
}

/// Largest `k` such that some letter repeated `k` times is a factor.
pub fn max_run(s: &Substitution) -> Result<usize> {
    let mut k = 1;
    loop {
        if k + 1 > DEFAULT_FACTOR_CAP {
            return Err(Error::CapExceeded {
                requested: (k + 1) as u128,
                cap: DEFAULT_FACTOR_CAP as u128,
            });
        }
        let set = factors(s, k + 1)?;
        let longer = (0..s.alphabet_size()).any(|a| set.contains(&vec![Letter(a as u8); k + 1]));
        if !longer {
            return Ok(k);
        }
        k += 1;
    }
}

/// What [`power_free_check`] looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// Integer powers `x^e`, `e >= 2`.
    Exponent(u32),
    /// Overlaps `w w w₀`.
    Overlap,
}

/// A repetition found in a prefix: `length` letters from `start` with the given period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repetition {
    pub start: u64,
    pub period: u64,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerCheck {
    pub mode: PowerMode,
    pub prefix: u64,
    pub free: bool,
    /// Smallest period first, then smallest start.
    pub violation: Option<Repetition>,
}

/// Scans the first `prefix` letters for the repetitions described by `mode`.
///
/// For each period `p` only positions that are multiples of `p` are sampled:
/// every run of `v[i] = v[i+p]` long enough to matter contains one. The run
/// through a sample is measured with hashed longest-common-extension queries,
/// and every reported violation is re-checked letter by letter.
pub fn power_free_check(ws: &WordSource, mode: PowerMode, prefix: u64) -> Result<PowerCheck> {
    if let PowerMode::Exponent(e) = mode {
        if e < 2 {
            return Err(Error::InvalidParameter(format!(
                "exponent must be at least 2 (got {e})"
            )));
        }
    }
    let word = ws.prefix(prefix);
    let n = word.len();
    let hashes = PrefixHash::new(&word);
    let max_period = match mode {
        PowerMode::Exponent(e) => n / e as usize,
        PowerMode::Overlap => n.saturating_sub(1) / 2,
    };
    let violation = (1..=max_period).into_par_iter().find_map_first(|p| {
        // Matches v[i] = v[i+p] needed in a row.
        let needed = match mode {
            PowerMode::Exponent(e) => (e as usize - 1) * p,
            PowerMode::Overlap => p + 1,
        };
        let total = needed + p;
        let mut j = 0;
        while j + p < n {
            let right = hashes.lce_forward(j, j + p, n - j - p);
            let left = hashes.lce_backward(j, j + p, j);
            let start = j - left;
            if left + right >= needed && (start..start + needed).all(|i| word[i] == word[i + p]) {
                return Some(Repetition {
                    start: start as u64,
                    period: p as u64,
                    length: total as u64,
                });
            }
            j += p;
        }
        None
    });
    Ok(PowerCheck {
        mode,
        prefix: n as u64,
        free: violation.is_none(),
        violation,
    })
}

const MODULUS: u64 = (1 << 61) - 1;
const BASE: u64 = 0x05bd_1e99_5123_4567;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

/// Polynomial prefix hashes modulo the Mersenne prime `2^61 - 1`.
///
/// Collisions can only make an extension look longer than it is, never
/// shorter, so callers confirm candidates directly.
struct PrefixHash {
    prefix: Vec<u64>,
    powers: Vec<u64>,
}

impl PrefixHash {
    fn new(word: &[Letter]) -> Self {
        let mut prefix = Vec::with_capacity(word.len() + 1);
        let mut powers = Vec::with_capacity(word.len() + 1);
        prefix.push(0);
        powers.push(1);
        let mut h = 0u64;
        let mut pw = 1u64;
        for l in word {
            h = mul_mod(h, BASE) + l.0 as u64 + 1;
            if h >= MODULUS {
                h -= MODULUS;
            }
            pw = mul_mod(pw, BASE);
            prefix.push(h);
            powers.push(pw);
        }
        PrefixHash { prefix, powers }
    }

    #[inline]
    fn range(&self, start: usize, len: usize) -> u64 {
        let high = self.prefix[start + len];
        let low = mul_mod(self.prefix[start], self.powers[len]);
        if high >= low {
            high - low
        } else {
            high + MODULUS - low
        }
    }

    /// Longest `m <= max` with `w[i..i+m] == w[j..j+m]` (by hash).
    fn lce_forward(&self, i: usize, j: usize, max: usize) -> usize {
        self.gallop(max, |m| self.range(i, m) == self.range(j, m))
    }

    /// Longest `m <= max` with `w[i-m..i] == w[j-m..j]` (by hash).
    fn lce_backward(&self, i: usize, j: usize, max: usize) -> usize {
        self.gallop(max, |m| self.range(i - m, m) == self.range(j - m, m))
    }

    // Exponential then binary search for the largest m <= max with equal(m).
    fn gallop(&self, max: usize, equal: impl Fn(usize) -> bool) -> usize {
        let mut lo = 0;
        let mut step = 1;
        while lo < max {
            let probe = (lo + step).min(max);
            if equal(probe) {
                lo = probe;
                step *= 2;
            } else {
                let mut hi = probe;
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if equal(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return lo;
            }
        }
        lo
    }
}
