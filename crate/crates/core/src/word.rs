//! Random access and streaming prefixes of substitution fixed points.

use crate::error::{Error, Result};
use crate::subst::{Letter, Substitution, Word};

/// Largest index accepted by [`WordSource::letter_at`].
pub const MAX_INDEX: u64 = i64::MAX as u64;

/// Letters per streamed chunk are at least this many (one level-k superword).
const MIN_CHUNK: usize = 1 << 14;

/// The fixed point `v = lim θⁿ(seed)` of a substitution whose image of `seed`
/// starts with `seed`. Letters are computed on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSource {
    subst: Substitution,
    seed: Letter,
}

impl WordSource {
    pub fn new(subst: Substitution, seed: Letter) -> Result<Self> {
        subst.check_letter(seed)?;
        if subst.image(seed)[0] != seed {
            return Err(Error::NotSelfStarting(seed.index()));
        }
        Ok(WordSource { subst, seed })
    }

    pub fn thue_morse(seed: Letter) -> Result<Self> {
        Self::new(Substitution::thue_morse(), seed)
    }

    pub fn generalised(p: usize, q: usize, seed: Letter) -> Result<Self> {
        Self::new(Substitution::generalised(p, q)?, seed)
    }

    #[inline]
    pub fn substitution(&self) -> &Substitution {
        &self.subst
    }

    #[inline]
    pub fn seed(&self) -> Letter {
        self.seed
    }

    /// The letter `v_i`, via `v_{Qi+r} = θ(v_i)_r` applied digit by digit.
    pub fn letter_at(&self, i: u64) -> Letter {
        let q = self.subst.length() as u64;
        if q == 1 {
            return self.seed;
        }
        let mut digits = [0u8; 64];
        let mut len = 0;
        let mut rest = i;
        while rest > 0 {
            digits[len] = (rest % q) as u8;
            rest /= q;
            len += 1;
        }
        let mut letter = self.seed;
        for &digit in digits[..len].iter().rev() {
            letter = self.subst.image(letter)[digit as usize];
        }
        letter
    }

    /// The first `n` letters, materialized.
    pub fn prefix(&self, n: u64) -> Word {
        let mut out = Vec::with_capacity(n as usize);
        let mut stream = self.stream(n);
        while let Some(chunk) = stream.next_chunk() {
            out.extend_from_slice(chunk);
        }
        Word::from(out)
    }

    /// Streams the first `n` letters in superword-sized chunks.
    pub fn stream(&self, n: u64) -> PrefixStream<'_> {
        PrefixStream::new(self, n)
    }
}

/// Chunked prefix generator.
///
/// Precomputes the level-`k` superwords of every letter once; block `j` of the
/// fixed point is then the superword of `v_j`, so each chunk costs one
/// `letter_at` lookup and no per-letter work.
pub struct PrefixStream<'a> {
    source: &'a WordSource,
    table: Vec<Letter>,
    block: usize,
    next_block: u64,
    emitted: u64,
    total: u64,
}

impl<'a> PrefixStream<'a> {
    fn new(source: &'a WordSource, total: u64) -> Self {
        let subst = &source.subst;
        let q = subst.length();
        let mut level = 0u32;
        let mut block = 1usize;
        if q > 1 {
            while block < MIN_CHUNK {
                block *= q;
                level += 1;
            }
        }
        let mut table = Vec::with_capacity(block * subst.alphabet_size());
        for a in 0..subst.alphabet_size() {
            let superword = subst
                .iterate_capped(Letter(a as u8), level, block as u64)
                .expect("chunk superword within cap");
            table.extend_from_slice(&superword);
        }
        PrefixStream {
            source,
            table,
            block,
            next_block: 0,
            emitted: 0,
            total,
        }
    }

    /// Number of letters handed out so far.
    pub fn position(&self) -> u64 {
        self.emitted
    }

    pub fn next_chunk(&mut self) -> Option<&[Letter]> {
        if self.emitted >= self.total {
            return None;
        }
        let letter = self.source.letter_at(self.next_block);
        let take = (self.total - self.emitted).min(self.block as u64) as usize;
        let start = letter.index() * self.block;
        self.next_block += 1;
        self.emitted += take as u64;
        Some(&self.table[start..start + take])
    }
}

/// Thue–Morse letter: 0 iff the binary expansion of `i` has an even number of ones.
#[inline]
pub fn tm_letter(i: u64) -> Letter {
    Letter((i.count_ones() & 1) as u8)
}

/// Letter `i` of the fixed point of `0 ↦ 0^p 1^q, 1 ↦ 1^p 0^q` seeded with
/// `seed`: the seed flipped once per base-`(p+q)` digit of `i` that is `>= p`.
pub fn gtm_letter(p: u64, q: u64, i: u64, seed: Letter) -> Letter {
    let base = p + q;
    let mut rest = i;
    let mut flips = 0u8;
    while rest > 0 {
        if rest % base >= p {
            flips ^= 1;
        }
        rest /= base;
    }
    Letter(seed.0 ^ flips)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn source_requires_self_starting_seed() {
        assert!(WordSource::thue_morse(Letter::ZERO).is_ok());
        assert!(WordSource::thue_morse(Letter::ONE).is_ok());
        assert!(WordSource::generalised(1, 2, Letter::ONE).is_ok());
        let swapped = Substitution::from_strs(&["10", "01"]).unwrap();
        assert_eq!(
            WordSource::new(swapped.clone(), Letter::ZERO),
            Err(Error::NotSelfStarting(0))
        );
        assert_eq!(WordSource::new(swapped, Letter::ONE), Err(Error::NotSelfStarting(1)));
        assert!(WordSource::thue_morse(Letter(2)).is_err());
    }

    #[test]
    fn prefixes() {
        let tm = WordSource::thue_morse(Letter::ZERO).unwrap();
        assert_eq!(tm.prefix(8), w("01101001"));
        assert_eq!(tm.prefix(0), Word::new());
        let tm1 = WordSource::thue_morse(Letter::ONE).unwrap();
        assert_eq!(tm1.prefix(8), w("10010110"));
        let g = WordSource::generalised(1, 2, Letter::ZERO).unwrap();
        assert_eq!(g.prefix(9), w("011100100"));
    }

    #[test]
    fn letter_at_examples() {
        let tm = WordSource::thue_morse(Letter::ZERO).unwrap();
        // 5 = 101b has two ones.
        assert_eq!(tm.letter_at(5), Letter::ZERO);
        assert_eq!(tm.letter_at(0), Letter::ZERO);
        let g = WordSource::generalised(1, 2, Letter::ZERO).unwrap();
        assert_eq!(g.letter_at(4), Letter::ZERO);
        assert_eq!(g.letter_at(0), Letter::ZERO);
        assert_eq!(tm.letter_at(MAX_INDEX), tm_letter(MAX_INDEX));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(tm_letter(0), Letter::ZERO);
        assert_eq!(tm_letter(3), Letter::ZERO);
        assert_eq!(tm_letter(7), Letter::ONE);
        assert_eq!(gtm_letter(1, 2, 4, Letter::ZERO), Letter::ZERO);
        assert_eq!(gtm_letter(2, 1, 2, Letter::ZERO), Letter::ONE);
        for i in 0..4096 {
            assert_eq!(gtm_letter(1, 1, i, Letter::ZERO), tm_letter(i));
        }
    }

    #[test]
    fn stream_chunks_cover_prefix_exactly() {
        let g = WordSource::generalised(2, 3, Letter::ZERO).unwrap();
        let n = 3 * MIN_CHUNK as u64 + 17;
        let mut stream = g.stream(n);
        let mut got = 0u64;
        while let Some(chunk) = stream.next_chunk() {
            for (k, &l) in chunk.iter().enumerate() {
                assert_eq!(l, g.letter_at(got + k as u64));
            }
            got += chunk.len() as u64;
        }
        assert_eq!(got, n);
        assert_eq!(stream.position(), n);
    }

    #[test]
    fn general_alphabet_source() {
        let s = Substitution::from_strs(&["012", "120", "201"]).unwrap();
        let ws = WordSource::new(s.clone(), Letter::ZERO).unwrap();
        let level5 = s.iterate(Letter::ZERO, 5).unwrap();
        assert_eq!(ws.prefix(level5.len() as u64), level5);
    }
}
