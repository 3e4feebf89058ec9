//! Checks for bijective substitutions on arbitrary alphabets.
//!
//! A run set `C_{n,a}` collects the positions `t` with
//! `v_t = v_{t+n} = … = v_{t+kn} = a`. Its measure is approximated here by the
//! empirical frequency over a prefix, which is positive exactly when some
//! position of the prefix qualifies.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ap::longest_ap;
use crate::error::{Error, Result};
use crate::subst::{Letter, Substitution};
use crate::word::WordSource;

/// Checks `θ^{2n}(a)` at positions `m·(Qⁿ + 1)`, `0 ≤ m < Qⁿ`: all must be `a`.
///
/// The rule must be binary and bijective. No seed is needed, the superword is
/// read directly.
pub fn diagonal_ap_check(s: &Substitution, a: Letter, n: u32) -> Result<bool> {
    if s.alphabet_size() != 2 {
        return Err(Error::NotBinary(s.alphabet_size()));
    }
    if !s.is_bijective() {
        return Err(Error::NotBijective);
    }
    s.check_letter(a)?;
    if n == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let q = s.length() as u64;
    let qn = q
        .checked_pow(n)
        .filter(|qn| qn.checked_mul(*qn).is_some())
        .ok_or_else(|| Error::InvalidParameter(format!("{q}^{} exceeds the index range", 2 * n)))?;
    Ok((0..qn).all(|m| s.superword_letter(a, 2 * n, m * (qn + 1)) == a))
}

/// Prefix count for one run set `C_{n,a}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    pub n: u64,
    pub a: Letter,
    pub k: u64,
    /// Positions `t < N - kn` starting a run of `k + 1` letters `a` at stride `n`.
    pub count: u64,
    pub prefix: u64,
    /// `count / (N - kn)`.
    pub frequency: f64,
}

/// Counts, per letter, the positions `t < N - kn` with `v_t = v_{t+n} = … = v_{t+kn}`.
pub fn cna_counts(ws: &WordSource, n: u64, k: u64, prefix: u64) -> Result<Vec<u64>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "difference and run bound must be positive".into(),
        ));
    }
    let span = k
        .checked_mul(n)
        .filter(|&span| span < prefix)
        .ok_or(Error::PrefixTooShort {
            prefix,
            difference: k.saturating_mul(n),
        })?;
    let sigma = ws.substitution().alphabet_size();
    let mut counts = vec![0u64; sigma];
    // run[r]: current streak at residue r, capped at k + 1
    let mut last = vec![u8::MAX; n as usize];
    let mut run = vec![0u64; n as usize];
    let mut residue = 0usize;
    let mut stream = ws.stream(prefix);
    while let Some(chunk) = stream.next_chunk() {
        for &letter in chunk {
            if last[residue] == letter.0 {
                run[residue] = (run[residue] + 1).min(k + 1);
            } else {
                last[residue] = letter.0;
                run[residue] = 1;
            }
            if run[residue] == k + 1 {
                counts[letter.index()] += 1;
            }
            residue += 1;
            if residue == n as usize {
                residue = 0;
            }
        }
    }
    debug_assert!(counts.iter().sum::<u64>() <= prefix - span);
    Ok(counts)
}

pub fn cna_frequency(ws: &WordSource, n: u64, a: Letter, k: u64, prefix: u64) -> Result<FrequencyEstimate> {
    ws.substitution().check_letter(a)?;
    let counts = cna_counts(ws, n, k, prefix)?;
    let count = counts[a.index()];
    Ok(FrequencyEstimate {
        n,
        a,
        k,
        count,
        prefix,
        frequency: count as f64 / (prefix - k * n) as f64,
    })
}

/// True iff no monochromatic progression of difference `d` and length at
/// least `min_length` lies in `[0, prefix)`.
pub fn absence_check(ws: &WordSource, d: u64, min_length: u64, prefix: u64) -> Result<bool> {
    if min_length < 2 {
        return Err(Error::InvalidParameter("length bound must be at least 2".into()));
    }
    Ok(longest_ap(ws, d, prefix)?.length < min_length)
}

/// Smallest `n ≤ n_max`, then smallest letter, whose run set has a positive
/// count in the prefix. Differences with `kn ≥ prefix` are skipped.
pub fn find_positive_cna(ws: &WordSource, k: u64, n_max: u64, prefix: u64) -> Result<Option<(u64, Letter)>> {
    if k == 0 {
        return Err(Error::InvalidParameter("run bound must be positive".into()));
    }
    (1..=n_max)
        .into_par_iter()
        .filter(|&n| k.checked_mul(n).is_some_and(|span| span < prefix))
        .map(|n| {
            let counts = cna_counts(ws, n, k, prefix)?;
            Ok(counts.iter().position(|&c| c > 0).map(|a| (n, Letter(a as u8))))
        })
        .find_map_first(|r: Result<Option<(u64, Letter)>>| r.transpose())
        .transpose()
}

/// A uniformly random binary bijective rule of the given length: `θ(0)` is
/// arbitrary and `θ(1)` is its complement.
pub fn random_binary_bijective<R: Rng + ?Sized>(rng: &mut R, length: usize) -> Result<Substitution> {
    let zero: Vec<Letter> = (0..length).map(|_| Letter(rng.gen_range(0..2))).collect();
    let one = zero.iter().map(|l| l.bar()).collect();
    Substitution::new(vec![zero, one])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tm() -> WordSource {
        WordSource::thue_morse(Letter::ZERO).unwrap()
    }

    fn brute_counts(ws: &WordSource, n: u64, k: u64, prefix: u64) -> Vec<u64> {
        let v = ws.prefix(prefix);
        let mut counts = vec![0; ws.substitution().alphabet_size()];
        for t in 0..(prefix - k * n) {
            let a = v[t as usize];
            if (1..=k).all(|j| v[(t + j * n) as usize] == a) {
                counts[a.index()] += 1;
            }
        }
        counts
    }

    #[test]
    fn diagonal_examples() {
        assert!(diagonal_ap_check(&Substitution::thue_morse(), Letter::ZERO, 3).unwrap());
        let swapped = Substitution::from_strs(&["10", "01"]).unwrap();
        assert!(diagonal_ap_check(&swapped, Letter::ONE, 2).unwrap());
        let g = Substitution::generalised(2, 1).unwrap();
        assert!(diagonal_ap_check(&g, Letter::ZERO, 2).unwrap());
    }

    #[test]
    fn diagonal_rejects_bad_rules() {
        let s = Substitution::from_strs(&["012", "120", "201"]).unwrap();
        assert_eq!(diagonal_ap_check(&s, Letter::ZERO, 1), Err(Error::NotBinary(3)));
        let s = Substitution::from_strs(&["01", "00"]).unwrap();
        assert_eq!(diagonal_ap_check(&s, Letter::ZERO, 1), Err(Error::NotBijective));
        assert!(diagonal_ap_check(&Substitution::thue_morse(), Letter::ZERO, 0).is_err());
    }

    #[test]
    fn cna_examples() {
        let ws = tm();
        let e = cna_frequency(&ws, 3, Letter::ZERO, 2, 100_000).unwrap();
        assert!(e.count > 0);
        assert!(e.frequency > 0.0 && e.frequency <= 1.0);
        assert_eq!(cna_frequency(&ws, 1, Letter::ZERO, 2, 100_000).unwrap().count, 0);
        assert!(matches!(
            cna_frequency(&ws, 5, Letter::ZERO, 2, 10),
            Err(Error::PrefixTooShort { .. })
        ));
    }

    #[test]
    fn counts_match_brute_force() {
        let sources = [
            tm(),
            WordSource::generalised(1, 2, Letter::ZERO).unwrap(),
            WordSource::new(Substitution::from_strs(&["012", "120", "201"]).unwrap(), Letter::ZERO).unwrap(),
        ];
        for ws in &sources {
            for n in 1..12 {
                for k in 1..4 {
                    assert_eq!(
                        cna_counts(ws, n, k, 3000).unwrap(),
                        brute_counts(ws, n, k, 3000),
                        "n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn search_examples() {
        assert_eq!(
            find_positive_cna(&tm(), 2, 20, 100_000).unwrap(),
            Some((3, Letter::ZERO))
        );
        let g = WordSource::generalised(2, 1, Letter::ZERO).unwrap();
        assert!(find_positive_cna(&g, 3, 20, 100_000).unwrap().is_some());
        assert_eq!(find_positive_cna(&tm(), 1_000_000, 20, 100_000).unwrap(), None);
    }

    #[test]
    fn absence_examples() {
        let ws = tm();
        assert!(absence_check(&ws, 5, 7, 1 << 20).unwrap());
        assert!(!absence_check(&ws, 15, 20, 1 << 22).unwrap());
    }

    #[test]
    fn random_rules_are_binary_bijective() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_binary_bijective(&mut rng, 3).unwrap();
            assert!(s.is_bijective());
            assert!(s.has_bar_symmetry());
        }
    }
}
