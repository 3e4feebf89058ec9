//! Longest monochromatic arithmetic progressions.
//!
//! `A(d)` is the length of the longest run `v_t = v_{t+d} = … = v_{t+(L-1)d}`
//! in a fixed point `v`. Three routes are provided:
//!
//! - exhaustive prefix scans ([`longest_ap`], [`estimate`], [`scan_range`]),
//!   which give lower bounds and a heuristic stability flag;
//! - closed forms for `d = Qⁿ ± 1` in the Thue–Morse and generalised
//!   Thue–Morse families ([`closed_form`]);
//! - constructive witnesses along the diagonals of level-`2n` superwords
//!   ([`witness`]), re-verified letter by letter.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang;
use crate::subst::{Letter, Substitution};
use crate::word::{WordSource, MAX_INDEX};
use crate::MAX_ALPHABET;

/// Default upper limit on the prefix length used by [`estimate`].
pub const DEFAULT_PREFIX_CAP: u64 = 1 << 30;

/// Lower floor of the automatic initial prefix.
pub const MIN_AUTO_PREFIX: u64 = 1 << 16;

/// Differences up to this value are certified by stable scans by default.
pub const DEFAULT_CERTIFY_LIMIT: u64 = 257;

/// The two binary families with bar-swap symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ThueMorse,
    Generalised { p: u32, q: u32 },
}

impl Family {
    pub fn generalised(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!(
                "p and q must be positive (got {p}, {q})"
            )));
        }
        Ok(Family::Generalised { p, q })
    }

    pub fn pq(self) -> (u64, u64) {
        match self {
            Family::ThueMorse => (1, 1),
            Family::Generalised { p, q } => (p as u64, q as u64),
        }
    }

    /// Substitution length `Q = p + q`.
    pub fn q(self) -> u64 {
        let (p, q) = self.pq();
        p + q
    }

    pub fn substitution(self) -> Substitution {
        let (p, q) = self.pq();
        Substitution::generalised(p as usize, q as usize).expect("family parameters are positive")
    }

    pub fn source(self, seed: Letter) -> Result<WordSource> {
        WordSource::new(self.substitution(), seed)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ThueMorse => write!(f, "tm"),
            Family::Generalised { p, q } => write!(f, "pq:{p},{q}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "tm" {
            return Ok(Family::ThueMorse);
        }
        let bad = || Error::InvalidParameter(format!("expected `tm` or `pq:P,Q`, got {s:?}"));
        let rest = s.strip_prefix("pq:").ok_or_else(bad)?;
        let (p, q) = rest.split_once(',').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim().parse().map_err(|_| bad())?;
        Family::generalised(p, q)
    }
}

/// Which neighbour of a power of `Q` a difference is: `Qⁿ + 1` or `Qⁿ - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Plus,
    Minus,
}

impl Kind {
    pub fn difference(self, q: u64, n: u32) -> Result<u64> {
        let qn = checked_pow(q, n)?;
        Ok(match self {
            Kind::Plus => qn + 1,
            Kind::Minus => qn - 1,
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Plus => "plus",
            Kind::Minus => "minus",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Kind::Plus),
            "minus" => Ok(Kind::Minus),
            _ => Err(Error::InvalidParameter(format!(
                "kind must be plus or minus, got {s:?}"
            ))),
        }
    }
}

fn checked_pow(q: u64, n: u32) -> Result<u64> {
    q.checked_pow(n)
        .filter(|&v| v <= MAX_INDEX)
        .ok_or_else(|| Error::InvalidParameter(format!("{q}^{n} exceeds the index range")))
}

/// A monochromatic progression `start, start + d, …, start + (length-1)·d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub start: u64,
    pub difference: u64,
    pub length: u64,
    pub letter: Letter,
}

impl Progression {
    /// Builds a progression after checking every member against `ws`.
    pub fn verified(ws: &WordSource, start: u64, difference: u64, length: u64, letter: Letter) -> Result<Self> {
        let p = Progression {
            start,
            difference,
            length,
            letter,
        };
        p.verify(ws)?;
        Ok(p)
    }

    pub fn verify(&self, ws: &WordSource) -> Result<()> {
        if self.difference == 0 || self.length == 0 {
            return Err(Error::InvalidParameter("empty progression".into()));
        }
        if self.last().is_none_or(|last| last > MAX_INDEX) {
            return Err(Error::InvalidParameter("progression leaves the index range".into()));
        }
        match self.positions().find(|&i| ws.letter_at(i) != self.letter) {
            Some(i) => Err(Error::Internal(format!(
                "position {i} of progression {self:?} does not carry letter {}",
                self.letter
            ))),
            None => Ok(()),
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = u64> {
        let (start, d) = (self.start, self.difference);
        (0..self.length).map(move |m| start + m * d)
    }

    /// Position of the last member.
    pub fn last(&self) -> Option<u64> {
        (self.length - 1)
            .checked_mul(self.difference)
            .and_then(|x| x.checked_add(self.start))
    }
}

/// Result of a prefix scan at one difference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub d: u64,
    /// Longest progression found; a lower bound for `A(d)`.
    pub length: u64,
    pub witness: Progression,
    /// Best progression per letter, indexed by letter.
    pub per_letter: Vec<Option<Progression>>,
    pub prefix_scanned: u64,
    /// Same length at `N` and `2N`. A heuristic, not a proof.
    pub stable: bool,
}

/// One-pass scanner keeping a run counter per residue class modulo `d`.
#[derive(Clone, Debug)]
pub struct ApScanner {
    d: u64,
    residue: usize,
    last: Vec<u8>,
    run: Vec<u32>,
    // (length, position of last member) per letter
    best: [(u32, u64); MAX_ALPHABET],
    pos: u64,
}

impl ApScanner {
    pub fn new(d: u64) -> Self {
        assert!(d >= 1, "difference must be positive");
        let width = usize::try_from(d).expect("difference fits in memory");
        ApScanner {
            d,
            residue: 0,
            last: vec![u8::MAX; width],
            run: vec![0; width],
            best: [(0, 0); MAX_ALPHABET],
            pos: 0,
        }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn feed(&mut self, chunk: &[Letter]) {
        let width = self.last.len();
        let mut r = self.residue;
        let mut pos = self.pos;
        for &Letter(l) in chunk {
            let run = if self.last[r] == l {
                self.run[r] + 1
            } else {
                self.last[r] = l;
                1
            };
            self.run[r] = run;
            let best = &mut self.best[l as usize];
            if run > best.0 {
                *best = (run, pos);
            }
            pos += 1;
            r += 1;
            if r == width {
                r = 0;
            }
        }
        self.residue = r;
        self.pos = pos;
    }

    fn progression_for(&self, letter: usize) -> Option<Progression> {
        let (len, end) = self.best[letter];
        (len > 0).then(|| Progression {
            start: end - (len as u64 - 1) * self.d,
            difference: self.d,
            length: len as u64,
            letter: Letter(letter as u8),
        })
    }

    pub fn per_letter(&self, alphabet_size: usize) -> Vec<Option<Progression>> {
        (0..alphabet_size).map(|a| self.progression_for(a)).collect()
    }

    /// Longest progression seen so far: smallest start on ties, then smallest letter.
    pub fn best(&self) -> Option<Progression> {
        (0..MAX_ALPHABET)
            .filter_map(|a| self.progression_for(a))
            .min_by_key(|p| (std::cmp::Reverse(p.length), p.start, p.letter))
    }

    pub fn best_length(&self) -> u64 {
        self.best.iter().map(|b| b.0 as u64).max().unwrap_or(0)
    }
}

/// Longest monochromatic progression of difference `d` lying in `[0, prefix)`.
pub fn longest_ap(ws: &WordSource, d: u64, prefix: u64) -> Result<Progression> {
    Ok(scan_prefix(ws, d, prefix)?.best().expect("non-empty prefix"))
}

/// Per-letter maxima over `[0, prefix)`.
pub fn longest_ap_per_letter(ws: &WordSource, d: u64, prefix: u64) -> Result<Vec<Option<Progression>>> {
    Ok(scan_prefix(ws, d, prefix)?.per_letter(ws.substitution().alphabet_size()))
}

/// A single scan of `[0, prefix)` as a report; `stable` is always false.
pub fn scan_fixed(ws: &WordSource, d: u64, prefix: u64) -> Result<ScanReport> {
    let scanner = scan_prefix(ws, d, prefix)?;
    Ok(ScanReport {
        d,
        length: scanner.best_length(),
        witness: scanner.best().expect("non-empty prefix"),
        per_letter: scanner.per_letter(ws.substitution().alphabet_size()),
        prefix_scanned: prefix,
        stable: false,
    })
}

fn scan_prefix(ws: &WordSource, d: u64, prefix: u64) -> Result<ApScanner> {
    if d == 0 {
        return Err(Error::InvalidParameter("difference must be positive".into()));
    }
    if prefix <= d {
        return Err(Error::PrefixTooShort { prefix, difference: d });
    }
    let mut scanner = ApScanner::new(d);
    let mut stream = ws.stream(prefix);
    while let Some(chunk) = stream.next_chunk() {
        scanner.feed(chunk);
    }
    Ok(scanner)
}

/// Prefix policy for [`estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimateOptions {
    /// First prefix length; [`auto_prefix`] when `None`.
    pub initial_prefix: Option<u64>,
    /// Doubling stops before exceeding this length.
    pub cap: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            initial_prefix: None,
            cap: DEFAULT_PREFIX_CAP,
        }
    }
}

impl EstimateOptions {
    pub fn with_cap(cap: u64) -> Self {
        EstimateOptions {
            initial_prefix: None,
            cap,
        }
    }
}

/// `max(2^16, 32·d·(d+8))`: maximal progressions span about `d·(d + c)` letters.
pub fn auto_prefix(d: u64) -> u64 {
    MIN_AUTO_PREFIX.max(32u64.saturating_mul(d).saturating_mul(d.saturating_add(8)))
}

/// Scans prefixes `N₀, 2N₀, 4N₀, …` until the longest length repeats or the
/// cap is reached.
pub fn estimate(ws: &WordSource, d: u64, options: EstimateOptions) -> Result<ScanReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("difference must be positive".into()));
    }
    let cap = options.cap.min(MAX_INDEX);
    if cap <= d {
        return Err(Error::PrefixTooShort {
            prefix: cap,
            difference: d,
        });
    }
    let mut checkpoint = options
        .initial_prefix
        .unwrap_or_else(|| auto_prefix(d))
        .clamp(d + 1, cap);
    let sigma = ws.substitution().alphabet_size();
    let mut scanner = ApScanner::new(d);
    let mut stream = ws.stream(cap);
    let mut previous: Option<u64> = None;

    let report = |scanner: &ApScanner, stable: bool| ScanReport {
        d,
        length: scanner.best_length(),
        witness: scanner.best().expect("prefix longer than d"),
        per_letter: scanner.per_letter(sigma),
        prefix_scanned: scanner.position(),
        stable,
    };

    while let Some(mut chunk) = stream.next_chunk() {
        loop {
            let pos = scanner.position();
            if pos + (chunk.len() as u64) < checkpoint {
                scanner.feed(chunk);
                break;
            }
            let split = (checkpoint - pos) as usize;
            scanner.feed(&chunk[..split]);
            chunk = &chunk[split..];

            let length = scanner.best_length();
            if previous == Some(length) {
                return Ok(report(&scanner, true));
            }
            previous = Some(length);
            match checkpoint.checked_mul(2).filter(|&c| c <= cap) {
                Some(next) => checkpoint = next,
                None => return Ok(report(&scanner, false)),
            }
        }
    }
    unreachable!("the stream ends at the cap, past the last checkpoint")
}

/// Splits `d = Q^s · d'` with `Q ∤ d'`.
pub fn reduce_difference(d: u64, q: u64) -> (u64, u32) {
    assert!(d >= 1 && q >= 2);
    let mut d = d;
    let mut s = 0;
    while d.is_multiple_of(q) {
        d /= q;
        s += 1;
    }
    (d, s)
}

/// Prefix and reduction policy for [`scan_range`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RangePolicy {
    pub estimate: EstimateOptions,
    /// Scan `d / Q^s` instead of `d` and lift the witness back.
    pub reduce: bool,
}

/// One [`estimate`] per difference in `1..=d_max`, in order.
pub fn scan_range(ws: &WordSource, d_max: u64, policy: RangePolicy) -> Result<Vec<ScanReport>> {
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            if !policy.reduce {
                return estimate(ws, d, policy.estimate);
            }
            let q = ws.substitution().length() as u64;
            let (reduced, s) = reduce_difference(d, q);
            let base = estimate(ws, reduced, policy.estimate)?;
            if s == 0 {
                return Ok(base);
            }
            lift_report(ws, base, s)
        })
        .collect()
}

// Every letter of θ^s(v_t) sits at the same offset of its level-s block, so a
// progression of difference d' at t lifts to difference Q^s·d' at Q^s·t.
fn lift_report(ws: &WordSource, base: ScanReport, s: u32) -> Result<ScanReport> {
    let subst = ws.substitution();
    let scale = checked_pow(subst.length() as u64, s)?;
    let lift = |p: &Progression| -> Result<Progression> {
        let letter = subst.superword_letter(p.letter, s, 0);
        Progression::verified(ws, p.start * scale, p.difference * scale, p.length, letter)
    };
    let mut per_letter = vec![None; subst.alphabet_size()];
    for p in base.per_letter.iter().flatten() {
        let lifted = lift(p)?;
        per_letter[lifted.letter.index()] = Some(lifted);
    }
    Ok(ScanReport {
        d: base.d * scale,
        length: base.length,
        witness: lift(&base.witness)?,
        per_letter,
        // the lifted word prefix the reduced scan stands for
        prefix_scanned: base.prefix_scanned.saturating_mul(scale),
        stable: base.stable,
    })
}

/// A closed-form value of `A(Qⁿ ± 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    Exact(u64),
    AtMost(u64),
}

impl ClosedForm {
    pub fn value(self) -> u64 {
        match self {
            ClosedForm::Exact(v) | ClosedForm::AtMost(v) => v,
        }
    }

    pub fn admits(self, observed: u64) -> bool {
        match self {
            ClosedForm::Exact(v) => observed == v,
            ClosedForm::AtMost(v) => observed <= v,
        }
    }
}

/// Known values of `A_{p,q}(Qⁿ ± 1)` (Thue–Morse is `p = q = 1`).
///
/// * plus, `n > 1`: `Qⁿ+Q` if `p = q = 1`; `Qⁿ+Q-1` if exactly one of `p, q`
///   is 1; `Qⁿ+Q-2` otherwise.
/// * minus, `p = q`, `n > 1`: `Qⁿ` for odd `n`; for even `n`, `Qⁿ+Q+2` if
///   `p = 1` and `Qⁿ+Q` otherwise.
/// * minus, `p ≠ q`, `n > 2`: at most `Qⁿ`.
pub fn closed_form(family: Family, n: u32, kind: Kind) -> Result<ClosedForm> {
    let (p, q) = family.pq();
    let big_q = p + q;
    let qn = checked_pow(big_q, n)?;
    match kind {
        Kind::Plus => {
            if n < 2 {
                return Err(Error::OutsideHypotheses(format!("A({big_q}^{n}+1) needs n > 1")));
            }
            let extra = match (p, q) {
                (1, 1) => big_q,
                (1, _) | (_, 1) => big_q - 1,
                _ => big_q - 2,
            };
            Ok(ClosedForm::Exact(qn + extra))
        }
        Kind::Minus if p == q => {
            if n < 2 {
                return Err(Error::OutsideHypotheses(format!("A({big_q}^{n}-1) needs n > 1")));
            }
            Ok(ClosedForm::Exact(match (n % 2, p) {
                (1, _) => qn,
                (_, 1) => qn + big_q + 2,
                _ => qn + big_q,
            }))
        }
        Kind::Minus => {
            if n < 3 {
                return Err(Error::OutsideHypotheses(format!(
                    "upper bound for A_{{{p},{q}}}({big_q}^{n}-1) needs n > 2"
                )));
            }
            Ok(ClosedForm::AtMost(qn))
        }
    }
}

/// Prefix searched for the first occurrence of each bordering context.
const CONTEXT_SEARCH: u64 = 1 << 16;

/// Constructs a long progression of difference `Qⁿ ± 1` along a diagonal of
/// an occurrence of `θ^{2n}(a)`, then extends it greedily in both directions.
///
/// Every bordering context `x a y` (a three-letter factor) is tried at its
/// first occurrence in the fixed point; the longest result is returned.
pub fn witness(family: Family, n: u32, kind: Kind) -> Result<Progression> {
    let (p, q) = family.pq();
    if n == 0 {
        return Err(Error::OutsideHypotheses("witness needs n >= 1".into()));
    }
    if kind == Kind::Minus && p != q {
        return Err(Error::OutsideHypotheses(format!(
            "anti-diagonal witness needs p = q (got p={p}, q={q})"
        )));
    }
    let big_q = p + q;
    let qn = checked_pow(big_q, n)?;
    let level = checked_pow(big_q, 2 * n)?;
    let d = kind.difference(big_q, n)?;
    let ws = family.source(Letter::ZERO)?;
    let subst = ws.substitution();

    let contexts = lang::factors(subst, 3)?;
    let prefix = ws.prefix(CONTEXT_SEARCH);
    let mut best: Option<Progression> = None;
    for context in contexts.iter() {
        let j = prefix
            .windows(3)
            .position(|win| win == context)
            .map(|i| i as u64 + 1)
            .ok_or_else(|| Error::Internal(format!("context {context:?} not found in prefix")))?;
        let a = context[1];
        let offset = j
            .checked_mul(level)
            .filter(|o| o.checked_add(2 * level).is_some_and(|e| e <= MAX_INDEX))
            .ok_or_else(|| Error::InvalidParameter(format!("superword of level {} out of index range", 2 * n)))?;
        // Base run inside θ^{2n}(a): the main diagonal (row m, column m) or
        // the anti-diagonal (row m, column Qⁿ-1-m).
        let (start, letter) = match kind {
            Kind::Plus => (offset, a),
            Kind::Minus => (offset + qn - 1, subst.superword_letter(a, 2 * n, qn - 1)),
        };
        let base = Progression::verified(&ws, start, d, qn, letter)?;
        let extended = extend(&ws, base, qn + 64)?;
        if best.is_none_or(|b| extended.length > b.length) {
            best = Some(extended);
        }
    }
    let best = best.ok_or_else(|| Error::Internal("no three-letter contexts".into()))?;
    best.verify(&ws)?;
    Ok(best)
}

fn extend(ws: &WordSource, base: Progression, limit: u64) -> Result<Progression> {
    let Progression {
        mut start,
        difference: d,
        mut length,
        letter,
    } = base;
    while start >= d && ws.letter_at(start - d) == letter {
        start -= d;
        length += 1;
        if length > limit {
            return Err(Error::Internal("progression did not terminate".into()));
        }
    }
    while ws.letter_at(start + length * d) == letter {
        length += 1;
        if length > limit {
            return Err(Error::Internal("progression did not terminate".into()));
        }
    }
    Ok(Progression {
        start,
        difference: d,
        length,
        letter,
    })
}

/// One checked claim about a small difference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub d: u64,
    pub claim: Claim,
    pub observed: u64,
    pub stable: bool,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// Odd `d > 1` in Thue–Morse: `A(d) >= 3`.
    AtLeastThree,
    /// Thue–Morse: `A(d) = 2` exactly on powers of two.
    TwoIffPowerOfTwo { power_of_two: bool },
    /// `A(d) <= bound` under one of the upper-bound lemmas.
    AtMost { bound: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactsOptions {
    /// Differences `1..=bound` are examined (at most 1024).
    pub bound: u64,
    /// Upper-bound claims are certified by stable scans for `d <= certify_limit`.
    pub certify_limit: u64,
    /// Prefix used for the lower-bound claims.
    pub lower_prefix: u64,
    pub estimate: EstimateOptions,
}

impl Default for FactsOptions {
    fn default() -> Self {
        FactsOptions {
            bound: 1024,
            certify_limit: DEFAULT_CERTIFY_LIMIT,
            lower_prefix: 1 << 18,
            estimate: EstimateOptions::default(),
        }
    }
}

/// Upper bound `Qⁿ` for `d = Qⁿ - k` from the bound lemmas, if any applies.
///
/// Thue–Morse: `k` odd with `0 < k < 2^{n-1}` and `n` odd, or `2 < k < 2^{n-1}`
/// and `n > 1`. Generalised with `Q` prime: `Q < k < Q^{n-1}`, or
/// `1 < k < Q^{n-1}` when `min(p, q) = 1`.
pub fn upper_bound_lemma(family: Family, d: u64) -> Option<u64> {
    let (p, q) = family.pq();
    let big_q = p + q;
    let mut qn = big_q;
    let mut n = 1u32;
    while qn <= d {
        qn = qn.checked_mul(big_q)?;
        n += 1;
    }
    // Now Q^{n-1} <= d < Q^n, and only Q^n - k with k < Q^{n-1} can qualify.
    let k = qn - d;
    let lower = qn / big_q;
    if k >= lower {
        return None;
    }
    let applies = if big_q == 2 {
        k % 2 == 1 && ((n % 2 == 1 && k >= 1) || (n > 1 && k > 2))
    } else if is_prime(big_q) {
        n > 1 && (k > big_q || (p.min(q) == 1 && k > 1))
    } else {
        false
    };
    applies.then_some(qn)
}

pub(crate) fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|f| f * f <= x).all(|f| !x.is_multiple_of(f))
}

/// Checks the small-difference lemmas by scanning.
///
/// Thue–Morse: `A(d) >= 3` for odd `d > 1`, `A(d) = 2` exactly on powers of
/// two, and the `2ⁿ - k` upper bounds. Generalised families: the prime-`Q`
/// upper bounds. Lower-bound claims use a fixed prefix; upper-bound claims use
/// [`estimate`] and are limited to `d <= certify_limit`.
pub fn small_d_facts(family: Family, options: FactsOptions) -> Result<Vec<Fact>> {
    if options.bound > 1024 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive bound {} exceeds 1024",
            options.bound
        )));
    }
    let ws = family.source(Letter::ZERO)?;
    let prefix = options.lower_prefix.max(options.bound + 1);
    let mut tasks: Vec<(u64, Claim)> = Vec::new();
    for d in 1..=options.bound {
        if family == Family::ThueMorse {
            tasks.push((
                d,
                Claim::TwoIffPowerOfTwo {
                    power_of_two: d.is_power_of_two(),
                },
            ));
            if d > 1 && d % 2 == 1 {
                tasks.push((d, Claim::AtLeastThree));
            }
        }
        if d <= options.certify_limit {
            if let Some(bound) = upper_bound_lemma(family, d) {
                tasks.push((d, Claim::AtMost { bound }));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(d, claim)| {
            let (observed, stable) = match claim {
                Claim::AtMost { .. } => {
                    let r = estimate(&ws, d, options.estimate)?;
                    (r.length, r.stable)
                }
                _ => (longest_ap(&ws, d, prefix)?.length, false),
            };
            let holds = match claim {
                Claim::AtLeastThree => observed >= 3,
                Claim::TwoIffPowerOfTwo { power_of_two } => (observed == 2) == power_of_two,
                Claim::AtMost { bound } => observed <= bound,
            };
            Ok(Fact {
                d,
                claim,
                observed,
                stable,
                holds,
            })
        })
        .collect()
}
