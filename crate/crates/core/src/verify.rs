//! Reproduction suites: scans and witnesses compared against the closed forms.
//!
//! Every expectation comes from [`closed_form`], a bound lemma, or a yes/no
//! claim encoded as `0`/`1`. Budgets (`max_prefix`, `max_seconds`) never turn
//! a failure into a pass: a case that runs out of budget falls back to its
//! witness, or is reported unchecked, and carries the `downgraded` marker.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ap::{
    auto_prefix, closed_form, estimate, is_prime, small_d_facts, witness, Claim, ClosedForm, EstimateOptions,
    FactsOptions, Family, Kind, RangePolicy, DEFAULT_CERTIFY_LIMIT, DEFAULT_PREFIX_CAP,
};
use crate::bijective::{cna_counts, diagonal_ap_check, find_positive_cna, random_binary_bijective};
use crate::block::{block_iterate, check_block_lemmas, Grid, InflatedGrid};
use crate::error::{Error, Result};
use crate::lang::{contains, max_run, power_free_check, PowerMode};
use crate::subst::{Letter, Substitution, Word};
use crate::word::{gtm_letter, tm_letter, WordSource};

/// The generalised pairs covered by default.
pub const DEFAULT_PAIRS: [(u32, u32); 6] = [(1, 2), (2, 1), (2, 2), (1, 3), (2, 3), (3, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TmOlga,
    TmPlus,
    Gtm,
    Bounds,
    Blocks,
    Language,
    Bijective,
    Invariance,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::TmOlga,
        Suite::TmPlus,
        Suite::Gtm,
        Suite::Bounds,
        Suite::Blocks,
        Suite::Language,
        Suite::Bijective,
        Suite::Invariance,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TmOlga => "tm-olga",
            Suite::TmPlus => "tm-plus",
            Suite::Gtm => "gtm",
            Suite::Bounds => "bounds",
            Suite::Blocks => "blocks",
            Suite::Language => "language",
            Suite::Bijective => "bijective",
            Suite::Invariance => "invariance",
            Suite::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// What a case is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Exact(u64),
    AtMost(u64),
    AtLeast(u64),
}

impl Expectation {
    pub fn admits(self, observed: u64) -> bool {
        match self {
            Expectation::Exact(v) => observed == v,
            Expectation::AtMost(v) => observed <= v,
            Expectation::AtLeast(v) => observed >= v,
        }
    }

    fn holds(claim: bool) -> Self {
        Expectation::Exact(claim as u64)
    }
}

impl From<ClosedForm> for Expectation {
    fn from(form: ClosedForm) -> Self {
        match form {
            ClosedForm::Exact(v) => Expectation::Exact(v),
            ClosedForm::AtMost(v) => Expectation::AtMost(v),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Exact(v) => write!(f, "= {v}"),
            Expectation::AtMost(v) => write!(f, "<= {v}"),
            Expectation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub params: String,
    pub expected: Expectation,
    /// `None` when the case was skipped for lack of budget.
    pub observed: Option<u64>,
    /// Scan stability, for cases decided by [`estimate`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    pub pass: bool,
    pub downgraded: bool,
}

impl Case {
    fn checked(params: String, expected: Expectation, observed: u64) -> Self {
        Case {
            params,
            expected,
            observed: Some(observed),
            stable: None,
            pass: expected.admits(observed),
            downgraded: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: Vec<Case>,
    pub runtime_seconds: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn downgraded(&self) -> usize {
        self.cases.iter().filter(|c| c.downgraded).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Levels `n` for the closed-form suites; each suite has its own default.
    pub levels: Option<(u32, u32)>,
    pub pairs: Vec<(u32, u32)>,
    /// Scans stop at this prefix length.
    pub max_prefix: Option<u64>,
    /// Cases started after this many seconds run in witness-only mode.
    pub max_seconds: Option<f64>,
    /// Seed for the random rules of the bijective suite.
    pub rng_seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            levels: None,
            pairs: DEFAULT_PAIRS.to_vec(),
            max_prefix: None,
            max_seconds: None,
            rng_seed: 2024,
        }
    }
}

struct Budget {
    cap: u64,
    deadline: Option<Instant>,
}

impl Budget {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions::with_cap(self.cap)
    }
}

pub fn run_suite(suite: Suite, options: &SuiteOptions) -> Result<SuiteResult> {
    let started = Instant::now();
    let budget = Budget {
        cap: options.max_prefix.unwrap_or(DEFAULT_PREFIX_CAP),
        deadline: options
            .max_seconds
            .map(|s| started + Duration::from_secs_f64(s.max(0.0))),
    };
    let cases = match suite {
        Suite::TmOlga => tm_olga(options, &budget)?,
        Suite::TmPlus => tm_plus(options, &budget)?,
        Suite::Gtm => gtm(options, &budget)?,
        Suite::Bounds => bounds(options, &budget)?,
        Suite::Blocks => blocks(options)?,
        Suite::Language => language(options)?,
        Suite::Bijective => bijective(options)?,
        Suite::Invariance => invariance(options, &budget)?,
        Suite::Oracle => oracle(options)?,
    };
    Ok(SuiteResult {
        name: suite.name().to_owned(),
        cases,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

fn levels(options: &SuiteOptions, default: (u32, u32)) -> Result<Vec<u32>> {
    let (lo, hi) = options.levels.unwrap_or(default);
    if lo < 2 {
        return Err(Error::OutsideHypotheses(format!(
            "levels must start at n >= 2 (got {lo})"
        )));
    }
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty level range {lo}..={hi}")));
    }
    Ok((lo..=hi).collect())
}

fn generalised_families(options: &SuiteOptions) -> Result<Vec<Family>> {
    options.pairs.iter().map(|&(p, q)| Family::generalised(p, q)).collect()
}

/// `A(Qⁿ ± 1)` by a stable scan; falls back to the witness when the budget
/// runs out or the scan is not stable within the prefix cap.
fn closed_form_case(family: Family, n: u32, kind: Kind, budget: &Budget) -> Result<Case> {
    let expected: Expectation = closed_form(family, n, kind)?.into();
    let d = kind.difference(family.q(), n)?;
    let params = format!("family={family} n={n} kind={kind} d={d}");
    let has_witness = kind == Kind::Plus || family.pq().0 == family.pq().1;
    let fallback = |observed: Option<u64>| -> Result<Case> {
        if has_witness {
            let w = witness(family, n, kind)?;
            return Ok(Case {
                params: params.clone(),
                expected,
                observed: Some(w.length),
                stable: None,
                pass: expected.admits(w.length),
                downgraded: true,
            });
        }
        Ok(Case {
            params: params.clone(),
            expected,
            observed,
            stable: observed.map(|_| false),
            pass: observed.is_none_or(|o| expected.admits(o)),
            downgraded: true,
        })
    };
    if budget.expired() || budget.cap <= d {
        return fallback(None);
    }
    let ws = family.source(Letter::ZERO)?;
    let report = estimate(&ws, d, budget.estimate_options())?;
    if !report.stable {
        return fallback(Some(report.length));
    }
    Ok(Case {
        params,
        expected,
        observed: Some(report.length),
        stable: Some(true),
        pass: expected.admits(report.length),
        downgraded: false,
    })
}

fn witness_case(family: Family, n: u32, kind: Kind) -> Result<Case> {
    let expected: Expectation = closed_form(family, n, kind)?.into();
    let w = witness(family, n, kind)?;
    Ok(Case::checked(
        format!("witness family={family} n={n} kind={kind} d={}", w.difference),
        expected,
        w.length,
    ))
}

fn tm_olga(options: &SuiteOptions, budget: &Budget) -> Result<Vec<Case>> {
    let tm = Family::ThueMorse;
    let levels = levels(options, (2, 8))?;
    let mut cases: Vec<Case> = levels
        .par_iter()
        .map(|&n| closed_form_case(tm, n, Kind::Minus, budget))
        .collect::<Result<_>>()?;
    let witnesses: Vec<Case> = levels
        .par_iter()
        .map(|&n| witness_case(tm, n, Kind::Minus))
        .collect::<Result<_>>()?;
    cases.extend(witnesses);
    // max over d < 2ⁿ is attained at 2ⁿ - 1
    let ws = tm.source(Letter::ZERO)?;
    for &n in levels.iter().filter(|&&n| n <= 6) {
        let expected: Expectation = closed_form(tm, n, Kind::Minus)?.into();
        let params = format!("max over d < 2^{n}");
        if budget.expired() {
            cases.push(Case {
                params,
                expected,
                observed: None,
                stable: None,
                pass: true,
                downgraded: true,
            });
            continue;
        }
        let policy = RangePolicy {
            estimate: budget.estimate_options(),
            reduce: false,
        };
        let reports = crate::ap::scan_range(&ws, (1u64 << n) - 1, policy)?;
        let max = reports.iter().map(|r| r.length).max().unwrap_or(0);
        let at_top = reports.last().map(|r| r.length);
        let stable = reports.iter().all(|r| r.stable);
        let mut case = Case::checked(params, expected, max);
        case.stable = Some(stable);
        if stable {
            case.pass &= at_top == Some(max);
        } else {
            // lower bounds only: a shortfall proves nothing, an excess does
            case.downgraded = true;
            case.pass = max <= expected_value(expected);
        }
        cases.push(case);
    }
    Ok(cases)
}

fn expected_value(e: Expectation) -> u64 {
    match e {
        Expectation::Exact(v) | Expectation::AtMost(v) | Expectation::AtLeast(v) => v,
    }
}

fn tm_plus(options: &SuiteOptions, budget: &Budget) -> Result<Vec<Case>> {
    let tm = Family::ThueMorse;
    let levels = levels(options, (2, 8))?;
    let top = *levels.last().expect("non-empty levels");
    let mut cases: Vec<Case> = levels
        .par_iter()
        .map(|&n| closed_form_case(tm, n, Kind::Plus, budget))
        .collect::<Result<_>>()?;
    // larger levels are certified from below only
    let witnesses: Vec<Case> = (2..=top.max(16))
        .into_par_iter()
        .map(|n| witness_case(tm, n, Kind::Plus))
        .collect::<Result<_>>()?;
    cases.extend(witnesses);
    Ok(cases)
}

fn gtm(options: &SuiteOptions, budget: &Budget) -> Result<Vec<Case>> {
    let levels = levels(options, (2, 3))?;
    let mut tasks = Vec::new();
    for family in generalised_families(options)? {
        let (p, q) = family.pq();
        for &n in &levels {
            tasks.push((family, n, Kind::Plus));
            // the p ≠ q bound is only claimed for n > 2
            if p == q || n > 2 {
                tasks.push((family, n, Kind::Minus));
            }
        }
    }
    let mut cases: Vec<Case> = tasks
        .par_iter()
        .map(|&(family, n, kind)| closed_form_case(family, n, kind, budget))
        .collect::<Result<_>>()?;
    let witnesses: Vec<Case> = tasks
        .par_iter()
        .filter(|(family, _, kind)| *kind == Kind::Plus || family.pq().0 == family.pq().1)
        .map(|&(family, n, kind)| witness_case(family, n, kind))
        .collect::<Result<_>>()?;
    cases.extend(witnesses);
    Ok(cases)
}

fn bounds(options: &SuiteOptions, budget: &Budget) -> Result<Vec<Case>> {
    let mut facts_options = FactsOptions {
        estimate: budget.estimate_options(),
        ..FactsOptions::default()
    };
    facts_options.lower_prefix = facts_options.lower_prefix.min(budget.cap);
    let mut families = vec![Family::ThueMorse];
    // only a prime Q carries bound lemmas
    families.extend(generalised_families(options)?.into_iter().filter(|f| is_prime(f.q())));
    let mut cases = Vec::new();
    for family in families {
        if budget.expired() {
            cases.push(Case {
                params: format!("family={family} small differences"),
                expected: Expectation::Exact(0),
                observed: None,
                stable: None,
                pass: true,
                downgraded: true,
            });
            continue;
        }
        let options = FactsOptions {
            bound: if family == Family::ThueMorse {
                1024
            } else {
                DEFAULT_CERTIFY_LIMIT
            },
            ..facts_options
        };
        for fact in small_d_facts(family, options)? {
            let (claim, expected) = match fact.claim {
                Claim::AtLeastThree => ("odd", Expectation::AtLeast(3)),
                Claim::TwoIffPowerOfTwo { power_of_two: true } => ("power of two", Expectation::Exact(2)),
                Claim::TwoIffPowerOfTwo { power_of_two: false } => ("not a power of two", Expectation::AtLeast(3)),
                Claim::AtMost { bound } => ("bound lemma", Expectation::AtMost(bound)),
            };
            let mut case = Case::checked(format!("family={family} d={} {claim}", fact.d), expected, fact.observed);
            if let Claim::AtMost { .. } = fact.claim {
                // an unstable scan cannot certify an upper bound
                case.stable = Some(fact.stable);
                case.downgraded = !fact.stable;
            }
            cases.push(case);
        }
    }
    Ok(cases)
}

fn blocks(options: &SuiteOptions) -> Result<Vec<Case>> {
    let mut tasks: Vec<(Family, u32)> = (1..=5).map(|n| (Family::ThueMorse, n)).collect();
    for family in generalised_families(options)? {
        tasks.extend((1..=3).map(|n| (family, n)));
    }
    let cases: Vec<Vec<Case>> = tasks
        .par_iter()
        .map(|&(family, n)| {
            let s = family.substitution();
            let mut out = Vec::new();
            for a in [Letter::ZERO, Letter::ONE] {
                let report = check_block_lemmas(&s, a, n)?;
                out.push(Case::checked(
                    format!("family={family} n={n} a={a} lemmas"),
                    Expectation::holds(true),
                    report.passed() as u64,
                ));
                let block = block_iterate(&s, a, n)?;
                let inflated = InflatedGrid::new(&s, a, n);
                let side = block.side();
                let same = (0..side).all(|r| (0..side).all(|c| block.cell(r, c) == inflated.cell(r, c)));
                out.push(Case::checked(
                    format!("family={family} n={n} a={a} row read"),
                    Expectation::holds(true),
                    same as u64,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(cases.into_iter().flatten().collect())
}

fn language(options: &SuiteOptions) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for &(p, q) in options.pairs.iter().filter(|(p, q)| p != q) {
        let own = Substitution::generalised(p as usize, q as usize)?;
        let mirror = Substitution::generalised(q as usize, p as usize)?;
        for a in [Letter::ZERO, Letter::ONE] {
            let b = a.bar();
            let repeat = |l: Letter, k: u32| std::iter::repeat_n(l, k as usize);
            let first: Vec<Letter> = std::iter::once(b).chain(repeat(a, p)).chain(repeat(b, q + 1)).collect();
            let second: Vec<Letter> = repeat(b, p + 1).chain(repeat(a, q)).chain(std::iter::once(b)).collect();
            for (label, word) in [("b a^p b^(q+1)", &first), ("b^(p+1) a^q b", &second)] {
                for (rule, s, claim) in [((p, q), &own, true), ((q, p), &mirror, false)] {
                    cases.push(Case::checked(
                        format!("pq:{},{} contains {label} (a={a})", rule.0, rule.1),
                        Expectation::holds(claim),
                        contains(s, word)? as u64,
                    ));
                }
            }
        }
    }

    let tm = WordSource::thue_morse(Letter::ZERO)?;
    let overlap = power_free_check(&tm, PowerMode::Overlap, 1_000_000)?;
    cases.push(Case::checked(
        "tm overlap-free prefix 10^6".into(),
        Expectation::holds(true),
        overlap.free as u64,
    ));
    let checks: Vec<Vec<Case>> = options
        .pairs
        .par_iter()
        .map(|&(p, q)| {
            let ws = WordSource::generalised(p as usize, q as usize, Letter::ZERO)?;
            let big_q = p + q;
            let free = power_free_check(&ws, PowerMode::Exponent(big_q + 1), 100_000)?;
            let sharp = power_free_check(&ws, PowerMode::Exponent(big_q), 100_000)?;
            Ok(vec![
                Case::checked(
                    format!("pq:{p},{q} {}-power-free prefix 10^5", big_q + 1),
                    Expectation::holds(true),
                    free.free as u64,
                ),
                Case::checked(
                    format!("pq:{p},{q} contains a {big_q}-power"),
                    Expectation::holds(true),
                    sharp.violation.is_some() as u64,
                ),
            ])
        })
        .collect::<Result<_>>()?;
    cases.extend(checks.into_iter().flatten());
    Ok(cases)
}

const CNA_PREFIX: u64 = 100_000;
const CNA_SEARCH: u64 = 20;

fn bijective(options: &SuiteOptions) -> Result<Vec<Case>> {
    let mut rules: Vec<(String, Substitution)> = vec![("tm".into(), Substitution::thue_morse())];
    for family in generalised_families(options)? {
        rules.push((family.to_string(), family.substitution()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.rng_seed);
    for i in 0..20 {
        let s = random_binary_bijective(&mut rng, 3)?;
        let name = format!(
            "random#{i} {}/{}",
            Word::from(s.image(Letter::ZERO)),
            Word::from(s.image(Letter::ONE))
        );
        rules.push((name, s));
    }
    let mut cases: Vec<Case> = rules
        .par_iter()
        .map(|(name, s)| {
            let mut ok = true;
            for n in 1..=4 {
                for a in [Letter::ZERO, Letter::ONE] {
                    ok &= diagonal_ap_check(s, a, n)?;
                }
            }
            Ok(Case::checked(
                format!("{name} diagonal n<=4"),
                Expectation::holds(true),
                ok as u64,
            ))
        })
        .collect::<Result<_>>()?;

    let cyclic = Substitution::from_strs(&["012", "120", "201"])?;
    let sources = [
        ("tm", WordSource::thue_morse(Letter::ZERO)?),
        ("pq:1,2", WordSource::generalised(1, 2, Letter::ZERO)?),
        ("cyclic 012/120/201", WordSource::new(cyclic, Letter::ZERO)?),
    ];
    for (name, ws) in &sources {
        let s = ws.substitution();
        let k = max_run(s)? as u64;
        let found = find_positive_cna(ws, k, CNA_SEARCH, CNA_PREFIX)?;
        cases.push(Case::checked(
            format!("{name} positive run set, k={k}, n<={CNA_SEARCH}"),
            Expectation::holds(true),
            found.is_some() as u64,
        ));
        let Some((n, _)) = found else { continue };
        // images of θ and its powers contain every letter here
        let q = s.length() as u64;
        for m in 1..=2u32 {
            let counts = cna_counts(ws, q.pow(m) * n, k, CNA_PREFIX)?;
            cases.push(Case::checked(
                format!("{name} transfer to n={}", q.pow(m) * n),
                Expectation::holds(true),
                counts.iter().all(|&c| c > 0) as u64,
            ));
        }
        let mut reduction = true;
        for n_small in 1..=CNA_SEARCH {
            for m in 1..=2u32 {
                let big = q.pow(m) * n_small;
                if k * big >= CNA_PREFIX {
                    continue;
                }
                if cna_counts(ws, big, k, CNA_PREFIX)?.iter().any(|&c| c > 0) {
                    reduction &= cna_counts(ws, n_small, k, CNA_PREFIX)?.iter().any(|&c| c > 0);
                }
            }
        }
        cases.push(Case::checked(
            format!("{name} reduction n <= {CNA_SEARCH}"),
            Expectation::holds(true),
            reduction as u64,
        ));
    }
    Ok(cases)
}

/// Largest difference and power exponent of the invariance suite.
const INVARIANCE_D: u64 = 65;
const INVARIANCE_S: u32 = 3;

fn invariance(options: &SuiteOptions, budget: &Budget) -> Result<Vec<Case>> {
    let mut families = vec![Family::ThueMorse];
    families.extend(generalised_families(options)?);
    let mut tasks = Vec::new();
    for family in families {
        for d in 1..=INVARIANCE_D {
            tasks.push((family, d));
        }
    }
    let cases: Vec<Vec<Case>> = tasks
        .par_iter()
        .map(|&(family, d)| invariance_cases(family, d, budget))
        .collect::<Result<_>>()?;
    Ok(cases.into_iter().flatten().collect())
}

fn invariance_cases(family: Family, d: u64, budget: &Budget) -> Result<Vec<Case>> {
    let ws = family.source(Letter::ZERO)?;
    let q = family.q();
    let base = estimate(&ws, d, budget.estimate_options())?;
    let mut out = Vec::new();
    for s in 1..=INVARIANCE_S {
        let scale = q.pow(s);
        let params = format!("family={family} d={d} s={s}");
        // the scaled prefix covers the same superword blocks as the base scan
        let initial = scale.saturating_mul(auto_prefix(d));
        if budget.expired() || initial.saturating_mul(2) > budget.cap {
            out.push(Case {
                params,
                expected: Expectation::Exact(base.length),
                observed: None,
                stable: None,
                pass: true,
                downgraded: true,
            });
            continue;
        }
        let options = EstimateOptions {
            initial_prefix: Some(initial),
            cap: budget.cap,
        };
        let scaled = estimate(&ws, scale * d, options)?;
        let mut case = Case::checked(params, Expectation::Exact(base.length), scaled.length);
        case.stable = Some(base.stable && scaled.stable);
        case.pass &= case.stable == Some(true);
        out.push(case);
    }
    Ok(out)
}

const ORACLE_RANGE: u64 = 100_000;

fn oracle(options: &SuiteOptions) -> Result<Vec<Case>> {
    let mut families = vec![Family::ThueMorse];
    families.extend(generalised_families(options)?);
    let mut tasks = Vec::new();
    for family in families {
        for seed in [Letter::ZERO, Letter::ONE] {
            tasks.push((family, seed));
        }
    }
    tasks
        .par_iter()
        .map(|&(family, seed)| {
            let ws = family.source(seed)?;
            let prefix = ws.prefix(ORACLE_RANGE);
            let (p, q) = family.pq();
            let mismatches = (0..ORACLE_RANGE)
                .filter(|&i| {
                    let closed = match family {
                        Family::ThueMorse => Letter(tm_letter(i).0 ^ seed.0),
                        Family::Generalised { .. } => gtm_letter(p, q, i, seed),
                    };
                    let indexed = ws.letter_at(i);
                    closed != indexed || indexed != prefix[i as usize]
                })
                .count();
            Ok(Case::checked(
                format!("family={family} seed={seed} indices < {ORACLE_RANGE}"),
                Expectation::Exact(0),
                mismatches as u64,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn level_one_is_rejected() {
        let options = SuiteOptions {
            levels: Some((1, 3)),
            ..SuiteOptions::default()
        };
        assert!(matches!(
            run_suite(Suite::TmOlga, &options),
            Err(Error::OutsideHypotheses(_))
        ));
    }

    #[test]
    fn small_olga_run() {
        let options = SuiteOptions {
            levels: Some((2, 4)),
            ..SuiteOptions::default()
        };
        let r = run_suite(Suite::TmOlga, &options).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.downgraded(), 0);
    }

    #[test]
    fn tight_prefix_downgrades_to_witness() {
        let options = SuiteOptions {
            levels: Some((6, 6)),
            max_prefix: Some(1 << 12),
            ..SuiteOptions::default()
        };
        let r = run_suite(Suite::TmOlga, &options).unwrap();
        let case = &r.cases[0];
        assert!(case.downgraded);
        assert_eq!(case.observed, Some(68));
        assert!(case.pass);
    }

    #[test]
    fn expired_budget_skips_scans() {
        let options = SuiteOptions {
            levels: Some((2, 3)),
            pairs: vec![(2, 1)],
            max_seconds: Some(0.0),
            ..SuiteOptions::default()
        };
        let r = run_suite(Suite::Gtm, &options).unwrap();
        // n=3 minus for p ≠ q has no witness: skipped, not passed silently
        let bound = r.cases.iter().find(|c| c.params.contains("n=3 kind=minus")).unwrap();
        assert!(bound.downgraded);
        assert_eq!(bound.observed, None);
        assert!(r.cases.iter().all(|c| c.downgraded || c.params.starts_with("witness")));
    }
}
