use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use apword::ap::{self, closed_form, estimate, witness, ClosedForm, EstimateOptions, RangePolicy};
use apword::bijective::{absence_check, cna_frequency, diagonal_ap_check, find_positive_cna};
use apword::block::{block_iterate, check_block_lemmas, render, RenderFormat};
use apword::lang::{self, power_free_check, PowerMode};
use apword::spec_file::load_spec;
use apword::table::{write_table, TableFormat, TableRow};
use apword::verify::{run_suite, Suite, SuiteOptions};
use apword::{Family, Kind, Letter, Substitution, WordSource};

#[derive(Parser, Debug)]
#[command(
    name = "apword",
    version,
    about = "Monochromatic arithmetic progressions in Thue–Morse type words"
)]
struct Cli {
    /// Substitution: `tm`, `pq:P,Q` or `spec:FILE`.
    #[arg(long, global = true, default_value = "tm")]
    subst: SubstArg,

    /// Seed letter of the fixed point (name for spec files, index otherwise).
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; the accepted values depend on the subcommand.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Largest prefix any scan may read.
    #[arg(long, global = true, env = "APWORD_MAX_PREFIX")]
    max_prefix: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a prefix of the fixed point.
    Word {
        #[arg(long)]
        len: u64,
    },
    /// Print the letter at one index.
    Letter {
        #[arg(long)]
        index: u64,
    },
    /// Longest monochromatic progression of one difference.
    Ap {
        #[arg(short)]
        d: u64,
        /// Scan exactly this prefix instead of the doubling estimate.
        #[arg(long, conflicts_with = "auto")]
        prefix: Option<u64>,
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        per_letter: bool,
        /// Compare against the closed form when `d = Qⁿ ± 1`.
        #[arg(long)]
        check: bool,
    },
    /// Estimates for every difference up to `--d-max`.
    Scan {
        #[arg(long)]
        d_max: u64,
        /// Scan `d / Q^s` and lift the witness back.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        check: bool,
    },
    /// Constructive progression of difference `Qⁿ ± 1`.
    Witness {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        check: bool,
    },
    /// Estimates at `d = Qⁿ ± 1` next to the closed forms.
    Table {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        /// Only one kind; both by default.
        #[arg(long)]
        kind: Option<Kind>,
        #[arg(long)]
        check: bool,
    },
    /// Render a level-`n` block of the 2-D block substitution.
    Block {
        #[arg(long)]
        iters: u32,
        /// Run the block lemma checks instead of rendering.
        #[arg(long)]
        check: bool,
    },
    /// Factors of a given length, or membership of one word.
    Factors {
        #[arg(long, required_unless_present = "contains")]
        len: Option<usize>,
        #[arg(long)]
        contains: Option<String>,
    },
    /// Power-freeness of a prefix.
    Powerfree {
        /// `overlap` or an integer exponent.
        #[arg(long, default_value = "overlap")]
        mode: String,
        #[arg(long, default_value_t = 1 << 20)]
        prefix: u64,
    },
    /// Checks for bijective rules.
    Bij(BijArgs),
    /// Run reproduction suites.
    Verify {
        /// Suite names, or `all`.
        #[arg(default_value = "all")]
        suites: Vec<String>,
        /// Level range `LO..HI` for the closed-form suites.
        #[arg(long)]
        levels: Option<String>,
        /// Wall-clock budget per suite; cases past it are downgraded.
        #[arg(long)]
        max_seconds: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct BijArgs {
    /// Substitution file; overrides `--subst`.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    check: BijCheck,
    /// Letter (name or index).
    #[arg(long)]
    letter: Option<String>,
    #[arg(short, long)]
    n: Option<u64>,
    /// Run bound; the longest run of the language by default.
    #[arg(short, long)]
    k: Option<u64>,
    #[arg(short)]
    d: Option<u64>,
    #[arg(long)]
    min_length: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    prefix: u64,
    /// Search bound for `cna` without `-n`.
    #[arg(long, default_value_t = 20)]
    n_max: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BijCheck {
    Diagonal,
    Cna,
    Absence,
}

#[derive(Clone, Debug)]
enum SubstArg {
    Family(Family),
    Spec(PathBuf),
}

impl FromStr for SubstArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("spec:") {
            Some(path) => Ok(SubstArg::Spec(path.into())),
            None => s
                .parse()
                .map(SubstArg::Family)
                .map_err(|e: apword::Error| e.to_string()),
        }
    }
}

/// The resolved substitution with its letter names.
struct Rule {
    family: Option<Family>,
    subst: Substitution,
    names: Vec<String>,
    seed: Letter,
}

impl Rule {
    fn resolve(arg: &SubstArg, seed: Option<&str>) -> Result<Rule> {
        let (family, subst, names, default_seed) = match arg {
            SubstArg::Family(f) => (Some(*f), f.substitution(), vec!["0".into(), "1".into()], None),
            SubstArg::Spec(path) => {
                let spec = load_spec(path).with_context(|| format!("loading {}", path.display()))?;
                (None, spec.substitution, spec.names, spec.seed)
            }
        };
        let mut rule = Rule {
            family,
            subst,
            names,
            seed: Letter::ZERO,
        };
        rule.seed = match seed {
            Some(s) => rule.letter(s)?,
            None => default_seed.unwrap_or(Letter::ZERO),
        };
        Ok(rule)
    }

    fn letter(&self, name: &str) -> Result<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u8))
            .ok_or_else(|| anyhow!("unknown letter {name:?}"))
    }

    fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }

    fn spell(&self, word: &[Letter]) -> String {
        let sep = if self.names.iter().all(|n| n.chars().count() == 1) {
            ""
        } else {
            " "
        };
        word.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(sep)
    }

    fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        if text.contains(char::is_whitespace) {
            text.split_whitespace().map(|t| self.letter(t)).collect()
        } else {
            text.chars().map(|c| self.letter(&c.to_string())).collect()
        }
    }

    fn source(&self) -> Result<WordSource> {
        Ok(WordSource::new(self.subst.clone(), self.seed)?)
    }

    fn family(&self) -> Result<Family> {
        self.family
            .ok_or_else(|| anyhow!("this command needs --subst tm or pq:P,Q"))
    }
}

struct Ctx {
    cli_format: Option<String>,
    max_prefix: Option<u64>,
    out: Box<dyn Write>,
}

impl Ctx {
    fn format<T: FromStr>(&self, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match &self.cli_format {
            Some(f) => f.parse().map_err(|e| anyhow!("--format {f}: {e}")),
            None => Ok(default),
        }
    }

    fn prefix(&self, requested: u64) -> Result<u64> {
        match self.max_prefix {
            Some(cap) if requested > cap => {
                bail!("prefix {requested} exceeds APWORD_MAX_PREFIX / --max-prefix {cap}")
            }
            _ => Ok(requested),
        }
    }

    fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions::with_cap(self.max_prefix.unwrap_or(ap::DEFAULT_PREFIX_CAP))
    }

    fn json(&mut self, value: &serde_json::Value) -> Result<()> {
        serde_json::to_writer_pretty(&mut self.out, value)?;
        writeln!(self.out)?;
        Ok(())
    }
}

/// `d = Qⁿ ± 1` for some `n`, with its closed form if one is known.
fn closed_form_at(family: Family, d: u64) -> Option<(u32, Kind, ClosedForm)> {
    let q = family.q();
    let mut qn = q;
    let mut n = 1;
    while qn - 1 <= d {
        for kind in [Kind::Plus, Kind::Minus] {
            if kind.difference(q, n).ok() == Some(d) {
                if let Ok(form) = closed_form(family, n, kind) {
                    return Some((n, kind, form));
                }
            }
        }
        qn = qn.checked_mul(q)?;
        n += 1;
    }
    None
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns `false` when a `--check` comparison or a suite fails.
fn run(cli: Cli) -> Result<bool> {
    let out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let mut ctx = Ctx {
        cli_format: cli.format.clone(),
        max_prefix: cli.max_prefix,
        out,
    };
    let subst = match &cli.command {
        Command::Bij(BijArgs { spec: Some(path), .. }) => SubstArg::Spec(path.clone()),
        _ => cli.subst.clone(),
    };
    let rule = Rule::resolve(&subst, cli.seed.as_deref())?;
    let ok = dispatch(&cli.command, &rule, &mut ctx)?;
    ctx.out.flush()?;
    Ok(ok)
}

fn dispatch(command: &Command, rule: &Rule, ctx: &mut Ctx) -> Result<bool> {
    match command {
        Command::Word { len } => {
            let ws = rule.source()?;
            let word = ws.prefix(ctx.prefix(*len)?);
            writeln!(ctx.out, "{}", rule.spell(&word))?;
        }
        Command::Letter { index } => {
            let ws = rule.source()?;
            writeln!(ctx.out, "{}", rule.name(ws.letter_at(*index)))?;
        }
        Command::Ap {
            d,
            prefix,
            auto: _,
            per_letter,
            check,
        } => {
            let ws = rule.source()?;
            let report = match prefix {
                Some(n) => ap::scan_fixed(&ws, *d, ctx.prefix(*n)?)?,
                None => estimate(&ws, *d, ctx.estimate_options())?,
            };
            let mut value = json!({
                "d": report.d,
                "length": report.length,
                "start": report.witness.start,
                "letter": rule.name(report.witness.letter),
                "prefix_scanned": report.prefix_scanned,
                "stable": report.stable,
            });
            if *per_letter {
                value["per_letter"] = json!(report
                    .per_letter
                    .iter()
                    .enumerate()
                    .map(|(i, p)| json!({
                        "letter": rule.name(Letter(i as u8)),
                        "length": p.map(|p| p.length).unwrap_or(0),
                        "start": p.map(|p| p.start),
                    }))
                    .collect::<Vec<_>>());
            }
            let mut ok = true;
            if *check {
                let (_, _, form) =
                    closed_form_at(rule.family()?, *d).ok_or_else(|| anyhow!("no closed form for d = {d}"))?;
                ok = form.admits(report.length) && report.stable;
                value["expected"] = json!(form);
                value["pass"] = json!(ok);
            }
            ctx.json(&value)?;
            return Ok(ok);
        }
        Command::Scan { d_max, reduce, check } => {
            let ws = rule.source()?;
            let policy = RangePolicy {
                estimate: ctx.estimate_options(),
                reduce: *reduce,
            };
            let reports = ap::scan_range(&ws, *d_max, policy)?;
            let rows: Vec<TableRow> = reports
                .iter()
                .map(|r| {
                    let row = TableRow::from_report(r);
                    match rule.family.and_then(|f| closed_form_at(f, r.d)) {
                        Some((_, _, form)) => row.with_expectation(form),
                        None => row,
                    }
                })
                .collect();
            let format = ctx.format(TableFormat::Csv)?;
            write_table(&rows, format, &mut ctx.out)?;
            if *check {
                return Ok(rows.iter().all(|r| r.pass != Some(false)));
            }
        }
        Command::Witness { n, kind, check } => {
            let family = rule.family()?;
            let w = witness(family, *n, *kind)?;
            let mut value = json!(w);
            let mut ok = true;
            if *check {
                let form = closed_form(family, *n, *kind)?;
                ok = form.admits(w.length);
                value["expected"] = json!(form);
                value["pass"] = json!(ok);
            }
            ctx.json(&value)?;
            return Ok(ok);
        }
        Command::Table {
            n_min,
            n_max,
            kind,
            check,
        } => {
            let family = rule.family()?;
            let ws = family.source(Letter::ZERO)?;
            let kinds = match kind {
                Some(k) => vec![*k],
                None => vec![Kind::Plus, Kind::Minus],
            };
            let mut rows = Vec::new();
            for n in *n_min..=*n_max {
                for &kind in &kinds {
                    let Ok(form) = closed_form(family, n, kind) else {
                        continue;
                    };
                    let d = kind.difference(family.q(), n)?;
                    let report = estimate(&ws, d, ctx.estimate_options())?;
                    let mut row = TableRow::from_report(&report).with_expectation(form);
                    row.pass = row.pass.map(|p| p && report.stable);
                    rows.push(row);
                }
            }
            write_table(&rows, ctx.format(TableFormat::Csv)?, &mut ctx.out)?;
            if *check {
                return Ok(rows.iter().all(|r| r.pass == Some(true)));
            }
        }
        Command::Block { iters, check } => {
            if *check {
                let report = check_block_lemmas(&rule.subst, rule.seed, *iters)?;
                ctx.json(&json!(report))?;
                return Ok(report.passed());
            }
            let block = block_iterate(&rule.subst, rule.seed, *iters)?;
            let format = ctx.format(RenderFormat::Ascii)?;
            ctx.out.write_all(&render(&block, format))?;
        }
        Command::Factors { len, contains } => {
            if let Some(text) = contains {
                let word = rule.parse_word(text)?;
                let found = lang::contains(&rule.subst, &word)?;
                writeln!(ctx.out, "{found}")?;
                return Ok(true);
            }
            let len = len.expect("clap requires --len without --contains");
            let set = lang::factors(&rule.subst, len)?;
            if ctx.format(OutputKind::Text)? == OutputKind::Json {
                let words: Vec<String> = set.iter().map(|w| rule.spell(w)).collect();
                ctx.json(&json!({ "length": len, "count": set.len(), "factors": words }))?;
            } else {
                for w in set.iter() {
                    writeln!(ctx.out, "{}", rule.spell(w))?;
                }
            }
        }
        Command::Powerfree { mode, prefix } => {
            let mode = match mode.as_str() {
                "overlap" => PowerMode::Overlap,
                e => PowerMode::Exponent(e.parse().with_context(|| format!("power mode {e:?}"))?),
            };
            let ws = rule.source()?;
            let report = power_free_check(&ws, mode, ctx.prefix(*prefix)?)?;
            ctx.json(&json!(report))?;
        }
        Command::Bij(args) => return bij(args, rule, ctx),
        Command::Verify {
            suites,
            levels,
            max_seconds,
        } => return verify(suites, levels.as_deref(), *max_seconds, ctx),
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OutputKind {
    Text,
    Json,
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputKind::Text),
            "json" => Ok(OutputKind::Json),
            other => Err(format!("expected text or json, got {other:?}")),
        }
    }
}

fn bij(args: &BijArgs, rule: &Rule, ctx: &mut Ctx) -> Result<bool> {
    let letter = args.letter.as_deref().map(|l| rule.letter(l)).transpose()?;
    match args.check {
        BijCheck::Diagonal => {
            let n = args.n.ok_or_else(|| anyhow!("--check diagonal needs -n"))?;
            let n = u32::try_from(n)?;
            let letters = match letter {
                Some(a) => vec![a],
                None => vec![Letter::ZERO, Letter::ONE],
            };
            let mut results = Vec::new();
            for a in letters {
                let holds = diagonal_ap_check(&rule.subst, a, n)?;
                results.push(json!({ "letter": rule.name(a), "n": n, "holds": holds }));
            }
            let ok = results.iter().all(|r| r["holds"] == json!(true));
            ctx.json(&json!({ "check": "diagonal", "results": results, "pass": ok }))?;
            Ok(ok)
        }
        BijCheck::Cna => {
            let ws = rule.source()?;
            let k = match args.k {
                Some(k) => k,
                None => lang::max_run(&rule.subst)? as u64,
            };
            let prefix = ctx.prefix(args.prefix)?;
            match (args.n, letter) {
                (Some(n), Some(a)) => {
                    let e = cna_frequency(&ws, n, a, k, prefix)?;
                    ctx.json(&json!({
                        "check": "cna",
                        "n": e.n,
                        "letter": rule.name(e.a),
                        "k": e.k,
                        "count": e.count,
                        "prefix": e.prefix,
                        "frequency": e.frequency,
                    }))?;
                    Ok(true)
                }
                (None, None) => {
                    let found = find_positive_cna(&ws, k, args.n_max, prefix)?;
                    ctx.json(&json!({
                        "check": "cna",
                        "k": k,
                        "n_max": args.n_max,
                        "found": found.map(|(n, a)| json!({ "n": n, "letter": rule.name(a) })),
                    }))?;
                    Ok(found.is_some())
                }
                _ => bail!("--check cna takes both -n and --letter, or neither"),
            }
        }
        BijCheck::Absence => {
            let ws = rule.source()?;
            let d = args.d.ok_or_else(|| anyhow!("--check absence needs -d"))?;
            let min_length = args
                .min_length
                .ok_or_else(|| anyhow!("--check absence needs --min-length"))?;
            let prefix = ctx.prefix(args.prefix)?;
            let absent = absence_check(&ws, d, min_length, prefix)?;
            ctx.json(&json!({
                "check": "absence",
                "d": d,
                "min_length": min_length,
                "prefix": prefix,
                "absent": absent,
            }))?;
            Ok(true)
        }
    }
}

fn verify(names: &[String], levels: Option<&str>, max_seconds: Option<f64>, ctx: &mut Ctx) -> Result<bool> {
    let suites: Vec<Suite> = if names.iter().any(|n| n == "all") {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?
    };
    let levels = levels
        .map(|text| -> Result<(u32, u32)> {
            let (lo, hi) = text.split_once("..").unwrap_or((text, text));
            Ok((lo.parse()?, hi.trim_start_matches('=').parse()?))
        })
        .transpose()?;
    let options = SuiteOptions {
        levels,
        max_prefix: ctx.max_prefix,
        max_seconds,
        ..SuiteOptions::default()
    };
    let json = ctx.format(OutputKind::Text)? == OutputKind::Json;
    let mut results = Vec::new();
    for suite in suites {
        let result = run_suite(suite, &options)?;
        if !json {
            writeln!(
                ctx.out,
                "{:<11} {} cases={} downgraded={} {:.2}s",
                result.name,
                if result.passed() { "PASS" } else { "FAIL" },
                result.cases.len(),
                result.downgraded(),
                result.runtime_seconds
            )?;
            for case in result.failures() {
                writeln!(
                    ctx.out,
                    "  mismatch: {} expected {} observed {:?}",
                    case.params, case.expected, case.observed
                )?;
            }
        }
        results.push(result);
    }
    if json {
        ctx.json(&json!(results))?;
    }
    Ok(results.iter().all(|r| r.passed()))
}
