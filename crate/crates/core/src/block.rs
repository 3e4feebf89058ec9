//! Two-dimensional block substitutions.
//!
//! The block rule sends a letter `a` to the `Q×Q` square whose row `r` is
//! `θ(θ(a)_r)`. For the Thue–Morse and generalised Thue–Morse rules, the
//! level-`n` block read row by row is the superword `θ^{2n}(a)`, which is how
//! [`block_iterate`] builds it. [`InflatedGrid`] iterates the block rule
//! itself and is the independent route used by [`check_block_lemmas`].

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subst::{Letter, Substitution, Word, DEFAULT_ITERATE_CAP};

/// Read access to a square grid of letters.
pub trait Grid {
    fn side(&self) -> u64;
    fn cell(&self, row: u64, col: u64) -> Letter;

    fn row(&self, row: u64) -> Word {
        (0..self.side()).map(|c| self.cell(row, c)).collect()
    }

    fn column(&self, col: u64) -> Word {
        (0..self.side()).map(|r| self.cell(r, col)).collect()
    }

    fn diagonal(&self, which: Diagonal) -> Word {
        let s = self.side();
        (0..s)
            .map(|i| match which {
                Diagonal::Main => self.cell(i, i),
                Diagonal::Anti => self.cell(i, s - 1 - i),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    /// Top-left to bottom-right.
    Main,
    /// Top-right to bottom-left.
    Anti,
}

/// A materialized level-`n` block, side `Qⁿ`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    side: u64,
    cells: Vec<Letter>,
    subst: Substitution,
    seed: Letter,
    level: u32,
}

impl Block {
    pub fn cells(&self) -> &[Letter] {
        &self.cells
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn substitution(&self) -> &Substitution {
        &self.subst
    }
}

impl Grid for Block {
    fn side(&self) -> u64 {
        self.side
    }

    fn cell(&self, row: u64, col: u64) -> Letter {
        self.cells[(row * self.side + col) as usize]
    }
}

/// The level-`n` block of `a`, built as `θ^{2n}(a)` cut into rows of `Qⁿ`.
pub fn block_iterate(s: &Substitution, a: Letter, n: u32) -> Result<Block> {
    if n == 0 {
        return Err(Error::InvalidParameter("block level must be at least 1".into()));
    }
    let word = s.iterate_capped(a, 2 * n, DEFAULT_ITERATE_CAP)?;
    let side = (s.length() as u64).pow(n);
    Ok(Block {
        side,
        cells: word.into_inner(),
        subst: s.clone(),
        seed: a,
        level: n,
    })
}

/// Reads cells of `θ^{2n}(a)` through index arithmetic, row = i div Qⁿ.
pub struct ReshapedGrid<'a> {
    subst: &'a Substitution,
    seed: Letter,
    level: u32,
    side: u64,
}

impl<'a> ReshapedGrid<'a> {
    pub fn new(subst: &'a Substitution, seed: Letter, level: u32) -> Self {
        ReshapedGrid {
            subst,
            seed,
            level,
            side: (subst.length() as u64).pow(level),
        }
    }
}

impl Grid for ReshapedGrid<'_> {
    fn side(&self) -> u64 {
        self.side
    }

    fn cell(&self, row: u64, col: u64) -> Letter {
        self.subst
            .superword_letter(self.seed, 2 * self.level, row * self.side + col)
    }
}

/// The block rule iterated `n` times, evaluated cell by cell: each level picks
/// one row digit and one column digit.
pub struct InflatedGrid<'a> {
    subst: &'a Substitution,
    seed: Letter,
    level: u32,
    side: u64,
}

impl<'a> InflatedGrid<'a> {
    pub fn new(subst: &'a Substitution, seed: Letter, level: u32) -> Self {
        InflatedGrid {
            subst,
            seed,
            level,
            side: (subst.length() as u64).pow(level),
        }
    }
}

impl Grid for InflatedGrid<'_> {
    fn side(&self) -> u64 {
        self.side
    }

    fn cell(&self, row: u64, col: u64) -> Letter {
        let q = self.subst.length() as u64;
        let mut scale = self.side;
        let mut letter = self.seed;
        for _ in 0..self.level {
            scale /= q;
            let r = (row / scale) % q;
            let c = (col / scale) % q;
            let row_letter = self.subst.image(letter)[r as usize];
            letter = self.subst.image(row_letter)[c as usize];
        }
        letter
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCheck {
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub level: u32,
    pub seed: Letter,
    pub checks: Vec<BlockCheck>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }
}

/// Largest grid [`check_block_lemmas`] walks.
const CHECK_CAP: u64 = 1 << 26;

/// Checks the block lemmas for `Θⁿ(a)` of a binary rule with bar-swap symmetry.
///
/// Always checked: the block rule read row-wise equals `θ^{2n}(a)`; every
/// row and column is `θⁿ(0)` or `θⁿ(1)`; the main diagonal is constant `a`.
/// Only when `θ(0)` reversed is `θ(1)` (the `p = q` case): symmetry under
/// reflection in both diagonals, and an anti-diagonal constant `a` for even
/// `n` and `ā` for odd `n`.
pub fn check_block_lemmas(s: &Substitution, a: Letter, n: u32) -> Result<BlockReport> {
    if !s.has_bar_symmetry() {
        return Err(Error::InvalidParameter(
            "block lemmas need a binary rule with bar-swap symmetry".into(),
        ));
    }
    s.check_letter(a)?;
    if n == 0 {
        return Err(Error::InvalidParameter("block level must be at least 1".into()));
    }
    let side = (s.length() as u64)
        .checked_pow(n)
        .filter(|side| side.checked_mul(*side).is_some_and(|c| c <= CHECK_CAP))
        .ok_or(Error::CapExceeded {
            requested: (s.length() as u128).saturating_pow(2 * n),
            cap: CHECK_CAP as u128,
        })?;
    let reshaped = ReshapedGrid::new(s, a, n);
    let inflated = InflatedGrid::new(s, a, n);
    let superwords = [s.iterate(Letter::ZERO, n)?, s.iterate(Letter::ONE, n)?];
    let symmetric = s.image(Letter::ZERO).iter().rev().eq(s.image(Letter::ONE).iter());

    let status = |ok: bool| if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    let mut checks = Vec::new();

    let row_read = (0..side).all(|r| (0..side).all(|c| inflated.cell(r, c) == reshaped.cell(r, c)));
    checks.push(BlockCheck {
        name: "row_read",
        status: status(row_read),
    });

    let rows = (0..side).all(|r| superwords.contains(&inflated.row(r)));
    checks.push(BlockCheck {
        name: "rows",
        status: status(rows),
    });
    let columns = (0..side).all(|c| superwords.contains(&inflated.column(c)));
    checks.push(BlockCheck {
        name: "columns",
        status: status(columns),
    });

    let main = inflated.diagonal(Diagonal::Main).iter().all(|&l| l == a);
    checks.push(BlockCheck {
        name: "main_diagonal",
        status: status(main),
    });

    if symmetric {
        let reflect = (0..side).all(|r| {
            (0..side).all(|c| {
                let x = inflated.cell(r, c);
                x == inflated.cell(c, r) && x == inflated.cell(side - 1 - c, side - 1 - r)
            })
        });
        checks.push(BlockCheck {
            name: "diagonal_reflection",
            status: status(reflect),
        });
        let expected = if n.is_multiple_of(2) { a } else { a.bar() };
        let anti = inflated.diagonal(Diagonal::Anti).iter().all(|&l| l == expected);
        checks.push(BlockCheck {
            name: "anti_diagonal",
            status: status(anti),
        });
    } else {
        for name in ["diagonal_reflection", "anti_diagonal"] {
            checks.push(BlockCheck {
                name,
                status: CheckStatus::Skipped,
            });
        }
    }
    Ok(BlockReport {
        level: n,
        seed: a,
        checks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    /// `#` for letter 0, `.` for letter 1, one line per row.
    Ascii,
    /// Plain PBM (`P1`); letter 0 is a black pixel.
    Pbm,
    Json,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(RenderFormat::Ascii),
            "pbm" => Ok(RenderFormat::Pbm),
            "json" => Ok(RenderFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown block format {s:?}"))),
        }
    }
}

#[derive(Serialize)]
struct BlockJson {
    side: u64,
    level: u32,
    seed: Letter,
    rows: Vec<String>,
}

pub fn render(b: &Block, format: RenderFormat) -> Vec<u8> {
    let side = b.side as usize;
    let rows = b.cells.chunks(side.max(1));
    match format {
        RenderFormat::Ascii => {
            let mut out = String::with_capacity((side + 1) * side);
            for row in rows {
                out.extend(row.iter().map(|l| if l.0 == 0 { '#' } else { '.' }));
                out.push('\n');
            }
            out.into_bytes()
        }
        RenderFormat::Pbm => {
            let mut out = String::new();
            let _ = writeln!(out, "P1\n{side} {side}");
            for row in rows {
                let line: Vec<&str> = row.iter().map(|l| if l.0 == 0 { "1" } else { "0" }).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
        RenderFormat::Json => {
            let json = BlockJson {
                side: b.side,
                level: b.level,
                seed: b.seed,
                rows: rows.map(|r| Word::from(r).to_string()).collect(),
            };
            let mut out = serde_json::to_vec_pretty(&json).expect("block serializes");
            out.push(b'\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ascii(b: &Block) -> String {
        String::from_utf8(render(b, RenderFormat::Ascii)).unwrap()
    }

    #[test]
    fn level_one_blocks() {
        let tm = Substitution::thue_morse();
        let b = block_iterate(&tm, Letter::ZERO, 1).unwrap();
        assert_eq!(b.cells(), &*"0110".parse::<Word>().unwrap());
        assert_eq!(ascii(&b), "#.\n.#\n");
        let g21 = Substitution::generalised(2, 1).unwrap();
        let b = block_iterate(&g21, Letter::ZERO, 1).unwrap();
        let rows: Vec<String> = (0..3).map(|r| b.row(r).to_string()).collect();
        assert_eq!(rows, ["001", "001", "110"]);
        assert_eq!(b.diagonal(Diagonal::Anti).to_string(), "101");
        assert_eq!(b.diagonal(Diagonal::Main).to_string(), "000");
    }

    #[test]
    fn tm_diagonals() {
        let tm = Substitution::thue_morse();
        for n in 1..=5 {
            let b = block_iterate(&tm, Letter::ZERO, n).unwrap();
            assert!(b.diagonal(Diagonal::Main).iter().all(|&l| l == Letter::ZERO));
        }
        let b = block_iterate(&tm, Letter::ZERO, 2).unwrap();
        assert_eq!(b.row(0).to_string(), "0110");
        assert_eq!(b.diagonal(Diagonal::Anti).to_string(), "0000");
    }

    #[test]
    fn thue_morse_level_three_figure() {
        // Rows of the 8×8 black/white figure, top to bottom.
        let expected = [
            "#..#.##.", ".##.#..#", ".##.#..#", "#..#.##.", ".##.#..#", "#..#.##.", "#..#.##.", ".##.#..#",
        ];
        let b = block_iterate(&Substitution::thue_morse(), Letter::ZERO, 3).unwrap();
        let got: Vec<String> = ascii(&b).lines().map(str::to_owned).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn generalised_two_one_figure() {
        // The 9×9 second inflation step of 0 under the (2,1) block rule.
        let a = "##.##...#";
        let b = "..#..###.";
        let expected = [a, a, b, a, a, b, b, b, a];
        let block = block_iterate(&Substitution::generalised(2, 1).unwrap(), Letter::ZERO, 2).unwrap();
        let got: Vec<String> = ascii(&block).lines().map(str::to_owned).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn pbm_output() {
        let b = block_iterate(&Substitution::thue_morse(), Letter::ZERO, 2).unwrap();
        let pbm = String::from_utf8(render(&b, RenderFormat::Pbm)).unwrap();
        assert!(pbm.starts_with("P1\n4 4\n"));
        assert_eq!(pbm.lines().nth(2), Some("1 0 0 1"));
        assert_eq!(pbm.lines().count(), 6);
    }

    #[test]
    fn json_output() {
        let b = block_iterate(&Substitution::thue_morse(), Letter::ONE, 1).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&render(&b, RenderFormat::Json)).unwrap();
        assert_eq!(v["side"], 2);
        assert_eq!(v["rows"][0], "10");
    }

    #[test]
    fn inflated_grid_agrees_with_reshape() {
        for s in [
            Substitution::thue_morse(),
            Substitution::generalised(2, 1).unwrap(),
            Substitution::generalised(1, 3).unwrap(),
        ] {
            for n in 1..=3 {
                let block = block_iterate(&s, Letter::ONE, n).unwrap();
                let inflated = InflatedGrid::new(&s, Letter::ONE, n);
                for r in 0..block.side() {
                    assert_eq!(inflated.row(r), block.row(r));
                }
            }
        }
    }

    #[test]
    fn lemma_reports() {
        let tm = Substitution::thue_morse();
        assert!(check_block_lemmas(&tm, Letter::ZERO, 3).unwrap().passed());
        let g22 = Substitution::generalised(2, 2).unwrap();
        let r = check_block_lemmas(&g22, Letter::ONE, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.status("anti_diagonal"), Some(CheckStatus::Pass));
        let g21 = Substitution::generalised(2, 1).unwrap();
        let r = check_block_lemmas(&g21, Letter::ZERO, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.status("diagonal_reflection"), Some(CheckStatus::Skipped));
        assert_eq!(r.status("anti_diagonal"), Some(CheckStatus::Skipped));
        assert_eq!(r.status("main_diagonal"), Some(CheckStatus::Pass));
        assert_eq!(r.status("rows"), Some(CheckStatus::Pass));
        assert_eq!(r.status("columns"), Some(CheckStatus::Pass));
    }

    #[test]
    fn every_binary_bar_symmetric_rule_of_length_three() {
        for mask in 0u8..8 {
            let zero: Vec<Letter> = (0..3).map(|j| Letter((mask >> j) & 1)).collect();
            let one: Vec<Letter> = zero.iter().map(|l| l.bar()).collect();
            let s = Substitution::new(vec![zero, one]).unwrap();
            for a in [Letter::ZERO, Letter::ONE] {
                let r = check_block_lemmas(&s, a, 2).unwrap();
                assert!(r.passed(), "mask {mask}: {r:?}");
            }
        }
    }

    #[test]
    fn routes_differ_without_bar_symmetry() {
        // 0 ↦ 01, 1 ↦ 00: the block rule and the reshaped superword disagree at level 2.
        let s = Substitution::from_strs(&["01", "00"]).unwrap();
        let reshaped = ReshapedGrid::new(&s, Letter::ZERO, 2);
        let inflated = InflatedGrid::new(&s, Letter::ZERO, 2);
        assert_eq!(inflated.row(1).to_string(), "0001");
        assert_eq!(reshaped.row(1).to_string(), "0101");
        assert!(check_block_lemmas(&s, Letter::ZERO, 2).is_err());
    }
}
