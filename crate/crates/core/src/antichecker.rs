//! Program/input games over enumerated program families.
//!
//! Inputs are the `2ⁿ` bitstrings of length `n`, indexed so that input `j`
//! has bit `xᵢ = (j >> (n − 1 − i)) & 1`; index order is lexicographic order
//! of the strings. A language and every program are stored as truth tables
//! over that index.
//!
//! In the correctness game the programs are the Min rows, the inputs are
//! the Max columns and a payoff of 1 marks a misclassification. An
//! anti-checker is a small multiset of inputs on which every program of the
//! family errs often.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{best_response, GameMatrix, PayoffOracle, Player, UniformMultiset};
use crate::rng;
use crate::solver::{solve_auto, SolveOptions};
use crate::sparsify::{
    dovetail_bound, dovetail_exploitability, dovetail_set_with, draw_multiset, greedy_cover,
    greedy_k_uniform_on, k_uniform_bound, sample_until, DovetailMethod, DovetailOutcome,
    DovetailSet, DEFAULT_MAX_ATTEMPTS,
};

/// Largest supported input length.
pub const MAX_INPUT_BITS: usize = 20;
/// Largest correctness game (`|family| · 2ⁿ` entries) that will be enumerated.
pub const MAX_GAME_ENTRIES: usize = 1 << 24;

/// Bit `i` of input `x` (bit 0 is the leftmost character).
pub fn input_bit(x: usize, n: usize, i: usize) -> bool {
    (x >> (n - 1 - i)) & 1 == 1
}

/// `x` as an `n`-character 0/1 string.
pub fn bitstring(x: usize, n: usize) -> String {
    if n == 0 {
        return String::new();
    }
    format!("{x:0n$b}")
}

pub fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Parse(format!("{s:?} is not a {n}-bit string")));
    }
    Ok(s.bytes()
        .fold(0, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

fn check_bits(n: usize) -> Result<()> {
    if n > MAX_INPUT_BITS {
        return Err(Error::InvalidParameter(format!(
            "input length {n} exceeds the enumeration cap {MAX_INPUT_BITS}"
        )));
    }
    Ok(())
}

fn table_from_fn(n: usize, f: impl Fn(usize) -> bool) -> Vec<bool> {
    (0..1usize << n).map(f).collect()
}

fn parse_table(text: &str) -> Result<(usize, Vec<bool>)> {
    let table = text
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!(
                "unexpected character {other:?} in truth table"
            ))),
        })
        .collect::<Result<Vec<bool>>>()?;
    if !table.len().is_power_of_two() {
        return Err(Error::Parse(format!(
            "truth table length {} is not a power of two",
            table.len()
        )));
    }
    let n = table.len().trailing_zeros() as usize;
    check_bits(n)?;
    Ok((n, table))
}

fn table_to_string(table: &[bool]) -> String {
    table.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A language restricted to inputs of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    name: String,
    n: usize,
    table: Vec<bool>,
}

impl Language {
    pub fn from_table(name: impl Into<String>, n: usize, table: Vec<bool>) -> Result<Self> {
        check_bits(n)?;
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: table.len(),
            });
        }
        Ok(Language {
            name: name.into(),
            n,
            table,
        })
    }

    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        member: impl Fn(usize) -> bool,
    ) -> Result<Self> {
        check_bits(n)?;
        Language::from_table(name, n, table_from_fn(n, member))
    }

    pub fn parity(n: usize) -> Result<Self> {
        Language::from_fn("parity", n, |x| x.count_ones() % 2 == 1)
    }

    /// Strings with more ones than zeros.
    pub fn majority(n: usize) -> Result<Self> {
        Language::from_fn("majority", n, |x| 2 * x.count_ones() as usize > n)
    }

    /// Strings whose bit `i` is set.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        Language::from_fn(format!("x{i}"), n, |x| input_bit(x, n, i))
    }

    pub fn constant(n: usize, member: bool) -> Result<Self> {
        Language::from_fn(if member { "const1" } else { "const0" }, n, |_| member)
    }

    /// Each string is a member independently with probability ½.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_bits(n)?;
        let mut rng = rng::seeded(seed, 0);
        let table = (0..1usize << n).map(|_| rng.gen::<bool>()).collect();
        Language::from_table(format!("random:{seed}"), n, table)
    }

    /// Built-in languages: `parity`, `majority`, `x<i>`, `const0`, `const1`,
    /// `random:<seed>`.
    pub fn builtin(name: &str, n: usize) -> Result<Self> {
        match name {
            "parity" => Language::parity(n),
            "majority" => Language::majority(n),
            "const0" => Language::constant(n, false),
            "const1" => Language::constant(n, true),
            _ => {
                if let Some(seed) = name.strip_prefix("random:") {
                    let seed = seed
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed in language name {name:?}")))?;
                    Language::random(n, seed)
                } else if let Some(i) = name.strip_prefix('x').and_then(|i| i.parse().ok()) {
                    Language::dictator(n, i)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "unknown language {name:?}"
                    )))
                }
            }
        }
    }

    /// Parses a truth-table file: one 0/1 character per input in
    /// lexicographic order. Surrounding whitespace is ignored.
    pub fn parse_truth_table(name: impl Into<String>, text: &str) -> Result<Self> {
        let (n, table) = parse_table(text.trim())?;
        Language::from_table(name, n, table)
    }

    pub fn to_truth_table(&self) -> String {
        table_to_string(&self.table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn member(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }
}

/// A program: a size, a truth table and optionally a step count per input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub size: u64,
    pub table: Vec<bool>,
    pub cost: Option<Vec<u64>>,
}

impl Program {
    pub fn classify(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn cost(&self, x: usize) -> Option<u64> {
        self.cost.as_ref().map(|c| c[x])
    }

    fn negated(&self, name: String, size: u64) -> Program {
        Program {
            name,
            size,
            table: self.table.iter().map(|b| !b).collect(),
            cost: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyFile", into = "FamilyFile")]
pub struct ProgramFamily {
    name: String,
    n: usize,
    programs: Vec<Program>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyFile {
    name: String,
    n: usize,
    programs: Vec<ProgramEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProgramEntry {
    name: String,
    size: u64,
    table: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    costs: Option<Vec<u64>>,
}

impl TryFrom<FamilyFile> for ProgramFamily {
    type Error = Error;

    fn try_from(file: FamilyFile) -> Result<Self> {
        let programs = file
            .programs
            .into_iter()
            .map(|p| {
                let (_, table) = parse_table(&p.table)?;
                Ok(Program {
                    name: p.name,
                    size: p.size,
                    table,
                    cost: p.costs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProgramFamily::new(file.name, file.n, programs)
    }
}

impl From<ProgramFamily> for FamilyFile {
    fn from(fam: ProgramFamily) -> Self {
        FamilyFile {
            name: fam.name,
            n: fam.n,
            programs: fam
                .programs
                .into_iter()
                .map(|p| ProgramEntry {
                    table: table_to_string(&p.table),
                    name: p.name,
                    size: p.size,
                    costs: p.cost,
                })
                .collect(),
        }
    }
}

impl ProgramFamily {
    pub fn new(name: impl Into<String>, n: usize, programs: Vec<Program>) -> Result<Self> {
        check_bits(n)?;
        if programs.is_empty() {
            return Err(Error::InvalidParameter(
                "a program family needs at least one program".into(),
            ));
        }
        for p in &programs {
            if p.size == 0 {
                return Err(Error::InvalidParameter(format!(
                    "program {} has size 0",
                    p.name
                )));
            }
            let found = p.table.len().max(p.cost.as_ref().map_or(0, Vec::len));
            let short = p.table.len().min(p.cost.as_ref().map_or(1 << n, Vec::len));
            if found != 1 << n || short != 1 << n {
                return Err(Error::DimensionMismatch {
                    expected: 1 << n,
                    found: if found != 1 << n { found } else { short },
                });
            }
        }
        Ok(ProgramFamily {
            name: name.into(),
            n,
            programs,
        })
    }

    /// `const0` and `const1`, size 1 each.
    pub fn constants(n: usize) -> Result<Self> {
        check_bits(n)?;
        ProgramFamily::new("constants", n, constant_programs(n))
    }

    /// Constants, the literals `xᵢ` (size 1) and `!xᵢ` (size 2).
    pub fn dictators(n: usize) -> Result<Self> {
        check_bits(n)?;
        let mut programs = constant_programs(n);
        programs.extend(literals(n).into_iter().flat_map(|(a, b)| [a, b]));
        ProgramFamily::new("dictators", n, programs)
    }

    /// Dictators plus the AND and OR of every two literals on distinct
    /// variables, sized as the two literal sizes plus one.
    pub fn pairs(n: usize) -> Result<Self> {
        check_bits(n)?;
        let mut programs = ProgramFamily::dictators(n)?.programs;
        let lits = literals(n);
        for i in 0..n {
            for j in i + 1..n {
                for a in [&lits[i].0, &lits[i].1] {
                    for b in [&lits[j].0, &lits[j].1] {
                        for (op, f) in [("&", and as fn(bool, bool) -> bool), ("|", or)] {
                            programs.push(Program {
                                name: format!("{}{op}{}", a.name, b.name),
                                size: a.size + b.size + 1,
                                table: a
                                    .table
                                    .iter()
                                    .zip(&b.table)
                                    .map(|(&x, &y)| f(x, y))
                                    .collect(),
                                cost: None,
                            });
                        }
                    }
                }
            }
        }
        ProgramFamily::new("pairs", n, programs)
    }

    /// Every Boolean function of every `k` of the `n` variables (`k ≤ 3`),
    /// sized `k + 2ᵏ` (variable list plus truth table). Named
    /// `junta[i,j,..]:TABLE` with the table over the chosen variables.
    pub fn juntas(n: usize, k: usize) -> Result<Self> {
        check_bits(n)?;
        if k == 0 || k > 3 || k > n {
            return Err(Error::InvalidParameter(format!(
                "junta size must be in 1..=min(3, n), got {k}"
            )));
        }
        let mut programs = Vec::new();
        let mut vars: Vec<usize> = (0..k).collect();
        loop {
            for f in 0u32..1 << (1 << k) {
                let local = |x: usize| {
                    vars.iter().fold(0usize, |acc, &v| {
                        (acc << 1) | usize::from(input_bit(x, n, v))
                    })
                };
                let local_table: String = (0..1usize << k)
                    .map(|y| if (f >> y) & 1 == 1 { '1' } else { '0' })
                    .collect();
                let var_list = vars
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                programs.push(Program {
                    name: format!("junta[{var_list}]:{local_table}"),
                    size: (k + (1 << k)) as u64,
                    table: table_from_fn(n, |x| (f >> local(x)) & 1 == 1),
                    cost: None,
                });
            }
            if !next_subset(&mut vars, n) {
                break;
            }
        }
        ProgramFamily::new(format!("junta{k}"), n, programs)
    }

    /// Built-in families: `constants`, `dictators`, `pairs`, `junta1`..`junta3`.
    pub fn builtin(name: &str, n: usize) -> Result<Self> {
        match name {
            "constants" => ProgramFamily::constants(n),
            "dictators" => ProgramFamily::dictators(n),
            "pairs" => ProgramFamily::pairs(n),
            _ => match name.strip_prefix("junta").and_then(|k| k.parse().ok()) {
                Some(k) => ProgramFamily::juntas(n, k),
                None => Err(Error::InvalidParameter(format!(
                    "unknown program family {name:?}"
                ))),
            },
        }
    }

    /// One program per row of `costs`; the row length must be `2ⁿ`. The
    /// programs carry no classification (their tables are all zero) and
    /// have size 1.
    pub fn from_cost_matrix(name: impl Into<String>, costs: Vec<Vec<u64>>) -> Result<Self> {
        let width = costs.first().map_or(0, Vec::len);
        if !width.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "cost matrix needs 2^n columns, got {width}"
            )));
        }
        let n = width.trailing_zeros() as usize;
        let programs = costs
            .into_iter()
            .enumerate()
            .map(|(i, row)| Program {
                name: format!("p{i}"),
                size: 1,
                table: vec![false; width],
                cost: Some(row),
            })
            .collect();
        ProgramFamily::new(name, n, programs)
    }

    /// Reads a cost matrix from CSV: one line per program, `2ⁿ` non-negative
    /// integers per line.
    pub fn from_cost_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("cost csv: {e}")))?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<u64>().map_err(|_| {
                        Error::Parse(format!(
                            "cost csv line {}: {field:?} is not a step count",
                            line + 1
                        ))
                    })
                })
                .collect::<Result<Vec<u64>>>()?;
            rows.push(row);
        }
        ProgramFamily::from_cost_matrix(name, rows)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serialization is infallible")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn programs(&self) -> &[Program] {
        &self.programs
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }
}

fn and(a: bool, b: bool) -> bool {
    a && b
}

fn or(a: bool, b: bool) -> bool {
    a || b
}

fn constant_programs(n: usize) -> Vec<Program> {
    [false, true]
        .into_iter()
        .map(|b| Program {
            name: format!("const{}", u8::from(b)),
            size: 1,
            table: vec![b; 1 << n],
            cost: None,
        })
        .collect()
}

fn literals(n: usize) -> Vec<(Program, Program)> {
    (0..n)
        .map(|i| {
            let pos = Program {
                name: format!("x{i}"),
                size: 1,
                table: table_from_fn(n, |x| input_bit(x, n, i)),
                cost: None,
            };
            let neg = pos.negated(format!("!x{i}"), 2);
            (pos, neg)
        })
        .collect()
}

/// Advances a sorted k-subset of `0..n` in lexicographic order.
fn next_subset(vars: &mut [usize], n: usize) -> bool {
    let k = vars.len();
    for pos in (0..k).rev() {
        if vars[pos] < n - k + pos {
            vars[pos] += 1;
            for next in pos + 1..k {
                vars[next] = vars[next - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn check_shared_n(lang: &Language, fam: &ProgramFamily) -> Result<()> {
    if lang.n != fam.n {
        return Err(Error::InvalidParameter(format!(
            "language {} has n = {} but family {} has n = {}",
            lang.name, lang.n, fam.name, fam.n
        )));
    }
    Ok(())
}

fn check_enumerable(fam: &ProgramFamily) -> Result<()> {
    if fam.len().saturating_mul(1 << fam.n) > MAX_GAME_ENTRIES {
        return Err(Error::InvalidParameter(format!(
            "{} programs over 2^{} inputs exceeds the enumeration cap of {MAX_GAME_ENTRIES} entries",
            fam.len(),
            fam.n
        )));
    }
    Ok(())
}

/// Rows are programs, columns are inputs; payoff 1 when the program
/// misclassifies the input, else 0.
pub fn correctness_game(lang: &Language, fam: &ProgramFamily) -> Result<PayoffOracle> {
    check_shared_n(lang, fam)?;
    let truth = Arc::new(lang.table.clone());
    let tables: Arc<Vec<Vec<bool>>> =
        Arc::new(fam.programs.iter().map(|p| p.table.clone()).collect());
    PayoffOracle::new(fam.len(), 1 << fam.n, (0.0, 1.0), move |i, j| {
        if tables[i][j] == truth[j] {
            0.0
        } else {
            1.0
        }
    })
}

/// Misclassification count of each program on `items`, with multiplicity.
pub fn error_counts(lang: &Language, fam: &ProgramFamily, items: &[usize]) -> Result<Vec<usize>> {
    check_shared_n(lang, fam)?;
    if let Some(&x) = items.iter().find(|&&x| x >= 1 << fam.n) {
        return Err(Error::IndexOutOfRange {
            index: x,
            bound: 1 << fam.n,
        });
    }
    Ok(fam
        .programs
        .iter()
        .map(|p| {
            items
                .iter()
                .filter(|&&x| p.table[x] != lang.table[x])
                .count()
        })
        .collect())
}

/// A multiset of inputs on which every program of a family errs on at least
/// a `guaranteed_error` fraction (when `verified`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AntiCheckerFile", into = "AntiCheckerFile")]
pub struct AntiChecker {
    pub language: String,
    pub family: String,
    pub n: usize,
    /// Input indices, sorted, with repetition.
    pub items: Vec<usize>,
    pub epsilon: f64,
    /// `½ − ε`.
    pub guaranteed_error: f64,
    /// Least error fraction over the family, recounted on `items`.
    pub verified_min_error: f64,
    /// `½ − v` for the solved correctness game, when known.
    pub value_gap: Option<f64>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AntiCheckerFile {
    language: String,
    family: String,
    n: usize,
    epsilon: f64,
    items: Vec<String>,
    verified_min_error: f64,
}

impl TryFrom<AntiCheckerFile> for AntiChecker {
    type Error = Error;

    fn try_from(file: AntiCheckerFile) -> Result<Self> {
        check_bits(file.n)?;
        if !(file.epsilon > 0.0 && file.epsilon < 0.5) {
            return Err(Error::Parse(format!(
                "epsilon must lie in (0, 1/2), got {}",
                file.epsilon
            )));
        }
        if file.items.is_empty() {
            return Err(Error::Parse("anti-checker has no items".into()));
        }
        let mut items = file
            .items
            .iter()
            .map(|s| parse_bitstring(s, file.n))
            .collect::<Result<Vec<_>>>()?;
        items.sort_unstable();
        let guaranteed_error = 0.5 - file.epsilon;
        Ok(AntiChecker {
            language: file.language,
            family: file.family,
            n: file.n,
            items,
            epsilon: file.epsilon,
            guaranteed_error,
            verified_min_error: file.verified_min_error,
            value_gap: None,
            verified: file.verified_min_error >= guaranteed_error,
        })
    }
}

impl From<AntiChecker> for AntiCheckerFile {
    fn from(ac: AntiChecker) -> Self {
        AntiCheckerFile {
            items: ac.bitstrings(),
            language: ac.language,
            family: ac.family,
            n: ac.n,
            epsilon: ac.epsilon,
            verified_min_error: ac.verified_min_error,
        }
    }
}

impl AntiChecker {
    pub fn bitstrings(&self) -> Vec<String> {
        self.items.iter().map(|&x| bitstring(x, self.n)).collect()
    }

    pub fn distribution(&self) -> HardDistribution {
        HardDistribution {
            n: self.n,
            items: self.items.clone(),
        }
    }

    /// Recounts the least error fraction against `lang` and `fam`, updating
    /// `verified_min_error` and `verified`.
    pub fn reverify(&mut self, lang: &Language, fam: &ProgramFamily) -> Result<f64> {
        if lang.n != self.n {
            return Err(Error::InvalidParameter(format!(
                "anti-checker has n = {} but language {} has n = {}",
                self.n, lang.name, lang.n
            )));
        }
        let min = min_error_fraction(lang, fam, &self.items)?;
        self.verified_min_error = min;
        self.verified = min >= self.guaranteed_error;
        Ok(min)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("anti-checker serialization is infallible")
    }
}

fn min_error_fraction(lang: &Language, fam: &ProgramFamily, items: &[usize]) -> Result<f64> {
    let worst = error_counts(lang, fam, items)?
        .into_iter()
        .min()
        .unwrap_or(0);
    Ok(worst as f64 / items.len() as f64)
}

/// Uniform distribution over an anti-checker multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardDistribution {
    n: usize,
    items: Vec<usize>,
}

impl HardDistribution {
    /// Multiplicity of `x` divided by the multiset size.
    pub fn probability(&self, x: usize) -> f64 {
        self.items.iter().filter(|&&y| y == x).count() as f64 / self.items.len() as f64
    }

    pub fn support(&self) -> Vec<usize> {
        let mut support = self.items.clone();
        support.dedup();
        support
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.items[rng::index_below(rng, self.items.len())]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Builds an anti-checker for `lang` against `fam`.
///
/// Solves the correctness game, then samples `k` inputs from the optimal
/// input distribution, where `k = k_uniform_bound(|fam|, ε')` and
/// `ε' = max(ε − δ, ε/2)` with `δ = ½ − v`. Each draw is checked by
/// recounting errors; after the retry budget the greedy construction is
/// used. The result is flagged verified only if every program errs on at
/// least a `½ − ε` fraction of the multiset.
pub fn build_anti_checker(
    lang: &Language,
    fam: &ProgramFamily,
    epsilon: f64,
    seed: u64,
) -> Result<AntiChecker> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    check_enumerable(fam)?;
    let game = GameMatrix::materialize(&correctness_game(lang, fam)?)?;
    let solution = solve_auto(&game, &SolveOptions::with_delta(epsilon / 8.0))?;
    let target = 0.5 - epsilon;
    if solution.value_hi < target {
        return Err(Error::ValueTooLow {
            value: solution.value_hi,
            required: target,
        });
    }
    let delta = 0.5 - solution.value_lo;
    let slack = (epsilon - delta).max(epsilon / 2.0);
    let k = k_uniform_bound(fam.len(), slack)?;

    let sampled = sample_until(
        &game,
        solution.strategy(Player::Max),
        k,
        target,
        seed,
        DEFAULT_MAX_ATTEMPTS,
    )?;
    let multiset = if sampled.verified {
        sampled.multiset
    } else {
        greedy_k_uniform_on(&game, k, Player::Max)?.0
    };
    let items = multiset.items().to_vec();
    let verified_min_error = min_error_fraction(lang, fam, &items)?;
    Ok(AntiChecker {
        language: lang.name.clone(),
        family: fam.name.clone(),
        n: fam.n,
        items,
        epsilon,
        guaranteed_error: target,
        verified_min_error,
        value_gap: Some(delta),
        verified: verified_min_error >= target,
    })
}

/// `count` independent uniform draws from the anti-checker multiset.
pub fn sample_hard(ac: &AntiChecker, seed: u64, count: usize) -> Result<Vec<String>> {
    if !ac.verified {
        return Err(Error::Unverified);
    }
    let dist = ac.distribution();
    let mut rng = rng::seeded(seed, 0);
    Ok((0..count)
        .map(|_| bitstring(dist.sample(&mut rng), ac.n))
        .collect())
}

/// Least size of a program in `fam` that agrees with `lang` on every input.
pub fn family_complexity(lang: &Language, fam: &ProgramFamily) -> Result<Option<u64>> {
    check_shared_n(lang, fam)?;
    Ok(fam
        .programs
        .iter()
        .filter(|p| p.table == lang.table)
        .map(|p| p.size)
        .min())
}

/// As [`family_complexity`], counting only programs whose cost is at most
/// `t` on every input.
pub fn family_complexity_within(
    lang: &Language,
    fam: &ProgramFamily,
    t: u64,
) -> Result<Option<u64>> {
    check_shared_n(lang, fam)?;
    let mut best = None;
    for p in &fam.programs {
        let cost = p
            .cost
            .as_ref()
            .ok_or_else(|| Error::MissingCost(p.name.clone()))?;
        if p.table == lang.table && cost.iter().all(|&c| c <= t) {
            best = Some(best.map_or(p.size, |b: u64| b.min(p.size)));
        }
    }
    Ok(best)
}

fn cost_table(fam: &ProgramFamily) -> Result<Vec<Vec<u64>>> {
    fam.programs
        .iter()
        .map(|p| {
            p.cost
                .clone()
                .ok_or_else(|| Error::MissingCost(p.name.clone()))
        })
        .collect()
}

/// Payoff 1 when program `i` takes more than `t` steps on input `j`, else 0.
pub fn threshold_game(fam: &ProgramFamily, t: u64) -> Result<PayoffOracle> {
    let costs = Arc::new(cost_table(fam)?);
    PayoffOracle::new(fam.len(), 1 << fam.n, (0.0, 1.0), move |i, j| {
        if costs[i][j] > t {
            1.0
        } else {
            0.0
        }
    })
}

/// A set of inputs such that every program of `fam` runs for more than `t`
/// steps on at least one of them.
///
/// Uses the Max dovetailing construction on the threshold game (sampling
/// seeded by `seed`); if that set leaves some program under the budget,
/// greedy covering at payoff 1 takes over. The outcome's `threshold` is 1
/// and `verified` means every program is covered.
pub fn dovetail_anti_checker(
    fam: &ProgramFamily,
    t: u64,
    epsilon: f64,
    seed: u64,
) -> Result<DovetailOutcome> {
    check_enumerable(fam)?;
    let game = GameMatrix::materialize(&threshold_game(fam, t)?)?;
    if let Some(i) = (0..game.rows()).find(|&i| game.row(i).iter().all(|&x| x < 1.0)) {
        return Err(Error::NeverExceeds {
            program: fam.programs[i].name.clone(),
        });
    }
    let solution = solve_auto(&game, &SolveOptions::default())?;
    let method = DovetailMethod::Sampled {
        seed,
        max_attempts: DEFAULT_MAX_ATTEMPTS,
    };
    let mut outcome = dovetail_set_with(&game, &solution, epsilon, Player::Max, method)?;
    if outcome.achieved < 1.0 {
        let set = greedy_cover(&game, Player::Max, 1.0)?;
        outcome.achieved = dovetail_exploitability(&game, &set)?;
        outcome.within_bound = set.len() <= dovetail_bound(game.rows(), epsilon)?;
        outcome.set = set;
    }
    outcome.threshold = 1.0;
    outcome.verified = outcome.achieved >= 1.0;
    Ok(outcome)
}

/// A set of programs whose pointwise least cost is at most `t` on every
/// input, by greedy covering.
pub fn dovetail_programs(fam: &ProgramFamily, t: u64) -> Result<DovetailSet> {
    let game = threshold_game(fam, t)?;
    greedy_cover(&game, Player::Min, 0.0)
}

/// Number of programs to sample for majority voting at value gap `delta`:
/// `⌈1 + n·ln 2 / (2δ²)⌉`.
pub fn majority_size(n: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "value gap must be positive, got {delta}"
        )));
    }
    Ok((1.0 + n as f64 * std::f64::consts::LN_2 / (2.0 * delta * delta)).ceil() as usize)
}

/// A multiset of programs whose majority vote decides the language.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityEnsemble {
    pub programs: UniformMultiset,
    /// `½ − v` from the solver's upper value estimate.
    pub delta: f64,
    /// Largest fraction of wrong votes on any input.
    pub worst_error: f64,
    /// Every input receives a strict majority of correct votes.
    pub verified: bool,
    pub attempts: usize,
}

/// Largest number of wrong votes cast by `programs` on any input.
pub fn worst_vote_errors(
    lang: &Language,
    fam: &ProgramFamily,
    programs: &UniformMultiset,
) -> Result<usize> {
    check_shared_n(lang, fam)?;
    programs.check_range(fam.len())?;
    let counts = programs.counts();
    Ok((0..1usize << fam.n)
        .map(|x| {
            counts
                .iter()
                .filter(|&&(i, _)| fam.programs[i].table[x] != lang.table[x])
                .map(|&(_, m)| m)
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0))
}

/// Samples `majority_size(n, δ)` programs from the optimal program
/// distribution of the correctness game and checks that their majority vote
/// is right on every input. Falls back to the greedy k-uniform construction,
/// whose exploitability bound is below ½ at that size.
pub fn majority_ensemble(
    lang: &Language,
    fam: &ProgramFamily,
    seed: u64,
    max_attempts: usize,
) -> Result<MajorityEnsemble> {
    if max_attempts == 0 {
        return Err(Error::InvalidParameter(
            "max_attempts must be at least 1".into(),
        ));
    }
    check_enumerable(fam)?;
    let game = GameMatrix::materialize(&correctness_game(lang, fam)?)?;
    let solution = solve_auto(&game, &SolveOptions::default())?;
    let delta = 0.5 - solution.value_hi;
    if delta <= 0.0 {
        return Err(Error::NoValueGap {
            value: solution.value_hi,
        });
    }
    let k = majority_size(fam.n, delta)?;
    let finish = |programs: UniformMultiset, attempts: usize| -> Result<MajorityEnsemble> {
        let wrong = worst_vote_errors(lang, fam, &programs)?;
        Ok(MajorityEnsemble {
            delta,
            worst_error: wrong as f64 / k as f64,
            verified: 2 * wrong < k,
            programs,
            attempts,
        })
    };
    for attempt in 0..max_attempts {
        let programs = draw_multiset(solution.strategy(Player::Min), k, seed, attempt as u64)?;
        let wrong = best_response(&game, &programs)?;
        if 2.0 * wrong.value * (k as f64) < k as f64 {
            let out = finish(programs, attempt + 1)?;
            if out.verified {
                return Ok(out);
            }
        }
    }
    finish(greedy_k_uniform_on(&game, k, Player::Min)?.0, max_attempts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Payoffs;
    use crate::solver::solve_exact_small;

    #[test]
    fn bit_order_is_lexicographic() {
        assert_eq!(bitstring(5, 4), "0101");
        assert!(input_bit(0b1000, 4, 0));
        assert!(!input_bit(0b1000, 4, 3));
        assert_eq!(parse_bitstring("0101", 4).unwrap(), 5);
        assert!(parse_bitstring("012", 3).is_err());
        assert!(parse_bitstring("01", 3).is_err());
        let x0 = Language::dictator(3, 0).unwrap();
        assert_eq!(x0.to_truth_table(), "00001111");
    }

    #[test]
    fn builtin_languages() {
        assert_eq!(
            Language::builtin("parity", 3).unwrap().to_truth_table(),
            "01101001"
        );
        assert_eq!(
            Language::builtin("majority", 3).unwrap().to_truth_table(),
            "00010111"
        );
        assert_eq!(
            Language::builtin("x2", 3).unwrap().to_truth_table(),
            "01010101"
        );
        assert_eq!(
            Language::builtin("const1", 2).unwrap().to_truth_table(),
            "1111"
        );
        let a = Language::builtin("random:7", 6).unwrap();
        assert_eq!(a, Language::builtin("random:7", 6).unwrap());
        assert_ne!(a.table(), Language::builtin("random:8", 6).unwrap().table());
        assert!(Language::builtin("x3", 3).is_err());
        assert!(Language::builtin("nope", 3).is_err());
        assert!(Language::parity(21).is_err());
    }

    #[test]
    fn truth_table_round_trip() {
        let lang = Language::parse_truth_table("t", "0110\n").unwrap();
        assert_eq!(lang.n(), 2);
        assert_eq!(lang.to_truth_table(), "0110");
        assert!(Language::parse_truth_table("t", "011").is_err());
        assert!(Language::parse_truth_table("t", "01a1").is_err());
    }

    #[test]
    fn builtin_families() {
        assert_eq!(ProgramFamily::constants(3).unwrap().len(), 2);
        let dict = ProgramFamily::dictators(4).unwrap();
        assert_eq!(dict.len(), 10);
        assert_eq!(dict.programs()[3].name, "!x0");
        assert_eq!(dict.programs()[3].size, 2);
        // 10 + C(4,2)·4 polarity choices·2 operators
        assert_eq!(ProgramFamily::pairs(4).unwrap().len(), 10 + 6 * 4 * 2);
        let j2 = ProgramFamily::juntas(3, 2).unwrap();
        assert_eq!(j2.len(), 3 * 16);
        assert!(j2.programs().iter().all(|p| p.size == 6));
        assert_eq!(ProgramFamily::builtin("junta1", 2).unwrap().len(), 2 * 4);
        assert!(ProgramFamily::juntas(4, 4).is_err());

        // The junta over {0,1} with table 0110 is x0 xor x1.
        let xor = j2
            .programs()
            .iter()
            .find(|p| p.name == "junta[0,1]:0110")
            .unwrap();
        let expected =
            Language::from_fn("xor", 3, |x| input_bit(x, 3, 0) ^ input_bit(x, 3, 1)).unwrap();
        assert_eq!(xor.table, expected.table());
    }

    #[test]
    fn family_json_round_trip() {
        let mut fam = ProgramFamily::dictators(2).unwrap();
        fam.programs[0].cost = Some(vec![1, 2, 3, 4]);
        let text = fam.to_json_string();
        assert!(text.contains("\"table\": \"0011\""));
        assert_eq!(ProgramFamily::from_json_str(&text).unwrap(), fam);
        let bad = r#"{"name":"f","n":2,"programs":[{"name":"p","size":1,"table":"01"}]}"#;
        assert!(ProgramFamily::from_json_str(bad).is_err());
    }

    #[test]
    fn correctness_game_examples() {
        let x0 = Language::dictator(4, 0).unwrap();
        let fam = ProgramFamily::dictators(4).unwrap();
        let game = correctness_game(&x0, &fam).unwrap();
        assert_eq!((game.rows(), game.cols()), (10, 16));
        assert!((0..16).all(|j| game.payoff(2, j) == 0.0));

        let parity = Language::parity(4).unwrap();
        let game = correctness_game(&parity, &fam).unwrap();
        let ones = |i: usize| (0..16).filter(|&j| game.payoff(i, j) == 1.0).count();
        assert_eq!(ones(0), 8);
        assert_eq!(ones(2), 8);
        assert!((0..10).all(|i| ones(i) == 8));

        assert!(correctness_game(&Language::parity(3).unwrap(), &fam).is_err());
    }

    #[test]
    fn anti_checker_examples() {
        let parity = Language::parity(4).unwrap();
        let fam = ProgramFamily::dictators(4).unwrap();
        let ac = build_anti_checker(&parity, &fam, 0.125, 0).unwrap();
        assert!(ac.verified);
        assert!(ac.verified_min_error >= 0.375);
        assert_eq!(ac.guaranteed_error, 0.375);
        assert!(ac.value_gap.unwrap().abs() < 1e-9);
        let counts = error_counts(&parity, &fam, &ac.items).unwrap();
        assert!(counts
            .iter()
            .all(|&e| e as f64 >= 0.375 * ac.items.len() as f64));

        let all: Vec<usize> = (0..16).collect();
        assert_eq!(error_counts(&parity, &fam, &all).unwrap(), vec![8; 10]);

        let x0 = Language::dictator(4, 0).unwrap();
        match build_anti_checker(&x0, &fam, 0.125, 0) {
            Err(Error::ValueTooLow { value, .. }) => assert!(value.abs() < 1e-9),
            other => panic!("expected ValueTooLow, got {other:?}"),
        }

        let maj = Language::majority(3).unwrap();
        let consts = ProgramFamily::constants(3).unwrap();
        let ac = build_anti_checker(&maj, &consts, 0.1, 0).unwrap();
        assert!(ac.verified);
        let uniform: Vec<usize> = (0..8).collect();
        assert_eq!(min_error_fraction(&maj, &consts, &uniform).unwrap(), 0.5);

        assert!(build_anti_checker(&parity, &fam, 0.5, 0).is_err());
    }

    #[test]
    fn complement_pairs_force_value_one_half() {
        let fam = ProgramFamily::dictators(3).unwrap();
        for name in ["parity", "majority", "x1", "random:3", "const0"] {
            let lang = Language::builtin(name, 3).unwrap();
            let game = GameMatrix::materialize(&correctness_game(&lang, &fam).unwrap()).unwrap();
            let v = solve_exact_small(&game).unwrap();
            if name == "x1" || name == "const0" {
                assert!(v.value_hi.abs() < 1e-9, "{name}");
            } else {
                assert!(
                    v.value_lo <= 0.5 + 1e-9 && v.value_hi <= 0.5 + 1e-9,
                    "{name}"
                );
            }
        }
        let parity = Language::parity(3).unwrap();
        let game = GameMatrix::materialize(&correctness_game(&parity, &fam).unwrap()).unwrap();
        let v = solve_exact_small(&game).unwrap();
        assert!((v.value_lo - 0.5).abs() < 1e-9 && (v.value_hi - 0.5).abs() < 1e-9);
    }

    #[test]
    fn anti_checker_json() {
        let parity = Language::parity(4).unwrap();
        let fam = ProgramFamily::dictators(4).unwrap();
        let ac = build_anti_checker(&parity, &fam, 0.125, 3).unwrap();
        let text = ac.to_json_string();
        let back = AntiChecker::from_json_str(&text).unwrap();
        assert_eq!(back.items, ac.items);
        assert_eq!(back.verified, ac.verified);
        assert_eq!(back.value_gap, None);
        let keys: Vec<&str> = [
            "language",
            "family",
            "n",
            "epsilon",
            "items",
            "verified_min_error",
        ]
        .to_vec();
        let mut last = 0;
        for key in keys {
            let at = text.find(&format!("\"{key}\"")).unwrap();
            assert!(at >= last);
            last = at;
        }
    }

    #[test]
    fn family_complexity_examples() {
        let x0 = Language::dictator(3, 0).unwrap();
        let mut fam = ProgramFamily::dictators(3).unwrap();
        fam.programs[2].size = 3;
        assert_eq!(family_complexity(&x0, &fam).unwrap(), Some(3));
        let parity = Language::parity(4).unwrap();
        assert_eq!(
            family_complexity(&parity, &ProgramFamily::dictators(4).unwrap()).unwrap(),
            None
        );
        let empty = Language::constant(3, false).unwrap();
        assert_eq!(family_complexity(&empty, &fam).unwrap(), Some(1));

        assert!(matches!(
            family_complexity_within(&x0, &fam, 5),
            Err(Error::MissingCost(_))
        ));
        for (i, p) in fam.programs.iter_mut().enumerate() {
            p.cost = Some(vec![i as u64; 8]);
        }
        assert_eq!(family_complexity_within(&x0, &fam, 2).unwrap(), Some(3));
        assert_eq!(family_complexity_within(&x0, &fam, 1).unwrap(), None);
    }

    #[test]
    fn sample_hard_examples() {
        let single = AntiChecker {
            language: "l".into(),
            family: "f".into(),
            n: 3,
            items: vec![5],
            epsilon: 0.1,
            guaranteed_error: 0.4,
            verified_min_error: 0.5,
            value_gap: None,
            verified: true,
        };
        assert_eq!(sample_hard(&single, 1, 4).unwrap(), vec!["101"; 4]);
        assert_eq!(single.distribution().probability(5), 1.0);
        let unverified = AntiChecker {
            verified: false,
            ..single.clone()
        };
        assert!(matches!(
            sample_hard(&unverified, 1, 4),
            Err(Error::Unverified)
        ));

        let all = AntiChecker {
            n: 4,
            items: (0..16).collect(),
            ..single
        };
        let draws = sample_hard(&all, 9, 10_000).unwrap();
        assert_eq!(draws, sample_hard(&all, 9, 10_000).unwrap());
        let p: f64 = 1.0 / 16.0;
        let sd = (10_000.0 * p * (1.0 - p)).sqrt();
        for x in 0..16 {
            let s = bitstring(x, 4);
            let hits = draws.iter().filter(|d| **d == s).count() as f64;
            assert!((hits - 10_000.0 * p).abs() <= 3.0 * sd, "{s}: {hits}");
        }
    }

    fn fixture() -> ProgramFamily {
        ProgramFamily::from_cost_matrix(
            "fixture",
            vec![vec![2, 9, 3, 1], vec![8, 2, 2, 9], vec![3, 3, 9, 2]],
        )
        .unwrap()
    }

    #[test]
    fn threshold_game_examples() {
        let fam = fixture();
        let game = GameMatrix::materialize(&threshold_game(&fam, 5).unwrap()).unwrap();
        assert_eq!(
            game.row_vecs(),
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, 0.0]
            ]
        );
        let ones = GameMatrix::materialize(&threshold_game(&fam, 0).unwrap()).unwrap();
        assert!(ones.entries().iter().all(|&x| x == 1.0));
        assert_eq!(solve_exact_small(&ones).unwrap().value_hi, 1.0);
        let zeros = GameMatrix::materialize(&threshold_game(&fam, 9).unwrap()).unwrap();
        assert!(zeros.entries().iter().all(|&x| x == 0.0));
        assert_eq!(solve_exact_small(&zeros).unwrap().value_hi, 0.0);

        assert!(matches!(
            threshold_game(&ProgramFamily::constants(2).unwrap(), 1),
            Err(Error::MissingCost(_))
        ));
        assert!(ProgramFamily::from_cost_matrix("bad", vec![vec![1, 2, 3]]).is_err());
    }

    #[test]
    fn threshold_game_is_monotone_in_t() {
        let fam = fixture();
        for t in 0..10 {
            let a = GameMatrix::materialize(&threshold_game(&fam, t).unwrap()).unwrap();
            let b = GameMatrix::materialize(&threshold_game(&fam, t + 1).unwrap()).unwrap();
            assert!(a.entries().iter().zip(b.entries()).all(|(x, y)| y <= x));
        }
    }

    #[test]
    fn dovetail_anti_checker_examples() {
        let out = dovetail_anti_checker(&fixture(), 5, 0.5, 0).unwrap();
        assert!(out.verified);
        assert_eq!(out.set.len(), 3);
        let costs = cost_table(&fixture()).unwrap();
        assert!(costs
            .iter()
            .all(|row| out.set.items().iter().any(|&j| row[j] > 5)));

        let mut single = vec![0u64; 8];
        single[7] = 10;
        let fam = ProgramFamily::from_cost_matrix("one", vec![single]).unwrap();
        let out = dovetail_anti_checker(&fam, 5, 0.5, 0).unwrap();
        assert_eq!(out.set.items(), &[7]);

        let fam = ProgramFamily::from_cost_matrix("fast", vec![vec![9, 9], vec![1, 2]]).unwrap();
        match dovetail_anti_checker(&fam, 5, 0.5, 0) {
            Err(Error::NeverExceeds { program }) => assert_eq!(program, "p1"),
            other => panic!("expected NeverExceeds, got {other:?}"),
        }
    }

    #[test]
    fn dovetailed_programs_cover_every_input() {
        let fam = fixture();
        let set = dovetail_programs(&fam, 5).unwrap();
        let costs = cost_table(&fam).unwrap();
        assert!((0..4).all(|j| set.items().iter().any(|&i| costs[i][j] <= 5)));
    }

    #[test]
    fn majority_vote_examples() {
        assert_eq!(majority_size(3, 1.0 / 6.0).unwrap(), 39);
        assert!(majority_size(3, 0.0).is_err());

        let maj = Language::majority(3).unwrap();
        let fam = ProgramFamily::dictators(3).unwrap();
        let out = majority_ensemble(&maj, &fam, 0, 20).unwrap();
        assert!(out.verified);
        assert!((out.delta - 1.0 / 6.0).abs() < 1e-9);
        assert_eq!(out.programs.k(), 39);
        assert!(2 * worst_vote_errors(&maj, &fam, &out.programs).unwrap() < 39);

        let parity = Language::parity(3).unwrap();
        assert!(matches!(
            majority_ensemble(&parity, &fam, 0, 5),
            Err(Error::NoValueGap { .. })
        ));
    }
}
