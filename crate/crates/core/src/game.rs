//! Game representations, strategies, payoff evaluation and best responses.
//!
//! Rows belong to Min and columns to Max; entry `(i, j)` is what Min pays Max
//! when row `i` meets column `j`. Everything that evaluates payoffs goes
//! through the [`Payoffs`] trait so the same code runs on dense matrices and
//! on oracle-defined games.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance on the total weight of a mixed strategy.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    /// Row player, pays the entry.
    Min,
    /// Column player, receives the entry.
    Max,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Min => Player::Max,
            Player::Max => Player::Min,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Min => "min",
            Player::Max => "max",
        })
    }
}

impl std::str::FromStr for Player {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Player::Min),
            "max" => Ok(Player::Max),
            other => Err(Error::Parse(format!("unknown player {other:?}"))),
        }
    }
}

/// Read access to a two-player zero-sum game.
pub trait Payoffs {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Min's payment to Max when row `row` meets column `col`.
    fn payoff(&self, row: usize, col: usize) -> f64;
    /// Lower and upper bound on every payoff.
    fn bounds(&self) -> (f64, f64);

    /// The exact payoff range when it is known from a full scan, as for a
    /// dense matrix. Oracles only declare bounds and return `None`.
    fn scanned_range(&self) -> Option<(f64, f64)> {
        None
    }

    /// Number of pure strategies available to `player`.
    fn count(&self, player: Player) -> usize {
        match player {
            Player::Min => self.rows(),
            Player::Max => self.cols(),
        }
    }
}

impl<G: Payoffs + ?Sized> Payoffs for &G {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn payoff(&self, row: usize, col: usize) -> f64 {
        (**self).payoff(row, col)
    }
    fn bounds(&self) -> (f64, f64) {
        (**self).bounds()
    }
    fn scanned_range(&self) -> Option<(f64, f64)> {
        (**self).scanned_range()
    }
}

/// The game seen from Max's side: payoffs are `-Mᵀ`, so Max becomes the
/// minimizing row player. Every Max-side construction runs as the Min-side
/// construction on this view.
#[derive(Debug, Clone, Copy)]
pub struct Mirror<'a, G: ?Sized>(pub &'a G);

impl<G: Payoffs + ?Sized> Payoffs for Mirror<'_, G> {
    fn rows(&self) -> usize {
        self.0.cols()
    }
    fn cols(&self) -> usize {
        self.0.rows()
    }
    fn payoff(&self, row: usize, col: usize) -> f64 {
        -self.0.payoff(col, row)
    }
    fn bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.0.bounds();
        (-hi, -lo)
    }
    fn scanned_range(&self) -> Option<(f64, f64)> {
        self.0.scanned_range().map(|(lo, hi)| (-hi, -lo))
    }
}

/// Dense `rows × cols` payoff matrix with its cached payoff range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameFile", into = "GameFile")]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    payoffs: Vec<f64>,
    range_lo: f64,
    range_hi: f64,
}

/// On-disk JSON layout of a game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    pub rows: usize,
    pub cols: usize,
    pub payoffs: Vec<Vec<f64>>,
}

impl TryFrom<GameFile> for GameMatrix {
    type Error = Error;

    fn try_from(file: GameFile) -> Result<Self> {
        if file.payoffs.len() != file.rows {
            return Err(Error::InvalidGame(format!(
                "declared {} rows but found {}",
                file.rows,
                file.payoffs.len()
            )));
        }
        if let Some(bad) = file.payoffs.iter().position(|row| row.len() != file.cols) {
            return Err(Error::InvalidGame(format!(
                "row {bad} has {} entries, expected {}",
                file.payoffs[bad].len(),
                file.cols
            )));
        }
        GameMatrix::from_rows(file.payoffs)
    }
}

impl From<GameMatrix> for GameFile {
    fn from(game: GameMatrix) -> Self {
        GameFile {
            rows: game.rows,
            cols: game.cols,
            payoffs: game.row_vecs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameFormat {
    Json,
    Csv,
}

impl GameFormat {
    /// `.csv` means CSV, anything else JSON.
    pub fn from_path(path: &Path) -> GameFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => GameFormat::Csv,
            _ => GameFormat::Json,
        }
    }
}

impl GameMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, payoffs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame(
                "a game needs at least one row and one column".into(),
            ));
        }
        if payoffs.len() != rows * cols {
            return Err(Error::InvalidGame(format!(
                "expected {} entries for a {rows}x{cols} game, got {}",
                rows * cols,
                payoffs.len()
            )));
        }
        if let Some(k) = payoffs.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGame(format!(
                "entry ({}, {}) is not finite",
                k / cols,
                k % cols
            )));
        }
        let range_lo = payoffs.iter().copied().fold(f64::INFINITY, f64::min);
        let range_hi = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(GameMatrix {
            rows,
            cols,
            payoffs,
            range_lo,
            range_hi,
        })
    }

    /// Builds a matrix from a list of rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::InvalidGame(format!(
                "ragged matrix: row {bad} has {} entries, row 0 has {c}",
                rows[bad].len()
            )));
        }
        GameMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let payoffs = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        GameMatrix::new(rows, cols, payoffs)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses `r` lines of `c` comma-separated numbers.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, record) in csv.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("csv: {e}")))?;
            let row = record
                .iter()
                .map(|field| {
                    let x: f64 = field.parse().map_err(|_| {
                        Error::Parse(format!("line {}: {field:?} is not a number", line + 1))
                    })?;
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(Error::Parse(format!(
                            "line {}: {field:?} is not finite",
                            line + 1
                        )))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        GameMatrix::from_rows(rows)
    }

    pub fn load(path: &Path, format: Option<GameFormat>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match format.unwrap_or_else(|| GameFormat::from_path(path)) {
            GameFormat::Json => GameMatrix::from_json_str(&text),
            GameFormat::Csv => GameMatrix::from_csv_reader(text.as_bytes()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("game serialization is infallible")
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.payoffs.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.payoffs[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.payoffs[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn range_lo(&self) -> f64 {
        self.range_lo
    }

    pub fn range_hi(&self) -> f64 {
        self.range_hi
    }

    pub fn row_vecs(&self) -> Vec<Vec<f64>> {
        self.payoffs
            .chunks(self.cols)
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// `-Mᵀ`: the same game with the players' roles exchanged.
    pub fn mirrored(&self) -> GameMatrix {
        GameMatrix::from_fn(self.cols, self.rows, |i, j| -self.get(j, i))
            .expect("mirror of a valid game is valid")
    }

    /// Entrywise `a·M + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<GameMatrix> {
        GameMatrix::new(
            self.rows,
            self.cols,
            self.payoffs.iter().map(|x| a * x + b).collect(),
        )
    }

    /// Copies any game into a dense matrix.
    pub fn materialize<G: Payoffs + ?Sized>(game: &G) -> Result<GameMatrix> {
        GameMatrix::from_fn(game.rows(), game.cols(), |i, j| game.payoff(i, j))
    }

    pub fn matching_pennies() -> GameMatrix {
        GameMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    pub fn rock_paper_scissors() -> GameMatrix {
        GameMatrix::from_rows(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    /// Entries drawn uniformly from `[0, 1)`.
    pub fn random_uniform(rows: usize, cols: usize, seed: u64) -> Result<GameMatrix> {
        let mut rng = rng::seeded(seed, 0);
        let payoffs = (0..rows * cols).map(|_| rng.gen::<f64>()).collect();
        GameMatrix::new(rows, cols, payoffs)
    }

    /// Integer entries drawn uniformly from `lo..=hi`.
    pub fn random_integer(
        rows: usize,
        cols: usize,
        lo: i64,
        hi: i64,
        seed: u64,
    ) -> Result<GameMatrix> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "empty payoff range {lo}..={hi}"
            )));
        }
        let mut rng = rng::seeded(seed, 0);
        let span = (hi - lo) as u64 + 1;
        let payoffs = (0..rows * cols)
            .map(|_| (lo + rng.gen_range(0..span) as i64) as f64)
            .collect();
        GameMatrix::new(rows, cols, payoffs)
    }
}

impl Payoffs for GameMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn payoff(&self, row: usize, col: usize) -> f64 {
        self.get(row, col)
    }
    fn bounds(&self) -> (f64, f64) {
        (self.range_lo, self.range_hi)
    }
    fn scanned_range(&self) -> Option<(f64, f64)> {
        Some((self.range_lo, self.range_hi))
    }
}

type EvalFn = dyn Fn(usize, usize) -> f64 + Send + Sync;

/// A game given by its dimensions, declared payoff bounds and an evaluation
/// callback. The callback must be deterministic and stay within the bounds.
#[derive(Clone)]
pub struct PayoffOracle {
    rows: usize,
    cols: usize,
    bounds: (f64, f64),
    evaluate: Arc<EvalFn>,
}

impl fmt::Debug for PayoffOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PayoffOracle")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl PayoffOracle {
    pub fn new<F>(rows: usize, cols: usize, bounds: (f64, f64), evaluate: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame(
                "a game needs at least one row and one column".into(),
            ));
        }
        let (lo, hi) = bounds;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidGame(format!(
                "invalid payoff bounds ({lo}, {hi})"
            )));
        }
        Ok(PayoffOracle {
            rows,
            cols,
            bounds,
            evaluate: Arc::new(evaluate),
        })
    }

    /// Wraps a matrix; the declared bounds are its exact range.
    pub fn from_matrix(game: &GameMatrix) -> Self {
        let game = game.clone();
        let bounds = game.bounds();
        PayoffOracle {
            rows: game.rows(),
            cols: game.cols(),
            bounds,
            evaluate: Arc::new(move |i, j| game.get(i, j)),
        }
    }

    pub fn evaluate(&self, row: usize, col: usize) -> f64 {
        (self.evaluate)(row, col)
    }

    /// Evaluates every entry, failing if any lies outside the declared bounds.
    pub fn to_matrix(&self) -> Result<GameMatrix> {
        let (lo, hi) = self.bounds;
        let mut payoffs = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.evaluate(i, j);
                if !(lo..=hi).contains(&x) {
                    return Err(Error::InvalidGame(format!(
                        "oracle entry ({i}, {j}) = {x} lies outside declared bounds [{lo}, {hi}]"
                    )));
                }
                payoffs.push(x);
            }
        }
        GameMatrix::new(self.rows, self.cols, payoffs)
    }

    /// Samples `samples` random entries and checks bounds and repeatability.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<()> {
        let (lo, hi) = self.bounds;
        let mut rng = rng::seeded(seed, 0);
        for _ in 0..samples {
            let i = rng::index_below(&mut rng, self.rows);
            let j = rng::index_below(&mut rng, self.cols);
            let x = self.evaluate(i, j);
            if !(lo..=hi).contains(&x) {
                return Err(Error::InvalidGame(format!(
                    "oracle entry ({i}, {j}) = {x} lies outside declared bounds [{lo}, {hi}]"
                )));
            }
            if self.evaluate(i, j).to_bits() != x.to_bits() {
                return Err(Error::InvalidGame(format!(
                    "oracle entry ({i}, {j}) is not deterministic"
                )));
            }
        }
        Ok(())
    }
}

impl Payoffs for PayoffOracle {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn payoff(&self, row: usize, col: usize) -> f64 {
        self.evaluate(row, col)
    }
    fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

/// Probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    player: Player,
    weights: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(player: Player, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("no pure strategies".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStrategy(format!(
                "weight {i} is {}",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidStrategy(format!("weights sum to {total}")));
        }
        Ok(MixedStrategy { player, weights })
    }

    /// Scales non-negative weights to sum to one.
    pub fn normalized(player: Player, mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStrategy(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidStrategy("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        MixedStrategy::new(player, weights)
    }

    pub fn uniform(player: Player, n: usize) -> Result<Self> {
        MixedStrategy::new(player, vec![1.0 / n as f64; n])
    }

    pub fn point(player: Player, n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, bound: n });
        }
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        MixedStrategy::new(player, weights)
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices with positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Sorted multiset of pure-strategy indices; plays each item with
/// probability `multiplicity / k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniformMultiset {
    player: Player,
    items: Vec<usize>,
}

impl UniformMultiset {
    pub fn new(player: Player, mut items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidStrategy("empty multiset".into()));
        }
        items.sort_unstable();
        Ok(UniformMultiset { player, items })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn k(&self) -> usize {
        self.items.len()
    }

    /// Distinct items with their multiplicities, ascending.
    pub fn counts(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.items {
            match out.last_mut() {
                Some((last, n)) if *last == i => *n += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.items.last() {
            Some(&max) if max >= n => Err(Error::IndexOutOfRange {
                index: max,
                bound: n,
            }),
            _ => Ok(()),
        }
    }

    /// The induced k-uniform mixed strategy over `n` pure strategies.
    pub fn to_strategy(&self, n: usize) -> Result<MixedStrategy> {
        strategy_from_multiset(self, n)
    }
}

/// Anything that assigns weights to one player's pure strategies.
pub trait Strategy {
    fn player(&self) -> Player;
    /// Fails unless the strategy fits a player with `n` pure strategies.
    fn check_len(&self, n: usize) -> Result<()>;
    /// `(index, weight)` pairs with positive weight, ascending by index.
    fn weighted_support(&self) -> Vec<(usize, f64)>;
}

impl Strategy for MixedStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.weights.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.weights.len(),
            })
        }
    }

    fn weighted_support(&self) -> Vec<(usize, f64)> {
        self.weights
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .collect()
    }
}

impl Strategy for UniformMultiset {
    fn player(&self) -> Player {
        self.player
    }

    fn check_len(&self, n: usize) -> Result<()> {
        self.check_range(n)
    }

    fn weighted_support(&self) -> Vec<(usize, f64)> {
        let k = self.k() as f64;
        self.counts()
            .into_iter()
            .map(|(i, m)| (i, m as f64 / k))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub index: usize,
    pub value: f64,
}

/// Smallest and largest entry.
pub fn payoff_range(game: &GameMatrix) -> (f64, f64) {
    (game.range_lo, game.range_hi)
}

/// `Σᵢⱼ p(i) q(j) M_ij`.
pub fn expected_payoff<G: Payoffs + ?Sized>(
    game: &G,
    p: &MixedStrategy,
    q: &MixedStrategy,
) -> Result<f64> {
    expect_player(p, Player::Min)?;
    expect_player(q, Player::Max)?;
    p.check_len(game.rows())?;
    q.check_len(game.cols())?;
    let q_support = q.weighted_support();
    let mut total = 0.0;
    for (i, pi) in p.weighted_support() {
        let row: f64 = q_support
            .iter()
            .map(|&(j, qj)| qj * game.payoff(i, j))
            .sum();
        total += pi * row;
    }
    Ok(total)
}

fn expect_player<S: Strategy + ?Sized>(s: &S, expected: Player) -> Result<()> {
    if s.player() == expected {
        Ok(())
    } else {
        Err(Error::WrongPlayer {
            expected,
            found: s.player(),
        })
    }
}

/// The opponent's best pure reply to `strategy`.
///
/// Against a Min strategy this is the column maximizing the expected payoff;
/// against a Max strategy, the row minimizing it. Ties go to the lowest index.
pub fn best_response<G, S>(game: &G, strategy: &S) -> Result<BestResponse>
where
    G: Payoffs + ?Sized,
    S: Strategy + ?Sized,
{
    let support = strategy.weighted_support();
    match strategy.player() {
        Player::Min => {
            strategy.check_len(game.rows())?;
            Ok(argmax((0..game.cols()).map(|j| {
                support
                    .iter()
                    .map(|&(i, w)| w * game.payoff(i, j))
                    .sum::<f64>()
            })))
        }
        Player::Max => {
            strategy.check_len(game.cols())?;
            Ok(argmin((0..game.rows()).map(|i| {
                support
                    .iter()
                    .map(|&(j, w)| w * game.payoff(i, j))
                    .sum::<f64>()
            })))
        }
    }
}

pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> BestResponse {
    let mut best = BestResponse {
        index: 0,
        value: f64::NEG_INFINITY,
    };
    for (index, value) in values.enumerate() {
        if value > best.value {
            best = BestResponse { index, value };
        }
    }
    best
}

pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> BestResponse {
    let mut best = BestResponse {
        index: 0,
        value: f64::INFINITY,
    };
    for (index, value) in values.enumerate() {
        if value < best.value {
            best = BestResponse { index, value };
        }
    }
    best
}

/// Weight `multiplicity / k` on each item of the multiset.
pub fn strategy_from_multiset(s: &UniformMultiset, n: usize) -> Result<MixedStrategy> {
    s.check_range(n)?;
    let mut weights = vec![0.0; n];
    for (i, w) in s.weighted_support() {
        weights[i] = w;
    }
    MixedStrategy::new(s.player(), weights)
}

/// Affine map of a game's payoffs onto `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scale {
    pub lo: f64,
    pub span: f64,
}

impl Scale {
    pub fn of<G: Payoffs + ?Sized>(game: &G) -> Scale {
        let (lo, hi) = game.bounds();
        Scale { lo, span: hi - lo }
    }

    pub fn normalize(&self, x: f64) -> f64 {
        if self.span > 0.0 {
            (x - self.lo) / self.span
        } else {
            0.0
        }
    }
}

/// Row-major copy of a game with entries mapped onto `[0, 1]`.
pub(crate) fn normalized_entries<G: Payoffs + ?Sized>(game: &G) -> Vec<f64> {
    let scale = Scale::of(game);
    let (r, c) = (game.rows(), game.cols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(scale.normalize(game.payoff(i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(rows: Vec<Vec<f64>>) -> GameMatrix {
        GameMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn payoff_range_examples() {
        assert_eq!(
            payoff_range(&game(vec![vec![3.0, 1.0], vec![0.0, 2.0]])),
            (0.0, 3.0)
        );
        assert_eq!(payoff_range(&GameMatrix::matching_pennies()), (-1.0, 1.0));
        assert_eq!(payoff_range(&game(vec![vec![5.0]])), (5.0, 5.0));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(GameMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(GameMatrix::from_rows(vec![]).is_err());
        assert!(GameMatrix::from_rows(vec![vec![f64::NAN]]).is_err());
        assert!(GameMatrix::from_rows(vec![vec![1.0, f64::INFINITY]]).is_err());
        assert!(GameMatrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn expected_payoff_examples() {
        let mp = GameMatrix::matching_pennies();
        let half_min = MixedStrategy::uniform(Player::Min, 2).unwrap();
        let half_max = MixedStrategy::uniform(Player::Max, 2).unwrap();
        assert_eq!(expected_payoff(&mp, &half_min, &half_max).unwrap(), 0.0);

        let g = game(vec![vec![3.0, 1.0], vec![0.0, 2.0]]);
        let q = MixedStrategy::new(Player::Max, vec![0.25, 0.75]).unwrap();
        let v = expected_payoff(&g, &MixedStrategy::uniform(Player::Min, 2).unwrap(), &q).unwrap();
        assert!((v - 1.5).abs() < 1e-15);

        for i in 0..2 {
            for j in 0..2 {
                let p = MixedStrategy::point(Player::Min, 2, i).unwrap();
                let q = MixedStrategy::point(Player::Max, 2, j).unwrap();
                assert_eq!(expected_payoff(&g, &p, &q).unwrap(), g.get(i, j));
            }
        }
    }

    #[test]
    fn expected_payoff_checks_dimensions_and_players() {
        let g = GameMatrix::rock_paper_scissors();
        let p = MixedStrategy::uniform(Player::Min, 2).unwrap();
        let q = MixedStrategy::uniform(Player::Max, 3).unwrap();
        assert!(matches!(
            expected_payoff(&g, &p, &q),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
        let p3 = MixedStrategy::uniform(Player::Max, 3).unwrap();
        assert!(matches!(
            expected_payoff(&g, &p3, &q),
            Err(Error::WrongPlayer { .. })
        ));
    }

    #[test]
    fn best_response_examples() {
        let mp = GameMatrix::matching_pennies();
        let row0 = MixedStrategy::point(Player::Min, 2, 0).unwrap();
        assert_eq!(
            best_response(&mp, &row0).unwrap(),
            BestResponse {
                index: 0,
                value: 1.0
            }
        );

        let half = MixedStrategy::uniform(Player::Min, 2).unwrap();
        assert_eq!(
            best_response(&mp, &half).unwrap(),
            BestResponse {
                index: 0,
                value: 0.0
            }
        );

        let g = game(vec![vec![3.0, 1.0], vec![0.0, 2.0]]);
        let q = MixedStrategy::new(Player::Max, vec![0.25, 0.75]).unwrap();
        assert_eq!(
            best_response(&g, &q).unwrap(),
            BestResponse {
                index: 0,
                value: 1.5
            }
        );

        let wrong = MixedStrategy::uniform(Player::Max, 3).unwrap();
        assert!(best_response(&g, &wrong).is_err());
    }

    #[test]
    fn multiset_to_strategy_examples() {
        let s = UniformMultiset::new(Player::Min, vec![1, 0, 0]).unwrap();
        assert_eq!(s.items(), &[0, 0, 1]);
        let p = strategy_from_multiset(&s, 3).unwrap();
        assert_eq!(p.weights(), &[2.0 / 3.0, 1.0 / 3.0, 0.0]);

        let s = UniformMultiset::new(Player::Min, vec![2]).unwrap();
        assert_eq!(
            strategy_from_multiset(&s, 3).unwrap().weights(),
            &[0.0, 0.0, 1.0]
        );

        let s = UniformMultiset::new(Player::Max, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(strategy_from_multiset(&s, 4).unwrap().weights(), &[0.25; 4]);

        assert!(matches!(
            strategy_from_multiset(&s, 3),
            Err(Error::IndexOutOfRange { index: 3, bound: 3 })
        ));
        assert!(UniformMultiset::new(Player::Min, vec![]).is_err());
    }

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(Player::Min, vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(Player::Min, vec![1.5, -0.5]).is_err());
        assert!(MixedStrategy::new(Player::Min, vec![0.5, 0.5 + 1e-10]).is_ok());
        assert!(MixedStrategy::new(Player::Min, vec![]).is_err());
    }

    #[test]
    fn json_and_csv_formats() {
        let g = GameMatrix::from_json_str(r#"{"rows": 2, "cols": 2, "payoffs": [[3, 1], [0, 2]]}"#)
            .unwrap();
        assert_eq!(g, game(vec![vec![3.0, 1.0], vec![0.0, 2.0]]));
        assert!(
            GameMatrix::from_json_str(r#"{"rows": 2, "cols": 2, "payoffs": [[3, 1], [0]]}"#)
                .is_err()
        );
        assert!(GameMatrix::from_json_str(
            r#"{"rows": 3, "cols": 2, "payoffs": [[3, 1], [0, 2]]}"#
        )
        .is_err());

        let back = GameMatrix::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g);

        let c = GameMatrix::from_csv_reader("1, -1\n-1, 1\n".as_bytes()).unwrap();
        assert_eq!(c, GameMatrix::matching_pennies());
        assert_eq!(
            GameMatrix::from_csv_reader(c.to_csv_string().as_bytes()).unwrap(),
            c
        );
        assert!(GameMatrix::from_csv_reader("1,2\n3\n".as_bytes()).is_err());
        assert!(GameMatrix::from_csv_reader("1,NaN\n".as_bytes()).is_err());
        assert!(GameMatrix::from_csv_reader("1,inf\n".as_bytes()).is_err());
        assert!(GameMatrix::from_csv_reader("1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn oracle_checks() {
        let g = GameMatrix::rock_paper_scissors();
        let oracle = PayoffOracle::from_matrix(&g);
        assert_eq!(oracle.to_matrix().unwrap(), g);
        oracle.spot_check(50, 3).unwrap();

        let liar = PayoffOracle::new(3, 3, (0.0, 0.5), move |i, j| g.get(i, j)).unwrap();
        assert!(liar.to_matrix().is_err());
        assert!(liar.spot_check(200, 1).is_err());
        assert!(PayoffOracle::new(1, 1, (1.0, 0.0), |_, _| 0.5).is_err());
    }

    #[test]
    fn mirror_view_matches_materialized() {
        let g = GameMatrix::random_integer(3, 5, -5, 5, 9).unwrap();
        let view = GameMatrix::materialize(&Mirror(&g)).unwrap();
        assert_eq!(view, g.mirrored());
        assert_eq!(Mirror(&g).bounds(), (-g.range_hi(), -g.range_lo()));
    }
}
