//! Game values and optimal strategies.
//!
//! Small games are solved exactly by support enumeration: every square pair
//! of row/column supports is tried in order of size, the two equalizing
//! linear systems are solved, and the first pair whose strategies survive
//! the non-negativity and no-profitable-deviation checks is returned.
//! Extreme optimal strategies always sit on such a pair, so the search is
//! complete. Larger games use multiplicative weights for Min against a
//! best-responding Max, which brackets the value between two certified
//! bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{best_response, normalized_entries, GameMatrix, MixedStrategy, Player, Scale};

/// Default limit on `min(rows, cols)` for the exact solver.
pub const EXACT_DIM_CAP: usize = 16;
/// Default number of support pairs the exact solver examines before giving up.
pub const EXACT_SUPPORT_BUDGET: u64 = 20_000_000;

/// Feasibility tolerance on payoffs normalized to `[0, 1]`.
const FEAS_TOL: f64 = 1e-11;
/// Pivots below this are treated as singular.
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Exact,
    Mwu,
}

/// Bracket on the game value plus the strategies certifying it:
/// `best_response(p).value <= value_hi` and `best_response(q).value >= value_lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub method: SolveMethod,
    pub value_lo: f64,
    pub value_hi: f64,
    pub p: MixedStrategy,
    pub q: MixedStrategy,
    /// Support pairs examined (exact) or rounds played (MWU).
    pub iterations: u64,
    pub converged: bool,
}

impl SolveResult {
    pub fn gap(&self) -> f64 {
        self.value_hi - self.value_lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.value_lo + self.value_hi)
    }

    /// The optimal (or near-optimal) strategy of `player`.
    pub fn strategy(&self, player: Player) -> &MixedStrategy {
        match player {
            Player::Min => &self.p,
            Player::Max => &self.q,
        }
    }

    /// The conservative value estimate for `player`'s guarantee:
    /// the upper end for Min, the lower end for Max.
    pub fn guarantee(&self, player: Player) -> f64 {
        match player {
            Player::Min => self.value_hi,
            Player::Max => self.value_lo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub max_min_dim: usize,
    pub max_support_pairs: Option<u64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            max_min_dim: EXACT_DIM_CAP,
            max_support_pairs: Some(EXACT_SUPPORT_BUDGET),
        }
    }
}

/// Exact solution by support enumeration with the default options.
pub fn solve_exact_small(game: &GameMatrix) -> Result<SolveResult> {
    solve_exact_with(game, &ExactOptions::default())
}

pub fn solve_exact_with(game: &GameMatrix, options: &ExactOptions) -> Result<SolveResult> {
    let (r, c) = (game.rows(), game.cols());
    let min_dim = r.min(c);
    if min_dim > options.max_min_dim {
        return Err(Error::ExactCapExceeded {
            min_dim,
            cap: options.max_min_dim,
        });
    }
    if game.range_lo() == game.range_hi() {
        return Ok(constant_game(game, SolveMethod::Exact, 0));
    }

    let n = normalized_entries(game);
    let mut search = SupportSearch::new(&n, r, c);
    let mut tried: u64 = 0;
    for m in 1..=min_dim {
        let mut rows: Vec<usize> = (0..m).collect();
        loop {
            let mut cols: Vec<usize> = (0..m).collect();
            loop {
                if options
                    .max_support_pairs
                    .is_some_and(|budget| tried >= budget)
                {
                    return Err(Error::SupportBudgetExhausted { tried });
                }
                tried += 1;
                if let Some((p, q)) = search.try_pair(&rows, &cols) {
                    return finish_exact(game, p, q, tried);
                }
                if !next_combination(&mut cols, c) {
                    break;
                }
            }
            if !next_combination(&mut rows, r) {
                break;
            }
        }
    }
    Err(Error::NoExactSolution)
}

fn finish_exact(game: &GameMatrix, p: Vec<f64>, q: Vec<f64>, tried: u64) -> Result<SolveResult> {
    let p = MixedStrategy::normalized(Player::Min, p)?;
    let q = MixedStrategy::normalized(Player::Max, q)?;
    let value_hi = best_response(game, &p)?.value;
    let value_lo = best_response(game, &q)?.value;
    Ok(SolveResult {
        method: SolveMethod::Exact,
        value_lo: value_lo.min(value_hi),
        value_hi: value_hi.max(value_lo),
        p,
        q,
        iterations: tried,
        converged: true,
    })
}

fn constant_game(game: &GameMatrix, method: SolveMethod, iterations: u64) -> SolveResult {
    let value = game.range_lo();
    SolveResult {
        method,
        value_lo: value,
        value_hi: value,
        p: MixedStrategy::point(Player::Min, game.rows(), 0).expect("row 0 exists"),
        q: MixedStrategy::point(Player::Max, game.cols(), 0).expect("column 0 exists"),
        iterations,
        converged: true,
    }
}

/// Advances `combo` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for t in i + 1..k {
                combo[t] = combo[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Scratch space for testing support pairs on a normalized matrix.
struct SupportSearch<'a> {
    n: &'a [f64],
    rows: usize,
    cols: usize,
    system: Vec<f64>,
    rhs: Vec<f64>,
}

impl<'a> SupportSearch<'a> {
    fn new(n: &'a [f64], rows: usize, cols: usize) -> Self {
        let dim = rows.min(cols) + 1;
        SupportSearch {
            n,
            rows,
            cols,
            system: vec![0.0; dim * dim],
            rhs: vec![0.0; dim],
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.n[i * self.cols + j]
    }

    /// Solves both equalization systems on `(support_rows, support_cols)` and
    /// returns full-length `(p, q)` if they form an equilibrium.
    fn try_pair(
        &mut self,
        support_rows: &[usize],
        support_cols: &[usize],
    ) -> Option<(Vec<f64>, Vec<f64>)> {
        let m = support_rows.len();
        let dim = m + 1;

        // Max: Σ_b N[I_a, J_b] q_b - v = 0 for each a, Σ_b q_b = 1.
        for (a, &i) in support_rows.iter().enumerate() {
            for (b, &j) in support_cols.iter().enumerate() {
                self.system[a * dim + b] = self.at(i, j);
            }
            self.system[a * dim + m] = -1.0;
            self.rhs[a] = 0.0;
        }
        self.fill_sum_row(m);
        if !solve_dense(&mut self.system[..dim * dim], &mut self.rhs[..dim], dim) {
            return None;
        }
        let v = self.rhs[m];
        if self.rhs[..m].iter().any(|&x| x < -FEAS_TOL) {
            return None;
        }
        let q_support: Vec<f64> = self.rhs[..m].iter().map(|&x| x.max(0.0)).collect();
        for i in 0..self.rows {
            let value: f64 = support_cols
                .iter()
                .zip(&q_support)
                .map(|(&j, &w)| w * self.at(i, j))
                .sum();
            if value < v - FEAS_TOL {
                return None;
            }
        }

        // Min: Σ_a N[I_a, J_b] p_a - v = 0 for each b, Σ_a p_a = 1.
        for (b, &j) in support_cols.iter().enumerate() {
            for (a, &i) in support_rows.iter().enumerate() {
                self.system[b * dim + a] = self.at(i, j);
            }
            self.system[b * dim + m] = -1.0;
            self.rhs[b] = 0.0;
        }
        self.fill_sum_row(m);
        if !solve_dense(&mut self.system[..dim * dim], &mut self.rhs[..dim], dim) {
            return None;
        }
        let v_min = self.rhs[m];
        if (v_min - v).abs() > FEAS_TOL || self.rhs[..m].iter().any(|&x| x < -FEAS_TOL) {
            return None;
        }
        let p_support: Vec<f64> = self.rhs[..m].iter().map(|&x| x.max(0.0)).collect();
        for j in 0..self.cols {
            let value: f64 = support_rows
                .iter()
                .zip(&p_support)
                .map(|(&i, &w)| w * self.at(i, j))
                .sum();
            if value > v + FEAS_TOL {
                return None;
            }
        }

        let mut p = vec![0.0; self.rows];
        for (&i, &w) in support_rows.iter().zip(&p_support) {
            p[i] = w;
        }
        let mut q = vec![0.0; self.cols];
        for (&j, &w) in support_cols.iter().zip(&q_support) {
            q[j] = w;
        }
        Some((p, q))
    }

    fn fill_sum_row(&mut self, m: usize) {
        let dim = m + 1;
        for b in 0..m {
            self.system[m * dim + b] = 1.0;
        }
        self.system[m * dim + m] = 0.0;
        self.rhs[m] = 1.0;
    }
}

/// Gaussian elimination with partial pivoting on a row-major `dim × dim`
/// system. The solution overwrites `rhs`; returns false on a tiny pivot.
fn solve_dense(a: &mut [f64], rhs: &mut [f64], dim: usize) -> bool {
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&x, &y| a[x * dim + col].abs().total_cmp(&a[y * dim + col].abs()))
            .expect("non-empty pivot range");
        if a[pivot * dim + col].abs() < PIVOT_TOL {
            return false;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(pivot * dim + k, col * dim + k);
            }
            rhs.swap(pivot, col);
        }
        let diag = a[col * dim + col];
        for row in col + 1..dim {
            let factor = a[row * dim + col] / diag;
            if factor != 0.0 {
                for k in col..dim {
                    a[row * dim + k] -= factor * a[col * dim + k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for k in row + 1..dim {
            acc -= a[row * dim + k] * rhs[k];
        }
        rhs[row] = acc / a[row * dim + row];
    }
    rhs.iter().all(|x| x.is_finite())
}

/// Rounds of multiplicative weights that bring the duality gap below
/// `delta` on a game of payoff span `span` with `rows` rows.
///
/// With losses in `[0, 1]` and a fixed rate `sqrt(ln r / T)`, the averaged
/// strategies have gap at most `1.125·sqrt(ln r / T)`; `T = 2·ln r / δ²`
/// keeps that below `0.8·δ`.
pub fn mwu_iteration_budget(rows: usize, delta: f64, span: f64) -> u64 {
    if span <= 0.0 || rows <= 1 {
        return 1;
    }
    let d = delta / span;
    (2.0 * (rows as f64).ln() / (d * d)).ceil().max(1.0) as u64
}

/// Multiplicative weights for Min against Max's best responses.
///
/// Losses are normalized to `[0, 1]` and the rate is `sqrt(ln r / max_iters)`.
/// Stops once the bracket is at most `delta` wide; otherwise the result is
/// returned with `converged == false`.
pub fn solve_mwu(game: &GameMatrix, delta: f64, max_iters: u64) -> Result<SolveResult> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter(
            "max_iters must be at least 1".into(),
        ));
    }
    if game.range_lo() == game.range_hi() {
        return Ok(constant_game(game, SolveMethod::Mwu, 1));
    }

    let (r, c) = (game.rows(), game.cols());
    let scale = Scale::of(game);
    let n = normalized_entries(game);
    let eta = ((r as f64).ln() / max_iters as f64).sqrt();
    let factor: Vec<f64> = n.iter().map(|x| (-eta * x).exp()).collect();
    let target = delta / scale.span;

    let mut w = vec![1.0 / r as f64; r];
    let mut pn = vec![0.0; c];
    let mut acc_p = vec![0.0; r];
    let mut acc_pn = vec![0.0; c];
    let mut acc_nq = vec![0.0; r];
    let mut counts = vec![0u64; c];

    let mut best_hi = f64::INFINITY;
    let mut best_p = w.clone();
    let mut best_lo = f64::NEG_INFINITY;
    let mut best_q = vec![0.0; c];
    let mut rounds = 0;

    for t in 1..=max_iters {
        rounds = t;
        pn.iter_mut().for_each(|x| *x = 0.0);
        for (i, &wi) in w.iter().enumerate() {
            if wi > 0.0 {
                for (acc, &x) in pn.iter_mut().zip(&n[i * c..(i + 1) * c]) {
                    *acc += wi * x;
                }
            }
        }
        let reply = crate::game::argmax(pn.iter().copied()).index;

        for (acc, &wi) in acc_p.iter_mut().zip(&w) {
            *acc += wi;
        }
        for (acc, &x) in acc_pn.iter_mut().zip(&pn) {
            *acc += x;
        }
        for (i, acc) in acc_nq.iter_mut().enumerate() {
            *acc += n[i * c + reply];
        }
        counts[reply] += 1;

        let tf = t as f64;
        let hi = acc_pn.iter().copied().fold(f64::NEG_INFINITY, f64::max) / tf;
        let lo = acc_nq.iter().copied().fold(f64::INFINITY, f64::min) / tf;
        if hi < best_hi {
            best_hi = hi;
            best_p.iter_mut().zip(&acc_p).for_each(|(b, a)| *b = a / tf);
        }
        if lo > best_lo {
            best_lo = lo;
            best_q
                .iter_mut()
                .zip(&counts)
                .for_each(|(b, &k)| *b = k as f64 / tf);
        }
        if best_hi - best_lo <= target {
            break;
        }

        let mut total = 0.0;
        for (i, wi) in w.iter_mut().enumerate() {
            *wi *= factor[i * c + reply];
            total += *wi;
        }
        w.iter_mut().for_each(|wi| *wi /= total);
    }

    let p = MixedStrategy::normalized(Player::Min, best_p)?;
    let q = MixedStrategy::normalized(Player::Max, best_q)?;
    let value_hi = best_response(game, &p)?.value;
    let value_lo = best_response(game, &q)?.value;
    let converged = value_hi - value_lo <= delta + 1e-12 * scale.span;
    Ok(SolveResult {
        method: SolveMethod::Mwu,
        value_lo,
        value_hi,
        p,
        q,
        iterations: rounds,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target bracket width for the MWU fallback, in payoff units.
    pub delta: f64,
    /// Round limit for MWU; defaults to [`mwu_iteration_budget`].
    pub max_iters: Option<u64>,
    pub exact: ExactOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            delta: 1e-3,
            max_iters: None,
            exact: ExactOptions::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_delta(delta: f64) -> Self {
        SolveOptions {
            delta,
            ..SolveOptions::default()
        }
    }
}

/// Exact when support enumeration is allowed and finishes within its
/// budget, multiplicative weights otherwise.
pub fn solve_auto(game: &GameMatrix, options: &SolveOptions) -> Result<SolveResult> {
    match solve_exact_with(game, &options.exact) {
        Ok(result) => Ok(result),
        Err(Error::ExactCapExceeded { .. }) | Err(Error::SupportBudgetExhausted { .. }) => {
            let span = game.range_hi() - game.range_lo();
            let iters = options
                .max_iters
                .unwrap_or_else(|| mwu_iteration_budget(game.rows(), options.delta, span));
            solve_mwu(game, options.delta, iters)
        }
        Err(e) => Err(e),
    }
}
