//! Sparse strategies: k-uniform multisets and dovetailing sets.
//!
//! A k-uniform strategy plays uniformly from a multiset of `k` pure
//! strategies. Drawing the multiset i.i.d. from an optimal strategy gives,
//! for `k ≥ ln(c) / 2ε²`, a strategy within `ε·(hi − lo)` of the value with
//! positive probability; [`sample_k_uniform`] turns that into an algorithm by
//! verifying each draw and retrying. [`greedy_k_uniform`] reaches the same
//! bound deterministically by minimizing an exponential potential.
//!
//! A dovetailing set is played "all at once": against each opposing pure
//! strategy the best member of the set counts.
//!
//! Max-side constructions run as the Min-side construction on the mirrored
//! game `-Mᵀ`.

use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    best_response, normalized_entries, GameMatrix, Mirror, MixedStrategy, Payoffs, Player,
    Strategy, UniformMultiset,
};
use crate::rng;
use crate::solver::{solve_auto, SolveOptions, SolveResult};

pub const DEFAULT_MAX_ATTEMPTS: usize = 20;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )))
    }
}

fn check_count(opponent_count: usize) -> Result<()> {
    if opponent_count == 0 {
        Err(Error::InvalidParameter(
            "opponent has no pure strategies".into(),
        ))
    } else {
        Ok(())
    }
}

/// `max(1, ⌈ln(c) / 2ε²⌉)`: multiset size for an ε-optimal k-uniform strategy.
pub fn k_uniform_bound(opponent_count: usize, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_count(opponent_count)?;
    let k = ((opponent_count as f64).ln() / (2.0 * epsilon * epsilon)).ceil();
    Ok((k as usize).max(1))
}

/// `max(1, ⌈ln(c) / ln(1 + ε)⌉)`: dovetailing set size.
pub fn dovetail_bound(opponent_count: usize, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_count(opponent_count)?;
    let k = ((opponent_count as f64).ln() / epsilon.ln_1p()).ceil();
    Ok((k as usize).max(1))
}

/// Slack `sqrt(ln c / 2k)` guaranteed by a k-uniform strategy.
pub fn k_uniform_epsilon(opponent_count: usize, k: usize) -> f64 {
    ((opponent_count.max(1) as f64).ln() / (2.0 * k.max(1) as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyParams {
    pub epsilon: f64,
    pub k: usize,
    pub player: Player,
    pub seed: u64,
    pub max_attempts: usize,
}

impl SparsifyParams {
    /// `k` from [`k_uniform_bound`], seed 0 and the default attempt limit.
    pub fn for_game<G: Payoffs + ?Sized>(game: &G, player: Player, epsilon: f64) -> Result<Self> {
        let k = k_uniform_bound(game.count(player.opponent()), epsilon)?;
        Ok(SparsifyParams {
            epsilon,
            k,
            player,
            seed: 0,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParameter(
                "max_attempts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A k-uniform strategy together with its measured exploitability.
///
/// For Min the exploitability is the best payoff Max can get against it; for
/// Max, the least payoff Min can hold it to.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStrategy {
    pub multiset: UniformMultiset,
    pub exploitability: f64,
    pub epsilon: f64,
    /// The exploitability met the target threshold.
    pub verified: bool,
    pub attempts: usize,
}

/// JSON form shared by multisets and dovetailing sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRecord {
    pub player: Player,
    pub items: Vec<usize>,
    pub epsilon: f64,
    pub verified: bool,
    pub exploitability: f64,
}

impl SparseStrategy {
    pub fn to_record(&self) -> StrategyRecord {
        StrategyRecord {
            player: self.multiset.player(),
            items: self.multiset.items().to_vec(),
            epsilon: self.epsilon,
            verified: self.verified,
            exploitability: self.exploitability,
        }
    }
}

impl StrategyRecord {
    pub fn multiset(&self) -> Result<UniformMultiset> {
        UniformMultiset::new(self.player, self.items.clone())
    }

    pub fn dovetail_set(&self) -> Result<DovetailSet> {
        DovetailSet::new(self.player, self.items.clone())
    }
}

/// `k` i.i.d. draws from `source`, using stream `attempt` of generator `seed`.
pub fn draw_multiset(
    source: &MixedStrategy,
    k: usize,
    seed: u64,
    attempt: u64,
) -> Result<UniformMultiset> {
    let dist = WeightedIndex::new(source.weights())
        .map_err(|e| Error::InvalidStrategy(format!("cannot sample from source: {e}")))?;
    let mut rng = rng::seeded(seed, attempt);
    let items = (0..k).map(|_| dist.sample(&mut rng)).collect();
    UniformMultiset::new(source.player(), items)
}

fn meets(player: Player, exploitability: f64, threshold: f64) -> bool {
    match player {
        Player::Min => exploitability <= threshold,
        Player::Max => exploitability >= threshold,
    }
}

fn better(player: Player, a: f64, b: f64) -> bool {
    match player {
        Player::Min => a < b,
        Player::Max => a > b,
    }
}

/// Draw-verify-retry against an explicit threshold. Returns the first passing
/// multiset, else the best one seen with `verified == false`.
pub(crate) fn sample_until<G: Payoffs + ?Sized>(
    game: &G,
    source: &MixedStrategy,
    k: usize,
    threshold: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<SparseStrategy> {
    let player = source.player();
    source.check_len(game.count(player))?;
    let mut best: Option<(UniformMultiset, f64)> = None;
    for attempt in 0..max_attempts {
        let multiset = draw_multiset(source, k, seed, attempt as u64)?;
        let exploitability = best_response(game, &multiset)?.value;
        if meets(player, exploitability, threshold) {
            return Ok(SparseStrategy {
                multiset,
                exploitability,
                epsilon: f64::NAN,
                verified: true,
                attempts: attempt + 1,
            });
        }
        if best
            .as_ref()
            .is_none_or(|(_, b)| better(player, exploitability, *b))
        {
            best = Some((multiset, exploitability));
        }
    }
    let (multiset, exploitability) = best.expect("at least one attempt");
    Ok(SparseStrategy {
        multiset,
        exploitability,
        epsilon: f64::NAN,
        verified: false,
        attempts: max_attempts,
    })
}

/// Samples a k-uniform strategy for `params.player` from `source`.
///
/// `value` is the game value (or the conservative end of a solver bracket).
/// A Min multiset passes when its exploitability is at most
/// `value + ε·(hi − lo)`; a Max multiset when it is at least
/// `value − ε·(hi − lo)`.
pub fn sample_k_uniform<G: Payoffs + ?Sized>(
    game: &G,
    source: &MixedStrategy,
    value: f64,
    params: &SparsifyParams,
) -> Result<SparseStrategy> {
    params.validate()?;
    if source.player() != params.player {
        return Err(Error::WrongPlayer {
            expected: params.player,
            found: source.player(),
        });
    }
    let (lo, hi) = game.bounds();
    let slack = params.epsilon * (hi - lo);
    let threshold = match params.player {
        Player::Min => value + slack,
        Player::Max => value - slack,
    };
    let mut out = sample_until(
        game,
        source,
        params.k,
        threshold,
        params.seed,
        params.max_attempts,
    )?;
    out.epsilon = params.epsilon;
    Ok(out)
}

/// Deterministic k-uniform strategy built one pure strategy at a time.
///
/// Each step adds the row minimizing `Σⱼ exp(η·Sⱼ)`, where `Sⱼ` is the
/// cumulative normalized payoff to column `j` (mirrored for Max) and
/// `η = sqrt(8·ln c / k)`. The potential argument then bounds the
/// exploitability by `v + sqrt(ln c / 2k)·(hi − lo)`.
///
/// Returns the multiset and its exploitability.
pub fn greedy_k_uniform(
    game: &GameMatrix,
    k: usize,
    player: Player,
) -> Result<(UniformMultiset, f64)> {
    greedy_k_uniform_on(game, k, player)
}

pub(crate) fn greedy_k_uniform_on<G: Payoffs + ?Sized>(
    game: &G,
    k: usize,
    player: Player,
) -> Result<(UniformMultiset, f64)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let items = match player {
        Player::Min => greedy_min(game, k),
        Player::Max => greedy_min(&Mirror(game), k),
    };
    let multiset = UniformMultiset::new(player, items)?;
    let exploitability = best_response(game, &multiset)?.value;
    Ok((multiset, exploitability))
}

fn greedy_min<G: Payoffs + ?Sized>(game: &G, k: usize) -> Vec<usize> {
    let (r, c) = (game.rows(), game.cols());
    let n = normalized_entries(game);
    let eta = if c > 1 {
        (8.0 * (c as f64).ln() / k as f64).sqrt()
    } else {
        1.0
    };
    let boost: Vec<f64> = n.iter().map(|x| (eta * x).exp()).collect();
    let mut cumulative = vec![0.0; c];
    let mut weight = vec![0.0; c];
    let mut items = Vec::with_capacity(k);
    for _ in 0..k {
        let top = cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (w, s) in weight.iter_mut().zip(&cumulative) {
            *w = (eta * (s - top)).exp();
        }
        let mut pick = 0;
        let mut pick_score = f64::INFINITY;
        for i in 0..r {
            let score: f64 = weight
                .iter()
                .zip(&boost[i * c..(i + 1) * c])
                .map(|(w, b)| w * b)
                .sum();
            if score < pick_score {
                pick_score = score;
                pick = i;
            }
        }
        items.push(pick);
        for (s, x) in cumulative.iter_mut().zip(&n[pick * c..(pick + 1) * c]) {
            *s += x;
        }
    }
    items
}

/// Set of distinct pure strategies played simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DovetailSet {
    player: Player,
    items: Vec<usize>,
}

impl DovetailSet {
    /// Sorts and deduplicates `items`.
    pub fn new(player: Player, mut items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidStrategy("empty dovetailing set".into()));
        }
        items.sort_unstable();
        items.dedup();
        Ok(DovetailSet { player, items })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// For Min: `maxⱼ min_{i∈S} M_ij`. For Max: `minᵢ max_{j∈S} M_ij`.
pub fn dovetail_exploitability<G: Payoffs + ?Sized>(game: &G, s: &DovetailSet) -> Result<f64> {
    let own = game.count(s.player);
    if let Some(&last) = s.items.last() {
        if last >= own {
            return Err(Error::IndexOutOfRange {
                index: last,
                bound: own,
            });
        }
    }
    Ok(match s.player {
        Player::Min => (0..game.cols())
            .map(|j| {
                s.items
                    .iter()
                    .map(|&i| game.payoff(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max),
        Player::Max => (0..game.rows())
            .map(|i| {
                s.items
                    .iter()
                    .map(|&j| game.payoff(i, j))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DovetailMethod {
    Sampled { seed: u64, max_attempts: usize },
    GreedyCover,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DovetailOutcome {
    pub set: DovetailSet,
    /// [`dovetail_exploitability`] of `set`.
    pub achieved: f64,
    /// `v + ε(v − lo)` for Min, `v − ε(hi − v)` for Max.
    pub threshold: f64,
    pub epsilon: f64,
    pub verified: bool,
    /// `|set| <= dovetail_bound(opponent_count, ε)`.
    pub within_bound: bool,
    pub attempts: usize,
}

impl DovetailOutcome {
    pub fn to_record(&self) -> StrategyRecord {
        StrategyRecord {
            player: self.set.player(),
            items: self.set.items().to_vec(),
            epsilon: self.epsilon,
            verified: self.verified,
            exploitability: self.achieved,
        }
    }
}

/// Dovetailing set for `player`, solving the game first.
pub fn dovetail_set(
    game: &GameMatrix,
    epsilon: f64,
    player: Player,
    method: DovetailMethod,
) -> Result<DovetailOutcome> {
    check_epsilon(epsilon)?;
    let solution = solve_auto(game, &SolveOptions::default())?;
    dovetail_set_with(game, &solution, epsilon, player, method)
}

/// Dovetailing set for `player` given a solution of the game.
///
/// The threshold uses the solution's conservative value estimate
/// (`value_hi` for Min, `value_lo` for Max).
pub fn dovetail_set_with<G: Payoffs + ?Sized>(
    game: &G,
    solution: &SolveResult,
    epsilon: f64,
    player: Player,
    method: DovetailMethod,
) -> Result<DovetailOutcome> {
    check_epsilon(epsilon)?;
    let (lo, hi) = game.bounds();
    let v = solution.guarantee(player);
    let threshold = match player {
        Player::Min => v + epsilon * (v - lo),
        Player::Max => v - epsilon * (hi - v),
    };
    let bound = dovetail_bound(game.count(player.opponent()), epsilon)?;

    let (set, attempts) = match method {
        DovetailMethod::Sampled { seed, max_attempts } => {
            if max_attempts == 0 {
                return Err(Error::InvalidParameter(
                    "max_attempts must be at least 1".into(),
                ));
            }
            let source = solution.strategy(player);
            source.check_len(game.count(player))?;
            let mut best: Option<(DovetailSet, f64)> = None;
            let mut found = None;
            for attempt in 0..max_attempts {
                let draw = draw_multiset(source, bound, seed, attempt as u64)?;
                let set = DovetailSet::new(player, draw.items().to_vec())?;
                let achieved = dovetail_exploitability(game, &set)?;
                if meets(player, achieved, threshold) {
                    found = Some((set, attempt + 1));
                    break;
                }
                if best
                    .as_ref()
                    .is_none_or(|(_, b)| better(player, achieved, *b))
                {
                    best = Some((set, achieved));
                }
            }
            match found {
                Some(hit) => hit,
                None => (best.expect("at least one attempt").0, max_attempts),
            }
        }
        DovetailMethod::GreedyCover => (greedy_cover(game, player, threshold)?, 1),
    };

    let achieved = dovetail_exploitability(game, &set)?;
    Ok(DovetailOutcome {
        verified: meets(player, achieved, threshold),
        within_bound: set.len() <= bound,
        set,
        achieved,
        threshold,
        epsilon,
        attempts,
    })
}

/// Greedy set cover: for Min, repeatedly takes the row with `M_ij <= threshold`
/// on the most still-uncovered columns (lowest index on ties) until every
/// column is covered. Max is mirrored (`M_ij >= threshold`, rows covered).
pub fn greedy_cover<G: Payoffs + ?Sized>(
    game: &G,
    player: Player,
    threshold: f64,
) -> Result<DovetailSet> {
    let items = match player {
        Player::Min => greedy_cover_min(game, threshold)?,
        Player::Max => greedy_cover_min(&Mirror(game), -threshold).map_err(|e| match e {
            Error::Uncoverable { target, .. } => Error::Uncoverable { target, threshold },
            other => other,
        })?,
    };
    DovetailSet::new(player, items)
}

fn greedy_cover_min<G: Payoffs + ?Sized>(game: &G, threshold: f64) -> Result<Vec<usize>> {
    let (r, c) = (game.rows(), game.cols());
    let covers: Vec<Vec<bool>> = (0..r)
        .map(|i| (0..c).map(|j| game.payoff(i, j) <= threshold).collect())
        .collect();
    if let Some(target) = (0..c).find(|&j| !covers.iter().any(|row| row[j])) {
        return Err(Error::Uncoverable { target, threshold });
    }
    let mut uncovered = vec![true; c];
    let mut remaining = c;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let (pick, gain) = (0..r)
            .map(|i| (i, (0..c).filter(|&j| uncovered[j] && covers[i][j]).count()))
            .fold(
                (0, 0),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
        debug_assert!(gain > 0);
        chosen.push(pick);
        for j in 0..c {
            if covers[pick][j] && uncovered[j] {
                uncovered[j] = false;
                remaining -= 1;
            }
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_exact_small;

    fn game(rows: Vec<Vec<f64>>) -> GameMatrix {
        GameMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn k_uniform_bound_examples() {
        assert_eq!(k_uniform_bound(2, 0.5).unwrap(), 2);
        assert_eq!(k_uniform_bound(1024, 0.1).unwrap(), 347);
        assert_eq!(k_uniform_bound(1, 0.3).unwrap(), 1);
        assert_eq!(k_uniform_bound(100, 0.1).unwrap(), 231);
        assert!(k_uniform_bound(10, 0.0).is_err());
        assert!(k_uniform_bound(10, -1.0).is_err());
        assert!(k_uniform_bound(0, 0.1).is_err());
    }

    #[test]
    fn dovetail_bound_examples() {
        assert_eq!(dovetail_bound(1024, 0.5).unwrap(), 18);
        assert_eq!(dovetail_bound(2, 1.0).unwrap(), 1);
        assert_eq!(dovetail_bound(1, 0.7).unwrap(), 1);
        assert_eq!(dovetail_bound(50, 0.5).unwrap(), 10);
        assert!(dovetail_bound(3, 0.0).is_err());
    }

    #[test]
    fn sample_matching_pennies_single_draw() {
        let mp = GameMatrix::matching_pennies();
        let source = MixedStrategy::uniform(Player::Min, 2).unwrap();
        let eps = k_uniform_epsilon(2, 1);
        assert!((eps * 2.0 - 1.1774).abs() < 1e-4);
        let params = SparsifyParams {
            epsilon: eps,
            k: 1,
            player: Player::Min,
            seed: 7,
            max_attempts: 1,
        };
        let out = sample_k_uniform(&mp, &source, 0.0, &params).unwrap();
        assert_eq!(out.multiset.k(), 1);
        assert_eq!(out.exploitability, 1.0);
        assert!(out.verified);
    }

    #[test]
    fn sample_point_mass_is_deterministic() {
        let g = game(vec![vec![3.0, 1.0], vec![0.0, 2.0]]);
        let source = MixedStrategy::point(Player::Min, 2, 1).unwrap();
        let params = SparsifyParams {
            epsilon: 0.1,
            k: 5,
            player: Player::Min,
            seed: 1,
            max_attempts: 3,
        };
        let out = sample_k_uniform(&g, &source, 1.5, &params).unwrap();
        assert_eq!(out.multiset.items(), &[1; 5]);
        assert_eq!(out.exploitability, 2.0);
        assert!(!out.verified);
        assert_eq!(out.attempts, 3);
    }

    #[test]
    fn sample_rps_meets_target() {
        let rps = GameMatrix::rock_paper_scissors();
        let source = MixedStrategy::uniform(Player::Min, 3).unwrap();
        let params = SparsifyParams {
            epsilon: 0.34,
            k: 5,
            player: Player::Min,
            seed: 3,
            max_attempts: 20,
        };
        let out = sample_k_uniform(&rps, &source, 0.0, &params).unwrap();
        assert!(out.verified);
        assert!(out.exploitability <= 0.68);
        let scan = (0..3)
            .map(|j| {
                out.multiset
                    .items()
                    .iter()
                    .map(|&i| rps.get(i, j))
                    .sum::<f64>()
                    / 5.0
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(scan, out.exploitability);
    }

    #[test]
    fn sample_rejects_mismatched_source() {
        let rps = GameMatrix::rock_paper_scissors();
        let params = SparsifyParams::for_game(&rps, Player::Min, 0.2).unwrap();
        let wrong_len = MixedStrategy::uniform(Player::Min, 2).unwrap();
        assert!(sample_k_uniform(&rps, &wrong_len, 0.0, &params).is_err());
        let wrong_player = MixedStrategy::uniform(Player::Max, 3).unwrap();
        assert!(sample_k_uniform(&rps, &wrong_player, 0.0, &params).is_err());
    }

    #[test]
    fn greedy_examples() {
        let mp = GameMatrix::matching_pennies();
        let (s, x) = greedy_k_uniform(&mp, 2, Player::Min).unwrap();
        assert_eq!(s.items(), &[0, 1]);
        assert_eq!(x, 0.0);

        let row = game(vec![vec![4.0, -2.0, 7.0]]);
        let (s, x) = greedy_k_uniform(&row, 3, Player::Min).unwrap();
        assert_eq!(s.items(), &[0, 0, 0]);
        assert_eq!(x, 7.0);

        let g = game(vec![vec![3.0, 1.0], vec![0.0, 2.0]]);
        let (_, x) = greedy_k_uniform(&g, 2, Player::Min).unwrap();
        assert!(x <= 1.5 + (2f64.ln() / 4.0).sqrt() * 3.0);

        assert!(greedy_k_uniform(&g, 0, Player::Min).is_err());
    }

    #[test]
    fn greedy_single_column_finds_best_row() {
        let g = game(vec![vec![3.0], vec![-1.0], vec![2.0]]);
        let (s, x) = greedy_k_uniform(&g, 4, Player::Min).unwrap();
        assert_eq!(s.items(), &[1; 4]);
        assert_eq!(x, -1.0);
    }

    #[test]
    fn dovetail_exploitability_examples() {
        let mp = GameMatrix::matching_pennies();
        let both = DovetailSet::new(Player::Min, vec![1, 0]).unwrap();
        assert_eq!(dovetail_exploitability(&mp, &both).unwrap(), -1.0);
        let one = DovetailSet::new(Player::Min, vec![0]).unwrap();
        assert_eq!(dovetail_exploitability(&mp, &one).unwrap(), 1.0);
        let rps = GameMatrix::rock_paper_scissors();
        let all = DovetailSet::new(Player::Min, vec![0, 1, 2]).unwrap();
        assert_eq!(dovetail_exploitability(&rps, &all).unwrap(), -1.0);
        let max_all = DovetailSet::new(Player::Max, vec![0, 1, 2]).unwrap();
        assert_eq!(dovetail_exploitability(&rps, &max_all).unwrap(), 1.0);
        let bad = DovetailSet::new(Player::Min, vec![4]).unwrap();
        assert!(dovetail_exploitability(&rps, &bad).is_err());
        assert!(DovetailSet::new(Player::Min, vec![]).is_err());
        assert_eq!(
            DovetailSet::new(Player::Min, vec![2, 0, 2])
                .unwrap()
                .items(),
            &[0, 2]
        );
    }

    #[test]
    fn dovetail_set_examples() {
        let mp = GameMatrix::matching_pennies();
        let sampled = DovetailMethod::Sampled {
            seed: 0,
            max_attempts: 20,
        };
        let out = dovetail_set(&mp, 1.0, Player::Min, sampled).unwrap();
        assert_eq!(out.set.len(), 1);
        assert_eq!(out.achieved, 1.0);
        assert_eq!(out.threshold, 1.0);
        assert!(out.verified && out.within_bound);

        let out = dovetail_set(&mp, 0.5, Player::Min, sampled).unwrap();
        assert_eq!(out.set.items(), &[0, 1]);
        assert_eq!(out.achieved, -1.0);
        assert!(out.verified);
        let out = dovetail_set(&mp, 0.5, Player::Min, DovetailMethod::GreedyCover).unwrap();
        assert_eq!(out.set.items(), &[0, 1]);
        assert!(out.verified);

        let one = game(vec![vec![4.0]]);
        for method in [sampled, DovetailMethod::GreedyCover] {
            let out = dovetail_set(&one, 0.3, Player::Min, method).unwrap();
            assert_eq!(out.set.items(), &[0]);
            assert_eq!(out.achieved, 4.0);
        }
    }

    #[test]
    fn greedy_cover_reports_uncoverable_columns() {
        let g = game(vec![vec![0.0, 5.0], vec![1.0, 6.0]]);
        assert!(matches!(
            greedy_cover(&g, Player::Min, 2.0),
            Err(Error::Uncoverable { target: 1, .. })
        ));
        assert!(matches!(
            greedy_cover(&g, Player::Max, 5.5),
            Err(Error::Uncoverable { target: 0, .. })
        ));
    }

    #[test]
    fn greedy_meets_bound_on_small_games() {
        for seed in 0..30 {
            let g = GameMatrix::random_integer(4, 5, -5, 5, seed).unwrap();
            let v = solve_exact_small(&g).unwrap().value_hi;
            let span = g.range_hi() - g.range_lo();
            for k in [1, 2, 5, 17] {
                let (_, x) = greedy_k_uniform(&g, k, Player::Min).unwrap();
                assert!(
                    x <= v + k_uniform_epsilon(5, k) * span + 1e-9,
                    "seed {seed} k {k}"
                );
                let (_, y) = greedy_k_uniform(&g, k, Player::Max).unwrap();
                assert!(
                    y >= v - k_uniform_epsilon(4, k) * span - 1e-9,
                    "seed {seed} k {k}"
                );
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let src = MixedStrategy::new(Player::Max, vec![0.2, 0.3, 0.5]).unwrap();
        let a = draw_multiset(&src, 50, 9, 2).unwrap();
        assert_eq!(a, draw_multiset(&src, 50, 9, 2).unwrap());
        assert_ne!(a, draw_multiset(&src, 50, 9, 3).unwrap());
        assert_eq!(a.player(), Player::Max);
    }
}
