//! Certificates of approximate game value.
//!
//! A certificate claims a value `v` and carries one small multiset per
//! player. It is accepted when Min's multiset holds every column to at most
//! `v + (ε/2)·(hi − lo)` and Max's multiset forces every row to pay at least
//! `v − (ε/2)·(hi − lo)`. Both checks are exhaustive scans, so an accepted
//! certificate pins the true value to within `ε·(hi − lo)` of `v`.
//!
//! Scanning costs `O((r + c)·k)` payoff evaluations. For oracle games this is
//! the scaling limit of the checker.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameMatrix, Payoffs, Player, Strategy, UniformMultiset};
use crate::solver::{solve_auto, SolveOptions};
use crate::sparsify::{greedy_k_uniform_on, k_uniform_bound, sample_until, DEFAULT_MAX_ATTEMPTS};

/// Default ratio between the allowed multiset size and `k_uniform_bound(·, ε/2)`.
pub const SIZE_CAP_FACTOR: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CertificateFile", into = "CertificateFile")]
pub struct StrategyCertificate {
    pub claimed_value: f64,
    pub epsilon: f64,
    pub min_multiset: UniformMultiset,
    pub max_multiset: UniformMultiset,
    pub declared_bounds: (f64, f64),
}

/// Field order is part of the file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CertificateFile {
    value: f64,
    epsilon: f64,
    bounds: [f64; 2],
    min_multiset: Vec<usize>,
    max_multiset: Vec<usize>,
}

impl TryFrom<CertificateFile> for StrategyCertificate {
    type Error = Error;

    fn try_from(file: CertificateFile) -> Result<Self> {
        StrategyCertificate::new(
            file.value,
            file.epsilon,
            file.min_multiset,
            file.max_multiset,
            (file.bounds[0], file.bounds[1]),
        )
    }
}

impl From<StrategyCertificate> for CertificateFile {
    fn from(cert: StrategyCertificate) -> Self {
        CertificateFile {
            value: cert.claimed_value,
            epsilon: cert.epsilon,
            bounds: [cert.declared_bounds.0, cert.declared_bounds.1],
            min_multiset: cert.min_multiset.items().to_vec(),
            max_multiset: cert.max_multiset.items().to_vec(),
        }
    }
}

impl StrategyCertificate {
    /// Structural checks only; whether the claim holds is up to
    /// [`check_certificate`].
    pub fn new(
        claimed_value: f64,
        epsilon: f64,
        min_items: Vec<usize>,
        max_items: Vec<usize>,
        declared_bounds: (f64, f64),
    ) -> Result<Self> {
        if !claimed_value.is_finite() {
            return Err(Error::Parse(format!(
                "claimed value {claimed_value} is not finite"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parse(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let (lo, hi) = declared_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Parse(format!("invalid bounds [{lo}, {hi}]")));
        }
        Ok(StrategyCertificate {
            claimed_value,
            epsilon,
            min_multiset: UniformMultiset::new(Player::Min, min_items)?,
            max_multiset: UniformMultiset::new(Player::Max, max_items)?,
            declared_bounds,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization is infallible")
    }

    /// `(ε/2)·(hi − lo)`: the slack each player's check allows.
    pub fn half_slack(&self) -> f64 {
        half_slack(self.epsilon, self.declared_bounds)
    }
}

fn half_slack(epsilon: f64, (lo, hi): (f64, f64)) -> f64 {
    0.5 * epsilon * (hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictReason {
    Accepted,
    /// The claimed value lies outside the declared bounds.
    ValueOutOfBounds,
    /// A multiset exceeds the size cap.
    MultisetTooLarge,
    /// A scanned payoff lies outside the declared bounds.
    BoundsViolated,
    /// The declared bounds differ from the scanned range of a matrix game.
    BoundsMismatch,
    /// Some column earns more than `v + slack` against Min's multiset.
    MinGuaranteeFailed,
    /// Some row pays less than `v − slack` against Max's multiset.
    MaxGuaranteeFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    /// Best column payoff against Min's multiset.
    pub min_exploitability: f64,
    /// Least row payoff against Max's multiset.
    pub max_guarantee: f64,
    pub reason: VerdictReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub size_cap_factor: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            size_cap_factor: SIZE_CAP_FACTOR,
        }
    }
}

pub fn check_certificate<G: Payoffs + ?Sized>(
    game: &G,
    cert: &StrategyCertificate,
) -> Result<Verdict> {
    check_certificate_with(game, cert, &CheckOptions::default())
}

/// Validates a certificate by scanning every column against Min's multiset
/// and every row against Max's multiset.
///
/// Out-of-range indices are an error (malformed certificate); every other
/// failure is a rejection with a reason.
pub fn check_certificate_with<G: Payoffs + ?Sized>(
    game: &G,
    cert: &StrategyCertificate,
    options: &CheckOptions,
) -> Result<Verdict> {
    let (r, c) = (game.rows(), game.cols());
    cert.min_multiset.check_len(r)?;
    cert.max_multiset.check_len(c)?;
    let (lo, hi) = cert.declared_bounds;
    let in_bounds = |x: f64| lo <= x && x <= hi;
    let mut violated = false;

    let min_support = cert.min_multiset.weighted_support();
    let mut min_exploitability = f64::NEG_INFINITY;
    for j in 0..c {
        let mut value = 0.0;
        for &(i, w) in &min_support {
            let x = game.payoff(i, j);
            violated |= !in_bounds(x);
            value += w * x;
        }
        min_exploitability = min_exploitability.max(value);
    }

    let max_support = cert.max_multiset.weighted_support();
    let mut max_guarantee = f64::INFINITY;
    for i in 0..r {
        let mut value = 0.0;
        for &(j, w) in &max_support {
            let x = game.payoff(i, j);
            violated |= !in_bounds(x);
            value += w * x;
        }
        max_guarantee = max_guarantee.min(value);
    }

    let slack = cert.half_slack();
    let cap = |opponents: usize| -> Result<usize> {
        Ok(options.size_cap_factor * k_uniform_bound(opponents, cert.epsilon / 2.0)?)
    };
    let reason = if !in_bounds(cert.claimed_value) {
        VerdictReason::ValueOutOfBounds
    } else if cert.min_multiset.k() > cap(c)? || cert.max_multiset.k() > cap(r)? {
        VerdictReason::MultisetTooLarge
    } else if violated {
        VerdictReason::BoundsViolated
    } else if game
        .scanned_range()
        .is_some_and(|range| range != cert.declared_bounds)
    {
        VerdictReason::BoundsMismatch
    } else if min_exploitability > cert.claimed_value + slack {
        VerdictReason::MinGuaranteeFailed
    } else if max_guarantee < cert.claimed_value - slack {
        VerdictReason::MaxGuaranteeFailed
    } else {
        VerdictReason::Accepted
    };
    Ok(Verdict {
        accepted: reason == VerdictReason::Accepted,
        min_exploitability,
        max_guarantee,
        reason,
    })
}

/// Solves the game, takes the midpoint of the value bracket as the claim and
/// builds a k-uniform multiset for each player that passes its half of the
/// check.
///
/// Multisets have `k_uniform_bound(opponents, ε/4)` items: with the solver
/// bracket at most `ε·(hi − lo)/4` wide, a strategy `ε/4`-close to the value
/// stays within the `ε/2` slack around the midpoint. Sampling (seeded by
/// `seed` for Min and `seed + 1` for Max) is tried first, then the greedy
/// construction.
pub fn make_certificate(game: &GameMatrix, epsilon: f64, seed: u64) -> Result<StrategyCertificate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let bounds = game.bounds();
    let span = bounds.1 - bounds.0;
    let solution = solve_auto(
        game,
        &SolveOptions::with_delta((epsilon * span / 4.0).max(f64::MIN_POSITIVE)),
    )?;
    if !solution.converged {
        return Err(Error::ConstructionFailed(format!(
            "solver stopped with gap {} after {} rounds",
            solution.gap(),
            solution.iterations
        )));
    }
    let claimed_value = solution.midpoint().clamp(bounds.0, bounds.1);
    let slack = half_slack(epsilon, bounds);

    let build = |player: Player, threshold: f64, seed: u64| -> Result<UniformMultiset> {
        let opponents = game.count(player.opponent());
        let k = k_uniform_bound(opponents, epsilon / 4.0)?
            .min(SIZE_CAP_FACTOR * k_uniform_bound(opponents, epsilon / 2.0)?);
        let source = solution.strategy(player);
        let sampled = sample_until(game, source, k, threshold, seed, DEFAULT_MAX_ATTEMPTS)?;
        if sampled.verified {
            return Ok(sampled.multiset);
        }
        let (multiset, exploitability) = greedy_k_uniform_on(game, k, player)?;
        let ok = match player {
            Player::Min => exploitability <= threshold,
            Player::Max => exploitability >= threshold,
        };
        if ok {
            Ok(multiset)
        } else {
            Err(Error::ConstructionFailed(format!(
                "no {player} multiset of size {k} reached {threshold}"
            )))
        }
    };

    let min_multiset = build(Player::Min, claimed_value + slack, seed)?;
    let max_multiset = build(Player::Max, claimed_value - slack, seed.wrapping_add(1))?;
    Ok(StrategyCertificate {
        claimed_value,
        epsilon,
        min_multiset,
        max_multiset,
        declared_bounds: bounds,
    })
}
