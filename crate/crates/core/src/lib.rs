//! Zero-sum matrix games with small, checkable strategies.
//!
//! The crate computes game values (exactly by support enumeration for small
//! games, approximately by multiplicative weights for larger ones), builds
//! sparse k-uniform strategies and dovetailing sets, packages near-optimal
//! play as certificates that can be re-checked against the payoff matrix or
//! an oracle, and instantiates program/input games over enumerated program
//! families to produce anti-checkers and hard input distributions.
//!
//! ```
//! use sparsegame::{GameMatrix, solver};
//!
//! let pennies = GameMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
//! let result = solver::solve_exact_small(&pennies).unwrap();
//! assert!(result.value_lo.abs() < 1e-9 && result.value_hi.abs() < 1e-9);
//! ```

pub mod antichecker;
pub mod certificate;
pub mod cli;
mod error;
pub mod game;
mod rng;
pub mod solver;
pub mod sparsify;

pub use error::{Error, Result};
pub use game::{
    best_response, expected_payoff, payoff_range, strategy_from_multiset, BestResponse, GameMatrix,
    MixedStrategy, PayoffOracle, Payoffs, Player, UniformMultiset,
};
