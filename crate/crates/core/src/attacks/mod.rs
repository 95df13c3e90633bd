//! Factorization certificates, the polynomial system behind them, and the
//! palindromic-attack experiment.

pub mod em;
pub mod factor;
pub mod palindrome;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::hasher::HashError;

pub use em::{emit_em_system, EmSystem, Poly};
pub use factor::{
    birthday_search, collision_to_relator, free_reduce, is_nontrivial, verify_factorization, Collision,
    FactorizationWord, NontrivialityWindow,
};
pub use palindrome::{
    find_symmetrizer, power_entry_witness, rho, symmetrizer_density, DensityReport, PowerWitness, SymmetrizerMode,
    SymmetrizerResult,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("inputs do not collide: {0}")]
    NotACollision(String),
    #[error("no symmetrizer found")]
    NotFound,
    #[error("search space of {needed} candidates exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("invalid nontriviality window: {0}")]
    InvalidWindow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("m must be at least 1")]
    EmptySystem,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hash(#[from] HashError),
}
