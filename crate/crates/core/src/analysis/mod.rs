//! Girth, group enumeration, exact walk distributions and the
//! indistinguishability game on small instances.

pub mod game;
pub mod girth;
pub mod group;
pub mod mixing;

use num_bigint::BigUint;
use thiserror::Error;

pub use game::{attack_success_exact, linf_pair, play_challenge, ChallengeOutcome};
pub use girth::{girth_lower_bound, measure_girth, search_free_relation, FreenessReport, GirthMeasurement, GirthReport};
pub use group::{closure_size, group_order, CayleyGraph, ClosureSize};
pub use mixing::{linf_distance, walk_distribution, Distribution, WalkEvolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("group has more than {budget} elements")]
    GroupTooLarge { budget: usize },
    #[error("SL_{n}(F_{p}) cannot be enumerated with packed 16-bit entries")]
    NotEnumerable { n: usize, p: BigUint },
    #[error("distributions live on universes of different sizes ({left} vs {right})")]
    SupportMismatch { left: usize, right: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("at least one trial is required")]
    NoTrials,
}
