//! Hashing with non-backtracking walks on Cayley graphs of `SL_n(F_p)`,
//! together with the tooling used to study the construction: girth and
//! mixing measurements, parallel hashing via good tails, and experiments
//! with factorization and palindromic attacks.

pub mod algebra;
pub mod analysis;
pub mod attacks;
pub mod hasher;
pub mod params;
pub mod tails;
