use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::mixing::Distribution;
use super::AnalysisError;

/// Trials per generator stream. Fixed so that results do not depend on how
/// many workers run the chunks.
const CHUNK: u64 = 1 << 16;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

fn check_universe(dx: &Distribution, dy: &Distribution) -> Result<usize, AnalysisError> {
    if dx.universe() != dy.universe() {
        return Err(AnalysisError::SupportMismatch {
            left: dx.universe(),
            right: dy.universe(),
        });
    }
    Ok(dx.universe())
}

/// Success probability of the optimal distinguisher:
/// `P_A = 1/2 * sum_h max(P(X = h), P(Y = h))`.
pub fn attack_success_exact(dx: &Distribution, dy: &Distribution) -> Result<f64, AnalysisError> {
    let n = check_universe(dx, dy)?;
    let len = dx.probs().len().max(dy.probs().len()).min(n);
    Ok(0.5 * (0..len).map(|h| dx.prob(h).max(dy.prob(h))).sum::<f64>())
}

/// `max_h |P(X = h) - P(Y = h)|`.
pub fn linf_pair(dx: &Distribution, dy: &Distribution) -> Result<f64, AnalysisError> {
    let n = check_universe(dx, dy)?;
    let len = dx.probs().len().max(dy.probs().len()).min(n);
    Ok((0..len).map(|h| (dx.prob(h) - dy.prob(h)).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChallengeOutcome {
    pub trials: u64,
    pub wins: u64,
    pub exact_success: f64,
    pub empirical_success: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub epsilon: f64,
    /// `1/2 + epsilon * N / 4`.
    pub bound: f64,
}

fn wilson_interval(wins: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let phat = wins as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Simulates the challenger and the generic adversary.
///
/// Each trial flips a fair coin `P`, samples `Z` from `dy` when `P = 1` and
/// from `dx` otherwise, and the adversary answers 1 exactly when
/// `dy(Z) > dx(Z)`, with a fair coin on ties.
pub fn play_challenge(
    dx: &Distribution,
    dy: &Distribution,
    trials: u64,
    seed: u64,
) -> Result<ChallengeOutcome, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let universe = check_universe(dx, dy)?;
    let sampler = |d: &Distribution| {
        WeightedIndex::new(d.probs()).map_err(|e| AnalysisError::InvalidDistribution(e.to_string()))
    };
    let (sx, sy) = (sampler(dx)?, sampler(dy)?);

    let chunks = trials.div_ceil(CHUNK);
    let wins: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = CHUNK.min(trials - chunk * CHUNK);
            let mut wins = 0;
            for _ in 0..count {
                let p: bool = rng.gen();
                let z = if p { sy.sample(&mut rng) } else { sx.sample(&mut rng) };
                let (px, py) = (dx.prob(z), dy.prob(z));
                let guess = if py > px {
                    true
                } else if py < px {
                    false
                } else {
                    rng.gen()
                };
                wins += u64::from(guess == p);
            }
            wins
        })
        .sum();

    let exact_success = attack_success_exact(dx, dy)?;
    let epsilon = linf_pair(dx, dy)?;
    let (ci_low, ci_high) = wilson_interval(wins, trials);
    Ok(ChallengeOutcome {
        trials,
        wins,
        exact_success,
        empirical_success: wins as f64 / trials as f64,
        ci_low,
        ci_high,
        epsilon,
        bound: 0.5 + epsilon * universe as f64 / 4.0,
    })
}
