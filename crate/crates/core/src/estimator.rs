//! Monte Carlo advantage estimates with Wilson intervals, and the relation
//! checks built on them.
//!
//! Trial `i` of a run with master seed `s` draws from the ChaCha20 stream
//! `(s, i)`, so an estimate depends only on the seed and trial count, not
//! on how the trials are spread over threads.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dvs::{DvsScheme, KeyPair, Message, Params};
use crate::experiment::Experiment;
use crate::games::GameConfig;
use crate::Error;

pub const DEFAULT_SLACK: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub wins: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub baseline: f64,
    pub advantage: f64,
    /// 95% Wilson interval for the success probability.
    pub ci95: (f64, f64),
}

impl AdvantageEstimate {
    pub fn from_counts(wins: u64, trials: u64, baseline: f64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { wins as f64 / trials as f64 };
        AdvantageEstimate {
            wins,
            trials,
            p_hat,
            baseline,
            advantage: p_hat - baseline,
            ci95: wilson_ci(wins, trials, 0.95),
        }
    }

    /// The Wilson interval shifted by the baseline.
    pub fn advantage_interval(&self) -> (f64, f64) {
        (self.ci95.0 - self.baseline, self.ci95.1 - self.baseline)
    }
}

/// Wilson score interval for `wins` successes out of `trials` at the given
/// two-sided confidence level. Returns `(0, 1)` for zero trials.
pub fn wilson_ci(wins: u64, trials: u64, level: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if wins == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if wins == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// The rng trial `index` of a run seeded with `master_seed` draws from.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs `trial` on every index in `0..trials` over `jobs` threads and
/// counts wins.
pub fn estimate_with<F>(trials: u64, master_seed: u64, jobs: usize, baseline: f64, trial: F) -> Result<AdvantageEstimate, Error>
where
    F: Fn(&mut ChaCha20Rng) -> Result<bool, Error> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let wins = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| trial(&mut trial_rng(master_seed, i)).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(AdvantageEstimate::from_counts(wins, trials, baseline))
}

/// Estimates the advantage of the adversary described by `cfg`.
pub fn estimate(cfg: &GameConfig, trials: u64, master_seed: u64, jobs: usize) -> Result<AdvantageEstimate, Error> {
    let experiment = Experiment::new(cfg.clone())?;
    estimate_with(trials, master_seed, jobs, cfg.baseline(), |rng| {
        experiment.run_trial(rng).map(|o| o.won)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `factor * lhs <= rhs`
    Leq,
    /// `factor * lhs == rhs`
    Eq,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Leq => "leq",
            Direction::Eq => "eq",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leq" => Ok(Direction::Leq),
            "eq" => Ok(Direction::Eq),
            other => Err(Error::UnknownIdentifier {
                kind: "direction",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub direction: Direction,
    pub factor: f64,
    pub slack: f64,
    pub lhs_advantage: f64,
    pub rhs_advantage: f64,
    /// `factor` times the lhs advantage interval.
    pub lhs_interval: (f64, f64),
    pub rhs_interval: (f64, f64),
}

/// Checks `factor * Adv_lhs (direction) Adv_rhs` up to sampling error.
///
/// `leq` holds unless the scaled lhs interval lies entirely above the rhs
/// interval by more than `slack`; `eq` holds when the two intervals overlap
/// within `slack`.
pub fn check_relation(lhs: &AdvantageEstimate, rhs: &AdvantageEstimate, factor: f64, direction: Direction, slack: f64) -> Verdict {
    let (a, b) = lhs.advantage_interval();
    let (a, b) = if factor >= 0.0 { (factor * a, factor * b) } else { (factor * b, factor * a) };
    let rhs_interval = rhs.advantage_interval();
    let holds = match direction {
        Direction::Leq => a <= rhs_interval.1 + slack,
        Direction::Eq => a <= rhs_interval.1 + slack && rhs_interval.0 <= b + slack,
    };
    Verdict {
        holds,
        direction,
        factor,
        slack,
        lhs_advantage: lhs.advantage,
        rhs_advantage: rhs.advantage,
        lhs_interval: (a, b),
        rhs_interval,
    }
}

/// Empirical total variation distance between `samples` outputs of Sign
/// and `samples` outputs of Simulate on the same message and keys.
pub fn estimate_statistical_distance(
    scheme: &dyn DvsScheme,
    params: &Params,
    sender: &KeyPair,
    verifier: &KeyPair,
    m: &Message,
    samples: usize,
    rng: &mut dyn rand::RngCore,
) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let mut counts: HashMap<Option<Vec<u8>>, (usize, usize)> = HashMap::new();
    for _ in 0..samples {
        let signed = scheme.sign_pair(sender, verifier.pk, m, params, rng).ok().map(|s| s.to_bytes());
        counts.entry(signed).or_default().0 += 1;
        let simulated = scheme.simulate_pair(sender.pk, verifier, m, params, rng).ok().map(|s| s.to_bytes());
        counts.entry(simulated).or_default().1 += 1;
    }
    let total: usize = counts.values().map(|&(a, b)| a.abs_diff(b)).sum();
    total as f64 / (2.0 * samples as f64)
}
