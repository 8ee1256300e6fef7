//! Seeded Monte Carlo estimates of heralding probabilities and resource use.
//!
//! Trial `i` of a run with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `i`, so estimates do not depend on thread count or order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fuse_chain, ChainSpec, Outcomes, Protocol, Result, Sampled};
use crate::exec;

/// Something the server can be asked to do repeatedly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Job {
    Protocol(Protocol),
    Chain(ChainSpec),
}

impl Job {
    /// Exact success probability as `2^-k`.
    pub fn exponent(&self) -> u32 {
        match self {
            Job::Protocol(p) => p.exponent(),
            Job::Chain(c) => c.exponent(),
        }
    }

    /// Exact mean resource use per trial, when known.
    pub fn expected_resources(&self) -> Option<f64> {
        match self {
            Job::Protocol(p) => p.program().ok().map(|pr| pr.sources.len() as f64),
            Job::Chain(c) if !c.close => Some(super::expected_blocks(c.blocks.len())),
            Job::Chain(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Job::Protocol(p) => p.validate(),
            Job::Chain(c) => c.validate(),
        }
    }
}

/// One sampled run.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: u64,
    pub success: bool,
    /// Bell pairs for a no-storage protocol, blocks for a chain.
    pub resources: f64,
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A protocol attempt succeeds when every fusion heralds; the detection
/// outcomes of a successful attempt are sampled as well. A chain succeeds
/// when no fusion has to be repeated.
pub fn run_trial(job: &Job, seed: u64, index: u64) -> Result<Trial> {
    let mut out = Sampled(trial_rng(seed, index));
    match job {
        Job::Protocol(p) => {
            let program = p.program()?;
            let mut success = true;
            for _ in 0..program.exponent() {
                success &= out.fusion();
            }
            if success {
                p.run(&mut out)?;
            }
            Ok(Trial {
                index,
                success,
                resources: program.sources.len() as f64,
            })
        }
        Job::Chain(c) => {
            let r = fuse_chain(c, &mut out)?;
            let stats = r.chain.unwrap_or_default();
            Ok(Trial {
                index,
                success: stats.failures == 0,
                resources: stats.blocks_consumed as f64,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub trials: u64,
    pub successes: u64,
    pub estimated_probability: f64,
    /// `sqrt(p̂(1−p̂)/trials)`.
    pub std_error: f64,
    pub exact_probability: f64,
    /// Mean resources per trial.
    pub resource_counts: f64,
    pub resource_std_error: f64,
    pub expected_resources: Option<f64>,
    /// `|p̂ − p| ≤ 3σ`; a miss is reported, not fatal.
    pub within_3_sigma: bool,
    pub within_5_sigma: bool,
    pub rng_seed: u64,
}

impl MonteCarloStats {
    pub fn from_trials(trials: &[Trial], exact_probability: f64, expected_resources: Option<f64>, rng_seed: u64) -> Self {
        let n = trials.len() as u64;
        let nf = n.max(1) as f64;
        let successes = trials.iter().filter(|t| t.success).count() as u64;
        let p = successes as f64 / nf;
        let std_error = (p * (1.0 - p) / nf).sqrt();
        let mean = trials.iter().map(|t| t.resources).sum::<f64>() / nf;
        let var = if n > 1 {
            trials.iter().map(|t| (t.resources - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        let dev = (p - exact_probability).abs();
        Self {
            trials: n,
            successes,
            estimated_probability: p,
            std_error,
            exact_probability,
            resource_counts: mean,
            resource_std_error: (var / nf).sqrt(),
            expected_resources,
            within_3_sigma: dev <= 3.0 * std_error + 1e-12,
            within_5_sigma: dev <= 5.0 * std_error + 1e-12,
            rng_seed,
        }
    }
}

/// All trials, in index order.
pub fn sample(job: &Job, trials: u64, seed: u64) -> Result<Vec<Trial>> {
    job.validate()?;
    exec::map_range(trials, |i| run_trial(job, seed, i)).into_iter().collect()
}

/// Single-threaded [`sample`].
pub fn sample_sequential(job: &Job, trials: u64, seed: u64) -> Result<Vec<Trial>> {
    job.validate()?;
    exec::map_range_sequential(trials, |i| run_trial(job, seed, i)).into_iter().collect()
}

pub fn monte_carlo(job: &Job, trials: u64, seed: u64) -> Result<MonteCarloStats> {
    super::check_range("trials", trials as usize, 1, usize::MAX)?;
    let t = sample(job, trials, seed)?;
    Ok(MonteCarloStats::from_trials(&t, 0.5f64.powi(job.exponent() as i32), job.expected_resources(), seed))
}
