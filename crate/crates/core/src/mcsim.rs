//! Monte Carlo outage estimation.
//!
//! Trials are grouped in fixed blocks; block `b` draws from a ChaCha8
//! stream selected by `(seed, b)`. Counts are integers summed per block, so
//! the estimate is bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{SrPowerSampler, TerrestrialPowerSampler};
use crate::error::{Error, Result};
use crate::outage::{sndr, Network, OutageQuery};

/// Trials per RNG block.
pub const BLOCK_TRIALS: u64 = 1 << 16;
/// Hard ceiling on automatically sized runs.
pub const MAX_AUTO_TRIALS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub trials: u64,
    pub seed: u64,
    pub query: OutageQuery,
    pub network: Network,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub outages: u64,
    pub ci95: (f64, f64),
    /// True when an automatically sized run stopped at [`MAX_AUTO_TRIALS`]
    /// before reaching its precision target.
    pub capped: bool,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p_hat = outages as f64 / n;
        let std_err = (p_hat * (1.0 - p_hat) / n).sqrt();
        OutageEstimate {
            p_hat,
            std_err,
            trials,
            outages,
            ci95: ((p_hat - 1.96 * std_err).max(0.0), (p_hat + 1.96 * std_err).min(1.0)),
            capped: false,
        }
    }

    /// `|p̂ - p| / std_err`, infinite when the estimate has no spread but misses.
    pub fn z_score(&self, p: f64) -> f64 {
        let gap = (self.p_hat - p).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.std_err
        }
    }
}

/// Pre-built per-trial samplers for one plan.
#[derive(Debug, Clone)]
pub struct TrialSampler<'a> {
    query: &'a OutageQuery,
    network: &'a Network,
    sr: SrPowerSampler,
    terrestrial: TerrestrialPowerSampler,
}

impl<'a> TrialSampler<'a> {
    pub fn new(query: &'a OutageQuery, network: &'a Network) -> Self {
        TrialSampler {
            query,
            network,
            sr: SrPowerSampler::new(&network.sr),
            terrestrial: TerrestrialPowerSampler::new(&network.terrestrial),
        }
    }

    /// End-to-end SNDR of one relay with fresh fading and position.
    pub fn relay_sndr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let q = self.query;
        let lambda_su = q.eta_s * self.sr.sample(rng);
        let w = self.network.mobility.sample_distance(rng);
        let lambda_ud = q.eta_u * self.terrestrial.sample(rng) / w.powf(self.network.path_loss_exp);
        sndr(lambda_su, lambda_ud, &q.hardware)
    }

    /// SNDR of the relay picked by max-SNDR selection.
    pub fn selected_sndr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let per_relay: Vec<f64> = (0..self.query.num_relays).map(|_| self.relay_sndr(rng)).collect();
        let best = per_relay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        debug_assert!(per_relay.iter().all(|&s| s <= best));
        best
    }

    /// Outage indicator of one trial.
    pub fn outage<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        if self.query.beyond_ceiling() {
            return true;
        }
        let gamma = self.query.threshold;
        // stop at the first relay that clears the threshold
        for _ in 0..self.query.num_relays {
            if self.relay_sndr(rng) >= gamma {
                return false;
            }
        }
        true
    }
}

/// One trial of `plan`.
pub fn run_trial<R: Rng + ?Sized>(plan: &SimPlan, rng: &mut R) -> bool {
    TrialSampler::new(&plan.query, &plan.network).outage(rng)
}

/// Generator of block `block` under `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn count_block(sampler: &TrialSampler<'_>, seed: u64, block: u64, trials: u64) -> u64 {
    let mut rng = block_rng(seed, block);
    (0..trials).filter(|_| sampler.outage(&mut rng)).count() as u64
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::invalid("workers", "at least one worker is required".to_string()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))
}

/// Outages among trials `[first_block * BLOCK_TRIALS, total)`.
fn count_range(plan: &SimPlan, pool: &rayon::ThreadPool, first_block: u64, total: u64) -> u64 {
    let sampler = TrialSampler::new(&plan.query, &plan.network);
    let last_block = total.div_ceil(BLOCK_TRIALS);
    pool.install(|| {
        (first_block..last_block)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK_TRIALS;
                let n = BLOCK_TRIALS.min(total - start);
                count_block(&sampler, plan.seed, b, n)
            })
            .sum()
    })
}

/// Estimates the outage probability with `plan.trials` trials.
pub fn estimate_outage(plan: &SimPlan) -> Result<OutageEstimate> {
    if plan.trials == 0 {
        return Err(Error::invalid("trials", "at least one trial is required".to_string()));
    }
    let pool = thread_pool(plan.workers)?;
    let outages = count_range(plan, &pool, 0, plan.trials);
    Ok(OutageEstimate::from_counts(outages, plan.trials))
}

/// Runs whole blocks, doubling the run, until `std_err <= p̂ / 10` or the
/// trial count reaches `cap`. `plan.trials` is ignored.
///
/// The stopping rule sees only completed block counts, so the result does
/// not depend on the worker count.
pub fn estimate_outage_auto(plan: &SimPlan, cap: u64) -> Result<OutageEstimate> {
    let cap = cap.clamp(BLOCK_TRIALS, MAX_AUTO_TRIALS);
    let pool = thread_pool(plan.workers)?;
    let mut trials = 0u64;
    let mut outages = 0u64;
    let mut next = BLOCK_TRIALS;
    loop {
        let target = next.min(cap);
        outages += count_range(plan, &pool, trials / BLOCK_TRIALS, target);
        trials = target;
        let est = OutageEstimate::from_counts(outages, trials);
        if (outages > 0 && est.std_err <= est.p_hat / 10.0) || est.p_hat == 1.0 {
            return Ok(est);
        }
        if trials >= cap {
            return Ok(OutageEstimate { capped: true, ..est });
        }
        next = trials * 2;
    }
}
