//! Sweep execution.
//!
//! Analytic points run in parallel on the worker pool; Monte Carlo points
//! run one after another, each using every worker. Rows come back in
//! scenario, method, sweep order whatever the completion order.

use std::time::Instant;

use hstn_core::mcsim::{estimate_outage, estimate_outage_auto, OutageEstimate, SimPlan};
use hstn_core::outage::{op_asymptotic, op_exact, op_numeric};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Method, Scenario};
use crate::error::{CliError, CliResult};

/// Run-time settings; flags take precedence over the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            trials: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Automatic Monte Carlo sizing hit its cap before the precision target.
    Capped,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: String,
    pub method: String,
    pub x_axis_name: String,
    pub x_value_db: f64,
    pub op_value: Option<f64>,
    pub std_err: Option<f64>,
    pub trials: Option<u64>,
    pub wall_time_ms: f64,
    /// `ok`, `capped`, or `error: ...`.
    pub status: String,
}

impl SweepRow {
    pub fn status_kind(&self) -> Status {
        match self.status.as_str() {
            "ok" => Status::Ok,
            "capped" => Status::Capped,
            _ => Status::Failed,
        }
    }
}

/// Per-point seed: SplitMix64 of the base seed and the point's position, so
/// points draw from unrelated streams.
pub fn point_seed(seed: u64, scenario: usize, point: usize) -> u64 {
    let mut z = seed ^ splitmix64(((scenario as u64) << 32) | point as u64);
    z = splitmix64(z);
    z
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Job<'a> {
    scenario_idx: usize,
    scenario: &'a Scenario,
    method: Method,
    point_idx: usize,
    x_db: f64,
}

struct Outcome {
    op: f64,
    estimate: Option<OutageEstimate>,
}

fn evaluate(job: &Job<'_>, cfg: &ExperimentConfig, opts: &RunOptions) -> CliResult<Outcome> {
    let q = job.scenario.query(job.x_db)?;
    let net = &job.scenario.network;
    let analytic = |op: hstn_core::Result<f64>| -> CliResult<Outcome> {
        op.map(|op| Outcome { op, estimate: None })
            .map_err(|e| CliError::Config(e.to_string()))
    };
    match job.method {
        Method::Exact => analytic(op_exact(&q, net)),
        Method::Asymptotic => analytic(op_asymptotic(&q, net)),
        Method::Numeric => analytic(op_numeric(&q, net)),
        Method::Montecarlo => {
            let plan = SimPlan {
                trials: opts.trials.or(cfg.monte_carlo.trials).unwrap_or(1),
                seed: point_seed(opts.seed.unwrap_or(cfg.seed), job.scenario_idx, job.point_idx),
                query: q,
                network: net.clone(),
                workers: opts.workers,
            };
            let est = if opts.trials.is_some() || cfg.monte_carlo.trials.is_some() {
                estimate_outage(&plan)
            } else {
                estimate_outage_auto(&plan, cfg.monte_carlo_cap())
            }
            .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(Outcome {
                op: est.p_hat,
                estimate: Some(est),
            })
        }
    }
}

fn run_job(job: &Job<'_>, cfg: &ExperimentConfig, opts: &RunOptions) -> SweepRow {
    let started = Instant::now();
    let outcome = evaluate(job, cfg, opts);
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let mut row = SweepRow {
        scenario: job.scenario.name.clone(),
        method: job.method.as_str().to_string(),
        x_axis_name: job.scenario.axis.as_str().to_string(),
        x_value_db: job.x_db,
        op_value: None,
        std_err: None,
        trials: None,
        wall_time_ms,
        status: "ok".to_string(),
    };
    match outcome {
        Ok(o) => {
            row.op_value = Some(o.op);
            if let Some(est) = o.estimate {
                row.std_err = Some(est.std_err);
                row.trials = Some(est.trials);
                if est.capped {
                    row.status = "capped".to_string();
                }
            }
        }
        Err(e) => {
            let msg = match e {
                CliError::Config(m) => m,
                other => other.to_string(),
            };
            row.status = format!("error: {}", msg.replace(['\n', '\r'], " "));
        }
    }
    row
}

/// Runs every scenario, method and point of `cfg`.
///
/// Point failures become `error:` rows; only configuration problems and a
/// sweep in which every point failed are errors.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> CliResult<Vec<SweepRow>> {
    if opts.workers == 0 {
        return Err(CliError::Config("workers must be at least 1".to_string()));
    }
    if opts.trials == Some(0) {
        return Err(CliError::Config("trials must be at least 1".to_string()));
    }
    let scenarios = cfg.resolve()?;
    let points = cfg.sweep.points();
    let jobs: Vec<Job<'_>> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(scenario_idx, scenario)| {
            let points = &points;
            scenario.methods.iter().flat_map(move |&method| {
                points.iter().enumerate().map(move |(point_idx, &x_db)| Job {
                    scenario_idx,
                    scenario,
                    method,
                    point_idx,
                    x_db,
                })
            })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let mut rows: Vec<Option<SweepRow>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| (job.method != Method::Montecarlo).then(|| run_job(job, cfg, opts)))
            .collect()
    });
    for (slot, job) in rows.iter_mut().zip(&jobs) {
        if slot.is_none() {
            *slot = Some(run_job(job, cfg, opts));
        }
    }
    let rows: Vec<SweepRow> = rows.into_iter().map(|r| r.expect("every job ran")).collect();
    if !rows.is_empty() && rows.iter().all(|r| r.status_kind() == Status::Failed) {
        return Err(CliError::AllPointsFailed(rows.len()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_seeds_differ() {
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..20 {
            for p in 0..50 {
                assert!(seen.insert(point_seed(7, s, p)));
            }
        }
        assert_ne!(point_seed(1, 0, 0), point_seed(2, 0, 0));
    }

    #[test]
    fn splitmix_reference() {
        // first outputs of the SplitMix64 generator seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }
}
