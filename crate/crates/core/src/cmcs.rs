//! Crude Monte Carlo with a relative-error stopping rule.

use crate::error::{Error, Result};
use crate::estimate::{EstimateResult, Method};
use crate::exec::{map_indexed, Execution};
use crate::model::SystemModel;
use crate::rng::SeedStream;

/// Batches evaluated between two sequential stopping checks. Fixed so the
/// result never depends on the thread count.
const BATCHES_PER_ROUND: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcsConfig {
    pub target_relative_error: f64,
    pub max_evaluations: u64,
    pub batch_size: u64,
    pub execution: Execution,
}

impl Default for CmcsConfig {
    fn default() -> Self {
        Self {
            target_relative_error: 0.10,
            max_evaluations: 5_000_000,
            batch_size: 1_000,
            execution: Execution::default(),
        }
    }
}

impl CmcsConfig {
    /// Runs exactly `n` draws: the stopping rule can only trigger at `R̂ = 1`.
    pub fn fixed(n: u64) -> Self {
        Self {
            target_relative_error: f64::MIN_POSITIVE,
            max_evaluations: n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_relative_error > 0.0 && self.target_relative_error < 1.0) {
            return Err(Error::Config(format!(
                "target relative error must be in (0, 1), got {}",
                self.target_relative_error
            )));
        }
        if self.batch_size < 1 || self.max_evaluations < self.batch_size {
            return Err(Error::Config(format!(
                "need max_evaluations ({}) >= batch_size ({}) >= 1",
                self.max_evaluations, self.batch_size
            )));
        }
        Ok(())
    }
}

/// Relative error of the indicator mean, `sqrt((1 - R) / (R N))`, with the
/// running estimate standing in for `R`. Undefined for `R = 0`.
pub fn relative_error(estimate: f64, n: u64) -> Option<f64> {
    if estimate > 0.0 && n > 0 {
        Some(((1.0 - estimate) / (estimate * n as f64)).sqrt())
    } else {
        None
    }
}

/// Number of the first `n` draws from `rng` whose importance is at most
/// `threshold`.
pub(crate) fn count_hits<R: rand::Rng + ?Sized>(
    model: &SystemModel,
    threshold: f64,
    n: u64,
    rng: &mut R,
) -> u64 {
    let mut state = model.all_available();
    let mut hits = 0;
    for _ in 0..n {
        model.sample_into(&mut state, rng);
        if model.score(&state) <= threshold {
            hits += 1;
        }
    }
    hits
}

/// Size of IID batch `b` when `total` draws are split into `batch`-sized
/// chunks.
pub(crate) fn batch_len(b: u64, batch: u64, total: u64) -> u64 {
    batch.min(total - b * batch)
}

/// Estimates `P(S(X) <= threshold)` from IID draws.
///
/// Batch `b` uses leaf stream `b` of `streams`. The relative error is checked
/// after every batch, in batch order, and the run stops at the first batch
/// where it reaches the target or when `max_evaluations` draws are spent.
pub fn estimate_cmcs(
    model: &SystemModel,
    threshold: f64,
    config: &CmcsConfig,
    streams: &SeedStream,
) -> Result<EstimateResult> {
    config.validate()?;
    let total_batches = config.max_evaluations.div_ceil(config.batch_size);
    let (mut hits, mut n) = (0u64, 0u64);
    let mut first = 0;
    'rounds: while first < total_batches {
        let count = BATCHES_PER_ROUND.min(total_batches - first);
        let round = map_indexed(config.execution, count as usize, |i| {
            let b = first + i as u64;
            let len = batch_len(b, config.batch_size, config.max_evaluations);
            let mut rng = streams.rng(b);
            (count_hits(model, threshold, len, &mut rng), len)
        });
        for (h, len) in round {
            hits += h;
            n += len;
            let estimate = hits as f64 / n as f64;
            if relative_error(estimate, n).is_some_and(|re| re <= config.target_relative_error) {
                break 'rounds;
            }
        }
        first += count;
    }
    let risk = hits as f64 / n as f64;
    Ok(EstimateResult {
        method: Method::Cmcs,
        risk,
        relative_error: relative_error(risk, n),
        evaluations: n,
        pilot_evaluations: 0,
        seed: streams.master(),
        levels: vec![threshold],
        stages: Vec::new(),
        replicates: Vec::new(),
    })
}
