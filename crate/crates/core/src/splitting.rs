//! Fixed-effort generalized splitting.
//!
//! The rare set `{S(X) <= target}` is reached through decreasing levels
//! `L_1 > … > L_T = target`. Stage 0 draws `N` IID states; the `N_1` states
//! below `L_1` seed Markov chains whose stationary law is the model density
//! conditioned on `S <= L_1`, with chain lengths chosen so the stage again
//! produces exactly `N` states. Repeating down the levels gives
//! `R̂ = ∏_t N_t / N`.
//!
//! Levels come from an adaptive pilot run that places each level at the
//! `ρ`-quantile of the current conditional population.

use rand::seq::index;
use rand::Rng;

use crate::cmcs::batch_len;
use crate::error::{Error, Result};
use crate::estimate::{EstimateResult, Method, Replicate, StageRecord};
use crate::exec::{map_indexed, Execution};
use crate::mcmc::{MhKernel, Particle, ScanOrder};
use crate::model::SystemModel;
use crate::rng::SeedStream;

const PILOT_STREAM: u64 = 0x0050_494C_4F54; // "PILOT"
const RUN_STREAM: u64 = 0x52_554E; // "RUN"

/// Thresholds `L_1 > L_2 > … > L_T`; the last one is the risk threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSchedule {
    levels: Vec<f64>,
}

impl LevelSchedule {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Config("a level schedule needs at least one level".into()));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::Config("levels must be finite".into()));
        }
        if levels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config(format!(
                "levels must be strictly decreasing: {levels:?}"
            )));
        }
        Ok(Self { levels })
    }

    pub fn single(target: f64) -> Result<Self> {
        Self::new(vec![target])
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn target(&self) -> f64 {
        *self.levels.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub pilot_size: usize,
    /// Target conditional probability `ρ` between consecutive levels.
    pub quantile: f64,
    pub max_levels: usize,
    pub batch_size: u64,
    pub scan: ScanOrder,
    pub execution: Execution,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            pilot_size: 10_000,
            quantile: 0.1,
            max_levels: 64,
            batch_size: 1_000,
            scan: ScanOrder::Fixed,
            execution: Execution::default(),
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quantile > 0.0 && self.quantile < 1.0) {
            return Err(Error::Config(format!("quantile must be in (0, 1), got {}", self.quantile)));
        }
        if self.pilot_size < 100 {
            return Err(Error::Config(format!("pilot size must be >= 100, got {}", self.pilot_size)));
        }
        if self.max_levels < 1 || self.batch_size < 1 {
            return Err(Error::Config("max_levels and batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FegsConfig {
    /// States per stage, `N`.
    pub sample_size: usize,
    pub replications: usize,
    /// Chunking of the IID stage; batch `b` uses leaf stream `b`, exactly as
    /// in crude Monte Carlo.
    pub batch_size: u64,
    pub scan: ScanOrder,
    pub execution: Execution,
}

impl Default for FegsConfig {
    fn default() -> Self {
        Self {
            sample_size: 50_000,
            replications: 10,
            batch_size: 1_000,
            scan: ScanOrder::Fixed,
            execution: Execution::default(),
        }
    }
}

impl FegsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size < 100 {
            return Err(Error::Config(format!("sample size must be >= 100, got {}", self.sample_size)));
        }
        if self.replications < 1 || self.batch_size < 1 {
            return Err(Error::Config("replications and batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Chain lengths for one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingPlan {
    pub chain_lengths: Vec<usize>,
}

/// Splits an effort of `total` steps over `entrances` seeds: every seed gets
/// `⌊total / entrances⌋` steps and `total mod entrances` seeds, chosen
/// uniformly without replacement, get one more.
pub fn splitting_plan<R: Rng + ?Sized>(
    total: usize,
    entrances: usize,
    rng: &mut R,
) -> Result<SplittingPlan> {
    if entrances == 0 || entrances > total {
        return Err(Error::Contract(format!(
            "splitting plan needs 1 <= entrances ({entrances}) <= total ({total})"
        )));
    }
    let base = total / entrances;
    let extra = total % entrances;
    let mut chain_lengths = vec![base; entrances];
    if extra > 0 {
        for i in index::sample(rng, entrances, extra) {
            chain_lengths[i] += 1;
        }
    }
    Ok(SplittingPlan { chain_lengths })
}

/// `n` IID particles; batch `b` draws from `streams.rng(b)`.
fn iid_population(
    model: &SystemModel,
    n: usize,
    batch: u64,
    streams: &SeedStream,
    exec: Execution,
) -> Vec<Particle> {
    let total = n as u64;
    let batches = total.div_ceil(batch);
    map_indexed(exec, batches as usize, |b| {
        let b = b as u64;
        let mut rng = streams.rng(b);
        (0..batch_len(b, batch, total))
            .map(|_| Particle::new(model, model.sample_state(&mut rng)))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Refills a population of `total` particles from the entrance states by
/// running one chain per entrance at `level`. The plan uses leaf 0 of
/// `streams`, chain `i` uses leaf `i + 1`.
fn advance_population(
    model: &SystemModel,
    entrances: &[Particle],
    level: f64,
    total: usize,
    streams: &SeedStream,
    scan: ScanOrder,
    exec: Execution,
) -> Result<(Vec<Particle>, u64)> {
    let plan = splitting_plan(total, entrances.len(), &mut streams.rng(0))?;
    let kernel = MhKernel::new(model, level).with_scan(scan);
    let chains = map_indexed(exec, entrances.len(), |i| {
        let mut rng = streams.rng(i as u64 + 1);
        let mut out = Vec::with_capacity(plan.chain_lengths[i]);
        let evaluations = kernel.extend_chain(&entrances[i], plan.chain_lengths[i], &mut rng, &mut out);
        (out, evaluations)
    });
    let mut population = Vec::with_capacity(total);
    let mut evaluations = 0;
    for (states, e) in chains {
        population.extend(states);
        evaluations += e;
    }
    debug_assert_eq!(population.len(), total);
    Ok((population, evaluations))
}

/// Output of the adaptive level search.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSelection {
    pub schedule: LevelSchedule,
    pub pilot_evaluations: u64,
}

/// Adaptive level selection.
///
/// Draws `pilot_size` states, sets the next level to the `ρ`-quantile of
/// their importance values, refreshes the population below that level with
/// fixed-effort MCMC, and repeats until a quantile reaches `target`, which
/// becomes the last level. When the quantile does not move below the
/// previous level (atoms of the discrete capacity law), the largest observed
/// value strictly below it is used instead.
pub fn adam_levels(
    model: &SystemModel,
    target: f64,
    config: &AdamConfig,
    streams: &SeedStream,
) -> Result<LevelSelection> {
    config.validate()?;
    let n = config.pilot_size;
    let mut population = iid_population(model, n, config.batch_size, &streams.child(0), config.execution);
    let mut evaluations = n as u64;
    let mut previous = if model.uncertainty().is_enabled() {
        f64::INFINITY
    } else {
        model.installed_capacity()
    };
    let rank = ((config.quantile * n as f64).ceil() as usize).clamp(1, n) - 1;
    let mut levels = Vec::new();
    let mut scores = Vec::with_capacity(n);
    loop {
        if levels.len() >= config.max_levels {
            return Err(Error::Convergence(format!(
                "{} levels placed without reaching {target}; last level {previous}",
                levels.len()
            )));
        }
        scores.clear();
        scores.extend(population.iter().map(|p| p.importance));
        scores.sort_by(f64::total_cmp);
        let mut level = scores[rank];
        if level > target && level >= previous {
            level = scores
                .iter()
                .rev()
                .copied()
                .find(|&s| s < previous)
                .ok_or_else(|| {
                    Error::Convergence(format!(
                        "pilot population cannot descend below {previous}; target {target} looks unreachable"
                    ))
                })?;
        }
        if level <= target {
            levels.push(target);
            break;
        }
        levels.push(level);
        previous = level;
        let entrances: Vec<Particle> = population.into_iter().filter(|p| p.importance <= level).collect();
        let (next, e) = advance_population(
            model,
            &entrances,
            level,
            n,
            &streams.child(levels.len() as u64),
            config.scan,
            config.execution,
        )?;
        population = next;
        evaluations += e;
    }
    Ok(LevelSelection {
        schedule: LevelSchedule::new(levels)?,
        pilot_evaluations: evaluations,
    })
}

fn one_replication(
    model: &SystemModel,
    schedule: &LevelSchedule,
    config: &FegsConfig,
    streams: &SeedStream,
) -> Result<Replicate> {
    let n = config.sample_size;
    let levels = schedule.levels();
    let mut population = iid_population(model, n, config.batch_size, &streams.child(0), config.execution);
    let mut evaluations = n as u64;
    let mut entrance_counts = vec![0u64; levels.len()];
    for (t, &level) in levels.iter().enumerate() {
        let entrances: Vec<Particle> = population.into_iter().filter(|p| p.importance <= level).collect();
        entrance_counts[t] = entrances.len() as u64;
        if entrances.is_empty() || t + 1 == levels.len() {
            break;
        }
        let (next, e) = advance_population(
            model,
            &entrances,
            level,
            n,
            &streams.child(t as u64 + 1),
            config.scan,
            config.execution,
        )?;
        population = next;
        evaluations += e;
    }
    let estimate = entrance_counts
        .iter()
        .map(|&c| c as f64 / n as f64)
        .product();
    Ok(Replicate {
        estimate,
        entrance_counts,
        evaluations,
    })
}

/// Fixed-effort splitting estimate of `P(S(X) <= schedule.target())`.
///
/// Replication `r` runs on `streams.child(r)`; inside it, the IID stage uses
/// `child(0)` and stage `t` chains use `child(t)`. The reported risk is the
/// mean over replications and the relative error is the standard error of
/// that mean divided by the mean.
///
/// `evaluations` counts importance-function evaluations: `N` for the IID
/// stage plus every kernel step whose proposal differs from the current
/// state. Importance values travel with the states, so classifying a pooled
/// population against the next level costs nothing extra.
pub fn estimate_fegs(
    model: &SystemModel,
    schedule: &LevelSchedule,
    config: &FegsConfig,
    streams: &SeedStream,
) -> Result<EstimateResult> {
    config.validate()?;
    let replicates = map_indexed(config.execution, config.replications, |r| {
        one_replication(model, schedule, config, &streams.child(r as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let reps = replicates.len() as f64;
    let mean = replicates.iter().map(|r| r.estimate).sum::<f64>() / reps;
    let relative_error = if replicates.len() > 1 && mean > 0.0 {
        let var = replicates
            .iter()
            .map(|r| (r.estimate - mean).powi(2))
            .sum::<f64>()
            / (reps - 1.0);
        Some(var.sqrt() / (mean * reps.sqrt()))
    } else {
        None
    };
    let n = config.sample_size as f64;
    let stages = schedule
        .levels()
        .iter()
        .enumerate()
        .map(|(t, &level)| {
            let mean_entrances =
                replicates.iter().map(|r| r.entrance_counts[t] as f64).sum::<f64>() / reps;
            StageRecord {
                level,
                mean_entrances,
                conditional_probability: mean_entrances / n,
            }
        })
        .collect();
    Ok(EstimateResult {
        method: Method::Fegs,
        risk: mean,
        relative_error,
        evaluations: replicates.iter().map(|r| r.evaluations).sum(),
        pilot_evaluations: 0,
        seed: streams.master(),
        levels: schedule.levels().to_vec(),
        stages,
        replicates,
    })
}

/// Level selection followed by the splitting estimate. The pilot runs on
/// `streams.child(PILOT)` and the estimate on an independent sibling; pilot
/// cost is included in `evaluations` and also reported on its own.
pub fn run_fegs(
    model: &SystemModel,
    target: f64,
    adam: &AdamConfig,
    fegs: &FegsConfig,
    streams: &SeedStream,
) -> Result<EstimateResult> {
    let selection = adam_levels(model, target, adam, &streams.child(PILOT_STREAM))?;
    let mut result = estimate_fegs(model, &selection.schedule, fegs, &streams.child(RUN_STREAM))?;
    result.evaluations += selection.pilot_evaluations;
    result.pilot_evaluations = selection.pilot_evaluations;
    result.seed = streams.master();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Station;

    fn tiny() -> SystemModel {
        SystemModel::discrete(
            vec![Station::new(2, 50.0, 0.1), Station::new(1, 100.0, 0.2)],
            1.0,
        )
        .unwrap()
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn plan_examples() {
        let mut rng = SeedStream::new(0).rng(0);
        assert_eq!(sorted(splitting_plan(10, 3, &mut rng).unwrap().chain_lengths), [3, 3, 4]);
        assert_eq!(splitting_plan(12, 4, &mut rng).unwrap().chain_lengths, [3, 3, 3, 3]);
        assert_eq!(splitting_plan(5, 5, &mut rng).unwrap().chain_lengths, [1; 5]);
        assert!(matches!(splitting_plan(5, 0, &mut rng), Err(Error::Contract(_))));
        assert!(splitting_plan(5, 6, &mut rng).is_err());
    }

    #[test]
    fn plan_extras_are_spread_uniformly() {
        // 1 extra step among 4 seeds: each seed should get it ~25% of the time.
        let mut hits = [0u32; 4];
        let mut rng = SeedStream::new(1).rng(0);
        for _ in 0..40_000 {
            let plan = splitting_plan(9, 4, &mut rng).unwrap();
            let i = plan.chain_lengths.iter().position(|&l| l == 3).unwrap();
            hits[i] += 1;
        }
        for h in hits {
            // sd = sqrt(40000 * .25 * .75) ≈ 86.6
            assert!((f64::from(h) - 10_000.0).abs() < 4.0 * 86.7, "{hits:?}");
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(LevelSchedule::new(vec![]).is_err());
        assert!(LevelSchedule::new(vec![100.0, 100.0]).is_err());
        assert!(LevelSchedule::new(vec![100.0, 150.0]).is_err());
        assert!(LevelSchedule::new(vec![f64::NAN]).is_err());
        let s = LevelSchedule::new(vec![150.0, 100.0]).unwrap();
        assert_eq!(s.target(), 100.0);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn shallow_target_gives_single_level() {
        // P(S <= 150) = 0.352 >= ρ
        let sel = adam_levels(&tiny(), 150.0, &AdamConfig::default(), &SeedStream::new(2)).unwrap();
        assert_eq!(sel.schedule.levels(), &[150.0]);
        assert_eq!(sel.pilot_evaluations, 10_000);
    }

    #[test]
    fn tiny_descends_through_atoms() {
        // Exact conditional laws put the 25% quantiles at 150, then 100
        // (tied, forced to 50), then 50 (tied, forced to 0).
        let cfg = AdamConfig {
            quantile: 0.25,
            pilot_size: 20_000,
            ..AdamConfig::default()
        };
        let sel = adam_levels(&tiny(), 0.0, &cfg, &SeedStream::new(3)).unwrap();
        assert_eq!(sel.schedule.levels(), &[150.0, 100.0, 50.0, 0.0]);
    }

    #[test]
    fn unreachable_target_fails_to_converge() {
        let m = SystemModel::discrete(vec![Station::new(2, 50.0, 0.0)], 1.0).unwrap();
        let err = adam_levels(&m, 50.0, &AdamConfig::default(), &SeedStream::new(4)).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)), "{err:?}");
        let sel = adam_levels(&m, 100.0, &AdamConfig::default(), &SeedStream::new(4)).unwrap();
        assert_eq!(sel.schedule.levels(), &[100.0]);
    }

    #[test]
    fn adam_config_validation() {
        let bad = AdamConfig {
            quantile: 1.0,
            ..AdamConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AdamConfig {
            pilot_size: 99,
            ..AdamConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fixed_effort_stage_sizes() {
        let m = tiny();
        let cfg = FegsConfig {
            sample_size: 1_000,
            replications: 1,
            ..FegsConfig::default()
        };
        let schedule = LevelSchedule::new(vec![150.0, 100.0, 50.0]).unwrap();
        let streams = SeedStream::new(5);
        let rep = one_replication(&m, &schedule, &cfg, &streams).unwrap();
        assert!(rep.entrance_counts.iter().all(|&c| c > 0 && c <= 1_000));
        // Every chain stage returns exactly N particles.
        let entr: Vec<Particle> = iid_population(&m, 1_000, 1_000, &streams.child(0), Execution::Sequential)
            .into_iter()
            .filter(|p| p.importance <= 150.0)
            .collect();
        let (pop, _) = advance_population(
            &m,
            &entr,
            150.0,
            1_000,
            &streams.child(1),
            ScanOrder::Fixed,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(pop.len(), 1_000);
        assert!(pop.iter().all(|p| p.importance <= 150.0));
    }

    #[test]
    fn empty_rare_set_short_circuits() {
        let cfg = FegsConfig {
            sample_size: 1_000,
            replications: 3,
            ..FegsConfig::default()
        };
        let schedule = LevelSchedule::new(vec![100.0, -1.0]).unwrap();
        let r = estimate_fegs(&tiny(), &schedule, &cfg, &SeedStream::new(6)).unwrap();
        assert_eq!(r.risk, 0.0);
        assert_eq!(r.relative_error, None);
        for rep in &r.replicates {
            assert!(rep.entrance_counts[0] > 0);
            assert_eq!(rep.entrance_counts[1], 0);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let schedule = LevelSchedule::new(vec![150.0, 100.0, 50.0]).unwrap();
        let mut cfg = FegsConfig {
            sample_size: 2_000,
            replications: 4,
            execution: Execution::Sequential,
            ..FegsConfig::default()
        };
        let a = estimate_fegs(&tiny(), &schedule, &cfg, &SeedStream::new(7)).unwrap();
        cfg.execution = Execution::Parallel;
        let b = estimate_fegs(&tiny(), &schedule, &cfg, &SeedStream::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fused_run_reports_pilot_cost() {
        let adam = AdamConfig {
            pilot_size: 2_000,
            ..AdamConfig::default()
        };
        let fegs = FegsConfig {
            sample_size: 2_000,
            replications: 2,
            ..FegsConfig::default()
        };
        let r = run_fegs(&tiny(), 50.0, &adam, &fegs, &SeedStream::new(8)).unwrap();
        assert!(r.pilot_evaluations >= 2_000);
        assert!(r.evaluations > r.pilot_evaluations);
        assert_eq!(r.run_evaluations(), r.replicates.iter().map(|x| x.evaluations).sum::<u64>());
        assert_eq!(*r.levels.last().unwrap(), 50.0);
    }
}
