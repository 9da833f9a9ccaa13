//! Component-wise discrete Metropolis-Hastings kernel restricted to a level
//! set `{x : S(x) <= level}`.
//!
//! Each station proposes a value uniformly from `0..=N_g` and accepts it with
//! probability `min(1, f_g(candidate) / f_g(current))`. Load and wind, when
//! present, are proposed afresh from their own Gaussian laws (acceptance
//! ratio 1). The assembled proposal replaces the current state only if it
//! stays inside the level set. The stationary law is the model density
//! conditioned on the level set.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{SystemModel, SystemState};

/// A state together with its importance value.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub state: SystemState,
    pub importance: f64,
}

impl Particle {
    pub fn new(model: &SystemModel, state: SystemState) -> Self {
        let importance = model.score(&state);
        Self { state, importance }
    }
}

/// Order in which station components are updated within one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ScanOrder {
    #[default]
    Fixed,
    /// Fresh random permutation every step.
    Random,
}

/// Probability of accepting `candidate` for station `g` when it currently
/// has `current` units available.
pub fn component_acceptance(model: &SystemModel, g: usize, current: u32, candidate: u32) -> f64 {
    let ln_ratio = model.ln_station_pmf(g, candidate) - model.ln_station_pmf(g, current);
    ln_ratio.exp().min(1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct MhKernel<'a> {
    model: &'a SystemModel,
    level: f64,
    scan: ScanOrder,
}

impl<'a> MhKernel<'a> {
    pub fn new(model: &'a SystemModel, level: f64) -> Self {
        Self {
            model,
            level,
            scan: ScanOrder::Fixed,
        }
    }

    pub fn with_scan(mut self, scan: ScanOrder) -> Self {
        self.scan = scan;
        self
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Advances `current` by one step in place. `proposal` and `order` are
    /// scratch buffers. Returns `true` if the importance function was
    /// evaluated, which happens unless the proposal equals the current state.
    pub(crate) fn advance<R: Rng + ?Sized>(
        &self,
        current: &mut Particle,
        proposal: &mut SystemState,
        order: &mut Vec<usize>,
        rng: &mut R,
    ) -> bool {
        let model = self.model;
        proposal.clone_from(&current.state);

        let stations = model.stations();
        if order.len() != stations.len() {
            *order = (0..stations.len()).collect();
        }
        if self.scan == ScanOrder::Random {
            order.shuffle(rng);
        }
        for &g in order.iter() {
            let n = current.state.available_units[g];
            let candidate = rng.random_range(0..=stations[g].unit_count);
            if candidate == n {
                continue;
            }
            let ln_ratio = model.ln_station_pmf(g, candidate) - model.ln_station_pmf(g, n);
            if ln_ratio >= 0.0 || rng.random::<f64>() < ln_ratio.exp() {
                proposal.available_units[g] = candidate;
            }
        }
        let uncertainty = model.uncertainty();
        if let Some(law) = uncertainty.load {
            proposal.load_draw = Some(model.sample_gaussian(&law, rng));
        }
        if let Some(law) = uncertainty.wind {
            proposal.wind_draw = Some(model.sample_gaussian(&law, rng));
        }

        if *proposal == current.state {
            return false;
        }
        let importance = model.score(proposal);
        if importance <= self.level {
            std::mem::swap(&mut current.state, proposal);
            current.importance = importance;
        }
        debug_assert!(current.importance <= self.level);
        true
    }

    /// Runs `length` steps from `seed`, appending every visited state to
    /// `out`. Returns the number of importance evaluations.
    pub(crate) fn extend_chain<R: Rng + ?Sized>(
        &self,
        seed: &Particle,
        length: usize,
        rng: &mut R,
        out: &mut Vec<Particle>,
    ) -> u64 {
        let mut current = seed.clone();
        let mut proposal = seed.state.clone();
        let mut order = Vec::new();
        let mut evaluations = 0;
        for _ in 0..length {
            if self.advance(&mut current, &mut proposal, &mut order, rng) {
                evaluations += 1;
            }
            out.push(current.clone());
        }
        evaluations
    }

    fn check_seed(&self, state: &SystemState) -> Result<Particle> {
        self.model.validate_state(state)?;
        let particle = Particle::new(self.model, state.clone());
        if particle.importance > self.level {
            return Err(Error::Contract(format!(
                "chain seed has importance {} above level {}",
                particle.importance, self.level
            )));
        }
        Ok(particle)
    }
}

/// One kernel step from `current`, which must satisfy the level constraint.
pub fn mh_step<R: Rng + ?Sized>(
    current: &SystemState,
    level: f64,
    model: &SystemModel,
    rng: &mut R,
) -> Result<SystemState> {
    let kernel = MhKernel::new(model, level);
    let mut particle = kernel.check_seed(current)?;
    let mut proposal = current.clone();
    kernel.advance(&mut particle, &mut proposal, &mut Vec::new(), rng);
    Ok(particle.state)
}

#[derive(Debug, Clone)]
pub struct ChainRequest<'a> {
    pub model: &'a SystemModel,
    pub seed_state: SystemState,
    pub level: f64,
    pub length: usize,
    pub scan: ScanOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    /// `length` states; the seed itself is not included.
    pub states: Vec<SystemState>,
    pub evaluations: u64,
}

pub fn run_chain<R: Rng + ?Sized>(request: &ChainRequest<'_>, rng: &mut R) -> Result<Chain> {
    let kernel = MhKernel::new(request.model, request.level).with_scan(request.scan);
    let seed = kernel.check_seed(&request.seed_state)?;
    let mut particles = Vec::with_capacity(request.length);
    let evaluations = kernel.extend_chain(&seed, request.length, rng, &mut particles);
    Ok(Chain {
        states: particles.into_iter().map(|p| p.state).collect(),
        evaluations,
    })
}
