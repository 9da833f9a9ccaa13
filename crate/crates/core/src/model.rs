//! Generating-system probability model.
//!
//! A system is an ordered list of stations, each made of identical units that
//! fail independently during the lead time. The random state is the number of
//! available units per station, optionally extended by a Gaussian load draw
//! and a Gaussian wind draw. The importance function maps a state to the
//! available capacity (or the capacity margin once load/wind are random).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub unit_count: u32,
    /// Per-unit capacity in MW.
    pub unit_capacity: f64,
    /// Per-unit outage rate in 1/h.
    pub outage_rate: f64,
}

impl Station {
    pub fn new(unit_count: u32, unit_capacity: f64, outage_rate: f64) -> Self {
        Self {
            name: None,
            unit_count,
            unit_capacity,
            outage_rate,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn installed_capacity(&self) -> f64 {
        f64::from(self.unit_count) * self.unit_capacity
    }
}

/// Normal law used for the load and wind draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub fn new(mean: f64, sigma: f64) -> Self {
        Self { mean, sigma }
    }
}

/// Optional continuous components of the state. Each of `load` and `wind`
/// is enabled by being present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub load: Option<Gaussian>,
    pub wind: Option<Gaussian>,
    /// Restrict both laws to non-negative values. Off by default.
    #[serde(default)]
    pub truncate_at_zero: bool,
}

impl Uncertainty {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.load.is_some() || self.wind.is_some()
    }
}

/// A realisation of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub available_units: Vec<u32>,
    pub load_draw: Option<f64>,
    pub wind_draw: Option<f64>,
}

impl SystemState {
    pub fn discrete(available_units: Vec<u32>) -> Self {
        Self {
            available_units,
            load_draw: None,
            wind_draw: None,
        }
    }
}

/// Binomial tables for one station, indexed by available-unit count.
#[derive(Debug, Clone, PartialEq)]
struct StationTable {
    pmf: Vec<f64>,
    ln_pmf: Vec<f64>,
    cdf: Vec<f64>,
}

/// `x * ln(y)` with the convention `0 * ln(0) = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn ln_binomial_pmf(n: u32, k: u32, p_up: f64) -> f64 {
    let p_down = 1.0 - p_up;
    ln_binomial(u64::from(n), u64::from(k)) + xlny(f64::from(k), p_up) + xlny(f64::from(n - k), p_down)
}

impl StationTable {
    fn build(station: &Station, lead_time: f64) -> Self {
        let p_up = 1.0 - station.outage_rate * lead_time;
        let n = station.unit_count;
        let ln_pmf: Vec<f64> = (0..=n).map(|k| ln_binomial_pmf(n, k, p_up)).collect();
        let pmf: Vec<f64> = ln_pmf.iter().map(|l| l.exp()).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Rounding must not leave a gap above the last cell.
        *cdf.last_mut().expect("unit_count >= 1") = 1.0;
        Self { pmf, ln_pmf, cdf }
    }
}

/// Binomial availability pmf of one station: probability that exactly `k`
/// of its units are available after `lead_time` hours.
pub fn station_pmf(station: &Station, lead_time: f64, k: u32) -> Result<f64> {
    if k > station.unit_count {
        return Err(Error::Domain(format!(
            "k = {k} outside 0..={}",
            station.unit_count
        )));
    }
    let p_up = 1.0 - station.outage_rate * lead_time;
    Ok(ln_binomial_pmf(station.unit_count, k, p_up).exp())
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    stations: Vec<Station>,
    lead_time: f64,
    uncertainty: Uncertainty,
    tables: Vec<StationTable>,
}

fn validate_gaussian(label: &str, g: &Gaussian, truncate: bool) -> Result<()> {
    if !g.mean.is_finite() {
        return Err(Error::Validation(format!("{label} forecast must be finite")));
    }
    if !(g.sigma.is_finite() && g.sigma >= 0.0) {
        return Err(Error::Validation(format!(
            "{label} sigma must be finite and >= 0, got {}",
            g.sigma
        )));
    }
    if truncate {
        let mass = if g.sigma == 0.0 {
            if g.mean >= 0.0 { 1.0 } else { 0.0 }
        } else {
            std_normal_cdf(g.mean / g.sigma)
        };
        if mass < 1e-3 {
            return Err(Error::Validation(format!(
                "{label} law keeps only {mass:.2e} of its mass above zero"
            )));
        }
    }
    Ok(())
}

impl SystemModel {
    pub fn new(stations: Vec<Station>, lead_time: f64, uncertainty: Uncertainty) -> Result<Self> {
        if !(lead_time.is_finite() && lead_time > 0.0) {
            return Err(Error::Validation(format!(
                "lead time must be positive, got {lead_time}"
            )));
        }
        if stations.is_empty() {
            return Err(Error::Validation(
                "station list is empty; installed capacity must be positive".into(),
            ));
        }
        for (g, s) in stations.iter().enumerate() {
            if s.unit_count < 1 {
                return Err(Error::Validation(format!("station {g}: unit_count must be >= 1")));
            }
            if !(s.unit_capacity.is_finite() && s.unit_capacity > 0.0) {
                return Err(Error::Validation(format!(
                    "station {g}: unit capacity must be positive, got {}",
                    s.unit_capacity
                )));
            }
            if !(s.outage_rate.is_finite() && s.outage_rate >= 0.0) {
                return Err(Error::Validation(format!(
                    "station {g}: outage rate must be >= 0, got {}",
                    s.outage_rate
                )));
            }
            let q = s.outage_rate * lead_time;
            if q >= 1.0 {
                return Err(Error::Validation(format!(
                    "station {g}: unit outage probability {q} (rate x lead time) must be < 1"
                )));
            }
        }
        if let Some(l) = &uncertainty.load {
            validate_gaussian("load", l, uncertainty.truncate_at_zero)?;
        }
        if let Some(w) = &uncertainty.wind {
            validate_gaussian("wind", w, uncertainty.truncate_at_zero)?;
        }
        let tables = stations
            .iter()
            .map(|s| StationTable::build(s, lead_time))
            .collect();
        Ok(Self {
            stations,
            lead_time,
            uncertainty,
            tables,
        })
    }

    /// Model without load or wind uncertainty.
    pub fn discrete(stations: Vec<Station>, lead_time: f64) -> Result<Self> {
        Self::new(stations, lead_time, Uncertainty::none())
    }

    pub fn with_uncertainty(&self, uncertainty: Uncertainty) -> Result<Self> {
        Self::new(self.stations.clone(), self.lead_time, uncertainty)
    }

    pub fn with_stations(&self, stations: Vec<Station>) -> Result<Self> {
        Self::new(stations, self.lead_time, self.uncertainty)
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn lead_time(&self) -> f64 {
        self.lead_time
    }

    pub fn uncertainty(&self) -> &Uncertainty {
        &self.uncertainty
    }

    pub fn installed_capacity(&self) -> f64 {
        self.stations.iter().map(Station::installed_capacity).sum()
    }

    /// Per-unit outage probability `λ_g Δt` of station `g`.
    pub fn unit_outage_probability(&self, g: usize) -> f64 {
        self.stations[g].outage_rate * self.lead_time
    }

    /// Number of discrete states, `∏ (N_g + 1)`, as a float to avoid overflow.
    pub fn state_space_size(&self) -> f64 {
        self.stations
            .iter()
            .map(|s| f64::from(s.unit_count) + 1.0)
            .product()
    }

    pub fn all_available(&self) -> SystemState {
        SystemState {
            available_units: self.stations.iter().map(|s| s.unit_count).collect(),
            load_draw: self.uncertainty.load.map(|g| g.mean),
            wind_draw: self.uncertainty.wind.map(|g| g.mean),
        }
    }

    pub fn validate_state(&self, state: &SystemState) -> Result<()> {
        if state.available_units.len() != self.stations.len() {
            return Err(Error::ModelMismatch {
                state: state.available_units.len(),
                stations: self.stations.len(),
            });
        }
        for (g, (&n, s)) in state.available_units.iter().zip(&self.stations).enumerate() {
            if n > s.unit_count {
                return Err(Error::Domain(format!(
                    "station {g}: {n} available units exceeds {}",
                    s.unit_count
                )));
            }
        }
        if state.load_draw.is_some() != self.uncertainty.load.is_some() {
            return Err(Error::Domain("load draw present iff load uncertainty is enabled".into()));
        }
        if state.wind_draw.is_some() != self.uncertainty.wind.is_some() {
            return Err(Error::Domain("wind draw present iff wind uncertainty is enabled".into()));
        }
        Ok(())
    }

    /// Available capacity, minus the load draw and plus the wind draw when
    /// those components are enabled.
    pub fn importance(&self, state: &SystemState) -> Result<f64> {
        if state.available_units.len() != self.stations.len() {
            return Err(Error::ModelMismatch {
                state: state.available_units.len(),
                stations: self.stations.len(),
            });
        }
        Ok(self.score(state))
    }

    /// Importance without dimension checks; `state` must come from this model.
    pub(crate) fn score(&self, state: &SystemState) -> f64 {
        let capacity: f64 = state
            .available_units
            .iter()
            .zip(&self.stations)
            .map(|(&n, s)| f64::from(n) * s.unit_capacity)
            .sum();
        capacity - state.load_draw.unwrap_or(0.0) + state.wind_draw.unwrap_or(0.0)
    }

    /// `true` when `importance(state) <= threshold` (inclusive).
    pub fn indicator(&self, state: &SystemState, threshold: f64) -> Result<bool> {
        Ok(self.importance(state)? <= threshold)
    }

    pub fn station_pmf(&self, g: usize, k: u32) -> Result<f64> {
        let table = self
            .tables
            .get(g)
            .ok_or_else(|| Error::Domain(format!("no station {g}")))?;
        table
            .pmf
            .get(k as usize)
            .copied()
            .ok_or_else(|| Error::Domain(format!("k = {k} outside 0..={}", self.stations[g].unit_count)))
    }

    pub(crate) fn ln_station_pmf(&self, g: usize, k: u32) -> f64 {
        self.tables[g].ln_pmf[k as usize]
    }

    fn ln_gaussian(&self, law: &Gaussian, x: f64) -> f64 {
        let truncate = self.uncertainty.truncate_at_zero;
        if truncate && x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if law.sigma == 0.0 {
            // Point mass at the forecast.
            return if x == law.mean { 0.0 } else { f64::NEG_INFINITY };
        }
        let z = (x - law.mean) / law.sigma;
        let mut ln = -0.5 * z * z - law.sigma.ln() - LN_SQRT_2PI;
        if truncate {
            ln -= std_normal_cdf(law.mean / law.sigma).ln();
        }
        ln
    }

    /// Log of the joint density: binomial pmfs of every station, times the
    /// Gaussian densities of the enabled continuous components.
    pub fn ln_state_density(&self, state: &SystemState) -> Result<f64> {
        self.validate_state(state)?;
        let mut ln: f64 = state
            .available_units
            .iter()
            .enumerate()
            .map(|(g, &n)| self.ln_station_pmf(g, n))
            .sum();
        if let (Some(law), Some(x)) = (&self.uncertainty.load, state.load_draw) {
            ln += self.ln_gaussian(law, x);
        }
        if let (Some(law), Some(x)) = (&self.uncertainty.wind, state.wind_draw) {
            ln += self.ln_gaussian(law, x);
        }
        Ok(ln)
    }

    pub fn state_density(&self, state: &SystemState) -> Result<f64> {
        Ok(self.ln_state_density(state)?.exp())
    }

    pub(crate) fn sample_station<R: Rng + ?Sized>(&self, g: usize, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        self.tables[g].cdf.partition_point(|&c| c <= u) as u32
    }

    pub(crate) fn sample_gaussian<R: Rng + ?Sized>(&self, law: &Gaussian, rng: &mut R) -> f64 {
        if law.sigma == 0.0 {
            return law.mean;
        }
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let x = law.mean + law.sigma * z;
            if !self.uncertainty.truncate_at_zero || x >= 0.0 {
                return x;
            }
        }
    }

    /// One IID draw from the model: binomial availability per station by
    /// CDF inversion, then load and wind when enabled.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> SystemState {
        let mut state = self.all_available();
        self.sample_into(&mut state, rng);
        state
    }

    /// `sample_state` into an existing buffer shaped for this model.
    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, state: &mut SystemState, rng: &mut R) {
        for g in 0..self.stations.len() {
            state.available_units[g] = self.sample_station(g, rng);
        }
        state.load_draw = self.uncertainty.load.map(|law| self.sample_gaussian(&law, rng));
        state.wind_draw = self.uncertainty.wind.map(|law| self.sample_gaussian(&law, rng));
    }
}
