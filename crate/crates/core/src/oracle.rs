//! Exact capacity distribution by station-wise convolution.
//!
//! This is the reference every stochastic estimator is checked against. It
//! involves no randomness.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{std_normal_cdf, SystemModel, Uncertainty};

/// Default bound on `∏ (N_g + 1)`.
pub const DEFAULT_STATE_CAP: f64 = 1e7;

/// Tolerance for merging non-integer capacity atoms, in MW.
pub const MERGE_TOLERANCE_MW: f64 = 1e-9;

/// Probability mass function of total available capacity, ascending in MW.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    atoms: Vec<(f64, f64)>,
}

impl ExactDistribution {
    /// `(capacity, probability)` pairs sorted by capacity.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, p)| p).sum()
    }

    /// Mass at exactly `capacity` (0 if it is not an atom).
    pub fn probability_at(&self, capacity: f64) -> f64 {
        self.atoms
            .iter()
            .find(|&&(c, _)| (c - capacity).abs() <= MERGE_TOLERANCE_MW)
            .map_or(0.0, |&(_, p)| p)
    }

    /// `P(C <= x)`, inclusive.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|&&(c, _)| c <= x)
            .fold(0.0, |acc, &(_, p)| acc + p)
    }

    /// `P(C - X_L + X_W <= threshold)` for the given Gaussian components.
    ///
    /// With no continuous component (or all sigmas zero) this is the
    /// inclusive step sum. Otherwise `X_L - X_W` is normal and each atom
    /// contributes `P(c) Φ((μ_L - μ_W + threshold - c) / σ)`.
    pub fn risk(&self, uncertainty: &Uncertainty, threshold: f64) -> Result<f64> {
        if uncertainty.truncate_at_zero && uncertainty.is_enabled() {
            return Err(Error::Unsupported(
                "exact risk is only available for untruncated Gaussian load/wind".into(),
            ));
        }
        let (mut shift, mut var) = (0.0, 0.0);
        if let Some(l) = uncertainty.load {
            shift += l.mean;
            var += l.sigma * l.sigma;
        }
        if let Some(w) = uncertainty.wind {
            shift -= w.mean;
            var += w.sigma * w.sigma;
        }
        let risk = if var == 0.0 {
            self.cdf(threshold + shift)
        } else {
            let sd = var.sqrt();
            self.atoms
                .iter()
                .fold(0.0, |acc, &(c, p)| acc + p * std_normal_cdf((shift + threshold - c) / sd))
        };
        Ok(risk.min(1.0))
    }

    /// Capacity outage table as CSV: `capacity_mw,probability,cumulative`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["capacity_mw", "probability", "cumulative"])?;
        let mut cumulative = 0.0;
        for &(c, p) in &self.atoms {
            cumulative += p;
            w.write_record([c.to_string(), p.to_string(), cumulative.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn integral_capacities(model: &SystemModel) -> bool {
    model
        .stations()
        .iter()
        .all(|s| s.unit_capacity.fract() == 0.0)
        && model.installed_capacity() < 2f64.powi(52)
}

/// Exact law of the available capacity (continuous components ignored).
pub fn exact_capacity_distribution(model: &SystemModel) -> Result<ExactDistribution> {
    exact_capacity_distribution_capped(model, DEFAULT_STATE_CAP)
}

pub fn exact_capacity_distribution_capped(
    model: &SystemModel,
    max_states: f64,
) -> Result<ExactDistribution> {
    let states = model.state_space_size();
    if states > max_states {
        return Err(Error::CapacityLimit {
            states,
            cap: max_states,
        });
    }
    // Small units first keeps the intermediate atom sets small.
    let mut order: Vec<usize> = (0..model.stations().len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&model.stations()[a], &model.stations()[b]);
        sa.unit_capacity
            .total_cmp(&sb.unit_capacity)
            .then(sa.unit_count.cmp(&sb.unit_count))
    });

    let atoms = if integral_capacities(model) {
        convolve_integral(model, &order)
    } else {
        convolve_real(model, &order)
    };
    Ok(ExactDistribution { atoms })
}

fn station_terms(model: &SystemModel, g: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
    (0..=model.stations()[g].unit_count)
        .map(move |k| (k, model.station_pmf(g, k).expect("k in range")))
        .filter(|&(_, p)| p > 0.0)
}

fn convolve_integral(model: &SystemModel, order: &[usize]) -> Vec<(f64, f64)> {
    let mut dist: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
    for &g in order {
        let unit = model.stations()[g].unit_capacity as i64;
        let mut next = BTreeMap::new();
        for (&c, &p) in &dist {
            for (k, pk) in station_terms(model, g) {
                *next.entry(c + i64::from(k) * unit).or_insert(0.0) += p * pk;
            }
        }
        dist = next;
    }
    dist.into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(c, p)| (c as f64, p))
        .collect()
}

fn convolve_real(model: &SystemModel, order: &[usize]) -> Vec<(f64, f64)> {
    let mut dist = vec![(0.0, 1.0)];
    for &g in order {
        let unit = model.stations()[g].unit_capacity;
        let mut next = Vec::with_capacity(dist.len() * (model.stations()[g].unit_count as usize + 1));
        for &(c, p) in &dist {
            for (k, pk) in station_terms(model, g) {
                next.push((c + f64::from(k) * unit, p * pk));
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        dist = merge_close(next);
    }
    dist.retain(|&(_, p)| p > 0.0);
    dist
}

fn merge_close(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (c, p) in sorted {
        match out.last_mut() {
            Some(last) if c - last.0 <= MERGE_TOLERANCE_MW => last.1 += p,
            _ => out.push((c, p)),
        }
    }
    out
}

/// Exact `P(S(X) <= threshold)`.
///
/// For a discrete model pass the load as `threshold`. When load uncertainty
/// is enabled the importance is a margin and the risk threshold is 0.
pub fn exact_risk(model: &SystemModel, threshold: f64) -> Result<f64> {
    exact_capacity_distribution(model)?.risk(model.uncertainty(), threshold)
}
