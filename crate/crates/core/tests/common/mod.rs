//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gsrisk::{Station, SystemModel};

/// Capacities are bucketed on a micro-MW grid.
const KEY_SCALE: f64 = 1e6;

pub fn tiny() -> SystemModel {
    SystemModel::discrete(vec![Station::new(2, 50.0, 0.1), Station::new(1, 100.0, 0.2)], 1.0).unwrap()
}

pub fn binomial_coefficient(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Probability that exactly `k` of `n` units survive when each fails with
/// probability `q`.
pub fn binomial_pmf(n: u32, k: u32, q: f64) -> f64 {
    binomial_coefficient(n, k) * (1.0 - q).powi(k as i32) * q.powi((n - k) as i32)
}

/// Every joint state of the stations, with its probability.
pub fn enumerate_states(stations: &[Station], lead_time: f64) -> Vec<(Vec<u32>, f64)> {
    let mut states = vec![(Vec::new(), 1.0)];
    for s in stations {
        let q = s.outage_rate * lead_time;
        let mut next = Vec::with_capacity(states.len() * (s.unit_count as usize + 1));
        for (units, p) in &states {
            for k in 0..=s.unit_count {
                let mut u: Vec<u32> = units.clone();
                u.push(k);
                next.push((u, p * binomial_pmf(s.unit_count, k, q)));
            }
        }
        states = next;
    }
    states
}

pub fn capacity_of(stations: &[Station], units: &[u32]) -> f64 {
    units.iter().zip(stations).map(|(&k, s)| f64::from(k) * s.unit_capacity).sum()
}

/// Capacity distribution by summing over every state.
pub fn enumerated_distribution(stations: &[Station], lead_time: f64) -> Vec<(f64, f64)> {
    let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
    for (units, p) in enumerate_states(stations, lead_time) {
        let key = (capacity_of(stations, &units) * KEY_SCALE).round() as i64;
        *acc.entry(key).or_default() += p;
    }
    acc.into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(k, p)| (k as f64 / KEY_SCALE, p))
        .collect()
}

pub fn enumerated_risk(stations: &[Station], lead_time: f64, threshold: f64) -> f64 {
    enumerate_states(stations, lead_time)
        .into_iter()
        .filter(|(u, _)| capacity_of(stations, u) <= threshold)
        .map(|(_, p)| p)
        .sum()
}

/// Pearson statistic and the upper-tail p-value for observed counts against
/// expected probabilities. Cells with tiny expectation are pooled.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let n: u64 = observed.iter().sum();
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n as f64;
        if e < 5.0 {
            pool_obs += o as f64;
            pool_exp += e;
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp;
        cells += 1;
    }
    let dof = (cells - 1).max(1) as f64;
    (stat, 1.0 - ChiSquared::new(dof).unwrap().cdf(stat))
}
