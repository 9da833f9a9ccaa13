mod common;

use common::{enumerate_states, enumerated_distribution, enumerated_risk, tiny};
use gsrisk::{exact_capacity_distribution, exact_risk, rts_model, Station, SystemModel, SystemState};
use proptest::prelude::*;

fn station() -> impl Strategy<Value = Station> {
    let capacity = prop_oneof![
        (1u32..=200).prop_map(f64::from),
        (1u32..=2000).prop_map(|c| f64::from(c) / 10.0),
    ];
    (1u32..=4, capacity, 0.0f64..0.45).prop_map(|(n, c, q)| Station::new(n, c, q / 2.0))
}

fn small_model() -> impl Strategy<Value = SystemModel> {
    prop::collection::vec(station(), 1..=4).prop_map(|s| SystemModel::discrete(s, 2.0).unwrap())
}

proptest! {
    #[test]
    fn oracle_matches_enumeration_per_atom(model in small_model()) {
        let exact = exact_capacity_distribution(&model).unwrap();
        let naive = enumerated_distribution(model.stations(), model.lead_time());
        prop_assert_eq!(exact.len(), naive.len());
        for (&(c, p), &(nc, np)) in exact.atoms().iter().zip(&naive) {
            prop_assert!((c - nc).abs() < 1e-6, "atom {} vs {}", c, nc);
            prop_assert!((p - np).abs() <= 1e-12, "P({}) {} vs {}", c, p, np);
        }
        prop_assert!((exact.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_is_order_independent(model in small_model(), seed in any::<u64>()) {
        let mut stations = model.stations().to_vec();
        let k = stations.len();
        stations.rotate_left((seed as usize) % k);
        if seed & 1 == 1 {
            stations.reverse();
        }
        let permuted = model.with_stations(stations).unwrap();
        let a = exact_capacity_distribution(&model).unwrap();
        let b = exact_capacity_distribution(&permuted).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (&(c, p), &(d, q)) in a.atoms().iter().zip(b.atoms()) {
            prop_assert!((c - d).abs() < 1e-6);
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn risk_matches_enumeration(model in small_model(), frac in 0.0f64..1.0) {
        let threshold = (frac * model.installed_capacity()).round();
        let exact = exact_risk(&model, threshold).unwrap();
        let naive = enumerated_risk(model.stations(), model.lead_time(), threshold);
        prop_assert!((exact - naive).abs() <= 1e-12);
    }

    #[test]
    fn station_pmfs_sum_to_one(model in small_model()) {
        for (g, s) in model.stations().iter().enumerate() {
            let total: f64 = (0..=s.unit_count).map(|k| model.station_pmf(g, k).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_density_sums_to_one_and_matches_enumeration(model in small_model()) {
        let mut total = 0.0;
        for (units, p) in enumerate_states(model.stations(), model.lead_time()) {
            let d = model.state_density(&SystemState::discrete(units)).unwrap();
            prop_assert!((d - p).abs() <= 1e-12 * p.max(1e-300) + 1e-15);
            total += d;
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn importance_increases_with_available_units(model in small_model(), g_seed in any::<usize>()) {
        let g = g_seed % model.stations().len();
        let mut state = SystemState::discrete(vec![0; model.stations().len()]);
        let mut last = model.importance(&state).unwrap();
        for _ in 0..model.stations()[g].unit_count {
            state.available_units[g] += 1;
            let next = model.importance(&state).unwrap();
            prop_assert!(next > last);
            last = next;
        }
    }

    #[test]
    fn cdf_is_monotone(model in small_model()) {
        let d = exact_capacity_distribution(&model).unwrap();
        let mut prev = 0.0;
        for &(c, _) in d.atoms() {
            let f = d.cdf(c);
            prop_assert!(f >= prev);
            prev = f;
        }
        prop_assert!((prev - 1.0).abs() < 1e-12);
    }
}

#[test]
fn tiny_distribution_is_exact() {
    let d = exact_capacity_distribution(&tiny()).unwrap();
    let expected = [(0.0, 0.002), (50.0, 0.036), (100.0, 0.170), (150.0, 0.144), (200.0, 0.648)];
    assert_eq!(d.len(), expected.len());
    for (&(c, p), &(ec, ep)) in d.atoms().iter().zip(&expected) {
        assert_eq!(c, ec);
        assert!((p - ep).abs() < 1e-15, "P({c}) = {p}");
    }
}

#[test]
fn rts_risks_match_full_enumeration() {
    let model = rts_model();
    let states = enumerate_states(model.stations(), model.lead_time());
    assert_eq!(states.len(), 504_000);
    for load in [3100.0, 3000.0, 2900.0, 2850.0, 2700.0] {
        let naive: f64 = states
            .iter()
            .filter(|(u, _)| common::capacity_of(model.stations(), u) <= load)
            .map(|(_, p)| p)
            .sum();
        let exact = exact_risk(&model, load).unwrap();
        assert!((exact - naive).abs() <= 1e-12, "{load}: {exact} vs {naive}");
    }
}
