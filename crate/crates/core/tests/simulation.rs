use coopcensor::asymptotic::{self, AsymptoticConfig, Subnetwork};
use coopcensor::model::{build_line_scenario, build_random_tree_scenario, EnergyParams};
use coopcensor::sim::{run_replications, simulate_with, SimConfig, Strategy as Policy};
use proptest::prelude::*;

#[test]
fn cooperative_refreshes_replay_from_their_snapshots() {
    let s = build_random_tree_scenario(10, 17, 1, 5, 5..=20, 3_000).unwrap();
    let cfg = SimConfig::default();
    let (m, log) = simulate_with(&s, &Policy::gct(), 4, &cfg).unwrap();
    assert!(!m.truncated);
    assert!(log.len() > 1);
    assert_eq!(log[0].epoch, 0);
    assert!(log.windows(2).all(|w| w[0].epoch < w[1].epoch));
    // the live set only ever shrinks
    assert!(log.windows(2).all(|w| w[1].live.iter().all(|i| w[0].live.contains(i))));
    for r in &log {
        let net = Subnetwork::new(&s, r.live.clone()).unwrap();
        let e: Vec<f64> = r.energy.iter().map(|&v| v as f64).collect();
        let sol = asymptotic::solve_subnetwork(&net, &e, &cfg.asymptotic).unwrap();
        assert_eq!(sol.thresholds.0, r.thresholds, "refresh at epoch {}", r.epoch);
        assert_eq!(sol.partition.critical, r.critical);
    }
}

#[test]
fn refresh_interval_bounds_the_gap_between_refreshes() {
    let s = build_line_scenario(4, EnergyParams::default(), 2_000).unwrap();
    let st = Policy::GlobalCooperative { refresh_interval: 50 };
    let (m, log) = simulate_with(&s, &st, 8, &SimConfig::default()).unwrap();
    let mut epochs: Vec<u64> = log.iter().map(|r| r.epoch).collect();
    epochs.push(m.lifetime_epochs);
    assert!(epochs.windows(2).all(|w| w[1] - w[0] <= 50), "{epochs:?}");
}

#[test]
fn independent_seeds_agree_within_confidence() {
    let s = build_line_scenario(5, EnergyParams::default(), 1_000).unwrap();
    let cfg = SimConfig::default();
    let a = run_replications(&s, &Policy::NonSelective, 40, 1, &cfg).unwrap();
    let b = run_replications(&s, &Policy::NonSelective, 40, 2, &cfg).unwrap();
    for (x, y) in [(&a.received, &b.received), (&a.importance_sum, &b.importance_sum)] {
        assert!(x.lower() <= y.upper() && y.lower() <= x.upper(), "{x:?} vs {y:?}");
    }
    assert_ne!(a.runs[0].seed, b.runs[0].seed);
}

#[test]
fn local_thresholds_ignore_the_rest_of_the_network() {
    // the per-node rule only sees its own costs, so line length does not matter
    let cfg = AsymptoticConfig::default();
    let short = build_line_scenario(2, EnergyParams::default(), 10).unwrap();
    let long = build_line_scenario(12, EnergyParams::default(), 10).unwrap();
    let a = coopcensor::sim::local_thresholds(&short, &cfg).unwrap();
    let b = coopcensor::sim::local_thresholds(&long, &cfg).unwrap();
    assert_eq!(a[0], b[0]);
}

fn strategy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        Just(Policy::NonSelective),
        Just(Policy::LocalThreshold),
        (10u64..200).prop_map(|r| Policy::GlobalCooperative { refresh_interval: r }),
        (0.0f64..3.0).prop_map(|m| Policy::FixedThreshold(vec![m; 6])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_conserve_energy_and_messages(
        seed in any::<u64>(), battery in 20u64..600, st in strategy(), run_seed in any::<u64>(),
    ) {
        let s = build_random_tree_scenario(6, seed, 1, 5, 5..=20, battery).unwrap();
        let (m, _) = simulate_with(&s, &st, run_seed, &SimConfig::default()).unwrap();
        let initial: u64 = s.initial_energy().iter().sum();
        let left: u64 = m.final_energy.iter().sum();
        prop_assert_eq!(initial - left, m.charged);
        prop_assert_eq!(m.generated, m.received + m.discarded + m.lost);
        prop_assert!(m.importance_sum >= 0.0);
        prop_assert!(!m.truncated);
        for (i, d) in m.death_epochs.iter().enumerate() {
            prop_assert_eq!(d.is_some(), m.final_energy[i] == 0);
            if let Some(t) = d {
                prop_assert!(*t <= m.lifetime_epochs);
            }
        }
        // at the end no source can reach the sink
        for j in 0..6 {
            prop_assert!(!s.path_feasible(&m.final_energy, j));
        }
    }
}
