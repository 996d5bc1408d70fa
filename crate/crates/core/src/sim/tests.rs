use super::*;
use crate::model::{build_line_scenario, single_node_scenario, EnergyParams, ImportanceModel};

fn lone(battery: u64) -> Scenario {
    single_node_scenario(1, 6, ImportanceModel::exponential(1.0), battery).unwrap()
}

#[test]
fn lone_node_delivers_twice() {
    let m = simulate(&lone(12), &Strategy::NonSelective, 7).unwrap();
    assert_eq!(m.received, 2);
    assert_eq!(m.generated, 2);
    assert_eq!(m.lifetime_epochs, 2);
    assert_eq!(m.death_epochs, vec![Some(2)]);
    assert_eq!(m.final_energy, vec![0]);
}

#[test]
fn empty_battery_runs_no_epochs() {
    let s = build_line_scenario(3, EnergyParams::default(), 0).unwrap();
    for st in [Strategy::NonSelective, Strategy::LocalThreshold, Strategy::gct()] {
        let m = simulate(&s, &st, 1).unwrap();
        assert_eq!(m.generated, 0);
        assert_eq!(m.importance_sum, 0.0);
        assert_eq!(m.lifetime_epochs, 0);
    }
}

#[test]
fn dead_network_never_delivers() {
    let s = build_line_scenario(2, EnergyParams::default(), 0).unwrap();
    let sampler = Sampler::new(&s);
    let policy = Policy::new(&s, &Strategy::NonSelective).unwrap();
    let mut state = SimState::new(&s);
    let mut rng = run_rng(3);
    for _ in 0..100 {
        let rec = run_epoch(&mut state, &s, &sampler, &policy, &mut rng);
        assert!(!rec.delivered);
        assert_eq!(rec.charged, 0);
    }
    assert!(state.terminated(&s));
}

#[test]
fn censor_everything_lifetime() {
    // only the sensing cost is paid: node 1 of a line lives e / (p_1 C0[1][1])
    let s = build_line_scenario(3, EnergyParams::default(), 300).unwrap();
    let m = simulate(&s, &Strategy::FixedThreshold(vec![f64::INFINITY; 3]), 11).unwrap();
    assert_eq!(m.received, 0);
    assert_eq!(m.discarded, m.generated);
    let mean = 300.0 / (1.0 / 3.0);
    assert!((m.death_epochs[2].unwrap() as f64 - mean).abs() < 0.2 * mean, "{:?}", m.death_epochs);
}

#[test]
fn energy_accounting_is_exact() {
    let s = crate::model::build_random_tree_scenario(8, 3, 1, 5, 5..=20, 2_000).unwrap();
    for st in [Strategy::NonSelective, Strategy::LocalThreshold, Strategy::gct()] {
        let m = simulate(&s, &st, 5).unwrap();
        let initial: u64 = s.initial_energy().iter().sum();
        let left: u64 = m.final_energy.iter().sum();
        assert_eq!(initial - left, m.charged, "{st}");
        assert_eq!(m.generated, m.received + m.discarded + m.lost);
    }
}

#[test]
fn reward_matches_delivered_messages() {
    let s = build_line_scenario(4, EnergyParams::default(), 500).unwrap();
    let sampler = Sampler::new(&s);
    let policy = Policy::new(&s, &Strategy::LocalThreshold).unwrap();
    let mut state = SimState::new(&s);
    let mut rng = run_rng(9);
    let mut booked = 0.0;
    let mut charged = 0;
    let mut last = 0.0;
    while !state.terminated(&s) {
        let rec = run_epoch(&mut state, &s, &sampler, &policy, &mut rng);
        if rec.delivered {
            assert!(rec.transmitted);
            booked += rec.importance;
        } else {
            assert_eq!(rec.reward, 0.0);
        }
        charged += rec.charged;
        assert!(state.reward >= last);
        last = state.reward;
    }
    assert_eq!(state.reward, booked);
    assert_eq!(state.charged, charged);
}

#[test]
fn failed_send_charges_up_to_blocking_node() {
    // line 0 -> 1 -> 2 -> sink; node 1 cannot relay
    let s = build_line_scenario(3, EnergyParams::default(), 100)
        .unwrap()
        .with_initial_energy(vec![100, 4, 100])
        .unwrap();
    let sampler = Sampler::new(&s);
    let policy = Policy::new(&s, &Strategy::NonSelective).unwrap();
    let mut rng = run_rng(0);
    loop {
        let mut state = SimState::new(&s);
        let rec = run_epoch(&mut state, &s, &sampler, &policy, &mut rng);
        if rec.source == Some(0) {
            assert!(rec.transmitted && !rec.delivered);
            assert_eq!(state.energy, vec![94, 0, 100]);
            assert_eq!(state.lost, 1);
            break;
        }
    }
}

#[test]
fn same_seed_same_metrics() {
    let s = build_line_scenario(5, EnergyParams::default(), 1_000).unwrap();
    for st in [Strategy::NonSelective, Strategy::gct()] {
        assert_eq!(simulate(&s, &st, 42).unwrap(), simulate(&s, &st, 42).unwrap());
    }
}

#[test]
fn epoch_cap_truncates() {
    let s = build_line_scenario(2, EnergyParams::default(), 1_000).unwrap();
    let cfg = SimConfig { max_epochs: 10, ..Default::default() };
    let (m, _) = simulate_with(&s, &Strategy::NonSelective, 1, &cfg).unwrap();
    assert!(m.truncated);
    assert_eq!(m.lifetime_epochs, 10);
}

#[test]
fn single_replication_has_zero_spread() {
    let s = build_line_scenario(3, EnergyParams::default(), 200).unwrap();
    let sum = run_replications(&s, &Strategy::NonSelective, 1, 5, &SimConfig::default()).unwrap();
    assert_eq!(sum.runs.len(), 1);
    assert_eq!(sum.received.mean, sum.runs[0].received as f64);
    assert_eq!(sum.received.std, 0.0);
    assert_eq!(sum.runs[0].seed, derive_seed(5, 0));
    assert!(run_replications(&s, &Strategy::NonSelective, 0, 5, &SimConfig::default()).is_err());
}

#[test]
fn aggregate_statistics() {
    let a = Aggregate::of(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(a.mean, 2.5);
    assert!((a.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((a.ci_half_width - 1.96 * a.std / 2.0).abs() < 1e-15);
}

#[test]
fn derived_seeds_differ() {
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| derive_seed(1, r)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
}

#[test]
fn runs_csv_layout() {
    let s = build_line_scenario(2, EnergyParams::default(), 50).unwrap();
    let sum = run_replications(&s, &Strategy::NonSelective, 2, 1, &SimConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_runs_csv(&sum.runs, 2, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(
        lines[0],
        "run,seed,strategy,importance_sum,generated,received,discarded,lifetime_epochs,death_epoch_1,death_epoch_2"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,"));
    assert_eq!(lines[1].split(',').count(), 10);
}
