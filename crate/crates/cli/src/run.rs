//! Executes an [`ExperimentSpec`] and writes its files.

use std::io::Write;

use coopcensor::asymptotic::{self, polar_sweep, write_sweep_csv, write_thresholds_csv, AsymptoticConfig};
use coopcensor::exact::{solve_exact, ExactConfig};
use coopcensor::sim::{
    run_replications, run_topologies, write_runs_csv, Aggregate, ReplicationSummary, SimConfig, Strategy,
    DEFAULT_MAX_EPOCHS,
};
use coopcensor::{Error, Result, Scenario};

use crate::scenario::Source;
use crate::spec::{ExperimentSpec, Output, Sweep, Task};

/// Run the spec; returns human-readable summary lines.
pub fn execute(spec: &ExperimentSpec) -> Result<Vec<String>> {
    let source = Source::parse(&spec.scenario)?;
    let mut out = Output::new(spec)?;
    let lines = match spec.task {
        Task::SolveExact => solve_exact_task(spec, &source, &mut out)?,
        Task::SolveAsymptotic => solve_asymptotic_task(spec, &source, &mut out)?,
        Task::Simulate | Task::Sweep => match &spec.sweep {
            Some(Sweep::Phi { radius, steps }) => lifetime_sweep_task(&source, *radius, *steps, &mut out)?,
            _ => simulate_task(spec, &source, &mut out)?,
        },
    };
    out.finish(spec)?;
    Ok(lines)
}

fn solve_exact_task(spec: &ExperimentSpec, source: &Source, out: &mut Output) -> Result<Vec<String>> {
    let s = source.build()?;
    let n = s.node_count();
    let caps = match &spec.emax {
        Some(v) if v.len() == 1 => vec![v[0]; n],
        Some(v) if v.len() == n => v.clone(),
        Some(v) => {
            return Err(Error::InvalidParameter(format!("--emax has {} values for {n} nodes", v.len())));
        }
        None if s.initial_energy().iter().any(|&e| e > 0) => s.initial_energy().to_vec(),
        None => return Err(Error::InvalidParameter("scenario has no battery; pass --emax".into())),
    };
    let mut config = ExactConfig::default();
    if let Some(b) = spec.budget {
        config.cell_budget = b as u128;
    }
    let sol = solve_exact(&s, &caps, &config)?;
    let mut w = out.csv("lambda.csv")?;
    sol.write_lambda_csv(&mut w)?;
    w.flush()?;
    let mut w = out.csv("mu.csv")?;
    sol.write_mu_csv(&mut w)?;
    w.flush()?;
    let mu: Vec<String> = (0..n).map(|j| format!("{:.6}", sol.mu(&caps, j))).collect();
    Ok(vec![
        format!("lattice {} cells, caps {caps:?}", sol.lattice().len()),
        format!("lambda(e_max) = {:.6}", sol.lambda(&caps)),
        format!("mu(e_max) = [{}]", mu.join(", ")),
    ])
}

fn solve_asymptotic_task(spec: &ExperimentSpec, source: &Source, out: &mut Output) -> Result<Vec<String>> {
    let s = source.build()?;
    let energy = match &spec.energy {
        Some(e) => e.clone(),
        None => s.initial_energy().iter().map(|&v| v as f64).collect(),
    };
    let sol = asymptotic::solve(&s, &energy, &AsymptoticConfig::default())?;
    let mut w = out.csv("thresholds.csv")?;
    write_thresholds_csv(&sol, &mut w)?;
    w.flush()?;
    let mut w = out.csv("trace.csv")?;
    write!(w, "iteration,critical,lifetime")?;
    for j in 1..=s.node_count() {
        write!(w, ",mu_{j}")?;
    }
    writeln!(w)?;
    for (k, r) in sol.trace.iter().enumerate() {
        write!(w, "{},{},{}", k + 1, r.critical + 1, r.lifetime)?;
        for m in &r.thresholds {
            write!(w, ",{m}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    let mut lines = vec![format!(
        "critical node {} (lifetime {:.3}), {} iterations{}",
        sol.partition.critical + 1,
        sol.partition.lifetime,
        sol.iterations,
        if sol.oscillated { ", oscillating" } else { "" }
    )];
    if sol.below_validity_floor {
        lines.push("warning: some energies are below the validity floor".into());
    }
    Ok(lines)
}

fn lifetime_sweep_task(source: &Source, radius: f64, steps: usize, out: &mut Output) -> Result<Vec<String>> {
    let s = source.build()?;
    let points = polar_sweep(&s, radius, steps, &AsymptoticConfig::default())?;
    let mut w = out.csv("sweep.csv")?;
    write_sweep_csv(&points, &mut w)?;
    w.flush()?;
    let crossing = points
        .windows(2)
        .find(|w| (w[0].lifetimes[0] - w[0].lifetimes[1]).signum() != (w[1].lifetimes[0] - w[1].lifetimes[1]).signum());
    let mut lines = vec![format!("{} directions at radius {radius}", points.len())];
    if let Some(w) = crossing {
        lines.push(format!("T_1 = T_2 between phi {:.5} and {:.5}", w[0].phi, w[1].phi));
    }
    Ok(lines)
}

/// One sweep point: its position, axis value and scenario source.
struct Point {
    value: String,
    source: Source,
}

fn points(spec: &ExperimentSpec, source: &Source) -> Result<Vec<Point>> {
    let point = |value: String, key: &str, v: u64| -> Result<Point> {
        Ok(Point { value, source: source.with(key, v)? })
    };
    match &spec.sweep {
        None => Ok(vec![Point { value: String::new(), source: source.clone() }]),
        Some(Sweep::Size { values }) => values.iter().map(|&v| point(v.to_string(), "n", v)).collect(),
        Some(Sweep::Et { values }) => values.iter().map(|&v| point(v.to_string(), "et", v)).collect(),
        Some(Sweep::Ratio { values }) => {
            let er = source.param("er", 5)?;
            values
                .iter()
                .map(|&r| {
                    let et = r * er as f64;
                    if !(et >= 0.0) || (et - et.round()).abs() > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "ratio {r} with E_R = {er} gives a non-integer E_T"
                        )));
                    }
                    point(r.to_string(), "et", et.round() as u64)
                })
                .collect()
        }
        Some(Sweep::Phi { .. }) => unreachable!("handled by the lifetime sweep"),
    }
}

fn simulate_task(spec: &ExperimentSpec, source: &Source, out: &mut Output) -> Result<Vec<String>> {
    let strategies = spec
        .strategies
        .iter()
        .map(|s| s.parse::<Strategy>())
        .collect::<Result<Vec<_>>>()?;
    if strategies.is_empty() {
        return Err(Error::InvalidParameter("no strategies given".into()));
    }
    if spec.topologies.is_some() && !source.is_builder("tree") {
        return Err(Error::InvalidParameter("--topologies needs a tree builder scenario".into()));
    }
    let config = SimConfig {
        max_epochs: spec.max_epochs.unwrap_or(DEFAULT_MAX_EPOCHS),
        ..Default::default()
    };
    let axis = spec.sweep.as_ref().map_or("none", Sweep::name);

    let mut results: Vec<(usize, &Point, ReplicationSummary)> = Vec::new();
    let pts = points(spec, source)?;
    for (k, p) in pts.iter().enumerate() {
        let single = match spec.topologies {
            None => Some(p.source.build()?),
            Some(_) => None,
        };
        for st in &strategies {
            let summary = match (&single, spec.topologies) {
                (Some(s), _) => run_replications(s, st, spec.n_runs, spec.base_seed, &config)?,
                (None, Some(n)) => {
                    let build = |seed: u64| -> Result<Scenario> { p.source.with("seed", seed)?.build() };
                    run_topologies(build, st, n, spec.base_seed, &config)?
                }
                (None, None) => unreachable!(),
            };
            results.push((k, p, summary));
        }
    }

    let mut agg = out.csv("aggregate.csv")?;
    write!(agg, "point,axis,value,strategy,runs")?;
    for m in METRICS {
        write!(agg, ",{m}_mean,{m}_std,{m}_ci")?;
    }
    writeln!(agg)?;
    let mut raw = out.csv("runs.csv")?;
    writeln!(
        raw,
        "point,axis,value,strategy,run,seed,importance_sum,generated,received,discarded,lost,lifetime_epochs,truncated"
    )?;
    let mut lines = Vec::new();
    for (k, p, sum) in &results {
        write!(agg, "{k},{axis},{},{},{}", p.value, sum.strategy, sum.runs.len())?;
        for a in aggregates(sum) {
            write!(agg, ",{},{},{}", a.mean, a.std, a.ci_half_width)?;
        }
        writeln!(agg)?;
        for (r, m) in sum.runs.iter().enumerate() {
            writeln!(
                raw,
                "{k},{axis},{},{},{r},{},{},{},{},{},{},{},{}",
                p.value,
                m.strategy,
                m.seed,
                m.importance_sum,
                m.generated,
                m.received,
                m.discarded,
                m.lost,
                m.lifetime_epochs,
                m.truncated
            )?;
        }
        let at = if p.value.is_empty() { String::new() } else { format!("{axis}={} ", p.value) };
        lines.push(format!(
            "{at}{}: importance sum {:.2} ± {:.2}, received {:.2}, lifetime {:.1} epochs",
            sum.strategy,
            sum.importance_sum.mean,
            sum.importance_sum.ci_half_width,
            sum.received.mean,
            sum.lifetime_epochs.mean
        ));
    }
    agg.flush()?;
    raw.flush()?;

    // per-node death epochs only make sense for a single fixed network
    if spec.sweep.is_none() && spec.topologies.is_none() {
        let n = results[0].1.source.build()?.node_count();
        for (i, (_, _, sum)) in results.iter().enumerate() {
            let mut w = out.csv(&format!("deaths_{}_{}.csv", i + 1, sum.strategy))?;
            write_runs_csv(&sum.runs, n, &mut w)?;
            w.flush()?;
        }
    }
    Ok(lines)
}

const METRICS: [&str; 6] = ["importance_sum", "received", "generated", "discarded", "lost", "lifetime_epochs"];

fn aggregates(s: &ReplicationSummary) -> [Aggregate; 6] {
    [s.importance_sum, s.received, s.generated, s.discarded, s.lost, s.lifetime_epochs]
}
