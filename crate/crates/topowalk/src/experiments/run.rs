use crate::entangle::{
    bell_state, edge_projection, entanglement_entropy, evolve_two_photon, polarization_flip_rate, register_read,
    register_windings, register_write, EdgeCalibration, Partition, PolarizationQubit, EDGE_LABELS,
};
use crate::experiments::config::*;
use crate::experiments::ExperimentError;
use crate::sshmodel::{graph_winding, run_transmission, winding_number, BlochModel, TransmissionSetup};
use crate::walkgraph::{
    boundary_peak_mass, build_chain, crossing_mass, spread_slope, sqrt_spread_fit, ChainSpec, ClassicalWalk,
    Distribution, Evolver, LatticeGraph, PerturbationSchedule, Polarization, Region, Side, WalkState,
};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Norm drift tolerated before a run is declared broken.
pub const NORM_TOL: f64 = 1e-10;
/// Probability allowed in the two outermost cells of an open chain.
pub const END_MASS_TOL: f64 = 1e-12;
/// Cells at each end watched by the end-of-chain check.
const END_CELLS: usize = 2;

/// Rows of a CSV table, already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Value,
    pub history: Option<Vec<Distribution>>,
    pub sweep: Option<Table>,
}

impl RunReport {
    fn new(summary: Value) -> Self {
        RunReport { summary, history: None, sweep: None }
    }
}

/// `step,cell,subsite,probability`, skipping entries at or below 1e-15.
pub fn distribution_csv(history: &[Distribution]) -> String {
    let mut s = String::from("step,cell,subsite,probability\n");
    for d in history {
        for (site, &p) in d.probs.iter().enumerate() {
            if p > 1e-15 {
                let sub = if site % 2 == 0 { "A" } else { "B" };
                let _ = writeln!(s, "{},{},{},{}", d.step, site / 2, sub, p);
            }
        }
    }
    s
}

/// Write whichever of `distribution.csv`, `summary.json`, `sweep.csv` the
/// report carries.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    if let Some(h) = &report.history {
        fs::write(dir.join("distribution.csv"), distribution_csv(h))?;
    }
    let mut summary = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    summary.push('\n');
    fs::write(dir.join("summary.json"), summary)?;
    if let Some(t) = &report.sweep {
        fs::write(dir.join("sweep.csv"), t.to_csv())?;
    }
    Ok(())
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    let mut report = match &cfg.experiment {
        Experiment::Walk(c) => run_walk(c)?,
        Experiment::Boundary(c) => run_boundary(c)?,
        Experiment::Perturb(c) => run_perturb(c)?,
        Experiment::WindingSweep(c) => run_winding_sweep(c)?,
        Experiment::Transmission(c) => run_transmission_sweep(c)?,
        Experiment::Register(c) => run_register(c)?,
        Experiment::EntangleBulk(c) => run_entangle_bulk(c)?,
        Experiment::EntangleEdge(c) => run_entangle_edge(c)?,
    };
    if let Value::Object(m) = &mut report.summary {
        m.insert("name".into(), json!(cfg.name));
        m.insert("kind".into(), json!(cfg.experiment.kind()));
    }
    Ok(report)
}

/// Norm and chain-end checks over a whole history.
fn check_history(history: &[Distribution], periodic: bool) -> Result<(), ExperimentError> {
    for d in history {
        let drift = (d.total() - 1.0).abs();
        if drift > NORM_TOL {
            return Err(ExperimentError::Invariant(format!("norm drift {drift:e} at step {}", d.step)));
        }
        if !periodic {
            let e = d.end_mass(END_CELLS);
            if e > END_MASS_TOL {
                return Err(ExperimentError::Invariant(format!(
                    "wavefront reached chain end at step {} (end mass {e:e})",
                    d.step
                )));
            }
        }
    }
    Ok(())
}

fn simulate(
    graph: &LatticeGraph,
    inj: &crate::walkgraph::Injection,
    steps: usize,
    schedule: Option<&PerturbationSchedule>,
) -> Result<(WalkState, Vec<Distribution>), ExperimentError> {
    let st = crate::walkgraph::inject_with(graph, inj)?;
    let (st, hist) = crate::walkgraph::evolve(&st, graph, steps, schedule)?;
    check_history(&hist, graph.spec().periodic)?;
    Ok((st, hist))
}

fn windings_json(spec: &ChainSpec) -> Value {
    let Ok(u) = crate::multiport::build_threeport(spec.threeport_theta) else {
        return Value::Null;
    };
    let regions: Vec<Value> = spec
        .regions
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            for pol in Polarization::BOTH {
                let (a, b) = r.phases.seen_by(pol);
                let v = match graph_winding(&u, a, b, crate::sshmodel::DEFAULT_NK) {
                    Ok(w) => json!({"nu": w.nu, "gap": w.gap}),
                    Err(e) => json!({"error": e.to_string()}),
                };
                m.insert(format!("{pol:?}"), v);
            }
            Value::Object(m)
        })
        .collect();
    Value::Array(regions)
}

fn run_walk(c: &WalkConfig) -> Result<RunReport, ExperimentError> {
    let graph = build_chain(&c.chain)?;
    let (_, hist) = simulate(&graph, &c.injection, c.steps, None)?;
    let fit = spread_slope(&hist[c.fit_from..])?;
    let mut summary = json!({
        "spec": c.chain,
        "steps": c.steps,
        "spread_slope": fit.slope,
        "r2": fit.r2,
        "crossing_mass": null,
        "boundary_peak_mass_final": null,
        "fit_from": c.fit_from,
        "final_std_dev": hist[c.steps].std_dev(),
        "windings": windings_json(&c.chain),
    });
    if c.classical_oracle {
        let op = crate::walkgraph::step_operator(&graph, c.injection.polarization);
        let start = crate::walkgraph::inject_with(&graph, &c.injection)?;
        let p0: Vec<f64> = start.amplitudes(c.injection.polarization).iter().map(|z| z.norm_sqr()).collect();
        let ch = ClassicalWalk::new(&op).history(&graph, p0, c.steps);
        let lin = spread_slope(&ch[c.fit_from..])?;
        let sq = sqrt_spread_fit(&ch[c.fit_from..])?;
        summary["classical"] = json!({"linear_r2": lin.r2, "sqrt_r2": sq.r2, "sqrt_slope": sq.slope});
    }
    let mut r = RunReport::new(summary);
    r.history = Some(hist);
    Ok(r)
}

fn boundary_observables(hist: &[Distribution], boundary: usize, window: usize) -> Result<Value, ExperimentError> {
    let last = hist.last().expect("history has the initial entry");
    let peak = boundary_peak_mass(hist, boundary, window)?;
    let tail = &peak[peak.len().saturating_sub(51)..];
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "boundary": boundary,
        "window": window,
        "crossing_mass": {
            "right": crossing_mass(last, boundary, Side::Right)?,
            "left": crossing_mass(last, boundary, Side::Left)?,
        },
        "boundary_peak_mass_final": peak[peak.len() - 1],
        "boundary_peak_mass_tail_min": tail_min,
        "boundary_peak_mass_tail_max": tail_max,
        "boundary_peak_mass": peak,
    }))
}

fn run_boundary(c: &BoundaryConfig) -> Result<RunReport, ExperimentError> {
    let graph = build_chain(&c.chain)?;
    let b = graph.boundary_positions()[0];
    let (_, hist) = simulate(&graph, &c.injection, c.steps, None)?;
    let obs = boundary_observables(&hist, b, c.window)?;
    let mut summary = json!({
        "spec": c.chain,
        "steps": c.steps,
        "spread_slope": null,
        "r2": null,
        "crossing_mass": obs["crossing_mass"],
        "boundary_peak_mass_final": obs["boundary_peak_mass_final"],
        "boundary": obs,
        "windings": windings_json(&c.chain),
    });
    if c.compare_uniform {
        let left = c.chain.regions[0].phases;
        let uni = c.chain.with_region_phases(&vec![left; c.chain.regions.len()])?;
        let g = build_chain(&uni)?;
        let (_, h) = simulate(&g, &c.injection, c.steps, None)?;
        summary["uniform_reference"] = boundary_observables(&h, b, c.window)?;
    }
    let mut r = RunReport::new(summary);
    r.history = Some(hist);
    Ok(r)
}

fn run_perturb(c: &PerturbConfig) -> Result<RunReport, ExperimentError> {
    let graph = build_chain(&c.chain)?;
    let b = graph.boundary_positions()[0];
    let schedule = match (&c.jolt, &c.schedule) {
        (Some(j), _) => PerturbationSchedule::jolt(&graph, j.step, j.target_region, j.source_region),
        (None, Some(s)) => s.clone(),
        (None, None) => unreachable!("validated"),
    };
    let (_, hist) = simulate(&graph, &c.injection, c.steps, Some(&schedule))?;
    let (_, clean) = simulate(&graph, &c.injection, c.steps, None)?;
    let pert = boundary_observables(&hist, b, c.window)?;
    let base = boundary_observables(&clean, b, c.window)?;
    let ratio = |side: &str| {
        let p = pert["crossing_mass"][side].as_f64().unwrap_or(f64::NAN);
        let q = base["crossing_mass"][side].as_f64().unwrap_or(f64::NAN);
        if q > 0.0 {
            json!(p / q)
        } else {
            Value::Null
        }
    };
    let summary = json!({
        "spec": c.chain,
        "steps": c.steps,
        "spread_slope": null,
        "r2": null,
        "schedule": schedule,
        "crossing_mass": pert["crossing_mass"],
        "boundary_peak_mass_final": pert["boundary_peak_mass_final"],
        "perturbed": pert,
        "unperturbed": base,
        "crossing_ratio": {"right": ratio("right"), "left": ratio("left")},
        "windings": windings_json(&c.chain),
    });
    let mut r = RunReport::new(summary);
    r.history = Some(hist);
    Ok(r)
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

fn run_winding_sweep(c: &WindingSweepConfig) -> Result<RunReport, ExperimentError> {
    let points = c.grid.points();
    if let SweepGrid::Hopping { .. } = c.grid {
        let rows: Vec<Vec<String>> = points
            .par_iter()
            .enumerate()
            .map(|(i, &[v, w])| {
                let (nu, gap, err) = match BlochModel::new(v, w).and_then(|m| winding_number(&m, c.n_k)) {
                    Ok(r) => (r.nu.to_string(), fmt_f(r.gap), String::new()),
                    Err(e) => (String::new(), String::new(), e.to_string()),
                };
                vec![i.to_string(), fmt_f(v), fmt_f(w), nu, gap, err]
            })
            .collect();
        let table = Table { header: vec!["index", "v", "w", "nu", "gap", "error"], rows };
        let mut r = RunReport::new(json!({"points": points.len(), "n_k": c.n_k}));
        r.sweep = Some(table);
        return Ok(r);
    }
    let u = crate::multiport::build_threeport(c.threeport_theta)?;
    let left_nu = c.boundary_run.as_ref().map(|r| {
        let (a, b) = r.left.seen_by(r.injection.polarization);
        graph_winding(&u, a, b, c.n_k).map(|w| w.nu)
    });
    let rows: Vec<Result<Vec<String>, ExperimentError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &[pa, pb])| {
            let (nu, gap, err) = match graph_winding(&u, pa, pb, c.n_k) {
                Ok(w) => (w.nu.to_string(), fmt_f(w.gap), String::new()),
                Err(e) => (String::new(), String::new(), e.to_string()),
            };
            let mut row = vec![i.to_string(), fmt_f(pa), fmt_f(pb), format!("{:?}", c.polarization), nu, gap];
            if let Some(r) = &c.boundary_run {
                let right = crate::walkgraph::RegionPhases::uniform(pa, pb);
                let spec = ChainSpec::two_region(r.left, right, r.boundary, r.cells, c.threeport_theta)?;
                let g = build_chain(&spec)?;
                let (_, hist) = simulate(&g, &r.injection, r.steps, None)?;
                let peak = boundary_peak_mass(&hist, r.boundary, r.window)?;
                let lnu = match &left_nu {
                    Some(Ok(n)) => n.to_string(),
                    _ => String::new(),
                };
                row.push(lnu);
                row.push(fmt_f(peak[peak.len() - 1]));
            }
            row.push(err);
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["index", "phi_a", "phi_b", "pol", "nu", "min_gap"];
    if c.boundary_run.is_some() {
        header.extend(["nu_left", "boundary_peak_mass"]);
    }
    header.push("error");
    let mut summary = json!({"points": points.len(), "n_k": c.n_k, "threeport_theta": c.threeport_theta});
    if let Some(r) = &c.boundary_run {
        summary["boundary_run"] = serde_json::to_value(r).expect("serializes");
    }
    let mut r = RunReport::new(summary);
    r.sweep = Some(Table { header, rows });
    Ok(r)
}

fn run_transmission_sweep(c: &TransmissionConfig) -> Result<RunReport, ExperimentError> {
    let rows: Vec<Result<Vec<String>, ExperimentError>> = c
        .contrasts
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let m = BlochModel::from_contrast(c.hopping_sum, x)?;
            let setup = TransmissionSetup { k0: c.k0, sigma_k: c.sigma_k, time: c.time, ..TransmissionSetup::new(m.v, m.w) };
            let r = run_transmission(&setup).map_err(|e| match e {
                crate::sshmodel::SshError::Sizing { .. } => ExperimentError::Invariant(e.to_string()),
                other => other.into(),
            })?;
            Ok(vec![
                i.to_string(),
                fmt_f(x),
                fmt_f(m.v),
                fmt_f(m.w),
                fmt_f(r.transmission),
                fmt_f(r.reflection),
                fmt_f(r.time),
                r.cells.to_string(),
            ])
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap_or(f64::NAN)).collect();
    let summary = json!({
        "points": rows.len(),
        "hopping_sum": c.hopping_sum,
        "k0": c.k0,
        "sigma_k": c.sigma_k,
        "transmission": ts,
    });
    let mut r = RunReport::new(summary);
    r.sweep = Some(Table {
        header: vec!["index", "contrast", "v", "w", "transmission", "reflection", "time", "cells"],
        rows,
    });
    Ok(r)
}

/// `n` qubits spread evenly over the Bloch sphere (Fibonacci lattice).
pub fn bloch_sphere_qubits(n: usize) -> Vec<PolarizationQubit> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let half = 0.5 * z.clamp(-1.0, 1.0).acos();
            let phi = golden * i as f64;
            PolarizationQubit { alpha: C64::new(half.cos(), 0.0), beta: C64::from_polar(half.sin(), phi) }
        })
        .collect()
}

fn run_register(c: &RegisterConfig) -> Result<RunReport, ExperimentError> {
    let ring = build_chain(&c.ring)?;
    let wind = register_windings(&ring)?;
    let qubits = c.qubits.clone().unwrap_or_else(|| bloch_sphere_qubits(c.qubit_count));
    let ev = Evolver::new(&ring);
    let errors: Vec<Result<(f64, f64, f64), ExperimentError>> = qubits
        .par_iter()
        .map(|q| {
            let q = PolarizationQubit::normalized(q.alpha, q.beta)?;
            let mut st = register_write(&q, &ring)?;
            ev.run(&mut st, c.storage_steps);
            let drift = (st.norm_sqr() - 1.0).abs();
            if drift > NORM_TOL {
                return Err(ExperimentError::Invariant(format!("norm drift {drift:e} in register")));
            }
            let (ph, pv) = register_read(&st);
            let (eh, ev_) = q.probabilities();
            Ok((ph, pv, (ph - eh).abs().max((pv - ev_).abs())))
        })
        .collect();
    let errors = errors.into_iter().collect::<Result<Vec<_>, _>>()?;
    let worst = errors.iter().map(|e| e.2).fold(0.0, f64::max);
    let rows = qubits
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (q, e))| {
            vec![
                i.to_string(),
                fmt_f(q.alpha.re),
                fmt_f(q.alpha.im),
                fmt_f(q.beta.re),
                fmt_f(q.beta.im),
                fmt_f(e.0),
                fmt_f(e.1),
                fmt_f(e.2),
            ]
        })
        .collect();
    let mut summary = json!({
        "spec": c.ring,
        "storage_steps": c.storage_steps,
        "qubits": qubits.len(),
        "windings": {"H": wind.h, "V": wind.v},
        "readout_error_max": worst,
        "register_fidelity": 1.0 - worst,
        "flip_rate": null,
    });
    if let Some(m) = &c.mixing {
        let q = PolarizationQubit::normalized(m.qubit.alpha, m.qubit.beta)?;
        let prot = polarization_flip_rate(&ring, &q, &m.channel(), m.steps)?;
        summary["flip_rate"] = json!(prot.flip_rate);
        summary["mixing"] = json!({"mix_strength": m.mix_strength, "steps": m.steps, "protected": prot});
        if let Some(t) = &c.trivial_ring {
            let tg = build_chain(t)?;
            let triv = polarization_flip_rate(&tg, &q, &m.channel(), m.steps)?;
            summary["mixing"]["trivial"] = json!(triv);
            summary["mixing"]["suppression"] =
                if prot.flip_rate > 0.0 { json!(triv.flip_rate / prot.flip_rate) } else { Value::Null };
        }
    }
    let mut r = RunReport::new(summary);
    r.sweep = Some(Table {
        header: vec!["index", "alpha_re", "alpha_im", "beta_re", "beta_im", "p_h", "p_v", "error"],
        rows,
    });
    Ok(r)
}

fn run_entangle_bulk(c: &EntangleBulkConfig) -> Result<RunReport, ExperimentError> {
    let (gu, gl) = (build_chain(&c.upper)?, build_chain(&c.lower)?);
    let s0 = bell_state(c.sign, &gu, &gl, &c.injection)?;
    let s1 = evolve_two_photon(&s0, &Evolver::new(&gu), &Evolver::new(&gl), c.steps);
    let drift = (s1.norm_sqr() - 1.0).abs();
    if drift > NORM_TOL {
        return Err(ExperimentError::Invariant(format!("two-photon norm drift {drift:e}")));
    }
    for t in &s1.terms {
        let hu = crate::walkgraph::position_distribution(&t.upper, &gu);
        let hl = crate::walkgraph::position_distribution(&t.lower, &gl);
        check_history(&[hu, hl], gu.spec().periodic && gl.spec().periodic)?;
    }
    let summary = json!({
        "steps": c.steps,
        "sign": c.sign,
        "entropy_bits_initial": entanglement_entropy(&s0, Partition::Upper)?,
        "entropy_bits": entanglement_entropy(&s1, Partition::Upper)?,
        "polarization_table": s1.polarization_table(),
        "terms": s1.terms.len(),
        "windings": {"upper": windings_json(&c.upper), "lower": windings_json(&c.lower)},
    });
    Ok(RunReport::new(summary))
}

fn run_entangle_edge(c: &EntangleEdgeConfig) -> Result<RunReport, ExperimentError> {
    let (gu, gl) = (build_chain(&c.upper)?, build_chain(&c.lower)?);
    let b = gu.boundary_positions()[0];
    let cal = EdgeCalibration::new(&gu, &gl, &c.injection, c.steps, b, c.window)?;
    let s0 = bell_state(c.sign, &gu, &gl, &c.injection)?;
    let s1 = evolve_two_photon(&s0, &Evolver::new(&gu), &Evolver::new(&gl), c.steps);
    let p = edge_projection(&s1, &cal)?;
    let amps: Vec<Value> = p
        .amplitudes
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, a)| {
                json!({"upper": EDGE_LABELS[i], "lower": EDGE_LABELS[j], "re": a.re, "im": a.im})
            })
        })
        .collect();
    let summary = json!({
        "steps": c.steps,
        "boundary": b,
        "window": c.window,
        "sign": c.sign,
        "entropy_bits": entanglement_entropy(&s1, Partition::Upper)?,
        "edge_entropy_bits": p.entropy_bits(),
        "edge_amplitudes": amps,
        "edge_probabilities": {"labels": ["e", "0"], "table": p.collapsed()},
        "residual": p.residual,
        "calibration_window_mass": {"upper": cal.upper.window_mass, "lower": cal.lower.window_mass},
        "edge_polarizations": {
            "upper": Polarization::BOTH.iter().filter(|&&q| cal.upper.has_edge(q)).map(|q| format!("{q:?}")).collect::<Vec<_>>(),
            "lower": Polarization::BOTH.iter().filter(|&&q| cal.lower.has_edge(q)).map(|q| format!("{q:?}")).collect::<Vec<_>>(),
        },
    });
    Ok(RunReport::new(summary))
}

/// Chain with one region of `cells` cells, handy for presets and tests.
pub fn single_region(phases: crate::walkgraph::RegionPhases, cells: usize, theta: f64, periodic: bool) -> ChainSpec {
    ChainSpec { regions: vec![Region { phases, cells }], threeport_theta: theta, periodic }
}
