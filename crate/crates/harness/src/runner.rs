//! Runs every (sweep value, seed, algorithm) combination of an experiment.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use capa_core::channels::LinkModel;
use capa_core::cov::CovSolver;
use capa_core::dinkelbach::{run, DinkelbachRun, InnerSolver};
use capa_core::scenario::{generate, Scenario};
use capa_core::spda::{build_array, spda_link_model};
use capa_core::zf::ZfSolver;
use capa_core::Error as CoreError;
use rayon::prelude::*;

use crate::record::{write_rows, Row, Status, HEADER};
use crate::spec::{Algorithm, ExperimentSpec};
use crate::summary::{summarize_rows, write_summary, SummaryRow};
use crate::HarnessError;

pub const TRACE_FILE: &str = "trace.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const META_FILE: &str = "meta.txt";

/// Result of one Dinkelbach run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub sweep_index: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub sweep_value: f64,
    pub status: Status,
    /// `η⁽⁰⁾, η⁽¹⁾, …`
    pub etas: Vec<f64>,
    /// BCD objective trace of each outer iteration.
    pub bcd_objectives: Vec<Vec<f64>>,
    pub message: Option<String>,
    pub summary: Row,
    pub trace: Vec<Row>,
}

impl RunOutcome {
    pub fn energy_efficiency(&self) -> Option<f64> {
        self.summary.ee
    }

    fn key(&self) -> (usize, u64, Algorithm) {
        (self.sweep_index, self.seed, self.algorithm)
    }
}

fn classify(e: &CoreError) -> Status {
    match e {
        CoreError::Infeasible(_) | CoreError::InfeasibleWarmStart(_) => Status::Infeasible,
        CoreError::Conditioning { .. } => Status::IllConditioned,
        _ => Status::Failed,
    }
}

fn link_model(scenario: &Scenario, algorithm: Algorithm) -> capa_core::Result<LinkModel> {
    if algorithm.is_discrete() {
        let array = build_array(scenario.config.aperture, &scenario.config.radio)?;
        spda_link_model(&array, scenario)
    } else {
        scenario.link_model()
    }
}

fn solve<S: InnerSolver>(solver: &S, spec: &ExperimentSpec) -> capa_core::Result<DinkelbachRun<S::Point>> {
    run(solver, &spec.dinkelbach)
}

fn dinkelbach(
    model: &LinkModel,
    algorithm: Algorithm,
    spec: &ExperimentSpec,
) -> capa_core::Result<(Vec<f64>, Vec<capa_core::dinkelbach::OuterStep>, bool)> {
    match algorithm {
        Algorithm::Cov | Algorithm::SpdaCov => {
            let s = CovSolver {
                model,
                options: spec.cov,
            };
            let r = solve(&s, spec)?;
            Ok((r.etas, r.steps, r.converged))
        }
        Algorithm::Zf | Algorithm::SpdaZf => {
            let s = ZfSolver::new(model, spec.zf)?;
            let r = solve(&s, spec)?;
            Ok((r.etas, r.steps, r.converged))
        }
    }
}

/// Runs one algorithm on one realization.
pub fn run_single(
    spec: &ExperimentSpec,
    sweep_index: usize,
    seed: u64,
    algorithm: Algorithm,
) -> Result<RunOutcome, HarnessError> {
    let sweep_value = spec.sweep[sweep_index];
    let mut config = spec.experiment.apply(&spec.base, sweep_value)?;
    config.rng_seed = seed;
    let start = Instant::now();
    let result = generate(&config)
        .and_then(|s| link_model(&s, algorithm))
        .and_then(|m| dinkelbach(&m, algorithm, spec));
    let wall = spec.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let base = Row {
        experiment: spec.experiment.id().to_string(),
        algorithm: algorithm.id().to_string(),
        seed,
        sweep_value,
        outer_iter: 0,
        inner_iter: 0,
        eta: None,
        objective: None,
        group_rates: Vec::new(),
        power: None,
        ee: None,
        wall_ms: wall,
        status: Status::Ok,
    };
    let mut out = RunOutcome {
        sweep_index,
        algorithm,
        seed,
        sweep_value,
        status: Status::Ok,
        etas: Vec::new(),
        bcd_objectives: Vec::new(),
        message: None,
        summary: base.clone(),
        trace: Vec::new(),
    };
    let (etas, steps, converged) = match result {
        Ok(v) => v,
        Err(e) => {
            log::warn!(
                "{} {} seed {} at {}: {}",
                spec.experiment,
                algorithm,
                seed,
                sweep_value,
                e
            );
            out.status = classify(&e);
            out.summary.status = out.status;
            out.message = Some(e.to_string());
            return Ok(out);
        }
    };
    let status = if converged { Status::Ok } else { Status::NotConverged };
    for (l, step) in steps.iter().enumerate() {
        for (j, rec) in step.bcd.iter().enumerate() {
            let rates: Vec<f64> = rec.r.iter().map(|r| (1.0 + r).log2()).collect();
            let sum: f64 = rates.iter().sum();
            out.trace.push(Row {
                outer_iter: l + 1,
                inner_iter: j,
                eta: Some(step.eta),
                objective: Some(rec.objective),
                power: Some(rec.power),
                ee: Some(sum / rec.power),
                group_rates: rates,
                wall_ms: None,
                status,
                ..base.clone()
            });
        }
    }
    // not-converged runs report the best iterate, which is what `etas`' max
    // corresponds to
    let best = if converged {
        steps.len() - 1
    } else {
        (0..steps.len())
            .max_by(|a, b| steps[*a].energy_efficiency().total_cmp(&steps[*b].energy_efficiency()))
            .unwrap_or(0)
    };
    let last = &steps[best];
    out.summary = Row {
        outer_iter: steps.len(),
        inner_iter: steps.iter().map(|s| s.bcd.len()).sum(),
        eta: etas.last().copied(),
        objective: Some(last.objective),
        group_rates: last.group_rates.clone(),
        power: Some(last.power),
        ee: Some(last.energy_efficiency()),
        status,
        ..base
    };
    out.status = status;
    out.bcd_objectives = steps
        .iter()
        .map(|s| s.bcd.iter().map(|r| r.objective).collect())
        .collect();
    out.etas = etas;
    Ok(out)
}

pub struct ExperimentOutput {
    pub runs: Vec<RunOutcome>,
    pub summary: Vec<SummaryRow>,
    pub dir: PathBuf,
}

fn append(path: &Path) -> Result<csv::Writer<BufWriter<File>>, HarnessError> {
    let f = File::create(path)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(f));
    w.write_record(HEADER)?;
    w.flush()?;
    Ok(w)
}

fn write_meta(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    let mut f = File::create(spec.output_dir.join(META_FILE))?;
    writeln!(f, "experiment = {}", spec.experiment)?;
    writeln!(
        f,
        "sweep = {}",
        spec.sweep.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    )?;
    writeln!(f, "realizations = {}", spec.num_realizations)?;
    writeln!(f, "first_seed = {}", spec.base.rng_seed)?;
    writeln!(
        f,
        "algorithms = {}",
        spec.algorithms.iter().map(|a| a.id()).collect::<Vec<_>>().join(" ")
    )?;
    writeln!(f, "grid_order = {}", spec.base.grid_order)?;
    writeln!(f, "tol = {:e}", spec.dinkelbach.tol)?;
    writeln!(
        f,
        "# means use {} realizations per point; raise with --realizations for tighter means",
        spec.num_realizations
    )?;
    Ok(())
}

/// Runs the whole experiment in a worker pool. Rows are appended and
/// flushed as runs finish; the final files are rewritten in
/// (sweep, seed, algorithm) order so repeated runs give identical output.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    fs::create_dir_all(&spec.output_dir)?;
    write_meta(spec)?;
    let tasks: Vec<(usize, u64, Algorithm)> = (0..spec.sweep.len())
        .flat_map(|i| {
            spec.seeds()
                .flat_map(move |s| spec.algorithms.iter().map(move |a| (i, s, *a)))
        })
        .collect();
    let trace_path = spec.output_dir.join(TRACE_FILE);
    let runs_path = spec.output_dir.join(RUNS_FILE);
    let mut trace_w = append(&trace_path)?;
    let mut runs_w = append(&runs_path)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = spec.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| HarnessError::Spec(e.to_string()))?
    };
    let (tx, rx) = mpsc::channel::<Result<RunOutcome, HarnessError>>();
    let mut runs = Vec::with_capacity(tasks.len());
    let mut first_err = None;
    std::thread::scope(|scope| -> Result<(), HarnessError> {
        scope.spawn(move || {
            pool.install(|| {
                tasks.par_iter().for_each_with(tx, |tx, &(i, s, a)| {
                    let _ = tx.send(run_single(spec, i, s, a));
                })
            })
        });
        for msg in rx {
            match msg {
                Ok(o) => {
                    for r in &o.trace {
                        trace_w.write_record(r.fields())?;
                    }
                    runs_w.write_record(o.summary.fields())?;
                    trace_w.flush()?;
                    runs_w.flush()?;
                    log::info!(
                        "{} {} seed {} at {}: {}",
                        spec.experiment,
                        o.algorithm,
                        o.seed,
                        o.sweep_value,
                        o.status.label()
                    );
                    runs.push(o);
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Ok(())
    })?;
    if let Some(e) = first_err {
        return Err(e);
    }
    drop((trace_w, runs_w));
    runs.sort_by_key(|o| o.key());
    let trace: Vec<Row> = runs.iter().flat_map(|o| o.trace.iter().cloned()).collect();
    let table: Vec<Row> = runs.iter().map(|o| o.summary.clone()).collect();
    write_rows(BufWriter::new(File::create(&trace_path)?), &trace)?;
    write_rows(BufWriter::new(File::create(&runs_path)?), &table)?;
    let summary = summarize_rows(&table);
    write_summary(&spec.output_dir.join(SUMMARY_FILE), &summary)?;
    Ok(ExperimentOutput {
        runs,
        summary,
        dir: spec.output_dir.clone(),
    })
}
