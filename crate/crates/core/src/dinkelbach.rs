//! Dinkelbach's outer loop for `max R / P`: repeatedly solve
//! `max R − ηP` and set `η ← R/P` at the solution.

use crate::beamform::BeamCoefficients;
use crate::error::{Error, Result};

/// One block-coordinate iteration of an inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct BcdRecord {
    /// `Σ_g log2(1 + r_g) − η P`
    pub objective: f64,
    /// Per-group SINR floor `r_g` (minimum SINR in the group).
    pub r: Vec<f64>,
    pub power: f64,
    /// Ellipsoid iterations or Newton steps spent in this block update.
    pub inner_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct InnerSolution<P> {
    pub point: P,
    /// First entry is the warm start.
    pub trace: Vec<BcdRecord>,
    pub warnings: Vec<String>,
}

/// Solves `max Σ_g R_g − η P` from a feasible warm start.
pub trait InnerSolver {
    type Point: Clone;

    fn initial_point(&self) -> Result<Self::Point>;
    fn solve(&self, eta: f64, warm: &Self::Point) -> Result<InnerSolution<Self::Point>>;
    fn group_rates(&self, point: &Self::Point) -> Vec<f64>;
    fn power(&self, point: &Self::Point) -> f64;
    fn beams(&self, point: &Self::Point) -> BeamCoefficients;
}

#[derive(Debug, Clone, Copy)]
pub struct DinkelbachOptions {
    pub eta0: f64,
    /// Stop when `|Δη| ≤ tol · max(1, η)`.
    pub tol: f64,
    pub max_outer: usize,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self {
            eta0: 0.0,
            tol: 1e-4,
            max_outer: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OuterStep {
    pub eta: f64,
    /// `R − ηP` at the inner solution.
    pub objective: f64,
    pub group_rates: Vec<f64>,
    pub power: f64,
    pub bcd: Vec<BcdRecord>,
}

impl OuterStep {
    pub fn sum_rate(&self) -> f64 {
        self.group_rates.iter().sum()
    }

    pub fn energy_efficiency(&self) -> f64 {
        self.sum_rate() / self.power
    }
}

#[derive(Debug, Clone)]
pub struct DinkelbachRun<P> {
    /// `η⁽⁰⁾, η⁽¹⁾, …`; one longer than `steps`.
    pub etas: Vec<f64>,
    pub steps: Vec<OuterStep>,
    pub converged: bool,
    pub point: P,
    pub warnings: Vec<String>,
}

impl<P> DinkelbachRun<P> {
    pub fn energy_efficiency(&self) -> f64 {
        *self.etas.last().unwrap()
    }

    pub fn outer_iterations(&self) -> usize {
        self.steps.len()
    }
}

pub fn run<S: InnerSolver>(solver: &S, opts: &DinkelbachOptions) -> Result<DinkelbachRun<S::Point>> {
    if !(opts.eta0 >= 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidConfig("need eta0 ≥ 0 and tol > 0".into()));
    }
    let mut point = solver.initial_point()?;
    let mut eta = opts.eta0;
    let mut etas = vec![eta];
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = false;
    let mut best: Option<(f64, S::Point)> = None;
    for _ in 0..opts.max_outer {
        let sol = solver.solve(eta, &point)?;
        warnings.extend(sol.warnings);
        let rates = solver.group_rates(&sol.point);
        let power = solver.power(&sol.point);
        if !(power > 0.0) {
            return Err(Error::Infeasible("inner solution radiates no power".into()));
        }
        let sum: f64 = rates.iter().sum();
        let next = sum / power;
        steps.push(OuterStep {
            eta,
            objective: sum - eta * power,
            group_rates: rates,
            power,
            bcd: sol.trace,
        });
        point = sol.point;
        etas.push(next);
        if best.as_ref().map_or(true, |(e, _)| next > *e) {
            best = Some((next, point.clone()));
        }
        let done = (next - eta).abs() <= opts.tol * next.abs().max(1.0);
        eta = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(format!("Dinkelbach hit {} outer iterations", opts.max_outer));
        if let Some((_, p)) = best {
            point = p;
        }
    }
    Ok(DinkelbachRun {
        etas,
        steps,
        converged,
        point,
        warnings,
    })
}
