//! Dual-decomposition solver for the Dinkelbach subproblem.
//!
//! With the quadratic transform `y(μ, J) = 2Re{μ* ∫hJ_g} − |μ|²(I + σ²)`
//! the SINR constraints become concave in `J`. For fixed `μ` the
//! `{J, r}` block is solved through its Lagrange dual in `(λ, ξ)` with the
//! ellipsoid method; the inner maximizations have closed forms. The `{μ, r}`
//! block is closed-form as well.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::beamform::{total_power, BeamCoefficients, Responses};
use crate::channels::LinkModel;
use crate::dinkelbach::{BcdRecord, InnerSolution, InnerSolver};
use crate::ellipsoid::{CutOutcome, Ellipsoid};
use crate::error::{Error, Result};
use crate::linalg::{identity_residual, CONDITION_LIMIT};
use crate::zf::{build_zf_basis, feasible_power, min_power_for_floors, select_representatives, CorrelationMetric};

/// Lower clamp on `Σ_k λ_{g,k}` in the rate update.
pub const LAMBDA_SUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AuxState {
    /// Per-group SINR floor.
    pub r: Vec<f64>,
    /// Per-user quadratic-transform auxiliary.
    pub mu: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub xi: f64,
    pub ellipsoid: Ellipsoid,
}

#[derive(Debug, Clone, Copy)]
pub struct CovOptions {
    /// BCD stops when the objective improves by at most this much.
    pub tol: f64,
    pub max_bcd_iter: usize,
    /// Ellipsoid stops when `√(∇ᵀQ∇)` falls below this.
    pub dual_tol: f64,
    pub max_dual_iter: usize,
    pub initial_radius: f64,
    pub conditioning_limit: f64,
    pub metric: CorrelationMetric,
}

impl Default for CovOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_bcd_iter: 100,
            dual_tol: 1e-7,
            max_dual_iter: 20_000,
            initial_radius: 1e3,
            conditioning_limit: CONDITION_LIMIT,
            metric: CorrelationMetric::default(),
        }
    }
}

/// `μ_k = ∫h_k J_g / (Σ_{i≠g} |∫h_k J_i|² + σ²)`.
pub fn mu_update(beams: &BeamCoefficients, model: &LinkModel) -> Vec<C64> {
    let resp = Responses::new(model, beams);
    (0..model.num_users())
        .map(|u| resp.signal(model, u) / resp.disturbance(model, u))
        .collect()
}

/// Per-group minimum SINR.
pub fn r_update(beams: &BeamCoefficients, model: &LinkModel) -> Vec<f64> {
    let resp = Responses::new(model, beams);
    (0..model.num_groups()).map(|g| resp.min_sinr(model, g)).collect()
}

/// `y(μ_k, J)` for every user.
pub fn y_values(mu: &[C64], resp: &Responses, model: &LinkModel) -> Vec<f64> {
    (0..model.num_users())
        .map(|u| {
            let m = mu[u];
            2.0 * (m.conj() * resp.signal(model, u)).re - m.norm_sqr() * resp.disturbance(model, u)
        })
        .collect()
}

/// Maximizer of `log2(1+r) − r Σ_k λ_{g,k}` over `r ≥ 2^{R̄_g} − 1`.
pub fn r_dual_opt(lambda: &[f64], model: &LinkModel) -> Vec<f64> {
    model
        .groups
        .iter()
        .enumerate()
        .map(|(g, range)| {
            let s: f64 = range.clone().map(|u| lambda[u]).sum::<f64>().max(LAMBDA_SUM_FLOOR);
            let stationary = 1.0 / (std::f64::consts::LN_2 * s) - 1.0;
            stationary.max(model.sinr_floor(g))
        })
        .collect()
}

/// The matrix inverted for one group's out-of-group coupling, kept for
/// verification.
#[derive(Debug, Clone)]
pub struct KernelInverse {
    /// `I + P_oth Q`
    pub kernel: DMatrix<C64>,
    /// Its inverse `C`.
    pub inverse: DMatrix<C64>,
}

impl KernelInverse {
    pub fn residual(&self) -> f64 {
        identity_residual(&self.inverse, &self.kernel)
    }
}

/// Output of the closed-form beam update.
#[derive(Debug, Clone)]
pub struct DualBeam {
    pub beams: BeamCoefficients,
    /// Upper bound `1 + Σ_i p_i Q_ii` on the condition number of the worst
    /// group kernel (its eigenvalues are those of `I + P^{1/2} Q P^{1/2}`).
    pub condition: f64,
}

/// `(I + PQ) v = P u` solved through the similar Hermitian system
/// `(I + SQS) w = S u`, `v = S w`, `S = P^{1/2}`, which stays positive
/// definite however large `P` gets.
fn group_beam(
    range: &std::ops::Range<usize>,
    oth: &[usize],
    mu: &[C64],
    p: &[f64],
    model: &LinkModel,
) -> (DVector<C64>, f64) {
    let k = model.num_users();
    let gm = |a: usize, b: usize| mu[a].conj() * mu[b] * model.gram[(a, b)];
    let n = oth.len();
    let mut a = DVector::zeros(k);
    for l in range.clone() {
        a[l] = mu[l] * p[l];
    }
    if n == 0 {
        return (a, 1.0);
    }
    let s: Vec<f64> = oth.iter().map(|&j| p[j].sqrt()).collect();
    let mut h = DMatrix::from_fn(n, n, |i, j| gm(oth[i], oth[j]) * (s[i] * s[j]));
    let condition = 1.0 + (0..n).map(|i| h[(i, i)].re).sum::<f64>();
    for i in 0..n {
        h[(i, i)] = C64::new(1.0 + h[(i, i)].re, 0.0);
    }
    let su = DVector::from_fn(n, |i, _| {
        let j = oth[i];
        range.clone().map(|l| gm(j, l) * p[l]).sum::<C64>() * s[i]
    });
    let w = match h.clone().cholesky() {
        Some(c) => c.solve(&su),
        None => h.lu().solve(&su).unwrap_or_else(|| DVector::zeros(n)),
    };
    for (i, &j) in oth.iter().enumerate() {
        a[j] = -w[i] * s[i] * mu[j];
    }
    (a, condition)
}

fn beams_for_dual(mu: &[C64], lambda: &[f64], xi: f64, eta: f64, model: &LinkModel) -> Result<DualBeam> {
    let denom = xi + eta;
    if !(denom > 0.0) {
        return Err(Error::InvalidConfig(format!("need ξ + η > 0, got {denom}")));
    }
    let p: Vec<f64> = lambda.iter().map(|l| l / denom).collect();
    let mut coeffs = Vec::with_capacity(model.num_groups());
    let mut condition: f64 = 1.0;
    for (g, range) in model.groups.iter().enumerate() {
        let (a, c) = group_beam(range, &model.others(g), mu, &p, model);
        coeffs.push(a);
        condition = condition.max(c);
    }
    Ok(DualBeam {
        beams: BeamCoefficients::new(coeffs),
        condition,
    })
}

/// Beam maximizing the Lagrangian for fixed `(μ, λ, ξ)`, plus the explicit
/// kernel inverses `C = (I + P_oth Q)⁻¹` of every group.
pub fn beam_dual_opt_detailed(
    mu: &[C64],
    lambda: &[f64],
    xi: f64,
    eta: f64,
    model: &LinkModel,
    limit: f64,
) -> Result<(BeamCoefficients, Vec<KernelInverse>)> {
    let out = beams_for_dual(mu, lambda, xi, eta, model)?;
    if !(out.condition <= limit) {
        return Err(Error::Conditioning {
            what: "dual beam kernel",
            condition: out.condition,
            limit,
        });
    }
    let p: Vec<f64> = lambda.iter().map(|l| l / (xi + eta)).collect();
    let mut kernels = Vec::with_capacity(model.num_groups());
    for g in 0..model.num_groups() {
        let oth = model.others(g);
        let n = oth.len();
        let kernel = DMatrix::from_fn(n, n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            let q = mu[oth[i]].conj() * mu[oth[j]] * model.gram[(oth[i], oth[j])];
            C64::new(delta, 0.0) + q * p[oth[i]]
        });
        let inverse = equilibrated_inverse(&kernel).ok_or(Error::Conditioning {
            what: "dual beam kernel",
            condition: f64::INFINITY,
            limit,
        })?;
        kernels.push(KernelInverse { kernel, inverse });
    }
    Ok((out.beams, kernels))
}

/// Inverse of a matrix whose rows differ in scale by many orders of
/// magnitude: LU on the row-equilibrated matrix, then one refinement step.
fn equilibrated_inverse(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let n = m.nrows();
    let scale: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();
    if scale.iter().any(|s| !(*s > 0.0)) {
        return None;
    }
    let balanced = DMatrix::from_fn(n, n, |i, j| m[(i, j)] / scale[i]);
    let inv = balanced.lu().try_inverse()?;
    let c = DMatrix::from_fn(n, n, |i, j| inv[(i, j)] / scale[j]);
    let e = DMatrix::<C64>::identity(n, n) - &c * m;
    Some(&c + e * &c)
}

/// Closed-form maximizer of the Lagrangian over the beams.
pub fn beam_dual_opt(mu: &[C64], lambda: &[f64], xi: f64, eta: f64, model: &LinkModel) -> Result<BeamCoefficients> {
    let out = beams_for_dual(mu, lambda, xi, eta, model)?;
    if !(out.condition <= CONDITION_LIMIT) {
        return Err(Error::Conditioning {
            what: "dual beam kernel",
            condition: out.condition,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(out.beams)
}

/// Group `g`'s share of the Lagrangian that depends on `J_g`.
pub fn lagrangian_beam_term(
    g: usize,
    coeffs: &DVector<C64>,
    mu: &[C64],
    lambda: &[f64],
    xi: f64,
    eta: f64,
    model: &LinkModel,
) -> f64 {
    let phi = &model.gram * coeffs;
    let mut v = 0.0;
    for u in 0..model.num_users() {
        if model.groups[g].contains(&u) {
            v += 2.0 * lambda[u] * (mu[u].conj() * phi[u]).re;
        } else {
            v -= lambda[u] * mu[u].norm_sqr() * phi[u].norm_sqr();
        }
    }
    let power = (coeffs.adjoint() * &model.gram * coeffs)[(0, 0)].re;
    v - (xi + eta) * power
}

/// `L = Σ log2(1+r_g) − ηP + Σ_k λ_k (y_k − r_g) + ξ (P_t − P)`.
#[allow(clippy::too_many_arguments)]
pub fn lagrangian(
    beams: &BeamCoefficients,
    r: &[f64],
    mu: &[C64],
    lambda: &[f64],
    xi: f64,
    eta: f64,
    model: &LinkModel,
) -> f64 {
    let resp = Responses::new(model, beams);
    let y = y_values(mu, &resp, model);
    let p = total_power(beams, model);
    let mut v: f64 = r.iter().map(|x| (1.0 + x).log2()).sum::<f64>() - eta * p;
    for u in 0..model.num_users() {
        v += lambda[u] * (y[u] - r[model.group_of(u)]);
    }
    v + xi * (model.power_budget - p)
}

/// `(Δλ, Δξ)`: constraint slacks at `(J, r)`, which are the gradient of
/// the dual function when `(J, r)` is its maximizer.
pub fn subgradient(beams: &BeamCoefficients, r: &[f64], mu: &[C64], model: &LinkModel) -> (Vec<f64>, f64) {
    let resp = Responses::new(model, beams);
    let y = y_values(mu, &resp, model);
    let dl = (0..model.num_users()).map(|u| y[u] - r[model.group_of(u)]).collect();
    (dl, model.power_budget - total_power(beams, model))
}

/// Dual function value and its maximizers at `(λ, ξ)`.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub value: f64,
    pub condition: f64,
    pub beams: BeamCoefficients,
    pub r: Vec<f64>,
    pub grad: DVector<f64>,
}

pub fn dual_point(mu: &[C64], lambda: &[f64], xi: f64, eta: f64, model: &LinkModel) -> Result<DualPoint> {
    let r = r_dual_opt(lambda, model);
    let DualBeam { beams, condition } = beams_for_dual(mu, lambda, xi, eta, model)?;
    let value = lagrangian(&beams, &r, mu, lambda, xi, eta, model);
    let (dl, dx) = subgradient(&beams, &r, mu, model);
    let mut grad = DVector::from_vec(dl);
    grad = grad.push(dx);
    Ok(DualPoint {
        value,
        condition,
        beams,
        r,
        grad,
    })
}

#[derive(Debug, Clone)]
pub struct JrSolution {
    pub beams: BeamCoefficients,
    pub r: Vec<f64>,
    pub dual: DualState,
    pub iterations: usize,
    /// Gap bound `√(∇ᵀQ∇)` at termination.
    pub gap: f64,
    pub converged: bool,
    /// Kernel condition bound at the recovered dual point.
    pub condition: f64,
}

/// Largest constraint violation of `(J, r)`, relative to `max(1, r_g)` for
/// the rate constraints and to `P_t` for the budget.
pub fn constraint_violation(beams: &BeamCoefficients, r: &[f64], mu: &[C64], model: &LinkModel) -> f64 {
    let (dl, dx) = subgradient(beams, r, mu, model);
    let mut worst = (-dx / model.power_budget).max(0.0);
    for (u, s) in dl.iter().enumerate() {
        let g = model.group_of(u);
        worst = worst.max(-s / r[g].max(1.0));
        worst = worst.max((model.sinr_floor(g) - r[g]) / model.sinr_floor(g).max(1.0));
    }
    worst
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Convex weights over evaluated dual points whose combined constraint
/// slacks are as close to nonnegative as possible. Because `y` is concave
/// in `J` and the power convex, averaging the matching primal points with
/// these weights keeps every slack at least the weighted slack.
fn certificate_weights(grads: &[&DVector<f64>]) -> Vec<f64> {
    let n = grads.len();
    let dim = grads[0].len();
    let scale: Vec<f64> = (0..dim)
        .map(|c| {
            grads
                .iter()
                .map(|g| g[c].abs())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE)
        })
        .collect();
    let col = |i: usize, c: usize| grads[i][c] / scale[c];
    let shortfall = |w: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|c| (0..n).map(|i| w[i] * col(i, c)).sum::<f64>().min(0.0))
            .collect()
    };
    let step = 1.0 / (n * dim) as f64;
    let mut w = vec![1.0 / n as f64; n];
    let mut z = w.clone();
    let mut t = 1.0f64;
    for _ in 0..2000 {
        let s = shortfall(&z);
        if s.iter().all(|v| *v == 0.0) {
            return z;
        }
        let mut next: Vec<f64> = (0..n)
            .map(|i| z[i] - step * (0..dim).map(|c| col(i, c) * s[c]).sum::<f64>())
            .collect();
        project_simplex(&mut next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&w)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        project_simplex(&mut z);
        w = next;
        t = t_next;
    }
    w
}

struct Evaluated {
    grad: DVector<f64>,
    beams: BeamCoefficients,
}

/// Solves the `{J, r}` block for fixed `μ` via the dual.
///
/// The primal point is taken at the best dual center. If that point misses
/// a constraint, a convex combination of the primal points at recent
/// centers with nonnegative combined slacks is used instead when it does
/// better.
pub fn solve_jr_subproblem(mu: &[C64], eta: f64, model: &LinkModel, opts: &CovOptions) -> Result<JrSolution> {
    let k = model.num_users();
    let mut x0 = DVector::from_element(k + 1, 1.0 / k as f64);
    x0[k] = 1.0;
    let mut ell = Ellipsoid::ball(x0, opts.initial_radius);
    // every primal-feasible point scores at least this
    let primal_floor: f64 = model.rate_floors.iter().sum::<f64>() - eta.max(0.0) * model.power_budget;
    let window = 20 * (k + 1);
    let mut recent: std::collections::VecDeque<Evaluated> = std::collections::VecDeque::with_capacity(window);
    let mut best: Option<(DVector<f64>, DualPoint)> = None;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_dual_iter {
        iterations += 1;
        let x = ell.center.clone();
        // feasibility cut on the most negative coordinate
        let (worst, min) =
            x.iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
        if min < 0.0 || x[k] + eta <= 0.0 {
            let mut a = DVector::zeros(k + 1);
            a[worst] = -1.0;
            let depth = (-min).max(0.0);
            if ell.cut(&a, depth) != CutOutcome::Updated {
                break;
            }
            continue;
        }
        let lambda: Vec<f64> = x.rows(0, k).iter().cloned().collect();
        let dp = dual_point(mu, &lambda, x[k], eta, model)?;
        if dp.value < primal_floor - 1e-9 * primal_floor.abs().max(1.0) {
            return Err(Error::Infeasible(format!(
                "dual value {} below every feasible objective {}",
                dp.value, primal_floor
            )));
        }
        if recent.len() == window {
            recent.pop_front();
        }
        recent.push_back(Evaluated {
            grad: dp.grad.clone(),
            beams: dp.beams.clone(),
        });
        let best_value = match &best {
            Some((_, b)) if b.value <= dp.value => b.value,
            _ => {
                best = Some((x.clone(), dp.clone()));
                dp.value
            }
        };
        gap = ell.width(&dp.grad);
        if gap < opts.dual_tol {
            converged = true;
            break;
        }
        match ell.cut(&dp.grad, dp.value - best_value) {
            CutOutcome::Updated => {}
            _ => {
                converged = true;
                break;
            }
        }
    }
    let (x, dp) = best.ok_or_else(|| Error::Infeasible("ellipsoid never reached a dual-feasible center".into()))?;
    let lambda: Vec<f64> = x.rows(0, k).iter().cloned().collect();
    let finish = |mut beams: BeamCoefficients| {
        let p = total_power(&beams, model);
        if p > model.power_budget {
            beams = beams.scaled(C64::new((model.power_budget / p).sqrt(), 0.0));
        }
        let resp = Responses::new(model, &beams);
        let y = y_values(mu, &resp, model);
        let r: Vec<f64> = model
            .groups
            .iter()
            .enumerate()
            .map(|(g, range)| {
                let lowest = range.clone().map(|u| y[u]).fold(f64::INFINITY, f64::min);
                lowest.max(model.sinr_floor(g))
            })
            .collect();
        let v = constraint_violation(&beams, &r, mu, model);
        (beams, r, v)
    };
    let (mut beams, mut r, violation) = finish(dp.beams.clone());
    if violation > opts.tol && recent.len() > 1 {
        let grads: Vec<&DVector<f64>> = recent.iter().map(|e| &e.grad).collect();
        let w = certificate_weights(&grads);
        let mut coeffs = vec![DVector::zeros(k); model.num_groups()];
        for (e, wi) in recent.iter().zip(&w) {
            if *wi > 0.0 {
                for (c, b) in coeffs.iter_mut().zip(&e.beams.coeffs) {
                    *c += b * C64::new(*wi, 0.0);
                }
            }
        }
        let (b2, r2, v2) = finish(BeamCoefficients::new(coeffs));
        if v2 < violation {
            beams = b2;
            r = r2;
        }
    }
    Ok(JrSolution {
        beams,
        r,
        dual: DualState {
            lambda,
            xi: x[k],
            ellipsoid: ell,
        },
        iterations,
        gap,
        converged,
        condition: dp.condition,
    })
}

/// Rescales all beams by a common factor so every group meets its floor and
/// the budget holds, if such a factor exists. SINR grows with the factor.
pub fn fit_to_constraints(beams: &BeamCoefficients, model: &LinkModel) -> Option<BeamCoefficients> {
    let resp = Responses::new(model, beams);
    let mut lo: f64 = 0.0;
    for u in 0..model.num_users() {
        let floor = model.sinr_floor(model.group_of(u));
        if floor == 0.0 {
            continue;
        }
        let s = resp.signal(model, u).norm_sqr();
        let i = resp.interference(model, u);
        let margin = s - floor * i;
        if !(margin > 0.0) {
            return None;
        }
        lo = lo.max(floor * model.noise[u] / margin);
    }
    let p = total_power(beams, model);
    let hi = if p > 0.0 { model.power_budget / p } else { f64::INFINITY };
    if lo > hi {
        return None;
    }
    let t2 = if lo > 1.0 {
        (lo * (1.0 + 1e-12)).min(hi)
    } else {
        1.0f64.min(hi)
    };
    if t2 == 1.0 {
        Some(beams.clone())
    } else {
        Some(beams.scaled(C64::new(t2.sqrt(), 0.0)))
    }
}

/// `Σ_g log2(1 + min_k γ_{g,k}) − η P`.
pub fn objective(beams: &BeamCoefficients, eta: f64, model: &LinkModel) -> f64 {
    r_update(beams, model).iter().map(|r| (1.0 + r).log2()).sum::<f64>() - eta * total_power(beams, model)
}

pub fn is_feasible(beams: &BeamCoefficients, model: &LinkModel) -> bool {
    crate::beamform::energy_efficiency(beams, model).feasible()
}

#[derive(Debug, Clone)]
pub struct CovSolution {
    pub beams: BeamCoefficients,
    pub aux: AuxState,
    pub trace: Vec<BcdRecord>,
    pub warnings: Vec<String>,
}

fn record(beams: &BeamCoefficients, eta: f64, model: &LinkModel, iters: usize) -> BcdRecord {
    BcdRecord {
        objective: objective(beams, eta, model),
        r: r_update(beams, model),
        power: total_power(beams, model),
        inner_iterations: iters,
    }
}

/// Alternates the `{J, r}` block (dual ellipsoid) with closed-form `{μ, r}`
/// updates. A `{J, r}` candidate is only accepted if it keeps the iterate
/// feasible and does not lower the objective.
pub fn solve_dinkelbach_subproblem(
    eta: f64,
    model: &LinkModel,
    warm: &BeamCoefficients,
    opts: &CovOptions,
) -> Result<CovSolution> {
    let rep = crate::beamform::energy_efficiency(warm, model);
    if !rep.feasible() {
        return Err(Error::InfeasibleWarmStart(format!(
            "rates {:?} vs floors {:?}, power {} vs budget {}",
            rep.group_rates, model.rate_floors, rep.power, model.power_budget
        )));
    }
    let mut beams = warm.clone();
    let mut trace = vec![record(&beams, eta, model, 0)];
    let mut warnings = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_bcd_iter {
        let f = trace.last().unwrap().objective;
        let mu = mu_update(&beams, model);
        let jr = solve_jr_subproblem(&mu, eta, model, opts)?;
        if !jr.converged {
            warnings.push(format!(
                "dual ellipsoid stopped after {} iterations with gap {:e}",
                jr.iterations, jr.gap
            ));
        }
        if jr.condition > opts.conditioning_limit {
            warnings.push(format!(
                "dual beam kernel condition {:e} exceeds {:e}",
                jr.condition, opts.conditioning_limit
            ));
        }
        let Some(candidate) = fit_to_constraints(&jr.beams, model) else {
            converged = true;
            break;
        };
        let rec = record(&candidate, eta, model, jr.iterations);
        if rec.objective < f || !is_feasible(&candidate, model) {
            converged = true;
            break;
        }
        beams = candidate;
        let step = rec.objective - f;
        trace.push(rec);
        if step <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(format!("BCD hit {} iterations", opts.max_bcd_iter));
    }
    Ok(CovSolution {
        aux: AuxState {
            r: r_update(&beams, model),
            mu: mu_update(&beams, model),
        },
        beams,
        trace,
        warnings,
    })
}

/// Feasible starting beams. Zero-forcing directions with the budget split
/// evenly are preferred; if they miss a floor, the zero-forcing powers are
/// re-allocated, and failing that regularized inverses of the full Gram
/// matrix are tried as directions.
pub fn zf_warm_start(model: &LinkModel, metric: CorrelationMetric) -> Result<BeamCoefficients> {
    let reps = select_representatives(model, metric);
    let basis = build_zf_basis(model, &reps);
    if let Ok(b) = &basis {
        if let Ok(rho) = feasible_power(b, model) {
            return Ok(b.assemble(&rho));
        }
    }
    let k = model.num_users();
    let scale = model.gram.diagonal().iter().map(|v| v.re).sum::<f64>() / k as f64;
    for reg in [1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0, 1e3] {
        let shifted = &model.gram + DMatrix::<C64>::identity(k, k) * C64::new(reg * scale, 0.0);
        let Some(inv) = shifted.lu().try_inverse() else {
            continue;
        };
        let mut coeffs = Vec::with_capacity(model.num_groups());
        for range in &model.groups {
            let target = DVector::from_fn(k, |u, _| {
                if range.contains(&u) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let z = &inv * target;
            let p = (z.adjoint() * &model.gram * &z)[(0, 0)].re;
            if !(p > 0.0) {
                break;
            }
            coeffs.push(z / C64::new(p.sqrt(), 0.0));
        }
        if coeffs.len() != model.num_groups() {
            continue;
        }
        let unit = BeamCoefficients::new(coeffs);
        let resp = Responses::new(model, &unit);
        let gains = resp.matrix.map(|v| v.norm_sqr());
        if let Some(rho) = min_power_for_floors(&gains, model) {
            let total: f64 = rho.iter().sum();
            let fill = if total > 0.0 { model.power_budget / total } else { 1.0 };
            let rho: Vec<f64> = rho.iter().map(|p| p * fill).collect();
            let beams = BeamCoefficients::new(
                unit.coeffs
                    .iter()
                    .zip(&rho)
                    .map(|(c, p)| c * C64::new(p.sqrt(), 0.0))
                    .collect(),
            );
            if is_feasible(&beams, model) {
                return Ok(beams);
            }
        }
    }
    basis?;
    Err(Error::InfeasibleWarmStart(
        "no zero-forcing or regularized direction meets the rate floors".into(),
    ))
}

/// Dinkelbach inner solver over beam coefficients.
pub struct CovSolver<'a> {
    pub model: &'a LinkModel,
    pub options: CovOptions,
}

impl InnerSolver for CovSolver<'_> {
    type Point = BeamCoefficients;

    fn initial_point(&self) -> Result<BeamCoefficients> {
        zf_warm_start(self.model, self.options.metric)
    }

    fn solve(&self, eta: f64, warm: &BeamCoefficients) -> Result<InnerSolution<BeamCoefficients>> {
        let sol = solve_dinkelbach_subproblem(eta, self.model, warm, &self.options)?;
        Ok(InnerSolution {
            point: sol.beams,
            trace: sol.trace,
            warnings: sol.warnings,
        })
    }

    fn group_rates(&self, beams: &BeamCoefficients) -> Vec<f64> {
        r_update(beams, self.model).iter().map(|r| (1.0 + r).log2()).collect()
    }

    fn power(&self, beams: &BeamCoefficients) -> f64 {
        total_power(beams, self.model)
    }

    fn beams(&self, beams: &BeamCoefficients) -> BeamCoefficients {
        beams.clone()
    }
}
