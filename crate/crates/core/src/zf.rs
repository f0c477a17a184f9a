//! Zero-forcing design: one representative user per group, patterns that
//! null the other groups' representatives, and a convex power allocation
//! over the resulting fixed directions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::barrier::{maximize, BarrierOptions, ConcaveProgram, Local};
use crate::beamform::BeamCoefficients;
use crate::channels::LinkModel;
use crate::dinkelbach::{BcdRecord, InnerSolution, InnerSolver};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, CONDITION_LIMIT};

/// Relative tolerance for ties in representative selection.
pub const TIE_TOL: f64 = 1e-9;

/// How the pairwise channel correlation `l_{i,j}` is scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CorrelationMetric {
    /// `|⟨h_i,h_j⟩| / (‖h_i‖‖h_j‖)`
    #[default]
    NormalizedMagnitude,
    /// `|⟨h_i,h_j⟩|`
    Magnitude,
    /// `Re⟨h_i,h_j⟩ / (‖h_i‖‖h_j‖)`
    NormalizedRealPart,
}

pub fn correlation_table(model: &LinkModel, metric: CorrelationMetric) -> DMatrix<f64> {
    let g = &model.gram;
    let k = model.num_users();
    DMatrix::from_fn(k, k, |i, j| {
        let norm = (g[(i, i)].re * g[(j, j)].re).sqrt();
        match metric {
            CorrelationMetric::NormalizedMagnitude => g[(i, j)].norm() / norm,
            CorrelationMetric::Magnitude => g[(i, j)].norm(),
            CorrelationMetric::NormalizedRealPart => g[(i, j)].re / norm,
        }
    })
}

#[derive(Debug, Clone)]
pub struct RepresentativeSet {
    /// Global user index of each group's representative.
    pub users: Vec<usize>,
    pub correlation: DMatrix<f64>,
    /// `O_i`: correlation with the rest of the user's own group.
    pub intra: Vec<f64>,
    /// `Õ_i`: correlation with every user outside the group.
    pub inter: Vec<f64>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(b.abs())
}

pub fn select_representatives(model: &LinkModel, metric: CorrelationMetric) -> RepresentativeSet {
    let l = correlation_table(model, metric);
    let k = model.num_users();
    let mut intra = vec![0.0; k];
    let mut inter = vec![0.0; k];
    for i in 0..k {
        let g = model.group_of(i);
        for j in 0..k {
            if j == i {
                continue;
            }
            if model.groups[g].contains(&j) {
                intra[i] += l[(i, j)];
            } else {
                inter[i] += l[(i, j)];
            }
        }
    }
    let users = model
        .groups
        .iter()
        .map(|range| {
            let mut best = range.start;
            for i in range.clone().skip(1) {
                let better = if close(intra[i], intra[best]) {
                    !close(inter[i], inter[best]) && inter[i] < inter[best]
                } else {
                    intra[i] > intra[best]
                };
                if better {
                    best = i;
                }
            }
            best
        })
        .collect();
    RepresentativeSet {
        users,
        correlation: l,
        intra,
        inter,
    }
}

/// Zero-forcing patterns and the constants needed to evaluate SINR as a
/// function of the group powers alone.
#[derive(Debug, Clone)]
pub struct ZfBasis {
    pub reps: Vec<usize>,
    /// `[H_ot]_{g,j} = ⟨h_{rep g}, h_{rep j}⟩`
    pub h_ot: DMatrix<C64>,
    /// `H_ot⁻¹`; column `g` holds `β_g`.
    pub beta: DMatrix<C64>,
    /// `P_g = ∫|Z_g|²`
    pub norms: Vec<f64>,
    /// Unit-power patterns `Ĵ_g = Z_g / √P_g` as channel coefficients.
    pub patterns: BeamCoefficients,
    /// `c[u, i] = ∫ h_u Z_i` for every user `u` and group `i`.
    pub cross: DMatrix<C64>,
    /// `|c[u, i]|² / P_i`
    pub gains: DMatrix<f64>,
}

pub fn build_zf_basis(model: &LinkModel, reps: &RepresentativeSet) -> Result<ZfBasis> {
    build_zf_basis_with_limit(model, reps, CONDITION_LIMIT)
}

pub fn build_zf_basis_with_limit(model: &LinkModel, reps: &RepresentativeSet, limit: f64) -> Result<ZfBasis> {
    let g = model.num_groups();
    let k = model.num_users();
    let r = &reps.users;
    let h_ot = DMatrix::from_fn(g, g, |i, j| model.gram[(r[i], r[j])]);
    let cond = condition_number(&h_ot);
    if !(cond <= limit) {
        return Err(Error::Conditioning {
            what: "representative Gram matrix",
            condition: cond,
            limit,
        });
    }
    let beta = h_ot.clone().lu().try_inverse().ok_or(Error::Conditioning {
        what: "representative Gram matrix",
        condition: f64::INFINITY,
        limit,
    })?;
    let mut coeffs = Vec::with_capacity(g);
    let mut norms = Vec::with_capacity(g);
    let mut cross = DMatrix::zeros(k, g);
    for i in 0..g {
        let mut z = DVector::zeros(k);
        for j in 0..g {
            z[r[j]] = beta[(j, i)];
        }
        let col = beta.column(i);
        let p = (col.adjoint() * &h_ot * col)[(0, 0)].re;
        cross.set_column(i, &(&model.gram * &z));
        coeffs.push(z / C64::new(p.sqrt(), 0.0));
        norms.push(p);
    }
    let gains = DMatrix::from_fn(k, g, |u, i| cross[(u, i)].norm_sqr() / norms[i]);
    Ok(ZfBasis {
        reps: r.clone(),
        h_ot,
        beta,
        norms,
        patterns: BeamCoefficients::new(coeffs),
        cross,
        gains,
    })
}

impl ZfBasis {
    pub fn num_groups(&self) -> usize {
        self.norms.len()
    }

    /// `J_g = √ρ_g Ĵ_g`.
    pub fn assemble(&self, rho: &[f64]) -> BeamCoefficients {
        BeamCoefficients::new(
            self.patterns
                .coeffs
                .iter()
                .zip(rho)
                .map(|(c, p)| c * C64::new(p.max(0.0).sqrt(), 0.0))
                .collect(),
        )
    }

    fn interference(&self, model: &LinkModel, rho: &[f64], u: usize) -> f64 {
        let g = model.group_of(u);
        (0..self.num_groups())
            .filter(|i| *i != g)
            .map(|i| rho[i] * self.gains[(u, i)])
            .sum::<f64>()
            + model.noise[u]
    }

    pub fn sinr(&self, model: &LinkModel, rho: &[f64], u: usize) -> f64 {
        let g = model.group_of(u);
        rho[g] * self.gains[(u, g)] / self.interference(model, rho, u)
    }

    /// Largest `|∫ h_i Ĵ_g| / (‖h_i‖‖Ĵ_g‖)` over representatives `i` of
    /// groups other than `g`.
    pub fn orthogonality_residual(&self, model: &LinkModel) -> f64 {
        let mut worst: f64 = 0.0;
        for g in 0..self.num_groups() {
            for (j, &u) in self.reps.iter().enumerate() {
                if j == g {
                    continue;
                }
                let resp = self.cross[(u, g)].norm() / self.norms[g].sqrt();
                worst = worst.max(resp / model.gram[(u, u)].re.sqrt());
            }
        }
        worst
    }

    /// Largest entry of `|H_ot β − I|`.
    pub fn identity_residual(&self) -> f64 {
        crate::linalg::identity_residual(&self.h_ot, &self.beta)
    }
}

/// Power, real auxiliaries and SINR floors of the zero-forcing subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfAuxState {
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
    pub r: Vec<f64>,
}

pub fn zf_mu_update(rho: &[f64], basis: &ZfBasis, model: &LinkModel) -> Vec<f64> {
    (0..model.num_users())
        .map(|u| {
            let g = model.group_of(u);
            (rho[g] * basis.gains[(u, g)]).sqrt() / basis.interference(model, rho, u)
        })
        .collect()
}

pub fn zf_r_update(rho: &[f64], basis: &ZfBasis, model: &LinkModel) -> Vec<f64> {
    model
        .groups
        .iter()
        .map(|r| {
            r.clone()
                .map(|u| basis.sinr(model, rho, u))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `y(μ̃, q) = 2μ̃ q_g √a_g − μ̃² (Σ_{i≠g} q_i² a_i + σ²)` for user `u`,
/// with `q = √ρ`.
pub fn zf_y(mu: f64, q: &[f64], basis: &ZfBasis, model: &LinkModel, u: usize) -> f64 {
    let g = model.group_of(u);
    let rho: Vec<f64> = q.iter().map(|v| v * v).collect();
    2.0 * mu * q[g] * basis.gains[(u, g)].sqrt() - mu * mu * basis.interference(model, &rho, u)
}

pub fn uniform_power(model: &LinkModel) -> Vec<f64> {
    vec![model.power_budget / model.num_groups() as f64; model.num_groups()]
}

/// Smallest powers meeting every SINR floor for fixed unit-power
/// directions with `gains[u, i]` = received power at user `u` per unit
/// power of group `i`. `None` if the floors need more than the budget.
pub fn min_power_for_floors(gains: &DMatrix<f64>, model: &LinkModel) -> Option<Vec<f64>> {
    let g_count = model.num_groups();
    let mut rho = vec![0.0; g_count];
    for _ in 0..100_000 {
        let mut next = vec![0.0; g_count];
        for (g, range) in model.groups.iter().enumerate() {
            let floor = model.sinr_floor(g);
            if floor == 0.0 {
                continue;
            }
            for u in range.clone() {
                let own = gains[(u, g)];
                if !(own > 0.0) {
                    return None;
                }
                let interference: f64 = (0..g_count).filter(|i| *i != g).map(|i| rho[i] * gains[(u, i)]).sum();
                next[g] = f64::max(next[g], floor * (interference + model.noise[u]) / own);
            }
        }
        let total: f64 = next.iter().sum();
        if total > model.power_budget {
            return None;
        }
        let change = next.iter().zip(&rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        rho = next;
        if change <= 1e-13 * total.max(f64::MIN_POSITIVE) {
            return Some(rho);
        }
    }
    None
}

/// Uniform split if it meets the floors, else the minimum-power allocation
/// scaled up to the full budget.
pub fn feasible_power(basis: &ZfBasis, model: &LinkModel) -> Result<Vec<f64>> {
    let uniform = uniform_power(model);
    if check_feasible(&uniform, basis, model).is_ok() {
        return Ok(uniform);
    }
    let rho = min_power_for_floors(&basis.gains, model)
        .ok_or_else(|| Error::Infeasible("zero forcing cannot meet the rate floors within the budget".into()))?;
    let total: f64 = rho.iter().sum();
    let scale = if total > 0.0 { model.power_budget / total } else { 1.0 };
    Ok(rho.iter().map(|p| p * scale).collect())
}

/// Rates `Σ log2(1+r_g) − η Σ ρ_g` with `r_g` the true minimum SINR.
pub fn zf_objective(rho: &[f64], eta: f64, basis: &ZfBasis, model: &LinkModel) -> f64 {
    zf_r_update(rho, basis, model)
        .iter()
        .map(|r| (1.0 + r).log2())
        .sum::<f64>()
        - eta * rho.iter().sum::<f64>()
}

struct UserTerm {
    /// Position of the user's group among the active groups.
    own: usize,
    /// `2 μ̃ √a_own`
    lin: f64,
    /// `μ̃² a_i` for every other active group.
    quad: Vec<(usize, f64)>,
    /// `μ̃² σ²`
    constant: f64,
}

/// Variables `[q_active…, r_active…]`.
struct PowerProgram {
    active: usize,
    eta: f64,
    budget: f64,
    floors: Vec<f64>,
    users: Vec<UserTerm>,
}

impl PowerProgram {
    fn y(&self, t: &UserTerm, x: &DVector<f64>) -> Local {
        let n = 2 * self.active;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        let mut value = t.lin * x[t.own] - t.constant;
        grad[t.own] = t.lin;
        for &(i, c) in &t.quad {
            value -= c * x[i] * x[i];
            grad[i] = -2.0 * c * x[i];
            hess[(i, i)] = -2.0 * c;
        }
        Local { value, grad, hess }
    }
}

impl ConcaveProgram for PowerProgram {
    fn dim(&self) -> usize {
        2 * self.active
    }

    fn objective(&self, x: &DVector<f64>) -> Local {
        let a = self.active;
        let n = 2 * a;
        let ln2 = std::f64::consts::LN_2;
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for g in 0..a {
            let q = x[g];
            let r = x[a + g];
            value += (1.0 + r).log2() - self.eta * q * q;
            grad[g] = -2.0 * self.eta * q;
            hess[(g, g)] = -2.0 * self.eta;
            grad[a + g] = 1.0 / ((1.0 + r) * ln2);
            hess[(a + g, a + g)] = -1.0 / ((1.0 + r).powi(2) * ln2);
        }
        Local { value, grad, hess }
    }

    fn constraints(&self, x: &DVector<f64>) -> Vec<Local> {
        let a = self.active;
        let n = 2 * a;
        let unit = |i: usize, s: f64| {
            let mut v = DVector::zeros(n);
            v[i] = s;
            v
        };
        let mut out = Vec::with_capacity(self.users.len() + 2 * a + 1);
        for t in &self.users {
            let mut c = self.y(t, x);
            c.value -= x[a + t.own];
            c.grad[a + t.own] -= 1.0;
            out.push(c);
        }
        for g in 0..a {
            out.push(Local {
                value: x[a + g] - self.floors[g],
                grad: unit(a + g, 1.0),
                hess: DMatrix::zeros(n, n),
            });
            out.push(Local {
                value: x[g],
                grad: unit(g, 1.0),
                hess: DMatrix::zeros(n, n),
            });
        }
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for g in 0..a {
            grad[g] = -2.0 * x[g];
            hess[(g, g)] = -2.0;
        }
        out.push(Local {
            value: self.budget - (0..a).map(|g| x[g] * x[g]).sum::<f64>(),
            grad,
            hess,
        });
        out
    }
}

/// Phase I: variables `[q_active…, s]`, maximize `s` subject to every
/// scaled constraint of [`PowerProgram`] (with `r` eliminated) exceeding `s`.
struct PhaseOne<'a> {
    inner: &'a PowerProgram,
}

impl PhaseOne<'_> {
    /// Constraints on `q` alone, each divided by a natural scale.
    fn raw(&self, x: &DVector<f64>) -> Vec<Local> {
        let p = self.inner;
        let a = p.active;
        let n = a + 1;
        let lift = |l: Local, scale: f64| {
            let mut grad = DVector::zeros(n);
            let mut hess = DMatrix::zeros(n, n);
            for i in 0..a {
                grad[i] = l.grad[i] / scale;
                for j in 0..a {
                    hess[(i, j)] = l.hess[(i, j)] / scale;
                }
            }
            Local {
                value: l.value / scale,
                grad,
                hess,
            }
        };
        let mut full = DVector::zeros(2 * a);
        full.rows_mut(0, a).copy_from(&x.rows(0, a));
        let mut out = Vec::new();
        for t in &p.users {
            let mut c = p.y(t, &full);
            c.value -= p.floors[t.own];
            let scale = 1.0 + p.floors[t.own];
            out.push(lift(c, scale));
        }
        let qscale = p.budget.sqrt();
        for g in 0..a {
            let mut grad = DVector::zeros(2 * a);
            grad[g] = 1.0;
            out.push(lift(
                Local {
                    value: x[g],
                    grad,
                    hess: DMatrix::zeros(2 * a, 2 * a),
                },
                qscale,
            ));
        }
        let mut grad = DVector::zeros(2 * a);
        let mut hess = DMatrix::zeros(2 * a, 2 * a);
        for g in 0..a {
            grad[g] = -2.0 * x[g];
            hess[(g, g)] = -2.0;
        }
        out.push(lift(
            Local {
                value: p.budget - (0..a).map(|g| x[g] * x[g]).sum::<f64>(),
                grad,
                hess,
            },
            p.budget,
        ));
        out
    }
}

impl ConcaveProgram for PhaseOne<'_> {
    fn dim(&self) -> usize {
        self.inner.active + 1
    }

    fn objective(&self, x: &DVector<f64>) -> Local {
        let n = self.dim();
        let mut grad = DVector::zeros(n);
        grad[n - 1] = 1.0;
        Local {
            value: x[n - 1],
            grad,
            hess: DMatrix::zeros(n, n),
        }
    }

    fn constraints(&self, x: &DVector<f64>) -> Vec<Local> {
        let n = self.dim();
        let s = x[n - 1];
        let mut out: Vec<Local> = self
            .raw(x)
            .into_iter()
            .map(|mut c| {
                c.value -= s;
                c.grad[n - 1] = -1.0;
                c
            })
            .collect();
        let mut grad = DVector::zeros(n);
        grad[n - 1] = -1.0;
        out.push(Local {
            value: 1.0 - s,
            grad,
            hess: DMatrix::zeros(n, n),
        });
        out
    }
}

#[derive(Debug, Clone)]
pub struct PowerAllocation {
    pub rho: Vec<f64>,
    pub r: Vec<f64>,
    pub newton_steps: usize,
}

/// Maximizes `Σ log2(1+r_g) − η Σ ρ_g` over powers and floors for fixed
/// `μ̃`, starting from `warm` (which need not be strictly feasible).
pub fn solve_power_allocation(
    mu: &[f64],
    eta: f64,
    basis: &ZfBasis,
    model: &LinkModel,
    warm: &[f64],
    tol: f64,
) -> Result<PowerAllocation> {
    let g_count = model.num_groups();
    let mut slot = vec![None; g_count];
    let mut active = Vec::new();
    for (g, range) in model.groups.iter().enumerate() {
        if range.clone().any(|u| mu[u] > 0.0) {
            slot[g] = Some(active.len());
            active.push(g);
        } else if model.rate_floors[g] > 0.0 {
            return Err(Error::Infeasible(format!(
                "group {g} has no signal direction but a positive rate floor"
            )));
        }
    }
    let mut rho = vec![0.0; g_count];
    let mut r = vec![0.0; g_count];
    if active.is_empty() {
        return Ok(PowerAllocation {
            rho,
            r,
            newton_steps: 0,
        });
    }
    let a = active.len();
    let mut users = Vec::new();
    for &g in &active {
        for u in model.groups[g].clone() {
            let m = mu[u];
            users.push(UserTerm {
                own: slot[g].unwrap(),
                lin: 2.0 * m * basis.gains[(u, g)].sqrt(),
                quad: active
                    .iter()
                    .filter(|i| **i != g)
                    .map(|&i| (slot[i].unwrap(), m * m * basis.gains[(u, i)]))
                    .collect(),
                constant: m * m * model.noise[u],
            });
        }
    }
    let program = PowerProgram {
        active: a,
        eta,
        budget: model.power_budget,
        floors: active.iter().map(|&g| model.sinr_floor(g)).collect(),
        users,
    };

    let mut q = DVector::from_iterator(a, active.iter().map(|&g| warm[g].max(0.0).sqrt()));
    let phase = PhaseOne { inner: &program };
    let min_slack = |q: &DVector<f64>| {
        let mut x = q.clone().push(0.0);
        x[a] = 0.0;
        phase.raw(&x).iter().map(|c| c.value).fold(f64::INFINITY, f64::min)
    };
    let mut steps = 0;
    if !(min_slack(&q) > 0.0) {
        // nudge onto the interior of q ≥ 0, Σq² ≤ P_t
        let floor = 1e-6 * model.power_budget.sqrt();
        q.iter_mut().for_each(|v| *v = v.max(floor));
        let n2 = q.norm_squared();
        if n2 >= model.power_budget {
            q *= (0.999 * model.power_budget / n2).sqrt();
        }
        let s0 = min_slack(&q) - 1.0;
        let x0 = q.clone().push(s0);
        let res = maximize(&phase, x0, BarrierOptions::default(), &|x| x[a] > 0.0);
        steps += res.newton_steps;
        if !(res.x[a] > 0.0) {
            return Err(Error::Infeasible(
                "rate floors cannot be met within the power budget".into(),
            ));
        }
        q = res.x.rows(0, a).into_owned();
    }

    let mut x0 = DVector::zeros(2 * a);
    x0.rows_mut(0, a).copy_from(&q);
    for j in 0..a {
        let lowest = program
            .users
            .iter()
            .filter(|t| t.own == j)
            .map(|t| program.y(t, &x0).value)
            .fold(f64::INFINITY, f64::min);
        x0[a + j] = 0.5 * (program.floors[j] + lowest);
    }
    let res = maximize(
        &program,
        x0,
        BarrierOptions {
            gap_tol: tol,
            ..BarrierOptions::default()
        },
        &|_| false,
    );
    steps += res.newton_steps;
    for (j, &g) in active.iter().enumerate() {
        rho[g] = res.x[j] * res.x[j];
        r[g] = res.x[a + j];
    }
    Ok(PowerAllocation {
        rho,
        r,
        newton_steps: steps,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ZfOptions {
    /// Stop when the objective improves by at most this much.
    pub tol: f64,
    pub max_bcd_iter: usize,
    /// Duality-gap target of each power-allocation solve.
    pub power_tol: f64,
    pub metric: CorrelationMetric,
}

impl Default for ZfOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_bcd_iter: 100,
            power_tol: 1e-10,
            metric: CorrelationMetric::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZfSolution {
    pub aux: ZfAuxState,
    pub trace: Vec<BcdRecord>,
    pub warnings: Vec<String>,
}

fn check_feasible(rho: &[f64], basis: &ZfBasis, model: &LinkModel) -> Result<()> {
    let tol = crate::beamform::FEASIBILITY_TOL;
    let p: f64 = rho.iter().sum();
    if p > model.power_budget * (1.0 + tol) || rho.iter().any(|v| *v < 0.0) {
        return Err(Error::InfeasibleWarmStart(format!(
            "power {p} exceeds budget {}",
            model.power_budget
        )));
    }
    for (g, r) in zf_r_update(rho, basis, model).iter().enumerate() {
        let floor = model.sinr_floor(g);
        if *r < floor * (1.0 - tol) {
            return Err(Error::InfeasibleWarmStart(format!(
                "group {g} SINR {r} below floor {floor}"
            )));
        }
    }
    Ok(())
}

fn record(rho: &[f64], eta: f64, basis: &ZfBasis, model: &LinkModel, steps: usize) -> BcdRecord {
    BcdRecord {
        objective: zf_objective(rho, eta, basis, model),
        r: zf_r_update(rho, basis, model),
        power: rho.iter().sum(),
        inner_iterations: steps,
    }
}

/// Alternates power allocation and the closed-form `(μ̃, r)` updates.
pub fn solve_zf_dinkelbach_subproblem(
    eta: f64,
    basis: &ZfBasis,
    model: &LinkModel,
    warm: &[f64],
    opts: &ZfOptions,
) -> Result<ZfSolution> {
    check_feasible(warm, basis, model)?;
    let mut rho = warm.to_vec();
    let mut trace = vec![record(&rho, eta, basis, model, 0)];
    let mut warnings = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_bcd_iter {
        let f = trace.last().unwrap().objective;
        let mu = zf_mu_update(&rho, basis, model);
        let alloc = solve_power_allocation(&mu, eta, basis, model, &rho, opts.power_tol)?;
        let rec = record(&alloc.rho, eta, basis, model, alloc.newton_steps);
        if rec.objective < f || check_feasible(&alloc.rho, basis, model).is_err() {
            converged = true;
            break;
        }
        rho = alloc.rho;
        let step = rec.objective - f;
        trace.push(rec);
        if step <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(format!("power-allocation BCD hit {} iterations", opts.max_bcd_iter));
    }
    let mu = zf_mu_update(&rho, basis, model);
    let r = zf_r_update(&rho, basis, model);
    Ok(ZfSolution {
        aux: ZfAuxState { rho, mu, r },
        trace,
        warnings,
    })
}

/// Dinkelbach inner solver over group powers.
pub struct ZfSolver<'a> {
    pub model: &'a LinkModel,
    pub basis: ZfBasis,
    pub options: ZfOptions,
}

impl<'a> ZfSolver<'a> {
    pub fn new(model: &'a LinkModel, options: ZfOptions) -> Result<Self> {
        let reps = select_representatives(model, options.metric);
        let basis = build_zf_basis(model, &reps)?;
        Ok(Self { model, basis, options })
    }
}

impl InnerSolver for ZfSolver<'_> {
    type Point = Vec<f64>;

    fn initial_point(&self) -> Result<Vec<f64>> {
        feasible_power(&self.basis, self.model)
    }

    fn solve(&self, eta: f64, warm: &Vec<f64>) -> Result<InnerSolution<Vec<f64>>> {
        let sol = solve_zf_dinkelbach_subproblem(eta, &self.basis, self.model, warm, &self.options)?;
        Ok(InnerSolution {
            point: sol.aux.rho,
            trace: sol.trace,
            warnings: sol.warnings,
        })
    }

    fn group_rates(&self, rho: &Vec<f64>) -> Vec<f64> {
        zf_r_update(rho, &self.basis, self.model)
            .iter()
            .map(|r| (1.0 + r).log2())
            .collect()
    }

    fn power(&self, rho: &Vec<f64>) -> f64 {
        rho.iter().sum()
    }

    fn beams(&self, rho: &Vec<f64>) -> BeamCoefficients {
        self.basis.assemble(rho)
    }
}
