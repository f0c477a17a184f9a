//! Beamformer representation and performance functionals.
//!
//! A group's current pattern is `J_g(s) = Σ_l a_{g,l} h_l*(s)` over all user
//! channels, so the response of user `k` is `(G a_g)_k` and the radiated
//! power is `a_gᴴ G a_g` with `G` the Gram matrix of the channels.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::channels::{ChannelSet, LinkModel};

/// Relative tolerance used when flagging constraint violations.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Per-group coefficients over the conjugated user channels, plus an
/// optional cached evaluation of every pattern on the sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCoefficients {
    pub coeffs: Vec<DVector<C64>>,
    cache: Option<Vec<Vec<C64>>>,
}

impl BeamCoefficients {
    pub fn new(coeffs: Vec<DVector<C64>>) -> Self {
        Self { coeffs, cache: None }
    }

    pub fn zeros(num_groups: usize, num_users: usize) -> Self {
        Self::new(vec![DVector::zeros(num_users); num_groups])
    }

    pub fn num_groups(&self) -> usize {
        self.coeffs.len()
    }

    /// Multiplies every pattern by `alpha`.
    pub fn scaled(&self, alpha: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * alpha).collect())
    }

    /// Recomputes the cached pattern samples.
    pub fn refresh(&mut self, set: &ChannelSet) {
        self.cache = Some(self.coeffs.iter().map(|c| set.evaluate(c)).collect());
    }

    pub fn with_patterns(mut self, set: &ChannelSet) -> Self {
        self.refresh(set);
        self
    }

    /// Cached samples of `J_g`, if [`refresh`](Self::refresh) has been called.
    pub fn pattern(&self, g: usize) -> Option<&[C64]> {
        self.cache.as_ref().map(|c| c[g].as_slice())
    }

    /// Largest deviation between the cache and a fresh evaluation, relative
    /// to the pattern's peak sample. `None` without a cache.
    pub fn cache_error(&self, set: &ChannelSet) -> Option<f64> {
        let cache = self.cache.as_ref()?;
        let mut worst: f64 = 0.0;
        for (c, cached) in self.coeffs.iter().zip(cache) {
            let fresh = set.evaluate(c);
            let peak = fresh
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            for (a, b) in fresh.iter().zip(cached) {
                worst = worst.max((a - b).norm() / peak);
            }
        }
        Some(worst)
    }
}

/// `R[k, g] = ∫ h_k(s) J_g(s) ds` for every user and group.
#[derive(Debug, Clone)]
pub struct Responses {
    pub matrix: DMatrix<C64>,
}

impl Responses {
    pub fn new(model: &LinkModel, beams: &BeamCoefficients) -> Self {
        let k = model.num_users();
        let mut m = DMatrix::zeros(k, beams.num_groups());
        for (g, a) in beams.coeffs.iter().enumerate() {
            m.set_column(g, &(&model.gram * a));
        }
        Self { matrix: m }
    }

    /// Response of `user` to its own group's pattern.
    pub fn signal(&self, model: &LinkModel, user: usize) -> C64 {
        self.matrix[(user, model.group_of(user))]
    }

    /// `Σ_{i≠g} |∫ h_k J_i|²` for user `k` in group `g`.
    pub fn interference(&self, model: &LinkModel, user: usize) -> f64 {
        let g = model.group_of(user);
        (0..self.matrix.ncols())
            .filter(|i| *i != g)
            .map(|i| self.matrix[(user, i)].norm_sqr())
            .sum()
    }

    /// Interference plus noise.
    pub fn disturbance(&self, model: &LinkModel, user: usize) -> f64 {
        self.interference(model, user) + model.noise[user]
    }

    pub fn sinr(&self, model: &LinkModel, user: usize) -> f64 {
        self.signal(model, user).norm_sqr() / self.disturbance(model, user)
    }

    /// `min_k γ_{g,k}`.
    pub fn min_sinr(&self, model: &LinkModel, g: usize) -> f64 {
        model.groups[g]
            .clone()
            .map(|u| self.sinr(model, u))
            .fold(f64::INFINITY, f64::min)
    }
}

/// SINR of user `user` (global index).
pub fn sinr(beams: &BeamCoefficients, model: &LinkModel, user: usize) -> f64 {
    Responses::new(model, beams).sinr(model, user)
}

/// Multicast spectral efficiency `log2(1 + min_k γ_{g,k})`.
pub fn group_rate(beams: &BeamCoefficients, model: &LinkModel, g: usize) -> f64 {
    (1.0 + Responses::new(model, beams).min_sinr(model, g)).log2()
}

/// `Σ_g a_gᴴ G a_g`.
pub fn total_power(beams: &BeamCoefficients, model: &LinkModel) -> f64 {
    beams
        .coeffs
        .iter()
        .map(|a| (a.adjoint() * &model.gram * a)[(0, 0)].re)
        .sum::<f64>()
        .max(0.0)
}

/// `Σ_g ∫ |J_g(s)|² ds` evaluated on the sample points.
pub fn total_power_sampled(beams: &BeamCoefficients, set: &ChannelSet) -> f64 {
    beams.coeffs.iter().map(|a| set.energy(&set.evaluate(a))).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfReport {
    /// Per-user SINR in global user order.
    pub sinr: Vec<f64>,
    /// Per-group multicast rate, bit/s/Hz.
    pub group_rates: Vec<f64>,
    /// Total radiated power, mA².
    pub power: f64,
    /// `Σ_g R_g / P`; zero when no power is radiated.
    pub energy_efficiency: f64,
    /// Per-group: rate meets its floor.
    pub rate_ok: Vec<bool>,
    pub power_ok: bool,
}

impl PerfReport {
    pub fn sum_rate(&self) -> f64 {
        self.group_rates.iter().sum()
    }

    pub fn feasible(&self) -> bool {
        self.power_ok && self.rate_ok.iter().all(|v| *v)
    }
}

pub fn energy_efficiency(beams: &BeamCoefficients, model: &LinkModel) -> PerfReport {
    let resp = Responses::new(model, beams);
    let sinr: Vec<f64> = (0..model.num_users()).map(|u| resp.sinr(model, u)).collect();
    let group_rates: Vec<f64> = model
        .groups
        .iter()
        .map(|r| (1.0 + r.clone().map(|u| sinr[u]).fold(f64::INFINITY, f64::min)).log2())
        .collect();
    let power = total_power(beams, model);
    let sum: f64 = group_rates.iter().sum();
    let ee = if power > 0.0 { sum / power } else { 0.0 };
    let rate_ok = group_rates
        .iter()
        .zip(&model.rate_floors)
        .map(|(r, f)| *r >= f - FEASIBILITY_TOL * f.max(1.0))
        .collect();
    PerfReport {
        sinr,
        group_rates,
        power,
        energy_efficiency: ee,
        rate_ok,
        power_ok: power <= model.power_budget * (1.0 + FEASIBILITY_TOL),
    }
}
