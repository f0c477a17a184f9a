//! Inner-product backends and the reduced link model shared by every
//! optimizer.
//!
//! A [`ChannelSet`] holds each user's channel as a sampled function together
//! with the weights of the inner product: quadrature weights on a continuous
//! aperture, unit weights for a discrete antenna array. Beamformers are kept
//! as coefficients over the conjugated user channels, so once the Gram matrix
//! is known the algorithms never touch the samples again. [`LinkModel`]
//! carries that Gram matrix plus the group layout, noise, budget and floors.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::weighted_inner;

/// Which physical model produced a [`ChannelSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Continuous aperture, quadrature inner product.
    Continuous,
    /// Discrete antenna array, Euclidean inner product.
    Discrete,
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::Continuous => "capa",
            Backend::Discrete => "spda",
        }
    }
}

/// User channels in global user order, all sampled on one set of points.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub backend: Backend,
    pub samples: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

impl ChannelSet {
    pub fn new(backend: Backend, samples: Vec<Vec<C64>>, weights: Vec<f64>) -> Result<Self> {
        for s in &samples {
            if s.len() != weights.len() {
                return Err(Error::LengthMismatch {
                    left: s.len(),
                    right: weights.len(),
                });
            }
        }
        Ok(Self {
            backend,
            samples,
            weights,
        })
    }

    pub fn num_users(&self) -> usize {
        self.samples.len()
    }

    /// Number of sample points (grid nodes or antennas).
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> Result<C64> {
        weighted_inner(a, b, &self.weights)
    }

    /// `∫ a(s) b(s) ds` without conjugation, i.e. the response of a receiver
    /// with channel `a` to a current `b`.
    pub fn response(&self, a: &[C64], b: &[C64]) -> Result<C64> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(a.iter().zip(b).zip(&self.weights).map(|((x, y), w)| x * y * *w).sum())
    }

    /// `[G]_{k,l} = ⟨h_k, h_l⟩`, Hermitian.
    pub fn gram(&self) -> DMatrix<C64> {
        let k = self.num_users();
        let mut g = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = weighted_inner(&self.samples[i], &self.samples[j], &self.weights)
                    .expect("samples validated at construction");
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
            g[(i, i)] = C64::new(g[(i, i)].re, 0.0);
        }
        g
    }

    /// Samples of `Σ_l a_l conj(h_l(s))`.
    pub fn evaluate(&self, coeffs: &DVector<C64>) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (a, h) in coeffs.iter().zip(&self.samples) {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, hv) in out.iter_mut().zip(h) {
                *o += a * hv.conj();
            }
        }
        out
    }

    /// `∫ |f(s)|² ds`.
    pub fn energy(&self, f: &[C64]) -> f64 {
        f.iter().zip(&self.weights).map(|(v, w)| v.norm_sqr() * w).sum()
    }
}

/// Everything the optimizers need: Gram matrix of user channels, group
/// layout, per-user noise, power budget and per-group rate floors.
#[derive(Debug, Clone)]
pub struct LinkModel {
    pub gram: DMatrix<C64>,
    pub groups: Vec<Range<usize>>,
    pub noise: Vec<f64>,
    pub power_budget: f64,
    /// Minimum group spectral efficiency in bit/s/Hz.
    pub rate_floors: Vec<f64>,
}

impl LinkModel {
    pub fn new(
        gram: DMatrix<C64>,
        groups: Vec<Range<usize>>,
        noise: Vec<f64>,
        power_budget: f64,
        rate_floors: Vec<f64>,
    ) -> Result<Self> {
        let k = gram.nrows();
        if gram.ncols() != k {
            return Err(Error::InvalidConfig("Gram matrix must be square".into()));
        }
        if groups.is_empty() {
            return Err(Error::InvalidConfig("at least one group required".into()));
        }
        let mut next = 0;
        for r in &groups {
            if r.start != next || r.is_empty() {
                return Err(Error::InvalidConfig(
                    "groups must be nonempty consecutive user ranges".into(),
                ));
            }
            next = r.end;
        }
        if next != k || noise.len() != k {
            return Err(Error::InvalidConfig(format!(
                "group layout covers {next} users, noise has {}, Gram has {k}",
                noise.len()
            )));
        }
        if rate_floors.len() != groups.len() {
            return Err(Error::InvalidConfig("one rate floor per group required".into()));
        }
        if !(power_budget > 0.0) {
            return Err(Error::InvalidConfig("power budget must be positive".into()));
        }
        if noise.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidConfig("noise variances must be positive".into()));
        }
        if rate_floors.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidConfig("rate floors must be nonnegative".into()));
        }
        Ok(Self {
            gram,
            groups,
            noise,
            power_budget,
            rate_floors,
        })
    }

    pub fn num_users(&self) -> usize {
        self.gram.nrows()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_of(&self, user: usize) -> usize {
        self.groups
            .iter()
            .position(|r| r.contains(&user))
            .expect("user index out of range")
    }

    /// Users outside group `g`, ascending.
    pub fn others(&self, g: usize) -> Vec<usize> {
        (0..self.num_users()).filter(|u| !self.groups[g].contains(u)).collect()
    }

    /// SINR threshold `2^{R̄_g} - 1`.
    pub fn sinr_floor(&self, g: usize) -> f64 {
        self.rate_floors[g].exp2() - 1.0
    }

    pub fn with_rate_floors(mut self, floors: Vec<f64>) -> Result<Self> {
        if floors.len() != self.num_groups() || floors.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidConfig("one nonnegative floor per group required".into()));
        }
        self.rate_floors = floors;
        Ok(self)
    }
}
