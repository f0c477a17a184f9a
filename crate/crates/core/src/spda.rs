//! Discrete antenna array on the same aperture, for comparison.
//!
//! Element `(n_x, n_y)` sits at `((n_x−1)d − L_x/2, (n_y−1)d − L_y/2, 0)`
//! and its channel is the continuous channel at that point scaled by the
//! square root of the effective area `λ²/4π`. The resulting [`ChannelSet`]
//! uses unit weights, so every optimizer runs unchanged on it.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::beamform::BeamCoefficients;
use crate::channels::{Backend, ChannelSet, LinkModel};
use crate::cov::{solve_dinkelbach_subproblem, zf_warm_start, CovOptions, CovSolution};
use crate::error::{Error, Result};
use crate::geometry::{channel_scalar, Aperture, Point3, Radio};
use crate::scenario::Scenario;
use crate::zf::{
    build_zf_basis, select_representatives, solve_zf_dinkelbach_subproblem, uniform_power, ZfBasis, ZfOptions,
    ZfSolution,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SpdaArray {
    pub aperture: Aperture,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major: element `ix * ny + iy`.
    pub positions: Vec<Point3>,
    pub element_area: f64,
}

fn count(len: f64, d: f64) -> usize {
    ((len / d - 1e-9).ceil() as usize).max(1)
}

/// Half-wavelength array.
pub fn build_array(aperture: Aperture, radio: &Radio) -> Result<SpdaArray> {
    SpdaArray::with_spacing(aperture, radio, 0.5 * radio.wavelength)
}

impl SpdaArray {
    pub fn with_spacing(aperture: Aperture, radio: &Radio, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidConfig("antenna spacing must be positive".into()));
        }
        let nx = count(aperture.len_x, spacing);
        let ny = count(aperture.len_y, spacing);
        let mut positions = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            for iy in 0..ny {
                positions.push(Point3::new(
                    ix as f64 * spacing - 0.5 * aperture.len_x,
                    iy as f64 * spacing - 0.5 * aperture.len_y,
                    0.0,
                ));
            }
        }
        Ok(Self {
            aperture,
            spacing,
            nx,
            ny,
            positions,
            element_area: radio.wavelength * radio.wavelength / (4.0 * PI),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Area of each element's Voronoi cell clipped to the aperture.
    pub fn voronoi_areas(&self) -> Vec<f64> {
        let wx = cell_widths(self.nx, self.spacing, self.aperture.len_x);
        let wy = cell_widths(self.ny, self.spacing, self.aperture.len_y);
        wx.iter().flat_map(|a| wy.iter().map(move |b| a * b)).collect()
    }
}

fn cell_widths(n: usize, d: f64, len: f64) -> Vec<f64> {
    let pos: Vec<f64> = (0..n).map(|i| i as f64 * d - 0.5 * len).collect();
    (0..n)
        .map(|i| {
            let lo = if i == 0 {
                -0.5 * len
            } else {
                0.5 * (pos[i - 1] + pos[i])
            };
            let hi = if i + 1 == n {
                0.5 * len
            } else {
                0.5 * (pos[i] + pos[i + 1])
            };
            hi - lo
        })
        .collect()
}

fn sample(array: &SpdaArray, scenario: &Scenario, scale: f64) -> Result<Vec<Vec<C64>>> {
    scenario
        .users
        .iter()
        .map(|u| {
            array
                .positions
                .iter()
                .map(|s| channel_scalar(&u.geometry, s, &scenario.config.radio).map(|h| h * scale))
                .collect()
        })
        .collect()
}

/// Per-user antenna channel vectors with effective-area scaling.
pub fn spda_channels(array: &SpdaArray, scenario: &Scenario) -> Result<ChannelSet> {
    let samples = sample(array, scenario, array.element_area.sqrt())?;
    ChannelSet::new(Backend::Discrete, samples, vec![1.0; array.len()])
}

/// Raw channels at the element positions weighted by Voronoi areas: a
/// Riemann-sum approximation of the continuous inner product.
pub fn voronoi_channels(array: &SpdaArray, scenario: &Scenario) -> Result<ChannelSet> {
    let samples = sample(array, scenario, 1.0)?;
    ChannelSet::new(Backend::Discrete, samples, array.voronoi_areas())
}

pub fn spda_link_model(array: &SpdaArray, scenario: &Scenario) -> Result<LinkModel> {
    scenario.link_model_with(spda_channels(array, scenario)?.gram())
}

/// Per-group antenna weight vectors `w_g[n] = Σ_l a_{g,l} conj(h_l[n])`.
pub fn antenna_weights(beams: &BeamCoefficients, channels: &ChannelSet) -> Vec<DVector<C64>> {
    beams
        .coeffs
        .iter()
        .map(|a| DVector::from_vec(channels.evaluate(a)))
        .collect()
}

/// Dual-decomposition subproblem on the discrete model, warm-started from
/// uniform-power zero forcing.
pub fn spda_optimize_cov(model: &LinkModel, eta: f64, opts: &CovOptions) -> Result<CovSolution> {
    let warm = zf_warm_start(model, opts.metric)?;
    solve_dinkelbach_subproblem(eta, model, &warm, opts)
}

/// Zero-forcing subproblem on the discrete model from uniform power.
pub fn spda_optimize_zf(model: &LinkModel, eta: f64, opts: &ZfOptions) -> Result<(ZfBasis, ZfSolution)> {
    let basis = build_zf_basis(model, &select_representatives(model, opts.metric))?;
    let sol = solve_zf_dinkelbach_subproblem(eta, &basis, model, &uniform_power(model), opts)?;
    Ok((basis, sol))
}
