//! Aperture geometry, free-space dyadic Green's function and the scalar
//! line-of-sight channel between a y-polarized planar source and a
//! uni-polarized point receiver.
//!
//! Every continuous quantity on the aperture is represented by its samples on
//! one tensor-product Gauss–Legendre grid, so surface integrals become
//! weighted sums over [`ApertureGrid`] nodes.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub type Point3 = Vector3<f64>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Distances below this are treated as coincident points.
pub const MIN_DISTANCE: f64 = 1e-9;

/// Polarization of the source current (y axis).
pub fn source_polarization() -> Vector3<f64> {
    Vector3::new(0.0, 1.0, 0.0)
}

/// Planar rectangular aperture centered at the origin with normal along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    pub len_x: f64,
    pub len_y: f64,
}

impl Aperture {
    pub fn new(len_x: f64, len_y: f64) -> Result<Self> {
        if !(len_x > 0.0 && len_y > 0.0) || !len_x.is_finite() || !len_y.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "aperture side lengths must be positive, got {len_x} x {len_y}"
            )));
        }
        Ok(Self { len_x, len_y })
    }

    /// Square aperture of the given area.
    pub fn square(area: f64) -> Result<Self> {
        let side = area.sqrt();
        Self::new(side, side)
    }

    pub fn area(&self) -> f64 {
        self.len_x * self.len_y
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.x.abs() <= 0.5 * self.len_x && p.y.abs() <= 0.5 * self.len_y && p.z == 0.0
    }
}

impl Default for Aperture {
    fn default() -> Self {
        Self { len_x: 0.5, len_y: 0.5 }
    }
}

/// Tensor-product Gauss–Legendre grid over an [`Aperture`].
///
/// Node `n = ix * M + iy` sits at `(x[ix], y[iy], 0)` with weight
/// `wx[ix] * wy[iy]` (m²).
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureGrid {
    pub aperture: Aperture,
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
    pub order_per_axis: usize,
}

impl ApertureGrid {
    pub fn new(aperture: Aperture, order_per_axis: usize) -> Result<Self> {
        if order_per_axis == 0 {
            return Err(Error::InvalidConfig("grid order must be at least 1".into()));
        }
        let rule = GaussLegendre::new(order_per_axis);
        let (xs, wxs) = rule.scaled(-0.5 * aperture.len_x, 0.5 * aperture.len_x);
        let (ys, wys) = rule.scaled(-0.5 * aperture.len_y, 0.5 * aperture.len_y);
        let mut nodes = Vec::with_capacity(order_per_axis * order_per_axis);
        let mut weights = Vec::with_capacity(order_per_axis * order_per_axis);
        for (x, wx) in xs.iter().zip(&wxs) {
            for (y, wy) in ys.iter().zip(&wys) {
                nodes.push(Point3::new(*x, *y, 0.0));
                weights.push(wx * wy);
            }
        }
        Ok(Self {
            aperture,
            nodes,
            weights,
            order_per_axis,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node mirrored through the `x = 0` plane.
    pub fn mirror_x(&self, n: usize) -> usize {
        let m = self.order_per_axis;
        let (ix, iy) = (n / m, n % m);
        (m - 1 - ix) * m + iy
    }

    /// Tabulates `f` on the nodes.
    pub fn sample<F: Fn(&Point3) -> C64>(&self, f: F) -> Vec<C64> {
        self.nodes.iter().map(f).collect()
    }
}

/// Narrowband radio parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radio {
    /// Wavelength in meters.
    pub wavelength: f64,
    /// Free-space intrinsic impedance in ohms.
    pub impedance: f64,
}

impl Radio {
    pub fn new(wavelength: f64, impedance: f64) -> Result<Self> {
        if !(wavelength > 0.0 && impedance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "wavelength and impedance must be positive, got {wavelength}, {impedance}"
            )));
        }
        Ok(Self { wavelength, impedance })
    }

    pub fn from_frequency(hz: f64) -> Result<Self> {
        Self::new(SPEED_OF_LIGHT / hz, 120.0 * PI)
    }

    pub fn angular_wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

impl Default for Radio {
    /// 2.4 GHz carrier in free space.
    fn default() -> Self {
        Self {
            wavelength: SPEED_OF_LIGHT / 2.4e9,
            impedance: 120.0 * PI,
        }
    }
}

/// Receiver position and polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserGeometry {
    pub position: Point3,
    pub polarization: Vector3<f64>,
}

impl UserGeometry {
    pub fn new(position: Point3, polarization: Vector3<f64>) -> Result<Self> {
        if (polarization.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "polarization must be a unit vector, norm is {}",
                polarization.norm()
            )));
        }
        if !(position.z > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "user must be in front of the aperture (z > 0), got z = {}",
                position.z
            )));
        }
        Ok(Self { position, polarization })
    }

    /// User with the same polarization as the source.
    pub fn co_polarized(position: Point3) -> Result<Self> {
        Self::new(position, source_polarization())
    }
}

/// Complex scalar prefactor `-j η e^{-j k d} / (2 λ d)` of the Green's function.
fn green_prefactor(distance: f64, radio: &Radio) -> C64 {
    let k = radio.angular_wavenumber();
    let amp = radio.impedance / (2.0 * radio.wavelength * distance);
    // -j * e^{-j k d} = e^{-j (k d + π/2)}
    C64::from_polar(amp, -(k * distance + 0.5 * PI))
}

fn separation(r: &Point3, s: &Point3) -> Result<(Vector3<f64>, f64)> {
    let d = r - s;
    let dist = d.norm();
    if !(dist >= MIN_DISTANCE) {
        return Err(Error::DegenerateDistance { distance: dist });
    }
    Ok((d, dist))
}

/// Free-space dyadic Green's function `G(r, s)` for a source at `s` and a
/// field point `r`.
pub fn green_dyadic(r: &Point3, s: &Point3, radio: &Radio) -> Result<Matrix3<C64>> {
    let (d, dist) = separation(r, s)?;
    let projector = Matrix3::identity() - d * d.transpose() / (dist * dist);
    let pre = green_prefactor(dist, radio);
    Ok(projector.map(|v| pre * v))
}

/// Continuous channel `h(s) = ûᵀ G(r, s) û_y` from aperture point `s` to the user.
pub fn channel_scalar(user: &UserGeometry, s: &Point3, radio: &Radio) -> Result<C64> {
    let (d, dist) = separation(&user.position, s)?;
    let u = &user.polarization;
    // ûᵀ (I - d dᵀ/|d|²) ŷ = u_y - (u·d) d_y / |d|²
    let proj = u.y - u.dot(&d) * d.y / (dist * dist);
    Ok(green_prefactor(dist, radio) * proj)
}

/// One user's channel tabulated on grid nodes.
///
/// `group`, `index` and `noise_variance` are metadata assigned by the
/// scenario; [`sample_channel`] leaves them zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub values: Vec<C64>,
    pub group: usize,
    pub index: usize,
    pub noise_variance: f64,
}

pub fn sample_channel(user: &UserGeometry, grid: &ApertureGrid, radio: &Radio) -> Result<ChannelSample> {
    let values = grid
        .nodes
        .iter()
        .map(|s| channel_scalar(user, s, radio))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSample {
        values,
        group: 0,
        index: 0,
        noise_variance: 0.0,
    })
}

/// `Σ_n w_n a_n conj(b_n)`.
pub fn weighted_inner(a: &[C64], b: &[C64], weights: &[f64]) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: weights.len(),
        });
    }
    Ok(a.iter().zip(b).zip(weights).map(|((x, y), w)| x * y.conj() * *w).sum())
}

/// Surface inner product `⟨a, b⟩ = ∫ a(s) b*(s) ds` by quadrature.
pub fn inner_product(a: &[C64], b: &[C64], grid: &ApertureGrid) -> Result<C64> {
    weighted_inner(a, b, &grid.weights)
}
