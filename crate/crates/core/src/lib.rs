//! Energy-efficient multi-group multicast beamforming for continuous-aperture
//! arrays (CAPA), with a discrete half-wavelength array (SPDA) baseline.
//!
//! The pipeline is: build a [`scenario::Scenario`] (users and their sampled
//! line-of-sight channels), reduce it to a [`channels::LinkModel`] (Gram
//! matrix of user channels plus constraints), then run
//! [`dinkelbach::run`] with either the dual-decomposition inner solver
//! ([`cov`]) or the zero-forcing power-allocation solver ([`zf`]).

mod barrier;
pub mod beamform;
pub mod channels;
pub mod cov;
pub mod dinkelbach;
pub mod ellipsoid;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scenario;
pub mod spda;
pub mod zf;

pub use error::{Error, Result};
