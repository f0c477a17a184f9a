#![allow(dead_code)]

use capa_core::beamform::BeamCoefficients;
use capa_core::channels::LinkModel;
use capa_core::scenario::{generate, Scenario, ScenarioConfig};
use capa_core::spda::{build_array, spda_link_model};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Capa,
    Spda,
}

pub const BACKENDS: [Backend; 2] = [Backend::Capa, Backend::Spda];

pub fn scenario(seed: u64, g: usize, k: usize, floor: f64, grid: usize) -> Scenario {
    generate(&ScenarioConfig {
        rng_seed: seed,
        grid_order: grid,
        ..ScenarioConfig::with_groups(g, k, floor)
    })
    .unwrap()
}

pub fn model_on(backend: Backend, s: &Scenario) -> LinkModel {
    match backend {
        Backend::Capa => s.link_model().unwrap(),
        Backend::Spda => {
            let a = build_array(s.config.aperture, &s.config.radio).unwrap();
            spda_link_model(&a, s).unwrap()
        }
    }
}

pub fn model(seed: u64, g: usize, k: usize, floor: f64) -> LinkModel {
    scenario(seed, g, k, floor, 12).link_model().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_beams(rng: &mut ChaCha8Rng, g: usize, k: usize, scale: f64) -> BeamCoefficients {
    BeamCoefficients::new(
        (0..g)
            .map(|_| DVector::from_fn(k, |_, _| complex(rng) * scale))
            .collect(),
    )
}

/// Golden-section search for the maximizer of a unimodal function on
/// `[lo, hi]`. `diff(a, b)` returns `f(a) − f(b)`, so callers can supply
/// a cancellation-free form and the bracket shrinks to rounding level.
pub fn golden_argmax(mut lo: f64, mut hi: f64, diff: impl Fn(f64, f64) -> f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    for _ in 0..400 {
        if diff(a, b) < 0.0 {
            lo = a;
            a = b;
            b = lo + phi * (hi - lo);
        } else {
            hi = b;
            b = a;
            a = hi - phi * (hi - lo);
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}
