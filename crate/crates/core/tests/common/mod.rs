#![allow(dead_code)]

use leggett_povm::geometry::{build_settings, TripleSettings};
use leggett_povm::povm::MeasurementParams;
use leggett_povm::Direction;
use nalgebra::Vector3;
use rand::Rng;

/// Random right-handed orthonormal triple.
pub fn random_frame(rng: &mut impl Rng) -> [Direction; 3] {
    let u = Direction::random(rng).to_vector();
    let r = Direction::random(rng).to_vector();
    let v = (r - u * u.dot(&r)).normalize();
    let w: Vector3<f64> = u.cross(&v);
    [u, v, w].map(|x| Direction::from_vector(&x).unwrap())
}

/// Standard settings at `phi` in a randomly rotated frame.
pub fn random_settings(phi: f64, rng: &mut impl Rng) -> TripleSettings {
    let [x, y, z] = random_frame(rng);
    build_settings(phi, [z, x, y], [x, y, z]).unwrap()
}

pub fn random_params(rng: &mut impl Rng) -> MeasurementParams {
    let eta: f64 = rng.random_range(-1.0..=1.0);
    let room = 1.0 - eta.abs();
    MeasurementParams::new(eta, rng.random_range(-room..=room)).unwrap()
}

/// Parameters on the 2⁻⁸ grid.
pub fn dyadic_params(rng: &mut impl Rng) -> MeasurementParams {
    let e: i32 = rng.random_range(-128..=128);
    let room = 256 - e.abs();
    let a: i32 = rng.random_range(-room..=room);
    MeasurementParams::new(e as f64 / 256.0, a as f64 / 256.0).unwrap()
}
