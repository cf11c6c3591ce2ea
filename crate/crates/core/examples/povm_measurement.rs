//! Biased/unsharp POVM elements and the hyperon decay as a spin measurement.
//!
//! ```bash
//! cargo run --example povm_measurement
//! ```

use leggett_povm::povm::{
    decay_effect, mean_polarization, outcome_probability, povm_element, DecayAmplitudes, MeasurementParams, Outcome,
};
use leggett_povm::quantum::{spin_state, Direction};

fn main() -> leggett_povm::Result<()> {
    let p = MeasurementParams::new(0.2, 0.5)?;
    let z = Direction::Z;
    let m = povm_element(&p, &z, Outcome::Plus);
    println!("M+(z) for eta=0.2, alpha=0.5: diag = ({:.3}, {:.3})", m[(0, 0)].re, m[(1, 1)].re);

    // Spin along u, measured along a: mean outcome eta + alpha u.a.
    let u = Direction::from_spherical(0.7, 0.3);
    let a = Direction::normalize(1.0, 0.0, 1.0)?;
    let rho = spin_state(&u);
    let p_plus = outcome_probability(&rho, &p, &a, Outcome::Plus)?;
    println!(
        "P+ = {p_plus:.6}, mean = {:.6} (eta + alpha u.a = {:.6})",
        2.0 * p_plus - 1.0,
        mean_polarization(&u, &p, &a)
    );

    // A two-body weak decay with S and P waves is the same kind of measurement.
    let amps = DecayAmplitudes::real(1.0, 0.8187)?;
    println!("S=1, P=0.8187 -> alpha = {:.6}", amps.alpha());
    let e = decay_effect(&amps, &z, Outcome::Plus);
    let povm = povm_element(&amps.measurement(), &z, Outcome::Plus);
    println!("max |Kraus effect - POVM element| = {:.2e}", (e - povm).iter().map(|c| c.norm()).fold(0.0, f64::max));
    Ok(())
}
