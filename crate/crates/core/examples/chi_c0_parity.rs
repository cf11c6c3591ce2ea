//! χ_c0 pairs: triplet `m = 0` correlations turned into singlet form by a
//! parity flip of the A-side settings.
//!
//! ```bash
//! cargo run --example chi_c0_parity
//! ```

use leggett_povm::catalog::{channel_correlation, Catalog};
use leggett_povm::correlations::parity_flip_z;
use leggett_povm::geometry::default_settings;
use leggett_povm::inequalities::{leggett_sum_with, optimal_phi};
use leggett_povm::Direction;

fn main() -> leggett_povm::Result<()> {
    let catalog = Catalog::builtin();
    let eta = catalog.resolve("eta_c:SigmaPlus")?;
    let chi = catalog.resolve("chi_c0:SigmaPlus")?;

    let a = Direction::normalize(0.3, -0.4, 0.87)?;
    let b = Direction::normalize(-0.2, 0.5, 0.6)?;
    let raw = chi.mode_a().alpha() * chi.mode_b().alpha() * parity_flip_z(&a).dot(&b);
    println!("chi_c0 E(a,b) unflipped = {raw:+.6}");
    println!("chi_c0 E(P_z a,b)       = {:+.6}", channel_correlation(&chi, &a, &b));
    println!("eta_c  E(a,b)           = {:+.6}", channel_correlation(&eta, &a, &b));

    let s = default_settings(optimal_phi(eta.alpha_a(), eta.alpha_b()))?;
    let x = leggett_sum_with(&s, eta.alpha_b(), |a, b| channel_correlation(&eta, a, b))?;
    let y = leggett_sum_with(&s, chi.alpha_b(), |a, b| channel_correlation(&chi, a, b))?;
    println!("Leggett LHS: eta_c {:.12}  chi_c0 {:.12}", x.lhs, y.lhs);
    Ok(())
}
