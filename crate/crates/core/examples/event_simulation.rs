//! Generate Σ⁺Σ̄⁻ pairs from η_c, estimate correlations and the Leggett LHS,
//! and round-trip the event file.
//!
//! ```bash
//! cargo run --release --example event_simulation
//! ```

use leggett_povm::analysis::ModelParams;
use leggett_povm::catalog::Catalog;
use leggett_povm::geometry::default_settings;
use leggett_povm::inequalities::{max_leggett_lhs, optimal_phi};
use leggett_povm::simulation::{
    estimate_correlation, estimate_correlation_hemisphere, estimate_leggett_lhs, read_events, sample_pair_decay,
    write_events,
};
use leggett_povm::Direction;

fn main() -> leggett_povm::Result<()> {
    let catalog = Catalog::builtin();
    let channel = catalog.resolve("SigmaPlus")?;
    let model = ModelParams::from_channel(channel.clone());
    let sample = sample_pair_decay(&channel, 1_000_000, 2024)?.with_catalog_hash(catalog.sha256());

    println!("9<n_A n_B^T> =\n{:.4}", sample.moment_matrix());
    let z = Direction::Z;
    let m = estimate_correlation(&sample, &z, &z)?;
    let h = estimate_correlation_hemisphere(&sample, &z, &z)?;
    println!(
        "E(z,z): moment {:.4} +- {:.4}, hemisphere {:.4} +- {:.4}, exact {:.4}",
        m.e_hat,
        m.std_error,
        h.e_hat,
        h.std_error,
        model.correlation(&z, &z)
    );

    let (aa, ab) = (channel.alpha_a(), channel.alpha_b());
    let settings = default_settings(optimal_phi(aa, ab))?;
    let est = estimate_leggett_lhs(&sample, &settings, ab)?;
    println!(
        "Leggett LHS {:.4} +- {:.4} ({:?}); closed form {:.4}; bound 2",
        est.lhs_hat,
        est.std_error,
        est.error_method,
        max_leggett_lhs(aa, ab)
    );

    let path = std::env::temp_dir().join("leggett_example_events.bin");
    write_events(&path, &sample)?;
    assert_eq!(read_events(&path)?, sample);
    println!("wrote and re-read {} events at {}", sample.n_events(), path.display());
    std::fs::remove_file(path)?;
    Ok(())
}
