//! A local hidden-variable model tested against all three bounds. It must
//! never violate any of them.
//!
//! ```bash
//! cargo run --example local_model
//! ```

use leggett_povm::geometry::default_settings;
use leggett_povm::inequalities::{chsh_with, leggett_sum_with, BellSettings};
use leggett_povm::lhv::LocalSignModel;
use leggett_povm::povm::MeasurementParams;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> leggett_povm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let p = MeasurementParams::unbiased(0.98)?;
    let mut worst_chsh = f64::NEG_INFINITY;
    let mut worst_leggett = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let model = LocalSignModel::random(p, p, 8, &mut rng);
        let r = chsh_with(&BellSettings::tsirelson(), &p, &p, |a, b| model.correlation(a, b));
        worst_chsh = worst_chsh.max(r.margin);
        let s = default_settings(0.656)?;
        let l = leggett_sum_with(&s, p.alpha(), |a, b| model.correlation(a, b))?;
        worst_leggett = worst_leggett.max(l.margin);
    }
    println!("largest CHSH margin {worst_chsh:+.4}, largest Leggett margin {worst_leggett:+.4} (both must be <= 0)");
    Ok(())
}
