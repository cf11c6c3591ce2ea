//! Leggett-type LHS against the opening angle for each catalog channel,
//! plus the symmetric threshold on `|α|`.
//!
//! ```bash
//! cargo run --example leggett_scan
//! ```

use std::f64::consts::PI;

use leggett_povm::analysis::{scan_phi, ModelParams};
use leggett_povm::catalog::Catalog;
use leggett_povm::inequalities::{max_leggett_lhs, optimal_phi, symmetric_alpha_threshold};

fn main() -> leggett_povm::Result<()> {
    println!("violation needs |alpha| > {:.6} when both sides agree", symmetric_alpha_threshold());
    let catalog = Catalog::builtin();
    for name in ["SigmaPlus", "Lambda", "XiMinus"] {
        let model = ModelParams::from_channel(catalog.resolve(name)?);
        let scan = scan_phi(&model, PI / 1000.0, PI, 1000)?;
        let (aa, ab) = (model.pa.alpha(), model.pb.alpha());
        println!(
            "{:<40} grid max {:.6}  closed-form max {:.6} at phi = {:.2} deg  violated points {}",
            model.channel.label(),
            scan.max_lhs(),
            max_leggett_lhs(aa, ab),
            optimal_phi(aa, ab).to_degrees(),
            scan.violated.iter().filter(|&&v| v).count()
        );
    }
    Ok(())
}
