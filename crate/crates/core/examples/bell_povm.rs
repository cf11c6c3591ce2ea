//! CH and CHSH bounds with unsharp measurements on the singlet.
//!
//! Any nonzero `α_a α_b` violates CHSH at the Tsirelson settings: both the
//! quantum value and the local bound scale with `|α_a α_b|`.
//!
//! ```bash
//! cargo run --example bell_povm
//! ```

use leggett_povm::correlations::{correlation_singlet, joint_prob_singlet};
use leggett_povm::inequalities::{ch_povm_lhs, chsh_with, BellSettings, ChInputs};
use leggett_povm::povm::{MeasurementParams, Outcome};

fn main() -> leggett_povm::Result<()> {
    let s = BellSettings::tsirelson();
    for alpha in [1.0, 0.98, 0.75, 0.39, 0.05] {
        let p = MeasurementParams::unbiased(alpha)?;
        let r = chsh_with(&s, &p, &p, |a, b| correlation_singlet(&p, a, &p, b));
        println!("CHSH alpha={alpha:<5} lhs={:.6} bound={:.6} violated={}", r.lhs, r.bound, r.violated);
    }

    let pa = MeasurementParams::new(0.1, 0.9)?;
    let pb = MeasurementParams::unbiased(0.9)?;
    let tables = s.pairs().map(|(a, b)| joint_prob_singlet(&pa, &a, &pb, &b));
    for j in Outcome::BOTH {
        for k in Outcome::BOTH {
            let inputs = ChInputs {
                joint: tables.map(|t| t.get(j, k)),
                marginal_a_prime: tables[2].marginal_a(j),
                marginal_b: tables[0].marginal_b(k),
            };
            let r = ch_povm_lhs(&inputs, &pa, &pb, j, k)?;
            println!("CH (j,k)=({:+},{:+}) lhs={:+.6} violated={}", j.sign(), k.sign(), r.lhs, r.violated);
        }
    }
    Ok(())
}
