//! Triple-measurement settings: build, validate, flip, save and reload.
//!
//! ```bash
//! cargo run --example settings_geometry
//! ```

use leggett_povm::geometry::{default_settings, TripleSettings};

fn main() -> leggett_povm::Result<()> {
    let s = default_settings(40f64.to_radians())?;
    for i in 0..3 {
        let (b, bp) = (s.b()[i], s.b_prime()[i]);
        println!(
            "a{}={:?}\n  b ={:?}\n  b'={:?}\n  angle(a,b) = {:.4} rad",
            i + 1,
            s.a()[i],
            b,
            bp,
            s.a()[i].angle_to(&b)
        );
    }
    println!("valid: {}", s.is_valid());

    let flipped = s.flip_b_prime();
    println!("flipped pair angle = {:.4} rad, valid: {}", flipped.pair_angle(), flipped.is_valid());
    assert_eq!(flipped.flip_b_prime(), s);

    // Settings files are plain `key value` text.
    let text = s.to_config();
    println!("--- config ---\n{text}");
    let back: TripleSettings = text.parse()?;
    assert!(back.is_valid());
    Ok(())
}
