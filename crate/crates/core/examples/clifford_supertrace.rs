//! Supertraces of Clifford words and the Berezin integral they match.
//!
//! Run with `cargo run --release --example clifford_supertrace`.

use bt_torsion::exterior::{anticommutator_violations, bridge_sides, supertrace, CliffordWord, Exact, Scale};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bt_torsion::Result<()> {
    let unit = Scale::<Exact>::unit();
    for m in 1..=3 {
        println!("m = {m}: anticommutator violations {}", anticommutator_violations(m, &unit)?);
    }
    println!("\nsupertrace of the full word c₁ĉ₁…c_mĉ_m:");
    for m in 1..=6 {
        println!("  m = {m}: {}", supertrace(&CliffordWord::full(m).operator(&unit)?)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = Scale::<Exact>::exact_integer(2)?;
    println!("\nrandom words at s = 2, supertrace vs. Berezin side:");
    let top = (1u32 << 2) - 1;
    for k in 0..8 {
        let w = if k % 2 == 0 { CliffordWord::random(2, &mut rng) } else { CliffordWord::random_full(2, &mut rng) };
        let (lhs, rhs) = bridge_sides(&w, &s)?;
        println!("  {:<24} {:>6}  {:>6}", w.to_string(), lhs.get(top).to_string(), rhs.get(top).to_string());
    }
    Ok(())
}
