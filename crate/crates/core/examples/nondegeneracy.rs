//! Where the twisted Laplacian has a spectral gap: `a ≠ b`.
//!
//! Run with `cargo run --release --example nondegeneracy`.

use bt_torsion::torsion::{nondegeneracy_min, nondegenerate};

fn main() -> bt_torsion::Result<()> {
    println!("sampled min over the orbit, grid order 32");
    print!("a\\b");
    for b in 0..=5 {
        print!("{b:>11}");
    }
    println!();
    for a in 0..=5 {
        print!("{a:3}");
        for b in 0..=5 {
            let m = nondegeneracy_min(a, b, 32)?;
            let mark = if nondegenerate(a, b) { ' ' } else { '*' };
            print!("  {m:8.2e}{mark}");
        }
        println!();
    }
    println!("\n* degenerate weights");
    Ok(())
}
