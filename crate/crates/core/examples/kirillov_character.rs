//! SU(2) characters against `j^{-1/2}` times the orbit integral.
//!
//! Run with `cargo run --release --example kirillov_character`.

use bt_torsion::dh_orbit::DhQuadrature;
use bt_torsion::lie_su2::{character, irrep_dimension, j_factor, kirillov_residual, HighestWeight};

fn main() -> bt_torsion::Result<()> {
    let dh = DhQuadrature::default();
    println!("  a  dim   χ(t = 1.3)        j(1.3)^(-1/2)·DH     max residual on (0, 3]");
    for a in 0..=10 {
        let w = HighestWeight::new(a);
        let t = 1.3;
        let orbit = dh.evaluate(w.shifted_mass(), t)?.value;
        let worst = (1..=60)
            .map(|k| kirillov_residual(w, 0.05 * k as f64, &dh))
            .collect::<bt_torsion::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!(
            "{a:3}{:5}   {:<+16.12}  {:<+16.12}   {worst:.2e}",
            irrep_dimension(w),
            character(w, t).re,
            orbit.re / j_factor(t).sqrt(),
        );
    }
    Ok(())
}
