//! Exact large-`p` coefficients of the analytic torsion of twisted bundles.
//!
//! Run with `cargo run --release --example torsion_asymptotics`.

use bt_torsion::torsion::{
    asymptotic_coefficients, consistency_grid, consistency_row, muller_l2, shifted_w0_coefficient, torsion_prediction,
    w0_exact, w1_exact, ManifoldDatum, OrbitDatum,
};

fn main() -> bt_torsion::Result<()> {
    println!("  a  b  a' b'   W0            W1            p³, p², p, 1 coefficients");
    for (a, b, ap, bp) in [(2, 1, 0, 0), (3, 1, 1, -1), (1, 0, 0, 0), (4, 2, -2, 1), (0, 3, 0, 2)] {
        let c = asymptotic_coefficients(a, b, ap, bp)?;
        println!(
            "{a:3}{b:3}{ap:3}{bp:3}   {:<13} {:<13} {}, {}, {}, {}",
            w0_exact(a, b)?.to_string(),
            w1_exact(a, b, ap, bp)?.to_string(),
            c[0],
            c[1],
            c[2],
            c[3]
        );
        println!("               shifted-W0 derivative {}", shifted_w0_coefficient(a, b, ap, bp)?);
    }

    println!("\nMüller polynomial at (5, 2): {}", muller_l2(5, 2)?);
    let mfd = ManifoldDatum::new(0.9427)?;
    let d = OrbitDatum::new(2, 1, 0, 0);
    for p in [10, 100, 1000] {
        println!("prediction p = {p:4}: {:.6e}", torsion_prediction(p, &d, &mfd)?);
    }

    let grid = consistency_grid(6);
    let consistent = grid.iter().map(consistency_row).filter(|r| r.as_ref().is_ok_and(|r| r.consistent)).count();
    println!("\nconsistent: {consistent} of {}", grid.len());
    Ok(())
}
