//! Numerical `W₀` and `W₁` against the closed forms.
//!
//! ```text
//! cargo run --release --example w0_numeric
//! ```

use std::time::Instant;

use bt_torsion::torsion::{w0_exact, w1_exact};
use bt_torsion::w_evaluator::{calibrate, w0_calibrated, w1_by_weight_shift, WGrids, DEFAULT_STEPS};

fn main() -> bt_torsion::Result<()> {
    let grids = WGrids::default();
    let start = Instant::now();
    let cal = calibrate(&grids)?;
    println!(
        "calibration: raw W0(1,0) = {:.12} {:+.2e}i, constant = {:+}·(2πi)^({}/2)",
        cal.raw.re,
        cal.raw.im,
        cal.sign,
        1 - cal.degree as i32
    );
    println!("\n  a  b   W0 numeric       W0 exact         rel err");
    for (a, b) in [(1, 0), (2, 1), (3, 1), (1, 2), (3, 0), (4, 1)] {
        let v = w0_calibrated(a, b, &grids, &cal)?;
        let exact = w0_exact(a, b)?.to_f64();
        println!("{a:3}{b:3}   {:<16.12} {:<16.12} {:.2e}", v.value, exact, (v.value - exact).abs() / exact);
    }
    println!("\n  a  b  a' b'   W1 shift         W1 exact         rel err");
    for (a, b, ap, bp) in [(1, 0, 0, 0), (2, 1, 0, 0), (1, 0, 2, 0), (3, 1, 1, -1)] {
        // keep a ± h(1 + a') away from b
        let steps = if ap > 0 { [0.1, 0.05] } else { DEFAULT_STEPS };
        let v = w1_by_weight_shift(a, b, ap, bp, &grids, &steps)?;
        let exact = w1_exact(a, b, ap, bp)?.to_f64();
        println!("{a:3}{b:3}{ap:3}{bp:3}   {:<16.12} {:<16.12} {:.2e}", v, exact, (v - exact).abs() / exact);
    }
    println!("\nelapsed {:.1?}", start.elapsed());
    Ok(())
}
