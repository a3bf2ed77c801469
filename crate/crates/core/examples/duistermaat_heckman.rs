//! Stationary-phase exactness on sphere orbits of growing radius.
//!
//! Run with `cargo run --release --example duistermaat_heckman`.

use bt_torsion::dh_orbit::{dh_closed_form, dh_quadrature_with_order, required_order, DhQuadrature};

fn main() -> bt_torsion::Result<()> {
    let dh = DhQuadrature::default();
    println!(" mass     t    quadrature          closed form         |diff|     order");
    for mass in [0.5, 1.0, 2.5, 6.0, 11.0] {
        for t in [0.3, 1.1, 2.9] {
            let v = dh.evaluate(mass, t)?;
            let exact = dh_closed_form(mass, t);
            println!(
                "{mass:5.1} {t:5.1}   {:<+18.12}  {exact:<+18.12}  {:.2e}   {}",
                v.value.re,
                (v.value.re - exact).abs(),
                required_order(mass * t)
            );
        }
    }
    println!("\nunder-resolved grid, mass 11, t 2.9:");
    for order in [4, 8, 16, 32, 64] {
        match dh_quadrature_with_order(11.0, 2.9, order) {
            Ok(v) => println!("  order {order:3}  |diff| {:.2e}", (v.value.re - dh_closed_form(11.0, 2.9)).abs()),
            Err(e) => println!("  order {order:3}  {e}"),
        }
    }
    Ok(())
}
