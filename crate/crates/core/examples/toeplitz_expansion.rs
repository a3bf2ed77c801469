//! Remainder rates of the Berezin-Toeplitz calculus on CP¹.
//!
//! Run with `cargo run --release --example toeplitz_expansion`.

use bt_torsion::fit::ExpansionFit;
use bt_torsion::toeplitz::{self, Symbol, ToeplitzConfig};

fn show(label: &str, fit: &ExpansionFit) {
    let rate = fit
        .fit
        .map(|f| format!("slope {:+.4}  r² {:.5}", f.slope, f.r_squared))
        .unwrap_or_else(|| "exact (no rate)".to_string());
    println!("{label:<38} {rate}   max residual {:.3e}", fit.max_residual());
}

fn main() -> bt_torsion::Result<()> {
    let cfg = ToeplitzConfig::default();
    let dyadic = [8, 16, 32, 64];
    let dense: Vec<usize> = (8..=64).collect();
    let u2 = Symbol::from_name("u2")?;
    let h = Symbol::from_name("2+u")?;

    show("trace  p⁻¹Tr T_{u²} - ∫u²", &toeplitz::leading_symbol_residual(&u2, &dyadic, &cfg)?);
    show("product T_u T_u - T_{u²}", &toeplitz::product_defect(&Symbol::Z, &Symbol::Z, &dyadic, &cfg)?);
    show(
        "product T_u T_{x+iy} - T_{u(x+iy)}",
        &toeplitz::product_defect(&Symbol::Z, &Symbol::equatorial(), &dyadic, &cfg)?,
    );
    show(
        "bracket p[T_x,T_y] - iT_{x,y}",
        &toeplitz::poisson_commutator_residual(&Symbol::X, &Symbol::Y, &dense, &cfg)?,
    );
    for t in [0.5, 1.0, 2.0] {
        show(&format!("exp    t = {t}"), &toeplitz::exp_defect(&h, &dense, t, &cfg)?);
    }
    show("inverse H = 2+u", &toeplitz::inverse_defect(&h, &dense, &cfg)?);
    show("inverse H = 1.1+u", &toeplitz::inverse_defect(&Symbol::from_name("1.1+u")?, &dense, &cfg)?);

    let times = [1.0, 2.0, 4.0, 8.0, 16.0];
    let decay = toeplitz::exp_defect_in_time(&h, 32, &times, &cfg)?;
    println!("\nexp defect at p = 32 for H = 2+u:");
    for (t, d) in times.iter().zip(&decay) {
        println!("  t = {t:>4}: {d:.6e}   e^(0.8 t)·defect = {:.4e}", d * (0.8 * t).exp());
    }
    Ok(())
}
