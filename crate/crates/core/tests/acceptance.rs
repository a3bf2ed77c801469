//! The thirteen acceptance criteria, one `[PASS]`/`[FAIL]` line each.
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use std::sync::Mutex;
use std::time::{Duration, Instant};

use bt_torsion::dh_orbit::DhQuadrature;
use bt_torsion::exterior::{
    anticommutator_violations, supertrace, supertrace_berezin_bridge_check, CliffordWord, Coefficient, Exact, Scale,
};
use bt_torsion::fit::ExpansionFit;
use bt_torsion::heat_gaussian::{chain_relative_error, random_chains, semigroup_defect, LineRule};
use bt_torsion::lie_su2::{kirillov_residual, HighestWeight};
use bt_torsion::report::kirillov_times;
use bt_torsion::toeplitz::{
    exp_defect, exp_defect_in_time, inverse_defect, leading_symbol_residual, poisson_commutator_residual,
    product_defect, quantize, Symbol, ToeplitzConfig,
};
use bt_torsion::torsion::{consistency_grid, consistency_row, nondegeneracy_min, nondegenerate, w0_exact, w1_exact};
use bt_torsion::w_evaluator::{calibrate, w0_calibrated, w1_by_weight_shift, WGrids, DEFAULT_STEPS};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria run one at a time so their wall-clock budgets are meaningful.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] {n:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn dyadic() -> Vec<usize> {
    vec![8, 16, 32, 64]
}

fn dense() -> Vec<usize> {
    (8..=64).collect()
}

fn fit_detail(fit: &ExpansionFit, tol: f64) -> (bool, String) {
    match &fit.fit {
        Some(f) => (
            fit.accepts(-1.0, tol, 0.98),
            format!(
                "slope {:.4} r² {:.5} on p = {}..{} (target -1 ± {tol})",
                f.slope,
                f.r_squared,
                fit.p_list[0],
                fit.p_list[fit.p_list.len() - 1]
            ),
        ),
        None => (false, "no fit: residuals vanish".into()),
    }
}

#[test]
fn c01_toeplitz_dimension() {
    let _g = serial();
    let start = Instant::now();
    let cfg = ToeplitzConfig::default();
    let wrong: Vec<usize> = (1..=64).filter(|&p| cfg.basis(p).map(|b| b.dim()).ok() != Some(p + 1)).collect();
    let elapsed = start.elapsed();
    verdict(
        1,
        "Toeplitz dimension",
        wrong.is_empty() && elapsed < Duration::from_secs(10),
        format!("dim = p+1 for p = 1..64 (mismatches {wrong:?}), {elapsed:.2?} (< 10 s)"),
    );
}

#[test]
fn c02_trace_expansion() {
    let _g = serial();
    let fit =
        leading_symbol_residual(&Symbol::from_name("u2").unwrap(), &dyadic(), &ToeplitzConfig::default()).unwrap();
    let (pass, detail) = fit_detail(&fit, 0.15);
    verdict(2, "trace expansion, H = u²", pass, detail);
}

#[test]
fn c03_product_formula() {
    let _g = serial();
    let fit = product_defect(&Symbol::Z, &Symbol::Z, &dyadic(), &ToeplitzConfig::default()).unwrap();
    let (pass, detail) = fit_detail(&fit, 0.15);
    verdict(3, "product T_u T_u - T_{u²}", pass, detail);
}

#[test]
fn c04_commutator_law() {
    let _g = serial();
    let cfg = ToeplitzConfig::default();
    let fit = poisson_commutator_residual(&Symbol::X, &Symbol::Y, &dense(), &cfg).unwrap();
    let (slope_ok, detail) = fit_detail(&fit, 0.2);
    let mut worst: f64 = 0.0;
    for p in 1..=32 {
        let t = quantize(&Symbol::Z, &cfg.basis(p).unwrap()).unwrap();
        for k in 0..=p {
            let expected = (2.0 * k as f64 - p as f64) / (p as f64 + 2.0);
            worst = worst.max((t.entries[(k, k)].re - expected).abs());
        }
    }
    verdict(
        4,
        "commutator p[T_x,T_y] - iT_{x,y}",
        slope_ok && worst < 1e-9,
        format!("{detail}; spin diagonal max deviation {worst:.2e} for p ≤ 32 (< 1e-9)"),
    );
}

#[test]
fn c05_exp_defect_rate() {
    let _g = serial();
    let h = Symbol::from_name("2+u").unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        let fit = exp_defect(&h, &dense(), t, &ToeplitzConfig::default()).unwrap();
        let (ok, _) = fit_detail(&fit, 0.15);
        pass &= ok;
        parts.push(format!("t = {t}: slope {:.4}", fit.slope().unwrap_or(f64::NAN)));
    }
    verdict(5, "exp defect in p, H = 2+u", pass, format!("{} (target -1 ± 0.15)", parts.join(", ")));
}

#[test]
fn c05_exp_defect_decay_in_time() {
    let _g = serial();
    let h = Symbol::from_name("2+u").unwrap();
    let cfg = ToeplitzConfig::default();
    let eps: f64 = 0.2;
    let d = exp_defect_in_time(&h, 32, &[1.0, 2.0, 4.0, 8.0, 16.0], &cfg).unwrap();
    let envelope: Vec<String> = [1.0f64, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .zip(&d)
        .map(|(t, r)| format!("t={t}: {:.3e}", r * ((1.0 - eps) * t).exp()))
        .collect();
    println!("[INFO]  5 defect·e^((1-ε)t) at p = 32: {}", envelope.join(", "));
    let ratio = d[2] / d[0];
    let bound = 2.0 * (-3.0 * (1.0 - eps)).exp();
    verdict(
        5,
        "exp defect decay in t, H = 2+u, p = 32",
        ratio <= bound,
        format!("defect(4)/defect(1) = {ratio:.4} (≤ 2·e^(-3(1-ε)) = {bound:.4})"),
    );
}

#[test]
fn c06_inverse() {
    let _g = serial();
    let fit = inverse_defect(&Symbol::from_name("2+u").unwrap(), &dense(), &ToeplitzConfig::default()).unwrap();
    let (pass, detail) = fit_detail(&fit, 0.15);
    verdict(6, "inverse T_H⁻¹ - T_{1/H}, H = 2+u", pass, detail);
}

#[test]
fn c07_kirillov() {
    let _g = serial();
    let start = Instant::now();
    let dh = DhQuadrature::default();
    let mut worst: f64 = 0.0;
    for a in 0..=10 {
        for &t in &kirillov_times() {
            worst = worst.max(kirillov_residual(HighestWeight::new(a), t, &dh).unwrap());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        7,
        "Kirillov character identity",
        worst < 1e-7 && elapsed < Duration::from_secs(5),
        format!("max residual {worst:.2e} over a ≤ 10, 50 t-points (< 1e-7), {elapsed:.2?} (< 5 s)"),
    );
}

#[test]
fn c08_clifford_supertrace() {
    let _g = serial();
    let unit = Scale::<Exact>::unit();
    let mut anti = 0;
    let mut words = 0;
    let mut wrong = 0;
    for m in 1..=3 {
        anti += anticommutator_violations(m, &unit).unwrap();
        for w in CliffordWord::monomials(m) {
            words += 1;
            let st = supertrace(&w.operator(&unit).unwrap()).unwrap();
            let ok = if w.is_full() { st == Exact::from_i64((-2i64).pow(m as u32)) } else { st.is_zero() };
            wrong += usize::from(!ok);
        }
    }
    let full: Vec<bool> = (1..=6)
        .map(|m| {
            supertrace(&CliffordWord::full(m).operator(&unit).unwrap()).unwrap()
                == Exact::from_i64((-2i64).pow(m as u32))
        })
        .collect();
    verdict(
        8,
        "Clifford relations and supertrace",
        anti == 0 && wrong == 0 && full.iter().all(|&b| b),
        format!(
            "anticommutator violations {anti} (m ≤ 3), {wrong} of {words} monomial words off, Tr_s full word = (-2)^m for m = 1..6: {full:?}"
        ),
    );
}

#[test]
fn c09_berezin_bridge() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nonzero_residuals = 0;
    let mut nontrivial = 0;
    let mut total = 0;
    for s in [1, 2] {
        let scale = Scale::<Exact>::exact_integer(s).unwrap();
        for k in 0..100 {
            let m = 1 + k % 3;
            let w = if k % 2 == 0 { CliffordWord::random(m, &mut rng) } else { CliffordWord::random_full(m, &mut rng) };
            total += 1;
            nonzero_residuals += usize::from(!supertrace_berezin_bridge_check(&w, &scale).unwrap().is_zero());
            nontrivial += usize::from(!supertrace(&w.operator(&scale).unwrap()).unwrap().is_zero());
        }
    }
    verdict(
        9,
        "supertrace / Berezin bridge",
        nonzero_residuals == 0 && nontrivial > 0,
        format!("{nonzero_residuals} nonzero exact residuals over {total} words (m ≤ 3, s ∈ {{1, 2}}), {nontrivial} with nonzero supertrace"),
    );
}

#[test]
fn c10_gaussian_chain() {
    let _g = serial();
    let rule = LineRule::oracle();
    let chains = random_chains(100, 2, 10).unwrap();
    let worst = chains.iter().map(|c| chain_relative_error(c, &rule).unwrap()).fold(0.0, f64::max);
    let longest = chains.iter().map(|c| c.len()).max().unwrap();
    let semigroup = [(0.3, 0.5, 0.1, -0.4), (1.0, 2.0, 1.5, 0.0), (0.05, 0.2, -0.3, 0.2), (2.5, 0.7, -1.0, 2.0)]
        .iter()
        .map(|&(s, t, x, z)| semigroup_defect(s, t, x, z, &rule))
        .fold(0.0, f64::max);
    verdict(
        10,
        "Gaussian chain closed form",
        worst < 1e-6 && semigroup < 1e-10 && longest == 2,
        format!("max rel. error {worst:.2e} over 100 chains, j ≤ {longest} (< 1e-6); semigroup defect {semigroup:.2e} (< 1e-10)"),
    );
}

#[test]
fn c11_torsion_consistency() {
    let _g = serial();
    let start = Instant::now();
    let grid = consistency_grid(6);
    let bad: Vec<_> = grid.iter().filter(|d| !consistency_row(d).unwrap().consistent).collect();
    let elapsed = start.elapsed();
    verdict(
        11,
        "exact torsion consistency",
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} inconsistent of {} data (a, b ≤ 6, a', b' ∈ -2..2), {elapsed:.2?} (< 1 s)", bad.len(), grid.len()),
    );
}

#[test]
fn c12_w0_numeric() {
    let _g = serial();
    let start = Instant::now();
    let g = WGrids::default();
    let cal = calibrate(&g).unwrap();
    let mut pass = true;
    let mut parts = vec![format!("calibration constant {}", cal.factor)];
    for (a, b) in [(2, 1), (3, 1), (1, 2)] {
        let v = w0_calibrated(a, b, &g, &cal).unwrap().value;
        let exact = w0_exact(a, b).unwrap().to_f64();
        let rel = (v - exact).abs() / exact;
        pass &= rel < 1e-3;
        parts.push(format!("W0({a},{b}) rel {rel:.1e}"));
    }
    for (a, b) in [(1, 0), (2, 1)] {
        let v = w1_by_weight_shift(a, b, 0, 0, &g, &DEFAULT_STEPS).unwrap();
        let exact = w1_exact(a, b, 0, 0).unwrap().to_f64();
        let rel = (v - exact).abs() / exact;
        pass &= rel < 1e-2;
        parts.push(format!("W1({a},{b},0,0) rel {rel:.1e}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    parts.push(format!("{elapsed:.1?} (< 2 min)"));
    verdict(12, "numeric W0 / W1", pass, parts.join(", "));
}

#[test]
fn c13_nondegeneracy() {
    let _g = serial();
    let mut mismatches = Vec::new();
    for a in 0..=5 {
        for b in 0..=5 {
            let min = nondegeneracy_min(a, b, 16).unwrap();
            if (min < 1e-6) != (a == b) || nondegenerate(a, b) == (a == b) {
                mismatches.push((a, b));
            }
        }
    }
    let ratio = nondegeneracy_min(3, 1, 16).unwrap() / nondegeneracy_min(2, 0, 16).unwrap();
    verdict(
        13,
        "nondegeneracy",
        mismatches.is_empty() && (ratio - 1.0).abs() < 1e-3,
        format!("sampled minimum < 1e-6 iff a = b (mismatches {mismatches:?}); min(3,1)/min(2,0) = {ratio:.6}"),
    );
}
