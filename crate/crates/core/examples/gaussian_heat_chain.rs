//! Iterated Gaussian integrals along a chain of heat propagators.
//!
//! Run with `cargo run --release --example gaussian_heat_chain`.

use bt_torsion::heat_gaussian::{
    chain_relative_error, coefficient_bound_check, fj_closed_at_origin, fj_quadrature_at_origin, random_chains,
    semigroup_defect, GaussianChain, LineRule,
};

fn main() -> bt_torsion::Result<()> {
    let rule = LineRule::oracle();
    let chain = GaussianChain::new(vec![0.4, 0.9, 0.3], vec![0.2, -0.5], vec![0.7, -0.3])?;
    println!("closed form  {:.15}", fj_closed_at_origin(&chain)?);
    println!("quadrature   {:.15}", fj_quadrature_at_origin(&chain, &rule));

    let chains = random_chains(100, 2, 1)?;
    let worst = chains.iter().map(|c| chain_relative_error(c, &rule)).collect::<bt_torsion::Result<Vec<_>>>()?;
    println!("\n100 random chains, j ≤ 2: max relative error {:.2e}", worst.iter().cloned().fold(0.0, f64::max));
    println!("semigroup defect at s = 0.3, t = 0.5: {:.2e}", semigroup_defect(0.3, 0.5, 0.1, -0.4, &rule));

    let pure = GaussianChain::pure(vec![1.0, 1.0, 1.0])?;
    println!("\nTaylor coefficients of λ^α μ^β against the total time t = 1..16:");
    println!("  α      β      fitted degree   bound");
    for (alpha, beta) in [([1, 0], [0, 0]), ([2, 0], [0, 0]), ([0, 0], [0, 1]), ([0, 0], [2, 0]), ([1, 1], [1, 0])] {
        let k = (alpha.iter().sum::<u32>() + beta.iter().sum::<u32>()) as usize;
        let g = coefficient_bound_check(&pure, &alpha, &beta, k)?;
        let degree = g.degree.map_or("vanishes".to_string(), |d| format!("{d:+.3}"));
        println!("  {alpha:?} {beta:?}  {degree:<14}  t^{k}  {}", if g.pass { "ok" } else { "exceeded" });
    }
    Ok(())
}
