//! Iterated Gaussian convolutions with shifts and exponential sources.
//!
//! With `P_t(x, y) = (4πt)^{-1/2} e^{-(x-y)²/4t}`, `f_0(x, z) = P_{t_0}(x, z)`
//! and
//!
//! ```text
//! f_i(x, z) = ∫ P_{t_i}(x, y) e^{μ_i y} f_{i-1}(y + λ_i, z) dy,
//! ```
//!
//! every `f_i` is again a shifted heat kernel times an exponential of a
//! quadratic, which gives the closed forms below.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, gauss_legendre};

pub fn heat_kernel(t: f64, x: f64, y: f64) -> f64 {
    (4.0 * PI * t).powf(-0.5) * (-(x - y).powi(2) / (4.0 * t)).exp()
}

/// `f_1(Z₂, Z₀) = P_{t₀+t₁}(Z₂, Z₀-λ₁)·exp(μ₁(t₀Z₂ + t₁(Z₀-λ₁))/(t₀+t₁) + μ₁²t₀t₁/(t₀+t₁))`.
pub fn f1_closed(z2: f64, z0: f64, t0: f64, t1: f64, lambda1: f64, mu1: f64) -> Result<f64> {
    if !(t0 > 0.0 && t1 > 0.0) {
        return Err(Error::InvalidArgument(format!("times must be positive, got {t0}, {t1}")));
    }
    let t = t0 + t1;
    let shifted = z0 - lambda1;
    let expo = mu1 * (t0 * z2 + t1 * shifted) / t + mu1 * mu1 * t0 * t1 / t;
    Ok(heat_kernel(t, z2, shifted) * expo.exp())
}

/// Times `t_0..t_j`, shifts `λ_1..λ_j` and sources `μ_1..μ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChain {
    pub times: Vec<f64>,
    pub shifts: Vec<f64>,
    pub sources: Vec<f64>,
}

impl GaussianChain {
    pub fn new(times: Vec<f64>, shifts: Vec<f64>, sources: Vec<f64>) -> Result<Self> {
        if times.is_empty() || shifts.len() + 1 != times.len() || sources.len() != shifts.len() {
            return Err(Error::InvalidArgument(format!(
                "a chain of length j needs j+1 times and j shifts/sources (got {}, {}, {})",
                times.len(),
                shifts.len(),
                sources.len()
            )));
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidArgument(format!("chain time {t} must be positive")));
        }
        Ok(GaussianChain { times, shifts, sources })
    }

    /// Chain with all shifts and sources zero.
    pub fn pure(times: Vec<f64>) -> Result<Self> {
        let j = times.len().saturating_sub(1);
        Self::new(times, vec![0.0; j], vec![0.0; j])
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn total_time(&self) -> f64 {
        self.times.iter().sum()
    }

    /// Same shape with times rescaled to the given total.
    pub fn with_total_time(&self, total: f64) -> Self {
        let k = total / self.total_time();
        GaussianChain { times: self.times.iter().map(|t| t * k).collect(), ..self.clone() }
    }

    /// `w_0 = 0`, `w_i = (μ_i + w_{i-1}) T_{i-1} / T_i` with partial sums
    /// `T_i = t_0 + … + t_i`.
    pub fn drift_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0];
        let mut partial = self.times[0];
        for i in 1..=self.len() {
            let next = partial + self.times[i];
            w.push((self.sources[i - 1] + w[i - 1]) * partial / next);
            partial = next;
        }
        w
    }
}

/// `f_j(0, 0)` in closed form:
///
/// ```text
/// (4πT_j)^{-1/2} exp(-Λ_j²/(4T_j) + Σ_i [ν_i w_i t_i - (ν_i - w_i)Λ_i + w_{i-1}λ_i])
/// ```
///
/// with `ν_i = μ_i + w_{i-1}` and `Λ_i = λ_1 + … + λ_i`.
pub fn fj_closed_at_origin(chain: &GaussianChain) -> Result<f64> {
    if chain.len() > 4 {
        return Err(Error::InvalidArgument(format!("chain length {} exceeds 4", chain.len())));
    }
    let w = chain.drift_weights();
    let mut big_lambda = 0.0;
    let mut exponent = 0.0;
    for i in 1..=chain.len() {
        let (lambda, mu, t) = (chain.shifts[i - 1], chain.sources[i - 1], chain.times[i]);
        big_lambda += lambda;
        let nu = mu + w[i - 1];
        exponent += nu * w[i] * t - (nu - w[i]) * big_lambda + w[i - 1] * lambda;
    }
    let total = chain.total_time();
    Ok((4.0 * PI * total).powf(-0.5) * (exponent - big_lambda * big_lambda / (4.0 * total)).exp())
}

/// Gauss-Legendre rule on a finite interval used by the quadrature oracle.
#[derive(Debug, Clone)]
pub struct LineRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LineRule {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        let (x, w) = gauss_legendre(n)?;
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        Ok(LineRule {
            nodes: x.iter().map(|x| mid + half * x).collect(),
            weights: w.iter().map(|w| half * w).collect(),
        })
    }

    /// 400 nodes on [-12, 12].
    pub fn oracle() -> Self {
        Self::new(-12.0, 12.0, 400).expect("fixed rule")
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)))
    }
}

/// `f_i(x, z)` by nested quadrature (cost grows like `n^i`).
pub fn f_by_quadrature(chain: &GaussianChain, i: usize, x: f64, z: f64, rule: &LineRule) -> f64 {
    if i == 0 {
        return heat_kernel(chain.times[0], x, z);
    }
    let (lambda, mu, t) = (chain.shifts[i - 1], chain.sources[i - 1], chain.times[i]);
    rule.integrate(|y| heat_kernel(t, x, y) * (mu * y).exp() * f_by_quadrature(chain, i - 1, y + lambda, z, rule))
}

/// `f_j(0, 0)` by nested quadrature.
pub fn fj_quadrature_at_origin(chain: &GaussianChain, rule: &LineRule) -> f64 {
    f_by_quadrature(chain, chain.len(), 0.0, 0.0, rule)
}

/// Relative difference between the closed form and nested quadrature.
pub fn chain_relative_error(chain: &GaussianChain, rule: &LineRule) -> Result<f64> {
    let exact = fj_closed_at_origin(chain)?;
    Ok((fj_quadrature_at_origin(chain, rule) - exact).abs() / exact.abs())
}

/// `|∫ P_s(x, y) P_t(y, z) dy − P_{s+t}(x, z)|`.
pub fn semigroup_defect(s: f64, t: f64, x: f64, z: f64, rule: &LineRule) -> f64 {
    let lhs = rule.integrate(|y| heat_kernel(s, x, y) * heat_kernel(t, y, z));
    (lhs - heat_kernel(s + t, x, z)).abs()
}

/// Seeded chains of length `1..=max_len` with times in `[0.1, 1]` and
/// shifts, sources in `[-1, 1]`.
pub fn random_chains(count: usize, max_len: usize, seed: u64) -> Result<Vec<GaussianChain>> {
    use rand::{Rng, SeedableRng};
    if max_len == 0 || max_len > 4 {
        return Err(Error::InvalidArgument(format!("chain length {max_len} outside 1..=4")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let j = rng.gen_range(1..=max_len);
            let times = (0..=j).map(|_| rng.gen_range(0.1..1.0)).collect();
            let shifts = (0..j).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sources = (0..j).map(|_| rng.gen_range(-1.0..1.0)).collect();
            GaussianChain::new(times, shifts, sources)
        })
        .collect()
}

/// Growth of one Taylor coefficient of `(λ, μ) ↦ f_j(0, 0)` with the total
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    pub totals: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Fitted exponent of `|coefficient|` against the total time; `None`
    /// when the coefficient vanishes identically.
    pub degree: Option<f64>,
    pub bound: usize,
    pub pass: bool,
}

/// Total times at which coefficient growth is sampled.
pub const GROWTH_TIMES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// `∂^α_λ ∂^β_μ f_j(0,0) / (α! β!)` at `λ = μ = 0` by central differences
/// with one Richardson step; the chain supplies the times only.
pub fn taylor_coefficient(chain: &GaussianChain, alpha: &[u32], beta: &[u32]) -> Result<f64> {
    let j = chain.len();
    if alpha.len() != j || beta.len() != j {
        return Err(Error::InvalidArgument(format!("multi-indices must have length {j}")));
    }
    let orders: Vec<u32> = alpha.iter().chain(beta).copied().collect();
    if orders.iter().sum::<u32>() > 6 {
        return Err(Error::InvalidArgument("total derivative order above 6".into()));
    }
    let h = 0.05 / chain.total_time().sqrt();
    let d1 = mixed_difference(chain, &orders, h)?;
    let d2 = mixed_difference(chain, &orders, h / 2.0)?;
    let factorials: f64 = orders.iter().map(|&n| (1..=n).product::<u32>() as f64).product();
    Ok((4.0 * d2 - d1) / 3.0 / factorials)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn mixed_difference(chain: &GaussianChain, orders: &[u32], h: f64) -> Result<f64> {
    let j = chain.len();
    let active: Vec<usize> = (0..orders.len()).filter(|&v| orders[v] > 0).collect();
    let mut total = 0.0;
    let mut idx = vec![0u32; active.len()];
    loop {
        let mut point = vec![0.0; 2 * j];
        let mut weight = 1.0;
        for (slot, &v) in active.iter().enumerate() {
            let n = orders[v];
            let k = idx[slot];
            point[v] = (n as f64 / 2.0 - k as f64) * h;
            weight *= if k % 2 == 0 { 1.0 } else { -1.0 } * binomial(n, k) / h.powi(n as i32);
        }
        let c = GaussianChain { times: chain.times.clone(), shifts: point[..j].to_vec(), sources: point[j..].to_vec() };
        total += weight * fj_closed_at_origin(&c)?;
        // Odometer over the stencil.
        let mut slot = 0;
        loop {
            if slot == active.len() {
                return Ok(total);
            }
            idx[slot] += 1;
            if idx[slot] <= orders[active[slot]] {
                break;
            }
            idx[slot] = 0;
            slot += 1;
        }
    }
}

/// Checks that the `λ^α μ^β` coefficient grows at most like `t^k` over
/// total times 1, 2, 4, 8, 16 (fitted log-log degree ≤ k + 0.05).
pub fn coefficient_bound_check(chain: &GaussianChain, alpha: &[u32], beta: &[u32], k: usize) -> Result<GrowthCheck> {
    let totals = GROWTH_TIMES.to_vec();
    let coefficients = totals
        .iter()
        .map(|&t| taylor_coefficient(&chain.with_total_time(t), alpha, beta))
        .collect::<Result<Vec<f64>>>()?;
    let vanishing = coefficients.iter().zip(&totals).all(|(c, t)| c.abs() <= 1e-9 * (4.0 * PI * t).powf(-0.5));
    let degree = if vanishing {
        None
    } else {
        let xs: Vec<f64> = totals.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = coefficients.iter().map(|c| c.abs().max(f64::MIN_POSITIVE).ln()).collect();
        Some(crate::fit::least_squares(&xs, &ys).slope)
    };
    let pass = degree.is_none_or(|d| d <= k as f64 + 0.05);
    Ok(GrowthCheck { totals, coefficients, degree, bound: k, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn f1_reduces_to_heat_kernel() {
        let v = f1_closed(0.3, -0.2, 0.5, 0.7, 0.0, 0.0).unwrap();
        assert!(rel(v, heat_kernel(1.2, 0.3, -0.2)) < 1e-15);
        assert!(f1_closed(0.0, 0.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn f1_matches_quadrature() {
        let (z2, z0, t0, t1, l1, m1) = (0.3, -0.2, 0.5, 0.7, 0.4, 0.6);
        let rule = LineRule::oracle();
        let q = rule.integrate(|z1| heat_kernel(t1, z2, z1) * (m1 * z1).exp() * heat_kernel(t0, z1 + l1, z0));
        assert!(rel(f1_closed(z2, z0, t0, t1, l1, m1).unwrap(), q) < 1e-8);
    }

    #[test]
    fn chain_of_length_one_is_f1() {
        let c = GaussianChain::new(vec![0.5, 0.7], vec![0.4], vec![0.6]).unwrap();
        let a = fj_closed_at_origin(&c).unwrap();
        let b = f1_closed(0.0, 0.0, 0.5, 0.7, 0.4, 0.6).unwrap();
        assert!(rel(a, b) < 1e-14);
    }

    #[test]
    fn two_step_chain_matches_nested_quadrature() {
        let c = GaussianChain::new(vec![0.4, 0.3, 0.3], vec![0.2, -0.1], vec![0.5, 0.1]).unwrap();
        let closed = fj_closed_at_origin(&c).unwrap();
        let quad = fj_quadrature_at_origin(&c, &LineRule::oracle());
        assert!(rel(closed, quad) < 1e-6, "{closed} vs {quad}");
    }

    #[test]
    fn three_step_chain_matches_nested_quadrature() {
        let c = GaussianChain::new(vec![0.4, 0.9, 0.3, 0.5], vec![0.2, -0.5, 0.3], vec![0.7, -0.3, 0.1]).unwrap();
        let quad = fj_quadrature_at_origin(&c, &LineRule::new(-12.0, 12.0, 120).unwrap());
        assert!(rel(quad, fj_closed_at_origin(&c).unwrap()) < 1e-8);
    }

    #[test]
    fn semigroup_identity() {
        let rule = LineRule::oracle();
        for (s, t, x, z) in [(0.3, 0.5, 0.1, -0.4), (1.0, 2.0, 1.5, 0.0), (0.05, 0.2, -0.3, 0.2)] {
            assert!(semigroup_defect(s, t, x, z, &rule) < 1e-10);
        }
    }

    #[test]
    fn random_chains_agree_with_quadrature() {
        let rule = LineRule::oracle();
        let chains = random_chains(12, 2, 7).unwrap();
        assert_eq!(chains, random_chains(12, 2, 7).unwrap());
        for c in chains {
            assert!(chain_relative_error(&c, &rule).unwrap() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn pure_chain_is_heat_kernel() {
        for times in [vec![0.3], vec![0.3, 1.1], vec![0.2, 0.5, 0.9], vec![1.0, 0.1, 0.4, 2.0]] {
            let c = GaussianChain::pure(times.clone()).unwrap();
            let t: f64 = times.iter().sum();
            assert!(rel(fj_closed_at_origin(&c).unwrap(), (4.0 * PI * t).powf(-0.5)) < 1e-14);
        }
    }

    #[test]
    fn malformed_chains_are_rejected() {
        assert!(GaussianChain::new(vec![1.0], vec![0.1], vec![0.1]).is_err());
        assert!(GaussianChain::new(vec![1.0, -1.0], vec![0.1], vec![0.1]).is_err());
    }

    #[test]
    fn taylor_coefficients_match_closed_differentiation() {
        // j = 1: f = P_T(0, -λ) exp(-μλ t₁/T + μ² t₀t₁/T); the λμ coefficient is
        // -(t₁/T)(4πT)^{-1/2}, the μ² coefficient t₀t₁/T·(4πT)^{-1/2}.
        let c = GaussianChain::pure(vec![0.75, 1.25]).unwrap();
        let pref = (4.0 * PI * 2.0f64).powf(-0.5);
        let lm = taylor_coefficient(&c, &[1], &[1]).unwrap();
        assert!(rel(lm, -(1.25 / 2.0) * pref) < 1e-6);
        let mm = taylor_coefficient(&c, &[0], &[2]).unwrap();
        assert!(rel(mm, 0.75 * 1.25 / 2.0 * pref) < 1e-6);
        let ll = taylor_coefficient(&c, &[2], &[0]).unwrap();
        assert!(rel(ll, -pref / 8.0) < 1e-6);
    }

    #[test]
    fn growth_examples() {
        let c1 = GaussianChain::pure(vec![1.0, 1.0]).unwrap();
        let zero = coefficient_bound_check(&c1, &[0], &[0], 0).unwrap();
        assert!(zero.pass);
        assert!((zero.degree.unwrap() + 0.5).abs() < 1e-9);
        assert!(zero.coefficients.windows(2).all(|w| w[1] < w[0]));
        assert!(coefficient_bound_check(&c1, &[1], &[1], 1).unwrap().pass);
        let c2 = GaussianChain::pure(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(coefficient_bound_check(&c2, &[2, 0], &[0, 0], 2).unwrap().pass);
        assert!(coefficient_bound_check(&c2, &[1, 1], &[0, 0], 2).unwrap().pass);
        // The μ₁μ₂ coefficient grows linearly and fails a degree-0 bound.
        let mu = coefficient_bound_check(&c2, &[0, 0], &[1, 1], 0).unwrap();
        assert!(!mu.pass);
        assert!((mu.degree.unwrap() - 0.5).abs() < 0.2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn closed_form_matches_quadrature_for_one_step(
            t in proptest::array::uniform2(0.1f64..2.0),
            l in -1.0f64..1.0,
            m in -1.0f64..1.0,
        ) {
            let c = GaussianChain::new(t.to_vec(), vec![l], vec![m]).unwrap();
            let closed = fj_closed_at_origin(&c).unwrap();
            let quad = fj_quadrature_at_origin(&c, &LineRule::oracle());
            prop_assert!(rel(closed, quad) < 1e-6);
        }
    }
}
