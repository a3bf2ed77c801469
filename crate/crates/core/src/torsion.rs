//! Exact torsion asymptotics for `Sym^{ap+a'}C² ⊗ Sym^{bp+b'}C̄²` over a
//! compact hyperbolic 3-manifold (curvature −4).
//!
//! All closed forms are rationals times `1/π`. The leading coefficients
//!
//! ```text
//! W₀(a, 0) = 2a²/π,    W₀(a, b) = (2/3π)(3a²b − b³)   (a > b > 0),
//! W₁(a, 0) = 4a(a'+1)/π,
//! W₁(a, b) = (2/π)((a²−b²)(b'+1) + 2ab(a'+1))         (a > b > 0),
//! ```
//!
//! extended to `a < b` by exchanging `(a, a') ↔ (b, b')`, are checked against
//! the large-`p` expansion of Müller's L²-torsion polynomial and against
//! the first-order weight shift of `W₀`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::SphereGrid;

/// Weights `(a, b)` and their shifts `(a', b')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrbitDatum {
    pub a: u32,
    pub b: u32,
    pub a_shift: i64,
    pub b_shift: i64,
}

impl OrbitDatum {
    pub fn new(a: u32, b: u32, a_shift: i64, b_shift: i64) -> Self {
        OrbitDatum { a, b, a_shift, b_shift }
    }
}

/// Hyperbolic volume of the manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldDatum {
    volume: f64,
}

impl ManifoldDatum {
    pub fn new(volume: f64) -> Result<Self> {
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::InvalidArgument(format!("volume {volume} must be positive")));
        }
        Ok(ManifoldDatum { volume })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }
}

/// The exact number `q/π`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPiValue(pub BigRational);

impl RationalPiValue {
    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
        n / d / std::f64::consts::PI
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for RationalPiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/π", self.0)
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The torsion expansion exists exactly when `a ≠ b`: the Cartan involution
/// exchanges the two factors, so the orbit avoids the degeneracy locus
/// unless they have equal size.
pub fn nondegenerate(a: u32, b: u32) -> bool {
    a != b
}

fn require_nondegenerate(a: u32, b: u32) -> Result<()> {
    if nondegenerate(a, b) {
        Ok(())
    } else {
        Err(Error::DegenerateOrbit(format!("(a, b) = ({a}, {b})")))
    }
}

/// Larger weight first, together with its shift.
fn ordered(a: u32, b: u32, a_shift: i64, b_shift: i64) -> (i64, i64, i64, i64) {
    if a >= b {
        (a as i64, b as i64, a_shift, b_shift)
    } else {
        (b as i64, a as i64, b_shift, a_shift)
    }
}

/// `min |a n₁ − b n₂|²` over the product of two unit-sphere grids: the
/// squared pairing of `2πμ₁ − 2πμ₂` with an orthonormal frame of `𝔭`.
pub fn nondegeneracy_min(a: u32, b: u32, grid_order: usize) -> Result<f64> {
    if grid_order < 16 {
        return Err(Error::InvalidArgument(format!("grid order {grid_order} < 16")));
    }
    let grid = SphereGrid::unit(grid_order)?;
    let points: Vec<[f64; 3]> = grid.nodes().map(|n| n.point).collect();
    let (af, bf) = (a as f64, b as f64);
    let mut best = f64::INFINITY;
    for p in &points {
        for q in &points {
            let d: f64 = (0..3).map(|k| (af * p[k] - bf * q[k]).powi(2)).sum();
            best = best.min(d);
        }
    }
    Ok(best)
}

/// Branch polynomial of `π·W₀` in the ordered weights `(hi, lo)`.
fn w0_branch(hi: &BigRational, lo: &BigRational, point_orbit: bool) -> BigRational {
    if point_orbit {
        int(2) * hi * hi
    } else {
        frac(2, 3) * (int(3) * hi * hi * lo - lo * lo * lo)
    }
}

pub fn w0_exact(a: u32, b: u32) -> Result<RationalPiValue> {
    require_nondegenerate(a, b)?;
    let (hi, lo, _, _) = ordered(a, b, 0, 0);
    Ok(RationalPiValue(w0_branch(&int(hi), &int(lo), lo == 0)))
}

pub fn w1_exact(a: u32, b: u32, a_shift: i64, b_shift: i64) -> Result<RationalPiValue> {
    require_nondegenerate(a, b)?;
    let (hi, lo, hs, ls) = ordered(a, b, a_shift, b_shift);
    let v = if lo == 0 {
        int(4 * hi * (hs + 1))
    } else {
        int(2) * (int((hi * hi - lo * lo) * (ls + 1)) + int(2 * hi * lo * (hs + 1)))
    };
    Ok(RationalPiValue(v))
}

/// Müller's L²-torsion polynomial
/// `(1/6π){S³ − D³ + 3SD(S − D)}`, `S = a + b + 2`, `D = |a − b|`.
pub fn muller_l2(a: i64, b: i64) -> Result<RationalPiValue> {
    if a < 0 || b < 0 {
        return Err(Error::InvalidArgument(format!("weights ({a}, {b}) must be non-negative")));
    }
    let s = int(a + b + 2);
    let d = int((a - b).abs());
    let v = &s * &s * &s - &d * &d * &d + int(3) * &s * &d * (&s - &d);
    Ok(RationalPiValue(v / int(6)))
}

/// Solves the Vandermonde system for the monomial coefficients (lowest
/// degree first) of the polynomial through the given points.
fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut m: Vec<Vec<BigRational>> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let mut row: Vec<BigRational> = (0..n).map(|k| num_traits::pow(x.clone(), k)).collect();
            row.push(y.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("distinct nodes");
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for k in col..=n {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..=n {
                    let v = &m[col][k] * &f;
                    m[r][k] = &m[r][k] - v;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n].clone()).collect()
}

/// Coefficients of `p³, p², p¹, p⁰` in `muller_l2(ap + a', bp + b')`.
///
/// The polynomial is recovered by exact interpolation at consecutive
/// integers beyond which `|(a−b)p + a' − b'|` has a fixed sign. When one
/// weight vanishes its shift must vanish too (the factor is a point orbit)
/// and the expansion has degree 2.
pub fn asymptotic_coefficients(a: u32, b: u32, a_shift: i64, b_shift: i64) -> Result<[RationalPiValue; 4]> {
    require_nondegenerate(a, b)?;
    let (hi, lo, hs, ls) = ordered(a, b, a_shift, b_shift);
    if lo == 0 && ls != 0 {
        return Err(Error::InvalidArgument(format!("a zero weight needs a zero shift, got {ls}")));
    }
    let degree = if lo == 0 { 2 } else { 3 };
    let diff = hi - lo;
    let stable = |p: i64| (diff * p + hs - ls) > 0 && hi * p + hs >= 0 && lo * p + ls >= 0;
    let mut p0 = 1;
    while !(0..=degree).all(|k| stable(p0 + k)) || !stable(p0 + 64) {
        p0 += 1;
    }
    let xs: Vec<BigRational> = (0..=degree).map(|k| int(p0 + k)).collect();
    let ys = (0..=degree)
        .map(|k| {
            let p = p0 + k;
            muller_l2(hi * p + hs, lo * p + ls).map(|v| v.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = interpolate(&xs, &ys);
    coeffs.resize(4, BigRational::zero());
    Ok([
        RationalPiValue(coeffs[3].clone()),
        RationalPiValue(coeffs[2].clone()),
        RationalPiValue(coeffs[1].clone()),
        RationalPiValue(coeffs[0].clone()),
    ])
}

/// Derivative at `ε = 0` of `W₀` at `(a, b) + ε(1 + a', 1 + b')`, the shift by
/// `ρ` plus the twist. Computed by exact interpolation of the (cubic) branch
/// polynomial along the line; a point-orbit factor does not move.
pub fn shifted_w0_coefficient(a: u32, b: u32, a_shift: i64, b_shift: i64) -> Result<RationalPiValue> {
    require_nondegenerate(a, b)?;
    let (hi, lo, hs, ls) = ordered(a, b, a_shift, b_shift);
    let point_orbit = lo == 0;
    let (dh, dl) = (int(1 + hs), if point_orbit { BigRational::zero() } else { int(1 + ls) });
    let eps: Vec<BigRational> = (-1..=2).map(|k| frac(k, 16)).collect();
    let ys: Vec<BigRational> =
        eps.iter().map(|e| w0_branch(&(int(hi) + e * &dh), &(int(lo) + e * &dl), point_orbit)).collect();
    Ok(RationalPiValue(interpolate(&eps, &ys)[1].clone()))
}

/// `Vol · p^{n+1} (W₀ + W₁/p)` with `n = 2` when both weights are positive
/// and `n = 1` otherwise.
pub fn torsion_prediction(p: u64, datum: &OrbitDatum, mfd: &ManifoldDatum) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    let w0 = w0_exact(datum.a, datum.b)?.to_f64();
    let w1 = w1_exact(datum.a, datum.b, datum.a_shift, datum.b_shift)?.to_f64();
    let n = if datum.a > 0 && datum.b > 0 { 2 } else { 1 };
    let pf = p as f64;
    Ok(mfd.volume * pf.powi(n + 1) * (w0 + w1 / pf))
}

/// Row of the exact consistency table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub datum: OrbitDatum,
    pub w0: RationalPiValue,
    pub w1: RationalPiValue,
    pub coefficients: [RationalPiValue; 4],
    pub shifted: RationalPiValue,
    pub consistent: bool,
}

/// The grid `a, b ≤ max` (nondegenerate), `a', b' ∈ {−2..2}` with zero shift
/// on a zero weight.
pub fn consistency_grid(max: u32) -> Vec<OrbitDatum> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max {
            if !nondegenerate(a, b) {
                continue;
            }
            for a_shift in -2..=2 {
                for b_shift in -2..=2 {
                    if (a == 0 && a_shift != 0) || (b == 0 && b_shift != 0) {
                        continue;
                    }
                    out.push(OrbitDatum::new(a, b, a_shift, b_shift));
                }
            }
        }
    }
    out
}

/// Compares the Müller expansion and the weight-shift derivative with the
/// closed forms; leading coefficients sit at `p³, p²` for two genuine
/// spheres and at `p², p¹` when one factor is a point.
pub fn consistency_row(d: &OrbitDatum) -> Result<ConsistencyRow> {
    let w0 = w0_exact(d.a, d.b)?;
    let w1 = w1_exact(d.a, d.b, d.a_shift, d.b_shift)?;
    let coefficients = asymptotic_coefficients(d.a, d.b, d.a_shift, d.b_shift)?;
    let shifted = shifted_w0_coefficient(d.a, d.b, d.a_shift, d.b_shift)?;
    let (lead, next) = if d.a > 0 && d.b > 0 { (0, 1) } else { (1, 2) };
    let vanishing_top = lead == 0 || coefficients[0].is_zero();
    let consistent = vanishing_top && coefficients[lead] == w0 && coefficients[next] == w1 && shifted == w1;
    Ok(ConsistencyRow { datum: *d, w0, w1, coefficients, shifted, consistent })
}

impl From<i64> for RationalPiValue {
    fn from(n: i64) -> Self {
        RationalPiValue(int(n))
    }
}

impl RationalPiValue {
    pub fn ratio(n: i64, d: i64) -> Self {
        RationalPiValue(frac(n, d))
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn one_over_pi() -> Self {
        RationalPiValue(BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> RationalPiValue {
        RationalPiValue::ratio(n, d)
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(!nondegenerate(2, 2));
        assert!(nondegenerate(3, 1));
        assert!(nondegenerate(4, 0));
        assert!(!nondegenerate(0, 0));
    }

    #[test]
    fn sampled_minimum() {
        assert!(nondegeneracy_min(2, 2, 16).unwrap() < 1e-6);
        let ratio = nondegeneracy_min(3, 1, 16).unwrap() / nondegeneracy_min(2, 0, 16).unwrap();
        assert!((ratio - 1.0).abs() < 1e-3);
        assert!((nondegeneracy_min(1, 0, 16).unwrap() - 1.0).abs() < 1e-12);
        assert!(nondegeneracy_min(1, 0, 8).is_err());
        for a in 0..=5 {
            for b in 0..=5 {
                let m = nondegeneracy_min(a, b, 16).unwrap();
                assert_eq!(m > 1e-4, nondegenerate(a, b), "({a}, {b}): {m}");
            }
        }
    }

    #[test]
    fn w0_examples() {
        assert_eq!(w0_exact(1, 0).unwrap(), r(2, 1));
        assert_eq!(w0_exact(2, 1).unwrap(), r(22, 3));
        assert_eq!(w0_exact(3, 1).unwrap(), r(52, 3));
        assert!(w0_exact(2, 2).is_err());
        for a in 0..7 {
            for b in 0..7 {
                if a != b {
                    assert_eq!(w0_exact(a, b).unwrap(), w0_exact(b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn w1_examples() {
        assert_eq!(w1_exact(1, 0, 0, 0).unwrap(), r(4, 1));
        assert_eq!(w1_exact(2, 1, 0, 0).unwrap(), r(14, 1));
        assert_eq!(w1_exact(1, 2, 0, 0).unwrap(), r(14, 1));
        assert!(w1_exact(3, 3, 0, 0).is_err());
    }

    #[test]
    fn muller_examples() {
        assert_eq!(muller_l2(1, 0).unwrap(), r(22, 3));
        assert_eq!(muller_l2(0, 0).unwrap(), r(4, 3));
        assert_eq!(muller_l2(2, 1).unwrap(), r(92, 3));
    }

    #[test]
    fn expansion_examples() {
        let c = asymptotic_coefficients(1, 0, 0, 0).unwrap();
        assert!(c[0].is_zero());
        assert_eq!(c[1], r(2, 1));
        assert_eq!(c[2], r(4, 1));
        // 12X² + 24X + 8 over 6π.
        assert_eq!(c[3], r(8, 6));
        let c = asymptotic_coefficients(2, 1, 0, 0).unwrap();
        assert_eq!(c[0], r(22, 3));
        assert_eq!(c[1], r(14, 1));
        assert_eq!(asymptotic_coefficients(1, 0, 3, 0).unwrap()[2], r(16, 1));
        assert!(asymptotic_coefficients(1, 0, 0, 1).is_err());
    }

    #[test]
    fn shifted_examples() {
        assert_eq!(shifted_w0_coefficient(1, 0, 0, 0).unwrap(), r(4, 1));
        assert_eq!(shifted_w0_coefficient(2, 1, 0, 0).unwrap(), r(14, 1));
        for (a, b) in [(1, 0), (2, 1), (1, 3), (5, 2)] {
            assert!(shifted_w0_coefficient(a, b, -1, -1).unwrap().is_zero());
        }
    }

    #[test]
    fn prediction_examples() {
        let pi = std::f64::consts::PI;
        let one = ManifoldDatum::new(1.0).unwrap();
        let two = ManifoldDatum::new(2.0).unwrap();
        let v = torsion_prediction(10, &OrbitDatum::new(1, 0, 0, 0), &one).unwrap();
        assert!((v - (100.0 * 2.0 / pi + 10.0 * 4.0 / pi)).abs() < 1e-12);
        let d = OrbitDatum::new(2, 1, 0, 0);
        let v = torsion_prediction(10, &d, &two).unwrap();
        assert!((v - 2.0 * (1000.0 * 22.0 / (3.0 * pi) + 100.0 * 14.0 / pi)).abs() < 1e-9);
        assert!(
            (torsion_prediction(10, &d, &two).unwrap() - 2.0 * torsion_prediction(10, &d, &one).unwrap()).abs() < 1e-9
        );
        assert!(ManifoldDatum::new(0.0).is_err());
    }

    #[test]
    fn exact_identities_on_the_grid() {
        let grid = consistency_grid(6);
        assert!(!grid.is_empty());
        for d in grid {
            let row = consistency_row(&d).unwrap();
            assert!(row.consistent, "{d:?}: {:?}", row);
        }
    }
}
