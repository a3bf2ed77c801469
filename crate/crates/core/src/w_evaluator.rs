//! Numerical leading torsion coefficient `W₀` for `SL(2, C)` acting on
//! hyperbolic 3-space, and `W₁` by a first-order weight shift.
//!
//! `𝔭` is spanned by the Pauli matrices `Y_i = σ_i` with the metric
//! `½ Re tr(AB*)`, and `𝔨 = su(2)` by `iσ_k`. With `R(X,Y)Z = −[[X,Y],Z]`
//! the sectional curvature is −4.
//!
//! The orbit `𝒪_a × 𝒪̄_b` is stored as pairs `(v₁, v₂)` with `|v₁| = a`,
//! `|v₂| = b` (that is, `v = 2πμ`). Under the symbol map a `𝔭` element
//! `Σ p_k σ_k` becomes `⟨p, v₁ − v₂⟩` and a `𝔨` element `Σ κ_k iσ_k` becomes
//! `i⟨κ, v₁ + v₂⟩`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::SuperElement;
use crate::quadrature::{compensated_sum, HalfLineGrid, SphereGrid};

type M2 = Matrix2<Complex64>;

const M: usize = 3;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(k: usize) -> M2 {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match k {
        0 => M2::new(z, o, o, z),
        1 => M2::new(z, -i, i, z),
        _ => M2::new(o, z, z, -o),
    }
}

fn pair(a: &M2, b: &M2) -> f64 {
    0.5 * (a * b.adjoint()).trace().re
}

fn bracket(a: &M2, b: &M2) -> M2 {
    a * b - b * a
}

fn e(i: usize) -> u32 {
    1 << i
}

fn e_hat(i: usize) -> u32 {
    1 << (M + i)
}

/// Orthonormal frame of `𝔭` together with a basis of `𝔨` and the
/// curvature of the symmetric space.
#[derive(Debug, Clone)]
pub struct SymmetricSpaceFrame {
    p: [M2; 3],
    k: [M2; 3],
    /// `R[k][l][i][j] = ⟨R(Y_k, Y_l) Y_i, Y_j⟩`.
    curvature: [[[[f64; 3]; 3]; 3]; 3],
    curvature_term: SuperElement<Complex64>,
}

impl Default for SymmetricSpaceFrame {
    fn default() -> Self {
        Self::new()
    }
}

impl SymmetricSpaceFrame {
    pub fn new() -> Self {
        let p = [pauli(0), pauli(1), pauli(2)];
        let i = c(0.0, 1.0);
        let k = [p[0] * i, p[1] * i, p[2] * i];
        let mut curvature = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let kab = bracket(&p[a], &p[b]);
                for x in 0..3 {
                    let r = -bracket(&kab, &p[x]);
                    for y in 0..3 {
                        curvature[a][b][x][y] = pair(&r, &p[y]);
                    }
                }
            }
        }
        let curvature_term = curvature_term(&curvature);
        SymmetricSpaceFrame { p, k, curvature, curvature_term }
    }

    pub fn p_basis(&self) -> &[M2; 3] {
        &self.p
    }

    pub fn k_basis(&self) -> &[M2; 3] {
        &self.k
    }

    /// `[Y_i, Y_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> M2 {
        bracket(&self.p[i], &self.p[j])
    }

    /// `𝔨`-coordinates of `[Y_i, Y_j]` together with the norm of its `𝔭`
    /// component (zero for a symmetric pair).
    pub fn bracket_coordinates(&self, i: usize, j: usize) -> ([f64; 3], f64) {
        let b = self.bracket(i, j);
        let (herm, _) = split(&b);
        let kc = [0, 1, 2].map(|k| pair(&b, &self.k[k]));
        (kc, herm.norm())
    }

    pub fn curvature(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.curvature[k][l][i][j]
    }

    /// `⟨R(Y_i, Y_j) Y_j, Y_i⟩` for `i ≠ j`.
    pub fn sectional_curvature(&self, i: usize, j: usize) -> f64 {
        self.curvature[i][j][j][i]
    }

    /// Largest entry of `[[Y_i,Y_j],Y_k] + cyclic`.
    pub fn jacobi_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for x in 0..3 {
                    let (pa, pb, px) = (&self.p[a], &self.p[b], &self.p[x]);
                    let s =
                        bracket(&bracket(pa, pb), px) + bracket(&bracket(pb, px), pa) + bracket(&bracket(px, pa), pb);
                    worst = worst.max(s.norm());
                }
            }
        }
        worst
    }

    /// Symbol of an element of `𝔤 = sl(2, C)` at an orbit point.
    pub fn symbol(&self, x: &M2, point: &OrbitPoint) -> Complex64 {
        let (herm, anti) = split(x);
        let y = point.y();
        let w = point.w();
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..3 {
            re += pair(&herm, &self.p[k]) * y[k];
            im += pair(&anti, &self.k[k]) * w[k];
        }
        c(re, im)
    }

    /// Curvature part of `σ_t`: `−⅛ Σ R_{klij} e^k e^l ê^i ê^j`.
    pub fn curvature_term(&self) -> SuperElement<Complex64> {
        self.curvature_term.clone()
    }
}

fn curvature_term(curvature: &[[[[f64; 3]; 3]; 3]; 3]) -> SuperElement<Complex64> {
    let mut out = SuperElement::zero(M).expect("m = 3");
    for k in 0..3 {
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let r = curvature[k][l][i][j];
                    if r == 0.0 || k == l || i == j {
                        continue;
                    }
                    out = out + monomial(&[e(k), e(l), e_hat(i), e_hat(j)], c(-r / 8.0, 0.0));
                }
            }
        }
    }
    out
}

/// Hermitian and anti-Hermitian parts.
fn split(x: &M2) -> (M2, M2) {
    let adj = x.adjoint();
    ((x + adj) * c(0.5, 0.0), (x - adj) * c(0.5, 0.0))
}

fn monomial(gens: &[u32], coeff: Complex64) -> SuperElement<Complex64> {
    let mut out = SuperElement::scalar(M, c(1.0, 0.0)).expect("m = 3");
    for &g in gens {
        out = out.wedge(&SuperElement::basis(M, g, c(1.0, 0.0)).expect("m = 3"));
    }
    out.scaled(&coeff)
}

/// A point of `𝒪_a × 𝒪̄_b` with its quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    pub weight: f64,
}

impl OrbitPoint {
    /// `v₁ − v₂`, the symbol of the `𝔭` frame.
    pub fn y(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| self.v1[k] - self.v2[k])
    }

    /// `v₁ + v₂`, the symbol of the `𝔨` frame up to `i`.
    pub fn w(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| self.v1[k] + self.v2[k])
    }

    /// `|v₁ − v₂|²`, the rate of the scalar part of `σ_t`.
    pub fn rate(&self) -> f64 {
        self.y().iter().map(|v| v * v).sum()
    }
}

/// `σ_t` with every `𝔤` element replaced by its symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolizedSigma {
    pub scalar: f64,
    pub nilpotent: SuperElement<Complex64>,
}

/// `½ Σ e^i e^j sym([Y_i, Y_j])`, or the same with hatted generators.
fn theta_p2(frame: &SymmetricSpaceFrame, point: &OrbitPoint, hatted: bool) -> SuperElement<Complex64> {
    let g = if hatted { e_hat } else { e };
    let mut out = SuperElement::zero(M).expect("m = 3");
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let s = frame.symbol(&frame.bracket(i, j), point);
            out = out + monomial(&[g(i), g(j)], s * 0.5);
        }
    }
    out
}

/// Time-independent and `t`-linear parts of the nilpotent sector.
fn sigma_parts(frame: &SymmetricSpaceFrame, point: &OrbitPoint) -> (SuperElement<Complex64>, SuperElement<Complex64>) {
    let a = frame.curvature_term() - theta_p2(frame, point, false);
    let b = theta_p2(frame, point, true);
    (a, b)
}

pub fn sigma_symbol(frame: &SymmetricSpaceFrame, point: &OrbitPoint, t: f64) -> SymbolizedSigma {
    let (a, b) = sigma_parts(frame, point);
    SymbolizedSigma { scalar: t * point.rate(), nilpotent: a + b.scaled(&c(t, 0.0)) }
}

/// `½ θ^𝔭 ∧ θ̂^𝔭` after substitution: `½ Σ y_i y_j e^i ê^j`.
fn prefactor(frame: &SymmetricSpaceFrame, point: &OrbitPoint) -> SuperElement<Complex64> {
    let y: Vec<Complex64> = frame.p.iter().map(|p| frame.symbol(p, point)).collect();
    let mut out = SuperElement::zero(M).expect("m = 3");
    for i in 0..3 {
        for j in 0..3 {
            out = out + monomial(&[e(i), e_hat(j)], y[i] * y[j] * 0.5);
        }
    }
    out
}

fn berezin_factor() -> f64 {
    PI.powf(-1.5)
}

/// Berezin integral of `½θ^𝔭∧θ̂^𝔭 ∧ exp(−σ_t)` at one point, top form
/// degree. Reference path: exponentiates `σ_t` directly.
pub fn integrand_at(frame: &SymmetricSpaceFrame, point: &OrbitPoint, t: f64) -> Result<Complex64> {
    let sigma = sigma_symbol(frame, point, t);
    let ex = sigma.nilpotent.scaled(&c(-1.0, 0.0)).exp_nilpotent()?;
    let top = prefactor(frame, point).top_of_wedge(&ex);
    Ok(top * (-sigma.scalar).exp() * berezin_factor())
}

/// Per-point data for the factored evaluation
/// `exp(−A − tB) = exp(−A) ∧ exp(−tB)` (the two parts are even, so commute).
/// `B` is nilpotent, so the Berezin integral is a polynomial in `t` times
/// `e^{−t|y|²}`; `poly[k]` is its `t^k` coefficient.
struct PointKernel {
    rate: f64,
    weight: f64,
    poly: Vec<Complex64>,
}

impl PointKernel {
    fn new(frame: &SymmetricSpaceFrame, point: &OrbitPoint) -> Result<Self> {
        let (a, b) = sigma_parts(frame, point);
        let exp_a = a.scaled(&c(-1.0, 0.0)).exp_nilpotent()?;
        let minus_b = b.scaled(&c(-1.0, 0.0));
        let mut term = prefactor(frame, point);
        let mut poly = Vec::new();
        for k in 1..=2 * M + 1 {
            if term.is_zero() {
                break;
            }
            poly.push(term.top_of_wedge(&exp_a) * berezin_factor());
            term = term.wedge(&minus_b).scaled(&c(1.0 / k as f64, 0.0));
        }
        Ok(PointKernel { rate: point.rate(), weight: point.weight, poly })
    }

    fn at(&self, t: f64) -> Complex64 {
        let p = self.poly.iter().rev().fold(c(0.0, 0.0), |acc, &x| acc * t + x);
        p * (-t * self.rate).exp()
    }
}

/// Quadrature resolution: the same sphere rule on both factors and a
/// Gauss-Legendre rule in `s = √t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WGrids {
    pub sphere_order: usize,
    pub n_phi: usize,
    pub t_nodes: usize,
}

impl Default for WGrids {
    fn default() -> Self {
        WGrids { sphere_order: 10, n_phi: 20, t_nodes: 48 }
    }
}

impl WGrids {
    fn sphere(&self, radius: f64) -> Result<SphereGrid> {
        // Liouville volume of the radius-r orbit is proportional to r.
        SphereGrid::new(self.sphere_order, self.n_phi, radius, if radius == 0.0 { 1.0 } else { radius })
    }
}

/// Product grid on `𝒪_a × 𝒪̄_b` (real weights allowed for the shift).
pub fn orbit_points(a: f64, b: f64, grids: &WGrids) -> Result<Vec<OrbitPoint>> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidArgument(format!("weights ({a}, {b}) must be non-negative")));
    }
    let first = grids.sphere(a)?;
    let second = grids.sphere(b)?;
    let second: Vec<_> = second.nodes().collect();
    let mut out = Vec::with_capacity(first.len() * second.len());
    for n1 in first.nodes() {
        for n2 in &second {
            // The second factor carries the conjugate structure: its point
            // enters through −v₂ in the p-symbol.
            out.push(OrbitPoint { v1: n1.point, v2: n2.point, weight: n1.weight * n2.weight });
        }
    }
    Ok(out)
}

/// Minimum of the scalar rate over the sampled orbit.
pub fn sampled_rate(points: &[OrbitPoint]) -> f64 {
    points.iter().map(OrbitPoint::rate).fold(f64::INFINITY, f64::min)
}

fn checked_rate(a: f64, b: f64, points: &[OrbitPoint]) -> Result<f64> {
    let rate = sampled_rate(points);
    let scale = (a + b).powi(2).max(1.0);
    if !(rate > 1e-10 * scale) {
        return Err(Error::DegenerateOrbit(format!(
            "σ_t has no decay on the orbit of ({a}, {b}): min rate {rate:.3e}"
        )));
    }
    Ok(rate)
}

/// `∫_𝒪 ∫^B ½θ^𝔭∧θ̂^𝔭 exp(−σ_t)` at a single `t`.
pub fn t_integrand(a: f64, b: f64, grids: &WGrids, t: f64) -> Result<Complex64> {
    let frame = SymmetricSpaceFrame::new();
    let points = orbit_points(a, b, grids)?;
    let parts = points
        .par_iter()
        .map(|p| PointKernel::new(&frame, p).map(|k| k.at(t) * k.weight))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_complex(&parts))
}

fn sum_complex(xs: &[Complex64]) -> Complex64 {
    c(compensated_sum(xs.iter().map(|z| z.re)), compensated_sum(xs.iter().map(|z| z.im)))
}

/// Uncalibrated `W₀` on a given `t`-rule.
fn w0_raw_on(a: f64, b: f64, grids: &WGrids, tgrid: &HalfLineGrid) -> Result<Complex64> {
    let frame = SymmetricSpaceFrame::new();
    let points = orbit_points(a, b, grids)?;
    checked_rate(a, b, &points)?;
    let parts = points
        .par_iter()
        .map(|p| {
            let k = PointKernel::new(&frame, p)?;
            let vals: Vec<Complex64> = tgrid.nodes().iter().zip(tgrid.weights()).map(|(&t, &w)| k.at(t) * w).collect();
            Ok(sum_complex(&vals) * k.weight)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_complex(&parts))
}

fn t_grid_for(rate: f64, grids: &WGrids) -> Result<HalfLineGrid> {
    HalfLineGrid::for_decay_rate(rate, grids.t_nodes)
}

/// `W₀` before the overall constant is applied.
pub fn w0_raw(a: f64, b: f64, grids: &WGrids) -> Result<Complex64> {
    let points = orbit_points(a, b, grids)?;
    let rate = checked_rate(a, b, &points)?;
    w0_raw_on(a, b, grids, &t_grid_for(rate, grids)?)
}

/// The overall constant: one of `±(2πi)^{(1−d)/2}`, `d = 0..3`, fixed by the
/// single value `W₀(1, 0) = 2/π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub raw: Complex64,
    pub factor: Complex64,
    pub degree: u32,
    pub sign: f64,
}

pub const CALIBRATION_TARGET: f64 = 2.0 / PI;

pub fn calibrate(grids: &WGrids) -> Result<Calibration> {
    let raw = w0_raw(1.0, 0.0, grids)?;
    let two_pi_i = c(0.0, 2.0 * PI);
    let mut best: Option<(f64, Calibration)> = None;
    for degree in 0..=3u32 {
        for sign in [1.0, -1.0] {
            let factor = two_pi_i.powf((1.0 - degree as f64) / 2.0) * sign;
            let miss = (factor * raw - CALIBRATION_TARGET).norm();
            if best.as_ref().is_none_or(|(m, _)| miss < *m) {
                best = Some((miss, Calibration { raw, factor, degree, sign }));
            }
        }
    }
    let (miss, cal) = best.expect("candidates");
    if miss > 1e-3 * CALIBRATION_TARGET {
        return Err(Error::CalibrationFailed(format!("closest candidate misses 2/π by {miss:.3e}")));
    }
    Ok(cal)
}

/// Calibrated `W₀` with the size of its imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WValue {
    pub value: f64,
    pub imag: f64,
}

pub fn w0_calibrated(a: u32, b: u32, grids: &WGrids, cal: &Calibration) -> Result<WValue> {
    let z = cal.factor * w0_raw(a as f64, b as f64, grids)?;
    Ok(WValue { value: z.re, imag: z.im })
}

/// Per-volume `W₀` for weights `(a, b)`; errors if `σ_t` fails to decay
/// somewhere on the orbit.
pub fn w0_numeric(a: u32, b: u32, grids: &WGrids) -> Result<f64> {
    let cal = calibrate(grids)?;
    Ok(w0_calibrated(a, b, grids, &cal)?.value)
}

pub const DEFAULT_STEPS: [f64; 2] = [0.2, 0.1];

/// Derivative of `W₀` at `(a, b)` along `(1 + a', 1 + b')` (along
/// `(1 + a', 0)` when `b = 0`) by central differences over `steps`
/// (decreasing, each half the previous) with Richardson extrapolation.
/// All evaluations share one `t`-rule.
pub fn w1_by_weight_shift(a: u32, b: u32, a_shift: i64, b_shift: i64, grids: &WGrids, steps: &[f64]) -> Result<f64> {
    if steps.is_empty() || steps.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    if steps.windows(2).any(|w| (w[1] * 2.0 - w[0]).abs() > 1e-12 * w[0]) {
        return Err(Error::InvalidArgument("each step must halve the previous one".into()));
    }
    let (af, bf) = (a as f64, b as f64);
    let da = 1.0 + a_shift as f64;
    let db = if b == 0 { 0.0 } else { 1.0 + b_shift as f64 };
    let gap = af - bf;
    let mut shifted = Vec::new();
    for &h in steps {
        for s in [h, -h] {
            let (x, y) = (af + s * da, bf + s * db);
            if x < 0.0 || y < 0.0 || (x - y) * gap <= 0.0 || (x - y).abs() < 0.5 * gap.abs() {
                return Err(Error::InvalidArgument(format!(
                    "step {h} moves ({a}, {b}) to ({x}, {y}), too close to the degeneracy locus"
                )));
            }
            shifted.push((x, y));
        }
    }
    let cal = calibrate(grids)?;
    let rate = shifted
        .iter()
        .map(|&(x, y)| orbit_points(x, y, grids).map(|p| sampled_rate(&p)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let tgrid = t_grid_for(rate, grids)?;
    let values = shifted
        .iter()
        .map(|&(x, y)| w0_raw_on(x, y, grids, &tgrid).map(|z| (cal.factor * z).re))
        .collect::<Result<Vec<_>>>()?;
    let mut table: Vec<f64> =
        steps.iter().enumerate().map(|(k, &h)| (values[2 * k] - values[2 * k + 1]) / (2.0 * h)).collect();
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    Ok(table[0])
}

/// Least-squares slope of `ln |I(t)|` over the given times.
pub fn decay_rate_fit(a: u32, b: u32, grids: &WGrids, times: &[f64]) -> Result<f64> {
    let ys = times
        .iter()
        .map(|&t| t_integrand(a as f64, b as f64, grids, t).map(|z| z.norm().ln()))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::fit::least_squares(times, &ys).slope)
}
