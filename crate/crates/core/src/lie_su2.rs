//! Symmetric-power representations of SU(2)/SL(2,C), their characters, the
//! j-factor of su(2) and the Kirillov character identity.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::dh_orbit::DhQuadrature;
use crate::error::{Error, Result};

/// Dominant weight, in units of the fundamental weight: `a` labels `Sym^a C²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HighestWeight {
    pub a: u32,
}

impl HighestWeight {
    pub fn new(a: u32) -> Self {
        HighestWeight { a }
    }

    /// Symplectic volume of the orbit through the weight shifted by ρ.
    pub fn shifted_mass(self) -> f64 {
        self.a as f64 + 1.0
    }
}

/// Matrix of a group element in `Sym^a C²`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepMatrix {
    pub weight: HighestWeight,
    pub entries: DMatrix<Complex64>,
}

pub fn irrep_dimension(w: HighestWeight) -> usize {
    w.a as usize + 1
}

/// Below this `|sin t|` the character is evaluated by its Taylor expansion.
const SIN_BRANCH: f64 = 1e-6;

/// Character of `Sym^a C²` at `exp(A)`, `A = diag(it, -it)`:
/// `sin((a+1)t) / sin t`.
pub fn character(w: HighestWeight, t: f64) -> Complex64 {
    let m = w.a as f64 + 1.0;
    let s = t.sin();
    if s.abs() >= SIN_BRANCH {
        return Complex64::new((m * t).sin() / s, 0.0);
    }
    // t = kπ + δ with δ small.
    let k = (t / std::f64::consts::PI).round();
    let delta = t - k * std::f64::consts::PI;
    let sign = if (k as i64 * w.a as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let d2 = delta * delta;
    let series = m * (1.0 - (m * m - 1.0) * d2 / 6.0 + (m * m - 1.0) * (3.0 * m * m - 7.0) * d2 * d2 / 360.0);
    Complex64::new(sign * series, 0.0)
}

/// `Σ_k e^{i(a-2k)t}`: the character as a sum over weights.
pub fn character_by_weights(w: HighestWeight, t: f64) -> Complex64 {
    (0..=w.a).map(|k| Complex64::from_polar(1.0, (w.a as f64 - 2.0 * k as f64) * t)).sum()
}

/// `exp(A)` for the Cartan element `A = diag(it, -it)`.
pub fn cartan_exp(t: f64) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::from_polar(1.0, t),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, -t),
    )
}

/// Matrix of `g` acting on homogeneous polynomials of degree `a`, in the
/// monomial basis `x^k y^{a-k}` (index `k`), with `y` the first and `x`
/// the second basis vector of `C²`.
pub fn sym_power_matrix(w: HighestWeight, g: &Matrix2<Complex64>) -> Result<IrrepMatrix> {
    let det = g.determinant();
    if (det - Complex64::new(1.0, 0.0)).norm() >= 1e-12 {
        return Err(Error::InvalidArgument(format!("det g = {det} is not 1")));
    }
    let a = w.a as usize;
    // Images of y and x as (coefficient of y, coefficient of x).
    let gy = [g[(0, 0)], g[(1, 0)]];
    let gx = [g[(0, 1)], g[(1, 1)]];
    let mut entries = DMatrix::zeros(a + 1, a + 1);
    for k in 0..=a {
        // poly[j] is the coefficient of x^j y^{deg - j}.
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..k {
            poly = mul_linear(&poly, gx);
        }
        for _ in k..a {
            poly = mul_linear(&poly, gy);
        }
        for (j, c) in poly.into_iter().enumerate() {
            entries[(j, k)] = c;
        }
    }
    Ok(IrrepMatrix { weight: w, entries })
}

fn mul_linear(poly: &[Complex64], lin: [Complex64; 2]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (j, &c) in poly.iter().enumerate() {
        out[j] += c * lin[0];
        out[j + 1] += c * lin[1];
    }
    out
}

fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Eigenvalues of `ad(A)` on `su(2) ⊗ C` for `A = diag(it, -it)`.
pub fn ad_spectrum(t: f64) -> [Complex64; 3] {
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0 * t), Complex64::new(0.0, -2.0 * t)]
}

/// `det(sinh(ad A / 2) / (ad A / 2)) = (sin t / t)²`.
pub fn j_factor(t: f64) -> f64 {
    ad_spectrum(t).iter().map(|&x| sinhc(x / 2.0)).product::<Complex64>().re
}

/// `|χ_a(t) - j^{-1/2}(t)·R_{a+1}(t)|` with the Duistermaat-Heckman integral
/// evaluated by quadrature over the orbit of the shifted weight.
pub fn kirillov_residual(w: HighestWeight, t: f64, dh: &DhQuadrature) -> Result<f64> {
    let j = j_factor(t);
    if j <= 0.0 {
        return Err(Error::InvalidArgument(format!("j-factor vanishes at t = {t}")));
    }
    let r = dh.evaluate(w.shifted_mass(), t)?;
    Ok((character(w, t) - r.value / j.sqrt()).norm())
}
