//! Duistermaat-Heckman integrals over coadjoint orbits of SU(2).
//!
//! An orbit of symplectic volume `m` is a round sphere on which the moment
//! map, paired with the unit Cartan direction, is `m·u` with `u = cos θ`.
//! The Liouville measure is `(m/2) du (dφ/2π)`, so
//! `R_m(t) = ∫ e^{i m t u} (m/2) du = sin(m t) / t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, gauss_legendre, SphereGrid};

/// Value of a Duistermaat-Heckman integral with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DHValue {
    pub value: Complex64,
    pub error: f64,
}

/// Coadjoint orbit of SU(2) with its quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSU2 {
    mass: f64,
    grid: SphereGrid,
}

impl OrbitSU2 {
    pub fn new(mass: f64, order: usize) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidArgument(format!("orbit mass {mass} must be positive")));
        }
        if order < 2 {
            return Err(Error::InvalidArgument("orbit grid order must be >= 2".into()));
        }
        let grid = SphereGrid::new(order, 2 * order, mass, mass)?;
        Ok(OrbitSU2 { mass, grid })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    /// `∫_O Π_k (2πi⟨μ, Y_k⟩)^{α_k} e^ω` for the basis `Y_k = iσ_k` of su(2),
    /// where `⟨2πμ, iσ_k⟩ = m·n_k` on the unit sphere.
    pub fn derivative_moment(&self, alpha: [u32; 3]) -> Result<Complex64> {
        let total: u32 = alpha.iter().sum();
        if total > 8 {
            return Err(Error::InvalidArgument(format!("moment order {total} exceeds 8")));
        }
        if 2 * self.grid.order() <= total as usize + 1 || self.grid.n_phi() <= total as usize {
            return Err(Error::QuadratureTooCoarse(format!("order {} for moment degree {total}", self.grid.order())));
        }
        let phase = Complex64::new(0.0, 1.0).powu(total);
        let re = self.grid.integrate(|n| (0..3).map(|k| n.point[k].powi(alpha[k] as i32)).product::<f64>());
        Ok(phase * re)
    }
}

/// Gauss-Legendre evaluation of the φ-reduced Duistermaat-Heckman integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhQuadrature {
    /// Nodes used when the oscillation is mild.
    pub min_order: usize,
    /// Largest order the evaluator will widen to.
    pub max_order: usize,
}

impl Default for DhQuadrature {
    fn default() -> Self {
        DhQuadrature { min_order: 24, max_order: 2048 }
    }
}

/// Nodes needed to resolve `e^{iωu}` on [-1, 1] to near machine precision.
pub fn required_order(omega: f64) -> usize {
    (0.75 * omega.abs()).ceil() as usize + 16
}

impl DhQuadrature {
    /// `(m/2) ∫_{-1}^{1} e^{imtu} du` with the order widened to the
    /// oscillation `m·t`.
    pub fn evaluate(&self, mass: f64, t: f64) -> Result<DHValue> {
        let order = required_order(mass * t).max(self.min_order);
        if order > self.max_order {
            return Err(Error::QuadratureTooCoarse(format!(
                "oscillation m·t = {} needs {order} nodes (> {})",
                mass * t,
                self.max_order
            )));
        }
        dh_quadrature_with_order(mass, t, order)
    }
}

/// Fixed-order evaluation; fails if the order cannot resolve `m·t`.
pub fn dh_quadrature_with_order(mass: f64, t: f64, order: usize) -> Result<DHValue> {
    if order < required_order(mass * t) {
        return Err(Error::QuadratureTooCoarse(format!("order {order} cannot resolve oscillation m·t = {}", mass * t)));
    }
    let value = dh_rule(mass, t, order)?;
    let coarse = dh_rule(mass, t, (3 * order).div_ceil(4))?;
    Ok(DHValue { value, error: (value - coarse).norm() })
}

fn dh_rule(mass: f64, t: f64, order: usize) -> Result<Complex64> {
    let (x, w) = gauss_legendre(order)?;
    let re = compensated_sum(x.iter().zip(&w).map(|(&u, &w)| w * (mass * t * u).cos()));
    let im = compensated_sum(x.iter().zip(&w).map(|(&u, &w)| w * (mass * t * u).sin()));
    Ok(Complex64::new(re, im) * (mass / 2.0))
}

pub fn dh_quadrature(orbit: &OrbitSU2, t: f64) -> Result<DHValue> {
    dh_quadrature_with_order(orbit.mass, t, orbit.grid.order())
}

/// `sin(m t) / t`, with value `m` at `t = 0`.
pub fn dh_closed_form(mass: f64, t: f64) -> f64 {
    let x = mass * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        mass * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
    } else {
        x.sin() / t
    }
}

/// `R_{m1}(t1) · R_{m2}(t2)`, the second factor conjugated when the second
/// orbit carries the opposite symplectic form. A zero mass is a point orbit
/// contributing the factor 1.
pub fn dh_product(m1: f64, m2: f64, t1: f64, t2: f64, conjugate_second: bool, dh: &DhQuadrature) -> Result<DHValue> {
    let factor = |m: f64, t: f64| -> Result<DHValue> {
        if m == 0.0 {
            Ok(DHValue { value: Complex64::new(1.0, 0.0), error: 0.0 })
        } else {
            dh.evaluate(m, t)
        }
    };
    let f1 = factor(m1, t1)?;
    let mut f2 = factor(m2, t2)?;
    if conjugate_second {
        f2.value = f2.value.conj();
    }
    Ok(DHValue { value: f1.value * f2.value, error: f1.error * f2.value.norm() + f2.error * f1.value.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_examples() {
        let dh = DhQuadrature::default();
        assert!((dh.evaluate(1.0, 1e-12).unwrap().value - 1.0).norm() < 1e-12);
        assert!((dh.evaluate(2.0, PI / 4.0).unwrap().value.re - 4.0 / PI).abs() < 1e-12);
        assert!(dh.evaluate(3.0, PI).unwrap().value.norm() < 1e-10);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(dh_closed_form(7.0, 0.0), 7.0);
        assert!((dh_closed_form(5.0, 0.2) - 1f64.sin() / 0.2).abs() < 1e-14);
        assert!((dh_closed_form(5.0, 0.2) - 4.20735).abs() < 1e-5);
        assert!((dh_closed_form(1.0, PI / 2.0) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let dh = DhQuadrature::default();
        for m in 1..=12 {
            for i in 0..=60 {
                let t = 3.0 * i as f64 / 60.0;
                let q = dh.evaluate(m as f64, t).unwrap();
                let c = dh_closed_form(m as f64, t);
                assert!((q.value.re - c).abs() <= 1e-10 * c.abs().max(1.0), "m={m} t={t}");
                assert!(q.value.im.abs() < 1e-12);
                let neg = dh.evaluate(m as f64, -t).unwrap();
                assert!((neg.value - q.value).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn coarse_grid_is_flagged() {
        assert!(matches!(dh_quadrature_with_order(10.0, 3.0, 20), Err(Error::QuadratureTooCoarse(_))));
        let orbit = OrbitSU2::new(10.0, 40).unwrap();
        assert!(dh_quadrature(&orbit, 3.0).is_ok());
    }

    #[test]
    fn moments() {
        let orbit = OrbitSU2::new(3.0, 16).unwrap();
        assert!((orbit.derivative_moment([0, 0, 0]).unwrap() - 3.0).norm() < 1e-13);
        let second = orbit.derivative_moment([0, 0, 2]).unwrap();
        assert!((second - Complex64::new(-27.0 / 3.0, 0.0)).norm() < 1e-12);
        for alpha in [[1, 0, 0], [0, 0, 3], [2, 1, 0], [1, 1, 1], [0, 3, 2]] {
            assert!(orbit.derivative_moment(alpha).unwrap().norm() < 1e-12, "{alpha:?}");
        }
        // Rotation invariance: the same second moment along every axis.
        let x2 = orbit.derivative_moment([2, 0, 0]).unwrap();
        assert!((x2 - second).norm() < 1e-12);
    }

    #[test]
    fn product_examples() {
        let dh = DhQuadrature::default();
        let v = dh_product(2.0, 3.0, 0.1, 0.2, true, &dh).unwrap().value;
        let expect = (0.2f64.sin() / 0.1) * (0.6f64.sin() / 0.2);
        assert!((v.re - expect).abs() < 1e-12);
        let point = dh_product(2.0, 0.0, 0.4, 0.9, true, &dh).unwrap().value;
        assert!((point - dh.evaluate(2.0, 0.4).unwrap().value).norm() < 1e-15);
        let origin = dh_product(2.0, 3.0, 0.0, 0.0, false, &dh).unwrap().value;
        assert!((origin - 6.0).norm() < 1e-13);
    }
}
