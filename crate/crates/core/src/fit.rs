//! Log-log rate fits for remainder sequences.

use serde::Serialize;

/// Least-squares line through `(ln p, ln r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Residuals over a list of tensor powers with their fitted decay rate.
///
/// The fit is absent when some residual is not a positive finite number
/// above the zero floor (identities that hold exactly have no rate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub p_list: Vec<usize>,
    pub residuals: Vec<f64>,
    pub fit: Option<LogLogFit>,
}

impl ExpansionFit {
    pub fn new(p_list: Vec<usize>, residuals: Vec<f64>, zero_floor: f64) -> Self {
        assert_eq!(p_list.len(), residuals.len());
        let fittable = residuals.len() >= 2 && residuals.iter().all(|r| r.is_finite() && *r > zero_floor);
        let fit = if fittable {
            let xs: Vec<f64> = p_list.iter().map(|&p| (p as f64).ln()).collect();
            let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
            Some(least_squares(&xs, &ys))
        } else {
            None
        };
        ExpansionFit { p_list, residuals, fit }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }

    /// Slope within `tol` of `target` and `r² ≥ r2_floor`.
    pub fn accepts(&self, target: f64, tol: f64, r2_floor: f64) -> bool {
        match self.fit {
            Some(f) => (f.slope - target).abs() <= tol && f.r_squared >= r2_floor,
            None => false,
        }
    }
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> LogLogFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LogLogFit { slope, intercept, r_squared }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let ps = vec![8, 16, 32, 64];
        let rs = ps.iter().map(|&p| 3.0 / (p as f64).powi(2)).collect();
        let f = ExpansionFit::new(ps, rs, 0.0);
        let fit = f.fit.unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(f.accepts(-2.0, 1e-9, 0.99));
    }

    #[test]
    fn zero_residuals_have_no_fit() {
        let f = ExpansionFit::new(vec![1, 2, 3], vec![0.0, 0.0, 0.0], 1e-13);
        assert!(f.fit.is_none());
        assert!(!f.accepts(-1.0, 1.0, 0.0));
    }
}
