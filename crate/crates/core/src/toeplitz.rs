//! Berezin-Toeplitz quantization on CP¹ with the line bundle O(1).
//!
//! Sections of `O(p)` are sampled on a product grid of the unit sphere
//! (mass 1, i.e. the normalized area `c₁`). The seed basis is
//! `√((p+1)C(p,k)) x^{k/2} (1-x)^{(p-k)/2} e^{ikφ}` with `x = (1+u)/2`, the
//! pointwise norm of `z^k` in a unit frame; it is re-orthonormalized against
//! the discrete Gram matrix.
//!
//! The Poisson bracket is taken for the symplectic form `2πc₁` with
//! `ι_{ξ_f}ω = df` and `{f, g} = ξ_f g`, which on the unit sphere reads
//! `{f, g}(n) = 2 n·(∇f × ∇g)`; in particular `{x, y} = 2z`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::ExpansionFit;
use crate::quadrature::{ln_binomial, CompensatedSum, SphereGrid};

type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A function on the unit sphere given as an expression in the ambient
/// coordinates, so that values and gradients are available in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Const(Complex64),
    X,
    Y,
    Z,
    Add(Box<Symbol>, Box<Symbol>),
    Mul(Box<Symbol>, Box<Symbol>),
    Exp(Box<Symbol>),
    Recip(Box<Symbol>),
}

impl Symbol {
    pub fn constant(c: f64) -> Symbol {
        Symbol::Const(Complex64::new(c, 0.0))
    }

    /// `x + iy = e^{iφ}√(1-u²)`.
    pub fn equatorial() -> Symbol {
        Symbol::X + Symbol::Const(Complex64::new(0.0, 1.0)) * Symbol::Y
    }

    pub fn exp(self) -> Symbol {
        Symbol::Exp(Box::new(self))
    }

    pub fn recip(self) -> Symbol {
        Symbol::Recip(Box::new(self))
    }

    pub fn scale(self, c: f64) -> Symbol {
        Symbol::constant(c) * self
    }

    /// Symbols addressable by name: `1`, `u` (= `z`), `u2`, `x`, `y`, `z`,
    /// `equatorial`, and `c+u` for a decimal constant `c`.
    pub fn from_name(name: &str) -> Result<Symbol> {
        let s = match name {
            "1" => Symbol::constant(1.0),
            "u" | "z" => Symbol::Z,
            "u2" => Symbol::Z * Symbol::Z,
            "x" => Symbol::X,
            "y" => Symbol::Y,
            "equatorial" => Symbol::equatorial(),
            _ => match name.strip_suffix("+u").map(str::parse::<f64>) {
                Some(Ok(c)) => Symbol::constant(c) + Symbol::Z,
                _ => return Err(Error::InvalidArgument(format!("unknown symbol '{name}'"))),
            },
        };
        Ok(s)
    }

    /// Value and ambient gradient at a point of the unit sphere.
    pub fn eval(&self, n: [f64; 3]) -> (Complex64, [Complex64; 3]) {
        let unit = |k: usize| {
            let mut g = [ZERO; 3];
            g[k] = ONE;
            g
        };
        match self {
            Symbol::Const(c) => (*c, [ZERO; 3]),
            Symbol::X => (n[0].into(), unit(0)),
            Symbol::Y => (n[1].into(), unit(1)),
            Symbol::Z => (n[2].into(), unit(2)),
            Symbol::Add(f, g) => {
                let (a, da) = f.eval(n);
                let (b, db) = g.eval(n);
                (a + b, [da[0] + db[0], da[1] + db[1], da[2] + db[2]])
            }
            Symbol::Mul(f, g) => {
                let (a, da) = f.eval(n);
                let (b, db) = g.eval(n);
                (a * b, [da[0] * b + a * db[0], da[1] * b + a * db[1], da[2] * b + a * db[2]])
            }
            Symbol::Exp(f) => {
                let (a, da) = f.eval(n);
                let e = a.exp();
                (e, [e * da[0], e * da[1], e * da[2]])
            }
            Symbol::Recip(f) => {
                let (a, da) = f.eval(n);
                let r = 1.0 / a;
                let d = -r * r;
                (r, [d * da[0], d * da[1], d * da[2]])
            }
        }
    }

    pub fn value(&self, n: [f64; 3]) -> Complex64 {
        self.eval(n).0
    }

    /// Values on the grid, in node order.
    pub fn sample(&self, grid: &SphereGrid) -> Vec<Complex64> {
        grid.nodes().map(|node| self.value(node.point)).collect()
    }
}

impl std::ops::Add for Symbol {
    type Output = Symbol;
    fn add(self, rhs: Symbol) -> Symbol {
        Symbol::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Symbol {
    type Output = Symbol;
    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol::Mul(Box::new(self), Box::new(rhs))
    }
}

/// `{f, g}` sampled on the grid.
pub fn poisson_bracket(f: &Symbol, g: &Symbol, grid: &SphereGrid) -> Vec<Complex64> {
    grid.nodes()
        .map(|node| {
            let n = node.point;
            let (_, a) = f.eval(n);
            let (_, b) = g.eval(n);
            let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            2.0 * (cross[0] * n[0] + cross[1] * n[1] + cross[2] * n[2])
        })
        .collect()
}

/// Orthonormal basis of holomorphic sections of `O(p)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct HolomorphicBasis {
    p: usize,
    grid: SphereGrid,
    /// Seed profiles `f_k(u_r)`, ring-major: `profiles[r][k]`.
    profiles: Vec<Vec<f64>>,
    /// `L^{-1}` for the Cholesky factor of the seed Gram matrix.
    correction: CMatrix,
    seed_gram: CMatrix,
    values: CMatrix,
}

impl HolomorphicBasis {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.p + 1
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    /// `(p+1) × |grid|` orthonormal section values.
    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// Gram matrix of the seed sections under the grid quadrature.
    pub fn seed_gram(&self) -> &CMatrix {
        &self.seed_gram
    }

    /// Gram matrix of the orthonormalized sections.
    pub fn gram(&self) -> CMatrix {
        &self.correction * &self.seed_gram * self.correction.adjoint()
    }

    /// `Σ_k |s_k|²` at every node.
    pub fn bergman_diagonal(&self) -> Vec<f64> {
        self.values.column_iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// `Σ_k ∫ H |s_k|²`, the trace of `T_H` computed from sampled sections.
    pub fn trace_by_sections(&self, h: &[Complex64]) -> Complex64 {
        let weights: Vec<f64> = self.grid.nodes().map(|n| n.weight).collect();
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (col, (&w, &hv)) in self.values.column_iter().zip(weights.iter().zip(h)) {
            let dens: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            let v = hv * (w * dens);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// `Σ_n w_n conj(s_j(n)) h(n) s_k(n)` in the seed basis, evaluated ring by
    /// ring: the azimuthal sum reduces to the discrete Fourier coefficient
    /// of `h` at frequency `j - k`.
    fn seed_matrix(&self, h: &[Complex64]) -> CMatrix {
        let p = self.p;
        let n_phi = self.grid.n_phi();
        let roots: Vec<Complex64> =
            (0..n_phi).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n_phi as f64)).collect();
        let mut out = CMatrix::zeros(p + 1, p + 1);
        for (r, &(_, ring_weight)) in self.grid.rings().iter().enumerate() {
            let ring = &h[r * n_phi..(r + 1) * n_phi];
            let w = ring_weight / n_phi as f64;
            // hat[d + p] = Σ_j w h_j e^{i d φ_j}, d = k - j ∈ [-p, p].
            let hat: Vec<Complex64> = (0..=2 * p)
                .map(|idx| {
                    let d = idx as i64 - p as i64;
                    let mut acc = ZERO;
                    for (j, &hv) in ring.iter().enumerate() {
                        let e = (d * j as i64).rem_euclid(n_phi as i64) as usize;
                        acc += hv * roots[e];
                    }
                    acc * w
                })
                .collect();
            let f = &self.profiles[r];
            for j in 0..=p {
                for k in 0..=p {
                    out[(j, k)] += hat[k + p - j] * (f[j] * f[k]);
                }
            }
        }
        out
    }
}

/// Seed section profile `√((p+1)C(p,k)) x^{k/2}(1-x)^{(p-k)/2}`.
pub fn seed_profile(p: usize, k: usize, u: f64) -> f64 {
    let x = (1.0 + u) / 2.0;
    let lx = if k == 0 { 0.0 } else { 0.5 * k as f64 * x.ln() };
    let ly = if k == p { 0.0 } else { 0.5 * (p - k) as f64 * (1.0 - x).ln() };
    (0.5 * (((p + 1) as f64).ln() + ln_binomial(p, k)) + lx + ly).exp()
}

/// Builds the orthonormalized basis; the grid must integrate the Gram
/// products exactly (`2·order - 1 ≥ 2p + 2` in `u`, `n_phi ≥ 2p + 2`).
pub fn build_basis(p: usize, grid: &SphereGrid) -> Result<HolomorphicBasis> {
    if p == 0 {
        return Err(Error::InvalidArgument("tensor power p must be >= 1".into()));
    }
    if grid.is_point() || (grid.mass() - 1.0).abs() > 1e-12 || (grid.radius() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("basis grid must be the unit sphere with mass 1".into()));
    }
    if 2 * grid.order() < 2 * p + 3 || grid.n_phi() < 2 * p + 2 {
        return Err(Error::QuadratureTooCoarse(format!(
            "grid (order {}, n_phi {}) cannot integrate sections of O({p})",
            grid.order(),
            grid.n_phi()
        )));
    }
    let profiles: Vec<Vec<f64>> =
        grid.rings().iter().map(|&(u, _)| (0..=p).map(|k| seed_profile(p, k, u)).collect()).collect();
    let mut basis = HolomorphicBasis {
        p,
        grid: grid.clone(),
        profiles,
        correction: CMatrix::identity(p + 1, p + 1),
        seed_gram: CMatrix::zeros(p + 1, p + 1),
        values: CMatrix::zeros(0, 0),
    };
    let ones = vec![ONE; grid.len()];
    let gram = basis.seed_matrix(&ones);
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eig = gram.clone().symmetric_eigenvalues().min();
    if !(min_eig > 1e-8) {
        return Err(Error::IllConditionedGrid(format!("smallest eigenvalue {min_eig:.3e}")));
    }
    let chol =
        gram.clone().cholesky().ok_or_else(|| Error::IllConditionedGrid("Cholesky factorization failed".into()))?;
    let linv = chol
        .l()
        .solve_lower_triangular(&CMatrix::identity(p + 1, p + 1))
        .ok_or_else(|| Error::IllConditionedGrid("singular Cholesky factor".into()))?;
    basis.seed_gram = gram;
    basis.correction = linv;
    let dev = (basis.gram() - CMatrix::identity(p + 1, p + 1)).camax();
    if dev > 1e-8 {
        return Err(Error::IllConditionedGrid(format!("corrected Gram deviates by {dev:.3e}")));
    }
    // Corrected sections s' = conj(L^{-1}) s.
    let n_phi = grid.n_phi();
    let mut seed = CMatrix::zeros(p + 1, grid.len());
    for (r, f) in basis.profiles.iter().enumerate() {
        for j in 0..n_phi {
            let phi = grid.phi(j);
            for k in 0..=p {
                seed[(k, r * n_phi + j)] = Complex64::from_polar(f[k], k as f64 * phi);
            }
        }
    }
    basis.values = basis.correction.map(|z| z.conj()) * seed;
    Ok(basis)
}

/// Quantized observable `T_{H,p} = P_p H P_p` in an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzMatrix {
    pub p: usize,
    pub entries: CMatrix,
}

impl ToeplitzMatrix {
    /// Largest entry of `T - T†`.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }
}

/// `⟨s_j, H s_k⟩` by grid quadrature, `h` sampled in node order.
pub fn toeplitz_matrix(h: &[Complex64], basis: &HolomorphicBasis) -> Result<ToeplitzMatrix> {
    if h.len() != basis.grid.len() {
        return Err(Error::InvalidArgument(format!(
            "symbol has {} samples, grid has {} nodes",
            h.len(),
            basis.grid.len()
        )));
    }
    if let Some(bad) = h.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("symbol is unbounded on the grid ({bad})")));
    }
    let seed = basis.seed_matrix(h);
    let entries = &basis.correction * seed * basis.correction.adjoint();
    Ok(ToeplitzMatrix { p: basis.p, entries })
}

pub fn quantize(symbol: &Symbol, basis: &HolomorphicBasis) -> Result<ToeplitzMatrix> {
    toeplitz_matrix(&symbol.sample(&basis.grid), basis)
}

fn is_hermitian(m: &CMatrix) -> bool {
    let scale = m.camax().max(f64::MIN_POSITIVE);
    (m - m.adjoint()).camax() <= 1e-12 * scale
}

/// Operator norm: largest |eigenvalue| for Hermitian matrices, largest
/// singular value otherwise.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if is_hermitian(m) {
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().fold(0.0, |acc: f64, &l| acc.max(l.abs()))
    } else {
        m.clone().singular_values().max()
    }
}

fn hermitian_part(t: &ToeplitzMatrix) -> Result<CMatrix> {
    let asym = t.asymmetry();
    if asym > 1e-10 {
        return Err(Error::NonRealSymbol { max_imag: asym });
    }
    Ok((&t.entries + t.entries.adjoint()) * Complex64::new(0.5, 0.0))
}

/// `f(T)` for a Hermitian `T` through its eigendecomposition.
pub fn hermitian_function<F: Fn(f64) -> f64>(t: &ToeplitzMatrix, f: F) -> Result<CMatrix> {
    let eig = hermitian_part(t)?.symmetric_eigen();
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(f(l), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Grid sizing for the expansion sweeps.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToeplitzConfig {
    /// Gauss-Legendre order in `u` is `p + extra_order`.
    pub extra_order: usize,
    /// Azimuthal points are `2p + extra_phi`.
    pub extra_phi: usize,
    /// Residuals at or below this are exact zeros and carry no rate.
    pub zero_floor: f64,
}

impl Default for ToeplitzConfig {
    fn default() -> Self {
        ToeplitzConfig { extra_order: 48, extra_phi: 8, zero_floor: 1e-12 }
    }
}

impl ToeplitzConfig {
    pub fn grid(&self, p: usize) -> Result<SphereGrid> {
        SphereGrid::new(p + self.extra_order.max(2), 2 * p + self.extra_phi.max(2), 1.0, 1.0)
    }

    pub fn basis(&self, p: usize) -> Result<HolomorphicBasis> {
        build_basis(p, &self.grid(p)?)
    }
}

fn check_p_list(p_list: &[usize]) -> Result<()> {
    if p_list.is_empty() || p_list.contains(&0) || p_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("p-list {p_list:?} must be strictly increasing and positive")));
    }
    Ok(())
}

fn sweep<F>(p_list: &[usize], cfg: &ToeplitzConfig, residual: F) -> Result<ExpansionFit>
where
    F: Fn(&HolomorphicBasis) -> Result<f64> + Sync,
{
    check_p_list(p_list)?;
    let residuals = p_list.par_iter().map(|&p| residual(&cfg.basis(p)?)).collect::<Result<Vec<f64>>>()?;
    Ok(ExpansionFit::new(p_list.to_vec(), residuals, cfg.zero_floor))
}

/// `r(p) = |p⁻¹ Tr T_{H,p} - ∫ H c₁|`.
pub fn leading_symbol_residual(h: &Symbol, p_list: &[usize], cfg: &ToeplitzConfig) -> Result<ExpansionFit> {
    sweep(p_list, cfg, |basis| {
        let grid = basis.grid();
        let samples = h.sample(grid);
        let t = toeplitz_matrix(&samples, basis)?;
        let integral = {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for (node, v) in grid.nodes().zip(&samples) {
                re.add(node.weight * v.re);
                im.add(node.weight * v.im);
            }
            Complex64::new(re.value(), im.value())
        };
        Ok((t.entries.trace() / basis.p() as f64 - integral).norm())
    })
}

/// `‖T_{H,p} T_{H',p} - T_{HH',p}‖`.
pub fn product_defect(h: &Symbol, h2: &Symbol, p_list: &[usize], cfg: &ToeplitzConfig) -> Result<ExpansionFit> {
    sweep(p_list, cfg, |basis| {
        let a = quantize(h, basis)?;
        let b = quantize(h2, basis)?;
        let ab = quantize(&(h.clone() * h2.clone()), basis)?;
        Ok(operator_norm(&(&a.entries * &b.entries - &ab.entries)))
    })
}

/// `‖p [T_{H,p}, T_{H',p}] - i T_{{H,H'},p}‖`.
pub fn poisson_commutator_residual(
    h: &Symbol,
    h2: &Symbol,
    p_list: &[usize],
    cfg: &ToeplitzConfig,
) -> Result<ExpansionFit> {
    sweep(p_list, cfg, |basis| {
        let a = quantize(h, basis)?.entries;
        let b = quantize(h2, basis)?.entries;
        let bracket = toeplitz_matrix(&poisson_bracket(h, h2, basis.grid()), basis)?.entries;
        let p = basis.p() as f64;
        let comm = (&a * &b - &b * &a) * Complex64::new(p, 0.0);
        Ok(operator_norm(&(comm - bracket * Complex64::new(0.0, 1.0))))
    })
}

fn real_samples(h: &Symbol, grid: &SphereGrid) -> Result<Vec<Complex64>> {
    let s = h.sample(grid);
    let max_imag = s.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if max_imag > 1e-12 {
        return Err(Error::NonRealSymbol { max_imag });
    }
    Ok(s)
}

/// `‖exp(-t T_{H,p}) - T_{e^{-tH},p}‖` at one tensor power.
pub fn exp_defect_at(h: &Symbol, basis: &HolomorphicBasis, t: f64) -> Result<f64> {
    let samples = real_samples(h, basis.grid())?;
    let th = toeplitz_matrix(&samples, basis)?;
    let lhs = hermitian_function(&th, |l| (-t * l).exp())?;
    let exp_samples: Vec<Complex64> = samples.iter().map(|z| Complex64::new((-t * z.re).exp(), 0.0)).collect();
    let rhs = toeplitz_matrix(&exp_samples, basis)?;
    Ok(operator_norm(&(lhs - rhs.entries)))
}

pub fn exp_defect(h: &Symbol, p_list: &[usize], t: f64, cfg: &ToeplitzConfig) -> Result<ExpansionFit> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
    }
    sweep(p_list, cfg, |basis| exp_defect_at(h, basis, t))
}

/// `exp_defect` at fixed `p` for several times.
pub fn exp_defect_in_time(h: &Symbol, p: usize, times: &[f64], cfg: &ToeplitzConfig) -> Result<Vec<f64>> {
    let basis = cfg.basis(p)?;
    times.par_iter().map(|&t| exp_defect_at(h, &basis, t)).collect()
}

/// `T_{H,p}⁻¹`, refusing numerically singular matrices.
pub fn toeplitz_inverse(t: &ToeplitzMatrix) -> Result<CMatrix> {
    let eig = hermitian_part(t)?.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    let cond = max / min;
    if !(cond < 1e12) {
        return Err(Error::SingularToeplitz { cond });
    }
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l, 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// `‖T_{H,p}⁻¹ - T_{1/H,p}‖`.
pub fn inverse_defect(h: &Symbol, p_list: &[usize], cfg: &ToeplitzConfig) -> Result<ExpansionFit> {
    sweep(p_list, cfg, |basis| {
        let samples = real_samples(h, basis.grid())?;
        if samples.iter().any(|z| z.re <= 0.0) {
            return Err(Error::InvalidArgument("inverse needs a positive symbol".into()));
        }
        let inv = toeplitz_inverse(&toeplitz_matrix(&samples, basis)?)?;
        let recip: Vec<Complex64> = samples.iter().map(|z| Complex64::new(1.0 / z.re, 0.0)).collect();
        Ok(operator_norm(&(inv - toeplitz_matrix(&recip, basis)?.entries)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> ToeplitzConfig {
        ToeplitzConfig::default()
    }

    #[test]
    fn basis_dimension_and_gram() {
        let b1 = cfg().basis(1).unwrap();
        assert_eq!(b1.dim(), 2);
        let id = CMatrix::identity(2, 2);
        assert!((b1.gram() - &id).camax() < 1e-10);
        assert!((b1.seed_gram() - &id).camax() < 1e-12);
        assert_eq!(cfg().basis(8).unwrap().dim(), 9);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = SphereGrid::new(6, 40, 1.0, 1.0).unwrap();
        assert!(matches!(build_basis(8, &g), Err(Error::QuadratureTooCoarse(_))));
    }

    #[test]
    fn bergman_kernel_diagonal_is_constant() {
        for p in [1, 5, 16] {
            let b = cfg().basis(p).unwrap();
            for v in b.bergman_diagonal() {
                assert!((v - (p + 1) as f64).abs() < 1e-9, "p={p}: {v}");
            }
        }
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let b = cfg().basis(6).unwrap();
        let t = quantize(&Symbol::constant(1.0), &b).unwrap();
        assert!((t.entries - CMatrix::identity(7, 7)).camax() < 1e-12);
    }

    #[test]
    fn height_function_is_diagonal() {
        for p in [1, 4, 9, 32] {
            let b = cfg().basis(p).unwrap();
            let t = quantize(&Symbol::Z, &b).unwrap();
            for j in 0..=p {
                for k in 0..=p {
                    let e = if j == k { (2.0 * k as f64 - p as f64) / (p as f64 + 2.0) } else { 0.0 };
                    assert!((t.entries[(j, k)] - e).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coordinates_are_rescaled_spin_matrices() {
        // T_{x+iy} = 2 J_+ / (p+2) with J_+ e_k = √((k+1)(p-k)) e_{k+1}.
        let p = 7;
        let b = cfg().basis(p).unwrap();
        let t = quantize(&Symbol::equatorial(), &b).unwrap();
        for j in 0..=p {
            for k in 0..=p {
                let e = if j == k + 1 { 2.0 * (((k + 1) * (p - k)) as f64).sqrt() / (p as f64 + 2.0) } else { 0.0 };
                assert!((t.entries[(j, k)] - e).norm() < 1e-12, "({j},{k})");
            }
        }
    }

    #[test]
    fn leading_symbol_examples() {
        let ps = [8, 16, 32, 64];
        let one = leading_symbol_residual(&Symbol::constant(1.0), &ps, &cfg()).unwrap();
        for (p, r) in one.p_list.iter().zip(&one.residuals) {
            assert!((r - 1.0 / *p as f64).abs() < 1e-12);
        }
        assert!((one.slope().unwrap() + 1.0).abs() < 1e-9);
        let u = leading_symbol_residual(&Symbol::Z, &ps, &cfg()).unwrap();
        assert!(u.max_residual() < 1e-13);
        assert!(u.fit.is_none());
        let u2 = leading_symbol_residual(&Symbol::from_name("u2").unwrap(), &ps, &cfg()).unwrap();
        // Exact: Tr T_{u²} = Σ E[u²] over Beta(k+1, p-k+1).
        for (p, r) in u2.p_list.iter().zip(&u2.residuals) {
            let pf = *p as f64;
            let tr: f64 = (0..=*p)
                .map(|k| {
                    let kf = k as f64;
                    let m1 = (kf + 1.0) / (pf + 2.0);
                    let m2 = (kf + 1.0) * (kf + 2.0) / ((pf + 2.0) * (pf + 3.0));
                    4.0 * m2 - 4.0 * m1 + 1.0
                })
                .sum();
            assert!((r - (tr / pf - 1.0 / 3.0).abs()).abs() < 1e-12);
        }
        assert!(u2.accepts(-1.0, 0.15, 0.98));
    }

    #[test]
    fn product_examples() {
        let ps = [8, 16, 32];
        let trivial = product_defect(&Symbol::Z, &Symbol::constant(1.0), &ps, &cfg()).unwrap();
        assert!(trivial.max_residual() < 1e-12);
        let uu = product_defect(&Symbol::Z, &Symbol::Z, &ps, &cfg()).unwrap();
        for (p, r) in uu.p_list.iter().zip(&uu.residuals) {
            // T_u² - T_{u²} is diagonal with largest entry 1/(p+3) in modulus.
            assert!((r - 1.0 / (*p as f64 + 3.0)).abs() < 1e-12, "p={p}: {r}");
        }
    }

    #[test]
    fn commutator_of_coordinates() {
        let ps = [4, 8, 16];
        let same = poisson_commutator_residual(&Symbol::Z, &Symbol::Z, &ps, &cfg()).unwrap();
        assert!(same.max_residual() < 1e-12);
        let xy = poisson_commutator_residual(&Symbol::X, &Symbol::Y, &ps, &cfg()).unwrap();
        for (p, r) in xy.p_list.iter().zip(&xy.residuals) {
            // p[T_x,T_y] - iT_{2z} = -8i J_z / (p+2)², norm 4p/(p+2)².
            let pf = *p as f64;
            assert!((r - 4.0 * pf / (pf + 2.0).powi(2)).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn exp_and_inverse_trivial_cases() {
        let h = Symbol::from_name("2+u").unwrap();
        let b = cfg().basis(8).unwrap();
        assert!(exp_defect_at(&h, &b, 0.0).unwrap() < 1e-12);
        let c = inverse_defect(&Symbol::constant(3.0), &[4, 8], &cfg()).unwrap();
        assert!(c.max_residual() < 1e-12);
        assert!(matches!(exp_defect_at(&Symbol::equatorial(), &b, 1.0), Err(Error::NonRealSymbol { .. })));
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let t = ToeplitzMatrix { p: 1, entries: CMatrix::from_diagonal_element(2, 2, ONE) * ZERO };
        assert!(matches!(toeplitz_inverse(&t), Err(Error::SingularToeplitz { .. })));
    }

    #[test]
    fn trace_two_ways() {
        let b = cfg().basis(12).unwrap();
        for h in [Symbol::from_name("u2").unwrap(), (Symbol::X * Symbol::Y + Symbol::Z).exp()] {
            let s = h.sample(b.grid());
            let t = toeplitz_matrix(&s, &b).unwrap();
            assert!((t.entries.trace() - b.trace_by_sections(&s)).norm() < 1e-9);
        }
    }

    #[test]
    fn dimension_up_to_64() {
        for p in 1..=64 {
            assert_eq!(cfg().basis(p).unwrap().values().nrows(), p + 1);
        }
    }

    fn real_symbol(c: [f64; 4]) -> Symbol {
        (Symbol::constant(c[0]) * Symbol::X + Symbol::constant(c[1]) * Symbol::Y * Symbol::Z).exp()
            + Symbol::constant(c[2]) * Symbol::Z * Symbol::Z
            + Symbol::constant(c[3])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn norm_is_bounded_by_sup(c in proptest::array::uniform4(-1.5f64..1.5), p in 1usize..20) {
            let b = cfg().basis(p).unwrap();
            let h = real_symbol(c);
            let s = h.sample(b.grid());
            let sup = s.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let t = toeplitz_matrix(&s, &b).unwrap();
            prop_assert!(t.asymmetry() < 1e-10);
            prop_assert!(operator_norm(&t.entries) <= sup * (1.0 + 1e-12));
        }

        #[test]
        fn linear_and_star_compatible(
            c in proptest::array::uniform4(-1.0f64..1.0),
            d in proptest::array::uniform4(-1.0f64..1.0),
            alpha in -2.0f64..2.0,
            p in 1usize..16,
        ) {
            let b = cfg().basis(p).unwrap();
            let f = real_symbol(c) + Symbol::Const(Complex64::new(0.0, alpha)) * Symbol::equatorial();
            let g = real_symbol(d);
            let sf = f.sample(b.grid());
            let sg = g.sample(b.grid());
            let tf = toeplitz_matrix(&sf, &b).unwrap().entries;
            let tg = toeplitz_matrix(&sg, &b).unwrap().entries;
            let lin: Vec<Complex64> = sf.iter().zip(&sg).map(|(x, y)| x * alpha + y).collect();
            let tl = toeplitz_matrix(&lin, &b).unwrap().entries;
            prop_assert!((tl - (&tf * Complex64::new(alpha, 0.0) + &tg)).camax() < 1e-10);
            let conj: Vec<Complex64> = sf.iter().map(|z| z.conj()).collect();
            let tc = toeplitz_matrix(&conj, &b).unwrap().entries;
            prop_assert!((tc - tf.adjoint()).camax() < 1e-10);
        }
    }
}
