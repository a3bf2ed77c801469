//! Gauss-Legendre rules, product grids on spheres and a half-line rule for
//! `dt/√t` integrals.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes are returned in increasing order. Newton iteration on the
/// three-term recurrence, started from the Tricomi approximation.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss-Legendre order must be >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// A node of a [`SphereGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereNode {
    /// Cosine of the polar angle.
    pub u: f64,
    pub phi: f64,
    /// Position on the sphere of the grid's radius.
    pub point: [f64; 3],
    pub weight: f64,
}

/// Product rule on a round sphere: Gauss-Legendre in `u = cos θ` times a
/// uniform rule in the azimuth. Weights sum to `mass`.
///
/// A radius-zero sphere degenerates to a single node of weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    order: usize,
    n_phi: usize,
    radius: f64,
    mass: f64,
    rings: Vec<(f64, f64)>,
}

impl SphereGrid {
    pub fn new(order: usize, n_phi: usize, radius: f64, mass: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("sphere radius {radius} must be >= 0")));
        }
        if radius == 0.0 {
            return Ok(SphereGrid { order: 1, n_phi: 1, radius, mass: 1.0, rings: vec![(1.0, 1.0)] });
        }
        if n_phi == 0 {
            return Err(Error::InvalidArgument("azimuthal resolution must be >= 1".into()));
        }
        let (u, w) = gauss_legendre(order)?;
        let rings = u.into_iter().zip(w).map(|(u, w)| (u, w * mass / 2.0)).collect();
        Ok(SphereGrid { order, n_phi, radius, mass, rings })
    }

    /// Unit-mass grid on the unit sphere with `2·order` azimuthal points.
    pub fn unit(order: usize) -> Result<Self> {
        Self::new(order, 2 * order, 1.0, 1.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_point(&self) -> bool {
        self.radius == 0.0
    }

    /// `(u, ring weight)` pairs; the ring weight already includes the mass
    /// and is split evenly over the azimuthal nodes.
    pub fn rings(&self) -> &[(f64, f64)] {
        &self.rings
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn len(&self) -> usize {
        self.rings.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ring-major node iterator.
    pub fn nodes(&self) -> impl Iterator<Item = SphereNode> + '_ {
        let n_phi = self.n_phi;
        self.rings.iter().flat_map(move |&(u, w)| {
            (0..n_phi).map(move |j| {
                if self.is_point() {
                    return SphereNode { u: 1.0, phi: 0.0, point: [0.0; 3], weight: 1.0 };
                }
                let phi = self.phi(j);
                let s = (1.0 - u * u).max(0.0).sqrt();
                let r = self.radius;
                SphereNode { u, phi, point: [r * s * phi.cos(), r * s * phi.sin(), r * u], weight: w / n_phi as f64 }
            })
        })
    }

    pub fn integrate<F: Fn(&SphereNode) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.nodes().map(|n| n.weight * f(&n)))
    }

    /// Integral together with an error estimate: the difference to the rule
    /// of half the order and half the azimuthal resolution.
    pub fn integrate_with_estimate<F: Fn(&SphereNode) -> f64>(&self, f: F) -> Result<(f64, f64)> {
        let value = self.integrate(&f);
        if self.is_point() {
            return Ok((value, 0.0));
        }
        let coarse = SphereGrid::new(self.order.div_ceil(2), self.n_phi.div_ceil(2), self.radius, self.mass)?;
        Ok((value, (value - coarse.integrate(&f)).abs()))
    }
}

/// Rule for `∫_0^T g(t) dt/√t`, obtained from Gauss-Legendre on
/// `s ∈ [0, √T]` after `t = s²` (so `dt/√t = 2 ds`).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineGrid {
    cap: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Target size of the neglected tail `e^{-c·T}`.
const TAIL: f64 = 1e-12;

impl HalfLineGrid {
    pub fn new(cap: f64, n: usize) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(Error::InvalidArgument(format!("half-line cap {cap} must be positive")));
        }
        let (x, w) = gauss_legendre(n)?;
        let half = cap.sqrt() / 2.0;
        let nodes = x.iter().map(|&x| (half * (x + 1.0)).powi(2)).collect();
        let weights = w.iter().map(|&w| 2.0 * half * w).collect();
        Ok(HalfLineGrid { cap, nodes, weights })
    }

    /// Grid for integrands decaying at least like `e^{-c t}`: the cap is
    /// chosen so that the neglected tail is below 1e-12.
    pub fn for_decay_rate(c: f64, n: usize) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("decay rate {c} must be positive")));
        }
        Self::new(-TAIL.ln() / c, n)
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Points `t_k`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for the measure `dt/√t`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)))
    }
}

/// Unit-sphere rule of the given order (Gauss-Legendre in `u`, `2·order`
/// azimuthal points) with weights summing to `mass`.
pub fn gauss_legendre_sphere(order: usize, mass: f64) -> Result<SphereGrid> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("sphere grid order {order} < 2")));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument(format!("mass {mass} must be positive")));
    }
    SphereGrid::new(order, 2 * order, 1.0, mass)
}

/// `n`-point rule for `∫_0^cap g(t) dt/√t`.
pub fn half_line_grid(n: usize, cap: f64) -> Result<HalfLineGrid> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("half-line grid needs n >= 8, got {n}")));
    }
    HalfLineGrid::new(cap, n)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}
