//! Double exterior algebra `Λ(R^m*) ⊗̂ Λ(R̂^m*)` with Clifford actions,
//! supertrace, hat transfer and the Berezin integral.
//!
//! Basis elements are bitmasks: bit `i` (for `i < m`) is `e^{i+1}`, bit
//! `m + i` is `ê^{i+1}`. A mask denotes the wedge product of its generators
//! in increasing bit order, so every element with hats is written as
//! `α ∧ ê^J` with `α` unhatted. Indices in the API are 0-based.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 6;

/// Scalars usable as coefficients.
pub trait Coefficient:
    Clone + PartialEq + fmt::Debug + Send + Sync + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    fn from_ratio(n: i64, d: i64) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// `π^{k/2}`.
    fn pi_half_power(k: i32) -> Self;
}

impl Coefficient for Complex64 {
    fn from_ratio(n: i64, d: i64) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }

    fn pi_half_power(k: i32) -> Self {
        Complex64::new(std::f64::consts::PI.powf(k as f64 / 2.0), 0.0)
    }
}

pub type QComplex = Complex<BigRational>;

/// Exponents of the formal symbols `√π` and `√s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub pi_half: i32,
    pub root_s: i32,
}

/// Exact scalar: Laurent polynomial in `√π`, `√s` with Gaussian-rational
/// coefficients. `√s` stands for the square root of the single scale in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact {
    terms: Vec<(Monomial, QComplex)>,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Exact {
    pub fn monomial(mono: Monomial, coeff: QComplex) -> Self {
        Self::normalized(vec![(mono, coeff)])
    }

    pub fn rational(r: BigRational) -> Self {
        Self::monomial(Monomial { pi_half: 0, root_s: 0 }, QComplex::new(r, BigRational::zero()))
    }

    pub fn root_s() -> Self {
        Self::monomial(Monomial { pi_half: 0, root_s: 1 }, QComplex::one())
    }

    pub fn inv_root_s() -> Self {
        Self::monomial(Monomial { pi_half: 0, root_s: -1 }, QComplex::one())
    }

    pub fn terms(&self) -> &[(Monomial, QComplex)] {
        &self.terms
    }

    /// Numerical value for a concrete `s`.
    pub fn to_complex(&self, s: f64) -> Complex64 {
        let to_f = |r: &BigRational| {
            let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
            let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
            n / d
        };
        self.terms
            .iter()
            .map(|(mono, c)| {
                let scale = std::f64::consts::PI.powf(mono.pi_half as f64 / 2.0) * s.powf(mono.root_s as f64 / 2.0);
                Complex64::new(to_f(&c.re), to_f(&c.im)) * scale
            })
            .sum()
    }

    fn normalized(mut terms: Vec<(Monomial, QComplex)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, QComplex)> = Vec::with_capacity(terms.len());
        for (mono, c) in terms {
            match out.last_mut() {
                Some((last, acc)) if *last == mono => *acc = acc.clone() + c,
                _ => out.push((mono, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Exact { terms: out }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mono, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im.is_zero() {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({} + {}i)", c.re, c.im)?;
            }
            if mono.pi_half != 0 {
                write!(f, "·π^({}/2)", mono.pi_half)?;
            }
            if mono.root_s != 0 {
                write!(f, "·s^({}/2)", mono.root_s)?;
            }
        }
        Ok(())
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        let mut t = self.terms;
        t.extend(rhs.terms);
        Exact::normalized(t)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        self + (-rhs)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let mut t = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mono = Monomial { pi_half: ma.pi_half + mb.pi_half, root_s: ma.root_s + mb.root_s };
                t.push((mono, ca.clone() * cb.clone()));
            }
        }
        Exact::normalized(t)
    }
}

impl Zero for Exact {
    fn zero() -> Self {
        Exact { terms: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Exact {
    fn one() -> Self {
        Exact::rational(BigRational::one())
    }
}

impl Coefficient for Exact {
    fn from_ratio(n: i64, d: i64) -> Self {
        Exact::rational(q(n, d))
    }

    fn pi_half_power(k: i32) -> Self {
        Exact::monomial(Monomial { pi_half: k, root_s: 0 }, QComplex::one())
    }
}

/// `√s` and `1/√s` as coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale<C> {
    pub root: C,
    pub inv_root: C,
}

impl<C: Coefficient> Scale<C> {
    pub fn unit() -> Self {
        Scale { root: C::one(), inv_root: C::one() }
    }

    /// `s^k`.
    pub fn s_power(&self, k: usize) -> C {
        (0..2 * k).fold(C::one(), |acc, _| acc * self.root.clone())
    }
}

impl Scale<Complex64> {
    pub fn numeric(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("scale s = {s} must be positive")));
        }
        Ok(Scale { root: Complex64::new(s.sqrt(), 0.0), inv_root: Complex64::new(1.0 / s.sqrt(), 0.0) })
    }
}

impl Scale<Exact> {
    /// Rational square root when `s` is a perfect square, formal `√s`
    /// otherwise.
    pub fn exact(s: &BigRational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidArgument(format!("scale s = {s} must be positive")));
        }
        let (n, d) = (s.numer(), s.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            let root = BigRational::new(rn, rd);
            Ok(Scale { inv_root: Exact::rational(root.recip()), root: Exact::rational(root) })
        } else {
            Ok(Scale { root: Exact::root_s(), inv_root: Exact::inv_root_s() })
        }
    }

    pub fn exact_integer(s: i64) -> Result<Self> {
        Self::exact(&q(s, 1))
    }
}

fn parity_below(mask: u32, bit: u32) -> bool {
    (mask & ((1u32 << bit) - 1)).count_ones() % 2 == 1
}

/// Sign of `e_a ∧ e_b` relative to the canonical order of `a | b`
/// (`true` for −1).
fn merge_sign(a: u32, b: u32) -> bool {
    let mut odd = false;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        odd ^= (a >> (j + 1)).count_ones() % 2 == 1;
        rest &= rest - 1;
    }
    odd
}

/// Element of the double exterior algebra in dimension `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperElement<C> {
    m: usize,
    coeffs: Vec<C>,
}

impl<C: Coefficient> SuperElement<C> {
    pub fn zero(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_DIM {
            return Err(Error::InvalidArgument(format!("dimension {m} outside 1..={MAX_DIM}")));
        }
        Ok(SuperElement { m, coeffs: vec![C::zero(); 1 << (2 * m)] })
    }

    pub fn scalar(m: usize, c: C) -> Result<Self> {
        let mut x = Self::zero(m)?;
        x.coeffs[0] = c;
        Ok(x)
    }

    pub fn basis(m: usize, mask: u32, c: C) -> Result<Self> {
        let mut x = Self::zero(m)?;
        if mask as usize >= x.coeffs.len() {
            return Err(Error::InvalidArgument(format!("mask {mask:#b} out of range")));
        }
        x.coeffs[mask as usize] = c;
        Ok(x)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, mask: u32) -> &C {
        &self.coeffs[mask as usize]
    }

    pub fn set(&mut self, mask: u32, c: C) {
        self.coeffs[mask as usize] = c;
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero `(mask, coefficient)` pairs in mask order.
    pub fn support(&self) -> impl Iterator<Item = (u32, &C)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as u32, c))
    }

    pub fn scaled(&self, c: &C) -> Self {
        SuperElement { m: self.m, coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.m, other.m, "super elements of different dimension");
    }

    pub fn wedge(&self, other: &Self) -> Self {
        self.check_dim(other);
        let mut out = vec![C::zero(); self.coeffs.len()];
        let rhs: Vec<(u32, &C)> = other.support().collect();
        for (a, ca) in self.support() {
            for &(b, cb) in &rhs {
                if a & b != 0 {
                    continue;
                }
                let v = ca.clone() * cb.clone();
                let slot = &mut out[(a | b) as usize];
                *slot = if merge_sign(a, b) { slot.clone() - v } else { slot.clone() + v };
            }
        }
        SuperElement { m: self.m, coeffs: out }
    }

    /// `exp(x) = Σ x^k / k!` for an even element without scalar part.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("exponential needs a vanishing scalar part".into()));
        }
        if self.support().any(|(mask, _)| mask.count_ones() % 2 == 1) {
            return Err(Error::InvalidArgument("exponential needs an even element".into()));
        }
        let mut out = Self::scalar(self.m, C::one())?;
        let mut power = out.clone();
        for k in 1..=2 * self.m {
            power = power.wedge(self).scaled(&C::from_ratio(1, k as i64));
            if power.is_zero() {
                break;
            }
            out = out + power.clone();
        }
        Ok(out)
    }

    /// Coefficient of `e¹…e^m ê¹…ê^m`.
    pub fn top_coefficient(&self) -> &C {
        &self.coeffs[self.coeffs.len() - 1]
    }

    /// Top coefficient of `self ∧ other` without forming the product.
    pub fn top_of_wedge(&self, other: &Self) -> C {
        self.check_dim(other);
        let full = (self.coeffs.len() - 1) as u32;
        let mut acc = C::zero();
        for (a, ca) in self.support() {
            let cb = &other.coeffs[(full ^ a) as usize];
            if cb.is_zero() {
                continue;
            }
            let v = ca.clone() * cb.clone();
            acc = if merge_sign(a, full ^ a) { acc - v } else { acc + v };
        }
        acc
    }

    /// Berezin integral over the hatted variables:
    /// `∫^B α ∧ ê¹…ê^m = (-1)^{m(m+1)/2} π^{-m/2} α`, zero on lower hatted
    /// degree.
    pub fn berezin_integral(&self) -> Self {
        let m = self.m;
        let hat_full = ((1u32 << m) - 1) << m;
        let sign = if (m * (m + 1) / 2) % 2 == 1 { -C::one() } else { C::one() };
        let factor = sign * C::pi_half_power(-(m as i32));
        let mut out = vec![C::zero(); self.coeffs.len()];
        for (mask, c) in self.support() {
            if mask & hat_full == hat_full {
                out[(mask & !hat_full) as usize] = c.clone() * factor.clone();
            }
        }
        SuperElement { m, coeffs: out }
    }
}

impl<C: Coefficient> Add for SuperElement<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        SuperElement { m: self.m, coeffs: self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<C: Coefficient> Sub for SuperElement<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check_dim(&rhs);
        SuperElement { m: self.m, coeffs: self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

/// Exterior multiplication or contraction by a basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Wedge(u32),
    Contract(u32),
}

impl Generator {
    fn bit(self) -> u32 {
        match self {
            Generator::Wedge(b) | Generator::Contract(b) => b,
        }
    }

    /// Image of a basis element: `(mask, negative?)`, or `None` for zero.
    fn act(self, mask: u32) -> Option<(u32, bool)> {
        match self {
            Generator::Wedge(b) if mask & (1 << b) == 0 => Some((mask | (1 << b), parity_below(mask, b))),
            Generator::Contract(b) if mask & (1 << b) != 0 => Some((mask & !(1 << b), parity_below(mask, b))),
            _ => None,
        }
    }
}

/// Composition `scalar · f_1 ∘ f_2 ∘ … ∘ f_n` of linear combinations of
/// generators (`f_n` acts first).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator<C> {
    m: usize,
    scalar: C,
    factors: Vec<Vec<(C, Generator)>>,
}

type Sparse<C> = BTreeMap<u32, C>;

fn sparse_add<C: Coefficient>(acc: &mut Sparse<C>, mask: u32, c: C) {
    let entry = acc.entry(mask).or_insert_with(C::zero);
    *entry = entry.clone() + c;
}

impl<C: Coefficient> SuperOperator<C> {
    pub fn identity(m: usize) -> Result<Self> {
        Self::scalar(m, C::one())
    }

    pub fn scalar(m: usize, c: C) -> Result<Self> {
        if m == 0 || m > MAX_DIM {
            return Err(Error::InvalidArgument(format!("dimension {m} outside 1..={MAX_DIM}")));
        }
        Ok(SuperOperator { m, scalar: c, factors: Vec::new() })
    }

    /// A single factor `Σ c_g g`.
    pub fn linear(m: usize, terms: Vec<(C, Generator)>) -> Result<Self> {
        let mut op = Self::identity(m)?;
        if let Some((_, g)) = terms.iter().find(|(_, g)| g.bit() as usize >= 2 * m) {
            return Err(Error::InvalidArgument(format!("generator {g:?} out of range for m = {m}")));
        }
        op.factors.push(terms);
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "operators of different dimension");
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SuperOperator { m: self.m, scalar: self.scalar.clone() * other.scalar.clone(), factors }
    }

    pub fn touches_hatted(&self) -> bool {
        self.factors.iter().flatten().any(|(_, g)| g.bit() as usize >= self.m)
    }

    fn apply_sparse(&self, input: Sparse<C>) -> Sparse<C> {
        let mut cur = input;
        for factor in self.factors.iter().rev() {
            let mut next = Sparse::new();
            for (&mask, c) in &cur {
                for (k, g) in factor {
                    if let Some((image, negative)) = g.act(mask) {
                        let v = k.clone() * c.clone();
                        sparse_add(&mut next, image, if negative { -v } else { v });
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            cur = next;
        }
        cur.into_iter().map(|(mask, c)| (mask, c * self.scalar.clone())).filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Image of a basis element as sparse `(mask, coefficient)` pairs.
    pub fn apply_basis(&self, mask: u32) -> Vec<(u32, C)> {
        let mut input = Sparse::new();
        input.insert(mask, C::one());
        self.apply_sparse(input).into_iter().collect()
    }

    pub fn apply(&self, x: &SuperElement<C>) -> SuperElement<C> {
        assert_eq!(self.m, x.m, "operator and element of different dimension");
        let input: Sparse<C> = x.support().map(|(k, c)| (k, c.clone())).collect();
        let mut out = SuperElement { m: x.m, coeffs: vec![C::zero(); x.coeffs.len()] };
        for (mask, c) in self.apply_sparse(input) {
            out.coeffs[mask as usize] = c;
        }
        out
    }

    /// `[H]^max`: the top-degree coefficient of `H(1)`.
    pub fn max_component(&self) -> C {
        let top = (1u32 << (2 * self.m)) - 1;
        self.apply_basis(0).into_iter().find(|(mask, _)| *mask == top).map(|(_, c)| c).unwrap_or_else(C::zero)
    }
}

/// Supercommutator of two odd operators on a basis element:
/// `a(b(e)) + b(a(e))`.
pub fn anticommutator_on_basis<C: Coefficient>(a: &SuperOperator<C>, b: &SuperOperator<C>, mask: u32) -> Vec<(u32, C)> {
    let mut acc = Sparse::new();
    for (k, c) in a.compose(b).apply_basis(mask).into_iter().chain(b.compose(a).apply_basis(mask)) {
        sparse_add(&mut acc, k, c);
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `Σ_I (-1)^{|I|} ⟨e^I, op e^I⟩` over `Λ(R^m*)`; the operator must not
/// involve the hatted variables.
pub fn supertrace<C: Coefficient>(op: &SuperOperator<C>) -> Result<C> {
    if op.touches_hatted() {
        return Err(Error::InvalidArgument("supertrace is taken on the unhatted algebra".into()));
    }
    let mut acc = C::zero();
    for mask in 0..(1u32 << op.m) {
        if let Some((_, c)) = op.apply_basis(mask).into_iter().find(|(k, _)| *k == mask) {
            acc = if mask.count_ones() % 2 == 1 { acc - c } else { acc + c };
        }
    }
    Ok(acc)
}

/// `c` or `ĉ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordKind {
    C,
    CHat,
}

/// `c(e_j)`, `ĉ(e_j)`, or the same on the hatted copy (`c(ê_j)`, `ĉ(ê_j)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub kind: CliffordKind,
    pub index: usize,
    pub hatted: bool,
}

impl Letter {
    pub fn c(index: usize) -> Self {
        Letter { kind: CliffordKind::C, index, hatted: false }
    }

    pub fn c_hat(index: usize) -> Self {
        Letter { kind: CliffordKind::CHat, index, hatted: false }
    }

    /// `c_s(e_j) = s^{-1/2} e^j∧ - s^{1/2} i_{e_j}`,
    /// `ĉ_s(e_j) = s^{-1/2} e^j∧ + s^{1/2} i_{e_j}`.
    pub fn operator<C: Coefficient>(&self, m: usize, scale: &Scale<C>) -> Result<SuperOperator<C>> {
        if self.index >= m {
            return Err(Error::InvalidArgument(format!("Clifford index {} out of range for m = {m}", self.index)));
        }
        let bit = (self.index + if self.hatted { m } else { 0 }) as u32;
        let contract = match self.kind {
            CliffordKind::C => -scale.root.clone(),
            CliffordKind::CHat => scale.root.clone(),
        };
        SuperOperator::linear(
            m,
            vec![(scale.inv_root.clone(), Generator::Wedge(bit)), (contract, Generator::Contract(bit))],
        )
    }
}

/// Word `l_1 l_2 … l_n` in the Clifford generators (`l_n` acts first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordWord {
    pub m: usize,
    pub letters: Vec<Letter>,
}

impl CliffordWord {
    pub fn new(m: usize, letters: Vec<Letter>) -> Self {
        CliffordWord { m, letters }
    }

    /// `c(e₁)ĉ(e₁)…c(e_m)ĉ(e_m)`.
    pub fn full(m: usize) -> Self {
        CliffordWord { m, letters: (0..m).flat_map(|j| [Letter::c(j), Letter::c_hat(j)]).collect() }
    }

    /// The `4^m` words `w_1 … w_m` with `w_j ∈ {1, c(e_j), ĉ(e_j), c(e_j)ĉ(e_j)}`.
    pub fn monomials(m: usize) -> Vec<CliffordWord> {
        (0..1usize << (2 * m))
            .map(|code| {
                let letters = (0..m)
                    .flat_map(|j| {
                        let pick = (code >> (2 * j)) & 3;
                        let c = (pick & 1 == 1).then(|| Letter::c(j));
                        let h = (pick & 2 == 2).then(|| Letter::c_hat(j));
                        c.into_iter().chain(h)
                    })
                    .collect();
                CliffordWord { m, letters }
            })
            .collect()
    }

    /// Random word of length `0..=2m+2` in the unhatted letters.
    pub fn random<R: rand::Rng>(m: usize, rng: &mut R) -> Self {
        let len = rng.gen_range(0..=2 * m + 2);
        let letters = (0..len)
            .map(|_| {
                let j = rng.gen_range(0..m);
                if rng.gen_bool(0.5) {
                    Letter::c(j)
                } else {
                    Letter::c_hat(j)
                }
            })
            .collect();
        CliffordWord { m, letters }
    }

    /// Random reordering of the full word with a random square `l·l`
    /// inserted; its supertrace is nonzero.
    pub fn random_full<R: rand::Rng>(m: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut letters = CliffordWord::full(m).letters;
        letters.shuffle(rng);
        let extra = *letters.choose(rng).expect("m >= 1");
        let at = rng.gen_range(0..=letters.len());
        letters.splice(at..at, [extra, extra]);
        CliffordWord { m, letters }
    }

    pub fn is_full(&self) -> bool {
        *self == CliffordWord::full(self.m)
    }

    pub fn operator<C: Coefficient>(&self, scale: &Scale<C>) -> Result<SuperOperator<C>> {
        let mut op = SuperOperator::identity(self.m)?;
        for l in &self.letters {
            op = op.compose(&l.operator(self.m, scale)?);
        }
        Ok(op)
    }
}

impl fmt::Display for CliffordWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            let name = match l.kind {
                CliffordKind::C => "c",
                CliffordKind::CHat => "ĉ",
            };
            let hat = if l.hatted { "^" } else { "" };
            write!(f, "{}{name}{}{hat}", if k > 0 { " " } else { "" }, l.index + 1)?;
        }
        Ok(())
    }
}

/// Number of `(letter, letter, basis element)` triples on which
/// `[c_i, c_j] = −2δ_ij`, `[ĉ_i, ĉ_j] = 2δ_ij`, `[c_i, ĉ_j] = 0` fail, over
/// the letters of both copies.
pub fn anticommutator_violations<C: Coefficient>(m: usize, scale: &Scale<C>) -> Result<usize> {
    let letters: Vec<Letter> = [false, true]
        .iter()
        .flat_map(|&hatted| (0..m).flat_map(move |j| [Letter::c(j), Letter::c_hat(j)].map(|l| Letter { hatted, ..l })))
        .collect();
    let ops = letters.iter().map(|l| l.operator(m, scale)).collect::<Result<Vec<_>>>()?;
    let mut bad = 0;
    for (x, a) in letters.iter().zip(&ops) {
        for (y, b) in letters.iter().zip(&ops) {
            let expected = if x != y {
                C::zero()
            } else if x.kind == CliffordKind::C {
                C::from_i64(-2)
            } else {
                C::from_i64(2)
            };
            for mask in 0..(1u32 << (2 * m)) {
                let got = anticommutator_on_basis(a, b, mask);
                let ok = if expected.is_zero() {
                    got.is_empty()
                } else {
                    got.len() == 1 && got[0].0 == mask && got[0].1 == expected
                };
                bad += usize::from(!ok);
            }
        }
    }
    Ok(bad)
}

/// Replaces every `ĉ(e_j)` by `ĉ(ê_j)`.
pub fn hat_transfer(word: &CliffordWord) -> CliffordWord {
    let letters = word
        .letters
        .iter()
        .map(|l| match l.kind {
            CliffordKind::CHat => Letter { hatted: true, ..*l },
            CliffordKind::C => *l,
        })
        .collect();
    CliffordWord { m: word.m, letters }
}

/// Both sides of `Tr_s[G]·e¹…e^m = (4π)^{m/2} s^m ∫^B [Ĝ]^max ê¹…ê^m…`,
/// returned as `(lhs, rhs)`.
pub fn bridge_sides<C: Coefficient>(
    word: &CliffordWord,
    scale: &Scale<C>,
) -> Result<(SuperElement<C>, SuperElement<C>)> {
    let m = word.m;
    if word.letters.iter().any(|l| l.hatted) {
        return Err(Error::InvalidArgument("bridge identity takes a word on the unhatted algebra".into()));
    }
    let unhatted_top = (1u32 << m) - 1;
    let lhs = SuperElement::basis(m, unhatted_top, supertrace(&word.operator(scale)?)?)?;
    let top = SuperElement::basis(m, (1u32 << (2 * m)) - 1, hat_transfer(word).operator(scale)?.max_component())?;
    let factor = C::from_i64(1 << m) * C::pi_half_power(m as i32) * scale.s_power(m);
    let rhs = top.berezin_integral().scaled(&factor);
    Ok((lhs, rhs))
}

/// `lhs - rhs` of the bridge identity.
pub fn supertrace_berezin_bridge_check<C: Coefficient>(
    word: &CliffordWord,
    scale: &Scale<C>,
) -> Result<SuperElement<C>> {
    let (lhs, rhs) = bridge_sides(word, scale)?;
    Ok(lhs - rhs)
}
