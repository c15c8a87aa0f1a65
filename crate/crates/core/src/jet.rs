//! Truncated Taylor series in four variables.
//!
//! A [`Jet4`] carries every partial derivative of a scalar field up to a
//! runtime degree (at most 4) at a fixed base point. Coefficients are stored
//! in Taylor normalization, `coeff(α) = ∂^α f / α!`, so multiplication is a
//! plain truncated convolution. Monomials are laid out in graded order: the
//! first `C(d + 4, 4)` entries are exactly the monomials of total degree
//! `≤ d`, which lets lower-degree jets use a prefix of the same tables.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::LazyLock;

use thiserror::Error;

/// Number of independent variables.
pub const NVARS: usize = 4;
/// Highest supported truncation degree.
pub const MAX_DEGREE: usize = 4;
/// Coefficient count at [`MAX_DEGREE`]: `C(8, 4)`.
pub const MAX_COEFFS: usize = 70;

/// Exponents of a monomial `x0^α0 x1^α1 x2^α2 x3^α3`.
pub type MultiIndex = [u8; NVARS];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet degree {0} is out of range 0..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("coordinate index {0} is out of range 0..{NVARS}")]
    CoordinateOutOfRange(usize),
    #[error("jets expanded about different base points")]
    BaseMismatch,
    #[error("jets have different degrees ({left} vs {right})")]
    DegreeMismatch { left: usize, right: usize },
    #[error("division by a jet whose constant term is zero")]
    ZeroDivisor,
    #[error("cannot differentiate a degree-0 jet")]
    DegreeExhausted,
    #[error("univariate series has {got} coefficients, {needed} required")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("{function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
}

/// Number of monomials of total degree `≤ degree` in four variables.
pub const fn coeff_count(degree: usize) -> usize {
    match degree {
        0 => 1,
        1 => 5,
        2 => 15,
        3 => 35,
        _ => 70,
    }
}

struct Tables {
    monomials: Vec<MultiIndex>,
    // base-5 encoding of a multi-index -> position
    lookup: Vec<u8>,
    // (i, j, k) with α_i + α_j = α_k, sorted by |α_k|
    products: Vec<(u8, u8, u8)>,
    product_len: [usize; MAX_DEGREE + 1],
    // for each direction: (source index, factor) for result slots of degree ≤ 3
    partials: [Vec<(u8, f64)>; NVARS],
}

fn encode(alpha: &MultiIndex) -> usize {
    alpha.iter().fold(0, |acc, &a| acc * 5 + a as usize)
}

fn total(alpha: &MultiIndex) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut monomials = Vec::with_capacity(MAX_COEFFS);
    for d in 0..=MAX_DEGREE as u8 {
        for a0 in (0..=d).rev() {
            for a1 in (0..=d - a0).rev() {
                for a2 in (0..=d - a0 - a1).rev() {
                    monomials.push([a0, a1, a2, d - a0 - a1 - a2]);
                }
            }
        }
    }
    debug_assert_eq!(monomials.len(), MAX_COEFFS);

    let mut lookup = vec![u8::MAX; 625];
    for (i, m) in monomials.iter().enumerate() {
        lookup[encode(m)] = i as u8;
    }

    let mut products = Vec::new();
    for (i, a) in monomials.iter().enumerate() {
        for (j, b) in monomials.iter().enumerate() {
            let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
            if total(&sum) <= MAX_DEGREE {
                products.push((i as u8, j as u8, lookup[encode(&sum)]));
            }
        }
    }
    products.sort_by_key(|&(_, _, k)| total(&monomials[k as usize]));
    let mut product_len = [0; MAX_DEGREE + 1];
    for (d, len) in product_len.iter_mut().enumerate() {
        *len = products
            .iter()
            .filter(|&&(_, _, k)| total(&monomials[k as usize]) <= d)
            .count();
    }

    let partials = std::array::from_fn(|dir| {
        monomials[..coeff_count(MAX_DEGREE - 1)]
            .iter()
            .map(|m| {
                let mut up = *m;
                up[dir] += 1;
                (lookup[encode(&up)], up[dir] as f64)
            })
            .collect()
    });

    Tables {
        monomials,
        lookup,
        products,
        product_len,
        partials,
    }
});

/// The multi-index stored at coefficient position `index`.
pub fn monomial(index: usize) -> MultiIndex {
    TABLES.monomials[index]
}

/// Coefficient position of `alpha`, or `None` when `|α| > MAX_DEGREE`.
pub fn monomial_index(alpha: &MultiIndex) -> Option<usize> {
    if total(alpha) > MAX_DEGREE {
        return None;
    }
    Some(TABLES.lookup[encode(alpha)] as usize)
}

fn check_degree(degree: usize) -> Result<(), JetError> {
    if degree > MAX_DEGREE {
        Err(JetError::DegreeOutOfRange(degree))
    } else {
        Ok(())
    }
}

/// Binary arithmetic selector for [`Jet4::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Truncated Taylor expansion of a scalar field about a point of R^4.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet4 {
    base: [f64; NVARS],
    degree: u8,
    coeffs: [f64; MAX_COEFFS],
}

impl Jet4 {
    /// Constant field. Panics if `degree > MAX_DEGREE`.
    pub fn constant(value: f64, base: [f64; NVARS], degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "jet degree {degree} out of range");
        let mut coeffs = [0.0; MAX_COEFFS];
        coeffs[0] = value;
        Self {
            base,
            degree: degree as u8,
            coeffs,
        }
    }

    pub fn zero(base: [f64; NVARS], degree: usize) -> Self {
        Self::constant(0.0, base, degree)
    }

    /// The identity field `x_i` expanded about `base`.
    pub fn seed_coordinate(i: usize, base: [f64; NVARS], degree: usize) -> Result<Self, JetError> {
        check_degree(degree)?;
        if i >= NVARS {
            return Err(JetError::CoordinateOutOfRange(i));
        }
        let mut jet = Self::constant(base[i], base, degree);
        if degree >= 1 {
            let mut e = [0u8; NVARS];
            e[i] = 1;
            jet.coeffs[TABLES.lookup[encode(&e)] as usize] = 1.0;
        }
        Ok(jet)
    }

    /// All four coordinate seeds at once.
    pub fn seeds(base: [f64; NVARS], degree: usize) -> Result<[Self; NVARS], JetError> {
        check_degree(degree)?;
        Ok(std::array::from_fn(|i| {
            Self::seed_coordinate(i, base, degree).expect("validated above")
        }))
    }

    /// Builds a jet from Taylor coefficients in graded order. Missing trailing
    /// coefficients are zero; extra ones are an error.
    pub fn from_coeffs(base: [f64; NVARS], degree: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        check_degree(degree)?;
        let n = coeff_count(degree);
        if coeffs.len() > n {
            return Err(JetError::DegreeMismatch {
                left: degree,
                right: (0..=MAX_DEGREE).find(|&d| coeff_count(d) >= coeffs.len()).unwrap_or(MAX_DEGREE + 1),
            });
        }
        let mut jet = Self::zero(base, degree);
        jet.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(jet)
    }

    pub fn base(&self) -> [f64; NVARS] {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    /// Value of the field at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficients in graded monomial order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..coeff_count(self.degree())]
    }

    /// Taylor coefficient `∂^α f / α!`; zero beyond the stored degree.
    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        if total(alpha) > self.degree() {
            return 0.0;
        }
        self.coeffs[TABLES.lookup[encode(alpha)] as usize]
    }

    /// Raw partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, alpha: &MultiIndex) -> f64 {
        let factorial: f64 = alpha
            .iter()
            .map(|&a| (1..=a as u32).product::<u32>() as f64)
            .product();
        self.coeff(alpha) * factorial
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs()[1..].iter().all(|&c| c == 0.0)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops every coefficient above `degree`. A no-op when `degree` is not
    /// lower than the current one.
    pub fn truncate(&self, degree: usize) -> Self {
        if degree >= self.degree() {
            return *self;
        }
        let mut out = Self::zero(self.base, degree);
        let n = coeff_count(degree);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Same base and degree, constant value.
    pub fn constant_like(&self, value: f64) -> Self {
        Self::constant(value, self.base, self.degree())
    }

    fn check_base(&self, other: &Self) -> Result<(), JetError> {
        if self.base != other.base {
            return Err(JetError::BaseMismatch);
        }
        Ok(())
    }

    /// Strict binary arithmetic: both operands must share base point and
    /// degree. The operator impls (`+`, `-`, `*`) instead truncate to the
    /// lower of the two degrees.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self, JetError> {
        self.check_base(other)?;
        if self.degree != other.degree {
            return Err(JetError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(match op {
            ArithOp::Add => self + other,
            ArithOp::Sub => self - other,
            ArithOp::Mul => self * other,
            ArithOp::Div => self.try_div(other)?,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.check_base(other)?;
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        for c in &mut out.coeffs[..coeff_count(self.degree())] {
            *c *= factor;
        }
        out
    }

    /// Composes a univariate Taylor series `Σ c_k (u - u0)^k / k!`-normalized
    /// (that is, `c_k = f^(k)(u0) / k!`) with this jet, where `u0` is this
    /// jet's constant term.
    pub fn compose_univariate(&self, series: &[f64]) -> Result<Self, JetError> {
        let d = self.degree();
        if series.len() <= d {
            return Err(JetError::SeriesTooShort {
                needed: d + 1,
                got: series.len(),
            });
        }
        let mut h = *self;
        h.coeffs[0] = 0.0;
        let mut acc = self.constant_like(series[d]);
        for k in (0..d).rev() {
            acc = &acc * &h;
            acc.coeffs[0] += series[k];
        }
        Ok(acc)
    }

    /// `∂f/∂x_direction`, one degree lower.
    pub fn partial(&self, direction: usize) -> Result<Self, JetError> {
        if direction >= NVARS {
            return Err(JetError::CoordinateOutOfRange(direction));
        }
        if self.degree == 0 {
            return Err(JetError::DegreeExhausted);
        }
        let d = self.degree() - 1;
        let mut out = Self::zero(self.base, d);
        for (i, &(src, factor)) in TABLES.partials[direction][..coeff_count(d)].iter().enumerate() {
            out.coeffs[i] = factor * self.coeffs[src as usize];
        }
        Ok(out)
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if x0 == 0.0 {
            return Err(JetError::ZeroDivisor);
        }
        let inv = 1.0 / x0;
        let mut series = [0.0; MAX_DEGREE + 1];
        let mut term = inv;
        for c in &mut series {
            *c = term;
            term *= -inv;
        }
        self.compose_univariate(&series)
    }

    /// Integer power by repeated multiplication; negative exponents go
    /// through [`Jet4::recip`].
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let mut result = self.constant_like(1.0);
        let mut base = *self;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let series = std::array::from_fn::<f64, { MAX_DEGREE + 1 }, _>(|k| e / factorial(k));
        self.compose_univariate(&series).expect("full-length series")
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if !(x0 > 0.0) {
            return Err(JetError::Domain {
                function: "log",
                value: x0,
            });
        }
        let mut series = [x0.ln(), 0.0, 0.0, 0.0, 0.0];
        for (k, c) in series.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *c = sign / (k as f64 * x0.powi(k as i32));
        }
        self.compose_univariate(&series)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let x0 = self.value();
        if !(x0 > 0.0) {
            return Err(JetError::Domain {
                function: "sqrt",
                value: x0,
            });
        }
        // binomial(1/2, k) x0^(1/2 - k)
        let mut series = [0.0; MAX_DEGREE + 1];
        let mut binom = 1.0;
        for (k, c) in series.iter_mut().enumerate() {
            *c = binom * x0.sqrt() / x0.powi(k as i32);
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        }
        self.compose_univariate(&series)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let series = std::array::from_fn::<f64, { MAX_DEGREE + 1 }, _>(|k| cycle[k % 4] / factorial(k));
        self.compose_univariate(&series).expect("full-length series")
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let series = std::array::from_fn::<f64, { MAX_DEGREE + 1 }, _>(|k| cycle[k % 4] / factorial(k));
        self.compose_univariate(&series).expect("full-length series")
    }

    pub fn tan(&self) -> Result<Self, JetError> {
        self.sin().try_div(&self.cos()).map_err(|_| JetError::Domain {
            function: "tan",
            value: self.value(),
        })
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let series = std::array::from_fn::<f64, { MAX_DEGREE + 1 }, _>(|k| {
            (if k % 2 == 0 { s } else { c }) / factorial(k)
        });
        self.compose_univariate(&series).expect("full-length series")
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let series = std::array::from_fn::<f64, { MAX_DEGREE + 1 }, _>(|k| {
            (if k % 2 == 0 { c } else { s }) / factorial(k)
        });
        self.compose_univariate(&series).expect("full-length series")
    }

    pub fn tanh(&self) -> Self {
        self.sinh()
            .try_div(&self.cosh())
            .expect("cosh never vanishes")
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl fmt::Debug for Jet4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet4")
            .field("base", &self.base)
            .field("degree", &self.degree)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

fn binary_prelude(a: &Jet4, b: &Jet4) -> usize {
    assert!(a.base == b.base, "jets expanded about different base points");
    a.degree.min(b.degree) as usize
}

impl Add for &Jet4 {
    type Output = Jet4;
    fn add(self, rhs: &Jet4) -> Jet4 {
        let d = binary_prelude(self, rhs);
        let mut out = self.truncate(d);
        for (o, r) in out.coeffs[..coeff_count(d)].iter_mut().zip(&rhs.coeffs) {
            *o += r;
        }
        out
    }
}

impl Sub for &Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: &Jet4) -> Jet4 {
        let d = binary_prelude(self, rhs);
        let mut out = self.truncate(d);
        for (o, r) in out.coeffs[..coeff_count(d)].iter_mut().zip(&rhs.coeffs) {
            *o -= r;
        }
        out
    }
}

impl Mul for &Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: &Jet4) -> Jet4 {
        let d = binary_prelude(self, rhs);
        let mut out = Jet4::zero(self.base, d);
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        for &(i, j, k) in &TABLES.products[..TABLES.product_len[d]] {
            out.coeffs[k as usize] += a[i as usize] * b[j as usize];
        }
        out
    }
}

impl Neg for &Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: f64) -> Jet4 {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet4 {
    type Output = Jet4;
    fn add(self, rhs: f64) -> Jet4 {
        let mut out = *self;
        out.coeffs[0] += rhs;
        out
    }
}

macro_rules! forward_by_value {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait<Jet4> for Jet4 {
            type Output = Jet4;
            fn $method(self, rhs: Jet4) -> Jet4 {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet4> for Jet4 {
            type Output = Jet4;
            fn $method(self, rhs: &Jet4) -> Jet4 {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet4> for &Jet4 {
            type Output = Jet4;
            fn $method(self, rhs: Jet4) -> Jet4 {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_by_value!(Add::add, Sub::sub, Mul::mul);

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        -&self
    }
}

impl Mul<f64> for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: f64) -> Jet4 {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: f64) -> Jet4 {
        &self + rhs
    }
}

impl AddAssign<&Jet4> for Jet4 {
    fn add_assign(&mut self, rhs: &Jet4) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Jet4> for Jet4 {
    fn add_assign(&mut self, rhs: Jet4) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Jet4> for Jet4 {
    fn sub_assign(&mut self, rhs: &Jet4) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Jet4> for Jet4 {
    fn sub_assign(&mut self, rhs: Jet4) {
        *self = &*self - &rhs;
    }
}

impl Jet4 {
    /// `self += a * b`, truncated to the lowest of the three degrees.
    pub fn add_product(&mut self, a: &Jet4, b: &Jet4) {
        let d = self.degree.min(a.degree).min(b.degree) as usize;
        assert!(self.base == a.base && a.base == b.base, "jets expanded about different base points");
        if d < self.degree() {
            *self = self.truncate(d);
        }
        for &(i, j, k) in &TABLES.products[..TABLES.product_len[d]] {
            self.coeffs[k as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORIGIN: [f64; 4] = [0.0; 4];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn coefficient_counts_follow_stars_and_bars() {
        for d in 0..=MAX_DEGREE {
            let expected = (1..=4).map(|i| d + i).product::<usize>() / 24;
            assert_eq!(coeff_count(d), expected);
        }
        assert_eq!(coeff_count(4), 70);
        assert_eq!(TABLES.monomials.len(), 70);
        for (i, m) in TABLES.monomials.iter().enumerate() {
            assert_eq!(monomial_index(m), Some(i));
        }
        // graded: degree never decreases
        for w in TABLES.monomials.windows(2) {
            assert!(total(&w[0]) <= total(&w[1]));
        }
        assert_eq!(TABLES.products.len(), 495);
    }

    #[test]
    fn seed_coordinate_layout() {
        let j = Jet4::seed_coordinate(1, [0.0, 2.0, 0.0, 0.0], 4).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.coeff(&[0, 1, 0, 0]), 1.0);
        let nonzero = j.coeffs().iter().filter(|&&c| c != 0.0).count();
        assert_eq!(nonzero, 2);

        let j0 = Jet4::seed_coordinate(0, ORIGIN, 0).unwrap();
        assert_eq!(j0.coeffs(), &[0.0]);

        assert_eq!(
            Jet4::seed_coordinate(5, ORIGIN, 2),
            Err(JetError::CoordinateOutOfRange(5))
        );
        assert_eq!(
            Jet4::seed_coordinate(0, ORIGIN, 5),
            Err(JetError::DegreeOutOfRange(5))
        );
    }

    #[test]
    fn square_of_seed() {
        let x = Jet4::seed_coordinate(0, [3.0, 0.0, 0.0, 0.0], 2).unwrap();
        let sq = x.arith(&x, ArithOp::Mul).unwrap();
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.coeff(&[1, 0, 0, 0]), 6.0);
        assert_eq!(sq.coeff(&[2, 0, 0, 0]), 1.0);
        assert_eq!(sq.derivative(&[2, 0, 0, 0]), 2.0);
    }

    #[test]
    fn self_division_is_identity() {
        let [x, y, _, w] = Jet4::seeds([0.4, -1.2, 0.0, 2.0], 4).unwrap();
        let f = (&x * &y).exp() + w.sin() + 3.0;
        let one = f.arith(&f, ArithOp::Div).unwrap();
        assert!(close(one.value(), 1.0, 1e-14));
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn strict_arith_rejects_mismatch() {
        let a = Jet4::constant(1.0, ORIGIN, 2);
        let b = Jet4::constant(1.0, ORIGIN, 3);
        let c = Jet4::constant(1.0, [1.0, 0.0, 0.0, 0.0], 2);
        assert!(matches!(a.arith(&b, ArithOp::Add), Err(JetError::DegreeMismatch { .. })));
        assert_eq!(a.arith(&c, ArithOp::Mul), Err(JetError::BaseMismatch));
        let zero = Jet4::zero(ORIGIN, 2);
        assert_eq!(a.arith(&zero, ArithOp::Div), Err(JetError::ZeroDivisor));
    }

    #[test]
    fn operators_truncate_to_lower_degree() {
        let a = Jet4::seed_coordinate(0, ORIGIN, 4).unwrap();
        let b = Jet4::seed_coordinate(1, ORIGIN, 2).unwrap();
        assert_eq!((&a * &b).degree(), 2);
        assert_eq!((&a + &b).degree(), 2);
        assert_eq!(a.partial(0).unwrap().degree(), 3);
    }

    #[test]
    fn exp_series_at_origin() {
        let x = Jet4::seed_coordinate(0, ORIGIN, 4).unwrap();
        let e = x.exp();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (k, want) in expected.iter().enumerate() {
            assert!(close(e.coeff(&[k as u8, 0, 0, 0]), *want, 1e-15));
        }
    }

    #[test]
    fn log_inverts_exp() {
        let [x, y, ..] = Jet4::seeds([0.3, 0.7, 0.0, 0.0], 4).unwrap();
        let f = &x + &(&y * &y);
        let back = f.exp().ln().unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_of_exp_is_exp() {
        let x = Jet4::seed_coordinate(0, ORIGIN, 4).unwrap();
        let e = x.exp();
        let de = e.partial(0).unwrap();
        assert_eq!(de.degree(), 3);
        for (a, b) in de.coeffs().iter().zip(e.truncate(3).coeffs()) {
            assert!(close(*a, *b, 1e-15));
        }
        let one = x.partial(0).unwrap();
        assert_eq!(one.value(), 1.0);
        assert!(one.coeffs()[1..].iter().all(|&c| c == 0.0));
        assert_eq!(
            Jet4::constant(1.0, ORIGIN, 0).partial(0),
            Err(JetError::DegreeExhausted)
        );
    }

    #[test]
    fn mixed_partials_commute() {
        let [x, y, z, w] = Jet4::seeds([0.2, 0.5, -0.3, 1.1], 4).unwrap();
        let f = (&(&x * &y) * &z.cos()).exp() + (&w * &x).sin();
        let a = f.partial(0).unwrap().partial(1).unwrap();
        let b = f.partial(1).unwrap().partial(0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_errors() {
        let x = Jet4::seed_coordinate(0, ORIGIN, 3).unwrap();
        assert!(matches!(x.ln(), Err(JetError::Domain { function: "log", .. })));
        assert!(matches!(x.sqrt(), Err(JetError::Domain { function: "sqrt", .. })));
        assert_eq!(x.recip(), Err(JetError::ZeroDivisor));
        assert_eq!(x.powi(-2), Err(JetError::ZeroDivisor));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let [_, r, ..] = Jet4::seeds([0.0, 1.7, 0.0, 0.0], 4).unwrap();
        let p = r.powi(5).unwrap();
        let q = &(&(&(&r * &r) * &r) * &r) * &r;
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!(close(*a, *b, 1e-14));
        }
        let inv = r.powi(-2).unwrap();
        let prod = &inv * &(&r * &r);
        assert!(close(prod.value(), 1.0, 1e-15));
        assert!(prod.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
    }
}
