//! Exact polynomial and truncated series arithmetic.
//!
//! [`MPoly`] is a sparse polynomial in the three formal variables `a`, `b`, `q`
//! with big-integer coefficients. [`TSeries`] is a power series in `t`
//! truncated at a fixed order whose coefficients are [`MPoly`] values, and
//! [`ZSeries`] is a truncated series in `z` with [`TSeries`] coefficients.
//!
//! Every value is canonical: no zero coefficient is ever stored, so structural
//! equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("series is not invertible: constant term is {0}, expected 1")]
    NotInvertible(String),
    #[error("divisor must be a polynomial in q alone with constant term 1, got {0}")]
    BadDivisor(String),
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("cannot extend truncation order from {from} to {to}")]
    Extension { from: usize, to: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// One of the formal variables carried by an [`MPoly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    A,
    B,
    Q,
}

/// Exponent triple `a^a b^b q^q`. The derived ordering is lexicographic in
/// `(a, b, q)`, which is the canonical term order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub q: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0, q: 0 };

    pub fn new(a: u32, b: u32, q: u32) -> Self {
        Monomial { a, b, q }
    }

    pub fn exponent(&self, var: Var) -> u32 {
        match var {
            Var::A => self.a,
            Var::B => self.b,
            Var::Q => self.q,
        }
    }

    fn with_exponent(mut self, var: Var, e: u32) -> Self {
        match var {
            Var::A => self.a = e,
            Var::B => self.b = e,
            Var::Q => self.q = e,
        }
        self
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            a: self.a + other.a,
            b: self.b + other.b,
            q: self.q + other.q,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in [("a", self.a), ("b", self.b), ("q", self.q)] {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial in `a`, `b`, `q` over the integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        MPoly::term(c, Monomial::ONE)
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    /// The single variable `var` as a polynomial.
    pub fn var(var: Var) -> Self {
        MPoly::term(1, Monomial::ONE.with_exponent(var, 1))
    }

    /// `q^e`.
    pub fn q_pow(e: u32) -> Self {
        MPoly::term(1, Monomial::new(0, 0, e))
    }

    /// Builds a polynomial from `(coefficient, monomial)` pairs, merging
    /// repeated monomials.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C, Monomial)>,
        C: Into<BigInt>,
    {
        let mut p = MPoly::zero();
        for (c, m) in terms {
            p.add_term(m, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::ONE).is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&Monomial::ONE)
    }

    /// Largest exponent of `var` among the terms (0 for the zero polynomial).
    pub fn degree(&self, var: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// True when every term has zero `a`- and `b`-exponent.
    pub fn is_q_only(&self) -> bool {
        self.terms.keys().all(|m| m.a == 0 && m.b == 0)
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `m`.
    pub fn shift(&self, m: &Monomial) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(k, v)| (k.times(m), v.clone())).collect(),
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift_q(&self, e: u32) -> MPoly {
        self.shift(&Monomial::new(0, 0, e))
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sets `var` to 0 or 1.
    ///
    /// Setting to 1 drops the exponent and merges terms; setting to 0 deletes
    /// every term carrying a positive power of `var`.
    pub fn substitute(&self, var: Var, value: bool) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == 0 {
                out.add_term(*m, c.clone());
            } else if value {
                out.add_term(m.with_exponent(var, 0), c.clone());
            }
        }
        out
    }

    /// Sets `q` to 1.
    pub fn at_q_one(&self) -> MPoly {
        self.substitute(Var::Q, true)
    }

    /// Exact quotient by a polynomial in `q` alone with constant term 1.
    ///
    /// Each `(a, b)` slice is divided as a univariate polynomial in `q` from
    /// the low end; a nonzero remainder is reported as [`PolyError::InexactDivision`].
    pub fn div_exact_q(&self, divisor: &MPoly) -> Result<MPoly, PolyError> {
        if !divisor.is_q_only() || !divisor.constant_term().is_one() {
            return Err(PolyError::BadDivisor(divisor.to_string()));
        }
        let dense_div: Vec<BigInt> = {
            let deg = divisor.degree(Var::Q) as usize;
            let mut v = vec![BigInt::zero(); deg + 1];
            for (m, c) in &divisor.terms {
                v[m.q as usize] = c.clone();
            }
            v
        };
        let div_deg = dense_div.len() - 1;

        let mut slices: BTreeMap<(u32, u32), Vec<BigInt>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = slices.entry((m.a, m.b)).or_default();
            let i = m.q as usize;
            if v.len() <= i {
                v.resize(i + 1, BigInt::zero());
            }
            v[i] = c.clone();
        }

        let mut out = MPoly::zero();
        for ((ea, eb), mut rem) in slices {
            if rem.len() <= div_deg {
                return Err(PolyError::InexactDivision);
            }
            let quot_len = rem.len() - div_deg;
            for k in 0..quot_len {
                let c = rem[k].clone();
                if c.is_zero() {
                    continue;
                }
                for (j, d) in dense_div.iter().enumerate() {
                    if !d.is_zero() {
                        rem[k + j] -= &c * d;
                    }
                }
                out.add_term(Monomial::new(ea, eb, k as u32), c);
            }
            if rem.iter().any(|c| !c.is_zero()) {
                return Err(PolyError::InexactDivision);
            }
        }
        Ok(out)
    }
}

impl From<i64> for MPoly {
    fn from(c: i64) -> Self {
        MPoly::constant(c)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl fmt::Display for MPoly {
    /// Canonical text form, e.g. `1 - a*b*q^2 + 3*b^2`, terms in lexicographic
    /// exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if *m == Monomial::ONE {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for MPoly {
    type Err = PolyError;

    /// Parses the canonical text form (and any reordering of it).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PolyError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut out = MPoly::zero();
        let mut chunks = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                chunks.push(&compact[start..i]);
                start = i;
            }
        }
        chunks.push(&compact[start..]);

        for chunk in chunks {
            let (sign, body) = match chunk.as_bytes().first() {
                Some(b'-') => (-1, &chunk[1..]),
                Some(b'+') => (1, &chunk[1..]),
                _ => (1, chunk),
            };
            if body.is_empty() {
                return Err(err());
            }
            let mut coeff = BigInt::from(sign);
            let mut mono = Monomial::ONE;
            for factor in body.split('*') {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| err())?),
                    None => (factor, 1),
                };
                let var = match name {
                    "a" => Var::A,
                    "b" => Var::B,
                    "q" => Var::Q,
                    digits => {
                        if factor.contains('^') {
                            return Err(err());
                        }
                        coeff *= digits.parse::<BigInt>().map_err(|_| err())?;
                        continue;
                    }
                };
                mono = mono.with_exponent(var, mono.exponent(var) + exp);
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

/// A first point of disagreement between two series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub t_power: usize,
    pub monomial: Monomial,
    pub expected: BigInt,
    pub actual: BigInt,
}

impl fmt::Display for Difference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t^{} monomial {}: expected {}, got {}",
            self.t_power, self.monomial, self.expected, self.actual
        )
    }
}

/// Locates the first differing coefficient of two coefficient sequences,
/// scanning by power of `t` and then by monomial order.
pub fn first_difference(expected: &[MPoly], actual: &[MPoly]) -> Option<Difference> {
    let zero = MPoly::zero();
    let len = expected.len().max(actual.len());
    for n in 0..len {
        let e = expected.get(n).unwrap_or(&zero);
        let a = actual.get(n).unwrap_or(&zero);
        if e == a {
            continue;
        }
        let diff = e - a;
        let (m, _) = diff.terms().next().expect("nonzero difference");
        return Some(Difference {
            t_power: n,
            monomial: *m,
            expected: e.coeff(m),
            actual: a.coeff(m),
        });
    }
    None
}

/// Power series in `t` truncated after `t^order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TSeries {
    coeffs: Vec<MPoly>,
}

impl TSeries {
    pub fn zero(order: usize) -> Self {
        TSeries {
            coeffs: vec![MPoly::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        TSeries::constant(MPoly::one(), order)
    }

    pub fn constant(c: MPoly, order: usize) -> Self {
        let mut s = TSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from leading coefficients; terms beyond `order` are
    /// dropped and missing ones are zero.
    pub fn from_coeffs(coeffs: Vec<MPoly>, order: usize) -> Self {
        let mut coeffs = coeffs;
        coeffs.resize(order + 1, MPoly::zero());
        TSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[MPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &MPoly {
        &self.coeffs[n]
    }

    pub fn set_coeff(&mut self, n: usize, c: MPoly) {
        self.coeffs[n] = c;
    }

    fn check_order(&self, other: &TSeries) -> Result<(), PolyError> {
        if self.order() != other.order() {
            return Err(PolyError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &TSeries) -> Result<TSeries, PolyError> {
        self.check_order(other)?;
        Ok(TSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn checked_sub(&self, other: &TSeries) -> Result<TSeries, PolyError> {
        self.check_order(other)?;
        Ok(TSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x - y).collect(),
        })
    }

    /// Cauchy product truncated to the common order.
    pub fn checked_mul(&self, other: &TSeries) -> Result<TSeries, PolyError> {
        self.check_order(other)?;
        let order = self.order();
        let mut out = TSeries::zero(order);
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs[..=order - i].iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[i + j] = &out.coeffs[i + j] + &(x * y);
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be exactly 1.
    pub fn invert(&self) -> Result<TSeries, PolyError> {
        if !self.coeffs[0].is_one() {
            return Err(PolyError::NotInvertible(self.coeffs[0].to_string()));
        }
        TSeries::one(self.order()).div_exact(self)
    }

    /// Quotient `self / den` where the constant term of `den` is a polynomial
    /// in `q` alone with constant term 1. Each coefficient is obtained by
    /// exact division; an inexact step is an error.
    pub fn div_exact(&self, den: &TSeries) -> Result<TSeries, PolyError> {
        self.check_order(den)?;
        let lead = &den.coeffs[0];
        let order = self.order();
        let mut out: Vec<MPoly> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                let d = &den.coeffs[k];
                if !d.is_zero() && !out[n - k].is_zero() {
                    acc = &acc - &(d * &out[n - k]);
                }
            }
            let c = if lead.is_one() { acc } else { acc.div_exact_q(lead)? };
            out.push(c);
        }
        Ok(TSeries { coeffs: out })
    }

    /// Substitutes `t -> q t`: the coefficient of `t^n` gains `q^n`.
    pub fn subs_qt(&self) -> TSeries {
        TSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.shift_q(n as u32))
                .collect(),
        }
    }

    /// Multiplies every coefficient by `p`.
    pub fn scale(&self, p: &MPoly) -> TSeries {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c * p).collect(),
        }
    }

    /// Multiplies by `t^k`, dropping what falls past the order.
    pub fn shift_t(&self, k: usize) -> TSeries {
        let order = self.order();
        let mut out = TSeries::zero(order);
        for n in 0..=order {
            if n + k > order {
                break;
            }
            out.coeffs[n + k] = self.coeffs[n].clone();
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&MPoly) -> MPoly) -> TSeries {
        TSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn substitute(&self, var: Var, value: bool) -> TSeries {
        self.map_coeffs(|c| c.substitute(var, value))
    }

    /// Re-truncates to a lower (or equal) order.
    pub fn truncate(&self, order: usize) -> Result<TSeries, PolyError> {
        if order > self.order() {
            return Err(PolyError::Extension {
                from: self.order(),
                to: order,
            });
        }
        Ok(TSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MPoly::is_zero)
    }

    /// Locates the first coefficient where `self` (taken as the expected value)
    /// and `actual` disagree. Differing orders compare over the longer range.
    pub fn first_difference(&self, actual: &TSeries) -> Option<Difference> {
        first_difference(&self.coeffs, &actual.coeffs)
    }
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*t^{n}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

/// Truncated series in `z` with [`TSeries`] coefficients of a common `t`-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSeries {
    t_order: usize,
    coeffs: Vec<TSeries>,
}

impl ZSeries {
    pub fn zero(z_order: usize, t_order: usize) -> Self {
        ZSeries {
            t_order,
            coeffs: vec![TSeries::zero(t_order); z_order + 1],
        }
    }

    pub fn one(z_order: usize, t_order: usize) -> Self {
        let mut s = ZSeries::zero(z_order, t_order);
        s.coeffs[0] = TSeries::one(t_order);
        s
    }

    /// A polynomial in `z` and `t` given as `(z power, t power, coefficient)`.
    pub fn from_terms<I>(terms: I, z_order: usize, t_order: usize) -> Self
    where
        I: IntoIterator<Item = (usize, usize, MPoly)>,
    {
        let mut s = ZSeries::zero(z_order, t_order);
        for (k, n, c) in terms {
            if k <= z_order && n <= t_order {
                let slot = &mut s.coeffs[k].coeffs[n];
                *slot = &*slot + &c;
            }
        }
        s
    }

    pub fn z_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn t_order(&self) -> usize {
        self.t_order
    }

    pub fn coeff(&self, k: usize) -> &TSeries {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[TSeries] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: TSeries) -> Result<(), PolyError> {
        if c.order() != self.t_order {
            return Err(PolyError::OrderMismatch {
                left: self.t_order,
                right: c.order(),
            });
        }
        self.coeffs[k] = c;
        Ok(())
    }

    fn check_orders(&self, other: &ZSeries) -> Result<(), PolyError> {
        if self.z_order() != other.z_order() {
            return Err(PolyError::OrderMismatch {
                left: self.z_order(),
                right: other.z_order(),
            });
        }
        if self.t_order != other.t_order {
            return Err(PolyError::OrderMismatch {
                left: self.t_order,
                right: other.t_order,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &ZSeries) -> Result<ZSeries, PolyError> {
        self.check_orders(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x.checked_add(y))
            .collect::<Result<_, _>>()?;
        Ok(ZSeries {
            t_order: self.t_order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &ZSeries) -> Result<ZSeries, PolyError> {
        self.check_orders(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x.checked_sub(y))
            .collect::<Result<_, _>>()?;
        Ok(ZSeries {
            t_order: self.t_order,
            coeffs,
        })
    }

    /// Cauchy product in `z`, truncated in both `z` and `t`.
    pub fn checked_mul(&self, other: &ZSeries) -> Result<ZSeries, PolyError> {
        self.check_orders(other)?;
        let z_order = self.z_order();
        let mut out = ZSeries::zero(z_order, self.t_order);
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs[..=z_order - i].iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[i + j] = out.coeffs[i + j].checked_add(&x.checked_mul(y)?)?;
                }
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by the `t`-series `s`.
    pub fn mul_tseries(&self, s: &TSeries) -> Result<ZSeries, PolyError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.checked_mul(s))
            .collect::<Result<_, _>>()?;
        Ok(ZSeries {
            t_order: self.t_order,
            coeffs,
        })
    }

    /// Multiplies by `z^k`, dropping what falls past the order.
    pub fn shift_z(&self, k: usize) -> ZSeries {
        let z_order = self.z_order();
        let mut out = ZSeries::zero(z_order, self.t_order);
        for i in 0..=z_order {
            if i + k > z_order {
                break;
            }
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Re-truncates to lower (or equal) `z`- and `t`-orders.
    pub fn truncate(&self, z_order: usize, t_order: usize) -> Result<ZSeries, PolyError> {
        if z_order > self.z_order() {
            return Err(PolyError::Extension {
                from: self.z_order(),
                to: z_order,
            });
        }
        let coeffs = self.coeffs[..=z_order]
            .iter()
            .map(|c| c.truncate(t_order))
            .collect::<Result<_, _>>()?;
        Ok(ZSeries { t_order, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> MPoly {
        s.parse().unwrap()
    }

    fn series(cs: &[&str], order: usize) -> TSeries {
        TSeries::from_coeffs(cs.iter().map(|c| p(c)).collect(), order)
    }

    #[test]
    fn add_examples() {
        assert_eq!(p("1 + q") + p("q"), p("1 + 2*q"));
        assert_eq!(p("a + b*q") + MPoly::zero(), p("a + b*q"));
        let z = p("1 - q") + p("q - 1");
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("1 - q") * p("1 + q"), p("1 - q^2"));
        let m = MPoly::var(Var::A) * p("b*q");
        assert_eq!(m.coeff(&Monomial::new(1, 1, 1)), BigInt::from(1));
        assert_eq!(m.len(), 1);
        assert_eq!(p("a - 3*b^2*q") * MPoly::one(), p("a - 3*b^2*q"));
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(p("a*b").substitute(Var::B, true), p("a"));
        assert_eq!(p("a + b*q").substitute(Var::A, false), p("b*q"));
        // 1 - a t - b q t at b = 1, coefficientwise
        let s = series(&["1", "-a - b*q"], 1).substitute(Var::B, true);
        assert_eq!(s, series(&["1", "-a - q"], 1));
    }

    #[test]
    fn series_mul_examples() {
        let s = series(&["1", "1"], 2);
        let u = series(&["1", "-1"], 2);
        assert_eq!(s.checked_mul(&u).unwrap(), series(&["1", "0", "-1"], 2));
        assert_eq!(s.checked_mul(&TSeries::one(2)).unwrap(), s);
        let ab = series(&["1", "a*b"], 1);
        assert_eq!(ab.checked_mul(&ab).unwrap(), series(&["1", "2*a*b"], 1));
    }

    #[test]
    fn series_mul_order_mismatch() {
        let err = TSeries::one(2).checked_mul(&TSeries::one(3)).unwrap_err();
        assert_eq!(err, PolyError::OrderMismatch { left: 2, right: 3 });
    }

    #[test]
    fn invert_examples() {
        let s = series(&["1", "-a*b"], 2);
        assert_eq!(s.invert().unwrap(), series(&["1", "a*b", "a^2*b^2"], 2));
        assert_eq!(TSeries::one(4).invert().unwrap(), TSeries::one(4));

        let g = series(&["1", "-a - b*q"], 2);
        let inv = g.invert().unwrap();
        let x = p("a + b*q");
        assert_eq!(inv, TSeries::from_coeffs(vec![MPoly::one(), x.clone(), &x * &x], 2));
        assert_eq!(g.checked_mul(&inv).unwrap(), TSeries::one(2));
    }

    #[test]
    fn invert_rejects_non_unit() {
        assert!(matches!(
            series(&["2", "a"], 2).invert(),
            Err(PolyError::NotInvertible(_))
        ));
        assert!(matches!(
            series(&["b"], 2).invert(),
            Err(PolyError::NotInvertible(_))
        ));
    }

    #[test]
    fn qt_examples() {
        assert_eq!(series(&["1", "a*b"], 1).subs_qt(), series(&["1", "a*b*q"], 1));
        assert_eq!(series(&["b"], 3).subs_qt(), series(&["b"], 3));
        assert_eq!(
            series(&["1", "1", "1"], 2).subs_qt(),
            series(&["1", "q", "q^2"], 2)
        );
    }

    #[test]
    fn exact_q_division() {
        let num = p("1 - q") * p("1 + a*q^3 - 2*b");
        assert_eq!(num.div_exact_q(&p("1 - q")).unwrap(), p("1 + a*q^3 - 2*b"));
        assert_eq!(p("1").div_exact_q(&p("1 - q")), Err(PolyError::InexactDivision));
        assert!(matches!(p("q").div_exact_q(&p("1 + a")), Err(PolyError::BadDivisor(_))));
    }

    #[test]
    fn div_with_polynomial_leading_term() {
        // (1 - q) / ((1 - q)(1 - t)) = 1 + t + t^2
        let den = series(&["1 - q", "q - 1"], 2);
        let num = series(&["1 - q"], 2);
        assert_eq!(num.div_exact(&den).unwrap(), series(&["1", "1", "1"], 2));
    }

    #[test]
    fn truncate_only_downward() {
        let s = series(&["1", "a", "b"], 2);
        assert_eq!(s.truncate(1).unwrap(), series(&["1", "a"], 1));
        assert!(matches!(s.truncate(3), Err(PolyError::Extension { .. })));
    }

    #[test]
    fn canonical_text() {
        let x = p("q^2*a - 1 + 3*b + a*b");
        assert_eq!(x.to_string(), "-1 + 3*b + a*q^2 + a*b");
        assert_eq!(MPoly::zero().to_string(), "0");
        assert_eq!(p("-2*a^3*b*q^10").to_string(), "-2*a^3*b*q^10");
        assert!("a + ^".parse::<MPoly>().is_err());
        assert!("".parse::<MPoly>().is_err());
    }

    #[test]
    fn first_difference_locates_coefficient() {
        let e = series(&["1", "a + 2*q"], 2);
        let a = series(&["1", "a + q"], 2);
        let d = e.first_difference(&a).unwrap();
        assert_eq!(d.t_power, 1);
        assert_eq!(d.monomial, Monomial::new(0, 0, 1));
        assert_eq!(d.expected, BigInt::from(2));
        assert_eq!(d.actual, BigInt::from(1));
        assert_eq!(e.first_difference(&e), None);
    }

    #[test]
    fn zseries_mul() {
        // (1 + z)(1 - z) = 1 - z^2
        let a = ZSeries::from_terms([(0, 0, MPoly::one()), (1, 0, MPoly::one())], 3, 1);
        let b = ZSeries::from_terms([(0, 0, MPoly::one()), (1, 0, p("-1"))], 3, 1);
        let c = a.checked_mul(&b).unwrap();
        let expect = ZSeries::from_terms([(0, 0, MPoly::one()), (2, 0, p("-1"))], 3, 1);
        assert_eq!(c, expect);
    }

    fn arb_mpoly() -> impl Strategy<Value = MPoly> {
        prop::collection::vec((-5i64..=5, 0u32..3, 0u32..3, 0u32..5), 0..5).prop_map(|ts| {
            MPoly::from_terms(ts.into_iter().map(|(c, a, b, q)| (c, Monomial::new(a, b, q))))
        })
    }

    fn arb_series(order: usize) -> impl Strategy<Value = TSeries> {
        prop::collection::vec(arb_mpoly(), order + 1)
            .prop_map(move |cs| TSeries::from_coeffs(cs, order))
    }

    fn arb_unit_series() -> impl Strategy<Value = TSeries> {
        (0usize..=12).prop_flat_map(|order| {
            arb_series(order).prop_map(|mut s| {
                s.set_coeff(0, MPoly::one());
                s
            })
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_mpoly(), y in arb_mpoly(), z in arb_mpoly()) {
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert!((&x - &x).is_zero());
            for (_, c) in (&x * &y).terms() {
                prop_assert!(!c.is_zero());
            }
        }

        #[test]
        fn text_round_trip(x in arb_mpoly()) {
            prop_assert_eq!(x.to_string().parse::<MPoly>().unwrap(), x);
        }

        #[test]
        fn inverse_is_inverse(s in arb_unit_series()) {
            let inv = s.invert().unwrap();
            prop_assert_eq!(s.checked_mul(&inv).unwrap(), TSeries::one(s.order()));
        }

        #[test]
        fn qt_is_multiplicative(s in arb_series(5), u in arb_series(5)) {
            prop_assert_eq!(
                s.checked_mul(&u).unwrap().subs_qt(),
                s.subs_qt().checked_mul(&u.subs_qt()).unwrap()
            );
        }

        #[test]
        fn substitutions_commute(x in arb_mpoly()) {
            let one_then_zero = x.substitute(Var::A, true).substitute(Var::B, false);
            let zero_then_one = x.substitute(Var::B, false).substitute(Var::A, true);
            prop_assert_eq!(&one_then_zero, &zero_then_one);
            let other = x.substitute(Var::B, true).substitute(Var::A, false);
            prop_assert_eq!(other, x.substitute(Var::A, false).substitute(Var::B, true));
        }

        #[test]
        fn exact_division_recovers_factor(x in arb_mpoly(), d in arb_mpoly()) {
            let d = MPoly::one() + d.substitute(Var::A, false).substitute(Var::B, false).shift_q(1);
            let prod = &x * &d;
            prop_assert_eq!(prod.div_exact_q(&d).unwrap(), x);
        }
    }
}
