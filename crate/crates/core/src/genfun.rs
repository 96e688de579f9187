//! Closed forms and recurrences for the bounded-height generating function
//! `D_h(a,b;q,t) = sum over paths of a^u b^v q^m t^n`.
//!
//! Each routine here is an independent route to `D_h` or to its denominator
//! polynomials `Q_h`:
//!
//! * [`cf_gf`]: the continued fraction `D_h = 1/(1 - a t D_{h-1}(1,b;q,qt))`.
//! * [`q_poly_recurrence`] / [`d_rational`]: the three-term recurrence for
//!   `Q_h` and `D_h = Q_h(0,b)/Q_h(a,b)`.
//! * [`w_series`]: the generating function `W = sum_h Q_h z^h` assembled from
//!   two `1phi2`-type series.
//! * [`q_poly_closed`] / [`d_theorem`]: the four-term Gaussian binomial sums.
//! * [`d_corollary`] / [`d_infinite`]: the `a = b = 1` and `h -> infinity`
//!   specialisations.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::polyring::{first_difference, Difference, MPoly, PolyError, TSeries, Var, ZSeries};
use crate::qcombinat::{inv_poch_series, lift_t_order, q_binomial, q_pochhammer_range};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("height must be at least 1, got {0}")]
    HeightDomain(u32),
    #[error("z-order must be at least 1")]
    ZOrderDomain,
    #[error("negative power survived assembly at z^{z_power} t^{t_power}: {coeff}")]
    ResidualPole {
        z_power: usize,
        t_power: usize,
        coeff: String,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An exact polynomial in `t` with [`MPoly`] coefficients, tagged with the
/// height it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolynomial {
    h: u32,
    coeffs: Vec<MPoly>,
}

impl QPolynomial {
    pub fn new(h: u32, mut coeffs: Vec<MPoly>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(MPoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(MPoly::zero());
        }
        QPolynomial { h, coeffs }
    }

    pub fn height(&self) -> u32 {
        self.h
    }

    pub fn coeffs(&self) -> &[MPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> MPoly {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn substitute(&self, var: Var, value: bool) -> QPolynomial {
        QPolynomial::new(self.h, self.coeffs.iter().map(|c| c.substitute(var, value)).collect())
    }

    /// The polynomial as a series truncated after `t^order`.
    pub fn to_series(&self, order: usize) -> TSeries {
        TSeries::from_coeffs(self.coeffs.clone(), order)
    }

    /// First coefficient where `actual` departs from `self`.
    pub fn first_difference(&self, actual: &QPolynomial) -> Option<Difference> {
        first_difference(&self.coeffs, &actual.coeffs)
    }

    fn sub_t_times(&self, factor: &MPoly, other: &QPolynomial, h: u32) -> QPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len() + 1);
        let coeffs = (0..len)
            .map(|n| {
                let mut c = self.coeff(n);
                if n >= 1 {
                    c = &c - &(factor * &other.coeff(n - 1));
                }
                c
            })
            .collect();
        QPolynomial::new(h, coeffs)
    }
}

impl fmt::Display for QPolynomial {
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
        Ok(())
    }
}

/// `D_h` as a quotient of two polynomials in `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalGF {
    pub numerator: QPolynomial,
    pub denominator: QPolynomial,
}

impl RationalGF {
    /// Series expansion of the quotient through `t^order`.
    pub fn expand(&self, order: usize) -> Result<TSeries, GenError> {
        let num = self.numerator.to_series(order);
        let den = self.denominator.to_series(order);
        Ok(num.checked_mul(&den.invert()?)?)
    }
}

/// `(-1)^n`
fn alternating(n: u64) -> BigInt {
    BigInt::from(if n.is_multiple_of(2) { 1 } else { -1 })
}

fn b_poly() -> MPoly {
    MPoly::var(Var::B)
}

fn t_linear(k: usize, c: MPoly, order: usize) -> TSeries {
    let mut s = TSeries::zero(order);
    if k <= order {
        s.set_coeff(k, c);
    }
    s
}

/// `D_h` by the continued fraction, built from the innermost level outward.
///
/// With `a_general = false` the outer `a` is set to 1.
pub fn cf_gf(h: u32, a_general: bool, order: usize) -> TSeries {
    // D_0(1,b) = b; each level is D_k(1,b) = 1/(1 - t D_{k-1}(1,b;q,qt)).
    let mut inner = TSeries::constant(b_poly(), order);
    if h == 0 {
        return inner;
    }
    for level in 1..=h {
        let a = if level == h && a_general {
            MPoly::var(Var::A)
        } else {
            MPoly::one()
        };
        let step = inner.subs_qt().shift_t(1).scale(&a);
        let den = TSeries::one(order)
            .checked_sub(&step)
            .expect("shared order");
        inner = den.invert().expect("unit constant term");
    }
    inner
}

/// The family `Q_h(a,b;q,t)` for `h = 1..=max_h`, built from the `b = 1`
/// sequence `P_h = Q_h(a,1;q,t)`, which is computed once.
#[derive(Debug, Clone)]
pub struct DenominatorFamily {
    // p[h - 1] = P_h
    p: Vec<QPolynomial>,
}

impl DenominatorFamily {
    pub fn new(max_h: u32) -> Self {
        let a = MPoly::var(Var::A);
        let q = MPoly::var(Var::Q);
        let mut p = Vec::with_capacity(max_h as usize);
        if max_h >= 1 {
            p.push(QPolynomial::new(1, vec![MPoly::one(), -&a]));
        }
        if max_h >= 2 {
            p.push(QPolynomial::new(2, vec![MPoly::one(), -(&a + &q)]));
        }
        for h in 3..=max_h {
            let i = h as usize - 1;
            let next = p[i - 1].sub_t_times(&MPoly::q_pow(h - 1), &p[i - 2], h);
            p.push(next);
        }
        DenominatorFamily { p }
    }

    pub fn max_height(&self) -> u32 {
        self.p.len() as u32
    }

    /// `Q_h(a, 1; q, t)`.
    pub fn at_b_one(&self, h: u32) -> Result<&QPolynomial, GenError> {
        if h == 0 || h > self.max_height() {
            return Err(GenError::HeightDomain(h));
        }
        Ok(&self.p[h as usize - 1])
    }

    /// `Q_h(a, b; q, t)`.
    pub fn q(&self, h: u32) -> Result<QPolynomial, GenError> {
        let a = MPoly::var(Var::A);
        let b = b_poly();
        let q = MPoly::var(Var::Q);
        match h {
            0 => Err(GenError::HeightDomain(0)),
            _ if h > self.max_height() => Err(GenError::HeightDomain(h)),
            1 => Ok(QPolynomial::new(1, vec![MPoly::one(), -(&a * &b)])),
            2 => Ok(QPolynomial::new(2, vec![MPoly::one(), -(&a + &(&b * &q))])),
            _ => {
                let i = h as usize - 1;
                let factor = MPoly::q_pow(h - 1) * &b;
                Ok(self.p[i - 1].sub_t_times(&factor, &self.p[i - 2], h))
            }
        }
    }
}

/// `Q_h` from the three-term recurrence.
pub fn q_poly_recurrence(h: u32) -> Result<QPolynomial, GenError> {
    if h == 0 {
        return Err(GenError::HeightDomain(0));
    }
    DenominatorFamily::new(h).q(h)
}

/// The polynomial weight multiplying one Gaussian binomial in the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `1 - b`
    OneMinusB,
    /// `b`
    B,
    /// `(1 - a)(1 - b)`
    OneMinusAOneMinusB,
    /// `(1 - a) b`
    OneMinusATimesB,
}

impl Weight {
    /// The weight as a polynomial. With `a_zero` every `(1 - a)` becomes 1.
    fn poly(self, a_zero: bool) -> MPoly {
        let one = MPoly::one();
        let b = b_poly();
        let one_minus_a = if a_zero {
            MPoly::one()
        } else {
            &one - &MPoly::var(Var::A)
        };
        match self {
            Weight::OneMinusB => &one - &b,
            Weight::B => b,
            Weight::OneMinusAOneMinusB => &one_minus_a * &(&one - &b),
            Weight::OneMinusATimesB => &one_minus_a * &b,
        }
    }
}

/// One summand `sign * weight * [h + n_offset - m, m + k_offset]_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketTerm {
    pub weight: Weight,
    pub sign: i8,
    pub n_offset: i64,
    pub k_offset: i64,
}

/// The four-term bracket multiplying `(-t)^m q^{m(m-1)}` in the closed form of
/// `Q_h`. Kept as data so perturbed variants can be built for negative tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bracket {
    pub terms: [BracketTerm; 4],
}

impl Default for Bracket {
    fn default() -> Self {
        Bracket::standard()
    }
}

impl Bracket {
    pub const fn standard() -> Self {
        Bracket {
            terms: [
                BracketTerm {
                    weight: Weight::OneMinusB,
                    sign: 1,
                    n_offset: 0,
                    k_offset: 0,
                },
                BracketTerm {
                    weight: Weight::B,
                    sign: 1,
                    n_offset: 1,
                    k_offset: 0,
                },
                BracketTerm {
                    weight: Weight::OneMinusAOneMinusB,
                    sign: -1,
                    n_offset: -1,
                    k_offset: -1,
                },
                BracketTerm {
                    weight: Weight::OneMinusATimesB,
                    sign: -1,
                    n_offset: 0,
                    k_offset: -1,
                },
            ],
        }
    }

    pub fn with_flipped_sign(mut self, term: usize) -> Self {
        self.terms[term].sign = -self.terms[term].sign;
        self
    }

    pub fn with_shifted_index(mut self, term: usize, dn: i64, dk: i64) -> Self {
        self.terms[term].n_offset += dn;
        self.terms[term].k_offset += dk;
        self
    }

    /// Every single-site perturbation: one sign flip or one index moved by ±1,
    /// for each of the four terms.
    pub fn perturbations() -> Vec<(String, Bracket)> {
        let base = Bracket::standard();
        let mut out = Vec::new();
        for i in 0..4 {
            out.push((format!("term {} sign flipped", i + 1), base.with_flipped_sign(i)));
            for d in [-1, 1] {
                out.push((
                    format!("term {} upper index {:+}", i + 1, d),
                    base.with_shifted_index(i, d, 0),
                ));
                out.push((
                    format!("term {} lower index {:+}", i + 1, d),
                    base.with_shifted_index(i, 0, d),
                ));
            }
        }
        out
    }

    fn evaluate(&self, h: u32, m: u32, a_zero: bool) -> MPoly {
        let (h, m) = (h as i64, m as i64);
        self.terms.iter().fold(MPoly::zero(), |acc, term| {
            let g = q_binomial(h + term.n_offset - m, m + term.k_offset);
            if g.is_zero() {
                return acc;
            }
            let v = &term.weight.poly(a_zero) * &g;
            if term.sign < 0 {
                &acc - &v
            } else {
                &acc + &v
            }
        })
    }
}

/// Last `m` for which some bracket term can be nonzero, plus one.
fn sum_cutoff(h: u32) -> u32 {
    h.div_ceil(2) + 1
}

/// `sum_m (-t)^m q^{m(m-1)} bracket(h, m)`. With `a_zero` the `(1 - a)`
/// factors are dropped, giving the numerator polynomial.
pub fn bracket_sum(h: u32, bracket: &Bracket, a_zero: bool) -> QPolynomial {
    let coeffs = (0..=sum_cutoff(h))
        .map(|m| {
            let c = bracket.evaluate(h, m, a_zero).shift_q(m * m.saturating_sub(1));
            if m % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    QPolynomial::new(h, coeffs)
}

/// `Q_h` from the closed Gaussian binomial sum.
pub fn q_poly_closed(h: u32) -> Result<QPolynomial, GenError> {
    q_poly_closed_with(h, &Bracket::standard())
}

/// [`q_poly_closed`] with an arbitrary bracket (used for negative controls).
pub fn q_poly_closed_with(h: u32, bracket: &Bracket) -> Result<QPolynomial, GenError> {
    if h == 0 {
        return Err(GenError::HeightDomain(0));
    }
    Ok(bracket_sum(h, bracket, false))
}

/// `D_h = Q_h(0,b;q,t) / Q_h(a,b;q,t)`.
pub fn d_rational(h: u32) -> Result<RationalGF, GenError> {
    let denominator = q_poly_recurrence(h)?;
    Ok(RationalGF {
        numerator: denominator.substitute(Var::A, false),
        denominator,
    })
}

/// `D_h` from the ratio of the two closed sums, for every `h >= 0`.
///
/// The general formula is used at `h = 0` too; under the zero convention for
/// Gaussian binomials both sums reduce to 1 there, so the result is the
/// constant series 1 (the `b = 1` value of `D_0`), not `b`.
pub fn d_theorem(h: u32, order: usize) -> TSeries {
    d_theorem_with(h, order, &Bracket::standard()).expect("denominator has unit constant term")
}

pub fn d_theorem_with(h: u32, order: usize, bracket: &Bracket) -> Result<TSeries, GenError> {
    let num = bracket_sum(h, bracket, true).to_series(order);
    let den = bracket_sum(h, bracket, false).to_series(order);
    Ok(num.checked_mul(&den.invert()?)?)
}

/// `D_h(1,1;q,t)` as the ratio of the two single-binomial sums.
pub fn d_corollary(h: u32, order: usize) -> TSeries {
    let h = h as i64;
    let last = (h + 1).div_euclid(2) + 1;
    let mut num = TSeries::zero(order);
    let mut den = TSeries::zero(order);
    for m in 0..=last {
        let k = m as usize;
        if k > order {
            break;
        }
        let sign = alternating(m as u64);
        let mq = m as u32;
        num.set_coeff(k, q_binomial(h - m, m).shift_q(mq * mq).scale(&sign));
        den.set_coeff(
            k,
            q_binomial(h + 1 - m, m)
                .shift_q(mq * mq.saturating_sub(1))
                .scale(&sign),
        );
    }
    num.checked_mul(&den.invert().expect("unit constant term"))
        .expect("shared order")
}

/// Area generating function of unrestricted Dyck paths through `t^order`.
///
/// Both sums are multiplied through by `(q;q)_order`, so term `m` carries the
/// polynomial `(1-q^{m+1})...(1-q^order)`; the quotient is taken by exact
/// division.
pub fn d_infinite(order: usize) -> TSeries {
    let top = order as u32;
    let mut num = TSeries::zero(order);
    let mut den = TSeries::zero(order);
    for m in 0..=top {
        let cleared = q_pochhammer_range(m + 1, top);
        let sign = alternating(m as u64);
        num.set_coeff(m as usize, cleared.shift_q(m * m).scale(&sign));
        den.set_coeff(
            m as usize,
            cleared.shift_q(m * m.saturating_sub(1)).scale(&sign),
        );
    }
    num.div_exact(&den).expect("quotient has polynomial coefficients")
}

/// Expansion of `phi(z, q, -q^shift t z^2)` where
/// `phi(z,q,x) = sum_n q^{n(n-1)} x^n / (z;q)_n`, through `z^z_order`, `t^order`.
pub fn phi_expand(q_shift: u32, z_order: usize, order: usize) -> ZSeries {
    let mut out = ZSeries::zero(z_order, order);
    let mut n = 0usize;
    while 2 * n <= z_order && n <= order {
        let nn = n as u32;
        let sign = alternating(n as u64);
        let weight = MPoly::q_pow(nn * nn.saturating_sub(1) + q_shift * nn).scale(&sign);
        let poch = lift_t_order(&inv_poch_series(nn, z_order), order);
        let term = poch
            .mul_tseries(&t_linear(n, weight, order))
            .expect("shared order")
            .shift_z(2 * n);
        out = out.checked_add(&term).expect("shared order");
        n += 1;
    }
    out
}

/// `W(z) = sum_{h>=1} Q_h z^h` through `z^z_order`, `t^order`, assembled from
/// the closed form with two `phi` series.
///
/// The closed form is `N(z,t) / (t z)`; the numerator
///
/// ```text
/// N = (abtz - abt - atz - btz - bz + b + z)
///     + (bz - b - z)(1 - at) phi(z,q,-t z^2)
///     - t z (bz - b - z) phi(z,q,-q t z^2)
/// ```
///
/// is built one order higher in each variable, checked to vanish on `z^0` and
/// `t^0`, and then shifted down.
pub fn w_series(z_order: usize, order: usize) -> Result<ZSeries, GenError> {
    if z_order == 0 {
        return Err(GenError::ZOrderDomain);
    }
    let (zo, to) = (z_order + 1, order + 1);
    let a = MPoly::var(Var::A);
    let b = b_poly();
    let ab = &a * &b;
    let one = MPoly::one();

    let prefactor = ZSeries::from_terms(
        [
            (1, 1, ab.clone()),
            (0, 1, -&ab),
            (1, 1, -&a),
            (1, 1, -&b),
            (1, 0, -&b),
            (0, 0, b.clone()),
            (1, 0, one.clone()),
        ],
        zo,
        to,
    );
    // bz - b - z
    let edge = ZSeries::from_terms([(1, 0, b.clone()), (0, 0, -&b), (1, 0, -&one)], zo, to);
    let one_minus_at = t_linear(0, one.clone(), to).checked_sub(&t_linear(1, a.clone(), to))?;

    let phi0 = phi_expand(0, zo, to);
    let phi1 = phi_expand(1, zo, to);

    let second = edge.checked_mul(&phi0)?.mul_tseries(&one_minus_at)?;
    let third = edge
        .checked_mul(&phi1)?
        .shift_z(1)
        .mul_tseries(&t_linear(1, one.clone(), to))?;
    let numerator = prefactor.checked_add(&second)?.checked_sub(&third)?;

    for (k, c) in numerator.coeffs().iter().enumerate() {
        for (n, coeff) in c.coeffs().iter().enumerate() {
            if (k == 0 || n == 0) && !coeff.is_zero() {
                return Err(GenError::ResidualPole {
                    z_power: k,
                    t_power: n,
                    coeff: coeff.to_string(),
                });
            }
        }
    }

    let mut w = ZSeries::zero(z_order, order);
    for k in 0..=z_order {
        let shifted = numerator.coeff(k + 1).coeffs()[1..].to_vec();
        w.set_coeff(k, TSeries::from_coeffs(shifted, order))?;
    }
    Ok(w)
}
