//! q-Pochhammer symbols, Gaussian binomials and expansions of `1/(z;q)_n`.

use std::cell::RefCell;

use crate::polyring::{MPoly, TSeries, ZSeries};

/// A polynomial in `q` alone, stored as an [`MPoly`] with zero `a`/`b` exponents.
pub type QPoly = MPoly;

/// `(q;q)_n = (1-q)(1-q^2)...(1-q^n)`; `(q;q)_0 = 1`.
pub fn q_pochhammer(n: u32) -> QPoly {
    q_pochhammer_range(1, n)
}

/// `(1-q^lo)(1-q^{lo+1})...(1-q^hi)`, empty (= 1) when `lo > hi`.
pub fn q_pochhammer_range(lo: u32, hi: u32) -> QPoly {
    (lo..=hi).fold(MPoly::one(), |acc, i| &acc * &(MPoly::one() - MPoly::q_pow(i)))
}

thread_local! {
    // Rows of the q-Pascal triangle, row n holding [n, 0..=n].
    static PASCAL: RefCell<Vec<Vec<QPoly>>> = RefCell::new(vec![vec![MPoly::one()]]);
}

/// Gaussian binomial `[n, k]_q`, extended to all integers by `[n, k] = 0`
/// whenever `k < 0` or `k > n`.
///
/// Rows are built with the q-Pascal rule `[n,k] = [n-1,k-1] + q^k [n-1,k]`
/// and cached per thread.
pub fn q_binomial(n: i64, k: i64) -> QPoly {
    if k < 0 || k > n {
        return MPoly::zero();
    }
    let (n, k) = (n as usize, k as usize);
    PASCAL.with(|cell| {
        let mut rows = cell.borrow_mut();
        while rows.len() <= n {
            let prev = rows.last().expect("row 0 present");
            let len = prev.len();
            let mut row = Vec::with_capacity(len + 1);
            row.push(MPoly::one());
            for j in 1..len {
                row.push(&prev[j - 1] + &prev[j].shift_q(j as u32));
            }
            row.push(MPoly::one());
            rows.push(row);
        }
        rows[n][k].clone()
    })
}

/// Expansion of `1/(z;q)_n = prod_{i<n} 1/(1 - z q^i)` up to `z^z_order`,
/// as a [`ZSeries`] whose coefficients are constant `t`-series (`t`-order 0).
pub fn inv_poch_series(n: u32, z_order: usize) -> ZSeries {
    let mut acc = ZSeries::one(z_order, 0);
    for i in 0..n {
        let geometric = ZSeries::from_terms(
            (0..=z_order).map(|k| (k, 0, MPoly::q_pow(i * k as u32))),
            z_order,
            0,
        );
        acc = acc
            .checked_mul(&geometric)
            .expect("factors share their orders");
    }
    acc
}

/// Coefficient of `z^m` in [`inv_poch_series`], read back as a [`QPoly`].
pub fn z_coeff(s: &ZSeries, m: usize) -> &QPoly {
    s.coeff(m).coeff(0)
}

/// Lifts a `t`-constant [`ZSeries`] to `t`-order `order`.
pub(crate) fn lift_t_order(s: &ZSeries, order: usize) -> ZSeries {
    let mut out = ZSeries::zero(s.z_order(), order);
    for (k, c) in s.coeffs().iter().enumerate() {
        out.set_coeff(k, TSeries::from_coeffs(c.coeffs().to_vec(), order))
            .expect("order matches");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(s: &str) -> MPoly {
        s.parse().unwrap()
    }

    fn binomial(n: u64, k: u64) -> BigInt {
        (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(q_pochhammer(0), MPoly::one());
        assert_eq!(q_pochhammer(1), p("1 - q"));
        assert_eq!(q_pochhammer(2), p("1 - q - q^2 + q^3"));
    }

    #[test]
    fn binomial_examples() {
        assert!(q_binomial(3, -1).is_zero());
        assert!(q_binomial(3, 4).is_zero());
        assert!(q_binomial(-1, 0).is_zero());
        assert!(q_binomial(-2, -3).is_zero());
        assert_eq!(q_binomial(5, 0), MPoly::one());
        assert_eq!(q_binomial(2, 1), p("1 + q"));
        assert_eq!(q_binomial(4, 2), p("1 + q + 2*q^2 + q^3 + q^4"));
    }

    #[test]
    fn division_identity() {
        for n in 0..=15u32 {
            for k in 0..=n {
                let lhs = &(&q_pochhammer(k) * &q_pochhammer(n - k)) * &q_binomial(n as i64, k as i64);
                assert_eq!(lhs, q_pochhammer(n), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn q_pascal_everywhere() {
        for n in -2i64..=15 {
            for k in -2..=n + 2 {
                // [0,0] = 1 while both neighbours vanish under the zero convention
                if (n, k) == (0, 0) {
                    continue;
                }
                let rhs = &q_binomial(n - 1, k - 1)
                    + &q_binomial(n - 1, k).shift_q(k.max(0) as u32);
                assert_eq!(q_binomial(n, k), rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn symmetry_positivity_degree_and_q_one() {
        for n in 0..=15i64 {
            for k in 0..=n {
                let g = q_binomial(n, k);
                assert_eq!(g, q_binomial(n, n - k));
                assert!(g.is_q_only() && g.is_nonnegative());
                assert_eq!(g.degree(crate::polyring::Var::Q) as i64, k * (n - k));
                assert_eq!(g.at_q_one().constant_term(), binomial(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn inv_poch_examples() {
        assert_eq!(inv_poch_series(0, 4), ZSeries::one(4, 0));
        let s = inv_poch_series(1, 3);
        for m in 0..=3 {
            assert_eq!(z_coeff(&s, m), &MPoly::one());
        }
        let s = inv_poch_series(2, 2);
        assert_eq!(z_coeff(&s, 0), &p("1"));
        assert_eq!(z_coeff(&s, 1), &p("1 + q"));
        assert_eq!(z_coeff(&s, 2), &p("1 + q + q^2"));
    }

    #[test]
    fn q_binomial_theorem() {
        for n in 1..=6u32 {
            let s = inv_poch_series(n, 10);
            for m in 0..=10 {
                assert_eq!(
                    z_coeff(&s, m),
                    &q_binomial((m as u32 + n - 1) as i64, m as i64),
                    "n={n} m={m}"
                );
            }
        }
    }
}
