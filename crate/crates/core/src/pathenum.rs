//! Exhaustive enumeration of height-bounded Dyck paths.
//!
//! Contact convention: `u` counts vertices on `y = 0` other than the origin;
//! `v` counts vertices on `y = h`, and the origin is one of them only when
//! `h = 0`. This is the convention under which `D_0 = b` and `D_1 = 1/(1-abt)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::polyring::{MPoly, Monomial, TSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path reaches height {height}, above the bound {bound}")]
    TooHigh { height: u32, bound: u32 },
    #[error("not a Dyck path: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Up,
    Down,
}

/// A Dyck path as a sequence of up and down steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DyckPath {
    steps: Vec<Step>,
}

impl DyckPath {
    /// Checks the prefix and balance conditions.
    pub fn new(steps: Vec<Step>) -> Result<Self, PathError> {
        let mut y: i64 = 0;
        for s in &steps {
            y += if *s == Step::Up { 1 } else { -1 };
            if y < 0 {
                return Err(PathError::Invalid(render(&steps)));
            }
        }
        if y != 0 {
            return Err(PathError::Invalid(render(&steps)));
        }
        Ok(DyckPath { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn half_length(&self) -> u32 {
        (self.steps.len() / 2) as u32
    }

    /// Heights of all vertices, origin included.
    pub fn heights(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(0).chain(self.steps.iter().scan(0u32, |y, s| {
            match s {
                Step::Up => *y += 1,
                Step::Down => *y -= 1,
            }
            Some(*y)
        }))
    }

    pub fn max_height(&self) -> u32 {
        self.heights().max().unwrap_or(0)
    }
}

fn render(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|s| if *s == Step::Up { 'U' } else { 'D' })
        .collect()
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.steps))
    }
}

impl FromStr for DyckPath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let steps = s
            .chars()
            .map(|c| match c {
                'U' => Ok(Step::Up),
                'D' => Ok(Step::Down),
                _ => Err(PathError::Invalid(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        DyckPath::new(steps)
    }
}

/// The statistics `(n, m, u, v)` of a path at a given height bound, plus the
/// triangular-plaquette area `n + 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathStats {
    pub n: u32,
    pub m: u32,
    pub u: u32,
    pub v: u32,
    pub tri_area: u32,
}

impl PathStats {
    /// The weight `a^u b^v q^m`; the `t^n` factor is carried by the series position.
    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.u, self.v, self.m)
    }
}

pub fn path_stats(path: &DyckPath, h: u32) -> Result<PathStats, PathError> {
    let height = path.max_height();
    if height > h {
        return Err(PathError::TooHigh { height, bound: h });
    }
    let n = path.half_length();
    let m = path
        .heights()
        .zip(path.steps())
        .filter(|(_, s)| **s == Step::Up)
        .map(|(y, _)| y)
        .sum();
    let u = path.heights().skip(1).filter(|&y| y == 0).count() as u32;
    let v = if h == 0 {
        path.heights().filter(|&y| y == h).count() as u32
    } else {
        path.heights().skip(1).filter(|&y| y == h).count() as u32
    };
    Ok(PathStats {
        n,
        m,
        u,
        v,
        tri_area: n + 2 * m,
    })
}

/// All Dyck paths of half-length `n` and height at most `h`, in
/// lexicographic order with `Up < Down`.
pub fn generate_paths(h: u32, n: u32) -> Vec<DyckPath> {
    let len = 2 * n as usize;
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(len);
    extend(&mut steps, 0, len, h, &mut out);
    out
}

fn extend(steps: &mut Vec<Step>, y: u32, len: usize, h: u32, out: &mut Vec<DyckPath>) {
    let remaining = len - steps.len();
    if remaining == 0 {
        out.push(DyckPath {
            steps: steps.clone(),
        });
        return;
    }
    // An up step needs room to come back down.
    if y < h && (y as usize) < remaining - 1 {
        steps.push(Step::Up);
        extend(steps, y + 1, len, h, out);
        steps.pop();
    }
    if y > 0 {
        steps.push(Step::Down);
        extend(steps, y - 1, len, h, out);
        steps.pop();
    }
}

/// `D_h` through `t^order` by summing path weights over every path.
pub fn brute_force_gf(h: u32, order: usize) -> TSeries {
    let coeffs = (0..=order as u32)
        .map(|n| {
            MPoly::from_terms(generate_paths(h, n).iter().map(|p| {
                let st = path_stats(p, h).expect("generated within bound");
                (1, st.monomial())
            }))
        })
        .collect();
    TSeries::from_coeffs(coeffs, order)
}

/// `D_h` through `t^order` by a transfer matrix over heights `0..=h`.
///
/// State `w[y]` is the total weight of walks of the current length ending at
/// height `y`. An up step from `y` multiplies by `q^y`; arriving at `y = 0`
/// multiplies by `a`; arriving at `y = h` multiplies by `b`.
pub fn dp_gf(h: u32, order: usize) -> TSeries {
    let top = h as usize;
    let a = Monomial::new(1, 0, 0);
    let b = Monomial::new(0, 1, 0);

    let mut w = vec![MPoly::zero(); top + 1];
    w[0] = if h == 0 { MPoly::var(crate::polyring::Var::B) } else { MPoly::one() };

    let mut coeffs = vec![w[0].clone()];
    for _ in 1..=order {
        for _ in 0..2 {
            let mut next = vec![MPoly::zero(); top + 1];
            for (y, wy) in w.iter().enumerate() {
                if wy.is_zero() {
                    continue;
                }
                if y < top {
                    next[y + 1] = &next[y + 1] + &wy.shift_q(y as u32);
                }
                if y > 0 {
                    next[y - 1] = &next[y - 1] + wy;
                }
            }
            next[0] = next[0].shift(&a);
            next[top] = next[top].shift(&b);
            w = next;
        }
        coeffs.push(w[0].clone());
    }
    TSeries::from_coeffs(coeffs, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Var;
    use num_bigint::BigInt;

    fn paths(h: u32, n: u32) -> Vec<String> {
        generate_paths(h, n).iter().map(ToString::to_string).collect()
    }

    fn series(cs: &[&str], order: usize) -> TSeries {
        TSeries::from_coeffs(cs.iter().map(|c| c.parse().unwrap()).collect(), order)
    }

    fn stats(path: &str, h: u32) -> (u32, u32, u32, u32) {
        let s = path_stats(&path.parse().unwrap(), h).unwrap();
        (s.n, s.m, s.u, s.v)
    }

    #[test]
    fn generation_examples() {
        assert_eq!(paths(0, 0), vec![""]);
        assert!(paths(0, 1).is_empty());
        assert_eq!(paths(1, 2), vec!["UDUD"]);
        assert_eq!(paths(2, 2), vec!["UUDD", "UDUD"]);
        assert_eq!(paths(1, 3), vec!["UDUDUD"]);
    }

    #[test]
    fn generated_paths_are_valid_and_distinct() {
        for h in 0..=5 {
            for n in 0..=7 {
                let ps = generate_paths(h, n);
                let mut sorted = ps.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted, ps, "order or duplicates at h={h} n={n}");
                for p in &ps {
                    assert_eq!(DyckPath::new(p.steps().to_vec()).as_ref(), Ok(p));
                    assert!(p.max_height() <= h);
                    assert_eq!(p.half_length(), n);
                }
            }
        }
    }

    #[test]
    fn stats_examples() {
        assert_eq!(stats("", 0), (0, 0, 0, 1));
        assert_eq!(stats("UUDD", 2), (2, 1, 1, 1));
        assert_eq!(stats("UDUD", 1), (2, 0, 2, 2));
        assert_eq!(stats("UDUD", 2), (2, 0, 2, 0));
        assert_eq!(stats("", 3), (0, 0, 0, 0));
        let s = path_stats(&"UUDUDD".parse().unwrap(), 4).unwrap();
        assert_eq!((s.m, s.tri_area), (2, 7));
    }

    #[test]
    fn stats_reject_too_high() {
        let err = path_stats(&"UUDD".parse().unwrap(), 1).unwrap_err();
        assert_eq!(err, PathError::TooHigh { height: 2, bound: 1 });
        assert!("UDD".parse::<DyckPath>().is_err());
        assert!("DU".parse::<DyckPath>().is_err());
        assert!("UX".parse::<DyckPath>().is_err());
    }

    #[test]
    fn stats_bounds() {
        for h in 0..=4 {
            for n in 0..=7 {
                for p in generate_paths(h, n) {
                    let s = path_stats(&p, h).unwrap();
                    assert!(s.m <= n * n.saturating_sub(1) / 2);
                    assert!(s.u <= n);
                    if h >= 1 {
                        assert!(s.v <= n);
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_gf(0, 2), series(&["b", "0", "0"], 2));
        assert_eq!(brute_force_gf(1, 2), series(&["1", "a*b", "a^2*b^2"], 2));
        assert_eq!(brute_force_gf(2, 2), series(&["1", "a", "a^2 + a*b*q"], 2));
    }

    #[test]
    fn dp_examples() {
        assert_eq!(dp_gf(0, 3), series(&["b"], 3));
        assert_eq!(dp_gf(2, 2), brute_force_gf(2, 2));
        let ab: Vec<String> = (0..=4).map(|n| format!("a^{n}*b^{n}")).collect();
        let ab: Vec<&str> = ab.iter().map(String::as_str).collect();
        assert_eq!(dp_gf(1, 4), series(&ab, 4));
    }

    #[test]
    fn catalan_counts() {
        let catalan = [1, 1, 2, 5, 14, 42, 132];
        for (n, c) in catalan.iter().enumerate() {
            assert_eq!(generate_paths(n as u32, n as u32).len(), *c);
            let total = brute_force_gf(n as u32, n)
                .coeff(n)
                .substitute(Var::A, true)
                .substitute(Var::B, true)
                .at_q_one();
            assert_eq!(total.constant_term(), BigInt::from(*c));
        }
    }

    #[test]
    fn dp_matches_brute_force() {
        for h in 0..=6 {
            assert_eq!(dp_gf(h, 10), brute_force_gf(h, 10), "h={h}");
        }
    }

    #[test]
    fn nested_in_height_and_stabilizes() {
        let n = 7;
        for h in 1..=n as u32 + 1 {
            // the b-weight marks a different line at each h, so compare at b = 1
            let diff = brute_force_gf(h, n)
                .substitute(Var::B, true)
                .checked_sub(&brute_force_gf(h - 1, n).substitute(Var::B, true))
                .unwrap();
            for c in diff.coeffs() {
                assert!(c.is_nonnegative(), "h={h}");
            }
        }
        // at h = n the staircase path touches the ceiling, so exact equality
        // starts one level higher; at b = 1 it starts at h = n
        let top = n as u32;
        for h in top + 1..top + 4 {
            assert_eq!(brute_force_gf(h, n), brute_force_gf(top + 1, n));
            assert_eq!(
                brute_force_gf(h, n).substitute(Var::B, true),
                brute_force_gf(top, n).substitute(Var::B, true)
            );
        }
    }

    #[test]
    fn degree_bounds() {
        for h in 0..=5 {
            let s = brute_force_gf(h, 8);
            for (n, c) in s.coeffs().iter().enumerate() {
                let n = n as u32;
                if c.is_zero() {
                    continue;
                }
                assert!(c.degree(Var::Q) <= n * n.saturating_sub(1) / 2);
                assert!(c.degree(Var::A) <= n);
                if h >= 1 {
                    assert!(c.degree(Var::B) <= n);
                } else {
                    assert_eq!(n, 0);
                    assert_eq!(c.degree(Var::B), 1);
                }
            }
        }
    }
}
