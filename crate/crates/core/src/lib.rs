//! Exact generating functions for area-weighted Dyck paths of bounded height.
//!
//! The series `D_h(a,b;q,t) = sum a^u b^v q^m t^n` over Dyck paths of height at
//! most `h` (with `n` the half-length, `m` the area, `u` and `v` the contacts
//! with the floor and ceiling) is computed by exhaustive enumeration, a
//! transfer matrix, a continued fraction, a three-term recurrence, and closed
//! Gaussian binomial sums, all in exact integer arithmetic. [`verify`] checks
//! that the routes agree coefficient for coefficient.

pub mod cli;
pub mod genfun;
pub mod pathenum;
pub mod polyring;
pub mod qcombinat;
pub mod table;
pub mod verify;

pub use genfun::{
    cf_gf, d_corollary, d_infinite, d_rational, d_theorem, phi_expand, q_poly_closed,
    q_poly_recurrence, w_series, Bracket, DenominatorFamily, GenError, QPolynomial, RationalGF,
};
pub use pathenum::{brute_force_gf, dp_gf, generate_paths, path_stats, DyckPath, PathStats};
pub use polyring::{Difference, MPoly, Monomial, PolyError, TSeries, Var, ZSeries};
pub use qcombinat::{inv_poch_series, q_binomial, q_pochhammer};
