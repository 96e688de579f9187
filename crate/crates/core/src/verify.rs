//! Cross-method verification suite behind `dyckgf verify`.

use std::fmt;

use crate::genfun::{
    bracket_sum, cf_gf, d_corollary, d_infinite, d_rational, d_theorem_with, q_poly_closed_with,
    w_series, Bracket, DenominatorFamily,
};
use crate::pathenum::{brute_force_gf, dp_gf};
use crate::polyring::{Difference, MPoly, Monomial, TSeries, Var};

/// Where and how an identity failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub cell: String,
    pub difference: Option<Difference>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cells: usize,
    pub failure: Option<Failure>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub max_height: u32,
    pub order: usize,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify: h <= {}, t-order {}", self.max_height, self.order)?;
        for c in &self.checks {
            match &c.failure {
                None => writeln!(f, "PASS  {} ({} cells)", c.name, c.cells)?,
                Some(fail) => {
                    write!(f, "FAIL  {} at {}", c.name, fail.cell)?;
                    if let Some(d) = &fail.difference {
                        write!(f, ": {d}")?;
                    }
                    if let Some(m) = &fail.message {
                        write!(f, " ({m})")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        if failed == 0 {
            writeln!(f, "all {} identities hold", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} identities failed", self.checks.len())
        }
    }
}

struct Check {
    name: &'static str,
    cells: usize,
    failure: Option<Failure>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cells: 0,
            failure: None,
        }
    }

    /// Records one comparison; only the first failure is kept.
    fn compare(&mut self, cell: impl FnOnce() -> String, expected: &TSeries, actual: &TSeries) {
        self.cells += 1;
        if self.failure.is_some() {
            return;
        }
        if let Some(d) = expected.first_difference(actual) {
            let message = format!(
                "t^{} coefficient is {}, expected {}",
                d.t_power,
                actual.coeffs().get(d.t_power).cloned().unwrap_or_default(),
                expected.coeffs().get(d.t_power).cloned().unwrap_or_default()
            );
            self.failure = Some(Failure {
                cell: cell(),
                difference: Some(d),
                message: Some(message),
            });
        }
    }

    fn fail(&mut self, cell: String, message: String) {
        self.cells += 1;
        if self.failure.is_none() {
            self.failure = Some(Failure {
                cell,
                difference: None,
                message: Some(message),
            });
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            cells: self.cells,
            failure: self.failure,
        }
    }
}

fn at_ab_one(s: &TSeries) -> TSeries {
    s.substitute(Var::A, true).substitute(Var::B, true)
}

/// Runs every identity for heights `0..=max_h` and `t`-order `order`.
pub fn run_suite(max_h: u32, order: usize) -> Report {
    run_suite_with(max_h, order, &Bracket::standard())
}

/// [`run_suite`] with the closed-form bracket replaced (negative controls).
pub fn run_suite_with(max_h: u32, order: usize, bracket: &Bracket) -> Report {
    let brute: Vec<TSeries> = (0..=max_h).map(|h| brute_force_gf(h, order)).collect();
    let cf: Vec<TSeries> = (0..=max_h).map(|h| cf_gf(h, true, order)).collect();
    let theorem: Vec<Option<TSeries>> = (0..=max_h)
        .map(|h| d_theorem_with(h, order, bracket).ok())
        .collect();
    let family = DenominatorFamily::new(max_h.max(1));
    let mut checks = Vec::new();

    let mut c = Check::new("D_0 = b and D_1 = 1/(1-abt)");
    c.compare(|| "h=0".into(), &TSeries::constant("b".parse().unwrap(), order), &cf[0]);
    if max_h >= 1 {
        let geometric = TSeries::from_coeffs(
            (0..=order as u32)
                .map(|n| MPoly::term(1, Monomial::new(n, n, 0)))
                .collect(),
            order,
        );
        c.compare(|| "h=1".into(), &geometric, &cf[1]);
    }
    checks.push(c.finish());

    let mut c = Check::new("transfer matrix = enumeration");
    for h in 0..=max_h {
        c.compare(|| format!("h={h}"), &brute[h as usize], &dp_gf(h, order));
    }
    checks.push(c.finish());

    let mut c = Check::new("continued fraction = enumeration");
    for h in 0..=max_h {
        c.compare(|| format!("h={h}"), &brute[h as usize], &cf[h as usize]);
    }
    checks.push(c.finish());

    let mut c = Check::new("Q_h(0,b)/Q_h(a,b) = continued fraction");
    for h in 1..=max_h {
        match d_rational(h).and_then(|r| r.expand(order)) {
            Ok(s) => c.compare(|| format!("h={h}"), &cf[h as usize], &s),
            Err(e) => c.fail(format!("h={h}"), e.to_string()),
        }
    }
    checks.push(c.finish());

    let mut c = Check::new("closed binomial sum = enumeration");
    for h in 0..=max_h {
        match &theorem[h as usize] {
            Some(s) => c.compare(|| format!("h={h}"), &brute[h as usize], s),
            None => c.fail(format!("h={h}"), "denominator not invertible".into()),
        }
    }
    checks.push(c.finish());

    let mut c = Check::new("closed Q_h = recurrence Q_h");
    for h in 1..=max_h {
        let rec = family.q(h).expect("within family");
        match q_poly_closed_with(h, bracket) {
            Ok(closed) => {
                let deg = rec.degree().max(closed.degree());
                c.compare(|| format!("h={h}"), &rec.to_series(deg), &closed.to_series(deg));
            }
            Err(e) => c.fail(format!("h={h}"), e.to_string()),
        }
    }
    checks.push(c.finish());

    let mut c = Check::new("numerator = closed sum at a=0");
    for h in 1..=max_h {
        let rec = family.q(h).expect("within family").substitute(Var::A, false);
        let closed = bracket_sum(h, bracket, true);
        let deg = rec.degree().max(closed.degree());
        c.compare(|| format!("h={h}"), &rec.to_series(deg), &closed.to_series(deg));
    }
    checks.push(c.finish());

    let mut c = Check::new("[z^h] W = recurrence Q_h");
    if max_h >= 1 {
        match w_series(max_h as usize, order) {
            Ok(w) => {
                for h in 1..=max_h {
                    let expected = family.q(h).expect("within family").to_series(order);
                    c.compare(|| format!("h={h}"), &expected, w.coeff(h as usize));
                }
            }
            Err(e) => c.fail(format!("z-order {max_h}"), e.to_string()),
        }
    }
    checks.push(c.finish());

    let mut c = Check::new("a=b=1 sum = closed binomial sum at a=b=1");
    for h in 0..=max_h {
        if let Some(s) = &theorem[h as usize] {
            c.compare(|| format!("h={h}"), &at_ab_one(s), &d_corollary(h, order));
        }
    }
    checks.push(c.finish());

    // D_h agrees with the unbounded series through t^h
    let mut c = Check::new("a=b=1 sum = unbounded limit through t^min(h,N)");
    for h in 0..=max_h {
        let n = order.min(h as usize);
        c.compare(|| format!("h={h} N={n}"), &d_infinite(n), &d_corollary(h, n));
    }
    checks.push(c.finish());

    let mut c = Check::new("a=0 gives 1, b=0 drops a level");
    for h in 1..=max_h {
        let d = &cf[h as usize];
        c.compare(|| format!("a=0 h={h}"), &TSeries::one(order), &d.substitute(Var::A, false));
        c.compare(
            || format!("b=0 h={h}"),
            &cf[h as usize - 1].substitute(Var::B, true),
            &d.substitute(Var::B, false),
        );
    }
    checks.push(c.finish());

    let mut c = Check::new("coefficients are nonnegative");
    for h in 0..=max_h {
        let Some(s) = &theorem[h as usize] else { continue };
        c.cells += 1;
        if c.failure.is_none() {
            if let Some((n, _)) = s.coeffs().iter().enumerate().find(|(_, p)| !p.is_nonnegative()) {
                c.failure = Some(Failure {
                    cell: format!("h={h}"),
                    difference: None,
                    message: Some(format!("negative coefficient at t^{n}")),
                });
            }
        }
    }
    checks.push(c.finish());

    Report {
        max_height: max_h,
        order,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_reports_only_the_h0_closed_form() {
        let r = run_suite(3, 5);
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed()).collect();
        assert_eq!(failed.len(), 1, "{r}");
        let f = failed[0].failure.as_ref().unwrap();
        assert_eq!(failed[0].name, "closed binomial sum = enumeration");
        assert_eq!(f.cell, "h=0");
        let d = f.difference.as_ref().unwrap();
        assert_eq!((d.t_power, d.monomial), (0, crate::polyring::Monomial::ONE));
    }

    #[test]
    fn injected_fault_is_located() {
        let r = run_suite_with(4, 4, &Bracket::standard().with_flipped_sign(1));
        let closed = r
            .checks
            .iter()
            .find(|c| c.name == "closed Q_h = recurrence Q_h")
            .unwrap();
        let f = closed.failure.as_ref().expect("fault must be caught");
        assert!(f.difference.is_some());
        assert!(r.to_string().contains("FAIL  closed Q_h = recurrence Q_h at h="));
    }
}
