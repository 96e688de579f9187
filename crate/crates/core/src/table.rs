//! Coefficient tables: the JSON, CSV and text emitters used by the CLI, and
//! parsers for the two machine-readable formats.
//!
//! Rows are `(t, a, b, q, coeff)` sorted by `(t, a, b, q)`; coefficients are
//! decimal strings since they outgrow 64-bit integers.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{MPoly, Monomial, TSeries};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error("row for t^{t} exceeds table order {order}")]
    OutOfOrder { t: usize, order: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub t: usize,
    pub a: u32,
    pub b: u32,
    pub q: u32,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub height: Option<u32>,
    pub order: usize,
    pub method: String,
    pub terms: Vec<Row>,
}

impl Table {
    pub fn from_series(height: Option<u32>, method: &str, s: &TSeries) -> Self {
        let terms = s
            .coeffs()
            .iter()
            .enumerate()
            .flat_map(|(t, c)| {
                c.terms().map(move |(m, v)| Row {
                    t,
                    a: m.a,
                    b: m.b,
                    q: m.q,
                    coeff: v.to_string(),
                })
            })
            .collect();
        Table {
            height,
            order: s.order(),
            method: method.to_string(),
            terms,
        }
    }

    pub fn to_series(&self) -> Result<TSeries, TableError> {
        let mut coeffs: Vec<Vec<(BigInt, Monomial)>> = vec![Vec::new(); self.order + 1];
        for row in &self.terms {
            let c: BigInt = row
                .coeff
                .parse()
                .map_err(|_| TableError::Coefficient(row.coeff.clone()))?;
            coeffs
                .get_mut(row.t)
                .ok_or(TableError::OutOfOrder {
                    t: row.t,
                    order: self.order,
                })?
                .push((c, Monomial::new(row.a, row.b, row.q)));
        }
        Ok(TSeries::from_coeffs(
            coeffs.into_iter().map(MPoly::from_terms).collect(),
            self.order,
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self, TableError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Header `t,a,b,q,coeff` and one line per row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.terms.is_empty() {
            w.write_record(["t", "a", "b", "q", "coeff"]).expect("in-memory write");
        }
        for row in &self.terms {
            w.serialize(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    /// Parses CSV rows; the height, order and method are not carried by the
    /// CSV form and are supplied by the caller.
    pub fn from_csv(s: &str, height: Option<u32>, order: usize, method: &str) -> Result<Self, TableError> {
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let terms = r.deserialize().collect::<Result<Vec<Row>, _>>()?;
        Ok(Table {
            height,
            order,
            method: method.to_string(),
            terms,
        })
    }

    /// One line per power of `t`, e.g. `t^2: a^2 + a*b*q`.
    pub fn to_text(&self) -> String {
        let series = self.to_series().expect("table built from a series");
        let mut out = String::new();
        for (n, c) in series.coeffs().iter().enumerate() {
            let _ = writeln!(out, "t^{n}: {c}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathenum::brute_force_gf;

    #[test]
    fn csv_layout() {
        let t = Table::from_series(Some(2), "brute", &brute_force_gf(2, 2));
        assert_eq!(
            t.to_csv(),
            "t,a,b,q,coeff\n0,0,0,0,1\n1,1,0,0,1\n2,1,1,1,1\n2,2,0,0,1\n"
        );
        let empty = Table::from_series(None, "x", &TSeries::zero(1));
        assert_eq!(empty.to_csv(), "t,a,b,q,coeff\n");
    }

    #[test]
    fn json_layout() {
        let t = Table::from_series(Some(0), "theorem", &TSeries::constant("b".parse().unwrap(), 1));
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "height": 0, "order": 1, "method": "theorem",
                "terms": [{"t": 0, "a": 0, "b": 1, "q": 0, "coeff": "1"}]
            })
        );
    }

    #[test]
    fn text_layout() {
        let t = Table::from_series(Some(1), "cf", &brute_force_gf(1, 2));
        assert_eq!(t.to_text(), "t^0: 1\nt^1: a*b\nt^2: a^2*b^2\n");
    }

    #[test]
    fn round_trips() {
        let s = brute_force_gf(4, 7);
        let t = Table::from_series(Some(4), "brute", &s);
        assert_eq!(Table::from_json(&t.to_json()).unwrap().to_series().unwrap(), s);
        let back = Table::from_csv(&t.to_csv(), Some(4), 7, "brute").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = "t,a,b,q,coeff\n0,0,0,0,x\n";
        let t = Table::from_csv(bad, None, 0, "m").unwrap();
        assert!(matches!(t.to_series(), Err(TableError::Coefficient(_))));
        let far = "t,a,b,q,coeff\n3,0,0,0,1\n";
        let t = Table::from_csv(far, None, 1, "m").unwrap();
        assert!(matches!(t.to_series(), Err(TableError::OutOfOrder { t: 3, order: 1 })));
    }
}
