//! Line-based text format: a header `dim n order s`, then one line per
//! stored index `mu_1 ... mu_n : value`. Several blocks may follow each
//! other, one per component.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;

use super::multi_index::MultiIndex;
use super::scalar::Scalar;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};

pub trait TextScalar: Scalar {
    fn write_value(&self) -> String;
    fn parse_value(s: &str) -> Option<Self>;
}

impl TextScalar for f64 {
    fn write_value(&self) -> String {
        format!("{self:e}")
    }

    fn parse_value(s: &str) -> Option<Self> {
        f64::from_str(s).ok()
    }
}

impl TextScalar for BigRational {
    fn write_value(&self) -> String {
        self.to_string()
    }

    fn parse_value(s: &str) -> Option<Self> {
        BigRational::from_str(s).ok().or_else(|| f64::from_str(s).ok().map(|x| <BigRational as Scalar>::from_f64(x)))
    }
}

pub fn write_series<T: TextScalar>(series: &[TruncatedSeries<T>]) -> String {
    let mut out = String::new();
    for s in series {
        writeln!(out, "dim {} order {}", s.dim(), s.order()).unwrap();
        for (mu, v) in s.terms() {
            let e: Vec<String> = mu.entries().iter().map(|k| k.to_string()).collect();
            writeln!(out, "{} : {}", e.join(" "), v.write_value()).unwrap();
        }
    }
    out
}

pub fn parse_series<T: TextScalar>(text: &str) -> Result<Vec<TruncatedSeries<T>>> {
    let mut out: Vec<TruncatedSeries<T>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = ln + 1;
        let perr = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("dim") {
            let tok: Vec<&str> = rest.split_whitespace().collect();
            if tok.len() != 3 || tok[1] != "order" {
                return Err(perr("expected `dim n order s`"));
            }
            let dim: usize = tok[0].parse().map_err(|_| perr("bad dim"))?;
            let order: usize = tok[2].parse().map_err(|_| perr("bad order"))?;
            if dim == 0 {
                return Err(perr("dim must be positive"));
            }
            out.push(TruncatedSeries::zero(dim, order));
            continue;
        }
        let current = out.last_mut().ok_or_else(|| perr("coefficient before header"))?;
        let (lhs, rhs) = line.split_once(':').ok_or_else(|| perr("missing ':'"))?;
        let entries: Vec<u32> = lhs
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr("bad index entry")))
            .collect::<Result<_>>()?;
        if entries.len() != current.dim() {
            return Err(perr("index length does not match dim"));
        }
        let mu = MultiIndex::new(entries);
        if mu.weighted_order() as usize > current.order() {
            return Err(perr("index above truncation order"));
        }
        let v = T::parse_value(rhs.trim()).ok_or_else(|| perr("bad value"))?;
        current.set(&mu, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_series::<f64>("1 0 : 2.0").is_err());
        assert!(parse_series::<f64>("dim 2 order 2\n3 0 : 1").is_err());
        assert!(parse_series::<f64>("dim 2 order 2\n1 : 1").is_err());
        let s = parse_series::<f64>("# data\ndim 2 order 3\n1 0 : 0.5\n0 1 : -2\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].coeff(&MultiIndex::new(vec![0, 1])), -2.0);
    }
}
