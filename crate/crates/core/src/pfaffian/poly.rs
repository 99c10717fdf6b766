//! Sparse polynomials in `(x, y_1, ..., y_r)` with [`Constant`] coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use super::constant::Constant;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::Rational;

/// Exponent vector `[e_x, e_1, ..., e_r]`.
pub type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, Constant>,
}

impl Poly {
    /// Zero polynomial in `nvars` variables (`x` counts as one).
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Constant) -> Self {
        Poly::zero(nvars).add(&Poly::monomial(nvars, vec![0; nvars], c))
    }

    pub fn monomial(nvars: usize, exps: Exps, c: Constant) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    /// The variable with index `i` (`0` is `x`, `j` is `y_j`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, Constant::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Constant> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest `j` such that `y_j` occurs, zero if only `x` occurs.
    pub fn highest_y(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|e| e.iter().enumerate().skip(1).filter(|(_, k)| **k > 0).map(|(i, _)| i))
            .max()
            .unwrap_or(0)
    }

    pub fn has_rational_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let sum = match terms.get(e) {
                Some(prev) => prev.add(c),
                None => c.clone(),
            };
            if sum.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), sum);
            }
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out = out.add(&Poly::monomial(self.nvars, e, ca.mul(cb)));
            }
        }
        out
    }

    pub fn scale(&self, c: &Constant) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, k) in &self.terms {
            out = out.add(&Poly::monomial(self.nvars, e.clone(), k.mul(c)));
        }
        out
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            let k = Rational::from_integer(e[i].into());
            out = out.add(&Poly::monomial(self.nvars, d, c.scale(&k)));
        }
        out
    }

    /// Replaces every constant by an enclosure at `bits` for repeated evaluation.
    pub fn compile(&self, bits: u32) -> CompiledPoly {
        CompiledPoly {
            bits,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.enclose(bits)))
                .collect(),
        }
    }

    pub fn evaluate(&self, vars: &[Interval], bits: u32) -> Interval {
        self.compile(bits).evaluate(vars)
    }

    /// Encoding: list of `{"exponents": [..], "coeff": ..}`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({"exponents": e, "coeff": c.to_json()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, nvars: usize, field: &str) -> Result<Poly> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::parse(field, "polynomial must be a list of terms"))?;
        let mut out = Poly::zero(nvars);
        for item in items {
            let exps = item
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(field, "term lacks `exponents`"))?;
            if exps.len() > nvars {
                return Err(Error::parse(
                    field,
                    format!("exponent vector of length {} exceeds {nvars} variables", exps.len()),
                ));
            }
            let mut e = vec![0u32; nvars];
            for (i, x) in exps.iter().enumerate() {
                e[i] = x
                    .as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| Error::parse(field, "exponents must be nonnegative integers"))?;
            }
            let c = Constant::from_json(
                item.get("coeff").ok_or_else(|| Error::parse(field, "term lacks `coeff`"))?,
                field,
            )?;
            out = out.add(&Poly::monomial(nvars, e, c));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = c.to_string();
            let needs_parens = coeff.contains(" + ");
            let mut factors = Vec::new();
            for (i, k) in e.iter().enumerate() {
                if *k == 0 {
                    continue;
                }
                let name = if i == 0 { "x".to_string() } else { format!("y{i}") };
                factors.push(if *k == 1 { name } else { format!("{name}^{k}") });
            }
            match (coeff.as_str(), factors.is_empty()) {
                (_, true) => write!(f, "{coeff}")?,
                ("1", false) => write!(f, "{}", factors.join("*"))?,
                ("-1", false) => write!(f, "-{}", factors.join("*"))?,
                _ if needs_parens => write!(f, "({coeff})*{}", factors.join("*"))?,
                _ => write!(f, "{coeff}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

/// A polynomial whose coefficients have been enclosed at a fixed precision.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    bits: u32,
    terms: Vec<(Exps, Interval)>,
}

impl CompiledPoly {
    pub fn evaluate(&self, vars: &[Interval]) -> Interval {
        let mut acc = Interval::from_int(0);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, k) in vars.iter().zip(e) {
                if *k > 0 {
                    term = term.mul(&v.pow(*k)).round_out(self.bits + 8);
                }
            }
            acc = acc.add(&term);
        }
        acc.round_out(self.bits + 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn x() -> Poly {
        Poly::var(2, 0)
    }

    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn arithmetic_and_degree() {
        let p = x().mul(&y()).add(&y().mul(&y()));
        assert_eq!(p.degree(), 2);
        assert_eq!(p.highest_y(), 1);
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.partial(1), x().add(&y().scale(&Constant::int(2))));
        assert_eq!(p.to_string(), "x*y1 + y1^2");
    }

    #[test]
    fn evaluation() {
        let p = x().mul(&x()).sub(&y());
        let v = p.evaluate(&[Interval::from_int(3), Interval::from_int(4)], 32);
        assert_eq!(v, Interval::from_int(5));
        let w = p.evaluate(&[Interval::new(int(-1), int(2)), Interval::point(rat(1, 2))], 32);
        assert_eq!(w, Interval::new(rat(-1, 2), rat(7, 2)));
    }

    #[test]
    fn json_round_trip() {
        let p = y().scale(&Constant::log2()).add(&Poly::constant(2, Constant::int(-1)));
        let v = p.to_json();
        assert_eq!(Poly::from_json(&v, 2, "P").unwrap(), p);
        let short = json!([{"exponents": [1], "coeff": "2"}]);
        assert_eq!(Poly::from_json(&short, 2, "P").unwrap(), x().scale(&Constant::int(2)));
        assert!(Poly::from_json(&json!([{"exponents": [0, 0, 1], "coeff": "1"}]), 2, "P").is_err());
        assert!(Poly::from_json(&json!({"exponents": [1]}), 2, "P").is_err());
    }
}
