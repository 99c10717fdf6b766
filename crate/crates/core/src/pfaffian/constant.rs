//! Real constants that can be enclosed to any precision.
//!
//! A constant is a polynomial with rational coefficients in logarithm atoms
//! `ln q`. Chains such as `2^x` (whose derivative carries `ln 2`) keep exact
//! symbolic coefficients this way, and identically-zero detection stays
//! symbolic.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::{ln_rational, Interval};
use crate::rational::{format_rational, parse_rational, Rational};

/// `ln q` for a positive rational `q != 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LnAtom(Rational);

impl LnAtom {
    pub fn argument(&self) -> &Rational {
        &self.0
    }

    fn name(&self) -> String {
        if self.0 == BigRational::from_integer(2.into()) {
            "log2".to_string()
        } else {
            format!("ln({})", format_rational(&self.0))
        }
    }

    fn parse(s: &str) -> Result<Rational> {
        let s = s.trim();
        if s == "log2" || s == "ln2" {
            return Ok(BigRational::from_integer(2.into()));
        }
        let inner = s
            .strip_prefix("ln(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse("const", format!("unknown constant `{s}`")))?;
        parse_rational(inner)
    }
}

type Monomial = Vec<(LnAtom, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Constant {
    terms: BTreeMap<Monomial, Rational>,
}

impl Constant {
    pub fn zero() -> Self {
        Constant::default()
    }

    pub fn one() -> Self {
        Constant::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Vec::new(), q);
        }
        Constant { terms }
    }

    pub fn int(n: i64) -> Self {
        Constant::rational(BigRational::from_integer(n.into()))
    }

    /// `ln q`; zero when `q = 1`.
    pub fn ln(q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::precondition("logarithm of a nonpositive rational"));
        }
        if q.is_one() {
            return Ok(Constant::zero());
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![(LnAtom(q), 1)], Rational::one());
        Ok(Constant { terms })
    }

    pub fn log2() -> Self {
        Constant::ln(BigRational::from_integer(2.into())).expect("2 > 0")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the constant is a plain rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Constant) -> Constant {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Constant { terms }
    }

    pub fn neg(&self) -> Constant {
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Constant) -> Constant {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> Constant {
        if q.is_zero() {
            return Constant::zero();
        }
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn mul(&self, other: &Constant) -> Constant {
        let mut out = Constant::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut merged: BTreeMap<LnAtom, u32> = BTreeMap::new();
                for (a, e) in ma.iter().chain(mb.iter()) {
                    *merged.entry(a.clone()).or_insert(0) += e;
                }
                let m: Monomial = merged.into_iter().collect();
                let mut single = BTreeMap::new();
                single.insert(m, ca * cb);
                out = out.add(&Constant { terms: single });
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Constant {
        (0..e).fold(Constant::one(), |acc, _| acc.mul(self))
    }

    /// Certified enclosure.
    pub fn enclose(&self, bits: u32) -> Interval {
        let mut acc = Interval::from_int(0);
        for (m, c) in &self.terms {
            let mut term = Interval::point(c.clone());
            for (atom, e) in m {
                let guard = bits + 8 + 4 * *e;
                term = term.mul(&ln_rational(&atom.0, guard).pow(*e));
            }
            acc = acc.add(&term);
        }
        acc.round_out(bits + 4)
    }

    /// JSON form: `"p/q"` for rationals, `{"const": .., "times": .., "power": ..}`
    /// for a single atom monomial, `{"sum": [..]}` otherwise.
    pub fn to_json(&self) -> Value {
        if let Some(q) = self.as_rational() {
            return Value::String(format_rational(&q));
        }
        let encode = |m: &Monomial, c: &Rational| -> Value {
            if m.is_empty() {
                return Value::String(format_rational(c));
            }
            let factors: Vec<Value> = m
                .iter()
                .map(|(a, e)| {
                    if *e == 1 {
                        json!(a.name())
                    } else {
                        json!({"const": a.name(), "power": e})
                    }
                })
                .collect();
            if m.len() == 1 {
                let (a, e) = &m[0];
                let mut obj = json!({"const": a.name(), "times": format_rational(c)});
                if *e != 1 {
                    obj["power"] = json!(e);
                }
                obj
            } else {
                json!({"product": factors, "times": format_rational(c)})
            }
        };
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return encode(m, c);
        }
        json!({"sum": self.terms.iter().map(|(m, c)| encode(m, c)).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value, field: &str) -> Result<Constant> {
        match v {
            Value::String(s) => Ok(Constant::rational(
                parse_rational(s).map_err(|_| Error::parse(field, format!("bad rational `{s}`")))?,
            )),
            Value::Number(n) => {
                let s = n.to_string();
                Ok(Constant::rational(
                    parse_rational(&s).map_err(|_| Error::parse(field, format!("bad number `{s}`")))?,
                ))
            }
            Value::Object(obj) => {
                let times = match obj.get("times") {
                    Some(t) => Constant::from_json(t, field)?,
                    None => Constant::one(),
                };
                if let Some(sum) = obj.get("sum") {
                    let items = sum
                        .as_array()
                        .ok_or_else(|| Error::parse(field, "`sum` must be an array"))?;
                    let mut acc = Constant::zero();
                    for item in items {
                        acc = acc.add(&Constant::from_json(item, field)?);
                    }
                    return Ok(acc.mul(&times));
                }
                if let Some(product) = obj.get("product") {
                    let items = product
                        .as_array()
                        .ok_or_else(|| Error::parse(field, "`product` must be an array"))?;
                    let mut acc = Constant::one();
                    for item in items {
                        acc = acc.mul(&Constant::from_json(item, field)?);
                    }
                    return Ok(acc.mul(&times));
                }
                let name = obj
                    .get("const")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::parse(field, "expected `const`, `sum` or `product`"))?;
                let arg = LnAtom::parse(name).map_err(|_| Error::parse(field, format!("unknown constant `{name}`")))?;
                let power = obj.get("power").and_then(Value::as_u64).unwrap_or(1) as u32;
                let atom = Constant::ln(arg).map_err(|e| Error::parse(field, e.to_string()))?;
                Ok(atom.pow(power).mul(&times))
            }
            _ => Err(Error::parse(field, "expected a rational string or a constant object")),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format_rational(c);
                for (a, e) in m {
                    s.push('*');
                    s.push_str(&a.name());
                    if *e > 1 {
                        s.push_str(&format!("^{e}"));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn algebra_is_symbolic() {
        let l = Constant::log2();
        let cube = l.pow(3);
        assert!(cube.as_rational().is_none());
        assert!(cube.sub(&l.mul(&l).mul(&l)).is_zero());
        assert!(Constant::ln(rat(1, 1)).unwrap().is_zero());
        assert_eq!(Constant::int(3).add(&Constant::int(-3)), Constant::zero());
    }

    #[test]
    fn enclosures() {
        let l3 = Constant::log2().pow(3).enclose(60);
        // (ln 2)^3 = 0.333024651988929...
        assert!(l3.lo() > &rat(333024651, 1_000_000_000) && l3.hi() < &rat(333024652, 1_000_000_000));
        assert_eq!(Constant::int(5).enclose(10), Interval::from_int(5));
    }

    #[test]
    fn json_forms() {
        let c = Constant::log2().scale(&rat(3, 2));
        let v = c.to_json();
        assert_eq!(v, json!({"const": "log2", "times": "3/2"}));
        assert_eq!(Constant::from_json(&v, "coeff").unwrap(), c);
        let sq = Constant::log2().pow(2);
        assert_eq!(Constant::from_json(&sq.to_json(), "coeff").unwrap(), sq);
        let mixed = Constant::log2().add(&Constant::int(1));
        assert_eq!(Constant::from_json(&mixed.to_json(), "coeff").unwrap(), mixed);
        let other = Constant::ln(rat(3, 2)).unwrap();
        assert_eq!(Constant::from_json(&other.to_json(), "coeff").unwrap(), other);
        assert!(Constant::from_json(&json!({"const": "pi"}), "coeff").is_err());
    }
}
