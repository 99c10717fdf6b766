//! Families whose rational points are known by an arithmetic argument.
//!
//! * `q^x` for rational `q > 0`, `q != 1`: with `x = m/n` reduced, `q^x` is
//!   rational exactly when `q` is an `n`-th power. For `q = 2` only integer
//!   `x` qualify, so `N = 2 floor(log2 H) + 1`.
//! * `e^x`: rational only at `x = 0` (Hermite–Lindemann), taken as a family
//!   axiom.
//! * `x^(p/q)` on `x > 0`: with `p/q` reduced, `x` and `y` must be `q`-th and
//!   `p`-th powers of one positive rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::{record, CensusRecord, CensusStatus, Domain};
use crate::error::{Error, Result};
use crate::rational::{format_rational, height, parse_rational, HeightBound, Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `y = e^x`
    Exp,
    /// `y = q^x`
    Pow(Rational),
    /// `y = x^e` on `x > 0`
    Root(Rational),
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

fn rational_root(q: &Rational, k: u32) -> Option<Rational> {
    Some(Rational::new(exact_root(q.numer(), k)?, exact_root(q.denom(), k)?))
}

fn rational_pow(q: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Exp => "exp".into(),
            Family::Pow(q) if *q == Rational::from_integer(2.into()) => "pow2".into(),
            Family::Pow(q) => format!("pow:{}", format_rational(q)),
            Family::Root(e) => format!("root:{}", format_rational(e)),
        }
    }

    pub(super) fn to_json_fields(&self) -> Vec<(&'static str, Value)> {
        match self {
            Family::Exp => vec![("family", json!("exp"))],
            Family::Pow(q) if *q == Rational::from_integer(2.into()) => vec![("family", json!("pow2"))],
            Family::Pow(q) => vec![("family", json!("pow")), ("base", json!(format_rational(q)))],
            Family::Root(e) => vec![("family", json!("root")), ("exponent", json!(format_rational(e)))],
        }
    }

    pub fn from_json(v: &Value) -> Result<Family> {
        let name = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("family", "missing family name"))?;
        let field = |key: &str| -> Result<Rational> {
            let s = v
                .get(key)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::parse(key, "expected a \"p/q\" string"))?;
            parse_rational(s).map_err(|_| Error::parse(key, format!("bad rational `{s}`")))
        };
        match name {
            "pow2" => Ok(Family::Pow(Rational::from_integer(2.into()))),
            "exp" => Ok(Family::Exp),
            "pow" => {
                let q = field("base")?;
                if !q.is_positive() || q.is_one() {
                    return Err(Error::parse("base", "must be positive and different from 1"));
                }
                Ok(Family::Pow(q))
            }
            "root" => {
                let e = field("exponent")?;
                if e.is_zero() {
                    return Err(Error::parse("exponent", "must be nonzero"));
                }
                Ok(Family::Root(e))
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    /// Points of height at most `h` with `x` in the natural domain.
    pub fn points(&self, h: HeightBound) -> Vec<RationalPoint> {
        let hb = BigInt::from(h.get());
        let ok = |q: &Rational| height(q) <= hb;
        let mut out = Vec::new();
        match self {
            Family::Exp => out.push(RationalPoint::new(Rational::zero(), Rational::one())),
            Family::Pow(q) => {
                // q = s^n for the largest n; then q^{m/n'} is rational iff n' | n
                let top = height(q).bits() as u32;
                for n in 1..=top.max(1) {
                    let Some(s) = rational_root(q, n) else { continue };
                    // y = s^m needs height(s)^|m| <= H
                    let mut m = 0i64;
                    loop {
                        let y = rational_pow(&s, m);
                        if !ok(&y) {
                            break;
                        }
                        for sign in if m == 0 { vec![1] } else { vec![1, -1] } {
                            let mm = sign * m;
                            if (mm as i128).gcd(&(n as i128)) != 1 {
                                continue;
                            }
                            let x = Rational::new(mm.into(), (n as i64).into());
                            let y = rational_pow(&s, mm);
                            if ok(&x) && ok(&y) {
                                out.push(RationalPoint::new(x, y));
                            }
                        }
                        m += 1;
                    }
                }
            }
            Family::Root(e) => {
                let p = e.numer().to_i64().unwrap_or(i64::MAX);
                let q = e.denom().to_i64().unwrap_or(i64::MAX);
                let k = p.unsigned_abs().max(q as u64) as u32;
                let cap = (h.get() as f64).powf(1.0 / k as f64).floor() as u64 + 1;
                for s in 1..=cap {
                    for t in 1..=cap {
                        if s.gcd(&t) != 1 {
                            continue;
                        }
                        let base = Rational::new(s.into(), t.into());
                        let x = rational_pow(&base, q);
                        let y = rational_pow(&base, p);
                        if ok(&x) && ok(&y) {
                            out.push(RationalPoint::new(x, y));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Exact membership of a point in the graph.
    pub fn contains(&self, p: &RationalPoint) -> bool {
        match self {
            Family::Exp => p.x.is_zero() && p.y.is_one(),
            Family::Pow(q) => {
                // y = q^{m/n}  <=>  y > 0 and y^n = q^m
                let (Some(m), Some(n)) = (p.x.numer().to_i64(), p.x.denom().to_u32()) else {
                    return false;
                };
                p.y.is_positive() && num_traits::pow(p.y.clone(), n as usize) == rational_pow(q, m)
            }
            Family::Root(e) => {
                let (Some(a), Some(b)) = (e.numer().to_i64(), e.denom().to_u32()) else {
                    return false;
                };
                p.x.is_positive() && p.y.is_positive() && num_traits::pow(p.y.clone(), b as usize) == rational_pow(&p.x, a)
            }
        }
    }
}

/// Exact census of a registry family.
pub fn census_pfaff_exact(family: &Family, h: HeightBound, domain: &Domain) -> Result<CensusRecord> {
    let pts = family.points(h).into_iter().filter(|p| domain.contains(&p.x)).collect();
    Ok(record(h, pts, CensusStatus::Exact))
}
