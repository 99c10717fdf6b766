//! Pfaffian chains with built-in certified evaluators.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::constant::Constant;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::interval::{exp_rational, ln_rational, pow_rational, Interval};
use crate::rational::{format_rational, parse_rational, Rational};

/// The shipped chain families. Generic validated ODE integration is out of
/// scope, so every chain is one of these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// `f_1 = e^{a x}` for a nonzero rational rate `a`.
    ExpRate(Rational),
    /// `f_1 = q^x` for rational `q > 0`, `q != 1`.
    Pow(Rational),
    /// `f_1 = 1/(1 + x^2)`.
    Rational,
    /// `f_1 = 1/x`, `f_2 = ln x` on `x > 0`.
    Log,
    /// `f_1 = e^x`, `f_2 = e^{e^x}`.
    ExpExp,
}

impl ChainKind {
    pub fn parse(name: &str) -> Result<ChainKind> {
        let bad = || Error::parse("evaluator", format!("unknown evaluator `{name}`"));
        let kind = match name {
            "exp" => ChainKind::ExpRate(Rational::one()),
            "exp2" => ChainKind::Pow(Rational::from_integer(2.into())),
            "rational" => ChainKind::Rational,
            "log" => ChainKind::Log,
            "expexp" => ChainKind::ExpExp,
            _ => {
                if let Some(a) = name.strip_prefix("exp:") {
                    let a = parse_rational(a).map_err(|_| bad())?;
                    if a.is_zero() {
                        return Err(Error::parse("evaluator", "exp rate must be nonzero"));
                    }
                    ChainKind::ExpRate(a)
                } else if let Some(q) = name.strip_prefix("pow:") {
                    let q = parse_rational(q).map_err(|_| bad())?;
                    if !q.is_positive() || q.is_one() {
                        return Err(Error::parse("evaluator", "pow base must be positive and not 1"));
                    }
                    ChainKind::Pow(q)
                } else {
                    return Err(bad());
                }
            }
        };
        Ok(kind)
    }

    pub fn name(&self) -> String {
        match self {
            ChainKind::ExpRate(a) if a.is_one() => "exp".into(),
            ChainKind::ExpRate(a) => format!("exp:{}", format_rational(a)),
            ChainKind::Pow(q) if q == &Rational::from_integer(2.into()) => "exp2".into(),
            ChainKind::Pow(q) => format!("pow:{}", format_rational(q)),
            ChainKind::Rational => "rational".into(),
            ChainKind::Log => "log".into(),
            ChainKind::ExpExp => "expexp".into(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            ChainKind::ExpRate(_) | ChainKind::Pow(_) | ChainKind::Rational => 1,
            ChainKind::Log | ChainKind::ExpExp => 2,
        }
    }

    pub fn alpha(&self) -> u32 {
        match self {
            ChainKind::ExpRate(_) | ChainKind::Pow(_) => 1,
            ChainKind::Rational => 3,
            ChainKind::Log | ChainKind::ExpExp => 2,
        }
    }

    /// The canonical triangular system `f_j' = g_j(x, f_1, .., f_j)`.
    pub fn canonical_g(&self) -> Vec<Poly> {
        let n = self.order() + 1;
        let y = |j| Poly::var(n, j);
        match self {
            ChainKind::ExpRate(a) => vec![y(1).scale(&Constant::rational(a.clone()))],
            ChainKind::Pow(q) => vec![y(1).scale(&Constant::ln(q.clone()).expect("q > 0"))],
            ChainKind::Rational => vec![Poly::var(n, 0).mul(&y(1)).mul(&y(1)).scale(&Constant::int(-2))],
            ChainKind::Log => vec![y(1).mul(&y(1)).neg(), y(1)],
            ChainKind::ExpExp => vec![y(1), y(1).mul(&y(2))],
        }
    }

    fn natural_domain(&self) -> (Option<Rational>, Option<Rational>) {
        match self {
            ChainKind::Log => (Some(Rational::zero()), None),
            _ => (None, None),
        }
    }

    /// Enclosures of `f_1(x), .., f_r(x)`; exact whenever the values are
    /// rational by construction (e.g. `e^0`, `2^3`, `1/(1+x^2)`, `ln 1`).
    pub fn values(&self, x: &Rational, bits: u32) -> Vec<Interval> {
        match self {
            ChainKind::ExpRate(a) => vec![exp_rational(&(a * x), bits)],
            ChainKind::Pow(q) => vec![pow_rational(q, x, bits)],
            ChainKind::Rational => {
                vec![Interval::point((Rational::one() + x * x).recip())]
            }
            ChainKind::Log => vec![Interval::point(x.recip()), ln_rational(x, bits)],
            ChainKind::ExpExp => {
                // d/dE e^E = e^E, so the inner width must absorb about 1.45 E bits
                let rough = exp_rational(x, 8);
                let magnitude = rough.hi().ceil().to_integer();
                let extra = u32::try_from(magnitude).unwrap_or(u32::MAX / 4).saturating_mul(2);
                let guard = bits.saturating_add(8).saturating_add(extra);
                let e = exp_rational(x, guard);
                vec![e.clone(), e.exp(bits)]
            }
        }
    }

    /// Enclosures of the ranges of `f_1, .., f_r` over `[lo, hi]`.
    pub fn ranges(&self, lo: &Rational, hi: &Rational, bits: u32) -> Vec<Interval> {
        let a = self.values(lo, bits);
        let b = self.values(hi, bits);
        let mut out: Vec<Interval> = a.iter().zip(&b).map(|(u, v)| u.hull(v)).collect();
        if *self == ChainKind::Rational && lo.is_negative() && hi.is_positive() {
            out[0] = out[0].hull(&Interval::from_int(1));
        }
        out
    }
}

/// A Pfaffian chain of order `r` and degree `alpha` on an open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianChain {
    kind: ChainKind,
    alpha: u32,
    g: Vec<Poly>,
    domain: (Option<Rational>, Option<Rational>),
}

impl PfaffianChain {
    pub fn new(kind: ChainKind) -> Self {
        let g = kind.canonical_g();
        let alpha = kind.alpha();
        let domain = kind.natural_domain();
        PfaffianChain { kind, alpha, g, domain }
    }

    pub fn exp() -> Self {
        PfaffianChain::new(ChainKind::ExpRate(Rational::one()))
    }

    pub fn exp2() -> Self {
        PfaffianChain::new(ChainKind::Pow(Rational::from_integer(2.into())))
    }

    /// Restricts the domain to `(lo, hi)` intersected with the natural one.
    pub fn restricted(mut self, lo: Option<Rational>, hi: Option<Rational>) -> Result<Self> {
        let lo = match (self.domain.0.take(), lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.domain.1.take(), hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::precondition("empty chain domain"));
            }
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    /// Declares a larger degree than the canonical one.
    pub fn with_alpha(mut self, alpha: u32) -> Result<Self> {
        if alpha < self.kind.alpha() {
            return Err(Error::precondition(format!(
                "alpha = {alpha} is below deg g = {}",
                self.kind.alpha()
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn kind(&self) -> &ChainKind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.g.len()
    }

    pub fn nvars(&self) -> usize {
        self.g.len() + 1
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn g(&self) -> &[Poly] {
        &self.g
    }

    pub fn domain(&self) -> &(Option<Rational>, Option<Rational>) {
        &self.domain
    }

    /// Open-interval membership.
    pub fn in_domain(&self, x: &Rational) -> bool {
        self.domain.0.as_ref().is_none_or(|lo| x > lo) && self.domain.1.as_ref().is_none_or(|hi| x < hi)
    }

    pub fn check_domain(&self, x: &Rational) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: format_rational(x),
                domain: self.domain_string(),
            })
        }
    }

    pub fn domain_string(&self) -> String {
        let show = |e: &Option<Rational>, inf: &str| e.as_ref().map(format_rational).unwrap_or(inf.into());
        format!("({}, {})", show(&self.domain.0, "-inf"), show(&self.domain.1, "inf"))
    }

    pub fn to_json(&self) -> Value {
        let end = |e: &Option<Rational>| e.as_ref().map(|q| json!(format_rational(q))).unwrap_or(Value::Null);
        json!({
            "r": self.order(),
            "alpha": self.alpha,
            "g": self.g.iter().map(Poly::to_json).collect::<Vec<_>>(),
            "domain": [end(&self.domain.0), end(&self.domain.1)],
            "evaluator": self.kind.name(),
        })
    }

    /// Reads the chain part of a function spec. The `g` entry, when present,
    /// must agree symbolically with the evaluator's system.
    pub fn from_json(v: &Value) -> Result<Self> {
        let name = v
            .get("evaluator")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("evaluator", "missing evaluator name"))?;
        let chain = PfaffianChain::new(ChainKind::parse(name)?);
        if let Some(r) = v.get("r") {
            if r.as_u64() != Some(chain.order() as u64) {
                return Err(Error::parse("r", format!("evaluator `{name}` has order {}", chain.order())));
            }
        }
        if let Some(g) = v.get("g") {
            let list = g.as_array().ok_or_else(|| Error::parse("g", "must be a list of polynomials"))?;
            if list.len() != chain.order() {
                return Err(Error::parse("g", format!("expected {} polynomials", chain.order())));
            }
            for (j, (item, expected)) in list.iter().zip(chain.g()).enumerate() {
                let got = Poly::from_json(item, chain.nvars(), "g")?;
                if &got != expected {
                    return Err(Error::parse(
                        "g",
                        format!("g_{} = {got} does not match evaluator `{name}` ({expected})", j + 1),
                    ));
                }
            }
        }
        let chain = match v.get("alpha") {
            Some(a) => {
                let a = a
                    .as_u64()
                    .and_then(|a| u32::try_from(a).ok())
                    .ok_or_else(|| Error::parse("alpha", "must be a positive integer"))?;
                chain.with_alpha(a).map_err(|e| Error::parse("alpha", e.to_string()))?
            }
            None => chain,
        };
        match v.get("domain") {
            Some(Value::Array(ends)) if ends.len() == 2 => {
                let end = |e: &Value| -> Result<Option<Rational>> {
                    match e {
                        Value::Null => Ok(None),
                        Value::String(s) if s == "-inf" || s == "inf" => Ok(None),
                        Value::String(s) => parse_rational(s).map(Some).map_err(|_| Error::parse("domain", "bad endpoint")),
                        Value::Number(n) => parse_rational(&n.to_string())
                            .map(Some)
                            .map_err(|_| Error::parse("domain", "bad endpoint")),
                        _ => Err(Error::parse("domain", "bad endpoint")),
                    }
                };
                chain
                    .restricted(end(&ends[0])?, end(&ends[1])?)
                    .map_err(|e| Error::parse("domain", e.to_string()))
            }
            Some(_) => Err(Error::parse("domain", "expected [lo, hi]")),
            None => Ok(chain),
        }
    }
}

impl fmt::Display for PfaffianChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} chain (r={}, alpha={}) on {}", self.kind.name(), self.order(), self.alpha, self.domain_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn triangular_and_degree() {
        for kind in [
            ChainKind::ExpRate(rat(3, 2)),
            ChainKind::Pow(int(3)),
            ChainKind::Rational,
            ChainKind::Log,
            ChainKind::ExpExp,
        ] {
            let chain = PfaffianChain::new(kind);
            for (j, g) in chain.g().iter().enumerate() {
                assert!(g.highest_y() <= j + 1);
                assert!(g.degree() <= chain.alpha());
            }
        }
    }

    #[test]
    fn exact_values() {
        assert_eq!(PfaffianChain::exp2().kind().values(&int(3), 30), vec![Interval::from_int(8)]);
        assert_eq!(PfaffianChain::exp().kind().values(&int(0), 30), vec![Interval::from_int(1)]);
        assert_eq!(ChainKind::Rational.values(&int(2), 30), vec![Interval::point(rat(1, 5))]);
        let log = ChainKind::Log.values(&int(1), 30);
        assert_eq!(log[1], Interval::from_int(0));
    }

    #[test]
    fn ranges_cover_values() {
        let r = ChainKind::Rational.ranges(&int(-1), &int(2), 30);
        assert_eq!(r[0], Interval::new(rat(1, 5), int(1)));
        let e = ChainKind::ExpExp.ranges(&int(0), &int(1), 40);
        // e^e = 15.154...
        assert!(e[1].lo() < &rat(272, 100) && e[1].hi() > &rat(1515, 100));
    }

    #[test]
    fn json_checks_g() {
        let chain = PfaffianChain::exp2();
        let back = PfaffianChain::from_json(&chain.to_json()).unwrap();
        assert_eq!(back, chain);
        let wrong = json!({"r": 1, "alpha": 1, "evaluator": "exp2",
            "g": [[{"exponents": [0, 1], "coeff": "1"}]]});
        assert!(PfaffianChain::from_json(&wrong).is_err());
        let log = json!({"evaluator": "log", "domain": ["1/2", null]});
        let c = PfaffianChain::from_json(&log).unwrap();
        assert!(!c.in_domain(&rat(1, 3)) && c.in_domain(&int(7)));
        assert!(PfaffianChain::from_json(&json!({"evaluator": "sin"})).is_err());
    }
}
