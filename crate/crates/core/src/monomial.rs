//! Monomial supports, their determinant-method parameters, and plane curves
//! whose monomials lie in a given support.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::{exp_rational, ln_rational, Interval};
use crate::rational::{format_rational, parse_rational, Rational, RationalPoint};

/// Exponent pair `(h, k)` standing for `x^h y^k`.
pub type Exponent = (u32, u32);

/// Graded lex: total degree ascending, then the power of `x` descending.
fn graded_lex(a: &Exponent, b: &Exponent) -> std::cmp::Ordering {
    (a.0 + a.1).cmp(&(b.0 + b.1)).then(b.0.cmp(&a.0))
}

/// A finite nonempty set of monomials, kept in graded lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialSet {
    exponents: Vec<Exponent>,
}

impl MonomialSet {
    pub fn new(mut exponents: Vec<Exponent>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::precondition("a monomial set needs at least one monomial"));
        }
        exponents.sort_by(graded_lex);
        if exponents.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::precondition("duplicate exponent pair in monomial set"));
        }
        Ok(MonomialSet { exponents })
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        self.exponents.iter().any(|x| x == e)
    }

    pub fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.exponents.iter().position(|x| x == e)
    }

    pub fn parameters(&self) -> MonomialParameters {
        let d = self.exponents.len() as u64;
        let r: u64 = self.exponents.iter().map(|&(h, k)| (h + k) as u64).sum();
        let s = self.exponents.iter().map(|e| e.0).max().unwrap_or(0) as u64;
        let t = self.exponents.iter().map(|e| e.1).max().unwrap_or(0) as u64;
        MonomialParameters::from_counts(d, r, s, t)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.exponents.iter().map(|&(h, k)| json!([h, k])).collect())
    }
}

impl fmt::Display for MonomialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|&(h, k)| monomial_name(h, k)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn monomial_name(h: u32, k: u32) -> String {
    let pow = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    match (h, k) {
        (0, 0) => "1".to_string(),
        (_, 0) => pow("x", h),
        (0, _) => pow("y", k),
        _ => format!("{}*{}", pow("x", h), pow("y", k)),
    }
}

/// `M(beta, gamma) = { x^h y^k : h < beta, k < gamma }`.
pub fn box_set(beta: u32, gamma: u32) -> Result<MonomialSet> {
    if beta < 2 || gamma < 2 {
        return Err(Error::precondition(format!(
            "box set needs beta, gamma >= 2 (got {beta}, {gamma})"
        )));
    }
    let mut j = Vec::with_capacity((beta * gamma) as usize);
    for h in 0..beta {
        for k in 0..gamma {
            j.push((h, k));
        }
    }
    MonomialSet::new(j)
}

/// All monomials of total degree at most `d`.
///
/// This is the reading under which the determinant-method parameters come
/// out as `rho = 8/(3(d+3))`, `sigma = 3 rho`, `C <= 6`; the cardinality is
/// `(d+1)(d+2)/2`, not `d(d-1)/2`.
pub fn total_degree_set(d: u32) -> Result<MonomialSet> {
    if d < 1 {
        return Err(Error::precondition("total degree set needs d >= 1"));
    }
    let mut j = Vec::new();
    for total in 0..=d {
        for h in (0..=total).rev() {
            j.push((h, total - h));
        }
    }
    MonomialSet::new(j)
}

/// Cardinality, degree sum and coordinate maxima of `total_degree_set(d)`.
pub fn total_degree_counts(d: u64) -> (u64, u64, u64, u64) {
    let card = (d + 1) * (d + 2) / 2;
    let r = d * (d + 1) * (d + 2) / 3;
    (card, r, d, d)
}

/// Parameters `D, R, s, t, S, rho, sigma, C` of a monomial set.
///
/// `rho`, `sigma` and `C` need `D >= 2` and are `None` otherwise. `C` is
/// irrational in general; `c_bounds` is a certified enclosure and
/// `c_upper` its upper end, which is what every bound multiplies in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialParameters {
    pub d: u64,
    pub r: u64,
    pub s: u64,
    pub t: u64,
    pub big_s: u64,
    pub rho: Option<Rational>,
    pub sigma: Option<Rational>,
    pub c_bounds: Option<Interval>,
}

/// Above this cardinality `ln D!` comes from Robbins' form of Stirling.
const EXACT_FACTORIAL_LIMIT: u64 = 4000;

const C_BITS: u32 = 48;

impl MonomialParameters {
    pub fn from_counts(d: u64, r: u64, s: u64, t: u64) -> Self {
        let big_s = d * (s + t);
        let (rho, sigma, c_bounds) = if d >= 2 {
            let pairs = BigInt::from(d) * BigInt::from(d - 1);
            let rho = BigRational::new(BigInt::from(2 * r), pairs.clone());
            let sigma = BigRational::new(BigInt::from(2 * big_s), pairs.clone());
            let exponent = BigRational::new(BigInt::from(2), pairs);
            let ln_inner = ln_factorial(d, C_BITS + 40).add(
                &ln_rational(&BigRational::from_integer(BigInt::from(d)), C_BITS + 40)
                    .scale(&BigRational::from_integer(BigInt::from(r))),
            );
            let arg = ln_inner.scale(&exponent).round_out(C_BITS + 16);
            let root = Interval::new(
                exp_rational(arg.lo(), C_BITS + 8).lo().clone(),
                exp_rational(arg.hi(), C_BITS + 8).hi().clone(),
            )
            .round_out(C_BITS);
            let c = root.add(&Interval::from_int(1));
            (Some(rho), Some(sigma), Some(c))
        } else {
            (None, None, None)
        };
        MonomialParameters { d, r, s, t, big_s, rho, sigma, c_bounds }
    }

    pub fn c_upper(&self) -> Option<&Rational> {
        self.c_bounds.as_ref().map(|c| c.hi())
    }

    fn require_rho(&self) -> Result<&Rational> {
        self.rho
            .as_ref()
            .ok_or_else(|| Error::precondition("rho, sigma and C need D >= 2"))
    }

    pub fn rho_checked(&self) -> Result<&Rational> {
        self.require_rho()
    }
}

/// Enclosure of `ln D!`.
fn ln_factorial(n: u64, bits: u32) -> Interval {
    if n <= EXACT_FACTORIAL_LIMIT {
        let mut f = BigInt::one();
        for k in 2..=n {
            f *= k;
        }
        return ln_rational(&BigRational::from_integer(f), bits);
    }
    // n ln n - n + ln(2 pi n)/2 + 1/(12n + 1) < ln n! < ... + 1/(12n)
    let nq = BigRational::from_integer(BigInt::from(n));
    let ln_n = ln_rational(&nq, bits);
    let two_pi = Interval::new(
        BigRational::new(BigInt::from(628318530717958647u64), BigInt::from(100000000000000000u64)),
        BigRational::new(BigInt::from(628318530717958648u64), BigInt::from(100000000000000000u64)),
    );
    let half_ln_2pin = two_pi
        .scale(&nq)
        .ln(bits)
        .expect("positive")
        .scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let main = ln_n.scale(&nq).sub(&Interval::point(nq.clone())).add(&half_ln_2pin);
    let corr = Interval::new(
        BigRational::new(BigInt::one(), BigInt::from(12 * n + 1)),
        BigRational::new(BigInt::one(), BigInt::from(12 * n)),
    );
    main.add(&corr).round_out(bits)
}

/// A plane curve `G(x, y) = 0` defined in a monomial set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    support: MonomialSet,
    coeffs: BTreeMap<Exponent, Rational>,
}

impl PlaneCurve {
    /// Builds a curve; every nonzero coefficient must lie in `support`.
    pub fn new(support: MonomialSet, coeffs: BTreeMap<Exponent, Rational>) -> Result<Self> {
        let coeffs: BTreeMap<Exponent, Rational> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() {
            return Err(Error::precondition("a plane curve needs a nonzero coefficient"));
        }
        if let Some(e) = coeffs.keys().find(|e| !support.contains(e)) {
            return Err(Error::precondition(format!(
                "coefficient of {} lies outside the support",
                monomial_name(e.0, e.1)
            )));
        }
        Ok(PlaneCurve { support, coeffs })
    }

    /// Curve whose support is exactly its list of terms.
    pub fn from_terms(terms: &[(Exponent, Rational)]) -> Result<Self> {
        let mut coeffs: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(*e).or_insert_with(Rational::zero) += c;
        }
        let support = MonomialSet::new(coeffs.keys().copied().collect())?;
        PlaneCurve::new(support, coeffs)
    }

    /// Curve with integer coefficients given as `(h, k, c)` triples.
    pub fn from_int_terms(terms: &[(u32, u32, i64)]) -> Result<Self> {
        let terms: Vec<(Exponent, Rational)> = terms
            .iter()
            .map(|&(h, k, c)| ((h, k), BigRational::from_integer(BigInt::from(c))))
            .collect();
        PlaneCurve::from_terms(&terms)
    }

    /// Curve in `support` with coefficients aligned to its graded lex order.
    pub fn from_vector(support: MonomialSet, vector: &[Rational]) -> Result<Self> {
        if vector.len() != support.len() {
            return Err(Error::precondition("coefficient vector length differs from |M|"));
        }
        let coeffs = support.exponents().iter().copied().zip(vector.iter().cloned()).collect();
        PlaneCurve::new(support, coeffs)
    }

    pub fn support(&self) -> &MonomialSet {
        &self.support
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponent, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.coeffs.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(max x-degree, max y-degree)` over nonzero terms.
    pub fn bidegree(&self) -> (u32, u32) {
        let b = self.coeffs.keys().map(|e| e.0).max().unwrap_or(0);
        let c = self.coeffs.keys().map(|e| e.1).max().unwrap_or(0);
        (b, c)
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|e| e.0 + e.1).max().unwrap_or(0)
    }

    pub fn is_defined_in(&self, m: &MonomialSet) -> bool {
        self.coeffs.keys().all(|e| m.contains(e))
    }

    /// Exact value `G(P)`.
    pub fn evaluate(&self, p: &RationalPoint) -> Rational {
        self.coeffs
            .iter()
            .map(|(&(h, k), c)| c * pow_q(&p.x, h) * pow_q(&p.y, k))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Interval enclosure of `G` over a box.
    pub fn evaluate_interval(&self, x: &Interval, y: &Interval) -> Interval {
        self.coeffs.iter().fold(Interval::from_int(0), |acc, (&(h, k), c)| {
            acc.add(&x.pow(h).mul(&y.pow(k)).scale(c))
        })
    }

    /// The same curve with every coefficient multiplied by a common factor
    /// so that all coefficients are coprime integers (leading term positive).
    pub fn primitive(&self) -> PlaneCurve {
        use num_integer::Integer;
        let lcm = self
            .coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .values()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let lead_negative = self
            .support
            .exponents()
            .iter()
            .rev()
            .find_map(|e| self.coeffs.get(e))
            .map(|c| c.is_negative())
            .unwrap_or(false);
        let sign = if lead_negative { -BigInt::one() } else { BigInt::one() };
        let coeffs = self
            .coeffs
            .keys()
            .copied()
            .zip(ints)
            .map(|(e, c)| (e, BigRational::new(c * &sign, g.clone())))
            .collect();
        PlaneCurve { support: self.support.clone(), coeffs }
    }

    /// `{"support": [[h,k],...], "coeffs": [["p/q"],...]}` aligned by index.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .support
            .exponents()
            .iter()
            .map(|e| json!([format_rational(&self.coeff(e))]))
            .collect();
        json!({ "support": self.support.to_json(), "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let support = v
            .get("support")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("support", "expected an array of [h, k] pairs"))?;
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("coeffs", "expected an array aligned with support"))?;
        if coeffs.len() > support.len() {
            return Err(Error::parse("coeffs", "coefficient given outside the support"));
        }
        if coeffs.len() != support.len() {
            return Err(Error::parse("coeffs", "expected one coefficient per support entry"));
        }
        let mut exps = Vec::with_capacity(support.len());
        for (i, e) in support.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .and_then(|p| Some((p[0].as_u64()? as u32, p[1].as_u64()? as u32)))
                .ok_or_else(|| Error::parse(format!("support[{i}]"), "expected [h, k]"))?;
            exps.push(pair);
        }
        let mut map = BTreeMap::new();
        for (i, (c, e)) in coeffs.iter().zip(&exps).enumerate() {
            let text = match c {
                Value::String(s) => s.as_str(),
                Value::Array(a) if a.len() == 1 => a[0]
                    .as_str()
                    .ok_or_else(|| Error::parse(format!("coeffs[{i}]"), "expected [\"p/q\"]"))?,
                _ => return Err(Error::parse(format!("coeffs[{i}]"), "expected [\"p/q\"]")),
            };
            let q = parse_rational(text)
                .map_err(|_| Error::parse(format!("coeffs[{i}]"), format!("bad rational `{text}`")))?;
            map.insert(*e, q);
        }
        let support = MonomialSet::new(exps).map_err(|e| Error::parse("support", e.to_string()))?;
        PlaneCurve::new(support, map).map_err(|e| Error::parse("coeffs", e.to_string()))
    }
}

impl fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.support.exponents().iter().rev() {
            let Some(c) = self.coeffs.get(e) else { continue };
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let name = monomial_name(e.0, e.1);
            if *e == (0, 0) {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}*{name}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

fn pow_q(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

/// Row `(x^h y^k)` over `M` in graded lex order.
pub fn monomial_row(m: &MonomialSet, p: &RationalPoint) -> Vec<Rational> {
    let s = m.exponents().iter().map(|e| e.0).max().unwrap_or(0);
    let t = m.exponents().iter().map(|e| e.1).max().unwrap_or(0);
    let mut xp = vec![Rational::one()];
    for i in 1..=s as usize {
        let next = &xp[i - 1] * &p.x;
        xp.push(next);
    }
    let mut yp = vec![Rational::one()];
    for i in 1..=t as usize {
        let next = &yp[i - 1] * &p.y;
        yp.push(next);
    }
    m.exponents()
        .iter()
        .map(|&(h, k)| &xp[h as usize] * &yp[k as usize])
        .collect()
}

pub fn evaluate_curve(g: &PlaneCurve, p: &RationalPoint) -> Rational {
    g.evaluate(p)
}
