//! Pfaffian functions `f(x) = P(x, f_1(x), .., f_r(x))`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use super::chain::PfaffianChain;
use super::constant::Constant;
use super::poly::{CompiledPoly, Poly};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{format_rational, Rational};

/// Largest working precision tried before giving up on a point evaluation.
pub const MAX_EVAL_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianFunction {
    chain: Arc<PfaffianChain>,
    p: Poly,
    beta: u32,
}

impl PfaffianFunction {
    pub fn new(chain: Arc<PfaffianChain>, p: Poly, beta: u32) -> Result<Self> {
        if p.nvars() != chain.nvars() {
            return Err(Error::precondition(format!(
                "P has {} variables but the chain needs {}",
                p.nvars(),
                chain.nvars()
            )));
        }
        if beta == 0 {
            return Err(Error::precondition("beta must be at least 1"));
        }
        if p.degree() > beta {
            return Err(Error::precondition(format!("deg P = {} exceeds beta = {beta}", p.degree())));
        }
        Ok(PfaffianFunction { chain, p, beta })
    }

    /// Function with the least admissible declared degree.
    pub fn from_poly(chain: Arc<PfaffianChain>, p: Poly) -> Result<Self> {
        let beta = p.degree().max(1);
        PfaffianFunction::new(chain, p, beta)
    }

    /// `f = f_j` itself.
    pub fn chain_member(chain: Arc<PfaffianChain>, j: usize) -> Result<Self> {
        if j == 0 || j > chain.order() {
            return Err(Error::precondition(format!("chain has no member f_{j}")));
        }
        let p = Poly::var(chain.nvars(), j);
        PfaffianFunction::new(chain, p, 1)
    }

    pub fn chain(&self) -> &Arc<PfaffianChain> {
        &self.chain
    }

    pub fn poly(&self) -> &Poly {
        &self.p
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn order(&self) -> usize {
        self.chain.order()
    }

    pub fn alpha(&self) -> u32 {
        self.chain.alpha()
    }

    /// Symbolic: true iff `P` expands to the zero polynomial.
    pub fn is_identically_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// `P' = dP/dx + sum_j dP/dy_j * g_j`, same chain, degree `max(1, deg P')`.
    pub fn derivative(&self) -> PfaffianFunction {
        let mut dp = self.p.partial(0);
        for (j, g) in self.chain.g().iter().enumerate() {
            let dj = self.p.partial(j + 1);
            if !dj.is_zero() {
                dp = dp.add(&dj.mul(g));
            }
        }
        let beta = dp.degree().min(self.beta + self.alpha() - 1).max(1);
        PfaffianFunction { chain: self.chain.clone(), p: dp, beta }
    }

    pub fn nth_derivative(&self, k: usize) -> PfaffianFunction {
        (0..k).fold(self.clone(), |f, _| f.derivative())
    }

    /// `f - c`.
    pub fn minus_constant(&self, c: &Constant) -> PfaffianFunction {
        let p = self.p.sub(&Poly::constant(self.p.nvars(), c.clone()));
        PfaffianFunction::from_poly(self.chain.clone(), p).expect("same chain")
    }

    /// `c * f`.
    pub fn scaled(&self, c: &Constant) -> PfaffianFunction {
        PfaffianFunction { chain: self.chain.clone(), p: self.p.scale(c), beta: self.beta }
    }

    /// Raw enclosure of `f(x)` using working precision `bits`; no width target.
    pub fn enclose_at(&self, x: &Rational, bits: u32) -> Interval {
        let mut vars = vec![Interval::point(x.clone())];
        vars.extend(self.chain.kind().values(x, bits));
        self.p.evaluate(&vars, bits)
    }

    /// Enclosure of the range of `f` over `[lo, hi]`: the natural interval
    /// extension intersected with a mean-value form when `df` is supplied.
    pub fn range(&self, lo: &Rational, hi: &Rational, bits: u32, df: Option<&PfaffianFunction>) -> Interval {
        if lo == hi {
            return self.enclose_at(lo, bits);
        }
        let mut vars = vec![Interval::new(lo.clone(), hi.clone())];
        let ranges = self.chain.kind().ranges(lo, hi, bits);
        vars.extend(ranges.iter().cloned());
        let natural = self.p.evaluate(&vars, bits);
        let Some(df) = df else {
            return natural;
        };
        let mid = (lo + hi) / Rational::from_integer(2.into());
        let slope = df.p.evaluate(&vars, bits);
        let half = Interval::new((lo - &mid).clone(), (hi - &mid).clone());
        let centred = self.enclose_at(&mid, bits).add(&slope.mul(&half)).round_out(bits + 4);
        natural.intersect(&centred).unwrap_or(natural)
    }

    /// Certified enclosure of `f(x)` of width below `2^-p`.
    pub fn evaluate(&self, x: &Rational, p: u32) -> Result<Interval> {
        self.chain.check_domain(x)?;
        let mut bits = p + 16;
        loop {
            let v = self.enclose_at(x, bits);
            if v.narrower_than(p) {
                return Ok(v);
            }
            if bits >= MAX_EVAL_BITS {
                return Err(Error::PrecisionExhausted {
                    bits,
                    context: format!("evaluating {self} at x = {}", format_rational(x)),
                });
            }
            bits = (bits * 2).min(MAX_EVAL_BITS);
        }
    }

    /// Point evaluator with coefficient enclosures computed once.
    pub fn evaluator(&self, bits: u32) -> PointEvaluator<'_> {
        PointEvaluator { f: self, compiled: self.p.compile(bits), bits }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.chain.to_json();
        v["P"] = self.p.to_json();
        v["beta"] = json!(self.beta);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let chain = Arc::new(PfaffianChain::from_json(v)?);
        let p = Poly::from_json(
            v.get("P").ok_or_else(|| Error::parse("P", "missing polynomial"))?,
            chain.nvars(),
            "P",
        )?;
        match v.get("beta") {
            Some(b) => {
                let beta = b
                    .as_u64()
                    .and_then(|b| u32::try_from(b).ok())
                    .ok_or_else(|| Error::parse("beta", "must be a positive integer"))?;
                PfaffianFunction::new(chain, p, beta).map_err(|e| Error::parse("beta", e.to_string()))
            }
            None => PfaffianFunction::from_poly(chain, p),
        }
    }
}

impl fmt::Display for PfaffianFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.p, self.chain.kind().name())
    }
}

pub struct PointEvaluator<'a> {
    f: &'a PfaffianFunction,
    compiled: CompiledPoly,
    bits: u32,
}

impl PointEvaluator<'_> {
    pub fn enclose(&self, x: &Rational) -> Interval {
        let mut vars = vec![Interval::point(x.clone())];
        vars.extend(self.f.chain.kind().values(x, self.bits));
        self.compiled.evaluate(&vars)
    }
}

fn check_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        Err(Error::precondition(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// `2^{r(r-1)/2} d beta (r alpha + d beta)^r`.
pub fn zero_count_bound(r: u64, alpha: u64, beta: u64, d: u64) -> Result<BigUint> {
    check_positive("r", r)?;
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("d", d)?;
    let db = BigUint::from(d) * beta;
    let inner = BigUint::from(r) * alpha + &db;
    Ok((BigUint::one() << (r * (r - 1) / 2) as usize) * db * inner.pow(r as u32))
}

/// `2^{r(r-1)/2} gamma (r alpha + gamma)^r` with `gamma = (k-1)(beta + k(alpha-1))`.
pub fn inverse_derivative_zero_bound(r: u64, alpha: u64, beta: u64, k: u64) -> Result<BigUint> {
    check_positive("r", r)?;
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("k", k)?;
    let gamma = BigUint::from(k - 1) * (BigUint::from(beta) + BigUint::from(k) * (alpha - 1));
    let inner = BigUint::from(r) * alpha + &gamma;
    Ok((BigUint::one() << (r * (r - 1) / 2) as usize) * gamma * inner.pow(r as u32))
}
