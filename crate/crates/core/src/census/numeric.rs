//! Census of the graph of a Pfaffian function by certified evaluation.
//!
//! Each `x` of height at most `H` is evaluated at increasing precision
//! until the enclosure of `f(x)` either misses every rational of height at
//! most `H` or is narrower than `1/(2H^2)`, which leaves at most one
//! candidate. A candidate is certified only when the evaluation is exact
//! or the function is a registry family that contains it.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{record, CensusOptions, CensusRecord, CensusStatus, Domain, Family};
use crate::error::{Error, Result};
use crate::pfaffian::{ChainKind, PfaffianFunction, Poly};
use crate::rational::{rationals_in_interval, HeightBound, Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct NumericOutcome {
    pub record: CensusRecord,
    /// Highest precision any evaluation needed.
    pub max_bits_used: u32,
}

enum Verdict {
    Out,
    Certified(RationalPoint),
    Candidate(RationalPoint),
    Exhausted,
}

/// The registry family whose graph is `f`, if any.
fn family_of(f: &PfaffianFunction) -> Option<Family> {
    if f.order() != 1 || *f.poly() != Poly::var(2, 1) {
        return None;
    }
    match f.chain().kind() {
        ChainKind::ExpRate(a) if a.is_one() => Some(Family::Exp),
        ChainKind::Pow(q) => Some(Family::Pow(q.clone())),
        _ => None,
    }
}

/// Precision ladder `bits, 2 bits, ...` up to `max_bits`.
fn ladder(start: u32, max_bits: u32) -> Vec<u32> {
    let mut out = vec![start.max(16)];
    while *out.last().unwrap() < max_bits {
        let next = (out.last().unwrap() * 2).min(max_bits);
        out.push(next);
    }
    out
}

/// Dyadic denominator `2^k >= 8 H^2`.
fn grid_for(h: u64) -> BigInt {
    let need = 8u128 * u128::from(h) * u128::from(h);
    BigInt::one() << (128 - need.leading_zeros())
}

/// The rational of height at most `H` in `[lo, hi]`, for `hi - lo < 1/(2H^2)`.
///
/// The search runs on the endpoints rounded outward to the grid, which keeps
/// the continued fractions short. The widened interval is still narrower
/// than `1/H^2`, so it holds at most one such rational.
fn coarse_candidate(lo: &Rational, hi: &Rational, grid: &BigInt, h: HeightBound) -> Option<Rational> {
    let g = Rational::from_integer(grid.clone());
    let clo = Rational::new((lo * &g).floor().to_integer(), grid.clone());
    let chi = Rational::new((hi * &g).ceil().to_integer(), grid.clone());
    rationals_in_interval(&clo, &chi, h).into_iter().find(|y| lo <= y && y <= hi)
}

pub fn census_pfaff_numeric(f: &PfaffianFunction, h: HeightBound, domain: &Domain, opts: &CensusOptions) -> Result<NumericOutcome> {
    if opts.precision == 0 || opts.max_bits < opts.precision {
        return Err(Error::precondition("need 0 < precision <= max_bits"));
    }
    let hv = h.get();
    let hi64 = i64::try_from(hv).map_err(|_| Error::precondition("H too large"))?;
    let hq = Rational::from_integer(hv.into());
    let width = (Rational::from_integer(2.into()) * &hq * &hq).recip();
    let grid = grid_for(hv);
    let family = family_of(f);
    let bits = ladder(opts.precision, opts.max_bits);
    let evaluators: Vec<_> = bits.iter().map(|&b| (b, f.evaluator(b))).collect();
    let (lo, hi) = domain.clip(h);
    let chain = f.chain();

    let decide = |x: Rational| -> (Verdict, u32, Rational) {
        let mut used = 0;
        for (b, ev) in &evaluators {
            used = *b;
            let e = ev.enclose(&x);
            if e.hi() < &-hq.clone() || e.lo() > &hq {
                return (Verdict::Out, used, x);
            }
            if e.width() >= width {
                continue;
            }
            let Some(y) = coarse_candidate(e.lo(), e.hi(), &grid, h) else {
                return (Verdict::Out, used, x);
            };
            let p = RationalPoint::new(x.clone(), y.clone());
            let exact = e.is_point() && *e.lo() == y;
            let v = if exact || family.as_ref().is_some_and(|fam| fam.contains(&p)) {
                Verdict::Certified(p)
            } else {
                Verdict::Candidate(p)
            };
            return (v, used, x);
        }
        (Verdict::Exhausted, used, x)
    };

    let jobs: Vec<(i64, i64, i64)> = (1..=hi64)
        .filter_map(|b| {
            let bq = Rational::from_integer(b.into());
            let a_lo = (&lo * &bq).ceil().to_integer().to_i64()?.max(-hi64);
            let a_hi = (&hi * &bq).floor().to_integer().to_i64()?.min(hi64);
            (a_lo <= a_hi).then_some((b, a_lo, a_hi))
        })
        .collect();
    let slices = opts.parallelism.map(jobs, |(b, a_lo, a_hi)| {
        let mut out = Vec::new();
        for a in a_lo..=a_hi {
            if num_integer::Integer::gcd(&a, &b) != 1 {
                continue;
            }
            let x = Rational::new(BigInt::from(a), BigInt::from(b));
            if !chain.in_domain(&x) {
                continue;
            }
            out.push(decide(x));
        }
        out
    });

    let mut points = Vec::new();
    let mut candidates = Vec::new();
    let mut exhausted = Vec::new();
    let mut max_bits_used = 0;
    for (v, used, x) in slices.into_iter().flatten() {
        max_bits_used = max_bits_used.max(used);
        match v {
            Verdict::Out => {}
            Verdict::Certified(p) => points.push(p),
            Verdict::Candidate(p) => candidates.push(p),
            Verdict::Exhausted => exhausted.push(x),
        }
    }
    candidates.sort();
    exhausted.sort();
    let mut rec = record(h, points, CensusStatus::LowerBoundWithCandidates);
    rec.candidates = candidates;
    rec.exhausted = exhausted;
    Ok(NumericOutcome { record: rec, max_bits_used })
}
