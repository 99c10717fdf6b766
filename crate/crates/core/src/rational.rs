//! Exact rationals, heights, and enumeration of rationals of bounded height.
//!
//! The height of a reduced fraction `a/b` (`b >= 1`) is `max(|a|, b)`; the
//! height of a point is the maximum over its coordinates. This is the affine
//! height, not the projective one.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; `num-rational` keeps it reduced with a positive
/// denominator, and zero is `0/1`.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `max(|num|, den)` of a reduced fraction.
pub fn height(q: &Rational) -> BigInt {
    let n = q.numer().abs();
    let d = q.denom();
    if &n > d {
        n
    } else {
        d.clone()
    }
}

/// Height as a machine integer, when it fits.
pub fn height_u64(q: &Rational) -> Option<u64> {
    height(q).to_u64()
}

/// A positive height bound `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeightBound(u64);

impl HeightBound {
    pub fn new(h: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::precondition("height bound must be >= 1"));
        }
        Ok(HeightBound(h))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn admits(self, q: &Rational) -> bool {
        height(q) <= BigInt::from(self.0)
    }
}

impl fmt::Display for HeightBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: (i64, i64), y: (i64, i64)) -> Self {
        RationalPoint::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    pub fn swapped(&self) -> Self {
        RationalPoint::new(self.y.clone(), self.x.clone())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", format_rational(&self.x), format_rational(&self.y))
    }
}

pub fn point_height(p: &RationalPoint) -> BigInt {
    height(&p.x).max(height(&p.y))
}

/// `"p/q"`, with `q` omitted when it is 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.49"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse("rational", format!("cannot parse `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::parse("rational", format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Parses `"p/q,r/s"`.
pub fn parse_point(s: &str) -> Result<RationalPoint> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::parse("point", format!("expected `x,y`, got `{s}`")))?;
    Ok(RationalPoint::new(parse_rational(x)?, parse_rational(y)?))
}

/// All reduced rationals of height at most `h`, in increasing order.
pub fn enumerate_rationals(h: HeightBound) -> Vec<Rational> {
    let h = h.get() as i64;
    let mut positive: Vec<(i64, i64)> = Vec::new();
    for b in 1..=h {
        for a in 1..=h {
            if a.gcd(&b) == 1 {
                positive.push((a, b));
            }
        }
    }
    positive.sort_by(|p, q| (p.0 as i128 * q.1 as i128).cmp(&(q.0 as i128 * p.1 as i128)));
    let mut out = Vec::with_capacity(2 * positive.len() + 1);
    out.extend(positive.iter().rev().map(|&(a, b)| rat(-a, b)));
    out.push(Rational::zero());
    out.extend(positive.iter().map(|&(a, b)| rat(a, b)));
    out
}

/// Number of reduced rationals of height at most `h` (without building them).
pub fn count_rationals(h: HeightBound) -> u64 {
    let h = h.get();
    let mut positive = 0u64;
    for b in 1..=h {
        for a in 1..=h {
            if a.gcd(&b) == 1 {
                positive += 1;
            }
        }
    }
    2 * positive + 1
}

/// All reduced rationals of height at most `h` lying in `[lo, hi]`, ascending.
///
/// Endpoints are exact rationals; callers holding an irrational endpoint pass
/// an outward-rounded rational so that the result can only over-include.
/// Runs by repeatedly extracting the simplest fraction of a subinterval, so
/// the cost is proportional to the output size, not to `h`.
pub fn rationals_in_interval(lo: &Rational, hi: &Rational, h: HeightBound) -> Vec<Rational> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let bound = BigInt::from(h.get());
    collect_simplest(
        Endpoint::closed(lo.clone()),
        Endpoint::closed(hi.clone()),
        &bound,
        &mut out,
    );
    out.sort();
    out
}

#[derive(Clone, Debug)]
struct Endpoint {
    value: Rational,
    closed: bool,
}

impl Endpoint {
    fn closed(value: Rational) -> Self {
        Endpoint { value, closed: true }
    }

    fn open(value: Rational) -> Self {
        Endpoint { value, closed: false }
    }
}

fn collect_simplest(lo: Endpoint, hi: Endpoint, bound: &BigInt, out: &mut Vec<Rational>) {
    let Some(s) = simplest_between(&lo, &hi) else {
        return;
    };
    // The simplest fraction minimises both |numerator| and denominator over
    // the interval, so its height is the least height present.
    if &height(&s) > bound {
        return;
    }
    out.push(s.clone());
    collect_simplest(lo, Endpoint::open(s.clone()), bound, out);
    collect_simplest(Endpoint::open(s), hi, bound, out);
}

fn is_nonempty(lo: &Endpoint, hi: &Endpoint) -> bool {
    match lo.value.cmp(&hi.value) {
        Ordering::Less => true,
        Ordering::Equal => lo.closed && hi.closed,
        Ordering::Greater => false,
    }
}

/// The fraction of least denominator (then least |numerator|) in the interval.
fn simplest_between(lo: &Endpoint, hi: &Endpoint) -> Option<Rational> {
    if !is_nonempty(lo, hi) {
        return None;
    }
    let zero = Rational::zero();
    let contains_zero = (lo.value < zero || (lo.value.is_zero() && lo.closed))
        && (hi.value > zero || (hi.value.is_zero() && hi.closed));
    if contains_zero {
        return Some(zero);
    }
    if hi.value <= zero {
        let mirrored = simplest_nonnegative(
            &Endpoint { value: -hi.value.clone(), closed: hi.closed },
            &Endpoint { value: -lo.value.clone(), closed: lo.closed },
        );
        return Some(-mirrored);
    }
    Some(simplest_nonnegative(lo, hi))
}

/// Continued-fraction descent for a nonempty interval with `lo >= 0`.
fn simplest_nonnegative(lo: &Endpoint, hi: &Endpoint) -> Rational {
    let fl = lo.value.floor();
    if fl == lo.value && lo.closed {
        return fl;
    }
    let next = &fl + Rational::one();
    if next < hi.value || (next == hi.value && hi.closed) {
        return next;
    }
    // lo and hi both lie in (fl, fl + 1]; recurse on reciprocals of the
    // fractional parts, which swaps the roles of the endpoints.
    let new_lo = Endpoint {
        value: (&hi.value - &fl).recip(),
        closed: hi.closed,
    };
    if lo.value == fl {
        // lo is open at an integer: the reciprocal interval is unbounded above
        let first = if new_lo.closed && new_lo.value.is_integer() {
            new_lo.value.clone()
        } else {
            new_lo.value.floor() + Rational::one()
        };
        return fl + first.recip();
    }
    let new_hi = Endpoint {
        value: (&lo.value - &fl).recip(),
        closed: lo.closed,
    };
    fl + simplest_nonnegative(&new_lo, &new_hi).recip()
}

/// Simplest rational in the open interval `(lo, hi)`.
pub fn simplest_in_open(lo: &Rational, hi: &Rational) -> Option<Rational> {
    simplest_between(&Endpoint::open(lo.clone()), &Endpoint::open(hi.clone()))
}

/// Simplest rational in the closed interval `[lo, hi]`.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Option<Rational> {
    simplest_between(&Endpoint::closed(lo.clone()), &Endpoint::closed(hi.clone()))
}

/// Decimal rendering with `sig` significant digits, rounded toward
/// `+inf` when `up` and toward `-inf` otherwise. Plain notation for
/// moderate magnitudes, `m.mmmeN` beyond.
pub fn format_decimal(q: &Rational, sig: u32, up: bool) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let ten = BigRational::from_integer(BigInt::from(10));
    let abs = q.abs();
    // exponent e with 10^e <= |q| < 10^(e+1)
    let mut e: i64 = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow10(e) > abs {
        e -= 1;
    }
    while pow10(e + 1) <= abs {
        e += 1;
    }
    let mut scale = pow10(sig as i64 - 1 - e);
    let scaled = q * &scale;
    let mut m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    if m.abs() >= num_traits::pow(BigInt::from(10), sig as usize) {
        // rounding carried into a new digit; m is exactly +-10^sig here
        m /= 10;
        e += 1;
        scale = pow10(sig as i64 - 1 - e);
    }
    let negative = m.is_negative();
    let digits = m.abs().to_string();
    let sign = if negative { "-" } else { "" };
    if (-4..7).contains(&e) {
        let value = BigRational::from_integer(m) / scale;
        let decimals = (sig as i64 - 1 - e).max(0) as usize;
        let v = value.abs();
        let int_part = v.floor().to_integer();
        if decimals == 0 {
            return format!("{sign}{int_part}");
        }
        let frac = ((v - BigRational::from_integer(int_part.clone())) * pow10(decimals as i64)).round().to_integer();
        let frac = format!("{:0>width$}", frac.to_string(), width = decimals);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        }
    }
}

/// Floor of `log2(h)` for `h >= 1`.
pub fn floor_log2(h: u64) -> u32 {
    63 - h.leading_zeros()
}
