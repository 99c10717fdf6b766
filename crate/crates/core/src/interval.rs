//! Closed intervals with rational endpoints and outward rounding.
//!
//! Endpoints are exact rationals. Operations are exact; `round_out` snaps
//! endpoints with oversized denominators outward onto the dyadic grid
//! `2^-bits`, so enclosures stay valid while their size stays bounded.
//! Transcendental kernels (`exp`, `ln`, `sqrt`) run in fixed-point integer
//! arithmetic with explicit error budgets and return certified enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_dyadic(q: &Rational, bits: u32) -> Rational {
    let scaled = (q * BigRational::from_integer(pow2(bits))).floor();
    BigRational::new(scaled.to_integer(), pow2(bits))
}

fn ceil_dyadic(q: &Rational, bits: u32) -> Rational {
    let scaled = (q * BigRational::from_integer(pow2(bits))).ceil();
    BigRational::new(scaled.to_integer(), pow2(bits))
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: i64) -> Self {
        Interval::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified sign: `Some(Equal)` only for the exact point zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True when the width is below `2^-bits`.
    pub fn narrower_than(&self, bits: u32) -> bool {
        self.width() * BigRational::from_integer(pow2(bits)) < Rational::one()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Outward rounding onto the `2^-bits` grid, refined for endpoints of
    /// magnitude below one so that they keep `bits` significant bits (and
    /// their sign). Small exact rationals pass through untouched.
    pub fn round_out(self, bits: u32) -> Interval {
        fn grid(q: &BigRational, bits: u32) -> u32 {
            let tiny = q.denom().bits() as i64 - q.numer().bits() as i64;
            if q.is_zero() {
                bits
            } else {
                bits + tiny.max(0) as u32
            }
        }
        let gl = grid(&self.lo, bits);
        let lo = if self.lo.denom().bits() > gl as u64 + 32 {
            floor_dyadic(&self.lo, gl)
        } else {
            self.lo
        };
        let gh = grid(&self.hi, bits);
        let hi = if self.hi.denom().bits() > gh as u64 + 32 {
            ceil_dyadic(&self.hi, gh)
        } else {
            self.hi
        };
        Interval { lo, hi }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        if self.is_point() && other.is_point() {
            return Interval::point(&self.lo * &other.lo);
        }
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::from_int(1);
        }
        let a = num_traits::pow(self.lo.clone(), e as usize);
        let b = num_traits::pow(self.hi.clone(), e as usize);
        if e % 2 == 1 || !self.lo.is_negative() {
            Interval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Interval { lo: b, hi: a }
        } else {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Rational::zero(),
                hi: (-self.lo.clone()).max(self.hi.clone()),
            }
        }
    }

    /// Enclosure of `e^x` over the interval (monotone hull of the endpoints).
    pub fn exp(&self, bits: u32) -> Interval {
        if self.is_point() {
            return exp_rational(&self.lo, bits);
        }
        Interval {
            lo: exp_rational(&self.lo, bits).lo,
            hi: exp_rational(&self.hi, bits).hi,
        }
    }

    /// Enclosure of `ln x`; `None` unless the interval is strictly positive.
    pub fn ln(&self, bits: u32) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        Some(Interval {
            lo: ln_rational(&self.lo, bits).lo,
            hi: ln_rational(&self.hi, bits).hi,
        })
    }

    /// Enclosure of `sqrt x`; `None` if the interval reaches below zero.
    pub fn sqrt(&self, bits: u32) -> Option<Interval> {
        if self.lo.is_negative() {
            return None;
        }
        Some(Interval {
            lo: sqrt_rational(&self.lo, bits).lo,
            hi: sqrt_rational(&self.hi, bits).hi,
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Fixed-point value `m / 2^w` stored as `m`.
fn to_fixed_floor(q: &Rational, w: u32) -> BigInt {
    (q.numer() << w as usize).div_floor(q.denom())
}

fn from_fixed(m: BigInt, w: u32) -> Rational {
    BigRational::new(m, pow2(w))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Upper estimate of `log2 |q|` (used only to size guard bits).
fn log2_magnitude(q: &Rational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64 + 1
}

/// Certified enclosure of `e^x` with width below `2^-bits` (for moderate x).
pub fn exp_rational(x: &Rational, bits: u32) -> Interval {
    if x.is_zero() {
        return Interval::from_int(1);
    }
    if x < &BigRational::from_integer(BigInt::from(-8)) {
        // e^x = 1/e^{-x} keeps the lower end positive however small e^x is
        let big = exp_series(&-x, bits + 8, 0);
        return big.recip().expect("e^{-x} > 1").round_out(bits + 2);
    }
    let growth = if x.is_positive() {
        (x.to_f64().unwrap_or(f64::MAX) * std::f64::consts::LOG2_E).ceil().max(0.0) as u32 + 2
    } else {
        0
    };
    exp_series(x, bits, growth)
}

/// `e^x` with relative error below `2^-bits`, absolute below `2^-bits`
/// when `growth` covers `log2 e^x`.
fn exp_series(x: &Rational, bits: u32, growth: u32) -> Interval {
    // Halve the argument until |y| < 2^-10, sum the series, then square back.
    let mag = log2_magnitude(x);
    let k: u32 = (mag + 10).max(0) as u32;
    let w = bits + k + growth + 24;
    let y = x / BigRational::from_integer(pow2(k));
    let y_fixed = to_fixed_floor(&y, w);
    let one = pow2(w);

    // Series at y_fixed; each truncating step costs at most one ulp and
    // the terms shrink by a factor of at least 2^10.
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut n: u32 = 1;
    let mut err = BigInt::from(2);
    loop {
        term = (&term * &y_fixed).div_floor(&one);
        term = term.div_floor(&BigInt::from(n));
        if term.is_zero() || term.bits() as i64 <= 1 {
            err += 4;
            break;
        }
        sum += &term;
        err += 2;
        n += 1;
        if n > w {
            break;
        }
    }
    // Tail below one ulp; the floor on y costs at most e^y * 2^-w < 2 ulps.
    err += 4;
    let mut lo = &sum - &err;
    let mut hi = &sum + &err;
    if lo.sign() != Sign::Plus {
        lo = BigInt::zero();
    }
    for _ in 0..k {
        lo = (&lo * &lo).div_floor(&one);
        hi = ceil_div(&(&hi * &hi), &one);
    }
    Interval {
        lo: from_fixed(lo, w),
        hi: from_fixed(hi, w),
    }
    .round_out(bits + 2)
}

/// `2 artanh(z)` for a fixed-point `0 <= z <= 1/3`, returned as `(sum, err)`
/// in ulps of `2^-w`.
fn artanh2_fixed(z: &BigInt, w: u32) -> (BigInt, BigInt) {
    let one = pow2(w);
    let z2 = (z * z).div_floor(&one);
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut err = BigInt::from(1);
    let mut k: u64 = 0;
    loop {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if term.is_zero() {
            break;
        }
        sum += &term;
        err += 2;
        power = (&power * &z2).div_floor(&one);
        k += 1;
    }
    // Geometric tail with ratio <= 1/9 once terms vanish.
    err += 2;
    (sum * 2, err * 2)
}

fn ln2_fixed(w: u32) -> (BigInt, BigInt) {
    let third = pow2(w).div_floor(&BigInt::from(3));
    let (s, e) = artanh2_fixed(&third, w);
    // the floor on 1/3 loses at most 1 ulp of z, i.e. < 3 ulps of the result
    (s, e + 3)
}

/// Certified enclosure of `ln 2`.
pub fn ln2(bits: u32) -> Interval {
    let w = bits + 16;
    let (s, e) = ln2_fixed(w);
    Interval {
        lo: from_fixed(&s - &e, w),
        hi: from_fixed(&s + &e, w),
    }
    .round_out(bits + 2)
}

/// Certified enclosure of `ln q` for `q > 0`.
pub fn ln_rational(q: &Rational, bits: u32) -> Interval {
    assert!(q.is_positive(), "ln of a nonpositive rational");
    if q.is_one() {
        return Interval::from_int(0);
    }
    // q = 2^e * m with m in [1, 2)
    let mut e = log2_magnitude(q) - 1;
    let two_e = |e: i64| -> Rational {
        if e >= 0 {
            BigRational::from_integer(pow2(e as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-e) as u32))
        }
    };
    let mut m = q / two_e(e);
    while m >= BigRational::from_integer(BigInt::from(2)) {
        m /= BigRational::from_integer(BigInt::from(2));
        e += 1;
    }
    while m < Rational::one() {
        m *= BigRational::from_integer(BigInt::from(2));
        e -= 1;
    }
    let e_bits = 64 - e.unsigned_abs().leading_zeros();
    let w = bits + e_bits + 20;
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let z_fixed = to_fixed_floor(&z, w);
    let (s, err) = artanh2_fixed(&z_fixed, w);
    // z is known to within one ulp and d/dz 2artanh(z) <= 9/4 on [0, 1/3].
    let err = err + 3;
    let (l2, l2err) = ln2_fixed(w);
    let eb = BigInt::from(e);
    let centre = &s + &eb * &l2;
    let spread = &err + eb.abs() * &l2err + 1;
    Interval {
        lo: from_fixed(&centre - &spread, w),
        hi: from_fixed(&centre + &spread, w),
    }
    .round_out(bits + 2)
}

/// Certified enclosure of `sqrt q` for `q >= 0`; exact when `q` is a square.
pub fn sqrt_rational(q: &Rational, bits: u32) -> Interval {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    let n = q.numer();
    let d = q.denom();
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Interval::point(BigRational::new(rn, rd));
    }
    let w = bits + 4;
    let scaled = (n << (2 * w as usize)).div_floor(d);
    let r = scaled.sqrt();
    Interval {
        lo: from_fixed(r.clone(), w),
        hi: from_fixed(r + 1, w),
    }
}

/// Certified enclosure of `base^exponent` for `base > 0`.
pub fn pow_rational(base: &Rational, exponent: &Rational, bits: u32) -> Interval {
    assert!(base.is_positive(), "power of a nonpositive base");
    if exponent.is_integer() {
        if let Some(e) = exponent.to_integer().to_i64() {
            let magnitude = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
            return Interval::point(if e >= 0 { magnitude } else { magnitude.recip() });
        }
    }
    let guard = bits + 8 + log2_magnitude(exponent).max(0) as u32;
    let ln = ln_rational(base, guard);
    ln.scale(exponent).round_out(guard).exp(bits)
}
