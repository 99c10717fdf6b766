//! Exact census of an algebraic curve `F(x, y) = 0`: for each `x = a/b` of
//! height at most `H`, the rational roots of `b^s F(a/b, y)` in `y`.
//!
//! `y`-degrees one and two are solved in closed form on `i128`, with a
//! `BigInt` fallback on overflow; higher degrees use the rational root
//! theorem or Sturm isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{record, CensusOptions, CensusRecord, CensusStatus, Domain};
use crate::error::{Error, Result};
use crate::monomial::PlaneCurve;
use crate::rational::{height, rationals_in_interval, HeightBound, Rational, RationalPoint};

/// Largest coefficient whose divisors the rational root theorem will list.
pub const DEFAULT_DIVISOR_CAP: u64 = 1_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMethod {
    /// Rational root theorem; coefficients above `cap` are an error.
    Divisors { cap: u64 },
    /// Sturm isolation to width below `1/(2H^2)`, then an exact test of the
    /// one candidate of height at most `H` per piece.
    Isolate,
}

/// `F` with integer coefficients, grouped by power of `y`.
struct IntCurve {
    s: u32,
    /// `rows[k]` lists `(h, c)` for the terms `c x^h y^k`.
    rows: Vec<Vec<(u32, BigInt)>>,
    small: Option<Vec<Vec<(u32, i128)>>>,
}

impl IntCurve {
    fn new(f: &PlaneCurve) -> IntCurve {
        let p = f.primitive();
        let (s, t) = p.bidegree();
        let mut rows = vec![Vec::new(); t as usize + 1];
        for (&(h, k), c) in p.coeffs() {
            if !c.is_zero() {
                rows[k as usize].push((h, c.to_integer()));
            }
        }
        let small = rows
            .iter()
            .map(|r| r.iter().map(|(h, c)| c.to_i128().map(|c| (*h, c))).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>();
        IntCurve { s, rows, small }
    }

    /// Coefficients of `b^s F(a/b, y)` in `y`, when they fit in `i128`.
    fn small_coeffs(&self, a: i64, b: i64, out: &mut Vec<i128>) -> bool {
        let Some(rows) = &self.small else { return false };
        let s = self.s as usize;
        let mut ap = [0i128; 16];
        let mut bp = [0i128; 16];
        if s >= 16 {
            return false;
        }
        ap[0] = 1;
        bp[0] = 1;
        for i in 1..=s {
            let (Some(x), Some(y)) = (ap[i - 1].checked_mul(a as i128), bp[i - 1].checked_mul(b as i128)) else {
                return false;
            };
            ap[i] = x;
            bp[i] = y;
        }
        out.clear();
        for row in rows {
            let mut acc: i128 = 0;
            for &(h, c) in row {
                let Some(t) = c.checked_mul(ap[h as usize]).and_then(|t| t.checked_mul(bp[s - h as usize])) else {
                    return false;
                };
                let Some(n) = acc.checked_add(t) else { return false };
                acc = n;
            }
            out.push(acc);
        }
        true
    }

    fn big_coeffs(&self, a: &BigInt, b: &BigInt) -> Vec<BigInt> {
        let s = self.s as usize;
        let mut ap = vec![BigInt::one()];
        let mut bp = vec![BigInt::one()];
        for i in 1..=s {
            let x = &ap[i - 1] * a;
            ap.push(x);
            let y = &bp[i - 1] * b;
            bp.push(y);
        }
        self.rows
            .iter()
            .map(|row| row.iter().map(|(h, c)| c * &ap[*h as usize] * &bp[s - *h as usize]).sum())
            .collect()
    }
}

fn isqrt_exact_u128(n: u128) -> Option<u128> {
    // quadratic residues mod 64 prefilter
    const QR64: u64 = 0x0202_0212_0203_0213;
    if (QR64 >> (n & 63)) & 1 == 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    (r * r == n).then_some(r)
}

fn isqrt_exact_big(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Appends the roots `p/q` of the fixed-height window to `out`.
fn push_root(out: &mut Vec<(i128, i128)>, p: i128, q: i128, h: i128) {
    let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    if p.abs() <= h && q <= h {
        out.push((p, q));
    }
}

enum Fiber {
    Vertical,
    Roots,
}

/// Rational roots of height `<= h` of `sum c[k] y^k`, degree at most two.
/// Returns `None` when an intermediate overflows or the degree is higher.
fn small_roots(c: &[i128], h: i128, out: &mut Vec<(i128, i128)>) -> Option<Fiber> {
    let mut lo = 0;
    while lo < c.len() && c[lo] == 0 {
        lo += 1;
    }
    if lo == c.len() {
        return Some(Fiber::Vertical);
    }
    let hi = c.iter().rposition(|v| *v != 0).expect("nonzero");
    if hi - lo > 2 {
        return None;
    }
    if lo > 0 {
        out.push((0, 1));
    }
    let c = &c[lo..=hi];
    match c.len() {
        1 => {}
        2 => push_root(out, -c[0], c[1], h),
        3 => {
            let (a0, a1, a2) = (c[0], c[1], c[2]);
            if a1 == 0 {
                // y^2 = -a0/a2
                let (mut n, mut d) = (-a0, a2);
                if d < 0 {
                    n = -n;
                    d = -d;
                }
                if n <= 0 {
                    return Some(Fiber::Roots);
                }
                let g = n.gcd(&d);
                let (n, d) = ((n / g) as u128, (d / g) as u128);
                if let (Some(rn), Some(rd)) = (isqrt_exact_u128(n), isqrt_exact_u128(d)) {
                    let (rn, rd) = (rn as i128, rd as i128);
                    if rn <= h && rd <= h {
                        out.push((-rn, rd));
                        out.push((rn, rd));
                    }
                }
            } else {
                let disc = a1.checked_mul(a1)?.checked_sub(a0.checked_mul(a2)?.checked_mul(4)?)?;
                if disc < 0 {
                    return Some(Fiber::Roots);
                }
                let Some(r) = isqrt_exact_u128(disc as u128) else {
                    return Some(Fiber::Roots);
                };
                let r = r as i128;
                let den = a2.checked_mul(2)?;
                push_root(out, r.checked_sub(a1)?, den, h);
                if r != 0 {
                    push_root(out, (-a1).checked_sub(r)?, den, h);
                }
            }
        }
        _ => unreachable!(),
    }
    Some(Fiber::Roots)
}

fn big_push(out: &mut Vec<Rational>, q: Rational, h: &BigInt) {
    if &height(&q) <= h {
        out.push(q);
    }
}

/// Divisors `<= limit` of `n != 0`, by trial division up to `min(limit, sqrt n)`.
fn divisors_upto(n: &BigInt, limit: u64) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let root = n.sqrt();
    let top = root.to_u64().unwrap_or(u64::MAX).min(limit);
    let lim = BigInt::from(limit);
    for d in 1..=top {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            out.push(db.clone());
            let e = &n / &db;
            if e != db && e <= lim {
                out.push(e);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn poly_at(c: &[BigInt], y: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for ck in c.iter().rev() {
        acc = acc * y + Rational::from_integer(ck.clone());
    }
    acc
}

/// Rational roots of height `<= h` of `sum c[k] y^k` (not identically zero).
fn big_roots(c: &[BigInt], h: u64, method: RootMethod) -> Result<Vec<Rational>> {
    let hb = BigInt::from(h);
    let mut out = Vec::new();
    let lo = c.iter().position(|v| !v.is_zero()).expect("nonzero polynomial");
    let hi = c.iter().rposition(|v| !v.is_zero()).expect("nonzero polynomial");
    if lo > 0 {
        out.push(Rational::zero());
    }
    let c = &c[lo..=hi];
    match c.len() {
        1 => {}
        2 => big_push(&mut out, Rational::new(-c[0].clone(), c[1].clone()), &hb),
        3 => {
            let disc = &c[1] * &c[1] - BigInt::from(4) * &c[0] * &c[2];
            if let Some(r) = isqrt_exact_big(&disc) {
                let den = BigInt::from(2) * &c[2];
                big_push(&mut out, Rational::new(&r - &c[1], den.clone()), &hb);
                if !r.is_zero() {
                    big_push(&mut out, Rational::new(-&c[1] - &r, den), &hb);
                }
            }
        }
        _ => match method {
            RootMethod::Divisors { cap } => {
                let capb = BigInt::from(cap);
                for v in [&c[0], &c[c.len() - 1]] {
                    if v.abs() > capb {
                        return Err(Error::DivisorCap { value: v.to_string(), cap: cap.to_string() });
                    }
                }
                let us = divisors_upto(&c[0], h);
                let vs = divisors_upto(&c[c.len() - 1], h);
                for v in &vs {
                    for u in &us {
                        if !u.gcd(v).is_one() {
                            continue;
                        }
                        for uu in [u.clone(), -u] {
                            let y = Rational::new(uu, v.clone());
                            if poly_at(c, &y).is_zero() {
                                big_push(&mut out, y, &hb);
                            }
                        }
                    }
                }
            }
            RootMethod::Isolate => {
                let ints: Vec<BigInt> = c.to_vec();
                for y in integer_roots_sturm(&ints, h) {
                    out.push(y);
                }
            }
        },
    }
    out.sort();
    out.dedup();
    Ok(out)
}

type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn derivative(p: &QPoly) -> QPoly {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(k.into())).collect()
}

fn rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![p.clone(), derivative(p)];
    trim(chain.last_mut().unwrap());
    while !chain.last().unwrap().is_empty() {
        let n = chain.len();
        let mut r: QPoly = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[QPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for p in chain {
        let mut acc = Rational::zero();
        for c in p.iter().rev() {
            acc = acc * x + c;
        }
        let s = if acc.is_positive() {
            1
        } else if acc.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Rational roots of height `<= h` of an integer polynomial, by Sturm
/// bisection on half-open intervals `(a, b]` down to width `< 1/(2h^2)`.
/// The square-free part is isolated so that the count is exact.
pub fn integer_roots_sturm(c: &[BigInt], h: u64) -> Vec<Rational> {
    let mut p: QPoly = c.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    trim(&mut p);
    if p.len() <= 1 {
        return Vec::new();
    }
    // square-free part p / gcd(p, p')
    let mut a = p.clone();
    let mut b = derivative(&p);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    let g = a;
    let sf = if g.len() > 1 { quotient(&p, &g) } else { p };
    let chain = sturm_chain(&sf);
    let hb = HeightBound::new(h.max(1)).expect("h >= 1");
    let hq = Rational::from_integer(h.into());
    let width = (Rational::from_integer(2.into()) * &hq * &hq).recip();
    let mut out = Vec::new();
    let mut stack = vec![(-&hq - Rational::one(), hq.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&chain, &lo).saturating_sub(sign_changes(&chain, &hi));
        if count == 0 {
            continue;
        }
        if &hi - &lo < width {
            for y in rationals_in_interval(&lo, &hi, hb) {
                if y > lo && poly_at_q(&sf, &y).is_zero() {
                    out.push(y);
                }
            }
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort();
    out
}

fn poly_at_q(p: &QPoly, y: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * y + c;
    }
    acc
}

fn quotient(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    let mut q = vec![Rational::zero(); a.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        q[shift] = f;
        r.pop();
        trim(&mut r);
    }
    q
}

struct Slice {
    points: Vec<RationalPoint>,
    vertical: Vec<Rational>,
}

fn census_denominator(f: &IntCurve, b: i64, a_lo: i64, a_hi: i64, h: u64, method: RootMethod) -> Result<Slice> {
    let mut points = Vec::new();
    let mut vertical = Vec::new();
    let mut coeffs = Vec::new();
    let mut roots = Vec::new();
    let hi128 = h as i128;
    for a in a_lo..=a_hi {
        if a.gcd(&b) != 1 {
            continue;
        }
        roots.clear();
        let fast = if f.small_coeffs(a, b, &mut coeffs) { small_roots(&coeffs, hi128, &mut roots) } else { None };
        let x = || Rational::new(a.into(), b.into());
        match fast {
            Some(Fiber::Vertical) => vertical.push(x()),
            Some(Fiber::Roots) => {
                for &(p, q) in &roots {
                    points.push(RationalPoint::new(x(), Rational::new(p.into(), q.into())));
                }
            }
            None => {
                let c = f.big_coeffs(&BigInt::from(a), &BigInt::from(b));
                if c.iter().all(Zero::is_zero) {
                    vertical.push(x());
                    continue;
                }
                for y in big_roots(&c, h, method)? {
                    points.push(RationalPoint::new(x(), y));
                }
            }
        }
    }
    Ok(Slice { points, vertical })
}

/// Exact census of `F = 0` over `x` of height `<= H` in `domain`.
pub fn census_algebraic(f: &PlaneCurve, h: HeightBound, domain: &Domain, opts: &CensusOptions) -> Result<CensusRecord> {
    if f.coeffs().values().all(Zero::is_zero) {
        return Err(Error::precondition("F must be nonzero"));
    }
    let hv = h.get();
    let hi64 = i64::try_from(hv).map_err(|_| Error::precondition("H too large"))?;
    let ic = IntCurve::new(f);
    let (lo, hi) = domain.clip(h);
    let jobs: Vec<(i64, i64, i64)> = (1..=hi64)
        .filter_map(|b| {
            let bq = Rational::from_integer(b.into());
            let a_lo = (&lo * &bq).ceil().to_integer().to_i64()?.max(-hi64);
            let a_hi = (&hi * &bq).floor().to_integer().to_i64()?.min(hi64);
            (a_lo <= a_hi).then_some((b, a_lo, a_hi))
        })
        .collect();
    let method = opts.root_method;
    let slices = opts
        .parallelism
        .map(jobs, |(b, a_lo, a_hi)| census_denominator(&ic, b, a_lo, a_hi, hv, method));
    let mut points = Vec::new();
    let mut vertical = Vec::new();
    for s in slices {
        let s = s?;
        points.extend(s.points);
        vertical.extend(s.vertical);
    }
    vertical.sort();
    let fiber = crate::rational::count_rationals(h);
    let mut rec = record(h, points, CensusStatus::Exact);
    if !vertical.is_empty() {
        // points of a vertical fiber are counted once, including any found above
        let pts = rec.points.take().unwrap_or_default();
        let rest: Vec<RationalPoint> = pts.into_iter().filter(|p| vertical.binary_search(&p.x).is_err()).collect();
        rec.n = rest.len() as u64 + fiber * vertical.len() as u64;
        rec.points = Some(rest);
        rec.vertical = vertical;
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::Parallelism;
    use crate::rational::{enumerate_rationals, int, rat};
    use proptest::prelude::*;

    fn hb(h: u64) -> HeightBound {
        HeightBound::new(h).unwrap()
    }

    fn run(f: &PlaneCurve, h: u64) -> CensusRecord {
        census_algebraic(f, hb(h), &Domain::default(), &CensusOptions::default()).unwrap()
    }

    /// Every point of height <= H tested by substitution.
    fn brute(f: &PlaneCurve, h: u64) -> Vec<RationalPoint> {
        let qs = enumerate_rationals(hb(h));
        let mut out = Vec::new();
        for x in &qs {
            for y in &qs {
                let p = RationalPoint::new(x.clone(), y.clone());
                if f.evaluate(&p).is_zero() {
                    out.push(p);
                }
            }
        }
        out
    }

    #[test]
    fn parabola_and_circle() {
        let parabola = PlaneCurve::from_int_terms(&[(0, 1, 1), (2, 0, -1)]).unwrap();
        let r = run(&parabola, 4);
        assert_eq!(r.n, 7);
        let pts = r.points.unwrap();
        assert!(pts.contains(&RationalPoint::new(rat(-1, 2), rat(1, 4))));
        let circle = PlaneCurve::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]).unwrap();
        let r = run(&circle, 5);
        // (+-1, 0), (0, +-1), (+-3/5, +-4/5), (+-4/5, +-3/5)
        assert_eq!(r.n, 12);
        assert!(r.points.unwrap().contains(&RationalPoint::new(rat(-3, 5), rat(4, 5))));
    }

    /// `y^2 = x^3` is parametrised by `(t^2, t^3)`.
    #[test]
    fn cusp_matches_parametrisation() {
        let cusp = PlaneCurve::from_int_terms(&[(0, 2, 1), (3, 0, -1)]).unwrap();
        for h in [10u64, 100] {
            let mut oracle = Vec::new();
            for t in enumerate_rationals(hb(h)) {
                let x = &t * &t;
                let y = &x * &t;
                let p = RationalPoint::new(x, y);
                if crate::rational::point_height(&p) <= BigInt::from(h) {
                    oracle.push(p);
                }
            }
            oracle.sort();
            oracle.dedup();
            assert_eq!(run(&cusp, h).points.unwrap(), oracle, "H = {h}");
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let curves = [
            PlaneCurve::from_int_terms(&[(0, 2, 1), (3, 0, -1), (0, 0, 2)]).unwrap(),
            PlaneCurve::from_int_terms(&[(0, 3, 1), (1, 0, -1)]).unwrap(),
            PlaneCurve::from_int_terms(&[(1, 1, 1), (0, 0, -1)]).unwrap(),
            PlaneCurve::from_int_terms(&[(0, 3, 2), (0, 2, -1), (1, 1, -2), (1, 0, 1)]).unwrap(),
            PlaneCurve::from_terms(&[((1, 2), rat(1, 2)), ((0, 0), rat(-1, 3))]).unwrap(),
        ];
        for f in &curves {
            for h in [3u64, 12] {
                assert_eq!(run(f, h).points.unwrap(), brute(f, h), "{f} at H = {h}");
                let iso = census_algebraic(
                    f,
                    hb(h),
                    &Domain::default(),
                    &CensusOptions { root_method: RootMethod::Isolate, ..CensusOptions::default() },
                )
                .unwrap();
                assert_eq!(iso.points.unwrap(), brute(f, h), "isolate: {f} at H = {h}");
            }
        }
    }

    #[test]
    fn vertical_fiber_flagged() {
        // (x - 1)(y - x^2)
        let f = PlaneCurve::from_int_terms(&[(1, 1, 1), (3, 0, -1), (0, 1, -1), (2, 0, 1)]).unwrap();
        let r = run(&f, 3);
        assert_eq!(r.vertical, vec![int(1)]);
        let fiber = crate::rational::count_rationals(hb(3));
        // parabola points other than x = 1: (0,0), (-1,1)
        assert_eq!(r.n, fiber + 2);
        assert_eq!(r.status, CensusStatus::Exact);
    }

    #[test]
    fn divisor_cap_error() {
        let f = PlaneCurve::from_int_terms(&[(0, 3, 1), (0, 0, 1_000_000_007)]).unwrap();
        let opts = CensusOptions { root_method: RootMethod::Divisors { cap: 1000 }, ..CensusOptions::default() };
        let err = census_algebraic(&f, hb(2), &Domain::default(), &opts).unwrap_err();
        assert!(err.to_string().contains("isolating"));
    }

    #[test]
    fn sturm_roots() {
        // (2y - 1)(y + 3)(y^2 - 2)^2
        let c: Vec<BigInt> = [-12i64, 20, 20, -20, -11, 5, 2].iter().map(|&v| BigInt::from(v)).collect();
        let p = |y: &Rational| poly_at(&c, y);
        assert!(p(&rat(1, 2)).is_zero() && p(&int(-3)).is_zero());
        assert_eq!(integer_roots_sturm(&c, 3), vec![int(-3), rat(1, 2)]);
        assert_eq!(integer_roots_sturm(&c, 2), vec![rat(1, 2)]);
    }

    #[test]
    fn quadratic_fast_path_edges() {
        let mut out = Vec::new();
        // y^2 - 4 = 0
        small_roots(&[-4, 0, 1], 10, &mut out);
        assert_eq!(out, vec![(-2, 1), (2, 1)]);
        out.clear();
        // (y - 1)^2
        small_roots(&[1, -2, 1], 10, &mut out);
        assert_eq!(out, vec![(1, 1)]);
        out.clear();
        assert!(matches!(small_roots(&[0, 0, 0], 10, &mut out), Some(Fiber::Vertical)));
        assert!(small_roots(&[1, 0, 0, 1], 10, &mut out).is_none());
        for n in 0u128..2000 {
            let r = (n as f64).sqrt() as u128;
            assert_eq!(isqrt_exact_u128(n).is_some(), r * r == n || (r + 1) * (r + 1) == n);
        }
    }

    #[test]
    fn parallel_equals_serial() {
        let f = PlaneCurve::from_int_terms(&[(0, 2, 1), (3, 0, -1), (0, 0, 2)]).unwrap();
        let a = run(&f, 60);
        let b = census_algebraic(
            &f,
            hb(60),
            &Domain::default(),
            &CensusOptions { parallelism: Parallelism::Threads(4), ..CensusOptions::default() },
        )
        .unwrap();
        assert_eq!(a.points, b.points);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn monotone_and_symmetric(h in 1u64..30) {
            let parabola = PlaneCurve::from_int_terms(&[(0, 1, 1), (2, 0, -1)]).unwrap();
            let circle = PlaneCurve::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]).unwrap();
            for f in [&parabola, &circle] {
                let a = run(f, h);
                let b = run(f, h + 1);
                prop_assert!(a.n <= b.n);
                let pts = a.points.unwrap();
                for p in &pts {
                    prop_assert!(pts.binary_search(&RationalPoint::new(-p.x.clone(), p.y.clone())).is_ok());
                }
            }
        }
    }
}
