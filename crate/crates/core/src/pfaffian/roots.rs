//! Certified real-root isolation for Pfaffian functions, and the sign and
//! slope partitions built on it.
//!
//! Zeros of `h` are found from the zeros of `h'`: between consecutive
//! critical points `h` is monotone, so endpoint signs decide everything.
//! The recursion stops after a few levels and falls back to bisection with
//! monotonicity tests on the last derivative.

use std::cmp::Ordering;
use num_bigint::BigUint;
use num_traits::{One, Signed};

use super::constant::Constant;
use super::function::{zero_count_bound, PfaffianFunction};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{format_rational, simplest_in_open, Rational};

#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    /// Brackets narrower than `2^-p_max` that still cannot be resolved are
    /// reported as precision exhaustion.
    pub p_max: u32,
    /// Recursion depth through derivatives before bisection takes over.
    pub depth_cap: usize,
    /// Width `2^-boundary_bits` to which partition boundaries are refined.
    pub boundary_bits: u32,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { p_max: 256, depth_cap: 3, boundary_bits: 64 }
    }
}

const SIGN_MAX_BITS: u32 = 1024;

/// A zero: an exact rational, or an open bracket across which the function
/// changes sign exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Root {
    Exact(Rational),
    Bracket { lo: Rational, hi: Rational, lo_sign: Ordering },
}

impl Root {
    pub fn lo(&self) -> &Rational {
        match self {
            Root::Exact(q) => q,
            Root::Bracket { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Root::Exact(q) => q,
            Root::Bracket { hi, .. } => hi,
        }
    }

    /// A rational inside the bracket (the root itself when exact).
    pub fn representative(&self) -> Rational {
        match self {
            Root::Exact(q) => q.clone(),
            Root::Bracket { lo, hi, .. } => (lo + hi) / Rational::from_integer(2.into()),
        }
    }

    pub fn enclosure(&self) -> Interval {
        Interval::new(self.lo().clone(), self.hi().clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Zeros {
    IdenticallyZero,
    Finite(Vec<Root>),
}

impl Zeros {
    pub fn roots(&self) -> &[Root] {
        match self {
            Zeros::IdenticallyZero => &[],
            Zeros::Finite(r) => r,
        }
    }
}

/// A subtracted constant known only through enclosures.
pub type Shift<'a> = &'a (dyn Fn(u32) -> Interval + Sync);

/// `h - c` together with enough derivatives of `h` for the recursion.
struct Target<'a> {
    derivs: Vec<PfaffianFunction>,
    shift: Option<Shift<'a>>,
    label: String,
}

fn width_bits(lo: &Rational, hi: &Rational) -> u32 {
    let w = hi - lo;
    if !w.is_positive() {
        return 0;
    }
    let d = w.denom().bits() as i64 - w.numer().bits() as i64;
    d.max(0) as u32
}

fn middle_split(lo: &Rational, hi: &Rational) -> Rational {
    let two = Rational::from_integer(2.into());
    let quarter = (hi - lo) / Rational::from_integer(4.into());
    let a = lo + &quarter;
    let b = hi - &quarter;
    simplest_in_open(&a, &b).unwrap_or_else(|| (lo + hi) / two)
}

impl<'a> Target<'a> {
    fn new(f: &PfaffianFunction, shift: Option<Shift<'a>>, depth_cap: usize, label: String) -> Self {
        let mut derivs = vec![f.clone()];
        for _ in 0..depth_cap + 2 {
            let next = derivs.last().unwrap().derivative();
            derivs.push(next);
        }
        Target { derivs, shift, label }
    }

    fn name(&self, k: usize) -> String {
        if k == 0 {
            self.label.clone()
        } else {
            format!("{} (derivative {k})", self.label)
        }
    }

    fn is_zero(&self, k: usize) -> bool {
        self.derivs[k].is_identically_zero() && (k > 0 || self.shift.is_none())
    }

    fn apply_shift(&self, k: usize, v: Interval, bits: u32) -> Interval {
        match (k, self.shift) {
            (0, Some(c)) => v.sub(&c(bits)).round_out(bits + 4),
            _ => v,
        }
    }

    fn value(&self, k: usize, x: &Rational, bits: u32) -> Interval {
        let v = self.derivs[k].enclose_at(x, bits);
        self.apply_shift(k, v, bits)
    }

    fn range(&self, k: usize, lo: &Rational, hi: &Rational) -> Interval {
        let bits = 64 + width_bits(lo, hi);
        let df = self.derivs.get(k + 1);
        let v = self.derivs[k].range(lo, hi, bits, df);
        self.apply_shift(k, v, bits)
    }

    fn sign_at(&self, k: usize, x: &Rational) -> Result<Ordering> {
        let mut bits = 64;
        loop {
            if let Some(s) = self.value(k, x, bits).sign() {
                return Ok(s);
            }
            if bits >= SIGN_MAX_BITS {
                return Err(Error::PrecisionExhausted {
                    bits,
                    context: format!("deciding the sign of {} at x = {}", self.name(k), format_rational(x)),
                });
            }
            bits *= 2;
        }
    }

    fn try_sign(&self, k: usize, x: &Rational) -> Option<Ordering> {
        self.sign_at(k, x).ok()
    }

    /// A split point strictly inside `(lo, hi)` at which the sign of `h^(k)`
    /// is decidable, preferring simple fractions near the middle.
    fn split_point(&self, k: usize, lo: &Rational, hi: &Rational) -> Result<(Rational, Ordering)> {
        let w = hi - lo;
        let at = |n: i64, d: i64| lo + &w * Rational::new(n.into(), d.into());
        for m in [middle_split(lo, hi), at(1, 2), at(1, 3), at(2, 3), at(3, 7)] {
            if let Some(s) = self.try_sign(k, &m) {
                return Ok((m, s));
            }
        }
        Err(Error::PrecisionExhausted {
            bits: SIGN_MAX_BITS,
            context: format!(
                "no decidable split point for {} in [{}, {}]",
                self.name(k),
                format_rational(lo),
                format_rational(hi)
            ),
        })
    }

    /// Sign of `h^(k)` over a whole root feature of `h^(k+1)`, refining the
    /// feature when needed.
    fn sign_over(&self, k: usize, feature: &mut Root, cfg: &RootConfig) -> Result<Ordering> {
        loop {
            match feature {
                Root::Exact(q) => return self.sign_at(k, q),
                Root::Bracket { lo, hi, .. } => {
                    if let Some(s) = self.range(k, lo, hi).sign() {
                        if s != Ordering::Equal {
                            return Ok(s);
                        }
                    }
                    if width_bits(lo, hi) >= cfg.p_max {
                        return Err(Error::PrecisionExhausted {
                            bits: cfg.p_max,
                            context: format!(
                                "suspected tangential zero of {} in [{}, {}]",
                                self.name(k),
                                format_rational(lo),
                                format_rational(hi)
                            ),
                        });
                    }
                }
            }
            self.refine_step(k + 1, feature)?;
        }
    }

    /// One bisection step on a bracket of `h^(k)`.
    fn refine_step(&self, k: usize, root: &mut Root) -> Result<()> {
        let Root::Bracket { lo, hi, lo_sign } = root else {
            return Ok(());
        };
        // A rational zero is caught exactly once the bracket isolates it
        // among simpler fractions.
        if let Some(s) = simplest_in_open(lo, hi) {
            if self.try_sign(k, &s) == Some(Ordering::Equal) {
                *root = Root::Exact(s);
                return Ok(());
            }
        }
        let (m, sm) = self.split_point(k, lo, hi)?;
        if sm == Ordering::Equal {
            *root = Root::Exact(m);
        } else if sm == *lo_sign {
            *lo = m;
        } else {
            *hi = m;
        }
        Ok(())
    }

    fn refine_to(&self, k: usize, root: &mut Root, bits: u32) -> Result<()> {
        while matches!(root, Root::Bracket { .. }) && width_bits(root.lo(), root.hi()) < bits {
            self.refine_step(k, root)?;
        }
        Ok(())
    }

    fn refined(&self, zeros: Zeros, cfg: &RootConfig) -> Result<Zeros> {
        match zeros {
            Zeros::IdenticallyZero => Ok(Zeros::IdenticallyZero),
            Zeros::Finite(mut roots) => {
                for r in roots.iter_mut() {
                    self.refine_to(0, r, cfg.boundary_bits)?;
                }
                Ok(Zeros::Finite(roots))
            }
        }
    }

    fn zeros(&self, k: usize, lo: &Rational, hi: &Rational, depth: usize, cfg: &RootConfig) -> Result<Zeros> {
        if self.is_zero(k) {
            return Ok(Zeros::IdenticallyZero);
        }
        if !self.range(k, lo, hi).contains_zero() {
            return Ok(Zeros::Finite(Vec::new()));
        }
        if lo == hi {
            return Ok(Zeros::Finite(vec![Root::Exact(lo.clone())]));
        }
        if depth >= cfg.depth_cap || k + 2 >= self.derivs.len() {
            return self.bisect(k, lo, hi, cfg).map(Zeros::Finite);
        }
        match self.zeros(k + 1, lo, hi, depth + 1, cfg)? {
            Zeros::IdenticallyZero => {
                // constant on the interval
                if self.sign_at(k, lo)? == Ordering::Equal {
                    Ok(Zeros::IdenticallyZero)
                } else {
                    Ok(Zeros::Finite(Vec::new()))
                }
            }
            Zeros::Finite(crits) => self.monotone_pieces(k, lo, hi, crits, cfg).map(Zeros::Finite),
        }
    }

    fn monotone_pieces(
        &self,
        k: usize,
        lo: &Rational,
        hi: &Rational,
        crits: Vec<Root>,
        cfg: &RootConfig,
    ) -> Result<Vec<Root>> {
        let mut knots: Vec<Root> = Vec::with_capacity(crits.len() + 2);
        knots.push(Root::Exact(lo.clone()));
        for c in crits {
            if matches!(&c, Root::Exact(q) if q == lo || q == hi) {
                continue;
            }
            knots.push(c);
        }
        knots.push(Root::Exact(hi.clone()));
        let mut signs = Vec::with_capacity(knots.len());
        for knot in knots.iter_mut() {
            signs.push(self.sign_over(k, knot, cfg)?);
        }
        let mut out = Vec::new();
        for i in 0..knots.len() {
            if signs[i] == Ordering::Equal {
                out.push(knots[i].clone());
            }
            if i + 1 < knots.len() {
                let (sa, sb) = (signs[i], signs[i + 1]);
                let a = knots[i].hi();
                let b = knots[i + 1].lo();
                if sa != Ordering::Equal && sb != Ordering::Equal && sa != sb && a < b {
                    out.push(Root::Bracket { lo: a.clone(), hi: b.clone(), lo_sign: sa });
                }
            }
        }
        Ok(out)
    }

    fn bisect(&self, k: usize, lo: &Rational, hi: &Rational, cfg: &RootConfig) -> Result<Vec<Root>> {
        let mut out = Vec::new();
        let mut stack = vec![(lo.clone(), hi.clone())];
        while let Some((u, v)) = stack.pop() {
            if !self.range(k, &u, &v).contains_zero() {
                continue;
            }
            if u == v {
                out.push(Root::Exact(u));
                continue;
            }
            if !self.range(k + 1, &u, &v).contains_zero() {
                let su = self.sign_at(k, &u)?;
                let sv = self.sign_at(k, &v)?;
                if su == Ordering::Equal {
                    out.push(Root::Exact(u.clone()));
                }
                if sv == Ordering::Equal {
                    out.push(Root::Exact(v.clone()));
                }
                if su != Ordering::Equal && sv != Ordering::Equal && su != sv {
                    out.push(Root::Bracket { lo: u, hi: v, lo_sign: su });
                }
                continue;
            }
            if width_bits(&u, &v) >= cfg.p_max {
                return Err(Error::PrecisionExhausted {
                    bits: cfg.p_max,
                    context: format!(
                        "isolating zeros of {} in [{}, {}]",
                        self.name(k),
                        format_rational(&u),
                        format_rational(&v)
                    ),
                });
            }
            let (m, _) = self.split_point(k, &u, &v)?;
            stack.push((m.clone(), v));
            stack.push((u, m));
        }
        out.sort_by(|a, b| a.lo().cmp(b.lo()).then(a.hi().cmp(b.hi())));
        out.dedup();
        Ok(out)
    }
}

fn check_interval(f: &PfaffianFunction, lo: &Rational, hi: &Rational) -> Result<()> {
    if lo > hi {
        return Err(Error::precondition("interval endpoints out of order"));
    }
    f.chain().check_domain(lo)?;
    f.chain().check_domain(hi)
}

/// Zeros of `f` on the closed interval `[lo, hi]`.
pub fn isolate_zeros(f: &PfaffianFunction, lo: &Rational, hi: &Rational, cfg: &RootConfig) -> Result<Zeros> {
    check_interval(f, lo, hi)?;
    let t = Target::new(f, None, cfg.depth_cap, f.to_string());
    t.refined(t.zeros(0, lo, hi, 0, cfg)?, cfg)
}

/// Zeros of `f - c` where `c` is known through enclosures.
pub fn isolate_zeros_shifted(
    f: &PfaffianFunction,
    shift: Shift<'_>,
    lo: &Rational,
    hi: &Rational,
    cfg: &RootConfig,
) -> Result<Zeros> {
    check_interval(f, lo, hi)?;
    let t = Target::new(f, Some(shift), cfg.depth_cap, format!("{f} - c"));
    t.refined(t.zeros(0, lo, hi, 0, cfg)?, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignProfile {
    Positive,
    Negative,
    IdenticallyZero,
}

/// Piece of a partition with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    /// Entry `j - 1` describes `f^(j)` on the open piece.
    pub signs: Vec<SignProfile>,
}

/// A boundary between pieces: a root of at least one listed derivative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub root: Root,
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPartition {
    pub pieces: Vec<Piece>,
    pub boundaries: Vec<Boundary>,
}

struct Tagged<'t, 'a> {
    root: Root,
    orders: Vec<usize>,
    target: &'t Target<'a>,
}

/// Sorts roots coming from several functions and refines overlapping
/// brackets until all features are disjoint; coincident exact roots merge.
fn merge_roots(mut items: Vec<Tagged<'_, '_>>, cfg: &RootConfig) -> Result<Vec<Boundary>> {
    for it in items.iter_mut() {
        it.target.refine_to(0, &mut it.root, cfg.boundary_bits)?;
    }
    loop {
        items.sort_by(|a, b| a.root.lo().cmp(b.root.lo()).then(a.root.hi().cmp(b.root.hi())));
        let mut changed = false;
        let mut i = 0;
        while i + 1 < items.len() {
            let overlap = {
                let (a, b) = (&items[i].root, &items[i + 1].root);
                match (a, b) {
                    (Root::Exact(p), Root::Exact(q)) => p == q,
                    // touching counts: a bracket is open at the shared end
                    _ => b.lo() <= a.hi(),
                }
            };
            if !overlap {
                i += 1;
                continue;
            }
            if let (Root::Exact(_), Root::Exact(_)) = (&items[i].root, &items[i + 1].root) {
                let extra = items.remove(i + 1).orders;
                items[i].orders.extend(extra);
                items[i].orders.sort_unstable();
                items[i].orders.dedup();
                changed = true;
                continue;
            }
            let wider = if width(&items[i].root) >= width(&items[i + 1].root) { i } else { i + 1 };
            let it = &mut items[wider];
            if width_bits(it.root.lo(), it.root.hi()) >= cfg.p_max {
                return Err(Error::PrecisionExhausted {
                    bits: cfg.p_max,
                    context: format!(
                        "separating zeros of derivatives {:?} near {}",
                        it.orders,
                        format_rational(it.root.lo())
                    ),
                });
            }
            it.target.refine_step(0, &mut it.root)?;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(items.into_iter().map(|t| Boundary { root: t.root, orders: t.orders }).collect())
}

fn width(r: &Root) -> Rational {
    r.hi() - r.lo()
}

/// Cut points of `[lo, hi]` at the boundaries, each with a sample point
/// strictly between consecutive root features.
fn pieces_between(lo: &Rational, hi: &Rational, boundaries: &[Boundary]) -> Vec<(Rational, Rational, Rational)> {
    let mut cuts: Vec<(Rational, Rational, Rational)> = Vec::new(); // (cut, feature lo, feature hi)
    cuts.push((lo.clone(), lo.clone(), lo.clone()));
    for b in boundaries {
        let rep = b.root.representative();
        if &rep <= lo || &rep >= hi {
            continue;
        }
        cuts.push((rep, b.root.lo().clone(), b.root.hi().clone()));
    }
    cuts.push((hi.clone(), hi.clone(), hi.clone()));
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, _, a_hi) = &w[0];
        let (b, b_lo, _) = &w[1];
        let s_lo = a_hi.max(lo);
        let s_hi = b_lo.min(hi);
        let sample = if s_lo < s_hi { middle_split(s_lo, s_hi) } else { (a + b) / Rational::from_integer(2.into()) };
        out.push((a.clone(), b.clone(), sample));
    }
    out
}

/// Partition of `[lo, hi]` on whose open pieces each `f^(j)`, `j = 1..=m`,
/// is one-signed or identically zero. Every zero of every `f^(j)` is a
/// boundary, tangential ones included.
pub fn sign_partition(
    f: &PfaffianFunction,
    lo: &Rational,
    hi: &Rational,
    m: usize,
    cfg: &RootConfig,
) -> Result<SignPartition> {
    check_interval(f, lo, hi)?;
    if m == 0 {
        return Err(Error::precondition("sign_partition needs m >= 1"));
    }
    let mut targets = Vec::with_capacity(m);
    let mut g = f.derivative();
    for j in 1..=m {
        targets.push(Target::new(&g, None, cfg.depth_cap, format!("f^({j})")));
        g = g.derivative();
    }
    let mut zero_orders = Vec::new();
    let mut tagged = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        match t.zeros(0, lo, hi, 0, cfg)? {
            Zeros::IdenticallyZero => zero_orders.push(i + 1),
            Zeros::Finite(roots) => {
                for r in roots {
                    tagged.push(Tagged { root: r, orders: vec![i + 1], target: t });
                }
            }
        }
    }
    let boundaries = merge_roots(tagged, cfg)?;
    let mut pieces = Vec::new();
    for (a, b, sample) in pieces_between(lo, hi, &boundaries) {
        if a == b && !(a == *lo && b == *hi) {
            continue;
        }
        let mut signs = Vec::with_capacity(m);
        for (i, t) in targets.iter().enumerate() {
            if zero_orders.contains(&(i + 1)) {
                signs.push(SignProfile::IdenticallyZero);
                continue;
            }
            signs.push(match t.sign_at(0, &sample)? {
                Ordering::Greater => SignProfile::Positive,
                Ordering::Less => SignProfile::Negative,
                Ordering::Equal => {
                    return Err(Error::precondition(format!(
                        "f^({}) vanishes at {} between its isolated zeros",
                        i + 1,
                        format_rational(&sample)
                    )))
                }
            });
        }
        pieces.push(Piece { lo: a, hi: b, signs });
    }
    Ok(SignPartition { pieces, boundaries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeLabel {
    /// `f' <= -1`
    Falling,
    /// `-1 <= f' <= 1`
    Flat,
    /// `f' >= 1`
    Rising,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopePartition {
    pub pieces: Vec<(Rational, Rational, SlopeLabel)>,
    /// `2 * zero_count_bound(r, alpha, beta + alpha - 1, 1) + 1`.
    pub budget: BigUint,
}

/// Splits `[lo, hi]` at the roots of `f' = 1` and `f' = -1`.
pub fn slope_trichotomy(f: &PfaffianFunction, lo: &Rational, hi: &Rational, cfg: &RootConfig) -> Result<SlopePartition> {
    check_interval(f, lo, hi)?;
    let df = f.derivative();
    let above = Target::new(&df.minus_constant(&Constant::one()), None, cfg.depth_cap, "f' - 1".into());
    let below = Target::new(&df.minus_constant(&Constant::int(-1)), None, cfg.depth_cap, "f' + 1".into());
    let mut tagged = Vec::new();
    let mut constant_labels = [false, false];
    for (i, t) in [&above, &below].into_iter().enumerate() {
        match t.zeros(0, lo, hi, 0, cfg)? {
            Zeros::IdenticallyZero => constant_labels[i] = true,
            Zeros::Finite(roots) => {
                for r in roots {
                    tagged.push(Tagged { root: r, orders: vec![i], target: t });
                }
            }
        }
    }
    let boundaries = merge_roots(tagged, cfg)?;
    let mut pieces: Vec<(Rational, Rational, SlopeLabel)> = Vec::new();
    for (a, b, sample) in pieces_between(lo, hi, &boundaries) {
        if a == b && !(a == *lo && b == *hi) {
            continue;
        }
        let label = if constant_labels[0] {
            SlopeLabel::Rising
        } else if constant_labels[1] {
            SlopeLabel::Falling
        } else if above.sign_at(0, &sample)? == Ordering::Greater {
            SlopeLabel::Rising
        } else if below.sign_at(0, &sample)? == Ordering::Less {
            SlopeLabel::Falling
        } else {
            SlopeLabel::Flat
        };
        match pieces.last_mut() {
            Some(last) if last.2 == label => last.1 = b,
            _ => pieces.push((a, b, label)),
        }
    }
    let r = f.order() as u64;
    let alpha = f.alpha() as u64;
    let budget = zero_count_bound(r, alpha, f.beta() as u64 + alpha - 1, 1)? * 2u32 + BigUint::one();
    Ok(SlopePartition { pieces, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfaffian::chain::{ChainKind, PfaffianChain};
    use crate::pfaffian::poly::Poly;
    use crate::rational::{int, rat};
    use std::sync::Arc;

    fn exp2() -> PfaffianFunction {
        PfaffianFunction::chain_member(Arc::new(PfaffianChain::exp2()), 1).unwrap()
    }

    fn on_exp(terms: &[(u32, u32, i64, i64)]) -> PfaffianFunction {
        let chain = Arc::new(PfaffianChain::exp());
        let mut p = Poly::zero(2);
        for &(ex, ey, n, d) in terms {
            p = p.add(&Poly::monomial(2, vec![ex, ey], Constant::rational(rat(n, d))));
        }
        PfaffianFunction::from_poly(chain, p).unwrap()
    }

    #[test]
    fn exact_and_bracketed_zeros() {
        let cfg = RootConfig::default();
        // 2^x - 8 vanishes at x = 3 exactly
        let f = exp2().minus_constant(&Constant::int(8));
        let z = isolate_zeros(&f, &int(-10), &int(10), &cfg).unwrap();
        assert_eq!(z.roots(), &[Root::Exact(int(3))]);
        // 2^x - 3 vanishes at log2(3) = 1.58496...
        let g = exp2().minus_constant(&Constant::int(3));
        let z = isolate_zeros(&g, &int(-10), &int(10), &cfg).unwrap();
        assert_eq!(z.roots().len(), 1);
        let r = z.roots()[0].enclosure();
        assert!(r.lo() <= &rat(158497, 100000) && r.hi() >= &rat(158496, 100000));
        // e^x - 1 - x has a double zero at 0
        let h = on_exp(&[(0, 1, 1, 1), (0, 0, -1, 1), (1, 0, -1, 1)]);
        let z = isolate_zeros(&h, &int(-1), &int(1), &cfg).unwrap();
        assert_eq!(z.roots(), &[Root::Exact(int(0))]);
    }

    #[test]
    fn sign_partition_examples() {
        let cfg = RootConfig::default();
        let sp = sign_partition(&exp2(), &int(-1), &int(1), 3, &cfg).unwrap();
        assert_eq!(sp.pieces.len(), 1);
        assert_eq!(sp.pieces[0].signs, vec![SignProfile::Positive; 3]);

        // f = e^x - 1 - x - x^2/2, f' = e^x - 1 - x >= 0 with a zero at 0
        let f = on_exp(&[(0, 1, 1, 1), (0, 0, -1, 1), (1, 0, -1, 1), (2, 0, -1, 2)]);
        let sp = sign_partition(&f, &int(-1), &int(1), 1, &cfg).unwrap();
        assert_eq!(sp.pieces.len(), 2);
        assert_eq!(sp.pieces[0].hi, int(0));
        assert!(sp.pieces.iter().all(|p| p.signs == vec![SignProfile::Positive]));

        // a line has f'' identically zero
        let line = on_exp(&[(1, 0, 1, 2)]);
        let sp = sign_partition(&line, &int(0), &int(1), 2, &cfg).unwrap();
        assert_eq!(sp.pieces.len(), 1);
        assert_eq!(sp.pieces[0].signs, vec![SignProfile::Positive, SignProfile::IdenticallyZero]);
    }

    #[test]
    fn slope_examples() {
        let cfg = RootConfig::default();
        let s = slope_trichotomy(&exp2(), &int(-2), &int(2), &cfg).unwrap();
        assert_eq!(s.pieces.len(), 2);
        assert_eq!(s.pieces[0].2, SlopeLabel::Flat);
        assert_eq!(s.pieces[1].2, SlopeLabel::Rising);
        // ln 2 * 2^x = 1 at x = 0.5287...
        assert!(s.pieces[0].1 > rat(528, 1000) && s.pieces[0].1 < rat(530, 1000));

        let e = on_exp(&[(0, 1, 1, 1)]);
        let s = slope_trichotomy(&e, &int(0), &int(1), &cfg).unwrap();
        assert_eq!(s.pieces, vec![(int(0), int(1), SlopeLabel::Rising)]);

        let half = on_exp(&[(1, 0, 1, 2)]);
        let s = slope_trichotomy(&half, &int(-3), &int(3), &cfg).unwrap();
        assert_eq!(s.pieces, vec![(int(-3), int(3), SlopeLabel::Flat)]);
        assert!(BigUint::from(s.pieces.len()) <= s.budget);
    }

    #[test]
    fn shifted_zeros() {
        let cfg = RootConfig::default();
        let f = PfaffianFunction::chain_member(Arc::new(PfaffianChain::new(ChainKind::ExpRate(int(1)))), 1).unwrap();
        // e^x = e at x = 1
        let e = |bits: u32| crate::interval::exp_rational(&int(1), bits);
        let z = isolate_zeros_shifted(&f, &e, &int(0), &int(2), &cfg).unwrap();
        assert_eq!(z.roots().len(), 1);
        assert!(z.roots()[0].enclosure().contains(&int(1)));
    }
}
