//! Covers of rational points by curves defined in a monomial set, the
//! Lemma 2.1 bound, and the derivative-threshold subdivision behind it.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::{exp_rational, ln_rational, pow_rational, Interval};
use crate::monomial::{monomial_row, MonomialSet, PlaneCurve};
use crate::pfaffian::{isolate_zeros_shifted, slope_trichotomy, PfaffianFunction, RootConfig, SlopeLabel};
use crate::rational::{format_decimal, format_rational, simplest_in_open, HeightBound, Rational, RationalPoint};

/// Rank of a rational matrix and, when it is rank deficient, a kernel vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    /// Primitive integer vector, first nonzero entry positive.
    pub kernel: Option<Vec<BigInt>>,
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[Vec<Rational>]) -> Result<RankResult> {
    let width = match rows.first() {
        Some(r) => r.len(),
        None => return Ok(RankResult { rank: 0, kernel: None }),
    };
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::precondition("rows of unequal length"));
    }
    // clear denominators row by row
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            r.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let n = a.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..width {
        if row == n {
            break;
        }
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for i in row + 1..n {
            for j in col + 1..width {
                let v = (&a[row][col] * &a[i][j] - &a[i][col] * &a[row][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    if rank == width {
        return Ok(RankResult { rank, kernel: None });
    }
    let free = (0..width).find(|c| !pivots.contains(c)).expect("rank < width");
    // back substitution over the rationals on the echelon rows
    let mut x: Vec<Rational> = vec![Rational::zero(); width];
    x[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut s = Rational::zero();
        for (j, xj) in x.iter().enumerate().skip(pc + 1) {
            if !xj.is_zero() {
                s += Rational::from_integer(a[r][j].clone()) * xj;
            }
        }
        x[pc] = -s / Rational::from_integer(a[r][pc].clone());
    }
    Ok(RankResult { rank, kernel: Some(primitive_integer(&x)) })
}

fn primitive_integer(x: &[Rational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut v: Vec<BigInt> = x.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    if v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -c.clone();
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Indices into the input point list.
    pub points: Vec<usize>,
    pub curve: PlaneCurve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub blocks: Vec<Block>,
    pub monomials: MonomialSet,
    pub h: u64,
    /// Certified upper value of the Lemma 2.1 bound when one was computed.
    pub bound: Option<Rational>,
}

impl CoverReport {
    pub fn to_json(&self, points: &[RationalPoint]) -> Value {
        json!({
            "M": self.monomials.to_json(),
            "H": self.h,
            "bound": self.bound.as_ref().map(|b| format_decimal(b, 6, true)),
            "blocks": self.blocks.iter().map(|b| json!({
                "points": b.points.iter().map(|&i| points[i].to_string()).collect::<Vec<_>>(),
                "curve": b.curve.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Incremental row space in reduced form.
struct RowSpace {
    basis: Vec<(usize, Vec<Rational>)>, // (pivot column, row with 1 at pivot)
}

impl RowSpace {
    fn new() -> Self {
        RowSpace { basis: Vec::new() }
    }

    fn reduce(&self, row: &[Rational]) -> Vec<Rational> {
        let mut r = row.to_vec();
        for (pc, b) in &self.basis {
            if r[*pc].is_zero() {
                continue;
            }
            let f = r[*pc].clone();
            for (x, y) in r.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r
    }

    fn insert(&mut self, reduced: Vec<Rational>) {
        let pc = reduced.iter().position(|q| !q.is_zero()).expect("nonzero row");
        let inv = reduced[pc].recip();
        let r: Vec<Rational> = reduced.into_iter().map(|q| q * &inv).collect();
        for (_, b) in self.basis.iter_mut() {
            if !b[pc].is_zero() {
                let f = b[pc].clone();
                for (x, y) in b.iter_mut().zip(&r) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.basis.push((pc, r));
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn kernel_curve(m: &MonomialSet, rows: &[Vec<Rational>]) -> Result<PlaneCurve> {
    let res = exact_rank(rows)?;
    let k = res
        .kernel
        .ok_or_else(|| Error::precondition("block has full rank; no curve in M passes through it"))?;
    let v: Vec<Rational> = k.into_iter().map(Rational::from_integer).collect();
    PlaneCurve::from_vector(m.clone(), &v)
}

/// Greedy sweep over x-sorted points: a block grows while its monomial rows
/// have rank at most `D - 1`, and is closed by a kernel curve otherwise.
pub fn block_cover(points: &[RationalPoint], m: &MonomialSet) -> Result<CoverReport> {
    let d = m.len();
    if d < 2 {
        return Err(Error::precondition("block_cover needs D >= 2"));
    }
    for w in points.windows(2) {
        if w[0].cmp(&w[1]) != Ordering::Less {
            return Err(Error::precondition(format!(
                "points must be distinct and sorted by x then y ({} precedes {})",
                w[0], w[1]
            )));
        }
    }
    let mut blocks = Vec::new();
    let mut space = RowSpace::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut idx: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let row = monomial_row(m, p);
        let reduced = space.reduce(&row);
        let independent = reduced.iter().any(|q| !q.is_zero());
        if independent && space.rank() == d - 1 {
            blocks.push(Block { points: std::mem::take(&mut idx), curve: kernel_curve(m, &rows)? });
            rows.clear();
            space = RowSpace::new();
            let fresh = space.reduce(&row);
            space.insert(fresh);
        } else if independent {
            space.insert(reduced);
        }
        rows.push(row);
        idx.push(i);
    }
    if !idx.is_empty() {
        blocks.push(Block { points: idx, curve: kernel_curve(m, &rows)? });
    }
    let h = points
        .iter()
        .map(|p| crate::rational::point_height(p).to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(1);
    Ok(CoverReport { blocks, monomials: m.clone(), h, bound: None })
}

/// True iff every block's curve vanishes exactly on each of its points.
pub fn cover_is_sound(points: &[RationalPoint], report: &CoverReport) -> bool {
    report
        .blocks
        .iter()
        .all(|b| b.points.iter().all(|&i| b.curve.evaluate(&points[i]).is_zero()))
}

fn lemma21_check(m: &MonomialSet, l_lo: &Rational, h: HeightBound) -> Result<()> {
    let p = m.parameters();
    if p.d < 2 {
        return Err(Error::precondition(format!("D >= 2 fails: D = {}", p.d)));
    }
    if p.big_s < 2 * p.r {
        return Err(Error::precondition(format!("S >= 2R fails: S = {}, 2R = {}", p.big_s, 2 * p.r)));
    }
    let hq = Rational::from_integer(h.get().into());
    if l_lo < &(&hq * &hq).recip() {
        return Err(Error::precondition(format!(
            "L >= 1/H^2 fails: L = {}, 1/H^2 = 1/{}",
            format_rational(l_lo),
            h.get() * h.get()
        )));
    }
    Ok(())
}

const BOUND_BITS: u32 = 64;

/// Enclosure of `(4 C D 4^{1/rho} + 2) L^rho H^sigma` for `L` in an interval.
/// The lower end uses the lower end of `C`, so it is a valid lower value of
/// the bound for the true `C` as well.
pub fn lemma21_bound_enclosure(m: &MonomialSet, l: &Interval, h: HeightBound) -> Result<Interval> {
    lemma21_check(m, l.lo(), h)?;
    let p = m.parameters();
    let rho = p.rho.clone().expect("D >= 2");
    let sigma = p.sigma.clone().expect("D >= 2");
    let c = p.c_bounds.clone().expect("D >= 2");
    let four = Rational::from_integer(4.into());
    let four_root = pow_rational(&four, &rho.recip(), BOUND_BITS);
    let prefactor = c
        .mul(&four_root)
        .scale(&Rational::from_integer(BigInt::from(4 * p.d)))
        .add(&Interval::from_int(2));
    let l_rho = Interval::new(
        pow_rational(l.lo(), &rho, BOUND_BITS).lo().clone(),
        pow_rational(l.hi(), &rho, BOUND_BITS).hi().clone(),
    );
    let h_sigma = pow_rational(&Rational::from_integer(h.get().into()), &sigma, BOUND_BITS);
    Ok(prefactor.mul(&l_rho).mul(&h_sigma).round_out(BOUND_BITS))
}

/// Certified upper value of the Lemma 2.1 bound.
pub fn lemma21_bound(m: &MonomialSet, l: &Rational, h: HeightBound) -> Result<Rational> {
    Ok(lemma21_bound_enclosure(m, &Interval::point(l.clone()), h)?.hi().clone())
}

/// Cover the points and compare the block count with the bound. The
/// comparison uses the lower end of the bound's enclosure, so `true` is
/// certified.
pub fn verify_cover(points: &[RationalPoint], m: &MonomialSet, l: &Interval, h: HeightBound) -> Result<(bool, CoverReport)> {
    let mut report = block_cover(points, m)?;
    report.h = h.get();
    let bound = lemma21_bound_enclosure(m, l, h)?;
    let ok = Rational::from_integer(report.blocks.len().into()) <= *bound.lo() && cover_is_sound(points, &report);
    report.bound = Some(bound.hi().clone());
    Ok((ok, report))
}

/// Access to the derivatives of a function on an interval.
pub trait DerivativeOracle {
    /// Enclosure of `f^(k)(x)` at working precision `bits`.
    fn derivative_at(&self, k: usize, x: &Rational, bits: u32) -> Interval;

    /// Points of `(lo, hi)` where `f^(k)` crosses `level` or `-level`,
    /// ascending; each as a small enclosure.
    fn crossings(&self, k: usize, level: &(dyn Fn(u32) -> Interval + Sync), lo: &Rational, hi: &Rational) -> Result<Vec<Interval>>;

    /// Whether `|f'| <= 1` holds on `[lo, hi]`.
    fn slope_at_most_one(&self, lo: &Rational, hi: &Rational) -> Result<bool>;
}

impl DerivativeOracle for PfaffianFunction {
    fn derivative_at(&self, k: usize, x: &Rational, bits: u32) -> Interval {
        self.nth_derivative(k).enclose_at(x, bits)
    }

    fn crossings(&self, k: usize, level: &(dyn Fn(u32) -> Interval + Sync), lo: &Rational, hi: &Rational) -> Result<Vec<Interval>> {
        let cfg = RootConfig::default();
        let g = self.nth_derivative(k);
        let neg = |bits: u32| level(bits).neg();
        let mut out = Vec::new();
        for shift in [level, &neg as &(dyn Fn(u32) -> Interval + Sync)] {
            for r in isolate_zeros_shifted(&g, shift, lo, hi, &cfg)?.roots() {
                out.push(r.enclosure());
            }
        }
        out.sort_by(|a, b| a.lo().cmp(b.lo()));
        Ok(out)
    }

    fn slope_at_most_one(&self, lo: &Rational, hi: &Rational) -> Result<bool> {
        let d = self.derivative();
        let r = d.range(lo, hi, 96, Some(&d.derivative()));
        if r.lo() >= &-Rational::one() && r.hi() <= &Rational::one() {
            return Ok(true);
        }
        let s = slope_trichotomy(self, lo, hi, &RootConfig::default())?;
        Ok(s.pieces.len() == 1 && s.pieces[0].2 == SlopeLabel::Flat)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Split into the listed children.
    Split,
    /// `|f^(k)| <= k! A^{k/(D-1)} L^{1-k}` for every `k = 2..D`.
    SmallDerivative,
    /// Shorter than `1/H^2`.
    TerminalShort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionNode {
    pub lo: Rational,
    pub hi: Rational,
    pub depth: u32,
    pub kind: NodeKind,
    pub children: Vec<usize>,
    /// Length of the interval whose thresholds produced this node.
    pub scale: Rational,
}

#[derive(Clone, Debug)]
pub struct SubdivisionTree {
    pub nodes: Vec<SubdivisionNode>,
    /// `A^{1/(D-1)} = 2 D 4^{1/rho}`.
    pub a_root: Interval,
    /// `lambda = 2 D A^{-1/(D-1)} = 4^{-1/rho}`.
    pub lambda: Interval,
    /// Least `n` with `lambda^n < 1/(L H^2)`.
    pub n: u32,
    pub d: usize,
    /// Which threshold family ran.
    pub variant: &'static str,
    /// Certified upper value of the Lemma 2.1 bound for the root interval.
    pub leaf_budget: Rational,
}

pub const THRESHOLD_VARIANT: &str = "k! A^(k/(D-1)) L^(1-k) for k = 2..D";

impl SubdivisionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &SubdivisionNode> {
        self.nodes.iter().filter(|n| n.kind != NodeKind::Split)
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Enclosure of the threshold `k! A^{k/(D-1)} L^{1-k}`.
    pub fn threshold(&self, k: usize, l: &Rational, bits: u32) -> Interval {
        threshold(&self.a_root, k, l, bits)
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn threshold(a_root: &Interval, k: usize, l: &Rational, bits: u32) -> Interval {
    let kf = Rational::from_integer(factorial(k));
    let lp = num_traits::pow(l.clone(), k - 1).recip();
    a_root.pow(k as u32).scale(&(kf * lp)).round_out(bits)
}

fn a_root_enclosure(d: usize, rho: &Rational, bits: u32) -> Interval {
    let four = Rational::from_integer(4.into());
    pow_rational(&four, &rho.recip(), bits).scale(&Rational::from_integer(BigInt::from(2 * d)))
}

/// Least `n` with `lambda^n < 1/(L H^2)`, i.e. `n > rho ln(L H^2) / ln 4`.
fn depth_bound(rho: &Rational, l: &Rational, h: HeightBound) -> u32 {
    let hq = Rational::from_integer(h.get().into());
    let target = l * &hq * &hq;
    let mut bits = 64;
    loop {
        let t = ln_rational(&target, bits)
            .scale(rho)
            .mul(&ln_rational(&Rational::from_integer(4.into()), bits).recip().expect("ln 4 > 0"));
        let lo = t.lo().floor();
        if t.hi() < &(&lo + Rational::one()) && &lo != t.lo() {
            return lo.to_integer().to_u32().unwrap_or(u32::MAX) + 1;
        }
        if t.is_point() {
            // exact integer: lambda^t equals the target, so one more step
            return t.lo().to_integer().to_u32().unwrap_or(u32::MAX) + 1;
        }
        bits *= 2;
        if bits > 4096 {
            return t.hi().ceil().to_integer().to_u32().unwrap_or(u32::MAX) + 1;
        }
    }
}

/// Splits `[lo, hi]` where some `f^(k)`, `k = 2..D`, crosses its threshold,
/// keeping pieces on which every derivative is small as leaves and
/// re-entering the others, until pieces are shorter than `1/H^2`.
pub fn threshold_subdivision(
    f: &dyn DerivativeOracle,
    lo: &Rational,
    hi: &Rational,
    m: &MonomialSet,
    h: HeightBound,
) -> Result<SubdivisionTree> {
    if lo >= hi {
        return Err(Error::precondition("threshold_subdivision needs lo < hi"));
    }
    let l = hi - lo;
    lemma21_check(m, &l, h)?;
    if !f.slope_at_most_one(lo, hi)? {
        return Err(Error::precondition("|f'| <= 1 fails on the interval"));
    }
    let p = m.parameters();
    let d = p.d as usize;
    let rho = p.rho.clone().expect("D >= 2");
    let a_root = a_root_enclosure(d, &rho, BOUND_BITS);
    let four = Rational::from_integer(4.into());
    let lambda = pow_rational(&four, &(-rho.recip()), BOUND_BITS);
    let n = depth_bound(&rho, &l, h);
    let hq = Rational::from_integer(h.get().into());
    let short = (&hq * &hq).recip();
    let leaf_budget = lemma21_bound(m, &l, h)?;

    let mut tree = SubdivisionTree {
        nodes: Vec::new(),
        a_root,
        lambda,
        n,
        d,
        variant: THRESHOLD_VARIANT,
        leaf_budget,
    };
    tree.nodes.push(SubdivisionNode {
        lo: lo.clone(),
        hi: hi.clone(),
        depth: 0,
        kind: NodeKind::Split,
        children: Vec::new(),
        scale: l.clone(),
    });
    let mut queue = vec![0usize];
    while let Some(id) = queue.pop() {
        let (nlo, nhi, depth) = {
            let node = &tree.nodes[id];
            (node.lo.clone(), node.hi.clone(), node.depth)
        };
        let len = &nhi - &nlo;
        if len < short {
            tree.nodes[id].kind = NodeKind::TerminalShort;
            continue;
        }
        let mut cuts: Vec<Rational> = Vec::new();
        for k in 2..=d {
            let a = tree.a_root.clone();
            let lvl = len.clone();
            let level = move |bits: u32| threshold(&a, k, &lvl, bits);
            for c in f.crossings(k, &level, &nlo, &nhi)? {
                let rep = c.midpoint();
                if rep > nlo && rep < nhi {
                    cuts.push(rep);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut bounds = vec![nlo.clone()];
        bounds.extend(cuts);
        bounds.push(nhi.clone());
        let small_test = |a: &Rational, b: &Rational| -> Result<bool> {
            let sample = simplest_in_open(&(a + (b - a) / Rational::from_integer(4.into())), &(b - (b - a) / Rational::from_integer(4.into())))
                .unwrap_or_else(|| (a + b) / Rational::from_integer(2.into()));
            for k in 2..=d {
                let t = threshold(&tree.a_root, k, &len, 96);
                let v = f.derivative_at(k, &sample, 96).abs();
                match v.hi().cmp(t.lo()) {
                    Ordering::Less | Ordering::Equal => {}
                    Ordering::Greater => {
                        if v.lo() > t.hi() {
                            return Ok(false);
                        }
                        // undecided at this precision: treat as large; the
                        // piece is then re-examined with its own thresholds
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        };
        if bounds.len() == 2 && small_test(&nlo, &nhi)? {
            tree.nodes[id].kind = NodeKind::SmallDerivative;
            tree.nodes[id].scale = len.clone();
            continue;
        }
        let mut children = Vec::new();
        for w in bounds.windows(2) {
            let kind_small = small_test(&w[0], &w[1])?;
            let child = SubdivisionNode {
                lo: w[0].clone(),
                hi: w[1].clone(),
                depth: depth + 1,
                kind: if kind_small { NodeKind::SmallDerivative } else { NodeKind::Split },
                children: Vec::new(),
                scale: len.clone(),
            };
            let cid = tree.nodes.len();
            tree.nodes.push(child);
            children.push(cid);
            if !kind_small {
                queue.push(cid);
            }
        }
        if bounds.len() == 2 {
            // the whole node is large but has no crossing: it shrinks only
            // through its own re-entry, which would not terminate
            return Err(Error::precondition(format!(
                "derivative exceeds its threshold on all of [{}, {}]",
                format_rational(&nlo),
                format_rational(&nhi)
            )));
        }
        tree.nodes[id].children = children;
    }
    Ok(tree)
}

/// A-posteriori check of a small-derivative leaf at `samples` interior
/// points: `|f^(k)| <= k! A^{k/(D-1)} L^{1-k}` for `k = 2..D`.
pub fn audit_leaf(f: &dyn DerivativeOracle, tree: &SubdivisionTree, leaf: &SubdivisionNode, samples: usize) -> bool {
    let w = &leaf.hi - &leaf.lo;
    (0..samples).all(|i| {
        let x = &leaf.lo + &w * Rational::new(BigInt::from(2 * i + 1), BigInt::from(2 * samples));
        (2..=tree.d).all(|k| {
            let t = tree.threshold(k, &leaf.scale, 128);
            let v = f.derivative_at(k, &x, 128).abs();
            v.hi() <= t.hi() && v.lo() <= t.lo()
        })
    })
}

/// `lambda^n < 1/(L H^2) <= lambda^(n-1)`, checked on enclosures.
pub fn depth_identity_holds(tree: &SubdivisionTree, l: &Rational, h: HeightBound) -> bool {
    let hq = Rational::from_integer(h.get().into());
    let target = (l * &hq * &hq).recip();
    let upper = tree.lambda.pow(tree.n);
    let lower = tree.lambda.pow(tree.n.saturating_sub(1));
    upper.hi() < &target && lower.hi() >= &target
}

/// `2 lambda^rho = 1/2` on enclosures.
pub fn lambda_identity_holds(tree: &SubdivisionTree, rho: &Rational) -> bool {
    let ln_lambda = Interval::new(
        ln_rational(tree.lambda.lo(), 96).lo().clone(),
        ln_rational(tree.lambda.hi(), 96).hi().clone(),
    );
    let lr = ln_lambda.scale(rho);
    let v = Interval::new(exp_rational(lr.lo(), 96).lo().clone(), exp_rational(lr.hi(), 96).hi().clone())
        .scale(&Rational::from_integer(2.into()));
    v.contains(&Rational::new(BigInt::one(), BigInt::from(2))) && v.narrower_than(40)
}
