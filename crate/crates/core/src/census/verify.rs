//! Verification runs: census over a height schedule, slope-split covers
//! checked against the interpolation bound, and the census checked against
//! the curve's counting bound.

use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Value};

use super::{census, CensusOptions, CensusRecord, CurveKind, CurveSpec, Family, CENSUS_CSV_HEADER};
use crate::bounds::thm14_bound_enclosure;
use crate::cover::{lemma21_bound_enclosure, verify_cover, CoverReport};
use crate::error::Result;
use crate::interval::{exp_rational, ln_rational, Interval};
use crate::monomial::MonomialSet;
use crate::pfaffian::{slope_trichotomy, ChainKind, PfaffianChain, PfaffianFunction, Poly, RootConfig, SlopeLabel};
use crate::rational::{format_decimal, format_rational, HeightBound, Rational, RationalPoint};

const BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slope {
    /// `|f'| <= 1`; covered as given.
    Flat,
    /// `|f'| >= 1`; covered with coordinates swapped.
    Steep,
    /// No slope information; the whole point set as one piece.
    Whole,
}

impl Slope {
    fn as_str(self) -> &'static str {
        match self {
            Slope::Flat => "flat",
            Slope::Steep => "steep",
            Slope::Whole => "whole",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverPiece {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Slope,
    /// Length of the interval the covered coordinate ranges over.
    pub length: Rational,
    /// Points in the coordinates that were covered (swapped when steep).
    pub points: Vec<RationalPoint>,
    pub cover: CoverReport,
    /// Enclosure of the bound; `None` when its preconditions fail.
    pub bound: Option<Interval>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub value: Interval,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightReport {
    pub census: CensusRecord,
    pub pieces: Vec<CoverPiece>,
    pub bound: Option<BoundCheck>,
}

impl HeightReport {
    pub fn cover_size(&self) -> usize {
        self.pieces.iter().map(|p| p.cover.blocks.len()).sum()
    }

    pub fn pass(&self) -> bool {
        self.pieces.iter().all(|p| p.pass) && self.bound.as_ref().is_none_or(|b| b.pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationBundle {
    pub spec: CurveSpec,
    pub monomials: MonomialSet,
    pub heights: Vec<HeightReport>,
}

fn interval_json(i: &Interval) -> Value {
    json!([format_decimal(i.lo(), 8, false), format_decimal(i.hi(), 8, true)])
}

impl VerificationBundle {
    pub fn pass(&self) -> bool {
        self.heights.iter().all(HeightReport::pass)
    }

    /// Deterministic JSON (no timing).
    pub fn to_json(&self) -> Value {
        let heights: Vec<Value> = self
            .heights
            .iter()
            .map(|r| {
                let pieces: Vec<Value> = r
                    .pieces
                    .iter()
                    .map(|p| {
                        json!({
                            "interval": [format_rational(&p.lo), format_rational(&p.hi)],
                            "slope": p.slope.as_str(),
                            "L": format_rational(&p.length),
                            "cover": p.cover.to_json(&p.points),
                            "lemma_bound": p.bound.as_ref().map(interval_json),
                            "pass": p.pass,
                        })
                    })
                    .collect();
                json!({
                    "census": r.census.to_json(),
                    "pieces": pieces,
                    "cover_size": r.cover_size(),
                    "bound": r.bound.as_ref().map(|b| json!({
                        "name": b.name,
                        "value": interval_json(&b.value),
                        "pass": b.pass,
                    })),
                    "pass": r.pass(),
                })
            })
            .collect();
        json!({
            "curve": self.spec.to_json(),
            "M": self.monomials.to_json(),
            "heights": heights,
            "pass": self.pass(),
        })
    }

    pub fn census_csv(&self) -> String {
        let mut s = String::from(CENSUS_CSV_HEADER);
        s.push('\n');
        for r in &self.heights {
            s.push_str(&super::census_csv_row(&r.census));
            s.push('\n');
        }
        s
    }

    /// `H,N,bound` with the bound's upper value.
    pub fn plot_csv(&self) -> String {
        let mut s = String::from("H,N,bound\n");
        for r in &self.heights {
            let b = r.bound.as_ref().map(|b| format_decimal(b.value.hi(), 8, true)).unwrap_or_default();
            s.push_str(&format!("{},{},{}\n", r.census.h, r.census.n, b));
        }
        s
    }

    /// Writes `census.csv`, `bundle.json` and `plot.csv` into `dir`.
    pub fn write(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("census.csv"), self.census_csv())?;
        let mut json = serde_json::to_string_pretty(&self.to_json())?;
        json.push('\n');
        std::fs::write(dir.join("bundle.json"), json)?;
        std::fs::write(dir.join("plot.csv"), self.plot_csv())?;
        Ok(())
    }
}

/// `exp(5 sqrt(ln H))`.
fn exp5sqrtlog(h: u64) -> Interval {
    let l = ln_rational(&Rational::from_integer(h.into()), BITS);
    let s = l.sqrt(BITS).expect("ln H >= 0").scale(&Rational::from_integer(5.into()));
    Interval::new(exp_rational(s.lo(), BITS).lo().clone(), exp_rational(s.hi(), BITS).hi().clone())
}

/// The function whose graph the spec describes, when slope splitting applies.
fn graph_function(spec: &CurveSpec) -> Option<PfaffianFunction> {
    let kind = match &spec.kind {
        CurveKind::PfaffNumeric(f) => return Some(f.clone()),
        CurveKind::PfaffExact(Family::Exp) => ChainKind::ExpRate(Rational::from_integer(1.into())),
        CurveKind::PfaffExact(Family::Pow(q)) => ChainKind::Pow(q.clone()),
        _ => return None,
    };
    PfaffianFunction::from_poly(Arc::new(PfaffianChain::new(kind)), Poly::var(2, 1)).ok()
}

fn swapped_set(m: &MonomialSet) -> Result<MonomialSet> {
    MonomialSet::new(m.exponents().iter().map(|&(h, k)| (k, h)).collect())
}

fn hull<'a>(v: impl Iterator<Item = &'a Rational>) -> Option<(Rational, Rational)> {
    let mut it = v.peekable();
    let first = it.peek()?.to_owned().clone();
    Some(it.fold((first.clone(), first), |(lo, hi), q| (lo.min(q.clone()), hi.max(q.clone()))))
}

fn cover_piece(lo: Rational, hi: Rational, slope: Slope, points: Vec<RationalPoint>, m: &MonomialSet, h: HeightBound) -> Result<CoverPiece> {
    let min_len = {
        let hq = Rational::from_integer(h.get().into());
        (&hq * &hq).recip()
    };
    let (a, b) = hull(points.iter().map(|p| &p.x)).unwrap_or((Rational::from_integer(0.into()), Rational::from_integer(0.into())));
    let length = (b - a).max(min_len);
    let l = Interval::point(length.clone());
    match lemma21_bound_enclosure(m, &l, h) {
        Ok(bound) => {
            let (pass, cover) = verify_cover(&points, m, &l, h)?;
            Ok(CoverPiece { lo, hi, slope, length, points, cover, bound: Some(bound), pass })
        }
        Err(_) => {
            let mut cover = crate::cover::block_cover(&points, m)?;
            cover.h = h.get();
            Ok(CoverPiece { lo, hi, slope, length, points, cover, bound: None, pass: false })
        }
    }
}

/// Covers the certified points: split by slope where the curve is a graph
/// with computable derivative, else as one piece. The length used for each
/// piece is the extent of its points in the covered coordinate.
fn cover_pieces(spec: &CurveSpec, points: &[RationalPoint], m: &MonomialSet, h: HeightBound) -> Result<Vec<CoverPiece>> {
    let Some((lo, hi)) = hull(points.iter().map(|p| &p.x)) else {
        return Ok(Vec::new());
    };
    let f = match graph_function(spec) {
        Some(f) if lo < hi => f,
        _ => return Ok(vec![cover_piece(lo, hi, Slope::Whole, points.to_vec(), m, h)?]),
    };
    let partition = slope_trichotomy(&f, &lo, &hi, &RootConfig::default())?;
    let swapped = swapped_set(m)?;
    let mut out = Vec::new();
    let mut taken = vec![false; points.len()];
    for (a, b, label) in partition.pieces {
        let mut mine = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if !taken[i] && p.x >= a && p.x <= b {
                taken[i] = true;
                mine.push(p.clone());
            }
        }
        if mine.is_empty() {
            continue;
        }
        let piece = match label {
            SlopeLabel::Flat => cover_piece(a, b, Slope::Flat, mine, m, h)?,
            SlopeLabel::Rising | SlopeLabel::Falling => {
                let mut sw: Vec<RationalPoint> = mine.iter().map(RationalPoint::swapped).collect();
                sw.sort();
                cover_piece(a, b, Slope::Steep, sw, &swapped, h)?
            }
        };
        out.push(piece);
    }
    // points in gaps between bracketed boundaries
    let rest: Vec<RationalPoint> = points.iter().zip(&taken).filter(|(_, t)| !**t).map(|(p, _)| p.clone()).collect();
    if let Some((a, b)) = hull(rest.iter().map(|p| &p.x)) {
        out.push(cover_piece(a, b, Slope::Whole, rest, m, h)?);
    }
    Ok(out)
}

/// The counting bound a curve's census is checked against: `thm14` with
/// `b, c >= 2` for algebraic curves, `exp(5 sqrt(ln H))` otherwise. `None`
/// below `H = 3`.
pub fn default_bound(spec: &CurveSpec, h: HeightBound) -> Result<Option<(String, Interval)>> {
    if h.get() < 3 {
        return Ok(None);
    }
    Ok(Some(match &spec.kind {
        CurveKind::Algebraic(f) => {
            let (s, t) = f.bidegree();
            let (b, c) = (u64::from(s).max(2), u64::from(t).max(2));
            (format!("thm14:{b}:{c}"), thm14_bound_enclosure(b, c, &BigUint::from(h.get()))?)
        }
        _ => ("exp5sqrtlog".to_string(), exp5sqrtlog(h.get())),
    }))
}

fn bound_check(spec: &CurveSpec, rec: &CensusRecord, h: HeightBound) -> Result<Option<BoundCheck>> {
    let Some((name, value)) = default_bound(spec, h)? else {
        return Ok(None);
    };
    let count = rec.n + rec.candidates.len() as u64;
    let pass = rec.vertical.is_empty() && Rational::from_integer(count.into()) <= *value.lo();
    Ok(Some(BoundCheck { name, value, pass }))
}

/// Census, cover and bound checks for each height of `schedule`.
pub fn run_verification(spec: &CurveSpec, schedule: &[HeightBound], m: &MonomialSet, opts: &CensusOptions) -> Result<VerificationBundle> {
    let opts = CensusOptions { keep_points: true, ..opts.clone() };
    let mut heights = Vec::new();
    for &h in schedule {
        let rec = census(spec, h, &opts)?;
        let points = rec.points.clone().unwrap_or_default();
        let pieces = cover_pieces(spec, &points, m, h)?;
        let bound = bound_check(spec, &rec, h)?;
        heights.push(HeightReport { census: rec, pieces, bound });
    }
    Ok(VerificationBundle { spec: spec.clone(), monomials: m.clone(), heights })
}
