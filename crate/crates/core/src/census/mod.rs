//! Censuses of rational points of bounded height on curves, and the
//! verification runs that compare them with covers and bounds.

mod algebraic;
mod numeric;
mod registry;
mod verify;

use std::time::Instant;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::monomial::PlaneCurve;
use crate::pfaffian::PfaffianFunction;
use crate::rational::{format_rational, parse_rational, HeightBound, Rational, RationalPoint};

pub use algebraic::{census_algebraic, integer_roots_sturm, RootMethod, DEFAULT_DIVISOR_CAP};
pub use numeric::{census_pfaff_numeric, NumericOutcome};
pub use registry::{census_pfaff_exact, Family};
pub use verify::{default_bound, run_verification, BoundCheck, CoverPiece, HeightReport, Slope, VerificationBundle};

/// How work is spread over threads. `Threads(n)` needs the `parallel`
/// feature; without it every run is sequential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Threads(usize),
}

impl Parallelism {
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(jobs)
        }
    }

    /// Maps `f` over `items`, keeping input order.
    pub fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            Parallelism::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Parallelism::Threads(n) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(*n).build() {
                    Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
                    Err(_) => items.into_iter().map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            Parallelism::Threads(_) => items.into_iter().map(f).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub parallelism: Parallelism,
    pub root_method: RootMethod,
    /// Starting precision of the numeric path, doubled up to `max_bits`.
    pub precision: u32,
    pub max_bits: u32,
    /// Keep the point list in the record.
    pub keep_points: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            parallelism: Parallelism::Sequential,
            root_method: RootMethod::Divisors { cap: DEFAULT_DIVISOR_CAP },
            precision: 64,
            max_bits: 1024,
            keep_points: true,
        }
    }
}

/// Optional closed restriction on `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Domain {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Domain {
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| x >= l) && self.hi.as_ref().is_none_or(|h| x <= h)
    }

    /// `[lo, hi]` intersected with `[-H, H]`.
    pub fn clip(&self, h: HeightBound) -> (Rational, Rational) {
        let hq = Rational::from_integer(h.get().into());
        let lo = match &self.lo {
            Some(l) if *l > -hq.clone() => l.clone(),
            _ => -hq.clone(),
        };
        let hi = match &self.hi {
            Some(u) if *u < hq => u.clone(),
            _ => hq,
        };
        (lo, hi)
    }

    fn to_json(&self) -> Value {
        let end = |e: &Option<Rational>| e.as_ref().map(|q| json!(format_rational(q))).unwrap_or(Value::Null);
        json!([end(&self.lo), end(&self.hi)])
    }

    fn from_json(v: Option<&Value>) -> Result<Domain> {
        let Some(v) = v else {
            return Ok(Domain::default());
        };
        let ends = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::parse("domain", "expected [lo, hi]"))?;
        let end = |e: &Value| -> Result<Option<Rational>> {
            match e {
                Value::Null => Ok(None),
                Value::String(s) if s == "-inf" || s == "inf" => Ok(None),
                Value::String(s) => parse_rational(s).map(Some).map_err(|_| Error::parse("domain", format!("bad endpoint `{s}`"))),
                Value::Number(n) => parse_rational(&n.to_string())
                    .map(Some)
                    .map_err(|_| Error::parse("domain", format!("bad endpoint `{n}`"))),
                _ => Err(Error::parse("domain", "endpoints must be \"p/q\" strings or null")),
            }
        };
        let d = Domain { lo: end(&ends[0])?, hi: end(&ends[1])? };
        if let (Some(l), Some(h)) = (&d.lo, &d.hi) {
            if l > h {
                return Err(Error::parse("domain", "lower end exceeds upper end"));
            }
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveKind {
    Algebraic(PlaneCurve),
    PfaffExact(Family),
    PfaffNumeric(PfaffianFunction),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub id: String,
    pub kind: CurveKind,
    pub domain: Domain,
    /// Caller's assertion for algebraic curves; recorded, not checked.
    pub irreducible: bool,
}

impl CurveSpec {
    pub fn new(id: impl Into<String>, kind: CurveKind) -> Self {
        CurveSpec { id: id.into(), kind, domain: Domain::default(), irreducible: true }
    }

    pub fn with_domain(mut self, lo: Option<Rational>, hi: Option<Rational>) -> Self {
        self.domain = Domain { lo, hi };
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = match &self.kind {
            CurveKind::Algebraic(f) => json!({"kind": "algebraic", "curve": f.to_json(), "irreducible": self.irreducible}),
            CurveKind::PfaffExact(fam) => {
                let mut v = json!({"kind": "pfaff-exact"});
                for (k, val) in fam.to_json_fields() {
                    v[k] = val;
                }
                v
            }
            CurveKind::PfaffNumeric(f) => json!({"kind": "pfaff-numeric", "function": f.to_json()}),
        };
        v["id"] = json!(self.id);
        if self.domain != Domain::default() {
            v["domain"] = self.domain.to_json();
        }
        v
    }

    /// Reads a curve spec; `default_id` is used when the JSON has no `id`.
    pub fn from_json(v: &Value, default_id: &str) -> Result<CurveSpec> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("kind", "expected \"algebraic\", \"pfaff-exact\" or \"pfaff-numeric\""))?;
        let id = match v.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::parse("id", "must be a string")),
            None => default_id.to_string(),
        };
        let domain = Domain::from_json(v.get("domain"))?;
        let mut irreducible = true;
        let kind = match kind {
            "algebraic" => {
                let c = v.get("curve").ok_or_else(|| Error::parse("curve", "missing plane curve"))?;
                if let Some(i) = v.get("irreducible") {
                    irreducible = i.as_bool().ok_or_else(|| Error::parse("irreducible", "must be true or false"))?;
                }
                let f = PlaneCurve::from_json(c)?;
                if f.coeffs().values().all(|c| c == &Rational::from_integer(0.into())) {
                    return Err(Error::parse("curve", "the zero polynomial defines no curve"));
                }
                CurveKind::Algebraic(f)
            }
            "pfaff-exact" => CurveKind::PfaffExact(Family::from_json(v)?),
            "pfaff-numeric" => {
                let f = v.get("function").ok_or_else(|| Error::parse("function", "missing Pfaffian function"))?;
                CurveKind::PfaffNumeric(PfaffianFunction::from_json(f)?)
            }
            other => return Err(Error::parse("kind", format!("unknown kind `{other}`"))),
        };
        Ok(CurveSpec { id, kind, domain, irreducible })
    }

    pub fn load(path: &std::path::Path) -> Result<CurveSpec> {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
        CurveSpec::from_json(&v, stem)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusStatus {
    Exact,
    LowerBoundWithCandidates,
}

impl CensusStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CensusStatus::Exact => "exact",
            CensusStatus::LowerBoundWithCandidates => "lower-bound-with-candidates",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRecord {
    pub curve_id: String,
    pub h: u64,
    /// Certified count; vertical fibers contribute their full size.
    pub n: u64,
    pub status: CensusStatus,
    /// Sorted by `(x, y)`; excludes vertical fibers.
    pub points: Option<Vec<RationalPoint>>,
    /// `x` values whose whole fiber lies on the curve.
    pub vertical: Vec<Rational>,
    /// Numeric path: points that could be neither certified nor excluded.
    pub candidates: Vec<RationalPoint>,
    /// Numeric path: `x` values at which the precision policy ran out.
    pub exhausted: Vec<Rational>,
    pub seconds: f64,
}

impl CensusRecord {
    /// Deterministic JSON (no timing).
    pub fn to_json(&self) -> Value {
        let pts = |v: &[RationalPoint]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        let mut v = json!({
            "curve_id": self.curve_id,
            "H": self.h,
            "N": self.n,
            "status": self.status.as_str(),
            "candidates": pts(&self.candidates),
            "precision_exhausted": self.exhausted.iter().map(format_rational).collect::<Vec<_>>(),
        });
        if let Some(p) = &self.points {
            v["points"] = json!(pts(p));
        }
        if !self.vertical.is_empty() {
            v["vertical_fibers"] = json!(self.vertical.iter().map(format_rational).collect::<Vec<_>>());
        }
        v
    }
}

/// Census of one curve at one height.
pub fn census(spec: &CurveSpec, h: HeightBound, opts: &CensusOptions) -> Result<CensusRecord> {
    let start = Instant::now();
    let mut rec = match &spec.kind {
        CurveKind::Algebraic(f) => census_algebraic(f, h, &spec.domain, opts)?,
        CurveKind::PfaffExact(fam) => census_pfaff_exact(fam, h, &spec.domain)?,
        CurveKind::PfaffNumeric(f) => census_pfaff_numeric(f, h, &spec.domain, opts)?.record,
    };
    rec.curve_id = spec.id.clone();
    rec.seconds = start.elapsed().as_secs_f64();
    if !opts.keep_points {
        rec.points = None;
    }
    Ok(rec)
}

/// The census CSV header.
pub const CENSUS_CSV_HEADER: &str = "curve_id,H,N,status,seconds";

pub fn census_csv_row(r: &CensusRecord) -> String {
    format!("{},{},{},{},{:.3}", r.curve_id, r.h, r.n, r.status.as_str(), r.seconds)
}

fn record(h: HeightBound, mut points: Vec<RationalPoint>, status: CensusStatus) -> CensusRecord {
    points.sort();
    points.dedup();
    CensusRecord {
        curve_id: String::new(),
        h: h.get(),
        n: points.len() as u64,
        status,
        points: Some(points),
        vertical: Vec::new(),
        candidates: Vec::new(),
        exhausted: Vec::new(),
        seconds: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn spec_json_round_trip() {
        let f = PlaneCurve::from_int_terms(&[(0, 1, 1), (2, 0, -1)]).unwrap();
        let s = CurveSpec::new("parabola", CurveKind::Algebraic(f)).with_domain(Some(int(-1)), None);
        let back = CurveSpec::from_json(&s.to_json(), "x").unwrap();
        assert_eq!(back, s);
        let e = CurveSpec::from_json(&json!({"kind": "pfaff-exact", "family": "pow2"}), "pow2").unwrap();
        assert_eq!(e.id, "pow2");
        assert_eq!(e.kind, CurveKind::PfaffExact(Family::Pow(int(2))));
        assert!(CurveSpec::from_json(&json!({"kind": "pfaff-exact", "family": "sin"}), "x").is_err());
        let err = CurveSpec::from_json(&json!({"kind": "algebraic"}), "x").unwrap_err();
        assert!(err.to_string().contains("curve"));
        let err = CurveSpec::from_json(&json!({"kind": "algebraic", "curve": {"support": [[0, 0]], "coeffs": [["1"]]}, "domain": ["2", "1"]}), "x")
            .unwrap_err();
        assert!(err.to_string().contains("domain"));
    }

    #[test]
    fn domain_clip() {
        let h = HeightBound::new(10).unwrap();
        assert_eq!(Domain::default().clip(h), (int(-10), int(10)));
        let d = Domain { lo: Some(rat(1, 2)), hi: Some(int(50)) };
        assert_eq!(d.clip(h), (rat(1, 2), int(10)));
        assert!(d.contains(&int(1)) && !d.contains(&int(0)));
    }

    #[test]
    fn parallel_map_keeps_order() {
        let v: Vec<u64> = (0..100).collect();
        let a = Parallelism::Sequential.map(v.clone(), |x| x * x);
        let b = Parallelism::Threads(4).map(v, |x| x * x);
        assert_eq!(a, b);
    }
}
