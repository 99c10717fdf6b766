//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::bounds::{thm13_threshold, thm14_bound_enclosure, Thm13Engine, THRESHOLD_PROBES};
use crate::census::{
    census, census_csv_row, default_bound, run_verification, CensusOptions, CurveSpec, Parallelism, RootMethod,
    CENSUS_CSV_HEADER, DEFAULT_DIVISOR_CAP,
};
use crate::cover::lemma21_bound_enclosure;
use crate::error::{Error, Result};
use crate::interval::{sqrt_rational, Interval};
use crate::monomial::{box_set, total_degree_counts, total_degree_set, MonomialSet};
use crate::rational::{format_decimal, format_rational, parse_rational, HeightBound, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "pfaff-census",
    version,
    about = "Rational points of bounded height on plane curves: censuses, covers and counting bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print D, R, S, rho, sigma and the upper end of C for a monomial set.
    Params(MonomialArgs),
    /// Evaluate counting bounds, or compare a curve's census with its bound.
    Bounds(BoundsArgs),
    /// Count rational points of height at most H (CSV: curve_id,H,N,status,seconds).
    Census(CensusArgs),
    /// Cover the census points by curves defined in M and check the interpolation bound.
    Cover(CoverArgs),
    /// Census, covers and bounds over an H schedule; writes census.csv, bundle.json, plot.csv.
    Verify(CoverArgs),
    /// Search the threshold above which the pipeline bound is below exp(5 sqrt(ln H)).
    Threshold(ThresholdArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = false, multiple = false)]
pub struct MonomialArgs {
    /// Box set {x^h y^k : h < B, k < G}.
    #[arg(long = "box", num_args = 2, value_names = ["B", "G"])]
    pub box_dims: Option<Vec<u32>>,
    /// Total-degree set {x^h y^k : h + k <= D}.
    #[arg(long = "total-degree", value_name = "D")]
    pub total_degree: Option<u32>,
}

impl MonomialArgs {
    fn set(&self) -> Result<Option<MonomialSet>> {
        if let Some(b) = &self.box_dims {
            return box_set(b[0], b[1]).map(Some);
        }
        if let Some(d) = self.total_degree {
            return total_degree_set(d).map(Some);
        }
        Ok(None)
    }

    /// The chosen set, `box_set(2, 2)` by default.
    fn set_or_default(&self) -> Result<MonomialSet> {
        Ok(match self.set()? {
            Some(m) => m,
            None => box_set(2, 2)?,
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Curve spec JSON file.
    #[arg(long, value_name = "PATH")]
    pub curve: PathBuf,
    /// Strictly increasing comma-separated heights, e.g. 4,10,100 or 1e6.
    #[arg(long = "H", value_name = "CSV", value_parser = parse_schedule)]
    pub h: Schedule,
    /// Worker threads (1 = sequential).
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
    /// Starting precision in bits for numeric curves (doubled up to 1024).
    #[arg(long, value_name = "BITS", default_value_t = 64)]
    pub precision: u32,
    /// Root strategy for algebraic curves of y-degree above two.
    #[arg(long, value_name = "METHOD", default_value = "divisors", value_parser = ["divisors", "isolate"])]
    pub roots: String,
}

impl RunArgs {
    fn options(&self) -> Result<CensusOptions> {
        if self.precision == 0 {
            return Err(Error::parse("--precision", "must be positive"));
        }
        let root_method = match self.roots.as_str() {
            "isolate" => RootMethod::Isolate,
            _ => RootMethod::Divisors { cap: DEFAULT_DIVISOR_CAP },
        };
        Ok(CensusOptions {
            parallelism: Parallelism::from_jobs(self.jobs),
            root_method,
            precision: self.precision,
            max_bits: self.precision.max(1024),
            keep_points: true,
        })
    }
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub monomials: MonomialArgs,
    /// Output directory for census.csv, bundle.json and plot.csv.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Theorem 1.4 bound (6d)^10 4^d H^(2/d) (ln H)^5, d = max(b, c).
    #[arg(long, group = "which")]
    pub thm14: bool,
    /// Theorem 1.3 pipeline minimised over d, next to exp(5 sqrt(ln H)).
    #[arg(long, group = "which")]
    pub thm13: bool,
    /// Lemma 2.1 bound for the chosen monomial set and length L.
    #[arg(long, group = "which")]
    pub lemma21: bool,
    /// Curve spec JSON: census each H and compare with the curve's bound.
    #[arg(long, value_name = "PATH", group = "which")]
    pub curve: Option<PathBuf>,
    /// Degree of the curve in x (with --thm14).
    #[arg(long, value_name = "B")]
    pub b: Option<u64>,
    /// Degree of the curve in y (with --thm14).
    #[arg(long, value_name = "C")]
    pub c: Option<u64>,
    /// Chain order (with --thm13).
    #[arg(long, value_name = "R")]
    pub r: Option<u64>,
    /// Chain degree (with --thm13).
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<u64>,
    /// Function degree (with --thm13).
    #[arg(long, value_name = "BETA")]
    pub beta: Option<u64>,
    /// Interval length (with --lemma21): p/q or sqrt(p/q).
    #[arg(long = "L", value_name = "LEN")]
    pub l: Option<String>,
    /// Strictly increasing comma-separated heights.
    #[arg(long = "H", value_name = "CSV", value_parser = parse_schedule)]
    pub h: Schedule,
    #[command(flatten)]
    pub monomials: MonomialArgs,
    /// Worker threads for --curve censuses.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Chain order.
    #[arg(long, value_name = "R", default_value_t = 1)]
    pub r: u64,
    /// Chain degree.
    #[arg(long, value_name = "ALPHA", default_value_t = 1)]
    pub alpha: u64,
    /// Function degree.
    #[arg(long, value_name = "BETA", default_value_t = 1)]
    pub beta: u64,
    /// Write the probe CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Schedule(pub Vec<HeightBound>);

fn parse_height(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // m e k with integer mantissa
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        if let (Ok(m), Ok(e)) = (m.parse::<u64>(), e.parse::<u32>()) {
            if let Some(v) = 10u64.checked_pow(e).and_then(|p| p.checked_mul(m)) {
                return Ok(v);
            }
        }
    }
    Err(format!("`{s}` is not a positive integer height"))
}

fn parse_schedule(s: &str) -> std::result::Result<Schedule, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let h = HeightBound::new(parse_height(part)?).map_err(|e| e.to_string())?;
        if out.last().is_some_and(|last: &HeightBound| last.get() >= h.get()) {
            return Err("heights must be strictly increasing".into());
        }
        out.push(h);
    }
    Ok(Schedule(out))
}

/// `p/q` or `sqrt(p/q)` as a certified enclosure.
fn parse_length(s: &str) -> Result<Interval> {
    let bad = || Error::parse("--L", format!("`{s}` is not p/q or sqrt(p/q)"));
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        let q = parse_rational(inner).map_err(|_| bad())?;
        if q.numer().sign() == num_bigint::Sign::Minus {
            return Err(bad());
        }
        return Ok(sqrt_rational(&q, 64));
    }
    parse_rational(s).map(Interval::point).map_err(|_| bad())
}

fn ratio(n: u64, bound: &Interval) -> String {
    format_decimal(&(Rational::from_integer(n.into()) / bound.lo()), 6, true)
}

/// Output sink: a file when `--out` is given, else the supplied writer.
fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn params(m: &MonomialArgs, stdout: &mut dyn Write) -> Result<bool> {
    let set = m.set()?.ok_or_else(|| Error::parse("--box/--total-degree", "choose a monomial set"))?;
    let p = set.parameters();
    let rho = p.rho_checked()?;
    let sigma = p.sigma.as_ref().expect("D >= 2");
    let c = p.c_upper().expect("D >= 2");
    writeln!(
        stdout,
        "D={} R={} S={} rho={} sigma={} C≤{}",
        p.d,
        p.r,
        p.big_s,
        format_rational(rho),
        format_rational(sigma),
        format_decimal(c, 5, true)
    )?;
    if let Some(d) = m.total_degree {
        let (card, ..) = total_degree_counts(d as u64);
        let alt = (d as u64) * (d as u64).saturating_sub(1) / 2;
        writeln!(stdout, "note: card M({d}) = (d+1)(d+2)/2 = {card}; the count d(d-1)/2 = {alt} does not match")?;
    }
    Ok(true)
}

fn bounds(a: &BoundsArgs, stdout: &mut dyn Write) -> Result<bool> {
    let mut text = String::new();
    let mut pass = true;
    if a.thm14 {
        let (b, c) = match (a.b, a.c) {
            (Some(b), Some(c)) => (b, c),
            _ => return Err(Error::parse("--b/--c", "--thm14 needs --b and --c")),
        };
        text.push_str("H,bound_name,bound_value\n");
        for h in &a.h.0 {
            let v = thm14_bound_enclosure(b, c, &BigUint::from(h.get()))?;
            text.push_str(&format!("{},thm14:{b}:{c},{}\n", h.get(), format_decimal(v.hi(), 6, true)));
        }
    } else if a.thm13 {
        let (r, alpha, beta) = match (a.r, a.alpha, a.beta) {
            (Some(r), Some(al), Some(be)) => (r, al, be),
            _ => return Err(Error::parse("--r/--alpha/--beta", "--thm13 needs --r, --alpha and --beta")),
        };
        let mut e = Thm13Engine::new(r, alpha, beta)?;
        text.push_str("H,d_star,ln_pipeline,ln_simple,holds\n");
        for h in &a.h.0 {
            if h.get() < 3 {
                return Err(Error::precondition("H >= 3 fails"));
            }
            let rep = e.report(&crate::bounds::ln_height(&BigUint::from(h.get())))?;
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                h.get(),
                rep.d_star,
                format_decimal(rep.ln_pipeline.hi(), 8, true),
                format_decimal(rep.ln_simple.lo(), 8, false),
                rep.holds()
            ));
        }
    } else if a.lemma21 {
        let m = a.monomials.set_or_default()?;
        let l = parse_length(a.l.as_deref().ok_or_else(|| Error::parse("--L", "--lemma21 needs --L"))?)?;
        text.push_str("H,bound_name,bound_value\n");
        for h in &a.h.0 {
            let v = lemma21_bound_enclosure(&m, &l, *h)?;
            text.push_str(&format!("{},lemma21,{}\n", h.get(), format_decimal(v.hi(), 6, true)));
        }
    } else if let Some(path) = &a.curve {
        let spec = CurveSpec::load(path)?;
        let opts = CensusOptions { parallelism: Parallelism::from_jobs(a.jobs), keep_points: false, ..CensusOptions::default() };
        text.push_str("curve_id,H,N_empirical,bound_name,bound_value,ratio\n");
        for h in &a.h.0 {
            let rec = census(&spec, *h, &opts)?;
            let (name, value, r) = match default_bound(&spec, *h)? {
                Some((name, v)) => {
                    let ok = rec.vertical.is_empty() && Rational::from_integer((rec.n + rec.candidates.len() as u64).into()) <= *v.lo();
                    pass &= ok;
                    (name, format_decimal(v.hi(), 6, true), ratio(rec.n, &v))
                }
                None => (String::new(), String::new(), String::new()),
            };
            text.push_str(&format!("{},{},{},{},{},{}\n", spec.id, h.get(), rec.n, name, value, r));
        }
    } else {
        return Err(Error::parse("bounds", "choose one of --thm14, --thm13, --lemma21, --curve"));
    }
    emit(&a.out, &text, stdout)?;
    Ok(pass)
}

fn census_cmd(a: &CensusArgs, stdout: &mut dyn Write) -> Result<bool> {
    let spec = CurveSpec::load(&a.run.curve)?;
    let opts = CensusOptions { keep_points: false, ..a.run.options()? };
    let mut text = format!("{CENSUS_CSV_HEADER}\n");
    for h in &a.run.h.0 {
        let rec = census(&spec, *h, &opts)?;
        text.push_str(&census_csv_row(&rec));
        text.push('\n');
    }
    emit(&a.out, &text, stdout)?;
    Ok(true)
}

fn cover_cmd(a: &CoverArgs, write_all: bool, stdout: &mut dyn Write) -> Result<bool> {
    let spec = CurveSpec::load(&a.run.curve)?;
    let m = a.monomials.set_or_default()?;
    let bundle = run_verification(&spec, &a.run.h.0, &m, &a.run.options()?)?;
    writeln!(stdout, "curve_id,H,N,pieces,cover_size,bound_name,bound_value,pass")?;
    for r in &bundle.heights {
        let (name, value) = match &r.bound {
            Some(b) => (b.name.clone(), format_decimal(b.value.hi(), 6, true)),
            None => (String::new(), String::new()),
        };
        writeln!(
            stdout,
            "{},{},{},{},{},{},{},{}",
            spec.id,
            r.census.h,
            r.census.n,
            r.pieces.len(),
            r.cover_size(),
            name,
            value,
            r.pass()
        )?;
    }
    if let Some(dir) = &a.out {
        if write_all {
            bundle.write(dir)?;
        } else {
            std::fs::create_dir_all(dir)?;
            let mut json = serde_json::to_string_pretty(&bundle.to_json())?;
            json.push('\n');
            std::fs::write(dir.join("bundle.json"), json)?;
        }
    }
    Ok(bundle.pass())
}

fn threshold_cmd(a: &ThresholdArgs, stdout: &mut dyn Write) -> Result<bool> {
    let t = thm13_threshold(a.r, a.alpha, a.beta)?;
    let mut text = format!(
        "# H0 = 2^{} (ln H0 in [{}, {}]), {} probes\nln_H,d_star,ln_pipeline,ln_simple,holds\n",
        t.log2_h0,
        format_decimal(t.ln_h0.lo(), 8, false),
        format_decimal(t.ln_h0.hi(), 8, true),
        THRESHOLD_PROBES
    );
    let mut pass = true;
    for p in &t.probes {
        pass &= p.holds();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            format_decimal(p.ln_h.lo(), 8, false),
            p.d_star,
            format_decimal(p.ln_pipeline.hi(), 8, true),
            format_decimal(p.ln_simple.lo(), 8, false),
            p.holds()
        ));
    }
    emit(&a.out, &text, stdout)?;
    Ok(pass)
}

/// Runs one command. `Ok(false)` means a verification flag failed.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Params(m) => params(m, stdout),
        Command::Bounds(a) => bounds(a, stdout),
        Command::Census(a) => census_cmd(a, stdout),
        Command::Cover(a) => cover_cmd(a, false, stdout),
        Command::Verify(a) => cover_cmd(a, true, stdout),
        Command::Threshold(a) => threshold_cmd(a, stdout),
    }
}

/// Parses `argv`, runs, and returns the process exit code: 0 on success,
/// 1 on a failed verification or internal error, 2 on bad input.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "verification failed");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_user_error() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pfaff-census").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn params_box() {
        let (code, out, _) = run_capture(&["params", "--box", "2", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "D=4 R=4 S=8 rho=2/3 sigma=4/3 C≤5.2797\n");
        let (_, out, _) = run_capture(&["params", "--total-degree", "2"]);
        assert!(out.starts_with("D=6 R=8 S=24 rho=8/15 sigma=8/5 "), "{out}");
        assert!(out.contains("card M(2) = (d+1)(d+2)/2 = 6"));
    }

    #[test]
    fn schedule_parsing() {
        let s = parse_schedule("4,10,1e6").unwrap();
        assert_eq!(s.0.iter().map(|h| h.get()).collect::<Vec<_>>(), vec![4, 10, 1_000_000]);
        assert!(parse_schedule("10,4").is_err());
        assert!(parse_schedule("4,4").is_err());
        assert!(parse_schedule("0").is_err());
        assert!(parse_schedule("x").is_err());
    }

    #[test]
    fn user_errors_exit_two() {
        assert_eq!(run_capture(&["params", "--bogus"]).0, 2);
        assert_eq!(run_capture(&["census", "--H", "4"]).0, 2);
        assert_eq!(run_capture(&["params", "--box", "1", "1"]).0, 2);
        let (code, _, err) = run_capture(&["bounds", "--thm14", "--b", "2", "--H", "100"]);
        assert_eq!(code, 2);
        assert!(err.contains("--c"));
    }

    #[test]
    fn thm14_bounds_line() {
        let (code, out, _) = run_capture(&["bounds", "--thm14", "--b", "2", "--c", "2", "--H", "100"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1).unwrap(), "100,thm14:2:2,2.05193e17");
    }

    #[test]
    fn lemma21_sqrt_length() {
        let (code, out, _) = run_capture(&["bounds", "--lemma21", "--total-degree", "1", "--L", "sqrt(2)", "--H", "100"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().nth(1).unwrap().starts_with("100,lemma21,"));
    }

    /// Every argument of every subcommand carries help text and shows up
    /// in the rendered `--help`.
    #[test]
    fn help_lists_every_flag() {
        let mut cmd = Cli::command();
        let top = cmd.render_help().to_string();
        for sub in cmd.get_subcommands() {
            assert!(top.contains(sub.get_name()), "command {} missing from --help", sub.get_name());
            assert!(sub.get_about().is_some(), "command {} has no description", sub.get_name());
        }
        let subs: Vec<clap::Command> = cmd.get_subcommands().cloned().collect();
        for mut sub in subs.into_iter().filter(|s| s.get_name() != "help") {
            let help = sub.render_help().to_string();
            for arg in sub.get_arguments() {
                if arg.get_id() == "help" || arg.get_id() == "version" {
                    continue;
                }
                assert!(arg.get_help().is_some(), "{} --{} has no help", sub.get_name(), arg.get_id());
                let long = arg.get_long().expect("flags are long options");
                assert!(help.contains(&format!("--{long}")), "{} --{long} missing from help", sub.get_name());
            }
        }
        for name in ["params", "bounds", "census", "cover", "verify", "threshold"] {
            assert!(top.contains(name));
        }
    }
}
