//! `epslab` command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::characters::{mult_char_make, AddChar, MultChar};
use crate::cyclo::{complex_to_json, HalfScaled};
use crate::epsilon::{epsilon, epsilon_bh};
use crate::error::{Error, Result};
use crate::padic::{cached_structure, Prime, ValUnit};
use crate::suites::{run_suite, SuiteOptions, SuiteResult, SUITES};
use crate::sums::{gauss_sum, jacobi_strict, jacobi_shell, JacobiMode};
use crate::twist::{check_scale, sweep, SweepConfig};
use crate::characters::enumerate_chars;

const GRAMMAR: &str = "\
Character syntax:   --char \"exps=e1,e2;pi=zetaM^k\"
  exps are exponents on the canonical generators of (Z/p^n)^x (one per generator),
  pi is the value at the uniformizer: 1, zetaM or zetaM^k (default 1).
Additive character: --psi canonical | --psi \"b=v:<int>,u:<int>\"  (psi(x) = psi_F(b x), b = u p^v)";

#[derive(Parser, Debug)]
#[command(name = "epslab", about = "Local epsilon factors, Gauss and Jacobi sums over Q_p", after_help = GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    level: Option<u32>,
    #[arg(long, global = true, default_value = "canonical")]
    psi: String,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    /// shorthand for --backend float
    #[arg(long, global = true)]
    float: bool,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    /// exit with status 2 when a verify or sweep run finds a mismatch
    #[arg(long, global = true)]
    strict_exit: bool,
    /// bypass the group-size guard (EPSLAB_MAX_GROUP)
    #[arg(long, global = true)]
    force: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Backend {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// epsilon factor eps(chi, psi); with --s, the float eps_BH(chi, s, psi)
    Eps {
        #[arg(long = "char")]
        chi: String,
        #[arg(long)]
        s: Option<String>,
    },
    /// Gauss sum G(chi, psi, m)
    Gauss {
        #[arg(long = "char")]
        chi: String,
        /// defaults to max(a(chi), 1)
        #[arg(long)]
        m: Option<i64>,
    },
    /// Jacobi sum J_t(chi1, chi2) at the given level
    Jacobi {
        #[arg(long = "char")]
        chi: String,
        /// second character, defaults to --char
        #[arg(long = "char2")]
        chi2: Option<String>,
        #[arg(long, default_value = "strict")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        t: u64,
    },
    /// conductor of a character
    Conductor {
        #[arg(long = "char")]
        chi: String,
    },
    /// run an identity suite, or `all`
    Verify {
        suite: String,
        #[arg(long)]
        n_max: Option<u32>,
        /// only characters of this conductor
        #[arg(long)]
        a: Option<u32>,
        /// m or lo..hi for vanishing-integral
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// directory with committed sweep reports to compare against
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// twisting-formula sweep over all pairs of ramified characters
    Sweep {
        #[arg(long)]
        n_max: Option<u32>,
        /// comma-separated: strict, auto, shell:v
        #[arg(long, default_value = "strict,auto")]
        modes: String,
    },
    /// epsilon factors of every character of level <= n-max
    Table {
        #[arg(long)]
        n_max: Option<u32>,
    },
}

pub fn parse_prime(p: Option<u64>) -> Result<Prime> {
    Prime::new(p.ok_or_else(|| Error::Parse("--p is required".into()))?)
}

/// `b=v:<int>,u:<int>` or `canonical`.
pub fn parse_psi(p: Prime, s: &str) -> Result<AddChar> {
    let s = s.trim();
    if s == "canonical" {
        return Ok(AddChar::canonical(p));
    }
    let body = s
        .strip_prefix("b=")
        .ok_or_else(|| Error::Parse(format!("bad psi spec {s:?}")))?;
    let (mut v, mut u) = (None, None);
    for part in body.split(',') {
        let (k, val) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad psi component {part:?}")))?;
        let val: i64 = val
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer in psi spec {part:?}")))?;
        match k.trim() {
            "v" => v = Some(val),
            "u" => u = Some(val),
            _ => return Err(Error::Parse(format!("unknown psi component {k:?}"))),
        }
    }
    let b = ValUnit::exact(p, v.unwrap_or(0), u.unwrap_or(1))?;
    Ok(AddChar::new(b))
}

/// `exps=e1,e2;pi=zetaM^k`.
pub fn parse_char(p: Prime, n: u32, s: &str) -> Result<MultChar> {
    let mut exps = None;
    let (mut order, mut exp) = (1u64, 0i64);
    for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad character component {part:?}")))?;
        match k.trim() {
            "exps" => {
                let v: std::result::Result<Vec<u64>, _> = if val.trim().is_empty() {
                    Ok(vec![])
                } else {
                    val.split(',').map(|e| e.trim().parse()).collect()
                };
                exps = Some(v.map_err(|_| Error::Parse(format!("bad exponents {val:?}")))?);
            }
            "pi" => (order, exp) = parse_root(val.trim())?,
            _ => return Err(Error::Parse(format!("unknown character component {k:?}"))),
        }
    }
    let exps = exps.ok_or_else(|| Error::Parse(format!("character spec {s:?} has no exps")))?;
    mult_char_make(p, n as i64, &exps, order, exp)
}

fn parse_root(s: &str) -> Result<(u64, i64)> {
    if s == "1" {
        return Ok((1, 0));
    }
    if s == "-1" {
        return Ok((2, 1));
    }
    let bad = || Error::Parse(format!("bad root of unity {s:?}; expected 1 or zetaM^k"));
    let body = s.strip_prefix("zeta").ok_or_else(bad)?;
    let (m, k) = body.split_once('^').unwrap_or((body, "1"));
    Ok((m.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?))
}

/// `lo..hi` or a single integer.
pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("bad range {s:?}"));
    match s.split_once("..") {
        Some((lo, hi)) => {
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        }
        None => {
            let m = s.trim().parse().map_err(|_| bad())?;
            Ok((m, m))
        }
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = if t.ends_with('i') && !t[..t.len() - 1].ends_with(|c: char| c.is_ascii_digit()) {
        format!("{}1i", &t[..t.len() - 1])
    } else {
        t
    };
    Complex64::from_str(&t).map_err(|_| Error::Parse(format!("bad complex number {s:?}")))
}

/// Float formatting with 12 significant decimals and trailing zeros removed.
pub fn fmt_float(x: f64) -> String {
    let s = format!("{:.12}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_float(z.im.abs());
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{}{sign}{im}i", fmt_float(z.re))
}

fn exact_json(h: &HalfScaled) -> Value {
    let mut v = h.to_json();
    v["float"] = complex_to_json(h.embed());
    v
}

struct Ctx<'a> {
    g: &'a Global,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn prime(&self) -> Result<Prime> {
        parse_prime(self.g.p)
    }

    fn level(&self) -> Result<u32> {
        self.g.level.ok_or_else(|| Error::Parse("--level is required".into()))
    }

    fn char_arg(&self, s: &str) -> Result<MultChar> {
        let (p, n) = (self.prime()?, self.level()?);
        check_scale(p, n, self.g.force)?;
        parse_char(p, n, s)
    }

    fn float(&self) -> bool {
        self.g.float || self.g.backend == Backend::Float
    }

    fn emit(&mut self, text: impl AsRef<str>) -> Result<()> {
        Ok(writeln!(self.out, "{}", text.as_ref())?)
    }

    fn emit_value(&mut self, label: &str, v: &HalfScaled) -> Result<()> {
        if self.g.json {
            let j = exact_json(v).to_string();
            return self.emit(j);
        }
        if !self.float() {
            self.emit(format!("{label} = {}", v.u))?;
            self.emit(format!("e_half = {} (q = {})", v.e, v.q))?;
        }
        self.emit(format!("float = {}", fmt_complex(v.embed())))
    }
}

fn cmd_eps(cx: &mut Ctx, chi: &str, s: Option<&str>) -> Result<i32> {
    let chi = cx.char_arg(chi)?;
    let psi = parse_psi(chi.p(), &cx.g.psi)?;
    if let Some(s) = s {
        let s = parse_complex(s)?;
        let z = epsilon_bh(&chi, s, &psi)?;
        if cx.g.json {
            let j = json!({"char": chi.to_json(), "psi": psi.to_json(), "s": complex_to_json(s), "float": complex_to_json(z)});
            cx.emit(j.to_string())?;
        } else {
            cx.emit(format!("eps_BH = {}", fmt_complex(z)))?;
        }
        return Ok(0);
    }
    let e = epsilon(&chi, &psi)?;
    if cx.g.json {
        let mut j = e.to_json();
        j["char"] = chi.to_json();
        j["psi"] = psi.to_json();
        cx.emit(j.to_string())?;
    } else {
        cx.emit(format!("a(chi) = {}, n(psi) = {}", e.chi_conductor, e.psi_conductor))?;
        cx.emit_value("u", &e.value)?;
    }
    Ok(0)
}

fn cmd_gauss(cx: &mut Ctx, chi: &str, m: Option<i64>) -> Result<i32> {
    let chi = cx.char_arg(chi)?;
    let psi = parse_psi(chi.p(), &cx.g.psi)?;
    let m = m.unwrap_or(chi.conductor().max(1) as i64);
    let g = gauss_sum(&chi, &psi, m)?;
    cx.emit_value("G", &HalfScaled::from_cyclo(g, chi.p().get()))?;
    Ok(0)
}

fn cmd_jacobi(cx: &mut Ctx, a: &str, b: Option<&str>, mode: &str, t: u64) -> Result<i32> {
    let chi1 = cx.char_arg(a)?;
    let chi2 = cx.char_arg(b.unwrap_or(a))?;
    let n = cx.level()? as i64;
    let j = match mode.parse::<JacobiMode>()? {
        JacobiMode::Strict => jacobi_strict(&chi1, &chi2, t, n)?,
        JacobiMode::Shell(v) if t == 1 => jacobi_shell(&chi1, &chi2, n, v)?,
        JacobiMode::Shell(_) => return Err(Error::Parse("--t applies to strict mode only".into())),
        JacobiMode::AutoShell => {
            return Err(Error::Parse("jacobi needs strict or shell:v; auto is chosen per sweep case".into()))
        }
    };
    cx.emit_value("J", &HalfScaled::from_cyclo(j, chi1.p().get()))?;
    Ok(0)
}

fn cmd_conductor(cx: &mut Ctx, chi: &str) -> Result<i32> {
    let chi = cx.char_arg(chi)?;
    if cx.g.json {
        cx.emit(chi.to_json().to_string())?;
    } else {
        cx.emit(format!("{}", chi.conductor()))?;
    }
    Ok(0)
}

fn suite_json(r: &SuiteResult) -> Value {
    json!({
        "suite": r.name,
        "passed": r.passed(),
        "checks": r.checks,
        "failures": r.failures,
        "notes": r.notes,
    })
}

fn cmd_verify(cx: &mut Ctx, suite: &str, n_max: Option<u32>, a: Option<u32>, m: Option<&str>, seed: u64, reports: Option<PathBuf>) -> Result<i32> {
    let mut opts = match cx.g.p {
        Some(p) => {
            let p = Prime::new(p)?;
            let n = n_max.or(cx.g.level).or(a).unwrap_or(2);
            check_scale(p, n, cx.g.force)?;
            SuiteOptions::single(p, n)
        }
        None => SuiteOptions::desk_scale(),
    };
    opts.conductor = a;
    opts.seed = seed;
    opts.reports_dir = reports;
    if let Some(m) = m {
        opts.m_range = parse_range(m)?;
    }
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut results = Vec::new();
    for name in names {
        let r = run_suite(name, &opts)?;
        if !cx.g.json {
            for note in &r.notes {
                cx.emit(note)?;
            }
            cx.emit(r.to_string())?;
        }
        results.push(r);
    }
    if cx.g.json {
        let j = Value::Array(results.iter().map(suite_json).collect());
        cx.emit(serde_json::to_string_pretty(&j).unwrap_or_default())?;
    }
    let failed = results.iter().any(|r| !r.passed());
    Ok(if failed && cx.g.strict_exit { 2 } else { 0 })
}

fn parse_modes(s: &str) -> Result<Vec<JacobiMode>> {
    let mut modes: Vec<JacobiMode> = s.split(',').map(|m| m.trim().parse()).collect::<Result<_>>()?;
    modes.dedup();
    if modes.is_empty() {
        return Err(Error::Parse("no modes given".into()));
    }
    Ok(modes)
}

fn cmd_sweep(cx: &mut Ctx, n_max: Option<u32>, modes: &str) -> Result<i32> {
    let p = cx.prime()?;
    let n = n_max
        .or(cx.g.level)
        .ok_or_else(|| Error::Parse("--n-max is required".into()))?;
    let mut cfg = SweepConfig::new(p, n, parse_modes(modes)?);
    cfg.psi = parse_psi(p, &cx.g.psi)?;
    cfg.force = cx.g.force;
    let report = sweep(&cfg)?;
    if cx.g.json {
        let s = report.to_json_string();
        write!(cx.out, "{s}")?;
    } else if cx.g.csv {
        let s = report.to_csv();
        write!(cx.out, "{s}")?;
    } else {
        cx.emit(format!("p={} n_max={} psi={} pairs={}", p, n, cfg.psi.descriptor(), report.pairs.len()))?;
        for (case, count) in &report.counts {
            cx.emit(format!("{case}: {count} pairs"))?;
            for mode in &cfg.modes {
                let t = report.tally(*case, *mode);
                if t.total() > 0 {
                    cx.emit(format!(
                        "  {mode}: exact={} float={} mismatch={} undefined={}",
                        t.exact, t.float, t.mismatch, t.undefined
                    ))?;
                }
            }
        }
        for r in report.mismatches() {
            cx.emit(format!("MISMATCH {} x {} ({})", r.chi1.descriptor(), r.chi2.descriptor(), r.case))?;
        }
    }
    Ok(if report.has_mismatch() && cx.g.strict_exit { 2 } else { 0 })
}

/// One row per character mod `p^n_max`: descriptor, conductor, exact and float epsilon.
pub fn tabulate(p: Prime, n_max: u32, psi: &AddChar, force: bool) -> Result<Vec<(MultChar, HalfScaled)>> {
    check_scale(p, n_max, force)?;
    cached_structure(p, n_max as i64)?;
    enumerate_chars(p, n_max as i64, None)?
        .into_iter()
        .map(|chi| epsilon(&chi, psi).map(|e| (chi, e.value)))
        .collect()
}

fn cmd_table(cx: &mut Ctx, n_max: Option<u32>) -> Result<i32> {
    let p = cx.prime()?;
    let n = n_max
        .or(cx.g.level)
        .ok_or_else(|| Error::Parse("--n-max is required".into()))?;
    let psi = parse_psi(p, &cx.g.psi)?;
    let rows = tabulate(p, n, &psi, cx.g.force)?;
    if cx.g.json {
        let j: Vec<Value> = rows
            .iter()
            .map(|(c, e)| json!({"char": c.descriptor(), "conductor": c.conductor(), "exact": e.to_json(), "float": complex_to_json(e.embed())}))
            .collect();
        cx.emit(serde_json::to_string_pretty(&Value::Array(j)).unwrap_or_default())?;
    } else if cx.g.csv {
        cx.emit("char,conductor,exact,float")?;
        for (c, e) in &rows {
            cx.emit(format!("\"{}\",{},\"{}\",{}", c.descriptor(), c.conductor(), e, fmt_complex(e.embed())))?;
        }
    } else {
        let w = rows.iter().map(|(c, _)| c.descriptor().len()).max().unwrap_or(4);
        for (c, e) in &rows {
            cx.emit(format!("{:w$}  a={}  {}  ~ {}", c.descriptor(), c.conductor(), e, fmt_complex(e.embed())))?;
        }
    }
    Ok(0)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let mut cx = Ctx { g: &cli.global, out };
    match &cli.command {
        Command::Eps { chi, s } => cmd_eps(&mut cx, chi, s.as_deref()),
        Command::Gauss { chi, m } => cmd_gauss(&mut cx, chi, *m),
        Command::Jacobi { chi, chi2, mode, t } => cmd_jacobi(&mut cx, chi, chi2.as_deref(), mode, *t),
        Command::Conductor { chi } => cmd_conductor(&mut cx, chi),
        Command::Verify { suite, n_max, a, m, seed, reports } => {
            cmd_verify(&mut cx, suite, *n_max, *a, m.as_deref(), *seed, reports.clone())
        }
        Command::Sweep { n_max, modes } => cmd_sweep(&mut cx, *n_max, modes),
        Command::Table { n_max } => cmd_table(&mut cx, *n_max),
    }
}

/// Parses `args` (including the program name) and runs the command. Returns the exit code.
pub fn run_command<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        // a closed pipe (e.g. `| head`) is not an error worth reporting
        Err(Error::Io { kind: std::io::ErrorKind::BrokenPipe, .. }) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
