//! The three-case twisting formula for `eps(chi1 chi2, psi)` in terms of `eps(chi1, psi)`,
//! `eps(chi2, psi)` and a Jacobi sum, and a sweep harness comparing it against the directly
//! computed left-hand side under each Jacobi reading.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::characters::{enumerate_chars, AddChar, MultChar};
use crate::cyclo::{complex_to_json, Cyclo, HalfScaled, RootOfUnity};
use crate::epsilon::epsilon;
use crate::error::{Error, Result};
use crate::padic::{cached_structure, Prime, ValUnit};
use crate::sums::{jacobi_shell, jacobi_strict, JacobiMode};

/// Absolute tolerance for float comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Default bound on `(p-1) p^{n-1}` for sweeps and tables.
pub const DEFAULT_MAX_GROUP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    /// `n = m = r`
    Case1,
    /// `n = m > r >= 1`
    Case2,
    /// `n = r > m` (or `m = r > n`, with the characters swapped)
    Case3,
    /// `r = 0`
    ExcludedUnramifiedProduct,
    /// one of the characters is unramified
    ExcludedUnramifiedFactor,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        CaseTag::Case1,
        CaseTag::Case2,
        CaseTag::Case3,
        CaseTag::ExcludedUnramifiedProduct,
        CaseTag::ExcludedUnramifiedFactor,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3 => "Case3",
            CaseTag::ExcludedUnramifiedProduct => "ExcludedUnramifiedProduct",
            CaseTag::ExcludedUnramifiedFactor => "ExcludedUnramifiedFactor",
        }
    }

    pub fn parse(s: &str) -> Result<CaseTag> {
        CaseTag::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown case {s:?}")))
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, CaseTag::ExcludedUnramifiedProduct | CaseTag::ExcludedUnramifiedFactor)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Conductors `(n, m, r)` of `chi1`, `chi2`, `chi1 chi2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conductors {
    pub n: u32,
    pub m: u32,
    pub r: u32,
}

pub fn conductors(chi1: &MultChar, chi2: &MultChar) -> Result<Conductors> {
    Ok(Conductors {
        n: chi1.conductor(),
        m: chi2.conductor(),
        r: chi1.mul(chi2)?.conductor(),
    })
}

pub fn classify(c: Conductors) -> CaseTag {
    let Conductors { n, m, r } = c;
    if n == 0 || m == 0 {
        CaseTag::ExcludedUnramifiedFactor
    } else if r == 0 {
        CaseTag::ExcludedUnramifiedProduct
    } else if n == m && m == r {
        CaseTag::Case1
    } else if n == m {
        CaseTag::Case2
    } else {
        CaseTag::Case3
    }
}

pub fn classify_case(chi1: &MultChar, chi2: &MultChar) -> Result<CaseTag> {
    Ok(classify(conductors(chi1, chi2)?))
}

/// Shell index selected by [`JacobiMode::AutoShell`] for a case.
pub fn auto_shell(tag: CaseTag, c: Conductors) -> u32 {
    match tag {
        CaseTag::Case2 => c.n - c.r,
        CaseTag::Case3 => c.n.max(c.m) - c.n.min(c.m),
        _ => 0,
    }
}

fn jacobi_one(chi1: &MultChar, chi2: &MultChar, level: u32, mode: JacobiMode, tag: CaseTag, c: Conductors) -> Result<Cyclo> {
    let j = match mode {
        JacobiMode::Strict => jacobi_strict(chi1, chi2, 1, level as i64)?,
        JacobiMode::Shell(v) => jacobi_shell(chi1, chi2, level as i64, v)?,
        JacobiMode::AutoShell => jacobi_shell(chi1, chi2, level as i64, auto_shell(tag, c))?,
    };
    if j.is_zero() {
        return Err(Error::ZeroJacobi(format!("{chi1} x {chi2} at level {level}, mode {mode}")));
    }
    Ok(j)
}

/// Evaluates the formula of case `tag` literally, whatever the true case of the pair is.
/// Used to document what the Case 2 formula gives on `r = 0` pairs.
pub fn case_formula_rhs(chi1: &MultChar, chi2: &MultChar, psi: &AddChar, tag: CaseTag, mode: JacobiMode) -> Result<HalfScaled> {
    let c = conductors(chi1, chi2)?;
    let (chi1, chi2, c) = if c.m > c.n {
        (chi2, chi1, Conductors { n: c.m, m: c.n, r: c.r })
    } else {
        (chi1, chi2, c)
    };
    let level = c.n.max(1);
    let j = jacobi_one(chi1, chi2, level, mode, tag, c)?;
    let e1 = epsilon(chi1, psi)?.value;
    let e2 = epsilon(chi2, psi)?.value;
    let prod = e1.mul(&e2);
    let (n, m, r) = (c.n as i64, c.m as i64, c.r as i64);
    let scaled = match tag {
        CaseTag::Case1 => prod.scale_half(n),
        CaseTag::Case2 => {
            let z = chi1.pi_value().mul(&chi2.pi_value()).pow(r - n);
            prod.scale_half(r).mul_root(&z)
        }
        CaseTag::Case3 => prod.scale_half(2 * n - m),
        other => {
            return Err(Error::Precondition(format!("no formula for {other}")));
        }
    };
    scaled.div(&HalfScaled::from_cyclo(j, prod.q))
}

/// Right-hand side of the twisting formula for the pair's own case.
pub fn formula_rhs(chi1: &MultChar, chi2: &MultChar, psi: &AddChar, mode: JacobiMode) -> Result<HalfScaled> {
    let tag = classify_case(chi1, chi2)?;
    if tag.is_excluded() {
        return Err(Error::Precondition(format!("{tag}: the formula does not apply")));
    }
    case_formula_rhs(chi1, chi2, psi, tag, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    ExactMatch,
    FloatMatch(f64),
    Mismatch(f64),
    Undefined(String),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::ExactMatch => "exact",
            Verdict::FloatMatch(_) => "float",
            Verdict::Mismatch(_) => "mismatch",
            Verdict::Undefined(_) => "undefined",
        }
    }

    pub fn is_mismatch(&self) -> bool {
        matches!(self, Verdict::Mismatch(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::ExactMatch => json!({"verdict": "ExactMatch"}),
            Verdict::FloatMatch(d) => json!({"verdict": "FloatMatch", "delta": d}),
            Verdict::Mismatch(d) => json!({"verdict": "Mismatch", "delta": d}),
            Verdict::Undefined(r) => json!({"verdict": "Undefined", "reason": r}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Verdict> {
        let delta = || {
            v.get("delta")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Parse("verdict is missing delta".into()))
        };
        match v.get("verdict").and_then(Value::as_str) {
            Some("ExactMatch") => Ok(Verdict::ExactMatch),
            Some("FloatMatch") => Ok(Verdict::FloatMatch(delta()?)),
            Some("Mismatch") => Ok(Verdict::Mismatch(delta()?)),
            Some("Undefined") => Ok(Verdict::Undefined(
                v.get("reason").and_then(Value::as_str).unwrap_or_default().to_string(),
            )),
            other => Err(Error::Parse(format!("unknown verdict {other:?}"))),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ExactMatch => write!(f, "ExactMatch"),
            Verdict::FloatMatch(d) => write!(f, "FloatMatch({d:.3e})"),
            Verdict::Mismatch(d) => write!(f, "Mismatch({d:.3e})"),
            Verdict::Undefined(r) => write!(f, "Undefined({r})"),
        }
    }
}

/// Exact comparison first; the float backend only when the `q`-parities differ.
pub fn compare(lhs: &HalfScaled, rhs: &HalfScaled) -> Verdict {
    let delta = (lhs.embed() - rhs.embed()).norm();
    match lhs.exact_eq(rhs) {
        Some(true) => Verdict::ExactMatch,
        Some(false) => Verdict::Mismatch(delta),
        None if delta <= FLOAT_TOL => Verdict::FloatMatch(delta),
        None => Verdict::Mismatch(delta),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeResult {
    pub rhs: Option<HalfScaled>,
    pub verdict: Verdict,
}

impl ModeResult {
    fn from_rhs(lhs: &HalfScaled, rhs: Result<HalfScaled>) -> ModeResult {
        match rhs {
            Ok(r) => ModeResult { verdict: compare(lhs, &r), rhs: Some(r) },
            Err(e) => ModeResult { rhs: None, verdict: Verdict::Undefined(e.to_string()) },
        }
    }

    fn to_json(&self) -> Value {
        let mut v = self.verdict.to_json();
        let obj = v.as_object_mut().unwrap();
        match &self.rhs {
            Some(r) => {
                obj.insert("rhs".into(), r.to_json());
                obj.insert("rhs_float".into(), complex_to_json(r.embed()));
            }
            None => {
                obj.insert("rhs".into(), Value::Null);
            }
        }
        v
    }

    fn from_json(v: &Value) -> Result<ModeResult> {
        let rhs = match v.get("rhs") {
            None | Some(Value::Null) => None,
            Some(r) => Some(HalfScaled::from_json(r)?),
        };
        Ok(ModeResult { rhs, verdict: Verdict::from_json(v)? })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub chi1: MultChar,
    pub chi2: MultChar,
    pub case: CaseTag,
    pub conductors: Conductors,
    pub lhs: HalfScaled,
    pub by_mode: BTreeMap<JacobiMode, ModeResult>,
    /// For `r = 0` pairs: the Case 2 formula forced through with the strict Jacobi sum.
    pub forced_case2: Option<ModeResult>,
}

impl PairReport {
    pub fn has_mismatch(&self) -> bool {
        self.by_mode.values().any(|m| m.verdict.is_mismatch())
            || self.forced_case2.as_ref().is_some_and(|m| m.verdict.is_mismatch())
    }

    pub fn to_json(&self) -> Value {
        let mut modes = Map::new();
        for (k, v) in &self.by_mode {
            modes.insert(k.to_string(), v.to_json());
        }
        let mut out = json!({
            "chi1": self.chi1.to_json(),
            "chi2": self.chi2.to_json(),
            "case": self.case.name(),
            "n": self.conductors.n,
            "m": self.conductors.m,
            "r": self.conductors.r,
            "lhs": self.lhs.to_json(),
            "lhs_float": complex_to_json(self.lhs.embed()),
            "modes": modes,
        });
        if let Some(f) = &self.forced_case2 {
            out.as_object_mut().unwrap().insert("forced_case2_strict".into(), f.to_json());
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<PairReport> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("pair report missing {k:?}")));
        let num = |k: &str| -> Result<u32> {
            get(k)?
                .as_u64()
                .map(|x| x as u32)
                .ok_or_else(|| Error::Parse(format!("{k} must be an integer")))
        };
        let case = CaseTag::parse(get("case")?.as_str().unwrap_or_default())?;
        let mut by_mode = BTreeMap::new();
        for (k, m) in get("modes")?
            .as_object()
            .ok_or_else(|| Error::Parse("modes must be an object".into()))?
        {
            by_mode.insert(k.parse::<JacobiMode>()?, ModeResult::from_json(m)?);
        }
        let forced_case2 = v.get("forced_case2_strict").map(ModeResult::from_json).transpose()?;
        Ok(PairReport {
            chi1: char_from_json(get("chi1")?)?,
            chi2: char_from_json(get("chi2")?)?,
            case,
            conductors: Conductors { n: num("n")?, m: num("m")?, r: num("r")? },
            lhs: HalfScaled::from_json(get("lhs")?)?,
            by_mode,
            forced_case2,
        })
    }
}

/// Rebuilds a character from its JSON descriptor.
pub fn char_from_json(v: &Value) -> Result<MultChar> {
    let u = |k: &str| {
        v.get(k)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse(format!("character missing {k:?}")))
    };
    let p = Prime::new(u("p")?)?;
    let n = u("n")? as i64;
    let exps: Vec<u64> = v
        .get("exps")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("character missing \"exps\"".into()))?
        .iter()
        .map(|e| e.as_u64().ok_or_else(|| Error::Parse("bad exponent".into())))
        .collect::<Result<_>>()?;
    MultChar::new(cached_structure(p, n)?, &exps, u("pi_order")?, u("pi_exp")? as i64)
}

/// Compares the formula, in every requested mode, against the directly computed `eps(chi1 chi2, psi)`.
pub fn verify_pair(chi1: &MultChar, chi2: &MultChar, psi: &AddChar, modes: &[JacobiMode]) -> Result<PairReport> {
    let prod = chi1.mul(chi2)?;
    let lhs = epsilon(&prod, psi)?.value;
    let c = Conductors { n: chi1.conductor(), m: chi2.conductor(), r: prod.conductor() };
    let case = classify(c);
    let mut by_mode = BTreeMap::new();
    for &mode in modes {
        let res = if case.is_excluded() {
            let why = match case {
                CaseTag::ExcludedUnramifiedProduct => "r=0",
                _ => "unramified factor",
            };
            ModeResult { rhs: None, verdict: Verdict::Undefined(why.into()) }
        } else {
            ModeResult::from_rhs(&lhs, case_formula_rhs(chi1, chi2, psi, case, mode))
        };
        by_mode.insert(mode, res);
    }
    let forced_case2 = (case == CaseTag::ExcludedUnramifiedProduct).then(|| {
        ModeResult::from_rhs(&lhs, case_formula_rhs(chi1, chi2, psi, CaseTag::Case2, JacobiMode::Strict))
    });
    Ok(PairReport {
        chi1: chi1.clone(),
        chi2: chi2.clone(),
        case,
        conductors: c,
        lhs,
        by_mode,
        forced_case2,
    })
}

/// Largest allowed `(p-1) p^{n-1}`: `EPSLAB_MAX_GROUP` if set, else [`DEFAULT_MAX_GROUP`].
pub fn max_group() -> u64 {
    std::env::var("EPSLAB_MAX_GROUP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_GROUP)
}

pub fn check_scale(p: Prime, n: u32, force: bool) -> Result<()> {
    let order = p
        .checked_pow(n.saturating_sub(1))
        .and_then(|x| x.checked_mul(p.get() - 1))
        .unwrap_or(u64::MAX);
    let limit = max_group();
    if !force && order > limit {
        return Err(Error::Scale { order, limit });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub p: Prime,
    pub n_max: u32,
    pub psi: AddChar,
    pub modes: Vec<JacobiMode>,
    /// values of `chi(pi)` to range over; `[1]` by default
    pub pi_values: Vec<RootOfUnity>,
    pub force: bool,
}

impl SweepConfig {
    pub fn new(p: Prime, n_max: u32, modes: Vec<JacobiMode>) -> Self {
        SweepConfig {
            p,
            n_max,
            psi: AddChar::canonical(p),
            modes,
            pi_values: vec![RootOfUnity::one()],
            force: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub exact: usize,
    pub float: usize,
    pub mismatch: usize,
    pub undefined: usize,
}

impl Tally {
    fn add(&mut self, v: &Verdict) {
        match v {
            Verdict::ExactMatch => self.exact += 1,
            Verdict::FloatMatch(_) => self.float += 1,
            Verdict::Mismatch(_) => self.mismatch += 1,
            Verdict::Undefined(_) => self.undefined += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.exact + self.float + self.mismatch + self.undefined
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub pairs: Vec<PairReport>,
    pub counts: BTreeMap<CaseTag, usize>,
    pub tallies: BTreeMap<CaseTag, BTreeMap<JacobiMode, Tally>>,
}

impl SweepReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &PairReport> {
        self.pairs.iter().filter(|r| r.has_mismatch())
    }

    pub fn has_mismatch(&self) -> bool {
        self.mismatches().next().is_some()
    }

    pub fn tally(&self, case: CaseTag, mode: JacobiMode) -> Tally {
        self.tallies
            .get(&case)
            .and_then(|m| m.get(&mode))
            .cloned()
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        let mut counts = Map::new();
        for (k, v) in &self.counts {
            counts.insert(k.name().into(), json!(v));
        }
        let mut verdicts = Map::new();
        for (case, modes) in &self.tallies {
            let mut inner = Map::new();
            for (mode, t) in modes {
                inner.insert(
                    mode.to_string(),
                    json!({"exact": t.exact, "float": t.float, "mismatch": t.mismatch, "undefined": t.undefined}),
                );
            }
            verdicts.insert(case.name().into(), Value::Object(inner));
        }
        let mut psi = self.config.psi.to_json();
        psi.as_object_mut()
            .unwrap()
            .insert("descriptor".into(), json!(self.config.psi.descriptor()));
        json!({
            "p": self.config.p.get(),
            "n_max": self.config.n_max,
            "psi": psi,
            "modes": self.config.modes.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "pi_values": self.config.pi_values.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
            "pairs": self.pairs.len(),
            "counts": counts,
            "verdicts": verdicts,
            "mismatches": self.mismatches().map(PairReport::to_json).collect::<Vec<_>>(),
        })
    }

    /// Pretty JSON with a trailing newline; the committed report format.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,mode,pairs,exact,float,mismatch,undefined\n");
        for (case, n) in &self.counts {
            for mode in &self.config.modes {
                let t = self.tally(*case, *mode);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    case, mode, n, t.exact, t.float, t.mismatch, t.undefined
                ));
            }
        }
        out
    }
}

/// Ramified characters of conductor `<= n_max`, each stored at its own conductor level,
/// in enumeration order, crossed with the requested values at `pi`.
pub fn ramified_characters(p: Prime, n_max: u32, pi_values: &[RootOfUnity]) -> Result<Vec<MultChar>> {
    let mut out = Vec::new();
    for chi in enumerate_chars(p, n_max as i64, None)? {
        if !chi.is_ramified() {
            continue;
        }
        let base = chi.at_level(chi.conductor())?;
        for z in pi_values {
            out.push(base.with_pi(*z));
        }
    }
    Ok(out)
}

/// All ordered pairs of ramified characters of conductor `<= n_max`.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    check_scale(cfg.p, cfg.n_max, cfg.force)?;
    let chars = ramified_characters(cfg.p, cfg.n_max, &cfg.pi_values)?;
    let pairs: Vec<(usize, usize)> = (0..chars.len())
        .flat_map(|i| (0..chars.len()).map(move |j| (i, j)))
        .collect();
    let reports: Vec<PairReport> = pairs
        .par_iter()
        .map(|&(i, j)| verify_pair(&chars[i], &chars[j], &cfg.psi, &cfg.modes))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<CaseTag, usize> = BTreeMap::new();
    let mut tallies: BTreeMap<CaseTag, BTreeMap<JacobiMode, Tally>> = BTreeMap::new();
    for r in &reports {
        *counts.entry(r.case).or_default() += 1;
        let per = tallies.entry(r.case).or_default();
        for (mode, res) in &r.by_mode {
            per.entry(*mode).or_default().add(&res.verdict);
        }
    }
    Ok(SweepReport { config: cfg.clone(), pairs: reports, counts, tallies })
}

/// `eps(chi1, psi) eps(chi2, psi)` rebuilt from the sum over `t = x + y`: unit `t` through
/// `J_t = (chi1 chi2)^{-1}(t) J_1`, non-unit `t` summed directly. Needs `a(chi1) = a(chi2) >= 1`.
pub fn epsilon_product_double_sum(chi1: &MultChar, chi2: &MultChar, psi: &AddChar) -> Result<HalfScaled> {
    let n = chi1.conductor();
    if n == 0 || chi2.conductor() != n {
        return Err(Error::Precondition("needs two ramified characters of equal conductor".into()));
    }
    let p = chi1.p();
    let q = p.get();
    let pn = p.pow(n);
    let prod = chi1.mul(chi2)?;
    let j1 = jacobi_strict(chi1, chi2, 1, n as i64)?;
    let cinv = ValUnit::pi_power(p, -(n as i64 + psi.conductor()));
    let mut total = Cyclo::zero();
    let mut unit_part = Cyclo::zero();
    for t in 0..pn {
        let psi_t = if t == 0 {
            RootOfUnity::one()
        } else {
            let v = crate::padic::valuation(t as u128, q);
            let tv = ValUnit::new(p, v as i64, t / p.pow(v), n - v)?;
            psi.eval(&tv.mul(&cinv))?
        };
        if t % q != 0 {
            // accumulate psi(t/c) (chi1 chi2)^{-1}(t); multiplied by J_1 once at the end
            unit_part = &unit_part + &psi_t.mul(&prod.unit_value(t)?.inv()).to_cyclo();
        } else {
            let k = jacobi_strict(chi1, chi2, t, n as i64)?;
            total = &total + &k.mul_root(&psi_t);
        }
    }
    total = &total + &unit_part.mul(&j1);
    let chi_c = prod.pi_value().pow(n as i64 + psi.conductor());
    Ok(HalfScaled::new(total.mul_root(&chi_c), -2 * n as i64, q))
}

/// `|z1 - z2|`.
pub fn float_delta(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::mult_char_make;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn chi(p: u64, n: i64, exps: &[u64]) -> MultChar {
        mult_char_make(pr(p), n, exps, 1, 0).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c4 = chi(5, 1, &[1]);
        assert_eq!(classify_case(&c4, &c4).unwrap(), CaseTag::Case1);
        let q5 = chi(5, 1, &[2]);
        assert_eq!(classify_case(&q5, &q5).unwrap(), CaseTag::ExcludedUnramifiedProduct);
        let k1 = chi(3, 2, &[1]);
        let q3 = chi(3, 1, &[1]);
        assert_eq!(classify_case(&k1, &q3).unwrap(), CaseTag::Case3);
        assert_eq!(classify_case(&q3, &k1).unwrap(), CaseTag::Case3);
        let t = MultChar::trivial(pr(3), 1).unwrap();
        assert_eq!(classify_case(&q3, &t).unwrap(), CaseTag::ExcludedUnramifiedFactor);
    }

    #[test]
    fn worked_case1_pair() {
        let psi = AddChar::canonical(pr(5));
        let c4 = chi(5, 1, &[1]);
        let j = jacobi_strict(&c4, &c4, 1, 1).unwrap();
        assert_eq!(j, &Cyclo::from_int(-1) + &Cyclo::root(4, 1).scale_int(2));
        let rhs = formula_rhs(&c4, &c4, &psi, JacobiMode::Strict).unwrap();
        assert!(float_delta(rhs.embed(), Complex64::new(1.0, 0.0)) < 1e-12);
        let r = verify_pair(&c4, &c4, &psi, &[JacobiMode::Strict]).unwrap();
        assert_eq!(r.by_mode[&JacobiMode::Strict].verdict, Verdict::ExactMatch);
        assert!(float_delta(r.lhs.embed(), Complex64::new(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn forced_case2_on_unramified_product() {
        let psi = AddChar::canonical(pr(5));
        let q5 = chi(5, 1, &[2]);
        let rhs = case_formula_rhs(&q5, &q5, &psi, CaseTag::Case2, JacobiMode::Strict).unwrap();
        assert_eq!(rhs, HalfScaled::from_cyclo(Cyclo::from_int(-1), 5));
        let r = verify_pair(&q5, &q5, &psi, &[JacobiMode::Strict]).unwrap();
        assert_eq!(r.case, CaseTag::ExcludedUnramifiedProduct);
        assert_eq!(r.lhs, HalfScaled::one(5));
        assert_eq!(r.by_mode[&JacobiMode::Strict].verdict, Verdict::Undefined("r=0".into()));
        assert!(r.forced_case2.as_ref().unwrap().verdict.is_mismatch());
        assert!(matches!(formula_rhs(&q5, &q5, &psi, JacobiMode::Strict), Err(Error::Precondition(_))));
    }

    #[test]
    fn case1_inverse_family_at_p5() {
        let psi = AddChar::canonical(pr(5));
        let all = enumerate_chars(pr(5), 1, Some(1)).unwrap();
        let mut checked = 0;
        for a in &all {
            for b in &all {
                if classify_case(a, b).unwrap() == CaseTag::Case1 {
                    let r = verify_pair(a, b, &psi, &[JacobiMode::Strict]).unwrap();
                    assert_eq!(r.by_mode[&JacobiMode::Strict].verdict, Verdict::ExactMatch);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 6);
    }

    #[test]
    fn sweep_counts() {
        let r = sweep(&SweepConfig::new(pr(5), 1, vec![JacobiMode::Strict])).unwrap();
        assert_eq!(r.counts.get(&CaseTag::Case1), Some(&6));
        assert_eq!(r.counts.get(&CaseTag::ExcludedUnramifiedProduct), Some(&3));
        let r = sweep(&SweepConfig::new(pr(3), 1, vec![JacobiMode::Strict])).unwrap();
        assert_eq!(r.pairs.len(), 1);
        let r = sweep(&SweepConfig::new(pr(3), 2, vec![JacobiMode::Strict, JacobiMode::AutoShell])).unwrap();
        assert_eq!(r.pairs.len(), 25);
        for c in [CaseTag::Case1, CaseTag::Case2, CaseTag::Case3] {
            assert!(r.counts.get(&c).copied().unwrap_or(0) > 0, "{c}");
        }
    }

    #[test]
    fn pair_report_round_trip() {
        let r = sweep(&SweepConfig::new(pr(3), 2, vec![JacobiMode::Strict, JacobiMode::AutoShell])).unwrap();
        for pair in &r.pairs {
            let v = pair.to_json();
            let back = PairReport::from_json(&v).unwrap();
            assert_eq!(back.to_json(), v);
            let lhs = epsilon(&back.chi1.mul(&back.chi2).unwrap(), &AddChar::canonical(pr(3))).unwrap();
            assert_eq!(lhs.value, back.lhs);
        }
    }

    #[test]
    fn double_sum_matches_product() {
        let psi = AddChar::canonical(pr(3));
        let all = enumerate_chars(pr(3), 2, None).unwrap();
        for a in all.iter().filter(|c| c.is_ramified()) {
            for b in all.iter().filter(|c| c.conductor() == a.conductor()) {
                let tag = classify_case(a, b).unwrap();
                if !matches!(tag, CaseTag::Case1 | CaseTag::Case2) {
                    continue;
                }
                let ds = epsilon_product_double_sum(a, b, &psi).unwrap();
                let direct = epsilon(a, &psi).unwrap().value.mul(&epsilon(b, &psi).unwrap().value);
                assert_eq!(ds, direct, "{a:?} {b:?}");
            }
        }
    }
}
