//! Identity suites: each one checks a family of exact identities over every character at a
//! given scale and reports how many checks ran and which failed.

use std::fmt;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::characters::{enumerate_chars, mult_char_make, AddChar, MultChar};
use crate::cyclo::{Cyclo, RootOfUnity};
use crate::epsilon::{
    check_y_relation, deligne_twist, epsilon, epsilon_additive_twist, epsilon_at, epsilon_bh,
    epsilon_bh_direct, epsilon_inverse_product, solve_y, tate_unramified_twist,
};
use crate::error::{Error, Result};
use crate::padic::{Prime, ValUnit};
use crate::sums::{char_sum_i, gauss_sum, jacobi_strict, jacobi_translated, varphi, varphi_closed_form, JacobiMode};
use crate::twist::{classify_case, sweep, verify_pair, CaseTag, SweepConfig, SweepReport, Verdict};

/// Suite names accepted by `verify`, in acceptance-criterion order.
pub const SUITES: [&str; 13] = [
    "gauss-modulus",
    "vanishing-integral",
    "varphi",
    "inverse-product",
    "additive-twist",
    "c-unit",
    "tate",
    "deligne",
    "bridge",
    "case1",
    "sweep",
    "gauss-levels",
    "jacobi-translation",
];

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// (prime, maximal level) pairs
    pub scale: Vec<(Prime, u32)>,
    /// restrict to characters of this exact conductor, where meaningful
    pub conductor: Option<u32>,
    /// range of `m` for the vanishing-integral suite
    pub m_range: (i64, i64),
    pub seed: u64,
    /// directory holding committed sweep reports to compare against
    pub reports_dir: Option<PathBuf>,
}

fn pr(p: u64) -> Prime {
    Prime::new(p).expect("literal prime")
}

impl SuiteOptions {
    /// `p in {2,3,5,7}`, levels up to 3 (4 for `p = 3`).
    pub fn desk_scale() -> Self {
        SuiteOptions {
            scale: vec![(pr(2), 3), (pr(3), 4), (pr(5), 3), (pr(7), 3)],
            conductor: None,
            m_range: (-3, 3),
            seed: 0x5eed,
            reports_dir: None,
        }
    }

    pub fn single(p: Prime, n: u32) -> Self {
        SuiteOptions { scale: vec![(p, n)], ..SuiteOptions::desk_scale() }
    }

    fn restrict(&self, keep: impl Fn(u64, u32) -> Option<u32>) -> Vec<(Prime, u32)> {
        self.scale
            .iter()
            .filter_map(|&(p, n)| keep(p.get(), n).map(|m| (p, m)))
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{}: {e}", what()));
            }
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed(), self.checks) {
            (true, 0) => "SKIP",
            (true, _) => "PASS",
            _ => "FAIL",
        };
        write!(f, "{status} {} ({} checks", self.name, self.checks)?;
        if !self.failures.is_empty() {
            write!(f, ", {} failed; first: {}", self.failures.len(), self.failures[0])?;
        }
        write!(f, ")")
    }
}

/// Additive characters `u p^v psi_F` for `v in {-1, 0, 1}` and two unit parts.
fn psi_family(p: Prime) -> Vec<AddChar> {
    let mut out = Vec::new();
    for v in -1..=1 {
        for u in [1i64, -1] {
            let b = ValUnit::exact(p, v, u).unwrap();
            if out.iter().all(|x: &AddChar| x.b != b) {
                out.push(AddChar::new(b));
            }
        }
    }
    out
}

fn chars_at(p: Prime, n: u32, conductor: Option<u32>) -> Result<Vec<MultChar>> {
    let all = enumerate_chars(p, n as i64, None)?;
    Ok(all
        .into_iter()
        .filter(|c| conductor.is_none_or(|a| c.conductor() == a))
        .collect())
}

fn ramified(p: Prime, n: u32, conductor: Option<u32>) -> Result<Vec<MultChar>> {
    Ok(chars_at(p, n, conductor)?.into_iter().filter(MultChar::is_ramified).collect())
}

fn q_power(q: u64, k: i64) -> Cyclo {
    let qk = BigInt::from(q).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Cyclo::from_bigint(qk)
    } else {
        Cyclo::one().scale(&BigInt::one(), &qk)
    }
}

/// `|G(chi, psi, a(chi))|^2 = q^{a(chi)}` for every ramified character and `v(b) in {-1, 0, 1}`.
pub fn gauss_modulus(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("gauss-modulus");
    for &(p, n) in &opts.scale {
        for chi in ramified(p, n, opts.conductor)? {
            for psi in psi_family(p) {
                let a = chi.conductor();
                let g = gauss_sum(&chi, &psi, a as i64)?;
                res.check(g.abs_square() == q_power(p.get(), a as i64), || {
                    format!("{chi} with {}", psi.descriptor())
                });
            }
        }
    }
    Ok(res)
}

/// `I(m) = 0` for `m != 0` and `|I(0)|^2 = q^{-a(chi)}`.
pub fn vanishing_integral(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("vanishing-integral");
    let (lo, hi) = opts.m_range;
    for &(p, n) in &opts.scale {
        let chars = ramified(p, n, opts.conductor)?;
        let psi = AddChar::canonical(p);
        for m in lo..=hi {
            let before = res.failures.len();
            for chi in &chars {
                let i = char_sum_i(chi, &psi, m)?;
                if m == 0 {
                    let want = q_power(p.get(), -(chi.conductor() as i64));
                    res.check(i.abs_square() == want, || format!("|I(0)|^2 for {chi}"));
                } else {
                    res.check(i.is_zero(), || format!("I({m}) != 0 for {chi}"));
                }
            }
            let status = if res.failures.len() == before { "PASS" } else { "FAIL" };
            let what = if m == 0 { "|I(0)|^2 = q^-a".to_string() } else { format!("I({m}) = 0") };
            res.notes.push(format!("{status} p={p} m={m}: {what} over {} characters", chars.len()));
        }
    }
    Ok(res)
}

/// Direct `varphi(x)` against its closed form, `p <= 5`, `a <= 3`.
pub fn varphi_suite(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("varphi");
    for (p, amax) in opts.restrict(|p, n| (p <= 5).then_some(n.min(3))) {
        let psi = AddChar::canonical(p);
        for a in 1..=amax {
            for x in (1..p.pow(a)).filter(|x| x % p.get() != 0) {
                let direct = varphi(x, a, &psi)?;
                let closed = Cyclo::from_int(varphi_closed_form(x, a, p));
                res.check(direct == closed, || format!("p={p} a={a} x={x}"));
            }
        }
    }
    Ok(res)
}

/// `eps(chi) eps(chi^{-1}) = chi(-1)` and `|eps|^2 = 1`.
pub fn inverse_product(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("inverse-product");
    for &(p, n) in &opts.scale {
        let minus_one = p.pow(n) - 1;
        for chi in chars_at(p, n, opts.conductor)? {
            for psi in psi_family(p) {
                let prod = epsilon_inverse_product(&chi, &psi)?;
                let want = chi.unit_value(minus_one)?.to_cyclo();
                res.check(prod == want, || format!("eps eps^-1 for {chi}, {}", psi.descriptor()));
                let e = epsilon(&chi, &psi)?;
                res.check(e.is_unitary(), || format!("|eps|^2 for {chi}, {}", psi.descriptor()));
            }
        }
    }
    Ok(res)
}

fn random_unit(rng: &mut ChaCha8Rng, p: Prime) -> i64 {
    loop {
        let u: i64 = rng.gen_range(1..1_000_000);
        if u as u64 % p.get() != 0 {
            return u;
        }
    }
}

/// `eps(chi, b psi_F) = chi(b) eps(chi, psi_F)` for random `b` with `v(b) in [-2, 2]`.
pub fn additive_twist(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("additive-twist");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for &(p, n) in &opts.scale {
        let psi = AddChar::canonical(p);
        for chi in chars_at(p, n, opts.conductor)? {
            for _ in 0..10 {
                let v = rng.gen_range(-2..=2);
                let b = ValUnit::exact(p, v, random_unit(&mut rng, p))?;
                let formula = epsilon_additive_twist(&chi, &psi, &b)?;
                let direct = epsilon(&chi, &psi.twist(&b))?;
                res.check(formula.value == direct.value, || format!("{chi}, b = {b}"));
            }
        }
    }
    Ok(res)
}

/// `eps(chi, psi, c u) = eps(chi, psi, c)` for random units `u`.
pub fn c_unit(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("c-unit");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc);
    for &(p, n) in &opts.scale {
        for chi in chars_at(p, n, opts.conductor)? {
            for psi in psi_family(p) {
                let base = epsilon(&chi, &psi)?;
                let v = chi.conductor() as i64 + psi.conductor();
                for _ in 0..10 {
                    let c = ValUnit::exact(p, v, random_unit(&mut rng, p))?;
                    let e = epsilon_at(&chi, &psi, &c)?;
                    res.check(e.value == base.value, || format!("{chi}, c = {c}"));
                }
            }
        }
    }
    Ok(res)
}

fn sixth_roots() -> Vec<RootOfUnity> {
    (0..6).map(|k| RootOfUnity::new(6, k)).collect()
}

/// Tate's unramified twist against the direct value, and multiplicativity on unramified pairs.
pub fn tate(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("tate");
    for &(p, n) in &opts.scale {
        let unram: Vec<MultChar> = sixth_roots()
            .into_iter()
            .map(|z| mult_char_make(p, 1, &vec![0; p_rank(p, 1)], z.order, z.exp as i64))
            .collect::<Result<_>>()?;
        for psi in psi_family(p) {
            for chi1 in ramified(p, n, opts.conductor)? {
                for chi2 in &unram {
                    let formula = tate_unramified_twist(&chi1, chi2, &psi)?;
                    let direct = epsilon(&chi1.mul(chi2)?, &psi)?;
                    res.check(formula.value == direct.value, || {
                        format!("{chi1} x {chi2}, {}", psi.descriptor())
                    });
                }
            }
            for a in &unram {
                for b in &unram {
                    let lhs = epsilon(&a.mul(b)?, &psi)?.value;
                    let rhs = epsilon(a, &psi)?.value.mul(&epsilon(b, &psi)?.value);
                    res.check(lhs == rhs, || format!("unramified {a} x {b}"));
                }
            }
        }
    }
    Ok(res)
}

fn p_rank(p: Prime, n: i64) -> usize {
    crate::padic::cached_structure(p, n).map(|s| s.rank()).unwrap_or(0)
}

/// Deligne's twist against the direct value for `a(alpha) >= 2 a(beta) >= 2`, `p in {3, 5}`,
/// `a(alpha) <= 4`, plus the defining relation of `y` for every `alpha`.
pub fn deligne(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("deligne");
    let scale = if opts.scale.len() > 1 {
        vec![(pr(3), 4), (pr(5), 4)]
    } else {
        opts.restrict(|p, n| (p == 3 || p == 5).then_some(n.min(4)))
    };
    for (p, n) in scale {
        let all = chars_at(p, n, None)?;
        for psi in [AddChar::canonical(p), AddChar::new(ValUnit::exact(p, -1, 2)?)] {
            for alpha in all.iter().filter(|c| c.conductor() >= 1) {
                if opts.conductor.is_some_and(|a| a != alpha.conductor()) {
                    continue;
                }
                let y = solve_y(alpha, &psi)?;
                if alpha.conductor() >= 2 {
                    res.check_result(check_y_relation(alpha, &psi, &y), || {
                        format!("y relation for {alpha}")
                    });
                }
                let max_b = alpha.conductor() / 2;
                if max_b == 0 {
                    continue;
                }
                for beta in all.iter().filter(|b| (1..=max_b).contains(&b.conductor())) {
                    let beta = beta.at_level(beta.conductor())?;
                    for z in [RootOfUnity::one(), RootOfUnity::new(6, 1)] {
                        let beta = beta.with_pi(z);
                        let formula = deligne_twist(alpha, &beta, &psi)?;
                        let direct = epsilon(&alpha.mul(&beta)?, &psi)?;
                        res.check(formula.value == direct.value, || {
                            format!("{alpha} x {beta}, {}", psi.descriptor())
                        });
                    }
                }
            }
        }
    }
    Ok(res)
}

/// `eps_BH` from `eps` against the explicit `n(psi) = -1` sums, `p = 5`, `n <= 2`.
pub fn bridge(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("bridge");
    let scale = if opts.scale.len() > 1 { vec![(pr(5), 2)] } else { opts.scale.clone() };
    let ss = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
    ];
    for (p, n) in scale {
        let psi = AddChar::new(ValUnit::exact(p, -1, 1)?);
        for chi in chars_at(p, n, opts.conductor)? {
            let variants: Vec<MultChar> = if chi.is_ramified() {
                vec![chi.clone(), chi.with_pi(RootOfUnity::new(6, 1))]
            } else {
                sixth_roots().into_iter().map(|z| chi.with_pi(z)).collect()
            };
            for c in variants {
                for s in ss {
                    let a = epsilon_bh(&c, s, &psi)?;
                    let b = epsilon_bh_direct(&c, s, &psi)?;
                    res.check((a - b).norm() <= crate::twist::FLOAT_TOL, || {
                        format!("{c} at s = {s}: {a} vs {b}")
                    });
                }
            }
        }
    }
    Ok(res)
}

/// Case 1 pairs verify exactly under the strict reading, and `|J_1|^2 = q^n`.
pub fn case1(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("case1");
    let scale = if opts.scale.len() > 1 {
        vec![(pr(3), 2), (pr(5), 2), (pr(7), 1)]
    } else {
        opts.scale.clone()
    };
    for (p, n) in scale {
        let psi = AddChar::canonical(p);
        let chars = ramified(p, n, None)?;
        let mut pairs = 0;
        for a in &chars {
            for b in &chars {
                if classify_case(a, b)? != CaseTag::Case1 {
                    continue;
                }
                pairs += 1;
                let r = verify_pair(a, b, &psi, &[JacobiMode::Strict])?;
                let v = &r.by_mode[&JacobiMode::Strict].verdict;
                res.check(*v == Verdict::ExactMatch, || format!("{a} x {b}: {v}"));
                let lvl = a.conductor();
                let j = jacobi_strict(a, b, 1, lvl as i64)?;
                res.check(j.abs_square() == q_power(p.get(), lvl as i64), || {
                    format!("|J_1|^2 for {a} x {b}")
                });
            }
        }
        res.notes.push(format!("p={p} n<={n}: {pairs} Case1 pairs"));
    }
    if opts.scale.len() > 1 {
        // the worked pair at p = 5
        let p = pr(5);
        let c4 = mult_char_make(p, 1, &[1], 1, 0)?;
        let j = jacobi_strict(&c4, &c4, 1, 1)?;
        let want = &Cyclo::from_int(-1) + &Cyclo::root(4, 1).scale_int(2);
        res.check(j == want, || format!("J_1(chi4, chi4) = {j}"));
        let r = verify_pair(&c4, &c4, &AddChar::canonical(p), &[JacobiMode::Strict])?;
        let one = Complex64::new(1.0, 0.0);
        res.check(
            r.by_mode[&JacobiMode::Strict].verdict == Verdict::ExactMatch && (r.lhs.embed() - one).norm() < 1e-12,
            || "worked pair (chi4, chi4)".into(),
        );
    }
    Ok(res)
}

/// The sweep configurations whose reports are committed.
pub fn committed_sweeps() -> Vec<SweepConfig> {
    [3u64, 5]
        .into_iter()
        .map(|p| SweepConfig::new(pr(p), 2, vec![JacobiMode::Strict, JacobiMode::AutoShell]))
        .collect()
}

pub fn report_file_name(cfg: &SweepConfig) -> String {
    format!("sweep_p{}_n{}.json", cfg.p, cfg.n_max)
}

/// Structural check of a serialized sweep report.
pub fn validate_report_schema(v: &Value) -> std::result::Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    for k in ["p", "n_max"] {
        obj.get(k).and_then(Value::as_u64).ok_or(format!("{k} must be an integer"))?;
    }
    obj.get("psi").and_then(Value::as_object).ok_or("psi must be an object")?;
    let modes = obj.get("modes").and_then(Value::as_array).ok_or("modes must be an array")?;
    let counts = obj.get("counts").and_then(Value::as_object).ok_or("counts must be an object")?;
    let mut total = 0;
    for (case, n) in counts {
        CaseTag::parse(case).map_err(|e| e.to_string())?;
        total += n.as_u64().ok_or("counts must be integers")?;
    }
    if obj.get("pairs").and_then(Value::as_u64) != Some(total) {
        return Err("counts do not sum to the number of pairs".into());
    }
    let verdicts = obj.get("verdicts").and_then(Value::as_object).ok_or("verdicts must be an object")?;
    for (case, per_mode) in verdicts {
        CaseTag::parse(case).map_err(|e| e.to_string())?;
        let per_mode = per_mode.as_object().ok_or("verdicts entries must be objects")?;
        if per_mode.len() != modes.len() {
            return Err(format!("{case}: expected one tally per mode"));
        }
        let mut sum = None;
        for (mode, t) in per_mode {
            mode.parse::<JacobiMode>().map_err(|e| e.to_string())?;
            let mut s = 0;
            for k in ["exact", "float", "mismatch", "undefined"] {
                s += t.get(k).and_then(Value::as_u64).ok_or(format!("{case}/{mode}: {k} missing"))?;
            }
            if *sum.get_or_insert(s) != s || Some(s) != counts.get(case).and_then(Value::as_u64) {
                return Err(format!("{case}/{mode}: tallies do not match counts"));
            }
        }
    }
    let mismatches = obj.get("mismatches").and_then(Value::as_array).ok_or("mismatches must be an array")?;
    for m in mismatches {
        crate::twist::PairReport::from_json(m).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn sweep_checks(res: &mut SuiteResult, cfg: &SweepConfig, report: &SweepReport, text: &str, opts: &SuiteOptions) -> Result<()> {
    let again = sweep(cfg)?.to_json_string();
    res.check(again == text, || format!("p={}: sweep output is not deterministic", cfg.p));
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let schema = validate_report_schema(&v);
    res.check(schema.is_ok(), || format!("p={}: schema: {:?}", cfg.p, schema.err()));
    if let Some(dir) = &opts.reports_dir {
        let path = dir.join(report_file_name(cfg));
        let committed = std::fs::read_to_string(&path).unwrap_or_default();
        res.check(committed == text, || format!("{} differs from a fresh sweep", path.display()));
    }
    for case in [CaseTag::Case2, CaseTag::Case3] {
        for mode in &cfg.modes {
            let t = report.tally(case, *mode);
            res.notes.push(format!(
                "p={} {case} {mode}: exact={} float={} mismatch={} undefined={}",
                cfg.p, t.exact, t.float, t.mismatch, t.undefined
            ));
        }
    }
    Ok(())
}

/// Committed sweeps: determinism, schema, agreement with the files in `reports_dir`, and the
/// flagged `r = 0` quadratic pair at `p = 5`.
pub fn sweep_suite(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("sweep");
    let configs = if opts.scale.len() > 1 {
        committed_sweeps()
    } else {
        let (p, n) = opts.scale[0];
        vec![SweepConfig::new(p, n, vec![JacobiMode::Strict, JacobiMode::AutoShell])]
    };
    for cfg in configs {
        let report = sweep(&cfg)?;
        let text = report.to_json_string();
        sweep_checks(&mut res, &cfg, &report, &text, opts)?;
        if cfg.p.get() == 5 {
            let q5 = mult_char_make(cfg.p, 1, &[2], 1, 0)?;
            let flagged = report.mismatches().find(|r| r.chi1 == q5 && r.chi2 == q5);
            let ok = flagged.is_some_and(|r| {
                let one = Complex64::new(1.0, 0.0);
                let forced = r.forced_case2.as_ref().and_then(|f| f.rhs.as_ref());
                r.case == CaseTag::ExcludedUnramifiedProduct
                    && (r.lhs.embed() - one).norm() < 1e-12
                    && forced.is_some_and(|f| (f.embed() + one).norm() < 1e-12)
            });
            res.check(ok, || "quadratic pair at p=5 is not flagged with 1 vs -1".into());
        }
    }
    Ok(res)
}

/// `G(chi, psi, n1) = q^{n1 - n2} G(chi, psi, n2)` for `n1 > n2 >= max(a, 1)`, `n1 <= 4`.
pub fn gauss_levels(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("gauss-levels");
    for &(p, n) in &opts.scale {
        for chi in chars_at(p, n, opts.conductor)? {
            for psi in [AddChar::canonical(p), AddChar::new(ValUnit::exact(p, 1, 1)?)] {
                let lo = chi.conductor().max(1);
                let sums: Vec<(u32, Cyclo)> = (lo..=4)
                    .map(|m| gauss_sum(&chi, &psi, m as i64).map(|g| (m, g)))
                    .collect::<Result<_>>()?;
                for (i, (n1, g1)) in sums.iter().enumerate() {
                    for (n2, g2) in &sums[..i] {
                        let scaled = g2.mul(&q_power(p.get(), (n1 - n2) as i64));
                        res.check(*g1 == scaled, || format!("{chi}: levels {n1} vs {n2}"));
                    }
                }
            }
        }
    }
    Ok(res)
}

/// `J_1 = chi1 chi2 (t) J_t` for all units `t`, all pairs, `p <= 5`, `n <= 2`.
pub fn jacobi_translation(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("jacobi-translation");
    for (p, n) in opts.restrict(|p, n| (p <= 5).then_some(n.min(2))) {
        let chars = chars_at(p, n, None)?;
        for a in &chars {
            for b in &chars {
                let j1 = jacobi_strict(a, b, 1, n as i64)?;
                for t in (1..p.pow(n)).filter(|t| t % p.get() != 0) {
                    let jt = jacobi_translated(a, b, t, n as i64)?;
                    res.check(jt == j1, || format!("{a} x {b}, t = {t}"));
                }
            }
        }
    }
    Ok(res)
}

/// Runs one suite by name.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteResult> {
    match name {
        "gauss-modulus" => gauss_modulus(opts),
        "vanishing-integral" => vanishing_integral(opts),
        "varphi" => varphi_suite(opts),
        "inverse-product" => inverse_product(opts),
        "additive-twist" => additive_twist(opts),
        "c-unit" => c_unit(opts),
        "tate" => tate(opts),
        "deligne" => deligne(opts),
        "bridge" => bridge(opts),
        "case1" => case1(opts),
        "sweep" => sweep_suite(opts),
        "gauss-levels" => gauss_levels(opts),
        "jacobi-translation" => jacobi_translation(opts),
        other => Err(Error::Parse(format!(
            "unknown suite {other:?}; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scale_suites_pass() {
        let opts = SuiteOptions::single(pr(3), 2);
        for name in SUITES {
            if name == "sweep" {
                continue;
            }
            let r = run_suite(name, &opts).unwrap();
            assert!(r.passed() && r.checks > 0, "{r}");
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &SuiteOptions::desk_scale()).is_err());
    }
}
