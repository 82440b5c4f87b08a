//! Finite character sums: Gauss sums `G(chi, psi, m)`, the normalized integrals `I(m)`, the
//! inner sum `varphi(x)`, and local Jacobi sums in the strict and shell readings.
//!
//! Every sum is accumulated in the integer group ring `Z[C_N]` (one counter per power of
//! `zeta_N`) and reduced into `Q(zeta_N)` once at the end.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::characters::{AddChar, MultChar};
use crate::cyclo::{lcm, Cyclo, HalfScaled, RootOfUnity};
use crate::error::{Error, Result};
use crate::padic::{mul_mod, Prime, ValUnit};

/// Which set of `x` the Jacobi sum `J_1(chi1, chi2, n)` runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JacobiMode {
    /// `x` and `1 - x` both units.
    Strict,
    /// `s` with `v(1 - s) = v`, `chi2` evaluated on the non-unit `1 - s`.
    Shell(u32),
    /// The shell picked by the case: `v = n - r` or `v = n - m`.
    AutoShell,
}

impl fmt::Display for JacobiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JacobiMode::Strict => write!(f, "strict"),
            JacobiMode::Shell(v) => write!(f, "shell:{v}"),
            JacobiMode::AutoShell => write!(f, "auto"),
        }
    }
}

impl FromStr for JacobiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strict" => Ok(JacobiMode::Strict),
            "auto" | "autoshell" | "auto-shell" => Ok(JacobiMode::AutoShell),
            other => {
                let v = other
                    .strip_prefix("shell:")
                    .ok_or_else(|| Error::Parse(format!("unknown Jacobi mode {other:?}")))?;
                v.parse::<u32>()
                    .map(JacobiMode::Shell)
                    .map_err(|e| Error::Parse(format!("bad shell index {v:?}: {e}")))
            }
        }
    }
}

/// Group-ring accumulator for sums of roots of unity of order dividing `n`.
pub(crate) struct Accum {
    n: u64,
    counts: Vec<i64>,
}

impl Accum {
    pub(crate) fn new(n: u64) -> Self {
        Accum { n, counts: vec![0; n as usize] }
    }

    /// Adds `zeta_{ord}^{e}`; `ord` must divide `n`.
    #[inline]
    pub(crate) fn push(&mut self, ord: u64, e: u64) {
        let k = (e % ord) * (self.n / ord);
        self.counts[k as usize] += 1;
    }

    /// Adds `zeta_{o1}^{e1} zeta_{o2}^{e2}`.
    #[inline]
    pub(crate) fn push2(&mut self, o1: u64, e1: u64, o2: u64, e2: u64) {
        let k = ((e1 % o1) * (self.n / o1) + (e2 % o2) * (self.n / o2)) % self.n;
        self.counts[k as usize] += 1;
    }

    #[inline]
    pub(crate) fn push_root(&mut self, z: &RootOfUnity) {
        self.push(z.order, z.exp)
    }

    pub(crate) fn finish(&self) -> Cyclo {
        Cyclo::from_group_ring(self.n, &self.counts)
    }
}

/// `psi(x p^w)` for a unit residue `x` known modulo `p^prec`, as `(order, exponent)`.
fn psi_unit_shift(psi: &AddChar, x: u64, w: i64, prec: u32) -> Result<(u64, u64)> {
    let p = psi.p();
    let d = -(w + psi.conductor());
    if d <= 0 {
        return Ok((1, 0));
    }
    let d = d as u32;
    if psi.b.k < d || prec < d {
        return Err(Error::Precision(format!(
            "psi(x p^{w}) needs {d} digits of x and b, have {prec} and {}",
            psi.b.k
        )));
    }
    let m = p.pow(d);
    Ok((m, mul_mod(psi.b.u % m, x % m, m)))
}

/// Order `p^d` of the additive-character values that appear in `psi(x p^w)` for units `x`.
fn psi_order(psi: &AddChar, w: i64) -> u64 {
    let d = -(w + psi.conductor());
    if d <= 0 {
        1
    } else {
        psi.p().pow(d as u32)
    }
}

fn units_mod(p: Prime, n: u32) -> impl Iterator<Item = u64> {
    let pv = p.get();
    (1..p.pow(n)).filter(move |x| x % pv != 0)
}

/// `G(chi, psi, m) = sum_{x in U/U^m} chi^{-1}(x) psi(x / c)`, `c = pi^{a(chi) + n(psi)}`.
pub fn gauss_sum(chi: &MultChar, psi: &AddChar, m: i64) -> Result<Cyclo> {
    let a = chi.conductor() as i64;
    if m < a.max(1) {
        return Err(Error::IllDefinedSum(format!(
            "G(chi, psi, {m}) with a(chi) = {a}: level must be >= max(a(chi), 1)"
        )));
    }
    let m = m as u32;
    let w = -(a + psi.conductor());
    let pord = psi_order(psi, w);
    let cord = chi.unit_order();
    let mut acc = Accum::new(lcm(pord, cord));
    for x in units_mod(chi.p(), m) {
        let ce = chi.unit_exp(x)?;
        let (po, pe) = psi_unit_shift(psi, x, w, m)?;
        let n = acc.n;
        let k = ((cord - ce) % cord) * (n / cord) + pe * (n / po);
        acc.counts[(k % n) as usize] += 1;
    }
    Ok(acc.finish())
}

/// The same Gauss sum, but summed over caller-chosen coset representatives.
pub fn gauss_sum_over(chi: &MultChar, psi: &AddChar, reps: &[ValUnit]) -> Result<Cyclo> {
    let c = ValUnit::pi_power(chi.p(), chi.conductor() as i64 + psi.conductor());
    let cinv = c.inv();
    let n = lcm(chi.unit_order(), psi_order(psi, -(chi.conductor() as i64 + psi.conductor())));
    let mut acc = Accum::new(n);
    for x in reps {
        let z = chi.eval(x)?.inv().mul(&psi.eval(&x.mul(&cinv))?);
        acc.push_root(&z);
    }
    Ok(acc.finish())
}

/// `I(m) = q^{-N} sum_{x in U/U^N} chi^{-1}(x) psi(x / pi^{a + n(psi) + m})`,
/// `N = max(a, a + m, 1)`; returned as `u * q^{-2N / 2}` with `u` the raw sum.
pub fn char_sum_i(chi: &MultChar, psi: &AddChar, m: i64) -> Result<HalfScaled> {
    let a = chi.conductor() as i64;
    let big_n = a.max(a + m).max(1) as u32;
    let w = -(a + psi.conductor() + m);
    let pord = psi_order(psi, w);
    let cord = chi.unit_order();
    let mut acc = Accum::new(lcm(pord, cord));
    for x in units_mod(chi.p(), big_n) {
        let ce = chi.unit_exp(x)?;
        let (po, pe) = psi_unit_shift(psi, x, w, big_n)?;
        let n = acc.n;
        let k = ((cord - ce) % cord) * (n / cord) + pe * (n / po);
        acc.counts[(k % n) as usize] += 1;
    }
    Ok(HalfScaled::new(acc.finish(), -2 * big_n as i64, chi.p().get()))
}

/// `varphi(x) = sum_{y in U/U^a} psi(y (x - 1) / pi^{a + n(psi)})` for a unit residue `x`.
pub fn varphi(x: u64, a: u32, psi: &AddChar) -> Result<Cyclo> {
    if a == 0 {
        return Err(Error::Precondition("varphi needs a >= 1".into()));
    }
    let p = psi.p();
    if x % p.get() == 0 {
        return Err(Error::Unit { value: x, modulus: p.pow(a) });
    }
    if psi.b.k < a {
        return Err(Error::Precision(format!("b known to {} digits, need {a}", psi.b.k)));
    }
    let pa = p.pow(a);
    let t = (x % pa + pa - 1) % pa;
    let bt = mul_mod(psi.b.u % pa, t, pa);
    let mut acc = Accum::new(pa);
    for y in units_mod(p, a) {
        acc.push(pa, mul_mod(y, bt, pa));
    }
    Ok(acc.finish())
}

/// `q^a [x in U^a] - q^{a-1} [x in U^{a-1}]`.
pub fn varphi_closed_form(x: u64, a: u32, p: Prime) -> i64 {
    let pa = p.pow(a);
    let pa1 = p.pow(a - 1);
    let mut v = 0i64;
    if x % pa == 1 % pa {
        v += pa as i64;
    }
    if x % pa1 == 1 % pa1 {
        v -= pa1 as i64;
    }
    v
}

fn check_jacobi_level(chi1: &MultChar, chi2: &MultChar, n: i64) -> Result<u32> {
    let need = chi1.conductor().max(chi2.conductor()).max(1) as i64;
    if n < need {
        return Err(Error::IllDefinedSum(format!(
            "Jacobi sum at level {n} with conductors {} and {}",
            chi1.conductor(),
            chi2.conductor()
        )));
    }
    if chi1.p() != chi2.p() {
        return Err(Error::Precondition("characters over different primes".into()));
    }
    Ok(n as u32)
}

/// `J_t(chi1, chi2, n) = sum_{x in U/U^n, t - x in U} chi1^{-1}(x) chi2^{-1}(t - x)`.
/// `t` is any residue; a non-unit `t` is allowed (the same constraint applies).
pub fn jacobi_strict(chi1: &MultChar, chi2: &MultChar, t: u64, n: i64) -> Result<Cyclo> {
    let n = check_jacobi_level(chi1, chi2, n)?;
    let p = chi1.p();
    let m = p.pow(n);
    let (o1, o2) = (chi1.unit_order(), chi2.unit_order());
    let mut acc = Accum::new(lcm(o1, o2));
    let big = acc.n;
    let t = t % m;
    for x in units_mod(p, n) {
        let y = (t + m - x) % m;
        if y % p.get() == 0 {
            continue;
        }
        let e1 = (o1 - chi1.unit_exp(x)?) % o1;
        let e2 = (o2 - chi2.unit_exp(y)?) % o2;
        let k = (e1 * (big / o1) + e2 * (big / o2)) % big;
        acc.counts[k as usize] += 1;
    }
    Ok(acc.finish())
}

/// `sum_{s in U/U^n, v(1 - s) = v} chi1^{-1}(s) chi2^{-1}(1 - s)`, with `chi2` evaluated on
/// `1 - s = p^v w` as `chi2(pi)^v chi2(w)`.
pub fn jacobi_shell(chi1: &MultChar, chi2: &MultChar, n: i64, v: u32) -> Result<Cyclo> {
    if n < (chi1.conductor() as i64).max(1) {
        return Err(Error::IllDefinedSum(format!(
            "shell Jacobi sum at level {n} with a(chi1) = {}",
            chi1.conductor()
        )));
    }
    if chi1.p() != chi2.p() {
        return Err(Error::Precondition("characters over different primes".into()));
    }
    let n = n as u32;
    if v as i64 > n as i64 - chi2.conductor() as i64 || v >= n {
        return Err(Error::Precision(format!(
            "shell v = {v} at level {n}: unit part of 1 - s known to {} digits, chi2 has conductor {}",
            n as i64 - v as i64,
            chi2.conductor()
        )));
    }
    let p = chi1.p();
    let m = p.pow(n);
    let pv = p.pow(v);
    let (o1, o2) = (chi1.unit_order(), chi2.unit_order());
    let pi2 = chi2.pi_value().pow(v as i64).inv();
    let mut acc = Accum::new(lcm(lcm(o1, o2), pi2.order));
    let big = acc.n;
    let shift = pi2.exp_in(big);
    for s in units_mod(p, n) {
        let d = (m + 1 - s) % m;
        if d % pv != 0 || (d / pv) % p.get() == 0 {
            continue;
        }
        let w = d / pv;
        let e1 = (o1 - chi1.unit_exp(s)?) % o1;
        let e2 = (o2 - chi2.unit_exp(w)?) % o2;
        let k = (e1 * (big / o1) + e2 * (big / o2) + shift) % big;
        acc.counts[k as usize] += 1;
    }
    Ok(acc.finish())
}

/// `chi1 chi2 (t)` times `J_t`; equals `J_1` for every unit `t`.
pub fn jacobi_translated(chi1: &MultChar, chi2: &MultChar, t: u64, n: i64) -> Result<Cyclo> {
    let prod = chi1.mul(chi2)?;
    let jt = jacobi_strict(chi1, chi2, t, n)?;
    Ok(jt.mul_root(&prod.unit_value(t)?))
}

/// `sum_x chi^{-1}(x)` over `x in U^{a-1}/U^a` (all of `U/U^1` when `a = 1`).
pub fn top_layer_sum(chi: &MultChar) -> Result<Cyclo> {
    let a = chi.conductor();
    if a == 0 {
        return Err(Error::Precondition("top layer of an unramified character".into()));
    }
    let p = chi.p();
    let o = chi.unit_order();
    let step = if a == 1 { 1 } else { p.pow(a - 1) };
    let mut acc = Accum::new(o);
    for x in units_mod(p, a).filter(|x| a == 1 || x % step == 1) {
        acc.push(o, (o - chi.unit_exp(x)?) % o);
    }
    Ok(acc.finish())
}

/// Rational `1/q^k` as a field element.
pub(crate) fn inv_q_power(q: u64, k: u32) -> Cyclo {
    Cyclo::from_int(1).scale(&BigInt::one(), &BigInt::from(q).pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_chars, mult_char_make};

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn chi(p: u64, n: i64, exps: &[u64]) -> MultChar {
        mult_char_make(pr(p), n, exps, 1, 0).unwrap()
    }

    fn z(m: u64, k: i64) -> Cyclo {
        Cyclo::root(m, k)
    }

    /// Straight from the definitions via `eval`, no group-ring shortcuts.
    fn jacobi_oracle(chi1: &MultChar, chi2: &MultChar, t: u64, n: u32) -> Cyclo {
        let p = chi1.p();
        let m = p.pow(n);
        let mut acc = Cyclo::zero();
        for x in 1..m {
            let y = (t % m + m - x) % m;
            if x % p.get() == 0 || y % p.get() == 0 {
                continue;
            }
            let xv = ValUnit::new(p, 0, x, n).unwrap();
            let yv = ValUnit::new(p, 0, y, n).unwrap();
            let term = chi1.eval(&xv).unwrap().inv().mul(&chi2.eval(&yv).unwrap().inv());
            acc = &acc + &term.to_cyclo();
        }
        acc
    }

    #[test]
    fn gauss_examples() {
        let psi = AddChar::canonical(pr(3));
        let q3 = chi(3, 1, &[1]);
        let g = &z(3, 1) - &z(3, 2);
        assert_eq!(gauss_sum(&q3, &psi, 1).unwrap(), g);
        assert_eq!(gauss_sum(&q3, &psi, 2).unwrap(), g.scale_int(3));
        let t5 = MultChar::trivial(pr(5), 1).unwrap();
        assert_eq!(gauss_sum(&t5, &AddChar::canonical(pr(5)), 1).unwrap(), Cyclo::from_int(4));
        let deep = chi(3, 2, &[1]);
        assert!(matches!(gauss_sum(&deep, &psi, 1), Err(Error::IllDefinedSum(_))));
        assert!(matches!(gauss_sum(&t5, &AddChar::canonical(pr(5)), 0), Err(Error::IllDefinedSum(_))));
    }

    #[test]
    fn gauss_sum_matches_eval_path() {
        for p in [3u64, 5] {
            let p = pr(p);
            for c in enumerate_chars(p, 2, None).unwrap() {
                for bv in -1..=1 {
                    let psi = AddChar::new(ValUnit::new(p, bv, 2, 6).unwrap());
                    let m = c.conductor().max(1) as i64;
                    let reps: Vec<ValUnit> = units_mod(p, m as u32)
                        .map(|x| ValUnit::new(p, 0, x, m as u32).unwrap())
                        .collect();
                    assert_eq!(gauss_sum(&c, &psi, m).unwrap(), gauss_sum_over(&c, &psi, &reps).unwrap());
                }
            }
        }
    }

    #[test]
    fn char_sum_i_examples() {
        let psi = AddChar::canonical(pr(3));
        let q3 = chi(3, 1, &[1]);
        let i0 = char_sum_i(&q3, &psi, 0).unwrap();
        assert_eq!(i0.abs_square(), Cyclo::from_ratio(1, 3));
        assert!(char_sum_i(&q3, &psi, 1).unwrap().is_zero());
        assert!(char_sum_i(&q3, &psi, -1).unwrap().is_zero());
    }

    #[test]
    fn varphi_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        assert_eq!(varphi(1, 1, &psi).unwrap(), Cyclo::from_int(2));
        assert_eq!(varphi(2, 1, &psi).unwrap(), Cyclo::from_int(-1));
        assert_eq!(varphi(2, 2, &psi).unwrap(), Cyclo::from_int(0));
        assert_eq!(varphi_closed_form(1, 1, p), 2);
        assert_eq!(varphi_closed_form(2, 1, p), -1);
        assert_eq!(varphi_closed_form(2, 2, p), 0);
    }

    #[test]
    fn jacobi_examples() {
        let q5 = chi(5, 1, &[2]);
        assert_eq!(jacobi_strict(&q5, &q5, 1, 1).unwrap(), Cyclo::from_int(-1));
        assert_eq!(jacobi_strict(&q5, &q5, 3, 1).unwrap(), Cyclo::from_int(-1));
        let c4 = chi(5, 1, &[1]);
        let j = jacobi_strict(&c4, &c4, 1, 1).unwrap();
        assert_eq!(j, &Cyclo::from_int(-1) + &z(4, 1).scale_int(2));
        assert_eq!(j.abs_square(), Cyclo::from_int(5));
        assert!(matches!(
            jacobi_strict(&chi(3, 2, &[1]), &q5.at_level(1).unwrap(), 1, 1),
            Err(Error::Precondition(_)) | Err(Error::IllDefinedSum(_))
        ));
    }

    #[test]
    fn jacobi_strict_matches_oracle() {
        for (p, n) in [(3u64, 2i64), (5, 1), (5, 2), (2, 3)] {
            let all = enumerate_chars(pr(p), n, None).unwrap();
            for a in &all {
                for b in all.iter().step_by(3) {
                    for t in [1u64, 2, p + 1] {
                        assert_eq!(
                            jacobi_strict(a, b, t, n).unwrap(),
                            jacobi_oracle(a, b, t, n as u32),
                            "{a:?} {b:?} t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shell_examples() {
        let q5 = chi(5, 1, &[2]);
        assert_eq!(jacobi_shell(&q5, &q5, 1, 0).unwrap(), Cyclo::from_int(-1));
        let c1 = chi(3, 2, &[1]);
        let q3 = chi(3, 1, &[1]);
        assert_eq!(jacobi_shell(&c1, &q3, 2, 1).unwrap(), &z(3, 1) - &z(3, 2));
        assert!(matches!(jacobi_shell(&q5, &q5, 1, 1), Err(Error::Precision(_))));
    }

    #[test]
    fn shell_zero_is_strict() {
        for (p, n) in [(3u64, 2i64), (5, 2), (7, 1)] {
            let all = enumerate_chars(pr(p), n, None).unwrap();
            for a in &all {
                for b in &all {
                    assert_eq!(jacobi_shell(a, b, n, 0).unwrap(), jacobi_strict(a, b, 1, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn mode_parse_round_trip() {
        for m in [JacobiMode::Strict, JacobiMode::Shell(2), JacobiMode::AutoShell] {
            assert_eq!(m.to_string().parse::<JacobiMode>().unwrap(), m);
        }
        assert!("bogus".parse::<JacobiMode>().is_err());
    }
}
