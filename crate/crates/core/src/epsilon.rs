//! Local epsilon factors `eps(chi, psi)`, the L-factor, and the standard transformation
//! rules: additive twist, inverse product, Tate's unramified twist, Deligne's twist, and the
//! `s`-shifted normalization `eps_BH(chi, s, psi)`.

use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::characters::{AddChar, MultChar};
use crate::cyclo::{complex_to_json, lcm, Cyclo, HalfScaled, RootOfUnity};
use crate::error::{Error, Result};
use crate::padic::{inv_mod, ValUnit};
use crate::sums::{gauss_sum, inv_q_power, Accum};

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonValue {
    pub value: HalfScaled,
    pub chi_conductor: u32,
    pub psi_conductor: i64,
}

impl EpsilonValue {
    pub fn embed(&self) -> Complex64 {
        self.value.embed()
    }

    /// `|eps|^2 == 1`, checked exactly.
    pub fn is_unitary(&self) -> bool {
        self.value.abs_square() == Cyclo::one()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exact": self.value.to_json(),
            "float": complex_to_json(self.embed()),
            "a_chi": self.chi_conductor,
            "n_psi": self.psi_conductor,
        })
    }
}

impl fmt::Display for EpsilonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `eps(chi, psi, c)` for an arbitrary `c` with `v(c) = a(chi) + n(psi)`.
pub fn epsilon_at(chi: &MultChar, psi: &AddChar, c: &ValUnit) -> Result<EpsilonValue> {
    let a = chi.conductor();
    let n_psi = psi.conductor();
    if c.v != a as i64 + n_psi {
        return Err(Error::Precondition(format!(
            "v(c) = {} but a(chi) + n(psi) = {}",
            c.v,
            a as i64 + n_psi
        )));
    }
    let q = chi.p().get();
    let chi_c = chi.eval(c)?;
    if a == 0 {
        return Ok(EpsilonValue {
            value: HalfScaled::from_cyclo(chi_c.to_cyclo(), q),
            chi_conductor: 0,
            psi_conductor: n_psi,
        });
    }
    if psi.b.k < a || c.k < a {
        return Err(Error::Precision(format!(
            "eps needs b and c to {a} digits, have {} and {}",
            psi.b.k, c.k
        )));
    }
    // psi(x / c) = exp(2 pi i (b_u x / c_u mod p^a) / p^a)
    let pa = chi.p().pow(a);
    let cu_inv = inv_mod(c.u % pa, pa).expect("unit");
    let bu = crate::padic::mul_mod(psi.b.u % pa, cu_inv, pa);
    let o = chi.unit_order();
    let mut acc = Accum::new(lcm(o, pa));
    for x in (1..pa).filter(|x| x % chi.p().get() != 0) {
        let ce = (o - chi.unit_exp(x)?) % o;
        acc.push2(o, ce, pa, crate::padic::mul_mod(bu, x, pa));
    }
    let sum = acc.finish();
    Ok(EpsilonValue {
        value: HalfScaled::new(sum.mul_root(&chi_c), -(a as i64), q),
        chi_conductor: a,
        psi_conductor: n_psi,
    })
}

/// `eps(chi, psi)` with `c = pi^{a(chi) + n(psi)}`.
pub fn epsilon(chi: &MultChar, psi: &AddChar) -> Result<EpsilonValue> {
    let a = chi.conductor();
    let n_psi = psi.conductor();
    let q = chi.p().get();
    let chi_c = chi.pi_value().pow(a as i64 + n_psi);
    if a == 0 {
        return Ok(EpsilonValue {
            value: HalfScaled::from_cyclo(chi_c.to_cyclo(), q),
            chi_conductor: 0,
            psi_conductor: n_psi,
        });
    }
    let g = gauss_sum(chi, psi, a as i64)?;
    Ok(EpsilonValue {
        value: HalfScaled::new(g.mul_root(&chi_c), -(a as i64), q),
        chi_conductor: a,
        psi_conductor: n_psi,
    })
}

/// `L(chi) = (1 - chi(pi))^{-1}` if unramified, `1` if ramified.
pub fn l_factor(chi: &MultChar) -> Result<Cyclo> {
    if chi.is_ramified() {
        return Ok(Cyclo::one());
    }
    let z = chi.pi_value();
    if z.is_one() {
        return Err(Error::Pole(format!("chi(pi) = 1 for {chi}")));
    }
    (&Cyclo::one() - &z.to_cyclo()).inv()
}

/// `chi(b) eps(chi, psi)`, the value of `eps(chi, b psi)`.
pub fn epsilon_additive_twist(chi: &MultChar, psi: &AddChar, b: &ValUnit) -> Result<EpsilonValue> {
    let e = epsilon(chi, psi)?;
    let chi_b = chi.eval(b)?;
    Ok(EpsilonValue {
        value: e.value.mul_root(&chi_b),
        chi_conductor: e.chi_conductor,
        psi_conductor: e.psi_conductor + b.v,
    })
}

/// `eps(chi, psi) eps(chi^{-1}, psi)` as a field element (the `q`-powers cancel).
pub fn epsilon_inverse_product(chi: &MultChar, psi: &AddChar) -> Result<Cyclo> {
    let a = epsilon(chi, psi)?;
    let b = epsilon(&chi.inv(), psi)?;
    let prod = a.value.mul(&b.value);
    debug_assert_eq!(prod.e, -2 * chi.conductor() as i64);
    Ok(prod.u.mul(&inv_q_power(prod.q, chi.conductor())))
}

/// `chi2(pi)^{a(chi1) + n(psi)} eps(chi1, psi)` for unramified `chi2`.
pub fn tate_unramified_twist(chi1: &MultChar, chi2: &MultChar, psi: &AddChar) -> Result<EpsilonValue> {
    if chi2.is_ramified() {
        return Err(Error::Precondition(format!(
            "second character must be unramified, a(chi2) = {}",
            chi2.conductor()
        )));
    }
    let e = epsilon(chi1, psi)?;
    let k = chi1.conductor() as i64 + psi.conductor();
    Ok(EpsilonValue {
        value: e.value.mul_root(&chi2.pi_value().pow(k)),
        ..e
    })
}

/// The element `y` with `alpha(1 + x) = psi(y x)` for `v(x) >= a(alpha)/2`.
///
/// The unit part of `y` is determined modulo `p^{a - ceil(a/2)}` and returned at exactly that
/// precision (`k = 0` when `a = 1`: only the valuation is determined).
pub fn solve_y(alpha: &MultChar, psi: &AddChar) -> Result<ValUnit> {
    let p = alpha.p();
    let a = alpha.conductor();
    let n_psi = psi.conductor();
    if a == 0 {
        return Ok(ValUnit::pi_power(p, -n_psi));
    }
    let h = a.div_ceil(2);
    let prec = a - h;
    let v = -(a as i64) - n_psi;
    if prec == 0 {
        return ValUnit::new(p, v, 1, 0);
    }
    if psi.b.k < prec {
        return Err(Error::Precision(format!(
            "b known to {} digits, y needs {prec}",
            psi.b.k
        )));
    }
    let pa = p.pow(a);
    let ph = p.pow(h);
    let pk = p.pow(prec);
    let span = p.pow(a - h);
    // alpha(1 + p^h t) for t mod p^{a-h}
    let lhs: Vec<RootOfUnity> = (0..span)
        .map(|t| alpha.unit_value((1 + ph * t) % pa))
        .collect::<Result<_>>()?;
    for w in (1..pk).filter(|w| w % p.get() != 0) {
        let y = ValUnit::new(p, v, w, prec)?;
        let ok = (0..span).all(|t| {
            let rhs = if t == 0 {
                RootOfUnity::one()
            } else {
                // psi(y p^h t) = psi_F(b_u w t p^{h - a})
                let bw = crate::padic::mul_mod(psi.b.u % pk, w, pk);
                let e = crate::padic::mul_mod(bw, t % pk, pk);
                RootOfUnity::new(pk, e as i64)
            };
            rhs == lhs[t as usize]
        });
        if ok {
            return Ok(y);
        }
    }
    Err(Error::SearchFailure(format!(
        "no y for {alpha} and psi with n(psi) = {n_psi}"
    )))
}

/// Checks `alpha(1 + x) = psi(y x)` for every `x in P^{ceil(a/2)} / P^a`, through the
/// generic evaluation path.
pub fn check_y_relation(alpha: &MultChar, psi: &AddChar, y: &ValUnit) -> Result<bool> {
    let a = alpha.conductor();
    if a == 0 {
        return Ok(true);
    }
    let p = alpha.p();
    let h = a.div_ceil(2);
    let pa = p.pow(a);
    for t in 0..p.pow(a - h) {
        let one_plus_x = (1 + p.pow(h) * t) % pa;
        let lhs = alpha.unit_value(one_plus_x)?;
        let rhs = if t == 0 {
            RootOfUnity::one()
        } else {
            let tv = crate::padic::valuation(t as u128, p.get());
            let x = ValUnit::new(p, (h + tv) as i64, t / p.pow(tv), a - h - tv)?;
            if y.k == 0 && a - h - tv > 0 {
                return Err(Error::Precision("y has no unit digits".into()));
            }
            psi.eval(&y.mul(&x).truncate(a - h - tv))?
        };
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `beta^{-1}(y_{alpha,psi}) eps(alpha, psi)`, valid when `a(alpha) >= 2 a(beta)`.
pub fn deligne_twist(alpha: &MultChar, beta: &MultChar, psi: &AddChar) -> Result<EpsilonValue> {
    if alpha.conductor() < 2 * beta.conductor() {
        return Err(Error::Precondition(format!(
            "a(alpha) = {} < 2 a(beta) = {}",
            alpha.conductor(),
            2 * beta.conductor()
        )));
    }
    let y = solve_y(alpha, psi)?;
    if beta.is_ramified() && y.k < beta.conductor() {
        return Err(Error::Precision(format!(
            "y known to {} digits, beta has conductor {}",
            y.k,
            beta.conductor()
        )));
    }
    let b_y = beta.eval(&y)?;
    let e = epsilon(alpha, psi)?;
    Ok(EpsilonValue { value: e.value.mul_root(&b_y.inv()), ..e })
}

fn q_pow(q: u64, z: Complex64) -> Complex64 {
    (z * (q as f64).ln()).exp()
}

/// `q^{(1/2 - s)(a(chi) + n(psi))} eps(chi, psi)`.
pub fn epsilon_bh(chi: &MultChar, s: Complex64, psi: &AddChar) -> Result<Complex64> {
    let e = epsilon(chi, psi)?;
    let k = chi.conductor() as f64 + psi.conductor() as f64;
    Ok(q_pow(chi.p().get(), (Complex64::new(0.5, 0.0) - s) * k) * e.embed())
}

/// Same value under the measure-normalized convention `eps_D(chi omega_s, psi, dx_psi)`,
/// which coincides with [`epsilon_bh`].
pub fn epsilon_d(chi: &MultChar, s: Complex64, psi: &AddChar) -> Result<Complex64> {
    epsilon_bh(chi, s, psi)
}

/// The explicit sums for `n(psi) = -1`: ramified
/// `q^{n(1/2-s)} sum_{U/U^{n+1}} chi(alpha x)^{-1} psi(alpha x) / q^{(n+1)/2}` with
/// `n = a - 1`, `alpha = p^{-n}`; unramified `q^{s-1/2} chi(pi)^{-1}`.
pub fn epsilon_bh_direct(chi: &MultChar, s: Complex64, psi: &AddChar) -> Result<Complex64> {
    if psi.conductor() != -1 {
        return Err(Error::Precondition(format!(
            "direct formula needs n(psi) = -1, got {}",
            psi.conductor()
        )));
    }
    let q = chi.p().get();
    let half = Complex64::new(0.5, 0.0);
    if !chi.is_ramified() {
        return Ok(q_pow(q, s - half) * chi.pi_value().inv().embed());
    }
    let p = chi.p();
    let n = chi.conductor() - 1;
    let alpha = ValUnit::pi_power(p, -(n as i64));
    let mut acc = Complex64::new(0.0, 0.0);
    for x in (1..p.pow(n + 1)).filter(|x| x % p.get() != 0) {
        let ax = alpha.mul(&ValUnit::new(p, 0, x, n + 1)?);
        acc += chi.eval(&ax)?.inv().embed() * psi.eval(&ax)?.embed();
    }
    let scale = q_pow(q, (half - s) * n as f64) / (q as f64).powf((n + 1) as f64 / 2.0);
    Ok(scale * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_chars, mult_char_make};
    use crate::padic::Prime;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn chi(p: u64, n: i64, exps: &[u64]) -> MultChar {
        mult_char_make(pr(p), n, exps, 1, 0).unwrap()
    }

    fn z(m: u64, k: i64) -> Cyclo {
        Cyclo::root(m, k)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn epsilon_examples() {
        let psi3 = AddChar::canonical(pr(3));
        let t = MultChar::trivial(pr(3), 1).unwrap();
        assert_eq!(epsilon(&t, &psi3).unwrap().value, HalfScaled::one(3));
        let q3 = chi(3, 1, &[1]);
        let e = epsilon(&q3, &psi3).unwrap();
        assert_eq!(e.value, HalfScaled::new(&z(3, 1) - &z(3, 2), -1, 3));
        assert!(close(e.embed(), Complex64::new(0.0, 1.0)));
        let q5 = chi(5, 1, &[2]);
        let e5 = epsilon(&q5, &AddChar::canonical(pr(5))).unwrap();
        assert!(close(e5.embed(), Complex64::new(1.0, 0.0)));
        assert!(e5.is_unitary());
    }

    #[test]
    fn epsilon_at_agrees_with_epsilon() {
        for p in [3u64, 5] {
            for c in enumerate_chars(pr(p), 2, None).unwrap() {
                for bv in -1..=1 {
                    let psi = AddChar::new(ValUnit::exact(pr(p), bv, 2).unwrap());
                    let v = c.conductor() as i64 + bv;
                    for u in [1u64, 2, 7] {
                        let cc = ValUnit::exact(pr(p), v, u as i64).unwrap();
                        if u % p == 0 {
                            continue;
                        }
                        assert_eq!(
                            epsilon_at(&c, &psi, &cc).unwrap().value,
                            epsilon(&c, &psi).unwrap().value
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn l_factor_examples() {
        assert_eq!(l_factor(&chi(5, 1, &[1])).unwrap(), Cyclo::one());
        let u = mult_char_make(pr(5), 1, &[0], 2, 1).unwrap();
        assert_eq!(l_factor(&u).unwrap(), Cyclo::from_ratio(1, 2));
        assert!(matches!(l_factor(&MultChar::trivial(pr(5), 1).unwrap()), Err(Error::Pole(_))));
    }

    #[test]
    fn additive_twist_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        let q3 = chi(3, 1, &[1]);
        let b = ValUnit::exact(p, 0, 2).unwrap();
        let tw = epsilon_additive_twist(&q3, &psi, &b).unwrap();
        assert!(close(tw.embed(), Complex64::new(0.0, -1.0)));
        assert_eq!(tw.value, epsilon(&q3, &psi.twist(&b)).unwrap().value);
        let one = ValUnit::one(p);
        assert_eq!(
            epsilon_additive_twist(&q3, &psi, &one).unwrap().value,
            epsilon(&q3, &psi).unwrap().value
        );
    }

    #[test]
    fn inverse_product_examples() {
        let q3 = chi(3, 1, &[1]);
        assert_eq!(epsilon_inverse_product(&q3, &AddChar::canonical(pr(3))).unwrap(), Cyclo::from_int(-1));
        let q5 = chi(5, 1, &[2]);
        assert_eq!(epsilon_inverse_product(&q5, &AddChar::canonical(pr(5))).unwrap(), Cyclo::one());
        let t = MultChar::trivial(pr(5), 1).unwrap();
        assert_eq!(epsilon_inverse_product(&t, &AddChar::canonical(pr(5))).unwrap(), Cyclo::one());
    }

    #[test]
    fn tate_examples() {
        let p = pr(3);
        let q3 = chi(3, 1, &[1]);
        let psi = AddChar::canonical(p);
        let u6 = mult_char_make(p, 1, &[0], 6, 1).unwrap();
        let t = tate_unramified_twist(&q3, &u6, &psi).unwrap();
        assert!(close(t.embed(), RootOfUnity::new(6, 1).embed() * Complex64::new(0.0, 1.0)));
        assert_eq!(t.value, epsilon(&q3.mul(&u6).unwrap(), &psi).unwrap().value);
        let psi1 = AddChar::new(ValUnit::exact(p, 1, 1).unwrap());
        let um = mult_char_make(p, 1, &[0], 2, 1).unwrap();
        let t = tate_unramified_twist(&q3, &um, &psi1).unwrap();
        assert_eq!(t.value, epsilon(&q3.mul(&um).unwrap(), &psi1).unwrap().value);
        assert!(matches!(tate_unramified_twist(&q3, &q3, &psi), Err(Error::Precondition(_))));
    }

    #[test]
    fn solve_y_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        let y = solve_y(&MultChar::trivial(p, 1).unwrap(), &psi).unwrap();
        assert_eq!((y.v, y.u), (0, 1));
        let y1 = solve_y(&chi(3, 2, &[1]), &psi).unwrap();
        assert_eq!((y1.v, y1.u % 3, y1.k), (-2, 1, 1));
        let y2 = solve_y(&chi(3, 2, &[2]), &psi).unwrap();
        assert_eq!((y2.v, y2.u % 3, y2.k), (-2, 2, 1));
        assert!(check_y_relation(&chi(3, 2, &[1]), &psi, &y1).unwrap());
    }

    #[test]
    fn deligne_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        let alpha = chi(3, 2, &[1]);
        let beta = chi(3, 1, &[1]);
        let d = deligne_twist(&alpha, &beta, &psi).unwrap();
        assert_eq!(d.value, epsilon(&alpha, &psi).unwrap().value);
        assert_eq!(d.value, epsilon(&alpha.mul(&beta).unwrap(), &psi).unwrap().value);
        let t = MultChar::trivial(p, 1).unwrap();
        assert_eq!(deligne_twist(&alpha, &t, &psi).unwrap().value, epsilon(&alpha, &psi).unwrap().value);
        assert!(matches!(deligne_twist(&beta, &beta, &psi), Err(Error::Precondition(_))));
    }

    #[test]
    fn bh_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        let t = MultChar::trivial(p, 1).unwrap();
        assert!(close(epsilon_bh(&t, Complex64::new(0.5, 0.0), &psi).unwrap(), Complex64::new(1.0, 0.0)));
        let q3 = chi(3, 1, &[1]);
        let v = epsilon_bh(&q3, Complex64::new(0.0, 0.0), &psi).unwrap();
        assert!(close(v, Complex64::new(0.0, 3f64.sqrt())));
        let v = epsilon_d(&q3, Complex64::new(1.0, 0.0), &psi).unwrap();
        assert!(close(v, Complex64::new(0.0, 1.0 / 3f64.sqrt())));
        let u6 = mult_char_make(p, 1, &[0], 6, 1).unwrap();
        let psi_m1 = AddChar::new(ValUnit::exact(p, -1, 1).unwrap());
        let v = epsilon_bh(&u6, Complex64::new(0.5, 0.0), &psi_m1).unwrap();
        assert!(close(v, RootOfUnity::new(6, -1).embed()));
        assert!(close(v, epsilon_bh_direct(&u6, Complex64::new(0.5, 0.0), &psi_m1).unwrap()));
    }
}
