//! Finite-order characters of `Q_p^x` and additive characters `b * psi_F`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::padic::{cached_structure, frac_part, Prime, UnitGroupStructure, ValUnit};

/// A character of `Q_p^x` that factors through `(Z/p^n)^x` on units, with value
/// `zeta_{pi_order}^{pi_exp}` at the uniformizer.
#[derive(Clone)]
pub struct MultChar {
    structure: Arc<UnitGroupStructure>,
    exps: Vec<u64>,
    pi: RootOfUnity,
    conductor: u32,
    /// order of the restriction to units
    order: u64,
    /// residue mod p^n -> exponent of the value relative to `zeta_order`; `u32::MAX` off units
    table: Arc<Vec<u32>>,
}

impl MultChar {
    /// `chi(g_i) = zeta_{ord_i}^{exps_i}` on the canonical generators, `chi(p) = zeta_{pi_order}^{pi_exp}`.
    pub fn new(
        structure: Arc<UnitGroupStructure>,
        exps: &[u64],
        pi_order: u64,
        pi_exp: i64,
    ) -> Result<Self> {
        if exps.len() != structure.rank() {
            return Err(Error::Parse(format!(
                "expected {} exponents for (Z/{}^{})^x, got {}",
                structure.rank(),
                structure.p,
                structure.n,
                exps.len()
            )));
        }
        if pi_order == 0 {
            return Err(Error::Order(0));
        }
        let exps: Vec<u64> = exps
            .iter()
            .zip(&structure.orders)
            .map(|(&e, &o)| e % o)
            .collect();
        let pi = RootOfUnity::new(pi_order, pi_exp);

        // Work relative to the group exponent, then shrink to the character's own order.
        let big_n = structure.exponent;
        let contrib: Vec<u64> = exps
            .iter()
            .zip(&structure.orders)
            .map(|(&e, &o)| (e * (big_n / o)) % big_n)
            .collect();
        let g = contrib.iter().fold(big_n, |acc, &c| acc.gcd(&c));
        let order = big_n / g;
        let step: Vec<u64> = contrib.iter().map(|&c| c / g).collect();
        let mut table = vec![u32::MAX; structure.modulus as usize];
        for idx in 0..structure.group_order {
            let tuple = structure.decode_index(idx);
            let e = tuple
                .iter()
                .zip(&step)
                .fold(0u64, |acc, (&t, &s)| (acc + t * s) % order);
            table[structure.element_at(idx) as usize] = e as u32;
        }
        let mut chi = MultChar {
            structure,
            exps,
            pi,
            conductor: 0,
            order,
            table: Arc::new(table),
        };
        chi.conductor = chi.compute_conductor();
        Ok(chi)
    }

    /// Character with prescribed values on the canonical generators.
    pub fn from_generator_values(
        structure: Arc<UnitGroupStructure>,
        values: &[RootOfUnity],
        pi: RootOfUnity,
    ) -> Result<Self> {
        let mut exps = Vec::with_capacity(values.len());
        for (v, &o) in values.iter().zip(&structure.orders) {
            if o % v.order != 0 {
                return Err(Error::Precondition(format!(
                    "value {v} does not have order dividing {o}"
                )));
            }
            exps.push(v.exp * (o / v.order));
        }
        MultChar::new(structure, &exps, pi.order, pi.exp as i64)
    }

    pub fn trivial(p: Prime, n: i64) -> Result<Self> {
        let s = cached_structure(p, n)?;
        let exps = vec![0; s.rank()];
        MultChar::new(s, &exps, 1, 0)
    }

    fn compute_conductor(&self) -> u32 {
        if self.order == 1 {
            return 0;
        }
        let s = &self.structure;
        let p = s.p.get();
        // U^m / U^n is cyclic, generated by 1 + p^m (m >= 1, and m >= 2 when p = 2).
        let start = if p == 2 { 2 } else { 1 };
        for m in start..s.n {
            let g = 1 + s.p.pow(m);
            if self.table[(g % s.modulus) as usize] == 0 {
                return m;
            }
        }
        s.n
    }

    pub fn p(&self) -> Prime {
        self.structure.p
    }

    pub fn level(&self) -> u32 {
        self.structure.n
    }

    pub fn structure(&self) -> &Arc<UnitGroupStructure> {
        &self.structure
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_ramified(&self) -> bool {
        self.conductor > 0
    }

    /// Order of the restriction to units.
    pub fn unit_order(&self) -> u64 {
        self.order
    }

    pub fn pi_value(&self) -> RootOfUnity {
        self.pi
    }

    /// Same character with a different value at the uniformizer.
    pub fn with_pi(&self, pi: RootOfUnity) -> MultChar {
        MultChar { pi, ..self.clone() }
    }

    /// Exponent of `chi(u)` relative to `zeta_{unit_order}`, for a unit residue `u` (any size).
    #[inline]
    pub fn unit_exp(&self, u: u64) -> Result<u64> {
        match self.table[(u % self.structure.modulus) as usize] {
            u32::MAX => Err(Error::Unit { value: u, modulus: self.structure.modulus }),
            e => Ok(e as u64),
        }
    }

    pub fn unit_value(&self, u: u64) -> Result<RootOfUnity> {
        Ok(RootOfUnity::new(self.order, self.unit_exp(u)? as i64))
    }

    /// `chi(x) = chi(pi)^{v(x)} chi(unit part)`; the unit part must be known to conductor precision.
    pub fn eval(&self, x: &ValUnit) -> Result<RootOfUnity> {
        if x.p != self.p() {
            return Err(Error::Precondition(format!(
                "element over p = {} given to a character over p = {}",
                x.p,
                self.p()
            )));
        }
        let at_pi = self.pi.pow(x.v);
        if self.conductor == 0 {
            return Ok(at_pi);
        }
        if x.k < self.conductor {
            return Err(Error::Precision(format!(
                "unit part of {x} known to {} digits, character has conductor {}",
                x.k, self.conductor
            )));
        }
        // Any lift modulo p^n works: chi is constant on classes mod p^conductor.
        Ok(at_pi.mul(&self.unit_value(x.u)?))
    }

    /// The same character viewed on `(Z/p^n)^x`; requires `n >= conductor` (and `n >= 1`).
    pub fn at_level(&self, n: u32) -> Result<MultChar> {
        if n == self.level() {
            return Ok(self.clone());
        }
        if n < self.conductor || n == 0 {
            return Err(Error::Precondition(format!(
                "cannot view a conductor-{} character at level {n}",
                self.conductor
            )));
        }
        let s = cached_structure(self.p(), n as i64)?;
        let vals: Vec<RootOfUnity> = s
            .generators
            .iter()
            .map(|&g| self.unit_value(g))
            .collect::<Result<_>>()?;
        MultChar::from_generator_values(s, &vals, self.pi)
    }

    pub fn mul(&self, o: &MultChar) -> Result<MultChar> {
        if self.p() != o.p() {
            return Err(Error::Precondition("characters over different primes".into()));
        }
        let n = self.level().max(o.level());
        let a = self.at_level(n)?;
        let b = o.at_level(n)?;
        let exps: Vec<u64> = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
        let pi = a.pi.mul(&b.pi);
        MultChar::new(a.structure.clone(), &exps, pi.order, pi.exp as i64)
    }

    pub fn inv(&self) -> MultChar {
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&self.structure.orders)
            .map(|(&e, &o)| (o - e) % o)
            .collect();
        let pi = self.pi.inv();
        MultChar::new(self.structure.clone(), &exps, pi.order, pi.exp as i64)
            .expect("inverse of a valid character is valid")
    }

    pub fn pow(&self, k: i64) -> MultChar {
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&self.structure.orders)
            .map(|(&e, &o)| ((e as i128 * k as i128).rem_euclid(o as i128)) as u64)
            .collect();
        let pi = self.pi.pow(k);
        MultChar::new(self.structure.clone(), &exps, pi.order, pi.exp as i64)
            .expect("power of a valid character is valid")
    }

    /// Short human-readable descriptor in CLI syntax, with the level.
    pub fn descriptor(&self) -> String {
        let exps: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        format!("p={} n={} exps={};pi={}", self.p(), self.level(), exps.join(","), self.pi)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p().get(),
            "n": self.level(),
            "exps": self.exps,
            "pi_order": self.pi.order,
            "pi_exp": self.pi.exp,
            "conductor": self.conductor,
        })
    }
}

impl PartialEq for MultChar {
    /// Equality as functions on `Q_p^x`.
    fn eq(&self, o: &MultChar) -> bool {
        if self.p() != o.p() || self.pi != o.pi || self.conductor != o.conductor {
            return false;
        }
        let n = self.level().max(o.level());
        match (self.at_level(n), o.at_level(n)) {
            (Ok(a), Ok(b)) => a.exps == b.exps,
            _ => false,
        }
    }
}

impl fmt::Debug for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultChar({}, a={})", self.descriptor(), self.conductor)
    }
}

impl fmt::Display for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// `mult_char_make` in the CLI sense: builds the level-`n` structure on demand.
pub fn mult_char_make(p: Prime, n: i64, exps: &[u64], pi_order: u64, pi_exp: i64) -> Result<MultChar> {
    MultChar::new(cached_structure(p, n)?, exps, pi_order, pi_exp)
}

/// All characters of `(Z/p^n)^x` with `chi(p) = 1`, lexicographic in the exponent tuple,
/// optionally restricted to an exact conductor.
pub fn enumerate_chars(p: Prime, n: i64, conductor: Option<u32>) -> Result<Vec<MultChar>> {
    let s = cached_structure(p, n)?;
    let mut out = Vec::new();
    let rank = s.rank();
    let mut tuple = vec![0u64; rank];
    loop {
        let chi = MultChar::new(s.clone(), &tuple, 1, 0)?;
        if conductor.is_none_or(|a| chi.conductor() == a) {
            out.push(chi);
        }
        // lexicographic increment, last coordinate fastest
        let mut i = rank;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < s.orders[i] {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// The additive character `x -> psi_F(b x)`, `psi_F(x) = exp(2 pi i frac(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddChar {
    pub b: ValUnit,
}

impl AddChar {
    pub fn new(b: ValUnit) -> Self {
        AddChar { b }
    }

    /// `psi_F` itself.
    pub fn canonical(p: Prime) -> Self {
        AddChar { b: ValUnit::one(p) }
    }

    pub fn p(&self) -> Prime {
        self.b.p
    }

    /// `n(psi) = v(b)`.
    pub fn conductor(&self) -> i64 {
        self.b.v
    }

    pub fn eval(&self, x: &ValUnit) -> Result<RootOfUnity> {
        let y = self.b.mul(x);
        if y.v >= 0 {
            return Ok(RootOfUnity::one());
        }
        let r = frac_part(&y)?;
        Ok(RootOfUnity::new(*r.denom(), *r.numer() as i64))
    }

    /// Twist by `t`: `x -> psi(t x)`.
    pub fn twist(&self, t: &ValUnit) -> AddChar {
        AddChar { b: self.b.mul(t) }
    }

    pub fn descriptor(&self) -> String {
        format!("b=v:{},u:{}", self.b.v, self.b.u)
    }

    pub fn to_json(&self) -> Value {
        json!({"b_v": self.b.v, "b_u": self.b.u, "b_prec": self.b.k, "n_psi": self.b.v})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::unit_group_structure;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn chi(p: u64, n: i64, exps: &[u64]) -> MultChar {
        mult_char_make(pr(p), n, exps, 1, 0).unwrap()
    }

    /// Conductor by brute force over every `U^m` coset representative.
    fn conductor_oracle(c: &MultChar) -> u32 {
        let s = c.structure();
        let p = s.p.get();
        for m in 0..=s.n {
            let pm = s.p.pow(m);
            let trivial = s
                .units()
                .filter(|&x| m == 0 || (x % pm) == 1 % pm)
                .all(|x| c.unit_exp(x).unwrap() == 0);
            if trivial {
                return m;
            }
        }
        unreachable!("trivial on U^n, p = {p}")
    }

    #[test]
    fn make_examples() {
        assert_eq!(chi(3, 2, &[1]).conductor(), 2);
        assert_eq!(chi(3, 2, &[3]).conductor(), 1);
        assert_eq!(chi(3, 2, &[0]).conductor(), 0);
        // quadratic mod 5 at level 2
        let q5 = chi(5, 2, &[10]);
        assert_eq!(q5.unit_order(), 2);
        assert_eq!(q5.conductor(), 1);
    }

    #[test]
    fn conductor_matches_brute_force() {
        for p in [2u64, 3, 5, 7] {
            for n in 1..=3 {
                for c in enumerate_chars(pr(p), n, None).unwrap() {
                    assert_eq!(c.conductor(), conductor_oracle(&c), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn homomorphism_on_units() {
        for (p, n) in [(2u64, 4i64), (3, 2), (5, 2), (7, 1)] {
            let s = unit_group_structure(pr(p), n).unwrap();
            for c in enumerate_chars(pr(p), n, None).unwrap() {
                for x in s.units() {
                    for y in s.units() {
                        let xy = x * y % s.modulus;
                        let lhs = c.unit_value(xy).unwrap();
                        let rhs = c.unit_value(x).unwrap().mul(&c.unit_value(y).unwrap());
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let q3 = chi(3, 1, &[1]);
        let x = ValUnit::new(pr(3), 2, 2, 2).unwrap();
        assert_eq!(q3.eval(&x).unwrap(), RootOfUnity::new(2, 1));
        let t = MultChar::trivial(pr(3), 2).unwrap();
        assert!(t.eval(&x).unwrap().is_one());
        let c = mult_char_make(pr(3), 1, &[0], 6, 1).unwrap();
        assert_eq!(c.eval(&ValUnit::pi_power(pr(3), 1)).unwrap(), RootOfUnity::new(6, 1));
        let deep = chi(3, 2, &[1]);
        let coarse = ValUnit::new(pr(3), 0, 2, 1).unwrap();
        assert!(matches!(deep.eval(&coarse), Err(Error::Precision(_))));
    }

    #[test]
    fn mul_examples() {
        let a = chi(3, 2, &[1]);
        let b = chi(3, 2, &[2]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.exps(), &[3]);
        assert_eq!(ab.conductor(), 1);
        assert_eq!(a.mul(&a.inv()).unwrap().conductor(), 0);
        let q5 = chi(5, 1, &[2]);
        assert_eq!(q5.mul(&q5).unwrap().conductor(), 0);
        // mixed levels
        let q3 = chi(3, 1, &[1]);
        let m = a.mul(&q3).unwrap();
        assert_eq!(m.level(), 2);
        assert_eq!(m.conductor(), 2);
    }

    #[test]
    fn conductor_of_product_rule() {
        for (p, n) in [(2u64, 3i64), (3, 2), (5, 2), (7, 1)] {
            let all = enumerate_chars(pr(p), n, None).unwrap();
            for a in &all {
                for b in &all {
                    let r = a.mul(b).unwrap().conductor();
                    let (x, y) = (a.conductor(), b.conductor());
                    assert!(r <= x.max(y));
                    if x != y {
                        assert_eq!(r, x.max(y));
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_on_top_layer() {
        for p in [2u64, 3, 5, 7] {
            for a in 1..=3u32 {
                let n = a as i64;
                for c in enumerate_chars(pr(p), n, Some(a)).unwrap() {
                    let s = c.structure();
                    let pa1 = s.p.pow(a - 1);
                    let mut acc = vec![0i64; c.unit_order() as usize];
                    for x in s.units().filter(|&x| a == 1 || x % pa1 == 1) {
                        let e = c.unit_exp(x).unwrap();
                        acc[((c.unit_order() - e) % c.unit_order()) as usize] += 1;
                    }
                    let sum = crate::cyclo::Cyclo::from_group_ring(c.unit_order(), &acc);
                    assert!(sum.is_zero(), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_chars(pr(5), 1, Some(1)).unwrap().len(), 3);
        let a2 = enumerate_chars(pr(3), 2, Some(2)).unwrap();
        let ks: Vec<u64> = a2.iter().map(|c| c.exps()[0]).collect();
        assert_eq!(ks, vec![1, 2, 4, 5]);
        assert_eq!(enumerate_chars(pr(3), 2, None).unwrap().len(), 6);
        assert_eq!(enumerate_chars(pr(2), 4, None).unwrap().len(), 8);
    }

    #[test]
    fn add_char_examples() {
        let p = pr(3);
        let psi = AddChar::canonical(p);
        assert_eq!(psi.conductor(), 0);
        let x = ValUnit::new(p, -1, 1, 1).unwrap();
        assert_eq!(psi.eval(&x).unwrap(), RootOfUnity::new(3, 1));
        let x = ValUnit::new(p, 2, 5, 2).unwrap();
        assert!(psi.eval(&x).unwrap().is_one());
        let x = ValUnit::new(p, -2, 7, 2).unwrap();
        assert_eq!(psi.eval(&x).unwrap(), RootOfUnity::new(9, 7));
    }

    #[test]
    fn canonical_add_char_has_conductor_zero() {
        for p in [2u64, 3, 5, 7, 11] {
            let p = pr(p);
            let psi = AddChar::canonical(p);
            for v in 0..3 {
                for u in 1..p.get() {
                    let x = ValUnit::new(p, v, u, 2).unwrap();
                    assert!(psi.eval(&x).unwrap().is_one());
                }
            }
            assert!(!psi.eval(&ValUnit::new(p, -1, 1, 1).unwrap()).unwrap().is_one());
        }
    }

    #[test]
    fn level_lift_preserves_values() {
        let q5 = chi(5, 1, &[2]);
        let up = q5.at_level(3).unwrap();
        assert_eq!(up.conductor(), 1);
        for x in up.structure().units() {
            assert_eq!(up.unit_value(x).unwrap(), q5.unit_value(x).unwrap());
        }
        assert_eq!(up, q5);
    }
}
