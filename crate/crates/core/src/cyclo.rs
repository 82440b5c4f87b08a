//! Exact arithmetic in cyclotomic fields `Q(zeta_M)`, stored as `Q[x]/Phi_M(x)`, and the
//! [`HalfScaled`] wrapper carrying a formal power `q^{e/2}`.
//!
//! Reduction modulo `Phi_M` uses `Phi_M(x) = Phi_R(x^s)` with `R = rad(M)`, `s = M/R`:
//! a group-ring vector of length `M` splits by exponent residue mod `s` into `s`
//! polynomials of length `R`, each divided by the monic `Phi_R`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::prime_factors;

pub fn euler_phi(m: u64) -> u64 {
    prime_factors(m)
        .into_iter()
        .fold(m, |acc, l| acc / l * (l - 1))
}

pub fn radical(m: u64) -> u64 {
    prime_factors(m).into_iter().product::<u64>().max(1)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

type PolyCache = RwLock<HashMap<u64, Arc<Vec<i64>>>>;

fn poly_cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients of `Phi_M`, lowest degree first. Computed by dividing `x^M - 1` by every
/// `Phi_d` with `d | M`, `d < M`, and cached.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<i64>> {
    assert!(m >= 1);
    if let Some(p) = poly_cache().read().unwrap().get(&m) {
        return p.clone();
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let arc = Arc::new(num);
    poly_cache().write().unwrap().entry(m).or_insert(arc).clone()
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "cyclotomic division is exact");
    quot
}

/// Reduces a group-ring vector (length exactly `m`) modulo `Phi_m`, with overflow checks.
fn reduce_i128(v: &[i128], m: u64) -> Option<Vec<i128>> {
    let r = radical(m) as usize;
    let s = m as usize / r;
    let phi_r = cyclotomic_polynomial(r as u64);
    let dr = phi_r.len() - 1;
    let mut out = vec![0i128; s * dr];
    let mut a = vec![0i128; r];
    for j in 0..s {
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = v[j + s * i];
        }
        for d in (dr..r).rev() {
            let c = a[d];
            if c != 0 {
                for (t, &f) in phi_r[..dr].iter().enumerate() {
                    if f != 0 {
                        let idx = d - dr + t;
                        a[idx] = a[idx].checked_sub(c.checked_mul(f as i128)?)?;
                    }
                }
                a[d] = 0;
            }
        }
        for i in 0..dr {
            out[j + s * i] = a[i];
        }
    }
    Some(out)
}

fn reduce_big(v: &[BigInt], m: u64) -> Vec<BigInt> {
    let r = radical(m) as usize;
    let s = m as usize / r;
    let phi_r = cyclotomic_polynomial(r as u64);
    let dr = phi_r.len() - 1;
    let mut out = vec![BigInt::zero(); s * dr];
    for j in 0..s {
        let mut a: Vec<BigInt> = (0..r).map(|i| v[j + s * i].clone()).collect();
        for d in (dr..r).rev() {
            if !a[d].is_zero() {
                let c = std::mem::take(&mut a[d]);
                for (t, &f) in phi_r[..dr].iter().enumerate() {
                    if f != 0 {
                        a[d - dr + t] -= &c * f;
                    }
                }
            }
        }
        for (i, c) in a.into_iter().take(dr).enumerate() {
            out[j + s * i] = c;
        }
    }
    out
}

fn to_i128_vec(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|c| c.to_i64().map(|x| x as i128)).collect()
}

/// Group-ring vector of length `m` -> reduced coefficients of length `phi(m)`.
fn reduce_group_ring(v: &[BigInt], m: u64) -> Vec<BigInt> {
    if let Some(small) = to_i128_vec(v) {
        if let Some(out) = reduce_i128(&small, m) {
            return out.into_iter().map(BigInt::from).collect();
        }
    }
    reduce_big(v, m)
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).max().unwrap_or(0)
}

/// A root of unity `zeta_order^exp`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    pub order: u64,
    pub exp: u64,
}

impl RootOfUnity {
    pub fn new(order: u64, exp: i64) -> Self {
        assert!(order >= 1);
        let e = exp.rem_euclid(order as i64) as u64;
        let g = e.gcd(&order);
        if e == 0 {
            RootOfUnity { order: 1, exp: 0 }
        } else {
            RootOfUnity { order: order / g, exp: e / g }
        }
    }

    pub fn one() -> Self {
        RootOfUnity { order: 1, exp: 0 }
    }

    pub fn is_one(&self) -> bool {
        self.order == 1
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let l = lcm(self.order, o.order);
        let e = self.exp * (l / self.order) + o.exp * (l / o.order);
        RootOfUnity::new(l, (e % l) as i64)
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.order, -(self.exp as i64))
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        let e = (self.exp as i128 * k as i128).rem_euclid(self.order as i128);
        RootOfUnity::new(self.order, e as i64)
    }

    /// Exponent of this root relative to `zeta_n`; `n` must be a multiple of the order.
    pub fn exp_in(&self, n: u64) -> u64 {
        debug_assert_eq!(n % self.order, 0);
        self.exp * (n / self.order)
    }

    pub fn to_cyclo(&self) -> Cyclo {
        Cyclo::root(self.order, self.exp as i64)
    }

    pub fn embed(&self) -> Complex64 {
        let t = std::f64::consts::TAU * self.exp as f64 / self.order as f64;
        Complex64::new(t.cos(), t.sin())
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            write!(f, "1")
        } else {
            write!(f, "zeta{}^{}", self.order, self.exp)
        }
    }
}

/// `zeta_m^k` as a field element. `m <= 0` is an [`Error::Order`].
pub fn root_of_unity(m: i64, k: i64) -> Result<Cyclo> {
    if m <= 0 {
        return Err(Error::Order(m));
    }
    Ok(Cyclo::root(m as u64, k))
}

/// An element of `Q(zeta_m)`: `sum num[i] x^i / den` modulo `Phi_m`, `num.len() = phi(m)`.
#[derive(Debug, Clone)]
pub struct Cyclo {
    m: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclo {
    fn from_parts(m: u64, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len() as u64, euler_phi(m));
        let mut c = Cyclo { m, num, den };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    pub fn zero() -> Self {
        Cyclo { m: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        Cyclo::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Cyclo { m: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Cyclo { m: 1, num: vec![n], den: BigInt::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Cyclo::from_parts(1, vec![r.numer().clone()], r.denom().clone())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Cyclo::from_parts(1, vec![BigInt::from(num)], BigInt::from(den))
    }

    /// `zeta_m^k` in reduced form in `Q(zeta_m)`.
    pub fn root(m: u64, k: i64) -> Self {
        let mut v = vec![0i64; m as usize];
        v[k.rem_euclid(m as i64) as usize] = 1;
        Cyclo::from_group_ring(m, &v)
    }

    /// `sum v[j] zeta_m^j / 1` for a group-ring vector with `v.len() = m`.
    pub fn from_group_ring(m: u64, v: &[i64]) -> Self {
        assert_eq!(v.len() as u64, m);
        let wide: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let num = match reduce_i128(&wide, m) {
            Some(out) => out.into_iter().map(BigInt::from).collect(),
            None => reduce_big(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(), m),
        };
        Cyclo::from_parts(m, num, BigInt::one())
    }

    pub fn from_group_ring_big(m: u64, v: &[BigInt], den: BigInt) -> Self {
        assert_eq!(v.len() as u64, m);
        Cyclo::from_parts(m, reduce_group_ring(v, m), den)
    }

    /// Order of the ambient root of unity (not necessarily minimal).
    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// The rational value, if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        let c = self.minimize();
        if c.m == 1 {
            Some(BigRational::new(c.num[0].clone(), c.den.clone()))
        } else {
            None
        }
    }

    /// Scatters the coefficients into a group-ring vector of length `l` (`m | l`), with an
    /// extra shift by `shift` (in units of `zeta_l`) and exponent map `i -> sign * i`.
    fn scatter(&self, l: u64, shift: u64, conj: bool) -> Vec<BigInt> {
        let step = l / self.m;
        let mut v = vec![BigInt::zero(); l as usize];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (i as u64 * step) % l;
            let e = if conj { (l - e) % l } else { e };
            v[((e + shift) % l) as usize] += c;
        }
        v
    }

    /// Same element viewed in `Q(zeta_l)`; `l` must be a multiple of the current order.
    pub fn lift(&self, l: u64) -> Cyclo {
        assert_eq!(l % self.m, 0, "lift target must be a multiple");
        if l == self.m {
            return self.clone();
        }
        Cyclo::from_parts(l, reduce_group_ring(&self.scatter(l, 0, false), l), self.den.clone())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { m: self.m, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let l = lcm(self.m, o.m);
        let a = self.lift(l);
        let b = o.lift(l);
        let den = &a.den * &b.den;
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den + y * &a.den)
            .collect();
        Cyclo::from_parts(l, num, den)
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        if self.is_zero() || o.is_zero() {
            return Cyclo::zero();
        }
        if self.m == 1 {
            return o.scale(&self.num[0], &self.den);
        }
        if o.m == 1 {
            return self.scale(&o.num[0], &o.den);
        }
        let l = lcm(self.m, o.m);
        let a = self.lift(l);
        let b = o.lift(l);
        let n = a.num.len();
        let lu = l as usize;
        let bits = max_bits(&a.num) + max_bits(&b.num) + 64 - (n as u64).leading_zeros() as u64;
        let folded: Vec<BigInt> = if bits < 120 {
            let x: Vec<i128> = a.num.iter().map(|c| c.to_i128().unwrap()).collect();
            let y: Vec<i128> = b.num.iter().map(|c| c.to_i128().unwrap()).collect();
            let mut acc = vec![0i128; lu];
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                for (j, &yj) in y.iter().enumerate() {
                    let k = i + j;
                    let k = if k >= lu { k - lu } else { k };
                    acc[k] += xi * yj;
                }
            }
            match reduce_i128(&acc, l) {
                Some(out) => {
                    let num = out.into_iter().map(BigInt::from).collect();
                    return Cyclo::from_parts(l, num, &a.den * &b.den);
                }
                None => acc.into_iter().map(BigInt::from).collect(),
            }
        } else {
            let mut acc = vec![BigInt::zero(); lu];
            for (i, xi) in a.num.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (j, yj) in b.num.iter().enumerate() {
                    acc[(i + j) % lu] += xi * yj;
                }
            }
            acc
        };
        Cyclo::from_parts(l, reduce_big(&folded, l), &a.den * &b.den)
    }

    /// Multiplication by the rational `n / d`.
    pub fn scale(&self, n: &BigInt, d: &BigInt) -> Cyclo {
        Cyclo::from_parts(self.m, self.num.iter().map(|c| c * n).collect(), &self.den * d)
    }

    pub fn scale_int(&self, n: i64) -> Cyclo {
        self.scale(&BigInt::from(n), &BigInt::one())
    }

    /// Multiplication by a root of unity: a cyclic shift in the group ring.
    pub fn mul_root(&self, z: &RootOfUnity) -> Cyclo {
        if z.is_one() {
            return self.clone();
        }
        let l = lcm(self.m, z.order);
        let v = self.scatter(l, z.exp_in(l), false);
        Cyclo::from_parts(l, reduce_group_ring(&v, l), self.den.clone())
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Cyclo {
        if self.m <= 2 {
            return self.clone();
        }
        let v = self.scatter(self.m, 0, true);
        Cyclo::from_parts(self.m, reduce_group_ring(&v, self.m), self.den.clone())
    }

    pub fn abs_square(&self) -> Cyclo {
        self.mul(&self.conj())
    }

    pub fn inv(&self) -> Result<Cyclo> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of 0 in a cyclotomic field".into()));
        }
        let a = self.minimize();
        if a.m <= 2 {
            return Ok(Cyclo::from_parts(a.m, vec![a.den.clone()], a.num[0].clone()));
        }
        let phi = cyclotomic_polynomial(a.m);
        let modp: Vec<BigRational> = phi.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        let ap: Vec<BigRational> = a
            .num
            .iter()
            .map(|c| BigRational::new(c.clone(), a.den.clone()))
            .collect();
        let inv = poly_inv_mod(ap, modp)
            .expect("nonzero element of a field is invertible modulo its irreducible polynomial");
        let mut den = BigInt::one();
        for c in &inv {
            den = den.lcm(c.denom());
        }
        let mut num: Vec<BigInt> = inv.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        num.resize(euler_phi(a.m) as usize, BigInt::zero());
        Ok(Cyclo::from_parts(a.m, num, den))
    }

    pub fn div(&self, o: &Cyclo) -> Result<Cyclo> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: u32) -> Cyclo {
        let mut acc = Cyclo::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The same element in the smallest field `Q(zeta_f)` containing it (`f` odd when `2 || f`
    /// would be redundant).
    pub fn minimize(&self) -> Cyclo {
        if self.is_zero() {
            return Cyclo::zero();
        }
        let mut cur = self.clone();
        'outer: loop {
            for l in prime_factors(cur.m) {
                if let Some(down) = cur.descend(l) {
                    cur = down;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Tries to express this element in `Q(zeta_{m/l})`.
    fn descend(&self, l: u64) -> Option<Cyclo> {
        let m = self.m;
        let k = m / l;
        if k % l == 0 {
            // Phi_m(x) = Phi_k(x^l): the subfield is spanned by the powers x^{l j}.
            if self
                .num
                .iter()
                .enumerate()
                .any(|(i, c)| i as u64 % l != 0 && !c.is_zero())
            {
                return None;
            }
            let num = self.num.iter().step_by(l as usize).cloned().collect();
            return Some(Cyclo::from_parts(k, num, self.den.clone()));
        }
        // m = l k with gcd(l, k) = 1: zeta_m = zeta_k^alpha zeta_l^beta, 1 = alpha l + beta k.
        let e = (l as i64).extended_gcd(&(k as i64));
        let alpha = e.x.rem_euclid(k as i64) as u64;
        let beta = e.y.rem_euclid(l as i64) as u64;
        let mut buckets = vec![vec![BigInt::zero(); k as usize]; l as usize];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = i as u64;
            let ek = (i * alpha) % k;
            let el = (i * beta) % l;
            buckets[el as usize][ek as usize] += c;
        }
        // zeta_l^{l-1} = -(1 + ... + zeta_l^{l-2})
        let last = buckets.pop().unwrap();
        let comps: Vec<Vec<BigInt>> = buckets
            .into_iter()
            .map(|b| {
                let v: Vec<BigInt> = b.iter().zip(&last).map(|(x, y)| x - y).collect();
                reduce_group_ring(&v, k)
            })
            .collect();
        if comps[1..].iter().any(|c| c.iter().any(|x| !x.is_zero())) {
            return None;
        }
        Some(Cyclo::from_parts(k, comps.into_iter().next().unwrap(), self.den.clone()))
    }

    /// Complex value, computed from the minimal-field form so equal elements embed identically.
    pub fn embed(&self) -> Complex64 {
        let c = self.minimize();
        c.embed_raw()
    }

    fn embed_raw(&self) -> Complex64 {
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = std::f64::consts::TAU * i as f64 / self.m as f64;
            let w = c.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(t.cos(), t.sin()) * w;
        }
        acc / den
    }

    /// Minimal-field JSON form `{"M", "num", "den"}`; integers that overflow `i64` become strings.
    pub fn to_json_fields(&self) -> (u64, Vec<Value>, Value) {
        let c = self.minimize();
        let num = c.num.iter().map(big_to_json).collect();
        (c.m, num, big_to_json(&c.den))
    }
}

fn big_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

fn big_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("expected integer, got {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Cyclo) -> bool {
        if self.m == o.m {
            return self.den == o.den && self.num == o.num;
        }
        let l = lcm(self.m, o.m);
        let a = self.lift(l);
        let b = o.lift(l);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclo {}

impl From<i64> for Cyclo {
    fn from(n: i64) -> Self {
        Cyclo::from_int(n)
    }
}

impl std::ops::Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        Cyclo::add(self, o)
    }
}

impl std::ops::Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        Cyclo::sub(self, o)
    }
}

impl std::ops::Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        Cyclo::mul(self, o)
    }
}

impl std::ops::Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo::neg(self)
    }
}

impl fmt::Display for Cyclo {
    /// zeta-polynomial in the minimal field, e.g. `zeta3 - zeta3^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.minimize();
        if c.is_zero() {
            return write!(f, "0");
        }
        // For prime M the basis zeta^1..zeta^{M-1} reads better: 1 = -(zeta + ... + zeta^{M-1}).
        let terms: Vec<BigInt> = if c.m > 2 && crate::padic::is_prime(c.m) && !c.num[0].is_zero() {
            let mut t = vec![BigInt::zero(); c.m as usize];
            for i in 1..c.m as usize {
                t[i] = c.num.get(i).cloned().unwrap_or_default() - &c.num[0];
            }
            t
        } else {
            c.num.clone()
        };
        let mut first = true;
        for (i, n) in terms.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let r = Ratio::new(n.clone(), c.den.clone());
            let neg = r.is_negative();
            let a = r.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let z = match i {
                0 => String::new(),
                1 => format!("zeta{}", c.m),
                _ => format!("zeta{}^{}", c.m, i),
            };
            if z.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{z}")?;
            } else {
                write!(f, "{a}*{z}")?;
            }
        }
        Ok(())
    }
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[shift + j] -= t;
        }
        q[shift] = c;
        r.pop();
        poly_trim(&mut r);
    }
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    poly_trim(&mut out);
    out
}

/// Inverse of `a` modulo `m` over `Q`, by the extended Euclidean algorithm.
fn poly_inv_mod(mut a: Vec<BigRational>, m: Vec<BigRational>) -> Option<Vec<BigRational>> {
    poly_trim(&mut a);
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (vec![], vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let g = r0[0].clone();
    Some(s0.into_iter().map(|c| c / &g).collect())
}

/// `u * q^{e/2}` with `u` exact and the half-power of `q` kept formal.
#[derive(Debug, Clone)]
pub struct HalfScaled {
    pub u: Cyclo,
    pub e: i64,
    pub q: u64,
}

impl HalfScaled {
    pub fn new(u: Cyclo, e: i64, q: u64) -> Self {
        HalfScaled { u, e, q }
    }

    pub fn from_cyclo(u: Cyclo, q: u64) -> Self {
        HalfScaled { u, e: 0, q }
    }

    pub fn one(q: u64) -> Self {
        HalfScaled::from_cyclo(Cyclo::one(), q)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero()
    }

    pub fn mul(&self, o: &HalfScaled) -> HalfScaled {
        debug_assert_eq!(self.q, o.q);
        HalfScaled { u: self.u.mul(&o.u), e: self.e + o.e, q: self.q }
    }

    pub fn mul_cyclo(&self, c: &Cyclo) -> HalfScaled {
        HalfScaled { u: self.u.mul(c), e: self.e, q: self.q }
    }

    pub fn mul_root(&self, z: &RootOfUnity) -> HalfScaled {
        HalfScaled { u: self.u.mul_root(z), e: self.e, q: self.q }
    }

    pub fn inv(&self) -> Result<HalfScaled> {
        Ok(HalfScaled { u: self.u.inv()?, e: -self.e, q: self.q })
    }

    pub fn div(&self, o: &HalfScaled) -> Result<HalfScaled> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn conj(&self) -> HalfScaled {
        HalfScaled { u: self.u.conj(), e: self.e, q: self.q }
    }

    /// Multiplies by `q^{k/2}` by moving `k` into the exponent.
    pub fn scale_half(&self, k: i64) -> HalfScaled {
        HalfScaled { u: self.u.clone(), e: self.e + k, q: self.q }
    }

    /// `|u|^2 q^e` as an exact field element.
    pub fn abs_square(&self) -> Cyclo {
        let s = self.u.abs_square();
        let q = BigInt::from(self.q);
        let p = q.pow(self.e.unsigned_abs() as u32);
        if self.e >= 0 {
            s.scale(&p, &BigInt::one())
        } else {
            s.scale(&BigInt::one(), &p)
        }
    }

    /// Exact equality when the parities of `e` agree; `None` when they differ (only the float
    /// backend can decide then).
    pub fn exact_eq(&self, o: &HalfScaled) -> Option<bool> {
        if self.u.is_zero() || o.u.is_zero() {
            return Some(self.u.is_zero() && o.u.is_zero());
        }
        if (self.e - o.e).rem_euclid(2) != 0 {
            return None;
        }
        let d = (self.e - o.e) / 2;
        let qd = BigInt::from(self.q).pow(d.unsigned_abs() as u32);
        let (a, b) = if d >= 0 {
            (self.u.scale(&qd, &BigInt::one()), o.u.clone())
        } else {
            (self.u.clone(), o.u.scale(&qd, &BigInt::one()))
        };
        Some(a == b)
    }

    pub fn embed(&self) -> Complex64 {
        self.u.embed() * (self.q as f64).powf(self.e as f64 / 2.0)
    }

    pub fn to_json(&self) -> Value {
        let (m, num, den) = self.u.to_json_fields();
        json!({"M": m, "num": num, "den": den, "e_half": self.e, "q": self.q})
    }

    pub fn from_json(v: &Value) -> Result<HalfScaled> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing field {k:?}")));
        let m = field("M")?
            .as_u64()
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::Parse("M must be a positive integer".into()))?;
        let num: Vec<BigInt> = field("num")?
            .as_array()
            .ok_or_else(|| Error::Parse("num must be an array".into()))?
            .iter()
            .map(big_from_json)
            .collect::<Result<_>>()?;
        if num.len() as u64 != euler_phi(m) {
            return Err(Error::Parse(format!(
                "num has {} entries, expected phi({m}) = {}",
                num.len(),
                euler_phi(m)
            )));
        }
        let den = big_from_json(field("den")?)?;
        if den.is_zero() {
            return Err(Error::Parse("den must be nonzero".into()));
        }
        let e = field("e_half")?
            .as_i64()
            .ok_or_else(|| Error::Parse("e_half must be an integer".into()))?;
        let q = field("q")?
            .as_u64()
            .ok_or_else(|| Error::Parse("q must be a positive integer".into()))?;
        Ok(HalfScaled { u: Cyclo::from_parts(m, num, den), e, q })
    }
}

impl PartialEq for HalfScaled {
    /// Structural: cross-parity values are never equal here.
    fn eq(&self, o: &HalfScaled) -> bool {
        self.q == o.q && self.exact_eq(o) == Some(true)
    }
}

impl fmt::Display for HalfScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{}", self.u)
        } else {
            write!(f, "({}) * {}^({}/2)", self.u, self.q, self.e)
        }
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}
