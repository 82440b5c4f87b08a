//! Residue-ring arithmetic `Z/p^N`, truncated p-adic elements and the unit
//! group `(Z/p^n)^x` with its discrete-logarithm table.
//!
//! A [`ValUnit`] is an element `u * p^v` of `Q_p^x` whose unit part is known
//! modulo `p^k`. Everything a character or additive character needs from the
//! field `F = Q_p` is phrased in terms of these.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `p^n` for which a unit-group table is built.
pub const MAX_TABLE_MODULUS: u64 = 1 << 24;

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::Prime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^k`, or `None` on overflow.
    pub fn checked_pow(self, k: u32) -> Option<u64> {
        self.0.checked_pow(k)
    }

    /// `p^k`; panics on overflow. Only used with exponents bounded by [`Prime::max_precision`].
    pub fn pow(self, k: u32) -> u64 {
        self.checked_pow(k)
            .unwrap_or_else(|| panic!("{}^{} overflows u64", self.0, k))
    }

    /// Largest `k` with `p^k < 2^62`; the precision given to exact elements such as `1` or `pi`.
    pub fn max_precision(self) -> u32 {
        let mut k = 0;
        let mut acc: u64 = 1;
        while let Some(next) = acc.checked_mul(self.0) {
            if next >= 1 << 62 {
                break;
            }
            acc = next;
            k += 1;
        }
        k
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// `x mod m` for signed `x`, result in `[0, m)`.
#[inline]
pub fn reduce_signed(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// A truncated element `u * p^v` of `Q_p^x`, with unit part `u` known modulo `p^k`.
///
/// `k = 0` records the valuation only; `u` is then stored as `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValUnit {
    pub p: Prime,
    pub v: i64,
    pub u: u64,
    pub k: u32,
}

impl ValUnit {
    pub fn new(p: Prime, v: i64, u: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(ValUnit { p, v, u: 0, k: 0 });
        }
        let modulus = p.checked_pow(k).ok_or_else(|| {
            Error::Precision(format!("precision {k} too large for p = {p}"))
        })?;
        let u = u % modulus;
        if u % p.get() == 0 {
            return Err(Error::Unit { value: u, modulus });
        }
        Ok(ValUnit { p, v, u, k })
    }

    /// The exact element `u * p^v` for an integer unit `u`, stored at maximal precision.
    pub fn exact(p: Prime, v: i64, u: i64) -> Result<Self> {
        let k = p.max_precision();
        let m = p.pow(k);
        ValUnit::new(p, v, reduce_signed(u as i128, m), k)
    }

    pub fn one(p: Prime) -> Self {
        ValUnit { p, v: 0, u: 1, k: p.max_precision() }
    }

    /// `pi^v` with unit part exactly 1.
    pub fn pi_power(p: Prime, v: i64) -> Self {
        ValUnit { p, v, u: 1, k: p.max_precision() }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// Same element with the unit part truncated to `k` digits (never raises precision).
    pub fn truncate(&self, k: u32) -> Self {
        let k = k.min(self.k);
        if k == 0 {
            return ValUnit { p: self.p, v: self.v, u: 0, k: 0 };
        }
        ValUnit { p: self.p, v: self.v, u: self.u % self.p.pow(k), k }
    }

    pub fn mul(&self, other: &ValUnit) -> ValUnit {
        debug_assert_eq!(self.p, other.p);
        let k = self.k.min(other.k);
        if k == 0 {
            return ValUnit { p: self.p, v: self.v + other.v, u: 0, k: 0 };
        }
        let m = self.p.pow(k);
        ValUnit { p: self.p, v: self.v + other.v, u: mul_mod(self.u % m, other.u % m, m), k }
    }

    pub fn inv(&self) -> ValUnit {
        if self.k == 0 {
            return ValUnit { p: self.p, v: -self.v, u: 0, k: 0 };
        }
        let m = self.modulus();
        let u = inv_mod(self.u, m).expect("unit part is invertible by construction");
        ValUnit { p: self.p, v: -self.v, u, k: self.k }
    }

    pub fn div(&self, other: &ValUnit) -> ValUnit {
        self.mul(&other.inv())
    }

    pub fn neg(&self) -> ValUnit {
        if self.k == 0 {
            return *self;
        }
        let m = self.modulus();
        ValUnit { u: (m - self.u) % m, ..*self }
    }

    pub fn pow(&self, e: i64) -> ValUnit {
        let base = if e < 0 { self.inv() } else { *self };
        let e = e.unsigned_abs();
        if base.k == 0 {
            return ValUnit { p: self.p, v: base.v * e as i64, u: 0, k: 0 };
        }
        let m = base.modulus();
        ValUnit { p: self.p, v: base.v * e as i64, u: pow_mod(base.u, e, m), k: base.k }
    }

    /// Sum inside a residue ring: both summands are known modulo `p^(v + k)`, so the sum is
    /// known modulo `p^min(v_x + k_x, v_y + k_y)`. The precision of the result drops by the
    /// valuation gained through cancellation.
    pub fn add(&self, other: &ValUnit) -> Result<ValUnit> {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        let vmin = self.v.min(other.v);
        let abs_prec = (self.v + self.k as i64).min(other.v + other.k as i64);
        let n = abs_prec - vmin;
        if n <= 0 {
            return Err(Error::Precision(format!(
                "sum of {self} and {other} is not determined at any digit"
            )));
        }
        let n = n as u32;
        let m = p.checked_pow(n).ok_or_else(|| {
            Error::Precision(format!("relative precision {n} too large for p = {p}"))
        })?;
        let lift = |x: &ValUnit| -> u64 {
            let shift = (x.v - vmin) as u32;
            if shift >= n {
                0
            } else {
                mul_mod(x.u % m, p.pow(shift), m)
            }
        };
        let s = (lift(self) + lift(other)) % m;
        if s == 0 {
            return Err(Error::Zero(format!(
                "{self} + {other} vanishes modulo p^{}",
                vmin + n as i64
            )));
        }
        let w = valuation(s as u128, p.get());
        let k = n - w;
        let u = (s / p.pow(w)) % p.pow(k);
        Ok(ValUnit { p, v: vmin + w as i64, u, k })
    }

    pub fn sub(&self, other: &ValUnit) -> Result<ValUnit> {
        self.add(&other.neg())
    }

    /// Representative `r` in `[0, 1)` with `x - r in Z_p`.
    pub fn frac_part(&self) -> Result<Ratio<u64>> {
        frac_part(self)
    }
}

impl fmt::Display for ValUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}^{} (mod {}^{})", self.u, self.p, self.v, self.p, self.k)
    }
}

/// Writes a nonzero rational `x` as `u * p^v` with `u` known modulo `p^k`.
pub fn val_unit_decompose(x: Ratio<i64>, p: Prime, k: u32) -> Result<ValUnit> {
    if *x.numer() == 0 {
        return Err(Error::Zero(format!("decompose({x})")));
    }
    let pp = p.get() as u128;
    let mut num = *x.numer() as i128;
    let mut den = *x.denom() as i128;
    let mut v: i64 = 0;
    while num % pp as i128 == 0 {
        num /= pp as i128;
        v += 1;
    }
    while den % pp as i128 == 0 {
        den /= pp as i128;
        v -= 1;
    }
    if k == 0 {
        return Ok(ValUnit { p, v, u: 0, k: 0 });
    }
    let m = p
        .checked_pow(k)
        .ok_or_else(|| Error::Precision(format!("precision {k} too large for p = {p}")))?;
    let num = reduce_signed(num, m);
    let den = reduce_signed(den, m);
    let den_inv = inv_mod(den, m).expect("denominator coprime to p");
    ValUnit::new(p, v, mul_mod(num, den_inv, m), k)
}

/// `u * p^v mod 1` as an exact fraction with denominator `p^max(0, -v)`.
pub fn frac_part(x: &ValUnit) -> Result<Ratio<u64>> {
    if x.v >= 0 {
        return Ok(Ratio::new(0, 1));
    }
    let depth = (-x.v) as u64;
    if (x.k as u64) < depth {
        return Err(Error::Precision(format!(
            "frac_part of {x} needs {depth} digits, only {} known",
            x.k
        )));
    }
    let den = x
        .p
        .checked_pow(depth as u32)
        .ok_or_else(|| Error::Precision(format!("denominator p^{depth} overflows")))?;
    Ok(Ratio::new(x.u % den, den))
}

/// `(Z/p^n)^x` presented by canonical generators, with a full discrete-log table.
///
/// Odd `p`: one generator, the smallest primitive root modulo `p^n`.
/// `p = 2`: none for `n = 1`, `{-1}` for `n = 2`, `{-1, 5}` for `n >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupStructure {
    pub p: Prime,
    pub n: u32,
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    pub group_order: u64,
    /// lcm of the generator orders.
    pub exponent: u64,
    /// residue -> mixed-radix index of its exponent tuple; `u32::MAX` for non-units.
    log_table: Vec<u32>,
    /// mixed-radix index -> residue.
    elements: Vec<u64>,
}

impl UnitGroupStructure {
    pub fn new(p: Prime, n: i64) -> Result<Self> {
        unit_group_structure(p, n)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Exponent tuple of a unit: `prod g_i^{e_i} = u (mod p^n)`.
    pub fn discrete_log(&self, u: u64) -> Result<Vec<u64>> {
        let idx = self.log_index(u)?;
        Ok(self.decode_index(idx as u64))
    }

    /// Mixed-radix index of `dlog(u)`.
    #[inline]
    pub fn log_index(&self, u: u64) -> Result<u32> {
        let r = u % self.modulus;
        match self.log_table[r as usize] {
            u32::MAX => Err(Error::Unit { value: u, modulus: self.modulus }),
            i => Ok(i),
        }
    }

    pub fn decode_index(&self, mut idx: u64) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let e = idx % o;
                idx /= o;
                e
            })
            .collect()
    }

    pub fn encode_exps(&self, exps: &[u64]) -> u64 {
        let mut idx = 0u64;
        let mut radix = 1u64;
        for (e, &o) in exps.iter().zip(&self.orders) {
            idx += (e % o) * radix;
            radix *= o;
        }
        idx
    }

    /// `prod g_i^{e_i} mod p^n`.
    pub fn power(&self, exps: &[u64]) -> u64 {
        self.elements[self.encode_exps(exps) as usize]
    }

    /// Residue with mixed-radix exponent index `idx`.
    #[inline]
    pub fn element_at(&self, idx: u64) -> u64 {
        self.elements[idx as usize]
    }

    /// All units modulo `p^n`, in increasing residue order.
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.modulus).filter(move |&x| x % self.p.get() != 0)
    }
}

pub fn unit_group_structure(p: Prime, n: i64) -> Result<UnitGroupStructure> {
    if n <= 0 {
        return Err(Error::Level(n));
    }
    let n = n as u32;
    let modulus = match p.checked_pow(n) {
        Some(m) if m <= MAX_TABLE_MODULUS => m,
        _ => {
            return Err(Error::Scale {
                order: p.checked_pow(n).unwrap_or(u64::MAX),
                limit: MAX_TABLE_MODULUS,
            })
        }
    };
    let pv = p.get();
    let group_order = (pv - 1) * p.pow(n - 1);
    let (generators, orders) = if pv == 2 {
        match n {
            1 => (vec![], vec![]),
            2 => (vec![3], vec![2]),
            _ => (vec![modulus - 1, 5], vec![2, modulus / 4]),
        }
    } else {
        (vec![smallest_primitive_root(pv, modulus, group_order)], vec![group_order])
    };

    let mut log_table = vec![u32::MAX; modulus as usize];
    let mut elements = vec![0u64; group_order as usize];
    // Mixed-radix enumeration: index = e0 + o0*e1 + ...
    for idx in 0..group_order {
        let mut rem = idx;
        let mut x = 1u64;
        for (&g, &o) in generators.iter().zip(&orders) {
            x = mul_mod(x, pow_mod(g, rem % o, modulus), modulus);
            rem /= o;
        }
        debug_assert_eq!(log_table[x as usize], u32::MAX, "generators are independent");
        log_table[x as usize] = idx as u32;
        elements[idx as usize] = x;
    }
    let exponent = orders.iter().fold(1u64, |acc, &o| acc.lcm(&o));

    Ok(UnitGroupStructure {
        p,
        n,
        modulus,
        generators,
        orders,
        group_order,
        exponent,
        log_table,
        elements,
    })
}

type StructureCache = RwLock<HashMap<(u64, u32), Arc<UnitGroupStructure>>>;

/// Shared, lazily built unit-group tables.
pub fn cached_structure(p: Prime, n: i64) -> Result<Arc<UnitGroupStructure>> {
    static CACHE: OnceLock<StructureCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if n >= 1 {
        if let Some(s) = cache.read().unwrap().get(&(p.get(), n as u32)) {
            return Ok(s.clone());
        }
    }
    let s = Arc::new(unit_group_structure(p, n)?);
    Ok(cache.write().unwrap().entry((p.get(), n as u32)).or_insert(s).clone())
}

fn smallest_primitive_root(p: u64, modulus: u64, group_order: u64) -> u64 {
    let factors = prime_factors(group_order);
    (2..modulus)
        .filter(|g| g % p != 0)
        .find(|&g| factors.iter().all(|&l| pow_mod(g, group_order / l, modulus) != 1))
        .expect("(Z/p^n)^x is cyclic for odd p")
}
