//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! An element is stored in the power basis `1, z, ..., z^(phi(N)-1)` of
//! `Q(zeta_N)`, reduced modulo the cyclotomic polynomial `Phi_N`. Elements
//! living in different fields are compared and combined after lifting both
//! to the field of the least common multiple of the moduli.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Assign, Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpc::HpComplex;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

type PhiCell = Arc<OnceLock<Arc<Vec<i64>>>>;

fn phi_cache() -> &'static Mutex<HashMap<u32, PhiCell>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, PhiCell>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Phi_n`, lowest degree first. Computed once per `n`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    let cell = {
        let mut map = phi_cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(n).or_default().clone()
    };
    cell.get_or_init(|| Arc::new(compute_phi(n))).clone()
}

fn compute_phi(n: u32) -> Vec<i64> {
    let n = n as usize;
    let mut p = vec![Integer::new(); n + 1];
    p[0] = Integer::from(-1);
    p[n] = Integer::from(1);
    for d in 1..n {
        if n % d == 0 {
            let q = cyclotomic_polynomial(d as u32);
            p = divide_monic(p, &q);
        }
    }
    p.into_iter()
        .map(|c| c.to_i64().expect("cyclotomic coefficient exceeds i64"))
        .collect()
}

fn divide_monic(mut p: Vec<Integer>, q: &[i64]) -> Vec<Integer> {
    let dq = q.len() - 1;
    let dp = p.len() - 1;
    let mut quot = vec![Integer::new(); dp - dq + 1];
    for i in (dq..=dp).rev() {
        let c = p[i].clone();
        if c != 0 {
            for (t, &qt) in q.iter().enumerate() {
                p[i - dq + t] -= Integer::from(&c * qt);
            }
        }
        quot[i - dq] = c;
    }
    debug_assert!(p.iter().all(|c| *c == 0));
    quot
}

/// Reduces a polynomial in `zeta_n` (coefficient of `z^j` at index `j`,
/// any length) to canonical form.
fn reduce(n: u32, mut v: Vec<Rational>) -> Vec<Rational> {
    let n_us = n as usize;
    if v.len() > n_us {
        let tail = v.split_off(n_us);
        for (i, c) in tail.into_iter().enumerate() {
            if c != 0 {
                v[i % n_us] += c;
            }
        }
    }
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    let mut tmp = Rational::new();
    for i in (deg..v.len()).rev() {
        if v[i] == 0 {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        for (t, &pt) in phi[..deg].iter().enumerate() {
            let slot = &mut v[i - deg + t];
            match pt {
                0 => {}
                1 => *slot -= &c,
                -1 => *slot += &c,
                _ => {
                    tmp.assign(&c);
                    tmp *= pt;
                    *slot -= &tmp;
                }
            }
        }
    }
    v.truncate(deg);
    trim(&mut v);
    v
}

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(|c| *c == 0) {
        v.pop();
    }
}

/// An exact element of `Q(zeta_N)`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    modulus: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            modulus: 1,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::from(1))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut coeffs = vec![q];
        trim(&mut coeffs);
        Cyclotomic { modulus: 1, coeffs }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_rational(Rational::from(v))
    }

    /// `zeta_k^a` in `Q(zeta_k)`.
    pub fn root_of_unity(k: u32, a: i64) -> Self {
        assert!(k >= 1, "root of unity of order 0");
        let j = a.rem_euclid(k as i64) as usize;
        let mut v = vec![Rational::new(); j + 1];
        v[j] = Rational::from(1);
        Cyclotomic {
            modulus: k,
            coeffs: reduce(k, v),
        }
    }

    /// `sum c * zeta_n^j` over the given terms; exponents taken mod `n`.
    pub fn from_terms<I>(n: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut v = vec![Rational::new(); n as usize];
        for (j, c) in terms {
            v[j.rem_euclid(n as i64) as usize] += c;
        }
        Cyclotomic {
            modulus: n,
            coeffs: reduce(n, v),
        }
    }

    /// Builds an element from a dense group-ring vector of integers
    /// indexed by the exponent of `zeta_n`.
    pub fn from_group_ring(n: u32, v: &[Integer]) -> Self {
        let v: Vec<Rational> = v.iter().map(Rational::from).collect();
        Cyclotomic {
            modulus: n,
            coeffs: reduce(n, v),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Power-basis coefficients; index `j` multiplies `zeta_N^j`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::new()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Re-expresses the element in `Q(zeta_to)`; `to` must be a multiple
    /// of the current modulus.
    pub fn lift(&self, to: u32) -> Self {
        assert!(
            to % self.modulus == 0,
            "cannot lift Q(zeta_{}) into Q(zeta_{})",
            self.modulus,
            to
        );
        if to == self.modulus {
            return self.clone();
        }
        if self.coeffs.len() <= 1 {
            return Cyclotomic {
                modulus: to,
                coeffs: self.coeffs.clone(),
            };
        }
        let f = (to / self.modulus) as usize;
        let mut v = vec![Rational::new(); to as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                v[j * f].assign(c);
            }
        }
        Cyclotomic {
            modulus: to,
            coeffs: reduce(to, v),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.modulus == b.modulus {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.modulus as u64, b.modulus as u64) as u32;
        (a.lift(m), b.lift(m))
    }

    fn modulus_for(a: &Self, b: &Self) -> u32 {
        if a.coeffs.len() <= 1 {
            b.modulus
        } else if b.coeffs.len() <= 1 {
            a.modulus
        } else {
            lcm(a.modulus as u64, b.modulus as u64) as u32
        }
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let m = Self::modulus_for(self, other);
        let a = if self.modulus == m || self.coeffs.len() <= 1 {
            self.coeffs.clone()
        } else {
            self.lift(m).coeffs
        };
        let b_owned;
        let b = if other.modulus == m || other.coeffs.len() <= 1 {
            &other.coeffs
        } else {
            b_owned = other.lift(m).coeffs;
            &b_owned
        };
        let mut out = a;
        if out.len() < b.len() {
            out.resize(b.len(), Rational::new());
        }
        for (o, c) in out.iter_mut().zip(b.iter()) {
            if negate {
                *o -= c;
            } else {
                *o += c;
            }
        }
        trim(&mut out);
        Cyclotomic {
            modulus: m,
            coeffs: out,
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Cyclotomic::zero();
        }
        if let Some(r) = self.to_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.to_rational() {
            return self.scale(&r);
        }
        let (a, b) = Self::common(self, other);
        let mut v = vec![Rational::new(); a.coeffs.len() + b.coeffs.len() - 1];
        let mut tmp = Rational::new();
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if *y == 0 {
                    continue;
                }
                tmp.assign(x * y);
                v[i + j] += &tmp;
            }
        }
        Cyclotomic {
            modulus: a.modulus,
            coeffs: reduce(a.modulus, v),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if *r == 0 {
            return Cyclotomic::zero();
        }
        Cyclotomic {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * r)).collect(),
        }
    }

    /// Multiplies by `zeta_k^a`.
    pub fn mul_root(&self, k: u32, a: i64) -> Self {
        if self.is_zero() {
            return Cyclotomic::zero();
        }
        let m = lcm(self.modulus as u64, k as u64) as u32;
        let base = self.lift(m);
        let shift = (a.rem_euclid(k as i64) as u64 * (m / k) as u64) as usize;
        let mut v = vec![Rational::new(); m as usize];
        for (j, c) in base.coeffs.into_iter().enumerate() {
            v[(j + shift) % m as usize] = c;
        }
        Cyclotomic {
            modulus: m,
            coeffs: reduce(m, v),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm
    /// against `Phi_N`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero {
                modulus: self.modulus,
            });
        }
        if let Some(r) = self.to_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let n = self.modulus;
        let phi: Vec<Rational> = cyclotomic_polynomial(n)
            .iter()
            .map(|&c| Rational::from(c))
            .collect();
        let mut r0 = phi;
        let mut r1 = self.coeffs.clone();
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![self.coeffs.last().unwrap().clone().recip()];
        for c in r1.iter_mut() {
            *c *= &s1[0];
        }
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return Err(Error::DivisionByZero { modulus: n });
            }
            let lead = r1.last().unwrap().clone().recip();
            for c in r1.iter_mut() {
                *c *= &lead;
            }
            for c in s1.iter_mut() {
                *c *= &lead;
            }
        }
        let c = r1[0].clone().recip();
        for x in s1.iter_mut() {
            *x *= &c;
        }
        Ok(Cyclotomic {
            modulus: n,
            coeffs: reduce(n, s1),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Cyclotomic::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Galois automorphism `zeta_N -> zeta_N^a`, `gcd(a, N) = 1`.
    pub fn galois(&self, a: i64) -> Self {
        let n = self.modulus as i64;
        assert!(
            gcd(a.rem_euclid(n.max(1)) as u64, n as u64) == 1 || n == 1,
            "automorphism exponent must be a unit"
        );
        if self.coeffs.len() <= 1 {
            return self.clone();
        }
        let mut v = vec![Rational::new(); n as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            v[(a * j as i64).rem_euclid(n) as usize].assign(c);
        }
        Cyclotomic {
            modulus: self.modulus,
            coeffs: reduce(self.modulus, v),
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Rewrites the element in the smallest `Q(zeta_M)` containing it.
    pub fn minimal(&self) -> Self {
        let mut cur = self.clone();
        if cur.coeffs.len() <= 1 {
            cur.modulus = 1;
            return cur;
        }
        'outer: loop {
            for p in prime_factors(cur.modulus as u64) {
                if let Some(down) = cur.descend(p as u32) {
                    cur = down;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Attempts to express the element in `Q(zeta_{N/p})`.
    fn descend(&self, p: u32) -> Option<Self> {
        let n = self.modulus;
        let m = n / p;
        let deg = Rational::from(euler_phi(n as u64) / euler_phi(m as u64));
        let mut v = vec![Rational::new(); m as usize];
        if m % p == 0 {
            for (j, c) in self.coeffs.iter().enumerate() {
                if j as u32 % p == 0 {
                    v[j / p as usize] += Rational::from(c * p);
                }
            }
        } else {
            let u = mod_inverse(p as i64 % m as i64, m as i64);
            for (j, c) in self.coeffs.iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                let idx = (u * j as i64).rem_euclid(m as i64) as usize;
                if j as u32 % p == 0 {
                    v[idx] += Rational::from(c * (p - 1));
                } else {
                    v[idx] -= c;
                }
            }
        }
        for c in v.iter_mut() {
            *c /= &deg;
        }
        let cand = Cyclotomic {
            modulus: m,
            coeffs: reduce(m, v),
        };
        if cand.lift(n).coeffs == self.coeffs {
            Some(cand)
        } else {
            None
        }
    }

    /// Numerical value `sum c_j e^{2 pi i j / N}`. Terms are accumulated
    /// with `16 + log2(#terms) + log2(max |c_j|)` guard bits, so the
    /// result is correct to about `2^-(prec - 2)` relative to `sum |c_j|`.
    pub fn embed(&self, prec: u32) -> HpComplex {
        let mut hc = 0u32;
        for c in &self.coeffs {
            let bits = c.numer().significant_bits().saturating_sub(c.denom().significant_bits());
            hc = hc.max(bits);
        }
        let terms = (self.coeffs.len().max(1) as f64).log2().ceil() as u32;
        let wp = prec + 16 + terms + hc;
        let mut acc = Complex::new(wp);
        let mut two_pi_over_n = Float::with_val(wp, Constant::Pi);
        two_pi_over_n *= 2u32;
        two_pi_over_n /= self.modulus;
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let cf = Float::with_val(wp, c);
            if j == 0 {
                *acc.mut_real() += &cf;
                continue;
            }
            let ang = Float::with_val(wp, &two_pi_over_n * j as u32);
            let (s, co) = ang.sin_cos(Float::new(wp));
            *acc.mut_real() += Float::with_val(wp, &cf * &co);
            *acc.mut_imag() += Float::with_val(wp, &cf * &s);
        }
        HpComplex::from_complex(Complex::with_val(prec, acc))
    }

    pub fn to_json(&self) -> CyclotomicJson {
        CyclotomicJson {
            field: self.modulus,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(j, c)| (j as u32, c.to_string()))
                .collect(),
        }
    }

    pub fn from_json(j: &CyclotomicJson) -> Result<Self> {
        if j.field == 0 {
            return Err(Error::invalid("field modulus must be positive"));
        }
        let mut terms = Vec::with_capacity(j.coeffs.len());
        for (e, s) in &j.coeffs {
            let q = Rational::from_str(s)
                .map_err(|_| Error::invalid(format!("bad rational coefficient {s:?}")))?;
            terms.push((*e as i64, q));
        }
        Ok(Self::from_terms(j.field, terms))
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += Rational::from(x * y);
        }
    }
    trim(&mut v);
    v
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut v = a.to_vec();
    if v.len() < b.len() {
        v.resize(b.len(), Rational::new());
    }
    for (o, c) in v.iter_mut().zip(b) {
        *o -= c;
    }
    trim(&mut v);
    v
}

/// Division with remainder; `b` must be monic.
fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::new(); r.len() - db];
    let mut tmp = Rational::new();
    for i in (db..r.len()).rev() {
        if r[i] == 0 {
            continue;
        }
        let c = std::mem::take(&mut r[i]);
        for (t, bt) in b[..db].iter().enumerate() {
            if *bt != 0 {
                tmp.assign(&c * bt);
                r[i - db + t] -= &tmp;
            }
        }
        q[i - db] = c;
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.coeffs.len() <= 1 && other.coeffs.len() <= 1 {
            return self.coeffs == other.coeffs;
        }
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Default for Cyclotomic {
    fn default() -> Self {
        Cyclotomic::zero()
    }
}

impl From<i64> for Cyclotomic {
    fn from(v: i64) -> Self {
        Cyclotomic::from_i64(v)
    }
}

impl From<Rational> for Cyclotomic {
    fn from(v: Rational) -> Self {
        Cyclotomic::from_rational(v)
    }
}

macro_rules! cyc_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(self, rhs)
            }
        }
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                $body(&self, &rhs)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(&self, rhs)
            }
        }
    };
}

cyc_binop!(Add, add, |a: &Cyclotomic, b: &Cyclotomic| a.add_impl(b, false));
cyc_binop!(Sub, sub, |a: &Cyclotomic, b: &Cyclotomic| a.add_impl(b, true));
cyc_binop!(Mul, mul, |a: &Cyclotomic, b: &Cyclotomic| a.mul_impl(b));

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field arithmetic with automatic lifting to a common modulus.
pub fn cyc_arith(x: &Cyclotomic, y: &Cyclotomic, op: CycOp) -> Result<Cyclotomic> {
    Ok(match op {
        CycOp::Add => x + y,
        CycOp::Sub => x - y,
        CycOp::Mul => x * y,
        CycOp::Div => x.checked_div(y)?,
    })
}

/// Serialized form `{field: N, coeffs: [[j, "p/q"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    pub field: u32,
    pub coeffs: Vec<(u32, String)>,
}

impl fmt::Display for Cyclotomic {
    /// Canonical grammar `c0 + c1*zN + c2*zN^2 + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            let body = if j == 0 {
                mag.to_string()
            } else {
                let z = if j == 1 {
                    format!("z{}", self.modulus)
                } else {
                    format!("z{}^{}", self.modulus, j)
                };
                if mag == 1 {
                    z
                } else {
                    format!("{mag}*{z}")
                }
            };
            match (first, neg) {
                (true, false) => f.write_str(&body)?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Cyclotomic {
    type Err = Error;

    /// Parses the canonical grammar; terms may use different moduli.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::invalid("empty cyclotomic expression"));
        }
        let mut terms: Vec<&str> = Vec::new();
        let mut start = 0;
        for (i, ch) in t.char_indices() {
            if i > 0 && (ch == '+' || ch == '-') && !t[..i].ends_with('^') {
                terms.push(&t[start..i]);
                start = i;
            }
        }
        terms.push(&t[start..]);
        let mut acc = Cyclotomic::zero();
        for term in terms {
            acc = &acc + &parse_term(term)?;
        }
        Ok(acc)
    }
}

fn parse_term(term: &str) -> Result<Cyclotomic> {
    let bad = || Error::invalid(format!("bad cyclotomic term {term:?}"));
    let (neg, body) = match term.as_bytes().first() {
        Some(b'-') => (true, &term[1..]),
        Some(b'+') => (false, &term[1..]),
        _ => (false, term),
    };
    let (coef, root) = match body.find('z') {
        Some(pos) => {
            let c = body[..pos].trim_end_matches('*');
            (c, Some(&body[pos + 1..]))
        }
        None => (body, None),
    };
    let mut q = if coef.is_empty() {
        Rational::from(1)
    } else {
        Rational::from_str(coef).map_err(|_| bad())?
    };
    if neg {
        q = -q;
    }
    match root {
        None => Ok(Cyclotomic::from_rational(q)),
        Some(r) => {
            let (n, e) = match r.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
                None => (r, 1),
            };
            let n: u32 = n.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(Cyclotomic::from_terms(n, [(e, q)]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: u32, a: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(k, a)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105.iter().filter(|&&c| c == -2).count(), 2);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(z(1, 0), Cyclotomic::one());
        assert_eq!(z(3, 3), Cyclotomic::one());
        assert_eq!(z(6, 1), -z(3, 2));
        assert_eq!(z(4, 1).to_string(), "z4");
        assert_eq!(z(3, 2).to_string(), "-1 - z3");
    }

    #[test]
    fn arithmetic_examples() {
        let s = Cyclotomic::one() + z(3, 1) + z(3, 2);
        assert!(s.is_zero());
        let a = Cyclotomic::one() - z(3, 1);
        let b = Cyclotomic::one() - z(3, 2);
        assert_eq!(&a * &b, Cyclotomic::from_i64(3));
        let q = a.checked_div(&(Cyclotomic::one() + z(3, 1))).unwrap();
        assert_eq!(q.to_string(), "-1 - 2*z3");
        assert!(matches!(
            a.checked_div(&Cyclotomic::zero()),
            Err(Error::DivisionByZero { .. })
        ));
    }

    #[test]
    fn inverse_in_large_field() {
        let x = Cyclotomic::from_str("1 + 2*z240^7 - 3/5*z240^31").unwrap();
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn embed_examples() {
        let x = Cyclotomic::from_i64(3) - z(3, 1).scale(&Rational::from(2));
        let (re, im) = x.embed(64).to_f64_pair();
        assert!((re - 4.0).abs() < 1e-15);
        assert!((im + 1.7320508075688772).abs() < 1e-15);
        assert!(Cyclotomic::zero().embed(53).is_zero());
        let i = z(4, 1).embed(200);
        assert!(i.re().clone().abs() < 1e-59);
        assert_eq!(i.im_f64(), 1.0);
    }

    #[test]
    fn minimal_field() {
        let x = z(48, 3).scale(&Rational::from((1, 2)));
        assert_eq!(x.minimal().to_string(), "1/2*z16");
        let y = z(6, 1).lift(30);
        assert_eq!(y.minimal().modulus(), 3);
        let sqrt2 = z(8, 1) + z(8, 7);
        assert_eq!(sqrt2.lift(240).minimal().modulus(), 8);
        assert_eq!((&sqrt2 * &sqrt2).minimal().modulus(), 1);
    }

    #[test]
    fn display_parse_and_json_roundtrip() {
        for s in ["3 - 2*z3", "0", "-1/2*z16", "3 - 8*z5 - 2*z5^2 - 2*z5^3", "7/3"] {
            let x: Cyclotomic = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            let j = serde_json::to_string(&x.to_json()).unwrap();
            let back: CyclotomicJson = serde_json::from_str(&j).unwrap();
            let y = Cyclotomic::from_json(&back).unwrap();
            assert_eq!(x, y);
            assert_eq!(x.to_string(), y.to_string());
        }
    }

    #[test]
    fn conjugation() {
        assert_eq!(z(7, 2).conj(), z(7, 5));
        let x: Cyclotomic = "3 - 2*z3".parse().unwrap();
        assert_eq!(x.conj().to_string(), "5 + 2*z3");
    }
}
