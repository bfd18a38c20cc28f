//! Truncated formal series in fractional powers of `q` with exact
//! coefficients.
//!
//! A series stores terms `c * q^(m/d)` for a fixed exponent denominator `d`
//! together with a truncation bound `T`: every exponent below `T` is known
//! exactly. `T = None` marks an exact (finite) expression.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound::{Excluded, Unbounded};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{lcm, Cyclotomic};
use crate::error::{Error, Result};

/// Exact coefficient domain of a series.
pub trait Coeff: Clone + PartialEq + fmt::Display + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn try_recip(&self) -> Option<Self>;
    fn from_rational(q: Rational) -> Self;
    fn scaled(&self, q: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn plus(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn minus(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn times(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn negated(&self) -> Self {
        Rational::from(-self)
    }
    fn try_recip(&self) -> Option<Self> {
        (*self != 0).then(|| self.clone().recip())
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn scaled(&self, q: &Rational) -> Self {
        Rational::from(self * q)
    }
}

impl Coeff for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_recip(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn from_rational(q: Rational) -> Self {
        Cyclotomic::from_rational(q)
    }
    fn scaled(&self, q: &Rational) -> Self {
        self.scale(q)
    }
}

fn rat(n: i64, d: u64) -> Rational {
    Rational::from((Integer::from(n), Integer::from(d)))
}

fn den_u64(r: &Rational) -> u64 {
    r.denom().to_u64().expect("exponent denominator too large")
}

fn min_trunc(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if a < b { a } else { b }),
    }
}

fn add_opt(a: &Option<Rational>, b: &Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(Rational::from(a + b)),
        _ => None,
    }
}

/// A truncated series `sum c_m q^(m/d)`.
#[derive(Clone, Debug)]
pub struct PuiseuxQSeries<C: Coeff> {
    denom: u64,
    terms: BTreeMap<i64, C>,
    trunc: Option<Rational>,
}

pub type QSeries = PuiseuxQSeries<Cyclotomic>;
pub type RationalQSeries = PuiseuxQSeries<Rational>;

impl<C: Coeff> PuiseuxQSeries<C> {
    pub fn zero(trunc: Option<Rational>) -> Self {
        PuiseuxQSeries {
            denom: 1,
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn one(trunc: Option<Rational>) -> Self {
        Self::monomial(C::one(), &Rational::new(), trunc)
    }

    /// `c * q^e`, known below `trunc`.
    pub fn monomial(c: C, e: &Rational, trunc: Option<Rational>) -> Self {
        let d = den_u64(e);
        let mut s = PuiseuxQSeries {
            denom: d,
            terms: BTreeMap::new(),
            trunc,
        };
        let m = Rational::from(e * d).numer().to_i64().expect("exponent too large");
        if !c.is_zero() && s.key_below(m) {
            s.terms.insert(m, c);
        }
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    pub fn from_terms<I>(terms: I, trunc: Option<Rational>) -> Self
    where
        I: IntoIterator<Item = (Rational, C)>,
    {
        let mut acc = Self::zero(trunc.clone());
        for (e, c) in terms {
            acc = acc.add(&Self::monomial(c, &e, trunc.clone()));
        }
        acc
    }

    pub fn exp_denom(&self) -> u64 {
        self.denom
    }

    pub fn trunc(&self) -> Option<&Rational> {
        self.trunc.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn limit_key(&self) -> Option<i64> {
        self.trunc.as_ref().map(|t| {
            Rational::from(t * self.denom)
                .ceil()
                .numer()
                .to_i64()
                .expect("truncation bound too large")
        })
    }

    fn key_below(&self, m: i64) -> bool {
        self.limit_key().map_or(true, |l| m < l)
    }

    fn key_of(&self, e: &Rational) -> Option<i64> {
        let v = Rational::from(e * self.denom);
        if *v.denom() == 1 {
            v.numer().to_i64()
        } else {
            None
        }
    }

    fn exponent(&self, m: i64) -> Rational {
        rat(m, self.denom)
    }

    /// Iterates `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &C)> + '_ {
        self.terms.iter().map(|(m, c)| (self.exponent(*m), c))
    }

    pub fn coefficient(&self, e: &Rational) -> C {
        match self.key_of(e) {
            Some(m) => self.terms.get(&m).cloned().unwrap_or_else(C::zero),
            None => C::zero(),
        }
    }

    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().next().map(|&m| self.exponent(m))
    }

    /// Re-expresses keys over exponent denominator `d` (a multiple of the
    /// current one).
    pub fn with_denom(&self, d: u64) -> Self {
        assert!(d % self.denom == 0, "denominator must be a multiple");
        let f = (d / self.denom) as i64;
        PuiseuxQSeries {
            denom: d,
            terms: self.terms.iter().map(|(m, c)| (m * f, c.clone())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let d = lcm(a.denom, b.denom);
        (a.with_denom(d), b.with_denom(d))
    }

    fn pruned(mut self) -> Self {
        if let Some(l) = self.limit_key() {
            let _ = self.terms.split_off(&l);
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    /// Drops everything at or above `t` and lowers the bound accordingly.
    pub fn truncate(&self, t: &Rational) -> Self {
        let mut s = self.clone();
        s.trunc = min_trunc(s.trunc, Some(t.clone()));
        s.pruned()
    }

    /// Sets the bound of an exact expression; a no-op for lower bounds.
    pub fn with_trunc(&self, t: Option<Rational>) -> Self {
        match t {
            Some(t) => self.truncate(&t),
            None => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let (mut a, b) = Self::aligned(self, other);
        for (m, c) in b.terms {
            let e = a.terms.entry(m).or_insert_with(C::zero);
            *e = if negate { e.minus(&c) } else { e.plus(&c) };
        }
        a.trunc = min_trunc(a.trunc, b.trunc);
        a.pruned()
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().negated())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v = v.times(c);
        }
        s.pruned()
    }

    /// Product with the conservative truncation rule
    /// `min(v_f + T_g, v_g + T_f, T_f + T_g)`.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let va = a.valuation().map(Some).unwrap_or_else(|| a.trunc.clone());
        let vb = b.valuation().map(Some).unwrap_or_else(|| b.trunc.clone());
        let trunc = min_trunc(
            min_trunc(add_opt(&va, &b.trunc), add_opt(&vb, &a.trunc)),
            add_opt(&a.trunc, &b.trunc),
        );
        let trunc = if a.is_zero() && a.trunc.is_none() || b.is_zero() && b.trunc.is_none() {
            None
        } else {
            trunc
        };
        let mut out = PuiseuxQSeries {
            denom: a.denom,
            terms: BTreeMap::new(),
            trunc,
        };
        let limit = out.limit_key();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m = ma + mb;
                if limit.is_some_and(|l| m >= l) {
                    break;
                }
                let e = out.terms.entry(m).or_insert_with(C::zero);
                *e = e.plus(&ca.times(cb));
            }
        }
        out.pruned()
    }

    /// Multiplies by `q^r`.
    pub fn shift(&self, r: &Rational) -> Self {
        let d = lcm(self.denom, den_u64(r));
        let s = self.with_denom(d);
        let k = Rational::from(r * d).numer().to_i64().expect("shift too large");
        PuiseuxQSeries {
            denom: d,
            terms: s.terms.into_iter().map(|(m, c)| (m + k, c)).collect(),
            trunc: s.trunc.map(|t| t + r),
        }
    }

    /// Substitutes `q -> q^r` for `r > 0`.
    pub fn substitute(&self, r: &Rational) -> Result<Self> {
        if *r <= 0 {
            return Err(Error::invalid("substitution exponent must be positive"));
        }
        let num = r.numer().to_i64().expect("substitution numerator too large");
        let den = den_u64(r);
        Ok(PuiseuxQSeries {
            denom: self.denom * den,
            terms: self.terms.iter().map(|(m, c)| (m * num, c.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| Rational::from(t * r)),
        }
        .normalized())
    }

    /// Reduces the exponent denominator to the smallest one that works.
    pub fn normalized(&self) -> Self {
        let mut g = self.denom;
        for m in self.terms.keys() {
            g = crate::cyclotomic::gcd(g, m.unsigned_abs());
        }
        if g <= 1 {
            return self.clone();
        }
        PuiseuxQSeries {
            denom: self.denom / g,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m / g as i64, c.clone()))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplies by `(1 - c q^a)`.
    pub fn mul_binomial(&self, c: &C, a: &Rational) -> Self {
        let d = lcm(self.denom, den_u64(a));
        let base = self.with_denom(d);
        let k = Rational::from(a * d).numer().to_i64().expect("exponent too large");
        let mut out = base.clone();
        if k < 0 {
            out.trunc = out.trunc.map(|t| t + a);
        }
        let limit = out.limit_key();
        for (m, v) in &base.terms {
            let key = m + k;
            if limit.is_some_and(|l| key >= l) {
                continue;
            }
            let e = out.terms.entry(key).or_insert_with(C::zero);
            *e = e.minus(&v.times(c));
        }
        out.pruned()
    }

    /// Divides by `(1 - c q^a)` for `a > 0` by geometric expansion.
    pub fn div_binomial(&self, c: &C, a: &Rational) -> Result<Self> {
        if *a <= 0 {
            return Err(Error::invalid("binomial divisor needs a positive exponent"));
        }
        if self.trunc.is_none() && !self.is_zero() {
            return Err(Error::NonTerminating(
                "division by a binomial needs a truncation bound".into(),
            ));
        }
        let d = lcm(self.denom, den_u64(a));
        let mut out = self.with_denom(d);
        let k = Rational::from(a * d).numer().to_i64().expect("exponent too large");
        let limit = out.limit_key();
        let mut cur = out.terms.keys().next().copied();
        while let Some(m) = cur {
            let key = m + k;
            if limit.map_or(true, |l| key < l) {
                let add = out.terms[&m].times(c);
                let e = out.terms.entry(key).or_insert_with(C::zero);
                *e = e.plus(&add);
                if e.is_zero() {
                    out.terms.remove(&key);
                }
            }
            cur = out.terms.range((Excluded(m), Unbounded)).next().map(|(k, _)| *k);
        }
        Ok(out.pruned())
    }

    /// Multiplicative inverse of a series with an invertible leading term.
    pub fn inverse(&self) -> Result<Self> {
        let (&m0, c0) = self.terms.iter().next().ok_or(Error::DivisionByZero { modulus: 1 })?;
        let c0inv = c0
            .try_recip()
            .ok_or_else(|| Error::invalid("leading coefficient is not invertible"))?;
        let v = self.exponent(m0);
        let Some(t) = self.trunc.clone() else {
            if self.terms.len() == 1 {
                return Ok(Self::monomial(c0inv, &Rational::from(-&v), None));
            }
            return Err(Error::NonTerminating(
                "inverse of an exact polynomial needs a truncation bound".into(),
            ));
        };
        // 1/f = c0^-1 q^-v (1 + h)^-1, h known below T - v.
        let prec = Rational::from(&t - &v);
        let h: BTreeMap<i64, C> = self
            .terms
            .iter()
            .skip(1)
            .map(|(m, c)| (m - m0, c.times(&c0inv)))
            .collect();
        let limit = Rational::from(&prec * self.denom)
            .ceil()
            .numer()
            .to_i64()
            .expect("bound too large");
        let mut g: BTreeMap<i64, C> = BTreeMap::new();
        g.insert(0, C::one());
        for m in 1..limit {
            let mut acc = C::zero();
            for (j, hj) in h.range(1..=m) {
                if let Some(gv) = g.get(&(m - j)) {
                    acc = acc.minus(&hj.times(gv));
                }
            }
            if !acc.is_zero() {
                g.insert(m, acc);
            }
        }
        let inner = PuiseuxQSeries {
            denom: self.denom,
            terms: g,
            trunc: Some(prec),
        };
        let out = inner.shift(&Rational::from(-&v)).scale(&c0inv);
        Ok(PuiseuxQSeries {
            trunc: Some(t - v.clone() - v),
            ..out
        }
        .pruned())
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PuiseuxQSeries<D> {
        PuiseuxQSeries {
            denom: self.denom,
            terms: self.terms.iter().map(|(m, c)| (*m, f(c))).collect(),
            trunc: self.trunc.clone(),
        }
        .pruned()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            trunc: self.trunc.as_ref().map(|t| t.to_string()),
            terms: self
                .terms()
                .map(|(e, c)| SeriesTermJson {
                    exponent: e.to_string(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

impl<C: Coeff> PartialEq for PuiseuxQSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::aligned(self, other);
        a.trunc == b.trunc && a.terms == b.terms
    }
}

/// True iff all coefficients of exponents below `up_to` agree exactly.
pub fn series_equal<C: Coeff>(
    f: &PuiseuxQSeries<C>,
    g: &PuiseuxQSeries<C>,
    up_to: &Rational,
) -> Result<bool> {
    for s in [f, g] {
        if let Some(t) = s.trunc() {
            if t < up_to {
                return Err(Error::InsufficientTruncation {
                    required: up_to.to_string(),
                    available: t.to_string(),
                });
            }
        }
    }
    Ok(f.truncate(up_to) == g.truncate(up_to))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub exponent: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub trunc: Option<String>,
    pub terms: Vec<SeriesTermJson>,
}

fn fmt_power(e: &Rational) -> String {
    if *e == 0 {
        String::new()
    } else if *e == 1 {
        "q".into()
    } else if *e.denom() == 1 {
        format!("q^{e}")
    } else {
        format!("q^({e})")
    }
}

fn fmt_order(t: &Rational) -> String {
    if *t == 0 {
        " + O(1)".into()
    } else {
        format!(" + O({})", fmt_power(t))
    }
}

fn fmt_term(c: &str, e: &Rational, first: bool, out: &mut String) {
    let simple = !c.contains([' ', '+']) && !c[1..].contains('-');
    let (neg, mag) = match c.strip_prefix('-') {
        Some(rest) if simple => (true, rest.to_string()),
        _ => (false, c.to_string()),
    };
    let mag = if simple { mag } else { format!("({mag})") };
    let p = fmt_power(e);
    let body = match (mag.as_str(), p.is_empty()) {
        (m, true) => m.to_string(),
        ("1", false) => p,
        (m, false) => format!("{m}*{p}"),
    };
    match (first, neg) {
        (true, false) => out.push_str(&body),
        (true, true) => {
            out.push('-');
            out.push_str(&body)
        }
        (false, false) => {
            out.push_str(" + ");
            out.push_str(&body)
        }
        (false, true) => {
            out.push_str(" - ");
            out.push_str(&body)
        }
    }
}

impl<C: Coeff> fmt::Display for PuiseuxQSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            fmt_term(&c.to_string(), &e, i == 0, &mut out);
        }
        if out.is_empty() {
            out.push('0');
        }
        if let Some(t) = &self.trunc {
            out.push_str(&fmt_order(t));
        }
        f.write_str(&out)
    }
}

/// Number of factors in a Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// `(c q^a; q^t)_n = prod_{j<n} (1 - c q^(a + j t))`. With `n` infinite
/// the product is expanded below `trunc`.
pub fn pochhammer<C: Coeff>(
    a_exp: &Rational,
    t_exp: &Rational,
    n: Length,
    twist: Option<&C>,
    trunc: Option<&Rational>,
) -> Result<PuiseuxQSeries<C>> {
    let one = C::one();
    let c = twist.unwrap_or(&one);
    let mut acc = PuiseuxQSeries::<C>::one(trunc.cloned());
    match n {
        Length::Finite(n) => {
            for j in 0..n {
                let e: Rational = a_exp + Rational::from(t_exp * j);
                acc = acc.mul_binomial(c, &e);
            }
        }
        Length::Infinite => {
            if *t_exp <= 0 {
                return Err(Error::NonTerminating(format!(
                    "infinite product with step q^{t_exp}"
                )));
            }
            let t = trunc.ok_or_else(|| {
                Error::NonTerminating("infinite product needs a truncation bound".into())
            })?;
            let mut e = a_exp.clone();
            while e < *t {
                acc = acc.mul_binomial(c, &e);
                e += t_exp;
            }
        }
    }
    Ok(acc)
}

/// One factor `eta(r z + s)^e` of an eta quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaFactor {
    pub scale: Rational,
    pub shift: Rational,
    pub exponent: i32,
}

impl EtaFactor {
    pub fn new(scale: (i64, i64), exponent: i32) -> Self {
        EtaFactor {
            scale: Rational::from(scale),
            shift: Rational::new(),
            exponent,
        }
    }

    pub fn shifted(scale: (i64, i64), shift: (i64, i64), exponent: i32) -> Self {
        EtaFactor {
            scale: Rational::from(scale),
            shift: Rational::from(shift),
            exponent,
        }
    }
}

/// `prefactor * prod eta(r_i z + s_i)^(e_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<EtaFactor>,
    pub prefactor: Cyclotomic,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<EtaFactor>) -> Self {
        EtaQuotientSpec {
            factors,
            prefactor: Cyclotomic::one(),
        }
    }

    pub fn with_prefactor(mut self, c: Cyclotomic) -> Self {
        self.prefactor = c;
        self
    }

    /// `eta(z)^2 / eta(2z)`.
    pub fn theta1() -> Self {
        Self::new(vec![EtaFactor::new((1, 1), 2), EtaFactor::new((2, 1), -1)])
    }

    /// `eta(z)^2 / eta(z/2)`.
    pub fn theta2() -> Self {
        Self::new(vec![EtaFactor::new((1, 1), 2), EtaFactor::new((1, 2), -1)])
    }

    /// `eta(z)^2 / eta(z/2 + 1/2)`.
    pub fn theta3() -> Self {
        Self::new(vec![
            EtaFactor::new((1, 1), 2),
            EtaFactor::shifted((1, 2), (1, 2), -1),
        ])
    }

    /// `zeta_48^-1 eta(z/2) eta(2z) / eta(z)`.
    pub fn theta3_alt() -> Self {
        Self::new(vec![
            EtaFactor::new((1, 2), 1),
            EtaFactor::new((2, 1), 1),
            EtaFactor::new((1, 1), -1),
        ])
        .with_prefactor(Cyclotomic::root_of_unity(48, -1))
    }

    /// `F_10(q) = eta(16z)^2 / eta(8z)`.
    pub fn f10() -> Self {
        Self::new(vec![EtaFactor::new((16, 1), 2), EtaFactor::new((8, 1), -1)])
    }

    /// `eta(z + 1/2)`.
    pub fn eta_half_shift() -> Self {
        Self::new(vec![EtaFactor::shifted((1, 1), (1, 2), 1)])
    }

    /// `zeta_48 eta(2z)^3 / (eta(z) eta(4z))`.
    pub fn eta_half_shift_product() -> Self {
        Self::new(vec![
            EtaFactor::new((2, 1), 3),
            EtaFactor::new((1, 1), -1),
            EtaFactor::new((4, 1), -1),
        ])
        .with_prefactor(Cyclotomic::root_of_unity(48, 1))
    }

    /// Leading exponent `sum e_i r_i / 24`.
    pub fn leading_exponent(&self) -> Rational {
        self.factors.iter().fold(Rational::new(), |acc, f| {
            acc + Rational::from(&f.scale * f.exponent) / 24u32
        })
    }

    fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::invalid("eta quotient needs at least one factor"));
        }
        if self.factors.iter().any(|f| f.scale <= 0) {
            return Err(Error::invalid("eta scales must be positive"));
        }
        Ok(())
    }
}

/// `e^{2 pi i r}` as an exact root of unity.
pub fn exp_2pi_i(r: &Rational) -> Cyclotomic {
    let den = r.denom().to_u32().expect("root of unity order too large");
    let num = Integer::from(r.numer() % den).to_i64().unwrap();
    Cyclotomic::root_of_unity(den, num)
}

/// Exact expansion of an eta quotient below `trunc`, using
/// `eta(rz + s) = e^{2 pi i (rz+s)/24} prod_{j>=1} (1 - e^{2 pi i j s} q^{rj})`.
pub fn eta_expansion(spec: &EtaQuotientSpec, trunc: &Rational) -> Result<QSeries> {
    spec.validate()?;
    let lead = spec.leading_exponent();
    if *trunc <= lead {
        return Err(Error::invalid(format!(
            "truncation {trunc} must exceed the leading exponent {lead}"
        )));
    }
    let inner_t = Rational::from(trunc - &lead);
    let mut constant = spec.prefactor.clone();
    let mut acc = QSeries::one(Some(inner_t.clone()));
    for f in &spec.factors {
        constant = &constant * &exp_2pi_i(&(Rational::from(&f.shift * f.exponent) / 24u32));
        let mut j = 1u64;
        loop {
            let e = Rational::from(&f.scale * j);
            if e >= inner_t {
                break;
            }
            let w = exp_2pi_i(&Rational::from(&f.shift * j));
            for _ in 0..f.exponent.unsigned_abs() {
                acc = if f.exponent > 0 {
                    acc.mul_binomial(&w, &e)
                } else {
                    acc.div_binomial(&w, &e)?
                };
            }
            j += 1;
        }
    }
    let out = acc.shift(&lead).scale(&constant);
    Ok(out.map_coeffs(|c| c.minimal()).normalized())
}

/// Closed-form theta series below `trunc`:
/// `theta_1 = 1 + 2 sum (-1)^n q^(n^2)`, `theta_2 = sum q^((2n+1)^2/16)`,
/// `theta_3 = zeta_12^-1 sum zeta_16^((2n+1)^2) q^((2n+1)^2/16)`.
pub fn theta_series(i: u8, trunc: &Rational) -> Result<QSeries> {
    let mut terms = Vec::new();
    match i {
        1 => {
            terms.push((Rational::new(), Cyclotomic::one()));
            let mut n = 1i64;
            while *trunc > n * n {
                let s = if n % 2 == 0 { 2 } else { -2 };
                terms.push((Rational::from(n * n), Cyclotomic::from_i64(s)));
                n += 1;
            }
        }
        2 | 3 => {
            let mut n = 0i64;
            loop {
                let e = Rational::from(((2 * n + 1) * (2 * n + 1), 16));
                if e >= *trunc {
                    break;
                }
                let c = if i == 2 {
                    Cyclotomic::one()
                } else {
                    Cyclotomic::root_of_unity(48, 3 * (2 * n + 1) * (2 * n + 1) - 4).minimal()
                };
                terms.push((e, c));
                n += 1;
            }
        }
        _ => return Err(Error::invalid(format!("no theta component {i}"))),
    }
    Ok(QSeries::from_terms(terms, Some(trunc.clone())).normalized())
}

/// `F_10(q) = sum q^((2n+1)^2)` below `trunc`.
pub fn f10_series(trunc: &Rational) -> QSeries {
    let mut terms = Vec::new();
    let mut n = 0i64;
    while *trunc > (2 * n + 1) * (2 * n + 1) {
        terms.push((Rational::from((2 * n + 1) * (2 * n + 1)), Cyclotomic::one()));
        n += 1;
    }
    QSeries::from_terms(terms, Some(trunc.clone()))
}

/// Squarefree decomposition `n = s^2 r`.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        s *= p.pow(k / 2);
        if k % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    (s, r * n)
}

/// Result of the half-derivative: term `c q^e` carries the exact factor
/// `c * u * sqrt(r)` where `e = u^2 r` with `r` squarefree. `scaled` holds
/// the coefficients `c * u`; the radicand is a function of the exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfDerivative<C: Coeff> {
    pub scaled: PuiseuxQSeries<C>,
}

impl<C: Coeff> HalfDerivative<C> {
    /// Squarefree radicand `r` attached to exponent `e`.
    pub fn radicand(e: &Rational) -> u64 {
        let num = e.numer().to_u64().expect("negative or huge exponent");
        let den = e.denom().to_u64().unwrap();
        squarefree_split(num * den).1
    }

    /// `(exponent, rational-part coefficient, radicand)`.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &C, u64)> + '_ {
        self.scaled.terms().map(|(e, c)| {
            let r = Self::radicand(&e);
            (e, c, r)
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        HalfDerivative {
            scaled: self.scaled.add(&other.scaled),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        HalfDerivative {
            scaled: self.scaled.scale(c),
        }
    }
}

impl<C: Coeff> fmt::Display for HalfDerivative<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, (e, c, r)) in self.terms().enumerate() {
            let cs = c.to_string();
            let cs = if r == 1 {
                cs
            } else if cs == "1" {
                format!("sqrt({r})")
            } else if cs == "-1" {
                format!("-sqrt({r})")
            } else {
                let simple = !cs.contains([' ', '+']) && !cs[1..].contains('-');
                if simple {
                    format!("{cs}*sqrt({r})")
                } else {
                    format!("({cs})*sqrt({r})")
                }
            };
            fmt_term(&cs, &e, i == 0, &mut out);
        }
        if out.is_empty() {
            out.push('0');
        }
        if let Some(t) = self.scaled.trunc() {
            out.push_str(&fmt_order(t));
        }
        f.write_str(&out)
    }
}

/// `sum a(e) q^e -> sum sqrt(e) a(e) q^e`; the constant term is dropped.
pub fn half_derivative<C: Coeff>(f: &PuiseuxQSeries<C>) -> Result<HalfDerivative<C>> {
    let mut terms = BTreeMap::new();
    for (m, c) in &f.terms {
        if *m < 0 {
            return Err(Error::invalid(
                "half-derivative is defined for nonnegative exponents only",
            ));
        }
        if *m == 0 {
            continue;
        }
        let (s, _) = squarefree_split(*m as u64 * f.denom);
        terms.insert(*m, c.scaled(&Rational::from((s, f.denom))));
    }
    Ok(HalfDerivative {
        scaled: PuiseuxQSeries {
            denom: f.denom,
            terms,
            trunc: f.trunc.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn poly(terms: &[(i64, i64)], trunc: Option<Rational>) -> RationalQSeries {
        RationalQSeries::from_terms(
            terms.iter().map(|&(e, c)| (Rational::from(e), Rational::from(c))),
            trunc,
        )
    }

    #[test]
    fn pochhammer_examples() {
        let one = Rational::from(1);
        let p0: RationalQSeries = pochhammer(&one, &one, Length::Finite(0), None, None).unwrap();
        assert_eq!(p0, poly(&[(0, 1)], None));
        let p2: RationalQSeries = pochhammer(&one, &one, Length::Finite(2), None, None).unwrap();
        assert_eq!(p2, poly(&[(0, 1), (1, -1), (2, -1), (3, 1)], None));
        let t = Rational::from(6);
        let pinf: RationalQSeries =
            pochhammer(&one, &one, Length::Infinite, None, Some(&t)).unwrap();
        assert_eq!(pinf, poly(&[(0, 1), (1, -1), (2, -1), (5, 1)], Some(t)));
        let bad: Result<RationalQSeries> =
            pochhammer(&one, &Rational::new(), Length::Infinite, None, Some(&one));
        assert!(matches!(bad, Err(Error::NonTerminating(_))));
    }

    #[test]
    fn eta_quotient_examples() {
        let t1 = eta_expansion(&EtaQuotientSpec::theta1(), &Rational::from(5)).unwrap();
        assert_eq!(t1.to_string(), "1 - 2*q + 2*q^4 + O(q^5)");
        let t2 = eta_expansion(&EtaQuotientSpec::theta2(), &Rational::from(2)).unwrap();
        assert_eq!(t2.valuation(), Some(r(1, 16)));
        assert_eq!(t2.to_string(), "q^(1/16) + q^(9/16) + q^(25/16) + O(q^2)");
        let f10 = eta_expansion(&EtaQuotientSpec::f10(), &Rational::from(26)).unwrap();
        assert_eq!(f10.to_string(), "q + q^9 + q^25 + O(q^26)");
    }

    #[test]
    fn eta_identities_symbolic() {
        let t = Rational::from(10);
        let lhs = eta_expansion(&EtaQuotientSpec::eta_half_shift(), &t).unwrap();
        let rhs = eta_expansion(&EtaQuotientSpec::eta_half_shift_product(), &t).unwrap();
        assert!(series_equal(&lhs, &rhs, &t).unwrap());
        let a = eta_expansion(&EtaQuotientSpec::theta3(), &t).unwrap();
        let b = eta_expansion(&EtaQuotientSpec::theta3_alt(), &t).unwrap();
        assert!(series_equal(&a, &b, &t).unwrap());
        assert!(series_equal(&a, &theta_series(3, &t).unwrap(), &t).unwrap());
    }

    #[test]
    fn series_equal_respects_bounds() {
        let a = poly(&[(0, 1)], None);
        let b = poly(&[(0, 1), (20, 1)], None);
        assert!(series_equal(&a, &b, &Rational::from(10)).unwrap());
        let c = poly(&[(0, 1)], Some(Rational::from(5)));
        assert!(matches!(
            series_equal(&a, &c, &Rational::from(10)),
            Err(Error::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn half_derivative_examples() {
        let f = poly(&[(1, 1), (4, 1)], None);
        assert_eq!(half_derivative(&f).unwrap().scaled, poly(&[(1, 1), (4, 2)], None));
        let t1 = theta_series(1, &Rational::from(10)).unwrap();
        let h = half_derivative(&t1).unwrap();
        assert_eq!(h.to_string(), "-2*q + 4*q^4 - 6*q^9 + O(q^10)");
        let c = poly(&[(0, 1)], None);
        assert!(half_derivative(&c).unwrap().scaled.is_zero());
        let t2 = theta_series(2, &Rational::from(2)).unwrap();
        let h2 = half_derivative(&t2).unwrap();
        assert_eq!(h2.to_string(), "1/4*q^(1/16) + 3/4*q^(9/16) + 5/4*q^(25/16) + O(q^2)");
        let odd = poly(&[(2, 3)], None);
        assert_eq!(half_derivative(&odd).unwrap().to_string(), "3*sqrt(2)*q^2");
    }

    #[test]
    fn truncation_rule_for_products() {
        let f = poly(&[(1, 1)], Some(Rational::from(5)));
        let g = poly(&[(2, 1)], Some(Rational::from(4)));
        assert_eq!(f.mul(&g).trunc(), Some(&Rational::from(5)));
    }

    #[test]
    fn inverse_of_series() {
        let t = Rational::from(12);
        let p: RationalQSeries =
            pochhammer(&Rational::from(1), &Rational::from(1), Length::Infinite, None, Some(&t))
                .unwrap();
        let inv = p.inverse().unwrap();
        // Partition numbers.
        let expect = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56];
        for (n, &pn) in expect.iter().enumerate() {
            assert_eq!(inv.coefficient(&Rational::from(n)), pn, "p({n})");
        }
        assert!(series_equal(&p.mul(&inv), &RationalQSeries::one(None), &t).unwrap());
    }
}
