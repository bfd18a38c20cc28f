//! Exact finite evaluation of the strange series at rational points.
//!
//! At `x = a/k` every fractional power of `q` is fixed by the rule
//! `q^c := e^{2 pi i x c}`, so all values live in a cyclotomic field.
//! The series terminate because `(q;q)_n = 0` for `n >= k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::cyclotomic::{gcd, lcm, Cyclotomic, CyclotomicJson};
use crate::error::{Error, Result};
use crate::qseries::{exp_2pi_i, pochhammer, Length, RationalQSeries};

/// A reduced fraction `a/k` with `k > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    a: i64,
    k: u64,
}

impl RationalPoint {
    pub fn new(a: i64, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("denominator must be nonzero"));
        }
        let (a, k) = if k < 0 { (-a, -k) } else { (a, k) };
        let g = gcd(a.unsigned_abs(), k as u64).max(1);
        Ok(RationalPoint {
            a: a / g as i64,
            k: k as u64 / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        RationalPoint { a: n, k: 1 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from((self.a, self.k))
    }

    pub fn to_f64(&self) -> f64 {
        self.a as f64 / self.k as f64
    }

    pub fn add_int(&self, n: i64) -> Self {
        RationalPoint {
            a: self.a + n * self.k as i64,
            k: self.k,
        }
    }

    pub fn add(&self, other: &RationalPoint) -> Self {
        let k = lcm(self.k, other.k);
        let a = self.a * (k / self.k) as i64 + other.a * (k / other.k) as i64;
        RationalPoint::new(a, k as i64).expect("positive denominator")
    }

    pub fn neg(&self) -> Self {
        RationalPoint {
            a: -self.a,
            k: self.k,
        }
    }

    /// `-1/x`.
    pub fn neg_recip(&self) -> Result<Self> {
        if self.a == 0 {
            return Err(Error::invalid("-1/x is undefined at x = 0"));
        }
        RationalPoint::new(-(self.k as i64), self.a)
    }

    /// `q^c = e^{2 pi i x c}` as an exact root of unity.
    pub fn q_power(&self, c: &Rational) -> Cyclotomic {
        exp_2pi_i(&Rational::from(&self.to_rational() * c))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.k)
    }
}

impl FromStr for RationalPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("expected a rational a/k, got {s:?}"));
        match s.split_once('/') {
            Some((a, k)) => RationalPoint::new(
                a.trim().parse().map_err(|_| bad())?,
                k.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(RationalPoint::integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Which strange series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Theta1,
    Theta2,
    Theta3,
    /// Kontsevich's `F(q) = sum (q;q)_n`.
    Kontsevich,
}

impl Component {
    pub fn theta(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Component::Theta1),
            2 => Ok(Component::Theta2),
            3 => Ok(Component::Theta3),
            _ => Err(Error::invalid(format!("no theta component {i}"))),
        }
    }

    /// 1, 2 or 3 for the theta components.
    pub fn index(&self) -> Option<u8> {
        match self {
            Component::Theta1 => Some(1),
            Component::Theta2 => Some(2),
            Component::Theta3 => Some(3),
            Component::Kontsevich => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Component::Theta1 => "1",
            Component::Theta2 => "2",
            Component::Theta3 => "3",
            Component::Kontsevich => "F",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Component::Theta1),
            "2" => Ok(Component::Theta2),
            "3" => Ok(Component::Theta3),
            "F" | "f" => Ok(Component::Kontsevich),
            other => Err(Error::invalid(format!("unknown component {other:?}"))),
        }
    }
}

impl Serialize for Component {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Exact value of a strange series at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub struct StrangeValue {
    pub exact: Cyclotomic,
    pub terms_used: usize,
    pub component: Component,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrangeValueJson {
    pub component: Component,
    pub x: RationalPoint,
    pub exact: String,
    pub value: CyclotomicJson,
    pub decimal: [f64; 2],
    pub terms_used: usize,
}

impl StrangeValue {
    pub fn to_json(&self, x: &RationalPoint) -> StrangeValueJson {
        let e = self.exact.embed(64);
        StrangeValueJson {
            component: self.component,
            x: *x,
            exact: self.exact.to_string(),
            value: self.exact.to_json(),
            decimal: [e.re_f64(), e.im_f64()],
            terms_used: self.terms_used,
        }
    }
}

/// Domain rule: component 1 needs `k` odd, component 3 needs `k` even.
pub fn check_domain(c: Component, x: &RationalPoint) -> Result<()> {
    let rule = match c {
        Component::Theta1 if x.k % 2 == 0 => "component 1 requires an odd denominator",
        Component::Theta3 if x.k % 2 == 1 => "component 3 requires an even denominator",
        _ => return Ok(()),
    };
    Err(Error::OutsideDomain {
        component: c.to_string(),
        point: x.to_string(),
        rule: rule.into(),
    })
}

/// Cyclotomic modulus in which the value at `x` is computed.
pub fn working_field(c: Component, x: &RationalPoint) -> u32 {
    match c {
        Component::Theta1 | Component::Kontsevich => x.k as u32,
        Component::Theta2 | Component::Theta3 => lcm(48, 16 * x.k) as u32,
    }
}

fn one_plus(w: &Cyclotomic) -> Cyclotomic {
    &Cyclotomic::one() + w
}

fn one_minus(w: &Cyclotomic) -> Cyclotomic {
    &Cyclotomic::one() - w
}

fn vanishes(c: Component, x: &RationalPoint, factor: String) -> Error {
    Error::DenominatorVanishes {
        component: c.to_string(),
        point: x.to_string(),
        factor,
    }
}

/// Denominator factor `j` (1-based for component 1, 0-based otherwise) as
/// `(sign, exponent)` meaning `1 - sign q^exponent`.
fn den_factor(c: Component, j: u64) -> Option<(i64, Rational)> {
    match c {
        Component::Theta1 => Some((-1, Rational::from(j))),
        Component::Theta2 => Some((1, Rational::from((2 * j + 1, 2u64)))),
        Component::Theta3 => Some((-1, Rational::from((2 * j + 1, 2u64)))),
        Component::Kontsevich => None,
    }
}

fn factor_string(sign: i64, e: &Rational) -> String {
    format!("1 {} q^{}", if sign > 0 { "-" } else { "+" }, e)
}

/// Exact test of `1 - sign q^e = 0` on the canonical form.
fn check_factor(c: Component, x: &RationalPoint, sign: i64, e: &Rational) -> Result<Cyclotomic> {
    let w = x.q_power(e);
    let f = if sign > 0 { one_minus(&w) } else { one_plus(&w) };
    if f.is_zero() {
        return Err(vanishes(c, x, factor_string(sign, e)));
    }
    Ok(f)
}

fn prefactor(c: Component, x: &RationalPoint) -> Cyclotomic {
    let q16 = x.q_power(&Rational::from((1, 16)));
    match c {
        Component::Theta2 => q16,
        Component::Theta3 => &Cyclotomic::root_of_unity(48, -1) * &q16,
        _ => Cyclotomic::one(),
    }
}

/// The finite product `theta_{i,n}` at `x`:
/// `(q;q)_n/(-q;q)_n`, `q^{1/16}(q;q)_n/(q^{1/2};q)_{n+1}` and
/// `(zeta_16/zeta_12) q^{1/16}(q;q)_n/(-q^{1/2};q)_{n+1}`; for
/// [`Component::Kontsevich`] the term `(q;q)_n`.
pub fn finite_product(c: Component, n: u64, x: &RationalPoint) -> Result<Cyclotomic> {
    let mut den = Cyclotomic::one();
    let (lo, hi) = match c {
        Component::Theta1 => (1, n),
        Component::Kontsevich => (1, 0),
        _ => (0, n),
    };
    for j in lo..=hi {
        let (sign, e) = den_factor(c, j).expect("theta component");
        den = &den * &check_factor(c, x, sign, &e)?;
    }
    let mut num = prefactor(c, x);
    for j in 1..=n {
        num = &num * &one_minus(&x.q_power(&Rational::from(j)));
        if num.is_zero() {
            return Ok(Cyclotomic::zero());
        }
    }
    Ok(num.checked_div(&den)?.minimal())
}

/// Dense group-ring vector `sum v_j zeta_N^j` with integer entries.
#[derive(Clone)]
struct GroupRing {
    n: usize,
    v: Vec<Integer>,
}

impl GroupRing {
    fn one(n: usize) -> Self {
        let mut v = vec![Integer::new(); n];
        v[0] = Integer::from(1);
        GroupRing { n, v }
    }

    /// `self * (1 + sign zeta_N^m)`.
    fn mul_binomial(&self, sign: i64, m: usize) -> Self {
        let mut out = self.v.clone();
        for (j, c) in self.v.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let slot = &mut out[(j + m) % self.n];
            if sign > 0 {
                *slot += c;
            } else {
                *slot -= c;
            }
        }
        GroupRing { n: self.n, v: out }
    }

    fn add(&self, other: &Self) -> Self {
        GroupRing {
            n: self.n,
            v: self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| Integer::from(a + b))
                .collect(),
        }
    }

    fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::from_group_ring(self.n as u32, &self.v)
    }
}

/// Exponent of `zeta_N` representing `q^e` at `x`.
fn zeta_index(x: &RationalPoint, e: &Rational, n: u32) -> usize {
    let r = Rational::from(&x.to_rational() * e) * n;
    debug_assert_eq!(*r.denom(), 1);
    r.numer()
        .to_i64()
        .expect("exponent fits")
        .rem_euclid(n as i64) as usize
}

/// Exact value of the strange series at `x`.
///
/// The sum `t_0 (1 + r_1 (1 + r_2 (1 + ...)))` with `r_j = num_j / den_j`
/// is evaluated from the inside out over a common denominator, so a single
/// field inversion is needed.
pub fn strange_eval(c: Component, x: &RationalPoint) -> Result<StrangeValue> {
    check_domain(c, x)?;
    let n_field = working_field(c, x);
    let k = x.k;
    let last = k - 1;
    // Every denominator factor met by a nonzero term must be nonzero.
    let first_den = match c {
        Component::Theta1 | Component::Kontsevich => 1,
        _ => 0,
    };
    if c != Component::Kontsevich {
        for j in first_den..=last {
            let (sign, e) = den_factor(c, j).unwrap();
            check_factor(c, x, sign, &e)?;
        }
    }
    let nf = n_field as usize;
    let mut p = GroupRing::one(nf);
    let mut q = GroupRing::one(nf);
    for j in (1..=last).rev() {
        let m_num = zeta_index(x, &Rational::from(j), n_field);
        let num_p = p.mul_binomial(-1, m_num);
        let den_q = match den_factor(c, j) {
            Some((sign, e)) => q.mul_binomial(-sign, zeta_index(x, &e, n_field)),
            None => q.clone(),
        };
        p = den_q.add(&num_p);
        q = den_q;
    }
    let mut t0 = prefactor(c, x);
    if matches!(c, Component::Theta2 | Component::Theta3) {
        let (sign, e) = den_factor(c, 0).unwrap();
        t0 = t0.checked_div(&check_factor(c, x, sign, &e)?)?;
    }
    let pc = p.to_cyclotomic();
    let qc = q.to_cyclotomic();
    let value = &t0 * &pc.checked_div(&qc)?;
    Ok(StrangeValue {
        exact: value.minimal(),
        terms_used: k as usize,
        component: c,
    })
}

/// `phi_i(x)` for a theta component.
pub fn phi(i: u8, x: &RationalPoint) -> Result<Cyclotomic> {
    Ok(strange_eval(Component::theta(i)?, x)?.exact)
}

/// Outcome of the symbolic check of the inversion law
/// `(a^-1; q^-alpha)_n = (-1)^n a^-n q^{-alpha n(n-1)/2} (a; q^alpha)_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InversionCheck {
    pub n: u32,
    pub alpha: String,
    pub a_exp: String,
    pub holds: bool,
    /// The variant with `a^n q^{+alpha n(n-1)/2}`.
    pub printed_form_holds: bool,
}

/// Laurent polynomial in a formal `A` and `q^(1/D)`.
#[derive(Clone, Debug, PartialEq)]
struct Bivariate {
    d: u64,
    terms: BTreeMap<(i64, i64), Rational>,
}

impl Bivariate {
    fn monomial(d: u64, c: i64, a: i64, qe: &Rational) -> Self {
        let k = Rational::from(qe * d);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((a, k.numer().to_i64().unwrap()), Rational::from(c));
        }
        Bivariate { d, terms }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
        for ((a1, q1), c1) in &self.terms {
            for ((a2, q2), c2) in &o.terms {
                *terms.entry((a1 + a2, q1 + q2)).or_default() += Rational::from(c1 * c2);
            }
        }
        terms.retain(|_, c| *c != 0);
        Bivariate { d: self.d, terms }
    }

    fn one_minus(&self) -> Self {
        let mut terms: BTreeMap<(i64, i64), Rational> =
            self.terms.iter().map(|(k, c)| (*k, Rational::from(-c))).collect();
        *terms.entry((0, 0)).or_default() += 1;
        terms.retain(|_, c| *c != 0);
        Bivariate { d: self.d, terms }
    }
}

/// Verifies the inversion law for `a = A q^{a_exp}` with a formal `A`.
pub fn invert_pochhammer(a_exp: &Rational, alpha: &Rational, n: u32) -> Result<InversionCheck> {
    if n > 12 {
        return Err(Error::invalid("symbolic inversion check supports n <= 12"));
    }
    if *alpha == 0 {
        return Err(Error::invalid("alpha must be nonzero"));
    }
    let d = lcm(
        a_exp.denom().to_u64().unwrap(),
        alpha.denom().to_u64().unwrap(),
    );
    let one = Bivariate::monomial(d, 1, 0, &Rational::new());
    let mut lhs = one.clone();
    let mut poch = one.clone();
    for j in 0..n as i64 {
        let shift = Rational::from(alpha * j);
        let inv_term = Bivariate::monomial(d, 1, -1, &(-Rational::from(a_exp + &shift)));
        lhs = lhs.mul(&inv_term.one_minus());
        let term = Bivariate::monomial(d, 1, 1, &Rational::from(a_exp + &shift));
        poch = poch.mul(&term.one_minus());
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let tri = Rational::from(alpha * (n as i64 * (n as i64 - 1) / 2));
    let n_i = n as i64;
    let corrected = Bivariate::monomial(
        d,
        sign,
        -n_i,
        &(-Rational::from(a_exp * n_i) - &tri),
    )
    .mul(&poch);
    let printed = Bivariate::monomial(d, sign, n_i, &(Rational::from(a_exp * n_i) + &tri))
        .mul(&poch);
    let report = InversionCheck {
        n,
        alpha: alpha.to_string(),
        a_exp: a_exp.to_string(),
        holds: lhs == corrected,
        printed_form_holds: lhs == printed,
    };
    if !report.holds {
        return Err(Error::IdentityFails(format!(
            "inversion law fails for n = {n}, alpha = {alpha}"
        )));
    }
    Ok(report)
}

/// The convergent companions of the strange series at `q^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GSeries {
    /// `2 sum q^{2n+1}(q;q)_{2n} / ((1+q^{2n+1})(-q;q)_{2n})`.
    G1,
    /// `1 + ((q-1)/2) sum (q;q)_n/(-q;q)_n (-q)^n`.
    G1Fine,
    /// `sum q^n (q^2;q^2)_n / (q^3;q^2)_n`.
    Kernel,
}

fn rq(n: i64) -> Rational {
    Rational::from(n)
}

/// Expansion of a companion series below `trunc`.
pub fn inverse_series(which: GSeries, trunc: &Rational) -> Result<RationalQSeries> {
    let t = Some(trunc.clone());
    let neg1 = rq(-1);
    let one = rq(1);
    let mut acc = RationalQSeries::zero(t.clone());
    match which {
        GSeries::G1 => {
            let mut n = 0i64;
            while rq(2 * n + 1) < *trunc {
                let mut term = pochhammer(&one, &one, Length::Finite(2 * n as u64), None, None)?
                    .with_trunc(t.clone())
                    .shift(&rq(2 * n + 1))
                    .scale(&rq(2));
                term = term.div_binomial(&neg1, &rq(2 * n + 1))?;
                for j in 1..=2 * n {
                    term = term.div_binomial(&neg1, &rq(j))?;
                }
                acc = acc.add(&term);
                n += 1;
            }
        }
        GSeries::G1Fine => {
            let mut n = 0i64;
            let mut sum = RationalQSeries::zero(t.clone());
            while rq(n) < *trunc {
                let mut term = pochhammer(&one, &one, Length::Finite(n as u64), None, None)?
                    .with_trunc(t.clone())
                    .shift(&rq(n))
                    .scale(&rq(if n % 2 == 0 { 1 } else { -1 }));
                for j in 1..=n {
                    term = term.div_binomial(&neg1, &rq(j))?;
                }
                sum = sum.add(&term);
                n += 1;
            }
            let half = Rational::from((1, 2));
            let factor = RationalQSeries::from_terms([(rq(1), half.clone()), (rq(0), -half)], None);
            acc = RationalQSeries::one(t.clone()).add(&factor.mul(&sum));
        }
        GSeries::Kernel => {
            let mut n = 0i64;
            while rq(n) < *trunc {
                let mut term = pochhammer(&rq(2), &rq(2), Length::Finite(n as u64), None, None)?
                    .with_trunc(t.clone())
                    .shift(&rq(n));
                for j in 0..n {
                    term = term.div_binomial(&one, &rq(2 * j + 3))?;
                }
                acc = acc.add(&term);
                n += 1;
            }
        }
    }
    Ok(acc)
}

/// `G_1^Fine - G_1` as q-series.
///
/// The two forms agree at roots of unity but not as power series: the
/// alternating sum `sum (-1)^n (q;q)_n/(-q;q)_n` is summed by pairing in
/// `G_1` and by Abel's method in the Fine form, which adds half the limit
/// `(q;q)_inf/(-q;q)_inf = eta(z)^2/eta(2z)`.
pub fn fine_defect(trunc: &Rational) -> Result<RationalQSeries> {
    Ok(inverse_series(GSeries::G1Fine, trunc)?.sub(&inverse_series(GSeries::G1, trunc)?))
}

/// `G_1` at `x`, a finite sum since `(q;q)_{2n} = 0` once `2n >= k`.
pub fn g1_eval(x: &RationalPoint) -> Result<Cyclotomic> {
    let c = Component::Theta1;
    if x.k % 2 == 0 {
        return Err(Error::OutsideDomain {
            component: "G1".into(),
            point: x.to_string(),
            rule: "G1 terminates at odd-order roots of unity".into(),
        });
    }
    let q = |e: i64| x.q_power(&rq(e));
    let mut sum = Cyclotomic::zero();
    let mut poch_num = Cyclotomic::one();
    let mut poch_den = Cyclotomic::one();
    let mut n = 0i64;
    while 2 * n < x.k as i64 {
        if n > 0 {
            for j in [2 * n - 1, 2 * n] {
                poch_num = &poch_num * &one_minus(&q(j));
                poch_den = &poch_den * &check_factor(c, x, -1, &rq(j))?;
            }
        }
        let den = &poch_den * &check_factor(c, x, -1, &rq(2 * n + 1))?;
        let num = (&q(2 * n + 1) * &poch_num).scale(&rq(2));
        sum = &sum + &num.checked_div(&den)?;
        n += 1;
    }
    Ok(sum.minimal())
}

/// Fine-identity form of `G_1` at `x`.
pub fn g1_fine_eval(x: &RationalPoint) -> Result<Cyclotomic> {
    let c = Component::Theta1;
    check_domain(c, x)?;
    let q = |e: i64| x.q_power(&rq(e));
    let mut sum = Cyclotomic::zero();
    let mut term = Cyclotomic::one();
    for n in 0..x.k as i64 {
        if n > 0 {
            let r = (&one_minus(&q(n)) * &(-&q(1)))
                .checked_div(&check_factor(c, x, -1, &rq(n))?)?;
            term = &term * &r;
        }
        sum = &sum + &term;
    }
    let factor = (&q(1) - &Cyclotomic::one()).scale(&Rational::from((1, 2)));
    Ok((&Cyclotomic::one() + &(&factor * &sum)).minimal())
}

/// `K(Q) = sum Q^n (Q^2;Q^2)_n/(Q^3;Q^2)_n` at `Q = e^{2 pi i y}`, a finite
/// sum once `Q^2` is a root of unity of order `k`.
fn kernel_eval(y: &Rational, label: &str, x: &RationalPoint) -> Result<Cyclotomic> {
    let big_q = |e: i64| exp_2pi_i(&Rational::from(y * e));
    let order = Rational::from(y * 2).denom().to_u64().unwrap();
    let mut sum = Cyclotomic::zero();
    let mut term = Cyclotomic::one();
    for n in 0..order as i64 {
        if n > 0 {
            let den = one_minus(&big_q(2 * n + 1));
            if den.is_zero() {
                return Err(Error::DenominatorVanishes {
                    component: label.into(),
                    point: x.to_string(),
                    factor: format!("1 - Q^{}", 2 * n + 1),
                });
            }
            let num = &one_minus(&big_q(2 * n)) * &big_q(1);
            term = &term * &num.checked_div(&den)?;
        }
        sum = &sum + &term;
    }
    Ok(sum)
}

/// Companion `G_i` at `x` with `theta_i^S(q^-1) = G_i(q)`:
/// `G_2(x) = e^{-2 pi i x/16} K(e^{pi i x}) / (1 - e^{-pi i x})` and
/// `G_3(x) = zeta_12^-1 G_2(x - 1)`.
pub fn g_eval(c: Component, x: &RationalPoint) -> Result<Cyclotomic> {
    match c {
        Component::Theta1 => g1_eval(x),
        Component::Theta2 => {
            let label = "G2";
            let half = Rational::from(&x.to_rational() / 2u32);
            let pre = exp_2pi_i(&(-Rational::from(&x.to_rational() / 16u32)));
            let d = one_minus(&exp_2pi_i(&Rational::from(-&half)));
            if d.is_zero() {
                return Err(Error::DenominatorVanishes {
                    component: label.into(),
                    point: x.to_string(),
                    factor: "1 - e^{-pi i x}".into(),
                });
            }
            let k = kernel_eval(&half, label, x)?;
            Ok((&pre * &k).checked_div(&d)?.minimal())
        }
        Component::Theta3 => {
            if x.k % 2 == 1 {
                return Err(Error::OutsideDomain {
                    component: "G3".into(),
                    point: x.to_string(),
                    rule: "G3 terminates at even-order roots of unity".into(),
                });
            }
            let g2 = g_eval(Component::Theta2, &x.add_int(-1))?;
            Ok((&Cyclotomic::root_of_unity(12, -1) * &g2).minimal())
        }
        Component::Kontsevich => Err(Error::invalid("no companion series for F")),
    }
}
