//! Twisted L-values at negative integers, the radial sums `H_9`, `H_10`,
//! heat-sum asymptotics and quadratic Gauss sums.

use std::io::Write;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::cyclotomic::{Cyclotomic, lcm};
use crate::error::{Error, Result};
use crate::hpc::HpComplex;
use crate::strange::RationalPoint;

/// A periodic sequence `chi(1), ..., chi(c)` of cyclotomic numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSequence {
    values: Vec<Cyclotomic>,
    mean_value_zero: bool,
}

impl PeriodicSequence {
    /// `values[j]` is `chi(j + 1)`.
    pub fn new(values: Vec<Cyclotomic>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("period must be positive"));
        }
        let total = values.iter().fold(Cyclotomic::zero(), |acc, v| &acc + v);
        Ok(PeriodicSequence {
            values,
            mean_value_zero: total.is_zero(),
        })
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    pub fn mean_value_zero(&self) -> bool {
        self.mean_value_zero
    }

    /// `chi(n)` for any integer `n`.
    pub fn at(&self, n: i64) -> &Cyclotomic {
        let c = self.values.len() as i64;
        &self.values[((n - 1).rem_euclid(c)) as usize]
    }

    /// The same sequence written over `m` periods.
    pub fn repeated(&self, m: usize) -> Self {
        let values = (0..m).flat_map(|_| self.values.iter().cloned()).collect();
        PeriodicSequence {
            values,
            mean_value_zero: self.mean_value_zero,
        }
    }

    /// Smallest `d | c` with `chi(n + d) = chi(n)`.
    pub fn minimal_period(&self) -> usize {
        let c = self.values.len();
        (1..=c)
            .filter(|d| c % d == 0)
            .find(|&d| (0..c).all(|j| self.values[j] == self.values[(j + d) % c]))
            .unwrap_or(c)
    }

    pub fn linear_combination(
        a: &Cyclotomic,
        x: &PeriodicSequence,
        b: &Cyclotomic,
        y: &PeriodicSequence,
    ) -> Result<Self> {
        let c = lcm(x.period() as u64, y.period() as u64) as i64;
        let values = (1..=c).map(|n| &(a * x.at(n)) + &(b * y.at(n))).collect();
        PeriodicSequence::new(values)
    }

    fn require_mean_zero(&self) -> Result<()> {
        if self.mean_value_zero {
            Ok(())
        } else {
            Err(Error::NotMeanValueZero {
                period: self.values.len() as u32,
            })
        }
    }
}

fn domain(which: &str, x: &RationalPoint, rule: &str) -> Error {
    Error::OutsideDomain {
        component: which.into(),
        point: x.to_string(),
        rule: rule.into(),
    }
}

/// `chi(n) = (-zeta)^{n^2}` for `zeta = e^{2 pi i a/k}`, `k` odd, period `2k`.
pub fn chi_l1(zeta: &RationalPoint) -> Result<PeriodicSequence> {
    let k = zeta.k();
    if k % 2 == 0 {
        return Err(domain("L1", zeta, "L1 needs an odd-order root of unity"));
    }
    let c = 2 * k;
    let e = (2 * zeta.a()).rem_euclid(c as i64) + k as i64;
    let values = (1..=c as i64)
        .map(|n| Cyclotomic::root_of_unity(c as u32, (e * (n * n % c as i64)) % c as i64))
        .collect();
    let chi = PeriodicSequence::new(values)?;
    chi.require_mean_zero()?;
    Ok(chi)
}

/// `chi(n) = [n odd] e^{2 pi i x n^2 / 8}`, `k` even, period `8k`.
pub fn chi_l2(zeta: &RationalPoint) -> Result<PeriodicSequence> {
    let k = zeta.k();
    if k % 2 == 1 {
        return Err(domain("L2", zeta, "L2 needs an even-order root of unity"));
    }
    let c = 8 * k as i64;
    let values = (1..=c)
        .map(|n| {
            if n % 2 == 0 {
                Cyclotomic::zero()
            } else {
                Cyclotomic::root_of_unity(c as u32, (zeta.a() * (n * n % c)).rem_euclid(c))
            }
        })
        .collect();
    let chi = PeriodicSequence::new(values)?;
    chi.require_mean_zero()?;
    Ok(chi)
}

fn binomial(n: u64, k: u64) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// Bernoulli numbers with `B_1 = -1/2`, cached.
fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = cache.lock().unwrap();
    while b.len() <= m {
        let n = b.len() as u64;
        let mut s = Rational::new();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from(bk * binomial(n + 1, k as u64));
        }
        b.push(-s / Integer::from(n + 1));
    }
    b[..=m].to_vec()
}

/// Coefficients of `B_m(x)`, constant term first.
pub fn bernoulli_polynomial(m: usize) -> Vec<Rational> {
    let b = bernoulli_numbers(m);
    (0..=m)
        .map(|j| Rational::from(&b[m - j] * binomial(m as u64, j as u64)))
        .collect()
}

fn eval_poly(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

/// `L(-n, chi) = -(c^n/(n+1)) sum_{a=1}^{c} chi(a) B_{n+1}(a/c)`.
pub fn l_value(chi: &PeriodicSequence, n: u32) -> Result<Cyclotomic> {
    chi.require_mean_zero()?;
    let c = chi.period() as u64;
    let poly = bernoulli_polynomial(n as usize + 1);
    let mut acc = Cyclotomic::zero();
    for (j, v) in chi.values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let b = eval_poly(&poly, &Rational::from((j as u64 + 1, c)));
        acc = &acc + &v.scale(&b);
    }
    let factor = -Rational::from(Integer::from(c).pow(n)) / Integer::from(n + 1);
    Ok(acc.scale(&factor).minimal())
}

/// `G(a, b, c) = sum_{n=0}^{c-1} e((a n^2 + b n)/c)`.
pub fn gauss_sum(a: i64, b: i64, c: u64) -> Result<Cyclotomic> {
    if c == 0 {
        return Err(Error::invalid("Gauss sum modulus must be positive"));
    }
    let ci = c as i64;
    let terms = (0..ci).map(|n| {
        let e = (a.rem_euclid(ci) * (n * n % ci) + b.rem_euclid(ci) * n).rem_euclid(ci);
        (e, Rational::from(1))
    });
    Ok(Cyclotomic::from_terms(c as u32, terms).minimal())
}

/// Which radial sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HKind {
    H9,
    H10,
}

impl std::str::FromStr for HKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H9" | "9" => Ok(HKind::H9),
            "H10" | "10" => Ok(HKind::H10),
            other => Err(Error::invalid(format!("unknown sum {other:?}"))),
        }
    }
}

/// How the sum is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum HForm {
    /// `sum (P_n - P_inf)`, which has the power series expansion in `t`.
    #[default]
    Regularized,
    /// The partial products summed as displayed; diverges unless they decay.
    Literal,
    /// `H_10` with factors `(1 - zeta^j e^{-2jt}) / (1 - zeta^j e^{-(2j+1)t})`
    /// for `j = 1..n`, regularized.
    AsPrinted,
}

const MAX_TERMS: u64 = 50_000_000;

fn expi(r: &Rational, wp: u32) -> Complex {
    HpComplex::expi_2pi(r, wp).into_complex()
}

fn abs64(c: &Complex) -> f64 {
    Float::with_val(53, c.abs_ref()).to_f64()
}

/// Numerical `H_9(t, zeta)` or `H_10(t, zeta)`.
///
/// `H_9 = -1/4 sum_n prod_{j<=n} (1 - zeta^j e^{-jt})/(1 + zeta^j e^{-jt})`.
/// `H_10 = -2 Q^{1/8} sum_n (Q^2;Q^2)_n/(Q;Q^2)_{n+1}` with `Q = zeta e^{-t}`
/// and `Q^{1/8} = e^{2 pi i x/8} e^{-t/8}`.
///
/// The partial products converge to a limit `P_inf` with error `O(e^{-nt})`,
/// so `N = ceil((wp + 8) ln 2 / t)` terms settle every summand of
/// `sum (P_n - P_inf)` to `2^{-wp}`; the remaining tail is bounded by
/// `|P_inf| e^{-Nt}/(1 - e^{-t})`.
pub fn h_eval(which: HKind, t: f64, zeta: &RationalPoint, prec: u32, form: HForm) -> Result<HpComplex> {
    if !(t > 0.0) {
        return Err(Error::invalid("t must be positive"));
    }
    match which {
        HKind::H9 if zeta.k() % 2 == 0 => {
            return Err(domain("H9", zeta, "H9 needs an odd-order root of unity"))
        }
        HKind::H10 if zeta.k() % 2 == 1 => {
            return Err(domain("H10", zeta, "H10 needs an even-order root of unity"))
        }
        HKind::H9 if form == HForm::AsPrinted => {
            return Err(Error::invalid("the AsPrinted form applies to H10 only"))
        }
        _ => {}
    }
    let n_terms = ((prec as f64 + 8.0) * std::f64::consts::LN_2 / t).ceil() as u64 + 1;
    if n_terms > MAX_TERMS {
        return Err(Error::NonConvergent {
            terms: n_terms as usize,
        });
    }
    let wp = prec + 32 + (n_terms as f64).log2().ceil() as u32;
    let x = zeta.to_rational();
    let e_t = Float::with_val(wp, -t).exp();
    let zeta_c = expi(&x, wp);
    // Q = zeta e^{-t}
    let big_q = Complex::with_val(wp, &zeta_c * &e_t);
    let one = Complex::with_val(wp, 1);
    let mut p = match which {
        HKind::H9 => one.clone(),
        HKind::H10 => match form {
            HForm::AsPrinted => one.clone(),
            _ => Complex::with_val(wp, &one / Complex::with_val(wp, &one - &big_q)),
        },
    };
    let q2 = Complex::with_val(wp, big_q.square_ref());
    let e_2t = Float::with_val(wp, e_t.square_ref());
    // Running powers used by the factor recurrences.
    let mut pow_a = one.clone();
    let mut pow_zeta = one.clone();
    let mut pow_et2 = Float::with_val(wp, 1);
    let mut sum = Complex::with_val(wp, &p);
    for _ in 1..n_terms {
        let ratio = match (which, form) {
            (HKind::H9, _) => {
                pow_a *= &big_q;
                let num = Complex::with_val(wp, &one - &pow_a);
                let den = Complex::with_val(wp, &one + &pow_a);
                num / den
            }
            (HKind::H10, HForm::AsPrinted) => {
                pow_zeta *= &zeta_c;
                pow_et2 *= &e_2t;
                let num = Complex::with_val(wp, &pow_zeta * &pow_et2);
                let den = Complex::with_val(wp, &num * &e_t);
                Complex::with_val(wp, &one - &num) / Complex::with_val(wp, &one - &den)
            }
            (HKind::H10, _) => {
                // (1 - Q^{2n}) / (1 - Q^{2n+1})
                pow_a *= &q2;
                let num = Complex::with_val(wp, &one - &pow_a);
                let den = Complex::with_val(wp, &one - Complex::with_val(wp, &pow_a * &big_q));
                num / den
            }
        };
        p *= ratio;
        sum += &p;
    }
    let tail_limit = Float::with_val(53, Float::i_exp(1, -(prec as i32) - 8)).to_f64();
    let value = match form {
        HForm::Literal => {
            if abs64(&p) > tail_limit {
                return Err(Error::NonConvergent {
                    terms: n_terms as usize,
                });
            }
            sum
        }
        _ => sum - Complex::with_val(wp, &p * n_terms),
    };
    let out = match which {
        HKind::H9 => value / (-4i32),
        HKind::H10 => {
            let eighth = Rational::from(&x / 8u32);
            let mut pre = expi(&eighth, wp);
            pre *= Float::with_val(wp, -t / 8.0).exp();
            pre *= -2i32;
            value * pre
        }
    };
    Ok(HpComplex::from_complex(Complex::with_val(prec, out)))
}

/// The character paired with each radial sum.
pub fn character_for(which: HKind, zeta: &RationalPoint) -> Result<PeriodicSequence> {
    match which {
        HKind::H9 => chi_l1(zeta),
        HKind::H10 => chi_l2(zeta),
    }
}

/// Expansion coefficients `L(-2n-1, chi) (-1)^n / (n! s^n)` with `s = 1`
/// for `H_9` and `s = 8` for `H_10`.
pub fn expansion_coefficients(which: HKind, zeta: &RationalPoint, order: u32) -> Result<Vec<Cyclotomic>> {
    let chi = character_for(which, zeta)?;
    let s: u64 = match which {
        HKind::H9 => 1,
        HKind::H10 => 8,
    };
    let mut out = Vec::new();
    let mut fact = Integer::from(1);
    for n in 0..=order {
        if n > 0 {
            fact *= n;
        }
        let l = l_value(&chi, 2 * n + 1)?;
        let den: Integer = &fact * Integer::from(s).pow(n);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        out.push(l.scale(&Rational::from((Integer::from(sign), den))));
    }
    Ok(out)
}

fn eval_expansion(coeffs: &[Cyclotomic], t: f64, prec: u32) -> Complex {
    let tf = Float::with_val(prec, t);
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc *= &tf;
        acc += c.embed(prec).as_complex();
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct HResidualRow {
    pub t: f64,
    pub value: [f64; 2],
    pub expansion: [f64; 2],
    pub residual: f64,
    /// `residual(2t) / residual(t)`.
    pub ratio: Option<f64>,
}

/// Residuals of `H` against its degree-`order` expansion on
/// `t0, t0/2, ..., t0/2^{levels-1}`.
pub fn h_residuals(
    which: HKind,
    zeta: &RationalPoint,
    t0: f64,
    levels: u32,
    order: u32,
    prec: u32,
    form: HForm,
) -> Result<Vec<HResidualRow>> {
    let coeffs = expansion_coefficients(which, zeta, order)?;
    let mut rows: Vec<HResidualRow> = Vec::new();
    for j in 0..levels {
        let t = t0 / 2f64.powi(j as i32);
        let v = h_eval(which, t, zeta, prec, form)?.into_complex();
        let e = eval_expansion(&coeffs, t, prec);
        let residual = abs64(&Complex::with_val(prec, &v - &e));
        let ratio = rows.last().map(|r| r.residual / residual);
        rows.push(HResidualRow {
            t,
            value: [v.real().to_f64(), v.imag().to_f64()],
            expansion: [e.real().to_f64(), e.imag().to_f64()],
            residual,
            ratio,
        });
    }
    Ok(rows)
}

/// Writes `(t, H, truncated expansion, residual)` rows as CSV.
pub fn write_h_csv<W: Write>(out: W, rows: &[HResidualRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::invalid(format!("csv output failed: {e}"));
    w.write_record(["t", "h_re", "h_im", "expansion_re", "expansion_im", "residual"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.value[0].to_string(),
            r.value[1].to_string(),
            r.expansion[0].to_string(),
            r.expansion[1].to_string(),
            r.residual.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::invalid(format!("csv output failed: {e}")))?;
    Ok(())
}

/// Fitting strategy for the heat-sum coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum FitMode {
    /// Polynomial interpolation of the heat sum alone.
    #[default]
    Pure,
    /// Order `n` is fitted after subtracting the exact lower orders.
    Subtract,
}

/// Default grid `0.004 * 2^{-j}`, `j = 0..7`.
pub fn default_t_grid() -> Vec<f64> {
    (0..8).map(|j| 0.004 / 2f64.powi(j)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderAgreement {
    pub order: u32,
    /// `L(-2n-1, chi)`.
    pub exact: String,
    pub exact_value: [f64; 2],
    pub fitted: [f64; 2],
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub period: usize,
    pub t_grid: Vec<f64>,
    pub mode: FitMode,
    pub orders: Vec<OrderAgreement>,
}

/// `sum_{n>=1} n chi(n) e^{-n^2 t}`.
pub fn heat_sum(chi: &PeriodicSequence, t: f64, prec: u32) -> Complex {
    let n_max = (((prec as f64 + 16.0) * std::f64::consts::LN_2 + 10.0) / t).sqrt().ceil() as i64 + 2;
    let wp = prec + 16 + (n_max as f64).log2().ceil() as u32;
    let c = chi.period();
    let embedded: Vec<Complex> = chi.values().iter().map(|v| v.embed(wp).into_complex()).collect();
    let tf = Float::with_val(wp, t);
    let mut acc = Complex::new(wp);
    for n in 1..=n_max {
        let v = &embedded[((n - 1) as usize) % c];
        if v.real().is_zero() && v.imag().is_zero() {
            continue;
        }
        let e = Float::with_val(wp, -Float::with_val(wp, &tf * (n * n))).exp() * n;
        acc += Complex::with_val(wp, v * &e);
    }
    acc
}

/// Solves the Vandermonde system `sum_m a_m t_j^m = y_j`.
fn vandermonde(ts: &[f64], ys: &[Complex], prec: u32) -> Vec<Complex> {
    let n = ts.len();
    let t: Vec<Float> = ts.iter().map(|v| Float::with_val(prec, *v)).collect();
    // Newton divided differences, then expand to monomial coefficients.
    let mut d: Vec<Complex> = ys.iter().map(|y| Complex::with_val(prec, y)).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = Complex::with_val(prec, &d[i] - &d[i - 1]);
            let den = Float::with_val(prec, &t[i] - &t[i - j]);
            d[i] = num / den;
        }
    }
    let mut coeffs = vec![Complex::new(prec); n];
    for k in (0..n).rev() {
        // coeffs <- coeffs * (x - t_k) + d_k
        let mut next = vec![Complex::new(prec); n];
        for m in 0..n {
            if m + 1 < n {
                next[m + 1] += &coeffs[m];
            }
            next[m] -= Complex::with_val(prec, &coeffs[m] * &t[k]);
        }
        next[0] += &d[k];
        coeffs = next;
    }
    coeffs
}

/// Compares the heat-sum expansion `sum L(-2n-1, chi)(-t)^n/n!` against
/// coefficients fitted numerically on `t_grid`.
///
/// Poisson summation shows the heat sum differs from its power series by
/// terms of size `c t^{-3/2} e^{-pi^2/(c^2 t)}` for minimal period `c`; the
/// fit is refused when that exceeds `1e-8` on the grid.
pub fn asymptotic_check(
    chi: &PeriodicSequence,
    t_grid: &[f64],
    max_order: u32,
    mode: FitMode,
) -> Result<AsymptoticReport> {
    chi.require_mean_zero()?;
    if t_grid.len() < max_order as usize + 1 || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::FitUnstable(format!(
            "need at least {} positive grid points",
            max_order + 1
        )));
    }
    let c = chi.minimal_period() as f64;
    let t_max = t_grid.iter().cloned().fold(0.0, f64::max);
    let dual = c * t_max.powf(-1.5) * (-std::f64::consts::PI.powi(2) / (c * c * t_max)).exp();
    if dual > 1e-8 {
        return Err(Error::FitUnstable(format!(
            "grid reaches t = {t_max}, where dual terms are of size {dual:.3e}"
        )));
    }
    let prec = 256;
    let ys: Vec<Complex> = t_grid.iter().map(|t| heat_sum(chi, *t, prec)).collect();
    let mut exact = Vec::new();
    let mut fact = Integer::from(1);
    for n in 0..=max_order {
        if n > 0 {
            fact *= n;
        }
        let l = l_value(chi, 2 * n + 1)?;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        exact.push((l.clone(), l.scale(&Rational::from((Integer::from(sign), fact.clone())))));
    }
    let fitted_coeffs: Vec<Complex> = match mode {
        FitMode::Pure => vandermonde(t_grid, &ys, prec),
        FitMode::Subtract => {
            let mut out = Vec::new();
            for n in 0..=max_order as usize {
                let resid: Vec<Complex> = t_grid
                    .iter()
                    .zip(&ys)
                    .map(|(t, y)| {
                        let mut r = Complex::with_val(prec, y);
                        for (m, (_, coef)) in exact.iter().enumerate().take(n) {
                            let tm = Float::with_val(prec, *t).pow(m as u32);
                            r -= Complex::with_val(prec, coef.embed(prec).as_complex() * tm);
                        }
                        r / Float::with_val(prec, *t).pow(n as u32)
                    })
                    .collect();
                out.push(vandermonde(t_grid, &resid, prec).swap_remove(0));
            }
            out
        }
    };
    let mut orders = Vec::new();
    let mut fact = Integer::from(1);
    for n in 0..=max_order {
        if n > 0 {
            fact *= n;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        // L = coefficient * n! * (-1)^n
        let mut fitted = Complex::with_val(prec, &fitted_coeffs[n as usize] * Float::with_val(prec, &fact));
        if sign < 0 {
            fitted = -fitted;
        }
        let (l, _) = &exact[n as usize];
        let ev = l.embed(prec).into_complex();
        let diff = abs64(&Complex::with_val(prec, &fitted - &ev));
        let scale = abs64(&ev);
        orders.push(OrderAgreement {
            order: n,
            exact: l.to_string(),
            exact_value: [ev.real().to_f64(), ev.imag().to_f64()],
            fitted: [fitted.real().to_f64(), fitted.imag().to_f64()],
            relative_error: if scale > 0.0 { diff / scale } else { diff },
        });
    }
    Ok(AsymptoticReport {
        period: chi.period(),
        t_grid: t_grid.to_vec(),
        mode,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: i64, k: i64) -> RationalPoint {
        RationalPoint::new(a, k).unwrap()
    }

    fn alternating() -> PeriodicSequence {
        PeriodicSequence::new(vec![Cyclotomic::one(), Cyclotomic::from_i64(-1)]).unwrap()
    }

    #[test]
    fn bernoulli() {
        let b2 = bernoulli_polynomial(2);
        assert_eq!(b2, vec![Rational::from((1, 6)), Rational::from(-1), Rational::from(1)]);
        for m in 2..12 {
            let p = bernoulli_polynomial(m);
            assert_eq!(eval_poly(&p, &Rational::from(1)), eval_poly(&p, &Rational::new()));
        }
    }

    #[test]
    fn l_value_examples() {
        assert_eq!(l_value(&alternating(), 1).unwrap(), Cyclotomic::from_rational(Rational::from((1, 4))));
        let zero = PeriodicSequence::new(vec![Cyclotomic::zero(); 3]).unwrap();
        assert!(l_value(&zero, 3).unwrap().is_zero());
        let bad = PeriodicSequence::new(vec![Cyclotomic::one()]).unwrap();
        assert!(matches!(l_value(&bad, 1), Err(Error::NotMeanValueZero { .. })));
    }

    #[test]
    fn l_value_is_period_stable() {
        let chi = chi_l1(&x(1, 3)).unwrap();
        for n in [1, 3, 5] {
            assert_eq!(l_value(&chi, n).unwrap(), l_value(&chi.repeated(2), n).unwrap());
        }
    }

    #[test]
    fn characters() {
        let chi = chi_l1(&x(1, 3)).unwrap();
        assert_eq!(chi.period(), 6);
        let exps: Vec<_> = (1..=6).map(|n| chi.at(n).clone()).collect();
        let expect: Vec<_> = [5, 2, 3, 2, 5, 0].iter().map(|e| Cyclotomic::root_of_unity(6, *e)).collect();
        assert_eq!(exps, expect);
        assert_eq!(chi_l1(&x(0, 1)).unwrap().period(), 2);
        assert_eq!(chi_l2(&x(1, 2)).unwrap().period(), 16);
        assert_eq!(chi_l2(&x(1, 4)).unwrap().period(), 32);
        assert!(chi_l2(&x(1, 3)).is_err());
    }

    #[test]
    fn gauss_sum_examples() {
        assert!(gauss_sum(1, 0, 2).unwrap().is_zero());
        assert_eq!(gauss_sum(1, 0, 4).unwrap(), "2 + 2*z4".parse().unwrap());
        assert!(gauss_sum(1, 1, 4).unwrap().is_zero());
    }

    #[test]
    fn alternating_heat_sum_fit() {
        let r = asymptotic_check(&alternating(), &default_t_grid(), 2, FitMode::Pure).unwrap();
        assert!((r.orders[0].fitted[0] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn coarse_grid_is_unstable() {
        let chi = chi_l1(&x(1, 3)).unwrap();
        let r = asymptotic_check(&chi, &[0.1, 0.05, 0.025, 0.0125], 2, FitMode::Pure);
        assert!(matches!(r, Err(Error::FitUnstable(_))));
    }

    #[test]
    fn h9_matches_expansion() {
        let rows = h_residuals(HKind::H9, &x(1, 3), 0.025, 3, 3, 128, HForm::Regularized).unwrap();
        assert!(rows[0].residual < 1e-2, "{rows:?}");
        assert!(rows.windows(2).all(|w| w[1].residual < w[0].residual));
    }

    #[test]
    fn h9_literal_diverges() {
        let r = h_eval(HKind::H9, 0.1, &x(1, 3), 64, HForm::Literal);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn h10_substituted_tracks_expansion_and_printed_form_does_not() {
        let z = x(1, 2);
        let rows = h_residuals(HKind::H10, &z, 0.0125, 3, 3, 128, HForm::Regularized).unwrap();
        let r = rows[2].ratio.unwrap();
        assert!((r - 16.0).abs() < 3.2, "{rows:?}");
        let printed = h_residuals(HKind::H10, &z, 0.0125, 3, 3, 128, HForm::AsPrinted).unwrap();
        assert!(printed[2].residual > 1e3 * rows[2].residual, "{printed:?}");
    }
}
