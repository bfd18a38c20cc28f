//! Numerical evaluation of `eta`, the theta components and the vector `H`
//! on the upper half-plane.
//!
//! `log eta` is computed after reducing `z` into the standard fundamental
//! domain with `eta(z+1) = zeta_24 eta(z)` and
//! `eta(-1/z) = (z/i)^{1/2} eta(z)`, so the pentagonal sum always converges
//! geometrically with ratio below `e^{-5.4}`. The theta components are eta
//! quotients
//!
//! * `theta_1(z) = eta(z)^2 / eta(2z)`
//! * `theta_2(z) = eta(z)^2 / eta(z/2)`
//! * `theta_3(z) = eta(z)^2 / eta(z/2 + 1/2)`
//!
//! and are also available through their theta series.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::hpc::HpComplex;
use crate::strange::{self, Component, RationalPoint};

const MAX_REDUCTION_STEPS: usize = 100_000;
const MAX_SERIES_TERMS: u64 = 10_000_000;

/// A point of the upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct UHPoint {
    z: HpComplex,
}

impl UHPoint {
    pub fn new(z: HpComplex) -> Result<Self> {
        if z.im().is_sign_negative() || z.im().is_zero() || z.im().is_nan() {
            return Err(Error::invalid(format!("Im(z) must be positive, got z = {z}")));
        }
        Ok(UHPoint { z })
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Result<Self> {
        Self::new(HpComplex::from_f64(re, im, prec))
    }

    pub fn z(&self) -> &HpComplex {
        &self.z
    }
}

fn pi(wp: u32) -> Float {
    Float::with_val(wp, Constant::Pi)
}

fn log2_f64(x: f64) -> u32 {
    if x <= 1.0 {
        0
    } else {
        x.log2().ceil() as u32
    }
}

/// Working precision for evaluating at `z` with target `prec`.
fn working_precision(z: &Complex, prec: u32) -> u32 {
    let im = z.imag().to_f64().abs().max(f64::MIN_POSITIVE);
    let re = z.real().to_f64().abs();
    prec + 16 + log2_f64(1.0 + 2.0 / im) + log2_f64(1.0 + re + im)
}

/// Principal `log eta(z)` up to the branch implied by the reduction; the
/// exponential of the result is `eta(z)`.
fn log_eta_wp(z: &Complex, wp: u32) -> Result<Complex> {
    let mut z = Complex::with_val(wp, z);
    let mut acc = Complex::new(wp);
    let pi = pi(wp);
    let mut steps = 0;
    loop {
        let n = z.real().to_integer().unwrap_or_default();
        if n != 0 {
            *z.mut_real() -= &n;
            let shift = Float::with_val(wp, &pi * &n) / 12u32;
            *acc.mut_imag() += &shift;
        }
        let r = Float::with_val(wp, z.abs_ref());
        if r >= 1 {
            break;
        }
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(Error::PrecisionUnreachable(
                "modular reduction did not terminate".into(),
            ));
        }
        let w = -Complex::with_val(wp, z.recip_ref());
        // w / i = Im(w) - i Re(w)
        let w_over_i = Complex::with_val(wp, (w.imag(), -Float::with_val(wp, w.real())));
        acc += w_over_i.ln() / 2u32;
        z = w;
    }
    // 2 pi i z / 24
    let mut lead = Complex::with_val(wp, &z * &pi);
    lead /= 12u32;
    lead.mul_i_mut(false);
    acc += lead;
    let im = z.imag().to_f64();
    let decay_bits = 2.0 * std::f64::consts::PI * im * std::f64::consts::LOG2_E;
    if decay_bits <= (wp + 2) as f64 {
        acc += pentagonal(&z, wp, decay_bits).ln();
    }
    Ok(acc)
}

/// `prod (1 - q^n) = sum (-1)^k q^{k(3k-1)/2}` over all integers `k`.
fn pentagonal(z: &Complex, wp: u32, decay_bits: f64) -> Complex {
    let mut arg = Complex::with_val(wp, z * pi(wp));
    arg *= 2u32;
    arg.mul_i_mut(false);
    let q = arg.exp();
    let mut sum = Complex::with_val(wp, 1);
    let mut k = 1u32;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if e1 as f64 * decay_bits > (wp + 8) as f64 {
            break;
        }
        let t1 = Complex::with_val(wp, (&q).pow(e1));
        let t2 = Complex::with_val(wp, (&q).pow(e1 + k));
        if k % 2 == 1 {
            sum -= t1;
            sum -= t2;
        } else {
            sum += t1;
            sum += t2;
        }
        k += 1;
    }
    sum
}

/// `log eta(z)` at precision `prec`.
pub fn log_eta(z: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_precision(z.z.as_complex(), prec);
    let l = log_eta_wp(z.z.as_complex(), wp)?;
    Ok(HpComplex::from_complex(Complex::with_val(prec, l)))
}

/// Dedekind's `eta(z) = q^{1/24} (q;q)_inf`.
pub fn eta(z: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_precision(z.z.as_complex(), prec);
    let l = log_eta_wp(z.z.as_complex(), wp)?;
    Ok(HpComplex::from_complex(Complex::with_val(prec, l.exp())))
}

/// Evaluation route for the theta components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ThetaMethod {
    /// Theta series when `Im z >= 1/2`, eta quotient otherwise.
    #[default]
    Auto,
    EtaQuotient,
    Series,
}

fn check_index(i: u8) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::invalid(format!("theta component must be 1, 2 or 3, got {i}")))
    }
}

fn theta_eta_quotient(i: u8, z: &Complex, wp: u32) -> Result<Complex> {
    let other = match i {
        1 => Complex::with_val(wp, z * 2u32),
        2 => Complex::with_val(wp, z / 2u32),
        _ => {
            let mut w = Complex::with_val(wp, z / 2u32);
            *w.mut_real() += Float::with_val(wp, 0.5);
            w
        }
    };
    let mut l = log_eta_wp(z, wp)?;
    l *= 2u32;
    l -= log_eta_wp(&other, wp)?;
    Ok(l.exp())
}

/// `e^{2 pi i z / d}`.
fn nome(z: &Complex, d: u32, wp: u32) -> Complex {
    let mut arg = Complex::with_val(wp, z * pi(wp));
    arg *= 2u32;
    arg /= d;
    arg.mul_i_mut(false);
    arg.exp()
}

/// Shape of the theta-like sums `sum_n s_n w_n base^{e_n}`.
#[derive(Clone, Copy)]
enum SumKind {
    /// `base = q`, `e_n = n^2`, `n >= 1`, `s_n = (-1)^n`.
    Squares,
    /// `base = q^{1/16}`, `e_n = (2n+1)^2`, `n >= 0`, `s_n = 1`.
    OddSquares,
    /// As `OddSquares` with `s_n = (-1)^{n(n+1)/2}`.
    OddSquaresSigned,
}

/// Sums `sum s_n w(n) base^{e_n}`. The magnitudes `w(n) |base|^{e_n}` are
/// unimodal in `n` for polynomial weights, so once they decrease and fall
/// below `2^{-wp-8}` times the peak (or 1) every later term is smaller
/// still and the tail is bounded by a geometric series.
fn theta_like_sum(
    base: &Complex,
    kind: SumKind,
    weight: impl Fn(u64) -> u64,
    wp: u32,
) -> Result<Complex> {
    let mut sum = Complex::new(wp);
    let (mut n, mut power, mut ratio, step) = match kind {
        SumKind::Squares => (
            1u64,
            base.clone(),
            Complex::with_val(wp, base.pow(3u32)),
            Complex::with_val(wp, base.square_ref()),
        ),
        SumKind::OddSquares | SumKind::OddSquaresSigned => {
            let b8 = Complex::with_val(wp, base.pow(8u32));
            (0u64, base.clone(), b8.clone(), b8)
        }
    };
    let cut = Float::with_val(32, Float::i_exp(1, -(wp as i32) - 8));
    let mut peak = Float::with_val(32, 1);
    let mut prev = Float::with_val(32, 0);
    loop {
        let sign_neg = match kind {
            SumKind::Squares => n % 2 == 1,
            SumKind::OddSquares => false,
            SumKind::OddSquaresSigned => (n * (n + 1) / 2) % 2 == 1,
        };
        let w = weight(n);
        let term = Complex::with_val(wp, &power * w);
        let mag = Float::with_val(32, term.abs_ref());
        if sign_neg {
            sum -= &term;
        } else {
            sum += &term;
        }
        if mag > peak {
            peak.clone_from(&mag);
        }
        if mag <= prev && mag < Float::with_val(32, &cut * &peak) {
            break;
        }
        if power.real().is_zero() && power.imag().is_zero() {
            break;
        }
        prev = mag;
        n += 1;
        if n > MAX_SERIES_TERMS {
            return Err(Error::PrecisionUnreachable(format!(
                "theta series needs more than {MAX_SERIES_TERMS} terms"
            )));
        }
        power *= &ratio;
        ratio *= &step;
    }
    Ok(sum)
}

fn zeta48_inv(wp: u32) -> Complex {
    Complex::with_val(wp, Cyclotomic::root_of_unity(48, -1).embed(wp).as_complex())
}

fn theta_series_value(i: u8, z: &Complex, wp: u32) -> Result<Complex> {
    match i {
        1 => {
            let q = nome(z, 1, wp);
            let s = theta_like_sum(&q, SumKind::Squares, |_| 2, wp)?;
            Ok(s + 1u32)
        }
        2 => theta_like_sum(&nome(z, 16, wp), SumKind::OddSquares, |_| 1, wp),
        _ => {
            let s = theta_like_sum(&nome(z, 16, wp), SumKind::OddSquaresSigned, |_| 1, wp)?;
            Ok(s * zeta48_inv(wp))
        }
    }
}

/// `theta_i(z)` with an explicit evaluation route.
pub fn theta_value(i: u8, z: &UHPoint, prec: u32, method: ThetaMethod) -> Result<HpComplex> {
    check_index(i)?;
    let zc = z.z.as_complex();
    let wp = working_precision(zc, prec);
    let use_series = match method {
        ThetaMethod::Series => true,
        ThetaMethod::EtaQuotient => false,
        ThetaMethod::Auto => *zc.imag() >= 0.5,
    };
    let v = if use_series {
        theta_series_value(i, zc, wp)?
    } else {
        theta_eta_quotient(i, zc, wp)?
    };
    Ok(HpComplex::from_complex(Complex::with_val(prec, v)))
}

/// `theta_i(z)`.
pub fn theta(i: u8, z: &UHPoint, prec: u32) -> Result<HpComplex> {
    theta_value(i, z, prec, ThetaMethod::Auto)
}

/// `H(z) = (theta_1(z), theta_2(z), theta_3(z))`.
pub fn h_vector(z: &UHPoint, prec: u32) -> Result<[HpComplex; 3]> {
    Ok([theta(1, z, prec)?, theta(2, z, prec)?, theta(3, z, prec)?])
}

/// The half-derivative `sqrt(theta) theta_i` summed numerically:
/// `2 sum (-1)^n n q^{n^2}`, `sum (2n+1)/4 q^{(2n+1)^2/16}` and
/// `zeta_48^-1 sum (-1)^{n(n+1)/2} (2n+1)/4 q^{(2n+1)^2/16}`.
pub fn half_derivative_theta(i: u8, z: &UHPoint, prec: u32) -> Result<HpComplex> {
    check_index(i)?;
    let zc = z.z.as_complex();
    let im = zc.imag().to_f64();
    let wp = working_precision(zc, prec) + log2_f64(1.0 + 1.0 / im);
    let v = match i {
        1 => theta_like_sum(&nome(zc, 1, wp), SumKind::Squares, |n| 2 * n, wp)?,
        2 => {
            let s = theta_like_sum(&nome(zc, 16, wp), SumKind::OddSquares, |n| 2 * n + 1, wp)?;
            s / 4u32
        }
        _ => {
            let s = theta_like_sum(
                &nome(zc, 16, wp),
                SumKind::OddSquaresSigned,
                |n| 2 * n + 1,
                wp,
            )?;
            s * zeta48_inv(wp) / 4u32
        }
    };
    Ok(HpComplex::from_complex(Complex::with_val(prec, v)))
}

/// The exact matrices of the `T` and `S` laws
/// `H(z+1) = M_T H(z)` and `H(-1/z) = (z/i)^{1/2} M_S H(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrices {
    pub m_t: [[Cyclotomic; 3]; 3],
    pub m_s: [[Cyclotomic; 3]; 3],
}

/// `sqrt(2) = zeta_8 + zeta_8^7`.
pub fn sqrt2() -> Cyclotomic {
    &Cyclotomic::root_of_unity(8, 1) + &Cyclotomic::root_of_unity(8, 7)
}

pub type Matrix3 = [[Cyclotomic; 3]; 3];

pub fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            (0..3).fold(Cyclotomic::zero(), |acc, k| &acc + &(&a[r][k] * &b[k][c]))
        })
    })
}

pub fn is_identity(m: &Matrix3) -> bool {
    (0..3).all(|r| (0..3).all(|c| if r == c { m[r][c].is_one() } else { m[r][c].is_zero() }))
}

impl TransformMatrices {
    pub fn standard() -> Self {
        let z = Cyclotomic::zero;
        let s2 = sqrt2();
        let half_s2 = s2.scale(&rug::Rational::from((1, 2)));
        TransformMatrices {
            m_t: [
                [Cyclotomic::one(), z(), z()],
                [z(), z(), Cyclotomic::root_of_unity(12, 1)],
                [z(), Cyclotomic::root_of_unity(24, 1), z()],
            ],
            m_s: [
                [z(), s2, z()],
                [half_s2, z(), z()],
                [z(), z(), Cyclotomic::one()],
            ],
        }
    }

    /// `m v` with the entries embedded at `prec`.
    pub fn apply(m: &Matrix3, v: &[HpComplex; 3], prec: u32) -> [HpComplex; 3] {
        std::array::from_fn(|r| {
            let mut acc = HpComplex::zero(prec);
            for (c, x) in v.iter().enumerate() {
                if !m[r][c].is_zero() {
                    acc = &acc + &(&m[r][c].embed(prec) * x);
                }
            }
            acc
        })
    }
}

fn dist(a: &[HpComplex; 3], b: &[HpComplex; 3]) -> f64 {
    let mut s = Float::with_val(64, 0);
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += Float::with_val(64, d.abs().square_ref());
    }
    s.sqrt().to_f64()
}

/// Residuals of the `T` and `S` laws at one point.
#[derive(Clone, Debug, Serialize)]
pub struct TransformResiduals {
    pub z: [f64; 2],
    pub precision: u32,
    /// `|H(z+1) - M_T H(z)|`.
    pub translation: f64,
    /// `|H(-1/z) - (z/i)^{1/2} M_S H(z)|`.
    pub inversion: f64,
    /// `|H(z)|`, for scale.
    pub norm: f64,
}

pub fn verify_transformations(z: &UHPoint, prec: u32) -> Result<TransformResiduals> {
    let m = TransformMatrices::standard();
    let wp = prec + 8;
    let zc = z.z.with_precision(wp);
    let h = h_vector(&UHPoint::new(zc.clone())?, wp)?;
    let z1 = &zc + &HpComplex::from_f64(1.0, 0.0, wp);
    let h1 = h_vector(&UHPoint::new(z1)?, wp)?;
    let zs = -(&HpComplex::from_f64(1.0, 0.0, wp) / &zc);
    let hs = h_vector(&UHPoint::new(zs)?, wp)?;
    let root = (&zc / &HpComplex::from_f64(0.0, 1.0, wp)).sqrt();
    let mh = TransformMatrices::apply(&m.m_s, &h, wp);
    let rhs_s: [HpComplex; 3] = std::array::from_fn(|r| &root * &mh[r]);
    let rhs_t = TransformMatrices::apply(&m.m_t, &h, wp);
    let zero: [HpComplex; 3] = std::array::from_fn(|_| HpComplex::zero(wp));
    Ok(TransformResiduals {
        z: zc.to_f64_pair().into(),
        precision: prec,
        translation: dist(&h1, &rhs_t),
        inversion: dist(&hs, &rhs_s),
        norm: dist(&h, &zero),
    })
}

/// `|eta(z+1/2) eta(z) eta(4z) - zeta_48 eta(2z)^3|`.
pub fn eta_identity_residual(z: &UHPoint, prec: u32) -> Result<f64> {
    let wp = working_precision(z.z.as_complex(), prec) + 8;
    let zc = Complex::with_val(wp, z.z.as_complex());
    let mut zh = zc.clone();
    *zh.mut_real() += Float::with_val(wp, 0.5);
    let l = |w: Complex| log_eta_wp(&w, wp);
    let lhs = (l(zh)? + l(zc.clone())? + l(Complex::with_val(wp, &zc * 4u32))?).exp();
    let rhs = (l(Complex::with_val(wp, &zc * 2u32))? * 3u32).exp()
        * Cyclotomic::root_of_unity(48, 1).embed(wp).as_complex();
    Ok(Float::with_val(64, (lhs - rhs).abs_ref()).to_f64())
}

/// Constants `c_i` paired with the half-derivatives in the radial limit.
pub const RADIAL_CONSTANTS: [f64; 3] = [2.0, 0.5, 0.5];

#[derive(Clone, Debug, Serialize)]
pub struct RadialSample {
    pub t: f64,
    /// `c_i sqrt(theta) theta_i(e^{2 pi i x - t})`.
    pub value: [f64; 2],
}

/// Radial behaviour of `c_i sqrt(theta) theta_i` toward `e^{2 pi i x}`.
#[derive(Clone, Debug, Serialize)]
pub struct RadialReport {
    pub component: u8,
    pub x: RationalPoint,
    pub constant: f64,
    pub exact: String,
    pub exact_value: [f64; 2],
    pub samples: Vec<RadialSample>,
    /// Linear extrapolation to `t = 0` from the last two samples.
    pub extrapolated: [f64; 2],
    /// `phi_i(x) / extrapolated`, the normalization found.
    pub lambda: [f64; 2],
    /// `|extrapolated - phi_i(x)|`.
    pub error: f64,
}

fn to_pair(c: &Complex) -> [f64; 2] {
    [c.real().to_f64(), c.imag().to_f64()]
}

pub fn radial_limit_check(
    i: u8,
    x: &RationalPoint,
    t_grid: &[f64],
    prec: u32,
) -> Result<RadialReport> {
    let comp = Component::theta(i)?;
    let exact = strange::strange_eval(comp, x)
        .map_err(|e| match e {
            Error::OutsideDomain { rule, .. } => Error::UndefinedComponent {
                component: comp.to_string(),
                point: x.to_string(),
                reason: rule,
            },
            Error::DenominatorVanishes { factor, .. } => Error::UndefinedComponent {
                component: comp.to_string(),
                point: x.to_string(),
                reason: format!("denominator factor {factor} vanishes"),
            },
            other => other,
        })?
        .exact;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid("t grid must be nonempty and positive"));
    }
    let c = RADIAL_CONSTANTS[i as usize - 1];
    let xr = Float::with_val(prec, &x.to_rational());
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let mut samples = Vec::new();
    let mut values = Vec::new();
    for &t in t_grid {
        let im = Float::with_val(prec, t) / &two_pi;
        let z = UHPoint::new(HpComplex::from_parts(xr.clone(), im))?;
        let v = half_derivative_theta(i, &z, prec)?;
        let v = Complex::with_val(prec, v.as_complex() * c);
        samples.push(RadialSample { t, value: to_pair(&v) });
        values.push((t, v));
    }
    let extrap = if values.len() >= 2 {
        let (t1, v1) = &values[values.len() - 2];
        let (t2, v2) = &values[values.len() - 1];
        let num = Complex::with_val(prec, v2 * *t1) - Complex::with_val(prec, v1 * *t2);
        num / (t1 - t2)
    } else {
        values[0].1.clone()
    };
    let ex = Complex::with_val(prec, exact.embed(prec).as_complex());
    let lambda = Complex::with_val(prec, &ex / &extrap);
    let error = Float::with_val(64, (Complex::with_val(prec, &extrap - &ex)).abs_ref()).to_f64();
    Ok(RadialReport {
        component: i,
        x: *x,
        constant: c,
        exact: exact.to_string(),
        exact_value: to_pair(&ex),
        samples,
        extrapolated: to_pair(&extrap),
        lambda: to_pair(&lambda),
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64, im: f64) -> UHPoint {
        UHPoint::from_f64(re, im, 256).unwrap()
    }

    #[test]
    fn eta_at_i() {
        let v = eta(&pt(0.0, 1.0), 128).unwrap();
        assert!((v.re_f64() - 0.768_225_422_326_056_7).abs() < 1e-15);
        assert!(v.im_f64().abs() < 1e-30);
    }

    #[test]
    fn eta_near_real_axis_matches_product() {
        // q-product at z = 0.3 + 0.05i, independent of the reduction.
        let z = pt(0.3, 0.05);
        let wp = 200;
        let q = nome(z.z().as_complex(), 1, wp);
        let mut prod = Complex::with_val(wp, 1);
        let mut qn = q.clone();
        for _ in 0..2000 {
            prod *= Complex::with_val(wp, 1 - &qn);
            qn *= &q;
        }
        prod *= nome(z.z().as_complex(), 24, wp);
        let v = eta(&z, 128).unwrap();
        let d = Float::with_val(64, (prod - v.as_complex()).abs_ref()).to_f64();
        assert!(d < 1e-30, "{d}");
    }

    #[test]
    fn theta1_at_i() {
        let v = theta(1, &pt(0.0, 1.0), 128).unwrap();
        let e = (-2.0 * std::f64::consts::PI).exp();
        assert!((v.re_f64() - (1.0 - 2.0 * e + 2.0 * e.powi(4))).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_of_s() {
        let h = h_vector(&pt(0.0, 1.0), 128).unwrap();
        let r = (&h[0] - &(&h[1] * &sqrt2().embed(128))).abs_f64();
        assert!(r < 1e-30);
    }

    #[test]
    fn series_and_eta_routes_agree() {
        for (re, im) in [(0.1, 0.3), (-0.45, 0.8), (0.25, 2.0), (0.7, 0.2)] {
            let z = pt(re, im);
            for i in 1..=3 {
                let a = theta_value(i, &z, 128, ThetaMethod::Series).unwrap();
                let b = theta_value(i, &z, 128, ThetaMethod::EtaQuotient).unwrap();
                let rel = (&a - &b).abs_f64() / b.abs_f64();
                assert!(rel < 2f64.powi(-116), "theta_{i} at {re}+{im}i: {rel}");
            }
        }
    }

    #[test]
    fn matrices() {
        let m = TransformMatrices::standard();
        assert!(is_identity(&mat_mul(&m.m_s, &m.m_s)));
        assert!(!is_identity(&m.m_t));
    }

    #[test]
    fn transformation_residuals() {
        for (re, im) in [(0.0, 1.0), (0.3, 0.7), (1.0, 1.0), (-0.2, 0.05)] {
            let r = verify_transformations(&pt(re, im), 128).unwrap();
            assert!(r.translation < 1e-20 && r.inversion < 1e-20, "{r:?}");
        }
        let r = verify_transformations(&UHPoint::from_f64(0.0, 1.0, 53).unwrap(), 53).unwrap();
        assert!(r.translation < 1e-12 && r.inversion < 1e-12);
    }

    #[test]
    fn eta_identity() {
        for (re, im) in [(0.1, 0.4), (0.37, 1.3), (-0.8, 0.1)] {
            assert!(eta_identity_residual(&pt(re, im), 128).unwrap() < 1e-30);
        }
    }

    #[test]
    fn radial_normalizations() {
        let x = RationalPoint::new(1, 3).unwrap();
        let r = radial_limit_check(1, &x, &[0.002, 0.001], 128).unwrap();
        assert!((r.lambda[0] + 1.0).abs() < 1e-3 && r.lambda[1].abs() < 1e-3, "{r:?}");
        let x = RationalPoint::new(1, 2).unwrap();
        let r = radial_limit_check(2, &x, &[0.002, 0.001], 128).unwrap();
        assert!((r.lambda[0] + 4.0).abs() < 1e-2 && r.lambda[1].abs() < 1e-2, "{r:?}");
        let r = radial_limit_check(3, &x, &[0.002, 0.001], 128).unwrap();
        assert!((r.lambda[0] + 4.0).abs() < 1e-2 && r.lambda[1].abs() < 1e-2, "{r:?}");
        assert!(matches!(
            radial_limit_check(1, &x, &[0.01], 128),
            Err(Error::UndefinedComponent { .. })
        ));
    }
}
