//! Period integrals of the theta components: `Omega(x)`, `f*(x)`, `g(x)`,
//! the table of `Omega(1/k)` against the strange values, and the six-row
//! check of the quantum modular transformation law.

use std::time::Instant;

use rug::float::Constant;
use rug::{Complex, Float};
use serde::Serialize;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::hpc::HpComplex;
use crate::modularforms::{theta, TransformMatrices, UHPoint};
use crate::quadrature::{integrate, AdaptiveConfig};
use crate::strange::{self, Component, RationalPoint};

/// Sheet of `w^{-3/2}` used in the period kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum KernelBranch {
    /// `exp(-3/2 log w)` with the principal logarithm.
    Principal,
    /// The negative of the principal value; on the vertical ray this is
    /// `1/sqrt((z-x)^3)` and reproduces the signs of the `Omega(1/k)` table.
    #[default]
    SecondSheet,
}

impl std::str::FromStr for KernelBranch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "principal" => Ok(KernelBranch::Principal),
            "second" | "second-sheet" | "secondsheet" => Ok(KernelBranch::SecondSheet),
            other => Err(Error::invalid(format!("unknown kernel branch {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Lower cutoff height above the real axis.
    pub eps: f64,
    /// Upper height of the contour.
    pub upper: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub precision: u32,
    pub branch: KernelBranch,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            eps: 1e-9,
            upper: 1e9,
            rel_tol: 1e-10,
            max_depth: 20,
            precision: 128,
            branch: KernelBranch::SecondSheet,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.upper && self.upper.is_finite()) {
            return Err(Error::invalid("quadrature needs 0 < eps < upper"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol must be positive"));
        }
        if self.precision < 24 {
            return Err(Error::invalid("precision must be at least 24 bits"));
        }
        Ok(())
    }

    fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            rel_tol: self.rel_tol,
            max_depth: self.max_depth,
            precision: self.precision,
        }
    }

    fn sign(&self) -> i32 {
        match self.branch {
            KernelBranch::Principal => 1,
            KernelBranch::SecondSheet => -1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodIntegralResult {
    pub value: HpComplex,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

/// Where `f*` is evaluated.
#[derive(Clone, Debug)]
pub enum FStarPoint {
    Rational(RationalPoint),
    /// A point of the lower half-plane.
    Lower(HpComplex),
}

/// Contour from `0` to `i infinity` for `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    /// `z = i s`.
    Vertical,
    /// `z = s e^{i angle}` with `0 < angle < pi`.
    Ray { angle: f64 },
}

/// `-i / (pi (1 + i))`.
pub fn prefactor(prec: u32) -> Complex {
    let pi = Float::with_val(prec, Constant::Pi);
    let den = Complex::with_val(prec, (&pi, &pi));
    Complex::with_val(prec, (0, -1)) / den
}

fn theta_c(i: u8, z: Complex, prec: u32) -> Result<Complex> {
    let p = UHPoint::new(HpComplex::from_complex(z))?;
    Ok(theta(i, &p, prec)?.into_complex())
}

/// `w^{-3/2}` on the configured sheet.
fn kernel(w: &Complex, cfg: &QuadratureConfig) -> Complex {
    let prec = w.prec().0;
    let l = Complex::with_val(prec, w.ln_ref());
    let v = (l * Float::with_val(prec, -1.5)).exp();
    if cfg.sign() < 0 {
        -v
    } else {
        v
    }
}

/// `i^{-3/2}` on the configured sheet.
fn kernel_i(cfg: &QuadratureConfig, prec: u32) -> Complex {
    let v = Cyclotomic::root_of_unity(8, -3).embed(prec).into_complex();
    if cfg.sign() < 0 {
        -v
    } else {
        v
    }
}

fn wrap(q: crate::quadrature::Quadrature, scale: Option<&Complex>) -> PeriodIntegralResult {
    let prec = q.value.prec().0;
    let (value, err) = match scale {
        Some(s) => {
            let m = Float::with_val(53, s.abs_ref()).to_f64();
            (Complex::with_val(prec, &q.value * s), q.error_estimate * m)
        }
        None => (q.value, q.error_estimate),
    };
    PeriodIntegralResult {
        value: HpComplex::from_complex(value),
        error_estimate: err,
        nodes_used: q.nodes_used,
    }
}

/// `int theta_i(z) (z - x)^{-3/2} dz` up the vertical ray from
/// `base + i eps` to `base + i upper`, where `z - x = i(s + d)` for `s` the
/// height above `base`. Substituting `s = e^u` gives the integrand
/// `theta_i(base + i e^u) i^{-3/2} (e^u + d)^{-3/2} i e^u`.
fn vertical_integral(
    i: u8,
    base: &Complex,
    d: &Float,
    cfg: &QuadratureConfig,
) -> Result<crate::quadrature::Quadrature> {
    cfg.validate()?;
    let prec = cfg.precision;
    let wp = prec + 16;
    let ki = kernel_i(cfg, wp).mul_i(false);
    let f = |u: &Float| -> Result<Complex> {
        let s = Float::with_val(wp, u.exp_ref());
        let mut z = Complex::with_val(wp, base);
        *z.mut_imag() += &s;
        let th = theta_c(i, z, wp)?;
        let h = Float::with_val(wp, &s + d);
        let root = Float::with_val(wp, h.sqrt_ref());
        let w = s / (h * root);
        Ok(Complex::with_val(prec, th * &ki * w))
    };
    integrate(f, cfg.eps.ln(), cfg.upper.ln(), &cfg.adaptive())
}

/// `Omega(x) = int_x^{i infinity} theta_1(z) (z - x)^{-3/2} dz` along the
/// vertical ray, cut to heights `[eps, upper]`.
pub fn omega(x: &RationalPoint, cfg: &QuadratureConfig) -> Result<PeriodIntegralResult> {
    let prec = cfg.precision + 16;
    let base = Complex::with_val(prec, &x.to_rational());
    let q = vertical_integral(1, &base, &Float::new(prec), cfg)?;
    Ok(wrap(q, None))
}

/// `f*_i(x) = -i/(pi(1+i)) int_{conj x}^{i infinity} theta_i(z)(z-x)^{-3/2} dz`.
pub fn f_star(i: u8, x: &FStarPoint, cfg: &QuadratureConfig) -> Result<PeriodIntegralResult> {
    let prec = cfg.precision + 16;
    let (base, d) = match x {
        FStarPoint::Rational(r) => (
            Complex::with_val(prec, &r.to_rational()),
            Float::new(prec),
        ),
        FStarPoint::Lower(z) => {
            if !z.im().is_sign_negative() || z.im().is_zero() {
                return Err(Error::invalid("f* needs x in the lower half-plane"));
            }
            let y = Float::with_val(prec, -z.im());
            let base = Complex::with_val(prec, (z.re(), &y));
            (base, y * 2u32)
        }
    };
    let q = vertical_integral(i, &base, &d, cfg)?;
    Ok(wrap(q, Some(&prefactor(prec))))
}

/// The height `e^{ln h}` at which the quadrature in `u = ln s` actually
/// stops, `ln h` being rounded to `f64`.
fn node(h: f64, wp: u32) -> Float {
    Float::with_val(wp, h.ln()).exp()
}

/// `g_i(x) = -i/(pi(1+i)) int_0^{i infinity} theta_i(z)(z-x)^{-3/2} dz`.
///
/// `theta_2(z) ~ (z/i)^{-1/2}/sqrt(2)` as `z -> 0`, so the piece between `0`
/// and the lowest node `Z` is added in closed form as
/// `K(Z - x) 2i (Z/i)^{1/2} / sqrt(2)`; `theta_1` and `theta_3` vanish to
/// infinite order there. `theta_1` tends to `1` at `i infinity` and its tail
/// above the top node is added in closed form as well.
pub fn g_period(
    i: u8,
    x: &RationalPoint,
    path: Path,
    cfg: &QuadratureConfig,
) -> Result<PeriodIntegralResult> {
    cfg.validate()?;
    if x.a() == 0 {
        return Err(Error::PathTooCloseToSingularity(x.to_string()));
    }
    let prec = cfg.precision;
    let wp = prec + 16;
    let xr = Complex::with_val(wp, &x.to_rational());
    let dir = match path {
        Path::Vertical => Complex::with_val(wp, (0, 1)),
        Path::Ray { angle } => {
            if !(angle > 0.0 && angle < std::f64::consts::PI) {
                return Err(Error::invalid("ray angle must lie in (0, pi)"));
            }
            let a = Float::with_val(wp, angle);
            let (s, c) = a.sin_cos(Float::new(wp));
            let dist = (x.to_f64() * angle.sin()).abs();
            if x.to_f64() * angle.cos() > 0.0 && dist < cfg.eps {
                return Err(Error::PathTooCloseToSingularity(x.to_string()));
            }
            Complex::with_val(wp, (c, s))
        }
    };
    let f = |u: &Float| -> Result<Complex> {
        let s = Float::with_val(wp, u.exp_ref());
        let z = Complex::with_val(wp, &dir * &s);
        let th = theta_c(i, z.clone(), wp)?;
        let w = Complex::with_val(wp, &z - &xr);
        Ok(Complex::with_val(prec, th * kernel(&w, cfg) * z))
    };
    let q = integrate(f, cfg.eps.ln(), cfg.upper.ln(), &cfg.adaptive())?;
    let mut value = Complex::with_val(wp, &q.value);
    let mut endpoint_error = 0.0;
    if i == 2 {
        let big_z = Complex::with_val(wp, &dir * &node(cfg.eps, wp));
        let w = Complex::with_val(wp, &big_z - &xr);
        let root = Complex::with_val(wp, big_z.mul_i_ref(true)).sqrt();
        let corr = kernel(&w, cfg) * root * Complex::with_val(wp, (0, 2));
        let sqrt2 = Float::with_val(wp, 2).sqrt();
        let corr = corr / sqrt2;
        // K varies by a relative 3|Z|/(2|Z - x|) over [0, Z].
        let w_abs = Float::with_val(53, w.abs_ref()).to_f64();
        endpoint_error = Float::with_val(53, corr.abs_ref()).to_f64() * 1.5 * cfg.eps / w_abs;
        value += corr;
    }
    if i == 1 {
        // theta_1 = 1 + O(q), so the tail past the top node Z is
        // int_Z^inf K(z - x) dz = 2 K(Z - x) (Z - x) up to O(e^{-2 pi Im Z}).
        let top = Complex::with_val(wp, &dir * &node(cfg.upper, wp));
        let w = Complex::with_val(wp, &top - &xr);
        value += kernel(&w, cfg) * w * 2u32;
    }
    let q = crate::quadrature::Quadrature {
        value,
        error_estimate: q.error_estimate + endpoint_error,
        nodes_used: q.nodes_used,
    };
    Ok(wrap(q, Some(&prefactor(wp))))
}

/// One row of the `Omega(1/k)` table.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub k: u64,
    pub exact: String,
    /// `pi i (1+i) theta_1^S(zeta_k)`.
    pub expected: [f64; 2],
    pub integral: [f64; 2],
    #[serde(rename = "absError")]
    pub abs_error: f64,
    #[serde(rename = "errorEstimate")]
    pub error_estimate: f64,
    #[serde(rename = "nodesUsed")]
    pub nodes_used: usize,
    pub seconds: f64,
}

/// `pi i (1 + i) v`.
pub fn table_scale(v: &Complex) -> Complex {
    let prec = v.prec().0;
    let pi = Float::with_val(prec, Constant::Pi);
    let c = Complex::with_val(prec, (-pi.clone(), pi));
    c * v
}

pub fn table_row(k: u64, cfg: &QuadratureConfig) -> Result<TableRow> {
    let start = Instant::now();
    let x = RationalPoint::new(1, k as i64)?;
    let exact = strange::strange_eval(Component::Theta1, &x)?.exact;
    let expected = table_scale(exact.embed(cfg.precision).as_complex());
    let om = omega(&x, cfg)?;
    let diff = Complex::with_val(cfg.precision, om.value.as_complex() - &expected);
    Ok(TableRow {
        k,
        exact: exact.to_string(),
        expected: pair(&expected),
        integral: om.value.to_f64_pair().into(),
        abs_error: Float::with_val(53, diff.abs_ref()).to_f64(),
        error_estimate: om.error_estimate,
        nodes_used: om.nodes_used,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn pair(c: &Complex) -> [f64; 2] {
    [c.real().to_f64(), c.imag().to_f64()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RowStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformRow {
    /// `"T"` or `"S"`.
    pub law: &'static str,
    pub row: u8,
    pub status: RowStatus,
    pub exact: bool,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub residual: Option<f64>,
    /// `lhs / rhs`, the normalization found for the row.
    pub lambda: Option<[f64; 2]>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumTransformReport {
    pub x: RationalPoint,
    pub tolerance: f64,
    pub rows: Vec<TransformRow>,
}

impl QuantumTransformReport {
    pub fn all_applicable_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status != RowStatus::Fail)
    }
}

/// Residual tolerance for the numerical rows.
pub const S_ROW_TOLERANCE: f64 = 1e-3;

fn skipped(law: &'static str, row: u8, reason: String) -> TransformRow {
    TransformRow {
        law,
        row,
        status: RowStatus::Skipped,
        exact: law == "T",
        lhs: None,
        rhs: None,
        residual: None,
        lambda: None,
        reason: Some(reason),
    }
}

fn translation_row(row: u8, x: &RationalPoint) -> TransformRow {
    let m = TransformMatrices::standard();
    let x1 = x.add_int(1);
    let (lhs_i, rhs_i) = match row {
        1 => (1u8, 1u8),
        2 => (2, 3),
        _ => (3, 2),
    };
    let lhs = match strange::phi(lhs_i, &x1) {
        Ok(v) => v,
        Err(e) => return skipped("T", row, e.to_string()),
    };
    let rhs = match strange::phi(rhs_i, x) {
        Ok(v) => &m.m_t[row as usize - 1][rhs_i as usize - 1] * &v,
        Err(e) => return skipped("T", row, e.to_string()),
    };
    let ok = lhs == rhs;
    TransformRow {
        law: "T",
        row,
        status: if ok { RowStatus::Pass } else { RowStatus::Fail },
        exact: true,
        lhs: Some(lhs.to_string()),
        rhs: Some(rhs.minimal().to_string()),
        residual: Some(if ok { 0.0 } else { f64::NAN }),
        lambda: None,
        reason: None,
    }
}

/// Row `r` of `(x/-i)^{-3/2} phi(-1/x) + M_S phi(x) = M_S g(x)`.
fn s_row(row: u8, x: &RationalPoint, cfg: &QuadratureConfig) -> TransformRow {
    if row == 3 {
        return skipped(
            "S",
            3,
            "phi_3 needs even denominators at both x and -1/x, impossible for a reduced fraction"
                .into(),
        );
    }
    // Row 1 couples phi_1(-1/x), phi_2(x), g_2; row 2 couples phi_2(-1/x), phi_1(x), g_1.
    let (outer, inner) = if row == 1 { (1u8, 2u8) } else { (2, 1) };
    let xs = match x.neg_recip() {
        Ok(v) => v,
        Err(e) => return skipped("S", row, e.to_string()),
    };
    let a = match strange::phi(outer, &xs) {
        Ok(v) => v,
        Err(e) => return skipped("S", row, e.to_string()),
    };
    let b = match strange::phi(inner, x) {
        Ok(v) => v,
        Err(e) => return skipped("S", row, e.to_string()),
    };
    let g = match g_period(inner, x, Path::Vertical, cfg) {
        Ok(v) => v,
        Err(e) => return skipped("S", row, e.to_string()),
    };
    let prec = cfg.precision;
    let m = TransformMatrices::standard();
    let coef = m.m_s[row as usize - 1][inner as usize - 1].embed(prec).into_complex();
    let xc = Complex::with_val(prec, &x.to_rational());
    // (x / -i)^{-3/2}, principal branch
    let w = Complex::with_val(prec, xc.mul_i_ref(false));
    let pre = (w.ln() * Float::with_val(prec, -1.5)).exp();
    let lhs = pre * a.embed(prec).as_complex() + Complex::with_val(prec, &coef * b.embed(prec).as_complex());
    let rhs = Complex::with_val(prec, &coef * g.value.as_complex());
    let residual = Float::with_val(53, Complex::with_val(prec, &lhs - &rhs).abs_ref()).to_f64();
    let lambda = Complex::with_val(prec, &lhs / &rhs);
    TransformRow {
        law: "S",
        row,
        status: if residual < S_ROW_TOLERANCE {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        },
        exact: false,
        lhs: Some(HpComplex::from_complex(lhs).to_decimal(8)),
        rhs: Some(HpComplex::from_complex(rhs).to_decimal(8)),
        residual: Some(residual),
        lambda: Some(pair(&lambda)),
        reason: None,
    }
}

/// Checks all six scalar equations of the `T` and `S` laws at `x`.
pub fn verify_quantum_transform(
    x: &RationalPoint,
    cfg: &QuadratureConfig,
) -> QuantumTransformReport {
    let mut rows: Vec<TransformRow> = (1..=3).map(|r| translation_row(r, x)).collect();
    rows.extend((1..=3).map(|r| s_row(r, x, cfg)));
    QuantumTransformReport {
        x: *x,
        tolerance: S_ROW_TOLERANCE,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: i64, k: i64) -> RationalPoint {
        RationalPoint::new(a, k).unwrap()
    }

    fn close(v: &HpComplex, re: f64, im: f64, tol: f64) -> bool {
        (v.re_f64() - re).abs() < tol && (v.im_f64() - im).abs() < tol
    }

    #[test]
    fn omega_table_row_three() {
        let r = omega(&x(1, 3), &QuadratureConfig::default()).unwrap();
        assert!(close(&r.value, -7.1249, 18.0077, 1e-3), "{}", r.value);
    }

    #[test]
    fn principal_branch_flips_sign() {
        let cfg = QuadratureConfig {
            branch: KernelBranch::Principal,
            ..Default::default()
        };
        let r = omega(&x(1, 3), &cfg).unwrap();
        assert!(close(&r.value, 7.1249, -18.0077, 1e-3), "{}", r.value);
    }

    #[test]
    fn f_star_matches_strange_value() {
        let cfg = QuadratureConfig::default();
        let v = f_star(1, &FStarPoint::Rational(x(1, 3)), &cfg).unwrap();
        assert!(close(&v.value, 4.0, -1.7320508, 1e-4), "{}", v.value);
        let w = f_star(1, &FStarPoint::Rational(x(-1, 3)), &cfg).unwrap();
        assert!(close(&w.value, 4.0, 1.7320508, 1e-4), "{}", w.value);
    }

    #[test]
    fn f_star_lower_half_plane_tends_to_rational_value() {
        let cfg = QuadratureConfig::default();
        let z = HpComplex::from_f64(1.0 / 3.0, -1e-7, 128);
        let v = f_star(1, &FStarPoint::Lower(z), &cfg).unwrap();
        assert!(close(&v.value, 4.0, -1.7320508, 1e-3), "{}", v.value);
    }

    #[test]
    fn quantum_transform_at_one_third() {
        let rep = verify_quantum_transform(&x(1, 3), &QuadratureConfig::default());
        let status: Vec<_> = rep.rows.iter().map(|r| r.status).collect();
        use RowStatus::*;
        assert_eq!(status, vec![Pass, Skipped, Skipped, Pass, Pass, Skipped], "{rep:#?}");
    }

    #[test]
    fn translation_rows_at_one_half() {
        let rep = verify_quantum_transform(&x(1, 2), &QuadratureConfig::default());
        assert_eq!(rep.rows[0].status, RowStatus::Skipped);
        assert_eq!(rep.rows[1].status, RowStatus::Pass);
        assert_eq!(rep.rows[2].status, RowStatus::Pass);
    }

    #[test]
    fn g_rejects_zero() {
        assert!(matches!(
            g_period(1, &x(0, 1), Path::Vertical, &QuadratureConfig::default()),
            Err(Error::PathTooCloseToSingularity(_))
        ));
    }
}
