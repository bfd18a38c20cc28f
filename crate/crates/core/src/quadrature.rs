//! Adaptive Gauss-Legendre quadrature for complex integrands at
//! arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Number of Gauss-Legendre nodes per panel.
pub const ORDER: usize = 16;

/// Legendre nodes and weights on `[-1, 1]` at precision `prec`.
pub fn gauss_legendre(prec: u32) -> Arc<Vec<(Float, Float)>> {
    type Rule = Arc<Vec<(Float, Float)>>;
    static CACHE: OnceLock<Mutex<HashMap<u32, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = Arc::new(compute_nodes(ORDER, prec));
    cache.lock().unwrap().insert(prec, v.clone());
    v
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let wp = x.prec();
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as u32;
        let t = Float::with_val(wp, x * &p1) * (2 * k - 1);
        let p2 = (t - Float::with_val(wp, &p0 * (k - 1))) / k;
        p0 = p1;
        p1 = p2;
    }
    let x2 = Float::with_val(wp, x.square_ref());
    let num = Float::with_val(wp, x * &p1) - &p0;
    let dp = num * n as u32 / (x2 - 1u32);
    (p1, dp)
}

fn compute_nodes(n: usize, prec: u32) -> Vec<(Float, Float)> {
    let wp = prec + 32;
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) + 4));
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(wp, guess);
        for _ in 0..100 {
            let (p, dp) = legendre(n, &x);
            let dx = p / &dp;
            x -= &dx;
            if dx.abs() < eps {
                break;
            }
        }
        let (_, dp) = legendre(n, &x);
        let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref());
        let w = Float::with_val(wp, 2) / (one_minus * Float::with_val(wp, dp.square_ref()));
        out.push((Float::with_val(prec, x), Float::with_val(prec, w)));
    }
    out
}

/// Adaptive quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub max_depth: u32,
    pub precision: u32,
}

/// An integral value with its error estimate and node count.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: Complex,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

struct Panel {
    a: Float,
    b: Float,
    value: Complex,
    max_abs: f64,
}

fn rule<F>(f: &F, a: &Float, b: &Float, prec: u32) -> Result<Panel>
where
    F: Fn(&Float) -> Result<Complex> + Sync,
{
    let nodes = gauss_legendre(prec);
    let wp = prec + 8;
    let half = Float::with_val(wp, b - a) / 2u32;
    let mid = Float::with_val(wp, a + b) / 2u32;
    let mut acc = Complex::new(wp);
    let mut max_abs = 0f64;
    for (x, w) in nodes.iter() {
        let u = Float::with_val(wp, &half * x) + &mid;
        let v = f(&u)?;
        max_abs = max_abs.max(Float::with_val(53, v.abs_ref()).to_f64());
        acc += Complex::with_val(wp, &v * w);
    }
    acc *= &half;
    Ok(Panel {
        a: a.clone(),
        b: b.clone(),
        value: acc,
        max_abs,
    })
}

fn abs_f64(c: &Complex) -> f64 {
    Float::with_val(53, c.abs_ref()).to_f64()
}

/// Refines one panel until the two-halves estimate agrees with the whole
/// within `tol`.
fn refine<F>(f: &F, p: Panel, tol: f64, depth: u32, cfg: &AdaptiveConfig) -> Result<Quadrature>
where
    F: Fn(&Float) -> Result<Complex> + Sync,
{
    let prec = cfg.precision;
    let mid = Float::with_val(p.a.prec(), &p.a + &p.b) / 2u32;
    let left = rule(f, &p.a, &mid, prec)?;
    let right = rule(f, &mid, &p.b, prec)?;
    let sum = Complex::with_val(prec + 8, &left.value + &right.value);
    let diff = abs_f64(&Complex::with_val(prec + 8, &sum - &p.value));
    if diff <= tol {
        return Ok(Quadrature {
            value: sum,
            error_estimate: diff,
            nodes_used: 2 * ORDER,
        });
    }
    if depth >= cfg.max_depth {
        return Err(Error::ToleranceNotMet {
            achieved: diff,
            requested: tol,
            depth,
        });
    }
    let (l, r) = rayon::join(
        || refine(f, left, tol / 2.0, depth + 1, cfg),
        || refine(f, right, tol / 2.0, depth + 1, cfg),
    );
    let (l, r) = (l?, r?);
    Ok(Quadrature {
        value: Complex::with_val(prec + 8, &l.value + &r.value),
        error_estimate: l.error_estimate + r.error_estimate,
        nodes_used: 2 * ORDER + l.nodes_used + r.nodes_used,
    })
}

/// Integrates `f` over `[a, b]` split into unit panels.
///
/// Panels whose magnitude bound `|b - a| max|f|` is below
/// `rel_tol |total| / panels` after the coarse pass are kept unrefined; the
/// rest are bisected until successive estimates agree. Results are summed
/// in panel order at extra precision so they do not depend on scheduling.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<Quadrature>
where
    F: Fn(&Float) -> Result<Complex> + Sync,
{
    if !(a < b) || !cfg.rel_tol.is_finite() || cfg.rel_tol <= 0.0 {
        return Err(Error::invalid("quadrature needs a < b and rel_tol > 0"));
    }
    let prec = cfg.precision;
    let npanels = (b - a).ceil().max(1.0) as usize;
    let width = (b - a) / npanels as f64;
    let edges: Vec<Float> = (0..=npanels)
        .map(|j| {
            if j == npanels {
                Float::with_val(prec, b)
            } else {
                Float::with_val(prec, a + width * j as f64)
            }
        })
        .collect();
    let coarse: Vec<Panel> = (0..npanels)
        .into_par_iter()
        .map(|j| rule(&f, &edges[j], &edges[j + 1], prec))
        .collect::<Result<_>>()?;
    let mut total = Complex::new(prec + 32);
    for p in &coarse {
        total += &p.value;
    }
    let scale = abs_f64(&total).max(f64::MIN_POSITIVE);
    let threshold = cfg.rel_tol * scale / npanels as f64;
    let (small, large): (Vec<_>, Vec<_>) = coarse
        .into_iter()
        .partition(|p| p.max_abs * width < threshold);
    let tol = if large.is_empty() {
        threshold
    } else {
        cfg.rel_tol * scale / large.len() as f64
    };
    let refined: Vec<Quadrature> = large
        .into_par_iter()
        .map(|p| refine(&f, p, tol, 1, cfg))
        .collect::<Result<_>>()?;
    let mut value = Complex::new(prec + 32);
    let mut error = 0.0;
    let mut nodes = npanels * ORDER;
    for p in &small {
        value += &p.value;
        error += p.max_abs * width;
    }
    for q in &refined {
        value += &q.value;
        error += q.error_estimate;
        nodes += q.nodes_used;
    }
    Ok(Quadrature {
        value: Complex::with_val(prec, value),
        error_estimate: error,
        nodes_used: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let nodes = gauss_legendre(128);
        let mut s = Float::with_val(128, 0);
        let mut m = Float::with_val(128, 0);
        for (x, w) in nodes.iter() {
            s += w;
            m += Float::with_val(128, rug::ops::Pow::pow(x, 30u32)) * w;
        }
        assert!((s - 2u32).abs() < 1e-35);
        assert!((m - Float::with_val(128, 2) / 31u32).abs() < 1e-35);
    }

    #[test]
    fn integrates_gaussian_tail() {
        let cfg = AdaptiveConfig {
            rel_tol: 1e-25,
            max_depth: 30,
            precision: 128,
        };
        let q = integrate(
            |u: &Float| {
                let v = Float::with_val(128, u.square_ref());
                Ok(Complex::with_val(128, (-v).exp()))
            },
            -12.0,
            12.0,
            &cfg,
        )
        .unwrap();
        let sqrt_pi = Float::with_val(128, Constant::Pi).sqrt();
        let err = Float::with_val(64, q.value.real() - &sqrt_pi).abs().to_f64();
        assert!(err < 1e-24, "{err}");
    }

    #[test]
    fn depth_exhaustion_reports() {
        let cfg = AdaptiveConfig {
            rel_tol: 1e-30,
            max_depth: 2,
            precision: 64,
        };
        let r = integrate(
            |u: &Float| Ok(Complex::with_val(64, Float::with_val(64, u * 40u32).sin())),
            0.0,
            3.0,
            &cfg,
        );
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }
}
