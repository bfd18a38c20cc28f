//! High-precision complex numbers.
//!
//! `HpComplex` wraps an MPC value together with its working precision.
//! Binary operations run at the smaller of the two operand precisions.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    value: Complex,
}

impl HpComplex {
    pub fn zero(prec: u32) -> Self {
        HpComplex {
            value: Complex::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        HpComplex {
            value: Complex::with_val(prec, (re, im)),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let prec = re.prec().min(im.prec());
        HpComplex {
            value: Complex::with_val(prec, (re, im)),
        }
    }

    pub fn from_complex(value: Complex) -> Self {
        let (pr, pi) = value.prec();
        if pr == pi {
            HpComplex { value }
        } else {
            HpComplex {
                value: Complex::with_val(pr.min(pi), value),
            }
        }
    }

    /// Parses `a+bi`, `a-bi`, `bi` or `a`.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return None;
        }
        if let Some(body) = t.strip_suffix('i') {
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(i, c)| {
                    (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
                })
                .map(|(i, _)| i)
                .last();
            let (re, im) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => "1",
                "-" => "-1",
                other => other,
            };
            let re = Float::parse(re).ok()?;
            let im = Float::parse(im).ok()?;
            Some(HpComplex::from_parts(
                Float::with_val(prec, re),
                Float::with_val(prec, im),
            ))
        } else {
            let re = Float::parse(&t).ok()?;
            Some(HpComplex::from_parts(
                Float::with_val(prec, re),
                Float::new(prec),
            ))
        }
    }

    pub fn precision(&self) -> u32 {
        self.value.prec().0
    }

    pub fn as_complex(&self) -> &Complex {
        &self.value
    }

    pub fn into_complex(self) -> Complex {
        self.value
    }

    pub fn re(&self) -> &Float {
        self.value.real()
    }

    pub fn im(&self) -> &Float {
        self.value.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.value.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.value.imag().to_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re_f64(), self.im_f64())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.precision(), self.value.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        HpComplex {
            value: Complex::with_val(prec, &self.value),
        }
    }

    pub fn conj(&self) -> Self {
        HpComplex {
            value: self.value.clone().conj(),
        }
    }

    pub fn exp(&self) -> Self {
        HpComplex {
            value: self.value.clone().exp(),
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        HpComplex {
            value: self.value.clone().ln(),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        HpComplex {
            value: self.value.clone().sqrt(),
        }
    }

    /// Principal power `self^e`, argument taken in (-pi, pi].
    pub fn pow_f64(&self, e: f64) -> Self {
        let prec = self.precision();
        let e = Float::with_val(prec, e);
        HpComplex {
            value: self.value.clone().pow(&e),
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        HpComplex {
            value: self.value.clone() * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.real().is_zero() && self.value.imag().is_zero()
    }

    /// `e^{2 pi i r}` for a rational r.
    pub fn expi_2pi(r: &rug::Rational, prec: u32) -> Self {
        let mut theta = Float::with_val(prec + 8, Constant::Pi);
        theta *= 2u32;
        theta *= Float::with_val(prec + 8, r);
        let (s, c) = theta.sin_cos(Float::new(prec + 8));
        HpComplex {
            value: Complex::with_val(prec, (c, s)),
        }
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    /// Fixed-point rendering such as `4.0000 - 1.7321i`.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = self.value.real().to_f64();
        let im = self.value.imag().to_f64();
        if digits > 15 {
            return self.to_decimal_exact(digits);
        }
        let re = if re == 0.0 { 0.0 } else { re };
        let sign = if im.is_sign_negative() && im != 0.0 {
            '-'
        } else {
            '+'
        };
        format!("{:.*} {} {:.*}i", digits, re, sign, digits, im.abs())
    }

    fn to_decimal_exact(&self, digits: usize) -> String {
        let re = self.value.real().to_string_radix(10, Some(digits + 2));
        let im = self.value.imag();
        let sign = if im.is_sign_negative() && !im.is_zero() {
            '-'
        } else {
            '+'
        };
        let im_abs = Float::with_val(im.prec(), im.abs_ref());
        format!(
            "{} {} {}i",
            re,
            sign,
            im_abs.to_string_radix(10, Some(digits + 2))
        )
    }

    pub fn assign(&mut self, other: &HpComplex) {
        self.value.assign(&other.value);
    }
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(4);
        f.write_str(&self.to_decimal(digits))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&HpComplex> for &HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: &HpComplex) -> HpComplex {
                let prec = self.precision().min(rhs.precision());
                HpComplex {
                    value: Complex::with_val(prec, $tr::$m(&self.value, &rhs.value)),
                }
            }
        }
        impl $tr<HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: HpComplex) -> HpComplex {
                $tr::$m(&self, &rhs)
            }
        }
        impl $tr<&HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: &HpComplex) -> HpComplex {
                $tr::$m(&self, rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex { value: -self.value }
    }
}

impl Neg for &HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex {
            value: -self.value.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_minimum_of_operands() {
        let a = HpComplex::from_f64(1.0, 2.0, 200);
        let b = HpComplex::from_f64(3.0, -1.0, 80);
        assert_eq!((&a * &b).precision(), 80);
        assert_eq!((&a + &b).precision(), 80);
    }

    #[test]
    fn parse_forms() {
        let z = HpComplex::parse("0.3+0.7i", 64).unwrap();
        assert!((z.re_f64() - 0.3).abs() < 1e-15 && (z.im_f64() - 0.7).abs() < 1e-15);
        let z = HpComplex::parse("-2i", 64).unwrap();
        assert_eq!(z.to_f64_pair(), (0.0, -2.0));
        let z = HpComplex::parse("1e-3-1e-2i", 64).unwrap();
        assert_eq!(z.to_f64_pair(), (1e-3, -1e-2));
        assert!(HpComplex::parse("x", 64).is_none());
    }

    #[test]
    fn decimal_rendering() {
        let z = HpComplex::from_f64(4.0, -1.7320508, 64);
        assert_eq!(z.to_decimal(4), "4.0000 - 1.7321i");
    }
}
