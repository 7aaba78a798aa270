//! Numeric period checks: elliptic periods and quasi-periods, single-valued
//! period matrices, modular transformation laws, simplex quadrature of
//! Feynman integrands and regularized Eichler integrals.
//!
//! Everything complex is `rug::Complex`; the working precision is always an
//! explicit argument.

mod eichler;
mod elliptic;
mod modular;
mod quadrature;
mod weierstrass;

pub use eichler::{eichler_integral, EichlerValue, QExpansion};
pub use elliptic::{complete_elliptic, cubic_roots, elliptic_periods, real_cycle_quadrature, EllipticData};
pub use modular::{
    bloch_wigner, dilog_period_matrix, eisenstein_g2, eisenstein_g2_star, incomplete_period_matrix, lattice_eta,
    li1, li2, log_period_matrix, sigma1, sv_elliptic_matrix, sv_from_period_matrix, sv_incomplete_pair,
    sv_incomplete_pair_displayed, weierstrass_zeta, weight_factor, Sl2z,
};
pub use quadrature::{simplex_quadrature, QuadratureResult};
pub use weierstrass::{to_weierstrass, WeierstrassModel};

use rug::float::Constant;
use rug::{Complex, Float};
use serde_json::{json, Value};
use thiserror::Error;

use crate::motive_sunrise::SunriseError;
use crate::Rat;

pub const DEFAULT_PREC: u32 = 128;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("singular curve: {0}")]
    Singular(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Sunrise(#[from] SunriseError),
    #[error(transparent)]
    Integrand(#[from] crate::integrand::IntegrandError),
}

pub type Result<T> = std::result::Result<T, PeriodError>;

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2 pi i`.
pub fn two_pi_i(prec: u32) -> Complex {
    Complex::with_val(prec, (0, pi(prec) * 2u32))
}

pub fn cx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn rat_to_float(r: &Rat, prec: u32) -> Float {
    let n = Float::with_val(prec, Float::parse(r.numer().to_string()).expect("integer literal"));
    let d = Float::with_val(prec, Float::parse(r.denom().to_string()).expect("integer literal"));
    n / d
}

pub fn rat_to_complex(r: &Rat, prec: u32) -> Complex {
    Complex::with_val(prec, rat_to_float(r, prec))
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn abs_f64(z: &Complex) -> f64 {
    abs(z).to_f64()
}

/// `2^-bits` at precision `prec`.
pub fn eps(prec: u32, bits: u32) -> Float {
    Float::with_val(prec, 1) >> bits
}

fn digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).floor() as usize
}

pub fn float_string(x: &Float) -> String {
    x.to_string_radix(10, Some(digits(x.prec())))
}

/// `{"re": "...", "im": "..."}` with decimal strings.
pub fn complex_json(z: &Complex) -> Value {
    json!({"re": float_string(z.real()), "im": float_string(z.imag())})
}

pub fn complex_from_json(v: &Value, prec: u32) -> Option<Complex> {
    let part = |k: &str| -> Option<Float> {
        let s = v.get(k)?.as_str()?;
        Some(Float::with_val(prec, Float::parse(s).ok()?))
    };
    Some(Complex::with_val(prec, (part("re")?, part("im")?)))
}

/// Parse `a+bi`, `a-bi`, `bi`, `a`, `i`.
pub fn parse_complex(s: &str, prec: u32) -> Option<Complex> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let real = |t: &str| -> Option<Float> { Some(Float::with_val(prec, Float::parse(t).ok()?)) };
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        let (re, im) = match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            t => t,
        };
        Some(Complex::with_val(prec, (real(re)?, real(im)?)))
    } else {
        Some(Complex::with_val(prec, real(&s)?))
    }
}

pub fn matrix_json(m: &[Vec<Complex>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(complex_json).collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p = 64;
        assert_eq!(parse_complex("0.5+1i", p).unwrap(), cx(p, 0.5, 1.0));
        assert_eq!(parse_complex("i", p).unwrap(), cx(p, 0.0, 1.0));
        assert_eq!(parse_complex("-2i", p).unwrap(), cx(p, 0.0, -2.0));
        assert_eq!(parse_complex("3", p).unwrap(), cx(p, 3.0, 0.0));
        let z = parse_complex("1e-2-1e+1i", p).unwrap();
        assert!(abs(&(z - cx(p, 0.01, -10.0))).to_f64() < 1e-15);
        assert!(parse_complex("x+i", p).is_none());
    }

    #[test]
    fn json_roundtrip() {
        let z = Complex::with_val(128, (pi(128), -pi(128) / 3u32));
        let back = complex_from_json(&complex_json(&z), 128).unwrap();
        assert!(abs(&(back - &z)).to_f64() < 1e-35);
    }
}
