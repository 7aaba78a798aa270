//! Eichler integrals `int_tau^{i oo} f(z) (z - tau)^j dz` of truncated
//! `q`-expansions.
//!
//! Terms with `n >= 1` integrate in closed form along the vertical path:
//! `int_tau^{i oo} q_z^n (z - tau)^j dz = q^n i^(j+1) j! / (2 pi n)^(j+1)`.
//! The constant term is regularized at the cusp by dropping the divergent
//! polynomial in the upper endpoint (tangential base point at `i oo`):
//! `int_tau^{i Y} (z - tau)^j dz = (iY - tau)^(j+1)/(j+1)` keeps
//! `(-tau)^(j+1)/(j+1)`.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use super::{abs, complex_from_json, complex_json, float_string, pi, two_pi_i, PeriodError, Result};

#[derive(Clone, Debug)]
pub struct QExpansion {
    /// `c_0 .. c_N`.
    pub coeffs: Vec<Complex>,
    pub weight: i32,
}

impl QExpansion {
    pub fn new(coeffs: Vec<Complex>, weight: i32) -> Self {
        QExpansion { coeffs, weight }
    }

    pub fn from_integers(c: &[i64], weight: i32, prec: u32) -> Self {
        QExpansion { coeffs: c.iter().map(|&x| Complex::with_val(prec, x)).collect(), weight }
    }

    /// `Delta = q prod (1 - q^n)^24` through `q^n`.
    pub fn ramanujan_delta(n: usize, prec: u32) -> Self {
        let mut p = vec![0i128; n + 1];
        p[0] = 1;
        for k in 1..=n {
            for _ in 0..24 {
                for i in (k..=n).rev() {
                    p[i] -= p[i - k];
                }
            }
        }
        let mut c = vec![Complex::with_val(prec, 0)];
        c.extend(p[..n].iter().map(|&x| Complex::with_val(prec, Float::with_val(prec, Float::parse(x.to_string()).expect("integer")))));
        QExpansion { coeffs: c, weight: 12 }
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn truncate(&self, n: usize) -> Self {
        QExpansion { coeffs: self.coeffs.iter().take(n + 1).cloned().collect(), weight: self.weight }
    }

    pub fn is_cusp_form(&self) -> bool {
        self.coeffs.first().is_none_or(Complex::is_zero)
    }

    pub fn add(&self, other: &QExpansion) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let prec = self.coeffs.first().or(other.coeffs.first()).map_or(64, |c| c.prec().0);
        let get = |v: &[Complex], i: usize| v.get(i).cloned().unwrap_or_else(|| Complex::with_val(prec, 0));
        QExpansion { coeffs: (0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect(), weight: self.weight }
    }

    pub fn scale(&self, c: &Complex) -> Self {
        QExpansion { coeffs: self.coeffs.iter().map(|x| Complex::with_val(x.prec().0, x * c)).collect(), weight: self.weight }
    }

    pub fn eval(&self, tau: &Complex, prec: u32) -> Complex {
        let q = Complex::with_val(prec, tau * two_pi_i(prec)).exp();
        self.coeffs.iter().rev().fold(Complex::with_val(prec, 0), |acc, c| acc * &q + c)
    }

    /// `max |c_n| |q|^(N+1) / (1 - |q|)`, the size of the omitted tail if the
    /// coefficients stay bounded by those present.
    pub fn tail_bound(&self, tau: &Complex, prec: u32) -> Float {
        let q = abs(&Complex::with_val(prec, tau * two_pi_i(prec)).exp());
        let cmax = self.coeffs.iter().map(abs).fold(Float::with_val(prec, 0), |m, x| m.max(&x));
        let qn = Float::with_val(prec, Pow::pow(&q, (self.order() + 1) as u32));
        cmax * qn / (Float::with_val(prec, 1) - q)
    }

    pub fn to_json(&self) -> Value {
        json!({"weight": self.weight, "coeffs": self.coeffs.iter().map(complex_json).collect::<Vec<_>>()})
    }

    /// Coefficients may be `{"re","im"}` objects, numbers or numeric strings.
    pub fn from_json(v: &Value, prec: u32) -> Result<Self> {
        let bad = |m: &str| PeriodError::Invalid(format!("q-expansion: {m}"));
        let weight = v["weight"].as_i64().ok_or_else(|| bad("weight"))? as i32;
        let arr = v["coeffs"].as_array().ok_or_else(|| bad("coeffs"))?;
        let coeffs = arr
            .iter()
            .map(|c| match c {
                Value::Object(_) => complex_from_json(c, prec),
                Value::Number(n) => n.as_f64().map(|x| Complex::with_val(prec, x)),
                Value::String(s) => super::parse_complex(s, prec),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("coefficient"))?;
        Ok(QExpansion { coeffs, weight })
    }
}

#[derive(Clone, Debug)]
pub struct EichlerValue {
    pub value: Complex,
    /// Truncation estimate from [`QExpansion::tail_bound`].
    pub error: Float,
}

impl EichlerValue {
    pub fn to_json(&self) -> Value {
        json!({"value": complex_json(&self.value), "error_estimate": float_string(&self.error)})
    }
}

/// `int_tau^{i oo} f(z) (z - tau)^j dz` for `0 <= j <= w - 2`.
pub fn eichler_integral(f: &QExpansion, tau: &Complex, j: u32, prec: u32) -> Result<EichlerValue> {
    if *tau.imag() <= 0 {
        return Err(PeriodError::Invalid("Im tau must be positive".into()));
    }
    if f.weight < 2 || j as i32 > f.weight - 2 {
        return Err(PeriodError::Invalid(format!("power {j} outside 0..=w-2 for weight {}", f.weight)));
    }
    let wp = prec + 32;
    let tau = Complex::with_val(wp, tau);
    let mut out = Complex::with_val(wp, 0);
    if let Some(c0) = f.coeffs.first() {
        let t = Complex::with_val(wp, -&tau);
        out += Complex::with_val(wp, Pow::pow(&t, j + 1)) * c0 / (j + 1);
    }
    let q = Complex::with_val(wp, &tau * two_pi_i(wp)).exp();
    let fact = (1..=j).fold(Float::with_val(wp, 1), |acc, k| acc * k);
    let ij = Complex::with_val(wp, (0, 1)).pow(j + 1);
    let pre = Complex::with_val(wp, &ij * &fact) / Float::with_val(wp, pi(wp) * 2u32).pow(j + 1);
    let mut qn = Complex::with_val(wp, 1);
    let mut sum = Complex::with_val(wp, 0);
    for (n, c) in f.coeffs.iter().enumerate().skip(1) {
        qn *= &q;
        if c.is_zero() {
            continue;
        }
        let nn = Float::with_val(wp, n as u64).pow(j + 1);
        sum += Complex::with_val(wp, &qn * c) / nn;
    }
    out += sum * pre;
    let error = f.tail_bound(&tau, wp) * fact / Float::with_val(wp, pi(wp) * 2u32).pow(j + 1);
    Ok(EichlerValue { value: Complex::with_val(prec, out), error: Float::with_val(prec, error) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::cx;

    #[test]
    fn delta_coefficients() {
        let d = QExpansion::ramanujan_delta(6, 64);
        let c: Vec<i64> = d.coeffs.iter().map(|x| x.real().to_f64() as i64).collect();
        assert_eq!(c, vec![0, 1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn zero_form_and_constant_term() {
        let tau = cx(128, 0.25, 1.5);
        let z = eichler_integral(&QExpansion::from_integers(&[0, 0, 0], 4, 128), &tau, 1, 128).unwrap();
        assert!(z.value.is_zero());
        let c = QExpansion::from_integers(&[3], 4, 128);
        let v = eichler_integral(&c, &tau, 0, 128).unwrap().value;
        assert!(abs(&(v + Complex::with_val(128, &tau * 3u32))).to_f64() < 1e-35);
        assert!(eichler_integral(&c, &tau, 3, 128).is_err());
    }
}
