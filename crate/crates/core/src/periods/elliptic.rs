//! Periods and quasi-periods of `y^2 = x^3 + a x + b`.
//!
//! The forms are `omega = dx/(2y)` and `eta = x dx/(2y)`; under
//! `x = wp(u), 2y = wp'(u)` they become `du` and `-d zeta(u)`, so the periods
//! span the lattice of `wp` with `g2 = -4a`, `g3 = -4b`, and the quasi-periods
//! are minus the jumps of `zeta`. The period matrix has rows = cycles and
//! columns = forms:
//!
//! ```text
//! P = [[w1, n1],
//!      [w2, n2]],   w1 n2 - n1 w2 = 2 pi i,   tau = w2 / w1,   lambda = w1 / (2 pi i)
//! ```

use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use super::modular::eisenstein_g2;
use super::{abs, complex_json, eps, float_string, pi, two_pi_i, PeriodError, Result};

#[derive(Clone, Debug)]
pub struct EllipticData {
    pub a: Complex,
    pub b: Complex,
    pub roots: [Complex; 3],
    pub omega1: Complex,
    pub omega2: Complex,
    pub eta1: Complex,
    pub eta2: Complex,
    pub tau: Complex,
    pub lambda: Complex,
    pub prec: u32,
}

impl EllipticData {
    /// `|w1 n2 - n1 w2 - 2 pi i|`.
    pub fn legendre_residual(&self) -> Float {
        let l = Complex::with_val(self.prec, &self.omega1 * &self.eta2) - Complex::with_val(self.prec, &self.eta1 * &self.omega2);
        abs(&(l - two_pi_i(self.prec)))
    }

    /// `|G2(tau) + w1 n1 / (2 (2 pi i)^2)|`.
    pub fn fricke_residual(&self) -> Result<Float> {
        let g2 = eisenstein_g2(&self.tau, self.prec)?;
        let l2 = two_pi_i(self.prec).square();
        let w = Complex::with_val(self.prec, &self.omega1 * &self.eta1) / (l2 * 2u32);
        Ok(abs(&(g2 + w)))
    }

    pub fn period_matrix(&self) -> Vec<Vec<Complex>> {
        vec![vec![self.omega1.clone(), self.eta1.clone()], vec![self.omega2.clone(), self.eta2.clone()]]
    }

    /// `4a^3 + 27b^2`.
    pub fn discriminant(&self) -> Complex {
        discriminant(&self.a, &self.b)
    }

    pub fn j_invariant(&self) -> Complex {
        let a3 = Complex::with_val(self.prec, Pow::pow(&self.a, 3u32)) * 4u32;
        Complex::with_val(self.prec, &a3 * 1728u32) / self.discriminant()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": complex_json(&self.a),
            "b": complex_json(&self.b),
            "omega1": complex_json(&self.omega1),
            "omega2": complex_json(&self.omega2),
            "eta1": complex_json(&self.eta1),
            "eta2": complex_json(&self.eta2),
            "tau": complex_json(&self.tau),
            "lambda": complex_json(&self.lambda),
            "j": complex_json(&self.j_invariant()),
            "legendre_residual": float_string(&self.legendre_residual()),
            "precision_bits": self.prec,
        })
    }
}

fn discriminant(a: &Complex, b: &Complex) -> Complex {
    let p = a.prec().0;
    Complex::with_val(p, Pow::pow(a, 3u32)) * 4u32 + Complex::with_val(p, b.square_ref()) * 27u32
}

/// Roots of `x^3 + a x + b` by Weierstrass-Durand-Kerner iteration.
pub fn cubic_roots(a: &Complex, b: &Complex, prec: u32) -> Result<[Complex; 3]> {
    let wp = prec + 64;
    let a = Complex::with_val(wp, a);
    let b = Complex::with_val(wp, b);
    let scale = Float::with_val(wp, 1) + abs(&a).max(&abs(&b));
    if abs(&discriminant(&a, &b)) <= eps(wp, prec) * scale.clone().pow(3u32) {
        return Err(PeriodError::Singular("4a^3 + 27b^2 = 0".into()));
    }
    let p = |x: &Complex| Complex::with_val(wp, Pow::pow(x, 3u32)) + Complex::with_val(wp, &a * x) + &b;
    let seed = Complex::with_val(wp, (0.4, 0.9));
    let mut z: Vec<Complex> = (0..3u32).map(|k| Complex::with_val(wp, Pow::pow(&seed, k)) * &scale).collect();
    let tol = eps(wp, wp - 16) * &scale;
    for _ in 0..2000 {
        let mut worst = Float::with_val(wp, 0);
        for i in 0..3 {
            let mut den = Complex::with_val(wp, 1);
            for j in 0..3 {
                if j != i {
                    den *= Complex::with_val(wp, &z[i] - &z[j]);
                }
            }
            let step = p(&z[i]) / den;
            worst.max_mut(&abs(&step));
            z[i] -= step;
        }
        if worst < tol {
            let r: Vec<Complex> = z.into_iter().map(|x| Complex::with_val(prec, x)).collect();
            return Ok([r[0].clone(), r[1].clone(), r[2].clone()]);
        }
    }
    Err(PeriodError::Precision("root iteration did not converge".into()))
}

/// Complete elliptic integrals `K(k), E(k)` for complex `k^2` by the
/// arithmetic-geometric mean, with the right choice of square root at each
/// step.
pub fn complete_elliptic(k2: &Complex, prec: u32) -> Result<(Complex, Complex)> {
    let wp = prec + 32;
    let mut a = Complex::with_val(wp, 1);
    let mut b = (Complex::with_val(wp, 1) - k2).sqrt();
    let mut sum = Complex::with_val(wp, k2) / 2u32;
    let mut weight = Float::with_val(wp, 1);
    let tol = eps(wp, wp - 8);
    for _ in 0..200 {
        let c = Complex::with_val(wp, &a - &b) / 2u32;
        let done = abs(&c) <= Float::with_val(wp, &tol * &abs(&a));
        sum += Complex::with_val(wp, c.square_ref()) * &weight;
        weight *= 2u32;
        let an = Complex::with_val(wp, &a + &b) / 2u32;
        let mut bn = Complex::with_val(wp, &a * &b).sqrt();
        if abs(&Complex::with_val(wp, &an - &bn)) > abs(&Complex::with_val(wp, &an + &bn)) {
            bn = -bn;
        }
        a = an;
        b = bn;
        if done {
            if abs(&a) < eps(wp, prec / 2) {
                return Err(PeriodError::Singular("modulus at a branch point".into()));
            }
            let k = Complex::with_val(prec, pi(wp) / (a * 2u32));
            let e = Complex::with_val(prec, &k * (Complex::with_val(wp, 1) - sum));
            return Ok((k, e));
        }
    }
    Err(PeriodError::Precision("AGM did not converge".into()))
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

struct Candidate {
    w1: Complex,
    n1: Complex,
    w2: Complex,
    n2: Complex,
    key: (f64, f64),
}

fn candidate(e: [&Complex; 3], prec: u32) -> Option<Candidate> {
    let wp = prec + 32;
    let d13 = Complex::with_val(wp, e[0] - e[2]);
    let k2 = Complex::with_val(wp, e[1] - e[2]) / &d13;
    let kp2 = Complex::with_val(wp, 1) - &k2;
    let real = k2.imag().clone().abs() <= eps(wp, prec / 2);
    if real && (*k2.real() <= 0 || *k2.real() >= 1) {
        return None;
    }
    let (k, ek) = complete_elliptic(&k2, wp).ok()?;
    let (kp, ekp) = complete_elliptic(&kp2, wp).ok()?;
    let s = d13.clone().sqrt();
    let mi2 = Complex::with_val(wp, (0, -2));
    let w1 = Complex::with_val(wp, &mi2 * &kp) / &s;
    let n1 = mi2 * (Complex::with_val(wp, e[2] * &kp) + Complex::with_val(wp, &d13 * &ekp)) / &s;
    let w2 = Complex::with_val(wp, &k * 2u32) / &s;
    let n2 = (Complex::with_val(wp, e[0] * &k) - Complex::with_val(wp, &d13 * &ek)) * 2u32 / &s;
    let realness = (abs(&w2.imag().clone().into()) / abs(&w2)).to_f64();
    let centre = abs(&(k2 - Complex::with_val(wp, (0.5, 0)))).to_f64();
    Some(Candidate { w1, n1, w2, n2, key: (if realness < 1e-20 { 0.0 } else { realness }, centre) })
}

/// Periods and quasi-periods by the AGM. Among the root orderings that give
/// a valid lattice basis, the one with the most nearly real `w2` is used.
pub fn elliptic_periods(a: &Complex, b: &Complex, prec: u32) -> Result<EllipticData> {
    let roots = cubic_roots(a, b, prec + 32)?;
    let mut cands: Vec<Candidate> =
        PERMS.iter().filter_map(|p| candidate([&roots[p[0]], &roots[p[1]], &roots[p[2]]], prec)).collect();
    cands.sort_by(|x, y| x.key.partial_cmp(&y.key).expect("finite keys"));
    let l = two_pi_i(prec + 32);
    let tol = eps(prec, prec - 24);
    for c in cands {
        let Candidate { mut w1, mut n1, w2, n2, .. } = c;
        let leg = Complex::with_val(prec + 32, &w1 * &n2) - Complex::with_val(prec + 32, &n1 * &w2);
        if abs(&Complex::with_val(prec + 32, &leg + &l)) < abs(&Complex::with_val(prec + 32, &leg - &l)) {
            w1 = -w1;
            n1 = -n1;
        }
        let leg = Complex::with_val(prec + 32, &w1 * &n2) - Complex::with_val(prec + 32, &n1 * &w2);
        if abs(&(leg - &l)) > tol {
            continue;
        }
        let tau = Complex::with_val(prec, &w2 / &w1);
        if *tau.imag() <= 0 {
            continue;
        }
        let lambda = Complex::with_val(prec, &w1 / &l);
        let r = |x: Complex| Complex::with_val(prec, x);
        return Ok(EllipticData {
            a: r(Complex::with_val(prec, a)),
            b: r(Complex::with_val(prec, b)),
            roots: roots.clone().map(r),
            omega1: r(w1),
            omega2: r(w2),
            eta1: r(n1),
            eta2: r(n2),
            tau,
            lambda,
            prec,
        });
    }
    Err(PeriodError::Precision("no root ordering passed the Legendre check".into()))
}

/// Independent double-exponential quadrature of `int dx/y` and `int x dx/y`
/// over `[e3, e2]` for a curve with three real roots `e1 > e2 > e3`; these are
/// `w2` and `n2` in double precision. `None` when the roots are not all real.
pub fn real_cycle_quadrature(ed: &EllipticData) -> Option<(f64, f64)> {
    let mut e: Vec<f64> = Vec::new();
    for r in &ed.roots {
        if r.imag().to_f64().abs() > 1e-12 * (1.0 + r.real().to_f64().abs()) {
            return None;
        }
        e.push(r.real().to_f64());
    }
    e.sort_by(|x, y| y.partial_cmp(x).expect("finite roots"));
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    // x = e3 + (e2 - e3) sin^2 t turns dx/y into 2 dt / sqrt(e1 - x)
    let x = |t: f64| e3 + (e2 - e3) * t.sin().powi(2);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let w = quadrature::double_exponential::integrate(|t| 2.0 / (e1 - x(t)).sqrt(), 0.0, half_pi, 1e-14).integral;
    let n = quadrature::double_exponential::integrate(|t| 2.0 * x(t) / (e1 - x(t)).sqrt(), 0.0, half_pi, 1e-14).integral;
    Some((w, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::cx;

    #[test]
    fn roots_of_x3_minus_x() {
        let r = cubic_roots(&cx(128, -1.0, 0.0), &cx(128, 0.0, 0.0), 128).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.real().to_f64()).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-30 && re[1].abs() < 1e-30 && (re[2] - 1.0).abs() < 1e-30);
        assert!(matches!(cubic_roots(&cx(64, -3.0, 0.0), &cx(64, 2.0, 0.0), 64), Err(PeriodError::Singular(_))));
    }

    #[test]
    fn k_and_e_at_known_modulus() {
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let (k, e) = complete_elliptic(&cx(128, 0.5, 0.0), 128).unwrap();
        assert!((k.real().to_f64() - 1.854_074_677_301_372).abs() < 1e-14);
        assert!((e.real().to_f64() - 1.350_643_881_047_675_5).abs() < 1e-14);
    }

    #[test]
    fn lemniscatic_real_period() {
        let ed = elliptic_periods(&cx(128, -1.0, 0.0), &cx(128, 0.0, 0.0), 128).unwrap();
        // the real period of dx/y is twice that of dx/(2y)
        let w = ed.omega2.real().to_f64() * 2.0;
        assert!((w - 5.244_115_108_584_24).abs() < 1e-12, "{w}");
        assert!(ed.omega2.imag().to_f64().abs() < 1e-30);
        let (wq, nq) = real_cycle_quadrature(&ed).unwrap();
        assert!((2.0 * wq - w).abs() < 1e-10, "{wq} {w}");
        assert!((nq - ed.eta2.real().to_f64()).abs() < 1e-10);
        assert!(ed.legendre_residual().to_f64() < 1e-30);
    }

    #[test]
    fn one_real_root() {
        let ed = elliptic_periods(&cx(128, 1.0, 0.0), &cx(128, 1.0, 0.0), 128).unwrap();
        assert!(ed.legendre_residual().to_f64() < 1e-30);
        assert!(*ed.tau.imag() > 0);
        assert!(ed.fricke_residual().unwrap().to_f64() < 1e-25);
    }
}
