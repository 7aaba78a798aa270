//! Eisenstein series, the Weierstrass zeta function and single-valued
//! period matrices.

use rug::ops::Pow;
use rug::{Complex, Float};

use super::{abs, eps, pi, two_pi_i, PeriodError, Result};

pub fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

fn check_upper(tau: &Complex) -> Result<()> {
    if *tau.imag() <= 0 {
        return Err(PeriodError::Invalid("Im tau must be positive".into()));
    }
    Ok(())
}

fn nome(tau: &Complex, prec: u32) -> Complex {
    Complex::with_val(prec, tau * two_pi_i(prec)).exp()
}

/// Number of `q`-powers needed so that `n^2 |q|^n` drops below `2^-prec`.
fn terms_needed(q_abs: f64, prec: u32) -> usize {
    let lq = q_abs.ln();
    let target = -(prec as f64 + 8.0) * std::f64::consts::LN_2;
    let mut n = 1usize;
    while (n as f64) * lq + 2.0 * (n as f64).ln() > target {
        n += 1;
        if n > 10_000_000 {
            break;
        }
    }
    n
}

/// `G2(tau) = -1/24 + sum sigma_1(n) q^n`.
pub fn eisenstein_g2(tau: &Complex, prec: u32) -> Result<Complex> {
    check_upper(tau)?;
    let wp = prec + 32;
    let q = nome(tau, wp);
    let n = terms_needed(abs(&q).to_f64(), wp);
    let mut sum = Complex::with_val(wp, 0);
    let mut qn = Complex::with_val(wp, 1);
    for k in 1..=n as u64 {
        qn *= &q;
        sum += Complex::with_val(wp, &qn * sigma1(k));
    }
    Ok(Complex::with_val(prec, sum - Float::with_val(wp, 1) / 24u32))
}

/// `G2*(tau) = G2(tau) + 1/(8 pi Im tau)`.
pub fn eisenstein_g2_star(tau: &Complex, prec: u32) -> Result<Complex> {
    let g = eisenstein_g2(tau, prec)?;
    let y = Float::with_val(prec, tau.imag());
    Ok(g + (pi(prec) * 8u32 * y).recip())
}

/// The single-valued matrix `conj(P)^-1 P` of the period matrix
/// `[[w1, n1], [w2, n2]]` with `tau = w2/w1`, `lambda = w1/(2 pi i)`:
///
/// ```text
/// f11 = -(lambda/conj lambda) 8 pi y conj(G2*)
/// f12 = ((8 pi y)^2 |G2*|^2 - 1) / (|lambda|^2 4 pi y)
/// f21 = -|lambda|^2 4 pi y
/// f22 = (conj lambda/lambda) 8 pi y G2*
/// ```
pub fn sv_elliptic_matrix(tau: &Complex, lambda: &Complex, prec: u32) -> Result<[[Complex; 2]; 2]> {
    if lambda.is_zero() {
        return Err(PeriodError::Invalid("lambda = 0".into()));
    }
    let g = eisenstein_g2_star(tau, prec)?;
    let y = Float::with_val(prec, tau.imag());
    let p8y = pi(prec) * 8u32 * &y;
    let p4y = Float::with_val(prec, &p8y / 2u32);
    let lb = Complex::with_val(prec, lambda.conj_ref());
    let ll = Float::with_val(prec, lambda.norm_ref());
    let ratio = Complex::with_val(prec, lambda / &lb);
    let f11 = -(Complex::with_val(prec, &ratio * Complex::with_val(prec, g.conj_ref())) * &p8y);
    let g2 = Float::with_val(prec, g.norm_ref());
    let f12 = Complex::with_val(prec, (Float::with_val(prec, p8y.square_ref()) * g2 - 1u32) / (Float::with_val(prec, &ll * &p4y)));
    let f21 = Complex::with_val(prec, -(ll * p4y));
    let f22 = Complex::with_val(prec, &lb / lambda) * g * p8y;
    Ok([[f11, f12], [f21, f22]])
}

/// Jumps `(zeta(z+1) - zeta(z), zeta(z+tau) - zeta(z))` for the lattice
/// `Z + tau Z`: `eta(1) = -8 pi^2 G2(tau)` and `eta(tau) = tau eta(1) - 2 pi i`.
pub fn lattice_eta(tau: &Complex, prec: u32) -> Result<(Complex, Complex)> {
    let g = eisenstein_g2(tau, prec)?;
    let p2 = Float::with_val(prec, pi(prec).square_ref());
    let e1 = -(g * p2 * 8u32);
    let et = Complex::with_val(prec, tau * &e1) - two_pi_i(prec);
    Ok((e1, et))
}

/// Weierstrass zeta of the lattice `Z + tau Z` by Lang's `q`-expansion
/// `zeta(z) = eta(1) z + pi i (q_z + 1)/(q_z - 1)
///   + 2 pi i sum_n [q^n/q_z/(1 - q^n/q_z) - q^n q_z/(1 - q^n q_z)]`.
pub fn weierstrass_zeta(tau: &Complex, z: &Complex, prec: u32) -> Result<Complex> {
    check_upper(tau)?;
    let wp = prec + 48;
    let tau_w = Complex::with_val(wp, tau);
    let z = Complex::with_val(wp, z);
    // lattice point test
    let y = Float::with_val(wp, tau_w.imag());
    let n = Float::with_val(wp, z.imag() / &y).round();
    let m = Float::with_val(wp, z.real() - Float::with_val(wp, &n * tau_w.real())).round();
    let off = Complex::with_val(wp, &z - Complex::with_val(wp, &tau_w * &n)) - &m;
    if abs(&off) < eps(wp, prec / 2) {
        return Err(PeriodError::Pole(format!("z is a lattice point ({m} + {n} tau)")));
    }
    let l = two_pi_i(wp);
    let q = nome(&tau_w, wp);
    let qz = Complex::with_val(wp, &z * &l).exp();
    let (e1, _) = lattice_eta(&tau_w, wp)?;
    let mut out = Complex::with_val(wp, &e1 * &z);
    let pii = Complex::with_val(wp, &l / 2u32);
    out += pii * (Complex::with_val(wp, &qz + 1u32) / Complex::with_val(wp, &qz - 1u32));
    let qa = abs(&q).to_f64();
    let big = abs(&qz).to_f64().max(1.0 / abs(&qz).to_f64()).ln();
    let mut terms = terms_needed(qa, wp);
    terms += (big / -qa.ln()).ceil() as usize + 1;
    let qz_inv = Complex::with_val(wp, qz.recip_ref());
    let mut qn = Complex::with_val(wp, 1);
    let mut sum = Complex::with_val(wp, 0);
    for _ in 0..terms {
        qn *= &q;
        let u = Complex::with_val(wp, &qn * &qz_inv);
        let v = Complex::with_val(wp, &qn * &qz);
        let t1 = Complex::with_val(wp, &u / (Complex::with_val(wp, 1) - &u));
        let t2 = Complex::with_val(wp, &v / (Complex::with_val(wp, 1) - &v));
        sum += t1 - t2;
    }
    out += sum * l;
    Ok(Complex::with_val(prec, out))
}

/// Period matrix of `(omega, eta, xi_{P,Q})` against `(alpha, beta, path
/// from Q to P)` for the lattice `w1 (Z + tau Z)`, `w1 = 2 pi i lambda`, with
/// `P, Q` the images of `z1, z2` (coordinates relative to `Z + tau Z`).
pub fn incomplete_period_matrix(
    tau: &Complex,
    z1: &Complex,
    z2: &Complex,
    lambda: &Complex,
    prec: u32,
) -> Result<Vec<Vec<Complex>>> {
    let w1 = Complex::with_val(prec, lambda * two_pi_i(prec));
    let w2 = Complex::with_val(prec, &w1 * tau);
    let (e1, et) = lattice_eta(tau, prec)?;
    let zd = Complex::with_val(prec, z1 - z2);
    let zeta = weierstrass_zeta(tau, z1, prec)? - weierstrass_zeta(tau, z2, prec)?;
    let zero = Complex::with_val(prec, 0);
    let one = Complex::with_val(prec, 1);
    Ok(vec![
        vec![w1.clone(), -(e1 / &w1), zero.clone()],
        vec![w2, -(et / &w1), zero],
        vec![Complex::with_val(prec, &w1 * &zd), -(zeta / &w1), one],
    ])
}

fn zeta_difference(tau: &Complex, z1: &Complex, z2: &Complex, prec: u32) -> Result<(Complex, Complex)> {
    let zd = Complex::with_val(prec, z1 - z2);
    if zd.is_zero() {
        return Ok((zd.clone(), zd));
    }
    Ok((zd, weierstrass_zeta(tau, z1, prec)? - weierstrass_zeta(tau, z2, prec)?))
}

/// The third row `(f31, f32)` of `conj(P)^-1 P` for
/// [`incomplete_period_matrix`], with `z = z1 - z2`, `Z = zeta(z1) - zeta(z2)`:
///
/// ```text
/// f31 = 2 pi i lambda z + 2 pi i conj(lambda) conj(z) f11 - conj(Z) f21 / (2 pi i conj lambda)
/// f32 = -Z / (2 pi i lambda) + 2 pi i conj(lambda) conj(z) f12 - conj(Z) f22 / (2 pi i conj lambda)
/// ```
pub fn sv_incomplete_pair(
    tau: &Complex,
    z1: &Complex,
    z2: &Complex,
    lambda: &Complex,
    prec: u32,
) -> Result<(Complex, Complex)> {
    let f = sv_elliptic_matrix(tau, lambda, prec)?;
    let (z, zeta) = zeta_difference(tau, z1, z2, prec)?;
    let l = two_pi_i(prec);
    let ll = Complex::with_val(prec, &l * lambda);
    let lb = Complex::with_val(prec, &l * Complex::with_val(prec, lambda.conj_ref()));
    let zb = Complex::with_val(prec, z.conj_ref());
    let zeb = Complex::with_val(prec, zeta.conj_ref());
    let a = Complex::with_val(prec, &lb * &zb);
    let f31 = Complex::with_val(prec, &ll * &z) + Complex::with_val(prec, &a * &f[0][0])
        - Complex::with_val(prec, &zeb * &f[1][0]) / &lb;
    let f32 = -(Complex::with_val(prec, &zeta / &ll)) + Complex::with_val(prec, &a * &f[0][1])
        - Complex::with_val(prec, &zeb * &f[1][1]) / &lb;
    Ok((f31, f32))
}

/// The pair written as `conj(Z) f21 + conj(z) f11 + 2 pi i z` and
/// `conj(Z) f22 + conj(z) f12 + 2 pi i Z`.
pub fn sv_incomplete_pair_displayed(
    tau: &Complex,
    z1: &Complex,
    z2: &Complex,
    lambda: &Complex,
    prec: u32,
) -> Result<(Complex, Complex)> {
    let f = sv_elliptic_matrix(tau, lambda, prec)?;
    let (z, zeta) = zeta_difference(tau, z1, z2, prec)?;
    let l = two_pi_i(prec);
    let zb = Complex::with_val(prec, z.conj_ref());
    let zeb = Complex::with_val(prec, zeta.conj_ref());
    let f31 = Complex::with_val(prec, &zeb * &f[1][0]) + Complex::with_val(prec, &zb * &f[0][0]) + Complex::with_val(prec, &l * &z);
    let f32 = Complex::with_val(prec, &zeb * &f[1][1]) + Complex::with_val(prec, &zb * &f[0][1]) + Complex::with_val(prec, &l * &zeta);
    Ok((f31, f32))
}

/// `conj(P)^-1 P` by Gaussian elimination with partial pivoting.
pub fn sv_from_period_matrix(p: &[Vec<Complex>]) -> Result<Vec<Vec<Complex>>> {
    let n = p.len();
    if n == 0 || p.iter().any(|r| r.len() != n) {
        return Err(PeriodError::Invalid("period matrix must be square".into()));
    }
    let prec = p[0][0].prec().0;
    let mut a: Vec<Vec<Complex>> = p.iter().map(|r| r.iter().map(|x| Complex::with_val(prec, x.conj_ref())).collect()).collect();
    let mut b: Vec<Vec<Complex>> = p.to_vec();
    let norm = p.iter().flatten().map(abs).fold(Float::with_val(prec, 0), |m, x| m.max(&x));
    let tiny = eps(prec, prec * 3 / 4) * norm;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| abs(&a[i][c]).partial_cmp(&abs(&a[j][c])).expect("finite")).expect("rows");
        if abs(&a[piv][c]) <= tiny {
            return Err(PeriodError::Invalid("period matrix is singular".into()));
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = Complex::with_val(prec, &a[i][c] / &a[c][c]);
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = Complex::with_val(prec, &f * &a[c][j]);
                a[i][j] -= t;
                let t = Complex::with_val(prec, &f * &b[c][j]);
                b[i][j] -= t;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            b[i][j] /= &a[i][i];
        }
    }
    Ok(b)
}

/// `[[2 pi i, 0], [log x, 1]]`.
pub fn log_period_matrix(x: &Complex, prec: u32) -> Vec<Vec<Complex>> {
    vec![
        vec![two_pi_i(prec), Complex::with_val(prec, 0)],
        vec![Complex::with_val(prec, x.ln_ref()), Complex::with_val(prec, 1)],
    ]
}

/// `-log(1 - x)`.
pub fn li1(x: &Complex) -> Complex {
    let p = x.prec().0;
    -(Complex::with_val(p, 1) - x).ln()
}

/// `Li_2(x) = sum x^n / n^2` for `|x| < 1`.
pub fn li2(x: &Complex) -> Result<Complex> {
    let p = x.prec().0;
    let r = abs(x).to_f64();
    if r >= 0.95 {
        return Err(PeriodError::Invalid("Li2 series needs |x| < 0.95".into()));
    }
    let wp = p + 16;
    let tol = eps(wp, wp);
    let mut sum = Complex::with_val(wp, 0);
    let mut xn = Complex::with_val(wp, 1);
    for n in 1u64.. {
        xn *= x;
        let t = Complex::with_val(wp, &xn / Float::with_val(wp, n).square());
        let small = abs(&t) < tol;
        sum += t;
        if small {
            break;
        }
    }
    Ok(Complex::with_val(p, sum))
}

/// `D(x) = Im Li_2(x) + arg(1 - x) log|x|`.
pub fn bloch_wigner(x: &Complex) -> Result<Float> {
    let p = x.prec().0;
    let l2 = li2(x)?;
    let arg = Complex::with_val(p, Complex::with_val(p, 1) - x).arg().real().clone();
    let lx = Float::with_val(p, abs(x).ln_ref());
    Ok(Float::with_val(p, l2.imag()) + arg * lx)
}

/// `[[(2 pi i)^2, 0, 0], [2 pi i log x, 2 pi i, 0], [Li2 x, Li1 x, 1]]`.
pub fn dilog_period_matrix(x: &Complex, prec: u32) -> Result<Vec<Vec<Complex>>> {
    let x = Complex::with_val(prec, x);
    let l = two_pi_i(prec);
    let zero = || Complex::with_val(prec, 0);
    Ok(vec![
        vec![Complex::with_val(prec, l.square_ref()), zero(), zero()],
        vec![Complex::with_val(prec, &l * Complex::with_val(prec, x.ln_ref())), l.clone(), zero()],
        vec![li2(&x)?, li1(&x), Complex::with_val(prec, 1)],
    ])
}

/// An element of `SL2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sl2z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        (a * d - b * c == 1).then_some(Sl2z { a, b, c, d })
    }

    /// Uniform over matrices with entries in `[-bound, bound]` and `c != 0`.
    pub fn random<R: rand::Rng>(rng: &mut R, bound: i64) -> Self {
        loop {
            let c = rng.gen_range(-bound..=bound);
            let d = rng.gen_range(-bound..=bound);
            if c == 0 || num_integer::Integer::gcd(&c, &d) != 1 {
                continue;
            }
            // a d - b c = 1 via extended gcd, then shift into range
            let e = num_integer::Integer::extended_gcd(&d, &c);
            let (mut a, mut b) = (e.x * e.gcd, -e.y * e.gcd);
            let shift = rng.gen_range(-3..=3);
            a += shift * c;
            b += shift * d;
            if a.abs() <= bound && b.abs() <= bound {
                if let Some(g) = Sl2z::new(a, b, c, d) {
                    return g;
                }
            }
        }
    }

    pub fn act(&self, tau: &Complex) -> Complex {
        let p = tau.prec().0;
        let num = Complex::with_val(p, tau * self.a) + self.b;
        num / self.automorphy(tau)
    }

    /// `c tau + d`.
    pub fn automorphy(&self, tau: &Complex) -> Complex {
        let p = tau.prec().0;
        Complex::with_val(p, tau * self.c) + self.d
    }
}

/// `(c tau + d)^r (c conj(tau) + d)^s`.
pub fn weight_factor(g: &Sl2z, tau: &Complex, r: i32, s: i32) -> Complex {
    let j = g.automorphy(tau);
    let jb = Complex::with_val(tau.prec().0, j.conj_ref());
    Complex::with_val(tau.prec().0, j.pow(r)) * jb.pow(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::cx;

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma1(6), 12);
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(9), 13);
    }

    #[test]
    fn g2_at_large_height() {
        let tau = cx(128, 0.0, 10.0);
        let g = eisenstein_g2(&tau, 128).unwrap();
        let q = Complex::with_val(128, &tau * two_pi_i(128)).exp();
        let two_term = q - Float::with_val(128, 1) / 24u32;
        assert!(abs(&(g - two_term)).to_f64() < 1e-25);
    }

    #[test]
    fn f21_at_i() {
        let f = sv_elliptic_matrix(&cx(128, 0.0, 1.0), &cx(128, 1.0, 0.0), 128).unwrap();
        assert!((f[1][0].real().to_f64() + 4.0 * std::f64::consts::PI).abs() < 1e-30);
        assert!(f[1][0].imag().to_f64().abs() < 1e-30);
    }

    #[test]
    fn zeta_is_odd_with_a_pole_at_the_lattice() {
        let tau = cx(128, 0.2, 1.1);
        let z = cx(128, 0.3, 0.4);
        let a = weierstrass_zeta(&tau, &z, 128).unwrap();
        let b = weierstrass_zeta(&tau, &(-z.clone()), 128).unwrap();
        assert!(abs(&(a + b)).to_f64() < 1e-30);
        let lattice = Complex::with_val(128, &tau * 2u32) - 1u32;
        assert!(matches!(weierstrass_zeta(&tau, &lattice, 128), Err(PeriodError::Pole(_))));
    }

    #[test]
    fn orthogonal_matrix_has_trivial_sv() {
        let (c, s) = (0.6, 0.8);
        let p = vec![vec![cx(128, c, 0.0), cx(128, -s, 0.0)], vec![cx(128, s, 0.0), cx(128, c, 0.0)]];
        let sv = sv_from_period_matrix(&p).unwrap();
        for (i, row) in sv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(abs(&(x.clone() - want)).to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let p = vec![vec![cx(64, 1.0, 1.0), cx(64, 2.0, 2.0)], vec![cx(64, 1.0, 0.0), cx(64, 2.0, 0.0)]];
        assert!(sv_from_period_matrix(&p).is_err());
    }

    #[test]
    fn random_gamma_is_in_sl2z() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for _ in 0..50 {
            let g = Sl2z::random(&mut rng, 20);
            assert_eq!(g.a * g.d - g.b * g.c, 1);
            assert!([g.a, g.b, g.c, g.d].iter().all(|x| x.abs() <= 20));
        }
    }
}
