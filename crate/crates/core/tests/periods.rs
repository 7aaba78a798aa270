use feynkit_core::graph::{self, FeynmanGraph, MandelstamDictionary, SubdivisionSpec};
use feynkit_core::integrand::{feynman_integrand, sunrise_catalog};
use feynkit_core::motive_sunrise::boundary_points;
use feynkit_core::periods::*;
use feynkit_core::{KinematicPoint, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_traits::Zero;
use rug::{Complex, Float};

const P: u32 = 128;

fn d(a: &Complex, b: &Complex) -> f64 {
    abs(&Complex::with_val(P, a - b)).to_f64()
}

fn random_curve(rng: &mut ChaCha8Rng) -> (Complex, Complex) {
    loop {
        let a: f64 = rng.gen_range(-50..=50) as f64 / 10.0;
        let b: f64 = rng.gen_range(-50..=50) as f64 / 10.0;
        if (4.0 * a * a * a + 27.0 * b * b).abs() > 0.5 {
            return (cx(P, a, 0.0), cx(P, b, 0.0));
        }
    }
}

fn random_tau(rng: &mut ChaCha8Rng) -> Complex {
    cx(P, rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.6))
}

#[test]
fn legendre_and_fricke_on_random_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let (a, b) = random_curve(&mut rng);
        let ed = elliptic_periods(&a, &b, P).unwrap();
        assert!(ed.legendre_residual().to_f64() < 1e-20, "curve {i}");
        assert!(*ed.tau.imag() > 0);
        if i < 10 {
            assert!(ed.fricke_residual().unwrap().to_f64() < 1e-10, "curve {i}");
        }
    }
}

#[test]
fn complex_coefficients() {
    let ed = elliptic_periods(&cx(P, 0.3, -1.2), &cx(P, -0.7, 0.4), P).unwrap();
    assert!(ed.legendre_residual().to_f64() < 1e-30);
    assert!(ed.fricke_residual().unwrap().to_f64() < 1e-25);
}

#[test]
fn quasi_periods_agree_with_direct_quadrature() {
    for (a, b) in [(-1.0, 0.0), (-7.0, 6.0), (-3.0, 1.0)] {
        let ed = elliptic_periods(&cx(P, a, 0.0), &cx(P, b, 0.0), P).unwrap();
        let (w, n) = real_cycle_quadrature(&ed).unwrap();
        assert!((w - ed.omega2.real().to_f64()).abs() < 1e-10);
        assert!((n - ed.eta2.real().to_f64()).abs() < 1e-10);
    }
}

#[test]
fn sv_elliptic_matrix_is_conj_inverse_times_period_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let (a, b) = random_curve(&mut rng);
        let ed = elliptic_periods(&a, &b, P).unwrap();
        let f = sv_elliptic_matrix(&ed.tau, &ed.lambda, P).unwrap();
        let s = sv_from_period_matrix(&ed.period_matrix()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(d(&f[i][j], &s[i][j]) < 1e-10 * (1.0 + abs_f64(&s[i][j])), "entry {i}{j}");
            }
        }
    }
}

#[test]
fn g2_star_has_weight_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..25 {
        let g = Sl2z::random(&mut rng, 20);
        let tau = random_tau(&mut rng);
        let lhs = eisenstein_g2_star(&g.act(&tau), P).unwrap();
        let rhs = eisenstein_g2_star(&tau, P).unwrap() * weight_factor(&g, &tau, 2, 0);
        assert!(d(&lhs, &rhs) < 1e-8 * (1.0 + abs_f64(&rhs)));
    }
}

#[test]
fn sv_entries_have_their_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let one = cx(P, 1.0, 0.0);
    let weights = [[(1, -1), (-1, -1)], [(1, 1), (-1, 1)]];
    for _ in 0..25 {
        let g = Sl2z::random(&mut rng, 20);
        let tau = random_tau(&mut rng);
        let f = sv_elliptic_matrix(&tau, &one, P).unwrap();
        let fg = sv_elliptic_matrix(&g.act(&tau), &one, P).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let (r, s) = weights[i][j];
                let want = Complex::with_val(P, &f[i][j] * weight_factor(&g, &tau, -r, -s));
                assert!(d(&fg[i][j], &want) < 1e-8 * (1.0 + abs_f64(&want)), "f{}{}", i + 1, j + 1);
            }
        }
    }
}

#[test]
fn zeta_quasi_periodicity_and_legendre() {
    let tau = cx(P, 0.31, 0.93);
    let (e1, et) = lattice_eta(&tau, P).unwrap();
    for z in [cx(P, 0.2, 0.1), cx(P, -0.35, 0.4)] {
        let z0 = weierstrass_zeta(&tau, &z, P).unwrap();
        let j1 = weierstrass_zeta(&tau, &(z.clone() + 1u32), P).unwrap() - &z0;
        let jt = weierstrass_zeta(&tau, &Complex::with_val(P, &z + &tau), P).unwrap() - &z0;
        assert!(d(&j1, &e1) < 1e-30);
        assert!(d(&jt, &et) < 1e-30);
        let leg = Complex::with_val(P, &j1 * &tau) - jt;
        assert!(d(&leg, &two_pi_i(P)) < 1e-30);
    }
}

#[test]
fn zeta_transforms_with_weight_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..25 {
        let g = Sl2z::random(&mut rng, 20);
        let tau = random_tau(&mut rng);
        let z = Complex::with_val(P, &tau * rng.gen_range(0.1..0.9)) + rng.gen_range(0.1..0.9);
        let j = g.automorphy(&tau);
        let lhs = weierstrass_zeta(&g.act(&tau), &Complex::with_val(P, &z / &j), P).unwrap();
        let rhs = weierstrass_zeta(&tau, &z, P).unwrap() * &j;
        assert!(d(&lhs, &rhs) < 1e-8 * (1.0 + abs_f64(&rhs)));
    }
}

fn random_points(rng: &mut ChaCha8Rng, tau: &Complex) -> (Complex, Complex) {
    let mut pt = || Complex::with_val(P, tau * rng.gen_range(0.05..0.95)) + rng.gen_range(0.05..0.95);
    (pt(), pt())
}

#[test]
fn incomplete_pair_vanishes_on_the_diagonal() {
    let tau = cx(P, 0.1, 1.2);
    let z = cx(P, 0.3, 0.2);
    let (a, b) = sv_incomplete_pair(&tau, &z, &z, &cx(P, 0.7, 0.2), P).unwrap();
    assert!(a.is_zero() && b.is_zero());
    let (a, b) = sv_incomplete_pair_displayed(&tau, &z, &z, &cx(P, 0.7, 0.2), P).unwrap();
    assert!(a.is_zero() && b.is_zero());
}

#[test]
fn incomplete_pair_matches_the_three_by_three_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..10 {
        let tau = random_tau(&mut rng);
        let lambda = cx(P, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (z1, z2) = random_points(&mut rng, &tau);
        let s = sv_from_period_matrix(&incomplete_period_matrix(&tau, &z1, &z2, &lambda, P).unwrap()).unwrap();
        let (f31, f32) = sv_incomplete_pair(&tau, &z1, &z2, &lambda, P).unwrap();
        assert!(d(&f31, &s[2][0]) < 1e-10 * (1.0 + abs_f64(&f31)));
        assert!(d(&f32, &s[2][1]) < 1e-10 * (1.0 + abs_f64(&f32)));
        let f = sv_elliptic_matrix(&tau, &lambda, P).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(d(&f[i][j], &s[i][j]) < 1e-10 * (1.0 + abs_f64(&f[i][j])));
            }
        }
    }
}

#[test]
fn incomplete_pairs_transform_with_weights_minus_one_and_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let one = cx(P, 1.0, 0.0);
    for _ in 0..25 {
        let g = Sl2z::random(&mut rng, 20);
        let tau = random_tau(&mut rng);
        let (z1, z2) = random_points(&mut rng, &tau);
        let j = g.automorphy(&tau);
        let tg = g.act(&tau);
        let (w1, w2) = (Complex::with_val(P, &z1 / &j), Complex::with_val(P, &z2 / &j));
        for pair in [sv_incomplete_pair, sv_incomplete_pair_displayed] {
            let (a, b) = pair(&tau, &z1, &z2, &one, P).unwrap();
            let (ag, bg) = pair(&tg, &w1, &w2, &one, P).unwrap();
            let wa = Complex::with_val(P, &a / &j);
            let wb = Complex::with_val(P, &b * &j);
            assert!(d(&ag, &wa) < 1e-8 * (1.0 + abs_f64(&wa)));
            assert!(d(&bg, &wb) < 1e-8 * (1.0 + abs_f64(&wb)));
        }
    }
}

#[test]
fn log_example() {
    let s = sv_from_period_matrix(&log_period_matrix(&cx(P, 3.0, 0.0), P)).unwrap();
    let want = Float::with_val(P, 3).ln() * 2u32;
    assert!(d(&s[1][0], &Complex::with_val(P, want)) < 1e-30);
}

#[test]
fn dilog_lower_left_entry() {
    for x in [cx(P, 0.5, 0.0), cx(P, 0.3, 0.4), cx(P, -0.2, 0.6)] {
        let s = sv_from_period_matrix(&dilog_period_matrix(&x, P).unwrap()).unwrap();
        let l2 = li2(&x).unwrap();
        let lx = Complex::with_val(P, x.ln_ref());
        let formula = Complex::with_val(P, &l2 - Complex::with_val(P, l2.conj_ref()))
            + Complex::with_val(P, &lx + Complex::with_val(P, lx.conj_ref())) * Complex::with_val(P, li1(&x).conj_ref());
        assert!(d(&s[2][0], &formula) < 1e-30);
        // imaginary part is twice Bloch-Wigner, the real part is -2 log|x| log|1-x|
        let bw = bloch_wigner(&x).unwrap();
        assert!((s[2][0].imag().to_f64() - 2.0 * bw.to_f64()).abs() < 1e-30);
        let lx = abs(&x).ln();
        let l1x = abs(&(Complex::with_val(P, 1) - &x)).ln();
        assert!((s[2][0].real().to_f64() + 2.0 * (lx * l1x).to_f64()).abs() < 1e-30);
    }
}

#[test]
fn sv_is_invariant_under_rational_betti_change() {
    let p = dilog_period_matrix(&cx(P, 0.3, 0.4), P).unwrap();
    let q = [[2.0, 1.0, 0.0], [-1.0, 3.0, 1.0], [0.5, 0.0, 1.0]];
    let qp: Vec<Vec<Complex>> = (0..3)
        .map(|i| (0..3).map(|j| (0..3).fold(cx(P, 0.0, 0.0), |acc, k| acc + Complex::with_val(P, &p[k][j] * q[i][k]))).collect())
        .collect();
    let a = sv_from_period_matrix(&p).unwrap();
    let b = sv_from_period_matrix(&qp).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(d(&a[i][j], &b[i][j]) < 1e-28);
        }
    }
}

fn kin(m: [i64; 3], q: i64) -> KinematicPoint {
    KinematicPoint::sunrise_int(m[0], m[1], m[2], q)
}

fn sunrise_cubic(k: &KinematicPoint) -> feynkit_core::MPoly {
    graph::symanzik_second(&FeynmanGraph::sunrise(), &MandelstamDictionary::sunrise()).unwrap().specialize(k)
}

#[test]
fn sunrise_weierstrass_models() {
    for k in [kin([1, 1, 1], 1), kin([1, 2, 3], 5)] {
        let xi = sunrise_cubic(&k);
        let pts = boundary_points(&k).unwrap();
        let models: Vec<WeierstrassModel> = pts.iter().map(|p| to_weierstrass(&xi, &p.projective).unwrap()).collect();
        for m in &models {
            assert!(!m.discriminant().is_zero());
            assert_eq!(m.j_invariant(), models[0].j_invariant());
            let images = pts.iter().filter_map(|p| m.push_forward(&p.projective)).collect::<Vec<_>>();
            assert!(images.len() >= 4);
            assert!(images.iter().all(|p| m.contains(p)));
        }
    }
}

#[test]
fn nodal_sunrise_is_rejected() {
    // q^2 = -1 at unit masses is a nodal cubic; [0 : -1 : 1] lies on it
    let xi = sunrise_cubic(&kin([1, 1, 1], -1));
    let base = [Rat::from_integer(0.into()), Rat::from_integer((-1).into()), Rat::from_integer(1.into())];
    assert!(matches!(to_weierstrass(&xi, &base), Err(PeriodError::Singular(_))));
}

#[test]
fn motivic_logarithms_by_quadrature() {
    let c = sunrise_catalog();
    let k = kin([1, 2, 3], 5);
    let want = [1.5f64.ln(), (1.0f64 / 3.0).ln(), 2.0f64.ln()];
    for (i, w) in want.iter().enumerate() {
        let r = simplex_quadrature(&c[&format!("mu{}", i + 1)], &k, 1e-8).unwrap();
        assert!((r.value - w).abs() < 1e-6, "mu{}: {} vs {}", i + 1, r.value, w);
    }
    for i in 1..=3 {
        let r = simplex_quadrature(&c[&format!("mu{i}")], &kin([1, 1, 1], 5), 1e-8).unwrap();
        assert!(r.value.abs() < 1e-6, "mu{i}: {}", r.value);
    }
}

#[test]
fn halving_the_tolerance_stays_within_the_estimate() {
    let c = sunrise_catalog();
    let k = kin([1, 2, 3], 5);
    let a = simplex_quadrature(&c["omega_G"], &k, 1e-6).unwrap();
    let b = simplex_quadrature(&c["omega_G"], &k, 5e-7).unwrap();
    assert!(a.error <= 1e-6 && b.error <= 5e-7);
    assert!((a.value - b.value).abs() <= a.error.max(1e-12));
}

#[test]
fn subdivision_period_shadow() {
    let g = FeynmanGraph::sunrise();
    let m = MandelstamDictionary::sunrise();
    let gs = graph::subdivide(&g, &SubdivisionSpec::new(vec![1, 0, 0])).unwrap();
    let own = feynman_integrand(&gs, 2, &m).unwrap();
    let eta = &sunrise_catalog()["eta_G"];
    for k in [kin([1, 2, 3], 5), kin([2, 1, 1], 3)] {
        let a = simplex_quadrature(&own, &k, 3e-6).unwrap();
        let b = simplex_quadrature(eta, &k, 3e-6).unwrap();
        assert!((a.value - b.value).abs() < 1e-5, "{} vs {}", a.value, b.value);
    }
}

#[test]
fn non_euclidean_kinematics_rejected() {
    let c = sunrise_catalog();
    assert!(simplex_quadrature(&c["omega_G"], &kin([1, 1, 1], -20), 1e-6).is_err());
    assert!(simplex_quadrature(&c["omega0"], &kin([1, 1, 1], 1), 1e-6).is_err());
}

#[test]
fn eichler_linearity_and_derivative_law() {
    let tau = cx(P, 0.5, 1.0);
    let delta = QExpansion::ramanujan_delta(40, P);
    let other = QExpansion::from_integers(&[1, 240, 2160, 6720, 17520], 12, P);
    let (ca, cb) = (cx(P, 2.0, -1.0), cx(P, 0.5, 3.0));
    for j in [0u32, 1, 5, 10] {
        let lhs = eichler_integral(&delta.scale(&ca).add(&other.scale(&cb)), &tau, j, P).unwrap().value;
        let rhs = eichler_integral(&delta, &tau, j, P).unwrap().value * &ca
            + eichler_integral(&other, &tau, j, P).unwrap().value * &cb;
        assert!(d(&lhs, &rhs) < 1e-25 * (1.0 + abs_f64(&rhs)));
    }
    for f in [&delta, &other] {
        let h = 1e-5;
        let fd = (eichler_integral(f, &(tau.clone() + h), 1, P).unwrap().value
            - eichler_integral(f, &(tau.clone() - h), 1, P).unwrap().value)
            / (2.0 * h);
        let want = -eichler_integral(f, &tau, 0, P).unwrap().value;
        assert!(d(&fd, &want) < 1e-6 * abs_f64(&want), "{fd} vs {want}");
    }
}

#[test]
fn eichler_cusp_form_truncation() {
    let tau = cx(P, 0.1, 0.9);
    let a = eichler_integral(&QExpansion::ramanujan_delta(30, P), &tau, 4, P).unwrap();
    let b = eichler_integral(&QExpansion::ramanujan_delta(60, P), &tau, 4, P).unwrap();
    assert!(d(&a.value, &b.value) < 1e-10);
    assert!(b.error.to_f64() < 1e-10);
}

#[test]
fn eichler_constant_term_against_the_cut_off_integral() {
    // int_tau^{iY} c0 (z - tau)^j dz by quadrature, minus the part that grows with Y
    let tau = (0.3, 1.2);
    let c0 = 2.5;
    for j in 0..4u32 {
        let y = 7.0;
        // straight path tau -> iY: z = tau + s (iY - tau)
        let dz = (-tau.0, y - tau.1);
        let mut re = 0.0;
        let mut im = 0.0;
        for part in 0..2 {
            let g = |s: f64| {
                let w = (s * dz.0, s * dz.1);
                let mut p = (1.0, 0.0);
                for _ in 0..j {
                    p = (p.0 * w.0 - p.1 * w.1, p.0 * w.1 + p.1 * w.0);
                }
                let v = (p.0 * dz.0 - p.1 * dz.1, p.0 * dz.1 + p.1 * dz.0);
                if part == 0 { c0 * v.0 } else { c0 * v.1 }
            };
            let r = quadrature::integrate(g, 0.0, 1.0, 1e-12).integral;
            if part == 0 { re = r } else { im = r }
        }
        // divergent part: sum_{k>=1} binom(j+1,k) (iY)^k (-tau)^(j+1-k) / (j+1)
        let iy = cx(P, 0.0, y);
        let mt = cx(P, -tau.0, -tau.1);
        let mut div = cx(P, 0.0, 0.0);
        let mut binom = 1.0;
        for k in 1..=j + 1 {
            binom = binom * (j + 2 - k) as f64 / k as f64;
            div += Complex::with_val(P, rug::ops::Pow::pow(&iy, k)) * Complex::with_val(P, rug::ops::Pow::pow(&mt, j + 1 - k)) * binom;
        }
        let finite = cx(P, re, im) - div * c0 / (j + 1);
        let f = QExpansion::from_integers(&[0], 12, P).add(&QExpansion::new(vec![cx(P, c0, 0.0)], 12));
        let v = eichler_integral(&f, &cx(P, tau.0, tau.1), j, P).unwrap().value;
        assert!(d(&v, &finite) < 1e-8, "j = {j}: {v} vs {finite}");
    }
}
