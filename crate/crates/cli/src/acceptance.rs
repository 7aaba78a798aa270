//! The acceptance criteria, run by `feynkit selftest` and by the
//! `acceptance` test target.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use feynkit_core::graph::{self, random_graph, FeynmanGraph, MandelstamDictionary, SubdivisionSpec};
use feynkit_core::integrand::{feynman_integrand, lemma_substitution_holds, sunrise_catalog};
use feynkit_core::motive_sunrise::{
    basis_rows, check_duality, mu_dual_table, sample_points, table_sweep, weight0_check, Basis,
};
use feynkit_core::periods::*;
use feynkit_core::{KinematicPoint, MPoly, OmegaKind, ProjForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};
use serde_json::{json, Value};

const P: u32 = 128;

pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let over = match self.budget {
            Some(b) if self.elapsed > b => format!(", over the {}s budget", b.as_secs()),
            _ => String::new(),
        };
        format!(
            "[{}] {:>2}. {} ({:.2}s{over}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }

    /// Timing is left out so that the document is reproducible.
    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "name": self.name, "passed": self.passed, "detail": self.detail})
    }
}

type Check = fn(u64) -> (bool, String);

const CRITERIA: [(&str, Check, Option<u64>); 11] = [
    ("Symanzik exactness", symanzik_exactness, Some(1)),
    ("Appendix B reproduction", appendix_table, Some(120)),
    ("b' matrix certificate", dual_certificate, Some(60)),
    ("Subdivision calculus", subdivision_calculus, Some(30)),
    ("Motivic-log periods", motivic_logs, Some(120)),
    ("Subdivision period shadow", period_shadow, Some(120)),
    ("Elliptic identities", elliptic_identities, None),
    ("Modular transformation laws", modular_laws, None),
    ("Single-valued examples", single_valued_examples, None),
    ("Weight-0 chart identity", weight0, None),
    ("Eichler property suite", eichler_suite, None),
];

/// Run the selected criteria (all when `only` is empty), in order.
pub fn run(only: &[usize], seed: u64) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .enumerate()
        .filter(|(i, _)| only.is_empty() || only.contains(&(i + 1)))
        .map(|(i, &(name, check, budget))| {
            let start = Instant::now();
            let (passed, detail) = catch_unwind(AssertUnwindSafe(|| check(seed)))
                .unwrap_or_else(|e| (false, format!("panicked: {}", panic_message(&e))));
            CriterionResult {
                id: i + 1,
                name,
                passed,
                detail,
                elapsed: start.elapsed(),
                budget: budget.map(Duration::from_secs),
            }
        })
        .collect()
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown".into())
}

fn d(a: &Complex, b: &Complex) -> f64 {
    abs(&Complex::with_val(P, a - b)).to_f64()
}

fn rel(a: &Complex, b: &Complex) -> f64 {
    d(a, b) / (1.0 + abs_f64(b))
}

fn sunrise_kin(m: [i64; 3], q: i64) -> KinematicPoint {
    KinematicPoint::sunrise_int(m[0], m[1], m[2], q)
}

fn symanzik_exactness(_: u64) -> (bool, String) {
    let (psi, xi) = graph::symanzik_pair(&FeynmanGraph::sunrise(), &MandelstamDictionary::sunrise()).unwrap();
    let v = xi.vars().clone();
    let a = |i| MPoly::var(&v, i);
    let s = |n: &str| MPoly::var_named(&v, n).unwrap();
    let psi_want = &(&(&a(0) * &a(1)) + &(&a(0) * &a(2))) + &(&a(1) * &a(2));
    let mass = &(&(&s("m1^2") * &a(0)) + &(&s("m2^2") * &a(1))) + &(&s("m3^2") * &a(2));
    let xi_want = &(&(&s("q1^2") * &a(0)) * &(&a(1) * &a(2))) + &(&mass * &psi_want);
    let ok = psi.to_canonical() == psi_want.to_canonical() && xi.to_canonical() == xi_want.to_canonical();
    (ok, format!("psi = {}", psi.to_canonical()))
}

fn appendix_table(seed: u64) -> (bool, String) {
    let mut agree = [[true; 7]; 3];
    for r in table_sweep(seed, 20) {
        let c = match r {
            Ok(c) => c,
            Err(e) => return (false, e.to_string()),
        };
        for i in 0..3 {
            for j in 0..7 {
                agree[i][j] &= c.component_match[i][j];
            }
        }
    }
    let ok = agree.iter().all(|r| r.iter().all(|&b| b));
    let bad: Vec<String> = (0..3)
        .flat_map(|i| (0..7).map(move |j| (i, j)))
        .filter(|&(i, j)| !agree[i][j])
        .map(|(i, j)| format!("a{},{}", i + 1, j + 1))
        .collect();
    let detail = if ok {
        "20 points, all 21 components equal".to_string()
    } else {
        format!("20 points; components differing at some point: {}", bad.join(" "))
    };
    (ok, detail)
}

fn dual_certificate(seed: u64) -> (bool, String) {
    let table = mu_dual_table();
    for (n, kin) in sample_points(seed.wrapping_add(1), 10).iter().enumerate() {
        let rows: Vec<[_; 7]> = match basis_rows(kin, Basis::Mu) {
            Ok(r) => r.into_iter().map(|d| d.a).collect(),
            Err(e) => return (false, format!("point {n}: {e}")),
        };
        if !check_duality(&rows, &table).0 {
            return (false, format!("a'b' != I at point {n}"));
        }
    }
    (true, "a'b' = I exactly at 10 points".into())
}

fn subdivision_calculus(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    for n in 0..10 {
        let nv = rng.gen_range(2..=5);
        let ne = rng.gen_range(nv..=8);
        let g = random_graph(&mut rng, nv, ne, false);
        let m = graph::generic_mandelstam(&g);
        for e in 0..g.num_edges() {
            if !lemma_substitution_holds(&g, e, &m).unwrap_or(false) {
                return (false, format!("graph {n}, edge {e}: substitution fails"));
            }
        }
    }
    let g = FeynmanGraph::sunrise();
    let m = MandelstamDictionary::sunrise();
    let (psi, _) = graph::symanzik_pair(&g, &m).unwrap();
    let omega = feynman_integrand(&g, 2, &m).unwrap();
    let v = psi.vars().clone();
    let a = |i| MPoly::var(&v, i);
    // -N/Xi * omega_G with omega_G = Omega/Xi
    let over_xi = |num: MPoly| ProjForm { numerator: num, xi_exp: omega.xi_exp + 1, sign: -1, ..omega.clone() };
    let want = [
        ("eta_G", over_xi(&a(0) * &psi)),
        ("nu1", over_xi(&a(0) * &a(1).pow(2))),
        ("nu2", over_xi(&a(0).pow(2) * &a(2))),
        ("nu3", over_xi(&a(1) * &a(2).pow(2))),
    ];
    let catalog = sunrise_catalog();
    for (name, w) in &want {
        let c = &catalog[*name];
        let same = c.signed_numerator() == w.signed_numerator()
            && (c.psi_exp, c.xi_exp) == (w.psi_exp, w.xi_exp)
            && c.omega_kind == OmegaKind::Full;
        if !same {
            return (false, format!("{name} differs from its closed form"));
        }
    }
    (true, "10 random graphs, every edge; eta_G, nu1, nu2, nu3 exact".into())
}

fn motivic_logs(_: u64) -> (bool, String) {
    let c = sunrise_catalog();
    let k = sunrise_kin([1, 2, 3], 5);
    let want = [1.5f64.ln(), (1.0f64 / 3.0).ln(), 2.0f64.ln()];
    let mut worst: f64 = 0.0;
    for (i, w) in want.iter().enumerate() {
        match simplex_quadrature(&c[&format!("mu{}", i + 1)], &k, 1e-8) {
            Ok(r) => worst = worst.max((r.value - w).abs()),
            Err(e) => return (false, format!("mu{}: {e}", i + 1)),
        }
    }
    let mut equal: f64 = 0.0;
    for i in 1..=3 {
        match simplex_quadrature(&c[&format!("mu{i}")], &sunrise_kin([1, 1, 1], 5), 1e-8) {
            Ok(r) => equal = equal.max(r.value.abs()),
            Err(e) => return (false, format!("mu{i} at equal masses: {e}")),
        }
    }
    (worst < 1e-6 && equal < 1e-6, format!("max |per - log| = {worst:.1e}, equal masses max |per| = {equal:.1e}"))
}

fn period_shadow(_: u64) -> (bool, String) {
    let g = FeynmanGraph::sunrise();
    let m = MandelstamDictionary::sunrise();
    let gs = graph::subdivide(&g, &SubdivisionSpec::new(vec![1, 0, 0])).unwrap();
    let own = feynman_integrand(&gs, 2, &m).unwrap();
    let eta = &sunrise_catalog()["eta_G"];
    let mut worst: f64 = 0.0;
    for k in [sunrise_kin([1, 2, 3], 5), sunrise_kin([2, 1, 1], 3)] {
        let (a, b) = match (simplex_quadrature(&own, &k, 3e-6), simplex_quadrature(eta, &k, 3e-6)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
        };
        worst = worst.max((a.value - b.value).abs());
    }
    (worst < 1e-5, format!("max difference {worst:.1e} at 2 points"))
}

fn random_curve(rng: &mut ChaCha8Rng) -> (Complex, Complex) {
    loop {
        let a = rng.gen_range(-50..=50) as f64 / 10.0;
        let b = rng.gen_range(-50..=50) as f64 / 10.0;
        if (4.0 * a * a * a + 27.0 * b * b).abs() > 0.5 {
            return (cx(P, a, 0.0), cx(P, b, 0.0));
        }
    }
}

fn random_tau(rng: &mut ChaCha8Rng) -> Complex {
    cx(P, rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.6))
}

fn elliptic_identities(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let (mut leg, mut fri, mut sv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let (a, b) = random_curve(&mut rng);
        let ed = match elliptic_periods(&a, &b, P) {
            Ok(ed) => ed,
            Err(e) => return (false, e.to_string()),
        };
        leg = leg.max(ed.legendre_residual().to_f64());
        fri = fri.max(ed.fricke_residual().map(|f| f.to_f64()).unwrap_or(f64::INFINITY));
        let f = sv_elliptic_matrix(&ed.tau, &ed.lambda, P).unwrap();
        let s = sv_from_period_matrix(&ed.period_matrix()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                sv = sv.max(rel(&f[i][j], &s[i][j]));
            }
        }
    }
    let ok = leg < 1e-20 && fri < 1e-10 && sv < 1e-10;
    (ok, format!("10 curves: Legendre {leg:.1e}, Fricke {fri:.1e}, sv vs conj(P)^-1 P {sv:.1e}"))
}

fn modular_laws(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let one = cx(P, 1.0, 0.0);
    let weights = [[(1, -1), (-1, -1)], [(1, 1), (-1, 1)]];
    let (mut fw, mut pw) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let g = Sl2z::random(&mut rng, 20);
        let tau = random_tau(&mut rng);
        let tg = g.act(&tau);
        let f = sv_elliptic_matrix(&tau, &one, P).unwrap();
        let fg = sv_elliptic_matrix(&tg, &one, P).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let (r, s) = weights[i][j];
                let want = Complex::with_val(P, &f[i][j] * weight_factor(&g, &tau, -r, -s));
                fw = fw.max(rel(&fg[i][j], &want));
            }
        }
        let mut pt = || Complex::with_val(P, &tau * rng.gen_range(0.05..0.95)) + rng.gen_range(0.05..0.95);
        let (z1, z2) = (pt(), pt());
        let jf = g.automorphy(&tau);
        let (w1, w2) = (Complex::with_val(P, &z1 / &jf), Complex::with_val(P, &z2 / &jf));
        for pair in [sv_incomplete_pair_displayed, sv_incomplete_pair] {
            let (a, b) = pair(&tau, &z1, &z2, &one, P).unwrap();
            let (ag, bg) = pair(&tg, &w1, &w2, &one, P).unwrap();
            pw = pw.max(rel(&ag, &Complex::with_val(P, &a / &jf)));
            pw = pw.max(rel(&bg, &Complex::with_val(P, &b * &jf)));
        }
    }
    (fw < 1e-8 && pw < 1e-8, format!("25 elements of SL2(Z): f_ij {fw:.1e}, (f31, f32) {pw:.1e}"))
}

fn single_valued_examples(_: u64) -> (bool, String) {
    let s = sv_from_period_matrix(&log_period_matrix(&cx(P, 3.0, 0.0), P)).unwrap();
    let log3 = Complex::with_val(P, Float::with_val(P, 3).ln() * 2u32);
    let e_log = d(&s[1][0], &log3);
    let x = cx(P, 0.5, 0.0);
    let s = sv_from_period_matrix(&dilog_period_matrix(&x, P).unwrap()).unwrap();
    let bw = Complex::with_val(P, (Float::with_val(P, 0), bloch_wigner(&x).unwrap() * 2u32));
    let e_bw = d(&s[2][0], &bw);
    let ok = e_log < 1e-10 && e_bw < 1e-10;
    (
        ok,
        format!(
            "2 log|3|: error {e_log:.1e}; dilog at 1/2: lower-left {:.12} + {:.12}i vs 2i D(1/2) = {:.12}i, error {e_bw:.1e}",
            s[2][0].real().to_f64(),
            s[2][0].imag().to_f64(),
            bw.imag().to_f64()
        ),
    )
}

fn weight0(_: u64) -> (bool, String) {
    match weight0_check(None) {
        Ok(w) => (w.holds, format!("restriction ({}) dv / ({})", w.numerator.to_canonical(), w.denominator.to_canonical())),
        Err(e) => (false, e.to_string()),
    }
}

fn eichler_suite(_: u64) -> (bool, String) {
    let tau = cx(P, 0.5, 1.0);
    let delta = QExpansion::ramanujan_delta(40, P);
    let other = QExpansion::from_integers(&[1, 240, 2160, 6720, 17520], 12, P);
    let (ca, cb) = (cx(P, 2.0, -1.0), cx(P, 0.5, 3.0));
    let mut lin: f64 = 0.0;
    for j in [0u32, 1, 5, 10] {
        let lhs = eichler_integral(&delta.scale(&ca).add(&other.scale(&cb)), &tau, j, P).unwrap().value;
        let rhs = eichler_integral(&delta, &tau, j, P).unwrap().value * &ca
            + eichler_integral(&other, &tau, j, P).unwrap().value * &cb;
        lin = lin.max(rel(&lhs, &rhs));
    }
    let mut der: f64 = 0.0;
    let h = 1e-5;
    for f in [&delta, &other] {
        let fd = (eichler_integral(f, &(tau.clone() + h), 1, P).unwrap().value
            - eichler_integral(f, &(tau.clone() - h), 1, P).unwrap().value)
            / (2.0 * h);
        let want = -eichler_integral(f, &tau, 0, P).unwrap().value;
        der = der.max(d(&fd, &want) / abs_f64(&want));
    }
    let t2 = cx(P, 0.1, 0.9);
    let a = eichler_integral(&QExpansion::ramanujan_delta(30, P), &t2, 4, P).unwrap().value;
    let b = eichler_integral(&QExpansion::ramanujan_delta(60, P), &t2, 4, P).unwrap().value;
    let trunc = d(&a, &b);
    let ok = lin < 1e-25 && der < 1e-6 && trunc < 1e-10;
    (ok, format!("linearity {lin:.1e}, derivative law {der:.1e}, truncation 30 -> 60 {trunc:.1e}"))
}
