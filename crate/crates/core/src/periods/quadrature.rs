//! Quadrature of projective integrands `N Omega / (Psi^a Xi^b)` over the
//! positive simplex, in the chart `alpha_N = 1` with `alpha_i = t_i/(1-t_i)`.
//!
//! The simplex carries the orientation for which `Omega` is positive, so the
//! value is the Lebesgue integral of `N / (Psi^a Xi^b)` over `alpha_N = 1`.

use std::cell::Cell;

use rayon::prelude::*;

use super::{PeriodError, Result};
use crate::graph::{self, KinematicPoint};
use crate::integrand::{OmegaKind, ProjForm};
use crate::MPoly;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
}

struct Compiled {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compiled {
    fn new(p: &MPoly, n: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            if m.0[n..].iter().any(|&e| e != 0) {
                return Err(PeriodError::Invalid(format!("kinematic symbol left unspecialized in {p}")));
            }
            let c = num_traits::ToPrimitive::to_f64(c).ok_or_else(|| PeriodError::Invalid("coefficient".into()))?;
            let pw = m.0[..n].iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as i32)).collect();
            terms.push((c, pw));
        }
        Ok(Compiled { terms })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e))).sum()
    }
}

struct Integrand {
    n: usize,
    num: Compiled,
    psi: Compiled,
    xi: Compiled,
    a: i32,
    b: i32,
}

impl Integrand {
    /// Density on the unit cube; `None` if a denominator is not positive.
    fn density(&self, t: &[f64]) -> Option<f64> {
        let mut x = Vec::with_capacity(self.n);
        let mut jac = 1.0;
        for &ti in t {
            let s = 1.0 - ti;
            if s <= 0.0 {
                return Some(0.0);
            }
            x.push(ti / s);
            jac /= s * s;
        }
        x.push(1.0);
        let psi = self.psi.eval(&x);
        let xi = self.xi.eval(&x);
        if !(psi > 0.0 && xi > 0.0) {
            return None;
        }
        let v = self.num.eval(&x) / (psi.powi(self.a) * xi.powi(self.b)) * jac;
        Some(if v.is_finite() { v } else { 0.0 })
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    inner: f64,
}

/// Kronrod 15 / Gauss 7 on `[a, b]`. The integrand returns a value and the
/// error already made in computing it; those errors are integrated with the
/// Kronrod weights.
fn gk15<F: Fn(f64) -> (f64, f64)>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut inner = 0.0;
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..15 {
        let (x, w) = if i < 7 { (c - h * XGK[i], WGK[i]) } else if i == 7 { (c, WGK[7]) } else { (c + h * XGK[14 - i], WGK[14 - i]) };
        let (v, e) = f(x);
        k += w * v;
        inner += w * e;
        let gi = if i <= 7 { i } else { 14 - i };
        if gi % 2 == 1 {
            g += WG[gi / 2] * v;
        } else if gi == 7 {
            g += WG[3] * v;
        }
    }
    Piece { a, b, value: k * h, error: ((k - g) * h).abs(), inner: inner * h.abs() }
}

/// Globally adaptive bisection until the summed rule error is below `tol`.
/// Bisection cannot reduce the inner errors, so they only enter the reported
/// total.
fn adaptive<F: Fn(f64) -> (f64, f64)>(f: &F, a: f64, b: f64, tol: f64, max_pieces: usize) -> (f64, f64) {
    let mut pieces = vec![gk15(f, a, b)];
    let total = |ps: &[Piece]| ps.iter().map(|p| p.error + p.inner).sum::<f64>();
    loop {
        let rule: f64 = pieces.iter().map(|p| p.error).sum();
        if rule <= tol || pieces.len() >= max_pieces {
            return (pieces.iter().map(|p| p.value).sum(), total(&pieces));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let p = pieces.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            pieces.push(p);
            return (pieces.iter().map(|p| p.value).sum(), total(&pieces));
        }
        pieces.push(gk15(f, p.a, m));
        pieces.push(gk15(f, m, p.b));
    }
}

struct Stats {
    evals: Cell<u64>,
    bad: Cell<bool>,
}

fn nested(f: &Integrand, prefix: &[f64], boxes: &[(f64, f64)], tol: f64, st: &Stats) -> (f64, f64) {
    let depth = prefix.len();
    let (lo, hi) = boxes[depth];
    let last = depth + 1 == boxes.len();
    let g = |t: f64| {
        let mut p = prefix.to_vec();
        p.push(t);
        if last {
            st.evals.set(st.evals.get() + 1);
            match f.density(&p) {
                Some(v) => (v, 0.0),
                None => {
                    st.bad.set(true);
                    (0.0, 0.0)
                }
            }
        } else {
            nested(f, &p, boxes, tol * 0.5, st)
        }
    };
    adaptive(&g, lo, hi, tol, 400)
}

fn integrate_once(f: &Integrand, tol: f64) -> Result<QuadratureResult> {
    let dim = f.n - 1;
    let sectors: Vec<Vec<(f64, f64)>> = (0..1usize << dim)
        .map(|mask| (0..dim).map(|i| if mask >> i & 1 == 0 { (0.0, 0.5) } else { (0.5, 1.0) }).collect())
        .collect();
    let per = tol / sectors.len() as f64;
    let parts: Vec<(f64, f64, u64, bool)> = sectors
        .par_iter()
        .map(|b| {
            let st = Stats { evals: Cell::new(0), bad: Cell::new(false) };
            let (v, e) = nested(f, &[], b, per, &st);
            (v, e, st.evals.get(), st.bad.get())
        })
        .collect();
    if parts.iter().any(|p| p.3) {
        return Err(PeriodError::Quadrature("denominator not positive on the open simplex".into()));
    }
    let value: f64 = parts.iter().map(|p| p.0).sum();
    if !value.is_finite() {
        return Err(PeriodError::Quadrature("non-finite value (divergent integral?)".into()));
    }
    Ok(QuadratureResult {
        value,
        error: parts.iter().map(|p| p.1).sum(),
        evaluations: parts.iter().map(|p| p.2).sum(),
    })
}

/// Integral of `f` over the simplex at `kin`, with an error estimate below
/// `target_tol`.
///
/// The simplex is oriented by the chart `a_N = 1` and the top form is read as
/// `sum_i (-1)^i a_i da_1..^da_i..da_N`, so the value is `(-1)^N` times the
/// Lebesgue integral of the affine integrand.
pub fn simplex_quadrature(f: &ProjForm, kin: &KinematicPoint, target_tol: f64) -> Result<QuadratureResult> {
    if f.omega_kind != OmegaKind::Full {
        return Err(PeriodError::Invalid("only top-degree forms are integrated over the simplex".into()));
    }
    if !(target_tol > 0.0) {
        return Err(PeriodError::Invalid("tolerance must be positive".into()));
    }
    let f = f.normalized()?;
    let (psi, xi) = graph::symanzik_pair(&f.graph, &f.mandelstam).map_err(crate::integrand::IntegrandError::from)?;
    let n = f.graph.num_edges();
    if n < 2 {
        return Err(PeriodError::Invalid("need at least two edges".into()));
    }
    let integrand = Integrand {
        n,
        num: Compiled::new(&f.signed_numerator().specialize(kin), n)?,
        psi: Compiled::new(&psi.specialize(kin), n)?,
        xi: Compiled::new(&xi.specialize(kin), n)?,
        a: f.psi_exp,
        b: f.xi_exp,
    };
    let mut tol = target_tol / 2.0;
    let mut last = None;
    for _ in 0..4 {
        let mut r = integrate_once(&integrand, tol)?;
        if r.error <= target_tol {
            if n % 2 == 1 {
                r.value = -r.value;
            }
            return Ok(r);
        }
        last = Some(r);
        tol /= 10.0;
    }
    let r = last.expect("at least one pass");
    Err(PeriodError::Quadrature(format!("error estimate {:.3e} above target {:.3e}", r.error, target_tol)))
}
