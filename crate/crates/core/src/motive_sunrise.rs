//! Sunrise geometry: blow-up charts, the six boundary points on the cubic
//! `Xi = 0`, pole-order reduction and the coordinates of residue classes in
//! the basis `{df2..df6, res eta_G, res omega_G}`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fmt_rat;
use crate::graph::{self, KinematicPoint};
use crate::integrand::{sunrise_catalog, IntegrandError, OmegaKind, ProjForm};
use crate::polynomial::linalg::RatMatrix;
use crate::polynomial::{graded_solve, monomials_of_degree, MPoly, Monomial, PolyError, Rat, VarSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SunriseError {
    #[error("degenerate kinematics: {0}")]
    DegenerateKinematics(String),
    #[error("non-rational point: {0}")]
    NonRationalPoint(String),
    #[error("not smooth: {0}")]
    NotSmooth(String),
    #[error("unsupported form: {0}")]
    Unsupported(String),
    #[error("chart failure: {0}")]
    ChartFailure(String),
    #[error("invalid chart data: {0}")]
    InvalidChart(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
}

type Result<T> = std::result::Result<T, SunriseError>;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

// ---------------------------------------------------------------------------
// Blow-up charts

/// Affine chart of an iterated blow-up of coordinate linear subspaces of
/// `P^{n-1}`, given by a flag `I_1 < .. < I_k` of index sets and marked
/// elements `j_1, .., j_{k+1}` with `j_m` in `I_m \ I_{m-1}` (`I_{k+1}` the
/// full index set). On the chart `beta_{j_{k+1}} = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupChart {
    pub n: usize,
    pub flag: Vec<Vec<usize>>,
    pub choice: Vec<usize>,
}

impl BlowupChart {
    pub fn new(n: usize, flag: Vec<Vec<usize>>, choice: Vec<usize>) -> Result<Self> {
        let bad = |m: &str| Err(SunriseError::InvalidChart(m.to_string()));
        if choice.len() != flag.len() + 1 {
            return bad("need one marked element per flag step");
        }
        let mut prev: BTreeSet<usize> = BTreeSet::new();
        let full: Vec<usize> = (0..n).collect();
        for (m, step) in flag.iter().chain(std::iter::once(&full)).enumerate() {
            let s: BTreeSet<usize> = step.iter().copied().collect();
            if s.len() != step.len() || s.iter().any(|&i| i >= n) {
                return bad("flag step is not a subset of the index set");
            }
            if !prev.is_subset(&s) || prev.len() == s.len() {
                return bad("flag is not strictly increasing");
            }
            if m < flag.len() && s.len() == n {
                return bad("flag steps must be proper subsets");
            }
            if !s.contains(&choice[m]) || prev.contains(&choice[m]) {
                return bad("marked element outside its flag step");
            }
            prev = s;
        }
        Ok(BlowupChart { n, flag, choice })
    }

    fn steps(&self) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = self.flag.iter().map(|s| s.iter().copied().collect()).collect();
        out.push((0..self.n).collect());
        out
    }

    /// Index of the flag step where `i` first appears.
    fn level(&self, i: usize) -> usize {
        self.steps().iter().position(|s| s.contains(&i)).expect("index in full set")
    }

    /// Chart coordinates: every `beta_i` except the last marked one.
    pub fn coordinates(&self) -> Vec<usize> {
        let last = *self.choice.last().unwrap();
        (0..self.n).filter(|&i| i != last).collect()
    }

    /// Exponent of `beta_j` in the image of `alpha_i` (row `i`, column `j`);
    /// the column of the last marked element is dropped (it is set to 1).
    pub fn projection(&self) -> Vec<Vec<u32>> {
        let last = *self.choice.last().unwrap();
        (0..self.n)
            .map(|i| {
                let lvl = self.level(i);
                let mut e = vec![0u32; self.n];
                if i != self.choice[lvl] {
                    e[i] += 1;
                }
                for &j in &self.choice[lvl..] {
                    e[j] += 1;
                }
                e[last] = 0;
                e
            })
            .collect()
    }

    /// Image point in affine alpha coordinates (`beta` indexed by `0..n`,
    /// entry of the last marked element ignored).
    pub fn project(&self, beta: &[Rat]) -> Vec<Rat> {
        self.projection()
            .iter()
            .map(|e| {
                e.iter().enumerate().fold(Rat::one(), |acc, (j, &k)| acc * crate::polynomial::pow_rat(&beta[j], k))
            })
            .collect()
    }

    /// Inverse on the open set where the marked coordinates are nonzero.
    pub fn inverse(&self, alpha: &[Rat]) -> Option<Vec<Rat>> {
        if self.choice.iter().any(|&j| alpha[j].is_zero()) {
            return None;
        }
        let mut beta = vec![Rat::zero(); self.n];
        for i in 0..self.n {
            let lvl = self.level(i);
            let j = self.choice[lvl];
            beta[i] = if i == j {
                match self.choice.get(lvl + 1) {
                    Some(&nxt) => &alpha[j] / &alpha[nxt],
                    None => Rat::one(),
                }
            } else {
                &alpha[i] / &alpha[j]
            };
        }
        Some(beta)
    }

    /// Images of the alpha variables as polynomials in the chart
    /// coordinates, which are the first `n - 1` variables of `target`.
    pub fn alpha_images(&self, target: &Arc<VarSet>) -> Vec<MPoly> {
        let coords = self.coordinates();
        self.projection()
            .iter()
            .map(|e| {
                let mut m = vec![0u32; target.len()];
                for (slot, &j) in coords.iter().enumerate() {
                    m[slot] = e[j];
                }
                MPoly::from_terms(target, [(Monomial(m), Rat::one())])
            })
            .collect()
    }
}

/// All maximal charts for a building set of coordinate subspaces (given by
/// index sets). The plain chart `alpha_j = 1` is excluded whenever some
/// building-set element avoiding `j` could still be inserted.
pub fn enumerate_charts(n: usize, building: &[Vec<usize>]) -> Vec<BlowupChart> {
    let sets: Vec<BTreeSet<usize>> = building
        .iter()
        .map(|s| s.iter().copied().collect::<BTreeSet<usize>>())
        .filter(|s| !s.is_empty() && s.len() < n)
        .collect();
    let full: BTreeSet<usize> = (0..n).collect();
    let mut chains: Vec<Vec<BTreeSet<usize>>> = vec![vec![]];
    let mut frontier = chains.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for ch in &frontier {
            for s in &sets {
                let ok = ch.last().is_none_or(|l: &BTreeSet<usize>| l.is_subset(s) && l.len() < s.len());
                if ok {
                    let mut c = ch.clone();
                    c.push(s.clone());
                    next.push(c);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for ch in chains {
        let mut steps = ch.clone();
        steps.push(full.clone());
        let mut choices: Vec<Vec<usize>> = vec![vec![]];
        let mut prev = BTreeSet::new();
        for s in &steps {
            let opts: Vec<usize> = s.difference(&prev).copied().collect();
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |&j| {
                        let mut c2 = c.clone();
                        c2.push(j);
                        c2
                    })
                })
                .collect();
            prev = s.clone();
        }
        for choice in choices {
            let mut lower = BTreeSet::new();
            let maximal = steps.iter().zip(&choice).all(|(upper, &j)| {
                let blocked = sets.iter().any(|s| {
                    lower.is_subset(s) && lower.len() < s.len() && s.is_subset(upper) && s.len() < upper.len() && !s.contains(&j)
                });
                lower = upper.clone();
                !blocked
            });
            if maximal {
                let flag = ch.iter().map(|s| s.iter().copied().collect()).collect();
                out.push(BlowupChart::new(n, flag, choice).expect("enumerated chart is valid"));
            }
        }
    }
    out
}

/// The six sunrise charts `(a, b, c)` (0-based) with `alpha_a = u`,
/// `alpha_b = u v`, `alpha_c = 1`, listed so that the `k`-th one contains the
/// boundary points `P_k` and `P_{k+1}` (indices mod 6).
pub const HEXAGON: [(usize, usize, usize); 6] = [(1, 2, 0), (0, 2, 1), (2, 0, 1), (1, 0, 2), (0, 1, 2), (2, 1, 0)];

/// Chart of the blown-up triangle: the strict transform of `Xi` is
/// `Xi(u, u v, 1) / u`.
#[derive(Clone, Debug)]
pub struct SunriseChart {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub blowup: BlowupChart,
}

impl SunriseChart {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        let blowup = BlowupChart::new(3, vec![sorted(vec![a, b])], vec![a, c]).expect("sunrise chart");
        SunriseChart { a, b, c, blowup }
    }

    /// Label of the point on the exceptional divisor over vertex `e_c`.
    pub fn exceptional_label(&self) -> usize {
        2 * self.c + 1
    }

    /// Label of the point on the strict transform of `alpha_b = 0`.
    pub fn line_label(&self) -> usize {
        2 * ((self.b + 1) % 3 + 1)
    }

    /// Images of all sunrise variables in `target`, whose first two variables
    /// are `u, v`; kinematic symbols go to the same-named variable of
    /// `target` if present and to zero otherwise.
    pub fn images(&self, src: &Arc<VarSet>, target: &Arc<VarSet>) -> Vec<MPoly> {
        let mut alpha = self.blowup.alpha_images(target).into_iter();
        // blowup coordinates come in increasing index order; relabel so that
        // `u = beta_a`, `v = beta_b`
        let raw: Vec<MPoly> = (0..3).map(|_| alpha.next().unwrap()).collect();
        let swap = self.a > self.b;
        let fix = |p: &MPoly| -> MPoly {
            if !swap {
                return p.clone();
            }
            let mut imgs: Vec<MPoly> = (0..target.len()).map(|i| MPoly::var(target, i)).collect();
            imgs.swap(0, 1);
            p.substitute(target, &imgs)
        };
        (0..src.len())
            .map(|i| {
                if i < 3 {
                    fix(&raw[i])
                } else {
                    target.index(&src.names()[i]).map_or_else(|| MPoly::zero(target), |j| MPoly::var(target, j))
                }
            })
            .collect()
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn chart_vars() -> Arc<VarSet> {
    VarSet::new(vec!["u".into(), "v".into()], 2)
}

/// Coefficient of `du ^ dv` in the pullback of
/// `Omega = sum_i (-1)^(i-1) alpha_i d alpha_1..^..d alpha_3`.
fn omega_pullback(images: &[MPoly]) -> MPoly {
    let t = images[0].vars().clone();
    let wedge = |p: &MPoly, q: &MPoly| &(&p.partial(0) * &q.partial(1)) - &(&p.partial(1) * &q.partial(0));
    let mut acc = MPoly::zero(&t);
    for i in 0..3 {
        let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        let term = &images[i] * &wedge(&images[rest[0]], &images[rest[1]]);
        acc = if i % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn u_mono(k: u32) -> Monomial {
    Monomial(vec![k, 0])
}

// ---------------------------------------------------------------------------
// The specialised cubic and its boundary points

/// `Xi` of the sunrise at a kinematic point, after the genericity checks.
#[derive(Clone, Debug)]
pub struct SunriseCubic {
    pub kin: KinematicPoint,
    pub masses: [Rat; 3],
    pub q: Rat,
    pub psi: MPoly,
    pub xi: MPoly,
}

impl SunriseCubic {
    pub fn new(kin: &KinematicPoint) -> Result<Self> {
        let g = graph::FeynmanGraph::sunrise();
        let (psi, xi) = graph::symanzik_pair(&g, &graph::MandelstamDictionary::sunrise()).map_err(IntegrandError::from)?;
        let get = |s: &str| {
            kin.get(s).cloned().ok_or_else(|| SunriseError::DegenerateKinematics(format!("missing value for {s}")))
        };
        let masses = [get("m1^2")?, get("m2^2")?, get("m3^2")?];
        let q = get("q1^2")?;
        if masses.iter().any(Zero::is_zero) {
            return Err(SunriseError::DegenerateKinematics("vanishing mass".into()));
        }
        let cubic = SunriseCubic { kin: kin.clone(), masses, q, psi: psi.specialize(kin), xi: xi.specialize(kin) };
        if !cubic.is_smooth()? {
            return Err(SunriseError::DegenerateKinematics("the cubic is singular".into()));
        }
        Ok(cubic)
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        self.xi.vars()
    }

    pub fn gradient(&self) -> Vec<MPoly> {
        (0..3).map(|i| self.xi.partial(i)).collect()
    }

    pub fn xyz(&self) -> MPoly {
        MPoly::from_terms(self.vars(), [(alpha_monomial(self.vars(), [1, 1, 1]), Rat::one())])
    }

    /// The Jacobian ideal contains every quartic (finite colength), and
    /// every cubic is `c * a1 a2 a3` plus an element of it.
    pub fn is_smooth(&self) -> Result<bool> {
        let grad = self.gradient();
        for (degree, comp) in [(4, vec![]), (3, vec![self.xyz()])] {
            for m in monomials_of_degree(self.vars().len(), &[0, 1, 2], degree) {
                let t = MPoly::from_terms(self.vars(), [(m, Rat::one())]);
                if graded_solve(&t, &grad, &comp, degree, &self.kin)?.residual {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Strict transform `Xi(u, u v, 1) / u` in a chart.
    pub fn strict_transform(&self, ch: &SunriseChart) -> MPoly {
        let t = chart_vars();
        let pulled = self.xi.substitute(&t, &ch.images(self.vars(), &t));
        pulled.div_monomial(&u_mono(1)).expect("Xi vanishes on the exceptional divisor")
    }
}

fn alpha_monomial(vars: &Arc<VarSet>, e: [u32; 3]) -> Monomial {
    let mut m = vec![0; vars.len()];
    m[..3].copy_from_slice(&e);
    Monomial(m)
}

/// Component of the boundary divisor containing a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryDivisor {
    /// Exceptional divisor over the vertex `e_c` (0-based).
    Exceptional(usize),
    /// Strict transform of the line `alpha_b = 0` (0-based).
    Line(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePoint {
    /// `1..=6`.
    pub label: usize,
    pub divisor: BoundaryDivisor,
    /// Chart `(a, b, c)` (0-based) whose coordinates are recorded.
    pub chart: (usize, usize, usize),
    pub u: Rat,
    pub v: Rat,
    /// Image in `P^2`.
    pub projective: [Rat; 3],
}

impl CurvePoint {
    pub fn to_json(&self) -> Value {
        let div = match self.divisor {
            BoundaryDivisor::Exceptional(c) => json!({"exceptional": c + 1}),
            BoundaryDivisor::Line(b) => json!({"line": b + 1}),
        };
        json!({
            "label": format!("P{}", self.label),
            "divisor": div,
            "chart": [self.chart.0 + 1, self.chart.1 + 1, self.chart.2 + 1],
            "uv": [fmt_rat(&self.u), fmt_rat(&self.v)],
            "projective": self.projective.iter().map(fmt_rat).collect::<Vec<_>>(),
        })
    }
}

/// The root of `p(t)` where `p` is linear in its single variable `slot`
/// after the other chart coordinate has been set to zero.
fn linear_root(p: &MPoly, slot: usize) -> Result<Rat> {
    let other = 1 - slot;
    let mut coeffs: Vec<Rat> = Vec::new();
    for (m, c) in p.terms() {
        if m.0[other] != 0 {
            continue;
        }
        let k = m.0[slot] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rat::zero());
        }
        coeffs[k] += c;
    }
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    match coeffs.len() {
        2 => Ok(-&coeffs[0] / &coeffs[1]),
        0 | 1 => Err(SunriseError::DegenerateKinematics("boundary component contained in or missing the cubic".into())),
        _ => Err(SunriseError::NonRationalPoint(format!("intersection of degree {}", coeffs.len() - 1))),
    }
}

fn restrict(p: &MPoly, slot: usize, value: &Rat) -> MPoly {
    let t = p.vars().clone();
    let mut imgs: Vec<MPoly> = (0..t.len()).map(|i| MPoly::var(&t, i)).collect();
    imgs[slot] = MPoly::constant(&t, value.clone());
    p.substitute(&t, &imgs)
}

fn eval_uv(p: &MPoly, u: &Rat, v: &Rat) -> Rat {
    p.eval(&[u.clone(), v.clone()])
}

/// The six points where the strict transform of the cubic meets the
/// boundary of the blown-up triangle, labelled around the hexagon.
pub fn boundary_points(kin: &KinematicPoint) -> Result<Vec<CurvePoint>> {
    let cubic = SunriseCubic::new(kin)?;
    boundary_points_of(&cubic)
}

fn boundary_points_of(cubic: &SunriseCubic) -> Result<Vec<CurvePoint>> {
    let mut pts: Vec<Option<CurvePoint>> = vec![None; 6];
    for &(a, b, c) in &HEXAGON {
        let ch = SunriseChart::new(a, b, c);
        let xt = cubic.strict_transform(&ch);
        let ve = linear_root(&xt, 1)?;
        let ue = Rat::zero();
        let ud = linear_root(&xt, 0)?;
        let vd = Rat::zero();
        for (label, divisor, u, v) in [
            (ch.exceptional_label(), BoundaryDivisor::Exceptional(c), ue, ve),
            (ch.line_label(), BoundaryDivisor::Line(b), ud, vd),
        ] {
            if !eval_uv(&xt, &u, &v).is_zero() {
                return Err(SunriseError::ChartFailure(format!("P{label} is not on the cubic")));
            }
            if pts[label - 1].is_some() {
                continue;
            }
            let alpha = ch.blowup.project(&{
                let mut beta = vec![Rat::zero(); 3];
                beta[a] = u.clone();
                beta[b] = v.clone();
                beta
            });
            let projective = match divisor {
                BoundaryDivisor::Exceptional(c) => {
                    let mut e = [Rat::zero(), Rat::zero(), Rat::zero()];
                    e[c] = Rat::one();
                    e
                }
                BoundaryDivisor::Line(_) => [alpha[0].clone(), alpha[1].clone(), alpha[2].clone()],
            };
            pts[label - 1] = Some(CurvePoint { label, divisor, chart: (a, b, c), u, v, projective });
        }
    }
    let pts: Vec<CurvePoint> = pts.into_iter().map(|p| p.expect("every label is reached")).collect();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let same_vertex = matches!((p.divisor, q.divisor), (BoundaryDivisor::Line(_), BoundaryDivisor::Line(_)))
                && proj_eq(&p.projective, &q.projective);
            if same_vertex {
                return Err(SunriseError::DegenerateKinematics(format!("P{} = P{}", p.label, q.label)));
            }
        }
        if let BoundaryDivisor::Line(_) = p.divisor {
            if p.projective.iter().filter(|x| x.is_zero()).count() > 1 {
                return Err(SunriseError::DegenerateKinematics(format!("P{} is a blown-up vertex", p.label)));
            }
        }
    }
    Ok(pts)
}

fn proj_eq(x: &[Rat; 3], y: &[Rat; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| &x[i] * &y[j] == &x[j] * &y[i]))
}

// ---------------------------------------------------------------------------
// Pole-order reduction

/// `N = c_eta * a1 a2 a3 + sum_j B_j d_j Xi`, so that
/// `N Omega / Xi^2 = c_eta a1a2a3 Omega / Xi^2 + c_omega Omega / Xi + exact`
/// with `c_omega = sum_j d_j B_j`.
#[derive(Clone, Debug)]
pub struct GriffithsReduction {
    pub c_eta: Rat,
    pub c_omega: Rat,
    /// Linear multipliers `B_j` (empty for pole order 1).
    pub b: Vec<MPoly>,
    /// Specialised signed numerator over `Xi^pole_order`.
    pub numerator: MPoly,
    pub pole_order: i32,
}

impl GriffithsReduction {
    /// Re-expand the decomposition.
    pub fn verify(&self, cubic: &SunriseCubic) -> bool {
        if self.pole_order == 1 {
            return self.numerator == MPoly::constant(cubic.vars(), self.c_omega.clone());
        }
        let mut acc = cubic.xyz().scale(&self.c_eta);
        for (bj, g) in self.b.iter().zip(cubic.gradient()) {
            acc = acc + bj * &g;
        }
        let div = self.b.iter().enumerate().fold(Rat::zero(), |s, (j, bj)| s + bj.partial(j).constant_term());
        acc == self.numerator && div == self.c_omega
    }
}

fn check_sunrise_form(f: &ProjForm) -> Result<ProjForm> {
    if f.graph.num_edges() != 3 || f.graph.loop_number() != 2 {
        return Err(SunriseError::Unsupported("form does not live on the sunrise".into()));
    }
    if f.omega_kind != OmegaKind::Full {
        return Err(SunriseError::Unsupported("only forms on Omega are reduced".into()));
    }
    let f = f.normalized()?;
    if f.psi_exp != 0 {
        return Err(SunriseError::Unsupported("Psi in the denominator".into()));
    }
    if !(1..=2).contains(&f.xi_exp) {
        return Err(SunriseError::Unsupported(format!("pole order {}", f.xi_exp)));
    }
    Ok(f)
}

fn to_cubic_vars(p: &MPoly, cubic: &SunriseCubic) -> Result<MPoly> {
    Ok(p.specialize(&cubic.kin).embed(cubic.vars())?)
}

pub fn griffiths_reduce(f: &ProjForm, kin: &KinematicPoint) -> Result<GriffithsReduction> {
    let cubic = SunriseCubic::new(kin)?;
    reduce_on(f, &cubic)
}

fn reduce_on(f: &ProjForm, cubic: &SunriseCubic) -> Result<GriffithsReduction> {
    let f = check_sunrise_form(f)?;
    let num = to_cubic_vars(&f.signed_numerator(), cubic)?;
    if num.terms().any(|(m, _)| m.0[3..].iter().any(|&e| e > 0)) {
        return Err(SunriseError::DegenerateKinematics("kinematic symbol left unspecified".into()));
    }
    if f.xi_exp == 1 {
        if num.total_degree().unwrap_or(0) != 0 {
            return Err(SunriseError::Unsupported("pole order 1 needs a constant numerator".into()));
        }
        return Ok(GriffithsReduction {
            c_eta: Rat::zero(),
            c_omega: num.constant_term(),
            b: vec![],
            numerator: num,
            pole_order: 1,
        });
    }
    let sol = graded_solve(&num, &cubic.gradient(), &[cubic.xyz()], 3, &cubic.kin)?;
    if sol.residual {
        return Err(SunriseError::NotSmooth("numerator outside Jacobian ideal + a1a2a3".into()));
    }
    let c_omega = sol.combination.iter().enumerate().fold(Rat::zero(), |s, (j, bj)| s + bj.partial(j).constant_term());
    Ok(GriffithsReduction {
        c_eta: sol.complement[0].clone(),
        c_omega,
        b: sol.combination,
        numerator: num,
        pole_order: 2,
    })
}

// ---------------------------------------------------------------------------
// Residue coordinates

/// Exactness data in one chart: `d((P du + Q dv) / Xt) = M du dv / Xt^2`.
#[derive(Clone, Debug)]
pub struct ChartWitness {
    pub chart: (usize, usize, usize),
    /// `(exceptional label, line label)`.
    pub labels: (usize, usize),
    pub numerator: MPoly,
    pub strict_transform: MPoly,
    pub p: MPoly,
    pub q: MPoly,
    /// Residues of the potential at the two labelled points.
    pub residues: (Rat, Rat),
}

impl ChartWitness {
    pub fn verify(&self) -> bool {
        let xt = &self.strict_transform;
        let lhs = &(&(&self.q.partial(0) - &self.p.partial(1)) * xt) - &(&(&xt.partial(0) * &self.q) - &(&xt.partial(1) * &self.p));
        lhs == self.numerator
    }
}

#[derive(Clone, Debug)]
pub struct ResidueDecomposition {
    /// Coordinates in `{df2..df6, res eta_G, res omega_G}`.
    pub a: [Rat; 7],
    pub reduction: GriffithsReduction,
    pub eta_reduction: GriffithsReduction,
    pub charts: Vec<ChartWitness>,
    /// Boundary potential at `P1..P6`, normalised by `g_1 = 0`.
    pub potentials: [Rat; 6],
    /// The potential obtained around the hexagon agrees in the closing chart.
    pub cycle_closes: bool,
}

impl ResidueDecomposition {
    /// Re-check every identity of the witness.
    pub fn verify(&self, kin: &KinematicPoint) -> bool {
        let Ok(cubic) = SunriseCubic::new(kin) else {
            return false;
        };
        self.reduction.verify(&cubic)
            && self.eta_reduction.verify(&cubic)
            && self.charts.iter().all(ChartWitness::verify)
            && self.cycle_closes
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a.iter().map(fmt_rat).collect::<Vec<_>>(),
            "potentials": self.potentials.iter().map(fmt_rat).collect::<Vec<_>>(),
            "c_eta": fmt_rat(&self.reduction.c_eta),
            "c_omega": fmt_rat(&self.reduction.c_omega),
            "B": self.reduction.b.iter().map(MPoly::to_canonical).collect::<Vec<_>>(),
            "cycle_closes": self.cycle_closes,
        })
    }
}

/// Monomials in `u, v` of total degree `<= d`.
fn chart_monomials(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=d {
        for i in 0..=k {
            out.push(Monomial(vec![i, k - i]));
        }
    }
    out
}

/// Solve `(Q_u - P_v) Xt - Xt_u Q + Xt_v P = M` with `deg P, Q <= d`.
fn solve_potential(m: &MPoly, xt: &MPoly, d: u32) -> Option<(MPoly, MPoly)> {
    let t = xt.vars().clone();
    let basis = chart_monomials(d);
    let (xu, xv) = (xt.partial(0), xt.partial(1));
    let mut cols: Vec<MPoly> = Vec::new();
    for mono in &basis {
        let b = MPoly::from_terms(&t, [(mono.clone(), Rat::one())]);
        cols.push(&(&xv * &b) - &(&b.partial(1) * xt));
    }
    for mono in &basis {
        let b = MPoly::from_terms(&t, [(mono.clone(), Rat::one())]);
        cols.push(&(&b.partial(0) * xt) - &(&xu * &b));
    }
    let mut rows: BTreeSet<Monomial> = m.terms().map(|(k, _)| k.clone()).collect();
    for c in &cols {
        rows.extend(c.terms().map(|(k, _)| k.clone()));
    }
    let rows: Vec<Monomial> = rows.into_iter().collect();
    let index: std::collections::BTreeMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut a = RatMatrix::zeros(rows.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (k, v) in c.terms() {
            a.set(index[k], j, v.clone());
        }
    }
    let rhs: Vec<Rat> = rows.iter().map(|k| m.coeff(k)).collect();
    let x = a.solve(&rhs)?;
    let n = basis.len();
    let p = MPoly::from_terms(&t, basis.iter().cloned().zip(x[..n].iter().cloned()));
    let q = MPoly::from_terms(&t, basis.iter().cloned().zip(x[n..].iter().cloned()));
    Some((p, q))
}

const MAX_POTENTIAL_DEGREE: u32 = 6;

fn chart_witness(cubic: &SunriseCubic, global: &MPoly, ch: &SunriseChart, pts: &[CurvePoint]) -> Result<ChartWitness> {
    let t = chart_vars();
    let imgs = ch.images(cubic.vars(), &t);
    let xt = cubic.strict_transform(ch);
    let pulled = &global.substitute(&t, &imgs) * &omega_pullback(&imgs);
    let m = pulled
        .div_monomial(&u_mono(2))
        .ok_or_else(|| SunriseError::ChartFailure("pullback has a pole along the exceptional divisor".into()))?;
    let (p, q) = (1..=MAX_POTENTIAL_DEGREE)
        .find_map(|d| solve_potential(&m, &xt, d))
        .ok_or_else(|| SunriseError::ChartFailure(format!("no polynomial potential in chart {:?}", (ch.a, ch.b, ch.c))))?;
    let (le, ld) = (ch.exceptional_label(), ch.line_label());
    let pe = &pts[le - 1];
    let pd = &pts[ld - 1];
    let den_e = eval_uv(&xt.partial(1), &pe.u, &pe.v);
    let den_d = eval_uv(&xt.partial(0), &pd.u, &pd.v);
    if den_e.is_zero() || den_d.is_zero() {
        return Err(SunriseError::ChartFailure("cubic tangent to the boundary".into()));
    }
    let r_e = eval_uv(&restrict(&q, 0, &Rat::zero()), &pe.u, &pe.v) / den_e;
    let r_d = eval_uv(&restrict(&p, 1, &Rat::zero()), &pd.u, &pd.v) / den_d;
    Ok(ChartWitness {
        chart: (ch.a, ch.b, ch.c),
        labels: (le, ld),
        numerator: m,
        strict_transform: xt,
        p,
        q,
        residues: (r_e, r_d),
    })
}

/// Coordinates of the residue class of `f` (a form `N Omega / Xi^k`,
/// `k in {1, 2}`) in the basis `{df2..df6, res eta_G, res omega_G}`.
///
/// After subtracting `a6 eta_G + a7 omega_G` the form is exact on the
/// blown-up triangle minus the cubic; its potential restricted to the
/// boundary has residue `r_k` at `P_k`, and the boundary coordinate is
/// `g_k = r_k`, normalised by `g_1 = 0`.
pub fn residue_coordinates(f: &ProjForm, kin: &KinematicPoint) -> Result<ResidueDecomposition> {
    let cubic = SunriseCubic::new(kin)?;
    residue_coordinates_on(f, &cubic)
}

fn residue_coordinates_on(f: &ProjForm, cubic: &SunriseCubic) -> Result<ResidueDecomposition> {
    let pts = boundary_points_of(cubic)?;
    let catalog = sunrise_catalog();
    let eta = &catalog["eta_G"];
    let red = reduce_on(f, cubic)?;
    let red_eta = reduce_on(eta, cubic)?;
    if red_eta.c_eta.is_zero() {
        return Err(SunriseError::DegenerateKinematics("eta_G is exact".into()));
    }
    let a6 = &red.c_eta / &red_eta.c_eta;
    let a7 = &red.c_omega - &a6 * &red_eta.c_omega;
    let num2 = if red.pole_order == 1 { &red.numerator * &cubic.xi } else { red.numerator.clone() };
    let global = &(&num2 - &red_eta.numerator.scale(&a6)) - &cubic.xi.scale(&a7);

    let charts: Vec<ChartWitness> = HEXAGON
        .iter()
        .map(|&(a, b, c)| chart_witness(cubic, &global, &SunriseChart::new(a, b, c), &pts))
        .collect::<Result<_>>()?;
    // g_k - g_l = r_k - r_l for the two points of each chart
    let step = |w: &ChartWitness, from: usize, to: usize| -> Rat {
        let r = |label: usize| if label == w.labels.0 { w.residues.0.clone() } else { w.residues.1.clone() };
        r(to) - r(from)
    };
    let mut g: [Rat; 6] = Default::default();
    for k in 1..6 {
        g[k] = &g[k - 1] + step(&charts[k - 1], k, k + 1);
    }
    let cycle_closes = &g[0] - &g[5] == step(&charts[5], 6, 1);
    if !cycle_closes {
        return Err(SunriseError::ChartFailure("boundary potentials do not close around the hexagon".into()));
    }
    let mut a: [Rat; 7] = Default::default();
    for j in 0..5 {
        a[j] = &g[j + 1] - &g[0];
    }
    a[5] = a6;
    a[6] = a7;
    Ok(ResidueDecomposition { a, reduction: red, eta_reduction: red_eta, charts, potentials: g, cycle_closes })
}

/// Coordinates of `nu1, nu2, nu3` (or `mu1..mu3`) at one point.
pub fn basis_rows(kin: &KinematicPoint, basis: Basis) -> Result<Vec<ResidueDecomposition>> {
    let cubic = SunriseCubic::new(kin)?;
    let catalog = sunrise_catalog();
    basis.form_names().iter().map(|n| residue_coordinates_on(&catalog[*n], &cubic)).collect()
}

// ---------------------------------------------------------------------------
// Tabulated closed forms

/// Closed-form coordinates of `res nu1`, `res nu2`, `res nu3` as published,
/// in the order `{df2..df6, res eta_G, res omega_G}`. The table's fourth and
/// fifth entries are `a1 - a3` and `a2 + a3`.
pub fn tabulated_nu_coordinates(kin: &KinematicPoint) -> Result<[[Rat; 7]; 3]> {
    let cubic_kin = |s: &str| {
        kin.get(s).cloned().ok_or_else(|| SunriseError::DegenerateKinematics(format!("missing value for {s}")))
    };
    let (m1, m2, m3, q) = (cubic_kin("m1^2")?, cubic_kin("m2^2")?, cubic_kin("m3^2")?, cubic_kin("q1^2")?);
    let r = rat;
    let dd = &(&(&(&r(3) * &m1 * &m1 - &r(2) * &m1 * &m2) - &r(2) * &m1 * &m3) + &r(2) * &m1 * &q) - &m2 * &m2;
    let dd = &(&(&(&dd + &r(2) * &m2 * &m3) - &r(2) * &m2 * &q) - &m3 * &m3) - &r(2) * &m3 * &q;
    let dd = &dd - &q * &q;
    if dd.is_zero() || m1.is_zero() || m2.is_zero() || m3.is_zero() || q.is_zero() {
        return Err(SunriseError::DegenerateKinematics("tabulated denominators vanish".into()));
    }
    let d1 = &r(2) * &m2 * &q * &dd;
    let d2 = &r(2) * &q * &dd;
    let d3 = &r(2) * &m3 * &q * &dd;
    let p = |terms: &[(i64, u32, u32, u32, u32)]| -> Rat {
        terms.iter().fold(Rat::zero(), |acc, &(c, e1, e2, e3, e4)| {
            use crate::polynomial::pow_rat;
            acc + r(c) * pow_rat(&m1, e1) * pow_rat(&m2, e2) * pow_rat(&m3, e3) * pow_rat(&q, e4)
        })
    };
    let row = |a1: Rat, a2: Rat, a3: Rat, a6: Rat, a7: Rat| -> [Rat; 7] {
        [a1.clone(), a2.clone(), a3.clone(), &a1 - &a3, &a2 + &a3, a6, a7]
    };

    let a11 = (&m1 - &m3) * (&(&(&m1 - &m2) + &m3) + &q) / (&r(2) * &d1);
    let a12 = -((&(&(&m1 - &m2) + &m3) + &q) * (&(&(&m2 - &m1) + &m3) + &q)) / &d1;
    let a13 = -Rat::one() / (&r(2) * &m2 * &q);
    let a16 = -&m1
        * p(&[
            (1, 3, 0, 0, 0), (-3, 2, 1, 0, 0), (-3, 2, 0, 1, 0), (3, 2, 0, 0, 1), (3, 1, 2, 0, 0), (2, 1, 1, 1, 0),
            (-2, 1, 1, 0, 1), (3, 1, 0, 2, 0), (-2, 1, 0, 1, 1), (3, 1, 0, 0, 2), (-1, 0, 3, 0, 0), (1, 0, 2, 1, 0),
            (-1, 0, 2, 0, 1), (1, 0, 1, 2, 0), (10, 0, 1, 1, 1), (1, 0, 1, 0, 2), (-1, 0, 0, 3, 0), (-1, 0, 0, 2, 1),
            (1, 0, 0, 1, 2), (1, 0, 0, 0, 3),
        ])
        / &d1;
    let a17 = p(&[
        (1, 3, 0, 0, 0), (-2, 2, 1, 0, 0), (-2, 2, 0, 1, 0), (2, 2, 0, 0, 1), (1, 1, 2, 0, 0), (2, 1, 1, 1, 0),
        (-2, 1, 1, 0, 1), (1, 1, 0, 2, 0), (-2, 1, 0, 1, 1), (1, 1, 0, 0, 2), (4, 0, 1, 1, 1),
    ]) / &d1;

    let a21 = (&r(2) * &m1 - &r(2) * &m3) / (&r(2) * &d2);
    let a22 = p(&[(-1, 2, 0, 0, 0), (-4, 1, 0, 0, 1), (1, 0, 2, 0, 0), (-2, 0, 1, 1, 0), (2, 0, 1, 0, 1), (1, 0, 0, 2, 0), (2, 0, 0, 1, 1), (1, 0, 0, 0, 2)])
        / (&m1 * &d2);
    let a23 = -Rat::one() / (&r(2) * &m1 * &q);
    let a26 = p(&[
        (1, 3, 0, 0, 0), (-1, 2, 1, 0, 0), (-3, 2, 0, 1, 0), (1, 2, 0, 0, 1), (-1, 1, 2, 0, 0), (-2, 1, 1, 1, 0),
        (-10, 1, 1, 0, 1), (3, 1, 0, 2, 0), (2, 1, 0, 1, 1), (-1, 1, 0, 0, 2), (1, 0, 3, 0, 0), (-3, 0, 2, 1, 0),
        (1, 0, 2, 0, 1), (3, 0, 1, 2, 0), (2, 0, 1, 1, 1), (-1, 0, 1, 0, 2), (-1, 0, 0, 3, 0), (-3, 0, 0, 2, 1),
        (-3, 0, 0, 1, 2), (-1, 0, 0, 0, 3),
    ]) / &d2;
    let a27 = -p(&[(1, 2, 0, 0, 0), (-2, 1, 0, 1, 0), (-1, 0, 2, 0, 0), (-2, 0, 1, 0, 1), (1, 0, 0, 2, 0), (-1, 0, 0, 0, 2)]) / &d2;

    let a31 = p(&[
        (2, 2, 0, 0, 0), (-1, 1, 1, 0, 0), (-1, 1, 0, 1, 0), (3, 1, 0, 0, 1), (-1, 0, 2, 0, 0), (2, 0, 1, 1, 0),
        (-2, 0, 1, 0, 1), (-1, 0, 0, 2, 0), (-2, 0, 0, 1, 1), (-1, 0, 0, 0, 2),
    ]) / (&r(2) * &d3);
    let a32 = p(&[
        (-1, 2, 0, 0, 0), (2, 1, 1, 0, 0), (-2, 1, 0, 1, 0), (2, 1, 0, 0, 1), (-1, 0, 2, 0, 0), (2, 0, 1, 1, 0),
        (-2, 0, 1, 0, 1), (-1, 0, 0, 2, 0), (-2, 0, 0, 1, 1), (-1, 0, 0, 0, 2),
    ]) / &d3;
    let a33 = -Rat::one() / (&r(2) * &m3 * &q);
    let a36 = &m1
        * p(&[
            (1, 3, 0, 0, 0), (-3, 2, 1, 0, 0), (-1, 2, 0, 1, 0), (1, 2, 0, 0, 1), (3, 1, 2, 0, 0), (-2, 1, 1, 1, 0),
            (2, 1, 1, 0, 1), (-1, 1, 0, 2, 0), (-10, 1, 0, 1, 1), (-1, 1, 0, 0, 2), (-1, 0, 3, 0, 0), (3, 0, 2, 1, 0),
            (-3, 0, 2, 0, 1), (-3, 0, 1, 2, 0), (2, 0, 1, 1, 1), (-3, 0, 1, 0, 2), (1, 0, 0, 3, 0), (1, 0, 0, 2, 1),
            (-1, 0, 0, 1, 2), (-1, 0, 0, 0, 3),
        ])
        / &d3;
    let a37 = -&m1 * p(&[(1, 2, 0, 0, 0), (-2, 1, 1, 0, 0), (1, 0, 2, 0, 0), (-1, 0, 0, 2, 0), (-2, 0, 0, 1, 1), (-1, 0, 0, 0, 2)]) / &d3;

    Ok([row(a11, a12, a13, a16, a17), row(a21, a22, a23, a26, a27), row(a31, a32, a33, a36, a37)])
}

/// Per-component comparison of computed and tabulated `nu` coordinates.
#[derive(Clone, Debug)]
pub struct TableComparison {
    pub kin: KinematicPoint,
    pub computed: [[Rat; 7]; 3],
    pub tabulated: [[Rat; 7]; 3],
    /// `component_match[i][j]` for form `i`, component `j`.
    pub component_match: [[bool; 7]; 3],
}

impl TableComparison {
    pub fn all_match(&self) -> bool {
        self.component_match.iter().all(|r| r.iter().all(|&b| b))
    }

    pub fn to_json(&self) -> Value {
        let rows = |m: &[[Rat; 7]; 3]| -> Vec<Vec<String>> { m.iter().map(|r| r.iter().map(fmt_rat).collect()).collect() };
        json!({
            "point": self.kin.to_json(),
            "match": self.all_match(),
            "a_vectors": rows(&self.computed),
            "tabulated": rows(&self.tabulated),
            "component_match": self.component_match.to_vec(),
        })
    }
}

pub fn compare_with_table(kin: &KinematicPoint) -> Result<TableComparison> {
    let rows = basis_rows(kin, Basis::Nu)?;
    let tab = tabulated_nu_coordinates(kin)?;
    let computed: [[Rat; 7]; 3] = [rows[0].a.clone(), rows[1].a.clone(), rows[2].a.clone()];
    let mut component_match = [[false; 7]; 3];
    for i in 0..3 {
        for j in 0..7 {
            component_match[i][j] = computed[i][j] == tab[i][j];
        }
    }
    Ok(TableComparison { kin: kin.clone(), computed, tabulated: tab, component_match })
}

// ---------------------------------------------------------------------------
// Duality

/// The rational coefficient matrix published for the `mu` basis; entry
/// `(k, i)` is `b'_{i,k}`.
pub fn mu_dual_table() -> [[Rat; 3]; 5] {
    let q = |n: i64, d: i64| Rat::new(n.into(), d.into());
    [
        [q(1, 6), q(7, 24), q(-5, 24)],
        [q(1, 6), q(-11, 24), q(1, 24)],
        [q(0, 1), q(1, 4), q(1, 4)],
        [q(1, 6), q(1, 24), q(-11, 24)],
        [q(1, 6), q(-5, 24), q(7, 24)],
    ]
}

#[derive(Clone, Debug)]
pub struct DualCoefficients {
    /// `b[i][k]`, `k = 0..5` (`b_{i,6} = b_{i,7} = 0`).
    pub b: Vec<[Rat; 5]>,
    /// `products[j][i] = sum_k a_{j,k} b_{i,k}`.
    pub products: Vec<Vec<Rat>>,
    pub certificate: bool,
    /// Dimension of the solution space of each dual functional.
    pub nullity: usize,
}

impl DualCoefficients {
    pub fn to_json(&self) -> Value {
        json!({
            "b": self.b.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "certificate": self.certificate,
            "nullity": self.nullity,
        })
    }
}

fn df_block(rows: &[[Rat; 7]]) -> RatMatrix {
    RatMatrix::from_rows(&rows.iter().map(|r| r[..5].to_vec()).collect::<Vec<_>>())
}

/// Products `sum_k a_{j,k} b_{i,k}`, `j` over the rows, `i` over the columns of `b`.
pub fn duality_products(rows: &[[Rat; 7]], b: &[[Rat; 5]]) -> Vec<Vec<Rat>> {
    rows.iter()
        .map(|r| b.iter().map(|bi| (0..5).fold(Rat::zero(), |s, k| s + &r[k] * &bi[k])).collect())
        .collect()
}

fn is_identity(p: &[Vec<Rat>]) -> bool {
    p.iter().enumerate().all(|(j, row)| row.iter().enumerate().all(|(i, x)| *x == if i == j { Rat::one() } else { Rat::zero() }))
}

/// Dual functionals `xi_i` with `xi_i(res f_j) = delta_ij`, `xi_i(res eta_G) =
/// xi_i(res omega_G) = 0`: the row-space (least-norm) solution.
pub fn dual_coefficients(rows: &[[Rat; 7]]) -> Result<DualCoefficients> {
    let a = df_block(rows);
    let n = rows.len();
    if a.rank() < n {
        return Err(SunriseError::DegenerateKinematics("coordinate block is rank deficient".into()));
    }
    let x = a
        .row_space_solve(&RatMatrix::identity(n))
        .ok_or_else(|| SunriseError::DegenerateKinematics("singular Gram matrix".into()))?;
    let b: Vec<[Rat; 5]> = (0..n).map(|i| std::array::from_fn(|k| x.get(k, i).clone())).collect();
    let products = duality_products(rows, &b);
    let certificate = is_identity(&products);
    Ok(DualCoefficients { b, products, certificate, nullity: 5 - n })
}

/// Whether a `5 x 3` matrix (entry `(k, i)` = `b_{i,k}`) is dual to the rows.
pub fn check_duality(rows: &[[Rat; 7]], table: &[[Rat; 3]; 5]) -> (bool, Vec<Vec<Rat>>) {
    let b: Vec<[Rat; 5]> = (0..3).map(|i| std::array::from_fn(|k| table[k][i].clone())).collect();
    let p = duality_products(rows, &b);
    (is_identity(&p), p)
}

// ---------------------------------------------------------------------------
// Coaction table

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Nu,
    Mu,
}

impl Basis {
    pub fn form_names(self) -> [&'static str; 3] {
        match self {
            Basis::Nu => ["nu1", "nu2", "nu3"],
            Basis::Mu => ["mu1", "mu2", "mu3"],
        }
    }

    pub fn parse(s: &str) -> Option<Basis> {
        match s {
            "nu" => Some(Basis::Nu),
            "mu" => Some(Basis::Mu),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Nu => "nu",
            Basis::Mu => "mu",
        }
    }
}

/// De Rham side labels, in the order of the coefficient vectors.
pub const DE_RHAM_BASIS: [&str; 8] = ["K1*L", "K2eta*L", "F(P1,P2)*L", "F(P1,P3)*L", "F(P1,P4)*L", "F(P1,P5)*L", "F(P1,P6)*L", "I_dr(G,G\\e3)"];

#[derive(Clone, Debug)]
pub struct CoactionRow {
    pub motivic: String,
    /// Argument of a motivic logarithm.
    pub log_argument: Option<Rat>,
    pub de_rham: [Rat; 8],
}

#[derive(Clone, Debug)]
pub struct CoactionTable {
    pub basis: Basis,
    pub rows: Vec<CoactionRow>,
    /// Rows whose motivic side is `log(1)` and which therefore drop out.
    pub dropped: Vec<CoactionRow>,
    pub reduced: bool,
    pub duality: DualCoefficients,
}

impl CoactionTable {
    pub fn to_json(&self) -> Value {
        let row = |r: &CoactionRow| {
            json!({
                "motivic": r.motivic,
                "log_argument": r.log_argument.as_ref().map(fmt_rat),
                "de_rham": r.de_rham.iter().map(fmt_rat).collect::<Vec<_>>(),
            })
        };
        json!({
            "basis": self.basis.name(),
            "de_rham_basis": DE_RHAM_BASIS,
            "rows": self.rows.iter().map(row).collect::<Vec<_>>(),
            "dropped": self.dropped.iter().map(row).collect::<Vec<_>>(),
            "reduced": self.reduced,
            "duality": self.duality.to_json(),
        })
    }
}

fn unit8(i: usize) -> [Rat; 8] {
    std::array::from_fn(|k| if k == i { Rat::one() } else { Rat::zero() })
}

pub fn coaction_table(kin: &KinematicPoint, basis: Basis) -> Result<CoactionTable> {
    let cubic = SunriseCubic::new(kin)?;
    let catalog = sunrise_catalog();
    let rows: Vec<[Rat; 7]> = basis
        .form_names()
        .iter()
        .map(|n| residue_coordinates_on(&catalog[*n], &cubic).map(|d| d.a))
        .collect::<Result<_>>()?;
    let duality = dual_coefficients(&rows)?;
    let mut out = vec![
        CoactionRow { motivic: "I_G".into(), log_argument: None, de_rham: unit8(0) },
        CoactionRow { motivic: "I_{G_s(e1)}".into(), log_argument: None, de_rham: unit8(1) },
        CoactionRow { motivic: "I_{G\\e3}".into(), log_argument: None, de_rham: unit8(7) },
    ];
    let [m1, m2, m3] = cubic.masses.clone();
    let labels: [(String, Option<Rat>); 3] = match basis {
        Basis::Nu => [
            ("I_{G_s(e1,e2^2)}".into(), None),
            ("I_{G_s(e1^2,e3)}".into(), None),
            ("I_{G_s(e2,e3^2)}".into(), None),
        ],
        Basis::Mu => [
            ("log(m3^2/m2^2)".into(), Some(&m3 / &m2)),
            ("log(m1^2/m3^2)".into(), Some(&m1 / &m3)),
            ("log(m2^2/m1^2)".into(), Some(&m2 / &m1)),
        ],
    };
    let mut dropped = Vec::new();
    for ((motivic, log_argument), b) in labels.into_iter().zip(&duality.b) {
        let mut de_rham: [Rat; 8] = Default::default();
        de_rham[2..7].clone_from_slice(b);
        let row = CoactionRow { motivic, log_argument, de_rham };
        if row.log_argument.as_ref().is_some_and(One::is_one) {
            dropped.push(row);
        } else {
            out.push(row);
        }
    }
    let reduced = !dropped.is_empty();
    Ok(CoactionTable { basis, rows: out, dropped, reduced, duality })
}

// ---------------------------------------------------------------------------
// Weight-zero form

/// Restriction of `pi^* omega0` to the exceptional divisor of the chart
/// `alpha1 = u, alpha2 = u v, alpha3 = 1`: `numerator dv / denominator`.
#[derive(Clone, Debug)]
pub struct Weight0Witness {
    pub numerator: MPoly,
    pub denominator: MPoly,
    /// The `du` part on `u = 0` (zero when the restriction is a multiple of `dv`).
    pub du_part: MPoly,
    pub holds: bool,
}

impl Weight0Witness {
    pub fn to_json(&self) -> Value {
        json!({
            "numerator": self.numerator.to_canonical(),
            "denominator": self.denominator.to_canonical(),
            "du_part": self.du_part.to_canonical(),
            "holds": self.holds,
            "expected": "dv/(1+v)^2",
        })
    }
}

/// Check that `pi^* omega0` restricts to `dv / (1 + v)^2`. With `kin = None`
/// the kinematic symbols stay symbolic.
pub fn weight0_check(kin: Option<&KinematicPoint>) -> Result<Weight0Witness> {
    let catalog = sunrise_catalog();
    let w = &catalog["omega0"];
    let OmegaKind::Pair(i, j) = w.omega_kind else {
        return Err(SunriseError::Unsupported("omega0 is not a one-form".into()));
    };
    let src = w.numerator.vars().clone();
    let params: Vec<String> = src.names()[3..].to_vec();
    let mut names = vec!["u".to_string(), "v".to_string()];
    names.extend(params);
    let t = VarSet::new(names, 2);
    let spec = |p: &MPoly| kin.map_or_else(|| p.clone(), |k| p.specialize(k));
    let (_, xi) = graph::symanzik_pair(&w.graph, &w.mandelstam).map_err(IntegrandError::from)?;
    let ch = SunriseChart::new(0, 1, 2);
    let imgs = ch.images(&src, &t);
    let num = spec(&w.signed_numerator()).substitute(&t, &imgs);
    let xi_t = spec(&xi).substitute(&t, &imgs).div_monomial(&u_mono(1)).expect("Xi vanishes at u = 0");
    // a_i da_j - a_j da_i
    let pair = |d: usize| &(&imgs[i] * &imgs[j].partial(d)) - &(&imgs[j] * &imgs[i].partial(d));
    let at_u0 = |p: MPoly| -> Result<MPoly> {
        let q = p
            .div_monomial(&Monomial({
                let mut e = vec![0; t.len()];
                e[0] = 2;
                e
            }))
            .ok_or_else(|| SunriseError::ChartFailure("pullback of omega0 has a pole on u = 0".into()))?;
        Ok(restrict(&q, 0, &Rat::zero()))
    };
    let numerator = at_u0(&num * &pair(1))?;
    let du_part = at_u0(&num * &pair(0))?;
    let denominator = restrict(&xi_t, 0, &Rat::zero()).pow(2);
    let one_plus_v = &MPoly::one(&t) + &MPoly::var(&t, 1);
    let holds = !numerator.is_zero() && du_part.is_zero() && &numerator * &one_plus_v.pow(2) == denominator;
    Ok(Weight0Witness { numerator, denominator, du_part, holds })
}

// ---------------------------------------------------------------------------
// Sampling

/// Positive rational with numerator and denominator in `1..=1000`.
pub fn random_positive_rat<R: Rng>(rng: &mut R) -> Rat {
    Rat::new(rng.gen_range(1..=1000i64).into(), rng.gen_range(1..=1000i64).into())
}

/// Seeded generic kinematic points (resampled on any degeneracy of the
/// residue computation).
pub fn sample_points(seed: u64, count: usize) -> Vec<KinematicPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let kin = KinematicPoint::sunrise(
            random_positive_rat(&mut rng),
            random_positive_rat(&mut rng),
            random_positive_rat(&mut rng),
            random_positive_rat(&mut rng),
        );
        let generic = SunriseCubic::new(&kin)
            .and_then(|c| boundary_points_of(&c))
            .is_ok_and(|_| tabulated_nu_coordinates(&kin).is_ok());
        if generic {
            out.push(kin);
        }
    }
    out
}

/// Table comparison over seeded random points, in sample order.
pub fn table_sweep(seed: u64, samples: usize) -> Vec<Result<TableComparison>> {
    sample_points(seed, samples).par_iter().map(compare_with_table).collect()
}
