//! Projective Feynman integrands `sign * A * Omega / (Psi^a Xi^b)` and the
//! subdivision-of-edges pullback.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{self, FeynmanGraph, GraphError, MandelstamDictionary, SubdivisionSpec};
use crate::polynomial::{MPoly, Monomial, Rat, VarSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntegrandError {
    #[error("dimension parity: {0}")]
    DimensionParity(String),
    #[error("degenerate integrand: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which top form the numerator multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaKind {
    /// `Omega = sum_i (-1)^(i-1) a_i da_1..^da_i..da_N`.
    Full,
    /// The one-form `a_i da_j - a_j da_i` (0-based indices).
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjForm {
    pub graph: FeynmanGraph,
    pub mandelstam: MandelstamDictionary,
    pub numerator: MPoly,
    pub psi_exp: i32,
    pub xi_exp: i32,
    pub sign: i8,
    pub omega_kind: OmegaKind,
}

impl ProjForm {
    /// Numerator with the sign folded in.
    pub fn signed_numerator(&self) -> MPoly {
        if self.sign < 0 {
            -&self.numerator
        } else {
            self.numerator.clone()
        }
    }

    fn form_degree(&self) -> i64 {
        match self.omega_kind {
            OmegaKind::Full => self.graph.num_edges() as i64,
            OmegaKind::Pair(..) => 2,
        }
    }

    /// `deg A + N = a h + b (h + 1)`.
    pub fn is_homogeneous(&self) -> bool {
        if self.numerator.is_zero() {
            return true;
        }
        let Some(d) = self.numerator.alpha_homogeneous_degree() else {
            return false;
        };
        let h = self.graph.loop_number();
        d as i64 + self.form_degree() == self.psi_exp as i64 * h + self.xi_exp as i64 * (h + 1)
    }

    /// Move negative exponents of `Psi` and `Xi` into the numerator.
    pub fn normalized(&self) -> Result<ProjForm, IntegrandError> {
        let (psi, xi) = graph::symanzik_pair(&self.graph, &self.mandelstam)?;
        let mut out = self.clone();
        if out.psi_exp < 0 {
            out.numerator = &out.numerator * &psi.pow((-out.psi_exp) as u32);
            out.psi_exp = 0;
        }
        if out.xi_exp < 0 {
            out.numerator = &out.numerator * &xi.pow((-out.xi_exp) as u32);
            out.xi_exp = 0;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let kind = match self.omega_kind {
            OmegaKind::Full => json!("full"),
            OmegaKind::Pair(i, j) => json!({"pair": [i + 1, j + 1]}),
        };
        json!({
            "graph": graph::graph_to_json(&self.graph, &self.mandelstam),
            "numerator": self.numerator.to_canonical(),
            "psi_exp": self.psi_exp,
            "xi_exp": self.xi_exp,
            "sign": self.sign,
            "omega_kind": kind,
        })
    }

    pub fn from_json(v: &Value) -> Result<ProjForm, IntegrandError> {
        let bad = |m: &str| IntegrandError::Graph(GraphError::Format(m.to_string()));
        let (graph, mandelstam) = graph::parse_graph_json(&v["graph"].to_string())?;
        let vars = graph.var_set(&mandelstam);
        let numerator = MPoly::parse(&vars, v["numerator"].as_str().ok_or_else(|| bad("numerator"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let int = |k: &str| v[k].as_i64().ok_or_else(|| bad(k));
        let omega_kind = match &v["omega_kind"] {
            Value::String(s) if s == "full" => OmegaKind::Full,
            Value::Object(o) => {
                let p = o.get("pair").and_then(Value::as_array).ok_or_else(|| bad("omega_kind"))?;
                let ix = |k: usize| p.get(k).and_then(Value::as_u64).map(|x| x as usize - 1).ok_or_else(|| bad("pair"));
                OmegaKind::Pair(ix(0)?, ix(1)?)
            }
            _ => return Err(bad("omega_kind")),
        };
        Ok(ProjForm {
            graph,
            mandelstam,
            numerator,
            psi_exp: int("psi_exp")? as i32,
            xi_exp: int("xi_exp")? as i32,
            sign: int("sign")? as i8,
            omega_kind,
        })
    }
}

/// Sign of `Omega` restricted to the chart `a_j = 1` (0-based `j`), relative
/// to `da_1 ^ .. ^da_j.. ^ da_N` in increasing order.
pub fn omega_chart_sign(j: usize) -> i32 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Omega / Psi^(d/2) * (Psi/Xi)^(N - h d/2)`, i.e. `a = (h+1)d/2 - N`,
/// `b = N - h d/2`.
pub fn feynman_integrand(g: &FeynmanGraph, d: i64, m: &MandelstamDictionary) -> Result<ProjForm, IntegrandError> {
    let n = g.num_edges() as i64;
    let h = g.loop_number();
    if n < 2 {
        return Err(IntegrandError::Degenerate(format!("{n} edge(s): projective space of dimension {}", n - 1)));
    }
    if (h * d) % 2 != 0 || ((h + 1) * d) % 2 != 0 {
        return Err(IntegrandError::DimensionParity(format!("h = {h}, d = {d}")));
    }
    let vars = g.var_set(m);
    let form = ProjForm {
        graph: g.clone(),
        mandelstam: m.clone(),
        numerator: MPoly::one(&vars),
        psi_exp: ((h + 1) * d / 2 - n) as i32,
        xi_exp: (n - h * d / 2) as i32,
        sign: 1,
        omega_kind: OmegaKind::Full,
    };
    debug_assert!(form.is_homogeneous());
    Ok(form)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubdivisionExponents {
    pub z1: i64,
    pub z2: i64,
    pub k: i64,
}

/// `z1 = K - (h+1)d/2`, `z2 = d h/2 - K` with `d = d_sub - d_g`.
pub fn subdivision_exponents(h: i64, d_sub: i64, d_g: i64, k: i64) -> Result<SubdivisionExponents, IntegrandError> {
    let d = d_sub - d_g;
    if (h * d) % 2 != 0 || ((h + 1) * d) % 2 != 0 {
        return Err(IntegrandError::DimensionParity(format!("h = {h}, d_sub - d_G = {d}")));
    }
    Ok(SubdivisionExponents { z1: k - (h + 1) * d / 2, z2: d * h / 2 - k, k })
}

/// The integrand of `G_{s(I)}` in `d_sub` dimensions pulled back to `G`:
/// `(-1)^K a^k Psi^z1 Xi^z2 omega_G(d_g)`, with non-positive exponents folded
/// into the numerator.
pub fn subdivision_pullback(
    g: &FeynmanGraph,
    spec: &SubdivisionSpec,
    d_sub: i64,
    d_g: i64,
    m: &MandelstamDictionary,
) -> Result<ProjForm, IntegrandError> {
    if spec.counts.len() != g.num_edges() {
        return Err(GraphError::SpecLength { got: spec.counts.len(), want: g.num_edges() }.into());
    }
    let base = feynman_integrand(g, d_g, m)?;
    let ex = subdivision_exponents(g.loop_number(), d_sub, d_g, spec.total() as i64)?;
    let vars = base.numerator.vars().clone();
    let mut e = vec![0u32; vars.len()];
    e[..spec.counts.len()].copy_from_slice(&spec.counts);
    let form = ProjForm {
        numerator: MPoly::from_terms(&vars, [(Monomial(e), Rat::one())]),
        psi_exp: base.psi_exp - ex.z1 as i32,
        xi_exp: base.xi_exp - ex.z2 as i32,
        sign: if ex.k % 2 == 0 { 1 } else { -1 },
        ..base
    }
    .normalized()?;
    debug_assert!(form.is_homogeneous());
    Ok(form)
}

/// Check `Psi_{G_s(e)} = Psi_G(a_e -> a_e + a_{e+1})` and likewise for `Xi`,
/// with the later edges shifted by one.
pub fn lemma_substitution_holds(g: &FeynmanGraph, e: usize, m: &MandelstamDictionary) -> Result<bool, IntegrandError> {
    let mut counts = vec![0; g.num_edges()];
    counts[e] = 1;
    let gs = graph::subdivide(g, &SubdivisionSpec::new(counts))?;
    let (psi_s, xi_s) = graph::symanzik_pair(&gs, m)?;
    let (psi, xi) = graph::symanzik_pair(g, m)?;
    let target = psi_s.vars().clone();
    let images: Vec<MPoly> = (0..psi.nvars())
        .map(|i| {
            if i < e {
                MPoly::var(&target, i)
            } else if i == e {
                &MPoly::var(&target, e) + &MPoly::var(&target, e + 1)
            } else {
                MPoly::var(&target, i + 1)
            }
        })
        .collect();
    Ok(psi.substitute(&target, &images) == psi_s && xi.substitute(&target, &images) == xi_s)
}

/// Determinant of a square polynomial matrix by sparse Laplace expansion.
pub fn poly_determinant(m: &[Vec<MPoly>], vars: &Arc<VarSet>) -> MPoly {
    fn rec(m: &[Vec<MPoly>], rows: &[usize], cols: &mut Vec<usize>, vars: &Arc<VarSet>) -> MPoly {
        let Some((&r, rest)) = rows.split_first() else {
            return MPoly::one(vars);
        };
        let mut acc = MPoly::zero(vars);
        for k in 0..cols.len() {
            let c = cols[k];
            if m[r][c].is_zero() {
                continue;
            }
            cols.remove(k);
            let minor = rec(m, rest, cols, vars);
            cols.insert(k, c);
            let t = &m[r][c] * &minor;
            acc = if k % 2 == 0 { acc + t } else { acc - t };
        }
        acc
    }
    let rows: Vec<usize> = (0..m.len()).collect();
    let mut cols = rows.clone();
    rec(m, &rows, &mut cols, vars)
}

/// Symbolic check of `rho^* omega_{G_s(e)} = -a_e Psi^z1 Xi^z2 omega_G ^ dy`
/// under `a_e -> y a_e`, `a_{e+1} -> (1-y) a_e`.
pub fn lemma_pullback_holds(g: &FeynmanGraph, e: usize, d: i64, m: &MandelstamDictionary) -> Result<bool, IntegrandError> {
    let n = g.num_edges();
    let mut counts = vec![0; n];
    counts[e] = 1;
    let gs = graph::subdivide(g, &SubdivisionSpec::new(counts.clone()))?;
    let ws = feynman_integrand(&gs, d, m)?;
    let (psi_s, xi_s) = graph::symanzik_pair(&gs, m)?;
    let (psi, xi) = graph::symanzik_pair(g, m)?;
    let gvars = psi.vars().clone();
    let params: Vec<String> = gvars.names()[n..].to_vec();
    let mut names: Vec<String> = gvars.names()[..n].to_vec();
    names.push("y".to_string());
    names.extend(params.iter().cloned());
    let t = VarSet::new(names, n);
    let y = MPoly::var(&t, n);
    let one = MPoly::one(&t);
    let svars = psi_s.vars().clone();
    let images: Vec<MPoly> = (0..svars.len())
        .map(|i| {
            if i < e {
                MPoly::var(&t, i)
            } else if i == e {
                &y * &MPoly::var(&t, e)
            } else if i == e + 1 {
                &(&one - &y) * &MPoly::var(&t, e)
            } else if i <= n {
                MPoly::var(&t, i - 1)
            } else {
                MPoly::var(&t, i)
            }
        })
        .collect();
    // Jacobian of (a_1..a_N, y) -> (b_1..b_{N+1}); its determinant is the
    // factor in rho^* Omega_{N+1} = det J * Omega_N ^ dy
    let jac: Vec<Vec<MPoly>> = images[..=n]
        .iter()
        .map(|p| (0..=n).map(|j| p.partial(j)).collect())
        .collect();
    // relabelling so that `e` is the last edge of `G` changes `Omega_G` by
    // the sign of a cyclic shift and leaves `Omega_{G_s}` alone
    let mut det = poly_determinant(&jac, &t);
    if (n - 1 - e) % 2 == 1 {
        det = -det;
    }
    let sub = |p: &MPoly| p.substitute(&t, &images);
    let split = |num: MPoly, a: i32, b: i32, ps: &MPoly, xs: &MPoly| -> (MPoly, MPoly) {
        let mut n = num;
        let mut d = MPoly::one(&t);
        if a >= 0 { d = &d * &ps.pow(a as u32) } else { n = &n * &ps.pow((-a) as u32) }
        if b >= 0 { d = &d * &xs.pow(b as u32) } else { n = &n * &xs.pow((-b) as u32) }
        (n, d)
    };
    let (ln, ld) = split(&det * &sub(&ws.signed_numerator()), ws.psi_exp, ws.xi_exp, &sub(&psi_s), &sub(&xi_s));
    let pb = subdivision_pullback(g, &SubdivisionSpec::new(counts), d, d, m)?;
    let emb = |p: &MPoly| p.embed(&t).expect("graph variables embed");
    let (rn, rd) = split(emb(&pb.signed_numerator()), pb.psi_exp, pb.xi_exp, &emb(&psi), &emb(&xi));
    Ok(&ln * &rd == &rn * &ld)
}

/// The sunrise forms: `omega_G`, `eta_G`, `nu1..nu3`, `omega0`, `mu1..mu3`.
pub fn sunrise_catalog() -> BTreeMap<String, ProjForm> {
    let g = FeynmanGraph::sunrise();
    let m = MandelstamDictionary::sunrise();
    let (_, xi) = graph::symanzik_pair(&g, &m).expect("sunrise polynomials");
    let vars = xi.vars().clone();
    let pull = |k: [u32; 3], d_sub: i64| {
        subdivision_pullback(&g, &SubdivisionSpec::new(k.to_vec()), d_sub, 2, &m).expect("sunrise pullback")
    };
    let mut out = BTreeMap::new();
    out.insert("omega_G".to_string(), feynman_integrand(&g, 2, &m).expect("d = 2"));
    out.insert("eta_G".to_string(), pull([1, 0, 0], 2));
    out.insert("nu1".to_string(), pull([1, 2, 0], 4));
    out.insert("nu2".to_string(), pull([2, 0, 1], 4));
    out.insert("nu3".to_string(), pull([0, 1, 2], 4));
    let var = |s: &str| MPoly::var_named(&vars, s).expect("sunrise symbol");
    let a = |i: usize| MPoly::var(&vars, i);
    let d = |i: usize| xi.partial(i);
    let mk = |num: MPoly, kind: OmegaKind| ProjForm {
        graph: g.clone(),
        mandelstam: m.clone(),
        numerator: num,
        psi_exp: 0,
        xi_exp: 2,
        sign: 1,
        omega_kind: kind,
    };
    out.insert("omega0".to_string(), mk(&var("m3^2").pow(2) * &a(2).pow(4), OmegaKind::Pair(0, 1)));
    out.insert("mu1".to_string(), mk(&(&var("m1^2") * &a(0)) * &(&d(1) - &d(2)), OmegaKind::Full));
    out.insert("mu2".to_string(), mk(&(&var("m2^2") * &a(1)) * &(&d(2) - &d(0)), OmegaKind::Full));
    out.insert("mu3".to_string(), mk(&(&var("m3^2") * &a(2)) * &(&d(0) - &d(1)), OmegaKind::Full));
    for f in out.values() {
        debug_assert!(f.is_homogeneous());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sunrise_d2_is_omega_over_xi() {
        let f = feynman_integrand(&FeynmanGraph::sunrise(), 2, &MandelstamDictionary::sunrise()).unwrap();
        assert_eq!((f.psi_exp, f.xi_exp), (0, 1));
        assert_eq!(f.numerator.to_canonical(), "1");
    }

    #[test]
    fn bubble_d4() {
        let f = feynman_integrand(&FeynmanGraph::bubble([None, None]), 4, &MandelstamDictionary::sunrise()).unwrap();
        assert_eq!((f.psi_exp, f.xi_exp), (2, 0));
        assert!(f.is_homogeneous());
    }

    #[test]
    fn tadpole_rejected() {
        let g = FeynmanGraph::new(
            vec!["v".into()],
            vec![crate::graph::Edge { id: "e1".into(), from: "v".into(), to: "v".into(), mass: None }],
            vec![],
        )
        .unwrap();
        assert!(matches!(feynman_integrand(&g, 2, &MandelstamDictionary::new()), Err(IntegrandError::Degenerate(_))));
        assert!(matches!(
            feynman_integrand(&FeynmanGraph::sunrise(), 3, &MandelstamDictionary::sunrise()),
            Err(IntegrandError::DimensionParity(_))
        ));
    }

    #[test]
    fn catalog_numerators() {
        let c = sunrise_catalog();
        let eta = &c["eta_G"];
        assert_eq!((eta.psi_exp, eta.xi_exp, eta.sign), (0, 2, -1));
        assert_eq!(eta.signed_numerator().to_canonical(), "-a1^2*a2 + -a1^2*a3 + -a1*a2*a3");
        assert_eq!(c["nu1"].signed_numerator().to_canonical(), "-a1*a2^2");
        assert_eq!(c["nu2"].signed_numerator().to_canonical(), "-a1^2*a3");
        assert_eq!(c["nu3"].signed_numerator().to_canonical(), "-a2*a3^2");
        assert_eq!(c["nu3"].xi_exp, 2);
        assert_eq!(c["omega_G"].numerator.to_canonical(), "1");
        for f in c.values() {
            assert!(f.is_homogeneous());
        }
    }

    #[test]
    fn mu1_matches_displayed_formula() {
        let c = sunrise_catalog();
        let mu1 = &c["mu1"];
        let (_, xi) = graph::symanzik_pair(&mu1.graph, &mu1.mandelstam).unwrap();
        let v = xi.vars().clone();
        let want = &(&MPoly::var_named(&v, "m1^2").unwrap() * &MPoly::var(&v, 0))
            * &(&xi.partial_named("a2").unwrap() - &xi.partial_named("a3").unwrap());
        assert_eq!(mu1.numerator, want);
    }

    #[test]
    fn empty_subdivision_is_identity() {
        let g = FeynmanGraph::sunrise();
        let m = MandelstamDictionary::sunrise();
        let f = subdivision_pullback(&g, &SubdivisionSpec::new(vec![0, 0, 0]), 2, 2, &m).unwrap();
        assert_eq!(f, feynman_integrand(&g, 2, &m).unwrap());
    }

    #[test]
    fn lemma_on_sunrise_and_bubble() {
        let m = MandelstamDictionary::sunrise();
        let s = FeynmanGraph::sunrise();
        let b = FeynmanGraph::bubble([Some("m1^2"), Some("m2^2")]);
        for e in 0..3 {
            assert!(lemma_substitution_holds(&s, e, &m).unwrap());
            assert!(lemma_pullback_holds(&s, e, 2, &m).unwrap());
        }
        for e in 0..2 {
            assert!(lemma_pullback_holds(&b, e, 4, &m).unwrap());
            assert!(lemma_pullback_holds(&b, e, 2, &m).unwrap());
        }
    }

    #[test]
    fn json_roundtrip() {
        for f in sunrise_catalog().values() {
            assert_eq!(&ProjForm::from_json(&f.to_json()).unwrap(), f);
        }
    }
}
