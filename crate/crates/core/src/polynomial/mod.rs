//! Sparse multivariate polynomials over exact rationals.
//!
//! Variables live in a [`VarSet`]; the first `n_alpha` of them are the
//! Schwinger parameters, the rest are kinematic symbols. Terms are kept in
//! graded lexicographic order and printed from the largest term down.

pub mod linalg;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::KinematicPoint;
use linalg::RatMatrix;

pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variable sets differ")]
    VarSetMismatch,
}

/// Ordered variable names. Alpha variables come first.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
    n_alpha: usize,
}

impl VarSet {
    pub fn new(names: Vec<String>, n_alpha: usize) -> Arc<VarSet> {
        assert!(n_alpha <= names.len());
        Arc::new(VarSet { names, n_alpha })
    }

    /// `a1..aN` followed by the given parameter symbols.
    pub fn alphas_with_params(n: usize, params: &[String]) -> Arc<VarSet> {
        let mut names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        names.extend(params.iter().cloned());
        VarSet::new(names, n)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector, ordered by total degree then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn degree_in(&self, range: std::ops::Range<usize>) -> u32 {
        self.0[range].iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` supported on `vars`, largest first.
pub fn monomials_of_degree(nvars: usize, vars: &[usize], d: u32) -> Vec<Monomial> {
    fn rec(vars: &[usize], d: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => {
                if d == 0 {
                    out.push(Monomial(cur.clone()));
                }
            }
            Some((&v, rest)) => {
                for e in (0..=d).rev() {
                    cur[v] = e;
                    rec(rest, d - e, cur, out);
                }
                cur[v] = 0;
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, d, &mut vec![0; nvars], &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct MPoly {
    vars: Arc<VarSet>,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars) && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        MPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<VarSet>, c: Rat) -> Self {
        let mut p = MPoly::zero(vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        MPoly::constant(vars, Rat::one())
    }

    pub fn var(vars: &Arc<VarSet>, i: usize) -> Self {
        let mut p = MPoly::zero(vars);
        p.add_term(Monomial::var(vars.len(), i), Rat::one());
        p
    }

    pub fn var_named(vars: &Arc<VarSet>, name: &str) -> Result<Self, PolyError> {
        let i = vars.index(name).ok_or_else(|| PolyError::UnknownVar(name.to_string()))?;
        Ok(MPoly::var(vars, i))
    }

    pub fn from_terms(vars: &Arc<VarSet>, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = MPoly::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len());
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in the alpha variables if every term has the same one.
    pub fn alpha_homogeneous_degree(&self) -> Option<u32> {
        let r = 0..self.vars.n_alpha;
        let mut it = self.terms.keys().map(|m| m.degree_in(r.clone()));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_alpha_homogeneous(&self) -> bool {
        self.is_zero() || self.alpha_homogeneous_degree().is_some()
    }

    fn check_same(&self, other: &MPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable sets"
        );
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.vars);
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> MPoly {
        let mut out = MPoly::zero(&self.vars);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.mul(m), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn partial_named(&self, name: &str) -> Result<MPoly, PolyError> {
        let i = self.vars.index(name).ok_or_else(|| PolyError::UnknownVar(name.to_string()))?;
        Ok(self.partial(i))
    }

    /// Compose: variable `i` is replaced by `images[i]`, all over `target`.
    pub fn substitute(&self, target: &Arc<VarSet>, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.nvars());
        let mut cache: Vec<Vec<MPoly>> = images.iter().map(|p| vec![MPoly::one(target), p.clone()]).collect();
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = &cache[i][cache[i].len() - 1] * &cache[i][1];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e as usize];
            }
            out = out + t;
        }
        out
    }

    /// Substitute by name; unmentioned variables map to themselves.
    pub fn substitute_named(&self, sigma: &BTreeMap<String, MPoly>) -> MPoly {
        let images: Vec<MPoly> = (0..self.nvars())
            .map(|i| {
                let name = &self.vars.names[i];
                sigma.get(name).cloned().unwrap_or_else(|| MPoly::var(&self.vars, i))
            })
            .collect();
        self.substitute(&self.vars.clone(), &images)
    }

    /// Replace kinematic symbols present in `kin` by their values.
    pub fn specialize(&self, kin: &KinematicPoint) -> MPoly {
        let mut out = MPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut c2 = c.clone();
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if let Some(v) = kin.get(&self.vars.names[i]) {
                    c2 *= pow_rat(v, *e);
                    m2.0[i] = 0;
                }
            }
            out.add_term(m2, c2);
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= pow_rat(&point[i], e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-express over another variable set containing all variables in use.
    pub fn embed(&self, target: &Arc<VarSet>) -> Result<MPoly, PolyError> {
        let map: Vec<Option<usize>> = self.vars.names.iter().map(|n| target.index(n)).collect();
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| PolyError::UnknownVar(self.vars.names[i].clone()))?;
                e[j] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Exact division by a monomial; `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<MPoly> {
        let mut out = MPoly::zero(&self.vars);
        for (k, c) in &self.terms {
            let mut e = k.0.clone();
            for (x, y) in e.iter_mut().zip(&m.0) {
                if *x < *y {
                    return None;
                }
                *x -= y;
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Canonical text: `c * a1^e1*a2^e2` terms joined by `" + "`, largest first.
    pub fn to_canonical(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.terms().map(|(m, c)| self.fmt_term(m, c)).collect();
        parts.join(" + ")
    }

    fn fmt_term(&self, m: &Monomial, c: &Rat) -> String {
        let mut factors = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = &self.vars.names[i];
            let base = if name.contains('^') { format!("({name})") } else { name.clone() };
            factors.push(if e == 1 { name.clone() } else { format!("{base}^{e}") });
        }
        let mono = factors.join("*");
        let cs = crate::fmt_rat(c);
        if mono.is_empty() {
            cs
        } else if c.is_one() {
            mono
        } else if *c == -Rat::one() {
            format!("-{mono}")
        } else {
            format!("{cs} * {mono}")
        }
    }

    /// Parse the canonical text form over the given variables.
    pub fn parse(vars: &Arc<VarSet>, s: &str) -> Result<MPoly, PolyError> {
        let s = s.trim();
        let mut out = MPoly::zero(vars);
        if s == "0" {
            return Ok(out);
        }
        for term in s.split(" + ") {
            let term = term.trim();
            let (coef, mono) = match term.split_once(" * ") {
                Some((c, m)) => (
                    crate::parse_rat(c).ok_or_else(|| PolyError::Parse(format!("coefficient `{c}`")))?,
                    m,
                ),
                None => {
                    if let Some(c) = crate::parse_rat(term) {
                        out.add_term(Monomial::one(vars.len()), c);
                        continue;
                    }
                    match term.strip_prefix('-') {
                        Some(rest) => (-Rat::one(), rest),
                        None => (Rat::one(), term),
                    }
                }
            };
            let mut e = vec![0u32; vars.len()];
            for f in split_factors(mono) {
                let (base, exp) = split_power(vars, &f)?;
                let i = vars.index(&base).ok_or(PolyError::UnknownVar(base))?;
                e[i] += exp;
            }
            out.add_term(Monomial(e), coef);
        }
        Ok(out)
    }
}

fn split_factors(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out
}

fn split_power(vars: &VarSet, f: &str) -> Result<(String, u32), PolyError> {
    let f = f.trim();
    if vars.index(f).is_some() {
        return Ok((f.to_string(), 1));
    }
    let bad = || PolyError::Parse(f.to_string());
    if let Some(rest) = f.strip_prefix('(') {
        let (base, tail) = rest.split_once(')').ok_or_else(bad)?;
        let exp = match tail.strip_prefix('^') {
            Some(e) => e.parse().map_err(|_| bad())?,
            None if tail.is_empty() => 1,
            None => return Err(bad()),
        };
        return Ok((base.to_string(), exp));
    }
    match f.rsplit_once('^') {
        Some((b, e)) => Ok((b.to_string(), e.parse().map_err(|_| bad())?)),
        None => Ok((f.to_string(), 1)),
    }
}

pub(crate) fn pow_rat(r: &Rat, e: u32) -> Rat {
    num_traits::pow::Pow::pow(r, e)
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(mut self, rhs: MPoly) -> MPoly {
        self.check_same(&rhs);
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_same(rhs);
        let mut out = MPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rat::one())
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

/// Outcome of [`graded_solve`].
#[derive(Clone, Debug)]
pub struct GradedSolveResult {
    /// Multipliers `B_i` of the generators.
    pub combination: Vec<MPoly>,
    /// Coefficients `c_i` of the complement elements.
    pub complement: Vec<Rat>,
    /// True when no solution exists.
    pub residual: bool,
}

/// Write `target = sum B_i gen_i + sum c_i comp_i` with `B_i` homogeneous in
/// the alpha variables of degree `degree - deg gen_i`, after specialising all
/// kinematic symbols via `kin`.
pub fn graded_solve(
    target: &MPoly,
    generators: &[MPoly],
    complement: &[MPoly],
    degree: u32,
    kin: &KinematicPoint,
) -> Result<GradedSolveResult, PolyError> {
    let vars = target.vars().clone();
    let t = target.specialize(kin);
    let gens: Vec<MPoly> = generators.iter().map(|g| g.specialize(kin)).collect();
    let comp: Vec<MPoly> = complement.iter().map(|g| g.specialize(kin)).collect();
    let check = |p: &MPoly, what: &str, want: Option<u32>| -> Result<u32, PolyError> {
        if p.is_zero() {
            return Ok(want.unwrap_or(0));
        }
        let d = p
            .alpha_homogeneous_degree()
            .ok_or_else(|| PolyError::Degree(format!("{what} is not homogeneous")))?;
        if p.terms.keys().any(|m| m.degree() != d) {
            return Err(PolyError::Degree(format!("{what} still depends on kinematic symbols")));
        }
        if let Some(w) = want {
            if w != d {
                return Err(PolyError::Degree(format!("{what} has degree {d}, expected {w}")));
            }
        }
        Ok(d)
    };
    check(&t, "target", Some(degree))?;
    for (i, c) in comp.iter().enumerate() {
        check(c, &format!("complement {i}"), Some(degree))?;
    }
    let alphas: Vec<usize> = (0..vars.n_alpha()).collect();
    let rows = monomials_of_degree(vars.len(), &alphas, degree);
    let row_index: BTreeMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut columns: Vec<(usize, Monomial)> = Vec::new();
    let mut col_polys: Vec<MPoly> = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let dg = check(g, &format!("generator {gi}"), None)?;
        if g.is_zero() || dg > degree {
            continue;
        }
        for m in monomials_of_degree(vars.len(), &alphas, degree - dg) {
            col_polys.push(g.mul_monomial(&m, &Rat::one()));
            columns.push((gi, m));
        }
    }
    let n_gen_cols = col_polys.len();
    col_polys.extend(comp.iter().cloned());
    let mut a = RatMatrix::zeros(rows.len(), col_polys.len());
    for (j, p) in col_polys.iter().enumerate() {
        for (m, c) in &p.terms {
            let i = row_index[m];
            a.set(i, j, c.clone());
        }
    }
    let b: Vec<Rat> = rows.iter().map(|m| t.coeff(m)).collect();
    let Some(x) = a.solve(&b) else {
        return Ok(GradedSolveResult {
            combination: gens.iter().map(|_| MPoly::zero(&vars)).collect(),
            complement: vec![Rat::zero(); comp.len()],
            residual: true,
        });
    };
    let mut combination: Vec<MPoly> = gens.iter().map(|_| MPoly::zero(&vars)).collect();
    for (j, (gi, m)) in columns.iter().enumerate() {
        combination[*gi].add_term(m.clone(), x[j].clone());
    }
    Ok(GradedSolveResult { combination, complement: x[n_gen_cols..].to_vec(), residual: false })
}

/// Re-expand a [`GradedSolveResult`] and compare with `target` (all specialised).
pub fn check_reconstruction(
    target: &MPoly,
    generators: &[MPoly],
    complement: &[MPoly],
    sol: &GradedSolveResult,
    kin: &KinematicPoint,
) -> bool {
    let mut acc = MPoly::zero(target.vars());
    for (b, g) in sol.combination.iter().zip(generators) {
        acc = acc + b * &g.specialize(kin);
    }
    for (c, g) in sol.complement.iter().zip(complement) {
        acc = acc + g.specialize(kin).scale(c);
    }
    acc == target.specialize(kin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn abc() -> Arc<VarSet> {
        VarSet::alphas_with_params(3, &["m1^2".to_string()])
    }

    fn psi(v: &Arc<VarSet>) -> MPoly {
        MPoly::parse(v, "a1*a2 + a1*a3 + a2*a3").unwrap()
    }

    #[test]
    fn psi_prints_in_grlex_order() {
        let v = abc();
        let (a1, a2, a3) = (MPoly::var(&v, 0), MPoly::var(&v, 1), MPoly::var(&v, 2));
        let p = &(&a2 * &a3 + &a1 * &a3) + &(&a1 * &a2);
        assert_eq!(p.to_canonical(), "a1*a2 + a1*a3 + a2*a3");
    }

    #[test]
    fn canonical_roundtrip_with_symbols() {
        let v = abc();
        let s = "-3/2 * (m1^2)^2*a1^2 + m1^2*a2 + 7";
        let p = MPoly::parse(&v, s).unwrap();
        assert_eq!(MPoly::parse(&v, &p.to_canonical()).unwrap(), p);
        assert_eq!(p.eval(&[r(1), r(1), r(0), r(2)]), r(-3 * 4 / 2 + 2 + 7));
    }

    #[test]
    fn substitution_example() {
        let v = abc();
        let a1 = MPoly::var(&v, 0);
        let a2 = MPoly::var(&v, 1);
        let a3 = MPoly::var(&v, 2);
        let mut sigma = BTreeMap::new();
        sigma.insert("a1".to_string(), &a1 + &a3);
        let got = psi(&v).substitute_named(&sigma);
        // (u+v)a2 + (u+v)a3 + a2 a3 with u = a1, v = a3
        let want = &(&(&a1 + &a3) * &a2) + &(&(&(&a1 + &a3) * &a3) + &(&a2 * &a3));
        assert_eq!(got, want);
        let sq = a1.pow(2);
        let mut zero = BTreeMap::new();
        zero.insert("a1".to_string(), MPoly::zero(&v));
        assert!(sq.substitute_named(&zero).is_zero());
        assert_eq!(a1.substitute_named(&BTreeMap::new()), a1);
    }

    #[test]
    fn partials() {
        let v = abc();
        let p = MPoly::parse(&v, "a1*a2").unwrap();
        assert_eq!(p.partial(0), MPoly::var(&v, 1));
        assert_eq!(psi(&v).partial(0), MPoly::parse(&v, "a2 + a3").unwrap());
        assert!(MPoly::constant(&v, r(5)).partial(0).is_zero());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(4, &[0, 1, 2], 3).len(), 10);
        assert_eq!(monomials_of_degree(3, &[0, 1, 2], 0).len(), 1);
    }

    #[test]
    fn graded_solve_trivial_cases() {
        let v = VarSet::alphas_with_params(3, &[]);
        let kin = KinematicPoint::default();
        let xi = MPoly::parse(&v, "a1^2*a2 + a1*a2^2 + 5 * a1*a2*a3 + a1^2*a3 + a2^2*a3 + 2 * a1*a3^2 + 3 * a2*a3^2")
            .unwrap();
        let gens: Vec<MPoly> = (0..3).map(|i| xi.partial(i)).collect();
        let sol = graded_solve(&gens[0], &gens, &[], 2, &kin).unwrap();
        assert!(!sol.residual);
        assert!(check_reconstruction(&gens[0], &gens, &[], &sol, &kin));
        let xyz = MPoly::parse(&v, "a1*a2*a3").unwrap();
        let sol = graded_solve(&xyz, &gens, std::slice::from_ref(&xyz), 3, &kin).unwrap();
        assert!(!sol.residual);
        assert!(check_reconstruction(&xyz, &gens, std::slice::from_ref(&xyz), &sol, &kin));
    }

    #[test]
    fn graded_solve_degree_mismatch() {
        let v = VarSet::alphas_with_params(3, &[]);
        let p = MPoly::parse(&v, "a1*a2").unwrap();
        assert!(graded_solve(&p, &[], &[], 3, &KinematicPoint::default()).is_err());
    }
}
