//! Feynman graphs, spanning trees and forests, Symanzik polynomials and edge
//! subdivision.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::polynomial::linalg::RatMatrix;
use crate::polynomial::{MPoly, Monomial, Rat, VarSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("not connected")]
    NotConnected,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("momentum label `{0}` appears on more than one leg")]
    DuplicateMomentum(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("missing Mandelstam entry for bipartition {0}")]
    MissingMandelstam(String),
    #[error("subdivision spec has {got} entries, graph has {want} edges")]
    SpecLength { got: usize, want: usize },
    #[error("invalid graph file: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Mass symbol such as `m1^2`; `None` for a massless edge.
    pub mass: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub vertex: String,
    pub momentum: String,
}

/// A connected graph with ordered internal edges and labelled external legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

impl FeynmanGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, legs: Vec<Leg>) -> Result<Self, GraphError> {
        let vs: BTreeSet<&String> = vertices.iter().collect();
        let mut ids = BTreeSet::new();
        for e in &edges {
            for v in [&e.from, &e.to] {
                if !vs.contains(v) {
                    return Err(GraphError::UnknownVertex(v.clone()));
                }
            }
            if !ids.insert(e.id.clone()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
        }
        let mut moms = BTreeSet::new();
        for l in &legs {
            if !vs.contains(&l.vertex) {
                return Err(GraphError::UnknownVertex(l.vertex.clone()));
            }
            if !moms.insert(l.momentum.clone()) {
                return Err(GraphError::DuplicateMomentum(l.momentum.clone()));
            }
        }
        let g = FeynmanGraph { vertices, edges, legs };
        if !g.is_connected() {
            return Err(GraphError::NotConnected);
        }
        Ok(g)
    }

    /// Two vertices joined by three edges with masses `m1^2, m2^2, m3^2`.
    pub fn sunrise() -> Self {
        let e = |i: usize| Edge {
            id: format!("e{i}"),
            from: "v1".into(),
            to: "v2".into(),
            mass: Some(format!("m{i}^2")),
        };
        FeynmanGraph::new(
            vec!["v1".into(), "v2".into()],
            vec![e(1), e(2), e(3)],
            vec![
                Leg { vertex: "v1".into(), momentum: "q1".into() },
                Leg { vertex: "v2".into(), momentum: "q2".into() },
            ],
        )
        .expect("sunrise is valid")
    }

    /// Massless or massive one-loop bubble with two edges.
    pub fn bubble(masses: [Option<&str>; 2]) -> Self {
        let edges = (0..2)
            .map(|i| Edge {
                id: format!("e{}", i + 1),
                from: "v1".into(),
                to: "v2".into(),
                mass: masses[i].map(str::to_string),
            })
            .collect();
        FeynmanGraph::new(
            vec!["v1".into(), "v2".into()],
            edges,
            vec![
                Leg { vertex: "v1".into(), momentum: "q1".into() },
                Leg { vertex: "v2".into(), momentum: "q2".into() },
            ],
        )
        .expect("bubble is valid")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_number(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    fn vertex_index(&self, v: &str) -> usize {
        self.vertices.iter().position(|x| x == v).expect("validated vertex")
    }

    fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.vertex_index(&self.edges[e].from), self.vertex_index(&self.edges[e].to))
    }

    fn components(&self, edge_subset: &[usize]) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        for &e in edge_subset {
            let (a, b) = self.endpoints(e);
            uf.union(a, b);
        }
        (0..self.vertices.len()).map(|v| uf.find(v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        let c = self.components(&all);
        c.iter().all(|&x| x == c[0])
    }

    fn is_acyclic(&self, edge_subset: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        edge_subset.iter().all(|&e| {
            let (a, b) = self.endpoints(e);
            uf.union(a, b)
        })
    }

    /// Mass symbols in edge order of first appearance, deduplicated.
    pub fn mass_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if let Some(m) = &e.mass {
                if !out.contains(m) {
                    out.push(m.clone());
                }
            }
        }
        out.sort();
        out
    }

    /// `a1..aN`, then masses, then Mandelstam symbols.
    pub fn var_set(&self, m: &MandelstamDictionary) -> Arc<VarSet> {
        let mut params = self.mass_symbols();
        for s in m.symbols() {
            if !params.contains(&s) {
                params.push(s);
            }
        }
        VarSet::alphas_with_params(self.edges.len(), &params)
    }

    /// Remove edge `e` (may disconnect; not validated).
    pub fn delete_edge(&self, e: usize) -> FeynmanGraph {
        let mut g = self.clone();
        g.edges.remove(e);
        g
    }

    /// Contract edge `e`, merging its endpoints into `from`.
    pub fn contract_edge(&self, e: usize) -> FeynmanGraph {
        let Edge { from, to, .. } = self.edges[e].clone();
        let mut g = self.clone();
        g.edges.remove(e);
        if from != to {
            for x in &mut g.edges {
                if x.from == to {
                    x.from = from.clone();
                }
                if x.to == to {
                    x.to = from.clone();
                }
            }
            for l in &mut g.legs {
                if l.vertex == to {
                    l.vertex = from.clone();
                }
            }
            g.vertices.retain(|v| *v != to);
        }
        g
    }

    pub fn is_self_loop(&self, e: usize) -> bool {
        self.edges[e].from == self.edges[e].to
    }

    pub fn is_bridge(&self, e: usize) -> bool {
        !self.delete_edge(e).is_connected()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    /// False if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut f);
    }
}

/// Leg-bipartition to kinematic symbol map, symmetric under swapping sides.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MandelstamDictionary {
    entries: BTreeMap<BTreeSet<String>, String>,
}

impl MandelstamDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// The sunrise convention `{q1} -> q1^2`.
    pub fn sunrise() -> Self {
        let mut m = Self::new();
        m.insert(["q1"], "q1^2");
        m
    }

    pub fn insert<'a>(&mut self, side: impl IntoIterator<Item = &'a str>, symbol: &str) {
        let key = side.into_iter().map(str::to_string).collect();
        self.entries.insert(key, symbol.to_string());
    }

    /// Look up the symbol for `side` or its complement within `all`.
    pub fn lookup(&self, side: &BTreeSet<String>, all: &BTreeSet<String>) -> Option<&String> {
        if let Some(s) = self.entries.get(side) {
            return Some(s);
        }
        let other: BTreeSet<String> = all.difference(side).cloned().collect();
        self.entries.get(&other)
    }

    pub fn symbols(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.entries.values().cloned().collect();
        set.into_iter().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (String, &String)> {
        self.entries.iter().map(|(k, v)| (k.iter().cloned().collect::<Vec<_>>().join(","), v))
    }
}

/// Values for kinematic symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KinematicPoint(BTreeMap<String, Rat>);

impl KinematicPoint {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(m1^2, m2^2, m3^2, q1^2)` for the sunrise.
    pub fn sunrise(m1: Rat, m2: Rat, m3: Rat, q: Rat) -> Self {
        let mut k = Self::new();
        k.insert("m1^2", m1);
        k.insert("m2^2", m2);
        k.insert("m3^2", m3);
        k.insert("q1^2", q);
        k
    }

    pub fn sunrise_int(m1: i64, m2: i64, m3: i64, q: i64) -> Self {
        let r = |x: i64| Rat::from_integer(x.into());
        Self::sunrise(r(m1), r(m2), r(m3), r(q))
    }

    pub fn insert(&mut self, symbol: &str, value: Rat) {
        self.0.insert(symbol.to_string(), value);
    }

    pub fn get(&self, symbol: &str) -> Option<&Rat> {
        self.0.get(symbol)
    }

    /// Value of a symbol that must be present.
    pub fn value(&self, symbol: &str) -> Rat {
        self.0.get(symbol).cloned().unwrap_or_else(|| panic!("kinematic symbol `{symbol}` missing"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rat)> {
        self.0.iter()
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), Value::String(crate::fmt_rat(v)))).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self, GraphError> {
        let obj = v.as_object().ok_or_else(|| GraphError::Format("kinematics must be an object".into()))?;
        let mut k = Self::new();
        for (name, val) in obj {
            let r = match val {
                Value::String(s) => crate::parse_rat(s),
                Value::Number(n) => n.as_i64().map(|i| Rat::from_integer(i.into())),
                _ => None,
            }
            .ok_or_else(|| GraphError::Format(format!("bad rational for `{name}`")))?;
            k.insert(name, r);
        }
        Ok(k)
    }
}

/// Per-edge subdivision counts `k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionSpec {
    pub counts: Vec<u32>,
}

impl SubdivisionSpec {
    pub fn new(counts: Vec<u32>) -> Self {
        SubdivisionSpec { counts }
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

pub fn spanning_trees(g: &FeynmanGraph) -> Result<Vec<Vec<usize>>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::NotConnected);
    }
    let mut out = Vec::new();
    combinations(g.num_edges(), g.vertices.len() - 1, |s| {
        if g.is_acyclic(s) {
            out.push(s.to_vec());
        }
    });
    Ok(out)
}

/// A spanning 2-forest: edge set and the vertex set of the component holding
/// the first vertex (the other side is the complement).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoForest {
    pub edges: Vec<usize>,
    pub side: BTreeSet<String>,
    pub other: BTreeSet<String>,
}

pub fn spanning_two_forests(g: &FeynmanGraph) -> Result<Vec<TwoForest>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::NotConnected);
    }
    let mut out = Vec::new();
    if g.vertices.len() < 2 {
        return Ok(out);
    }
    combinations(g.num_edges(), g.vertices.len() - 2, |s| {
        if g.is_acyclic(s) {
            let comp = g.components(s);
            let side: BTreeSet<String> =
                (0..g.vertices.len()).filter(|&v| comp[v] == comp[0]).map(|v| g.vertices[v].clone()).collect();
            let other = g.vertices.iter().filter(|v| !side.contains(*v)).cloned().collect();
            out.push(TwoForest { edges: s.to_vec(), side, other });
        }
    });
    Ok(out)
}

fn complement_product(vars: &Arc<VarSet>, n: usize, kept: &[usize]) -> MPoly {
    let mut e = vec![0u32; vars.len()];
    for (i, x) in e.iter_mut().enumerate().take(n) {
        if !kept.contains(&i) {
            *x = 1;
        }
    }
    MPoly::from_terms(vars, [(Monomial(e), Rat::one())])
}

pub fn symanzik_first_in(g: &FeynmanGraph, vars: &Arc<VarSet>) -> Result<MPoly, GraphError> {
    let mut psi = MPoly::zero(vars);
    for t in spanning_trees(g)? {
        psi = psi + complement_product(vars, g.num_edges(), &t);
    }
    Ok(psi)
}

/// First Symanzik polynomial over `a1..aN` and the graph's mass symbols.
pub fn symanzik_first(g: &FeynmanGraph) -> Result<MPoly, GraphError> {
    symanzik_first_in(g, &g.var_set(&MandelstamDictionary::default()))
}

pub fn symanzik_second_in(
    g: &FeynmanGraph,
    m: &MandelstamDictionary,
    vars: &Arc<VarSet>,
) -> Result<MPoly, GraphError> {
    let all_legs: BTreeSet<String> = g.legs.iter().map(|l| l.momentum.clone()).collect();
    let mut xi = MPoly::zero(vars);
    for f in spanning_two_forests(g)? {
        let side_legs: BTreeSet<String> =
            g.legs.iter().filter(|l| f.side.contains(&l.vertex)).map(|l| l.momentum.clone()).collect();
        if side_legs.is_empty() || side_legs.len() == all_legs.len() {
            continue;
        }
        let sym = m.lookup(&side_legs, &all_legs).ok_or_else(|| {
            GraphError::MissingMandelstam(format!(
                "{{{}}} | {{{}}}",
                f.side.iter().cloned().collect::<Vec<_>>().join(","),
                f.other.iter().cloned().collect::<Vec<_>>().join(",")
            ))
        })?;
        let s = MPoly::var_named(vars, sym).map_err(|e| GraphError::Format(e.to_string()))?;
        xi = xi + &s * &complement_product(vars, g.num_edges(), &f.edges);
    }
    let mut mass = MPoly::zero(vars);
    for (i, e) in g.edges.iter().enumerate() {
        if let Some(ms) = &e.mass {
            let mv = MPoly::var_named(vars, ms).map_err(|e| GraphError::Format(e.to_string()))?;
            mass = mass + &mv * &MPoly::var(vars, i);
        }
    }
    Ok(xi + &mass * &symanzik_first_in(g, vars)?)
}

pub fn symanzik_second(g: &FeynmanGraph, m: &MandelstamDictionary) -> Result<MPoly, GraphError> {
    symanzik_second_in(g, m, &g.var_set(m))
}

/// Both Symanzik polynomials over the same variable set.
pub fn symanzik_pair(g: &FeynmanGraph, m: &MandelstamDictionary) -> Result<(MPoly, MPoly), GraphError> {
    let vars = g.var_set(m);
    Ok((symanzik_first_in(g, &vars)?, symanzik_second_in(g, m, &vars)?))
}

/// Replace each edge by a path of `k_i + 1` edges with the same mass. The
/// pieces of an edge are adjacent in the new edge order, the first keeping
/// the original id.
pub fn subdivide(g: &FeynmanGraph, spec: &SubdivisionSpec) -> Result<FeynmanGraph, GraphError> {
    if spec.counts.len() != g.num_edges() {
        return Err(GraphError::SpecLength { got: spec.counts.len(), want: g.num_edges() });
    }
    let mut vertices = g.vertices.clone();
    let mut edges = Vec::new();
    for (e, &k) in g.edges.iter().zip(&spec.counts) {
        let mut prev = e.from.clone();
        for j in 0..=k {
            let next = if j == k {
                e.to.clone()
            } else {
                let v = format!("{}_v{}", e.id, j + 1);
                vertices.push(v.clone());
                v
            };
            let id = if j == 0 { e.id.clone() } else { format!("{}_{}", e.id, j) };
            edges.push(Edge { id, from: prev, to: next.clone(), mass: e.mass.clone() });
            prev = next;
        }
    }
    FeynmanGraph::new(vertices, edges, g.legs.clone())
}

fn laplacian_reduced(g: &FeynmanGraph, weight: impl Fn(usize) -> Rat) -> RatMatrix {
    let n = g.vertices.len();
    let mut l = RatMatrix::zeros(n - 1, n - 1);
    for e in 0..g.num_edges() {
        let (a, b) = g.endpoints(e);
        if a == b {
            continue;
        }
        let w = weight(e);
        for (x, y) in [(a, b), (b, a)] {
            if x < n - 1 {
                let v = l.get(x, x) + &w;
                l.set(x, x, v);
                if y < n - 1 {
                    let v = l.get(x, y) - &w;
                    l.set(x, y, v);
                }
            }
        }
    }
    l
}

/// Number of spanning trees by the matrix-tree theorem.
pub fn kirchhoff_tree_count(g: &FeynmanGraph) -> Rat {
    if g.vertices.len() == 1 {
        return Rat::one();
    }
    laplacian_reduced(g, |_| Rat::one()).determinant()
}

/// Evaluate the first Symanzik polynomial through the weighted matrix-tree
/// theorem; falls back to tree enumeration if some `alpha_e` is zero.
pub fn kirchhoff_oracle_eval(g: &FeynmanGraph, alpha: &[Rat]) -> Result<Rat, GraphError> {
    assert_eq!(alpha.len(), g.num_edges());
    if !g.is_connected() {
        return Err(GraphError::NotConnected);
    }
    if alpha.iter().any(Zero::is_zero) {
        let mut acc = Rat::zero();
        for t in spanning_trees(g)? {
            let mut p = Rat::one();
            for (i, a) in alpha.iter().enumerate() {
                if !t.contains(&i) {
                    p *= a;
                }
            }
            acc += p;
        }
        return Ok(acc);
    }
    let prod = alpha.iter().fold(Rat::one(), |acc, a| acc * a);
    if g.vertices.len() == 1 {
        return Ok(prod);
    }
    Ok(prod * laplacian_reduced(g, |e| alpha[e].recip()).determinant())
}

/// Connected multigraph on `nv` vertices with `ne >= nv - 1` edges: a random
/// spanning tree plus random extra edges (self-loops allowed when `loops`).
pub fn random_graph<R: Rng>(rng: &mut R, nv: usize, ne: usize, loops: bool) -> FeynmanGraph {
    assert!(nv >= 1 && ne + 1 >= nv);
    let vertices: Vec<String> = (1..=nv).map(|i| format!("v{i}")).collect();
    let mut pairs = Vec::new();
    for i in 1..nv {
        pairs.push((rng.gen_range(0..i), i));
    }
    while pairs.len() < ne {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        if a == b && (!loops || nv > 1 && rng.gen_bool(0.7)) {
            continue;
        }
        pairs.push((a, b));
    }
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.gen_range(0..=i));
    }
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Edge {
            id: format!("e{}", i + 1),
            from: vertices[a].clone(),
            to: vertices[b].clone(),
            mass: rng.gen_bool(0.6).then(|| format!("m{}^2", i + 1)),
        })
        .collect();
    let legs = (0..nv.min(3))
        .map(|i| Leg { vertex: vertices[rng.gen_range(0..nv)].clone(), momentum: format!("q{}", i + 1) })
        .collect();
    FeynmanGraph::new(vertices, edges, legs).expect("tree-backed graph is connected")
}

/// Mandelstam dictionary with one fresh symbol `s_<labels>` per leg bipartition.
pub fn generic_mandelstam(g: &FeynmanGraph) -> MandelstamDictionary {
    let legs: Vec<String> = g.legs.iter().map(|l| l.momentum.clone()).collect();
    let mut m = MandelstamDictionary::new();
    let n = legs.len();
    for mask in 1..(1u32 << n) {
        if mask == (1 << n) - 1 || mask & 1 == 0 {
            continue;
        }
        let side: Vec<&str> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| legs[i].as_str()).collect();
        m.insert(side.iter().copied(), &format!("s_{}", side.join("")));
    }
    m
}

/// Graph file: vertices, edges, legs and the Mandelstam dictionary.
pub fn parse_graph_json(text: &str) -> Result<(FeynmanGraph, MandelstamDictionary), GraphError> {
    let v: Value = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
    let fmt = |m: &str| GraphError::Format(m.to_string());
    let as_name = |x: &Value| -> Result<String, GraphError> {
        match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(fmt("vertex names must be strings or numbers")),
        }
    };
    let vertices = v["vertices"]
        .as_array()
        .ok_or_else(|| fmt("missing `vertices`"))?
        .iter()
        .map(as_name)
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = Vec::new();
    for e in v["edges"].as_array().ok_or_else(|| fmt("missing `edges`"))? {
        let mass = match &e["mass"] {
            Value::Null => None,
            Value::Number(n) if n.as_f64() == Some(0.0) => None,
            Value::String(s) if s == "0" => None,
            Value::String(s) => Some(s.clone()),
            _ => return Err(fmt("edge mass must be a symbol or 0")),
        };
        edges.push(Edge { id: as_name(&e["id"])?, from: as_name(&e["from"])?, to: as_name(&e["to"])?, mass });
    }
    let mut legs = Vec::new();
    if let Some(ls) = v["legs"].as_array() {
        for l in ls {
            let momentum = l["momentum"].as_str().ok_or_else(|| fmt("leg momentum must be a string"))?;
            legs.push(Leg { vertex: as_name(&l["vertex"])?, momentum: momentum.to_string() });
        }
    }
    let mut m = MandelstamDictionary::new();
    if let Some(obj) = v["mandelstam"].as_object() {
        for (k, sym) in obj {
            let sym = sym.as_str().ok_or_else(|| fmt("Mandelstam symbols must be strings"))?;
            m.insert(k.split(',').map(str::trim), sym);
        }
    }
    Ok((FeynmanGraph::new(vertices, edges, legs)?, m))
}

pub fn graph_to_json(g: &FeynmanGraph, m: &MandelstamDictionary) -> Value {
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| {
            serde_json::json!({
                "id": e.id, "from": e.from, "to": e.to,
                "mass": e.mass.clone().map_or(Value::from(0), Value::String),
            })
        })
        .collect();
    let legs: Vec<Value> =
        g.legs.iter().map(|l| serde_json::json!({"vertex": l.vertex, "momentum": l.momentum})).collect();
    let mand: serde_json::Map<String, Value> = m.entries().map(|(k, v)| (k, Value::String(v.clone()))).collect();
    serde_json::json!({"vertices": g.vertices, "edges": edges, "legs": legs, "mandelstam": mand})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn path2() -> FeynmanGraph {
        let e = |i: usize, a: &str, b: &str| Edge { id: format!("e{i}"), from: a.into(), to: b.into(), mass: None };
        FeynmanGraph::new(
            vec!["v1".into(), "v2".into(), "v3".into()],
            vec![e(1, "v1", "v2"), e(2, "v2", "v3")],
            vec![],
        )
        .unwrap()
    }

    fn triangle() -> FeynmanGraph {
        let e = |i: usize, a: &str, b: &str| Edge { id: format!("e{i}"), from: a.into(), to: b.into(), mass: None };
        FeynmanGraph::new(
            vec!["v1".into(), "v2".into(), "v3".into()],
            vec![e(1, "v1", "v2"), e(2, "v2", "v3"), e(3, "v3", "v1")],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn sunrise_trees_and_forests() {
        let g = FeynmanGraph::sunrise();
        assert_eq!(spanning_trees(&g).unwrap(), vec![vec![0], vec![1], vec![2]]);
        let f = spanning_two_forests(&g).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f[0].edges.is_empty());
        assert_eq!(f[0].side, BTreeSet::from(["v1".to_string()]));
    }

    #[test]
    fn small_graph_counts() {
        assert_eq!(spanning_trees(&triangle()).unwrap().len(), 3);
        assert_eq!(spanning_two_forests(&path2()).unwrap().len(), 2);
        let single = FeynmanGraph::new(
            vec!["a".into(), "b".into()],
            vec![Edge { id: "e1".into(), from: "a".into(), to: "b".into(), mass: None }],
            vec![],
        )
        .unwrap();
        assert_eq!(spanning_trees(&single).unwrap(), vec![vec![0]]);
        assert_eq!(spanning_two_forests(&single).unwrap().len(), 1);
    }

    #[test]
    fn disconnected_is_rejected() {
        let err = FeynmanGraph::new(vec!["a".into(), "b".into()], vec![], vec![]).unwrap_err();
        assert_eq!(err, GraphError::NotConnected);
    }

    #[test]
    fn sunrise_polynomials() {
        let g = FeynmanGraph::sunrise();
        let (psi, xi) = symanzik_pair(&g, &MandelstamDictionary::sunrise()).unwrap();
        assert_eq!(psi.to_canonical(), "a1*a2 + a1*a3 + a2*a3");
        let vars = psi.vars().clone();
        let want = MPoly::parse(&vars, "q1^2*a1*a2*a3").unwrap()
            + &MPoly::parse(&vars, "m1^2*a1 + m2^2*a2 + m3^2*a3").unwrap() * &psi;
        assert_eq!(xi, want);
    }

    #[test]
    fn bubble_polynomials() {
        let g = FeynmanGraph::bubble([None, None]);
        assert_eq!(symanzik_first(&g).unwrap().to_canonical(), "a1 + a2");
        let mut kin = KinematicPoint::new();
        kin.insert("q1^2", r(0));
        let xi = symanzik_second(&g, &MandelstamDictionary::sunrise()).unwrap();
        assert!(xi.specialize(&kin).is_zero());
    }

    #[test]
    fn only_mass_term_survives() {
        let g = FeynmanGraph::sunrise();
        let (psi, xi) = symanzik_pair(&g, &MandelstamDictionary::sunrise()).unwrap();
        let kin = KinematicPoint::sunrise_int(1, 0, 0, 0);
        let want = &MPoly::var(psi.vars(), 0) * &psi;
        assert_eq!(xi.specialize(&kin), want);
    }

    #[test]
    fn missing_mandelstam_is_named() {
        let err = symanzik_second(&FeynmanGraph::sunrise(), &MandelstamDictionary::new()).unwrap_err();
        assert!(matches!(err, GraphError::MissingMandelstam(s) if s.contains("v1")));
    }

    #[test]
    fn subdivision_shapes() {
        let g = FeynmanGraph::sunrise();
        let s1 = subdivide(&g, &SubdivisionSpec::new(vec![1, 0, 0])).unwrap();
        assert_eq!(s1.num_edges(), 4);
        assert_eq!(s1.loop_number(), 2);
        assert_eq!(s1.edges()[0].mass, s1.edges()[1].mass);
        let s2 = subdivide(&g, &SubdivisionSpec::new(vec![1, 2, 0])).unwrap();
        assert_eq!(s2.num_edges(), 6);
        assert_eq!(s2.loop_number(), 2);
        assert_eq!(subdivide(&g, &SubdivisionSpec::new(vec![0, 0, 0])).unwrap(), g);
    }

    #[test]
    fn kirchhoff_examples() {
        let g = FeynmanGraph::sunrise();
        assert_eq!(kirchhoff_oracle_eval(&g, &[r(1), r(1), r(1)]).unwrap(), r(3));
        assert_eq!(kirchhoff_oracle_eval(&g, &[r(1), r(2), r(3)]).unwrap(), r(11));
        assert_eq!(kirchhoff_oracle_eval(&g, &[r(0), r(2), r(3)]).unwrap(), r(6));
        let b = FeynmanGraph::bubble([None, None]);
        assert_eq!(kirchhoff_oracle_eval(&b, &[r(2), r(3)]).unwrap(), r(5));
        assert_eq!(kirchhoff_tree_count(&triangle()), r(3));
    }

    #[test]
    fn json_roundtrip() {
        let g = FeynmanGraph::sunrise();
        let m = MandelstamDictionary::sunrise();
        let text = graph_to_json(&g, &m).to_string();
        let (g2, m2) = parse_graph_json(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(m, m2);
    }
}
