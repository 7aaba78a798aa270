//! Exact and numeric tools for Feynman graph periods: Symanzik polynomials,
//! edge subdivision, the sunrise residue coordinates and elliptic period checks.

pub mod graph;
pub mod integrand;
pub mod motive_sunrise;
pub mod periods;
pub mod polynomial;

pub use graph::{FeynmanGraph, KinematicPoint, MandelstamDictionary, SubdivisionSpec};
pub use integrand::{OmegaKind, ProjForm};
pub use polynomial::{MPoly, Rat, VarSet};

/// Parse a rational from `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: num_bigint::BigInt = p.trim().parse().ok()?;
            let q: num_bigint::BigInt = q.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&q) {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Format a rational as `"p/q"`, or `"p"` when integral.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
