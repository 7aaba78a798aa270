//! Birational reduction of a plane cubic with a rational point to short
//! Weierstrass form `y^2 = x^3 + a x + b`, over the rationals.
//!
//! The base point is moved to `[0:0:1]`; lines through it cut the cubic in a
//! pair of points given by a quadratic whose discriminant `D(t)` is a quartic
//! in the slope, so the curve is `s^2 = D(t)`. The tangent at the base point
//! gives a rational point on the quartic, from which the classical quartic to
//! cubic formulas lead to a long Weierstrass equation and then to the short
//! one.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{PeriodError, Result};
use crate::polynomial::linalg::RatMatrix;
use crate::polynomial::Monomial;
use crate::{fmt_rat, MPoly, Rat, VarSet};

#[derive(Clone, Debug)]
enum MapKind {
    Identity,
    /// Rational point `(0, e)` on the quartic with `e != 0`.
    Quartic,
    /// Base point is a flex: the quartic has a root at the tangent slope.
    Flex,
}

#[derive(Clone, Debug)]
pub struct WeierstrassModel {
    pub a: Rat,
    pub b: Rat,
    kind: MapKind,
    /// New coordinates `(X, Y, Z) = inv * old`.
    inv: RatMatrix,
    g1: [Rat; 2],
    g2: [Rat; 3],
    t0: Rat,
    e: Rat,
    /// Shifted quartic `q(T) = D(t0 + T)`, low degree first.
    q: [Rat; 5],
    a1: Rat,
    a3: Rat,
    b2: Rat,
}

fn q(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn horner(c: &[Rat], t: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, x| acc * t + x)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(t0 + T)`.
fn taylor_shift(p: &[Rat], t0: &Rat) -> Vec<Rat> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let v = &c[j + 1] * t0;
            c[j] += v;
        }
    }
    c
}

impl WeierstrassModel {
    /// `4a^3 + 27b^2`.
    pub fn discriminant(&self) -> Rat {
        discriminant(&self.a, &self.b)
    }

    pub fn j_invariant(&self) -> Rat {
        let a3 = q(4) * &self.a * &self.a * &self.a;
        q(1728) * &a3 / self.discriminant()
    }

    /// Whether `(x, y)` lies on `y^2 = x^3 + a x + b`.
    pub fn contains(&self, p: &(Rat, Rat)) -> bool {
        let (x, y) = p;
        y * y == x * x * x + &self.a * x + &self.b
    }

    /// Image of a point of the cubic (projective coordinates). `None` on the
    /// tangent line at the base point, where the formulas have a removable
    /// singularity or the image is the point at infinity.
    pub fn push_forward(&self, p: &[Rat; 3]) -> Option<(Rat, Rat)> {
        let n = self.inv.mul_vec(p);
        let (x, y, z) = (&n[0], &n[1], &n[2]);
        if let MapKind::Identity = self.kind {
            if z.is_zero() {
                return None;
            }
            return Some((x / z, y / z));
        }
        // homogeneous in (X, Y, Z): s X^2 = 2 g1 Z + g2, T = U / X with U = Y - t0 X
        let sh = q(2) * (&self.g1[0] * x + &self.g1[1] * y) * z
            + &self.g2[0] * x * x
            + &self.g2[1] * x * y
            + &self.g2[2] * y * y;
        let u = y - &self.t0 * x;
        if u.is_zero() {
            return None;
        }
        let (c, d) = (&self.q[2], &self.q[1]);
        let (lx, ly) = match self.kind {
            MapKind::Quartic => {
                let e = &self.e;
                let u2 = &u * &u;
                let lx = (q(2) * e * &sh + q(2) * e * e * x * x + d * &u * x) / &u2;
                let ly = (q(4) * e * e * (e * x * x * x + &sh * x) + q(2) * e * (d * &u * x * x + c * &u2 * x)
                    - d * d * &u2 * x / (q(2) * e))
                    / (u2 * &u);
                (lx, ly)
            }
            MapKind::Flex => (d * x / &u, d * &sh / (&u * &u)),
            MapKind::Identity => unreachable!(),
        };
        let xs = q(36) * &lx + q(3) * &self.b2;
        let ys = q(108) * (q(2) * ly + &self.a1 * &lx + &self.a3);
        Some((xs, ys))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": fmt_rat(&self.a),
            "b": fmt_rat(&self.b),
            "discriminant": fmt_rat(&self.discriminant()),
            "j": fmt_rat(&self.j_invariant()),
        })
    }
}

fn discriminant(a: &Rat, b: &Rat) -> Rat {
    q(4) * a * a * a + q(27) * b * b
}

fn coeff(g: &MPoly, e: [u32; 3]) -> Rat {
    g.coeff(&Monomial(e.to_vec()))
}

/// Restrict `f` to its first three variables (all others must be absent).
fn plane_cubic(f: &MPoly) -> Result<MPoly> {
    let vars = VarSet::new(vec!["X".into(), "Y".into(), "Z".into()], 3);
    let mut out = MPoly::zero(&vars);
    for (m, c) in f.terms() {
        if m.0.len() < 3 || m.0[3..].iter().any(|&e| e != 0) || m.degree_in(0..3) != 3 {
            return Err(PeriodError::Invalid("expected a homogeneous cubic in three variables".into()));
        }
        out.add_term(Monomial(m.0[..3].to_vec()), c.clone());
    }
    Ok(out)
}

fn identity_form(f: &MPoly, base: &[Rat; 3]) -> Option<(Rat, Rat)> {
    if !(base[0].is_zero() && base[2].is_zero() && !base[1].is_zero()) {
        return None;
    }
    let lead = coeff(f, [0, 2, 1]);
    if lead.is_zero() {
        return None;
    }
    let allowed = [[0, 2, 1], [3, 0, 0], [1, 0, 2], [0, 0, 3]];
    if f.terms().any(|(m, _)| !allowed.iter().any(|a| m.0 == a.to_vec())) {
        return None;
    }
    if coeff(f, [3, 0, 0]) / &lead != -Rat::one() {
        return None;
    }
    Some((-coeff(f, [1, 0, 2]) / &lead, -coeff(f, [0, 0, 3]) / lead))
}

/// Short Weierstrass model of the plane cubic `f` (in its first three
/// variables) with the rational point `base`.
pub fn to_weierstrass(f: &MPoly, base: &[Rat; 3]) -> Result<WeierstrassModel> {
    let f = plane_cubic(f)?;
    let vars: Arc<VarSet> = f.vars().clone();
    if base.iter().all(Zero::is_zero) {
        return Err(PeriodError::Invalid("base point [0:0:0]".into()));
    }
    if !f.eval(base).is_zero() {
        return Err(PeriodError::Invalid("base point is not on the cubic".into()));
    }
    if let Some((a, b)) = identity_form(&f, base) {
        if discriminant(&a, &b).is_zero() {
            return Err(PeriodError::Singular("4a^3 + 27b^2 = 0".into()));
        }
        let z = || Rat::zero();
        return Ok(WeierstrassModel {
            a,
            b,
            kind: MapKind::Identity,
            inv: RatMatrix::identity(3),
            g1: [z(), z()],
            g2: [z(), z(), z()],
            t0: z(),
            e: z(),
            q: [z(), z(), z(), z(), z()],
            a1: z(),
            a3: z(),
            b2: z(),
        });
    }
    // columns: two unit vectors completing the base point to a basis
    let k = (0..3).find(|&i| !base[i].is_zero()).expect("nonzero base point");
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let build = |order: [usize; 2]| {
        let mut m = RatMatrix::zeros(3, 3);
        m.set(order[0], 0, Rat::one());
        m.set(order[1], 1, Rat::one());
        for (i, v) in base.iter().enumerate() {
            m.set(i, 2, v.clone());
        }
        m
    };
    let mut order = [others[0], others[1]];
    let mut m = build(order);
    let mut g = substitute(&f, &m, &vars);
    let mut g1 = [coeff(&g, [1, 0, 2]), coeff(&g, [0, 1, 2])];
    if g1[0].is_zero() && g1[1].is_zero() {
        return Err(PeriodError::Singular("base point is a singular point of the cubic".into()));
    }
    if g1[1].is_zero() {
        order.swap(0, 1);
        m = build(order);
        g = substitute(&f, &m, &vars);
        g1 = [coeff(&g, [1, 0, 2]), coeff(&g, [0, 1, 2])];
    }
    let g2 = [coeff(&g, [2, 0, 1]), coeff(&g, [1, 1, 1]), coeff(&g, [0, 2, 1])];
    let g3 = [coeff(&g, [3, 0, 0]), coeff(&g, [2, 1, 0]), coeff(&g, [1, 2, 0]), coeff(&g, [0, 3, 0])];
    let mut dq = poly_mul(&g2, &g2);
    for (i, v) in poly_mul(&g1, &g3).into_iter().enumerate() {
        dq[i] -= q(4) * v;
    }
    let t0 = -&g1[0] / &g1[1];
    let e = horner(&g2, &t0);
    let shifted = taylor_shift(&dq, &t0);
    let qc: [Rat; 5] = std::array::from_fn(|i| shifted.get(i).cloned().unwrap_or_else(Rat::zero));
    debug_assert_eq!(qc[0], &e * &e);
    let (qa, qb, qcc, qd) = (&qc[4], &qc[3], &qc[2], &qc[1]);
    let (kind, a1, a2, a3, a4, a6) = if !e.is_zero() {
        let a1 = qd / &e;
        let a2 = qcc - qd * qd / (q(4) * &e * &e);
        let a3 = q(2) * &e * qb;
        let a4 = -q(4) * &e * &e * qa;
        let a6 = &a2 * &a4;
        (MapKind::Quartic, a1, a2, a3, a4, a6)
    } else {
        if qd.is_zero() {
            return Err(PeriodError::Singular("tangent slope is a multiple root of the quartic".into()));
        }
        (MapKind::Flex, Rat::zero(), qcc.clone(), Rat::zero(), qb * qd, qa * qd * qd)
    };
    let b2 = &a1 * &a1 + q(4) * &a2;
    let b4 = q(2) * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + q(4) * &a6;
    let c4 = &b2 * &b2 - q(24) * &b4;
    let c6 = -(&b2 * &b2 * &b2) + q(36) * &b2 * &b4 - q(216) * &b6;
    let a = -q(27) * c4;
    let b = -q(54) * c6;
    if discriminant(&a, &b).is_zero() {
        return Err(PeriodError::Singular("4a^3 + 27b^2 = 0".into()));
    }
    let inv = m.inverse().expect("completed basis");
    Ok(WeierstrassModel { a, b, kind, inv, g1, g2, t0, e, q: qc, a1, a3, b2 })
}

fn substitute(f: &MPoly, m: &RatMatrix, vars: &Arc<VarSet>) -> MPoly {
    let images: Vec<MPoly> = (0..3)
        .map(|i| {
            let mut p = MPoly::zero(vars);
            for j in 0..3 {
                p.add_term(Monomial::var(3, j), m.get(i, j).clone());
            }
            p
        })
        .collect();
    f.substitute(vars, &images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn cubic(s: &str) -> MPoly {
        MPoly::parse(&VarSet::new(vec!["x".into(), "y".into(), "z".into()], 3), s).unwrap()
    }

    #[test]
    fn weierstrass_input_is_kept() {
        let f = cubic("y^2*z + -x^3 + 2 * x*z^2 + -3 * z^3");
        let w = to_weierstrass(&f, &[r(0, 1), r(1, 1), r(0, 1)]).unwrap();
        assert_eq!((w.a.clone(), w.b.clone()), (r(-2, 1), r(3, 1)));
        assert_eq!(w.push_forward(&[r(1, 1), r(2, 1), r(1, 1)]), Some((r(1, 1), r(2, 1))));
    }

    #[test]
    fn fermat_cubic_has_j_zero() {
        let f = cubic("x^3 + y^3 + -z^3");
        for base in [[r(1, 1), r(0, 1), r(1, 1)], [r(0, 1), r(1, 1), r(1, 1)], [r(1, 1), r(-1, 1), r(0, 1)]] {
            let w = to_weierstrass(&f, &base).unwrap();
            assert!(w.j_invariant().is_zero());
        }
    }

    #[test]
    fn points_are_pushed_onto_the_model() {
        let f = cubic("x^2*y + x*y^2 + y^2*z + 3 * x*z^2 + -z^3 + x^3");
        let base = [r(0, 1), r(1, 1), r(0, 1)];
        assert!(f.eval(&base).is_zero());
        let w = to_weierstrass(&f, &base).unwrap();
        let mut hits = 0;
        for x in -6..=6 {
            for y in -6..=6 {
                let p = [r(x, 1), r(y, 1), r(1, 1)];
                if f.eval(&p).is_zero() {
                    if let Some(img) = w.push_forward(&p) {
                        assert!(w.contains(&img));
                        hits += 1;
                    }
                }
            }
        }
        assert!(hits >= 2);
    }

    #[test]
    fn nodal_cubic_rejected() {
        let f = cubic("y^2*z + -x^3 + -x^2*z");
        assert!(matches!(to_weierstrass(&f, &[r(0, 1), r(1, 1), r(0, 1)]), Err(PeriodError::Singular(_))));
        assert!(matches!(to_weierstrass(&f, &[r(0, 1), r(0, 1), r(1, 1)]), Err(PeriodError::Singular(_))));
    }
}
