use feynkit_core::graph::{self, random_graph, FeynmanGraph};
use feynkit_core::integrand::lemma_substitution_holds;
use feynkit_core::polynomial::{check_reconstruction, graded_solve, Monomial, VarSet};
use feynkit_core::{KinematicPoint, MPoly, Rat};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn poly_strategy() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), -9i64..10, 1i64..5), 0..6).prop_map(|terms| {
        let v = VarSet::alphas_with_params(3, &[]);
        MPoly::from_terms(&v, terms.into_iter().map(|((a, b, c), n, d)| (Monomial(vec![a, b, c]), q(n, d))))
    })
}

fn graph_strategy() -> impl Strategy<Value = FeynmanGraph> {
    (any::<u64>(), 2usize..6, 0usize..4).prop_map(|(seed, nv, extra)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ne = (nv - 1 + extra).clamp(nv, 8);
        random_graph(&mut rng, nv, ne, true)
    })
}

fn eval_alpha(p: &MPoly, alpha: &[Rat]) -> Rat {
    let mut x = alpha.to_vec();
    x.resize(p.nvars(), Rat::zero());
    p.eval(&x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(MPoly::parse(a.vars(), &a.to_canonical()).unwrap(), a);
    }

    #[test]
    fn kirchhoff_and_tree_count(g in graph_strategy(), w in prop::collection::vec(1i64..20, 8)) {
        let psi = graph::symanzik_first(&g).unwrap();
        let alpha: Vec<Rat> = w[..g.num_edges()].iter().map(|&x| q(x, 3)).collect();
        prop_assert_eq!(eval_alpha(&psi, &alpha), graph::kirchhoff_oracle_eval(&g, &alpha).unwrap());
        let ones = vec![q(1, 1); g.num_edges()];
        prop_assert_eq!(eval_alpha(&psi, &ones), graph::kirchhoff_tree_count(&g));
    }

    #[test]
    fn contraction_deletion(g in graph_strategy(), w in prop::collection::vec(1i64..20, 8)) {
        let psi = graph::symanzik_first(&g).unwrap();
        let alpha: Vec<Rat> = w[..g.num_edges()].iter().map(|&x| q(x, 7)).collect();
        for e in 0..g.num_edges() {
            if g.is_bridge(e) || g.is_self_loop(e) {
                continue;
            }
            let rest: Vec<Rat> = alpha.iter().enumerate().filter(|&(i, _)| i != e).map(|(_, a)| a.clone()).collect();
            let del = eval_alpha(&graph::symanzik_first(&g.delete_edge(e)).unwrap(), &rest);
            let con = eval_alpha(&graph::symanzik_first(&g.contract_edge(e)).unwrap(), &rest);
            prop_assert_eq!(eval_alpha(&psi, &alpha), &alpha[e] * del + con);
        }
    }

    #[test]
    fn lemma_on_random_graphs(g in graph_strategy(), pick in any::<prop::sample::Index>()) {
        let m = graph::generic_mandelstam(&g);
        let e = pick.index(g.num_edges());
        prop_assert!(lemma_substitution_holds(&g, e, &m).unwrap());
    }

    #[test]
    fn graded_solve_reconstructs(coeffs in prop::collection::vec(-5i64..6, 10), mult in prop::collection::vec(-3i64..4, 9)) {
        let v = VarSet::alphas_with_params(3, &[]);
        let cubic = MPoly::from_terms(
            &v,
            cubic_monomials().into_iter().zip(&coeffs).map(|(m, &c)| (m, q(c, 1))),
        );
        prop_assume!(!cubic.is_zero());
        let gens: Vec<MPoly> = (0..3).map(|i| cubic.partial(i)).collect();
        let lin = |k: usize| MPoly::from_terms(&v, (0..3).map(|i| (Monomial::var(3, i), q(mult[3 * k + i], 1))));
        let target = (0..3).fold(MPoly::zero(&v), |acc, k| acc + &lin(k) * &gens[k]);
        prop_assume!(!target.is_zero());
        let kin = KinematicPoint::default();
        let sol = graded_solve(&target, &gens, &[], 3, &kin).unwrap();
        prop_assert!(!sol.residual);
        prop_assert!(check_reconstruction(&target, &gens, &[], &sol, &kin));
    }
}

fn cubic_monomials() -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..=3u32 {
        for b in 0..=3 - a {
            out.push(Monomial(vec![a, b, 3 - a - b]));
        }
    }
    out
}
