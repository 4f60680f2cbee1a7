//! Property tests for the invariants each module promises.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soergel::bimodule::{check_equal, Oracle};
use soergel::expr::{random_expression, random_expression_with, FuzzOptions};
use soergel::lightleaves::{enumerate_fl, is_member_fl, transported_basis, DEFAULT_BOUND};
use soergel::measures::stats;
use soergel::poly::{act, demazure, i_op, p_op, rat, x_form};
use soergel::rewrite::Normalizer;
use soergel::{CoxeterGraph, Expression, Gen, Kind, LinComb, Order, Poly, Rat, RepCoefficients, Word};

fn systems() -> Vec<CoxeterGraph> {
    CoxeterGraph::test_systems().into_iter().map(|(_, g)| g).collect()
}

/// A graph from the test systems with a polynomial in its variables.
fn graph_and_poly() -> impl Strategy<Value = (CoxeterGraph, Poly, Poly)> {
    (0..4usize).prop_flat_map(|i| {
        let g = systems().swap_remove(i);
        let n = g.rank();
        let poly = prop::collection::vec((prop::collection::vec(0..3u32, n), -4i64..5), 0..5).prop_map(|ts| {
            let mut p = Poly::zero();
            for (exps, c) in ts {
                let mut m = Poly::int(c);
                for (v, e) in exps.into_iter().enumerate() {
                    m = &m * &Poly::var(v).pow(e);
                }
                p += &m;
            }
            p
        });
        (Just(g), poly.clone(), poly)
    })
}

fn random_word(g: &CoxeterGraph, rng: &mut ChaCha8Rng, max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    Word((0..n).map(|_| Gen(rng.gen_range(0..g.rank()))).collect())
}

/// A seeded R-expression on one of the test systems.
fn r_expression(seed: u64) -> (CoxeterGraph, Expression) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = systems().swap_remove(rng.gen_range(0..4));
    let w = random_word(&g, &mut rng, 5);
    let e = random_expression(&g, &w, 7, rng.gen()).unwrap();
    (g, e)
}

/// A seeded expression with arbitrary codomain.
fn open_expression(seed: u64) -> (CoxeterGraph, Expression) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = systems().swap_remove(rng.gen_range(0..4));
    let w = random_word(&g, &mut rng, 4);
    let opts = FuzzOptions { max_len: 5, allow_x: true, allow_alpha: true, to_unit: false };
    let e = random_expression_with(&g, &w, &opts, &mut rng).unwrap();
    (g, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reflections_are_involutions((g, p, _) in graph_and_poly()) {
        for s in g.gens() {
            prop_assert_eq!(act(s, &act(s, &p, &g), &g), p.clone());
        }
    }

    #[test]
    fn invariant_and_divided_parts_recompose((g, p, _) in graph_and_poly()) {
        for s in g.gens() {
            let inv = p_op(s, &p, &g);
            let d = demazure(s, &p, &g);
            prop_assert_eq!(&inv + &(&x_form(s, &g) * &d), p.clone());
            prop_assert_eq!(act(s, &inv, &g), inv.clone());
            prop_assert_eq!(act(s, &d, &g), d.clone());
            prop_assert_eq!(&inv + &i_op(s, &p, &g), p.clone());
        }
    }

    #[test]
    fn divided_differences_are_twisted_derivations((g, p, q) in graph_and_poly()) {
        for s in g.gens() {
            let lhs = demazure(s, &(&p * &q), &g);
            let rhs = &(&demazure(s, &p, &g) * &q) + &(&act(s, &p, &g) * &demazure(s, &q, &g));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn specialization_is_a_ring_morphism((g, p, q) in graph_and_poly(), pt in prop::collection::vec(-5i64..6, 3)) {
        let point: Vec<Rat> = pt.into_iter().take(g.rank()).map(rat).collect();
        let (a, b) = (p.specialize(&point).unwrap(), q.specialize(&point).unwrap());
        prop_assert_eq!((&p + &q).specialize(&point).unwrap(), &a + &b);
        prop_assert_eq!((&p * &q).specialize(&point).unwrap(), a * b);
    }

    #[test]
    fn expressions_print_and_parse_back(seed in any::<u64>()) {
        let (g, e) = open_expression(seed);
        prop_assert_eq!(Expression::parse(&e.to_text(&g), &g).unwrap(), e);
    }

    #[test]
    fn widths_account_for_the_codomain(seed in any::<u64>()) {
        let (g, e) = open_expression(seed);
        let codomain = e.typecheck(&g).unwrap();
        let grown: isize = e.terms.iter().map(|t| t.out_width() as isize - t.in_width() as isize).sum();
        prop_assert_eq!(codomain.len() as isize, e.domain.len() as isize + grown);
    }

    #[test]
    fn prefixes_typecheck(seed in any::<u64>()) {
        let (g, e) = open_expression(seed);
        let words = e.words(&g).unwrap();
        for k in 0..=e.len() {
            let prefix = Expression::new(e.domain.clone(), e.terms[..k].to_vec());
            prop_assert_eq!(prefix.typecheck(&g).unwrap(), words[k].clone());
        }
    }

    #[test]
    fn measures_are_consistent(seed in any::<u64>()) {
        let (g, e) = r_expression(seed);
        let r = stats(&e, &g).unwrap();
        prop_assert_eq!(stats(&e, &g).unwrap(), r.clone());
        let js = e.terms.iter().filter(|t| matches!(t.kind, Kind::J(_))).count();
        let ms = e.terms.iter().filter(|t| matches!(t.kind, Kind::M(_))).count();
        prop_assert_eq!(r.j_positions.len(), js);
        prop_assert!(r.m_bad_count <= ms && r.j_bad_count <= js);
        prop_assert_eq!(r.f_count, e.terms.iter().filter(|t| matches!(t.kind, Kind::F(..))).count());
        if js + ms == 0 {
            prop_assert_eq!((r.depth_mj, r.min_m_bad, r.max_j_bad), (0, 0, 0));
        }
    }

    #[test]
    fn evaluation_is_functorial(seed in any::<u64>()) {
        let (g, e) = open_expression(seed);
        let o = Oracle::new(&g);
        let whole = o.eval_expression(&e).unwrap();
        prop_assert_eq!(whole.cols(), 1 << e.domain.len());
        prop_assert_eq!(whole.rows(), 1 << e.typecheck(&g).unwrap().len());
        let cut = e.len() / 2;
        let head = Expression::new(e.domain.clone(), e.terms[..cut].to_vec());
        let tail = Expression::new(head.typecheck(&g).unwrap(), e.terms[cut..].to_vec());
        let composed = o.eval_expression(&head).unwrap().then(&o.eval_expression(&tail).unwrap());
        prop_assert_eq!(composed, whole);
    }

    #[test]
    fn evaluation_is_left_linear(seed in any::<u64>(), c in -3i64..4, v in 0..2usize) {
        let (g, e) = open_expression(seed);
        let o = Oracle::new(&g);
        let codomain = e.typecheck(&g).unwrap();
        let scalar = &Poly::int(c) + &Poly::var(v.min(g.rank() - 1));
        let lhs = o.eval_lincomb(&LinComb::term(e.clone(), scalar.clone()), &e.domain, &codomain).unwrap();
        prop_assert_eq!(lhs, o.eval_expression(&e).unwrap().scale(&scalar));
    }

    #[test]
    fn rewriting_stages_preserve_evaluation(seed in any::<u64>()) {
        let (g, e) = r_expression(seed);
        let o = Oracle::new(&g);
        let n = Normalizer::new(&g).unwrap();
        let input = LinComb::single(e.clone());
        let (f1, _) = n.f1(&e).unwrap();
        prop_assert!(check_equal(&o, &input, &f1, &e.domain, &Word::empty()).is_ok());
        let (alpha, _) = n.alpha_eliminate(&e).unwrap();
        prop_assert!(check_equal(&o, &input, &alpha, &e.domain, &Word::empty()).is_ok());
        prop_assert!(alpha.expressions().all(|x| !x.has_alpha() && !x.has_x()));
        let out = n.normalize(&e).unwrap().result;
        prop_assert!(check_equal(&o, &input, &out, &e.domain, &Word::empty()).is_ok());
        prop_assert_eq!(n.normalize_lincomb(&out).unwrap().result, out);
    }
}

#[test]
fn root_forms_have_the_tabulated_divided_differences() {
    for g in systems() {
        let c = RepCoefficients::new(&g).unwrap();
        for t in g.gens() {
            for s in g.gens() {
                let d = demazure(t, &x_form(s, &g), &g);
                assert_eq!(d, Poly::constant(c.mu(t, s).clone()));
                if t != s && g.order(t, s) == Order::Two {
                    assert_eq!(p_op(t, &x_form(s, &g), &g), x_form(s, &g));
                    assert!(i_op(t, &x_form(s, &g), &g).is_zero());
                }
            }
        }
    }
}

#[test]
fn enumerated_leaves_are_members() {
    for g in systems() {
        for w in Word::all_up_to(&g, 4) {
            for leaf in enumerate_fl(&w, &g, DEFAULT_BOUND).unwrap() {
                assert!(is_member_fl(&leaf.expression(&g), &g).unwrap(), "{}", leaf.moves_text());
            }
        }
    }
}

#[test]
fn transported_bases_depend_only_on_the_folded_word() {
    for g in systems() {
        for w in Word::all_up_to(&g, 3) {
            for t in g.gens() {
                for u in Word::all_up_to(&g, 1) {
                    let mut tu = vec![t];
                    tu.extend_from_slice(u.letters());
                    let mut tw = vec![t];
                    tw.extend_from_slice(w.letters());
                    let a = transported_basis(&w, &Word(tu), &g, DEFAULT_BOUND).unwrap();
                    let b = transported_basis(&Word(tw), &u, &g, DEFAULT_BOUND).unwrap();
                    assert_eq!(a.len(), b.len());
                }
            }
        }
    }
}
