//! The acceptance suite. Each criterion prints one `PASS` or `FAIL` line with
//! a short summary, written past the test harness capture so it shows up in
//! plain `cargo test` output.

use std::io::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use soergel::bimodule::{check_equal, independent, Oracle};
use soergel::expr::{random_expression, random_expression_with, FuzzOptions};
use soergel::lightleaves::{
    curry_f, enumerate_fl, expand, expression_of, membership, uncurry_g, Move, DEFAULT_BOUND,
};
use soergel::rewrite::{check_rule, registry, Normalizer};
use soergel::{CoxeterGraph, Error, Expression, Gen, LinComb, Word};

fn report(n: u32, title: &str, outcome: Result<String, String>) {
    let line = match &outcome {
        Ok(detail) => format!("PASS criterion {n} ({title}): {detail}"),
        Err(detail) => format!("FAIL criterion {n} ({title}): {detail}"),
    };
    writeln!(std::io::stdout().lock(), "{line}").unwrap();
    if let Err(detail) = outcome {
        panic!("criterion {n} failed: {detail}");
    }
}

fn random_word(g: &CoxeterGraph, rng: &mut ChaCha8Rng, max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    Word((0..n).map(|_| Gen(rng.gen_range(0..g.rank()))).collect())
}

/// Seeded R-expressions over `g` with word length ≤ 6 and chain length ≤ 8.
fn corpus(g: &CoxeterGraph, count: usize, seed: u64) -> Vec<Expression> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = random_word(g, &mut rng, 6);
            random_expression(g, &w, 8, rng.gen()).unwrap()
        })
        .collect()
}

/// A random sequence of legal moves consuming `word`, in any order.
fn random_moves(g: &CoxeterGraph, word: &Word, rng: &mut ChaCha8Rng) -> Vec<Move> {
    let mut w = word.clone();
    let mut moves = Vec::new();
    while !w.is_empty() {
        let l = w.len();
        let t = rng.gen_range(0..l);
        let mut options = vec![Move::m(t)];
        for src in t..l.saturating_sub(1) {
            options.push(Move::ch(t, src));
            options.push(Move::cch(t, src));
        }
        let legal: Vec<Move> = options.into_iter().filter(|mv| expand(mv, &w, g).is_ok()).collect();
        let mv = legal[rng.gen_range(0..legal.len())];
        w = expand(&mv, &w, g).unwrap().1;
        moves.push(mv);
    }
    moves
}

#[test]
fn criterion_1_relation_suite() {
    let mut total = 0;
    let mut failures = Vec::new();
    for (name, g) in CoxeterGraph::test_systems() {
        let o = Oracle::new(&g);
        for rule in registry(&g).unwrap() {
            total += 1;
            if let Err(m) = check_rule(&o, &rule) {
                failures.push(format!("{name} {} at {}", rule.label, m.basis));
            }
        }
    }
    let outcome = if failures.is_empty() {
        Ok(format!("{total} rule instances on 4 systems, exact equality"))
    } else {
        Err(format!("{} of {total} instances fail: {}", failures.len(), failures.join(", ")))
    };
    report(1, "relation suite", outcome);
}

#[test]
fn criterion_2_normalization_soundness() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, g, seed) in [("Iinf", CoxeterGraph::infinite_dihedral(), 2), ("mixed", CoxeterGraph::mixed(), 3)] {
        let cases = corpus(&g, 500, seed);
        let results: Vec<Option<String>> = cases
            .par_iter()
            .map(|e| {
                let o = Oracle::new(&g);
                let out = match Normalizer::new(&g).unwrap().normalize(e) {
                    Ok(out) => out.result,
                    Err(err) => return Some(format!("{name} {}: {err}", e.to_text(&g))),
                };
                check_equal(&o, &LinComb::single(e.clone()), &out, &e.domain, &Word::empty())
                    .err()
                    .map(|m| format!("{name} {}: differs at {}", e.to_text(&g), m.basis))
            })
            .collect();
        checked += cases.len();
        failures.extend(results.into_iter().flatten());
    }
    let outcome = if failures.is_empty() {
        Ok(format!("{checked} fuzzed R-expressions oracle-equal to their normal forms"))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    };
    report(2, "normalization soundness", outcome);
}

#[test]
fn criterion_3_normal_form_membership() {
    let mut outputs = 0;
    let mut failures = Vec::new();
    for (name, g) in CoxeterGraph::test_systems() {
        let n = Normalizer::new(&g).unwrap();
        for e in corpus(&g, 100, 11) {
            let Ok(out) = n.normalize(&e) else {
                failures.push(format!("{name} {}: normalize failed", e.to_text(&g)));
                continue;
            };
            for x in out.result.expressions() {
                outputs += 1;
                let m = membership(x, &g);
                if !(m.by_moves && m.by_measures) {
                    failures.push(format!("{name} {}: {m:?}", x.to_text(&g)));
                }
            }
        }
    }
    // Agreement of the two characterizations on candidates in move form (in
    // any order) and on unstructured expressions without scalars.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let systems = CoxeterGraph::test_systems();
    let mut positives = 0;
    let plain = FuzzOptions { max_len: 8, allow_x: false, allow_alpha: false, to_unit: true };
    for i in 0..1000 {
        let (name, g) = &systems[i % systems.len()];
        let w = random_word(g, &mut rng, 5);
        let e = if i % 4 == 3 {
            random_expression_with(g, &w, &plain, &mut rng).unwrap()
        } else {
            let moves = random_moves(g, &w, &mut rng);
            expression_of(&w, &moves, g).unwrap()
        };
        let m = membership(&e, g);
        positives += usize::from(m.by_moves);
        if m.by_moves != m.by_measures {
            failures.push(format!("{name} {}: characterizations disagree {m:?}", e.to_text(g)));
        }
    }
    let outcome = if failures.is_empty() {
        Ok(format!(
            "{outputs} normal-form expressions pass both tests; 1000 candidates agree ({positives} members)"
        ))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    };
    report(3, "normal-form membership", outcome);
}

#[test]
fn criterion_4_basis_independence() {
    let mut failures = Vec::new();
    let mut words = 0;
    for (name, g) in CoxeterGraph::test_systems() {
        let all = Word::all_up_to(&g, 5);
        words += all.len();
        let bad: Vec<String> = all
            .par_iter()
            .filter_map(|w| {
                let o = Oracle::new(&g);
                let leaves = enumerate_fl(w, &g, DEFAULT_BOUND).unwrap();
                let maps: Vec<_> = leaves.iter().map(|l| o.eval_expression(&l.expression(&g)).unwrap()).collect();
                let verdict = independent(&maps, &g, 17, 3);
                (!verdict.independent || verdict.points.len() < 3).then(|| format!("{name} ({})", w.to_text(&g)))
            })
            .collect();
        failures.extend(bad);
    }
    let card = |g: &CoxeterGraph, w: &str| enumerate_fl(&Word::parse(w, g).unwrap(), g, DEFAULT_BOUND).unwrap().len();
    let a1 = CoxeterGraph::a1();
    let a1xa1 = CoxeterGraph::a1xa1();
    let spots = (card(&a1, "s"), card(&a1, "s s"), card(&a1xa1, "s r"));
    if spots != (1, 2, 1) {
        failures.push(format!("spot cardinalities {spots:?}, expected (1, 2, 1)"));
    }
    let outcome = if failures.is_empty() {
        Ok(format!("{words} words of length ≤ 5, ≥ 3 points each; |FL(s)|, |FL(ss)|, |FL(sr)| = 1, 2, 1"))
    } else {
        Err(format!("{} failures: {}", failures.len(), failures.join(", ")))
    };
    report(4, "basis independence", outcome);
}

#[test]
fn criterion_5_adjunction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let systems = CoxeterGraph::test_systems();
    let opts = FuzzOptions { max_len: 6, allow_x: true, allow_alpha: true, to_unit: false };
    let mut failures = Vec::new();
    let (mut curried, mut uncurried) = (0, 0);
    while curried < 100 || uncurried < 100 {
        let (name, g) = &systems[rng.gen_range(0..systems.len())];
        let o = Oracle::new(g);
        let w = random_word(g, &mut rng, 4);
        let e = random_expression_with(g, &w, &opts, &mut rng).unwrap();
        let codomain = e.typecheck(g).unwrap();
        let same = |a: &Expression, b: &Expression| -> Result<bool, Error> {
            Ok(o.eval_expression(a)? == o.eval_expression(b)?)
        };
        if let (Some(&t), true) = (w.letters().first(), curried < 100) {
            curried += 1;
            let round = uncurry_g(&curry_f(&e, t).unwrap(), t, g).unwrap();
            if !same(&round, &e).unwrap() {
                failures.push(format!("{name} G(F({}))", e.to_text(g)));
            }
        }
        if let (Some(&t), true) = (codomain.letters().first(), uncurried < 100) {
            uncurried += 1;
            let round = curry_f(&uncurry_g(&e, t, g).unwrap(), t).unwrap();
            if !same(&round, &e).unwrap() {
                failures.push(format!("{name} F(G({}))", e.to_text(g)));
            }
        }
    }
    let outcome = if failures.is_empty() {
        Ok("G∘F and F∘G are the identity on 100 fuzzed morphisms each".to_string())
    } else {
        Err(format!("{} failures: {}", failures.len(), failures.join(", ")))
    };
    report(5, "adjunction", outcome);
}

#[test]
fn criterion_6_termination_audit() {
    let mut runs = 0;
    let mut audited = 0;
    let mut failures = Vec::new();
    for (name, g) in CoxeterGraph::test_systems() {
        let cases = corpus(&g, 200, 29);
        let results: Vec<Result<usize, String>> = cases
            .par_iter()
            .map(|e| match Normalizer::new(&g).unwrap().normalize(e) {
                Ok(out) => {
                    let v = out.trace.violations();
                    if v.is_empty() {
                        Ok(out.trace.audited())
                    } else {
                        Err(format!("{name} {}: {}", e.to_text(&g), v.join("; ")))
                    }
                }
                Err(err) => Err(format!("{name} {}: {err}", e.to_text(&g))),
            })
            .collect();
        runs += results.len();
        for r in results {
            match r {
                Ok(k) => audited += k,
                Err(msg) => failures.push(msg),
            }
        }
    }
    let outcome = if failures.is_empty() && audited > 0 {
        Ok(format!("{runs} runs, {audited} keyed steps all strictly decreasing, no fuel exhaustion"))
    } else if failures.is_empty() {
        Err("no keyed steps were recorded".to_string())
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    };
    report(6, "termination audit", outcome);
}

#[test]
fn criterion_7_idempotence_and_determinism() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, g) in CoxeterGraph::test_systems() {
        let n = Normalizer::new(&g).unwrap();
        let cases = corpus(&g, 100, 31);
        let render = |results: &[String]| results.concat();
        let run = || -> Vec<String> {
            cases
                .par_iter()
                .map(|e| match Normalizer::new(&g).unwrap().normalize(e) {
                    Ok(out) => format!("{}{}", out.result.to_text(&g), out.trace.to_text()),
                    Err(err) => format!("error: {err}\n"),
                })
                .collect()
        };
        if render(&run()) != render(&run()) {
            failures.push(format!("{name}: two runs differ"));
        }
        for e in &cases {
            checked += 1;
            let once = n.normalize(e).unwrap().result;
            let twice = n.normalize_lincomb(&once).unwrap().result;
            if once != twice {
                failures.push(format!("{name} {}: not idempotent", e.to_text(&g)));
            }
        }
    }
    let outcome = if failures.is_empty() {
        Ok(format!("{checked} normal forms are fixed points; repeated runs are byte-identical"))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    };
    report(7, "idempotence and determinism", outcome);
}
