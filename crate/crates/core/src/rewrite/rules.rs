//! Rule instances: the defining relations, their derived consequences, and the
//! commutation instances, each instantiated for concrete generators.

use crate::bimodule::{check_equal, Mismatch, Oracle};
use crate::coxeter::{CoxeterGraph, Gen, RepCoefficients};
use crate::expr::{Expression, LinComb, Term, Word};
use crate::poly::Poly;
use crate::Error;

/// One instance of a relation: `lhs = rhs` as maps out of `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    /// Family name, e.g. `7`, `g`, `N3`, `x`.
    pub name: String,
    /// Family name with the generators of this instance, e.g. `c(s,r)`.
    pub label: String,
    pub domain: Word,
    pub lhs: Expression,
    pub rhs: LinComb,
}

impl Rule {
    fn new(name: &str, gens: &[Gen], graph: &CoxeterGraph, domain: Vec<Gen>, lhs: Vec<Term>, rhs: Vec<(Poly, Vec<Term>)>) -> Self {
        let domain = Word(domain);
        let names: Vec<&str> = gens.iter().map(|&g| graph.name(g)).collect();
        let rhs = rhs.into_iter().map(|(c, ts)| (Expression::new(domain.clone(), ts), c)).collect();
        Rule {
            name: name.to_string(),
            label: format!("{name}({})", names.join(",")),
            domain: domain.clone(),
            lhs: Expression::new(domain, lhs),
            rhs,
        }
    }

    /// A deliberately wrong copy, used to exercise failure reporting.
    pub fn corrupted(&self) -> Rule {
        let mut out = self.clone();
        out.rhs = self.rhs.scale(&Poly::int(2));
        if out.rhs.is_zero() {
            out.rhs = LinComb::single(Expression::identity(self.domain.clone()));
        }
        out
    }

    /// `domain | lhs = rhs` on one line.
    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        let rhs: Vec<String> = self
            .rhs
            .iter()
            .map(|(e, c)| format!("{} * [{} ]", c.to_text(graph.names()), e.terms_text(graph)))
            .collect();
        let rhs = if rhs.is_empty() { "0".to_string() } else { rhs.join(" + ") };
        format!("word {} |{} = {}", self.domain.to_text(graph), self.lhs.terms_text(graph), rhs)
    }
}

/// Exact oracle check of one rule instance.
pub fn check_rule(oracle: &Oracle, rule: &Rule) -> Result<(), Mismatch> {
    let codomain = rule.lhs.typecheck(oracle.graph()).map_err(|_| Mismatch { basis: "ill-typed".into() })?;
    check_equal(oracle, &LinComb::single(rule.lhs.clone()), &rule.rhs, &rule.domain, &codomain)
}

fn one() -> Poly {
    Poly::one()
}

fn int(n: i64) -> Poly {
    Poly::int(n)
}

fn p(s: Gen, i: usize) -> [Term; 2] {
    [Term::alpha(s, i), Term::j(s, i + 1)]
}

fn eps(s: Gen, i: usize) -> [Term; 2] {
    [Term::alpha(s, i), Term::m(s, i)]
}

fn cat<const A: usize, const B: usize>(a: [Term; A], b: [Term; B]) -> Vec<Term> {
    a.into_iter().chain(b).collect()
}

/// Relation 7 on `(s,s)`: `m` on the right letter trades for `m` on the left
/// letter plus two merge terms.
pub fn rel7(graph: &CoxeterGraph, s: Gen) -> Rule {
    Rule::new(
        "7",
        &[s],
        graph,
        vec![s, s],
        vec![Term::m(s, 1)],
        vec![
            (one(), vec![Term::m(s, 0)]),
            (one(), vec![Term::j(s, 0), Term::x(s, 1)]),
            (int(-1), vec![Term::j(s, 0), Term::x(s, 0)]),
        ],
    )
}

/// Relation f: `x_s` between the letters of a crossing `(t,r)`.
pub fn rel_f(graph: &CoxeterGraph, c: &RepCoefficients, t: Gen, r: Gen, s: Gen) -> Rule {
    let mut rhs: Vec<(Poly, Vec<Term>)> = c
        .lambda(t, s)
        .iter()
        .map(|(&u, l)| (Poly::constant(l.clone()), vec![Term::f(t, r, 0), Term::x(u, 0)]))
        .collect();
    rhs.push((Poly::constant(c.mu(t, s).clone()), vec![Term::f(t, r, 0), Term::x(t, 2)]));
    Rule::new("f", &[t, r, s], graph, vec![t, r], vec![Term::x(s, 1), Term::f(t, r, 0)], rhs)
}

/// Relation g: `x_s` between the letters of a merge of `r`.
pub fn rel_g(graph: &CoxeterGraph, c: &RepCoefficients, r: Gen, s: Gen) -> Rule {
    let mu = c.mu(r, s).clone();
    let mut rhs: Vec<(Poly, Vec<Term>)> = vec![(Poly::constant(mu.clone()), vec![Term::m(r, 0)])];
    rhs.extend(
        c.lambda(r, s)
            .iter()
            .map(|(&u, l)| (Poly::constant(l.clone()), vec![Term::j(r, 0), Term::x(u, 0)])),
    );
    rhs.push((Poly::constant(-mu), vec![Term::j(r, 0), Term::x(r, 0)]));
    Rule::new("g", &[r, s], graph, vec![r, r], vec![Term::x(s, 1), Term::j(r, 0)], rhs)
}

/// All rule instances for `graph`, grouped by family.
pub fn registry(graph: &CoxeterGraph) -> Result<Vec<Rule>, Error> {
    let c = RepCoefficients::new(graph)?;
    let g = graph;
    let mut out = Vec::new();
    let gens: Vec<Gen> = g.gens().collect();
    let pairs: Vec<(Gen, Gen)> =
        gens.iter().flat_map(|&s| gens.iter().map(move |&r| (s, r))).filter(|&(s, r)| g.commutes(s, r)).collect();

    for &s in &gens {
        out.push(Rule::new("1", &[s], g, vec![], vec![Term::alpha(s, 0), Term::m(s, 1)], vec![(one(), vec![Term::alpha(s, 0), Term::m(s, 0)])]));
        out.push(Rule::new("2", &[s], g, vec![s], vec![Term::alpha(s, 0), Term::j(s, 1)], vec![(one(), vec![Term::alpha(s, 1), Term::j(s, 0)])]));
        out.push(Rule::new("3", &[s], g, vec![s], vec![Term::alpha(s, 0), Term::j(s, 1), Term::m(s, 1)], vec![(one(), vec![])]));
        out.push(Rule::new("4", &[s], g, vec![s], vec![Term::alpha(s, 1), Term::j(s, 0), Term::m(s, 0)], vec![(one(), vec![])]));
        out.push(Rule::new("5", &[s], g, vec![s, s, s], vec![Term::j(s, 1), Term::j(s, 0)], vec![(one(), vec![Term::j(s, 0), Term::j(s, 0)])]));
        out.push(Rule::new("6", &[s], g, vec![], vec![Term::alpha(s, 0), Term::j(s, 0)], vec![]));
        out.push(rel7(g, s));
        out.push(Rule::new(
            "8",
            &[s],
            g,
            vec![s, s],
            vec![Term::x(s, 1), Term::j(s, 0)],
            vec![(one(), vec![Term::m(s, 0)]), (int(-1), vec![Term::j(s, 0), Term::x(s, 0)])],
        ));
    }

    for &(s, r) in &pairs {
        out.push(Rule::new("a", &[s, r], g, vec![s, r], vec![Term::f(s, r, 0), Term::f(r, s, 0)], vec![(one(), vec![])]));
        out.push(Rule::new("b", &[s, r], g, vec![s, r], vec![Term::f(s, r, 0), Term::m(r, 0)], vec![(one(), vec![Term::m(r, 1)])]));
        out.push(Rule::new("b'", &[s, r], g, vec![r, s], vec![Term::f(r, s, 0), Term::m(r, 1)], vec![(one(), vec![Term::m(r, 0)])]));
        out.push(Rule::new(
            "c",
            &[s, r],
            g,
            vec![s, r, s],
            vec![Term::f(r, s, 1), Term::j(s, 0)],
            vec![(one(), vec![Term::f(s, r, 0), Term::j(s, 1), Term::f(r, s, 0)])],
        ));
        out.push(Rule::new(
            "c'",
            &[s, r],
            g,
            vec![s, s, r],
            vec![Term::f(s, r, 1), Term::f(s, r, 0), Term::j(s, 1)],
            vec![(one(), vec![Term::j(s, 0), Term::f(s, r, 0)])],
        ));
        out.push(Rule::new(
            "d",
            &[s, r],
            g,
            vec![r],
            vec![Term::alpha(s, 0), Term::f(s, r, 1)],
            vec![(one(), vec![Term::alpha(s, 1), Term::f(r, s, 0)])],
        ));
        out.push(Rule::new(
            "N1",
            &[s, r],
            g,
            vec![r],
            vec![Term::alpha(s, 1), Term::f(r, s, 0), Term::f(r, s, 1)],
            vec![(one(), vec![Term::alpha(s, 0)])],
        ));
        out.push(Rule::new(
            "N2",
            &[s, r],
            g,
            vec![s, r, s],
            vec![Term::f(s, r, 0), Term::j(s, 1)],
            vec![(one(), vec![Term::f(r, s, 1), Term::j(s, 0), Term::f(s, r, 0)])],
        ));
        out.push(Rule::new(
            "N3",
            &[s, r],
            g,
            vec![r, s],
            cat(p(s, 1), [Term::f(r, s, 0), Term::f(r, s, 1)]),
            vec![(one(), cat([Term::f(r, s, 0)], p(s, 0)))],
        ));
        out.push(Rule::new("N4", &[s, r], g, vec![r], cat(eps(s, 1), [Term::f(r, s, 0)]), vec![(one(), eps(s, 0).to_vec())]));
        out.push(Rule::new("N4'", &[s, r], g, vec![r], cat(eps(s, 0), [Term::f(s, r, 0)]), vec![(one(), eps(s, 1).to_vec())]));
    }

    for &s in &gens {
        out.push(Rule::new("N5", &[s], g, vec![s], cat(p(s, 0), [Term::m(s, 0)]), vec![(one(), vec![])]));
        out.push(Rule::new("N5", &[s], g, vec![s], cat(p(s, 0), [Term::m(s, 1)]), vec![(one(), vec![])]));
        out.push(Rule::new("N6", &[s], g, vec![s], cat(eps(s, 1), [Term::j(s, 0)]), vec![(one(), vec![])]));
        out.push(Rule::new("N6", &[s], g, vec![s], cat(eps(s, 0), [Term::j(s, 0)]), vec![(one(), vec![])]));
        out.push(Rule::new("N7", &[s], g, vec![s, s], cat(p(s, 0), [Term::j(s, 1)]), vec![(one(), cat([Term::j(s, 0)], p(s, 0)))]));
        out.push(Rule::new("N7", &[s], g, vec![s, s], cat(p(s, 1), [Term::j(s, 0)]), vec![(one(), cat([Term::j(s, 0)], p(s, 0)))]));
        out.push(Rule::new("jp", &[s], g, vec![s], cat(p(s, 0), [Term::j(s, 0)]), vec![]));
        out.push(Rule::new("me", &[s], g, vec![], cat(eps(s, 0), [Term::m(s, 0)]), vec![(int(2), vec![Term::x(s, 0)])]));
        out.push(Rule::new("pe", &[s], g, vec![], vec![Term::alpha(s, 0)], vec![(one(), cat(eps(s, 0), p(s, 0)))]));
    }

    for &(s, r) in &pairs {
        for &t in &gens {
            if g.commutes(s, t) && g.commutes(r, t) {
                out.push(Rule::new(
                    "e",
                    &[s, r, t],
                    g,
                    vec![s, r, t],
                    vec![Term::f(r, t, 1), Term::f(s, t, 0), Term::f(s, r, 1)],
                    vec![(one(), vec![Term::f(s, r, 0), Term::f(s, t, 1), Term::f(r, t, 0)])],
                ));
            }
        }
    }

    for &(s, r) in &pairs {
        for &t in &gens {
            out.push(rel_f(g, &c, s, r, t));
        }
    }
    for &r in &gens {
        for &s in &gens {
            out.push(rel_g(g, &c, r, s));
        }
    }

    for &(s, r) in &pairs {
        for &t in &gens {
            out.push(Rule::new("x", &[s, r, t], g, vec![s, r, t], vec![Term::f(s, r, 0), Term::m(t, 2)], vec![(one(), vec![Term::m(t, 2), Term::f(s, r, 0)])]));
            out.push(Rule::new("x", &[s, r, t], g, vec![t, s, r], vec![Term::f(s, r, 1), Term::m(t, 0)], vec![(one(), vec![Term::m(t, 0), Term::f(s, r, 0)])]));
            out.push(Rule::new("x", &[s, r, t], g, vec![s, r, t, t], vec![Term::f(s, r, 0), Term::j(t, 2)], vec![(one(), vec![Term::j(t, 2), Term::f(s, r, 0)])]));
            out.push(Rule::new("x", &[s, r, t], g, vec![t, t, s, r], vec![Term::f(s, r, 2), Term::j(t, 0)], vec![(one(), vec![Term::j(t, 0), Term::f(s, r, 1)])]));
        }
        for &(t, u) in &pairs {
            out.push(Rule::new("y", &[s, r, t, u], g, vec![s, r, t, u], vec![Term::f(s, r, 0), Term::f(t, u, 2)], vec![(one(), vec![Term::f(t, u, 2), Term::f(s, r, 0)])]));
        }
    }

    for &s in &gens {
        for &t in &gens {
            out.push(Rule::new("cm", &[s, t], g, vec![t, s], vec![Term::m(s, 1), Term::m(t, 0)], vec![(one(), vec![Term::m(t, 0), Term::m(s, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s, s, t], vec![Term::j(s, 0), Term::m(t, 1)], vec![(one(), vec![Term::m(t, 2), Term::j(s, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![t, s, s], vec![Term::j(s, 1), Term::m(t, 0)], vec![(one(), vec![Term::m(t, 0), Term::j(s, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s, s, t, t], vec![Term::j(s, 0), Term::j(t, 1)], vec![(one(), vec![Term::j(t, 2), Term::j(s, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s], vec![Term::x(t, 0), Term::m(s, 0)], vec![(one(), vec![Term::m(s, 0), Term::x(t, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s], vec![Term::x(t, 1), Term::m(s, 0)], vec![(one(), vec![Term::m(s, 0), Term::x(t, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s], vec![Term::x(t, 0), Term::alpha(s, 0)], vec![(one(), vec![Term::alpha(s, 0), Term::x(t, 2)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s, s], vec![Term::x(t, 0), Term::j(s, 0)], vec![(one(), vec![Term::j(s, 0), Term::x(t, 0)])]));
            out.push(Rule::new("cm", &[s, t], g, vec![s, s], vec![Term::x(t, 2), Term::j(s, 0)], vec![(one(), vec![Term::j(s, 0), Term::x(t, 1)])]));
        }
    }
    Ok(out)
}
