//! The relation registry and the normalization pipeline.
//!
//! [`Normalizer::normalize`] takes an expression with empty codomain to a
//! polynomial combination of light leaves in four stages:
//!
//! 1. `F1` slides every `x` scalar down to the codomain, where it becomes a
//!    coefficient (relations f and g where it is blocked).
//! 2. `alpha` removes insertions, last one first, by a case analysis on the
//!    first term that touches the inserted strands.
//! 3. `F5` loops `F2` (no `m`-bad term), `F3` (crossing cleanup) and `F4`
//!    (rebuild in good order) until the result has no `m`-bad term.
//!
//! Every step is recorded in a [`Trace`] together with the termination key it
//! is supposed to decrease, so runs can be audited afterwards.

mod pipeline;
mod rules;

use std::fmt;

use crate::coxeter::{CoxeterGraph, RepCoefficients};
use crate::expr::{Expression, LinComb, Term, Word};
use crate::measures::F3Key;
use crate::Error;

pub use rules::{check_rule, registry, rel7, rel_f, rel_g, Rule};

/// Default fuel multiplier: each stage may apply `10·L²` steps, where `L` is
/// the chain length plus the domain length of the stage input.
pub const DEFAULT_FUEL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    F1,
    Alpha,
    F2,
    F3,
    F4,
    F5,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::F1 => "F1",
            Stage::Alpha => "alpha",
            Stage::F2 => "F2",
            Stage::F3 => "F3",
            Stage::F4 => "F4",
            Stage::F5 => "F5",
        })
    }
}

/// A termination key snapshot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Key {
    None,
    F2((usize, usize)),
    F3(F3Key),
    F5(usize),
}

impl Key {
    /// Whether `self → after` is a strict decrease; `None` when the snapshots
    /// are not comparable.
    fn decreases_to(&self, after: &Key) -> Option<bool> {
        match (self, after) {
            (Key::F2(a), Key::F2(b)) => Some(b < a),
            (Key::F3(a), Key::F3(b)) => Some(b < a),
            (Key::F5(a), Key::F5(b)) => Some(b < a),
            _ => None,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::None => f.write_str("-"),
            Key::F2((a, b)) => write!(f, "({a}, {b})"),
            Key::F3(k) => write!(f, "{k}"),
            Key::F5(k) => write!(f, "{k}"),
        }
    }
}

/// One applied step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub stage: Stage,
    /// Rule family, or `cm` for commutations, `coef` for a scalar reaching the
    /// codomain, `reorder` for a rebuild, `round` for a loop iteration.
    pub rule: String,
    /// Chain index of the rewritten segment.
    pub site: usize,
    pub before: Key,
    pub after: Key,
}

/// The ordered steps of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    /// One step per line: `stage rule @site before -> after`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!("{} {} @{} {} -> {}\n", s.stage, s.rule, s.site, s.before, s.after));
        }
        out
    }

    /// Steps whose recorded key did not strictly decrease.
    pub fn violations(&self) -> Vec<String> {
        self.steps
            .iter()
            .filter(|s| s.before.decreases_to(&s.after) == Some(false))
            .map(|s| format!("{} {} @{}: {} -> {}", s.stage, s.rule, s.site, s.before, s.after))
            .collect()
    }

    /// Number of steps of `stage` whose rule is `rule`.
    pub fn count(&self, stage: Stage, rule: &str) -> usize {
        self.steps.iter().filter(|s| s.stage == stage && s.rule == rule).count()
    }

    /// Number of steps carrying a comparable key pair.
    pub fn audited(&self) -> usize {
        self.steps.iter().filter(|s| s.before.decreases_to(&s.after).is_some()).count()
    }
}

/// Output of a normalization run.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub result: LinComb,
    pub trace: Trace,
}

/// The rewriting engine for one graph.
pub struct Normalizer<'g> {
    graph: &'g CoxeterGraph,
    coeffs: RepCoefficients,
    fuel: usize,
}

impl<'g> Normalizer<'g> {
    pub fn new(graph: &'g CoxeterGraph) -> Result<Self, Error> {
        Ok(Normalizer { graph, coeffs: RepCoefficients::new(graph)?, fuel: DEFAULT_FUEL })
    }

    pub fn with_fuel(mut self, multiplier: usize) -> Self {
        self.fuel = multiplier;
        self
    }

    pub fn graph(&self) -> &'g CoxeterGraph {
        self.graph
    }

    fn run(&self) -> pipeline::Run<'_> {
        pipeline::Run::new(self.graph, &self.coeffs, self.fuel)
    }

    /// Normal form of an expression with empty codomain.
    pub fn normalize(&self, e: &Expression) -> Result<Normalized, Error> {
        let mut run = self.run();
        let result = run.normalize(e)?;
        Ok(Normalized { result, trace: run.trace })
    }

    /// Normal form of a combination; the empty combination normalizes to itself.
    pub fn normalize_lincomb(&self, lc: &LinComb) -> Result<Normalized, Error> {
        let mut run = self.run();
        let mut result = LinComb::zero();
        for (e, c) in lc.iter() {
            result.add_all(&run.normalize(e)?, c);
        }
        Ok(Normalized { result, trace: run.trace })
    }

    /// Stage `F1` alone: removes every `x` term.
    pub fn f1(&self, e: &Expression) -> Result<(LinComb, Trace), Error> {
        let mut run = self.run();
        run.require_r_expression(e)?;
        let out = run.f1(e)?;
        Ok((out, run.trace))
    }

    /// Insertion elimination on an `x`-free expression.
    pub fn alpha_eliminate(&self, e: &Expression) -> Result<(LinComb, Trace), Error> {
        let mut run = self.run();
        run.require_r_expression(e)?;
        let out = run.f1(e)?;
        let mut total = LinComb::zero();
        for (x, c) in out.iter() {
            total.add_all(&run.alpha_eliminate(x)?, c);
        }
        Ok((total, run.trace))
    }

    /// Stage `F2` on an `x`-free expression without insertions.
    pub fn f2(&self, e: &Expression) -> Result<(LinComb, Trace), Error> {
        let mut run = self.run();
        run.require_g(e)?;
        let out = run.f2(e)?;
        Ok((out, run.trace))
    }

    /// Stage `F3`: crossing cleanup to property (Q).
    pub fn f3(&self, e: &Expression) -> Result<(Expression, Trace), Error> {
        let mut run = self.run();
        run.require_g(e)?;
        let out = run.f3(e)?;
        Ok((out, run.trace))
    }

    /// Stage `F4`: the good-order expression with the same strand partition.
    pub fn f4(&self, e: &Expression) -> Result<Expression, Error> {
        let mut run = self.run();
        run.require_g(e)?;
        run.f4(e)
    }
}

/// Normal form with default settings.
pub fn normalize(graph: &CoxeterGraph, e: &Expression) -> Result<LinComb, Error> {
    Ok(Normalizer::new(graph)?.normalize(e)?.result)
}

/// The chain with `len` terms at `k` replaced by `with`.
pub(crate) fn splice(e: &Expression, k: usize, len: usize, with: &[Term]) -> Expression {
    let mut terms = e.terms[..k].to_vec();
    terms.extend_from_slice(with);
    terms.extend_from_slice(&e.terms[k + len..]);
    Expression::new(e.domain.clone(), terms)
}

impl Rule {
    /// The offset at which the left side occurs at chain index `k`, given the
    /// running words of `e`.
    pub fn matches_at(&self, e: &Expression, words: &[Word], k: usize) -> Option<usize> {
        let lhs = &self.lhs.terms;
        if lhs.is_empty() || k + lhs.len() > e.terms.len() {
            return None;
        }
        let first = e.terms[k];
        if first.kind != lhs[0].kind || first.pos < lhs[0].pos {
            return None;
        }
        let d = first.pos - lhs[0].pos;
        let fits = lhs.iter().zip(&e.terms[k..]).all(|(a, b)| a.kind == b.kind && a.pos + d == b.pos);
        let w = words[k].letters();
        let n = self.domain.len();
        (fits && d + n <= w.len() && w[d..d + n] == *self.domain.letters()).then_some(d)
    }

    /// Replaces the occurrence at `(k, d)` by the right side.
    pub fn apply_at(&self, e: &Expression, k: usize, d: usize) -> LinComb {
        self.rhs
            .iter()
            .map(|(r, c)| {
                let with: Vec<Term> = r.terms.iter().map(|t| t.shifted(d)).collect();
                (splice(e, k, self.lhs.len(), &with), c.clone())
            })
            .collect()
    }
}
