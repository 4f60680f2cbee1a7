//! Moves, the light leaves basis of `Hom(word, R)`, and currying to arbitrary
//! Hom spaces.
//!
//! Move targets are right offsets: `t` counts the letters to the right of the
//! target letter. A chain move carries its source `t'` explicitly; the source
//! letter sits at right offset `t' + 1` and travels right through the letters
//! in between until it meets the target. `t' = t` is the empty chain.

use std::fmt;

use crate::coxeter::{CoxeterGraph, Gen};
use crate::expr::{Expression, Kind, Term, Word};
use crate::measures::{is_left_type, stats};
use crate::Error;

/// Default bound on the word length accepted by [`enumerate_fl`].
pub const DEFAULT_BOUND: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    /// Multiply the target away.
    M,
    /// Bring the source to the target and merge.
    Ch,
    /// Merge as in `Ch`, then multiply the result away.
    Cch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub target: usize,
    /// Equal to `target` for `M`.
    pub source: usize,
}

impl Move {
    pub fn m(t: usize) -> Self {
        Move { kind: MoveKind::M, target: t, source: t }
    }

    pub fn ch(t: usize, source: usize) -> Self {
        Move { kind: MoveKind::Ch, target: t, source }
    }

    pub fn cch(t: usize, source: usize) -> Self {
        Move { kind: MoveKind::Cch, target: t, source }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::M => write!(f, "m({})", self.target),
            MoveKind::Ch => write!(f, "ch({},{})", self.target, self.source),
            MoveKind::Cch => write!(f, "cch({},{})", self.target, self.source),
        }
    }
}

/// The terms of `mv` applied to `word`, and the resulting word.
pub fn expand(mv: &Move, word: &Word, graph: &CoxeterGraph) -> Result<(Vec<Term>, Word), Error> {
    let l = word.len();
    let illegal = |msg: String| Error::NotGoodExpression(format!("move {mv} on `{}`: {msg}", word.to_text(graph)));
    if mv.target >= l {
        return Err(illegal("target out of range".into()));
    }
    let tgt = l - mv.target - 1;
    let letters = word.letters();
    let terms = match mv.kind {
        MoveKind::M => vec![Term::m(letters[tgt], tgt)],
        MoveKind::Ch | MoveKind::Cch => {
            if mv.source < mv.target || mv.source + 2 > l {
                return Err(illegal("source out of range".into()));
            }
            let src = l - mv.source - 2;
            let s = letters[src];
            let mut terms: Vec<Term> = (src..tgt - 1).map(|a| Term::f(s, letters[a + 1], a)).collect();
            terms.push(Term::j(s, tgt - 1));
            if mv.kind == MoveKind::Cch {
                terms.push(Term::m(s, tgt - 1));
            }
            terms
        }
    };
    let mut w = word.clone();
    for t in &terms {
        w = t.step(&w, graph).map_err(illegal)?;
    }
    Ok((terms, w))
}

/// Reads an expression as a sequence of moves.
///
/// Fails exactly when some term is not part of a move: an `F` not continued by
/// an `F` or `J` carrying the same letter one step to the right, or an `X` or
/// `Alpha` term. A `J` followed by an `M` at the same offset is read as `cch`.
pub fn parse_moves(e: &Expression, graph: &CoxeterGraph) -> Result<Vec<Move>, Error> {
    let words = e.words(graph)?;
    let fail = |k: usize, msg: &str| Err(Error::NotGoodExpression(format!("term {k}: {msg}")));
    let mut moves = Vec::new();
    let mut k = 0;
    while k < e.terms.len() {
        let l = words[k].len();
        let t = e.terms[k];
        match t.kind {
            Kind::M(_) => {
                moves.push(Move::m(l - t.pos - 1));
                k += 1;
            }
            Kind::J(_) | Kind::F(..) => {
                let src = t.pos;
                let s = match t.kind {
                    Kind::J(s) | Kind::F(s, _) => s,
                    _ => unreachable!(),
                };
                let mut a = src;
                while let Some(Kind::F(s2, _)) = e.terms.get(k).map(|t| t.kind) {
                    if s2 != s || e.terms[k].pos != a {
                        return fail(k, "crossing does not continue the chain");
                    }
                    a += 1;
                    k += 1;
                }
                match e.terms.get(k) {
                    Some(&Term { kind: Kind::J(s2), pos }) if s2 == s && pos == a => {}
                    _ => return fail(k, "chain does not end with a merge"),
                }
                let target = l - a - 2;
                let source = l - src - 2;
                k += 1;
                if e.terms.get(k) == Some(&Term::m(s, a)) {
                    moves.push(Move::cch(target, source));
                    k += 1;
                } else {
                    moves.push(Move::ch(target, source));
                }
            }
            Kind::Alpha(_) | Kind::X(_) => return fail(k, "insertion or scalar term"),
        }
    }
    Ok(moves)
}

/// Builds the expression of a move sequence.
pub fn expression_of(domain: &Word, moves: &[Move], graph: &CoxeterGraph) -> Result<Expression, Error> {
    let mut w = domain.clone();
    let mut terms = Vec::new();
    for mv in moves {
        let (ts, next) = expand(mv, &w, graph)?;
        terms.extend(ts);
        w = next;
    }
    Ok(Expression::new(domain.clone(), terms))
}

/// Targets strictly decrease along the sequence.
pub fn is_good_order(moves: &[Move]) -> bool {
    moves.windows(2).all(|p| p[1].target < p[0].target)
}

/// Property (P) on a move sequence in good order.
///
/// Reading each move on the word it acts on: letters strictly between the
/// previous target and the current one are never of left type, and a target of
/// left type must be reached by a chain, not multiplied away.
pub fn has_property_p(domain: &Word, moves: &[Move], graph: &CoxeterGraph) -> Result<bool, Error> {
    let mut w = domain.clone();
    let mut prev = w.len();
    for mv in moves {
        if !p_step_ok(&w, prev, mv, graph) {
            return Ok(false);
        }
        prev = mv.target;
        w = expand(mv, &w, graph)?.1;
    }
    Ok(true)
}

fn p_step_ok(w: &Word, prev: usize, mv: &Move, graph: &CoxeterGraph) -> bool {
    let l = w.len();
    let left_type_at = |right: usize| is_left_type(w, l - right, graph);
    if (mv.target + 1..prev).any(left_type_at) {
        return false;
    }
    !(mv.kind == MoveKind::M && left_type_at(mv.target))
}

/// Both membership tests for the light leaves basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    /// Moves parse, good order, property (P).
    pub by_moves: bool,
    /// Moves parse, good order, no `m`-bad and no `j`-bad term.
    pub by_measures: bool,
}

/// Evaluates both characterizations of membership in `FL(domain)`.
pub fn membership(e: &Expression, graph: &CoxeterGraph) -> Membership {
    let no = Membership { by_moves: false, by_measures: false };
    match e.typecheck(graph) {
        Ok(w) if w.is_empty() => {}
        _ => return no,
    }
    let Ok(moves) = parse_moves(e, graph) else {
        return no;
    };
    if !is_good_order(&moves) {
        return no;
    }
    let by_moves = has_property_p(&e.domain, &moves, graph).unwrap_or(false);
    let by_measures = stats(e, graph).map(|r| r.m_bad_count == 0 && r.j_bad_count == 0).unwrap_or(false);
    Membership { by_moves, by_measures }
}

/// Membership in the light leaves basis; errors if the two characterizations
/// disagree.
pub fn is_member_fl(e: &Expression, graph: &CoxeterGraph) -> Result<bool, Error> {
    let m = membership(e, graph);
    if m.by_moves != m.by_measures {
        return Err(Error::Internal(format!(
            "membership characterizations disagree on `{}`: moves {}, measures {}",
            e.to_text(graph),
            m.by_moves,
            m.by_measures
        )));
    }
    Ok(m.by_moves)
}

/// One element of the light leaves basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightLeaf {
    pub domain: Word,
    pub moves: Vec<Move>,
}

impl LightLeaf {
    pub fn expression(&self, graph: &CoxeterGraph) -> Expression {
        expression_of(&self.domain, &self.moves, graph).expect("light leaves expand")
    }

    pub fn moves_text(&self) -> String {
        self.moves.iter().map(Move::to_string).collect::<Vec<_>>().join(" ")
    }
}

/// All light leaves on `word`, in canonical order.
///
/// Depth-first over moves with larger targets first and sources ascending;
/// good order and property (P) are enforced while descending.
pub fn enumerate_fl(word: &Word, graph: &CoxeterGraph, bound: usize) -> Result<Vec<LightLeaf>, Error> {
    if word.len() > bound {
        return Err(Error::BoundExceeded { len: word.len(), bound });
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    descend(word, word, word.len(), &mut stack, &mut out, graph);
    Ok(out)
}

fn descend(
    domain: &Word,
    w: &Word,
    prev: usize,
    stack: &mut Vec<Move>,
    out: &mut Vec<LightLeaf>,
    graph: &CoxeterGraph,
) {
    if w.is_empty() {
        out.push(LightLeaf { domain: domain.clone(), moves: stack.clone() });
        return;
    }
    let l = w.len();
    for t in (0..prev.min(l)).rev() {
        let mut candidates = vec![Move::m(t)];
        for source in t..l.saturating_sub(1) {
            candidates.push(Move::ch(t, source));
            candidates.push(Move::cch(t, source));
        }
        for mv in candidates {
            if !p_step_ok(w, prev, &mv, graph) {
                continue;
            }
            let Ok((_, next)) = expand(&mv, w, graph) else {
                continue;
            };
            stack.push(mv);
            descend(domain, &next, t, stack, out, graph);
            stack.pop();
        }
    }
}

/// `F_t`: sends `f: t·M → N` to `(id_t ⊗ f) ∘ (α_t ⊗ id_M): M → t·N`.
pub fn curry_f(e: &Expression, t: Gen) -> Result<Expression, Error> {
    match e.domain.letters().first() {
        Some(&first) if first == t => {}
        _ => return Err(Error::WordMismatch("domain does not start with the curried letter".into())),
    }
    let mut terms = vec![Term::alpha(t, 0)];
    terms.extend(e.terms.iter().map(|x| x.shifted(1)));
    Ok(Expression::new(Word(e.domain.letters()[1..].to_vec()), terms))
}

/// `G_t`: sends `g: M → t·N` to `(m_t j_t ⊗ id_N) ∘ (id_t ⊗ g): t·M → N`.
pub fn uncurry_g(e: &Expression, t: Gen, graph: &CoxeterGraph) -> Result<Expression, Error> {
    let codomain = e.typecheck(graph)?;
    match codomain.letters().first() {
        Some(&first) if first == t => {}
        _ => return Err(Error::WordMismatch("codomain does not start with the uncurried letter".into())),
    }
    let mut out = e.shifted(&[t]);
    out.terms.extend([Term::j(t, 0), Term::m(t, 0)]);
    Ok(out)
}

/// A basis of `Hom(domain, codomain)` transported from the light leaves of
/// `reverse(codomain)·domain` by currying.
pub fn transported_basis(
    domain: &Word,
    codomain: &Word,
    graph: &CoxeterGraph,
    bound: usize,
) -> Result<Vec<Expression>, Error> {
    let mut word: Vec<Gen> = codomain.letters().iter().rev().copied().collect();
    word.extend_from_slice(domain.letters());
    let leaves = enumerate_fl(&Word(word), graph, bound)?;
    leaves
        .iter()
        .map(|leaf| {
            let mut e = leaf.expression(graph);
            for &t in codomain.letters().iter().rev() {
                e = curry_f(&e, t)?;
            }
            Ok(e)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::{eval_expression, independent};
    use crate::expr::word_of;

    #[test]
    fn expand_examples() {
        let g = CoxeterGraph::a1xa1();
        let (s, r) = (Gen(0), Gen(1));
        let ss = word_of(&g, "s s");
        assert_eq!(expand(&Move::m(1), &ss, &g).unwrap().0, vec![Term::m(s, 0)]);
        assert_eq!(expand(&Move::ch(0, 0), &ss, &g).unwrap().0, vec![Term::j(s, 0)]);
        let srs = word_of(&g, "s r s");
        let (terms, w) = expand(&Move::cch(0, 1), &srs, &g).unwrap();
        assert_eq!(terms, vec![Term::f(s, r, 0), Term::j(s, 1), Term::m(s, 1)]);
        assert_eq!(w, word_of(&g, "r"));
        let inf = CoxeterGraph::infinite_dihedral();
        assert!(expand(&Move::cch(0, 1), &srs, &inf).is_err());
    }

    #[test]
    fn parse_inverts_expand() {
        let g = CoxeterGraph::commuting3();
        for word in Word::all_up_to(&g, 4) {
            for leaf in enumerate_fl(&word, &g, DEFAULT_BOUND).unwrap() {
                let e = leaf.expression(&g);
                assert_eq!(parse_moves(&e, &g).unwrap(), leaf.moves);
            }
        }
    }

    #[test]
    fn parse_rejects_dangling_crossings() {
        let g = CoxeterGraph::a1xa1();
        let (s, r) = (Gen(0), Gen(1));
        let e = Expression::new(word_of(&g, "s r"), vec![Term::f(s, r, 0), Term::m(r, 0), Term::m(s, 0)]);
        assert!(parse_moves(&e, &g).is_err());
    }

    #[test]
    fn small_bases() {
        let a1 = CoxeterGraph::a1();
        let s1 = enumerate_fl(&word_of(&a1, "s"), &a1, 8).unwrap();
        assert_eq!(s1.iter().map(|l| l.moves.clone()).collect::<Vec<_>>(), vec![vec![Move::m(0)]]);
        let ss = enumerate_fl(&word_of(&a1, "s s"), &a1, 8).unwrap();
        let moves: Vec<Vec<Move>> = ss.iter().map(|l| l.moves.clone()).collect();
        assert_eq!(moves, vec![vec![Move::m(1), Move::m(0)], vec![Move::cch(0, 0)]]);
        assert_eq!(enumerate_fl(&word_of(&a1, "s s s"), &a1, 8).unwrap().len(), 4);
        let g = CoxeterGraph::a1xa1();
        assert_eq!(enumerate_fl(&word_of(&g, "s r"), &g, 8).unwrap().len(), 1);
        assert!(matches!(
            enumerate_fl(&word_of(&a1, "s s s"), &a1, 2),
            Err(Error::BoundExceeded { len: 3, bound: 2 })
        ));
    }

    #[test]
    fn membership_examples() {
        let g = CoxeterGraph::a1();
        let s = Gen(0);
        let ss = word_of(&g, "s s");
        let mm = Expression::new(ss.clone(), vec![Term::m(s, 0), Term::m(s, 0)]);
        assert!(is_member_fl(&mm, &g).unwrap());
        let jm = Expression::new(ss.clone(), vec![Term::j(s, 0), Term::m(s, 0)]);
        assert!(is_member_fl(&jm, &g).unwrap());
        let bad = Expression::new(ss, vec![Term::m(s, 1), Term::m(s, 0)]);
        assert!(!is_member_fl(&bad, &g).unwrap());
    }

    #[test]
    fn pair_basis_is_independent() {
        let g = CoxeterGraph::a1();
        let leaves = enumerate_fl(&word_of(&g, "s s"), &g, 8).unwrap();
        let maps: Vec<_> = leaves.iter().map(|l| eval_expression(&g, &l.expression(&g)).unwrap()).collect();
        assert!(independent(&maps, &g, 0, 3).independent);
    }

    #[test]
    fn currying_round_trip_shapes() {
        let g = CoxeterGraph::a1();
        let s = Gen(0);
        let e = Expression::new(word_of(&g, "s"), vec![Term::m(s, 0)]);
        let c = curry_f(&e, s).unwrap();
        assert_eq!(c.domain, Word::empty());
        assert_eq!(c.typecheck(&g).unwrap(), word_of(&g, "s"));
        let back = uncurry_g(&c, s, &g).unwrap();
        assert_eq!(back.domain, word_of(&g, "s"));
        assert_eq!(eval_expression(&g, &back).unwrap(), eval_expression(&g, &e).unwrap());
        assert!(curry_f(&Expression::identity(Word::empty()), s).is_err());
    }
}
