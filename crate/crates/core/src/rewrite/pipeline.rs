//! The stages of the normalization pipeline.

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::rules::{rel7, rel_f, rel_g, Rule};
use super::{splice, Key, Stage, Step, Trace};
use crate::coxeter::{CoxeterGraph, Gen, RepCoefficients};
use crate::expr::{Expression, Kind, LinComb, Term};
use crate::lightleaves::{expand, is_member_fl, parse_moves, Move};
use crate::measures::{f3_key, stats};
use crate::poly::{x_form, Poly};
use crate::Error;

/// Variants explored per search for a crossing cleanup site.
const CLOSURE_CAP: usize = 256;

/// The strands a term reads and writes, for interchange.
#[derive(Clone, Copy, Debug)]
struct Span {
    pos: usize,
    inw: usize,
    outw: usize,
}

impl Span {
    fn of(t: &Term) -> Span {
        Span { pos: t.pos, inw: t.in_width(), outw: t.out_width() }
    }
}

/// For `a` applied before `b` on disjoint strands, the offsets `(b', a')` of
/// the equal composite with `b` first. `None` when they share strands.
fn exchange(a: Span, b: Span) -> Option<(usize, usize)> {
    if b.pos + b.inw <= a.pos {
        Some((b.pos, a.pos - b.inw + b.outw))
    } else if b.pos >= a.pos + a.outw {
        Some((b.pos - a.outw + a.inw, a.pos))
    } else {
        None
    }
}

/// Swaps terms `k` and `k + 1` when they commute.
fn swap_at(e: &Expression, k: usize) -> Option<Expression> {
    let (a, b) = (e.terms[k], e.terms[k + 1]);
    let (bp, ap) = exchange(Span::of(&a), Span::of(&b))?;
    Some(splice(e, k, 2, &[Term { kind: b.kind, pos: bp }, Term { kind: a.kind, pos: ap }]))
}

/// Shape of the insertion being eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Xi {
    /// A bare insertion at `q`.
    Alpha,
    /// Insertion followed by a merge of its right strand: one strand in, two out.
    P,
    /// Insertion followed by multiplication of its left strand: one strand out.
    Eps,
}

impl Xi {
    fn terms(self, s: Gen, q: usize) -> Vec<Term> {
        match self {
            Xi::Alpha => vec![Term::alpha(s, q)],
            Xi::P => vec![Term::alpha(s, q), Term::j(s, q + 1)],
            Xi::Eps => vec![Term::alpha(s, q), Term::m(s, q)],
        }
    }

    fn span(self, q: usize) -> Span {
        match self {
            Xi::Alpha => Span { pos: q, inw: 0, outw: 2 },
            Xi::P => Span { pos: q, inw: 1, outw: 2 },
            Xi::Eps => Span { pos: q, inw: 0, outw: 1 },
        }
    }
}

/// Outcome of one insertion elimination case.
enum Action {
    Keep,
    Zero(&'static str),
    /// Rule name, number of terms replaced from the insertion on, replacement.
    Replace(&'static str, usize, Vec<Term>),
}

/// Step budget along one rewriting path. Branches inherit the count of the
/// path that created them.
#[derive(Clone, Copy)]
struct Fuel {
    stage: Stage,
    limit: usize,
    used: usize,
}

/// State of one normalization run.
pub(crate) struct Run<'a> {
    graph: &'a CoxeterGraph,
    coeffs: &'a RepCoefficients,
    multiplier: usize,
    pub(crate) trace: Trace,
}

impl<'a> Run<'a> {
    pub(crate) fn new(graph: &'a CoxeterGraph, coeffs: &'a RepCoefficients, multiplier: usize) -> Self {
        Run { graph, coeffs, multiplier, trace: Trace::default() }
    }

    fn fuel(&self, stage: Stage, e: &Expression) -> Fuel {
        let l = e.terms.len() + e.domain.len();
        Fuel { stage, limit: self.multiplier * l.max(1) * l.max(1), used: 0 }
    }

    fn tick(&self, fuel: &mut Fuel) -> Result<(), Error> {
        fuel.used += 1;
        if fuel.used > fuel.limit {
            return Err(Error::FuelExhausted {
                stage: fuel.stage.to_string(),
                steps: fuel.limit,
                trace: self.trace.to_text(),
            });
        }
        Ok(())
    }

    fn record(&mut self, stage: Stage, rule: &str, site: usize, before: Key, after: Key) {
        self.trace.steps.push(Step { stage, rule: rule.to_string(), site, before, after });
    }

    fn internal(&self, what: &str, e: &Expression) -> Error {
        Error::Internal(format!("{what} in `{}`", e.to_text(self.graph)))
    }

    pub(crate) fn require_r_expression(&self, e: &Expression) -> Result<(), Error> {
        let codomain = e.typecheck(self.graph)?;
        if !codomain.is_empty() {
            return Err(Error::NotRExpression(codomain.to_text(self.graph)));
        }
        Ok(())
    }

    /// An R-expression built from `M`, `J` and `F` terms only.
    pub(crate) fn require_g(&self, e: &Expression) -> Result<(), Error> {
        self.require_r_expression(e)?;
        if e.has_x() || e.has_alpha() {
            return Err(Error::NotGoodExpression("scalar or insertion term present".into()));
        }
        Ok(())
    }

    pub(crate) fn normalize(&mut self, e: &Expression) -> Result<LinComb, Error> {
        self.require_r_expression(e)?;
        let scalar_free = self.f1(e)?;
        let mut insertion_free = LinComb::zero();
        for (x, c) in scalar_free.iter() {
            insertion_free.add_all(&self.alpha_eliminate(x)?, c);
        }
        let mut out = LinComb::zero();
        for (x, c) in insertion_free.iter() {
            out.add_all(&self.f5(x)?, c);
        }
        for x in out.expressions() {
            if !is_member_fl(x, self.graph)? {
                return Err(self.internal("output outside the light leaves basis", x));
            }
        }
        Ok(out)
    }

    /// Applies the instance `rule` at chain index `k`, which must match.
    fn apply(&mut self, stage: Stage, rule: &Rule, e: &Expression, k: usize) -> Result<LinComb, Error> {
        let words = e.words(self.graph)?;
        let d = rule.matches_at(e, &words, k).ok_or_else(|| self.internal(&format!("rule {} does not match", rule.label), e))?;
        self.record(stage, &rule.name, k, Key::None, Key::None);
        Ok(rule.apply_at(e, k, d))
    }

    /// Removes every `x` term, last one first.
    pub(crate) fn f1(&mut self, e: &Expression) -> Result<LinComb, Error> {
        let fuel = self.fuel(Stage::F1, e);
        let mut out = LinComb::zero();
        let mut work = vec![(e.clone(), Poly::one(), fuel)];
        while let Some((mut e, mut c, mut fuel)) = work.pop() {
            let Some(mut k) = e.terms.iter().rposition(|t| matches!(t.kind, Kind::X(_))) else {
                out.add(e, c);
                continue;
            };
            loop {
                self.tick(&mut fuel)?;
                let Kind::X(s) = e.terms[k].kind else { unreachable!("k indexes an x term") };
                if k + 1 == e.terms.len() {
                    e.terms.pop();
                    c = &c * &x_form(s, self.graph);
                    self.record(Stage::F1, "coef", k, Key::None, Key::None);
                    work.push((e, c, fuel));
                    break;
                }
                if let Some(next) = swap_at(&e, k) {
                    e = next;
                    k += 1;
                    continue;
                }
                let rule = match e.terms[k + 1].kind {
                    Kind::J(r) => rel_g(self.graph, self.coeffs, r, s),
                    Kind::F(t, r) => rel_f(self.graph, self.coeffs, t, r, s),
                    _ => return Err(self.internal("scalar blocked by a non-merge", &e)),
                };
                for (x, rc) in self.apply(Stage::F1, &rule, &e, k)?.iter() {
                    work.push((x.clone(), &c * rc, fuel));
                }
                break;
            }
        }
        Ok(out)
    }

    /// Removes every insertion from an `x`-free R-expression.
    pub(crate) fn alpha_eliminate(&mut self, e: &Expression) -> Result<LinComb, Error> {
        let fuel = self.fuel(Stage::Alpha, e);
        let mut out = LinComb::zero();
        let mut work = vec![(e.clone(), Poly::one(), fuel)];
        while let Some((e, c, mut fuel)) = work.pop() {
            let Some(k) = e.terms.iter().rposition(|t| matches!(t.kind, Kind::Alpha(_))) else {
                out.add(e, c);
                continue;
            };
            self.tick(&mut fuel)?;
            for (x, xc) in self.alpha_step(&e, k)?.iter() {
                work.push((x.clone(), &c * xc, fuel));
            }
        }
        Ok(out)
    }

    /// One elimination step on the insertion at chain index `k`, which is the
    /// last insertion of `e`.
    fn alpha_step(&mut self, e: &Expression, k: usize) -> Result<LinComb, Error> {
        let Term { kind: Kind::Alpha(s), pos: p } = e.terms[k] else { unreachable!("k indexes an insertion") };
        let xi = match e.terms.get(k + 1) {
            Some(&t) if t == Term::j(s, p + 1) => Xi::P,
            Some(&t) if t == Term::m(s, p) => Xi::Eps,
            _ => Xi::Alpha,
        };
        let start = k + xi.terms(s, p).len();
        let words = e.words(self.graph)?;

        // Put the rest of the chain into move form.
        let mut e = e.clone();
        let suffix = Expression::new(words[start].clone(), e.terms[start..].to_vec());
        if parse_moves(&suffix, self.graph).is_err() {
            let rebuilt = self.rebuild(&suffix)?;
            e.terms.truncate(start);
            e.terms.extend(rebuilt.terms);
            self.record(Stage::Alpha, "reorder", start, Key::None, Key::None);
        }

        // Slide the insertion past terms on other strands.
        let mut q = p;
        let mut moved = Vec::new();
        let mut i = start;
        while i < e.terms.len() {
            let b = e.terms[i];
            let Some((bp, qp)) = exchange(xi.span(q), Span::of(&b)) else { break };
            moved.push(Term { kind: b.kind, pos: bp });
            q = qp;
            i += 1;
        }
        if i == e.terms.len() {
            return Err(self.internal("inserted strands reach the codomain", &e));
        }
        let mut terms = e.terms[..k].to_vec();
        let slid = !moved.is_empty();
        terms.extend(moved);
        let kx = terms.len();
        terms.extend(xi.terms(s, q));
        let t_idx = terms.len();
        terms.extend_from_slice(&e.terms[i..]);
        let e = Expression::new(e.domain.clone(), terms);
        if slid {
            self.record(Stage::Alpha, "cm", k, Key::None, Key::None);
        }

        let t = e.terms[t_idx];
        let next = e.terms.get(t_idx + 1).copied();
        let n = t_idx + 1 - kx;
        let action = match (xi, t.kind) {
            (Xi::Alpha, Kind::J(_)) if t.pos == q => Action::Zero("6"),
            (Xi::Alpha, Kind::J(_)) if t.pos + 1 == q => {
                Action::Replace("2", n, vec![Term::alpha(s, q - 1), Term::j(s, q)])
            }
            (Xi::Alpha, Kind::J(_)) if t.pos == q + 1 => Action::Keep,
            (Xi::Alpha, Kind::M(_)) if t.pos == q => Action::Keep,
            (Xi::Alpha, Kind::M(_)) if t.pos == q + 1 => {
                Action::Replace("1", n, vec![Term::alpha(s, q), Term::m(s, q)])
            }
            (Xi::Alpha | Xi::P, Kind::F(..)) if t.pos == q + 1 => {
                let (with, used) = self.crossing_exchange(&e, t_idx, s)?;
                let mut all = xi.terms(s, q);
                all.extend(with);
                Action::Replace("exchange", n + used - 1, all)
            }
            (Xi::Alpha, Kind::F(r, s2)) if s2 == s && t.pos + 1 == q => {
                if next == Some(Term::f(r, s, q)) {
                    Action::Replace("N1", n + 1, vec![Term::alpha(s, q - 1)])
                } else {
                    Action::Replace("d", n, vec![Term::alpha(s, q - 1), Term::f(s, r, q)])
                }
            }
            (Xi::P, Kind::J(_)) if t.pos == q => Action::Zero("jp"),
            (Xi::P, Kind::J(_)) if t.pos + 1 == q => {
                Action::Replace("N7", n, vec![Term::j(s, q - 1), Term::alpha(s, q - 1), Term::j(s, q)])
            }
            (Xi::P, Kind::J(_)) if t.pos == q + 1 => {
                Action::Replace("N7", n, vec![Term::j(s, q), Term::alpha(s, q), Term::j(s, q + 1)])
            }
            (Xi::P, Kind::M(_)) if t.pos == q || t.pos == q + 1 => Action::Replace("N5", n, vec![]),
            (Xi::P, Kind::F(r, s2)) if s2 == s && t.pos + 1 == q && next == Some(Term::f(r, s, q)) => {
                Action::Replace("N3", n + 1, vec![Term::f(r, s, q - 1), Term::alpha(s, q - 1), Term::j(s, q)])
            }
            (Xi::Eps, Kind::J(_)) if t.pos + 1 == q || t.pos == q => Action::Replace("N6", n, vec![]),
            (Xi::Eps, Kind::M(_)) if t.pos == q => {
                self.record(Stage::Alpha, "me", kx, Key::None, Key::None);
                let scalar = splice(&e, kx, n, &[Term::x(s, q)]);
                return Ok(self.f1(&scalar)?.scale(&Poly::int(2)));
            }
            (Xi::Eps, Kind::F(s2, _)) if s2 == s && t.pos == q => {
                Action::Replace("N4'", n, vec![Term::alpha(s, q + 1), Term::m(s, q + 1)])
            }
            (Xi::Eps, Kind::F(_, s2)) if s2 == s && t.pos + 1 == q => {
                Action::Replace("N4", n, vec![Term::alpha(s, q - 1), Term::m(s, q - 1)])
            }
            _ => return Err(self.internal("no elimination case applies", &e)),
        };
        Ok(match action {
            Action::Keep => LinComb::single(e),
            Action::Zero(name) => {
                self.record(Stage::Alpha, name, kx, Key::None, Key::None);
                LinComb::zero()
            }
            Action::Replace(name, len, with) => {
                self.record(Stage::Alpha, name, kx, Key::None, Key::None);
                LinComb::single(splice(&e, kx, len, &with))
            }
        })
    }

    /// The crossing chain at `k` carrying the right inserted strand `s` to a
    /// merge, rewritten so the merge happens first. Returns the replacement
    /// and the number of terms it replaces.
    fn crossing_exchange(&self, e: &Expression, k: usize, s: Gen) -> Result<(Vec<Term>, usize), Error> {
        let a = e.terms[k].pos;
        let mut crossed = Vec::new();
        let mut i = k;
        while let Some(&Term { kind: Kind::F(s2, r), pos }) = e.terms.get(i) {
            if s2 != s || pos != a + crossed.len() {
                break;
            }
            crossed.push(r);
            i += 1;
        }
        let c = crossed.len();
        if c == 0 || e.terms.get(i) != Some(&Term::j(s, a + c)) {
            return Err(self.internal("crossing chain does not end in a merge", e));
        }
        let mut with: Vec<Term> = crossed.iter().enumerate().rev().map(|(j, &r)| Term::f(r, s, a + j + 1)).collect();
        with.push(Term::j(s, a));
        with.extend(crossed.iter().enumerate().map(|(j, &r)| Term::f(s, r, a + j)));
        Ok((with, c + 1))
    }
}

impl Run<'_> {
    /// Removes `m`-bad terms, first one first, by relation 7 conjugated by
    /// crossings.
    pub(crate) fn f2(&mut self, e: &Expression) -> Result<LinComb, Error> {
        let fuel = self.fuel(Stage::F2, e);
        let mut out = LinComb::zero();
        let mut work = vec![(e.clone(), Poly::one(), fuel)];
        while let Some((e, c, mut fuel)) = work.pop() {
            let rec = stats(&e, self.graph)?;
            if rec.m_bad_count == 0 {
                out.add(e, c);
                continue;
            }
            self.tick(&mut fuel)?;
            let before = rec.fn_of_m_bads;
            let k = rec.min_m_bad - 1;
            let words = e.words(self.graph)?;
            let w = words[k].letters();
            let Term { kind: Kind::M(r), pos: y } = e.terms[k] else {
                return Err(self.internal("m-bad index is not a multiplication", &e));
            };
            let x = (0..y).rev().find(|&i| w[i] == r).ok_or_else(|| self.internal("m-bad term has no partner", &e))?;
            // Bring the partner next to the bad letter, apply relation 7, and
            // carry the survivors back.
            let conj: Vec<Term> = (x..y - 1).map(|a| Term::f(r, w[a + 1], a)).collect();
            let unconj: Vec<Term> = (x..y - 1).rev().map(|a| Term::f(w[a + 1], r, a)).collect();
            let site = k + conj.len();
            let rule = rel7(self.graph, r);
            let mut branched = LinComb::zero();
            for (rhs, rc) in rule.rhs.iter() {
                let mut with = conj.clone();
                with.extend(rhs.terms.iter().map(|t| t.shifted(y - 1)));
                with.extend_from_slice(&unconj);
                branched.add(splice(&e, k, 1, &with), rc.clone());
            }
            self.record(Stage::F2, &rule.name, site, Key::F2(before), Key::None);
            for (b, bc) in branched.iter() {
                for (o, oc) in self.f1(b)?.iter() {
                    let r = stats(o, self.graph)?;
                    if r.m_bad_count > 0 {
                        self.record(Stage::F2, "round", k, Key::F2(before), Key::F2(r.fn_of_m_bads));
                    }
                    work.push((o.clone(), &(&c * bc) * oc, fuel));
                }
            }
        }
        Ok(out)
    }
}

/// Crossing cleanup families, tried in this order at each site.
const F3_FAMILIES: [&str; 7] = ["a", "b", "b'", "c", "c'", "e", "x"];

/// The replacement for `family` at chain index `k` of `e`, if it matches.
fn f3_match(family: &str, e: &Expression, k: usize) -> Option<Expression> {
    let t = &e.terms;
    let a = t[k];
    let b = t.get(k + 1).copied()?;
    let c = t.get(k + 2).copied();
    let Kind::F(s, r) = a.kind else { return None };
    let i = a.pos;
    let with = match family {
        "a" => (b == Term::f(r, s, i)).then(|| (2, vec![]))?,
        "b" => (b == Term::m(r, i)).then(|| (2, vec![Term::m(r, i + 1)]))?,
        "b'" => (b == Term::m(s, i + 1)).then(|| (2, vec![Term::m(s, i)]))?,
        "c" => {
            // a = F(r', s')@(i) with a merge of s' just left of it.
            let ok = i >= 1 && b == Term::j(r, i - 1);
            ok.then(|| (2, vec![Term::f(r, s, i - 1), Term::j(r, i), Term::f(s, r, i - 1)]))?
        }
        "c'" => {
            let ok = i >= 1 && b == Term::f(s, r, i - 1) && c == Some(Term::j(s, i));
            ok.then(|| (3, vec![Term::j(s, i - 1), Term::f(s, r, i - 1)]))?
        }
        "e" => {
            // a = F(r', t')@(i) with i = j + 1, then F(s', t')@j, F(s', r')@(j + 1).
            let Kind::F(s2, t2) = b.kind else { return None };
            let ok = i >= 1 && b.pos + 1 == i && t2 == r && c == Some(Term::f(s2, s, i));
            ok.then(|| (3, vec![Term::f(s2, s, i - 1), Term::f(s2, r, i), Term::f(s, r, i - 1)]))?
        }
        "x" => {
            if !matches!(b.kind, Kind::M(_) | Kind::J(_)) {
                return None;
            }
            return swap_at(e, k);
        }
        _ => return None,
    };
    Some(splice(e, k, with.0, &with.1))
}

impl Run<'_> {
    /// Applies crossing cleanup steps until none matches. Each step strictly
    /// decreases the crossing key.
    pub(crate) fn f3(&mut self, e: &Expression) -> Result<Expression, Error> {
        let mut fuel = self.fuel(Stage::F3, e);
        let mut e = e.clone();
        loop {
            let Some((family, site, next)) = self.f3_site(&e)? else { return Ok(e) };
            self.tick(&mut fuel)?;
            let before = f3_key(&e, self.graph)?;
            let after = f3_key(&next, self.graph)?;
            self.record(Stage::F3, family, site, Key::F3(before), Key::F3(after));
            e = next;
        }
    }

    /// The first match over the variants of `e` reachable by swapping
    /// crossings on disjoint strands, searched breadth first.
    fn f3_site(&self, e: &Expression) -> Result<Option<(&'static str, usize, Expression)>, Error> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([e.clone()]);
        seen.insert(e.clone());
        while let Some(v) = queue.pop_front() {
            for k in 0..v.terms.len() {
                for family in F3_FAMILIES {
                    if let Some(next) = f3_match(family, &v, k) {
                        next.typecheck(self.graph)?;
                        return Ok(Some((family, k, next)));
                    }
                }
            }
            for k in 0..v.terms.len().saturating_sub(1) {
                let both = matches!((v.terms[k].kind, v.terms[k + 1].kind), (Kind::F(..), Kind::F(..)));
                if let Some(w) = both.then(|| swap_at(&v, k)).flatten() {
                    if seen.len() < CLOSURE_CAP && seen.insert(w.clone()) {
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(None)
    }

    /// Stage `F4`: the good-order rebuild, recorded in the trace.
    pub(crate) fn f4(&mut self, e: &Expression) -> Result<Expression, Error> {
        let out = self.rebuild(e)?;
        if out != *e {
            self.record(Stage::F4, "reorder", 0, Key::None, Key::None);
        }
        Ok(out)
    }

    /// The good-order move expression with the same strand partition as `e`,
    /// an R-expression built from `M`, `J` and `F` terms.
    ///
    /// Strands of the domain merged by some `J` form a block. Scanning the
    /// domain left to right, a singleton is multiplied away, the first strand
    /// of a block is kept, and each later strand is brought to the kept one
    /// and merged into it; the last strand of a block also closes it.
    fn rebuild(&self, e: &Expression) -> Result<Expression, Error> {
        let n = e.domain.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut strands: Vec<usize> = (0..n).collect();
        for t in &e.terms {
            match t.kind {
                Kind::J(_) => {
                    let gone = strands.remove(t.pos + 1);
                    let (a, b) = (find(&mut parent, strands[t.pos]), find(&mut parent, gone));
                    parent[b] = a;
                }
                Kind::M(_) => {
                    strands.remove(t.pos);
                }
                Kind::F(..) => strands.swap(t.pos, t.pos + 1),
                Kind::Alpha(_) | Kind::X(_) => return Err(self.internal("rebuild of a scalar or insertion", e)),
            }
        }
        if !strands.is_empty() {
            return Err(self.internal("rebuild of a map with strands left over", e));
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            blocks.entry(root).or_default().push(i);
        }
        let mut current: Vec<usize> = (0..n).collect();
        let mut holder: BTreeMap<usize, usize> = BTreeMap::new();
        let mut word = e.domain.clone();
        let mut terms = Vec::new();
        for j in 0..n {
            let root = find(&mut parent, j);
            let block = &blocks[&root];
            let l = current.len();
            let at = current.iter().position(|&x| x == j).expect("unprocessed strand is present");
            let target = l - 1 - at;
            let mv = if block.len() == 1 {
                current.remove(at);
                Move::m(target)
            } else if block[0] == j {
                holder.insert(root, j);
                continue;
            } else {
                let from = current.iter().position(|&x| x == holder[&root]).expect("holder is present");
                let source = l - from - 2;
                current.remove(from);
                if block.last() == Some(&j) {
                    current.retain(|&x| x != j);
                    Move::cch(target, source)
                } else {
                    holder.insert(root, j);
                    Move::ch(target, source)
                }
            };
            let (ts, next) = expand(&mv, &word, self.graph)
                .map_err(|err| Error::Internal(format!("rebuild produced an illegal move: {err}")))?;
            terms.extend(ts);
            word = next;
        }
        Ok(Expression::new(e.domain.clone(), terms))
    }

    /// Loops `F2`, `F3`, `F4` until no `m`-bad term is left.
    pub(crate) fn f5(&mut self, e: &Expression) -> Result<LinComb, Error> {
        let fuel = self.fuel(Stage::F5, e);
        let mut out = LinComb::zero();
        let mut work = vec![(e.clone(), Poly::one(), fuel)];
        while let Some((e, c, mut fuel)) = work.pop() {
            self.tick(&mut fuel)?;
            let rec = stats(&e, self.graph)?;
            let fired = rec.m_bad_count > 0;
            for (o, oc) in self.f2(&e)?.iter() {
                let cleaned = self.f3(o)?;
                let rebuilt = self.f4(&cleaned)?;
                let r = stats(&rebuilt, self.graph)?;
                if fired {
                    let key = Key::F5(r.mj_equal_to_left);
                    self.record(Stage::F5, "round", 0, Key::F5(rec.mj_equal_to_left), key);
                }
                let coef = &c * oc;
                if r.m_bad_count == 0 {
                    out.add(rebuilt, coef);
                } else {
                    work.push((rebuilt, coef, fuel));
                }
            }
        }
        Ok(out)
    }
}
