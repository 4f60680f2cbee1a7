//! Words, generator terms, expressions and polynomial linear combinations.
//!
//! A term carries a left offset `pos`: the number of strands to its left. For
//! `X(s)@i` the offset is a slot, `0 ≤ i ≤ n`, where slot `i` sits between
//! letters `i-1` and `i`. Terms are stored in application order.
//!
//! The text syntax is `word s s | j@0(s) ; m@0(s)`. The macros `p@i(s)` and
//! `eps@i(s)` expand on parse to `a@i(s) ; j@i+1(s)` and `a@i(s) ; m@i(s)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coxeter::{CoxeterGraph, Gen};
use crate::poly::{Poly, Rat};
use crate::Error;

/// A tensor word `θ_{s_1} ⋯ θ_{s_n}`; the empty word is the unit object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn new(letters: Vec<Gen>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses space or comma separated generator names.
    pub fn parse(text: &str, graph: &CoxeterGraph) -> Result<Self, Error> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| graph.gen(t).ok_or_else(|| Error::UnknownGenerator(t.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        self.0.iter().map(|&g| graph.name(g)).collect::<Vec<_>>().join(" ")
    }

    /// All words of length at most `max_len` over the generators of `graph`,
    /// shortest first.
    pub fn all_up_to(graph: &CoxeterGraph, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for g in graph.gens() {
                    let mut v = w.0.clone();
                    v.push(g);
                    next.push(Word(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

/// The generator morphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Merge `θ_s θ_s → θ_s`.
    J(Gen),
    /// Multiplication `θ_s → R`.
    M(Gen),
    /// Insertion `R → θ_s θ_s`.
    Alpha(Gen),
    /// Crossing `θ_s θ_r → θ_r θ_s` for a commuting pair.
    F(Gen, Gen),
    /// Multiplication by `x_s` in one slot.
    X(Gen),
}

/// A generator morphism placed at a left offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub kind: Kind,
    pub pos: usize,
}

impl Term {
    pub fn j(s: Gen, pos: usize) -> Self {
        Term { kind: Kind::J(s), pos }
    }

    pub fn m(s: Gen, pos: usize) -> Self {
        Term { kind: Kind::M(s), pos }
    }

    pub fn alpha(s: Gen, pos: usize) -> Self {
        Term { kind: Kind::Alpha(s), pos }
    }

    pub fn f(s: Gen, r: Gen, pos: usize) -> Self {
        Term { kind: Kind::F(s, r), pos }
    }

    pub fn x(s: Gen, slot: usize) -> Self {
        Term { kind: Kind::X(s), pos: slot }
    }

    /// Number of letters consumed.
    pub fn in_width(&self) -> usize {
        match self.kind {
            Kind::J(_) | Kind::F(..) => 2,
            Kind::M(_) => 1,
            Kind::Alpha(_) | Kind::X(_) => 0,
        }
    }

    /// Number of letters produced.
    pub fn out_width(&self) -> usize {
        match self.kind {
            Kind::Alpha(_) | Kind::F(..) => 2,
            Kind::J(_) => 1,
            Kind::M(_) | Kind::X(_) => 0,
        }
    }

    /// Letters the term expects at its offset.
    pub fn input_letters(&self) -> Vec<Gen> {
        match self.kind {
            Kind::J(s) => vec![s, s],
            Kind::M(s) => vec![s],
            Kind::F(s, r) => vec![s, r],
            Kind::Alpha(_) | Kind::X(_) => vec![],
        }
    }

    /// Letters the term produces at its offset.
    pub fn output_letters(&self) -> Vec<Gen> {
        match self.kind {
            Kind::J(s) => vec![s],
            Kind::Alpha(s) => vec![s, s],
            Kind::F(s, r) => vec![r, s],
            Kind::M(_) | Kind::X(_) => vec![],
        }
    }

    pub fn shifted(&self, by: usize) -> Term {
        Term { kind: self.kind, pos: self.pos + by }
    }

    /// Applies the term to `word`, checking that it is well typed there.
    pub fn step(&self, word: &Word, graph: &CoxeterGraph) -> Result<Word, String> {
        if let Kind::F(s, r) = self.kind {
            if !graph.commutes(s, r) {
                return Err(format!(
                    "crossing ({},{}) needs a distinct commuting pair",
                    graph.name(s),
                    graph.name(r)
                ));
            }
        }
        let need = self.input_letters();
        let i = self.pos;
        let n = word.len();
        if i + need.len() > n {
            return Err(format!("offset {i} out of range for word of length {n}"));
        }
        for (k, &g) in need.iter().enumerate() {
            let found = word.0[i + k];
            if found != g {
                return Err(format!(
                    "letter {} is `{}`, expected `{}`",
                    i + k,
                    graph.name(found),
                    graph.name(g)
                ));
            }
        }
        let mut out = word.0[..i].to_vec();
        out.extend(self.output_letters());
        out.extend_from_slice(&word.0[i + need.len()..]);
        Ok(Word(out))
    }

    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        let n = |g: Gen| graph.name(g).to_string();
        match self.kind {
            Kind::J(s) => format!("j@{}({})", self.pos, n(s)),
            Kind::M(s) => format!("m@{}({})", self.pos, n(s)),
            Kind::Alpha(s) => format!("a@{}({})", self.pos, n(s)),
            Kind::F(s, r) => format!("f@{}({},{})", self.pos, n(s), n(r)),
            Kind::X(s) => format!("x@{}({})", self.pos, n(s)),
        }
    }
}

/// A composite of terms acting on a domain word, applied first to last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expression {
    pub domain: Word,
    pub terms: Vec<Term>,
}

impl Expression {
    pub fn new(domain: Word, terms: Vec<Term>) -> Self {
        Expression { domain, terms }
    }

    pub fn identity(domain: Word) -> Self {
        Expression { domain, terms: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The running words: entry `k` is the domain of term `k`, the last entry
    /// is the codomain.
    pub fn words(&self, graph: &CoxeterGraph) -> Result<Vec<Word>, Error> {
        let mut out = Vec::with_capacity(self.terms.len() + 1);
        let mut w = self.domain.clone();
        for g in &w.0 {
            if g.0 >= graph.rank() {
                return Err(Error::Type { index: 0, msg: "letter outside the graph".into() });
            }
        }
        for (index, t) in self.terms.iter().enumerate() {
            let gens_ok = match t.kind {
                Kind::J(s) | Kind::M(s) | Kind::Alpha(s) | Kind::X(s) => s.0 < graph.rank(),
                Kind::F(s, r) => s.0 < graph.rank() && r.0 < graph.rank(),
            };
            if !gens_ok {
                return Err(Error::Type { index, msg: "generator outside the graph".into() });
            }
            if let Kind::X(_) = t.kind {
                if t.pos > w.len() {
                    return Err(Error::Type {
                        index,
                        msg: format!("slot {} out of range for word of length {}", t.pos, w.len()),
                    });
                }
            }
            let next = t.step(&w, graph).map_err(|msg| Error::Type { index, msg })?;
            out.push(std::mem::replace(&mut w, next));
        }
        out.push(w);
        Ok(out)
    }

    /// Checks every term and returns the codomain.
    pub fn typecheck(&self, graph: &CoxeterGraph) -> Result<Word, Error> {
        Ok(self.words(graph)?.pop().expect("words is never empty"))
    }

    /// The right offset of term `k`: strands to its right in its domain word.
    pub fn right_offset(&self, k: usize, graph: &CoxeterGraph) -> Result<usize, Error> {
        let words = self.words(graph)?;
        let t = &self.terms[k];
        Ok(words[k].len() - t.pos - t.in_width())
    }

    pub fn has_alpha(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.kind, Kind::Alpha(_)))
    }

    pub fn has_x(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.kind, Kind::X(_)))
    }

    /// Tensors on the left with identity strands carrying `prefix`.
    pub fn shifted(&self, prefix: &[Gen]) -> Expression {
        let mut domain = prefix.to_vec();
        domain.extend_from_slice(&self.domain.0);
        Expression {
            domain: Word(domain),
            terms: self.terms.iter().map(|t| t.shifted(prefix.len())).collect(),
        }
    }

    /// `self` followed by `then`.
    pub fn compose(&self, then: &Expression) -> Expression {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&then.terms);
        Expression { domain: self.domain.clone(), terms }
    }

    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        let mut out = String::from("word");
        for &g in &self.domain.0 {
            out.push(' ');
            out.push_str(graph.name(g));
        }
        out.push_str(" |");
        out.push_str(&self.terms_text(graph));
        out
    }

    /// The term list alone, ` t1 ; t2`, with a leading space when non-empty.
    pub fn terms_text(&self, graph: &CoxeterGraph) -> String {
        if self.terms.is_empty() {
            return String::new();
        }
        let ts: Vec<String> = self.terms.iter().map(|t| t.to_text(graph)).collect();
        format!(" {}", ts.join(" ; "))
    }

    /// Parses the expression syntax. Only names are resolved; use
    /// [`Expression::typecheck`] for typing.
    pub fn parse(text: &str, graph: &CoxeterGraph) -> Result<Self, Error> {
        Parser { text, pos: 0, graph }.expression()
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    graph: &'a CoxeterGraph,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<&'a str, Error> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .take_while(|&(k, c)| c.is_ascii_alphabetic() || (k > 0 && (c.is_ascii_digit() || c == '_')))
            .map(|(_, c)| c.len_utf8())
            .sum::<usize>();
        if len == 0 {
            return self.err("expected a name");
        }
        self.pos += len;
        Ok(&self.text[start..start + len])
    }

    fn number(&mut self) -> Result<usize, Error> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..].chars().take_while(char::is_ascii_digit).count();
        if len == 0 {
            return self.err("expected an offset");
        }
        self.pos += len;
        self.text[start..start + len].parse().or_else(|_| self.err("offset too large"))
    }

    fn generator(&mut self) -> Result<Gen, Error> {
        let start = self.pos;
        let name = self.ident()?;
        match self.graph.gen(name) {
            Some(g) => Ok(g),
            None => Err(Error::Syntax { pos: start, msg: format!("unknown generator `{name}`") }),
        }
    }

    fn expression(mut self) -> Result<Expression, Error> {
        if self.ident()? != "word" {
            return self.err("expected `word`");
        }
        let mut domain = Vec::new();
        while self.peek() != Some('|') {
            if self.peek().is_none() {
                return self.err("expected `|`");
            }
            domain.push(self.generator()?);
        }
        self.expect('|')?;
        let mut terms = Vec::new();
        if self.peek().is_some() {
            loop {
                self.term(&mut terms)?;
                match self.peek() {
                    Some(';') => self.pos += 1,
                    None => break,
                    Some(_) => return self.err("expected `;` or end of input"),
                }
            }
        }
        Ok(Expression { domain: Word(domain), terms })
    }

    fn term(&mut self, out: &mut Vec<Term>) -> Result<(), Error> {
        let start = self.pos;
        let kind = self.ident()?.to_string();
        self.expect('@')?;
        let pos = self.number()?;
        self.expect('(')?;
        let s = self.generator()?;
        let r = if self.peek() == Some(',') {
            self.pos += 1;
            Some(self.generator()?)
        } else {
            None
        };
        self.expect(')')?;
        let arity_err = |this: &Self| Error::Syntax {
            pos: this.pos,
            msg: format!("wrong number of generators for `{kind}`"),
        };
        match (kind.as_str(), r) {
            ("j", None) => out.push(Term::j(s, pos)),
            ("m", None) => out.push(Term::m(s, pos)),
            ("a", None) => out.push(Term::alpha(s, pos)),
            ("x", None) => out.push(Term::x(s, pos)),
            ("f", Some(r)) => out.push(Term::f(s, r, pos)),
            ("p", None) => out.extend([Term::alpha(s, pos), Term::j(s, pos + 1)]),
            ("eps", None) => out.extend([Term::alpha(s, pos), Term::m(s, pos)]),
            ("j" | "m" | "a" | "x" | "f" | "p" | "eps", _) => return Err(arity_err(self)),
            _ => return Err(Error::Syntax { pos: start, msg: format!("unknown term kind `{kind}`") }),
        }
        Ok(())
    }
}

/// A finite polynomial-weighted sum of expressions sharing domain and codomain.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<Expression, Poly>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn single(e: Expression) -> Self {
        LinComb::term(e, Poly::one())
    }

    pub fn term(e: Expression, c: Poly) -> Self {
        let mut out = LinComb::zero();
        out.add(e, c);
        out
    }

    /// Adds `c · e`, dropping the entry if the coefficient cancels.
    pub fn add(&mut self, e: Expression, c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_all(&mut self, other: &LinComb, scale: &Poly) {
        for (e, c) in &other.terms {
            self.add(e.clone(), c * scale);
        }
    }

    pub fn scale(&self, c: &Poly) -> LinComb {
        let mut out = LinComb::zero();
        out.add_all(self, c);
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> LinComb {
        self.scale(&Poly::constant(c.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Expression, &Poly)> {
        self.terms.iter()
    }

    pub fn expressions(&self) -> impl Iterator<Item = &Expression> {
        self.terms.keys()
    }

    pub fn coefficient(&self, e: &Expression) -> Poly {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// One line per expression, `<poly> * [ <terms> ]`, or `0`.
    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        if self.terms.is_empty() {
            return "0\n".to_string();
        }
        let mut out = String::new();
        for (e, c) in &self.terms {
            let ts: Vec<String> = e.terms.iter().map(|t| t.to_text(graph)).collect();
            out.push_str(&format!("{} * [ {} ]\n", c.to_text(graph.names()), ts.join(" ; ")));
        }
        out
    }
}

impl FromIterator<(Expression, Poly)> for LinComb {
    fn from_iter<I: IntoIterator<Item = (Expression, Poly)>>(iter: I) -> Self {
        let mut out = LinComb::zero();
        for (e, c) in iter {
            out.add(e, c);
        }
        out
    }
}

/// Wraps a graph to display words and expressions.
pub struct Show<'a, T>(pub &'a T, pub &'a CoxeterGraph);

impl fmt::Display for Show<'_, Expression> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_text(self.1))
    }
}

impl fmt::Display for Show<'_, Word> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_text(self.1))
    }
}

/// Knobs for [`random_expression_with`].
#[derive(Clone, Debug)]
pub struct FuzzOptions {
    /// Maximal number of terms, counting macro expansions.
    pub max_len: usize,
    pub allow_x: bool,
    pub allow_alpha: bool,
    /// Require the empty codomain.
    pub to_unit: bool,
}

impl FuzzOptions {
    pub fn r_expressions(max_len: usize) -> Self {
        FuzzOptions { max_len, allow_x: true, allow_alpha: true, to_unit: true }
    }
}

/// A seeded random R-expression on `word` with at most `max_len` terms.
///
/// Fails only when `word` is longer than `max_len`, since each letter needs at
/// least one term to be consumed.
pub fn random_expression(
    graph: &CoxeterGraph,
    word: &Word,
    max_len: usize,
    seed: u64,
) -> Result<Expression, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_expression_with(graph, word, &FuzzOptions::r_expressions(max_len), &mut rng)
}

/// Seeded random expression generation by a forward walk over legal terms.
///
/// With `to_unit` every step keeps the running word short enough to be
/// consumed by the remaining budget, so the walk always ends at the empty word.
pub fn random_expression_with<R: Rng>(
    graph: &CoxeterGraph,
    word: &Word,
    opts: &FuzzOptions,
    rng: &mut R,
) -> Result<Expression, Error> {
    if opts.to_unit && word.len() > opts.max_len {
        return Err(Error::WordMismatch(format!(
            "a word of length {} cannot reach the unit in {} terms",
            word.len(),
            opts.max_len
        )));
    }
    let mut w = word.clone();
    let mut terms: Vec<Term> = Vec::new();
    loop {
        let remaining = opts.max_len - terms.len();
        if remaining == 0 {
            break;
        }
        if opts.to_unit && w.is_empty() && (remaining < 3 || !opts.allow_alpha || rng.gen_bool(0.5)) {
            break;
        }
        if !opts.to_unit && rng.gen_ratio(1, (remaining as u32) + 1) {
            break;
        }
        // Longest admissible word after a step costing `cost` terms.
        let fits = |len: usize, cost: usize| cost <= remaining && (!opts.to_unit || len + cost <= remaining);
        let mut groups: Vec<Vec<Vec<Term>>> = Vec::new();
        let n = w.len();
        let letters = &w.0;
        let mut js = Vec::new();
        let mut fs = Vec::new();
        let mut ms = Vec::new();
        for i in 0..n {
            if fits(n - 1, 1) {
                ms.push(vec![Term::m(letters[i], i)]);
            }
            if i + 1 < n {
                if letters[i] == letters[i + 1] && fits(n - 1, 1) {
                    js.push(vec![Term::j(letters[i], i)]);
                }
                if graph.commutes(letters[i], letters[i + 1]) && fits(n, 1) {
                    fs.push(vec![Term::f(letters[i], letters[i + 1], i)]);
                }
            }
        }
        groups.extend([js, fs, ms]);
        if opts.allow_x && fits(n, 1) {
            let xs = (0..=n)
                .flat_map(|i| graph.gens().map(move |g| vec![Term::x(g, i)]))
                .collect();
            groups.push(xs);
        }
        if opts.allow_alpha {
            if fits(n + 2, 1) {
                groups.push(
                    (0..=n)
                        .flat_map(|i| graph.gens().map(move |g| vec![Term::alpha(g, i)]))
                        .collect(),
                );
            }
            if fits(n + 1, 2) {
                let ps = (0..n).map(|i| vec![Term::alpha(letters[i], i), Term::j(letters[i], i + 1)]);
                groups.push(ps.collect());
                groups.push(
                    (0..=n)
                        .flat_map(|i| graph.gens().map(move |g| vec![Term::alpha(g, i), Term::m(g, i)]))
                        .collect(),
                );
            }
        }
        groups.retain(|g| !g.is_empty());
        let Some(group) = groups.choose(rng) else {
            break;
        };
        let step = group.choose(rng).expect("groups are non-empty").clone();
        for t in step {
            w = t.step(&w, graph).expect("generated terms are legal");
            terms.push(t);
        }
    }
    Ok(Expression { domain: word.clone(), terms })
}

/// Parses a word such as `"s r s"`. Panics on unknown names; meant for tests.
pub fn word_of(graph: &CoxeterGraph, text: &str) -> Word {
    Word::parse(text, graph).expect("valid word")
}
