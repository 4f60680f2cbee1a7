//! The evaluation oracle: Bott-Samelson bimodules and their morphisms.
//!
//! The word `s_1 ⋯ s_n` is realized as `R ⊗_{R^{s_1}} R ⊗ ⋯ ⊗_{R^{s_n}} R`, a free
//! left `R`-module with basis `e_ε = 1 ⊗ x_{s_1}^{ε_1} ⊗ ⋯ ⊗ x_{s_n}^{ε_n}`. Slot
//! `k` is the `k`-th tensor factor, so letter `k` (1-based) sits between slots
//! `k-1` and `k`. Bit `k-1` of a basis index is `ε_k`.
//!
//! A pure tensor is brought to the basis right to left: the content `p` of slot
//! `k` splits as `P_{s_k}(p) + x_{s_k} ∂_{s_k}(p)`, and both invariant factors
//! slide into slot `k-1`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coxeter::CoxeterGraph;
use crate::expr::{Expression, Kind, LinComb, Term, Word};
use crate::poly::{self, Poly, Rat};
use crate::Error;

/// Coordinates of an element in the canonical basis, keyed by basis index.
pub type Coords = BTreeMap<u32, Poly>;

/// An element `Σ_ε c_ε e_ε` of a Bott-Samelson bimodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub word: Word,
    pub coords: Coords,
}

/// A left-linear map between Bott-Samelson bimodules, stored by columns: column
/// `b` holds the image of the basis vector `e_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleMap {
    pub domain: Word,
    pub codomain: Word,
    pub columns: Vec<Coords>,
}

impl BimoduleMap {
    pub fn zero(domain: Word, codomain: Word) -> Self {
        let columns = vec![Coords::new(); 1 << domain.len()];
        BimoduleMap { domain, codomain, columns }
    }

    pub fn identity(word: Word) -> Self {
        let columns = (0..1u32 << word.len()).map(|b| Coords::from([(b, Poly::one())])).collect();
        BimoduleMap { domain: word.clone(), codomain: word, columns }
    }

    pub fn rows(&self) -> usize {
        1 << self.codomain.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// The matrix entry in row `row` (codomain basis) and column `col`.
    pub fn entry(&self, row: u32, col: u32) -> Poly {
        self.columns[col as usize].get(&row).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &BimoduleMap) -> BimoduleMap {
        assert_eq!(self.codomain, then.domain, "composing maps with mismatched words");
        let columns = self.columns.iter().map(|col| apply_columns(&then.columns, col)).collect();
        BimoduleMap { domain: self.domain.clone(), codomain: then.codomain.clone(), columns }
    }

    pub fn scale(&self, c: &Poly) -> BimoduleMap {
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter().map(|(b, p)| (*b, p * c)).filter(|(_, p)| !p.is_zero()).collect()
            })
            .collect();
        BimoduleMap { domain: self.domain.clone(), codomain: self.codomain.clone(), columns }
    }

    pub fn add(&self, other: &BimoduleMap) -> BimoduleMap {
        assert_eq!(self.domain, other.domain);
        assert_eq!(self.codomain, other.codomain);
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut out = a.clone();
                add_into(&mut out, b, &Poly::one());
                out
            })
            .collect();
        BimoduleMap { domain: self.domain.clone(), codomain: self.codomain.clone(), columns }
    }

    /// The first domain basis vector on which two maps disagree.
    pub fn first_difference(&self, other: &BimoduleMap) -> Option<u32> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Some(0);
        }
        (0..self.columns.len()).find(|&b| self.columns[b] != other.columns[b]).map(|b| b as u32)
    }

    /// Row-major text: one row per line, entries separated by ` | `.
    pub fn to_text(&self, graph: &CoxeterGraph) -> String {
        let mut out = format!(
            "domain: {}\ncodomain: {}\n",
            self.domain.to_text(graph),
            self.codomain.to_text(graph)
        );
        for row in 0..self.rows() as u32 {
            let entries: Vec<String> =
                (0..self.cols() as u32).map(|c| self.entry(row, c).to_text(graph.names())).collect();
            out.push_str(&format!("{}: {}\n", basis_label(row, self.codomain.len()), entries.join(" | ")));
        }
        out
    }
}

/// The label `e_ε` of a basis index, e.g. `e_01` for `ε = (0, 1)`; `e` for
/// the empty word.
pub fn basis_label(bits: u32, n: usize) -> String {
    if n == 0 {
        return "e".to_string();
    }
    let eps: String = (0..n).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect();
    format!("e_{eps}")
}

fn add_into(acc: &mut Coords, v: &Coords, c: &Poly) {
    for (b, p) in v {
        let term = p * c;
        if term.is_zero() {
            continue;
        }
        let entry = acc.entry(*b).or_default();
        *entry += &term;
        if entry.is_zero() {
            acc.remove(b);
        }
    }
}

fn apply_columns(columns: &[Coords], v: &Coords) -> Coords {
    let mut out = Coords::new();
    for (b, c) in v {
        add_into(&mut out, &columns[*b as usize], c);
    }
    out
}

/// Evaluation engine for one graph. Images of basis vectors under single terms
/// are memoized, so reuse an `Oracle` across many evaluations.
pub struct Oracle<'g> {
    graph: &'g CoxeterGraph,
    memo: RefCell<HashMap<(Term, Word, u32), Coords>>,
}

impl<'g> Oracle<'g> {
    pub fn new(graph: &'g CoxeterGraph) -> Self {
        Oracle { graph, memo: RefCell::new(HashMap::new()) }
    }

    pub fn graph(&self) -> &'g CoxeterGraph {
        self.graph
    }

    /// Coordinates of the pure tensor `slots[0] ⊗ ⋯ ⊗ slots[n]` on `word`.
    pub fn canonicalize(&self, word: &Word, slots: &[Poly]) -> Coords {
        canonicalize(self.graph, word, slots)
    }

    /// Multiplies an element on the right by `q`.
    pub fn right_multiply(&self, el: &Element, q: &Poly) -> Element {
        let n = el.word.len();
        let mut coords = Coords::new();
        for (b, c) in &el.coords {
            let mut slots = basis_slots(self.graph, &el.word, *b);
            slots[n] = &slots[n] * q;
            add_into(&mut coords, &self.canonicalize(&el.word, &slots), c);
        }
        Element { word: el.word.clone(), coords }
    }

    /// Image of the basis vector `e_bits` of `word` under `term`.
    fn image(&self, term: &Term, word: &Word, bits: u32) -> Coords {
        let key = (*term, word.clone(), bits);
        if let Some(hit) = self.memo.borrow().get(&key) {
            return hit.clone();
        }
        let out = apply_term(self.graph, term, word, bits);
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    /// Pushes coordinates on `word` through `term`.
    fn push(&self, term: &Term, word: &Word, v: &Coords) -> Coords {
        let mut out = Coords::new();
        for (b, c) in v {
            add_into(&mut out, &self.image(term, word, *b), c);
        }
        out
    }

    pub fn eval_term(&self, term: &Term, word: &Word) -> Result<BimoduleMap, Error> {
        self.eval_expression(&Expression::new(word.clone(), vec![*term]))
    }

    pub fn eval_expression(&self, e: &Expression) -> Result<BimoduleMap, Error> {
        let words = e.words(self.graph)?;
        let mut columns: Vec<Coords> =
            (0..1u32 << e.domain.len()).map(|b| Coords::from([(b, Poly::one())])).collect();
        for (k, term) in e.terms.iter().enumerate() {
            for col in columns.iter_mut() {
                *col = self.push(term, &words[k], col);
            }
        }
        Ok(BimoduleMap {
            domain: e.domain.clone(),
            codomain: words.last().cloned().unwrap_or_default(),
            columns,
        })
    }

    /// Evaluates a linear combination. The zero combination needs its words
    /// supplied, since it carries none.
    pub fn eval_lincomb(&self, lc: &LinComb, domain: &Word, codomain: &Word) -> Result<BimoduleMap, Error> {
        let mut acc = BimoduleMap::zero(domain.clone(), codomain.clone());
        for (e, c) in lc.iter() {
            let m = self.eval_expression(e)?;
            if m.domain != *domain || m.codomain != *codomain {
                return Err(Error::WordMismatch("linear combination mixes words".into()));
            }
            acc = acc.add(&m.scale(c));
        }
        Ok(acc)
    }
}

/// Slot contents of the basis vector `e_bits`.
pub fn basis_slots(graph: &CoxeterGraph, word: &Word, bits: u32) -> Vec<Poly> {
    let mut slots = vec![Poly::one()];
    for (k, &s) in word.letters().iter().enumerate() {
        slots.push(if bits >> k & 1 == 1 { poly::x_form(s, graph) } else { Poly::one() });
    }
    slots
}

/// Coordinates of the pure tensor `slots[0] ⊗ ⋯ ⊗ slots[n]` on `word`.
pub fn canonicalize(graph: &CoxeterGraph, word: &Word, slots: &[Poly]) -> Coords {
    let n = word.len();
    assert_eq!(slots.len(), n + 1, "a word of length n has n+1 slots");
    let mut states: Vec<(u32, Poly)> = vec![(0, slots[n].clone())];
    for k in (1..=n).rev() {
        let s = word.0[k - 1];
        let mut next = Vec::with_capacity(states.len() * 2);
        for (bits, q) in states {
            if q.is_zero() {
                continue;
            }
            let inv = poly::p_op(s, &q, graph);
            let div = poly::demazure(s, &q, graph);
            if !inv.is_zero() {
                next.push((bits, &inv * &slots[k - 1]));
            }
            if !div.is_zero() {
                next.push((bits | 1 << (k - 1), &div * &slots[k - 1]));
            }
        }
        states = next;
    }
    let mut out = Coords::new();
    for (bits, q) in states {
        if !q.is_zero() {
            let entry = out.entry(bits).or_default();
            *entry += &q;
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Image of `e_bits` under a single term, from the defining formulas.
fn apply_term(graph: &CoxeterGraph, term: &Term, word: &Word, bits: u32) -> Coords {
    let slots = basis_slots(graph, word, bits);
    let target = term.step(word, graph).expect("term must be well typed");
    let i = term.pos;
    let mut pieces: Vec<Vec<Poly>> = Vec::new();
    match term.kind {
        Kind::J(s) => {
            // p1 ⊗ p2 ⊗ p3 ↦ p1 ∂_s(p2) ⊗ p3
            let mut v = slots[..=i].to_vec();
            v[i] = &v[i] * &poly::demazure(s, &slots[i + 1], graph);
            v.extend_from_slice(&slots[i + 2..]);
            pieces.push(v);
        }
        Kind::M(_) => {
            // p1 ⊗ p2 ↦ p1 p2
            let mut v = slots[..=i].to_vec();
            v[i] = &v[i] * &slots[i + 1];
            v.extend_from_slice(&slots[i + 2..]);
            pieces.push(v);
        }
        Kind::Alpha(s) => {
            // p ↦ p x_s ⊗ 1 ⊗ 1 + p ⊗ 1 ⊗ x_s
            let x = poly::x_form(s, graph);
            for right in [false, true] {
                let mut v = slots[..i].to_vec();
                if right {
                    v.extend([slots[i].clone(), Poly::one(), x.clone()]);
                } else {
                    v.extend([&slots[i] * &x, Poly::one(), Poly::one()]);
                }
                v.extend_from_slice(&slots[i + 1..]);
                pieces.push(v);
            }
        }
        Kind::F(s, _) => {
            // p1 ⊗ p2 ⊗ p3 ↦ p1 ∂_s(p2) ⊗ 1 ⊗ x_s p3 + p1 P_s(p2) ⊗ 1 ⊗ p3
            let x = poly::x_form(s, graph);
            let (p1, p2, p3) = (&slots[i], &slots[i + 1], &slots[i + 2]);
            let mut a = slots[..i].to_vec();
            a.extend([p1 * &poly::demazure(s, p2, graph), Poly::one(), &x * p3]);
            a.extend_from_slice(&slots[i + 3..]);
            let mut b = slots[..i].to_vec();
            b.extend([p1 * &poly::p_op(s, p2, graph), Poly::one(), p3.clone()]);
            b.extend_from_slice(&slots[i + 3..]);
            pieces.extend([a, b]);
        }
        Kind::X(s) => {
            let mut v = slots.clone();
            v[i] = &v[i] * &poly::x_form(s, graph);
            pieces.push(v);
        }
    }
    let mut out = Coords::new();
    for v in pieces {
        if v.iter().any(Poly::is_zero) {
            continue;
        }
        add_into(&mut out, &canonicalize(graph, &target, &v), &Poly::one());
    }
    out
}

/// Evaluates an expression with a fresh oracle.
pub fn eval_expression(graph: &CoxeterGraph, e: &Expression) -> Result<BimoduleMap, Error> {
    Oracle::new(graph).eval_expression(e)
}

/// Outcome of a specialization-based independence test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Independence {
    /// True when some specialization has full rank, which certifies
    /// independence over the polynomial ring. False means inconclusive.
    pub independent: bool,
    /// The points tried, in order.
    pub points: Vec<Vec<Rat>>,
}

/// Tests left `R`-linear independence of maps sharing domain and codomain.
///
/// At a point `y`, full rank of the specialized matrices rules out any
/// polynomial relation, since all maximal minors would vanish identically.
/// At least `min_points` seeded points are tried; the verdict is positive as
/// soon as one of them has full rank.
pub fn independent(maps: &[BimoduleMap], graph: &CoxeterGraph, seed: u64, min_points: usize) -> Independence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut independent = maps.is_empty();
    let attempts = min_points.max(3) + 3;
    for attempt in 0..attempts {
        if independent && attempt >= min_points.max(3) {
            break;
        }
        let point: Vec<Rat> = (0..graph.rank())
            .map(|_| Rat::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
            .collect();
        let rows: Vec<Vec<Rat>> = maps
            .iter()
            .map(|m| {
                let mut v = Vec::new();
                for col in 0..m.cols() as u32 {
                    for row in 0..m.rows() as u32 {
                        v.push(m.entry(row, col).specialize(&point).expect("point covers all variables"));
                    }
                }
                v
            })
            .collect();
        if rank(rows) == maps.len() {
            independent = true;
        }
        points.push(point);
    }
    Independence { independent, points }
}

/// Rank of a rational matrix given by rows.
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = Rat::one() / rows[r][col].clone();
        let pivot_row: Vec<Rat> = rows[r].iter().map(|v| v * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a -= &factor * b;
                }
            }
        }
        rows[r] = pivot_row;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// A counterexample to an equality of maps: the domain basis vector where the
/// two sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub basis: String,
}

/// Checks `lhs = rhs` exactly on the domain word `domain`.
pub fn check_equal(
    oracle: &Oracle,
    lhs: &LinComb,
    rhs: &LinComb,
    domain: &Word,
    codomain: &Word,
) -> Result<(), Mismatch> {
    let err = |b: u32| Mismatch { basis: basis_label(b, domain.len()) };
    let a = oracle.eval_lincomb(lhs, domain, codomain).map_err(|_| err(0))?;
    let b = oracle.eval_lincomb(rhs, domain, codomain).map_err(|_| err(0))?;
    match a.first_difference(&b) {
        None => Ok(()),
        Some(bits) => Err(err(bits)),
    }
}

/// Specialization points as text, one point per line.
pub fn points_to_text(points: &[Vec<Rat>], graph: &CoxeterGraph) -> String {
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(graph.names())
                .map(|(v, n)| format!("y_{n}={}", poly::rat_to_text(v)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::Gen;
    use crate::expr::word_of;

    fn coords(entries: &[(u32, Poly)]) -> Coords {
        entries.iter().cloned().collect()
    }

    #[test]
    fn canonicalize_examples() {
        let g = CoxeterGraph::a1();
        let w = word_of(&g, "s");
        let x = Poly::var(0);
        assert_eq!(canonicalize(&g, &w, &[Poly::one(), &x * &x]), coords(&[(0, &x * &x)]));
        assert_eq!(canonicalize(&g, &w, &[Poly::one(), x.clone()]), coords(&[(1, Poly::one())]));
        let q = &x + &Poly::int(3);
        assert_eq!(canonicalize(&g, &w, &[q.clone(), Poly::one()]), coords(&[(0, q)]));
    }

    #[test]
    fn right_multiplication_is_not_left() {
        let g = CoxeterGraph::a1();
        let o = Oracle::new(&g);
        let w = word_of(&g, "s");
        let x = Poly::var(0);
        let unit = Element { word: w.clone(), coords: coords(&[(0, Poly::one())]) };
        assert_eq!(o.right_multiply(&unit, &x).coords, coords(&[(1, Poly::one())]));
        let e1 = Element { word: w.clone(), coords: coords(&[(1, Poly::one())]) };
        assert_eq!(o.right_multiply(&e1, &x).coords, coords(&[(0, &x * &x)]));
        assert_ne!(coords(&[(0, x.clone())]), o.right_multiply(&unit, &x).coords);
    }

    #[test]
    fn term_matrices() {
        let g = CoxeterGraph::a1xa1();
        let o = Oracle::new(&g);
        let (s, r) = (Gen(0), Gen(1));
        let j = o.eval_term(&Term::j(s, 0), &word_of(&g, "s s")).unwrap();
        assert_eq!(j.columns, vec![coords(&[]), coords(&[(0, Poly::one())]), coords(&[]), coords(&[(1, Poly::one())])]);
        let m = o.eval_term(&Term::m(s, 0), &word_of(&g, "s")).unwrap();
        assert_eq!(m.columns, vec![coords(&[(0, Poly::one())]), coords(&[(0, Poly::var(0))])]);
        let f = o.eval_term(&Term::f(s, r, 0), &word_of(&g, "s r")).unwrap();
        assert_eq!(f.codomain, word_of(&g, "r s"));
        let expected: Vec<Coords> = [0u32, 2, 1, 3].iter().map(|&b| coords(&[(b, Poly::one())])).collect();
        assert_eq!(f.columns, expected);
    }

    #[test]
    fn shapes_match_word_lengths() {
        let g = CoxeterGraph::mixed();
        let o = Oracle::new(&g);
        let w = word_of(&g, "s r t");
        let a = o.eval_term(&Term::alpha(Gen(2), 1), &w).unwrap();
        assert_eq!((a.rows(), a.cols()), (32, 8));
    }

    #[test]
    fn multiplication_after_insertion_is_twice_the_root() {
        let g = CoxeterGraph::infinite_dihedral();
        let s = Gen(0);
        let e = Expression::new(Word::empty(), vec![Term::alpha(s, 0), Term::m(s, 0), Term::m(s, 0)]);
        let m = eval_expression(&g, &e).unwrap();
        assert_eq!(m.entry(0, 0), poly::x_form(s, &g).scale(&crate::poly::rat(2)));
    }

    #[test]
    fn rank_of_small_matrices() {
        let r = |v: &[&[i64]]| v.iter().map(|row| row.iter().map(|&x| crate::poly::rat(x)).collect()).collect();
        assert_eq!(rank(r(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(r(&[&[1, 2], &[0, 4]])), 2);
        assert_eq!(rank(r(&[&[0, 0]])), 0);
    }
}
