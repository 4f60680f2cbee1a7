//! Statistics attached to an expression: badness of `m` and `j` terms, position
//! vectors, and the lexicographic keys that drive the rewriting loops.
//!
//! Chain indices are 1-based here, matching the counting in the termination
//! arguments. Badness of a term is decided on its domain word.

use std::cmp::Ordering;

use crate::coxeter::CoxeterGraph;
use crate::expr::{Expression, Kind, Word};
use crate::Error;

/// All statistics of one expression.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasureRecord {
    pub m_bad_count: usize,
    pub j_bad_count: usize,
    /// For each `J` term in order: chain index plus right offset.
    pub j_positions: Vec<usize>,
    pub f_count: usize,
    /// Sum of the left offsets of the `F` terms.
    pub f_to_right: usize,
    /// Sum of the chain indices of the `M` and `J` terms.
    pub depth_mj: usize,
    /// Sum over `M` terms of `length - index`.
    pub m_far_from_bottom: usize,
    /// Chain index of the first `m`-bad term, 0 if there is none.
    pub min_m_bad: usize,
    /// Number of `M`/`J` terms strictly after `min_m_bad`.
    pub mj_after_min_m_bad: usize,
    /// `(mj_after_min_m_bad, left offset of the first m-bad term)`.
    pub fn_of_m_bads: (usize, usize),
    /// Chain index of the last `j`-bad term, 0 if there is none.
    pub max_j_bad: usize,
    /// Over `M` and `J` terms, the number of equal letters to the left of the
    /// letter acted on.
    pub mj_equal_to_left: usize,
}

impl MeasureRecord {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let positions: Vec<String> = self.j_positions.iter().map(usize::to_string).collect();
        format!(
            "m_bad_count: {}\nj_bad_count: {}\nj_positions: ({})\nf_count: {}\nf_to_right: {}\n\
             depth_mj: {}\nm_far_from_bottom: {}\nmin_m_bad: {}\nmj_after_min_m_bad: {}\n\
             fn_of_m_bads: ({}, {})\nmax_j_bad: {}\nmj_equal_to_left: {}\n",
            self.m_bad_count,
            self.j_bad_count,
            positions.join(", "),
            self.f_count,
            self.f_to_right,
            self.depth_mj,
            self.m_far_from_bottom,
            self.min_m_bad,
            self.mj_after_min_m_bad,
            self.fn_of_m_bads.0,
            self.fn_of_m_bads.1,
            self.max_j_bad,
            self.mj_equal_to_left,
        )
    }
}

/// Whether letter `i` (1-based) has an earlier equal letter with only
/// commuting letters in between.
pub fn is_left_type(word: &Word, i: usize, graph: &CoxeterGraph) -> bool {
    let letters = word.letters();
    let target = letters[i - 1];
    for &u in letters[..i - 1].iter().rev() {
        if u == target {
            return true;
        }
        if !graph.commutes(u, target) {
            return false;
        }
    }
    false
}

/// Computes every statistic of a well-typed expression.
pub fn stats(e: &Expression, graph: &CoxeterGraph) -> Result<MeasureRecord, Error> {
    let words = e.words(graph)?;
    let len = e.terms.len();
    let mut rec = MeasureRecord::default();
    let mut first_bad: Option<(usize, usize)> = None;
    for (k0, t) in e.terms.iter().enumerate() {
        let k = k0 + 1;
        let w = &words[k0];
        match t.kind {
            Kind::M(_) | Kind::J(_) => {
                rec.depth_mj += k;
                let letter = w.letters()[t.pos];
                rec.mj_equal_to_left += w.letters()[..t.pos].iter().filter(|&&u| u == letter).count();
                let bad = is_left_type(w, t.pos + 1, graph);
                if let Kind::M(_) = t.kind {
                    rec.m_far_from_bottom += len - k;
                    if bad {
                        rec.m_bad_count += 1;
                        first_bad.get_or_insert((k, t.pos));
                    }
                } else {
                    rec.j_positions.push(k + w.len() - t.pos - 2);
                    if bad {
                        rec.j_bad_count += 1;
                        rec.max_j_bad = k;
                    }
                }
            }
            Kind::F(..) => {
                rec.f_count += 1;
                rec.f_to_right += t.pos;
            }
            Kind::Alpha(_) | Kind::X(_) => {}
        }
    }
    let (min, pos) = first_bad.unwrap_or((0, 0));
    rec.min_m_bad = min;
    rec.mj_after_min_m_bad = e.terms[min.min(len)..]
        .iter()
        .filter(|t| matches!(t.kind, Kind::M(_) | Kind::J(_)))
        .count();
    rec.fn_of_m_bads = (rec.mj_after_min_m_bad, pos);
    Ok(rec)
}

/// The composite key decreased by every step of the crossing cleanup stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F3Key {
    pub j_positions: Vec<usize>,
    pub f_count: usize,
    pub f_to_right: usize,
    pub depth_mj: usize,
}

impl Ord for F3Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.j_positions
            .iter()
            .cmp(other.j_positions.iter())
            .then(self.f_count.cmp(&other.f_count))
            .then(self.f_to_right.cmp(&other.f_to_right))
            .then(self.depth_mj.cmp(&other.depth_mj))
    }
}

impl PartialOrd for F3Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for F3Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p: Vec<String> = self.j_positions.iter().map(usize::to_string).collect();
        write!(f, "(({}), {}, {}, {})", p.join(","), self.f_count, self.f_to_right, self.depth_mj)
    }
}

pub fn f3_key(e: &Expression, graph: &CoxeterGraph) -> Result<F3Key, Error> {
    let r = stats(e, graph)?;
    Ok(F3Key { j_positions: r.j_positions, f_count: r.f_count, f_to_right: r.f_to_right, depth_mj: r.depth_mj })
}

pub fn f2_key(e: &Expression, graph: &CoxeterGraph) -> Result<(usize, usize), Error> {
    Ok(stats(e, graph)?.fn_of_m_bads)
}

pub fn f5_key(e: &Expression, graph: &CoxeterGraph) -> Result<usize, Error> {
    Ok(stats(e, graph)?.mj_equal_to_left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::Gen;
    use crate::expr::{word_of, Term};

    #[test]
    fn left_type_examples() {
        let commuting = CoxeterGraph::a1xa1();
        let free = CoxeterGraph::infinite_dihedral();
        let w = Word(vec![Gen(1), Gen(0), Gen(1)]);
        assert!(is_left_type(&w, 3, &commuting));
        assert!(!is_left_type(&w, 3, &free));
        assert!(!is_left_type(&Word(vec![Gen(1)]), 1, &commuting));
    }

    #[test]
    fn badness_examples() {
        let g = CoxeterGraph::a1();
        let s = Gen(0);
        let ss = word_of(&g, "s s");
        let mm = Expression::new(ss.clone(), vec![Term::m(s, 0), Term::m(s, 0)]);
        assert_eq!(stats(&mm, &g).unwrap().m_bad_count, 0);
        let bad = Expression::new(ss.clone(), vec![Term::m(s, 1), Term::m(s, 0)]);
        let r = stats(&bad, &g).unwrap();
        assert_eq!((r.m_bad_count, r.min_m_bad), (1, 1));
        assert_eq!(r.fn_of_m_bads, (1, 1));
        let jm = Expression::new(ss, vec![Term::j(s, 0), Term::m(s, 0)]);
        let r = stats(&jm, &g).unwrap();
        assert_eq!(r.j_bad_count, 0);
        assert_eq!(r.j_positions, vec![1]);
        assert_eq!(r.depth_mj, 3);
    }

    #[test]
    fn crossing_moves_decrease_the_key() {
        let g = CoxeterGraph::commuting3();
        let (s, r, t) = (Gen(0), Gen(1), Gen(2));
        let w = word_of(&g, "s r t");
        let before = Expression::new(w.clone(), vec![Term::f(s, r, 0), Term::m(t, 2)]);
        let after = Expression::new(w.clone(), vec![Term::m(t, 2), Term::f(s, r, 0)]);
        let (kb, ka) = (f3_key(&before, &g).unwrap(), f3_key(&after, &g).unwrap());
        assert_eq!(kb.j_positions, ka.j_positions);
        assert_eq!(kb.f_to_right, ka.f_to_right);
        assert!(ka < kb);
        let double = Expression::new(word_of(&g, "s r"), vec![Term::f(s, r, 0), Term::f(r, s, 0)]);
        assert!(f3_key(&Expression::identity(word_of(&g, "s r")), &g).unwrap() < f3_key(&double, &g).unwrap());
    }

    #[test]
    fn no_m_or_j_means_empty_statistics() {
        let g = CoxeterGraph::a1xa1();
        let e = Expression::new(word_of(&g, "s r"), vec![Term::f(Gen(0), Gen(1), 0)]);
        let r = stats(&e, &g).unwrap();
        assert_eq!((r.m_bad_count, r.j_bad_count, r.j_positions.len()), (0, 0, 0));
    }
}
