//! Right-angled Coxeter systems and the representation coefficients `λ`, `μ`.
//!
//! Every pair of distinct generators either commutes (`m = 2`) or is free
//! (`m = ∞`). The graph file format is line based:
//!
//! ```text
//! # comment
//! gens: s r t
//! inf: r t
//! inf: s t
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::poly::{self, rat, Poly, Rat};
use crate::Error;

/// A generator, identified by its declaration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen(pub usize);

impl Gen {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The Coxeter exponent of a pair of generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// `m(s,s) = 1`.
    One,
    /// Distinct and commuting.
    Two,
    /// Distinct and free.
    Infinite,
}

/// A right-angled Coxeter system: generator names plus the set of free pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterGraph {
    names: Vec<String>,
    infinite: Vec<Vec<bool>>,
}

impl CoxeterGraph {
    /// Builds a graph from generator names and the unordered free pairs.
    pub fn new<S: AsRef<str>>(names: &[S], infinite_pairs: &[(S, S)]) -> Result<Self, Error> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::Graph(format!("invalid generator name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::Graph(format!("duplicate generator `{n}`")));
            }
        }
        let k = names.len();
        let mut infinite = vec![vec![false; k]; k];
        for (a, b) in infinite_pairs {
            let lookup = |x: &str| {
                names
                    .iter()
                    .position(|n| n == x)
                    .ok_or_else(|| Error::Graph(format!("unknown generator `{x}`")))
            };
            let (i, j) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if i == j {
                return Err(Error::Graph(format!("self-pair `{}`", names[i])));
            }
            infinite[i][j] = true;
            infinite[j][i] = true;
        }
        Ok(CoxeterGraph { names, infinite })
    }

    /// Parses the line-based graph format.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut gens: Option<Vec<String>> = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Graph(format!("line {}: {msg}", lineno + 1));
            let (key, rest) = line.split_once(':').ok_or_else(|| bad("expected `key: ...`"))?;
            let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            match key.trim() {
                "gens" => {
                    if gens.is_some() {
                        return Err(bad("`gens` given twice"));
                    }
                    gens = Some(items);
                }
                "inf" => {
                    if items.len() != 2 {
                        return Err(bad("`inf` takes exactly two generators"));
                    }
                    pairs.push((items[0].clone(), items[1].clone()));
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let gens = gens.ok_or_else(|| Error::Graph("missing `gens` line".into()))?;
        CoxeterGraph::new(&gens, &pairs)
    }

    /// Prints in the format accepted by [`CoxeterGraph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("gens: {}\n", self.names.join(" "));
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                if self.infinite[i][j] {
                    out.push_str(&format!("inf: {} {}\n", self.names[i], self.names[j]));
                }
            }
        }
        out
    }

    /// `A₁`: one generator `s`.
    pub fn a1() -> Self {
        CoxeterGraph::new(&["s"], &[]).unwrap()
    }

    /// `A₁×A₁`: commuting `s`, `r`.
    pub fn a1xa1() -> Self {
        CoxeterGraph::new(&["s", "r"], &[]).unwrap()
    }

    /// The infinite dihedral group on `s`, `r`.
    pub fn infinite_dihedral() -> Self {
        CoxeterGraph::new(&["s", "r"], &[("s", "r")]).unwrap()
    }

    /// Three generators with `m(s,r) = 2` and `m(r,t) = m(s,t) = ∞`.
    pub fn mixed() -> Self {
        CoxeterGraph::new(&["s", "r", "t"], &[("r", "t"), ("s", "t")]).unwrap()
    }

    /// Three pairwise commuting generators `s`, `r`, `t`.
    pub fn commuting3() -> Self {
        CoxeterGraph::new(&["s", "r", "t"], &[]).unwrap()
    }

    /// The four standard test systems, with short labels.
    pub fn test_systems() -> Vec<(&'static str, CoxeterGraph)> {
        vec![
            ("A1", CoxeterGraph::a1()),
            ("A1xA1", CoxeterGraph::a1xa1()),
            ("Iinf", CoxeterGraph::infinite_dihedral()),
            ("mixed", CoxeterGraph::mixed()),
        ]
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.names[g.0]
    }

    pub fn gen(&self, name: &str) -> Option<Gen> {
        self.names.iter().position(|n| n == name).map(Gen)
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> {
        (0..self.rank()).map(Gen)
    }

    pub fn order(&self, s: Gen, r: Gen) -> Order {
        if s == r {
            Order::One
        } else if self.infinite[s.0][r.0] {
            Order::Infinite
        } else {
            Order::Two
        }
    }

    /// True when `s` and `r` are distinct and commute, i.e. a crossing exists.
    pub fn commutes(&self, s: Gen, r: Gen) -> bool {
        self.order(s, r) == Order::Two
    }

    pub fn infinite_neighbors(&self, s: Gen) -> impl Iterator<Item = Gen> + '_ {
        (0..self.rank()).filter(move |&t| self.infinite[s.0][t]).map(Gen)
    }

    /// `B(α_t, α_s)`: 1 on the diagonal, 0 for commuting pairs, -1 for free pairs.
    pub fn bilinear(&self, t: Gen, s: Gen) -> i64 {
        match self.order(t, s) {
            Order::One => 1,
            Order::Two => 0,
            Order::Infinite => -1,
        }
    }
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(n, "word" | "gens" | "inf")
}

impl fmt::Display for CoxeterGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The scalars with `P_t(x_s) = Σ_r λ_{t,s}^r x_r` and `I_t(x_s) = μ_{t,s} x_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCoefficients {
    mu: Vec<Vec<Rat>>,
    lambda: Vec<Vec<BTreeMap<Gen, Rat>>>,
}

impl RepCoefficients {
    /// Computes the coefficients and checks both defining identities exactly.
    pub fn new(graph: &CoxeterGraph) -> Result<Self, Error> {
        let k = graph.rank();
        let mut mu = vec![vec![Rat::zero(); k]; k];
        let mut lambda = vec![vec![BTreeMap::new(); k]; k];
        for t in graph.gens() {
            for s in graph.gens() {
                // t·x_s = x_s - 2 B(α_t, α_s) x_t, so I_t(x_s) = B(α_t, α_s) x_t.
                let m = rat(graph.bilinear(t, s));
                let mut l: BTreeMap<Gen, Rat> = BTreeMap::new();
                *l.entry(s).or_insert_with(Rat::zero) += Rat::one();
                *l.entry(t).or_insert_with(Rat::zero) -= m.clone();
                l.retain(|_, c| !c.is_zero());

                let xs = poly::x_form(s, graph);
                let expected_p = l.iter().fold(Poly::zero(), |acc, (r, c)| {
                    &acc + &poly::x_form(*r, graph).scale(c)
                });
                let expected_i = poly::x_form(t, graph).scale(&m);
                if poly::p_op(t, &xs, graph) != expected_p || poly::i_op(t, &xs, graph) != expected_i {
                    return Err(Error::Graph(format!(
                        "representation identity fails for ({}, {})",
                        graph.name(t),
                        graph.name(s)
                    )));
                }
                mu[t.0][s.0] = m;
                lambda[t.0][s.0] = l;
            }
        }
        Ok(RepCoefficients { mu, lambda })
    }

    /// `μ_{t,s}`, which also equals the scalar `∂_t(x_s)`.
    pub fn mu(&self, t: Gen, s: Gen) -> &Rat {
        &self.mu[t.0][s.0]
    }

    /// `λ_{t,s}`, as a map `r ↦ λ_{t,s}^r` without zero entries.
    pub fn lambda(&self, t: Gen, s: Gen) -> &BTreeMap<Gen, Rat> {
        &self.lambda[t.0][s.0]
    }
}
