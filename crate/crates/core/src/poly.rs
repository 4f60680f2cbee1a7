//! Exact multivariate polynomials over the rationals, with the reflection action
//! of a right-angled Coxeter group and the operators `P_s`, `I_s`, `∂_s`.
//!
//! Variables are the coordinates `y_s`, one per generator, indexed in declaration
//! order. A [`Poly`] never stores a zero coefficient, so structural equality is
//! mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coxeter::{CoxeterGraph, Gen};

/// Exact rational number.
pub type Rat = BigRational;

/// Shorthand for an integer-valued [`Rat`].
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Renders a rational as `n` or `n/d`.
pub fn rat_to_text(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A monomial as a sparse exponent vector, sorted by variable index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0.iter().find(|&&(v, _)| v == var).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    /// Splits off the power of `var`: returns `(e, m)` with `self = var^e * m`.
    pub fn split(&self, var: usize) -> (u32, Monomial) {
        let e = self.exponent(var);
        let rest = self.0.iter().copied().filter(|&(v, _)| v != var).collect();
        (e, Monomial(rest))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let a = self.0.get(i);
            let b = other.0.get(j);
            match (a, b) {
                (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
                (Some(&(va, ea)), Some(&(vb, _))) if va < vb => {
                    out.push((va, ea));
                    i += 1;
                }
                (Some(&(va, ea)), None) => {
                    out.push((va, ea));
                    i += 1;
                }
                (_, Some(&(vb, eb))) => {
                    out.push((vb, eb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    fn pow_var(var: usize, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(var, e)])
        }
    }
}

/// Graded lexicographic order: lower degree first; within a degree, larger
/// exponents of earlier variables come first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            let a = self.0.get(i);
            let b = other.0.get(j);
            let (ea, eb) = match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                    i += 1;
                    j += 1;
                    (ea, eb)
                }
                (Some(&(va, ea)), Some(&(vb, _))) if va < vb => {
                    i += 1;
                    (ea, 0)
                }
                (Some(&(_, ea)), None) => {
                    i += 1;
                    (ea, 0)
                }
                (_, Some(&(_, eb))) => {
                    j += 1;
                    (0, eb)
                }
            };
            if ea != eb {
                return eb.cmp(&ea);
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients in the variables `y_0, y_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    /// The coordinate `y_i`.
    pub fn var(i: usize) -> Self {
        Poly::monomial(Monomial::var(i), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes the polynomial `q` for the variable `var`.
    pub fn substitute(&self, var: usize, q: &Poly) -> Poly {
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(var);
            by_power.entry(e).or_default().add_term(rest, c.clone());
        }
        let mut out = Poly::zero();
        let mut power = Poly::one();
        let mut current = 0;
        for (e, coeff) in by_power {
            while current < e {
                power = &power * q;
                current += 1;
            }
            out += &(&coeff * &power);
        }
        out
    }

    /// Exact division by a linear form `y_var - l` where `l` does not involve
    /// `y_var`. Returns `None` when the division leaves a remainder.
    pub fn div_linear(&self, var: usize, l: &Poly) -> Option<Poly> {
        debug_assert!(l.terms.keys().all(|m| m.exponent(var) == 0));
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(var);
            by_power.entry(e).or_default().add_term(rest, c.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&d) => d,
            None => return Some(Poly::zero()),
        };
        // Synthetic division in y_var: B_{d-1} = A_d, B_{k-1} = A_k + l * B_k.
        let mut quotient = Poly::zero();
        let mut carry = Poly::zero();
        for k in (1..=top).rev() {
            let a_k = by_power.remove(&k).unwrap_or_default();
            carry = &a_k + &(l * &carry);
            let shift = Monomial::pow_var(var, k - 1);
            for (m, c) in &carry.terms {
                quotient.add_term(m.mul(&shift), c.clone());
            }
        }
        let a_0 = by_power.remove(&0).unwrap_or_default();
        let remainder = &a_0 + &(l * &carry);
        remainder.is_zero().then_some(quotient)
    }

    /// Evaluates at a point given as one value per variable.
    pub fn specialize(&self, point: &[Rat]) -> Result<Rat, crate::Error> {
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(var, e) in m.factors() {
                let x = point.get(var).ok_or(crate::Error::MissingVariable(var))?;
                for _ in 0..e {
                    v *= x;
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Canonical text, e.g. `1 - 2*y_s*y_r + y_r^2`; variables are named
    /// `y_<name>` from `names`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = m
                .factors()
                .iter()
                .map(|&(v, e)| {
                    let name = names.get(v).map_or_else(|| v.to_string(), Clone::clone);
                    if e == 1 {
                        format!("y_{name}")
                    } else {
                        format!("y_{name}^{e}")
                    }
                })
                .collect();
            if !abs.is_one() || factors.is_empty() {
                factors.insert(0, rat_to_text(&abs));
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

impl From<Rat> for Poly {
    fn from(c: Rat) -> Self {
        Poly::constant(c)
    }
}

impl<'a> Add<&'a Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a Poly> for Poly {
    fn add_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl<'a> SubAssign<&'a Poly> for Poly {
    fn sub_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rat::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// The linear form `s·y_s = -y_s + 2 Σ_{m(s,t)=∞} y_t`.
fn reflected_coordinate(s: Gen, graph: &CoxeterGraph) -> Poly {
    let mut out = -Poly::var(s.index());
    for t in graph.infinite_neighbors(s) {
        out += &Poly::var(t.index()).scale(&rat(2));
    }
    out
}

/// The reflection `s` acting on `p` as a ring automorphism.
pub fn act(s: Gen, p: &Poly, graph: &CoxeterGraph) -> Poly {
    p.substitute(s.index(), &reflected_coordinate(s, graph))
}

/// The root form `x_s = y_s - Σ_{m(s,t)=∞} y_t`.
pub fn x_form(s: Gen, graph: &CoxeterGraph) -> Poly {
    let mut out = Poly::var(s.index());
    for t in graph.infinite_neighbors(s) {
        out -= &Poly::var(t.index());
    }
    out
}

/// `P_s(p) = (p + s·p)/2`, the `s`-invariant part.
pub fn p_op(s: Gen, p: &Poly, graph: &CoxeterGraph) -> Poly {
    (p + &act(s, p, graph)).scale(&Rat::new(1.into(), 2.into()))
}

/// `I_s(p) = (p - s·p)/2`, the `s`-anti-invariant part.
pub fn i_op(s: Gen, p: &Poly, graph: &CoxeterGraph) -> Poly {
    (p - &act(s, p, graph)).scale(&Rat::new(1.into(), 2.into()))
}

/// `∂_s(p) = (p - s·p)/(2 x_s)`.
///
/// Panics if the division is inexact, which can only happen if the
/// representation is set up inconsistently.
pub fn demazure(s: Gen, p: &Poly, graph: &CoxeterGraph) -> Poly {
    let anti = i_op(s, p, graph);
    let rest = &Poly::var(s.index()) - &x_form(s, graph);
    anti.div_linear(s.index(), &rest)
        .expect("anti-invariant part must be divisible by the root form")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_text_is_graded_lex() {
        let s = Poly::var(0);
        let r = Poly::var(1);
        let p = &(&Poly::one() - &(&s * &r).scale(&rat(2))) + &(&r * &r);
        assert_eq!(p.to_text(&names(&["s", "r"])), "1 - 2*y_s*y_r + y_r^2");
        assert_eq!(Poly::zero().to_text(&[]), "0");
        let half = Poly::var(0).scale(&Rat::new((-1).into(), 2.into()));
        assert_eq!(half.to_text(&names(&["s"])), "-1/2*y_s");
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let s = Poly::var(0);
        assert!((&s - &s).is_zero());
        assert_eq!((&s - &s).len(), 0);
    }

    #[test]
    fn substitution_and_division_are_inverse() {
        let s = Poly::var(0);
        let r = Poly::var(1);
        let l = r.clone();
        let divisor = &s - &l;
        let q = &(&s * &s) + &(&r.scale(&rat(3)) * &s);
        let prod = &q * &divisor;
        assert_eq!(prod.div_linear(0, &l), Some(q));
        assert_eq!(Poly::one().div_linear(0, &l), None);
    }

    #[test]
    fn specialize_evaluates() {
        let p = &Poly::var(0) - &Poly::var(1);
        assert_eq!(p.specialize(&[rat(2), rat(5)]).unwrap(), rat(-3));
        assert_eq!((&Poly::var(0) * &Poly::var(0)).specialize(&[rat(3)]).unwrap(), rat(9));
        assert_eq!(Poly::zero().specialize(&[]).unwrap(), rat(0));
        assert!(Poly::var(1).specialize(&[rat(1)]).is_err());
    }
}
