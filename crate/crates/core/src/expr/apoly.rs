//! Polynomials over atoms with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::atom::Atom;
use crate::algebra::poly::Poly;
use crate::Rational;

/// Power product of atoms, sorted by atom with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AMono(pub(crate) Vec<(Atom, u32)>);

impl AMono {
    pub fn one() -> Self {
        AMono(Vec::new())
    }

    pub fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            AMono::one()
        } else {
            AMono(vec![(a, e)])
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &AMono) -> AMono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        AMono(out)
    }

    pub fn divides(&self, other: &AMono) -> bool {
        self.0.iter().all(|(a, e)| other.exponent(a) >= *e)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &AMono) -> AMono {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, e) in &self.0 {
            let r = e - other.exponent(a);
            if r > 0 {
                out.push((a.clone(), r));
            }
        }
        AMono(out)
    }

    pub fn gcd(&self, other: &AMono) -> AMono {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        AMono(out)
    }

    /// Removes one power of `a`, returning the old exponent.
    fn lowered(&self, a: &Atom) -> Option<(u32, AMono)> {
        let i = self.0.binary_search_by(|(b, _)| b.cmp(a)).ok()?;
        let e = self.0[i].1;
        let mut v = self.0.clone();
        if e == 1 {
            v.remove(i);
        } else {
            v[i].1 -= 1;
        }
        Some((e, AMono(v)))
    }
}

impl Ord for AMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for AMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct APoly {
    pub(crate) terms: BTreeMap<AMono, Rational>,
}

impl APoly {
    pub fn zero() -> Self {
        APoly::default()
    }

    pub fn one() -> Self {
        APoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = APoly::zero();
        p.add_term(AMono::one(), c);
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = APoly::zero();
        p.add_term(AMono::atom(a, 1), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&AMono::one()).is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&AMono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&AMono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&AMono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: AMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &APoly) -> APoly {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> APoly {
        APoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &APoly) -> APoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &APoly) -> APoly {
        let mut out = APoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> APoly {
        if c.is_zero() {
            return APoly::zero();
        }
        APoly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &AMono) -> APoly {
        APoly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> APoly {
        let mut result = APoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                s.insert(a.clone());
            }
        }
        s
    }

    /// Partial derivative with respect to an atom treated as independent.
    pub fn partial(&self, a: &Atom) -> APoly {
        let mut out = APoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lowered(a) {
                out.add_term(rest, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// gcd of all monomials (the monomial content).
    pub fn monomial_content(&self) -> AMono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return AMono::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_mono(&self, m: &AMono) -> APoly {
        APoly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.div(m), c.clone()))
                .collect(),
        }
    }

    /// Makes the leading coefficient one, returning the factor divided out.
    pub fn leading_coeff(&self) -> Rational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_negative_leading(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

/// Index map between atoms and `Poly` variables.
pub(crate) struct AtomIndex {
    pub atoms: Vec<Atom>,
    pos: BTreeMap<Atom, usize>,
}

impl AtomIndex {
    pub fn from_polys(ps: &[&APoly]) -> Self {
        let mut set = BTreeSet::new();
        for p in ps {
            set.extend(p.atoms());
        }
        let atoms: Vec<Atom> = set.into_iter().collect();
        let pos = atoms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        AtomIndex { atoms, pos }
    }

    pub fn to_poly(&self, p: &APoly) -> Poly {
        let n = self.atoms.len();
        Poly::from_terms(
            n,
            p.terms.iter().map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (a, k) in &m.0 {
                    e[self.pos[a]] = *k;
                }
                (e, c.clone())
            }),
        )
    }

    pub fn lift_poly(&self, p: &Poly) -> APoly {
        let mut out = APoly::zero();
        for (m, c) in p.terms() {
            let mono: Vec<(Atom, u32)> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| (self.atoms[i].clone(), *e))
                    .collect();
            out.add_term(AMono(mono), c.clone());
        }
        out
    }
}
