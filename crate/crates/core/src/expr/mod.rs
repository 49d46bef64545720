//! Canonical rational expressions over atoms.
//!
//! An [`Expr`] is a reduced fraction of two atom polynomials with the
//! denominator normalized to leading coefficient one.  Structural equality is
//! mathematical equality for expressions without elementary functions.

mod apoly;
mod atom;
mod eval;
mod relations;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

pub use apoly::{AMono, APoly};
pub use atom::{Atom, AtomKind, Elementary, MultiIndex};
pub use eval::{FuncSampler, NumericEnv};
pub use relations::{Relation, Relations};

use crate::algebra::poly::{self, fmt_rational};
use crate::{Error, Rational, Result};
use apoly::AtomIndex;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr {
    num: APoly,
    den: APoly,
}

/// Atom substitution callback.  `Ok(None)` keeps the atom.
pub type AtomMap<'a> = dyn FnMut(&Atom) -> Result<Option<Expr>> + 'a;

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: APoly::zero(),
            den: APoly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(Rational::from_integer(n.into()))
    }

    pub fn rational(c: Rational) -> Self {
        Expr {
            num: APoly::constant(c),
            den: APoly::one(),
        }
    }

    pub fn frac(p: i64, q: i64) -> Self {
        Expr::rational(Rational::new(p.into(), q.into()))
    }

    pub fn atom(a: Atom) -> Self {
        Expr::lift_poly(APoly::atom(a))
    }

    pub fn var(name: &str) -> Self {
        Expr::atom(Atom::var(name))
    }

    pub fn param(name: &str) -> Self {
        Expr::atom(Atom::param(name))
    }

    pub fn func(name: &str, deriv: Vec<u32>, args: Vec<Expr>) -> Self {
        Expr::atom(Atom::func(name, deriv, args))
    }

    /// Elementary function node with the basic simplifications
    /// `exp(log A) = A`, `log(exp A) = A`, `exp 0 = 1`, `log 1 = 0`,
    /// `sin 0 = 0`, `cos 0 = 1`.
    pub fn elem(fun: Elementary, arg: Expr) -> Expr {
        if let Some(inner) = arg.as_atom() {
            if let AtomKind::Elem { fun: g, arg: a } = inner.kind() {
                match (fun, g) {
                    (Elementary::Exp, Elementary::Log) | (Elementary::Log, Elementary::Exp) => {
                        return a.clone()
                    }
                    _ => {}
                }
            }
        }
        match (fun, arg.as_rational()) {
            (Elementary::Exp, Some(c)) if c.is_zero() => Expr::one(),
            (Elementary::Log, Some(c)) if c.is_one() => Expr::zero(),
            (Elementary::Sin, Some(c)) if c.is_zero() => Expr::zero(),
            (Elementary::Cos, Some(c)) if c.is_zero() => Expr::one(),
            _ => Expr::atom(Atom::new(AtomKind::Elem { fun, arg })),
        }
    }

    pub fn exp(&self) -> Expr {
        Expr::elem(Elementary::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        Expr::elem(Elementary::Log, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::elem(Elementary::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::elem(Elementary::Cos, self.clone())
    }

    fn lift_poly(p: APoly) -> Expr {
        Expr {
            num: reduce_trig(&p),
            den: APoly::one(),
        }
    }

    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: APoly, den: APoly) -> Result<Expr> {
        if den.is_zero() {
            return Err(Error::DegenerateExpression("division by zero".into()));
        }
        let mut num = reduce_trig(&num);
        let mut den = reduce_trig(&den);
        if den.is_zero() {
            return Err(Error::DegenerateExpression("division by zero".into()));
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(Expr {
                num: num.scale(&c.recip()),
                den: APoly::one(),
            });
        }
        let g = den.monomial_content().gcd(&num.monomial_content());
        if !g.is_one() {
            num = num.div_mono(&g);
            den = den.div_mono(&g);
        }
        if !den.is_monomial() && !num.is_monomial() {
            let idx = AtomIndex::from_polys(&[&num, &den]);
            let pn = idx.to_poly(&num);
            let pd = idx.to_poly(&den);
            let g = poly::gcd(&pn, &pd);
            if !g.is_constant() {
                let qn = pn.div_exact(&g).expect("gcd divides numerator");
                let qd = pd.div_exact(&g).expect("gcd divides denominator");
                num = idx.lift_poly(&qn);
                den = idx.lift_poly(&qd);
            }
        }
        if let Some(c) = den.constant_value() {
            return Ok(Expr {
                num: num.scale(&c.recip()),
                den: APoly::one(),
            });
        }
        let lc = den.leading_coeff().recip();
        Ok(Expr {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn numer_poly(&self) -> &APoly {
        &self.num
    }

    pub fn denom_poly(&self) -> &APoly {
        &self.den
    }

    pub fn numer(&self) -> Expr {
        Expr {
            num: self.num.clone(),
            den: APoly::one(),
        }
    }

    pub fn denom(&self) -> Expr {
        Expr {
            num: self.den.clone(),
            den: APoly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// The atom itself when the expression is exactly one atom.
    pub fn as_atom(&self) -> Option<Atom> {
        if !self.den.is_one() || self.num.num_terms() != 1 {
            return None;
        }
        let (m, c) = self.num.leading()?;
        if !c.is_one() || m.factors().len() != 1 || m.factors()[0].1 != 1 {
            return None;
        }
        Some(m.factors()[0].0.clone())
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::DegenerateExpression("division by zero".into()));
        }
        if let Some(c) = other.as_rational() {
            return Ok(self.scale(&c.recip()));
        }
        Expr::from_parts(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<Expr> {
        Expr::one().try_div(self)
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i32) -> Result<Expr> {
        if e >= 0 {
            let e = e as u32;
            Ok(Expr {
                num: reduce_trig(&self.num.pow(e)),
                den: self.den.pow(e),
            }
            .renormalized())
        } else {
            self.recip()?.pow(-e)
        }
    }

    fn renormalized(self) -> Expr {
        if self.den.is_one() {
            self
        } else {
            Expr::from_parts(self.num, self.den).expect("nonzero denominator")
        }
    }

    /// Atoms appearing at top level in numerator or denominator.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        s.extend(self.den.atoms());
        s
    }

    /// All atoms, including those nested inside composite atoms.
    pub fn deep_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<Atom> = self.atoms().into_iter().collect();
        while let Some(a) = stack.pop() {
            match a.kind() {
                AtomKind::Func { args, .. } => {
                    for e in args {
                        stack.extend(e.atoms());
                    }
                }
                AtomKind::Elem { arg, .. } => stack.extend(arg.atoms()),
                _ => {}
            }
            out.insert(a);
        }
        out
    }

    /// Jet atoms, including nested ones.
    pub fn jet_atoms(&self) -> BTreeSet<Atom> {
        self.deep_atoms()
            .into_iter()
            .filter(|a| a.is_jet())
            .collect()
    }

    /// Highest jet order among the atoms, or `None` without jet atoms.
    pub fn jet_order(&self) -> Option<u32> {
        self.jet_atoms()
            .iter()
            .filter_map(|a| a.jet_parts())
            .map(|(_, i)| i.order())
            .max()
    }

    pub fn depends_on(&self, a: &Atom) -> bool {
        self.deep_atoms().contains(a)
    }

    /// Derivation extended by the chain rule.  `leaf` supplies the derivative
    /// of an atom; `None` means leaves differentiate to zero and composite
    /// atoms are differentiated through their arguments.
    pub fn derive(&self, leaf: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
        let mut cache = BTreeMap::new();
        self.derive_cached(leaf, &mut cache)
    }

    fn derive_cached(
        &self,
        leaf: &dyn Fn(&Atom) -> Option<Expr>,
        cache: &mut BTreeMap<Atom, Expr>,
    ) -> Expr {
        let dn = poly_derive(&self.num, leaf, cache);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_derive(&self.den, leaf, cache);
        if dd.is_zero() {
            return dn.try_div(&self.denom()).expect("nonzero denominator");
        }
        let top = &(&dn * &self.denom()) - &(&self.numer() * &dd);
        let bottom = Expr {
            num: self.den.mul(&self.den),
            den: APoly::one(),
        };
        top.try_div(&bottom).expect("nonzero denominator")
    }

    /// Partial derivative with respect to `target`, every other leaf atom
    /// held fixed.
    pub fn diff(&self, target: &Atom) -> Expr {
        self.derive(&|a: &Atom| {
            if a == target {
                Some(Expr::one())
            } else if a.is_leaf() {
                Some(Expr::zero())
            } else {
                None
            }
        })
    }

    /// Replaces atoms, recursing into composite atoms that the callback keeps.
    pub fn replace_atoms(&self, f: &mut AtomMap<'_>) -> Result<Expr> {
        let mut memo: BTreeMap<Atom, Option<Expr>> = BTreeMap::new();
        let n = eval_poly(&self.num, f, &mut memo)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = eval_poly(&self.den, f, &mut memo)?;
        n.try_div(&d)
    }

    pub fn substitute(&self, map: &BTreeMap<Atom, Expr>) -> Result<Expr> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        self.replace_atoms(&mut |a: &Atom| Ok(map.get(a).cloned()))
    }

    pub fn substitute_one(&self, a: &Atom, value: &Expr) -> Result<Expr> {
        let mut m = BTreeMap::new();
        m.insert(a.clone(), value.clone());
        self.substitute(&m)
    }

    /// Number of terms in numerator plus denominator.
    pub fn size(&self) -> usize {
        self.num.num_terms()
            + if self.den.is_one() {
                0
            } else {
                self.den.num_terms()
            }
    }
}

fn reduce_trig(p: &APoly) -> APoly {
    let has_sin_power = p.terms().any(|(m, _)| {
        m.factors().iter().any(|(a, e)| {
            *e >= 2
                && matches!(
                    a.kind(),
                    AtomKind::Elem {
                        fun: Elementary::Sin,
                        ..
                    }
                )
        })
    });
    if !has_sin_power {
        return p.clone();
    }
    let mut out = APoly::zero();
    for (m, c) in p.terms() {
        let mut rest = AMono::one();
        let mut factor = APoly::constant(c.clone());
        for (a, e) in m.factors() {
            match a.kind() {
                AtomKind::Elem {
                    fun: Elementary::Sin,
                    arg,
                } if *e >= 2 => {
                    let cos = Expr::elem(Elementary::Cos, arg.clone());
                    let cos_poly = cos.num.clone();
                    let one_minus = APoly::one().sub(&cos_poly.mul(&cos_poly));
                    factor = factor.mul(&one_minus.pow(e / 2));
                    if e % 2 == 1 {
                        rest = rest.mul(&AMono::atom(a.clone(), 1));
                    }
                }
                _ => rest = rest.mul(&AMono::atom(a.clone(), *e)),
            }
        }
        out = out.add(&factor.mul_mono(&rest));
    }
    out
}

fn atom_derivative(
    a: &Atom,
    leaf: &dyn Fn(&Atom) -> Option<Expr>,
    cache: &mut BTreeMap<Atom, Expr>,
) -> Expr {
    if let Some(d) = cache.get(a) {
        return d.clone();
    }
    let d = match leaf(a) {
        Some(d) => d,
        None => match a.kind() {
            AtomKind::Var(_) | AtomKind::Param(_) | AtomKind::Jet { .. } => Expr::zero(),
            AtomKind::Func { name, deriv, args } => {
                let mut acc = Expr::zero();
                for (k, arg) in args.iter().enumerate() {
                    let da = arg.derive_cached(leaf, cache);
                    if da.is_zero() {
                        continue;
                    }
                    let mut nd = deriv.clone();
                    nd[k] += 1;
                    acc = &acc + &(&Expr::func(name, nd, args.clone()) * &da);
                }
                acc
            }
            AtomKind::Elem { fun, arg } => {
                let da = arg.derive_cached(leaf, cache);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match fun {
                        Elementary::Exp => Expr::atom(a.clone()),
                        Elementary::Log => arg.recip().expect("log of a nonzero expression"),
                        Elementary::Sin => arg.cos(),
                        Elementary::Cos => -arg.sin(),
                    };
                    &outer * &da
                }
            }
        },
    };
    cache.insert(a.clone(), d.clone());
    d
}

fn poly_derive(
    p: &APoly,
    leaf: &dyn Fn(&Atom) -> Option<Expr>,
    cache: &mut BTreeMap<Atom, Expr>,
) -> Expr {
    let mut poly_part = APoly::zero();
    let mut frac_part = Expr::zero();
    for a in p.atoms() {
        let da = atom_derivative(&a, leaf, cache);
        if da.is_zero() {
            continue;
        }
        let dp = p.partial(&a);
        if da.den.is_one() {
            poly_part = poly_part.add(&dp.mul(&da.num));
        } else {
            frac_part = &frac_part + &(&Expr::lift_poly(dp) * &da);
        }
    }
    &Expr::lift_poly(poly_part) + &frac_part
}

fn replace_one(
    a: &Atom,
    f: &mut AtomMap<'_>,
    memo: &mut BTreeMap<Atom, Option<Expr>>,
) -> Result<Option<Expr>> {
    if let Some(r) = memo.get(a) {
        return Ok(r.clone());
    }
    let r = match f(a)? {
        Some(e) => Some(e),
        None => match a.kind() {
            AtomKind::Func { name, deriv, args } => {
                let mut changed = false;
                let mut new_args = Vec::with_capacity(args.len());
                for e in args {
                    let ne = e.replace_atoms(f)?;
                    changed |= ne != *e;
                    new_args.push(ne);
                }
                changed.then(|| Expr::func(name, deriv.clone(), new_args))
            }
            AtomKind::Elem { fun, arg } => {
                let na = arg.replace_atoms(f)?;
                (na != *arg).then(|| Expr::elem(*fun, na))
            }
            _ => None,
        },
    };
    memo.insert(a.clone(), r.clone());
    Ok(r)
}

fn eval_poly(
    p: &APoly,
    f: &mut AtomMap<'_>,
    memo: &mut BTreeMap<Atom, Option<Expr>>,
) -> Result<Expr> {
    let mut any = false;
    let mut repl: BTreeMap<Atom, Expr> = BTreeMap::new();
    for a in p.atoms() {
        if let Some(e) = replace_one(&a, f, memo)? {
            any = true;
            repl.insert(a, e);
        }
    }
    if !any {
        return Ok(Expr::lift_poly(p.clone()));
    }
    let mut kept = APoly::zero();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut plain = AMono::one();
        let mut factor = Expr::rational(c.clone());
        let mut touched = false;
        for (a, e) in m.factors() {
            match repl.get(a) {
                Some(r) => {
                    touched = true;
                    factor = &factor * &r.pow(*e as i32)?;
                }
                None => plain = plain.mul(&AMono::atom(a.clone(), *e)),
            }
        }
        if touched {
            acc = &acc + &(&factor * &Expr::lift_poly(APoly::one().mul_mono(&plain)));
        } else {
            kept.add_term(plain, c.clone());
        }
    }
    Ok(&acc + &Expr::lift_poly(kept))
}

fn add_exprs(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den.is_one() && b.den.is_one() {
        return Expr {
            num: a.num.add(&b.num),
            den: APoly::one(),
        };
    }
    if a.den == b.den {
        return Expr::from_parts(a.num.add(&b.num), a.den.clone()).expect("nonzero denominator");
    }
    if b.den.is_one() {
        return Expr {
            num: a.num.add(&b.num.mul(&a.den)),
            den: a.den.clone(),
        };
    }
    if a.den.is_one() {
        return Expr {
            num: b.num.add(&a.num.mul(&b.den)),
            den: b.den.clone(),
        };
    }
    Expr::from_parts(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den))
        .expect("nonzero denominator")
}

fn mul_exprs(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return Expr::lift_poly(a.num.mul(&b.num));
    }
    Expr::from_parts(a.num.mul(&b.num), a.den.mul(&b.den)).expect("nonzero denominator")
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        add_exprs(self, rhs)
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        add_exprs(self, &-rhs)
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        mul_exprs(self, rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

fn fmt_poly(p: &APoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let mut body = String::new();
        if m.is_one() {
            body.push_str(&fmt_rational(&a));
        } else {
            if !a.is_one() {
                body.push_str(&fmt_rational(&a));
                body.push('*');
            }
            let fs: Vec<String> = m
                .factors()
                .iter()
                .map(|(at, e)| {
                    if *e == 1 {
                        at.to_string()
                    } else {
                        format!("{}^{}", at, e)
                    }
                })
                .collect();
            body.push_str(&fs.join("*"));
        }
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            f.write_str(&fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}
