//! Derivative relations between opaque functions of one argument, such as
//! `w'(s) = z''(s)^2`.

use super::{Atom, AtomKind, Expr};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub func: String,
    /// Derivative order on the left-hand side.
    pub order: u32,
    /// Right-hand side in terms of `dummy`.
    pub rhs: Expr,
    pub dummy: Atom,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Relations {
    pub rules: Vec<Relation>,
}

const MAX_PASSES: usize = 32;

impl Relations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn push(&mut self, r: Relation) {
        self.rules.push(r);
    }

    fn rewrite(&self, a: &Atom) -> Option<Expr> {
        let AtomKind::Func { name, deriv, args } = a.kind() else {
            return None;
        };
        if args.len() != 1 {
            return None;
        }
        let rule = self
            .rules
            .iter()
            .find(|r| &r.func == name && deriv[0] >= r.order)?;
        let mut e = rule.rhs.clone();
        for _ in rule.order..deriv[0] {
            e = e.diff(&rule.dummy);
        }
        e.substitute_one(&rule.dummy, &args[0]).ok()
    }

    /// Rewrites every covered derivative atom until none remain.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        if self.rules.is_empty() {
            return Ok(e.clone());
        }
        let mut cur = e.clone();
        for _ in 0..MAX_PASSES {
            let next = cur.replace_atoms(&mut |a: &Atom| Ok(self.rewrite(a)))?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewrites_higher_derivatives() {
        let s = Atom::var("s");
        let z2 = Expr::func("z", vec![2], vec![Expr::atom(s.clone())]);
        let rel = Relation {
            func: "w".into(),
            order: 1,
            rhs: z2.pow(2).unwrap(),
            dummy: s,
        };
        let rs = Relations { rules: vec![rel] };
        let t = Expr::var("t");
        let w2 = Expr::func("w", vec![2], vec![t.clone()]);
        let got = rs.apply(&w2).unwrap();
        let expect = &(&Expr::int(2) * &Expr::func("z", vec![2], vec![t.clone()]))
            * &Expr::func("z", vec![3], vec![t]);
        assert_eq!(got, expect);
    }
}
