//! Floating-point evaluation of expressions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{APoly, Atom, AtomKind, Elementary, Expr};
use crate::{Error, Rational, Result};

/// Numeric stand-in for an opaque function: `(derivative counters, args)`.
pub type FuncSampler = Arc<dyn Fn(&[u32], &[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Default)]
pub struct NumericEnv {
    pub values: BTreeMap<Atom, f64>,
    pub funcs: BTreeMap<String, FuncSampler>,
}

impl NumericEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: Atom, v: f64) {
        self.values.insert(a, v);
    }
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn eval_atom(a: &Atom, env: &NumericEnv, memo: &mut BTreeMap<Atom, f64>) -> Result<f64> {
    if let Some(v) = memo.get(a) {
        return Ok(*v);
    }
    if let Some(v) = env.values.get(a) {
        return Ok(*v);
    }
    let v = match a.kind() {
        AtomKind::Func { name, deriv, args } => {
            let f = env.funcs.get(name).ok_or_else(|| {
                Error::Resolution(format!("no numeric value for function {}", name))
            })?;
            let xs: Vec<f64> = args
                .iter()
                .map(|e| e.eval_memo(env, memo))
                .collect::<Result<_>>()?;
            f(deriv, &xs)
        }
        AtomKind::Elem { fun, arg } => {
            let x = arg.eval_memo(env, memo)?;
            match fun {
                Elementary::Exp => x.exp(),
                Elementary::Log => {
                    if x <= 0.0 {
                        return Err(Error::NumericDomain(format!("log of {} at {}", arg, x)));
                    }
                    x.ln()
                }
                Elementary::Sin => x.sin(),
                Elementary::Cos => x.cos(),
            }
        }
        _ => return Err(Error::Resolution(format!("no numeric value for {}", a))),
    };
    memo.insert(a.clone(), v);
    Ok(v)
}

fn eval_apoly(p: &APoly, env: &NumericEnv, memo: &mut BTreeMap<Atom, f64>) -> Result<f64> {
    let mut s = 0.0;
    for (m, c) in p.terms() {
        let mut t = rational_to_f64(c);
        for (a, e) in m.factors() {
            t *= eval_atom(a, env, memo)?.powi(*e as i32);
        }
        s += t;
    }
    Ok(s)
}

impl Expr {
    pub fn eval(&self, env: &NumericEnv) -> Result<f64> {
        let mut memo = BTreeMap::new();
        self.eval_memo(env, &mut memo)
    }

    fn eval_memo(&self, env: &NumericEnv, memo: &mut BTreeMap<Atom, f64>) -> Result<f64> {
        let n = eval_apoly(&self.num, env, memo)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = eval_apoly(&self.den, env, memo)?;
        if d.abs() < 1e-300 {
            return Err(Error::NumericDomain(format!(
                "denominator {} vanishes",
                self.denom()
            )));
        }
        Ok(n / d)
    }

    /// Largest absolute value among the numerator terms, for relative
    /// tolerances.
    pub fn eval_term_scale(&self, env: &NumericEnv) -> Result<f64> {
        let mut memo = BTreeMap::new();
        let mut best: f64 = 0.0;
        for (m, c) in self.num.terms() {
            let mut t = rational_to_f64(c);
            for (a, e) in m.factors() {
                t *= eval_atom(a, env, &mut memo)?.powi(*e as i32);
            }
            best = best.max(t.abs());
        }
        Ok(best)
    }
}
