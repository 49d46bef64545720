//! Normal forms modulo a prolonged orthonomic system.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::PDESystem;
use crate::expr::{Atom, Expr, MultiIndex};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;
const MAX_DEPTH: usize = 128;

/// Residue of one critical pair of leading derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossResidue {
    pub pair: (String, String),
    /// Least common derivative of the two leadings.
    pub at: Atom,
    pub residue: Expr,
    /// Highest jet order touched while reducing.
    pub order_used: u32,
}

/// Memoizing reducer bound to one system.
pub struct Reducer<'a> {
    sys: &'a PDESystem,
    leads: Vec<(usize, usize, MultiIndex)>,
    memo: BTreeMap<Atom, Expr>,
    prolonged: BTreeMap<(usize, MultiIndex), Expr>,
    active: BTreeSet<Atom>,
    budget: usize,
    steps: usize,
    max_order: u32,
}

impl<'a> Reducer<'a> {
    pub fn new(sys: &'a PDESystem) -> Self {
        Reducer {
            sys,
            leads: sys.leadings(),
            memo: BTreeMap::new(),
            prolonged: BTreeMap::new(),
            active: BTreeSet::new(),
            budget: DEFAULT_BUDGET,
            steps: 0,
            max_order: 0,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Highest jet order seen since the last [`Reducer::reset_audit`].
    pub fn order_used(&self) -> u32 {
        self.max_order
    }

    pub fn reset_audit(&mut self) {
        self.max_order = 0;
    }

    fn note_order(&mut self, e: &Expr) {
        if let Some(k) = e.jet_order() {
            self.max_order = self.max_order.max(k);
        }
    }

    /// Highest-ranked leading dividing `u^dep_idx`, ties to declaration order.
    fn select(&self, dep: usize, idx: &MultiIndex) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (p, (_, d, s)) in self.leads.iter().enumerate() {
            if *d != dep || !s.divides(idx) {
                continue;
            }
            best = match best {
                None => Some(p),
                Some(b) => {
                    let sb = &self.leads[b].2;
                    if self.sys.ranking.cmp((dep, s), (dep, sb)) == Ordering::Greater {
                        Some(p)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    /// `D_μ(rhs)` for the equation at leading position `p`.
    fn prolonged_rhs(&mut self, p: usize, mu: &MultiIndex) -> Expr {
        if let Some(e) = self.prolonged.get(&(p, mu.clone())) {
            return e.clone();
        }
        let e = match mu.0.iter().rposition(|k| *k > 0) {
            None => self.sys.equations[self.leads[p].0].rhs.clone(),
            Some(i) => {
                let mut lower = mu.clone();
                lower.0[i] -= 1;
                let base = self.prolonged_rhs(p, &lower);
                self.sys.total_derivative(&base, i)
            }
        };
        self.prolonged.insert((p, mu.clone()), e.clone());
        e
    }

    fn normal_atom(&mut self, a: &Atom) -> Result<Option<Expr>> {
        let Some((dep, idx)) = a.jet_parts() else {
            return Ok(None);
        };
        let Some(p) = self.select(dep, idx) else {
            return Ok(None);
        };
        if let Some(e) = self.memo.get(a) {
            return Ok(Some(e.clone()));
        }
        if self.active.contains(a) {
            return Err(Error::ReductionBudgetExceeded {
                steps: self.steps,
                detail: format!("reduction of {} cycles back to itself", a),
            });
        }
        self.steps += 1;
        if self.active.len() >= MAX_DEPTH {
            return Err(Error::ReductionBudgetExceeded {
                steps: self.steps,
                detail: format!("nested substitutions deeper than {} at {}", MAX_DEPTH, a),
            });
        }
        if self.steps > self.budget {
            return Err(Error::ReductionBudgetExceeded {
                steps: self.steps,
                detail: format!("budget of {} substitutions exhausted at {}", self.budget, a),
            });
        }
        self.max_order = self.max_order.max(idx.order());
        let mu = idx
            .checked_sub(&self.leads[p].2)
            .expect("selected leading divides");
        let raw = self.prolonged_rhs(p, &mu);
        self.note_order(&raw);
        self.active.insert(a.clone());
        let red = self.reduce_inner(&raw);
        self.active.remove(a);
        let red = red?;
        self.memo.insert(a.clone(), red.clone());
        Ok(Some(red))
    }

    fn reduce_inner(&mut self, e: &Expr) -> Result<Expr> {
        e.replace_atoms(&mut |a: &Atom| self.normal_atom(a))
    }

    /// Replaces every derivative of a leading until none remain.
    pub fn reduce(&mut self, e: &Expr) -> Result<Expr> {
        self.note_order(e);
        self.reduce_inner(e)
    }

    /// Reduced differences of the two ways to reach each least common
    /// derivative of leadings, for pairs within `order_bound`.
    pub fn cross_residues(&mut self, order_bound: u32) -> Result<Vec<CrossResidue>> {
        self.sys.validate_orthonomic()?;
        let leads = self.leads.clone();
        let mut out = Vec::new();
        for i in 0..leads.len() {
            for j in i + 1..leads.len() {
                let (ki, di, si) = &leads[i];
                let (kj, dj, sj) = &leads[j];
                if di != dj {
                    continue;
                }
                let l = si.lcm(sj);
                if l.order() > order_bound {
                    continue;
                }
                let chain = leads.iter().enumerate().any(|(k, (_, dk, sk))| {
                    k != i
                        && k != j
                        && dk == di
                        && sk.divides(&l)
                        && si.lcm(sk) != l
                        && sk.lcm(sj) != l
                });
                if chain {
                    continue;
                }
                let mu = l.checked_sub(si).expect("lcm");
                let nu = l.checked_sub(sj).expect("lcm");
                let a = self.prolonged_rhs(i, &mu);
                let b = self.prolonged_rhs(j, &nu);
                self.reset_audit();
                let residue = self.reduce(&(&a - &b))?;
                out.push(CrossResidue {
                    pair: (
                        self.sys.equations[*ki].name.clone(),
                        self.sys.equations[*kj].name.clone(),
                    ),
                    at: self.sys.jet_atom(*di, l),
                    residue,
                    order_used: self.max_order,
                });
            }
        }
        Ok(out)
    }
}
