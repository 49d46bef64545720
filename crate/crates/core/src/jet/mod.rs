//! Jet coordinates, total derivatives and orthonomic systems.

mod reduce;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

pub use reduce::{CrossResidue, Reducer, DEFAULT_BUDGET};

use crate::expr::{Atom, AtomKind, Expr, MultiIndex, Relations};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankingScheme {
    /// Total order first, then dependent index, then priority-lex.
    Graded,
    /// Priority-lex on the multi-index, then dependent index.
    Lex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub scheme: RankingScheme,
    /// Independent-variable indices, highest priority first.
    pub priority: Vec<usize>,
}

impl Ranking {
    pub fn graded(n: usize) -> Self {
        Ranking {
            scheme: RankingScheme::Graded,
            priority: (0..n).collect(),
        }
    }

    fn lex_cmp(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        for &i in &self.priority {
            match a.0[i].cmp(&b.0[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Compares `u^a_σ` with `u^b_τ`.  Earlier-declared dependents rank higher.
    pub fn cmp(&self, a: (usize, &MultiIndex), b: (usize, &MultiIndex)) -> Ordering {
        let dep = b.0.cmp(&a.0);
        match self.scheme {
            RankingScheme::Graded => {
                a.1.order()
                    .cmp(&b.1.order())
                    .then(dep)
                    .then_with(|| self.lex_cmp(a.1, b.1))
            }
            RankingScheme::Lex => self.lex_cmp(a.1, b.1).then(dep),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub name: String,
    /// Declared leading derivative; `None` for implicit equations.
    pub leading: Option<Atom>,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    /// The operator `F = lhs − rhs`.
    pub fn expression(&self) -> Expr {
        &self.lhs - &self.rhs
    }

    pub fn order(&self) -> u32 {
        self.expression().jet_order().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpaqueDecl {
    pub name: String,
    pub arity: usize,
}

/// Generating function of a symmetry, one component per dependent variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Symmetry {
    pub name: String,
    pub components: Vec<Expr>,
}

impl Symmetry {
    pub fn order(&self) -> u32 {
        self.components
            .iter()
            .filter_map(|c| c.jet_order())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PDESystem {
    pub name: String,
    vars: Arc<[String]>,
    pub dependents: Vec<String>,
    pub params: Vec<String>,
    pub opaque: Vec<OpaqueDecl>,
    pub relations: Relations,
    pub equations: Vec<Equation>,
    pub ranking: Ranking,
    pub symmetries: Vec<Symmetry>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrthonomicReport {
    pub valid: bool,
    pub violations: Vec<String>,
    /// Ranking inversions accepted because of declared leadings.
    pub warnings: Vec<String>,
}

impl PDESystem {
    pub fn new(name: &str, independents: &[&str], dependents: &[&str]) -> Self {
        let vars: Arc<[String]> = independents.iter().map(|s| s.to_string()).collect();
        PDESystem {
            name: name.into(),
            ranking: Ranking::graded(vars.len()),
            vars,
            dependents: dependents.iter().map(|s| s.to_string()).collect(),
            params: Vec::new(),
            opaque: Vec::new(),
            relations: Relations::new(),
            equations: Vec::new(),
            symmetries: Vec::new(),
        }
    }

    pub fn independents(&self) -> &[String] {
        &self.vars
    }

    pub fn vars_arc(&self) -> Arc<[String]> {
        self.vars.clone()
    }

    /// Number of independent variables.
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Number of dependent variables.
    pub fn m(&self) -> usize {
        self.dependents.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.dependents.iter().position(|v| v == name)
    }

    pub fn var(&self, i: usize) -> Expr {
        Expr::var(&self.vars[i])
    }

    pub fn jet_atom(&self, dep: usize, index: MultiIndex) -> Atom {
        Atom::jet(dep, self.dependents[dep].clone(), index, self.vars.clone())
    }

    pub fn jet(&self, dep: usize, index: &[u32]) -> Expr {
        Expr::atom(self.jet_atom(dep, MultiIndex(index.to_vec())))
    }

    /// `u^dep` differentiated once along each listed variable.
    pub fn jet_by_names(&self, dep: usize, names: &[&str]) -> Expr {
        let mut idx = MultiIndex::zero(self.n());
        for v in names {
            let i = self.var_index(v).expect("declared independent variable");
            idx = idx.raised(i);
        }
        Expr::atom(self.jet_atom(dep, idx))
    }

    /// Appends an orthonomic equation `leading = rhs`.
    pub fn push_solved(&mut self, name: &str, leading: Atom, rhs: Expr) {
        self.equations.push(Equation {
            name: name.into(),
            lhs: Expr::atom(leading.clone()),
            leading: Some(leading),
            rhs,
        });
    }

    /// Appends `lhs = rhs`; a bare jet atom on the left becomes the leading.
    pub fn push_equation(&mut self, name: &str, lhs: Expr, rhs: Expr) {
        let leading = lhs.as_atom().filter(|a| a.is_jet());
        self.equations.push(Equation {
            name: name.into(),
            leading,
            lhs,
            rhs,
        });
    }

    pub fn max_order(&self) -> u32 {
        self.equations.iter().map(|e| e.order()).max().unwrap_or(0)
    }

    pub fn default_order_bound(&self) -> u32 {
        self.max_order() + 2
    }

    pub fn total_derivative(&self, e: &Expr, i: usize) -> Expr {
        let xi = &self.vars[i];
        let vars = &self.vars;
        e.derive(&|a: &Atom| match a.kind() {
            AtomKind::Var(name) => Some(if name == xi {
                Expr::one()
            } else {
                Expr::zero()
            }),
            AtomKind::Param(_) => Some(Expr::zero()),
            AtomKind::Jet {
                vars: jv, index, ..
            } if Arc::ptr_eq(jv, vars) || **jv == **vars => {
                Some(Expr::atom(a.with_index(index.raised(i))))
            }
            AtomKind::Jet { .. } => Some(Expr::zero()),
            _ => None,
        })
    }

    pub fn total_derivative_multi(&self, e: &Expr, sigma: &MultiIndex) -> Expr {
        let mut cur = e.clone();
        for (i, k) in sigma.0.iter().enumerate() {
            for _ in 0..*k {
                cur = self.total_derivative(&cur, i);
            }
        }
        cur
    }

    /// Leading derivatives as `(equation index, dependent, multi-index)`.
    pub fn leadings(&self) -> Vec<(usize, usize, MultiIndex)> {
        self.equations
            .iter()
            .enumerate()
            .filter_map(|(k, eq)| {
                let (d, i) = eq.leading.as_ref()?.jet_parts()?;
                Some((k, d, i.clone()))
            })
            .collect()
    }

    pub fn orthonomic_report(&self) -> OrthonomicReport {
        let mut rep = OrthonomicReport::default();
        let leads = self.leadings();
        for eq in &self.equations {
            if eq.leading.is_none() {
                rep.violations
                    .push(format!("equation {} has no leading derivative", eq.name));
            }
        }
        let mut seen = BTreeSet::new();
        for (k, d, s) in &leads {
            if !seen.insert((*d, s.clone())) {
                rep.violations.push(format!(
                    "leading {} of equation {} is repeated",
                    self.jet_atom(*d, s.clone()),
                    self.equations[*k].name
                ));
            }
        }
        for (k, d, s) in &leads {
            let eq = &self.equations[*k];
            for a in eq.rhs.jet_atoms() {
                let (ad, ai) = a.jet_parts().expect("jet atom");
                for (k2, d2, s2) in &leads {
                    if ad == *d2 && s2.divides(ai) {
                        rep.violations.push(format!(
                            "right-hand side of {} contains {}, a derivative of the leading of {}",
                            eq.name, a, self.equations[*k2].name
                        ));
                    }
                }
                if self.ranking.cmp((ad, ai), (*d, s)) != Ordering::Less {
                    rep.warnings.push(format!(
                        "{} in {} is not ranked below its leading {}",
                        a,
                        eq.name,
                        self.jet_atom(*d, s.clone())
                    ));
                }
            }
        }
        rep.valid = rep.violations.is_empty();
        rep
    }

    pub fn validate_orthonomic(&self) -> Result<OrthonomicReport> {
        let rep = self.orthonomic_report();
        if rep.valid {
            Ok(rep)
        } else {
            Err(Error::NotOrthonomic(rep.violations))
        }
    }

    /// Equations `D_σ(leading) = D_σ(rhs)` for `|σ| ≤ depth`.
    pub fn prolong(&self, depth: u32) -> Result<Vec<Equation>> {
        self.validate_orthonomic()?;
        let mut out = Vec::new();
        for eq in &self.equations {
            let lead = eq.leading.as_ref().expect("validated");
            let (_, s) = lead.jet_parts().expect("jet leading");
            for mu in MultiIndex::all_up_to(self.n(), depth) {
                let name = if mu.is_zero() {
                    eq.name.clone()
                } else {
                    format!("{}[{}]", eq.name, mu.spelled(&self.vars).join(","))
                };
                let leading = lead.with_index(s.add(&mu));
                out.push(Equation {
                    name,
                    lhs: Expr::atom(leading.clone()),
                    leading: Some(leading),
                    rhs: self.total_derivative_multi(&eq.rhs, &mu),
                });
            }
        }
        Ok(out)
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer::new(self)
    }

    pub fn reduce(&self, e: &Expr) -> Result<Expr> {
        self.reducer().reduce(e)
    }

    pub fn cross_residues(&self, order_bound: u32) -> Result<Vec<CrossResidue>> {
        self.reducer().cross_residues(order_bound)
    }

    /// Jet coordinates `u^a_σ` with `|σ| ≤ k`, for every dependent.
    pub fn jets_up_to(&self, k: u32) -> Vec<Atom> {
        let mut out = Vec::new();
        for d in 0..self.m() {
            for s in MultiIndex::all_up_to(self.n(), k) {
                out.push(self.jet_atom(d, s));
            }
        }
        out
    }
}
