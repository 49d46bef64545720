//! Exact and sampled verification of closed-form solutions.

mod mutate;
mod numeric;

use std::collections::BTreeMap;
use std::fmt;

pub use mutate::{coefficient_mutations, mutation_report, mutations, MutationOutcome};
pub use numeric::{default_samplers, verify_parametric_numeric};

use crate::expr::{Atom, Expr, MultiIndex, Relations};
use crate::jet::PDESystem;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Explicit,
    ParametricSymbolic,
    ParametricNumeric,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Explicit => "explicit",
            Mode::ParametricSymbolic => "parametric-symbolic",
            Mode::ParametricNumeric => "parametric-numeric",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A candidate solution.  Bindings target independent variables (as
/// `Var` atoms), dependents (jets with the zero index) or, in explicit
/// mode, individual jets.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCandidate {
    pub name: String,
    pub system: String,
    pub mode: Mode,
    pub params: Vec<String>,
    pub bindings: Vec<(Atom, Expr)>,
    pub relations: Relations,
}

impl SolutionCandidate {
    pub fn explicit(name: &str, sys: &PDESystem) -> Self {
        SolutionCandidate {
            name: name.into(),
            system: sys.name.clone(),
            mode: Mode::Explicit,
            params: Vec::new(),
            bindings: Vec::new(),
            relations: Relations::new(),
        }
    }

    pub fn parametric(name: &str, sys: &PDESystem, params: &[&str], numeric: bool) -> Self {
        SolutionCandidate {
            mode: if numeric {
                Mode::ParametricNumeric
            } else {
                Mode::ParametricSymbolic
            },
            params: params.iter().map(|p| p.to_string()).collect(),
            ..Self::explicit(name, sys)
        }
    }

    pub fn bind(&mut self, target: Atom, value: Expr) -> &mut Self {
        self.bindings.push((target, value));
        self
    }

    fn binding(&self, a: &Atom) -> Option<&Expr> {
        self.bindings.iter().find(|(t, _)| t == a).map(|(_, e)| e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Extra draws allowed when a sample hits a singular Jacobian or a
    /// domain error.
    pub resample_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 25,
            tol: 1e-9,
            seed: 42,
            resample_budget: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub solution: String,
    pub mode: Mode,
    pub passed: bool,
    /// Normalized residue per equation (symbolic modes).
    pub residues: Vec<(String, Expr)>,
    /// Largest residual over samples (numeric mode).
    pub max_residual: Option<f64>,
    /// Largest term magnitude seen alongside the residuals.
    pub max_scale: Option<f64>,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn symbolic(sol: &SolutionCandidate, residues: Vec<(String, Expr)>) -> Self {
        VerifyReport {
            solution: sol.name.clone(),
            mode: sol.mode,
            passed: residues.iter().all(|(_, r)| r.is_zero()),
            residues,
            max_residual: None,
            max_scale: None,
            samples: 0,
            notes: Vec::new(),
        }
    }
}

fn all_relations(sys: &PDESystem, sol: &SolutionCandidate) -> Relations {
    let mut r = sys.relations.clone();
    r.rules.extend(sol.relations.rules.iter().cloned());
    r
}

/// Dispatches on the candidate's mode.
pub fn verify(
    sys: &PDESystem,
    sol: &SolutionCandidate,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    match sol.mode {
        Mode::Explicit => verify_explicit(sys, sol),
        Mode::ParametricSymbolic => verify_parametric_symbolic(sys, sol),
        Mode::ParametricNumeric => verify_parametric_numeric(sys, sol, opts),
    }
}

fn unbound(a: &Atom, sol: &SolutionCandidate) -> Error {
    Error::Resolution(format!("{} is not bound by solution {}", a, sol.name))
}

/// Substitutes the candidate's jets into every equation.
pub fn verify_explicit(sys: &PDESystem, sol: &SolutionCandidate) -> Result<VerifyReport> {
    let rel = all_relations(sys, sol);
    let mut memo: BTreeMap<Atom, Expr> = BTreeMap::new();
    let mut residues = Vec::new();
    for eq in &sys.equations {
        let f = eq.expression();
        let r = f.replace_atoms(&mut |a: &Atom| {
            let Some((dep, idx)) = a.jet_parts() else {
                return Ok(None);
            };
            if let Some(e) = sol.binding(a) {
                return Ok(Some(e.clone()));
            }
            let base = sys.jet_atom(dep, MultiIndex::zero(sys.n()));
            let Some(u) = sol.binding(&base) else {
                return Err(unbound(a, sol));
            };
            explicit_jet(sys, &rel, u, dep, idx, &mut memo).map(Some)
        })?;
        residues.push((eq.name.clone(), rel.apply(&r)?));
    }
    Ok(VerifyReport::symbolic(sol, residues))
}

fn explicit_jet(
    sys: &PDESystem,
    rel: &Relations,
    u: &Expr,
    dep: usize,
    idx: &MultiIndex,
    memo: &mut BTreeMap<Atom, Expr>,
) -> Result<Expr> {
    let key = sys.jet_atom(dep, idx.clone());
    if let Some(e) = memo.get(&key) {
        return Ok(e.clone());
    }
    let e = match idx.0.iter().rposition(|k| *k > 0) {
        None => u.clone(),
        Some(i) => {
            let mut lower = idx.clone();
            lower.0[i] -= 1;
            let g = explicit_jet(sys, rel, u, dep, &lower, memo)?;
            rel.apply(&g.diff(&Atom::var(&sys.independents()[i])))?
        }
    };
    memo.insert(key, e.clone());
    Ok(e)
}

/// Inverse of a square matrix of expressions by Gauss–Jordan elimination.
fn invert(mut m: Vec<Vec<Expr>>) -> Result<Vec<Vec<Expr>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !m[r][c].is_zero())
            .ok_or_else(|| Error::SingularJacobian(format!("column {} has no pivot", c + 1)))?;
        m.swap(c, p);
        inv.swap(c, p);
        let piv = m[c][c].clone();
        for j in 0..n {
            m[c][j] = m[c][j].try_div(&piv)?;
            inv[c][j] = inv[c][j].try_div(&piv)?;
        }
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for j in 0..n {
                m[r][j] = &m[r][j] - &(&f * &m[c][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[c][j]);
            }
        }
    }
    Ok(inv)
}

/// Jets of a parametrized solution expressed in the parameters.
pub struct ParametricJets<'a> {
    sys: &'a PDESystem,
    rel: Relations,
    params: Vec<Atom>,
    /// Images of the independent variables.
    pub coords: Vec<Expr>,
    /// `∂x_i/∂p_j` with rows indexed by parameters.
    pub jacobian: Vec<Vec<Expr>>,
    inverse: Vec<Vec<Expr>>,
    deps: Vec<Expr>,
    memo: BTreeMap<Atom, Expr>,
}

impl<'a> ParametricJets<'a> {
    pub fn new(sys: &'a PDESystem, sol: &SolutionCandidate) -> Result<Self> {
        let n = sys.n();
        if sol.params.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: sol.params.len(),
            });
        }
        let rel = all_relations(sys, sol);
        let params: Vec<Atom> = sol.params.iter().map(Atom::var).collect();
        let coords = sys
            .independents()
            .iter()
            .map(|x| {
                sol.binding(&Atom::var(x))
                    .cloned()
                    .ok_or_else(|| unbound(&Atom::var(x), sol))
            })
            .collect::<Result<Vec<_>>>()?;
        let deps = (0..sys.m())
            .map(|a| {
                let t = sys.jet_atom(a, MultiIndex::zero(n));
                sol.binding(&t).cloned().ok_or_else(|| unbound(&t, sol))
            })
            .collect::<Result<Vec<_>>>()?;
        let jacobian = params
            .iter()
            .map(|p| {
                coords
                    .iter()
                    .map(|x| rel.apply(&x.diff(p)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let inverse = invert(jacobian.clone())?;
        Ok(ParametricJets {
            sys,
            rel,
            params,
            coords,
            jacobian,
            inverse,
            deps,
            memo: BTreeMap::new(),
        })
    }

    pub fn params(&self) -> &[Atom] {
        &self.params
    }

    /// `∂G/∂x_i` through the inverse Jacobian.
    pub fn d_dx(&self, g: &Expr, i: usize) -> Result<Expr> {
        let mut acc = Expr::zero();
        for (j, p) in self.params.iter().enumerate() {
            let c = &self.inverse[i][j];
            if !c.is_zero() {
                acc = &acc + &(c * &g.diff(p));
            }
        }
        self.rel.apply(&acc)
    }

    pub fn jet(&mut self, dep: usize, idx: &MultiIndex) -> Result<Expr> {
        let key = self.sys.jet_atom(dep, idx.clone());
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.clone());
        }
        let e = match idx.0.iter().rposition(|k| *k > 0) {
            None => self.rel.apply(&self.deps[dep])?,
            Some(i) => {
                let mut lower = idx.clone();
                lower.0[i] -= 1;
                let g = self.jet(dep, &lower)?;
                self.d_dx(&g, i)?
            }
        };
        self.memo.insert(key, e.clone());
        Ok(e)
    }

    /// Equation with its independents and jets expressed in the parameters.
    pub fn pull_back(&mut self, f: &Expr) -> Result<Expr> {
        let mut map = BTreeMap::new();
        for (i, x) in self.sys.independents().iter().enumerate() {
            map.insert(Atom::var(x), self.coords[i].clone());
        }
        for a in f.jet_atoms() {
            let (dep, idx) = a.jet_parts().expect("jet atom");
            let v = self.jet(dep, &idx.clone())?;
            map.insert(a, v);
        }
        let e = f.substitute(&map)?;
        self.rel.apply(&e)
    }
}

/// Solves the chain rule symbolically and substitutes the resulting jets.
pub fn verify_parametric_symbolic(
    sys: &PDESystem,
    sol: &SolutionCandidate,
) -> Result<VerifyReport> {
    let mut pj = ParametricJets::new(sys, sol)?;
    let mut residues = Vec::new();
    for eq in &sys.equations {
        residues.push((eq.name.clone(), pj.pull_back(&eq.expression())?));
    }
    Ok(VerifyReport::symbolic(sol, residues))
}
