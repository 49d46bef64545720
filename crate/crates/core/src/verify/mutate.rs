use num_traits::{One, Zero};

use super::{verify, SolutionCandidate, VerifyOptions};
use crate::expr::{APoly, AtomKind, Expr};
use crate::jet::PDESystem;
use crate::{Rational, Result};

fn bump(c: &Rational) -> Rational {
    let b = c + Rational::one();
    if b.is_zero() {
        c * Rational::from_integer(2.into())
    } else {
        b
    }
}

fn poly_variants(p: &APoly) -> Vec<APoly> {
    p.terms()
        .map(|(m, c)| {
            let mut q = APoly::zero();
            for (m2, c2) in p.terms() {
                q.add_term(m2.clone(), if m2 == m { bump(c) } else { c2.clone() });
            }
            q
        })
        .collect()
}

/// Every expression obtained by changing one rational coefficient, at the
/// top level or inside a function argument.
pub fn coefficient_mutations(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    for num in poly_variants(e.numer_poly()) {
        out.extend(Expr::from_parts(num, e.denom_poly().clone()));
    }
    if !e.denom_poly().is_one() {
        for den in poly_variants(e.denom_poly()) {
            out.extend(Expr::from_parts(e.numer_poly().clone(), den));
        }
    }
    for a in e.atoms() {
        let rebuilt: Vec<Expr> = match a.kind() {
            AtomKind::Elem { fun, arg } => coefficient_mutations(arg)
                .into_iter()
                .map(|m| Expr::elem(*fun, m))
                .collect(),
            AtomKind::Func { name, deriv, args } => (0..args.len())
                .flat_map(|k| {
                    coefficient_mutations(&args[k]).into_iter().map(move |m| {
                        let mut args = args.clone();
                        args[k] = m;
                        Expr::func(name, deriv.clone(), args)
                    })
                })
                .collect(),
            _ => Vec::new(),
        };
        for r in rebuilt {
            out.extend(e.substitute_one(&a, &r));
        }
    }
    out.retain(|m| m != e);
    out.sort();
    out.dedup();
    out
}

/// Single-coefficient mutants of a candidate, labelled by binding.
pub fn mutations(sol: &SolutionCandidate) -> Vec<(String, SolutionCandidate)> {
    let mut out = Vec::new();
    for (k, (target, value)) in sol.bindings.iter().enumerate() {
        for (j, m) in coefficient_mutations(value).into_iter().enumerate() {
            let mut s = sol.clone();
            s.bindings[k].1 = m.clone();
            out.push((format!("{}#{}: {}", target, j + 1, m), s));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MutationOutcome {
    pub label: String,
    /// True when the mutant fails verification or cannot be verified.
    pub rejected: bool,
}

/// Verifies every mutant; a sound verifier rejects all of them.
pub fn mutation_report(
    sys: &PDESystem,
    sol: &SolutionCandidate,
    opts: &VerifyOptions,
) -> Result<Vec<MutationOutcome>> {
    Ok(mutations(sol)
        .into_iter()
        .map(|(label, m)| {
            let rejected = !matches!(verify(sys, &m, opts), Ok(r) if r.passed);
            MutationOutcome { label, rejected }
        })
        .collect())
}
