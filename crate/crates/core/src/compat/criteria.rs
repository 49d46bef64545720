use std::collections::BTreeMap;

use num_traits::Zero;

use super::{
    joint_operators, symmetry_statuses, Criterion, Options, Outcome, ResidueCert, Verdict,
};
use crate::algebra::groebner::{codim, determinant, syzygy_module, ModuleElement};
use crate::algebra::linear::in_span;
use crate::algebra::poly::{is_squarefree, Poly};
use crate::brackets::{jacobi_bracket, mayer_bracket, reduced_multi_bracket, CDiffRow};
use crate::chargeo::{
    char_report_matrix, symbol_at_seed, CharReport, SymbolicMatrix, DEFAULT_RETRIES,
};
use crate::expr::{AMono, Atom, AtomKind, Expr, MultiIndex};
use crate::jet::{PDESystem, Symmetry};
use crate::{Error, Rational, Result};

fn equation_ops(sys: &PDESystem) -> Vec<Expr> {
    sys.equations.iter().map(|e| e.expression()).collect()
}

fn fmt_ideal(r: &CharReport, names: &[String]) -> Vec<String> {
    r.ideal.iter().map(|p| p.fmt_with(names)).collect()
}

fn cotangent_names(sys: &PDESystem) -> Vec<String> {
    sys.independents()
        .iter()
        .map(|v| format!("p_{}", v))
        .collect()
}

/// Report at the primary seed plus codimensions at the remaining seeds.
fn stable_report(
    ops: &[Expr],
    sys: &PDESystem,
    opts: &Options,
    v: &mut Verdict,
) -> Option<CharReport> {
    let seeds = opts.seeds();
    let mut primary = None;
    let mut codims = Vec::new();
    for s in &seeds {
        match symbol_at_seed(ops, sys, *s, DEFAULT_RETRIES) {
            Ok((mx, _)) => {
                let r = char_report_matrix(mx);
                codims.push(r.codim);
                if primary.is_none() {
                    primary = Some(r);
                }
            }
            Err(e) => {
                v.note(format!("symbol evaluation failed at seed {}: {}", s, e));
                return None;
            }
        }
    }
    let rep = primary?;
    v.certificates.codim = Some(rep.codim);
    v.certificates.seed_codims = codims.clone();
    v.certificates.ideal = fmt_ideal(&rep, &cotangent_names(sys));
    if codims.iter().any(|c| *c != rep.codim) {
        v.note(format!(
            "codimension differs across seeds {:?}: non-generic point",
            codims
        ));
        return None;
    }
    Some(rep)
}

fn is_obstruction(residue: &Expr, at_order: u32) -> bool {
    !residue.is_zero() && residue.jet_order().is_none_or(|o| o < at_order)
}

/// A nonzero residue that involves opaque functions or parameters is a
/// condition on them rather than a certificate.
fn is_conditional(residue: &Expr, sys: &PDESystem) -> bool {
    !residue.is_zero()
        && residue.deep_atoms().iter().any(|a| match a.kind() {
            AtomKind::Param(_) => true,
            AtomKind::Func { name, .. } => sys.opaque.iter().any(|o| &o.name == name),
            _ => false,
        })
}

const CONDITIONAL_NOTE: &str = "nonzero residues are conditions on opaque functions or parameters";

/// Cross residues of the declared system.  Only lower-order residues count
/// as obstructions; vanishing residues at bounded order certify nothing.
pub fn cross_residue_verdict(sys: &PDESystem, opts: &Options) -> Verdict {
    let v = Verdict::new(Criterion::CrossResidues, opts.seed);
    let rep = sys.orthonomic_report();
    if !rep.valid {
        return v.not_applicable(format!("not orthonomic: {}", rep.violations.join("; ")));
    }
    let mut v = v;
    v.applicable = true;
    let bound = opts.bound_for(sys);
    let rs = match sys.cross_residues(bound) {
        Ok(rs) => rs,
        Err(e) => {
            v.note(format!("reduction failed: {}", e));
            return v;
        }
    };
    let (mut obstruction, mut conditional) = (false, false);
    let mut audit = 0;
    for r in &rs {
        let q = r.at.jet_parts().map(|(_, i)| i.order()).unwrap_or(0);
        if is_conditional(&r.residue, sys) {
            conditional = true;
        } else {
            obstruction |= is_obstruction(&r.residue, q);
        }
        audit = audit.max(r.order_used);
        v.certificates.residues.push(ResidueCert {
            pair: format!("{},{}", r.pair.0, r.pair.1),
            expr: r.residue.clone(),
            order_used: Some(r.order_used),
            order_bound: Some(bound),
        });
    }
    v.certificates.order_audit = Some(audit);
    if obstruction {
        v.result = Outcome::Incompatible;
    } else if conditional {
        v.note(CONDITIONAL_NOTE);
    } else {
        v.note(format!("no lower-order obstruction up to order {}", bound));
    }
    v
}

/// Mayer brackets of a scalar complete intersection.
pub fn check_mayer_ci(sys: &PDESystem, opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::MayerCI, opts.seed);
    let (r, n) = (sys.equations.len(), sys.n());
    if sys.m() != 1 {
        return v.not_applicable(format!("needs one dependent variable, found {}", sys.m()));
    }
    if r > n {
        return v.not_applicable(format!("r = {} exceeds n = {}", r, n));
    }
    let ops = equation_ops(sys);
    let Some(rep) = stable_report(&ops, sys, opts, &mut v) else {
        return v.not_applicable("characteristic codimension not established");
    };
    if !rep.complete_intersection {
        return v.not_applicable(format!(
            "not a complete intersection: codim {} but r = {}",
            rep.codim, r
        ));
    }
    v.applicable = true;
    if !sys.orthonomic_report().valid {
        v.note("brackets cannot be reduced: system is not orthonomic");
        return v;
    }
    let orders: Vec<u32> = sys.equations.iter().map(|e| e.order()).collect();
    let mut all_zero = true;
    let mut within = true;
    let (mut nonzero, mut conditional) = (false, false);
    let mut audit = 0;
    for i in 0..r {
        for j in i + 1..r {
            let bound = (orders[i] + orders[j]).saturating_sub(1);
            match mayer_bracket(&ops[i], &ops[j], sys) {
                Ok((res, used)) => {
                    audit = audit.max(used);
                    within &= used <= bound;
                    all_zero &= res.is_zero();
                    if is_conditional(&res, sys) {
                        conditional = true;
                    } else {
                        nonzero |= !res.is_zero();
                    }
                    v.certificates.residues.push(ResidueCert {
                        pair: format!("{},{}", sys.equations[i].name, sys.equations[j].name),
                        expr: res,
                        order_used: Some(used),
                        order_bound: Some(bound),
                    });
                }
                Err(e) => {
                    all_zero = false;
                    v.note(format!(
                        "bracket of {} and {}: {}",
                        sys.equations[i].name, sys.equations[j].name, e
                    ));
                }
            }
        }
    }
    v.certificates.order_audit = Some(audit);
    if nonzero {
        v.result = Outcome::Incompatible;
    } else if all_zero && within {
        v.result = Outcome::Compatible;
    } else if conditional {
        v.note(CONDITIONAL_NOTE);
    } else if !within {
        v.note("order audit exceeded the bracket bound");
    }
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Reduced multi-brackets of a generalized complete intersection.
pub fn check_multibracket_gci(sys: &PDESystem, opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::MultiBracketGCI, opts.seed);
    let ops = equation_ops(sys);
    let Some(rep) = stable_report(&ops, sys, opts, &mut v) else {
        return v.not_applicable("characteristic codimension not established");
    };
    if !rep.gci_rank_condition {
        return v.not_applicable(format!(
            "needs m < r <= n+m-1 (r = {}, m = {}, n = {})",
            rep.r, rep.m, rep.n
        ));
    }
    if !rep.gci_codim_condition {
        return v.not_applicable(format!(
            "codim {} differs from r-m+1 = {}",
            rep.codim,
            rep.r + 1 - rep.m
        ));
    }
    if !rep.gci_corank_one {
        return v.not_applicable(format!(
            "corank-one test failed: (m-1)-minor codim {} does not exceed {}",
            rep.lower_codim, rep.codim
        ));
    }
    v.applicable = true;
    if !sys.orthonomic_report().valid {
        v.note("brackets cannot be reduced: system is not orthonomic");
        return v;
    }
    let orders: Vec<u32> = sys.equations.iter().map(|e| e.order()).collect();
    let (mut all_zero, mut within, mut nonzero) = (true, true, false);
    let mut conditional = false;
    let mut audit = 0;
    for idx in subsets(ops.len(), sys.m() + 1) {
        let args: Vec<Expr> = idx.iter().map(|&i| ops[i].clone()).collect();
        let bound = idx
            .iter()
            .map(|&i| orders[i])
            .sum::<u32>()
            .saturating_sub(1);
        let names: Vec<&str> = idx
            .iter()
            .map(|&i| sys.equations[i].name.as_str())
            .collect();
        match reduced_multi_bracket(&args, sys) {
            Ok((res, used)) => {
                audit = audit.max(used);
                within &= used <= bound;
                all_zero &= res.is_zero();
                if is_conditional(&res, sys) {
                    conditional = true;
                } else {
                    nonzero |= !res.is_zero();
                }
                v.certificates.residues.push(ResidueCert {
                    pair: names.join(","),
                    expr: res,
                    order_used: Some(used),
                    order_bound: Some(bound),
                });
            }
            Err(e) => {
                all_zero = false;
                v.note(format!("multi-bracket of {}: {}", names.join(","), e));
            }
        }
    }
    v.certificates.order_audit = Some(audit);
    if nonzero {
        v.result = Outcome::Incompatible;
    } else if all_zero && within {
        v.result = Outcome::Compatible;
    } else if conditional {
        v.note(CONDITIONAL_NOTE);
    } else if !within {
        v.note("order audit exceeded the bracket bound");
    }
    v
}

/// `A ∘ G` for scalar operators: every `u_σ` in `A` becomes `D_σ(G)`.
pub fn compose(a: &Expr, g: &Expr, sys: &PDESystem) -> Result<Expr> {
    a.replace_atoms(&mut |at: &Atom| {
        Ok(match at.jet_parts() {
            Some((0, s)) => Some(sys.total_derivative_multi(g, s)),
            _ => None,
        })
    })
}

/// Systems `F_i ∘ G_j = 0` given by their factors, equations ordered by
/// `(i, j)`.
pub fn check_reducible_product(
    sys: &PDESystem,
    fs: &[Expr],
    gs: &[Expr],
    opts: &Options,
) -> Verdict {
    let mut v = Verdict::new(Criterion::ReducibleProduct, opts.seed);
    if sys.m() != 1 {
        return v.not_applicable(format!("needs one dependent variable, found {}", sys.m()));
    }
    let (r, s) = (fs.len(), gs.len());
    if sys.equations.len() != r * s {
        let e = Error::FactorizationMismatch(format!(
            "{} equations for {} x {} factors",
            sys.equations.len(),
            r,
            s
        ));
        return v.not_applicable(e.to_string());
    }
    let mut ops = equation_ops(sys);
    ops.extend(fs.iter().cloned());
    ops.extend(gs.iter().cloned());
    let (mx, _) = match symbol_at_seed(&ops, sys, opts.seed, DEFAULT_RETRIES) {
        Ok(x) => x,
        Err(e) => return v.not_applicable(format!("symbol evaluation failed: {}", e)),
    };
    // with one dependent the weighted symbol keeps each row at its own order
    let n = sys.n();
    let rows: Vec<Poly> = mx.rows.into_iter().map(|mut r| r.remove(0)).collect();
    let nf = r * s;
    for i in 0..r {
        for j in 0..s {
            let prod = &rows[nf + i] * &rows[nf + r + j];
            let eq = &rows[i * s + j];
            if prod.monic() != eq.monic() {
                let e = Error::FactorizationMismatch(format!(
                    "symbol of {} is not the product of the factor symbols",
                    sys.equations[i * s + j].name
                ));
                return v.not_applicable(e.to_string());
            }
        }
    }
    let c = codim(&rows[nf..], n);
    v.certificates.codim = Some(c.codim);
    if c.codim != r + s {
        return v.not_applicable(format!(
            "factor symbols have codim {} instead of r+s = {}",
            c.codim,
            r + s
        ));
    }
    v.applicable = true;
    let reduce = |e: &Expr| -> Result<Expr> {
        if sys.orthonomic_report().valid {
            sys.reduce(e)
        } else {
            Ok(e.clone())
        }
    };
    let mut residues = Vec::new();
    let mut failed = false;
    for i in 0..r {
        for j in i + 1..r {
            for (k, g) in gs.iter().enumerate() {
                let res = jacobi_bracket(&fs[i], &fs[j], sys)
                    .and_then(|b| compose(&b, g, sys))
                    .and_then(|e| reduce(&e));
                residues.push((format!("{{F{},F{}}}G{}", i + 1, j + 1, k + 1), res));
            }
        }
    }
    for (i, f) in fs.iter().enumerate() {
        for j in 0..s {
            for k in j + 1..s {
                let res = jacobi_bracket(&gs[j], &gs[k], sys)
                    .and_then(|b| compose(f, &b, sys))
                    .and_then(|e| reduce(&e));
                residues.push((format!("F{}{{G{},G{}}}", i + 1, j + 1, k + 1), res));
            }
        }
    }
    let (mut nonzero, mut conditional) = (false, false);
    for (name, res) in residues {
        match res {
            Ok(e) => {
                if is_conditional(&e, sys) {
                    conditional = true;
                } else {
                    nonzero |= !e.is_zero();
                }
                v.certificates.residues.push(ResidueCert {
                    pair: name,
                    expr: e,
                    order_used: None,
                    order_bound: None,
                });
            }
            Err(e) => {
                failed = true;
                v.note(format!("{}: {}", name, e));
            }
        }
    }
    if conditional && !nonzero {
        v.note(CONDITIONAL_NOTE);
    }
    v.result = if nonzero {
        Outcome::Incompatible
    } else if failed || conditional {
        Outcome::Inconclusive
    } else {
        Outcome::Compatible
    };
    v
}

/// Constant-coefficient operator `Σ c_μ D_μ` for each entry of an algebraic
/// syzygy.
pub fn lift_syzygy(g: &[Poly]) -> Vec<CDiffRow> {
    g.iter()
        .map(|p| {
            let mut row = CDiffRow::zero(1);
            for (mono, c) in p.terms() {
                row.comps[0].insert(MultiIndex(mono.0.clone()), Expr::rational(c.clone()));
            }
            row
        })
        .collect()
}

/// `Σ G_i(F_i)` reduced modulo the prolonged system.
pub fn syzygy_residue(coeffs: &[CDiffRow], sys: &PDESystem) -> Result<Expr> {
    if coeffs.len() != sys.equations.len() {
        return Err(Error::ArityMismatch {
            expected: sys.equations.len(),
            got: coeffs.len(),
        });
    }
    let total: Expr = coeffs
        .iter()
        .zip(&sys.equations)
        .map(|(g, eq)| g.apply_component(0, &eq.expression(), sys))
        .sum();
    sys.reduce(&total)
}

/// Lifts the algebraic syzygies of a constant symbol and reduces the
/// resulting differential syzygies.
pub fn check_syzygy_residues(sys: &PDESystem, opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::SyzygyResidues, opts.seed);
    let ops = equation_ops(sys);
    let sym = SymbolicMatrix::new(&ops, sys);
    if !sym.is_constant() {
        return v.not_applicable("symbol depends on the jet point");
    }
    if !sys.orthonomic_report().valid {
        return v.not_applicable("system is not orthonomic");
    }
    let n = sys.n();
    let rows: Vec<ModuleElement> = sym
        .entries
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| e.constant(n).expect("constant symbol"))
                .collect()
        })
        .collect();
    let syz = syzygy_module(&rows, n);
    v.applicable = true;
    let names = cotangent_names(sys);
    let bound = opts.bound_for(sys);
    let orders: Vec<u32> = sys.equations.iter().map(|e| e.order()).collect();
    let (mut nonzero, mut undecided, mut conditional) = (false, false, false);
    let mut audit = 0;
    for (k, g) in syz.iter().enumerate() {
        let shown: Vec<String> = g.iter().map(|p| p.fmt_with(&names)).collect();
        v.certificates
            .syzygies
            .push(format!("({})", shown.join(", ")));
        let lifted_order = g
            .iter()
            .zip(&orders)
            .filter(|(p, _)| !p.is_zero())
            .map(|(p, o)| p.total_degree().unwrap_or(0) + o)
            .max()
            .unwrap_or(0);
        if lifted_order > bound {
            undecided = true;
            v.note(format!(
                "syzygy {} has order {} above the bound {}",
                k + 1,
                lifted_order,
                bound
            ));
            continue;
        }
        let coeffs = lift_syzygy(g);
        let mut red = sys.reducer();
        let total: Expr = coeffs
            .iter()
            .zip(&ops)
            .map(|(c, f)| c.apply_component(0, f, sys))
            .sum();
        match red.reduce(&total) {
            Ok(res) => {
                audit = audit.max(red.order_used());
                if is_conditional(&res, sys) {
                    conditional = true;
                } else {
                    nonzero |= !res.is_zero();
                }
                v.certificates.residues.push(ResidueCert {
                    pair: format!("syz{}", k + 1),
                    expr: res,
                    order_used: Some(red.order_used()),
                    order_bound: Some(bound),
                });
            }
            Err(e) => {
                undecided = true;
                v.note(format!("syzygy {}: {}", k + 1, e));
            }
        }
    }
    v.certificates.order_audit = Some(audit);
    if syz.is_empty() {
        v.note("symbol rows have no algebraic syzygies");
    }
    if conditional && !nonzero {
        v.note(CONDITIONAL_NOTE);
    }
    v.result = if nonzero {
        Outcome::Incompatible
    } else if undecided || conditional {
        Outcome::Inconclusive
    } else {
        Outcome::Compatible
    };
    v
}

/// Reason a joint criterion cannot use the given symmetries, if any.
fn unverified(sys: &PDESystem, syms: &[Symmetry]) -> Option<String> {
    symmetry_statuses(sys, syms)
        .into_iter()
        .find(|st| !st.verified())
        .map(|st| {
            let why = st.error.unwrap_or_else(|| "nonzero residue".into());
            format!("{} is not verified as a symmetry: {}", st.name, why)
        })
}

/// Coefficient vector of a polynomial expression over a fixed monomial list.
fn coefficient_rows(es: &[Expr]) -> Option<Vec<Vec<Rational>>> {
    let mut monos: BTreeMap<AMono, usize> = BTreeMap::new();
    for e in es {
        if !e.is_polynomial() {
            return None;
        }
        for (m, _) in e.numer_poly().terms() {
            let k = monos.len();
            monos.entry(m.clone()).or_insert(k);
        }
    }
    Some(
        es.iter()
            .map(|e| {
                let mut row = vec![Rational::zero(); monos.len()];
                for (m, c) in e.numer_poly().terms() {
                    row[monos[m]] = c.clone();
                }
                row
            })
            .collect(),
    )
}

/// Joint system of a scalar equation set and `k` symmetries with
/// `r + k ≤ n` and characteristic codimension `r + k`.
pub fn check_joint_scalar_ci(sys: &PDESystem, syms: &[Symmetry], opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::JointScalarCI, opts.seed);
    if sys.m() != 1 {
        return v.not_applicable(format!("needs one dependent variable, found {}", sys.m()));
    }
    if syms.is_empty() {
        return v.not_applicable("no symmetries supplied");
    }
    let (r, k, n) = (sys.equations.len(), syms.len(), sys.n());
    if r + k > n {
        return v.not_applicable(format!("r+k = {} exceeds n = {}", r + k, n));
    }
    if let Some(why) = unverified(sys, syms) {
        return v.not_applicable(why);
    }
    let ops = joint_operators(sys, syms);
    let Some(rep) = stable_report(&ops, sys, opts, &mut v) else {
        return v.not_applicable("characteristic codimension not established");
    };
    if rep.codim != r + k {
        return v.not_applicable(format!(
            "joint codim {} differs from r+k = {}",
            rep.codim,
            r + k
        ));
    }
    if k >= 2 {
        let reduced: Result<Vec<Expr>> =
            syms.iter().map(|s| sys.reduce(&s.components[0])).collect();
        let Ok(reduced) = reduced else {
            return v.not_applicable("symmetries could not be reduced");
        };
        for i in 0..k {
            for j in i + 1..k {
                let b = jacobi_bracket(&syms[i].components[0], &syms[j].components[0], sys)
                    .and_then(|b| sys.reduce(&b));
                let ok = match b {
                    Ok(b) => {
                        let mut all = reduced.clone();
                        all.push(b);
                        coefficient_rows(&all).is_some_and(|rows| in_span(&rows[..k], &rows[k]))
                    }
                    Err(_) => false,
                };
                if !ok {
                    return v.not_applicable(format!(
                        "bracket of {} and {} is not in the span of the symmetries",
                        syms[i].name, syms[j].name
                    ));
                }
            }
        }
    }
    v.applicable = true;
    v.result = Outcome::Compatible;
    v
}

fn base_symbol(sys: &PDESystem, opts: &Options) -> Result<Vec<Vec<Poly>>> {
    let (mx, _) = symbol_at_seed(&equation_ops(sys), sys, opts.seed, DEFAULT_RETRIES)?;
    Ok(mx.rows)
}

/// Determined base system plus one symmetry whose joint characteristic
/// variety has codimension `m`.
pub fn check_joint_codim_m(sys: &PDESystem, syms: &[Symmetry], opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::JointCodimM, opts.seed);
    if syms.len() != 1 {
        return v.not_applicable(format!("needs exactly one symmetry, found {}", syms.len()));
    }
    let (r, m, n) = (sys.equations.len(), sys.m(), sys.n());
    if r != m {
        return v.not_applicable(format!("base system is not square (r = {}, m = {})", r, m));
    }
    if let Some(why) = unverified(sys, syms) {
        return v.not_applicable(why);
    }
    match base_symbol(sys, opts) {
        Ok(rows) => {
            if determinant(&rows, n).is_zero() {
                return v.not_applicable("base symbol determinant vanishes");
            }
        }
        Err(e) => return v.not_applicable(format!("symbol evaluation failed: {}", e)),
    }
    let ops = joint_operators(sys, syms);
    let Some(rep) = stable_report(&ops, sys, opts, &mut v) else {
        return v.not_applicable("characteristic codimension not established");
    };
    if rep.codim != m {
        return v.not_applicable(format!("joint codim {} differs from m = {}", rep.codim, m));
    }
    v.applicable = true;
    v.result = Outcome::Compatible;
    v
}

/// Diagonal determined base with squarefree diagonal entries plus one
/// symmetry, joint codimension above one.
pub fn check_diagonal_symbol(sys: &PDESystem, syms: &[Symmetry], opts: &Options) -> Verdict {
    let mut v = Verdict::new(Criterion::DiagonalSymbol, opts.seed);
    if syms.len() != 1 {
        return v.not_applicable(format!("needs exactly one symmetry, found {}", syms.len()));
    }
    let (r, m, n) = (sys.equations.len(), sys.m(), sys.n());
    if r != m {
        return v.not_applicable(format!("base system is not square (r = {}, m = {})", r, m));
    }
    if let Some(why) = unverified(sys, syms) {
        return v.not_applicable(why);
    }
    let rows = match base_symbol(sys, opts) {
        Ok(rows) => rows,
        Err(e) => return v.not_applicable(format!("symbol evaluation failed: {}", e)),
    };
    for (i, row) in rows.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if i != j && !p.is_zero() {
                let e = Error::NotDiagonal(format!("entry ({}, {}) is nonzero", i + 1, j + 1));
                return v.not_applicable(e.to_string());
            }
        }
    }
    if determinant(&rows, n).is_zero() {
        return v.not_applicable("base symbol determinant vanishes");
    }
    for (i, row) in rows.iter().enumerate() {
        if !is_squarefree(&row[i]) {
            return v.not_applicable(format!("diagonal entry {} has a multiple factor", i + 1));
        }
    }
    let ops = joint_operators(sys, syms);
    let Some(rep) = stable_report(&ops, sys, opts, &mut v) else {
        return v.not_applicable("characteristic codimension not established");
    };
    if rep.codim <= 1 {
        return v.not_applicable(format!("joint codim {} is not above 1", rep.codim));
    }
    if opts.diagonal_syzygies {
        let syz = syzygy_module(&rep.matrix.rows, n);
        let names = cotangent_names(sys);
        for g in &syz {
            let shown: Vec<String> = g.iter().map(|p| p.fmt_with(&names)).collect();
            v.certificates
                .syzygies
                .push(format!("({})", shown.join(", ")));
        }
    }
    v.applicable = true;
    v.result = Outcome::Compatible;
    v
}
