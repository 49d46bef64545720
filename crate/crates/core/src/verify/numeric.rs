use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ParametricJets, SolutionCandidate, VerifyOptions, VerifyReport};
use crate::expr::{Atom, AtomKind, Expr, FuncSampler, NumericEnv};
use crate::jet::PDESystem;
use crate::{Error, Result};

const POLY_DEGREE: usize = 6;

fn falling(k: usize, d: usize) -> f64 {
    (0..d).map(|i| (k - i) as f64).product()
}

/// Random degree-6 polynomial in a weighted sum of the arguments.
fn poly_sampler(rng: &mut ChaCha8Rng, arity: usize) -> FuncSampler {
    let coeffs: Vec<f64> = (0..=POLY_DEGREE)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let weights: Vec<f64> = (0..arity).map(|_| rng.gen_range(0.5..1.5)).collect();
    Arc::new(move |deriv: &[u32], args: &[f64]| {
        let s: f64 = weights.iter().zip(args).map(|(w, a)| w * a).sum();
        let d: usize = deriv.iter().map(|k| *k as usize).sum();
        let chain: f64 = weights
            .iter()
            .zip(deriv)
            .map(|(w, k)| w.powi(*k as i32))
            .product();
        let value: f64 = (d..=POLY_DEGREE)
            .map(|k| coeffs[k] * falling(k, d) * s.powi((k - d) as i32))
            .sum();
        chain * value
    })
}

fn opaque_functions(exprs: &[&Expr]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for e in exprs {
        for a in e.deep_atoms() {
            if let AtomKind::Func { name, args, .. } = a.kind() {
                out.insert(name.clone(), args.len());
            }
        }
    }
    out
}

/// Seeded polynomial samplers for every opaque function in the candidate.
pub fn default_samplers(sol: &SolutionCandidate, seed: u64) -> BTreeMap<String, FuncSampler> {
    let exprs: Vec<&Expr> = sol.bindings.iter().map(|(_, e)| e).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    opaque_functions(&exprs)
        .into_iter()
        .map(|(name, arity)| (name, poly_sampler(&mut rng, arity)))
        .collect()
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        let (top, bottom) = m.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in bottom.iter_mut() {
            let f = row[c] / pivot[c];
            for (x, p) in row[c..n].iter_mut().zip(&pivot[c..n]) {
                *x -= f * p;
            }
        }
    }
    d
}

struct Sample {
    residual: f64,
    scale: f64,
}

fn one_sample(
    sys: &PDESystem,
    pj: &mut ParametricJets<'_>,
    pulled: &[(Expr, BTreeSet<Atom>)],
    funcs: &BTreeMap<String, FuncSampler>,
    values: &[f64],
) -> Result<Sample> {
    let mut env = NumericEnv::new();
    env.funcs = funcs.clone();
    for (p, v) in pj.params().iter().zip(values) {
        env.values.insert(p.clone(), *v);
    }
    let jac: Vec<Vec<f64>> = pj
        .jacobian
        .iter()
        .map(|row| row.iter().map(|e| e.eval(&env)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let scale: f64 = jac.iter().flatten().fold(0.0, |m, v| m.max(v.abs()));
    if det(jac).abs() <= 1e-12 * (1.0 + scale).powi(sys.n() as i32) {
        return Err(Error::SingularJacobian(
            "Jacobian vanishes at the sample".into(),
        ));
    }
    let mut point = NumericEnv::new();
    point.funcs = funcs.clone();
    for (i, x) in sys.independents().iter().enumerate() {
        point.values.insert(Atom::var(x), pj.coords[i].eval(&env)?);
    }
    let mut worst = Sample {
        residual: 0.0,
        scale: 0.0,
    };
    for (f, jets) in pulled {
        for a in jets {
            if !point.values.contains_key(a) {
                let (dep, idx) = a.jet_parts().expect("jet atom");
                let v = pj.jet(dep, &idx.clone())?.eval(&env)?;
                point.values.insert(a.clone(), v);
            }
        }
        let r = f.eval(&point)?.abs();
        let s = f.eval_term_scale(&point)?;
        if r / (1.0 + s) >= worst.residual / (1.0 + worst.scale) {
            worst = Sample {
                residual: r,
                scale: s,
            };
        }
    }
    Ok(worst)
}

/// Evaluates the equations at random parameter values with jets obtained
/// from the chain rule, passing when every residual is within
/// `tol·(1 + max |term|)`.
pub fn verify_parametric_numeric(
    sys: &PDESystem,
    sol: &SolutionCandidate,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let mut pj = ParametricJets::new(sys, sol)?;
    let funcs = default_samplers(sol, opts.seed);
    let pulled: Vec<(Expr, BTreeSet<Atom>)> = sys
        .equations
        .iter()
        .map(|e| e.expression())
        .map(|f| (f.clone(), f.jet_atoms()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut report = VerifyReport {
        solution: sol.name.clone(),
        mode: sol.mode,
        passed: true,
        residues: Vec::new(),
        max_residual: Some(0.0),
        max_scale: Some(0.0),
        samples: 0,
        notes: Vec::new(),
    };
    let mut retries = 0;
    let (mut max_r, mut max_s) = (0.0f64, 0.0f64);
    while report.samples < opts.samples {
        let values: Vec<f64> = (0..sol.params.len())
            .map(|_| rng.gen_range(-2.0..2.0))
            .collect();
        match one_sample(sys, &mut pj, &pulled, &funcs, &values) {
            Ok(s) => {
                report.samples += 1;
                max_r = max_r.max(s.residual);
                max_s = max_s.max(s.scale);
                if s.residual > opts.tol * (1.0 + s.scale) {
                    report.passed = false;
                }
            }
            Err(e @ (Error::SingularJacobian(_) | Error::NumericDomain(_))) => {
                retries += 1;
                if retries > opts.resample_budget {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    if retries > 0 {
        report.notes.push(format!("{} samples redrawn", retries));
    }
    report.max_residual = Some(max_r);
    report.max_scale = Some(max_s);
    Ok(report)
}
