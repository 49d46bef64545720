//! Acceptance suite: one PASS/FAIL line per criterion.  Runs without the
//! libtest harness so the lines always reach the console.

#[path = "support/props.rs"]
mod props;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use jetbracket::algebra::groebner::{apply_syzygy, syzygy_module};
use jetbracket::algebra::linear::{in_span, rank};
use jetbracket::algebra::poly::{Monomial, Poly};
use jetbracket::brackets::is_symmetry;
use jetbracket::chargeo::{codim_across_seeds, symbol_at_seed, DEFAULT_RETRIES};
use jetbracket::compat::{
    analyze, check_syzygy_residues, joint_operators, Analysis, Criterion, Options, Outcome,
};
use jetbracket::dist::{derived_distributions, derived_flag_seeded, is_cauchy_subdistribution};
use jetbracket::dsl::{self, Model};
use jetbracket::expr::{Atom, Expr, MultiIndex};
use jetbracket::jet::{PDESystem, Symmetry};
use jetbracket::verify::{mutation_report, verify, Mode, VerifyOptions};
use jetbracket::Rational;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

type Check = Result<String, String>;
type Entry = (u32, &'static str, u64, fn() -> Check);

/// Criteria expected to fail, with the reason recorded alongside the
/// deviation notes.  The suite insists they still fail so a fix is noticed.
const KNOWN_FAILURES: &[u32] = &[9];

const CORPUS: &str = include_str!("../corpus/paper.jb");

fn corpus_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/paper.jb").to_string()
}

fn model() -> Model {
    dsl::parse(CORPUS).expect("corpus parses")
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn sys<'a>(m: &'a Model, name: &str) -> Result<&'a PDESystem, String> {
    m.system(name)
        .ok_or_else(|| format!("corpus lacks system {}", name))
}

fn syms(s: &PDESystem, names: &[&str]) -> Result<Vec<Symmetry>, String> {
    names
        .iter()
        .map(|n| {
            s.symmetries
                .iter()
                .find(|x| x.name == *n)
                .cloned()
                .ok_or_else(|| format!("no symmetry {}", n))
        })
        .collect()
}

fn analysis(s: &PDESystem, names: &[&str]) -> Result<Analysis, String> {
    analyze(s, &syms(s, names)?, &Options::default()).map_err(|e| e.to_string())
}

fn decisive(a: &Analysis) -> Option<Criterion> {
    a.decisive().map(|v| v.criterion)
}

fn cli(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["jetbracket"];
    full.extend_from_slice(args);
    let (out, err, code) = jetbracket::cli::run_args(full);
    let v = serde_json::from_str(&out).unwrap_or(Value::String(err));
    (v, code)
}

fn coefficient_vector(g: &[Poly], n: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    for p in g {
        for v in 0..n {
            out.push(p.coeff(&Monomial::var(n, v)));
        }
    }
    out
}

fn linear(n: usize, vars: &[usize]) -> Vec<Poly> {
    vars.iter().map(|&v| Poly::var(n, v)).collect()
}

fn c1_twisted_cubic() -> Check {
    let corpus = corpus_path();
    let (rep, code) = cli(&["charvar", &corpus, "--system", "noc"]);
    ensure!(code == 0, "charvar exit code {}", code);
    let cert = &rep["checks"][0]["certificates"];
    ensure!(cert["codim"] == 2, "codim {}", cert["codim"]);
    ensure!(
        cert["complete_intersection"] == false,
        "reported a complete intersection"
    );

    let m = model();
    let s = sys(&m, "noc")?;
    let ops: Vec<Expr> = s.equations.iter().map(|e| e.expression()).collect();
    let (mx, _) = symbol_at_seed(&ops, s, 42, DEFAULT_RETRIES).map_err(|e| e.to_string())?;
    let n = s.n();
    let gens = syzygy_module(&mx.rows, n);
    ensure!(gens.len() == 2, "{} syzygy generators", gens.len());
    for g in &gens {
        ensure!(
            g.iter().all(|p| p.is_zero() || p.total_degree() == Some(1)),
            "non-linear generator"
        );
        ensure!(
            apply_syzygy(g, &mx.rows, n).iter().all(Poly::is_zero),
            "generator is not a syzygy"
        );
    }
    let computed: Vec<Vec<Rational>> = gens.iter().map(|g| coefficient_vector(g, n)).collect();
    let expected: Vec<Vec<Rational>> = [linear(n, &[1, 2, 3]), linear(n, &[0, 1, 2])]
        .iter()
        .map(|g| coefficient_vector(g, n))
        .collect();
    ensure!(rank(&computed) == 2, "generators are dependent");
    for e in &expected {
        ensure!(
            in_span(&computed, e),
            "expected generator outside the computed module"
        );
    }
    for c in &computed {
        ensure!(
            in_span(&expected, c),
            "computed generator outside the expected module"
        );
    }
    Ok("codim 2, not CI, syzygies (p1,p2,p3), (p0,p1,p2)".into())
}

fn c2_syzygy_residues() -> Check {
    let m = model();
    let opts = Options::default();
    let plain = check_syzygy_residues(sys(&m, "noc")?, &opts);
    ensure!(
        plain.certificates.residues.len() == 2,
        "{} residues",
        plain.certificates.residues.len()
    );
    ensure!(
        plain.certificates.residues.iter().all(|r| r.expr.is_zero()),
        "nonzero residue with f = 0"
    );
    ensure!(
        plain.result == Outcome::Compatible,
        "f = 0 verdict {}",
        plain.result
    );

    let s = sys(&m, "noc_forced")?;
    let f: Vec<Expr> = s.equations.iter().map(|e| e.expression()).collect();
    let oracle = s
        .reduce(
            &(s.total_derivative(&f[0], 1)
                + s.total_derivative(&f[1], 2)
                + s.total_derivative(&f[2], 3)),
        )
        .map_err(|e| e.to_string())?;
    let u1 = s.jet(0, &[0, 1, 0, 0]);
    ensure!(oracle == -u1.clone(), "oracle residue {}", oracle);
    let forced = check_syzygy_residues(s, &opts);
    let idx = forced
        .certificates
        .syzygies
        .iter()
        .position(|g| g == "(p_x1, p_x2, p_x3)")
        .ok_or("syzygy (p1,p2,p3) missing")?;
    let got = &forced.certificates.residues[idx].expr;
    ensure!(
        *got == oracle,
        "residue {} differs from oracle {}",
        got,
        oracle
    );
    ensure!(
        forced.result == Outcome::Incompatible,
        "forced verdict {}",
        forced.result
    );
    Ok(format!("residues 0, 0; forced residue {}", got))
}

/// `D_i f(x, y, u, u_x, u_y)` by the chain rule, written out by hand.
fn chain_rule(f: &str, i: usize, s: &PDESystem) -> Expr {
    let args = vec![
        s.var(0),
        s.var(1),
        s.jet(0, &[0, 0]),
        s.jet(0, &[1, 0]),
        s.jet(0, &[0, 1]),
    ];
    let d = |k: usize| {
        let mut idx = vec![0; 5];
        idx[k] = 1;
        Expr::func(f, idx, args.clone())
    };
    let mut second = [0u32, 0];
    second[i] += 1;
    let (mut ux, mut uy) = (second, second);
    ux[0] += 1;
    uy[1] += 1;
    d(i) + d(2) * s.jet(0, &second) + d(3) * s.jet(0, &ux) + d(4) * s.jet(0, &uy)
}

fn c3_frobenius() -> Check {
    let m = model();
    let s = sys(&m, "frobenius")?;
    let rs = s
        .cross_residues(s.default_order_bound())
        .map_err(|e| e.to_string())?;
    ensure!(rs.len() == 2, "{} cross residues", rs.len());
    let args = vec![
        s.var(0),
        s.var(1),
        s.jet(0, &[0, 0]),
        s.jet(0, &[1, 0]),
        s.jet(0, &[0, 1]),
    ];
    let f = |name: &str| Expr::func(name, vec![0; 5], args.clone());
    let mut sub = std::collections::BTreeMap::new();
    sub.insert(s.jet_atom(0, MultiIndex(vec![2, 0])), f("f11"));
    sub.insert(s.jet_atom(0, MultiIndex(vec![1, 1])), f("f12"));
    sub.insert(s.jet_atom(0, MultiIndex(vec![0, 2])), f("f22"));
    let cond = |a: &str, b: &str| -> Result<Expr, String> {
        (chain_rule(a, 1, s) - chain_rule(b, 0, s))
            .substitute(&sub)
            .map_err(|e| e.to_string())
    };
    let expected = [cond("f11", "f12")?, cond("f12", "f22")?];
    for (r, e) in rs.iter().zip(&expected) {
        ensure!(
            r.residue == *e || r.residue == -e.clone(),
            "residue for {:?} differs from D_2 f - D_1 g",
            r.pair
        );
    }
    let ok = analysis(sys(&m, "frob_ok")?, &[])?;
    ensure!(
        ok.result == Outcome::Compatible,
        "u_x = u, u_y = u: {}",
        ok.result
    );
    let bad = analysis(sys(&m, "frob_bad")?, &[])?;
    ensure!(
        bad.result == Outcome::Incompatible,
        "u_x = u, u_y = x u: {}",
        bad.result
    );
    let u = sys(&m, "frob_bad")?.jet(0, &[0, 0]);
    let cross = bad
        .verdicts
        .iter()
        .find(|v| v.criterion == Criterion::CrossResidues)
        .ok_or("no cross verdict")?;
    ensure!(
        cross
            .certificates
            .residues
            .iter()
            .any(|r| r.expr == -u.clone()),
        "residue -u not found"
    );
    Ok("two integrability conditions; compatible / incompatible (-u)".into())
}

fn c4_kdv() -> Check {
    let m = model();
    let s = sys(&m, "kdv")?;
    for sym in &s.symmetries {
        let c = is_symmetry(&sym.components, s).map_err(|e| e.to_string())?;
        ensure!(c.holds, "{} is not a symmetry", sym.name);
    }
    for (name, crit) in [
        ("T0", Criterion::JointScalarCI),
        ("R", Criterion::JointScalarCI),
        ("T1", Criterion::JointCodimM),
        ("Gamma", Criterion::JointCodimM),
    ] {
        let a = analysis(s, &[name])?;
        ensure!(a.result == Outcome::Compatible, "{}: {}", name, a.result);
        ensure!(
            decisive(&a) == Some(crit),
            "{} certified by {:?}",
            name,
            decisive(&a)
        );
    }
    for pair in [["T0", "R"], ["T1", "R"], ["T1", "Gamma"], ["Gamma", "R"]] {
        let a = analysis(s, &pair)?;
        ensure!(
            a.result == Outcome::Inconclusive,
            "{:?}: {}",
            pair,
            a.result
        );
    }
    Ok("4 symmetries; singles compatible; 4 pairs inconclusive".into())
}

fn c5_kp() -> Check {
    let m = model();
    let s = sys(&m, "kp")?;
    let a_sym = syms(s, &["A"])?;
    ensure!(
        is_symmetry(&a_sym[0].components, s)
            .map_err(|e| e.to_string())?
            .holds,
        "A is not a symmetry"
    );
    let ops = joint_operators(s, &a_sym);
    let seeds: Vec<u64> = (42..47).collect();
    let codims = codim_across_seeds(&ops, s, &seeds).map_err(|e| e.to_string())?;
    ensure!(codims.iter().all(|&c| c == 2), "joint codims {:?}", codims);
    let a = analysis(s, &["A"])?;
    ensure!(a.result == Outcome::Compatible, "verdict {}", a.result);
    ensure!(
        decisive(&a) == Some(Criterion::JointCodimM),
        "certified by {:?}",
        decisive(&a)
    );
    Ok(format!(
        "joint codim {:?}; compatible via JointCodimM",
        codims
    ))
}

fn c6_matrix_pair() -> Check {
    let m = model();
    let s = sys(&m, "ab")?;
    let g = syms(s, &["G"])?;
    ensure!(
        is_symmetry(&g[0].components, s)
            .map_err(|e| e.to_string())?
            .holds,
        "bracket check failed"
    );
    let a = analysis(s, &["G"])?;
    let rep = a.char_report.as_ref().ok_or("no characteristic report")?;
    let xi2eta = Poly::from_int_terms(2, &[(&[2, 1], 1)]);
    ensure!(
        rep.ideal == vec![xi2eta],
        "ideal {:?}",
        rep.ideal.iter().map(|p| p.to_string()).collect::<Vec<_>>()
    );
    ensure!(rep.codim == 1, "codim {}", rep.codim);
    for v in &a.verdicts {
        ensure!(!v.applicable, "{} reported applicable", v.criterion);
    }
    ensure!(a.result != Outcome::Compatible, "reported compatible");
    Ok(format!(
        "ideal (p_x^2 p_y), codim 1; all not applicable; {}",
        a.result
    ))
}

fn c7_wave() -> Check {
    let m = model();
    let a = analysis(sys(&m, "wave")?, &["S"])?;
    let rep = a.char_report.as_ref().ok_or("no characteristic report")?;
    ensure!(rep.codim == 2, "joint codim {}", rep.codim);
    let d = a
        .verdicts
        .iter()
        .find(|v| v.criterion == Criterion::DiagonalSymbol)
        .ok_or("no diagonal verdict")?;
    ensure!(
        d.applicable && d.result == Outcome::Compatible,
        "DiagonalSymbol {} (applicable {})",
        d.result,
        d.applicable
    );
    ensure!(a.result == Outcome::Compatible, "verdict {}", a.result);
    Ok("joint codim 2; DiagonalSymbol compatible".into())
}

fn run_prop<S: Strategy>(
    cases: u32,
    strat: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new(cfg)
        .run(&strat, f)
        .map_err(|e| e.to_string())
}

fn c8_properties() -> Check {
    run_prop(
        100,
        props::op_pair(),
        props::jacobi_antisymmetric_with_order_bound,
    )
    .map_err(|e| format!("Jacobi: {}", e))?;
    run_prop(
        100,
        props::triple(),
        props::multi_bracket_totally_antisymmetric,
    )
    .map_err(|e| format!("multi: {}", e))?;
    run_prop(
        100,
        props::op_pair(),
        props::multi_bracket_specializes_to_jacobi,
    )
    .map_err(|e| format!("m = 1: {}", e))?;
    run_prop(
        100,
        props::kdv_pair(),
        props::reduction_is_idempotent_and_a_ring_map,
    )
    .map_err(|e| format!("reduce: {}", e))?;
    run_prop(
        100,
        props::generators(),
        props::s_polynomials_reduce_to_zero,
    )
    .map_err(|e| format!("Groebner: {}", e))?;
    run_prop(30, props::excess_case(), props::codim_bounded_by_excess)
        .map_err(|e| format!("excess bound: {}", e))?;
    run_prop(
        20,
        props::commuting_case(),
        props::commuting_pairs_have_codim_at_most_m,
    )
    .map_err(|e| format!("commuting: {}", e))?;
    run_prop(
        100,
        props::fd_case(),
        props::partial_derivative_matches_finite_differences,
    )
    .map_err(|e| format!("diff: {}", e))?;
    Ok("8 suites, 650 cases".into())
}

fn c9_distributions() -> Check {
    let m = model();
    let dist = |n: &str| {
        m.distribution(n)
            .map(|d| d.dist.clone())
            .ok_or_else(|| format!("no distribution {}", n))
    };
    let mut failures = Vec::new();
    for (name, want) in [
        ("hilbert_cartan", vec![2, 3, 4, 5]),
        ("engel", vec![2, 3, 4]),
        ("null3", vec![3, 5, 6]),
    ] {
        let fr = derived_flag_seeded(&dist(name)?, 42, 5, 8).map_err(|e| e.to_string())?;
        ensure!(
            fr.consistent && fr.per_seed.len() == 5,
            "{} growth differs across points",
            name
        );
        if fr.growth != want {
            failures.push(format!(
                "{} growth {:?}, expected {:?}",
                name, fr.growth, want
            ));
        }
    }
    for (sub, big, want) in [("jet12_pi", "jet12", true), ("null3_pi", "null3", false)] {
        let flag = derived_distributions(&dist(big)?, 2).map_err(|e| e.to_string())?;
        let d2 = &flag[1];
        for k in 0..5 {
            let got = is_cauchy_subdistribution(&dist(sub)?, d2, &d2.random_point(42 + k))
                .map_err(|e| e.to_string())?;
            ensure!(
                got == want,
                "{} in {} level 2: cauchy {} at point {}",
                sub,
                big,
                got,
                k
            );
        }
    }
    if failures.is_empty() {
        Ok("growth vectors and Cauchy tests as expected".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c10_solutions() -> Check {
    let m = model();
    let opts = VerifyOptions {
        tol: 1e-9,
        samples: 25,
        seed: 42,
        ..VerifyOptions::default()
    };
    for (name, mode) in [
        ("monge_closed", Mode::ParametricSymbolic),
        ("cartan8_general", Mode::ParametricSymbolic),
        ("liouville_general", Mode::Explicit),
        ("goursat_cone", Mode::Explicit),
        ("null_closed", Mode::ParametricNumeric),
    ] {
        let sol = m
            .solution(name)
            .ok_or_else(|| format!("no solution {}", name))?;
        ensure!(sol.mode == mode, "{} has mode {}", name, sol.mode.name());
        let s = sys(&m, &sol.system)?;
        let r = verify(s, sol, &opts).map_err(|e| format!("{}: {}", name, e))?;
        ensure!(r.passed, "{} failed: {:?}", name, r.notes);
        if mode == Mode::ParametricNumeric {
            ensure!(r.samples == 25, "{} used {} samples", name, r.samples);
        }
    }
    let cone = m.solution("goursat_cone").ok_or("no cone")?;
    let gs = sys(&m, "goursat")?;
    let bind: std::collections::BTreeMap<Atom, Expr> = cone.bindings.iter().cloned().collect();
    let piece = |t: &str| -> Result<Expr, String> {
        dsl::parse_expr(t, gs)
            .and_then(|e| e.substitute(&bind))
            .map_err(|e| e.to_string())
    };
    let mu = Expr::var("mu");
    ensure!(
        piece("2*u[x,y] - u[y,y]^2")? == -(mu.clone() * mu.clone()),
        "first cone factor is not -mu^2"
    );
    ensure!(
        piece("3*u[x,x] - 6*u[x,y]*u[y,y] + 2*u[y,y]^3")?
            == Expr::int(2) * mu.clone() * mu.clone() * mu,
        "second cone factor is not 2 mu^3"
    );
    let mut total = 0;
    for sol in &m.solutions {
        let s = sys(&m, &sol.system)?;
        let outcomes = mutation_report(s, sol, &opts).map_err(|e| e.to_string())?;
        ensure!(!outcomes.is_empty(), "{} has no mutants", sol.name);
        if let Some(o) = outcomes.iter().find(|o| !o.rejected) {
            return Err(format!("{}: mutant {} accepted", sol.name, o.label));
        }
        total += outcomes.len();
    }
    Ok(format!("5 solutions verified; {} mutants rejected", total))
}

fn c11_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_jetbracket");
    let corpus = corpus_path();
    let runs: [&[&str]; 4] = [
        &["check", &corpus, "--seed", "42"],
        &[
            "check",
            &corpus,
            "--system",
            "kdv",
            "--symmetry",
            "R",
            "--seed",
            "42",
        ],
        &["charvar", &corpus, "--system", "noc", "--seed", "42"],
        &["verify", &corpus, "--seed", "42"],
    ];
    for args in runs {
        let go = || {
            Command::new(bin)
                .args(args)
                .env_remove("JETBRACKET_SEED")
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (go()?, go()?);
        ensure!(!a.stdout.is_empty(), "{:?} printed nothing", args);
        ensure!(
            a.stdout == b.stdout && a.status.code() == b.status.code(),
            "{:?} differs between runs",
            args
        );
    }
    Ok("check, charvar and verify byte-identical".into())
}

fn main() {
    let criteria: [Entry; 11] = [
        (1, "twisted cubic symbol and syzygies", 5, c1_twisted_cubic),
        (2, "differential syzygy residues", 5, c2_syzygy_residues),
        (3, "Frobenius family", 2, c3_frobenius),
        (4, "KdV symmetries", 30, c4_kdv),
        (5, "Kadomtsev-Pogutse family", 60, c5_kp),
        (6, "matrix operator pair", 5, c6_matrix_pair),
        (7, "nonlinear wave with scaling", 30, c7_wave),
        (8, "property suites", 120, c8_properties),
        (9, "distribution geometry", 10, c9_distributions),
        (10, "solution corpus", 30, c10_solutions),
        (11, "determinism", 60, c11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, title, budget, f) in criteria {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let res = match res {
            Ok(d) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{} (over the {} s budget)", d, budget))
            }
            other => other,
        };
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        let known = KNOWN_FAILURES.contains(&id);
        let suffix = if known && res.is_err() {
            " [known deviation]"
        } else {
            ""
        };
        println!(
            "{} {:>2} {} ({:.2} s): {}{}",
            tag,
            id,
            title,
            elapsed.as_secs_f64(),
            detail,
            suffix
        );
        if res.is_ok() == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {:?}", unexpected);
        std::process::exit(1);
    }
}
