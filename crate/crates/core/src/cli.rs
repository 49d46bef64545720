//! Command-line driver.  `run` returns the rendered report and exit code so
//! the binary stays a thin wrapper.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::groebner::syzygy_module;
use crate::brackets::{jacobi_bracket, mayer_bracket, multi_bracket};
use crate::chargeo::{
    char_report_matrix, char_report_seeded, symbol_at_seed, CharReport, JetPoint, SymbolicMatrix,
};
use crate::compat::{analyze, check_syzygy_residues, joint_operators, Options, Outcome};
use crate::dist::{derived_distributions, derived_flag_seeded, is_cauchy_subdistribution};
use crate::dsl::{self, Model};
use crate::expr::Expr;
use crate::jet::{PDESystem, Symmetry};
use crate::report::{Check, Format, Report};
use crate::verify::{mutation_report, verify, VerifyOptions};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 10;
pub const EXIT_VERIFY_FAILED: i32 = 11;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(
    name = "jetbracket",
    version,
    about = "Compatibility checks for overdetermined PDE systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BracketKind {
    Jacobi,
    Mayer,
    Multi,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Model file.
    pub file: PathBuf,
    /// Seed for generic points and sampling; falls back to the model option, then 42.
    #[arg(long, env = "JETBRACKET_SEED")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every applicable compatibility criterion.
    Check {
        #[command(flatten)]
        common: Common,
        /// Restrict to one system; all systems otherwise.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, requires = "system")]
        symmetry: Vec<String>,
        #[arg(long)]
        order_bound: Option<u32>,
    },
    /// Characteristic ideal and codimension.
    Charvar {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        system: String,
        #[arg(long)]
        symmetry: Vec<String>,
        /// File of `atom = rational` lines fixing the jet point.
        #[arg(long)]
        point: Option<PathBuf>,
    },
    /// Jacobi, Mayer or multi-bracket of operators.
    Bracket {
        #[arg(value_enum)]
        kind: BracketKind,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        system: String,
        /// Operator expressions; defaults to the system's equations.
        #[arg(long = "op")]
        ops: Vec<String>,
    },
    /// Syzygies of the symbol rows and their differential residues.
    Syzygy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        system: String,
        #[arg(long)]
        order_bound: Option<u32>,
    },
    /// Derived flag growth and Cauchy characteristic tests.
    Flags {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        distribution: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Number of random points.
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Subdistribution tested for Cauchy characteristics.
        #[arg(long)]
        cauchy: Option<String>,
        /// Member of the derived flag the subdistribution is tested in.
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Substitute solutions into their systems.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Restrict to one solution; all solutions otherwise.
        #[arg(long)]
        solution: Option<String>,
        /// Numeric tolerance [default: 1e-9].
        #[arg(long)]
        tol: Option<f64>,
        /// Numeric samples [default: 25].
        #[arg(long)]
        samples: Option<usize>,
        /// Also check that every single-coefficient mutation is rejected.
        #[arg(long)]
        mutations: bool,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check { common, .. }
            | Command::Charvar { common, .. }
            | Command::Bracket { common, .. }
            | Command::Syzygy { common, .. }
            | Command::Flags { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

/// Rendered output of a successful run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub output: String,
    pub code: i32,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Resolution(_) | Error::ArityMismatch { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Loads the model and runs the command.  Errors carry their exit code
/// through `exit_code_for`.
pub fn run(cli: &Cli) -> Result<RunOutput> {
    let common = cli.command.common();
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| Error::Resolution(format!("cannot read {}: {}", common.file.display(), e)))?;
    let model = dsl::parse(&text)?;
    let seed = common.seed.or(model.options.seed).unwrap_or(DEFAULT_SEED);
    let format = match common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let mut report = Report::new(seed);
    let code = match &cli.command {
        Command::Check {
            system,
            symmetry,
            order_bound,
            ..
        } => run_check(
            &model,
            system.as_deref(),
            symmetry,
            order_bound.or(model.options.order_bound),
            seed,
            &mut report,
        )?,
        Command::Charvar {
            system,
            symmetry,
            point,
            ..
        } => run_charvar(
            &model,
            system,
            symmetry,
            point.as_deref(),
            seed,
            &mut report,
        )?,
        Command::Bracket {
            kind, system, ops, ..
        } => run_bracket(&model, *kind, system, ops, &mut report)?,
        Command::Syzygy {
            system,
            order_bound,
            ..
        } => run_syzygy(
            &model,
            system,
            order_bound.or(model.options.order_bound),
            seed,
            &mut report,
        )?,
        Command::Flags {
            distribution,
            depth,
            points,
            cauchy,
            level,
            ..
        } => run_flags(
            &model,
            distribution,
            *depth,
            *points,
            cauchy.as_deref(),
            *level,
            seed,
            &mut report,
        )?,
        Command::Verify {
            solution,
            tol,
            samples,
            mutations,
            ..
        } => {
            let opts = VerifyOptions {
                tol: tol.or(model.options.tol).unwrap_or(1e-9),
                samples: samples.or(model.options.samples).unwrap_or(25),
                seed,
                ..VerifyOptions::default()
            };
            run_verify(&model, solution.as_deref(), &opts, *mutations, &mut report)?
        }
    };
    Ok(RunOutput {
        output: report.render(format),
        code,
    })
}

/// Parses `args` (including the program name) and runs.  Returns stdout,
/// stderr and the exit code.
pub fn run_args<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return if e.use_stderr() {
                (String::new(), e.to_string(), code)
            } else {
                (e.to_string(), String::new(), code)
            };
        }
    };
    match run(&cli) {
        Ok(o) => (o.output, String::new(), o.code),
        Err(e) => (String::new(), format!("error: {}\n", e), exit_code_for(&e)),
    }
}

fn system<'a>(model: &'a Model, name: &str) -> Result<&'a PDESystem> {
    model
        .system(name)
        .ok_or_else(|| Error::Resolution(format!("unknown system '{}'", name)))
}

fn symmetries(sys: &PDESystem, names: &[String]) -> Result<Vec<Symmetry>> {
    names
        .iter()
        .map(|n| {
            sys.symmetries
                .iter()
                .find(|s| &s.name == n)
                .cloned()
                .ok_or_else(|| {
                    Error::Resolution(format!("system '{}' has no symmetry '{}'", sys.name, n))
                })
        })
        .collect()
}

fn cotangent_names(sys: &PDESystem) -> Vec<String> {
    sys.independents()
        .iter()
        .map(|v| format!("p_{}", v))
        .collect()
}

fn run_check(
    model: &Model,
    only: Option<&str>,
    sym_names: &[String],
    order_bound: Option<u32>,
    seed: u64,
    report: &mut Report,
) -> Result<i32> {
    let systems: Vec<&PDESystem> = match only {
        Some(name) => vec![system(model, name)?],
        None => model.systems.iter().collect(),
    };
    let opts = Options {
        seed,
        order_bound,
        ..Options::default()
    };
    let mut code = EXIT_OK;
    for sys in systems {
        let syms = symmetries(sys, sym_names)?;
        let a = analyze(sys, &syms, &opts)?;
        if a.result == Outcome::Incompatible {
            code = EXIT_INCOMPATIBLE;
        }
        report.push_analysis(&a);
    }
    Ok(code)
}

fn char_check(sys: &PDESystem, subject: &str, rep: &CharReport) -> Check {
    let names = cotangent_names(sys);
    let ideal: Vec<String> = rep.ideal.iter().map(|p| p.fmt_with(&names)).collect();
    Check::new(
        "CharVariety",
        subject,
        if rep.empty { "empty" } else { "nonempty" },
    )
    .cert("codim", rep.codim)
    .cert("r", rep.r)
    .cert("m", rep.m)
    .cert("n", rep.n)
    .cert("ideal", ideal)
    .cert("complete_intersection", rep.complete_intersection)
    .cert(
        "generalized_complete_intersection",
        rep.generalized_complete_intersection(),
    )
    .cert("lower_codim", rep.lower_codim)
}

/// Lines `atom = value`; `#` starts a comment.
pub fn parse_point(text: &str, sys: &PDESystem) -> Result<JetPoint> {
    let mut pt = JetPoint::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Parse {
            line: k + 1,
            col: 1,
            expected: what.to_string(),
        };
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad("'atom = value'"))?;
        let atom = dsl::parse_expr(lhs, sys)?
            .as_atom()
            .ok_or_else(|| bad("a single coordinate before '='"))?;
        let value = dsl::parse_expr(rhs, sys)?
            .as_rational()
            .ok_or_else(|| bad("a rational value after '='"))?;
        pt.bind(atom, value);
    }
    Ok(pt)
}

fn run_charvar(
    model: &Model,
    name: &str,
    sym_names: &[String],
    point: Option<&Path>,
    seed: u64,
    report: &mut Report,
) -> Result<i32> {
    let sys = system(model, name)?;
    let syms = symmetries(sys, sym_names)?;
    let ops = joint_operators(sys, &syms);
    let subject = if syms.is_empty() {
        sys.name.clone()
    } else {
        format!("{}+{}", sys.name, sym_names.join("+"))
    };
    let check = match point {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Resolution(format!("cannot read {}: {}", path.display(), e)))?;
            let mut pt = parse_point(&text, sys)?;
            let sym = SymbolicMatrix::new(&ops, sys);
            pt.complete(
                sym.coefficient_atoms(),
                &mut ChaCha8Rng::seed_from_u64(seed),
            );
            let rep = char_report_matrix(sym.evaluate(&pt)?);
            char_check(sys, &subject, &rep)
        }
        None => {
            let (rep, _) = char_report_seeded(&ops, sys, seed)?;
            let mut codims = Vec::new();
            for k in 0..5 {
                codims.push(char_report_seeded(&ops, sys, seed.wrapping_add(k))?.0.codim);
            }
            char_check(sys, &subject, &rep).cert("seed_codims", codims)
        }
    };
    report.checks.push(check);
    Ok(EXIT_OK)
}

fn run_bracket(
    model: &Model,
    kind: BracketKind,
    name: &str,
    texts: &[String],
    report: &mut Report,
) -> Result<i32> {
    let sys = system(model, name)?;
    let ops: Vec<Expr> = if texts.is_empty() {
        sys.equations.iter().map(|e| e.expression()).collect()
    } else {
        texts
            .iter()
            .map(|t| dsl::parse_expr(t, sys))
            .collect::<Result<_>>()?
    };
    let want = match kind {
        BracketKind::Jacobi | BracketKind::Mayer => 2,
        BracketKind::Multi => sys.m() + 1,
    };
    if ops.len() != want {
        return Err(Error::ArityMismatch {
            expected: want,
            got: ops.len(),
        });
    }
    let order = |e: &Expr| e.jet_order().unwrap_or(0);
    let (label, value, extra) = match kind {
        BracketKind::Jacobi => ("Jacobi", jacobi_bracket(&ops[0], &ops[1], sys)?, None),
        BracketKind::Multi => ("MultiBracket", multi_bracket(&ops, sys)?, None),
        BracketKind::Mayer => {
            let (v, used) = mayer_bracket(&ops[0], &ops[1], sys)?;
            (
                "Mayer",
                v,
                Some((used, (order(&ops[0]) + order(&ops[1])).saturating_sub(1))),
            )
        }
    };
    let operands: Vec<String> = ops.iter().map(|e| e.to_string()).collect();
    let mut check = Check::new(
        label,
        &sys.name,
        if value.is_zero() { "zero" } else { "nonzero" },
    )
    .cert("operands", operands)
    .cert("expr", value.to_string())
    .cert("order", value.jet_order());
    if let Some((used, bound)) = extra {
        check = check.cert("order_audit", used).cert("order_bound", bound);
    }
    report.checks.push(check);
    Ok(EXIT_OK)
}

fn run_syzygy(
    model: &Model,
    name: &str,
    order_bound: Option<u32>,
    seed: u64,
    report: &mut Report,
) -> Result<i32> {
    let sys = system(model, name)?;
    let ops: Vec<Expr> = sys.equations.iter().map(|e| e.expression()).collect();
    let (mx, _) = symbol_at_seed(&ops, sys, seed, crate::chargeo::DEFAULT_RETRIES)?;
    let names = cotangent_names(sys);
    let gens: Vec<Value> = syzygy_module(&mx.rows, sys.n())
        .iter()
        .map(|g| Value::from(g.iter().map(|p| p.fmt_with(&names)).collect::<Vec<_>>()))
        .collect();
    report
        .checks
        .push(Check::new("SymbolSyzygies", &sys.name, "computed").cert("generators", gens));
    let opts = Options {
        seed,
        order_bound,
        ..Options::default()
    };
    let v = check_syzygy_residues(sys, &opts);
    let code = if v.result == Outcome::Incompatible {
        EXIT_INCOMPATIBLE
    } else {
        EXIT_OK
    };
    report.checks.push(Check::from_verdict(&sys.name, &v));
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn run_flags(
    model: &Model,
    name: &str,
    depth: usize,
    points: usize,
    cauchy: Option<&str>,
    level: usize,
    seed: u64,
    report: &mut Report,
) -> Result<i32> {
    let decl = model
        .distribution(name)
        .ok_or_else(|| Error::Resolution(format!("unknown distribution '{}'", name)))?;
    let d = &decl.dist;
    let fr = derived_flag_seeded(d, seed, points, depth)?;
    let per_seed: Vec<Value> = fr
        .per_seed
        .iter()
        .map(|(s, g)| json!({"seed": s, "growth": g}))
        .collect();
    report.checks.push(
        Check::new(
            "DerivedFlag",
            name,
            if fr.consistent {
                "consistent"
            } else {
                "point-dependent"
            },
        )
        .cert("growth", fr.growth.clone())
        .cert("per_seed", per_seed),
    );
    if let Some(sub_name) = cauchy {
        let sub = &model
            .distribution(sub_name)
            .ok_or_else(|| Error::Resolution(format!("unknown distribution '{}'", sub_name)))?
            .dist;
        if level == 0 {
            return Err(Error::Resolution("flag levels start at 1".into()));
        }
        let flag = derived_distributions(d, level)?;
        let target = flag
            .get(level - 1)
            .unwrap_or_else(|| flag.last().expect("derived flag is nonempty"));
        let mut answers = Vec::new();
        let mut s = seed;
        let budget = points * 20;
        while answers.len() < points && s < seed.wrapping_add(budget as u64) {
            match is_cauchy_subdistribution(sub, target, &target.random_point(s)) {
                Ok(b) => answers.push(json!({"seed": s, "cauchy": b})),
                Err(Error::DegeneratePoint(_)) => {}
                Err(e) => return Err(e),
            }
            s += 1;
        }
        let all = answers.iter().all(|a| a["cauchy"] == json!(true));
        let none = answers.iter().all(|a| a["cauchy"] == json!(false));
        let result = if answers.is_empty() {
            "undetermined"
        } else if all {
            "cauchy"
        } else if none {
            "not-cauchy"
        } else {
            "point-dependent"
        };
        report.checks.push(
            Check::new("Cauchy", format!("{}/{}", sub_name, name), result)
                .cert("level", level)
                .cert("per_seed", answers),
        );
    }
    Ok(EXIT_OK)
}

fn run_verify(
    model: &Model,
    only: Option<&str>,
    opts: &VerifyOptions,
    with_mutations: bool,
    report: &mut Report,
) -> Result<i32> {
    let sols: Vec<_> = match only {
        Some(n) => vec![model
            .solution(n)
            .ok_or_else(|| Error::Resolution(format!("unknown solution '{}'", n)))?],
        None => model.solutions.iter().collect(),
    };
    let mut code = EXIT_OK;
    for sol in sols {
        let sys = system(model, &sol.system)?;
        let r = verify(sys, sol, opts)?;
        if !r.passed {
            code = EXIT_VERIFY_FAILED;
        }
        let residues: Vec<Value> = r
            .residues
            .iter()
            .map(|(k, e)| json!({"pair": k, "expr": e.to_string()}))
            .collect();
        let mut check = Check::new("Verify", &sol.name, if r.passed { "pass" } else { "fail" })
            .cert("mode", r.mode.name())
            .cert("residues", residues)
            .cert("max_residual", r.max_residual)
            .cert("max_scale", r.max_scale)
            .cert("samples", r.samples);
        check.notes = r.notes.clone();
        report.checks.push(check);
        if with_mutations {
            let outcomes = mutation_report(sys, sol, opts)?;
            let survivors: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.rejected)
                .map(|o| o.label.clone())
                .collect();
            if !survivors.is_empty() {
                code = EXIT_VERIFY_FAILED;
            }
            report.checks.push(
                Check::new(
                    "Mutations",
                    &sol.name,
                    if survivors.is_empty() {
                        "all-rejected"
                    } else {
                        "survivors"
                    },
                )
                .cert("total", outcomes.len())
                .cert("survivors", survivors),
            );
        }
    }
    Ok(code)
}
