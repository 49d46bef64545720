//! Text format for systems, symmetries, solutions and distributions.

mod lexer;
mod parser;

use std::fmt::Write;

use crate::dist::Distribution;
use crate::jet::{PDESystem, RankingScheme};
use crate::verify::{Mode, SolutionCandidate};
use crate::Result;

pub use lexer::{lex, Tok, Token};

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionDecl {
    pub dist: Distribution,
    /// Generator names, parallel to `dist.generators`.
    pub fields: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelOptions {
    pub seed: Option<u64>,
    pub order_bound: Option<u32>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
}

/// Everything declared in one input file.  Symmetries live on their
/// systems.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    pub systems: Vec<PDESystem>,
    pub solutions: Vec<SolutionCandidate>,
    pub distributions: Vec<DistributionDecl>,
    pub options: ModelOptions,
}

impl Model {
    pub fn system(&self, name: &str) -> Option<&PDESystem> {
        self.systems.iter().find(|s| s.name == name)
    }

    pub fn solution(&self, name: &str) -> Option<&SolutionCandidate> {
        self.solutions.iter().find(|s| s.name == name)
    }

    pub fn distribution(&self, name: &str) -> Option<&DistributionDecl> {
        self.distributions.iter().find(|d| d.dist.name == name)
    }
}

pub fn parse(text: &str) -> Result<Model> {
    parser::Parser::new(text)?.parse_model()
}

/// Parses one expression in the scope of `sys`.
pub fn parse_expr(text: &str, sys: &PDESystem) -> Result<crate::expr::Expr> {
    parser::parse_expr_in(text, sys)
}

fn print_relation(out: &mut String, indent: &str, r: &crate::expr::Relation) {
    let _ = writeln!(
        out,
        "{}relation {}{}({}) = {};",
        indent,
        r.func,
        "'".repeat(r.order as usize),
        r.dummy,
        r.rhs
    );
}

fn print_system(out: &mut String, s: &PDESystem) {
    let _ = writeln!(out, "system {} {{", s.name);
    let _ = writeln!(out, "  independent {};", s.independents().join(" "));
    let _ = writeln!(out, "  dependent {};", s.dependents.join(" "));
    if !s.params.is_empty() {
        let _ = writeln!(out, "  parameter {};", s.params.join(" "));
    }
    for o in &s.opaque {
        let _ = writeln!(out, "  opaque {}: {};", o.name, o.arity);
    }
    for r in &s.relations.rules {
        print_relation(out, "  ", r);
    }
    for e in &s.equations {
        let _ = writeln!(out, "  equation {}: {} = {};", e.name, e.lhs, e.rhs);
    }
    let scheme = match s.ranking.scheme {
        RankingScheme::Graded => "graded",
        RankingScheme::Lex => "lex",
    };
    let order: Vec<&str> = s
        .ranking
        .priority
        .iter()
        .map(|&i| s.independents()[i].as_str())
        .collect();
    let _ = writeln!(out, "  ranking {} {};", scheme, order.join(" "));
    out.push_str("}\n");
    for sym in &s.symmetries {
        let comps: Vec<String> = sym.components.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "symmetry {} on {}: {};",
            sym.name,
            s.name,
            comps.join(", ")
        );
    }
}

fn print_solution(out: &mut String, s: &SolutionCandidate) {
    let _ = writeln!(out, "solution {} for {} {{", s.name, s.system);
    match s.mode {
        Mode::Explicit => {
            if !s.params.is_empty() {
                let _ = writeln!(out, "  free {};", s.params.join(" "));
            }
        }
        Mode::ParametricSymbolic | Mode::ParametricNumeric => {
            let _ = writeln!(out, "  parametric {};", s.params.join(" "));
            if s.mode == Mode::ParametricNumeric {
                out.push_str("  numeric;\n");
            }
        }
    }
    for r in &s.relations.rules {
        print_relation(out, "  ", r);
    }
    for (t, v) in &s.bindings {
        let _ = writeln!(out, "  {} = {};", t, v);
    }
    out.push_str("}\n");
}

fn print_distribution(out: &mut String, d: &DistributionDecl) {
    let _ = writeln!(out, "distribution {} {{", d.dist.name);
    let _ = writeln!(out, "  chart {};", d.dist.chart().join(" "));
    for (name, g) in d.fields.iter().zip(&d.dist.generators) {
        let comps: Vec<String> = g.coeffs().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "  field {}: ({});", name, comps.join(", "));
    }
    out.push_str("}\n");
}

/// Canonical text of a model; parsing it reproduces the model.
pub fn pretty(m: &Model) -> String {
    let mut out = String::new();
    let o = &m.options;
    if let Some(s) = o.seed {
        let _ = writeln!(out, "option seed = {};", s);
    }
    if let Some(b) = o.order_bound {
        let _ = writeln!(out, "option order_bound = {};", b);
    }
    if let Some(t) = o.tol {
        let _ = writeln!(out, "option tol = {:e};", t);
    }
    if let Some(s) = o.samples {
        let _ = writeln!(out, "option samples = {};", s);
    }
    for s in &m.systems {
        out.push('\n');
        print_system(&mut out, s);
    }
    for s in &m.solutions {
        out.push('\n');
        print_solution(&mut out, s);
    }
    for d in &m.distributions {
        out.push('\n');
        print_distribution(&mut out, d);
    }
    out
}
