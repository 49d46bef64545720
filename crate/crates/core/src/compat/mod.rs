//! Compatibility verdicts assembled from the bracket and symbol criteria.

mod criteria;

use std::fmt;

pub use criteria::{
    check_diagonal_symbol, check_joint_codim_m, check_joint_scalar_ci, check_mayer_ci,
    check_multibracket_gci, check_reducible_product, check_syzygy_residues, compose,
    cross_residue_verdict, lift_syzygy, syzygy_residue,
};

use crate::brackets::{is_symmetry, SymmetryCheck};
use crate::chargeo::{char_report_seeded, CharReport};
use crate::expr::Expr;
use crate::jet::{OrthonomicReport, PDESystem, Symmetry};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    CrossResidues,
    MayerCI,
    MultiBracketGCI,
    ReducibleProduct,
    JointScalarCI,
    JointCodimM,
    DiagonalSymbol,
    SyzygyResidues,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::CrossResidues => "CrossResidues",
            Criterion::MayerCI => "MayerCI",
            Criterion::MultiBracketGCI => "MultiBracketGCI",
            Criterion::ReducibleProduct => "ReducibleProduct",
            Criterion::JointScalarCI => "JointScalarCI",
            Criterion::JointCodimM => "JointCodimM",
            Criterion::DiagonalSymbol => "DiagonalSymbol",
            Criterion::SyzygyResidues => "SyzygyResidues",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Compatible,
    Incompatible,
    Inconclusive,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Compatible => "compatible",
            Outcome::Incompatible => "incompatible",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueCert {
    pub pair: String,
    pub expr: Expr,
    pub order_used: Option<u32>,
    pub order_bound: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Certificates {
    pub codim: Option<usize>,
    /// Codimensions found at the extra genericity seeds.
    pub seed_codims: Vec<usize>,
    pub ideal: Vec<String>,
    pub residues: Vec<ResidueCert>,
    pub order_audit: Option<u32>,
    pub syzygies: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub criterion: Criterion,
    pub applicable: bool,
    pub result: Outcome,
    pub certificates: Certificates,
    pub notes: Vec<String>,
    pub seed: u64,
}

impl Verdict {
    pub fn new(criterion: Criterion, seed: u64) -> Self {
        Verdict {
            criterion,
            applicable: false,
            result: Outcome::Inconclusive,
            certificates: Certificates::default(),
            notes: Vec::new(),
            seed,
        }
    }

    pub(crate) fn not_applicable(mut self, note: impl Into<String>) -> Self {
        self.applicable = false;
        self.result = Outcome::Inconclusive;
        self.notes.push(note.into());
        self
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub seed: u64,
    /// Defaults to the maximal equation order plus two.
    pub order_bound: Option<u32>,
    /// Number of seeds used to confirm a codimension.
    pub genericity_seeds: usize,
    /// Compute the syzygy module certificate in the diagonal criterion.
    pub diagonal_syzygies: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 42,
            order_bound: None,
            genericity_seeds: 5,
            diagonal_syzygies: true,
        }
    }
}

impl Options {
    pub fn bound_for(&self, sys: &PDESystem) -> u32 {
        self.order_bound
            .unwrap_or_else(|| sys.default_order_bound())
    }

    pub(crate) fn seeds(&self) -> Vec<u64> {
        (0..self.genericity_seeds.max(1) as u64)
            .map(|k| self.seed.wrapping_add(k))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryStatus {
    pub name: String,
    pub check: Option<SymmetryCheck>,
    pub error: Option<String>,
}

impl SymmetryStatus {
    pub fn verified(&self) -> bool {
        self.check.as_ref().is_some_and(|c| c.holds)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub system: String,
    pub symmetries: Vec<String>,
    pub orthonomic: OrthonomicReport,
    pub symmetry_status: Vec<SymmetryStatus>,
    /// Characteristic data of the analyzed (possibly joint) system.
    pub char_report: Option<CharReport>,
    pub char_error: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub result: Outcome,
    pub seed: u64,
}

impl Analysis {
    pub fn decisive(&self) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .find(|v| v.result == self.result && v.result != Outcome::Inconclusive)
    }
}

/// Operators of the joint system: equations followed by symmetry components.
pub fn joint_operators(sys: &PDESystem, syms: &[Symmetry]) -> Vec<Expr> {
    let mut ops: Vec<Expr> = sys.equations.iter().map(|e| e.expression()).collect();
    for s in syms {
        ops.extend(s.components.iter().cloned());
    }
    ops
}

pub(crate) fn symmetry_statuses(sys: &PDESystem, syms: &[Symmetry]) -> Vec<SymmetryStatus> {
    syms.iter()
        .map(|s| match is_symmetry(&s.components, sys) {
            Ok(c) => SymmetryStatus {
                name: s.name.clone(),
                check: Some(c),
                error: None,
            },
            Err(e) => SymmetryStatus {
                name: s.name.clone(),
                check: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Overall outcome: any incompatibility certificate wins, then any
/// certified compatibility, else inconclusive.
pub fn aggregate(verdicts: &[Verdict]) -> Outcome {
    if verdicts.iter().any(|v| v.result == Outcome::Incompatible) {
        Outcome::Incompatible
    } else if verdicts.iter().any(|v| v.result == Outcome::Compatible) {
        Outcome::Compatible
    } else {
        Outcome::Inconclusive
    }
}

/// Runs every criterion that fits the request.  Without symmetries the
/// subject is the system itself; with symmetries it is the joint system,
/// and only the joint criteria may certify compatibility.
pub fn analyze(sys: &PDESystem, syms: &[Symmetry], opts: &Options) -> Result<Analysis> {
    let orthonomic = sys.orthonomic_report();
    let symmetry_status = symmetry_statuses(sys, syms);
    let ops = joint_operators(sys, syms);
    let (char_report, char_error) = match char_report_seeded(&ops, sys, opts.seed) {
        Ok((r, _)) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut verdicts = vec![cross_residue_verdict(sys, opts)];
    if syms.is_empty() {
        verdicts.push(check_mayer_ci(sys, opts));
        verdicts.push(check_multibracket_gci(sys, opts));
        verdicts.push(check_syzygy_residues(sys, opts));
    } else {
        // Base residues only matter for the joint system when they obstruct.
        if verdicts[0].result != Outcome::Incompatible {
            verdicts[0].applicable = false;
            verdicts[0].note("base-system residues do not decide the joint system");
        }
        verdicts.push(check_joint_scalar_ci(sys, syms, opts));
        verdicts.push(check_joint_codim_m(sys, syms, opts));
        verdicts.push(check_diagonal_symbol(sys, syms, opts));
    }
    let mut result = aggregate(&verdicts);
    if result == Outcome::Incompatible && verdicts.iter().any(|v| v.result == Outcome::Compatible) {
        for v in verdicts
            .iter_mut()
            .filter(|v| v.result == Outcome::Compatible)
        {
            v.note("overridden by an incompatibility certificate from another criterion");
        }
        result = Outcome::Incompatible;
    }
    Ok(Analysis {
        system: sys.name.clone(),
        symmetries: syms.iter().map(|s| s.name.clone()).collect(),
        orthonomic,
        symmetry_status,
        char_report,
        char_error,
        verdicts,
        result,
        seed: opts.seed,
    })
}
