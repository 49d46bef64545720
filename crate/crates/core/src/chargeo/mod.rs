//! Symbol matrices at jet points and characteristic ideals.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::groebner::{codim, groebner, minors, Codim};
use crate::algebra::poly::Poly;
use crate::brackets::{linearize, SymbolPoly};
use crate::expr::{Atom, Expr};
use crate::jet::PDESystem;
use crate::{Error, Rational, Result};

pub const DEFAULT_RETRIES: usize = 8;

/// Rational bindings for independents, parameters, jet coordinates and any
/// other atoms a symbol needs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct JetPoint {
    pub values: BTreeMap<Atom, Rational>,
    pub seed: Option<u64>,
}

impl JetPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, a: Atom, v: Rational) {
        self.values.insert(a, v);
    }

    pub fn as_expr_map(&self) -> BTreeMap<Atom, Expr> {
        self.values
            .iter()
            .map(|(a, v)| (a.clone(), Expr::rational(v.clone())))
            .collect()
    }

    /// Adds random values for atoms not yet bound.
    pub fn complete(&mut self, atoms: impl IntoIterator<Item = Atom>, rng: &mut ChaCha8Rng) {
        for a in atoms {
            self.values.entry(a).or_insert_with(|| random_rational(rng));
        }
    }
}

pub(crate) fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut num: i64 = 0;
    while num == 0 {
        num = rng.gen_range(-9..=9);
    }
    let den: i64 = rng.gen_range(1..=9);
    Rational::new(num.into(), den.into())
}

/// Reproducible point binding independents, parameters and all jet
/// coordinates up to `order`.
pub fn random_jet_point(sys: &PDESystem, order: u32, seed: u64) -> JetPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pt = JetPoint {
        values: BTreeMap::new(),
        seed: Some(seed),
    };
    fill_point(sys, order, &mut pt, &mut rng);
    pt
}

fn fill_point(sys: &PDESystem, order: u32, pt: &mut JetPoint, rng: &mut ChaCha8Rng) {
    let mut atoms: Vec<Atom> = sys.independents().iter().map(Atom::var).collect();
    atoms.extend(sys.params.iter().map(Atom::param));
    atoms.extend(sys.jets_up_to(order));
    pt.complete(atoms, rng);
}

/// Symbolic symbol matrix with Douglis–Nirenberg weights: entry `(i, a)` is
/// the degree `s_i + t_a` part of `ℓ_{F_i}` in component `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicMatrix {
    pub n: usize,
    pub entries: Vec<Vec<SymbolPoly>>,
    pub row_weights: Vec<i64>,
    pub col_weights: Vec<i64>,
}

impl SymbolicMatrix {
    pub fn new(ops: &[Expr], sys: &PDESystem) -> Self {
        let rows: Vec<_> = ops.iter().map(|f| linearize(f, sys)).collect();
        let m = sys.m();
        let ord: Vec<Vec<Option<i64>>> = rows
            .iter()
            .map(|r| {
                (0..m)
                    .map(|a| r.component_order(a).map(i64::from))
                    .collect()
            })
            .collect();
        let col_weights: Vec<i64> = (0..m)
            .map(|a| ord.iter().filter_map(|r| r[a]).max().unwrap_or(0))
            .collect();
        let row_weights: Vec<i64> = ord
            .iter()
            .map(|r| {
                (0..m)
                    .filter_map(|a| r[a].map(|o| o - col_weights[a]))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let entries = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (0..m)
                    .map(|a| {
                        let d = row_weights[i] + col_weights[a];
                        if d < 0 {
                            SymbolPoly::default()
                        } else {
                            r.symbol_part(a, d as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        SymbolicMatrix {
            n: sys.n(),
            entries,
            row_weights,
            col_weights,
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    /// Atoms appearing in the coefficients.
    pub fn coefficient_atoms(&self) -> Vec<Atom> {
        let mut out = std::collections::BTreeSet::new();
        for row in &self.entries {
            for e in row {
                for c in e.terms.values() {
                    out.extend(c.atoms());
                }
            }
        }
        out.into_iter().collect()
    }

    /// Coefficients are all rational constants.
    pub fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .all(|r| r.iter().all(|e| e.constant(self.n).is_some()))
    }

    /// Evaluates at a point; fails if a nonzero symbolic coefficient vanishes.
    pub fn evaluate(&self, pt: &JetPoint) -> Result<SymbolMatrix> {
        let map = pt.as_expr_map();
        let mut rows = Vec::with_capacity(self.entries.len());
        for (i, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (a, e) in row.iter().enumerate() {
                let p = e.evaluate(self.n, &map)?;
                if p.num_terms() != e.terms.len() {
                    return Err(Error::DegeneratePoint(format!(
                        "symbol entry ({}, {}) loses a term at this point",
                        i + 1,
                        a + 1
                    )));
                }
                out.push(p);
            }
            rows.push(out);
        }
        Ok(SymbolMatrix {
            n: self.n,
            rows,
            row_weights: self.row_weights.clone(),
            col_weights: self.col_weights.clone(),
        })
    }
}

/// Symbol matrix over ℚ.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub n: usize,
    pub rows: Vec<Vec<Poly>>,
    pub row_weights: Vec<i64>,
    pub col_weights: Vec<i64>,
}

impl SymbolMatrix {
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.col_weights.len()
    }

    /// Ideal of `k × k` minors; size 0 gives the unit ideal.
    pub fn minor_ideal(&self, k: usize) -> Vec<Poly> {
        if k == 0 {
            return vec![Poly::one(self.n)];
        }
        if k > self.r().min(self.m()) {
            return Vec::new();
        }
        minors(&self.rows, k, self.n)
            .into_iter()
            .filter(|p| !p.is_zero())
            .collect()
    }
}

/// Evaluates the symbol of `ops` at a seeded generic point, retrying with
/// fresh draws from the same stream when a coefficient vanishes.
pub fn symbol_at_seed(
    ops: &[Expr],
    sys: &PDESystem,
    seed: u64,
    retries: usize,
) -> Result<(SymbolMatrix, JetPoint)> {
    let sym = SymbolicMatrix::new(ops, sys);
    let order = ops.iter().filter_map(|f| f.jet_order()).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..retries.max(1) {
        let mut pt = JetPoint {
            values: BTreeMap::new(),
            seed: Some(seed),
        };
        fill_point(sys, order, &mut pt, &mut rng);
        pt.complete(sym.coefficient_atoms(), &mut rng);
        match sym.evaluate(&pt) {
            Ok(m) => return Ok((m, pt)),
            Err(e @ Error::DegeneratePoint(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::DegeneratePoint("no sample".into())))
}

/// Symbol of the system equations at a given point.
pub fn symbol_matrix(sys: &PDESystem, pt: &JetPoint) -> Result<SymbolMatrix> {
    let ops: Vec<Expr> = sys.equations.iter().map(|e| e.expression()).collect();
    SymbolicMatrix::new(&ops, sys).evaluate(pt)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharReport {
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub matrix: SymbolMatrix,
    /// Reduced Gröbner basis of the `m`-minor ideal.
    pub ideal: Vec<Poly>,
    pub codim: usize,
    pub empty: bool,
    pub complete_intersection: bool,
    pub gci_rank_condition: bool,
    pub gci_codim_condition: bool,
    pub gci_corank_one: bool,
    /// Codimension of the `(m−1)`-minor ideal.
    pub lower_codim: usize,
}

impl CharReport {
    pub fn generalized_complete_intersection(&self) -> bool {
        self.gci_rank_condition && self.gci_codim_condition && self.gci_corank_one
    }
}

pub fn char_report_matrix(matrix: SymbolMatrix) -> CharReport {
    let (r, m, n) = (matrix.r(), matrix.m(), matrix.n);
    let gens = matrix.minor_ideal(m);
    let Codim { codim: c, empty } = codim(&gens, n);
    let ideal = if gens.is_empty() {
        Vec::new()
    } else {
        groebner(&gens, n)
    };
    let lower = codim(&matrix.minor_ideal(m.saturating_sub(1)), n);
    CharReport {
        r,
        m,
        n,
        ideal,
        codim: c,
        empty,
        complete_intersection: m == 1 && c == r,
        gci_rank_condition: m < r && r < n + m,
        gci_codim_condition: r + 1 >= m && c == r + 1 - m,
        gci_corank_one: lower.codim > c,
        lower_codim: lower.codim,
        matrix,
    }
}

pub fn char_report(sys: &PDESystem, pt: &JetPoint) -> Result<CharReport> {
    Ok(char_report_matrix(symbol_matrix(sys, pt)?))
}

/// Report for arbitrary operators at a seeded generic point.
pub fn char_report_seeded(
    ops: &[Expr],
    sys: &PDESystem,
    seed: u64,
) -> Result<(CharReport, JetPoint)> {
    let (mx, pt) = symbol_at_seed(ops, sys, seed, DEFAULT_RETRIES)?;
    Ok((char_report_matrix(mx), pt))
}

/// Codimensions at several seeds, for genericity checks.
pub fn codim_across_seeds(ops: &[Expr], sys: &PDESystem, seeds: &[u64]) -> Result<Vec<usize>> {
    seeds
        .iter()
        .map(|s| char_report_seeded(ops, sys, *s).map(|(r, _)| r.codim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MultiIndex;

    fn twisted() -> PDESystem {
        let mut s = PDESystem::new("cubic", &["x0", "x1", "x2", "x3"], &["u"]);
        let j = |s: &PDESystem, i: &[u32]| s.jet(0, i);
        let f1 = j(&s, &[0, 1, 0, 1]) - j(&s, &[0, 0, 2, 0]);
        let f2 = j(&s, &[0, 1, 1, 0]) - j(&s, &[1, 0, 0, 1]);
        let f3 = j(&s, &[1, 0, 1, 0]) - j(&s, &[0, 2, 0, 0]);
        s.push_equation("F1", f1, Expr::zero());
        s.push_equation("F2", f2, Expr::zero());
        s.push_equation("F3", f3, Expr::zero());
        s
    }

    #[test]
    fn twisted_cubic_report() {
        let s = twisted();
        let pt = random_jet_point(&s, 2, 42);
        let rep = char_report(&s, &pt).unwrap();
        assert_eq!(
            rep.matrix.rows[0][0],
            Poly::from_int_terms(4, &[(&[0, 1, 0, 1], 1), (&[0, 0, 2, 0], -1)])
        );
        assert_eq!(rep.codim, 2);
        assert!(!rep.complete_intersection);
    }

    #[test]
    fn kdv_with_scaling_is_complete_intersection() {
        let mut s = PDESystem::new("kdv", &["t", "x"], &["u"]);
        let rhs = s.jet(0, &[0, 0]) * s.jet(0, &[0, 1]) + s.jet(0, &[0, 3]);
        s.push_solved("E", s.jet_atom(0, MultiIndex(vec![1, 0])), rhs);
        let r = Expr::int(3) * s.var(0) * s.jet(0, &[1, 0])
            + s.var(1) * s.jet(0, &[0, 1])
            + Expr::int(2) * s.jet(0, &[0, 0]);
        let ops = vec![s.equations[0].expression(), r];
        let (rep, _) = char_report_seeded(&ops, &s, 42).unwrap();
        assert_eq!(rep.codim, 2);
        assert!(rep.empty);
        assert!(rep.complete_intersection);
    }

    #[test]
    fn gci_example() {
        let mut s = PDESystem::new("uv", &["x", "y", "z"], &["u", "v"]);
        s.push_equation(
            "A",
            s.jet(0, &[1, 0, 0]) + s.jet(1, &[0, 0, 1]),
            Expr::zero(),
        );
        s.push_equation(
            "B",
            s.jet(0, &[0, 1, 0]) + s.jet(1, &[1, 0, 0]),
            Expr::zero(),
        );
        s.push_equation(
            "C",
            s.jet(0, &[0, 0, 1]) + s.jet(1, &[0, 1, 0]),
            Expr::zero(),
        );
        let rep = char_report(&s, &JetPoint::new()).unwrap();
        assert_eq!(rep.codim, 2);
        assert_eq!(rep.lower_codim, 3);
        assert!(rep.generalized_complete_intersection());
    }

    #[test]
    fn seeded_points_are_reproducible() {
        let mut s = PDESystem::new("kdv", &["t", "x"], &["u"]);
        s.push_solved(
            "E",
            s.jet_atom(0, MultiIndex(vec![1, 0])),
            s.jet(0, &[0, 3]),
        );
        let a = random_jet_point(&s, 3, 42);
        let b = random_jet_point(&s, 3, 42);
        assert_eq!(a, b);
        assert!(a
            .values
            .contains_key(&s.jet_atom(0, MultiIndex(vec![0, 3]))));
        assert!(a.values.contains_key(&Atom::var("t")));
    }

    #[test]
    fn degenerate_point_is_rejected() {
        let mut s = PDESystem::new("s", &["x", "y"], &["u"]);
        s.push_equation(
            "A",
            &s.var(0) * &s.jet(0, &[1, 0]) + s.jet(0, &[0, 1]),
            Expr::zero(),
        );
        let mut pt = JetPoint::new();
        pt.bind(Atom::var("x"), Rational::from_integer(0.into()));
        assert!(matches!(
            symbol_matrix(&s, &pt),
            Err(Error::DegeneratePoint(_))
        ));
        assert!(symbol_at_seed(&[s.equations[0].expression()], &s, 7, 8).is_ok());
    }
}
