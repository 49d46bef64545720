//! Linearizations, symbols and brackets of differential operators.

use std::collections::BTreeMap;

use crate::algebra::poly::{Monomial, Poly};
use crate::expr::{Atom, Expr, MultiIndex};
use crate::jet::PDESystem;
use crate::{Error, Rational, Result};

/// Scalar 𝒞-differential operator on `m` components:
/// `v ↦ Σ_a Σ_σ coeff[a][σ] · D_σ(v^a)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CDiffRow {
    pub comps: Vec<BTreeMap<MultiIndex, Expr>>,
}

impl CDiffRow {
    pub fn zero(m: usize) -> Self {
        CDiffRow {
            comps: vec![BTreeMap::new(); m],
        }
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_empty())
    }

    pub fn coeff(&self, a: usize, sigma: &MultiIndex) -> Expr {
        self.comps[a].get(sigma).cloned().unwrap_or_default()
    }

    fn add_coeff(&mut self, a: usize, sigma: MultiIndex, c: Expr) {
        let e = self.comps[a].remove(&sigma).unwrap_or_default();
        let s = &e + &c;
        if !s.is_zero() {
            self.comps[a].insert(sigma, s);
        }
    }

    /// Order in the `a`-th component, `None` if that component vanishes.
    pub fn component_order(&self, a: usize) -> Option<u32> {
        self.comps[a].keys().map(|s| s.order()).max()
    }

    pub fn order(&self) -> Option<u32> {
        (0..self.m()).filter_map(|a| self.component_order(a)).max()
    }

    pub fn add(&self, other: &CDiffRow) -> CDiffRow {
        let mut out = self.clone();
        for (a, c) in other.comps.iter().enumerate() {
            for (s, e) in c {
                out.add_coeff(a, s.clone(), e.clone());
            }
        }
        out
    }

    pub fn scale(&self, f: &Expr) -> CDiffRow {
        let mut out = CDiffRow::zero(self.m());
        for (a, c) in self.comps.iter().enumerate() {
            for (s, e) in c {
                out.add_coeff(a, s.clone(), e * f);
            }
        }
        out
    }

    /// Applies the `a`-th component to a scalar function.
    pub fn apply_component(&self, a: usize, h: &Expr, sys: &PDESystem) -> Expr {
        self.comps[a]
            .iter()
            .map(|(s, c)| c * &sys.total_derivative_multi(h, s))
            .sum()
    }

    /// Applies the row to a vector of functions.
    pub fn apply(&self, v: &[Expr], sys: &PDESystem) -> Result<Expr> {
        if v.len() != self.m() {
            return Err(Error::ArityMismatch {
                expected: self.m(),
                got: v.len(),
            });
        }
        Ok((0..self.m())
            .map(|a| self.apply_component(a, &v[a], sys))
            .sum())
    }

    /// The composite `D_i ∘ self`.
    pub fn compose_total_derivative(&self, i: usize, sys: &PDESystem) -> CDiffRow {
        let mut out = CDiffRow::zero(self.m());
        for (a, c) in self.comps.iter().enumerate() {
            for (s, e) in c {
                out.add_coeff(a, s.clone(), sys.total_derivative(e, i));
                out.add_coeff(a, s.raised(i), e.clone());
            }
        }
        out
    }

    /// Degree-`d` part `Σ_{|σ|=d} coeff[a][σ] ξ^σ` of component `a`.
    pub fn symbol_part(&self, a: usize, d: u32) -> SymbolPoly {
        SymbolPoly {
            terms: self.comps[a]
                .iter()
                .filter(|(s, _)| s.order() == d)
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }
}

/// Homogeneous polynomial in the cotangent variables with symbolic
/// coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SymbolPoly {
    pub terms: BTreeMap<MultiIndex, Expr>,
}

impl SymbolPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates coefficients at a point given by atom values.
    pub fn evaluate(&self, n: usize, point: &BTreeMap<Atom, Expr>) -> Result<Poly> {
        let mut p = Poly::zero(n);
        for (s, c) in &self.terms {
            let v = c.substitute(point)?;
            let r = v.as_rational().ok_or_else(|| {
                Error::DegeneratePoint(format!("coefficient {} is not determined by the point", v))
            })?;
            p.add_term(Monomial(s.0.clone()), r);
        }
        Ok(p)
    }

    /// Coefficients are free of jet and other atoms.
    pub fn constant(&self, n: usize) -> Option<Poly> {
        let mut p = Poly::zero(n);
        for (s, c) in &self.terms {
            p.add_term(Monomial(s.0.clone()), c.as_rational()?);
        }
        Some(p)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(s, c)| {
                let mono: Vec<String> =
                    s.0.iter()
                        .enumerate()
                        .filter(|(_, e)| **e > 0)
                        .map(|(i, e)| {
                            if *e == 1 {
                                names[i].clone()
                            } else {
                                format!("{}^{}", names[i], e)
                            }
                        })
                        .collect();
                if mono.is_empty() {
                    format!("({})", c)
                } else {
                    format!("({})*{}", c, mono.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Principal symbol of a scalar operator: top-degree part per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRow {
    pub degree: u32,
    pub entries: Vec<SymbolPoly>,
}

impl PolyRow {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Row over ℚ at a point, with a flag when the top part vanishes there.
    pub fn evaluate(&self, n: usize, point: &BTreeMap<Atom, Expr>) -> Result<(Vec<Poly>, bool)> {
        let ps: Vec<Poly> = self
            .entries
            .iter()
            .map(|e| e.evaluate(n, point))
            .collect::<Result<_>>()?;
        let vanished = ps.iter().all(|p| p.is_zero());
        Ok((ps, vanished))
    }
}

/// Linearization `ℓ_F`, with coefficient `∂F/∂u^a_σ` on `D_σ` of component `a`.
pub fn linearize(f: &Expr, sys: &PDESystem) -> CDiffRow {
    let mut row = CDiffRow::zero(sys.m());
    let vars = sys.vars_arc();
    for a in f.jet_atoms() {
        if let crate::expr::AtomKind::Jet { vars: jv, .. } = a.kind() {
            if **jv != *vars {
                continue;
            }
        }
        let (d, s) = a.jet_parts().expect("jet atom");
        if d >= sys.m() {
            continue;
        }
        let c = f.diff(&a);
        if !c.is_zero() {
            row.add_coeff(d, s.clone(), c);
        }
    }
    row
}

pub fn principal_symbol(f: &Expr, sys: &PDESystem) -> PolyRow {
    let row = linearize(f, sys);
    let degree = row.order().unwrap_or(0);
    PolyRow {
        degree,
        entries: (0..sys.m()).map(|a| row.symbol_part(a, degree)).collect(),
    }
}

fn require_scalar(sys: &PDESystem) -> Result<()> {
    if sys.m() != 1 {
        return Err(Error::NotScalar(sys.m()));
    }
    Ok(())
}

/// `{F, G} = ℓ_F(G) − ℓ_G(F)` for scalar systems.
pub fn jacobi_bracket(f: &Expr, g: &Expr, sys: &PDESystem) -> Result<Expr> {
    require_scalar(sys)?;
    let lf = linearize(f, sys);
    let lg = linearize(g, sys);
    Ok(&lf.apply_component(0, g, sys) - &lg.apply_component(0, f, sys))
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        let n = used.len();
        if cur.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                rec(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Multi-bracket of `m+1` scalar operators on `m` dependent variables:
/// `(1/m!) Σ_{α,β} (−1)^α (−1)^β ℓ_{α(1)}(F_{β(1)}) ∘ … ∘ ℓ_{α(m)}(F_{β(m)}) (F_{β(m+1)})`.
pub fn multi_bracket(ops: &[Expr], sys: &PDESystem) -> Result<Expr> {
    let m = sys.m();
    if ops.len() != m + 1 {
        return Err(Error::ArityMismatch {
            expected: m + 1,
            got: ops.len(),
        });
    }
    let rows: Vec<CDiffRow> = ops.iter().map(|f| linearize(f, sys)).collect();
    let mut total = Expr::zero();
    let mut memo: BTreeMap<(Vec<usize>, Vec<usize>), Expr> = BTreeMap::new();
    for (alpha, sa) in permutations(m) {
        for (beta, sb) in permutations(m + 1) {
            // innermost operator first
            let mut val = ops[beta[m]].clone();
            for k in (0..m).rev() {
                let key = (alpha[k..].to_vec(), beta[k..].to_vec());
                if let Some(v) = memo.get(&key) {
                    val = v.clone();
                    continue;
                }
                val = rows[beta[k]].apply_component(alpha[k], &val, sys);
                memo.insert(key, val.clone());
            }
            let term = val.scale(&Rational::from_integer((sa * sb).into()));
            total = &total + &term;
        }
    }
    let fact: i64 = (1..=m as i64).product();
    Ok(total.scale(&Rational::new(1.into(), fact.into())))
}

/// Jacobi bracket reduced modulo the prolonged system, with the jet order
/// consumed by the reduction.
pub fn mayer_bracket(f: &Expr, g: &Expr, sys: &PDESystem) -> Result<(Expr, u32)> {
    let b = jacobi_bracket(f, g, sys)?;
    let mut red = sys.reducer();
    let r = red.reduce(&b)?;
    Ok((r, red.order_used()))
}

/// Reduced multi-bracket with the consumed jet order.
pub fn reduced_multi_bracket(ops: &[Expr], sys: &PDESystem) -> Result<(Expr, u32)> {
    let b = multi_bracket(ops, sys)?;
    let mut red = sys.reducer();
    let r = red.reduce(&b)?;
    Ok((r, red.order_used()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// Reduced residue per equation.
    pub residues: Vec<(String, Expr)>,
}

/// Checks a generating function against every equation: the reduced Jacobi
/// bracket in the scalar case, the reduced action `ℓ_F(S)` otherwise.
pub fn is_symmetry(s: &[Expr], sys: &PDESystem) -> Result<SymmetryCheck> {
    if s.len() != sys.m() {
        return Err(Error::ArityMismatch {
            expected: sys.m(),
            got: s.len(),
        });
    }
    sys.validate_orthonomic()?;
    let mut red = sys.reducer();
    let mut residues = Vec::new();
    for eq in &sys.equations {
        let f = eq.expression();
        let raw = if sys.m() == 1 {
            jacobi_bracket(&f, &s[0], sys)?
        } else {
            linearize(&f, sys).apply(s, sys)?
        };
        residues.push((eq.name.clone(), red.reduce(&raw)?));
    }
    Ok(SymmetryCheck {
        holds: residues.iter().all(|(_, r)| r.is_zero()),
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Ranking, RankingScheme};

    fn kdv() -> PDESystem {
        let mut s = PDESystem::new("kdv", &["t", "x"], &["u"]);
        s.ranking = Ranking {
            scheme: RankingScheme::Lex,
            priority: vec![0, 1],
        };
        let rhs = s.jet(0, &[0, 0]) * s.jet(0, &[0, 1]) + s.jet(0, &[0, 3]);
        s.push_solved("E", s.jet_atom(0, MultiIndex(vec![1, 0])), rhs);
        s
    }

    #[test]
    fn linearize_kdv() {
        let s = kdv();
        let f = s.equations[0].expression();
        let row = linearize(&f, &s);
        assert_eq!(row.coeff(0, &MultiIndex(vec![0, 0])), -s.jet(0, &[0, 1]));
        assert_eq!(row.coeff(0, &MultiIndex(vec![0, 1])), -s.jet(0, &[0, 0]));
        assert_eq!(row.coeff(0, &MultiIndex(vec![1, 0])), Expr::one());
        assert_eq!(row.coeff(0, &MultiIndex(vec![0, 3])), Expr::int(-1));
        let sym = principal_symbol(&f, &s);
        assert_eq!(sym.degree, 3);
        assert_eq!(
            sym.entries[0].constant(2).unwrap(),
            Poly::from_int_terms(2, &[(&[0, 3], -1)])
        );
    }

    #[test]
    fn jacobi_examples() {
        let s = PDESystem::new("s", &["x", "y"], &["u"]);
        let u = s.jet(0, &[0, 0]);
        let uxx = s.jet(0, &[2, 0]);
        let ux = s.jet(0, &[1, 0]);
        assert!(jacobi_bracket(&uxx, &ux, &s).unwrap().is_zero());
        assert!(jacobi_bracket(&(&uxx - &(&u * &u)), &ux, &s)
            .unwrap()
            .is_zero());
        let b = jacobi_bracket(&uxx, &(&u * &s.jet(0, &[0, 1])), &s).unwrap();
        assert_eq!(b, Expr::int(2) * &ux * s.jet(0, &[1, 1]));
    }

    #[test]
    fn mayer_incompatible() {
        let mut s = PDESystem::new("s", &["x", "y"], &["u"]);
        let u = s.jet(0, &[0, 0]);
        s.push_solved("A", s.jet_atom(0, MultiIndex(vec![1, 0])), u.clone());
        s.push_solved("B", s.jet_atom(0, MultiIndex(vec![0, 1])), &s.var(0) * &u);
        let f = s.equations[0].expression();
        let g = s.equations[1].expression();
        let (r, k) = mayer_bracket(&f, &g, &s).unwrap();
        assert_eq!(r, -u);
        assert!(k <= 1);
    }

    #[test]
    fn multi_bracket_examples() {
        let s = PDESystem::new("s", &["x", "y"], &["u", "v"]);
        let ux = s.jet(0, &[1, 0]);
        let vy = s.jet(1, &[0, 1]);
        let w = s.jet(0, &[0, 1]) + s.jet(1, &[1, 0]);
        assert!(multi_bracket(&[ux.clone(), vy.clone(), w], &s)
            .unwrap()
            .is_zero());
        assert!(multi_bracket(&[ux.clone(), ux.clone(), vy.clone()], &s)
            .unwrap()
            .is_zero());
        assert!(matches!(
            multi_bracket(&[ux], &s),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn multi_bracket_specializes() {
        let s = PDESystem::new("s", &["x", "y"], &["u"]);
        let f = s.jet(0, &[2, 0]);
        let g = &s.jet(0, &[0, 0]) * &s.jet(0, &[0, 1]);
        assert_eq!(
            multi_bracket(&[f.clone(), g.clone()], &s).unwrap(),
            jacobi_bracket(&f, &g, &s).unwrap()
        );
    }

    #[test]
    fn kdv_symmetries() {
        let s = kdv();
        let gamma = &s.var(0) * &s.jet(0, &[0, 1]) + Expr::one();
        assert!(is_symmetry(&[gamma], &s).unwrap().holds);
        let chk = is_symmetry(&[s.jet(0, &[0, 0])], &s).unwrap();
        assert!(!chk.holds);
        assert_eq!(chk.residues[0].1, -(s.jet(0, &[0, 0]) * s.jet(0, &[0, 1])));
        let r = Expr::int(3) * s.var(0) * s.jet(0, &[1, 0])
            + s.var(1) * s.jet(0, &[0, 1])
            + Expr::int(2) * s.jet(0, &[0, 0]);
        let (res, _) = mayer_bracket(&s.equations[0].expression(), &r, &s).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn not_scalar() {
        let s = PDESystem::new("s", &["x"], &["u", "v"]);
        let e = s.jet(0, &[1]);
        assert!(matches!(
            jacobi_bracket(&e, &e, &s),
            Err(Error::NotScalar(2))
        ));
    }
}
