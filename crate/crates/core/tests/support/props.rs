//! Randomized invariants shared by the property and acceptance targets.

#![allow(dead_code)]

use jetbracket::algebra::groebner::{groebner, is_groebner, normal_form, s_polynomial};
use jetbracket::algebra::poly::{Monomial, Poly};
use jetbracket::brackets::{jacobi_bracket, multi_bracket};
use jetbracket::chargeo::{char_report_matrix, SymbolMatrix};
use jetbracket::expr::{Atom, Expr, NumericEnv};
use jetbracket::jet::{PDESystem, Ranking, RankingScheme};
use jetbracket::Rational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn scalar_system() -> PDESystem {
    PDESystem::new("s", &["x", "y"], &["u"])
}

/// Jets of `u` in two variables, indexed by a small integer.
fn pool(s: &PDESystem) -> Vec<Expr> {
    vec![
        s.var(0),
        s.var(1),
        s.jet(0, &[0, 0]),
        s.jet(0, &[1, 0]),
        s.jet(0, &[0, 1]),
        s.jet(0, &[2, 0]),
        s.jet(0, &[1, 1]),
        s.jet(0, &[0, 2]),
    ]
}

/// `c·lead + Σ c_k·a_k·b_k` with a nonzero leading jet of order ≥ 1.
fn operator(s: &PDESystem, lead: usize, lc: i64, terms: &[(i64, usize, usize)]) -> Expr {
    let p = pool(s);
    let mut e = Expr::int(lc) * p[3 + lead % 5].clone();
    for &(c, a, b) in terms {
        e = e + Expr::int(c) * p[a % p.len()].clone() * p[b % p.len()].clone();
    }
    e
}

fn op_strategy() -> impl Strategy<Value = (usize, i64, Vec<(i64, usize, usize)>)> {
    (
        0usize..5,
        prop_oneof![-3i64..=-1, 1i64..=3],
        prop::collection::vec((-3i64..=3, 0usize..8, 0usize..8), 0..3),
    )
}

pub type Op = (usize, i64, Vec<(i64, usize, usize)>);

pub fn op_pair() -> impl Strategy<Value = (Op, Op)> {
    (op_strategy(), op_strategy())
}

pub fn jacobi_antisymmetric_with_order_bound((f, g): (Op, Op)) -> Result<(), TestCaseError> {
    let s = scalar_system();
    let f = operator(&s, f.0, f.1, &f.2);
    let g = operator(&s, g.0, g.1, &g.2);
    let fg = jacobi_bracket(&f, &g, &s).unwrap();
    let gf = jacobi_bracket(&g, &f, &s).unwrap();
    prop_assert_eq!(&fg, &(-gf));
    let k = f.jet_order().unwrap();
    let l = g.jet_order().unwrap();
    prop_assert!(fg.jet_order().unwrap_or(0) < k + l);
    Ok(())
}

pub fn multi_bracket_specializes_to_jacobi((f, g): (Op, Op)) -> Result<(), TestCaseError> {
    let s = scalar_system();
    let f = operator(&s, f.0, f.1, &f.2);
    let g = operator(&s, g.0, g.1, &g.2);
    prop_assert_eq!(
        multi_bracket(&[f.clone(), g.clone()], &s).unwrap(),
        jacobi_bracket(&f, &g, &s).unwrap()
    );
    Ok(())
}

pub fn triple() -> impl Strategy<Value = Vec<Vec<(i64, usize, usize)>>> {
    prop::collection::vec(
        prop::collection::vec((-2i64..=2, 0usize..8, 0usize..8), 1..3),
        3,
    )
}

pub fn multi_bracket_totally_antisymmetric(
    ops: Vec<Vec<(i64, usize, usize)>>,
) -> Result<(), TestCaseError> {
    let s = PDESystem::new("p", &["x", "y"], &["u", "v"]);
    let atoms = [
        s.var(0),
        s.jet(0, &[0, 0]),
        s.jet(1, &[0, 0]),
        s.jet(0, &[1, 0]),
        s.jet(1, &[1, 0]),
        s.jet(0, &[0, 1]),
        s.jet(1, &[0, 1]),
        s.jet(0, &[1, 1]),
    ];
    let build = |ts: &Vec<(i64, usize, usize)>, shift: usize| -> Expr {
        let mut e = atoms[3 + shift].clone();
        for &(c, a, b) in ts {
            e = e + Expr::int(c) * atoms[a].clone() * atoms[b].clone();
        }
        e
    };
    let (a, b, c) = (build(&ops[0], 0), build(&ops[1], 1), build(&ops[2], 2));
    let abc = multi_bracket(&[a.clone(), b.clone(), c.clone()], &s).unwrap();
    prop_assert_eq!(
        &multi_bracket(&[b.clone(), a.clone(), c.clone()], &s).unwrap(),
        &(-abc.clone())
    );
    prop_assert_eq!(
        &multi_bracket(&[a.clone(), c.clone(), b.clone()], &s).unwrap(),
        &(-abc.clone())
    );
    prop_assert_eq!(&multi_bracket(&[c, b, a], &s).unwrap(), &(-abc));
    Ok(())
}

fn kdv() -> PDESystem {
    let mut s = PDESystem::new("kdv", &["t", "x"], &["u"]);
    s.ranking = Ranking {
        scheme: RankingScheme::Lex,
        priority: vec![0, 1],
    };
    let rhs = s.jet(0, &[0, 0]) * s.jet(0, &[0, 1]) + s.jet(0, &[0, 3]);
    let lead = s.jet_atom(0, jetbracket::expr::MultiIndex(vec![1, 0]));
    s.push_solved("E", lead, rhs);
    s
}

fn kdv_poly(s: &PDESystem, terms: &[(i64, usize, usize)]) -> Expr {
    let p = [
        s.var(1),
        s.jet(0, &[0, 0]),
        s.jet(0, &[0, 1]),
        s.jet(0, &[1, 0]),
        s.jet(0, &[1, 1]),
        s.jet(0, &[0, 2]),
        s.jet(0, &[2, 0]),
        s.jet(0, &[1, 2]),
    ];
    terms
        .iter()
        .map(|&(c, a, b)| Expr::int(c) * p[a].clone() * p[b].clone())
        .sum()
}

/// Terms `c * p_i * p_j` over a fixed pool of jet atoms.
pub type KdvTerms = Vec<(i64, usize, usize)>;

fn kdv_terms() -> impl Strategy<Value = KdvTerms> {
    prop::collection::vec((-3i64..=3, 0usize..8, 0usize..8), 1..4)
}

pub fn kdv_pair() -> impl Strategy<Value = (KdvTerms, KdvTerms)> {
    (kdv_terms(), kdv_terms())
}

pub fn reduction_is_idempotent_and_a_ring_map(
    (a, b): (KdvTerms, KdvTerms),
) -> Result<(), TestCaseError> {
    let s = kdv();
    let (p, r) = (kdv_poly(&s, &a), kdv_poly(&s, &b));
    let rp = s.reduce(&p).unwrap();
    let rr = s.reduce(&r).unwrap();
    prop_assert_eq!(&s.reduce(&rp).unwrap(), &rp);
    prop_assert_eq!(
        s.reduce(&(p.clone() + r.clone())).unwrap(),
        rp.clone() + rr.clone()
    );
    prop_assert_eq!(
        s.reduce(&(p.clone() * r.clone())).unwrap(),
        s.reduce(&(rp.clone() * rr)).unwrap()
    );
    let dp = s.total_derivative(&p, 0);
    prop_assert_eq!(
        s.reduce(&dp).unwrap(),
        s.reduce(&s.total_derivative(&rp, 0)).unwrap()
    );
    prop_assert!(rp
        .jet_atoms()
        .iter()
        .all(|a| a.jet_parts().is_none_or(|(_, i)| i.0[0] == 0)));
    Ok(())
}

fn poly_from(n: usize, terms: &[(i64, Vec<u32>)]) -> Poly {
    let mut p = Poly::zero(n);
    for (c, e) in terms {
        p.add_term(Monomial(e.clone()), q(*c));
    }
    p
}

pub type Gens = Vec<Vec<(i64, Vec<u32>)>>;

pub fn generators() -> impl Strategy<Value = Gens> {
    prop::collection::vec(
        prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..3, 3)), 1..4),
        1..4,
    )
}

pub fn s_polynomials_reduce_to_zero(gens: Gens) -> Result<(), TestCaseError> {
    let gens: Vec<Poly> = gens
        .iter()
        .map(|g| poly_from(3, g))
        .filter(|p| !p.is_zero())
        .collect();
    let basis = groebner(&gens, 3);
    prop_assert!(is_groebner(&basis));
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            prop_assert!(normal_form(&s_polynomial(&basis[i], &basis[j]), &basis).is_zero());
        }
    }
    for g in &gens {
        prop_assert!(normal_form(g, &basis).is_zero());
    }
    Ok(())
}

/// Homogeneous polynomial of degree `d` in `n` variables from picks of
/// coefficient and variable indices.
fn homogeneous(n: usize, d: u32, picks: &[(i64, Vec<usize>)]) -> Poly {
    let mut p = Poly::zero(n);
    for (c, vars) in picks {
        let mut e = vec![0u32; n];
        for k in 0..d as usize {
            e[vars[k % vars.len()] % n] += 1;
        }
        p.add_term(Monomial(e), q(*c));
    }
    p
}

fn picks() -> impl Strategy<Value = Vec<(i64, Vec<usize>)>> {
    prop::collection::vec((-2i64..=2, prop::collection::vec(0usize..4, 2)), 0..3)
}

fn symbol(n: usize, rows: Vec<Vec<Poly>>) -> SymbolMatrix {
    let (r, m) = (rows.len(), rows[0].len());
    SymbolMatrix {
        n,
        rows,
        row_weights: vec![0; r],
        col_weights: vec![0; m],
    }
}

pub type Excess = ((usize, usize), Vec<u32>, Vec<Vec<(i64, Vec<usize>)>>);

pub fn excess_case() -> impl Strategy<Value = Excess> {
    (
        prop_oneof![
            Just((1usize, 1usize)),
            Just((2, 1)),
            Just((3, 1)),
            Just((2, 2)),
            Just((3, 2)),
            Just((4, 2)),
            Just((3, 3))
        ],
        prop::collection::vec(1u32..3, 4),
        prop::collection::vec(picks(), 12),
    )
}

pub fn codim_bounded_by_excess((shape, degs, entries): Excess) -> Result<(), TestCaseError> {
    let (r, m) = shape;
    let n = 4;
    let rows: Vec<Vec<Poly>> = (0..r)
        .map(|i| {
            (0..m)
                .map(|a| homogeneous(n, degs[i], &entries[i * 3 + a]))
                .collect()
        })
        .collect();
    let rep = char_report_matrix(symbol(n, rows));
    prop_assume!(!rep.empty);
    prop_assert!(
        rep.codim < r + 2 - m,
        "codim {} for r = {}, m = {}",
        rep.codim,
        r,
        m
    );
    Ok(())
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], n: usize) -> Vec<Vec<Poly>> {
    let m = b.len();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..m).fold(Poly::zero(n), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// `I + c·e_{ij}`; its inverse is `I - c·e_{ij}`.
fn elementary(m: usize, n: usize, i: usize, j: usize, c: i64) -> Vec<Vec<Poly>> {
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    if a == b {
                        Poly::one(n)
                    } else if a == i && b == j {
                        Poly::constant(n, q(c))
                    } else {
                        Poly::zero(n)
                    }
                })
                .collect()
        })
        .collect()
}

fn diagonal(diag: Vec<Poly>, n: usize) -> Vec<Vec<Poly>> {
    let m = diag.len();
    let mut out = vec![vec![Poly::zero(n); m]; m];
    for (k, d) in diag.into_iter().enumerate() {
        out[k][k] = d;
    }
    out
}

pub type Commuting = (
    usize,
    Vec<(usize, usize, i64)>,
    Vec<Vec<(i64, Vec<usize>)>>,
    Vec<Vec<(i64, Vec<usize>)>>,
    bool,
);

pub fn commuting_case() -> impl Strategy<Value = Commuting> {
    (
        2usize..4,
        prop::collection::vec((0usize..3, 0usize..3, 1i64..3), 1..4),
        prop::collection::vec(picks(), 3),
        prop::collection::vec(picks(), 3),
        any::<bool>(),
    )
}

pub fn commuting_pairs_have_codim_at_most_m(
    (m, shears, pdiag, qdiag, square): Commuting,
) -> Result<(), TestCaseError> {
    let n = 4;
    let mut s = diagonal(vec![Poly::one(n); m], n);
    let mut s_inv = s.clone();
    for &(i, j, c) in &shears {
        let (i, j) = (i % m, j % m);
        if i == j {
            continue;
        }
        s = mat_mul(&s, &elementary(m, n, i, j, c), n);
        s_inv = mat_mul(&elementary(m, n, i, j, -c), &s_inv, n);
    }
    let dp: Vec<Poly> = (0..m).map(|k| homogeneous(n, 1, &pdiag[k])).collect();
    let p = mat_mul(&mat_mul(&s, &diagonal(dp, n), n), &s_inv, n);
    let qm = if square {
        mat_mul(&p, &p, n)
    } else {
        let dq: Vec<Poly> = (0..m).map(|k| homogeneous(n, 2, &qdiag[k])).collect();
        mat_mul(&mat_mul(&s, &diagonal(dq, n), n), &s_inv, n)
    };
    prop_assert_eq!(mat_mul(&p, &qm, n), mat_mul(&qm, &p, n));
    let mut rows = p.clone();
    rows.extend(qm);
    let rep = char_report_matrix(symbol(n, rows));
    prop_assume!(!rep.empty);
    prop_assert!(rep.codim <= m, "codim {} exceeds m = {}", rep.codim, m);
    Ok(())
}

pub fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        (-3i64..=3).prop_map(Expr::int)
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin().exp()),
            (inner.clone(), inner).prop_map(|(a, b)| a.try_div(&(Expr::int(2) + b.sin())).unwrap()),
        ]
    })
}

pub fn fd_case() -> impl Strategy<Value = (Expr, f64, f64)> {
    (expr_strategy(), -1.0f64..1.0, -1.0f64..1.0)
}

pub fn partial_derivative_matches_finite_differences(
    (e, x0, y0): (Expr, f64, f64),
) -> Result<(), TestCaseError> {
    let x = Atom::var("x");
    let at = |xv: f64| {
        let mut env = NumericEnv::new();
        env.set(x.clone(), xv);
        env.set(Atom::var("y"), y0);
        env
    };
    let exact = e.diff(&x).eval(&at(x0)).unwrap();
    let h = 1e-5;
    let fd = (e.eval(&at(x0 + h)).unwrap() - e.eval(&at(x0 - h)).unwrap()) / (2.0 * h);
    prop_assert!(
        (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
        "{} vs {} for {}",
        fd,
        exact,
        e
    );
    Ok(())
}
