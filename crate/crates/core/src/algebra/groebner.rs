//! Buchberger's algorithm for ideals and for submodules of free modules
//! (position-over-term order), with representation tracking for syzygies.

use std::collections::BTreeSet;

use super::poly::{Monomial, Poly};
use crate::Rational;

/// Element of a free module `R^rank`.
pub type ModuleElement = Vec<Poly>;

/// Leading term under position-over-term: the first nonzero component wins.
fn lead(v: &[Poly]) -> Option<(usize, &Monomial, &Rational)> {
    v.iter()
        .enumerate()
        .find(|(_, p)| !p.is_zero())
        .map(|(i, p)| {
            let (m, c) = p.leading().unwrap();
            (i, m, c)
        })
}

fn is_zero_vec(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

fn vec_sub(a: &[Poly], b: &[Poly]) -> ModuleElement {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_add(a: &[Poly], b: &[Poly]) -> ModuleElement {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_mul_term(v: &[Poly], m: &Monomial, c: &Rational) -> ModuleElement {
    v.iter().map(|p| p.mul_term(m, c)).collect()
}

fn vec_mul_poly(v: &[Poly], p: &Poly) -> ModuleElement {
    v.iter().map(|x| x * p).collect()
}

fn zero_vec(len: usize, nvars: usize) -> ModuleElement {
    vec![Poly::zero(nvars); len]
}

/// A Gröbner basis of a submodule, optionally tracking how each basis element
/// is expressed in the original generators.
#[derive(Clone, Debug)]
pub struct ModuleGb {
    nvars: usize,
    rank: usize,
    basis: Vec<ModuleElement>,
}

/// Reduction of `v` by `basis`: remainder plus the multipliers used.
struct Reduction {
    remainder: ModuleElement,
    quotients: Vec<Poly>,
}

fn reduce_full(v: &[Poly], basis: &[ModuleElement], nvars: usize) -> Reduction {
    let mut p: ModuleElement = v.to_vec();
    let mut rem = zero_vec(v.len(), nvars);
    let mut quotients = vec![Poly::zero(nvars); basis.len()];
    'outer: while let Some((pos, m, c)) = lead(&p).map(|(i, m, c)| (i, m.clone(), c.clone())) {
        for (k, g) in basis.iter().enumerate() {
            if let Some((gpos, gm, gc)) = lead(g) {
                if gpos == pos && gm.divides(&m) {
                    let tm = m.div(gm);
                    let tc = &c / gc;
                    p = vec_sub(&p, &vec_mul_term(g, &tm, &tc));
                    quotients[k].add_term(tm, tc);
                    continue 'outer;
                }
            }
        }
        // move the leading term to the remainder
        let lt = Poly::term(nvars, m.clone(), c.clone());
        p[pos] = &p[pos] - &lt;
        rem[pos] = &rem[pos] + &lt;
    }
    Reduction {
        remainder: rem,
        quotients,
    }
}

struct Tracked {
    elems: Vec<ModuleElement>,
    syzygies: Vec<ModuleElement>,
}

/// Buchberger with normal pair selection (smallest lcm first).  When
/// tracking representations no pair is discarded, so that every S-pair
/// reduction yields a lifted syzygy; otherwise the coprime and chain
/// criteria prune pairs.
fn buchberger_tracked(gens: &[ModuleElement], nvars: usize, track: bool) -> Tracked {
    let s = gens.len();
    let mut elems: Vec<ModuleElement> = Vec::new();
    let mut reps: Vec<ModuleElement> = Vec::new();
    let mut syzygies = Vec::new();
    let unit = |j: usize| -> ModuleElement {
        let mut e = zero_vec(s, nvars);
        e[j] = Poly::one(nvars);
        e
    };
    for (j, g) in gens.iter().enumerate() {
        if !is_zero_vec(g) {
            elems.push(g.clone());
            reps.push(if track { unit(j) } else { Vec::new() });
        }
    }
    let leads = |elems: &[ModuleElement], k: usize| {
        lead(&elems[k]).map(|(a, b, _)| (a, b.clone())).unwrap()
    };
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..elems.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    while !pending.is_empty() {
        let &(i, j) = pending
            .iter()
            .min_by(|a, b| {
                let la = leads(&elems, a.0).1.lcm(&leads(&elems, a.1).1);
                let lb = leads(&elems, b.0).1.lcm(&leads(&elems, b.1).1);
                la.cmp(&lb).then_with(|| a.cmp(b))
            })
            .unwrap();
        pending.remove(&(i, j));
        let (pi, mi, ci) = lead(&elems[i])
            .map(|(a, b, c)| (a, b.clone(), c.clone()))
            .unwrap();
        let (pj, mj, cj) = lead(&elems[j])
            .map(|(a, b, c)| (a, b.clone(), c.clone()))
            .unwrap();
        if pi != pj {
            continue;
        }
        let l = mi.lcm(&mj);
        if !track {
            if mi.mul(&mj) == l {
                // coprime leading monomials: S-polynomial reduces to zero
                continue;
            }
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            let chain = (0..elems.len()).any(|k| {
                k != i
                    && k != j
                    && !pending.contains(&key(i, k))
                    && !pending.contains(&key(j, k))
                    && {
                        let (pk, mk) = leads(&elems, k);
                        pk == pi && mk.divides(&l)
                    }
            });
            if chain {
                continue;
            }
        }
        let ti = l.div(&mi);
        let tj = l.div(&mj);
        let fi = ci.recip();
        let fj = cj.recip();
        let spoly = vec_sub(
            &vec_mul_term(&elems[i], &ti, &fi),
            &vec_mul_term(&elems[j], &tj, &fj),
        );
        let red = reduce_full(&spoly, &elems, nvars);
        let mut rep = Vec::new();
        if track {
            rep = vec_sub(
                &vec_mul_term(&reps[i], &ti, &fi),
                &vec_mul_term(&reps[j], &tj, &fj),
            );
            for (k, q) in red.quotients.iter().enumerate() {
                if !q.is_zero() {
                    rep = vec_sub(&rep, &vec_mul_poly(&reps[k], q));
                }
            }
        }
        if is_zero_vec(&red.remainder) {
            if track && !is_zero_vec(&rep) {
                syzygies.push(rep);
            }
        } else {
            let inv = lead(&red.remainder).unwrap().2.recip();
            let k = elems.len();
            elems.push(red.remainder.iter().map(|p| p.scale(&inv)).collect());
            reps.push(rep.iter().map(|p| p.scale(&inv)).collect());
            for i2 in 0..k {
                pending.insert((i2, k));
            }
        }
    }
    if track {
        // relations f_j - Σ B_kj g_k
        for (j, g) in gens.iter().enumerate() {
            let red = reduce_full(g, &elems, nvars);
            debug_assert!(is_zero_vec(&red.remainder));
            let mut rel = unit(j);
            for (k, q) in red.quotients.iter().enumerate() {
                if !q.is_zero() {
                    rel = vec_sub(&rel, &vec_mul_poly(&reps[k], q));
                }
            }
            if !is_zero_vec(&rel) {
                syzygies.push(rel);
            }
        }
    }
    Tracked { elems, syzygies }
}

fn monic_vec(v: &[Poly]) -> ModuleElement {
    match lead(v) {
        None => v.to_vec(),
        Some((_, _, c)) => {
            let inv = c.recip();
            v.iter().map(|p| p.scale(&inv)).collect()
        }
    }
}

fn interreduce(elems: Vec<ModuleElement>, nvars: usize) -> Vec<ModuleElement> {
    // drop elements whose leading term is divisible by another's
    let mut keep: Vec<ModuleElement> = Vec::new();
    let mut sorted = elems;
    sorted.sort_by(|a, b| {
        let la = lead(a).unwrap();
        let lb = lead(b).unwrap();
        lb.0.cmp(&la.0).then_with(|| la.1.cmp(lb.1))
    });
    for e in sorted {
        let (pe, me, _) = lead(&e).unwrap();
        let redundant = keep.iter().any(|k| {
            let (pk, mk, _) = lead(k).unwrap();
            pk == pe && mk.divides(me)
        });
        if !redundant {
            let (pe, me) = (pe, me.clone());
            keep.retain(|k| {
                let (pk, mk, _) = lead(k).unwrap();
                !(pk == pe && me.divides(mk))
            });
            keep.push(e);
        }
    }
    // tail reduction
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<ModuleElement> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        let red = reduce_full(&keep[i], &others, nvars);
        out.push(monic_vec(&red.remainder));
    }
    out.sort_by(|a, b| {
        let la = lead(a).unwrap();
        let lb = lead(b).unwrap();
        la.0.cmp(&lb.0).then_with(|| lb.1.cmp(la.1))
    });
    out
}

impl ModuleGb {
    /// Reduced Gröbner basis of the submodule generated by `gens`.
    pub fn new(gens: &[ModuleElement], rank: usize, nvars: usize) -> Self {
        assert!(
            gens.iter().all(|g| g.len() == rank),
            "module element rank mismatch"
        );
        let t = buchberger_tracked(gens, nvars, false);
        ModuleGb {
            nvars,
            rank,
            basis: interreduce(t.elems, nvars),
        }
    }

    pub fn basis(&self) -> &[ModuleElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn normal_form(&self, v: &[Poly]) -> ModuleElement {
        reduce_full(v, &self.basis, self.nvars).remainder
    }

    pub fn contains(&self, v: &[Poly]) -> bool {
        is_zero_vec(&self.normal_form(v))
    }
}

/// Reduced Gröbner basis (grevlex) of an ideal.
pub fn groebner(gens: &[Poly], nvars: usize) -> Vec<Poly> {
    let vecs: Vec<ModuleElement> = gens.iter().map(|g| vec![g.clone()]).collect();
    ModuleGb::new(&vecs, 1, nvars)
        .basis
        .into_iter()
        .map(|mut v| v.pop().unwrap())
        .collect()
}

/// Normal form of `p` modulo a Gröbner basis.
pub fn normal_form(p: &Poly, basis: &[Poly]) -> Poly {
    let b: Vec<ModuleElement> = basis.iter().map(|g| vec![g.clone()]).collect();
    reduce_full(std::slice::from_ref(p), &b, p.nvars())
        .remainder
        .pop()
        .unwrap()
}

/// S-polynomial of two polynomials (zero if either vanishes).
pub fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let n = f.nvars();
    match (f.leading(), g.leading()) {
        (Some((mf, cf)), Some((mg, cg))) => {
            let l = mf.lcm(mg);
            let a = f.mul_term(&l.div(mf), &cf.recip());
            let b = g.mul_term(&l.div(mg), &cg.recip());
            &a - &b
        }
        _ => Poly::zero(n),
    }
}

/// Generators of the first syzygy module of `rows`: all `S` with
/// `Σ S_i·rows_i = 0`.  The list is pruned to drop generators lying in the
/// span of the ones already kept.
pub fn syzygy_module(rows: &[ModuleElement], nvars: usize) -> Vec<ModuleElement> {
    if rows.is_empty() {
        return Vec::new();
    }
    let rank = rows[0].len();
    assert!(
        rows.iter().all(|r| r.len() == rank),
        "rows of unequal length"
    );
    let t = buchberger_tracked(rows, nvars, true);
    let mut cands: Vec<ModuleElement> =
        t.syzygies.into_iter().filter(|v| !is_zero_vec(v)).collect();
    cands.sort_by(|a, b| {
        vec_degree(a)
            .cmp(&vec_degree(b))
            .then_with(|| vec_terms(a).cmp(&vec_terms(b)))
    });
    let s = rows.len();
    let mut kept: Vec<ModuleElement> = Vec::new();
    for c in cands {
        let gb = ModuleGb::new(&kept, s, nvars);
        let nf = gb.normal_form(&c);
        if !is_zero_vec(&nf) {
            kept.push(monic_vec(&c));
        }
    }
    kept
}

fn vec_degree(v: &[Poly]) -> u32 {
    v.iter().filter_map(|p| p.total_degree()).max().unwrap_or(0)
}

fn vec_terms(v: &[Poly]) -> usize {
    v.iter().map(|p| p.num_terms()).sum()
}

/// `Σ s_i·rows_i`.
pub fn apply_syzygy(s: &[Poly], rows: &[ModuleElement], nvars: usize) -> ModuleElement {
    let rank = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut acc = zero_vec(rank, nvars);
    for (c, r) in s.iter().zip(rows) {
        acc = vec_add(&acc, &vec_mul_poly(r, c));
    }
    acc
}

/// Result of a dimension computation for a homogeneous ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codim {
    pub codim: usize,
    /// The projective variety is empty (affine cone is at most the origin).
    pub empty: bool,
}

/// Krull dimension of `R/I` from maximal independent sets of the leading
/// term ideal; `None` for the unit ideal.
pub fn krull_dim(basis: &[Poly], nvars: usize) -> Option<usize> {
    if basis.iter().any(|p| !p.is_zero() && p.is_constant()) {
        return None;
    }
    let lms: Vec<&Monomial> = basis.iter().filter_map(|p| p.leading_monomial()).collect();
    let mut best = 0;
    for mask in 0u32..(1u32 << nvars) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let independent = lms
            .iter()
            .all(|m| m.support().any(|v| mask & (1 << v) == 0));
        if independent {
            best = size;
        }
    }
    Some(best)
}

/// Codimension of the projective variety of a homogeneous ideal, with the
/// empty variety reported as codimension `nvars`.
pub fn codim(gens: &[Poly], nvars: usize) -> Codim {
    if gens.iter().all(|g| g.is_zero()) {
        return Codim {
            codim: 0,
            empty: nvars == 0,
        };
    }
    let gb = groebner(gens, nvars);
    match krull_dim(&gb, nvars) {
        None | Some(0) => Codim {
            codim: nvars,
            empty: true,
        },
        Some(d) => Codim {
            codim: nvars - d,
            empty: false,
        },
    }
}

pub fn determinant(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let k = m.len();
    match k {
        0 => Poly::one(nvars),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = Poly::zero(nvars);
            for j in 0..k {
                if m[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * &determinant(&sub, nvars);
                acc = if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
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
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All `size × size` minors, rows and columns in lexicographic order.
pub fn minors(m: &[Vec<Poly>], size: usize, nvars: usize) -> Vec<Poly> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    assert!(
        size <= rows.min(cols),
        "minor size exceeds matrix dimensions"
    );
    let mut out = Vec::new();
    for rs in combinations(rows, size) {
        for cs in combinations(cols, size) {
            let sub: Vec<Vec<Poly>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect())
                .collect();
            out.push(determinant(&sub, nvars));
        }
    }
    out
}

/// Checks that every S-polynomial of `basis` reduces to zero.
pub fn is_groebner(basis: &[Poly]) -> bool {
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            if !normal_form(&s_polynomial(&basis[i], &basis[j]), basis).is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, t: &[(&[u32], i64)]) -> Poly {
        Poly::from_int_terms(n, t)
    }

    fn twisted_cubic() -> Vec<Poly> {
        // ξ1ξ3 − ξ2², ξ1ξ2 − ξ0ξ3, ξ0ξ2 − ξ1²
        vec![
            p(4, &[(&[0, 1, 0, 1], 1), (&[0, 0, 2, 0], -1)]),
            p(4, &[(&[0, 1, 1, 0], 1), (&[1, 0, 0, 1], -1)]),
            p(4, &[(&[1, 0, 1, 0], 1), (&[0, 2, 0, 0], -1)]),
        ]
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let gens = vec![
            p(2, &[(&[2, 0], 1)]),
            p(2, &[(&[1, 1], 1)]),
            p(2, &[(&[0, 2], 1)]),
        ];
        let gb = groebner(&gens, 2);
        assert_eq!(gb.len(), 3);
        for g in &gens {
            assert!(gb.contains(g));
        }
    }

    #[test]
    fn twisted_cubic_basis_and_membership() {
        let gb = groebner(&twisted_cubic(), 4);
        assert_eq!(gb.len(), 3);
        assert!(gb.iter().all(|g| g.total_degree() == Some(2)));
        assert!(is_groebner(&gb));
        // ξ0ξ2ξ3 − ξ1ξ2²
        let f = p(4, &[(&[1, 0, 1, 1], 1), (&[0, 1, 2, 0], -1)]);
        assert!(normal_form(&f, &gb).is_zero());
        assert_eq!(
            codim(&twisted_cubic(), 4),
            Codim {
                codim: 2,
                empty: false
            }
        );
    }

    #[test]
    fn unit_ideal() {
        let gb = groebner(&[Poly::one(2)], 2);
        assert_eq!(gb, vec![Poly::one(2)]);
        assert!(codim(&[Poly::one(2)], 2).empty);
    }

    #[test]
    fn codim_examples() {
        assert_eq!(
            codim(&[p(2, &[(&[3, 0], 1)])], 2),
            Codim {
                codim: 1,
                empty: false
            }
        );
        assert_eq!(
            codim(&[Poly::var(2, 0), Poly::var(2, 1)], 2),
            Codim {
                codim: 2,
                empty: true
            }
        );
        assert_eq!(codim(&[Poly::zero(3)], 3).codim, 0);
    }

    #[test]
    fn koszul_syzygy() {
        let rows = vec![vec![Poly::var(2, 0)], vec![Poly::var(2, 1)]];
        let syz = syzygy_module(&rows, 2);
        assert_eq!(syz, vec![vec![Poly::var(2, 1), -&Poly::var(2, 0)]]);
    }

    #[test]
    fn single_row_has_no_syzygy() {
        let rows = vec![vec![p(2, &[(&[1, 1], 1)])]];
        assert!(syzygy_module(&rows, 2).is_empty());
    }

    #[test]
    fn twisted_cubic_syzygies() {
        let rows: Vec<ModuleElement> = twisted_cubic().into_iter().map(|g| vec![g]).collect();
        let syz = syzygy_module(&rows, 4);
        assert_eq!(syz.len(), 2);
        for s in &syz {
            assert!(apply_syzygy(s, &rows, 4).iter().all(|p| p.is_zero()));
        }
        let expected = vec![
            vec![Poly::var(4, 1), Poly::var(4, 2), Poly::var(4, 3)],
            vec![Poly::var(4, 0), Poly::var(4, 1), Poly::var(4, 2)],
        ];
        let got = ModuleGb::new(&syz, 3, 4);
        let exp = ModuleGb::new(&expected, 3, 4);
        assert!(expected.iter().all(|e| got.contains(e)));
        assert!(syz.iter().all(|s| exp.contains(s)));
    }

    #[test]
    fn minors_of_identity_and_zero() {
        let id = vec![
            vec![Poly::one(1), Poly::zero(1)],
            vec![Poly::zero(1), Poly::one(1)],
        ];
        assert_eq!(minors(&id, 2, 1), vec![Poly::one(1)]);
        let z = vec![vec![Poly::zero(1); 2]; 2];
        assert!(minors(&z, 1, 1).iter().all(|p| p.is_zero()));
    }

    #[test]
    fn stacked_ab_symbol_minors() {
        // rows (ξη, 0), (ξη, ξ), (ξη, 0), (ξη, ξ)
        let xe = p(2, &[(&[1, 1], 1)]);
        let x = Poly::var(2, 0);
        let z = Poly::zero(2);
        let m = vec![
            vec![xe.clone(), z.clone()],
            vec![xe.clone(), x.clone()],
            vec![xe.clone(), z.clone()],
            vec![xe.clone(), x.clone()],
        ];
        let x2e = p(2, &[(&[2, 1], 1)]);
        for d in minors(&m, 2, 2) {
            assert!(d.is_zero() || d == x2e || d == -&x2e);
        }
        let c = codim(&minors(&m, 2, 2), 2);
        assert_eq!(c.codim, 1);
        assert_eq!(groebner(&minors(&m, 2, 2), 2), vec![x2e]);
    }
}
