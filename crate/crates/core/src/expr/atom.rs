use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use super::Expr;

/// Multi-index over the independent variables, ordered graded-lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub fn raised(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self − other`, if componentwise nonnegative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.divides(self) {
            Some(MultiIndex(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// All multi-indices of length `n` with order at most `max`.
    pub fn all_up_to(n: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if i == cur.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, max, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Variable names repeated by multiplicity, e.g. `x,x,t`.
    pub fn spelled(&self, vars: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        for (i, e) in self.0.iter().enumerate() {
            for _ in 0..*e {
                out.push(vars[i].clone());
            }
        }
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elementary {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "exp" => Some(Elementary::Exp),
            "log" => Some(Elementary::Log),
            "sin" => Some(Elementary::Sin),
            "cos" => Some(Elementary::Cos),
            _ => None,
        }
    }
}

/// The unknowns of the expression kernel.  Variant order fixes the canonical
/// atom order: independent variables, parameters, jet coordinates, opaque
/// function applications, elementary function nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Var(String),
    Param(String),
    Jet {
        dep: usize,
        name: String,
        index: MultiIndex,
        vars: Arc<[String]>,
    },
    Func {
        name: String,
        deriv: Vec<u32>,
        args: Vec<Expr>,
    },
    Elem {
        fun: Elementary,
        arg: Expr,
    },
}

/// Shared handle to an [`AtomKind`].
#[derive(Clone, Debug)]
pub struct Atom(Arc<AtomKind>);

impl Atom {
    pub fn new(kind: AtomKind) -> Self {
        Atom(Arc::new(kind))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Atom::new(AtomKind::Var(name.into()))
    }

    pub fn param(name: impl Into<String>) -> Self {
        Atom::new(AtomKind::Param(name.into()))
    }

    pub fn jet(
        dep: usize,
        name: impl Into<String>,
        index: MultiIndex,
        vars: Arc<[String]>,
    ) -> Self {
        assert_eq!(
            index.len(),
            vars.len(),
            "multi-index length must match the independent variables"
        );
        Atom::new(AtomKind::Jet {
            dep,
            name: name.into(),
            index,
            vars,
        })
    }

    pub fn func(name: impl Into<String>, deriv: Vec<u32>, args: Vec<Expr>) -> Self {
        assert_eq!(deriv.len(), args.len(), "derivative counter per argument");
        Atom::new(AtomKind::Func {
            name: name.into(),
            deriv,
            args,
        })
    }

    pub fn kind(&self) -> &AtomKind {
        &self.0
    }

    /// Leaf atoms carry no sub-expressions.
    pub fn is_leaf(&self) -> bool {
        matches!(
            &*self.0,
            AtomKind::Var(_) | AtomKind::Param(_) | AtomKind::Jet { .. }
        )
    }

    pub fn is_jet(&self) -> bool {
        matches!(&*self.0, AtomKind::Jet { .. })
    }

    pub fn jet_parts(&self) -> Option<(usize, &MultiIndex)> {
        match &*self.0 {
            AtomKind::Jet { dep, index, .. } => Some((*dep, index)),
            _ => None,
        }
    }

    /// Same dependent variable with a different multi-index.
    pub fn with_index(&self, new_index: MultiIndex) -> Atom {
        match &*self.0 {
            AtomKind::Jet {
                dep, name, vars, ..
            } => Atom::jet(*dep, name.clone(), new_index, vars.clone()),
            _ => panic!("with_index on a non-jet atom"),
        }
    }
}

impl Deref for Atom {
    type Target = AtomKind;
    fn deref(&self) -> &AtomKind {
        &self.0
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Atom {}

// Content hash, consistent with the content equality above.
impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            AtomKind::Var(n) | AtomKind::Param(n) => f.write_str(n),
            AtomKind::Jet {
                name, index, vars, ..
            } => {
                if index.is_zero() {
                    f.write_str(name)
                } else {
                    write!(f, "{}[{}]", name, index.spelled(vars).join(","))
                }
            }
            AtomKind::Func { name, deriv, args } => {
                f.write_str(name)?;
                if args.len() == 1 {
                    for _ in 0..deriv[0] {
                        f.write_str("'")?;
                    }
                } else if deriv.iter().any(|d| *d > 0) {
                    let ds: Vec<String> = deriv.iter().map(|d| d.to_string()).collect();
                    write!(f, "'{{{}}}", ds.join(","))?;
                }
                let a: Vec<String> = args.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", a.join(", "))
            }
            AtomKind::Elem { fun, arg } => write!(f, "{}({})", fun.name(), arg),
        }
    }
}
