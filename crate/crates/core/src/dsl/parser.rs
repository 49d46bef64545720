use std::collections::BTreeMap;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{DistributionDecl, Model};
use crate::dist::{Distribution, VectorField};
use crate::expr::{Atom, Elementary, Expr, MultiIndex, Relation, Relations};
use crate::jet::{OpaqueDecl, PDESystem, Ranking, RankingScheme, Symmetry};
use crate::verify::{Mode, SolutionCandidate};
use crate::{Error, Rational, Result};

#[derive(Clone, Debug)]
enum Name {
    Var,
    Param,
    Dep(usize),
}

/// Names visible inside one expression context.
#[derive(Clone, Debug, Default)]
struct Scope {
    vars: Option<Arc<[String]>>,
    names: BTreeMap<String, Name>,
    funcs: BTreeMap<String, usize>,
    /// Unknown function names are accepted and recorded.
    open_funcs: bool,
}

impl Scope {
    fn system(sys: &PDESystem) -> Self {
        let mut names = BTreeMap::new();
        for x in sys.independents() {
            names.insert(x.clone(), Name::Var);
        }
        for p in &sys.params {
            names.insert(p.clone(), Name::Param);
        }
        for (a, d) in sys.dependents.iter().enumerate() {
            names.insert(d.clone(), Name::Dep(a));
        }
        Scope {
            vars: Some(sys.vars_arc()),
            names,
            funcs: sys
                .opaque
                .iter()
                .map(|o| (o.name.clone(), o.arity))
                .collect(),
            open_funcs: false,
        }
    }

    fn plain(vars: &[String]) -> Self {
        Scope {
            names: vars.iter().map(|v| (v.clone(), Name::Var)).collect(),
            open_funcs: true,
            ..Default::default()
        }
    }

    fn with_var(&self, v: &str) -> Self {
        let mut s = self.clone();
        s.names.insert(v.to_string(), Name::Var);
        s
    }
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> Error {
        let t = &self.toks[self.pos];
        Error::Parse {
            line: t.line,
            col: t.col,
            expected: format!("{}, found {}", expected, t.tok.describe()),
        }
    }

    fn resolution(&self, msg: String) -> Error {
        let t = &self.toks[self.pos.saturating_sub(1)];
        Error::Resolution(format!("line {}, column {}: {}", t.line, t.col, msg))
    }

    fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", c)))
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == k)
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.is_keyword(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<()> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", k)))
        }
    }

    fn expect_name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Name(n) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.err("a name")),
        }
    }

    fn expect_int(&mut self) -> Result<u64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                n.parse()
                    .map_err(|_| self.err("an integer that fits in 64 bits"))
            }
            _ => Err(self.err("an integer")),
        }
    }

    fn names_until_semicolon(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        while !self.is_sym(';') {
            out.push(self.expect_name()?);
        }
        self.advance();
        Ok(out)
    }

    pub fn parse_model(&mut self) -> Result<Model> {
        let mut m = Model::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(m),
                Tok::Name(k) if k == "system" => {
                    let s = self.system()?;
                    if m.system(&s.name).is_some() {
                        return Err(self.resolution(format!("system {} declared twice", s.name)));
                    }
                    m.systems.push(s);
                }
                Tok::Name(k) if k == "symmetry" => self.symmetry(&mut m)?,
                Tok::Name(k) if k == "solution" => {
                    let s = self.solution(&m)?;
                    if m.solution(&s.name).is_some() {
                        return Err(self.resolution(format!("solution {} declared twice", s.name)));
                    }
                    m.solutions.push(s);
                }
                Tok::Name(k) if k == "distribution" => {
                    let d = self.distribution()?;
                    if m.distribution(&d.dist.name).is_some() {
                        return Err(
                            self.resolution(format!("distribution {} declared twice", d.dist.name))
                        );
                    }
                    m.distributions.push(d);
                }
                Tok::Name(k) if k == "option" => self.option(&mut m)?,
                _ => {
                    return Err(
                        self.err("'system', 'symmetry', 'solution', 'distribution' or 'option'")
                    )
                }
            }
        }
    }

    fn option(&mut self, m: &mut Model) -> Result<()> {
        self.expect_keyword("option")?;
        let key = self.expect_name()?;
        self.expect_sym('=')?;
        match key.as_str() {
            "seed" => m.options.seed = Some(self.expect_int()?),
            "order_bound" => m.options.order_bound = Some(self.expect_int()? as u32),
            "samples" => m.options.samples = Some(self.expect_int()? as usize),
            "tol" => {
                let v = match self.advance() {
                    Tok::Int(s) | Tok::Float(s) => s.parse::<f64>().ok(),
                    _ => None,
                };
                m.options.tol = Some(v.ok_or_else(|| self.err("a number"))?);
            }
            other => return Err(self.resolution(format!("unknown option {}", other))),
        }
        self.expect_sym(';')
    }

    fn system(&mut self) -> Result<PDESystem> {
        self.expect_keyword("system")?;
        let name = self.expect_name()?;
        self.expect_sym('{')?;
        self.expect_keyword("independent")?;
        let indep = self.names_until_semicolon()?;
        self.expect_keyword("dependent")?;
        let deps = self.names_until_semicolon()?;
        let iv: Vec<&str> = indep.iter().map(String::as_str).collect();
        let dv: Vec<&str> = deps.iter().map(String::as_str).collect();
        let mut sys = PDESystem::new(&name, &iv, &dv);
        loop {
            if self.eat_sym('}') {
                break;
            } else if self.eat_keyword("parameter") {
                sys.params.extend(self.names_until_semicolon()?);
            } else if self.eat_keyword("opaque") {
                let f = self.expect_name()?;
                self.expect_sym(':')?;
                let arity = self.expect_int()? as usize;
                self.expect_sym(';')?;
                sys.opaque.push(OpaqueDecl { name: f, arity });
            } else if self.is_keyword("relation") {
                let mut scope = Scope::system(&sys);
                let r = self.relation(&mut scope)?;
                sys.relations.push(r);
            } else if self.eat_keyword("equation") {
                let eq = self.expect_name()?;
                self.expect_sym(':')?;
                let scope = Scope::system(&sys);
                let lhs = self.expr(&scope)?;
                self.expect_sym('=')?;
                let rhs = self.expr(&scope)?;
                self.expect_sym(';')?;
                sys.push_equation(&eq, lhs, rhs);
            } else if self.eat_keyword("ranking") {
                let scheme = match self.expect_name()?.as_str() {
                    "graded" => RankingScheme::Graded,
                    "lex" => RankingScheme::Lex,
                    _ => return Err(self.resolution("ranking must be 'graded' or 'lex'".into())),
                };
                let order = self.names_until_semicolon()?;
                let mut priority = Vec::new();
                for v in &order {
                    let i = sys
                        .var_index(v)
                        .ok_or_else(|| self.resolution(format!("{} is not independent", v)))?;
                    priority.push(i);
                }
                for i in 0..sys.n() {
                    if !priority.contains(&i) {
                        priority.push(i);
                    }
                }
                sys.ranking = Ranking { scheme, priority };
            } else {
                return Err(
                    self.err("'parameter', 'opaque', 'relation', 'equation', 'ranking' or '}'")
                );
            }
        }
        Ok(sys)
    }

    /// `relation f''(s) = rhs;` with `s` local to the rule.
    fn relation(&mut self, scope: &mut Scope) -> Result<Relation> {
        self.expect_keyword("relation")?;
        let func = self.expect_name()?;
        let mut order = 0;
        while self.eat_sym('\'') {
            order += 1;
        }
        self.expect_sym('(')?;
        let dummy = self.expect_name()?;
        self.expect_sym(')')?;
        self.expect_sym('=')?;
        let mut inner = scope.with_var(&dummy);
        let rhs = self.expr_in(&mut inner)?;
        scope.funcs = inner.funcs;
        self.expect_sym(';')?;
        if order == 0 {
            return Err(self.resolution(format!(
                "relation for {} needs a derivative on the left",
                func
            )));
        }
        Ok(Relation {
            func,
            order,
            rhs,
            dummy: Atom::var(dummy),
        })
    }

    fn symmetry(&mut self, m: &mut Model) -> Result<()> {
        self.expect_keyword("symmetry")?;
        let name = self.expect_name()?;
        self.expect_keyword("on")?;
        let target = self.expect_name()?;
        self.expect_sym(':')?;
        let idx = m
            .systems
            .iter()
            .position(|s| s.name == target)
            .ok_or_else(|| self.resolution(format!("unknown system {}", target)))?;
        let scope = Scope::system(&m.systems[idx]);
        let mut components = vec![self.expr(&scope)?];
        while self.eat_sym(',') {
            components.push(self.expr(&scope)?);
        }
        self.expect_sym(';')?;
        let sys = &mut m.systems[idx];
        if components.len() != sys.m() {
            return Err(self.resolution(format!(
                "symmetry {} has {} components but {} has {} dependents",
                name,
                components.len(),
                target,
                sys.m()
            )));
        }
        if sys.symmetries.iter().any(|s| s.name == name) {
            return Err(self.resolution(format!("symmetry {} declared twice on {}", name, target)));
        }
        sys.symmetries.push(Symmetry { name, components });
        Ok(())
    }

    fn solution(&mut self, m: &Model) -> Result<SolutionCandidate> {
        self.expect_keyword("solution")?;
        let name = self.expect_name()?;
        self.expect_keyword("for")?;
        let target = self.expect_name()?;
        let sys = m
            .system(&target)
            .ok_or_else(|| self.resolution(format!("unknown system {}", target)))?;
        self.expect_sym('{')?;
        let mut sol = SolutionCandidate::explicit(&name, sys);
        let mut free: Vec<String> = Vec::new();
        let mut relations = Relations::new();
        let mut raw: Vec<(String, Vec<String>)> = Vec::new();
        let mut values: Vec<Expr> = Vec::new();
        let mut scope = Scope::plain(&[]);
        scope.funcs = sys
            .opaque
            .iter()
            .map(|o| (o.name.clone(), o.arity))
            .collect();
        loop {
            if self.eat_sym('}') {
                break;
            } else if self.eat_keyword("parametric") {
                sol.mode = Mode::ParametricSymbolic;
                let ps = self.names_until_semicolon()?;
                free.extend(ps.iter().cloned());
                sol.params = ps;
            } else if self.eat_keyword("free") {
                let ps = self.names_until_semicolon()?;
                free.extend(ps.iter().cloned());
                if sol.mode == Mode::Explicit {
                    sol.params.extend(ps);
                }
            } else if self.eat_keyword("numeric") {
                self.expect_sym(';')?;
                if sol.mode == Mode::Explicit {
                    return Err(self.resolution("'numeric' requires a parametric solution".into()));
                }
                sol.mode = Mode::ParametricNumeric;
            } else if self.is_keyword("relation") {
                let mut sc = scope.clone();
                for v in &free {
                    sc.names.insert(v.clone(), Name::Var);
                }
                let r = self.relation(&mut sc)?;
                scope.funcs = sc.funcs;
                relations.push(r);
            } else {
                let head = self.expect_name()?;
                let mut vars = Vec::new();
                if self.eat_sym('[') {
                    vars.push(self.expect_name()?);
                    while self.eat_sym(',') {
                        vars.push(self.expect_name()?);
                    }
                    self.expect_sym(']')?;
                }
                self.expect_sym('=')?;
                let mut sc = scope.clone();
                for v in &free {
                    sc.names.insert(v.clone(), Name::Var);
                }
                if sol.mode == Mode::Explicit {
                    for x in sys.independents() {
                        sc.names.insert(x.clone(), Name::Var);
                    }
                    for p in &sys.params {
                        sc.names.insert(p.clone(), Name::Param);
                    }
                }
                let v = self.expr_in(&mut sc)?;
                scope.funcs = sc.funcs;
                self.expect_sym(';')?;
                raw.push((head, vars));
                values.push(v);
            }
        }
        for ((head, vars), v) in raw.into_iter().zip(values) {
            let target = if vars.is_empty() && sys.var_index(&head).is_some() {
                if sol.mode == Mode::Explicit {
                    return Err(self.resolution(format!(
                        "explicit solution {} cannot bind independent {}",
                        name, head
                    )));
                }
                Atom::var(head)
            } else {
                let a = sys.dep_index(&head).ok_or_else(|| {
                    self.resolution(format!("{} is not a variable of {}", head, target))
                })?;
                let mut idx = MultiIndex::zero(sys.n());
                for x in &vars {
                    let i = sys
                        .var_index(x)
                        .ok_or_else(|| self.resolution(format!("{} is not independent", x)))?;
                    idx.0[i] += 1;
                }
                if !idx.is_zero() && sol.mode != Mode::Explicit {
                    return Err(
                        self.resolution("jets can only be bound in explicit solutions".into())
                    );
                }
                sys.jet_atom(a, idx)
            };
            if sol.bindings.iter().any(|(t, _)| *t == target) {
                return Err(self.resolution(format!("{} bound twice in {}", target, name)));
            }
            sol.bind(target, v);
        }
        sol.relations = relations;
        Ok(sol)
    }

    fn distribution(&mut self) -> Result<DistributionDecl> {
        self.expect_keyword("distribution")?;
        let name = self.expect_name()?;
        self.expect_sym('{')?;
        self.expect_keyword("chart")?;
        let coords = self.names_until_semicolon()?;
        let chart: Arc<[String]> = coords.clone().into();
        let scope = Scope::plain(&coords);
        let mut fields = Vec::new();
        let mut gens = Vec::new();
        while !self.eat_sym('}') {
            self.expect_keyword("field")?;
            let f = self.expect_name()?;
            self.expect_sym(':')?;
            self.expect_sym('(')?;
            let mut comps = vec![self.expr(&scope)?];
            while self.eat_sym(',') {
                comps.push(self.expr(&scope)?);
            }
            self.expect_sym(')')?;
            self.expect_sym(';')?;
            let v = VectorField::new(chart.clone(), comps).map_err(|_| {
                self.resolution(format!("field {} needs {} components", f, coords.len()))
            })?;
            fields.push(f);
            gens.push(v);
        }
        let dist = Distribution::new(&name, chart, gens)?;
        Ok(DistributionDecl { dist, fields })
    }

    fn expr(&mut self, sc: &Scope) -> Result<Expr> {
        let mut sc = sc.clone();
        self.expr_in(&mut sc)
    }

    fn expr_in(&mut self, sc: &mut Scope) -> Result<Expr> {
        let mut acc = self.term(sc)?;
        loop {
            if self.eat_sym('+') {
                acc = &acc + &self.term(sc)?;
            } else if self.eat_sym('-') {
                acc = &acc - &self.term(sc)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, sc: &mut Scope) -> Result<Expr> {
        let mut acc = self.unary(sc)?;
        loop {
            if self.eat_sym('*') {
                acc = &acc * &self.unary(sc)?;
            } else if self.is_sym('/') {
                self.advance();
                let d = self.unary(sc)?;
                acc = acc
                    .try_div(&d)
                    .map_err(|e| self.resolution(e.to_string()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, sc: &mut Scope) -> Result<Expr> {
        if self.eat_sym('-') {
            return Ok(-self.unary(sc)?);
        }
        self.power(sc)
    }

    fn power(&mut self, sc: &mut Scope) -> Result<Expr> {
        let base = self.primary(sc)?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let neg = self.eat_sym('-');
        let e = match self.peek() {
            Tok::Int(_) => self.expect_int()? as i32,
            _ => return Err(self.err("an integer exponent")),
        };
        base.pow(if neg { -e } else { e })
            .map_err(|e| self.resolution(e.to_string()))
    }

    fn primary(&mut self, sc: &mut Scope) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                let v: num_bigint::BigInt = n.parse().map_err(|_| self.err("an integer"))?;
                Ok(Expr::rational(Rational::from_integer(v)))
            }
            Tok::Float(_) => Err(self.err("an exact number (use a fraction instead of a decimal)")),
            Tok::Sym('(') => {
                self.advance();
                let e = self.expr_in(sc)?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Name(n) => {
                self.advance();
                if self.is_sym('\'') || self.is_sym('(') {
                    return self.call(n, sc);
                }
                if self.is_sym('[') {
                    return self.jet(n, sc);
                }
                match sc.names.get(&n) {
                    Some(Name::Var) => Ok(Expr::var(&n)),
                    Some(Name::Param) => Ok(Expr::param(&n)),
                    Some(Name::Dep(a)) => {
                        let vars = sc.vars.clone().expect("dependents come with variables");
                        Ok(Expr::atom(Atom::jet(
                            *a,
                            n,
                            MultiIndex::zero(vars.len()),
                            vars,
                        )))
                    }
                    None => Err(self.resolution(format!("unknown name {}", n))),
                }
            }
            _ => Err(self.err("an expression")),
        }
    }

    fn jet(&mut self, n: String, sc: &mut Scope) -> Result<Expr> {
        let Some(Name::Dep(a)) = sc.names.get(&n).cloned() else {
            return Err(self.resolution(format!("{} is not a dependent variable", n)));
        };
        let vars = sc.vars.clone().expect("dependents come with variables");
        self.expect_sym('[')?;
        let mut idx = MultiIndex::zero(vars.len());
        loop {
            let v = self.expect_name()?;
            let i = vars
                .iter()
                .position(|x| *x == v)
                .ok_or_else(|| self.resolution(format!("{} is not independent", v)))?;
            idx.0[i] += 1;
            if !self.eat_sym(',') {
                break;
            }
        }
        self.expect_sym(']')?;
        Ok(Expr::atom(Atom::jet(a, n, idx, vars)))
    }

    fn call(&mut self, n: String, sc: &mut Scope) -> Result<Expr> {
        let mut primes = 0u32;
        let mut multi: Option<Vec<u32>> = None;
        while self.eat_sym('\'') {
            if self.eat_sym('{') {
                let mut ds = vec![self.expect_int()? as u32];
                while self.eat_sym(',') {
                    ds.push(self.expect_int()? as u32);
                }
                self.expect_sym('}')?;
                multi = Some(ds);
                break;
            }
            primes += 1;
        }
        self.expect_sym('(')?;
        let mut args = vec![self.expr_in(sc)?];
        while self.eat_sym(',') {
            args.push(self.expr_in(sc)?);
        }
        self.expect_sym(')')?;
        if let Some(fun) = Elementary::from_name(&n) {
            if primes > 0 || multi.is_some() || args.len() != 1 {
                return Err(self.resolution(format!("{} takes one argument and no primes", n)));
            }
            return Ok(Expr::elem(fun, args.pop().unwrap()));
        }
        match sc.funcs.get(&n) {
            Some(&k) if k != args.len() => {
                return Err(self.resolution(format!(
                    "{} expects {} arguments, got {}",
                    n,
                    k,
                    args.len()
                )))
            }
            Some(_) => {}
            None if sc.open_funcs => {
                sc.funcs.insert(n.clone(), args.len());
            }
            None => return Err(self.resolution(format!("function {} is not declared opaque", n))),
        }
        let deriv = match multi {
            Some(ds) if ds.len() != args.len() => {
                return Err(self.resolution(format!(
                    "{} has {} derivative counts for {} arguments",
                    n,
                    ds.len(),
                    args.len()
                )))
            }
            Some(ds) => ds,
            None if args.len() == 1 => vec![primes],
            None if primes == 0 => vec![0; args.len()],
            None => {
                return Err(self.resolution(format!(
                    "use {}'{{..}} for derivatives in several arguments",
                    n
                )))
            }
        };
        Ok(Expr::func(&n, deriv, args))
    }
}

pub(crate) fn parse_expr_in(text: &str, sys: &PDESystem) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr(&Scope::system(sys))?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("end of expression"));
    }
    Ok(e)
}
