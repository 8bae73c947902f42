//! Polynomial relations between semi-circulant sequences, solved degree by degree.
//!
//! Grammar: `expr = expr`, with `+ - *`, integer powers `^k`, parentheses,
//! rational literals (`3/5`), identifiers and `tau(expr)`. A bare number `c`
//! denotes `c` times the identity sequence; `I` is the identity itself.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::seq::{cauchy, SemiCirculantSeq};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Ident(String),
    Tau(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// `lhs = rhs`, kept with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub lhs: Expr,
    pub rhs: Expr,
    text: String,
}

impl Relation {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn identifiers(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_idents(&self.lhs, &mut out);
        collect_idents(&self.rhs, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn collect_idents(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Num(_) => {}
        Expr::Ident(s) => out.push(s.clone()),
        Expr::Tau(a) | Expr::Neg(a) | Expr::Pow(a, _) => collect_idents(a, out),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            collect_idents(a, out);
            collect_idents(b, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            a if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} in relation"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Plus) = self.peek() {
            self.pos += 1;
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) => {
                    let k: u32 = n
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent {n}")))?;
                    return Ok(Expr::Pow(Box::new(base), k));
                }
                t => {
                    return Err(Error::Parse(format!(
                        "expected integer exponent, found {t:?}"
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(n)) => {
                let mut text = n;
                if let (Some(Tok::Slash), Some(Tok::Num(d))) =
                    (self.toks.get(self.pos), self.toks.get(self.pos + 1))
                {
                    text = format!("{text}/{d}");
                    self.pos += 2;
                }
                Ok(Expr::Num(text.parse()?))
            }
            Some(Tok::Ident(name)) if name == "tau" => {
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Tau(Box::new(inner)))
            }
            Some(Tok::Ident(name)) => Ok(Expr::Ident(name)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let lhs = p.expr()?;
        p.expect(Tok::Eq)?;
        let rhs = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in relation {s:?}")));
        }
        Ok(Relation {
            lhs,
            rhs,
            text: s.trim().to_string(),
        })
    }
}

/// Names available to relations: scalars (times identity) and known sequences.
#[derive(Clone, Debug)]
pub struct Context {
    pub rho: Rational,
    pub scalars: BTreeMap<String, Rational>,
    pub known: BTreeMap<String, SemiCirculantSeq>,
}

impl Context {
    pub fn new(rho: Rational) -> Self {
        let mut scalars = BTreeMap::new();
        scalars.insert("I".to_string(), Rational::one());
        Context {
            rho,
            scalars,
            known: BTreeMap::new(),
        }
    }

    pub fn with_scalar(mut self, name: &str, v: Rational) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    pub fn with_known(mut self, name: &str, s: SemiCirculantSeq) -> Self {
        self.known.insert(name.to_string(), s);
        self
    }
}

/// Affine form `c + sum coefs[k] x_k` in the current top entries.
#[derive(Clone, Debug)]
struct Lin {
    c: Rational,
    coefs: Vec<Rational>,
}

impl Lin {
    fn constant(c: Rational, n: usize) -> Self {
        Lin {
            c,
            coefs: vec![Rational::zero(); n],
        }
    }

    fn is_const(&self) -> bool {
        self.coefs.iter().all(|x| x.is_zero())
    }

    fn add(&self, o: &Lin) -> Lin {
        Lin {
            c: &self.c + &o.c,
            coefs: self
                .coefs
                .iter()
                .zip(&o.coefs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn sub(&self, o: &Lin) -> Lin {
        Lin {
            c: &self.c - &o.c,
            coefs: self
                .coefs
                .iter()
                .zip(&o.coefs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn scale(&self, k: &Rational) -> Lin {
        Lin {
            c: &self.c * k,
            coefs: self.coefs.iter().map(|a| a * k).collect(),
        }
    }
}

/// Entries below the current degree are exact; the entry at the degree is affine.
#[derive(Clone, Debug)]
struct Partial {
    lower: Vec<Rational>,
    top: Lin,
}

struct Evaluator<'a> {
    ctx: &'a Context,
    degree: usize,
    unknown_index: BTreeMap<&'a str, usize>,
    // solved prefixes of unknowns, and which unknowns are free at this degree
    values: &'a [Vec<Rational>],
    free: &'a [bool],
    rho_inv: Rational,
    // full sequences of subexpressions free of unknowns, keyed by node address
    fixed: &'a RefCell<HashMap<*const Expr, Vec<Rational>>>,
    full_degree: usize,
}

impl<'a> Evaluator<'a> {
    fn nvars(&self) -> usize {
        self.values.len()
    }

    fn mentions_unknown(&self, e: &Expr) -> bool {
        match e {
            Expr::Num(_) => false,
            Expr::Ident(name) => self.unknown_index.contains_key(name.as_str()),
            Expr::Tau(a) | Expr::Neg(a) | Expr::Pow(a, _) => self.mentions_unknown(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                self.mentions_unknown(a) || self.mentions_unknown(b)
            }
        }
    }

    fn eval(&self, e: &Expr) -> Result<Partial> {
        let j = self.degree;
        let n = self.nvars();
        if !matches!(e, Expr::Num(_) | Expr::Ident(_)) && !self.mentions_unknown(e) {
            let key = e as *const Expr;
            if !self.fixed.borrow().contains_key(&key) {
                let v = evaluate_expr(e, self.ctx, self.full_degree)?;
                self.fixed.borrow_mut().insert(key, v);
            }
            let cache = self.fixed.borrow();
            let v = &cache[&key];
            return Ok(Partial {
                lower: v[..j].to_vec(),
                top: Lin::constant(v[j].clone(), n),
            });
        }
        match e {
            Expr::Num(c) => Ok(self.scalar(c.clone())),
            Expr::Ident(name) => {
                if let Some(&k) = self.unknown_index.get(name.as_str()) {
                    let lower = self.values[k][..j].to_vec();
                    let top = if self.free[k] {
                        let mut coefs = vec![Rational::zero(); n];
                        coefs[k] = Rational::one();
                        Lin {
                            c: Rational::zero(),
                            coefs,
                        }
                    } else {
                        Lin::constant(self.values[k][j].clone(), n)
                    };
                    Ok(Partial { lower, top })
                } else if let Some(s) = self.ctx.known.get(name) {
                    if s.degree() < j {
                        return Err(Error::Config(format!(
                            "known sequence {name} too short for degree {j}"
                        )));
                    }
                    Ok(Partial {
                        lower: s.entries()[..j].to_vec(),
                        top: Lin::constant(s.get(j).clone(), n),
                    })
                } else if let Some(c) = self.ctx.scalars.get(name) {
                    Ok(self.scalar(c.clone()))
                } else {
                    Err(Error::Config(format!(
                        "unbound identifier {name:?} in relation"
                    )))
                }
            }
            Expr::Tau(a) => {
                let p = self.eval(a)?;
                let mut f = Rational::one();
                let mut lower = Vec::with_capacity(j);
                for v in &p.lower {
                    lower.push(v * &f);
                    f = &f * &self.rho_inv;
                }
                Ok(Partial {
                    lower,
                    top: p.top.scale(&f),
                })
            }
            Expr::Neg(a) => {
                let p = self.eval(a)?;
                let m = -Rational::one();
                Ok(Partial {
                    lower: p.lower.iter().map(|x| -x).collect(),
                    top: p.top.scale(&m),
                })
            }
            Expr::Add(a, b) => {
                let (p, q) = (self.eval(a)?, self.eval(b)?);
                Ok(Partial {
                    lower: p.lower.iter().zip(&q.lower).map(|(x, y)| x + y).collect(),
                    top: p.top.add(&q.top),
                })
            }
            Expr::Sub(a, b) => {
                let (p, q) = (self.eval(a)?, self.eval(b)?);
                Ok(Partial {
                    lower: p.lower.iter().zip(&q.lower).map(|(x, y)| x - y).collect(),
                    top: p.top.sub(&q.top),
                })
            }
            Expr::Mul(a, b) => {
                let (p, q) = (self.eval(a)?, self.eval(b)?);
                self.mul(&p, &q)
            }
            Expr::Pow(a, k) => {
                let p = self.eval(a)?;
                let mut acc = self.scalar(Rational::one());
                for _ in 0..*k {
                    acc = self.mul(&acc, &p)?;
                }
                Ok(acc)
            }
        }
    }

    fn scalar(&self, c: Rational) -> Partial {
        let j = self.degree;
        let n = self.nvars();
        if j == 0 {
            Partial {
                lower: vec![],
                top: Lin::constant(c, n),
            }
        } else {
            let mut lower = vec![Rational::zero(); j];
            lower[0] = c;
            Partial {
                lower,
                top: Lin::constant(Rational::zero(), n),
            }
        }
    }

    fn mul(&self, p: &Partial, q: &Partial) -> Result<Partial> {
        let j = self.degree;
        if j == 0 {
            let top = if p.top.is_const() {
                q.top.scale(&p.top.c)
            } else if q.top.is_const() {
                p.top.scale(&q.top.c)
            } else {
                return Err(Error::NotSolvable {
                    degree: 0,
                    detail: "nonlinear in the degree-0 entries; supply a seed".into(),
                });
            };
            return Ok(Partial { lower: vec![], top });
        }
        let lower = cauchy(&p.lower, &q.lower);
        let mut c: Rational = (1..j).map(|i| &p.lower[i] * &q.lower[j - i]).sum();
        let mut top = p.top.scale(&q.lower[0]).add(&q.top.scale(&p.lower[0]));
        c += &top.c;
        top.c = c;
        Ok(Partial { lower, top })
    }
}

/// Several relations in several unknown sequences.
#[derive(Clone, Debug)]
pub struct RelationSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<Relation>,
}

impl RelationSystem {
    pub fn new(unknowns: &[&str], equations: &[&str]) -> Result<Self> {
        Ok(RelationSystem {
            unknowns: unknowns.iter().map(|s| s.to_string()).collect(),
            equations: equations.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        })
    }

    /// Solve for `J+1` entries of every unknown; seeds fix leading entries.
    pub fn solve(
        &self,
        ctx: &Context,
        seeds: &BTreeMap<String, Vec<Rational>>,
        degree: usize,
    ) -> Result<BTreeMap<String, SemiCirculantSeq>> {
        for name in seeds.keys() {
            if !self.unknowns.contains(name) {
                return Err(Error::Config(format!(
                    "seed for unknown {name:?} which is not solved for"
                )));
            }
        }
        let n = self.unknowns.len();
        let unknown_index: BTreeMap<&str, usize> = self
            .unknowns
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        let mut values: Vec<Vec<Rational>> = vec![vec![Rational::zero(); degree + 1]; n];
        let rho_inv = ctx.rho.recip()?;
        let fixed = RefCell::new(HashMap::new());
        for j in 0..=degree {
            let mut free = vec![true; n];
            for (k, name) in self.unknowns.iter().enumerate() {
                if let Some(s) = seeds.get(name) {
                    if j < s.len() {
                        values[k][j] = s[j].clone();
                        free[k] = false;
                    }
                }
            }
            let ev = Evaluator {
                ctx,
                degree: j,
                unknown_index: unknown_index.clone(),
                values: &values,
                free: &free,
                rho_inv: rho_inv.clone(),
                fixed: &fixed,
                full_degree: degree,
            };
            let mut forms = Vec::with_capacity(self.equations.len());
            for eq in &self.equations {
                let l = ev.eval(&eq.lhs)?;
                let r = ev.eval(&eq.rhs)?;
                forms.push(l.top.sub(&r.top));
            }
            let vars: Vec<usize> = (0..n).filter(|&k| free[k]).collect();
            if vars.is_empty() {
                if let Some((i, f)) = forms.iter().enumerate().find(|(_, f)| !f.c.is_zero()) {
                    return Err(Error::Inconsistent {
                        degree: j,
                        detail: format!(
                            "seeded values leave residual {} in `{}`",
                            f.c, self.equations[i]
                        ),
                    });
                }
                continue;
            }
            let a = Matrix::from_rows(
                forms
                    .iter()
                    .map(|f| vars.iter().map(|&k| f.coefs[k].clone()).collect())
                    .collect(),
            )?;
            let b: Vec<Rational> = forms.iter().map(|f| -&f.c).collect();
            let rank = a.rank();
            if rank < vars.len() {
                return Err(Error::NotSolvable {
                    degree: j,
                    detail: format!("rank {rank} for {} unknown entries", vars.len()),
                });
            }
            let x = a.solve(&b).map_err(|_| Error::Inconsistent {
                degree: j,
                detail: "overdetermined equations disagree".into(),
            })?;
            for (t, &k) in vars.iter().enumerate() {
                values[k][j] = x[t].clone();
            }
        }
        self.unknowns
            .iter()
            .zip(values)
            .map(|(name, v)| Ok((name.clone(), SemiCirculantSeq::new(v, ctx.rho.clone())?)))
            .collect()
    }

    /// `lhs - rhs` of every equation, as full sequences, at the given solution.
    pub fn residuals(
        &self,
        ctx: &Context,
        solution: &BTreeMap<String, SemiCirculantSeq>,
    ) -> Result<Vec<Vec<Rational>>> {
        let mut ctx = ctx.clone();
        for (k, v) in solution {
            ctx.known.insert(k.clone(), v.clone());
        }
        let degree = solution.values().map(|s| s.degree()).min().unwrap_or(0);
        self.equations
            .iter()
            .map(|eq| evaluate_difference(eq, &ctx, degree))
            .collect()
    }
}

/// Evaluate `lhs - rhs` with every identifier bound in `ctx`.
pub fn evaluate_difference(eq: &Relation, ctx: &Context, degree: usize) -> Result<Vec<Rational>> {
    let l = evaluate_expr(&eq.lhs, ctx, degree)?;
    let r = evaluate_expr(&eq.rhs, ctx, degree)?;
    Ok(l.iter().zip(&r).map(|(a, b)| a - b).collect())
}

/// Full sequence value of an expression with no unknowns.
pub fn evaluate_expr(e: &Expr, ctx: &Context, degree: usize) -> Result<Vec<Rational>> {
    let n = degree + 1;
    Ok(match e {
        Expr::Num(c) => unit(c.clone(), n),
        Expr::Ident(name) => {
            if let Some(s) = ctx.known.get(name) {
                if s.degree() < degree {
                    return Err(Error::Config(format!("known sequence {name} too short")));
                }
                s.entries()[..n].to_vec()
            } else if let Some(c) = ctx.scalars.get(name) {
                unit(c.clone(), n)
            } else {
                return Err(Error::Config(format!("unbound identifier {name:?}")));
            }
        }
        Expr::Tau(a) => {
            let v = evaluate_expr(a, ctx, degree)?;
            let inv = ctx.rho.recip()?;
            let mut f = Rational::one();
            v.into_iter()
                .map(|x| {
                    let y = x * &f;
                    f = &f * &inv;
                    y
                })
                .collect()
        }
        Expr::Neg(a) => evaluate_expr(a, ctx, degree)?
            .into_iter()
            .map(|x| -x)
            .collect(),
        Expr::Add(a, b) => {
            let (p, q) = (
                evaluate_expr(a, ctx, degree)?,
                evaluate_expr(b, ctx, degree)?,
            );
            p.iter().zip(&q).map(|(x, y)| x + y).collect()
        }
        Expr::Sub(a, b) => {
            let (p, q) = (
                evaluate_expr(a, ctx, degree)?,
                evaluate_expr(b, ctx, degree)?,
            );
            p.iter().zip(&q).map(|(x, y)| x - y).collect()
        }
        Expr::Mul(a, b) => cauchy(
            &evaluate_expr(a, ctx, degree)?,
            &evaluate_expr(b, ctx, degree)?,
        ),
        Expr::Pow(a, k) => {
            let p = evaluate_expr(a, ctx, degree)?;
            let mut acc = unit(Rational::one(), n);
            for _ in 0..*k {
                acc = cauchy(&acc, &p);
            }
            acc
        }
    })
}

fn unit(c: Rational, n: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[0] = c;
    v
}

/// One relation in one unknown sequence.
#[derive(Clone, Debug)]
pub struct RelationSpec {
    pub relation: Relation,
    pub unknown: String,
    pub context: Context,
}

impl RelationSpec {
    pub fn new(relation: &str, unknown: &str, context: Context) -> Result<Self> {
        Ok(RelationSpec {
            relation: relation.parse()?,
            unknown: unknown.to_string(),
            context,
        })
    }
}

/// Solve a single implicit relation degree by degree from the given leading entries.
pub fn solve_implicit_relation(
    spec: &RelationSpec,
    seed: &[Rational],
    degree: usize,
) -> Result<SemiCirculantSeq> {
    let sys = RelationSystem {
        unknowns: vec![spec.unknown.clone()],
        equations: vec![spec.relation.clone()],
    };
    let mut seeds = BTreeMap::new();
    seeds.insert(spec.unknown.clone(), seed.to_vec());
    let mut sol = sys.solve(&spec.context, &seeds, degree)?;
    Ok(sol.remove(&spec.unknown).expect("unknown present"))
}
