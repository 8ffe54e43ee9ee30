//! Human-readable templates restricting the parameters of a termination method.
//!
//! Four atom grammars (precedence chains, weight equations, interpretation
//! shapes and the matrix literals inside them) combined with `NOT`, `AND`
//! and `OR`. A comma-separated list at the top level is a conjunction.

mod check;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::interp::{InterpKind, write_grid};

pub use check::{CheckedAtom, CheckedTemplate, InterPattern, atom_holds, validate};
pub use parse::{parse_inters, parse_prec, parse_weights};

/// Upper limit on the number of disjuncts produced by [`to_dnf`].
pub const MAX_DISJUNCTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("variable x{index} out of range for `{symbol}` of arity {arity}")]
    VarIndex {
        symbol: String,
        index: usize,
        arity: usize,
    },
    #[error("inconsistent matrix dimensions: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("{0}")]
    Shape(String),
    #[error("matrix dimension is neither given nor determined by the template")]
    NoDimension,
    #[error("normal form exceeds {MAX_DISJUNCTS} disjuncts")]
    DnfTooLarge,
    #[error("candidate does not provide {0}")]
    MissingCandidate(&'static str),
}

/// Boolean combination over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateAst<A> {
    Atom(A),
    Not(Box<TemplateAst<A>>),
    And(Vec<TemplateAst<A>>),
    Or(Vec<TemplateAst<A>>),
}

impl<A> TemplateAst<A> {
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            TemplateAst::Atom(a) => out.push(a),
            TemplateAst::Not(t) => t.collect_atoms(out),
            TemplateAst::And(ts) | TemplateAst::Or(ts) => {
                ts.iter().for_each(|t| t.collect_atoms(out))
            }
        }
    }

    pub fn try_map<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<B, E>,
    ) -> Result<TemplateAst<B>, E> {
        Ok(match self {
            TemplateAst::Atom(a) => TemplateAst::Atom(f(a)?),
            TemplateAst::Not(t) => TemplateAst::Not(Box::new(t.try_map(f)?)),
            TemplateAst::And(ts) => {
                TemplateAst::And(ts.iter().map(|t| t.try_map(f)).collect::<Result<_, _>>()?)
            }
            TemplateAst::Or(ts) => {
                TemplateAst::Or(ts.iter().map(|t| t.try_map(f)).collect::<Result<_, _>>()?)
            }
        })
    }

    /// Structural evaluation under an atom valuation.
    pub fn eval<E>(&self, holds: &mut impl FnMut(&A) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            TemplateAst::Atom(a) => holds(a)?,
            TemplateAst::Not(t) => !t.eval(holds)?,
            TemplateAst::And(ts) => {
                for t in ts {
                    if !t.eval(holds)? {
                        return Ok(false);
                    }
                }
                true
            }
            TemplateAst::Or(ts) => {
                for t in ts {
                    if t.eval(holds)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

/// An atom or its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal<A> {
    pub positive: bool,
    pub atom: A,
}

pub type Dnf<A> = Vec<Vec<Literal<A>>>;

/// Disjunctive normal form; disjuncts keep the left-to-right order of the source.
pub fn to_dnf<A: Clone>(ast: &TemplateAst<A>) -> Result<Dnf<A>, TemplateError> {
    dnf(ast, true)
}

fn dnf<A: Clone>(ast: &TemplateAst<A>, positive: bool) -> Result<Dnf<A>, TemplateError> {
    match (ast, positive) {
        (TemplateAst::Atom(a), _) => Ok(vec![vec![Literal {
            positive,
            atom: a.clone(),
        }]]),
        (TemplateAst::Not(t), _) => dnf(t, !positive),
        (TemplateAst::And(ts), true) | (TemplateAst::Or(ts), false) => {
            let mut acc: Dnf<A> = vec![vec![]];
            for t in ts {
                let d = dnf(t, positive)?;
                if acc.len().saturating_mul(d.len()) > MAX_DISJUNCTS {
                    return Err(TemplateError::DnfTooLarge);
                }
                acc = acc
                    .iter()
                    .flat_map(|conj| {
                        d.iter().map(move |c| {
                            let mut v = conj.clone();
                            v.extend(c.iter().cloned());
                            v
                        })
                    })
                    .collect();
            }
            Ok(acc)
        }
        (TemplateAst::Or(ts), true) | (TemplateAst::And(ts), false) => {
            let mut acc = Vec::new();
            for t in ts {
                acc.extend(dnf(t, positive)?);
                if acc.len() > MAX_DISJUNCTS {
                    return Err(TemplateError::DnfTooLarge);
                }
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecRel {
    Gt,
    Eq,
    Ge,
}

impl PrecRel {
    fn as_str(self) -> &'static str {
        match self {
            PrecRel::Gt => ">",
            PrecRel::Eq => "=",
            PrecRel::Ge => ">=",
        }
    }
}

/// `f > g = h >= k`: a chain of symbols in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrecAtom<S = String> {
    pub first: S,
    pub chain: Vec<(PrecRel, S)>,
}

impl<S> PrecAtom<S> {
    /// Any `=` or `>=` switches to quasi-precedences.
    pub fn quasi(&self) -> bool {
        self.chain.iter().any(|(r, _)| *r != PrecRel::Gt)
    }

    /// Adjacent pairs `(left, rel, right)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&S, PrecRel, &S)> {
        std::iter::once(&self.first)
            .chain(self.chain.iter().map(|(_, s)| s))
            .zip(self.chain.iter())
            .map(|(l, (r, s))| (l, *r, s))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &S> {
        std::iter::once(&self.first).chain(self.chain.iter().map(|(_, s)| s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightRel {
    Eq,
    Le,
    Ge,
}

impl WeightRel {
    fn as_str(self) -> &'static str {
        match self {
            WeightRel::Eq => "=",
            WeightRel::Le => "<=",
            WeightRel::Ge => ">=",
        }
    }

    pub fn holds(self, w: u64, bound: u64) -> bool {
        match self {
            WeightRel::Eq => w == bound,
            WeightRel::Le => w <= bound,
            WeightRel::Ge => w >= bound,
        }
    }
}

/// `f = g <= 5`: the relation applies to every listed symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightsAtom<S = String> {
    pub symbols: Vec<S>,
    pub rel: WeightRel,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Nat(u64),
    Hole,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Nat(n) => write!(f, "{n}"),
            Entry::Hole => f.write_str("_"),
        }
    }
}

/// Rectangular grid of naturals and holes, `[1,_;0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixLit {
    pub rows: Vec<Vec<Entry>>,
}

impl MatrixLit {
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

impl fmt::Display for MatrixLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_grid(f, &self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoefLit {
    /// A natural; scalar multiple of the identity in matrix mode.
    Nat(u64),
    Matrix(MatrixLit),
    Hole,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstLit {
    Nat(u64),
    Matrix(MatrixLit),
    /// `0` in matrix mode.
    Zero,
    /// `1` in matrix mode.
    One,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Monomial {
    /// `coeff x_index`; no coefficient means the identity.
    Var {
        coeff: Option<CoefLit>,
        index: usize,
    },
    Const(ConstLit),
    Hole,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monomial::Var { coeff, index } => {
                match coeff {
                    None => {}
                    Some(CoefLit::Nat(n)) => write!(f, "{n}")?,
                    Some(CoefLit::Matrix(m)) => write!(f, "{m}")?,
                    Some(CoefLit::Hole) => f.write_str("_")?,
                }
                write!(f, "x{index}")
            }
            Monomial::Const(ConstLit::Nat(n)) => write!(f, "{n}"),
            Monomial::Const(ConstLit::Matrix(m)) => write!(f, "{m}"),
            Monomial::Const(ConstLit::Zero) => f.write_str("0"),
            Monomial::Const(ConstLit::One) => f.write_str("1"),
            Monomial::Hole => f.write_str("_"),
        }
    }
}

/// `f = g = 2x0 + x1 + _`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntersAtom<S = String> {
    pub symbols: Vec<S>,
    pub monomials: Vec<Monomial>,
    pub mode: InterpKind,
}

/// Atom of any of the three template kinds, with symbol names unresolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Prec(PrecAtom),
    Weights(WeightsAtom),
    Inters(IntersAtom),
}

pub type Template = TemplateAst<Atom>;

impl fmt::Display for PrecAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.first)?;
        for (r, s) in &self.chain {
            write!(f, " {} {s}", r.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Display for WeightsAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i + 1 < self.symbols.len() {
                write!(f, "{s} = ")?;
            } else {
                write!(f, "{s} {} {}", self.rel.as_str(), self.weight)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntersAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s} = ")?;
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prec(a) => a.fmt(f),
            Atom::Weights(a) => a.fmt(f),
            Atom::Inters(a) => a.fmt(f),
        }
    }
}

impl<A: fmt::Display> fmt::Display for TemplateAst<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, kw: &str, ts: &[TemplateAst<A>]| {
            write!(f, "{kw}(")?;
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")
        };
        match self {
            TemplateAst::Atom(a) => a.fmt(f),
            TemplateAst::Not(t) => write!(f, "NOT({t})"),
            TemplateAst::And(ts) => list(f, "AND", ts),
            TemplateAst::Or(ts) => list(f, "OR", ts),
        }
    }
}
