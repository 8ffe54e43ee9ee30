//! Resolving templates against a signature, and checking atoms on candidates.

use std::collections::BTreeMap;

use crate::certificate::Certificate;
use crate::interp::{InterpKind, SymbolInterp};
use crate::orders::PrecOrd;
use crate::trs::{SymId, Trs};

use super::{
    Atom, CoefLit, ConstLit, Entry, IntersAtom, Literal, MatrixLit, Monomial, PrecAtom, PrecRel,
    Template, TemplateAst, TemplateError, WeightsAtom,
};

/// Interpretation shape with symbols resolved and literals expanded to the
/// template dimension. `None` entries are holes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InterPattern {
    pub symbols: Vec<SymId>,
    pub dim: usize,
    /// Row-major `dim × dim` pattern per mentioned argument index.
    pub coeffs: BTreeMap<usize, Vec<Option<u64>>>,
    pub constant: Option<Vec<Option<u64>>>,
    /// A bare `_` frees every part not mentioned explicitly.
    pub open: bool,
}

impl InterPattern {
    /// Pattern for argument `i`: explicit, free (`open`), or zero.
    pub fn coeff(&self, i: usize) -> Option<Vec<Option<u64>>> {
        match self.coeffs.get(&i) {
            Some(p) => Some(p.clone()),
            None if self.open => None,
            None => Some(vec![Some(0); self.dim * self.dim]),
        }
    }

    pub fn constant(&self) -> Option<Vec<Option<u64>>> {
        match &self.constant {
            Some(p) => Some(p.clone()),
            None if self.open => None,
            None => Some(vec![Some(0); self.dim]),
        }
    }

    pub fn matches(&self, fi: &SymbolInterp) -> bool {
        let fits = |pat: Option<Vec<Option<u64>>>, vals: &[u64]| {
            pat.is_none_or(|p| {
                p.len() == vals.len() && p.iter().zip(vals).all(|(p, v)| p.is_none_or(|p| p == *v))
            })
        };
        fi.coeffs
            .iter()
            .enumerate()
            .all(|(i, m)| fits(self.coeff(i), m.entries()))
            && fits(self.constant(), &fi.constant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CheckedAtom {
    Prec(PrecAtom<SymId>),
    Weights(WeightsAtom<SymId>),
    Inters(InterPattern),
}

impl CheckedAtom {
    pub fn symbols(&self) -> Vec<SymId> {
        match self {
            CheckedAtom::Prec(a) => a.symbols().copied().collect(),
            CheckedAtom::Weights(a) => a.symbols.clone(),
            CheckedAtom::Inters(p) => p.symbols.clone(),
        }
    }

    pub fn holds(&self, cert: &Certificate) -> Result<bool, TemplateError> {
        match self {
            CheckedAtom::Prec(a) => {
                let p = cert
                    .precedence()
                    .ok_or(TemplateError::MissingCandidate("a precedence"))?;
                for (l, rel, r) in a.pairs() {
                    let c = p
                        .compare(*l, *r)
                        .map_err(|_| TemplateError::MissingCandidate("a level for every symbol"))?;
                    let ok = match rel {
                        PrecRel::Gt => c == PrecOrd::Gt,
                        PrecRel::Eq => c == PrecOrd::Eq,
                        PrecRel::Ge => c != PrecOrd::Incomparable,
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CheckedAtom::Weights(a) => {
                let w = cert
                    .weights()
                    .ok_or(TemplateError::MissingCandidate("weights"))?;
                for f in &a.symbols {
                    let wf = w.weight(*f).map_err(|_| {
                        TemplateError::MissingCandidate("a weight for every symbol")
                    })?;
                    if !a.rel.holds(wf, a.weight) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CheckedAtom::Inters(p) => {
                let interp = cert
                    .interpretation()
                    .ok_or(TemplateError::MissingCandidate("an interpretation"))?;
                if interp.dim() != p.dim {
                    return Err(TemplateError::Dimension(p.dim, interp.dim()));
                }
                for f in &p.symbols {
                    let fi = interp
                        .fun(*f)
                        .map_err(|_| TemplateError::MissingCandidate("every interpretation"))?;
                    if !p.matches(fi) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Checks a (possibly negated) atom on a candidate.
pub fn atom_holds(lit: &Literal<CheckedAtom>, cert: &Certificate) -> Result<bool, TemplateError> {
    Ok(lit.atom.holds(cert)? == lit.positive)
}

/// A template validated against a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedTemplate {
    pub ast: TemplateAst<CheckedAtom>,
    /// Matrix dimension, when interpretation atoms are present.
    pub dim: Option<usize>,
    /// Some precedence atom uses `=` or `>=`.
    pub quasi: bool,
}

impl CheckedTemplate {
    pub fn holds(&self, cert: &Certificate) -> Result<bool, TemplateError> {
        self.ast.eval(&mut |a: &CheckedAtom| a.holds(cert))
    }
}

fn resolve(trs: &Trs, name: &str) -> Result<SymId, TemplateError> {
    trs.lookup(name)
        .ok_or_else(|| TemplateError::UnknownSymbol(name.to_string()))
}

fn lit_dims(atom: &IntersAtom) -> Result<Vec<usize>, TemplateError> {
    let mut dims = Vec::new();
    for m in &atom.monomials {
        match m {
            Monomial::Var {
                coeff: Some(CoefLit::Matrix(lit)),
                ..
            } => {
                if lit.height() != lit.width() {
                    return Err(TemplateError::Shape(format!(
                        "coefficient {lit} is not square"
                    )));
                }
                dims.push(lit.height());
            }
            Monomial::Const(ConstLit::Matrix(lit)) => {
                if lit.width() != 1 {
                    return Err(TemplateError::Shape(format!(
                        "constant {lit} is not a column vector"
                    )));
                }
                dims.push(lit.height());
            }
            _ => {}
        }
    }
    Ok(dims)
}

fn entries(lit: &MatrixLit) -> Vec<Option<u64>> {
    lit.rows
        .iter()
        .flatten()
        .map(|e| match e {
            Entry::Nat(n) => Some(*n),
            Entry::Hole => None,
        })
        .collect()
}

fn scalar_pattern(dim: usize, k: u64) -> Vec<Option<u64>> {
    (0..dim * dim)
        .map(|i| Some(if i / dim == i % dim { k } else { 0 }))
        .collect()
}

fn pattern(trs: &Trs, atom: &IntersAtom, dim: usize) -> Result<InterPattern, TemplateError> {
    let symbols = atom
        .symbols
        .iter()
        .map(|n| resolve(trs, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut p = InterPattern {
        symbols,
        dim,
        coeffs: BTreeMap::new(),
        constant: None,
        open: false,
    };
    for m in &atom.monomials {
        match m {
            Monomial::Hole => p.open = true,
            Monomial::Var { coeff, index } => {
                for &f in &p.symbols {
                    if *index >= trs.arity(f) {
                        return Err(TemplateError::VarIndex {
                            symbol: trs.symbol(f).name.clone(),
                            index: *index,
                            arity: trs.arity(f),
                        });
                    }
                }
                let pat = match coeff {
                    None => scalar_pattern(dim, 1),
                    Some(CoefLit::Nat(k)) => scalar_pattern(dim, *k),
                    Some(CoefLit::Matrix(lit)) => entries(lit),
                    Some(CoefLit::Hole) => vec![None; dim * dim],
                };
                p.coeffs.insert(*index, pat);
            }
            Monomial::Const(c) => {
                p.constant = Some(match c {
                    ConstLit::Nat(n) => vec![Some(*n)],
                    ConstLit::Zero => vec![Some(0); dim],
                    ConstLit::One => vec![Some(1); dim],
                    ConstLit::Matrix(lit) => entries(lit),
                });
            }
        }
    }
    Ok(p)
}

/// Resolves symbol names, checks variable indices against arities and
/// fixes the matrix dimension.
///
/// `dim` is an externally supplied dimension for matrix templates; literals
/// in the template must agree with it, and it may be omitted when some
/// literal determines the dimension.
pub fn validate(
    ast: &Template,
    trs: &Trs,
    dim: Option<usize>,
) -> Result<CheckedTemplate, TemplateError> {
    let mut inferred = dim;
    let mut has_matrix = false;
    let mut has_poly = false;
    for a in ast.atoms() {
        if let Atom::Inters(ia) = a {
            match ia.mode {
                InterpKind::Poly => has_poly = true,
                InterpKind::Matrix => {
                    has_matrix = true;
                    for d in lit_dims(ia)? {
                        match inferred {
                            Some(e) if e != d => return Err(TemplateError::Dimension(e, d)),
                            _ => inferred = Some(d),
                        }
                    }
                }
            }
        }
    }
    if has_poly && has_matrix {
        return Err(TemplateError::Shape(
            "polynomial and matrix atoms mixed".into(),
        ));
    }
    let dim = if has_poly {
        Some(1)
    } else if has_matrix {
        match inferred {
            Some(0) => return Err(TemplateError::Shape("dimension must be positive".into())),
            Some(d) => Some(d),
            None => return Err(TemplateError::NoDimension),
        }
    } else {
        dim
    };
    let mut quasi = false;
    let checked = ast.try_map(&mut |a: &Atom| -> Result<CheckedAtom, TemplateError> {
        Ok(match a {
            Atom::Prec(p) => {
                quasi |= p.quasi();
                CheckedAtom::Prec(PrecAtom {
                    first: resolve(trs, &p.first)?,
                    chain: p
                        .chain
                        .iter()
                        .map(|(r, s)| Ok((*r, resolve(trs, s)?)))
                        .collect::<Result<_, TemplateError>>()?,
                })
            }
            Atom::Weights(w) => CheckedAtom::Weights(WeightsAtom {
                symbols: w
                    .symbols
                    .iter()
                    .map(|s| resolve(trs, s))
                    .collect::<Result<_, _>>()?,
                rel: w.rel,
                weight: w.weight,
            }),
            Atom::Inters(ia) => CheckedAtom::Inters(pattern(trs, ia, dim.unwrap_or(1))?),
        })
    })?;
    Ok(CheckedTemplate {
        ast: checked,
        dim,
        quasi,
    })
}
