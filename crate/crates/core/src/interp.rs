//! Linear interpretations over the naturals (polynomial mode) and over
//! vectors of naturals with square coefficient matrices (matrix mode).
//!
//! Both modes share one representation: a polynomial interpretation is a
//! matrix interpretation of dimension 1 that prints with scalars.
//! Arithmetic is checked; overflow is reported as [`InterpError::Overflow`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::trs::{Rule, SymId, Term, Trs, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterpKind {
    Poly,
    Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("no interpretation for symbol #{}", .0.0)]
    Missing(SymId),
    #[error("interpretation of symbol #{} has {found} coefficients, arity is {expected}", .sym.0)]
    ArityMismatch {
        sym: SymId,
        expected: usize,
        found: usize,
    },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("no value for variable #{}", .0.0)]
    MissingVariable(VarId),
    #[error("expected dimension {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("polynomial interpretations have dimension 1")]
    PolyDimension,
}

/// Square matrix of naturals, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    dim: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1)
    }

    pub fn scalar(dim: usize, k: u64) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = k;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self, InterpError> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(InterpError::Dimension {
                expected: dim,
                found: r.len(),
            });
        }
        Ok(Matrix {
            dim,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data
            .chunks(self.dim.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, InterpError> {
        let d = self.dim;
        let mut out = Matrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    let p = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or(InterpError::Overflow)?;
                    acc = acc.checked_add(p).ok_or(InterpError::Overflow)?;
                }
                out.data[i * d + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, InterpError> {
        Ok(Matrix {
            dim: self.dim,
            data: add_vec(&self.data, &other.data)?,
        })
    }

    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>, InterpError> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d).try_fold(0u64, |acc, k| {
                    self.get(i, k)
                        .checked_mul(v[k])
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(InterpError::Overflow)
                })
            })
            .collect()
    }

    /// Entrywise `>=`.
    pub fn ge(&self, other: &Matrix) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a >= b)
    }
}

pub(crate) fn add_vec(a: &[u64], b: &[u64]) -> Result<Vec<u64>, InterpError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(InterpError::Overflow))
        .collect()
}

/// Matrix literal syntax: `[1,1;0,1]`, columns `[1;0]`.
pub(crate) fn write_grid<T: fmt::Display>(f: &mut impl fmt::Write, rows: &[Vec<T>]) -> fmt::Result {
    f.write_char('[')?;
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            f.write_char(';')?;
        }
        for (j, e) in row.iter().enumerate() {
            if j > 0 {
                f.write_char(',')?;
            }
            write!(f, "{e}")?;
        }
    }
    f.write_char(']')
}

/// `[f](x_0..x_{n-1}) = Σ M_i·x_i + c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolInterp {
    pub coeffs: Vec<Matrix>,
    pub constant: Vec<u64>,
}

impl SymbolInterp {
    pub fn zero(dim: usize, arity: usize) -> Self {
        SymbolInterp {
            coeffs: vec![Matrix::zero(dim); arity],
            constant: vec![0; dim],
        }
    }

    /// Scalar form for polynomial interpretations: `Σ a_i·x_i + c`.
    pub fn poly(coeffs: &[u64], constant: u64) -> Self {
        SymbolInterp {
            coeffs: coeffs.iter().map(|&a| Matrix::scalar(1, a)).collect(),
            constant: vec![constant],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    kind: InterpKind,
    dim: usize,
    funs: Vec<SymbolInterp>,
}

impl Interpretation {
    /// `funs` is indexed by symbol id.
    pub fn new(kind: InterpKind, dim: usize, funs: Vec<SymbolInterp>) -> Result<Self, InterpError> {
        if kind == InterpKind::Poly && dim != 1 {
            return Err(InterpError::PolyDimension);
        }
        for fi in &funs {
            if fi.constant.len() != dim {
                return Err(InterpError::Dimension {
                    expected: dim,
                    found: fi.constant.len(),
                });
            }
            if let Some(m) = fi.coeffs.iter().find(|m| m.dim != dim) {
                return Err(InterpError::Dimension {
                    expected: dim,
                    found: m.dim,
                });
            }
        }
        Ok(Interpretation { kind, dim, funs })
    }

    pub fn poly(funs: Vec<SymbolInterp>) -> Result<Self, InterpError> {
        Self::new(InterpKind::Poly, 1, funs)
    }

    pub fn matrix(dim: usize, funs: Vec<SymbolInterp>) -> Result<Self, InterpError> {
        Self::new(InterpKind::Matrix, dim, funs)
    }

    /// All-zero interpretation for the signature of `trs`.
    pub fn zero(kind: InterpKind, dim: usize, trs: &Trs) -> Self {
        let funs = trs
            .symbols()
            .iter()
            .map(|s| SymbolInterp::zero(dim, s.arity))
            .collect();
        Interpretation { kind, dim, funs }
    }

    pub fn kind(&self) -> InterpKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn funs(&self) -> &[SymbolInterp] {
        &self.funs
    }

    pub fn fun(&self, f: SymId) -> Result<&SymbolInterp, InterpError> {
        self.funs.get(f.0).ok_or(InterpError::Missing(f))
    }

    pub(crate) fn fun_mut(&mut self, f: SymId) -> &mut SymbolInterp {
        &mut self.funs[f.0]
    }

    fn fun_with_arity(&self, f: SymId, arity: usize) -> Result<&SymbolInterp, InterpError> {
        let fi = self.fun(f)?;
        if fi.coeffs.len() != arity {
            return Err(InterpError::ArityMismatch {
                sym: f,
                expected: arity,
                found: fi.coeffs.len(),
            });
        }
        Ok(fi)
    }

    /// Coverage of the whole signature with matching arities.
    pub fn covers(&self, trs: &Trs) -> Result<(), InterpError> {
        for f in trs.sym_ids() {
            self.fun_with_arity(f, trs.arity(f))?;
        }
        Ok(())
    }

    /// Prints `[f]` for symbol `f` in template syntax, e.g. `[1,1;0,1]x0 + x1 + [1;0]`.
    pub fn display_fun(&self, f: SymId) -> impl fmt::Display + '_ {
        DisplayFun { interp: self, f }
    }

    /// Prints every interpretation on its own line: `[+] = x0 + x1`.
    pub fn display<'a>(&'a self, trs: &'a Trs) -> impl fmt::Display + 'a {
        DisplayInterp { interp: self, trs }
    }
}

struct DisplayFun<'a> {
    interp: &'a Interpretation,
    f: SymId,
}

impl fmt::Display for DisplayFun<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fi = &self.interp.funs[self.f.0];
        let mut parts = Vec::new();
        for (i, m) in fi.coeffs.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let mut s = String::new();
            if !m.is_identity() {
                match self.interp.kind {
                    InterpKind::Poly => s.push_str(&m.get(0, 0).to_string()),
                    InterpKind::Matrix => write_grid(&mut s, &m.rows())?,
                }
            }
            s.push_str(&format!("x{i}"));
            parts.push(s);
        }
        if fi.constant.iter().any(|&c| c != 0) {
            match self.interp.kind {
                InterpKind::Poly => parts.push(fi.constant[0].to_string()),
                InterpKind::Matrix => {
                    let mut s = String::new();
                    let col: Vec<Vec<u64>> = fi.constant.iter().map(|&c| vec![c]).collect();
                    write_grid(&mut s, &col)?;
                    parts.push(s);
                }
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

struct DisplayInterp<'a> {
    interp: &'a Interpretation,
    trs: &'a Trs,
}

impl fmt::Display for DisplayInterp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.trs.sym_ids() {
            writeln!(
                f,
                "[{}] = {}",
                self.trs.symbol(g).name,
                self.interp.display_fun(g)
            )?;
        }
        Ok(())
    }
}

/// `[t] = Σ coeff(x)·x + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinForm {
    pub coeffs: BTreeMap<VarId, Matrix>,
    pub constant: Vec<u64>,
}

impl LinForm {
    pub fn coeff(&self, x: VarId, dim: usize) -> Matrix {
        self.coeffs
            .get(&x)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(dim))
    }
}

pub fn linear_form(interp: &Interpretation, t: &Term) -> Result<LinForm, InterpError> {
    let d = interp.dim;
    match t {
        Term::Var(x) => Ok(LinForm {
            coeffs: BTreeMap::from([(*x, Matrix::identity(d))]),
            constant: vec![0; d],
        }),
        Term::App(f, args) => {
            let fi = interp.fun_with_arity(*f, args.len())?;
            let mut out = LinForm {
                coeffs: BTreeMap::new(),
                constant: fi.constant.clone(),
            };
            for (m, a) in fi.coeffs.iter().zip(args) {
                let sub = linear_form(interp, a)?;
                for (x, c) in sub.coeffs {
                    let prod = m.mul(&c)?;
                    let entry = match out.coeffs.remove(&x) {
                        Some(prev) => prev.add(&prod)?,
                        None => prod,
                    };
                    out.coeffs.insert(x, entry);
                }
                out.constant = add_vec(&out.constant, &m.apply(&sub.constant)?)?;
            }
            Ok(out)
        }
    }
}

/// Coefficient of `x` in `[t]`, computed only from the matrices on paths to `x`.
pub fn coefficient_of(interp: &Interpretation, t: &Term, x: VarId) -> Result<Matrix, InterpError> {
    let d = interp.dim;
    match t {
        Term::Var(y) if *y == x => Ok(Matrix::identity(d)),
        Term::Var(_) => Ok(Matrix::zero(d)),
        Term::App(f, args) => {
            let fi = interp.fun_with_arity(*f, args.len())?;
            let mut acc = Matrix::zero(d);
            for (m, a) in fi.coeffs.iter().zip(args) {
                if a.contains_var(x) {
                    acc = acc.add(&m.mul(&coefficient_of(interp, a, x)?)?)?;
                }
            }
            Ok(acc)
        }
    }
}

/// Constant part of `[t]`.
pub fn constant_of(interp: &Interpretation, t: &Term) -> Result<Vec<u64>, InterpError> {
    match t {
        Term::Var(_) => Ok(vec![0; interp.dim]),
        Term::App(f, args) => {
            let fi = interp.fun_with_arity(*f, args.len())?;
            let mut acc = fi.constant.clone();
            for (m, a) in fi.coeffs.iter().zip(args) {
                if !a.is_var() {
                    acc = add_vec(&acc, &m.apply(&constant_of(interp, a)?)?)?;
                }
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Strict,
    No,
}

/// Constant-part comparison: first component strictly greater, the rest `>=`.
pub(crate) fn constant_gt(l: &[u64], r: &[u64]) -> bool {
    match (l.split_first(), r.split_first()) {
        (Some((l0, lrest)), Some((r0, rrest))) => {
            l0 > r0 && lrest.iter().zip(rrest).all(|(a, b)| a >= b)
        }
        _ => false,
    }
}

pub fn orients(interp: &Interpretation, rule: &Rule) -> Result<Orientation, InterpError> {
    let l = linear_form(interp, &rule.lhs)?;
    let r = linear_form(interp, &rule.rhs)?;
    let d = interp.dim;
    let coeffs_ok = r.coeffs.iter().all(|(x, rc)| l.coeff(*x, d).ge(rc));
    Ok(if coeffs_ok && constant_gt(&l.constant, &r.constant) {
        Orientation::Strict
    } else {
        Orientation::No
    })
}

/// Every argument coefficient has a positive top-left entry.
pub fn monotone(interp: &Interpretation) -> bool {
    interp
        .funs
        .iter()
        .all(|fi| fi.coeffs.iter().all(|m| m.get(0, 0) >= 1))
}

pub fn eval_numeric(
    form: &LinForm,
    assignment: &BTreeMap<VarId, Vec<u64>>,
) -> Result<Vec<u64>, InterpError> {
    let mut acc = form.constant.clone();
    for (x, m) in &form.coeffs {
        let v = assignment.get(x).ok_or(InterpError::MissingVariable(*x))?;
        if v.len() != m.dim {
            return Err(InterpError::Dimension {
                expected: m.dim,
                found: v.len(),
            });
        }
        acc = add_vec(&acc, &m.apply(v)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::{parse_term, parse_trs};

    fn add() -> Trs {
        parse_trs("(VAR x y)(RULES +(0,y) -> y  +(s(x),y) -> s(+(x,y)))").unwrap()
    }

    fn m(rows: &[&[u64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    // [0] = (0,0), [s] = x0 + (1,1), [+] = [1,1;0,1]x0 + x1 + (1,0); order [+, 0, s].
    fn addition_matrix() -> Interpretation {
        Interpretation::matrix(
            2,
            vec![
                SymbolInterp {
                    coeffs: vec![m(&[&[1, 1], &[0, 1]]), Matrix::identity(2)],
                    constant: vec![1, 0],
                },
                SymbolInterp {
                    coeffs: vec![],
                    constant: vec![0, 0],
                },
                SymbolInterp {
                    coeffs: vec![Matrix::identity(2)],
                    constant: vec![1, 1],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn linear_forms_of_addition_matrices() {
        let trs = add();
        let mi = addition_matrix();
        let (x, y) = (VarId(0), VarId(1));
        let l1 = linear_form(&mi, &trs.rules()[0].lhs).unwrap();
        assert_eq!(l1.coeff(y, 2), Matrix::identity(2));
        assert_eq!(l1.constant, vec![1, 0]);
        let l2 = linear_form(&mi, &trs.rules()[1].lhs).unwrap();
        let r2 = linear_form(&mi, &trs.rules()[1].rhs).unwrap();
        assert_eq!(l2.coeff(x, 2), m(&[&[1, 1], &[0, 1]]));
        assert_eq!(l2.coeff(y, 2), Matrix::identity(2));
        assert_eq!(l2.constant, vec![3, 1]);
        assert_eq!(r2.coeff(x, 2), m(&[&[1, 1], &[0, 1]]));
        assert_eq!(r2.coeff(y, 2), Matrix::identity(2));
        assert_eq!(r2.constant, vec![2, 1]);
        let v = linear_form(&mi, &Term::Var(x)).unwrap();
        assert_eq!(v.coeff(x, 2), Matrix::identity(2));
        assert_eq!(v.constant, vec![0, 0]);
    }

    #[test]
    fn coefficient_of_matches_linear_form() {
        let trs = add();
        let mi = addition_matrix();
        for r in trs.rules() {
            for t in [&r.lhs, &r.rhs] {
                let lf = linear_form(&mi, t).unwrap();
                for x in [VarId(0), VarId(1)] {
                    assert_eq!(coefficient_of(&mi, t, x).unwrap(), lf.coeff(x, 2));
                }
            }
        }
    }

    #[test]
    fn orientation() {
        let trs = add();
        let mi = addition_matrix();
        for r in trs.rules() {
            assert_eq!(orients(&mi, r), Ok(Orientation::Strict));
        }
        // [0]=0, [s]=x0+1, [+]=x0+x1+2: constants 3 vs 3 on the second rule
        let pi = Interpretation::poly(vec![
            SymbolInterp::poly(&[1, 1], 2),
            SymbolInterp::poly(&[], 0),
            SymbolInterp::poly(&[1], 1),
        ])
        .unwrap();
        assert_eq!(orients(&pi, &trs.rules()[0]), Ok(Orientation::Strict));
        assert_eq!(orients(&pi, &trs.rules()[1]), Ok(Orientation::No));
    }

    #[test]
    fn monotonicity() {
        assert!(monotone(&addition_matrix()));
        let pi = Interpretation::poly(vec![SymbolInterp::poly(&[0], 1)]).unwrap();
        assert!(!monotone(&pi));
        assert!(monotone(&Interpretation::poly(vec![]).unwrap()));
    }

    #[test]
    fn numeric_evaluation() {
        let trs = add();
        let mi = addition_matrix();
        let form = linear_form(&mi, &trs.rules()[0].lhs).unwrap();
        // I·(5,7) + (1,0)
        let asg = BTreeMap::from([(VarId(1), vec![5, 7])]);
        assert_eq!(eval_numeric(&form, &asg), Ok(vec![6, 7]));
        assert_eq!(
            eval_numeric(&form, &BTreeMap::new()),
            Err(InterpError::MissingVariable(VarId(1)))
        );
        let c = LinForm {
            coeffs: BTreeMap::new(),
            constant: vec![4],
        };
        assert_eq!(eval_numeric(&c, &BTreeMap::new()), Ok(vec![4]));
        let pi = Interpretation::poly(vec![]).unwrap();
        let xf = linear_form(&pi, &Term::Var(VarId(0))).unwrap();
        assert_eq!(
            eval_numeric(&xf, &BTreeMap::from([(VarId(0), vec![3])])),
            Ok(vec![3])
        );
    }

    #[test]
    fn errors() {
        let trs = add();
        let short = Interpretation::poly(vec![SymbolInterp::poly(&[1, 1], 0)]).unwrap();
        let t = parse_term(&trs, "+(0,y)").unwrap();
        assert_eq!(linear_form(&short, &t), Err(InterpError::Missing(SymId(1))));
        let wrong = Interpretation::poly(vec![SymbolInterp::poly(&[1], 0)]).unwrap();
        assert!(matches!(
            linear_form(&wrong, &t),
            Err(InterpError::ArityMismatch { .. })
        ));
        let big = Interpretation::poly(vec![
            SymbolInterp::poly(&[u64::MAX, 1], 0),
            SymbolInterp::poly(&[], 2),
        ])
        .unwrap();
        assert_eq!(linear_form(&big, &t), Err(InterpError::Overflow));
    }

    #[test]
    fn printing() {
        let trs = add();
        let out = addition_matrix().display(&trs).to_string();
        assert_eq!(
            out,
            "[+] = [1,1;0,1]x0 + x1 + [1;0]\n[0] = 0\n[s] = x0 + [1;1]\n"
        );
        let pi = Interpretation::poly(vec![
            SymbolInterp::poly(&[2, 1], 2),
            SymbolInterp::poly(&[], 0),
            SymbolInterp::poly(&[1], 1),
        ])
        .unwrap();
        assert_eq!(
            pi.display(&trs).to_string(),
            "[+] = 2x0 + x1 + 2\n[0] = 0\n[s] = x0 + 1\n"
        );
    }
}
