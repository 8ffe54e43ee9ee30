//! Lexicographic path order and Knuth-Bendix order for fixed parameters.

use std::fmt;

use thiserror::Error;

use crate::trs::{SymId, Term, Trs, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecMode {
    Strict,
    Quasi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecOrd {
    Gt,
    Eq,
    /// Neither greater nor equivalent, seen from the left symbol.
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("symbol #{} is not covered by the parameters", .0.0)]
    UnknownSymbol(SymId),
    #[error("w0 must be at least 1")]
    ZeroW0,
}

/// A (quasi-)precedence given as a level per symbol.
///
/// Higher level means bigger. In strict mode two distinct symbols on the
/// same level are incomparable; in quasi mode they are equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Precedence {
    levels: Vec<u32>,
    mode: PrecMode,
}

impl Precedence {
    pub fn new(levels: Vec<u32>, mode: PrecMode) -> Self {
        Precedence { levels, mode }
    }

    pub fn mode(&self) -> PrecMode {
        self.mode
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, f: SymId) -> Result<u32, OrderError> {
        self.levels
            .get(f.0)
            .copied()
            .ok_or(OrderError::UnknownSymbol(f))
    }

    pub fn covers(&self, t: &Term) -> bool {
        t.symbols().iter().all(|f| f.0 < self.levels.len())
    }

    pub fn compare(&self, f: SymId, g: SymId) -> Result<PrecOrd, OrderError> {
        let (lf, lg) = (self.level(f)?, self.level(g)?);
        Ok(self.compare_levels(f, g, lf, lg))
    }

    fn compare_levels(&self, f: SymId, g: SymId, lf: u32, lg: u32) -> PrecOrd {
        if f == g {
            PrecOrd::Eq
        } else if lf > lg {
            PrecOrd::Gt
        } else if lf == lg && self.mode == PrecMode::Quasi {
            PrecOrd::Eq
        } else {
            PrecOrd::Incomparable
        }
    }

    pub(crate) fn set_level(&mut self, f: SymId, level: u32) {
        self.levels[f.0] = level;
    }

    pub(crate) fn cmp_unchecked(&self, f: SymId, g: SymId) -> PrecOrd {
        self.compare_levels(f, g, self.levels[f.0], self.levels[g.0])
    }

    /// Prints symbols by descending level, e.g. `+ > s ~ 0`.
    pub fn display<'a>(&'a self, trs: &'a Trs) -> impl fmt::Display + 'a {
        DisplayPrec { prec: self, trs }
    }

    /// Symbols grouped by level, highest level first, each group in signature order.
    pub fn groups(&self) -> Vec<Vec<SymId>> {
        let mut levels: Vec<u32> = self.levels.clone();
        levels.sort_unstable_by(|a, b| b.cmp(a));
        levels.dedup();
        levels
            .into_iter()
            .map(|l| {
                (0..self.levels.len())
                    .filter(|&i| self.levels[i] == l)
                    .map(SymId)
                    .collect()
            })
            .collect()
    }
}

struct DisplayPrec<'a> {
    prec: &'a Precedence,
    trs: &'a Trs,
}

impl fmt::Display for DisplayPrec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, group) in self.prec.groups().iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            for (j, g) in group.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ~ ")?;
                }
                f.write_str(&self.trs.symbol(*g).name)?;
            }
        }
        Ok(())
    }
}

pub fn prec_compare(p: &Precedence, f: SymId, g: SymId) -> Result<PrecOrd, OrderError> {
    p.compare(f, g)
}

fn check_covered(p: &Precedence, terms: &[&Term]) -> Result<(), OrderError> {
    for t in terms {
        if let Some(f) = t.symbols().into_iter().find(|f| f.0 >= p.levels.len()) {
            return Err(OrderError::UnknownSymbol(f));
        }
    }
    Ok(())
}

/// `s >lpo t`.
pub fn lpo_gt(p: &Precedence, s: &Term, t: &Term) -> Result<bool, OrderError> {
    check_covered(p, &[s, t])?;
    Ok(lpo_gt_unchecked(p, s, t))
}

pub(crate) fn lpo_gt_unchecked(p: &Precedence, s: &Term, t: &Term) -> bool {
    let Term::App(f, ss) = s else {
        return false;
    };
    match t {
        Term::Var(x) => s.contains_var(*x),
        Term::App(g, ts) => {
            if ss.iter().any(|si| si == t || lpo_gt_unchecked(p, si, t)) {
                return true;
            }
            match p.cmp_unchecked(*f, *g) {
                PrecOrd::Gt => ts.iter().all(|tj| lpo_gt_unchecked(p, s, tj)),
                PrecOrd::Eq if ss.len() == ts.len() => {
                    lex_gt(ss, ts, |a, b| lpo_gt_unchecked(p, a, b))
                        && ts.iter().all(|tj| lpo_gt_unchecked(p, s, tj))
                }
                _ => false,
            }
        }
    }
}

/// Leftmost lexicographic extension: skip syntactically equal prefixes,
/// then the first differing pair decides.
fn lex_gt(ss: &[Term], ts: &[Term], gt: impl Fn(&Term, &Term) -> bool) -> bool {
    ss.iter()
        .zip(ts)
        .find(|(a, b)| a != b)
        .is_some_and(|(a, b)| gt(a, b))
}

/// Weights for KBO: `w0` for every variable plus one weight per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightFn {
    w0: u64,
    weights: Vec<u64>,
}

impl WeightFn {
    pub fn new(w0: u64, weights: Vec<u64>) -> Result<Self, OrderError> {
        if w0 == 0 {
            return Err(OrderError::ZeroW0);
        }
        Ok(WeightFn { w0, weights })
    }

    pub fn w0(&self) -> u64 {
        self.w0
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, f: SymId) -> Result<u64, OrderError> {
        self.weights
            .get(f.0)
            .copied()
            .ok_or(OrderError::UnknownSymbol(f))
    }

    pub(crate) fn set_w0(&mut self, w0: u64) {
        self.w0 = w0;
    }

    pub(crate) fn set_weight(&mut self, f: SymId, w: u64) {
        self.weights[f.0] = w;
    }
}

/// Weight of a term; saturates instead of overflowing.
pub fn kbo_weight(wf: &WeightFn, t: &Term) -> Result<u64, OrderError> {
    if let Some(f) = t.symbols().into_iter().find(|f| f.0 >= wf.weights.len()) {
        return Err(OrderError::UnknownSymbol(f));
    }
    Ok(weight_unchecked(wf, t))
}

pub(crate) fn weight_unchecked(wf: &WeightFn, t: &Term) -> u64 {
    match t {
        Term::Var(_) => wf.w0,
        Term::App(f, args) => args.iter().fold(wf.weights[f.0], |acc, a| {
            acc.saturating_add(weight_unchecked(wf, a))
        }),
    }
}

/// Admissibility of weights and precedence over the symbols of `trs`.
pub fn kbo_admissible(p: &Precedence, wf: &WeightFn, trs: &Trs) -> bool {
    let n = trs.symbols().len();
    if p.levels.len() < n || wf.weights.len() < n {
        return false;
    }
    trs.sym_ids().all(|f| match trs.arity(f) {
        0 => wf.weights[f.0] >= wf.w0,
        1 if wf.weights[f.0] == 0 => trs
            .sym_ids()
            .all(|g| p.cmp_unchecked(f, g) != PrecOrd::Incomparable),
        _ => true,
    })
}

/// `s >kbo t`. Admissibility is the caller's responsibility.
pub fn kbo_gt(p: &Precedence, wf: &WeightFn, s: &Term, t: &Term) -> Result<bool, OrderError> {
    check_covered(p, &[s, t])?;
    kbo_weight(wf, s)?;
    kbo_weight(wf, t)?;
    Ok(kbo_gt_unchecked(p, wf, s, t))
}

pub(crate) fn variable_condition(s: &Term, t: &Term) -> bool {
    t.vars()
        .into_iter()
        .all(|x| s.count_var(x) >= t.count_var(x))
}

pub(crate) fn kbo_gt_unchecked(p: &Precedence, wf: &WeightFn, s: &Term, t: &Term) -> bool {
    if !variable_condition(s, t) {
        return false;
    }
    let (ws, wt) = (weight_unchecked(wf, s), weight_unchecked(wf, t));
    if ws != wt {
        return ws > wt;
    }
    match (s, t) {
        (Term::Var(_), _) => false,
        (Term::App(..), Term::Var(x)) => is_unary_tower_over(s, *x),
        (Term::App(f, ss), Term::App(g, ts)) => match p.cmp_unchecked(*f, *g) {
            PrecOrd::Gt => true,
            PrecOrd::Eq if ss.len() == ts.len() => {
                lex_gt(ss, ts, |a, b| kbo_gt_unchecked(p, wf, a, b))
            }
            _ => false,
        },
    }
}

/// `s = f1(f2(...fn(x)))` with `n >= 1` unary symbols.
///
/// Only consulted when `s` and `x` weigh the same, so every `fi` has weight
/// zero. Under a strict precedence admissibility leaves at most one such
/// symbol; a quasi-precedence may have several equivalent ones, and
/// allowing mixed towers keeps the order transitive.
fn is_unary_tower_over(s: &Term, x: VarId) -> bool {
    if s.is_var() {
        return false;
    }
    let mut cur = s;
    while let Term::App(_, args) = cur {
        if args.len() != 1 {
            return false;
        }
        cur = &args[0];
    }
    *cur == Term::Var(x)
}
