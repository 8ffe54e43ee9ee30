//! Bounded parameter search for each method, narrowed by templates.
//!
//! Every method is cast as a finite-domain constraint problem over scalar
//! parameters (precedence levels, weights, matrix entries). Each rule and
//! each template literal becomes a constraint whose scope is the parameters
//! it can observe, so the search prunes as soon as a rule is decided.

mod csp;
mod poly;
mod space;

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::certificate::{Certificate, Method};
use crate::interp::{InterpKind, Interpretation, Orientation, monotone, orients};
use crate::orders::{
    PrecMode, PrecOrd, Precedence, WeightFn, kbo_admissible, kbo_gt, kbo_gt_unchecked, lpo_gt,
    lpo_gt_unchecked, variable_condition,
};
use crate::template::{CheckedAtom, CheckedTemplate, Literal, TemplateError, atom_holds, to_dnf};
use crate::trs::{SymId, Term, Trs, VarId};

use csp::{Csp, Model, SearchResult};
use poly::{Ineq, Poly, PolyMatrix};
pub use space::{EmptyDomain, Param, Restricted, Space, restrict_domains};

/// Search bounds and options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub weight_bound: u64,
    pub coeff_bound: u64,
    pub entry_bound: u64,
    /// Matrix dimension; inferred from the template or 2 when absent.
    pub dim: Option<usize>,
    pub mode: PrecMode,
    /// Fixed variable weight for KBO.
    pub w0: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            weight_bound: 7,
            coeff_bound: 3,
            entry_bound: 3,
            dim: None,
            mode: PrecMode::Strict,
            w0: None,
            time_limit: None,
        }
    }
}

pub const DEFAULT_MATRIX_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaybeReason {
    /// The whole (restricted) space was searched without success.
    Exhausted,
    /// Every disjunct of the template is contradictory on its own.
    TemplateUnsatisfiable,
    Timeout,
}

impl MaybeReason {
    pub fn as_str(self) -> &'static str {
        match self {
            MaybeReason::Exhausted => "Exhausted",
            MaybeReason::TemplateUnsatisfiable => "TemplateUnsatisfiable",
            MaybeReason::Timeout => "Timeout",
        }
    }
}

impl fmt::Display for MaybeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Yes(Certificate),
    Maybe(MaybeReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    /// Internal error: the search produced a certificate the checker rejects.
    #[error("search produced an invalid certificate: {}", .0.join("; "))]
    UnsoundCertificate(Vec<String>),
}

fn config_err(msg: impl Into<String>) -> ProveError {
    ProveError::Config(msg.into())
}

/// Matrix dimension used for `method`, reconciling the configuration and template.
pub fn resolve_dim(
    method: Method,
    cfg: &SearchConfig,
    tmpl: Option<&CheckedTemplate>,
) -> Result<usize, ProveError> {
    let tdim = tmpl.and_then(|t| t.dim);
    let has_inters = tmpl.is_some_and(|t| {
        t.ast
            .atoms()
            .iter()
            .any(|a| matches!(a, CheckedAtom::Inters(_)))
    });
    match method {
        Method::Lpo | Method::Kbo => Ok(1),
        Method::Poly => match [cfg.dim, tdim].into_iter().flatten().find(|&d| d != 1) {
            Some(d) => Err(config_err(format!(
                "polynomial interpretations have dimension 1, not {d}"
            ))),
            None => Ok(1),
        },
        Method::Matrix => match (cfg.dim, tdim) {
            (Some(0), _) => Err(config_err("dimension must be at least 1")),
            (Some(a), Some(b)) if a != b => Err(TemplateError::Dimension(a, b).into()),
            (Some(d), _) | (None, Some(d)) => Ok(d),
            (None, None) if has_inters => Err(TemplateError::NoDimension.into()),
            (None, None) => Ok(DEFAULT_MATRIX_DIM),
        },
    }
}

fn check_atoms_fit(method: Method, tmpl: &CheckedTemplate) -> Result<(), ProveError> {
    for atom in tmpl.ast.atoms() {
        let ok = match atom {
            CheckedAtom::Prec(_) => matches!(method, Method::Lpo | Method::Kbo),
            CheckedAtom::Weights(_) => method == Method::Kbo,
            CheckedAtom::Inters(_) => matches!(method, Method::Poly | Method::Matrix),
        };
        if !ok {
            let kind = match atom {
                CheckedAtom::Prec(_) => "precedence",
                CheckedAtom::Weights(_) => "weight",
                CheckedAtom::Inters(_) => "interpretation",
            };
            return Err(config_err(format!(
                "{kind} templates do not apply to {}",
                method.name()
            )));
        }
    }
    Ok(())
}

/// Searches for a certificate of `method` orienting every rule of `trs`.
///
/// Template disjuncts are tried in order; within one, the first candidate in
/// search order wins. Every certificate is re-validated before it is returned.
pub fn prove(
    trs: &Trs,
    method: Method,
    cfg: &SearchConfig,
    tmpl: Option<&CheckedTemplate>,
) -> Result<Outcome, ProveError> {
    if let Some(t) = tmpl {
        check_atoms_fit(method, t)?;
    }
    if cfg.w0 == Some(0) {
        return Err(config_err("w0 must be positive"));
    }
    if cfg.w0.is_some() && method != Method::Kbo {
        return Err(config_err(format!(
            "w0 does not apply to {}",
            method.name()
        )));
    }
    let dim = resolve_dim(method, cfg, tmpl)?;
    let mode = if cfg.mode == PrecMode::Quasi || tmpl.is_some_and(|t| t.quasi) {
        PrecMode::Quasi
    } else {
        PrecMode::Strict
    };
    let deadline = cfg.time_limit.map(|d| Instant::now() + d);
    let space = Space::new(trs, method, cfg, dim);
    let disjuncts = match tmpl {
        Some(t) => to_dnf(&t.ast)?,
        None => vec![Vec::new()],
    };
    let statically_impossible = method == Method::Kbo
        && trs
            .rules()
            .iter()
            .any(|r| !variable_condition(&r.lhs, &r.rhs));
    let mut all_contradictory = true;
    for disjunct in &disjuncts {
        let Ok(restricted) = restrict_domains(disjunct, &space) else {
            continue;
        };
        all_contradictory = false;
        if statically_impossible {
            break;
        }
        let mut search = Search::build(trs, method, mode, dim, &restricted);
        match search.csp.solve(&mut search.model, deadline) {
            SearchResult::Found(_) => {
                let cert = search.model.cert;
                let failures = certificate_failures(trs, &cert, tmpl);
                if !failures.is_empty() {
                    return Err(ProveError::UnsoundCertificate(failures));
                }
                return Ok(Outcome::Yes(cert));
            }
            SearchResult::Timeout => return Ok(Outcome::Maybe(MaybeReason::Timeout)),
            SearchResult::Exhausted => {}
        }
    }
    Ok(Outcome::Maybe(if all_contradictory {
        MaybeReason::TemplateUnsatisfiable
    } else {
        MaybeReason::Exhausted
    }))
}

/// Reasons `cert` fails to prove termination of `trs` (and to satisfy
/// `tmpl`); empty when it is valid.
pub fn certificate_failures(
    trs: &Trs,
    cert: &Certificate,
    tmpl: Option<&CheckedTemplate>,
) -> Vec<String> {
    let mut out = Vec::new();
    let rule_text = |i: usize| trs.format_rule(&trs.rules()[i]);
    match cert {
        Certificate::Lpo { precedence } => {
            for (i, r) in trs.rules().iter().enumerate() {
                match lpo_gt(precedence, &r.lhs, &r.rhs) {
                    Ok(true) => {}
                    Ok(false) => out.push(format!("rule {} is not oriented", rule_text(i))),
                    Err(e) => out.push(e.to_string()),
                }
            }
        }
        Certificate::Kbo {
            precedence,
            weights,
        } => {
            let n = trs.symbols().len();
            if precedence.levels().len() < n || weights.weights().len() < n {
                out.push("certificate does not cover the signature".to_string());
            } else if !kbo_admissible(precedence, weights, trs) {
                out.push("weights are not admissible for the precedence".to_string());
            }
            for (i, r) in trs.rules().iter().enumerate() {
                match kbo_gt(precedence, weights, &r.lhs, &r.rhs) {
                    Ok(true) => {}
                    Ok(false) => out.push(format!("rule {} is not oriented", rule_text(i))),
                    Err(e) => out.push(e.to_string()),
                }
            }
        }
        Certificate::Interp(interp) => {
            if let Err(e) = interp.covers(trs) {
                out.push(e.to_string());
            } else if !monotone(interp) {
                out.push("interpretation is not monotone".to_string());
            }
            for (i, r) in trs.rules().iter().enumerate() {
                match orients(interp, r) {
                    Ok(Orientation::Strict) => {}
                    Ok(Orientation::No) => {
                        out.push(format!("rule {} is not oriented", rule_text(i)))
                    }
                    Err(e) => out.push(e.to_string()),
                }
            }
        }
    }
    if let Some(t) = tmpl {
        match t.holds(cert) {
            Ok(true) => {}
            Ok(false) => out.push("certificate violates the template".to_string()),
            Err(e) => out.push(e.to_string()),
        }
    }
    out
}

/// Independent validation of a certificate.
pub fn check_certificate(trs: &Trs, cert: &Certificate, tmpl: Option<&CheckedTemplate>) -> bool {
    certificate_failures(trs, cert, tmpl).is_empty()
}

enum Check {
    LpoRule(usize),
    KboRule(usize),
    /// A unary symbol of weight 0 must be comparable to the other symbol.
    KboUnary(SymId, SymId),
    /// Exact orientation of an interpretation rule.
    Orients(usize),
    /// Compiled necessary condition, checked on partial assignments too.
    Ineq(Ineq),
    Filter(Literal<CheckedAtom>),
}

/// The candidate under construction plus, per parameter, the value range
/// still open to it: `lo == hi` once assigned, the domain bounds otherwise.
struct CandidateModel<'a> {
    trs: &'a Trs,
    params: Vec<Param>,
    bounds: Vec<(u64, u64)>,
    lo: Vec<u64>,
    hi: Vec<u64>,
    checks: Vec<Check>,
    cert: Certificate,
}

impl Model for CandidateModel<'_> {
    fn assign(&mut self, var: usize, value: u64) {
        self.lo[var] = value;
        self.hi[var] = value;
        match (self.params[var], &mut self.cert) {
            (
                Param::Level(f),
                Certificate::Lpo { precedence } | Certificate::Kbo { precedence, .. },
            ) => precedence.set_level(f, value as u32),
            (Param::W0, Certificate::Kbo { weights, .. }) => weights.set_w0(value),
            (Param::Weight(f), Certificate::Kbo { weights, .. }) => weights.set_weight(f, value),
            (Param::Coeff { sym, arg, entry }, Certificate::Interp(i)) => {
                i.fun_mut(sym).coeffs[arg].entries_mut()[entry] = value
            }
            (Param::Constant { sym, entry }, Certificate::Interp(i)) => {
                i.fun_mut(sym).constant[entry] = value
            }
            (p, _) => unreachable!("parameter {p:?} does not belong to this method"),
        }
    }

    fn unassign(&mut self, var: usize) {
        (self.lo[var], self.hi[var]) = self.bounds[var];
    }

    fn check(&self, c: usize) -> bool {
        let rules = self.trs.rules();
        match (&self.checks[c], &self.cert) {
            (Check::Ineq(ineq), _) => ineq.feasible(&self.lo, &self.hi),
            (Check::LpoRule(r), Certificate::Lpo { precedence }) => {
                lpo_gt_unchecked(precedence, &rules[*r].lhs, &rules[*r].rhs)
            }
            (
                Check::KboRule(r),
                Certificate::Kbo {
                    precedence,
                    weights,
                },
            ) => kbo_gt_unchecked(precedence, weights, &rules[*r].lhs, &rules[*r].rhs),
            (
                Check::KboUnary(f, g),
                Certificate::Kbo {
                    precedence,
                    weights,
                },
            ) => {
                weights.weights()[f.0] != 0
                    || precedence.cmp_unchecked(*f, *g) != PrecOrd::Incomparable
            }
            (Check::Orients(r), Certificate::Interp(i)) => {
                orients(i, &rules[*r]) == Ok(Orientation::Strict)
            }
            (Check::Filter(lit), cert) => atom_holds(lit, cert).unwrap_or(false),
            _ => unreachable!("check does not belong to this method"),
        }
    }
}

struct Search<'a> {
    csp: Csp,
    model: CandidateModel<'a>,
}

impl<'a> Search<'a> {
    fn build(
        trs: &'a Trs,
        method: Method,
        mode: PrecMode,
        dim: usize,
        restricted: &Restricted,
    ) -> Self {
        let space = &restricted.space;
        let n = trs.symbols().len();
        let cert = match method {
            Method::Lpo => Certificate::Lpo {
                precedence: Precedence::new(vec![0; n], mode),
            },
            Method::Kbo => Certificate::Kbo {
                precedence: Precedence::new(vec![0; n], mode),
                weights: WeightFn::new(1, vec![0; n]).expect("w0 of 1 is valid"),
            },
            Method::Poly => Certificate::Interp(Interpretation::zero(InterpKind::Poly, 1, trs)),
            Method::Matrix => {
                Certificate::Interp(Interpretation::zero(InterpKind::Matrix, dim, trs))
            }
        };
        let bounds: Vec<(u64, u64)> = space
            .domains()
            .iter()
            .map(|d| {
                (
                    d.first().copied().unwrap_or(0),
                    d.last().copied().unwrap_or(0),
                )
            })
            .collect();
        let mut search = Search {
            csp: Csp::new(space.domains().to_vec()),
            model: CandidateModel {
                trs,
                params: space.params().to_vec(),
                lo: bounds.iter().map(|b| b.0).collect(),
                hi: bounds.iter().map(|b| b.1).collect(),
                bounds,
                checks: Vec::new(),
                cert,
            },
        };
        let idx = |p: Param| space.index_of(p);
        let levels = |syms: &BTreeSet<SymId>| {
            syms.iter()
                .filter_map(|f| idx(Param::Level(*f)))
                .collect::<Vec<_>>()
        };
        let symbolic = Symbolic { space, dim };
        for (r, rule) in trs.rules().iter().enumerate() {
            let syms: BTreeSet<SymId> = rule.symbols().into_iter().collect();
            match method {
                Method::Lpo => search.add(Check::LpoRule(r), levels(&syms)),
                Method::Kbo => {
                    let diff = symbolic
                        .weight(&rule.lhs)
                        .add(&symbolic.weight(&rule.rhs), -1);
                    search.add_ineq(Ineq::at_least(&diff, 0));
                    let weights = [Param::W0]
                        .into_iter()
                        .chain(syms.iter().map(|f| Param::Weight(*f)))
                        .filter_map(idx);
                    search.add(
                        Check::KboRule(r),
                        weights.chain(levels(&syms)).collect::<Vec<_>>(),
                    );
                }
                Method::Poly | Method::Matrix => {
                    for x in rule.lhs.vars() {
                        if let (Some(l), Some(rr)) = (
                            symbolic.coefficient(&rule.lhs, x),
                            symbolic.coefficient(&rule.rhs, x),
                        ) {
                            for (a, b) in l.data.iter().zip(&rr.data) {
                                search.add_ineq(Ineq::at_least(&a.add(b, -1), 0));
                            }
                        }
                    }
                    if let (Some(l), Some(rr)) =
                        (symbolic.constant(&rule.lhs), symbolic.constant(&rule.rhs))
                    {
                        for (k, (a, b)) in l.iter().zip(&rr).enumerate() {
                            search.add_ineq(Ineq::at_least(&a.add(b, -1), i128::from(k == 0)));
                        }
                    }
                    let all = space.params().iter().enumerate().filter(|(_, p)| match p {
                        Param::Coeff { sym, .. } | Param::Constant { sym, .. } => {
                            syms.contains(sym)
                        }
                        _ => false,
                    });
                    search.add(Check::Orients(r), all.map(|(i, _)| i).collect::<Vec<_>>());
                }
            }
        }
        if method == Method::Kbo {
            for f in trs.sym_ids() {
                match trs.arity(f) {
                    0 => {
                        if let (Some(w), Some(w0)) = (idx(Param::Weight(f)), idx(Param::W0)) {
                            search
                                .add_ineq(Ineq::at_least(&Poly::var(w).add(&Poly::var(w0), -1), 0));
                        }
                    }
                    1 => {
                        for g in trs.sym_ids().filter(|g| *g != f) {
                            let scope = [Param::Weight(f), Param::Level(f), Param::Level(g)]
                                .into_iter()
                                .filter_map(idx);
                            search.add(Check::KboUnary(f, g), scope.collect::<Vec<_>>());
                        }
                    }
                    _ => {}
                }
            }
        }
        for lit in &restricted.filters {
            search.add(Check::Filter(lit.clone()), space.atom_params(&lit.atom));
        }
        search
    }

    fn add(&mut self, check: Check, scope: Vec<usize>) {
        let early = matches!(check, Check::Ineq(_));
        let id = self.csp.add(scope, early);
        debug_assert_eq!(id, self.model.checks.len());
        self.model.checks.push(check);
    }

    fn add_ineq(&mut self, ineq: Option<Ineq>) {
        if let Some(ineq) = ineq {
            let scope = ineq.vars().collect();
            self.add(Check::Ineq(ineq), scope);
        }
    }
}

/// Symbolic evaluation of terms over the parameters of a space.
struct Symbolic<'a> {
    space: &'a Space,
    dim: usize,
}

impl Symbolic<'_> {
    fn param(&self, p: Param) -> Poly {
        self.space.index_of(p).map_or_else(Poly::default, Poly::var)
    }

    /// KBO weight: one `w0` per variable occurrence plus the symbol weights.
    fn weight(&self, t: &Term) -> Poly {
        match t {
            Term::Var(_) => self.param(Param::W0),
            Term::App(f, args) => args.iter().fold(self.param(Param::Weight(*f)), |acc, a| {
                acc.add(&self.weight(a), 1)
            }),
        }
    }

    fn matrix(&self, sym: SymId, arg: usize) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            data: (0..self.dim * self.dim)
                .map(|entry| self.param(Param::Coeff { sym, arg, entry }))
                .collect(),
        }
    }

    fn coefficient(&self, t: &Term, x: VarId) -> Option<PolyMatrix> {
        match t {
            Term::Var(y) if *y == x => Some(PolyMatrix::identity(self.dim)),
            Term::Var(_) => Some(PolyMatrix::zero(self.dim)),
            Term::App(f, args) => {
                let mut acc = PolyMatrix::zero(self.dim);
                for (i, a) in args.iter().enumerate() {
                    if a.contains_var(x) {
                        acc = acc.add(&self.matrix(*f, i).mul(&self.coefficient(a, x)?)?);
                    }
                }
                Some(acc)
            }
        }
    }

    fn constant(&self, t: &Term) -> Option<Vec<Poly>> {
        match t {
            Term::Var(_) => Some(vec![Poly::default(); self.dim]),
            Term::App(f, args) => {
                let mut acc: Vec<Poly> = (0..self.dim)
                    .map(|entry| self.param(Param::Constant { sym: *f, entry }))
                    .collect();
                for (i, a) in args.iter().enumerate() {
                    if !a.is_var() {
                        let v = self.matrix(*f, i).apply(&self.constant(a)?)?;
                        acc = acc.iter().zip(&v).map(|(p, q)| p.add(q, 1)).collect();
                    }
                }
                Some(acc)
            }
        }
    }
}
