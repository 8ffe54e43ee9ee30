//! Termination proving for first-order term rewrite systems with LPO, KBO,
//! linear polynomial interpretations and matrix interpretations, where the
//! parameter search can be narrowed down by templates.
//!
//! A fully fixing template turns the prover into a checker for a given proof.

pub mod certificate;
pub mod interp;
pub mod orders;
pub mod solver;
pub mod strategy;
pub mod template;
pub mod trs;

pub use certificate::{Certificate, Method};
pub use interp::{InterpKind, Interpretation, LinForm, Matrix, Orientation, SymbolInterp};
pub use orders::{PrecMode, PrecOrd, Precedence, WeightFn};
pub use solver::{MaybeReason, Outcome, ProveError, SearchConfig, check_certificate, prove};
pub use strategy::{
    RunError, Strategy, StrategyError, fixing_strategy, parse_strategy, render, render_body,
    run_strategy,
};
pub use template::{CheckedTemplate, Template, TemplateAst, TemplateError};
pub use trs::{Rule, SymId, Symbol, Term, Trs, TrsError, VarId, parse_trs};
