//! Strategy strings (`kbo -prec "+ > s > 0" -w0 1`), proof rendering, and
//! the fully-fixing strategy that re-derives a given certificate.

use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::certificate::{Certificate, Method};
use crate::interp::InterpKind;
use crate::orders::PrecMode;
use crate::solver::{Outcome, ProveError, SearchConfig, prove};
use crate::template::{
    CheckedTemplate, Template, TemplateAst, TemplateError, parse_inters, parse_prec, parse_weights,
    validate,
};
use crate::trs::Trs;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("unbalanced quotes in strategy")]
    Quoting,
    #[error("empty strategy")]
    Empty,
    #[error("unknown method `{0}` (expected lpo, kbo, poly or matrix)")]
    UnknownMethod(String),
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("flag `{flag}` does not apply to {method}")]
    FlagNotForMethod { flag: String, method: Method },
    #[error("flag `{0}` given twice")]
    DuplicateFlag(String),
    #[error("flag `{0}` needs an argument")]
    MissingArgument(String),
    #[error("flag `{flag}`: `{value}` is not a valid number")]
    BadNumber { flag: String, value: String },
    #[error("in {flag} template: {source}")]
    Template {
        flag: &'static str,
        source: TemplateError,
    },
}

/// A parsed strategy; template texts are kept verbatim until compiled
/// against a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub method: Method,
    pub prec: Option<String>,
    pub w0: Option<u64>,
    pub weights: Option<String>,
    pub inters: Option<String>,
    pub dim: Option<usize>,
    pub weight_bound: Option<u64>,
    pub coeff_bound: Option<u64>,
    pub entry_bound: Option<u64>,
    pub quasi: bool,
    /// Accepted for compatibility; direct proving is the only mode.
    pub direct: bool,
}

impl Strategy {
    pub fn new(method: Method) -> Self {
        Strategy {
            method,
            prec: None,
            w0: None,
            weights: None,
            inters: None,
            dim: None,
            weight_bound: None,
            coeff_bound: None,
            entry_bound: None,
            quasi: false,
            direct: false,
        }
    }

    /// Parses every attached template and conjoins them.
    pub fn template(&self) -> Result<Option<Template>, StrategyError> {
        let wrap = |flag| move |source| StrategyError::Template { flag, source };
        let mut parts = Vec::new();
        if let Some(t) = &self.prec {
            parts.push(parse_prec(t).map_err(wrap("-prec"))?);
        }
        if let Some(t) = &self.weights {
            parts.push(parse_weights(t).map_err(wrap("-weights"))?);
        }
        if let Some(t) = &self.inters {
            let kind = if self.method == Method::Matrix {
                InterpKind::Matrix
            } else {
                InterpKind::Poly
            };
            parts.push(parse_inters(t, kind).map_err(wrap("-inters"))?);
        }
        Ok(match parts.len() {
            0 => None,
            1 => parts.pop(),
            _ => Some(TemplateAst::And(parts)),
        })
    }

    pub fn config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            weight_bound: self.weight_bound.unwrap_or(d.weight_bound),
            coeff_bound: self.coeff_bound.unwrap_or(d.coeff_bound),
            entry_bound: self.entry_bound.unwrap_or(d.entry_bound),
            dim: self.dim,
            mode: if self.quasi {
                PrecMode::Quasi
            } else {
                PrecMode::Strict
            },
            w0: self.w0,
            time_limit: None,
        }
    }

    /// Search configuration and validated template for `trs`.
    pub fn compile(
        &self,
        trs: &Trs,
    ) -> Result<(SearchConfig, Option<CheckedTemplate>), StrategyError> {
        let checked = match self.template()? {
            Some(ast) => {
                let flag = if self.inters.is_some() {
                    "-inters"
                } else {
                    "-prec/-weights"
                };
                Some(
                    validate(&ast, trs, self.dim)
                        .map_err(|source| StrategyError::Template { flag, source })?,
                )
            }
            None => None,
        };
        Ok((self.config(), checked))
    }
}

fn flag_applies(flag: &str, method: Method) -> bool {
    use Method::*;
    match flag {
        "-prec" | "-quasi" => matches!(method, Lpo | Kbo),
        "-w0" | "-weights" | "-wb" => method == Kbo,
        "-inters" => matches!(method, Poly | Matrix),
        "-cb" => method == Poly,
        "-dim" | "-eb" | "-direct" => method == Matrix,
        _ => false,
    }
}

const FLAGS: &[&str] = &[
    "-prec", "-w0", "-weights", "-inters", "-dim", "-wb", "-cb", "-eb", "-quasi", "-direct",
];

/// Parses a strategy with shell-style quoting.
pub fn parse_strategy(text: &str) -> Result<Strategy, StrategyError> {
    let words = shlex::split(text).ok_or(StrategyError::Quoting)?;
    let mut it = words.into_iter();
    let name = it.next().ok_or(StrategyError::Empty)?;
    let method = Method::from_name(&name).ok_or(StrategyError::UnknownMethod(name))?;
    let mut s = Strategy::new(method);
    let mut seen: Vec<String> = Vec::new();
    while let Some(flag) = it.next() {
        if !FLAGS.contains(&flag.as_str()) {
            return Err(StrategyError::UnknownFlag(flag));
        }
        if !flag_applies(&flag, method) {
            return Err(StrategyError::FlagNotForMethod { flag, method });
        }
        if seen.contains(&flag) {
            return Err(StrategyError::DuplicateFlag(flag));
        }
        seen.push(flag.clone());
        match flag.as_str() {
            "-quasi" => s.quasi = true,
            "-direct" => s.direct = true,
            _ => {
                let value = it
                    .next()
                    .ok_or_else(|| StrategyError::MissingArgument(flag.clone()))?;
                let number = || -> Result<u64, StrategyError> {
                    value.parse().map_err(|_| StrategyError::BadNumber {
                        flag: flag.clone(),
                        value: value.clone(),
                    })
                };
                match flag.as_str() {
                    "-prec" => s.prec = Some(value.clone()),
                    "-weights" => s.weights = Some(value.clone()),
                    "-inters" => s.inters = Some(value.clone()),
                    "-w0" => s.w0 = Some(number()?),
                    "-dim" => s.dim = Some(number()? as usize),
                    "-wb" => s.weight_bound = Some(number()?),
                    "-cb" => s.coeff_bound = Some(number()?),
                    "-eb" => s.entry_bound = Some(number()?),
                    _ => unreachable!(),
                }
            }
        }
    }
    Ok(s)
}

/// Anything that can go wrong between a strategy string and an outcome.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Prove(#[from] ProveError),
}

/// Parses, compiles and runs `strategy` on `trs`.
pub fn run_strategy(
    trs: &Trs,
    strategy: &str,
    time_limit: Option<Duration>,
) -> Result<Outcome, RunError> {
    let s = parse_strategy(strategy)?;
    let (mut cfg, tmpl) = s.compile(trs)?;
    cfg.time_limit = time_limit;
    Ok(prove(trs, s.method, &cfg, tmpl.as_ref())?)
}

/// Everything after the headline and blank line: the method name, then
/// either the parameter lines or `reason: ...`.
pub fn render_body(trs: &Trs, method: Method, outcome: &Outcome) -> String {
    match outcome {
        Outcome::Yes(cert) => format!("{}\n{}", method.name(), cert.display(trs)),
        Outcome::Maybe(reason) => format!("{}\nreason: {}\n", method.name(), reason),
    }
}

pub fn headline(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Yes(_) => "YES",
        Outcome::Maybe(_) => "MAYBE",
    }
}

/// Full printed result: `YES`/`MAYBE`, a blank line, then the body.
pub fn render(trs: &Trs, method: Method, outcome: &Outcome) -> String {
    format!(
        "{}\n\n{}",
        headline(outcome),
        render_body(trs, method, outcome)
    )
}

fn quote(text: &str) -> String {
    if text.contains(['"', '\\', '$', '`']) {
        shlex::try_quote(text)
            .map(|q| q.into_owned())
            .unwrap_or_else(|_| text.to_string())
    } else {
        format!("\"{text}\"")
    }
}

/// A strategy whose templates pin every parameter of `cert` (precedences up
/// to the order they induce), so running it reproduces an equivalent proof.
pub fn fixing_strategy(trs: &Trs, cert: &Certificate) -> String {
    let mut out = cert.method().name().to_string();
    if let Some(p) = cert.precedence() {
        let groups = p.groups();
        let name = |f: &crate::trs::SymId| trs.symbol(*f).name.clone();
        let mut atoms = Vec::new();
        for pair in groups.windows(2) {
            for a in &pair[0] {
                for b in &pair[1] {
                    atoms.push(format!("{} > {}", name(a), name(b)));
                }
            }
        }
        for g in &groups {
            for (i, a) in g.iter().enumerate() {
                for b in &g[i + 1..] {
                    match p.mode() {
                        PrecMode::Quasi => atoms.push(format!("{} = {}", name(a), name(b))),
                        PrecMode::Strict => {
                            atoms.push(format!("NOT({} > {})", name(a), name(b)));
                            atoms.push(format!("NOT({} > {})", name(b), name(a)));
                        }
                    }
                }
            }
        }
        if !atoms.is_empty() {
            let _ = write!(out, " -prec {}", quote(&atoms.join(", ")));
        }
        if p.mode() == PrecMode::Quasi {
            out.push_str(" -quasi");
        }
    }
    if let Some(w) = cert.weights() {
        let atoms: Vec<String> = trs
            .sym_ids()
            .map(|f| format!("{} = {}", trs.symbol(f).name, w.weights()[f.0]))
            .collect();
        let _ = write!(out, " -w0 {}", w.w0());
        if !atoms.is_empty() {
            let _ = write!(out, " -weights {}", quote(&atoms.join(", ")));
        }
    }
    if let Some(i) = cert.interpretation() {
        let atoms: Vec<String> = trs
            .sym_ids()
            .map(|f| format!("{} = {}", trs.symbol(f).name, i.display_fun(f)))
            .collect();
        if !atoms.is_empty() {
            let _ = write!(out, " -inters {}", quote(&atoms.join(", ")));
        }
        if i.kind() == InterpKind::Matrix {
            let _ = write!(out, " -dim {}", i.dim());
        }
    }
    out
}

/// Runs the fixing strategy of `cert` and reports whether it proves `trs` again.
pub fn recheck(trs: &Trs, cert: &Certificate) -> Result<bool, RunError> {
    Ok(matches!(
        run_strategy(trs, &fixing_strategy(trs, cert), None)?,
        Outcome::Yes(_)
    ))
}
