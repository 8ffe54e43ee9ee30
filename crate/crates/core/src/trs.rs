//! Terms, rewrite rules and the classic `(VAR ...) (RULES ...)` problem format.
//!
//! Symbols and variables are interned per [`Trs`]: a [`Term`] only stores
//! indices, and the owning [`Trs`] is needed to print it.

use std::fmt;

use thiserror::Error;

/// Index of a function symbol in a [`Trs`] signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymId(pub usize);

/// Index of a variable in a [`Trs`] variable list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    App(SymId, Vec<Term>),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<SymId> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(*f),
        }
    }

    /// Number of occurrences of `x`.
    pub fn count_var(&self, x: VarId) -> usize {
        match self {
            Term::Var(y) => usize::from(*y == x),
            Term::App(_, args) => args.iter().map(|a| a.count_var(x)).sum(),
        }
    }

    pub fn contains_var(&self, x: VarId) -> bool {
        match self {
            Term::Var(y) => *y == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Variables in left-to-right first-occurrence order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(*x);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Function symbols in pre-order first-occurrence order.
    pub fn symbols(&self) -> Vec<SymId> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<SymId>) {
        if let Term::App(f, args) = self {
            if !out.contains(f) {
                out.push(*f);
            }
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replaces every variable `x` by `sigma(x)`.
    pub fn substitute(&self, sigma: &impl Fn(VarId) -> Term) -> Term {
        match self {
            Term::Var(x) => sigma(*x),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.substitute(sigma)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn symbols(&self) -> Vec<SymId> {
        let mut out = self.lhs.symbols();
        for f in self.rhs.symbols() {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }
}

/// A term rewrite system together with its signature and variable names.
///
/// Symbols are numbered in first-occurrence order over the rule list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trs {
    symbols: Vec<Symbol>,
    vars: Vec<String>,
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(
        "{line}:{col}: symbol `{name}` used with arity {found}, but earlier with arity {expected}"
    )]
    ArityClash {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("rule {rule}: left-hand side is a variable")]
    VariableLhs { rule: usize },
    #[error("rule {rule}: variable `{var}` occurs on the right but not on the left")]
    FreshRhsVariable { rule: usize, var: String },
    #[error("{line}:{col}: variable `{name}` applied to arguments")]
    AppliedVariable {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("symbol `{0}` already declared with a different arity")]
    SignatureClash(String),
}

impl Trs {
    /// Builds a system from already-interned parts, checking rule well-formedness.
    pub fn new(
        symbols: Vec<Symbol>,
        vars: Vec<String>,
        rules: Vec<Rule>,
    ) -> Result<Self, TrsError> {
        for (i, r) in rules.iter().enumerate() {
            if r.lhs.is_var() {
                return Err(TrsError::VariableLhs { rule: i + 1 });
            }
            for x in r.rhs.vars() {
                if !r.lhs.contains_var(x) {
                    return Err(TrsError::FreshRhsVariable {
                        rule: i + 1,
                        var: vars[x.0].clone(),
                    });
                }
            }
        }
        Ok(Trs {
            symbols,
            vars,
            rules,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, f: SymId) -> &Symbol {
        &self.symbols[f.0]
    }

    pub fn arity(&self, f: SymId) -> usize {
        self.symbols[f.0].arity
    }

    pub fn sym_ids(&self) -> impl Iterator<Item = SymId> + '_ {
        (0..self.symbols.len()).map(SymId)
    }

    pub fn lookup(&self, name: &str) -> Option<SymId> {
        self.symbols.iter().position(|s| s.name == name).map(SymId)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, x: VarId) -> &str {
        &self.vars[x.0]
    }

    pub fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name).map(VarId)
    }

    /// Displays a term of this system in canonical prefix syntax.
    pub fn display_term<'a>(&'a self, t: &'a Term) -> DisplayTerm<'a> {
        DisplayTerm { trs: self, term: t }
    }

    pub fn format_term(&self, t: &Term) -> String {
        self.display_term(t).to_string()
    }

    pub fn format_rule(&self, r: &Rule) -> String {
        format!(
            "{} -> {}",
            self.display_term(&r.lhs),
            self.display_term(&r.rhs)
        )
    }
}

pub struct DisplayTerm<'a> {
    trs: &'a Trs,
    term: &'a Term,
}

impl fmt::Display for DisplayTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(x) => f.write_str(self.trs.var_name(*x)),
            Term::App(g, args) => {
                f.write_str(&self.trs.symbol(*g).name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", self.trs.display_term(a))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(VAR")?;
        for v in &self.vars {
            write!(f, " {v}")?;
        }
        f.write_str(")\n(RULES\n")?;
        for r in &self.rules {
            writeln!(f, "  {}", self.format_rule(r))?;
        }
        f.write_str(")\n")
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != ','
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        let tok = match c {
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '(' => {
                advance(1, &mut i);
                Tok::Open
            }
            ')' => {
                advance(1, &mut i);
                Tok::Close
            }
            ',' => {
                advance(1, &mut i);
                Tok::Comma
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(2, &mut i);
                Tok::Arrow
            }
            _ => {
                let start = i;
                let mut end = i;
                while end < chars.len()
                    && is_ident_char(chars[end])
                    && !(chars[end] == '-' && chars.get(end + 1) == Some(&'>') && end > start)
                {
                    end += 1;
                }
                let name: String = chars[start..end].iter().collect();
                advance(end - start, &mut i);
                Tok::Ident(name)
            }
        };
        toks.push(Spanned {
            tok,
            line: tl,
            col: tc,
        });
    }
    toks
}

/// Term as written, before variables and symbols are resolved.
struct RawTerm {
    name: String,
    line: usize,
    col: usize,
    args: Option<Vec<RawTerm>>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TrsError> {
        let (line, col) = self.here();
        Err(TrsError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), TrsError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), TrsError> {
        match self.toks.get(self.pos) {
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                col,
            }) => {
                let out = (name.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn term(&mut self) -> Result<RawTerm, TrsError> {
        let (name, line, col) = self.ident()?;
        if self.peek() != Some(&Tok::Open) {
            return Ok(RawTerm {
                name,
                line,
                col,
                args: None,
            });
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::Close) {
            self.pos += 1;
            return Ok(RawTerm {
                name,
                line,
                col,
                args: Some(args),
            });
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Close) => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("expected `,` or `)` in argument list"),
            }
        }
        Ok(RawTerm {
            name,
            line,
            col,
            args: Some(args),
        })
    }

    /// Skips a balanced parenthesised block whose opening `(` was consumed.
    fn skip_block(&mut self) -> Result<(), TrsError> {
        let mut depth = 1;
        while depth > 0 {
            match self.peek() {
                None => return self.err("unterminated section"),
                Some(Tok::Open) => depth += 1,
                Some(Tok::Close) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(())
    }
}

struct Builder {
    symbols: Vec<Symbol>,
    vars: Vec<String>,
}

impl Builder {
    fn resolve(&mut self, raw: RawTerm) -> Result<Term, TrsError> {
        if let Some(x) = self.vars.iter().position(|v| *v == raw.name) {
            return match raw.args {
                Some(args) if !args.is_empty() => Err(TrsError::AppliedVariable {
                    line: raw.line,
                    col: raw.col,
                    name: raw.name,
                }),
                _ => Ok(Term::Var(VarId(x))),
            };
        }
        let args = raw.args.unwrap_or_default();
        let arity = args.len();
        let f = match self.symbols.iter().position(|s| s.name == raw.name) {
            Some(f) if self.symbols[f].arity != arity => {
                return Err(TrsError::ArityClash {
                    line: raw.line,
                    col: raw.col,
                    name: raw.name,
                    expected: self.symbols[f].arity,
                    found: arity,
                });
            }
            Some(f) => f,
            None => {
                self.symbols.push(Symbol {
                    name: raw.name,
                    arity,
                });
                self.symbols.len() - 1
            }
        };
        let args = args
            .into_iter()
            .map(|a| self.resolve(a))
            .collect::<Result<_, _>>()?;
        Ok(Term::App(SymId(f), args))
    }
}

/// Parses a problem in the `(VAR x y) (RULES l -> r ...)` format.
///
/// `COMMENT` sections are skipped. Any number of `VAR` and `RULES` sections
/// may appear, but at least one `RULES` section is required; variables are
/// collected from all `VAR` sections first.
pub fn parse_trs(text: &str) -> Result<Trs, TrsError> {
    let toks = tokenize(text);
    let end = text
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser { toks, pos: 0, end };
    let mut vars: Vec<String> = Vec::new();
    let mut raw_rules: Vec<(RawTerm, RawTerm)> = Vec::new();
    let mut saw_rules = false;
    while p.peek().is_some() {
        p.expect(Tok::Open, "`(` opening a section")?;
        let (section, line, col) = p.ident()?;
        match section.as_str() {
            "VAR" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    let (v, _, _) = p.ident()?;
                    if !vars.contains(&v) {
                        vars.push(v);
                    }
                }
                p.expect(Tok::Close, "`)` closing VAR")?;
            }
            "RULES" => {
                saw_rules = true;
                while let Some(Tok::Ident(_)) = p.peek() {
                    let lhs = p.term()?;
                    p.expect(Tok::Arrow, "`->`")?;
                    let rhs = p.term()?;
                    raw_rules.push((lhs, rhs));
                }
                p.expect(Tok::Close, "`)` closing RULES")?;
            }
            "COMMENT" => p.skip_block()?,
            other => {
                return Err(TrsError::Syntax {
                    line,
                    col,
                    msg: format!("unsupported section `{other}`"),
                });
            }
        }
    }
    if !saw_rules {
        return Err(TrsError::Syntax {
            line: end.0,
            col: end.1,
            msg: "missing `(RULES ...)` section".into(),
        });
    }
    let mut b = Builder {
        symbols: Vec::new(),
        vars,
    };
    let mut rules = Vec::with_capacity(raw_rules.len());
    for (lhs, rhs) in raw_rules {
        let lhs = b.resolve(lhs)?;
        let rhs = b.resolve(rhs)?;
        rules.push(Rule { lhs, rhs });
    }
    Trs::new(b.symbols, b.vars, rules)
}

impl std::str::FromStr for Trs {
    type Err = TrsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_trs(s)
    }
}

/// Parses a single term against the signature and variables of `trs`.
///
/// Unknown symbols are rejected rather than added.
pub fn parse_term(trs: &Trs, text: &str) -> Result<Term, TrsError> {
    let toks = tokenize(text);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (1, text.chars().count() + 1),
    };
    let raw = p.term()?;
    if p.peek().is_some() {
        return p.err("trailing input after term");
    }
    let mut b = Builder {
        symbols: trs.symbols.clone(),
        vars: trs.vars.clone(),
    };
    let t = b.resolve(raw)?;
    if b.symbols.len() != trs.symbols.len() {
        return Err(TrsError::Syntax {
            line: 1,
            col: 1,
            msg: "term uses a symbol outside the signature".into(),
        });
    }
    Ok(t)
}
