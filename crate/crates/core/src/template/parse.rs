//! Recursive-descent parsers for the template grammars.

use crate::interp::InterpKind;

use super::{
    Atom, CoefLit, ConstLit, Entry, IntersAtom, MatrixLit, Monomial, PrecAtom, PrecRel, Template,
    TemplateAst, TemplateError, WeightRel, WeightsAtom,
};

type Res<T> = Result<T, TemplateError>;

/// Cursor over the template text; offsets are byte offsets into `src`.
struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Res<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.src, self.pos, format!("expected `{c}`")))
        }
    }
}

fn syntax(src: &str, byte: usize, msg: impl Into<String>) -> TemplateError {
    TemplateError::Syntax {
        col: src[..byte.min(src.len())].chars().count() + 1,
        msg: msg.into(),
    }
}

/// Parses a full template: a comma-separated list of combinations.
fn parse_template(src: &str, atom: &dyn Fn(&str) -> Res<Atom>) -> Res<Template> {
    let mut cur = Cursor { src, pos: 0 };
    let mut items = vec![combination(&mut cur, atom)?];
    while cur.eat(',') {
        items.push(combination(&mut cur, atom)?);
    }
    cur.skip_ws();
    if cur.pos < src.len() {
        return Err(syntax(src, cur.pos, "unexpected input"));
    }
    Ok(if items.len() == 1 {
        items.pop().unwrap()
    } else {
        TemplateAst::And(items)
    })
}

/// Keyword at the cursor if it is followed (after optional whitespace) by `(`.
fn keyword(cur: &Cursor<'_>) -> Option<&'static str> {
    let rest = cur.rest();
    ["NOT", "AND", "OR"].into_iter().find(|kw| {
        rest.strip_prefix(kw)
            .is_some_and(|after| after.trim_start().starts_with('('))
    })
}

fn combination(cur: &mut Cursor<'_>, atom: &dyn Fn(&str) -> Res<Atom>) -> Res<Template> {
    cur.skip_ws();
    if let Some(kw) = keyword(cur) {
        cur.pos += kw.len();
        cur.expect('(')?;
        let mut items = vec![combination(cur, atom)?];
        if kw == "NOT" {
            cur.expect(')')?;
            return Ok(TemplateAst::Not(Box::new(items.pop().unwrap())));
        }
        while cur.eat(',') {
            items.push(combination(cur, atom)?);
        }
        cur.expect(')')?;
        return Ok(if kw == "AND" {
            TemplateAst::And(items)
        } else {
            TemplateAst::Or(items)
        });
    }
    // An atom extends to the next `,` or `)` outside of brackets.
    let start = cur.pos;
    let mut depth = 0usize;
    let mut end = cur.src.len();
    for (i, c) in cur.rest().char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' | ')' if depth == 0 => {
                end = start + i;
                break;
            }
            '(' => return Err(syntax(cur.src, start + i, "unexpected `(`")),
            _ => {}
        }
    }
    cur.pos = end;
    let text = &cur.src[start..end];
    if text.trim().is_empty() {
        return Err(syntax(cur.src, start, "expected a template"));
    }
    let lead = text.len() - text.trim_start().len();
    atom(text.trim())
        .map(TemplateAst::Atom)
        .map_err(|e| match e {
            // atom parsers report columns relative to the atom; shift them
            TemplateError::Syntax { col, msg } => {
                let base = cur.src[..start + lead].chars().count();
                TemplateError::Syntax {
                    col: base + col,
                    msg,
                }
            }
            other => other,
        })
}

#[derive(Debug, PartialEq)]
enum RelTok<'a> {
    Name(&'a str),
    Gt,
    Ge,
    Le,
    Eq,
}

fn relation_tokens(text: &str) -> Res<Vec<(usize, RelTok<'_>)>> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < text.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = match c {
            '>' if bytes.get(i + 1) == Some(&b'=') => (RelTok::Ge, 2),
            '<' if bytes.get(i + 1) == Some(&b'=') => (RelTok::Le, 2),
            '>' => (RelTok::Gt, 1),
            '=' => (RelTok::Eq, 1),
            '<' => return Err(syntax(text, i, "unexpected `<`")),
            _ => {
                let len = text[i..]
                    .find(|c: char| c.is_whitespace() || matches!(c, '>' | '<' | '='))
                    .unwrap_or(text.len() - i);
                (RelTok::Name(&text[i..i + len]), len)
            }
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

fn prec_atom(text: &str) -> Res<Atom> {
    let toks = relation_tokens(text)?;
    let mut it = toks.into_iter();
    let first = match it.next() {
        Some((_, RelTok::Name(n))) => n.to_string(),
        Some((i, _)) => return Err(syntax(text, i, "expected a function symbol")),
        None => return Err(syntax(text, 0, "expected a function symbol")),
    };
    let mut chain = Vec::new();
    while let Some((i, rel)) = it.next() {
        let rel = match rel {
            RelTok::Gt => PrecRel::Gt,
            RelTok::Ge => PrecRel::Ge,
            RelTok::Eq => PrecRel::Eq,
            _ => return Err(syntax(text, i, "expected `>`, `=` or `>=`")),
        };
        match it.next() {
            Some((_, RelTok::Name(n))) => chain.push((rel, n.to_string())),
            Some((j, _)) => return Err(syntax(text, j, "expected a function symbol")),
            None => return Err(syntax(text, text.len(), "expected a function symbol")),
        }
    }
    if chain.is_empty() {
        return Err(syntax(
            text,
            text.len(),
            "a precedence needs at least two symbols",
        ));
    }
    Ok(Atom::Prec(PrecAtom { first, chain }))
}

fn parse_nat(text: &str, at: usize, s: &str) -> Res<u64> {
    s.parse::<u64>()
        .map_err(|_| syntax(text, at, format!("expected a natural number, found `{s}`")))
}

fn weights_atom(text: &str) -> Res<Atom> {
    let toks = relation_tokens(text)?;
    // name (= name)* rel weight
    let mut names = Vec::new();
    let mut i = 0;
    loop {
        match toks.get(i) {
            Some((_, RelTok::Name(n))) => names.push(*n),
            Some((at, _)) => return Err(syntax(text, *at, "expected a function symbol")),
            None => return Err(syntax(text, text.len(), "expected a function symbol")),
        }
        let rel = match toks.get(i + 1) {
            Some((_, RelTok::Eq)) => WeightRel::Eq,
            Some((_, RelTok::Le)) => WeightRel::Le,
            Some((_, RelTok::Ge)) => WeightRel::Ge,
            Some((at, _)) => return Err(syntax(text, *at, "expected `=`, `<=` or `>=`")),
            None => {
                return Err(syntax(
                    text,
                    text.len(),
                    "expected `=`, `<=` or `>=` and a weight",
                ));
            }
        };
        let last = i + 3 >= toks.len();
        if last {
            return match toks.get(i + 2) {
                Some((at, RelTok::Name(w))) => Ok(Atom::Weights(WeightsAtom {
                    symbols: names.into_iter().map(str::to_string).collect(),
                    rel,
                    weight: parse_nat(text, *at, w)?,
                })),
                Some((at, _)) => Err(syntax(text, *at, "expected a weight")),
                None => Err(syntax(text, text.len(), "expected a weight")),
            };
        }
        if rel != WeightRel::Eq {
            return Err(syntax(
                text,
                toks[i + 1].0,
                "bounds are only allowed before the final weight",
            ));
        }
        i += 2;
    }
}

fn matrix_lit(text: &str, start: usize) -> Res<(MatrixLit, usize)> {
    let close = text[start..]
        .find(']')
        .map(|i| start + i)
        .ok_or_else(|| syntax(text, start, "unclosed `[`"))?;
    let body = &text[start + 1..close];
    let mut rows = Vec::new();
    let mut off = start + 1;
    for row in body.split(';') {
        let mut entries = Vec::new();
        let mut eoff = off;
        for e in row.split(',') {
            let t = e.trim();
            let at = eoff + (e.len() - e.trim_start().len());
            entries.push(match t {
                "_" => Entry::Hole,
                "" => return Err(syntax(text, at, "empty matrix entry")),
                n => Entry::Nat(parse_nat(text, at, n)?),
            });
            eoff += e.len() + 1;
        }
        rows.push(entries);
        off += row.len() + 1;
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(syntax(text, start, "ragged matrix literal"));
    }
    Ok((MatrixLit { rows }, close + 1))
}

fn var_index(text: &str, at: usize, s: &str) -> Res<usize> {
    s.strip_prefix('x')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| {
            syntax(
                text,
                at,
                format!("expected a variable `x<index>`, found `{s}`"),
            )
        })
}

fn monomial(text: &str, at: usize, m: &str, mode: InterpKind) -> Res<Monomial> {
    if m == "_" {
        return Ok(Monomial::Hole);
    }
    if let Some(v) = m.strip_prefix('_') {
        let v = v.trim_start();
        return Ok(Monomial::Var {
            coeff: Some(CoefLit::Hole),
            index: var_index(text, at + 1, v)?,
        });
    }
    if m.starts_with('[') {
        if mode == InterpKind::Poly {
            return Err(syntax(
                text,
                at,
                "matrix literals need matrix interpretations",
            ));
        }
        let (lit, end) = matrix_lit(&text[..at + m.len()], at)?;
        let rest = text[end..at + m.len()].trim();
        return if rest.is_empty() {
            Ok(Monomial::Const(ConstLit::Matrix(lit)))
        } else {
            Ok(Monomial::Var {
                coeff: Some(CoefLit::Matrix(lit)),
                index: var_index(text, end, rest)?,
            })
        };
    }
    let digits = m.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let n = parse_nat(text, at, &m[..digits])?;
        let rest = m[digits..].trim_start();
        if rest.is_empty() {
            return match (mode, n) {
                (InterpKind::Poly, n) => Ok(Monomial::Const(ConstLit::Nat(n))),
                (InterpKind::Matrix, 0) => Ok(Monomial::Const(ConstLit::Zero)),
                (InterpKind::Matrix, 1) => Ok(Monomial::Const(ConstLit::One)),
                (InterpKind::Matrix, _) => {
                    Err(syntax(text, at, "matrix constants are `0`, `1` or `[...]`"))
                }
            };
        }
        return Ok(Monomial::Var {
            coeff: Some(CoefLit::Nat(n)),
            index: var_index(text, at + digits, rest)?,
        });
    }
    Ok(Monomial::Var {
        coeff: None,
        index: var_index(text, at, m)?,
    })
}

/// Splits at `sep` outside brackets, yielding (offset, piece).
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

fn inters_atom(text: &str, mode: InterpKind) -> Res<Atom> {
    let parts = split_top(text, '=');
    if parts.len() < 2 {
        return Err(syntax(
            text,
            text.len(),
            "expected `=` followed by an interpretation",
        ));
    }
    let (poly_off, poly) = parts[parts.len() - 1];
    let mut symbols = Vec::new();
    for &(off, name) in &parts[..parts.len() - 1] {
        let n = name.trim();
        let at = off + (name.len() - name.trim_start().len());
        if n.is_empty() || n.contains(char::is_whitespace) || n.contains(['[', ']', '<', '>']) {
            return Err(syntax(text, at, "expected a function symbol"));
        }
        symbols.push(n.to_string());
    }
    let mut monomials = Vec::new();
    for (off, m) in split_top(poly, '+') {
        let t = m.trim();
        let at = poly_off + off + (m.len() - m.trim_start().len());
        if t.is_empty() {
            return Err(syntax(text, at, "expected a monomial"));
        }
        let mono = monomial(text, at, t, mode)?;
        match &mono {
            Monomial::Var { index, .. }
                if monomials
                    .iter()
                    .any(|o| matches!(o, Monomial::Var { index: j, .. } if j == index)) =>
            {
                return Err(syntax(text, at, format!("variable x{index} occurs twice")));
            }
            Monomial::Const(_) if monomials.iter().any(|o| matches!(o, Monomial::Const(_))) => {
                return Err(syntax(text, at, "constant part given twice"));
            }
            _ => {}
        }
        monomials.push(mono);
    }
    Ok(Atom::Inters(IntersAtom {
        symbols,
        monomials,
        mode,
    }))
}

/// Parses a precedence template such as `+ > s > 0` or `NOT(AND(f > g, f > h))`.
pub fn parse_prec(text: &str) -> Result<Template, TemplateError> {
    parse_template(text, &prec_atom)
}

/// Parses a weights template such as `+ = s = 0 = 1` or `f = g <= 5`.
pub fn parse_weights(text: &str) -> Result<Template, TemplateError> {
    parse_template(text, &weights_atom)
}

/// Parses an interpretation template; `mode` decides how constants read.
pub fn parse_inters(text: &str, mode: InterpKind) -> Result<Template, TemplateError> {
    parse_template(text, &|t| inters_atom(t, mode))
}
