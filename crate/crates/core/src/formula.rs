//! Formula syntax: AST, parser, canonical rendering, and indexed predicate
//! families.
//!
//! Concrete grammar, loosest to tightest:
//!
//! ```text
//! formula := quant | impl
//! quant   := ("exists"|"forall") IDENT ":" IDENT "." formula | ("nec"|"past"|"fut") formula
//! impl    := disj ("->" impl)?
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "~" neg | "(" formula ")" | atom
//! atom    := IDENT "(" term ("," term)* ")" | term "=" term
//! term    := IDENT ("(" term ("," term)* ")")?
//! ```

use std::collections::HashMap;
use std::fmt;

use crate::diagram::Atom;
use crate::error::{Error, Result};
use crate::signature::{Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModalOp {
    Nec,
    Past,
    Fut,
}

impl ModalOp {
    pub fn keyword(self) -> &'static str {
        match self {
            ModalOp::Nec => "nec",
            ModalOp::Past => "past",
            ModalOp::Fut => "fut",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Equation(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists { var: String, sort: String, body: Box<Formula> },
    Forall { var: String, sort: String, body: Box<Formula> },
    Modal(ModalOp, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: &str, sort: &str, body: Formula) -> Formula {
        Formula::Exists {
            var: var.to_string(),
            sort: sort.to_string(),
            body: Box::new(body),
        }
    }

    pub fn forall(var: &str, sort: &str, body: Formula) -> Formula {
        Formula::Forall {
            var: var.to_string(),
            sort: sort.to_string(),
            body: Box::new(body),
        }
    }

    pub fn modal(op: ModalOp, body: Formula) -> Formula {
        Formula::Modal(op, Box::new(body))
    }

    /// Capture-free substitution of a ground term for a free variable.
    pub fn subst(&self, var: &str, value: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                pred: a.pred.clone(),
                args: a.args.iter().map(|t| t.subst(var, value)).collect(),
            }),
            Formula::Equation(l, r) => Formula::Equation(l.subst(var, value), r.subst(var, value)),
            Formula::Not(f) => Formula::not(f.subst(var, value)),
            Formula::And(a, b) => Formula::and(a.subst(var, value), b.subst(var, value)),
            Formula::Or(a, b) => Formula::or(a.subst(var, value), b.subst(var, value)),
            Formula::Implies(a, b) => Formula::implies(a.subst(var, value), b.subst(var, value)),
            Formula::Exists { var: v, sort, body } | Formula::Forall { var: v, sort, body } => {
                let body = if v == var {
                    body.as_ref().clone()
                } else {
                    body.subst(var, value)
                };
                let rebuilt = Box::new(body);
                if matches!(self, Formula::Exists { .. }) {
                    Formula::Exists { var: v.clone(), sort: sort.clone(), body: rebuilt }
                } else {
                    Formula::Forall { var: v.clone(), sort: sort.clone(), body: rebuilt }
                }
            }
            Formula::Modal(op, f) => Formula::modal(*op, f.subst(var, value)),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let from_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
                let mut vs = Vec::new();
                t.vars(&mut vs);
                for v in vs {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            };
            match f {
                Formula::Atom(a) => a.args.iter().for_each(|t| from_term(t, bound, out)),
                Formula::Equation(l, r) => {
                    from_term(l, bound, out);
                    from_term(r, bound, out);
                }
                Formula::Not(g) | Formula::Modal(_, g) => walk(g, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Exists { var, body, .. } | Formula::Forall { var, body, .. } => {
                    bound.push(var.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of nested connectives, quantifiers and modal operators.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Equation(..) => 0,
            Formula::Not(f) | Formula::Modal(_, f) => 1 + f.depth(),
            Formula::Exists { body, .. } | Formula::Forall { body, .. } => 1 + body.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Exists { .. } | Formula::Forall { .. } | Formula::Modal(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::Atom(_) | Formula::Equation(..) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Equation(l, r) => write!(f, "{l} = {r}"),
            Formula::Not(g) => {
                f.write_str("~")?;
                g.write_at(f, 4)
            }
            Formula::And(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" & ")?;
                b.write_at(f, 4)
            }
            Formula::Or(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" | ")?;
                b.write_at(f, 3)
            }
            Formula::Implies(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" -> ")?;
                b.write_at(f, 1)
            }
            Formula::Exists { var, sort, body } => {
                write!(f, "exists {var}:{sort} . ")?;
                body.write_at(f, 0)
            }
            Formula::Forall { var, sort, body } => {
                write!(f, "forall {var}:{sort} . ")?;
                body.write_at(f, 0)
            }
            Formula::Modal(op, body) => {
                write!(f, "{} ", op.keyword())?;
                body.write_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Eq,
    At,
    Question,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::At => "`@`".into(),
            Tok::Question => "`?`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn lex(text: &str, first_line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, cc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, column: cc });
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push(&mut out, Tok::Ident(s));
                continue;
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 2;
                    push(&mut out, Tok::Arrow);
                    continue;
                }
                return Err(Error::syntax(l, cc, "expected `->`"));
            }
            _ => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    '=' => Tok::Eq,
                    '@' => Tok::At,
                    '?' => Tok::Question,
                    other => return Err(Error::syntax(l, cc, format!("unexpected character `{other}`"))),
                };
                chars.next();
                push(&mut out, tok);
            }
        }
        col += 1;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

const KEYWORDS: [&str; 5] = ["exists", "forall", "nec", "past", "fut"];

/// Untyped term as written, before symbol resolution.
#[derive(Debug, Clone)]
pub(crate) struct RawTerm {
    pub name: String,
    pub args: Vec<RawTerm>,
    pub line: usize,
    pub column: usize,
}

pub(crate) struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    scope: Vec<(String, String)>,
    /// When set, unresolved identifiers in term position become variables
    /// (used for diagram rule patterns).
    pub free_vars: bool,
}

impl<'a> Parser<'a> {
    pub fn new(text: &str, first_line: usize, sig: &'a Signature) -> Result<Self> {
        Ok(Parser {
            toks: lex(text, first_line)?,
            pos: 0,
            sig,
            scope: Vec::new(),
            free_vars: false,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::syntax(l, c, msg)
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn at_end(&self) -> bool {
        self.peek() == &Tok::End
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }

    pub fn formula(&mut self) -> Result<Formula> {
        if let Tok::Ident(kw) = self.peek().clone() {
            match kw.as_str() {
                "exists" | "forall" => {
                    self.bump();
                    let var = self.ident()?;
                    self.expect(Tok::Colon)?;
                    let sort = self.ident()?;
                    if self.sig.sort(&sort).is_none() {
                        return Err(Error::UnknownSort(sort));
                    }
                    self.expect(Tok::Dot)?;
                    self.scope.push((var.clone(), sort.clone()));
                    let body = self.formula();
                    self.scope.pop();
                    let body = body?;
                    return Ok(if kw == "exists" {
                        Formula::exists(&var, &sort, body)
                    } else {
                        Formula::forall(&var, &sort, body)
                    });
                }
                "nec" | "past" | "fut" => {
                    self.bump();
                    let op = match kw.as_str() {
                        "nec" => ModalOp::Nec,
                        "past" => ModalOp::Past,
                        _ => ModalOp::Fut,
                    };
                    return Ok(Formula::modal(op, self.formula()?));
                }
                _ => {}
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.negation()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.negation()?);
        }
        Ok(f)
    }

    fn negation(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.negation()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        self.atomic()
    }

    fn atomic(&mut self) -> Result<Formula> {
        if let Tok::Ident(kw) = self.peek() {
            if KEYWORDS.contains(&kw.as_str()) {
                return Err(self.error(format!("`{kw}` must be parenthesized here")));
            }
        }
        let raw = self.raw_term()?;
        if self.eat(&Tok::Eq) {
            let rhs_raw = self.raw_term()?;
            let lhs = self.resolve_term(&raw)?;
            let rhs = self.resolve_term(&rhs_raw)?;
            let vs = self.var_sorts();
            if !self.free_vars {
                let (ls, rs) = (lhs.sort_in(self.sig, &vs)?, rhs.sort_in(self.sig, &vs)?);
                if ls != rs {
                    return Err(Error::SortMismatch(format!(
                        "`{lhs} = {rhs}` relates sorts {ls} and {rs}"
                    )));
                }
            }
            return Ok(Formula::Equation(lhs, rhs));
        }
        Ok(Formula::Atom(self.resolve_atom(&raw)?))
    }

    pub fn raw_term(&mut self) -> Result<RawTerm> {
        let (line, column) = self.here();
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.raw_term()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(Tok::RParen)?;
                break;
            }
        }
        Ok(RawTerm {
            name,
            args,
            line,
            column,
        })
    }

    fn var_sorts(&self) -> HashMap<String, String> {
        self.scope.iter().cloned().collect()
    }

    pub fn resolve_term(&self, raw: &RawTerm) -> Result<Term> {
        if raw.args.is_empty() && self.scope.iter().rev().any(|(v, _)| v == &raw.name) {
            return Ok(Term::var(&raw.name));
        }
        if self.sig.func(&raw.name).is_none() {
            if self.sig.pred(&raw.name).is_some() {
                return Err(Error::SortMismatch(format!(
                    "predicate `{}` used as a term at {}:{}",
                    raw.name, raw.line, raw.column
                )));
            }
            if self.free_vars && raw.args.is_empty() {
                return Ok(Term::var(&raw.name));
            }
            if raw.args.is_empty() && raw.name.chars().next().is_some_and(|c| c.is_lowercase()) {
                return Err(Error::UnboundVariable(raw.name.clone()));
            }
            return Err(Error::UnknownSymbol(raw.name.clone()));
        }
        let args = raw
            .args
            .iter()
            .map(|a| self.resolve_term(a))
            .collect::<Result<Vec<_>>>()?;
        let t = Term::app(&raw.name, args);
        if !self.free_vars {
            t.sort_in(self.sig, &self.var_sorts())?;
        }
        Ok(t)
    }

    pub fn resolve_atom(&self, raw: &RawTerm) -> Result<Atom> {
        let pred = self.sig.pred(&raw.name).ok_or_else(|| {
            if self.sig.func(&raw.name).is_some() {
                Error::syntax(raw.line, raw.column, format!("expected `=` after term `{}`", raw.name))
            } else {
                Error::UnknownSymbol(raw.name.clone())
            }
        })?;
        if raw.args.is_empty() {
            return Err(Error::syntax(
                raw.line,
                raw.column,
                format!("predicate `{}` needs arguments", raw.name),
            ));
        }
        let args = raw
            .args
            .iter()
            .map(|a| self.resolve_term(a))
            .collect::<Result<Vec<_>>>()?;
        let atom = Atom {
            pred: pred.name.clone(),
            args,
        };
        if !self.free_vars {
            atom.check_sorts(self.sig, &self.var_sorts())?;
        }
        Ok(atom)
    }
}

/// Parses a closed formula, resolving symbols against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser::new(text, 1, sig)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a ground term.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser::new(text, 1, sig)?;
    let raw = p.raw_term()?;
    p.expect_end()?;
    p.resolve_term(&raw)
}

/// Parses a ground predicate atom such as `walk(B)`.
pub fn parse_atom(text: &str, sig: &Signature) -> Result<Atom> {
    let mut p = Parser::new(text, 1, sig)?;
    let raw = p.raw_term()?;
    p.expect_end()?;
    p.resolve_atom(&raw)
}

// ---------------------------------------------------------------------------
// Indexed families

/// A family of unary predicates selected by index, standing in for lambda
/// abstraction over a predicate variable: applying index `i` to element `e`
/// yields the atom `members[i](e)`, whose value is the membership of `e` in
/// that predicate's extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedFunctionFamily {
    pub name: String,
    pub members: Vec<(String, String)>,
}

impl IndexedFunctionFamily {
    pub fn new(name: &str, members: &[(&str, &str)]) -> Self {
        IndexedFunctionFamily {
            name: name.to_string(),
            members: members
                .iter()
                .map(|(i, p)| (i.to_string(), p.to_string()))
                .collect(),
        }
    }

    pub fn member(&self, index: &str) -> Option<&str> {
        self.members
            .iter()
            .find(|(i, _)| i == index)
            .map(|(_, p)| p.as_str())
    }

    /// All members must be predicates with one shared argument profile.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        let mut profile: Option<&Vec<String>> = None;
        for (_, p) in &self.members {
            let pred = sig.require_pred(p)?;
            match profile {
                None => profile = Some(&pred.arg_sorts),
                Some(prev) if prev != &pred.arg_sorts => {
                    return Err(Error::SortMismatch(format!(
                        "family `{}` mixes argument profiles",
                        self.name
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

pub fn apply_family(family: &IndexedFunctionFamily, sig: &Signature, index: &str, element: &Term) -> Result<Atom> {
    let pred_name = family
        .member(index)
        .ok_or_else(|| Error::UnknownIndex(format!("{}[{index}]", family.name)))?;
    let atom = Atom::new(pred_name, vec![element.clone()]);
    atom.check_sorts(sig, &HashMap::new())?;
    Ok(atom)
}
