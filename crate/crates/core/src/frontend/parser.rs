//! Concrete syntax for programs, goals and qualification literals.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::presets::Preset;
use crate::cdom::ConstraintDomain;
use crate::proximity::{ProxSymbol, ProximityTable};
use crate::qualdom::{QualDomain, QualValue, Threshold, Weight};
use crate::rational::{parse_rational, Rational};
use crate::sqchl::{Goal, GoalItem};
use crate::syntax::{
    Atom, BodyItem, Clause, ConstraintSet, Name, Origin, Prim, Program, Term, Var,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

fn err<T>(span: Span, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        span,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Num(Rational),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
    /// No whitespace between this token and the previous one.
    glued: bool,
}

const PUNCT: &[&str] = &[
    "?-", "==", "<-", ">=", "<=", "(", ")", ",", ".", "#", "?", "|", "=", "~", "-", ">", "<", "*",
];

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (offset, line) in text.lines().enumerate() {
        let line_no = first_line + offset;
        let line = line.split('%').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let mut glued = false;
        while i < chars.len() {
            let c = chars[i];
            let span = Span {
                line: line_no,
                column: i + 1,
            };
            if c.is_whitespace() {
                i += 1;
                glued = false;
                continue;
            }
            let start = i;
            let tok = if c.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let sep = chars.get(i).copied();
                if matches!(sep, Some('.') | Some('/'))
                    && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                match parse_rational(&lit) {
                    Some(n) => Tok::Num(n),
                    None => return err(span, format!("malformed number `{lit}`")),
                }
            } else if c.is_alphabetic() || c == '_' {
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let mut word: String = chars[start..i].iter().collect();
                if word == "op_" || word == "cp_" {
                    let rest: String = chars[i..].iter().take(2).collect();
                    let op = [">=", "<=", "+", "*", ">", "<"]
                        .into_iter()
                        .find(|op| rest.starts_with(op))
                        .ok_or_else(|| ParseError {
                            span,
                            message: format!("`{word}` must be followed by an operator"),
                        })?;
                    word.push_str(op);
                    i += op.len();
                }
                if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                }
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                    Some(p) => {
                        i += p.len();
                        Tok::Punct(p)
                    }
                    None => return err(span, format!("unexpected character `{c}`")),
                }
            };
            out.push(Token { tok, span, glued });
            glued = true;
        }
    }
    let span = Span {
        line: first_line + text.lines().count(),
        column: 1,
    };
    out.push(Token {
        tok: Tok::Eof,
        span,
        glued: false,
    });
    Ok(out)
}

/// Literal syntax for qualification values, checked against a domain once parsed.
#[derive(Clone, Debug)]
enum QLit {
    Num(Rational),
    Inf,
    Bool(bool),
    Tuple(Vec<QLit>),
}

fn qlit_value(qdom: &QualDomain, lit: &QLit) -> Option<QualValue> {
    match (qdom, lit) {
        (QualDomain::Bool, QLit::Bool(b)) => Some(QualValue::Bool(*b)),
        (QualDomain::Uncertainty, QLit::Num(n)) => {
            let v = QualValue::certainty(n.clone());
            qdom.contains(&v).then_some(v)
        }
        (QualDomain::Weight, QLit::Num(n)) => {
            let v = QualValue::weight(n.clone());
            qdom.contains(&v).then_some(v)
        }
        (QualDomain::Weight, QLit::Inf) => Some(QualValue::Weight(Weight::Infinite)),
        (QualDomain::Product(l, r), QLit::Tuple(items)) if items.len() == 2 => {
            let v = QualValue::pair(qlit_value(l, &items[0])?, qlit_value(r, &items[1])?);
            qdom.contains(&v).then_some(v)
        }
        _ => None,
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    qdom: &'a QualDomain,
    anon: &'a mut usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.at(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<Token, ParseError> {
        if self.at(p) {
            Ok(self.bump())
        } else {
            let t = self.peek();
            err(t.span, format!("expected `{p}`, found {}", t.tok))
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            let t = self.peek();
            err(t.span, format!("unexpected {}", t.tok))
        }
    }

    fn number(&mut self) -> Option<Rational> {
        let negative = self.at("-") && matches!(self.peek_at(1), Tok::Num(_));
        if negative {
            self.bump();
        }
        match &self.peek().tok {
            Tok::Num(n) => {
                let n = n.clone();
                self.bump();
                Some(if negative { -n } else { n })
            }
            _ => None,
        }
    }

    fn qlit(&mut self) -> Result<QLit, ParseError> {
        if let Some(n) = self.number() {
            return Ok(QLit::Num(n));
        }
        let t = self.bump();
        match &t.tok {
            Tok::Ident(w) if w == "inf" => Ok(QLit::Inf),
            Tok::Ident(w) if w == "true" => Ok(QLit::Bool(true)),
            Tok::Ident(w) if w == "false" => Ok(QLit::Bool(false)),
            Tok::Punct("(") => {
                let mut items = vec![self.qlit()?];
                while self.eat(",") {
                    items.push(self.qlit()?);
                }
                self.expect(")")?;
                Ok(QLit::Tuple(items))
            }
            other => err(
                t.span,
                format!("expected a qualification value, found {other}"),
            ),
        }
    }

    fn qvalue(&mut self) -> Result<QualValue, ParseError> {
        let span = self.peek().span;
        let lit = self.qlit()?;
        qlit_value(self.qdom, &lit).map_or_else(
            || {
                err(
                    span,
                    format!("not a value of qualification domain {}", self.qdom),
                )
            },
            Ok,
        )
    }

    fn threshold(&mut self) -> Result<Threshold, ParseError> {
        if self.eat("?") {
            return Ok(Threshold::Any);
        }
        let span = self.peek().span;
        let v = self.qvalue()?;
        match self.qdom.threshold(v) {
            Ok(t) => Ok(t),
            Err(e) => err(span, e.to_string()),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.at("(") && self.peek().glued {
            self.bump();
            args.push(self.term()?);
            while self.eat(",") {
                args.push(self.term()?);
            }
            self.expect(")")?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if let Some(n) = self.number() {
            return Ok(Term::Num(n));
        }
        let t = self.bump();
        match t.tok {
            Tok::Var(v) if v == "_" => {
                *self.anon += 1;
                Ok(Term::var(&format!("_{}", self.anon)))
            }
            Tok::Var(v) => Ok(Term::var(&v)),
            Tok::Ident(f) => {
                if Prim::from_name(&f).is_some() {
                    return err(t.span, format!("primitive `{f}` cannot be used as a term"));
                }
                let args = self.args()?;
                Ok(Term::App(Name::from(f.as_str()), args))
            }
            other => err(t.span, format!("expected a term, found {other}")),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let span = self.peek().span;
        if let Tok::Ident(name) = &self.peek().tok {
            if let Some(prim) = Prim::from_name(name) {
                self.bump();
                let args = self.args()?;
                if args.len() != prim.arity() {
                    return err(
                        span,
                        format!("{} expects {} arguments", prim.name(), prim.arity()),
                    );
                }
                return Ok(Atom::prim(prim, args));
            }
        }
        let lhs = self.term()?;
        if self.eat("==") {
            let rhs = self.term()?;
            return Ok(Atom::eq(lhs, rhs));
        }
        match lhs {
            Term::App(pred, args) => Ok(Atom::Defined { pred, args }),
            other => err(span, format!("`{other}` is not an atom")),
        }
    }

    fn constraints(&mut self) -> Result<ConstraintSet, ParseError> {
        let mut set = ConstraintSet::new();
        loop {
            let span = self.peek().span;
            let atom = self.atom()?;
            if set.insert(atom).is_err() {
                return err(
                    span,
                    "only equations and primitive atoms can be constraints",
                );
            }
            if !self.eat(",") {
                return Ok(set);
            }
        }
    }

    /// Ends a statement: a period, or the end of the line.
    fn end_statement(&mut self, last_line: usize) -> Result<(), ParseError> {
        if self.eat(".") || self.at_eof() || self.peek().span.line > last_line {
            Ok(())
        } else {
            let t = self.peek();
            err(t.span, format!("expected `.`, found {}", t.tok))
        }
    }

    fn prev_line(&self) -> usize {
        self.toks[self.pos.saturating_sub(1)].span.line
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let span = self.peek().span;
        let head = self.atom()?;
        let Atom::Defined { pred, args } = head else {
            return err(span, "clause heads must be defined atoms");
        };
        let mut clause = Clause {
            pred,
            args,
            attenuation: self.qdom.top(),
            body: Vec::new(),
        };
        if self.eat("<-") {
            let next = self.peek();
            let has_attenuation = next.glued && !matches!(next.tok, Tok::Punct("."));
            if self.at("-") && next.glued {
                self.bump();
            } else if has_attenuation {
                let span = self.peek().span;
                clause.attenuation = self.qvalue()?;
                if let Err(e) = self
                    .qdom
                    .check_proper(&clause.attenuation, "attenuation factor")
                {
                    return err(span, e.to_string());
                }
                self.expect("-")?;
            }
            let body_line = self.prev_line();
            let starts_body = !self.at(".") && !self.at_eof() && self.peek().span.line == body_line;
            if starts_body {
                loop {
                    let atom = self.atom()?;
                    let threshold = if self.eat("#") {
                        self.threshold()?
                    } else {
                        Threshold::Any
                    };
                    clause.body.push(BodyItem { atom, threshold });
                    if !self.eat(",") {
                        break;
                    }
                }
            }
        }
        let line = self.prev_line();
        self.end_statement(line)?;
        Ok(clause)
    }

    fn prox_symbol(&mut self) -> Result<ProxSymbol, ParseError> {
        if let Some(n) = self.number() {
            return Ok(ProxSymbol::Num(n));
        }
        let t = self.bump();
        match t.tok {
            Tok::Var(v) => Ok(ProxSymbol::Var(Var::new(&v))),
            Tok::Ident(n) => Ok(ProxSymbol::Name(Name::from(n.as_str()))),
            other => err(t.span, format!("expected a symbol, found {other}")),
        }
    }
}

/// A program as written: its parameters and statements with their source positions.
#[derive(Clone, Debug)]
pub struct SourceProgram {
    pub preset: Option<Preset>,
    pub qdom: QualDomain,
    pub cdom: ConstraintDomain,
    pub proximity: Vec<(ProxSymbol, ProxSymbol, QualValue, Span)>,
    pub clauses: Vec<(Clause, Span)>,
}

/// A diagnostic about a parsed program, located in the source.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}{message}", span.map(|s| format!("{s}: ")).unwrap_or_default())]
pub struct SourceDiagnostic {
    pub span: Option<Span>,
    pub message: String,
}

impl From<ParseError> for SourceDiagnostic {
    fn from(e: ParseError) -> Self {
        SourceDiagnostic {
            span: Some(e.span),
            message: e.message,
        }
    }
}

/// Parses `U`, `W`, `B`, and products such as `U*W` or `(U*W)*B`.
pub fn parse_qdom(text: &str) -> Option<QualDomain> {
    fn factor(s: &str) -> Option<(QualDomain, &str)> {
        let s = s.trim_start();
        if let Some(rest) = s.strip_prefix('(') {
            let (d, rest) = product(rest)?;
            let rest = rest.trim_start().strip_prefix(')')?;
            return Some((d, rest));
        }
        let d = match s.chars().next()? {
            'B' => QualDomain::Bool,
            'U' => QualDomain::Uncertainty,
            'W' => QualDomain::Weight,
            _ => return None,
        };
        Some((d, &s[1..]))
    }
    fn product(s: &str) -> Option<(QualDomain, &str)> {
        let (mut d, mut rest) = factor(s)?;
        loop {
            let t = rest.trim_start();
            let Some(after) = t.strip_prefix('*').or_else(|| t.strip_prefix('⊗')) else {
                return Some((d, rest));
            };
            let (e, r) = factor(after)?;
            d = QualDomain::product(d, e);
            rest = r;
        }
    }
    let (d, rest) = product(text)?;
    rest.trim().is_empty().then_some(d)
}

fn parse_cdom(text: &str) -> Option<ConstraintDomain> {
    match text {
        "R" => Some(ConstraintDomain::Real),
        "H" => Some(ConstraintDomain::Herbrand),
        _ => None,
    }
}

/// Parses program text. Directives (`#qdom`, `#cdom`, `#preset`) must precede
/// all other statements. Without directives the domain is `B` over `H`.
pub fn parse_program(text: &str) -> Result<SourceProgram, Vec<SourceDiagnostic>> {
    let mut diags: Vec<SourceDiagnostic> = Vec::new();
    let mut preset = None;
    let mut qdom = None;
    let mut cdom = None;
    let mut body_start = 0;
    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            body_start = i + 1;
            continue;
        }
        let Some(directive) = line.strip_prefix('#') else {
            break;
        };
        body_start = i + 1;
        let span = Some(Span {
            line: i + 1,
            column: raw.find('#').map_or(1, |c| c + 1),
        });
        let mut words = directive.splitn(2, char::is_whitespace);
        let key = words.next().unwrap_or("");
        let value = words
            .next()
            .unwrap_or("")
            .trim()
            .trim_end_matches('.')
            .trim();
        let ok = match key {
            "qdom" => parse_qdom(value).map(|d| qdom = Some(d)).is_some(),
            "cdom" => parse_cdom(value).map(|d| cdom = Some(d)).is_some(),
            "preset" => Preset::from_name(value).map(|p| preset = Some(p)).is_some(),
            _ => {
                diags.push(SourceDiagnostic {
                    span,
                    message: format!("unknown directive `#{key}`"),
                });
                continue;
            }
        };
        if !ok {
            diags.push(SourceDiagnostic {
                span,
                message: format!("invalid value `{value}` for `#{key}`"),
            });
        }
    }
    let (qdom, cdom) = match preset {
        Some(p) => match p.resolve(qdom, cdom) {
            Ok(params) => params,
            Err(message) => {
                diags.push(SourceDiagnostic {
                    span: None,
                    message,
                });
                return Err(diags);
            }
        },
        None => (
            qdom.unwrap_or(QualDomain::Bool),
            cdom.unwrap_or(ConstraintDomain::Herbrand),
        ),
    };
    let rest = lines[body_start.min(lines.len())..].join("\n");
    let toks = match lex(&rest, body_start + 1) {
        Ok(t) => t,
        Err(e) => {
            diags.push(e.into());
            return Err(diags);
        }
    };
    let mut anon = 0;
    let mut p = Parser {
        toks,
        pos: 0,
        qdom: &qdom,
        anon: &mut anon,
    };
    let mut proximity = Vec::new();
    let mut clauses = Vec::new();
    while !p.at_eof() {
        let span = p.peek().span;
        let result = if p.eat("~") {
            (|| {
                p.expect("(")?;
                let a = p.prox_symbol()?;
                p.expect(",")?;
                let b = p.prox_symbol()?;
                p.expect(")")?;
                p.expect("=")?;
                let d = p.qvalue()?;
                let line = p.prev_line();
                p.end_statement(line)?;
                proximity.push((a, b, d, span));
                Ok(())
            })()
        } else if p.at("#") {
            err(
                span,
                "directives must precede clauses and proximity declarations",
            )
        } else {
            p.clause().map(|c| clauses.push((c, span)))
        };
        if let Err(e) = result {
            diags.push(e.into());
            // Resume after the next period or at the next line.
            let line = p.peek().span.line;
            while !p.at_eof() && !p.at(".") && p.peek().span.line == line {
                p.bump();
            }
            p.eat(".");
        }
    }
    if diags.is_empty() {
        Ok(SourceProgram {
            preset,
            qdom,
            cdom,
            proximity,
            clauses,
        })
    } else {
        Err(diags)
    }
}

impl SourceProgram {
    /// Checks preset restrictions and admissibility and builds the program.
    pub fn to_program(&self) -> Result<Program, Vec<SourceDiagnostic>> {
        let mut diags = Vec::new();
        if let Some(preset) = self.preset {
            diags.extend(preset.check(self));
        }
        let mut table = ProximityTable::new(self.qdom.clone());
        let mut entry_spans = Vec::new();
        for (a, b, d, span) in &self.proximity {
            let before = table.entries().len();
            match table.insert(a.clone(), b.clone(), d.clone()) {
                Ok(()) if table.entries().len() > before => entry_spans.push(*span),
                Ok(()) => {}
                Err(e) => diags.push(SourceDiagnostic {
                    span: Some(*span),
                    message: e.to_string(),
                }),
            }
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        let clauses = self.clauses.iter().map(|(c, _)| c.clone()).collect();
        Program::new(clauses, table, self.cdom).map_err(|ds| {
            ds.into_iter()
                .map(|d| {
                    let span = match d.origin {
                        Origin::Program => None,
                        Origin::Clause(i) => self.clauses.get(i).map(|c| c.1),
                        Origin::Proximity(i) => entry_spans.get(i).copied(),
                    };
                    SourceDiagnostic {
                        span,
                        message: d.message,
                    }
                })
                .collect()
        })
    }
}

impl fmt::Display for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.preset {
            writeln!(f, "#preset {}", p.name())?;
        }
        writeln!(f, "#qdom {}", self.qdom)?;
        writeln!(f, "#cdom {}", self.cdom)?;
        for (a, b, d, _) in &self.proximity {
            writeln!(f, "~({a}, {b}) = {d}")?;
        }
        for (c, _) in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses and validates a program in one step.
pub fn load_program(text: &str) -> Result<Program, Vec<SourceDiagnostic>> {
    parse_program(text)?.to_program()
}

fn parser<'a>(
    text: &str,
    qdom: &'a QualDomain,
    anon: &'a mut usize,
) -> Result<Parser<'a>, ParseError> {
    let toks = lex(text, 1)?;
    Ok(Parser {
        toks,
        pos: 0,
        qdom,
        anon,
    })
}

/// Parses `?- A1#W1, ..., Am#Wm | W1 >= b1, ... with c1, ..., ck`. The
/// leading `?-`, the conditions and the constraints are optional.
pub fn parse_goal(text: &str, qdom: &QualDomain) -> Result<Goal, ParseError> {
    let mut anon = 0;
    let mut p = parser(text, qdom, &mut anon)?;
    p.eat("?-");
    let mut items: Vec<GoalItem> = Vec::new();
    let mut seen = BTreeSet::new();
    loop {
        let atom = p.atom()?;
        p.expect("#")?;
        let t = p.bump();
        let Tok::Var(w) = t.tok else {
            return err(t.span, "expected a qualification variable after `#`");
        };
        if !seen.insert(w.clone()) {
            return err(
                t.span,
                format!("qualification variable {w} is used more than once"),
            );
        }
        items.push(GoalItem {
            atom,
            qvar: Name::from(w.as_str()),
            threshold: Threshold::Any,
        });
        if !p.eat(",") {
            break;
        }
    }
    if p.eat("|") {
        loop {
            let t = p.bump();
            let Tok::Var(w) = t.tok else {
                return err(t.span, "expected a qualification variable");
            };
            p.expect(">=")?;
            let threshold = p.threshold()?;
            match items.iter_mut().find(|i| *i.qvar == *w) {
                Some(item) => item.threshold = threshold,
                None => {
                    return err(
                        t.span,
                        format!("{w} is not a qualification variable of the goal"),
                    )
                }
            }
            if !p.eat(",") {
                break;
            }
        }
    }
    let mut constraints = ConstraintSet::new();
    if matches!(&p.peek().tok, Tok::Ident(w) if w == "with") {
        p.bump();
        constraints = p.constraints()?;
    }
    p.eat(".");
    p.expect_eof()?;
    Goal::new(items, constraints).map_err(|e| ParseError {
        span: Span { line: 1, column: 1 },
        message: e.to_string(),
    })
}

/// Parses a comma-separated list of constraints.
pub fn parse_constraints(text: &str) -> Result<ConstraintSet, ParseError> {
    if text.trim().is_empty() {
        return Ok(ConstraintSet::new());
    }
    let qdom = QualDomain::Bool;
    let mut anon = 0;
    let mut p = parser(text, &qdom, &mut anon)?;
    let set = p.constraints()?;
    p.expect_eof()?;
    Ok(set)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let qdom = QualDomain::Bool;
    let mut anon = 0;
    let mut p = parser(text, &qdom, &mut anon)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let qdom = QualDomain::Bool;
    let mut anon = 0;
    let mut p = parser(text, &qdom, &mut anon)?;
    let a = p.atom()?;
    p.expect_eof()?;
    Ok(a)
}

/// Parses a qualification literal of `qdom`, including `inf` and bottom values.
pub fn parse_qvalue(text: &str, qdom: &QualDomain) -> Result<QualValue, ParseError> {
    let mut anon = 0;
    let mut p = parser(text, qdom, &mut anon)?;
    let v = p.qvalue()?;
    p.expect_eof()?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const GOODWORK: &str = "\
#qdom U*W
#cdom R
~(king_lear, king_liar) = (0.8,2)
goodWork(X) <-(0.75,3)- famousAuthor(Y)#(0.5,100), wrote(Y,X)#?
famousAuthor(shakespeare) <-(0.9,1)-
wrote(shakespeare,king_lear) <-(1,1)-
";

    #[test]
    fn parses_goodwork() {
        let src = parse_program(GOODWORK).unwrap();
        assert_eq!(src.clauses.len(), 3);
        assert_eq!(src.proximity.len(), 1);
        let c = &src.clauses[0].0;
        assert_eq!(
            c.attenuation,
            QualValue::pair(
                QualValue::certainty(ratio(3, 4)),
                QualValue::weight(ratio(3, 1))
            )
        );
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.body[1].threshold, Threshold::Any);
        assert!(src.to_program().is_ok());
    }

    #[test]
    fn empty_body_and_omitted_attenuation() {
        let src =
            parse_program("#qdom U\n#cdom R\nq(X,c(X)) <-1.0-\np(a).\nr(b) <- p(a)\n").unwrap();
        assert_eq!(src.clauses.len(), 3);
        assert!(src.clauses[0].0.body.is_empty());
        assert_eq!(src.clauses[1].0.attenuation, QualDomain::Uncertainty.top());
        assert_eq!(src.clauses[2].0.body.len(), 1);
    }

    #[test]
    fn variable_proximity_is_rejected() {
        let src = parse_program("#qdom U\n#cdom R\n~(X, Y) = 0.5\n").unwrap();
        let diags = src.to_program().unwrap_err();
        assert_eq!(diags[0].span.unwrap().line, 3);
    }

    #[test]
    fn goals() {
        let uw = QualDomain::product(QualDomain::Uncertainty, QualDomain::Weight);
        let g = parse_goal("?- goodWork(X)#W | W >= (0.55,30)", &uw).unwrap();
        assert_eq!(g.items().len(), 1);
        let g = parse_goal(
            "?- q(X,Z)#W | W >= 0.8 with cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,Y)",
            &QualDomain::Uncertainty,
        )
        .unwrap();
        assert_eq!(g.constraints().len(), 3);
        let e = parse_goal("?- p(X)#W, q(X)#W", &QualDomain::Uncertainty).unwrap_err();
        assert!(e.message.contains("more than once"));
    }

    #[test]
    fn error_positions() {
        let e = parse_program("#qdom U\np(a) <-0.5- q(b)#1.5.\n").unwrap_err();
        assert_eq!(
            e[0].span,
            Some(Span {
                line: 2,
                column: 18
            })
        );
    }

    #[test]
    fn literals() {
        let w = QualDomain::Weight;
        assert_eq!(
            parse_qvalue("inf", &w).unwrap(),
            QualValue::Weight(Weight::Infinite)
        );
        assert_eq!(
            parse_qvalue("1/3", &w).unwrap(),
            QualValue::weight(ratio(1, 3))
        );
        assert!(parse_qvalue("-1", &w).is_err());
        assert_eq!(
            parse_term("f(-2,0.25,X')").unwrap().to_string(),
            "f(-2,0.25,X')"
        );
        assert_eq!(parse_qdom("(U*W)*B").unwrap().to_string(), "(U*W)*B");
    }
}
