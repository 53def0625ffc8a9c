//! TPTP CNF subset: `cnf(name, role, (lit | lit | ...)).`
//!
//! Negation is `~`, variables start with an uppercase letter, functions,
//! constants and predicates with a lowercase letter. `$true`/`$false` are the
//! truth constants. Comments start with `%` or are enclosed in `/* */`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::term::{Clause, Literal, Term, Var};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: symbol `{symbol}` used with arity {found}, previously {expected}")]
    ArityConflict { line: usize, col: usize, symbol: String, expected: usize, found: usize },
    #[error("duplicate clause name `{0}`")]
    DuplicateName(String),
    #[error("clause `{0}` has role conjecture; only CNF problems without conjectures are supported")]
    Conjecture(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedClause {
    pub name: String,
    pub role: String,
    pub clause: Clause,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
}

impl Signature {
    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.functions.iter().filter(|(_, a)| **a == 0).map(|(n, _)| n.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemFile {
    pub clauses: Vec<NamedClause>,
    pub signature: Signature,
}

impl ProblemFile {
    pub fn clause_set(&self) -> Vec<Clause> {
        self.clauses.iter().map(|c| c.clause.clone()).collect()
    }

    /// Builds a problem from bare clauses, naming them `c1`, `c2`, ...
    pub fn from_clauses(clauses: &[Clause]) -> ProblemFile {
        ProblemFile {
            clauses: clauses
                .iter()
                .enumerate()
                .map(|(i, c)| NamedClause { name: format!("c{}", i + 1), role: "axiom".into(), clause: c.clone() })
                .collect(),
            signature: signature_of(clauses),
        }
    }

    /// SHA-256 of the canonical rendering of the clause list, hex encoded.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for c in &self.clauses {
            h.update(c.clause.to_string().as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "cnf({}, {}, ({})).", c.name, c.role, c.clause)?;
        }
        Ok(())
    }
}

pub fn signature_of(clauses: &[Clause]) -> Signature {
    let mut sig = Signature::default();
    for c in clauses {
        for l in c.iter() {
            if l.is_constant_truth() {
                continue;
            }
            sig.predicates.entry(l.pred.clone()).or_insert(l.args.len());
            l.args.iter().for_each(|t| t.collect_functions(&mut sig.functions));
        }
    }
    sig
}

pub fn parse_tptp_cnf(text: &str) -> Result<ProblemFile, ParseError> {
    let mut p = Parser::new(text, false);
    let mut problem = ProblemFile::default();
    let mut names = HashSet::new();
    loop {
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect_word("cnf")?;
        p.expect(b'(')?;
        let name = p.name()?;
        p.expect(b',')?;
        let role = p.name()?;
        p.expect(b',')?;
        let clause = p.formula()?;
        p.expect(b')')?;
        p.expect(b'.')?;
        if role == "conjecture" {
            return Err(ParseError::Conjecture(name));
        }
        if !names.insert(name.clone()) {
            return Err(ParseError::DuplicateName(name));
        }
        problem.clauses.push(NamedClause { name, role, clause });
    }
    problem.signature = p.sig;
    Ok(problem)
}

/// Parses a bare clause such as `p(X) | ~q(a)`; `$false` is the empty clause.
/// Accepts fresh variable names like `X.3`.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text, true);
    let c = p.formula()?;
    p.finish()?;
    Ok(c)
}

pub fn parse_literal(text: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(text, true);
    let l = p.literal()?;
    p.finish()?;
    Ok(l)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, true);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub(crate) struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    fresh_names: bool,
    pub(crate) sig: Signature,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str, fresh_names: bool) -> Self {
        Parser { src: text.as_bytes(), pos: 0, line: 1, col: 1, fresh_names, sig: Signature::default() }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'*') => {
                    self.bump();
                    self.bump();
                    while !self.at_end() && !(self.peek() == Some(b'*') && self.src.get(self.pos + 1) == Some(&b'/')) {
                        self.bump();
                    }
                    self.bump();
                    self.bump();
                }
                _ => return,
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let got = self.word();
        if got == w {
            Ok(())
        } else {
            Err(self.err(format!("expected `{w}`, found `{got}`")))
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.bump();
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn name(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'\'') {
            self.bump();
            let start = self.pos;
            while !matches!(self.peek(), None | Some(b'\'')) {
                self.bump();
            }
            let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            self.expect(b'\'')?;
            return Ok(s);
        }
        let w = self.word();
        if w.is_empty() {
            Err(self.err("expected a name"))
        } else {
            Ok(w)
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Clause, ParseError> {
        self.skip_ws();
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.bump();
        }
        let mut lits = vec![self.literal()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.bump();
                lits.push(self.literal()?);
            } else {
                break;
            }
        }
        if parenthesized {
            self.expect(b')')?;
        }
        Ok(Clause::new(lits))
    }

    pub(crate) fn literal(&mut self) -> Result<Literal, ParseError> {
        self.skip_ws();
        let mut positive = true;
        while self.peek() == Some(b'~') {
            self.bump();
            positive = !positive;
            self.skip_ws();
        }
        let (line, col) = (self.line, self.col);
        if self.peek() == Some(b'$') {
            self.bump();
            let w = self.word();
            let pred = match w.as_str() {
                "true" => crate::term::TOP,
                "false" => crate::term::BOTTOM,
                _ => return Err(self.err(format!("unknown defined symbol `${w}`"))),
            };
            return Ok(Literal::new(positive, pred, vec![]));
        }
        if !matches!(self.peek(), Some(c) if c.is_ascii_lowercase()) {
            return Err(self.err("expected a predicate symbol"));
        }
        let pred = self.word();
        let args = self.args()?;
        self.skip_ws();
        if self.peek() == Some(b'=') || (self.peek() == Some(b'!') && self.src.get(self.pos + 1) == Some(&b'=')) {
            return Err(self.err("equality is not supported"));
        }
        check_arity(&mut self.sig.predicates, &pred, args.len(), line, col)?;
        Ok(Literal::new(positive, &pred, args))
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.skip_ws();
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.bump();
            args.push(self.term()?);
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.bump();
                        args.push(self.term()?);
                    }
                    Some(b')') => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        Ok(args)
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        match self.peek() {
            Some(c) if c.is_ascii_uppercase() => {
                let mut name = self.word();
                if self.fresh_names
                    && self.peek() == Some(b'.')
                    && matches!(self.src.get(self.pos + 1), Some(d) if d.is_ascii_digit())
                {
                    self.bump();
                    name.push('.');
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        name.push(self.bump().unwrap() as char);
                    }
                }
                Ok(Term::Var(Var(name)))
            }
            Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let f = self.word();
                let args = self.args()?;
                check_arity(&mut self.sig.functions, &f, args.len(), line, col)?;
                Ok(Term::app(&f, args))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

fn check_arity(
    table: &mut BTreeMap<String, usize>,
    sym: &str,
    arity: usize,
    line: usize,
    col: usize,
) -> Result<(), ParseError> {
    match table.get(sym) {
        Some(&a) if a != arity => {
            Err(ParseError::ArityConflict { line, col, symbol: sym.to_string(), expected: a, found: arity })
        }
        Some(_) => Ok(()),
        None => {
            table.insert(sym.to_string(), arity);
            Ok(())
        }
    }
}
