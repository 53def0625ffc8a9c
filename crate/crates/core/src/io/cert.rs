//! Line-oriented proof certificates for the CR, resolution and CND calculi.
//!
//! ```text
//! calculus cr
//! problem 3f2a...
//! node 0 input rho={} : p(Z) | q
//! node 4 decision rho={} : p(X)
//! node 5 upr units=4 clause=2 assoc=0 sigma={X/a} rho={} : q
//! ```
//!
//! Every node line is `node <id> <rule> key=value ... : <conclusion>`, ids
//! count up from 0 and may only reference earlier ids.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::tptp::{parse_clause, parse_literal, parse_term, ProblemFile};
use crate::cnd::{check_cnd, check_cnd_inputs, CndProof, CndRule};
use crate::cr::{check_derivation, check_inputs, CrDerivation, CrRule};
use crate::resolution::{check_resolution, ResDerivation, ResRule};
use crate::term::{Clause, Literal, Substitution, Term};
use crate::Violation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Calculus {
    Cr,
    Res,
    Cnd,
}

impl Calculus {
    pub fn name(self) -> &'static str {
        match self {
            Calculus::Cr => "cr",
            Calculus::Res => "res",
            Calculus::Cnd => "cnd",
        }
    }
}

impl std::str::FromStr for Calculus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cr" => Ok(Calculus::Cr),
            "res" => Ok(Calculus::Res),
            "cnd" => Ok(Calculus::Cnd),
            _ => Err(format!("unknown calculus `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Proof {
    Cr(CrDerivation),
    Res(ResDerivation),
    Cnd(CndProof),
}

impl Proof {
    pub fn calculus(&self) -> Calculus {
        match self {
            Proof::Cr(_) => Calculus::Cr,
            Proof::Res(_) => Calculus::Res,
            Proof::Cnd(_) => Calculus::Cnd,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    /// Digest of the problem the proof refers to, if recorded.
    pub problem: Option<String>,
    pub proof: Proof,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: reference to undefined node {id}")]
    DanglingRef { line: usize, id: usize },
    #[error("certificate is for calculus {found}, expected {expected}")]
    WrongCalculus { expected: &'static str, found: &'static str },
    #[error("certificate rejected: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<Violation>),
}

fn syntax(line: usize, msg: impl Into<String>) -> CertError {
    CertError::Syntax { line, msg: msg.into() }
}

impl Certificate {
    pub fn cr(d: CrDerivation, problem: Option<String>) -> Self {
        Certificate { problem, proof: Proof::Cr(d) }
    }

    pub fn res(d: ResDerivation, problem: Option<String>) -> Self {
        Certificate { problem, proof: Proof::Res(d) }
    }

    pub fn cnd(p: CndProof, problem: Option<String>) -> Self {
        Certificate { problem, proof: Proof::Cnd(p) }
    }

    /// Runs the checker of the certificate's calculus.
    pub fn check(&self) -> Vec<Violation> {
        match &self.proof {
            Proof::Cr(d) => check_derivation(d).violations,
            Proof::Res(d) => check_resolution(d).violations,
            Proof::Cnd(p) => check_cnd(p).violations,
        }
    }

    /// Violations of the checker plus inputs that are not problem clauses
    /// (up to variable renaming) and a recorded digest that differs.
    pub fn check_against(&self, problem: &ProblemFile) -> Vec<Violation> {
        let mut v = self.check();
        let clauses = problem.clause_set();
        match &self.proof {
            Proof::Cr(d) => v.extend(check_inputs(d, &clauses)),
            Proof::Res(d) => v.extend(
                d.nodes()
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.rule == ResRule::Input && !clauses.iter().any(|c| c.is_variant(&n.conclusion)))
                    .map(|(i, n)| Violation::at(i, format!("`{}` is not a problem clause", n.conclusion))),
            ),
            Proof::Cnd(p) => v.extend(check_cnd_inputs(p, &clauses)),
        }
        if let Some(d) = &self.problem {
            let actual = problem.digest();
            if *d != actual {
                v.push(Violation::global(format!("problem digest is {actual}, certificate names {d}")));
            }
        }
        v
    }

    pub fn into_cr(self) -> Result<CrDerivation, CertError> {
        match self.proof {
            Proof::Cr(d) => Ok(d),
            p => Err(CertError::WrongCalculus { expected: "cr", found: p.calculus().name() }),
        }
    }

    pub fn into_res(self) -> Result<ResDerivation, CertError> {
        match self.proof {
            Proof::Res(d) => Ok(d),
            p => Err(CertError::WrongCalculus { expected: "res", found: p.calculus().name() }),
        }
    }

    pub fn into_cnd(self) -> Result<CndProof, CertError> {
        match self.proof {
            Proof::Cnd(p) => Ok(p),
            p => Err(CertError::WrongCalculus { expected: "cnd", found: p.calculus().name() }),
        }
    }
}

/// Parses a certificate and runs its checker; violations reject it.
pub fn load_certificate(text: &str) -> Result<Certificate, CertError> {
    let cert = parse_certificate(text)?;
    let v = cert.check();
    if v.is_empty() {
        Ok(cert)
    } else {
        Err(CertError::Rejected(v))
    }
}

fn ids(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn label(l: Option<usize>) -> String {
    l.map_or_else(|| "-".to_string(), |l| l.to_string())
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "calculus {}", self.proof.calculus().name())?;
        if let Some(p) = &self.problem {
            writeln!(f, "problem {p}")?;
        }
        let mut line = String::new();
        match &self.proof {
            Proof::Cr(d) => {
                for (i, n) in d.nodes().iter().enumerate() {
                    line.clear();
                    match &n.rule {
                        CrRule::Input => line.push_str("input"),
                        CrRule::Decision { .. } => line.push_str("decision"),
                        CrRule::Upr { units, clause, assoc, sigma } => {
                            write!(line, "upr units={} clause={clause} assoc={} sigma={sigma}", ids(units), ids(assoc))?
                        }
                        CrRule::Conflict { left, right, sigma } => {
                            write!(line, "conflict left={left} right={right} sigma={sigma}")?
                        }
                        CrRule::Learn { bottom, discharged, index } => {
                            let groups: Vec<String> = discharged.iter().map(|g| format!("[{}]", ids(g))).collect();
                            write!(line, "cl bottom={bottom} groups=[{}] index={index}", groups.join(","))?
                        }
                    }
                    writeln!(f, "node {i} {line} rho={} : {}", n.renaming, n.conclusion)?;
                }
            }
            Proof::Res(d) => {
                for (i, n) in d.nodes().iter().enumerate() {
                    line.clear();
                    match &n.rule {
                        ResRule::Input => line.push_str("input"),
                        ResRule::Resolution { left, right, lpos, rpos, sigma } => {
                            write!(line, "resolution left={left} right={right} lpos={lpos} rpos={rpos} sigma={sigma}")?
                        }
                        ResRule::Factoring { premise, positions, sigma } => {
                            write!(line, "factoring premise={premise} positions={} sigma={sigma}", ids(positions))?
                        }
                    }
                    writeln!(f, "node {i} {line} rho={} : {}", n.renaming, n.conclusion)?;
                }
            }
            Proof::Cnd(p) => {
                for (i, n) in p.nodes().iter().enumerate() {
                    line.clear();
                    match &n.rule {
                        CndRule::Assumption { label: l } => write!(line, "assume label={}", label(*l))?,
                        CndRule::InputClause => line.push_str("input"),
                        CndRule::ImpE { minor, major } => write!(line, "impE minor={minor} major={major}")?,
                        CndRule::NegE { left, right } => write!(line, "negE left={left} right={right}")?,
                        CndRule::ImpI { body, lit, label } => write!(line, "impI body={body} lit={lit} label={label}")?,
                        CndRule::NegI { body, lit, label } => write!(line, "negI body={body} lit={lit} label={label}")?,
                        CndRule::AllE { premise, sigma } => write!(line, "allE premise={premise} sigma={sigma}")?,
                        CndRule::AllI { premise, eigen } => write!(line, "allI premise={premise} eigen={eigen}")?,
                    }
                    writeln!(f, "node {i} {line} : {}", n.conclusion)?;
                }
            }
        }
        Ok(())
    }
}

/// One parsed node line.
struct NodeLine<'a> {
    line: usize,
    rule: &'a str,
    fields: Vec<(&'a str, &'a str)>,
    conclusion: Clause,
}

impl<'a> NodeLine<'a> {
    fn raw(&self, key: &str) -> Result<&'a str, CertError> {
        self.fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| syntax(self.line, format!("`{}` needs `{key}=`", self.rule)))
    }

    fn num(&self, key: &str) -> Result<usize, CertError> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| syntax(self.line, format!("`{key}={v}` is not a number")))
    }

    /// A node reference that must precede `id`.
    fn node(&self, key: &str, id: usize) -> Result<usize, CertError> {
        let n = self.num(key)?;
        if n >= id {
            return Err(CertError::DanglingRef { line: self.line, id: n });
        }
        Ok(n)
    }

    fn list(&self, key: &str) -> Result<Vec<usize>, CertError> {
        parse_list(self.raw(key)?, self.line)
    }

    fn nodes(&self, key: &str, id: usize) -> Result<Vec<usize>, CertError> {
        let xs = self.list(key)?;
        match xs.iter().find(|&&x| x >= id) {
            Some(&x) => Err(CertError::DanglingRef { line: self.line, id: x }),
            None => Ok(xs),
        }
    }

    fn subst(&self, key: &str) -> Result<Substitution, CertError> {
        parse_subst(self.raw(key)?, self.line)
    }

    fn lit(&self, key: &str) -> Result<Literal, CertError> {
        parse_literal(self.raw(key)?).map_err(|e| syntax(self.line, e.to_string()))
    }

    fn unexpected(&self) -> CertError {
        syntax(self.line, format!("unknown rule `{}`", self.rule))
    }
}

fn parse_list(v: &str, line: usize) -> Result<Vec<usize>, CertError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| x.parse().map_err(|_| syntax(line, format!("bad number `{x}`")))).collect()
}

/// Splits on commas outside parentheses and braces.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < s.len() {
        out.push(&s[start..]);
    }
    out
}

fn parse_subst(v: &str, line: usize) -> Result<Substitution, CertError> {
    let inner = v
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("`{v}` is not a substitution")))?;
    let mut s = Substitution::new();
    for binding in split_top(inner) {
        let (x, t) = binding.split_once('/').ok_or_else(|| syntax(line, format!("bad binding `{binding}`")))?;
        let var = match parse_term(x) {
            Ok(Term::Var(v)) => v,
            _ => return Err(syntax(line, format!("`{x}` is not a variable"))),
        };
        if s.get(&var).is_some() {
            return Err(syntax(line, format!("{var} is bound twice")));
        }
        let t = parse_term(t).map_err(|e| syntax(line, e.to_string()))?;
        s.insert(var, t);
    }
    Ok(s)
}

fn parse_groups(v: &str, line: usize) -> Result<Vec<Vec<usize>>, CertError> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("`{v}` is not a group list")))?;
    split_top(inner)
        .into_iter()
        .map(|g| {
            let g = g.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| syntax(line, "bad group"))?;
            parse_list(g, line)
        })
        .collect()
}

fn parse_node_line(line: usize, text: &str, expect: usize) -> Result<NodeLine<'_>, CertError> {
    let (head, concl) = text.split_once(" : ").ok_or_else(|| syntax(line, "missing ` : <conclusion>`"))?;
    let mut words = head.split_whitespace();
    words.next();
    let id: usize = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| syntax(line, "missing node id"))?;
    if id != expect {
        return Err(syntax(line, format!("expected node {expect}, found {id}")));
    }
    let rule = words.next().ok_or_else(|| syntax(line, "missing rule"))?;
    let mut fields = Vec::new();
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, found `{w}`")))?;
        fields.push((k, v));
    }
    let conclusion = parse_clause(concl.trim()).map_err(|e| syntax(line, e.to_string()))?;
    Ok(NodeLine { line, rule, fields, conclusion })
}

/// Parses a certificate without checking its inferences.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertError> {
    let mut calculus = None;
    let mut problem = None;
    let mut cr = CrDerivation::new();
    let mut res = ResDerivation::new();
    let mut cnd = CndProof::new();
    let mut count = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let keyword = t.split_whitespace().next().unwrap_or_default();
        match keyword {
            "calculus" if calculus.is_none() && count == 0 => {
                let name = t["calculus".len()..].trim();
                calculus = Some(name.parse::<Calculus>().map_err(|e| syntax(line, e))?);
            }
            "problem" if problem.is_none() && count == 0 => problem = Some(t["problem".len()..].trim().to_string()),
            "node" => {
                let calc = calculus.ok_or_else(|| syntax(line, "node before `calculus` header"))?;
                let n = parse_node_line(line, t, count)?;
                match calc {
                    Calculus::Cr => push_cr(&mut cr, &n, count)?,
                    Calculus::Res => push_res(&mut res, &n, count)?,
                    Calculus::Cnd => push_cnd(&mut cnd, &n, count)?,
                }
                count += 1;
            }
            _ => return Err(syntax(line, format!("unexpected `{keyword}`"))),
        }
    }
    let proof = match calculus.ok_or_else(|| syntax(0, "missing `calculus` header"))? {
        Calculus::Cr => Proof::Cr(cr),
        Calculus::Res => Proof::Res(res),
        Calculus::Cnd => Proof::Cnd(cnd),
    };
    Ok(Certificate { problem, proof })
}

fn push_cr(d: &mut CrDerivation, n: &NodeLine, id: usize) -> Result<(), CertError> {
    let rule = match n.rule {
        "input" => CrRule::Input,
        "decision" => CrRule::Decision { discharged_by: None },
        "upr" => CrRule::Upr {
            units: n.nodes("units", id)?,
            clause: n.node("clause", id)?,
            assoc: n.list("assoc")?,
            sigma: n.subst("sigma")?,
        },
        "conflict" => {
            CrRule::Conflict { left: n.node("left", id)?, right: n.node("right", id)?, sigma: n.subst("sigma")? }
        }
        "cl" => {
            let discharged = parse_groups(n.raw("groups")?, n.line)?;
            if let Some(&x) = discharged.iter().flatten().find(|&&x| x >= id) {
                return Err(CertError::DanglingRef { line: n.line, id: x });
            }
            CrRule::Learn { bottom: n.node("bottom", id)?, discharged, index: n.num("index")? }
        }
        _ => return Err(n.unexpected()),
    };
    d.push_raw(rule, n.conclusion.clone(), n.subst("rho")?).map_err(|e| syntax(n.line, e.to_string()))?;
    Ok(())
}

fn push_res(d: &mut ResDerivation, n: &NodeLine, id: usize) -> Result<(), CertError> {
    let rule = match n.rule {
        "input" => ResRule::Input,
        "resolution" => ResRule::Resolution {
            left: n.node("left", id)?,
            right: n.node("right", id)?,
            lpos: n.num("lpos")?,
            rpos: n.num("rpos")?,
            sigma: n.subst("sigma")?,
        },
        "factoring" => ResRule::Factoring {
            premise: n.node("premise", id)?,
            positions: n.list("positions")?,
            sigma: n.subst("sigma")?,
        },
        _ => return Err(n.unexpected()),
    };
    d.push_raw(rule, n.conclusion.clone(), n.subst("rho")?).map_err(|e| syntax(n.line, e.to_string()))?;
    Ok(())
}

fn push_cnd(p: &mut CndProof, n: &NodeLine, id: usize) -> Result<(), CertError> {
    let rule = match n.rule {
        "assume" => {
            let l = n.raw("label")?;
            let label = if l == "-" { None } else { Some(n.num("label")?) };
            CndRule::Assumption { label }
        }
        "input" => CndRule::InputClause,
        "impE" => CndRule::ImpE { minor: n.node("minor", id)?, major: n.node("major", id)? },
        "negE" => CndRule::NegE { left: n.node("left", id)?, right: n.node("right", id)? },
        "impI" => CndRule::ImpI { body: n.node("body", id)?, lit: n.lit("lit")?, label: n.num("label")? },
        "negI" => CndRule::NegI { body: n.node("body", id)?, lit: n.lit("lit")?, label: n.num("label")? },
        "allE" => CndRule::AllE { premise: n.node("premise", id)?, sigma: n.subst("sigma")? },
        "allI" => CndRule::AllI { premise: n.node("premise", id)?, eigen: n.subst("eigen")? },
        _ => return Err(n.unexpected()),
    };
    p.push_raw(rule, n.conclusion.clone()).map_err(|e| syntax(n.line, e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnd::cr_to_cnd;
    use crate::samples;

    fn round_trip(cert: &Certificate) -> Certificate {
        let text = cert.to_string();
        assert!(text.is_ascii());
        let back = load_certificate(&text).unwrap();
        assert_eq!(back.to_string(), text);
        back
    }

    #[test]
    fn first_order_refutation_round_trips_and_checks() {
        let d = samples::first_order_square_refutation();
        let back = round_trip(&Certificate::cr(d.clone(), Some("abc".into())));
        assert_eq!(back.problem.as_deref(), Some("abc"));
        let back = back.into_cr().unwrap();
        assert_eq!(back.nodes(), d.nodes());
        assert!(check_derivation(&back).is_ok());
    }

    #[test]
    fn resolution_proofs_round_trip() {
        let (a, b) = samples::propositional_square_resolution();
        for d in [a, b] {
            let back = round_trip(&Certificate::res(d.clone(), None)).into_res().unwrap();
            assert_eq!(back.nodes(), d.nodes());
        }
    }

    #[test]
    fn cnd_proofs_round_trip() {
        let p = cr_to_cnd(&samples::first_order_square_refutation()).unwrap();
        let back = round_trip(&Certificate::cnd(p.clone(), None)).into_cnd().unwrap();
        assert_eq!(back, p);
        let fixture = samples::first_order_square_cnd();
        assert_eq!(round_trip(&Certificate::cnd(fixture.clone(), None)).into_cnd().unwrap(), fixture);
    }

    #[test]
    fn undefined_reference_is_dangling() {
        let text = "calculus cr\nnode 0 input rho={} : p\nnode 1 conflict left=0 right=5 sigma={} rho={} : $false\n";
        assert_eq!(parse_certificate(text).unwrap_err(), CertError::DanglingRef { line: 3, id: 5 });
        let text = "calculus cnd\nnode 0 impE minor=0 major=0 : p\n";
        assert!(matches!(parse_certificate(text), Err(CertError::DanglingRef { line: 2, id: 0 })));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        for (text, line) in [
            ("node 0 input rho={} : p\n", 1),
            ("calculus xyz\n", 1),
            ("calculus cr\n\nnode 1 input rho={} : p\n", 3),
            ("calculus cr\nnode 0 input rho={X/a : p\n", 2),
            ("calculus cr\nnode 0 frobnicate : p\n", 2),
            ("calculus res\nnode 0 input rho={}\n", 2),
            ("calculus cr\nnode 0 input rho={X/a,X/b} : p(X)\n", 2),
        ] {
            match parse_certificate(text) {
                Err(CertError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn tampered_conclusion_is_rejected() {
        let text = Certificate::cr(samples::propositional_square_refutation(), None).to_string();
        let bad = text.replacen("decision rho={} : p", "decision rho={} : q", 1);
        assert_ne!(bad, text);
        assert!(parse_certificate(&bad).is_ok());
        assert!(matches!(load_certificate(&bad), Err(CertError::Rejected(v)) if !v.is_empty()));
    }

    #[test]
    fn inputs_and_digest_against_problem() {
        let problem = ProblemFile::from_clauses(&samples::propositional_square());
        let d = samples::propositional_square_refutation();
        assert!(Certificate::cr(d.clone(), Some(problem.digest())).check_against(&problem).is_empty());
        assert_eq!(Certificate::cr(d.clone(), Some("0".into())).check_against(&problem).len(), 1);
        let other = ProblemFile::from_clauses(&samples::propositional_square()[..3]);
        assert!(!Certificate::cr(d, None).check_against(&other).is_empty());
        let (r, _) = samples::propositional_square_resolution();
        assert!(Certificate::res(r.clone(), None).check_against(&problem).is_empty());
        assert_eq!(Certificate::res(r, None).check_against(&other).len(), 1);
    }

    #[test]
    fn wrong_calculus() {
        let c = Certificate::cr(samples::propositional_square_refutation(), None);
        assert_eq!(c.into_res().unwrap_err(), CertError::WrongCalculus { expected: "res", found: "cr" });
    }
}
