//! Reader and writer for the supported OWL functional-syntax subset.
//!
//! Grammar (whitespace and `#` line comments are insignificant):
//!
//! ```text
//! document   := prefix* ( "Ontology(" iri? axiom* ")" | axiom* )
//! prefix     := "Prefix(" pname "=" iri ")"
//! axiom      := "Declaration(" ("Class"|"ObjectProperty"|"DataProperty"|"NamedIndividual") "(" name ")" ")"
//!             | "SubClassOf(" class class ")"
//!             | "EquivalentClasses(" class class+ ")" | "DisjointClasses(" class class+ ")"
//!             | "SubObjectPropertyOf(" role role ")" | "InverseObjectProperties(" role role ")"
//!             | "ObjectPropertyDomain(" role class ")" | "ObjectPropertyRange(" role class ")"
//!             | ("Functional"|"Transitive"|"Symmetric"|"InverseFunctional") "ObjectProperty(" role ")"
//!             | "ClassAssertion(" class name ")" | "ObjectPropertyAssertion(" role name name ")"
//!             | "DataPropertyAssertion(" name name literal ")"
//! class      := name | "owl:Thing" | "owl:Nothing"
//!             | ("ObjectIntersectionOf("|"ObjectUnionOf(") class class+ ")"
//!             | "ObjectComplementOf(" class ")" | "ObjectOneOf(" name+ ")"
//!             | ("ObjectSomeValuesFrom("|"ObjectAllValuesFrom(") role class ")"
//!             | ("ObjectMinCardinality("|"ObjectMaxCardinality(") int role class? ")"
//! ```

use std::fmt::Write as _;

use crate::kb::{Axiom, Concept, EntityKind, RoleName};

use super::{OntologyHeader, ParseError, PrefixDecl, SourceDocument};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Eq,
    Iri(String),
    Literal(String),
    Int(u32),
    Name(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "(".into(),
            Tok::Close => ")".into(),
            Tok::Eq => "=".into(),
            Tok::Iri(s) | Tok::Literal(s) | Tok::Name(s) => s.clone(),
            Tok::Int(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
    last: (usize, usize),
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '<' | '>' | '"' | '=' | '#')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.char_indices().peekable(), line: 1, column: 1, last: (1, 1) }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        self.last = (self.line, self.column);
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn error(&self, line: usize, column: usize, message: &str, token: &str) -> ParseError {
        ParseError { line, column, message: message.to_string(), token: token.to_string() }
    }

    fn tokenize(mut self) -> Result<(Vec<Spanned>, (usize, usize)), ParseError> {
        let mut out = Vec::new();
        loop {
            let Some(c) = self.peek() else { break };
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            let (line, column) = (self.line, self.column);
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::Open
                }
                ')' => {
                    self.bump();
                    Tok::Close
                }
                '=' => {
                    self.bump();
                    Tok::Eq
                }
                '<' => {
                    let mut s = String::new();
                    s.push(self.bump().unwrap());
                    loop {
                        match self.bump() {
                            Some('>') => {
                                s.push('>');
                                break;
                            }
                            Some(c) if c.is_whitespace() || c == '<' => {
                                let (l, col) = self.last;
                                return Err(self.error(l, col, "invalid character in IRI", &s));
                            }
                            Some(c) => s.push(c),
                            None => {
                                let (l, col) = self.last;
                                return Err(self.error(l, col, "unterminated IRI", &s));
                            }
                        }
                    }
                    Tok::Iri(s)
                }
                '"' => {
                    let mut s = String::new();
                    s.push(self.bump().unwrap());
                    loop {
                        match self.bump() {
                            Some('\\') => {
                                s.push('\\');
                                match self.bump() {
                                    Some(c) => s.push(c),
                                    None => {
                                        let (l, col) = self.last;
                                        return Err(self.error(l, col, "unterminated literal", &s));
                                    }
                                }
                            }
                            Some('"') => {
                                s.push('"');
                                break;
                            }
                            Some(c) => s.push(c),
                            None => {
                                let (l, col) = self.last;
                                return Err(self.error(l, col, "unterminated literal", &s));
                            }
                        }
                    }
                    // optional ^^datatype or @lang suffix
                    match self.peek() {
                        Some('^') => {
                            self.bump();
                            if self.peek() != Some('^') {
                                let (l, col) = self.last;
                                return Err(self.error(l, col, "expected '^^' after literal", &s));
                            }
                            self.bump();
                            s.push_str("^^");
                            if self.peek() == Some('<') {
                                loop {
                                    match self.bump() {
                                        Some('>') => {
                                            s.push('>');
                                            break;
                                        }
                                        Some(c) if !c.is_whitespace() => s.push(c),
                                        _ => {
                                            let (l, col) = self.last;
                                            return Err(self.error(l, col, "unterminated IRI", &s));
                                        }
                                    }
                                }
                            } else {
                                let start = s.len();
                                while let Some(c) = self.peek().filter(|&c| is_name_char(c)) {
                                    s.push(c);
                                    self.bump();
                                }
                                if s.len() == start {
                                    let (l, col) = self.last;
                                    return Err(self.error(l, col, "missing datatype", &s));
                                }
                            }
                        }
                        Some('@') => {
                            s.push('@');
                            self.bump();
                            while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '-') {
                                s.push(c);
                                self.bump();
                            }
                        }
                        _ => {}
                    }
                    Tok::Literal(s)
                }
                _ if is_name_char(c) => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_name_char(c)) {
                        s.push(c);
                        self.bump();
                    }
                    if s.bytes().all(|b| b.is_ascii_digit()) {
                        match s.parse::<u32>() {
                            Ok(n) => Tok::Int(n),
                            Err(_) => return Err(self.error(line, column, "integer out of range", &s)),
                        }
                    } else {
                        Tok::Name(s)
                    }
                }
                other => {
                    return Err(self.error(line, column, "unexpected character", &other.to_string()));
                }
            };
            out.push(Spanned { tok, line, column });
        }
        Ok((out, self.last))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error_here(&self, message: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some(s) => ParseError {
                line: s.line,
                column: s.column,
                message: message.to_string(),
                token: s.tok.describe(),
            },
            None => ParseError {
                line: self.eof.0,
                column: self.eof.1,
                message: format!("{message} (unexpected end of input)"),
                token: String::new(),
            },
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_open(&mut self) -> PResult<()> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here("expected '('")),
        }
    }

    fn expect_close(&mut self) -> PResult<()> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here("expected ')'")),
        }
    }

    fn at_close(&self) -> bool {
        matches!(self.peek(), Some(Tok::Close))
    }

    fn keyword(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Name(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error_here("expected keyword")),
        }
    }

    /// An entity name: prefixed name, bare name, or full IRI.
    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Name(s)) | Some(Tok::Iri(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error_here(&format!("expected {what}"))),
        }
    }

    fn role(&mut self) -> PResult<RoleName> {
        self.name("object property").map(RoleName::new)
    }

    fn document(&mut self) -> PResult<SourceDocument> {
        let mut doc = SourceDocument::default();
        while let Some(Tok::Name(k)) = self.peek() {
            if k != "Prefix" {
                break;
            }
            self.pos += 1;
            self.expect_open()?;
            let prefix = match self.peek() {
                Some(Tok::Name(p)) if p.ends_with(':') => p.clone(),
                _ => return Err(self.error_here("expected prefix name ending in ':'")),
            };
            self.pos += 1;
            if self.next() != Some(Tok::Eq) {
                self.pos -= 1;
                return Err(self.error_here("expected '='"));
            }
            let iri = match self.peek() {
                Some(Tok::Iri(i)) => i.clone(),
                _ => return Err(self.error_here("expected IRI")),
            };
            self.pos += 1;
            self.expect_close()?;
            doc.prefixes.push(PrefixDecl { prefix, iri });
        }
        if matches!(self.peek(), Some(Tok::Name(k)) if k == "Ontology") {
            self.pos += 1;
            self.expect_open()?;
            let iri = match self.peek() {
                Some(Tok::Iri(i)) => {
                    let i = i.clone();
                    self.pos += 1;
                    Some(i)
                }
                _ => None,
            };
            doc.ontology = Some(OntologyHeader { iri });
            while !self.at_close() {
                if self.peek().is_none() {
                    return Err(self.error_here("expected axiom or ')'"));
                }
                let ax = self.axiom()?;
                doc.axioms.push(ax);
            }
            self.expect_close()?;
            if self.peek().is_some() {
                return Err(self.error_here("trailing content after Ontology(...)"));
            }
        } else {
            while self.peek().is_some() {
                let ax = self.axiom()?;
                doc.axioms.push(ax);
            }
        }
        Ok(doc)
    }

    fn axiom(&mut self) -> PResult<Axiom> {
        let start = self.pos;
        let kw = self.keyword()?;
        self.expect_open()?;
        let ax = match kw.as_str() {
            "Declaration" => {
                let kind = match self.keyword()?.as_str() {
                    "Class" => EntityKind::Class,
                    "ObjectProperty" => EntityKind::ObjectProperty,
                    "DataProperty" => EntityKind::DataProperty,
                    "NamedIndividual" => EntityKind::NamedIndividual,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error_here("unsupported entity kind"));
                    }
                };
                self.expect_open()?;
                let name = self.name("entity name")?;
                self.expect_close()?;
                Axiom::Declaration(kind, name)
            }
            "SubClassOf" => {
                let c = self.class()?;
                let d = self.class()?;
                Axiom::SubClassOf(c, d)
            }
            "EquivalentClasses" => Axiom::EquivalentClasses(self.class_list(2)?),
            "DisjointClasses" => Axiom::DisjointClasses(self.class_list(2)?),
            "SubObjectPropertyOf" => {
                let r = self.role()?;
                Axiom::SubObjectPropertyOf(r, self.role()?)
            }
            "InverseObjectProperties" => {
                let r = self.role()?;
                Axiom::InverseObjectProperties(r, self.role()?)
            }
            "ObjectPropertyDomain" => {
                let r = self.role()?;
                Axiom::Domain(r, self.class()?)
            }
            "ObjectPropertyRange" => {
                let r = self.role()?;
                Axiom::Range(r, self.class()?)
            }
            "FunctionalObjectProperty" => Axiom::FunctionalProperty(self.role()?),
            "TransitiveObjectProperty" => Axiom::TransitiveProperty(self.role()?),
            "SymmetricObjectProperty" => Axiom::SymmetricProperty(self.role()?),
            "InverseFunctionalObjectProperty" => Axiom::InverseFunctionalProperty(self.role()?),
            "ClassAssertion" => {
                let c = self.class()?;
                Axiom::ClassAssertion(c, self.name("individual")?)
            }
            "ObjectPropertyAssertion" => {
                let r = self.role()?;
                let a = self.name("individual")?;
                Axiom::PropertyAssertion(r, a, self.name("individual")?)
            }
            "DataPropertyAssertion" => {
                let p = self.name("data property")?;
                let a = self.name("individual")?;
                let lit = match self.peek() {
                    Some(Tok::Literal(l)) => l.clone(),
                    _ => return Err(self.error_here("expected literal")),
                };
                self.pos += 1;
                Axiom::DataPropertyAssertion(p, a, lit)
            }
            _ => {
                self.pos = start;
                return Err(self.error_here("unsupported axiom"));
            }
        };
        self.expect_close()?;
        Ok(ax)
    }

    fn class_list(&mut self, min: usize) -> PResult<Vec<Concept>> {
        let mut out = Vec::new();
        while !self.at_close() {
            out.push(self.class()?);
        }
        if out.len() < min {
            return Err(self.error_here(&format!("expected at least {min} class expressions")));
        }
        Ok(out)
    }

    fn class(&mut self) -> PResult<Concept> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error_here("class expression nested too deeply"));
        }
        self.depth += 1;
        let r = self.class_inner();
        self.depth -= 1;
        r
    }

    fn class_inner(&mut self) -> PResult<Concept> {
        let name = match self.peek() {
            Some(Tok::Iri(i)) => {
                let i = i.clone();
                self.pos += 1;
                return Ok(Concept::Atomic(i));
            }
            Some(Tok::Name(n)) => n.clone(),
            _ => return Err(self.error_here("expected class expression")),
        };
        let start = self.pos;
        self.pos += 1;
        if !matches!(self.peek(), Some(Tok::Open)) {
            return Ok(match name.as_str() {
                "owl:Thing" => Concept::Top,
                "owl:Nothing" => Concept::Bottom,
                _ => Concept::Atomic(name),
            });
        }
        self.pos += 1;
        let c = match name.as_str() {
            "ObjectIntersectionOf" => Concept::And(self.class_list(2)?),
            "ObjectUnionOf" => Concept::Or(self.class_list(2)?),
            "ObjectComplementOf" => Concept::Not(Box::new(self.class()?)),
            "ObjectOneOf" => {
                let mut names = Vec::new();
                while !self.at_close() {
                    names.push(Concept::Nominal(self.name("individual")?));
                }
                if names.is_empty() {
                    return Err(self.error_here("expected at least one individual"));
                }
                Concept::or(names)
            }
            "ObjectSomeValuesFrom" => {
                let r = self.role()?;
                Concept::Exists(r, Box::new(self.class()?))
            }
            "ObjectAllValuesFrom" => {
                let r = self.role()?;
                Concept::ForAll(r, Box::new(self.class()?))
            }
            "ObjectMinCardinality" | "ObjectMaxCardinality" => {
                let n = match self.peek() {
                    Some(Tok::Int(n)) => *n,
                    _ => return Err(self.error_here("expected non-negative integer")),
                };
                self.pos += 1;
                let r = self.role()?;
                let filler = if self.at_close() { Concept::Top } else { self.class()? };
                if name == "ObjectMinCardinality" {
                    Concept::AtLeast(n, r, Box::new(filler))
                } else {
                    Concept::AtMost(n, r, Box::new(filler))
                }
            }
            _ => {
                self.pos = start;
                return Err(self.error_here("unsupported class constructor"));
            }
        };
        self.expect_close()?;
        Ok(c)
    }
}

pub(super) fn parse(text: &str) -> Result<SourceDocument, ParseError> {
    let (toks, eof) = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0, eof, depth: 0 };
    p.document()
}

pub(super) fn write_class(out: &mut String, c: &Concept) {
    let list = |out: &mut String, kw: &str, ops: &[Concept]| {
        out.push_str(kw);
        out.push('(');
        for (i, op) in ops.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write_class(out, op);
        }
        out.push(')');
    };
    match c {
        Concept::Top => out.push_str("owl:Thing"),
        Concept::Bottom => out.push_str("owl:Nothing"),
        Concept::Atomic(a) => out.push_str(a),
        Concept::Nominal(o) => {
            let _ = write!(out, "ObjectOneOf({o})");
        }
        Concept::Not(inner) => {
            out.push_str("ObjectComplementOf(");
            write_class(out, inner);
            out.push(')');
        }
        Concept::And(ops) => list(out, "ObjectIntersectionOf", ops),
        Concept::Or(ops) if ops.iter().all(|c| matches!(c, Concept::Nominal(_))) => {
            out.push_str("ObjectOneOf(");
            for (i, op) in ops.iter().enumerate() {
                if let Concept::Nominal(o) = op {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(o);
                }
            }
            out.push(')');
        }
        Concept::Or(ops) => list(out, "ObjectUnionOf", ops),
        Concept::Exists(r, f) => {
            let _ = write!(out, "ObjectSomeValuesFrom({r} ");
            write_class(out, f);
            out.push(')');
        }
        Concept::ForAll(r, f) => {
            let _ = write!(out, "ObjectAllValuesFrom({r} ");
            write_class(out, f);
            out.push(')');
        }
        Concept::AtLeast(n, r, f) => {
            let _ = write!(out, "ObjectMinCardinality({n} {r} ");
            write_class(out, f);
            out.push(')');
        }
        Concept::AtMost(n, r, f) => {
            let _ = write!(out, "ObjectMaxCardinality({n} {r} ");
            write_class(out, f);
            out.push(')');
        }
    }
}

pub(super) fn write_axiom(out: &mut String, ax: &Axiom) {
    let classes = |out: &mut String, kw: &str, cs: &[&Concept]| {
        out.push_str(kw);
        out.push('(');
        for (i, c) in cs.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write_class(out, c);
        }
        out.push(')');
    };
    match ax {
        Axiom::Declaration(kind, name) => {
            let k = match kind {
                EntityKind::Class => "Class",
                EntityKind::ObjectProperty => "ObjectProperty",
                EntityKind::DataProperty => "DataProperty",
                EntityKind::NamedIndividual => "NamedIndividual",
            };
            let _ = write!(out, "Declaration({k}({name}))");
        }
        Axiom::SubClassOf(c, d) => classes(out, "SubClassOf", &[c, d]),
        Axiom::EquivalentClasses(cs) => classes(out, "EquivalentClasses", &cs.iter().collect::<Vec<_>>()),
        Axiom::DisjointClasses(cs) => classes(out, "DisjointClasses", &cs.iter().collect::<Vec<_>>()),
        Axiom::SubObjectPropertyOf(r, s) => {
            let _ = write!(out, "SubObjectPropertyOf({r} {s})");
        }
        Axiom::InverseObjectProperties(r, s) => {
            let _ = write!(out, "InverseObjectProperties({r} {s})");
        }
        Axiom::Domain(r, c) => {
            let _ = write!(out, "ObjectPropertyDomain({r} ");
            write_class(out, c);
            out.push(')');
        }
        Axiom::Range(r, c) => {
            let _ = write!(out, "ObjectPropertyRange({r} ");
            write_class(out, c);
            out.push(')');
        }
        Axiom::FunctionalProperty(r) => {
            let _ = write!(out, "FunctionalObjectProperty({r})");
        }
        Axiom::TransitiveProperty(r) => {
            let _ = write!(out, "TransitiveObjectProperty({r})");
        }
        Axiom::SymmetricProperty(r) => {
            let _ = write!(out, "SymmetricObjectProperty({r})");
        }
        Axiom::InverseFunctionalProperty(r) => {
            let _ = write!(out, "InverseFunctionalObjectProperty({r})");
        }
        Axiom::ClassAssertion(c, a) => {
            out.push_str("ClassAssertion(");
            write_class(out, c);
            let _ = write!(out, " {a})");
        }
        Axiom::PropertyAssertion(r, a, b) => {
            let _ = write!(out, "ObjectPropertyAssertion({r} {a} {b})");
        }
        Axiom::DataPropertyAssertion(p, a, lit) => {
            let _ = write!(out, "DataPropertyAssertion({p} {a} {lit})");
        }
    }
}

/// Parses a single class expression, e.g. for command-line arguments.
pub(super) fn parse_class(text: &str) -> Result<Concept, ParseError> {
    let (toks, eof) = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0, eof, depth: 0 };
    let c = p.class()?;
    if p.peek().is_some() {
        return Err(p.error_here("trailing input after class expression"));
    }
    Ok(c)
}
