//! Ontology documents and the tabular files exchanged between pipeline stages.

mod syntax;
mod tables;

use std::fmt;

use thiserror::Error;

use crate::kb::{Axiom, Concept, KnowledgeBase};

pub use tables::{
    read_benchmark_table, read_feature_table, read_label_table, write_benchmark_table,
    write_feature_table, write_label_table, TableError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixDecl {
    /// Includes the trailing colon, e.g. `ex:` or `:`.
    pub prefix: String,
    /// Includes the angle brackets.
    pub iri: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyHeader {
    pub iri: Option<String>,
}

/// A parsed ontology file with axioms in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceDocument {
    pub prefixes: Vec<PrefixDecl>,
    /// Present when the axioms were wrapped in `Ontology(...)`.
    pub ontology: Option<OntologyHeader>,
    pub axioms: Vec<Axiom>,
}

impl SourceDocument {
    pub fn from_axioms(axioms: Vec<Axiom>) -> Self {
        SourceDocument { axioms, ..Default::default() }
    }

    pub fn knowledge_base(&self) -> KnowledgeBase {
        KnowledgeBase::from_axioms(&self.axioms)
    }
}

/// Position is 1-based and always lies inside the input (end-of-input errors
/// point at the last character).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.token.is_empty() {
            write!(f, " at `{}`", self.token)?;
        }
        Ok(())
    }
}

pub fn parse_document(text: &str) -> Result<SourceDocument, ParseError> {
    syntax::parse(text)
}

pub fn parse_class_expression(text: &str) -> Result<Concept, ParseError> {
    syntax::parse_class(text)
}

/// Canonical form: one prefix or axiom per line, each terminated by `\n`.
pub fn serialize_document(doc: &SourceDocument) -> String {
    let mut out = String::new();
    for p in &doc.prefixes {
        out.push_str(&format!("Prefix({}={})\n", p.prefix, p.iri));
    }
    if let Some(header) = &doc.ontology {
        match &header.iri {
            Some(iri) => out.push_str(&format!("Ontology({iri}\n")),
            None => out.push_str("Ontology(\n"),
        }
    }
    for ax in &doc.axioms {
        syntax::write_axiom(&mut out, ax);
        out.push('\n');
    }
    if doc.ontology.is_some() {
        out.push_str(")\n");
    }
    out
}

pub fn class_to_string(c: &Concept) -> String {
    let mut s = String::new();
    syntax::write_class(&mut s, c);
    s
}
