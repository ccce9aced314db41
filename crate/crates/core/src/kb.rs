//! Description-logic data model: concept expressions, axioms and knowledge bases.
//!
//! Concepts are plain owned trees. `And`/`Or` are n-ary; the parser keeps the
//! surface nesting exactly as written, while [`Concept::nnf`] (and therefore
//! everything the reasoner sees) is flattened.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Name of a class, individual, or data property as written in the source.
pub type Name = String;

/// An atomic object property. Inverses are not supported.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleName(String);

impl RoleName {
    /// Panics on an empty name; roles are always named.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "role names must be non-empty");
        RoleName(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A concept expression of ALCQ with nominals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(Name),
    Not(Box<Concept>),
    /// At least two operands.
    And(Vec<Concept>),
    /// At least two operands.
    Or(Vec<Concept>),
    Exists(RoleName, Box<Concept>),
    ForAll(RoleName, Box<Concept>),
    AtLeast(u32, RoleName, Box<Concept>),
    AtMost(u32, RoleName, Box<Concept>),
    Nominal(Name),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    pub fn nominal(name: impl Into<String>) -> Self {
        Concept::Nominal(name.into())
    }

    /// Builds a conjunction. Zero operands give `Top`, one operand is returned as is.
    pub fn and(mut operands: Vec<Concept>) -> Self {
        match operands.len() {
            0 => Concept::Top,
            1 => operands.pop().unwrap(),
            _ => Concept::And(operands),
        }
    }

    /// Builds a disjunction. Zero operands give `Bottom`, one operand is returned as is.
    pub fn or(mut operands: Vec<Concept>) -> Self {
        match operands.len() {
            0 => Concept::Bottom,
            1 => operands.pop().unwrap(),
            _ => Concept::Or(operands),
        }
    }

    pub fn exists(role: impl Into<String>, filler: Concept) -> Self {
        Concept::Exists(RoleName::new(role), Box::new(filler))
    }

    pub fn forall(role: impl Into<String>, filler: Concept) -> Self {
        Concept::ForAll(RoleName::new(role), Box::new(filler))
    }

    pub fn at_least(n: u32, role: impl Into<String>, filler: Concept) -> Self {
        Concept::AtLeast(n, RoleName::new(role), Box::new(filler))
    }

    pub fn at_most(n: u32, role: impl Into<String>, filler: Concept) -> Self {
        Concept::AtMost(n, RoleName::new(role), Box::new(filler))
    }

    /// `¬self` with double negation and ⊤/⊥ duality folded, nothing else.
    pub fn negate(&self) -> Concept {
        match self {
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Not(inner) => (**inner).clone(),
            other => Concept::Not(Box::new(other.clone())),
        }
    }

    /// Negation normal form, with n-ary `And`/`Or` flattened.
    pub fn nnf(&self) -> Concept {
        self.nnf_with(false)
    }

    fn nnf_with(&self, negated: bool) -> Concept {
        use Concept::*;
        match (self, negated) {
            (Top, false) | (Bottom, true) => Top,
            (Top, true) | (Bottom, false) => Bottom,
            (Atomic(_), false) | (Nominal(_), false) => self.clone(),
            (Atomic(_), true) | (Nominal(_), true) => Not(Box::new(self.clone())),
            (Not(inner), _) => inner.nnf_with(!negated),
            (And(ops), false) | (Or(ops), true) => {
                flat_and(ops.iter().map(|c| c.nnf_with(negated)))
            }
            (Or(ops), false) | (And(ops), true) => flat_or(ops.iter().map(|c| c.nnf_with(negated))),
            (Exists(r, c), false) => Exists(r.clone(), Box::new(c.nnf_with(false))),
            (Exists(r, c), true) => ForAll(r.clone(), Box::new(c.nnf_with(true))),
            (ForAll(r, c), false) => ForAll(r.clone(), Box::new(c.nnf_with(false))),
            (ForAll(r, c), true) => Exists(r.clone(), Box::new(c.nnf_with(true))),
            (AtLeast(0, _, _), false) => Top,
            (AtLeast(n, r, c), false) => AtLeast(*n, r.clone(), Box::new(c.nnf())),
            (AtLeast(0, _, _), true) => Bottom,
            (AtLeast(n, r, c), true) => AtMost(n - 1, r.clone(), Box::new(c.nnf())),
            (AtMost(n, r, c), false) => AtMost(*n, r.clone(), Box::new(c.nnf())),
            (AtMost(n, r, c), true) => AtLeast(n + 1, r.clone(), Box::new(c.nnf())),
        }
    }

    /// True when negation only occurs directly on atoms and nominals.
    pub fn is_nnf(&self) -> bool {
        use Concept::*;
        match self {
            Top | Bottom | Atomic(_) | Nominal(_) => true,
            Not(inner) => matches!(**inner, Atomic(_) | Nominal(_)),
            And(ops) | Or(ops) => ops.iter().all(Concept::is_nnf),
            Exists(_, c) | ForAll(_, c) | AtLeast(_, _, c) | AtMost(_, _, c) => c.is_nnf(),
        }
    }

    /// Collapses directly nested `And`-in-`And` and `Or`-in-`Or`.
    pub fn flatten(&self) -> Concept {
        use Concept::*;
        match self {
            And(ops) => flat_and(ops.iter().map(Concept::flatten)),
            Or(ops) => flat_or(ops.iter().map(Concept::flatten)),
            Not(c) => Not(Box::new(c.flatten())),
            Exists(r, c) => Exists(r.clone(), Box::new(c.flatten())),
            ForAll(r, c) => ForAll(r.clone(), Box::new(c.flatten())),
            AtLeast(n, r, c) => AtLeast(*n, r.clone(), Box::new(c.flatten())),
            AtMost(n, r, c) => AtMost(*n, r.clone(), Box::new(c.flatten())),
            other => other.clone(),
        }
    }

    /// Direct sub-concepts.
    pub fn children(&self) -> &[Concept] {
        use Concept::*;
        match self {
            And(ops) | Or(ops) => ops,
            Not(c) | Exists(_, c) | ForAll(_, c) | AtLeast(_, _, c) | AtMost(_, _, c) => {
                std::slice::from_ref(&**c)
            }
            Top | Bottom | Atomic(_) | Nominal(_) => &[],
        }
    }

    /// Pre-order traversal over this concept and all sub-concepts.
    pub fn walk(&self, f: &mut impl FnMut(&Concept)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Number of constructors and leaves.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        sig.extend_from_concept(self);
        sig
    }
}

fn flat_and(ops: impl Iterator<Item = Concept>) -> Concept {
    let mut out = Vec::new();
    for c in ops {
        match c {
            Concept::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    Concept::and(out)
}

fn flat_or(ops: impl Iterator<Item = Concept>) -> Concept {
    let mut out = Vec::new();
    for c in ops {
        match c {
            Concept::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    Concept::or(out)
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, ops: &[Concept], sep: &str) -> fmt::Result {
            f.write_str("(")?;
            for (i, c) in ops.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
        match self {
            Concept::Top => f.write_str("⊤"),
            Concept::Bottom => f.write_str("⊥"),
            Concept::Atomic(a) => f.write_str(a),
            Concept::Nominal(o) => write!(f, "{{{o}}}"),
            Concept::Not(c) => write!(f, "¬{c}"),
            Concept::And(ops) => join(f, ops, " ⊓ "),
            Concept::Or(ops) => join(f, ops, " ⊔ "),
            Concept::Exists(r, c) => write!(f, "∃{r}.{c}"),
            Concept::ForAll(r, c) => write!(f, "∀{r}.{c}"),
            Concept::AtLeast(n, r, c) => write!(f, "≥{n} {r}.{c}"),
            Concept::AtMost(n, r, c) => write!(f, "≤{n} {r}.{c}"),
        }
    }
}

/// Entity kinds that can be declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Class,
    ObjectProperty,
    DataProperty,
    NamedIndividual,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    Declaration(EntityKind, Name),
    SubClassOf(Concept, Concept),
    /// At least two operands.
    EquivalentClasses(Vec<Concept>),
    /// At least two operands.
    DisjointClasses(Vec<Concept>),
    SubObjectPropertyOf(RoleName, RoleName),
    InverseObjectProperties(RoleName, RoleName),
    Domain(RoleName, Concept),
    Range(RoleName, Concept),
    FunctionalProperty(RoleName),
    TransitiveProperty(RoleName),
    SymmetricProperty(RoleName),
    InverseFunctionalProperty(RoleName),
    ClassAssertion(Concept, Name),
    PropertyAssertion(RoleName, Name, Name),
    /// The literal is kept verbatim, including quotes and any datatype or language suffix.
    DataPropertyAssertion(Name, Name, String),
}

/// Which box an axiom belongs to, for the axiom-ratio features and KB assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomBox {
    TBox,
    RBox,
    ABox,
    /// Declarations are not logical axioms.
    Declaration,
}

impl Axiom {
    pub fn axiom_box(&self) -> AxiomBox {
        use Axiom::*;
        match self {
            Declaration(..) => AxiomBox::Declaration,
            SubClassOf(..) | EquivalentClasses(_) | DisjointClasses(_) | Domain(..) | Range(..) => {
                AxiomBox::TBox
            }
            SubObjectPropertyOf(..)
            | InverseObjectProperties(..)
            | FunctionalProperty(_)
            | TransitiveProperty(_)
            | SymmetricProperty(_)
            | InverseFunctionalProperty(_) => AxiomBox::RBox,
            ClassAssertion(..) | PropertyAssertion(..) | DataPropertyAssertion(..) => AxiomBox::ABox,
        }
    }

    /// Class expressions mentioned by the axiom, in surface order.
    pub fn concepts(&self) -> Vec<&Concept> {
        use Axiom::*;
        match self {
            SubClassOf(c, d) => vec![c, d],
            EquivalentClasses(cs) | DisjointClasses(cs) => cs.iter().collect(),
            Domain(_, c) | Range(_, c) | ClassAssertion(c, _) => vec![c],
            _ => Vec::new(),
        }
    }

    pub fn roles(&self) -> Vec<&RoleName> {
        use Axiom::*;
        match self {
            SubObjectPropertyOf(r, s) | InverseObjectProperties(r, s) => vec![r, s],
            Domain(r, _)
            | Range(r, _)
            | FunctionalProperty(r)
            | TransitiveProperty(r)
            | SymmetricProperty(r)
            | InverseFunctionalProperty(r)
            | PropertyAssertion(r, _, _) => vec![r],
            _ => Vec::new(),
        }
    }
}

/// Named entities of a concept, axiom set or knowledge base.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub classes: BTreeSet<Name>,
    pub roles: BTreeSet<RoleName>,
    pub individuals: BTreeSet<Name>,
    pub data_properties: BTreeSet<Name>,
}

impl Signature {
    pub fn extend_from_concept(&mut self, c: &Concept) {
        c.walk(&mut |c| match c {
            Concept::Atomic(a) => {
                self.classes.insert(a.clone());
            }
            Concept::Nominal(o) => {
                self.individuals.insert(o.clone());
            }
            Concept::Exists(r, _)
            | Concept::ForAll(r, _)
            | Concept::AtLeast(_, r, _)
            | Concept::AtMost(_, r, _) => {
                self.roles.insert(r.clone());
            }
            _ => {}
        });
    }

    pub fn extend_from_axiom(&mut self, axiom: &Axiom) {
        for c in axiom.concepts() {
            self.extend_from_concept(c);
        }
        for r in axiom.roles() {
            self.roles.insert(r.clone());
        }
        match axiom {
            Axiom::Declaration(kind, name) => match kind {
                EntityKind::Class => {
                    self.classes.insert(name.clone());
                }
                EntityKind::ObjectProperty => {
                    self.roles.insert(RoleName::new(name.clone()));
                }
                EntityKind::DataProperty => {
                    self.data_properties.insert(name.clone());
                }
                EntityKind::NamedIndividual => {
                    self.individuals.insert(name.clone());
                }
            },
            Axiom::ClassAssertion(_, a) => {
                self.individuals.insert(a.clone());
            }
            Axiom::PropertyAssertion(_, a, b) => {
                self.individuals.insert(a.clone());
                self.individuals.insert(b.clone());
            }
            Axiom::DataPropertyAssertion(p, a, _) => {
                self.data_properties.insert(p.clone());
                self.individuals.insert(a.clone());
            }
            _ => {}
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KbError {
    #[error("axiom cannot be internalized: {0:?}")]
    UnsupportedAxiom(Box<Axiom>),
}

/// A knowledge base split into its three boxes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbox: Vec<Axiom>,
    pub rbox: Vec<Axiom>,
    pub abox: Vec<Axiom>,
    pub signature: Signature,
}

impl KnowledgeBase {
    pub fn from_axioms<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> Self {
        let mut kb = KnowledgeBase::default();
        for ax in axioms {
            kb.add(ax.clone());
        }
        kb
    }

    pub fn add(&mut self, axiom: Axiom) {
        self.signature.extend_from_axiom(&axiom);
        match axiom.axiom_box() {
            AxiomBox::TBox => self.tbox.push(axiom),
            AxiomBox::RBox => self.rbox.push(axiom),
            AxiomBox::ABox => self.abox.push(axiom),
            AxiomBox::Declaration => {}
        }
    }

    /// Folds the TBox into a single NNF concept that must hold at every node.
    ///
    /// Functional properties contribute `≤1 R.⊤`; other role axioms carry no
    /// tableau semantics and are ignored.
    pub fn internalize_tbox(&self) -> Result<Concept, KbError> {
        let mut parts = Vec::new();
        for ax in &self.tbox {
            match ax {
                Axiom::SubClassOf(c, d) => parts.push(gci(c, d)),
                Axiom::EquivalentClasses(cs) => {
                    for pair in cs.windows(2) {
                        parts.push(gci(&pair[0], &pair[1]));
                        parts.push(gci(&pair[1], &pair[0]));
                    }
                }
                Axiom::DisjointClasses(cs) => {
                    for i in 0..cs.len() {
                        for j in i + 1..cs.len() {
                            parts.push(gci(&cs[i], &cs[j].negate()));
                        }
                    }
                }
                Axiom::Domain(r, c) => {
                    parts.push(gci(&Concept::Exists(r.clone(), Box::new(Concept::Top)), c))
                }
                Axiom::Range(r, c) => {
                    parts.push(gci(&Concept::Top, &Concept::ForAll(r.clone(), Box::new(c.clone()))))
                }
                other => return Err(KbError::UnsupportedAxiom(Box::new(other.clone()))),
            }
        }
        for ax in &self.rbox {
            if let Axiom::FunctionalProperty(r) = ax {
                parts.push(Concept::AtMost(1, r.clone(), Box::new(Concept::Top)));
            }
        }
        parts.retain(|c| *c != Concept::Top);
        Ok(flat_and(parts.into_iter()))
    }
}

/// `C ⊑ D` as the NNF constraint `¬C ⊔ D`.
fn gci(sub: &Concept, sup: &Concept) -> Concept {
    let neg_sub = sub.negate().nnf();
    let sup = sup.nnf();
    match (&neg_sub, &sup) {
        (_, Concept::Top) | (Concept::Top, _) => Concept::Top,
        (Concept::Bottom, _) => sup,
        (_, Concept::Bottom) => neg_sub,
        _ => flat_or([neg_sub, sup].into_iter()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Concept {
        Concept::atomic("A")
    }
    fn b() -> Concept {
        Concept::atomic("B")
    }

    #[test]
    fn negate_examples() {
        assert_eq!(a().negate(), Concept::Not(Box::new(a())));
        assert_eq!(Concept::Not(Box::new(a())).negate(), a());
        assert_eq!(Concept::Top.negate(), Concept::Bottom);
        assert_eq!(a().negate().negate(), a());
    }

    #[test]
    fn nnf_examples() {
        let c = Concept::and(vec![a(), b()]).negate().nnf();
        assert_eq!(c, Concept::or(vec![a().negate(), b().negate()]));

        let c = Concept::exists("R", a()).negate().nnf();
        assert_eq!(c, Concept::forall("R", a().negate()));

        assert_eq!(Concept::at_least(2, "R", a()).negate().nnf(), Concept::at_most(1, "R", a()));
        assert_eq!(Concept::at_most(1, "R", a()).negate().nnf(), Concept::at_least(2, "R", a()));
        assert_eq!(Concept::at_least(0, "R", a()).negate().nnf(), Concept::Bottom);
        assert_eq!(Concept::at_least(0, "R", a()).nnf(), Concept::Top);
    }

    #[test]
    fn nnf_flattens_nested_connectives() {
        let c = Concept::or(vec![a(), Concept::or(vec![b(), Concept::atomic("C")])]);
        assert_eq!(c.nnf(), Concept::Or(vec![a(), b(), Concept::atomic("C")]));
        // surface form is untouched
        assert!(matches!(&c, Concept::Or(ops) if ops.len() == 2));
    }

    #[test]
    fn internalize_examples() {
        let kb = KnowledgeBase::from_axioms(&[Axiom::SubClassOf(a(), b())]);
        assert_eq!(kb.internalize_tbox().unwrap(), Concept::or(vec![a().negate(), b()]));

        let kb = KnowledgeBase::from_axioms(&[Axiom::EquivalentClasses(vec![a(), b()])]);
        assert_eq!(
            kb.internalize_tbox().unwrap(),
            Concept::and(vec![
                Concept::or(vec![a().negate(), b()]),
                Concept::or(vec![b().negate(), a()]),
            ])
        );

        let kb = KnowledgeBase::from_axioms(&[Axiom::DisjointClasses(vec![a(), b()])]);
        assert_eq!(kb.internalize_tbox().unwrap(), Concept::or(vec![a().negate(), b().negate()]));

        assert_eq!(KnowledgeBase::default().internalize_tbox().unwrap(), Concept::Top);
    }

    #[test]
    fn internalize_domain_and_range() {
        let kb = KnowledgeBase::from_axioms(&[
            Axiom::Domain(RoleName::new("R"), a()),
            Axiom::Range(RoleName::new("R"), b()),
        ]);
        assert_eq!(
            kb.internalize_tbox().unwrap(),
            Concept::and(vec![
                Concept::or(vec![Concept::forall("R", Concept::Bottom), a()]),
                Concept::forall("R", b()),
            ])
        );
    }

    #[test]
    fn internalize_rejects_misplaced_axioms() {
        let kb = KnowledgeBase {
            tbox: vec![Axiom::TransitiveProperty(RoleName::new("R"))],
            ..Default::default()
        };
        assert!(matches!(kb.internalize_tbox(), Err(KbError::UnsupportedAxiom(_))));
    }

    #[test]
    fn signature_examples() {
        let sig = Concept::exists("R", a()).signature();
        assert_eq!(sig.classes, BTreeSet::from(["A".to_string()]));
        assert_eq!(sig.roles, BTreeSet::from([RoleName::new("R")]));
        assert!(sig.individuals.is_empty());

        assert_eq!(Concept::Top.signature(), Signature::default());

        let sig = Concept::and(vec![Concept::nominal("o"), a()]).signature();
        assert_eq!(sig.classes, BTreeSet::from(["A".to_string()]));
        assert!(sig.roles.is_empty());
        assert_eq!(sig.individuals, BTreeSet::from(["o".to_string()]));
    }
}
