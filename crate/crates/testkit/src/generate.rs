//! Concept enumerators and synthetic ontology families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tableau_core::io::SourceDocument;
use tableau_core::kb::{Axiom, Concept, EntityKind, RoleName};

/// Every ALC concept of exactly `size` constructors over leaves `A`, `B`,
/// `⊤`, `⊥`, unary `¬`, `∃R`, `∀R` and binary `⊓`, `⊔`. Leaves count 1;
/// composite nodes count 1 plus their children.
pub fn alc_concepts_of_size(size: usize) -> Vec<Concept> {
    let mut by_size: Vec<Vec<Concept>> = vec![Vec::new()];
    for s in 1..=size {
        let mut out = Vec::new();
        if s == 1 {
            out.extend([Concept::atomic("A"), Concept::atomic("B"), Concept::Top, Concept::Bottom]);
        } else {
            for c in &by_size[s - 1] {
                out.push(Concept::Not(Box::new(c.clone())));
                out.push(Concept::exists("R", c.clone()));
                out.push(Concept::forall("R", c.clone()));
            }
            for l in 1..s - 1 {
                let r = s - 1 - l;
                for a in &by_size[l] {
                    for b in &by_size[r] {
                        out.push(Concept::And(vec![a.clone(), b.clone()]));
                        out.push(Concept::Or(vec![a.clone(), b.clone()]));
                    }
                }
            }
        }
        by_size.push(out);
    }
    by_size.pop().unwrap_or_default()
}

/// Shape parameters for random concepts.
#[derive(Debug, Clone)]
pub struct ConceptShape {
    pub atoms: Vec<String>,
    pub roles: Vec<String>,
    pub max_depth: usize,
    pub counting: bool,
}

pub fn random_concept(rng: &mut impl Rng, shape: &ConceptShape, depth: usize) -> Concept {
    let literal = |rng: &mut dyn rand::RngCore| {
        let a = Concept::atomic(shape.atoms.choose(rng).unwrap().as_str());
        if rng.gen_bool(0.3) {
            a.negate()
        } else {
            a
        }
    };
    if depth >= shape.max_depth || rng.gen_bool(0.25) {
        return literal(rng);
    }
    let role = shape.roles.choose(rng).unwrap().clone();
    let kinds = if shape.counting { 6 } else { 4 };
    match rng.gen_range(0..kinds) {
        0 => {
            let k = rng.gen_range(2..=3);
            Concept::And((0..k).map(|_| random_concept(rng, shape, depth + 1)).collect())
        }
        1 => {
            let k = rng.gen_range(2..=3);
            Concept::Or((0..k).map(|_| random_concept(rng, shape, depth + 1)).collect())
        }
        2 => Concept::exists(role, random_concept(rng, shape, depth + 1)),
        3 => Concept::forall(role, random_concept(rng, shape, depth + 1)),
        4 => Concept::at_least(rng.gen_range(1..=2), role, random_concept(rng, shape, depth + 1)),
        _ => Concept::at_most(rng.gen_range(0..=2), role, random_concept(rng, shape, depth + 1)),
    }
}

#[derive(Debug, Clone)]
pub struct OntologyShape {
    pub classes: usize,
    pub gcis: usize,
    pub total_axioms: usize,
    /// Nesting depth of generated class expressions.
    pub max_depth: usize,
    pub counting: bool,
}

impl Default for OntologyShape {
    fn default() -> Self {
        OntologyShape { classes: 6, gcis: 5, total_axioms: 60, max_depth: 2, counting: true }
    }
}

/// Random ontology with a handful of GCIs padded with declarations,
/// assertions and role axioms up to `total_axioms`.
///
/// Every GCI adds a disjunction to every node, and orders that postpone `∀`
/// combined with chronological backtracking are exponential in the number of
/// open branch points, so keep `gcis` and `max_depth` small when every order
/// has to finish.
pub fn random_ontology(seed: u64, shape: &OntologyShape) -> SourceDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..shape.classes).map(|i| format!("C{i}")).collect();
    let roles = vec!["R".to_string(), "S".to_string()];
    let cshape = ConceptShape {
        atoms: names.clone(),
        roles: roles.clone(),
        max_depth: shape.max_depth,
        counting: shape.counting,
    };
    let mut axioms = Vec::new();
    for _ in 0..shape.gcis {
        let c = Concept::atomic(names.choose(&mut rng).unwrap().as_str());
        let ax = match rng.gen_range(0..10) {
            0..=5 => Axiom::SubClassOf(c, random_concept(&mut rng, &cshape, 0)),
            6 => Axiom::EquivalentClasses(vec![c, random_concept(&mut rng, &cshape, 1)]),
            7 => {
                let d = Concept::atomic(names.choose(&mut rng).unwrap().as_str());
                if d == c {
                    Axiom::SubClassOf(random_concept(&mut rng, &cshape, 1), c)
                } else {
                    Axiom::DisjointClasses(vec![c, d])
                }
            }
            8 => Axiom::Domain(RoleName::new(roles.choose(&mut rng).unwrap().as_str()), c),
            _ => Axiom::Range(RoleName::new(roles.choose(&mut rng).unwrap().as_str()), c),
        };
        axioms.push(ax);
    }
    for n in &names {
        axioms.push(Axiom::Declaration(EntityKind::Class, n.clone()));
    }
    let mut i = 0;
    while axioms.len() < shape.total_axioms {
        let ax = match rng.gen_range(0..4) {
            0 => Axiom::ClassAssertion(
                Concept::atomic(names.choose(&mut rng).unwrap().as_str()),
                format!("ind{i}"),
            ),
            1 => Axiom::PropertyAssertion(
                RoleName::new(roles.choose(&mut rng).unwrap().as_str()),
                format!("ind{i}"),
                format!("ind{}", i + 1),
            ),
            2 => Axiom::SubObjectPropertyOf(RoleName::new("R"), RoleName::new("S")),
            _ => Axiom::TransitiveProperty(RoleName::new("S")),
        };
        axioms.push(ax);
        i += 1;
    }
    SourceDocument::from_axioms(axioms)
}

/// `C ⊑ (A1 ⊔ B1) ⊓ … ⊓ (An ⊔ Bn) ⊓ ∃R.D ⊓ ∀R.¬D`.
///
/// `C` is unsatisfiable for a reason unrelated to the disjunctions: orders
/// that expand `∃`/`∀` first clash immediately, orders that postpone them
/// walk the 2^n branches with chronological backtracking. The internalized
/// axiom also fires at every successor, so for those orders the search
/// compounds with depth and n = 4 is already out of reach.
pub fn disjunction_bomb(n: usize) -> SourceDocument {
    let mut conj: Vec<Concept> = (1..=n)
        .map(|i| Concept::Or(vec![Concept::atomic(format!("A{i}")), Concept::atomic(format!("B{i}"))]))
        .collect();
    conj.push(Concept::exists("R", Concept::atomic("D")));
    conj.push(Concept::forall("R", Concept::atomic("D").negate()));
    SourceDocument::from_axioms(vec![Axiom::SubClassOf(Concept::atomic("C"), Concept::And(conj))])
}

/// `A ⊑ ∃R.A` plus `k` further classes chained below `A`.
pub fn cyclic_chain(k: usize) -> SourceDocument {
    let mut axioms = vec![Axiom::SubClassOf(Concept::atomic("A"), Concept::exists("R", Concept::atomic("A")))];
    for i in 0..k {
        let sup = if i == 0 { "A".to_string() } else { format!("A{}", i - 1) };
        axioms.push(Axiom::SubClassOf(Concept::atomic(format!("A{i}")), Concept::atomic(sup)));
    }
    SourceDocument::from_axioms(axioms)
}
