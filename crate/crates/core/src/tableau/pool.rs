//! Hash-consed NNF concepts. Every distinct subexpression gets one id, so
//! label membership and clash checks are integer comparisons.

use rustc_hash::FxHashMap;

use super::config::Rule;
use crate::kb::{Concept, RoleName};

pub type Cid = u32;
pub type RoleId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum AtomKey<'a> {
    Class(&'a str),
    Nominal(&'a str),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PoolNode {
    Top,
    Bottom,
    Atom(u32),
    NotAtom(u32),
    And(Vec<Cid>),
    Or(Vec<Cid>),
    Exists(RoleId, Cid),
    ForAll(RoleId, Cid),
    AtLeast(u32, RoleId, Cid),
    AtMost(u32, RoleId, Cid),
}

#[derive(Debug, Default)]
pub struct ConceptPool {
    nodes: Vec<PoolNode>,
    index: FxHashMap<PoolNode, Cid>,
    atoms: Vec<(bool, String)>,
    atom_index: FxHashMap<(bool, String), u32>,
    roles: Vec<RoleName>,
    role_index: FxHashMap<RoleName, RoleId>,
    negation: FxHashMap<Cid, Cid>,
    closed_upto: usize,
    counting: bool,
}

pub const TOP: Cid = 0;
pub const BOTTOM: Cid = 1;

impl ConceptPool {
    pub fn new() -> Self {
        let mut p = ConceptPool::default();
        p.insert(PoolNode::Top);
        p.insert(PoolNode::Bottom);
        p
    }

    fn insert(&mut self, node: PoolNode) -> Cid {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        if matches!(node, PoolNode::AtLeast(..) | PoolNode::AtMost(..)) {
            self.counting = true;
        }
        let id = self.nodes.len() as Cid;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn atom(&mut self, key: AtomKey<'_>) -> u32 {
        let owned = match key {
            AtomKey::Class(n) => (false, n.to_string()),
            AtomKey::Nominal(n) => (true, n.to_string()),
        };
        if let Some(&a) = self.atom_index.get(&owned) {
            return a;
        }
        let a = self.atoms.len() as u32;
        self.atoms.push(owned.clone());
        self.atom_index.insert(owned, a);
        a
    }

    pub fn role(&mut self, r: &RoleName) -> RoleId {
        if let Some(&id) = self.role_index.get(r) {
            return id;
        }
        let id = self.roles.len() as RoleId;
        self.roles.push(r.clone());
        self.role_index.insert(r.clone(), id);
        id
    }

    pub fn role_name(&self, r: RoleId) -> &RoleName {
        &self.roles[r as usize]
    }

    /// Interns `nnf(c)` and closes the pool under the negations the engine may
    /// need at run time.
    pub fn intern(&mut self, c: &Concept) -> Cid {
        let id = self.intern_nnf(&c.nnf());
        self.close();
        id
    }

    fn intern_nnf(&mut self, c: &Concept) -> Cid {
        let node = match c {
            Concept::Top => return TOP,
            Concept::Bottom => return BOTTOM,
            Concept::Atomic(n) => PoolNode::Atom(self.atom(AtomKey::Class(n))),
            Concept::Nominal(n) => PoolNode::Atom(self.atom(AtomKey::Nominal(n))),
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Atomic(n) => PoolNode::NotAtom(self.atom(AtomKey::Class(n))),
                Concept::Nominal(n) => PoolNode::NotAtom(self.atom(AtomKey::Nominal(n))),
                other => return self.intern_nnf(&other.negate().nnf()),
            },
            Concept::And(ops) => {
                let mut ids: Vec<Cid> = ops.iter().map(|o| self.intern_nnf(o)).collect();
                ids.sort_unstable();
                ids.dedup();
                PoolNode::And(ids)
            }
            Concept::Or(ops) => {
                let mut ids: Vec<Cid> = ops.iter().map(|o| self.intern_nnf(o)).collect();
                ids.sort_unstable();
                ids.dedup();
                PoolNode::Or(ids)
            }
            Concept::Exists(r, f) => {
                let f = self.intern_nnf(f);
                PoolNode::Exists(self.role(r), f)
            }
            Concept::ForAll(r, f) => {
                let f = self.intern_nnf(f);
                PoolNode::ForAll(self.role(r), f)
            }
            Concept::AtLeast(n, r, f) => {
                let f = self.intern_nnf(f);
                PoolNode::AtLeast(*n, self.role(r), f)
            }
            Concept::AtMost(n, r, f) => {
                let f = self.intern_nnf(f);
                PoolNode::AtMost(*n, self.role(r), f)
            }
        };
        self.insert(node)
    }

    /// Structural NNF negation of an interned concept.
    fn negate_id(&mut self, id: Cid) -> Cid {
        if let Some(&n) = self.negation.get(&id) {
            return n;
        }
        let node = match self.nodes[id as usize].clone() {
            PoolNode::Top => PoolNode::Bottom,
            PoolNode::Bottom => PoolNode::Top,
            PoolNode::Atom(a) => PoolNode::NotAtom(a),
            PoolNode::NotAtom(a) => PoolNode::Atom(a),
            PoolNode::And(ops) => {
                let mut v: Vec<Cid> = ops.iter().map(|&o| self.negate_id(o)).collect();
                v.sort_unstable();
                v.dedup();
                PoolNode::Or(v)
            }
            PoolNode::Or(ops) => {
                let mut v: Vec<Cid> = ops.iter().map(|&o| self.negate_id(o)).collect();
                v.sort_unstable();
                v.dedup();
                PoolNode::And(v)
            }
            PoolNode::Exists(r, f) => PoolNode::ForAll(r, self.negate_id(f)),
            PoolNode::ForAll(r, f) => PoolNode::Exists(r, self.negate_id(f)),
            PoolNode::AtLeast(0, ..) => PoolNode::Bottom,
            PoolNode::AtLeast(n, r, f) => PoolNode::AtMost(n - 1, r, f),
            PoolNode::AtMost(n, r, f) => PoolNode::AtLeast(n + 1, r, f),
        };
        let n = self.insert(node);
        self.negation.insert(id, n);
        self.negation.insert(n, id);
        n
    }

    /// Ensures every atom has both polarities and every ≤-filler has its
    /// negation interned.
    fn close(&mut self) {
        while self.closed_upto < self.nodes.len() {
            let id = self.closed_upto as Cid;
            self.closed_upto += 1;
            match self.nodes[id as usize] {
                PoolNode::Atom(_) | PoolNode::NotAtom(_) => {
                    self.negate_id(id);
                }
                PoolNode::AtMost(_, _, f) => {
                    self.negate_id(f);
                }
                _ => {}
            }
        }
    }

    pub fn node(&self, id: Cid) -> &PoolNode {
        &self.nodes[id as usize]
    }

    /// Negation of an atom, negated atom, or ≤-filler (always precomputed).
    pub fn complement(&self, id: Cid) -> Option<Cid> {
        self.negation.get(&id).copied()
    }

    pub fn rule(&self, id: Cid) -> Rule {
        match self.node(id) {
            PoolNode::Top | PoolNode::Bottom | PoolNode::Atom(_) | PoolNode::NotAtom(_) => Rule::Id,
            PoolNode::And(_) => Rule::And,
            PoolNode::Or(_) => Rule::Or,
            PoolNode::Exists(..) => Rule::Exists,
            PoolNode::ForAll(..) => Rule::ForAll,
            PoolNode::AtMost(..) => Rule::AtMost,
            PoolNode::AtLeast(..) => Rule::AtLeast,
        }
    }

    /// True once any ≥ or ≤ has been interned.
    pub fn has_counting(&self) -> bool {
        self.counting
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rebuilds the surface concept for an id (diagnostics and tests).
    pub fn concept(&self, id: Cid) -> Concept {
        let atom = |a: u32| {
            let (nominal, name) = &self.atoms[a as usize];
            if *nominal {
                Concept::Nominal(name.clone())
            } else {
                Concept::Atomic(name.clone())
            }
        };
        let role = |r: RoleId| self.roles[r as usize].clone();
        match self.node(id) {
            PoolNode::Top => Concept::Top,
            PoolNode::Bottom => Concept::Bottom,
            PoolNode::Atom(a) => atom(*a),
            PoolNode::NotAtom(a) => Concept::Not(Box::new(atom(*a))),
            PoolNode::And(ops) => Concept::And(ops.iter().map(|&o| self.concept(o)).collect()),
            PoolNode::Or(ops) => Concept::Or(ops.iter().map(|&o| self.concept(o)).collect()),
            PoolNode::Exists(r, f) => Concept::Exists(role(*r), Box::new(self.concept(*f))),
            PoolNode::ForAll(r, f) => Concept::ForAll(role(*r), Box::new(self.concept(*f))),
            PoolNode::AtLeast(n, r, f) => Concept::AtLeast(*n, role(*r), Box::new(self.concept(*f))),
            PoolNode::AtMost(n, r, f) => Concept::AtMost(*n, role(*r), Box::new(self.concept(*f))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_shares_subterms() {
        let mut p = ConceptPool::new();
        let a = p.intern(&Concept::and(vec![Concept::atomic("A"), Concept::atomic("B")]));
        let b = p.intern(&Concept::and(vec![Concept::atomic("B"), Concept::atomic("A")]));
        assert_eq!(a, b);
        let na = p.intern(&Concept::atomic("A").negate());
        let pa = p.intern(&Concept::atomic("A"));
        assert_eq!(p.complement(pa), Some(na));
    }

    #[test]
    fn nominals_are_distinct_from_classes() {
        let mut p = ConceptPool::new();
        assert_ne!(p.intern(&Concept::atomic("a")), p.intern(&Concept::nominal("a")));
    }

    #[test]
    fn at_most_filler_negation_is_precomputed() {
        let mut p = ConceptPool::new();
        let c = p.intern(&Concept::at_most(1, "R", Concept::exists("S", Concept::atomic("A"))));
        let PoolNode::AtMost(_, _, f) = *p.node(c) else { panic!() };
        let nf = p.complement(f).unwrap();
        assert_eq!(p.concept(nf), Concept::forall("S", Concept::atomic("A").negate()));
        assert!(p.has_counting());
    }

    #[test]
    fn round_trips_through_surface_form() {
        let mut p = ConceptPool::new();
        let c = Concept::or(vec![Concept::atomic("A"), Concept::forall("R", Concept::atomic("B").negate())]);
        let id = p.intern(&c);
        assert_eq!(p.intern(&p.concept(id)), id);
        assert_eq!(p.rule(id), Rule::Or);
    }
}
