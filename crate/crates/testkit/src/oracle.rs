//! Model enumeration.
//!
//! Nominals are interpreted as ordinary unary predicates, matching the
//! engine's treatment of them as fresh atoms.

use std::collections::BTreeMap;

use tableau_core::kb::{Concept, RoleName};

/// A finite interpretation over `0..n`.
struct Interp<'a> {
    n: usize,
    atoms: &'a BTreeMap<String, usize>,
    roles: &'a BTreeMap<RoleName, usize>,
    /// bit `a * n + e`
    unary: u64,
    /// bit `r * n * n + e * n + f`
    binary: u64,
}

impl Interp<'_> {
    /// Extension of `c` as a bitmask over elements.
    fn ext(&self, c: &Concept) -> u64 {
        let n = self.n;
        let all = (1u64 << n) - 1;
        match c {
            Concept::Top => all,
            Concept::Bottom => 0,
            Concept::Atomic(a) | Concept::Nominal(a) => {
                let k = self.atoms[a.as_str()];
                (self.unary >> (k * n)) & all
            }
            Concept::Not(inner) => all & !self.ext(inner),
            Concept::And(ops) => ops.iter().fold(all, |acc, o| acc & self.ext(o)),
            Concept::Or(ops) => ops.iter().fold(0, |acc, o| acc | self.ext(o)),
            Concept::Exists(r, f) => self.count_filter(r, f, |k| k >= 1),
            Concept::ForAll(r, f) => {
                let neg = Concept::Not(f.clone());
                all & !self.count_filter(r, &neg, |k| k >= 1)
            }
            Concept::AtLeast(m, r, f) => self.count_filter(r, f, |k| k >= *m as usize),
            Concept::AtMost(m, r, f) => self.count_filter(r, f, |k| k <= *m as usize),
        }
    }

    fn successors(&self, r: &RoleName, e: usize) -> u64 {
        let n = self.n;
        let k = self.roles[r];
        (self.binary >> (k * n * n + e * n)) & ((1u64 << n) - 1)
    }

    fn count_filter(&self, r: &RoleName, f: &Concept, keep: impl Fn(usize) -> bool) -> u64 {
        let fe = self.ext(f);
        let mut out = 0;
        for e in 0..self.n {
            if keep((self.successors(r, e) & fe).count_ones() as usize) {
                out |= 1 << e;
            }
        }
        out
    }
}

fn signature(c: &Concept) -> (BTreeMap<String, usize>, BTreeMap<RoleName, usize>) {
    let mut atoms = BTreeMap::new();
    let mut roles = BTreeMap::new();
    c.walk(&mut |d| match d {
        Concept::Atomic(a) | Concept::Nominal(a) => {
            let k = atoms.len();
            atoms.entry(a.clone()).or_insert(k);
        }
        Concept::Exists(r, _) | Concept::ForAll(r, _) | Concept::AtLeast(_, r, _) | Concept::AtMost(_, r, _) => {
            let k = roles.len();
            roles.entry(r.clone()).or_insert(k);
        }
        _ => {}
    });
    (atoms, roles)
}

/// Searches every interpretation with domain size `1..=max_domain` for one in
/// which `c` is non-empty and `tbox` (a concept that must hold everywhere)
/// covers the whole domain.
///
/// Panics if the search space exceeds 2^26 interpretations for some size.
pub fn has_model(c: &Concept, tbox: &Concept, max_domain: usize) -> bool {
    let both = Concept::And(vec![c.clone(), tbox.clone()]);
    let (atoms, roles) = signature(&both);
    for n in 1..=max_domain {
        let ubits = atoms.len() * n;
        let bbits = roles.len() * n * n;
        assert!(ubits + bbits <= 26, "interpretation space too large");
        let all = (1u64 << n) - 1;
        for unary in 0..1u64 << ubits {
            for binary in 0..1u64 << bbits {
                let i = Interp { n, atoms: &atoms, roles: &roles, unary, binary };
                if i.ext(tbox) == all && i.ext(c) != 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Satisfiability over domains of size at most three for concepts built from
/// the atoms `A`, `B` and the role `R`, evaluated for all 2^15
/// interpretations at once.
///
/// For each element `e` an extension is a bit vector indexed by
/// interpretation; concept evaluation is then word-parallel.
pub struct Domain3Oracle {
    atom_a: [Ext; 3],
    atom_b: [Ext; 3],
    edge: [[Ext; 3]; 3],
}

const INTERPS: usize = 1 << 15;
const WORDS: usize = INTERPS / 64;

#[derive(Clone)]
struct Ext(Box<[u64; WORDS]>);

impl Ext {
    fn filled(v: bool) -> Ext {
        Ext(Box::new([if v { u64::MAX } else { 0 }; WORDS]))
    }

    fn from_bit(bit: usize) -> Ext {
        let mut x = Ext::filled(false);
        for i in 0..INTERPS {
            if (i >> bit) & 1 == 1 {
                x.0[i / 64] |= 1 << (i % 64);
            }
        }
        x
    }

    fn and_assign(&mut self, o: &Ext) {
        self.0.iter_mut().zip(o.0.iter()).for_each(|(a, b)| *a &= b);
    }

    fn or_assign(&mut self, o: &Ext) {
        self.0.iter_mut().zip(o.0.iter()).for_each(|(a, b)| *a |= b);
    }

    fn not_assign(&mut self) {
        self.0.iter_mut().for_each(|a| *a = !*a);
    }

    fn any(&self) -> bool {
        self.0.iter().any(|&w| w != 0)
    }
}

impl Default for Domain3Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Domain3Oracle {
    /// Interpretation bits: 0..3 `A(e)`, 3..6 `B(e)`, 6..15 `R(e, f)` at `6 + 3e + f`.
    pub fn new() -> Self {
        let atom_a = [0, 1, 2].map(Ext::from_bit);
        let atom_b = [3, 4, 5].map(Ext::from_bit);
        let edge = [0, 1, 2].map(|e| [0, 1, 2].map(|f| Ext::from_bit(6 + 3 * e + f)));
        Domain3Oracle { atom_a, atom_b, edge }
    }

    fn eval(&self, c: &Concept) -> [Ext; 3] {
        match c {
            Concept::Top => [(); 3].map(|_| Ext::filled(true)),
            Concept::Bottom => [(); 3].map(|_| Ext::filled(false)),
            Concept::Atomic(a) => match a.as_str() {
                "A" => self.atom_a.clone(),
                "B" => self.atom_b.clone(),
                other => panic!("Domain3Oracle only knows atoms A and B, got {other}"),
            },
            Concept::Not(inner) => {
                let mut e = self.eval(inner);
                e.iter_mut().for_each(Ext::not_assign);
                e
            }
            Concept::And(ops) => {
                let mut acc = self.eval(&ops[0]);
                for o in &ops[1..] {
                    let e = self.eval(o);
                    acc.iter_mut().zip(&e).for_each(|(a, b)| a.and_assign(b));
                }
                acc
            }
            Concept::Or(ops) => {
                let mut acc = self.eval(&ops[0]);
                for o in &ops[1..] {
                    let e = self.eval(o);
                    acc.iter_mut().zip(&e).for_each(|(a, b)| a.or_assign(b));
                }
                acc
            }
            Concept::Exists(r, f) => {
                assert_eq!(r.as_str(), "R");
                let fe = self.eval(f);
                [0, 1, 2].map(|e| {
                    let mut acc = Ext::filled(false);
                    for (edge, fill) in self.edge[e].iter().zip(&fe) {
                        for ((a, r), f) in acc.0.iter_mut().zip(edge.0.iter()).zip(fill.0.iter()) {
                            *a |= r & f;
                        }
                    }
                    acc
                })
            }
            Concept::ForAll(r, f) => {
                assert_eq!(r.as_str(), "R");
                let fe = self.eval(f);
                [0, 1, 2].map(|e| {
                    let mut acc = Ext::filled(true);
                    for (edge, fill) in self.edge[e].iter().zip(&fe) {
                        for ((a, r), f) in acc.0.iter_mut().zip(edge.0.iter()).zip(fill.0.iter()) {
                            *a &= !r | f;
                        }
                    }
                    acc
                })
            }
            Concept::AtLeast(..) | Concept::AtMost(..) | Concept::Nominal(_) => {
                panic!("Domain3Oracle covers ALC only")
            }
        }
    }

    /// True iff some interpretation over at most three elements makes `c`
    /// non-empty.
    pub fn satisfiable(&self, c: &Concept) -> bool {
        let [mut x, y, z] = self.eval(c);
        x.or_assign(&y);
        x.or_assign(&z);
        x.any()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn basic_verdicts() {
        assert!(has_model(&a("A"), &Concept::Top, 1));
        assert!(!has_model(&Concept::And(vec![a("A"), a("A").negate()]), &Concept::Top, 3));
        let c = Concept::And(vec![Concept::exists("R", a("A")), Concept::forall("R", a("A").negate())]);
        assert!(!has_model(&c, &Concept::Top, 3));
        let female = Concept::And(vec![
            a("Female"),
            Concept::at_least(2, "hasChild", Concept::Top),
            Concept::forall("hasChild", a("Female")),
        ]);
        assert!(has_model(&female, &Concept::Top, 3));
        assert!(!has_model(&female, &Concept::Top, 1));
    }

    #[test]
    fn tbox_must_hold_everywhere() {
        let tbox = Concept::Or(vec![a("A").negate(), Concept::exists("R", a("A"))]);
        assert!(has_model(&a("A"), &tbox, 1));
        let tbox = Concept::Or(vec![a("A").negate(), Concept::Bottom]);
        assert!(!has_model(&a("A"), &tbox, 3));
    }

    #[test]
    fn domain3_agrees_with_direct_enumeration() {
        let o = Domain3Oracle::new();
        let cs = [
            a("A"),
            Concept::And(vec![a("A"), a("A").negate()]),
            Concept::And(vec![Concept::exists("R", a("A")), Concept::forall("R", a("B").negate())]),
            Concept::And(vec![Concept::exists("R", a("A")), Concept::forall("R", a("A").negate())]),
            Concept::Or(vec![Concept::Bottom, Concept::exists("R", Concept::exists("R", a("B")))]),
            Concept::forall("R", Concept::Bottom),
        ];
        for c in cs {
            assert_eq!(o.satisfiable(&c), has_model(&c, &Concept::Top, 3), "{c}");
        }
    }
}
