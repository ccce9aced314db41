//! Inference services reduced to concept satisfiability.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::kb::{Concept, KbError, KnowledgeBase, Name};
use crate::tableau::{Cid, Deadline, ExpansionStats, OrderConfig, Reasoner, Verdict};

pub const THING: &str = "owl:Thing";
pub const NOTHING: &str = "owl:Nothing";

/// Outcome of a yes/no question answered through an unsatisfiability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Answer {
    Yes,
    No,
    Timeout,
}

impl Answer {
    fn from_unsat(v: Verdict) -> Answer {
        match v {
            Verdict::Unsat => Answer::Yes,
            Verdict::Sat => Answer::No,
            Verdict::Timeout => Answer::Timeout,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Answer::Yes => Some(true),
            Answer::No => Some(false),
            Answer::Timeout => None,
        }
    }
}

fn unsat(kb: &KnowledgeBase, c: &Concept, cfg: &OrderConfig, timeout_ms: u64) -> Result<Answer, KbError> {
    Ok(Answer::from_unsat(is_satisfiable(kb, c, cfg, timeout_ms)?))
}

pub fn is_satisfiable(kb: &KnowledgeBase, c: &Concept, cfg: &OrderConfig, timeout_ms: u64) -> Result<Verdict, KbError> {
    let mut r = Reasoner::new(kb)?;
    Ok(r.check(c, cfg, Deadline::after_ms(timeout_ms)).verdict)
}

/// Does `c ⊑ d` follow from the TBox?
pub fn subsumes(
    kb: &KnowledgeBase,
    d: &Concept,
    c: &Concept,
    cfg: &OrderConfig,
    timeout_ms: u64,
) -> Result<Answer, KbError> {
    unsat(kb, &Concept::and(vec![c.clone(), d.negate()]), cfg, timeout_ms)
}

pub fn equivalent(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    cfg: &OrderConfig,
    timeout_ms: u64,
) -> Result<Answer, KbError> {
    let either = Concept::or(vec![
        Concept::and(vec![c.clone(), d.negate()]),
        Concept::and(vec![d.clone(), c.negate()]),
    ]);
    unsat(kb, &either, cfg, timeout_ms)
}

pub fn disjoint(
    kb: &KnowledgeBase,
    c: &Concept,
    d: &Concept,
    cfg: &OrderConfig,
    timeout_ms: u64,
) -> Result<Answer, KbError> {
    unsat(kb, &Concept::and(vec![c.clone(), d.clone()]), cfg, timeout_ms)
}

/// Checks only that the internalized TBox admits some element; ABox
/// assertions are not taken into account.
pub fn tbox_consistent(kb: &KnowledgeBase, cfg: &OrderConfig, timeout_ms: u64) -> Result<Verdict, KbError> {
    is_satisfiable(kb, &Concept::Top, cfg, timeout_ms)
}

/// Direct-subsumption DAG over equivalence buckets of named classes.
///
/// Every bucket is identified by its representative, the smallest member
/// name; the buckets equivalent to `⊤` and `⊥` are represented by
/// `owl:Thing` and `owl:Nothing`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Hierarchy {
    /// Sorted members of each bucket, keyed by representative.
    pub buckets: Vec<(Name, Vec<Name>)>,
    /// `(sub, super)` pairs of representatives, transitively reduced.
    pub direct: BTreeSet<(Name, Name)>,
}

impl Hierarchy {
    /// `sub Sub Super` for direct edges, then `eq Rep Member` for every
    /// non-representative bucket member.
    pub fn to_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.direct.iter().map(|(a, b)| format!("sub {a} {b}")).collect();
        for (rep, members) in &self.buckets {
            for m in members {
                if m != rep {
                    out.push(format!("eq {rep} {m}"));
                }
            }
        }
        out
    }

    pub fn parents_of(&self, rep: &str) -> Vec<&str> {
        self.direct.iter().filter(|(a, _)| a == rep).map(|(_, b)| b.as_str()).collect()
    }

    pub fn bucket_of(&self, class: &str) -> Option<&str> {
        self.buckets.iter().find(|(_, ms)| ms.iter().any(|m| m == class)).map(|(r, _)| r.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResult {
    /// `None` when the budget ran out.
    pub hierarchy: Option<Hierarchy>,
    pub elapsed_ms: f64,
    pub tests: u64,
    pub stats: ExpansionStats,
}

impl ClassifyResult {
    pub fn timed_out(&self) -> bool {
        self.hierarchy.is_none()
    }
}

struct Classifier<'a> {
    reasoner: Reasoner,
    cfg: &'a OrderConfig,
    deadline: Deadline,
    tests: u64,
    stats: ExpansionStats,
}

struct TimedOut;

impl Classifier<'_> {
    fn unsat(&mut self, c: Cid) -> Result<bool, TimedOut> {
        if self.deadline.expired() {
            return Err(TimedOut);
        }
        self.tests += 1;
        let res = self.reasoner.check_id(c, self.cfg, self.deadline);
        self.stats.absorb(&res.stats);
        match res.verdict {
            Verdict::Unsat => Ok(true),
            Verdict::Sat => Ok(false),
            Verdict::Timeout => Err(TimedOut),
        }
    }
}

/// Pairwise subsumption over all named classes, with the budget covering the
/// whole task.
pub fn classify_hierarchy(kb: &KnowledgeBase, cfg: &OrderConfig, timeout_ms: u64) -> Result<ClassifyResult, KbError> {
    let start = Instant::now();
    let deadline = Deadline::after_ms(timeout_ms);
    let mut reasoner = Reasoner::new(kb)?;
    let classes: Vec<Name> = kb.signature.classes.iter().cloned().collect();
    let n = classes.len();
    // intern up front so the tests below only read the pool
    let pos: Vec<Cid> = classes.iter().map(|c| reasoner.intern(&Concept::atomic(c.as_str()))).collect();
    let neg: Vec<Cid> = classes.iter().map(|c| reasoner.intern(&Concept::atomic(c.as_str()).negate())).collect();
    let mut pair = vec![0 as Cid; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pair[i * n + j] = reasoner.intern(&Concept::and(vec![
                    Concept::atomic(classes[i].as_str()),
                    Concept::atomic(classes[j].as_str()).negate(),
                ]));
            }
        }
    }
    let mut cl = Classifier { reasoner, cfg, deadline, tests: 0, stats: ExpansionStats::default() };
    let hierarchy = build(&mut cl, &classes, &pos, &neg, &pair).ok();
    Ok(ClassifyResult {
        hierarchy,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
        tests: cl.tests,
        stats: cl.stats,
    })
}

fn build(cl: &mut Classifier<'_>, classes: &[Name], pos: &[Cid], neg: &[Cid], pair: &[Cid]) -> Result<Hierarchy, TimedOut> {
    let n = classes.len();
    let mut unsat = vec![false; n];
    let mut top = vec![false; n];
    for i in 0..n {
        unsat[i] = cl.unsat(pos[i])?;
        if !unsat[i] {
            top[i] = cl.unsat(neg[i])?;
        }
    }
    // sub[i][j]: class i ⊑ class j, among satisfiable non-⊤ classes
    let live: Vec<usize> = (0..n).filter(|&i| !unsat[i] && !top[i]).collect();
    let mut sub = vec![false; n * n];
    for &i in &live {
        for &j in &live {
            if i != j {
                sub[i * n + j] = cl.unsat(pair[i * n + j])?;
            }
        }
    }

    let mut h = Hierarchy::default();
    let bottom: Vec<Name> = (0..n).filter(|&i| unsat[i]).map(|i| classes[i].clone()).collect();
    let thing: Vec<Name> = (0..n).filter(|&i| top[i]).map(|i| classes[i].clone()).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut bucket_of = vec![usize::MAX; n];
    for &i in &live {
        if bucket_of[i] != usize::MAX {
            continue;
        }
        let b = reps.len();
        reps.push(i);
        for &j in &live {
            if j == i || (sub[i * n + j] && sub[j * n + i]) {
                bucket_of[j] = b;
            }
        }
    }
    let rep_name = |b: usize| classes[reps[b]].clone();
    let above = |a: usize, b: usize| sub[reps[a] * n + reps[b]];
    for a in 0..reps.len() {
        let mut has_parent = false;
        for b in 0..reps.len() {
            if a == b || !above(a, b) {
                continue;
            }
            let skipped = (0..reps.len()).any(|m| m != a && m != b && above(a, m) && above(m, b));
            if !skipped {
                h.direct.insert((rep_name(a), rep_name(b)));
                has_parent = true;
            }
        }
        if !has_parent {
            h.direct.insert((rep_name(a), THING.to_string()));
        }
    }
    if !thing.is_empty() {
        let mut members = vec![THING.to_string()];
        members.extend(thing);
        h.buckets.push((THING.to_string(), members));
    }
    if !bottom.is_empty() {
        let mut members = vec![NOTHING.to_string()];
        members.extend(bottom);
        h.buckets.push((NOTHING.to_string(), members));
    }
    for b in 0..reps.len() {
        let members: Vec<Name> = live.iter().filter(|&&i| bucket_of[i] == b).map(|&i| classes[i].clone()).collect();
        h.buckets.push((rep_name(b), members));
    }
    h.buckets.sort();
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_document;

    fn cfg() -> OrderConfig {
        OrderConfig::parse("012312").unwrap()
    }

    fn kb(text: &str) -> KnowledgeBase {
        parse_document(text).unwrap().knowledge_base()
    }

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn satisfiability_examples() {
        let empty = KnowledgeBase::default();
        assert_eq!(is_satisfiable(&empty, &Concept::Bottom, &cfg(), 1000).unwrap(), Verdict::Unsat);
        assert_eq!(is_satisfiable(&kb("SubClassOf(A owl:Nothing)"), &a("A"), &cfg(), 1000).unwrap(), Verdict::Unsat);
        let cyclic = kb("SubClassOf(A ObjectSomeValuesFrom(R A))");
        assert_eq!(is_satisfiable(&cyclic, &a("A"), &cfg(), 1000).unwrap(), Verdict::Sat);
    }

    #[test]
    fn subsumption_examples() {
        let empty = KnowledgeBase::default();
        let ab = Concept::and(vec![a("A"), a("B")]);
        assert_eq!(subsumes(&empty, &a("A"), &ab, &cfg(), 1000).unwrap(), Answer::Yes);
        assert_eq!(subsumes(&empty, &a("B"), &a("A"), &cfg(), 1000).unwrap(), Answer::No);
        let female = Concept::and(vec![
            a("Female"),
            Concept::at_least(2, "hasChild", Concept::Top),
            Concept::forall("hasChild", a("Female")),
        ]);
        assert_eq!(subsumes(&empty, &a("Female"), &female, &cfg(), 1000).unwrap(), Answer::Yes);
    }

    #[test]
    fn equivalence_and_disjointness() {
        let empty = KnowledgeBase::default();
        let c = Concept::exists("R", a("A"));
        assert_eq!(equivalent(&empty, &c, &c, &cfg(), 1000).unwrap(), Answer::Yes);
        let lhs = Concept::Not(Box::new(Concept::and(vec![a("A"), a("B")])));
        let rhs = Concept::or(vec![a("A").negate(), a("B").negate()]);
        assert_eq!(equivalent(&empty, &lhs, &rhs, &cfg(), 1000).unwrap(), Answer::Yes);
        assert_eq!(equivalent(&empty, &a("A"), &a("B"), &cfg(), 1000).unwrap(), Answer::No);
        assert_eq!(disjoint(&empty, &a("A"), &a("A").negate(), &cfg(), 1000).unwrap(), Answer::Yes);
        assert_eq!(disjoint(&empty, &a("A"), &a("A"), &cfg(), 1000).unwrap(), Answer::No);
        let d = Concept::and(vec![Concept::forall("R", a("A").negate()), Concept::exists("R", Concept::Top)]);
        assert_eq!(disjoint(&empty, &c, &d, &cfg(), 1000).unwrap(), Answer::Yes);
    }

    #[test]
    fn chain_hierarchy() {
        let h = classify_hierarchy(&kb("SubClassOf(Mother Woman)\nSubClassOf(Woman Person)"), &cfg(), 5000)
            .unwrap()
            .hierarchy
            .unwrap();
        assert_eq!(h.to_lines(), vec!["sub Mother Woman", "sub Person owl:Thing", "sub Woman Person"]);
    }

    #[test]
    fn flat_and_equivalent_hierarchies() {
        let h = classify_hierarchy(&kb("Declaration(Class(A))\nDeclaration(Class(B))"), &cfg(), 5000)
            .unwrap()
            .hierarchy
            .unwrap();
        assert_eq!(h.parents_of("A"), vec![THING]);
        assert_eq!(h.parents_of("B"), vec![THING]);
        let h = classify_hierarchy(&kb("EquivalentClasses(A B)"), &cfg(), 5000).unwrap().hierarchy.unwrap();
        assert_eq!(h.bucket_of("B"), Some("A"));
        assert_eq!(h.to_lines(), vec!["sub A owl:Thing", "eq A B"]);
    }

    #[test]
    fn top_and_bottom_buckets() {
        let h = classify_hierarchy(
            &kb("SubClassOf(A owl:Nothing)\nSubClassOf(owl:Thing T)\nDeclaration(Class(C))"),
            &cfg(),
            5000,
        )
        .unwrap()
        .hierarchy
        .unwrap();
        assert_eq!(h.bucket_of("A"), Some(NOTHING));
        assert_eq!(h.bucket_of("T"), Some(THING));
        assert_eq!(h.parents_of("C"), vec![THING]);
    }

    #[test]
    fn transitive_reduction_with_diamond() {
        let h = classify_hierarchy(
            &kb("SubClassOf(D B)\nSubClassOf(D C)\nSubClassOf(B A)\nSubClassOf(C A)"),
            &cfg(),
            5000,
        )
        .unwrap()
        .hierarchy
        .unwrap();
        assert_eq!(h.parents_of("D"), vec!["B", "C"]);
        assert_eq!(h.parents_of("B"), vec!["A"]);
        assert_eq!(h.parents_of("A"), vec![THING]);
    }
}
