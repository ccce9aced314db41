//! ToDo-list tableau for ALCQ with internalized GCIs.
//!
//! Concepts are interned into a [`ConceptPool`]; a [`CompletionGraph`] holds
//! the labels, one FIFO queue per priority level and the undo trail. The
//! [`Reasoner`] owns a pool built from a knowledge base and runs individual
//! satisfiability tests under a given [`OrderConfig`].

mod config;
mod graph;
mod pool;

use std::time::{Duration, Instant};

use serde::Serialize;

pub use config::{ConfigError, OrderConfig, Rule, JFACT_DEFAULT, STUDIED_ORDERS};
pub use graph::{Clash, CompletionGraph, ExpansionStats, NodeId, TodoEntry};
pub use pool::{Cid, ConceptPool, PoolNode, RoleId};

use crate::kb::{Concept, KbError, KnowledgeBase};

/// Default per-task budget for desk-scale corpora.
pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;
/// Budget for large real-world corpora.
pub const CORPUS_TIMEOUT_MS: u64 = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Sat,
    Unsat,
    Timeout,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SatResult {
    pub verdict: Verdict,
    pub stats: ExpansionStats,
}

/// Wall-clock budget shared by one or more tests.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn after_ms(ms: u64) -> Self {
        Deadline(Instant::now().checked_add(Duration::from_millis(ms)))
    }

    pub fn never() -> Self {
        Deadline(None)
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// How many rule applications pass between clock reads.
const CLOCK_STRIDE: u64 = 64;

pub struct Reasoner {
    pool: ConceptPool,
    meta: Cid,
    check_restores: bool,
}

impl Reasoner {
    pub fn new(kb: &KnowledgeBase) -> Result<Reasoner, KbError> {
        let meta = kb.internalize_tbox()?;
        let mut pool = ConceptPool::new();
        let meta = pool.intern(&meta);
        Ok(Reasoner { pool, meta, check_restores: false })
    }

    /// Verify after every backtrack that the graph matches its branch-point
    /// snapshot; mismatches are counted in the stats.
    pub fn set_check_restores(&mut self, on: bool) {
        self.check_restores = on;
    }

    pub fn pool(&self) -> &ConceptPool {
        &self.pool
    }

    pub fn intern(&mut self, c: &Concept) -> Cid {
        self.pool.intern(c)
    }

    pub fn check(&mut self, c: &Concept, config: &OrderConfig, deadline: Deadline) -> SatResult {
        let id = self.pool.intern(c);
        self.check_id(id, config, deadline)
    }

    pub fn check_id(&self, c: Cid, config: &OrderConfig, deadline: Deadline) -> SatResult {
        let start = Instant::now();
        let mut g = CompletionGraph::new(&self.pool, config, Some(self.meta));
        g.set_check_restores(self.check_restores);
        let verdict = run(&mut g, c, deadline);
        let mut stats = std::mem::take(&mut g.stats);
        stats.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
        SatResult { verdict, stats }
    }
}

fn run(g: &mut CompletionGraph<'_>, c: Cid, deadline: Deadline) -> Verdict {
    let seeded = g.new_node(None).and_then(|root| g.add_concept(root, c));
    if seeded.is_err() && !g.backtrack() {
        return Verdict::Unsat;
    }
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps % CLOCK_STRIDE == 0 && deadline.expired() {
            return Verdict::Timeout;
        }
        let Some(entry) = g.pop_next() else {
            if g.unpark() {
                continue;
            }
            return Verdict::Sat;
        };
        if g.apply_rule(&entry).is_err() && !g.backtrack() {
            return Verdict::Unsat;
        }
    }
}

/// One-shot satisfiability of `c` with respect to the TBox of `kb`.
pub fn check_satisfiability(
    kb: &KnowledgeBase,
    c: &Concept,
    config: &OrderConfig,
    timeout_ms: u64,
) -> Result<SatResult, KbError> {
    let mut r = Reasoner::new(kb)?;
    Ok(r.check(c, config, Deadline::after_ms(timeout_ms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Axiom;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    fn verdict(kb: &KnowledgeBase, c: &Concept) -> Verdict {
        let mut r = Reasoner::new(kb).unwrap();
        r.set_check_restores(true);
        let mut out = None;
        for cfg in OrderConfig::studied() {
            let res = r.check(c, &cfg, Deadline::after_ms(5_000));
            assert_eq!(res.stats.restore_mismatches, 0);
            if let Some(v) = out {
                assert_eq!(v, res.verdict, "config {cfg} disagrees on {c}");
            }
            out = Some(res.verdict);
        }
        out.unwrap()
    }

    fn empty() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    #[test]
    fn immediate_and_propagated_clashes() {
        assert_eq!(verdict(&empty(), &Concept::and(vec![a("A"), a("A").negate()])), Verdict::Unsat);
        let c = Concept::and(vec![Concept::exists("R", a("A")), Concept::forall("R", a("A").negate())]);
        assert_eq!(verdict(&empty(), &c), Verdict::Unsat);
        assert_eq!(verdict(&empty(), &Concept::Bottom), Verdict::Unsat);
        assert_eq!(verdict(&empty(), &Concept::Top), Verdict::Sat);
    }

    #[test]
    fn disjunction_needs_backtracking() {
        let c = Concept::and(vec![Concept::or(vec![a("A"), a("B")]), a("A").negate()]);
        assert_eq!(verdict(&empty(), &c), Verdict::Sat);
        let c = Concept::and(vec![Concept::or(vec![a("A"), a("B")]), a("A").negate(), a("B").negate()]);
        assert_eq!(verdict(&empty(), &c), Verdict::Unsat);
    }

    #[test]
    fn female_with_two_children() {
        let c = Concept::and(vec![
            a("Female"),
            Concept::at_least(2, "hasChild", Concept::Top),
            Concept::forall("hasChild", a("Female")),
        ]);
        assert_eq!(verdict(&empty(), &c), Verdict::Sat);
    }

    #[test]
    fn at_most_merges_and_clashes() {
        // two R-successors forced into one, with incompatible fillers
        let c = Concept::and(vec![
            Concept::at_most(1, "R", Concept::Top),
            Concept::exists("R", a("A")),
            Concept::exists("R", a("B")),
            Concept::forall("R", Concept::or(vec![a("A").negate(), a("B").negate()])),
        ]);
        assert_eq!(verdict(&empty(), &c), Verdict::Unsat);
        let c = Concept::and(vec![
            Concept::at_most(1, "R", Concept::Top),
            Concept::exists("R", a("A")),
            Concept::exists("R", a("B")),
        ]);
        assert_eq!(verdict(&empty(), &c), Verdict::Sat);
        let c = Concept::and(vec![Concept::at_least(3, "R", a("A")), Concept::at_most(2, "R", a("A"))]);
        assert_eq!(verdict(&empty(), &c), Verdict::Unsat);
        let c = Concept::and(vec![Concept::at_least(2, "R", a("A")), Concept::at_most(0, "R", a("B"))]);
        assert_eq!(verdict(&empty(), &c), Verdict::Sat);
    }

    #[test]
    fn choose_rule_catches_qualified_bounds() {
        // ≥2 R.⊤ ⊓ ≤1 R.A ⊓ ≤1 R.¬A is satisfiable; ≥3 R.⊤ with the same bounds is not
        let bounds = |n| {
            Concept::and(vec![
                Concept::at_least(n, "R", Concept::Top),
                Concept::at_most(1, "R", a("A")),
                Concept::at_most(1, "R", a("A").negate()),
            ])
        };
        assert_eq!(verdict(&empty(), &bounds(2)), Verdict::Sat);
        assert_eq!(verdict(&empty(), &bounds(3)), Verdict::Unsat);
    }

    #[test]
    fn cyclic_tbox_terminates() {
        let kb = KnowledgeBase::from_axioms(&[Axiom::SubClassOf(a("A"), Concept::exists("R", a("A")))]);
        assert_eq!(verdict(&kb, &a("A")), Verdict::Sat);
        let kb = KnowledgeBase::from_axioms(&[
            Axiom::SubClassOf(a("A"), Concept::exists("R", a("A"))),
            Axiom::SubClassOf(a("A"), Concept::at_most(1, "R", Concept::Top)),
        ]);
        assert_eq!(verdict(&kb, &a("A")), Verdict::Sat);
    }

    #[test]
    fn tbox_bottom() {
        let kb = KnowledgeBase::from_axioms(&[Axiom::SubClassOf(a("A"), Concept::Bottom)]);
        assert_eq!(verdict(&kb, &a("A")), Verdict::Unsat);
        assert_eq!(verdict(&kb, &a("B")), Verdict::Sat);
    }

    #[test]
    fn zero_timeout_reports_timeout_or_finishes() {
        let mut ops = Vec::new();
        for i in 0..30 {
            ops.push(Concept::or(vec![a(&format!("A{i}")), a(&format!("B{i}"))]));
        }
        ops.push(Concept::exists("R", a("D")));
        ops.push(Concept::forall("R", a("D").negate()));
        let c = Concept::and(ops);
        let r = check_satisfiability(&empty(), &c, &OrderConfig::parse("012312").unwrap(), 0).unwrap();
        assert_eq!(r.verdict, Verdict::Timeout);
    }
}
