//! Completion graph, ToDo queues and the undo trail.
//!
//! Every mutation made while a branch point is open is logged on the trail so
//! that backtracking can unwind it in reverse order. With no open branch point
//! nothing is logged: a clash at that stage is final.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::config::{OrderConfig, Rule};
use super::pool::{Cid, ConceptPool, PoolNode, RoleId, TOP};

pub type NodeId = u32;

/// A label addition waiting for its rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TodoEntry {
    pub node: NodeId,
    pub concept: Cid,
    pub rule: Rule,
    pub seq: u64,
}

/// Marker for a clash; the graph state tells where it happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clash;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExpansionStats {
    /// Indexed in `IAOEFLG` order.
    pub rule_applications: [u64; 7],
    pub nodes_created: u64,
    pub merges: u64,
    pub backtracks: u64,
    pub branch_points: u64,
    pub blocked_deferrals: u64,
    pub elapsed_ms: f64,
    /// Backtracks whose restored state differed from the branch-point snapshot
    /// (only counted when snapshot checking is enabled).
    pub restore_mismatches: u64,
}

impl ExpansionStats {
    pub const CSV_HEADER: &'static str = "rule_id,rule_and,rule_or,rule_exists,rule_forall,rule_atmost,rule_atleast,nodes_created,merges,backtracks,branch_points,blocked_deferrals,elapsed_ms";

    pub fn csv_row(&self) -> String {
        let mut cells: Vec<String> = self.rule_applications.iter().map(u64::to_string).collect();
        cells.extend(
            [self.nodes_created, self.merges, self.backtracks, self.branch_points, self.blocked_deferrals]
                .iter()
                .map(u64::to_string),
        );
        cells.push(format!("{:.3}", self.elapsed_ms));
        cells.join(",")
    }

    pub fn total_applications(&self) -> u64 {
        self.rule_applications.iter().sum()
    }

    pub fn absorb(&mut self, other: &ExpansionStats) {
        for (a, b) in self.rule_applications.iter_mut().zip(other.rule_applications) {
            *a += b;
        }
        self.nodes_created += other.nodes_created;
        self.merges += other.merges;
        self.backtracks += other.backtracks;
        self.branch_points += other.branch_points;
        self.blocked_deferrals += other.blocked_deferrals;
        self.elapsed_ms += other.elapsed_ms;
        self.restore_mismatches += other.restore_mismatches;
    }
}

#[derive(Debug, Clone, Hash)]
struct Edge {
    to: NodeId,
    roles: Vec<RoleId>,
}

#[derive(Debug, Clone)]
struct Node {
    label: Vec<Cid>,
    set: FxHashSet<Cid>,
    parent: Option<NodeId>,
    edges: Vec<Edge>,
    distinct: Vec<NodeId>,
    alive: bool,
}

#[derive(Debug, Default)]
struct Queue {
    items: Vec<TodoEntry>,
    head: usize,
}

#[derive(Debug, Clone)]
enum Choice {
    Add(NodeId, Cid),
    /// `from` is merged into `into`; both are successors of `parent`.
    Merge { parent: NodeId, into: NodeId, from: NodeId },
}

#[derive(Debug)]
struct BranchPoint {
    mark: usize,
    alternatives: Vec<Choice>,
    next: usize,
    requeue: Option<(NodeId, Cid)>,
    snapshot: Option<u64>,
}

#[derive(Debug)]
enum Undo {
    NodeCreated,
    LabelAdded(NodeId),
    EdgeAdded(NodeId),
    EdgeRoleAdded(NodeId, usize),
    Distinct(NodeId, NodeId),
    Killed(NodeId),
    Pushed(usize),
    Popped(usize),
    Parked,
    ParkedReplaced(Vec<(NodeId, Cid)>),
}

pub struct CompletionGraph<'p> {
    pool: &'p ConceptPool,
    levels: [usize; 7],
    meta: Option<Cid>,
    equality_blocking: bool,
    nodes: Vec<Node>,
    queues: Vec<Queue>,
    pending: FxHashSet<(NodeId, Cid)>,
    seq: u64,
    parked: Vec<(NodeId, Cid)>,
    trail: Vec<Undo>,
    branches: Vec<BranchPoint>,
    check_restores: bool,
    pub stats: ExpansionStats,
}

impl<'p> CompletionGraph<'p> {
    /// `meta` is added to every node; equality blocking is used whenever the
    /// pool contains counting restrictions.
    pub fn new(pool: &'p ConceptPool, config: &OrderConfig, meta: Option<Cid>) -> Self {
        let mut levels = [0usize; 7];
        for r in Rule::ALL {
            levels[r.index()] = config.priority(r) as usize;
        }
        CompletionGraph {
            pool,
            levels,
            meta: meta.filter(|&m| m != TOP),
            equality_blocking: pool.has_counting(),
            nodes: Vec::new(),
            queues: (0..7).map(|_| Queue::default()).collect(),
            pending: FxHashSet::default(),
            seq: 0,
            parked: Vec::new(),
            trail: Vec::new(),
            branches: Vec::new(),
            check_restores: false,
            stats: ExpansionStats::default(),
        }
    }

    /// Hash the whole graph at every branch point and compare after undo.
    pub fn set_check_restores(&mut self, on: bool) {
        self.check_restores = on;
    }

    fn record(&mut self, u: Undo) {
        if !self.branches.is_empty() {
            self.trail.push(u);
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_alive(&self, x: NodeId) -> bool {
        self.nodes[x as usize].alive
    }

    pub fn label(&self, x: NodeId) -> &[Cid] {
        &self.nodes[x as usize].label
    }

    pub fn has(&self, x: NodeId, c: Cid) -> bool {
        self.nodes[x as usize].set.contains(&c)
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.nodes[x as usize].parent
    }

    pub fn branch_depth(&self) -> usize {
        self.branches.len()
    }

    /// New node labelled with the meta-constraint.
    pub fn new_node(&mut self, parent: Option<NodeId>) -> Result<NodeId, Clash> {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            label: Vec::new(),
            set: FxHashSet::default(),
            parent,
            edges: Vec::new(),
            distinct: Vec::new(),
            alive: true,
        });
        self.stats.nodes_created += 1;
        self.record(Undo::NodeCreated);
        if let Some(m) = self.meta {
            self.add_concept(id, m)?;
        }
        Ok(id)
    }

    /// Adds `c` to `L(x)` and schedules it. Returns `Err` if the addition
    /// produces an immediate clash.
    pub fn add_concept(&mut self, x: NodeId, c: Cid) -> Result<(), Clash> {
        let node = &mut self.nodes[x as usize];
        if !node.set.insert(c) {
            return Ok(());
        }
        node.label.push(c);
        self.record(Undo::LabelAdded(x));
        self.enqueue(x, c);
        match self.pool.node(c) {
            PoolNode::Bottom => Err(Clash),
            PoolNode::Atom(_) | PoolNode::NotAtom(_) => {
                let neg = self.pool.complement(c).expect("atoms are interned with both polarities");
                if self.has(x, neg) {
                    Err(Clash)
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Appends `(x, c)` to the queue of its rule's level unless already waiting.
    pub fn enqueue(&mut self, x: NodeId, c: Cid) {
        if !self.pending.insert((x, c)) {
            return;
        }
        let rule = self.pool.rule(c);
        let level = self.levels[rule.index()];
        self.seq += 1;
        self.queues[level].items.push(TodoEntry { node: x, concept: c, rule, seq: self.seq });
        self.record(Undo::Pushed(level));
    }

    /// Oldest entry of the highest-priority non-empty queue.
    pub fn pop_next(&mut self) -> Option<TodoEntry> {
        for level in 0..self.queues.len() {
            let q = &mut self.queues[level];
            if q.head < q.items.len() {
                let e = q.items[q.head];
                q.head += 1;
                if self.branches.is_empty() && q.head >= 1024 && q.head * 2 >= q.items.len() {
                    q.items.drain(..q.head);
                    q.head = 0;
                }
                self.pending.remove(&(e.node, e.concept));
                self.record(Undo::Popped(level));
                return Some(e);
            }
        }
        None
    }

    /// Number of entries waiting in the queues.
    pub fn queued(&self) -> usize {
        self.queues.iter().map(|q| q.items.len() - q.head).sum()
    }

    /// Every waiting entry is unique, matches the pending set, refers to a
    /// concept present in its node's label, and sits on the right level.
    pub fn queues_consistent(&self) -> bool {
        let mut seen = FxHashSet::default();
        for (level, q) in self.queues.iter().enumerate() {
            for e in &q.items[q.head..] {
                if !seen.insert((e.node, e.concept))
                    || !self.has(e.node, e.concept)
                    || self.levels[e.rule.index()] != level
                    || self.pool.rule(e.concept) != e.rule
                {
                    return false;
                }
            }
        }
        seen == self.pending
    }

    fn successors(&self, x: NodeId, r: RoleId) -> Vec<NodeId> {
        self.nodes[x as usize]
            .edges
            .iter()
            .filter(|e| self.nodes[e.to as usize].alive && e.roles.contains(&r))
            .map(|e| e.to)
            .collect()
    }

    fn add_edge_role(&mut self, x: NodeId, y: NodeId, r: RoleId) {
        let node = &mut self.nodes[x as usize];
        match node.edges.iter().position(|e| e.to == y) {
            Some(i) => {
                if node.edges[i].roles.contains(&r) {
                    return;
                }
                node.edges[i].roles.push(r);
                self.record(Undo::EdgeRoleAdded(x, i));
            }
            None => {
                node.edges.push(Edge { to: y, roles: vec![r] });
                self.record(Undo::EdgeAdded(x));
            }
        }
        // ∀ and ≤ restrictions on x must see the new neighbour
        let refire: Vec<Cid> = self.nodes[x as usize]
            .label
            .iter()
            .copied()
            .filter(|&c| match self.pool.node(c) {
                PoolNode::ForAll(s, _) | PoolNode::AtMost(_, s, _) => *s == r,
                _ => false,
            })
            .collect();
        for c in refire {
            self.enqueue(x, c);
        }
    }

    fn are_distinct(&self, a: NodeId, b: NodeId) -> bool {
        self.nodes[a as usize].distinct.contains(&b)
    }

    fn add_distinct(&mut self, a: NodeId, b: NodeId) {
        if a == b || self.are_distinct(a, b) {
            return;
        }
        self.nodes[a as usize].distinct.push(b);
        self.nodes[b as usize].distinct.push(a);
        self.record(Undo::Distinct(a, b));
    }

    /// Blocked if some node on the path from the root to `x` (inclusive) has
    /// an ancestor whose label contains (or, with counting, equals) its own.
    pub fn is_blocked(&self, x: NodeId) -> bool {
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.nodes[cur as usize].parent {
            path.push(p);
            cur = p;
        }
        for j in 0..path.len() {
            let below = &self.nodes[path[j] as usize];
            for &anc in &path[j + 1..] {
                let above = &self.nodes[anc as usize];
                if self.equality_blocking && below.label.len() != above.label.len() {
                    continue;
                }
                if below.label.len() <= above.label.len() && below.label.iter().all(|c| above.set.contains(c)) {
                    return true;
                }
            }
        }
        false
    }

    fn park(&mut self, x: NodeId, c: Cid) {
        self.stats.blocked_deferrals += 1;
        self.parked.push((x, c));
        self.record(Undo::Parked);
    }

    /// Re-schedules parked generating entries whose node is no longer blocked.
    /// Returns whether anything was scheduled.
    pub fn unpark(&mut self) -> bool {
        if self.parked.is_empty() {
            return false;
        }
        let mut keep = Vec::new();
        let mut wake = Vec::new();
        for &(x, c) in &self.parked {
            if !self.is_alive(x) {
                continue;
            }
            if self.is_blocked(x) {
                keep.push((x, c));
            } else {
                wake.push((x, c));
            }
        }
        if wake.is_empty() && keep.len() == self.parked.len() {
            return false;
        }
        let old = std::mem::replace(&mut self.parked, keep);
        self.record(Undo::ParkedReplaced(old));
        for &(x, c) in &wake {
            self.enqueue(x, c);
        }
        !wake.is_empty()
    }

    fn fresh_successor(&mut self, x: NodeId, r: RoleId, filler: Cid) -> Result<NodeId, Clash> {
        let y = self.new_node(Some(x))?;
        self.add_edge_role(x, y, r);
        self.add_concept(y, filler)?;
        Ok(y)
    }

    /// Successors of `x` via `r` that carry `filler` (every successor for ⊤).
    fn filler_successors(&self, x: NodeId, r: RoleId, filler: Cid) -> Vec<NodeId> {
        let mut ys = self.successors(x, r);
        if filler != TOP {
            ys.retain(|&y| self.has(y, filler));
        }
        ys
    }

    fn has_distinct_clique(&self, cands: &[NodeId], n: usize) -> bool {
        fn grow(g: &CompletionGraph<'_>, cands: &[NodeId], chosen: &mut Vec<NodeId>, n: usize) -> bool {
            if chosen.len() == n {
                return true;
            }
            for (i, &c) in cands.iter().enumerate() {
                if chosen.iter().all(|&d| g.are_distinct(c, d)) {
                    chosen.push(c);
                    if grow(g, &cands[i + 1..], chosen, n) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        cands.len() >= n && grow(self, cands, &mut Vec::with_capacity(n), n)
    }

    /// Applies the rule for one popped entry.
    pub fn apply_rule(&mut self, e: &TodoEntry) -> Result<(), Clash> {
        let x = e.node;
        if !self.is_alive(x) {
            return Ok(());
        }
        self.stats.rule_applications[e.rule.index()] += 1;
        match self.pool.node(e.concept) {
            PoolNode::Top | PoolNode::Bottom | PoolNode::Atom(_) | PoolNode::NotAtom(_) => Ok(()),
            PoolNode::And(ops) => {
                for &op in ops {
                    self.add_concept(x, op)?;
                }
                Ok(())
            }
            PoolNode::Or(ops) => {
                if ops.iter().any(|&o| self.has(x, o)) {
                    return Ok(());
                }
                let alts = ops.iter().map(|&o| Choice::Add(x, o)).collect();
                self.branch(alts, None)
            }
            &PoolNode::Exists(r, f) => {
                if self.is_blocked(x) {
                    self.park(x, e.concept);
                    return Ok(());
                }
                if self.successors(x, r).iter().any(|&y| self.has(y, f)) {
                    return Ok(());
                }
                self.fresh_successor(x, r, f).map(|_| ())
            }
            &PoolNode::ForAll(r, f) => {
                for y in self.successors(x, r) {
                    self.add_concept(y, f)?;
                }
                Ok(())
            }
            &PoolNode::AtLeast(n, r, f) => {
                if self.is_blocked(x) {
                    self.park(x, e.concept);
                    return Ok(());
                }
                let cands = self.filler_successors(x, r, f);
                if self.has_distinct_clique(&cands, n as usize) {
                    return Ok(());
                }
                let mut fresh = Vec::with_capacity(n as usize);
                for _ in 0..n {
                    let y = self.fresh_successor(x, r, f)?;
                    for &z in &fresh {
                        self.add_distinct(y, z);
                    }
                    fresh.push(y);
                }
                Ok(())
            }
            &PoolNode::AtMost(n, r, f) => {
                if f != TOP {
                    // every successor must decide between the filler and its negation
                    let neg = self.pool.complement(f).expect("at-most fillers have interned negations");
                    if let Some(y) = self.successors(x, r).into_iter().find(|&y| !self.has(y, f) && !self.has(y, neg)) {
                        return self.branch(vec![Choice::Add(y, f), Choice::Add(y, neg)], Some((x, e.concept)));
                    }
                }
                let cands = self.filler_successors(x, r, f);
                if cands.len() <= n as usize {
                    return Ok(());
                }
                let mut pairs = Vec::new();
                for (i, &a) in cands.iter().enumerate() {
                    for &b in &cands[i + 1..] {
                        if !self.are_distinct(a, b) {
                            let (into, from) = if a < b { (a, b) } else { (b, a) };
                            pairs.push(Choice::Merge { parent: x, into, from });
                        }
                    }
                }
                if pairs.is_empty() {
                    return Err(Clash);
                }
                self.branch(pairs, Some((x, e.concept)))
            }
        }
    }

    fn branch(&mut self, alternatives: Vec<Choice>, requeue: Option<(NodeId, Cid)>) -> Result<(), Clash> {
        self.stats.branch_points += 1;
        if alternatives.len() == 1 {
            return self.apply_choice(alternatives[0].clone(), requeue);
        }
        let snapshot = self.check_restores.then(|| self.fingerprint());
        let first = alternatives[0].clone();
        self.branches.push(BranchPoint { mark: self.trail.len(), alternatives, next: 1, requeue, snapshot });
        self.apply_choice(first, requeue)
    }

    fn apply_choice(&mut self, choice: Choice, requeue: Option<(NodeId, Cid)>) -> Result<(), Clash> {
        match choice {
            Choice::Add(y, c) => self.add_concept(y, c)?,
            Choice::Merge { parent, into, from } => self.merge(parent, into, from)?,
        }
        if let Some((x, c)) = requeue {
            self.enqueue(x, c);
        }
        Ok(())
    }

    fn merge(&mut self, parent: NodeId, into: NodeId, from: NodeId) -> Result<(), Clash> {
        self.stats.merges += 1;
        let roles = self.nodes[parent as usize]
            .edges
            .iter()
            .find(|e| e.to == from)
            .map(|e| e.roles.clone())
            .unwrap_or_default();
        let distinct = self.nodes[from as usize].distinct.clone();
        let label = self.nodes[from as usize].label.clone();
        self.kill_subtree(from);
        for r in roles {
            self.add_edge_role(parent, into, r);
        }
        for w in distinct {
            if self.is_alive(w) {
                self.add_distinct(into, w);
            }
        }
        for c in label {
            self.add_concept(into, c)?;
        }
        Ok(())
    }

    fn kill_subtree(&mut self, root: NodeId) {
        // children are always created after their parent
        let mut dead = FxHashSet::default();
        dead.insert(root);
        self.nodes[root as usize].alive = false;
        self.record(Undo::Killed(root));
        for id in root + 1..self.nodes.len() as NodeId {
            let n = &self.nodes[id as usize];
            if n.alive && n.parent.is_some_and(|p| dead.contains(&p)) {
                dead.insert(id);
                self.nodes[id as usize].alive = false;
                self.record(Undo::Killed(id));
            }
        }
    }

    /// Resumes at the most recent branch point with an untried alternative.
    /// Returns `false` when none is left.
    pub fn backtrack(&mut self) -> bool {
        loop {
            let Some(bp) = self.branches.last() else { return false };
            self.stats.backtracks += 1;
            let mark = bp.mark;
            self.undo_to(mark);
            if let Some(expected) = self.branches.last().unwrap().snapshot {
                if self.fingerprint() != expected {
                    self.stats.restore_mismatches += 1;
                }
            }
            let bp = self.branches.last_mut().unwrap();
            let choice = bp.alternatives[bp.next].clone();
            bp.next += 1;
            let requeue = bp.requeue;
            if bp.next == bp.alternatives.len() {
                self.branches.pop();
                if self.branches.is_empty() {
                    self.trail.clear();
                }
            }
            if self.apply_choice(choice, requeue).is_ok() {
                return true;
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::NodeCreated => {
                    self.nodes.pop();
                }
                Undo::LabelAdded(x) => {
                    let n = &mut self.nodes[x as usize];
                    let c = n.label.pop().unwrap();
                    n.set.remove(&c);
                }
                Undo::EdgeAdded(x) => {
                    self.nodes[x as usize].edges.pop();
                }
                Undo::EdgeRoleAdded(x, i) => {
                    self.nodes[x as usize].edges[i].roles.pop();
                }
                Undo::Distinct(a, b) => {
                    self.nodes[a as usize].distinct.pop();
                    self.nodes[b as usize].distinct.pop();
                }
                Undo::Killed(x) => self.nodes[x as usize].alive = true,
                Undo::Pushed(level) => {
                    let e = self.queues[level].items.pop().unwrap();
                    self.pending.remove(&(e.node, e.concept));
                }
                Undo::Popped(level) => {
                    let q = &mut self.queues[level];
                    q.head -= 1;
                    let e = q.items[q.head];
                    self.pending.insert((e.node, e.concept));
                }
                Undo::Parked => {
                    self.parked.pop();
                }
                Undo::ParkedReplaced(old) => self.parked = old,
            }
        }
    }

    /// Structural hash of nodes, edges, ≠, waiting entries and parked entries.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.nodes.len().hash(&mut h);
        for n in &self.nodes {
            n.label.hash(&mut h);
            n.parent.hash(&mut h);
            n.edges.hash(&mut h);
            n.distinct.hash(&mut h);
            n.alive.hash(&mut h);
        }
        for q in &self.queues {
            for e in &q.items[q.head..] {
                (e.node, e.concept, e.seq).hash(&mut h);
            }
        }
        let mut pending: Vec<_> = self.pending.iter().copied().collect();
        pending.sort_unstable();
        pending.hash(&mut h);
        self.parked.hash(&mut h);
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Concept;

    fn atom(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn fifo_within_level_and_priority_across_levels() {
        let mut pool = ConceptPool::new();
        let and = pool.intern(&Concept::and(vec![atom("A"), atom("B")]));
        let or1 = pool.intern(&Concept::or(vec![atom("A"), atom("B")]));
        let or2 = pool.intern(&Concept::or(vec![atom("C"), atom("D")]));
        let cfg = OrderConfig::parse("012312").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        let x = g.new_node(None).unwrap();
        g.add_concept(x, or1).unwrap();
        g.add_concept(x, or2).unwrap();
        g.add_concept(x, and).unwrap();
        assert!(g.queues_consistent());
        let order: Vec<Cid> = std::iter::from_fn(|| g.pop_next()).map(|e| e.concept).collect();
        assert_eq!(order, vec![and, or1, or2]);
        assert!(g.pop_next().is_none());
    }

    #[test]
    fn or_goes_to_level_one_under_label_1() {
        let mut pool = ConceptPool::new();
        let or = pool.intern(&Concept::or(vec![atom("A"), atom("B")]));
        let cfg = OrderConfig::parse("012312").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        let x = g.new_node(None).unwrap();
        g.add_concept(x, or).unwrap();
        assert_eq!(g.queues[1].items.len(), 1);
    }

    #[test]
    fn duplicate_additions_are_ignored() {
        let mut pool = ConceptPool::new();
        let a = pool.intern(&atom("A"));
        let cfg = OrderConfig::parse("000000").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        let x = g.new_node(None).unwrap();
        g.add_concept(x, a).unwrap();
        g.add_concept(x, a).unwrap();
        assert_eq!(g.queued(), 1);
    }

    #[test]
    fn atom_clash_on_add() {
        let mut pool = ConceptPool::new();
        let a = pool.intern(&atom("A"));
        let na = pool.intern(&atom("A").negate());
        let cfg = OrderConfig::parse("000000").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        let x = g.new_node(None).unwrap();
        g.add_concept(x, a).unwrap();
        assert_eq!(g.add_concept(x, na), Err(Clash));
    }

    #[test]
    fn root_is_never_blocked() {
        let pool = ConceptPool::new();
        let cfg = OrderConfig::parse("000000").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        let x = g.new_node(None).unwrap();
        assert!(!g.is_blocked(x));
    }

    #[test]
    fn backtracking_restores_snapshot() {
        let mut pool = ConceptPool::new();
        let c = pool.intern(&Concept::and(vec![
            Concept::or(vec![atom("A"), atom("B")]),
            Concept::exists("R", atom("C")),
            atom("A").negate(),
        ]));
        let cfg = OrderConfig::parse("021321").unwrap();
        let mut g = CompletionGraph::new(&pool, &cfg, None);
        g.set_check_restores(true);
        let x = g.new_node(None).unwrap();
        g.add_concept(x, c).unwrap();
        let mut clashes = 0;
        while let Some(e) = g.pop_next() {
            if g.apply_rule(&e).is_err() {
                clashes += 1;
                assert!(g.backtrack());
            }
            assert!(g.queues_consistent());
        }
        assert_eq!(clashes, 1);
        assert_eq!(g.stats.restore_mismatches, 0);
    }
}
