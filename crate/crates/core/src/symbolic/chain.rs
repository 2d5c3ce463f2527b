//! Semi-naive forward chaining with proof traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::kb::{AtomId, KnowledgeBase};
use super::threshold::PredicateSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub clause: usize,
    pub head: AtomId,
    pub premises: Vec<AtomId>,
}

/// Ordered derivation of one atom: every step only uses facts or heads of
/// earlier steps. Facts have an empty trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub atom: AtomId,
    pub steps: Vec<ProofStep>,
}

impl ProofTrace {
    /// Re-derive the atom from `kb`'s facts using only the recorded steps.
    pub fn replay(&self, kb: &KnowledgeBase) -> bool {
        let mut known: BTreeSet<AtomId> = kb.facts().clone();
        for step in &self.steps {
            let Some(clause) = kb.clauses().get(step.clause) else {
                return false;
            };
            if clause.head != step.head {
                return false;
            }
            let body: BTreeSet<_> = clause.body.iter().copied().collect();
            let premises: BTreeSet<_> = step.premises.iter().copied().collect();
            if body != premises || !premises.iter().all(|p| known.contains(p)) {
                return false;
            }
            known.insert(step.head);
        }
        known.contains(&self.atom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Closure {
    pub atoms: BTreeSet<AtomId>,
    pub traces: BTreeMap<AtomId, ProofTrace>,
    /// Semi-naive rounds until the fixed point; at most the atom count.
    pub rounds: usize,
}

/// Least fixed point of the clauses over the facts.
///
/// Each clause keeps a count of body atoms not yet derived; an atom entering
/// the closure decrements only the clauses that mention it, so every body
/// occurrence is touched once.
pub fn forward_chain(kb: &KnowledgeBase) -> Closure {
    let n = kb.atom_count();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut remaining: Vec<usize> = Vec::with_capacity(kb.clauses().len());
    for (ci, clause) in kb.clauses().iter().enumerate() {
        remaining.push(clause.body.len());
        for &b in &clause.body {
            watchers[b].push(ci);
        }
    }

    let mut known: BTreeSet<AtomId> = kb.facts().clone();
    let mut justification: BTreeMap<AtomId, usize> = BTreeMap::new();
    let mut delta: BTreeSet<AtomId> = known.clone();

    // clauses with an empty body hold unconditionally
    let mut fresh = BTreeSet::new();
    for (ci, clause) in kb.clauses().iter().enumerate() {
        if clause.body.is_empty() && !known.contains(&clause.head) && fresh.insert(clause.head) {
            justification.insert(clause.head, ci);
        }
    }
    delta.extend(fresh.iter().copied());
    known.extend(fresh);

    let mut rounds = 0;
    while !delta.is_empty() {
        rounds += 1;
        let mut next = BTreeSet::new();
        for &atom in &delta {
            for &ci in &watchers[atom] {
                remaining[ci] -= 1;
                let head = kb.clauses()[ci].head;
                if remaining[ci] == 0 && !known.contains(&head) && next.insert(head) {
                    justification.insert(head, ci);
                }
            }
        }
        known.extend(next.iter().copied());
        delta = next;
    }

    let traces = known
        .iter()
        .map(|&a| (a, build_trace(kb, &justification, a)))
        .collect();
    Closure {
        atoms: known,
        traces,
        rounds,
    }
}

fn build_trace(kb: &KnowledgeBase, justification: &BTreeMap<AtomId, usize>, atom: AtomId) -> ProofTrace {
    let mut steps = Vec::new();
    let mut done = BTreeSet::new();
    // iterative post-order over the justification DAG
    let mut stack = vec![(atom, false)];
    while let Some((a, expanded)) = stack.pop() {
        let Some(&ci) = justification.get(&a) else {
            continue;
        };
        if done.contains(&a) {
            continue;
        }
        let clause = &kb.clauses()[ci];
        if expanded {
            done.insert(a);
            steps.push(ProofStep {
                clause: ci,
                head: a,
                premises: clause.body.clone(),
            });
        } else {
            stack.push((a, true));
            for &p in clause.body.iter().rev() {
                if !done.contains(&p) {
                    stack.push((p, false));
                }
            }
        }
    }
    ProofTrace { atom, steps }
}

/// Every declared exclusive pair with both members in the closure.
pub fn detect_conflicts(kb: &KnowledgeBase, closure: &BTreeSet<AtomId>) -> Vec<(AtomId, AtomId)> {
    kb.exclusive()
        .iter()
        .copied()
        .filter(|(a, b)| closure.contains(a) && closure.contains(b))
        .collect()
}

/// Insert every true predicate as a fact. `mapping[node]` names the atom a
/// node stands for; soft predicates are cut at 0.5 first.
pub fn bind_predicates(p: &PredicateSet, kb: &KnowledgeBase, mapping: &[Option<AtomId>]) -> Result<KnowledgeBase> {
    let mut out = kb.clone();
    for (node, truth) in p.truth().into_iter().enumerate() {
        if !truth {
            continue;
        }
        let atom = mapping
            .get(node)
            .copied()
            .flatten()
            .ok_or(Error::UnmappedNode(node))?;
        out.add_fact(atom)?;
    }
    Ok(out)
}

/// Indented text dump of a closure's traces:
///
/// ```text
/// a (fact)
/// c
///   step 1: b :- a [clause 0]
///   step 2: c :- a, b [clause 1]
/// ```
pub fn format_traces(kb: &KnowledgeBase, closure: &Closure) -> String {
    let mut out = String::new();
    for (atom, trace) in &closure.traces {
        if trace.steps.is_empty() {
            let _ = writeln!(out, "{} (fact)", kb.name(*atom));
            continue;
        }
        let _ = writeln!(out, "{}", kb.name(*atom));
        for (i, step) in trace.steps.iter().enumerate() {
            let premises: Vec<&str> = step.premises.iter().map(|&p| kb.name(p)).collect();
            let _ = writeln!(
                out,
                "  step {}: {} :- {} [clause {}]",
                i + 1,
                kb.name(step.head),
                premises.join(", "),
                step.clause
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb(text: &str) -> KnowledgeBase {
        KnowledgeBase::parse(text).unwrap()
    }

    #[test]
    fn single_step() {
        let k = kb("atom a\natom b\nfact a\nclause b :- a");
        let c = forward_chain(&k);
        assert_eq!(c.atoms, BTreeSet::from([0, 1]));
        let t = &c.traces[&1];
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].clause, 0);
        assert!(t.replay(&k));
        assert!(c.traces[&0].steps.is_empty());
    }

    #[test]
    fn no_clauses() {
        let k = kb("atom a\natom b\nfact b");
        assert_eq!(forward_chain(&k).atoms, BTreeSet::from([1]));
    }

    #[test]
    fn conjunctive_body_and_chain() {
        let k = kb("atom a\natom b\natom c\natom d\nfact a\nclause b :- a\nclause c :- a, b\nclause d :- c, b");
        let c = forward_chain(&k);
        assert_eq!(c.atoms.len(), 4);
        let t = &c.traces[&3];
        assert_eq!(t.steps.iter().map(|s| s.head).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(t.replay(&k));
        assert!(c.rounds <= k.atom_count());
    }

    #[test]
    fn empty_body_clause_fires() {
        let k = kb("atom a\natom b\nclause a :-\nclause b :- a");
        let c = forward_chain(&k);
        assert_eq!(c.atoms.len(), 2);
        assert!(c.traces[&1].replay(&k));
    }

    #[test]
    fn tampered_trace_fails_replay() {
        let k = kb("atom a\natom b\natom c\nfact a\nclause b :- a\nclause c :- b");
        let c = forward_chain(&k);
        let mut t = c.traces[&2].clone();
        t.steps.remove(0);
        assert!(!t.replay(&k));
    }

    #[test]
    fn conflicts() {
        let k = kb("atom a\natom na\natom b\nfact a\nclause na :- a\nclause b :- a\nexclusive a na");
        let c = forward_chain(&k);
        assert_eq!(detect_conflicts(&k, &c.atoms), vec![(0, 1)]);
        let k2 = kb("atom a\nfact a");
        assert!(detect_conflicts(&k2, &forward_chain(&k2).atoms).is_empty());
    }

    #[test]
    fn binding() {
        let k = kb("atom a\natom b");
        let empty = bind_predicates(&PredicateSet::Hard(vec![false, false]), &k, &[Some(0), Some(1)]).unwrap();
        assert_eq!(empty, k);
        let one = bind_predicates(&PredicateSet::Soft(vec![0.9, 0.2]), &k, &[Some(0), None]).unwrap();
        assert_eq!(one.facts(), &BTreeSet::from([0]));
        assert!(matches!(
            bind_predicates(&PredicateSet::Hard(vec![false, true]), &k, &[Some(0)]),
            Err(Error::UnmappedNode(1))
        ));
    }

    #[test]
    fn trace_dump() {
        let k = kb("atom a\natom b\nfact a\nclause b :- a");
        let text = format_traces(&k, &forward_chain(&k));
        assert_eq!(text, "a (fact)\nb\n  step 1: b :- a [clause 0]\n");
    }
}
