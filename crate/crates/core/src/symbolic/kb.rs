//! Propositional Horn-clause knowledge bases.
//!
//! Text format, one statement per line (`#` starts a comment):
//!
//! ```text
//! atom rain
//! atom wet
//! fact rain
//! clause wet :- rain
//! exclusive wet dry
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type AtomId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub head: AtomId,
    /// Deduplicated body atoms in declaration order.
    pub body: Vec<AtomId>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    atoms: Vec<String>,
    index: HashMap<String, AtomId>,
    clauses: Vec<Clause>,
    facts: BTreeSet<AtomId>,
    exclusive: Vec<(AtomId, AtomId)>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare an atom, returning the existing id if already declared.
    pub fn add_atom(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.atoms.len();
        self.atoms.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn atom(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<AtomId> {
        self.atom(name).ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.atoms[id]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    fn check(&self, id: AtomId) -> Result<()> {
        if id < self.atoms.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: id,
                len: self.atoms.len(),
            })
        }
    }

    pub fn add_fact(&mut self, id: AtomId) -> Result<()> {
        self.check(id)?;
        self.facts.insert(id);
        Ok(())
    }

    pub fn add_clause(&mut self, head: AtomId, body: &[AtomId]) -> Result<usize> {
        self.check(head)?;
        let mut seen = BTreeSet::new();
        let mut deduped = Vec::with_capacity(body.len());
        for &b in body {
            self.check(b)?;
            if seen.insert(b) {
                deduped.push(b);
            }
        }
        self.clauses.push(Clause { head, body: deduped });
        Ok(self.clauses.len() - 1)
    }

    pub fn add_exclusive(&mut self, a: AtomId, b: AtomId) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        self.exclusive.push((a, b));
        Ok(())
    }

    pub fn facts(&self) -> &BTreeSet<AtomId> {
        &self.facts
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn exclusive(&self) -> &[(AtomId, AtomId)] {
        &self.exclusive
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kb = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let wrap = |e: Error| Error::parse(line_no, e.to_string());
            match keyword {
                "atom" => {
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(Error::parse(line_no, "expected `atom <name>`"));
                    }
                    kb.add_atom(rest);
                }
                "fact" => {
                    let id = kb.require(rest).map_err(wrap)?;
                    kb.add_fact(id)?;
                }
                "clause" => {
                    let (head, body) = rest
                        .split_once(":-")
                        .ok_or_else(|| Error::parse(line_no, "expected `clause <head> :- <body>`"))?;
                    let head = head.trim();
                    if head.is_empty() {
                        return Err(Error::parse(line_no, "clause without head"));
                    }
                    let head = kb.require(head).map_err(wrap)?;
                    let body = body
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| kb.require(s).map_err(wrap))
                        .collect::<Result<Vec<_>>>()?;
                    kb.add_clause(head, &body)?;
                }
                "exclusive" => {
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    if names.len() != 2 {
                        return Err(Error::parse(line_no, "expected `exclusive <a> <b>`"));
                    }
                    let a = kb.require(names[0]).map_err(wrap)?;
                    let b = kb.require(names[1]).map_err(wrap)?;
                    kb.add_exclusive(a, b)?;
                }
                other => return Err(Error::parse(line_no, format!("unknown statement `{other}`"))),
            }
        }
        Ok(kb)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            let _ = writeln!(out, "atom {a}");
        }
        for &f in &self.facts {
            let _ = writeln!(out, "fact {}", self.atoms[f]);
        }
        for c in &self.clauses {
            let body: Vec<&str> = c.body.iter().map(|&b| self.atoms[b].as_str()).collect();
            let _ = writeln!(out, "clause {} :- {}", self.atoms[c.head], body.join(", "));
        }
        for &(a, b) in &self.exclusive {
            let _ = writeln!(out, "exclusive {} {}", self.atoms[a], self.atoms[b]);
        }
        out
    }
}
