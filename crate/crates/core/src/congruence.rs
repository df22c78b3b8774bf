//! Hash-consed ground terms and congruence closure over them.

use std::collections::HashMap;

use crate::signature::{Head, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    fn ix(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    func: String,
    args: Vec<TermId>,
}

/// Interning table for ground terms. Subterms are interned before their
/// parents, so ids respect the subterm order.
#[derive(Debug, Clone, Default)]
pub struct TermBank {
    nodes: Vec<Node>,
    index: HashMap<Node, TermId>,
}

impl TermBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns a ground term and all its subterms. Panics on variables.
    pub fn intern(&mut self, term: &Term) -> TermId {
        let func = match &term.head {
            Head::Func(f) => f.clone(),
            Head::Var(v) => panic!("cannot intern variable `{v}`"),
        };
        let args = term.args.iter().map(|a| self.intern(a)).collect();
        let node = Node { func, args };
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn get(&self, term: &Term) -> Option<TermId> {
        let Head::Func(f) = &term.head else {
            return None;
        };
        let args = term
            .args
            .iter()
            .map(|a| self.get(a))
            .collect::<Option<Vec<_>>>()?;
        self.index
            .get(&Node {
                func: f.clone(),
                args,
            })
            .copied()
    }

    pub fn func(&self, id: TermId) -> &str {
        &self.nodes[id.ix()].func
    }

    pub fn args(&self, id: TermId) -> &[TermId] {
        &self.nodes[id.ix()].args
    }

    pub fn term(&self, id: TermId) -> Term {
        let node = &self.nodes[id.ix()];
        Term::app(&node.func, node.args.iter().map(|&a| self.term(a)).collect())
    }

    pub fn ids(&self) -> impl Iterator<Item = TermId> {
        (0..self.nodes.len() as u32).map(TermId)
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn grow(&mut self, n: usize) {
        while self.parent.len() < n {
            self.parent.push(self.parent.len());
            self.size.push(1);
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if two distinct classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Closes `uf` (indexed by bank ids) under the congruence rule
/// `args pairwise equal => applications equal`.
pub(crate) fn close(bank: &TermBank, uf: &mut UnionFind) {
    loop {
        let mut table: HashMap<(&str, Vec<usize>), usize> = HashMap::new();
        let mut changed = false;
        for id in bank.ids() {
            let key = (
                bank.func(id),
                bank.args(id).iter().map(|a| uf.find(a.ix())).collect::<Vec<_>>(),
            );
            match table.get(&key) {
                Some(&other) => changed |= uf.union(other, id.ix()),
                None => {
                    table.insert(key, id.ix());
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// The smallest congruence containing `equations`, restricted to `terms`.
///
/// Classes are listed in order of their first member in `terms`; members
/// keep their input order. Duplicate input terms are reported once.
pub fn congruence_close(equations: &[(Term, Term)], terms: &[Term]) -> Vec<Vec<Term>> {
    let mut bank = TermBank::new();
    let ids: Vec<TermId> = terms.iter().map(|t| bank.intern(t)).collect();
    let eq_ids: Vec<(TermId, TermId)> = equations
        .iter()
        .map(|(l, r)| (bank.intern(l), bank.intern(r)))
        .collect();
    let mut uf = UnionFind::new(bank.len());
    for (l, r) in eq_ids {
        uf.union(l.ix(), r.ix());
    }
    close(&bank, &mut uf);

    let mut classes: Vec<Vec<Term>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut seen = std::collections::HashSet::new();
    for (t, id) in terms.iter().zip(ids) {
        if !seen.insert(id) {
            continue;
        }
        let root = uf.find(id.ix());
        let k = *slot.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(t.clone());
    }
    classes
}
