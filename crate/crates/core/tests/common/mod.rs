//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod criteria;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use gdiagram::signature::Head;
use gdiagram::{
    build_canonical_model, parse_theory, Atom, Formula, Interpretation, ModalOp, Model, PointOfReference, Signature,
    Term, Theory, Truth3,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ORIGIN: PointOfReference = PointOfReference { world: 0, time: 0 };

pub const CORPUS: &[&str] = &["johnny", "blocks", "price_rise", "strings", "tense", "birds"];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_text(name: &str) -> String {
    let path = corpus_dir().join(format!("{name}.thy"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn corpus_theory(name: &str) -> Theory {
    parse_theory(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Depth used for a corpus theory in the heavier tests. The strings
/// universe grows quadratically per level, so it stays at 1.
pub fn corpus_depth(name: &str) -> usize {
    match name {
        "strings" => 1,
        _ => 2,
    }
}

pub fn corpus_model(name: &str, depth: usize) -> Model {
    build_canonical_model(&corpus_theory(name), depth).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn c(name: &str) -> Term {
    Term::constant(name)
}

pub fn atom(pred: &str, args: &[&str]) -> Atom {
    Atom::new(pred, args.iter().map(|a| c(a)).collect())
}

/// Copies a directory tree (files only) into `to`.
pub fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

// ---- Kleene oracle: F < U < T, and = min, or = max ----

pub fn rank(v: Truth3) -> u8 {
    match v {
        Truth3::False => 0,
        Truth3::Unknown => 1,
        Truth3::True => 2,
    }
}

pub fn unrank(r: u8) -> Truth3 {
    [Truth3::False, Truth3::Unknown, Truth3::True][r as usize]
}

pub fn k_and(a: Truth3, b: Truth3) -> Truth3 {
    unrank(rank(a).min(rank(b)))
}

pub fn k_or(a: Truth3, b: Truth3) -> Truth3 {
    unrank(rank(a).max(rank(b)))
}

pub fn k_not(a: Truth3) -> Truth3 {
    unrank(2 - rank(a))
}

pub fn k_implies(a: Truth3, b: Truth3) -> Truth3 {
    k_or(k_not(a), b)
}

pub const TRUTHS: [Truth3; 3] = [Truth3::True, Truth3::False, Truth3::Unknown];

// ---- term enumeration oracle ----

/// All ground constructor terms of each sort with depth at most `depth`,
/// as plain sets, by direct recursion on the depth.
pub fn brute_terms(sig: &Signature, depth: usize) -> HashMap<String, HashSet<Term>> {
    let mut level: HashMap<String, HashSet<Term>> =
        sig.sorts.iter().map(|s| (s.name.clone(), HashSet::new())).collect();
    for f in sig.funcs.iter().filter(|f| f.constructor && f.arg_sorts.is_empty()) {
        level.get_mut(&f.result_sort).unwrap().insert(c(&f.name));
    }
    for _ in 0..depth {
        let mut next = level.clone();
        for f in sig.funcs.iter().filter(|f| f.constructor && !f.arg_sorts.is_empty()) {
            let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
            for s in &f.arg_sorts {
                let mut grown = Vec::new();
                for p in &partial {
                    for t in &level[s] {
                        let mut q = p.clone();
                        q.push(t.clone());
                        grown.push(q);
                    }
                }
                partial = grown;
            }
            for args in partial {
                next.get_mut(&f.result_sort).unwrap().insert(Term::app(&f.name, args));
            }
        }
        level = next;
    }
    level
}

// ---- congruence oracle ----

fn subterms(t: &Term, out: &mut Vec<Term>) {
    for a in &t.args {
        subterms(a, out);
    }
    if !out.contains(t) {
        out.push(t.clone());
    }
}

/// Smallest congruence containing `eqs` over all subterms, by iterating
/// "close under symmetry and transitivity; lift through function
/// application" until nothing changes, restricted to `terms`.
pub fn naive_congruence(eqs: &[(Term, Term)], terms: &[Term]) -> BTreeSet<BTreeSet<Term>> {
    let mut all = Vec::new();
    for t in terms {
        subterms(t, &mut all);
    }
    for (l, r) in eqs {
        subterms(l, &mut all);
        subterms(r, &mut all);
    }
    let n = all.len();
    let pos = |t: &Term| all.iter().position(|u| u == t).unwrap();
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for (l, r) in eqs {
        let (i, j) = (pos(l), pos(r));
        rel[i][j] = true;
        rel[j][i] = true;
    }
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                if !rel[i][k] {
                    continue;
                }
                for j in 0..n {
                    if rel[k][j] && !rel[i][j] {
                        rel[i][j] = true;
                        changed = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    continue;
                }
                let (a, b) = (&all[i], &all[j]);
                if a.head == b.head
                    && a.args.len() == b.args.len()
                    && !a.args.is_empty()
                    && a.args.iter().zip(&b.args).all(|(x, y)| rel[pos(x)][pos(y)])
                {
                    rel[i][j] = true;
                    rel[j][i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes = BTreeSet::new();
    for t in terms {
        let i = pos(t);
        let class: BTreeSet<Term> = terms.iter().filter(|u| rel[i][pos(u)]).cloned().collect();
        classes.insert(class);
    }
    classes
}

/// A random congruence instance over constants a..d, unary f and binary g:
/// at most 20 distinct terms and at most 6 equations.
pub fn random_congruence_instance(rng: &mut impl Rng) -> (Vec<(Term, Term)>, Vec<Term>) {
    fn term(rng: &mut impl Rng, depth: usize) -> Term {
        let consts = ["a", "b", "c", "d"];
        if depth == 0 || rng.gen_bool(0.4) {
            return c(consts[rng.gen_range(0..consts.len())]);
        }
        if rng.gen_bool(0.5) {
            Term::app("f", vec![term(rng, depth - 1)])
        } else {
            Term::app("g", vec![term(rng, depth - 1), term(rng, depth - 1)])
        }
    }
    let n_terms = rng.gen_range(1..=20);
    let mut terms: Vec<Term> = Vec::new();
    while terms.len() < n_terms {
        let t = term(rng, 3);
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    let n_eqs = rng.gen_range(0..=6);
    let eqs = (0..n_eqs)
        .map(|_| {
            let pick = |rng: &mut dyn rand::RngCore, terms: &[Term]| -> Term {
                if rng.gen_bool(0.7) {
                    terms[rng.gen_range(0..terms.len())].clone()
                } else {
                    c(["a", "b", "c", "d"][rng.gen_range(0..4)])
                }
            };
            (pick(rng, &terms), pick(rng, &terms))
        })
        .collect();
    (eqs, terms)
}

pub fn as_sets(classes: Vec<Vec<Term>>) -> BTreeSet<BTreeSet<Term>> {
    classes.into_iter().map(|c| c.into_iter().collect()).collect()
}

// ---- blocks oracle ----

/// `top(x,y,z)` read straight off the two rules: true iff z is
/// put(x,y,Tab0), or put(x,w,put(w,y,Tab0)) for some block w.
pub fn blocks_oracle(x: &Term, y: &Term, z: &Term) -> bool {
    let is = |t: &Term, name: &str| t.head == Head::Func(name.to_string());
    let tab0 = |t: &Term| is(t, "Tab0") && t.args.is_empty();
    if !is(z, "put") {
        return false;
    }
    let (p, q, rest) = (&z.args[0], &z.args[1], &z.args[2]);
    if p == x && q == y && tab0(rest) {
        return true;
    }
    if p == x && is(rest, "put") {
        let (p2, q2, rest2) = (&rest.args[0], &rest.args[1], &rest.args[2]);
        return p2 == q && q2 == y && tab0(rest2);
    }
    false
}

// ---- random formulas ----

/// Generates closed formulas over a model's predicates, with arguments
/// drawn from universe representatives and variables in scope.
pub struct FormulaGen {
    pub preds: Vec<(String, Vec<String>)>,
    pub domain: HashMap<String, Vec<Term>>,
    pub modal: bool,
}

impl FormulaGen {
    pub fn new<I: Interpretation + ?Sized>(interp: &I) -> Self {
        let sig = interp.signature();
        let mut domain = HashMap::new();
        for s in &sig.sorts {
            let d = interp.domain(&s.name, ORIGIN).unwrap_or_default();
            if !d.is_empty() {
                domain.insert(s.name.clone(), d);
            }
        }
        let preds = sig
            .preds
            .iter()
            .filter(|p| p.arg_sorts.iter().all(|s| domain.contains_key(s)))
            .map(|p| (p.name.clone(), p.arg_sorts.clone()))
            .collect();
        FormulaGen {
            preds,
            domain,
            modal: true,
        }
    }

    fn sorts(&self) -> Vec<&String> {
        let mut s: Vec<&String> = self.domain.keys().collect();
        s.sort();
        s
    }

    fn term(&self, rng: &mut impl Rng, sort: &str, scope: &[(String, String)]) -> Term {
        let vars: Vec<&(String, String)> = scope.iter().filter(|(_, s)| s == sort).collect();
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Term::var(&vars.choose(rng).unwrap().0);
        }
        self.domain[sort].choose(rng).unwrap().clone()
    }

    fn atomic(&self, rng: &mut impl Rng, scope: &[(String, String)]) -> Formula {
        if self.preds.is_empty() || rng.gen_bool(0.15) {
            let sorts = self.sorts();
            let s = sorts.choose(rng).unwrap().to_string();
            return Formula::Equation(self.term(rng, &s, scope), self.term(rng, &s, scope));
        }
        let (name, sorts) = self.preds.choose(rng).unwrap();
        Formula::atom(name, sorts.iter().map(|s| self.term(rng, s, scope)).collect())
    }

    fn gen(&self, rng: &mut impl Rng, depth: usize, scope: &mut Vec<(String, String)>) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.atomic(rng, scope);
        }
        let kinds = if self.modal { 8 } else { 7 };
        match rng.gen_range(0..kinds) {
            0 => Formula::not(self.gen(rng, depth - 1, scope)),
            1 => Formula::and(self.gen(rng, depth - 1, scope), self.gen(rng, depth - 1, scope)),
            2 => Formula::or(self.gen(rng, depth - 1, scope), self.gen(rng, depth - 1, scope)),
            3 => Formula::implies(self.gen(rng, depth - 1, scope), self.gen(rng, depth - 1, scope)),
            4 | 5 => {
                let sort = self.sorts().choose(rng).unwrap().to_string();
                let var = format!("v{}", scope.len());
                scope.push((var.clone(), sort.clone()));
                let body = self.gen(rng, depth - 1, scope);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::exists(&var, &sort, body)
                } else {
                    Formula::forall(&var, &sort, body)
                }
            }
            6 => self.atomic(rng, scope),
            _ => {
                let op = *[ModalOp::Nec, ModalOp::Past, ModalOp::Fut].choose(rng).unwrap();
                Formula::modal(op, self.gen(rng, depth - 1, scope))
            }
        }
    }

    pub fn formula(&self, rng: &mut impl Rng, depth: usize) -> Formula {
        self.gen(rng, depth, &mut Vec::new())
    }
}

/// Whether every existential occurs positively (under an even number of
/// negations, counting implication antecedents as negated).
pub fn existentials_positive(f: &Formula) -> bool {
    fn go(f: &Formula, positive: bool) -> bool {
        match f {
            Formula::Atom(_) | Formula::Equation(..) => true,
            Formula::Not(g) => go(g, !positive),
            Formula::And(a, b) | Formula::Or(a, b) => go(a, positive) && go(b, positive),
            Formula::Implies(a, b) => go(a, !positive) && go(b, positive),
            Formula::Exists { body, .. } => positive && go(body, positive),
            Formula::Forall { body, .. } | Formula::Modal(_, body) => go(body, positive),
        }
    }
    go(f, true)
}

pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

// ---- consistency oracle ----

/// Whether `atom := value` (everywhere) admits a total completion of every
/// unknown atom under which the theory builds without conflict, i.e. every
/// ground axiom instance is true. Builds each completion from scratch.
/// `None` when more than `limit` atoms are unknown.
pub fn brute_consistent(model: &Model, atom: &Atom, value: Truth3, limit: usize) -> Option<bool> {
    for at in model.index().points() {
        let now = model.lookup_atom(atom, at).unwrap();
        if now.is_definite() && now != value {
            return Some(false);
        }
    }
    let mut theory = model.theory().clone();
    for at in model.index().points() {
        theory.diagram.at_mut(at).set_fact(atom.clone(), value);
    }
    let Ok(forced) = build_canonical_model(&theory, model.depth()) else {
        return Some(false);
    };
    let mut open = Vec::new();
    for at in forced.index().points() {
        for (a, v) in forced.atoms(at) {
            if v == Truth3::Unknown {
                open.push((at, a));
            }
        }
    }
    if open.len() > limit {
        return None;
    }
    for bits in 0u32..(1 << open.len()) {
        let mut t = theory.clone();
        for (i, (at, a)) in open.iter().enumerate() {
            t.diagram
                .at_mut(*at)
                .set_fact(a.clone(), Truth3::from_bool(bits & (1 << i) != 0));
        }
        if build_canonical_model(&t, model.depth()).is_ok() {
            return Some(true);
        }
    }
    Some(false)
}

/// A small random theory: one sort of three elements, three unary
/// predicates with open defaults, a few facts, and one or two universal
/// axioms of the shape `forall x . (L1 -> L2)` or `forall x . (L1 | L2)`.
pub fn random_axiom_theory(rng: &mut impl Rng) -> String {
    let preds = ["p", "q", "r"];
    let elems = ["E1", "E2", "E3"];
    let mut s = String::from("sort thing\nconst E1 E2 E3 : thing\n");
    for p in preds {
        s.push_str(&format!("pred {p} : thing default unknown\n"));
    }
    for _ in 0..rng.gen_range(0..4) {
        let v = if rng.gen_bool(0.5) { "true" } else { "false" };
        s.push_str(&format!(
            "fact {}({}) = {v}\n",
            preds.choose(rng).unwrap(),
            elems.choose(rng).unwrap()
        ));
    }
    let lit = |rng: &mut dyn rand::RngCore| {
        let neg = if rng.gen_bool(0.5) { "~" } else { "" };
        format!("{neg}{}(x)", preds[rng.gen_range(0..3)])
    };
    for _ in 0..rng.gen_range(1..=2) {
        let (a, b) = (lit(rng), lit(rng));
        let conn = if rng.gen_bool(0.5) { "->" } else { "|" };
        s.push_str(&format!("axiom forall x:thing . ({a} {conn} {b})\n"));
    }
    s
}

/// The price/rise theory with every `?` dropped, so all memberships are
/// definite.
pub fn total_price_rise() -> Theory {
    parse_theory(&corpus_text("price_rise").replace('?', "")).unwrap()
}

/// A random total intensional theory: 2-3 worlds, 2 times, 2-3 entities,
/// every concept over them (at most 9), two properties built from random
/// definite concept sets.
pub fn random_total_intensional(rng: &mut impl Rng) -> String {
    let worlds: Vec<String> = (1..=rng.gen_range(2..=3)).map(|i| format!("W{i}")).collect();
    let n_entities = if worlds.len() == 3 { 2 } else { rng.gen_range(2..=3) };
    let entities: Vec<String> = ["A", "B", "C"][..n_entities].iter().map(|s| s.to_string()).collect();
    let mut s = format!("worlds {}\ntimes t0 t1\nentity {}\n", worlds.join(" "), entities.join(" "));
    let mut concepts = Vec::new();
    for n in 0..entities.len().pow(worlds.len() as u32) {
        // first world varies slowest
        let mut digits = vec![0usize; worlds.len()];
        let mut rest = n;
        for d in digits.iter_mut().rev() {
            *d = rest % entities.len();
            rest /= entities.len();
        }
        let graph: Vec<&String> = digits.iter().map(|&i| &entities[i]).collect();
        let name = format!("{}IC", graph.iter().map(|e| e.as_str()).collect::<String>());
        let entries: Vec<String> = worlds.iter().zip(&graph).map(|(w, e)| format!("{w}:{e}")).collect();
        s.push_str(&format!("concept {name} = {}\n", entries.join(" ")));
        concepts.push(name);
    }
    let mut sets = Vec::new();
    for i in 0..4 {
        let members: Vec<&String> = concepts.iter().filter(|_| rng.gen_bool(0.4)).collect();
        let name = format!("S{i}");
        s.push_str(&format!(
            "conceptset {name} = {}\n",
            members.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(" ")
        ));
        sets.push(name);
    }
    for prop in ["p", "q"] {
        let entries: Vec<String> = worlds.iter().map(|w| format!("{w}:{}", sets.choose(rng).unwrap())).collect();
        s.push_str(&format!("property {prop} = {}\n", entries.join(" ")));
    }
    s
}

/// Definite atom values of a model at every point.
pub fn definite_atoms(model: &Model) -> Vec<(PointOfReference, Atom, Truth3)> {
    let mut out = Vec::new();
    for at in model.index().points() {
        for (a, v) in model.atoms(at) {
            if v.is_definite() {
                out.push((at, a, v));
            }
        }
    }
    out
}
