//! Model expansion: forcing unknown atoms, adding elements, extending
//! partial sets and merging partially specified predicates. Every operation
//! takes a snapshot and returns a new one with the step appended to its
//! history.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::diagram::{tuples, Atom, Model};
use crate::error::{Error, Result};
use crate::evaluate::{eval_formula, EvalMode, Interpretation, PointOfReference};
use crate::formula::Formula;
use crate::intension::IndexSet;
use crate::signature::{Signature, Term};
use crate::theory::Theory;
use crate::truth::Truth3;

/// Above this many unknown atoms the consistency check falls back to the
/// Kleene verdict instead of searching completions.
pub const COMPLETION_SEARCH_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpansionStep {
    /// `point: None` forces the atom at every point of reference.
    Force {
        atom: Atom,
        value: Truth3,
        point: Option<PointOfReference>,
    },
    AddElement {
        sort: String,
        name: String,
    },
    /// Makes the atom a definite member of its predicate's extension.
    ExtendSet {
        atom: Atom,
        point: Option<PointOfReference>,
    },
    MergePredicates {
        p: String,
        q: String,
    },
}

impl ExpansionStep {
    /// The REPL command that replays this step.
    pub fn to_command(&self, index: &IndexSet) -> String {
        let at = |p: &Option<PointOfReference>| match p {
            Some(p) => format!(" at {} {}", index.worlds[p.world], index.times[p.time]),
            None => String::new(),
        };
        match self {
            ExpansionStep::Force { atom, value, point } => format!("force {atom} {value}{}", at(point)),
            ExpansionStep::AddElement { sort, name } => format!("add {sort} {name}"),
            ExpansionStep::ExtendSet { atom, point } => format!("extend {atom}{}", at(point)),
            ExpansionStep::MergePredicates { p, q } => format!("eqforce {p} {q}"),
        }
    }
}

/// A value the caller is asked to confirm after a merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub atom: Atom,
    pub at: PointOfReference,
    pub required: Truth3,
    pub provenance: ExpansionStep,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.atom, self.required)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent(String),
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }
}

fn targets(model: &Model, point: Option<PointOfReference>) -> Result<Vec<PointOfReference>> {
    match point {
        Some(p) => {
            let index = model.index();
            if p.world >= index.worlds.len() || p.time >= index.times.len() {
                return Err(Error::UnknownPoint(format!("({}, {})", p.world, p.time)));
            }
            Ok(vec![p])
        }
        None => Ok(model.index().points().collect()),
    }
}

fn check_ground(model: &Model, atom: &Atom) -> Result<()> {
    if !atom.is_ground() {
        return Err(Error::SortMismatch(format!("atom `{atom}` is not ground")));
    }
    atom.check_sorts(model.signature(), &HashMap::new())
}

fn definite(value: Truth3) -> Result<()> {
    if value.is_definite() {
        Ok(())
    } else {
        Err(Error::Command("only true or false can be forced".into()))
    }
}

fn symbol_taken(sig: &Signature, name: &str) -> bool {
    sig.func(name).is_some() || sig.pred(name).is_some() || sig.sort(name).is_some()
}

/// Applies one step without any consistency search beyond what the build
/// itself checks (fact conflicts, merge conflicts, false axiom instances).
pub fn apply_step(model: &Model, step: &ExpansionStep) -> Result<Model> {
    let mut theory: Theory = (*model.theory).clone();
    match step {
        ExpansionStep::Force { atom, value, point } => {
            check_ground(model, atom)?;
            definite(*value)?;
            for at in targets(model, *point)? {
                theory.diagram.at_mut(at).set_fact(atom.clone(), *value);
            }
        }
        ExpansionStep::ExtendSet { atom, point } => {
            check_ground(model, atom)?;
            for at in targets(model, *point)? {
                theory.diagram.at_mut(at).set_fact(atom.clone(), Truth3::True);
            }
        }
        ExpansionStep::AddElement { sort, name } => {
            theory.signature.require_sort(sort)?;
            if symbol_taken(&theory.signature, name) {
                return Err(Error::DuplicateName(name.clone()));
            }
            theory.signature.add_const(name, sort);
        }
        ExpansionStep::MergePredicates { p, q } => {
            if test_function_equality(model, p, q)? == Truth3::False {
                return Err(Error::Inconsistent(format!("`{p}` and `{q}` disagree on a definite tuple")));
            }
            for d in &mut theory.diagram.diagrams {
                d.merged.push((p.clone(), q.clone()));
            }
        }
    }
    let mut history = model.history.clone();
    history.push(step.clone());
    Model::assemble(Arc::new(theory), model.base.clone(), history, model.depth)
}

/// Rebuilds the model from its base theory and the first `upto` steps of
/// its history.
pub fn replay(model: &Model, upto: usize) -> Result<Model> {
    replay_steps(model.base.clone(), model.depth, &model.history[..upto.min(model.history.len())])
}

pub fn replay_steps(base: Arc<Theory>, depth: usize, steps: &[ExpansionStep]) -> Result<Model> {
    let mut model = Model::assemble(base.clone(), base, Vec::new(), depth)?;
    for step in steps {
        model = apply_step(&model, step)?;
    }
    Ok(model)
}

/// Model plus tentative values for atoms that are unknown in it.
struct Overlay<'a> {
    model: &'a Model,
    extra: HashMap<(usize, String, Vec<usize>), Truth3>,
}

impl Overlay<'_> {
    fn key(&self, atom: &Atom, at: PointOfReference) -> Option<(usize, String, Vec<usize>)> {
        let tuple = self.model.tuple_classes(atom, at)?;
        Some((self.model.index().flat(at), self.model.merge_root(&atom.pred, at), tuple))
    }
}

impl Interpretation for Overlay<'_> {
    fn signature(&self) -> &Signature {
        self.model.signature()
    }

    fn index(&self) -> &IndexSet {
        self.model.index()
    }

    fn domain(&self, sort: &str, at: PointOfReference) -> Result<Vec<Term>> {
        self.model.domain(sort, at)
    }

    fn atom_value(&self, atom: &Atom, at: PointOfReference) -> Result<Truth3> {
        let v = self.model.atom_value(atom, at)?;
        if v != Truth3::Unknown {
            return Ok(v);
        }
        Ok(self
            .key(atom, at)
            .and_then(|k| self.extra.get(&k).copied())
            .unwrap_or(Truth3::Unknown))
    }

    fn equal_terms(&self, lhs: &Term, rhs: &Term, at: PointOfReference) -> Result<Truth3> {
        self.model.equal_terms(lhs, rhs, at)
    }
}

fn preds_in(f: &Formula, out: &mut HashSet<String>) {
    match f {
        Formula::Atom(a) => {
            out.insert(a.pred.clone());
        }
        Formula::Equation(..) => {}
        Formula::Not(g) | Formula::Modal(_, g) => preds_in(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            preds_in(a, out);
            preds_in(b, out);
        }
        Formula::Exists { body, .. } | Formula::Forall { body, .. } => preds_in(body, out),
    }
}

/// Worst axiom value over all points: False if some instance is false.
fn axioms_value(interp: &Overlay<'_>) -> Result<Truth3> {
    let mut worst = Truth3::True;
    for axiom in &interp.model.theory.axioms {
        for at in interp.model.index().points() {
            let (v, _) = eval_formula(interp, &axiom.formula, at, EvalMode::Exhaustive)?;
            worst = worst & v;
            if worst == Truth3::False {
                return Ok(worst);
            }
        }
    }
    Ok(worst)
}

fn search(ov: &mut Overlay<'_>, open: &[(usize, String, Vec<usize>)]) -> Result<bool> {
    match axioms_value(ov)? {
        Truth3::False => return Ok(false),
        Truth3::True => return Ok(true),
        Truth3::Unknown => {}
    }
    let Some((first, rest)) = open.split_first() else {
        return Ok(true);
    };
    for v in [Truth3::True, Truth3::False] {
        ov.extra.insert(first.clone(), v);
        if search(ov, rest)? {
            ov.extra.remove(first);
            return Ok(true);
        }
    }
    ov.extra.remove(first);
    Ok(false)
}

/// Whether some completion of the unknown atoms the axioms mention makes
/// every axiom instance true. `None` when there are too many to search.
fn completable(model: &Model) -> Result<Option<bool>> {
    if model.theory.axioms.is_empty() {
        return Ok(Some(true));
    }
    let mut preds = HashSet::new();
    for a in &model.theory.axioms {
        preds_in(&a.formula, &mut preds);
    }
    let mut open = Vec::new();
    let mut seen = HashSet::new();
    for at in model.index().points() {
        let pm = model.point(at);
        for p in &model.signature().preds {
            let root = model.merge_root(&p.name, at);
            if !preds.contains(&p.name) && !preds.contains(&root) {
                continue;
            }
            let domains: Vec<&[usize]> = p.arg_sorts.iter().map(|s| pm.closure.elements(s)).collect();
            for tuple in tuples(&domains) {
                if pm.table[&p.name][&tuple] == Truth3::Unknown {
                    let key = (model.index().flat(at), root.clone(), tuple);
                    if seen.insert(key.clone()) {
                        open.push(key);
                    }
                }
            }
        }
    }
    if open.len() > COMPLETION_SEARCH_LIMIT {
        return Ok(None);
    }
    let mut ov = Overlay {
        model,
        extra: HashMap::new(),
    };
    search(&mut ov, &open).map(Some)
}

fn verdict(candidate: Result<Model>) -> Result<Consistency> {
    match candidate {
        Ok(m) => Ok(match completable(&m)? {
            Some(false) => Consistency::Inconsistent(
                "no completion of the unknown atoms satisfies every axiom instance".into(),
            ),
            _ => Consistency::Consistent,
        }),
        Err(Error::Inconsistent(reason)) => Ok(Consistency::Inconsistent(reason)),
        Err(e) => Err(e),
    }
}

fn current_conflict(model: &Model, atom: &Atom, value: Truth3, points: &[PointOfReference]) -> Result<Option<String>> {
    for &at in points {
        let now = model.lookup_atom(atom, at)?;
        if now.is_definite() && now != value {
            let place = if model.index().point_count() > 1 {
                format!(" at {}", model.index().show(at))
            } else {
                String::new()
            };
            return Ok(Some(format!("{atom} is already {now}{place}")));
        }
    }
    Ok(None)
}

/// Whether `atom := value` (at `point`, or everywhere) can be added: no atom
/// becomes both true and false through congruence or merged predicates,
/// no axiom instance becomes false, and, when few enough atoms are unknown,
/// some completion of them satisfies every axiom instance.
pub fn check_consistency_at(
    model: &Model,
    atom: &Atom,
    value: Truth3,
    point: Option<PointOfReference>,
) -> Result<Consistency> {
    check_ground(model, atom)?;
    definite(value)?;
    let points = targets(model, point)?;
    if let Some(reason) = current_conflict(model, atom, value, &points)? {
        return Ok(Consistency::Inconsistent(reason));
    }
    verdict(apply_step(
        model,
        &ExpansionStep::Force {
            atom: atom.clone(),
            value,
            point,
        },
    ))
}

pub fn check_consistency(model: &Model, atom: &Atom, value: Truth3) -> Result<Consistency> {
    check_consistency_at(model, atom, value, None)
}

fn force_step(model: &Model, step: ExpansionStep, atom: &Atom, value: Truth3, point: Option<PointOfReference>) -> Result<Model> {
    check_ground(model, atom)?;
    let points = targets(model, point)?;
    let mut unchanged = true;
    for &at in &points {
        unchanged &= model.lookup_atom(atom, at)? == value;
    }
    if unchanged {
        return Ok(model.clone());
    }
    if let Some(reason) = current_conflict(model, atom, value, &points)? {
        return Err(Error::Inconsistent(reason));
    }
    let next = apply_step(model, &step)?;
    if completable(&next)? == Some(false) {
        return Err(Error::Inconsistent(format!(
            "after {atom} := {value} no completion satisfies every axiom instance"
        )));
    }
    Ok(next)
}

/// Forces an atom everywhere. Forcing an atom to the value it already has
/// returns the snapshot unchanged, without a history entry.
pub fn force(model: &Model, atom: &Atom, value: Truth3) -> Result<Model> {
    force_at(model, atom, value, None)
}

pub fn force_at(model: &Model, atom: &Atom, value: Truth3, point: Option<PointOfReference>) -> Result<Model> {
    definite(value)?;
    let step = ExpansionStep::Force {
        atom: atom.clone(),
        value,
        point,
    };
    force_step(model, step, atom, value, point)
}

/// Adds `atom`'s tuple to the members of its predicate.
pub fn extend_set(model: &Model, atom: &Atom, point: Option<PointOfReference>) -> Result<Model> {
    let step = ExpansionStep::ExtendSet {
        atom: atom.clone(),
        point,
    };
    force_step(model, step, atom, Truth3::True, point)
}

/// Adds a constructor constant to `sort`. Predicates take their default on
/// the tuples it introduces, unless a rule decides them.
pub fn add_element(model: &Model, sort: &str, name: &str) -> Result<Model> {
    apply_step(
        model,
        &ExpansionStep::AddElement {
            sort: sort.to_string(),
            name: name.to_string(),
        },
    )
}

fn same_profile(model: &Model, p: &str, q: &str) -> Result<()> {
    let (pp, qq) = (model.signature().require_pred(p)?, model.signature().require_pred(q)?);
    if pp.arg_sorts != qq.arg_sorts {
        return Err(Error::SortMismatch(format!("`{p}` and `{q}` have different argument sorts")));
    }
    Ok(())
}

/// True when the two extensions coincide and are fully known, False when
/// some tuple is a definite member of one and a definite non-member of the
/// other, Unknown otherwise. Over several points, the worst case wins.
pub fn test_function_equality(model: &Model, p: &str, q: &str) -> Result<Truth3> {
    same_profile(model, p, q)?;
    let mut result = Truth3::True;
    for at in model.index().points() {
        let pm = model.point(at);
        for (tuple, &a) in &pm.table[p] {
            let b = pm.table[q][tuple];
            let here = match (a, b) {
                (Truth3::Unknown, _) | (_, Truth3::Unknown) => Truth3::Unknown,
                (x, y) => Truth3::from_bool(x == y),
            };
            result = result & here;
        }
    }
    Ok(result)
}

/// Makes `p` and `q` share one extension. Tuples unknown in one predicate
/// but definite in the other come back as obligations on the unknown side.
pub fn force_predicates_equal(model: &Model, p: &str, q: &str) -> Result<(Model, Vec<Obligation>)> {
    same_profile(model, p, q)?;
    if p == q || (model.index().points().all(|at| model.merge_root(p, at) == model.merge_root(q, at))) {
        return Ok((model.clone(), Vec::new()));
    }
    let step = ExpansionStep::MergePredicates {
        p: p.to_string(),
        q: q.to_string(),
    };
    let mut obligations = Vec::new();
    for at in model.index().points() {
        let a = model.partial_set(p, at)?;
        let b = model.partial_set(q, at)?;
        for tuple in a.unknowns.iter() {
            if let Some(v) = b.value_of(tuple).filter(|v| v.is_definite()) {
                obligations.push(Obligation {
                    atom: Atom::new(p, tuple.clone()),
                    at,
                    required: v,
                    provenance: step.clone(),
                });
            }
        }
        for tuple in b.unknowns.iter() {
            if let Some(v) = a.value_of(tuple).filter(|v| v.is_definite()) {
                obligations.push(Obligation {
                    atom: Atom::new(q, tuple.clone()),
                    at,
                    required: v,
                    provenance: step.clone(),
                });
            }
        }
    }
    let next = apply_step(model, &step)?;
    Ok((next, obligations))
}
