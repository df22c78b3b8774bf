//! Generalized diagrams and the canonical models built from them.
//!
//! A diagram assigns a three-valued truth to every atom over the
//! constructor-generated terms: explicit facts first, then rule schemata in
//! declaration order, then the predicate's default. Ground equations put
//! provably equal terms into congruence classes; the classes are the model's
//! universe and every lookup goes through them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::congruence::{close, TermBank, TermId, UnionFind};
use crate::error::{Error, Result};
use crate::evaluate::{eval_formula, EvalMode, Interpretation, PointOfReference};
use crate::expand::ExpansionStep;
use crate::intension::IndexSet;
use crate::signature::{generate_universe, GenLimits, Head, Signature, Term, TermUniverse};
use crate::theory::Theory;
use crate::truth::Truth3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.to_string(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn check_sorts(&self, sig: &Signature, var_sorts: &HashMap<String, String>) -> Result<()> {
        let pred = sig.require_pred(&self.pred)?;
        if pred.arg_sorts.len() != self.args.len() {
            return Err(Error::SortMismatch(format!(
                "`{}` expects {} arguments, got {}",
                self.pred,
                pred.arg_sorts.len(),
                self.args.len()
            )));
        }
        for (arg, want) in self.args.iter().zip(&pred.arg_sorts) {
            let got = arg.sort_in(sig, var_sorts)?;
            if &got != want {
                return Err(Error::SortMismatch(format!(
                    "argument `{arg}` of `{}` has sort {got}, expected {want}",
                    self.pred
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// `head = value when lhs1 = rhs1 & ...`. Head arguments and guard sides
/// are patterns over the rule's variables; a guard side whose variables are
/// all bound is evaluated and the other side is matched against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramRule {
    pub head: Atom,
    pub guards: Vec<(Term, Term)>,
    pub value: Truth3,
}

impl fmt::Display for DiagramRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.head, self.value)?;
        for (i, (l, r)) in self.guards.iter().enumerate() {
            f.write_str(if i == 0 { " when " } else { " & " })?;
            write!(f, "{l} = {r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GDiagram {
    pub facts: Vec<(Atom, Truth3)>,
    pub rules: Vec<DiagramRule>,
    pub equations: Vec<(Term, Term)>,
    /// Predicates forced to share one extension.
    pub merged: Vec<(String, String)>,
}

impl GDiagram {
    /// Sets the explicit value of a ground atom, replacing an earlier fact
    /// on the same atom.
    pub fn set_fact(&mut self, atom: Atom, value: Truth3) {
        match self.facts.iter_mut().find(|(a, _)| a == &atom) {
            Some(slot) => slot.1 = value,
            None => self.facts.push((atom, value)),
        }
    }

    /// Value of a ground atom under this diagram alone. Congruence is taken
    /// over the atom's own terms together with those mentioned by facts and
    /// equations.
    pub fn lookup_atom(&self, sig: &Signature, atom: &Atom) -> Result<Truth3> {
        if !atom.is_ground() {
            return Err(Error::SortMismatch(format!("atom `{atom}` is not ground")));
        }
        atom.check_sorts(sig, &HashMap::new())?;
        let extra: Vec<Term> = atom.args.to_vec();
        let closure = Closure::build(&TermUniverse::default(), self, &extra);
        let tuple: Vec<usize> = atom
            .args
            .iter()
            .map(|t| closure.class_of_term(t).expect("atom terms are interned"))
            .collect();
        let facts = closure.fact_table(self)?;
        let default = sig.require_pred(&atom.pred)?.default.truth();
        Ok(closure.value_of(self, &facts, &atom.pred, &tuple, default))
    }
}

/// Extension of a predicate over universe tuples, split three ways.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialSet {
    pub members: Vec<Vec<Term>>,
    pub non_members: Vec<Vec<Term>>,
    pub unknowns: Vec<Vec<Term>>,
    /// All tuples in universe order, for rendering.
    order: Vec<Vec<Term>>,
}

impl PartialSet {
    pub fn value_of(&self, tuple: &[Term]) -> Option<Truth3> {
        if self.members.iter().any(|t| t == tuple) {
            Some(Truth3::True)
        } else if self.non_members.iter().any(|t| t == tuple) {
            Some(Truth3::False)
        } else if self.unknowns.iter().any(|t| t == tuple) {
            Some(Truth3::Unknown)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.members.len() + self.non_members.len() + self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, tuple: &[Term]) -> fmt::Result {
    if tuple.len() == 1 {
        return write!(f, "{}", tuple[0]);
    }
    f.write_str("(")?;
    for (i, t) in tuple.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str(")")
}

/// `{J, M, B?}`: members and unknowns (marked `?`) in universe order.
/// Non-members are left out.
impl fmt::Display for PartialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let listed: Vec<(&Vec<Term>, bool)> = if self.order.is_empty() {
            self.members
                .iter()
                .map(|t| (t, false))
                .chain(self.unknowns.iter().map(|t| (t, true)))
                .collect()
        } else {
            self.order
                .iter()
                .filter_map(|t| match self.value_of(t) {
                    Some(Truth3::True) => Some((t, false)),
                    Some(Truth3::Unknown) => Some((t, true)),
                    _ => None,
                })
                .collect()
        };
        f.write_str("{")?;
        for (i, (t, unknown)) in listed.into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_tuple(f, t)?;
            if unknown {
                f.write_str("?")?;
            }
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Congruence classes over a term bank

#[derive(Debug, Clone)]
struct ClassInfo {
    members: Vec<TermId>,
    rep: TermId,
    /// Contains at least one generated constructor term.
    in_universe: bool,
}

type Bindings = BTreeMap<String, usize>;

/// Congruence-closed term bank for one point of reference.
#[derive(Debug, Clone)]
pub(crate) struct Closure {
    bank: TermBank,
    class_of: Vec<usize>,
    classes: Vec<ClassInfo>,
    sig_table: HashMap<(String, Vec<usize>), usize>,
    /// Universe classes per sort, ordered by representative generation order.
    by_sort: Vec<(String, Vec<usize>)>,
}

impl Closure {
    fn build(generated: &TermUniverse, diagram: &GDiagram, extra: &[Term]) -> Closure {
        let mut bank = TermBank::new();
        let mut gen_pos: HashMap<TermId, usize> = HashMap::new();
        for (_, terms) in &generated.by_sort {
            for (i, t) in terms.iter().enumerate() {
                let id = bank.intern(t);
                gen_pos.entry(id).or_insert(i);
            }
        }
        let ground = |t: &Term| t.is_ground();
        for t in extra.iter().filter(|t| ground(t)) {
            bank.intern(t);
        }
        for (a, _) in &diagram.facts {
            for t in a.args.iter().filter(|t| ground(t)) {
                bank.intern(t);
            }
        }
        let mut eq_ids = Vec::new();
        for (l, r) in &diagram.equations {
            eq_ids.push((bank.intern(l), bank.intern(r)));
        }
        let mut uf = UnionFind::new(bank.len());
        for (l, r) in eq_ids {
            uf.union(l.0 as usize, r.0 as usize);
        }
        close(&bank, &mut uf);

        let mut root_class: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<ClassInfo> = Vec::new();
        let mut class_of = vec![0; bank.len()];
        for id in bank.ids() {
            let root = uf.find(id.0 as usize);
            let k = *root_class.entry(root).or_insert_with(|| {
                classes.push(ClassInfo {
                    members: Vec::new(),
                    rep: id,
                    in_universe: false,
                });
                classes.len() - 1
            });
            class_of[id.0 as usize] = k;
            classes[k].members.push(id);
        }
        for class in classes.iter_mut() {
            let best = class
                .members
                .iter()
                .filter_map(|m| gen_pos.get(m).map(|&p| (p, *m)))
                .min();
            if let Some((_, id)) = best {
                class.rep = id;
                class.in_universe = true;
            }
        }
        let mut sig_table = HashMap::new();
        for id in bank.ids() {
            let key = (
                bank.func(id).to_string(),
                bank.args(id).iter().map(|a| class_of[a.0 as usize]).collect(),
            );
            sig_table.entry(key).or_insert(class_of[id.0 as usize]);
        }
        let mut by_sort = Vec::new();
        for (sort, terms) in &generated.by_sort {
            let mut seen = std::collections::HashSet::new();
            let mut list = Vec::new();
            for t in terms {
                let id = bank.get(t).expect("generated terms are interned");
                let k = class_of[id.0 as usize];
                if seen.insert(k) {
                    list.push(k);
                }
            }
            by_sort.push((sort.clone(), list));
        }
        Closure {
            bank,
            class_of,
            classes,
            sig_table,
            by_sort,
        }
    }

    pub(crate) fn class_of_term(&self, t: &Term) -> Option<usize> {
        let Head::Func(f) = &t.head else {
            return None;
        };
        let args = t
            .args
            .iter()
            .map(|a| self.class_of_term(a))
            .collect::<Option<Vec<_>>>()?;
        self.sig_table.get(&(f.clone(), args)).copied()
    }

    /// Class of a universe term; terms outside the universe have none.
    pub(crate) fn universe_class(&self, t: &Term) -> Option<usize> {
        self.class_of_term(t).filter(|&k| self.classes[k].in_universe)
    }

    pub(crate) fn rep(&self, class: usize) -> Term {
        self.bank.term(self.classes[class].rep)
    }

    pub(crate) fn elements(&self, sort: &str) -> &[usize] {
        self.by_sort
            .iter()
            .find(|(s, _)| s == sort)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub(crate) fn class_members(&self, class: usize) -> Vec<Term> {
        self.classes[class]
            .members
            .iter()
            .map(|&m| self.bank.term(m))
            .collect()
    }

    fn eval_ground(&self, t: &Term, b: &Bindings) -> Option<usize> {
        match &t.head {
            Head::Var(v) => b.get(v).copied(),
            Head::Func(f) => {
                let args = t
                    .args
                    .iter()
                    .map(|a| self.eval_ground(a, b))
                    .collect::<Option<Vec<_>>>()?;
                self.sig_table.get(&(f.clone(), args)).copied()
            }
        }
    }

    fn determined(t: &Term, b: &Bindings) -> bool {
        let mut vs = Vec::new();
        t.vars(&mut vs);
        vs.iter().all(|v| b.contains_key(v))
    }

    /// All extensions of `b` under which `pat` denotes `class`.
    fn match_pattern(&self, pat: &Term, class: usize, b: &Bindings) -> Vec<Bindings> {
        match &pat.head {
            Head::Var(v) => match b.get(v) {
                Some(&k) if k == class => vec![b.clone()],
                Some(_) => Vec::new(),
                None => {
                    let mut nb = b.clone();
                    nb.insert(v.clone(), class);
                    vec![nb]
                }
            },
            Head::Func(f) => {
                let mut out: Vec<Bindings> = Vec::new();
                for &m in &self.classes[class].members {
                    if self.bank.func(m) != f || self.bank.args(m).len() != pat.args.len() {
                        continue;
                    }
                    let mut partial = vec![b.clone()];
                    for (pa, ma) in pat.args.iter().zip(self.bank.args(m)) {
                        let k = self.class_of[ma.0 as usize];
                        partial = partial
                            .iter()
                            .flat_map(|pb| self.match_pattern(pa, k, pb))
                            .collect();
                        if partial.is_empty() {
                            break;
                        }
                    }
                    for nb in partial {
                        if !out.contains(&nb) {
                            out.push(nb);
                        }
                    }
                }
                out
            }
        }
    }

    fn rule_fires(&self, rule: &DiagramRule, tuple: &[usize]) -> bool {
        let mut sols = vec![Bindings::new()];
        for (pat, &k) in rule.head.args.iter().zip(tuple) {
            sols = sols.iter().flat_map(|b| self.match_pattern(pat, k, b)).collect();
            if sols.is_empty() {
                return false;
            }
        }
        for (l, r) in &rule.guards {
            let mut next = Vec::new();
            for b in &sols {
                let (known, pattern) = if Self::determined(l, b) {
                    (l, r)
                } else if Self::determined(r, b) {
                    (r, l)
                } else {
                    continue;
                };
                if let Some(k) = self.eval_ground(known, b) {
                    next.extend(self.match_pattern(pattern, k, b));
                }
            }
            sols = next;
            if sols.is_empty() {
                return false;
            }
        }
        true
    }

    /// Explicit facts by class tuple. Definite values win over unknown ones;
    /// two definite facts that disagree on congruent atoms are inconsistent.
    fn fact_table(&self, diagram: &GDiagram) -> Result<HashMap<(String, Vec<usize>), (Truth3, Atom)>> {
        let mut table: HashMap<(String, Vec<usize>), (Truth3, Atom)> = HashMap::new();
        for (atom, value) in &diagram.facts {
            let Some(tuple) = atom
                .args
                .iter()
                .map(|t| self.class_of_term(t))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            match table.get_mut(&(atom.pred.clone(), tuple.clone())) {
                None => {
                    table.insert((atom.pred.clone(), tuple), (*value, atom.clone()));
                }
                Some((old, old_atom)) => {
                    if old.is_definite() && value.is_definite() && old != value {
                        return Err(Error::Inconsistent(format!(
                            "{old_atom} is {old} but congruent {atom} is {value}"
                        )));
                    }
                    if !old.is_definite() {
                        *old = *value;
                        *old_atom = atom.clone();
                    }
                }
            }
        }
        Ok(table)
    }

    fn value_of(
        &self,
        diagram: &GDiagram,
        facts: &HashMap<(String, Vec<usize>), (Truth3, Atom)>,
        pred: &str,
        tuple: &[usize],
        default: Truth3,
    ) -> Truth3 {
        if let Some((v, _)) = facts.get(&(pred.to_string(), tuple.to_vec())) {
            return *v;
        }
        diagram
            .rules
            .iter()
            .filter(|r| r.head.pred == pred)
            .find(|r| self.rule_fires(r, tuple))
            .map(|r| r.value)
            .unwrap_or(default)
    }
}

// ---------------------------------------------------------------------------
// Models

/// One point of reference of a model: congruence classes and the
/// extension of every predicate.
#[derive(Debug, Clone)]
pub(crate) struct PointModel {
    pub(crate) closure: Closure,
    /// pred -> tuple of classes -> value
    pub(crate) table: HashMap<String, HashMap<Vec<usize>, Truth3>>,
    /// pred -> canonical member of its merge group
    pub(crate) merge_root: HashMap<String, String>,
}

impl PointModel {
    fn build(sig: &Signature, generated: &TermUniverse, diagram: &GDiagram) -> Result<PointModel> {
        let closure = Closure::build(generated, diagram, &[]);
        let facts = closure.fact_table(diagram)?;
        let mut table = HashMap::new();
        for pred in &sig.preds {
            let mut ext = HashMap::new();
            let domains: Vec<&[usize]> = pred.arg_sorts.iter().map(|s| closure.elements(s)).collect();
            for tuple in tuples(&domains) {
                let v = closure.value_of(diagram, &facts, &pred.name, &tuple, pred.default.truth());
                ext.insert(tuple, v);
            }
            table.insert(pred.name.clone(), ext);
        }

        // merge groups share one extension
        let names: Vec<&str> = sig.preds.iter().map(|p| p.name.as_str()).collect();
        let pos = |n: &str| names.iter().position(|m| *m == n);
        let mut uf = UnionFind::new(names.len());
        for (p, q) in &diagram.merged {
            let (Some(i), Some(j)) = (pos(p), pos(q)) else {
                return Err(Error::UnknownSymbol(format!("{p} or {q}")));
            };
            if sig.preds[i].arg_sorts != sig.preds[j].arg_sorts {
                return Err(Error::SortMismatch(format!("`{p}` and `{q}` have different argument sorts")));
            }
            uf.union(i, j);
        }
        let mut merge_root = HashMap::new();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..names.len() {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        for members in groups.values() {
            let root = names[members[0]].to_string();
            for &m in members {
                merge_root.insert(names[m].to_string(), root.clone());
            }
            if members.len() < 2 {
                continue;
            }
            let keys: Vec<Vec<usize>> = table[names[members[0]]].keys().cloned().collect();
            for key in keys {
                let mut merged = Truth3::Unknown;
                let mut witness: Option<(&str, Truth3)> = None;
                for &m in members {
                    let v = table[names[m]][&key];
                    if v.is_definite() {
                        if let Some((other, ov)) = witness {
                            if ov != v {
                                let shown: Vec<String> = key.iter().map(|&k| closure.rep(k).to_string()).collect();
                                return Err(Error::Inconsistent(format!(
                                    "merged predicates disagree: {other}({}) is {ov} but {}({}) is {v}",
                                    shown.join(","),
                                    names[m],
                                    shown.join(",")
                                )));
                            }
                        }
                        witness = Some((names[m], v));
                        merged = v;
                    }
                }
                for &m in members {
                    table.get_mut(names[m]).unwrap().insert(key.clone(), merged);
                }
            }
        }
        Ok(PointModel {
            closure,
            table,
            merge_root,
        })
    }
}

/// Cartesian product of class lists, first position slowest.
pub(crate) fn tuples(domains: &[&[usize]]) -> Vec<Vec<usize>> {
    if domains.iter().any(|d| d.is_empty()) {
        return Vec::new();
    }
    let bounds: Vec<usize> = domains.iter().map(|d| d.len()).collect();
    let mut cursor = vec![0; domains.len()];
    let mut out = Vec::new();
    loop {
        out.push(cursor.iter().zip(domains).map(|(&c, d)| d[c]).collect());
        if !crate::signature::advance(&mut cursor, &bounds) {
            return out;
        }
    }
}

/// A canonical model built from a theory's (indexed) diagram at a fixed
/// universe depth, together with the expansion history that produced it.
#[derive(Debug, Clone)]
pub struct Model {
    pub(crate) theory: Arc<Theory>,
    pub(crate) base: Arc<Theory>,
    pub(crate) history: Vec<ExpansionStep>,
    pub(crate) depth: usize,
    pub(crate) points: Vec<PointModel>,
}

/// Builds the canonical model of `theory` over the constructor terms of
/// depth at most `depth`, then checks every axiom over all ground
/// instances. Instances that come out unknown do not block the build.
pub fn build_canonical_model(theory: &Theory, depth: usize) -> Result<Model> {
    let base = Arc::new(theory.clone());
    Model::assemble(base.clone(), base, Vec::new(), depth)
}

impl Model {
    pub(crate) fn assemble(
        theory: Arc<Theory>,
        base: Arc<Theory>,
        history: Vec<ExpansionStep>,
        depth: usize,
    ) -> Result<Model> {
        let sig = &theory.signature;
        let diags = sig.validate();
        if !diags.is_empty() {
            let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(Error::InvalidSignature(msgs.join("; ")));
        }
        let generated = generate_universe(sig, depth, GenLimits::default())?;
        let mut points: Vec<PointModel> = Vec::new();
        for (i, diagram) in theory.diagram.diagrams.iter().enumerate() {
            let same_as = theory.diagram.diagrams[..i].iter().position(|d| d == diagram);
            let pm = match same_as {
                Some(j) => points[j].clone(),
                None => PointModel::build(sig, &generated, diagram).map_err(|e| match e {
                    Error::Inconsistent(msg) if theory.diagram.index.point_count() > 1 => {
                        let at = theory.diagram.index.point_at(i);
                        Error::Inconsistent(format!("{msg} {}", theory.diagram.index.show(at)))
                    }
                    other => other,
                })?,
            };
            points.push(pm);
        }
        let model = Model {
            theory,
            base,
            history,
            depth,
            points,
        };
        model.check_axioms()?;
        Ok(model)
    }

    fn check_axioms(&self) -> Result<()> {
        for axiom in &self.theory.axioms {
            for at in self.index().points() {
                let (v, trace) = eval_formula(self, &axiom.formula, at, EvalMode::Exhaustive)?;
                if v == Truth3::False {
                    let instance = trace.counterexample();
                    let inst = if instance.is_empty() {
                        String::new()
                    } else {
                        let parts: Vec<String> = instance.iter().map(|(v, t)| format!("{v}={t}")).collect();
                        format!(" for {}", parts.join(", "))
                    };
                    return Err(Error::Inconsistent(format!(
                        "axiom `{}` is false at {}{inst}",
                        axiom.formula,
                        self.index().show(at)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.theory.signature
    }

    pub fn index(&self) -> &IndexSet {
        &self.theory.diagram.index
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn base(&self) -> &Theory {
        &self.base
    }

    pub fn history(&self) -> &[ExpansionStep] {
        &self.history
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub(crate) fn point(&self, at: PointOfReference) -> &PointModel {
        &self.points[self.index().flat(at)]
    }

    /// Universe representatives of `sort` at a point, in generation order.
    pub fn universe(&self, sort: &str, at: PointOfReference) -> Vec<Term> {
        let pm = self.point(at);
        pm.closure.elements(sort).iter().map(|&k| pm.closure.rep(k)).collect()
    }

    pub(crate) fn tuple_classes(&self, atom: &Atom, at: PointOfReference) -> Option<Vec<usize>> {
        let pm = self.point(at);
        atom.args.iter().map(|t| pm.closure.universe_class(t)).collect()
    }

    /// Value of a ground atom at a point, through congruence classes.
    pub fn lookup_atom(&self, atom: &Atom, at: PointOfReference) -> Result<Truth3> {
        if !atom.is_ground() {
            return Err(Error::SortMismatch(format!("atom `{atom}` is not ground")));
        }
        atom.check_sorts(self.signature(), &HashMap::new())?;
        let Some(tuple) = self.tuple_classes(atom, at) else {
            return Ok(Truth3::Unknown);
        };
        Ok(self.point(at).table[&atom.pred][&tuple])
    }

    pub fn partial_set(&self, pred: &str, at: PointOfReference) -> Result<PartialSet> {
        let p = self.signature().require_pred(pred)?;
        let pm = self.point(at);
        let domains: Vec<&[usize]> = p.arg_sorts.iter().map(|s| pm.closure.elements(s)).collect();
        let mut set = PartialSet::default();
        for tuple in tuples(&domains) {
            let terms: Vec<Term> = tuple.iter().map(|&k| pm.closure.rep(k)).collect();
            set.order.push(terms.clone());
            match pm.table[pred][&tuple] {
                Truth3::True => set.members.push(terms),
                Truth3::False => set.non_members.push(terms),
                Truth3::Unknown => set.unknowns.push(terms),
            }
        }
        Ok(set)
    }

    /// Every ground atom over universe representatives with its value.
    pub fn atoms(&self, at: PointOfReference) -> Vec<(Atom, Truth3)> {
        let pm = self.point(at);
        let mut out = Vec::new();
        for p in &self.signature().preds {
            let domains: Vec<&[usize]> = p.arg_sorts.iter().map(|s| pm.closure.elements(s)).collect();
            for tuple in tuples(&domains) {
                let args = tuple.iter().map(|&k| pm.closure.rep(k)).collect();
                out.push((Atom::new(&p.name, args), pm.table[&p.name][&tuple]));
            }
        }
        out
    }

    /// Members of the congruence class of `term` at a point, or `None` when
    /// the term does not denote a universe element.
    pub fn congruence_class(&self, term: &Term, at: PointOfReference) -> Option<Vec<Term>> {
        let pm = self.point(at);
        pm.closure.universe_class(term).map(|k| pm.closure.class_members(k))
    }

    pub(crate) fn merge_root(&self, pred: &str, at: PointOfReference) -> String {
        self.point(at)
            .merge_root
            .get(pred)
            .cloned()
            .unwrap_or_else(|| pred.to_string())
    }

    /// Line-oriented `KEY: value` report of the whole model.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let index = self.index();
        out.push_str(&format!("DEPTH: {}\n", self.depth));
        out.push_str(&format!("WORLDS: {}\n", index.worlds.join(" ")));
        out.push_str(&format!("TIMES: {}\n", index.times.join(" ")));
        let multi = index.point_count() > 1;
        let first = index.points().next().expect("index sets are non-empty");
        let uniform_universe = index.points().all(|p| {
            self.signature()
                .sorts
                .iter()
                .all(|s| self.universe(&s.name, p) == self.universe(&s.name, first))
        });
        for at in index.points() {
            if !uniform_universe || at == first {
                for s in &self.signature().sorts {
                    let names: Vec<String> = self.universe(&s.name, at).iter().map(|t| t.to_string()).collect();
                    let tag = if uniform_universe || !multi {
                        String::new()
                    } else {
                        format!(" @{}", index.show(at))
                    };
                    out.push_str(&format!("UNIVERSE {}{tag}: {{{}}}\n", s.name, names.join(", ")));
                }
            }
        }
        for p in &self.signature().preds {
            for at in index.points() {
                let set = self.partial_set(&p.name, at).expect("declared predicate");
                let tag = if multi { format!(" @{}", index.show(at)) } else { String::new() };
                out.push_str(&format!("PRED {}{tag}: {set}\n", p.name));
            }
        }
        out.push_str(&format!("HISTORY: {}\n", self.history.len()));
        out
    }
}

impl Interpretation for Model {
    fn signature(&self) -> &Signature {
        &self.theory.signature
    }

    fn index(&self) -> &IndexSet {
        &self.theory.diagram.index
    }

    fn domain(&self, sort: &str, at: PointOfReference) -> Result<Vec<Term>> {
        self.theory.signature.require_sort(sort)?;
        Ok(self.universe(sort, at))
    }

    fn atom_value(&self, atom: &Atom, at: PointOfReference) -> Result<Truth3> {
        let Some(tuple) = self.tuple_classes(atom, at) else {
            return Ok(Truth3::Unknown);
        };
        self.point(at)
            .table
            .get(&atom.pred)
            .and_then(|ext| ext.get(&tuple))
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(atom.pred.clone()))
    }

    fn equal_terms(&self, lhs: &Term, rhs: &Term, at: PointOfReference) -> Result<Truth3> {
        let pm = self.point(at);
        Ok(match (pm.closure.universe_class(lhs), pm.closure.universe_class(rhs)) {
            (Some(a), Some(b)) => Truth3::from_bool(a == b),
            _ => Truth3::Unknown,
        })
    }
}
