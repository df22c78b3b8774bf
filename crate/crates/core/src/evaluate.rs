//! Three-valued evaluation at points of reference.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::diagram::Atom;
use crate::error::{Error, Result};
use crate::formula::{Formula, ModalOp};
use crate::intension::IndexSet;
use crate::signature::{Signature, Term};
use crate::truth::Truth3;

/// A (world, time) pair, both as indices into the model's [`IndexSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointOfReference {
    pub world: usize,
    pub time: usize,
}

impl PointOfReference {
    pub const ORIGIN: PointOfReference = PointOfReference { world: 0, time: 0 };

    pub fn new(world: usize, time: usize) -> Self {
        PointOfReference { world, time }
    }
}

/// How existential quantifiers are decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EvalMode {
    /// Instantiate a single Skolem witness: the first universe term of the
    /// sort, in generation order, not yet used as a witness during this
    /// evaluation.
    #[default]
    Paper,
    /// Search every universe element.
    Exhaustive,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::Paper => "paper",
            EvalMode::Exhaustive => "exhaustive",
        }
    }
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(EvalMode::Paper),
            "exhaustive" => Ok(EvalMode::Exhaustive),
            other => Err(Error::Command(format!("unknown mode `{other}` (paper|exhaustive)"))),
        }
    }
}

/// What evaluation needs from a model.
pub trait Interpretation {
    fn signature(&self) -> &Signature;
    fn index(&self) -> &IndexSet;
    /// Universe elements of `sort` at `at`, as representative terms in
    /// generation order.
    fn domain(&self, sort: &str, at: PointOfReference) -> Result<Vec<Term>>;
    fn atom_value(&self, atom: &Atom, at: PointOfReference) -> Result<Truth3>;
    fn equal_terms(&self, lhs: &Term, rhs: &Term, at: PointOfReference) -> Result<Truth3>;
}

/// Evaluation tree: one node per evaluated subformula instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalTrace {
    pub value: Truth3,
    pub formula: Formula,
    pub at: PointOfReference,
    /// Existentials: the chosen or found witness. Universals: the first
    /// instance that is not true.
    pub witness: Option<Term>,
    pub children: Vec<EvalTrace>,
}

impl EvalTrace {
    /// `<value> <formula> @(world,time) [witness=t]`, children indented by
    /// two spaces per level.
    pub fn render(&self, index: &IndexSet) -> String {
        let mut out = String::new();
        self.render_into(index, 0, &mut out);
        out
    }

    fn render_into(&self, index: &IndexSet, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        let _ = write!(out, "{} {} @{}", self.value, self.formula, index.show(self.at));
        if let Some(w) = &self.witness {
            let _ = write!(out, " [witness={w}]");
        }
        out.push('\n');
        for c in &self.children {
            c.render_into(index, depth + 1, out);
        }
    }

    /// The first unknown atom responsible for an unknown value, following
    /// unknown children in order.
    pub fn first_blocking_atom(&self) -> Option<(Atom, PointOfReference)> {
        if self.value != Truth3::Unknown {
            return None;
        }
        if let Formula::Atom(a) = &self.formula {
            return Some((a.clone(), self.at));
        }
        self.children.iter().find_map(EvalTrace::first_blocking_atom)
    }

    /// Quantifier instantiations along the path of first false children,
    /// naming the ground instance that makes a formula false.
    pub fn counterexample(&self) -> Vec<(String, Term)> {
        let mut out = Vec::new();
        let mut node = self;
        loop {
            if let (Formula::Forall { var, .. } | Formula::Exists { var, .. }, Some(w)) = (&node.formula, &node.witness) {
                out.push((var.clone(), w.clone()));
            }
            match node.children.iter().find(|c| c.value == node.value) {
                Some(c) => node = c,
                None => return out,
            }
        }
    }

    /// Checks that every node's value follows from its children's values.
    pub fn is_sound(&self, mode: EvalMode) -> bool {
        let kids: Vec<Truth3> = self.children.iter().map(|c| c.value).collect();
        let local = match &self.formula {
            Formula::Atom(_) | Formula::Equation(..) => kids.is_empty(),
            Formula::Not(_) => kids.len() == 1 && self.value == !kids[0],
            Formula::And(..) => kids.len() == 2 && self.value == (kids[0] & kids[1]),
            Formula::Or(..) => kids.len() == 2 && self.value == (kids[0] | kids[1]),
            Formula::Implies(..) => kids.len() == 2 && self.value == kids[0].implies(kids[1]),
            Formula::Forall { .. } | Formula::Modal(ModalOp::Nec, _) => {
                self.value == kids.iter().fold(Truth3::True, |a, &b| a & b)
            }
            Formula::Exists { .. } if mode == EvalMode::Paper => kids.len() == 1 && self.value == kids[0],
            Formula::Exists { .. } | Formula::Modal(..) => {
                self.value == kids.iter().fold(Truth3::False, |a, &b| a | b)
            }
        };
        local && self.children.iter().all(|c| c.is_sound(mode))
    }
}

/// Evaluation state for one run: the mode and the Skolem witnesses
/// already handed out.
pub struct Evaluator<'a, I: Interpretation + ?Sized> {
    interp: &'a I,
    mode: EvalMode,
    used_witnesses: Vec<Term>,
}

impl<'a, I: Interpretation + ?Sized> Evaluator<'a, I> {
    pub fn new(interp: &'a I, mode: EvalMode) -> Self {
        Evaluator {
            interp,
            mode,
            used_witnesses: Vec::new(),
        }
    }

    pub fn used_witnesses(&self) -> &[Term] {
        &self.used_witnesses
    }

    fn check_point(&self, at: PointOfReference) -> Result<()> {
        let index = self.interp.index();
        if at.world >= index.worlds.len() || at.time >= index.times.len() {
            return Err(Error::UnknownPoint(format!("({}, {})", at.world, at.time)));
        }
        Ok(())
    }

    pub fn eval(&mut self, f: &Formula, at: PointOfReference) -> Result<EvalTrace> {
        self.check_point(at)?;
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(Error::UnboundVariable(v));
        }
        self.node(f, at)
    }

    fn leaf(f: &Formula, at: PointOfReference, value: Truth3) -> EvalTrace {
        EvalTrace {
            value,
            formula: f.clone(),
            at,
            witness: None,
            children: Vec::new(),
        }
    }

    fn node(&mut self, f: &Formula, at: PointOfReference) -> Result<EvalTrace> {
        let mut trace = match f {
            Formula::Atom(a) => Self::leaf(f, at, self.interp.atom_value(a, at)?),
            Formula::Equation(l, r) => Self::leaf(f, at, self.interp.equal_terms(l, r, at)?),
            Formula::Not(g) => {
                let c = self.node(g, at)?;
                EvalTrace {
                    value: !c.value,
                    children: vec![c],
                    ..Self::leaf(f, at, Truth3::Unknown)
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let l = self.node(a, at)?;
                let r = self.node(b, at)?;
                let value = match f {
                    Formula::And(..) => l.value & r.value,
                    Formula::Or(..) => l.value | r.value,
                    _ => l.value.implies(r.value),
                };
                EvalTrace {
                    value,
                    children: vec![l, r],
                    ..Self::leaf(f, at, Truth3::Unknown)
                }
            }
            Formula::Forall { var, sort, body } => {
                let domain = self.nonempty_domain(sort, at)?;
                let mut children = Vec::with_capacity(domain.len());
                let mut value = Truth3::True;
                let mut witness = None;
                for t in &domain {
                    let c = self.node(&body.subst(var, t), at)?;
                    if c.value != Truth3::True && (witness.is_none() || c.value < value) {
                        witness = Some(t.clone());
                    }
                    value = value & c.value;
                    children.push(c);
                }
                EvalTrace {
                    value,
                    formula: f.clone(),
                    at,
                    witness,
                    children,
                }
            }
            Formula::Exists { var, sort, body } => {
                let domain = self.nonempty_domain(sort, at)?;
                match self.mode {
                    EvalMode::Paper => {
                        let w = self.pick_witness(&domain);
                        let c = self.node(&body.subst(var, &w), at)?;
                        EvalTrace {
                            value: c.value,
                            formula: f.clone(),
                            at,
                            witness: Some(w),
                            children: vec![c],
                        }
                    }
                    EvalMode::Exhaustive => {
                        let mut children = Vec::with_capacity(domain.len());
                        let mut value = Truth3::False;
                        let mut witness = None;
                        for t in &domain {
                            let c = self.node(&body.subst(var, t), at)?;
                            if c.value == Truth3::True && witness.is_none() {
                                witness = Some(t.clone());
                            }
                            value = value | c.value;
                            children.push(c);
                        }
                        EvalTrace {
                            value,
                            formula: f.clone(),
                            at,
                            witness,
                            children,
                        }
                    }
                }
            }
            Formula::Modal(op, body) => {
                let (value, children) = self.modal(*op, body, at)?;
                EvalTrace {
                    value,
                    children,
                    ..Self::leaf(f, at, Truth3::Unknown)
                }
            }
        };
        trace.at = at;
        Ok(trace)
    }

    fn nonempty_domain(&self, sort: &str, at: PointOfReference) -> Result<Vec<Term>> {
        let domain = self.interp.domain(sort, at)?;
        if domain.is_empty() {
            return Err(Error::UninhabitedSort(sort.to_string()));
        }
        Ok(domain)
    }

    fn pick_witness(&mut self, domain: &[Term]) -> Term {
        let w = domain
            .iter()
            .find(|t| !self.used_witnesses.contains(t))
            .unwrap_or(&domain[0])
            .clone();
        if !self.used_witnesses.contains(&w) {
            self.used_witnesses.push(w.clone());
        }
        w
    }

    fn modal(&mut self, op: ModalOp, body: &Formula, at: PointOfReference) -> Result<(Truth3, Vec<EvalTrace>)> {
        let times = self.interp.index().times.len();
        let range: Vec<usize> = match op {
            ModalOp::Nec => (0..times).collect(),
            ModalOp::Past => (0..at.time).collect(),
            ModalOp::Fut => (at.time + 1..times).collect(),
        };
        let mut value = if op == ModalOp::Nec { Truth3::True } else { Truth3::False };
        let mut children = Vec::with_capacity(range.len());
        for t in range {
            let c = self.node(body, PointOfReference::new(at.world, t))?;
            value = if op == ModalOp::Nec { value & c.value } else { value | c.value };
            children.push(c);
        }
        Ok((value, children))
    }
}

/// Evaluates a closed formula at a point of reference.
pub fn eval_formula<I: Interpretation + ?Sized>(
    interp: &I,
    f: &Formula,
    at: PointOfReference,
    mode: EvalMode,
) -> Result<(Truth3, EvalTrace)> {
    let trace = Evaluator::new(interp, mode).eval(f, at)?;
    Ok((trace.value, trace))
}

/// Replaces the head existential of `f` by its Skolem witness: the first
/// universe term of the bound sort in generation order.
pub fn skolemize_existential<I: Interpretation + ?Sized>(
    f: &Formula,
    interp: &I,
    at: PointOfReference,
) -> Result<(Formula, Term)> {
    let Formula::Exists { var, sort, body } = f else {
        return Err(Error::Command(format!("`{f}` is not an existential")));
    };
    let domain = interp.domain(sort, at)?;
    let witness = domain
        .first()
        .cloned()
        .ok_or_else(|| Error::UninhabitedSort(sort.clone()))?;
    Ok((body.subst(var, &witness), witness))
}

/// `Nec` is the Kleene conjunction over every time of the current world;
/// `Past` and `Fut` are Kleene disjunctions over strictly earlier and later
/// times of the current world.
pub fn eval_modal<I: Interpretation + ?Sized>(
    interp: &I,
    op: ModalOp,
    body: &Formula,
    at: PointOfReference,
    mode: EvalMode,
) -> Result<Truth3> {
    let f = Formula::modal(op, body.clone());
    Ok(Evaluator::new(interp, mode).eval(&f, at)?.value)
}

/// Worlds (by index) where `f` is true at `time`. In paper mode the Skolem
/// witness bookkeeping carries across the worlds, visited in order.
pub fn truth_set<I: Interpretation + ?Sized>(
    interp: &I,
    f: &Formula,
    time: usize,
    mode: EvalMode,
) -> Result<BTreeSet<usize>> {
    let mut ev = Evaluator::new(interp, mode);
    let mut out = BTreeSet::new();
    for world in 0..interp.index().worlds.len() {
        if ev.eval(f, PointOfReference::new(world, time))?.value == Truth3::True {
            out.insert(world);
        }
    }
    Ok(out)
}
