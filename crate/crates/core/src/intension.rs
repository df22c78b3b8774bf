//! Intensional models: worlds and times, individual concepts, sets and
//! properties of concepts, and a meaning function from symbols to
//! denotations.
//!
//! An intensional model is evaluated directly, and it can also be flattened
//! into one generalized diagram per point of reference
//! ([`as_indexed_diagrams`]); both routes agree atom for atom.

use std::collections::HashMap;

use crate::diagram::{Atom, GDiagram};
use crate::error::{Error, Result};
use crate::evaluate::{Interpretation, PointOfReference};
use crate::signature::{DefaultTruth, Signature, Term};
use crate::truth::Truth3;

pub const ENTITY_SORT: &str = "entity";
pub const CONCEPT_SORT: &str = "concept";
/// Extension of an individual concept at the current point.
pub const EXTENSION_FN: &str = "ext";

/// Worlds and times. Times are totally ordered by declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    pub worlds: Vec<String>,
    pub times: Vec<String>,
}

impl Default for IndexSet {
    fn default() -> Self {
        IndexSet::single()
    }
}

impl IndexSet {
    pub fn new(worlds: &[&str], times: &[&str]) -> Result<Self> {
        let set = IndexSet {
            worlds: worlds.iter().map(|s| s.to_string()).collect(),
            times: times.iter().map(|s| s.to_string()).collect(),
        };
        set.validate()?;
        Ok(set)
    }

    /// One world `w0`, one time `t0`: the index of a purely extensional model.
    pub fn single() -> Self {
        IndexSet {
            worlds: vec!["w0".to_string()],
            times: vec!["t0".to_string()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.worlds.is_empty() || self.times.is_empty() {
            return Err(Error::Declaration("worlds and times must be non-empty".into()));
        }
        for list in [&self.worlds, &self.times] {
            for (i, w) in list.iter().enumerate() {
                if list[..i].contains(w) {
                    return Err(Error::DuplicateName(w.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.worlds.len() * self.times.len()
    }

    pub fn flat(&self, at: PointOfReference) -> usize {
        at.world * self.times.len() + at.time
    }

    pub fn point_at(&self, flat: usize) -> PointOfReference {
        PointOfReference::new(flat / self.times.len(), flat % self.times.len())
    }

    /// All points, world-major.
    pub fn points(&self) -> impl Iterator<Item = PointOfReference> + '_ {
        (0..self.point_count()).map(|i| self.point_at(i))
    }

    pub fn world_index(&self, name: &str) -> Result<usize> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn time_index(&self, name: &str) -> Result<usize> {
        self.times
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn point(&self, world: &str, time: &str) -> Result<PointOfReference> {
        Ok(PointOfReference::new(self.world_index(world)?, self.time_index(time)?))
    }

    /// `(I1,0)`
    pub fn show(&self, at: PointOfReference) -> String {
        format!("({},{})", self.worlds[at.world], self.times[at.time])
    }
}

/// One generalized diagram per point of reference, all over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedDiagram {
    pub index: IndexSet,
    /// Indexed by [`IndexSet::flat`].
    pub diagrams: Vec<GDiagram>,
}

impl IndexedDiagram {
    /// The same diagram at every point.
    pub fn uniform(index: IndexSet, diagram: GDiagram) -> Self {
        let diagrams = vec![diagram; index.point_count()];
        IndexedDiagram { index, diagrams }
    }

    pub fn at(&self, at: PointOfReference) -> &GDiagram {
        &self.diagrams[self.index.flat(at)]
    }

    pub fn at_mut(&mut self, at: PointOfReference) -> &mut GDiagram {
        let i = self.index.flat(at);
        &mut self.diagrams[i]
    }
}

/// A total map from points of reference to entities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndividualConcept {
    pub name: String,
    /// Entity per point, indexed by [`IndexSet::flat`].
    pub graph: Vec<String>,
}

impl IndividualConcept {
    pub fn at(&self, index: &IndexSet, at: PointOfReference) -> &str {
        &self.graph[index.flat(at)]
    }
}

/// Every total map from the points of `refs` to `entities`, named by
/// concatenating the entity names along the points and appending `IC`
/// (so `NI` at I1 and `HU` at I2 gives `NIHUIC`). The first point varies
/// slowest.
pub fn list_individual_concepts(entities: &[String], refs: &IndexSet, limit: usize) -> Result<Vec<IndividualConcept>> {
    if entities.is_empty() {
        return Err(Error::Declaration("no entities".into()));
    }
    let n = refs.point_count();
    let count = (entities.len() as u128).checked_pow(n as u32);
    match count {
        Some(c) if c <= limit as u128 => {}
        _ => {
            return Err(Error::ResourceLimit(format!(
                "{}^{n} individual concepts exceed the bound {limit}",
                entities.len()
            )))
        }
    }
    let bounds = vec![entities.len(); n];
    let mut cursor = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let graph: Vec<String> = cursor.iter().map(|&i| entities[i].clone()).collect();
        out.push(IndividualConcept {
            name: format!("{}IC", graph.concat()),
            graph,
        });
        if !crate::signature::advance(&mut cursor, &bounds) {
            return Ok(out);
        }
    }
}

/// A world-independent set of concepts; `unknown` members are written with
/// a trailing `?`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptSet {
    pub name: String,
    pub members: Vec<(String, bool)>,
}

impl ConceptSet {
    pub fn membership(&self, concept: &str) -> Truth3 {
        match self.members.iter().find(|(c, _)| c == concept) {
            Some((_, true)) => Truth3::Unknown,
            Some((_, false)) => Truth3::True,
            None => Truth3::False,
        }
    }
}

/// A concept set per point of reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub name: String,
    /// Set name per point, indexed by [`IndexSet::flat`].
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denotation {
    Entity(String),
    Concept(String),
    Set(String),
    Property(String),
}

/// Symbol to denotation. Properties are world-indexed in themselves, so
/// [`MeaningFunction::at`] resolves a symbol at a point to an entity, a
/// concept, or a concept set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeaningFunction {
    pub entries: Vec<(String, Denotation)>,
}

impl MeaningFunction {
    pub fn get(&self, symbol: &str) -> Option<&Denotation> {
        self.entries.iter().find(|(s, _)| s == symbol).map(|(_, d)| d)
    }
}

/// Declarations an intensional model is built from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntensionalDecl {
    pub index: IndexSet,
    pub entities: Vec<String>,
    /// Concept name and its entity at each point (world-major, as for
    /// [`IndexSet::flat`]); `None` marks a point left undefined.
    pub concepts: Vec<(String, Vec<Option<String>>)>,
    pub sets: Vec<ConceptSet>,
    /// Property name and its set name per point; `None` marks a missing point.
    pub properties: Vec<(String, Vec<Option<String>>)>,
    pub meaning: MeaningFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntensionalModel {
    pub index: IndexSet,
    pub entities: Vec<String>,
    pub concepts: Vec<IndividualConcept>,
    pub sets: Vec<ConceptSet>,
    pub properties: Vec<Property>,
    pub meaning: MeaningFunction,
    signature: Signature,
}

/// Checks the declarations and synthesizes the model's signature: sorts
/// `entity` and `concept`, entities and concepts as constructor constants,
/// `ext : concept -> entity`, one predicate per set and property, and the
/// meaning function's symbols as aliases.
pub fn build_intensional_model(decl: IntensionalDecl) -> Result<IntensionalModel> {
    decl.index.validate()?;
    let index = decl.index;
    let fresh = |n: &str, names: &mut Vec<String>| -> Result<()> {
        if names.iter().any(|m| m == n) {
            return Err(Error::DuplicateName(n.to_string()));
        }
        names.push(n.to_string());
        Ok(())
    };
    let mut taken: Vec<String> = vec![EXTENSION_FN.to_string()];

    if decl.entities.is_empty() {
        return Err(Error::Declaration("an intensional model needs at least one entity".into()));
    }
    for e in &decl.entities {
        fresh(e, &mut taken)?;
    }
    let mut concepts = Vec::new();
    for (name, graph) in &decl.concepts {
        fresh(name, &mut taken)?;
        if graph.len() != index.point_count() {
            return Err(Error::Declaration(format!("concept `{name}` has the wrong number of points")));
        }
        let mut total = Vec::new();
        for (i, e) in graph.iter().enumerate() {
            let e = e.as_ref().ok_or_else(|| {
                Error::Declaration(format!(
                    "concept `{name}` is undefined at {}",
                    index.show(index.point_at(i))
                ))
            })?;
            if !decl.entities.contains(e) {
                return Err(Error::UnknownSymbol(e.clone()));
            }
            total.push(e.clone());
        }
        concepts.push(IndividualConcept {
            name: name.clone(),
            graph: total,
        });
    }
    let is_concept = |c: &str| concepts.iter().any(|k: &IndividualConcept| k.name == c);
    for set in &decl.sets {
        fresh(&set.name, &mut taken)?;
        for (c, _) in &set.members {
            if !is_concept(c) {
                return Err(Error::Declaration(format!(
                    "set `{}` refers to undeclared concept `{c}`",
                    set.name
                )));
            }
        }
    }
    let mut properties = Vec::new();
    for (name, per_point) in &decl.properties {
        fresh(name, &mut taken)?;
        let mut sets = Vec::new();
        for (i, s) in per_point.iter().enumerate() {
            let s = s.as_ref().ok_or_else(|| {
                Error::Declaration(format!(
                    "property `{name}` has no set at {}",
                    index.show(index.point_at(i))
                ))
            })?;
            if !decl.sets.iter().any(|k| &k.name == s) {
                return Err(Error::Declaration(format!("property `{name}` refers to undeclared set `{s}`")));
            }
            sets.push(s.clone());
        }
        properties.push(Property { name: name.clone(), sets });
    }
    for (sym, d) in &decl.meaning.entries {
        fresh(sym, &mut taken)?;
        let ok = match d {
            Denotation::Entity(e) => decl.entities.contains(e),
            Denotation::Concept(c) => is_concept(c),
            Denotation::Set(s) => decl.sets.iter().any(|k| &k.name == s),
            Denotation::Property(p) => properties.iter().any(|k| &k.name == p),
        };
        if !ok {
            return Err(Error::Declaration(format!("meaning of `{sym}` refers to an undeclared object")));
        }
    }

    let mut sig = Signature::new();
    sig.add_sort(ENTITY_SORT).add_sort(CONCEPT_SORT);
    for e in &decl.entities {
        sig.add_const(e, ENTITY_SORT);
    }
    for c in &concepts {
        sig.add_const(&c.name, CONCEPT_SORT);
    }
    sig.add_func(EXTENSION_FN, &[CONCEPT_SORT], ENTITY_SORT, false);
    for (sym, d) in &decl.meaning.entries {
        match d {
            Denotation::Entity(_) => {
                sig.add_func(sym, &[], ENTITY_SORT, false);
            }
            Denotation::Concept(_) => {
                sig.add_func(sym, &[], CONCEPT_SORT, false);
            }
            Denotation::Set(_) | Denotation::Property(_) => {}
        }
    }
    for s in &decl.sets {
        sig.add_pred(&s.name, &[CONCEPT_SORT], DefaultTruth::False);
    }
    for p in &properties {
        sig.add_pred(&p.name, &[CONCEPT_SORT], DefaultTruth::False);
    }
    for (sym, d) in &decl.meaning.entries {
        if matches!(d, Denotation::Set(_) | Denotation::Property(_)) {
            sig.add_pred(sym, &[CONCEPT_SORT], DefaultTruth::False);
        }
    }

    Ok(IntensionalModel {
        index,
        entities: decl.entities,
        concepts,
        sets: decl.sets,
        properties,
        meaning: decl.meaning,
        signature: sig,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Entity(String),
    Concept(String),
}

impl IntensionalModel {
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn concept(&self, name: &str) -> Option<&IndividualConcept> {
        self.concepts.iter().find(|c| c.name == name)
    }

    fn set(&self, name: &str) -> Option<&ConceptSet> {
        self.sets.iter().find(|s| s.name == name)
    }

    /// The concept set a predicate symbol denotes at a point.
    pub fn set_at(&self, pred: &str, at: PointOfReference) -> Option<&ConceptSet> {
        if let Some(s) = self.set(pred) {
            return Some(s);
        }
        if let Some(p) = self.properties.iter().find(|p| p.name == pred) {
            return self.set(&p.sets[self.index.flat(at)]);
        }
        match self.meaning.get(pred)? {
            Denotation::Set(s) => self.set(s),
            Denotation::Property(p) => self.set_at(p, at),
            _ => None,
        }
    }

    fn value(&self, t: &Term, at: PointOfReference) -> Option<Value> {
        let name = t.func_name()?;
        if t.args.is_empty() {
            if self.entities.iter().any(|e| e == name) {
                return Some(Value::Entity(name.to_string()));
            }
            if self.concept(name).is_some() {
                return Some(Value::Concept(name.to_string()));
            }
            return match self.meaning.get(name)? {
                Denotation::Entity(e) => Some(Value::Entity(e.clone())),
                Denotation::Concept(c) => Some(Value::Concept(c.clone())),
                _ => None,
            };
        }
        if name == EXTENSION_FN && t.args.len() == 1 {
            if let Some(Value::Concept(c)) = self.value(&t.args[0], at) {
                return Some(Value::Entity(self.concept(&c)?.at(&self.index, at).to_string()));
            }
        }
        None
    }
}

impl Interpretation for IntensionalModel {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn index(&self) -> &IndexSet {
        &self.index
    }

    fn domain(&self, sort: &str, _at: PointOfReference) -> Result<Vec<Term>> {
        match sort {
            ENTITY_SORT => Ok(self.entities.iter().map(|e| Term::constant(e)).collect()),
            CONCEPT_SORT => Ok(self.concepts.iter().map(|c| Term::constant(&c.name)).collect()),
            other => Err(Error::UnknownSort(other.to_string())),
        }
    }

    fn atom_value(&self, atom: &Atom, at: PointOfReference) -> Result<Truth3> {
        let set = self
            .set_at(&atom.pred, at)
            .ok_or_else(|| Error::UnknownSymbol(atom.pred.clone()))?;
        match atom.args.as_slice() {
            [arg] => Ok(match self.value(arg, at) {
                Some(Value::Concept(c)) => set.membership(&c),
                _ => Truth3::Unknown,
            }),
            _ => Err(Error::SortMismatch(format!("`{}` takes one argument", atom.pred))),
        }
    }

    fn equal_terms(&self, lhs: &Term, rhs: &Term, at: PointOfReference) -> Result<Truth3> {
        Ok(match (self.value(lhs, at), self.value(rhs, at)) {
            (Some(a), Some(b)) => Truth3::from_bool(a == b),
            _ => Truth3::Unknown,
        })
    }
}

/// One generalized diagram per point of reference: membership facts for
/// every set-valued predicate, `ext(c) = e` equations for every concept, and
/// one equation per meaning constant.
pub fn as_indexed_diagrams(model: &IntensionalModel) -> IndexedDiagram {
    let mut diagrams = Vec::with_capacity(model.index.point_count());
    for at in model.index.points() {
        let mut d = GDiagram::default();
        for pred in &model.signature.preds {
            let set = model.set_at(&pred.name, at).expect("synthesized predicates resolve");
            for c in &model.concepts {
                let v = set.membership(&c.name);
                if v != Truth3::False {
                    d.facts.push((Atom::new(&pred.name, vec![Term::constant(&c.name)]), v));
                }
            }
        }
        for c in &model.concepts {
            d.equations.push((
                Term::app(EXTENSION_FN, vec![Term::constant(&c.name)]),
                Term::constant(c.at(&model.index, at)),
            ));
        }
        for (sym, den) in &model.meaning.entries {
            let target = match den {
                Denotation::Entity(e) | Denotation::Concept(e) => e,
                _ => continue,
            };
            d.equations.push((Term::constant(sym), Term::constant(target)));
        }
        diagrams.push(d);
    }
    IndexedDiagram {
        index: model.index.clone(),
        diagrams,
    }
}

pub const CONCEPT_LIMIT: usize = 10_000;

/// Convenience lookup used by reports: entity denoted by each concept.
pub fn concept_table(model: &IntensionalModel) -> HashMap<String, Vec<String>> {
    model
        .concepts
        .iter()
        .map(|c| (c.name.clone(), c.graph.clone()))
        .collect()
}
