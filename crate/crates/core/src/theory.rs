//! Theory files: declarations, diagram clauses and axioms.
//!
//! One clause per line, `#` starts a comment.
//!
//! ```text
//! sort block table
//! const A B C : block
//! func put : block block table -> table constructor
//! func j : -> entity
//! pred top : block block table default false
//! fact walk(J) = true
//! fact rain(W0) = true @ I1 0
//! rule top(x,y,z) = true when z = put(x,y,Tab0)
//! equal j J
//! axiom forall u:entity . (man(u) -> mortal(u))
//! family P = Pm:man Pw:walk
//! worlds I1 I2
//! times 0 1
//! entity NI HU
//! concept NIHUIC = I1:NI I2:HU
//! conceptset PRICE2 = NINIIC? HUNIIC
//! property price = I1:PRICE1 I2:PRICE2
//! meaning n = NINIIC
//! ```
//!
//! `entity`, `concept`, `conceptset`, `property` and `meaning` make the
//! theory intensional; its signature is then synthesized and `sort`,
//! `const`, `func`, `pred`, `fact`, `rule` and `equal` are rejected.

use std::collections::HashMap;

use crate::diagram::{Atom, DiagramRule, GDiagram};
use crate::error::{Error, Result};
use crate::formula::{Formula, IndexedFunctionFamily, Parser, Tok};
use crate::intension::{
    as_indexed_diagrams, build_intensional_model, ConceptSet, Denotation, IndexSet, IndexedDiagram,
    IntensionalDecl, IntensionalModel, MeaningFunction,
};
use crate::signature::{DefaultTruth, Head, Signature, Term};
use crate::truth::Truth3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub source: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub diagram: IndexedDiagram,
    pub axioms: Vec<Axiom>,
    pub families: Vec<IndexedFunctionFamily>,
    pub intension: Option<IntensionalModel>,
}

impl Theory {
    /// A single-point theory with no axioms.
    pub fn from_diagram(signature: Signature, diagram: GDiagram) -> Theory {
        Theory {
            signature,
            diagram: IndexedDiagram::uniform(IndexSet::single(), diagram),
            axioms: Vec::new(),
            families: Vec::new(),
            intension: None,
        }
    }

    pub fn from_intensional(model: IntensionalModel) -> Theory {
        Theory {
            signature: model.signature().clone(),
            diagram: as_indexed_diagrams(&model),
            axioms: Vec::new(),
            families: Vec::new(),
            intension: Some(model),
        }
    }

    pub fn index(&self) -> &IndexSet {
        &self.diagram.index
    }

    pub fn family(&self, name: &str) -> Option<&IndexedFunctionFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn parse(text: &str) -> Result<Theory> {
        parse_theory(text)
    }
}

const EXTENSIONAL: [&str; 7] = ["sort", "const", "func", "pred", "fact", "rule", "equal"];
const INTENSIONAL: [&str; 5] = ["entity", "concept", "conceptset", "property", "meaning"];

struct Line<'t> {
    number: usize,
    text: &'t str,
    keyword: &'t str,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let text = raw.split('#').next().unwrap_or("");
            let keyword = text.split_whitespace().next()?;
            Some(Line {
                number: i + 1,
                text,
                keyword,
            })
        })
        .collect()
}

fn located(line: &Line<'_>, e: Error) -> Error {
    match e {
        Error::Syntax { .. } => e,
        Error::SortMismatch(m) => Error::SortMismatch(format!("{m} (line {})", line.number)),
        Error::Declaration(m) => Error::Declaration(format!("{m} (line {})", line.number)),
        other => other,
    }
}

/// Skips the clause keyword.
fn clause<'s>(line: &Line<'_>, sig: &'s Signature) -> Result<Parser<'s>> {
    let mut p = Parser::new(line.text, line.number, sig)?;
    p.ident()?;
    Ok(p)
}

fn idents_until(p: &mut Parser<'_>, stop: &[Tok]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    while !p.at_end() && !stop.contains(p.peek()) {
        out.push(p.ident()?);
    }
    Ok(out)
}

fn truth_value(p: &mut Parser<'_>) -> Result<Truth3> {
    let word = p.ident()?;
    match word.as_str() {
        "true" => Ok(Truth3::True),
        "false" => Ok(Truth3::False),
        "unknown" => Ok(Truth3::Unknown),
        _ => Err(p.error(format!("expected true, false or unknown, found `{word}`"))),
    }
}

/// `W:X` or `W@T:X` entries, resolved against the index. Later entries
/// override earlier ones.
fn point_entries(p: &mut Parser<'_>, index: &IndexSet, what: &str) -> Result<Vec<Option<String>>> {
    let mut out = vec![None; index.point_count()];
    while !p.at_end() {
        let world = p.ident()?;
        let w = index.world_index(&world)?;
        let times: Vec<usize> = if p.eat(&Tok::At) {
            vec![index.time_index(&p.ident()?)?]
        } else {
            (0..index.times.len()).collect()
        };
        p.expect(Tok::Colon)?;
        let value = p.ident()?;
        for t in times {
            out[w * index.times.len() + t] = Some(value.clone());
        }
    }
    if out.iter().all(|v| v.is_none()) {
        return Err(p.error(format!("{what} needs at least one `world:value` entry")));
    }
    Ok(out)
}

/// Sorts of the variables of a rule, read off the head's argument positions
/// and the function symbols they occur under.
fn infer_vars(t: &Term, want: &str, sig: &Signature, sorts: &mut HashMap<String, String>) -> Result<()> {
    match &t.head {
        Head::Var(v) => match sorts.get(v) {
            Some(s) if s != want => Err(Error::SortMismatch(format!(
                "variable `{v}` used at sorts {s} and {want}"
            ))),
            Some(_) => Ok(()),
            None => {
                sorts.insert(v.clone(), want.to_string());
                Ok(())
            }
        },
        Head::Func(name) => {
            let f = sig.func(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            if f.arity() != t.args.len() {
                return Err(Error::SortMismatch(format!(
                    "`{name}` expects {} arguments, got {}",
                    f.arity(),
                    t.args.len()
                )));
            }
            if f.result_sort != want {
                return Err(Error::SortMismatch(format!(
                    "`{t}` has sort {}, expected {want}",
                    f.result_sort
                )));
            }
            for (a, s) in t.args.iter().zip(&f.arg_sorts) {
                infer_vars(a, s, sig, sorts)?;
            }
            Ok(())
        }
    }
}

fn parse_rule(line: &Line<'_>, sig: &Signature) -> Result<DiagramRule> {
    let mut p = clause(line, sig)?;
    p.free_vars = true;
    let raw = p.raw_term()?;
    let head = p.resolve_atom(&raw)?;
    p.expect(Tok::Eq)?;
    let value = truth_value(&mut p)?;
    let mut guards = Vec::new();
    if !p.at_end() {
        let kw = p.ident()?;
        if kw != "when" {
            return Err(p.error(format!("expected `when`, found `{kw}`")));
        }
        loop {
            let l = p.raw_term()?;
            p.expect(Tok::Eq)?;
            let r = p.raw_term()?;
            guards.push((p.resolve_term(&l)?, p.resolve_term(&r)?));
            if !p.eat(&Tok::Amp) {
                break;
            }
        }
        p.expect_end()?;
    }

    let pred = sig.require_pred(&head.pred)?;
    if pred.arg_sorts.len() != head.args.len() {
        return Err(Error::SortMismatch(format!("`{}` expects {} arguments", pred.name, pred.arg_sorts.len())));
    }
    let mut sorts = HashMap::new();
    for (a, s) in head.args.iter().zip(&pred.arg_sorts) {
        infer_vars(a, s, sig, &mut sorts)?;
    }
    // a guard side headed by a function fixes the sort of both sides
    let mut pending: Vec<&(Term, Term)> = guards.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for g in pending {
            let side_sort = |t: &Term| match &t.head {
                Head::Var(v) => sorts.get(v).cloned(),
                Head::Func(f) => sig.func(f).map(|f| f.result_sort.clone()),
            };
            match side_sort(&g.0).or_else(|| side_sort(&g.1)) {
                Some(s) => {
                    infer_vars(&g.0, &s, sig, &mut sorts)?;
                    infer_vars(&g.1, &s, sig, &mut sorts)?;
                }
                None => rest.push(g),
            }
        }
        if rest.len() == before {
            return Err(Error::Declaration(format!("cannot infer the sort of `{} = {}`", rest[0].0, rest[0].1)));
        }
        pending = rest;
    }
    Ok(DiagramRule { head, guards, value })
}

fn parse_fact(line: &Line<'_>, sig: &Signature, index: &IndexSet) -> Result<(Atom, Truth3, Option<usize>)> {
    let mut p = clause(line, sig)?;
    let raw = p.raw_term()?;
    let atom = p.resolve_atom(&raw)?;
    p.expect(Tok::Eq)?;
    let value = truth_value(&mut p)?;
    let point = if p.eat(&Tok::At) {
        let w = p.ident()?;
        let t = p.ident()?;
        Some(index.flat(index.point(&w, &t)?))
    } else {
        None
    };
    p.expect_end()?;
    Ok((atom, value, point))
}

fn parse_equation(line: &Line<'_>, sig: &Signature) -> Result<(Term, Term)> {
    let mut p = clause(line, sig)?;
    let l = p.raw_term()?;
    p.eat(&Tok::Eq);
    let r = p.raw_term()?;
    p.expect_end()?;
    let (l, r) = (p.resolve_term(&l)?, p.resolve_term(&r)?);
    let (ls, rs) = (l.sort(sig)?, r.sort(sig)?);
    if ls != rs {
        return Err(Error::SortMismatch(format!("`{l}` has sort {ls} but `{r}` has sort {rs}")));
    }
    Ok((l, r))
}

fn parse_family(line: &Line<'_>, sig: &Signature) -> Result<IndexedFunctionFamily> {
    let mut p = clause(line, sig)?;
    let name = p.ident()?;
    p.expect(Tok::Eq)?;
    let mut members = Vec::new();
    while !p.at_end() {
        let index = p.ident()?;
        p.expect(Tok::Colon)?;
        members.push((index, p.ident()?));
    }
    let family = IndexedFunctionFamily { name, members };
    family.validate(sig)?;
    Ok(family)
}

fn parse_signature_clause(line: &Line<'_>, sig: &mut Signature) -> Result<()> {
    let empty = Signature::new();
    let mut p = clause(line, &empty)?;
    match line.keyword {
        "sort" => {
            let names = idents_until(&mut p, &[])?;
            if names.is_empty() {
                return Err(p.error("expected sort names"));
            }
            names.iter().for_each(|n| {
                sig.add_sort(n);
            });
        }
        "const" => {
            let names = idents_until(&mut p, &[Tok::Colon])?;
            p.expect(Tok::Colon)?;
            let sort = p.ident()?;
            p.expect_end()?;
            if names.is_empty() {
                return Err(p.error("expected constant names"));
            }
            names.iter().for_each(|n| {
                sig.add_const(n, &sort);
            });
        }
        "func" => {
            let name = p.ident()?;
            p.expect(Tok::Colon)?;
            let args = idents_until(&mut p, &[Tok::Arrow])?;
            p.expect(Tok::Arrow)?;
            let result = p.ident()?;
            let constructor = match p.peek() {
                Tok::End => false,
                Tok::Ident(w) if w == "constructor" => {
                    p.bump();
                    true
                }
                _ => return Err(p.error("expected `constructor` or end of line")),
            };
            p.expect_end()?;
            let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            sig.add_func(&name, &args, &result, constructor);
        }
        "pred" => {
            let name = p.ident()?;
            p.expect(Tok::Colon)?;
            let args = idents_until(&mut p, &[Tok::Ident("default".into())])?;
            let default = if p.at_end() {
                DefaultTruth::False
            } else {
                p.ident()?;
                match p.ident()?.as_str() {
                    "false" => DefaultTruth::False,
                    "unknown" => DefaultTruth::Unknown,
                    other => return Err(p.error(format!("default must be false or unknown, found `{other}`"))),
                }
            };
            p.expect_end()?;
            let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            sig.add_pred(&name, &args, default);
        }
        _ => unreachable!("caller dispatches on signature keywords"),
    }
    Ok(())
}

fn index_of(lines: &[Line<'_>]) -> Result<IndexSet> {
    let empty = Signature::new();
    let mut index = IndexSet::single();
    let mut seen = (false, false);
    for line in lines {
        let (slot, flag) = match line.keyword {
            "worlds" => (&mut index.worlds, &mut seen.0),
            "times" => (&mut index.times, &mut seen.1),
            _ => continue,
        };
        if *flag {
            return Err(located(line, Error::Declaration(format!("`{}` declared twice", line.keyword))));
        }
        *flag = true;
        let mut p = clause(line, &empty)?;
        *slot = idents_until(&mut p, &[])?;
    }
    index.validate()?;
    Ok(index)
}

fn intensional_decl(lines: &[Line<'_>], index: IndexSet) -> Result<IntensionalDecl> {
    let empty = Signature::new();
    let mut decl = IntensionalDecl {
        index,
        ..Default::default()
    };
    let mut meaning_lines = Vec::new();
    for line in lines {
        let run = |decl: &mut IntensionalDecl| -> Result<()> {
            let mut p = clause(line, &empty)?;
            match line.keyword {
                "entity" => decl.entities.extend(idents_until(&mut p, &[])?),
                "concept" => {
                    let name = p.ident()?;
                    p.expect(Tok::Eq)?;
                    let graph = point_entries(&mut p, &decl.index, "a concept")?;
                    decl.concepts.push((name, graph));
                }
                "conceptset" => {
                    let name = p.ident()?;
                    p.expect(Tok::Eq)?;
                    let mut members = Vec::new();
                    while !p.at_end() {
                        let c = p.ident()?;
                        members.push((c, p.eat(&Tok::Question)));
                    }
                    decl.sets.push(ConceptSet { name, members });
                }
                "property" => {
                    let name = p.ident()?;
                    p.expect(Tok::Eq)?;
                    let sets = point_entries(&mut p, &decl.index, "a property")?;
                    decl.properties.push((name, sets));
                }
                _ => {}
            }
            p.expect_end()
        };
        if line.keyword == "meaning" {
            meaning_lines.push(line);
            continue;
        }
        if !INTENSIONAL.contains(&line.keyword) {
            continue;
        }
        run(&mut decl).map_err(|e| located(line, e))?;
    }
    for line in meaning_lines {
        let mut p = clause(line, &empty)?;
        let sym = p.ident()?;
        p.expect(Tok::Eq)?;
        let target = p.ident()?;
        p.expect_end()?;
        let den = if decl.entities.contains(&target) {
            Denotation::Entity(target)
        } else if decl.concepts.iter().any(|(c, _)| c == &target) {
            Denotation::Concept(target)
        } else if decl.sets.iter().any(|s| s.name == target) {
            Denotation::Set(target)
        } else if decl.properties.iter().any(|(p, _)| p == &target) {
            Denotation::Property(target)
        } else {
            return Err(located(line, Error::UnknownSymbol(target)));
        };
        decl.meaning.entries.push((sym, den));
    }
    Ok(decl)
}

/// Parses a theory file and assembles its signature and indexed diagram.
/// The model itself is built separately, at a chosen depth.
pub fn parse_theory(text: &str) -> Result<Theory> {
    let lines = lines(text);
    const KNOWN: [&str; 15] = [
        "sort", "const", "func", "pred", "fact", "rule", "equal", "axiom", "family", "worlds", "times", "entity",
        "concept", "conceptset", "property",
    ];
    for line in &lines {
        if !KNOWN.contains(&line.keyword) && line.keyword != "meaning" {
            let column = line.text.find(line.keyword).unwrap_or(0) + 1;
            return Err(Error::syntax(line.number, column, format!("unknown clause `{}`", line.keyword)));
        }
    }
    let intensional = lines.iter().find(|l| INTENSIONAL.contains(&l.keyword));
    if let Some(first) = intensional {
        if let Some(l) = lines.iter().find(|l| EXTENSIONAL.contains(&l.keyword)) {
            return Err(located(
                l,
                Error::Declaration(format!(
                    "`{}` cannot be mixed with intensional declarations such as `{}`",
                    l.keyword, first.keyword
                )),
            ));
        }
    }

    let index = index_of(&lines)?;
    let mut theory = if intensional.is_some() {
        let decl = intensional_decl(&lines, index)?;
        Theory::from_intensional(build_intensional_model(decl)?)
    } else {
        let mut sig = Signature::new();
        for line in lines.iter().filter(|l| ["sort", "const", "func", "pred"].contains(&l.keyword)) {
            parse_signature_clause(line, &mut sig).map_err(|e| located(line, e))?;
        }
        let mut theory = Theory::from_diagram(sig, GDiagram::default());
        theory.diagram = IndexedDiagram::uniform(index, GDiagram::default());
        theory
    };

    let sig = theory.signature.clone();
    let index = theory.diagram.index.clone();
    for line in &lines {
        let step = |theory: &mut Theory| -> Result<()> {
            match line.keyword {
                "fact" => {
                    let (atom, value, point) = parse_fact(line, &sig, &index)?;
                    for (i, d) in theory.diagram.diagrams.iter_mut().enumerate() {
                        if point.is_none_or(|p| p == i) {
                            d.facts.push((atom.clone(), value));
                        }
                    }
                }
                "rule" => {
                    let rule = parse_rule(line, &sig)?;
                    theory.diagram.diagrams.iter_mut().for_each(|d| d.rules.push(rule.clone()));
                }
                "equal" => {
                    let eq = parse_equation(line, &sig)?;
                    theory.diagram.diagrams.iter_mut().for_each(|d| d.equations.push(eq.clone()));
                }
                "axiom" => {
                    let source = line.text.trim_start()["axiom".len()..].trim().to_string();
                    let mut p = clause(line, &sig)?;
                    let formula = p.formula()?;
                    p.expect_end()?;
                    theory.axioms.push(Axiom { source, formula });
                }
                "family" => {
                    let family = parse_family(line, &sig)?;
                    if theory.family(&family.name).is_some() {
                        return Err(Error::DuplicateName(family.name));
                    }
                    theory.families.push(family);
                }
                _ => {}
            }
            Ok(())
        };
        step(&mut theory).map_err(|e| located(line, e))?;
    }
    Ok(theory)
}

/// Meaning function of an intensional theory, if any.
pub fn meaning_of(theory: &Theory) -> Option<&MeaningFunction> {
    theory.intension.as_ref().map(|m| &m.meaning)
}
