//! Sorts, function and predicate symbols, terms, and the constructor-generated
//! term universe.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::truth::Truth3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sort {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncSymbol {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub result_sort: String,
    /// Constructors generate the universe; other symbols are interpreted
    /// through declared equations only.
    pub constructor: bool,
}

impl FuncSymbol {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }

    pub fn is_constant(&self) -> bool {
        self.arg_sorts.is_empty()
    }
}

/// Value taken by atoms the diagram says nothing about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefaultTruth {
    /// Closed world: unlisted atoms are false.
    False,
    /// Open world: unlisted atoms are unknown.
    Unknown,
}

impl DefaultTruth {
    pub fn truth(self) -> Truth3 {
        match self {
            DefaultTruth::False => Truth3::False,
            DefaultTruth::Unknown => Truth3::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DefaultTruth::False => "false",
            DefaultTruth::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredSymbol {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub default: DefaultTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    DuplicateSymbol,
    UnknownSort,
    UninhabitedSort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::DuplicateSymbol => "duplicate symbol",
            DiagnosticKind::UnknownSort => "unknown sort",
            DiagnosticKind::UninhabitedSort => "uninhabited sort",
        };
        write!(f, "{kind}: {}", self.message)
    }
}

/// Declared vocabulary of a theory. Declaration order is significant: it
/// fixes the order in which universe terms are generated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<Sort>,
    pub funcs: Vec<FuncSymbol>,
    pub preds: Vec<PredSymbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> &mut Self {
        self.sorts.push(Sort {
            name: name.to_string(),
        });
        self
    }

    pub fn add_func(&mut self, name: &str, args: &[&str], result: &str, constructor: bool) -> &mut Self {
        self.funcs.push(FuncSymbol {
            name: name.to_string(),
            arg_sorts: args.iter().map(|s| s.to_string()).collect(),
            result_sort: result.to_string(),
            constructor,
        });
        self
    }

    /// Shorthand for a constructor constant.
    pub fn add_const(&mut self, name: &str, sort: &str) -> &mut Self {
        self.add_func(name, &[], sort, true)
    }

    pub fn add_pred(&mut self, name: &str, args: &[&str], default: DefaultTruth) -> &mut Self {
        self.preds.push(PredSymbol {
            name: name.to_string(),
            arg_sorts: args.iter().map(|s| s.to_string()).collect(),
            default,
        });
        self
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name == name)
    }

    pub fn func(&self, name: &str) -> Option<&FuncSymbol> {
        self.funcs.iter().find(|f| f.name == name)
    }

    pub fn pred(&self, name: &str) -> Option<&PredSymbol> {
        self.preds.iter().find(|p| p.name == name)
    }

    pub fn require_sort(&self, name: &str) -> Result<&Sort> {
        self.sort(name).ok_or_else(|| Error::UnknownSort(name.to_string()))
    }

    pub fn require_pred(&self, name: &str) -> Result<&PredSymbol> {
        self.pred(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn constructors_of<'a>(&'a self, sort: &'a str) -> impl Iterator<Item = &'a FuncSymbol> + 'a {
        self.funcs
            .iter()
            .filter(move |f| f.constructor && f.result_sort == sort)
    }

    /// Sorts that have at least one ground constructor term.
    pub fn inhabited_sorts(&self) -> HashSet<String> {
        let mut inhabited = HashSet::new();
        loop {
            let before = inhabited.len();
            for f in self.funcs.iter().filter(|f| f.constructor) {
                if f.arg_sorts.iter().all(|s| inhabited.contains(s)) {
                    inhabited.insert(f.result_sort.clone());
                }
            }
            if inhabited.len() == before {
                return inhabited;
            }
        }
    }

    /// Checks name uniqueness, sort resolution and inhabitation of every
    /// sort some predicate ranges over. Never fails; an empty list means
    /// the signature is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen_sorts = HashSet::new();
        for s in &self.sorts {
            if !seen_sorts.insert(s.name.as_str()) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateSymbol,
                    message: format!("sort `{}` declared twice", s.name),
                });
            }
        }
        let mut seen_syms = HashSet::new();
        let names = self
            .funcs
            .iter()
            .map(|f| f.name.as_str())
            .chain(self.preds.iter().map(|p| p.name.as_str()));
        for name in names {
            if !seen_syms.insert(name) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateSymbol,
                    message: format!("symbol `{name}` declared twice"),
                });
            }
        }
        let mut check_sort = |owner: &str, sort: &str| {
            if !seen_sorts.contains(sort) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::UnknownSort,
                    message: format!("`{owner}` refers to undeclared sort `{sort}`"),
                });
            }
        };
        for f in &self.funcs {
            for s in f.arg_sorts.iter().chain(std::iter::once(&f.result_sort)) {
                check_sort(&f.name, s);
            }
        }
        for p in &self.preds {
            for s in &p.arg_sorts {
                check_sort(&p.name, s);
            }
        }
        let inhabited = self.inhabited_sorts();
        let mut reported = HashSet::new();
        for p in &self.preds {
            for s in &p.arg_sorts {
                if seen_sorts.contains(s.as_str()) && !inhabited.contains(s) && reported.insert(s.clone()) {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::UninhabitedSort,
                        message: format!("sort `{s}` (used by `{}`) has no constructor terms", p.name),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Func(String),
    Var(String),
}

/// An application of a function symbol, or a variable. Ground terms contain
/// no variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub head: Head,
    pub args: Vec<Term>,
}

impl Term {
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term {
            head: Head::Func(name.to_string()),
            args,
        }
    }

    pub fn constant(name: &str) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn var(name: &str) -> Term {
        Term {
            head: Head::Var(name.to_string()),
            args: Vec::new(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.head, Head::Var(_))
    }

    pub fn func_name(&self) -> Option<&str> {
        match &self.head {
            Head::Func(f) => Some(f),
            Head::Var(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        !self.is_var() && self.args.iter().all(Term::is_ground)
    }

    /// Nesting depth: constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        self.args.iter().map(|a| a.depth() + 1).max().unwrap_or(0)
    }

    pub fn subst(&self, var: &str, value: &Term) -> Term {
        match &self.head {
            Head::Var(v) if v == var => value.clone(),
            _ => Term {
                head: self.head.clone(),
                args: self.args.iter().map(|a| a.subst(var, value)).collect(),
            },
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match &self.head {
            Head::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Head::Func(_) => self.args.iter().for_each(|a| a.vars(out)),
        }
    }

    /// Result sort, checking argument sorts on the way down.
    pub fn sort_in(&self, sig: &Signature, var_sorts: &HashMap<String, String>) -> Result<String> {
        match &self.head {
            Head::Var(v) => var_sorts
                .get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.clone())),
            Head::Func(name) => {
                let f = sig
                    .func(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                if f.arity() != self.args.len() {
                    return Err(Error::SortMismatch(format!(
                        "`{name}` expects {} arguments, got {}",
                        f.arity(),
                        self.args.len()
                    )));
                }
                for (arg, want) in self.args.iter().zip(&f.arg_sorts) {
                    let got = arg.sort_in(sig, var_sorts)?;
                    if &got != want {
                        return Err(Error::SortMismatch(format!(
                            "argument `{arg}` of `{name}` has sort {got}, expected {want}"
                        )));
                    }
                }
                Ok(f.result_sort.clone())
            }
        }
    }

    pub fn sort(&self, sig: &Signature) -> Result<String> {
        self.sort_in(sig, &HashMap::new())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Func(n) | Head::Var(n) => f.write_str(n)?,
        }
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Bounds on universe generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenLimits {
    pub max_depth: usize,
    pub max_terms: usize,
}

impl Default for GenLimits {
    fn default() -> Self {
        GenLimits {
            max_depth: 6,
            max_terms: 250_000,
        }
    }
}

pub const DEFAULT_DEPTH: usize = 2;

/// Generated ground constructor terms, per sort, in generation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermUniverse {
    pub by_sort: Vec<(String, Vec<Term>)>,
}

impl TermUniverse {
    pub fn terms(&self, sort: &str) -> &[Term] {
        self.by_sort
            .iter()
            .find(|(s, _)| s == sort)
            .map(|(_, ts)| ts.as_slice())
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_sort.iter().map(|(_, ts)| ts.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.by_sort.iter().flat_map(|(_, ts)| ts.iter())
    }
}

/// All ground constructor terms of nesting depth at most `depth`, for every
/// sort at once.
///
/// Terms are produced level by level: constants first (declaration order),
/// then for each further level the applications whose deepest argument sits
/// on the previous level, ordered by constructor declaration order and then
/// lexicographically by argument position in the argument sort's list. The
/// list for depth `d` is therefore a prefix of the list for `d + 1`.
pub fn generate_universe(sig: &Signature, depth: usize, limits: GenLimits) -> Result<TermUniverse> {
    if depth > limits.max_depth {
        return Err(Error::ResourceLimit(format!(
            "depth {depth} exceeds the configured bound {}",
            limits.max_depth
        )));
    }
    let mut lists: Vec<Vec<Term>> = vec![Vec::new(); sig.sorts.len()];
    // level_end[s][k] = number of terms of sort s with level <= k
    let mut level_end: Vec<Vec<usize>> = vec![Vec::new(); sig.sorts.len()];
    let sort_idx: HashMap<&str, usize> = sig
        .sorts
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();
    let mut total = 0usize;

    for f in sig.funcs.iter().filter(|f| f.constructor && f.is_constant()) {
        if let Some(&s) = sort_idx.get(f.result_sort.as_str()) {
            lists[s].push(Term::constant(&f.name));
            total += 1;
        }
    }
    for (s, ends) in level_end.iter_mut().enumerate() {
        ends.push(lists[s].len());
    }

    for level in 1..=depth {
        let mut fresh: Vec<Vec<Term>> = vec![Vec::new(); sig.sorts.len()];
        for f in sig.funcs.iter().filter(|f| f.constructor && !f.is_constant()) {
            let Some(&res) = sort_idx.get(f.result_sort.as_str()) else {
                continue;
            };
            let Some(arg_idx) = f
                .arg_sorts
                .iter()
                .map(|a| sort_idx.get(a.as_str()).copied())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let bounds: Vec<usize> = arg_idx.iter().map(|&a| level_end[a][level - 1]).collect();
            let prev_start: Vec<usize> = arg_idx
                .iter()
                .map(|&a| if level >= 2 { level_end[a][level - 2] } else { 0 })
                .collect();
            if bounds.iter().any(|&b| b == 0) {
                continue;
            }
            let mut cursor = vec![0usize; bounds.len()];
            loop {
                let on_previous_level = cursor.iter().zip(&prev_start).any(|(&c, &start)| c >= start);
                if on_previous_level {
                    let args = cursor
                        .iter()
                        .zip(&arg_idx)
                        .map(|(&c, &a)| lists[a][c].clone())
                        .collect();
                    fresh[res].push(Term::app(&f.name, args));
                    total += 1;
                    if total > limits.max_terms {
                        return Err(Error::ResourceLimit(format!(
                            "more than {} universe terms at depth {depth}",
                            limits.max_terms
                        )));
                    }
                }
                if !advance(&mut cursor, &bounds) {
                    break;
                }
            }
        }
        for (s, new_terms) in fresh.into_iter().enumerate() {
            lists[s].extend(new_terms);
            level_end[s].push(lists[s].len());
        }
    }

    Ok(TermUniverse {
        by_sort: sig
            .sorts
            .iter()
            .map(|s| s.name.clone())
            .zip(lists)
            .collect(),
    })
}

/// Odometer step over `bounds`, last position fastest. Returns false once
/// every tuple has been visited.
pub(crate) fn advance(cursor: &mut [usize], bounds: &[usize]) -> bool {
    for pos in (0..cursor.len()).rev() {
        cursor[pos] += 1;
        if cursor[pos] < bounds[pos] {
            return true;
        }
        cursor[pos] = 0;
    }
    false
}

/// Ground constructor terms of one sort up to `depth`, in generation order.
pub fn generate_terms(sig: &Signature, sort: &str, depth: usize) -> Result<Vec<Term>> {
    sig.require_sort(sort)?;
    let universe = generate_universe(sig, depth, GenLimits::default())?;
    Ok(universe.terms(sort).to_vec())
}
