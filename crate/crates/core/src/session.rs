//! Sessions: a theory, its current snapshot, and the command language that
//! drives evaluation and expansion. Also the save format and a transcript
//! runner.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diagram::{build_canonical_model, Atom, Model};
use crate::error::{Error, Result};
use crate::evaluate::{eval_formula, truth_set, EvalMode, EvalTrace, PointOfReference};
use crate::expand::{
    add_element, check_consistency_at, extend_set, force_at, force_predicates_equal, replay, test_function_equality,
    Consistency,
};
use crate::formula::{apply_family, parse_atom, parse_formula, parse_term, Formula};
use crate::signature::DEFAULT_DEPTH;
use crate::theory::parse_theory;
use crate::truth::Truth3;

pub const SESSION_FORMAT_VERSION: u32 = 1;
const SESSION_MAGIC: &str = "gdiagram-session";

/// What a non-interactive evaluation does when it comes out unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchPolicy {
    #[default]
    Leave,
    ForceTrue,
    ForceFalse,
}

impl BatchPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            BatchPolicy::Leave => "leave",
            BatchPolicy::ForceTrue => "force-true",
            BatchPolicy::ForceFalse => "force-false",
        }
    }
}

impl FromStr for BatchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leave" => Ok(BatchPolicy::Leave),
            "force-true" => Ok(BatchPolicy::ForceTrue),
            "force-false" => Ok(BatchPolicy::ForceFalse),
            other => Err(Error::Command(format!(
                "unknown batch policy `{other}` (leave|force-true|force-false)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionConfig {
    pub depth: usize,
    pub mode: EvalMode,
    pub batch_policy: BatchPolicy,
    /// Relative paths in `load`, `save` and `restore` resolve against this.
    pub base_dir: PathBuf,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            depth: DEFAULT_DEPTH,
            mode: EvalMode::Paper,
            batch_policy: BatchPolicy::Leave,
            base_dir: PathBuf::from("."),
        }
    }
}

impl SessionConfig {
    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceAction {
    ForceTrue,
    ForceFalse,
    LeaveUnknown,
    AddElement,
}

impl ChoiceAction {
    pub const ALL: [ChoiceAction; 4] = [
        ChoiceAction::ForceTrue,
        ChoiceAction::ForceFalse,
        ChoiceAction::LeaveUnknown,
        ChoiceAction::AddElement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChoiceAction::ForceTrue => "force-true",
            ChoiceAction::ForceFalse => "force-false",
            ChoiceAction::LeaveUnknown => "leave-unknown",
            ChoiceAction::AddElement => "add-element",
        }
    }
}

/// The unknown atom that kept an evaluation from a definite value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingChoice {
    pub atom: Atom,
    pub at: PointOfReference,
    pub formula: Formula,
    pub actions: Vec<ChoiceAction>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub pending: Option<PendingChoice>,
    pub trace: Option<EvalTrace>,
}

impl CommandOutput {
    fn text(text: String) -> Self {
        CommandOutput {
            text,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    source: String,
    model: Model,
    last: Option<(Formula, EvalMode)>,
}

/// Byte spans of the whitespace-separated words of `s`.
fn words(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

/// Splits `<rest> <kw> a1 .. an` into `rest` and the n arguments.
fn strip_suffix<'a>(s: &'a str, kw: &str, n: usize) -> (&'a str, Option<Vec<&'a str>>) {
    let w = words(s);
    if w.len() > n && w[w.len() - n - 1].1 == kw {
        let (start, _) = w[w.len() - n - 1];
        let args = w[w.len() - n..].iter().map(|(_, x)| *x).collect();
        (s[..start].trim_end(), Some(args))
    } else {
        (s, None)
    }
}

fn split_command(line: &str) -> (&str, &str) {
    let line = line.trim();
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim()),
        None => (line, ""),
    }
}

fn two_names(args: &str, usage: &str) -> Result<(String, String)> {
    let w = words(args);
    match w.as_slice() {
        [(_, a), (_, b)] => Ok((a.to_string(), b.to_string())),
        _ => Err(Error::Command(format!("usage: {usage}"))),
    }
}

fn normalized(text: &str) -> String {
    let mut s = text.to_string();
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

impl Session {
    /// Parses a theory and builds its canonical model at the configured depth.
    pub fn load(text: &str, config: SessionConfig) -> Result<Session> {
        let theory = parse_theory(text)?;
        let model = build_canonical_model(&theory, config.depth)?;
        Ok(Session {
            config,
            source: normalized(text),
            model,
            last: None,
        })
    }

    pub fn load_file(path: &Path, config: SessionConfig) -> Result<Session> {
        let text = std::fs::read_to_string(path)?;
        Session::load(&text, config)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn report(&self) -> String {
        self.model.report()
    }

    pub fn history_text(&self) -> String {
        let mut out = format!("HISTORY: {}\n", self.model.history().len());
        for (i, step) in self.model.history().iter().enumerate() {
            let _ = writeln!(out, "{} {}", i + 1, step.to_command(self.model.index()));
        }
        out
    }

    /// Worlds, times, and the value of the last evaluated formula at every
    /// point, each evaluated on its own.
    pub fn worlds_text(&self) -> Result<String> {
        let index = self.model.index();
        let mut out = format!("WORLDS: {}\nTIMES: {}\n", index.worlds.join(" "), index.times.join(" "));
        if let Some((f, mode)) = &self.last {
            let _ = writeln!(out, "FORMULA: {f}");
            for at in index.points() {
                let (v, _) = eval_formula(&self.model, f, at, *mode)?;
                let _ = writeln!(out, "CELL {}: {v}", index.show(at));
            }
        }
        Ok(out)
    }

    /// `TRUTHSET: {I1, I2}` for `f` at `time`.
    pub fn truthset_text(&self, formula: &str, time: Option<&str>, mode: Option<EvalMode>) -> Result<String> {
        let f = parse_formula(formula, self.model.signature())?;
        let index = self.model.index();
        let t = match time {
            Some(t) => index.time_index(t)?,
            None => 0,
        };
        let set = truth_set(&self.model, &f, t, mode.unwrap_or(self.config.mode))?;
        let names: Vec<&str> = set.iter().map(|&w| index.worlds[w].as_str()).collect();
        Ok(format!("TRUTHSET: {{{}}}\n", names.join(", ")))
    }

    fn point(&self, args: Option<Vec<&str>>) -> Result<Option<PointOfReference>> {
        match args {
            Some(a) => Ok(Some(self.model.index().point(a[0], a[1])?)),
            None => Ok(None),
        }
    }

    /// Runs one command. Mutating commands replace the snapshot only when
    /// they succeed.
    pub fn run(&mut self, line: &str) -> Result<CommandOutput> {
        let (cmd, args) = split_command(line);
        match cmd {
            "eval" => self.eval(args),
            "force" => {
                let (rest, at) = strip_suffix(args, "at", 2);
                let (atom, value) = parse_assignment(rest)?;
                let atom = parse_atom(atom, self.model.signature())?;
                let point = self.point(at)?;
                self.model = force_at(&self.model, &atom, value, point)?;
                Ok(CommandOutput::text(self.report()))
            }
            "check" => {
                let (rest, at) = strip_suffix(args, "at", 2);
                let (atom, value) = parse_assignment(rest)?;
                let atom = parse_atom(atom, self.model.signature())?;
                let point = self.point(at)?;
                Ok(CommandOutput::text(
                    match check_consistency_at(&self.model, &atom, value, point)? {
                        Consistency::Consistent => "CONSISTENT\n".to_string(),
                        Consistency::Inconsistent(r) => format!("INCONSISTENT: {r}\n"),
                    },
                ))
            }
            "extend" => {
                let (rest, at) = strip_suffix(args, "at", 2);
                let atom = parse_atom(rest, self.model.signature())?;
                let point = self.point(at)?;
                self.model = extend_set(&self.model, &atom, point)?;
                Ok(CommandOutput::text(self.report()))
            }
            "add" => {
                let (sort, name) = two_names(args, "add <sort> <name>")?;
                self.model = add_element(&self.model, &sort, &name)?;
                Ok(CommandOutput::text(self.report()))
            }
            "eqtest" => {
                let (p, q) = two_names(args, "eqtest <p> <q>")?;
                let v = test_function_equality(&self.model, &p, &q)?;
                Ok(CommandOutput::text(format!("EQUAL: {v}\n")))
            }
            "eqforce" => {
                let (p, q) = two_names(args, "eqforce <p> <q>")?;
                let (model, obligations) = force_predicates_equal(&self.model, &p, &q)?;
                self.model = model;
                let mut out = String::new();
                for o in &obligations {
                    let _ = writeln!(out, "OBLIGATION: {o} @{}", self.model.index().show(o.at));
                }
                out.push_str(&self.report());
                Ok(CommandOutput::text(out))
            }
            "apply" => {
                let (rest, at) = strip_suffix(args, "at", 2);
                let w = words(rest);
                let [(_, fam), (_, idx), (start, _)] = w.as_slice()[..w.len().min(3)] else {
                    return Err(Error::Command("usage: apply <family> <index> <term>".into()));
                };
                let theory = self.model.theory();
                let family = theory
                    .family(fam)
                    .ok_or_else(|| Error::UnknownSymbol(fam.to_string()))?;
                let sig = self.model.signature();
                let element = parse_term(&rest[start..], sig)?;
                let atom = apply_family(family, sig, idx, &element)?;
                let at = self.point(at)?.unwrap_or(PointOfReference::ORIGIN);
                let v = self.model.lookup_atom(&atom, at)?;
                Ok(CommandOutput::text(format!("{atom} = {v}\n")))
            }
            "worlds" => Ok(CommandOutput::text(self.worlds_text()?)),
            "truthset" => {
                let (rest, mode) = strip_suffix(args, "mode", 1);
                let (rest, time) = strip_suffix(rest, "time", 1);
                let mode = mode.map(|m| m[0].parse()).transpose()?;
                Ok(CommandOutput::text(self.truthset_text(rest, time.map(|t| t[0]), mode)?))
            }
            "undo" => {
                let n = self.model.history().len();
                if n == 0 {
                    return Err(Error::Command("nothing to undo".into()));
                }
                self.model = replay(&self.model, n - 1)?;
                Ok(CommandOutput::text(self.report()))
            }
            "history" => Ok(CommandOutput::text(self.history_text())),
            "model" => Ok(CommandOutput::text(self.report())),
            "save" => {
                if args.is_empty() {
                    return Err(Error::Command("usage: save <path>".into()));
                }
                self.save(&self.config.resolve(args))?;
                Ok(CommandOutput::text(format!("SAVED: {args}\n")))
            }
            "" => Err(Error::Command("empty command".into())),
            other => Err(Error::UnknownCommand(other.to_string())),
        }
    }

    fn eval(&mut self, args: &str) -> Result<CommandOutput> {
        let (rest, mode) = strip_suffix(args, "mode", 1);
        let (text, at) = strip_suffix(rest, "at", 2);
        let mode = match mode {
            Some(m) => m[0].parse()?,
            None => self.config.mode,
        };
        let at = self.point(at)?.unwrap_or(PointOfReference::ORIGIN);
        let f = parse_formula(text, self.model.signature())?;
        let mut out = String::new();
        let (mut value, mut trace) = eval_formula(&self.model, &f, at, mode)?;
        let forced = match self.config.batch_policy {
            BatchPolicy::Leave => None,
            BatchPolicy::ForceTrue => Some(Truth3::True),
            BatchPolicy::ForceFalse => Some(Truth3::False),
        };
        if let Some(v) = forced {
            while value == Truth3::Unknown {
                let Some((atom, p)) = trace.first_blocking_atom() else { break };
                match force_at(&self.model, &atom, v, Some(p)) {
                    Ok(m) if m.history().len() > self.model.history().len() => self.model = m,
                    _ => break,
                }
                let _ = writeln!(out, "FORCED: {atom} = {v} @{}", self.model.index().show(p));
                (value, trace) = eval_formula(&self.model, &f, at, mode)?;
            }
        }
        let index = self.model.index();
        let _ = writeln!(out, "VALUE: {value}");
        if let (Formula::Exists { .. } | Formula::Forall { .. }, Some(w)) = (&trace.formula, &trace.witness) {
            let _ = writeln!(out, "WITNESS: {w}");
        }
        let pending = trace.first_blocking_atom().map(|(atom, p)| PendingChoice {
            atom,
            at: p,
            formula: f.clone(),
            actions: ChoiceAction::ALL.to_vec(),
        });
        if let Some(pc) = &pending {
            let actions: Vec<&str> = pc.actions.iter().map(|a| a.as_str()).collect();
            let _ = writeln!(out, "PENDING: {} @{} [{}]", pc.atom, index.show(pc.at), actions.join(" "));
        }
        out.push_str("TRACE:\n");
        out.push_str(&trace.render(index));
        self.last = Some((f, mode));
        Ok(CommandOutput {
            text: out,
            pending,
            trace: Some(trace),
        })
    }

    /// Config, theory text and history as replayable commands.
    pub fn to_saved_string(&self) -> String {
        let mut out = format!("{SESSION_MAGIC} {SESSION_FORMAT_VERSION}\n");
        let _ = writeln!(out, "depth: {}", self.config.depth);
        let _ = writeln!(out, "mode: {}", self.config.mode.as_str());
        let _ = writeln!(out, "batch-policy: {}", self.config.batch_policy.as_str());
        out.push_str("--- theory\n");
        out.push_str(&self.source);
        out.push_str("--- history\n");
        for step in self.model.history() {
            let _ = writeln!(out, "{}", step.to_command(self.model.index()));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_saved_string())?;
        Ok(())
    }

    /// Inverse of [`Session::to_saved_string`]. `base_dir` is kept from the
    /// caller; everything else comes from the file.
    pub fn from_saved_str(text: &str, base_dir: PathBuf) -> Result<Session> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        let version = header
            .strip_prefix(SESSION_MAGIC)
            .map(str::trim)
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::Command("not a saved session".into()))?;
        if version > SESSION_FORMAT_VERSION {
            return Err(Error::Version {
                found: version,
                supported: SESSION_FORMAT_VERSION,
            });
        }
        let mut config = SessionConfig {
            base_dir,
            ..Default::default()
        };
        for line in lines.by_ref() {
            if line == "--- theory" {
                break;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Command(format!("bad session line `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "depth" => {
                    config.depth = value
                        .parse()
                        .map_err(|_| Error::Command(format!("bad depth `{value}`")))?
                }
                "mode" => config.mode = value.parse()?,
                "batch-policy" => config.batch_policy = value.parse()?,
                other => return Err(Error::Command(format!("unknown session key `{other}`"))),
            }
        }
        let mut source = String::new();
        let mut found_history = false;
        for line in lines.by_ref() {
            if line == "--- history" {
                found_history = true;
                break;
            }
            source.push_str(line);
            source.push('\n');
        }
        if !found_history {
            return Err(Error::Command("saved session has no history section".into()));
        }
        let mut session = Session::load(&source, config)?;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            session.run(line)?;
        }
        Ok(session)
    }

    pub fn restore(path: &Path, base_dir: PathBuf) -> Result<Session> {
        let text = std::fs::read_to_string(path)?;
        Session::from_saved_str(&text, base_dir)
    }
}

/// `walk(B) true`, `walk(B)=true` or `walk(B) = true`.
fn parse_assignment(s: &str) -> Result<(&str, Truth3)> {
    let s = s.trim();
    let (atom, value) = match s.rfind('=') {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => match s.rfind(char::is_whitespace) {
            Some(i) => (&s[..i], &s[i..]),
            None => return Err(Error::Command("expected `<atom> true|false`".into())),
        },
    };
    let value: Truth3 = value
        .trim()
        .parse()
        .map_err(|_| Error::Command(format!("expected true or false, found `{}`", value.trim())))?;
    Ok((atom.trim(), value))
}

/// Command interpreter that may not have a session yet: handles `load` and
/// `restore` itself, plus `set depth|mode|batch-policy V` which applies to
/// later loads, and hands everything else to the session.
#[derive(Debug, Clone, Default)]
pub struct Repl {
    pub config: SessionConfig,
    pub session: Option<Session>,
}

impl Repl {
    pub fn new(config: SessionConfig) -> Self {
        Repl { config, session: None }
    }

    pub fn run(&mut self, line: &str) -> Result<CommandOutput> {
        let (cmd, args) = split_command(line);
        match cmd {
            "load" => {
                let session = Session::load_file(&self.config.resolve(args), self.config.clone())?;
                let report = session.report();
                self.session = Some(session);
                Ok(CommandOutput::text(report))
            }
            "restore" => {
                let session = Session::restore(&self.config.resolve(args), self.config.base_dir.clone())?;
                let report = session.report();
                self.session = Some(session);
                Ok(CommandOutput::text(report))
            }
            "set" => {
                let (key, value) = two_names(args, "set <depth|mode|batch-policy> <value>")?;
                match key.as_str() {
                    "depth" => {
                        self.config.depth =
                            value.parse().map_err(|_| Error::Command(format!("bad depth `{value}`")))?
                    }
                    "mode" => self.config.mode = value.parse()?,
                    "batch-policy" => self.config.batch_policy = value.parse()?,
                    _ => return Err(Error::Command(format!("unknown setting `{key}`"))),
                }
                Ok(CommandOutput::text(format!("SET: {key} {value}\n")))
            }
            _ => match &mut self.session {
                Some(s) => s.run(line),
                None => Err(Error::Command("no theory loaded (use `load <path>`)".into())),
            },
        }
    }
}

/// Runs a transcript: one command per line, `#` comments and blank lines
/// skipped. Each command is echoed as `> cmd`, followed by its output or an
/// `ERROR:` line.
pub fn run_transcript(repl: &mut Repl, text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let _ = writeln!(out, "> {line}");
        match repl.run(line) {
            Ok(o) => out.push_str(&o.text),
            Err(e) => {
                let _ = writeln!(out, "ERROR: {e}");
            }
        }
    }
    out
}
