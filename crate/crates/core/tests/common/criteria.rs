//! One check per acceptance criterion. Each returns a short detail line on
//! success and a description of the first mismatch otherwise. The
//! acceptance target and the topic test files both call these.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gdiagram::{
    apply_family, build_canonical_model, check_consistency, congruence_close, eval_formula, extend_set, force,
    force_predicates_equal, parse_formula, parse_theory, run_transcript, test_function_equality, truth_set, Atom,
    EvalMode, Formula, Model, Repl, SessionConfig, Term, Truth3,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub type Outcome = Result<String, String>;

/// Runtime ceilings per criterion.
pub const LIMIT_1: Duration = Duration::from_secs(1);
pub const LIMIT_2: Duration = Duration::from_secs(1);
pub const LIMIT_3: Duration = Duration::from_secs(1);
pub const LIMIT_4: Duration = Duration::from_secs(1);
pub const LIMIT_6: Duration = Duration::from_secs(5);
pub const LIMIT_7: Duration = Duration::from_secs(30);

/// Seed count for the congruence and expansion-sequence suites.
pub const SEEDS: u64 = 100;
/// Random formulas for the totality check.
pub const TOTALITY_FORMULAS: usize = 500;
/// Largest number of unknown atoms the brute-force consistency oracle
/// enumerates.
pub const BRUTE_LIMIT: usize = 12;

fn eval(model: &Model, text: &str, mode: EvalMode) -> Result<(Truth3, Option<Term>), String> {
    let f = parse_formula(text, model.signature()).map_err(|e| format!("{text}: {e}"))?;
    let (v, trace) = eval_formula(model, &f, ORIGIN, mode).map_err(|e| format!("{text}: {e}"))?;
    Ok((v, trace.witness))
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn timed(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail} in {took:.2?}"))
    }
}

/// Blocks world at depth 1 against the rule oracle, plus the divergent
/// worked instance as an expected failure.
pub fn blocks() -> Outcome {
    let start = Instant::now();
    let model = corpus_model("blocks", 1);
    let theory = model.theory().clone();
    let blocks = model.universe("block", ORIGIN);
    let tables = model.universe("table", ORIGIN);
    expect("blocks", blocks.len(), 3)?;
    expect("tables", tables.len(), 10)?;
    let mut checked = 0;
    for x in &blocks {
        for y in &blocks {
            for z in &tables {
                let a = Atom::new("top", vec![x.clone(), y.clone(), z.clone()]);
                let want = Truth3::from_bool(blocks_oracle(x, y, z));
                let got = model.lookup_atom(&a, ORIGIN).map_err(|e| e.to_string())?;
                expect(&format!("model {a}"), got, want)?;
                let raw = theory
                    .diagram
                    .at(ORIGIN)
                    .lookup_atom(&theory.signature, &a)
                    .map_err(|e| e.to_string())?;
                expect(&format!("diagram {a}"), raw, want)?;
                checked += 1;
            }
        }
    }
    // The worked instance claims true; the rules say false.
    let deep = build_canonical_model(&theory, 2).map_err(|e| e.to_string())?;
    let divergent = Atom::new(
        "top",
        vec![
            c("A"),
            c("B"),
            Term::app(
                "put",
                vec![c("C"), c("B"), Term::app("put", vec![c("B"), c("A"), c("Tab0")])],
            ),
        ],
    );
    let got = deep.lookup_atom(&divergent, ORIGIN).map_err(|e| e.to_string())?;
    if got == Truth3::True {
        return Err(format!("expected failure {divergent} unexpectedly true"));
    }
    expect("rule oracle on the divergent instance", got == Truth3::True, blocks_oracle(&divergent.args[0], &divergent.args[1], &divergent.args[2]))?;
    timed(LIMIT_1, start, format!("{checked} atoms exact, divergent instance false (expected failure)"))
}

/// Johnny model: walk(j), the Skolemized existential, and the family
/// applications.
pub fn montague() -> Outcome {
    let start = Instant::now();
    let model = corpus_model("johnny", 2);
    expect("walk(j)", eval(&model, "walk(j)", EvalMode::Paper)?.0, Truth3::True)?;
    let (v, w) = eval(&model, "exists u:entity . (man(u) & walk(u))", EvalMode::Paper)?;
    expect("exists man&walk", v, Truth3::True)?;
    expect("witness", w, Some(c("J")))?;
    let fam = model.theory().family("P").ok_or("no family P")?.clone();
    let sig = model.signature().clone();
    let h = |idx: &str, e: &str| -> Result<Truth3, String> {
        let a = apply_family(&fam, &sig, idx, &c(e)).map_err(|e| e.to_string())?;
        model.lookup_atom(&a, ORIGIN).map_err(|e| e.to_string())
    };
    expect("Pm(J)", h("Pm", "J")?, Truth3::True)?;
    expect("Pm(M)", h("Pm", "M")?, Truth3::False)?;
    let walkers = model.partial_set("walk", ORIGIN).map_err(|e| e.to_string())?;
    if walkers.members.is_empty() {
        return Err("WALKERS has no members".into());
    }
    for m in &walkers.members {
        expect(&format!("Pw({})", m[0]), h("Pw", &m[0].to_string())?, Truth3::True)?;
    }
    timed(LIMIT_2, start, "walk(j), witness J, Pm(J)/Pm(M)/Pw(WALKERS) match".into())
}

/// The "every man walks" expansion walk-through and TALKERS = WALKERS.
pub fn expansion() -> Outcome {
    let start = Instant::now();
    let every = "forall u:entity . (man(u) -> walk(u))";
    let base = corpus_model("johnny", 2);
    expect("every man walks", eval(&base, every, EvalMode::Paper)?.0, Truth3::Unknown)?;
    let walk_b = atom("walk", &["B"]);
    let yes = force(&base, &walk_b, Truth3::True).map_err(|e| e.to_string())?;
    expect("after walk(B):=true", eval(&yes, every, EvalMode::Paper)?.0, Truth3::True)?;
    let fresh = corpus_model("johnny", 2);
    let no = force(&fresh, &walk_b, Truth3::False).map_err(|e| e.to_string())?;
    expect("after walk(B):=false", eval(&no, every, EvalMode::Paper)?.0, Truth3::False)?;
    let eq = test_function_equality(&base, "talk", "walk").map_err(|e| e.to_string())?;
    expect("eqtest talk walk", eq, Truth3::Unknown)?;
    timed(LIMIT_3, start, "unknown / true / false / unknown".into())
}

/// The price/rise truth sets in both modes, compared with the values the
/// criterion states. The brute-force oracle over the declared data is
/// reported alongside.
pub fn price_rise() -> Outcome {
    let start = Instant::now();
    let theory = corpus_theory("price_rise");
    let im = theory.intension.clone().ok_or("not intensional")?;
    let f = parse_formula("exists x:concept . (price(x) & rise(x))", im.signature()).map_err(|e| e.to_string())?;
    let names = |s: &BTreeSet<usize>| -> Vec<String> { s.iter().map(|&w| im.index.worlds[w].clone()).collect() };
    let paper = names(&truth_set(&im, &f, 0, EvalMode::Paper).map_err(|e| e.to_string())?);
    let exhaustive = names(&truth_set(&im, &f, 0, EvalMode::Exhaustive).map_err(|e| e.to_string())?);
    // oracle: worlds where some declared concept is a definite member of
    // both denotations
    let mut oracle = Vec::new();
    for (w, world) in im.index.worlds.iter().enumerate() {
        let at = PointOfReference::new(w, 0);
        let p = im.set_at("price", at).ok_or("price")?;
        let r = im.set_at("rise", at).ok_or("rise")?;
        if im
            .concepts
            .iter()
            .any(|c| p.membership(&c.name) == Truth3::True && r.membership(&c.name) == Truth3::True)
        {
            oracle.push(world.clone());
        }
    }
    let detail = format!("paper {paper:?}, exhaustive {exhaustive:?}, brute force over declared data {oracle:?}");
    if exhaustive != oracle {
        return Err(format!("exhaustive mode disagrees with brute force: {detail}"));
    }
    if paper != ["I2"] || exhaustive != ["I1", "I2"] {
        return Err(format!("want paper [\"I2\"], exhaustive [\"I1\", \"I2\"]; {detail}"));
    }
    timed(LIMIT_4, start, detail)
}

/// Kleene tables: operator implementations and formula evaluation, both
/// against the min/max oracle.
pub fn kleene() -> Outcome {
    let mut cases = 0;
    for a in TRUTHS {
        expect(&format!("~{a}"), !a, k_not(a))?;
        cases += 1;
        for b in TRUTHS {
            expect(&format!("{a} & {b}"), a & b, k_and(a, b))?;
            expect(&format!("{a} | {b}"), a | b, k_or(a, b))?;
            expect(&format!("{a} -> {b}"), a.implies(b), k_implies(a, b))?;
            cases += 3;
        }
    }
    // through the evaluator: t, f, u are atoms with those values
    let theory = parse_theory(
        "sort s\nconst X : s\npred t : s default false\npred f : s default false\npred u : s default unknown\nfact t(X) = true\n",
    )
    .map_err(|e| e.to_string())?;
    let model = build_canonical_model(&theory, 0).map_err(|e| e.to_string())?;
    let name = |v: Truth3| match v {
        Truth3::True => "t(X)",
        Truth3::False => "f(X)",
        Truth3::Unknown => "u(X)",
    };
    for a in TRUTHS {
        expect(&format!("eval ~{a}"), eval(&model, &format!("~{}", name(a)), EvalMode::Paper)?.0, k_not(a))?;
        for b in TRUTHS {
            for (op, oracle) in [("&", k_and as fn(_, _) -> _), ("|", k_or), ("->", k_implies)] {
                let text = format!("{} {op} {}", name(a), name(b));
                expect(&format!("eval {a} {op} {b}"), eval(&model, &text, EvalMode::Paper)?.0, oracle(a, b))?;
            }
        }
    }
    Ok(format!("{cases} cases, operators and evaluator"))
}

/// Congruence closure against the naive fixpoint on seeded instances.
pub fn congruence() -> Outcome {
    let start = Instant::now();
    for seed in 0..SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (eqs, terms) = random_congruence_instance(&mut rng);
        let got = as_sets(congruence_close(&eqs, &terms));
        let want = naive_congruence(&eqs, &terms);
        if got != want {
            return Err(format!("seed {seed}: got {got:?}, want {want:?}"));
        }
    }
    timed(LIMIT_6, start, format!("{SEEDS} seeded instances"))
}

fn random_atom(model: &Model, rng: &mut impl Rng) -> Option<Atom> {
    let at = model.index().points().collect::<Vec<_>>();
    let at = *at.choose(rng)?;
    let atoms = model.atoms(at);
    atoms.choose(rng).map(|(a, _)| a.clone())
}

/// One random expansion step. Returns `None` when the step was refused.
fn random_step(model: &Model, rng: &mut impl Rng) -> Option<Model> {
    match rng.gen_range(0..10) {
        0..=5 => {
            let a = random_atom(model, rng)?;
            let v = Truth3::from_bool(rng.gen_bool(0.5));
            force(model, &a, v).ok()
        }
        6..=8 => {
            let a = random_atom(model, rng)?;
            extend_set(model, &a, None).ok()
        }
        _ => {
            let preds = &model.signature().preds;
            let p = preds.choose(rng)?;
            let q = preds.choose(rng)?;
            if p.arg_sorts != q.arg_sorts {
                return None;
            }
            force_predicates_equal(model, &p.name, &q.name).ok().map(|(m, _)| m)
        }
    }
}

/// Forcing and evaluation monotonicity over seeded step sequences, then
/// check_consistency against brute-force completion.
pub fn monotonicity() -> Outcome {
    let start = Instant::now();
    let mut steps = 0;
    let mut formulas = 0;
    for name in CORPUS {
        let base = corpus_model(name, corpus_depth(name));
        let gen = FormulaGen::new(&base);
        for seed in 0..SEEDS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<Formula> = (0..4).map(|_| gen.formula(&mut rng, 3)).collect();
            let mut before = Vec::new();
            for f in &fs {
                for mode in [EvalMode::Paper, EvalMode::Exhaustive] {
                    let (v, _) = eval_formula(&base, f, ORIGIN, mode).map_err(|e| format!("{name} {f}: {e}"))?;
                    before.push((f, mode, v));
                }
            }
            let mut model = base.clone();
            for _ in 0..rng.gen_range(1..=5) {
                let Some(next) = random_step(&model, &mut rng) else { continue };
                for (at, a, v) in definite_atoms(&model) {
                    let now = next.lookup_atom(&a, at).map_err(|e| e.to_string())?;
                    if now != v {
                        return Err(format!("{name} seed {seed}: {a} went {v} -> {now}"));
                    }
                }
                model = next;
                steps += 1;
            }
            for (f, mode, v) in &before {
                if !v.is_definite() {
                    continue;
                }
                let (now, _) = eval_formula(&model, f, ORIGIN, *mode).map_err(|e| e.to_string())?;
                if now != *v {
                    return Err(format!("{name} seed {seed}: `{f}` ({}) went {v} -> {now}", mode.as_str()));
                }
                formulas += 1;
            }
        }
    }
    let verdicts = consistency_agreement()?;
    timed(
        LIMIT_7,
        start,
        format!("{steps} steps, {formulas} definite evaluations kept, {verdicts} consistency verdicts agree"),
    )
}

/// Every candidate assignment on birds and on seeded random axiom
/// theories, compared with the brute-force oracle.
pub fn consistency_agreement() -> Result<usize, String> {
    let mut models = vec![("birds".to_string(), corpus_model("birds", 2))];
    for seed in 0..SEEDS / 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let text = random_axiom_theory(&mut rng);
        if let Ok(t) = parse_theory(&text) {
            if let Ok(m) = build_canonical_model(&t, 0) {
                models.push((format!("seed {}", 1000 + seed), m));
            }
        }
    }
    let mut verdicts = 0;
    for (label, model) in &models {
        for (a, _) in model.atoms(ORIGIN) {
            for v in [Truth3::True, Truth3::False] {
                let Some(want) = brute_consistent(model, &a, v, BRUTE_LIMIT) else { continue };
                let got = check_consistency(model, &a, v).map_err(|e| e.to_string())?.is_consistent();
                if got != want {
                    return Err(format!("{label}: {a} := {v}: engine {got}, brute force {want}"));
                }
                verdicts += 1;
            }
        }
    }
    Ok(verdicts)
}

/// Closed-default models never evaluate to unknown in exhaustive mode;
/// truth sets on total intensional models obey the Boolean identities.
pub fn totality() -> Outcome {
    let closed_johnny = corpus_text("johnny")
        .replace("default unknown", "default false")
        .replace("fact talk(M) = unknown\n", "");
    let models = vec![
        ("blocks", corpus_model("blocks", 1)),
        ("strings", corpus_model("strings", 1)),
        ("johnny (closed)", build_canonical_model(&parse_theory(&closed_johnny).unwrap(), 2).unwrap()),
        ("tense (closed)", build_canonical_model(&parse_theory(&corpus_text("tense").replace("default unknown", "default false")).unwrap(), 2).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut evaluated = 0;
    for (name, m) in &models {
        for at in m.index().points() {
            if m.atoms(at).iter().any(|(_, v)| *v == Truth3::Unknown) {
                return Err(format!("{name} is not total"));
            }
        }
        let gen = FormulaGen::new(m);
        for _ in 0..TOTALITY_FORMULAS {
            let f = gen.formula(&mut rng, 4);
            let at = *m.index().points().collect::<Vec<_>>().choose(&mut rng).unwrap();
            let (v, _) = eval_formula(m, &f, at, EvalMode::Exhaustive).map_err(|e| e.to_string())?;
            if v == Truth3::Unknown {
                return Err(format!("{name}: `{f}` is unknown"));
            }
            evaluated += 1;
        }
    }
    let mut theories = vec![total_price_rise()];
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        theories.push(parse_theory(&random_total_intensional(&mut rng)).map_err(|e| e.to_string())?);
    }
    let mut identities = 0;
    for t in &theories {
        let im = t.intension.as_ref().ok_or("not intensional")?;
        let all: BTreeSet<usize> = (0..im.index.worlds.len()).collect();
        let mut gen = FormulaGen::new(im);
        gen.modal = false;
        for _ in 0..25 {
            let f = gen.formula(&mut rng, 3);
            let g = gen.formula(&mut rng, 3);
            for time in 0..im.index.times.len() {
                let ts = |h: &Formula| truth_set(im, h, time, EvalMode::Exhaustive).map_err(|e| e.to_string());
                let (sf, sg) = (ts(&f)?, ts(&g)?);
                let and = ts(&Formula::and(f.clone(), g.clone()))?;
                let or = ts(&Formula::or(f.clone(), g.clone()))?;
                let not = ts(&Formula::not(f.clone()))?;
                let lem = ts(&Formula::or(f.clone(), Formula::not(f.clone())))?;
                expect(&format!("[{f} & {g}]"), and, sf.intersection(&sg).cloned().collect())?;
                expect(&format!("[{f} | {g}]"), or, sf.union(&sg).cloned().collect())?;
                expect(&format!("[~{f}]"), not, all.difference(&sf).cloned().collect())?;
                expect(&format!("[{f} | ~{f}]"), lem, all.clone())?;
                identities += 4;
            }
        }
    }
    Ok(format!("{evaluated} formulas definite, {identities} truth-set identities hold"))
}

/// Runs every corpus transcript twice in fresh copies of the corpus and
/// compares both runs with each other and with the stored golden output.
pub fn goldens() -> Outcome {
    let dir = corpus_dir().join("transcripts");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "txt" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    if names.is_empty() {
        return Err("no transcripts".into());
    }
    for name in &names {
        let text = std::fs::read_to_string(dir.join(format!("{name}.txt"))).map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(dir.join(format!("{name}.out"))).map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for _ in 0..2 {
            let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
            copy_tree(&corpus_dir(), tmp.path());
            let config = SessionConfig {
                base_dir: tmp.path().join("transcripts"),
                ..SessionConfig::default()
            };
            runs.push(run_transcript(&mut Repl::new(config), &text));
        }
        if runs[0] != runs[1] {
            return Err(format!("{name}: two runs differ"));
        }
        if runs[0] != golden {
            let line = runs[0]
                .lines()
                .zip(golden.lines())
                .position(|(a, b)| a != b)
                .map(|i| i + 1)
                .unwrap_or_else(|| runs[0].lines().count().min(golden.lines().count()) + 1);
            return Err(format!("{name}: differs from the golden output at line {line}"));
        }
    }
    Ok(format!("{} transcripts byte-identical across runs and to goldens", names.len()))
}
