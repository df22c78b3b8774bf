mod common;

use common::*;
use gdiagram::intension::CONCEPT_LIMIT;
use gdiagram::{
    as_indexed_diagrams, build_canonical_model, eval_formula, list_individual_concepts, parse_formula, parse_theory,
    EvalMode, Error, IndexSet, Interpretation, PointOfReference, Theory, Truth3,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn concept_enumeration() {
    let refs = IndexSet::new(&["I1", "I2"], &["t0"]).unwrap();
    let two = list_individual_concepts(&strings(&["NI", "HU"]), &refs, CONCEPT_LIMIT).unwrap();
    let names: Vec<&str> = two.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["NINIIC", "NIHUIC", "HUNIIC", "HUHUIC"]);
    let hu_ni = &two[2];
    assert_eq!(hu_ni.graph, ["HU", "NI"]);
    assert_eq!(list_individual_concepts(&strings(&["J"]), &refs, CONCEPT_LIMIT).unwrap().len(), 1);
    let four = list_individual_concepts(&strings(&["J", "M", "NI", "HU"]), &refs, CONCEPT_LIMIT).unwrap();
    assert_eq!(four.len(), 16);
}

#[test]
fn enumeration_count_is_a_power() {
    for worlds in 1..=3 {
        for times in 1..=2 {
            for n in 1usize..=4 {
                let w: Vec<String> = (0..worlds).map(|i| format!("w{i}")).collect();
                let t: Vec<String> = (0..times).map(|i| format!("t{i}")).collect();
                let refs = IndexSet::new(
                    &w.iter().map(String::as_str).collect::<Vec<_>>(),
                    &t.iter().map(String::as_str).collect::<Vec<_>>(),
                )
                .unwrap();
                let e: Vec<String> = (0..n).map(|i| format!("E{i}")).collect();
                let all = list_individual_concepts(&e, &refs, CONCEPT_LIMIT).unwrap();
                assert_eq!(all.len(), n.pow((worlds * times) as u32));
                assert!(all.iter().all(|c| c.graph.len() == worlds * times));
            }
        }
    }
}

#[test]
fn enumeration_bound() {
    let refs = IndexSet::new(&["a", "b", "c", "d", "e"], &["0", "1"]).unwrap();
    let e = strings(&["A", "B", "C", "D", "E"]);
    assert!(matches!(list_individual_concepts(&e, &refs, CONCEPT_LIMIT), Err(Error::ResourceLimit(_))));
}

#[test]
fn price_and_rise_denotations() {
    let t = corpus_theory("price_rise");
    let im = t.intension.as_ref().unwrap();
    let i1 = PointOfReference::new(0, 0);
    let i2 = PointOfReference::new(1, 0);
    assert_eq!(im.set_at("price", i1).unwrap().name, "PRICE1");
    assert_eq!(im.set_at("price", i2).unwrap().name, "PRICE2");
    assert_eq!(im.set_at("price", i2).unwrap().membership("NINIIC"), Truth3::Unknown);
    assert_eq!(im.set_at("rise", i1).unwrap().name, "RISE1");
    assert_eq!(im.set_at("rise", i2).unwrap().name, "RISE1");
    let m = build_canonical_model(&t, 2).unwrap();
    assert_eq!(m.partial_set("price", i2).unwrap().to_string(), "{NINIIC?, HUNIIC}");
    assert_eq!(m.partial_set("rise", i1).unwrap().to_string(), "{NIHUIC}");
}


#[test]
fn empty_property_is_false_everywhere() {
    let text = "worlds I1 I2\nentity NI\nconcept C = I1:NI I2:NI\nconceptset NONE =\nconceptset ALL = C\nproperty p = I1:NONE I2:ALL\n";
    let t = parse_theory(text).unwrap();
    let m = build_canonical_model(&t, 1).unwrap();
    let ps = m.partial_set("p", PointOfReference::new(0, 0)).unwrap();
    assert!(ps.members.is_empty() && ps.unknowns.is_empty());
    assert_eq!(m.partial_set("p", PointOfReference::new(1, 0)).unwrap().to_string(), "{C}");
}

#[test]
fn declaration_errors() {
    let missing_concept = "worlds I1\nentity NI\nconceptset S = NOPE\nproperty p = I1:S\n";
    assert!(parse_theory(missing_concept).is_err());
    let missing_world = "worlds I1 I2\nentity NI\nconcept C = I1:NI I2:NI\nconceptset S = C\nproperty p = I1:S\n";
    assert!(parse_theory(missing_world).is_err());
    let partial_concept = "worlds I1 I2\nentity NI\nconcept C = I1:NI\nconceptset S = C\nproperty p = I1:S I2:S\n";
    assert!(parse_theory(partial_concept).is_err());
}

#[test]
fn diagrams_carry_memberships() {
    let t = corpus_theory("price_rise");
    let im = t.intension.as_ref().unwrap();
    let d = as_indexed_diagrams(im);
    let i1 = PointOfReference::new(0, 0);
    let i2 = PointOfReference::new(1, 0);
    let price = atom("price", &["NINIIC"]);
    assert_eq!(d.at(i1).lookup_atom(im.signature(), &price).unwrap(), Truth3::True);
    assert_eq!(d.at(i2).lookup_atom(im.signature(), &price).unwrap(), Truth3::Unknown);
}

#[test]
fn total_models_give_definite_diagrams() {
    let t = total_price_rise();
    let m = build_canonical_model(&t, 1).unwrap();
    for at in m.index().points() {
        assert!(m.atoms(at).iter().all(|(_, v)| v.is_definite()));
    }
}

/// Evaluating over the intensional model and over its diagrams agrees at
/// every point, on the corpus formulas and random ones.
#[test]
fn round_trip_through_diagrams() {
    let mut theories: Vec<Theory> = vec![corpus_theory("price_rise"), total_price_rise()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        theories.push(parse_theory(&random_total_intensional(&mut rng)).unwrap());
    }
    let fixed = [
        "exists x:concept . (price(x) & rise(x))",
        "price(n)",
        "ext(NIHUIC) = HU",
        "forall x:concept . (rise(x) -> price(x))",
        "nec exists x:concept . rise(x)",
    ];
    for t in &theories {
        let im = t.intension.as_ref().unwrap();
        let diagrams = Theory {
            intension: None,
            ..t.clone()
        };
        let m = build_canonical_model(&diagrams, 1).unwrap();
        let mut formulas: Vec<_> = fixed.iter().filter_map(|f| parse_formula(f, im.signature()).ok()).collect();
        let gen = FormulaGen::new(im);
        formulas.extend((0..60).map(|_| gen.formula(&mut rng, 3)));
        for f in &formulas {
            for at in im.index().points() {
                for mode in [EvalMode::Paper, EvalMode::Exhaustive] {
                    let a = eval_formula(im, f, at, mode).unwrap().0;
                    let b = eval_formula(&m, f, at, mode).unwrap().0;
                    assert_eq!(a, b, "{f} at {at:?} ({})", mode.as_str());
                }
            }
        }
    }
}

#[test]
fn concepts_are_total() {
    let t = corpus_theory("price_rise");
    let im = t.intension.as_ref().unwrap();
    for c in &im.concepts {
        assert_eq!(c.graph.len(), im.index.point_count());
    }
}
