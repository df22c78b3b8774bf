//! Browser bindings: load a theory, evaluate formulas over the grid of
//! points, force atoms.

use gdiagram::{eval_formula, parse_formula, EvalMode, Session, SessionConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Explorer {
    session: Session,
}

fn js(e: gdiagram::Error) -> JsError {
    JsError::new(&e.to_string())
}

impl Explorer {
    pub fn load_text(theory: &str, depth: usize) -> gdiagram::Result<Explorer> {
        let config = SessionConfig {
            depth,
            ..Default::default()
        };
        Ok(Explorer {
            session: Session::load(theory, config)?,
        })
    }

    /// Value at every point as JSON: worlds, times, and one row of cells
    /// per world.
    pub fn grid_json(&self, formula: &str, mode: &str) -> gdiagram::Result<String> {
        let model = self.session.model();
        let f = parse_formula(formula, model.signature())?;
        let mode: EvalMode = mode.parse()?;
        let index = model.index();
        let mut rows = Vec::new();
        for w in 0..index.worlds.len() {
            let mut row = Vec::new();
            for t in 0..index.times.len() {
                let (v, _) = eval_formula(model, &f, gdiagram::PointOfReference::new(w, t), mode)?;
                row.push(v.to_string());
            }
            rows.push(row);
        }
        Ok(json!({ "worlds": index.worlds, "times": index.times, "cells": rows }).to_string())
    }

    pub fn command(&mut self, line: &str) -> gdiagram::Result<String> {
        Ok(self.session.run(line)?.text)
    }
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(theory: &str, depth: usize) -> Result<Explorer, JsError> {
        Explorer::load_text(theory, depth).map_err(js)
    }

    pub fn report(&self) -> String {
        self.session.report()
    }

    /// Evaluation report with trace and any pending choices.
    pub fn eval(&mut self, formula: &str, mode: &str) -> Result<String, JsError> {
        self.command(&format!("eval {formula} mode {mode}")).map_err(js)
    }

    pub fn grid(&self, formula: &str, mode: &str) -> Result<String, JsError> {
        self.grid_json(formula, mode).map_err(js)
    }

    /// `walk(B) true`, optionally followed by `at W T`. Returns the new model.
    pub fn force(&mut self, assignment: &str) -> Result<String, JsError> {
        self.command(&format!("force {assignment}")).map_err(js)
    }

    pub fn undo(&mut self) -> Result<String, JsError> {
        self.command("undo").map_err(js)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TENSE: &str = include_str!("../../../corpus/tense.thy");
    const JOHNNY: &str = include_str!("../../../corpus/johnny.thy");

    #[test]
    fn grid_has_one_cell_per_point() {
        let e = Explorer::load_text(TENSE, 2).unwrap();
        let g: serde_json::Value = serde_json::from_str(&e.grid_json("rain(Here)", "paper").unwrap()).unwrap();
        assert_eq!(g["worlds"], json!(["w1", "w2"]));
        assert_eq!(g["cells"], json!([["false", "true", "false"], ["false", "false", "true"]]));
    }

    #[test]
    fn force_then_eval() {
        let mut e = Explorer::load_text(JOHNNY, 2).unwrap();
        let f = "forall u:entity . (man(u) -> walk(u))";
        assert!(e.command(&format!("eval {f}")).unwrap().contains("VALUE: unknown"));
        e.command("force walk(B) true").unwrap();
        assert!(e.command(&format!("eval {f}")).unwrap().contains("VALUE: true"));
        assert!(e.command("force walk(J) false").is_err());
    }
}
