//! Behavior and inequality files.
//!
//! A behavior file is a JSON object with `"scenario": [N, O]` and either a
//! `"table"` (all `O²N²` entries, index order `x, y, a, b`) or a
//! `"collins_gisin"` vector. Entries are JSON numbers (float mode) or
//! `"p/q"` strings (exact mode); the two may not be mixed.

use serde_json::Value;

use super::{Behavior, Inequality, Scenario, ScenarioError};
use crate::geometry::rational::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug)]
pub enum LoadedBehavior {
    Exact(Behavior<Rational>),
    Float(Behavior<f64>),
}

impl LoadedBehavior {
    pub fn scenario(&self) -> Scenario {
        match self {
            Self::Exact(b) => b.scenario(),
            Self::Float(b) => b.scenario(),
        }
    }
}

fn parse_err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse(msg.into())
}

pub fn parse_behavior(text: &str) -> Result<LoadedBehavior, ScenarioError> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let sc = v
        .get("scenario")
        .and_then(|s| s.as_array())
        .filter(|s| s.len() == 2)
        .and_then(|s| Some((s[0].as_u64()? as usize, s[1].as_u64()? as usize)))
        .ok_or_else(|| parse_err("missing \"scenario\": [N, O]"))?;
    let scenario = Scenario::new(sc.0, sc.1)?;
    let (entries, is_table) = match (v.get("table"), v.get("collins_gisin")) {
        (Some(t), None) => (t, true),
        (None, Some(c)) => (c, false),
        _ => return Err(parse_err("need exactly one of \"table\" or \"collins_gisin\"")),
    };
    let entries = entries.as_array().ok_or_else(|| parse_err("entries must be an array"))?;
    if entries.iter().all(|e| e.is_string()) {
        let vals = entries
            .iter()
            .map(|e| parse_rational(e.as_str().unwrap()).map_err(|e| parse_err(e.to_string())))
            .collect::<Result<Vec<Rational>, _>>()?;
        let b = if is_table {
            Behavior::new(scenario, vals)?
        } else {
            Behavior::from_collins_gisin(scenario, &vals)?
        };
        Ok(LoadedBehavior::Exact(b))
    } else if entries.iter().all(|e| e.is_number()) {
        let vals: Vec<f64> = entries.iter().map(|e| e.as_f64().unwrap()).collect();
        let b = if is_table {
            Behavior::new(scenario, vals)?
        } else {
            Behavior::from_collins_gisin(scenario, &vals)?
        };
        Ok(LoadedBehavior::Float(b))
    } else {
        Err(parse_err("entries must be all numbers or all rational strings"))
    }
}

pub fn behavior_to_json(b: &LoadedBehavior) -> Value {
    match b {
        LoadedBehavior::Exact(b) => serde_json::json!({
            "scenario": [b.scenario().settings, b.scenario().outcomes],
            "table": b.table().iter().map(format_rational).collect::<Vec<_>>(),
        }),
        LoadedBehavior::Float(b) => serde_json::json!({
            "scenario": [b.scenario().settings, b.scenario().outcomes],
            "table": b.table(),
        }),
    }
}

pub fn parse_inequality(text: &str) -> Result<Inequality, ScenarioError> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collins_gisin_float_file() {
        let text = r#"{"scenario":[2,2],"collins_gisin":[0.5,0.5,0.5,0.5,0.25,0.25,0.25,0.25]}"#;
        match parse_behavior(text).unwrap() {
            LoadedBehavior::Float(b) => {
                assert!(b.table().iter().all(|&p| (p - 0.25).abs() < 1e-15));
            }
            _ => panic!("expected float mode"),
        }
    }

    #[test]
    fn exact_table_round_trip() {
        let sc = Scenario::new(2, 2).unwrap();
        let b = LoadedBehavior::Exact(Behavior::uniform(sc));
        let text = behavior_to_json(&b).to_string();
        match parse_behavior(&text).unwrap() {
            LoadedBehavior::Exact(back) => assert_eq!(back, Behavior::uniform(sc)),
            _ => panic!("expected exact mode"),
        }
    }

    #[test]
    fn malformed_files() {
        assert!(parse_behavior("{}").is_err());
        assert!(parse_behavior(r#"{"scenario":[2,2],"table":[0.25,"1/4"]}"#).is_err());
        assert!(parse_behavior(r#"{"scenario":[2,2],"table":[0.25]}"#).is_err());
        assert!(parse_behavior(r#"{"scenario":[2,2],"table":[],"collins_gisin":[]}"#).is_err());
    }
}
