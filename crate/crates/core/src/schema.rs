//! JSON instance documents.
//!
//! ```json
//! {
//!   "name": "demo",
//!   "n": 2,
//!   "scenarios": ["a", "b"],
//!   "objectives": {"table": {"x1": {"a": [1, 2], "b": [2, 1]}}},
//!   "candidates": ["x1"]
//! }
//! ```
//!
//! `scenarios` is either a list of ids or an object with `ids` and optional
//! `points`, `A`, `b` and `convex_closure`. `objectives` holds exactly one of
//! `table`, `affine_family`, `linear_in_s` or `least_squares`. `candidates`
//! is a list of ids, `{"points": [...]}` with barycentric coordinates, or
//! `{"simplex": {"dim": k, "step": h}}`. An optional `ambiguity` object lists
//! generator `distributions` with optional `labels`, `convex_closure` and an
//! expectation `constraint` map.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distro::{AmbiguitySet, ExpectationConstraint};
use crate::error::{Error, Result};
use crate::model::{
    CandidateSet, Decision, Instance, LeastSquaresMap, LeastSquaresObjective, Matrix, ObjectiveVector, Polyhedron,
    ScenarioSet, SimplexGrid, SimplexPoint, UncertainObjectiveMap,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub scenarios: ScenariosDoc,
    pub objectives: ObjectivesDoc,
    pub candidates: CandidatesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambiguity: Option<AmbiguityDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenariosDoc {
    Ids(Vec<String>),
    Full(ScenarioSetDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSetDoc {
    pub ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub convex_closure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectivesDoc {
    /// candidate -> scenario -> vector.
    Table(BTreeMap<String, BTreeMap<String, Vec<f64>>>),
    /// One `n x k` matrix per scenario.
    AffineFamily(Vec<Vec<Vec<f64>>>),
    LinearInS { matrices: Vec<Vec<Vec<f64>>> },
    LeastSquares(LeastSquaresDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeastSquaresDoc {
    pub operators: Vec<Vec<Vec<f64>>>,
    pub objectives: Vec<LeastSquaresObjectiveDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeastSquaresObjectiveDoc {
    pub weights: Vec<f64>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CandidatesDoc {
    Ids(Vec<String>),
    Points { points: Vec<Vec<f64>> },
    Simplex { simplex: SimplexDoc },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexDoc {
    pub dim: usize,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbiguityDoc {
    pub distributions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub convex_closure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub rows: usize,
    pub map: ObjectivesDoc,
}

/// A parsed document: the instance and its optional ambiguity data.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub instance: Instance,
    pub ambiguity: Option<(AmbiguitySet, Option<ExpectationConstraint>)>,
}

fn matrix(rows: Vec<Vec<f64>>) -> Result<Matrix> {
    Matrix::from_rows(rows)
}

fn map_from_doc(doc: ObjectivesDoc, scenarios: &ScenarioSet) -> Result<UncertainObjectiveMap> {
    Ok(match doc {
        ObjectivesDoc::Table(t) => {
            let mut table = BTreeMap::new();
            for (cand, by_scenario) in t {
                for s in by_scenario.keys() {
                    scenarios.index_of(s)?;
                }
                let row = scenarios
                    .ids()
                    .iter()
                    .map(|s| {
                        let v = by_scenario
                            .get(s)
                            .ok_or_else(|| Error::Parse(format!("candidate `{cand}` has no entry for scenario `{s}`")))?;
                        ObjectiveVector::new(v.clone())
                    })
                    .collect::<Result<Vec<_>>>()?;
                table.insert(cand, row);
            }
            UncertainObjectiveMap::Table(table)
        }
        ObjectivesDoc::AffineFamily(v) => {
            UncertainObjectiveMap::AffineFamily(v.into_iter().map(matrix).collect::<Result<_>>()?)
        }
        ObjectivesDoc::LinearInS { matrices } => {
            UncertainObjectiveMap::LinearInS(matrices.into_iter().map(matrix).collect::<Result<_>>()?)
        }
        ObjectivesDoc::LeastSquares(ls) => UncertainObjectiveMap::LeastSquares(LeastSquaresMap {
            operators: ls.operators.into_iter().map(matrix).collect::<Result<_>>()?,
            objectives: ls
                .objectives
                .into_iter()
                .map(|o| LeastSquaresObjective {
                    weights: o.weights,
                    targets: o.targets,
                })
                .collect(),
        }),
    })
}

fn map_to_doc(map: &UncertainObjectiveMap, scenarios: &ScenarioSet) -> ObjectivesDoc {
    match map {
        UncertainObjectiveMap::Table(t) => ObjectivesDoc::Table(
            t.iter()
                .map(|(cand, row)| {
                    let by = scenarios
                        .ids()
                        .iter()
                        .zip(row)
                        .map(|(s, v)| (s.clone(), v.values().to_vec()))
                        .collect();
                    (cand.clone(), by)
                })
                .collect(),
        ),
        UncertainObjectiveMap::AffineFamily(v) => ObjectivesDoc::AffineFamily(v.iter().map(Matrix::to_rows).collect()),
        UncertainObjectiveMap::LinearInS(fs) => ObjectivesDoc::LinearInS {
            matrices: fs.iter().map(Matrix::to_rows).collect(),
        },
        UncertainObjectiveMap::LeastSquares(ls) => ObjectivesDoc::LeastSquares(LeastSquaresDoc {
            operators: ls.operators.iter().map(Matrix::to_rows).collect(),
            objectives: ls
                .objectives
                .iter()
                .map(|o| LeastSquaresObjectiveDoc {
                    weights: o.weights.clone(),
                    targets: o.targets.clone(),
                })
                .collect(),
        }),
    }
}

impl InstanceDoc {
    pub fn into_loaded(self) -> Result<Loaded> {
        let scenarios = match self.scenarios {
            ScenariosDoc::Ids(ids) => ScenarioSet::new(ids)?,
            ScenariosDoc::Full(d) => {
                let mut s = ScenarioSet::new(d.ids)?.with_convex_closure(d.convex_closure);
                if let Some(p) = d.points {
                    s = s.with_points(p)?;
                }
                match (d.a, d.b) {
                    (Some(a), Some(b)) => s = s.with_polyhedron(Polyhedron::new(matrix(a)?, b)?)?,
                    (None, None) => {}
                    _ => return Err(Error::Parse("scenario polyhedron needs both `A` and `b`".into())),
                }
                s
            }
        };
        let objectives = map_from_doc(self.objectives, &scenarios)?;
        let candidates = match self.candidates {
            CandidatesDoc::Ids(ids) => CandidateSet::Explicit(ids.into_iter().map(Decision::Id).collect()),
            CandidatesDoc::Points { points } => CandidateSet::Explicit(
                points
                    .into_iter()
                    .map(|p| SimplexPoint::new(p).map(Decision::Point))
                    .collect::<Result<_>>()?,
            ),
            CandidatesDoc::Simplex { simplex } => CandidateSet::Simplex(SimplexGrid::new(simplex.dim, simplex.step)?),
        };
        let mut instance = Instance::new(self.n, scenarios.clone(), objectives, candidates)?;
        if let Some(scale) = self.scale {
            instance = instance.with_decision_scale(scale)?;
        }
        if let Some(name) = self.name {
            instance = instance.with_name(name);
        }
        let ambiguity = match self.ambiguity {
            None => None,
            Some(a) => {
                let set = match a.labels {
                    Some(l) => AmbiguitySet::with_labels(scenarios.clone(), a.distributions, l, a.convex_closure)?,
                    None => AmbiguitySet::new(scenarios.clone(), a.distributions, a.convex_closure)?,
                };
                let constraint = match a.constraint {
                    Some(c) => Some(ExpectationConstraint {
                        rows: c.rows,
                        map: map_from_doc(c.map, &scenarios)?,
                    }),
                    None => None,
                };
                Some((set, constraint))
            }
        };
        Ok(Loaded { instance, ambiguity })
    }

    pub fn from_instance(instance: &Instance) -> InstanceDoc {
        let s = instance.scenarios();
        let scenarios = if s.points().is_none() && s.polyhedron().is_none() && !s.convex_closure() {
            ScenariosDoc::Ids(s.ids().to_vec())
        } else {
            ScenariosDoc::Full(ScenarioSetDoc {
                ids: s.ids().to_vec(),
                points: s.points().map(<[Vec<f64>]>::to_vec),
                a: s.polyhedron().map(|p| p.a.to_rows()),
                b: s.polyhedron().map(|p| p.b.clone()),
                convex_closure: s.convex_closure(),
            })
        };
        let candidates = match instance.candidates() {
            CandidateSet::Simplex(g) => CandidatesDoc::Simplex {
                simplex: SimplexDoc { dim: g.dim, step: g.step },
            },
            CandidateSet::Explicit(list) if list.iter().all(|d| matches!(d, Decision::Point(_))) => CandidatesDoc::Points {
                points: list
                    .iter()
                    .filter_map(|d| d.as_point().map(|p| p.weights().to_vec()))
                    .collect(),
            },
            CandidateSet::Explicit(list) => CandidatesDoc::Ids(list.iter().map(Decision::label).collect()),
        };
        InstanceDoc {
            name: instance.name().map(str::to_string),
            n: instance.n(),
            scenarios,
            objectives: map_to_doc(instance.objectives(), s),
            candidates,
            scale: (instance.decision_scale() != 1.0).then_some(instance.decision_scale()),
            ambiguity: None,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Loaded> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_loaded()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(instance)).expect("documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::phantom::PhantomConfig;

    #[test]
    fn builtins_round_trip() {
        for inst in [
            fixtures::problem_1(0.05).unwrap(),
            fixtures::problem_2(),
            fixtures::problem_2_grid(0.25).unwrap(),
        ] {
            let back = parse_instance(&instance_to_json(&inst)).unwrap();
            assert_eq!(back.instance, inst);
        }
    }

    #[test]
    fn phantom_round_trips() {
        let cfg = PhantomConfig {
            spots: 4,
            step: 0.25,
            ..PhantomConfig::default()
        };
        let inst = cfg.generate().unwrap();
        let back = parse_instance(&instance_to_json(&inst)).unwrap();
        assert_eq!(back.instance, inst);
    }

    #[test]
    fn table_document() {
        let text = r#"{
            "n": 2,
            "scenarios": ["a", "b"],
            "objectives": {"table": {
                "x1": {"a": [1, 2], "b": [2, 1]},
                "x2": {"b": [3, 3], "a": [0, 0]}
            }},
            "candidates": ["x1", "x2"],
            "ambiguity": {"distributions": [[0.5, 0.5]], "convex_closure": true}
        }"#;
        let loaded = parse_instance(text).unwrap();
        let inst = &loaded.instance;
        assert_eq!(inst.evaluate(&Decision::Id("x2".into()), "b").unwrap().values(), &[3.0, 3.0]);
        assert!(loaded.ambiguity.is_some());
        let back = parse_instance(&instance_to_json(inst)).unwrap();
        assert_eq!(&back.instance, inst);
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_instance("{"), Err(Error::Parse(_))));
        let missing = r#"{"n": 1, "scenarios": ["a", "b"],
            "objectives": {"table": {"x": {"a": [1]}}}, "candidates": ["x"]}"#;
        assert!(matches!(parse_instance(missing), Err(Error::Parse(_))));
        let empty = r#"{"n": 1, "scenarios": ["a"],
            "objectives": {"table": {"x": {"a": [1]}}}, "candidates": []}"#;
        assert_eq!(parse_instance(empty), Err(Error::EmptyCandidates));
    }
}
