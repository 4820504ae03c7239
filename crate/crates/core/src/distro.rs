//! Distributionally robust layer.
//!
//! An ambiguity set is a finite family of probability vectors over the
//! scenarios, optionally closed under convex combination. Its worst-case
//! expectation problem is an ordinary robust problem whose scenarios are the
//! generating distributions and whose objective is `g(x; pi) = E_pi[f(x; S)]`.

use std::collections::BTreeMap;

use crate::efficiency::classify;
use crate::error::{dimension, domain, Error, Result};
use crate::geometry::Tolerances;
use crate::model::{
    CandidateSet, Decision, Instance, Matrix, ObjectiveVector, ScenarioSet, UncertainObjectiveMap,
};

/// Tolerance on probability vectors.
pub const PROB_TOL: f64 = 1e-12;

/// Slack allowed when checking `E_pi[c(x; S)] <= 0`.
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySet {
    support: ScenarioSet,
    distributions: Vec<Vec<f64>>,
    labels: Vec<String>,
    convex_closure: bool,
}

impl AmbiguitySet {
    pub fn new(support: ScenarioSet, distributions: Vec<Vec<f64>>, convex_closure: bool) -> Result<Self> {
        let labels = (1..=distributions.len()).map(|i| format!("pi{i}")).collect();
        AmbiguitySet::with_labels(support, distributions, labels, convex_closure)
    }

    pub fn with_labels(
        support: ScenarioSet,
        distributions: Vec<Vec<f64>>,
        labels: Vec<String>,
        convex_closure: bool,
    ) -> Result<Self> {
        if distributions.is_empty() {
            return Err(domain("ambiguity set needs at least one distribution"));
        }
        if labels.len() != distributions.len() {
            return Err(dimension(format!("{} labels for {} distributions", labels.len(), distributions.len())));
        }
        for pi in &distributions {
            if pi.len() != support.len() {
                return Err(dimension(format!("distribution has {} entries, support has {}", pi.len(), support.len())));
            }
            if pi.iter().any(|p| !p.is_finite() || *p < -PROB_TOL) {
                return Err(domain(format!("distribution {pi:?} has a negative entry")));
            }
            let total: f64 = pi.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(domain(format!("distribution {pi:?} sums to {total}")));
            }
        }
        // Labels become scenario ids and must be unique.
        ScenarioSet::new(labels.clone())?;
        Ok(AmbiguitySet {
            support,
            distributions,
            labels,
            convex_closure,
        })
    }

    /// All point masses, one per scenario, labelled by the scenario ids.
    pub fn diracs(support: ScenarioSet, convex_closure: bool) -> Self {
        let s = support.len();
        let dists = (0..s)
            .map(|i| (0..s).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let labels = support.ids().to_vec();
        AmbiguitySet {
            support,
            distributions: dists,
            labels,
            convex_closure,
        }
    }

    pub fn support(&self) -> &ScenarioSet {
        &self.support
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn convex_closure(&self) -> bool {
        self.convex_closure
    }
}

/// Constraint map `c(x; s)`; a candidate is feasible when
/// `E_pi[c(x; S)] <= 0` holds row by row for every generator `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationConstraint {
    pub rows: usize,
    pub map: UncertainObjectiveMap,
}

fn mix_vectors(pi: &[f64], items: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; items[0].len()];
    for (p, v) in pi.iter().zip(items) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += p * x;
        }
    }
    out
}

fn expectation(instance: &Instance, d: &Decision, pi: &[f64]) -> Result<Vec<f64>> {
    let img = instance.image(d)?;
    let pts: Vec<Vec<f64>> = img.points().iter().map(|p| p.values().to_vec()).collect();
    Ok(mix_vectors(pi, &pts))
}

/// Reduces the worst-case expectation problem to a robust instance.
///
/// Scenarios of the result are the generators; its map is `g(x; pi)`.
/// Candidates violating the expectation constraint for some generator are
/// removed. With `convex_closure` the result is flagged so that its images
/// are treated as the convex hulls of the generator images.
pub fn to_robust(
    instance: &Instance,
    ambiguity: &AmbiguitySet,
    constraint: Option<&ExpectationConstraint>,
) -> Result<Instance> {
    if ambiguity.support.ids() != instance.scenarios().ids() {
        return Err(dimension("ambiguity support must list the instance scenarios in order"));
    }
    let dists = &ambiguity.distributions;
    let mut scenarios = ScenarioSet::new(ambiguity.labels.clone())?.with_convex_closure(ambiguity.convex_closure);
    let mut decisions = instance.decisions()?;
    let total = decisions.len();

    if let Some(c) = constraint {
        let cinst = Instance::new(c.rows, instance.scenarios().clone(), c.map.clone(), instance.candidates().clone())?
            .with_decision_scale(instance.decision_scale())?;
        let mut keep = Vec::with_capacity(decisions.len());
        for d in decisions {
            let mut ok = true;
            for pi in dists {
                if expectation(&cinst, &d, pi)?.iter().any(|v| *v > CONSTRAINT_TOL) {
                    ok = false;
                    break;
                }
            }
            if ok {
                keep.push(d);
            }
        }
        if keep.is_empty() {
            return Err(Error::EmptyFeasibleSet);
        }
        decisions = keep;
    }
    let candidates = if decisions.len() == total {
        instance.candidates().clone()
    } else {
        CandidateSet::Explicit(decisions.clone())
    };

    let objectives = match instance.objectives() {
        UncertainObjectiveMap::AffineFamily(v) => {
            UncertainObjectiveMap::AffineFamily(dists.iter().map(|pi| Matrix::combination(v, pi)).collect())
        }
        UncertainObjectiveMap::LinearInS(fs) => {
            let points = instance
                .scenarios()
                .points()
                .ok_or_else(|| domain("linear_in_s objectives need scenario coordinates"))?;
            let mixed = dists.iter().map(|pi| mix_vectors(pi, points)).collect();
            scenarios = scenarios.with_points(mixed)?;
            if let Some(poly) = instance.scenarios().polyhedron() {
                scenarios = scenarios.with_polyhedron(poly.clone())?;
            }
            UncertainObjectiveMap::LinearInS(fs.clone())
        }
        UncertainObjectiveMap::Table(_) | UncertainObjectiveMap::LeastSquares(_) => {
            // Expectations of a table, or of squared residuals, are tabulated
            // per candidate.
            let mut table = BTreeMap::new();
            for d in &decisions {
                let row = dists
                    .iter()
                    .map(|pi| ObjectiveVector::new(expectation(instance, d, pi)?))
                    .collect::<Result<Vec<_>>>()?;
                table.insert(d.label(), row);
            }
            let ids = decisions.iter().map(|d| Decision::Id(d.label())).collect();
            let out = Instance::new(instance.n(), scenarios, UncertainObjectiveMap::Table(table), CandidateSet::Explicit(ids))?;
            return Ok(match instance.name() {
                Some(n) => out.with_name(n),
                None => out,
            });
        }
    };
    instance.with_parts(scenarios, objectives, candidates)
}

/// Classifies the reduced instance both ways and reports whether the robust
/// and convex-hull efficient sets coincide.
pub fn che_equals_robust_check(instance: &Instance, ambiguity: &AmbiguitySet, tol: &Tolerances) -> Result<bool> {
    let reduced = to_robust(instance, ambiguity, None)?;
    let report = classify(&reduced, tol)?;
    Ok(report.robust_set() == report.convex_hull_set())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::SimplexPoint;

    fn p1(x: f64) -> Decision {
        Decision::Point(SimplexPoint::from_reduced(&[x]).unwrap())
    }

    #[test]
    fn diracs_reproduce_images() {
        let inst = fixtures::problem_1(0.1).unwrap();
        let amb = AmbiguitySet::diracs(inst.scenarios().clone(), false);
        let red = to_robust(&inst, &amb, None).unwrap();
        for d in inst.decisions().unwrap() {
            assert_eq!(inst.image(&d).unwrap(), red.image(&d).unwrap());
        }
    }

    #[test]
    fn convex_diracs_make_labels_coincide() {
        let tol = Tolerances::default();
        let inst = fixtures::problem_1(0.05).unwrap();
        let amb = AmbiguitySet::diracs(inst.scenarios().clone(), true);
        assert!(che_equals_robust_check(&inst, &amb, &tol).unwrap());
        // The reduced problem's robust labels are the original hull labels.
        let red = classify(&to_robust(&inst, &amb, None).unwrap(), &tol).unwrap();
        let orig = classify(&inst, &tol).unwrap();
        assert_eq!(red.robust_set(), orig.convex_hull_set());
    }

    #[test]
    fn uniform_generator_averages() {
        let inst = fixtures::problem_1(0.5).unwrap();
        let third = 1.0 / 3.0;
        let amb = AmbiguitySet::new(inst.scenarios().clone(), vec![vec![third, third, third]], true).unwrap();
        let red = to_robust(&inst, &amb, None).unwrap();
        let img = red.image(&p1(0.0)).unwrap();
        assert_eq!(img.len(), 1);
        assert!((img.points()[0][0] - 2.0).abs() < 1e-12);
        assert!((img.points()[0][1] - 2.0).abs() < 1e-12);
        assert!(che_equals_robust_check(&inst, &amb, &Tolerances::default()).unwrap());
    }

    #[test]
    fn constraint_filters_candidates() {
        let inst = fixtures::problem_1(0.25).unwrap();
        let amb = AmbiguitySet::diracs(inst.scenarios().clone(), true);
        // c(x; s) = f_1(x; s) - 3: keeps x with every scenario's first objective <= 3.
        let UncertainObjectiveMap::AffineFamily(v) = inst.objectives() else { unreachable!() };
        let rows = v
            .iter()
            .map(|m| Matrix::from_rows(vec![m.row(0).iter().map(|a| a - 3.0).collect()]).unwrap())
            .collect();
        let c = ExpectationConstraint {
            rows: 1,
            map: UncertainObjectiveMap::AffineFamily(rows),
        };
        let red = to_robust(&inst, &amb, Some(&c)).unwrap();
        let labels: Vec<String> = red.decisions().unwrap().iter().map(Decision::label).collect();
        // f_1(x; 3) = 4 - 2x <= 3 needs x >= 0.5.
        assert_eq!(labels, ["0.5", "0.75", "1"]);

        let impossible = ExpectationConstraint {
            rows: 1,
            map: UncertainObjectiveMap::AffineFamily(vec![Matrix::from_rows(vec![vec![1.0, 1.0]]).unwrap(); 3]),
        };
        assert_eq!(to_robust(&inst, &amb, Some(&impossible)), Err(Error::EmptyFeasibleSet));
    }

    #[test]
    fn rejects_bad_distributions() {
        let s = ScenarioSet::numbered(2).unwrap();
        assert!(AmbiguitySet::new(s.clone(), vec![vec![0.5, 0.6]], true).is_err());
        assert!(AmbiguitySet::new(s.clone(), vec![vec![1.5, -0.5]], true).is_err());
        assert!(AmbiguitySet::new(s, vec![], true).is_err());
    }
}
