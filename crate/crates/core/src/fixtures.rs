//! Reference instances and random instance generators.
//!
//! `problem_1` and `problem_2` are the two small counterexample problems the
//! crate is calibrated against. The random generators feed property tests and
//! the acceptance harness.

use std::collections::BTreeMap;

use rand::Rng;

use crate::distro::AmbiguitySet;
use crate::error::Result;
use crate::model::{
    CandidateSet, Decision, Instance, Matrix, ObjectiveVector, ScenarioSet, SimplexGrid, SimplexPoint,
    UncertainObjectiveMap,
};

/// Images of the two endpoints of problem 1, per scenario: (at x = 1, at x = 0).
pub const PROBLEM_1_VERTICES: [([f64; 2], [f64; 2]); 3] = [
    ([0.0, 2.0], [1.0, 4.0]),
    ([2.0, 2.0], [1.0, 1.0]),
    ([2.0, 0.0], [4.0, 1.0]),
];

/// Images of the three vertices of problem 2, per scenario:
/// (x = (1,0), x = (0,1), x = (0,0)).
pub const PROBLEM_2_VERTICES: [[[f64; 2]; 3]; 3] = [
    [[0.0, 6.0], [3.0, 2.5], [2.0, 4.0]],
    [[0.0, 3.0], [3.0, 0.0], [4.0, 4.0]],
    [[2.5, 3.0], [6.0, 0.0], [4.0, 2.0]],
];

fn problem_1_map() -> UncertainObjectiveMap {
    let mats = PROBLEM_1_VERTICES
        .iter()
        .map(|(one, zero)| {
            Matrix::from_rows(vec![vec![one[0], zero[0]], vec![one[1], zero[1]]]).expect("static data")
        })
        .collect();
    UncertainObjectiveMap::AffineFamily(mats)
}

fn problem_2_map() -> UncertainObjectiveMap {
    let mats = PROBLEM_2_VERTICES
        .iter()
        .map(|v| Matrix::from_rows((0..2).map(|i| v.iter().map(|p| p[i]).collect()).collect()).expect("static data"))
        .collect();
    UncertainObjectiveMap::AffineFamily(mats)
}

/// Problem 1: `x` in `[0, 1]` on a lattice of the given step. Decision
/// coordinates are `(x, 1 - x)`, so candidate labels are the value of `x`.
pub fn problem_1(step: f64) -> Result<Instance> {
    Ok(Instance::new(
        2,
        ScenarioSet::numbered(3)?,
        problem_1_map(),
        CandidateSet::Simplex(SimplexGrid::new(2, step)?),
    )?
    .with_name("problem-1"))
}

/// Problem 2 restricted to the three vertices `(0,0)`, `(1,0)`, `(0,1)`.
/// Decision coordinates are `(x1, x2, 1 - x1 - x2)`; labels read `x1;x2`.
pub fn problem_2() -> Instance {
    let verts = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let cands = verts
        .iter()
        .map(|w| Decision::Point(SimplexPoint::new(w.to_vec()).expect("static data")))
        .collect();
    Instance::new(
        2,
        ScenarioSet::numbered(3).expect("static data"),
        problem_2_map(),
        CandidateSet::Explicit(cands),
    )
    .expect("static data")
    .with_name("problem-2")
}

/// Problem 2 on a full simplex lattice.
pub fn problem_2_grid(step: f64) -> Result<Instance> {
    Ok(Instance::new(
        2,
        ScenarioSet::numbered(3)?,
        problem_2_map(),
        CandidateSet::Simplex(SimplexGrid::new(3, step)?),
    )?
    .with_name("problem-2"))
}

/// Loads a builtin by name. `step` selects a lattice; problem 2 defaults to
/// its vertex set.
pub fn builtin(name: &str, step: Option<f64>) -> Result<Instance> {
    match name {
        "problem-1" => problem_1(step.unwrap_or(0.05)),
        "problem-2" => match step {
            Some(s) => problem_2_grid(s),
            None => Ok(problem_2()),
        },
        other => Err(crate::Error::Parse(format!("unknown builtin instance `{other}`"))),
    }
}

/// Builds a table instance from integer-valued rows `data[candidate][scenario]`.
pub fn table_instance(data: &[Vec<Vec<f64>>]) -> Result<Instance> {
    let n = data[0][0].len();
    let mut table = BTreeMap::new();
    let mut cands = Vec::new();
    for (c, rows) in data.iter().enumerate() {
        let label = format!("x{}", c + 1);
        let row = rows.iter().map(|v| ObjectiveVector::new(v.clone())).collect::<Result<Vec<_>>>()?;
        table.insert(label.clone(), row);
        cands.push(Decision::Id(label));
    }
    Instance::new(
        n,
        ScenarioSet::numbered(data[0].len())?,
        UncertainObjectiveMap::Table(table),
        CandidateSet::Explicit(cands),
    )
}

/// Shape bounds for [`random_table`].
#[derive(Debug, Clone, Copy)]
pub struct TableShape {
    pub max_objectives: usize,
    pub max_scenarios: usize,
    pub max_candidates: usize,
    pub max_value: u32,
}

impl Default for TableShape {
    fn default() -> Self {
        TableShape {
            max_objectives: 3,
            max_scenarios: 4,
            max_candidates: 6,
            max_value: 9,
        }
    }
}

/// Random table with integer entries, `n <= 3`, `|S| <= 4`, `2 <= |X| <= 6`
/// under the default shape.
pub fn random_table<R: Rng>(rng: &mut R, shape: TableShape) -> Instance {
    let n = rng.gen_range(1..=shape.max_objectives);
    let s = rng.gen_range(1..=shape.max_scenarios);
    let x = rng.gen_range(2..=shape.max_candidates.max(2));
    random_table_with(rng, n, s, x, shape.max_value)
}

pub fn random_table_with<R: Rng>(rng: &mut R, n: usize, s: usize, x: usize, max_value: u32) -> Instance {
    let data: Vec<Vec<Vec<f64>>> = (0..x)
        .map(|_| {
            (0..s)
                .map(|_| (0..n).map(|_| rng.gen_range(0..=max_value) as f64).collect())
                .collect()
        })
        .collect();
    table_instance(&data).expect("generated data is well formed")
}

/// Random table whose every image is a full product `V_1 x ... x V_n` with
/// `m` values per objective; scenarios enumerate index tuples.
pub fn random_product_table<R: Rng>(rng: &mut R, n: usize, m: usize, x: usize) -> Instance {
    let tuples = index_tuples(n, m);
    let data: Vec<Vec<Vec<f64>>> = (0..x)
        .map(|_| {
            let values: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(0..=9) as f64).collect())
                .collect();
            tuples
                .iter()
                .map(|t| t.iter().enumerate().map(|(i, &j)| values[i][j]).collect())
                .collect()
        })
        .collect();
    table_instance(&data).expect("generated data is well formed")
}

fn index_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    out
}

/// Random probability vector over `len` outcomes with small integer weights.
pub fn random_distribution<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0..=4) as f64).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.iter().map(|v| v / total).collect();
        }
    }
}

/// Random table instance paired with a convex ambiguity set of 1 to 4
/// generator distributions over its scenarios.
pub fn random_convex_ambiguity<R: Rng>(rng: &mut R) -> (Instance, AmbiguitySet) {
    let inst = random_table(rng, TableShape::default());
    let s = inst.scenarios().len();
    let g = rng.gen_range(1..=4);
    let dists = (0..g).map(|_| random_distribution(rng, s)).collect();
    let amb = AmbiguitySet::new(inst.scenarios().clone(), dists, true).expect("generated distributions are valid");
    (inst, amb)
}

/// Affine family whose images are collinear: `f(x; s) = C x + s (1, -1)` for
/// `s` on a uniform grid over `[-3, 3]` with step 0.5. `C` has integer
/// entries and candidates are explicit points with halves as coordinates.
pub fn random_segment_family<R: Rng>(rng: &mut R) -> Instance {
    let k = rng.gen_range(2..=3);
    let c: Vec<Vec<f64>> = (0..2).map(|_| (0..k).map(|_| rng.gen_range(0..=6) as f64).collect()).collect();
    let mats = (-6..=6)
        .map(|i| {
            let s = i as f64 * 0.5;
            Matrix::from_rows(vec![
                c[0].iter().map(|v| v + s).collect(),
                c[1].iter().map(|v| v - s).collect(),
            ])
            .expect("generated data is well formed")
        })
        .collect::<Vec<_>>();
    let scenarios = ScenarioSet::numbered(mats.len()).expect("nonempty");
    let grid = SimplexGrid::new(k, 0.5).expect("valid step");
    let cands = grid.points().expect("small lattice").into_iter().map(Decision::Point).collect();
    Instance::new(2, scenarios, UncertainObjectiveMap::AffineFamily(mats), CandidateSet::Explicit(cands))
        .expect("generated data is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtins_resolve() {
        assert_eq!(builtin("problem-1", None).unwrap().decisions().unwrap().len(), 21);
        assert_eq!(builtin("problem-2", None).unwrap().decisions().unwrap().len(), 3);
        assert_eq!(builtin("problem-2", Some(0.5)).unwrap().decisions().unwrap().len(), 6);
        assert!(builtin("problem-3", None).is_err());
    }

    #[test]
    fn product_tables_are_boxes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_product_table(&mut rng, 2, 2, 3);
        assert_eq!(inst.scenarios().len(), 4);
        for d in inst.decisions().unwrap() {
            let img = inst.image(&d).unwrap();
            let p = img.points();
            assert_eq!(p[0][0], p[1][0]);
            assert_eq!(p[0][1], p[2][1]);
        }
    }
}
