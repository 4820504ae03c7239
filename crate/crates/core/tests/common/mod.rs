//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use robpareto::geometry::Tolerances;
use robpareto::model::{
    CandidateSet, Decision, Instance, Matrix, Polyhedron, ScenarioSet, SimplexPoint, UncertainObjectiveMap,
};

fn gain(y: &[f64], c: &[f64]) -> f64 {
    y.iter().zip(c).map(|(a, b)| (b - a).max(0.0)).sum()
}

/// Hull dominance in two objectives by enumerating anchor pairs. The Pareto
/// boundary of a planar hull is made of segments between two anchors, so a
/// dominating hull point always lies on some such segment.
pub fn caratheodory_dominated(y: &[f64], anchors: &[Vec<f64>], tol: &Tolerances) -> bool {
    assert_eq!(y.len(), 2);
    let single = anchors
        .iter()
        .any(|z| y.iter().zip(z).all(|(a, b)| *a <= b + tol.eq_tol) && gain(y, z) > tol.strict_tol);
    if single {
        return true;
    }
    for (i, a) in anchors.iter().enumerate() {
        for b in &anchors[i + 1..] {
            // c(l) = b + l (a - b), need c >= y on [lo, hi].
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut ok = true;
            for k in 0..2 {
                let d = a[k] - b[k];
                let r = y[k] - b[k];
                if d > 0.0 {
                    lo = lo.max(r / d);
                } else if d < 0.0 {
                    hi = hi.min(r / d);
                } else if r > 0.0 {
                    ok = false;
                }
            }
            if !ok || lo > hi {
                continue;
            }
            let at = |l: f64| {
                let c: Vec<f64> = (0..2).map(|k| b[k] + l * (a[k] - b[k])).collect();
                gain(y, &c)
            };
            if at(lo).max(at(hi)) > tol.strict_tol {
                return true;
            }
        }
    }
    false
}

/// `max c' s` over `{s >= 0, A s <= b}` in two dimensions by vertex
/// enumeration. The caller guarantees a bounded, nonempty region.
pub fn vertex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    rows.push((vec![-1.0, 0.0], 0.0));
    rows.push((vec![0.0, -1.0], 0.0));
    let feasible = |s: &[f64]| rows.iter().all(|(r, v)| r[0] * s[0] + r[1] * s[1] <= v + 1e-9);
    let mut best = f64::NEG_INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (r1, v1) = &rows[i];
            let (r2, v2) = &rows[j];
            let det = r1[0] * r2[1] - r1[1] * r2[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let s = [(v1 * r2[1] - r1[1] * v2) / det, (r1[0] * v2 - v1 * r2[0]) / det];
            if feasible(&s) {
                best = best.max(c[0] * s[0] + c[1] * s[1]);
            }
        }
    }
    best
}

/// Random bounded polyhedron `{s >= 0, A s <= b}` in the plane containing
/// the origin: one row with positive coefficients caps it.
pub fn random_bounded_polyhedron<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = vec![vec![rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)]];
    let mut b = vec![rng.gen_range(1.0..5.0)];
    for _ in 0..rng.gen_range(0..=3) {
        a.push(vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
        b.push(rng.gen_range(0.5..5.0));
    }
    (a, b)
}

/// Single-candidate instance with `f(x; s) = F s` over the given polyhedron.
pub fn linear_in_s_instance(f: Vec<Vec<f64>>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Instance {
    let n = f.len();
    let scen = ScenarioSet::numbered(1)
        .unwrap()
        .with_points(vec![vec![0.0, 0.0]])
        .unwrap()
        .with_polyhedron(Polyhedron::new(Matrix::from_rows(a).unwrap(), b).unwrap())
        .unwrap();
    Instance::new(
        n,
        scen,
        UncertainObjectiveMap::LinearInS(vec![Matrix::from_rows(f).unwrap()]),
        CandidateSet::Explicit(vec![Decision::Point(SimplexPoint::new(vec![1.0]).unwrap())]),
    )
    .unwrap()
}

/// Random hull-dominance query: anchors on the integer grid, the query on the
/// half-integer grid, half of them placed near the anchors' hull.
pub fn random_hull_query<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = rng.gen_range(1..=6);
    let anchors: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..2).map(|_| rng.gen_range(0..=9) as f64).collect())
        .collect();
    let y = if rng.gen_bool(0.5) {
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let t: f64 = w.iter().sum::<f64>().max(1e-12);
        (0..2)
            .map(|k| {
                let c: f64 = anchors.iter().zip(&w).map(|(a, wi)| a[k] * wi / t).sum();
                ((c + rng.gen_range(-1.0..1.0)) * 2.0).round() / 2.0
            })
            .collect()
    } else {
        (0..2).map(|_| rng.gen_range(0..=20) as f64 / 2.0).collect()
    };
    (y, anchors)
}
