//! Dominance geometry in objective space.
//!
//! A point `y` is dominated by a set `A` when `y` lies in
//! `A - (R^n_+ \ {0})`, i.e. some `z` in `A` satisfies `y <= z` with `y != z`.
//! The hull variant replaces `A` by its convex hull. Membership is decided
//! with explicit tolerances: `y <= z` holds within `eq_tol`, and `y != z`
//! requires the total gap `sum_i max(z_i - y_i, 0)` to exceed `strict_tol`.

use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain, Result};
use crate::linprog::{lp_solve, Bound, LpProblem, LpResult};
use crate::model::{ObjectiveImage, ObjectiveVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eq_tol: f64,
    pub strict_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq_tol: 1e-9,
            strict_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominanceMode {
    Plain,
    Hull,
}

impl std::str::FromStr for DominanceMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(DominanceMode::Plain),
            "hull" => Ok(DominanceMode::Hull),
            other => Err(domain(format!("unknown dominance mode `{other}`"))),
        }
    }
}

/// Certificate that a point lies in the dominated region of an anchor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DominanceWitness {
    /// `anchor` indexes the anchor list.
    Point { anchor: usize, point: Vec<f64> },
    /// `point = sum_j weights[j] * anchors[j]`.
    Hull { weights: Vec<f64>, point: Vec<f64> },
}

impl DominanceWitness {
    pub fn point(&self) -> &[f64] {
        match self {
            DominanceWitness::Point { point, .. } | DominanceWitness::Hull { point, .. } => point,
        }
    }

    /// Re-checks the certificate against `y` and the anchor set.
    pub fn verify(&self, y: &[f64], anchors: &[ObjectiveVector], tol: &Tolerances) -> bool {
        let c = match self {
            DominanceWitness::Point { anchor, point } => {
                let Some(a) = anchors.get(*anchor) else { return false };
                if a.values() != point.as_slice() {
                    return false;
                }
                point.clone()
            }
            DominanceWitness::Hull { weights, point } => {
                if weights.len() != anchors.len()
                    || weights.iter().any(|w| *w < -1e-12)
                    || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
                {
                    return false;
                }
                let c = combine(weights, anchors);
                if c.iter().zip(point).any(|(a, b)| (a - b).abs() > 1e-9) {
                    return false;
                }
                c
            }
        };
        below(y, &c, tol)
    }
}

fn combine(weights: &[f64], anchors: &[ObjectiveVector]) -> Vec<f64> {
    let mut c = vec![0.0; anchors[0].len()];
    for (w, a) in weights.iter().zip(anchors) {
        for (ci, ai) in c.iter_mut().zip(a.iter()) {
            *ci += w * ai;
        }
    }
    c
}

/// `y <= c` within `eq_tol` and `y != c` beyond `strict_tol`.
fn below(y: &[f64], c: &[f64], tol: &Tolerances) -> bool {
    y.iter().zip(c).all(|(a, b)| *a <= b + tol.eq_tol) && gain(y, c) > tol.strict_tol
}

fn gain(y: &[f64], c: &[f64]) -> f64 {
    y.iter().zip(c).map(|(a, b)| (b - a).max(0.0)).sum()
}

fn check_anchors(y: &[f64], anchors: &[ObjectiveVector]) -> Result<()> {
    if anchors.is_empty() {
        return Err(domain("anchor set must be nonempty"));
    }
    if anchors.iter().any(|a| a.len() != y.len()) {
        return Err(dimension(format!("anchors must have length {}", y.len())));
    }
    Ok(())
}

/// Returns the first anchor `z` (in list order) with `y` strictly below it.
pub fn dominated_by_point_set(
    y: &[f64],
    anchors: &[ObjectiveVector],
    tol: &Tolerances,
) -> Result<Option<DominanceWitness>> {
    check_anchors(y, anchors)?;
    Ok(first_dominating(y, anchors, tol))
}

fn first_dominating(y: &[f64], anchors: &[ObjectiveVector], tol: &Tolerances) -> Option<DominanceWitness> {
    anchors.iter().position(|z| below(y, z, tol)).map(|i| DominanceWitness::Point {
        anchor: i,
        point: anchors[i].values().to_vec(),
    })
}

/// Decides whether `y` lies in `conv(anchors) - (R^n_+ \ {0})`.
///
/// A plain witness is tried first and returned as a one-hot hull witness, so
/// plain dominance always implies hull dominance. Otherwise an LP maximizes
/// the total gap `sum_i (c_i - y_i)` over hull points `c >= y`.
pub fn dominated_by_hull(y: &[f64], anchors: &[ObjectiveVector], tol: &Tolerances) -> Result<Option<DominanceWitness>> {
    check_anchors(y, anchors)?;
    if let Some(DominanceWitness::Point { anchor, point }) = first_dominating(y, anchors, tol) {
        let mut weights = vec![0.0; anchors.len()];
        weights[anchor] = 1.0;
        return Ok(Some(DominanceWitness::Hull { weights, point }));
    }
    if anchors.len() == 1 {
        return Ok(None);
    }
    // Cheap rejection: every hull point is below the max corner.
    let n = y.len();
    for i in 0..n {
        let hi = anchors.iter().map(|a| a[i]).fold(f64::NEG_INFINITY, f64::max);
        if y[i] > hi + tol.eq_tol {
            return Ok(None);
        }
    }
    let m = anchors.len();
    let objective = anchors.iter().map(|a| -a.iter().sum::<f64>()).collect();
    let mut lp = LpProblem::minimize(objective);
    for i in 0..n {
        lp.add_ge(anchors.iter().map(|a| a[i]).collect(), y[i])?;
    }
    lp.add_eq(vec![1.0; m], 1.0)?;
    let LpResult::Optimal { solution, .. } = lp_solve(&lp)? else {
        return Ok(None);
    };
    let mut weights: Vec<f64> = solution.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let point = combine(&weights, anchors);
    let witness = DominanceWitness::Hull { weights, point };
    Ok(witness.verify(y, anchors, tol).then_some(witness))
}

pub fn dominated_by(
    y: &[f64],
    anchors: &[ObjectiveVector],
    mode: DominanceMode,
    tol: &Tolerances,
) -> Result<Option<DominanceWitness>> {
    match mode {
        DominanceMode::Plain => dominated_by_point_set(y, anchors, tol),
        DominanceMode::Hull => dominated_by_hull(y, anchors, tol),
    }
}

/// Per-point certificate of image dominance: the dominated point's scenario
/// id and the witness against the dominating image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointWitness {
    pub scenario: String,
    pub witness: DominanceWitness,
}

/// Whether every point of `a` is dominated by the anchor set `b`.
/// Returns the witnesses in `a`'s scenario order on success.
pub fn image_dominates(
    a: &ObjectiveImage,
    b: &ObjectiveImage,
    mode: DominanceMode,
    tol: &Tolerances,
) -> Result<Option<Vec<PointWitness>>> {
    if a.dim() != b.dim() {
        return Err(domain(format!("images have dimensions {} and {}", a.dim(), b.dim())));
    }
    let mut out = Vec::with_capacity(a.len());
    for (s, y) in a.iter() {
        match dominated_by(y, b.points(), mode, tol)? {
            Some(w) => out.push(PointWitness {
                scenario: s.to_string(),
                witness: w,
            }),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Signed distance of `y` to the boundary of the dominated region of
/// `anchors`: negative inside, zero on the boundary, positive outside.
///
/// Plain mode is `min_z max_i (y_i - z_i)`. Hull mode minimizes `t` over
/// `lambda` in the simplex subject to `y - sum_j lambda_j a_j <= t 1`.
pub fn signed_distance(y: &[f64], anchors: &[ObjectiveVector], mode: DominanceMode) -> Result<f64> {
    check_anchors(y, anchors)?;
    let plain = anchors
        .iter()
        .map(|z| y.iter().zip(z.iter()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    if mode == DominanceMode::Plain || anchors.len() == 1 {
        return Ok(plain);
    }
    let m = anchors.len();
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    let mut lp = LpProblem::minimize(c);
    lp.set_bound(m, Bound::Free);
    for i in 0..y.len() {
        let mut row: Vec<f64> = anchors.iter().map(|a| -a[i]).collect();
        row.push(-1.0);
        lp.add_le(row, -y[i])?;
    }
    let mut simplex = vec![1.0; m];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0)?;
    match lp_solve(&lp)? {
        // The hull contains every anchor, so the LP value never exceeds the
        // plain one; taking the minimum removes pivoting noise.
        LpResult::Optimal { value, .. } => Ok(value.min(plain)),
        other => Err(crate::Error::Invariant(format!("signed-distance LP returned {:?}", other.status()))),
    }
}

/// If the image is a full Cartesian product of its coordinate value sets,
/// returns its componentwise maximum corner.
pub fn is_hyperrectangle(img: &ObjectiveImage, tol: &Tolerances) -> Option<ObjectiveVector> {
    let n = img.dim();
    let mut clusters: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut vals: Vec<f64> = img.points().iter().map(|p| p[i]).collect();
        vals.sort_by(f64::total_cmp);
        let mut reps: Vec<f64> = Vec::new();
        for v in vals {
            if reps.last().is_none_or(|r| v - r > tol.eq_tol) {
                reps.push(v);
            }
        }
        clusters.push(reps);
    }
    let mut tuples: Vec<Vec<usize>> = img
        .points()
        .iter()
        .map(|p| {
            (0..n)
                .map(|i| {
                    clusters[i]
                        .iter()
                        .rposition(|r| p[i] >= r - tol.eq_tol)
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    tuples.sort();
    tuples.dedup();
    let product = clusters.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()))?;
    (tuples.len() == product).then(|| img.max_corner())
}
