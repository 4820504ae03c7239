//! Scalarizing functions, worst-case evaluation and LP reformulations.
//!
//! Each [`Scalarizer`] declares its monotonicity class and convexity. These
//! flags are part of the catalog, never inferred, because the efficiency
//! guarantees of a minimizer depend on them:
//! a minimizer of a strongly increasing worst case is robust efficient, and
//! a minimizer of a strongly increasing convex worst case is convex-hull
//! efficient.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain, Error, Result};
use crate::geometry::{self, DominanceMode};
use crate::linprog::{dot, lp_solve, Bound, LpProblem, LpResult};
use crate::model::{
    CandidateSet, Decision, Instance, Matrix, ObjectiveImage, ObjectiveVector, SimplexPoint, UncertainObjectiveMap,
};

/// Monotonicity classes, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    /// `y <= y'` implies `u(y) <= u(y')`.
    Increasing,
    /// `y < y'` in every coordinate implies `u(y) < u(y')`.
    StrictlyIncreasing,
    /// `y <= y'`, `y != y'` implies `u(y) < u(y')`.
    StronglyIncreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarizerKind {
    WeightedSum {
        weights: Vec<f64>,
    },
    /// `(sum_i w_i |y_i - z_i|^p / n)^(1/p)`; `p = inf` gives `max_i w_i |y_i - z_i|`.
    WeightedPNorm {
        weights: Vec<f64>,
        p: f64,
        reference: Option<Vec<f64>>,
    },
    /// `max_i w_i (y_i - z_i)`.
    Chebyshev {
        weights: Vec<f64>,
        reference: Option<Vec<f64>>,
    },
    SignedDistance {
        anchors: Vec<ObjectiveVector>,
        mode: DominanceMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scalarizer {
    kind: ScalarizerKind,
    monotonicity: Monotonicity,
    convex: bool,
}

fn check_weights(w: &[f64], positive: bool) -> Result<()> {
    if w.is_empty() {
        return Err(domain("weight vector must be nonempty"));
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(domain(format!("weights {w:?} must be finite and nonnegative")));
    }
    if positive && w.iter().any(|v| *v <= 0.0) {
        return Err(domain(format!("weights {w:?} must be positive")));
    }
    if w.iter().all(|v| *v == 0.0) {
        return Err(domain("weights must not all be zero"));
    }
    Ok(())
}

fn check_reference(reference: &Option<Vec<f64>>, n: usize) -> Result<()> {
    match reference {
        Some(z) if z.len() != n => Err(dimension(format!("reference point has {} entries, weights {n}", z.len()))),
        Some(z) if z.iter().any(|v| !v.is_finite()) => Err(domain("reference point must be finite")),
        _ => Ok(()),
    }
}

impl Scalarizer {
    /// `w . y` with `w >= 0`, `w != 0`. Strongly increasing iff `w > 0`.
    pub fn weighted_sum(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, false)?;
        let monotonicity = if weights.iter().all(|w| *w > 0.0) {
            Monotonicity::StronglyIncreasing
        } else {
            Monotonicity::StrictlyIncreasing
        };
        Ok(Scalarizer {
            kind: ScalarizerKind::WeightedSum { weights },
            monotonicity,
            convex: true,
        })
    }

    /// Weighted p-norm distance to `reference` (the origin by default).
    /// The monotonicity claim holds on the region `y >= reference`.
    pub fn weighted_pnorm(weights: Vec<f64>, p: f64, reference: Option<Vec<f64>>) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(domain(format!("p-norm exponent {p} must be at least 1")));
        }
        check_weights(&weights, true)?;
        check_reference(&reference, weights.len())?;
        let monotonicity = if p.is_infinite() {
            Monotonicity::StrictlyIncreasing
        } else {
            Monotonicity::StronglyIncreasing
        };
        Ok(Scalarizer {
            kind: ScalarizerKind::WeightedPNorm { weights, p, reference },
            monotonicity,
            convex: true,
        })
    }

    pub fn chebyshev(weights: Vec<f64>, reference: Option<Vec<f64>>) -> Result<Self> {
        check_weights(&weights, true)?;
        check_reference(&reference, weights.len())?;
        Ok(Scalarizer {
            kind: ScalarizerKind::Chebyshev { weights, reference },
            monotonicity: Monotonicity::StrictlyIncreasing,
            convex: true,
        })
    }

    /// Signed distance to the dominated region of `anchors`. Convex in hull mode.
    pub fn signed_distance(anchors: Vec<ObjectiveVector>, mode: DominanceMode) -> Result<Self> {
        if anchors.is_empty() {
            return Err(domain("signed distance needs at least one anchor"));
        }
        let n = anchors[0].len();
        if anchors.iter().any(|a| a.len() != n) {
            return Err(dimension("anchors must share one length"));
        }
        Ok(Scalarizer {
            kind: ScalarizerKind::SignedDistance { anchors, mode },
            monotonicity: Monotonicity::StrictlyIncreasing,
            convex: mode == DominanceMode::Hull,
        })
    }

    pub fn kind(&self) -> &ScalarizerKind {
        &self.kind
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, ScalarizerKind::WeightedSum { .. })
    }

    /// Objective count the scalarizer expects.
    pub fn dim(&self) -> usize {
        match &self.kind {
            ScalarizerKind::WeightedSum { weights }
            | ScalarizerKind::WeightedPNorm { weights, .. }
            | ScalarizerKind::Chebyshev { weights, .. } => weights.len(),
            ScalarizerKind::SignedDistance { anchors, .. } => anchors[0].len(),
        }
    }

    pub fn apply(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim() {
            return Err(dimension(format!("scalarizer expects {} objectives, got {}", self.dim(), y.len())));
        }
        let offset = |reference: &Option<Vec<f64>>, i: usize| reference.as_ref().map_or(0.0, |z| z[i]);
        Ok(match &self.kind {
            ScalarizerKind::WeightedSum { weights } => dot(weights, y),
            ScalarizerKind::WeightedPNorm { weights, p, reference } => {
                let gaps = y.iter().enumerate().map(|(i, v)| (v - offset(reference, i)).abs());
                if p.is_infinite() {
                    gaps.zip(weights).map(|(g, w)| w * g).fold(f64::NEG_INFINITY, f64::max)
                } else {
                    let n = y.len() as f64;
                    let s: f64 = gaps.zip(weights).map(|(g, w)| w * g.powf(*p)).sum();
                    (s / n).powf(1.0 / p)
                }
            }
            ScalarizerKind::Chebyshev { weights, reference } => y
                .iter()
                .enumerate()
                .map(|(i, v)| weights[i] * (v - offset(reference, i)))
                .fold(f64::NEG_INFINITY, f64::max),
            ScalarizerKind::SignedDistance { anchors, mode } => geometry::signed_distance(y, anchors, *mode)?,
        })
    }

    /// Largest scalarized value over the image and the first scenario
    /// attaining it.
    pub fn worst_case(&self, img: &ObjectiveImage) -> Result<(f64, String)> {
        let mut best: Option<(f64, &str)> = None;
        for (s, y) in img.iter() {
            let v = self.apply(y)?;
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, s));
            }
        }
        let (v, s) = best.ok_or_else(|| domain("image is empty"))?;
        Ok((v, s.to_string()))
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Scalarizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ScalarizerKind::WeightedSum { weights } => write!(f, "wsum:w={}", fmt_list(weights)),
            ScalarizerKind::WeightedPNorm { weights, p, reference } => {
                let p = if p.is_infinite() { "inf".to_string() } else { format!("{p}") };
                write!(f, "pnorm:p={p},w={}", fmt_list(weights))?;
                if let Some(z) = reference {
                    write!(f, ",ref={}", fmt_list(z))?;
                }
                Ok(())
            }
            ScalarizerKind::Chebyshev { weights, reference } => {
                write!(f, "cheb:w={}", fmt_list(weights))?;
                if let Some(z) = reference {
                    write!(f, ",ref={}", fmt_list(z))?;
                }
                Ok(())
            }
            ScalarizerKind::SignedDistance { anchors, mode } => {
                let mode = match mode {
                    DominanceMode::Plain => "plain",
                    DominanceMode::Hull => "hull",
                };
                write!(f, "signed_distance:anchors={},mode={mode}", anchors.len())
            }
        }
    }
}

/// Epigraph reformulation `min t s.t. t >= u(f(x; s))` for all `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Epigraph {
    /// Joint LP in `(lambda_1, .., lambda_k, t)` over the decision simplex.
    /// The last variable is `t`.
    Joint { lp: LpProblem, dim: usize },
    /// Scenario-wise right-hand sides `u(f(x; s))` at a fixed candidate.
    Constraints { candidate: String, rows: Vec<(String, f64)> },
}

impl Epigraph {
    /// Smallest feasible `t` for a fixed candidate.
    pub fn minimal_level(&self) -> Option<f64> {
        match self {
            Epigraph::Constraints { rows, .. } => rows.iter().map(|(_, v)| *v).reduce(f64::max),
            Epigraph::Joint { .. } => None,
        }
    }
}

/// Per-scenario linear coefficients `c_s` with `u(f(x; s)) = c_s . lambda`
/// for a linear `u` and a map that is linear in the decision.
fn linear_rows(instance: &Instance, weights: &[f64]) -> Option<Vec<Vec<f64>>> {
    let scale = instance.decision_scale();
    let rows: Vec<Vec<f64>> = match instance.objectives() {
        UncertainObjectiveMap::AffineFamily(v) => v.iter().map(|m| m.tr_mul_vec(weights)).collect(),
        UncertainObjectiveMap::LinearInS(fs) => {
            let points = instance.scenarios().points()?;
            points
                .iter()
                .map(|s| fs.iter().map(|fj| dot(weights, &fj.mul_vec(s))).collect())
                .collect()
        }
        _ => return None,
    };
    Some(
        rows.into_iter()
            .map(|r: Vec<f64>| r.into_iter().map(|c| c * scale).collect())
            .collect(),
    )
}

/// Builds the epigraph form. Without a candidate, a linear `u` over a
/// simplex-parameterized affine or `linear_in_s` instance yields the joint LP;
/// with a candidate the scenario-wise levels are returned.
pub fn epigraph_form(instance: &Instance, u: &Scalarizer, candidate: Option<&Decision>) -> Result<Epigraph> {
    if let Some(d) = candidate {
        let img = instance.image(d)?;
        let rows = img
            .iter()
            .map(|(s, y)| Ok((s.to_string(), u.apply(y)?)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Epigraph::Constraints {
            candidate: d.label(),
            rows,
        });
    }
    let ScalarizerKind::WeightedSum { weights } = u.kind() else {
        return Err(domain("a joint epigraph LP needs a linear scalarizer; pass a candidate instead"));
    };
    if !matches!(instance.candidates(), CandidateSet::Simplex(_)) {
        return Err(domain("a joint epigraph LP needs simplex candidates; pass a candidate instead"));
    }
    if weights.len() != instance.n() {
        return Err(dimension(format!("{} weights for {} objectives", weights.len(), instance.n())));
    }
    let rows = linear_rows(instance, weights)
        .ok_or_else(|| domain("a joint epigraph LP needs an objective map linear in the decision"))?;
    let k = rows[0].len();
    let mut c = vec![0.0; k + 1];
    c[k] = 1.0;
    let mut lp = LpProblem::minimize(c);
    lp.set_bound(k, Bound::Free);
    for r in rows {
        let mut row = r;
        row.push(-1.0);
        lp.add_le(row, 0.0)?;
    }
    let mut simplex = vec![1.0; k];
    simplex.push(0.0);
    lp.add_eq(simplex, 1.0)?;
    Ok(Epigraph::Joint { lp, dim: k })
}

/// Projects an LP solution onto the simplex, dropping solver noise.
pub(crate) fn clean_simplex(v: &[f64]) -> Result<SimplexPoint> {
    let mut w: Vec<f64> = v.iter().map(|x| if *x < 1e-12 { 0.0 } else { *x }).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    SimplexPoint::new(w)
}

/// Solves a joint epigraph LP; returns the minimizing point and level.
pub fn solve_epigraph(epi: &Epigraph) -> Result<(SimplexPoint, f64)> {
    let Epigraph::Joint { lp, dim } = epi else {
        return Err(domain("only joint epigraph forms can be solved"));
    };
    match lp_solve(lp)? {
        LpResult::Optimal { value, solution } => Ok((clean_simplex(&solution[..*dim])?, value)),
        other => Err(Error::Invariant(format!("epigraph LP is {:?}", other.status()))),
    }
}

/// LP dual of `max { w' F(x) s : A s <= b, s >= 0 }`, namely
/// `min b' y s.t. A' y >= F(x)' w, y >= 0`.
pub fn dual_reformulate(instance: &Instance, weights: &[f64], candidate: &Decision) -> Result<LpProblem> {
    let UncertainObjectiveMap::LinearInS(fs) = instance.objectives() else {
        return Err(domain("dual reformulation needs a linear_in_s objective map"));
    };
    let poly = instance
        .scenarios()
        .polyhedron()
        .ok_or_else(|| domain("dual reformulation needs a polyhedral scenario set"))?;
    if weights.len() != instance.n() {
        return Err(dimension(format!("{} weights for {} objectives", weights.len(), instance.n())));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(domain("weights must be nonnegative"));
    }
    let point = candidate
        .as_point()
        .ok_or_else(|| Error::UnknownCandidate(candidate.label()))?;
    if point.dim() != fs.len() {
        return Err(dimension(format!("candidate has dimension {}, expected {}", point.dim(), fs.len())));
    }
    let f = Matrix::combination(fs, &instance.decision_vector(point));
    let rhs = f.tr_mul_vec(weights);
    let mut lp = LpProblem::minimize(poly.b.clone());
    for (j, r) in rhs.iter().enumerate() {
        lp.add_ge(poly.a.column(j), *r)?;
    }
    Ok(lp)
}

/// Worst case `max_{s in S} w' F(x) s` over the polyhedral scenario set,
/// computed through the dual.
pub fn dual_worst_case(instance: &Instance, weights: &[f64], candidate: &Decision) -> Result<f64> {
    let lp = dual_reformulate(instance, weights, candidate)?;
    match lp_solve(&lp)? {
        LpResult::Optimal { value, .. } => Ok(value),
        LpResult::Infeasible => Err(Error::DualInfeasible),
        LpResult::Unbounded => Err(domain("scenario polyhedron is empty")),
    }
}

/// The signed-distance scalarizer anchored at the image of `x*`. When `x*` is
/// efficient in the matching sense, it minimizes the worst case with value 0.
pub fn constructive_scalarizer(instance: &Instance, anchor: &Decision, mode: DominanceMode) -> Result<Scalarizer> {
    let img = instance.image(anchor)?;
    Scalarizer::signed_distance(img.points().to_vec(), mode)
}
