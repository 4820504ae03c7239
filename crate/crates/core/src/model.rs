//! Problem model: decisions, scenarios and the uncertain objective map.
//!
//! An [`Instance`] bundles a finite scenario set, a map `f(x; s)` into
//! objective space and a candidate family. Objectives are always minimized.
//! Instances are immutable once built and can be shared between threads.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use crate::error::{dimension, domain, Error, Result};

/// Tolerance on simplex-point membership (`x >= 0`, `sum x = 1`).
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Upper bound on the number of lattice points a grid may expand to.
pub const MAX_LATTICE_POINTS: usize = 5_000_000;

/// A point in objective space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("objective vector must have at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain(format!("objective vector {values:?} has a non-finite entry")));
        }
        Ok(ObjectiveVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ObjectiveVector::new(v)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(dimension("matrix must have at least one row and one column"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(dimension(format!("ragged matrix: expected {c} columns, got {}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(domain("matrix has a non-finite entry"));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^T y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    fn scale_row(&mut self, i: usize, factor: f64) {
        let c = self.cols;
        self.data[i * c..(i + 1) * c].iter_mut().for_each(|v| *v *= factor);
    }

    /// `sum_k weights[k] * mats[k]`.
    pub fn combination(mats: &[Matrix], weights: &[f64]) -> Matrix {
        let mut out = Matrix::zeros(mats[0].rows, mats[0].cols);
        for (m, w) in mats.iter().zip(weights) {
            if *w == 0.0 {
                continue;
            }
            for (o, v) in out.data.iter_mut().zip(&m.data) {
                *o += w * v;
            }
        }
        out
    }
}

/// `{ s : A s <= b, s >= 0 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl Polyhedron {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(dimension(format!("polyhedron has {} rows but {} right-hand sides", a.rows(), b.len())));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(domain("polyhedron right-hand side must be finite"));
        }
        Ok(Polyhedron { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn contains(&self, s: &[f64], tol: f64) -> bool {
        s.iter().all(|v| *v >= -tol)
            && (0..self.a.rows()).all(|i| {
                self.a.row(i).iter().zip(s).map(|(a, x)| a * x).sum::<f64>() <= self.b[i] + tol
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    ids: Vec<String>,
    points: Option<Vec<Vec<f64>>>,
    polyhedron: Option<Polyhedron>,
    convex_closure: bool,
}

impl ScenarioSet {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        if ids.is_empty() {
            return Err(domain("scenario set must be nonempty"));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if id.is_empty() {
                return Err(domain("scenario ids must be nonempty"));
            }
            if !seen.insert(id.as_str()) {
                return Err(domain(format!("duplicate scenario id `{id}`")));
            }
        }
        Ok(ScenarioSet {
            ids,
            points: None,
            polyhedron: None,
            convex_closure: false,
        })
    }

    /// Scenarios labelled `1..=count`.
    pub fn numbered(count: usize) -> Result<Self> {
        ScenarioSet::new((1..=count).map(|i| i.to_string()).collect())
    }

    /// Attaches coordinates to each scenario (needed by `linear_in_s` maps).
    pub fn with_points(mut self, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() != self.ids.len() {
            return Err(dimension(format!("{} scenario points for {} scenarios", points.len(), self.ids.len())));
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(dimension("scenario points must share one nonzero dimension"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(domain("scenario points must be finite"));
        }
        self.points = Some(points);
        Ok(self)
    }

    pub fn with_polyhedron(mut self, polyhedron: Polyhedron) -> Result<Self> {
        if let Some(points) = &self.points {
            if points[0].len() != polyhedron.dim() {
                return Err(dimension("polyhedron dimension differs from scenario point dimension"));
            }
        }
        self.polyhedron = Some(polyhedron);
        Ok(self)
    }

    /// Declares that the uncertainty set is the convex hull of the listed
    /// scenarios and that the objective map is affine in the scenario, so
    /// every image is the convex hull of its listed points.
    pub fn with_convex_closure(mut self, convex: bool) -> Self {
        self.convex_closure = convex;
        self
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::UnknownScenario(id.to_string()))
    }

    pub fn points(&self) -> Option<&[Vec<f64>]> {
        self.points.as_deref()
    }

    pub fn polyhedron(&self) -> Option<&Polyhedron> {
        self.polyhedron.as_ref()
    }

    pub fn convex_closure(&self) -> bool {
        self.convex_closure
    }
}

/// One objective of a weighted least-squares map:
/// `sum_r weights[r] * ((M_s x)_r - targets[r])^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresObjective {
    pub weights: Vec<f64>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresMap {
    /// Per scenario, an `r x k` operator mapping decisions to residual rows.
    pub operators: Vec<Matrix>,
    pub objectives: Vec<LeastSquaresObjective>,
}

/// The uncertain objective map `f(x; s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum UncertainObjectiveMap {
    /// Candidate label -> one vector per scenario, in scenario order.
    Table(BTreeMap<String, Vec<ObjectiveVector>>),
    /// Per scenario an `n x k` matrix `V_s`; `f(x; s) = V_s x`.
    AffineFamily(Vec<Matrix>),
    /// `f(x; s) = F(x) s` with `F(x) = sum_j x_j F_j`, each `F_j` of shape `n x n_s`.
    LinearInS(Vec<Matrix>),
    /// Weighted sums of squared affine residuals; convex quadratics in `x`.
    LeastSquares(LeastSquaresMap),
}

impl UncertainObjectiveMap {
    pub fn kind(&self) -> &'static str {
        match self {
            UncertainObjectiveMap::Table(_) => "table",
            UncertainObjectiveMap::AffineFamily(_) => "affine_family",
            UncertainObjectiveMap::LinearInS(_) => "linear_in_s",
            UncertainObjectiveMap::LeastSquares(_) => "least_squares",
        }
    }

    /// Dimension `k` of the decision simplex, or `None` for tables.
    pub fn decision_dim(&self) -> Option<usize> {
        match self {
            UncertainObjectiveMap::Table(_) => None,
            UncertainObjectiveMap::AffineFamily(v) => Some(v[0].cols()),
            UncertainObjectiveMap::LinearInS(f) => Some(f.len()),
            UncertainObjectiveMap::LeastSquares(m) => Some(m.operators[0].cols()),
        }
    }

    fn output_dim(&self) -> usize {
        match self {
            UncertainObjectiveMap::Table(t) => t.values().next().map_or(0, |v| v[0].len()),
            UncertainObjectiveMap::AffineFamily(v) => v[0].rows(),
            UncertainObjectiveMap::LinearInS(f) => f[0].rows(),
            UncertainObjectiveMap::LeastSquares(m) => m.objectives.len(),
        }
    }

    fn validate(&self, scenarios: &ScenarioSet) -> Result<()> {
        let ns = scenarios.len();
        match self {
            UncertainObjectiveMap::Table(t) => {
                let n = self.output_dim();
                for (cand, row) in t {
                    if row.len() != ns {
                        return Err(dimension(format!("candidate `{cand}` has {} scenario entries, expected {ns}", row.len())));
                    }
                    if row.iter().any(|v| v.len() != n) {
                        return Err(dimension(format!("candidate `{cand}` has vectors of unequal length")));
                    }
                }
            }
            UncertainObjectiveMap::AffineFamily(v) => {
                if v.len() != ns {
                    return Err(dimension(format!("{} vertex matrices for {ns} scenarios", v.len())));
                }
                if v.iter().any(|m| m.rows() != v[0].rows() || m.cols() != v[0].cols()) {
                    return Err(dimension("affine family matrices must share one shape"));
                }
            }
            UncertainObjectiveMap::LinearInS(f) => {
                if f.is_empty() {
                    return Err(dimension("linear_in_s needs at least one matrix"));
                }
                let points = scenarios
                    .points()
                    .ok_or_else(|| domain("linear_in_s objectives need scenario coordinates"))?;
                let d = points[0].len();
                if f.iter().any(|m| m.rows() != f[0].rows() || m.cols() != d) {
                    return Err(dimension(format!("linear_in_s matrices must be n x {d}")));
                }
            }
            UncertainObjectiveMap::LeastSquares(m) => {
                if m.operators.len() != ns {
                    return Err(dimension(format!("{} operators for {ns} scenarios", m.operators.len())));
                }
                let (r, k) = (m.operators[0].rows(), m.operators[0].cols());
                if m.operators.iter().any(|op| op.rows() != r || op.cols() != k) {
                    return Err(dimension("least-squares operators must share one shape"));
                }
                if m.objectives.is_empty() {
                    return Err(dimension("least-squares map needs at least one objective"));
                }
                for o in &m.objectives {
                    if o.weights.len() != r || o.targets.len() != r {
                        return Err(dimension(format!("least-squares weights and targets must have {r} entries")));
                    }
                    if o.weights.iter().chain(&o.targets).any(|v| !v.is_finite()) {
                        return Err(domain("least-squares data must be finite"));
                    }
                    if o.weights.iter().any(|w| *w < 0.0) {
                        return Err(domain("least-squares weights must be nonnegative"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates at decision vector `x` (already scaled) for scenario index `s`.
    fn eval_point(&self, x: &[f64], s: usize, scenarios: &ScenarioSet) -> Vec<f64> {
        match self {
            UncertainObjectiveMap::Table(_) => unreachable!("tables are evaluated by label"),
            UncertainObjectiveMap::AffineFamily(v) => v[s].mul_vec(x),
            UncertainObjectiveMap::LinearInS(f) => {
                let point = &scenarios.points().expect("validated")[s];
                Matrix::combination(f, x).mul_vec(point)
            }
            UncertainObjectiveMap::LeastSquares(m) => {
                let dose = m.operators[s].mul_vec(x);
                m.objectives
                    .iter()
                    .map(|o| {
                        o.weights
                            .iter()
                            .zip(&o.targets)
                            .zip(&dose)
                            .filter(|((w, _), _)| **w != 0.0)
                            .map(|((w, t), d)| w * (d - t) * (d - t))
                            .sum()
                    })
                    .collect()
            }
        }
    }

    fn rescaled(&self, factors: &[f64]) -> UncertainObjectiveMap {
        match self {
            UncertainObjectiveMap::Table(t) => UncertainObjectiveMap::Table(
                t.iter()
                    .map(|(k, row)| {
                        let row = row
                            .iter()
                            .map(|v| ObjectiveVector(v.iter().zip(factors).map(|(a, f)| a / f).collect()))
                            .collect();
                        (k.clone(), row)
                    })
                    .collect(),
            ),
            UncertainObjectiveMap::AffineFamily(v) => UncertainObjectiveMap::AffineFamily(
                v.iter()
                    .map(|m| {
                        let mut m = m.clone();
                        for (i, f) in factors.iter().enumerate() {
                            m.scale_row(i, 1.0 / f);
                        }
                        m
                    })
                    .collect(),
            ),
            UncertainObjectiveMap::LinearInS(fs) => UncertainObjectiveMap::LinearInS(
                fs.iter()
                    .map(|m| {
                        let mut m = m.clone();
                        for (i, f) in factors.iter().enumerate() {
                            m.scale_row(i, 1.0 / f);
                        }
                        m
                    })
                    .collect(),
            ),
            UncertainObjectiveMap::LeastSquares(ls) => UncertainObjectiveMap::LeastSquares(LeastSquaresMap {
                operators: ls.operators.clone(),
                objectives: ls
                    .objectives
                    .iter()
                    .zip(factors)
                    .map(|(o, f)| LeastSquaresObjective {
                        weights: o.weights.iter().map(|w| w / f).collect(),
                        targets: o.targets.clone(),
                    })
                    .collect(),
            }),
        }
    }
}

/// Barycentric coordinates of a point in the unit simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(domain("simplex point must have at least one coordinate"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -SIMPLEX_TOL) {
            return Err(domain(format!("simplex point {weights:?} has a negative or non-finite coordinate")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(domain(format!("simplex point {weights:?} sums to {total}, not 1")));
        }
        Ok(SimplexPoint(weights))
    }

    /// Builds a point from its first `k - 1` coordinates; the last one is
    /// the remainder `1 - sum`.
    pub fn from_reduced(reduced: &[f64]) -> Result<Self> {
        let mut w = reduced.to_vec();
        let rest = 1.0 - reduced.iter().sum::<f64>();
        w.push(if rest.abs() <= SIMPLEX_TOL { 0.0 } else { rest });
        SimplexPoint::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The free coordinates (all but the last).
    pub fn reduced(&self) -> &[f64] {
        if self.0.len() == 1 {
            &self.0
        } else {
            &self.0[..self.0.len() - 1]
        }
    }

    pub fn label(&self) -> String {
        self.reduced()
            .iter()
            .map(|v| format_coord(*v))
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn format_coord(v: f64) -> String {
    let r = (v * 1e12).round() / 1e12;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

/// A candidate decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Id(String),
    Point(SimplexPoint),
}

impl Decision {
    pub fn label(&self) -> String {
        match self {
            Decision::Id(id) => id.clone(),
            Decision::Point(p) => p.label(),
        }
    }

    pub fn as_point(&self) -> Option<&SimplexPoint> {
        match self {
            Decision::Point(p) => Some(p),
            Decision::Id(_) => None,
        }
    }

    /// Lexicographic order used for tie-breaking.
    pub fn lex_cmp(&self, other: &Decision) -> Ordering {
        match (self, other) {
            (Decision::Point(a), Decision::Point(b)) => a
                .reduced()
                .iter()
                .zip(b.reduced())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal),
            _ => self.label().cmp(&other.label()),
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Uniform lattice on the unit simplex of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexGrid {
    pub dim: usize,
    pub step: f64,
}

impl SimplexGrid {
    pub fn new(dim: usize, step: f64) -> Result<Self> {
        let g = SimplexGrid { dim, step };
        g.divisions()?;
        if dim == 0 {
            return Err(domain("simplex dimension must be at least 1"));
        }
        Ok(g)
    }

    /// Number of divisions `m = 1 / step`; the step must divide 1.
    pub fn divisions(&self) -> Result<usize> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(domain(format!("grid step {} must lie in (0, 1]", self.step)));
        }
        let m = (1.0 / self.step).round();
        if (m * self.step - 1.0).abs() > 1e-9 {
            return Err(domain(format!("grid step {} does not divide 1", self.step)));
        }
        Ok(m as usize)
    }

    pub fn count(&self) -> Result<usize> {
        let m = self.divisions()? as u128;
        let k = self.dim as u128;
        // C(m + k - 1, k - 1)
        let mut c: u128 = 1;
        for i in 1..k {
            c = c * (m + i) / i;
            if c > MAX_LATTICE_POINTS as u128 {
                return Ok(usize::MAX);
            }
        }
        Ok(c as usize)
    }

    /// All lattice points, ordered lexicographically by reduced coordinates.
    pub fn points(&self) -> Result<Vec<SimplexPoint>> {
        let m = self.divisions()?;
        let count = self.count()?;
        if count > MAX_LATTICE_POINTS {
            return Err(domain(format!(
                "simplex lattice of dimension {} at step {} exceeds {MAX_LATTICE_POINTS} points",
                self.dim, self.step
            )));
        }
        let mut out = Vec::with_capacity(count);
        let mut parts = vec![0usize; self.dim];
        fn rec(idx: usize, left: usize, m: usize, parts: &mut [usize], out: &mut Vec<SimplexPoint>) {
            let k = parts.len();
            if idx == k - 1 {
                parts[idx] = left;
                let w = parts.iter().map(|&p| p as f64 / m as f64).collect();
                out.push(SimplexPoint(w));
                return;
            }
            for i in 0..=left {
                parts[idx] = i;
                rec(idx + 1, left - i, m, parts, out);
            }
        }
        rec(0, m, m, &mut parts, &mut out);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateSet {
    Explicit(Vec<Decision>),
    Simplex(SimplexGrid),
}

/// The finite set `f(x; S)` for one candidate, in scenario order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveImage {
    scenarios: Vec<String>,
    points: Vec<ObjectiveVector>,
}

impl ObjectiveImage {
    pub fn new(scenarios: Vec<String>, points: Vec<ObjectiveVector>) -> Result<Self> {
        if scenarios.len() != points.len() {
            return Err(dimension("one point per scenario required"));
        }
        if points.is_empty() {
            return Err(domain("objective image must be nonempty"));
        }
        let n = points[0].len();
        if points.iter().any(|p| p.len() != n) {
            return Err(dimension("image points must share one length"));
        }
        Ok(ObjectiveImage { scenarios, points })
    }

    /// Image with scenarios labelled `1..`.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let scenarios = (1..=points.len()).map(|i| i.to_string()).collect();
        let points = points.into_iter().map(ObjectiveVector::new).collect::<Result<_>>()?;
        ObjectiveImage::new(scenarios, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn scenarios(&self) -> &[String] {
        &self.scenarios
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ObjectiveVector)> {
        self.scenarios.iter().map(String::as_str).zip(&self.points)
    }

    pub fn point(&self, scenario: &str) -> Option<&ObjectiveVector> {
        self.iter().find(|(s, _)| *s == scenario).map(|(_, p)| p)
    }

    /// Keeps the entries whose index satisfies `keep`.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> ObjectiveImage {
        let (scenarios, points) = self
            .scenarios
            .iter()
            .zip(&self.points)
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (s, p))| (s.clone(), p.clone()))
            .unzip();
        ObjectiveImage { scenarios, points }
    }

    /// Componentwise maximum over the image.
    pub fn max_corner(&self) -> ObjectiveVector {
        let mut c = self.points[0].0.clone();
        for p in &self.points[1..] {
            for (a, b) in c.iter_mut().zip(p.iter()) {
                *a = a.max(*b);
            }
        }
        ObjectiveVector(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: Option<String>,
    n: usize,
    scenarios: ScenarioSet,
    objectives: UncertainObjectiveMap,
    candidates: CandidateSet,
    decision_scale: f64,
}

impl Instance {
    pub fn new(
        n: usize,
        scenarios: ScenarioSet,
        objectives: UncertainObjectiveMap,
        candidates: CandidateSet,
    ) -> Result<Self> {
        let inst = Instance {
            name: None,
            n,
            scenarios,
            objectives,
            candidates,
            decision_scale: 1.0,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("objective count must be at least 1"));
        }
        self.objectives.validate(&self.scenarios)?;
        if self.objectives.output_dim() != self.n {
            return Err(dimension(format!(
                "objective map produces {} objectives, instance declares {}",
                self.objectives.output_dim(),
                self.n
            )));
        }
        if let (UncertainObjectiveMap::LinearInS(_), Some(poly)) = (&self.objectives, self.scenarios.polyhedron()) {
            let d = self.scenarios.points().map_or(0, |p| p[0].len());
            if poly.dim() != d {
                return Err(dimension("polyhedron dimension differs from scenario coordinates"));
            }
        }
        let k = self.objectives.decision_dim();
        match (&self.candidates, k) {
            (CandidateSet::Explicit(list), _) if list.is_empty() => return Err(Error::EmptyCandidates),
            (CandidateSet::Explicit(list), None) => {
                let UncertainObjectiveMap::Table(t) = &self.objectives else { unreachable!() };
                for d in list {
                    if !t.contains_key(&d.label()) {
                        return Err(Error::UnknownCandidate(d.label()));
                    }
                }
            }
            (CandidateSet::Explicit(list), Some(k)) => {
                for d in list {
                    match d {
                        Decision::Point(p) if p.dim() == k => {}
                        Decision::Point(p) => {
                            return Err(dimension(format!("candidate {} has dimension {}, expected {k}", p.label(), p.dim())))
                        }
                        Decision::Id(id) => {
                            return Err(domain(format!("candidate `{id}` needs simplex coordinates for a {} map", self.objectives.kind())))
                        }
                    }
                }
            }
            (CandidateSet::Simplex(_), None) => {
                return Err(domain("table objectives need an explicit candidate list"));
            }
            (CandidateSet::Simplex(g), Some(k)) => {
                if g.dim != k {
                    return Err(dimension(format!("simplex grid dimension {} differs from map dimension {k}", g.dim)));
                }
                g.divisions()?;
            }
        }
        if !(self.decision_scale.is_finite() && self.decision_scale > 0.0) {
            return Err(domain("decision scale must be positive"));
        }
        Ok(())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Points of the simplex map to decisions `scale * weights`.
    pub fn with_decision_scale(mut self, scale: f64) -> Result<Self> {
        self.decision_scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn with_candidates(&self, candidates: CandidateSet) -> Result<Instance> {
        let mut out = self.clone();
        out.candidates = candidates;
        out.validate()?;
        Ok(out)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn objectives(&self) -> &UncertainObjectiveMap {
        &self.objectives
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn decision_scale(&self) -> f64 {
        self.decision_scale
    }

    pub fn decision_dim(&self) -> Option<usize> {
        self.objectives.decision_dim()
    }

    /// The finite candidate list (lattice-expanded for simplex grids).
    pub fn decisions(&self) -> Result<Vec<Decision>> {
        match &self.candidates {
            CandidateSet::Explicit(list) => Ok(list.clone()),
            CandidateSet::Simplex(g) => Ok(g.points()?.into_iter().map(Decision::Point).collect()),
        }
    }

    /// Resolves a candidate label, falling back to reduced simplex coordinates
    /// separated by `;` for point-based maps.
    pub fn find_decision(&self, label: &str) -> Result<Decision> {
        if let CandidateSet::Explicit(list) = &self.candidates {
            if let Some(d) = list.iter().find(|d| d.label() == label) {
                return Ok(d.clone());
            }
        }
        if let Some(k) = self.decision_dim() {
            let coords: std::result::Result<Vec<f64>, _> = label.split(';').map(|t| t.trim().parse::<f64>()).collect();
            if let Ok(coords) = coords {
                let p = if k == 1 && coords.len() == 1 {
                    SimplexPoint::new(coords)
                } else if coords.len() + 1 == k {
                    SimplexPoint::from_reduced(&coords)
                } else {
                    return Err(Error::UnknownCandidate(label.to_string()));
                };
                return p.map(Decision::Point).map_err(|_| Error::UnknownCandidate(label.to_string()));
            }
        }
        Err(Error::UnknownCandidate(label.to_string()))
    }

    /// Decision vector `scale * weights` fed to the objective map.
    pub fn decision_vector(&self, p: &SimplexPoint) -> Vec<f64> {
        p.weights().iter().map(|w| w * self.decision_scale).collect()
    }

    fn check_decision(&self, d: &Decision) -> Result<()> {
        match (d, self.decision_dim()) {
            (Decision::Point(p), Some(k)) if p.dim() == k => Ok(()),
            (Decision::Point(p), Some(k)) => Err(dimension(format!("candidate has dimension {}, expected {k}", p.dim()))),
            (_, None) => {
                let UncertainObjectiveMap::Table(t) = &self.objectives else { unreachable!() };
                if t.contains_key(&d.label()) {
                    Ok(())
                } else {
                    Err(Error::UnknownCandidate(d.label()))
                }
            }
            (Decision::Id(id), Some(_)) => Err(Error::UnknownCandidate(id.clone())),
        }
    }

    pub fn evaluate(&self, d: &Decision, scenario: &str) -> Result<ObjectiveVector> {
        let s = self.scenarios.index_of(scenario)?;
        self.evaluate_at(d, s)
    }

    /// Evaluates `f(d; s)` for the scenario at position `s`.
    pub fn evaluate_at(&self, d: &Decision, s: usize) -> Result<ObjectiveVector> {
        if s >= self.scenarios.len() {
            return Err(Error::UnknownScenario(format!("#{s}")));
        }
        self.check_decision(d)?;
        let v = self.eval_unchecked(d, s);
        ObjectiveVector::new(v)
    }

    fn eval_unchecked(&self, d: &Decision, s: usize) -> Vec<f64> {
        match &self.objectives {
            UncertainObjectiveMap::Table(t) => t[&d.label()][s].0.clone(),
            map => {
                let p = d.as_point().expect("checked");
                map.eval_point(&self.decision_vector(p), s, &self.scenarios)
            }
        }
    }

    pub fn image(&self, d: &Decision) -> Result<ObjectiveImage> {
        self.check_decision(d)?;
        let points = (0..self.scenarios.len())
            .map(|s| ObjectiveVector::new(self.eval_unchecked(d, s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ObjectiveImage {
            scenarios: self.scenarios.ids().to_vec(),
            points,
        })
    }

    /// Same instance with objective `i` divided by `factors[i]`.
    pub fn rescaled(&self, factors: &[f64]) -> Result<Instance> {
        if factors.len() != self.n {
            return Err(dimension(format!("{} scale factors for {} objectives", factors.len(), self.n)));
        }
        if factors.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(domain("scale factors must be positive"));
        }
        let mut out = self.clone();
        out.objectives = self.objectives.rescaled(factors);
        Ok(out)
    }

    pub(crate) fn with_parts(
        &self,
        scenarios: ScenarioSet,
        objectives: UncertainObjectiveMap,
        candidates: CandidateSet,
    ) -> Result<Instance> {
        let out = Instance {
            name: self.name.clone(),
            n: self.n,
            scenarios,
            objectives,
            candidates,
            decision_scale: self.decision_scale,
        };
        out.validate()?;
        Ok(out)
    }
}
