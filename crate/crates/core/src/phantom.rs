//! Synthetic one-dimensional dose-planning instance.
//!
//! A row of `grid_points` voxels holds a target span and an organ-at-risk
//! span; every other voxel is unclassified tissue. Spots with Gaussian
//! deposition kernels sit evenly across the target. A scenario shifts every
//! spot center by a whole number of voxels. The two objectives are
//!
//! * `f_1 = w_T sum_{v in T} (d(v; s) . x - dose)^2`
//! * `f_2 = w_R sum_{v in R} (d(v; s) . x)^2 + w_U sum_{v in U} (d(v; s) . x)^2`
//!
//! Decisions are spot weights `x = scale * lambda` for `lambda` on a simplex
//! with one extra slack coordinate, so the total weight may range from zero
//! up to `scale`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CandidateSet, Decision, Instance, LeastSquaresMap, LeastSquaresObjective, Matrix, ScenarioSet, SimplexGrid,
    SimplexPoint, UncertainObjectiveMap,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomConfig {
    pub grid_points: usize,
    pub spots: usize,
    pub target: Range<usize>,
    /// May be empty.
    pub rectum: Range<usize>,
    pub dose: f64,
    /// `(w_T, w_R, w_U)`.
    pub weights: [f64; 3],
    pub shifts: Vec<i64>,
    pub sigma: f64,
    /// Lattice step of the candidate simplex.
    pub step: f64,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        PhantomConfig {
            grid_points: 60,
            spots: 12,
            target: 20..40,
            rectum: 42..50,
            dose: 1.0,
            weights: [1e3, 1e2, 1.0],
            shifts: vec![-3, 0, 3],
            sigma: 2.0,
            step: 1.0 / 6.0,
        }
    }
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl PhantomConfig {
    pub fn validate(&self) -> Result<()> {
        let g = self.grid_points;
        if g == 0 || self.spots == 0 {
            return Err(config("grid and spot counts must be positive"));
        }
        if self.target.is_empty() || self.target.end > g {
            return Err(config(format!("target span {:?} must be nonempty and inside 0..{g}", self.target)));
        }
        if self.rectum.end > g || self.rectum.start > self.rectum.end {
            return Err(config(format!("rectum span {:?} must lie inside 0..{g}", self.rectum)));
        }
        if !self.rectum.is_empty() && self.rectum.start < self.target.end && self.target.start < self.rectum.end {
            return Err(config("target and rectum spans overlap"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(config("objective weights must be positive"));
        }
        if !(self.dose.is_finite() && self.dose > 0.0) {
            return Err(config("prescribed dose must be positive"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(config("kernel width must be positive"));
        }
        if self.shifts.is_empty() {
            return Err(config("at least one shift is required"));
        }
        let mut sorted = self.shifts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.shifts.len() {
            return Err(config("shifts must be distinct"));
        }
        SimplexGrid::new(self.spots + 1, self.step).map_err(|e| config(e.to_string()))?;
        Ok(())
    }

    /// Spot centers, evenly spaced over the target in voxel coordinates.
    pub fn spot_centers(&self) -> Vec<f64> {
        let len = self.target.len() as f64;
        let spacing = len / self.spots as f64;
        (0..self.spots)
            .map(|j| self.target.start as f64 - 0.5 + (j as f64 + 0.5) * spacing)
            .collect()
    }

    /// Deposition matrix for one shift: voxel rows, spot columns, plus a zero
    /// column for the slack coordinate.
    pub fn deposition(&self, shift: i64) -> Matrix {
        let centers = self.spot_centers();
        let mut m = Matrix::zeros(self.grid_points, self.spots + 1);
        for v in 0..self.grid_points {
            for (j, c) in centers.iter().enumerate() {
                let d = v as f64 - c - shift as f64;
                m.set(v, j, (-d * d / (2.0 * self.sigma * self.sigma)).exp());
            }
        }
        m
    }

    /// Weight `alpha` per spot giving mean target dose `dose` in the
    /// unshifted geometry.
    pub fn uniform_weight(&self) -> f64 {
        let m = self.deposition(0);
        let total: f64 = self.target.clone().map(|v| m.row(v)[..self.spots].iter().sum::<f64>()).sum();
        self.dose * self.target.len() as f64 / total
    }

    /// Maximum total spot weight; twice the uniform plan's total.
    pub fn scale(&self) -> f64 {
        2.0 * self.uniform_weight() * self.spots as f64
    }

    /// Simplex point of the uniform plan: `1 / (2 spots)` per spot, half slack.
    pub fn uniform_plan(&self) -> Decision {
        let mut w = vec![1.0 / (2.0 * self.spots as f64); self.spots];
        w.push(0.5);
        Decision::Point(SimplexPoint::new(w).expect("valid by construction"))
    }

    /// The zero plan: all weight on the slack coordinate.
    pub fn zero_plan(&self) -> Decision {
        let mut w = vec![0.0; self.spots];
        w.push(1.0);
        Decision::Point(SimplexPoint::new(w).expect("valid by construction"))
    }

    fn in_target(&self, v: usize) -> bool {
        self.target.contains(&v)
    }

    fn in_rectum(&self, v: usize) -> bool {
        self.rectum.contains(&v)
    }

    pub fn generate(&self) -> Result<Instance> {
        self.validate()?;
        let g = self.grid_points;
        let [wt, wr, wu] = self.weights;
        let target_obj = LeastSquaresObjective {
            weights: (0..g).map(|v| if self.in_target(v) { wt } else { 0.0 }).collect(),
            targets: (0..g).map(|v| if self.in_target(v) { self.dose } else { 0.0 }).collect(),
        };
        let healthy_obj = LeastSquaresObjective {
            weights: (0..g)
                .map(|v| {
                    if self.in_target(v) {
                        0.0
                    } else if self.in_rectum(v) {
                        wr
                    } else {
                        wu
                    }
                })
                .collect(),
            targets: vec![0.0; g],
        };
        let operators = self.shifts.iter().map(|s| self.deposition(*s)).collect();
        let ids = self
            .shifts
            .iter()
            .map(|s| if *s == 0 { "0".to_string() } else { format!("{s:+}") })
            .collect();
        let inst = Instance::new(
            2,
            ScenarioSet::new(ids)?,
            UncertainObjectiveMap::LeastSquares(LeastSquaresMap {
                operators,
                objectives: vec![target_obj, healthy_obj],
            }),
            CandidateSet::Simplex(SimplexGrid::new(self.spots + 1, self.step)?),
        )?
        .with_name("phantom")
        .with_decision_scale(self.scale())?;
        Ok(inst)
    }

    /// Objective scales used to map images into the unit square:
    /// `f_1` at the zero plan and the worst-case `f_2` at twice the uniform plan.
    pub fn normalizers(&self) -> Result<[f64; 2]> {
        let inst = self.generate()?;
        let n1 = self.weights[0] * self.target.len() as f64 * self.dose * self.dose;
        let mut full = vec![1.0 / self.spots as f64; self.spots];
        full.push(0.0);
        let full = Decision::Point(SimplexPoint::new(normalize(full))?);
        let img = inst.image(&full)?;
        let n2 = img.points().iter().map(|p| p[1]).fold(0.0, f64::max);
        Ok([n1, n2])
    }

    /// The generated instance with both objectives divided by [`normalizers`].
    ///
    /// [`normalizers`]: PhantomConfig::normalizers
    pub fn generate_scaled(&self) -> Result<Instance> {
        let inst = self.generate()?;
        inst.rescaled(&self.normalizers()?)
    }
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= t);
    w
}

pub fn generate(cfg: &PhantomConfig) -> Result<Instance> {
    cfg.generate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::{classify, pareto_filter_max};
    use crate::geometry::Tolerances;

    #[test]
    fn zero_plan_images() {
        let cfg = PhantomConfig::default();
        let inst = cfg.generate().unwrap();
        let img = inst.image(&cfg.zero_plan()).unwrap();
        for p in img.points() {
            assert_eq!(p.values(), &[1e3 * 20.0, 0.0]);
        }
    }

    #[test]
    fn shifts_move_dose_off_target() {
        let cfg = PhantomConfig::default();
        let inst = cfg.generate().unwrap();
        let img = inst.image(&cfg.uniform_plan()).unwrap();
        let nominal = img.point("0").unwrap()[0];
        assert!(nominal < img.point("-3").unwrap()[0]);
        assert!(nominal < img.point("+3").unwrap()[0]);
    }

    #[test]
    fn uniform_plan_hits_mean_dose() {
        let cfg = PhantomConfig::default();
        let m = cfg.deposition(0);
        let x: Vec<f64> = (0..=cfg.spots).map(|j| if j < cfg.spots { cfg.uniform_weight() } else { 0.0 }).collect();
        let dose = m.mul_vec(&x);
        let mean: f64 = cfg.target.clone().map(|v| dose[v]).sum::<f64>() / cfg.target.len() as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_shifts_give_mirror_images() {
        let cfg = PhantomConfig {
            rectum: 0..0,
            ..PhantomConfig::default()
        };
        let inst = cfg.generate().unwrap();
        let img = inst.image(&cfg.uniform_plan()).unwrap();
        let (a, b) = (img.point("-3").unwrap(), img.point("+3").unwrap());
        assert!((a[0] - b[0]).abs() < 1e-9 * a[0].abs().max(1.0));
        assert!((a[1] - b[1]).abs() < 1e-9 * a[1].abs().max(1.0));
    }

    #[test]
    fn nominal_only_is_deterministic() {
        let cfg = PhantomConfig {
            shifts: vec![0],
            step: 0.5,
            spots: 3,
            ..PhantomConfig::default()
        };
        let inst = cfg.generate().unwrap();
        let rep = classify(&inst, &Tolerances::default()).unwrap();
        // With one scenario the hull and plain tests coincide.
        assert_eq!(rep.robust_set(), rep.convex_hull_set());
        for d in inst.decisions().unwrap() {
            let img = inst.image(&d).unwrap();
            assert_eq!(pareto_filter_max(&img, &Tolerances::default()), img);
        }
    }

    #[test]
    fn invalid_spans_are_config_errors() {
        let overlap = PhantomConfig {
            rectum: 35..45,
            ..PhantomConfig::default()
        };
        assert!(matches!(overlap.generate(), Err(Error::Config(_))));
        let outside = PhantomConfig {
            target: 50..70,
            ..PhantomConfig::default()
        };
        assert!(matches!(outside.generate(), Err(Error::Config(_))));
    }
}
