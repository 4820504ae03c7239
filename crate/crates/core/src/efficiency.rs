//! Candidate classification with certificates.
//!
//! Every label is relative to the supplied finite candidate list. A false
//! label carries a dominating candidate and one witness per dominated image
//! point, so reports can be re-verified. The reported dominator is chosen
//! among the dominators that are themselves efficient for the same label as
//! the one with the largest total witness gap; ties go to the earliest.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{image_dominates, DominanceMode, PointWitness, Tolerances};
use crate::model::{Decision, Instance, ObjectiveImage};

/// A dominating candidate and the witnesses that certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dominator {
    /// Position of the dominating candidate in the candidate list.
    pub index: usize,
    pub label: String,
    pub witnesses: Vec<PointWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidate: String,
    pub robust_efficient: bool,
    pub convex_hull_efficient: bool,
    pub objectivewise_efficient: bool,
    pub set_valued_minimizer: bool,
    pub robust_dominator: Option<Dominator>,
    pub convex_hull_dominator: Option<Dominator>,
    pub objectivewise_dominator: Option<Dominator>,
    /// Set-valued witnesses compare the filtered sets `F(x)` and `F(x*)`.
    pub set_valued_dominator: Option<Dominator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub rows: Vec<CandidateReport>,
}

impl EfficiencyReport {
    pub fn robust_set(&self) -> Vec<&str> {
        self.select(|r| r.robust_efficient)
    }

    pub fn convex_hull_set(&self) -> Vec<&str> {
        self.select(|r| r.convex_hull_efficient)
    }

    pub fn objectivewise_set(&self) -> Vec<&str> {
        self.select(|r| r.objectivewise_efficient)
    }

    pub fn set_valued_set(&self) -> Vec<&str> {
        self.select(|r| r.set_valued_minimizer)
    }

    pub fn row(&self, candidate: &str) -> Option<&CandidateReport> {
        self.rows.iter().find(|r| r.candidate == candidate)
    }

    fn select(&self, f: impl Fn(&CandidateReport) -> bool) -> Vec<&str> {
        self.rows.iter().filter(|r| f(r)).map(|r| r.candidate.as_str()).collect()
    }
}

/// Dominance mode that realizes robust efficiency for this instance. When the
/// scenario set is declared convexly closed, images are convex and the hull
/// test is the exact one.
pub fn robust_mode(instance: &Instance) -> DominanceMode {
    if instance.scenarios().convex_closure() {
        DominanceMode::Hull
    } else {
        DominanceMode::Plain
    }
}

pub fn images(instance: &Instance) -> Result<(Vec<Decision>, Vec<ObjectiveImage>)> {
    let decisions = instance.decisions()?;
    let images = decisions
        .par_iter()
        .map(|d| instance.image(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((decisions, images))
}

/// Whether every point of `a` lies componentwise below the max corner of `b`.
/// Necessary for either kind of dominance; skips most LPs.
fn under_corner(a: &ObjectiveImage, b_corner: &[f64], tol: &Tolerances) -> bool {
    a.points().iter().all(|p| p.iter().zip(b_corner).all(|(y, c)| *y <= c + tol.eq_tol))
}

/// How one label's dominance relation is tested.
#[derive(Clone, Copy)]
enum Relation {
    /// `f(x; S)` against `A(f(x*; S))` in the given mode.
    Image(DominanceMode),
    /// `f(x; S)` against the max corner of `f(x*; S)`.
    Corner,
    /// Filtered sets `F(x)` against `F(x*)`, skipping equal sets.
    SetValued(DominanceMode),
}

struct Context<'a> {
    images: &'a [ObjectiveImage],
    filtered: &'a [ObjectiveImage],
    corners: &'a [ObjectiveImage],
    labels: &'a [String],
    tol: &'a Tolerances,
}

impl Context<'_> {
    fn dominates(&self, i: usize, j: usize, rel: Relation) -> Result<Option<Vec<PointWitness>>> {
        if i == j {
            return Ok(None);
        }
        let tol = self.tol;
        match rel {
            Relation::Image(mode) => {
                if !under_corner(&self.images[i], self.corners[j].points()[0].values(), tol) {
                    return Ok(None);
                }
                image_dominates(&self.images[i], &self.images[j], mode, tol)
            }
            Relation::Corner => image_dominates(&self.images[i], &self.corners[j], DominanceMode::Plain, tol),
            Relation::SetValued(mode) => {
                if sets_equal(&self.filtered[i], &self.filtered[j], tol) {
                    return Ok(None);
                }
                image_dominates(&self.filtered[i], &self.filtered[j], mode, tol)
            }
        }
    }

    fn dominator(&self, i: usize, witnesses: Vec<PointWitness>) -> Dominator {
        Dominator {
            index: i,
            label: self.labels[i].clone(),
            witnesses,
        }
    }

    /// First dominator of `j` in candidate order, if any.
    fn first(&self, j: usize, rel: Relation) -> Result<Option<Dominator>> {
        for i in 0..self.images.len() {
            if let Some(w) = self.dominates(i, j, rel)? {
                return Ok(Some(self.dominator(i, w)));
            }
        }
        Ok(None)
    }

    /// Total gap `sum_i (c_i - y_i)` over the witnesses of candidate `i`.
    fn strength(&self, i: usize, rel: Relation, witnesses: &[PointWitness]) -> f64 {
        let source = match rel {
            Relation::SetValued(_) => &self.filtered[i],
            _ => &self.images[i],
        };
        witnesses
            .iter()
            .filter_map(|pw| {
                let y = source.point(&pw.scenario)?;
                Some(y.iter().zip(pw.witness.point()).map(|(a, c)| (c - a).max(0.0)).sum::<f64>())
            })
            .sum()
    }

    /// Labels all candidates for one relation. A dominated candidate reports
    /// the efficient dominator with the strongest certificate, falling back
    /// to the first dominator overall.
    fn label(&self, rel: Relation) -> Result<Vec<Option<Dominator>>> {
        let first = (0..self.images.len())
            .into_par_iter()
            .map(|j| self.first(j, rel))
            .collect::<Result<Vec<_>>>()?;
        let efficient: Vec<usize> = (0..first.len()).filter(|&i| first[i].is_none()).collect();
        first
            .into_par_iter()
            .enumerate()
            .map(|(j, dom)| {
                let Some(dom) = dom else { return Ok(None) };
                let mut best: Option<(f64, Dominator)> = None;
                for &i in &efficient {
                    if let Some(w) = self.dominates(i, j, rel)? {
                        let g = self.strength(i, rel, &w);
                        if best.as_ref().is_none_or(|(b, _)| g > b + self.tol.strict_tol) {
                            best = Some((g, self.dominator(i, w)));
                        }
                    }
                }
                Ok(Some(best.map_or(dom, |(_, d)| d)))
            })
            .collect()
    }
}

/// Labels every candidate as robust, convex-hull, objectivewise efficient and
/// set-valued minimizer.
///
/// Fails with [`Error::Invariant`] if a candidate comes out convex-hull
/// efficient but not robust efficient, which would mean a numerical fault.
pub fn classify(instance: &Instance, tol: &Tolerances) -> Result<EfficiencyReport> {
    let (decisions, images) = images(instance)?;
    classify_images(&decisions, &images, robust_mode(instance), tol)
}

pub fn classify_images(
    decisions: &[Decision],
    images: &[ObjectiveImage],
    robust: DominanceMode,
    tol: &Tolerances,
) -> Result<EfficiencyReport> {
    let labels: Vec<String> = decisions.iter().map(Decision::label).collect();
    let filtered: Vec<ObjectiveImage> = images.iter().map(|img| pareto_filter_max(img, tol)).collect();
    let corners = images
        .iter()
        .map(|img| ObjectiveImage::new(vec!["sup".to_string()], vec![img.max_corner()]))
        .collect::<Result<Vec<_>>>()?;
    let ctx = Context {
        images,
        filtered: &filtered,
        corners: &corners,
        labels: &labels,
        tol,
    };
    let robust_dom = ctx.label(Relation::Image(robust))?;
    let hull_dom = if robust == DominanceMode::Hull {
        robust_dom.clone()
    } else {
        ctx.label(Relation::Image(DominanceMode::Hull))?
    };
    let corner_dom = ctx.label(Relation::Corner)?;
    let set_dom = ctx.label(Relation::SetValued(robust))?;
    let mut rows = Vec::with_capacity(images.len());
    for (j, (((r, h), c), s)) in robust_dom.into_iter().zip(hull_dom).zip(corner_dom).zip(set_dom).enumerate() {
        let row = CandidateReport {
            candidate: labels[j].clone(),
            robust_efficient: r.is_none(),
            convex_hull_efficient: h.is_none(),
            objectivewise_efficient: c.is_none(),
            set_valued_minimizer: s.is_none(),
            robust_dominator: r,
            convex_hull_dominator: h,
            objectivewise_dominator: c,
            set_valued_dominator: s,
        };
        if row.convex_hull_efficient && !row.robust_efficient {
            return Err(Error::Invariant(format!(
                "candidate {} is convex hull efficient but not robust efficient",
                row.candidate
            )));
        }
        rows.push(row);
    }
    Ok(EfficiencyReport { rows })
}

/// Keeps the points not dominated in the maximization sense by another point
/// of the image. Exact duplicates are all kept.
pub fn pareto_filter_max(img: &ObjectiveImage, tol: &Tolerances) -> ObjectiveImage {
    let pts = img.points();
    let dominated = |i: usize| {
        pts.iter().enumerate().any(|(j, q)| {
            j != i && {
                let p = &pts[i];
                p.iter().zip(q.iter()).all(|(a, b)| *a <= b + tol.eq_tol)
                    && p.iter().zip(q.iter()).map(|(a, b)| (b - a).max(0.0)).sum::<f64>() > tol.strict_tol
            }
        })
    };
    img.filtered(|i| !dominated(i))
}

/// Mutual pointwise matching within `eq_tol`.
pub fn sets_equal(a: &ObjectiveImage, b: &ObjectiveImage, tol: &Tolerances) -> bool {
    let close = |p: &[f64], q: &[f64]| p.iter().zip(q).all(|(x, y)| (x - y).abs() <= tol.eq_tol);
    a.points().iter().all(|p| b.points().iter().any(|q| close(p, q)))
        && b.points().iter().all(|q| a.points().iter().any(|p| close(p, q)))
}

/// Minimizers of the set-valued map `F(x) = pareto_filter_max(f(x; S))`
/// under the order `A <= B` iff `A = B` or `A` lies in `B - (R^n_+ \ {0})`.
pub fn set_valued_minimizers(instance: &Instance, tol: &Tolerances) -> Result<Vec<Decision>> {
    let (decisions, images) = images(instance)?;
    let labels: Vec<String> = decisions.iter().map(Decision::label).collect();
    let filtered: Vec<ObjectiveImage> = images.iter().map(|img| pareto_filter_max(img, tol)).collect();
    let ctx = Context {
        images: &images,
        filtered: &filtered,
        corners: &[],
        labels: &labels,
        tol,
    };
    let rel = Relation::SetValued(robust_mode(instance));
    let keep = (0..filtered.len())
        .into_par_iter()
        .map(|j| ctx.first(j, rel).map(|d| d.is_none()))
        .collect::<Result<Vec<bool>>>()?;
    Ok(decisions.into_iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| d).collect())
}

/// Re-checks every certificate in a report against the instance.
pub fn verify_report(instance: &Instance, report: &EfficiencyReport, tol: &Tolerances) -> Result<()> {
    let (decisions, images) = images(instance)?;
    if report.rows.len() != decisions.len() {
        return Err(Error::Invariant("report and instance disagree on candidate count".into()));
    }
    // (label, dominator, anchors, mode, compare filtered images, name)
    type Check<'a> = (bool, &'a Option<Dominator>, &'a ObjectiveImage, DominanceMode, bool, &'a str);
    let fail = |row: &CandidateReport, what: &str| {
        Err(Error::Invariant(format!("certificate for {} ({what}) does not verify", row.candidate)))
    };
    for (j, row) in report.rows.iter().enumerate() {
        let target = &images[j];
        let corner = ObjectiveImage::new(vec!["sup".into()], vec![target.max_corner()])?;
        let filtered_target = pareto_filter_max(target, tol);
        let checks: [Check; 4] = [
            (row.robust_efficient, &row.robust_dominator, target, robust_mode(instance), false, "robust"),
            (row.convex_hull_efficient, &row.convex_hull_dominator, target, DominanceMode::Hull, false, "convex hull"),
            (row.objectivewise_efficient, &row.objectivewise_dominator, &corner, DominanceMode::Plain, false, "objectivewise"),
            (row.set_valued_minimizer, &row.set_valued_dominator, &filtered_target, robust_mode(instance), true, "set-valued"),
        ];
        for (label, dom, anchors, mode, filter, what) in checks {
            match (label, dom) {
                (true, None) => {}
                (false, Some(d)) => {
                    let source = if filter {
                        pareto_filter_max(&images[d.index], tol)
                    } else {
                        images[d.index].clone()
                    };
                    if d.witnesses.len() != source.len() || d.index == j {
                        return fail(row, what);
                    }
                    for pw in &d.witnesses {
                        let Some(y) = source.point(&pw.scenario) else { return fail(row, what) };
                        let kind_ok = matches!(
                            (mode, &pw.witness),
                            (DominanceMode::Plain, crate::geometry::DominanceWitness::Point { .. })
                                | (DominanceMode::Hull, crate::geometry::DominanceWitness::Hull { .. })
                        );
                        if !kind_ok || !pw.witness.verify(y, anchors.points(), tol) {
                            return fail(row, what);
                        }
                    }
                }
                _ => return fail(row, what),
            }
        }
    }
    Ok(())
}
