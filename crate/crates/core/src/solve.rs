//! Minimization of worst-case scalarized objectives over candidate families.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linprog::{lp_solve, LpResult};
use crate::model::{CandidateSet, Decision, Instance, SimplexGrid, SimplexPoint};
use crate::scalarize::{clean_simplex, epigraph_form, solve_epigraph, Epigraph, Scalarizer};

/// Values closer than this are treated as ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactLp,
    Sweep,
    SweepRefined,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactLp => "exact_lp",
            Method::Sweep => "sweep",
            Method::SweepRefined => "sweep_refined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best: Decision,
    pub value: f64,
    pub method: Method,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Number of step-halving refinement passes after a lattice sweep.
    pub refine_passes: usize,
    /// Use the lattice sweep even where the exact LP applies.
    pub force_sweep: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            refine_passes: 8,
            force_sweep: false,
        }
    }
}

fn worst(instance: &Instance, u: &Scalarizer, d: &Decision) -> Result<f64> {
    Ok(u.worst_case(&instance.image(d)?)?.0)
}

/// Better value first; values within [`TIE_TOL`] go to the lexicographically
/// smaller candidate.
fn better(a: (&Decision, f64), b: (&Decision, f64)) -> bool {
    if a.1 < b.1 - TIE_TOL {
        return true;
    }
    if a.1 > b.1 + TIE_TOL {
        return false;
    }
    a.0.lex_cmp(b.0) == Ordering::Less
}

fn argmin(scored: Vec<(Decision, f64)>) -> Option<(Decision, f64)> {
    let mut best: Option<(Decision, f64)> = None;
    for (d, v) in scored {
        if best.as_ref().is_none_or(|(bd, bv)| better((&d, v), (bd, *bv))) {
            best = Some((d, v));
        }
    }
    best
}

fn exhaustive(instance: &Instance, u: &Scalarizer, decisions: Vec<Decision>) -> Result<(Decision, f64, usize)> {
    let count = decisions.len();
    let scored = decisions
        .into_par_iter()
        .map(|d| worst(instance, u, &d).map(|v| (d, v)))
        .collect::<Result<Vec<_>>>()?;
    let (d, v) = argmin(scored).ok_or(crate::Error::EmptyCandidates)?;
    Ok((d, v, count))
}

/// Minimizes `max_s u(f(x; s))` over the instance's candidates.
///
/// Explicit candidates are searched exhaustively. A linear `u` over a
/// simplex-parameterized linear map is solved exactly through the epigraph
/// LP. Anything else is swept on the lattice and refined locally.
pub fn minimize_scalarized(instance: &Instance, u: &Scalarizer, opts: &SolveOptions) -> Result<SolveResult> {
    match instance.candidates() {
        CandidateSet::Explicit(list) => {
            let (best, value, evaluations) = exhaustive(instance, u, list.clone())?;
            Ok(SolveResult {
                best,
                value,
                method: Method::Sweep,
                evaluations,
            })
        }
        CandidateSet::Simplex(grid) => {
            if !opts.force_sweep {
                if let Ok(epi @ Epigraph::Joint { .. }) = epigraph_form(instance, u, None) {
                    return exact(instance, u, &epi);
                }
            }
            sweep_refine(instance, u, grid, opts)
        }
    }
}

/// Solves the epigraph LP, then picks the lexicographically smallest point
/// among the optimal ones by minimizing each coordinate in turn.
fn exact(instance: &Instance, u: &Scalarizer, epi: &Epigraph) -> Result<SolveResult> {
    let Epigraph::Joint { lp, dim } = epi else { unreachable!() };
    let (point, level) = solve_epigraph(epi)?;
    let mut best = Decision::Point(point);
    let mut value = worst(instance, u, &best)?;
    let mut lp = lp.clone();
    let mut cap = vec![0.0; dim + 1];
    cap[*dim] = 1.0;
    lp.add_le(cap, level + TIE_TOL * level.abs().max(1.0))?;
    let mut solves = 1;
    for i in 0..dim.saturating_sub(1) {
        let mut c = vec![0.0; dim + 1];
        c[i] = 1.0;
        lp.objective = c;
        solves += 1;
        let LpResult::Optimal { solution, value: lowest } = lp_solve(&lp)? else { break };
        let candidate = Decision::Point(clean_simplex(&solution[..*dim])?);
        let v = worst(instance, u, &candidate)?;
        // Only accept the tie-break if it stays optimal after re-evaluation.
        if v <= value + TIE_TOL && candidate.lex_cmp(&best) != Ordering::Greater {
            best = candidate;
            value = value.min(v);
        }
        let mut fix = vec![0.0; dim + 1];
        fix[i] = 1.0;
        lp.add_le(fix, lowest + TIE_TOL)?;
    }
    let value = worst(instance, u, &best)?;
    Ok(SolveResult {
        best,
        value,
        method: Method::ExactLp,
        evaluations: solves,
    })
}

fn sweep_refine(instance: &Instance, u: &Scalarizer, grid: &SimplexGrid, opts: &SolveOptions) -> Result<SolveResult> {
    let decisions = grid.points()?.into_iter().map(Decision::Point).collect();
    let (mut best, mut value, mut evaluations) = exhaustive(instance, u, decisions)?;
    let mut h = grid.step;
    for _ in 0..opts.refine_passes {
        h /= 2.0;
        let (d, v, n) = descend(instance, u, best, value, h)?;
        best = d;
        value = v;
        evaluations += n;
    }
    Ok(SolveResult {
        best,
        value,
        method: if opts.refine_passes > 0 {
            Method::SweepRefined
        } else {
            Method::Sweep
        },
        evaluations,
    })
}

fn transfer(w: &[f64], i: usize, j: usize, h: f64) -> Option<Vec<f64>> {
    if w[j] < h - 1e-12 {
        return None;
    }
    let mut v = w.to_vec();
    v[i] += h;
    v[j] = (v[j] - h).max(0.0);
    Some(v)
}

/// Greedy descent with moves `x + h (e_i - e_j)`. When no single move
/// improves, pairs of such moves are tried, which lets the search follow
/// ridges where several scenarios are simultaneously worst.
fn descend(instance: &Instance, u: &Scalarizer, start: Decision, start_value: f64, h: f64) -> Result<(Decision, f64, usize)> {
    let Decision::Point(p) = &start else {
        return Ok((start, start_value, 0));
    };
    let k = p.dim();
    let mut current = p.weights().to_vec();
    let mut value = start_value;
    let mut evaluations = 0;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    loop {
        let singles: Vec<Vec<f64>> = pairs.iter().filter_map(|&(i, j)| transfer(&current, i, j, h)).collect();
        let mut step = best_move(instance, u, singles, &mut evaluations)?;
        if !step.as_ref().is_some_and(|(_, v)| *v < value - TIE_TOL) {
            let doubles: Vec<Vec<f64>> = pairs
                .iter()
                .enumerate()
                .flat_map(|(a, &(i, j))| {
                    let current = &current;
                    pairs[a + 1..]
                        .iter()
                        .filter_map(move |&(k2, l)| transfer(current, i, j, h).and_then(|v| transfer(&v, k2, l, h)))
                })
                .collect();
            step = best_move(instance, u, doubles, &mut evaluations)?;
        }
        match step {
            Some((w, v)) if v < value - TIE_TOL => {
                current = w;
                value = v;
            }
            _ => break,
        }
    }
    let best = Decision::Point(SimplexPoint::new(normalize(current))?);
    Ok((best, value, evaluations))
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

fn best_move(
    instance: &Instance,
    u: &Scalarizer,
    moves: Vec<Vec<f64>>,
    evaluations: &mut usize,
) -> Result<Option<(Vec<f64>, f64)>> {
    *evaluations += moves.len();
    let scored = moves
        .into_par_iter()
        .filter_map(|w| SimplexPoint::new(normalize(w)).ok().map(Decision::Point))
        .map(|d| worst(instance, u, &d).map(|v| (d, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmin(scored).map(|(d, v)| (d.as_point().expect("simplex move").weights().to_vec(), v)))
}

/// Solves one problem per scalarizer, in family order. Entries are labelled
/// by the scalarizer's spec string.
pub fn sweep_front(instance: &Instance, family: &[Scalarizer], opts: &SolveOptions) -> Result<Vec<(String, SolveResult)>> {
    if family.is_empty() {
        return Err(crate::error::domain("scalarizer family must be nonempty"));
    }
    family
        .iter()
        .map(|u| Ok((u.to_string(), minimize_scalarized(instance, u, opts)?)))
        .collect()
}
