//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime budgets are part of each criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robpareto::distro::{che_equals_robust_check, to_robust};
use robpareto::efficiency::{classify, set_valued_minimizers, verify_report, EfficiencyReport};
use robpareto::fixtures::{self, TableShape};
use robpareto::geometry::{dominated_by_hull, image_dominates, DominanceMode, Tolerances};
use robpareto::model::{Decision, Instance, ObjectiveVector, SimplexPoint};
use robpareto::phantom::PhantomConfig;
use robpareto::scalarize::{constructive_scalarizer, dual_worst_case, Monotonicity, Scalarizer};
use robpareto::solve::{minimize_scalarized, SolveOptions};
use robpareto::Result;

const EXACT_TOL: f64 = 1e-9;
const RADIUS_TOL: f64 = 1e-6;
const DUAL_TOL: f64 = 1e-7;
const SEED: u64 = 20_240_607;
const RANDOM_INSTANCES: usize = 100;
const HULL_QUERIES: usize = 10_000;
const POLYHEDRA: usize = 200;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        ok: true,
        detail: detail.into(),
    })
}

fn fail(detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        ok: false,
        detail: detail.into(),
    })
}

fn random_instances(seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..RANDOM_INSTANCES)
        .map(|_| fixtures::random_table(&mut rng, TableShape::default()))
        .collect()
}

fn worst(inst: &Instance, u: &Scalarizer, d: &Decision) -> Result<f64> {
    Ok(u.worst_case(&inst.image(d)?)?.0)
}

fn p1(x: f64) -> Decision {
    Decision::Point(SimplexPoint::from_reduced(&[x]).expect("x in [0, 1]"))
}

fn a1() -> Result<Outcome> {
    let tol = Tolerances::default();
    let inst = fixtures::problem_1(0.01)?;
    let report = classify(&inst, &tol)?;
    if report.rows.len() != 101 {
        return fail(format!("{} rows, expected 101", report.rows.len()));
    }
    if let Some(r) = report.rows.iter().find(|r| !r.robust_efficient) {
        return fail(format!("x={} not robust efficient", r.candidate));
    }
    let zero = report.row("0").expect("grid contains 0");
    let dom = zero.convex_hull_dominator.as_ref().map(|d| d.label.as_str());
    if zero.convex_hull_efficient || dom != Some("1") {
        return fail(format!("x=0: che={} dominator={dom:?}", zero.convex_hull_efficient));
    }
    if !report.row("1").expect("grid contains 1").convex_hull_efficient {
        return fail("x=1 not convex hull efficient");
    }
    pass("101 robust efficient; x=0 hull-dominated by x=1; x=1 convex hull efficient")
}

fn a2() -> Result<Outcome> {
    let inst = fixtures::problem_1(0.01)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut min_margin = f64::INFINITY;
    let mut count = 0;
    for p in [1.0, 2.0, 10.0] {
        for _ in 0..50 {
            let w = vec![rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0)];
            let u = Scalarizer::weighted_pnorm(w, p, None)?;
            assert!(u.monotonicity() >= Monotonicity::StrictlyIncreasing && u.is_convex());
            let margin = worst(&inst, &u, &p1(0.0))? - worst(&inst, &u, &p1(1.0))?;
            min_margin = min_margin.min(margin);
            count += 1;
        }
    }
    if min_margin > EXACT_TOL {
        pass(format!("{count} scalarizers, min margin {min_margin:.3e}"))
    } else {
        fail(format!("min margin {min_margin:.3e}"))
    }
}

fn a3() -> Result<Outcome> {
    let tol = Tolerances::default();
    let inst = fixtures::problem_2();
    let x01 = inst.find_decision("0;1")?;
    let x00 = inst.find_decision("0;0")?;
    for k in 0..=50 {
        let w1 = k as f64 / 100.0;
        let w2 = 1.0 - w1;
        let u = Scalarizer::weighted_sum(vec![w1, w2])?;
        let at01 = worst(&inst, &u, &x01)?;
        let expect = (3.0 * w1 + 2.5 * w2).max(3.0 * w1).max(6.0 * w1);
        if (at01 - expect).abs() > EXACT_TOL || at01 > 3.0 + EXACT_TOL {
            return fail(format!("w1={w1}: worst case at (0,1) is {at01}, expected {expect}"));
        }
        let at00 = worst(&inst, &u, &x00)?;
        if (at00 - 4.0).abs() > EXACT_TOL {
            return fail(format!("w1={w1}: worst case at (0,0) is {at00}"));
        }
    }
    if !classify(&inst, &tol)?.row("0;0").expect("vertex").convex_hull_efficient {
        return fail("(0,0) not certified convex hull efficient");
    }
    pass("51 weights match closed forms; (0,0) convex hull efficient")
}

/// Checks the constructive scalarizer for every candidate efficient in `mode`.
fn constructive_ok(inst: &Instance, report: &EfficiencyReport, mode: DominanceMode) -> Result<Option<String>> {
    let decisions = inst.decisions()?;
    for (d, row) in decisions.iter().zip(&report.rows) {
        let efficient = match mode {
            DominanceMode::Plain => row.robust_efficient,
            DominanceMode::Hull => row.convex_hull_efficient,
        };
        if !efficient {
            continue;
        }
        let u = constructive_scalarizer(inst, d, mode)?;
        let own = worst(inst, &u, d)?;
        if own.abs() > EXACT_TOL {
            return Ok(Some(format!("{:?} anchor {}: own worst case {own}", mode, row.candidate)));
        }
        for other in &decisions {
            let v = worst(inst, &u, other)?;
            if v < -EXACT_TOL || v < own - EXACT_TOL {
                return Ok(Some(format!("{:?} anchor {}: {} has {v}", mode, row.candidate, other.label())));
            }
        }
    }
    Ok(None)
}

fn a4() -> Result<Outcome> {
    let tol = Tolerances::default();
    let mut anchors = 0;
    for inst in random_instances(SEED) {
        let report = classify(&inst, &tol)?;
        anchors += report.robust_set().len() + report.convex_hull_set().len();
        for mode in [DominanceMode::Plain, DominanceMode::Hull] {
            if let Some(msg) = constructive_ok(&inst, &report, mode)? {
                return fail(msg);
            }
        }
    }
    pass(format!("{anchors} anchors over {RANDOM_INSTANCES} instances"))
}

/// Catalog of scalarizers for `n` objectives, including signed distances
/// anchored at `anchors`.
fn catalog<R: Rng>(rng: &mut R, n: usize, anchors: &[ObjectiveVector]) -> Result<Vec<Scalarizer>> {
    let mut w = || (0..n).map(|_| rng.gen_range(0.1..2.0)).collect::<Vec<f64>>();
    let mut out = vec![Scalarizer::weighted_sum(vec![1.0; n])?, Scalarizer::weighted_sum(w())?];
    if n > 1 {
        let mut z = vec![1.0; n];
        z[0] = 0.0;
        out.push(Scalarizer::weighted_sum(z)?);
    }
    for p in [1.0, 2.0, 10.0, f64::INFINITY] {
        out.push(Scalarizer::weighted_pnorm(w(), p, None)?);
    }
    out.push(Scalarizer::chebyshev(w(), None)?);
    out.push(Scalarizer::signed_distance(anchors.to_vec(), DominanceMode::Plain)?);
    out.push(Scalarizer::signed_distance(anchors.to_vec(), DominanceMode::Hull)?);
    Ok(out)
}

fn a5() -> Result<Outcome> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5);
    let (mut checks, mut violations) = (0usize, Vec::new());
    for inst in random_instances(SEED) {
        let decisions = inst.decisions()?;
        let imgs = decisions.iter().map(|d| inst.image(d)).collect::<Result<Vec<_>>>()?;
        let pick = rng.gen_range(0..imgs.len());
        let family = catalog(&mut rng, inst.n(), imgs[pick].points())?;
        for (a, ia) in imgs.iter().enumerate() {
            for (b, ib) in imgs.iter().enumerate() {
                if a == b {
                    continue;
                }
                for mode in [DominanceMode::Plain, DominanceMode::Hull] {
                    if image_dominates(ia, ib, mode, &tol)?.is_none() {
                        continue;
                    }
                    for u in &family {
                        let applies = mode == DominanceMode::Plain || u.is_convex();
                        if !applies {
                            continue;
                        }
                        let (va, vb) = (u.worst_case(ia)?.0, u.worst_case(ib)?.0);
                        let strict = u.monotonicity() == Monotonicity::StronglyIncreasing;
                        checks += 1;
                        let bad = if strict { va >= vb } else { va > vb + EXACT_TOL };
                        if bad {
                            violations.push(format!("{u} {mode:?}: {va} vs {vb}"));
                        }
                    }
                }
            }
        }
    }
    if violations.is_empty() {
        pass(format!("{checks} inequalities, zero violations"))
    } else {
        fail(format!("{} violations, first: {}", violations.len(), violations[0]))
    }
}

fn a6() -> Result<Outcome> {
    let inst = PhantomConfig::default().generate_scaled()?;
    let opts = SolveOptions::default();
    let mut radius = Vec::new();
    let mut one_norm = Vec::new();
    for p in [1.0, 2.0, 10.0] {
        let u = Scalarizer::weighted_pnorm(vec![1.0, 1.0], p, None)?;
        let best = minimize_scalarized(&inst, &u, &opts)?.best;
        let img = inst.image(&best)?;
        let max_of = |f: &dyn Fn(&[f64]) -> f64| img.points().iter().map(|y| f(y.values())).fold(0.0, f64::max);
        radius.push(max_of(&|y| y.iter().map(|v| v.abs()).fold(0.0, f64::max)));
        one_norm.push(max_of(&|y| y.iter().map(|v| v.abs()).sum()));
    }
    let (r1, r2, r10) = (radius[0], radius[1], radius[2]);
    let detail = format!(
        "r_1={r1:.6} r_2={r2:.6} r_10={r10:.6}; 1-norm worst case p=1 {:.6}, p=10 {:.6}",
        one_norm[0], one_norm[2]
    );
    if r10 <= r2 + RADIUS_TOL && r2 <= r1 + RADIUS_TOL && one_norm[0] < one_norm[2] {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn labels(ds: &[Decision]) -> BTreeSet<String> {
    ds.iter().map(Decision::label).collect()
}

fn set(v: Vec<&str>) -> BTreeSet<String> {
    v.into_iter().map(str::to_string).collect()
}

fn plain_equals_hull(inst: &Instance, tol: &Tolerances) -> Result<bool> {
    let r = classify(inst, tol)?;
    Ok(r.robust_set() == r.convex_hull_set())
}

fn a7() -> Result<Outcome> {
    let tol = Tolerances::default();
    let mut classified = 0;
    for inst in random_instances(SEED) {
        let report = classify(&inst, &tol)?;
        classified += 1;
        verify_report(&inst, &report, &tol)?;
        if labels(&set_valued_minimizers(&inst, &tol)?) != set(report.robust_set()) {
            return fail(format!("set-valued minimizers differ on {:?}", inst.name()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x7);
    for _ in 0..RANDOM_INSTANCES {
        let (inst, amb) = fixtures::random_convex_ambiguity(&mut rng);
        let reduced = to_robust(&inst, &amb, None)?;
        classified += 1;
        if !plain_equals_hull(&reduced, &tol)? || !che_equals_robust_check(&inst, &amb, &tol)? {
            return fail("convex ambiguity: robust and convex hull labels differ");
        }
    }
    for case in ['a', 'b', 'c'] {
        for _ in 0..50 {
            let inst = match case {
                'a' => {
                    let (s, x) = (rng.gen_range(1..=4), rng.gen_range(2..=6));
                    fixtures::random_table_with(&mut rng, 1, s, x, 9)
                }
                'b' => {
                    let (n, x) = (rng.gen_range(1..=3), rng.gen_range(2..=6));
                    fixtures::random_table_with(&mut rng, n, 1, x, 9)
                }
                _ => fixtures::random_segment_family(&mut rng),
            };
            classified += 1;
            if !plain_equals_hull(&inst, &tol)? {
                return fail(format!("case ({case}): plain and hull labels differ"));
            }
        }
    }
    pass(format!("{classified} instances classified with nesting checked"))
}

fn a8() -> Result<Outcome> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x8);
    let mut dominated = 0;
    for q in 0..HULL_QUERIES {
        let (y, anchors) = common::random_hull_query(&mut rng);
        let vs = anchors
            .iter()
            .map(|a| ObjectiveVector::new(a.clone()))
            .collect::<Result<Vec<_>>>()?;
        let lp = dominated_by_hull(&y, &vs, &tol)?.is_some();
        if lp != common::caratheodory_dominated(&y, &anchors, &tol) {
            return fail(format!("hull query {q}: y={y:?} anchors={anchors:?} lp={lp}"));
        }
        dominated += lp as usize;
    }
    let mut worst_gap: f64 = 0.0;
    for _ in 0..POLYHEDRA {
        let (a, b) = common::random_bounded_polyhedron(&mut rng);
        let f: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let w: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..2.0)).collect();
        let c: Vec<f64> = (0..2).map(|j| w[0] * f[0][j] + w[1] * f[1][j]).collect();
        let expect = common::vertex_max(&a, &b, &c);
        let inst = common::linear_in_s_instance(f, a, b);
        let got = dual_worst_case(&inst, &w, &inst.decisions()?[0])?;
        worst_gap = worst_gap.max((got - expect).abs());
    }
    let detail = format!("{HULL_QUERIES} hull queries ({dominated} dominated); dual max gap {worst_gap:.2e}");
    if worst_gap <= DUAL_TOL {
        pass(detail)
    } else {
        fail(detail)
    }
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("A1", Duration::from_secs(1), a1),
        ("A2", Duration::from_secs(1), a2),
        ("A3", Duration::from_secs(1), a3),
        ("A4", Duration::from_secs(5), a4),
        ("A5", Duration::from_secs(5), a5),
        ("A6", Duration::from_secs(30), a6),
        ("A7", Duration::from_secs(10), a7),
        ("A8", Duration::from_secs(10), a8),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(o) => (o.ok && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        println!("{name} {} [{timing}] {detail}", if ok { "PASS" } else { "FAIL" });
        failed += !ok as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
