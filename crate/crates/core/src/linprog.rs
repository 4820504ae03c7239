//! Dense two-phase primal simplex.
//!
//! Problems are stated as `minimize c·v` subject to `a_i·v <= b_i`,
//! `e_j·v = d_j` and per-variable lower bounds (zero by default, or free).
//! Pivoting follows Bland's rule throughout, so the method terminates in
//! exact arithmetic; a pivot budget guards against numerical stalling.
//!
//! The kernel is sized for the problems this crate produces: hull membership
//! over a handful of anchors, epigraph programs over a small simplex and
//! scenario-set duals. Everything lives in one dense tableau.

use thiserror::Error;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint row {row} has {got} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("simplex stalled after {0} pivots")]
    Stalled(usize),
}

/// Lower bound of one decision variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Lower(f64),
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Rows `(a, b)` meaning `a·v <= b`.
    pub inequalities: Vec<(Vec<f64>, f64)>,
    /// Rows `(e, d)` meaning `e·v = d`.
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub bounds: Vec<Bound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal { .. } => LpStatus::Optimal,
            LpResult::Infeasible => LpStatus::Infeasible,
            LpResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpResult::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LpResult::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

impl LpProblem {
    /// Starts a problem `minimize c·v` with all variables nonnegative.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            inequalities: Vec::new(),
            equalities: Vec::new(),
            bounds: vec![Bound::Lower(0.0); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_row(&self, row: &[f64], index: usize) -> Result<(), LpError> {
        if row.len() != self.num_vars() {
            return Err(LpError::DimensionMismatch {
                row: index,
                expected: self.num_vars(),
                got: row.len(),
            });
        }
        Ok(())
    }

    /// Adds `row·v <= rhs`.
    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> Result<&mut Self, LpError> {
        self.check_row(&row, self.inequalities.len() + self.equalities.len())?;
        self.inequalities.push((row, rhs));
        Ok(self)
    }

    /// Adds `row·v >= rhs`.
    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) -> Result<&mut Self, LpError> {
        self.add_le(row.into_iter().map(|a| -a).collect(), -rhs)
    }

    /// Adds `row·v = rhs`.
    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> Result<&mut Self, LpError> {
        self.check_row(&row, self.inequalities.len() + self.equalities.len())?;
        self.equalities.push((row, rhs));
        Ok(self)
    }

    pub fn set_bound(&mut self, var: usize, bound: Bound) -> &mut Self {
        self.bounds[var] = bound;
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.bounds.len() != self.num_vars() {
            return Err(LpError::DimensionMismatch {
                row: usize::MAX,
                expected: self.num_vars(),
                got: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (i, (row, rhs)) in self.inequalities.iter().chain(&self.equalities).enumerate() {
            self.check_row(row, i)?;
            if !rhs.is_finite() || row.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite("constraint"));
            }
        }
        if self
            .bounds
            .iter()
            .any(|b| matches!(b, Bound::Lower(l) if !l.is_finite()))
        {
            return Err(LpError::NonFinite("bounds"));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `v`.
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.inequalities {
            worst = worst.max(dot(row, v) - rhs);
        }
        for (row, rhs) in &self.equalities {
            worst = worst.max((dot(row, v) - rhs).abs());
        }
        for (b, x) in self.bounds.iter().zip(v) {
            if let Bound::Lower(l) = b {
                worst = worst.max(l - x);
            }
        }
        worst
    }

    pub fn objective_value(&self, v: &[f64]) -> f64 {
        dot(&self.objective, v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Clone, Copy)]
enum ColumnMap {
    Shifted { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    /// Negated objective value of the current basis.
    cost_rhs: f64,
    pivots: usize,
    max_pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for a in self.rows[r].iter_mut() {
            *a /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f == 0.0 {
                continue;
            }
            for (a, pa) in self.rows[i].iter_mut().zip(&pivot_row) {
                *a -= f * pa;
                if a.abs() < DROP_TOL {
                    *a = 0.0;
                }
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (a, pa) in self.cost.iter_mut().zip(&pivot_row) {
                *a -= f * pa;
            }
            self.cost[c] = 0.0;
            self.cost_rhs -= f * pivot_rhs;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule over columns `< active`.
    fn run(&mut self, active: usize) -> Result<Phase, LpError> {
        loop {
            let entering = (0..active).find(|&j| self.cost[j] < -OPT_TOL);
            let Some(c) = entering else {
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12
                            || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            if self.pivots >= self.max_pivots {
                return Err(LpError::Stalled(self.pivots));
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `p` with the two-phase simplex method.
pub fn lp_solve(p: &LpProblem) -> Result<LpResult, LpError> {
    p.validate()?;

    // Column layout: structural columns, then slacks, then artificials.
    let mut maps = Vec::with_capacity(p.num_vars());
    let mut ncols = 0;
    for b in &p.bounds {
        match *b {
            Bound::Lower(l) => {
                maps.push(ColumnMap::Shifted { col: ncols, offset: l });
                ncols += 1;
            }
            Bound::Free => {
                maps.push(ColumnMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let n_struct = ncols;
    let n_slack = p.inequalities.len();
    let m = p.inequalities.len() + p.equalities.len();

    let expand = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; n_struct];
        let mut shift = 0.0;
        for (a, map) in row.iter().zip(&maps) {
            match *map {
                ColumnMap::Shifted { col, offset } => {
                    out[col] = *a;
                    shift += a * offset;
                }
                ColumnMap::Split { pos, neg } => {
                    out[pos] = *a;
                    out[neg] = -a;
                }
            }
        }
        (out, rhs - shift)
    };

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut needs_artificial = Vec::new();
    for (i, (row, b)) in p.inequalities.iter().enumerate() {
        let (mut r, mut b) = expand(row, *b);
        r.resize(n_struct + n_slack, 0.0);
        r[n_struct + i] = 1.0;
        if b < 0.0 {
            r.iter_mut().for_each(|a| *a = -*a);
            b = -b;
            needs_artificial.push(i);
        } else {
            basis[i] = n_struct + i;
        }
        rows.push(r);
        rhs.push(b);
    }
    for (j, (row, d)) in p.equalities.iter().enumerate() {
        let i = n_slack + j;
        let (mut r, mut b) = expand(row, *d);
        r.resize(n_struct + n_slack, 0.0);
        if b < 0.0 {
            r.iter_mut().for_each(|a| *a = -*a);
            b = -b;
        }
        needs_artificial.push(i);
        rows.push(r);
        rhs.push(b);
    }
    let n_real = n_struct + n_slack;
    let n_art = needs_artificial.len();
    let total = n_real + n_art;
    for r in rows.iter_mut() {
        r.resize(total, 0.0);
    }
    for (k, &i) in needs_artificial.iter().enumerate() {
        rows[i][n_real + k] = 1.0;
        basis[i] = n_real + k;
    }

    let scale = rhs.iter().fold(1.0_f64, |acc, b| acc.max(b.abs()));
    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        cost: vec![0.0; total],
        cost_rhs: 0.0,
        pivots: 0,
        max_pivots: 50 * (total + m + 10),
    };

    if n_art > 0 {
        // Phase one: minimize the sum of artificials.
        for j in n_real..total {
            tab.cost[j] = 1.0;
        }
        for &i in &needs_artificial {
            for j in 0..total {
                tab.cost[j] -= tab.rows[i][j];
            }
            tab.cost_rhs -= tab.rhs[i];
        }
        tab.run(total)?;
        if -tab.cost_rhs > FEAS_TOL * scale {
            return Ok(LpResult::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n_real {
                let col = (0..n_real)
                    .filter(|&j| tab.rows[i][j].abs() > PIVOT_TOL)
                    .max_by(|&a, &b| tab.rows[i][a].abs().total_cmp(&tab.rows[i][b].abs()));
                match col {
                    Some(c) => tab.pivot(i, c),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase two over real columns only.
    let mut cost = vec![0.0; total];
    for (c, map) in p.objective.iter().zip(&maps) {
        match *map {
            ColumnMap::Shifted { col, .. } => cost[col] = *c,
            ColumnMap::Split { pos, neg } => {
                cost[pos] = *c;
                cost[neg] = -c;
            }
        }
    }
    let mut cost_rhs = 0.0;
    for (i, &b) in tab.basis.iter().enumerate() {
        let cb = cost[b];
        if cb != 0.0 {
            for (c, a) in cost.iter_mut().zip(&tab.rows[i]).take(total) {
                *c -= cb * a;
            }
            cost_rhs -= cb * tab.rhs[i];
        }
    }
    for i in 0..tab.basis.len() {
        cost[tab.basis[i]] = 0.0;
    }
    tab.cost = cost;
    tab.cost_rhs = cost_rhs;
    if let Phase::Unbounded = tab.run(n_real)? {
        return Ok(LpResult::Unbounded);
    }

    let mut columns = vec![0.0; n_real];
    for (i, &b) in tab.basis.iter().enumerate() {
        columns[b] = tab.rhs[i].max(0.0);
    }
    let solution: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Shifted { col, offset } => offset + columns[col],
            ColumnMap::Split { pos, neg } => columns[pos] - columns[neg],
        })
        .collect();
    let value = p.objective_value(&solution);
    Ok(LpResult::Optimal { value, solution })
}
