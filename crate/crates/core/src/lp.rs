//! Exact dense-tableau simplex over the rationals.
//!
//! Problems are in equality form `A x = b, x >= 0`. Phase one minimizes the
//! sum of artificial variables; its optimal dual doubles as the Farkas
//! certificate when the system is infeasible. Bland's rule is used in both
//! phases, so the method terminates on every input.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{qi, Q};

/// `A x = b, x >= 0`, with objective `c` (all-zero for pure feasibility).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardLp {
    a: Vec<Vec<Q>>,
    b: Vec<Q>,
    c: Vec<Q>,
}

impl StandardLp {
    pub fn new(a: Vec<Vec<Q>>, b: Vec<Q>, c: Vec<Q>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::dims(format!(
                "{} constraint rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != c.len()) {
            return Err(Error::dims(format!(
                "constraint row {i} has {} columns, objective has {}",
                row.len(),
                c.len()
            )));
        }
        Ok(StandardLp { a, b, c })
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(a: Vec<Vec<Q>>, b: Vec<Q>) -> Result<Self> {
        let cols = a.first().map_or(0, Vec::len);
        StandardLp::new(a, b, vec![Q::zero(); cols])
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    pub fn constraint_matrix(&self) -> &[Vec<Q>] {
        &self.a
    }

    pub fn rhs(&self) -> &[Q] {
        &self.b
    }

    pub fn objective(&self) -> &[Q] {
        &self.c
    }

    /// True when `x >= 0` and `A x = b` hold exactly.
    pub fn is_feasible_point(&self, x: &[Q]) -> bool {
        x.len() == self.cols()
            && x.iter().all(|v| !v.is_negative())
            && self
                .a
                .iter()
                .zip(&self.b)
                .all(|(row, bi)| dot(row, x) == *bi)
    }

    /// True when `yᵀA <= 0` component-wise and `yᵀb > 0`.
    pub fn is_farkas_certificate(&self, y: &[Q]) -> bool {
        if y.len() != self.rows() {
            return false;
        }
        let yb = dot(y, &self.b);
        if !yb.is_positive() {
            return false;
        }
        (0..self.cols()).all(|j| {
            let s = self
                .a
                .iter()
                .zip(y)
                .fold(Q::zero(), |acc, (row, yi)| acc + yi * &row[j]);
            !s.is_positive()
        })
    }

    pub fn objective_value(&self, x: &[Q]) -> Q {
        dot(&self.c, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// `primal` satisfies `A x = b, x >= 0`.
    Feasible { primal: Vec<Q> },
    /// `farkas` satisfies `yᵀA <= 0` and `yᵀb > 0`.
    Infeasible { farkas: Vec<Q> },
    /// An optimal vertex and its objective value.
    Optimal { primal: Vec<Q>, value: Q },
}

impl LpOutcome {
    pub fn primal(&self) -> Option<&[Q]> {
        match self {
            LpOutcome::Feasible { primal } | LpOutcome::Optimal { primal, .. } => Some(primal),
            LpOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Pivot budget across both phases; exceeding it is a resource error.
    pub max_pivots: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_pivots: 200_000 }
    }
}

/// Decides feasibility, returning a verified primal point or Farkas dual.
pub fn solve_feasibility(lp: &StandardLp, opts: &SolverOptions) -> Result<LpOutcome> {
    let mut budget = opts.max_pivots;
    let outcome = match phase_one(lp, &mut budget)? {
        PhaseOne::Infeasible(y) => {
            if !lp.is_farkas_certificate(&y) {
                return Err(Error::Internal("phase one produced an invalid Farkas dual".into()));
            }
            LpOutcome::Infeasible { farkas: y }
        }
        PhaseOne::Feasible(t) => {
            let x = t.primal(lp.cols());
            if !lp.is_feasible_point(&x) {
                return Err(Error::Internal("phase one produced an infeasible point".into()));
            }
            LpOutcome::Feasible { primal: x }
        }
    };
    Ok(outcome)
}

/// Maximizes `cᵀx`. Errors with [`Error::Infeasible`] or [`Error::Unbounded`].
pub fn maximize(lp: &StandardLp, opts: &SolverOptions) -> Result<LpOutcome> {
    let mut budget = opts.max_pivots;
    let mut t = match phase_one(lp, &mut budget)? {
        PhaseOne::Infeasible(_) => return Err(Error::Infeasible),
        PhaseOne::Feasible(t) => t,
    };
    let n = lp.cols();
    let mut cost: Vec<Q> = lp.c.iter().map(|v| -v).collect();
    cost.resize(t.width().max(n), Q::zero());
    match t.optimize(&cost, n, &mut budget)? {
        Status::Unbounded => Err(Error::Unbounded),
        Status::Optimal => {
            let x = t.primal(n);
            if !lp.is_feasible_point(&x) {
                return Err(Error::Internal("phase two left the feasible region".into()));
            }
            let value = lp.objective_value(&x);
            Ok(LpOutcome::Optimal { primal: x, value })
        }
    }
}

/// Finds convex weights `λ >= 0, Σλ = 1` with `Σ λ_j g_j = point`, if any.
pub fn convex_combination(
    point: &[Q],
    generators: &[Vec<Q>],
    opts: &SolverOptions,
) -> Result<Option<Vec<Q>>> {
    if generators.is_empty() {
        return Ok(None);
    }
    let dim = point.len();
    if let Some(g) = generators.iter().find(|g| g.len() != dim) {
        return Err(Error::dims(format!(
            "generator of length {} against point of length {dim}",
            g.len()
        )));
    }
    let mut a: Vec<Vec<Q>> = (0..dim)
        .map(|i| generators.iter().map(|g| g[i].clone()).collect())
        .collect();
    a.push(vec![qi(1); generators.len()]);
    let mut b = point.to_vec();
    b.push(qi(1));
    let lp = StandardLp::feasibility(a, b)?;
    Ok(match solve_feasibility(&lp, opts)? {
        LpOutcome::Feasible { primal } => Some(primal),
        _ => None,
    })
}

pub(crate) fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

enum PhaseOne {
    Feasible(Tableau),
    Infeasible(Vec<Q>),
}

enum Status {
    Optimal,
    Unbounded,
}

/// Rows are `[coefficients | rhs]`; `basis[i]` is the basic column of row `i`.
struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() - 1)
    }

    fn rhs(&self, i: usize) -> &Q {
        self.rows[i].last().expect("tableau row has a rhs")
    }

    fn primal(&self, n: usize) -> Vec<Q> {
        let mut x = vec![Q::zero(); n];
        for (i, &col) in self.basis.iter().enumerate() {
            if col < n {
                x[col] = self.rhs(i).clone();
            }
        }
        x
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `< allowed` with Bland's rule.
    fn optimize(&mut self, cost: &[Q], allowed: usize, budget: &mut usize) -> Result<Status> {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .fold(cost[j].clone(), |acc, (row, &b)| {
                        if cost[b].is_zero() || row[j].is_zero() {
                            acc
                        } else {
                            acc - &cost[b] * &row[j]
                        }
                    });
                reduced.is_negative()
            });
            let Some(j) = entering else {
                return Ok(Status::Optimal);
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &row[j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Status::Unbounded);
            };
            if *budget == 0 {
                return Err(Error::ResourceLimit {
                    what: "simplex pivots",
                    needed: "more".into(),
                    cap: 0,
                });
            }
            *budget -= 1;
            self.pivot(r, j);
        }
    }
}

fn phase_one(lp: &StandardLp, budget: &mut usize) -> Result<PhaseOne> {
    let (m, n) = (lp.rows(), lp.cols());
    let start = *budget;
    let signs: Vec<Q> = lp
        .b
        .iter()
        .map(|bi| if bi.is_negative() { qi(-1) } else { qi(1) })
        .collect();
    let mut rows = Vec::with_capacity(m);
    for (i, ((a, b), sign)) in lp.a.iter().zip(&lp.b).zip(&signs).enumerate() {
        let mut row: Vec<Q> = a.iter().map(|v| v * sign).collect();
        row.extend((0..m).map(|k| if k == i { qi(1) } else { Q::zero() }));
        row.push(b * sign);
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
    };
    let mut cost = vec![Q::zero(); n + m];
    for c in cost.iter_mut().skip(n) {
        *c = qi(1);
    }
    let res = t.optimize(&cost, n + m, budget);
    let res = res.map_err(|e| match e {
        Error::ResourceLimit { what, .. } => Error::ResourceLimit {
            what,
            needed: format!("more than {start}"),
            cap: start as u64,
        },
        other => other,
    })?;
    debug_assert!(matches!(res, Status::Optimal), "phase one is bounded below");

    let value = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n)
        .fold(Q::zero(), |acc, (i, _)| acc + t.rhs(i));
    if value.is_positive() {
        // Dual z = c_Bᵀ B⁻¹, and B⁻¹ sits in the artificial block.
        let y = (0..m)
            .map(|k| {
                let z = t
                    .rows
                    .iter()
                    .zip(&t.basis)
                    .filter(|(_, &b)| b >= n)
                    .fold(Q::zero(), |acc, (row, _)| acc + &row[n + k]);
                z * &signs[k]
            })
            .collect();
        return Ok(PhaseOne::Infeasible(y));
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    Ok(PhaseOne::Feasible(t))
}
