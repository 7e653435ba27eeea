// Dense two-phase tableau simplex. Bland's rule throughout: lowest-index
// entering column with negative reduced cost, ratio ties broken by the lowest
// basic column index.

use super::{LpError, LpOutcome, LpProblem, OptimalSolution, Relation, VarBound};
use crate::scalar::{dot, Scalar};

const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    /// `rows x (cols + 1)`, last entry of each row is the right-hand side.
    cells: Vec<Vec<T>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Column that formed the identity for each row in the starting basis.
    initial_basis: Vec<usize>,
    pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn n_cols(&self) -> usize {
        self.kinds.len()
    }

    fn rhs(&self, i: usize) -> &T {
        &self.cells[i][self.n_cols()]
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        (0..self.n_cols())
            .map(|j| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(cost[j].clone(), |acc, (i, &b)| acc - cost[b].clone() * self.cells[i][j].clone())
            })
            .collect()
    }

    /// Simplex multipliers `c_Bᵀ B⁻¹`, one per row.
    fn multipliers(&self, cost: &[T]) -> Vec<T> {
        self.initial_basis
            .iter()
            .map(|&col| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, &b)| acc + cost[b].clone() * self.cells[i][col].clone())
            })
            .collect()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.n_cols() + 1;
        let p = self.cells[row][col].clone();
        for k in 0..width {
            self.cells[row][k] = self.cells[row][k].clone() / p.clone();
        }
        let pivot_row = self.cells[row].clone();
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for k in 0..width {
                r[k] = r[k].clone() - factor.clone() * pivot_row[k].clone();
            }
            r[col] = T::zero();
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn iterate(&mut self, cost: &[T], allowed: impl Fn(usize) -> bool) -> Result<Phase, LpError> {
        let eps = T::pivot_eps();
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
            let reduced = self.reduced_costs(cost);
            let entering = (0..self.n_cols())
                .find(|&j| allowed(j) && !self.basis.contains(&j) && reduced[j] < -eps.clone());
            let Some(col) = entering else {
                return Ok(Phase::Optimal);
            };
            let mut leaving: Option<(usize, T)> = None;
            for i in 0..self.cells.len() {
                let a = &self.cells[i][col];
                if *a <= eps {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &leaving {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(Phase::Unbounded),
            }
        }
    }
}

pub(super) fn run<T: Scalar>(problem: &LpProblem<T>, tol: &T) -> Result<LpOutcome<T>, LpError> {
    let m = problem.constraints.len();
    let eps = T::pivot_eps();

    // structural columns: free variables are split into a +/- pair
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::new();
    let mut kinds = Vec::new();
    for bound in &problem.bounds {
        let pos = kinds.len();
        kinds.push(ColumnKind::Structural);
        let neg = match bound {
            VarBound::NonNegative => None,
            VarBound::Free => {
                kinds.push(ColumnKind::Structural);
                Some(pos + 1)
            }
        };
        var_cols.push((pos, neg));
    }

    // rows with negative rhs are negated so the starting basis is feasible
    let signs: Vec<bool> = problem.constraints.iter().map(|r| r.rhs.is_negative()).collect();
    let relations: Vec<Relation> = problem
        .constraints
        .iter()
        .zip(&signs)
        .map(|(r, &neg)| match (r.relation, neg) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (rel, _) => rel,
        })
        .collect();

    let mut slack_col = vec![None; m];
    let mut initial_basis = vec![0; m];
    for (i, rel) in relations.iter().enumerate() {
        match rel {
            Relation::Le => {
                slack_col[i] = Some((kinds.len(), T::one()));
                initial_basis[i] = kinds.len();
                kinds.push(ColumnKind::Slack);
            }
            Relation::Ge => {
                slack_col[i] = Some((kinds.len(), -T::one()));
                kinds.push(ColumnKind::Slack);
            }
            Relation::Eq => {}
        }
    }
    for (i, rel) in relations.iter().enumerate() {
        if *rel != Relation::Le {
            initial_basis[i] = kinds.len();
            kinds.push(ColumnKind::Artificial);
        }
    }
    let n_cols = kinds.len();

    let mut cells = vec![vec![T::zero(); n_cols + 1]; m];
    for (i, row) in problem.constraints.iter().enumerate() {
        let flip = |v: &T| if signs[i] { -v.clone() } else { v.clone() };
        for (k, &(pos, neg)) in var_cols.iter().enumerate() {
            cells[i][pos] = flip(&row.coeffs[k]);
            if let Some(neg) = neg {
                cells[i][neg] = -flip(&row.coeffs[k]);
            }
        }
        if let Some((col, sign)) = &slack_col[i] {
            cells[i][*col] = sign.clone();
        }
        cells[i][initial_basis[i]] = T::one();
        cells[i][n_cols] = flip(&row.rhs);
    }

    let mut tableau = Tableau {
        cells,
        basis: initial_basis.clone(),
        kinds,
        initial_basis,
        pivots: 0,
    };

    // phase one: minimize the sum of artificials
    let has_artificial = tableau.kinds.contains(&ColumnKind::Artificial);
    if has_artificial {
        let phase_one_cost: Vec<T> = tableau
            .kinds
            .iter()
            .map(|k| if *k == ColumnKind::Artificial { T::one() } else { T::zero() })
            .collect();
        match tableau.iterate(&phase_one_cost, |_| true)? {
            Phase::Optimal => {}
            Phase::Unbounded => {
                return Err(LpError::Numerical("phase one reported unbounded".into()));
            }
        }
        let infeasibility = tableau
            .basis
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &b)| acc + phase_one_cost[b].clone() * tableau.rhs(i).clone());
        if infeasibility > *tol {
            let y = tableau.multipliers(&phase_one_cost);
            let farkas = y
                .into_iter()
                .zip(&signs)
                .map(|(v, &neg)| if neg { -v } else { v })
                .collect();
            return Ok(LpOutcome::Infeasible { farkas });
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if tableau.kinds[tableau.basis[i]] != ColumnKind::Artificial {
                continue;
            }
            let replacement = (0..n_cols).find(|&j| {
                tableau.kinds[j] != ColumnKind::Artificial
                    && !tableau.basis.contains(&j)
                    && tableau.cells[i][j].abs() > eps
            });
            if let Some(j) = replacement {
                tableau.pivot(i, j);
            }
        }
        // clear round-off on right-hand sides
        for row in tableau.cells.iter_mut() {
            if row[n_cols].is_negative() && -row[n_cols].clone() <= *tol {
                row[n_cols] = T::zero();
            }
        }
    }

    // phase two
    let mut cost = vec![T::zero(); n_cols];
    for (k, &(pos, neg)) in var_cols.iter().enumerate() {
        cost[pos] = problem.objective[k].clone();
        if let Some(neg) = neg {
            cost[neg] = -problem.objective[k].clone();
        }
    }
    let kinds = tableau.kinds.clone();
    match tableau.iterate(&cost, |j| kinds[j] != ColumnKind::Artificial)? {
        Phase::Unbounded => return Ok(LpOutcome::Unbounded),
        Phase::Optimal => {}
    }

    let mut column_values = vec![T::zero(); n_cols];
    for (i, &b) in tableau.basis.iter().enumerate() {
        column_values[b] = tableau.rhs(i).clone();
    }
    let primal: Vec<T> = var_cols
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => column_values[pos].clone() - column_values[neg].clone(),
            None => column_values[pos].clone(),
        })
        .collect();
    let dual: Vec<T> = tableau
        .multipliers(&cost)
        .into_iter()
        .zip(&signs)
        .map(|(v, &neg)| if neg { -v } else { v })
        .collect();
    let objective = dot(&problem.objective, &primal);
    let primal_residual = problem.primal_residual(&primal);
    let complementarity_residual = problem.complementarity_residual(&primal, &dual);
    Ok(LpOutcome::Optimal(OptimalSolution {
        primal,
        dual,
        objective,
        primal_residual,
        complementarity_residual,
    }))
}
