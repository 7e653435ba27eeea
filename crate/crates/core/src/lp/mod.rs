//! Dense linear programming with optimality and infeasibility certificates.
//!
//! Problems are stated as `min cᵀz` subject to rows `aᵢᵀz (<=|=|>=) bᵢ`, with
//! each variable either nonnegative or free. Dual sign convention for the
//! returned multipliers `y`: `yᵢ <= 0` on `<=` rows, `yᵢ >= 0` on `>=` rows,
//! free on `=` rows, so that `c - Aᵀy` is the reduced-cost vector.

mod game;
mod simplex;

pub use game::{minimax, pure_value, MinimaxReport};

use thiserror::Error;

use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("iteration limit of {0} pivots exceeded")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// `min cᵀz` over a finite list of linear rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    objective: Vec<T>,
    bounds: Vec<VarBound>,
    constraints: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(objective: Vec<T>, bounds: Vec<VarBound>) -> Result<Self, LpError> {
        if objective.len() != bounds.len() {
            return Err(LpError::Dimension(format!(
                "{} objective coefficients but {} bounds",
                objective.len(),
                bounds.len()
            )));
        }
        if objective.iter().any(|c| !c.is_finite_value()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        Ok(LpProblem {
            objective,
            bounds,
            constraints: Vec::new(),
        })
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<T>) -> Result<Self, LpError> {
        let n = objective.len();
        Self::new(objective, vec![VarBound::NonNegative; n])
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Result<(), LpError> {
        if coeffs.len() != self.objective.len() {
            return Err(LpError::Dimension(format!(
                "row {} has {} coefficients, expected {}",
                self.constraints.len(),
                coeffs.len(),
                self.objective.len()
            )));
        }
        if !rhs.is_finite_value() || coeffs.iter().any(|c| !c.is_finite_value()) {
            return Err(LpError::NonFinite(format!("row {}", self.constraints.len())));
        }
        self.constraints.push(LinearConstraint { coeffs, relation, rhs });
        Ok(())
    }

    pub fn with_constraint(mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Result<Self, LpError> {
        self.add_constraint(coeffs, relation, rhs)?;
        Ok(self)
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn bounds(&self) -> &[VarBound] {
        &self.bounds
    }

    pub fn constraints(&self) -> &[LinearConstraint<T>] {
        &self.constraints
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest violation of the rows and bounds at `z` (zero when feasible).
    pub fn primal_residual(&self, z: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.constraints {
            let lhs = dot(&row.coeffs, z);
            let viol = match row.relation {
                Relation::Le => lhs - row.rhs.clone(),
                Relation::Ge => row.rhs.clone() - lhs,
                Relation::Eq => (lhs - row.rhs.clone()).abs(),
            };
            if viol > worst {
                worst = viol;
            }
        }
        for (v, b) in z.iter().zip(&self.bounds) {
            if *b == VarBound::NonNegative && v.is_negative() {
                let viol = -v.clone();
                if viol > worst {
                    worst = viol;
                }
            }
        }
        worst
    }

    /// `Σ |yᵢ (aᵢᵀz - bᵢ)| + Σ |(c - Aᵀy)ₖ zₖ|`.
    pub fn complementarity_residual(&self, z: &[T], y: &[T]) -> T {
        let mut total = T::zero();
        for (row, yi) in self.constraints.iter().zip(y) {
            total = total + (yi.clone() * (dot(&row.coeffs, z) - row.rhs.clone())).abs();
        }
        for (k, zk) in z.iter().enumerate() {
            total = total + (self.reduced_cost(y, k) * zk.clone()).abs();
        }
        total
    }

    fn reduced_cost(&self, y: &[T], k: usize) -> T {
        self.constraints
            .iter()
            .zip(y)
            .fold(self.objective[k].clone(), |acc, (row, yi)| acc - yi.clone() * row.coeffs[k].clone())
    }

    /// `yᵀA` over the original rows.
    pub fn dual_combination(&self, y: &[T]) -> Vec<T> {
        (0..self.n_vars())
            .map(|k| {
                self.constraints
                    .iter()
                    .zip(y)
                    .fold(T::zero(), |acc, (row, yi)| acc + yi.clone() * row.coeffs[k].clone())
            })
            .collect()
    }
}

/// Primal/dual pair at an optimal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution<T> {
    pub primal: Vec<T>,
    pub dual: Vec<T>,
    /// `cᵀz` recomputed from the primal vector.
    pub objective: T,
    pub primal_residual: T,
    pub complementarity_residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(OptimalSolution<T>),
    /// Carries a Farkas vector accepted by [`verify_farkas`].
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }
}

/// Two-phase primal simplex with Bland's rule.
///
/// `tol` decides phase-one infeasibility (artificial sum above `tol`) and is
/// the acceptance bound for the returned residuals.
pub fn solve<T: Scalar>(problem: &LpProblem<T>, tol: &T) -> Result<LpOutcome<T>, LpError> {
    let outcome = simplex::run(problem, tol)?;
    match &outcome {
        LpOutcome::Optimal(sol) => {
            if sol.primal_residual > *tol {
                return Err(LpError::Numerical(format!(
                    "primal residual {} exceeds tolerance",
                    sol.primal_residual.render()
                )));
            }
        }
        LpOutcome::Infeasible { farkas } => {
            if !verify_farkas(problem, farkas, tol)? {
                return Err(LpError::Numerical("Farkas vector failed verification".into()));
            }
        }
        LpOutcome::Unbounded => {}
    }
    Ok(outcome)
}

/// Checks that `y` proves `problem` infeasible: sign conditions on `y` per row
/// relation, `(yᵀA)ₖ <= tol` on nonnegative variables, `|(yᵀA)ₖ| <= tol` on free
/// variables, and `yᵀb > tol`. Pass a zero `tol` for an exact check.
pub fn verify_farkas<T: Scalar>(problem: &LpProblem<T>, y: &[T], tol: &T) -> Result<bool, LpError> {
    if y.len() != problem.constraints.len() {
        return Err(LpError::Dimension(format!(
            "Farkas vector has {} entries for {} rows",
            y.len(),
            problem.constraints.len()
        )));
    }
    for (row, yi) in problem.constraints.iter().zip(y) {
        let ok = match row.relation {
            Relation::Le => *yi <= tol.clone(),
            Relation::Ge => *yi >= -tol.clone(),
            Relation::Eq => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    let combo = problem.dual_combination(y);
    for (ck, bound) in combo.iter().zip(&problem.bounds) {
        let ok = match bound {
            VarBound::NonNegative => *ck <= *tol,
            VarBound::Free => ck.abs() <= *tol,
        };
        if !ok {
            return Ok(false);
        }
    }
    let yb = problem
        .constraints
        .iter()
        .zip(y)
        .fold(T::zero(), |acc, (row, yi)| acc + yi.clone() * row.rhs.clone());
    Ok(yb > *tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::{One, Zero};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn optimal_single_variable() {
        let p = LpProblem::nonnegative(vec![1.0])
            .unwrap()
            .with_constraint(vec![1.0], Relation::Ge, 1.0)
            .unwrap();
        match solve(&p, &1e-9).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.primal[0] - 1.0).abs() < 1e-12);
                assert!((sol.objective - 1.0).abs() < 1e-12);
                assert!((sol.dual[0] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_with_farkas() {
        let p = LpProblem::nonnegative(vec![r(0)])
            .unwrap()
            .with_constraint(vec![r(1)], Relation::Le, r(-1))
            .unwrap();
        let out = solve(&p, &Rational::zero()).unwrap();
        let LpOutcome::Infeasible { farkas } = out else {
            panic!("{out:?}")
        };
        assert!(verify_farkas(&p, &farkas, &Rational::zero()).unwrap());
        assert!(!verify_farkas(&p, &[r(0)], &Rational::zero()).unwrap());
        // positive multiplier on a <= row has the wrong sign
        assert!(!verify_farkas(&p, &[r(1)], &Rational::zero()).unwrap());
        assert!(verify_farkas(&p, &[r(1), r(2)], &Rational::zero()).is_err());
    }

    #[test]
    fn unbounded() {
        let p = LpProblem::nonnegative(vec![-1.0]).unwrap();
        assert_eq!(solve(&p, &1e-9).unwrap().status(), LpStatus::Unbounded);
        let p = LpProblem::nonnegative(vec![-1.0])
            .unwrap()
            .with_constraint(vec![1.0], Relation::Ge, 0.0)
            .unwrap();
        assert_eq!(solve(&p, &1e-9).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + 2y  s.t. x + y = 1, x - y >= -3, x free, y >= 0
        let p = LpProblem::new(vec![r(1), r(2)], vec![VarBound::Free, VarBound::NonNegative])
            .unwrap()
            .with_constraint(vec![r(1), r(1)], Relation::Eq, r(1))
            .unwrap()
            .with_constraint(vec![r(1), r(-1)], Relation::Ge, r(-3))
            .unwrap();
        let LpOutcome::Optimal(sol) = solve(&p, &Rational::zero()).unwrap() else {
            panic!()
        };
        // y = 1 - x >= 0 caps x at 1 and the objective is 2 - x
        assert_eq!(sol.primal, vec![r(1), r(0)]);
        assert_eq!(sol.objective, r(1));
        assert!(sol.complementarity_residual.is_zero());
        let dual_obj = sol.dual[0].clone() * r(1) + sol.dual[1].clone() * r(-3);
        assert_eq!(dual_obj, sol.objective);
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem::nonnegative(vec![r(1), r(1)])
            .unwrap()
            .with_constraint(vec![r(1), r(1)], Relation::Eq, r(2))
            .unwrap()
            .with_constraint(vec![r(2), r(2)], Relation::Eq, r(4))
            .unwrap();
        let LpOutcome::Optimal(sol) = solve(&p, &Rational::zero()).unwrap() else {
            panic!()
        };
        assert_eq!(sol.objective, r(2));
        assert!(sol.primal_residual.is_zero());
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -z <= -2 is z >= 2
        let p = LpProblem::nonnegative(vec![Rational::one()])
            .unwrap()
            .with_constraint(vec![r(-1)], Relation::Le, r(-2))
            .unwrap();
        let LpOutcome::Optimal(sol) = solve(&p, &Rational::zero()).unwrap() else {
            panic!()
        };
        assert_eq!(sol.primal, vec![r(2)]);
        assert_eq!(sol.dual, vec![r(-1)]);
    }

    #[test]
    fn dimension_errors() {
        assert!(LpProblem::new(vec![1.0], vec![]).is_err());
        let mut p = LpProblem::nonnegative(vec![1.0]).unwrap();
        assert!(p.add_constraint(vec![1.0, 2.0], Relation::Le, 0.0).is_err());
        assert!(p.add_constraint(vec![f64::NAN], Relation::Le, 0.0).is_err());
    }

    fn random_problem(seed: u64) -> LpProblem<Rational> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..5);
        let m = rng.gen_range(1..5);
        let obj = (0..d).map(|_| r(rng.gen_range(-3..4))).collect();
        let bounds = (0..d)
            .map(|_| if rng.gen_bool(0.2) { VarBound::Free } else { VarBound::NonNegative })
            .collect();
        let mut p = LpProblem::new(obj, bounds).unwrap();
        for _ in 0..m {
            let rel = [Relation::Le, Relation::Eq, Relation::Ge][rng.gen_range(0..3)];
            let coeffs = (0..d).map(|_| r(rng.gen_range(-3..4))).collect();
            p.add_constraint(coeffs, rel, r(rng.gen_range(-4..5))).unwrap();
        }
        p
    }

    #[test]
    fn random_problems_produce_matching_certificates() {
        let zero = Rational::zero();
        for seed in 0..300 {
            let p = random_problem(seed);
            match solve(&p, &zero).unwrap() {
                LpOutcome::Optimal(sol) => {
                    assert!(sol.primal_residual.is_zero(), "seed {seed}");
                    assert!(sol.complementarity_residual.is_zero(), "seed {seed}");
                    let dual_obj = p
                        .constraints()
                        .iter()
                        .zip(&sol.dual)
                        .fold(Rational::zero(), |a, (row, y)| a + y * &row.rhs);
                    assert_eq!(dual_obj, sol.objective, "seed {seed}");
                    for (row, y) in p.constraints().iter().zip(&sol.dual) {
                        match row.relation {
                            Relation::Le => assert!(*y <= zero),
                            Relation::Ge => assert!(*y >= zero),
                            Relation::Eq => {}
                        }
                    }
                }
                LpOutcome::Infeasible { farkas } => {
                    assert!(verify_farkas(&p, &farkas, &zero).unwrap(), "seed {seed}");
                }
                LpOutcome::Unbounded => {}
            }
            // float mode agrees on the status
            let pf = to_float(&p);
            let sf = solve(&pf, &1e-9).unwrap();
            let se = solve(&p, &zero).unwrap();
            assert_eq!(sf.status(), se.status(), "seed {seed}");
            if let (LpOutcome::Optimal(a), LpOutcome::Optimal(b)) = (&sf, &se) {
                assert!((a.objective - b.objective.to_f64()).abs() < 1e-9);
            }
            if let LpOutcome::Infeasible { farkas } = &sf {
                assert!(verify_farkas(&pf, farkas, &1e-9).unwrap());
            }
        }
    }

    fn to_float(p: &LpProblem<Rational>) -> LpProblem<f64> {
        let mut out = LpProblem::new(p.objective().iter().map(Scalar::to_f64).collect(), p.bounds().to_vec()).unwrap();
        for row in p.constraints() {
            out.add_constraint(
                row.coeffs.iter().map(Scalar::to_f64).collect(),
                row.relation,
                row.rhs.to_f64(),
            )
            .unwrap();
        }
        out
    }
}
