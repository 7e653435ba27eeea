use super::{solve, LpError, LpOutcome, LpProblem, Relation, VarBound};
use crate::instance::{Matrix, SimplexVector};
use crate::scalar::{argmin, Scalar};

/// Pure and mixed values of the matrix game where the column player minimizes
/// `max_λ (A μ)_λ`, with both optimal strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxReport<T> {
    /// `min_j max_λ A[λ][j]`.
    pub v_pure: T,
    /// Lowest-index column attaining `v_pure`.
    pub v_pure_column: usize,
    /// `min_{μ ∈ Δ_n} max_λ (A μ)_λ`.
    pub v_mixed: T,
    /// Optimal mixture over columns.
    pub mu: SimplexVector<T>,
    /// Optimal functional over rows; `min_j (φᵀA)_j = v_mixed`.
    pub phi: SimplexVector<T>,
    /// `v_mixed >= v_pure - tol`.
    pub equal: bool,
}

/// `min_j max_λ A[λ][j]` and its first attaining column.
pub fn pure_value<T: Scalar>(a: &Matrix<T>) -> (T, usize) {
    let maxima = a.column_maxima();
    let (j, v) = argmin(&maxima).expect("matrix has at least one column");
    (v, j)
}

/// Solves `min v  s.t. (A μ)_λ <= v, Σ μ = 1, μ >= 0`.
///
/// The row functional φ is read off the duals of the `(A μ)_λ <= v` rows.
pub fn minimax<T: Scalar>(a: &Matrix<T>, tol: &T) -> Result<MinimaxReport<T>, LpError> {
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut objective = vec![T::zero(); n + 1];
    objective[n] = T::one();
    let mut bounds = vec![VarBound::NonNegative; n + 1];
    bounds[n] = VarBound::Free;
    let mut lp = LpProblem::new(objective, bounds)?;
    for row in a.rows() {
        let mut coeffs = row.clone();
        coeffs.push(-T::one());
        lp.add_constraint(coeffs, Relation::Le, T::zero())?;
    }
    let mut simplex_row = vec![T::one(); n + 1];
    simplex_row[n] = T::zero();
    lp.add_constraint(simplex_row, Relation::Eq, T::one())?;

    let sol = match solve(&lp, tol)? {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(LpError::Numerical(format!(
                "matrix game LP ended with status {:?}",
                other.status()
            )))
        }
    };
    let v_mixed = sol.primal[n].clone();
    let mu = SimplexVector::normalized(sol.primal[..n].to_vec())
        .map_err(|e| LpError::Numerical(format!("column strategy: {e}")))?;
    let phi = SimplexVector::normalized(sol.dual[..m].iter().map(|y| -y.clone()).collect())
        .map_err(|e| LpError::Numerical(format!("row functional: {e}")))?;

    let row_max = crate::scalar::argmax(&a.mul_vec(mu.weights())).expect("rows").1;
    let col_min = argmin(&a.vec_mul(phi.weights())).expect("cols").1;
    if (row_max - v_mixed.clone()).abs() > *tol || (col_min - v_mixed.clone()).abs() > *tol {
        return Err(LpError::Numerical("minimax strong duality residual exceeds tolerance".into()));
    }
    let (v_pure, v_pure_column) = pure_value(a);
    let equal = v_mixed >= v_pure.clone() - tol.clone();
    Ok(MinimaxReport {
        v_pure,
        v_pure_column,
        v_mixed,
        mu,
        phi,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::new(rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn one_by_one() {
        let rep = minimax(&mat(&[&[0]]), &Rational::zero()).unwrap();
        assert_eq!(rep.v_pure, q(0, 1));
        assert_eq!(rep.v_mixed, q(0, 1));
        assert_eq!(rep.mu.weights(), &[q(1, 1)]);
        assert_eq!(rep.phi.weights(), &[q(1, 1)]);
        assert!(rep.equal);
    }

    #[test]
    fn matching_pennies() {
        let rep = minimax(&mat(&[&[1, -1], &[-1, 1]]), &Rational::zero()).unwrap();
        assert_eq!(rep.v_pure, q(1, 1));
        assert_eq!(rep.v_mixed, q(0, 1));
        assert_eq!(rep.mu.weights(), &[q(1, 2), q(1, 2)]);
        assert_eq!(rep.phi.weights(), &[q(1, 2), q(1, 2)]);
        assert!(!rep.equal);
    }

    #[test]
    fn anti_diagonal() {
        let rep = minimax(&mat(&[&[0, -1], &[-1, 0]]), &Rational::zero()).unwrap();
        assert_eq!(rep.v_pure, q(0, 1));
        assert_eq!(rep.v_mixed, q(-1, 2));
        assert_eq!(rep.mu.weights(), &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn float_matching_pennies() {
        let a = Matrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let rep = minimax(&a, &1e-9).unwrap();
        assert!(rep.v_mixed.abs() < 1e-12);
        assert!((rep.mu.weights()[0] - 0.5).abs() < 1e-12);
        assert!((rep.phi.weights()[0] - 0.5).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn affine_equivariance(
            entries in proptest::collection::vec(-6i64..7, 6),
            scale in 1i64..5,
            shift in -5i64..6,
        ) {
            let a = Matrix::new(entries.chunks(3).map(|r| r.iter().map(|&v| q(v, 2)).collect()).collect()).unwrap();
            let (c, d) = (q(scale, 3), q(shift, 1));
            let b = a.map(|v| c.clone() * v.clone() + d.clone());
            let ra = minimax(&a, &Rational::zero()).unwrap();
            let rb = minimax(&b, &Rational::zero()).unwrap();
            proptest::prop_assert_eq!(rb.v_mixed.clone(), c.clone() * ra.v_mixed.clone() + d.clone());
            // strategies optimal for A stay optimal for the transformed game
            let row_max = crate::scalar::argmax(&b.mul_vec(ra.mu.weights())).unwrap().1;
            let col_min = argmin(&b.vec_mul(ra.phi.weights())).unwrap().1;
            proptest::prop_assert_eq!(row_max, rb.v_mixed.clone());
            proptest::prop_assert_eq!(col_min, rb.v_mixed);
        }
    }
}
