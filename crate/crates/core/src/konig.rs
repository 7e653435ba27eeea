//! Infsup-convexity verdicts and König / Mazur–Orlicz functionals.
//!
//! A family `(g_λ)` sampled on points `x_1..x_n` is a matrix `A[λ][j]`. It is
//! infsup-convex on the sample exactly when no mixture of sampled points can
//! push `max_λ` below the best pure point, i.e. when the mixed value of the
//! matrix game equals its pure value. Both directions are answered with a
//! checkable object: a row functional in Δ_Λ, or a finite convex combination
//! that beats the pure value.

use thiserror::Error;

use crate::instance::{Matrix, SimplexVector};
use crate::lp::{minimax, pure_value, LpError};
use crate::scalar::{argmax, argmin, Scalar};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KonigError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(
        "hypothesis f(x) + alpha <= max_λ g_λ(x) fails at column {column}: slack {slack}"
    )]
    Hypothesis { column: usize, slack: String },
    #[error("no functional exists but the best mixture only beats the pure value by {gap}, within tolerance")]
    Inconclusive { gap: String },
    #[error("returned functional fails verification: worst residual {0}")]
    Verification(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    ConvexOnSample,
    Witness,
}

/// Finite convex combination of sampled points whose sup beats the pure infsup.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness<T> {
    /// Column indices `x_1..x_m`.
    pub support: Vec<usize>,
    /// `t ∈ Δ_m`, aligned with `support`.
    pub weights: SimplexVector<T>,
    /// `min_j max_λ A[λ][j]`.
    pub lhs: T,
    /// `max_λ Σ_j t_j A[λ][x_j]`.
    pub rhs: T,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityVerdict<T> {
    pub kind: VerdictKind,
    pub witness: Option<ConvexityWitness<T>>,
    pub v_pure: T,
    pub v_pure_column: usize,
    pub v_mixed: T,
    /// Optimal row functional. On a convex verdict it certifies
    /// `min_j (φᵀA)_j >= v_pure - tol`, which bounds every mixture from below.
    pub functional: SimplexVector<T>,
}

/// `min_j max_λ A[λ][j]` with the lowest attaining column.
pub fn v_pure<T: Scalar>(a: &Matrix<T>) -> (T, usize) {
    pure_value(a)
}

/// `max_λ Σ_j t_j A[λ][x_j]`.
pub fn mixture_sup<T: Scalar>(a: &Matrix<T>, support: &[usize], weights: &[T]) -> T {
    let values = a.rows().iter().map(|row| {
        support
            .iter()
            .zip(weights)
            .fold(T::zero(), |acc, (&j, t)| acc + t.clone() * row[j].clone())
    });
    let values: Vec<T> = values.collect();
    argmax(&values).expect("matrix has rows").1
}

/// Builds a witness from an optimal column mixture, pruning weights at or
/// below `tol` when that keeps the gap above `tol`.
pub fn witness_from_mixture<T: Scalar>(a: &Matrix<T>, mu: &SimplexVector<T>, tol: &T) -> ConvexityWitness<T> {
    let (lhs, _) = pure_value(a);
    let build = |threshold: &T| -> Option<ConvexityWitness<T>> {
        let support: Vec<usize> = mu
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| *w > threshold)
            .map(|(j, _)| j)
            .collect();
        let raw: Vec<T> = support.iter().map(|&j| mu.weights()[j].clone()).collect();
        let weights = SimplexVector::normalized(raw).ok()?;
        let rhs = mixture_sup(a, &support, weights.weights());
        let gap = lhs.clone() - rhs.clone();
        Some(ConvexityWitness {
            support,
            weights,
            lhs: lhs.clone(),
            rhs,
            gap,
        })
    };
    let pruned = build(tol).filter(|w| w.gap > *tol);
    pruned.unwrap_or_else(|| build(&T::zero()).expect("mixture has positive weight"))
}

/// Recomputes a witness by direct arithmetic; returns `(rhs, gap)` as found.
pub fn recheck_witness<T: Scalar>(a: &Matrix<T>, witness: &ConvexityWitness<T>) -> Result<(T, T), KonigError> {
    if witness.support.len() != witness.weights.dim() {
        return Err(KonigError::Dimension("support and weights differ in length".into()));
    }
    if let Some(&j) = witness.support.iter().find(|&&j| j >= a.n_cols()) {
        return Err(KonigError::Dimension(format!("support column {j} out of range")));
    }
    let (lhs, _) = pure_value(a);
    let rhs = mixture_sup(a, &witness.support, witness.weights.weights());
    let gap = lhs - rhs.clone();
    Ok((rhs, gap))
}

/// Decides infsup-convexity of the sampled family (rows of `a`).
pub fn check_infsup_convexity<T: Scalar>(a: &Matrix<T>, tol: &T) -> Result<ConvexityVerdict<T>, KonigError> {
    let game = minimax(a, tol)?;
    let beaten = game.v_mixed < game.v_pure.clone() - tol.clone();
    let witness = beaten.then(|| witness_from_mixture(a, &game.mu, tol));
    if let Some(w) = &witness {
        if w.gap <= *tol {
            return Err(KonigError::Inconclusive { gap: w.gap.render() });
        }
    }
    Ok(ConvexityVerdict {
        kind: if beaten {
            VerdictKind::Witness
        } else {
            VerdictKind::ConvexOnSample
        },
        witness,
        v_pure: game.v_pure,
        v_pure_column: game.v_pure_column,
        v_mixed: game.v_mixed,
        functional: game.phi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum KonigOutcome<T> {
    /// Φ ∈ Δ_Λ with `f(x) + α <= Φ(g(x))` at every sampled point.
    Functional(SimplexVector<T>),
    /// Witness against infsup-convexity of `(g_λ - f)`.
    Witness(ConvexityWitness<T>),
}

fn shifted_family<T: Scalar>(f: &[T], g: &Matrix<T>, alpha: &T) -> Result<Matrix<T>, KonigError> {
    if f.len() != g.n_cols() {
        return Err(KonigError::Dimension(format!(
            "{} objective values for {} sampled points",
            f.len(),
            g.n_cols()
        )));
    }
    let rows = g
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(f)
                .map(|(v, fx)| v.clone() - fx.clone() - alpha.clone())
                .collect()
        })
        .collect();
    Matrix::new(rows).map_err(|e| KonigError::Dimension(e.to_string()))
}

/// `max_x (f(x) + α - Φ(g(x)))`; at most `tol` means Φ is valid.
pub fn functional_residual<T: Scalar>(f: &[T], g: &Matrix<T>, alpha: &T, phi: &[T]) -> Result<T, KonigError> {
    if phi.len() != g.n_rows() {
        return Err(KonigError::Dimension(format!(
            "functional has {} weights for {} rows",
            phi.len(),
            g.n_rows()
        )));
    }
    if f.len() != g.n_cols() {
        return Err(KonigError::Dimension("objective length".into()));
    }
    let averaged = g.vec_mul(phi);
    let slack: Vec<T> = f
        .iter()
        .zip(&averaged)
        .map(|(fx, gx)| fx.clone() + alpha.clone() - gx.clone())
        .collect();
    Ok(argmax(&slack).expect("columns").1)
}

/// Finds Φ ∈ Δ_Λ with `f(x) + α <= Φ((g_λ(x))_λ)` on the sample, or a witness
/// that `(g_λ - f)` is not infsup-convex.
///
/// The hypothesis `f(x) + α <= max_λ g_λ(x)` must hold at every sampled point.
pub fn konig_functional<T: Scalar>(
    f: &[T],
    g: &Matrix<T>,
    alpha: &T,
    tol: &T,
) -> Result<KonigOutcome<T>, KonigError> {
    let shifted = shifted_family(f, g, alpha)?;
    let (pure, column) = pure_value(&shifted);
    if pure < -tol.clone() {
        return Err(KonigError::Hypothesis {
            column,
            slack: pure.render(),
        });
    }
    let game = minimax(&shifted, tol)?;
    if game.v_mixed >= -tol.clone() {
        let residual = functional_residual(f, g, alpha, game.phi.weights())?;
        if residual > *tol {
            return Err(KonigError::Verification(residual.render()));
        }
        return Ok(KonigOutcome::Functional(game.phi));
    }
    let family = shifted_family(f, g, &T::zero())?;
    let witness = witness_from_mixture(&family, &game.mu, tol);
    if witness.gap <= *tol {
        return Err(KonigError::Inconclusive {
            gap: witness.gap.render(),
        });
    }
    Ok(KonigOutcome::Witness(witness))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MazurOrliczFunctional<T> {
    pub phi: SimplexVector<T>,
    /// Convex weights on the points whose combination attains `value`.
    pub mixture: SimplexVector<T>,
    /// `min_{conv(points)} Φ = min_{conv(points)} max-coordinate`.
    pub value: T,
}

/// Φ ∈ Δ_L dominated by the coordinate maximum whose infimum over the convex
/// hull of `points` matches that of the coordinate maximum.
pub fn mazur_orlicz_functional<T: Scalar>(points: &[Vec<T>], tol: &T) -> Result<MazurOrliczFunctional<T>, KonigError> {
    let a = Matrix::from_columns(points).map_err(|e| KonigError::Dimension(e.to_string()))?;
    let game = minimax(&a, tol)?;
    let phi_min = argmin(&a.vec_mul(game.phi.weights())).expect("points").1;
    if (phi_min - game.v_mixed.clone()).abs() > *tol {
        return Err(KonigError::Verification("functional infimum differs from hull value".into()));
    }
    Ok(MazurOrliczFunctional {
        phi: game.phi,
        mixture: game.mu,
        value: game.v_mixed,
    })
}
