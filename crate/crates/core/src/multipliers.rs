//! Slater checks, Fritz John and KKT multiplier certificates, and saddle-point
//! verification for sampled programs `min f(x) s.t. g_λ(x) <= 0`.
//!
//! Positive functionals on the constraint values are represented by
//! nonnegative weight vectors over the sampled constraint indices.

use thiserror::Error;

use crate::instance::{
    assert_optimal, combined_family, generate_paper_example, InstanceError, ProgramInstance,
};
use crate::konig::{check_infsup_convexity, witness_from_mixture, ConvexityWitness, KonigError, VerdictKind};
use crate::lp::{minimax, pure_value, LpError};
use crate::scalar::{argmin, dot, Scalar};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MultiplierError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("candidate optimum is not optimal on the sample: gap {gap}")]
    Suboptimal { gap: String },
    #[error("Slater condition fails: best column maximum {margin} is not below -tol")]
    SlaterFails { margin: String },
    #[error("multiplier has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("multiplier entry {index} is negative")]
    NegativeMultiplier { index: usize },
    #[error("sample index {index} out of range")]
    IndexOutOfRange { index: usize },
    #[error("grid precondition: {0}")]
    Grid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl From<KonigError> for MultiplierError {
    fn from(e: KonigError) -> Self {
        match e {
            KonigError::Lp(lp) => MultiplierError::Lp(lp),
            other => MultiplierError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    FritzJohn,
    Kkt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierCertificate<T> {
    pub rho: T,
    /// Weights of the constraint functional, one per constraint index.
    pub phi: Vec<T>,
    /// `rho + Σ phi = 1`.
    pub normalized: bool,
    pub kind: CertificateKind,
    /// `-min_x [rho (f(x) - f(x0)) + phiᵀ g(x)]`.
    pub lagrangian_min_residual: T,
    /// `|phiᵀ g(x0)|`.
    pub complementarity_residual: T,
    /// `phi / rho`, present for KKT certificates.
    pub kkt_multiplier: Option<Vec<T>>,
    /// Mixed value of the combined family game the certificate was read from.
    pub lp_value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierOutcome<T> {
    Certificate(MultiplierCertificate<T>),
    Witness(ConvexityWitness<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterReport<T> {
    pub strong_holds: bool,
    pub strong_witness_index: Option<usize>,
    /// `min_x max_λ g_λ(x)`; negative iff some sampled point is strictly feasible.
    pub strong_margin: T,
    pub weak_holds: bool,
    pub weak_witness_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport<T> {
    /// `L(x0, Υ) <= L(x0, Φ0)` for every positive Υ.
    pub left_ok: bool,
    /// `L(x0, Φ0) <= L(x, Φ0)` at every sampled x.
    pub right_ok: bool,
    /// Largest amount by which any of the finite saddle conditions fails (zero if none).
    pub worst_violation: T,
}

impl<T> SaddleReport<T> {
    pub fn is_saddle(&self) -> bool {
        self.left_ok && self.right_ok
    }
}

/// `min_x max{ max_λ g_λ(x), f(x) - f(x0) }` and its attaining column.
///
/// Zero whenever `x0` is a feasible optimum of the sample; negative when `x0`
/// is beaten by a feasible point.
pub fn lemma_value<T: Scalar>(inst: &ProgramInstance<T>) -> Result<(T, usize), MultiplierError> {
    Ok(pure_value(&combined_family(inst)?))
}

pub fn slater_check<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> SlaterReport<T> {
    let maxima = inst.constraints().column_maxima();
    let (best, margin) = argmin(&maxima).expect("instance has points");
    let neg_tol = -tol.clone();
    let strong_holds = margin < neg_tol;
    // each constraint strictly negative on its own; ranked by the column maximum
    let weak_witness_index = (0..inst.n_points())
        .filter(|&j| inst.constraints().rows().iter().all(|r| r[j] < neg_tol))
        .min_by(|&a, &b| maxima[a].partial_cmp(&maxima[b]).expect("finite"));
    SlaterReport {
        strong_holds,
        strong_witness_index: strong_holds.then_some(best),
        strong_margin: margin,
        weak_holds: weak_witness_index.is_some(),
        weak_witness_index,
    }
}

/// `f(x) + phiᵀ g(x)`.
pub fn lagrangian_value<T: Scalar>(inst: &ProgramInstance<T>, x_index: usize, phi: &[T]) -> Result<T, MultiplierError> {
    check_multiplier(inst, phi)?;
    if x_index >= inst.n_points() {
        return Err(MultiplierError::IndexOutOfRange { index: x_index });
    }
    Ok(inst.objective()[x_index].clone() + dot(phi, &inst.constraint_column(x_index)))
}

fn check_multiplier<T: Scalar>(inst: &ProgramInstance<T>, phi: &[T]) -> Result<(), MultiplierError> {
    if phi.len() != inst.n_constraints() {
        return Err(MultiplierError::Dimension {
            expected: inst.n_constraints(),
            found: phi.len(),
        });
    }
    if let Some(index) = phi.iter().position(|p| p.is_negative()) {
        return Err(MultiplierError::NegativeMultiplier { index });
    }
    Ok(())
}

/// Recomputes `(lagrangian_min_residual, complementarity_residual)` for a
/// weighted pair `(rho, phi)` by direct arithmetic.
pub fn certificate_residuals<T: Scalar>(
    inst: &ProgramInstance<T>,
    rho: &T,
    phi: &[T],
) -> Result<(T, T), MultiplierError> {
    check_multiplier(inst, phi)?;
    let x0 = inst.x0_index().ok_or(InstanceError::MissingX0)?;
    let f0 = inst.objective()[x0].clone();
    let weighted = inst.constraints().vec_mul(phi);
    let values: Vec<T> = inst
        .objective()
        .iter()
        .zip(&weighted)
        .map(|(fx, gx)| rho.clone() * (fx.clone() - f0.clone()) + gx.clone())
        .collect();
    let min = argmin(&values).expect("points").1;
    Ok((-min, weighted[x0].abs()))
}

fn check_program_preconditions<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> Result<(), MultiplierError> {
    let gap = assert_optimal(inst, tol)?;
    if gap > *tol {
        return Err(MultiplierError::Suboptimal { gap: gap.render() });
    }
    Ok(())
}

/// Normalized Fritz John pair `(rho, phi)` with `rho + Σ phi = 1`, or a witness
/// that the combined family is not infsup-convex on the sample (in which case
/// no such pair exists for this sample).
pub fn fritz_john<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> Result<MultiplierOutcome<T>, MultiplierError> {
    check_program_preconditions(inst, tol)?;
    let family = combined_family(inst)?;
    let game = minimax(&family, tol)?;
    if game.v_mixed < -tol.clone() {
        let witness = witness_from_mixture(&family, &game.mu, tol);
        if witness.gap <= *tol {
            return Err(MultiplierError::Numerical(format!(
                "witness gap {} within tolerance",
                witness.gap.render()
            )));
        }
        return Ok(MultiplierOutcome::Witness(witness));
    }
    let mut psi = game.phi.into_inner();
    let rho = psi.pop().expect("objective row is last");
    let phi = psi;
    let (lagrangian_min_residual, complementarity_residual) = certificate_residuals(inst, &rho, &phi)?;
    if lagrangian_min_residual > *tol || complementarity_residual > *tol {
        return Err(MultiplierError::Numerical(format!(
            "certificate residuals {} / {} exceed tolerance",
            lagrangian_min_residual.render(),
            complementarity_residual.render()
        )));
    }
    Ok(MultiplierOutcome::Certificate(MultiplierCertificate {
        rho,
        phi,
        normalized: true,
        kind: CertificateKind::FritzJohn,
        lagrangian_min_residual,
        complementarity_residual,
        kkt_multiplier: None,
        lp_value: game.v_mixed,
    }))
}

/// Fritz John under the strong Slater condition: the certificate has
/// `rho > tol`, and `phi / rho` is a Lagrange multiplier on the sample.
pub fn kkt<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> Result<MultiplierOutcome<T>, MultiplierError> {
    check_program_preconditions(inst, tol)?;
    let slater = slater_check(inst, tol);
    if !slater.strong_holds {
        return Err(MultiplierError::SlaterFails {
            margin: slater.strong_margin.render(),
        });
    }
    match fritz_john(inst, tol)? {
        MultiplierOutcome::Witness(w) => Ok(MultiplierOutcome::Witness(w)),
        MultiplierOutcome::Certificate(mut cert) => {
            if cert.rho <= *tol {
                return Err(MultiplierError::Numerical(format!(
                    "rho = {} despite a strictly feasible sampled point",
                    cert.rho.render()
                )));
            }
            cert.kkt_multiplier = Some(cert.phi.iter().map(|p| p.clone() / cert.rho.clone()).collect());
            cert.kind = CertificateKind::Kkt;
            Ok(MultiplierOutcome::Certificate(cert))
        }
    }
}

/// Checks whether `(x0, phi)` is a saddle point of the sampled Lagrangian.
///
/// The left inequality over all positive functionals reduces to feasibility
/// of `x0` plus complementarity `phiᵀ g(x0) = 0`.
pub fn check_saddle<T: Scalar>(inst: &ProgramInstance<T>, phi: &[T], tol: &T) -> Result<SaddleReport<T>, MultiplierError> {
    check_multiplier(inst, phi)?;
    let x0 = inst.x0_index().ok_or(InstanceError::MissingX0)?;
    let g0 = inst.constraint_column(x0);
    let mut worst = T::zero();
    let mut bump = |v: T| {
        if v > worst {
            worst = v;
        }
    };
    let max_g0 = crate::scalar::argmax(&g0).expect("rows").1;
    let comp = dot(phi, &g0).abs();
    let left_ok = max_g0 <= *tol && comp <= *tol;
    bump(max_g0);
    bump(comp);

    let at_x0 = lagrangian_value(inst, x0, phi)?;
    let mut right_ok = true;
    for j in 0..inst.n_points() {
        let excess = at_x0.clone() - lagrangian_value(inst, j, phi)?;
        if excess > *tol {
            right_ok = false;
        }
        bump(excess);
    }
    Ok(SaddleReport {
        left_ok,
        right_ok,
        worst_violation: worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow<T> {
    pub n: usize,
    pub slater: SlaterReport<T>,
    pub v_pure: T,
    pub v_mixed: T,
    pub verdict: VerdictKind,
    pub witness_gap: Option<T>,
    /// Outcome of the Fritz John search on the same truncation.
    pub fritz_john: MultiplierOutcome<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStudy<T> {
    pub rows: Vec<StudyRow<T>>,
    /// Every `v_mixed < -tol` and `v_mixed` nondecreasing in N (within tol).
    pub trend_holds: bool,
}

/// Runs the cubic counterexample family for each truncation level in `ns`
/// (sorted ascending, duplicates dropped).
pub fn truncation_study<T: Scalar>(ns: &[usize], grid: &[T], tol: &T) -> Result<TruncationStudy<T>, MultiplierError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(MultiplierError::Grid("truncation levels must be positive and nonempty".into()));
    }
    if !grid.iter().any(|x| x.is_zero()) {
        return Err(MultiplierError::Grid("grid must contain 0".into()));
    }
    if !grid.iter().any(|x| x.is_negative()) {
        return Err(MultiplierError::Grid("grid must contain a negative point".into()));
    }
    if !grid.iter().any(|x| *x > T::one()) {
        return Err(MultiplierError::Grid("grid must contain a point greater than 1".into()));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let rows = ns
        .iter()
        .map(|&n| {
            let inst = generate_paper_example(n, grid)?;
            let slater = slater_check(&inst, tol);
            let verdict = check_infsup_convexity(&combined_family(&inst)?, tol)?;
            let fj = fritz_john(&inst, tol)?;
            Ok(StudyRow {
                n,
                slater,
                v_pure: verdict.v_pure,
                v_mixed: verdict.v_mixed,
                verdict: verdict.kind,
                witness_gap: verdict.witness.map(|w| w.gap),
                fritz_john: fj,
            })
        })
        .collect::<Result<Vec<_>, MultiplierError>>()?;

    let negative = rows.iter().all(|r| r.v_mixed < -tol.clone());
    let monotone = rows
        .windows(2)
        .all(|w| w[1].v_mixed >= w[0].v_mixed.clone() - tol.clone());
    Ok(TruncationStudy {
        rows,
        trend_holds: negative && monotone,
    })
}
