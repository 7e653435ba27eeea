//! Report envelope and JSON encodings of every certificate type.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::CliError;
use crate::instance::{ProgramInstance, SimplexVector};
use crate::konig::{ConvexityVerdict, ConvexityWitness, MazurOrliczFunctional, VerdictKind};
use crate::lp::MinimaxReport;
use crate::multipliers::{
    CertificateKind, MultiplierCertificate, MultiplierOutcome, SaddleReport, SlaterReport, TruncationStudy,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certificate,
    Witness,
    Convex,
    Holds,
    Fails,
    Value,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Certificate | Verdict::Convex | Verdict::Holds | Verdict::Value => 0,
            Verdict::Witness | Verdict::Fails => 1,
        }
    }

    pub fn holds(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// Machine-readable result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub payload: Value,
    /// Decimal string in exact mode, JSON number in float mode.
    pub tolerance: Value,
    pub scalar_mode: String,
    /// Always true: certificates are proven for the sampled points only.
    pub sample_restricted: bool,
}

impl Report {
    pub fn new<T: Scalar>(command: &str, verdict: Verdict, payload: Value, tol: &T) -> Self {
        Report {
            command: command.to_string(),
            verdict,
            payload,
            tolerance: tol.to_json(),
            scalar_mode: T::MODE.as_str().to_string(),
            sample_restricted: true,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("report: {e}")))
    }
}

pub(crate) fn vec_json<T: Scalar>(values: &[T]) -> Value {
    Value::Array(values.iter().map(Scalar::to_json).collect())
}

pub(crate) fn witness_json<T: Scalar>(w: &ConvexityWitness<T>, labels: Option<&[String]>) -> Value {
    let mut v = json!({
        "support": w.support,
        "weights": vec_json(w.weights.weights()),
        "lhs": w.lhs.to_json(),
        "rhs": w.rhs.to_json(),
        "gap": w.gap.to_json(),
    });
    if let Some(labels) = labels {
        v["support_labels"] = json!(w.support.iter().map(|&j| labels[j].clone()).collect::<Vec<_>>());
    }
    v
}

pub(crate) fn minimax_json<T: Scalar>(r: &MinimaxReport<T>, rows: usize, cols: usize) -> Value {
    json!({
        "rows": rows,
        "cols": cols,
        "v_pure": r.v_pure.to_json(),
        "v_pure_column": r.v_pure_column,
        "v_mixed": r.v_mixed.to_json(),
        "mu": vec_json(r.mu.weights()),
        "phi": vec_json(r.phi.weights()),
        "equal": r.equal,
    })
}

pub(crate) fn verdict_json<T: Scalar>(v: &ConvexityVerdict<T>, labels: Option<&[String]>) -> Value {
    json!({
        "kind": match v.kind {
            VerdictKind::ConvexOnSample => "convex_on_sample",
            VerdictKind::Witness => "witness",
        },
        "v_pure": v.v_pure.to_json(),
        "v_pure_column": v.v_pure_column,
        "v_mixed": v.v_mixed.to_json(),
        "functional": vec_json(v.functional.weights()),
        "witness": v.witness.as_ref().map(|w| witness_json(w, labels)),
    })
}

pub(crate) fn mazur_orlicz_json<T: Scalar>(m: &MazurOrliczFunctional<T>) -> Value {
    json!({
        "phi": vec_json(m.phi.weights()),
        "mixture": vec_json(m.mixture.weights()),
        "value": m.value.to_json(),
    })
}

pub(crate) fn certificate_json<T: Scalar>(c: &MultiplierCertificate<T>) -> Value {
    json!({
        "kind": match c.kind {
            CertificateKind::FritzJohn => "fritz_john",
            CertificateKind::Kkt => "kkt",
        },
        "rho": c.rho.to_json(),
        "phi": vec_json(&c.phi),
        "normalized": c.normalized,
        "lagrangian_min_residual": c.lagrangian_min_residual.to_json(),
        "complementarity_residual": c.complementarity_residual.to_json(),
        "kkt_multiplier": c.kkt_multiplier.as_ref().map(|m| vec_json(m)),
        "lp_value": c.lp_value.to_json(),
    })
}

pub(crate) fn outcome_json<T: Scalar>(out: &MultiplierOutcome<T>, inst: &ProgramInstance<T>) -> (Verdict, Value) {
    let x0 = inst.x0_index().expect("checked by the solver");
    let mut payload = json!({
        "x0_index": x0,
        "x0_label": inst.x_labels()[x0],
        "family_rows": inst.n_constraints() + 1,
    });
    match out {
        MultiplierOutcome::Certificate(c) => {
            payload["outcome"] = json!("certificate");
            payload["certificate"] = certificate_json(c);
            (Verdict::Certificate, payload)
        }
        MultiplierOutcome::Witness(w) => {
            payload["outcome"] = json!("witness");
            payload["witness"] = witness_json(w, Some(inst.x_labels()));
            (Verdict::Witness, payload)
        }
    }
}

pub(crate) fn slater_json<T: Scalar>(s: &SlaterReport<T>, labels: &[String]) -> Value {
    json!({
        "strong_holds": s.strong_holds,
        "strong_witness_index": s.strong_witness_index,
        "strong_witness_label": s.strong_witness_index.map(|j| labels[j].clone()),
        "strong_margin": s.strong_margin.to_json(),
        "weak_holds": s.weak_holds,
        "weak_witness_index": s.weak_witness_index,
    })
}

pub(crate) fn saddle_json<T: Scalar>(s: &SaddleReport<T>, phi: &[T]) -> Value {
    json!({
        "phi": vec_json(phi),
        "left_ok": s.left_ok,
        "right_ok": s.right_ok,
        "is_saddle": s.is_saddle(),
        "worst_violation": s.worst_violation.to_json(),
    })
}

pub(crate) fn study_json<T: Scalar>(study: &TruncationStudy<T>, grid: &[T]) -> Value {
    let labels: Vec<String> = grid.iter().map(Scalar::render).collect();
    let rows: Vec<Value> = study
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "slater": slater_json(&r.slater, &labels),
                "v_pure": r.v_pure.to_json(),
                "v_mixed": r.v_mixed.to_json(),
                "verdict": match r.verdict {
                    VerdictKind::ConvexOnSample => "convex_on_sample",
                    VerdictKind::Witness => "witness",
                },
                "witness_gap": r.witness_gap.as_ref().map(Scalar::to_json),
                "fritz_john": match &r.fritz_john {
                    MultiplierOutcome::Certificate(c) => json!({"outcome": "certificate", "certificate": certificate_json(c)}),
                    MultiplierOutcome::Witness(w) => json!({"outcome": "witness", "witness": witness_json(w, Some(&labels))}),
                },
            })
        })
        .collect();
    json!({
        "grid": vec_json(grid),
        "rows": rows,
        "trend_holds": study.trend_holds,
        "note": "finite truncations only; the infinite family is infsup-convex analytically, which is not computed here",
    })
}

// ---- decoding, used by `verify`

pub(crate) fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .filter(|x| !x.is_null())
        .ok_or_else(|| CliError::Input(format!("report payload is missing `{key}`")))
}

pub(crate) fn scalar_at<T: Scalar>(v: &Value, key: &str) -> Result<T, CliError> {
    T::from_json(field(v, key)?).map_err(|e| CliError::Input(format!("{key}: {e}")))
}

pub(crate) fn scalars_at<T: Scalar>(v: &Value, key: &str) -> Result<Vec<T>, CliError> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| CliError::Input(format!("{key}: expected array")))?
        .iter()
        .enumerate()
        .map(|(i, x)| T::from_json(x).map_err(|e| CliError::Input(format!("{key}[{i}]: {e}"))))
        .collect()
}

pub(crate) fn index_at(v: &Value, key: &str) -> Result<usize, CliError> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| CliError::Input(format!("{key}: expected index")))
}

pub(crate) fn bool_at(v: &Value, key: &str) -> Result<bool, CliError> {
    field(v, key)?
        .as_bool()
        .ok_or_else(|| CliError::Input(format!("{key}: expected boolean")))
}

pub(crate) fn str_at<'a>(v: &'a Value, key: &str) -> Result<&'a str, CliError> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| CliError::Input(format!("{key}: expected string")))
}

pub(crate) fn simplex_at<T: Scalar>(v: &Value, key: &str) -> Result<SimplexVector<T>, CliError> {
    SimplexVector::new(scalars_at(v, key)?).map_err(|e| CliError::Input(format!("{key}: {e}")))
}

pub(crate) fn witness_from_json<T: Scalar>(v: &Value) -> Result<ConvexityWitness<T>, CliError> {
    let support = field(v, "support")?
        .as_array()
        .ok_or_else(|| CliError::Input("support: expected array".into()))?
        .iter()
        .map(|x| x.as_u64().map(|j| j as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CliError::Input("support: expected indices".into()))?;
    Ok(ConvexityWitness {
        support,
        weights: simplex_at(v, "weights")?,
        lhs: scalar_at(v, "lhs")?,
        rhs: scalar_at(v, "rhs")?,
        gap: scalar_at(v, "gap")?,
    })
}
