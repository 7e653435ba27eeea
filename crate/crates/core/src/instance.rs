//! Sampled infinite programs `min f(x) s.t. sup_λ g_λ(x) <= 0`.
//!
//! The decision set and the index set are both finite samples supplied by the
//! caller: the objective is a vector over sampled points and the constraint
//! family is an `L x n` matrix with one row per constraint index and one column
//! per sampled point.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::scalar::{argmax, json_type_name, Scalar, ScalarMode, ScalarParseError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {reason}")]
    Field { path: String, reason: String },
    #[error("{path}: expected length {expected}, found {found}")]
    DimensionMismatch {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}: entry is not finite")]
    NonFinite { path: String },
    #[error("x0_index: {index} is out of range for {len} sampled points")]
    X0OutOfRange { index: usize, len: usize },
    #[error("{0} must be nonempty")]
    Empty(&'static str),
    #[error("grid does not contain the required point {0}")]
    GridMissing(String),
    #[error("number of constraint rows must be at least 1")]
    ZeroRows,
    #[error("instance has no candidate optimum (x0_index unset)")]
    MissingX0,
    #[error("candidate optimum x{index} is infeasible: max constraint value {violation}")]
    X0Infeasible { index: usize, violation: String },
    #[error("feasible sample is empty")]
    EmptyFeasibleSet,
    #[error("not a probability vector: {0}")]
    NotSimplex(String),
    #[error("csv: {0}")]
    Csv(String),
}

fn field_err(path: impl Into<String>, err: ScalarParseError) -> InstanceError {
    let path = path.into();
    match err {
        ScalarParseError::NonFinite(_) => InstanceError::NonFinite { path },
        other => InstanceError::Field {
            path,
            reason: other.to_string(),
        },
    }
}

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: Vec<Vec<T>>,
    cols: usize,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, InstanceError> {
        let first = rows.first().ok_or(InstanceError::Empty("matrix"))?;
        let cols = first.len();
        if cols == 0 {
            return Err(InstanceError::Empty("matrix row"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(InstanceError::DimensionMismatch {
                    path: format!("row {i}"),
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite_value()) {
                return Err(InstanceError::NonFinite {
                    path: format!("[{i}][{j}]"),
                });
            }
        }
        Ok(Matrix { rows, cols })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self, InstanceError> {
        let first = columns.first().ok_or(InstanceError::Empty("point list"))?;
        let dim = first.len();
        for (j, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(InstanceError::DimensionMismatch {
                    path: format!("point {j}"),
                    expected: dim,
                    found: c.len(),
                });
            }
        }
        let rows = (0..dim)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        Matrix::new(rows)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    /// `max_i A[i][j]` for every column `j`.
    pub fn column_maxima(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| argmax(self.rows.iter().map(|r| &r[j])).expect("nonempty").1)
            .collect()
    }

    /// `A · w` for a weight vector over columns.
    pub fn mul_vec(&self, weights: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| crate::scalar::dot(r, weights)).collect()
    }

    /// `wᵀ A` for a weight vector over rows.
    pub fn vec_mul(&self, weights: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|j| {
                self.rows
                    .iter()
                    .zip(weights)
                    .fold(T::zero(), |acc, (r, w)| acc + w.clone() * r[j].clone())
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            cols: self.cols,
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Scalar::to_json).collect()))
                .collect(),
        )
    }
}

/// Parses a bare CSV matrix: one row per line, comma separated, no header.
pub fn parse_csv_matrix<T: Scalar>(text: &str) -> Result<Matrix<T>, InstanceError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| InstanceError::Csv(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| T::parse_literal(cell).map_err(|e| field_err(format!("line {}, column {}", i + 1, j + 1), e)))
            .collect::<Result<Vec<T>, _>>()?;
        rows.push(row);
    }
    Matrix::new(rows)
}

/// A point of the probability simplex Δ_N.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector<T> {
    weights: Vec<T>,
}

impl<T: Scalar> SimplexVector<T> {
    /// Validates nonnegativity and unit sum: exact in rational mode, within 1e-12 in float mode.
    pub fn new(weights: Vec<T>) -> Result<Self, InstanceError> {
        if weights.is_empty() {
            return Err(InstanceError::Empty("simplex vector"));
        }
        if let Some(i) = weights.iter().position(|w| w.is_negative() || !w.is_finite_value()) {
            return Err(InstanceError::NotSimplex(format!(
                "weight {i} is {}",
                weights[i].render()
            )));
        }
        let sum = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        let ok = match T::MODE {
            ScalarMode::Exact => sum.is_one(),
            ScalarMode::Float => (sum.to_f64() - 1.0).abs() <= 1e-12,
        };
        if !ok {
            return Err(InstanceError::NotSimplex(format!("weights sum to {}", sum.render())));
        }
        Ok(SimplexVector { weights })
    }

    /// Clears round-off negatives (float only) and rescales to unit sum.
    pub fn normalized(mut weights: Vec<T>) -> Result<Self, InstanceError> {
        let slack = match T::MODE {
            ScalarMode::Float => T::pivot_eps() * T::from_i64(1000),
            ScalarMode::Exact => T::zero(),
        };
        for w in weights.iter_mut() {
            if w.is_negative() {
                if -w.clone() <= slack {
                    *w = T::zero();
                } else {
                    return Err(InstanceError::NotSimplex(format!("negative weight {}", w.render())));
                }
            }
        }
        let sum = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        if !sum.is_positive() {
            return Err(InstanceError::NotSimplex("weights sum to zero".into()));
        }
        if !sum.is_one() {
            for w in weights.iter_mut() {
                *w = w.clone() / sum.clone();
            }
        }
        SimplexVector::new(weights)
    }

    pub fn uniform(n: usize) -> Self {
        let w = T::one() / T::from_i64(n as i64);
        SimplexVector { weights: vec![w; n] }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.weights
    }
}

/// A sample-discretized instance of `min f(x) s.t. g_λ(x) <= 0 for all λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramInstance<T> {
    lambda_labels: Vec<String>,
    x_labels: Vec<String>,
    objective: Vec<T>,
    constraints: Matrix<T>,
    x0_index: Option<usize>,
}

impl<T: Scalar> ProgramInstance<T> {
    pub fn new(
        lambda_labels: Option<Vec<String>>,
        x_labels: Option<Vec<String>>,
        objective: Vec<T>,
        constraints: Vec<Vec<T>>,
        x0_index: Option<usize>,
    ) -> Result<Self, InstanceError> {
        if objective.is_empty() {
            return Err(InstanceError::Empty("objective"));
        }
        if constraints.is_empty() {
            return Err(InstanceError::Empty("constraints"));
        }
        let n = objective.len();
        if let Some(j) = objective.iter().position(|v| !v.is_finite_value()) {
            return Err(InstanceError::NonFinite {
                path: format!("objective[{j}]"),
            });
        }
        for (i, row) in constraints.iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::DimensionMismatch {
                    path: format!("constraints[{i}]"),
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let constraints = Matrix::new(constraints).map_err(|e| match e {
            InstanceError::NonFinite { path } => InstanceError::NonFinite {
                path: format!("constraints{path}"),
            },
            other => other,
        })?;
        let l = constraints.n_rows();
        let lambda_labels = lambda_labels.unwrap_or_else(|| (1..=l).map(|i| format!("g{i}")).collect());
        let x_labels = x_labels.unwrap_or_else(|| (1..=n).map(|j| format!("x{j}")).collect());
        if lambda_labels.len() != l {
            return Err(InstanceError::DimensionMismatch {
                path: "lambda_labels".into(),
                expected: l,
                found: lambda_labels.len(),
            });
        }
        if x_labels.len() != n {
            return Err(InstanceError::DimensionMismatch {
                path: "x_labels".into(),
                expected: n,
                found: x_labels.len(),
            });
        }
        if let Some(index) = x0_index {
            if index >= n {
                return Err(InstanceError::X0OutOfRange { index, len: n });
            }
        }
        Ok(ProgramInstance {
            lambda_labels,
            x_labels,
            objective,
            constraints,
            x0_index,
        })
    }

    pub fn lambda_labels(&self) -> &[String] {
        &self.lambda_labels
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn constraints(&self) -> &Matrix<T> {
        &self.constraints
    }

    pub fn x0_index(&self) -> Option<usize> {
        self.x0_index
    }

    pub fn scalar_mode(&self) -> ScalarMode {
        T::MODE
    }

    /// Number of constraint indices `L`.
    pub fn n_constraints(&self) -> usize {
        self.constraints.n_rows()
    }

    /// Number of sampled points `n`.
    pub fn n_points(&self) -> usize {
        self.objective.len()
    }

    pub fn with_x0(mut self, x0_index: Option<usize>) -> Result<Self, InstanceError> {
        if let Some(index) = x0_index {
            if index >= self.n_points() {
                return Err(InstanceError::X0OutOfRange {
                    index,
                    len: self.n_points(),
                });
            }
        }
        self.x0_index = x0_index;
        Ok(self)
    }

    pub(crate) fn require_x0(&self) -> Result<usize, InstanceError> {
        self.x0_index.ok_or(InstanceError::MissingX0)
    }

    /// Constraint values `(g_λ(x_j))_λ` at one sampled point.
    pub fn constraint_column(&self, j: usize) -> Vec<T> {
        self.constraints.column(j)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("lambda_labels".into(), json!(self.lambda_labels));
        obj.insert("x_labels".into(), json!(self.x_labels));
        obj.insert(
            "objective".into(),
            Value::Array(self.objective.iter().map(Scalar::to_json).collect()),
        );
        obj.insert("constraints".into(), self.constraints.to_json());
        if let Some(x0) = self.x0_index {
            obj.insert("x0_index".into(), json!(x0));
        }
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("instance serializes")
    }
}

/// Parses an instance document.
///
/// Numbers may be JSON numbers or numeric strings (`"1/3"`); in exact mode
/// decimal literals are read as exact ratios.
pub fn parse_instance<T: Scalar>(text: &str) -> Result<ProgramInstance<T>, InstanceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    instance_from_value(&doc)
}

pub fn instance_from_value<T: Scalar>(doc: &Value) -> Result<ProgramInstance<T>, InstanceError> {
    let obj = doc.as_object().ok_or_else(|| InstanceError::Field {
        path: "$".into(),
        reason: format!("expected object, found {}", json_type_name(doc)),
    })?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "lambda_labels" | "x_labels" | "objective" | "constraints" | "x0_index"
        ) {
            return Err(InstanceError::Field {
                path: key.clone(),
                reason: "unknown field".into(),
            });
        }
    }
    let labels = |key: &str| -> Result<Option<Vec<String>>, InstanceError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_str().map(str::to_string).ok_or_else(|| InstanceError::Field {
                        path: format!("{key}[{i}]"),
                        reason: format!("expected string, found {}", json_type_name(v)),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => Err(InstanceError::Field {
                path: key.into(),
                reason: format!("expected array, found {}", json_type_name(other)),
            }),
        }
    };
    let lambda_labels = labels("lambda_labels")?;
    let x_labels = labels("x_labels")?;

    let objective = match obj.get("objective") {
        Some(v) => scalar_array::<T>(v, "objective")?,
        None => {
            return Err(InstanceError::Field {
                path: "objective".into(),
                reason: "missing".into(),
            })
        }
    };
    let constraints = match obj.get("constraints") {
        Some(Value::Array(rows)) => rows
            .iter()
            .enumerate()
            .map(|(i, r)| scalar_array::<T>(r, &format!("constraints[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        Some(other) => {
            return Err(InstanceError::Field {
                path: "constraints".into(),
                reason: format!("expected array, found {}", json_type_name(other)),
            })
        }
        None => {
            return Err(InstanceError::Field {
                path: "constraints".into(),
                reason: "missing".into(),
            })
        }
    };
    let x0_index = match obj.get("x0_index") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| InstanceError::Field {
            path: "x0_index".into(),
            reason: "expected a nonnegative integer".into(),
        })? as usize),
    };
    ProgramInstance::new(lambda_labels, x_labels, objective, constraints, x0_index)
}

fn scalar_array<T: Scalar>(value: &Value, path: &str) -> Result<Vec<T>, InstanceError> {
    let items = value.as_array().ok_or_else(|| InstanceError::Field {
        path: path.into(),
        reason: format!("expected array, found {}", json_type_name(value)),
    })?;
    items
        .iter()
        .enumerate()
        .map(|(j, v)| T::from_json(v).map_err(|e| field_err(format!("{path}[{j}]"), e)))
        .collect()
}

/// Parses a comma-separated list of literals such as `" -2,-1,0,1"`.
pub fn parse_grid<T: Scalar>(text: &str) -> Result<Vec<T>, InstanceError> {
    let grid = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| T::parse_literal(s).map_err(|e| field_err(format!("grid[{i}]"), e)))
        .collect::<Result<Vec<T>, _>>()?;
    if grid.is_empty() {
        return Err(InstanceError::Empty("grid"));
    }
    Ok(grid)
}

fn position_of<T: Scalar>(grid: &[T], value: &T) -> Result<usize, InstanceError> {
    if grid.is_empty() {
        return Err(InstanceError::Empty("grid"));
    }
    grid.iter()
        .position(|g| g == value)
        .ok_or_else(|| InstanceError::GridMissing(value.render()))
}

/// The cubic family `f(x) = x`, `f_n(x) = -x³/n` for `n = 1..=rows`, with `x0 = 0`.
pub fn generate_paper_example<T: Scalar>(rows: usize, grid: &[T]) -> Result<ProgramInstance<T>, InstanceError> {
    if rows == 0 {
        return Err(InstanceError::ZeroRows);
    }
    let x0 = position_of(grid, &T::zero())?;
    let constraints = (1..=rows)
        .map(|n| {
            let n = T::from_i64(n as i64);
            grid.iter()
                .map(|x| -(x.clone() * x.clone() * x.clone()) / n.clone())
                .collect()
        })
        .collect();
    ProgramInstance::new(
        Some((1..=rows).map(|n| format!("f{n}")).collect()),
        Some(grid.iter().map(Scalar::render).collect()),
        grid.to_vec(),
        constraints,
        Some(x0),
    )
}

/// `min x² s.t. x + 1 <= 0`, optimum at `x0 = -1`.
pub fn generate_convex_demo<T: Scalar>(grid: &[T]) -> Result<ProgramInstance<T>, InstanceError> {
    let x0 = position_of(grid, &-T::one())?;
    ProgramInstance::new(
        Some(vec!["x+1".into()]),
        Some(grid.iter().map(Scalar::render).collect()),
        grid.iter().map(|x| x.clone() * x.clone()).collect(),
        vec![grid.iter().map(|x| x.clone() + T::one()).collect()],
        Some(x0),
    )
}

/// Constraint rows followed by the shifted objective row `f(x) - f(x0)` (last).
pub fn combined_family<T: Scalar>(inst: &ProgramInstance<T>) -> Result<Matrix<T>, InstanceError> {
    let x0 = inst.require_x0()?;
    let f0 = inst.objective[x0].clone();
    let mut rows = inst.constraints.rows().to_vec();
    rows.push(inst.objective.iter().map(|v| v.clone() - f0.clone()).collect());
    Matrix::new(rows)
}

/// Sampled points whose constraint values are all at most `tol`.
pub fn feasible_indices<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> Vec<usize> {
    inst.constraints
        .column_maxima()
        .iter()
        .enumerate()
        .filter(|(_, m)| *m <= tol)
        .map(|(j, _)| j)
        .collect()
}

/// `f(x0) - min_{feasible sample} f`; at most `tol` means `x0` is sample-optimal.
pub fn assert_optimal<T: Scalar>(inst: &ProgramInstance<T>, tol: &T) -> Result<T, InstanceError> {
    let x0 = inst.require_x0()?;
    let feasible = feasible_indices(inst, tol);
    if feasible.is_empty() {
        return Err(InstanceError::EmptyFeasibleSet);
    }
    if !feasible.contains(&x0) {
        let violation = inst.constraints.column_maxima()[x0].render();
        return Err(InstanceError::X0Infeasible { index: x0, violation });
    }
    let best = crate::scalar::argmin(feasible.iter().map(|&j| &inst.objective[j]))
        .expect("nonempty")
        .1;
    Ok(inst.objective[x0].clone() - best)
}
