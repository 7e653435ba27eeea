//! Scalar abstraction shared by every solver and certificate in the crate.
//!
//! Two arithmetic back ends are provided: IEEE `f64` and exact `BigRational`.
//! All algorithms are written once against [`Scalar`]; the mode is chosen by
//! the type parameter.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

/// Exact rational scalar used in `--exact` mode.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Float,
    Exact,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Float => "float64",
            ScalarMode::Exact => "exact-rational",
        }
    }
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarMode {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float64" | "float" => Ok(ScalarMode::Float),
            "exact-rational" | "exact" | "rational" => Ok(ScalarMode::Exact),
            other => Err(ScalarParseError::Malformed(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScalarParseError {
    #[error("malformed number literal `{0}`")]
    Malformed(String),
    #[error("number `{0}` is not finite")]
    NonFinite(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("expected a number or numeric string, found {0}")]
    WrongJsonType(String),
}

/// Ordered field used by the LP engine and every certificate check.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static
{
    const MODE: ScalarMode;

    /// Threshold below which pivot elements and reduced costs are treated as zero.
    /// Zero for exact arithmetic.
    fn pivot_eps() -> Self;

    /// Parses a decimal literal (`-0.5`, `1e-3`) or a ratio `p/q`.
    fn parse_literal(text: &str) -> Result<Self, ScalarParseError>;

    /// Lossless textual form (`parse_literal(render(x)) == x`).
    fn render(&self) -> String;

    /// Exact conversion of a finite float; `None` for NaN/inf.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn is_finite_value(&self) -> bool;

    fn from_i64(x: i64) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(value: &Value) -> Result<Self, ScalarParseError> {
        match value {
            Value::Number(n) => Self::parse_literal(&n.to_string()),
            Value::String(s) => Self::parse_literal(s),
            other => Err(ScalarParseError::WrongJsonType(json_type_name(other).into())),
        }
    }
}

pub(crate) fn json_type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn pivot_eps() -> Self {
        1e-11
    }

    fn parse_literal(text: &str) -> Result<Self, ScalarParseError> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = Self::parse_literal(num)?;
            let den: f64 = Self::parse_literal(den)?;
            if den == 0.0 {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            return Ok(num / den);
        }
        let lower = text.to_ascii_lowercase();
        if lower.contains("inf") || lower.contains("nan") {
            return Err(ScalarParseError::NonFinite(text.to_string()));
        }
        let value: f64 = text
            .parse()
            .map_err(|_| ScalarParseError::Malformed(text.to_string()))?;
        if !value.is_finite() {
            return Err(ScalarParseError::NonFinite(text.to_string()));
        }
        Ok(value)
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

impl Scalar for BigRational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn pivot_eps() -> Self {
        BigRational::zero()
    }

    fn parse_literal(text: &str) -> Result<Self, ScalarParseError> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num = parse_decimal(num.trim())?;
            let den = parse_decimal(den.trim())?;
            if den.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            return Ok(num / den);
        }
        parse_decimal(text)
    }

    fn render(&self) -> String {
        render_rational(self)
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }

    fn to_json(&self) -> Value {
        Value::String(self.render())
    }
}

/// Exact value of a decimal literal with optional exponent.
fn parse_decimal(text: &str) -> Result<BigRational, ScalarParseError> {
    let malformed = || ScalarParseError::Malformed(text.to_string());
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = body[pos + 1..].parse().map_err(|_| malformed())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        let lower = text.to_ascii_lowercase();
        if lower.contains("inf") || lower.contains("nan") {
            return Err(ScalarParseError::NonFinite(text.to_string()));
        }
        return Err(malformed());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&digits).map_err(|_| malformed())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(ScalarParseError::NonFinite(text.to_string()));
    }
    let ten = BigInt::from(10u32);
    let power: BigInt = Pow::pow(&ten, scale.unsigned_abs());
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * power)
    } else {
        BigRational::new(numer, power)
    })
}

/// Terminating decimals are rendered as decimals, everything else as `p/q`.
fn render_rational(value: &BigRational) -> String {
    let den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut rest = den.clone();
    let (mut twos, mut fives) = (0u64, 0u64);
    while rest.is_multiple_of(&two) {
        rest /= &two;
        twos += 1;
    }
    while rest.is_multiple_of(&five) {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), den);
    }
    let places = twos.max(fives);
    if places == 0 {
        return value.numer().to_string();
    }
    let ten = BigInt::from(10u32);
    let scaled = value.numer() * Pow::pow(&ten, places) / &den;
    let negative = scaled.is_negative();
    let mut digits = scaled.abs().to_string();
    let places = places as usize;
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if negative { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Maximum of a nonempty iterator together with the index of its first occurrence.
pub(crate) fn argmax<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match &best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v.clone())),
        }
    }
    best
}

/// Minimum with lowest-index tie-breaking.
pub(crate) fn argmin<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match &best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v.clone())),
        }
    }
    best
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(BigRational::parse_literal("0.5").unwrap(), q(1, 2));
        assert_eq!(BigRational::parse_literal("-0.125").unwrap(), q(-1, 8));
        assert_eq!(BigRational::parse_literal("1e-9").unwrap(), q(1, 1_000_000_000));
        assert_eq!(BigRational::parse_literal("2.5E2").unwrap(), q(250, 1));
        assert_eq!(BigRational::parse_literal(" -1000/3 ").unwrap(), q(-1000, 3));
        assert_eq!(BigRational::parse_literal(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn bad_literals_rejected() {
        assert!(BigRational::parse_literal("abc").is_err());
        assert!(BigRational::parse_literal("").is_err());
        assert!(BigRational::parse_literal("1/0").is_err());
        assert!(matches!(
            BigRational::parse_literal("inf"),
            Err(ScalarParseError::NonFinite(_))
        ));
        assert!(matches!(f64::parse_literal("NaN"), Err(ScalarParseError::NonFinite(_))));
        assert!(matches!(f64::parse_literal("1e400"), Err(ScalarParseError::NonFinite(_))));
    }

    #[test]
    fn rendering() {
        assert_eq!(q(1, 2).render(), "0.5");
        assert_eq!(q(-1, 8).render(), "-0.125");
        assert_eq!(q(-1000, 3).render(), "-1000/3");
        assert_eq!(q(7, 1).render(), "7");
        assert_eq!(q(1, 100).render(), "0.01");
        assert_eq!(q(-3, 20).render(), "-0.15");
        assert_eq!(0.1f64.render(), "0.1");
    }

    #[test]
    fn argmin_prefers_lowest_index() {
        let v = [3.0, 1.0, 1.0, 2.0];
        assert_eq!(argmin(&v), Some((1, 1.0)));
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some((1, 3.0)));
    }

    proptest::proptest! {
        #[test]
        fn rational_render_roundtrip(n in -10_000i64..10_000, d in 1i64..2_000) {
            let x = q(n, d);
            proptest::prop_assert_eq!(BigRational::parse_literal(&x.render()).unwrap(), x);
        }

        #[test]
        fn float_render_roundtrip(x in -1e6f64..1e6) {
            proptest::prop_assert_eq!(f64::parse_literal(&x.render()).unwrap(), x);
        }
    }
}
