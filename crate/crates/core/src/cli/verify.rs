//! Independent re-check of a saved report. Nothing here calls the LP solver:
//! every claim is tested by direct evaluation on the input data.

use serde_json::{json, Value};

use super::report::{
    bool_at, field, index_at, scalar_at, scalars_at, simplex_at, str_at, witness_from_json, Report, Verdict,
};
use super::{load_instance, load_matrix, load_points, parse_tol, CliError, InputArgs};
use crate::instance::{combined_family, generate_paper_example, Matrix, ProgramInstance};
use crate::konig::{functional_residual, recheck_witness, v_pure};
use crate::multipliers::{certificate_residuals, check_saddle, slater_check};
use crate::scalar::{argmax, argmin, Rational, Scalar, ScalarMode};

struct Checks {
    items: Vec<Value>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { items: Vec::new(), ok: true }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.ok &= ok;
        self.items.push(json!({ "name": name, "ok": ok, "detail": detail }));
    }
}

pub(crate) fn verify_report(report: &Report, inputs: &InputArgs) -> Result<Report, CliError> {
    let mode: ScalarMode = report
        .scalar_mode
        .parse()
        .map_err(|_| CliError::Input(format!("unknown scalar_mode `{}`", report.scalar_mode)))?;
    match mode {
        ScalarMode::Exact => verify_with::<Rational>(report, inputs),
        ScalarMode::Float => verify_with::<f64>(report, inputs),
    }
}

fn verify_with<T: Scalar>(report: &Report, inputs: &InputArgs) -> Result<Report, CliError> {
    let tol: T = match &inputs.tol {
        Some(text) => parse_tol(text)?,
        None => T::from_json(&report.tolerance).map_err(|e| CliError::Input(format!("tolerance: {e}")))?,
    };
    let p = &report.payload;
    let mut c = Checks::new();
    c.check("sample_restricted", report.sample_restricted, "reports are always sample-restricted".into());
    match report.command.as_str() {
        "minimax" => verify_minimax(&mut c, p, &load_matrix::<T>(inputs)?.0, &tol)?,
        "convexity" => verify_convexity(&mut c, report.verdict, p, &load_matrix::<T>(inputs)?.0, &tol)?,
        "konig" => verify_konig(&mut c, report.verdict, p, &load_instance::<T>(inputs)?, &tol)?,
        "mazur-orlicz" => verify_mazur_orlicz(&mut c, p, &load_points::<T>(inputs)?, &tol)?,
        "fritz-john" | "kkt" => verify_multipliers(&mut c, report.verdict, p, &load_instance::<T>(inputs)?, &tol)?,
        "saddle" => {
            let inst = load_instance::<T>(inputs)?;
            let s = check_saddle(&inst, &scalars_at::<T>(p, "phi")?, &tol)?;
            c.check("saddle verdict", Verdict::holds(s.is_saddle()) == report.verdict, format!("recomputed is_saddle = {}", s.is_saddle()));
        }
        "slater" => {
            let inst = load_instance::<T>(inputs)?;
            verify_slater(&mut c, p, &inst, &tol)?;
            c.check("slater verdict", Verdict::holds(bool_at(p, "strong_holds")?) == report.verdict, String::new());
        }
        "study" => verify_study(&mut c, report.verdict, p, &tol)?,
        other => return Err(CliError::Input(format!("cannot verify a `{other}` report"))),
    }
    let payload = json!({
        "checked_command": report.command,
        "checked_verdict": report.verdict,
        "checks": c.items,
    });
    Ok(Report::new("verify", Verdict::holds(c.ok), payload, &tol))
}

fn close<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

fn row_max<T: Scalar>(a: &Matrix<T>, mu: &[T]) -> T {
    argmax(&a.mul_vec(mu)).expect("rows").1
}

fn col_min<T: Scalar>(a: &Matrix<T>, phi: &[T]) -> T {
    argmin(&a.vec_mul(phi)).expect("columns").1
}

fn dims(c: &mut Checks, name: &str, found: usize, expected: usize) -> bool {
    let ok = found == expected;
    c.check(name, ok, format!("{found} entries, expected {expected}"));
    ok
}

fn verify_minimax<T: Scalar>(c: &mut Checks, p: &Value, a: &Matrix<T>, tol: &T) -> Result<(), CliError> {
    let mu = simplex_at::<T>(p, "mu")?;
    let phi = simplex_at::<T>(p, "phi")?;
    let v_mixed: T = scalar_at(p, "v_mixed")?;
    let v_pure_claim: T = scalar_at(p, "v_pure")?;
    if !dims(c, "mu dimension", mu.dim(), a.n_cols()) || !dims(c, "phi dimension", phi.dim(), a.n_rows()) {
        return Ok(());
    }
    let upper = row_max(a, mu.weights());
    let lower = col_min(a, phi.weights());
    c.check("mu attains v_mixed", upper <= v_mixed.clone() + tol.clone(), format!("max_λ (Aμ)_λ = {}", upper.render()));
    c.check("phi certifies v_mixed", lower >= v_mixed.clone() - tol.clone(), format!("min_j (φᵀA)_j = {}", lower.render()));
    let (pure, _) = v_pure(a);
    c.check("v_pure", close(&pure, &v_pure_claim, tol), format!("recomputed {}", pure.render()));
    let equal = v_mixed >= pure - tol.clone();
    c.check("equal flag", bool_at(p, "equal")? == equal, format!("recomputed {equal}"));
    Ok(())
}

fn check_witness<T: Scalar>(c: &mut Checks, a: &Matrix<T>, w: &Value, tol: &T) -> Result<(), CliError> {
    let w = witness_from_json::<T>(w)?;
    let in_range = w.support.iter().all(|&j| j < a.n_cols()) && w.support.len() == w.weights.dim();
    c.check("witness support", in_range, format!("{} points", w.support.len()));
    if !in_range {
        return Ok(());
    }
    let (rhs, gap) = recheck_witness(a, &w)?;
    c.check("witness gap positive", gap > *tol, format!("recomputed gap {}", gap.render()));
    c.check("witness gap matches", close(&gap, &w.gap, tol), format!("reported {}", w.gap.render()));
    c.check("witness rhs matches", close(&rhs, &w.rhs, tol), format!("recomputed {}", rhs.render()));
    Ok(())
}

fn verify_convexity<T: Scalar>(c: &mut Checks, verdict: Verdict, p: &Value, a: &Matrix<T>, tol: &T) -> Result<(), CliError> {
    let (pure, _) = v_pure(a);
    let claim: T = scalar_at(p, "v_pure")?;
    c.check("v_pure", close(&pure, &claim, tol), format!("recomputed {}", pure.render()));
    match str_at(p, "kind")? {
        "witness" => {
            c.check("verdict", verdict == Verdict::Witness, String::new());
            check_witness(c, a, field(p, "witness")?, tol)?;
        }
        "convex_on_sample" => {
            c.check("verdict", verdict == Verdict::Convex, String::new());
            let phi = simplex_at::<T>(p, "functional")?;
            if dims(c, "functional dimension", phi.dim(), a.n_rows()) {
                let lower = col_min(a, phi.weights());
                c.check(
                    "functional bounds every mixture",
                    lower >= pure - tol.clone(),
                    format!("min_j (φᵀA)_j = {}", lower.render()),
                );
            }
        }
        other => return Err(CliError::Input(format!("unknown convexity kind `{other}`"))),
    }
    Ok(())
}

fn shifted<T: Scalar>(inst: &ProgramInstance<T>) -> Result<Matrix<T>, CliError> {
    let f = inst.objective();
    let rows = inst
        .constraints()
        .rows()
        .iter()
        .map(|r| r.iter().zip(f).map(|(g, fx)| g.clone() - fx.clone()).collect())
        .collect();
    Ok(Matrix::new(rows)?)
}

fn verify_konig<T: Scalar>(c: &mut Checks, verdict: Verdict, p: &Value, inst: &ProgramInstance<T>, tol: &T) -> Result<(), CliError> {
    let alpha: T = scalar_at(p, "alpha")?;
    match str_at(p, "outcome")? {
        "functional" => {
            c.check("verdict", verdict == Verdict::Certificate, String::new());
            let phi = simplex_at::<T>(p, "phi")?;
            if dims(c, "phi dimension", phi.dim(), inst.n_constraints()) {
                let r = functional_residual(inst.objective(), inst.constraints(), &alpha, phi.weights())?;
                c.check("f + alpha <= Φ(g)", r <= *tol, format!("worst residual {}", r.render()));
            }
        }
        "witness" => {
            c.check("verdict", verdict == Verdict::Witness, String::new());
            check_witness(c, &shifted(inst)?, field(p, "witness")?, tol)?;
        }
        other => return Err(CliError::Input(format!("unknown konig outcome `{other}`"))),
    }
    Ok(())
}

fn verify_mazur_orlicz<T: Scalar>(c: &mut Checks, p: &Value, points: &[Vec<T>], tol: &T) -> Result<(), CliError> {
    let a = Matrix::from_columns(points)?;
    let phi = simplex_at::<T>(p, "phi")?;
    let mixture = simplex_at::<T>(p, "mixture")?;
    let value: T = scalar_at(p, "value")?;
    if !dims(c, "phi dimension", phi.dim(), a.n_rows()) || !dims(c, "mixture dimension", mixture.dim(), a.n_cols()) {
        return Ok(());
    }
    let lower = col_min(&a, phi.weights());
    let upper = row_max(&a, mixture.weights());
    c.check("Φ >= value on the hull", lower >= value.clone() - tol.clone(), format!("min_j Φ(p_j) = {}", lower.render()));
    c.check("max-coordinate attains value", upper <= value + tol.clone(), format!("max-coordinate of mixture = {}", upper.render()));
    Ok(())
}

fn verify_certificate<T: Scalar>(c: &mut Checks, cert: &Value, inst: &ProgramInstance<T>, tol: &T) -> Result<(), CliError> {
    let rho: T = scalar_at(cert, "rho")?;
    let phi: Vec<T> = scalars_at(cert, "phi")?;
    if !dims(c, "phi dimension", phi.len(), inst.n_constraints()) {
        return Ok(());
    }
    let nonneg = !rho.is_negative() && phi.iter().all(|v| !v.is_negative());
    c.check("nonnegative", nonneg, String::new());
    if !nonneg {
        return Ok(());
    }
    let total = phi.iter().fold(rho.clone(), |acc, v| acc + v.clone());
    c.check("rho + Σphi = 1", close(&total, &T::one(), tol), format!("sum {}", total.render()));
    let (lag, comp) = certificate_residuals(inst, &rho, &phi)?;
    c.check("rho(f - f(x0)) + φᵀg >= 0", lag <= *tol, format!("residual {}", lag.render()));
    c.check("φᵀg(x0) = 0", comp <= *tol, format!("residual {}", comp.render()));
    if let Some(mult) = cert.get("kkt_multiplier").filter(|v| !v.is_null()) {
        c.check("rho > tol", rho > *tol, format!("rho = {}", rho.render()));
        let mult: Vec<T> = scalars_at(&json!({ "m": mult }), "m")?;
        let scaled = mult.len() == phi.len()
            && mult.iter().zip(&phi).all(|(m, v)| close(&(m.clone() * rho.clone()), v, tol));
        c.check("kkt multiplier = φ / rho", scaled, String::new());
        if scaled {
            let s = check_saddle(inst, &mult, tol)?;
            c.check("kkt multiplier is a saddle", s.is_saddle(), format!("worst violation {}", s.worst_violation.render()));
        }
    }
    Ok(())
}

fn verify_multipliers<T: Scalar>(c: &mut Checks, verdict: Verdict, p: &Value, inst: &ProgramInstance<T>, tol: &T) -> Result<(), CliError> {
    let x0 = index_at(p, "x0_index")?;
    c.check("x0 matches instance", inst.x0_index() == Some(x0), format!("report x0 {x0}"));
    match str_at(p, "outcome")? {
        "certificate" => {
            c.check("verdict", verdict == Verdict::Certificate, String::new());
            verify_certificate(c, field(p, "certificate")?, inst, tol)?;
        }
        "witness" => {
            c.check("verdict", verdict == Verdict::Witness, String::new());
            check_witness(c, &combined_family(inst)?, field(p, "witness")?, tol)?;
        }
        other => return Err(CliError::Input(format!("unknown outcome `{other}`"))),
    }
    if let Some(s) = p.get("slater") {
        verify_slater(c, s, inst, tol)?;
    }
    Ok(())
}

fn verify_slater<T: Scalar>(c: &mut Checks, s: &Value, inst: &ProgramInstance<T>, tol: &T) -> Result<(), CliError> {
    let fresh = slater_check(inst, tol);
    let margin: T = scalar_at(s, "strong_margin")?;
    c.check("slater margin", close(&fresh.strong_margin, &margin, tol), format!("recomputed {}", fresh.strong_margin.render()));
    c.check("strong slater", bool_at(s, "strong_holds")? == fresh.strong_holds, format!("recomputed {}", fresh.strong_holds));
    c.check("weak slater", bool_at(s, "weak_holds")? == fresh.weak_holds, format!("recomputed {}", fresh.weak_holds));
    Ok(())
}

fn verify_study<T: Scalar>(c: &mut Checks, verdict: Verdict, p: &Value, tol: &T) -> Result<(), CliError> {
    let grid: Vec<T> = scalars_at(p, "grid")?;
    let rows = field(p, "rows")?
        .as_array()
        .ok_or_else(|| CliError::Input("rows: expected array".into()))?;
    let mut values: Vec<T> = Vec::new();
    for row in rows {
        let n = index_at(row, "n")?;
        let inst = generate_paper_example(n, &grid)?;
        verify_slater(c, field(row, "slater")?, &inst, tol)?;
        let v_mixed: T = scalar_at(row, "v_mixed")?;
        let fj = field(row, "fritz_john")?;
        match str_at(fj, "outcome")? {
            "witness" => {
                let family = combined_family(&inst)?;
                check_witness(c, &family, field(fj, "witness")?, tol)?;
                let w = witness_from_json::<T>(field(fj, "witness")?)?;
                c.check(
                    "v_mixed below witness rhs",
                    v_mixed <= w.rhs.clone() + tol.clone(),
                    format!("N = {n}"),
                );
            }
            "certificate" => verify_certificate(c, field(fj, "certificate")?, &inst, tol)?,
            other => return Err(CliError::Input(format!("unknown outcome `{other}`"))),
        }
        values.push(v_mixed);
    }
    let negative = values.iter().all(|v| *v < -tol.clone());
    let monotone = values.windows(2).all(|w| w[1] >= w[0].clone() - tol.clone());
    let trend = negative && monotone;
    c.check("trend flag", bool_at(p, "trend_holds")? == trend, format!("recomputed {trend}"));
    c.check("study verdict", Verdict::holds(trend) == verdict, String::new());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{execute, Cli};
    use super::*;
    use clap::Parser;

    fn run(args: &[&str]) -> Report {
        let mut argv = vec!["infsup"];
        argv.extend_from_slice(args);
        execute(&Cli::try_parse_from(argv).unwrap()).unwrap()
    }

    fn verify(saved: &Report, args: &[&str]) -> Report {
        let mut argv = vec!["infsup", "verify", "--report", "unused"];
        argv.extend_from_slice(args);
        let cli = Cli::try_parse_from(argv).unwrap();
        verify_report(saved, &cli.inputs).unwrap()
    }

    #[test]
    fn every_command_verifies() {
        let cases: &[&[&str]] = &[
            &["minimax", "--example", "paper", "--n", "3"],
            &["convexity", "--example", "paper", "--n", "2"],
            &["convexity", "--example", "convex"],
            &["konig", "--example", "convex", "--alpha", "-20"],
            &["mazur-orlicz", "--example", "convex"],
            &["fritz-john", "--example", "convex"],
            &["fritz-john", "--example", "paper", "--n", "2"],
            &["kkt", "--example", "convex"],
            &["kkt", "--example", "paper", "--n", "8"],
            &["saddle", "--example", "convex", "--phi", "2"],
            &["slater", "--example", "paper"],
            &["study"],
        ];
        for exact in [false, true] {
            for case in cases {
                let mut args: Vec<&str> = case.to_vec();
                if exact {
                    args.insert(0, "--exact");
                }
                let saved = run(&args);
                let source: Vec<&str> = args.iter().copied().filter(|a| *a != "--exact").skip(1).collect();
                let source: Vec<&str> = strip_command_flags(&source);
                let v = verify(&saved, &source);
                assert_eq!(v.verdict, Verdict::Holds, "{args:?}: {}", v.to_json_string());
            }
        }
    }

    fn strip_command_flags<'a>(args: &[&'a str]) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < args.len() {
            if matches!(args[i], "--alpha" | "--phi" | "--ns") {
                i += 2;
                continue;
            }
            out.push(args[i]);
            i += 1;
        }
        out
    }

    #[test]
    fn tampered_witness_fails() {
        let mut saved = run(&["--exact", "fritz-john", "--example", "paper", "--n", "2"]);
        saved.payload["witness"]["gap"] = json!("5");
        let v = verify(&saved, &["--example", "paper", "--n", "2"]);
        assert_eq!(v.verdict, Verdict::Fails);
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut saved = run(&["--exact", "fritz-john", "--example", "convex"]);
        saved.payload["certificate"]["rho"] = json!("0");
        saved.payload["certificate"]["phi"] = json!(["1"]);
        let v = verify(&saved, &["--example", "convex"]);
        assert_eq!(v.verdict, Verdict::Fails);
    }
}
