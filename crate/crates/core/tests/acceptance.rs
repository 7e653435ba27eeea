//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};

use infsup::instance::{combined_family, generate_convex_demo, generate_paper_example, ProgramInstance};
use infsup::konig::{
    check_infsup_convexity, functional_residual, konig_functional, recheck_witness, KonigOutcome, VerdictKind,
};
use infsup::lp::{minimax, pure_value, solve, verify_farkas, LpOutcome, LpProblem, Relation};
use infsup::multipliers::{
    certificate_residuals, check_saddle, fritz_john, kkt, lemma_value, slater_check, MultiplierOutcome,
};
use infsup::{Matrix, Rational, Scalar};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAPER_GRID: &str = "-2,-1,-0.5,0,0.5,1,2,10";
const NS: [usize; 4] = [1, 2, 4, 8];

type Criterion = fn() -> Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn to_f64(v: &Rational) -> f64 {
    ToPrimitive::to_f64(v).unwrap()
}

fn grid<T: Scalar>(text: &str) -> Vec<T> {
    infsup::instance::parse_grid(text).unwrap()
}

fn convex_grid<T: Scalar>() -> Vec<T> {
    (-12..=4).map(|k| T::from_i64(k) / T::from_i64(4)).collect()
}

fn random_rational_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<Rational>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| q(rng.gen_range(-8..=8), 4)).collect())
        .collect()
}

fn to_float_rows(rows: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

/// Random program whose sample has a feasible point; x0 is the first feasible
/// minimizer of the objective.
fn random_program(rng: &mut ChaCha8Rng) -> (Vec<Rational>, Vec<Vec<Rational>>, usize) {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(2..=7);
    let mut g = random_rational_matrix(rng, m, n);
    let anchor = rng.gen_range(0..n);
    for row in g.iter_mut() {
        if row[anchor] > Rational::zero() {
            row[anchor] = -row[anchor].clone();
        }
        if rng.gen_bool(0.3) {
            row[anchor] = Rational::zero();
        }
    }
    let f: Vec<Rational> = (0..n).map(|_| q(rng.gen_range(-8..=8), 4)).collect();
    let x0 = (0..n)
        .filter(|&j| g.iter().all(|r| r[j] <= Rational::zero()))
        .min_by(|&a, &b| f[a].cmp(&f[b]).then(a.cmp(&b)))
        .unwrap();
    (f, g, x0)
}

fn instance<T: Scalar>(f: &[T], g: &[Vec<T>], x0: usize) -> ProgramInstance<T> {
    ProgramInstance::new(None, None, f.to_vec(), g.to_vec(), Some(x0)).unwrap()
}

fn program_pair(f: &[Rational], g: &[Vec<Rational>], x0: usize) -> (ProgramInstance<Rational>, ProgramInstance<f64>) {
    let ff: Vec<f64> = f.iter().map(to_f64).collect();
    (instance(f, g, x0), instance(&ff, &to_float_rows(g), x0))
}

// 2x2 game value by the textbook formula.
fn closed_form_2x2(a: i64, b: i64, c: i64, d: i64) -> Rational {
    // rows are maximized, columns minimized
    let minmax = (a.max(c)).min(b.max(d));
    let maxmin = (a.min(b)).max(c.min(d));
    if minmax == maxmin {
        return q(minmax, 1);
    }
    q(a * d - b * c, a + d - b - c)
}

fn criterion_1() -> Result<String, String> {
    let vals = [-1i64, 0, 1];
    let mut count = 0;
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                for &d in &vals {
                    let oracle = closed_form_2x2(a, b, c, d);
                    let exact = Matrix::new(vec![vec![q(a, 1), q(b, 1)], vec![q(c, 1), q(d, 1)]]).unwrap();
                    let got = minimax(&exact, &Rational::zero()).map_err(|e| e.to_string())?.v_mixed;
                    if got != oracle {
                        return Err(format!("[[{a},{b}],[{c},{d}]]: exact {got} vs {oracle}"));
                    }
                    let float =
                        Matrix::new(vec![vec![a as f64, b as f64], vec![c as f64, d as f64]]).unwrap();
                    let got = minimax(&float, &1e-9).map_err(|e| e.to_string())?.v_mixed;
                    if (got - to_f64(&oracle)).abs() > 1e-9 {
                        return Err(format!("[[{a},{b}],[{c},{d}]]: float {got} vs {oracle}"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count}/81 matrices match the closed form (float within 1e-9, rational exactly)"))
}

fn criterion_2() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=8));
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect()).collect();
        let a = Matrix::new(rows).unwrap();
        let rep = minimax(&a, &1e-9).map_err(|e| format!("case {k}: {e}"))?;
        let excess = rep.v_mixed - rep.v_pure;
        worst = worst.max(excess);
        if excess > 1e-9 {
            return Err(format!("case {k}: v_mixed exceeds v_pure by {excess:e}"));
        }
    }
    Ok(format!("200/200 random games satisfy v_mixed <= v_pure + 1e-9 (max excess {worst:.3e})"))
}

fn criterion_3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = Rational::zero();
    let (mut functionals, mut witnesses) = (0, 0);
    for k in 0..100 {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=6);
        let g = Matrix::new(random_rational_matrix(&mut rng, m, n)).unwrap();
        let f: Vec<Rational> = (0..n).map(|_| q(rng.gen_range(-8..=8), 4)).collect();
        let family = Matrix::new(
            g.rows()
                .iter()
                .map(|r| r.iter().zip(&f).map(|(gv, fv)| gv - fv).collect())
                .collect(),
        )
        .unwrap();
        // largest alpha for which f + alpha <= max_λ g_λ holds on the sample
        let (alpha, _) = pure_value(&family);
        let verdict = check_infsup_convexity(&family, &tol).map_err(|e| format!("case {k}: {e}"))?;
        let outcome = konig_functional(&f, &g, &alpha, &tol).map_err(|e| format!("case {k}: {e}"))?;
        match (verdict.kind, outcome) {
            (VerdictKind::ConvexOnSample, KonigOutcome::Functional(phi)) => {
                let r = functional_residual(&f, &g, &alpha, phi.weights()).unwrap();
                if r > Rational::zero() {
                    return Err(format!("case {k}: functional residual {r}"));
                }
                functionals += 1;
            }
            (VerdictKind::Witness, KonigOutcome::Witness(w)) => {
                let (rhs, gap) = recheck_witness(&family, &w).unwrap();
                if rhs != w.rhs || gap != w.gap || gap <= Rational::zero() {
                    return Err(format!("case {k}: witness does not re-verify"));
                }
                witnesses += 1;
            }
            (kind, _) => return Err(format!("case {k}: convexity {kind:?} disagrees with the functional search")),
        }
    }
    Ok(format!("100/100 agree exactly ({functionals} functionals, {witnesses} witnesses), zero residuals"))
}

fn criterion_4() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut certs, mut witnesses) = (0, 0);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let (f, g, x0) = random_program(&mut rng);
        let (exact, float) = program_pair(&f, &g, x0);
        for_both_modes(&exact, &float, |kind, outcome_kind, residuals| {
            if kind != outcome_kind {
                return Err(format!("case {k}: fritz_john {outcome_kind:?} vs convexity {kind:?}"));
            }
            if let Some((lag, comp)) = residuals {
                worst = worst.max(lag).max(comp);
                if lag > 1e-8 || comp > 1e-8 {
                    return Err(format!("case {k}: residuals {lag:e} / {comp:e}"));
                }
            }
            Ok(())
        })?;
        match fritz_john(&exact, &Rational::zero()).map_err(|e| e.to_string())? {
            MultiplierOutcome::Certificate(_) => certs += 1,
            MultiplierOutcome::Witness(_) => witnesses += 1,
        }
    }
    Ok(format!(
        "100/100 fritz_john verdicts match convexity in both modes ({certs} certificates, {witnesses} witnesses), max residual {worst:.3e}"
    ))
}

/// Runs the Fritz John check on both scalar modes, reporting
/// (convexity verdict, fritz john verdict, residuals of a certificate).
fn for_both_modes(
    exact: &ProgramInstance<Rational>,
    float: &ProgramInstance<f64>,
    mut check: impl FnMut(VerdictKind, VerdictKind, Option<(f64, f64)>) -> Result<(), String>,
) -> Result<(), String> {
    let kind = check_infsup_convexity(&combined_family(exact).unwrap(), &Rational::zero())
        .map_err(|e| e.to_string())?
        .kind;
    match fritz_john(exact, &Rational::zero()).map_err(|e| e.to_string())? {
        MultiplierOutcome::Certificate(c) => {
            let (lag, comp) = certificate_residuals(exact, &c.rho, &c.phi).unwrap();
            check(kind, VerdictKind::ConvexOnSample, Some((to_f64(&lag), to_f64(&comp))))?;
        }
        MultiplierOutcome::Witness(_) => check(kind, VerdictKind::Witness, None)?,
    }
    let tol = 1e-9;
    let kind = check_infsup_convexity(&combined_family(float).unwrap(), &tol)
        .map_err(|e| e.to_string())?
        .kind;
    match fritz_john(float, &tol).map_err(|e| e.to_string())? {
        MultiplierOutcome::Certificate(c) => {
            let (lag, comp) = certificate_residuals(float, &c.rho, &c.phi).unwrap();
            check(kind, VerdictKind::ConvexOnSample, Some((lag, comp)))
        }
        MultiplierOutcome::Witness(_) => check(kind, VerdictKind::Witness, None),
    }
}

fn criterion_5() -> Result<String, String> {
    let mut details = Vec::new();
    {
        let inst = generate_convex_demo(&convex_grid::<Rational>()).unwrap();
        let tol = Rational::zero();
        let cert = match kkt(&inst, &tol).map_err(|e| e.to_string())? {
            MultiplierOutcome::Certificate(c) => c,
            MultiplierOutcome::Witness(_) => return Err("exact kkt returned a witness".into()),
        };
        let mult = cert.kkt_multiplier.clone().ok_or("missing kkt multiplier")?;
        if !check_saddle(&inst, &[q(2, 1)], &tol).unwrap().is_saddle() {
            return Err("Φ0 = 2 is not a saddle multiplier".into());
        }
        if !check_saddle(&inst, &mult, &tol).unwrap().is_saddle() {
            return Err(format!("returned multiplier {} is not a saddle", mult[0]));
        }
        details.push(format!("exact multiplier {}", mult[0]));
    }
    {
        let inst = generate_convex_demo(&convex_grid::<f64>()).unwrap();
        let tol = 1e-9;
        let cert = match kkt(&inst, &tol).map_err(|e| e.to_string())? {
            MultiplierOutcome::Certificate(c) => c,
            MultiplierOutcome::Witness(_) => return Err("float kkt returned a witness".into()),
        };
        let mult = cert.kkt_multiplier.ok_or("missing kkt multiplier")?;
        if !check_saddle(&inst, &[2.0], &tol).unwrap().is_saddle() || !check_saddle(&inst, &mult, &tol).unwrap().is_saddle() {
            return Err("float saddle check failed".into());
        }
        details.push(format!("float multiplier {:.6}", mult[0]));
    }
    let status = Command::new(env!("CARGO_BIN_EXE_infsup"))
        .args(["kkt", "--example", "convex"])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    if status.code() != Some(0) {
        return Err(format!("CLI exit code {:?}", status.code()));
    }
    Ok(format!("certificate found; Φ0 = 2 and returned multiplier are saddles ({}); CLI exit 0", details.join(", ")))
}

fn criterion_6() -> Result<String, String> {
    let tol = Rational::zero();
    let g = grid::<Rational>(PAPER_GRID);
    let mut values = Vec::new();
    for n in NS {
        let inst = generate_paper_example(n, &g).unwrap();
        let slater = slater_check(&inst, &tol);
        let expected = q(-1000, n as i64);
        if !slater.strong_holds || slater.strong_margin != expected {
            return Err(format!("N = {n}: Slater margin {} (expected {expected})", slater.strong_margin));
        }
        let float_inst = generate_paper_example(n, &grid::<f64>(PAPER_GRID)).unwrap();
        let float_margin = slater_check(&float_inst, &1e-9).strong_margin;
        if (float_margin - to_f64(&expected)).abs() > 1e-9 {
            return Err(format!("N = {n}: float Slater margin {float_margin}"));
        }
        let family = combined_family(&inst).unwrap();
        for (name, outcome) in [("fritz_john", fritz_john(&inst, &tol)), ("kkt", kkt(&inst, &tol))] {
            match outcome.map_err(|e| format!("N = {n}: {name}: {e}"))? {
                MultiplierOutcome::Witness(w) => {
                    let (_, gap) = recheck_witness(&family, &w).unwrap();
                    if gap <= Rational::zero() || gap != w.gap {
                        return Err(format!("N = {n}: {name} witness gap {gap} does not re-verify"));
                    }
                }
                MultiplierOutcome::Certificate(_) => return Err(format!("N = {n}: {name} returned a certificate")),
            }
        }
        let v = minimax(&family, &tol).map_err(|e| e.to_string())?.v_mixed;
        if v >= Rational::zero() {
            return Err(format!("N = {n}: v_mixed = {v} is not negative"));
        }
        values.push(v);
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err("v_mixed is not nondecreasing in N".into());
    }

    // N = 1: no (rho, phi) on the simplex makes rho (f - f(x0)) + phi g >= 0
    let inst = generate_paper_example(1, &grid::<f64>(PAPER_GRID)).unwrap();
    let x0 = inst.x0_index().unwrap();
    let f0 = inst.objective()[x0];
    let mut best = f64::NEG_INFINITY;
    for step in 0..=1000 {
        let rho = step as f64 * 1e-3;
        let phi = 1.0 - rho;
        let worst = (0..inst.n_points())
            .map(|j| rho * (inst.objective()[j] - f0) + phi * inst.constraints().get(0, j))
            .fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    }
    if best >= 0.0 {
        return Err(format!("brute-force scan found a multiplier pair (min value {best})"));
    }
    // the same feasibility system as an LP: Farkas-certified infeasible
    let exact = generate_paper_example(1, &g).unwrap();
    let f0 = exact.objective()[x0].clone();
    let mut lp = LpProblem::nonnegative(vec![Rational::zero(), Rational::zero()]).unwrap();
    for j in 0..exact.n_points() {
        let coeffs = vec![exact.objective()[j].clone() - f0.clone(), exact.constraints().get(0, j).clone()];
        lp.add_constraint(coeffs, Relation::Ge, Rational::zero()).unwrap();
    }
    lp.add_constraint(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1)).unwrap();
    match solve(&lp, &tol).map_err(|e| e.to_string())? {
        LpOutcome::Infeasible { farkas } => {
            if !verify_farkas(&lp, &farkas, &tol).unwrap() {
                return Err("Farkas certificate does not verify".into());
            }
        }
        other => return Err(format!("multiplier LP status {:?}", other.status())),
    }
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    Ok(format!(
        "N = 1,2,4,8: margins -1000/N, witnesses from fritz_john and kkt re-verify, v_mixed = [{}]; N = 1 scan best {best:.4} < 0 and LP Farkas-infeasible",
        shown.join(", ")
    ))
}

fn criterion_7() -> Result<String, String> {
    let demo = generate_convex_demo(&convex_grid::<Rational>()).unwrap();
    let (v, _) = lemma_value(&demo).map_err(|e| e.to_string())?;
    if !v.is_zero() {
        return Err(format!("convex demo lemma value {v}"));
    }
    for n in NS {
        let inst = generate_paper_example(n, &grid::<Rational>(PAPER_GRID)).unwrap();
        let (v, _) = lemma_value(&inst).map_err(|e| e.to_string())?;
        if !v.is_zero() {
            return Err(format!("N = {n}: lemma value {v}"));
        }
    }
    Ok("lemma value is exactly 0 on the convex demo and N = 1,2,4,8".into())
}

fn criterion_8() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let (f, g, x0) = random_program(&mut rng);
        let (exact, float) = program_pair(&f, &g, x0);
        let ve = check_infsup_convexity(&combined_family(&exact).unwrap(), &Rational::zero()).map_err(|e| e.to_string())?;
        let vf = check_infsup_convexity(&combined_family(&float).unwrap(), &1e-9).map_err(|e| e.to_string())?;
        if ve.kind != vf.kind {
            return Err(format!("case {k}: convexity {:?} vs {:?}", ve.kind, vf.kind));
        }
        for (name, a, b) in [("v_pure", &ve.v_pure, vf.v_pure), ("v_mixed", &ve.v_mixed, vf.v_mixed)] {
            let d = (to_f64(a) - b).abs();
            worst = worst.max(d);
            if d > 1e-9 {
                return Err(format!("case {k}: {name} differs by {d:e}"));
            }
        }
        let fe = matches!(fritz_john(&exact, &Rational::zero()).map_err(|e| e.to_string())?, MultiplierOutcome::Certificate(_));
        let ff = matches!(fritz_john(&float, &1e-9).map_err(|e| e.to_string())?, MultiplierOutcome::Certificate(_));
        if fe != ff {
            return Err(format!("case {k}: fritz_john certificate {fe} (exact) vs {ff} (float)"));
        }
        let se = slater_check(&exact, &Rational::zero()).strong_holds;
        let sf = slater_check(&float, &1e-9).strong_holds;
        if se != sf {
            return Err(format!("case {k}: Slater {se} vs {sf}"));
        }
    }
    Ok(format!("50/50 instances agree on convexity, Fritz John and Slater verdicts; max value difference {worst:.3e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("minimax matches the 2x2 closed form", criterion_1),
        ("weak duality v_mixed <= v_pure", criterion_2),
        ("functional exists iff infsup-convex", criterion_3),
        ("Fritz John certificate iff infsup-convex", criterion_4),
        ("KKT round trip on the convex demo", criterion_5),
        ("cubic family has no multiplier", criterion_6),
        ("lemma value is zero at the optimum", criterion_7),
        ("float and exact modes agree", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
