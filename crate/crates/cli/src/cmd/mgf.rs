use std::path::Path;

use gaussconv::gauss::SeededStream;
use gaussconv::mgf::{
    chernoff_lower_tail_check, lambda_profile, mgf_upper_bound_check, strict_convexity_gap, LambdaProfile,
    Orientation, ScalarDistribution, TailRow,
};
use gaussconv::oracle::builtin;
use serde::Deserialize;
use serde_json::json;

use crate::input::{load, DistributionInput, GridInput};
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Closed-form agreement and convexity tolerance for Λ.
pub const DEFAULT_TOL: f64 = 1e-7;
const FLATNESS_TOL: f64 = 1e-9;
const MIN_GAP: f64 = 1e-3;
const DEFAULT_GRID: GridInput = GridInput { start: -2.0, stop: 0.4, step: 0.05 };
const TAIL_T: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    #[serde(rename = "version")]
    _version: Option<u32>,
    distribution: DistributionInput,
    grid: Option<GridInput>,
    orientation: Option<String>,
    chord: Option<ChordInput>,
    tail_t: Option<Vec<f64>>,
    mgf_lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChordInput {
    p0: f64,
    p1: f64,
    interior: Vec<f64>,
}

fn lambda_table(name: &str, profile: &LambdaProfile, reference: Option<&dyn Fn(f64) -> f64>) -> Table {
    let mut t = Table::new(name, &["p", "lambda", "second_diff", "reference"]);
    for ((p, l), d) in profile.grid.iter().zip(&profile.values).zip(&profile.second_differences) {
        t.push(vec![(*p).into(), (*l).into(), (*d).into(), reference.map(|f| f(*p)).into()]);
    }
    t
}

fn tail_table(name: &str, rows: &[TailRow]) -> Table {
    let mut t = Table::new(name, &["t", "empirical", "stderr", "bound", "holds"]);
    for r in rows {
        t.push(vec![r.t.into(), r.empirical.into(), r.stderr.into(), r.bound.into(), r.holds.into()]);
    }
    t
}

fn square_lambda(p: f64) -> f64 {
    if p.abs() < 1e-12 {
        1.0
    } else {
        -(-2.0 * p).ln_1p() / (2.0 * p)
    }
}

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match input {
        Some(path) => run_input(ctx, load(super::MGF, path)?),
        None => run_builtin(ctx),
    }
}

fn run_builtin(ctx: &Context) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::MGF, tol);
    let grid = DEFAULT_GRID.points()?;

    // Z² has Λ(p) = −log(1 − 2p)/(2p) and is a convex image of γ₁
    let square = ScalarDistribution::pushforward(builtin::square())?;
    let prof = lambda_profile(&square, &grid)?;
    let err = prof
        .grid
        .iter()
        .zip(&prof.values)
        .map(|(p, l)| (l - square_lambda(*p)).abs())
        .fold(0.0, f64::max);
    r.check(Check::le("square.lambda_closed_form", err, tol));
    r.check(Check::ge("square.min_second_difference", prof.min_second_difference().unwrap_or(f64::NAN), -tol));
    r.tables.push(lambda_table("lambda_square", &prof, Some(&square_lambda)));

    let gauss = ScalarDistribution::gaussian(0.0, 1.0)?;
    let gprof = lambda_profile(&gauss, &grid)?;
    let flat = gprof.max_abs_second_difference().unwrap_or(f64::NAN);
    r.check(Check::le("gaussian.max_abs_second_difference", flat, FLATNESS_TOL));
    r.tables.push(lambda_table("lambda_gaussian", &gprof, Some(&|p| 0.5 * p)));

    let gap = strict_convexity_gap(&square, -1.5, -0.5, &[-1.0], Orientation::Convex)?;
    r.check(Check::ge("square.strict_gap_at_-1", gap[0].gap, MIN_GAP));

    let tails = chernoff_lower_tail_check(&square, &TAIL_T, SeededStream::with_stream(ctx.seed, 1), ctx.samples)?;
    for row in &tails {
        r.check(Check::flag(format!("square.lower_tail_t={}", row.t), row.holds));
    }
    r.tables.push(tail_table("tail_square", &tails));

    let mut bounds = Vec::new();
    for lambda in [-2.0, -1.0, -0.5, -0.1] {
        let b = mgf_upper_bound_check(&square, lambda, 1e-12)?;
        r.check(Check::le(format!("square.mgf_bound_lambda={lambda}"), b.lhs, b.rhs * (1.0 + 1e-12)));
        bounds.push(b);
    }

    r.summary = json!({
        "square": {
            "max_closed_form_error": err,
            "min_second_difference": prof.min_second_difference(),
            "gap_at_-1": gap[0],
            "mgf_bounds": bounds,
        },
        "gaussian": { "max_abs_second_difference": flat },
    });
    Ok(r)
}

fn run_input(ctx: &Context, input: Input) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::MGF, tol);
    let dist = input.distribution.build()?;
    let grid = input.grid.unwrap_or(DEFAULT_GRID).points()?;
    let orientation = match input.orientation.as_deref() {
        Some("concave") => Orientation::Concave,
        _ => Orientation::Convex,
    };

    let prof = lambda_profile(&dist, &grid)?;
    r.check(Check::flag("lambda.finite_set_is_interval", prof.finite_set_is_interval()));
    match orientation {
        Orientation::Convex => r.check(Check::ge(
            "lambda.min_second_difference",
            prof.min_second_difference().unwrap_or(f64::NAN),
            -tol,
        )),
        Orientation::Concave => r.check(Check::le(
            "lambda.max_second_difference",
            prof.max_second_difference().unwrap_or(f64::NAN),
            tol,
        )),
    }
    r.tables.push(lambda_table("lambda", &prof, None));

    let mut summary = json!({ "kind": dist.kind(), "moments": dist.moments() });
    if let Some(c) = &input.chord {
        let gaps = strict_convexity_gap(&dist, c.p0, c.p1, &c.interior, orientation)?;
        let mut t = Table::new("gap", &["p", "lambda", "chord", "gap"]);
        for g in &gaps {
            r.check(Check::ge(format!("gap.p={}", g.p), g.gap, -tol));
            t.push(vec![g.p.into(), g.lambda.into(), g.chord.into(), g.gap.into()]);
        }
        r.tables.push(t);
        summary["gaps"] = json!(gaps);
    }
    if let Some(ts) = &input.tail_t {
        let rows = chernoff_lower_tail_check(&dist, ts, SeededStream::with_stream(ctx.seed, 1), ctx.samples)?;
        for row in &rows {
            r.check(Check::flag(format!("lower_tail.t={}", row.t), row.holds));
        }
        r.tables.push(tail_table("tail", &rows));
    }
    if let Some(ls) = &input.mgf_lambdas {
        let mut bounds = Vec::new();
        for &l in ls {
            let b = mgf_upper_bound_check(&dist, l, tol)?;
            r.check(Check::flag(format!("mgf_bound.lambda={l}"), b.holds));
            bounds.push(b);
        }
        summary["mgf_bounds"] = json!(bounds);
    }
    r.summary = summary;
    Ok(r)
}
