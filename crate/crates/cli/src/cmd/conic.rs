use std::path::Path;

use gaussconv::conic::{
    moreau_probe, orthant_volumes, sq_norm_midpoint_gap, ConeSpec, ConicProfile, ConicSamples, ConicTailRow,
    MgfIdentityRow, PolyhedralCone,
};
use gaussconv::gauss::SeededStream;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;
use serde_json::json;

use crate::input::load;
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Largest allowed |v̂ₖ − vₖ| against a closed-form profile.
pub const DEFAULT_TOL: f64 = 0.01;
const ETAS: [f64; 3] = [-1.0, -0.5, 0.5];
const TAIL_T: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
const MOREAU_PAIRS: usize = 1000;
const MOREAU_TOL: f64 = 1e-8;
const MIDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    #[serde(rename = "version")]
    _version: Option<u32>,
    n: usize,
    generators: Option<Vec<Vec<f64>>>,
    halfspaces: Option<Vec<Vec<f64>>>,
    etas: Option<Vec<f64>>,
    tail_t: Option<Vec<f64>>,
}

fn profile_table(name: &str, p: &ConicProfile, reference: Option<&[f64]>) -> Table {
    let mut t = Table::new(name, &["k", "v_k", "stderr", "reference"]);
    for (k, (v, s)) in p.v.iter().zip(&p.v_stderr).enumerate() {
        t.push(vec![k.into(), (*v).into(), (*s).into(), reference.map(|r| r[k]).into()]);
    }
    t
}

fn mgf_table(rows: &[MgfIdentityRow], closed: Option<&dyn Fn(f64) -> f64>) -> Table {
    let mut t = Table::new(
        "mgf_identity",
        &["eta", "xi", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "rhs_direct", "closed_form", "holds"],
    );
    for r in rows {
        t.push(vec![
            r.eta.into(),
            r.xi.into(),
            r.lhs.into(),
            r.lhs_stderr.into(),
            r.rhs.into(),
            r.rhs_stderr.into(),
            r.rhs_direct.into(),
            closed.map(|f| f(r.eta)).into(),
            r.holds.into(),
        ]);
    }
    t
}

fn tail_table(rows: &[ConicTailRow]) -> Table {
    let mut t = Table::new(
        "tails",
        &["t", "lower", "lower_bound", "upper", "upper_bound", "two_sided", "two_sided_bound", "holds"],
    );
    for r in rows {
        t.push(vec![
            r.t.into(),
            r.lower.into(),
            r.lower_bound.into(),
            r.upper.into(),
            r.upper_bound.into(),
            r.two_sided.into(),
            r.two_sided_bound.into(),
            r.holds.into(),
        ]);
    }
    t
}

/// Checks shared by built-in and user cones on one batch of draws.
fn profile_checks(
    r: &mut ModuleReport,
    name: &str,
    draws: &ConicSamples,
    t_grid: &[f64],
) -> Result<(ConicProfile, Vec<ConicTailRow>), CliError> {
    let p = draws.profile();
    r.check(Check::le(format!("{name}.total_mass_error"), (p.total_mass() - 1.0).abs(), 1e-12));
    r.check(Check::flag(format!("{name}.delta_estimators_agree"), p.delta_estimators_agree));
    let vi = draws.variance_identity();
    r.check(Check::le(format!("{name}.variance_identity"), (vi.var_v - vi.rhs).abs(), 3.0 * vi.stderr));
    let tails = draws.tail_bounds(t_grid)?;
    for row in &tails {
        r.check(Check::flag(format!("{name}.tail_t={}", row.t), row.holds));
    }
    Ok((p, tails))
}

fn moreau_suite(r: &mut ModuleReport, stream: SeededStream) -> Result<serde_json::Value, CliError> {
    let mut rng = stream.rng();
    let (mut worst_res, mut worst_mid) = (0.0f64, f64::NEG_INFINITY);
    let (mut bad_res, mut bad_mid) = (0usize, 0usize);
    for i in 0..MOREAU_PAIRS {
        let n = 2 + i % 5;
        let m = n + 1 + i % 4;
        let sub = stream.fork(1000 + i as u64);
        let cone = if i % 2 == 0 {
            PolyhedralCone::random_pointed(n, m, sub)?
        } else {
            PolyhedralCone::random_general(n, m, sub)?
        };
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let res = moreau_probe(&cone, &x)?.residual;
        let mid = sq_norm_midpoint_gap(&cone, &x, &y)?;
        worst_res = worst_res.max(res);
        worst_mid = worst_mid.max(mid);
        bad_res += usize::from(res > MOREAU_TOL);
        bad_mid += usize::from(mid > MIDPOINT_TOL);
    }
    r.check(Check::le("moreau.violations", bad_res as f64, 0.0));
    r.check(Check::le("sq_norm_midpoint.violations", bad_mid as f64, 0.0));
    Ok(json!({
        "pairs": MOREAU_PAIRS,
        "max_residual": worst_res,
        "max_midpoint_gap": worst_mid,
        "residual_violations": bad_res,
        "midpoint_violations": bad_mid,
    }))
}

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match input {
        Some(path) => run_input(ctx, load(super::CONIC, path)?),
        None => run_builtin(ctx),
    }
}

fn run_builtin(ctx: &Context) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::CONIC, tol);

    // ℝ₊¹⁰: V ~ Binomial(10, ½), δ = 5 and var(V) + 2 max(δ, n − δ) = 5n/4
    let n = 10;
    let orthant = PolyhedralCone::orthant(n)?;
    let draws = ConicSamples::draw(&orthant, ctx.samples, SeededStream::with_stream(ctx.seed, 1))?;
    let (p, tails) = profile_checks(&mut r, "orthant10", &draws, &TAIL_T)?;
    let reference = orthant_volumes(n);
    let maxdev = p.v.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.check(Check::le("orthant10.max_profile_error", maxdev, tol));
    r.check(Check::within("orthant10.delta", p.delta, 4.9, 5.1));
    let proxy = p.var_v + 2.0 * p.delta.max(n as f64 - p.delta);
    r.check(Check::within("orthant10.variance_proxy", proxy, 0.95 * 12.5, 1.05 * 12.5));
    r.tables.push(profile_table("profile_orthant10", &p, Some(&reference)));
    r.tables.push(tail_table(&tails));

    // 𝔼e^{ηV} = ((1 + e^η)/2)ⁿ on ℝ₊⁶. The tilted estimator is heavy-tailed
    // at η = −1, so this fixture gets ten times the sample budget.
    let six = PolyhedralCone::orthant(6)?;
    let rows = ConicSamples::draw(&six, 10 * ctx.samples, SeededStream::with_stream(ctx.seed, 2))?.mgf_identity(&ETAS);
    let closed = |eta: f64| (0.5 * (1.0 + eta.exp())).powi(6);
    for row in &rows {
        r.check(Check::flag(format!("orthant6.mgf_identity_eta={}", row.eta), row.holds));
        let rel = (row.rhs / closed(row.eta) - 1.0).abs();
        r.check(Check::le(format!("orthant6.mgf_closed_form_eta={}", row.eta), rel, 0.01));
    }
    r.tables.push(mgf_table(&rows, Some(&closed)));

    let moreau = moreau_suite(&mut r, SeededStream::with_stream(ctx.seed, 3))?;

    // vₖ(C°) = v_{n−k}(C) and δ(C) + δ(C°) = n
    let cone = PolyhedralCone::random_pointed(4, 6, SeededStream::with_stream(ctx.seed, 4))?;
    let polar = cone.dual_cone()?;
    let pc = ConicSamples::draw(&cone, ctx.samples, SeededStream::with_stream(ctx.seed, 5))?.profile();
    let pp = ConicSamples::draw(&polar, ctx.samples, SeededStream::with_stream(ctx.seed, 6))?.profile();
    let mut dual = Table::new("duality", &["k", "v_k_polar", "v_4_minus_k", "diff", "combined_stderr"]);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..=4 {
        let (a, b) = (pp.v[k], pc.v[4 - k]);
        let se = (pp.v_stderr[k].powi(2) + pc.v_stderr[4 - k].powi(2)).sqrt();
        worst = worst.max((a - b).abs() - 3.0 * se);
        dual.push(vec![k.into(), a.into(), b.into(), (a - b).into(), se.into()]);
    }
    r.check(Check::le("duality.profile_excess_over_3se", worst, 0.0));
    let dse = (pc.delta_stderr.powi(2) + pp.delta_stderr.powi(2)).sqrt();
    r.check(Check::le("duality.delta_sum", (pc.delta + pp.delta - 4.0).abs(), 3.0 * dse));
    r.tables.push(dual);

    r.summary = json!({
        "orthant10": {
            "profile": p.summary(),
            "max_profile_error": maxdev,
            "variance_proxy": proxy,
            "delta_stderr": p.delta_stderr,
            "samples": p.samples,
            "warnings": p.warnings,
        },
        "orthant6_mgf": rows,
        "moreau": moreau,
        "duality": { "delta": pc.delta, "delta_polar": pp.delta, "cone": cone.to_spec() },
    });
    Ok(r)
}

fn run_input(ctx: &Context, input: Input) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::CONIC, tol);
    let spec = ConeSpec { n: input.n, generators: input.generators, halfspaces: input.halfspaces };
    let cone = PolyhedralCone::from_spec(&spec)?;
    let draws = ConicSamples::draw(&cone, ctx.samples, SeededStream::with_stream(ctx.seed, 1))?;
    let t_grid = input.tail_t.unwrap_or_else(|| TAIL_T.to_vec());
    let (p, tails) = profile_checks(&mut r, "input", &draws, &t_grid)?;
    let etas = input.etas.unwrap_or_else(|| ETAS.to_vec());
    let rows = draws.mgf_identity(&etas);
    for row in &rows {
        r.check(Check::flag(format!("input.mgf_identity_eta={}", row.eta), row.holds));
    }
    r.tables.push(profile_table("profile", &p, None));
    r.tables.push(tail_table(&tails));
    r.tables.push(mgf_table(&rows, None));
    r.summary = json!({
        "profile": p.summary(),
        "delta_stderr": p.delta_stderr,
        "var_sq": p.var_sq,
        "samples": p.samples,
        "flagged": p.flagged,
        "warnings": p.warnings,
    });
    Ok(r)
}
