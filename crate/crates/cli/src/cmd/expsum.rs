use std::path::Path;

use gaussconv::expsum::{
    all_zeros, count_zeros, fit_two_zeros, positivity_check, rolle_check, sign_pattern_check, ExpSum, SignPattern,
    ZeroReport,
};
use gaussconv::gauss::SeededStream;
use rand::Rng;
use serde::Deserialize;
use serde_json::json;

use crate::input::load;
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Largest relative residual |Ψ(xⱼ)| accepted from a two-zero fit.
pub const DEFAULT_TOL: f64 = 1e-10;
const RANDOM_SUMS: usize = 1000;
const RANDOM_FITS: usize = 500;
const PROBES: usize = 1000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    #[serde(rename = "version")]
    _version: Option<u32>,
    p: Vec<f64>,
    c: Vec<f64>,
    interval: Option<[f64; 2]>,
}

fn root_rows(t: &mut Table, name: &str, z: &ZeroReport) {
    for root in &z.roots {
        t.push(vec![name.into(), root.x.into(), root.tangential.into()]);
    }
}

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match input {
        Some(path) => run_input(ctx, load(super::EXPSUM, path)?),
        None => run_builtin(ctx),
    }
}

fn sum(p: &[f64], c: &[f64]) -> Result<ExpSum, CliError> {
    Ok(ExpSum::new(p.to_vec(), c.to_vec())?)
}

fn run_builtin(ctx: &Context) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::EXPSUM, tol);
    let mut roots = Table::new("roots", &["instance", "x", "tangential"]);

    let simple = count_zeros(&sum(&[1.0, 2.0], &[1.0, -1.0])?, -5.0, 5.0)?;
    r.check(Check::flag("e^x-e^2x.one_zero_at_0", simple.count == 1 && simple.roots[0].x.abs() <= 1e-12));
    root_rows(&mut roots, "e^x-e^2x", &simple);

    let square = count_zeros(&sum(&[0.0, 1.0, 2.0], &[1.0, -2.0, 1.0])?, -5.0, 5.0)?;
    r.check(Check::flag(
        "(e^x-1)^2.one_tangential_zero",
        square.count == 1 && square.roots[0].tangential && square.roots[0].x.abs() <= 1e-9,
    ));
    root_rows(&mut roots, "(e^x-1)^2", &square);

    let cubic = all_zeros(&sum(&[0.0, 1.0, 2.0, 3.0], &[-6.0, 11.0, -6.0, 1.0])?)?;
    let want = [0.0, 2f64.ln(), 3f64.ln()];
    let err = cubic.roots.iter().zip(want).map(|(a, b)| (a.x - b).abs()).fold(0.0, f64::max);
    r.check(Check::flag("(e^x-1)(e^x-2)(e^x-3).three_zeros", cubic.count == 3));
    r.check(Check::le("(e^x-1)(e^x-2)(e^x-3).root_error", err, 1e-11));
    root_rows(&mut roots, "(e^x-1)(e^x-2)(e^x-3)", &cubic);

    let mut fits = Table::new("fits", &["p0", "p", "p1", "x0", "x1", "c0", "c1", "condition", "residual"]);
    let mut fit_row = |f: &gaussconv::expsum::TwoZeroFit| {
        let e = f.psi.exponents();
        let c = f.psi.coefficients();
        fits.push(vec![
            e[0].into(),
            e[1].into(),
            e[2].into(),
            f.x0.into(),
            f.x1.into(),
            c[0].into(),
            c[2].into(),
            f.condition.into(),
            f.residual.into(),
        ]);
    };
    let sym = fit_two_zeros(-1.0, 0.0, 1.0, -1.0, 1.0)?;
    let c = sym.psi.coefficients();
    let want = -1.0 / (1f64.exp() + (-1f64).exp());
    r.check(Check::le("fit_symmetric.coefficients", (c[0] - want).abs().max((c[2] - want).abs()), tol));
    fit_row(&sym);
    let unit = fit_two_zeros(0.0, 1.0, 2.0, 0.0, 1.0)?;
    r.check(Check::le("fit_0_1.residual", unit.residual, tol));
    r.check(Check::flag("fit_0_1.sign_pattern", sign_pattern_check(&unit.psi)?.passes()));
    fit_row(&unit);
    let near = fit_two_zeros(0.0, 1.0, 2.0, 0.3, 0.301)?;
    r.check(Check::le("fit_near_degenerate.residual", near.residual, tol));
    fit_row(&near);

    // randomized four-term sums: at most three zeros, Rolle gaps filled
    let mut rng = SeededStream::with_stream(ctx.seed, 1).rng();
    let (mut max_count, mut rolle_missing) = (0usize, 0usize);
    for _ in 0..RANDOM_SUMS {
        let mut p: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
        p.sort_by(f64::total_cmp);
        if p.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            p = vec![-1.5, -0.5, 0.5, 1.5];
        }
        let c: Vec<f64> = (0..4)
            .map(|_| {
                let v: f64 = rng.random_range(1e-6..1.0);
                if rng.random_bool(0.5) { v } else { -v }
            })
            .collect();
        let e = ExpSum::new(p, c)?;
        max_count = max_count.max(all_zeros(&e)?.count);
        rolle_missing += rolle_check(&e)?.gaps_without_critical_point;
    }
    r.check(Check::le("random_sums.max_zero_count", max_count as f64, 3.0));
    r.check(Check::le("random_sums.rolle_gaps_missing", rolle_missing as f64, 0.0));

    // randomized fits: c₀, c₁ < 0, {Ψ > 0} = (x₀, x₁), alternating signs
    let mut rng = SeededStream::with_stream(ctx.seed, 2).rng();
    let (mut negativity, mut positivity, mut pattern, mut residual) = (0usize, 0usize, 0usize, 0.0f64);
    for _ in 0..RANDOM_FITS {
        let mut p: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        p.sort_by(f64::total_cmp);
        if p.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            p = vec![-1.0, 0.0, 1.0];
        }
        let x0: f64 = rng.random_range(-3.0..3.0);
        let x1 = x0 + rng.random_range(0.05..3.0);
        let f = fit_two_zeros(p[0], p[1], p[2], x0, x1)?;
        let c = f.psi.coefficients();
        negativity += usize::from(!(c[0] < 0.0 && c[2] < 0.0));
        positivity += usize::from(positivity_check(&f, PROBES).violations > 0);
        pattern += usize::from(!sign_pattern_check(&f.psi)?.passes());
        residual = residual.max(f.residual);
    }
    r.check(Check::le("random_fits.negativity_violations", negativity as f64, 0.0));
    r.check(Check::le("random_fits.positivity_violations", positivity as f64, 0.0));
    r.check(Check::le("random_fits.sign_pattern_violations", pattern as f64, 0.0));
    r.check(Check::le("random_fits.max_residual", residual, tol));

    r.tables.push(roots);
    r.tables.push(fits);
    r.summary = json!({
        "random_sums": { "instances": RANDOM_SUMS, "max_zero_count": max_count, "rolle_gaps_missing": rolle_missing },
        "random_fits": {
            "instances": RANDOM_FITS,
            "negativity_violations": negativity,
            "positivity_violations": positivity,
            "sign_pattern_violations": pattern,
            "max_residual": residual,
        },
        "fit_0_1": { "condition": unit.condition, "pattern": sign_pattern_check(&unit.psi)? },
        "fit_near_degenerate": { "condition": near.condition },
    });
    Ok(r)
}

fn run_input(ctx: &Context, input: Input) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::EXPSUM, tol);
    let e = ExpSum::new(input.p, input.c)?;
    let z = match input.interval {
        Some([a, b]) => count_zeros(&e, a, b)?,
        None => all_zeros(&e)?,
    };
    r.check(Check::le("zero_count_bound", z.count as f64, e.order() as f64));
    let rolle = rolle_check(&e)?;
    r.check(Check::le("rolle_gaps_missing", rolle.gaps_without_critical_point as f64, 0.0));
    let pattern = sign_pattern_check(&e)?;
    if let SignPattern::Checked { alternating, sign_changes_at_roots, .. } = &pattern {
        r.check(Check::flag("sign_pattern.alternating", *alternating));
        r.check(Check::flag("sign_pattern.sign_changes_at_roots", *sign_changes_at_roots));
    }
    let mut roots = Table::new("roots", &["instance", "x", "tangential"]);
    root_rows(&mut roots, "input", &z);
    r.tables.push(roots);
    r.summary = json!({ "zeros": z, "rolle": rolle, "sign_pattern": pattern });
    Ok(r)
}
