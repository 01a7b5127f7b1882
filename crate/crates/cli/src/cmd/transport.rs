use std::path::Path;

use gaussconv::gauss::{std_normal_quantile, SeededStream};
use gaussconv::mgf::ScalarDistribution;
use gaussconv::oracle::builtin;
use gaussconv::transport::{
    concavity_test, convexity_test, exponential_adaptation_check, gaussian_transport_map, normality_screen,
    MonotoneMap,
};
use serde::Deserialize;
use serde_json::json;

use crate::input::{load, DistributionInput, GridInput};
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Agreement of Φ⁻¹(F(t)) with the survival route −Φ⁻¹(1 − F(t)).
pub const DEFAULT_TOL: f64 = 1e-9;
const POISSON_GRID: GridInput = GridInput { start: 0.0, stop: 4.0, step: 0.05 };

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    #[serde(rename = "version")]
    _version: Option<u32>,
    distribution: DistributionInput,
    grid: GridInput,
    expect: Option<String>,
}

fn map_table(name: &str, map: &MonotoneMap) -> Table {
    let mut t = Table::new(name, &["t", "T", "stderr", "second_diff"]);
    for (((g, v), s), d) in map.grid.iter().zip(&map.values).zip(&map.stderr).zip(map.second_differences()) {
        t.push(vec![(*g).into(), (*v).into(), (*s).into(), d.into()]);
    }
    t
}

/// 10³ interior points of (0.01, 10).
fn exponential_grid() -> Vec<f64> {
    (1..=1000).map(|i| 0.01 + (10.0 - 0.01) * i as f64 / 1001.0).collect()
}

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match input {
        Some(path) => run_input(ctx, load(super::TRANSPORT, path)?),
        None => run_builtin(ctx),
    }
}

fn run_builtin(ctx: &Context) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::TRANSPORT, tol);

    let exp = ScalarDistribution::exponential(1.0)?;
    let map = gaussian_transport_map(&exp, &exponential_grid())?;
    let conc = concavity_test(&map)?;
    r.check(Check::flag("exponential.concave", conc.passes));
    // T(t) = Φ⁻¹(1 − e^{−t}) = −Φ⁻¹(e^{−t})
    let mut cross = 0.0f64;
    for (t, v) in map.grid.iter().zip(&map.values) {
        cross = cross.max((v + std_normal_quantile((-t).exp())?).abs());
    }
    r.check(Check::le("exponential.survival_route_agreement", cross, tol));
    let screen = normality_screen(&exp, ctx.samples, SeededStream::with_stream(ctx.seed, 1))?;
    r.check(Check::flag("exponential.normality_screen", screen.passes));
    r.tables.push(map_table("map_exponential", &map));

    let poisson = ScalarDistribution::poisson(1.0)?;
    let set = ScalarDistribution::samples(poisson.sample(ctx.samples, SeededStream::with_stream(ctx.seed, 2))?)?;
    let pmap = gaussian_transport_map(&set, &POISSON_GRID.points()?)?;
    let pconc = concavity_test(&pmap)?;
    r.check(
        Check::flag("poisson_samples.concavity_rejected", !pconc.passes && pconc.witness.is_some())
            .note("a lattice law is not a convex image of a Gaussian"),
    );
    r.tables.push(map_table("map_poisson_samples", &pmap));

    let sum = builtin::sum(3);
    let adapt = exponential_adaptation_check(&sum, &[0.5, 1.0, 1.5], ctx.samples, SeededStream::with_stream(ctx.seed, 3))?;
    for row in &adapt.rows {
        r.check(Check::flag(format!("exp_adaptation_sum3.lower_tail_t={}", row.t), row.holds));
    }

    r.summary = json!({
        "exponential": { "concavity": conc, "survival_route_max_diff": cross, "normality_screen": screen },
        "poisson_samples": { "concavity": pconc },
        "exp_adaptation_sum3": adapt,
    });
    Ok(r)
}

fn run_input(ctx: &Context, input: Input) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::TRANSPORT, tol);
    let dist = input.distribution.build()?;
    let map = gaussian_transport_map(&dist, &input.grid.points()?)?;
    let convex = input.expect.as_deref() == Some("convex");
    let rep = if convex { convexity_test(&map)? } else { concavity_test(&map)? };
    r.check(Check::flag(if convex { "map.convex" } else { "map.concave" }, rep.passes));
    r.tables.push(map_table("map", &map));
    r.summary = json!({ "kind": dist.kind(), "report": rep, "excluded": map.excluded });
    Ok(r)
}
