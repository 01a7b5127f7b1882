use std::path::Path;

use gaussconv::gauss::SeededStream;
use gaussconv::oracle::ConvexFunctionOracle;
use gaussconv::renyi::{
    chain_check, comparison_check, ChainReport, divergence, fixtures, symmetry_check, McConfig, RelativeDensity,
};
use serde::Deserialize;
use serde_json::json;

use crate::input::load;
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Equality-case and closed-form tolerance under quadrature.
pub const DEFAULT_TOL: f64 = 1e-6;
const STRICT_GAP: f64 = 1e-3;
const CHAIN_TOL: f64 = 1e-7;
const ALPHAS: [f64; 7] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0];
const PAIRS: [(f64, f64); 3] = [(0.5, 1.0), (1.0, 2.0), (0.5, 2.0)];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    #[serde(rename = "version")]
    _version: Option<u32>,
    density: DensityInput,
    alphas: Option<Vec<f64>>,
    pairs: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DensityInput {
    Translation { a: Vec<f64> },
    GaussianScale { variance: f64 },
    Zero { n: usize },
}

impl DensityInput {
    fn oracle(&self) -> gaussconv::Result<ConvexFunctionOracle> {
        match self {
            DensityInput::Translation { a } => Ok(fixtures::translation(a.clone())),
            DensityInput::GaussianScale { variance } => fixtures::gaussian_scale(*variance),
            DensityInput::Zero { n } => Ok(fixtures::zero(*n)),
        }
    }
}

fn chain_holds(c: &ChainReport) -> bool {
    c.d2 <= c.two_d1 + CHAIN_TOL && c.two_d1 <= c.four_d_half + CHAIN_TOL
}

fn mc(ctx: &Context) -> McConfig {
    McConfig { samples: ctx.samples, stream: SeededStream::with_stream(ctx.seed, 1) }
}

fn divergence_rows(t: &mut Table, name: &str, rd: &RelativeDensity, alphas: &[f64]) -> gaussconv::Result<()> {
    for &a in alphas {
        let d = divergence(rd, a)?;
        t.push(vec![name.into(), a.into(), d.value.into(), d.stderr.into(), d.diverged.into()]);
    }
    Ok(())
}

fn comparisons(r: &mut ModuleReport, name: &str, rd: &RelativeDensity, pairs: &[(f64, f64)]) -> gaussconv::Result<()> {
    for &(a, b) in pairs {
        let c = comparison_check(rd, a, b)?;
        r.check(Check::ge(format!("{name}.comparison_{a}_{b}"), c.ratio_bound_slack.min(c.monotone_slack), -c.tol));
    }
    Ok(())
}

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match input {
        Some(path) => run_input(ctx, load(super::RENYI, path)?),
        None => run_builtin(ctx),
    }
}

fn run_builtin(ctx: &Context) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::RENYI, tol);
    let mut table = Table::new("divergences", &["fixture", "alpha", "value", "stderr", "diverged"]);

    // translation by a unit vector: D_α = α/2, the equality case of D_β ≤ (β/α)D_α
    let shift = RelativeDensity::new(fixtures::translation(vec![1.0]), mc(ctx))?;
    let d1 = divergence(&shift, 1.0)?.value;
    let d2 = divergence(&shift, 2.0)?.value;
    r.check(Check::le("translation.equality_d2_minus_2d1", (d2 - 2.0 * d1).abs(), tol));
    r.check(Check::le("translation.d2_closed_form", (d2 - 1.0).abs(), tol));
    let chain_t = chain_check(&shift)?;
    r.check(Check::flag("translation.chain", chain_holds(&chain_t)));
    comparisons(&mut r, "translation", &shift, &PAIRS)?;
    divergence_rows(&mut table, "translation", &shift, &ALPHAS)?;

    // N(0, 1/2): strict inequality
    let scale = RelativeDensity::new(fixtures::gaussian_scale(0.5)?, mc(ctx))?;
    let s1 = divergence(&scale, 1.0)?.value;
    let s2 = divergence(&scale, 2.0)?.value;
    r.check(Check::ge("gaussian_scale.strict_gap", 2.0 * s1 - s2, STRICT_GAP));
    let mut closed_err = (s1 - fixtures::gaussian_scale_kl(0.5)).abs();
    for a in [0.5, 2.0, 3.0] {
        closed_err = closed_err.max((divergence(&scale, a)?.value - fixtures::gaussian_scale_renyi(0.5, a)).abs());
    }
    r.check(Check::le("gaussian_scale.closed_form", closed_err, tol));
    let chain_s = chain_check(&scale)?;
    r.check(Check::flag("gaussian_scale.chain", chain_holds(&chain_s)));
    let sym = symmetry_check(&scale, 0.5)?;
    r.check(Check::le("gaussian_scale.symmetry", (sym.forward - sym.reverse_scaled).abs(), tol));
    comparisons(&mut r, "gaussian_scale", &scale, &PAIRS)?;
    divergence_rows(&mut table, "gaussian_scale", &scale, &ALPHAS)?;

    r.tables.push(table);
    r.summary = json!({
        "translation": { "d1": d1, "d2": d2, "chain": chain_t },
        "gaussian_scale": { "d1": s1, "d2": s2, "chain": chain_s, "symmetry": sym },
    });
    Ok(r)
}

fn run_input(ctx: &Context, input: Input) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::RENYI, tol);
    let rd = RelativeDensity::new(input.density.oracle()?, mc(ctx))?;
    let alphas = input.alphas.unwrap_or_else(|| ALPHAS.to_vec());
    let pairs: Vec<(f64, f64)> = match input.pairs {
        Some(p) => p.into_iter().map(|[a, b]| (a, b)).collect(),
        None => PAIRS.to_vec(),
    };
    let mut table = Table::new("divergences", &["fixture", "alpha", "value", "stderr", "diverged"]);
    divergence_rows(&mut table, "input", &rd, &alphas)?;
    comparisons(&mut r, "input", &rd, &pairs)?;
    let chain = chain_check(&rd)?;
    r.check(Check::flag("input.chain", chain.holds));
    r.tables.push(table);
    r.summary = json!({ "method": rd.method(), "renormalized": rd.renormalized(), "chain": chain });
    Ok(r)
}
