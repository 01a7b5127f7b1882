use std::path::Path;

use gaussconv::gauss::SeededStream;
use gaussconv::wills::{fixtures, intrinsic_volumes_closed, reversal_from, wills_mc, BodySpec, ConvexBody};
use serde_json::json;

use crate::input::load;
use crate::report::{Check, Context, ModuleReport, Table};
use crate::CliError;

/// Relative band for Ŵ and V̂₁ against closed forms, widened to 3 stderr
/// when the Monte Carlo error is larger.
pub const DEFAULT_TOL: f64 = 0.02;

pub fn run(ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    let tol = ctx.tol_or(DEFAULT_TOL);
    let mut r = ModuleReport::new(super::WILLS, tol);
    let bodies: Vec<(String, ConvexBody)> = match input {
        Some(path) => {
            let spec: BodySpec = load(super::WILLS, path)?;
            vec![("input".to_string(), ConvexBody::from_spec(&spec)?)]
        }
        None => vec![
            ("segment".to_string(), fixtures::segment(1.0)),
            ("disk".to_string(), fixtures::disk()),
            ("square".to_string(), fixtures::unit_square()),
        ],
    };
    let mut table = Table::new(
        "wills",
        &[
            "body", "n", "r", "W", "W_stderr", "W_closed", "V1", "V1_stderr", "V1_closed", "mean_f", "var_f",
            "mcmullen_slack", "log_W", "rhs_main", "rhs_cor", "rhs_cor_scaled", "reversal_stderr",
        ],
    );
    let mut summary = serde_json::Map::new();
    for (i, (name, body)) in bodies.iter().enumerate() {
        let probe = body.validate(1000, SeededStream::with_stream(ctx.seed, 100 + i as u64))?;
        r.check(Check::le(format!("{name}.projection_probe"), probe, 1e-9));
        let w = wills_mc(body, ctx.samples, SeededStream::with_stream(ctx.seed, 1 + i as u64))?;
        let closed = intrinsic_volumes_closed(body).ok();
        if let Some(v) = &closed {
            let wc: f64 = v.iter().sum();
            let band = (tol * wc).max(3.0 * w.w_stderr);
            r.check(Check::le(format!("{name}.W_closed_form"), (w.w_estimate - wc).abs(), band));
            let band = (tol * v[1]).max(3.0 * w.v1_stderr);
            r.check(Check::le(format!("{name}.V1_closed_form"), (w.v1_estimate - v[1]).abs(), band));
        }
        r.check(Check::ge(format!("{name}.W_at_least_one"), w.w_estimate, 1.0 - 3.0 * w.w_stderr));
        r.check(Check::ge(format!("{name}.mcmullen"), w.mcmullen_slack, -3.0 * w.mcmullen_stderr));
        let rev = reversal_from(&w);
        r.check(Check::ge(format!("{name}.reversal_main"), rev.lhs, rev.rhs_main - 3.0 * rev.stderr));
        r.check(
            Check::flag(format!("{name}.reversal_corollary"), rev.cor_holds)
                .note("rhs_main >= var/2 + V1 - r^2/2 - 3 stderr"),
        );
        let wc = closed.as_ref().map(|v| v.iter().sum::<f64>());
        table.push(vec![
            name.as_str().into(),
            body.dim().into(),
            body.radius().into(),
            w.w_estimate.into(),
            w.w_stderr.into(),
            wc.into(),
            w.v1_estimate.into(),
            w.v1_stderr.into(),
            closed.as_ref().map(|v| v[1]).into(),
            w.mean_f.into(),
            w.var_f.into(),
            w.mcmullen_slack.into(),
            w.log_w.into(),
            w.rhs_main.into(),
            w.rhs_cor.into(),
            w.rhs_cor_scaled.into(),
            w.reversal_stderr.into(),
        ]);
        summary.insert(name.clone(), json!({ "report": w, "reversal": rev, "intrinsic_volumes": closed }));
    }
    r.tables.push(table);
    r.summary = serde_json::Value::Object(summary);
    Ok(r)
}
