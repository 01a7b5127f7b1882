//! Reading JSON inputs: parse, validate against the shipped schema, then
//! deserialize into the typed form.

use std::fs;
use std::path::Path;

use gaussconv::mgf::ScalarDistribution;
use gaussconv::oracle::builtin;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

pub fn schema_source(module: &str) -> Option<&'static str> {
    Some(match module {
        "mgf" => include_str!("../schemas/mgf.schema.json"),
        "transport" => include_str!("../schemas/transport.schema.json"),
        "renyi" => include_str!("../schemas/renyi.schema.json"),
        "conic" => include_str!("../schemas/conic.schema.json"),
        "wills" => include_str!("../schemas/wills.schema.json"),
        "expsum" => include_str!("../schemas/expsum.schema.json"),
        _ => return None,
    })
}

/// Validates `instance` against the module's schema; the error names the
/// JSON pointer of the first violation.
pub fn validate(module: &str, instance: &Value) -> Result<(), CliError> {
    let src = schema_source(module).ok_or_else(|| CliError::Input(format!("no input schema for `{module}`")))?;
    let schema: Value = serde_json::from_str(src).expect("shipped schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("shipped schema compiles");
    if let Some(e) = validator.iter_errors(instance).next() {
        let pointer = e.instance_path().to_string();
        let pointer = if pointer.is_empty() { "/".to_string() } else { pointer };
        return Err(CliError::Input(format!("schema violation at {pointer}: {e}")));
    }
    Ok(())
}

pub fn load<T: DeserializeOwned>(module: &str, path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: not valid JSON: {e}", path.display())))?;
    validate(module, &value).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })?;
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionInput {
    Gaussian { mean: f64, variance: f64 },
    Poisson { rate: f64 },
    Exponential { rate: f64 },
    Pushforward { function: String, slope: Option<f64>, intercept: Option<f64> },
    DensityGrid { points: Vec<f64>, density: Vec<f64> },
    Samples { values: Vec<f64> },
}

impl DistributionInput {
    pub fn build(&self) -> gaussconv::Result<ScalarDistribution> {
        match self {
            DistributionInput::Gaussian { mean, variance } => ScalarDistribution::gaussian(*mean, *variance),
            DistributionInput::Poisson { rate } => ScalarDistribution::poisson(*rate),
            DistributionInput::Exponential { rate } => ScalarDistribution::exponential(*rate),
            DistributionInput::Pushforward { function, slope, intercept } => {
                let phi = match function.as_str() {
                    "square" => builtin::square(),
                    "abs" => builtin::abs(),
                    "exp" => builtin::exp(),
                    "relu" => builtin::relu(),
                    "softplus" => builtin::softplus(),
                    "affine" => builtin::affine1(slope.unwrap_or(1.0), intercept.unwrap_or(0.0)),
                    other => return Err(gaussconv::Error::InvalidArgument(format!("unknown function `{other}`"))),
                };
                ScalarDistribution::pushforward(phi)
            }
            DistributionInput::DensityGrid { points, density } => {
                ScalarDistribution::density_grid(points.clone(), density.clone())
            }
            DistributionInput::Samples { values } => ScalarDistribution::samples(values.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridInput {
    pub const MAX_POINTS: usize = 1_000_000;

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let span = (self.stop - self.start) / self.step;
        if !(span.is_finite() && span >= 0.0) {
            return Err(CliError::Input(format!("grid needs start <= stop and step > 0, got {self:?}")));
        }
        let n = (span + 1e-9).floor() as usize + 1;
        if n > Self::MAX_POINTS {
            return Err(CliError::Input(format!("grid has {n} points, at most {} allowed", Self::MAX_POINTS)));
        }
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}
