//! One submodule per verification subcommand. Each runs its built-in
//! fixture set, or the single input file it is given.

pub mod conic;
pub mod expsum;
pub mod fixtures;
pub mod mgf;
pub mod renyi;
pub mod transport;
pub mod wills;

use std::path::Path;

use crate::report::{Context, ModuleReport};
use crate::CliError;

pub const MGF: &str = "mgf";
pub const TRANSPORT: &str = "transport";
pub const RENYI: &str = "renyi";
pub const CONIC: &str = "conic";
pub const WILLS: &str = "wills";
pub const EXPSUM: &str = "expsum";

/// Order used by `all`.
pub const MODULES: [&str; 6] = [MGF, TRANSPORT, RENYI, CONIC, WILLS, EXPSUM];

pub fn run(module: &str, ctx: &Context, input: Option<&Path>) -> Result<ModuleReport, CliError> {
    match module {
        MGF => mgf::run(ctx, input),
        TRANSPORT => transport::run(ctx, input),
        RENYI => renyi::run(ctx, input),
        CONIC => conic::run(ctx, input),
        WILLS => wills::run(ctx, input),
        EXPSUM => expsum::run(ctx, input),
        other => Err(CliError::Input(format!("unknown module `{other}`"))),
    }
}
