//! `bbc`: periodic gap closings against open-chain edge transitions.

use creutz_core::spectral::bbc_check;
use serde::Serialize;

use super::write_manifest;
use crate::error::CliError;
use crate::manifest::CellStatus;
use crate::Context;

#[derive(Debug, Serialize)]
struct BbcJson {
    parameter: String,
    pbc_closing: Vec<f64>,
    obc_closing: Vec<f64>,
    conventional_bbc: bool,
    step: f64,
    nk: usize,
    #[serde(rename = "L")]
    cells: usize,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let sweep = ctx.config.require_sweep()?;
    if sweep.axis2.is_some() {
        return Err(CliError::config("bbc takes a single sweep axis (axis1 only)"));
    }
    let key = sweep.axis1.key()?;
    let values = sweep.axis1.values();
    let report = bbc_check(&ctx.config.params, key, &values, ctx.nk(), ctx.cells(), &ctx.global.edge_options())?;
    let json = BbcJson {
        parameter: key.as_str().to_string(),
        pbc_closing: report.pbc_closing,
        obc_closing: report.obc_closing,
        conventional_bbc: report.conventional_bbc,
        step: report.step,
        nk: ctx.nk(),
        cells: ctx.cells(),
    };
    let path = ctx.out.json("bbc.json", &json)?;
    write_manifest(ctx, "bbc", &[&path], vec![CellStatus::single("ok")])
}
