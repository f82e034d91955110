//! One module per subcommand.

pub mod bbc;
pub mod boundaries;
pub mod phase;
pub mod spectrum;
pub mod transfer;
pub mod winding;

use std::path::Path;

use crate::error::CliError;
use crate::manifest::{CellStatus, RunManifest, StatusCounts};
use crate::Context;

/// Writes `manifest.json` listing `files` and the per-cell statuses.
pub(crate) fn write_manifest(
    ctx: &Context,
    command: &str,
    files: &[&Path],
    cells_status: Vec<CellStatus>,
) -> Result<(), CliError> {
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config: ctx.config.clone(),
        nk: ctx.nk(),
        cells: ctx.cells(),
        tol: ctx.global.tol,
        wall_time_s: ctx.started.elapsed().as_secs_f64(),
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        counts: StatusCounts::tally(&cells_status),
        cells_status,
    };
    ctx.out.json("manifest.json", &manifest)?;
    Ok(())
}

/// Gap label of a parameter point and the matching cell status:
/// `(label, "ok")`, `("boundary", "boundary")` for an undecided
/// classification, or `("", "error:<kind>")`.
pub(crate) fn gap_label(params: &creutz_core::LadderParams, nk: usize) -> (String, String) {
    use creutz_core::spectral::{classify_gap, SpectralError, MIN_GAP_GRID};
    match classify_gap(params, nk.max(MIN_GAP_GRID)) {
        Ok(g) => (g.as_str().to_string(), "ok".to_string()),
        Err(SpectralError::Inconclusive { .. }) => ("boundary".to_string(), "boundary".to_string()),
        Err(e) => (String::new(), format!("error:{}", crate::error::error_kind(&e))),
    }
}
