//! `phase-diagram`: gap labels, edge counts and band dIPRs on a parameter
//! grid.

use creutz_core::localization::band_dipr;
use creutz_core::spectral::{edge_count, spectrum_obc, winding_number, SpectralError, MIN_EDGE_CELLS};
use creutz_core::{Boundary, LadderParams, ParamKey, C64};
use rayon::prelude::*;

use super::{boundaries, gap_label, write_manifest};
use crate::config::{Diagnostic, SweepSpec};
use crate::error::{error_kind, CliError};
use crate::manifest::CellStatus;
use crate::output::{opt, opt12, sig12};
use crate::Context;

/// Result of one grid cell; absent values are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub p1: f64,
    pub p2: Option<f64>,
    pub gap: Option<String>,
    pub edges: Option<usize>,
    pub ibar: Option<(f64, f64)>,
    pub winding: Option<i64>,
    pub status: String,
}

/// Flattened grid `(p1, p2)` with `p1` outermost.
pub fn grid(sweep: &SweepSpec) -> Result<(ParamKey, Option<ParamKey>, Vec<(f64, Option<f64>)>), CliError> {
    let k1 = sweep.axis1.key()?;
    let k2 = sweep.axis2.as_ref().map(|a| a.key()).transpose()?;
    let v2: Vec<Option<f64>> = match &sweep.axis2 {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let points = sweep.axis1.values().into_iter().flat_map(|x| v2.iter().map(move |&y| (x, y))).collect();
    Ok((k1, k2, points))
}

fn point(base: &LadderParams, k1: ParamKey, x: f64, k2: Option<ParamKey>, y: Option<f64>) -> Result<LadderParams, SpectralError> {
    let mut p = base.with(k1, x)?;
    if let (Some(k), Some(v)) = (k2, y) {
        p = p.with(k, v)?;
    }
    p.validate()?;
    Ok(p)
}

pub fn compute_cell(ctx: &Context, sweep: &SweepSpec, k1: ParamKey, x: f64, k2: Option<ParamKey>, y: Option<f64>) -> Cell {
    let mut cell = Cell { p1: x, p2: y, gap: None, edges: None, ibar: None, winding: None, status: "ok".into() };
    let p = match point(&ctx.config.params, k1, x, k2, y) {
        Ok(p) => p,
        Err(e) => {
            cell.status = format!("error:{}", error_kind(&e));
            return cell;
        }
    };
    let mut errors: Vec<String> = Vec::new();
    let mut boundary = false;
    if sweep.wants(Diagnostic::Gapclass) {
        let (label, status) = gap_label(&p, ctx.nk());
        match status.as_str() {
            "ok" => cell.gap = Some(label),
            "boundary" => {
                boundary = true;
                cell.gap = Some(label);
            }
            _ => errors.push(status),
        }
    }
    let open = p.with_boundary(Boundary::Open);
    let opts = ctx.global.edge_options();
    if sweep.wants(Diagnostic::Dipr) {
        match spectrum_obc(&open, &opts) {
            Ok(s) if s.decomposition.residuals_within(ctx.global.tol) => {
                let r = band_dipr(&s);
                cell.ibar = Some((r.ibar_plus, r.ibar_minus));
                cell.edges = Some(s.edge_count());
            }
            Ok(_) => errors.push("error:residual".into()),
            Err(e) => errors.push(format!("error:{}", error_kind(&e))),
        }
    } else if sweep.wants(Diagnostic::Edge) {
        match edge_count(&open, &opts) {
            Ok(n) => cell.edges = Some(n),
            Err(e) => errors.push(format!("error:{}", error_kind(&e))),
        }
    }
    if sweep.wants(Diagnostic::Winding) {
        // Unresolved or on-spectrum references leave the field empty.
        cell.winding = winding_number(&p, C64::new(0.0, 0.0), ctx.nk()).ok().map(|w| w.w);
    }
    if let Some(e) = errors.into_iter().next() {
        cell.status = e;
    } else if boundary {
        cell.status = "boundary".into();
    }
    cell
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let sweep = ctx.config.require_sweep()?;
    for d in [Diagnostic::Bands, Diagnostic::Bbc] {
        if sweep.wants(d) {
            return Err(CliError::config(format!("output {d} is not available for phase-diagram")));
        }
    }
    if (sweep.wants(Diagnostic::Edge) || sweep.wants(Diagnostic::Dipr)) && ctx.cells() < MIN_EDGE_CELLS {
        return Err(CliError::config(format!("edge diagnostics need L >= {MIN_EDGE_CELLS}")));
    }
    let (k1, k2, points) = grid(sweep)?;
    let cells: Vec<Cell> = points.par_iter().map(|&(x, y)| compute_cell(ctx, sweep, k1, x, k2, y)).collect();

    let name2 = sweep.axis2.as_ref().map(|a| a.name.as_str()).unwrap_or("p2");
    let mut header = vec![sweep.axis1.name.as_str(), name2, "gap_label", "edge_count", "ibar_plus", "ibar_minus"];
    let with_w = sweep.wants(Diagnostic::Winding);
    if with_w {
        header.push("w0");
    }
    let phase_path = ctx.out.csv(
        "phase.csv",
        &header,
        cells.iter().map(|c| {
            let mut row = vec![
                sig12(c.p1),
                opt12(c.p2),
                c.gap.clone().unwrap_or_default(),
                opt(c.edges),
                opt12(c.ibar.map(|t| t.0)),
                opt12(c.ibar.map(|t| t.1)),
            ];
            if with_w {
                row.push(opt(c.winding));
            }
            row
        }),
    )?;
    let mut files = vec![phase_path];
    if sweep.wants(Diagnostic::Boundaries) {
        if let Some(rows) = boundaries::overlay(&ctx.config.params, sweep)? {
            files.push(ctx.out.csv("boundaries.csv", &["sweep_param", "critical_value", "curve_name"], rows)?);
        }
    }
    let statuses: Vec<CellStatus> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| CellStatus { index: i, p1: Some(c.p1), p2: c.p2, status: c.status.clone() })
        .collect();
    let all_failed = statuses.iter().all(|s| s.status.starts_with("error"));
    let refs: Vec<&std::path::Path> = files.iter().map(|p| p.as_path()).collect();
    write_manifest(ctx, "phase-diagram", &refs, statuses)?;
    if all_failed {
        return Err(CliError::numerical("every grid cell failed; see manifest.json"));
    }
    Ok(())
}
