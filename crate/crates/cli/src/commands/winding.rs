//! `winding`: spectral winding numbers at chosen or gridded energies.

use creutz_core::spectral::{bands, winding_number, SpectralError};
use creutz_core::C64;
use rayon::prelude::*;

use super::write_manifest;
use crate::error::{error_kind, CliError};
use crate::manifest::CellStatus;
use crate::output::sig12;
use crate::Context;

/// Reference energies at the cell centres of a `grid x grid` lattice over
/// the padded bounding box of the periodic spectrum. The box is padded
/// symmetrically, so an even `grid` never lands on the box's mid-lines.
pub fn auto_grid(ctx: &Context, grid: usize) -> Result<Vec<C64>, CliError> {
    let b = bands(&ctx.config.params, ctx.nk())?;
    let (mut re0, mut re1, mut im0, mut im1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for e in b.energies() {
        re0 = re0.min(e.re);
        re1 = re1.max(e.re);
        im0 = im0.min(e.im);
        im1 = im1.max(e.im);
    }
    let pad = 0.05 * (re1 - re0).max(im1 - im0) + 0.1;
    let (re0, re1, im0, im1) = (re0 - pad, re1 + pad, im0 - pad, im1 + pad);
    let mut out = Vec::with_capacity(grid * grid);
    for a in 0..grid {
        for c in 0..grid {
            out.push(C64::new(
                re0 + (re1 - re0) * (a as f64 + 0.5) / grid as f64,
                im0 + (im1 - im0) * (c as f64 + 0.5) / grid as f64,
            ));
        }
    }
    Ok(out)
}

pub fn run(ctx: &Context, eref: &[(f64, f64)], grid: usize) -> Result<(), CliError> {
    ctx.config.params.validate()?;
    let refs: Vec<C64> = if eref.is_empty() {
        if grid == 0 {
            return Err(CliError::config("--grid must be positive"));
        }
        auto_grid(ctx, grid)?
    } else {
        eref.iter().map(|&(re, im)| C64::new(re, im)).collect()
    };
    let results: Vec<Result<_, SpectralError>> =
        refs.par_iter().map(|&e| winding_number(&ctx.config.params, e, ctx.nk())).collect();
    if let Some(Err(e @ (SpectralError::GridTooSmall { .. } | SpectralError::Model(_)))) = results.first() {
        return Err(e.clone().into());
    }
    let mut rows = Vec::with_capacity(refs.len());
    let mut statuses = Vec::with_capacity(refs.len());
    for (i, (e, r)) in refs.iter().zip(&results).enumerate() {
        let (w, raw, status) = match r {
            Ok(w) => (w.w.to_string(), sig12(w.raw), "ok".to_string()),
            Err(SpectralError::Unresolved { raw }) => (String::new(), sig12(*raw), "error:unresolved".to_string()),
            Err(err) => (String::new(), String::new(), format!("error:{}", error_kind(err))),
        };
        rows.push([sig12(e.re), sig12(e.im), w, raw]);
        statuses.push(CellStatus { index: i, p1: Some(e.re), p2: Some(e.im), status });
    }
    let path = ctx.out.csv("winding.csv", &["re_eref", "im_eref", "w", "raw"], rows)?;
    write_manifest(ctx, "winding", &[&path], statuses)
}
