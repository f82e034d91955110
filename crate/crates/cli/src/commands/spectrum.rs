//! `spectrum`: periodic bands, open-chain spectrum and density profiles.

use creutz_core::localization::{band_dipr, density_profile};
use creutz_core::spectral::{bands, find_degeneracies, spectrum_obc, DegeneracyKind, ModeBand, DEGENERACY_TOL, MIN_DEGENERACY_GRID};
use creutz_core::Boundary;
use serde::Serialize;

use super::write_manifest;
use crate::error::CliError;
use crate::manifest::CellStatus;
use crate::output::sig12;
use crate::Context;

#[derive(Debug, Serialize)]
struct Summary {
    gap: String,
    edge_count: usize,
    ibar_plus: f64,
    ibar_minus: f64,
    dipr_product: f64,
    max_residual: f64,
    degeneracies: Vec<Degeneracy>,
}

#[derive(Debug, Serialize)]
struct Degeneracy {
    k: f64,
    kind: &'static str,
    re_e: f64,
    im_e: f64,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let params = ctx.config.params;
    let b = bands(&params, ctx.nk())?;
    let bands_path = ctx.out.csv(
        "pbc_bands.csv",
        &["k", "re_plus", "im_plus", "re_minus", "im_minus"],
        b.kgrid.iter().zip(b.plus.iter().zip(&b.minus)).map(|(&k, (p, m))| {
            [sig12(k), sig12(p.re), sig12(p.im), sig12(m.re), sig12(m.im)]
        }),
    )?;

    let open = params.with_boundary(Boundary::Open);
    let s = spectrum_obc(&open, &ctx.global.edge_options())?;
    let dec = &s.decomposition;
    if !dec.residuals_within(ctx.global.tol) {
        return Err(CliError::numerical(format!(
            "eigenvector residual {:e} exceeds tol {:e} * |H|_F = {:e}",
            dec.max_residual(),
            ctx.global.tol,
            ctx.global.tol * dec.norm
        )));
    }
    let spectrum_path = ctx.out.csv(
        "obc_spectrum.csv",
        &["index", "re_e", "im_e", "dipr", "is_edge", "band"],
        (0..s.len()).map(|i| {
            let e = s.values()[i];
            let band = match s.band[i] {
                ModeBand::Plus => "plus",
                ModeBand::Minus => "minus",
                ModeBand::Edge => "edge",
            };
            [i.to_string(), sig12(e.re), sig12(e.im), sig12(s.dipr[i]), s.is_edge(i).to_string(), band.to_string()]
        }),
    )?;

    let (rho_plus, rho_minus) = density_profile(&s);
    let profile_path = ctx.out.csv(
        "profile.csv",
        &["x", "rho_plus", "rho_minus"],
        rho_plus.iter().zip(&rho_minus).enumerate().map(|(x, (p, m))| [(x + 1).to_string(), sig12(*p), sig12(*m)]),
    )?;

    let report = band_dipr(&s);
    let (gap, status) = super::gap_label(&params, ctx.nk());
    let degeneracies = find_degeneracies(&params, ctx.nk().max(MIN_DEGENERACY_GRID), DEGENERACY_TOL)?
        .into_iter()
        .map(|d| Degeneracy {
            k: d.k,
            kind: match d.kind {
                DegeneracyKind::Dp => "DP",
                DegeneracyKind::Ep => "EP",
            },
            re_e: d.energy.re,
            im_e: d.energy.im,
        })
        .collect();
    let summary = Summary {
        gap,
        edge_count: s.edge_count(),
        ibar_plus: report.ibar_plus,
        ibar_minus: report.ibar_minus,
        dipr_product: report.product,
        max_residual: dec.max_residual(),
        degeneracies,
    };
    let summary_path = ctx.out.json("summary.json", &summary)?;
    write_manifest(
        ctx,
        "spectrum",
        &[&bands_path, &spectrum_path, &profile_path, &summary_path],
        vec![CellStatus::single(status)],
    )
}
