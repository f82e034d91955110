//! `transfer-matrix`: zero-energy transfer-matrix eigenvalues of the
//! imaginary-flux chain.

use creutz_core::analytic::{alpha_edge_criterion, transfer_eigs, TransferRegime};
use creutz_core::LadderParams;

use super::phase::grid;
use super::write_manifest;
use crate::error::CliError;
use crate::manifest::CellStatus;
use crate::output::sig12;
use crate::Context;

fn regime_str(r: TransferRegime) -> &'static str {
    match r {
        TransferRegime::BothInside => "BothInside",
        TransferRegime::BothOutside => "BothOutside",
        TransferRegime::Split => "Split",
    }
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let base = ctx.config.params;
    let points: Vec<LadderParams> = match &ctx.config.sweep {
        Some(sweep) => {
            let (k1, k2, pts) = grid(sweep)?;
            pts.into_iter()
                .map(|(x, y)| {
                    let p = base.with(k1, x)?;
                    match (k2, y) {
                        (Some(k), Some(v)) => p.with(k, v),
                        _ => Ok(p),
                    }
                })
                .collect::<Result<_, _>>()?
        }
        None => vec![base],
    };
    let mut rows = Vec::with_capacity(points.len());
    let mut statuses = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let head = [sig12(p.rung), sig12(p.cross), sig12(p.flux), sig12(p.imag_flux)];
        let edge = alpha_edge_criterion(p.rung, p.cross).to_string();
        let (tail, status) = match transfer_eigs(p.rung, p.cross, p.flux, p.imag_flux) {
            Ok(t) => (
                [
                    sig12(t.lambda1.re),
                    sig12(t.lambda1.im),
                    sig12(t.lambda1.norm()),
                    sig12(t.lambda2.re),
                    sig12(t.lambda2.im),
                    sig12(t.lambda2.norm()),
                    regime_str(t.regime).to_string(),
                ],
                "ok".to_string(),
            ),
            Err(_) => (Default::default(), "error:singular".to_string()),
        };
        let mut row: Vec<String> = head.to_vec();
        row.extend(tail);
        row.push(edge);
        rows.push(row);
        statuses.push(CellStatus { index: i, p1: None, p2: None, status });
    }
    let path = ctx.out.csv(
        "transfer.csv",
        &["M", "r", "theta", "alpha", "re_l1", "im_l1", "abs_l1", "re_l2", "im_l2", "abs_l2", "regime", "edge_criterion"],
        rows,
    )?;
    let all_failed = statuses.iter().all(|s| s.status != "ok");
    write_manifest(ctx, "transfer-matrix", &[&path], statuses)?;
    if all_failed {
        return Err(CliError::numerical("transfer matrix singular (r + dr/2 = 0) at every point"));
    }
    Ok(())
}
