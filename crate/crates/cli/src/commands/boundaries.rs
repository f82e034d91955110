//! `boundaries`: closed-form phase boundaries and transition points.

use std::f64::consts::PI;

use creutz_core::analytic::{
    alpha_edge_criterion, m_r1_boundaries, m_r1_theta_transitions, mu_boundaries, mu_criterion, p_extremes,
    r2_conditions, R2_TOL,
};
use creutz_core::localization::kappa_u;
use creutz_core::{LadderParams, ParamKey};
use serde::Serialize;

use super::write_manifest;
use crate::config::SweepSpec;
use crate::error::CliError;
use crate::manifest::CellStatus;
use crate::output::sig12;
use crate::Context;

/// Tolerance for recognising `r = |sin(theta)|`, where the gain/loss
/// criterion applies.
const SIN_MATCH: f64 = 1e-9;

/// Closed-form curves matching the sweep axes, as
/// `(sweep_param, critical_value, curve_name)` rows, when the base point
/// belongs to a scenario that has them:
///
/// * axes `{r1, m}` without `alpha, r2, mu`: the `m(r1)` curves;
/// * axes `{M, mu}` with `r = |sin(theta)|` and no other deformation: the
///   curves `M(mu)` of the gain/loss criterion.
pub fn overlay(base: &LadderParams, sweep: &SweepSpec) -> Result<Option<Vec<[String; 3]>>, CliError> {
    let k1 = sweep.axis1.key()?;
    let Some(a2) = &sweep.axis2 else {
        return Ok(None);
    };
    let k2 = a2.key()?;
    let pick = |want: ParamKey| if k1 == want { Some(&sweep.axis1) } else if k2 == want { Some(a2) } else { None };
    let rows = |v: Vec<(&'static str, f64, f64)>| v.into_iter().map(|(n, x, y)| [sig12(x), sig12(y), n.to_string()]).collect();

    if let (Some(r1_axis), Some(_)) = (pick(ParamKey::CrossBalanced), pick(ParamKey::RungAsym)) {
        if base.imag_flux == 0.0 && base.cross_unbalanced == 0.0 && base.gain_loss == 0.0 {
            let set = m_r1_boundaries(base.rung, base.cross, base.flux);
            return Ok(Some(rows(set.sample(&r1_axis.values()))));
        }
    }
    if let (Some(mu_axis), Some(_)) = (pick(ParamKey::GainLoss), pick(ParamKey::Rung)) {
        let clean = base.imag_flux == 0.0
            && base.rung_asym == 0.0
            && base.cross_balanced == 0.0
            && base.cross_unbalanced == 0.0;
        if clean && (base.cross.abs() - base.flux.sin().abs()).abs() < SIN_MATCH {
            return Ok(Some(rows(mu_boundaries(base.flux, &mu_axis.values()))));
        }
    }
    Ok(None)
}

#[derive(Debug, Serialize)]
struct Transitions {
    alpha_edge_criterion: bool,
    p0: f64,
    ppi: f64,
    pkprime: Option<f64>,
    cos_kprime: Option<f64>,
    overlap_theta: Option<f64>,
    overlap_theta_over_pi: Option<f64>,
    touching_theta: Option<f64>,
    touching_theta_over_pi: Option<f64>,
    r2_dp: bool,
    r2_ep: bool,
    /// Only meaningful when `r = |sin(theta)|`.
    mu_criterion: Option<bool>,
    kappa_u: Option<f64>,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let p = ctx.config.params;
    let mut files = Vec::new();
    if let Some(sweep) = &ctx.config.sweep {
        let rows = overlay(&p, sweep)?.ok_or_else(|| {
            CliError::config("no closed-form boundaries for these sweep axes; use (r1, m) or (M, mu)")
        })?;
        files.push(ctx.out.csv("boundaries.csv", &["sweep_param", "critical_value", "curve_name"], rows)?);
    }

    let ext = p_extremes(p.rung, p.cross, p.flux, p.rung_asym, p.cross_balanced);
    let th = m_r1_theta_transitions(p.rung, p.cross, p.rung_asym, p.cross_balanced);
    let r2 = r2_conditions(p.rung, p.cross, p.flux, p.cross_unbalanced, R2_TOL);
    let sin_match = (p.cross.abs() - p.flux.sin().abs()).abs() < SIN_MATCH;
    let t = Transitions {
        alpha_edge_criterion: alpha_edge_criterion(p.rung, p.cross),
        p0: ext.p0,
        ppi: ext.ppi,
        pkprime: ext.pkprime,
        cos_kprime: ext.cos_kprime,
        overlap_theta: th.overlap_theta,
        overlap_theta_over_pi: th.overlap_theta.map(|x| x / PI),
        touching_theta: th.touching_theta,
        touching_theta_over_pi: th.touching_theta.map(|x| x / PI),
        r2_dp: r2.dp,
        r2_ep: r2.ep,
        mu_criterion: sin_match.then(|| mu_criterion(p.rung, p.gain_loss, p.flux)),
        kappa_u: if p.gain_loss != 0.0 { kappa_u(p.rung, p.gain_loss).ok() } else { None },
    };
    files.push(ctx.out.json("transitions.json", &t)?);
    let refs: Vec<&std::path::Path> = files.iter().map(|p| p.as_path()).collect();
    write_manifest(ctx, "boundaries", &refs, vec![CellStatus::single("ok")])
}
