//! Skin-effect diagnostics: directed inverse participation ratio, its band
//! averages, per-band densities, localization-length fits and the uniform
//! inverse localization length of the gain/loss ladder.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::spectral::{ModeBand, SpectrumObc};
use crate::model::LadderParams;
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalizationError {
    #[error("mode norm {norm} differs from 1")]
    Unnormalized { norm: f64 },
    #[error("need at least {min} unit cells, got {cells}")]
    TooShort { cells: usize, min: usize },
    #[error("|M| = |mu| = {0}: localization length diverges")]
    Divergent(f64),
    #[error("mode is not localized (dIPR {dipr})")]
    NotLocalized { dipr: f64 },
}

/// Amplitudes of one eigenmode on legs A and B, `x = 1..L` stored from
/// index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub amps_a: Vec<C64>,
    pub amps_b: Vec<C64>,
}

/// Accepted deviation of the squared norm from 1.
pub const NORM_TOL: f64 = 1e-10;

impl ModeProfile {
    /// Splits a vector in the interleaved basis `(1,A), (1,B), (2,A), ...`.
    pub fn from_interleaved(v: &[C64]) -> Self {
        let amps_a = v.iter().step_by(2).copied().collect();
        let amps_b = v.iter().skip(1).step_by(2).copied().collect();
        Self { amps_a, amps_b }
    }

    pub fn cells(&self) -> usize {
        self.amps_a.len()
    }

    /// `sum_x |psi_A|^2 + |psi_B|^2`.
    pub fn norm(&self) -> f64 {
        self.amps_a.iter().chain(&self.amps_b).map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let s = self.norm().sqrt();
        if s > 0.0 {
            for z in self.amps_a.iter_mut().chain(self.amps_b.iter_mut()) {
                *z /= s;
            }
        }
        self
    }

    /// `|psi_A(x)|^2 + |psi_B(x)|^2`.
    pub fn density(&self) -> Vec<f64> {
        self.amps_a.iter().zip(&self.amps_b).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }

    /// Mirror image `x -> L + 1 - x`.
    pub fn mirrored(&self) -> Self {
        let mut amps_a = self.amps_a.clone();
        let mut amps_b = self.amps_b.clone();
        amps_a.reverse();
        amps_b.reverse();
        Self { amps_a, amps_b }
    }
}

/// Directed IPR `sum_x (x - x_c)(|psi_A|^4 + |psi_B|^4) / ((L-1)/2)` with
/// `x_c = (L+1)/2`. Positive for weight near `x = L`.
pub fn dipr(mode: &ModeProfile) -> Result<f64, LocalizationError> {
    let cells = mode.cells();
    if cells < 3 {
        return Err(LocalizationError::TooShort { cells, min: 3 });
    }
    let norm = mode.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(LocalizationError::Unnormalized { norm });
    }
    Ok(dipr_unchecked(mode))
}

/// [`dipr`] without the input checks; the profile is normalized on the fly.
pub(crate) fn dipr_unchecked(mode: &ModeProfile) -> f64 {
    let cells = mode.cells();
    if cells < 2 {
        return 0.0;
    }
    let norm = mode.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let center = (cells as f64 + 1.0) / 2.0;
    let sum: f64 = mode
        .amps_a
        .iter()
        .zip(&mode.amps_b)
        .enumerate()
        .map(|(i, (a, b))| (i as f64 + 1.0 - center) * (a.norm_sqr().powi(2) + b.norm_sqr().powi(2)))
        .sum();
    sum / (norm * norm) / ((cells as f64 - 1.0) / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiprReport {
    pub per_mode: Vec<f64>,
    pub ibar_plus: f64,
    pub ibar_minus: f64,
    pub product: f64,
    /// Normalization used for the band averages: `L - 1` with an edge pair,
    /// `L` otherwise.
    pub n_norm: usize,
}

/// Band-summed dIPR of the bulk modes divided by `L - 1` when an edge pair
/// is present and by `L` otherwise.
pub fn band_dipr(spectrum: &SpectrumObc) -> DiprReport {
    let cells = spectrum.params.cells;
    let n_norm = if spectrum.edge_count() > 0 { cells - 1 } else { cells };
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (d, band) in spectrum.dipr.iter().zip(&spectrum.band) {
        match band {
            ModeBand::Plus => plus += d,
            ModeBand::Minus => minus += d,
            ModeBand::Edge => {}
        }
    }
    let ibar_plus = plus / n_norm as f64;
    let ibar_minus = minus / n_norm as f64;
    DiprReport { per_mode: spectrum.dipr.clone(), ibar_plus, ibar_minus, product: ibar_plus * ibar_minus, n_norm }
}

/// Summed bulk densities `(rho_plus(x), rho_minus(x))` of the two bands.
pub fn density_profile(spectrum: &SpectrumObc) -> (Vec<f64>, Vec<f64>) {
    let cells = spectrum.params.cells;
    let mut plus = vec![0.0; cells];
    let mut minus = vec![0.0; cells];
    for (i, band) in spectrum.band.iter().enumerate() {
        let target = match band {
            ModeBand::Plus => &mut plus,
            ModeBand::Minus => &mut minus,
            ModeBand::Edge => continue,
        };
        let rho = spectrum.profile(i).density();
        let norm: f64 = rho.iter().sum();
        for (t, r) in target.iter_mut().zip(&rho) {
            *t += r / norm;
        }
    }
    (plus, minus)
}

/// `ln sqrt|(M + mu)/(M - mu)|`, the inverse localization length of every
/// skin mode when `r = 1` and `theta = pi/2`.
pub fn kappa_u(rung: f64, gain_loss: f64) -> Result<f64, LocalizationError> {
    if rung.abs() == gain_loss.abs() {
        return Err(LocalizationError::Divergent(rung.abs()));
    }
    Ok(0.5 * ((rung + gain_loss) / (rung - gain_loss)).abs().ln())
}

/// Tolerance for recognising the uniform-skin regime.
pub const SKIN_REGIME_TOL: f64 = 1e-12;

/// Gauge rate that undoes uniform skin localization, when the only
/// non-Hermitian term is the gain/loss and the cross hopping matches the
/// leg hopping amplitude (`cos(theta) = 0`, `|r| = |sin(theta)|`). In that
/// regime the open chain is similar to a Hermitian-like chain of
/// `h(k + i kappa_u)`; the returned rate is `-kappa_u sign(r sin(theta))`.
pub fn uniform_skin_gauge(params: &LadderParams) -> Option<f64> {
    let (sin_t, cos_t) = params.flux.sin_cos();
    let clean = params.imag_flux == 0.0
        && params.rung_asym == 0.0
        && params.cross_balanced == 0.0
        && params.cross_unbalanced == 0.0
        && params.gain_loss != 0.0;
    if !clean || cos_t.abs() > SKIN_REGIME_TOL || (params.cross.abs() - sin_t.abs()).abs() > SKIN_REGIME_TOL {
        return None;
    }
    let kappa = kappa_u(params.rung, params.gain_loss).ok()?;
    Some(-kappa * (params.cross * sin_t).signum())
}

/// Minimum `|dIPR|` for [`fit_kappa`].
pub const MIN_FIT_DIPR: f64 = 0.1;
pub const MIN_FIT_CELLS: usize = 16;

/// Least-squares slope of `ln(|psi_A|^2 + |psi_B|^2) / 2` over
/// `L/4 <= x <= 3L/4`. Positive for a mode growing toward `x = L`.
pub fn fit_kappa(mode: &ModeProfile) -> Result<f64, LocalizationError> {
    let cells = mode.cells();
    if cells < MIN_FIT_CELLS {
        return Err(LocalizationError::TooShort { cells, min: MIN_FIT_CELLS });
    }
    let d = dipr_unchecked(mode);
    if d.abs() <= MIN_FIT_DIPR {
        return Err(LocalizationError::NotLocalized { dipr: d });
    }
    Ok(envelope_slope(mode))
}

/// The slope fit of [`fit_kappa`] without the localization precondition.
pub fn envelope_slope(mode: &ModeProfile) -> f64 {
    let cells = mode.cells();
    let lo = cells.div_ceil(4).max(1);
    let hi = (3 * cells / 4).max(lo + 1);
    let rho = mode.density();
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter_map(|x| {
            let r = rho[x - 1];
            (r > 0.0).then(|| (x as f64, 0.5 * r.ln()))
        })
        .collect();
    let m = pts.len() as f64;
    if m < 2.0 {
        return 0.0;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let sy: f64 = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let cov: f64 = pts.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - sx) * (p.0 - sx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mode(cells: usize, x: usize, leg_b: bool) -> ModeProfile {
        let mut amps_a = vec![C64::new(0.0, 0.0); cells];
        let mut amps_b = amps_a.clone();
        if leg_b {
            amps_b[x - 1] = C64::new(0.0, 1.0);
        } else {
            amps_a[x - 1] = C64::new(1.0, 0.0);
        }
        ModeProfile { amps_a, amps_b }
    }

    #[test]
    fn dipr_extremes_and_uniform() {
        assert!((dipr(&point_mode(10, 10, false)).unwrap() - 1.0).abs() < 1e-15);
        assert!((dipr(&point_mode(10, 1, true)).unwrap() + 1.0).abs() < 1e-15);
        let cells = 12;
        let a = C64::from(1.0 / (2.0 * cells as f64).sqrt());
        let uniform = ModeProfile { amps_a: vec![a; cells], amps_b: vec![a; cells] };
        assert!(dipr(&uniform).unwrap().abs() < 1e-15);
    }

    #[test]
    fn dipr_rejects_bad_input() {
        let mut m = point_mode(5, 2, false);
        m.amps_a[1] = C64::from(2.0);
        assert!(matches!(dipr(&m), Err(LocalizationError::Unnormalized { .. })));
        assert!(matches!(dipr(&point_mode(2, 1, false)), Err(LocalizationError::TooShort { .. })));
    }

    #[test]
    fn kappa_u_values() {
        assert_eq!(kappa_u(1.0, 0.0).unwrap(), 0.0);
        let k = kappa_u(1.35, 0.5).unwrap();
        assert!((k - 0.5 * (1.85f64 / 0.85).ln()).abs() < 1e-15);
        assert!((kappa_u(-1.35, 0.5).unwrap() + k).abs() < 1e-15);
        assert_eq!(kappa_u(0.7, -0.7), Err(LocalizationError::Divergent(0.7)));
    }

    #[test]
    fn fit_exact_exponential() {
        let cells = 40;
        let amps_a: Vec<C64> = (1..=cells).map(|x| C64::from((0.3 * x as f64).exp())).collect();
        let amps_b = vec![C64::from(0.0); cells];
        let m = ModeProfile { amps_a, amps_b }.normalized();
        assert!((fit_kappa(&m).unwrap() - 0.3).abs() < 1e-6);
    }

    #[test]
    fn fit_rejects_extended_and_short() {
        let cells = 20;
        let a = C64::from(1.0 / (2.0 * cells as f64).sqrt());
        let flat = ModeProfile { amps_a: vec![a; cells], amps_b: vec![a; cells] };
        assert!(matches!(fit_kappa(&flat), Err(LocalizationError::NotLocalized { .. })));
        assert!(matches!(fit_kappa(&point_mode(8, 8, false)), Err(LocalizationError::TooShort { .. })));
    }
}
