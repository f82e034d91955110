//! Ladder parameters and Hamiltonian builders.
//!
//! The ladder has two legs `A` and `B`. Leg hoppings carry the flux phase
//! `theta`, cross hoppings `A_x <-> B_{x+1}` have amplitude `r`, and the rung
//! `A_x <-> B_x` has amplitude `M`. Five non-Hermitian deformations can be
//! switched on independently and composed freely:
//!
//! * `alpha`: imaginary part of the flux, `theta -> theta + i alpha`;
//! * `m`: rung asymmetry, `M -> M +/- m`;
//! * `r1`: cross asymmetry that is balanced between the two diagonals;
//! * `r2`: cross asymmetry that produces a net non-reciprocity;
//! * `mu`: staggered imaginary potential, `-i mu` on `A` and `+i mu` on `B`.
//!
//! Momentum-space convention: a hopping term `t c†_x d_{x+1}` contributes
//! `t e^{ik}` to the Bloch element `(c, d)`. This single convention fixes
//! which real-space bond receives each sign of the asymmetries, and with it
//! the periodic real-space matrix block-diagonalizes exactly onto [`bloch`].

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_traits::Float;

use crate::matrix::ComplexMatrix;
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("parameter {0} is not finite")]
    NonFinite(ParamKey),
    #[error("energy unit K must be 1, got {0}")]
    EnergyUnit(f64),
    #[error("real-space Hamiltonian needs at least 2 unit cells, got {0}")]
    TooFewCells(usize),
    #[error("unknown parameter key {0:?}")]
    UnknownKey(String),
    #[error("parameter {0} cannot be set from a real number")]
    NotNumeric(ParamKey),
}

/// Boundary condition of the finite ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Boundary {
    #[cfg_attr(feature = "serde", serde(rename = "PBC"))]
    Periodic,
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "OBC"))]
    Open,
}

/// Full parameter record of the ladder.
///
/// Field names describe the role of each amplitude; the serialized keys are
/// the conventional symbols `K, r, M, theta, alpha, m, r1, r2, mu, L, bc`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct LadderParams {
    /// Leg hopping amplitude, the energy unit. Always 1.
    #[cfg_attr(feature = "serde", serde(rename = "K"))]
    pub energy_unit: f64,
    /// Cross (diagonal) hopping amplitude `r`.
    #[cfg_attr(feature = "serde", serde(rename = "r"))]
    pub cross: f64,
    /// Rung hopping amplitude `M`.
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub rung: f64,
    /// Flux phase `theta` of the leg hoppings, radians.
    #[cfg_attr(feature = "serde", serde(rename = "theta"))]
    pub flux: f64,
    /// Imaginary flux `alpha`.
    #[cfg_attr(feature = "serde", serde(rename = "alpha"))]
    pub imag_flux: f64,
    /// Rung asymmetry `m`.
    #[cfg_attr(feature = "serde", serde(rename = "m"))]
    pub rung_asym: f64,
    /// Balanced cross asymmetry `r1`.
    #[cfg_attr(feature = "serde", serde(rename = "r1"))]
    pub cross_balanced: f64,
    /// Unbalanced cross asymmetry `r2`.
    #[cfg_attr(feature = "serde", serde(rename = "r2"))]
    pub cross_unbalanced: f64,
    /// Staggered imaginary potential `mu` (`+i mu` on leg B, `-i mu` on leg A).
    #[cfg_attr(feature = "serde", serde(rename = "mu"))]
    pub gain_loss: f64,
    /// Number of unit cells `L`.
    #[cfg_attr(feature = "serde", serde(rename = "L"))]
    pub cells: usize,
    #[cfg_attr(feature = "serde", serde(rename = "bc"))]
    pub boundary: Boundary,
}

impl Default for LadderParams {
    fn default() -> Self {
        Self {
            energy_unit: 1.0,
            cross: 0.0,
            rung: 0.0,
            flux: 0.0,
            imag_flux: 0.0,
            rung_asym: 0.0,
            cross_balanced: 0.0,
            cross_unbalanced: 0.0,
            gain_loss: 0.0,
            cells: 60,
            boundary: Boundary::Open,
        }
    }
}

impl LadderParams {
    /// Hermitian ladder with rung `M`, cross hopping `r` and flux `theta`.
    pub fn hermitian(rung: f64, cross: f64, flux: f64) -> Self {
        Self { rung, cross, flux, ..Self::default() }
    }

    pub fn with_imag_flux(mut self, alpha: f64) -> Self {
        self.imag_flux = alpha;
        self
    }

    pub fn with_rung_asym(mut self, m: f64) -> Self {
        self.rung_asym = m;
        self
    }

    pub fn with_cross_balanced(mut self, r1: f64) -> Self {
        self.cross_balanced = r1;
        self
    }

    pub fn with_cross_unbalanced(mut self, r2: f64) -> Self {
        self.cross_unbalanced = r2;
        self
    }

    pub fn with_gain_loss(mut self, mu: f64) -> Self {
        self.gain_loss = mu;
        self
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// True when every non-Hermitian deformation vanishes.
    pub fn is_hermitian(&self) -> bool {
        self.imag_flux == 0.0
            && self.rung_asym == 0.0
            && self.cross_balanced == 0.0
            && self.cross_unbalanced == 0.0
            && self.gain_loss == 0.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for key in ParamKey::REAL {
            if !self.get(key).is_finite() {
                return Err(ModelError::NonFinite(key));
            }
        }
        if self.energy_unit != 1.0 {
            return Err(ModelError::EnergyUnit(self.energy_unit));
        }
        Ok(())
    }

    /// Reads a parameter as a real number (`L` converts, `bc` maps to 0/1).
    pub fn get(&self, key: ParamKey) -> f64 {
        match key {
            ParamKey::EnergyUnit => self.energy_unit,
            ParamKey::Cross => self.cross,
            ParamKey::Rung => self.rung,
            ParamKey::Flux => self.flux,
            ParamKey::ImagFlux => self.imag_flux,
            ParamKey::RungAsym => self.rung_asym,
            ParamKey::CrossBalanced => self.cross_balanced,
            ParamKey::CrossUnbalanced => self.cross_unbalanced,
            ParamKey::GainLoss => self.gain_loss,
            ParamKey::Cells => self.cells as f64,
            ParamKey::Boundary => match self.boundary {
                Boundary::Periodic => 0.0,
                Boundary::Open => 1.0,
            },
        }
    }

    /// Sets a parameter from a real value. `L` is rounded to the nearest
    /// integer; `bc` is not settable this way.
    pub fn set(&mut self, key: ParamKey, value: f64) -> Result<(), ModelError> {
        match key {
            ParamKey::EnergyUnit => self.energy_unit = value,
            ParamKey::Cross => self.cross = value,
            ParamKey::Rung => self.rung = value,
            ParamKey::Flux => self.flux = value,
            ParamKey::ImagFlux => self.imag_flux = value,
            ParamKey::RungAsym => self.rung_asym = value,
            ParamKey::CrossBalanced => self.cross_balanced = value,
            ParamKey::CrossUnbalanced => self.cross_unbalanced = value,
            ParamKey::GainLoss => self.gain_loss = value,
            ParamKey::Cells => {
                if !value.is_finite() || value < 0.0 {
                    return Err(ModelError::NonFinite(key));
                }
                self.cells = value.round() as usize;
            }
            ParamKey::Boundary => return Err(ModelError::NotNumeric(key)),
        }
        Ok(())
    }

    /// Copy with one parameter replaced.
    pub fn with(mut self, key: ParamKey, value: f64) -> Result<Self, ModelError> {
        self.set(key, value)?;
        Ok(self)
    }
}

/// Names of the fields of [`LadderParams`], spelled as in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKey {
    EnergyUnit,
    Cross,
    Rung,
    Flux,
    ImagFlux,
    RungAsym,
    CrossBalanced,
    CrossUnbalanced,
    GainLoss,
    Cells,
    Boundary,
}

impl ParamKey {
    pub const ALL: [ParamKey; 11] = [
        ParamKey::EnergyUnit,
        ParamKey::Cross,
        ParamKey::Rung,
        ParamKey::Flux,
        ParamKey::ImagFlux,
        ParamKey::RungAsym,
        ParamKey::CrossBalanced,
        ParamKey::CrossUnbalanced,
        ParamKey::GainLoss,
        ParamKey::Cells,
        ParamKey::Boundary,
    ];

    /// Keys holding real amplitudes.
    pub const REAL: [ParamKey; 9] = [
        ParamKey::EnergyUnit,
        ParamKey::Cross,
        ParamKey::Rung,
        ParamKey::Flux,
        ParamKey::ImagFlux,
        ParamKey::RungAsym,
        ParamKey::CrossBalanced,
        ParamKey::CrossUnbalanced,
        ParamKey::GainLoss,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamKey::EnergyUnit => "K",
            ParamKey::Cross => "r",
            ParamKey::Rung => "M",
            ParamKey::Flux => "theta",
            ParamKey::ImagFlux => "alpha",
            ParamKey::RungAsym => "m",
            ParamKey::CrossBalanced => "r1",
            ParamKey::CrossUnbalanced => "r2",
            ParamKey::GainLoss => "mu",
            ParamKey::Cells => "L",
            ParamKey::Boundary => "bc",
        }
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamKey {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::UnknownKey(s.into()))
    }
}

/// Coefficients of `h(k) = h0 I + hx sx + hy sy + hz sz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochCoefficients {
    pub h0: C64,
    pub hx: C64,
    pub hy: C64,
    pub hz: C64,
}

impl BlochCoefficients {
    /// `P = hx^2 + hy^2 + hz^2`; the band splitting is `2 sqrt(P)`.
    pub fn discriminant(&self) -> C64 {
        self.hx * self.hx + self.hy * self.hy + self.hz * self.hz
    }

    /// The 2x2 Bloch matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        h2x2(self)
    }

    /// `det(h - e I)`.
    pub fn char_poly(&self, e: C64) -> C64 {
        let d = self.h0 - e;
        d * d - self.discriminant()
    }
}

/// Bloch coefficients at momentum `k` with all deformations composed.
pub fn bloch(params: &LadderParams, k: f64) -> BlochCoefficients {
    let i = C64::i();
    let (sin_t, cos_t) = params.flux.sin_cos();
    let (sin_k, cos_k) = k.sin_cos();
    let grow = params.imag_flux.exp();
    let shrink = (-params.imag_flux).exp();

    let h0 = (C64::from(grow + shrink) * cos_t + i * (shrink - grow) * sin_t) * cos_k;
    let hz = -(C64::from(grow + shrink) * sin_t - i * (shrink - grow) * cos_t) * sin_k - i * params.gain_loss;
    let hx = C64::new(params.rung + 2.0 * params.cross * cos_k, 2.0 * params.cross_unbalanced * sin_k);
    let hy = i * (params.rung_asym + 2.0 * params.cross_balanced * cos_k);
    BlochCoefficients { h0, hx, hy, hz }
}

/// `h0 I + hx sx + hy sy + hz sz` as an explicit 2x2 matrix.
pub fn h2x2(c: &BlochCoefficients) -> ComplexMatrix {
    let i = C64::i();
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = c.h0 + c.hz;
    m[(0, 1)] = c.hx - i * c.hy;
    m[(1, 0)] = c.hx + i * c.hy;
    m[(1, 1)] = c.h0 - c.hz;
    m
}

/// Index of orbital `(x, leg)` in the interleaved real-space basis,
/// `x` counted from 0.
#[inline]
pub fn site_index(x: usize, leg_b: bool) -> usize {
    2 * x + usize::from(leg_b)
}

/// The `2L x 2L` real-space Hamiltonian in the basis
/// `(1,A), (1,B), (2,A), (2,B), ...`.
///
/// Bond amplitudes, with `x -> x+1` the forward direction:
///
/// | bond                    | amplitude              |
/// |-------------------------|------------------------|
/// | `(x,A) <- (x+1,A)`      | `e^{-alpha + i theta}` |
/// | `(x+1,A) <- (x,A)`      | `e^{alpha - i theta}`  |
/// | `(x,B) <- (x+1,B)`      | `e^{alpha - i theta}`  |
/// | `(x+1,B) <- (x,B)`      | `e^{-alpha + i theta}` |
/// | `(x,A) <- (x+1,B)`      | `r + r1 + r2`          |
/// | `(x+1,A) <- (x,B)`      | `r + r1 - r2`          |
/// | `(x,B) <- (x+1,A)`      | `r - r1 + r2`          |
/// | `(x+1,B) <- (x,A)`      | `r - r1 - r2`          |
/// | `(x,A) <- (x,B)`        | `M + m`                |
/// | `(x,B) <- (x,A)`        | `M - m`                |
///
/// and on-site `-i mu` on A, `+i mu` on B. With periodic boundaries the bond
/// `L -> 1` is added.
pub fn real_space(params: &LadderParams) -> Result<ComplexMatrix, ModelError> {
    params.validate()?;
    let cells = params.cells;
    if cells < 2 {
        return Err(ModelError::TooFewCells(cells));
    }
    let mut h = ComplexMatrix::zeros(2 * cells);

    let leg_a_fwd = C64::from_polar((-params.imag_flux).exp(), params.flux);
    let leg_a_bwd = C64::from_polar(params.imag_flux.exp(), -params.flux);
    let (leg_b_fwd, leg_b_bwd) = (leg_a_bwd, leg_a_fwd);
    let r = params.cross;
    let (r1, r2) = (params.cross_balanced, params.cross_unbalanced);
    let onsite = C64::new(0.0, params.gain_loss);

    for x in 0..cells {
        let (a, b) = (site_index(x, false), site_index(x, true));
        h[(a, a)] = -onsite;
        h[(b, b)] = onsite;
        h[(a, b)] = C64::from(params.rung + params.rung_asym);
        h[(b, a)] = C64::from(params.rung - params.rung_asym);
    }

    let bonds = match params.boundary {
        Boundary::Open => cells - 1,
        Boundary::Periodic => cells,
    };
    for x in 0..bonds {
        let y = (x + 1) % cells;
        let (ax, bx) = (site_index(x, false), site_index(x, true));
        let (ay, by) = (site_index(y, false), site_index(y, true));
        h[(ax, ay)] += leg_a_fwd;
        h[(ay, ax)] += leg_a_bwd;
        h[(bx, by)] += leg_b_fwd;
        h[(by, bx)] += leg_b_bwd;
        h[(ax, by)] += C64::from(r + r1 + r2);
        h[(ay, bx)] += C64::from(r + r1 - r2);
        h[(bx, ay)] += C64::from(r - r1 + r2);
        h[(by, ax)] += C64::from(r - r1 - r2);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn hermitian_bloch_at_zero_momentum() {
        let p = LadderParams::hermitian(0.7, 0.4, FRAC_PI_2);
        let c = bloch(&p, 0.0);
        assert!(close(c.h0, C64::from(0.0), 1e-15));
        assert!(close(c.hz, C64::from(0.0), 1e-15));
        assert!(close(c.hx, C64::from(0.7 + 0.8), 1e-15));
        assert!(close(c.hy, C64::from(0.0), 1e-15));
    }

    #[test]
    fn hermitian_coefficients_are_real() {
        let p = LadderParams::hermitian(0.3, 1.1, 0.9);
        for j in 0..32 {
            let c = bloch(&p, j as f64 * 0.2);
            for z in [c.h0, c.hx, c.hz] {
                assert!(z.im.abs() < 1e-15);
            }
            assert_eq!(c.hy, C64::from(0.0));
        }
    }

    #[test]
    fn imag_flux_bloch_matches_closed_form() {
        // alpha = 2, theta = 0, r = 1, M = 2.5 at k = pi/2, evaluated by hand:
        // h0 = 0, hz = -[0 - i(e^-2 - e^2)] = i(e^-2 - e^2), hx = 2.5.
        let p = LadderParams::hermitian(2.5, 1.0, 0.0).with_imag_flux(2.0);
        let c = bloch(&p, FRAC_PI_2);
        let e2 = 2.0f64.exp();
        assert!(close(c.h0, C64::from(0.0), 1e-14));
        assert!(close(c.hz, C64::new(0.0, 1.0 / e2 - e2), 1e-14));
        assert!(close(c.hx, C64::from(2.5), 1e-14));
    }

    #[test]
    fn gain_loss_bloch_example() {
        let p = LadderParams::hermitian(1.35, 1.0, FRAC_PI_2).with_gain_loss(0.5);
        let c = bloch(&p, FRAC_PI_2);
        assert!(close(c.h0, C64::from(0.0), 1e-15));
        assert!(close(c.hz, C64::new(-2.0, -0.5), 1e-15));
        assert!(close(c.hx, C64::from(1.35), 1e-15));
        assert!(close(c.hy, C64::from(0.0), 1e-15));
    }

    #[test]
    fn hy_only_from_rung_and_balanced_cross() {
        let p = LadderParams::hermitian(1.0, 1.0, 0.3)
            .with_imag_flux(0.4)
            .with_cross_unbalanced(0.2)
            .with_gain_loss(0.7);
        assert_eq!(bloch(&p, 0.8).hy, C64::from(0.0));
        let q = p.with_rung_asym(0.5);
        assert!(bloch(&q, 0.8).hy.norm() > 0.1);
    }

    #[test]
    fn h2x2_pauli_examples() {
        let z = C64::from(0.0);
        let one = C64::from(1.0);
        let sx = h2x2(&BlochCoefficients { h0: z, hx: one, hy: z, hz: z });
        assert_eq!(sx.as_slice(), &[z, one, one, z]);
        let id = h2x2(&BlochCoefficients { h0: C64::from(2.0), hx: z, hy: z, hz: z });
        assert_eq!(id.as_slice(), &[C64::from(2.0), z, z, C64::from(2.0)]);
        let isy = h2x2(&BlochCoefficients { h0: z, hx: z, hy: C64::i(), hz: z });
        assert_eq!(isy.as_slice(), &[z, one, -one, z]);
    }

    #[test]
    fn rejects_single_cell() {
        let p = LadderParams::hermitian(1.0, 1.0, 0.0).with_cells(1);
        assert_eq!(real_space(&p), Err(ModelError::TooFewCells(1)));
    }

    #[test]
    fn rejects_nonfinite_and_energy_unit() {
        let mut p = LadderParams::hermitian(f64::NAN, 1.0, 0.0);
        assert_eq!(p.validate(), Err(ModelError::NonFinite(ParamKey::Rung)));
        p.rung = 1.0;
        p.energy_unit = 2.0;
        assert_eq!(p.validate(), Err(ModelError::EnergyUnit(2.0)));
    }

    #[test]
    fn hermitian_periodic_matrix_is_hermitian() {
        let p = LadderParams::hermitian(0.4, 0.7, 1.1).with_cells(7).with_boundary(Boundary::Periodic);
        let h = real_space(&p).unwrap();
        assert!(h.max_abs_diff(&h.conj_transpose()) < 1e-15);
    }

    #[test]
    fn imag_flux_hopping_is_balanced() {
        let p = LadderParams::hermitian(1.0, 1.0, FRAC_PI_4).with_imag_flux(1.3).with_cells(4);
        let h = real_space(&p).unwrap();
        let (a0, a1, b0, b1) = (site_index(0, false), site_index(1, false), site_index(0, true), site_index(1, true));
        let forward = h[(a0, a1)] * h[(b0, b1)];
        let backward = h[(a1, a0)] * h[(b1, b0)];
        assert!(close(forward, backward, 1e-12));
        assert!(close(forward, C64::from(1.0), 1e-12));
    }

    #[test]
    fn open_chain_has_no_wrap_bonds() {
        let p = LadderParams::hermitian(1.0, 0.5, PI / 3.0).with_cells(5);
        let h = real_space(&p).unwrap();
        let last = site_index(4, false);
        assert_eq!(h[(0, last)], C64::from(0.0));
        assert_eq!(h[(last, 0)], C64::from(0.0));
        let hp = real_space(&p.with_boundary(Boundary::Periodic)).unwrap();
        assert!(hp[(last, 0)].norm() > 0.5);
    }

    #[test]
    fn param_keys_round_trip() {
        for key in ParamKey::ALL {
            assert_eq!(key.as_str().parse::<ParamKey>().unwrap(), key);
        }
        assert!("Theta".parse::<ParamKey>().is_err());
    }

    #[test]
    fn set_and_get_agree() {
        let mut p = LadderParams::default();
        for (n, key) in ParamKey::REAL.into_iter().enumerate() {
            p.set(key, n as f64 + 0.5).unwrap();
            assert_eq!(p.get(key), n as f64 + 0.5);
        }
        p.set(ParamKey::Cells, 39.6).unwrap();
        assert_eq!(p.cells, 40);
        assert!(p.set(ParamKey::Boundary, 0.0).is_err());
    }
}
