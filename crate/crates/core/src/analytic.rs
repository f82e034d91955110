//! Closed-form criteria: zero-energy transfer-matrix eigenvalues of the
//! imaginary-flux ladder, extreme points of `P(k)` and the resulting phase
//! boundaries of the rung/cross-asymmetric ladder, its flux-driven
//! transitions, degeneracy conditions of the unbalanced cross asymmetry,
//! and the edge-mode criterion with staggered gain and loss.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_traits::Float;

use crate::math::bisect;
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("transfer matrix is singular: r + dr/2 = 0")]
    SingularTransfer,
}

/// Location of the two transfer-matrix eigenvalues relative to the unit
/// circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransferRegime {
    BothInside,
    BothOutside,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferEigs {
    /// Eigenvalue of larger modulus.
    pub lambda1: C64,
    pub lambda2: C64,
    pub regime: TransferRegime,
}

/// `(R_+, R_-) = r +/- dr/2` with
/// `dr = (e^a + e^-a) sin(theta) - i (e^-a - e^a) cos(theta)`.
pub fn transfer_amplitudes(r: f64, theta: f64, alpha: f64) -> (C64, C64) {
    let (s, c) = theta.sin_cos();
    let (up, down) = (alpha.exp(), (-alpha).exp());
    let dr = C64::new((up + down) * s, -(down - up) * c);
    (C64::from(r) + dr * 0.5, C64::from(r) - dr * 0.5)
}

/// Eigenvalues `(-M +/- sqrt(M^2 - 4 R_+ R_-)) / (2 R_+)` of the
/// zero-energy transfer matrix, ordered by decreasing modulus.
pub fn transfer_eigs(rung: f64, r: f64, theta: f64, alpha: f64) -> Result<TransferEigs, AnalyticError> {
    let (rp, rm) = transfer_amplitudes(r, theta, alpha);
    if rp.norm() == 0.0 {
        return Err(AnalyticError::SingularTransfer);
    }
    let root = (C64::from(rung * rung) - rp * rm * 4.0).sqrt();
    let a = (root - rung) / (rp * 2.0);
    let b = (-root - rung) / (rp * 2.0);
    let (lambda1, lambda2) = if b.norm() > a.norm() { (b, a) } else { (a, b) };
    let regime = match (lambda1.norm() < 1.0, lambda2.norm() < 1.0) {
        (true, true) => TransferRegime::BothInside,
        (false, false) if lambda2.norm() > 1.0 => TransferRegime::BothOutside,
        _ => TransferRegime::Split,
    };
    Ok(TransferEigs { lambda1, lambda2, regime })
}

/// `|M| < |2r|`: a degenerate edge pair exists with imaginary flux.
pub fn alpha_edge_criterion(rung: f64, r: f64) -> bool {
    rung.abs() < (2.0 * r).abs()
}

/// Extreme values of `P(k)` for the rung/cross-asymmetric ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExtremes {
    pub p0: f64,
    pub ppi: f64,
    /// Interior extremum, present when `|cos k'| <= 1`.
    pub pkprime: Option<f64>,
    pub cos_kprime: Option<f64>,
}

impl PExtremes {
    pub fn min(&self) -> f64 {
        self.p0.min(self.ppi).min(self.pkprime.unwrap_or(f64::INFINITY))
    }

    pub fn max(&self) -> f64 {
        self.p0.max(self.ppi).max(self.pkprime.unwrap_or(f64::NEG_INFINITY))
    }
}

/// With `c = cos k` the discriminant is the quadratic
/// `P = A + 4 B c - 4 D c^2` where `A = M^2 - m^2 + 4 sin^2(theta)`,
/// `B = M r - m r1` and `D = sin^2(theta) - r^2 + r1^2`.
pub fn p_extremes(rung: f64, r: f64, theta: f64, m: f64, r1: f64) -> PExtremes {
    let s2 = theta.sin().powi(2);
    let a = rung * rung - m * m + 4.0 * s2;
    let b = rung * r - m * r1;
    let d = s2 - r * r + r1 * r1;
    let p0 = a + 4.0 * b - 4.0 * d;
    let ppi = a - 4.0 * b - 4.0 * d;
    let (pkprime, cos_kprime) = if d != 0.0 {
        let c = b / (2.0 * d);
        if c.abs() <= 1.0 {
            (Some(a + b * b / d), Some(c))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    PExtremes { p0, ppi, pkprime, cos_kprime }
}

/// Which extremum condition a boundary curve solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// `P(0) = 0`.
    ZeroMomentum,
    /// `P(pi) = 0`.
    PiMomentum,
    /// `P(k') = 0`.
    Interior,
    /// `cos k' = +/-1`, where the interior extremum enters or leaves.
    InteriorEdge,
}

/// One branch `m(r1)` of a phase-boundary condition at fixed `M, r, theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    /// `+1` or `-1`.
    pub branch: i8,
    rung: f64,
    r: f64,
    s2: f64,
}

impl BoundaryCurve {
    pub fn name(&self) -> &'static str {
        match (self.kind, self.branch > 0) {
            (CurveKind::ZeroMomentum, true) => "P0_plus",
            (CurveKind::ZeroMomentum, false) => "P0_minus",
            (CurveKind::PiMomentum, true) => "Ppi_plus",
            (CurveKind::PiMomentum, false) => "Ppi_minus",
            (CurveKind::Interior, true) => "Pkprime_plus",
            (CurveKind::Interior, false) => "Pkprime_minus",
            (CurveKind::InteriorEdge, true) => "coskprime_plus",
            (CurveKind::InteriorEdge, false) => "coskprime_minus",
        }
    }

    /// Critical `m` at the given `r1`; `None` where the branch is singular
    /// or complex.
    pub fn eval(&self, r1: f64) -> Option<f64> {
        let sign = f64::from(self.branch);
        let (rung, r, s2) = (self.rung, self.r, self.s2);
        let d = s2 - r * r + r1 * r1;
        let m = match self.kind {
            CurveKind::ZeroMomentum => sign * (rung + 2.0 * r) - 2.0 * r1,
            CurveKind::PiMomentum => 2.0 * r1 + sign * (rung - 2.0 * r),
            CurveKind::Interior => {
                // (r^2 - s^2) m^2 - 2 M r r1 m + (M^2 + 4 s^2) D + M^2 r^2 = 0
                let qa = r * r - s2;
                let qb = -2.0 * rung * r * r1;
                let qc = (rung * rung + 4.0 * s2) * d + rung * rung * r * r;
                if qa.abs() <= 1e-14 * (1.0 + qb.abs() + qc.abs()) {
                    if sign < 0.0 || qb == 0.0 {
                        return None;
                    }
                    -qc / qb
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc < 0.0 {
                        return None;
                    }
                    (-qb + sign * disc.sqrt()) / (2.0 * qa)
                }
            }
            CurveKind::InteriorEdge => {
                if r1 == 0.0 {
                    return None;
                }
                (rung * r - sign * 2.0 * d) / r1
            }
        };
        m.is_finite().then_some(m)
    }

    /// For interior-extremum curves, whether the extremum exists at
    /// `(r1, m)`; other curves always apply.
    pub fn applies(&self, r1: f64, m: f64) -> bool {
        match self.kind {
            CurveKind::Interior => {
                let d = self.s2 - self.r * self.r + r1 * r1;
                d != 0.0 && ((self.rung * self.r - m * r1) / (2.0 * d)).abs() <= 1.0
            }
            _ => true,
        }
    }
}

/// Candidate phase boundaries in the `(r1, m)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    pub rung: f64,
    pub r: f64,
    pub theta: f64,
    pub curves: Vec<BoundaryCurve>,
}

impl BoundarySet {
    /// Samples every curve at the given `r1` values, skipping `r1 = 0` and
    /// points where the curve does not exist.
    pub fn sample(&self, r1_values: &[f64]) -> Vec<(&'static str, f64, f64)> {
        let mut out = Vec::new();
        for c in &self.curves {
            for &r1 in r1_values {
                if r1 == 0.0 {
                    continue;
                }
                if let Some(m) = c.eval(r1) {
                    out.push((c.name(), r1, m));
                }
            }
        }
        out
    }
}

/// The curves `P(0) = 0`, `P(pi) = 0`, `P(k') = 0` and `cos k' = +/-1`
/// solved for `m` as functions of `r1`.
pub fn m_r1_boundaries(rung: f64, r: f64, theta: f64) -> BoundarySet {
    let s2 = theta.sin().powi(2);
    let mut curves = Vec::new();
    for kind in [CurveKind::ZeroMomentum, CurveKind::PiMomentum, CurveKind::Interior, CurveKind::InteriorEdge] {
        for branch in [1, -1] {
            curves.push(BoundaryCurve { kind, branch, rung, r, s2 });
        }
    }
    BoundarySet { rung, r, theta, curves }
}

/// Sign structure of `P(k)` over the Brillouin zone from its extremes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PSign {
    Positive,
    Negative,
    Mixed,
}

pub fn p_sign(e: &PExtremes) -> PSign {
    if e.min() > 0.0 {
        PSign::Positive
    } else if e.max() < 0.0 {
        PSign::Negative
    } else {
        PSign::Mixed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTransitions {
    /// Flux where the real parts of the two bands start to overlap,
    /// `E_-(0) = E_+(pi)`.
    pub overlap_theta: Option<f64>,
    /// Flux where the interior extremum of `P` touches zero.
    pub touching_theta: Option<f64>,
}

/// Search window for flux transitions.
pub const THETA_WINDOW: (f64, f64) = (1e-3, FRAC_PI_2 - 1e-3);

/// Flux values in `(0, pi/2)` where the real-spectrum ladder changes phase.
///
/// With `h0 = 2 cos(theta) cos k`, the overlap condition reads
/// `4 cos(theta) = sqrt(P(0)) + sqrt(P(pi))`; `P(0)` and `P(pi)` do not
/// depend on the flux. The touching condition `P(k') = 0` is scanned for
/// sign changes away from the pole of `P(k')`, then bisected.
pub fn m_r1_theta_transitions(rung: f64, r: f64, m: f64, r1: f64) -> ThetaTransitions {
    let (lo, hi) = THETA_WINDOW;
    let e = p_extremes(rung, r, 0.0, m, r1);
    let overlap_theta = if e.p0 >= 0.0 && e.ppi >= 0.0 {
        let f = |t: f64| 4.0 * t.cos() - e.p0.sqrt() - e.ppi.sqrt();
        (f(lo) * f(hi) <= 0.0).then(|| bisect(f, lo, hi, 1e-12))
    } else {
        None
    };

    let interior = |t: f64| {
        let x = p_extremes(rung, r, t, m, r1);
        x.pkprime.map(|p| (p, t.sin().powi(2) - r * r + r1 * r1))
    };
    const SCAN: usize = 4000;
    let mut touching_theta = None;
    let mut prev: Option<(f64, f64, f64)> = None;
    for i in 0..=SCAN {
        let t = lo + (hi - lo) * i as f64 / SCAN as f64;
        let cur = interior(t).map(|(p, d)| (t, p, d));
        if let (Some((t0, p0, d0)), Some((t1, p1, d1))) = (prev, cur) {
            if p0 * p1 <= 0.0 && d0 * d1 > 0.0 {
                let f = |t: f64| interior(t).map_or(f64::NAN, |(p, _)| p);
                touching_theta = Some(if p0 == 0.0 { t0 } else { bisect(f, t0, t1, 1e-12) });
                break;
            }
        }
        prev = cur;
    }
    ThetaTransitions { overlap_theta, touching_theta }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct R2Conditions {
    /// `M = +/-2r`: a diagonalizable degeneracy at `k = 0` or `pi`.
    pub dp: bool,
    /// `|r2| = |sin(theta)|` with `|M| < |2r|`: a pair of exceptional points.
    pub ep: bool,
}

pub const R2_TOL: f64 = 1e-12;

pub fn r2_conditions(rung: f64, r: f64, theta: f64, r2: f64, tol: f64) -> R2Conditions {
    let dp = (rung - 2.0 * r).abs() <= tol || (rung + 2.0 * r).abs() <= tol;
    let ep = (r2.abs() - theta.sin().abs()).abs() <= tol && rung.abs() < (2.0 * r).abs();
    R2Conditions { dp, ep }
}

/// `cos k = -M / 2r` at the exceptional points.
pub fn r2_ep_cos_k(rung: f64, r: f64) -> f64 {
    -rung / (2.0 * r)
}

/// `sqrt|M^2 - mu^2| < |2 sin(theta)|`; valid for `r = sin(theta)`.
pub fn mu_criterion(rung: f64, mu: f64, theta: f64) -> bool {
    (rung * rung - mu * mu).abs().sqrt() < (2.0 * theta.sin()).abs()
}

/// Boundaries `M = sqrt(mu^2 +/- 4 sin^2 theta)` of [`mu_criterion`] as
/// `(name, mu, M)` samples.
pub fn mu_boundaries(theta: f64, mu_values: &[f64]) -> Vec<(&'static str, f64, f64)> {
    let s2 = 4.0 * theta.sin().powi(2);
    let mut out = Vec::new();
    for (name, sign) in [("mu_plus", 1.0), ("mu_minus", -1.0)] {
        for &mu in mu_values {
            let sq = mu * mu + sign * s2;
            if sq >= 0.0 {
                out.push((name, mu, sq.sqrt()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{FRAC_PI_4, PI};

    use super::*;

    #[test]
    fn transfer_special_points() {
        let t = transfer_eigs(0.0, 1.0, FRAC_PI_2, 0.0).unwrap();
        assert_eq!(t.regime, TransferRegime::BothInside);
        assert!(t.lambda1.norm() < 1e-15);
        for (alpha, theta) in [(2.0, 0.3), (0.0, 1.0), (-1.0, FRAC_PI_2)] {
            let t = transfer_eigs(2.0, 1.0, theta, alpha).unwrap();
            let hit = [t.lambda1, t.lambda2].iter().any(|l| (l + 1.0).norm() < 1e-12);
            assert!(hit, "{t:?}");
        }
    }

    #[test]
    fn transfer_singular() {
        // R_+ = 0 needs r = -dr/2: alpha = 0, theta = pi/2 gives dr = 2.
        assert_eq!(transfer_eigs(1.0, -1.0, FRAC_PI_2, 0.0), Err(AnalyticError::SingularTransfer));
    }

    #[test]
    fn transfer_product_is_ratio() {
        let (rp, rm) = transfer_amplitudes(1.3, 0.7, 0.4);
        let t = transfer_eigs(0.9, 1.3, 0.7, 0.4).unwrap();
        assert!((t.lambda1 * t.lambda2 - rm / rp).norm() < 1e-14);
    }

    #[test]
    fn alpha_criterion() {
        assert!(alpha_edge_criterion(1.0, 1.0));
        assert!(!alpha_edge_criterion(2.0, 1.0));
        assert!(!alpha_edge_criterion(0.0, 0.0));
    }

    #[test]
    fn extremes_examples() {
        let e = p_extremes(3.0, 1.0, FRAC_PI_2, 2.5, 1.0);
        assert!((e.p0 - 4.75).abs() < 1e-14 && (e.ppi - 0.75).abs() < 1e-14);
        assert!((e.cos_kprime.unwrap() - 0.25).abs() < 1e-14 && (e.pkprime.unwrap() - 7.0).abs() < 1e-14);
        let e = p_extremes(3.0, 1.0, FRAC_PI_2, 4.0, 0.75);
        assert!((e.p0 + 5.25).abs() < 1e-14 && (e.ppi + 5.25).abs() < 1e-14);
        assert!((e.pkprime.unwrap() + 3.0).abs() < 1e-14);
        let e = p_extremes(1.2, 0.4, 0.9, 0.0, 0.0);
        assert!((e.p0 - 2.0f64.powi(2)).abs() < 1e-14);
        assert!((e.ppi - 0.4f64.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn explicit_curve_forms() {
        let set = m_r1_boundaries(3.0, 1.0, FRAC_PI_2);
        let get = |name: &str, r1: f64| set.curves.iter().find(|c| c.name() == name).unwrap().eval(r1).unwrap();
        assert!((get("P0_plus", 1.0) - 3.0).abs() < 1e-14);
        assert!((get("Pkprime_plus", 0.7) - (13.0 * 0.49 + 9.0) / 4.2).abs() < 1e-13);
        assert!((get("coskprime_plus", 0.7) - (3.0 - 2.0 * 0.49) / 0.7).abs() < 1e-13);
        let set = m_r1_boundaries(1.0, 1.0, FRAC_PI_2);
        let get = |name: &str, r1: f64| set.curves.iter().find(|c| c.name() == name).unwrap().eval(r1).unwrap();
        assert!((get("Ppi_minus", 0.5) - 2.0).abs() < 1e-14);
        assert!((get("Pkprime_plus", 0.5) - (5.0 * 0.25 + 1.0) / 1.0).abs() < 1e-14);
    }

    #[test]
    fn theta_transition_cases() {
        let t = m_r1_theta_transitions(3.0, 1.0, 2.5, 1.0);
        assert!((t.overlap_theta.unwrap() / PI - 0.2245).abs() < 5e-4);
        assert!(t.touching_theta.is_none());
        let t = m_r1_theta_transitions(1.0, 1.0, 1.5, 0.5);
        assert!((t.overlap_theta.unwrap() / PI - 0.2826).abs() < 5e-4);
        assert!((t.touching_theta.unwrap() / PI - 0.2021).abs() < 5e-4);
        assert!(m_r1_theta_transitions(3.0, 1.0, 0.0, 0.0).touching_theta.is_none());
    }

    #[test]
    fn r2_and_mu_criteria() {
        assert!(r2_conditions(3.0, 1.5, FRAC_PI_4, 0.5, R2_TOL).dp);
        assert!(r2_conditions(1.0, 1.5, FRAC_PI_4, FRAC_PI_4.sin(), R2_TOL).ep);
        assert!(!r2_conditions(1.0, 1.5, FRAC_PI_4, 0.0, R2_TOL).ep);
        assert!(mu_criterion(1.5, 2.0, FRAC_PI_2));
        assert!(!mu_criterion(3.0, 1.5, FRAC_PI_2));
        assert_eq!(mu_criterion(1.9, 0.0, FRAC_PI_2), 1.9 < 2.0);
    }
}
