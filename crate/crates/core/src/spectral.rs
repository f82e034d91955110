//! Band structures, spectral winding, gap classification, degeneracies,
//! edge-mode detection, the skin-effect predicate and the PBC-versus-OBC
//! transition comparison.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::linalg::{eig2, eigen_general, eigen_similar, eigenvalues, EigenDecomposition, EigenError, EigenOptions};
use crate::localization::{self, ModeProfile};
use crate::math::{bisect, golden_min, wrap_phase, TAU};
use crate::model::{bloch, real_space, Boundary, LadderParams, ModelError, ParamKey};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("momentum grid of {nk} points is below the minimum {min}")]
    GridTooSmall { nk: usize, min: usize },
    #[error("reference energy lies within {distance:e} of the periodic spectrum")]
    OnSpectrum { distance: f64 },
    #[error("winding not resolved on this grid (raw value {raw}); increase the grid size")]
    Unresolved { raw: f64 },
    #[error("classification undecided: decision margin {margin:e} below threshold")]
    Inconclusive { margin: f64 },
    #[error("open boundary conditions required")]
    NotOpen,
    #[error("at least {min} unit cells required, got {cells}")]
    TooFewCells { cells: usize, min: usize },
    #[error("sweep needs at least {min} points, got {points}")]
    SweepTooShort { points: usize, min: usize },
}

fn require_grid(nk: usize, min: usize) -> Result<(), SpectralError> {
    if nk < min {
        Err(SpectralError::GridTooSmall { nk, min })
    } else {
        Ok(())
    }
}

/// `k_j = 2 pi j / nk`.
pub fn kgrid(nk: usize) -> Vec<f64> {
    (0..nk).map(|j| TAU * j as f64 / nk as f64).collect()
}

/// Two Bloch bands on a uniform momentum grid, labeled so that each band
/// is continuous from one grid point to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub kgrid: Vec<f64>,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    pub params: LadderParams,
}

impl BandStructure {
    pub fn len(&self) -> usize {
        self.kgrid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kgrid.is_empty()
    }

    /// All sampled energies of both bands.
    pub fn energies(&self) -> impl Iterator<Item = C64> + '_ {
        self.plus.iter().chain(&self.minus).copied()
    }

    /// Smallest distance from `e` to a sampled band energy.
    pub fn distance_to(&self, e: C64) -> f64 {
        self.energies().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min)
    }
}

pub const MIN_BAND_GRID: usize = 64;

pub fn bands(params: &LadderParams, nk: usize) -> Result<BandStructure, SpectralError> {
    require_grid(nk, MIN_BAND_GRID)?;
    params.validate()?;
    let kgrid = kgrid(nk);
    let mut plus = Vec::with_capacity(nk);
    let mut minus = Vec::with_capacity(nk);
    for (j, &k) in kgrid.iter().enumerate() {
        let (a, b) = eig2(&bloch(params, k));
        if j == 0 {
            plus.push(a);
            minus.push(b);
            continue;
        }
        let (pa, pb) = (plus[j - 1], minus[j - 1]);
        let keep = (a - pa).norm() + (b - pb).norm();
        let swap = (b - pa).norm() + (a - pb).norm();
        if swap < keep {
            plus.push(b);
            minus.push(a);
        } else {
            plus.push(a);
            minus.push(b);
        }
    }
    Ok(BandStructure { kgrid, plus, minus, params: *params })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingResult {
    pub eref: C64,
    pub w: i64,
    pub nk: usize,
    /// Accumulated phase over `2 pi` before rounding.
    pub raw: f64,
}

/// Closest-approach threshold between a reference energy and the sampled
/// periodic spectrum.
pub const ON_SPECTRUM: f64 = 1e-6;
/// Largest accepted distance of the raw winding from an integer.
pub const WINDING_GUARD: f64 = 0.05;

/// Spectral winding of `det(h(k) - eref)` around the Brillouin zone.
pub fn winding_number(params: &LadderParams, eref: C64, nk: usize) -> Result<WindingResult, SpectralError> {
    require_grid(nk, 8)?;
    params.validate()?;
    let mut total = 0.0;
    let mut distance = f64::INFINITY;
    let det = |k: f64| bloch(params, k).char_poly(eref);
    let first = det(0.0);
    let mut prev = first;
    for j in 0..nk {
        let k = TAU * j as f64 / nk as f64;
        let (a, b) = eig2(&bloch(params, k));
        distance = distance.min((a - eref).norm()).min((b - eref).norm());
        let next = if j + 1 == nk { first } else { det(TAU * (j + 1) as f64 / nk as f64) };
        total += wrap_phase(next.arg() - prev.arg());
        prev = next;
    }
    if distance <= ON_SPECTRUM {
        return Err(SpectralError::OnSpectrum { distance });
    }
    let raw = total / TAU;
    let w = raw.round();
    if (raw - w).abs() >= WINDING_GUARD {
        return Err(SpectralError::Unresolved { raw });
    }
    Ok(WindingResult { eref, w: w as i64, nk, raw })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GapClass {
    RealLineGap,
    ImaginaryLineGap,
    GaplessBandTouching,
    GaplessOverlap,
    PointGapOnly,
}

impl GapClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GapClass::RealLineGap => "RealLineGap",
            GapClass::ImaginaryLineGap => "ImaginaryLineGap",
            GapClass::GaplessBandTouching => "GaplessBandTouching",
            GapClass::GaplessOverlap => "GaplessOverlap",
            GapClass::PointGapOnly => "PointGapOnly",
        }
    }

    pub fn is_gapless(self) -> bool {
        matches!(self, GapClass::GaplessBandTouching | GapClass::GaplessOverlap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Topology {
    Trivial,
    EdgeModes,
    NotApplicable,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Trivial => "Trivial",
            Topology::EdgeModes => "EdgeModes",
            Topology::NotApplicable => "NotApplicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseLabel {
    pub gap: GapClass,
    pub topological: Topology,
}

impl PhaseLabel {
    /// Combines a gap class with the presence of an edge pair. Edge modes
    /// count as topological only when a real line gap or a bare point gap
    /// protects them; gapless phases have no topological label.
    pub fn new(gap: GapClass, has_edge_pair: bool) -> Self {
        let topological = match gap {
            GapClass::RealLineGap | GapClass::PointGapOnly if has_edge_pair => Topology::EdgeModes,
            GapClass::GaplessBandTouching | GapClass::GaplessOverlap => Topology::NotApplicable,
            _ => Topology::Trivial,
        };
        Self { gap, topological }
    }
}

pub const MIN_GAP_GRID: usize = 256;
/// Decisions closer than this to a threshold are reported as inconclusive.
pub const GAP_MARGIN: f64 = 1e-6;
/// `|sqrt P|` below this counts as a band degeneracy.
const TOUCH: f64 = 1e-7;

/// Refines every grid-local minimum of `f` by golden-section search and
/// returns the overall minimum `(k, f(k))`.
fn refined_min<F: Fn(f64) -> f64>(f: F, nk: usize) -> (f64, f64) {
    let ks = kgrid(nk);
    let vals: Vec<f64> = ks.iter().map(|&k| f(k)).collect();
    let h = TAU / nk as f64;
    let mut best = (0.0, f64::INFINITY);
    for j in 0..nk {
        let prev = vals[(j + nk - 1) % nk];
        let next = vals[(j + 1) % nk];
        if vals[j] <= prev && vals[j] <= next {
            let (k, v) = golden_min(&f, ks[j] - h, ks[j] + h, 200);
            let (k, v) = if vals[j] < v { (ks[j], vals[j]) } else { (k, v) };
            if v < best.1 {
                best = (crate::math::wrap_angle(k), v);
            }
        }
    }
    best
}

/// Gap classification of the periodic bands.
///
/// When `P = hx^2 + hy^2 + hz^2` is real on the whole grid, its sign decides:
/// positive everywhere gives a real line gap (or an overlap when the real
/// parts of the bands interpenetrate), negative everywhere an imaginary line
/// gap, and a sign change a band touching. For complex `P` a degeneracy
/// means band touching; otherwise a vertical separating line gives a real
/// line gap, a horizontal one an imaginary line gap, and neither a point gap.
pub fn classify_gap(params: &LadderParams, nk: usize) -> Result<GapClass, SpectralError> {
    require_grid(nk, MIN_GAP_GRID)?;
    params.validate()?;
    let disc = |k: f64| bloch(params, k).discriminant();
    let ks = kgrid(nk);
    let ps: Vec<C64> = ks.iter().map(|&k| disc(k)).collect();
    let scale = ps.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let real = ps.iter().all(|p| p.im.abs() <= 1e-9 * scale);

    let bands = bands(params, nk)?;
    let (sep_re, sep_im) = separations(&bands);

    if real {
        let (_, pmin) = refined_min(|k| disc(k).re, nk);
        let (_, neg_pmax) = refined_min(|k| -disc(k).re, nk);
        let pmax = -neg_pmax;
        if pmin > GAP_MARGIN {
            return decide(sep_re, GapClass::RealLineGap, GapClass::GaplessOverlap);
        }
        if pmax < -GAP_MARGIN {
            return Ok(GapClass::ImaginaryLineGap);
        }
        if pmin < -GAP_MARGIN && pmax > GAP_MARGIN {
            return Ok(GapClass::GaplessBandTouching);
        }
        // An extremum of P sitting on zero is a touching point.
        if pmin.abs() <= TOUCH * TOUCH || pmax.abs() <= TOUCH * TOUCH {
            return Ok(GapClass::GaplessBandTouching);
        }
        return Err(SpectralError::Inconclusive { margin: pmin.abs().min(pmax.abs()) });
    }

    let (_, split) = refined_min(|k| disc(k).norm().sqrt(), nk);
    if split <= TOUCH {
        return Ok(GapClass::GaplessBandTouching);
    }
    if split < GAP_MARGIN {
        return Err(SpectralError::Inconclusive { margin: split });
    }
    if sep_re > GAP_MARGIN {
        return Ok(GapClass::RealLineGap);
    }
    if sep_im > GAP_MARGIN {
        return Ok(GapClass::ImaginaryLineGap);
    }
    if sep_re < -GAP_MARGIN && sep_im < -GAP_MARGIN {
        return Ok(GapClass::PointGapOnly);
    }
    Err(SpectralError::Inconclusive { margin: sep_re.abs().min(sep_im.abs()) })
}

fn decide(margin: f64, above: GapClass, below: GapClass) -> Result<GapClass, SpectralError> {
    if margin > GAP_MARGIN {
        Ok(above)
    } else if margin < -GAP_MARGIN {
        Ok(below)
    } else {
        Err(SpectralError::Inconclusive { margin: margin.abs() })
    }
}

/// Widths of the widest vertical and horizontal strips separating the two
/// bands (negative when the bands interpenetrate). At each momentum the
/// member with larger real (imaginary) part must lie on the right (top).
fn separations(b: &BandStructure) -> (f64, f64) {
    let mut right_min = f64::INFINITY;
    let mut left_max = f64::NEG_INFINITY;
    let mut top_min = f64::INFINITY;
    let mut bottom_max = f64::NEG_INFINITY;
    for (p, m) in b.plus.iter().zip(&b.minus) {
        let (r, l) = if p.re >= m.re { (p, m) } else { (m, p) };
        right_min = right_min.min(r.re);
        left_max = left_max.max(l.re);
        let (t, d) = if p.im >= m.im { (p, m) } else { (m, p) };
        top_min = top_min.min(t.im);
        bottom_max = bottom_max.max(d.im);
    }
    (right_min - left_max, top_min - bottom_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DegeneracyKind {
    /// `h(k) - E I` vanishes: diagonalizable degeneracy.
    Dp,
    /// Coalescing eigenvalues with a single eigenvector.
    Ep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyPoint {
    pub k: f64,
    pub kind: DegeneracyKind,
    pub energy: C64,
    pub params_at: LadderParams,
}

pub const MIN_DEGENERACY_GRID: usize = 512;
/// Default acceptance of `|P|` at a refined minimum.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Momenta where the two bands coalesce, from refined local minima of
/// `|P(k)|`. A point counts when `|P| <= tol` there.
pub fn find_degeneracies(params: &LadderParams, nk: usize, tol: f64) -> Result<Vec<DegeneracyPoint>, SpectralError> {
    require_grid(nk, MIN_DEGENERACY_GRID)?;
    params.validate()?;
    let abs_p = |k: f64| bloch(params, k).discriminant().norm();
    let ks = kgrid(nk);
    let vals: Vec<f64> = ks.iter().map(|&k| abs_p(k)).collect();
    let h = TAU / nk as f64;
    let mut found: Vec<DegeneracyPoint> = Vec::new();
    for j in 0..nk {
        let prev = vals[(j + nk - 1) % nk];
        let next = vals[(j + 1) % nk];
        if !(vals[j] <= prev && vals[j] <= next) {
            continue;
        }
        let (k, v) = golden_min(abs_p, ks[j] - h, ks[j] + h, 300);
        let (k, v) = if vals[j] <= v { (ks[j], vals[j]) } else { (k, v) };
        if v > tol {
            continue;
        }
        let k = snap(crate::math::wrap_angle(k));
        if found.iter().any(|d| circular_distance(d.k, k) < 2.0 * h) {
            continue;
        }
        let c = bloch(params, k);
        let scale = 1.0 + c.h0.norm();
        let kind = if c.hx.norm().max(c.hy.norm()).max(c.hz.norm()) <= tol.sqrt() * scale {
            DegeneracyKind::Dp
        } else {
            DegeneracyKind::Ep
        };
        found.push(DegeneracyPoint { k, kind, energy: c.h0, params_at: *params });
    }
    found.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(found)
}

/// Rounds momenta within a few ulps of 0, pi or 2 pi onto those values.
fn snap(k: f64) -> f64 {
    for target in [0.0, PI, TAU] {
        if (k - target).abs() < 1e-9 {
            return if target == TAU { 0.0 } else { target };
        }
    }
    k
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = crate::math::wrap_angle(a - b);
    d.min(TAU - d)
}

/// Thresholds of the edge-pair detector.
///
/// A pair is two eigenvalues that are each other's nearest neighbour, whose
/// splitting is at most `pair_ratio` times their distance `isolation` to the
/// rest of the spectrum, and whose isolation exceeds `min_isolation`. Both
/// members must also lie farther than `min_pbc_distance` from the sampled
/// periodic spectrum and, when `min_dipr` is set, have `|dIPR|` above it.
/// The dIPR filter is off by default: a hybridized Hermitian pair on a short
/// chain consists of bonding/antibonding combinations with dIPR near zero.
///
/// Pairs with splitting above `confirm_ratio` times their isolation must
/// reappear in the chain with one more cell, at a midpoint within a quarter
/// of the isolation. An edge pair converges exponentially in the length,
/// while an accidental near-degeneracy of two bulk levels moves by about a
/// level spacing and does not survive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOptions {
    pub min_isolation: f64,
    pub pair_ratio: f64,
    pub min_pbc_distance: Option<f64>,
    pub min_dipr: Option<f64>,
    pub confirm_ratio: Option<f64>,
    /// Grid used for the periodic spectrum when `min_pbc_distance` is set.
    pub nk_ref: usize,
    pub gauge: Gauge,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        Self {
            min_isolation: 0.03,
            pair_ratio: 0.2,
            min_pbc_distance: Some(0.02),
            min_dipr: None,
            confirm_ratio: Some(0.05),
            nk_ref: 1024,
            gauge: Gauge::Auto,
        }
    }
}

/// Imaginary gauge `psi_x -> exp(-kappa x) psi_x` applied to the open chain
/// before diagonalization. It is an exact similarity, so eigenvalues are
/// unchanged, but it removes the exponential non-normality of a uniformly
/// skin-localized chain, which otherwise turns the computed spectrum into
/// pseudospectral noise once `kappa L` is large.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Gauge {
    None,
    /// [`localization::uniform_skin_gauge`] where it applies, otherwise none.
    #[default]
    Auto,
    Fixed(f64),
}

/// Largest total scale exponent `|kappa| (L - 1)` a gauge may use.
pub const MAX_GAUGE_EXPONENT: f64 = 600.0;

impl Gauge {
    /// Resolved rate for `params`, clamped so the scale stays finite.
    pub fn rate(&self, params: &LadderParams) -> f64 {
        let kappa = match *self {
            Gauge::None => 0.0,
            Gauge::Auto => localization::uniform_skin_gauge(params).unwrap_or(0.0),
            Gauge::Fixed(k) => k,
        };
        let span = params.cells.saturating_sub(1).max(1) as f64;
        kappa.clamp(-MAX_GAUGE_EXPONENT / span, MAX_GAUGE_EXPONENT / span)
    }

    /// Per-orbital scale `exp(kappa x)` in the interleaved basis, or `None`
    /// when the resolved rate is zero.
    pub fn scale(&self, params: &LadderParams) -> Option<Vec<f64>> {
        let kappa = self.rate(params);
        if kappa == 0.0 || !kappa.is_finite() {
            return None;
        }
        Some((0..2 * params.cells).map(|i| (kappa * (i / 2) as f64).exp()).collect())
    }
}

/// One member of an edge pair, with the index of its partner in the same
/// sorted spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMode {
    pub index: usize,
    pub energy: C64,
    pub partner: Option<usize>,
}

/// Isolated near-degenerate pairs `(i, j)` with `i < j` among `values`.
pub fn isolated_pairs(values: &[C64], opts: &EdgeOptions) -> Vec<(usize, usize)> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let nearest: Vec<(usize, f64)> = (0..n)
        .map(|i| {
            let mut best = (usize::MAX, f64::INFINITY);
            for j in 0..n {
                if j != i {
                    let d = (values[i] - values[j]).norm();
                    if d < best.1 {
                        best = (j, d);
                    }
                }
            }
            best
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (j, split) = nearest[i];
        if j <= i || nearest[j].0 != i {
            continue;
        }
        let mut isolation = f64::INFINITY;
        for q in 0..n {
            if q != i && q != j {
                isolation = isolation.min((values[q] - values[i]).norm()).min((values[q] - values[j]).norm());
            }
        }
        if isolation > opts.min_isolation && split <= opts.pair_ratio * isolation {
            out.push((i, j));
        }
    }
    out
}

fn require_open(params: &LadderParams, min_cells: usize) -> Result<(), SpectralError> {
    if params.boundary != Boundary::Open {
        return Err(SpectralError::NotOpen);
    }
    if params.cells < min_cells {
        return Err(SpectralError::TooFewCells { cells: params.cells, min: min_cells });
    }
    Ok(())
}

fn pbc_reference(params: &LadderParams, opts: &EdgeOptions) -> Result<Option<BandStructure>, SpectralError> {
    Ok(match opts.min_pbc_distance {
        Some(_) => Some(bands(&params.with_boundary(Boundary::Periodic), opts.nk_ref.max(MIN_BAND_GRID))?),
        None => None,
    })
}

fn away_from_bulk(reference: &Option<BandStructure>, opts: &EdgeOptions, e: C64) -> bool {
    match (reference, opts.min_pbc_distance) {
        (Some(b), Some(d)) => b.distance_to(e) > d,
        _ => true,
    }
}

/// Number of edge modes (twice the number of detected pairs) from the
/// open-chain eigenvalues; eigenvectors are computed only when the dIPR
/// filter is enabled.
pub fn edge_count(params: &LadderParams, opts: &EdgeOptions) -> Result<usize, SpectralError> {
    if opts.min_dipr.is_some() {
        return Ok(spectrum_obc(params, opts)?.edge_count());
    }
    require_open(params, 2)?;
    let values = open_eigenvalues(params, opts)?;
    let reference = pbc_reference(params, opts)?;
    let far = |q: usize| away_from_bulk(&reference, opts, values[q]);
    let pairs: Vec<_> = isolated_pairs(&values, opts).into_iter().filter(|&(i, j)| far(i) && far(j)).collect();
    Ok(2 * confirmed_pairs(params, opts, &values, pairs)?.len())
}

fn open_eigenvalues(params: &LadderParams, opts: &EdgeOptions) -> Result<Vec<C64>, SpectralError> {
    let h = real_space(params)?;
    Ok(match opts.gauge.scale(params) {
        Some(d) => eigenvalues(&h.diagonal_similarity(&d))?,
        None => eigenvalues(&h)?,
    })
}

fn pair_geometry(values: &[C64], i: usize, j: usize) -> (f64, f64) {
    let split = (values[i] - values[j]).norm();
    let isolation = (0..values.len())
        .filter(|&q| q != i && q != j)
        .map(|q| (values[q] - values[i]).norm().min((values[q] - values[j]).norm()))
        .fold(f64::INFINITY, f64::min);
    (split, isolation)
}

/// Drops marginal pairs that do not reappear with one more cell; see
/// [`EdgeOptions::confirm_ratio`].
fn confirmed_pairs(
    params: &LadderParams,
    opts: &EdgeOptions,
    values: &[C64],
    pairs: Vec<(usize, usize)>,
) -> Result<Vec<(usize, usize)>, SpectralError> {
    let Some(ratio) = opts.confirm_ratio else { return Ok(pairs) };
    let marginal = |&(i, j): &(usize, usize)| {
        let (split, isolation) = pair_geometry(values, i, j);
        split > ratio * isolation
    };
    if !pairs.iter().any(marginal) {
        return Ok(pairs);
    }
    let longer = open_eigenvalues(&params.with_cells(params.cells + 1), opts)?;
    let mids: Vec<C64> = isolated_pairs(&longer, opts).into_iter().map(|(i, j)| 0.5 * (longer[i] + longer[j])).collect();
    Ok(pairs
        .into_iter()
        .filter(|pair| {
            if !marginal(pair) {
                return true;
            }
            let (i, j) = *pair;
            let mid = 0.5 * (values[i] + values[j]);
            let (_, isolation) = pair_geometry(values, i, j);
            mids.iter().any(|m| (m - mid).norm() <= 0.25 * isolation)
        })
        .collect())
}

/// Role of an open-chain eigenmode in the two-band bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeBand {
    Plus,
    Minus,
    Edge,
}

/// Open-chain spectrum with right eigenvectors, per-mode dIPR, edge tags
/// and band assignment of the bulk modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumObc {
    pub params: LadderParams,
    pub decomposition: EigenDecomposition,
    pub dipr: Vec<f64>,
    /// Partner index for edge modes.
    pub partner: Vec<Option<usize>>,
    pub band: Vec<ModeBand>,
}

impl SpectrumObc {
    pub fn values(&self) -> &[C64] {
        &self.decomposition.values
    }

    pub fn len(&self) -> usize {
        self.decomposition.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decomposition.values.is_empty()
    }

    pub fn profile(&self, index: usize) -> ModeProfile {
        ModeProfile::from_interleaved(&self.decomposition.vectors[index])
    }

    pub fn is_edge(&self, index: usize) -> bool {
        self.band[index] == ModeBand::Edge
    }

    pub fn edge_count(&self) -> usize {
        self.band.iter().filter(|b| **b == ModeBand::Edge).count()
    }

    pub fn edge_modes(&self) -> Vec<EdgeMode> {
        (0..self.len())
            .filter(|&i| self.is_edge(i))
            .map(|i| EdgeMode { index: i, energy: self.values()[i], partner: self.partner[i] })
            .collect()
    }
}

/// Diagonalizes the open chain and tags edge pairs and bulk bands. Bulk
/// modes are split at the median real part; modes exactly at the median go
/// to the upper band.
pub fn spectrum_obc(params: &LadderParams, opts: &EdgeOptions) -> Result<SpectrumObc, SpectralError> {
    require_open(params, 3)?;
    let h = real_space(params)?;
    let decomposition = match opts.gauge.scale(params) {
        Some(d) => eigen_similar(&h, &d, &EigenOptions::default())?,
        None => eigen_general(&h)?,
    };
    let values = &decomposition.values;
    let n = values.len();
    let dipr: Vec<f64> = decomposition
        .vectors
        .iter()
        .map(|v| localization::dipr_unchecked(&ModeProfile::from_interleaved(v)))
        .collect();

    let reference = pbc_reference(params, opts)?;
    let keep = |q: usize| opts.min_dipr.is_none_or(|t| dipr[q].abs() > t) && away_from_bulk(&reference, opts, values[q]);
    let pairs: Vec<_> = isolated_pairs(values, opts).into_iter().filter(|&(i, j)| keep(i) && keep(j)).collect();
    let mut partner = vec![None; n];
    for (i, j) in confirmed_pairs(params, opts, values, pairs)? {
        partner[i] = Some(j);
        partner[j] = Some(i);
    }

    let mut bulk_re: Vec<f64> = (0..n).filter(|&i| partner[i].is_none()).map(|i| values[i].re).collect();
    bulk_re.sort_by(f64::total_cmp);
    let median = match bulk_re.len() {
        0 => 0.0,
        m if m % 2 == 1 => bulk_re[m / 2],
        m => 0.5 * (bulk_re[m / 2 - 1] + bulk_re[m / 2]),
    };
    let band = (0..n)
        .map(|i| {
            if partner[i].is_some() {
                ModeBand::Edge
            } else if values[i].re >= median {
                ModeBand::Plus
            } else {
                ModeBand::Minus
            }
        })
        .collect();
    Ok(SpectrumObc { params: *params, decomposition, dipr, partner, band })
}

pub const MIN_EDGE_CELLS: usize = 20;

/// Edge modes of the open chain.
pub fn find_edge_modes(params: &LadderParams, opts: &EdgeOptions) -> Result<Vec<EdgeMode>, SpectralError> {
    require_open(params, MIN_EDGE_CELLS)?;
    Ok(spectrum_obc(params, opts)?.edge_modes())
}

/// Gap class of the periodic bands combined with the open-chain edge pairs.
pub fn phase_label(params: &LadderParams, nk: usize, opts: &EdgeOptions) -> Result<PhaseLabel, SpectralError> {
    let gap = classify_gap(params, nk)?;
    let open = params.with_boundary(Boundary::Open);
    let edges = edge_count(&open, opts)?;
    Ok(PhaseLabel::new(gap, edges > 0))
}

/// Whether some reference energy inside the bounding box of the periodic
/// spectrum has nonzero spectral winding.
pub fn nhse_predicate(params: &LadderParams, nk: usize) -> Result<bool, SpectralError> {
    require_grid(nk, MIN_GAP_GRID)?;
    let b = bands(params, nk)?;
    let (mut re0, mut re1, mut im0, mut im1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for e in b.energies() {
        re0 = re0.min(e.re);
        re1 = re1.max(e.re);
        im0 = im0.min(e.im);
        im1 = im1.max(e.im);
    }
    if im1 - im0 < 1e-9 || re1 - re0 < 1e-12 {
        // A spectrum on a line encloses nothing.
        return Ok(false);
    }
    const GRID: usize = 24;
    for a in 0..GRID {
        for c in 0..GRID {
            let e = C64::new(
                re0 + (re1 - re0) * (a as f64 + 0.5) / GRID as f64,
                im0 + (im1 - im0) * (c as f64 + 0.5) / GRID as f64,
            );
            if b.distance_to(e) < 1e-3 {
                continue;
            }
            match winding_number(params, e, nk) {
                Ok(r) if r.w != 0 => return Ok(true),
                _ => {}
            }
        }
    }
    Ok(false)
}

/// Result of comparing periodic gap closings with open-chain edge
/// transitions along a one-parameter path.
#[derive(Debug, Clone, PartialEq)]
pub struct BbcReport {
    pub parameter: ParamKey,
    pub pbc_closing: Vec<f64>,
    pub obc_closing: Vec<f64>,
    pub conventional_bbc: bool,
    pub step: f64,
}

pub const MIN_SWEEP_POINTS: usize = 50;

/// Periodic closings are the parameter values where the minimum over `k`
/// of the band splitting `|sqrt P|` reaches zero: isolated zeros are
/// located by golden-section search and the ends of gapless intervals by
/// bisection. Open-chain closings are the values where the edge-pair count
/// changes, refined by bisection. The correspondence holds when both sets
/// have equal size and every closing lies within one sweep step of a
/// closing of the other kind.
pub fn bbc_check(
    base: &LadderParams,
    key: ParamKey,
    values: &[f64],
    nk: usize,
    cells: usize,
    opts: &EdgeOptions,
) -> Result<BbcReport, SpectralError> {
    if values.len() < MIN_SWEEP_POINTS {
        return Err(SpectralError::SweepTooShort { points: values.len(), min: MIN_SWEEP_POINTS });
    }
    require_grid(nk, MIN_GAP_GRID)?;
    let at = |t: f64| base.with(key, t);
    let step = values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);

    let gap_fn = |t: f64| -> Result<f64, SpectralError> {
        let p = at(t)?;
        p.validate()?;
        Ok(refined_min(|k| bloch(&p, k).discriminant().norm().sqrt(), nk).1)
    };
    let mut g = Vec::with_capacity(values.len());
    for &t in values {
        g.push(gap_fn(t)?);
    }
    let closed = |x: f64| x <= GAP_MARGIN;
    let mut pbc = Vec::new();
    for i in 0..values.len() {
        let (t, gi) = (values[i], g[i]);
        if i + 1 < values.len() && closed(gi) != closed(g[i + 1]) {
            let sign = |t: f64| if closed(gap_fn(t).unwrap_or(f64::INFINITY)) { 1.0 } else { -1.0 };
            pbc.push(bisect(sign, t, values[i + 1], 0.0));
        }
        if closed(gi) {
            continue;
        }
        let left = if i > 0 { g[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < values.len() { g[i + 1] } else { f64::INFINITY };
        if gi <= left && gi <= right {
            let lo = if i > 0 { values[i - 1] } else { t };
            let hi = if i + 1 < values.len() { values[i + 1] } else { t };
            let (tm, gm) = golden_min(|x| gap_fn(x).unwrap_or(f64::INFINITY), lo, hi, 200);
            if closed(gm) && !pbc.iter().any(|&q: &f64| (q - tm).abs() < 0.5 * step) {
                pbc.push(tm);
            }
        }
    }

    let count = |t: f64| -> Result<usize, SpectralError> {
        let p = at(t)?.with_cells(cells).with_boundary(Boundary::Open);
        edge_count(&p, opts)
    };
    let mut counts = Vec::with_capacity(values.len());
    for &t in values {
        counts.push(count(t)?);
    }
    let mut obc = Vec::new();
    for i in 0..values.len() - 1 {
        if counts[i] != counts[i + 1] {
            let (mut lo, mut hi) = (values[i], values[i + 1]);
            let c_lo = counts[i];
            for _ in 0..12 {
                let mid = 0.5 * (lo + hi);
                if count(mid)? == c_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            obc.push(0.5 * (lo + hi));
        }
    }
    pbc.sort_by(f64::total_cmp);
    let pbc = merge_within(&pbc, step);
    let conventional_bbc = pbc.len() == obc.len()
        && pbc.iter().all(|p| obc.iter().any(|o| (o - p).abs() <= step))
        && obc.iter().all(|o| pbc.iter().any(|p| (o - p).abs() <= step));
    Ok(BbcReport { parameter: key, pbc_closing: pbc, obc_closing: obc, conventional_bbc, step })
}

/// Collapses runs of sorted points spanning less than `width` (such as the
/// two ends of a closing interval narrower than the gap margin) into their
/// midpoints.
fn merge_within(sorted: &[f64], width: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] - sorted[i] < width {
            j += 1;
        }
        out.push(0.5 * (sorted[i] + sorted[j]));
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;

    fn herm(m: f64, r: f64, theta: f64) -> LadderParams {
        LadderParams::hermitian(m, r, theta)
    }

    #[test]
    fn grid_guards() {
        let p = herm(0.25, 0.5, FRAC_PI_2);
        assert!(matches!(bands(&p, 10), Err(SpectralError::GridTooSmall { .. })));
        assert!(matches!(classify_gap(&p, 100), Err(SpectralError::GridTooSmall { .. })));
        assert!(matches!(find_degeneracies(&p, 100, DEGENERACY_TOL), Err(SpectralError::GridTooSmall { .. })));
        assert!(matches!(edge_count(&p.with_boundary(Boundary::Periodic), &EdgeOptions::default()), Err(SpectralError::NotOpen)));
        assert!(matches!(find_edge_modes(&p.with_cells(10), &EdgeOptions::default()), Err(SpectralError::TooFewCells { .. })));
    }

    #[test]
    fn hermitian_bands_gapped_and_overlapping() {
        let b = bands(&herm(0.25, 0.5, FRAC_PI_2), 256).unwrap();
        assert!(b.energies().all(|e| e.im.abs() < 1e-12));
        let gap = b.plus.iter().zip(&b.minus).map(|(a, c)| (a - c).norm()).fold(f64::INFINITY, f64::min);
        assert!(gap > 0.1);

        let b = bands(&herm(0.75, 0.25, FRAC_PI_4), 256).unwrap();
        let max_minus = b.minus.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let min_plus = b.plus.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
        assert!(max_minus > min_plus);
    }

    #[test]
    fn bands_match_eig2_multiset() {
        let p = herm(1.0, 1.5, FRAC_PI_4).with_cross_unbalanced(0.5);
        let b = bands(&p, 128).unwrap();
        for (j, &k) in b.kgrid.iter().enumerate() {
            let (a, c) = eig2(&bloch(&p, k));
            let (x, y) = (b.plus[j], b.minus[j]);
            let direct = (a - x).norm().max((c - y).norm());
            let swapped = (a - y).norm().max((c - x).norm());
            assert!(direct.min(swapped) < 1e-12);
        }
    }

    #[test]
    fn gain_loss_band_map() {
        let p = herm(0.0, 1.0, FRAC_PI_4).with_gain_loss(0.5);
        for j in 0..64 {
            let k = TAU * j as f64 / 64.0;
            let (ap, am) = eig2(&bloch(&p, k));
            let (bp, bm) = eig2(&bloch(&p, k + PI));
            let mapped = [-bm.conj(), -bp.conj()];
            let ok = |x: C64| mapped.iter().any(|y| (x - y).norm() < 1e-12);
            assert!(ok(ap) && ok(am));
        }
    }

    #[test]
    fn winding_examples() {
        let p = herm(0.25, 0.5, FRAC_PI_2);
        assert_eq!(winding_number(&p, C64::new(0.0, 10.0), 256).unwrap().w, 0);

        let q = herm(1.5, 1.5, 0.0).with_cross_unbalanced(0.5);
        for (theta, e) in [(0.0, -1.5), (FRAC_PI_4, -2.25)] {
            let q = q.with(ParamKey::Flux, theta).unwrap();
            let w = winding_number(&q, C64::new(e, 0.0), 1024).unwrap();
            assert_eq!(w.w, 2);
            assert!((w.raw - 2.0).abs() < 1e-9);
            assert_eq!(winding_number(&q, C64::new(e, 0.0), 2048).unwrap().w, 2);
        }
    }

    #[test]
    fn winding_rejects_reference_on_spectrum() {
        let p = herm(0.25, 0.5, FRAC_PI_2);
        let e = eig2(&bloch(&p, 0.0)).0;
        assert!(matches!(winding_number(&p, e, 256), Err(SpectralError::OnSpectrum { .. })));
    }

    #[test]
    fn gap_examples() {
        let a = herm(3.0, 1.0, FRAC_PI_2).with_rung_asym(2.5).with_cross_balanced(1.0);
        assert_eq!(classify_gap(&a, 512).unwrap(), GapClass::RealLineGap);
        let b = herm(3.0, 1.0, FRAC_PI_2).with_rung_asym(4.0).with_cross_balanced(0.75);
        assert_eq!(classify_gap(&b, 512).unwrap(), GapClass::ImaginaryLineGap);
        assert_eq!(classify_gap(&herm(0.75, 0.25, FRAC_PI_4), 512).unwrap(), GapClass::GaplessOverlap);
        assert_eq!(classify_gap(&herm(0.25, 0.5, FRAC_PI_2), 512).unwrap(), GapClass::RealLineGap);
    }

    #[test]
    fn gap_touching_and_inconclusive() {
        // M = 2r closes the gap at k = pi.
        let p = herm(1.0, 0.5, FRAC_PI_2);
        assert_eq!(classify_gap(&p, 512).unwrap(), GapClass::GaplessBandTouching);
        let near = herm(1.0 + 1e-9, 0.5, FRAC_PI_2);
        assert!(matches!(
            classify_gap(&near, 512),
            Ok(GapClass::GaplessBandTouching) | Err(SpectralError::Inconclusive { .. })
        ));
    }

    #[test]
    fn phase_label_invariant() {
        assert_eq!(PhaseLabel::new(GapClass::RealLineGap, true).topological, Topology::EdgeModes);
        assert_eq!(PhaseLabel::new(GapClass::PointGapOnly, true).topological, Topology::EdgeModes);
        assert_eq!(PhaseLabel::new(GapClass::RealLineGap, false).topological, Topology::Trivial);
        assert_eq!(PhaseLabel::new(GapClass::GaplessOverlap, true).topological, Topology::NotApplicable);
        assert!(GapClass::GaplessBandTouching.is_gapless());
        assert!(!GapClass::ImaginaryLineGap.is_gapless());
    }

    #[test]
    fn degeneracy_examples() {
        let dp = herm(3.0, 1.5, FRAC_PI_4).with_cross_unbalanced(0.5);
        let d = find_degeneracies(&dp, 512, DEGENERACY_TOL).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DegeneracyKind::Dp);
        assert!((d[0].k - PI).abs() < 1e-9);

        let ep = herm(1.0, 1.5, FRAC_PI_4).with_cross_unbalanced(FRAC_PI_4.sin());
        let d = find_degeneracies(&ep, 512, DEGENERACY_TOL).unwrap();
        assert_eq!(d.len(), 2);
        for x in &d {
            assert_eq!(x.kind, DegeneracyKind::Ep);
            assert!((x.k.cos() + 1.0 / 3.0).abs() < 1e-6);
        }

        assert!(find_degeneracies(&herm(1.0, 1.5, FRAC_PI_2), 512, DEGENERACY_TOL).unwrap().is_empty());
    }

    #[test]
    fn merge_collapses_narrow_runs() {
        assert_eq!(merge_within(&[1.0 - 1e-6, 1.0 + 1e-6, 2.0], 0.05), vec![1.0, 2.0]);
        assert_eq!(merge_within(&[0.0, 0.1], 0.05), vec![0.0, 0.1]);
        assert!(merge_within(&[], 0.05).is_empty());
    }

    #[test]
    fn isolated_pairs_basic() {
        let v = [C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1e-9, 0.0), C64::new(1.0, 0.0)];
        assert_eq!(isolated_pairs(&v, &EdgeOptions::default()), vec![(1, 2)]);
        // Too close to the rest.
        let v = [C64::new(-0.02, 0.0), C64::new(0.0, 0.0), C64::new(1e-9, 0.0), C64::new(1.0, 0.0)];
        assert!(isolated_pairs(&v, &EdgeOptions::default()).is_empty());
        assert!(isolated_pairs(&v[..2], &EdgeOptions::default()).is_empty());
    }

    #[test]
    fn hermitian_edge_modes() {
        let opts = EdgeOptions::default();
        let topo = herm(0.25, 0.5, FRAC_PI_2).with_cells(30);
        assert_eq!(edge_count(&topo, &opts).unwrap(), 2);
        let modes = find_edge_modes(&topo, &opts).unwrap();
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].partner, Some(modes[1].index));
        assert!(find_edge_modes(&herm(0.75, 0.25, FRAC_PI_2).with_cells(30), &opts).unwrap().is_empty());
    }

    #[test]
    fn imaginary_flux_edge_pair() {
        let opts = EdgeOptions::default();
        let p = herm(1.0, 1.0, FRAC_PI_2).with_imag_flux(2.0).with_cells(200);
        let s = spectrum_obc(&p, &opts).unwrap();
        assert_eq!(s.edge_count(), 2);
        let modes = s.edge_modes();
        let dipr: Vec<f64> = modes.iter().map(|m| s.dipr[m.index]).collect();
        assert!(dipr[0] * dipr[1] < 0.0, "pair members sit at opposite ends: {dipr:?}");

        let q = herm(1.0, 1.0, 0.0).with_imag_flux(2.0).with_cells(60);
        let modes = find_edge_modes(&q, &opts).unwrap();
        assert_eq!(modes.len(), 2);
        assert!(modes.iter().all(|m| m.energy.im.abs() < 1e-6));
    }

    #[test]
    fn spectrum_obc_bookkeeping() {
        let p = herm(0.25, 0.5, FRAC_PI_2).with_gain_loss(0.3).with_cells(30);
        let s = spectrum_obc(&p, &EdgeOptions::default()).unwrap();
        let plus = s.band.iter().filter(|&&b| b == ModeBand::Plus).count();
        let minus = s.band.iter().filter(|&&b| b == ModeBand::Minus).count();
        let edge = s.band.iter().filter(|&&b| b == ModeBand::Edge).count();
        assert_eq!(plus + minus + edge, s.len());
        assert_eq!(edge, s.edge_count());
        assert!(plus >= minus && plus - minus <= 1);
        assert!(s.decomposition.residuals_within(TOL_EIG_CHECK));
    }

    const TOL_EIG_CHECK: f64 = 1e-10;

    #[test]
    fn nhse_examples() {
        assert!(!nhse_predicate(&herm(1.0, 1.0, FRAC_PI_2).with_imag_flux(0.5), 256).unwrap());
        assert!(!nhse_predicate(&herm(3.0, 1.0, FRAC_PI_2).with_rung_asym(2.5).with_cross_balanced(1.0), 256).unwrap());
        assert!(nhse_predicate(&herm(1.5, 1.5, FRAC_PI_4).with_cross_unbalanced(0.5), 256).unwrap());
    }

    #[test]
    fn auto_gauge_only_in_uniform_skin_regime() {
        let p = herm(3.0, 1.0, FRAC_PI_2).with_gain_loss(2.4).with_cells(100);
        let k = Gauge::Auto.rate(&p);
        assert!((k + 0.5 * (5.4f64 / 0.6).ln()).abs() < 1e-12);
        assert_eq!(Gauge::Auto.rate(&p.with(ParamKey::Cross, -1.0).unwrap()), -k);
        assert_eq!(Gauge::Auto.rate(&p.with_cross_unbalanced(0.1)), 0.0);
        assert_eq!(Gauge::None.rate(&p), 0.0);
        assert!(Gauge::Fixed(50.0).rate(&p) <= MAX_GAUGE_EXPONENT / 99.0);
        assert!(Gauge::None.scale(&p).is_none());
    }

    #[test]
    fn gauge_removes_pseudospectral_noise() {
        // Strong uniform skin effect: the gauged spectrum is exactly real.
        let p = herm(3.0, 1.0, FRAC_PI_2).with_gain_loss(2.4).with_cells(100);
        let h = real_space(&p).unwrap();
        let d = Gauge::Auto.scale(&p).unwrap();
        let values = eigenvalues(&h.diagonal_similarity(&d)).unwrap();
        assert!(values.iter().all(|e| e.im.abs() < 1e-8));
        let s = spectrum_obc(&p, &EdgeOptions::default()).unwrap();
        assert!(s.decomposition.max_residual() <= 1e-10 * s.decomposition.norm);
    }
}
