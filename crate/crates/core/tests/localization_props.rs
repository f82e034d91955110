//! Directed IPR invariants on random modes and skin-effect diagnostics of
//! the gain/loss ladder.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use creutz_core::localization::{band_dipr, density_profile, dipr, envelope_slope, fit_kappa, kappa_u, ModeProfile};
use creutz_core::spectral::{spectrum_obc, EdgeOptions, ModeBand};
use creutz_core::{LadderParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mode(rng: &mut ChaCha8Rng) -> ModeProfile {
    let cells = rng.gen_range(3..=80);
    // Mix of extended and exponentially localized envelopes.
    let rate = if rng.gen_bool(0.5) { rng.gen_range(-1.5..1.5) } else { 0.0 };
    let mut amp = |x: usize| {
        let env = (rate * x as f64).exp();
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
    };
    let amps_a = (0..cells).map(&mut amp).collect();
    let amps_b = (0..cells).map(&mut amp).collect();
    ModeProfile { amps_a, amps_b }.normalized()
}

#[test]
fn dipr_bounds_and_mirror_antisymmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1b2);
    for _ in 0..1000 {
        let mode = random_mode(&mut rng);
        let d = dipr(&mode).unwrap();
        assert!((-1.0..=1.0).contains(&d), "dIPR {d} out of bounds");
        let mirrored = dipr(&mode.mirrored()).unwrap();
        assert!((d + mirrored).abs() <= 1e-14, "{d} vs {mirrored}");
        let swapped = ModeProfile { amps_a: mode.amps_b.clone(), amps_b: mode.amps_a.clone() };
        assert!((dipr(&swapped).unwrap() - d).abs() <= 1e-15);
    }
}

#[test]
fn dipr_rejects_unnormalized_and_short_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mode = random_mode(&mut rng);
    mode.amps_a[0] += C64::new(1.0, 0.0);
    assert!(dipr(&mode).is_err());
    let short = ModeProfile { amps_a: vec![C64::new(0.5, 0.0); 2], amps_b: vec![C64::new(0.5, 0.0); 2] };
    assert!(dipr(&short).is_err());
}

fn gain_loss(rung: f64, flux: f64) -> LadderParams {
    LadderParams::hermitian(rung, 1.0, flux).with_gain_loss(0.5).with_cells(60)
}

#[test]
fn bulk_skin_depth_matches_closed_form() {
    let s = spectrum_obc(&gain_loss(1.35, FRAC_PI_2), &EdgeOptions::default()).unwrap();
    let mut fits: Vec<f64> = (0..s.len())
        .filter(|&i| s.band[i] != ModeBand::Edge)
        .filter_map(|i| fit_kappa(&s.profile(i)).ok())
        .map(f64::abs)
        .collect();
    assert!(fits.len() > s.len() / 2, "only {} bulk modes were localized", fits.len());
    fits.sort_by(f64::total_cmp);
    let median = fits[fits.len() / 2];
    let expected = kappa_u(1.35, 0.5).unwrap();
    assert!((median - expected).abs() <= 0.05 * expected, "fitted {median}, expected {expected}");
}

#[test]
fn bands_localize_on_opposite_ends_at_zero_rung() {
    let s = spectrum_obc(&gain_loss(0.0, FRAC_PI_4), &EdgeOptions::default()).unwrap();
    let r = band_dipr(&s);
    assert!(r.ibar_plus.abs() > 1e-3 && r.ibar_minus.abs() > 1e-3);
    assert_eq!(r.ibar_plus.signum(), -r.ibar_minus.signum());
    assert!(r.product < 0.0);
}

#[test]
fn lower_band_density_is_suppressed() {
    let s = spectrum_obc(&gain_loss(1.35, FRAC_PI_4), &EdgeOptions::default()).unwrap();
    let (plus, minus) = density_profile(&s);
    let max_plus = plus.iter().copied().fold(0.0, f64::max);
    let max_minus = minus.iter().copied().fold(0.0, f64::max);
    assert!(max_plus >= 3.0 * max_minus, "max rho+ {max_plus}, max rho- {max_minus}");
}

#[test]
fn hermitian_bulk_modes_are_extended() {
    let p = LadderParams::hermitian(1.35, 1.0, FRAC_PI_2).with_cells(60);
    let s = spectrum_obc(&p, &EdgeOptions::default()).unwrap();
    let mid = s.len() / 4;
    assert!(envelope_slope(&s.profile(mid)).abs() < 0.01);
}
