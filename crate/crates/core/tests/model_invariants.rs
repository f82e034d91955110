//! Symmetry identities of the Bloch Hamiltonian and consistency between the
//! Bloch and real-space forms.

use std::f64::consts::{PI, TAU};

use creutz_core::linalg::{eig2, eigenvalues};
use creutz_core::model::{bloch, h2x2, real_space};
use creutz_core::{Boundary, ComplexMatrix, LadderParams, C64};
use proptest::prelude::*;

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn conjugate_by_sigma_x(h: &ComplexMatrix) -> ComplexMatrix {
    let s = sigma_x();
    s.matmul(h).matmul(&s)
}

fn grid256() -> impl Iterator<Item = f64> {
    (0..256).map(|j| -PI + TAU * j as f64 / 256.0)
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Greedy nearest matching; adequate for well separated spectra.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn imaginary_flux_sigma_x_identity(rung in -3.0..3.0f64, cross in -2.0..2.0f64, flux in -3.2..3.2f64, alpha in -2.0..2.0f64) {
        let p = LadderParams::hermitian(rung, cross, flux).with_imag_flux(alpha);
        for k in grid256() {
            let lhs = conjugate_by_sigma_x(&h2x2(&bloch(&p, k)));
            let rhs = h2x2(&bloch(&p, -k));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn rung_cross_asymmetry_transpose_identity(rung in -3.0..3.0f64, cross in -2.0..2.0f64, flux in -3.2..3.2f64, m in -2.0..2.0f64, r1 in -2.0..2.0f64) {
        let p = LadderParams::hermitian(rung, cross, flux).with_rung_asym(m).with_cross_balanced(r1);
        for k in grid256() {
            let lhs = conjugate_by_sigma_x(&h2x2(&bloch(&p, k)));
            let rhs = h2x2(&bloch(&p, -k)).transpose();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn eta_is_momentum_independent(rung in -3.0..3.0f64, cross in -2.0..2.0f64, flux in 0.1..1.4f64, alpha in 0.1..2.0f64) {
        let p = LadderParams::hermitian(rung, cross, flux).with_imag_flux(alpha);
        let expected = flux.tan() / alpha.tanh();
        for k in grid256().filter(|k| k.sin().abs() > 1e-3) {
            let hz = bloch(&p, k).hz;
            let eta = hz.re / hz.im;
            prop_assert!((eta - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn gain_loss_band_map_at_zero_rung(cross in -2.0..2.0f64, flux in -3.2..3.2f64, mu in -3.0..3.0f64) {
        let p = LadderParams::hermitian(0.0, cross, flux).with_gain_loss(mu);
        for k in grid256() {
            let (plus, minus) = eig2(&bloch(&p, k));
            let (pp, pm) = eig2(&bloch(&p, k + PI));
            let image = [-pm.conj(), -pp.conj()];
            prop_assert!(multiset_distance(&[plus, minus], &image) <= 1e-10);
            // Labels are fixed by the real part; they are ambiguous only
            // where the two bands share it.
            if (plus.re - minus.re).abs() > 1e-6 {
                prop_assert!((plus - image[0]).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn periodic_chain_reproduces_bloch_bands(
        rung in -2.0..2.0f64, cross in -1.5..1.5f64, flux in -3.2..3.2f64,
        alpha in -0.7..0.7f64, m in -1.0..1.0f64, r1 in -1.0..1.0f64,
        r2 in -1.0..1.0f64, mu in -1.0..1.0f64, cells in 3usize..8,
    ) {
        let p = LadderParams::hermitian(rung, cross, flux)
            .with_imag_flux(alpha)
            .with_rung_asym(m)
            .with_cross_balanced(r1)
            .with_cross_unbalanced(r2)
            .with_gain_loss(mu)
            .with_cells(cells)
            .with_boundary(Boundary::Periodic);
        let h = real_space(&p).unwrap();
        let mut expected = Vec::new();
        for j in 0..cells {
            let (a, b) = eig2(&bloch(&p, TAU * j as f64 / cells as f64));
            expected.push(a);
            expected.push(b);
        }
        // Each Bloch block is diagonalized exactly, so compare by determinant:
        // det(H - E) must vanish at every Bloch eigenvalue.
        let got = eigenvalues(&h).unwrap();
        let scale = 1.0 + h.frobenius_norm();
        let d = multiset_distance(&sorted(expected), &sorted(got));
        prop_assume!(d.is_finite());
        // Exceptional points degrade accuracy to sqrt(eps); allow for that.
        prop_assert!(d <= 1e-6 * scale, "distance {}", d);
    }

    #[test]
    fn hermitian_params_give_hermitian_matrix(rung in -3.0..3.0f64, cross in -2.0..2.0f64, flux in -3.2..3.2f64, cells in 2usize..12, periodic: bool) {
        let bc = if periodic { Boundary::Periodic } else { Boundary::Open };
        let p = LadderParams::hermitian(rung, cross, flux).with_cells(cells).with_boundary(bc);
        let h = real_space(&p).unwrap();
        prop_assert!(h.max_abs_diff(&h.conj_transpose()) <= 1e-14);
    }
}

#[test]
fn imaginary_flux_balances_leg_hoppings() {
    let p = LadderParams::hermitian(1.0, 1.0, 0.7).with_imag_flux(1.3).with_cells(4);
    let h = real_space(&p).unwrap();
    // (1,A)<-(2,A) times (1,B)<-(2,B) against the reverse bonds.
    let fwd = h[(0, 2)] * h[(1, 3)];
    let bwd = h[(2, 0)] * h[(3, 1)];
    assert!((fwd - bwd).norm() < 1e-14);
}

#[test]
fn open_chain_has_no_wraparound() {
    let p = LadderParams::hermitian(1.0, 0.5, 0.3).with_cross_unbalanced(0.2).with_cells(5);
    let h = real_space(&p).unwrap();
    let n = h.dim();
    for i in 0..2 {
        for j in n - 2..n {
            assert_eq!(h[(i, j)], C64::new(0.0, 0.0));
            assert_eq!(h[(j, i)], C64::new(0.0, 0.0));
        }
    }
    let periodic = real_space(&p.with_boundary(Boundary::Periodic)).unwrap();
    assert!(periodic[(0, n - 2)].norm() > 0.0);
}
