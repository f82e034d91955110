//! Small scalar helpers shared by the numerical modules.

use core::f64::consts::PI;

use num_traits::Float;

use crate::C64;

pub(crate) const TAU: f64 = 2.0 * PI;

/// `|re| + |im|`, the cheap modulus LAPACK uses for deflation tests.
#[inline]
pub(crate) fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_phase(mut x: f64) -> f64 {
    while x > PI {
        x -= TAU;
    }
    while x <= -PI {
        x += TAU;
    }
    x
}

/// Reduces an angle into `[0, 2 pi)`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        let r = r + TAU;
        if r >= TAU { 0.0 } else { r }
    } else {
        r
    }
}

/// Golden-section minimization of `f` on `[a, b]`. Returns the abscissa and
/// the function value at the best point seen.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5.0.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for a sign change of `f` on `[a, b]`; `f(a)` and `f(b)` must
/// have opposite signs. Stops once `|f| <= tol` or the bracket collapses.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm.abs() <= tol || (b - a).abs() <= f64::EPSILON * (1.0 + mid.abs()) {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
