//! Balancing, Hessenberg reduction and the complex single-shift QR
//! iteration. Matrices are row-major `n x n` slices.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::math::cabs1;
use crate::C64;

const ULP: f64 = f64::EPSILON;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;

#[inline]
fn at(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Diagonal similarity `B = D^{-1} A D` with power-of-two entries that
/// roughly equalizes row and column norms. Returns `D`.
pub fn balance(n: usize, a: &mut [C64]) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let mut scale = vec![1.0; n];
    let mut changed = true;
    let mut sweeps = 0;
    while changed && sweeps < 100 {
        changed = false;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[at(n, j, i)]);
                    r += cabs1(a[at(n, i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g && f < 1e150 {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g && f > 1e-150 {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            // After the loops `c` is the column norm times f^2.
            if (c + r) / f >= 0.95 * s {
                continue;
            }
            scale[i] *= f;
            changed = true;
            for j in 0..n {
                a[at(n, i, j)] /= f;
                a[at(n, j, i)] *= f;
            }
        }
    }
    scale
}

/// Elementary reflector `I - tau v v^H` with `v[0] = 1` mapping
/// `(alpha, x)` to `(beta, 0)` with real `beta`. Overwrites `x` with
/// `v[1..]` and returns `(beta, tau)`.
fn householder(alpha: C64, x: &mut [C64]) -> (C64, C64) {
    let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if xnorm == 0.0 && alpha.im == 0.0 {
        return (alpha, C64::zero());
    }
    let norm = (alpha.re.hypot(alpha.im)).hypot(xnorm);
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = C64::from(1.0) / (alpha - beta);
    for z in x.iter_mut() {
        *z *= scale;
    }
    (C64::from(beta), tau)
}

/// Reduces `a` to upper Hessenberg form by unitary similarity. When `q` is
/// given it is overwritten with the accumulated unitary factor.
pub fn hessenberg(n: usize, a: &mut [C64], mut q: Option<&mut [C64]>) {
    if let Some(q) = q.as_deref_mut() {
        q.fill(C64::zero());
        for i in 0..n {
            q[at(n, i, i)] = C64::from(1.0);
        }
    }
    if n < 3 {
        return;
    }
    let mut v = vec![C64::zero(); n];
    let mut w = vec![C64::zero(); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let alpha = a[at(n, k + 1, k)];
        for (t, vi) in v[1..len].iter_mut().enumerate() {
            *vi = a[at(n, k + 2 + t, k)];
        }
        let (beta, tau) = householder(alpha, &mut v[1..len]);
        v[0] = C64::from(1.0);
        a[at(n, k + 1, k)] = beta;
        for i in k + 2..n {
            a[at(n, i, k)] = C64::zero();
        }
        if tau.is_zero() {
            continue;
        }
        let v = &v[..len];

        // Right: A[:, k+1..] -= tau (A v) v^H
        for i in 0..n {
            let row = &a[at(n, i, k + 1)..at(n, i, n - 1) + 1];
            let dot: C64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
            let f = tau * dot;
            let row = &mut a[at(n, i, k + 1)..at(n, i, n - 1) + 1];
            for (x, y) in row.iter_mut().zip(v) {
                *x -= f * y.conj();
            }
        }

        // Left: A[k+1.., k+1..] -= conj(tau) v (v^H A)
        let w = &mut w[..n - k - 1];
        w.fill(C64::zero());
        for (t, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            let row = &a[at(n, k + 1 + t, k + 1)..at(n, k + 1 + t, n - 1) + 1];
            for (wj, x) in w.iter_mut().zip(row) {
                *wj += vc * x;
            }
        }
        let tc = tau.conj();
        for (t, vi) in v.iter().enumerate() {
            let f = tc * vi;
            let row = &mut a[at(n, k + 1 + t, k + 1)..at(n, k + 1 + t, n - 1) + 1];
            for (x, wj) in row.iter_mut().zip(w.iter()) {
                *x -= f * wj;
            }
        }

        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let row = &q[at(n, i, k + 1)..at(n, i, n - 1) + 1];
                let dot: C64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
                let f = tau * dot;
                let row = &mut q[at(n, i, k + 1)..at(n, i, n - 1) + 1];
                for (x, y) in row.iter_mut().zip(v) {
                    *x -= f * y.conj();
                }
            }
        }
    }
}

/// QR iteration ran out of sweeps. Eigenvalues `w[hi+1..]` had converged;
/// the block `lo..=hi` had not.
#[derive(Debug, Clone, PartialEq)]
pub struct Stalled {
    pub lo: usize,
    pub hi: usize,
    pub sweeps: usize,
}

/// Complex single-shift QR on an upper Hessenberg matrix with Wilkinson
/// shifts, exceptional shifts and aggressive small-subdiagonal deflation.
///
/// With `want_t` the full Schur form is produced in `h`; otherwise only the
/// active block is updated. With `z` the Schur vectors are accumulated.
/// `max_sweeps` bounds the total number of QR sweeps.
pub fn hessenberg_qr(
    n: usize,
    h: &mut [C64],
    w: &mut [C64],
    want_t: bool,
    mut z: Option<&mut [C64]>,
    max_sweeps: usize,
) -> Result<usize, Stalled> {
    if n == 0 {
        return Ok(0);
    }
    if n == 1 {
        w[0] = h[0];
        return Ok(0);
    }
    let idx = |i: usize, j: usize| at(n, i, j);
    let (jlo, jhi) = (0usize, n - 1);

    // Make the subdiagonal real.
    for i in 1..n {
        let sub = h[idx(i, i - 1)];
        if sub.im != 0.0 {
            let sc = sub / cabs1(sub);
            let sc = sc.conj() / sc.norm();
            h[idx(i, i - 1)] = C64::from(sub.norm());
            for j in i..=jhi {
                h[idx(i, j)] *= sc;
            }
            for j in jlo..=jhi.min(i + 1) {
                h[idx(j, i)] *= sc.conj();
            }
            if let Some(z) = z.as_deref_mut() {
                for j in 0..n {
                    z[idx(j, i)] *= sc.conj();
                }
            }
        }
    }

    let small = SAFE_MIN * (n as f64 / ULP);
    const EXCEPTIONAL_EVERY: usize = 10;
    const EXCEPTIONAL_FACTOR: f64 = 0.75;

    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let (mut i1, mut i2) = (0usize, n - 1);
    // `i` is the bottom of the active block (inclusive), counted from 1 so
    // that "nothing left" is `i == 0`.
    let mut i = n;
    while i >= 1 {
        let ii = i - 1;
        let mut l = 0usize;
        loop {
            // Single small subdiagonal.
            let mut k = ii;
            while k > l {
                if cabs1(h[idx(k, k - 1)]) <= small {
                    break;
                }
                let mut tst = cabs1(h[idx(k - 1, k - 1)]) + cabs1(h[idx(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[idx(k - 1, k - 2)].re.abs();
                    }
                    if k + 1 < n {
                        tst += h[idx(k + 1, k)].re.abs();
                    }
                }
                if h[idx(k, k - 1)].re.abs() <= ULP * tst {
                    let p = cabs1(h[idx(k, k - 1)]);
                    let q = cabs1(h[idx(k - 1, k)]);
                    let ab = p.max(q);
                    let ba = p.min(q);
                    let p = cabs1(h[idx(k, k)]);
                    let q = cabs1(h[idx(k - 1, k - 1)] - h[idx(k, k)]);
                    let aa = p.max(q);
                    let bb = p.min(q);
                    let s = aa + ab;
                    if ba * (ab / s) <= small.max(ULP * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[idx(l, l - 1)] = C64::zero();
            }
            if l >= ii {
                break;
            }
            if sweeps >= max_sweeps {
                return Err(Stalled { lo: l, hi: ii, sweeps });
            }
            sweeps += 1;
            since_deflation += 1;
            if !want_t {
                i1 = l;
                i2 = ii;
            }

            let shift = if since_deflation % (2 * EXCEPTIONAL_EVERY) == 0 {
                C64::from(EXCEPTIONAL_FACTOR * h[idx(ii, ii - 1)].re.abs()) + h[idx(ii, ii)]
            } else if since_deflation % EXCEPTIONAL_EVERY == 0 {
                C64::from(EXCEPTIONAL_FACTOR * h[idx(l + 1, l)].re.abs()) + h[idx(l, l)]
            } else {
                wilkinson_shift(h[idx(ii - 1, ii - 1)], h[idx(ii - 1, ii)], h[idx(ii, ii - 1)], h[idx(ii, ii)])
            };

            // Two consecutive small subdiagonals.
            let mut m = ii - 1;
            let mut v;
            loop {
                let h11 = h[idx(m, m)];
                let h22 = h[idx(m + 1, m + 1)];
                let mut h11s = h11 - shift;
                let mut h21 = h[idx(m + 1, m)].re;
                let s = cabs1(h11s) + h21.abs();
                h11s /= s;
                h21 /= s;
                v = [h11s, C64::from(h21)];
                if m == l {
                    break;
                }
                let h10 = h[idx(m, m - 1)].re;
                if h10.abs() * h21.abs() <= ULP * (cabs1(h11s) * (cabs1(h11) + cabs1(h22))) {
                    break;
                }
                m -= 1;
            }

            for k in m..ii {
                if k > m {
                    v = [h[idx(k, k - 1)], h[idx(k + 1, k - 1)]];
                }
                let mut x = [v[1]];
                let (beta, t1) = householder(v[0], &mut x);
                let v2 = x[0];
                if k > m {
                    h[idx(k, k - 1)] = beta;
                    h[idx(k + 1, k - 1)] = C64::zero();
                }
                let t2 = (t1 * v2).re;
                let t1c = t1.conj();
                {
                    let (top, bottom) = h.split_at_mut(idx(k + 1, 0));
                    let upper = &mut top[idx(k, k)..idx(k, i2) + 1];
                    let lower = &mut bottom[k..=i2];
                    for (a, b) in upper.iter_mut().zip(lower.iter_mut()) {
                        let sum = t1c * *a + t2 * *b;
                        *a -= sum;
                        *b -= sum * v2;
                    }
                }
                let v2c = v2.conj();
                for j in i1..=(k + 2).min(ii) {
                    let sum = t1 * h[idx(j, k)] + t2 * h[idx(j, k + 1)];
                    h[idx(j, k)] -= sum;
                    h[idx(j, k + 1)] -= sum * v2c;
                }
                if let Some(z) = z.as_deref_mut() {
                    for j in 0..n {
                        let sum = t1 * z[idx(j, k)] + t2 * z[idx(j, k + 1)];
                        z[idx(j, k)] -= sum;
                        z[idx(j, k + 1)] -= sum * v2c;
                    }
                }
                if k == m && m > l {
                    // The step started below a small subdiagonal pair; rescale
                    // so that H[m+1, m] stays real.
                    let temp = C64::from(1.0) - t1;
                    let temp = temp / temp.norm();
                    h[idx(m + 1, m)] *= temp.conj();
                    if m + 2 <= ii {
                        h[idx(m + 2, m + 1)] *= temp;
                    }
                    for j in m..=ii {
                        if j != m + 1 {
                            for c in j + 1..=i2 {
                                h[idx(j, c)] *= temp;
                            }
                            for r in i1..j {
                                h[idx(r, j)] *= temp.conj();
                            }
                            if let Some(z) = z.as_deref_mut() {
                                for r in 0..n {
                                    z[idx(r, j)] *= temp.conj();
                                }
                            }
                        }
                    }
                }
            }

            let temp = h[idx(ii, ii - 1)];
            if temp.im != 0.0 {
                let rt = temp.norm();
                h[idx(ii, ii - 1)] = C64::from(rt);
                let temp = temp / rt;
                for c in ii + 1..=i2 {
                    h[idx(ii, c)] *= temp.conj();
                }
                for r in i1..ii {
                    h[idx(r, ii)] *= temp;
                }
                if let Some(z) = z.as_deref_mut() {
                    for r in 0..n {
                        z[idx(r, ii)] *= temp;
                    }
                }
            }
        }
        w[ii] = h[idx(ii, ii)];
        since_deflation = 0;
        i = l;
    }
    Ok(sweeps)
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let u = b.sqrt() * c.sqrt();
    let s = cabs1(u);
    if s == 0.0 {
        return d;
    }
    let x = (a - d) * 0.5;
    let sx = cabs1(x);
    let s = s.max(sx);
    let mut y = (((x / s) * (x / s)) + ((u / s) * (u / s))).sqrt() * s;
    if sx > 0.0 {
        let xs = x / sx;
        if xs.re * y.re + xs.im * y.im < 0.0 {
            y = -y;
        }
    }
    d - u * (u / (x + y))
}

/// Complex division that avoids squaring the divisor (Smith's method), so
/// tiny pivots do not underflow to a zero denominator.
fn cdiv(a: C64, b: C64) -> C64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        C64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.im + b.re * r;
        C64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// Right eigenvectors of the upper triangular `t`, as columns of the
/// returned row-major matrix (unnormalized, scaled to avoid overflow).
pub fn triangular_eigenvectors(n: usize, t: &[C64]) -> Vec<C64> {
    let small = SAFE_MIN * (n as f64 / ULP);
    let mut x = vec![C64::zero(); n * n];
    let mut work = vec![C64::zero(); n];
    for k in 0..n {
        let lambda = t[at(n, k, k)];
        let smin = (ULP * cabs1(lambda)).max(small);
        for j in 0..k {
            work[j] = -t[at(n, j, k)];
        }
        work[k] = C64::from(1.0);
        for j in (0..k).rev() {
            let mut d = t[at(n, j, j)] - lambda;
            if cabs1(d) < smin {
                d = C64::from(smin);
            }
            let xj = cdiv(work[j], d);
            work[j] = xj;
            if cabs1(xj) > 1e100 {
                let f = 1.0 / cabs1(xj);
                for w in work[..=k].iter_mut() {
                    *w *= f;
                }
            }
            let xj = work[j];
            if xj.is_zero() {
                continue;
            }
            for r in 0..j {
                work[r] -= xj * t[at(n, r, j)];
            }
        }
        for r in 0..=k {
            x[at(n, r, k)] = work[r];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn sample(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |i, j| {
            let s = (i * 7 + j * 13) as f64;
            C64::new((s * 0.37).sin(), (s * 0.11 + 0.5).cos())
        })
    }

    #[test]
    fn hessenberg_is_similarity() {
        let n = 7;
        let a = sample(n);
        let mut h = a.as_slice().to_vec();
        let mut q = vec![C64::zero(); n * n];
        hessenberg(n, &mut h, Some(&mut q));
        let h = ComplexMatrix::from_row_major(n, h).unwrap();
        let q = ComplexMatrix::from_row_major(n, q).unwrap();
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], C64::zero());
            }
        }
        let back = q.matmul(&h).matmul(&q.conj_transpose());
        assert!(back.max_abs_diff(&a) < 1e-13);
        let qq = q.conj_transpose().matmul(&q);
        assert!(qq.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-14);
    }

    #[test]
    fn schur_form_reconstructs() {
        let n = 9;
        let a = sample(n);
        let mut h = a.as_slice().to_vec();
        let mut z = vec![C64::zero(); n * n];
        hessenberg(n, &mut h, Some(&mut z));
        let mut w = vec![C64::zero(); n];
        hessenberg_qr(n, &mut h, &mut w, true, Some(&mut z), 300).unwrap();
        let t = ComplexMatrix::from_row_major(n, h).unwrap();
        let z = ComplexMatrix::from_row_major(n, z).unwrap();
        for i in 0..n {
            for j in 0..i {
                assert!(t[(i, j)].norm() < 1e-13, "T[{i},{j}] = {}", t[(i, j)]);
            }
            assert_eq!(t[(i, i)], w[i]);
        }
        let back = z.matmul(&t).matmul(&z.conj_transpose());
        assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn balance_equalizes_graded_matrix() {
        let n = 3;
        let mut a = vec![
            C64::from(1.0),
            C64::from(1e6),
            C64::from(0.0),
            C64::from(1e-6),
            C64::from(2.0),
            C64::from(1e6),
            C64::from(0.0),
            C64::from(1e-6),
            C64::from(3.0),
        ];
        let d = balance(n, &mut a);
        let max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max < 1e3, "{max}");
        assert!(d.iter().all(|s| s.log2().fract() == 0.0));
    }

    #[test]
    fn zero_budget_reports_stall() {
        let n = 4;
        let mut h = sample(n).as_slice().to_vec();
        hessenberg(n, &mut h, None);
        let mut w = vec![C64::zero(); n];
        let err = hessenberg_qr(n, &mut h, &mut w, false, None, 0).unwrap_err();
        assert_eq!(err.hi, n - 1);
    }
}
