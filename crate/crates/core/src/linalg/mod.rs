//! Dense complex eigensolver and the closed-form 2x2 band solver.
//!
//! [`eigen_general`] computes all eigenvalues and right eigenvectors of a
//! general complex matrix: balancing, Householder reduction to Hessenberg
//! form, complex single-shift QR to Schur form, then back-substitution on
//! the triangular factor. [`eigenvalues`] skips the Schur vectors and is
//! several times cheaper, which matters for large parameter sweeps.

mod schur;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::matrix::ComplexMatrix;
use crate::model::BlochCoefficients;
use crate::C64;

/// Residual acceptance relative to the Frobenius norm of the input.
pub const TOL_EIG: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix dimension {n} exceeds the configured maximum {max}")]
    TooLarge { n: usize, max: usize },
    #[error("QR iteration did not converge after {sweeps} sweeps; rows {lo}..={hi} unreduced")]
    NoConvergence {
        sweeps: usize,
        lo: usize,
        hi: usize,
        /// Eigenvalues deflated before the stall (Schur rows `hi+1..n`).
        converged: Vec<C64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// QR sweep budget per eigenvalue; the total budget is this times `n`.
    pub max_iter: usize,
    pub max_dim: usize,
    /// Diagonal scaling before the reduction.
    pub balance: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { max_iter: 30, max_dim: 4096, balance: true }
    }
}

/// Eigenvalues with unit-norm right eigenvectors, sorted by real part and
/// then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// `vectors[j]` belongs to `values[j]`.
    pub vectors: Vec<Vec<C64>>,
    /// `|H v_j - lambda_j v_j|`.
    pub residuals: Vec<f64>,
    /// False where the vector is numerically parallel to an earlier vector
    /// of the same eigenvalue (defective clusters).
    pub independent: Vec<bool>,
    /// Frobenius norm of the input.
    pub norm: f64,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Whether every residual is within `tol * |H|_F`.
    pub fn residuals_within(&self, tol: f64) -> bool {
        self.max_residual() <= tol * self.norm.max(f64::MIN_POSITIVE)
    }

    pub fn independent_count(&self) -> usize {
        self.independent.iter().filter(|b| **b).count()
    }
}

fn check(h: &ComplexMatrix, opts: &EigenOptions) -> Result<(), EigenError> {
    if h.dim() > opts.max_dim {
        return Err(EigenError::TooLarge { n: h.dim(), max: opts.max_dim });
    }
    if !h.is_finite() {
        return Err(EigenError::NonFinite);
    }
    Ok(())
}

fn budget(n: usize, opts: &EigenOptions) -> usize {
    opts.max_iter * n.max(10)
}

fn sort_key(a: &C64, b: &C64) -> core::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues of `h` (with multiplicity), sorted by real part then
/// imaginary part.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<C64>, EigenError> {
    eigenvalues_with(h, &EigenOptions::default())
}

pub fn eigenvalues_with(h: &ComplexMatrix, opts: &EigenOptions) -> Result<Vec<C64>, EigenError> {
    check(h, opts)?;
    let n = h.dim();
    let mut a = h.as_slice().to_vec();
    if opts.balance {
        schur::balance(n, &mut a);
    }
    schur::hessenberg(n, &mut a, None);
    let mut w = vec![C64::zero(); n];
    schur::hessenberg_qr(n, &mut a, &mut w, false, None, budget(n, opts)).map_err(|s| stalled(&w, s))?;
    w.sort_by(sort_key);
    Ok(w)
}

fn stalled(w: &[C64], s: schur::Stalled) -> EigenError {
    EigenError::NoConvergence { sweeps: s.sweeps, lo: s.lo, hi: s.hi, converged: w[s.hi + 1..].to_vec() }
}

/// Full eigendecomposition with default options.
pub fn eigen_general(h: &ComplexMatrix) -> Result<EigenDecomposition, EigenError> {
    eigen_general_with(h, &EigenOptions::default())
}

pub fn eigen_general_with(h: &ComplexMatrix, opts: &EigenOptions) -> Result<EigenDecomposition, EigenError> {
    check(h, opts)?;
    let n = h.dim();
    let norm = h.frobenius_norm();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            independent: Vec::new(),
            norm,
        });
    }
    let mut t = h.as_slice().to_vec();
    let scale = if opts.balance { schur::balance(n, &mut t) } else { vec![1.0; n] };
    let mut z = vec![C64::zero(); n * n];
    schur::hessenberg(n, &mut t, Some(&mut z));
    let mut w = vec![C64::zero(); n];
    schur::hessenberg_qr(n, &mut t, &mut w, true, Some(&mut z), budget(n, opts))
        .map_err(|s| stalled(&w, s))?;
    let x = schur::triangular_eigenvectors(n, &t);

    // v_k = D Z x_k, where x_k has support on rows 0..=k.
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = vec![C64::zero(); n];
        for (i, vi) in v.iter_mut().enumerate() {
            let zrow = &z[i * n..i * n + k + 1];
            let mut s = C64::zero();
            for (r, zr) in zrow.iter().enumerate() {
                s += zr * x[r * n + k];
            }
            *vi = s * scale[i];
        }
        let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nv > 0.0 && nv.is_finite() {
            for c in v.iter_mut() {
                *c /= nv;
            }
        }
        vectors.push(v);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sort_key(&w[a], &w[b]));
    let values: Vec<C64> = order.iter().map(|&k| w[k]).collect();
    let mut slots: Vec<Option<Vec<C64>>> = vectors.into_iter().map(Some).collect();
    let vectors: Vec<Vec<C64>> = order.iter().map(|&k| slots[k].take().unwrap_or_default()).collect();

    let residuals = residuals_of(h, &values, &vectors);
    let independent = independence(&values, &vectors, norm);
    Ok(EigenDecomposition { values, vectors, residuals, independent, norm })
}

fn residuals_of(h: &ComplexMatrix, values: &[C64], vectors: &[Vec<C64>]) -> Vec<f64> {
    values
        .iter()
        .zip(vectors)
        .map(|(&l, v)| {
            let hv = h.mul_vec(v);
            hv.iter().zip(v).map(|(a, b)| (a - l * b).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect()
}

/// Decomposition of `h` obtained from one of `D^-1 h D`, `D = diag(scale)`.
/// Vectors are mapped back as `D v`, renormalized, and the residuals,
/// independence flags and norm are recomputed against `h`.
pub fn eigen_similar(h: &ComplexMatrix, scale: &[f64], opts: &EigenOptions) -> Result<EigenDecomposition, EigenError> {
    let mut dec = eigen_general_with(&h.diagonal_similarity(scale), opts)?;
    for v in &mut dec.vectors {
        let mut nrm = 0.0;
        for (c, &d) in v.iter_mut().zip(scale) {
            *c *= d;
            nrm += c.norm_sqr();
        }
        let nrm = nrm.sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|c| *c /= nrm);
        }
    }
    dec.norm = h.frobenius_norm();
    dec.residuals = residuals_of(h, &dec.values, &dec.vectors);
    dec.independent = independence(&dec.values, &dec.vectors, dec.norm);
    Ok(dec)
}

/// Flags vectors that duplicate an earlier vector of a numerically equal
/// eigenvalue. Values are sorted, so clusters are contiguous in real part.
fn independence(values: &[C64], vectors: &[Vec<C64>], norm: f64) -> Vec<bool> {
    let n = values.len();
    let close = f64::EPSILON.sqrt() * norm.max(1.0);
    let mut flags = vec![true; n];
    for j in 0..n {
        for i in (0..j).rev() {
            if values[j].re - values[i].re > close {
                break;
            }
            if !flags[i] || (values[j] - values[i]).norm() > close {
                continue;
            }
            let overlap: C64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
            if overlap.norm() > 1.0 - 1e-8 {
                flags[j] = false;
                break;
            }
        }
    }
    flags
}

/// `E_pm = h0 +/- sqrt(P)` with the principal square root. `E_plus` has
/// the larger real part, ties broken by the larger imaginary part.
pub fn eig2(c: &BlochCoefficients) -> (C64, C64) {
    let mut s = c.discriminant().sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        s = -s;
    }
    (c.h0 + s, c.h0 - s)
}
