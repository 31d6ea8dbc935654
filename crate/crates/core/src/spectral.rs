//! Dense eigendecomposition of Laplacian-type matrices and the diagonal matrix
//! functions built on it.
//!
//! Every closed-form solution in this crate is a product `P · f(Ω t) · P⁻¹`
//! where `P` holds eigenvectors of the Laplacian as columns and `Ω` is the
//! diagonal of frequencies `ω_μ = √λ_μ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Eigenvalues with `|λ| <= zero_tol` are zero modes.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Reconstruction tolerance relative to `1 + max|L|`.
const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Eigenvalues of a nonsymmetric matrix closer than this (relative) are
/// treated as one cluster when extracting eigenvectors.
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix flagged symmetric has asymmetry {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("non-real eigenvalue {re} {im:+}i")]
    NonRealSpectrum { re: f64, im: f64 },

    #[error("eigenbasis is ill-conditioned: reconstruction error {error:e} exceeds {tolerance:e}")]
    IllConditionedBasis { error: f64, tolerance: f64 },

    #[error("eigenvalue {lambda} at index {index} is negative beyond tolerance")]
    NegativeEigenvalue { index: usize, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
    ExpMinusI,
    ExpPlusI,
}

/// `L = P · diag(λ) · P⁻¹` with ascending real eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    p: DMatrix<f64>,
    p_inv: DMatrix<f64>,
    lambda: DVector<f64>,
    omega: DVector<f64>,
    mho: DVector<f64>,
    zero_mode: Vec<bool>,
    zero_tol: f64,
}

/// One row of the exported spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub omega: f64,
}

pub fn eigendecompose(
    l: &DMatrix<f64>,
    symmetric: bool,
    zero_tol: f64,
) -> Result<SpectralDecomposition, SpectralError> {
    let (rows, cols) = l.shape();
    if rows != cols {
        return Err(SpectralError::NotSquare { rows, cols });
    }
    let n = rows;
    let scale = 1.0 + l.amax();

    let (p, p_inv, lambda) = if symmetric {
        let max_asymmetry = (l - l.transpose()).amax();
        if max_asymmetry > 1e-12 {
            return Err(SpectralError::NotSymmetric { max_asymmetry });
        }
        let eig = SymmetricEigen::new(l.clone());
        let mut p = eig.eigenvectors;
        normalize_columns(&mut p);
        let p_inv = p.transpose();
        (p, p_inv, eig.eigenvalues)
    } else {
        general_eigenbasis(l, zero_tol)?
    };

    // ascending order, stable so degenerate modes keep solver order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
    let p = DMatrix::from_fn(n, n, |r, c| p[(r, order[c])]);
    let p_inv = DMatrix::from_fn(n, n, |r, c| p_inv[(order[r], c)]);
    let mut lambda = DVector::from_fn(n, |i, _| lambda[order[i]]);

    let zero_mode: Vec<bool> = lambda.iter().map(|&v| v.abs() <= zero_tol).collect();
    for (v, &z) in lambda.iter_mut().zip(&zero_mode) {
        if z {
            *v = 0.0;
        }
    }
    let omega = lambda.map(|v| v.max(0.0).sqrt());
    let mho = DVector::from_fn(n, |i, _| if zero_mode[i] { 0.0 } else { 1.0 / omega[i] });

    let sd = SpectralDecomposition { p, p_inv, lambda, omega, mho, zero_mode, zero_tol };
    let error = (sd.reconstruct() - l).amax();
    let tolerance = RECONSTRUCTION_TOL * scale;
    if error.is_nan() || error > tolerance {
        return Err(SpectralError::IllConditionedBasis { error, tolerance });
    }
    Ok(sd)
}

/// `(P, P⁻¹, λ)`
type Eigenbasis = (DMatrix<f64>, DMatrix<f64>, DVector<f64>);

/// Eigenbasis of a nonsymmetric matrix whose spectrum must be real.
///
/// Eigenvalues come from the real Schur form; for each cluster of (nearly)
/// equal eigenvalues the eigenvectors are the right singular vectors of
/// `L - λI` with the smallest singular values.
fn general_eigenbasis(
    l: &DMatrix<f64>,
    zero_tol: f64,
) -> Result<Eigenbasis, SpectralError> {
    let n = l.nrows();
    let scale = 1.0 + l.amax();
    let mut values: Vec<f64> = Vec::with_capacity(n);
    for z in l.complex_eigenvalues().iter() {
        if z.im.abs() > zero_tol * (1.0 + z.norm()) {
            return Err(SpectralError::NonRealSpectrum { re: z.re, im: z.im });
        }
        values.push(z.re);
    }
    values.sort_by(f64::total_cmp);

    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        let split = i == n || values[i] - values[i - 1] > CLUSTER_TOL * (1.0 + values[i].abs());
        if split {
            let members = &values[start..i];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            clusters.push((mean, members.len()));
            start = i;
        }
    }

    let mut p = DMatrix::zeros(n, n);
    let mut col = 0;
    for (mean, mult) in clusters {
        let shifted = l - DMatrix::identity(n, n) * mean;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd.v_t.expect("requested V");
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for &k in idx.iter().take(mult) {
            p.set_column(col, &v_t.row(k).transpose());
            col += 1;
        }
    }
    normalize_columns(&mut p);

    let p_inv = p.clone().try_inverse().ok_or(SpectralError::IllConditionedBasis {
        error: f64::INFINITY,
        tolerance: RECONSTRUCTION_TOL * scale,
    })?;
    // Rayleigh-type refinement against the computed basis
    let diag = &p_inv * l * &p;
    let lambda = DVector::from_fn(n, |i, _| diag[(i, i)]);
    Ok((p, p_inv, lambda))
}

/// Unit 2-norm columns with the first nonzero component positive.
fn normalize_columns(p: &mut DMatrix<f64>) {
    for mut c in p.column_iter_mut() {
        let norm = c.norm();
        if norm > 0.0 {
            c /= norm;
        }
        if let Some(&first) = c.iter().find(|v| v.abs() > 1e-12) {
            if first < 0.0 {
                c.neg_mut();
            }
        }
    }
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Eigenvectors as columns.
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn p_inv(&self) -> &DMatrix<f64> {
        &self.p_inv
    }

    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    /// Diagonal pseudo-inverse of `Ω`: `1/ω_μ`, and 0 on zero modes.
    pub fn mho(&self) -> &DVector<f64> {
        &self.mho
    }

    pub fn is_zero_mode(&self, mu: usize) -> bool {
        self.zero_mode[mu]
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn spectrum(&self) -> Vec<SpectrumEntry> {
        self.lambda
            .iter()
            .zip(self.omega.iter())
            .map(|(&lambda, &omega)| SpectrumEntry { lambda, omega })
            .collect()
    }

    /// `P · diag(values) · P⁻¹`.
    pub fn spectral_function(&self, values: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.p.clone();
        for (mut c, &v) in scaled.column_iter_mut().zip(values.iter()) {
            c *= v;
        }
        scaled * &self.p_inv
    }

    /// Same as [`spectral_function`](Self::spectral_function) with the
    /// diagonal given per mode index.
    pub fn map_modes(&self, f: impl Fn(usize) -> f64) -> DMatrix<f64> {
        self.spectral_function(&DVector::from_fn(self.n(), |i, _| f(i)))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.spectral_function(&self.lambda)
    }

    pub fn cos_matrix(&self, t: f64) -> DMatrix<f64> {
        self.map_modes(|mu| (self.omega[mu] * t).cos())
    }

    pub fn sin_matrix(&self, t: f64) -> DMatrix<f64> {
        self.map_modes(|mu| (self.omega[mu] * t).sin())
    }

    /// `P · f(Ω t) · P⁻¹`. The exponentials are assembled as `cos ∓ i·sin`.
    pub fn matrix_trig(&self, t: f64, kind: TrigKind) -> DMatrix<Complex64> {
        let real = |m: DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
        match kind {
            TrigKind::Cos => real(self.cos_matrix(t)),
            TrigKind::Sin => real(self.sin_matrix(t)),
            TrigKind::ExpMinusI | TrigKind::ExpPlusI => {
                let sign = if kind == TrigKind::ExpMinusI { -1.0 } else { 1.0 };
                let c = self.cos_matrix(t);
                let s = self.sin_matrix(t);
                c.zip_map(&s, |c, s| Complex64::new(c, sign * s))
            }
        }
    }
}

/// Principal square root `P · Ω · P⁻¹`.
pub fn sqrt_from_spectrum(sd: &SpectralDecomposition) -> Result<DMatrix<f64>, SpectralError> {
    if let Some((index, &lambda)) = sd.lambda.iter().enumerate().find(|(_, &v)| v < -sd.zero_tol) {
        return Err(SpectralError::NegativeEigenvalue { index, lambda });
    }
    Ok(sd.spectral_function(&sd.omega))
}
