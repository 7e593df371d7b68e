//! Dense complex linear algebra shared by the realization and map layers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `a*b` with the antilinear first slot.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Symmetrizes `m` to `(m + m*)/2` and returns the relative size of the correction.
pub fn hermitize(m: &CMatrix) -> (CMatrix, f64) {
    let h = (m + m.adjoint()).scale(0.5);
    let corr = frobenius(&(m - &h)) / frobenius(m).max(f64::MIN_POSITIVE);
    (h, corr)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Self { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
        }
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Self { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues strictly above `rel * max(lambda_max, 0)`.
    pub fn rank(&self, rel: f64) -> usize {
        let cut = rel * self.max().max(0.0);
        self.values.iter().take_while(|&&v| v > cut).count()
    }
}

/// Numerical rank of a Hermitian matrix at relative eigenvalue cutoff `rel`.
pub fn hermitian_rank(m: &CMatrix, rel: f64) -> usize {
    HermitianEigen::new(m).rank(rel)
}

/// Moore-Penrose pseudoinverse via SVD, dropping singular values below `rcond * sigma_max`.
pub fn pseudo_inverse(m: &CMatrix, rcond: f64) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rcond * smax && s > 0.0 {
            let col = vt.row(k).adjoint();
            let row = u.column(k).adjoint();
            out += (col * row).scale(1.0 / s);
        }
    }
    out
}

/// Ratio `sigma_min / sigma_max` of a square matrix.
pub fn singular_ratio(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Inverse of a square matrix, refusing when `sigma_min <= 1e-12 sigma_max`.
pub fn checked_inverse(m: &CMatrix) -> Result<CMatrix> {
    let ratio = singular_ratio(m);
    if ratio <= 1e-12 {
        return Err(Error::Singular { ratio });
    }
    m.clone().try_inverse().ok_or(Error::Singular { ratio })
}

/// `exp(x)` for a nilpotent matrix, summing the series until the terms vanish.
pub fn exp_nilpotent(x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    let mut out = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=n {
        term = (&term * x).unscale(k as f64);
        if term.iter().all(|z| *z == ZERO) {
            break;
        }
        out += &term;
    }
    out
}
