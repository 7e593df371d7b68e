//! Finite quantum spaces: Gram factorization, admissible functions, and the
//! correspondence between operators on the sampled span and their shadows.
//!
//! A sample `z_1..z_n` with Gram matrix `G = R* R` realizes the quantum space
//! spanned by its coherent states as `C^r`, the coherent state of `z_k` being
//! column `k` of `R`. Admissibility is decided relative to the sample only: a
//! finite sample certifies a necessary condition for admissibility over the
//! whole space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, vec_norm, CMatrix, CVector, HermitianEigen, C64};
use crate::space::{gram_matrix, SampleSet};

pub const DEFAULT_EPS_RANK: f64 = 1e-10;
pub const DEFAULT_TOL: f64 = 1e-8;

/// `G = R* R` with `R = Lambda_+^{1/2} U_+*` from the eigendecomposition of `G`.
#[derive(Clone, Debug)]
pub struct GramFactorization {
    pub sample: SampleSet,
    pub gram: CMatrix,
    /// `r x n`; column `k` is the coherent vector of `z_k`.
    pub factor: CMatrix,
    pub rank: usize,
    pub eps_rank: f64,
    /// All eigenvalues of `G`, descending.
    pub eigenvalues: Vec<f64>,
    /// `n x r`, the kept eigenvectors.
    kept: CMatrix,
    /// `n x (n - r)`, an orthonormal basis of the numerical null space.
    null: CMatrix,
}

impl GramFactorization {
    pub fn n(&self) -> usize {
        self.gram.nrows()
    }

    /// Orthonormal basis of the numerical null space of `G`, as columns.
    pub fn null_space(&self) -> &CMatrix {
        &self.null
    }

    /// Coherent vector of sample point `k` in the factor basis.
    pub fn coherent_vector(&self, k: usize) -> CVector {
        self.factor.column(k).into_owned()
    }

    /// `R^+ = U_+ Lambda_+^{-1/2}` (`n x r`), so that `R R^+ = 1`.
    pub fn factor_pinv(&self) -> CMatrix {
        let mut p = self.kept.clone();
        for (j, mut col) in p.column_iter_mut().enumerate() {
            col.unscale_mut(self.eigenvalues[j].sqrt());
        }
        p
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Factors the Gram matrix of `sample`, keeping eigenvalues above `eps_rank * lambda_max`.
pub fn factor_gram(sample: &SampleSet, eps_rank: f64) -> Result<GramFactorization> {
    let gram = gram_matrix(sample)?;
    factor_matrix(sample.clone(), gram, eps_rank)
}

pub(crate) fn factor_matrix(sample: SampleSet, gram: CMatrix, eps_rank: f64) -> Result<GramFactorization> {
    let eig = HermitianEigen::new(&gram);
    let (max, min) = (eig.max(), eig.min());
    if min < -eps_rank * max.max(0.0) || max < 0.0 {
        return Err(Error::NotPositive { min_eigenvalue: min, max_eigenvalue: max });
    }
    let rank = eig.rank(eps_rank);
    let n = gram.nrows();
    let kept = eig.vectors.columns(0, rank).into_owned();
    let null = eig.vectors.columns(rank, n - rank).into_owned();
    let mut factor = kept.adjoint();
    for (j, mut row) in factor.row_iter_mut().enumerate() {
        row.scale_mut(eig.values[j].sqrt());
    }
    Ok(GramFactorization { sample, gram, factor, rank, eps_rank, eigenvalues: eig.values, kept, null })
}

/// Values `f(z_k)` of a function on the sample.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnSample {
    pub values: CVector,
}

impl FunctionOnSample {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values: CVector::from_vec(values) }
    }
}

/// Values `X(z_j, z_k)` of a kernel on the sample.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelOnSample {
    pub values: CMatrix,
}

impl KernelOnSample {
    pub fn new(values: CMatrix) -> Self {
        Self { values }
    }
}

/// An operator on the sampled span, as an `r x r` matrix in the factor basis.
#[derive(Clone, Debug)]
pub struct OperatorOnSpan {
    pub factorization: Arc<GramFactorization>,
    pub matrix: CMatrix,
}

impl OperatorOnSpan {
    pub fn new(factorization: Arc<GramFactorization>, matrix: CMatrix) -> Result<Self> {
        let r = factorization.rank;
        if matrix.nrows() != r || matrix.ncols() != r {
            return Err(Error::Dimension { expected: r, found: matrix.nrows() });
        }
        Ok(Self { factorization, matrix })
    }

    pub fn identity(factorization: Arc<GramFactorization>) -> Self {
        let r = factorization.rank;
        Self { factorization, matrix: CMatrix::identity(r, r) }
    }

    pub fn adjoint(&self) -> Self {
        Self { factorization: self.factorization.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_span(other)?;
        Ok(Self { factorization: self.factorization.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// `self + c other`.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Result<Self> {
        self.same_span(other)?;
        Ok(Self { factorization: self.factorization.clone(), matrix: &self.matrix + &other.matrix * c })
    }

    /// Relative Frobenius distance `||A - B|| / (1 + ||B||)`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_span(other)?;
        Ok(frobenius(&(&self.matrix - &other.matrix)) / (1.0 + frobenius(&other.matrix)))
    }

    fn same_span(&self, other: &Self) -> Result<()> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::Dimension { expected: self.matrix.nrows(), found: other.matrix.nrows() });
        }
        Ok(())
    }
}

fn null_residual(fact: &GramFactorization, v: &CVector) -> f64 {
    if fact.null.ncols() == 0 {
        return 0.0;
    }
    vec_norm(&(fact.null.adjoint() * v))
}

/// Sample-relative admissibility: `c* f = 0` for every null vector `c` of `G`,
/// within `tol * (1 + ||f||)`.
pub fn is_admissible(fact: &GramFactorization, f: &FunctionOnSample, tol: f64) -> Result<bool> {
    check_len(fact, f.values.len())?;
    Ok(null_residual(fact, &f.values) <= tol * (1.0 + vec_norm(&f.values)))
}

/// The vector `psi` in the factor basis with `<z_k|psi = f(z_k)`.
pub fn vector_from_admissible(fact: &GramFactorization, f: &FunctionOnSample, tol: f64) -> Result<CVector> {
    check_len(fact, f.values.len())?;
    let threshold = tol * (1.0 + vec_norm(&f.values));
    let residual = null_residual(fact, &f.values);
    if residual > threshold {
        return Err(Error::NotAdmissible { residual, threshold });
    }
    // least squares for R* psi = f, with R R* = Lambda_+
    let psi = fact.factor_pinv().adjoint() * &f.values;
    let residual = vec_norm(&(fact.factor.adjoint() * &psi - &f.values));
    if residual > threshold {
        return Err(Error::NotAdmissible { residual, threshold });
    }
    Ok(psi)
}

/// Reconstructs the operator with shadow `X` on the sample, `M = (R^+)* X R^+`.
///
/// `tol` is relative: the shadow conditions and the reconstruction are
/// checked against `tol * (1 + ||X||_F)`.
pub fn operator_from_kernel(fact: &Arc<GramFactorization>, x: &KernelOnSample, tol: f64) -> Result<OperatorOnSpan> {
    let n = fact.n();
    if x.values.nrows() != n || x.values.ncols() != n {
        return Err(Error::Dimension { expected: n, found: x.values.nrows() });
    }
    let threshold = tol * (1.0 + frobenius(&x.values));
    if fact.null.ncols() > 0 {
        let right = frobenius(&(&x.values * &fact.null));
        let left = frobenius(&(x.values.adjoint() * &fact.null));
        let residual = right.max(left);
        if residual > threshold {
            return Err(Error::NotShadow { residual, threshold });
        }
    }
    let pinv = fact.factor_pinv();
    let m = pinv.adjoint() * &x.values * &pinv;
    let residual = frobenius(&(fact.factor.adjoint() * &m * &fact.factor - &x.values));
    if residual > threshold {
        return Err(Error::NotShadow { residual, threshold });
    }
    OperatorOnSpan::new(fact.clone(), m)
}

/// `<z_j| M |z_k> = (R* M R)_jk`.
pub fn shadow_of_operator(op: &OperatorOnSpan) -> KernelOnSample {
    let r = &op.factorization.factor;
    KernelOnSample::new(r.adjoint() * &op.matrix * r)
}

fn check_len(fact: &GramFactorization, len: usize) -> Result<()> {
    if len != fact.n() {
        return Err(Error::Dimension { expected: fact.n(), found: len });
    }
    Ok(())
}
