//! Truncated bosonic Fock space over `C^d`.
//!
//! The occupation basis holds every multi-index `alpha` with total degree
//! `|alpha| <= cutoff`, in graded lexicographic order: by degree, and within a
//! degree lexicographically decreasing (`(1,0)` before `(0,1)`). Coherent
//! vectors are unnormalized, `<zeta|zeta'> = exp(zeta* zeta')`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{exp_nilpotent, frobenius, inner, vec_norm, CMatrix, CVector, C64, ONE, ZERO};
use crate::oscillator::OscElement;
use crate::quadrature::GaussHermite;
use crate::space::Point;

/// Occupation basis of the truncated Fock space.
#[derive(Debug, PartialEq)]
pub struct FockBasis {
    pub dim: usize,
    pub cutoff: usize,
    indices: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

fn compositions(dim: usize, degree: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == dim {
        prefix.push(degree as u32);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first as u32);
        compositions(dim, degree - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(dim: usize, cutoff: usize) -> Arc<Self> {
        assert!(dim >= 1, "Fock space needs at least one mode");
        let mut indices = Vec::new();
        for m in 0..=cutoff {
            compositions(dim, m, &mut Vec::with_capacity(dim), &mut indices);
        }
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Arc::new(Self { dim, cutoff, indices, lookup })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn multi_index(&self, i: usize) -> &[u32] {
        &self.indices[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.indices[i].iter().map(|&a| a as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.indices.iter().map(|v| v.as_slice())
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of basis states, `C(cutoff + d, d)`.
pub fn basis_size(dim: usize, cutoff: usize) -> usize {
    binomial(cutoff + dim, dim)
}

#[derive(Clone, Debug)]
pub struct FockVector {
    pub basis: Arc<FockBasis>,
    pub coeffs: CVector,
}

impl FockVector {
    pub fn vacuum(basis: &Arc<FockBasis>) -> Self {
        let mut coeffs = CVector::zeros(basis.len());
        coeffs[0] = ONE;
        Self { basis: basis.clone(), coeffs }
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        inner(self.coeffs.as_slice(), other.coeffs.as_slice())
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.coeffs)
    }

    /// Copy with every component of degree above `max_degree` zeroed.
    pub fn truncated(&self, max_degree: usize) -> FockVector {
        let mut out = self.clone();
        for i in 0..self.basis.len() {
            if self.basis.degree(i) > max_degree {
                out.coeffs[i] = ZERO;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FockOperator {
    pub basis: Arc<FockBasis>,
    pub matrix: CMatrix,
}

impl FockOperator {
    pub fn identity(basis: &Arc<FockBasis>) -> Self {
        let n = basis.len();
        Self { basis: basis.clone(), matrix: CMatrix::identity(n, n) }
    }

    fn zero(basis: &Arc<FockBasis>) -> Self {
        let n = basis.len();
        Self { basis: basis.clone(), matrix: CMatrix::zeros(n, n) }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector { basis: self.basis.clone(), coeffs: &self.matrix * &v.coeffs }
    }

    pub fn mul(&self, other: &FockOperator) -> FockOperator {
        FockOperator { basis: self.basis.clone(), matrix: &self.matrix * &other.matrix }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator { basis: self.basis.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn commutator(&self, other: &FockOperator) -> FockOperator {
        FockOperator { basis: self.basis.clone(), matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix }
    }

    pub fn scaled(&self, c: C64) -> FockOperator {
        FockOperator { basis: self.basis.clone(), matrix: &self.matrix * c }
    }

    /// `exp(self)` for operators that strictly raise or strictly lower the degree.
    pub fn exp_nilpotent(&self) -> FockOperator {
        FockOperator { basis: self.basis.clone(), matrix: exp_nilpotent(&self.matrix) }
    }

    /// `<u| self |v>`.
    pub fn matrix_element(&self, u: &FockVector, v: &FockVector) -> C64 {
        inner(u.coeffs.as_slice(), (&self.matrix * &v.coeffs).as_slice())
    }

    /// Largest column norm of `self - other` over basis states of degree `<= max_degree`.
    pub fn max_column_diff(&self, other: &FockOperator, max_degree: usize) -> f64 {
        let diff = &self.matrix - &other.matrix;
        (0..self.basis.len())
            .filter(|&i| self.basis.degree(i) <= max_degree)
            .map(|i| diff.column(i).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other` restricted to rows and columns of degree `<= max_degree`.
    pub fn block_distance(&self, other: &FockOperator, max_degree: usize) -> f64 {
        let keep: Vec<usize> = (0..self.basis.len()).filter(|&i| self.basis.degree(i) <= max_degree).collect();
        let diff = &self.matrix - &other.matrix;
        let block = CMatrix::from_fn(keep.len(), keep.len(), |i, j| diff[(keep[i], keep[j])]);
        frobenius(&block)
    }
}

fn check_mode(basis: &FockBasis, k: usize) -> Result<usize> {
    if k == 0 || k > basis.dim {
        return Err(Error::Index { index: k, dim: basis.dim });
    }
    Ok(k - 1)
}

/// Lowering operator `a_k` (modes numbered from 1).
pub fn annihilator(basis: &Arc<FockBasis>, k: usize) -> Result<FockOperator> {
    let k = check_mode(basis, k)?;
    let mut op = FockOperator::zero(basis);
    for (j, alpha) in basis.iter().enumerate() {
        if alpha[k] > 0 {
            let mut beta = alpha.to_vec();
            beta[k] -= 1;
            let i = basis.index(&beta).expect("lowered index is in the basis");
            op.matrix[(i, j)] = C64::from((alpha[k] as f64).sqrt());
        }
    }
    Ok(op)
}

/// Raising operator `a_k*`; top-degree states are sent to zero.
pub fn creator(basis: &Arc<FockBasis>, k: usize) -> Result<FockOperator> {
    Ok(annihilator(basis, k)?.adjoint())
}

fn check_len(basis: &FockBasis, len: usize) -> Result<()> {
    if len != basis.dim {
        return Err(Error::Dimension { expected: basis.dim, found: len });
    }
    Ok(())
}

/// `p* a = sum_k conj(p_k) a_k`.
pub fn smeared(basis: &Arc<FockBasis>, p: &[C64]) -> Result<FockOperator> {
    check_len(basis, p.len())?;
    let mut op = FockOperator::zero(basis);
    for (k, pk) in p.iter().enumerate() {
        op.matrix += annihilator(basis, k + 1)?.matrix * pk.conj();
    }
    Ok(op)
}

/// `a* q = sum_k q_k a_k*`.
pub fn smeared_adjoint(basis: &Arc<FockBasis>, q: &[C64]) -> Result<FockOperator> {
    check_len(basis, q.len())?;
    let mut op = FockOperator::zero(basis);
    for (k, qk) in q.iter().enumerate() {
        op.matrix += creator(basis, k + 1)?.matrix * *qk;
    }
    Ok(op)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `|z> = e^{z0} sum_alpha zeta^alpha / sqrt(alpha!) |alpha>`, truncated at the cutoff.
pub fn coherent_vector(basis: &Arc<FockBasis>, z: &Point) -> Result<FockVector> {
    let (z0, zeta) = match z {
        Point::Klauder { z0, zeta } => (*z0, zeta),
        other => return Err(Error::Domain { space: "klauder", detail: format!("expected a Klauder point, got {other:?}") }),
    };
    check_len(basis, zeta.len())?;
    let scale = z0.exp();
    let coeffs = CVector::from_iterator(
        basis.len(),
        basis.iter().map(|alpha| {
            let mut v = scale;
            for (zk, &ak) in zeta.iter().zip(alpha) {
                v *= zk.powu(ak) / factorial(ak).sqrt();
            }
            v
        }),
    );
    Ok(FockVector { basis: basis.clone(), coeffs })
}

/// `sum_{m > n} x^m / m!` for `x >= 0`.
pub fn exp_tail(x: f64, n: usize) -> f64 {
    let mut term = 1.0;
    for m in 1..=n {
        term *= x / m as f64;
    }
    let mut sum = 0.0;
    let mut m = n + 1;
    loop {
        term *= x / m as f64;
        sum += term;
        if term <= 1e-18 * sum || term == 0.0 {
            break;
        }
        m += 1;
    }
    sum
}

fn point_parts(z: &Point) -> Result<(C64, &[C64])> {
    match z {
        Point::Klauder { z0, zeta } => Ok((*z0, zeta.as_slice())),
        other => Err(Error::Domain { space: "klauder", detail: format!("expected a Klauder point, got {other:?}") }),
    }
}

/// Bound on `|<z|z'>_N - K(z, z')|` for the truncated overlap.
pub fn overlap_tail_bound(z: &Point, zp: &Point, cutoff: usize) -> Result<f64> {
    let (a0, a) = point_parts(z)?;
    let (b0, b) = point_parts(zp)?;
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    Ok((a0.conj() + b0).exp().norm() * exp_tail(na * nb, cutoff))
}

/// `Lambda(A)` with `Lambda(A)|zeta> = |A zeta>`, block diagonal by degree.
pub fn sym_power_operator(basis: &Arc<FockBasis>, a: &CMatrix) -> Result<FockOperator> {
    check_len(basis, a.nrows())?;
    check_len(basis, a.ncols())?;
    let d = basis.dim;
    let mut op = FockOperator::zero(basis);
    for (col_beta, beta) in basis.iter().enumerate() {
        // expand (A zeta)^beta = prod_j (sum_k A_jk zeta_k)^{beta_j} as a polynomial
        let mut poly: HashMap<Vec<u32>, C64> = HashMap::from([(vec![0u32; d], ONE)]);
        for (j, &bj) in beta.iter().enumerate() {
            for _ in 0..bj {
                let mut next: HashMap<Vec<u32>, C64> = HashMap::new();
                for (mono, coef) in &poly {
                    for k in 0..d {
                        let ajk = a[(j, k)];
                        if ajk == ZERO {
                            continue;
                        }
                        let mut m = mono.clone();
                        m[k] += 1;
                        *next.entry(m).or_insert(ZERO) += coef * ajk;
                    }
                }
                poly = next;
            }
        }
        let beta_fact: f64 = beta.iter().map(|&b| factorial(b)).product();
        // Lambda_{beta, alpha} = sqrt(alpha! / beta!) [zeta^alpha] (A zeta)^beta
        for (alpha, coef) in poly {
            let row = basis.index(&alpha).expect("degree is preserved");
            let alpha_fact: f64 = alpha.iter().map(|&x| factorial(x)).product();
            op.matrix[(col_beta, row)] = coef * (alpha_fact / beta_fact).sqrt();
        }
    }
    Ok(op)
}

/// `Gamma([rho, p, q, A]) = e^rho exp(a* q) Lambda(A) exp(p* a)` on the truncated space.
pub fn gamma_osc(basis: &Arc<FockBasis>, x: &OscElement) -> Result<FockOperator> {
    check_len(basis, x.dim())?;
    let raise = smeared_adjoint(basis, x.q.as_slice())?.exp_nilpotent();
    let lower = smeared(basis, x.p.as_slice())?.exp_nilpotent();
    let lambda = sym_power_operator(basis, &x.a)?;
    Ok(raise.mul(&lambda).mul(&lower).scaled(x.rho.exp()))
}

/// Bound on `|| Gamma_N(x)|z>_N - |x z>_N ||`.
///
/// The truncation error is `e^rho P exp(a*q) P Lambda(A) P exp(p*a) (1 - P)|z>`
/// with `P` the projection on degree `<= N`; each factor is bounded by its
/// operator norm on the truncated space.
pub fn gamma_action_tail_bound(x: &OscElement, z: &Point, cutoff: usize) -> Result<f64> {
    let (z0, zeta) = point_parts(z)?;
    let nz: f64 = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let np = vec_norm(&x.p);
    let nq = vec_norm(&x.q);
    let na = x.a.clone().singular_values().iter().cloned().fold(0.0, f64::max);
    let n = cutoff;
    // || P exp(p*a) (1 - P)|zeta> ||^2 <= sum_m (2|zeta|^2)^m / m! T_{N-m}(|zeta||p|)^2
    let mut acc = 0.0;
    let mut w = 1.0;
    for m in 0..=n {
        if m > 0 {
            w *= 2.0 * nz * nz / m as f64;
        }
        let t = exp_tail(nz * np, n - m);
        acc += w * t * t;
    }
    let lower = acc.sqrt();
    // || P exp(a*q) P || <= sum_k |q|^k sqrt(N!/(N-k)!) / k!
    let mut raise = 0.0;
    let mut term = 1.0;
    for k in 0..=n {
        if k > 0 {
            term *= nq * ((n - k + 1) as f64).sqrt() / k as f64;
        }
        raise += term;
    }
    let lambda = na.max(1.0).powi(n as i32);
    Ok((x.rho + z0).exp().norm() * raise * lambda * lower)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylReport {
    pub max_difference: f64,
    /// `<0| exp(p*a) exp(a*q) |0>`.
    pub vacuum_element: C64,
    /// `exp(p* q)`.
    pub expected_vacuum: C64,
}

/// Compares `exp(p*a) exp(a*q)` with `exp(p*q) exp(a*q) exp(p*a)` on all basis
/// states of degree `<= probe_degree`.
pub fn weyl_check(basis: &Arc<FockBasis>, p: &[C64], q: &[C64], probe_degree: usize) -> Result<WeylReport> {
    if 2 * probe_degree > basis.cutoff {
        return Err(Error::Degree { degree: 2 * probe_degree, cutoff: basis.cutoff });
    }
    let ep = smeared(basis, p)?.exp_nilpotent();
    let eq = smeared_adjoint(basis, q)?.exp_nilpotent();
    let lhs = ep.mul(&eq);
    let rhs = eq.mul(&ep).scaled(inner(p, q).exp());
    Ok(WeylReport {
        max_difference: lhs.max_column_diff(&rhs, probe_degree),
        vacuum_element: lhs.matrix[(0, 0)],
        expected_vacuum: inner(p, q).exp(),
    })
}

/// `(a*)^beta a^alpha`.
pub fn normal_ordered_monomial(basis: &Arc<FockBasis>, beta: &[u32], alpha: &[u32]) -> Result<FockOperator> {
    check_len(basis, beta.len())?;
    check_len(basis, alpha.len())?;
    let degree: usize = beta.iter().chain(alpha).map(|&x| x as usize).sum();
    if degree > basis.cutoff {
        return Err(Error::Degree { degree, cutoff: basis.cutoff });
    }
    let mut op = FockOperator::identity(basis);
    for (k, &b) in beta.iter().enumerate() {
        let c = creator(basis, k + 1)?;
        for _ in 0..b {
            op = op.mul(&c);
        }
    }
    for (k, &a) in alpha.iter().enumerate() {
        let l = annihilator(basis, k + 1)?;
        for _ in 0..a {
            op = op.mul(&l);
        }
    }
    Ok(op)
}

/// Gaussian realization `f_z(x) = exp(z0 - (x - zeta)^2 / 2)` for `d = 1`.
pub fn gaussian_state(z: &Point, x: f64) -> Result<C64> {
    let (z0, zeta) = point_parts(z)?;
    if zeta.len() != 1 {
        return Err(Error::Dimension { expected: 1, found: zeta.len() });
    }
    let u = C64::from(x) - zeta[0];
    Ok((z0 - u * u * 0.5).exp())
}

/// `f_z* f_z' = int dmu(x) conj(f_z(x)) f_z'(x)` with `dmu = (2 pi)^{-1/2} e^{x^2/2} dx`,
/// evaluated with an `nodes`-point Gauss-Hermite rule and cross-checked
/// against a rule with twice as many nodes.
pub fn gauss_hermite_overlap(z: &Point, zp: &Point, nodes: usize) -> Result<C64> {
    if nodes < 64 {
        return Err(Error::Quadrature(format!("{nodes} nodes requested, at least 64 required")));
    }
    let (a0, a) = point_parts(z)?;
    let (b0, b) = point_parts(zp)?;
    if a.len() != 1 || b.len() != 1 {
        return Err(Error::Dimension { expected: 1, found: a.len().max(b.len()) });
    }
    let eval = |rule: &GaussHermite| -> Result<C64> {
        let mut sum = ZERO;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            // the rule integrates against (2 pi)^{-1/2} e^{-x^2/2}; restore dmu,
            // folding e^{x^2} into the exponent to avoid overflow at the outer nodes
            let u = C64::from(x) - a[0];
            let v = C64::from(x) - b[0];
            let exponent = (a0 - u * u * 0.5).conj() + b0 - v * v * 0.5 + x * x;
            sum += exponent.exp() * w;
        }
        Ok(sum)
    };
    let coarse = eval(&*GaussHermite::cached(nodes)?)?;
    let fine = eval(&*GaussHermite::cached(2 * nodes)?)?;
    if !(coarse.re.is_finite() && coarse.im.is_finite()) || (coarse - fine).norm() > 1e-9 * (1.0 + fine.norm()) {
        return Err(Error::Quadrature(format!("rules with {nodes} and {} nodes disagree: {coarse} vs {fine}", 2 * nodes)));
    }
    Ok(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, I};

    #[test]
    fn basis_order_and_size() {
        let b = FockBasis::new(2, 2);
        let got: Vec<Vec<u32>> = b.iter().map(|a| a.to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(b.len(), basis_size(2, 2));
        assert_eq!(FockBasis::new(3, 10).len(), basis_size(3, 10));
        assert_eq!(basis_size(1, 40), 41);
    }

    #[test]
    fn vacuum_is_annihilated() {
        let b = FockBasis::new(1, 5);
        let a = annihilator(&b, 1).unwrap();
        assert_eq!(a.apply(&FockVector::vacuum(&b)).norm(), 0.0);
        assert!(matches!(annihilator(&b, 2), Err(Error::Index { .. })));
        assert!(matches!(annihilator(&b, 0), Err(Error::Index { .. })));
    }

    #[test]
    fn ccr_on_vacuum() {
        let b = FockBasis::new(1, 5);
        let a = annihilator(&b, 1).unwrap();
        let ad = creator(&b, 1).unwrap();
        let v = a.commutator(&ad).apply(&FockVector::vacuum(&b));
        assert!((v.coeffs - FockVector::vacuum(&b).coeffs).norm() < 1e-15);
    }

    #[test]
    fn distinct_modes_commute_below_cutoff() {
        let b = FockBasis::new(2, 6);
        let a1 = annihilator(&b, 1).unwrap();
        let c2 = creator(&b, 2).unwrap();
        assert!(a1.mul(&c2).max_column_diff(&c2.mul(&a1), 5) == 0.0);
    }

    #[test]
    fn vacuum_coherent_vector() {
        let b = FockBasis::new(2, 4);
        let v = coherent_vector(&b, &Point::klauder(ZERO, vec![ZERO, ZERO])).unwrap();
        assert_eq!(v.coeffs, FockVector::vacuum(&b).coeffs);
    }

    #[test]
    fn overlap_at_one_is_e() {
        let b = FockBasis::new(1, 30);
        let z = Point::klauder(ZERO, vec![ONE]);
        let v = coherent_vector(&b, &z).unwrap();
        let e = v.inner(&v);
        // partial sums of 1/m! up to m = 30 agree with e to rounding
        let partial: f64 = (0..=30u32).map(|m| 1.0 / factorial(m)).sum();
        assert!((e.re - partial).abs() < 1e-14);
        assert!((e - C64::from(std::f64::consts::E)).norm() < 1e-10);
        assert!(overlap_tail_bound(&z, &z, 30).unwrap() < 1e-30);
    }

    #[test]
    fn smeared_unit_vector_is_mode_operator() {
        let b = FockBasis::new(2, 4);
        let s = smeared(&b, &[ZERO, ONE]).unwrap();
        assert_eq!(s.matrix, annihilator(&b, 2).unwrap().matrix);
        let s = smeared_adjoint(&b, &[ONE, ZERO]).unwrap();
        assert_eq!(s.matrix, creator(&b, 1).unwrap().matrix);
        assert!(smeared(&b, &[ONE]).is_err());
    }

    #[test]
    fn sym_power_examples() {
        let b = FockBasis::new(2, 5);
        let id = sym_power_operator(&b, &CMatrix::identity(2, 2)).unwrap();
        assert!(frobenius(&(id.matrix - CMatrix::identity(b.len(), b.len()))) < 1e-15);
        let (c1, c2) = (c(0.5, 0.2), c(-1.1, 0.3));
        let diag = CMatrix::from_row_slice(2, 2, &[c1, ZERO, ZERO, c2]);
        let op = sym_power_operator(&b, &diag).unwrap();
        for (i, alpha) in b.iter().enumerate() {
            let expect = c1.powu(alpha[0]) * c2.powu(alpha[1]);
            assert!((op.matrix[(i, i)] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn normal_ordered_degree_error() {
        let b = FockBasis::new(1, 3);
        assert!(matches!(normal_ordered_monomial(&b, &[2], &[2]), Err(Error::Degree { .. })));
        let id = normal_ordered_monomial(&b, &[0], &[0]).unwrap();
        assert_eq!(id.matrix, CMatrix::identity(4, 4));
    }

    #[test]
    fn weyl_with_zero_p_is_exact() {
        let b = FockBasis::new(1, 20);
        let r = weyl_check(&b, &[ZERO], &[c(0.3, 0.1)], 10).unwrap();
        assert_eq!(r.max_difference, 0.0);
        assert!(weyl_check(&b, &[ZERO], &[ONE], 11).is_err());
    }

    #[test]
    fn gamma_identity() {
        let b = FockBasis::new(2, 6);
        let g = gamma_osc(&b, &OscElement::identity(2)).unwrap();
        assert!(frobenius(&(g.matrix - CMatrix::identity(b.len(), b.len()))) < 1e-15);
    }

    #[test]
    fn quadrature_needs_nodes() {
        let z = Point::klauder(ZERO, vec![ZERO]);
        assert!(matches!(gauss_hermite_overlap(&z, &z, 10), Err(Error::Quadrature(_))));
        let v = gauss_hermite_overlap(&z, &z, 64).unwrap();
        assert!((v - ONE).norm() < 1e-10);
    }

    #[test]
    fn time_frequency_shift() {
        let (tau, omega) = (0.7, -1.3);
        let z = Point::klauder(c(-omega * omega / 2.0, omega * tau), vec![c(tau, omega)]);
        for t in [-2.0, -0.5, 0.0, 0.3, 1.9] {
            let f = gaussian_state(&z, t).unwrap();
            let expect = (I * (omega * t)).exp() * (-(t - tau) * (t - tau) / 2.0).exp();
            assert!((f - expect).norm() < 1e-14);
        }
    }
}
