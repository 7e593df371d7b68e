//! The oscillator semigroup `Os[V]` over `V = C^d`, its unitary subgroup and
//! the Heisenberg group.
//!
//! Elements are carried in the structured form `[rho, p, q, A]`, standing for
//! the block matrix
//!
//! ```text
//! | 1  p*  rho |
//! | 0  A   q   |
//! | 0  0   1   |
//! ```
//!
//! which is only used as an independent check of the product, adjoint and
//! inverse formulas.

use crate::error::{Error, Result};
use crate::linalg::{c, checked_inverse, frobenius, inner, CMatrix, CVector, C64, ZERO};
use crate::space::Point;

/// `[rho, p, q, A]` acting on Klauder points by
/// `[z0, zeta] -> [rho + z0 + p* zeta, q + A zeta]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OscElement {
    pub rho: C64,
    pub p: CVector,
    pub q: CVector,
    pub a: CMatrix,
}

impl OscElement {
    pub fn new(rho: C64, p: CVector, q: CVector, a: CMatrix) -> Result<Self> {
        let d = a.nrows();
        for len in [a.ncols(), p.len(), q.len()] {
            if len != d {
                return Err(Error::Dimension { expected: d, found: len });
            }
        }
        Ok(Self { rho, p, q, a })
    }

    pub fn identity(d: usize) -> Self {
        Self { rho: ZERO, p: CVector::zeros(d), q: CVector::zeros(d), a: CMatrix::identity(d, d) }
    }

    /// `[A] = [0, 0, 0, A]`.
    pub fn linear(a: CMatrix) -> Self {
        let d = a.nrows();
        Self { rho: ZERO, p: CVector::zeros(d), q: CVector::zeros(d), a }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::Dimension { expected: self.dim(), found: d });
        }
        Ok(())
    }

    /// `[rho, p, q, A][rho', p', q', A'] = [rho' + rho + p* q', A'* p + p', q + A q', A A']`.
    pub fn multiply(&self, y: &OscElement) -> Result<OscElement> {
        self.check_dim(y.dim())?;
        Ok(OscElement {
            rho: y.rho + self.rho + inner(self.p.as_slice(), y.q.as_slice()),
            p: y.a.adjoint() * &self.p + &y.p,
            q: &self.q + &self.a * &y.q,
            a: &self.a * &y.a,
        })
    }

    /// `[rho, p, q, A]* = [conj(rho), q, p, A*]`.
    pub fn adjoint(&self) -> OscElement {
        OscElement { rho: self.rho.conj(), p: self.q.clone(), q: self.p.clone(), a: self.a.adjoint() }
    }

    /// `[p* A^-1 q - rho, -A^-* p, -A^-1 q, A^-1]`; refuses when
    /// `sigma_min(A) <= 1e-12 sigma_max(A)`.
    pub fn inverse(&self) -> Result<OscElement> {
        let ainv = checked_inverse(&self.a)?;
        let ainv_q = &ainv * &self.q;
        Ok(OscElement {
            rho: inner(self.p.as_slice(), ainv_q.as_slice()) - self.rho,
            p: -(ainv.adjoint() * &self.p),
            q: -ainv_q,
            a: ainv,
        })
    }

    /// `[rho, p, q, A][z0, zeta] = [rho + z0 + p* zeta, q + A zeta]`.
    pub fn act(&self, z: &Point) -> Result<Point> {
        match z {
            Point::Klauder { z0, zeta } => {
                self.check_dim(zeta.len())?;
                let zv = CVector::from_column_slice(zeta);
                let new_zeta = &self.q + &self.a * &zv;
                Ok(Point::Klauder {
                    z0: self.rho + z0 + inner(self.p.as_slice(), zeta),
                    zeta: new_zeta.iter().cloned().collect(),
                })
            }
            other => Err(Error::Domain { space: "klauder", detail: format!("oscillator elements act on Klauder points, got {other:?}") }),
        }
    }

    pub fn as_block_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::identity(d + 2, d + 2);
        for k in 0..d {
            m[(0, 1 + k)] = self.p[k].conj();
            m[(1 + k, d + 1)] = self.q[k];
            for l in 0..d {
                m[(1 + k, 1 + l)] = self.a[(k, l)];
            }
        }
        m[(0, d + 1)] = self.rho;
        m
    }

    /// Reads an element back from its block matrix; the fixed entries are not checked.
    pub fn from_block_matrix(m: &CMatrix) -> OscElement {
        let d = m.nrows() - 2;
        OscElement {
            rho: m[(0, d + 1)],
            p: CVector::from_fn(d, |k, _| m[(0, 1 + k)].conj()),
            q: CVector::from_fn(d, |k, _| m[(1 + k, d + 1)]),
            a: CMatrix::from_fn(d, d, |k, l| m[(1 + k, 1 + l)]),
        }
    }

    /// Largest absolute deviation between two elements.
    pub fn max_abs_diff(&self, other: &OscElement) -> f64 {
        let mut worst = (self.rho - other.rho).norm();
        for (x, y) in self.p.iter().zip(other.p.iter()).chain(self.q.iter().zip(other.q.iter())).chain(self.a.iter().zip(other.a.iter())) {
            worst = worst.max((x - y).norm());
        }
        worst
    }

    /// Unitarity residual `max |x* - x^-1|`.
    pub fn unitarity_residual(&self) -> Result<f64> {
        Ok(self.adjoint().max_abs_diff(&self.inverse()?))
    }
}

/// `[alpha, q, A]` with `alpha` purely imaginary and `A` unitary, standing for
/// `[(alpha - q* q)/2, -A* q, q, A]`. Only `Im alpha` is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOscElement {
    pub alpha_im: f64,
    pub q: CVector,
    pub a: CMatrix,
}

impl UnitaryOscElement {
    pub fn new(alpha_im: f64, q: CVector, a: CMatrix) -> Result<Self> {
        let d = a.nrows();
        if a.ncols() != d || q.len() != d {
            return Err(Error::Dimension { expected: d, found: q.len() });
        }
        let residual = frobenius(&(a.adjoint() * &a - CMatrix::identity(d, d)));
        if residual > 1e-12 {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { alpha_im, q, a })
    }

    pub fn alpha(&self) -> C64 {
        c(0.0, self.alpha_im)
    }

    pub fn embed(&self) -> OscElement {
        OscElement {
            rho: (self.alpha() - inner(self.q.as_slice(), self.q.as_slice())) * 0.5,
            p: -(self.a.adjoint() * &self.q),
            q: self.q.clone(),
            a: self.a.clone(),
        }
    }

    /// Product law `[alpha + alpha' - q* A q' + q'* A* q, q + A q', A A']`.
    ///
    /// The vector slot follows the oscillator product, `q + A q'`.
    pub fn multiply(&self, y: &UnitaryOscElement) -> Result<UnitaryOscElement> {
        if self.q.len() != y.q.len() {
            return Err(Error::Dimension { expected: self.q.len(), found: y.q.len() });
        }
        let aq = &self.a * &y.q;
        let cross = -inner(self.q.as_slice(), aq.as_slice()) + inner(aq.as_slice(), self.q.as_slice());
        Ok(UnitaryOscElement { alpha_im: self.alpha_im + y.alpha_im + cross.im, q: &self.q + aq, a: &self.a * &y.a })
    }

    /// `[alpha, q, A]^-1 = [-alpha, -A^-1 q, A^-1]`.
    pub fn inverse(&self) -> UnitaryOscElement {
        let ainv = self.a.adjoint();
        UnitaryOscElement { alpha_im: -self.alpha_im, q: -(&ainv * &self.q), a: ainv }
    }
}

/// Symplectic form `sigma(q, q') = 2 Im q* q'`.
pub fn sigma(q: &CVector, qp: &CVector) -> f64 {
    2.0 * inner(q.as_slice(), qp.as_slice()).im
}

/// `W_lambda(q)` with `W_l(q) W_l'(q') = W_{l + l' + sigma(q, q')}(q + q')`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergElement {
    pub lambda: f64,
    pub q: CVector,
}

impl HeisenbergElement {
    pub fn new(lambda: f64, q: CVector) -> Self {
        Self { lambda, q }
    }

    pub fn multiply(&self, other: &HeisenbergElement) -> Result<HeisenbergElement> {
        if self.q.len() != other.q.len() {
            return Err(Error::Dimension { expected: self.q.len(), found: other.q.len() });
        }
        Ok(HeisenbergElement { lambda: self.lambda + other.lambda + sigma(&self.q, &other.q), q: &self.q + &other.q })
    }

    pub fn inverse(&self) -> HeisenbergElement {
        HeisenbergElement { lambda: -self.lambda, q: -&self.q }
    }

    /// The unitary element `[-i lambda, q, 1]`, i.e. `[(-i lambda - q* q)/2, -q, q, 1]`.
    ///
    /// The sign of `alpha` makes the embedding a homomorphism for the
    /// `+sigma` cocycle above.
    pub fn to_unitary(&self) -> UnitaryOscElement {
        let d = self.q.len();
        UnitaryOscElement { alpha_im: -self.lambda, q: self.q.clone(), a: CMatrix::identity(d, d) }
    }

    pub fn embed(&self) -> OscElement {
        self.to_unitary().embed()
    }

    /// Action on Klauder points, `[(-i lambda - q* q)/2 + z0 - q* zeta, q + zeta]`.
    pub fn act(&self, z: &Point) -> Result<Point> {
        self.embed().act(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE};

    fn v(xs: &[C64]) -> CVector {
        CVector::from_column_slice(xs)
    }

    fn m1(x: C64) -> CMatrix {
        CMatrix::from_element(1, 1, x)
    }

    #[test]
    fn identity_is_neutral() {
        let x = OscElement::new(c(0.3, 1.0), v(&[c(1.0, 2.0)]), v(&[c(-1.0, 0.5)]), m1(c(2.0, -1.0))).unwrap();
        let one = OscElement::identity(1);
        assert_eq!(one.multiply(&x).unwrap(), x);
        assert_eq!(x.multiply(&one).unwrap(), x);
        assert_eq!(one.adjoint(), one);
        assert_eq!(one.inverse().unwrap(), one);
        assert_eq!(one.as_block_matrix(), CMatrix::identity(3, 3));
    }

    #[test]
    fn d1_product_example() {
        let x = OscElement::new(ZERO, v(&[ONE]), v(&[c(2.0, 0.0)]), m1(ONE)).unwrap();
        let y = OscElement::new(ZERO, v(&[ZERO]), v(&[c(3.0, 0.0)]), m1(ONE)).unwrap();
        let xy = x.multiply(&y).unwrap();
        let expect = OscElement::new(c(3.0, 0.0), v(&[ONE]), v(&[c(5.0, 0.0)]), m1(ONE)).unwrap();
        assert_eq!(xy, expect);
        let oracle = OscElement::from_block_matrix(&(x.as_block_matrix() * y.as_block_matrix()));
        assert_eq!(oracle, expect);
    }

    #[test]
    fn d1_adjoint_example() {
        let x = OscElement::new(I, v(&[ONE]), v(&[c(2.0, 0.0)]), m1(c(3.0, 0.5))).unwrap();
        let expect = OscElement::new(-I, v(&[c(2.0, 0.0)]), v(&[ONE]), m1(c(3.0, -0.5))).unwrap();
        assert_eq!(x.adjoint(), expect);
        assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn singular_inverse() {
        let x = OscElement::linear(CMatrix::zeros(2, 2));
        assert!(matches!(x.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(OscElement::identity(1).multiply(&OscElement::identity(2)), Err(Error::Dimension { .. })));
        assert!(OscElement::new(ZERO, v(&[ONE]), v(&[ONE, ONE]), m1(ONE)).is_err());
        assert!(OscElement::identity(2).act(&Point::klauder(ZERO, vec![ONE])).is_err());
    }

    #[test]
    fn unitary_identity_and_validation() {
        let u = UnitaryOscElement::new(0.0, CVector::zeros(2), CMatrix::identity(2, 2)).unwrap();
        assert_eq!(u.embed(), OscElement::identity(2));
        assert!(matches!(UnitaryOscElement::new(0.0, CVector::zeros(1), m1(c(2.0, 0.0))), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn heisenberg_examples() {
        let w = HeisenbergElement::new(0.0, v(&[ZERO]));
        assert_eq!(w.multiply(&w).unwrap(), w);
        let a = HeisenbergElement::new(0.0, v(&[ONE]));
        let b = HeisenbergElement::new(0.0, v(&[I]));
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab, HeisenbergElement::new(2.0, v(&[c(1.0, 1.0)])));
        let x = HeisenbergElement::new(0.7, v(&[c(0.2, -0.4)]));
        assert_eq!(x.inverse(), HeisenbergElement::new(-0.7, v(&[c(-0.2, 0.4)])));
        let e = x.multiply(&x.inverse()).unwrap();
        assert_eq!(e.lambda, 0.0);
    }

    #[test]
    fn sigma_is_antisymmetric() {
        let q = v(&[c(0.3, 1.0), c(-0.2, 0.5)]);
        let p = v(&[c(1.3, -0.1), c(0.7, 0.2)]);
        assert_eq!(sigma(&q, &p), -sigma(&p, &q));
        assert_eq!(sigma(&v(&[ONE]), &v(&[I])), 2.0);
    }

    #[test]
    fn heisenberg_embedding_is_homomorphic() {
        let a = HeisenbergElement::new(0.4, v(&[c(0.3, 1.0)]));
        let b = HeisenbergElement::new(-1.1, v(&[c(-0.5, 0.2)]));
        let lhs = a.multiply(&b).unwrap().embed();
        let rhs = a.embed().multiply(&b.embed()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn heisenberg_action_formula() {
        let w = HeisenbergElement::new(0.8, v(&[c(0.3, -0.6)]));
        let z = Point::klauder(c(0.1, 0.2), vec![c(-0.4, 0.9)]);
        let got = w.act(&z).unwrap();
        let (q, zeta) = (c(0.3, -0.6), c(-0.4, 0.9));
        let expect_z0 = (c(0.0, -0.8) - q.conj() * q) * 0.5 + c(0.1, 0.2) - q.conj() * zeta;
        match got {
            Point::Klauder { z0, zeta: nz } => {
                assert!((z0 - expect_z0).norm() < 1e-15);
                assert!((nz[0] - (q + zeta)).norm() < 1e-15);
            }
            _ => unreachable!(),
        }
    }
}
