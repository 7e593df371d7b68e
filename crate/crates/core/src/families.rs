//! Seeded families of coherent maps whose orbits span finite-dimensional
//! subspaces, so that quantization on a finite sample is exact.
//!
//! A generic Möbius or oscillator map has infinite orbits and no finite sample
//! is closed under it. Elliptic elements of finite order are closed: a
//! Möbius map `s g diag(w^k, 1) g^-1` with `g` in `SU(1,1)` and `w` a root
//! of unity permutes finitely many rays, and a unitary oscillator element
//! with `A = e^{i theta}`, `theta` a rational multiple of `2 pi`, rotates
//! `zeta` about a fixed centre.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::linalg::{CMatrix, CVector, C64, ONE, ZERO};
use crate::maps::{MapSpec, OrbitSample};
use crate::oscillator::{OscElement, UnitaryOscElement};
use crate::space::{random, Point, SampleSet, Space};

pub type Mat2 = [[C64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// `[[a, b], [conj b, conj a]]` with `|a|^2 - |b|^2 = 1`, rapidity below `t_max`.
pub fn random_su11(rng: &mut impl Rng, t_max: f64) -> Mat2 {
    let t: f64 = rng.random_range(0.0..t_max);
    let a = C64::from_polar(t.cosh(), rng.random_range(-PI..PI));
    let b = C64::from_polar(t.sinh(), rng.random_range(-PI..PI));
    [[a, b], [b.conj(), a.conj()]]
}

fn su11_inverse(g: &Mat2) -> Mat2 {
    [[g[0][0].conj(), -g[0][1]], [-g[1][0], g[0][0]]]
}

/// Elliptic Möbius maps `s g diag(w^k, 1) g^-1` sharing the fixed point of `g`.
#[derive(Clone, Debug)]
pub struct EllipticMoebius {
    pub g: Mat2,
    pub order: u32,
}

impl EllipticMoebius {
    pub fn random(rng: &mut impl Rng, order: u32) -> Self {
        Self { g: random_su11(rng, 0.8), order }
    }

    pub fn matrix(&self, k: u32, scalar: C64) -> Mat2 {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / self.order as f64);
        let d = [[w * scalar, ZERO], [ZERO, scalar]];
        mat2_mul(&mat2_mul(&self.g, &d), &su11_inverse(&self.g))
    }

    pub fn map(&self, k: u32, scalar: C64) -> Result<MapSpec> {
        MapSpec::moebius(self.matrix(k, scalar))
    }

    /// The rays of `seeds` under the cyclic group, one point per ray.
    pub fn orbit(&self, seeds: Vec<Point>) -> Result<OrbitSample> {
        let base = SampleSet::new(Space::Moebius, seeds)?;
        OrbitSample::new(base, vec![self.map(1, ONE)?], self.order as usize)
    }
}

/// A pair of Möbius maps and a 12-point sample closed under both.
#[derive(Clone, Debug)]
pub struct MoebiusPair {
    pub a: MapSpec,
    pub b: MapSpec,
    pub orbit: OrbitSample,
}

/// Two elliptic maps of order 6 with a common fixed point, scaled by random
/// complex numbers with modulus in `[0.5, 2)` (unit modulus when `unitary`),
/// and the orbit of two random seeds.
pub fn moebius_pair(rng: &mut impl Rng, unitary: bool) -> Result<MoebiusPair> {
    let family = EllipticMoebius::random(rng, 6);
    let scalar = |rng: &mut dyn rand::RngCore| {
        let modulus = if unitary { 1.0 } else { rng.random_range(0.5..2.0) };
        C64::from_polar(modulus, rng.random_range(-PI..PI))
    };
    let (sa, sb) = (scalar(rng), scalar(rng));
    let seeds = vec![random::moebius_point(rng), random::moebius_point(rng)];
    Ok(MoebiusPair { a: family.map(1, sa)?, b: family.map(2, sb)?, orbit: family.orbit(seeds)? })
}

/// A unitary oscillator element on `Kl[C]` of finite order `m` in `3..=6`, and
/// the orbit of one seed point.
#[derive(Clone, Debug)]
pub struct FiniteOrderUnitary {
    pub element: UnitaryOscElement,
    pub order: u32,
    pub orbit: OrbitSample,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn finite_order_unitary(rng: &mut impl Rng) -> Result<FiniteOrderUnitary> {
    let order: u32 = rng.random_range(3..=6);
    let k = loop {
        let k = rng.random_range(1..order);
        if gcd(k, order) == 1 {
            break k;
        }
    };
    let u = C64::from_polar(1.0, 2.0 * PI * k as f64 / order as f64);
    let q = C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let alpha_im = rng.random_range(-1.0..1.0);
    let element = UnitaryOscElement::new(alpha_im, CVector::from_vec(vec![q]), CMatrix::from_element(1, 1, u))?;
    // zeta -> q + u zeta fixes q / (1 - u)
    let centre = q / (ONE - u);
    let seed = Point::klauder(
        C64::new(rng.random_range(-0.5..0.5), rng.random_range(-PI..PI)),
        vec![centre + C64::from_polar(rng.random_range(0.8..1.2), rng.random_range(-PI..PI))],
    );
    let base = SampleSet::new(Space::klauder(1), vec![seed])?;
    let orbit = OrbitSample::new(base, vec![MapSpec::oscillator(element.embed())], order as usize)?;
    Ok(FiniteOrderUnitary { element, order, orbit })
}

/// A random oscillator element on `C^d` with `||p||, ||q|| <= pq_max`,
/// `||A||_F <= a_max` and `|rho| <= 0.5`.
pub fn random_osc(rng: &mut impl Rng, d: usize, pq_max: f64, a_max: f64) -> OscElement {
    let p = ball_vector(rng, d, pq_max);
    let q = ball_vector(rng, d, pq_max);
    let a = CMatrix::from_fn(d, d, |_, _| random::disk(rng, 1.0));
    let scale = a_max * rng.random_range(0.2..1.0) / crate::linalg::frobenius(&a).max(1e-300);
    let rho = random::disk(rng, 0.5);
    OscElement { rho, p, q, a: a * C64::new(scale, 0.0) }
}

fn ball_vector(rng: &mut impl Rng, d: usize, r: f64) -> CVector {
    let v = CVector::from_fn(d, |_, _| random::disk(rng, 1.0));
    let n = crate::linalg::vec_norm(&v).max(1e-300);
    v * C64::new(r * rng.random_range(0.0f64..1.0).powf(1.0 / (2 * d) as f64) / n, 0.0)
}

/// A point `[0, zeta]` of the Glauber slice with `|zeta| <= r` in `C^d`.
pub fn glauber_point(rng: &mut impl Rng, d: usize, r: f64) -> Point {
    let zeta = ball_vector(rng, d, r);
    Point::klauder(ZERO, zeta.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{check_coherence, quantize, verify_homomorphism};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn elliptic_has_finite_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = EllipticMoebius::random(&mut rng, 6);
        let a = fam.matrix(1, ONE);
        let mut p = a;
        for _ in 0..5 {
            p = mat2_mul(&p, &a);
        }
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { ONE } else { ZERO };
                assert!((v - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pair_orbit_has_twelve_rays() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pair = moebius_pair(&mut rng, false).unwrap();
        assert_eq!(pair.orbit.len(), 12);
        assert_eq!(pair.orbit.factorization().rank, 12);
        let r = verify_homomorphism(&pair.orbit, &pair.a, &pair.b, 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
        let c = check_coherence(&Space::Moebius, &pair.a, &pair.orbit.closed_points, 1e-12).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn unitary_orbit_is_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = finite_order_unitary(&mut rng).unwrap();
        assert_eq!(f.orbit.len(), f.order as usize);
        let map = MapSpec::oscillator(f.element.embed());
        quantize(&f.orbit, &map, 1e-8).unwrap();
    }
}
