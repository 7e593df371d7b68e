//! Coherent spaces as kernel objects.
//!
//! A [`Space`] bundles a coherent product `K(z, z')`, a domain predicate and,
//! where available, a scalar multiplication `lambda z` with
//! `K(z', lambda z) = lambda^e K(z', z)` for a fixed degree `e`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitize, inner, CMatrix, HermitianEigen, C64, ONE, ZERO};

/// Margin used by the strict domain inequalities.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// A point of one of the builtin coherent spaces.
///
/// Equality is structural: two points are the same point only when every
/// stored field agrees bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// Row/column index into a tabulated kernel.
    Finite(usize),
    /// Point of the open unit disk (Szegő space).
    Disk(C64),
    /// Point `(z1, z2)` with `|z1| > |z2|` (Möbius space).
    Moebius(C64, C64),
    /// Point `[z0, zeta]` of a Klauder space.
    Klauder { z0: C64, zeta: Vec<C64> },
    /// Point `(lambda, z)` of a projective extension.
    Projective { lambda: C64, base: Box<Point> },
    /// Vector of an ambient Euclidean space with `K(v, v') = v* v'`.
    Embedded(Vec<C64>),
    /// Point `(alpha, z)` of the times construction, `alpha` a scalar multiplication.
    Times { alpha: C64, base: Box<Point> },
}

impl Point {
    pub fn klauder(z0: C64, zeta: Vec<C64>) -> Self {
        Point::Klauder { z0, zeta }
    }

    pub fn projective(lambda: C64, base: Point) -> Self {
        Point::Projective { lambda, base: Box::new(base) }
    }

    pub fn times(alpha: C64, base: Point) -> Self {
        Point::Times { alpha, base: Box::new(base) }
    }

    /// Bit pattern of every stored number, used for exact identity lookups.
    pub fn key(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.push_key(&mut out);
        out
    }

    fn push_key(&self, out: &mut Vec<u64>) {
        let push = |z: &C64, out: &mut Vec<u64>| {
            out.push(z.re.to_bits());
            out.push(z.im.to_bits());
        };
        match self {
            Point::Finite(i) => {
                out.push(0);
                out.push(*i as u64);
            }
            Point::Disk(z) => {
                out.push(1);
                push(z, out);
            }
            Point::Moebius(a, b) => {
                out.push(2);
                push(a, out);
                push(b, out);
            }
            Point::Klauder { z0, zeta } => {
                out.push(3);
                out.push(zeta.len() as u64);
                push(z0, out);
                zeta.iter().for_each(|z| push(z, out));
            }
            Point::Projective { lambda, base } => {
                out.push(4);
                push(lambda, out);
                base.push_key(out);
            }
            Point::Embedded(v) => {
                out.push(5);
                out.push(v.len() as u64);
                v.iter().for_each(|z| push(z, out));
            }
            Point::Times { alpha, base } => {
                out.push(6);
                push(alpha, out);
                base.push_key(out);
            }
        }
    }

    fn is_finite(&self) -> bool {
        let ok = |z: &C64| z.re.is_finite() && z.im.is_finite();
        match self {
            Point::Finite(_) => true,
            Point::Disk(z) => ok(z),
            Point::Moebius(a, b) => ok(a) && ok(b),
            Point::Klauder { z0, zeta } => ok(z0) && zeta.iter().all(ok),
            Point::Projective { lambda, base } | Point::Times { alpha: lambda, base } => ok(lambda) && base.is_finite(),
            Point::Embedded(v) => v.iter().all(ok),
        }
    }
}

/// Builtin kinds of coherent space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Finite,
    Embedded,
    Szego,
    Moebius,
    Klauder,
    Projective,
    Times,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Finite => "finite",
            SpaceKind::Embedded => "embedded",
            SpaceKind::Szego => "szego",
            SpaceKind::Moebius => "moebius",
            SpaceKind::Klauder => "klauder",
            SpaceKind::Projective => "projective",
            SpaceKind::Times => "times",
        }
    }
}

/// A coherent space: kernel evaluator, domain predicate and optional
/// projective structure.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    /// Kernel tabulated on `n` abstract points `Finite(0..n)`.
    Finite { table: CMatrix },
    /// Subset of `C^dim` with `K(v, v') = v* v'`.
    Embedded { dim: usize },
    /// Open unit disk with `K(z, z') = 1 / (1 - conj(z) z')`.
    Szego,
    /// `{|z1| > |z2|}` with `K(z, z') = 1 / (conj(z1) z1' - conj(z2) z2')`, degree -1.
    Moebius,
    /// `C x C^dim` with `K = exp(conj(z0) + z0' + zeta* zeta')`, degree 1.
    Klauder { dim: usize },
    /// Projective extension `C* x Z` of degree `degree`.
    Projective { base: Box<Space>, degree: i32 },
    /// The space `(sep Z) x Z`, separable maps restricted to scalar multiplications.
    Times { base: Box<Space> },
}

impl Space {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Finite { .. } => SpaceKind::Finite,
            Space::Embedded { .. } => SpaceKind::Embedded,
            Space::Szego => SpaceKind::Szego,
            Space::Moebius => SpaceKind::Moebius,
            Space::Klauder { .. } => SpaceKind::Klauder,
            Space::Projective { .. } => SpaceKind::Projective,
            Space::Times { .. } => SpaceKind::Times,
        }
    }

    pub fn finite(table: CMatrix) -> Self {
        Space::Finite { table }
    }

    pub fn klauder(dim: usize) -> Self {
        Space::Klauder { dim }
    }

    fn domain_err(&self, detail: impl Into<String>) -> Error {
        Error::Domain { space: self.kind().name(), detail: detail.into() }
    }

    /// Checks the domain predicate, reporting why a point is rejected.
    pub fn check_point(&self, z: &Point) -> Result<()> {
        if !z.is_finite() {
            return Err(self.domain_err("non-finite coordinate"));
        }
        match (self, z) {
            (Space::Finite { table }, Point::Finite(i)) => {
                if *i < table.nrows() {
                    Ok(())
                } else {
                    Err(self.domain_err(format!("index {i} >= {}", table.nrows())))
                }
            }
            (Space::Embedded { dim }, Point::Embedded(v)) => {
                if v.len() == *dim {
                    Ok(())
                } else {
                    Err(self.domain_err(format!("vector of length {} in dimension {dim}", v.len())))
                }
            }
            (Space::Szego, Point::Disk(z)) => {
                if z.norm() < 1.0 - DOMAIN_MARGIN {
                    Ok(())
                } else {
                    Err(self.domain_err(format!("|z| = {} is not < 1", z.norm())))
                }
            }
            (Space::Moebius, Point::Moebius(a, b)) => {
                if a.norm() - b.norm() > DOMAIN_MARGIN * a.norm() && a.norm() > 0.0 {
                    Ok(())
                } else {
                    Err(self.domain_err(format!("|z1| = {} is not > |z2| = {}", a.norm(), b.norm())))
                }
            }
            (Space::Klauder { dim }, Point::Klauder { zeta, .. }) => {
                if zeta.len() == *dim {
                    Ok(())
                } else {
                    Err(self.domain_err(format!("zeta of length {} in dimension {dim}", zeta.len())))
                }
            }
            (Space::Projective { base, .. }, Point::Projective { lambda, base: p }) => {
                if *lambda == ZERO {
                    return Err(self.domain_err("lambda = 0"));
                }
                base.check_point(p)
            }
            (Space::Times { base }, Point::Times { alpha, base: p }) => {
                if *alpha == ZERO {
                    return Err(self.domain_err("alpha = 0"));
                }
                base.check_point(p)
            }
            _ => Err(self.domain_err(format!("wrong point variant {z:?}"))),
        }
    }

    pub fn contains(&self, z: &Point) -> bool {
        self.check_point(z).is_ok()
    }

    /// The coherent product `K(z, z')`, antilinear in the first slot.
    pub fn kernel(&self, z: &Point, zp: &Point) -> Result<C64> {
        self.check_point(z)?;
        self.check_point(zp)?;
        self.kernel_unchecked(z, zp)
    }

    fn kernel_unchecked(&self, z: &Point, zp: &Point) -> Result<C64> {
        let value = match (self, z, zp) {
            (Space::Finite { table }, Point::Finite(i), Point::Finite(j)) => table[(*i, *j)],
            (Space::Embedded { .. }, Point::Embedded(v), Point::Embedded(w)) => inner(v, w),
            (Space::Szego, Point::Disk(a), Point::Disk(b)) => {
                let d = ONE - a.conj() * b;
                if d == ZERO {
                    return Err(Error::Singularity);
                }
                d.inv()
            }
            (Space::Moebius, Point::Moebius(a1, a2), Point::Moebius(b1, b2)) => {
                let d = a1.conj() * b1 - a2.conj() * b2;
                if d == ZERO {
                    return Err(Error::Singularity);
                }
                d.inv()
            }
            (Space::Klauder { .. }, Point::Klauder { z0, zeta }, Point::Klauder { z0: w0, zeta: w }) => {
                (z0.conj() + w0 + inner(zeta, w)).exp()
            }
            (Space::Projective { base, degree }, Point::Projective { lambda, base: p }, Point::Projective { lambda: mu, base: q }) => {
                lambda.conj().powi(*degree) * base.kernel_unchecked(p, q)? * mu.powi(*degree)
            }
            (Space::Times { base }, Point::Times { alpha, base: p }, Point::Times { alpha: beta, base: q }) => {
                // K_x((a, z); (b, z')) = K(b z, a z')
                let bz = base.scale_unchecked(*beta, p)?;
                let az = base.scale_unchecked(*alpha, q)?;
                base.kernel_unchecked(&bz, &az)?
            }
            _ => unreachable!("points were checked against the space"),
        };
        if value.re.is_finite() && value.im.is_finite() {
            Ok(value)
        } else {
            Err(Error::Singularity)
        }
    }

    /// Degree `e` of the projective structure, if any.
    pub fn projective_degree(&self) -> Option<i32> {
        match self {
            Space::Moebius => Some(-1),
            Space::Klauder { .. } => Some(1),
            Space::Projective { degree, .. } => Some(*degree),
            Space::Times { base } => base.projective_degree(),
            _ => None,
        }
    }

    /// Scalar multiplication `lambda z`.
    ///
    /// Klauder spaces use `lambda [z0, zeta] = [z0 + Log lambda, zeta]` with the
    /// principal branch of the logarithm.
    pub fn scale(&self, lambda: C64, z: &Point) -> Result<Point> {
        self.check_point(z)?;
        if lambda == ZERO {
            return Err(self.domain_err("scalar multiplication by 0"));
        }
        self.scale_unchecked(lambda, z)
    }

    fn scale_unchecked(&self, lambda: C64, z: &Point) -> Result<Point> {
        match (self, z) {
            (Space::Moebius, Point::Moebius(a, b)) => Ok(Point::Moebius(lambda * a, lambda * b)),
            (Space::Klauder { .. }, Point::Klauder { z0, zeta }) => {
                Ok(Point::Klauder { z0: z0 + lambda.ln(), zeta: zeta.clone() })
            }
            (Space::Projective { .. }, Point::Projective { lambda: mu, base }) => {
                Ok(Point::Projective { lambda: lambda * mu, base: base.clone() })
            }
            (Space::Times { base }, Point::Times { alpha, base: p }) => {
                Ok(Point::Times { alpha: *alpha, base: Box::new(base.scale_unchecked(lambda, p)?) })
            }
            _ => Err(Error::NotProjective(self.kind().name())),
        }
    }

    pub fn has_scalar_multiplication(&self) -> bool {
        self.projective_degree().is_some()
    }
}

/// Projective extension `PZ = C* x Z` of degree `e`.
pub fn projective_extension(space: &Space, degree: i32) -> Result<Space> {
    if degree == 0 {
        return Err(Error::Config { field: "degree".into(), message: "projective degree must be nonzero".into() });
    }
    Ok(Space::Projective { base: Box::new(space.clone()), degree })
}

/// The space `(sep Z) x Z` with `K_x((a, z); (b, z')) = K(b z, a z')`.
///
/// Only the scalar multiplications of a projective builtin are used as
/// separable maps.
pub fn times_space(space: &Space) -> Result<Space> {
    if !space.has_scalar_multiplication() {
        return Err(Error::NotProjective(space.kind().name()));
    }
    Ok(Space::Times { base: Box::new(space.clone()) })
}

/// A finite ordered sample of points of one space.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub space: Space,
    pub points: Vec<Point>,
}

impl SampleSet {
    pub fn new(space: Space, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config { field: "points".into(), message: "a sample needs at least one point".into() });
        }
        for p in &points {
            space.check_point(p)?;
        }
        Ok(Self { space, points })
    }

    /// Sample of all points of a tabulated kernel.
    pub fn finite(table: CMatrix) -> Result<Self> {
        let n = table.nrows();
        Self::new(Space::finite(table), (0..n).map(Point::Finite).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `G_jk = K(z_j, z_k)`, symmetrized, with the asymmetry checked.
pub fn gram_matrix(sample: &SampleSet) -> Result<CMatrix> {
    let n = sample.len();
    let mut g = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            g[(j, k)] = sample.space.kernel_unchecked(&sample.points[j], &sample.points[k])?;
        }
    }
    let (h, correction) = hermitize(&g);
    if correction > 1e-12 {
        return Err(Error::NotHermitian { correction });
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub passed: bool,
}

/// Passes iff `lambda_min(G) >= -eps * max(lambda_max(G), 1)`.
pub fn check_positive_type(sample: &SampleSet, eps: f64) -> Result<PositivityReport> {
    let g = gram_matrix(sample)?;
    Ok(positivity_of(&g, eps))
}

pub fn positivity_of(g: &CMatrix, eps: f64) -> PositivityReport {
    let e = HermitianEigen::new(g);
    let (min, max) = (e.min(), e.max());
    PositivityReport { min_eigenvalue: min, max_eigenvalue: max, passed: min >= -eps * max.max(1.0) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivityReport {
    pub degree: i32,
    pub max_residual: f64,
    pub passed: bool,
}

pub const PROJECTIVITY_TOL: f64 = 1e-10;

/// Checks `K(z', lambda z) = lambda^e K(z', z)` over all sample pairs for the given scalars.
pub fn check_projectivity_with(space: &Space, sample: &SampleSet, lambdas: &[C64]) -> Result<ProjectivityReport> {
    let degree = space.projective_degree().ok_or(Error::NotProjective(space.kind().name()))?;
    let mut worst: f64 = 0.0;
    for &lambda in lambdas {
        let factor = lambda.powi(degree);
        for z in &sample.points {
            let lz = space.scale(lambda, z)?;
            for zp in &sample.points {
                let lhs = space.kernel(zp, &lz)?;
                let rhs = factor * space.kernel(zp, z)?;
                worst = worst.max((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(ProjectivityReport { degree, max_residual: worst, passed: worst <= PROJECTIVITY_TOL })
}

/// As [`check_projectivity_with`], for `trials` seeded random `lambda` with
/// modulus in `[0.5, 2]` and uniform phase.
pub fn check_projectivity(space: &Space, sample: &SampleSet, trials: usize, seed: u64) -> Result<ProjectivityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<C64> = (0..trials)
        .map(|_| C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-PI..PI)))
        .collect();
    check_projectivity_with(space, sample, &lambdas)
}

/// Seeded point generators for the builtin spaces.
///
/// * Szegő: radius with uniform square in `[0, r_max^2)`, uniform phase.
/// * Möbius: `z1`, `z2` drawn the same way in the unit disk, rejecting `|z2| >= |z1|`.
/// * Klauder: each `zeta_k` uniform in the disk of radius `zeta_max`,
///   `Re z0` uniform in `[-0.5, 0.5]`, `Im z0` uniform in `[-pi, pi]`.
pub mod random {
    use super::*;

    pub fn disk(rng: &mut impl Rng, r_max: f64) -> C64 {
        let r = (rng.random::<f64>()).sqrt() * r_max;
        C64::from_polar(r, rng.random_range(-PI..PI))
    }

    pub fn szego_point(rng: &mut impl Rng) -> Point {
        Point::Disk(disk(rng, 0.95))
    }

    pub fn moebius_point(rng: &mut impl Rng) -> Point {
        loop {
            let z1 = disk(rng, 1.0);
            let z2 = disk(rng, 1.0);
            if z2.norm() < z1.norm() * (1.0 - 1e-6) {
                return Point::Moebius(z1, z2);
            }
        }
    }

    pub fn klauder_point(rng: &mut impl Rng, dim: usize, zeta_max: f64) -> Point {
        let z0 = c(rng.random_range(-0.5..0.5), rng.random_range(-PI..PI));
        let zeta = (0..dim).map(|_| disk(rng, zeta_max)).collect();
        Point::Klauder { z0, zeta }
    }

    /// `n` Möbius points whose ratios `z2/z1` sit at jittered, evenly spaced
    /// angles with modulus in `[0.8, 0.95)`; `z1` has modulus in `[0.5, 2)`.
    ///
    /// Uniform draws over the whole domain often yield Gram matrices that are
    /// numerically singular at `1e-10` for `n` around 15; spreading the rays
    /// keeps the spectrum away from rounding level.
    pub fn moebius_spread(rng: &mut impl Rng, n: usize) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let angle = 2.0 * PI * (k as f64 + rng.random_range(-0.3..0.3)) / n as f64;
                let w = C64::from_polar(rng.random_range(0.8..0.95), angle);
                let z1 = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-PI..PI));
                Point::Moebius(z1, z1 * w)
            })
            .collect()
    }

    /// A random point of `space`; tabulated spaces draw a random index.
    pub fn point(space: &Space, rng: &mut impl Rng) -> Point {
        match space {
            Space::Finite { table } => Point::Finite(rng.random_range(0..table.nrows())),
            Space::Embedded { dim } => Point::Embedded((0..*dim).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()),
            Space::Szego => szego_point(rng),
            Space::Moebius => moebius_point(rng),
            Space::Klauder { dim } => klauder_point(rng, *dim, 1.0),
            Space::Projective { base, .. } => Point::projective(C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-PI..PI)), point(base, rng)),
            Space::Times { base } => Point::times(C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-PI..PI)), point(base, rng)),
        }
    }

    pub fn sample(space: &Space, n: usize, seed: u64) -> Result<SampleSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n).map(|_| point(space, &mut rng)).collect();
        SampleSet::new(space.clone(), points)
    }
}

/// The 12 vertices of the icosahedron `(0, ±1, ±phi)` and cyclic permutations.
pub fn icosahedron() -> Vec<Point> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut out = Vec::with_capacity(12);
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        out.push([0.0, a, b]);
        out.push([a, b, 0.0]);
        out.push([b, 0.0, a]);
    }
    out.into_iter().map(|v| Point::Embedded(v.iter().map(|&x| c(x, 0.0)).collect())).collect()
}
