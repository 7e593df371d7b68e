//! Coherent maps, their quantization on orbit-closed samples, multipliers,
//! separable maps and normal kernels.
//!
//! A map `A: Z -> Z` is coherent with adjoint `A*` when
//! `K(z, A z') = K(A* z, z')`. On a finite sample the quantization `Gamma(A)`
//! is the operator on the sampled span with `Gamma(A)|z> = |A z>`; it exists
//! only when every image state lies in that span, which is checked rather
//! than assumed.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, pseudo_inverse, CMatrix, C64, ONE};
use crate::oscillator::OscElement;
use crate::realization::{factor_gram, operator_from_kernel, GramFactorization, KernelOnSample, OperatorOnSpan, DEFAULT_EPS_RANK};
use crate::space::{Point, SampleSet, Space};

pub type PointFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&Point) -> Result<C64> + Send + Sync>;

/// Normalized Cauchy-Schwarz defect below which two states count as parallel.
pub const PARALLEL_EPS: f64 = 1e-10;

/// A map with optional adjoint and inverse.
#[derive(Clone)]
pub struct MapSpec {
    pub label: String,
    forward: PointFn,
    adjoint: Option<PointFn>,
    inverse: Option<PointFn>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec")
            .field("label", &self.label)
            .field("adjoint", &self.adjoint.is_some())
            .field("inverse", &self.inverse.is_some())
            .finish()
    }
}

impl MapSpec {
    pub fn new(label: impl Into<String>, forward: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), forward: Arc::new(forward), adjoint: None, inverse: None }
    }

    pub fn with_adjoint(mut self, adjoint: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        self.adjoint = Some(Arc::new(adjoint));
        self
    }

    pub fn with_inverse(mut self, inverse: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn identity() -> Self {
        Self::new("id", |z| Ok(z.clone())).with_adjoint(|z| Ok(z.clone())).with_inverse(|z| Ok(z.clone()))
    }

    pub fn has_adjoint(&self) -> bool {
        self.adjoint.is_some()
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn apply(&self, z: &Point) -> Result<Point> {
        (self.forward)(z)
    }

    pub fn apply_adjoint(&self, z: &Point) -> Result<Point> {
        match &self.adjoint {
            Some(f) => f(z),
            None => Err(Error::MissingAdjoint(self.label.clone())),
        }
    }

    pub fn apply_inverse(&self, z: &Point) -> Result<Point> {
        match &self.inverse {
            Some(f) => f(z),
            None => Err(Error::MissingInverse(self.label.clone())),
        }
    }

    /// The map `A*`, whose adjoint is `A`.
    pub fn adjoint_map(&self) -> Result<MapSpec> {
        let adjoint = self.adjoint.clone().ok_or_else(|| Error::MissingAdjoint(self.label.clone()))?;
        Ok(MapSpec { label: format!("{}*", self.label), forward: adjoint, adjoint: Some(self.forward.clone()), inverse: None })
    }

    /// The map `A^{-1}`; its adjoint is left unset.
    pub fn inverse_map(&self) -> Result<MapSpec> {
        let inverse = self.inverse.clone().ok_or_else(|| Error::MissingInverse(self.label.clone()))?;
        Ok(MapSpec { label: format!("{}^-1", self.label), forward: inverse, adjoint: None, inverse: Some(self.forward.clone()) })
    }

    /// Linear Möbius map `z -> A z`, validated against
    /// `alpha > 0, |beta| <= alpha, gamma <= alpha - 2|beta|`.
    ///
    /// The adjoint is `A^sigma = [[conj A11, -conj A21], [-conj A12, conj A22]]`,
    /// not the matrix adjoint.
    pub fn moebius(a: [[C64; 2]; 2]) -> Result<MapSpec> {
        validate_moebius(&a)?;
        let sigma = moebius_sigma(&a);
        let mut spec = MapSpec::new(format!("moebius{a:?}"), move |z| moebius_apply(&a, z)).with_adjoint(move |z| moebius_apply(&sigma, z));
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.norm() > 1e-12 * (a[0][0].norm() + a[1][1].norm() + a[0][1].norm() + a[1][0].norm()) {
            let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
            spec = spec.with_inverse(move |z| moebius_apply(&inv, z));
        }
        Ok(spec)
    }

    /// Möbius map paired with the plain conjugate transpose as its claimed adjoint.
    pub fn moebius_with_matrix_adjoint(a: [[C64; 2]; 2]) -> Result<MapSpec> {
        validate_moebius(&a)?;
        let adj = [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]];
        Ok(MapSpec::new(format!("moebius{a:?}"), move |z| moebius_apply(&a, z)).with_adjoint(move |z| moebius_apply(&adj, z)))
    }

    /// Oscillator element acting on Klauder points, adjoint `x*`.
    pub fn oscillator(x: OscElement) -> MapSpec {
        let adj = x.adjoint();
        let label = format!("osc[{}, {:?}, {:?}, {:?}]", x.rho, x.p.as_slice(), x.q.as_slice(), x.a.as_slice());
        let mut spec = match x.inverse() {
            Ok(inv) => MapSpec::new(label, {
                let x = x.clone();
                move |z| x.act(z)
            })
            .with_inverse(move |z| inv.act(z)),
            Err(_) => MapSpec::new(label, {
                let x = x.clone();
                move |z| x.act(z)
            }),
        };
        spec.adjoint = Some(Arc::new(move |z| adj.act(z)));
        spec
    }

    /// Scalar multiplication `z -> lambda z` on a projective space, with
    /// adjoint `conj(lambda)` and inverse `1/lambda`.
    pub fn scalar(space: &Space, lambda: C64) -> Result<MapSpec> {
        if !space.has_scalar_multiplication() {
            return Err(Error::NotProjective(space.kind().name()));
        }
        if lambda == C64::new(0.0, 0.0) {
            return Err(Error::InvalidMap("scalar multiplication by 0".into()));
        }
        let (s1, s2, s3) = (space.clone(), space.clone(), space.clone());
        Ok(MapSpec::new(format!("scale({lambda})"), move |z| s1.scale(lambda, z))
            .with_adjoint(move |z| s2.scale(lambda.conj(), z))
            .with_inverse(move |z| s3.scale(lambda.inv(), z)))
    }

    /// Lift `[alpha, A](lambda, z) = (alpha lambda, A z)` to a projective
    /// extension, with adjoint `[conj alpha, A*]`.
    pub fn projective_lift(alpha: C64, map: &MapSpec) -> MapSpec {
        let fwd = map.forward.clone();
        let mut spec = MapSpec::new(format!("[{alpha}, {}]", map.label), move |z| lift_apply(alpha, &fwd, z));
        if let Some(adj) = map.adjoint.clone() {
            spec.adjoint = Some(Arc::new(move |z| lift_apply(alpha.conj(), &adj, z)));
        }
        if let Some(inv) = map.inverse.clone() {
            if alpha != C64::new(0.0, 0.0) {
                spec.inverse = Some(Arc::new(move |z| lift_apply(alpha.inv(), &inv, z)));
            }
        }
        spec
    }

    /// `A_S(lambda, z) = (lambda, S z)` on a projective extension of degree
    /// `+-1`, whose adjoint is the separable lift `B_S`.
    pub fn separable_lift_a(sep: &SeparableSpec, degree: i32) -> Result<MapSpec> {
        let b = Self::separable_lift_b(sep, degree)?;
        let alpha = sep.alpha.clone();
        let mut spec = MapSpec::new(format!("A_{}", sep.label), move |z| lift_apply(ONE, &alpha, z));
        spec.adjoint = Some(b.forward);
        Ok(spec)
    }

    /// `B_S(lambda, z) = (mu lambda, z)` with `mu^e = conj(chi(S))`, adjoint `A_S`.
    pub fn separable_lift_b(sep: &SeparableSpec, degree: i32) -> Result<MapSpec> {
        let mu = match degree {
            1 => sep.chi.conj(),
            -1 => sep.chi.conj().inv(),
            _ => return Err(Error::Config { field: "degree".into(), message: format!("separable lifts need degree +-1, got {degree}") }),
        };
        let alpha = sep.alpha.clone();
        let id: PointFn = Arc::new(|z: &Point| Ok(z.clone()));
        let mut spec = MapSpec::new(format!("B_{}", sep.label), move |z| lift_apply(mu, &id, z));
        spec.adjoint = Some(Arc::new(move |z| lift_apply(ONE, &alpha, z)));
        Ok(spec)
    }
}

fn lift_apply(alpha: C64, f: &PointFn, z: &Point) -> Result<Point> {
    match z {
        Point::Projective { lambda, base } => Ok(Point::projective(alpha * lambda, f(base)?)),
        other => Err(Error::Domain { space: "projective", detail: format!("expected a projective point, got {other:?}") }),
    }
}

/// The quantities `alpha, beta, gamma` of a 2x2 matrix acting on Möbius space.
pub fn moebius_invariants(a: &[[C64; 2]; 2]) -> (f64, C64, f64) {
    let alpha = a[0][0].norm_sqr() - a[1][0].norm_sqr();
    let beta = a[0][0].conj() * a[0][1] - a[1][0].conj() * a[1][1];
    let gamma = a[1][1].norm_sqr() - a[0][1].norm_sqr();
    (alpha, beta, gamma)
}

fn validate_moebius(a: &[[C64; 2]; 2]) -> Result<()> {
    if a.iter().flatten().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::InvalidMap("non-finite entry".into()));
    }
    let (alpha, beta, gamma) = moebius_invariants(a);
    let slack = 1e-12 * alpha.abs().max(1.0);
    if alpha <= 0.0 {
        return Err(Error::InvalidMap(format!("alpha = {alpha} is not positive")));
    }
    if beta.norm() > alpha + slack {
        return Err(Error::InvalidMap(format!("|beta| = {} exceeds alpha = {alpha}", beta.norm())));
    }
    if gamma > alpha - 2.0 * beta.norm() + slack {
        return Err(Error::InvalidMap(format!("gamma = {gamma} exceeds alpha - 2|beta| = {}", alpha - 2.0 * beta.norm())));
    }
    Ok(())
}

fn moebius_sigma(a: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[a[0][0].conj(), -a[1][0].conj()], [-a[0][1].conj(), a[1][1].conj()]]
}

fn moebius_apply(a: &[[C64; 2]; 2], z: &Point) -> Result<Point> {
    match z {
        Point::Moebius(z1, z2) => Ok(Point::Moebius(a[0][0] * z1 + a[0][1] * z2, a[1][0] * z1 + a[1][1] * z2)),
        other => Err(Error::Domain { space: "moebius", detail: format!("expected a Möbius point, got {other:?}") }),
    }
}

/// `A o B`, with adjoint `B* o A*` and inverse `B^-1 o A^-1` when available.
pub fn compose(a: &MapSpec, b: &MapSpec) -> MapSpec {
    let (fa, fb) = (a.forward.clone(), b.forward.clone());
    let mut spec = MapSpec::new(format!("({} . {})", a.label, b.label), move |z| fa(&fb(z)?));
    if let (Some(aa), Some(ba)) = (a.adjoint.clone(), b.adjoint.clone()) {
        spec.adjoint = Some(Arc::new(move |z| ba(&aa(z)?)));
    }
    if let (Some(ai), Some(bi)) = (a.inverse.clone(), b.inverse.clone()) {
        spec.inverse = Some(Arc::new(move |z| bi(&ai(z)?)));
    }
    spec
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_diff(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Outcome of a residual-based check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(max_residual: f64, tolerance: f64) -> Self {
        Self { max_residual, tolerance, passed: max_residual <= tolerance }
    }
}

/// Max relative residual of `K(z, A z') = K(A* z, z')` over sample pairs.
pub fn check_coherence(space: &Space, map: &MapSpec, sample: &SampleSet, tol: f64) -> Result<CheckReport> {
    if !map.has_adjoint() {
        return Err(Error::MissingAdjoint(map.label.clone()));
    }
    let images: Vec<Point> = sample.points.iter().map(|z| map.apply(z)).collect::<Result<_>>()?;
    let adjoints: Vec<Point> = sample.points.iter().map(|z| map.apply_adjoint(z)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (z, az) in sample.points.iter().zip(&adjoints) {
        for (zp, azp) in sample.points.iter().zip(&images) {
            worst = worst.max(relative_diff(space.kernel(z, azp)?, space.kernel(az, zp)?));
        }
    }
    Ok(CheckReport::new(worst, tol))
}

/// Normalized Cauchy-Schwarz defect `1 - |K(z,z')|^2 / (K(z,z) K(z',z'))`.
pub fn parallel_defect(space: &Space, z: &Point, zp: &Point) -> Result<f64> {
    let k = space.kernel(z, zp)?;
    let n = space.kernel(z, z)?.re * space.kernel(zp, zp)?.re;
    Ok((1.0 - k.norm_sqr() / n).abs())
}

fn parallel_pairs_of(space: &Space, points: &[Point], eps: f64) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            if parallel_defect(space, &points[j], &points[k])? <= eps {
                pairs.push((j, k));
            }
        }
    }
    Ok(pairs)
}

/// Number of classes of mutually parallel points.
fn ray_classes(n: usize, pairs: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Base points plus their images under words of length `<= depth` in the
/// maps, one representative per ray.
#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub base: SampleSet,
    pub maps: Vec<MapSpec>,
    pub depth: usize,
    pub closed_points: SampleSet,
    factorization: Arc<GramFactorization>,
}

/// Default word length for orbit construction.
pub const DEFAULT_DEPTH: usize = 2;

impl OrbitSample {
    pub fn new(base: SampleSet, maps: Vec<MapSpec>, depth: usize) -> Result<Self> {
        Self::with_eps_rank(base, maps, depth, DEFAULT_EPS_RANK)
    }

    pub fn with_eps_rank(base: SampleSet, maps: Vec<MapSpec>, depth: usize, eps_rank: f64) -> Result<Self> {
        let space = &base.space;
        let mut points = base.points.clone();
        let mut frontier = base.points.clone();
        for _ in 0..depth {
            let mut next = Vec::new();
            for z in &frontier {
                for map in &maps {
                    let image = map.apply(z)?;
                    space.check_point(&image)?;
                    let mut known = false;
                    for p in &points {
                        if p.key() == image.key() || parallel_defect(space, p, &image)? <= PARALLEL_EPS {
                            known = true;
                            break;
                        }
                    }
                    if !known {
                        points.push(image.clone());
                        next.push(image);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let closed_points = SampleSet::new(space.clone(), points)?;
        let factorization = Arc::new(factor_gram(&closed_points, eps_rank)?);
        Ok(Self { base, maps, depth, closed_points, factorization })
    }

    /// Wraps a sample without adding images.
    pub fn from_sample(sample: SampleSet) -> Result<Self> {
        Self::new(sample, Vec::new(), 0)
    }

    pub fn factorization(&self) -> &Arc<GramFactorization> {
        &self.factorization
    }

    pub fn space(&self) -> &Space {
        &self.closed_points.space
    }

    pub fn points(&self) -> &[Point] {
        &self.closed_points.points
    }

    pub fn len(&self) -> usize {
        self.closed_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed_points.is_empty()
    }
}

/// `X(z_j, z_k) = f(z_j, z_k)` on the points of a sample.
pub fn kernel_on_sample(points: &[Point], f: impl Fn(&Point, &Point) -> Result<C64>) -> Result<KernelOnSample> {
    let n = points.len();
    let mut values = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            values[(j, k)] = f(&points[j], &points[k])?;
        }
    }
    Ok(KernelOnSample::new(values))
}

/// Operator with `M |z_k> = m(z_k) |A z_k>` for every sample point whose
/// image state lies in the span of the sample.
///
/// Images of base points must lie in the span; other points whose images
/// leave it are skipped, and `M` is then the least-squares solution of minimal
/// norm. The shadow identity is certified on the columns used.
fn quantize_weighted(orbit: &OrbitSample, map: &MapSpec, weight: &dyn Fn(&Point) -> Result<C64>, tol: f64) -> Result<(OperatorOnSpan, bool)> {
    let fact = orbit.factorization();
    let space = orbit.space();
    let points = orbit.points();
    let pinv_adj = fact.factor_pinv().adjoint();
    let n = points.len();
    let mut x = CMatrix::zeros(n, n);
    let mut used = Vec::with_capacity(n);
    for (k, z) in points.iter().enumerate() {
        let image = map.apply(z)?;
        space.check_point(&image)?;
        let mut column = CMatrix::zeros(n, 1);
        for j in 0..n {
            column[(j, 0)] = space.kernel(&points[j], &image)?;
        }
        // the image state is in the span iff its projection keeps the full norm
        let captured: f64 = (&pinv_adj * &column).iter().map(|v| v.norm_sqr()).sum();
        let norm = space.kernel(&image, &image)?.re;
        if (norm - captured).abs() > tol * norm {
            if k < orbit.base.len() {
                return Err(Error::OrbitNotClosed { map: map.label.clone(), index: k });
            }
            continue;
        }
        let w = weight(z)?;
        x.set_column(k, &(column.column(0) * w));
        used.push(k);
    }
    if used.len() == n {
        return Ok((operator_from_kernel(fact, &KernelOnSample::new(x), tol)?, true));
    }
    let r_used = CMatrix::from_fn(fact.rank, used.len(), |i, j| fact.factor[(i, used[j])]);
    let x_used = CMatrix::from_fn(n, used.len(), |i, j| x[(i, used[j])]);
    // M R_D = (R^+)* X_D in the least-squares sense
    let m = &pinv_adj * &x_used * pseudo_inverse(&r_used, fact.eps_rank.sqrt());
    let threshold = tol * (1.0 + frobenius(&x_used));
    let residual = frobenius(&(fact.factor.adjoint() * &m * &r_used - &x_used));
    if residual > threshold {
        return Err(Error::NotShadow { residual, threshold });
    }
    Ok((OperatorOnSpan::new(fact.clone(), m)?, false))
}

/// `Gamma(A)` on the span of an orbit-closed sample.
pub fn quantize(orbit: &OrbitSample, map: &MapSpec, tol: f64) -> Result<OperatorOnSpan> {
    Ok(quantize_weighted(orbit, map, &|_| Ok(ONE), tol)?.0)
}

/// Coherent vectors of the base points, as columns.
fn base_columns(orbit: &OrbitSample) -> CMatrix {
    orbit.factorization().factor.columns(0, orbit.base.len()).into_owned()
}

/// Relative distance `||Gamma(AB) - Gamma(A) Gamma(B)||_F / (1 + ||Gamma(A) Gamma(B)||_F)`.
///
/// When some image leaves the span the operators are compared on the base
/// states only, where a sample of depth 2 makes both sides exact.
pub fn verify_homomorphism(orbit: &OrbitSample, a: &MapSpec, b: &MapSpec, tol: f64) -> Result<CheckReport> {
    let one = |_: &Point| Ok(ONE);
    let (ga, ta) = quantize_weighted(orbit, a, &one, tol)?;
    let (gb, tb) = quantize_weighted(orbit, b, &one, tol)?;
    let (gab, tab) = quantize_weighted(orbit, &compose(a, b), &one, tol)?;
    let prod = ga.compose(&gb)?;
    if ta && tb && tab {
        return Ok(CheckReport::new(gab.distance(&prod)?, tol));
    }
    let rb = base_columns(orbit);
    let lhs = &gab.matrix * &rb;
    let rhs = &prod.matrix * &rb;
    Ok(CheckReport::new(frobenius(&(&lhs - &rhs)) / (1.0 + frobenius(&rhs)), tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryReport {
    /// Max relative residual of `K(A z, A z') = K(z, z')`.
    pub kernel_residual: f64,
    /// `||Gamma(A)* Gamma(A) - 1||_F` on the span.
    pub operator_residual: f64,
    /// `||Gamma(A)* - Gamma(A*)||_F / (1 + ||Gamma(A*)||_F)`, when the adjoint is known.
    pub adjoint_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_unitary(orbit: &OrbitSample, map: &MapSpec, tol: f64) -> Result<UnitaryReport> {
    let space = orbit.space();
    let points = orbit.points();
    let images: Vec<Point> = points.iter().map(|z| map.apply(z)).collect::<Result<_>>()?;
    let mut kernel_residual: f64 = 0.0;
    for j in 0..points.len() {
        for k in 0..points.len() {
            kernel_residual = kernel_residual.max(relative_diff(space.kernel(&images[j], &images[k])?, space.kernel(&points[j], &points[k])?));
        }
    }
    let (g, total) = quantize_weighted(orbit, map, &|_| Ok(ONE), tol)?;
    let operator_residual = if total {
        let r = g.matrix.nrows();
        frobenius(&(g.matrix.adjoint() * &g.matrix - CMatrix::identity(r, r)))
    } else {
        // only the base states are known to map correctly
        let rb = base_columns(orbit);
        let gb = rb.adjoint() * &rb;
        let img = &g.matrix * &rb;
        frobenius(&(img.adjoint() * img - &gb)) / (1.0 + frobenius(&gb))
    };
    let adjoint_residual = match map.adjoint_map() {
        Ok(adj) if total => {
            let (ga, total_adj) = quantize_weighted(orbit, &adj, &|_| Ok(ONE), tol)?;
            if total_adj {
                Some(g.adjoint().distance(&ga)?)
            } else {
                None
            }
        }
        _ => None,
    };
    let passed = kernel_residual <= tol && operator_residual <= tol && adjoint_residual.is_none_or(|r| r <= tol);
    Ok(UnitaryReport { kernel_residual, operator_residual, adjoint_residual, tolerance: tol, passed })
}

/// A function `m` paired with a map `A`, candidate for `Gamma_m(A)|z> = m(z)|A z>`.
#[derive(Clone)]
pub struct MultiplierSpec {
    pub m: ScalarFn,
    pub map: MapSpec,
}

impl MultiplierSpec {
    pub fn new(m: impl Fn(&Point) -> Result<C64> + Send + Sync + 'static, map: MapSpec) -> Self {
        Self { m: Arc::new(m), map }
    }

    pub fn constant(c: C64, map: MapSpec) -> Self {
        Self::new(move |_| Ok(c), map)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierReport {
    pub parallel_pairs: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// For every parallel pair `|z'> = lambda |z>` in the sample, checks
/// `m(z') K(w, A z') = lambda m(z) K(w, A z)` for all sampled `w`.
pub fn check_multiplier(space: &Space, mult: &MultiplierSpec, sample: &SampleSet, tol: f64) -> Result<MultiplierReport> {
    let points = &sample.points;
    let pairs = parallel_pairs_of(space, points, PARALLEL_EPS)?;
    let mut worst: f64 = 0.0;
    for &(j, k) in &pairs {
        let (z, zp) = (&points[j], &points[k]);
        let lambda = space.kernel(z, zp)? / space.kernel(z, z)?;
        let (az, azp) = (mult.map.apply(z)?, mult.map.apply(zp)?);
        let (mz, mzp) = ((mult.m)(z)?, (mult.m)(zp)?);
        for w in points {
            worst = worst.max(relative_diff(mzp * space.kernel(w, &azp)?, lambda * mz * space.kernel(w, &az)?));
        }
    }
    Ok(MultiplierReport { parallel_pairs: pairs.len(), max_residual: worst, tolerance: tol, passed: worst <= tol })
}

/// A map `alpha` with claimed separation constant `chi`:
/// `K(z, alpha z') = chi K(z, z')`.
#[derive(Clone)]
pub struct SeparableSpec {
    pub label: String,
    pub alpha: PointFn,
    pub chi: C64,
}

impl SeparableSpec {
    pub fn new(label: impl Into<String>, alpha: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static, chi: C64) -> Self {
        Self { label: label.into(), alpha: Arc::new(alpha), chi }
    }

    pub fn identity() -> Self {
        Self::new("id", |z| Ok(z.clone()), ONE)
    }

    /// Scalar multiplication by `lambda`, with `chi = lambda^e`.
    pub fn scalar(space: &Space, lambda: C64) -> Result<Self> {
        let e = space.projective_degree().ok_or(Error::NotProjective(space.kind().name()))?;
        let s = space.clone();
        Ok(Self::new(format!("scale({lambda})"), move |z| s.scale(lambda, z), lambda.powi(e)))
    }
}

pub fn check_separable(space: &Space, sep: &SeparableSpec, sample: &SampleSet, tol: f64) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    for zp in &sample.points {
        let azp = (sep.alpha)(zp)?;
        for z in &sample.points {
            worst = worst.max(relative_diff(space.kernel(z, &azp)?, sep.chi * space.kernel(z, zp)?));
        }
    }
    Ok(CheckReport::new(worst, tol))
}

/// `Gamma_m(A)` with `Gamma_m(A)|z> = m(z)|A z>`.
///
/// Fails with `IllConditioned` when the Gram rank falls below the number of
/// parallel classes in the sample.
pub fn quantize_with_multiplier(orbit: &OrbitSample, mult: &MultiplierSpec, tol: f64) -> Result<OperatorOnSpan> {
    let points = orbit.points();
    let pairs = parallel_pairs_of(orbit.space(), points, PARALLEL_EPS)?;
    let classes = ray_classes(points.len(), &pairs);
    let rank = orbit.factorization().rank;
    if rank < classes {
        return Err(Error::IllConditioned { rank, n: points.len(), parallel: pairs.len() });
    }
    let m = mult.m.clone();
    Ok(quantize_weighted(orbit, &mult.map, &move |z| m(z), tol)?.0)
}

/// `a(m)` with `a(m)|z> = m(z)|z>`.
pub fn diag_operator(orbit: &OrbitSample, m: impl Fn(&Point) -> Result<C64> + Send + Sync + 'static, tol: f64) -> Result<OperatorOnSpan> {
    quantize_with_multiplier(orbit, &MultiplierSpec::new(m, MapSpec::identity()), tol)
}

/// `a*(m) = a(conj m)*`.
pub fn diag_operator_star(orbit: &OrbitSample, m: impl Fn(&Point) -> Result<C64> + Send + Sync + 'static, tol: f64) -> Result<OperatorOnSpan> {
    Ok(diag_operator(orbit, move |z| Ok(m(z)?.conj()), tol)?.adjoint())
}

/// `N(X)` with `<z|N(X)|z'> = X(z, z') K(z, z')`.
///
/// Homogeneity is checked on the sample: parallel points must carry equal
/// rows and columns of `X`.
pub fn normal_kernel_operator(orbit: &OrbitSample, x: &KernelOnSample, tol: f64) -> Result<OperatorOnSpan> {
    let fact = orbit.factorization();
    let n = fact.n();
    if x.values.nrows() != n || x.values.ncols() != n {
        return Err(Error::Dimension { expected: n, found: x.values.nrows() });
    }
    let threshold = tol * (1.0 + frobenius(&x.values));
    for (j, k) in parallel_pairs_of(orbit.space(), orbit.points(), PARALLEL_EPS)? {
        let rows = (x.values.row(j) - x.values.row(k)).norm();
        let cols = (x.values.column(j) - x.values.column(k)).norm();
        let residual = rows.max(cols);
        if residual > threshold {
            return Err(Error::NotShadow { residual, threshold });
        }
    }
    operator_from_kernel(fact, &KernelOnSample::new(x.values.component_mul(&fact.gram)), tol)
}

/// Recovers `X = shadow / K` entrywise; needs a kernel that vanishes nowhere on the sample.
pub fn normal_symbol(op: &OperatorOnSpan) -> Result<KernelOnSample> {
    let g = &op.factorization.gram;
    if g.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Singularity);
    }
    let r = &op.factorization.factor;
    let shadow = r.adjoint() * &op.matrix * r;
    Ok(KernelOnSample::new(shadow.component_div(g)))
}

/// `||N(AX) - Gamma(A) N(X) Gamma(A^-1)||_F / (1 + ||N(AX)||_F)` with
/// `AX(z, z') = X(A* z, A^-1 z')`.
pub fn conjugate_normal_kernel(
    orbit: &OrbitSample,
    map: &MapSpec,
    x: &(dyn Fn(&Point, &Point) -> Result<C64> + Sync),
    tol: f64,
) -> Result<CheckReport> {
    let points = orbit.points();
    let nx = normal_kernel_operator(orbit, &kernel_on_sample(points, x)?, tol)?;
    let ax = kernel_on_sample(points, |z, zp| x(&map.apply_adjoint(z)?, &map.apply_inverse(zp)?))?;
    let nax = normal_kernel_operator(orbit, &ax, tol)?;
    let ga = quantize(orbit, map, tol)?;
    let ginv = quantize(orbit, &map.inverse_map()?, tol)?;
    let rhs = ga.compose(&nx)?.compose(&ginv)?;
    Ok(CheckReport::new(rhs.distance(&nax)?, tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlendernessReport {
    pub rank: usize,
    pub n: usize,
    pub parallel_pairs: usize,
    /// Number of rays, the rank a slender space must attain.
    pub expected_rank: usize,
    pub passed: bool,
}

/// Detects parallel pairs by the Cauchy-Schwarz defect and compares the Gram
/// rank at `eps_rank` with the number of rays.
pub fn slenderness_probe(space: &Space, sample: &SampleSet, eps: f64, eps_rank: f64) -> Result<SlendernessReport> {
    let pairs = parallel_pairs_of(space, &sample.points, eps)?;
    let n = sample.len();
    let expected_rank = ray_classes(n, &pairs);
    let rank = factor_gram(sample, eps_rank)?.rank;
    Ok(SlendernessReport { rank, n, parallel_pairs: pairs.len(), expected_rank, passed: rank == expected_rank })
}
