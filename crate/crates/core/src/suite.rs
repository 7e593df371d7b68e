//! Verification suites: a JSON config naming a space, a sample, some maps and
//! a list of checks, run into a report with one record per check.
//!
//! ```json
//! {
//!   "name": "disk",
//!   "seed": 0,
//!   "space": {"space": "szego"},
//!   "sample": {"count": 12},
//!   "maps": {"A": {"moebius": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]]}},
//!   "checks": [{"check": "positive-type"}, {"check": "coherence", "map": "A"}]
//! }
//! ```
//!
//! Every check draws its randomness from a seed derived from the suite seed
//! and its position, so a report depends on nothing but the config.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{finite_order_unitary, glauber_point, moebius_pair, random_osc};
use crate::fock::{
    annihilator, coherent_vector, creator, gamma_action_tail_bound, gamma_osc, gauss_hermite_overlap, normal_ordered_monomial,
    overlap_tail_bound, smeared, smeared_adjoint, weyl_check, FockBasis, FockOperator,
};
use crate::io::{MapDoc, SpaceDoc};
use crate::linalg::{c, frobenius, CMatrix, CVector, C64, ONE};
use crate::maps::{check_coherence, check_separable, slenderness_probe, verify_homomorphism, verify_unitary, MapSpec, OrbitSample, SeparableSpec, PARALLEL_EPS};
use crate::oscillator::{HeisenbergElement, OscElement};
use crate::realization::{factor_gram, is_admissible, operator_from_kernel, FunctionOnSample, KernelOnSample, DEFAULT_EPS_RANK};
use crate::space::{check_positive_type, check_projectivity, random, SampleSet, Space};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_VAR: &str = "COHERENT_SEED";

const MOEBIUS_GAMMA: &str = include_str!("../suites/moebius-gamma.json");
const WRONG_ADJOINT: &str = include_str!("../suites/wrong-adjoint.json");
const REGRESSION: &str = include_str!("../suites/regression.json");

/// Names accepted by [`SuiteConfig::builtin`].
pub const BUILTIN_SUITES: [&str; 3] = ["moebius-gamma", "wrong-adjoint", "regression"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
}

/// Per-check tolerance overrides. `all` beats the per-kind entries, which beat
/// the built-in defaults; a `tol` on the check itself beats everything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default)]
    pub all: Option<f64>,
    #[serde(default = "default_eps_rank")]
    pub eps_rank: f64,
    #[serde(flatten)]
    pub by_check: BTreeMap<String, f64>,
}

fn default_eps_rank() -> f64 {
    DEFAULT_EPS_RANK
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { all: None, eps_rank: DEFAULT_EPS_RANK, by_check: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub space: Option<SpaceDoc>,
    #[serde(default)]
    pub sample: Option<SampleSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapDoc>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

/// One configured check. `space` and `count` replace the suite's sample for
/// this check only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub space: Option<SpaceDoc>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(flatten)]
    pub kind: CheckKind,
}

fn one() -> usize {
    1
}
fn c64_half() -> C64 {
    c(0.5, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum CheckKind {
    /// `lambda_min(G) >= -tol lambda_max(G)` over `samples` draws.
    PositiveType {
        #[serde(default = "one")]
        samples: usize,
    },
    Projectivity {
        #[serde(default = "default_trials")]
        trials: usize,
    },
    /// `||operator_from_kernel(G) - 1||_F`.
    ShadowIdentity,
    /// Rejected random functions out of `functions`.
    Admissibility {
        #[serde(default = "default_functions")]
        functions: usize,
    },
    /// `|rank(G) - expected|`.
    GramRank { expected: usize },
    Coherence { map: String },
    Separable { lambda: C64 },
    Homomorphism {
        maps: [String; 2],
        #[serde(default = "default_depth")]
        depth: usize,
    },
    Unitary {
        map: String,
        #[serde(default = "default_depth")]
        depth: usize,
    },
    /// `|rank - rays|`.
    Slenderness,
    /// Functoriality on orbits of elliptic Möbius pairs.
    MoebiusHomomorphism {
        #[serde(default = "one")]
        pairs: usize,
    },
    MoebiusUnitary {
        #[serde(default = "one")]
        pairs: usize,
    },
    /// Finite-order unitary oscillator elements on `Kl[C]`; `rho_shift` spoils
    /// unitarity on purpose.
    OscillatorUnitary {
        #[serde(default = "one")]
        count: usize,
        #[serde(default)]
        rho_shift: f64,
    },
    /// Multiply and adjoint against the block-matrix form.
    OscillatorOracle {
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_max_dim")]
        max_dim: usize,
    },
    OscillatorInverse {
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_max_dim")]
        max_dim: usize,
    },
    Heisenberg {
        #[serde(default = "default_triples")]
        triples: usize,
    },
    /// `[a_j, a_k*] = delta_jk` on every state below the cutoff.
    FockCcr {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "default_big_cutoff")]
        cutoff: usize,
    },
    /// `[p*a, a*q] = p* q` on states of degree `<= degree`, random `p`, `q`.
    FockSmeared {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "default_big_cutoff")]
        cutoff: usize,
        #[serde(default = "default_smeared_degree")]
        degree: usize,
    },
    FockWeyl {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "default_big_cutoff")]
        cutoff: usize,
        #[serde(default = "default_probe")]
        probe_degree: usize,
        #[serde(default = "c64_half")]
        p: C64,
        #[serde(default = "c64_half")]
        q: C64,
    },
    FockOverlap {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "default_cutoff")]
        cutoff: usize,
        #[serde(default = "default_overlap_pairs")]
        pairs: usize,
    },
    FockGamma {
        #[serde(default = "one")]
        dim: usize,
        #[serde(default = "default_cutoff")]
        cutoff: usize,
        #[serde(default = "default_gamma_count")]
        count: usize,
    },
    NormalOrder {
        #[serde(default = "default_cutoff")]
        cutoff: usize,
        #[serde(default = "default_monomial_degree")]
        max_degree: usize,
        #[serde(default = "default_gamma_count")]
        pairs: usize,
    },
    GaussHermite {
        #[serde(default = "default_gamma_count")]
        pairs: usize,
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
}

fn default_trials() -> usize {
    5
}
fn default_functions() -> usize {
    100
}
fn default_depth() -> usize {
    crate::maps::DEFAULT_DEPTH
}
fn default_pairs() -> usize {
    1000
}
fn default_max_dim() -> usize {
    4
}
fn default_triples() -> usize {
    100
}
fn default_big_cutoff() -> usize {
    40
}
fn default_smeared_degree() -> usize {
    20
}
fn default_probe() -> usize {
    10
}
fn default_cutoff() -> usize {
    30
}
fn default_overlap_pairs() -> usize {
    50
}
fn default_gamma_count() -> usize {
    20
}
fn default_monomial_degree() -> usize {
    4
}
fn default_nodes() -> usize {
    64
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::PositiveType { .. } => "positive-type",
            CheckKind::Projectivity { .. } => "projectivity",
            CheckKind::ShadowIdentity => "shadow-identity",
            CheckKind::Admissibility { .. } => "admissibility",
            CheckKind::GramRank { .. } => "gram-rank",
            CheckKind::Coherence { .. } => "coherence",
            CheckKind::Separable { .. } => "separable",
            CheckKind::Homomorphism { .. } => "homomorphism",
            CheckKind::Unitary { .. } => "unitary",
            CheckKind::Slenderness => "slenderness",
            CheckKind::MoebiusHomomorphism { .. } => "moebius-homomorphism",
            CheckKind::MoebiusUnitary { .. } => "moebius-unitary",
            CheckKind::OscillatorUnitary { .. } => "oscillator-unitary",
            CheckKind::OscillatorOracle { .. } => "oscillator-oracle",
            CheckKind::OscillatorInverse { .. } => "oscillator-inverse",
            CheckKind::Heisenberg { .. } => "heisenberg",
            CheckKind::FockCcr { .. } => "fock-ccr",
            CheckKind::FockSmeared { .. } => "fock-smeared",
            CheckKind::FockWeyl { .. } => "fock-weyl",
            CheckKind::FockOverlap { .. } => "fock-overlap",
            CheckKind::FockGamma { .. } => "fock-gamma",
            CheckKind::NormalOrder { .. } => "normal-order",
            CheckKind::GaussHermite { .. } => "gauss-hermite",
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            CheckKind::PositiveType { .. } | CheckKind::Projectivity { .. } | CheckKind::Coherence { .. } | CheckKind::Separable { .. } => 1e-10,
            CheckKind::Admissibility { .. } | CheckKind::GramRank { .. } | CheckKind::Slenderness => 0.0,
            CheckKind::OscillatorOracle { .. } | CheckKind::Heisenberg { .. } => 1e-12,
            CheckKind::OscillatorInverse { .. } | CheckKind::FockOverlap { .. } | CheckKind::FockSmeared { .. } => 1e-10,
            CheckKind::FockCcr { .. } => 1e-13,
            _ => 1e-8,
        }
    }

    fn needs_sample(&self) -> bool {
        matches!(
            self,
            CheckKind::PositiveType { .. }
                | CheckKind::Projectivity { .. }
                | CheckKind::ShadowIdentity
                | CheckKind::Admissibility { .. }
                | CheckKind::GramRank { .. }
                | CheckKind::Coherence { .. }
                | CheckKind::Separable { .. }
                | CheckKind::Homomorphism { .. }
                | CheckKind::Unitary { .. }
                | CheckKind::Slenderness
        )
    }

    fn map_names(&self) -> Vec<&str> {
        match self {
            CheckKind::Coherence { map } | CheckKind::Unitary { map, .. } => vec![map.as_str()],
            CheckKind::Homomorphism { maps, .. } => maps.iter().map(String::as_str).collect(),
            _ => Vec::new(),
        }
    }
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

/// Seed of the check at `index`, a splitmix step away from the suite seed.
pub fn check_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SuiteConfig {
    pub fn empty() -> Self {
        Self {
            name: None,
            seed: 0,
            space: None,
            sample: None,
            maps: BTreeMap::new(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
            checks: Vec::new(),
        }
    }

    /// Parses a config. Syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SuiteConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "moebius-gamma" => MOEBIUS_GAMMA,
            "wrong-adjoint" => WRONG_ADJOINT,
            "regression" => REGRESSION,
            _ => return None,
        };
        Some(Self::from_json(text).expect("bundled suites are valid"))
    }

    /// A config holding the single check `kind`.
    pub fn single(kind: CheckKind) -> Self {
        Self { checks: vec![CheckSpec { name: None, tol: None, space: None, count: None, kind }], ..Self::empty() }
    }

    /// Replaces the seed with the value of `var`, if set.
    pub fn apply_seed_override(&mut self, var: Option<&str>) -> Result<()> {
        if let Some(v) = var {
            self.seed = v.trim().parse().map_err(|_| config_err(SEED_VAR, format!("`{v}` is not an unsigned integer")))?;
        }
        Ok(())
    }

    /// Reads [`SEED_VAR`] from the environment.
    pub fn apply_env(&mut self) -> Result<()> {
        let value = std::env::var(SEED_VAR).ok();
        self.apply_seed_override(value.as_deref())
    }

    /// Checks map references, sample availability and map construction
    /// without running anything.
    pub fn validate(&self) -> Result<()> {
        let suite_space = self.space.as_ref().map(|s| s.space().map_err(|e| prefix("space", e))).transpose()?;
        if let (Some(doc), Some(sample)) = (&self.space, &self.sample) {
            if !doc.points.is_empty() {
                return Err(config_err("sample", "give either explicit points or a random count, not both"));
            }
            if sample.count == 0 {
                return Err(config_err("sample.count", "must be positive"));
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let field = |f: &str| format!("checks[{i}].{f}");
            if let Some(t) = check.tol {
                if !(t >= 0.0) {
                    return Err(config_err(field("tol"), "must be a nonnegative number"));
                }
            }
            let space = match &check.space {
                Some(doc) => Some(doc.space().map_err(|e| prefix(&field("space"), e))?),
                None => suite_space.clone(),
            };
            if check.kind.needs_sample() {
                let space = space.as_ref().ok_or_else(|| config_err(field("space"), format!("`{}` needs a space", check.kind.name())))?;
                let has_points = check.space.as_ref().map_or(false, |d| !d.points.is_empty())
                    || (check.space.is_none() && self.space.as_ref().map_or(false, |d| !d.points.is_empty()));
                if !has_points && check.count.or(self.sample.as_ref().map(|s| s.count)).is_none() {
                    return Err(config_err(field("count"), "no points and no sample count"));
                }
                for name in check.kind.map_names() {
                    let doc = self.maps.get(name).ok_or_else(|| config_err(field("map"), format!("unknown map `{name}`")))?;
                    doc.map(space).map_err(|e| prefix(&format!("maps.{name}"), e))?;
                }
            }
            if let CheckKind::FockWeyl { cutoff, probe_degree, .. } = check.kind {
                if 2 * probe_degree > cutoff {
                    return Err(config_err(field("probe_degree"), format!("twice the probe degree exceeds the cutoff {cutoff}")));
                }
            }
            if let CheckKind::Projectivity { .. } | CheckKind::Separable { .. } = check.kind {
                if space.as_ref().and_then(Space::projective_degree).is_none() {
                    return Err(config_err(field("space"), "needs a projective space"));
                }
            }
        }
        Ok(())
    }

    fn tolerance(&self, check: &CheckSpec) -> f64 {
        check
            .tol
            .or(self.tolerances.all)
            .or_else(|| self.tolerances.by_check.get(check.kind.name()).copied())
            .unwrap_or_else(|| check.kind.default_tolerance())
    }

    fn sample_for(&self, check: &CheckSpec, seed: u64) -> Result<SampleSet> {
        let doc = check.space.as_ref().or(self.space.as_ref()).ok_or_else(|| config_err("space", "missing"))?;
        if !doc.points.is_empty() {
            return doc.sample();
        }
        let count = check.count.or(self.sample.as_ref().map(|s| s.count)).ok_or_else(|| config_err("sample.count", "missing"))?;
        random::sample(&doc.space()?, count, seed)
    }
}

fn prefix(field: &str, e: Error) -> Error {
    match e {
        Error::Config { field: inner, message } => config_err(format!("{field}.{inner}"), message),
        other => config_err(field, other.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub check: String,
    pub passed: bool,
    /// `null` in JSON when the check raised an error.
    #[serde(deserialize_with = "nan_from_null")]
    pub residual: f64,
    pub tolerance: f64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report with every `wall_time` zeroed, identical across runs.
    pub fn canonical(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.wall_time = 0.0;
        }
        r
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// Runs every check, concurrently, and reports them in config order.
///
/// A check that raises an error is recorded as failed with the message; only
/// configuration problems abort the run.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    config.validate()?;
    let records: Vec<CheckRecord> = std::thread::scope(|s| {
        let handles: Vec<_> = config.checks.iter().enumerate().map(|(i, check)| s.spawn(move || run_check(config, i, check))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let passed = records.iter().filter(|r| r.passed).count();
    Ok(Report {
        suite: config.name.clone().unwrap_or_else(|| "suite".into()),
        version: VERSION.into(),
        seed: config.seed,
        summary: Summary { total: records.len(), passed, failed: records.len() - passed },
        checks: records,
    })
}

fn run_check(config: &SuiteConfig, index: usize, check: &CheckSpec) -> CheckRecord {
    let tolerance = config.tolerance(check);
    let seed = check_seed(config.seed, index);
    let start = Instant::now();
    let outcome = evaluate(config, check, seed, tolerance);
    let wall_time = start.elapsed().as_secs_f64();
    let name = check.name.clone().unwrap_or_else(|| check.kind.name().to_string());
    let check_kind = check.kind.name().to_string();
    match outcome {
        Ok((residual, passed)) => CheckRecord { name, check: check_kind, passed, residual, tolerance, wall_time, error: None },
        Err(e) => CheckRecord { name, check: check_kind, passed: false, residual: f64::NAN, tolerance, wall_time, error: Some(e.to_string()) },
    }
}

fn within(residual: f64, tol: f64) -> (f64, bool) {
    (residual, residual <= tol)
}

fn map(config: &SuiteConfig, name: &str, space: &Space) -> Result<MapSpec> {
    config.maps.get(name).ok_or_else(|| config_err("maps", format!("unknown map `{name}`")))?.map(space)
}

fn evaluate(config: &SuiteConfig, check: &CheckSpec, seed: u64, tol: f64) -> Result<(f64, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps_rank = config.tolerances.eps_rank;
    let sample = if check.kind.needs_sample() { Some(config.sample_for(check, seed)?) } else { None };
    let sample = || sample.clone().expect("sample checks carry a sample");
    match &check.kind {
        CheckKind::PositiveType { samples } => {
            let mut worst: f64 = 0.0;
            for k in 0..*samples {
                let s = if k == 0 { sample() } else { config.sample_for(check, check_seed(seed, k))? };
                let r = check_positive_type(&s, tol)?;
                worst = worst.max(-r.min_eigenvalue / r.max_eigenvalue.max(1.0));
            }
            Ok(within(worst, tol))
        }
        CheckKind::Projectivity { trials } => {
            let s = sample();
            Ok(within(check_projectivity(&s.space, &s, *trials, seed)?.max_residual, tol))
        }
        CheckKind::ShadowIdentity => {
            let fact = std::sync::Arc::new(factor_gram(&sample(), eps_rank)?);
            let op = operator_from_kernel(&fact, &KernelOnSample::new(fact.gram.clone()), tol)?;
            let r = fact.rank;
            Ok(within(frobenius(&(op.matrix - CMatrix::identity(r, r))), tol))
        }
        CheckKind::Admissibility { functions } => {
            let fact = factor_gram(&sample(), eps_rank)?;
            let mut rejected = 0usize;
            for _ in 0..*functions {
                let f = FunctionOnSample::new((0..fact.n()).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
                if !is_admissible(&fact, &f, 1e-8)? {
                    rejected += 1;
                }
            }
            Ok(within(rejected as f64, tol))
        }
        CheckKind::GramRank { expected } => {
            let rank = factor_gram(&sample(), eps_rank)?.rank;
            Ok(within(rank.abs_diff(*expected) as f64, tol))
        }
        CheckKind::Coherence { map: name } => {
            let s = sample();
            let r = check_coherence(&s.space, &map(config, name, &s.space)?, &s, tol)?;
            Ok((r.max_residual, r.passed))
        }
        CheckKind::Separable { lambda } => {
            let s = sample();
            let r = check_separable(&s.space, &SeparableSpec::scalar(&s.space, *lambda)?, &s, tol)?;
            Ok((r.max_residual, r.passed))
        }
        CheckKind::Homomorphism { maps: [a, b], depth } => {
            let s = sample();
            let (a, b) = (map(config, a, &s.space)?, map(config, b, &s.space)?);
            let orbit = OrbitSample::with_eps_rank(s, vec![a.clone(), b.clone()], *depth, eps_rank)?;
            let r = verify_homomorphism(&orbit, &a, &b, tol)?;
            Ok((r.max_residual, r.passed))
        }
        CheckKind::Unitary { map: name, depth } => {
            let s = sample();
            let a = map(config, name, &s.space)?;
            let orbit = OrbitSample::with_eps_rank(s, vec![a.clone()], *depth, eps_rank)?;
            let r = verify_unitary(&orbit, &a, tol)?;
            Ok((unitary_residual(&r), r.passed))
        }
        CheckKind::Slenderness => {
            let s = sample();
            let r = slenderness_probe(&s.space, &s, PARALLEL_EPS, eps_rank)?;
            Ok(within(r.rank.abs_diff(r.expected_rank) as f64, tol))
        }
        CheckKind::MoebiusHomomorphism { pairs } => {
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let pair = moebius_pair(&mut rng, false)?;
                worst = worst.max(verify_homomorphism(&pair.orbit, &pair.a, &pair.b, tol)?.max_residual);
            }
            Ok(within(worst, tol))
        }
        CheckKind::MoebiusUnitary { pairs } => {
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let pair = moebius_pair(&mut rng, true)?;
                for m in [&pair.a, &pair.b] {
                    worst = worst.max(unitary_residual(&verify_unitary(&pair.orbit, m, tol)?));
                }
            }
            Ok(within(worst, tol))
        }
        CheckKind::OscillatorUnitary { count, rho_shift } => {
            let mut worst: f64 = 0.0;
            for _ in 0..*count {
                let f = finite_order_unitary(&mut rng)?;
                let mut x = f.element.embed();
                x.rho += rho_shift;
                worst = worst.max(unitary_residual(&verify_unitary(&f.orbit, &MapSpec::oscillator(x), tol)?));
            }
            Ok(within(worst, tol))
        }
        CheckKind::OscillatorOracle { pairs, max_dim } => {
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let d = rng.random_range(1..=*max_dim);
                let (x, y) = (random_osc(&mut rng, d, 2.0, 2.0), random_osc(&mut rng, d, 2.0, 2.0));
                let product = OscElement::from_block_matrix(&(x.as_block_matrix() * y.as_block_matrix()));
                worst = worst.max(x.multiply(&y)?.max_abs_diff(&product));
                let flipped = end_swap(d + 2) * x.as_block_matrix().adjoint() * end_swap(d + 2);
                worst = worst.max(x.adjoint().max_abs_diff(&OscElement::from_block_matrix(&flipped)));
            }
            Ok(within(worst, tol))
        }
        CheckKind::OscillatorInverse { pairs, max_dim } => {
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let d = rng.random_range(1..=*max_dim);
                let x = random_osc(&mut rng, d, 2.0, 2.0);
                let m = x.as_block_matrix();
                let Some(minv) = m.clone().try_inverse() else { continue };
                let scale = minv.iter().map(|v| v.norm()).fold(1.0, f64::max);
                worst = worst.max(x.inverse()?.max_abs_diff(&OscElement::from_block_matrix(&minv)) / scale);
            }
            Ok(within(worst, tol))
        }
        CheckKind::Heisenberg { triples } => {
            let w = |l: f64, q: C64| HeisenbergElement::new(l, CVector::from_vec(vec![q]));
            let ab = w(0.0, ONE).multiply(&w(0.0, c(0.0, 1.0)))?;
            let mut worst = (ab.lambda - 2.0).abs().max((ab.q[0] - c(1.0, 1.0)).norm());
            for _ in 0..*triples {
                let d = rng.random_range(1..=3);
                let mut draw = || HeisenbergElement::new(rng.random_range(-2.0..2.0), random_vec(&mut rng, d));
                let (a, b, cc) = (draw(), draw(), draw());
                let left = a.multiply(&b)?.multiply(&cc)?;
                let right = a.multiply(&b.multiply(&cc)?)?;
                worst = worst.max((left.lambda - right.lambda).abs()).max((&left.q - &right.q).camax());
                let embedded = a.embed().multiply(&b.embed())?;
                worst = worst.max(embedded.max_abs_diff(&a.multiply(&b)?.embed()));
            }
            Ok(within(worst, tol))
        }
        CheckKind::FockCcr { dim, cutoff } => {
            let basis = FockBasis::new(*dim, *cutoff);
            let zero = FockOperator::identity(&basis).scaled(c(0.0, 0.0));
            let mut worst: f64 = 0.0;
            for j in 1..=*dim {
                for k in 1..=*dim {
                    let comm = annihilator(&basis, j)?.commutator(&creator(&basis, k)?);
                    let expected = if j == k { FockOperator::identity(&basis) } else { zero.clone() };
                    worst = worst.max(comm.max_column_diff(&expected, cutoff - 1));
                }
            }
            Ok(within(worst, tol))
        }
        CheckKind::FockSmeared { dim, cutoff, degree } => {
            if degree >= cutoff {
                return Err(Error::Degree { degree: *degree, cutoff: *cutoff });
            }
            let basis = FockBasis::new(*dim, *cutoff);
            let p: Vec<C64> = (0..*dim).map(|_| random::disk(&mut rng, 1.0)).collect();
            let q: Vec<C64> = (0..*dim).map(|_| random::disk(&mut rng, 1.0)).collect();
            let comm = smeared(&basis, &p)?.commutator(&smeared_adjoint(&basis, &q)?);
            let pq = crate::linalg::inner(&p, &q);
            Ok(within(comm.max_column_diff(&FockOperator::identity(&basis).scaled(pq), *degree), tol))
        }
        CheckKind::FockWeyl { dim, cutoff, probe_degree, p, q } => {
            let basis = FockBasis::new(*dim, *cutoff);
            let (p, q) = (vec![*p; *dim], vec![*q; *dim]);
            let r = weyl_check(&basis, &p, &q, *probe_degree)?;
            Ok(within(r.max_difference, tol))
        }
        CheckKind::FockOverlap { dim, cutoff, pairs } => {
            let basis = FockBasis::new(*dim, *cutoff);
            let space = Space::klauder(*dim);
            let (mut worst, mut ok): (f64, bool) = (0.0, true);
            for _ in 0..*pairs {
                let (z, zp) = (glauber_point(&mut rng, *dim, 1.0), glauber_point(&mut rng, *dim, 1.0));
                let truncated = coherent_vector(&basis, &z)?.inner(&coherent_vector(&basis, &zp)?);
                let err = (truncated - space.kernel(&z, &zp)?).norm();
                ok &= err <= tol && err <= overlap_tail_bound(&z, &zp, *cutoff)? + 1e-14;
                worst = worst.max(err);
            }
            Ok((worst, ok))
        }
        CheckKind::FockGamma { dim, cutoff, count } => {
            let basis = FockBasis::new(*dim, *cutoff);
            let (mut worst, mut ok): (f64, bool) = (0.0, true);
            for _ in 0..*count {
                let x = random_osc(&mut rng, *dim, 0.5, 1.0);
                let z = glauber_point(&mut rng, *dim, 0.5);
                let lhs = gamma_osc(&basis, &x)?.apply(&coherent_vector(&basis, &z)?);
                let rhs = coherent_vector(&basis, &x.act(&z)?)?;
                let err = (lhs.coeffs - rhs.coeffs).norm();
                ok &= err <= tol.max(gamma_action_tail_bound(&x, &z, *cutoff)?);
                worst = worst.max(err);
            }
            Ok((worst, ok))
        }
        CheckKind::NormalOrder { cutoff, max_degree, pairs } => {
            let basis = FockBasis::new(1, *cutoff);
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let (z, zp) = (glauber_point(&mut rng, 1, 1.0), glauber_point(&mut rng, 1, 1.0));
                let (u, v) = (coherent_vector(&basis, &z)?, coherent_vector(&basis, &zp)?);
                let (zeta, zetap) = (klauder_zeta(&z), klauder_zeta(&zp));
                for total in 0..=*max_degree as u32 {
                    for beta in 0..=total {
                        let alpha = total - beta;
                        let op = normal_ordered_monomial(&basis, &[beta], &[alpha])?;
                        let expected = zeta.conj().powu(beta) * zetap.powu(alpha) * (zeta.conj() * zetap).exp();
                        worst = worst.max((op.matrix_element(&u, &v) - expected).norm());
                    }
                }
            }
            Ok(within(worst, tol))
        }
        CheckKind::GaussHermite { pairs, nodes } => {
            let space = Space::klauder(1);
            let mut worst: f64 = 0.0;
            for _ in 0..*pairs {
                let (z, zp) = (glauber_point(&mut rng, 1, 1.0), glauber_point(&mut rng, 1, 1.0));
                let k = space.kernel(&z, &zp)?;
                worst = worst.max((gauss_hermite_overlap(&z, &zp, *nodes)? - k).norm() / k.norm().max(1.0));
            }
            Ok(within(worst, tol))
        }
    }
}

fn unitary_residual(r: &crate::maps::UnitaryReport) -> f64 {
    r.kernel_residual.max(r.operator_residual).max(r.adjoint_residual.unwrap_or(0.0))
}

fn random_vec(rng: &mut impl Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| random::disk(rng, 1.5))
}

/// Permutation exchanging the first and last coordinates.
fn end_swap(n: usize) -> CMatrix {
    let mut m = CMatrix::identity(n, n);
    m.swap_rows(0, n - 1);
    m
}

fn klauder_zeta(z: &crate::space::Point) -> C64 {
    match z {
        crate::space::Point::Klauder { zeta, .. } => zeta[0],
        _ => unreachable!("glauber points are Klauder points"),
    }
}
