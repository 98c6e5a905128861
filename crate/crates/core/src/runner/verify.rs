//! Seeded randomized checks of the estimator identities: the two clustering
//! reductions, the LogSumExp shift identity and permutation invariance.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::theorems::{dse_construction, se_construction};
use crate::estimators::{
    deg, dse, lexsim, se, snne_with, sum_eigv, wsnne, wsnne_with, SequenceProbabilities, TAU_GRID,
};
use crate::matrix::SquareMatrix;
use crate::similarity::{ClusterAssignment, SimilarityMatrix};

pub const TOLERANCE: f64 = 1e-10;
const SHIFT_CASES: usize = 100;
const MAX_LISTED_VIOLATIONS: usize = 10;

/// Deliberately wrong estimator variants, used to confirm the suites catch
/// formula errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// SNNE without the j = i term.
    SnneDropSelfPair,
    /// WSNNE with uniform weights in place of the normalized probabilities.
    WsnneUniformWeights,
}

impl std::str::FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snne_drop_self_pair" => Ok(Self::SnneDropSelfPair),
            "wsnne_uniform_weights" => Ok(Self::WsnneUniformWeights),
            other => Err(Error::InvalidInput(format!("unknown fault `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Cases per theorem suite.
    pub cases: usize,
    pub max_n: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            cases: 1000,
            max_n: 50,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub case: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub violation_count: usize,
    /// The first few violations.
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            max_error: 0.0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, case: usize, what: &str, got: Result<f64>, want: f64) {
        let error = match got {
            Ok(v) if v.is_finite() => (v - want).abs(),
            _ => f64::INFINITY,
        };
        if error.is_nan() || error > self.max_error {
            self.max_error = if error.is_nan() { f64::INFINITY } else { error };
        }
        if error.is_nan() || error > TOLERANCE {
            self.violation_count += 1;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(Violation {
                    case,
                    detail: format!("{what}: |error| = {error:e}"),
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub tolerance: f64,
    pub suites: Vec<SuiteReport>,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn failed_suites(&self) -> Vec<&str> {
        self.suites
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.name.as_str())
            .collect()
    }

    /// One line per suite, then the overall verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<24} {:<4} cases={:<5} max_error={:e}\n",
                s.name,
                if s.passed() { "PASS" } else { "FAIL" },
                s.cases,
                s.max_error
            ));
            for v in &s.violations {
                out.push_str(&format!("    case {}: {}\n", v.case, v.detail));
            }
            if s.violation_count > s.violations.len() {
                out.push_str(&format!(
                    "    ... {} more\n",
                    s.violation_count - s.violations.len()
                ));
            }
        }
        out.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

struct Faulty(Option<Fault>);

impl Faulty {
    fn snne(&self, sim: &SimilarityMatrix, tau: f64) -> Result<f64> {
        snne_with(sim, tau, self.0 != Some(Fault::SnneDropSelfPair))
    }

    fn wsnne(
        &self,
        sim: &SimilarityMatrix,
        probs: &SequenceProbabilities,
        tau: f64,
    ) -> Result<f64> {
        if self.0 == Some(Fault::WsnneUniformWeights) {
            wsnne_with(sim, &vec![1.0 / sim.n() as f64; sim.n()], tau)
        } else {
            wsnne(sim, probs, tau)
        }
    }
}

fn random_partition(rng: &mut impl Rng, n: usize) -> ClusterAssignment {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    ClusterAssignment::from_labels(&labels)
}

fn random_probs(rng: &mut impl Rng, n: usize) -> Result<SequenceProbabilities> {
    let lengths: Vec<usize> = (0..n).map(|_| rng.random_range(1..=30)).collect();
    let log_p = lengths
        .iter()
        .map(|&len| (0..len).map(|_| -rng.random_range(0.0..6.0)).sum())
        .collect();
    SequenceProbabilities::new(log_p, &lengths)
}

/// Symmetric, values in [0, 1], unit diagonal.
fn random_affinity(rng: &mut impl Rng, n: usize) -> SquareMatrix {
    let mut m = SquareMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random::<f64>();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn random_scores(rng: &mut impl Rng, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| rng.random_range(-3.0..3.0))
}

fn theorem1_suite(
    rng: &mut impl Rng,
    opts: &VerifyOptions,
    faulty: &Faulty,
) -> Result<SuiteReport> {
    let mut suite = SuiteReport::new("theorem1_snne_dse");
    for case in 0..opts.cases {
        let n = rng.random_range(1..=opts.max_n);
        let tau = TAU_GRID[case % TAU_GRID.len()];
        let clusters = random_partition(rng, n);
        let got = faulty.snne(&dse_construction(&clusters, tau)?, tau);
        suite.check(case, &format!("n={n} tau={tau}"), got, dse(&clusters)?);
        suite.cases += 1;
    }
    Ok(suite)
}

fn theorem2_suite(
    rng: &mut impl Rng,
    opts: &VerifyOptions,
    faulty: &Faulty,
) -> Result<SuiteReport> {
    let mut suite = SuiteReport::new("theorem2_wsnne_se");
    for case in 0..opts.cases {
        let n = rng.random_range(1..=opts.max_n);
        let tau = TAU_GRID[case % TAU_GRID.len()];
        let clusters = random_partition(rng, n);
        let probs = random_probs(rng, n)?;
        let sim = se_construction(&clusters, &probs, tau)?;
        let got = faulty.wsnne(&sim, &probs, tau);
        suite.check(
            case,
            &format!("n={n} tau={tau}"),
            got,
            se(&clusters, &probs)?,
        );
        suite.cases += 1;
    }
    Ok(suite)
}

/// SNNE(f + c) = SNNE(f) − c/τ and likewise for WSNNE.
fn shift_suite(rng: &mut impl Rng, opts: &VerifyOptions, faulty: &Faulty) -> Result<SuiteReport> {
    let mut suite = SuiteReport::new("logsumexp_shift");
    for case in 0..SHIFT_CASES {
        let n = rng.random_range(1..=opts.max_n);
        let tau = TAU_GRID[case % TAU_GRID.len()];
        let c = rng.random_range(-50.0..50.0);
        let sim = SimilarityMatrix::custom(random_scores(rng, n))?;
        let shifted = sim.shifted(c);
        let probs = random_probs(rng, n)?;
        let base = faulty.snne(&sim, tau)?;
        suite.check(case, "snne", faulty.snne(&shifted, tau), base - c / tau);
        let base = faulty.wsnne(&sim, &probs, tau)?;
        suite.check(
            case,
            "wsnne",
            faulty.wsnne(&shifted, &probs, tau),
            base - c / tau,
        );
        suite.cases += 1;
    }
    Ok(suite)
}

/// Relabeling the answers leaves every set-level estimator unchanged.
fn permutation_suite(
    rng: &mut impl Rng,
    opts: &VerifyOptions,
    faulty: &Faulty,
) -> Result<SuiteReport> {
    let mut suite = SuiteReport::new("permutation_invariance");
    let cases = (opts.cases / 10).max(1);
    for case in 0..cases {
        let n = rng.random_range(2..=opts.max_n.max(2));
        let tau = TAU_GRID[case % TAU_GRID.len()];
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);

        let directed = SimilarityMatrix::custom(random_scores(rng, n))?;
        let affinity = SimilarityMatrix::custom(random_affinity(rng, n))?;
        let probs = random_probs(rng, n)?;
        let clusters = random_partition(rng, n);
        let (d2, a2, p2, c2) = (
            directed.permuted(&perm),
            affinity.permuted(&perm),
            probs.permuted(&perm),
            clusters.permuted(&perm),
        );

        suite.check(
            case,
            "snne",
            faulty.snne(&d2, tau),
            faulty.snne(&directed, tau)?,
        );
        suite.check(
            case,
            "wsnne",
            faulty.wsnne(&d2, &p2, tau),
            faulty.wsnne(&directed, &probs, tau)?,
        );
        suite.check(case, "se", se(&c2, &p2), se(&clusters, &probs)?);
        suite.check(case, "dse", dse(&c2), dse(&clusters)?);
        suite.check(case, "lexsim", lexsim(&a2), lexsim(&affinity)?);
        suite.check(case, "deg", Ok(deg(&a2)), deg(&affinity));
        suite.check(case, "sumeigv", Ok(sum_eigv(&a2)), sum_eigv(&affinity));
        suite.cases += 1;
    }
    Ok(suite)
}

/// Runs every suite from one seeded generator. Identical options give an
/// identical report apart from the elapsed time.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.cases == 0 || opts.max_n == 0 {
        return Err(Error::InvalidInput(
            "verify needs cases > 0 and max_n > 0".into(),
        ));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let faulty = Faulty(opts.fault);
    let suites = vec![
        theorem1_suite(&mut rng, opts, &faulty)?,
        theorem2_suite(&mut rng, opts, &faulty)?,
        shift_suite(&mut rng, opts, &faulty)?,
        permutation_suite(&mut rng, opts, &faulty)?,
    ];
    Ok(VerifyReport {
        seed: opts.seed,
        tolerance: TOLERANCE,
        suites,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}
