//! Tolerances, guardrails and heuristic budgets.
//!
//! Every heuristic path draws its randomness from [`Config::rng`], so a fixed
//! `seed` reproduces every number the library emits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default seed for every multistart search.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// A facet contains `x` iff `|f(x) - 1| <= FACE_TOL` on floating paths.
pub const FACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Tolerance for exact-path float comparisons.
    pub exact_tol: f64,
    /// Tolerance for optimization paths.
    pub opt_tol: f64,
    /// Tolerance for inequality reports with a heuristic side.
    pub heuristic_tol: f64,
    /// The delta schedule stops once `v_delta` is within this relative gap of
    /// a point of the numerical range.
    pub schedule_tol: f64,
    /// Maximum number of levels in the delta schedule `1, 1/4, 1/16, ...`.
    pub schedule_levels: usize,
    pub seed: u64,

    /// Multistart parameters for operator norms and tensor norm maximizations.
    pub norm_starts: usize,
    pub norm_iters: usize,

    /// Multistart parameters for the numerical index estimator.
    pub index_starts: usize,
    pub index_iters: usize,

    /// Starts and local steps for heuristic pair maximization in `v_delta`.
    pub pair_starts: usize,
    pub pair_iters: usize,

    /// Column-generation rounds for the projective norm.
    pub pi_rounds: usize,

    /// Largest dimension for which vertex/facet conversion is attempted.
    pub max_poly_dim: usize,
    /// Largest dimension of an operator space `L(X,Y)`.
    pub max_operator_dim: usize,
    /// Largest dimension of a tensor space.
    pub max_tensor_dim: usize,
    /// Largest operator-space dimension for the exact numerical index.
    pub max_exact_index_dim: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            exact_tol: 1e-9,
            opt_tol: 1e-6,
            heuristic_tol: 1e-4,
            schedule_tol: 1e-8,
            schedule_levels: 24,
            seed: DEFAULT_SEED,
            norm_starts: 64,
            norm_iters: 500,
            index_starts: 256,
            index_iters: 1000,
            pair_starts: 24,
            pair_iters: 150,
            pi_rounds: 200,
            max_poly_dim: 8,
            max_operator_dim: 16,
            max_tensor_dim: 16,
            max_exact_index_dim: 9,
        }
    }
}

impl Config {
    /// Deterministic generator for one heuristic call site.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Scale every multistart budget by `factor` (at least one start / step).
    pub fn scaled_budget(mut self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        self.norm_starts = s(self.norm_starts);
        self.norm_iters = s(self.norm_iters);
        self.index_starts = s(self.index_starts);
        self.index_iters = s(self.index_iters);
        self.pair_starts = s(self.pair_starts);
        self.pair_iters = s(self.pair_iters);
        self
    }
}
