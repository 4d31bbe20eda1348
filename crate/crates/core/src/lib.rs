//! Exact computations on the Shannon ordering of discrete memoryless channels.
//!
//! Channels are row-stochastic matrices with rational entries. The crate
//! decides whether one channel contains another (with a mixture witness or
//! a separating game), evaluates BRM games and their payoff regions,
//! estimates the BRM distance, and computes capacity and block error
//! probabilities.
//!
//! ```
//! use shannon_order::{contains, q, Channel, Limits};
//!
//! let better = Channel::bsc(q(1, 10)).unwrap();
//! let worse = Channel::bsc(q(1, 5)).unwrap();
//! let limits = Limits::default();
//! assert!(contains(&better, &worse, &limits).unwrap().is_contains());
//! assert!(!contains(&worse, &better, &limits).unwrap().is_contains());
//! ```

pub mod brm;
pub mod channel;
pub mod cpc;
pub mod error;
mod linalg;
pub mod lp;
pub mod metric;
pub mod ordering;
pub mod params;
pub mod rational;

pub use brm::{
    average_payoff, optimal_average_payoff, payoff, payoff_vector, region_generators,
    region_subset, strategy_to_cpc, BrmGame, OptimalPayoff, PayoffRegionGenerators,
    RegionInclusion, Strategy,
};
pub use channel::{
    channel_product, channel_sum, compose, deterministic, random_channel, tv_distance, Alphabet,
    Channel, DeterministicMap,
};
pub use cpc::{
    caratheodory_reduce, enumerate_det_pairs, skew_compose_channel, skew_compose_cpc, CpcChannel,
    CpcSizes, CpcTerm, DetPairBasis,
};
pub use error::{Error, Result};
pub use lp::{solve_feasibility, LpOutcome, SolverOptions, StandardLp};
pub use metric::{brm_distance_lower_bound, brm_vs_tv, BrmTvBounds, MetricEstimate, MetricParams};
pub use ordering::{
    contains, degraded_from, embed, input_degraded_from, is_equivalent, shannon_equivalent,
    srank_upper_bound, ContainmentWitness, OrderingVerdict, SeparationCertificate, SrankBound,
};
pub use params::{capacity, ml_error_probability, optimal_error_probability, Encoder};
pub use rational::{format_rational, parse_rational, q, qi, Q};

/// Enumeration and solver caps. Operations that would exceed a cap fail
/// with [`Error::ResourceLimit`] instead of running unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Deterministic pairs `(f, g)` in a containment LP, and encoders in an
    /// optimal-payoff search.
    pub max_pairs: u64,
    /// Output blocks `|Y|^n` in error-probability sums.
    pub max_outputs_pow: u64,
    /// Multiset codebooks in the optimal error search.
    pub max_codebooks: u64,
    pub solver: SolverOptions,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pairs: 65_536,
            max_outputs_pow: 65_536,
            max_codebooks: 65_536,
            solver: SolverOptions::default(),
        }
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/containment.md")]
    mod containment {}
    #[doc = include_str!("../../../book/src/convex_products.md")]
    mod convex_products {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/metric.md")]
    mod metric {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
