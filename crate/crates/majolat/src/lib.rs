//! Majorization lattice operations and entropy inequality verification.
//!
//! The lattice of descending-sorted probability vectors under majorization
//! has a meet (greatest common majorized distribution) and a join (least
//! common majorizer). This crate computes both, decomposes the structural
//! relation `(p ∧ q) ⊕ (p ∨ q) ≺ p ⊕ q` into explicit T-transforms, and
//! verifies the supermodularity/subadditivity inequalities — with their
//! correction terms — that Shannon, Rényi, and Tsallis entropies satisfy
//! on the lattice.
//!
//! Two arithmetic backends are available for the lattice layer: IEEE
//! binary64 with an absolute tolerance, and exact big rationals for
//! oracle-grade checks. Entropies are binary64 only.
//!
//! ```
//! use majolat::{compare, meet, join, Backend, Comparison, Distribution};
//!
//! let be = Backend::float64();
//! let p = Distribution::new(vec![0.5, 0.5, 0.0], &be).unwrap();
//! let q = Distribution::new(vec![0.6, 0.2, 0.2], &be).unwrap();
//! assert_eq!(compare(&p, &q, &be), Comparison::Incomparable);
//! assert_eq!(meet(&p, &q).values(), &[0.5, 0.3, 0.2]);
//! assert_eq!(join(&p, &q).values(), &[0.6, 0.4, 0.0]);
//! ```

pub mod dist;
pub mod entropy;
pub mod error;
pub mod lattice;
pub mod sample;
pub mod scalar;
pub mod verify;

pub use dist::{compare, compare_weights, Comparison, Distribution, LorenzCurve, WeightVector};
pub use entropy::{
    alpha_norm_pow, kl, lattice_distance, renyi, shannon, shannon_nats, tsallis, w_phi, Alpha,
};
pub use error::Error;
pub use lattice::{
    beta, concatenation, decompose_ttransforms, join, meet, precursor_subadditive,
    precursor_supermodular, precursor_tensor, MeetJoinPair, TTransform,
};
pub use sample::{
    enumerate_grid, lattice_gap, read_witnesses, reverify_witness, sample_comparable_pair,
    sample_incomparable_pair, sample_minorizer, sample_pair, sample_rational,
    sample_rational_pair, sample_simplex, sample_triple, search_counterexample, write_witnesses,
    SampleConfig, SearchDirection, SearchFunctional, SearchOutcome, SearchRelation, SearchSpec,
    Witness,
};
pub use scalar::{Backend, Scalar};
pub use verify::{
    batch_verify, check_distance_triangle, check_lem2, check_log_submod, check_one,
    check_renyi_subadd_refined, check_renyi_supermod, check_shannon_subadd_refined,
    check_shannon_supermod_refined, check_sum_concave_subadd, check_sum_concave_supermod,
    check_thm1, check_thm2, check_tsallis_subadd_refined, check_tsallis_supermod_refined,
    write_csv, BatchConfig, BatchSummary, InequalityId, Report, SumConcave, SummaryWitness,
};
