//! Construction, verification, counting and exhaustive search of maximal
//! k-wise intersecting families of subsets of `[n]`.
//!
//! A family is k-wise intersecting when every collection of at most `k` of
//! its members shares an element, and maximal when no further subset of `[n]`
//! can join it without breaking that property.

mod bitmap;
pub mod constructions;
pub mod disjointness;
pub mod error;
pub mod family;
pub mod intersecting;
pub mod parallel;
pub mod search;

pub use constructions::{
    balanced_linked_cubes, even_lift, generalized_linked, linked_cubes, principal_star, series_of_cubes, Partition,
};
pub use disjointness::{
    build_disjointness_graph, clique_count, dichotomy_check, dp, entropy_bound, observation1_certificate,
    stability_distance, weak_bound_check, DisjointnessGraph, InjectionCertificate,
};
pub use error::{Error, Result};
pub use family::{FamilyFile, GroundSet, SetFamily, SubsetMask, MAX_N};
pub use search::{
    canonical_form, enumerate_maximal, min_maximal_size, prop5_window, SearchConfig, SearchMode, SearchReport,
};
pub use intersecting::{
    addable_sets, is_k_wise_intersecting, is_maximal, minimal_blockers, saturate, KParameter, MAX_K,
};
