//! Analysis toolkit for finite metric dynamical systems: a finite metric
//! space together with a bijection acting on it.
//!
//! The crate computes dynamical balls (all points whose entire orbit stays
//! within a resolution of a given point's orbit, time-aligned), renders
//! expansivity and separation verdicts with machine-checkable witnesses,
//! partitions spaces into chain components, profiles recurrence and the
//! expansivity of the cyclic group of map powers, and generates the
//! example families used to exercise all of the above. Every core
//! computation is paired with an independent brute-force oracle so results
//! can be cross-checked set-for-set.

pub mod chains;
pub mod classify;
mod error;
pub mod exemplars;
pub mod gamma;
pub mod random;
pub mod recurrence;
pub mod systems;

pub use chains::{
    chain_partition, chain_partition_at_most, chain_partition_oracle, resolve_epsilon,
    ChainPartition,
};
pub use classify::{
    classify, critical_constants, theorem_checks, Assertion, Attainment, ClassificationReport,
    CriticalConstants, TheoremReport, Threshold,
};
pub use error::Error;
pub use exemplars::{
    gen_double_circle, gen_identity_space, gen_power_witness, gen_wine, wine_point_id, Spacing,
    WineParams, WitnessCase, DEFAULT_SPACING_RULE,
};
pub use gamma::{gamma_oracle, gamma_profile, GammaProfile};
pub use random::{quantile_etas, random_suite, random_system};
pub use recurrence::{
    asymptotic_scan, cyclic_group_expansivity, cyclic_group_expansivity_with_grids, minimality,
    recurrence_profile, recurrence_profile_capped, EpsVerdict, GroupExpansivityReport,
    MinimalPower, MinimalityReport, ProximalPair, RecurrenceProfile, DEFAULT_GROUP_ENTRY_CAP,
    DEFAULT_SEQUENCE_CAP,
};
pub use systems::{
    orbit_decomposition, power_system, DynSystem, Geometry, MetricSpace, OrbitDecomposition,
    PointLabel, PointRecord, SystemDocument,
};
