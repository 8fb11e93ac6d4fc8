use thiserror::Error;

/// Errors raised while loading, validating, or analyzing systems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),

    /// The map is not a permutation: two points share an image.
    #[error("non-bijective: image {image} repeated (positions {first} and {second})")]
    NonBijectiveMap {
        image: usize,
        first: usize,
        second: usize,
    },

    #[error("metric axiom violation: d[{i}][{i}] = {value}, expected 0")]
    NonZeroDiagonal { i: usize, value: f64 },

    #[error("metric axiom violation: d[{i}][{j}] = {forward} but d[{j}][{i}] = {backward}")]
    AsymmetricDistance {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },

    #[error(
        "metric axiom violation: d[{i}][{j}] = {value}, expected positive for distinct points"
    )]
    NonPositiveDistance { i: usize, j: usize, value: f64 },

    #[error(
        "metric axiom violation: triangle inequality fails for ({i}, {j}, {k}): \
         d[{i}][{k}] = {direct} exceeds d[{i}][{j}] + d[{j}][{k}] = {via}"
    )]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spacing rule invalid at level {level}: {reason}")]
    SpacingRule { level: u32, reason: String },

    /// The cyclic group (or displacement sequence) would exceed the entry cap.
    #[error("group too large: order {order} on {points} points exceeds cap {cap}")]
    GroupTooLarge {
        order: u128,
        points: usize,
        cap: u64,
    },

    /// A construction failed to verify one of its own claims.
    #[error("witness invariant failed: {0}")]
    WitnessInvariant(String),

    /// A computed structure violates one of its declared invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
