//! Threshold sequences, the dyadic quasi-metric they induce, and the exact
//! chain pseudo-metric used to check it.

mod chain;
mod delta;
mod lambda;
mod verify;

pub use chain::{
    chain_weights, frink_chain_metric, is_shortest_path_fixed_point, shortest_paths_in_place,
    PseudoMetricMatrix,
};
pub use delta::{delta_matrix, quasi_triangle_constant, QuasiMetricMatrix, QUASI_TRIANGLE_BOUND};
pub use lambda::{
    compute_lambda_sequence, compute_lambda_sequence_with, lambda_inverse, DiagonalBand,
    InverseVariant, LambdaOptions, LambdaSequence,
};
pub use verify::{
    strict_equivalent_threshold, verify_all, verify_equivalence, verify_sandwich,
    verify_triple_composition, EquivalenceReport, SandwichLevel, SandwichReport,
    TripleCompositionReport, VerificationReport, EQUIVALENCE_LOWER, EQUIVALENCE_UPPER,
    MIN_SANDWICH_SHIFT,
};
