//! Gram–Schmidt over operator words: staircase and block tridiagonal bases,
//! simultaneous forms, and the positive-square and `t3aa` sparsifications.

mod basis;
mod partition;
mod profile;
mod relations;
mod sparsify;

pub use basis::{
    classic_word_basis, collapsing_residual, derive_basis, e_inclusion_residuals, transform, verify_staircase,
    DerivedBasis, GEntry, StaircaseCheck,
};
pub use partition::{
    block_partition, commutator_form, covering_violation, fourier_commutator_pair, selfadjoint_parts,
    simultaneous_tridiagonalize, CommutatorForm, SimultaneousForm,
};
pub use profile::SupportProfile;
pub use relations::{norm_chain, partial_trace_relations, NormChainLink, PartialTraceReport};
pub use sparsify::{
    check_t3aa_sizes, positive_square_sparsify, square_shape_check, t3aa_shape_check, t3aa_sizes, ShapeViolation,
    Side, SquareShape, T3aaShape,
};
