//! Block geometry, block tridiagonal containers, band splitting, norms and
//! residuals of the block commutator equations.

mod dense;
pub mod io;
mod residuals;
mod sizes;
mod tridiag;

pub use dense::{band_profile_check, commutator, split_bands, BandCheck, BandSplit, DenseOp};
pub use residuals::{
    commutator_diag_block, commutator_lower_block, commutator_upper_block, residuals_am, residuals_gam,
    trace_chain, AmResiduals, GamResiduals, TraceChain, TraceChainContext,
};
pub use sizes::BlockSizes;
pub use tridiag::{block_norms, BlockNorms, BlockTridiagonal, NormKind};
