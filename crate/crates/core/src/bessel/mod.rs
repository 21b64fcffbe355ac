//! p-adic cohomology of the Bessel (Kloosterman) family: Dwork's splitting
//! function, the Frobenius on the relative cohomology and fiber checks.

pub mod fiber;
pub mod frobenius;
pub mod laurent;
pub mod reduce;
pub mod theta;

pub use fiber::{embed_cyclotomic, fiber_matrix, fiber_trace_check, unit_root, TraceCheck};
pub use frobenius::{gauss_manin_matrix, transfer_residual, FrobMatrix2, FrobParams, FrobRecord};
pub use laurent::{d_tq, frobenius_apply, partial_t, psi_x, LaurentBlock};
pub use reduce::{reduce_to_v, VPair, VPairRecord};
pub use theta::{theta_shift, SplittingFunction, ThetaRecord};
