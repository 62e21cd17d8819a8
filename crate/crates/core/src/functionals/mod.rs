//! Hardy-Littlewood and Riesz functionals, their verification, two-point
//! comparisons and equality diagnostics.

mod diagnostics;
mod hl;
mod kernel;
mod report;
mod riesz;
mod two_point;

pub use diagnostics::{
    comonotone_bruteforce_oracle, comonotonicity_check, hl_equality_diagnostics, riesz_equality_diagnostics, Comonotonicity,
    EqualityDiagnostic, OracleResult, RieszEqualityDiagnostic, EXHAUSTIVE_COMONOTONE_CELLS, ORACLE_MAX_ATOMS, ORACLE_MAX_TUPLES,
    SAMPLED_COMONOTONE_PAIRS,
};
pub use hl::{hl_functional, hl_omega_functional, verify_hl};
pub use kernel::{Kernel, KernelSpec};
pub use report::{ReportMeta, VerificationReport};
pub use riesz::{kernel_pairs, riesz_convolution_functional, riesz_functional, vanishes_on_axes, verify_riesz};
pub use two_point::{two_point_delta, Functional, TwoPointDelta};
