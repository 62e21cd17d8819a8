//! Tabulated integrands, finite differences, supermodularity tests and the
//! constructive factorization lemmas.

mod checks;
mod families;
mod lemmas;
mod table;

pub use checks::{
    check_nonnegative_difference, check_positive_difference, has_nonnegative_mixed_differences, is_nondecreasing,
    is_supermodular, lorentz_equivalence_scan, lorentz_two_point_check, scan_differences, BoxWitness,
    DifferenceScan, LorentzCheck, SignCheck, LORENTZ_NODE_BUDGET,
};
pub use families::{
    example_717, random_supermodular, uniform_axes, ConvexProfile, Factor, Family, IntegrandSpec, NamedFactor,
    ProductTerm,
};
pub use lemmas::{
    cutoff, monotone_change_of_variable, sklar_factorize, sklar_factorize_preserving, subtract_marginals,
    LipschitzWitness, PiecewiseLinear, SklarFactorization,
};
pub use table::{finite_difference, node_box_difference, MultiIndex, TabulatedIntegrand, SIGN_TOL};
