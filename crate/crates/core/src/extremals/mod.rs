//! Counterexamples, discrete Brunn-Minkowski, and the waveguide
//! variational problem.

mod counterexample;
mod minkowski;
mod optics;

pub use counterexample::{
    delta123_example_scan, indicator, riesz_polarization_counterexample, CounterexampleReport, Delta123Report,
    COUNTEREXAMPLE_HALF_EXTENT,
};
pub use minkowski::{bm_check, minkowski_sum, BmCheck, IndexSet};
pub use optics::{
    dirichlet_energy, ground_state_solve, hl_x_check, is_radially_nonincreasing, polya_szego_check, EnergySample,
    EnergyTerms, GroundState, Nonlinearity, PolyaSzego, SolverOptions, SymmetrizationStep, WaveguideProblem,
};
