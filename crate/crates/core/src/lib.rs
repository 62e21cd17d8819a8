//! Discrete rearrangement inequalities: symmetric decreasing and two-point
//! rearrangements of grid functions, tabulated supermodular integrands,
//! Hardy-Littlewood and Riesz functionals, and their counterexamples and
//! variational applications.

pub mod config;
pub mod error;
pub mod extremals;
pub mod functionals;
pub mod measure;
pub mod numeric;
pub mod rearrange;
pub mod report;
pub mod suite;
pub mod supermodular;

pub use config::{FunctionSpec, RunConfig, SuiteKind};
pub use error::{Error, Result};
pub use functionals::{Kernel, VerificationReport};
pub use measure::{Domain, DomainKind, GridFunction, Reflection, StepFunction};
pub use report::ReportRow;
pub use suite::{run_suite, SuiteOutcome};
pub use supermodular::{IntegrandSpec, TabulatedIntegrand};
