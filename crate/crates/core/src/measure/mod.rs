//! Grids, functions on them, distribution functions and reflections.

mod domain;
mod function;
mod reflection;

pub use domain::{Domain, DomainKind};
pub use function::{distribution, Atom, Distributed, DistributionFunction, GridFunction, StepFunction};
pub use reflection::{enumerate_reflections, Axis, Plane, Reflection, Side};
