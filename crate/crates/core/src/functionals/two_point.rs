use serde::Serialize;

use crate::error::Result;
use crate::measure::{GridFunction, Reflection};
use crate::rearrange::polarize;
use crate::supermodular::TabulatedIntegrand;

use super::hl::hl_functional;
use super::kernel::Kernel;
use super::riesz::riesz_functional;

/// Which functional a two-point comparison evaluates.
#[derive(Debug, Clone, Copy)]
pub enum Functional<'a> {
    HardyLittlewood,
    Riesz(&'a [Kernel]),
}

impl Functional<'_> {
    pub fn eval(&self, f: &TabulatedIntegrand, us: &[GridFunction]) -> Result<f64> {
        match self {
            Functional::HardyLittlewood => hl_functional(f, us),
            Functional::Riesz(kernels) => riesz_functional(f, us, kernels),
        }
    }
}

/// `I(u^sigma) - I(u)` together with both values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPointDelta {
    pub before: f64,
    pub after: f64,
    pub delta: f64,
}

impl TwoPointDelta {
    pub fn new(before: f64, after: f64) -> Self {
        Self { before, after, delta: after - before }
    }

    /// `delta >= -tol * (1 + |before|)`.
    pub fn nonnegative(&self, tol: f64) -> bool {
        self.delta >= -tol * (1.0 + self.before.abs())
    }
}

/// Polarizes every function at `sigma` and reports the change of the
/// functional.
pub fn two_point_delta(
    functional: Functional<'_>,
    f: &TabulatedIntegrand,
    us: &[GridFunction],
    sigma: &Reflection,
) -> Result<TwoPointDelta> {
    let polarized = us.iter().map(|u| polarize(u, sigma)).collect::<Result<Vec<_>>>()?;
    Ok(TwoPointDelta::new(functional.eval(f, us)?, functional.eval(f, &polarized)?))
}
