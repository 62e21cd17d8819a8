use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::riesz_convolution_functional;
use crate::measure::{enumerate_reflections, Domain, GridFunction, Plane, Reflection};
use crate::rearrange::polarize;
use crate::supermodular::{example_717, scan_differences, TabulatedIntegrand};

/// Half-width of the interval carrying the counterexample.
pub const COUNTEREXAMPLE_HALF_EXTENT: f64 = 4.0;

/// Values of the convolution functional before and after polarizing
/// `u = 1{|x-2|<eps}`, `v = w = 1{|x-1|<eps}` at the mirror `x = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub eps: f64,
    pub n: usize,
    pub spacing: f64,
    /// Continuum value `3 eps^2`.
    pub analytic: f64,
    pub value: f64,
    pub polarized_value: f64,
    /// `polarized_value - value`; negative.
    pub delta: f64,
}

fn off_grid_mirror(n: usize) -> Error {
    Error::InvalidArgument(format!("the mirror x = 1 is not a cell boundary or center for n = {n}; use a multiple of 4"))
}

/// Cells whose centers lie strictly within `eps` of `a`.
pub fn indicator(domain: Domain, a: f64, eps: f64) -> GridFunction {
    GridFunction::from_fn(domain, |p| if (p[0] - a).abs() < eps { 1.0 } else { 0.0 }).expect("indicator values are valid")
}

fn mirror_at(domain: &Domain, x: f64) -> Option<Reflection> {
    let offset = x / (domain.spacing() / 2.0);
    if offset.fract() != 0.0 {
        return None;
    }
    enumerate_reflections(domain).into_iter().find(|r| r.plane() == Plane::Interval { offset: offset as i64 })
}

/// Evaluates the counterexample on `[-4, 4]` with `n` cells.
pub fn riesz_polarization_counterexample(eps: f64, n: usize) -> Result<CounterexampleReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1/2], got {eps}")));
    }
    if !n.is_multiple_of(4) {
        return Err(off_grid_mirror(n));
    }
    let domain = Domain::interval(COUNTEREXAMPLE_HALF_EXTENT, n)?;
    let sigma = mirror_at(&domain, 1.0).ok_or_else(|| off_grid_mirror(n))?;
    let u = indicator(domain, 2.0, eps);
    let v = indicator(domain, 1.0, eps);
    let f = TabulatedIntegrand::from_fn(vec![vec![0.0, 1.0]; 3], |y| y.iter().product())?;
    let value = riesz_convolution_functional(&f, &u, &v, &v)?;
    let (us, vs) = (polarize(&u, &sigma)?, polarize(&v, &sigma)?);
    let polarized_value = riesz_convolution_functional(&f, &us, &vs, &vs)?;
    Ok(CounterexampleReport {
        eps,
        n,
        spacing: domain.spacing(),
        analytic: 3.0 * eps * eps,
        value,
        polarized_value,
        delta: polarized_value - value,
    })
}

/// Sign pattern of the mixed differences of the three-variable example.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delta123Report {
    /// `Delta_123 > 0` and every `Delta_ij < 0` on all adjacent boxes.
    pub holds: bool,
    pub boxes: usize,
    pub min_delta123: f64,
    /// Largest `Delta_ij` over all pairs and boxes.
    pub max_delta_pair: f64,
}

/// Scans the mixed differences of the example integrand over the adjacent
/// boxes of `nodes^3`.
pub fn delta123_example_scan(nodes: &[f64]) -> Result<Delta123Report> {
    if nodes.len() < 2 || nodes[0] != 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("nodes must start at 0 and increase strictly".into()));
    }
    let f = TabulatedIntegrand::from_fn(vec![nodes.to_vec(); 3], example_717)?;
    let triple = scan_differences(&f, &[0, 1, 2]);
    let max_delta_pair =
        [[0, 1], [0, 2], [1, 2]].iter().map(|p| scan_differences(&f, p).max).fold(f64::NEG_INFINITY, f64::max);
    Ok(Delta123Report {
        holds: triple.min > 0.0 && max_delta_pair < 0.0,
        boxes: triple.boxes,
        min_delta123: triple.min,
        max_delta_pair,
    })
}
