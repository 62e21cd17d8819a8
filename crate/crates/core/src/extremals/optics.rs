use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::VerificationReport;
use crate::measure::{Domain, DomainKind, GridFunction};
use crate::numeric::compensated_sum;
use crate::rearrange::symmetric_decreasing_rearrangement;
use crate::supermodular::PiecewiseLinear;

fn require_interval(domain: &Domain) -> Result<()> {
    if domain.kind() != DomainKind::Interval {
        return Err(Error::InvalidDomain("this operation is defined on the interval".into()));
    }
    Ok(())
}

/// `1/2 sum_k (u_k - u_{k-1})^2 / h` over all `n + 1` cell interfaces, with
/// `u` padded by zero on both sides.
pub fn dirichlet_energy(u: &GridFunction) -> Result<f64> {
    require_interval(u.domain())?;
    let v = u.values();
    let at = |k: usize| if k == 0 || k > v.len() { 0.0 } else { v[k - 1] };
    let sum = compensated_sum((1..=v.len() + 1).map(|k| (at(k) - at(k - 1)).powi(2)));
    Ok(0.5 * sum / u.domain().spacing())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyaSzego {
    pub holds: bool,
    pub before: f64,
    pub after: f64,
}

/// Checks `E(u*) <= E(u) + tol (1 + E(u))` for the Dirichlet energy.
pub fn polya_szego_check(u: &GridFunction, tol: f64) -> Result<PolyaSzego> {
    let before = dirichlet_energy(u)?;
    let after = dirichlet_energy(&symmetric_decreasing_rearrangement(u))?;
    Ok(PolyaSzego { holds: after <= before + tol * (1.0 + before), before, after })
}

/// Nondecreasing nonlinearity `g` with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum Nonlinearity {
    /// `u^p`, `p > 0`.
    Power { p: f64 },
    /// Piecewise-linear through the given samples, constant beyond.
    Table { knots: Vec<f64>, values: Vec<f64> },
}

impl Nonlinearity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Power { p } if !(p.is_finite() && *p > 0.0) => {
                Err(Error::InvalidArgument("power nonlinearity needs p > 0".into()))
            }
            Nonlinearity::Power { .. } => Ok(()),
            Nonlinearity::Table { knots, values } => {
                let pl = PiecewiseLinear::new(knots.clone(), values.clone())?;
                if knots[0] != 0.0 || values[0] != 0.0 || !pl.is_nondecreasing() {
                    return Err(Error::InvalidArgument("tabulated nonlinearity must start at (0, 0) and be nondecreasing".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power { p } => u.powf(*p),
            Nonlinearity::Table { knots, values } => table(knots, values).eval(u),
        }
    }

    /// One-sided (right) derivative.
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power { p } if u > 0.0 => p * u.powf(p - 1.0),
            Nonlinearity::Power { p } => {
                if *p > 1.0 {
                    0.0
                } else if *p == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            Nonlinearity::Table { knots, values } => table(knots, values).slope(u),
        }
    }
}

fn table(knots: &[f64], values: &[f64]) -> PiecewiseLinear {
    PiecewiseLinear::new(knots.to_vec(), values.to_vec()).expect("validated nonlinearity")
}

/// `true` when `q` depends only on the distance to `x*` and does not
/// increase with it.
pub fn is_radially_nonincreasing(q: &GridFunction) -> bool {
    let domain = q.domain();
    let v = q.values();
    domain.distance_order().windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        if domain.center_key(a) == domain.center_key(b) {
            v[a] == v[b]
        } else {
            v[a] >= v[b]
        }
    })
}

fn potential(q: &GridFunction, g: &Nonlinearity, u: &GridFunction) -> f64 {
    let h = u.domain().cell_measure();
    compensated_sum(q.values().iter().zip(u.values()).map(|(&qx, &ux)| qx * g.eval(ux))) * h
}

/// Compares `sum q(|x|) g(u(x)) h` with the same sum for `u*`.
pub fn hl_x_check(q: &GridFunction, g: &Nonlinearity, u: &GridFunction, tol: f64) -> Result<VerificationReport> {
    q.ensure_same_domain(u)?;
    g.validate()?;
    if !is_radially_nonincreasing(q) {
        return Err(Error::Precondition("q must be radial and nonincreasing in the distance to the center".into()));
    }
    let lhs = potential(q, g, u);
    let rhs = potential(q, g, &symmetric_decreasing_rearrangement(u));
    Ok(VerificationReport::new(lhs, rhs, tol))
}

/// `E(u) = 1/2 int |u'|^2 - int q(|x|) g(u)` under `||u||_2 = c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideProblem {
    pub domain: Domain,
    pub q: Vec<f64>,
    pub g: Nonlinearity,
    pub c: f64,
}

impl WaveguideProblem {
    pub fn validate(&self) -> Result<GridFunction> {
        require_interval(&self.domain)?;
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidArgument(format!("constraint level must be positive, got {}", self.c)));
        }
        self.g.validate()?;
        let q = GridFunction::new(self.domain, self.q.clone())?;
        if !is_radially_nonincreasing(&q) {
            return Err(Error::Precondition("q must be radial and nonincreasing in the distance to the center".into()));
        }
        Ok(q)
    }

    pub fn energy(&self, u: &GridFunction) -> Result<EnergyTerms> {
        let q = GridFunction::new(self.domain, self.q.clone())?;
        EnergyTerms::new(&q, &self.g, u)
    }
}

/// The two parts of the waveguide energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTerms {
    pub dirichlet: f64,
    pub potential: f64,
}

impl EnergyTerms {
    fn new(q: &GridFunction, g: &Nonlinearity, u: &GridFunction) -> Result<Self> {
        Ok(Self { dirichlet: dirichlet_energy(u)?, potential: potential(q, g, u) })
    }

    pub fn total(&self) -> f64 {
        self.dirichlet - self.potential
    }
}

/// Solver tunables for [`ground_state_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Gradient step; defaults to `h^2 / 4`.
    pub step: Option<f64>,
    /// Stop once successive energies differ by at most `tol (1 + |E|)`.
    pub tol: f64,
    /// Symmetrize every this many iterations.
    pub symmetrize_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iters: 5_000, step: None, tol: 1e-12, symmetrize_every: 25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySample {
    pub iter: usize,
    pub energy: f64,
    pub dirichlet: f64,
    pub potential: f64,
    pub symmetrized: bool,
}

/// Energy terms on both sides of one symmetrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetrizationStep {
    pub iter: usize,
    pub before: EnergyTerms,
    pub after: EnergyTerms,
    /// Dirichlet term did not grow and potential term did not shrink.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub u: GridFunction,
    pub trace: Vec<EnergySample>,
    pub symmetrizations: Vec<SymmetrizationStep>,
    pub converged: bool,
}

impl GroundState {
    pub fn energy(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |s| s.energy)
    }

    pub fn symmetrizations_monotone(&self) -> bool {
        self.symmetrizations.iter().all(|s| s.monotone)
    }
}

const SYMMETRIZATION_TOL: f64 = 1e-10;

fn normalize(values: &mut [f64], h: f64, c: f64) -> Result<()> {
    let norm = (compensated_sum(values.iter().map(|v| v * v)) * h).sqrt();
    if !norm.is_finite() {
        return Err(Error::Divergence("iterate norm is not finite".into()));
    }
    if norm == 0.0 {
        return Err(Error::Divergence("iterate collapsed to zero".into()));
    }
    values.iter_mut().for_each(|v| *v *= c / norm);
    Ok(())
}

/// Projected gradient descent on the waveguide energy from `start`.
///
/// After every step the iterate is clamped to be nonnegative and rescaled
/// to `||u||_2 = c`; every `symmetrize_every` iterations, and once at the
/// end, it is replaced by its symmetric decreasing rearrangement.
pub fn ground_state_solve(problem: &WaveguideProblem, start: &GridFunction, options: &SolverOptions) -> Result<GroundState> {
    let q = problem.validate()?;
    q.ensure_same_domain(start)?;
    let domain = problem.domain;
    let h = domain.spacing();
    let tau = options.step.unwrap_or(0.25 * h * h);
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let every = options.symmetrize_every.max(1);
    let n = domain.n();
    let mut values = start.values().to_vec();
    normalize(&mut values, h, problem.c)?;
    let mut u = GridFunction::new(domain, values.clone())?;
    let mut trace = Vec::new();
    let mut symmetrizations = Vec::new();
    let record = |trace: &mut Vec<EnergySample>, iter: usize, terms: EnergyTerms, symmetrized: bool| -> Result<f64> {
        let energy = terms.total();
        if !energy.is_finite() {
            return Err(Error::Divergence(format!("energy is {energy} at iteration {iter}")));
        }
        trace.push(EnergySample { iter, energy, dirichlet: terms.dirichlet, potential: terms.potential, symmetrized });
        Ok(energy)
    };
    let symmetrize = |iter: usize, u: &GridFunction, symmetrizations: &mut Vec<SymmetrizationStep>| -> Result<GridFunction> {
        let star = symmetric_decreasing_rearrangement(u);
        let before = EnergyTerms::new(&q, &problem.g, u)?;
        let after = EnergyTerms::new(&q, &problem.g, &star)?;
        let monotone = after.dirichlet <= before.dirichlet + SYMMETRIZATION_TOL * (1.0 + before.dirichlet.abs())
            && after.potential >= before.potential - SYMMETRIZATION_TOL * (1.0 + before.potential.abs());
        symmetrizations.push(SymmetrizationStep { iter, before, after, monotone });
        Ok(star)
    };
    let mut energy = record(&mut trace, 0, EnergyTerms::new(&q, &problem.g, &u)?, false)?;
    let mut converged = false;
    let mut next = vec![0.0; n];
    for iter in 1..=options.max_iters {
        let v = u.values();
        for k in 0..n {
            let left = if k > 0 { v[k - 1] } else { 0.0 };
            let right = if k + 1 < n { v[k + 1] } else { 0.0 };
            let laplacian = (2.0 * v[k] - left - right) / (h * h);
            let grad = laplacian - q.values()[k] * problem.g.derivative(v[k]);
            next[k] = (v[k] - tau * grad).max(0.0);
        }
        normalize(&mut next, h, problem.c)?;
        u = GridFunction::new(domain, next.clone()).map_err(|e| Error::Divergence(e.to_string()))?;
        let symmetrized = iter % every == 0;
        if symmetrized {
            u = symmetrize(iter, &u, &mut symmetrizations)?;
        }
        let e = record(&mut trace, iter, EnergyTerms::new(&q, &problem.g, &u)?, symmetrized)?;
        let settled = (e - energy).abs() <= options.tol * (1.0 + e.abs());
        energy = e;
        if settled {
            converged = true;
            break;
        }
    }
    let last = trace.last().map_or(0, |s| s.iter);
    u = symmetrize(last, &u, &mut symmetrizations)?;
    record(&mut trace, last, EnergyTerms::new(&q, &problem.g, &u)?, true)?;
    Ok(GroundState { u, trace, symmetrizations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::is_symmetric_decreasing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interval(values: &[f64]) -> GridFunction {
        GridFunction::new(Domain::interval(values.len() as f64 / 2.0, values.len()).unwrap(), values.to_vec()).unwrap()
    }

    #[test]
    fn energy_by_hand() {
        let u = interval(&[1.0, 0.0, 2.0]);
        assert_eq!(dirichlet_energy(&u).unwrap(), 10.0 / 2.0);
        let r = polya_szego_check(&u, 0.0).unwrap();
        assert_eq!((r.before, r.after, r.holds), (5.0, 3.0, true));
        assert_eq!(dirichlet_energy(&interval(&[0.0; 4])).unwrap(), 0.0);
        let sym = interval(&[1.0, 3.0, 2.0]);
        let r = polya_szego_check(&symmetric_decreasing_rearrangement(&sym), 0.0).unwrap();
        assert_eq!(r.before, r.after);
    }

    #[test]
    fn energy_needs_the_interval() {
        let u = GridFunction::zeros(Domain::circle(1.0, 4).unwrap());
        assert!(dirichlet_energy(&u).is_err());
    }

    #[test]
    fn hl_x_by_hand() {
        let q = interval(&[1.0, 2.0, 3.0, 2.0, 1.0]);
        let g = Nonlinearity::Power { p: 1.0 };
        let r = hl_x_check(&q, &g, &interval(&[3.0, 0.0, 0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (4.0, 11.0, true));
        let ones = interval(&[1.0; 5]);
        let r = hl_x_check(&ones, &g, &interval(&[3.0, 0.0, 2.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.slack, 0.0);
        assert_eq!(hl_x_check(&q, &g, &interval(&[0.0; 5]), 0.0).unwrap().rhs, 0.0);
        assert!(hl_x_check(&interval(&[1.0, 2.0, 3.0, 2.5, 1.0]), &g, &ones, 0.0).is_err());
    }

    fn problem(n: usize, q: impl Fn(f64) -> f64, c: f64) -> WaveguideProblem {
        let domain = Domain::interval(4.0, n).unwrap();
        let q = (0..n).map(|k| q(domain.position(k)[0].abs())).collect();
        WaveguideProblem { domain, q, g: Nonlinearity::Power { p: 2.0 }, c }
    }

    #[test]
    fn symmetric_start_stays_symmetric() {
        let p = problem(32, |_| 1.0, 1.0);
        let start = GridFunction::from_fn(p.domain, |x| (-x[0] * x[0]).exp()).unwrap();
        let gs = ground_state_solve(&p, &start, &SolverOptions { max_iters: 500, ..SolverOptions::default() }).unwrap();
        assert!(is_symmetric_decreasing(&gs.u));
        for s in &gs.symmetrizations {
            assert!((s.after.total() - s.before.total()).abs() < 1e-9);
        }
    }

    #[test]
    fn random_start_ends_symmetric_decreasing() {
        let p = problem(32, |r| 2.0 / (1.0 + r * r), 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let start = GridFunction::from_fn(p.domain, |_| rng.gen::<f64>()).unwrap();
        let gs = ground_state_solve(&p, &start, &SolverOptions::default()).unwrap();
        assert!(is_symmetric_decreasing(&gs.u));
        assert!(gs.symmetrizations_monotone());
        assert!(gs.energy() < gs.trace[0].energy);
        let norm = (gs.u.values().iter().map(|v| v * v).sum::<f64>() * p.domain.spacing()).sqrt();
        assert!((norm - 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problems_are_rejected() {
        let p = problem(8, |_| 1.0, 0.0);
        assert!(ground_state_solve(&p, &GridFunction::constant(p.domain, 1.0).unwrap(), &SolverOptions::default()).is_err());
        let p = problem(8, |_| 1.0, 1.0);
        let zero = GridFunction::zeros(p.domain);
        assert!(matches!(ground_state_solve(&p, &zero, &SolverOptions::default()), Err(Error::Divergence(_))));
        let p = problem(8, |r| r, 1.0);
        assert!(matches!(p.validate(), Err(Error::Precondition(_))));
    }
}
