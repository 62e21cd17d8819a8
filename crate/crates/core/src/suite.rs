//! Orchestration of the verification suites behind the command line.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{trial_rng, FunctionalKind, RunConfig, SuiteKind};
use crate::error::{Error, Result};
use crate::extremals::{
    bm_check, ground_state_solve, riesz_polarization_counterexample, EnergySample, IndexSet, Nonlinearity,
    WaveguideProblem,
};
use crate::functionals::{
    comonotone_bruteforce_oracle, hl_functional, hl_omega_functional, two_point_delta, vanishes_on_axes, verify_hl,
    verify_riesz, Functional, Kernel,
};
use crate::measure::{enumerate_reflections, Domain, DomainKind, GridFunction, StepFunction};
use crate::numeric::scaled_tol;
use crate::rearrange::{is_symmetric_decreasing, polarization_sequence, symmetric_decreasing_rearrangement, PolarizationOptions};
use crate::report::ReportRow;
use crate::supermodular::{subtract_marginals, TabulatedIntegrand};

/// Rows of a finished run, in trial order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: SuiteKind,
    pub rows: Vec<ReportRow>,
    /// Energy traces of the optics suite, per trial.
    pub traces: Vec<Vec<EnergySample>>,
}

impl SuiteOutcome {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    /// `0` when every trial holds, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_hold() {
            0
        } else {
            1
        }
    }

    /// CSV of the optics energy traces.
    pub fn write_traces<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["trial", "iter", "energy", "dirichlet", "potential", "symmetrized"])?;
        for (trial, trace) in self.traces.iter().enumerate() {
            for s in trace {
                csv.write_record([
                    trial.to_string(),
                    s.iter.to_string(),
                    s.energy.to_string(),
                    s.dirichlet.to_string(),
                    s.potential.to_string(),
                    s.symmetrized.to_string(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    }
}

/// Runs every trial of the configured suite. Trials run concurrently and
/// are reported in trial order; each trial draws from its own stream.
pub fn run_suite(config: &RunConfig) -> Result<SuiteOutcome> {
    config.validate()?;
    let trials = config.trials;
    let mut traces = Vec::new();
    let rows = match config.suite {
        SuiteKind::Hl => par_trials(trials, |t| hl_trial(config, t))?,
        SuiteKind::Riesz => par_trials(trials, |t| riesz_trial(config, t))?,
        SuiteKind::TwoPoint => par_trials(trials, |t| two_point_trial(config, t))?,
        SuiteKind::Oracle => par_trials(trials, |t| oracle_trial(config, t))?,
        SuiteKind::CounterexampleRiesz => vec![counterexample_row(config)?],
        SuiteKind::BmCheck => par_trials(trials, |t| bm_trial(config, t))?,
        SuiteKind::Rearrange => par_trials(trials, |t| rearrange_trial(config, t))?,
        SuiteKind::Optics => {
            let results: Vec<(ReportRow, Vec<EnergySample>)> =
                (0..trials).into_par_iter().map(|t| optics_trial(config, t)).collect::<Result<_>>()?;
            let (rows, t): (Vec<_>, Vec<_>) = results.into_iter().unzip();
            traces = t;
            rows
        }
    };
    Ok(SuiteOutcome { suite: config.suite, rows, traces })
}

fn par_trials(trials: usize, run: impl Fn(usize) -> Result<ReportRow> + Sync + Send) -> Result<Vec<ReportRow>> {
    (0..trials).into_par_iter().map(run).collect()
}

fn default_interval(n: usize) -> Domain {
    Domain::interval(1.0, n).expect("valid default domain")
}

fn tops(f: &TabulatedIntegrand) -> Vec<f64> {
    (0..f.arity()).map(|i| f.top(i)).collect()
}

fn hl_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let mut rng = trial_rng(config.seed, trial);
    let domain = config.domain_or(default_interval(64));
    let f = config.integrand_for(trial, &mut rng)?;
    let us = config.functions_for(domain, f.arity(), &tops(&f), &mut rng)?;
    let r = verify_hl(&f, &us, config.tol)?;
    Ok(ReportRow::new(trial, r.lhs, r.rhs, r.holds))
}

/// On bounded domains the Riesz integrand must vanish on the coordinate
/// hyperplanes; two-variable integrands are brought into that form by
/// removing their marginals, which leaves the mixed differences unchanged.
fn riesz_integrand(domain: &Domain, f: TabulatedIntegrand) -> Result<TabulatedIntegrand> {
    if domain.kind() == DomainKind::Circle || vanishes_on_axes(&f, 1e-12) {
        Ok(f)
    } else if f.arity() == 2 {
        Ok(subtract_marginals(&f))
    } else {
        Err(Error::Config(
            "on the interval or the square, Riesz runs with three or more functions need an integrand vanishing on the axes; use the circle".into(),
        ))
    }
}

fn riesz_setup(config: &RunConfig, trial: usize) -> Result<(TabulatedIntegrand, Vec<GridFunction>, Vec<Kernel>)> {
    let mut rng = trial_rng(config.seed, trial);
    let m = config.arity();
    if m > 3 {
        return Err(Error::Config(format!("Riesz functionals are evaluated for m <= 3, got {m}")));
    }
    let domain = config.domain_or(default_interval(if m >= 3 { 24 } else { 64 }));
    let raw = config.integrand_for(trial, &mut rng)?;
    let us = config.functions_for(domain, raw.arity(), &tops(&raw), &mut rng)?;
    let f = riesz_integrand(&domain, raw)?;
    let kernels = config.kernels_for(f.arity(), &domain, trial, &mut rng)?;
    Ok((f, us, kernels))
}

fn riesz_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let (f, us, kernels) = riesz_setup(config, trial)?;
    let r = verify_riesz(&f, &us, &kernels, config.tol)?;
    Ok(ReportRow::new(trial, r.lhs, r.rhs, r.holds))
}

/// Row: `lhs = I(u)`, `rhs = min_sigma I(u^sigma)`; holds when every
/// reflection satisfies `I(u) <= I(u^sigma) <= I(u*)` within tolerance.
fn two_point_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let (f, us, kernels) = match config.functional {
        FunctionalKind::Hl => {
            let mut rng = trial_rng(config.seed, trial);
            let domain = config.domain_or(default_interval(64));
            let f = config.integrand_for(trial, &mut rng)?;
            let us = config.functions_for(domain, f.arity(), &tops(&f), &mut rng)?;
            (f, us, Vec::new())
        }
        FunctionalKind::Riesz => riesz_setup(config, trial)?,
    };
    let functional = match config.functional {
        FunctionalKind::Hl => Functional::HardyLittlewood,
        FunctionalKind::Riesz => Functional::Riesz(&kernels),
    };
    let stars: Vec<GridFunction> = us.iter().map(symmetric_decreasing_rearrangement).collect();
    let top = functional.eval(&f, &stars)?;
    let before = functional.eval(&f, &us)?;
    let mut worst = before;
    let mut holds = true;
    for sigma in enumerate_reflections(us[0].domain()) {
        let d = two_point_delta(functional, &f, &us, &sigma)?;
        holds &= d.nonnegative(config.tol) && d.after <= top + scaled_tol(config.tol, top);
        worst = worst.min(d.after);
    }
    Ok(ReportRow::new(trial, before, worst, holds))
}

/// Row: `lhs` is the brute-force maximum, `rhs` the rearranged functional.
fn oracle_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let mut rng = trial_rng(config.seed, trial);
    let f = config.integrand_for(trial, &mut rng)?;
    let m = f.arity();
    let atoms = config.atoms.unwrap_or(if m >= 3 { 4 } else { 6 });
    let measure = 0.5;
    let lists: Vec<Vec<f64>> = (0..m).map(|i| (0..atoms).map(|_| rng.gen::<f64>() * f.top(i)).collect()).collect();
    let oracle = comonotone_bruteforce_oracle(&f, &lists, measure)?;
    let steps = lists.iter().map(|l| StepFunction::uniform(l, measure)).collect::<Result<Vec<_>>>()?;
    let omega = hl_omega_functional(&f, &steps)?;
    let holds = (oracle.value - omega).abs() <= scaled_tol(config.tol, omega);
    Ok(ReportRow::new(trial, oracle.value, omega, holds))
}

/// Row: `lhs` is the polarized value, `rhs` the original; the expected
/// strict decrease is the passing outcome.
fn counterexample_row(config: &RunConfig) -> Result<ReportRow> {
    let n = config.domain.map_or(256, |d| d.n());
    let r = riesz_polarization_counterexample(config.eps.unwrap_or(0.25), n)?;
    let holds = r.delta < 0.0 && r.polarized_value == 0.0;
    Ok(ReportRow::new(0, r.polarized_value, r.value, holds))
}

fn random_index_set(rng: &mut impl Rng, max_size: usize) -> IndexSet {
    let size = rng.gen_range(1..=max_size);
    let window = 2 * max_size as i64;
    IndexSet::new((0..size).map(|_| rng.gen_range(-window..=window))).expect("nonempty")
}

/// Row: `lhs = |A* + B*|`, `rhs = |A + B|`.
fn bm_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let max_size = config.max_size.unwrap_or(64);
    if max_size == 0 {
        return Err(Error::Config("max_size must be positive".into()));
    }
    let mut rng = trial_rng(config.seed, trial);
    let a = random_index_set(&mut rng, max_size);
    let b = random_index_set(&mut rng, max_size);
    let r = bm_check(&a, &b);
    Ok(ReportRow::new(trial, r.star_sum as f64, r.sum as f64, r.holds))
}

/// Row: `lhs` is the final L1 distance to the rearrangements, `rhs` the
/// target; holds when the target is met and the Hardy-Littlewood
/// functional never decreased.
fn rearrange_trial(config: &RunConfig, trial: usize) -> Result<ReportRow> {
    let mut rng = trial_rng(config.seed, trial);
    let domain = config.domain_or(default_interval(128));
    let f = config.integrand_for(trial, &mut rng)?;
    let us = config.functions_for(domain, f.arity(), &tops(&f), &mut rng)?;
    let opts = PolarizationOptions {
        budget: config.budget.unwrap_or(10_000),
        tol: config.target.unwrap_or(1e-3),
        seed: rng.gen(),
        ..PolarizationOptions::default()
    };
    let eval = |vs: &[GridFunction]| hl_functional(&f, vs).unwrap_or(f64::NAN);
    let (_, trace) = polarization_sequence(&us, &opts, Some(&eval))?;
    let mut previous = trace.initial_functional.unwrap_or(f64::NAN);
    let mut monotone = true;
    for step in &trace.steps {
        let value = step.functional.unwrap_or(f64::NAN);
        monotone &= value >= previous - scaled_tol(config.tol, previous);
        previous = value;
    }
    let target = opts.tol * us.iter().map(GridFunction::l1_norm).sum::<f64>();
    let reached = trace.final_l1();
    Ok(ReportRow::new(trial, reached, target, monotone && reached <= target))
}

/// Random waveguide problem: `q(r) = a / (1 + b r^2)`, `g(u) = u^2`.
pub fn random_waveguide(domain: Domain, rng: &mut impl Rng) -> WaveguideProblem {
    let (a, b) = (rng.gen_range(0.5..3.0), rng.gen_range(0.1..2.0));
    let q = (0..domain.len())
        .map(|k| {
            let r = domain.position(k)[0].abs();
            a / (1.0 + b * r * r)
        })
        .collect();
    WaveguideProblem { domain, q, g: Nonlinearity::Power { p: 2.0 }, c: rng.gen_range(0.5..2.0) }
}

/// Row: `lhs` is the final energy, `rhs` the starting energy; holds when
/// every symmetrization lowered both energy terms and the result is
/// symmetric decreasing.
fn optics_trial(config: &RunConfig, trial: usize) -> Result<(ReportRow, Vec<EnergySample>)> {
    let mut rng = trial_rng(config.seed, trial);
    let problem = match &config.problem {
        Some(p) => p.clone(),
        None => random_waveguide(config.domain_or(Domain::interval(4.0, 64)?), &mut rng),
    };
    let start = GridFunction::new(problem.domain, (0..problem.domain.len()).map(|_| rng.gen::<f64>()).collect())?;
    let options = config.solver.unwrap_or_default();
    let gs = ground_state_solve(&problem, &start, &options)?;
    let holds = gs.symmetrizations_monotone() && is_symmetric_decreasing(&gs.u);
    let row = ReportRow::new(trial, gs.energy(), gs.trace[0].energy, holds);
    Ok((row, gs.trace))
}
