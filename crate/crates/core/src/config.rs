//! Run configuration shared by the command line and the test suites.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremals::{SolverOptions, WaveguideProblem};
use crate::functionals::{Kernel, KernelSpec};
use crate::measure::{Domain, DomainKind, GridFunction};
use crate::supermodular::{Family, IntegrandSpec};

/// Which verification a run performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Hl,
    Riesz,
    TwoPoint,
    Oracle,
    CounterexampleRiesz,
    BmCheck,
    Optics,
    Rearrange,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Hl => "hl",
            SuiteKind::Riesz => "riesz",
            SuiteKind::TwoPoint => "two-point",
            SuiteKind::Oracle => "oracle",
            SuiteKind::CounterexampleRiesz => "counterexample-riesz",
            SuiteKind::BmCheck => "bm-check",
            SuiteKind::Optics => "optics",
            SuiteKind::Rearrange => "rearrange",
        }
    }
}

/// Functional compared by the two-point suite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    #[default]
    Hl,
    Riesz,
}

/// Generator for one input function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `height` on cells whose centers lie strictly within `radius` of `center`.
    Indicator {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        height: f64,
    },
    /// `height * exp(-|x - center|^2 / width^2)`.
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
        #[serde(default = "one")]
        height: f64,
    },
    /// Random blocks of constant height in `[0, max]`, drawn per trial.
    RandomStep {
        #[serde(default)]
        max: Option<f64>,
        #[serde(default)]
        blocks: Option<usize>,
    },
    /// Explicit cell values.
    Values { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    /// Builds the function; `default_max` bounds random values when the spec
    /// does not.
    pub fn build(&self, domain: Domain, rng: &mut ChaCha8Rng, default_max: f64) -> Result<GridFunction> {
        let dist2 = |p: [f64; 2], center: &[f64]| -> f64 {
            let c = |i: usize| center.get(i).copied().unwrap_or(0.0);
            let dy = if domain.kind() == DomainKind::Square { p[1] - c(1) } else { 0.0 };
            (p[0] - c(0)).powi(2) + dy * dy
        };
        match self {
            FunctionSpec::Indicator { center, radius, height } => {
                GridFunction::from_fn(domain, |p| if dist2(p, center) < radius * radius { *height } else { 0.0 })
            }
            FunctionSpec::Gaussian { center, width, height } => {
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::Config("gaussian width must be positive".into()));
                }
                GridFunction::from_fn(domain, |p| height * (-dist2(p, center) / (width * width)).exp())
            }
            FunctionSpec::RandomStep { max, blocks } => {
                let max = max.unwrap_or(default_max);
                let len = domain.len();
                let blocks = blocks.unwrap_or_else(|| rng.gen_range(1..=8)).clamp(1, len);
                let mut cuts: Vec<usize> = (0..blocks - 1).map(|_| rng.gen_range(1..len)).collect();
                cuts.push(0);
                cuts.push(len);
                cuts.sort_unstable();
                let mut values = vec![0.0; len];
                for w in cuts.windows(2) {
                    let v = if rng.gen_bool(0.25) { 0.0 } else { rng.gen::<f64>() * max };
                    values[w[0]..w[1]].iter_mut().for_each(|x| *x = v);
                }
                GridFunction::new(domain, values)
            }
            FunctionSpec::Values { values } => GridFunction::new(domain, values.clone()),
        }
    }
}

/// Report serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `csv` for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<Format>,
}

impl OutputSpec {
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| Format::from_path(&self.path))
    }
}

/// A complete run description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: SuiteKind,
    #[serde(default)]
    pub domain: Option<Domain>,
    /// Drawn per trial from all random families when absent.
    #[serde(default)]
    pub integrand: Option<IntegrandSpec>,
    /// Number of functions when no integrand is given.
    #[serde(default)]
    pub m: Option<usize>,
    /// One generator per argument; random steps when empty.
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    /// `K_12, K_13, ..., K_23, ...`; random closed forms when empty.
    #[serde(default)]
    pub kernels: Vec<KernelSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Two-point suite: which functional to compare.
    #[serde(default)]
    pub functional: FunctionalKind,
    /// Oracle suite: atoms per list.
    #[serde(default)]
    pub atoms: Option<usize>,
    /// Counterexample suite: indicator half-width.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Brunn-Minkowski suite: largest set size.
    #[serde(default)]
    pub max_size: Option<usize>,
    /// Polarization suite: accepted-step budget.
    #[serde(default)]
    pub budget: Option<usize>,
    /// Polarization suite: relative L1 target.
    #[serde(default)]
    pub target: Option<f64>,
    /// Optics suite: fixed problem; drawn per trial when absent.
    #[serde(default)]
    pub problem: Option<WaveguideProblem>,
    #[serde(default)]
    pub solver: Option<SolverOptions>,
    /// Optics suite: CSV file receiving the energy traces.
    #[serde(default)]
    pub trace: Option<PathBuf>,
}

fn default_trials() -> usize {
    10
}

fn default_tol() -> f64 {
    1e-9
}

impl RunConfig {
    /// Defaults for every optional field.
    pub fn new(suite: SuiteKind) -> Self {
        Self {
            suite,
            domain: None,
            integrand: None,
            m: None,
            functions: Vec::new(),
            kernels: Vec::new(),
            trials: default_trials(),
            seed: 0,
            tol: default_tol(),
            output: None,
            functional: FunctionalKind::default(),
            atoms: None,
            eps: None,
            max_size: None,
            budget: None,
            target: None,
            problem: None,
            solver: None,
            trace: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::Config(format!("tol must be finite and nonnegative, got {}", self.tol)));
        }
        if let Some(m) = self.m {
            if m == 0 {
                return Err(Error::Config("m must be at least 1".into()));
            }
        }
        if let (Some(a), Some(m)) = (self.integrand.as_ref().and_then(IntegrandSpec::arity), self.m) {
            if a != m {
                return Err(Error::Config(format!("integrand has {a} arguments but m = {m}")));
            }
        }
        for k in &self.kernels {
            Kernel::new(k.clone())?;
        }
        Ok(())
    }

    pub fn domain_or(&self, fallback: Domain) -> Domain {
        self.domain.unwrap_or(fallback)
    }

    /// Arity from the integrand, `m`, the function list, or 2.
    pub fn arity(&self) -> usize {
        self.integrand
            .as_ref()
            .and_then(IntegrandSpec::arity)
            .or(self.m)
            .or((!self.functions.is_empty()).then_some(self.functions.len()))
            .unwrap_or(2)
    }

    /// Integrand of a trial: the configured one, or a random table cycling
    /// through the generator families.
    pub fn integrand_for(&self, trial: usize, rng: &mut ChaCha8Rng) -> Result<crate::supermodular::TabulatedIntegrand> {
        let seed = rng.gen::<u64>();
        match &self.integrand {
            Some(spec) => spec.build(seed),
            None => IntegrandSpec::Random {
                generator: Family::ALL[trial % Family::ALL.len()],
                m: self.arity(),
                nodes: 9,
                top: 1.0,
                seed: Some(seed),
            }
            .build(seed),
        }
    }

    /// Input functions of a trial.
    pub fn functions_for(&self, domain: Domain, m: usize, tops: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<GridFunction>> {
        if !self.functions.is_empty() && self.functions.len() != m {
            return Err(Error::Config(format!("{} function generators given for {m} arguments", self.functions.len())));
        }
        (0..m)
            .map(|i| {
                let default = FunctionSpec::RandomStep { max: None, blocks: None };
                let spec = self.functions.get(i).unwrap_or(&default);
                spec.build(domain, rng, tops[i])
            })
            .collect()
    }

    /// Kernels of a trial: the configured ones, or one random closed form
    /// per pair.
    pub fn kernels_for(&self, m: usize, domain: &Domain, trial: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Kernel>> {
        let pairs = m * (m - 1) / 2;
        if !self.kernels.is_empty() {
            if self.kernels.len() != pairs {
                return Err(Error::Config(format!("{} kernels given for {pairs} pairs", self.kernels.len())));
            }
            return self.kernels.iter().cloned().map(Kernel::new).collect();
        }
        let diam = domain.diameter();
        (0..pairs)
            .map(|p| {
                let spec = match (trial + p) % 3 {
                    0 => KernelSpec::Exp { alpha: rng.gen_range(0.2..4.0) / diam },
                    1 => KernelSpec::Power { p: rng.gen_range(0.5..3.0) },
                    _ => KernelSpec::Indicator { radius: rng.gen_range(0.1..0.9) * diam },
                };
                Kernel::new(spec)
            })
            .collect()
    }
}

/// Generator for trial `trial` of a run seeded with `seed`: one ChaCha8
/// stream per trial, so trials are independent of scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}
