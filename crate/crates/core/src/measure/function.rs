use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};

fn check_value(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFunction(format!("{what} must be finite and nonnegative, got {v}")))
    }
}

/// Nonnegative function sampled once per cell of a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    domain: Domain,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidFunction(format!(
                "expected {} cell values, got {}",
                domain.len(),
                values.len()
            )));
        }
        for &v in &values {
            check_value(v, "cell value")?;
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: Domain) -> Self {
        Self { values: vec![0.0; domain.len()], domain }
    }

    pub fn constant(domain: Domain, c: f64) -> Result<Self> {
        Self::new(domain, vec![c; domain.len()])
    }

    /// Builds a function from a closure of the cell center position.
    pub fn from_fn(domain: Domain, mut f: impl FnMut([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..domain.len()).map(|c| f(domain.position(c))).collect();
        Self::new(domain, values)
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_valid(domain: Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        crate::numeric::compensated_sum(self.values.iter().copied()) * self.domain.cell_measure()
    }

    pub fn l2_norm(&self) -> f64 {
        (crate::numeric::compensated_sum(self.values.iter().map(|v| v * v)) * self.domain.cell_measure()).sqrt()
    }

    /// `L^1` distance to another function on the same domain.
    pub fn l1_distance(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_domain(other)?;
        let s = crate::numeric::compensated_sum(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()));
        Ok(s * self.domain.cell_measure())
    }

    pub fn ensure_same_domain(&self, other: &GridFunction) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("{:?} vs {:?}", self.domain, other.domain)))
        }
    }

    /// The same values read as equal-measure atoms.
    pub fn to_step(&self) -> StepFunction {
        let m = self.domain.cell_measure();
        StepFunction { atoms: self.values.iter().map(|&value| Atom { value, measure: m }).collect() }
    }

    /// Value multiset, sorted descending.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// One atom `(value, measure)` of a step function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub measure: f64,
}

impl Atom {
    pub fn new(value: f64, measure: f64) -> Self {
        Self { value, measure }
    }
}

/// A simple function on an abstract finite measure space, listed atom by atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    atoms: Vec<Atom>,
}

impl StepFunction {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidFunction("step function needs at least one atom".into()));
        }
        for a in &atoms {
            check_value(a.value, "atom value")?;
            if !(a.measure.is_finite() && a.measure > 0.0) {
                return Err(Error::InvalidFunction(format!("atom measure must be positive, got {}", a.measure)));
            }
        }
        Ok(Self { atoms })
    }

    /// Convenience constructor from `(value, measure)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(v, m)| Atom::new(v, m)).collect())
    }

    /// Equal-measure atoms, one per value.
    pub fn uniform(values: &[f64], measure: f64) -> Result<Self> {
        Self::new(values.iter().map(|&v| Atom::new(v, measure)).collect())
    }

    pub(crate) fn from_valid(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_measure(&self) -> f64 {
        crate::numeric::compensated_sum(self.atoms.iter().map(|a| a.measure))
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|a| (a.value, a.measure)).collect()
    }
}

/// Right-continuous nonincreasing map `t -> measure{u > t}`.
///
/// `below` is the total measure, the value of `rho` left of the first
/// breakpoint. Breakpoint `(t_k, r_k)` means `rho = r_k` on `[t_k, t_{k+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionFunction {
    pub below: f64,
    pub breakpoints: Vec<(f64, f64)>,
}

impl DistributionFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&(tk, _)| tk <= t);
        if k == 0 {
            self.below
        } else {
            self.breakpoints[k - 1].1
        }
    }

    pub fn total_measure(&self) -> f64 {
        self.below
    }
}

fn distribution_of_atoms(mut atoms: Vec<(f64, f64)>) -> DistributionFunction {
    // Ascending by value; rho just right of value v is the mass strictly above v.
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = crate::numeric::compensated_sum(atoms.iter().map(|a| a.1));
    let mut breakpoints = Vec::new();
    let mut i = 0;
    while i < atoms.len() {
        let v = atoms[i].0;
        let mut j = i;
        while j < atoms.len() && atoms[j].0 == v {
            j += 1;
        }
        let above = crate::numeric::compensated_sum(atoms[j..].iter().map(|a| a.1));
        breakpoints.push((v, above));
        i = j;
    }
    DistributionFunction { below: total, breakpoints }
}

/// Anything with a distribution function.
pub trait Distributed {
    fn distribution(&self) -> DistributionFunction;
}

impl Distributed for StepFunction {
    fn distribution(&self) -> DistributionFunction {
        distribution_of_atoms(self.pairs())
    }
}

impl Distributed for GridFunction {
    /// Measures are computed as cell counts times the cell measure, so two
    /// grid functions with the same value multiset get identical results.
    fn distribution(&self) -> DistributionFunction {
        let h = self.domain.cell_measure();
        let mut vals = self.values.clone();
        vals.sort_by(|a, b| a.total_cmp(b));
        let n = vals.len();
        let mut breakpoints = Vec::new();
        let mut i = 0;
        while i < n {
            let v = vals[i];
            let mut j = i;
            while j < n && vals[j] == v {
                j += 1;
            }
            breakpoints.push((v, (n - j) as f64 * h));
            i = j;
        }
        DistributionFunction { below: n as f64 * h, breakpoints }
    }
}

/// Distribution function `rho(t) = measure{u > t}`.
pub fn distribution<U: Distributed + ?Sized>(u: &U) -> DistributionFunction {
    u.distribution()
}
