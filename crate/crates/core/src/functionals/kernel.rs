use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed forms and tabulated profiles for the Riesz kernels `K(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `exp(-alpha t)`.
    Exp { alpha: f64 },
    /// `(1 + t)^(-p)`.
    Power { p: f64 },
    /// `1` for `t < radius`, else `0`.
    Indicator { radius: f64 },
    /// Samples at `t = k * spacing`, linearly interpolated, constant beyond.
    Table { spacing: f64, samples: Vec<f64> },
}

/// A nonnegative, nonincreasing radial kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kernel {
    spec: KernelSpec,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidKernel(msg.to_string()));
        match &spec {
            KernelSpec::Exp { alpha } if !(alpha.is_finite() && *alpha >= 0.0) => return bad("exp kernel needs alpha >= 0"),
            KernelSpec::Power { p } if !(p.is_finite() && *p >= 0.0) => return bad("power kernel needs p >= 0"),
            KernelSpec::Indicator { radius } if !(radius.is_finite() && *radius >= 0.0) => {
                return bad("indicator kernel needs radius >= 0")
            }
            KernelSpec::Table { spacing, samples } => {
                if !(spacing.is_finite() && *spacing > 0.0) || samples.is_empty() {
                    return bad("table kernel needs spacing > 0 and at least one sample");
                }
                if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
                    return bad("table kernel samples must be finite and nonnegative");
                }
                if samples.windows(2).any(|w| w[1] > w[0]) {
                    return bad("table kernel samples must be nonincreasing");
                }
            }
            _ => {}
        }
        Ok(Self { spec })
    }

    pub fn exp(alpha: f64) -> Result<Self> {
        Self::new(KernelSpec::Exp { alpha })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(KernelSpec::Power { p })
    }

    pub fn indicator(radius: f64) -> Result<Self> {
        Self::new(KernelSpec::Indicator { radius })
    }

    pub fn constant() -> Self {
        Self { spec: KernelSpec::Exp { alpha: 0.0 } }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.spec {
            KernelSpec::Exp { alpha } => (-alpha * t).exp(),
            KernelSpec::Power { p } => (1.0 + t).powf(-p),
            KernelSpec::Indicator { radius } => {
                if t < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSpec::Table { spacing, samples } => {
                let x = t / spacing;
                let last = samples.len() - 1;
                if x >= last as f64 {
                    return samples[last];
                }
                let k = x.floor() as usize;
                let s = x - k as f64;
                samples[k] + s * (samples[k + 1] - samples[k])
            }
        }
    }

    /// Edge of the graph used by the equality analysis.
    pub fn strictly_decreasing(&self) -> bool {
        match &self.spec {
            KernelSpec::Exp { alpha } => *alpha > 0.0,
            KernelSpec::Power { p } => *p > 0.0,
            KernelSpec::Indicator { .. } => false,
            KernelSpec::Table { samples, .. } => samples.windows(2).all(|w| w[1] < w[0]),
        }
    }

    /// `K(t) > 0` for all `t < diameter`.
    pub fn positive_below(&self, diameter: f64) -> bool {
        match &self.spec {
            KernelSpec::Exp { .. } | KernelSpec::Power { .. } => true,
            KernelSpec::Indicator { radius } => *radius >= diameter,
            KernelSpec::Table { spacing, samples } => {
                let needed = (diameter / spacing).ceil() as usize;
                samples.iter().take(needed + 1).all(|&s| s > 0.0) && (needed < samples.len() || samples[samples.len() - 1] > 0.0)
            }
        }
    }
}
