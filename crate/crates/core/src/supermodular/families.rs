use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lemmas::PiecewiseLinear;
use super::table::TabulatedIntegrand;
use crate::error::{Error, Result};

/// A one-variable nondecreasing factor of a product term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Factor {
    /// Samples at the nodes of the corresponding axis.
    Table(Vec<f64>),
    Named(NamedFactor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedFactor {
    Identity,
    Power { p: f64 },
    Min { cap: f64 },
    Step { at: f64 },
}

impl NamedFactor {
    fn eval(&self, y: f64) -> f64 {
        match *self {
            NamedFactor::Identity => y,
            NamedFactor::Power { p } => y.powf(p),
            NamedFactor::Min { cap } => y.min(cap),
            NamedFactor::Step { at } => {
                if y >= at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductTerm {
    pub coef: f64,
    pub factors: Vec<Factor>,
}

/// Convex profile of a `convex_of_sum` integrand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConvexProfile {
    Table { knots: Vec<f64>, values: Vec<f64> },
    Power { power: f64 },
}

/// Generator families for random supermodular tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `sum_k c_k prod_i f_ki(y_i)` with nondecreasing factors, `f_ki(0) = 0`.
    ProductSum,
    /// `Phi(sum_i y_i)` with `Phi` convex and nondecreasing.
    ConvexOfSum,
    /// `mu([0, y_1) x .. x [0, y_m))` for a random positive cell density.
    MixedDensity,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::ProductSum, Family::ConvexOfSum, Family::MixedDensity];
}

/// JSON description of an integrand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegrandSpec {
    ProductSum {
        axes: Vec<Vec<f64>>,
        terms: Vec<ProductTerm>,
    },
    ConvexOfSum {
        axes: Vec<Vec<f64>>,
        phi: ConvexProfile,
    },
    /// `uvw / ((1+u)(1+v)(1+w)) - (uv + uw + vw)`.
    #[serde(rename = "example_717")]
    Example717 {
        axes: Vec<Vec<f64>>,
    },
    Table {
        #[serde(default)]
        axes: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        values: Option<Vec<f64>>,
        #[serde(default)]
        csv: Option<PathBuf>,
    },
    /// Drawn by [`random_supermodular`]; the seed defaults to the trial seed.
    Random {
        generator: Family,
        m: usize,
        nodes: usize,
        top: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// The closed-form three-variable integrand with `Delta_123 F > 0` but
/// every `Delta_ij F < 0`.
pub fn example_717(y: &[f64]) -> f64 {
    let (u, v, w) = (y[0], y[1], y[2]);
    u * v * w / ((1.0 + u) * (1.0 + v) * (1.0 + w)) - (u * v + u * w + v * w)
}

fn check_convex(profile: &PiecewiseLinear) -> Result<()> {
    let scale = profile.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if profile.is_convex(crate::numeric::scaled_tol(super::table::SIGN_TOL, scale)) {
        Ok(())
    } else {
        Err(Error::InvalidIntegrand("convex_of_sum profile has a negative second difference".into()))
    }
}

impl IntegrandSpec {
    /// Tabulates the integrand; `seed` is used by the `random` family when
    /// no seed is given in the spec.
    pub fn build(&self, trial_seed: u64) -> Result<TabulatedIntegrand> {
        match self {
            IntegrandSpec::ProductSum { axes, terms } => {
                let m = axes.len();
                let mut tables: Vec<(f64, Vec<Vec<f64>>)> = Vec::with_capacity(terms.len());
                for term in terms {
                    if !(term.coef.is_finite() && term.coef >= 0.0) {
                        return Err(Error::InvalidIntegrand(format!("product_sum coefficient must be >= 0, got {}", term.coef)));
                    }
                    if term.factors.len() != m {
                        return Err(Error::Arity { expected: m, got: term.factors.len() });
                    }
                    let mut cols = Vec::with_capacity(m);
                    for (axis, factor) in axes.iter().zip(&term.factors) {
                        let samples: Vec<f64> = match factor {
                            Factor::Table(v) => {
                                if v.len() != axis.len() {
                                    return Err(Error::InvalidIntegrand("factor table length must match its axis".into()));
                                }
                                v.clone()
                            }
                            Factor::Named(f) => axis.iter().map(|&y| f.eval(y)).collect(),
                        };
                        if samples.windows(2).any(|w| w[1] < w[0]) || samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
                            return Err(Error::InvalidIntegrand("product_sum factors must be nonnegative and nondecreasing".into()));
                        }
                        cols.push(samples);
                    }
                    tables.push((term.coef, cols));
                }
                let lookup: Vec<Vec<Vec<f64>>> = tables.iter().map(|t| t.1.clone()).collect();
                let coefs: Vec<f64> = tables.iter().map(|t| t.0).collect();
                let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
                let values = super::table::MultiIndex::new(&shape)
                    .map(|idx| {
                        coefs
                            .iter()
                            .zip(&lookup)
                            .map(|(c, cols)| c * idx.iter().enumerate().map(|(i, &k)| cols[i][k]).product::<f64>())
                            .sum()
                    })
                    .collect();
                TabulatedIntegrand::new(axes.clone(), values)
            }
            IntegrandSpec::ConvexOfSum { axes, phi } => {
                let profile = match phi {
                    ConvexProfile::Table { knots, values } => PiecewiseLinear::new(knots.clone(), values.clone())?,
                    ConvexProfile::Power { power } => {
                        if *power < 1.0 {
                            return Err(Error::InvalidIntegrand("power profile needs exponent >= 1".into()));
                        }
                        let p = *power;
                        return TabulatedIntegrand::from_fn(axes.clone(), |y| y.iter().sum::<f64>().powf(p));
                    }
                };
                check_convex(&profile)?;
                TabulatedIntegrand::from_fn(axes.clone(), |y| profile.eval(y.iter().sum()))
            }
            IntegrandSpec::Example717 { axes } => {
                if axes.len() != 3 {
                    return Err(Error::Arity { expected: 3, got: axes.len() });
                }
                TabulatedIntegrand::from_fn(axes.clone(), example_717)
            }
            IntegrandSpec::Table { axes, values, csv } => match (axes, values, csv) {
                (Some(a), Some(v), None) => TabulatedIntegrand::new(a.clone(), v.clone()),
                (None, None, Some(path)) => TabulatedIntegrand::read_csv(std::fs::File::open(path)?),
                _ => Err(Error::InvalidIntegrand("table needs either axes + values or csv".into())),
            },
            IntegrandSpec::Random { generator, m, nodes, top, seed } => {
                if *m == 0 || *nodes < 2 || !(top.is_finite() && *top > 0.0) {
                    return Err(Error::InvalidIntegrand("random integrand needs m >= 1, nodes >= 2, top > 0".into()));
                }
                let axes = uniform_axes(*m, *nodes, *top);
                Ok(random_supermodular(seed.unwrap_or(trial_seed), *m, &axes, *generator))
            }
        }
    }

    /// Number of variables, when known without building the table.
    pub fn arity(&self) -> Option<usize> {
        match self {
            IntegrandSpec::ProductSum { axes, .. }
            | IntegrandSpec::ConvexOfSum { axes, .. }
            | IntegrandSpec::Example717 { axes } => Some(axes.len()),
            IntegrandSpec::Table { axes, .. } => axes.as_ref().map(Vec::len),
            IntegrandSpec::Random { m, .. } => Some(*m),
        }
    }
}

/// `m` copies of `nodes` equally spaced nodes on `[0, top]`.
pub fn uniform_axes(m: usize, nodes: usize, top: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..nodes).map(|k| top * k as f64 / (nodes - 1) as f64).collect();
    vec![axis; m]
}

/// Random nondecreasing samples on `axis` with value 0 at the origin.
fn random_increasing(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            // Occasional flat steps exercise ties and jumps.
            acc += if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.05..1.0) };
        }
        out.push(acc);
    }
    out
}

/// Seeded random supermodular table on the given axes.
///
/// All three families are nondecreasing in each variable; `product_sum` and
/// `mixed_density` also have every non-repeating difference nonnegative.
pub fn random_supermodular(seed: u64, m: usize, axes: &[Vec<f64>], family: Family) -> TabulatedIntegrand {
    assert_eq!(axes.len(), m, "one axis per variable");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = axes.to_vec();
    match family {
        Family::ProductSum => {
            let terms = rng.gen_range(1..=3);
            let parts: Vec<(f64, Vec<Vec<f64>>)> = (0..terms)
                .map(|_| {
                    let coef = rng.gen_range(0.1..2.0);
                    let factors = axes.iter().map(|a| random_increasing(&mut rng, a.len())).collect();
                    (coef, factors)
                })
                .collect();
            let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
            let values = super::table::MultiIndex::new(&shape)
                .map(|idx| {
                    parts
                        .iter()
                        .map(|(c, f)| c * idx.iter().enumerate().map(|(i, &k)| f[i][k]).product::<f64>())
                        .sum()
                })
                .collect();
            TabulatedIntegrand::new(axes, values).expect("valid generated table")
        }
        Family::ConvexOfSum => {
            let reach: f64 = axes.iter().map(|a| *a.last().unwrap()).sum();
            let pieces = 6;
            let knots: Vec<f64> = (0..=pieces).map(|k| reach * k as f64 / pieces as f64).collect();
            let mut slope = rng.gen_range(0.0..0.5);
            let mut values = vec![0.0];
            for k in 1..=pieces {
                values.push(values[k - 1] + slope * (knots[k] - knots[k - 1]));
                slope += rng.gen_range(0.0..1.0);
            }
            let profile = PiecewiseLinear::new(knots, values).expect("valid profile");
            TabulatedIntegrand::from_fn(axes, |y| profile.eval(y.iter().sum())).expect("valid generated table")
        }
        Family::MixedDensity => {
            let cell_shape: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
            let density: Vec<f64> = super::table::MultiIndex::new(&cell_shape)
                .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..1.0) })
                .collect();
            let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
            // Cumulative sums along each axis turn cell masses into F(y) = mu([0, y)).
            let mut values = vec![0.0; shape.iter().product()];
            let node_strides = {
                let mut s = vec![1usize; m];
                for i in (0..m.saturating_sub(1)).rev() {
                    s[i] = s[i + 1] * shape[i + 1];
                }
                s
            };
            for (cell, mass) in super::table::MultiIndex::new(&cell_shape).zip(&density) {
                let vol: f64 = cell.iter().enumerate().map(|(i, &k)| axes[i][k + 1] - axes[i][k]).product();
                let upper: usize = cell.iter().zip(&node_strides).map(|(k, s)| (k + 1) * s).sum();
                values[upper] += mass * vol;
            }
            for i in 0..m {
                for idx in super::table::MultiIndex::new(&shape) {
                    if idx[i] > 0 {
                        let here: usize = idx.iter().zip(&node_strides).map(|(k, s)| k * s).sum();
                        values[here] += values[here - node_strides[i]];
                    }
                }
            }
            TabulatedIntegrand::new(axes, values).expect("valid generated table")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supermodular::checks::{check_nonnegative_difference, has_nonnegative_mixed_differences, is_nondecreasing, is_supermodular};
    use crate::supermodular::table::finite_difference;

    #[test]
    fn generated_families_are_supermodular() {
        for seed in 0..20 {
            for m in 1..=4 {
                let axes = uniform_axes(m, 5, 3.0);
                for family in Family::ALL {
                    let t = random_supermodular(seed, m, &axes, family);
                    assert!(is_supermodular(&t).holds, "{family:?} seed {seed} m {m}");
                    assert!(is_nondecreasing(&t).holds, "{family:?} seed {seed} m {m}");
                }
                let t = random_supermodular(seed, m, &axes, Family::MixedDensity);
                assert!(has_nonnegative_mixed_differences(&t).holds);
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let axes = uniform_axes(3, 4, 2.0);
        for family in Family::ALL {
            assert_eq!(random_supermodular(9, 3, &axes, family), random_supermodular(9, 3, &axes, family));
        }
    }

    #[test]
    fn squared_sum_has_mixed_difference_2hk() {
        let spec: IntegrandSpec = serde_json::from_str(
            r#"{"family":"convex_of_sum","axes":[[0,0.5,1,2],[0,1,3]],"phi":{"power":2.0}}"#,
        )
        .unwrap();
        let t = spec.build(0).unwrap();
        let d = finite_difference(&t, &[0, 1], &[0.5, 1.0], &[0.5, 2.0]).unwrap();
        assert!((d - 2.0 * 0.5 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn example_717_sign_pattern_at_origin() {
        let spec = IntegrandSpec::Example717 { axes: vec![vec![0.0, 1.0]; 3] };
        let t = spec.build(0).unwrap();
        assert_eq!(finite_difference(&t, &[0, 1], &[0.0; 3], &[1.0, 1.0]).unwrap(), -1.0);
        let d123 = finite_difference(&t, &[0, 1, 2], &[0.0; 3], &[1.0, 1.0, 1.0]).unwrap();
        assert!((d123 - 0.125).abs() < 1e-15);
        assert!(!is_supermodular(&t).holds);
        assert!(check_nonnegative_difference(&t, &[0, 1, 2]).holds);
    }

    #[test]
    fn product_sum_spec_with_named_factors() {
        let spec: IntegrandSpec = serde_json::from_str(
            r#"{"family":"product_sum","axes":[[0,1,2],[0,1,2]],
                "terms":[{"coef":1.0,"factors":[{"fn":"identity"},{"fn":"identity"}]},
                         {"coef":0.5,"factors":[[0,1,1],{"fn":"min","cap":1.0}]}]}"#,
        )
        .unwrap();
        let t = spec.build(0).unwrap();
        assert_eq!(t.eval(&[2.0, 2.0]), 4.5);
        assert!(is_supermodular(&t).holds);
    }

    #[test]
    fn specs_reject_invalid_input() {
        let bad_coef: IntegrandSpec = serde_json::from_str(
            r#"{"family":"product_sum","axes":[[0,1]],"terms":[{"coef":-1.0,"factors":[{"fn":"identity"}]}]}"#,
        )
        .unwrap();
        assert!(bad_coef.build(0).is_err());
        let concave: IntegrandSpec = serde_json::from_str(
            r#"{"family":"convex_of_sum","axes":[[0,1],[0,1]],"phi":{"knots":[0,1,2],"values":[0,2,3]}}"#,
        )
        .unwrap();
        assert!(concave.build(0).is_err());
        assert!(serde_json::from_str::<IntegrandSpec>(r#"{"family":"table","axes":[[0,1]],"values":[0,1],"extra":1}"#).is_err());
        assert!(serde_json::from_str::<IntegrandSpec>(r#"{"family":"example_717","axes":[[0,1]]}"#).unwrap().build(0).is_err());
    }

    #[test]
    fn random_spec_uses_trial_seed_when_unseeded() {
        let spec: IntegrandSpec = serde_json::from_str(r#"{"family":"random","generator":"mixed_density","m":2,"nodes":4,"top":2.0}"#).unwrap();
        assert_eq!(spec.build(3).unwrap(), spec.build(3).unwrap());
        assert_ne!(spec.build(3).unwrap(), spec.build(4).unwrap());
    }
}
