//! Shared inputs for the benchmarks.

use rearrkit_core::config::trial_rng;
use rearrkit_core::supermodular::{random_supermodular, uniform_axes, Family};
use rearrkit_core::{Domain, FunctionSpec, GridFunction, TabulatedIntegrand};

/// Random step function on `domain`, deterministic in `seed`.
pub fn random_function(domain: Domain, seed: u64) -> GridFunction {
    FunctionSpec::RandomStep { max: Some(1.0), blocks: Some(16) }
        .build(domain, &mut trial_rng(seed, 0), 1.0)
        .expect("random step functions are valid")
}

/// `m` random functions on the interval with `n` cells.
pub fn random_functions(m: usize, n: usize, seed: u64) -> Vec<GridFunction> {
    let domain = Domain::interval(1.0, n).expect("valid domain");
    (0..m).map(|i| random_function(domain, seed + i as u64)).collect()
}

/// Random `product_sum` integrand of `m` variables on `nodes` nodes per axis.
pub fn integrand(m: usize, nodes: usize, seed: u64) -> TabulatedIntegrand {
    random_supermodular(seed, m, &uniform_axes(m, nodes, 1.0), Family::ProductSum)
}
