//! Nonincreasing, symmetric decreasing and two-point rearrangements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{enumerate_reflections, Atom, DomainKind, GridFunction, Reflection, StepFunction};

/// `u^#`: atoms sorted by value, descending, with equal values merged.
pub fn decreasing_rearrangement(u: &StepFunction) -> StepFunction {
    let mut atoms: Vec<Atom> = u.atoms().to_vec();
    atoms.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.value == a.value => last.measure += a.measure,
            _ => merged.push(a),
        }
    }
    StepFunction::from_valid(merged)
}

/// `u*`: the values of `u` sorted descending and laid out along the
/// distance order of the domain (ties by cell index).
pub fn symmetric_decreasing_rearrangement(u: &GridFunction) -> GridFunction {
    let domain = *u.domain();
    let sorted = u.sorted_values();
    let mut out = vec![0.0; u.len()];
    for (cell, v) in domain.distance_order().into_iter().zip(sorted) {
        out[cell] = v;
    }
    GridFunction::from_valid(domain, out)
}

fn polarized_values(values: &[f64], sigma: &Reflection) -> Vec<f64> {
    let mut out = values.to_vec();
    for (x, sx) in sigma.pairs() {
        let (a, b) = (values[x], values[sx]);
        out[x] = a.max(b);
        out[sx] = a.min(b);
    }
    out
}

/// Two-point rearrangement `u^sigma`: the larger of `u(x), u(sigma x)` on
/// `H+`, the smaller on `H-`, unchanged on `H0`.
pub fn polarize(u: &GridFunction, sigma: &Reflection) -> Result<GridFunction> {
    if !sigma.belongs_to(u.domain()) {
        return Err(Error::DomainMismatch(format!(
            "reflection {} does not act on {:?}",
            sigma.describe(),
            u.domain()
        )));
    }
    Ok(GridFunction::from_valid(*u.domain(), polarized_values(u.values(), sigma)))
}

/// Tunables for [`polarization_sequence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationOptions {
    /// Maximum number of accepted steps.
    pub budget: usize,
    /// Stop once `sum ||u_i - u_i*||_1 <= tol * sum ||u_i||_1`.
    pub tol: f64,
    pub seed: u64,
    /// Consecutive random rejections before falling back to a full sweep.
    pub max_rejections: usize,
}

impl Default for PolarizationOptions {
    fn default() -> Self {
        Self { budget: 10_000, tol: 1e-3, seed: 0, max_rejections: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationStep {
    pub step: usize,
    pub reflection_id: usize,
    /// `||u_i - u_i*||_1` for each function after this step.
    pub l1_to_star: Vec<f64>,
    pub functional: Option<f64>,
}

impl PolarizationStep {
    pub fn total_l1(&self) -> f64 {
        self.l1_to_star.iter().sum()
    }
}

/// Record of the accepted steps of a polarization sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationTrace {
    pub initial_l1: Vec<f64>,
    pub initial_functional: Option<f64>,
    pub steps: Vec<PolarizationStep>,
    /// Whether the tolerance was reached.
    pub converged: bool,
}

impl PolarizationTrace {
    pub fn accepted(&self) -> usize {
        self.steps.len()
    }

    pub fn final_l1(&self) -> f64 {
        self.steps.last().map_or_else(|| self.initial_l1.iter().sum(), |s| s.total_l1())
    }
}

fn l1_each(values: &[Vec<f64>], stars: &[GridFunction]) -> Vec<f64> {
    values
        .iter()
        .zip(stars)
        .map(|(v, s)| {
            let h = s.domain().cell_measure();
            crate::numeric::compensated_sum(v.iter().zip(s.values()).map(|(a, b)| (a - b).abs())) * h
        })
        .collect()
}

/// Functional tracked along a polarization sequence.
pub type Objective<'a> = &'a dyn Fn(&[GridFunction]) -> f64;

/// Drives `us` toward their symmetric decreasing rearrangements by
/// polarizing all of them with one common reflection per step.
///
/// Random reflections are proposed and accepted only when they strictly
/// decrease `sum_i ||u_i - u_i*||_1`; after `max_rejections` consecutive
/// rejections the whole family is swept and the best improving reflection
/// is taken. The run stops at the tolerance, at the budget, or when no
/// reflection improves. `functional`, when given, is evaluated on the
/// initial functions and after every accepted step.
pub fn polarization_sequence(
    us: &[GridFunction],
    opts: &PolarizationOptions,
    functional: Option<Objective<'_>>,
) -> Result<(Vec<GridFunction>, PolarizationTrace)> {
    let first = us.first().ok_or_else(|| Error::InvalidArgument("polarization needs at least one function".into()))?;
    for u in &us[1..] {
        first.ensure_same_domain(u)?;
    }
    let domain = *first.domain();
    let stars: Vec<GridFunction> = us.iter().map(symmetric_decreasing_rearrangement).collect();
    let target = opts.tol * us.iter().map(GridFunction::l1_norm).sum::<f64>();
    let reflections = enumerate_reflections(&domain);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut current: Vec<Vec<f64>> = us.iter().map(|u| u.values().to_vec()).collect();
    let wrap = |vals: &[Vec<f64>]| -> Vec<GridFunction> {
        vals.iter().map(|v| GridFunction::from_valid(domain, v.clone())).collect()
    };
    let initial_l1 = l1_each(&current, &stars);
    let mut dist: f64 = initial_l1.iter().sum();
    let initial_functional = functional.map(|f| f(us));
    let mut steps = Vec::new();
    let mut rejections = 0usize;

    let propose = |vals: &[Vec<f64>], r: &Reflection| -> (Vec<Vec<f64>>, Vec<f64>) {
        let next: Vec<Vec<f64>> = vals.iter().map(|v| polarized_values(v, r)).collect();
        let each = l1_each(&next, &stars);
        (next, each)
    };

    while dist > target && steps.len() < opts.budget && !reflections.is_empty() {
        let chosen = if rejections < opts.max_rejections {
            let r = &reflections[rng.gen_range(0..reflections.len())];
            let (next, each) = propose(&current, r);
            if each.iter().sum::<f64>() < dist {
                rejections = 0;
                Some((r.id(), next, each))
            } else {
                rejections += 1;
                continue;
            }
        } else {
            rejections = 0;
            let mut best: Option<(usize, Vec<Vec<f64>>, Vec<f64>)> = None;
            for r in &reflections {
                let (next, each) = propose(&current, r);
                let total: f64 = each.iter().sum();
                let better = match &best {
                    Some((_, _, b)) => total < b.iter().sum::<f64>(),
                    None => total < dist,
                };
                if better {
                    best = Some((r.id(), next, each));
                }
            }
            best
        };
        let Some((id, next, each)) = chosen else {
            break;
        };
        current = next;
        dist = each.iter().sum();
        let value = functional.map(|f| f(&wrap(&current)));
        steps.push(PolarizationStep { step: steps.len() + 1, reflection_id: id, l1_to_star: each, functional: value });
    }

    let trace = PolarizationTrace { initial_l1, initial_functional, steps, converged: dist <= target };
    Ok((wrap(&current), trace))
}

/// Fixed point test for every enumerated reflection: `u = u^sigma` for all
/// `sigma`.
///
/// On the interval and the circle the reflection family separates every
/// pair of cells at different distances from `x*`, so this agrees with
/// [`is_radially_ordered`]. On the square only axis-aligned mirrors are
/// available and the test is weaker.
pub fn is_symmetric_decreasing(u: &GridFunction) -> bool {
    enumerate_reflections(u.domain()).iter().all(|r| is_fixed_by(u, r))
}

/// Direct check that `u` equals its symmetric decreasing rearrangement.
pub fn is_radially_ordered(u: &GridFunction) -> bool {
    let v = u.values();
    u.domain().distance_order().windows(2).all(|w| v[w[0]] >= v[w[1]])
}

/// Result of [`is_translated_radial`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslatedRadial {
    pub radial: bool,
    /// Shift `s` with `u(i) = u*(i - s)` (cyclic on the circle).
    pub shift: Option<i64>,
}

/// Tests whether, for every reflection, `u = u^sigma` or `u = u^sigma o sigma`,
/// and looks for the translation aligning `u` with `u*`.
///
/// Functions are extended by zero outside a bounded domain, so the second
/// alternative also requires `u` to vanish on unpaired cells of `H+`.
pub fn is_translated_radial(u: &GridFunction) -> Result<TranslatedRadial> {
    let domain = u.domain();
    if domain.kind() == DomainKind::Square {
        return Err(Error::InvalidArgument("translation test is defined on the interval and the circle".into()));
    }
    let v = u.values();
    let radial = enumerate_reflections(domain).iter().all(|r| {
        let fixed = r.pairs().all(|(x, sx)| v[x] >= v[sx]);
        let flipped = r.pairs().all(|(x, sx)| v[x] <= v[sx]) && r.unpaired().all(|x| v[x] == 0.0);
        fixed || flipped
    });
    let shift = if radial { find_shift(u) } else { None };
    Ok(TranslatedRadial { radial, shift })
}

fn find_shift(u: &GridFunction) -> Option<i64> {
    let star = symmetric_decreasing_rearrangement(u);
    let (v, s) = (u.values(), star.values());
    let n = v.len() as i64;
    let circle = u.domain().kind() == DomainKind::Circle;
    let matches = |shift: i64| -> bool {
        if circle {
            (0..n).all(|i| v[i as usize] == s[(i - shift).rem_euclid(n) as usize])
        } else {
            let at = |i: i64| if (0..n).contains(&i) { s[i as usize] } else { 0.0 };
            (0..n).all(|i| v[i as usize] == at(i - shift)) && (0..n).all(|j| (0..n).contains(&(j + shift)) || s[j as usize] == 0.0)
        }
    };
    let range = if circle { n } else { 2 * n - 1 };
    (0..range)
        .map(|k| if k % 2 == 0 { k / 2 } else { -(k / 2) - 1 })
        .map(|s| if circle { s.rem_euclid(n) } else { s })
        .find(|&s| matches(s))
}

/// `true` when `sigma` leaves `u` unchanged.
pub fn is_fixed_by(u: &GridFunction, sigma: &Reflection) -> bool {
    let v = u.values();
    sigma.pairs().all(|(x, sx)| v[x] >= v[sx])
}
