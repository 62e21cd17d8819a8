use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{DomainKind, GridFunction};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::rearrange::symmetric_decreasing_rearrangement;
use crate::supermodular::{MultiIndex, TabulatedIntegrand};

use super::hl::{check_inputs, require_supermodular};
use super::kernel::Kernel;
use super::report::{ReportMeta, VerificationReport};

/// Index pairs `(i, j)`, `i < j`, in the order kernels are supplied.
pub fn kernel_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

/// `sum_{x_1..x_m} F(u_1(x_1), ..., u_m(x_m)) prod_{i<j} K_ij(d(x_i, x_j)) |cell|^m`.
///
/// Kernels are listed as `K_12, K_13, ..., K_1m, K_23, ...`. The outermost
/// coordinate is split across threads and the per-slice partials are
/// summed in index order, so the result does not depend on the pool size.
pub fn riesz_functional(f: &TabulatedIntegrand, us: &[GridFunction], kernels: &[Kernel]) -> Result<f64> {
    check_inputs(f, us)?;
    let m = us.len();
    let pairs = kernel_pairs(m);
    if kernels.len() != pairs.len() {
        return Err(Error::Arity { expected: pairs.len(), got: kernels.len() });
    }
    let domain = *us[0].domain();
    let n = domain.len();
    let kmats: Vec<Vec<f64>> = kernels
        .iter()
        .map(|k| {
            let mut mat = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    mat[a * n + b] = k.eval(domain.distance(a, b));
                }
            }
            mat
        })
        .collect();
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x1| {
            let mut cells = vec![x1; m];
            let mut y = vec![0.0; m];
            y[0] = us[0].values()[x1];
            let mut acc = CompensatedSum::new();
            for rest in MultiIndex::new(&vec![n; m - 1]) {
                cells[1..].copy_from_slice(&rest);
                let mut weight = 1.0;
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    weight *= kmats[p][cells[i] * n + cells[j]];
                    if weight == 0.0 {
                        break;
                    }
                }
                if weight == 0.0 {
                    continue;
                }
                for i in 1..m {
                    y[i] = us[i].values()[cells[i]];
                }
                acc.add(f.eval(&y) * weight);
            }
            acc.total()
        })
        .collect();
    Ok(compensated_sum(partials) * domain.cell_measure().powi(m as i32))
}

/// `sum_{x, x'} F(u(x), v(x'), w(x - x')) |cell|^2`.
///
/// On the circle `x - x'` is taken modulo the circumference. On the
/// interval `w` is read on the line: linearly interpolated between cell
/// centers and zero outside the domain.
pub fn riesz_convolution_functional(f: &TabulatedIntegrand, u: &GridFunction, v: &GridFunction, w: &GridFunction) -> Result<f64> {
    if f.arity() != 3 {
        return Err(Error::Arity { expected: 3, got: f.arity() });
    }
    u.ensure_same_domain(v)?;
    u.ensure_same_domain(w)?;
    let domain = *u.domain();
    let n = domain.n();
    let wv = w.values();
    let w_at_difference: Box<dyn Fn(usize, usize) -> f64 + Sync> = match domain.kind() {
        DomainKind::Circle => Box::new(move |x, xp| wv[(x + n - xp) % n]),
        DomainKind::Interval => {
            // Difference in half-cell units; cell k sits at 2k + 1 - n.
            let sample = move |k: i64| if (0..n as i64).contains(&k) { wv[k as usize] } else { 0.0 };
            Box::new(move |x, xp| {
                let q = 2 * (x as i64 - xp as i64) + n as i64 - 1;
                if q % 2 == 0 {
                    sample(q / 2)
                } else {
                    0.5 * (sample((q - 1) / 2) + sample((q + 1) / 2))
                }
            })
        }
        DomainKind::Square => {
            return Err(Error::InvalidDomain("the convolution form is defined on the interval and the circle".into()))
        }
    };
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = CompensatedSum::new();
            for xp in 0..n {
                acc.add(f.eval(&[u.values()[x], v.values()[xp], w_at_difference(x, xp)]));
            }
            acc.total()
        })
        .collect();
    Ok(compensated_sum(partials) * domain.cell_measure().powi(2))
}

/// `true` when `F` vanishes as soon as one coordinate is zero, checked at
/// the table nodes.
pub fn vanishes_on_axes(f: &TabulatedIntegrand, tol: f64) -> bool {
    let scale = tol * (1.0 + f.max_abs());
    f.indices().filter(|idx| idx.contains(&0)).all(|idx| f.at(&idx).abs() <= scale)
}

/// Functions on a bounded domain are compared with functions on the whole
/// lattice extended by zero; that comparison is only faithful when `F`
/// vanishes on the coordinate hyperplanes. The circle has no boundary.
pub(crate) fn require_riesz_domain(f: &TabulatedIntegrand, us: &[GridFunction]) -> Result<()> {
    if us[0].domain().kind() != DomainKind::Circle && !vanishes_on_axes(f, 1e-12) {
        return Err(Error::Precondition(
            "on a bounded domain the Riesz integrand must vanish whenever one argument is zero".into(),
        ));
    }
    Ok(())
}

/// Checks `I(u_1, ..., u_m) <= I(u_1*, ..., u_m*)` for the Riesz functional.
pub fn verify_riesz(f: &TabulatedIntegrand, us: &[GridFunction], kernels: &[Kernel], tol: f64) -> Result<VerificationReport> {
    check_inputs(f, us)?;
    require_supermodular(f)?;
    require_riesz_domain(f, us)?;
    let stars: Vec<GridFunction> = us.iter().map(symmetric_decreasing_rearrangement).collect();
    let lhs = riesz_functional(f, us, kernels)?;
    let rhs = riesz_functional(f, &stars, kernels)?;
    let meta = ReportMeta { sizes: us.iter().map(GridFunction::len).collect(), ..ReportMeta::default() };
    Ok(VerificationReport::new(lhs, rhs, tol).with_meta(meta))
}
