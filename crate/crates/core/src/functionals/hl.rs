use crate::error::{Error, Result};
use crate::measure::{GridFunction, StepFunction};
use crate::numeric::CompensatedSum;
use crate::rearrange::{decreasing_rearrangement, symmetric_decreasing_rearrangement};
use crate::supermodular::{is_supermodular, TabulatedIntegrand};

use super::report::{ReportMeta, VerificationReport};

pub(crate) fn check_inputs(f: &TabulatedIntegrand, us: &[GridFunction]) -> Result<()> {
    if us.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: us.len() });
    }
    for u in &us[1..] {
        us[0].ensure_same_domain(u)?;
    }
    Ok(())
}

pub(crate) fn require_supermodular(f: &TabulatedIntegrand) -> Result<()> {
    let check = is_supermodular(f);
    if !check.holds {
        let w = check.witness.expect("a failed check carries a witness");
        return Err(Error::Precondition(format!(
            "integrand is not supermodular: Delta{:?} = {} at node {:?}",
            w.indices, w.value, w.base
        )));
    }
    Ok(())
}

/// `sum_x F(u_1(x), ..., u_m(x)) * |cell|`, summed in cell order.
pub fn hl_functional(f: &TabulatedIntegrand, us: &[GridFunction]) -> Result<f64> {
    check_inputs(f, us)?;
    let len = us[0].len();
    let mut y = vec![0.0; us.len()];
    let mut acc = CompensatedSum::new();
    for x in 0..len {
        for (yi, u) in y.iter_mut().zip(us) {
            *yi = u.values()[x];
        }
        acc.add(f.eval(&y));
    }
    Ok(acc.total() * us[0].domain().cell_measure())
}

/// `int_0^mu F(u_1^#(s), ..., u_m^#(s)) ds`, integrated exactly over the
/// common refinement of the atom boundaries.
pub fn hl_omega_functional(f: &TabulatedIntegrand, us: &[StepFunction]) -> Result<f64> {
    if us.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: us.len() });
    }
    let total = us[0].total_measure();
    for u in &us[1..] {
        let t = u.total_measure();
        if (t - total).abs() > 1e-12 * (1.0 + total.abs()) {
            return Err(Error::DomainMismatch(format!("total measures differ: {total} vs {t}")));
        }
    }
    let sharps: Vec<StepFunction> = us.iter().map(decreasing_rearrangement).collect();
    let mut pos = vec![0usize; sharps.len()];
    // Right end of the current atom of each function.
    let mut ends: Vec<f64> = sharps.iter().map(|s| s.atoms().first().map_or(0.0, |a| a.measure)).collect();
    let mut y = vec![0.0; sharps.len()];
    let mut left = 0.0;
    let mut acc = CompensatedSum::new();
    while sharps.iter().zip(&pos).all(|(s, &p)| p < s.atoms().len()) {
        let right = ends.iter().copied().fold(f64::INFINITY, f64::min);
        for (i, s) in sharps.iter().enumerate() {
            y[i] = s.atoms()[pos[i]].value;
        }
        if right > left {
            acc.add(f.eval(&y) * (right - left));
        }
        left = right;
        for (i, s) in sharps.iter().enumerate() {
            if ends[i] <= right {
                pos[i] += 1;
                if let Some(a) = s.atoms().get(pos[i]) {
                    ends[i] += a.measure;
                }
            }
        }
    }
    Ok(acc.total())
}

/// Checks `I(u_1, ..., u_m) <= I(u_1*, ..., u_m*)` for the Hardy-Littlewood
/// functional.
pub fn verify_hl(f: &TabulatedIntegrand, us: &[GridFunction], tol: f64) -> Result<VerificationReport> {
    check_inputs(f, us)?;
    require_supermodular(f)?;
    let stars: Vec<GridFunction> = us.iter().map(symmetric_decreasing_rearrangement).collect();
    let lhs = hl_functional(f, us)?;
    let rhs = hl_functional(f, &stars)?;
    let meta = ReportMeta { sizes: us.iter().map(GridFunction::len).collect(), ..ReportMeta::default() };
    Ok(VerificationReport::new(lhs, rhs, tol).with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Domain;
    use crate::supermodular::uniform_axes;

    fn product(m: usize, top: f64) -> TabulatedIntegrand {
        TabulatedIntegrand::from_fn(uniform_axes(m, 2, top), |y| y.iter().product()).unwrap()
    }

    fn grid(values: &[f64]) -> GridFunction {
        GridFunction::new(Domain::interval(values.len() as f64 / 2.0, values.len()).unwrap(), values.to_vec()).unwrap()
    }

    #[test]
    fn two_cell_product() {
        let f = product(2, 2.0);
        let us = [grid(&[1.0, 2.0]), grid(&[2.0, 1.0])];
        assert_eq!(hl_functional(&f, &us).unwrap(), 4.0);
        let r = verify_hl(&f, &us, 1e-9).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (4.0, 5.0, 1.0));
        assert!(r.holds);
    }

    #[test]
    fn arity_mismatch() {
        let f = product(2, 2.0);
        assert!(matches!(hl_functional(&f, &[grid(&[1.0, 2.0])]), Err(Error::Arity { .. })));
    }

    #[test]
    fn single_function_is_rearrangement_invariant() {
        let f = TabulatedIntegrand::from_fn(vec![vec![0.0, 1.0, 2.0, 3.0]], |y| y[0] * y[0]).unwrap();
        let u = grid(&[3.0, 0.0, 1.0, 2.0]);
        let a = hl_functional(&f, std::slice::from_ref(&u)).unwrap();
        let b = hl_functional(&f, &[symmetric_decreasing_rearrangement(&u)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_function_contributes_nothing() {
        let f = product(2, 3.0);
        assert_eq!(hl_functional(&f, &[grid(&[3.0, 1.0]), grid(&[0.0, 0.0])]).unwrap(), 0.0);
    }

    #[test]
    fn omega_functional_on_common_refinement() {
        let f = product(2, 2.0);
        let u = StepFunction::from_pairs(&[(2.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(hl_omega_functional(&f, &[u.clone(), u]).unwrap(), 5.0);
        let a = StepFunction::from_pairs(&[(1.0, 0.5), (2.0, 1.5)]).unwrap();
        let b = StepFunction::from_pairs(&[(2.0, 1.0), (1.0, 1.0)]).unwrap();
        // a# = 2 on [0,1.5), 1 on [1.5,2); b# = 2 on [0,1), 1 on [1,2).
        assert_eq!(hl_omega_functional(&f, &[a, b]).unwrap(), 4.0 + 0.5 * 2.0 + 0.5);
    }

    #[test]
    fn omega_functional_edge_cases() {
        let f = product(2, 5.0);
        let a = StepFunction::from_pairs(&[(3.0, 2.0)]).unwrap();
        let b = StepFunction::from_pairs(&[(4.0, 2.0)]).unwrap();
        assert_eq!(hl_omega_functional(&f, &[a.clone(), b]).unwrap(), 24.0);
        let zero = TabulatedIntegrand::from_fn(uniform_axes(2, 2, 5.0), |_| 0.0).unwrap();
        assert_eq!(hl_omega_functional(&zero, &[a.clone(), a.clone()]).unwrap(), 0.0);
        let short = StepFunction::from_pairs(&[(1.0, 1.0)]).unwrap();
        assert!(hl_omega_functional(&f, &[a, short]).is_err());
    }

    #[test]
    fn symmetric_inputs_have_zero_slack() {
        let f = product(2, 3.0);
        let us = [grid(&[1.0, 3.0, 2.0, 0.0]), grid(&[0.0, 2.0, 1.0, 0.0])];
        let us: Vec<_> = us.iter().map(symmetric_decreasing_rearrangement).collect();
        assert_eq!(verify_hl(&f, &us, 1e-9).unwrap().slack, 0.0);
    }

    #[test]
    fn non_supermodular_integrand_is_a_precondition_error() {
        let f = TabulatedIntegrand::from_fn(uniform_axes(2, 3, 2.0), |y| -y[0] * y[1]).unwrap();
        let us = [grid(&[1.0, 2.0]), grid(&[2.0, 1.0])];
        assert!(matches!(verify_hl(&f, &us, 1e-9), Err(Error::Precondition(_))));
    }
}
