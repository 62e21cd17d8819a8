use rayon::prelude::*;
use serde::Serialize;

use super::table::{node_box_difference, MultiIndex, TabulatedIntegrand, SIGN_TOL};
use crate::error::{Error, Result};
use crate::numeric::scaled_tol;

/// Adjacent node box where a difference test failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxWitness {
    pub indices: Vec<usize>,
    /// Lower corner, as node indices.
    pub base: Vec<usize>,
    pub value: f64,
}

/// Outcome of a sign scan over all adjacent node boxes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignCheck {
    pub holds: bool,
    pub witness: Option<BoxWitness>,
}

/// Extremes of `Delta_indices F` over every adjacent node box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceScan {
    pub min: f64,
    pub max: f64,
    pub argmin: Option<Vec<usize>>,
    pub boxes: usize,
}

fn adjacent_boxes(f: &TabulatedIntegrand, indices: &[usize]) -> MultiIndex {
    let mut shape = f.shape();
    for &i in indices {
        shape[i] = shape[i].saturating_sub(1);
    }
    MultiIndex::new(&shape)
}

/// Scans `Delta_indices F` over all adjacent node boxes.
pub fn scan_differences(f: &TabulatedIntegrand, indices: &[usize]) -> DifferenceScan {
    let steps = vec![1; indices.len()];
    let mut scan = DifferenceScan { min: f64::INFINITY, max: f64::NEG_INFINITY, argmin: None, boxes: 0 };
    for base in adjacent_boxes(f, indices) {
        let (d, _) = node_box_difference(f, indices, &base, &steps);
        scan.boxes += 1;
        if d < scan.min {
            scan.min = d;
            scan.argmin = Some(base.clone());
        }
        scan.max = scan.max.max(d);
    }
    scan
}

/// `Delta_indices F >= -tol` on every adjacent node box, with the
/// tolerance scaled by the largest corner magnitude of each box.
pub fn check_nonnegative_difference(f: &TabulatedIntegrand, indices: &[usize]) -> SignCheck {
    let steps = vec![1; indices.len()];
    for base in adjacent_boxes(f, indices) {
        let (d, scale) = node_box_difference(f, indices, &base, &steps);
        if d < -scaled_tol(SIGN_TOL, scale) {
            return SignCheck { holds: false, witness: Some(BoxWitness { indices: indices.to_vec(), base, value: d }) };
        }
    }
    SignCheck { holds: true, witness: None }
}

/// `Delta_indices F > tol` on every adjacent node box.
pub fn check_positive_difference(f: &TabulatedIntegrand, indices: &[usize]) -> SignCheck {
    let steps = vec![1; indices.len()];
    for base in adjacent_boxes(f, indices) {
        let (d, scale) = node_box_difference(f, indices, &base, &steps);
        if d <= scaled_tol(SIGN_TOL, scale) {
            return SignCheck { holds: false, witness: Some(BoxWitness { indices: indices.to_vec(), base, value: d }) };
        }
    }
    SignCheck { holds: true, witness: None }
}

/// `Delta_ij F >= 0` for all `i < j` on every adjacent node box.
///
/// Differences are additive over subdivisions, so adjacent boxes cover
/// every node box.
pub fn is_supermodular(f: &TabulatedIntegrand) -> SignCheck {
    let m = f.arity();
    for i in 0..m {
        for j in i + 1..m {
            let c = check_nonnegative_difference(f, &[i, j]);
            if !c.holds {
                return c;
            }
        }
    }
    SignCheck { holds: true, witness: None }
}

/// `Delta_i F >= 0` for every axis.
pub fn is_nondecreasing(f: &TabulatedIntegrand) -> SignCheck {
    for i in 0..f.arity() {
        let c = check_nonnegative_difference(f, &[i]);
        if !c.holds {
            return c;
        }
    }
    SignCheck { holds: true, witness: None }
}

/// Every non-repeating difference `Delta_{i_1..i_l} F` is nonnegative,
/// `l >= 1`: the sign pattern of a joint distribution function.
pub fn has_nonnegative_mixed_differences(f: &TabulatedIntegrand) -> SignCheck {
    let m = f.arity();
    for mask in 1usize..(1 << m) {
        let indices: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let c = check_nonnegative_difference(f, &indices);
        if !c.holds {
            return c;
        }
    }
    SignCheck { holds: true, witness: None }
}

/// Result of a single two-point test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `F(z) + F(w) <= F(z v w) + F(z ^ w)` with the componentwise max and min.
pub fn lorentz_two_point_check(f: &TabulatedIntegrand, z: &[f64], w: &[f64]) -> Result<LorentzCheck> {
    f.check_in_range(z)?;
    f.check_in_range(w)?;
    let hi: Vec<f64> = z.iter().zip(w).map(|(a, b)| a.max(*b)).collect();
    let lo: Vec<f64> = z.iter().zip(w).map(|(a, b)| a.min(*b)).collect();
    let (fz, fw, fhi, flo) = (f.eval(z), f.eval(w), f.eval(&hi), f.eval(&lo));
    let lhs = fz + fw;
    let rhs = fhi + flo;
    let slack = rhs - lhs;
    let scale = fz.abs().max(fw.abs()).max(fhi.abs()).max(flo.abs());
    Ok(LorentzCheck { lhs, rhs, slack, holds: slack >= -scaled_tol(SIGN_TOL, scale) })
}

/// Largest table the exhaustive pair scan accepts, in nodes.
pub const LORENTZ_NODE_BUDGET: usize = 10_000;

/// Runs the two-point inequality over every pair of table nodes.
pub fn lorentz_equivalence_scan(f: &TabulatedIntegrand) -> Result<bool> {
    let count = f.node_count();
    if count > LORENTZ_NODE_BUDGET {
        return Err(Error::Budget(format!("{count} nodes exceeds the pair-scan budget of {LORENTZ_NODE_BUDGET}")));
    }
    let nodes: Vec<Vec<usize>> = f.indices().collect();
    let ok = (0..count).into_par_iter().all(|a| {
        let za = &nodes[a];
        let mut hi = vec![0usize; za.len()];
        let mut lo = vec![0usize; za.len()];
        nodes[a + 1..].iter().all(|zb| {
            for i in 0..za.len() {
                hi[i] = za[i].max(zb[i]);
                lo[i] = za[i].min(zb[i]);
            }
            let (fa, fb, fhi, flo) = (f.at(za), f.at(zb), f.at(&hi), f.at(&lo));
            let scale = fa.abs().max(fb.abs()).max(fhi.abs()).max(flo.abs());
            fhi + flo - fa - fb >= -scaled_tol(SIGN_TOL, scale)
        })
    });
    Ok(ok)
}
