use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DomainKind, GridFunction};
use crate::numeric::CompensatedSum;
use crate::rearrange::is_translated_radial;
use crate::supermodular::{check_positive_difference, TabulatedIntegrand};

use super::kernel::Kernel;
use super::report::VerificationReport;
use super::riesz::kernel_pairs;

/// Largest cell count checked over every pair of cells.
pub const EXHAUSTIVE_COMONOTONE_CELLS: usize = 128;
/// Pairs drawn when the domain is larger than that.
pub const SAMPLED_COMONOTONE_PAIRS: usize = 100_000;
/// Largest list length accepted by [`comonotone_bruteforce_oracle`].
pub const ORACLE_MAX_ATOMS: usize = 8;
/// Cap on the number of permutation tuples the oracle enumerates.
pub const ORACLE_MAX_TUPLES: u128 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comonotonicity {
    pub holds: bool,
    /// Cells `(x, x')` where the two differences have opposite signs.
    pub witness: Option<(usize, usize)>,
}

/// Checks `(u_i(x) - u_i(x')) (u_j(x) - u_j(x')) >= 0` over all cell pairs,
/// or over seeded random pairs on large domains.
pub fn comonotonicity_check(ui: &GridFunction, uj: &GridFunction, seed: u64) -> Result<Comonotonicity> {
    ui.ensure_same_domain(uj)?;
    let (a, b) = (ui.values(), uj.values());
    let n = a.len();
    let bad = |x: usize, y: usize| (a[x] - a[y]) * (b[x] - b[y]) < 0.0;
    let witness = if n <= EXHAUSTIVE_COMONOTONE_CELLS {
        (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).find(|&(x, y)| bad(x, y))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..SAMPLED_COMONOTONE_PAIRS)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .find(|&(x, y)| bad(x, y))
    };
    Ok(Comonotonicity { holds: witness.is_none(), witness })
}

/// Maximum of the oracle together with the permutations attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    /// `pairing[i][k]` is the atom of list `i + 1` matched with atom `k` of
    /// the first list.
    pub pairing: Vec<Vec<usize>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// Maximizes `sum_k F(l_1[k], l_2[pi_2 k], ..., l_m[pi_m k]) * measure` over
/// all relative permutations of equal-measure atom lists.
pub fn comonotone_bruteforce_oracle(f: &TabulatedIntegrand, lists: &[Vec<f64>], measure: f64) -> Result<OracleResult> {
    let m = lists.len();
    if m != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: m });
    }
    let n = lists[0].len();
    if lists.iter().any(|l| l.len() != n) {
        return Err(Error::InvalidArgument("atom lists must have equal length".into()));
    }
    if n == 0 || n > ORACLE_MAX_ATOMS {
        return Err(Error::InvalidArgument(format!("oracle needs 1..={ORACLE_MAX_ATOMS} atoms, got {n}")));
    }
    let fact: u128 = (1..=n as u128).product();
    if fact.pow(m.saturating_sub(1) as u32) > ORACLE_MAX_TUPLES {
        return Err(Error::Budget(format!("{n} atoms in {m} lists exceed the enumeration budget")));
    }
    // F at every tuple of atom indices, last list fastest.
    let mut table = vec![0.0; n.pow(m as u32)];
    let mut y = vec![0.0; m];
    for (slot, idx) in crate::supermodular::MultiIndex::new(&vec![n; m]).enumerate() {
        for i in 0..m {
            y[i] = lists[i][idx[i]];
        }
        table[slot] = f.eval(&y);
    }
    let perms = permutations(n);
    let mut choice = vec![0usize; m.saturating_sub(1)];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let value: f64 = (0..n)
            .map(|k| table[choice.iter().fold(k, |s, &c| s * n + perms[c][k])])
            .collect::<CompensatedSum>()
            .total();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, choice.clone()));
        }
        // Odometer over the permutation choices.
        let Some(pos) = (0..choice.len()).rev().find(|&i| choice[i] + 1 < perms.len()) else { break };
        choice[pos] += 1;
        choice[pos + 1..].iter_mut().for_each(|c| *c = 0);
    }
    let (value, choice) = best.expect("at least one pairing");
    Ok(OracleResult { value: value * measure, pairing: choice.iter().map(|&c| perms[c].clone()).collect() })
}

/// Pairs whose comonotonicity is forced by an equality case of the
/// Hardy-Littlewood inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityDiagnostic {
    pub pair: (usize, usize),
    pub comonotone: Comonotonicity,
}

/// When `report` is an equality case (`slack <= tol`), checks every pair
/// `(i, j)` with `Delta_ij F > 0` on all boxes for comonotonicity.
pub fn hl_equality_diagnostics(
    f: &TabulatedIntegrand,
    us: &[GridFunction],
    report: &VerificationReport,
    tol: f64,
    seed: u64,
) -> Result<Vec<EqualityDiagnostic>> {
    if report.slack > tol * (1.0 + report.rhs.abs()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, j) in kernel_pairs(us.len()) {
        if check_positive_difference(f, &[i, j]).holds {
            out.push(EqualityDiagnostic { pair: (i, j), comonotone: comonotonicity_check(&us[i], &us[j], seed)? });
        }
    }
    Ok(out)
}

/// Translation check of one function in the Riesz equality analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszEqualityDiagnostic {
    pub index: usize,
    pub translated_radial: bool,
    pub shift: Option<i64>,
}

/// In a Riesz equality case, every nonconstant function joined by a
/// strictly decreasing kernel to a partner with `Delta_ij F > 0` must pass
/// the reflection dichotomy test. Runs only when every kernel is positive
/// below the domain diameter.
pub fn riesz_equality_diagnostics(
    f: &TabulatedIntegrand,
    us: &[GridFunction],
    kernels: &[Kernel],
    report: &VerificationReport,
    tol: f64,
) -> Result<Vec<RieszEqualityDiagnostic>> {
    let domain = us[0].domain();
    if domain.kind() == DomainKind::Square || report.slack > tol * (1.0 + report.rhs.abs()) {
        return Ok(Vec::new());
    }
    if !kernels.iter().all(|k| k.positive_below(domain.diameter())) {
        return Ok(Vec::new());
    }
    let nonconstant = |u: &GridFunction| u.values().windows(2).any(|w| w[0] != w[1]);
    let mut flagged = vec![false; us.len()];
    for (p, (i, j)) in kernel_pairs(us.len()).into_iter().enumerate() {
        if kernels[p].strictly_decreasing() && check_positive_difference(f, &[i, j]).holds {
            flagged[i] = true;
            flagged[j] = true;
        }
    }
    let mut out = Vec::new();
    for (index, u) in us.iter().enumerate() {
        if flagged[index] && nonconstant(u) {
            let t = is_translated_radial(u)?;
            out.push(RieszEqualityDiagnostic { index, translated_radial: t.radial, shift: t.shift });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{hl_omega_functional, verify_hl};
    use crate::measure::{Domain, StepFunction};
    use crate::supermodular::uniform_axes;

    fn interval(values: &[f64]) -> GridFunction {
        GridFunction::new(Domain::interval(values.len() as f64 / 2.0, values.len()).unwrap(), values.to_vec()).unwrap()
    }

    fn product(m: usize, top: f64) -> TabulatedIntegrand {
        TabulatedIntegrand::from_fn(uniform_axes(m, 2, top), |y| y.iter().product()).unwrap()
    }

    #[test]
    fn comonotone_examples() {
        let u = interval(&[1.0, 3.0, 2.0]);
        let v = interval(&[1.0, 9.0, 4.0]);
        assert!(comonotonicity_check(&u, &v, 0).unwrap().holds);
        let anti = comonotonicity_check(&interval(&[1.0, 2.0]), &interval(&[2.0, 1.0]), 0).unwrap();
        assert_eq!((anti.holds, anti.witness), (false, Some((0, 1))));
        assert!(comonotonicity_check(&interval(&[2.0, 2.0]), &interval(&[2.0, 1.0]), 0).unwrap().holds);
    }

    #[test]
    fn sampled_comonotonicity_on_large_domains() {
        let d = Domain::interval(1.0, 300).unwrap();
        let u = GridFunction::from_fn(d, |p| p[0] + 1.0).unwrap();
        let v = GridFunction::from_fn(d, |p| 1.0 - p[0]).unwrap();
        assert!(comonotonicity_check(&u, &u, 3).unwrap().holds);
        assert!(!comonotonicity_check(&u, &v, 3).unwrap().holds);
    }

    #[test]
    fn oracle_sorted_pairing() {
        let r = comonotone_bruteforce_oracle(&product(2, 3.0), &[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]], 1.0).unwrap();
        assert_eq!(r.value, 14.0);
        assert_eq!(r.pairing, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn oracle_edge_cases() {
        let f = product(2, 3.0);
        assert_eq!(comonotone_bruteforce_oracle(&f, &[vec![2.0], vec![3.0]], 0.5).unwrap().value, 3.0);
        let zero = TabulatedIntegrand::from_fn(uniform_axes(2, 2, 3.0), |_| 0.0).unwrap();
        assert_eq!(comonotone_bruteforce_oracle(&zero, &[vec![1.0, 2.0], vec![2.0, 1.0]], 1.0).unwrap().value, 0.0);
        assert!(comonotone_bruteforce_oracle(&f, &[vec![1.0; 9], vec![1.0; 9]], 1.0).is_err());
    }

    #[test]
    fn oracle_matches_rearranged_functional() {
        let f = product(3, 4.0);
        let lists = vec![vec![0.5, 4.0, 2.0, 1.0], vec![3.0, 0.0, 1.5, 2.0], vec![1.0, 2.0, 4.0, 0.25]];
        let oracle = comonotone_bruteforce_oracle(&f, &lists, 0.5).unwrap();
        let steps: Vec<_> = lists.iter().map(|l| StepFunction::uniform(l, 0.5).unwrap()).collect();
        let omega = hl_omega_functional(&f, &steps).unwrap();
        assert!((oracle.value - omega).abs() <= 1e-12);
    }

    #[test]
    fn equality_implies_comonotone() {
        let f = product(2, 3.0);
        let us = [interval(&[0.0, 3.0, 1.0]), interval(&[0.5, 2.0, 1.0])];
        let r = verify_hl(&f, &us, 1e-9).unwrap();
        assert!(r.slack.abs() < 1e-12);
        let diag = hl_equality_diagnostics(&f, &us, &r, 1e-9, 0).unwrap();
        assert_eq!(diag.len(), 1);
        assert!(diag[0].comonotone.holds);
    }

    #[test]
    fn riesz_equality_on_translates() {
        let f = product(2, 3.0);
        let d = Domain::circle(6.0, 6).unwrap();
        let u = GridFunction::new(d, vec![0.0, 1.0, 3.0, 1.0, 0.0, 0.0]).unwrap();
        let k = [Kernel::exp(1.0).unwrap()];
        let r = crate::functionals::verify_riesz(&f, &[u.clone(), u.clone()], &k, 1e-9).unwrap();
        assert!(r.slack.abs() < 1e-9);
        let diag = riesz_equality_diagnostics(&f, &[u.clone(), u], &k, &r, 1e-9).unwrap();
        assert_eq!(diag.len(), 2);
        assert!(diag.iter().all(|d| d.translated_radial && d.shift.is_some()));
    }
}
