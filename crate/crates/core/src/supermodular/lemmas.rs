use serde::Serialize;

use super::checks::{check_nonnegative_difference, is_nondecreasing, is_supermodular};
use super::table::{MultiIndex, TabulatedIntegrand, SIGN_TOL};
use crate::error::{Error, Result};
use crate::numeric::scaled_tol;

/// Continuous piecewise-linear function through `(knots[k], values[k])`,
/// constant outside the knot hull.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidArgument("need matching, nonempty knots and values".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) || knots.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite and strictly increasing".into()));
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if t <= self.knots[0] {
            return self.values[0];
        }
        if t >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let k = self.knots.partition_point(|&x| x <= t) - 1;
        let s = (t - self.knots[k]) / (self.knots[k + 1] - self.knots[k]);
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    /// Right derivative, zero outside the knot hull.
    pub fn slope(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if n == 1 || t < self.knots[0] || t >= self.knots[n - 1] {
            return 0.0;
        }
        let k = self.knots.partition_point(|&x| x <= t) - 1;
        (self.values[k + 1] - self.values[k]) / (self.knots[k + 1] - self.knots[k])
    }

    /// Largest absolute slope between knots.
    pub fn lipschitz_constant(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| (v[1] - v[0]).abs() / (k[1] - k[0]))
            .fold(0.0, f64::max)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Slopes nondecreasing.
    pub fn is_convex(&self, tol: f64) -> bool {
        let slopes: Vec<f64> = self.knots.windows(2).zip(self.values.windows(2)).map(|(k, v)| (v[1] - v[0]) / (k[1] - k[0])).collect();
        slopes.windows(2).all(|s| s[1] >= s[0] - tol)
    }
}

/// Node pair violating `|f(z) - f(y)| <= C (phi(z) - phi(y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzWitness {
    pub lower: usize,
    pub upper: usize,
    pub excess: f64,
}

/// Writes `f = f~ o phi` on the sampled nodes, with `f~` interpolated
/// linearly across the jumps of `phi` and extended by constants.
///
/// `f` and `phi` are samples on the same increasing node list.
pub fn monotone_change_of_variable(f: &[f64], phi: &[f64], c: f64) -> Result<PiecewiseLinear> {
    if f.is_empty() || f.len() != phi.len() {
        return Err(Error::InvalidArgument("f and phi need the same, nonzero number of samples".into()));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidArgument(format!("constant must be nonnegative, got {c}")));
    }
    if let Some(k) = phi.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Precondition(format!("phi decreases between nodes {k} and {}", k + 1)));
    }
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = scaled_tol(SIGN_TOL, scale);
    for lower in 0..f.len() {
        for upper in lower + 1..f.len() {
            let excess = (f[upper] - f[lower]).abs() - c * (phi[upper] - phi[lower]);
            if excess > tol {
                let w = LipschitzWitness { lower, upper, excess };
                return Err(Error::Precondition(format!("Lipschitz domination fails: {w:?}")));
            }
        }
    }
    let mut knots: Vec<f64> = Vec::with_capacity(phi.len());
    let mut values: Vec<f64> = Vec::with_capacity(phi.len());
    for (&t, &v) in phi.iter().zip(f) {
        if knots.last() != Some(&t) {
            knots.push(t);
            values.push(v);
        }
    }
    PiecewiseLinear::new(knots, values)
}

/// `F = F~ o (phi_1, .., phi_m)` with `F~` Lipschitz in the `l^1` sense.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SklarFactorization {
    /// `phi_i` sampled on the nodes of axis `i` of the original table.
    pub phis: Vec<PiecewiseLinear>,
    /// Tabulated on the image grid of the `phi_i`.
    pub f_tilde: TabulatedIntegrand,
    /// Per-axis Lipschitz constant of `F~`.
    pub lipschitz_bound: f64,
}

impl SklarFactorization {
    /// `F~(phi_1(y_1), .., phi_m(y_m))`.
    pub fn reconstruct(&self, y: &[f64]) -> f64 {
        let t: Vec<f64> = y.iter().zip(&self.phis).map(|(&v, phi)| phi.eval(v)).collect();
        self.f_tilde.eval(&t)
    }

    /// Largest `|F(y) - F~(phi(y))|` over the nodes of `f`.
    pub fn reconstruction_residual(&self, f: &TabulatedIntegrand) -> f64 {
        f.indices()
            .map(|idx| {
                let y = f.node(&idx);
                (f.at(&idx) - self.reconstruct(&y)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest `step - |Delta_i F~|` over adjacent nodes of each axis.
    pub fn axis_lipschitz_slack(&self) -> f64 {
        let t = &self.f_tilde;
        let mut slack = f64::INFINITY;
        for idx in t.indices() {
            for i in 0..t.arity() {
                if idx[i] + 1 < t.axis(i).len() {
                    let mut next = idx.clone();
                    next[i] += 1;
                    let step = t.axis(i)[idx[i] + 1] - t.axis(i)[idx[i]];
                    slack = slack.min(self.lipschitz_bound * step - (t.at(&next) - t.at(&idx)).abs());
                }
            }
        }
        slack
    }

    /// Smallest `sum_i |z_i - y_i| - |F~(z) - F~(y)|` over all node pairs.
    pub fn pairwise_lipschitz_slack(&self) -> f64 {
        let t = &self.f_tilde;
        let nodes: Vec<Vec<usize>> = t.indices().collect();
        let mut slack = f64::INFINITY;
        for (a, za) in nodes.iter().enumerate() {
            for zb in &nodes[a + 1..] {
                let dist: f64 = (0..t.arity()).map(|i| (t.axis(i)[za[i]] - t.axis(i)[zb[i]]).abs()).sum();
                slack = slack.min(dist - (t.at(za) - t.at(zb)).abs());
            }
        }
        slack
    }
}

/// Factors a bounded, per-axis nondecreasing, supermodular table through
/// monotone changes of variable, one axis at a time.
///
/// `phi_i` is read off along the top row of the other axes, where the table
/// is constant beyond the last node. Any index set in `preserve` for which
/// `Delta F >= 0` holds is checked to carry over to `F~`.
pub fn sklar_factorize_preserving(f: &TabulatedIntegrand, preserve: &[Vec<usize>]) -> Result<SklarFactorization> {
    let mono = is_nondecreasing(f);
    if !mono.holds {
        return Err(Error::Precondition(format!("integrand is not nondecreasing: {:?}", mono.witness)));
    }
    let sup = is_supermodular(f);
    if !sup.holds {
        return Err(Error::Precondition(format!("integrand is not supermodular: {:?}", sup.witness)));
    }
    let m = f.arity();
    let shape = f.shape();
    let top: Vec<usize> = shape.iter().map(|s| s - 1).collect();

    let mut phis = Vec::with_capacity(m);
    let mut image_axes = Vec::with_capacity(m);
    // For each image node along axis i, the first original node mapping to it.
    let mut preimage: Vec<Vec<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut idx = top.clone();
        idx[i] = 0;
        let base = f.at(&idx);
        let raw: Vec<f64> = (0..shape[i])
            .map(|k| {
                idx[i] = k;
                f.at(&idx) - base
            })
            .collect();
        // Enforce exact monotonicity against rounding in the top-row differences.
        let mut samples = Vec::with_capacity(raw.len());
        let mut running = 0.0f64;
        for v in raw {
            running = running.max(v);
            samples.push(running);
        }
        samples[0] = 0.0;
        let mut axis = Vec::new();
        let mut pre = Vec::new();
        for (k, &t) in samples.iter().enumerate() {
            if axis.last() != Some(&t) {
                axis.push(t);
                pre.push(k);
            }
        }
        phis.push(PiecewiseLinear::new(f.axis(i).to_vec(), samples)?);
        image_axes.push(axis);
        preimage.push(pre);
    }

    let image_shape: Vec<usize> = image_axes.iter().map(Vec::len).collect();
    let mut source = vec![0usize; m];
    let values: Vec<f64> = MultiIndex::new(&image_shape)
        .map(|k| {
            for i in 0..m {
                source[i] = preimage[i][k[i]];
            }
            f.at(&source)
        })
        .collect();
    let f_tilde = TabulatedIntegrand::new(image_axes, values)?;
    let sk = SklarFactorization { phis, f_tilde, lipschitz_bound: 1.0 };

    let tilde_sup = is_supermodular(&sk.f_tilde);
    if !tilde_sup.holds {
        return Err(Error::Precondition(format!("factor lost supermodularity: {:?}", tilde_sup.witness)));
    }
    for indices in preserve {
        if check_nonnegative_difference(f, indices).holds {
            let c = check_nonnegative_difference(&sk.f_tilde, indices);
            if !c.holds {
                return Err(Error::Precondition(format!("factor lost Delta{indices:?} >= 0: {:?}", c.witness)));
            }
        }
    }
    Ok(sk)
}

/// [`sklar_factorize_preserving`] with no extra index sets.
pub fn sklar_factorize(f: &TabulatedIntegrand) -> Result<SklarFactorization> {
    sklar_factorize_preserving(f, &[])
}

/// `F^L(y) = F(min(y_1, L), .., min(y_m, L))`, tabulated on the original
/// nodes with `L` inserted where it falls strictly inside an axis.
pub fn cutoff(f: &TabulatedIntegrand, level: f64) -> Result<TabulatedIntegrand> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff level must be positive, got {level}")));
    }
    let axes: Vec<Vec<f64>> = f
        .axes()
        .iter()
        .map(|axis| {
            let mut a = axis.clone();
            if level < *a.last().unwrap() && !a.contains(&level) {
                let pos = a.partition_point(|&x| x < level);
                a.insert(pos, level);
            }
            a
        })
        .collect();
    TabulatedIntegrand::from_fn(axes, |y| {
        let clipped: Vec<f64> = y.iter().map(|&v| v.min(level)).collect();
        f.eval(&clipped)
    })
}

/// `F(y) - sum_i F(y_i e_i)`: same mixed differences, zero on the axes.
pub fn subtract_marginals(f: &TabulatedIntegrand) -> TabulatedIntegrand {
    let m = f.arity();
    let mut axis_idx = vec![0usize; m];
    let values: Vec<f64> = f
        .indices()
        .map(|idx| {
            let mut v = f.at(&idx);
            for i in 0..m {
                axis_idx.iter_mut().for_each(|k| *k = 0);
                axis_idx[i] = idx[i];
                v -= f.at(&axis_idx);
            }
            v
        })
        .collect();
    TabulatedIntegrand::new(f.axes().to_vec(), values).expect("same axes as a valid table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supermodular::checks::scan_differences;

    #[test]
    fn change_of_variable_interpolates_across_jump() {
        let f = [0.0, 1.0, 1.0];
        let phi = [0.0, 1.0, 1.0];
        let ft = monotone_change_of_variable(&f, &phi, 1.0).unwrap();
        assert_eq!(ft.knots(), &[0.0, 1.0]);
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            assert_eq!(ft.eval(t), t);
        }
        assert_eq!(ft.eval(-3.0), 0.0);
        assert_eq!(ft.eval(7.0), 1.0);
    }

    #[test]
    fn change_of_variable_identity_and_constant() {
        let nodes = [0.0, 0.5, 2.0, 3.0];
        let f = [1.0, 1.2, 2.0, 1.5];
        let ft = monotone_change_of_variable(&f, &nodes, 1.0).unwrap();
        for (y, v) in nodes.iter().zip(f) {
            assert_eq!(ft.eval(*y), v);
        }
        let ft = monotone_change_of_variable(&[4.0; 4], &[0.0, 0.0, 1.0, 5.0], 0.0).unwrap();
        assert_eq!(ft.values(), &[4.0, 4.0, 4.0]);
    }

    #[test]
    fn change_of_variable_reports_violation() {
        let err = monotone_change_of_variable(&[0.0, 2.0], &[0.0, 1.0], 1.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(msg) if msg.contains("lower: 0")));
        assert!(monotone_change_of_variable(&[0.0, 0.0], &[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn change_of_variable_keeps_monotonicity() {
        let f = [0.0, 0.2, 0.2, 0.9];
        let phi = [0.0, 0.5, 0.5, 2.0];
        let ft = monotone_change_of_variable(&f, &phi, 1.0).unwrap();
        assert!(ft.is_nondecreasing());
        assert!(ft.lipschitz_constant() <= 1.0);
    }

    #[test]
    fn sklar_indicator_product() {
        let nodes = vec![0.0, 1.0, 2.0];
        let ind = |y: f64| if y >= 1.0 { 1.0 } else { 0.0 };
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |y| ind(y[0]) * ind(y[1])).unwrap();
        let sk = sklar_factorize(&f).unwrap();
        for phi in &sk.phis {
            assert_eq!(phi.values(), &[0.0, 1.0, 1.0]);
        }
        assert_eq!(sk.f_tilde.axes(), &[vec![0.0, 1.0], vec![0.0, 1.0]]);
        for (t1, t2) in [(0.0, 0.0), (0.3, 0.7), (1.0, 0.5), (1.0, 1.0)] {
            assert!((sk.f_tilde.eval(&[t1, t2]) - t1 * t2).abs() < 1e-15);
        }
        assert_eq!(sk.reconstruction_residual(&f), 0.0);
    }

    #[test]
    fn sklar_capped_product() {
        let nodes = vec![0.0, 0.5, 1.0, 2.0, 3.0];
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |y| y[0].min(1.0) * y[1].min(1.0)).unwrap();
        let sk = sklar_factorize(&f).unwrap();
        assert_eq!(sk.phis[0].values(), &[0.0, 0.5, 1.0, 1.0, 1.0]);
        for (t1, t2) in [(0.25, 0.75), (0.5, 1.0), (0.9, 0.1)] {
            assert!((sk.f_tilde.eval(&[t1, t2]) - t1 * t2).abs() < 1e-15);
        }
        assert!(sk.axis_lipschitz_slack() >= 0.0);
        assert!(sk.pairwise_lipschitz_slack() >= 0.0);
    }

    #[test]
    fn sklar_of_zero_is_zero() {
        let nodes = vec![0.0, 1.0, 2.0];
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |_| 0.0).unwrap();
        let sk = sklar_factorize(&f).unwrap();
        assert!(sk.phis.iter().all(|p| p.values().iter().all(|&v| v == 0.0)));
        assert!(sk.f_tilde.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sklar_rejects_non_supermodular_or_decreasing() {
        let nodes = vec![0.0, 1.0, 2.0];
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes.clone()], |y| y[0] + y[1] - 0.1 * y[0] * y[1]).unwrap();
        assert!(matches!(sklar_factorize(&f), Err(Error::Precondition(_))));
        let g = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |y| y[0] * y[1] - y[0]).unwrap();
        assert!(matches!(sklar_factorize(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn cutoff_examples() {
        let nodes = vec![0.0, 1.0, 2.0, 3.0];
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |y| y[0] * y[1]).unwrap();
        let fl = cutoff(&f, 1.0).unwrap();
        assert_eq!(fl.eval(&[2.0, 3.0]), 1.0);
        let same = cutoff(&f, 5.0).unwrap();
        assert_eq!(same, f);
        assert!(cutoff(&f, 0.0).is_err());
        let mid = cutoff(&f, 1.5).unwrap();
        assert_eq!(mid.axis(0), &[0.0, 1.0, 1.5, 2.0, 3.0]);
        assert_eq!(mid.eval(&[3.0, 3.0]), 2.25);
    }

    #[test]
    fn subtract_marginals_examples() {
        let nodes = vec![0.0, 1.0, 2.0];
        let f = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes.clone()], |y| y[0] * y[1]).unwrap();
        assert_eq!(subtract_marginals(&f), f);
        let g = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes.clone()], |y| y[0] * y[1] + y[0]).unwrap();
        assert_eq!(subtract_marginals(&g), f);
        let z = TabulatedIntegrand::from_fn(vec![nodes.clone(), nodes], |_| 0.0).unwrap();
        assert_eq!(subtract_marginals(&z), z);
        assert_eq!(scan_differences(&subtract_marginals(&g), &[0, 1]), scan_differences(&g, &[0, 1]));
    }
}
