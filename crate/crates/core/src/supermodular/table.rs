use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for all sign tests on tables.
pub const SIGN_TOL: f64 = 1e-9;

/// Iterator over all multi-indices of a rectangular shape, last axis fastest.
#[derive(Debug, Clone)]
pub struct MultiIndex {
    shape: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(shape: &[usize]) -> Self {
        let current = if shape.iter().all(|&s| s > 0) { Some(vec![0; shape.len()]) } else { None };
        Self { shape: shape.to_vec(), current }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut axis = self.shape.len();
        loop {
            if axis == 0 {
                self.current = None;
                break;
            }
            axis -= 1;
            next[axis] += 1;
            if next[axis] < self.shape[axis] {
                self.current = Some(next);
                break;
            }
            next[axis] = 0;
        }
        Some(out)
    }
}

/// An integrand `F: R^m_+ -> R` tabulated on a rectangular node grid.
///
/// Off-node queries use multilinear interpolation inside the node box and
/// clamp to the top node on each axis. The table is normalized so that
/// `F(0, ..., 0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedIntegrand {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
    #[serde(skip)]
    strides: Vec<usize>,
}

fn validate_axes(axes: &[Vec<f64>]) -> Result<()> {
    if axes.is_empty() {
        return Err(Error::InvalidIntegrand("need at least one axis".into()));
    }
    for (i, axis) in axes.iter().enumerate() {
        if axis.first() != Some(&0.0) {
            return Err(Error::InvalidIntegrand(format!("axis {i} must start at node 0")));
        }
        if axis.iter().any(|x| !x.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidIntegrand(format!("axis {i} must be finite and strictly increasing")));
        }
    }
    Ok(())
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

impl TabulatedIntegrand {
    /// Builds a table from row-major values (last axis fastest), shifting
    /// it so that the origin entry is zero.
    pub fn new(axes: Vec<Vec<f64>>, mut values: Vec<f64>) -> Result<Self> {
        validate_axes(&axes)?;
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let count: usize = shape.iter().product();
        if values.len() != count {
            return Err(Error::InvalidIntegrand(format!("expected {count} table entries, got {}", values.len())));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidIntegrand(format!("table entries must be finite, found {bad}")));
        }
        let origin = values[0];
        if origin != 0.0 {
            values.iter_mut().for_each(|v| *v -= origin);
        }
        Ok(Self { strides: strides_for(&shape), axes, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(axes: Vec<Vec<f64>>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        validate_axes(&axes)?;
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let mut point = vec![0.0; axes.len()];
        let values = MultiIndex::new(&shape)
            .map(|idx| {
                for (i, &k) in idx.iter().enumerate() {
                    point[i] = axes[i][k];
                }
                f(&point)
            })
            .collect();
        Self::new(axes, values)
    }

    pub fn arity(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &[f64] {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Top node of axis `i`.
    pub fn top(&self, i: usize) -> f64 {
        *self.axes[i].last().expect("nonempty axis")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    pub fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(i, &k)| self.axes[i][k]).collect()
    }

    pub fn indices(&self) -> MultiIndex {
        MultiIndex::new(&self.shape())
    }

    fn locate(&self, axis: usize, y: f64) -> (usize, f64) {
        let nodes = &self.axes[axis];
        if nodes.len() == 1 || y <= 0.0 {
            return (0, 0.0);
        }
        let last = nodes.len() - 1;
        if y >= nodes[last] {
            return (last - 1, 1.0);
        }
        let k = nodes.partition_point(|&x| x <= y) - 1;
        (k, (y - nodes[k]) / (nodes[k + 1] - nodes[k]))
    }

    /// Multilinear interpolation, clamped to `[0, top]` on each axis.
    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.arity());
        let m = self.arity();
        let mut base = 0usize;
        let mut weights = [(0usize, 0.0f64); 8];
        let mut cells: Vec<(usize, f64)> = Vec::new();
        let located: &mut [(usize, f64)] = if m <= 8 {
            &mut weights[..m]
        } else {
            cells.resize(m, (0, 0.0));
            &mut cells
        };
        for i in 0..m {
            let (k, t) = self.locate(i, y[i]);
            base += k * self.strides[i];
            located[i] = (self.strides[i], t);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << m) {
            let mut w = 1.0;
            let mut offset = 0;
            for (i, &(stride, t)) in located.iter().enumerate() {
                if corner >> i & 1 == 1 {
                    if t == 0.0 {
                        w = 0.0;
                        break;
                    }
                    w *= t;
                    offset += stride;
                } else {
                    w *= 1.0 - t;
                }
            }
            if w != 0.0 {
                acc += w * self.values[base + offset];
            }
        }
        acc
    }

    /// Checks that `y` lies inside the tabulated range.
    pub fn check_in_range(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: y.len() });
        }
        for (i, &v) in y.iter().enumerate() {
            if !(v >= 0.0 && v <= self.top(i)) {
                return Err(Error::OutOfRange(format!("coordinate {i} = {v} outside [0, {}]", self.top(i))));
            }
        }
        Ok(())
    }

    /// Evaluates on new axes; the result is the same function whenever the
    /// new axes refine the old ones.
    pub fn resample(&self, axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: axes.len() });
        }
        Self::from_fn(axes, |y| self.eval(y))
    }

    /// Pointwise combination of two tables on identical axes.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.axes != other.axes {
            return Err(Error::InvalidIntegrand("tables must share their axes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.axes.clone(), values)
    }

    /// Writes the table as CSV: a header row holding the leading coordinate
    /// names followed by the nodes of the last axis, then one row per node
    /// of the leading axes.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let m = self.arity();
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..m).map(|i| format!("y{i}")).collect();
        header.extend(self.axes[m - 1].iter().map(|x| format!("{x}")));
        w.write_record(&header)?;
        let last = self.axes[m - 1].len();
        for lead in MultiIndex::new(&self.shape()[..m - 1]) {
            let mut record: Vec<String> = lead.iter().enumerate().map(|(i, &k)| format!("{}", self.axes[i][k])).collect();
            for k in 0..last {
                let mut idx = lead.clone();
                idx.push(k);
                record.push(format!("{:?}", self.at(&idx)));
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`TabulatedIntegrand::write_csv`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = r.headers()?.clone();
        let lead = header.iter().take_while(|h| h.starts_with('y')).count();
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::InvalidIntegrand(format!("bad number {s:?} in table CSV")))
        };
        let last_axis: Vec<f64> = header.iter().skip(lead).map(parse).collect::<Result<_>>()?;
        let mut leading: Vec<Vec<f64>> = vec![Vec::new(); lead];
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != lead + last_axis.len() {
                return Err(Error::InvalidIntegrand(format!("ragged table row of length {}", rec.len())));
            }
            for (i, field) in rec.iter().take(lead).enumerate() {
                let x = parse(field)?;
                if !leading[i].contains(&x) {
                    leading[i].push(x);
                }
            }
            for field in rec.iter().skip(lead) {
                values.push(parse(field)?);
            }
        }
        leading.push(last_axis);
        Self::new(leading, values)
    }
}

/// Signed corner sum `Delta_{i_1 .. i_l} F(y; h_1, .., h_l)` of the box
/// spanned at `y` by steps `h` along the listed axes.
pub fn finite_difference(f: &TabulatedIntegrand, indices: &[usize], y: &[f64], h: &[f64]) -> Result<f64> {
    if indices.len() != h.len() {
        return Err(Error::InvalidArgument("one step per difference index".into()));
    }
    for (a, &i) in indices.iter().enumerate() {
        if i >= f.arity() || indices[..a].contains(&i) {
            return Err(Error::InvalidArgument(format!("difference indices must be distinct axes, got {indices:?}")));
        }
    }
    f.check_in_range(y)?;
    let mut far = y.to_vec();
    for (&i, &step) in indices.iter().zip(h) {
        if step < 0.0 {
            return Err(Error::InvalidArgument("steps must be nonnegative".into()));
        }
        far[i] += step;
    }
    f.check_in_range(&far)?;
    let l = indices.len();
    let mut point = y.to_vec();
    let mut acc = 0.0;
    for corner in 0..(1usize << l) {
        point.copy_from_slice(y);
        let mut ones = 0;
        for (a, (&i, &step)) in indices.iter().zip(h).enumerate() {
            if corner >> a & 1 == 1 {
                point[i] += step;
                ones += 1;
            }
        }
        let sign = if (l - ones).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * f.eval(&point);
    }
    Ok(acc)
}

/// Difference over the box spanning `steps[a]` node intervals along
/// `indices[a]`, starting at node `base`; returns the value and the largest
/// corner magnitude.
pub fn node_box_difference(f: &TabulatedIntegrand, indices: &[usize], base: &[usize], steps: &[usize]) -> (f64, f64) {
    let l = indices.len();
    let mut idx = base.to_vec();
    let mut acc = 0.0;
    let mut scale: f64 = 0.0;
    for corner in 0..(1usize << l) {
        idx.copy_from_slice(base);
        let mut ones = 0;
        for a in 0..l {
            if corner >> a & 1 == 1 {
                idx[indices[a]] += steps[a];
                ones += 1;
            }
        }
        let v = f.at(&idx);
        scale = scale.max(v.abs());
        acc += if (l - ones).is_multiple_of(2) { v } else { -v };
    }
    (acc, scale)
}
