use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of a discretized domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// `[-L, L]` cut into `n` equal cells.
    Interval,
    /// Circle of given circumference with `n` equally spaced nodes.
    Circle,
    /// `[-L, L]^2` cut into `n x n` cells, row-major indexing.
    Square,
}

/// A uniform grid with its distance function, cell measure and
/// distinguished point `x*`.
///
/// Interval and square cells are addressed on an integer lattice in
/// half-cell units: cell `i` along an axis sits at `2i + 1 - n`, so the
/// geometric center is the origin and all distance comparisons are exact.
/// On the circle, node `i` sits at arc position `i * h` and `x*` is node 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr")]
pub struct Domain {
    kind: DomainKind,
    extent: f64,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    kind: DomainKind,
    extent: f64,
    n: usize,
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(r: DomainRepr) -> Result<Self> {
        Self::new(r.kind, r.extent, r.n)
    }
}

impl Domain {
    /// `extent` is the half-extent for interval and square, the
    /// circumference for the circle.
    pub fn new(kind: DomainKind, extent: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDomain(format!("need n >= 2 cells per axis, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidDomain(format!("extent must be positive and finite, got {extent}")));
        }
        Ok(Self { kind, extent, n })
    }

    pub fn interval(half_extent: f64, n: usize) -> Result<Self> {
        Self::new(DomainKind::Interval, half_extent, n)
    }

    pub fn circle(circumference: f64, n: usize) -> Result<Self> {
        Self::new(DomainKind::Circle, circumference, n)
    }

    pub fn square(half_extent: f64, n: usize) -> Result<Self> {
        Self::new(DomainKind::Square, half_extent, n)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// Cells per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        match self.kind {
            DomainKind::Square => self.n * self.n,
            _ => self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing along an axis.
    pub fn spacing(&self) -> f64 {
        match self.kind {
            DomainKind::Interval | DomainKind::Square => 2.0 * self.extent / self.n as f64,
            DomainKind::Circle => self.extent / self.n as f64,
        }
    }

    /// Measure of a single cell.
    pub fn cell_measure(&self) -> f64 {
        let h = self.spacing();
        match self.kind {
            DomainKind::Square => h * h,
            _ => h,
        }
    }

    pub fn total_measure(&self) -> f64 {
        self.cell_measure() * self.len() as f64
    }

    /// Lattice coordinates of a cell in half-cell units (interval, square)
    /// or node units (circle; second entry unused).
    pub fn lattice(&self, cell: usize) -> (i64, i64) {
        let n = self.n as i64;
        match self.kind {
            DomainKind::Interval => (2 * cell as i64 + 1 - n, 0),
            DomainKind::Square => {
                let row = (cell / self.n) as i64;
                let col = (cell % self.n) as i64;
                (2 * col + 1 - n, 2 * row + 1 - n)
            }
            DomainKind::Circle => (cell as i64, 0),
        }
    }

    /// Cell at the given lattice coordinates, if it lies in the domain.
    pub fn cell_at(&self, coords: (i64, i64)) -> Option<usize> {
        let n = self.n as i64;
        let axis = |p: i64| -> Option<i64> {
            let twice = p + n - 1;
            if twice.rem_euclid(2) != 0 {
                return None;
            }
            let i = twice / 2;
            (0..n).contains(&i).then_some(i)
        };
        match self.kind {
            DomainKind::Interval => axis(coords.0).map(|i| i as usize),
            DomainKind::Square => {
                let col = axis(coords.0)?;
                let row = axis(coords.1)?;
                Some((row * n + col) as usize)
            }
            DomainKind::Circle => Some(coords.0.rem_euclid(n) as usize),
        }
    }

    /// Physical coordinates of a cell center (circle: arc position).
    pub fn position(&self, cell: usize) -> [f64; 2] {
        match self.kind {
            DomainKind::Circle => [cell as f64 * self.spacing(), 0.0],
            _ => {
                let half = 0.5 * self.spacing();
                let (x, y) = self.lattice(cell);
                [x as f64 * half, y as f64 * half]
            }
        }
    }

    /// Exact squared distance between two lattice points, in lattice units.
    pub fn lattice_dist2(&self, a: (i64, i64), b: (i64, i64)) -> i64 {
        match self.kind {
            DomainKind::Interval => (a.0 - b.0).pow(2),
            DomainKind::Square => (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2),
            DomainKind::Circle => {
                let n = self.n as i64;
                let k = (a.0 - b.0).rem_euclid(n);
                k.min(n - k).pow(2)
            }
        }
    }

    /// Exact squared distance key between two cells; orders cells the same
    /// way as [`Domain::distance`].
    pub fn dist_key(&self, a: usize, b: usize) -> i64 {
        self.lattice_dist2(self.lattice(a), self.lattice(b))
    }

    /// Squared distance key from the distinguished point `x*`.
    pub fn center_key(&self, cell: usize) -> i64 {
        match self.kind {
            DomainKind::Circle => self.dist_key(cell, 0),
            _ => self.lattice_dist2(self.lattice(cell), (0, 0)),
        }
    }

    /// Converts a squared lattice distance into a physical distance.
    pub fn key_to_distance(&self, key: i64) -> f64 {
        let unit = match self.kind {
            DomainKind::Circle => self.spacing(),
            _ => 0.5 * self.spacing(),
        };
        (key as f64).sqrt() * unit
    }

    /// Distance between cell centers (arc length on the circle).
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.key_to_distance(self.dist_key(a, b))
    }

    /// Largest distance between two cells.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Interval => self.distance(0, self.n - 1),
            DomainKind::Square => self.distance(0, self.len() - 1),
            DomainKind::Circle => self.distance(0, self.n / 2),
        }
    }

    /// Cells sorted by distance from `x*`, ties broken by cell index.
    ///
    /// The prefixes of this order are the discrete balls `B_r`; the
    /// symmetric decreasing rearrangement fills them in this order.
    pub fn distance_order(&self) -> Vec<usize> {
        let mut cells: Vec<usize> = (0..self.len()).collect();
        cells.sort_by_key(|&c| (self.center_key(c), c));
        cells
    }

    /// First cell of [`Domain::distance_order`].
    pub fn center_cell(&self) -> usize {
        self.distance_order()[0]
    }
}
