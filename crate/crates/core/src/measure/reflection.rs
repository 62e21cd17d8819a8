use serde::Serialize;

use super::{Domain, DomainKind};

/// Side of a reflection plane a cell lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// The half-space whose closure contains `x*`.
    Plus,
    /// Fixed set of the reflection.
    Zero,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

/// Location of the mirror.
///
/// Offsets are lattice coordinates (half-cell units): even offsets lie on
/// cell boundaries when `n` is even and on cell centers when `n` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Plane {
    /// Point `x = offset` on the interval.
    Interval { offset: i64 },
    /// Line `axis = offset` in the square.
    Square { axis: Axis, offset: i64 },
    /// Diameter with `sigma(i) = (turn - i) mod n`; it passes through arc
    /// positions `turn * h / 2` and `(turn + n) * h / 2`.
    Circle { turn: usize },
}

/// A grid-compatible reflection of a [`Domain`].
///
/// Cells in `H+` whose mirror image lies outside a bounded domain have no
/// partner; functions vanish there, so polarization leaves such cells
/// untouched. Every cell of `H-` has a partner in `H+`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reflection {
    id: usize,
    plane: Plane,
    domain_kind: DomainKind,
    domain_n: usize,
    partner: Vec<Option<usize>>,
    side: Vec<Side>,
}

impl Reflection {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    /// `sigma(cell)`, or `None` when the image falls outside the domain.
    pub fn image(&self, cell: usize) -> Option<usize> {
        self.partner[cell]
    }

    pub fn side(&self, cell: usize) -> Side {
        self.side[cell]
    }

    pub fn sides(&self) -> &[Side] {
        &self.side
    }

    fn cells_on(&self, s: Side) -> Vec<usize> {
        (0..self.side.len()).filter(|&c| self.side[c] == s).collect()
    }

    pub fn h_plus(&self) -> Vec<usize> {
        self.cells_on(Side::Plus)
    }

    pub fn h_zero(&self) -> Vec<usize> {
        self.cells_on(Side::Zero)
    }

    pub fn h_minus(&self) -> Vec<usize> {
        self.cells_on(Side::Minus)
    }

    /// Pairs `(x, sigma x)` with `x` in `H+`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.side.len()).filter_map(move |c| match (self.side[c], self.partner[c]) {
            (Side::Plus, Some(p)) => Some((c, p)),
            _ => None,
        })
    }

    /// Cells of `H+` without a partner inside the domain.
    pub fn unpaired(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.side.len()).filter(move |&c| self.side[c] == Side::Plus && self.partner[c].is_none())
    }

    pub fn belongs_to(&self, domain: &Domain) -> bool {
        self.domain_kind == domain.kind() && self.domain_n == domain.n()
    }

    /// Mirror image of a lattice point (may lie outside the domain).
    pub fn mirror_lattice(&self, domain: &Domain, p: (i64, i64)) -> (i64, i64) {
        match self.plane {
            Plane::Interval { offset } => (2 * offset - p.0, p.1),
            Plane::Square { axis: Axis::X, offset } => (2 * offset - p.0, p.1),
            Plane::Square { axis: Axis::Y, offset } => (p.0, 2 * offset - p.1),
            Plane::Circle { turn } => ((turn as i64 - p.0).rem_euclid(domain.n() as i64), p.1),
        }
    }

    /// Short human-readable label.
    pub fn describe(&self) -> String {
        match self.plane {
            Plane::Interval { offset } => format!("interval plane at {offset}/2 cells"),
            Plane::Square { axis, offset } => format!("square {axis:?} plane at {offset}/2 cells"),
            Plane::Circle { turn } => format!("circle diameter turn {turn}"),
        }
    }
}

/// Side of a lattice coordinate relative to a plane offset, with `H+`
/// chosen to contain the origin; a plane through the origin puts the
/// negative-coordinate side (which holds cell 0) in `H+`.
fn side_of(coord: i64, offset: i64) -> Side {
    let rel = coord - offset;
    if rel == 0 {
        Side::Zero
    } else if (offset > 0 && rel < 0) || (offset < 0 && rel > 0) || (offset == 0 && rel < 0) {
        Side::Plus
    } else {
        Side::Minus
    }
}

fn axial(domain: &Domain, id: usize, plane: Plane) -> Reflection {
    let len = domain.len();
    let mut partner = Vec::with_capacity(len);
    let mut side = Vec::with_capacity(len);
    let dummy = Reflection {
        id,
        plane,
        domain_kind: domain.kind(),
        domain_n: domain.n(),
        partner: vec![],
        side: vec![],
    };
    for c in 0..len {
        let p = domain.lattice(c);
        let (coord, offset) = match plane {
            Plane::Interval { offset } => (p.0, offset),
            Plane::Square { axis: Axis::X, offset } => (p.0, offset),
            Plane::Square { axis: Axis::Y, offset } => (p.1, offset),
            Plane::Circle { .. } => unreachable!(),
        };
        let s = side_of(coord, offset);
        side.push(s);
        partner.push(domain.cell_at(dummy.mirror_lattice(domain, p)));
    }
    Reflection { partner, side, ..dummy }
}

fn circular(domain: &Domain, id: usize, turn: usize) -> Reflection {
    let n = domain.n();
    let n2 = 2 * n as i64;
    let angle = |c: usize| (2 * c as i64 - turn as i64).rem_euclid(n2);
    let raw = |c: usize| -> Option<bool> {
        let t = angle(c);
        if t == 0 || t == n as i64 {
            None
        } else {
            Some(t < n as i64)
        }
    };
    // H+ is the open semicircle holding node 0, or, when node 0 is on the
    // diameter, the one holding the smallest non-fixed node.
    let plus_flag = (0..n).find_map(raw);
    let partner = (0..n).map(|c| Some((turn + n - c) % n)).collect();
    let side = (0..n)
        .map(|c| match (raw(c), plus_flag) {
            (None, _) => Side::Zero,
            (Some(f), Some(p)) if f == p => Side::Plus,
            _ => Side::Minus,
        })
        .collect();
    Reflection { id, plane: Plane::Circle { turn }, domain_kind: domain.kind(), domain_n: n, partner, side }
}

/// All grid-compatible reflections of `domain` that move at least one cell.
///
/// Interval: mirrors at every interior cell boundary and every cell center.
/// Square: the same family along each axis. Circle: every diameter through
/// a node or an edge midpoint, one reflection per distinct pairing.
/// Reflections with empty `H-` act as the identity and are omitted.
pub fn enumerate_reflections(domain: &Domain) -> Vec<Reflection> {
    let n = domain.n() as i64;
    let mut out: Vec<Reflection> = Vec::new();
    match domain.kind() {
        DomainKind::Interval | DomainKind::Square => {
            let axes: &[Option<Axis>] = if domain.kind() == DomainKind::Square {
                &[Some(Axis::X), Some(Axis::Y)]
            } else {
                &[None]
            };
            for axis in axes {
                // Lattice offsets from -n to n cover every boundary and center.
                for offset in (1 - n)..n {
                    let plane = match axis {
                        None => Plane::Interval { offset },
                        Some(a) => Plane::Square { axis: *a, offset },
                    };
                    let r = axial(domain, out.len(), plane);
                    if r.side.contains(&Side::Minus) {
                        out.push(r);
                    }
                }
            }
        }
        DomainKind::Circle => {
            for turn in 0..domain.n() {
                let r = circular(domain, out.len(), turn);
                if r.side.contains(&Side::Minus) {
                    out.push(r);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(domain: &Domain, r: &Reflection) {
        let len = domain.len();
        for c in 0..len {
            match r.side(c) {
                Side::Zero => assert_eq!(r.image(c), Some(c)),
                Side::Minus => {
                    let p = r.image(c).expect("H- cell without partner");
                    assert_eq!(r.side(p), Side::Plus);
                    assert_eq!(r.image(p), Some(c));
                }
                Side::Plus => {
                    if let Some(p) = r.image(c) {
                        assert_eq!(r.side(p), Side::Minus);
                        assert_eq!(r.image(p), Some(c));
                    }
                }
            }
        }
        // d(x, x') < d(x, sigma x') on H+, using the geometric mirror image.
        let plus = r.h_plus();
        for &x in &plus {
            for &xp in &plus {
                let px = domain.lattice(x);
                let pxp = domain.lattice(xp);
                let mirrored = r.mirror_lattice(domain, pxp);
                assert!(domain.lattice_dist2(px, pxp) < domain.lattice_dist2(px, mirrored));
            }
        }
        // Isometry on cells whose images exist.
        for a in 0..len {
            for b in 0..len {
                if let (Some(sa), Some(sb)) = (r.image(a), r.image(b)) {
                    assert_eq!(domain.dist_key(sa, sb), domain.dist_key(a, b));
                }
            }
        }
        // x* lies in the closure of H+.
        match domain.kind() {
            DomainKind::Circle => assert_ne!(r.side(0), Side::Minus),
            _ => {
                let c = domain.center_cell();
                assert_ne!(r.side(c), Side::Minus, "{}", r.describe());
            }
        }
    }

    #[test]
    fn invariants_hold_exhaustively_on_small_grids() {
        let mut domains = vec![];
        for n in 2..=32 {
            domains.push(Domain::interval(1.0, n).unwrap());
            domains.push(Domain::circle(1.0, n).unwrap());
        }
        for n in 2..=6 {
            domains.push(Domain::square(1.0, n).unwrap());
        }
        for d in &domains {
            for r in enumerate_reflections(d) {
                check_invariants(d, &r);
            }
        }
    }

    #[test]
    fn interval_center_plane_pairs_outer_cells() {
        let d = Domain::interval(2.0, 4).unwrap();
        let rs = enumerate_reflections(&d);
        let center = rs.iter().find(|r| r.plane() == Plane::Interval { offset: 0 }).unwrap();
        assert_eq!(center.image(0), Some(3));
        assert_eq!(center.image(1), Some(2));
        assert!(center.h_zero().is_empty());
        assert_eq!(center.h_plus(), vec![0, 1]);
        // 3 boundary planes and the 2 interior cell-center planes.
        assert_eq!(rs.len(), 5);
    }

    #[test]
    fn circle_of_four_has_four_reflections() {
        let d = Domain::circle(4.0, 4).unwrap();
        let rs = enumerate_reflections(&d);
        assert_eq!(rs.len(), 4);
        let mut pairings: Vec<Vec<Option<usize>>> = rs.iter().map(|r| r.partner.clone()).collect();
        pairings.sort();
        pairings.dedup();
        assert_eq!(pairings.len(), 4);
    }

    #[test]
    fn square_of_two_has_two_center_planes() {
        let d = Domain::square(1.0, 2).unwrap();
        let rs = enumerate_reflections(&d);
        assert_eq!(rs.len(), 2);
        assert!(rs.iter().all(|r| matches!(r.plane(), Plane::Square { offset: 0, .. })));
    }

    #[test]
    fn family_sizes() {
        for n in 2..20usize {
            let d = Domain::interval(1.0, n).unwrap();
            assert_eq!(enumerate_reflections(&d).len(), 2 * n - 3);
            let c = Domain::circle(1.0, n).unwrap();
            let expected = if n == 2 { 1 } else { n };
            assert_eq!(enumerate_reflections(&c).len(), expected);
        }
    }
}
