use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite set of integer lattice indices, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IndexSet {
    indices: Vec<i64>,
}

impl IndexSet {
    /// Builds a set from arbitrary indices; duplicates are merged.
    pub fn new(indices: impl IntoIterator<Item = i64>) -> Result<Self> {
        let indices: Vec<i64> = indices.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if indices.is_empty() {
            return Err(Error::InvalidArgument("index sets must be nonempty".into()));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Measure with lattice spacing `h`.
    pub fn measure(&self, h: f64) -> f64 {
        self.len() as f64 * h
    }

    /// `A*`: the centered run of `|A|` consecutive indices; for even sizes
    /// the extra index goes to the negative side.
    pub fn centered(&self) -> Self {
        let k = self.len() as i64;
        Self { indices: (-(k / 2)..k - k / 2).collect() }
    }
}

impl TryFrom<Vec<i64>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IndexSet> for Vec<i64> {
    fn from(s: IndexSet) -> Self {
        s.indices
    }
}

/// `A + B = {a + b}`.
pub fn minkowski_sum(a: &IndexSet, b: &IndexSet) -> IndexSet {
    let sums: BTreeSet<i64> = a.indices.iter().flat_map(|x| b.indices.iter().map(move |y| x + y)).collect();
    IndexSet { indices: sums.into_iter().collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BmCheck {
    /// `|A* + B*| <= |A + B|`.
    pub holds: bool,
    pub star_sum: usize,
    pub sum: usize,
}

/// Discrete Brunn-Minkowski comparison with exact cardinalities.
pub fn bm_check(a: &IndexSet, b: &IndexSet) -> BmCheck {
    let star_sum = minkowski_sum(&a.centered(), &b.centered()).len();
    let sum = minkowski_sum(a, b).len();
    BmCheck { holds: star_sum <= sum, star_sum, sum }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IndexSet {
        IndexSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(bm_check(&set(&[0, 1]), &set(&[0, 1])), BmCheck { holds: true, star_sum: 3, sum: 3 });
        assert_eq!(minkowski_sum(&set(&[0, 3]), &set(&[0, 1])).indices(), &[0, 1, 3, 4]);
        assert_eq!(bm_check(&set(&[0, 3]), &set(&[0, 1])), BmCheck { holds: true, star_sum: 3, sum: 4 });
        assert_eq!(bm_check(&set(&[5]), &set(&[-2])), BmCheck { holds: true, star_sum: 1, sum: 1 });
    }

    #[test]
    fn centering_ties_to_the_left() {
        assert_eq!(set(&[7, 9]).centered().indices(), &[-1, 0]);
        assert_eq!(set(&[1, 2, 8]).centered().indices(), &[-1, 0, 1]);
    }

    #[test]
    fn empty_sets_are_rejected() {
        assert!(IndexSet::new(Vec::new()).is_err());
        assert!(serde_json::from_str::<IndexSet>("[]").is_err());
        assert_eq!(serde_json::from_str::<IndexSet>("[3,1,3]").unwrap().indices(), &[1, 3]);
    }
}
