use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::KeyedSystem;
use crate::scalar::{Field, Scalar};
use crate::target::Target;
use crate::{par, Error};

/// Dimensions and differential ranks of a complex over a degree window.
/// `rank[d]` is the rank of the differential leaving degree `d`; it is
/// recorded for `lo..=hi+1` so homology is available on all of `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexSlice {
    pub lo: i32,
    pub hi: i32,
    pub dims: BTreeMap<i32, usize>,
    pub ranks: BTreeMap<i32, usize>,
}

impl ComplexSlice {
    /// Builds a slice from a per-degree description: the dimension of the
    /// piece and the ambient coordinates of the differential of each basis
    /// vector (in any injective coordinates of the next piece down).
    pub fn build<K: Ord + Clone + Send>(
        field: Field,
        lo: i32,
        hi: i32,
        piece: impl Fn(i32) -> (usize, Vec<Vec<(K, Scalar)>>) + Sync + Send,
    ) -> ComplexSlice {
        let degrees: Vec<i32> = (lo..=hi + 1).collect();
        let pieces = par::map(&degrees, |&d| {
            let (dim, cols) = piece(d);
            let rank = if cols.is_empty() {
                0
            } else {
                KeyedSystem::new(field, cols, Vec::new()).system.rank()
            };
            (d, dim, rank)
        });
        let mut dims = BTreeMap::new();
        let mut ranks = BTreeMap::new();
        for (d, dim, rank) in pieces {
            if d <= hi {
                dims.insert(d, dim);
            }
            ranks.insert(d, rank);
        }
        ComplexSlice { lo, hi, dims, ranks }
    }

    /// The graded pieces of a target complex, with `∂∘∂ = 0` checked on
    /// every basis vector.
    pub fn from_target<T: Target>(t: &T, lo: i32, hi: i32) -> Result<ComplexSlice, Error> {
        let failures = std::sync::atomic::AtomicUsize::new(0);
        let slice = ComplexSlice::build(t.field(), lo, hi, |d| {
            let basis = t.basis(d);
            let cols = basis
                .iter()
                .map(|y| {
                    let dy = t.differential(y);
                    if !t.is_zero(&t.differential(&dy)) {
                        failures.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    }
                    t.coords(&dy)
                })
                .collect();
            (basis.len(), cols)
        });
        match failures.into_inner() {
            0 => Ok(slice),
            k => Err(Error::Internal(format!("differential squares to nonzero on {k} basis vectors"))),
        }
    }

    pub fn dim(&self, d: i32) -> Option<usize> {
        self.dims.get(&d).copied()
    }

    /// `dim ker ∂_d − rank ∂_{d+1}`.
    pub fn homology_dimension(&self, d: i32) -> Result<usize, Error> {
        if d < self.lo || d > self.hi {
            return Err(Error::Window(format!("degree {d} outside [{}, {}]", self.lo, self.hi)));
        }
        let dim = self.dims[&d];
        let out = self.ranks[&d];
        let incoming = self.ranks[&(d + 1)];
        Ok(dim - out - incoming)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_differential_homology_is_dimension() {
        let s = ComplexSlice::build::<usize>(Field::Rationals, 0, 2, |d| (d as usize + 1, Vec::new()));
        assert_eq!(s.homology_dimension(1).unwrap(), 2);
        assert!(s.homology_dimension(3).is_err());
    }

    #[test]
    fn exact_slice_has_no_homology() {
        // 0 -> Q -> Q -> 0 with identity in the middle
        let q = Field::Rationals;
        let s = ComplexSlice::build(q, 0, 1, |d| match d {
            1 => (1, vec![vec![(0usize, q.one())]]),
            0 => (1, vec![vec![]]),
            _ => (0, Vec::new()),
        });
        assert_eq!(s.homology_dimension(0).unwrap(), 0);
        assert_eq!(s.homology_dimension(1).unwrap(), 0);
    }
}
