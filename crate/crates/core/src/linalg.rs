//! Sparse exact linear algebra: reduced row echelon form with
//! deterministic pivoting, solving with inconsistency certificates, kernels.

use std::collections::BTreeMap;

use crate::scalar::{Field, Scalar};

/// Sparse vector indexed by column (or row) position.
pub type SparseVec = BTreeMap<usize, Scalar>;

/// `dst += c * src`, dropping cancelled entries.
pub fn axpy(dst: &mut SparseVec, src: &SparseVec, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    for (&k, v) in src {
        let add = v.mul(c);
        match dst.get_mut(&k) {
            Some(x) => {
                let s = x.add(&add);
                if s.is_zero() {
                    dst.remove(&k);
                } else {
                    *x = s;
                }
            }
            None => {
                dst.insert(k, add);
            }
        }
    }
}

pub fn scale(v: &mut SparseVec, c: &Scalar) {
    for x in v.values_mut() {
        *x = x.mul(c);
    }
}

pub fn dot(a: &SparseVec, b: &SparseVec, field: Field) -> Scalar {
    let mut acc = field.zero();
    for (k, x) in a {
        if let Some(y) = b.get(k) {
            acc = acc.add(&x.mul(y));
        }
    }
    acc
}

#[derive(Clone, Debug)]
struct Row {
    a: SparseVec,
    b: Scalar,
    hist: SparseVec,
}

/// Incremental Gauss-Jordan elimination. Rows are absorbed in order; each
/// new pivot sits in the first nonzero column of the reduced row and is
/// normalized to 1, and earlier pivot rows are cleared in that column, so
/// the stored rows are always the reduced row echelon form of what has
/// been pushed so far.
#[derive(Clone, Debug)]
pub struct Reducer {
    field: Field,
    track: bool,
    pivots: BTreeMap<usize, usize>,
    rows: Vec<Row>,
    pushed: usize,
    inconsistent: Option<SparseVec>,
}

impl Reducer {
    pub fn new(field: Field, track_history: bool) -> Self {
        Reducer {
            field,
            track: track_history,
            pivots: BTreeMap::new(),
            rows: Vec::new(),
            pushed: 0,
            inconsistent: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce(&self, row: &mut Row) {
        let hits: Vec<(usize, usize)> = row
            .a
            .keys()
            .filter_map(|c| self.pivots.get(c).map(|&r| (*c, r)))
            .collect();
        for (c, r) in hits {
            let coeff = match row.a.get(&c) {
                Some(x) => x.neg(),
                None => continue,
            };
            let p = &self.rows[r];
            axpy(&mut row.a, &p.a, &coeff);
            row.b = row.b.add(&p.b.mul(&coeff));
            if self.track {
                axpy(&mut row.hist, &p.hist, &coeff);
            }
        }
    }

    /// Reduces `v` modulo the current row space (no right-hand side).
    pub fn reduce_vector(&self, v: &SparseVec) -> SparseVec {
        let mut row = Row {
            a: v.clone(),
            b: self.field.zero(),
            hist: SparseVec::new(),
        };
        self.reduce(&mut row);
        row.a
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_vector(v).is_empty()
    }

    /// Absorbs a row `a · x = b`. Returns true when the row was independent.
    pub fn push(&mut self, a: SparseVec, b: Scalar) -> bool {
        let index = self.pushed;
        self.pushed += 1;
        let mut hist = SparseVec::new();
        if self.track {
            hist.insert(index, self.field.one());
        }
        let mut row = Row { a, b, hist };
        self.reduce(&mut row);
        let Some((&col, lead)) = row.a.iter().next() else {
            if !row.b.is_zero() && self.inconsistent.is_none() {
                self.inconsistent = Some(row.hist);
            }
            return false;
        };
        let inv = lead.inv();
        scale(&mut row.a, &inv);
        row.b = row.b.mul(&inv);
        if self.track {
            scale(&mut row.hist, &inv);
        }
        for other in self.rows.iter_mut() {
            if let Some(x) = other.a.get(&col) {
                let coeff = x.neg();
                axpy(&mut other.a, &row.a, &coeff);
                other.b = other.b.add(&row.b.mul(&coeff));
                if self.track {
                    axpy(&mut other.hist, &row.hist, &coeff);
                }
            }
        }
        self.pivots.insert(col, self.rows.len());
        self.rows.push(row);
        true
    }

    /// The particular solution with all free variables set to zero, or the
    /// first inconsistency found as a combination of the pushed rows.
    pub fn solution(&self) -> Result<SparseVec, SparseVec> {
        if let Some(cert) = &self.inconsistent {
            return Err(cert.clone());
        }
        let mut x = SparseVec::new();
        for (&col, &r) in &self.pivots {
            let b = &self.rows[r].b;
            if !b.is_zero() {
                x.insert(col, b.clone());
            }
        }
        Ok(x)
    }

    /// Kernel basis of the pushed rows over `ncols` unknowns, one vector
    /// per free column in increasing order.
    pub fn nullspace(&self, ncols: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for free in 0..ncols {
            if self.pivots.contains_key(&free) {
                continue;
            }
            let mut v = SparseVec::new();
            v.insert(free, self.field.one());
            for (&col, &r) in &self.pivots {
                if let Some(x) = self.rows[r].a.get(&free) {
                    v.insert(col, x.neg());
                }
            }
            out.push(v);
        }
        out
    }

    /// The nonzero rows of the reduced row echelon form.
    pub fn basis_rows(&self) -> Vec<SparseVec> {
        self.pivots.values().map(|&r| self.rows[r].a.clone()).collect()
    }
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Solved(SparseVec),
    /// A vector `y` over the rows with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent(SparseVec),
}

/// A linear system given by sparse rows.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub field: Field,
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
    pub rhs: Vec<Scalar>,
}

impl LinearSystem {
    pub fn new(field: Field, ncols: usize) -> Self {
        LinearSystem {
            field,
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn push(&mut self, row: SparseVec, b: Scalar) {
        self.rows.push(row);
        self.rhs.push(b);
    }

    pub fn from_columns(field: Field, nrows: usize, columns: &[SparseVec], rhs: &SparseVec) -> Self {
        let mut rows = vec![SparseVec::new(); nrows];
        for (j, col) in columns.iter().enumerate() {
            for (&i, x) in col {
                rows[i].insert(j, x.clone());
            }
        }
        let rhs = (0..nrows)
            .map(|i| rhs.get(&i).cloned().unwrap_or_else(|| field.zero()))
            .collect();
        LinearSystem {
            field,
            ncols: columns.len(),
            rows,
            rhs,
        }
    }

    fn reduced(&self, track: bool) -> Reducer {
        let mut red = Reducer::new(self.field, track);
        for (r, b) in self.rows.iter().zip(&self.rhs) {
            red.push(r.clone(), b.clone());
        }
        red
    }

    pub fn solve(&self) -> Solution {
        match self.reduced(true).solution() {
            Ok(x) => Solution::Solved(x),
            Err(y) => Solution::Inconsistent(y),
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced(false).rank()
    }

    pub fn nullspace(&self) -> Vec<SparseVec> {
        self.reduced(false).nullspace(self.ncols)
    }

    /// `A x` as a dense list of row values.
    pub fn apply(&self, x: &SparseVec) -> Vec<Scalar> {
        self.rows.iter().map(|r| dot(r, x, self.field)).collect()
    }

    pub fn is_solution(&self, x: &SparseVec) -> bool {
        self.apply(x).iter().zip(&self.rhs).all(|(l, r)| l == r)
    }

    /// Checks `yᵀA = 0` and `yᵀb ≠ 0`.
    pub fn is_certificate(&self, y: &SparseVec) -> bool {
        let mut combo = SparseVec::new();
        let mut rhs = self.field.zero();
        for (&i, c) in y {
            axpy(&mut combo, &self.rows[i], c);
            rhs = rhs.add(&self.rhs[i].mul(c));
        }
        combo.is_empty() && !rhs.is_zero()
    }
}

/// A linear system whose equations are labelled by sortable keys. Columns
/// are supplied as lists of `(key, coefficient)`; the row order is the
/// sorted key order, which keeps witnesses independent of assembly order.
#[derive(Clone, Debug)]
pub struct KeyedSystem<K: Ord + Clone> {
    pub keys: Vec<K>,
    pub system: LinearSystem,
}

impl<K: Ord + Clone> KeyedSystem<K> {
    pub fn new(field: Field, columns: Vec<Vec<(K, Scalar)>>, rhs: Vec<(K, Scalar)>) -> Self {
        let mut index: BTreeMap<K, usize> = BTreeMap::new();
        for (k, _) in columns.iter().flatten().chain(rhs.iter()) {
            index.entry(k.clone()).or_insert(0);
        }
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let cols: Vec<SparseVec> = columns
            .into_iter()
            .map(|col| {
                let mut v = SparseVec::new();
                for (k, x) in col {
                    let e = v.entry(index[&k]).or_insert_with(|| field.zero());
                    *e = e.add(&x);
                }
                v.retain(|_, x| !x.is_zero());
                v
            })
            .collect();
        let mut b = SparseVec::new();
        for (k, x) in rhs {
            let e = b.entry(index[&k]).or_insert_with(|| field.zero());
            *e = e.add(&x);
        }
        b.retain(|_, x| !x.is_zero());
        let system = LinearSystem::from_columns(field, index.len(), &cols, &b);
        KeyedSystem {
            keys: index.into_keys().collect(),
            system,
        }
    }

    /// Certificate rows translated back to their keys.
    pub fn keyed(&self, y: &SparseVec) -> Vec<(K, Scalar)> {
        y.iter().map(|(&i, c)| (self.keys[i].clone(), c.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(field: Field, entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(i, x)| (i, field.from_i64(x))).collect()
    }

    #[test]
    fn solves_small_system() {
        let q = Field::Rationals;
        let mut s = LinearSystem::new(q, 2);
        s.push(v(q, &[(0, 1), (1, 1)]), q.from_i64(3));
        s.push(v(q, &[(0, 1), (1, -1)]), q.from_i64(1));
        match s.solve() {
            Solution::Solved(x) => {
                assert_eq!(x, v(q, &[(0, 2), (1, 1)]));
                assert!(s.is_solution(&x));
            }
            Solution::Inconsistent(_) => panic!("system is consistent"),
        }
    }

    #[test]
    fn inconsistent_system_has_certificate() {
        let q = Field::Rationals;
        let mut s = LinearSystem::new(q, 2);
        s.push(v(q, &[(0, 1), (1, 2)]), q.from_i64(1));
        s.push(v(q, &[(0, 2), (1, 4)]), q.from_i64(3));
        match s.solve() {
            Solution::Inconsistent(y) => assert!(s.is_certificate(&y)),
            Solution::Solved(_) => panic!("system is inconsistent"),
        }
    }

    #[test]
    fn nullspace_dimension() {
        let f = Field::Prime(5);
        let mut s = LinearSystem::new(f, 3);
        s.push(v(f, &[(0, 1), (1, 1), (2, 1)]), f.zero());
        s.push(v(f, &[(0, 2), (1, 2), (2, 2)]), f.zero());
        let ns = s.nullspace();
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(s.is_solution(x));
        }
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn keyed_rows_are_sorted() {
        let q = Field::Rationals;
        let ks = KeyedSystem::new(
            q,
            vec![vec![("b", q.one())], vec![("a", q.one()), ("b", q.one())]],
            vec![("a", q.from_i64(2))],
        );
        assert_eq!(ks.keys, vec!["a", "b"]);
        match ks.system.solve() {
            Solution::Solved(x) => assert_eq!(x, v(q, &[(0, -2), (1, 2)])),
            Solution::Inconsistent(_) => panic!(),
        }
    }
}
