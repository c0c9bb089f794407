//! Dense reference solver for null-homotopy problems. It assembles the full
//! system `∂ h(e_ν) − h(∂ e_ν) = g(e_ν)` from the target's scalar bases and
//! decides consistency by Gauss-Jordan elimination over `BigRational`.

use std::collections::BTreeMap;

use dglift::dgmod::{GradedHom, SemifreeModule};
use dglift::scalar::Scalar;
use dglift::target::Target;
use num_rational::BigRational;
use num_traits::Zero;

fn rational(c: &Scalar) -> BigRational {
    match c {
        Scalar::Q(r) => r.clone(),
        Scalar::Fp(..) => panic!("the oracle works over the rationals"),
    }
}

fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Whether some degree-`|g|+1` B-linear `h` has `∂^Hom(h) = g`.
pub fn null_homotopic<T: Target>(n: &SemifreeModule, t: &T, g: &GradedHom<T::Elem>) -> bool {
    let degree = g.degree + 1;
    let odd = degree.rem_euclid(2) == 1;
    let mut rows: BTreeMap<(usize, T::Key), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<((usize, T::Key), BigRational)>> = Vec::new();
    for lambda in 0..n.rank() {
        for y in t.basis(n.degree(lambda) + degree) {
            let mut col = Vec::new();
            for (k, c) in t.coords(&t.differential(&y)) {
                col.push(((lambda, k), rational(&c)));
            }
            // h(∂ e_ν) picks up y·b_{λν} wherever e_λ occurs in ∂ e_ν
            for nu in 0..n.rank() {
                let b = n.coefficient(lambda, nu);
                if b.is_zero() {
                    continue;
                }
                for (k, c) in t.coords(&t.right_mul(&y, b)) {
                    let c = rational(&c);
                    col.push(((nu, k), if odd { c } else { -c }));
                }
            }
            columns.push(col);
        }
    }
    let rhs: Vec<((usize, T::Key), BigRational)> = g
        .images
        .iter()
        .enumerate()
        .flat_map(|(nu, y)| t.coords(y).into_iter().map(move |(k, c)| ((nu, k), rational(&c))))
        .collect();
    for (key, _) in columns.iter().flatten().chain(&rhs) {
        let len = rows.len();
        rows.entry(key.clone()).or_insert(len);
    }
    let mut a = vec![vec![BigRational::zero(); columns.len() + 1]; rows.len()];
    for (j, col) in columns.iter().enumerate() {
        for (key, c) in col {
            let i = rows[key];
            a[i][j] = &a[i][j] + c;
        }
    }
    let last = columns.len();
    for (key, c) in &rhs {
        let i = rows[key];
        a[i][last] = &a[i][last] + c;
    }
    let without: Vec<Vec<BigRational>> = a.iter().map(|r| r[..last].to_vec()).collect();
    rank(without) == rank(a)
}
