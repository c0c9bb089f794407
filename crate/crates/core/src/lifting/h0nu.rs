use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::connections::{conn_differential, trivial};
use crate::derivations::{der_basis, der_coords, der_differential};
use crate::dgmod::{elementary_differential, hom_basis, hom_space_size, SemifreeModule, Tensor, MAX_UNKNOWNS};
use crate::derivations::der_space_size;
use crate::enveloping::{EnvTarget, Extension};
use crate::gca::{Element, Monomial};
use crate::linalg::{LinearSystem, Reducer, SparseVec};
use crate::scalar::Scalar;
use crate::target::Target;
use crate::Error;

use super::{decide_naive_lifting, ensure_valid, nj_target, Verdict};

#[derive(Clone, Debug, Serialize)]
pub struct H0NuReport {
    pub dim_z0_der: usize,
    pub dim_b0_der: usize,
    pub dim_z0_conn: usize,
    /// Rank of `ν(Z_0 Conn) + B_0 Der` inside `Z_0 Der`.
    pub image_rank: usize,
    pub surjective: bool,
    pub verdict: Verdict,
    /// False only if H_0(ν) is surjective while the lifting verdict is
    /// negative.
    pub consistent: bool,
}

/// Assigns dense indices to sparse keys.
struct Indexer<K: Ord> {
    index: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Indexer<K> {
    fn new() -> Self {
        Indexer { index: BTreeMap::new() }
    }

    fn vector(&mut self, entries: impl IntoIterator<Item = (K, Scalar)>) -> SparseVec {
        let mut v = SparseVec::new();
        for (k, c) in entries {
            let n = self.index.len();
            let i = *self.index.entry(k).or_insert(n);
            let e = v.entry(i).or_insert_with(|| c.field().zero());
            *e = e.add(&c);
        }
        v.retain(|_, c| !c.is_zero());
        v
    }
}

fn rank_of(field: crate::scalar::Field, vs: &[SparseVec]) -> usize {
    let mut r = Reducer::new(field, false);
    for v in vs {
        r.push(v.clone(), field.zero());
    }
    r.rank()
}

/// Whether `H_0(ν): H_0 Conn(N, N⊗J) → H_0 Der_A(B, J)` is surjective; if
/// it is, N must be naively liftable, and the report records whether the
/// lifting decision agrees.
///
/// `Conn_0` is coordinatized as `Hom_0 ⊕ Der_0` through `(f, D) ↦ f + φ(D)`,
/// and `∂^Conn(f + φ(D)) = (∂^Hom f + κ_J(D), ∂^Der D)`.
pub fn h0_nu_surjective(ext: &Extension, n: &Arc<SemifreeModule>) -> Result<H0NuReport, Error> {
    ensure_valid(ext, n)?;
    let nj = nj_target(ext, n);
    let j = nj.inner();
    let field = ext.algebra().field();
    let size = hom_space_size(n, &nj, 0) + der_space_size(j, 0) + der_space_size(j, 1);
    if size > MAX_UNKNOWNS {
        return Err(Error::ResourceLimit(format!("H_0(ν) needs {size} unknowns")));
    }
    let homs = hom_basis(n, &nj, 0);
    let ders = der_basis(j, 0);

    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Key {
        Hom(usize, (usize, Monomial)),
        Der(usize, Monomial),
    }

    // columns of ∂^Conn on Conn_0
    let mut idx = Indexer::new();
    let mut columns = Vec::new();
    for (lambda, y) in &homs {
        let col = elementary_differential(n, &nj, 0, *lambda, y)
            .into_iter()
            .map(|((nu, k), c)| (Key::Hom(nu, k), c));
        columns.push(idx.vector(col));
    }
    for d in &ders {
        let dc = conn_differential(&nj, &trivial(&nj, d));
        let mut col: Vec<(Key, Scalar)> = Vec::new();
        for (nu, img) in dc.correction.images.iter().enumerate() {
            for (key, c) in nj.coords(img) {
                col.push((Key::Hom(nu, key), c));
            }
        }
        for ((kk, m), c) in der_coords(j, &dc.derivation) {
            col.push((Key::Der(kk, m), c));
        }
        columns.push(idx.vector(col));
    }
    let nrows = idx.index.len();
    let conn_system = LinearSystem::from_columns(field, nrows, &columns, &SparseVec::new());
    let cycles = if columns.is_empty() { Vec::new() } else { conn_system.nullspace() };
    let dim_z0_conn = cycles.len();

    // Der_0 in ambient coordinates
    let mut didx = Indexer::new();
    let der_vecs: Vec<SparseVec> = ders
        .iter()
        .map(|d| didx.vector(der_coords(j, d)))
        .collect();
    let nu_images: Vec<SparseVec> = cycles
        .iter()
        .map(|v| {
            let mut out = SparseVec::new();
            for (&col, c) in v {
                if col >= homs.len() {
                    crate::linalg::axpy(&mut out, &der_vecs[col - homs.len()], c);
                }
            }
            out
        })
        .collect();
    let boundaries: Vec<SparseVec> = der_basis(j, 1)
        .iter()
        .map(|d| didx.vector(der_coords(j, &der_differential(j, d))))
        .collect();

    // Z_0 Der = kernel of ∂^Der on Der_0
    let mut zidx = Indexer::new();
    let dcols: Vec<SparseVec> = ders
        .iter()
        .map(|d| zidx.vector(der_coords(j, &der_differential(j, d))))
        .collect();
    let dim_z0_der = ders.len() - rank_of(field, &dcols);
    let dim_b0_der = rank_of(field, &boundaries);
    let mut all = nu_images.clone();
    all.extend(boundaries);
    let image_rank = rank_of(field, &all);
    let surjective = image_rank == dim_z0_der;
    let verdict = decide_naive_lifting(ext, n)?.verdict;
    Ok(H0NuReport {
        dim_z0_der,
        dim_b0_der,
        dim_z0_conn,
        image_rank,
        surjective,
        verdict,
        consistent: !surjective || verdict == Verdict::Liftable,
    })
}

/// One degree of `0 → N⊗_B J → N⊗_B B^e → N → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorSequenceRow {
    pub degree: i32,
    pub dim_nj: usize,
    pub dim_nbe: usize,
    pub dim_n: usize,
    pub rank_pi: usize,
    pub pi_chain_map: bool,
}

impl TensorSequenceRow {
    pub fn exact(&self) -> bool {
        self.rank_pi == self.dim_n && self.dim_nbe == self.dim_nj + self.dim_n && self.pi_chain_map
    }
}

/// Degree-wise exactness of `0 → N⊗_B J → N⊗_A B → N → 0`, with
/// `N⊗_A B = N⊗_B B^e` and `π_N(e_λ ⊗ m) = e_λ π_B(m)`. J is a subspace
/// of B^e, so the inclusion is injective; the sequence is exact at the
/// middle iff `rank π_N = dim (N⊗B^e)_d − dim (N⊗J)_d`.
pub fn tensor_sequence(ext: &Extension, n: &Arc<SemifreeModule>, lo: i32, hi: i32) -> Result<Vec<TensorSequenceRow>, Error> {
    ensure_valid(ext, n)?;
    let env = ext.enveloping();
    let nj = nj_target(ext, n);
    let ne = Tensor::new(n.clone(), EnvTarget::new(env.clone()));
    let nbt = Tensor::new(n.clone(), ext.b_target());
    let field = ext.algebra().field();
    let pi = |v: &Vec<Element>| -> Vec<Element> { v.iter().map(|m| env.pi(m)).collect() };
    (lo..=hi)
        .map(|d| {
            let basis = ne.basis(d);
            let mut idx = Indexer::new();
            let images: Vec<SparseVec> = basis.iter().map(|v| idx.vector(nbt.coords(&pi(v)))).collect();
            let pi_chain_map = basis.iter().all(|v| {
                let a = pi(&ne.differential(v));
                let b = nbt.differential(&pi(v));
                nbt.is_zero(&nbt.sub(&a, &b))
            });
            Ok(TensorSequenceRow {
                degree: d,
                dim_nj: nj.basis(d).len(),
                dim_nbe: basis.len(),
                dim_n: nbt.basis(d).len(),
                rank_pi: rank_of(field, &images),
                pi_chain_map,
            })
        })
        .collect()
}
