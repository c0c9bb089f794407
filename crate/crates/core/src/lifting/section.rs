use std::sync::Arc;

use rand::Rng;

use crate::connections::{apply, conn_differential, sample_elements, Connection};
use crate::derivations::{der_add, der_basis, der_scale, der_differential, der_is_zero, der_sub, Derivation, VarpiInverse};
use crate::dgmod::{hom_sub, hom_is_zero, GradedHom, SemifreeModule, Tensor};
use crate::enveloping::{EnvAction, Extension};
use crate::gca::Element;
use crate::report::ValidationReport;
use crate::target::Target;
use crate::Error;

use super::{nj_target, rule_check};

/// `Ψ(D)(x) = (id_N ⊗ ϖ⁻¹(D))(ψ(x))`, evaluated on an arbitrary element.
fn composite<X: EnvAction + Clone>(
    ext: &Extension,
    nj: &Tensor<crate::enveloping::JTarget>,
    nx: &Tensor<X>,
    psi: &Connection<Element>,
    d: &Derivation<X::Elem>,
    x: &crate::dgmod::ModuleElement,
) -> Result<Vec<X::Elem>, Error> {
    let env = ext.enveloping();
    let f = VarpiInverse::new(nx.inner(), d);
    let n = nx.module();
    apply(nj, psi, x)
        .iter()
        .enumerate()
        .map(|(mu, j)| {
            let y = f.apply(env, j)?;
            Ok(nx.inner().signed(&y, d.is_odd() && n.is_odd(mu)))
        })
        .collect()
}

/// The D-connection `Ψ(D) = (id_N ⊗ ϖ⁻¹(D)) ∘ ψ` for a δ-connection ψ.
pub fn build_section_from_psi<X: EnvAction + Clone>(
    ext: &Extension,
    n: &Arc<SemifreeModule>,
    psi: &Connection<Element>,
    x: &X,
    d: &Derivation<X::Elem>,
) -> Result<Connection<X::Elem>, Error> {
    let nj = nj_target(ext, n);
    let nx = Tensor::new(n.clone(), x.clone());
    let images = (0..n.rank())
        .map(|lambda| composite(ext, &nj, &nx, psi, d, &n.basis_element(lambda)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Connection {
        derivation: d.clone(),
        correction: GradedHom {
            degree: d.degree,
            images,
        },
    })
}

/// Re-verifies, for each sampled D, that `Ψ(D)` is a D-connection (the
/// composite agrees with the stored form on `e_λ m` and obeys the rule),
/// that `ν Ψ(D) = D`, and that `∂^Conn Ψ(D) = Ψ(∂^Der D)`.
pub fn check_section<X: EnvAction + Clone>(
    ext: &Extension,
    n: &Arc<SemifreeModule>,
    psi: &Connection<Element>,
    x: &X,
    derivations: &[Derivation<X::Elem>],
) -> Result<ValidationReport, Error> {
    let nj = nj_target(ext, n);
    let dpsi = conn_differential(&nj, psi);
    if !der_is_zero(nj.inner(), &dpsi.derivation) || !hom_is_zero(&nj, &dpsi.correction) {
        return Err(Error::Hypothesis("ψ is not a cycle".into()));
    }
    let nx = Tensor::new(n.clone(), x.clone());
    let samples = sample_elements(n, 2);
    let mut report = ValidationReport::new();
    for (i, d) in derivations.iter().enumerate() {
        let subject = format!("D{i}");
        let big = build_section_from_psi(ext, n, psi, x, d)?;
        let mut agrees = true;
        for s in &samples {
            let direct = composite(ext, &nj, &nx, psi, d, s)?;
            if !nx.is_zero(&nx.sub(&direct, &apply(&nx, &big, s))) {
                agrees = false;
                break;
            }
        }
        report.record("section-connection", &subject, agrees && rule_check(&nx, &big), "");
        report.record("section-nu", &subject, big.nu() == d, "");
        let lhs = conn_differential(&nx, &big);
        let rhs = build_section_from_psi(ext, n, psi, x, &der_differential(x, d))?;
        let ok = der_is_zero(x, &der_sub(x, &lhs.derivation, &rhs.derivation))
            && hom_is_zero(&nx, &hom_sub(&nx, &lhs.correction, &rhs.correction));
        report.record("section-dg", &subject, ok, "");
    }
    Ok(report)
}

/// Random homogeneous derivations into `x` with degrees in `lo..=hi`,
/// each a combination of up to three basis derivations with small integer
/// coefficients.
pub fn sample_derivations<X: Target>(
    x: &X,
    lo: i32,
    hi: i32,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<Derivation<X::Elem>> {
    let pools: Vec<(i32, Vec<Derivation<X::Elem>>)> = (lo..=hi)
        .map(|d| (d, der_basis(x, d)))
        .filter(|(_, b)| !b.is_empty())
        .collect();
    if pools.is_empty() {
        return Vec::new();
    }
    let field = x.field();
    (0..count)
        .map(|_| {
            let (degree, pool) = &pools[rng.gen_range(0..pools.len())];
            let mut d = Derivation::zero(x, *degree);
            for _ in 0..rng.gen_range(1..=3) {
                let e = &pool[rng.gen_range(0..pool.len())];
                let c = field.from_i64(rng.gen_range(-3..=3));
                d = der_add(x, &d, &der_scale(x, e, &c));
            }
            d
        })
        .collect()
}
