use std::sync::Arc;

use crate::connections::{conn_differential, conn_differential_at, trivial};
use crate::derivations::{der_is_zero, evaluate, universal_derivation, Derivation};
use crate::dgmod::{hom_differential, hom_is_zero, GradedHom, ModuleElement, SemifreeModule, Tensor};
use crate::enveloping::Extension;
use crate::gca::Element;
use crate::report::ValidationReport;
use crate::target::{AlgebraTarget, Target};

use super::nj_target;

/// `α(e_λ) = Σ_μ e_μ ⊗ δ(b_{μλ})`, a degree −1 map `N → N ⊗_B J`.
pub fn atiyah_map(ext: &Extension, n: &SemifreeModule) -> GradedHom<Vec<Element>> {
    let env = ext.enveloping();
    let images = (0..n.rank())
        .map(|lambda| {
            (0..n.rank())
                .map(|mu| env.delta(n.coefficient(mu, lambda)))
                .collect()
        })
        .collect();
    GradedHom { degree: -1, images }
}

/// `α = −∂^Conn(φ(δ))` on every basis element, with the right-hand side
/// evaluated both from the stored decomposition and from the defining
/// formula.
pub fn check_atiyah_identity(ext: &Extension, n: &Arc<SemifreeModule>) -> ValidationReport {
    let nj = nj_target(ext, n);
    let alpha = atiyah_map(ext, n);
    let delta = universal_derivation(ext.enveloping());
    let phi = trivial(&nj, &delta);
    let d = conn_differential(&nj, &phi);
    let mut report = ValidationReport::new();
    report.record(
        "delta-cycle",
        "δ",
        der_is_zero(nj.inner(), &d.derivation),
        "",
    );
    for lambda in 0..n.rank() {
        let direct = conn_differential_at(&nj, &phi, &n.basis_element(lambda));
        let ok = nj.is_zero(&nj.add(&alpha.images[lambda], &d.correction.images[lambda]))
            && nj.is_zero(&nj.add(&alpha.images[lambda], &direct));
        report.record(
            "atiyah-identity",
            n.name(lambda),
            ok,
            if ok {
                String::new()
            } else {
                format!("α = {} but ∂^Conn φ(δ) = {}", nj.format(&alpha.images[lambda]), nj.format(&direct))
            },
        );
    }
    report
}

/// `δ̄ = π ∘ δ` as a derivation into Ω: `X_k ↦ u_k`.
pub fn delta_bar(ext: &Extension) -> Derivation<ModuleElement> {
    let omega = ext.omega().module();
    Derivation {
        degree: 0,
        images: (0..omega.rank()).map(|k| omega.basis_element(k)).collect(),
    }
}

/// `N ⊗_B Ω`.
pub fn n_omega(ext: &Extension, n: &Arc<SemifreeModule>) -> Tensor<Tensor<AlgebraTarget>> {
    Tensor::new(n.clone(), ext.omega_target())
}

/// `ᾱ = (id ⊗ π) ∘ α`: `ᾱ(e_λ) = Σ_μ e_μ ⊗ δ̄(b_{μλ})`.
pub fn classical_atiyah(ext: &Extension, n: &SemifreeModule) -> GradedHom<Vec<ModuleElement>> {
    let env = ext.enveloping();
    let omega = ext.omega();
    let images = (0..n.rank())
        .map(|lambda| {
            (0..n.rank())
                .map(|mu| omega.delta_bar(env, n.coefficient(mu, lambda)))
                .collect()
        })
        .collect();
    GradedHom { degree: -1, images }
}

/// `ᾱ = −∂^Conn(φ(δ̄))`, `ᾱ` a cycle, and `ᾱ` agreeing with the projection
/// of α computed through J.
pub fn check_classical_identity(ext: &Extension, n: &Arc<SemifreeModule>) -> ValidationReport {
    let env = ext.enveloping();
    let no = n_omega(ext, n);
    let abar = classical_atiyah(ext, n);
    let alpha = atiyah_map(ext, n);
    let db = delta_bar(ext);
    let phi = trivial(&no, &db);
    let d = conn_differential(&no, &phi);
    let mut report = ValidationReport::new();
    report.record("delta-bar-cycle", "δ̄", der_is_zero(no.inner(), &d.derivation), "");
    report.record(
        "alpha-bar-cycle",
        "ᾱ",
        hom_is_zero(&no, &hom_differential(n, &no, &abar)),
        "",
    );
    for lambda in 0..n.rank() {
        let ok = no.is_zero(&no.add(&abar.images[lambda], &d.correction.images[lambda]));
        report.record("classical-atiyah-identity", n.name(lambda), ok, "");
        let projected: Vec<ModuleElement> = alpha.images[lambda]
            .iter()
            .map(|j| ext.omega().project(env, j))
            .collect::<Result<_, _>>()
            .unwrap_or_default();
        let ok = projected.len() == n.rank() && no.is_zero(&no.sub(&projected, &abar.images[lambda]));
        report.record("alpha-bar-projection", n.name(lambda), ok, "");
    }
    // δ̄ as a derivation agrees with the projection of δ on the coefficients
    let ot = ext.omega_target();
    for lambda in 0..n.rank() {
        for mu in 0..n.rank() {
            let b = n.coefficient(mu, lambda);
            let ok = ot.is_zero(&ot.sub(&evaluate(&ot, &db, b), &ext.omega().delta_bar(env, b)));
            if !ok {
                report.record("delta-bar-derivation", n.name(lambda), false, "");
            }
        }
    }
    report
}
