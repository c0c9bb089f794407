//! The Atiyah homomorphism, the naive-lifting decision with witnesses,
//! sections built from a cycle connection, the classical Atiyah map, the
//! Kodaira-Spencer homomorphism, and the condition table relating them.

mod atiyah;
mod fesox;
mod h0nu;
mod section;

use std::collections::BTreeMap;

use serde::Serialize;

pub use atiyah::{atiyah_map, n_omega, check_atiyah_identity, classical_atiyah, check_classical_identity, delta_bar};
pub use fesox::{decide_fesox, kodaira_spencer, check_kodaira_spencer, FesoxReport, KsHomotopy, solve_ks_homotopy};
pub use h0nu::{h0_nu_surjective, tensor_sequence, H0NuReport, TensorSequenceRow};
pub use section::{build_section_from_psi, check_section, sample_derivations};

use std::sync::Arc;

use crate::connections::{conn_differential, sample_elements, satisfies_rule, Connection};
use crate::derivations::{der_is_zero, universal_derivation};
use crate::dgmod::{
    hom_differential, hom_is_zero, same_hom, solve_null_homotopy, Certificate, GradedHom, Homotopy, SemifreeModule,
    Tensor,
};
use crate::enveloping::{Extension, JTarget};
use crate::gca::Element;
use crate::report::{Check, ValidationReport};
use crate::target::Target;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Liftable,
    NotLiftable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Liftable => "liftable",
            Verdict::NotLiftable => "not-liftable",
        }
    }
}

/// Outcome of the naive-lifting decision. The JSON shape has the stable
/// keys `verdict`, `witness_f`, `witness_psi`, `certificate`, `checks`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub verdict: Verdict,
    pub witness_f: Option<BTreeMap<String, String>>,
    pub witness_psi: Option<BTreeMap<String, String>>,
    pub certificate: Option<Certificate>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub homotopy: Option<GradedHom<Vec<Element>>>,
    #[serde(skip)]
    pub connection: Option<Connection<Element>>,
}

impl LiftReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `N ⊗_B J`.
pub fn nj_target(ext: &Extension, n: &Arc<SemifreeModule>) -> Tensor<JTarget> {
    Tensor::new(n.clone(), ext.j_target())
}

pub(crate) fn ensure_valid(ext: &Extension, n: &SemifreeModule) -> Result<(), Error> {
    if n.algebra().as_ref() != ext.algebra().as_ref() {
        return Err(Error::Mismatch("module is over a different algebra".into()));
    }
    let report = n.validate();
    if let Some(bad) = report.failures().next() {
        return Err(Error::Invalid {
            what: "module".into(),
            detail: format!("{} ({}): {}", bad.name, bad.subject, bad.detail),
        });
    }
    Ok(())
}

pub(crate) fn format_hom<X: Target>(n: &SemifreeModule, t: &X, f: &GradedHom<X::Elem>) -> BTreeMap<String, String> {
    f.images
        .iter()
        .enumerate()
        .map(|(lambda, y)| (n.name(lambda).to_string(), t.format(y)))
        .collect()
}

/// Checks that a connection satisfies the connection rule on `e_λ m`
/// (m of length at most one) against every generator.
pub(crate) fn rule_check<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>) -> bool {
    let n = nx.module();
    let b = n.algebra();
    sample_elements(n, 1)
        .iter()
        .all(|x| (0..b.num_generators()).all(|g| satisfies_rule(nx, psi, x, &b.gen(g))))
}

/// Decides whether N is naively liftable along `A → B` by solving
/// `∂^Hom(f) = α`. A solution yields the cycle δ-connection `f + φ(δ)`;
/// inconsistency yields a verified certificate. The system is finite, so
/// the verdict is exact.
pub fn decide_naive_lifting(ext: &Extension, n: &Arc<SemifreeModule>) -> Result<LiftReport, Error> {
    ensure_valid(ext, n)?;
    let nj = nj_target(ext, n);
    let alpha = atiyah_map(ext, n);
    let mut checks = ValidationReport::new();
    checks.record(
        "alpha-cycle",
        "α",
        hom_is_zero(&nj, &hom_differential(n, &nj, &alpha)),
        "",
    );
    checks.extend(check_atiyah_identity(ext, n));

    let delta = universal_derivation(ext.enveloping());
    match solve_null_homotopy(n, &nj, &alpha)? {
        Homotopy::Solved(f) => {
            let psi = Connection {
                derivation: delta.clone(),
                correction: f.clone(),
            };
            let dpsi = conn_differential(&nj, &psi);
            checks.record(
                "psi-cycle",
                "ψ",
                der_is_zero(nj.inner(), &dpsi.derivation) && hom_is_zero(&nj, &dpsi.correction),
                "",
            );
            checks.record("psi-rule", "ψ", rule_check(&nj, &psi), "");
            // back from ψ: f = ψ − φ(δ) must again be a homotopy for α
            let back = psi.correction.clone();
            checks.record(
                "f-from-psi",
                "f",
                same_hom(&nj, &hom_differential(n, &nj, &back), &alpha),
                "",
            );
            Ok(LiftReport {
                verdict: Verdict::Liftable,
                witness_f: Some(format_hom(n, &nj, &f)),
                witness_psi: Some(format_hom(n, &nj, &psi.correction)),
                certificate: None,
                checks: checks.checks,
                homotopy: Some(f),
                connection: Some(psi),
            })
        }
        Homotopy::NoSolution(cert) => {
            checks.record("certificate", "α", true, format!("pairing {}", cert.pairing));
            Ok(LiftReport {
                verdict: Verdict::NotLiftable,
                witness_f: None,
                witness_psi: None,
                certificate: Some(cert),
                checks: checks.checks,
                homotopy: None,
                connection: None,
            })
        }
    }
}
