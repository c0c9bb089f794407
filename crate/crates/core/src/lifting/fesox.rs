use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::connections::{apply, apply_trivial, conn_differential, conn_differential_at, sample_elements, trivial, Connection};
use crate::derivations::{der_differential, der_is_zero, dual_basis, Derivation};
use crate::dgmod::{
    apply as hom_apply, elementary_differential, hom_basis, hom_differential, hom_is_zero, hom_left_mul, hom_space_size,
    same_hom, solve_null_homotopy, Certificate, GradedHom, Homotopy, ModuleElement, SemifreeModule, Tensor, MAX_UNKNOWNS,
};
use crate::enveloping::Extension;
use crate::gca::Element;
use crate::linalg::{KeyedSystem, Solution};
use crate::report::{Check, ValidationReport};
use crate::target::{AlgebraTarget, Target};
use crate::{par, Error};

use super::atiyah::{classical_atiyah, delta_bar, n_omega};
use super::{check_classical_identity, ensure_valid, format_hom, rule_check};

fn nb_target(ext: &Extension, n: &Arc<SemifreeModule>) -> Tensor<AlgebraTarget> {
    Tensor::new(n.clone(), ext.b_target())
}

fn odd(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

/// `κ(D) = [∂^N, φ(D)] − φ([d^B, D])`, the B-linear map `N → N` of degree
/// `|D| − 1` given on the basis.
pub fn kodaira_spencer(ext: &Extension, n: &Arc<SemifreeModule>, d: &Derivation<Element>) -> GradedHom<ModuleElement> {
    let nb = nb_target(ext, n);
    conn_differential(&nb, &trivial(&nb, d)).correction
}

/// For each D: κ(D) agrees with the bracket formula on `e_λ m` (so the
/// bracket difference is B-linear), and `∂^End κ(D) = −κ(∂^Der D)`.
pub fn check_kodaira_spencer(ext: &Extension, n: &Arc<SemifreeModule>, ds: &[Derivation<Element>]) -> ValidationReport {
    let nb = nb_target(ext, n);
    let samples = sample_elements(n, 2);
    let mut report = ValidationReport::new();
    for (i, d) in ds.iter().enumerate() {
        let subject = format!("D{i}");
        let kappa = kodaira_spencer(ext, n, d);
        let phi = trivial(&nb, d);
        let dd = der_differential(nb.inner(), d);
        let linear = samples.iter().all(|x| {
            let direct = nb.sub(&conn_differential_at(&nb, &phi, x), &apply_trivial(&nb, &dd, x));
            nb.is_zero(&nb.sub(&direct, &hom_apply(&nb, &kappa, x)))
        });
        report.record("ks-b-linear", &subject, linear, "");
        let lhs = hom_differential(n, &nb, &kappa);
        let rhs = kodaira_spencer(ext, n, &dd);
        let ok = lhs.images.iter().zip(&rhs.images).all(|(a, b)| nb.is_zero(&nb.add(a, b)));
        report.record("ks-chain-map", &subject, ok, "");
    }
    report
}

#[derive(Clone, Debug)]
pub enum KsHomotopy {
    /// `h_λ = H(∂_λ)` for each dual-basis derivation.
    Solved(Vec<GradedHom<ModuleElement>>),
    NoSolution(Certificate),
}

/// Checks `κ(∂_λ) = ∂^End(h_λ) − (-1)^{|u_λ|+1} Σ_υ c_{λυ} h_υ` for every λ,
/// i.e. that `∂_λ ↦ h_λ` is a null-homotopy of κ.
fn ks_equations_hold(ext: &Extension, n: &Arc<SemifreeModule>, h: &[GradedHom<ModuleElement>]) -> bool {
    let nb = nb_target(ext, n);
    let b = ext.algebra();
    let omega = ext.omega();
    let dual = dual_basis(b);
    dual.iter().enumerate().all(|(lam, d)| {
        let kappa = kodaira_spencer(ext, n, d);
        let u_lam = omega.module().degree(lam);
        let mut rhs = hom_differential(n, &nb, &h[lam]);
        for (ups, hu) in h.iter().enumerate() {
            let c = omega.coefficient(lam, ups);
            if c.is_zero() {
                continue;
            }
            let c_deg = omega.module().degree(ups) - u_lam - 1;
            let term = hom_left_mul(&nb, c, hu, c_deg);
            // −(-1)^{|u_λ|+1} = (-1)^{|u_λ|}
            for (r, t) in rhs.images.iter_mut().zip(&term.images) {
                *r = nb.add(r, &nb.signed(t, odd(u_lam)));
            }
        }
        same_hom(&nb, &kappa, &rhs)
    })
}

/// Solves for a null-homotopy of κ: one B-linear `h_λ` of degree `−|u_λ|`
/// per dual-basis derivation. The system is finite and solved exactly.
pub fn solve_ks_homotopy(ext: &Extension, n: &Arc<SemifreeModule>) -> Result<KsHomotopy, Error> {
    let nb = nb_target(ext, n);
    let b = ext.algebra();
    let omega = ext.omega();
    let om = omega.module();
    let dual = dual_basis(b);
    let size: usize = (0..om.rank()).map(|u| hom_space_size(n, &nb, -om.degree(u))).sum();
    if size > MAX_UNKNOWNS {
        return Err(Error::ResourceLimit(format!(
            "κ homotopy system would have up to {size} unknowns (limit {MAX_UNKNOWNS})"
        )));
    }
    let unknowns: Vec<(usize, usize, ModuleElement)> = (0..om.rank())
        .flat_map(|ups| {
            hom_basis(n, &nb, -om.degree(ups))
                .into_iter()
                .map(move |(nu, y)| (ups, nu, y))
        })
        .collect();
    let columns = par::map(&unknowns, |(ups, nu, y)| {
        let deg = -om.degree(*ups);
        let mut col: Vec<((usize, (usize, (usize, crate::gca::Monomial))), crate::scalar::Scalar)> =
            elementary_differential(n, &nb, deg, *nu, y)
                .into_iter()
                .map(|(k, c)| ((*ups, k), c))
                .collect();
        for lam in 0..om.rank() {
            let c = omega.coefficient(lam, *ups);
            if c.is_zero() {
                continue;
            }
            let v = nb.left_mul(c, y);
            let u_lam = om.degree(lam);
            for (mu, entry) in v.iter().enumerate() {
                for (k, x) in nb.inner().coords(entry) {
                    col.push(((lam, (*nu, (mu, k))), x.signed(odd(u_lam))));
                }
            }
        }
        col
    });
    let rhs: Vec<_> = dual
        .iter()
        .enumerate()
        .flat_map(|(lam, d)| {
            let kappa = kodaira_spencer(ext, n, d);
            let nb = &nb;
            kappa
                .images
                .into_iter()
                .enumerate()
                .flat_map(move |(nu, img)| nb.coords(&img).into_iter().map(move |(k, c)| ((lam, (nu, k)), c)))
                .collect::<Vec<_>>()
        })
        .collect();
    let keyed = KeyedSystem::new(b.field(), columns, rhs);
    match keyed.system.solve() {
        Solution::Solved(x) => {
            let mut h: Vec<GradedHom<ModuleElement>> = (0..om.rank())
                .map(|u| GradedHom::zero(n, &nb, -om.degree(u)))
                .collect();
            for (j, c) in x {
                let (ups, nu, y) = &unknowns[j];
                h[*ups].images[*nu] = nb.add(&h[*ups].images[*nu], &nb.scale(y, &c));
            }
            if !ks_equations_hold(ext, n, &h) {
                return Err(Error::Internal("κ homotopy failed re-verification".into()));
            }
            Ok(KsHomotopy::Solved(h))
        }
        Solution::Inconsistent(y) => {
            if !keyed.system.is_certificate(&y) {
                return Err(Error::Internal("certificate failed re-verification".into()));
            }
            let mut pairing = b.field().zero();
            for (i, c) in &y {
                pairing = pairing.add(&keyed.system.rhs[*i].mul(c));
            }
            let rows = keyed
                .keyed(&y)
                .into_iter()
                .map(|((lam, (nu, k)), c)| {
                    (
                        format!("{}|{}:{}", om.name(lam), n.name(nu), nb.format_key(&k)),
                        c.to_string(),
                    )
                })
                .collect();
            Ok(KsHomotopy::NoSolution(Certificate {
                rows,
                pairing: pairing.to_string(),
                unknowns: keyed.system.ncols,
                equations: keyed.system.rows.len(),
            }))
        }
    }
}

/// `y ⊗_B u_λ` for `y ∈ N`, as an element of `N ⊗_B Ω`:
/// `(e_μ c) ⊗ u_λ = e_μ ⊗ (-1)^{|c||u_λ|} u_λ c`.
fn tensor_u(ext: &Extension, y: &ModuleElement, lam: usize) -> Vec<ModuleElement> {
    let b = ext.algebra();
    let om = ext.omega().module();
    let u_odd = odd(om.degree(lam));
    y.iter()
        .map(|c| {
            let mut v = om.zero();
            if !c.is_zero() {
                let c_odd = b.degree(c).value().map(odd).unwrap_or(false);
                v[lam] = c.signed(u_odd && c_odd);
            }
            v
        })
        .collect()
}

/// `ψ(x) = Σ_λ (-1)^{(|x|+|u_λ|)|u_λ|} ψ_λ(x) ⊗ u_λ` with `ψ_λ = φ(∂_λ) − h_λ`.
fn assembled_at(
    ext: &Extension,
    n: &Arc<SemifreeModule>,
    psis: &[Connection<Element>],
    x: &ModuleElement,
) -> Vec<ModuleElement> {
    let nb = nb_target(ext, n);
    let no = n_omega(ext, n);
    let om = ext.omega().module();
    let x_deg = n.element_degree(x).unwrap_or(0);
    let mut out = no.zero();
    for (lam, p) in psis.iter().enumerate() {
        let y = apply(&nb, p, x);
        let u = om.degree(lam);
        let term = tensor_u(ext, &y, lam);
        out = no.add(&out, &no.signed(&term, odd(x_deg + u) && odd(u)));
    }
    out
}

/// Condition table comparing the classical-Atiyah criterion with the
/// Kodaira-Spencer criterion, each decided by its own exact solve, plus
/// the constructions carrying a witness of one into a witness of the other.
#[derive(Clone, Debug, Serialize)]
pub struct FesoxReport {
    /// ᾱ is null-homotopic.
    pub condition_i: bool,
    /// κ is null-homotopic.
    pub condition_ix: bool,
    pub agree: bool,
    pub witness_fbar: Option<BTreeMap<String, String>>,
    pub witness_h: Option<BTreeMap<String, BTreeMap<String, String>>>,
    pub certificate_i: Option<Certificate>,
    pub certificate_ix: Option<Certificate>,
    /// Whether the connection assembled from the κ-homotopy verified.
    pub assembled_verified: Option<bool>,
    pub checks: Vec<Check>,
}

impl FesoxReport {
    pub fn all_passed(&self) -> bool {
        self.agree && self.checks.iter().all(|c| c.passed)
    }
}

pub fn decide_fesox(ext: &Extension, n: &Arc<SemifreeModule>) -> Result<FesoxReport, Error> {
    ensure_valid(ext, n)?;
    if let Some(l) = (0..n.rank()).find(|&l| n.degree(l) < 0) {
        return Err(Error::Hypothesis(format!(
            "basis element {} has negative degree {}",
            n.name(l),
            n.degree(l)
        )));
    }
    let b = ext.algebra();
    let nb = nb_target(ext, n);
    let no = n_omega(ext, n);
    let om = ext.omega().module().clone();
    let dual = dual_basis(b);
    let mut checks = check_classical_identity(ext, n);
    checks.extend(check_kodaira_spencer(ext, n, &dual));

    let abar = classical_atiyah(ext, n);
    let first = solve_null_homotopy(n, &no, &abar)?;
    let ninth = solve_ks_homotopy(ext, n)?;
    let samples = sample_elements(n, 2);

    let mut report = FesoxReport {
        condition_i: first.solution().is_some(),
        condition_ix: matches!(ninth, KsHomotopy::Solved(_)),
        agree: false,
        witness_fbar: None,
        witness_h: None,
        certificate_i: None,
        certificate_ix: None,
        assembled_verified: None,
        checks: Vec::new(),
    };
    report.agree = report.condition_i == report.condition_ix;
    checks.record("i-ix-agree", "N", report.agree, "");

    match &first {
        Homotopy::Solved(fbar) => {
            report.witness_fbar = Some(format_hom(n, &no, fbar));
            let psi = Connection {
                derivation: delta_bar(ext),
                correction: fbar.clone(),
            };
            let d = conn_differential(&no, &psi);
            checks.record(
                "psi-bar-cycle",
                "ψ̄",
                der_is_zero(no.inner(), &d.derivation) && hom_is_zero(&no, &d.correction),
                "",
            );
            checks.record("psi-bar-rule", "ψ̄", rule_check(&no, &psi), "");
            // Ψ(∂_λ) = (id ⊗ g(∂_λ)) ∘ ψ̄ and h_λ = φ(∂_λ) − Ψ(∂_λ)
            let mut h = Vec::with_capacity(dual.len());
            let mut sections_ok = true;
            for (lam, dl) in dual.iter().enumerate() {
                let u_odd = odd(om.degree(lam));
                let contract = |v: &Vec<ModuleElement>| -> ModuleElement {
                    v.iter()
                        .enumerate()
                        .map(|(mu, w)| w[lam].signed(u_odd && n.is_odd(mu)))
                        .collect()
                };
                let corr: Vec<ModuleElement> = fbar.images.iter().map(contract).collect();
                let big = Connection {
                    derivation: dl.clone(),
                    correction: GradedHom {
                        degree: dl.degree,
                        images: corr.clone(),
                    },
                };
                sections_ok &= samples.iter().all(|x| {
                    let direct = contract(&apply(&no, &psi, x));
                    nb.is_zero(&nb.sub(&direct, &apply(&nb, &big, x)))
                });
                h.push(GradedHom {
                    degree: dl.degree,
                    images: corr.iter().map(|y| nb.neg(y)).collect(),
                });
            }
            checks.record("i-section", "Ψ", sections_ok, "");
            checks.record("i-implies-ix", "h", ks_equations_hold(ext, n, &h), "");
        }
        Homotopy::NoSolution(c) => report.certificate_i = Some(c.clone()),
    }

    match &ninth {
        KsHomotopy::Solved(h) => {
            report.witness_h = Some(
                h.iter()
                    .enumerate()
                    .map(|(lam, hl)| (om.name(lam).to_string(), format_hom(n, &nb, hl)))
                    .collect(),
            );
            let psis: Vec<Connection<Element>> = dual
                .iter()
                .zip(h)
                .map(|(dl, hl)| Connection {
                    derivation: dl.clone(),
                    correction: GradedHom {
                        degree: hl.degree,
                        images: hl.images.iter().map(|y| nb.neg(y)).collect(),
                    },
                })
                .collect();
            let images: Vec<Vec<ModuleElement>> = (0..n.rank())
                .map(|l| assembled_at(ext, n, &psis, &n.basis_element(l)))
                .collect();
            let psi = Connection {
                derivation: delta_bar(ext),
                correction: GradedHom { degree: 0, images },
            };
            let is_conn = samples
                .iter()
                .all(|x| no.is_zero(&no.sub(&assembled_at(ext, n, &psis, x), &apply(&no, &psi, x))))
                && rule_check(&no, &psi);
            let d = conn_differential(&no, &psi);
            let cycle = der_is_zero(no.inner(), &d.derivation) && hom_is_zero(&no, &d.correction);
            let homotopy = same_hom(&no, &hom_differential(n, &no, &psi.correction), &abar);
            checks.record("assembled-connection", "ψ", is_conn, "");
            checks.record("assembled-cycle", "ψ", cycle, "");
            checks.record("ix-implies-i", "f̄", homotopy, "");
            report.assembled_verified = Some(is_conn && cycle && homotopy);
        }
        KsHomotopy::NoSolution(c) => report.certificate_ix = Some(c.clone()),
    }
    report.checks = checks.checks;
    Ok(report)
}
