use std::sync::Arc;

use crate::dgmod::{ModuleElement, SemifreeModule, Tensor};
use crate::gca::{Element, Monomial};
use crate::report::ValidationReport;
use crate::target::AlgebraTarget;
use crate::Error;

use super::Enveloping;

/// `Ω = J/J²` as a semifree B-module on `u_k = [δ(X_k)]`, with
/// `∂(u_λ) = Σ_μ u_μ c_{μλ}` and `c_{μλ} = ∂_μ(d X_λ)`.
#[derive(Clone, Debug)]
pub struct Omega {
    module: Arc<SemifreeModule>,
    target: Tensor<AlgebraTarget>,
}

impl Omega {
    pub fn build(env: &Enveloping) -> Result<Omega, Error> {
        let b = env.base();
        let ext = env.extension_indices();
        let basis = ext
            .iter()
            .map(|&i| {
                let g = b.generator(i);
                (format!("u[{}]", g.name), g.degree)
            })
            .collect();
        let mut columns = Vec::with_capacity(ext.len());
        for &lam in ext {
            let dx = &b.generator(lam).d;
            let mut col = Vec::new();
            for (mu, &i) in ext.iter().enumerate() {
                let c = b.partial_derivative(i, dx)?;
                if !c.is_zero() {
                    col.push((mu, c));
                }
            }
            columns.push(col);
        }
        let module = Arc::new(SemifreeModule::new(b.clone(), basis, columns)?);
        let omega = Omega {
            target: Tensor::new(module.clone(), AlgebraTarget::new(b.clone())),
            module,
        };
        let report = omega.validate(env);
        if let Some(bad) = report.failures().next() {
            return Err(Error::Internal(format!(
                "differential module check `{}` failed for {}: {}",
                bad.name, bad.subject, bad.detail
            )));
        }
        Ok(omega)
    }

    pub fn module(&self) -> &Arc<SemifreeModule> {
        &self.module
    }

    /// Ω as a coefficient target.
    pub fn target(&self) -> &Tensor<AlgebraTarget> {
        &self.target
    }

    /// `c_{μλ}`.
    pub fn coefficient(&self, mu: usize, lambda: usize) -> &Element {
        self.module.coefficient(mu, lambda)
    }

    /// Module axioms plus the comparison of `∂(u_λ)` against the class of
    /// `d(δ X_λ)` computed independently in `J/J²`.
    pub fn validate(&self, env: &Enveloping) -> ValidationReport {
        let mut report = self.module.validate();
        let b = env.base();
        for (lam, &i) in env.extension_indices().iter().enumerate() {
            let d_delta = env.algebra().differential(&env.delta(&b.gen(i)));
            let subject = self.module.name(lam);
            match project(env, &d_delta) {
                Ok(class) => {
                    let ok = class == self.module.basis_image(lam);
                    report.record(
                        "omega-cross-check",
                        subject,
                        ok,
                        if ok {
                            String::new()
                        } else {
                            format!(
                                "{} versus {}",
                                self.module.format(&class),
                                self.module.format(&self.module.basis_image(lam))
                            )
                        },
                    );
                }
                Err(e) => report.record("omega-cross-check", subject, false, e.to_string()),
            }
        }
        report
    }

    /// The projection `π: J → Ω`.
    pub fn project(&self, env: &Enveloping, j: &Element) -> Result<ModuleElement, Error> {
        project(env, j)
    }

    /// `δ̄(b) = π(δ(b))`.
    pub fn delta_bar(&self, env: &Enveloping, b: &Element) -> ModuleElement {
        project(env, &env.delta(b)).expect("δ lands in J")
    }
}

/// Class of `j ∈ J` modulo J², in the basis `u` with right B-coefficients:
/// a diagonal monomial `p · t_μ` contributes `u_μ · (-1)^{|p||t_μ|} p`.
fn project(env: &Enveloping, j: &Element) -> Result<ModuleElement, Error> {
    let b = env.base();
    let n = b.num_generators();
    let diag = env.diagonal();
    let mut out = vec![Element::zero(); env.num_extension()];
    for (m, c) in env.to_diag(j).terms() {
        let ts: Vec<(usize, u16)> = m.support().filter(|&(i, _)| i >= n).collect();
        match ts.as_slice() {
            [] => {
                return Err(Error::Mismatch(format!(
                    "{} is not in the diagonal ideal",
                    env.algebra().format(j)
                )))
            }
            [(i, 1)] => {
                let p = Monomial::from_exponents(m.exponents()[..n.min(m.exponents().len())].to_vec());
                let sign = diag.is_odd(*i) && diag.monomial_is_odd(&p);
                out[i - n].add_term(p, c.signed(sign));
            }
            _ => {}
        }
    }
    Ok(out)
}
