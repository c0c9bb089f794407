//! The enveloping algebra `B^e`, the diagonal ideal J, the differential
//! module Ω = J/J², and the bundle of all three for a given extension.

mod env;
mod ideal;
mod omega;

use std::sync::Arc;

pub use env::Enveloping;
pub use ideal::{EnvAction, EnvTarget, JTarget};
pub use omega::Omega;

use crate::dgmod::Tensor;
use crate::gca::Algebra;
use crate::target::AlgebraTarget;
use crate::Error;

/// A validated free extension `A → B` together with its enveloping algebra,
/// diagonal ideal and differential module.
#[derive(Clone, Debug)]
pub struct Extension {
    b: Arc<Algebra>,
    env: Arc<Enveloping>,
    j: JTarget,
    omega: Omega,
}

impl Extension {
    pub fn new(b: Arc<Algebra>) -> Result<Extension, Error> {
        let report = b.validate();
        if let Some(bad) = report.failures().next() {
            return Err(Error::Invalid {
                what: "algebra".into(),
                detail: format!("{} ({}): {}", bad.name, bad.subject, bad.detail),
            });
        }
        let env = Arc::new(Enveloping::new(b.clone())?);
        let report = env.validate();
        if let Some(bad) = report.failures().next() {
            return Err(Error::Internal(format!(
                "enveloping algebra check `{}` failed for {}",
                bad.name, bad.subject
            )));
        }
        let omega = Omega::build(&env)?;
        Ok(Extension {
            j: JTarget::new(env.clone()),
            b,
            env,
            omega,
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.b
    }

    pub fn enveloping(&self) -> &Arc<Enveloping> {
        &self.env
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn b_target(&self) -> AlgebraTarget {
        AlgebraTarget::new(self.b.clone())
    }

    pub fn env_target(&self) -> EnvTarget {
        EnvTarget::new(self.env.clone())
    }

    pub fn j_target(&self) -> JTarget {
        self.j.clone()
    }

    pub fn omega_target(&self) -> Tensor<AlgebraTarget> {
        self.omega.target().clone()
    }
}
