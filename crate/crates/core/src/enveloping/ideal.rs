use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::dgmod::Tensor;
use crate::gca::{Algebra, Degree, Element, Monomial};
use crate::linalg::{LinearSystem, SparseVec};
use crate::scalar::Scalar;
use crate::target::{monomial_label, AlgebraTarget, Target};

use super::Enveloping;

/// Targets that are DG modules over `B^e`, acting on the left.
pub trait EnvAction: Target {
    /// `m · x` for `m ∈ B^e`.
    fn act(&self, env: &Enveloping, m: &Element, x: &Self::Elem) -> Self::Elem;
}

/// B through `π_B`.
impl EnvAction for AlgebraTarget {
    fn act(&self, env: &Enveloping, m: &Element, x: &Element) -> Element {
        self.left_mul(&env.pi(m), x)
    }
}

/// Modules over B, in particular Ω, through `π_B`.
impl EnvAction for Tensor<AlgebraTarget> {
    fn act(&self, env: &Enveloping, m: &Element, x: &Self::Elem) -> Self::Elem {
        self.left_mul(&env.pi(m), x)
    }
}

/// `B^e` as a B-bimodule: B acts on the left through the left copy and on
/// the right through the right copy.
#[derive(Clone, Debug)]
pub struct EnvTarget {
    env: Arc<Enveloping>,
}

impl EnvTarget {
    pub fn new(env: Arc<Enveloping>) -> Self {
        EnvTarget { env }
    }

    pub fn enveloping(&self) -> &Enveloping {
        &self.env
    }
}

macro_rules! env_common {
    () => {
        fn algebra(&self) -> &Algebra {
            self.env.base()
        }

        fn zero(&self) -> Element {
            Element::zero()
        }

        fn is_zero(&self, x: &Element) -> bool {
            x.is_zero()
        }

        fn add(&self, a: &Element, b: &Element) -> Element {
            a.add(b)
        }

        fn scale(&self, a: &Element, c: &Scalar) -> Element {
            a.scale(c)
        }

        fn degree(&self, x: &Element) -> Degree {
            self.env.algebra().degree(x)
        }

        fn differential(&self, x: &Element) -> Element {
            self.env.algebra().differential(x)
        }

        fn left_mul(&self, b: &Element, x: &Element) -> Element {
            self.env.algebra().mul(b, x)
        }

        fn right_mul(&self, x: &Element, b: &Element) -> Element {
            self.env.algebra().mul(x, &self.env.iota_right(b))
        }

        fn size_hint(&self, d: i32) -> usize {
            self.env.algebra().count_monomials(d)
        }

        fn coords(&self, x: &Element) -> Vec<(Monomial, Scalar)> {
            x.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
        }

        fn format(&self, x: &Element) -> String {
            self.env.algebra().format(x)
        }

        fn format_key(&self, k: &Monomial) -> String {
            monomial_label(self.env.algebra(), k)
        }
    };
}

impl Target for EnvTarget {
    type Elem = Element;
    type Key = Monomial;

    env_common!();

    fn basis(&self, d: i32) -> Vec<Element> {
        let one = self.env.algebra().field().one();
        self.env
            .algebra()
            .monomial_basis(d)
            .iter()
            .map(|m| Element::term(m.clone(), one.clone()))
            .collect()
    }
}

impl EnvAction for EnvTarget {
    fn act(&self, _env: &Enveloping, m: &Element, x: &Element) -> Element {
        self.env.algebra().mul(m, x)
    }
}

/// The diagonal ideal `J = ker π_B` with degree-wise kernel bases.
#[derive(Clone, Debug)]
pub struct JTarget {
    env: Arc<Enveloping>,
    cache: Arc<RwLock<HashMap<i32, Arc<Vec<Element>>>>>,
}

impl JTarget {
    pub fn new(env: Arc<Enveloping>) -> Self {
        JTarget {
            env,
            cache: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    pub fn enveloping(&self) -> &Arc<Enveloping> {
        &self.env
    }

    /// Kernel of `π_B` on the degree `d` monomials of `B^e`, each vector
    /// scaled so that its leading coefficient is 1.
    fn kernel_basis(&self, d: i32) -> Vec<Element> {
        let env = self.env.algebra();
        let field = env.field();
        let monos = env.monomial_basis(d);
        let b_monos = self.env.base().monomial_basis(d);
        let row_of: HashMap<&Monomial, usize> = b_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let columns: Vec<SparseVec> = monos
            .iter()
            .map(|m| {
                let image = self.env.pi(&Element::term(m.clone(), field.one()));
                image.terms().map(|(bm, c)| (row_of[bm], c.clone())).collect()
            })
            .collect();
        let system = LinearSystem::from_columns(field, b_monos.len(), &columns, &SparseVec::new());
        system
            .nullspace()
            .into_iter()
            .map(|v| {
                let lead = v.values().next().expect("nonzero kernel vector").inv();
                v.iter()
                    .map(|(&j, c)| (monos[j].clone(), c.mul(&lead)))
                    .collect::<Element>()
            })
            .collect()
    }
}

impl Target for JTarget {
    type Elem = Element;
    type Key = Monomial;

    env_common!();

    fn basis(&self, d: i32) -> Vec<Element> {
        if let Some(b) = self.cache.read().expect("J cache").get(&d) {
            return b.as_ref().clone();
        }
        let b = Arc::new(self.kernel_basis(d));
        self.cache.write().expect("J cache").entry(d).or_insert_with(|| b.clone());
        b.as_ref().clone()
    }
}

impl EnvAction for JTarget {
    fn act(&self, _env: &Enveloping, m: &Element, x: &Element) -> Element {
        self.env.algebra().mul(m, x)
    }
}
