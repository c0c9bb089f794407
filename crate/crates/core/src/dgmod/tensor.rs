use std::sync::Arc;

use crate::gca::{Algebra, Degree, Element};
use crate::scalar::Scalar;
use crate::target::Target;

use super::SemifreeModule;

/// `N ⊗_B X` for a semifree N: elements are written uniquely as
/// `Σ e_λ ⊗ y_λ`, stored as the vector of the `y_λ`.
#[derive(Clone, Debug)]
pub struct Tensor<X> {
    module: Arc<SemifreeModule>,
    inner: X,
}

impl<X: Target> Tensor<X> {
    pub fn new(module: Arc<SemifreeModule>, inner: X) -> Self {
        Tensor { module, inner }
    }

    pub fn module(&self) -> &SemifreeModule {
        &self.module
    }

    pub fn module_arc(&self) -> &Arc<SemifreeModule> {
        &self.module
    }

    pub fn inner(&self) -> &X {
        &self.inner
    }

    /// `e_λ ⊗ y`.
    pub fn at(&self, lambda: usize, y: X::Elem) -> Vec<X::Elem> {
        let mut v = self.zero();
        v[lambda] = y;
        v
    }

    /// `x ⊗ y` for a module element `x = Σ e_λ c_λ`: `Σ e_λ ⊗ c_λ y`.
    pub fn pair(&self, x: &[Element], y: &X::Elem) -> Vec<X::Elem> {
        x.iter().map(|c| self.inner.left_mul(c, y)).collect()
    }

    /// Applies `g` to the X factor, with sign `(-1)^{|g||e_λ|}`.
    pub fn map_inner<Y: Target>(
        &self,
        other: &Tensor<Y>,
        x: &[X::Elem],
        g_odd: bool,
        g: impl Fn(&X::Elem) -> Y::Elem,
    ) -> Vec<Y::Elem> {
        x.iter()
            .enumerate()
            .map(|(lambda, y)| {
                if self.inner.is_zero(y) {
                    other.inner.zero()
                } else {
                    other.inner.signed(&g(y), g_odd && self.module.is_odd(lambda))
                }
            })
            .collect()
    }
}

impl<X: Target> Target for Tensor<X> {
    type Elem = Vec<X::Elem>;
    type Key = (usize, X::Key);

    fn algebra(&self) -> &Algebra {
        self.module.algebra()
    }

    fn zero(&self) -> Self::Elem {
        vec![self.inner.zero(); self.module.rank()]
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.iter().all(|y| self.inner.is_zero(y))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.inner.add(x, y)).collect()
    }

    fn scale(&self, a: &Self::Elem, c: &Scalar) -> Self::Elem {
        a.iter().map(|x| self.inner.scale(x, c)).collect()
    }

    fn degree(&self, x: &Self::Elem) -> Degree {
        let mut deg = Degree::Zero;
        for (lambda, y) in x.iter().enumerate() {
            let d = match self.inner.degree(y) {
                Degree::Zero => continue,
                Degree::Mixed => return Degree::Mixed,
                Degree::Homogeneous(d) => d + self.module.degree(lambda),
            };
            match deg {
                Degree::Zero => deg = Degree::Homogeneous(d),
                Degree::Homogeneous(e) if e != d => return Degree::Mixed,
                _ => {}
            }
        }
        deg
    }

    /// `∂(e_λ ⊗ y) = Σ_μ e_μ ⊗ b_{μλ} y + (-1)^{|e_λ|} e_λ ⊗ ∂y`.
    fn differential(&self, x: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for (lambda, y) in x.iter().enumerate() {
            if self.inner.is_zero(y) {
                continue;
            }
            for (mu, b) in self.module.column(lambda) {
                out[mu] = self.inner.add(&out[mu], &self.inner.left_mul(b, y));
            }
            let dy = self.inner.differential(y);
            out[lambda] = self
                .inner
                .add(&out[lambda], &self.inner.signed(&dy, self.module.is_odd(lambda)));
        }
        out
    }

    /// `b · (e_λ ⊗ y) = (-1)^{|b||e_λ|} e_λ ⊗ b y`.
    fn left_mul(&self, b: &Element, x: &Self::Elem) -> Self::Elem {
        let odd = self.algebra().degree(b).value().is_some_and(|d| d % 2 != 0);
        x.iter()
            .enumerate()
            .map(|(lambda, y)| {
                self.inner
                    .signed(&self.inner.left_mul(b, y), odd && self.module.is_odd(lambda))
            })
            .collect()
    }

    fn right_mul(&self, x: &Self::Elem, b: &Element) -> Self::Elem {
        x.iter().map(|y| self.inner.right_mul(y, b)).collect()
    }

    fn basis(&self, d: i32) -> Vec<Self::Elem> {
        let mut out = Vec::new();
        for lambda in 0..self.module.rank() {
            for y in self.inner.basis(d - self.module.degree(lambda)) {
                out.push(self.at(lambda, y));
            }
        }
        out
    }

    fn size_hint(&self, d: i32) -> usize {
        (0..self.module.rank())
            .map(|lambda| self.inner.size_hint(d - self.module.degree(lambda)))
            .fold(0usize, usize::saturating_add)
    }

    fn coords(&self, x: &Self::Elem) -> Vec<(Self::Key, Scalar)> {
        x.iter()
            .enumerate()
            .flat_map(|(lambda, y)| {
                self.inner
                    .coords(y)
                    .into_iter()
                    .map(move |(k, c)| ((lambda, k), c))
            })
            .collect()
    }

    fn format_key(&self, k: &Self::Key) -> String {
        format!("{}:{}", self.module.name(k.0), self.inner.format_key(&k.1))
    }

    /// Terms `e_λ*(y)` joined by ` + `; the parentheses are dropped when `y`
    /// is a single term with positive coefficient.
    fn format(&self, x: &Self::Elem) -> String {
        let mut parts = Vec::new();
        for (lambda, y) in x.iter().enumerate() {
            if self.inner.is_zero(y) {
                continue;
            }
            let body = self.inner.format(y);
            let name = self.module.name(lambda);
            let simple = !body.contains(' ') && (body == "-1" || !body.starts_with('-'));
            parts.push(match (simple, body.as_str()) {
                (true, "1") => name.to_string(),
                (true, "-1") => format!("-{name}"),
                (true, _) => format!("{name}*{body}"),
                (false, _) => format!("{name}*({body})"),
            });
        }
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            match (k, p.strip_prefix('-')) {
                (0, _) => out.push_str(p),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}
