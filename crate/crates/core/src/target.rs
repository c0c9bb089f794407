//! Graded B-bimodules used as coefficient targets: B itself, B^e, the
//! diagonal ideal J, Ω, and tensor products N ⊗_B X of these.

use std::fmt::Debug;
use std::sync::Arc;

use crate::gca::{Algebra, Degree, Element, Monomial};
use crate::scalar::{Field, Scalar};

/// A DG B-bimodule with finite-dimensional graded pieces and an explicit
/// scalar basis in each degree. Coordinates are reported against ambient
/// keys (for instance monomials of B^e for J), which is all the linear
/// algebra needs: ranks and solvability do not depend on the embedding.
pub trait Target: Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;
    type Key: Ord + Clone + Debug + Send + Sync;

    /// The algebra B acting on both sides.
    fn algebra(&self) -> &Algebra;

    fn field(&self) -> Field {
        self.algebra().field()
    }

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Scalar) -> Self::Elem;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.scale(a, &self.field().from_i64(-1))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn signed(&self, a: &Self::Elem, negate: bool) -> Self::Elem {
        if negate {
            self.neg(a)
        } else {
            a.clone()
        }
    }

    fn degree(&self, x: &Self::Elem) -> Degree;
    fn differential(&self, x: &Self::Elem) -> Self::Elem;

    /// `b · x` for `b ∈ B`.
    fn left_mul(&self, b: &Element, x: &Self::Elem) -> Self::Elem;
    /// `x · b` for `b ∈ B`.
    fn right_mul(&self, x: &Self::Elem, b: &Element) -> Self::Elem;

    /// A scalar basis of the degree `d` piece.
    fn basis(&self, d: i32) -> Vec<Self::Elem>;
    /// Number of ambient monomials that bound the size of the degree `d`
    /// piece; used to enforce resource limits before enumerating.
    fn size_hint(&self, d: i32) -> usize;
    fn coords(&self, x: &Self::Elem) -> Vec<(Self::Key, Scalar)>;
    fn format(&self, x: &Self::Elem) -> String;
    /// Human-readable label of a coordinate.
    fn format_key(&self, k: &Self::Key) -> String;

    fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a Self::Elem>) -> Self::Elem
    where
        Self::Elem: 'a,
    {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// B as a bimodule over itself.
#[derive(Clone, Debug)]
pub struct AlgebraTarget {
    b: Arc<Algebra>,
}

impl AlgebraTarget {
    pub fn new(b: Arc<Algebra>) -> Self {
        AlgebraTarget { b }
    }
}

impl Target for AlgebraTarget {
    type Elem = Element;
    type Key = Monomial;

    fn algebra(&self) -> &Algebra {
        &self.b
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
        self.b.degree(x)
    }

    fn differential(&self, x: &Element) -> Element {
        self.b.differential(x)
    }

    fn left_mul(&self, b: &Element, x: &Element) -> Element {
        self.b.mul(b, x)
    }

    fn right_mul(&self, x: &Element, b: &Element) -> Element {
        self.b.mul(x, b)
    }

    fn basis(&self, d: i32) -> Vec<Element> {
        self.b
            .monomial_basis(d)
            .iter()
            .map(|m| Element::term(m.clone(), self.b.field().one()))
            .collect()
    }

    fn size_hint(&self, d: i32) -> usize {
        self.b.count_monomials(d)
    }

    fn coords(&self, x: &Element) -> Vec<(Monomial, Scalar)> {
        x.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
    }

    fn format(&self, x: &Element) -> String {
        self.b.format(x)
    }

    fn format_key(&self, k: &Monomial) -> String {
        monomial_label(&self.b, k)
    }
}

pub(crate) fn monomial_label(a: &Algebra, m: &Monomial) -> String {
    if m.is_one() {
        "1".to_string()
    } else {
        a.format_monomial(m)
    }
}
