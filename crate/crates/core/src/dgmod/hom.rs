use serde::Serialize;

use crate::gca::Element;
use crate::linalg::{KeyedSystem, Solution};
use crate::par;
use crate::target::Target;
use crate::Error;

use super::{ModuleElement, SemifreeModule};

/// Largest number of unknowns a single homotopy system may have.
pub const MAX_UNKNOWNS: usize = 200_000;

/// A right B-linear map of degree `degree` out of a semifree module,
/// determined by the images of the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedHom<E> {
    pub degree: i32,
    pub images: Vec<E>,
}

impl<E: Clone> GradedHom<E> {
    pub fn zero<T: Target<Elem = E>>(n: &SemifreeModule, t: &T, degree: i32) -> Self {
        GradedHom {
            degree,
            images: vec![t.zero(); n.rank()],
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

pub fn hom_is_zero<T: Target>(t: &T, f: &GradedHom<T::Elem>) -> bool {
    f.images.iter().all(|y| t.is_zero(y))
}

pub fn hom_add<T: Target>(t: &T, f: &GradedHom<T::Elem>, g: &GradedHom<T::Elem>) -> GradedHom<T::Elem> {
    GradedHom {
        degree: f.degree,
        images: f.images.iter().zip(&g.images).map(|(a, b)| t.add(a, b)).collect(),
    }
}

pub fn hom_sub<T: Target>(t: &T, f: &GradedHom<T::Elem>, g: &GradedHom<T::Elem>) -> GradedHom<T::Elem> {
    GradedHom {
        degree: f.degree,
        images: f.images.iter().zip(&g.images).map(|(a, b)| t.sub(a, b)).collect(),
    }
}

pub fn hom_neg<T: Target>(t: &T, f: &GradedHom<T::Elem>) -> GradedHom<T::Elem> {
    GradedHom {
        degree: f.degree,
        images: f.images.iter().map(|a| t.neg(a)).collect(),
    }
}

/// `f(Σ e_λ c_λ) = Σ f(e_λ) c_λ`.
pub fn apply<T: Target>(t: &T, f: &GradedHom<T::Elem>, x: &ModuleElement) -> T::Elem {
    let mut out = t.zero();
    for (img, c) in f.images.iter().zip(x) {
        if !c.is_zero() {
            out = t.add(&out, &t.right_mul(img, c));
        }
    }
    out
}

/// `f(∂ e_λ) = Σ_μ f(e_μ) b_{μλ}`.
fn apply_to_boundary<T: Target>(n: &SemifreeModule, t: &T, images: &[T::Elem], lambda: usize) -> T::Elem {
    let mut out = t.zero();
    for (mu, b) in n.column(lambda) {
        out = t.add(&out, &t.right_mul(&images[mu], b));
    }
    out
}

/// `∂^Hom(f) = ∂ ∘ f − (-1)^{|f|} f ∘ ∂`.
pub fn hom_differential<T: Target>(n: &SemifreeModule, t: &T, f: &GradedHom<T::Elem>) -> GradedHom<T::Elem> {
    let images = (0..n.rank())
        .map(|lambda| {
            let inner = apply_to_boundary(n, t, &f.images, lambda);
            t.sub(&t.differential(&f.images[lambda]), &t.signed(&inner, f.is_odd()))
        })
        .collect();
    GradedHom {
        degree: f.degree - 1,
        images,
    }
}

/// Checks that every image lies in degree `|e_λ| + |f|`.
pub fn check_degrees<T: Target>(n: &SemifreeModule, t: &T, f: &GradedHom<T::Elem>) -> Result<(), Error> {
    if f.images.len() != n.rank() {
        return Err(Error::Mismatch(format!(
            "map has {} images for a basis of size {}",
            f.images.len(),
            n.rank()
        )));
    }
    for (lambda, img) in f.images.iter().enumerate() {
        let want = n.degree(lambda) + f.degree;
        if !t.degree(img).fits(want) {
            return Err(Error::Mismatch(format!(
                "image of {} is not homogeneous of degree {want}",
                n.name(lambda)
            )));
        }
    }
    Ok(())
}

/// Proof that a map is not null-homotopic: a functional on the equations
/// that kills every boundary but not the target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// `(equation label, coefficient)` pairs.
    pub rows: Vec<(String, String)>,
    /// Value of the functional on the map being tested.
    pub pairing: String,
    pub unknowns: usize,
    pub equations: usize,
}

#[derive(Clone, Debug)]
pub enum Homotopy<E> {
    Solved(GradedHom<E>),
    NoSolution(Certificate),
}

impl<E> Homotopy<E> {
    pub fn solution(&self) -> Option<&GradedHom<E>> {
        match self {
            Homotopy::Solved(h) => Some(h),
            Homotopy::NoSolution(_) => None,
        }
    }
}

/// Dimension of the space of candidate homotopies of degree `degree`.
pub fn hom_space_size<T: Target>(n: &SemifreeModule, t: &T, degree: i32) -> usize {
    (0..n.rank())
        .map(|lambda| t.size_hint(n.degree(lambda) + degree))
        .fold(0usize, usize::saturating_add)
}

/// Scalar basis of the degree `degree` homs, as `(λ, y)` with `f(e_λ) = y`.
pub fn hom_basis<T: Target>(n: &SemifreeModule, t: &T, degree: i32) -> Vec<(usize, T::Elem)> {
    (0..n.rank())
        .flat_map(|lambda| {
            t.basis(n.degree(lambda) + degree)
                .into_iter()
                .map(move |y| (lambda, y))
        })
        .collect()
}

/// `∂^Hom` of the hom sending `e_λ ↦ y` and the other basis elements to 0.
pub fn elementary_differential<T: Target>(
    n: &SemifreeModule,
    t: &T,
    degree: i32,
    lambda: usize,
    y: &T::Elem,
) -> Vec<((usize, T::Key), crate::scalar::Scalar)> {
    let odd = degree.rem_euclid(2) == 1;
    let mut out = Vec::new();
    for (k, c) in t.coords(&t.differential(y)) {
        out.push(((lambda, k), c));
    }
    for nu in lambda + 1..n.rank() {
        let b = n.coefficient(lambda, nu);
        if b.is_zero() {
            continue;
        }
        let v = t.right_mul(y, b);
        for (k, c) in t.coords(&v) {
            out.push(((nu, k), c.signed(!odd)));
        }
    }
    out
}

/// Solves `∂^Hom(h) = g` for a B-linear `h` of degree `|g| + 1`.
///
/// The unknowns are the coordinates of `h(e_λ)` in the scalar bases of
/// the target; the equations are the coordinates of `∂^Hom(h)(e_ν)`. The
/// system is finite and the answer exact: either a verified solution or a
/// left-kernel certificate.
pub fn solve_null_homotopy<T: Target>(
    n: &SemifreeModule,
    t: &T,
    g: &GradedHom<T::Elem>,
) -> Result<Homotopy<T::Elem>, Error> {
    check_degrees(n, t, g)?;
    let degree = g.degree + 1;
    let size = hom_space_size(n, t, degree);
    if size > MAX_UNKNOWNS {
        return Err(Error::ResourceLimit(format!(
            "homotopy system would have up to {size} unknowns (limit {MAX_UNKNOWNS})"
        )));
    }
    let basis = hom_basis(n, t, degree);
    let columns = par::map(&basis, |(lambda, y)| elementary_differential(n, t, degree, *lambda, y));
    let rhs: Vec<_> = g
        .images
        .iter()
        .enumerate()
        .flat_map(|(nu, y)| t.coords(y).into_iter().map(move |(k, c)| ((nu, k), c)))
        .collect();
    let keyed = KeyedSystem::new(t.field(), columns, rhs);
    match keyed.system.solve() {
        Solution::Solved(x) => {
            let mut h = GradedHom::zero(n, t, degree);
            for (j, c) in x {
                let (lambda, y) = &basis[j];
                h.images[*lambda] = t.add(&h.images[*lambda], &t.scale(y, &c));
            }
            if !same_hom(t, &hom_differential(n, t, &h), g) {
                return Err(Error::Internal("homotopy failed re-verification".into()));
            }
            Ok(Homotopy::Solved(h))
        }
        Solution::Inconsistent(y) => {
            if !keyed.system.is_certificate(&y) {
                return Err(Error::Internal("certificate failed re-verification".into()));
            }
            let mut pairing = t.field().zero();
            for (i, c) in &y {
                pairing = pairing.add(&keyed.system.rhs[*i].mul(c));
            }
            let rows = keyed
                .keyed(&y)
                .into_iter()
                .map(|((nu, k), c)| (format!("{}:{}", n.name(nu), t.format_key(&k)), c.to_string()))
                .collect();
            Ok(Homotopy::NoSolution(Certificate {
                rows,
                pairing: pairing.to_string(),
                unknowns: keyed.system.ncols,
                equations: keyed.system.rows.len(),
            }))
        }
    }
}

/// Equality of homs up to representation (targets may store zero
/// differently, e.g. empty versus explicit zero entries).
pub fn same_hom<T: Target>(t: &T, f: &GradedHom<T::Elem>, g: &GradedHom<T::Elem>) -> bool {
    f.images.len() == g.images.len()
        && f.images
            .iter()
            .zip(&g.images)
            .all(|(a, b)| t.is_zero(&t.sub(a, b)))
}

/// Evaluates `∂^Hom(h)(x)` on an arbitrary module element, straight from
/// the defining formula; used to test that it is again B-linear.
pub fn hom_differential_at<T: Target>(
    n: &SemifreeModule,
    t: &T,
    f: &GradedHom<T::Elem>,
    x: &ModuleElement,
) -> T::Elem {
    let fx = apply(t, f, x);
    let fdx = apply(t, f, &n.differential(x));
    t.sub(&t.differential(&fx), &t.signed(&fdx, f.is_odd()))
}

/// `b · f` as a hom: `(b f)(e_λ) = b · f(e_λ)`.
pub fn hom_left_mul<T: Target>(t: &T, b: &Element, f: &GradedHom<T::Elem>, b_degree: i32) -> GradedHom<T::Elem> {
    GradedHom {
        degree: f.degree + b_degree,
        images: f.images.iter().map(|y| t.left_mul(b, y)).collect(),
    }
}
