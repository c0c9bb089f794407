//! A-derivations `B → X` stored by their values on the extension
//! generators, with the derivation differential, the bracket, the Euler
//! derivation, the dual basis `∂_λ`, and the inverse of `ϖ: f ↦ f ∘ δ`.

use crate::enveloping::{EnvAction, Enveloping};
use crate::gca::{Algebra, Element, Monomial, Part};
use crate::linalg::KeyedSystem;
use crate::scalar::Scalar;
use crate::target::{AlgebraTarget, Target};
use crate::Error;

/// An A-derivation of degree `degree`; `images[k]` is the value on the
/// `k`-th extension generator. Base generators are sent to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<E> {
    pub degree: i32,
    pub images: Vec<E>,
}

impl<E: Clone> Derivation<E> {
    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn zero<X: Target<Elem = E>>(x: &X, degree: i32) -> Self {
        let k = x.algebra().extension_indices().len();
        Derivation {
            degree,
            images: vec![x.zero(); k],
        }
    }
}

/// Position of each generator of B among the extension generators.
fn extension_positions(b: &Algebra) -> Vec<Option<usize>> {
    let mut pos = vec![None; b.num_generators()];
    for (k, i) in b.extension_indices().into_iter().enumerate() {
        pos[i] = Some(k);
    }
    pos
}

/// Builds a derivation after checking that each image has degree
/// `degree + |X_k|`.
pub fn make_derivation<X: Target>(x: &X, degree: i32, images: Vec<X::Elem>) -> Result<Derivation<X::Elem>, Error> {
    let b = x.algebra();
    let ext = b.extension_indices();
    if images.len() != ext.len() {
        return Err(Error::Mismatch(format!(
            "{} images for {} extension generators",
            images.len(),
            ext.len()
        )));
    }
    for (k, &i) in ext.iter().enumerate() {
        let want = degree + b.generator(i).degree;
        if !x.degree(&images[k]).fits(want) {
            return Err(Error::Mismatch(format!(
                "image of {} should have degree {want}",
                b.generator(i).name
            )));
        }
    }
    let d = Derivation { degree, images };
    if let Some(((i, j), _)) = leibniz_defects(x, &d).first() {
        return Err(Error::Mismatch(format!(
            "images do not extend to a derivation (relation between {} and {})",
            b.generator(ext[*i]).name,
            b.generator(ext[*j]).name
        )));
    }
    Ok(d)
}

fn monomial_element(m: Monomial, one: &Scalar) -> Element {
    Element::term(m, one.clone())
}

/// `D(b)` by the signed Leibniz rule over the canonical factor word:
/// `D(w_1⋯w_r) = Σ_k (-1)^{|D|(|w_1|+⋯+|w_{k-1}|)} w_1⋯w_{k-1} · D(w_k) · w_{k+1}⋯w_r`.
pub fn evaluate<X: Target>(x: &X, d: &Derivation<X::Elem>, p: &Element) -> X::Elem {
    let b = x.algebra();
    let pos = extension_positions(b);
    let one = b.field().one();
    let mut out = x.zero();
    for (m, c) in p.terms() {
        let word = b.factors(m);
        let mut prefix = vec![0u16; b.num_generators()];
        let mut prefix_odd = false;
        for (k, &g) in word.iter().enumerate() {
            if let Some(slot) = pos[g] {
                let img = &d.images[slot];
                if !x.is_zero(img) {
                    let mut suffix = vec![0u16; b.num_generators()];
                    for &h in &word[k + 1..] {
                        suffix[h] += 1;
                    }
                    let left = monomial_element(Monomial::from_exponents(prefix.clone()), &one);
                    let right = monomial_element(Monomial::from_exponents(suffix), &one);
                    let term = x.left_mul(&left, &x.right_mul(img, &right));
                    let sign = d.is_odd() && prefix_odd;
                    out = x.add(&out, &x.scale(&term, &c.signed(sign)));
                }
            }
            prefix[g] += 1;
            if b.is_odd(g) {
                prefix_odd = !prefix_odd;
            }
        }
    }
    out
}

/// `∂^Der(D) = ∂^X ∘ D − (-1)^{|D|} D ∘ d^B`, on generators.
pub fn der_differential<X: Target>(x: &X, d: &Derivation<X::Elem>) -> Derivation<X::Elem> {
    let b = x.algebra();
    let images = b
        .extension_indices()
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let inner = evaluate(x, d, &b.generator(i).d);
            x.sub(&x.differential(&d.images[k]), &x.signed(&inner, d.is_odd()))
        })
        .collect();
    Derivation {
        degree: d.degree - 1,
        images,
    }
}

pub fn der_add<X: Target>(x: &X, a: &Derivation<X::Elem>, b: &Derivation<X::Elem>) -> Derivation<X::Elem> {
    Derivation {
        degree: a.degree,
        images: a.images.iter().zip(&b.images).map(|(p, q)| x.add(p, q)).collect(),
    }
}

pub fn der_sub<X: Target>(x: &X, a: &Derivation<X::Elem>, b: &Derivation<X::Elem>) -> Derivation<X::Elem> {
    Derivation {
        degree: a.degree,
        images: a.images.iter().zip(&b.images).map(|(p, q)| x.sub(p, q)).collect(),
    }
}

pub fn der_scale<X: Target>(x: &X, a: &Derivation<X::Elem>, c: &Scalar) -> Derivation<X::Elem> {
    Derivation {
        degree: a.degree,
        images: a.images.iter().map(|p| x.scale(p, c)).collect(),
    }
}

pub fn der_is_zero<X: Target>(x: &X, d: &Derivation<X::Elem>) -> bool {
    d.images.iter().all(|y| x.is_zero(y))
}

/// `(b D)(c) = b · D(c)` for homogeneous `b` of degree `b_degree`.
pub fn der_left_mul<X: Target>(x: &X, b: &Element, b_degree: i32, d: &Derivation<X::Elem>) -> Derivation<X::Elem> {
    Derivation {
        degree: d.degree + b_degree,
        images: d.images.iter().map(|y| x.left_mul(b, y)).collect(),
    }
}

/// `[D_1, D_2] = D_1 ∘ D_2 − (-1)^{|D_1||D_2|} D_2 ∘ D_1` for derivations of B.
pub fn bracket(t: &AlgebraTarget, d1: &Derivation<Element>, d2: &Derivation<Element>) -> Derivation<Element> {
    let sign = d1.is_odd() && d2.is_odd();
    let images = d1
        .images
        .iter()
        .zip(&d2.images)
        .map(|(a, b)| evaluate(t, d1, b).sub(&evaluate(t, d2, a).signed(sign)))
        .collect();
    Derivation {
        degree: d1.degree + d2.degree,
        images,
    }
}

/// The grading derivation `X_k ↦ |X_k| X_k`. The flag is false when the
/// base algebra has generators of positive degree: then `|a| a ≠ 0` for
/// some `a ∈ A`, so `b ↦ |b| b` is not an A-derivation and what is returned
/// only grades the extension variables.
pub fn euler_derivation(b: &Algebra) -> (Derivation<Element>, bool) {
    let images = b
        .extension_indices()
        .into_iter()
        .map(|i| b.gen(i).scale(&b.field().from_i64(b.generator(i).degree as i64)))
        .collect();
    let exact = b.generators().iter().all(|g| g.part == Part::Extension);
    (Derivation { degree: 0, images }, exact)
}

/// The dual basis `∂_λ` with `∂_λ(X_μ) = δ_{λμ}` and `|∂_λ| = −|X_λ|`.
pub fn dual_basis(b: &Algebra) -> Vec<Derivation<Element>> {
    let ext = b.extension_indices();
    ext.iter()
        .enumerate()
        .map(|(lam, &i)| Derivation {
            degree: -b.generator(i).degree,
            images: (0..ext.len())
                .map(|mu| if mu == lam { b.one() } else { Element::zero() })
                .collect(),
        })
        .collect()
}

/// The universal derivation `δ: B → J` (or into `B^e`).
pub fn universal_derivation(env: &Enveloping) -> Derivation<Element> {
    let b = env.base();
    Derivation {
        degree: 0,
        images: b
            .extension_indices()
            .iter()
            .map(|&i| env.delta(&b.gen(i)))
            .collect(),
    }
}

/// Obstructions to extending generator images to a derivation: for
/// extension generators `X_i, X_j` (`i < j`, or `i = j` odd) the Leibniz
/// rule applied to `X_i X_j` and to `±X_j X_i` must agree. They vanish
/// identically when B acts on X symmetrically (X = B or Ω), but cut out a
/// proper subspace for B^e-modules such as J, where `X_j` acts on the
/// right through the right copy.
pub fn leibniz_defects<X: Target>(x: &X, d: &Derivation<X::Elem>) -> Vec<((usize, usize), X::Elem)> {
    let b = x.algebra();
    let ext = b.extension_indices();
    let mut out = Vec::new();
    for (ki, &i) in ext.iter().enumerate() {
        for (kj, &j) in ext.iter().enumerate().skip(ki) {
            if ki == kj && !b.is_odd(i) {
                continue;
            }
            let (xi, xj) = (b.gen(i), b.gen(j));
            let (oi, oj) = (b.is_odd(i), b.is_odd(j));
            let one_way = x.add(
                &x.right_mul(&d.images[ki], &xj),
                &x.signed(&x.left_mul(&xi, &d.images[kj]), d.is_odd() && oi),
            );
            let other = x.add(
                &x.right_mul(&d.images[kj], &xi),
                &x.signed(&x.left_mul(&xj, &d.images[ki]), d.is_odd() && oj),
            );
            let defect = x.sub(&one_way, &x.signed(&other, oi && oj));
            if !x.is_zero(&defect) {
                out.push(((ki, kj), defect));
            }
        }
    }
    out
}

pub fn is_derivation<X: Target>(x: &X, d: &Derivation<X::Elem>) -> bool {
    leibniz_defects(x, d).is_empty()
}

/// A scalar basis of `Der_A(B, X)_n`. When every choice of generator
/// images extends (symmetric targets) this is the elementary basis
/// `X_k ↦ y`; otherwise it is a basis of the kernel of the defect map.
pub fn der_basis<X: Target>(x: &X, degree: i32) -> Vec<Derivation<X::Elem>> {
    let b = x.algebra();
    let free: Vec<Derivation<X::Elem>> = b
        .extension_indices()
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| {
            x.basis(degree + b.generator(i).degree)
                .into_iter()
                .map(move |y| (k, y))
        })
        .map(|(k, y)| elementary_derivation(x, degree, k, &y))
        .collect();
    let columns: Vec<Vec<(((usize, usize), X::Key), Scalar)>> = free
        .iter()
        .map(|d| {
            leibniz_defects(x, d)
                .into_iter()
                .flat_map(|(pair, v)| x.coords(&v).into_iter().map(move |(k, c)| ((pair, k), c)))
                .collect()
        })
        .collect();
    if columns.iter().all(Vec::is_empty) {
        return free;
    }
    let system = KeyedSystem::new(x.field(), columns, Vec::new()).system;
    system
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut d = Derivation::zero(x, degree);
            for (j, c) in v {
                d = der_add(x, &d, &der_scale(x, &free[j], &c));
            }
            d
        })
        .collect()
}

/// Upper bound on `dim Der_A(B, X)_n` (the number of free image
/// coordinates), used for resource limits.
pub fn der_space_size<X: Target>(x: &X, degree: i32) -> usize {
    let b = x.algebra();
    b.extension_indices()
        .iter()
        .map(|&i| x.size_hint(degree + b.generator(i).degree))
        .fold(0usize, usize::saturating_add)
}

pub fn der_coords<X: Target>(x: &X, d: &Derivation<X::Elem>) -> Vec<((usize, X::Key), Scalar)> {
    d.images
        .iter()
        .enumerate()
        .flat_map(|(k, y)| x.coords(y).into_iter().map(move |(key, c)| ((k, key), c)))
        .collect()
}

pub fn elementary_derivation<X: Target>(x: &X, degree: i32, k: usize, y: &X::Elem) -> Derivation<X::Elem> {
    let mut d = Derivation::zero(x, degree);
    d.images[k] = y.clone();
    d
}

pub fn format_derivation<X: Target>(x: &X, d: &Derivation<X::Elem>) -> Vec<(String, String)> {
    let b = x.algebra();
    b.extension_indices()
        .iter()
        .zip(&d.images)
        .map(|(&i, y)| (b.generator(i).name.clone(), x.format(y)))
        .collect()
}

/// `ϖ⁻¹(D)`: the B^e-linear map `f: J → X` with `f ∘ δ = D`, represented
/// by `D` itself and evaluated through a generator expression of its
/// argument.
#[derive(Clone, Debug)]
pub struct VarpiInverse<'a, X: Target> {
    pub target: &'a X,
    pub derivation: &'a Derivation<X::Elem>,
}

impl<'a, X: EnvAction> VarpiInverse<'a, X> {
    pub fn new(target: &'a X, derivation: &'a Derivation<X::Elem>) -> Self {
        VarpiInverse { target, derivation }
    }

    /// `f(Σ_k c_k δ(X_k)) = Σ_k (-1)^{|D||c_k|} c_k · D(X_k)`, using the
    /// first-`t` (or last-`t`) expression of `j`.
    pub fn apply_with(&self, env: &Enveloping, j: &Element, last: bool) -> Result<X::Elem, Error> {
        let coeffs = env.factor(j, last)?;
        let x = self.target;
        let mut out = x.zero();
        for (c, img) in coeffs.iter().zip(&self.derivation.images) {
            if c.is_zero() || x.is_zero(img) {
                continue;
            }
            let odd_c = match env.algebra().degree(c).value() {
                Some(d) => d.rem_euclid(2) == 1,
                None => {
                    return Err(Error::Mismatch("argument of ϖ⁻¹ is not homogeneous".into()));
                }
            };
            let term = x.act(env, c, img);
            out = x.add(&out, &x.signed(&term, self.derivation.is_odd() && odd_c));
        }
        Ok(out)
    }

    pub fn apply(&self, env: &Enveloping, j: &Element) -> Result<X::Elem, Error> {
        self.apply_with(env, j, false)
    }

    /// Compares the two generator expressions on the scalar basis of `J_d`
    /// for every `d` in `1..=max_degree`; returns the first disagreement.
    pub fn check_well_defined(&self, env: &Enveloping, j_basis: impl Fn(i32) -> Vec<Element>, max_degree: i32) -> Result<(), Error> {
        for d in 1..=max_degree {
            for j in j_basis(d) {
                let a = self.apply_with(env, &j, false)?;
                let b = self.apply_with(env, &j, true)?;
                if !self.target.is_zero(&self.target.sub(&a, &b)) {
                    return Err(Error::Internal(format!(
                        "ϖ⁻¹ depends on the expression of {}",
                        env.algebra().format(&j)
                    )));
                }
            }
        }
        Ok(())
    }
}
