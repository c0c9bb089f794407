//! D-connections `ψ: N → N ⊗_B X`, stored as the trivial connection φ(D)
//! plus a B-linear correction, together with the connection differential,
//! brackets, curvature and the exact sequence `Hom → Conn → Der`.

use serde::Serialize;

use crate::derivations::{
    bracket, der_add, der_basis, der_differential, der_is_zero, der_left_mul, der_sub, dual_basis, elementary_derivation, evaluate, leibniz_defects, Derivation,
};
use crate::dgmod::{
    apply as hom_apply, hom_add, hom_is_zero, hom_left_mul, hom_sub, GradedHom, ModuleElement, Tensor,
};
use crate::gca::{Element, Monomial};
use crate::linalg::KeyedSystem;
use crate::report::ValidationReport;
use crate::target::{AlgebraTarget, Target};
use crate::{par, Error};

/// `ψ = φ(D) + f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<E> {
    pub derivation: Derivation<E>,
    pub correction: GradedHom<Vec<E>>,
}

impl<E: Clone> Connection<E> {
    pub fn degree(&self) -> i32 {
        self.derivation.degree
    }

    pub fn is_odd(&self) -> bool {
        self.derivation.is_odd()
    }

    /// `ν(ψ) = D`.
    pub fn nu(&self) -> &Derivation<E> {
        &self.derivation
    }
}

/// The trivial D-connection, vanishing on the basis.
pub fn trivial<X: Target>(nx: &Tensor<X>, d: &Derivation<X::Elem>) -> Connection<X::Elem> {
    Connection {
        derivation: d.clone(),
        correction: GradedHom::zero(nx.module(), nx, d.degree),
    }
}

/// `ι(f)`: a B-linear map viewed as a 0-connection.
pub fn from_hom<X: Target>(nx: &Tensor<X>, f: &GradedHom<Vec<X::Elem>>) -> Connection<X::Elem> {
    Connection {
        derivation: Derivation::zero(nx.inner(), f.degree),
        correction: f.clone(),
    }
}

/// `φ(D)(Σ e_λ c_λ) = Σ (-1)^{|D||e_λ|} e_λ ⊗ D(c_λ)`.
pub fn apply_trivial<X: Target>(nx: &Tensor<X>, d: &Derivation<X::Elem>, x: &ModuleElement) -> Vec<X::Elem> {
    let n = nx.module();
    let inner = nx.inner();
    x.iter()
        .enumerate()
        .map(|(lambda, c)| {
            if c.is_zero() {
                inner.zero()
            } else {
                inner.signed(&evaluate(inner, d, c), d.is_odd() && n.is_odd(lambda))
            }
        })
        .collect()
}

pub fn apply<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>, x: &ModuleElement) -> Vec<X::Elem> {
    nx.add(
        &apply_trivial(nx, &psi.derivation, x),
        &hom_apply(nx, &psi.correction, x),
    )
}

/// `ψ(∂ e_λ)`.
fn apply_to_boundary<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>, lambda: usize) -> Vec<X::Elem> {
    apply(nx, psi, &nx.module().basis_image(lambda))
}

/// `∂^Conn(ψ) = ∂ ∘ ψ − (-1)^{|ψ|} ψ ∘ ∂`, decomposed as the trivial
/// `∂^Der(D)`-connection plus its values on the basis.
pub fn conn_differential<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>) -> Connection<X::Elem> {
    let n = nx.module();
    let images = (0..n.rank())
        .map(|lambda| {
            let top = nx.differential(&psi.correction.images[lambda]);
            let bottom = apply_to_boundary(nx, psi, lambda);
            nx.sub(&top, &nx.signed(&bottom, psi.is_odd()))
        })
        .collect();
    Connection {
        derivation: der_differential(nx.inner(), &psi.derivation),
        correction: GradedHom {
            degree: psi.degree() - 1,
            images,
        },
    }
}

/// `∂^Conn(ψ)(x)` straight from the defining formula.
pub fn conn_differential_at<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>, x: &ModuleElement) -> Vec<X::Elem> {
    let top = nx.differential(&apply(nx, psi, x));
    let bottom = apply(nx, psi, &nx.module().differential(x));
    nx.sub(&top, &nx.signed(&bottom, psi.is_odd()))
}

/// Checks `ψ(x b) = ψ(x) b + (-1)^{|D||x|} x ⊗ D(b)` for homogeneous `x`.
pub fn satisfies_rule<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>, x: &ModuleElement, b: &Element) -> bool {
    let n = nx.module();
    let Some(x_deg) = n.element_degree(x).or(if x.iter().all(Element::is_zero) { Some(0) } else { None }) else {
        return false;
    };
    let lhs = apply(nx, psi, &n.right_mul(x, b));
    let db = evaluate(nx.inner(), &psi.derivation, b);
    let pair = nx.pair(x, &db);
    let rhs = nx.add(
        &nx.right_mul(&apply(nx, psi, x), b),
        &nx.signed(&pair, psi.is_odd() && x_deg.rem_euclid(2) == 1),
    );
    nx.is_zero(&nx.sub(&lhs, &rhs))
}

pub fn conn_add<X: Target>(nx: &Tensor<X>, a: &Connection<X::Elem>, b: &Connection<X::Elem>) -> Connection<X::Elem> {
    Connection {
        derivation: der_add(nx.inner(), &a.derivation, &b.derivation),
        correction: hom_add(nx, &a.correction, &b.correction),
    }
}

pub fn conn_sub<X: Target>(nx: &Tensor<X>, a: &Connection<X::Elem>, b: &Connection<X::Elem>) -> Connection<X::Elem> {
    Connection {
        derivation: der_sub(nx.inner(), &a.derivation, &b.derivation),
        correction: hom_sub(nx, &a.correction, &b.correction),
    }
}

/// `b ψ`, a `bD`-connection.
pub fn conn_left_mul<X: Target>(
    nx: &Tensor<X>,
    b: &Element,
    b_degree: i32,
    psi: &Connection<X::Elem>,
) -> Connection<X::Elem> {
    Connection {
        derivation: der_left_mul(nx.inner(), b, b_degree, &psi.derivation),
        correction: hom_left_mul(nx, b, &psi.correction, b_degree),
    }
}

pub fn is_b_linear<X: Target>(nx: &Tensor<X>, psi: &Connection<X::Elem>) -> bool {
    der_is_zero(nx.inner(), &psi.derivation)
}

/// `[ψ_1, ψ_2] = ψ_1 ∘ ψ_2 − (-1)^{|ψ_1||ψ_2|} ψ_2 ∘ ψ_1`, for connections
/// along B (so that they can be composed).
pub fn conn_bracket(
    nb: &Tensor<AlgebraTarget>,
    p1: &Connection<Element>,
    p2: &Connection<Element>,
) -> Connection<Element> {
    let n = nb.module();
    let sign = p1.is_odd() && p2.is_odd();
    let images = (0..n.rank())
        .map(|lambda| {
            let e = n.basis_element(lambda);
            let a = apply(nb, p1, &apply(nb, p2, &e));
            let b = apply(nb, p2, &apply(nb, p1, &e));
            nb.sub(&a, &nb.signed(&b, sign))
        })
        .collect();
    Connection {
        derivation: bracket(nb.inner(), &p1.derivation, &p2.derivation),
        correction: GradedHom {
            degree: p1.degree() + p2.degree(),
            images,
        },
    }
}

/// The bracket evaluated on an arbitrary element by composing.
pub fn conn_bracket_at(
    nb: &Tensor<AlgebraTarget>,
    p1: &Connection<Element>,
    p2: &Connection<Element>,
    x: &ModuleElement,
) -> ModuleElement {
    let sign = p1.is_odd() && p2.is_odd();
    let a = apply(nb, p1, &apply(nb, p2, x));
    let b = apply(nb, p2, &apply(nb, p1, x));
    nb.sub(&a, &nb.signed(&b, sign))
}

/// An L-connection for `L = Der_A(B)`, given by its values `∇_λ` on the
/// dual basis; `∇_D = Σ_λ D(X_λ) ∇_λ`.
#[derive(Clone, Debug)]
pub struct LConnection {
    pub generators: Vec<Connection<Element>>,
}

impl LConnection {
    /// `∇_D = φ(D)`.
    pub fn trivial(nb: &Tensor<AlgebraTarget>) -> LConnection {
        LConnection {
            generators: dual_basis(nb.algebra())
                .iter()
                .map(|d| trivial(nb, d))
                .collect(),
        }
    }

    pub fn eval(&self, nb: &Tensor<AlgebraTarget>, d: &Derivation<Element>) -> Connection<Element> {
        let b = nb.algebra();
        let mut out = Connection {
            derivation: Derivation::zero(nb.inner(), d.degree),
            correction: GradedHom::zero(nb.module(), nb, d.degree),
        };
        for ((coeff, conn), &i) in d.images.iter().zip(&self.generators).zip(&b.extension_indices()) {
            if coeff.is_zero() {
                continue;
            }
            let scaled = conn_left_mul(nb, coeff, d.degree + b.generator(i).degree, conn);
            out = conn_add(nb, &out, &scaled);
        }
        out
    }

    /// `R(D_1, D_2) = [∇_{D_1}, ∇_{D_2}] − ∇_{[D_1, D_2]}`, a B-linear map.
    pub fn curvature(
        &self,
        nb: &Tensor<AlgebraTarget>,
        d1: &Derivation<Element>,
        d2: &Derivation<Element>,
    ) -> Result<GradedHom<ModuleElement>, Error> {
        let br = conn_bracket(nb, &self.eval(nb, d1), &self.eval(nb, d2));
        let lin = self.eval(nb, &bracket(nb.inner(), d1, d2));
        let r = conn_sub(nb, &br, &lin);
        if !is_b_linear(nb, &r) {
            return Err(Error::Internal("curvature is not a 0-connection".into()));
        }
        Ok(r.correction)
    }
}

/// For N with zero differential: `ν ∘ φ = id`, `∂^Conn ∘ φ = φ ∘ ∂^Der`,
/// and (when `pairs` is given, X = B) vanishing curvature.
pub fn check_free_section<X: Target>(
    nx: &Tensor<X>,
    derivations: &[Derivation<X::Elem>],
) -> Result<ValidationReport, Error> {
    if !nx.module().is_free() {
        return Err(Error::Hypothesis("the module has a nonzero differential".into()));
    }
    let mut report = ValidationReport::new();
    for (i, d) in derivations.iter().enumerate() {
        let phi = trivial(nx, d);
        let subject = format!("D{i}");
        report.record("nu-section", &subject, phi.nu() == d, "");
        let lhs = conn_differential(nx, &phi);
        let rhs = trivial(nx, &der_differential(nx.inner(), d));
        let ok = der_is_zero(nx.inner(), &der_sub(nx.inner(), &lhs.derivation, &rhs.derivation))
            && hom_is_zero(nx, &lhs.correction);
        report.record("dg-section", &subject, ok, "");
    }
    Ok(report)
}

/// One degree of the exact sequence `0 → Hom_n → Conn_n → Der_n → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceRow {
    pub degree: i32,
    pub hom: usize,
    pub der: usize,
    pub conn: usize,
    pub ker_nu: usize,
    /// Every `ι(f)` for `f` in a basis of `Hom_n` satisfies the connection
    /// equations with `D = 0`.
    pub iota_ok: bool,
    /// Every `φ(D)` for `D` in a basis of `Der_n` satisfies them.
    pub phi_ok: bool,
}

impl SequenceRow {
    pub fn exact(&self) -> bool {
        self.conn == self.hom + self.der && self.ker_nu == self.hom && self.iota_ok && self.phi_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum JetKey<K, L> {
    Equation(usize, Monomial, usize, K),
    Defect((usize, usize), L),
}

/// The exact sequence `0 → Hom_B(N, N⊗X) → Conn(N, N⊗X) → Der_A(B, X) → 0`
/// checked degree by degree.
///
/// `Conn_n` is computed independently of the (f, D) representation: an
/// A-linear map of degree n is recorded by its values on `e_λ m` for all
/// monomials `m` of length at most two, together with candidate values
/// `D(X_k)`, subject to the connection rule `ψ(x g) = ψ(x) g +
/// (-1)^{n|x|} x ⊗ D(g)` for every `x = e_λ m` with `m` of length at most
/// one and every generator `g` (with `D = 0` on the base), and to the
/// candidate images extending to a derivation at all. The values on
/// length-two monomials are forced, and consistency (including `g² = 0` for
/// odd `g`) is exactly what fails under a wrong sign convention.
pub fn fundamental_sequence<X: Target>(nx: &Tensor<X>, lo: i32, hi: i32) -> Result<Vec<SequenceRow>, Error> {
    let degrees: Vec<i32> = (lo..=hi).collect();
    let rows = par::map(&degrees, |&n| sequence_row(nx, n));
    rows.into_iter().collect()
}

/// `e_λ m` for every basis element and every monomial `m` of length at
/// most `max_len`: a spanning set for checking identities that are
/// compatible with the right action.
pub fn sample_elements(n: &crate::dgmod::SemifreeModule, max_len: u32) -> Vec<ModuleElement> {
    let one = n.algebra().field().one();
    let monos = short_monomials(n.algebra(), max_len);
    (0..n.rank())
        .flat_map(|lambda| {
            monos
                .iter()
                .map(|m| n.basis_times(lambda, &Element::term(m.clone(), one.clone())))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub(crate) fn short_monomials(b: &crate::gca::Algebra, max_len: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            for g in 0..b.num_generators() {
                // only extend with generators at or after the last one, to
                // enumerate each canonical monomial once
                let last = m.support().last().map(|(i, _)| i).unwrap_or(0);
                if g < last {
                    continue;
                }
                if let Some((_, p)) = b.mul_monomials(m, &Monomial::generator(g)) {
                    next.push(p);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out.dedup();
    out
}

fn sequence_row<X: Target>(nx: &Tensor<X>, n: i32) -> Result<SequenceRow, Error> {
    let module = nx.module();
    let inner = nx.inner();
    let b = nx.algebra();
    let field = b.field();
    let ext = b.extension_indices();
    let mut pos = vec![None; b.num_generators()];
    for (k, &i) in ext.iter().enumerate() {
        pos[i] = Some(k);
    }
    let jets = short_monomials(b, 2);
    let short: Vec<&Monomial> = jets.iter().filter(|m| m.length() <= 1).collect();
    let odd = |d: i32| d.rem_euclid(2) == 1;

    // unknowns: jet values, then derivation values
    let mut jet_unknowns: Vec<(usize, Monomial, Vec<X::Elem>)> = Vec::new();
    for lambda in 0..module.rank() {
        for m in &jets {
            let deg = module.degree(lambda) + b.monomial_degree(m) + n;
            for beta in nx.basis(deg) {
                jet_unknowns.push((lambda, m.clone(), beta));
            }
        }
    }
    let der_unknowns: Vec<(usize, X::Elem)> = ext
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| {
            inner
                .basis(n + b.generator(i).degree)
                .into_iter()
                .map(move |y| (k, y))
        })
        .collect();

    type Col<K, L> = Vec<(JetKey<K, L>, crate::scalar::Scalar)>;
    let push = |col: &mut Col<(usize, X::Key), X::Key>, lambda: usize, m: &Monomial, g: usize, v: &Vec<X::Elem>, neg: bool| {
        for (k, c) in nx.coords(v) {
            col.push((JetKey::Equation(lambda, m.clone(), g, k), c.signed(neg)));
        }
    };

    let jet_cols: Vec<Col<(usize, X::Key), X::Key>> = par::map(&jet_unknowns, |(lambda, m, beta)| {
        let mut col = Vec::new();
        if m.length() <= 1 {
            for g in 0..b.num_generators() {
                let v = nx.right_mul(beta, &b.gen(g));
                push(&mut col, *lambda, m, g, &v, true);
            }
        }
        for (g, _) in m.support() {
            let m0 = m.with_exponent(g, m.exponent(g) - 1);
            if let Some((sign, p)) = b.mul_monomials(&m0, &Monomial::generator(g)) {
                debug_assert_eq!(&p, m);
                push(&mut col, *lambda, &m0, g, beta, sign);
            }
        }
        col
    });
    let der_cols: Vec<Col<(usize, X::Key), X::Key>> = par::map(&der_unknowns, |(k, y)| {
        let mut col = Vec::new();
        for (pair, v) in leibniz_defects(inner, &elementary_derivation(inner, n, *k, y)) {
            for (key, c) in inner.coords(&v) {
                col.push((JetKey::Defect(pair, key), c));
            }
        }
        let g = ext[*k];
        for lambda in 0..module.rank() {
            for m in &short {
                let x_deg = module.degree(lambda) + b.monomial_degree(m);
                let my = inner.left_mul(&Element::term((*m).clone(), field.one()), y);
                let v = nx.at(lambda, my);
                push(&mut col, lambda, m, g, &v, !(odd(n) && odd(x_deg)));
            }
        }
        col
    });

    let total = jet_cols.len() + der_cols.len();
    let conn = if total == 0 {
        0
    } else {
        let mut cols = jet_cols.clone();
        cols.extend(der_cols);
        total - KeyedSystem::new(field, cols, Vec::new()).system.rank()
    };
    let ker_nu = if jet_cols.is_empty() {
        0
    } else {
        jet_cols.len() - KeyedSystem::new(field, jet_cols, Vec::new()).system.rank()
    };

    // residuals of explicit solutions
    let residual_free = |value: &dyn Fn(usize, &Monomial) -> Vec<X::Elem>, d: &Derivation<X::Elem>| -> bool {
        for lambda in 0..module.rank() {
            for m in &short {
                let x_deg = module.degree(lambda) + b.monomial_degree(m);
                let here = value(lambda, m);
                for g in 0..b.num_generators() {
                    let mut r = nx.neg(&nx.right_mul(&here, &b.gen(g)));
                    if let Some((sign, p)) = b.mul_monomials(m, &Monomial::generator(g)) {
                        r = nx.add(&r, &nx.signed(&value(lambda, &p), sign));
                    }
                    if let Some(k) = pos[g] {
                        let my = inner.left_mul(&Element::term((*m).clone(), field.one()), &d.images[k]);
                        r = nx.sub(&r, &nx.signed(&nx.at(lambda, my), odd(n) && odd(x_deg)));
                    }
                    if !nx.is_zero(&r) {
                        return false;
                    }
                }
            }
        }
        true
    };

    let hom_basis: Vec<(usize, Vec<X::Elem>)> = (0..module.rank())
        .flat_map(|lambda| nx.basis(module.degree(lambda) + n).into_iter().map(move |v| (lambda, v)))
        .collect();
    let zero_der = Derivation::zero(inner, n);
    let iota_ok = hom_basis.iter().all(|(lambda, v)| {
        let mut f = GradedHom::zero(module, nx, n);
        f.images[*lambda] = v.clone();
        let value = |mu: usize, m: &Monomial| hom_apply(nx, &f, &module.basis_times(mu, &Element::term(m.clone(), field.one())));
        residual_free(&value, &zero_der)
    });
    let ders = der_basis(inner, n);
    let phi_ok = ders.iter().all(|d| {
        let value = |mu: usize, m: &Monomial| {
            apply_trivial(nx, d, &module.basis_times(mu, &Element::term(m.clone(), field.one())))
        };
        residual_free(&value, d)
    });

    Ok(SequenceRow {
        degree: n,
        hom: hom_basis.len(),
        der: ders.len(),
        conn,
        ker_nu,
        iota_ok,
        phi_ok,
    })
}
