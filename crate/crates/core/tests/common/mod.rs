#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;

use dglift::frontend::{elaborate, generate_random_instance, Profile};
use rand::Rng;

use dglift::dgmod::SemifreeModule;
use dglift::enveloping::Extension;
use dglift::gca::{Algebra, Element, Generator, Part};
use dglift::scalar::Field;

pub fn q() -> Field {
    Field::Rationals
}

pub fn gen(name: &str, degree: i32, part: Part, d: Element) -> Generator {
    Generator::new(name, degree, part, d)
}

/// B = ℚ[x], |x| = 2; N: e0 (0), e1 (3), ∂e1 = e0 x.
pub fn k1() -> (Extension, Arc<SemifreeModule>) {
    let b = Arc::new(Algebra::new(q(), vec![gen("x", 2, Part::Extension, Element::zero())]).unwrap());
    let x = b.gen(0);
    let n = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 3)], vec![vec![], vec![(0, x)]]).unwrap();
    (Extension::new(b).unwrap(), Arc::new(n))
}

/// A = ℚ⟨y⟩, B = A[x], dx = y; N: e0 (0), e1 (4), ∂e1 = e0 x y.
pub fn k2() -> (Extension, Arc<SemifreeModule>) {
    let a = Algebra::new(q(), vec![gen("y", 1, Part::Base, Element::zero())]).unwrap();
    let y = a.gen(0);
    let b = Arc::new(
        Algebra::new(q(), vec![gen("y", 1, Part::Base, Element::zero()), gen("x", 2, Part::Extension, y)]).unwrap(),
    );
    let xy = b.mul(&b.gen(1), &b.gen(0));
    let n = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 4)], vec![vec![], vec![(0, xy)]]).unwrap();
    (Extension::new(b).unwrap(), Arc::new(n))
}

/// A = ℚ[z], B = A[x], |z| = |x| = 2; N: e0 (0), e1 (3), ∂e1 = e0 z.
pub fn base_change() -> (Extension, Arc<SemifreeModule>) {
    let b = Arc::new(
        Algebra::new(
            q(),
            vec![gen("z", 2, Part::Base, Element::zero()), gen("x", 2, Part::Extension, Element::zero())],
        )
        .unwrap(),
    );
    let z = b.gen(0);
    let n = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 3)], vec![vec![], vec![(0, z)]]).unwrap();
    (Extension::new(b).unwrap(), Arc::new(n))
}

/// B = ℚ[x1, x2], |x1| = 1, |x2| = 2, dx2 = x1; N: e0 (0), e1 (2), ∂e1 = e0 x1.
pub fn x1x2() -> (Extension, Arc<SemifreeModule>) {
    let a = Algebra::new(q(), vec![gen("x1", 1, Part::Extension, Element::zero())]).unwrap();
    let x1 = a.gen(0);
    let b = Arc::new(
        Algebra::new(
            q(),
            vec![gen("x1", 1, Part::Extension, Element::zero()), gen("x2", 2, Part::Extension, x1)],
        )
        .unwrap(),
    );
    let n = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 2)], vec![vec![], vec![(0, b.gen(0))]])
        .unwrap();
    (Extension::new(b).unwrap(), Arc::new(n))
}

pub fn fixtures() -> Vec<(String, Extension, Arc<SemifreeModule>)> {
    let mut out = Vec::new();
    for (name, f) in [
        ("K1", k1 as fn() -> (Extension, Arc<SemifreeModule>)),
        ("K2", k2),
        ("base-change", base_change),
        ("x1x2", x1x2),
    ] {
        let (e, n) = f();
        out.push((name.to_string(), e, n));
    }
    out
}

/// Fixtures followed by `count` seeded instances from `profile`.
pub fn with_corpus(profile: &str, count: u64) -> Vec<(String, Extension, Arc<SemifreeModule>)> {
    let mut out = fixtures();
    out.extend(corpus(profile, count));
    out
}

/// Seeded generator instances, in seed order.
pub fn corpus(profile: &str, count: u64) -> Vec<(String, Extension, Arc<SemifreeModule>)> {
    let p = Profile::named(profile).unwrap();
    (0..count)
        .map(|seed| {
            let inst = elaborate(&generate_random_instance(seed, &p).unwrap()).unwrap();
            let ext = inst.extension().unwrap();
            let n = inst.module(None).unwrap();
            (format!("{profile}#{seed}"), ext, n)
        })
        .collect()
}

/// A random element of degree `d`: a small integer combination of up to
/// four basis monomials.
pub fn random_element(b: &Algebra, d: i32, rng: &mut impl Rng) -> Element {
    let basis = b.monomial_basis(d);
    let mut e = Element::zero();
    if basis.is_empty() {
        return e;
    }
    for _ in 0..rng.gen_range(1..=4) {
        let m = basis[rng.gen_range(0..basis.len())].clone();
        e.add_term(m, b.field().from_i64(rng.gen_range(-3..=3)));
    }
    e
}

/// A richer algebra mixing odd and even generators in both parts.
pub fn mixed() -> Arc<Algebra> {
    let a = Algebra::new(q(), vec![gen("y", 1, Part::Base, Element::zero()), gen("z", 2, Part::Base, Element::zero())]).unwrap();
    let yz = a.mul(&a.gen(0), &a.gen(1));
    let partial = Algebra::new(
        q(),
        vec![
            gen("y", 1, Part::Base, Element::zero()),
            gen("z", 2, Part::Base, Element::zero()),
            gen("x", 2, Part::Extension, a.gen(0)),
        ],
    )
    .unwrap();
    let w_d = yz.add(&partial.mul(&partial.gen(0), &partial.gen(2)));
    Arc::new(
        Algebra::new(
            q(),
            vec![
                gen("y", 1, Part::Base, Element::zero()),
                gen("z", 2, Part::Base, Element::zero()),
                gen("x", 2, Part::Extension, a.gen(0)),
                gen("v", 3, Part::Extension, Element::zero()),
                gen("w", 4, Part::Extension, w_d),
            ],
        )
        .unwrap(),
    )
}
