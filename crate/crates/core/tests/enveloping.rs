mod common;

use dglift::derivations::{der_differential, der_left_mul, dual_basis, evaluate, is_derivation, Derivation};
use dglift::enveloping::Extension;
use dglift::gca::Element;
use dglift::lifting::delta_bar;
use dglift::target::Target;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn extensions() -> Vec<(String, Extension)> {
    let mut out: Vec<(String, Extension)> =
        common::fixtures().into_iter().map(|(name, ext, _)| (name, ext)).collect();
    out.push(("mixed".into(), Extension::new(common::mixed()).unwrap()));
    out.extend(common::corpus("corpus", 10).into_iter().map(|(name, ext, _)| (name, ext)));
    out
}

#[test]
fn enveloping_algebras_validate() {
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        assert!(env.validate().is_valid(), "{name}");
        assert!(ext.omega().validate(env).is_valid(), "{name}");
        assert_eq!(env.algebra().num_generators(), ext.algebra().num_generators() + env.num_extension());
    }
}

#[test]
fn multiplication_map_is_a_dg_algebra_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        let e = env.algebra();
        for _ in 0..20 {
            let (p, q) = (rng.gen_range(0..7), rng.gen_range(0..5));
            let m1 = common::random_element(e, p, &mut rng);
            let m2 = common::random_element(e, q, &mut rng);
            assert_eq!(env.pi(&e.differential(&m1)), ext.algebra().differential(&env.pi(&m1)), "{name}");
            assert_eq!(env.pi(&e.mul(&m1, &m2)), ext.algebra().mul(&env.pi(&m1), &env.pi(&m2)), "{name}");
            assert_eq!(env.from_diag(&env.to_diag(&m1)), m1, "{name}");
        }
    }
}

#[test]
fn diagonal_ideal_is_the_kernel() {
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        let j = ext.j_target();
        for d in 0..8 {
            let basis = j.basis(d);
            assert!(basis.iter().all(|y| env.in_ideal(y)), "{name}");
            // π is onto B, so dim J_d = dim B^e_d − dim B_d
            let expected = env.algebra().monomial_basis(d).len() - ext.algebra().monomial_basis(d).len();
            assert_eq!(basis.len(), expected, "{name} degree {d}");
            for y in &basis {
                assert!(env.j_order(y).is_some_and(|k| k >= 1), "{name}");
            }
        }
    }
}

#[test]
fn delta_bar_is_the_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        let b = ext.algebra();
        let om = ext.omega();
        for _ in 0..12 {
            let p = common::random_element(b, rng.gen_range(0..8), &mut rng);
            let v = om.delta_bar(env, &p);
            for (lam, &i) in b.extension_indices().iter().enumerate() {
                assert_eq!(v[lam], b.partial_derivative(i, &p).unwrap(), "{name}");
            }
            checked += 1;
        }
        // δ̄ is a derivation into Ω and kills J²
        assert!(is_derivation(&ext.omega_target(), &delta_bar(&ext)), "{name}");
        for _ in 0..5 {
            let p = common::random_element(b, rng.gen_range(1..5), &mut rng);
            let q = common::random_element(b, rng.gen_range(1..5), &mut rng);
            let sq = env.algebra().mul(&env.delta(&p), &env.delta(&q));
            let class = om.project(env, &sq).unwrap();
            assert!(class.iter().all(Element::is_zero), "{name}");
        }
    }
    assert!(checked >= 100);
}

#[test]
fn differential_of_dual_basis() {
    // ∂^Der(∂_λ) = (-1)^{|X_λ|+1} Σ_υ c_{λυ} ∂_υ
    for (name, ext) in extensions() {
        let t = ext.b_target();
        let b = ext.algebra();
        let ext_idx = b.extension_indices();
        let duals = dual_basis(b);
        for (lam, d) in duals.iter().enumerate() {
            let sign = b.generator(ext_idx[lam]).degree % 2 == 0;
            let mut expected = Derivation::zero(&t, d.degree - 1);
            for (ups, partial) in duals.iter().enumerate() {
                let c = ext.omega().coefficient(lam, ups).signed(sign);
                if c.is_zero() {
                    continue;
                }
                let term = der_left_mul(&t, &c, d.degree - 1 - partial.degree, partial);
                expected.images = expected.images.iter().zip(&term.images).map(|(a, x)| a.add(x)).collect();
            }
            assert_eq!(der_differential(&t, d).images, expected.images, "{name} λ = {lam}");
        }
    }
}

#[test]
fn omega_differential_matches_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        let b = ext.algebra();
        let om = ext.omega();
        let tgt = ext.omega_target();
        let db = delta_bar(&ext);
        for _ in 0..10 {
            let p = common::random_element(b, rng.gen_range(0..8), &mut rng);
            // δ̄ commutes with the differentials
            let lhs = tgt.differential(&om.delta_bar(env, &p));
            let rhs = om.delta_bar(env, &b.differential(&p));
            assert!(tgt.is_zero(&tgt.sub(&lhs, &rhs)), "{name}");
            assert!(tgt.is_zero(&tgt.sub(&evaluate(&tgt, &db, &p), &om.delta_bar(env, &p))), "{name}");
        }
    }
}
