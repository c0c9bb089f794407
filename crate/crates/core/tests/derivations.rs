mod common;

use dglift::derivations::{
    bracket, der_differential, der_is_zero, der_left_mul, der_sub, dual_basis, euler_derivation, evaluate,
    is_derivation, make_derivation, universal_derivation, Derivation, VarpiInverse,
};
use dglift::enveloping::{EnvAction, Extension};
use dglift::gca::{Algebra, Element};
use dglift::lifting::sample_derivations;
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

fn homogeneous(b: &Algebra, rng: &mut impl Rng) -> (i32, Element) {
    let d = rng.gen_range(0..7);
    (d, common::random_element(b, d, rng))
}

/// `D(pq) = D(p) q + (-1)^{|D||p|} p D(q)` on random homogeneous elements.
fn leibniz<X: Target>(name: &str, x: &X, ds: &[Derivation<X::Elem>], rng: &mut impl Rng) {
    let b = x.algebra();
    for d in ds {
        assert!(is_derivation(x, d), "{name}");
        for _ in 0..6 {
            let (dp, p) = homogeneous(b, rng);
            let (_, q) = homogeneous(b, rng);
            let lhs = evaluate(x, d, &b.mul(&p, &q));
            let rhs = x.add(
                &x.right_mul(&evaluate(x, d, &p), &q),
                &x.signed(&x.left_mul(&p, &evaluate(x, d, &q)), d.is_odd() && dp % 2 == 1),
            );
            assert!(x.is_zero(&x.sub(&lhs, &rhs)), "{name}: {}", x.format(&x.sub(&lhs, &rhs)));
        }
    }
}

#[test]
fn sampled_derivations_satisfy_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, ext) in extensions() {
        let b = ext.b_target();
        let ds = sample_derivations(&b, -4, 2, 6, &mut rng);
        leibniz(&name, &b, &ds, &mut rng);
        let j = ext.j_target();
        let ds = sample_derivations(&j, -2, 2, 6, &mut rng);
        leibniz(&name, &j, &ds, &mut rng);
        let om = ext.omega_target();
        let ds = sample_derivations(&om, -3, 1, 6, &mut rng);
        leibniz(&name, &om, &ds, &mut rng);
    }
}

#[test]
fn derivations_expand_along_the_dual_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, ext) in extensions() {
        let t = ext.b_target();
        let b = ext.algebra();
        let ext_idx = b.extension_indices();
        for d in sample_derivations(&t, -4, 2, 8, &mut rng) {
            for _ in 0..5 {
                let (_, p) = homogeneous(b, &mut rng);
                let mut expected = Element::zero();
                for (k, &i) in ext_idx.iter().enumerate() {
                    expected.add_assign(&b.mul(&d.images[k], &b.partial_derivative(i, &p).unwrap()));
                }
                assert_eq!(evaluate(&t, &d, &p), expected, "{name}");
            }
            let mut sum = Derivation::zero(&t, d.degree);
            for ((img, partial), &i) in d.images.iter().zip(dual_basis(b)).zip(&ext_idx) {
                let term = der_left_mul(&t, img, d.degree + b.generator(i).degree, &partial);
                sum.images = sum.images.iter().zip(&term.images).map(|(a, c)| a.add(c)).collect();
            }
            assert_eq!(sum.images, d.images, "{name}");
        }
    }
}

#[test]
fn derivation_differential_is_a_differential() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, ext) in extensions() {
        let t = ext.b_target();
        let mut ds = sample_derivations(&t, -4, 2, 8, &mut rng);
        ds.extend(dual_basis(ext.algebra()));
        for d in &ds {
            let dd = der_differential(&t, d);
            assert!(is_derivation(&t, &dd), "{name}");
            assert!(der_is_zero(&t, &der_differential(&t, &dd)), "{name}");
            // (∂^Der D)(p) = d(D p) − (-1)^{|D|} D(d p)
            for _ in 0..5 {
                let (_, p) = homogeneous(ext.algebra(), &mut rng);
                let b = ext.algebra();
                let direct = b
                    .differential(&evaluate(&t, d, &p))
                    .sub(&evaluate(&t, d, &b.differential(&p)).signed(d.is_odd()));
                assert_eq!(evaluate(&t, &dd, &p), direct, "{name}");
            }
        }
        let j = ext.j_target();
        for d in sample_derivations(&j, -2, 2, 5, &mut rng) {
            let dd = der_differential(&j, &d);
            assert!(is_derivation(&j, &dd), "{name}");
            assert!(der_is_zero(&j, &der_differential(&j, &dd)), "{name}");
        }
    }
}

#[test]
fn bracket_is_graded_commutator_and_satisfies_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, ext) in extensions() {
        let t = ext.b_target();
        let b = ext.algebra();
        let ds = sample_derivations(&t, -4, 1, 9, &mut rng);
        for w in ds.chunks(3) {
            let [d1, d2, d3] = w else { continue };
            let br = bracket(&t, d1, d2);
            for _ in 0..4 {
                let (_, p) = homogeneous(b, &mut rng);
                let composed = evaluate(&t, d1, &evaluate(&t, d2, &p))
                    .sub(&evaluate(&t, d2, &evaluate(&t, d1, &p)).signed(d1.is_odd() && d2.is_odd()));
                assert_eq!(evaluate(&t, &br, &p), composed, "{name}");
            }
            // [D1,[D2,D3]] = [[D1,D2],D3] + (-1)^{|D1||D2|} [D2,[D1,D3]]
            let lhs = bracket(&t, d1, &bracket(&t, d2, d3));
            let r1 = bracket(&t, &bracket(&t, d1, d2), d3);
            let r2 = bracket(&t, d2, &bracket(&t, d1, d3));
            let rhs = Derivation {
                degree: lhs.degree,
                images: r1
                    .images
                    .iter()
                    .zip(&r2.images)
                    .map(|(a, c)| a.add(&c.signed(d1.is_odd() && d2.is_odd())))
                    .collect(),
            };
            assert!(der_is_zero(&t, &der_sub(&t, &lhs, &rhs)), "{name}");
        }
    }
}

#[test]
fn euler_derivation_grades_pure_extensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (ext, _) = common::x1x2();
    let b = ext.algebra();
    let (e, exact) = euler_derivation(b);
    assert!(exact);
    for d in 0..8 {
        let p = common::random_element(b, d, &mut rng);
        assert_eq!(evaluate(&ext.b_target(), &e, &p), p.scale(&b.field().from_i64(d as i64)));
    }
    assert!(!euler_derivation(common::mixed().as_ref()).1);
}

fn varpi_round_trip<X: EnvAction>(name: &str, ext: &Extension, x: &X, rng: &mut impl Rng) {
    let env = ext.enveloping();
    let b = ext.algebra();
    let j = ext.j_target();
    for d in sample_derivations(x, -3, 1, 5, rng) {
        let inv = VarpiInverse::new(x, &d);
        inv.check_well_defined(env, |deg| j.basis(deg), 6).unwrap();
        // ϖ(ϖ⁻¹ D) = D
        for _ in 0..6 {
            let (_, p) = homogeneous(b, rng);
            let lhs = inv.apply(env, &env.delta(&p)).unwrap();
            assert!(x.is_zero(&x.sub(&lhs, &evaluate(x, &d, &p))), "{name}");
        }
        // ϖ⁻¹(∂^Der D) = ∂^Hom(ϖ⁻¹ D) on J
        let dd = der_differential(x, &d);
        let inv_dd = VarpiInverse::new(x, &dd);
        for deg in 1..=5 {
            for y in j.basis(deg) {
                let lhs = inv_dd.apply(env, &y).unwrap();
                let f_y = inv.apply(env, &y).unwrap();
                let f_dy = inv.apply(env, &j.differential(&y)).unwrap();
                let rhs = x.sub(&x.differential(&f_y), &x.signed(&f_dy, d.is_odd()));
                assert!(x.is_zero(&x.sub(&lhs, &rhs)), "{name} degree {deg}");
            }
        }
    }
}

#[test]
fn varpi_inverse_is_inverse_and_a_chain_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, ext) in extensions() {
        varpi_round_trip(&name, &ext, &ext.b_target(), &mut rng);
        varpi_round_trip(&name, &ext, &ext.j_target(), &mut rng);
        varpi_round_trip(&name, &ext, &ext.omega_target(), &mut rng);
    }
}

#[test]
fn universal_derivation_generates_j() {
    for (name, ext) in extensions() {
        let env = ext.enveloping();
        let j = ext.j_target();
        let delta = universal_derivation(env);
        assert!(is_derivation(&j, &delta), "{name}");
        let id = VarpiInverse::new(&j, &delta);
        for deg in 1..=5 {
            for y in j.basis(deg) {
                assert_eq!(id.apply(env, &y).unwrap(), y, "{name}");
            }
        }
    }
}

#[test]
fn make_derivation_checks_degrees_and_relations() {
    let (ext, _) = common::k2();
    let t = ext.b_target();
    let b = ext.algebra();
    assert!(make_derivation(&t, 0, vec![b.gen(1)]).is_ok());
    assert!(make_derivation(&t, 0, vec![b.gen(0)]).is_err());
    assert!(make_derivation(&t, 0, vec![]).is_err());
    let j = ext.j_target();
    let env = ext.enveloping();
    // on J the right action goes through the right copy, so not every
    // choice of images extends; δ always does
    let (ext2, _) = common::x1x2();
    let j2 = ext2.j_target();
    let delta = universal_derivation(ext2.enveloping());
    assert!(make_derivation(&j2, 0, delta.images.clone()).is_ok());
    assert!(make_derivation(&j, 0, vec![env.delta(&b.gen(1))]).is_ok());
}
