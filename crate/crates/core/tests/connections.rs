mod common;

use std::sync::Arc;

use dglift::connections::{
    apply, check_free_section, conn_add, conn_bracket_at, conn_differential, conn_differential_at, from_hom,
    fundamental_sequence, sample_elements, satisfies_rule, trivial, Connection, LConnection,
};
use dglift::derivations::{bracket, Derivation};
use dglift::dgmod::{apply as hom_apply, hom_basis, GradedHom, SemifreeModule, Tensor};
use dglift::enveloping::Extension;
use dglift::lifting::sample_derivations;
use dglift::target::{AlgebraTarget, Target};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sequence_is_exact_on_fixtures() {
    for (name, ext, n) in common::fixtures() {
        for row in fundamental_sequence(&Tensor::new(n.clone(), ext.b_target()), -6, 6).unwrap() {
            assert!(row.exact(), "{name} B {row:?}");
        }
        for row in fundamental_sequence(&Tensor::new(n.clone(), ext.j_target()), -4, 4).unwrap() {
            assert!(row.exact(), "{name} J {row:?}");
        }
        for row in fundamental_sequence(&Tensor::new(n.clone(), ext.omega_target()), -5, 5).unwrap() {
            assert!(row.exact(), "{name} Ω {row:?}");
        }
    }
}

#[test]
fn sequence_is_exact_on_corpus() {
    for (name, ext, n) in common::corpus("tiny", 12) {
        for row in fundamental_sequence(&Tensor::new(n.clone(), ext.b_target()), -3, 3).unwrap() {
            assert!(row.exact(), "{name} B {row:?}");
        }
        for row in fundamental_sequence(&Tensor::new(n.clone(), ext.omega_target()), -2, 2).unwrap() {
            assert!(row.exact(), "{name} Ω {row:?}");
        }
    }
}

fn random_hom<T: Target>(n: &SemifreeModule, t: &T, degree: i32, rng: &mut impl Rng) -> GradedHom<T::Elem> {
    let mut f = GradedHom::zero(n, t, degree);
    for (lambda, y) in hom_basis(n, t, degree) {
        if rng.gen_bool(0.5) {
            let c = t.field().from_i64(rng.gen_range(-2..=2));
            f.images[lambda] = t.add(&f.images[lambda], &t.scale(&y, &c));
        }
    }
    f
}

fn connection_laws<X: Target>(name: &str, nx: &Tensor<X>, ds: &[Derivation<X::Elem>], rng: &mut impl Rng) {
    let n = nx.module();
    let b = nx.algebra();
    let xs = sample_elements(n, 1);
    for d in ds {
        let psi = conn_add(nx, &trivial(nx, d), &from_hom(nx, &random_hom(n, nx, d.degree, rng)));
        let dpsi = conn_differential(nx, &psi);
        for x in &xs {
            for _ in 0..2 {
                let c = common::random_element(b, rng.gen_range(0..4), rng);
                assert!(satisfies_rule(nx, &psi, x, &c), "{name}");
                assert!(satisfies_rule(nx, &dpsi, x, &c), "{name}");
            }
            let direct = conn_differential_at(nx, &psi, x);
            assert!(nx.is_zero(&nx.sub(&direct, &apply(nx, &dpsi, x))), "{name}");
        }
        let ddpsi = conn_differential(nx, &dpsi);
        for x in &xs {
            assert!(nx.is_zero(&apply(nx, &ddpsi, x)), "{name}");
        }
    }
}

#[test]
fn connections_obey_the_rule_and_square_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for (name, ext, n) in common::with_corpus("tiny", 10) {
        let nb = Tensor::new(n.clone(), ext.b_target());
        let ds = sample_derivations(nb.inner(), -3, 1, 4, &mut rng);
        connection_laws(&name, &nb, &ds, &mut rng);
        let nj = Tensor::new(n.clone(), ext.j_target());
        let ds = sample_derivations(nj.inner(), -2, 1, 3, &mut rng);
        connection_laws(&name, &nj, &ds, &mut rng);
        let no = Tensor::new(n.clone(), ext.omega_target());
        let ds = sample_derivations(no.inner(), -2, 1, 3, &mut rng);
        connection_laws(&name, &no, &ds, &mut rng);
    }
}

fn free_modules(rng: &mut impl Rng) -> Vec<(String, Extension, Arc<SemifreeModule>)> {
    let mut algebras = vec![("mixed".to_string(), common::mixed())];
    for (name, ext, _) in common::fixtures() {
        algebras.push((name, ext.algebra().clone()));
    }
    let mut out = Vec::new();
    for (name, b) in algebras {
        let ext = Extension::new(b.clone()).unwrap();
        for _ in 0..3 {
            let rank = rng.gen_range(1..=4);
            let degrees: Vec<i32> = (0..rank).map(|_| rng.gen_range(-2..4)).collect();
            out.push((format!("{name} {degrees:?}"), ext.clone(), Arc::new(SemifreeModule::free(b.clone(), &degrees))));
        }
    }
    out
}

#[test]
fn free_modules_have_flat_dg_sections() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut pairs = 0;
    for (name, ext, n) in free_modules(&mut rng) {
        let nb = Tensor::new(n.clone(), ext.b_target());
        let ds = sample_derivations(nb.inner(), -4, 2, 6, &mut rng);
        let report = check_free_section(&nb, &ds).unwrap();
        assert!(report.is_valid(), "{name}: {:?}", report.failures().collect::<Vec<_>>());
        let no = Tensor::new(n.clone(), ext.omega_target());
        let dos = sample_derivations(no.inner(), -3, 1, 4, &mut rng);
        assert!(check_free_section(&no, &dos).unwrap().is_valid(), "{name}");

        let nabla = LConnection::trivial(&nb);
        for w in ds.windows(2) {
            let r = nabla.curvature(&nb, &w[0], &w[1]).unwrap();
            assert!(r.images.iter().all(|y| nb.is_zero(y)), "{name}");
            pairs += 1;
        }
    }
    assert!(pairs >= 20, "{pairs} pairs");
}

#[test]
fn free_section_needs_a_free_module() {
    let (ext, n) = common::k1();
    let nb = Tensor::new(n, ext.b_target());
    assert!(check_free_section(&nb, &[]).is_err());
}

/// ∇_λ = φ(∂_λ) + f_λ with random B-linear f_λ.
fn perturbed(nb: &Tensor<AlgebraTarget>, rng: &mut impl Rng) -> LConnection {
    let base = LConnection::trivial(nb);
    LConnection {
        generators: base
            .generators
            .iter()
            .map(|g| Connection {
                derivation: g.derivation.clone(),
                correction: random_hom(nb.module(), nb, g.degree(), rng),
            })
            .collect(),
    }
}

#[test]
fn curvature_matches_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (name, ext, n) in free_modules(&mut rng) {
        let nb = Tensor::new(n.clone(), ext.b_target());
        let nabla = perturbed(&nb, &mut rng);
        let ds = sample_derivations(nb.inner(), -4, 1, 6, &mut rng);
        for w in ds.windows(2) {
            let (d1, d2) = (&w[0], &w[1]);
            let r = nabla.curvature(&nb, d1, d2).unwrap();
            let n1 = nabla.eval(&nb, d1);
            let n2 = nabla.eval(&nb, d2);
            let n12 = nabla.eval(&nb, &bracket(nb.inner(), d1, d2));
            for x in sample_elements(&n, 1) {
                let expected = nb.sub(&conn_bracket_at(&nb, &n1, &n2, &x), &apply(&nb, &n12, &x));
                assert!(nb.is_zero(&nb.sub(&hom_apply(&nb, &r, &x), &expected)), "{name}");
            }
        }
    }
}
