mod common;

use std::sync::Arc;

use dglift::dgmod::{
    apply, hom_basis, hom_differential, hom_differential_at, same_hom, solve_null_homotopy, ComplexSlice, GradedHom,
    Homotopy, ModuleElement, SemifreeModule, Tensor,
};
use dglift::enveloping::Extension;
use dglift::gca::Element;
use dglift::target::Target;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_module_element(n: &SemifreeModule, d: i32, rng: &mut impl Rng) -> ModuleElement {
    let b = n.algebra();
    (0..n.rank())
        .map(|lambda| {
            if rng.gen_bool(0.6) {
                common::random_element(b, d - n.degree(lambda), rng)
            } else {
                Element::zero()
            }
        })
        .collect()
}

fn random_hom<T: Target>(n: &SemifreeModule, t: &T, degree: i32, rng: &mut impl Rng) -> GradedHom<T::Elem> {
    let mut f = GradedHom::zero(n, t, degree);
    for (lambda, y) in hom_basis(n, t, degree) {
        let c = t.field().from_i64(rng.gen_range(-2..=2));
        f.images[lambda] = t.add(&f.images[lambda], &t.scale(&y, &c));
    }
    f
}

fn instances() -> Vec<(String, Extension, Arc<SemifreeModule>)> {
    common::with_corpus("corpus", 30)
}

#[test]
fn module_differential_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, _, n) in instances() {
        let report = n.validate();
        assert!(report.is_valid(), "{name}");
        let b = n.algebra();
        for _ in 0..10 {
            let d = rng.gen_range(0..8);
            let x = random_module_element(&n, d, &mut rng);
            assert!(n.differential(&n.differential(&x)).iter().all(Element::is_zero), "{name}");
            let q = rng.gen_range(0..4);
            let c = common::random_element(b, q, &mut rng);
            let lhs = n.differential(&n.right_mul(&x, &c));
            let mut rhs = n.right_mul(&n.differential(&x), &c);
            let tail = n.right_mul(&x, &b.differential(&c));
            for (r, t) in rhs.iter_mut().zip(&tail) {
                r.add_assign(&t.signed(d % 2 == 1));
            }
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

fn hom_laws<T: Target>(name: &str, n: &SemifreeModule, t: &T, rng: &mut ChaCha8Rng) {
    for degree in -3..3 {
        let f = random_hom(n, t, degree, rng);
        let df = hom_differential(n, t, &f);
        let ddf = hom_differential(n, t, &df);
        assert!(ddf.images.iter().all(|y| t.is_zero(y)), "{name} degree {degree}");
        // ∂^Hom(f) is B-linear: its basis values determine it everywhere
        for _ in 0..4 {
            let x = random_module_element(n, rng.gen_range(0..6), rng);
            let direct = hom_differential_at(n, t, &f, &x);
            assert!(t.is_zero(&t.sub(&direct, &apply(t, &df, &x))), "{name} degree {degree}");
        }
    }
}

#[test]
fn hom_differential_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, ext, n) in common::with_corpus("tiny", 12) {
        hom_laws(&name, &n, &Tensor::new(n.clone(), ext.b_target()), &mut rng);
        hom_laws(&name, &n, &Tensor::new(n.clone(), ext.j_target()), &mut rng);
        hom_laws(&name, &n, &Tensor::new(n.clone(), ext.omega_target()), &mut rng);
    }
}

fn solver_agrees<T: Target>(name: &str, n: &SemifreeModule, t: &T, rng: &mut ChaCha8Rng) {
    for degree in -3..2 {
        // boundaries are always null-homotopic
        let h = random_hom(n, t, degree + 1, rng);
        let g = hom_differential(n, t, &h);
        match solve_null_homotopy(n, t, &g).unwrap() {
            Homotopy::Solved(s) => assert!(same_hom(t, &hom_differential(n, t, &s), &g)),
            Homotopy::NoSolution(_) => panic!("{name}: boundary reported as not null-homotopic"),
        }
        // arbitrary maps: compare with the dense reference
        let g = random_hom(n, t, degree, rng);
        let solved = solve_null_homotopy(n, t, &g).unwrap().solution().is_some();
        assert_eq!(solved, common::oracle::null_homotopic(n, t, &g), "{name} degree {degree}");
    }
}

#[test]
fn null_homotopy_solver_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, ext, n) in common::with_corpus("tiny", 20) {
        solver_agrees(&name, &n, &Tensor::new(n.clone(), ext.b_target()), &mut rng);
        solver_agrees(&name, &n, &Tensor::new(n.clone(), ext.j_target()), &mut rng);
    }
}

#[test]
fn k1_homology_is_the_residue_field() {
    // N is the cone of multiplication by x on ℚ[x], so H(N) = ℚ[x]/(x).
    let (ext, n) = common::k1();
    let slice = ComplexSlice::from_target(&Tensor::new(n, ext.b_target()), -2, 12).unwrap();
    for d in -2..=12 {
        assert_eq!(slice.homology_dimension(d).unwrap(), usize::from(d == 0), "degree {d}");
    }
}

#[test]
fn shifts_and_sums_are_modules() {
    for (name, _, n) in instances() {
        for s in [-3, -1, 1, 2] {
            let m = n.shift(s);
            assert!(m.validate().is_valid(), "{name}[{s}]");
            assert_eq!(m.shift(-s), *n, "{name}");
        }
        let sum = n.direct_sum(&n.shift(1));
        assert!(sum.validate().is_valid(), "{name}");
        assert_eq!(sum.rank(), 2 * n.rank());
    }
}

#[test]
fn rejects_non_square_zero_differentials() {
    let (ext, _) = common::k2();
    let b = ext.algebra().clone();
    let y = b.gen(0);
    // ∂e1 = e0·x has ∂²e1 = e0·y ≠ 0
    let n = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 3)], vec![vec![], vec![(0, b.gen(1))]]);
    assert!(n.map(|m| !m.validate().is_valid()).unwrap_or(true));
    let ok = SemifreeModule::new(b.clone(), vec![("e0".into(), 0), ("e1".into(), 2)], vec![vec![], vec![(0, y)]]).unwrap();
    assert!(ok.validate().is_valid());
}
