//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines always appear in `cargo test` output; exits non-zero if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use dglift::connections::{
    check_free_section, conn_differential, conn_sub, fundamental_sequence, is_b_linear, sample_elements,
    satisfies_rule, trivial, LConnection,
};
use dglift::derivations::{der_differential, der_is_zero, der_left_mul, dual_basis, universal_derivation, Derivation};
use dglift::dgmod::{hom_differential, same_hom, SemifreeModule, Tensor};
use dglift::enveloping::Extension;
use dglift::frontend::{fixtures, generate_random_instance, parse_instance, print_instance, run_command, CommandOptions, Profile};
use dglift::gca::{Algebra, Element, Part};
use dglift::lifting::{
    atiyah_map, check_atiyah_identity, check_section, decide_fesox, decide_naive_lifting, h0_nu_surjective, nj_target,
    sample_derivations, Verdict,
};
use dglift::scalar::Field;
use dglift::target::Target;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn f5_algebra() -> Arc<Algebra> {
    let f = Field::Prime(5);
    let gens = |dx: Element| {
        vec![
            common::gen("y", 1, Part::Base, Element::zero()),
            common::gen("x", 2, Part::Extension, dx),
            common::gen("v", 3, Part::Extension, Element::zero()),
        ]
    };
    let scratch = Algebra::new(f, gens(Element::zero())).unwrap();
    Arc::new(Algebra::new(f, gens(scratch.gen(0))).unwrap())
}

fn algebra_laws() -> Outcome {
    let mut algebras: Vec<(String, Arc<Algebra>)> =
        common::fixtures().into_iter().map(|(name, ext, _)| (name, ext.algebra().clone())).collect();
    algebras.push(("mixed".into(), common::mixed()));
    algebras.push(("F5".into(), f5_algebra()));
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for (name, b) in &algebras {
        let sign = |odd: bool| b.scalar(if odd { -1 } else { 1 });
        for _ in 0..1000 {
            let (p, q, r) = (rng.gen_range(0..7), rng.gen_range(0..7), rng.gen_range(0..5));
            let x = common::random_element(b, p, &mut rng);
            let y = common::random_element(b, q, &mut rng);
            let z = common::random_element(b, r, &mut rng);
            let xy = b.mul(&x, &y);
            ensure!(xy == b.mul(&sign(p % 2 == 1 && q % 2 == 1), &b.mul(&y, &x)), "{name}: commutativity");
            ensure!(b.mul(&xy, &z) == b.mul(&x, &b.mul(&y, &z)), "{name}: associativity");
            let dx = b.differential(&x);
            ensure!(b.differential(&dx).is_zero(), "{name}: d² ≠ 0");
            let leibniz = b.mul(&dx, &y).add(&b.mul(&b.mul(&sign(p % 2 == 1), &x), &b.differential(&y)));
            ensure!(b.differential(&xy) == leibniz, "{name}: Leibniz");
            if p % 2 == 1 {
                ensure!(b.mul(&x, &x).is_zero(), "{name}: odd square");
            }
        }
    }
    Ok(format!("{} algebras × 1000 triples", algebras.len()))
}

fn atiyah_identity() -> Outcome {
    let mut instances = vec![];
    for (name, ext, n) in common::fixtures() {
        if name != "x1x2" {
            instances.push((name, ext, n));
        }
    }
    instances.extend(common::corpus("corpus", 60));
    for (name, ext, n) in &instances {
        let report = check_atiyah_identity(ext, n);
        ensure!(report.is_valid(), "{name}: {:?}", report.failures().next());
    }
    Ok(format!("{} instances", instances.len()))
}

fn exactness() -> Outcome {
    let mut rows = 0;
    for (name, ext, n) in common::fixtures() {
        let checks = [
            ("B", fundamental_sequence(&Tensor::new(n.clone(), ext.b_target()), -6, 6)),
            ("J", fundamental_sequence(&Tensor::new(n.clone(), ext.j_target()), -6, 6)),
            ("Ω", fundamental_sequence(&Tensor::new(n.clone(), ext.omega_target()), -6, 6)),
        ];
        for (x, result) in checks {
            let result = result.map_err(|e| format!("{name} along {x}: {e}"))?;
            for row in result {
                ensure!(row.exact(), "{name} along {x}: {row:?}");
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} degree rows"))
}

fn lifting_fixtures() -> Outcome {
    let (ext, n) = common::base_change();
    let r = decide_naive_lifting(&ext, &n).map_err(|e| e.to_string())?;
    ensure!(r.verdict == Verdict::Liftable && r.all_passed(), "base change: {:?}", r.verdict);
    ensure!(r.witness_f.as_ref().unwrap().values().all(|v| v == "0"), "base change: f ≠ 0");
    let nj = nj_target(&ext, &n);
    let psi = r.connection.as_ref().unwrap();
    let dpsi = conn_differential(&nj, psi);
    ensure!(
        der_is_zero(nj.inner(), &dpsi.derivation) && dpsi.correction.images.iter().all(|y| nj.is_zero(y)),
        "base change: ψ is not a cycle"
    );

    let (ext, n) = common::k1();
    let r = decide_naive_lifting(&ext, &n).map_err(|e| e.to_string())?;
    ensure!(r.verdict == Verdict::NotLiftable && r.all_passed(), "K1: {:?}", r.verdict);
    let cert = r.certificate.as_ref().ok_or("K1: no certificate")?;
    let nj = nj_target(&ext, &n);
    ensure!(!common::oracle::null_homotopic(&n, &nj, &atiyah_map(&ext, &n)), "K1: oracle disagrees");
    Ok(format!("K1 certificate pairs to {}", cert.pairing))
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut liftable = 0;
    let mut sections = 0;
    for (name, ext, n) in common::corpus("corpus", 60) {
        let r = decide_naive_lifting(&ext, &n).map_err(|e| format!("{name}: {e}"))?;
        if r.verdict != Verdict::Liftable {
            continue;
        }
        liftable += 1;
        let nj = nj_target(&ext, &n);
        let psi = r.connection.as_ref().unwrap();
        let delta = universal_derivation(ext.enveloping());
        let dpsi = conn_differential(&nj, psi);
        ensure!(
            der_is_zero(nj.inner(), &dpsi.derivation) && dpsi.correction.images.iter().all(|y| nj.is_zero(y)),
            "{name}: ∂ψ ≠ 0"
        );
        for x in sample_elements(&n, 1) {
            for _ in 0..2 {
                let c = common::random_element(ext.algebra(), rng.gen_range(0..4), &mut rng);
                ensure!(satisfies_rule(&nj, psi, &x, &c), "{name}: ψ is not a δ-connection");
            }
        }
        let f = conn_sub(&nj, psi, &trivial(&nj, &delta));
        ensure!(is_b_linear(&nj, &f), "{name}: ψ − φ(δ) not linear");
        ensure!(same_hom(&nj, &hom_differential(&n, &nj, &f.correction), &atiyah_map(&ext, &n)), "{name}: ∂f ≠ α");
        let b = ext.b_target();
        let ds = sample_derivations(&b, -4, 2, 10, &mut rng);
        ensure!(ds.len() >= 10, "{name}: too few derivations");
        let report = check_section(&ext, &n, psi, &b, &ds).map_err(|e| format!("{name}: {e}"))?;
        ensure!(report.is_valid(), "{name}: {:?}", report.failures().next());
        sections += ds.len();
    }
    ensure!(liftable > 0, "no liftable instances");
    Ok(format!("{liftable} liftable instances, {sections} sections"))
}

fn gradient_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut instances = vec![{
        let (ext, n) = common::x1x2();
        ("x1x2".to_string(), ext, n)
    }];
    instances.extend(common::corpus("corpus", 60));
    let mut points = 0;
    for (name, ext, _) in &instances {
        let b = ext.algebra();
        let t = ext.b_target();
        let idx = b.extension_indices();
        let duals = dual_basis(b);
        for (lam, d) in duals.iter().enumerate() {
            let sign = b.generator(idx[lam]).degree % 2 == 0;
            let mut expected = Derivation::zero(&t, d.degree - 1);
            for (ups, partial) in duals.iter().enumerate() {
                let c = ext.omega().coefficient(lam, ups).signed(sign);
                let term = der_left_mul(&t, &c, d.degree - 1 - partial.degree, partial);
                expected.images = expected.images.iter().zip(&term.images).map(|(a, x)| a.add(x)).collect();
            }
            ensure!(der_differential(&t, d).images == expected.images, "{name}: ∂^Der ∂_{lam}");
        }
        let env = ext.enveloping();
        for _ in 0..100 {
            let p = common::random_element(b, rng.gen_range(0..8), &mut rng);
            let v = ext.omega().delta_bar(env, &p);
            for (lam, &i) in idx.iter().enumerate() {
                ensure!(v[lam] == b.partial_derivative(i, &p).unwrap(), "{name}: δ̄ component {lam}");
            }
            points += 1;
        }
    }
    Ok(format!("{} instances, {points} elements", instances.len()))
}

fn flat_free_modules() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut pairs = 0;
    let mut algebras: Vec<Arc<Algebra>> = common::fixtures().into_iter().map(|(_, e, _)| e.algebra().clone()).collect();
    algebras.push(common::mixed());
    for b in algebras {
        let ext = Extension::new(b.clone()).map_err(|e| e.to_string())?;
        for rank in 1..=4 {
            let degrees: Vec<i32> = (0..rank).map(|_| rng.gen_range(-2..4)).collect();
            let n = Arc::new(SemifreeModule::free(b.clone(), &degrees));
            let nb = Tensor::new(n, ext.b_target());
            let ds = sample_derivations(nb.inner(), -4, 2, 5, &mut rng);
            let report = check_free_section(&nb, &ds).map_err(|e| e.to_string())?;
            ensure!(report.is_valid(), "{:?}", report.failures().next());
            let nabla = LConnection::trivial(&nb);
            for w in ds.windows(2) {
                let r = nabla.curvature(&nb, &w[0], &w[1]).map_err(|e| e.to_string())?;
                ensure!(r.images.iter().all(|y| nb.is_zero(y)), "nonzero curvature");
                pairs += 1;
            }
        }
    }
    ensure!(pairs >= 20, "only {pairs} pairs");
    Ok(format!("{pairs} derivation pairs"))
}

fn fesox_consistency() -> Outcome {
    let mut decided = 0;
    let mut skipped = 0;
    let mut assembled = 0;
    let mut instances = common::fixtures();
    instances.extend(common::corpus("corpus", 60));
    for (name, ext, n) in instances {
        match decide_fesox(&ext, &n) {
            Ok(r) => {
                ensure!(r.agree, "{name}: (i) = {} but (ix) = {}", r.condition_i, r.condition_ix);
                ensure!(r.all_passed(), "{name}: {:?}", r.checks.iter().find(|c| !c.passed));
                if let Some(ok) = r.assembled_verified {
                    ensure!(ok, "{name}: assembled connection failed");
                    assembled += 1;
                }
                decided += 1;
            }
            Err(dglift::Error::Hypothesis(_)) => skipped += 1,
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(format!("{decided} decided, {assembled} assembled connections, {skipped} outside hypotheses"))
}

fn h0_nu_direction() -> Outcome {
    let mut surjective = 0;
    let mut total = 0;
    let mut instances = common::fixtures();
    instances.extend(common::corpus("corpus", 60));
    for (name, ext, n) in instances {
        let h = h0_nu_surjective(&ext, &n).map_err(|e| format!("{name}: {e}"))?;
        let lift = decide_naive_lifting(&ext, &n).map_err(|e| format!("{name}: {e}"))?;
        ensure!(!h.surjective || lift.verdict == Verdict::Liftable, "{name}: surjective but not liftable");
        surjective += usize::from(h.surjective);
        total += 1;
    }
    Ok(format!("{surjective}/{total} surjective, 0 violations"))
}

fn frontend() -> Outcome {
    for (name, text) in fixtures::all() {
        let doc = parse_instance(text).map_err(|e| format!("{name}: {e}"))?;
        ensure!(parse_instance(&print_instance(&doc)).as_ref() == Ok(&doc), "{name}: round trip");
    }
    let mut docs = 0;
    for profile in Profile::names() {
        let p = Profile::named(profile).unwrap();
        let count = if *profile == "zero-ext" { 200 } else { 400 };
        for seed in 0..count {
            let doc = generate_random_instance(seed, &p).map_err(|e| e.to_string())?;
            let text = print_instance(&doc);
            ensure!(parse_instance(&text).as_ref() == Ok(&doc), "{profile} seed {seed}: round trip");
            ensure!(
                print_instance(&generate_random_instance(seed, &p).map_err(|e| e.to_string())?) == text,
                "{profile} seed {seed}: nondeterministic"
            );
            let out = run_command("validate", Some(&text), &CommandOptions::default());
            ensure!(out.json["valid"] == true, "{profile} seed {seed}: invalid");
            docs += 1;
        }
    }
    let opts = CommandOptions::default();
    let schema: [(&str, &[&str]); 4] = [
        ("validate", &["command", "valid", "checks"]),
        ("lift", &["command", "verdict", "witness_f", "witness_psi", "certificate", "checks"]),
        ("atiyah", &["command", "alpha", "zero", "checks"]),
        ("fesox", &["command", "condition_i", "condition_ix", "agree", "checks"]),
    ];
    for (_, text) in fixtures::all() {
        for (verb, keys) in schema {
            let out = run_command(verb, Some(text), &opts);
            for key in keys {
                ensure!(out.json.get(*key).is_some(), "{verb}: missing {key}");
            }
        }
    }
    Ok(format!("{docs} generated documents"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("algebra laws", algebra_laws, 10),
        ("Atiyah map as a connection boundary", atiyah_identity, 30),
        ("Hom → Conn → Der exactness", exactness, 30),
        ("lifting fixtures against the dense oracle", lifting_fixtures, 5),
        ("homotopy/connection round trip and sections", round_trip, 60),
        ("dual-basis differential and gradient formulas", gradient_formulas, 30),
        ("flat trivial connections on free modules", flat_free_modules, 30),
        ("classical Atiyah versus Kodaira-Spencer", fesox_consistency, 60),
        ("H0(ν) surjectivity implies lifting", h0_nu_direction, 60),
        ("frontend round trip, determinism and schemas", frontend, 20),
    ];
    let mut failed = 0;
    for (i, (title, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match &outcome {
            Ok(d) => (if over { "SLOW" } else { "PASS" }, d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("{status} {:>2} {title}: {detail} ({:.2?}, budget {budget} s)", i + 1, elapsed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
