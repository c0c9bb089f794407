use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivations::{der_add, der_basis, der_scale, Derivation};
use crate::dgmod::SemifreeModule;
use crate::gca::{Algebra, Element, Generator, Part};
use crate::scalar::Field;
use crate::target::{AlgebraTarget, Target};

use super::ast::{AlgebraDecl, DerivationDecl, Document, Expr, FieldSpec, GenDecl, ModuleDecl};
use super::parse::parse_expr;
use super::FrontendError;

/// Size bounds for generated instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub name: &'static str,
    pub max_base_gens: usize,
    pub max_base_degree: i32,
    pub min_ext_gens: usize,
    pub max_ext_gens: usize,
    pub max_ext_degree: i32,
    pub max_basis: usize,
    pub max_basis_degree: i32,
    pub max_terms: usize,
    /// Coefficients as `(numerator, denominator)`.
    pub coefficients: &'static [(i64, i64)],
    pub derivations: usize,
    /// Attempts per differential before falling back to zero.
    pub budget: usize,
}

const POOL: &[(i64, i64)] = &[(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (3, 1)];

impl Profile {
    pub fn named(name: &str) -> Option<Profile> {
        let tiny = Profile {
            name: "tiny",
            max_base_gens: 1,
            max_base_degree: 2,
            min_ext_gens: 1,
            max_ext_gens: 2,
            max_ext_degree: 3,
            max_basis: 3,
            max_basis_degree: 4,
            max_terms: 2,
            coefficients: POOL,
            derivations: 1,
            budget: 24,
        };
        match name {
            "tiny" => Some(tiny),
            "corpus" => Some(Profile {
                name: "corpus",
                max_base_gens: 1,
                max_base_degree: 3,
                max_ext_gens: 3,
                max_ext_degree: 4,
                max_basis: 4,
                max_basis_degree: 6,
                max_terms: 3,
                ..tiny
            }),
            "zero-ext" => Some(Profile {
                name: "zero-ext",
                max_base_gens: 2,
                min_ext_gens: 0,
                max_ext_gens: 0,
                derivations: 0,
                ..tiny
            }),
            _ => None,
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["tiny", "corpus", "zero-ext"]
    }
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    profile: &'a Profile,
    field: Field,
}

impl Sampler<'_> {
    fn coefficient(&mut self) -> crate::scalar::Scalar {
        let &(n, d) = self.profile.coefficients.choose(&mut self.rng).expect("non-empty pool");
        self.field.fraction(&n.into(), &d.into()).expect("pool denominators are units")
    }

    /// A random element of degree `n`; constants are excluded when
    /// `allow_constant` is false.
    fn element(&mut self, b: &Algebra, n: i32, allow_constant: bool) -> Element {
        if n < 0 {
            return Element::zero();
        }
        let basis: Vec<_> = b
            .monomial_basis(n)
            .iter()
            .filter(|m| allow_constant || !m.is_one())
            .cloned()
            .collect();
        if basis.is_empty() || self.rng.gen_bool(0.25) {
            return Element::zero();
        }
        let mut e = Element::zero();
        for _ in 0..self.rng.gen_range(1..=self.profile.max_terms) {
            let m = basis.choose(&mut self.rng).expect("non-empty").clone();
            e.add_term(m, self.coefficient());
        }
        e
    }

    fn degrees(&mut self, count: usize, lo: i32, hi: i32) -> Vec<i32> {
        let mut ds: Vec<i32> = (0..count).map(|_| self.rng.gen_range(lo..=hi)).collect();
        ds.sort_unstable();
        ds
    }
}

fn expr(text: &str) -> Expr {
    parse_expr(text).expect("canonical printing re-parses")
}

/// A seeded random document; identical `(seed, profile)` give identical
/// documents. Differentials are rejection-sampled until `d² = 0` (and
/// `∂² = 0` for modules); an exhausted budget falls back to a zero
/// differential, so every emitted document validates.
pub fn generate_random_instance(seed: u64, profile: &Profile) -> Result<Document, FrontendError> {
    let field = Field::Rationals;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(seed),
        profile,
        field,
    };

    let n_base = s.rng.gen_range(0..=profile.max_base_gens);
    let n_ext = s.rng.gen_range(profile.min_ext_gens..=profile.max_ext_gens);
    let base_degrees = s.degrees(n_base, 1, profile.max_base_degree);
    let ext_degrees = s.degrees(n_ext, 1, profile.max_ext_degree);
    let mut gens: Vec<Generator> = Vec::new();
    let mut decls = (Vec::new(), Vec::new());
    let specs = base_degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| (format!("a{}", i + 1), d, Part::Base))
        .chain(ext_degrees.iter().enumerate().map(|(i, &d)| (format!("x{}", i + 1), d, Part::Extension)));
    for (name, degree, part) in specs {
        let partial = Algebra::new(field, gens.clone())?;
        let mut d = Element::zero();
        for _ in 0..profile.budget {
            let cand = s.element(&partial, degree - 1, false);
            if partial.differential(&cand).is_zero() {
                d = cand;
                break;
            }
        }
        let decl = GenDecl {
            name: name.clone(),
            degree,
            d: expr(&partial.format(&d)),
        };
        match part {
            Part::Base => decls.0.push(decl),
            Part::Extension => decls.1.push(decl),
        }
        gens.push(Generator::new(name, degree, part, d));
    }
    let b = Arc::new(Algebra::new(field, gens)?);

    let rank = s.rng.gen_range(1..=profile.max_basis);
    let degrees = s.degrees(rank, 0, profile.max_basis_degree);
    let basis: Vec<(String, i32)> = degrees.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d)).collect();
    let mut columns: Vec<Vec<(usize, Element)>> = Vec::new();
    for lambda in 0..rank {
        let mut chosen = Vec::new();
        for _ in 0..profile.budget {
            let cand: Vec<(usize, Element)> = (0..lambda)
                .map(|mu| (mu, s.element(&b, degrees[lambda] - degrees[mu] - 1, true)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let mut trial = columns.clone();
            trial.push(cand.clone());
            let m = SemifreeModule::new(b.clone(), basis[..=lambda].to_vec(), trial).map_err(FrontendError::Kernel)?;
            if m.differential(&m.basis_image(lambda)).iter().all(Element::is_zero) {
                chosen = cand;
                break;
            }
        }
        columns.push(chosen);
    }
    let module = SemifreeModule::new(b.clone(), basis.clone(), columns.clone()).map_err(FrontendError::Kernel)?;
    let diffs = (0..rank)
        .filter(|&l| !columns[l].is_empty())
        .map(|l| (basis[l].0.clone(), expr(&module.format(&module.basis_image(l)))))
        .collect();

    let mut derivations = Vec::new();
    if n_ext > 0 {
        let t = AlgebraTarget::new(b.clone());
        for k in 0..profile.derivations {
            let degree = s.rng.gen_range(-profile.max_ext_degree..=1);
            let pool = der_basis(&t, degree);
            if pool.is_empty() {
                continue;
            }
            let mut d = Derivation::zero(&t, degree);
            for _ in 0..s.rng.gen_range(1..=2) {
                let e = pool.choose(&mut s.rng).expect("non-empty");
                d = der_add(&t, &d, &der_scale(&t, e, &s.coefficient()));
            }
            let images = b
                .extension_indices()
                .into_iter()
                .zip(&d.images)
                .filter(|(_, y)| !t.is_zero(y))
                .map(|(i, y)| (b.generator(i).name.clone(), expr(&b.format(y))))
                .collect();
            derivations.push(DerivationDecl {
                name: format!("D{}", k + 1),
                degree,
                images,
            });
        }
    }

    let mut algebras = Vec::new();
    algebras.push(AlgebraDecl {
        name: "A".into(),
        extends: None,
        gens: decls.0,
    });
    algebras.push(AlgebraDecl {
        name: "B".into(),
        extends: Some("A".into()),
        gens: decls.1,
    });
    Ok(Document {
        field: FieldSpec::Q,
        algebras,
        modules: vec![ModuleDecl {
            name: "N".into(),
            over: "B".into(),
            basis,
            diffs,
        }],
        derivations,
    })
}
