use std::sync::Arc;

use crate::gca::{substitute, Algebra, Element, Generator, Monomial, Part};
use crate::report::ValidationReport;
use crate::Error;

/// The enveloping algebra `B^e = B ⊗_A B` of a free extension, in two
/// coordinate systems.
///
/// * Tensor coordinates: the generators of B (base part and left copies
///   `X`), followed by right copies `X'`. Elements of B are literally
///   elements of `B^e` through the left inclusion.
/// * Diagonal coordinates: the generators of B followed by `t_k = X_k − X_k'`.
///   Here the diagonal ideal J is spanned by monomials containing some
///   `t`, and J² by those containing at least two.
#[derive(Debug)]
pub struct Enveloping {
    b: Arc<Algebra>,
    env: Arc<Algebra>,
    diag: Algebra,
    ext: Vec<usize>,
    right_images: Vec<Element>,
    pi_images: Vec<Element>,
    to_diag_images: Vec<Element>,
    from_diag_images: Vec<Element>,
}

impl Enveloping {
    pub fn new(b: Arc<Algebra>) -> Result<Self, Error> {
        let field = b.field();
        let n = b.num_generators();
        let ext = b.extension_indices();
        let copy = |g: &Generator, name: String, d: Element| Generator::new(name, g.degree, Part::Base, d);

        // right copies: first with placeholder differentials so that the
        // substitution can multiply, then with the real ones
        let mut gens: Vec<Generator> = b
            .generators()
            .iter()
            .map(|g| copy(g, g.name.clone(), g.d.clone()))
            .collect();
        for &i in &ext {
            let g = b.generator(i);
            gens.push(copy(g, format!("{}'", g.name), Element::zero()));
        }
        let scratch = Algebra::new(field, gens.clone())?;
        let mut right_images: Vec<Element> = (0..n).map(|i| scratch.gen(i)).collect();
        for (k, &i) in ext.iter().enumerate() {
            right_images[i] = scratch.gen(n + k);
        }
        for (k, &i) in ext.iter().enumerate() {
            gens[n + k].d = substitute(&b, &scratch, &right_images, &b.generator(i).d);
        }
        let env = Arc::new(Algebra::new(field, gens)?);

        let mut pi_images: Vec<Element> = (0..n).map(|i| b.gen(i)).collect();
        for &i in &ext {
            pi_images.push(b.gen(i));
        }

        let mut dgens: Vec<Generator> = b
            .generators()
            .iter()
            .map(|g| copy(g, g.name.clone(), g.d.clone()))
            .collect();
        for &i in &ext {
            let g = b.generator(i);
            dgens.push(copy(g, format!("t[{}]", g.name), Element::zero()));
        }
        let scratch = Algebra::new(field, dgens.clone())?;
        let mut to_diag_images: Vec<Element> = (0..n).map(|i| scratch.gen(i)).collect();
        for (k, &i) in ext.iter().enumerate() {
            to_diag_images.push(scratch.gen(i).sub(&scratch.gen(n + k)));
        }
        for (k, &i) in ext.iter().enumerate() {
            // d t_k = d(X_k) − d(X_k') rewritten in diagonal coordinates
            let dt = env.differential(&env.gen(i).sub(&env.gen(n + k)));
            dgens[n + k].d = substitute(&env, &scratch, &to_diag_images, &dt);
        }
        let diag = Algebra::new(field, dgens)?;
        let mut from_diag_images: Vec<Element> = (0..n).map(|i| env.gen(i)).collect();
        for (k, &i) in ext.iter().enumerate() {
            from_diag_images.push(env.gen(i).sub(&env.gen(n + k)));
        }

        Ok(Enveloping {
            b,
            env,
            diag,
            ext,
            right_images,
            pi_images,
            to_diag_images,
            from_diag_images,
        })
    }

    pub fn base(&self) -> &Arc<Algebra> {
        &self.b
    }

    /// The algebra `B^e` in tensor coordinates.
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.env
    }

    pub fn diagonal(&self) -> &Algebra {
        &self.diag
    }

    /// Indices (in B) of the extension generators, in order.
    pub fn extension_indices(&self) -> &[usize] {
        &self.ext
    }

    pub fn num_extension(&self) -> usize {
        self.ext.len()
    }

    /// Index in `B^e` of the right copy of the `k`-th extension generator.
    pub fn right_copy(&self, k: usize) -> usize {
        self.b.num_generators() + k
    }

    /// Index of `t_k` in diagonal coordinates.
    pub fn t_index(&self, k: usize) -> usize {
        self.b.num_generators() + k
    }

    /// `b ↦ 1 ⊗ b`.
    pub fn iota_right(&self, b: &Element) -> Element {
        substitute(&self.b, &self.env, &self.right_images, b)
    }

    /// The multiplication map `π_B: B^e → B`.
    pub fn pi(&self, m: &Element) -> Element {
        substitute(&self.env, &self.b, &self.pi_images, m)
    }

    /// Universal derivation `δ(b) = b ⊗ 1 − 1 ⊗ b`.
    pub fn delta(&self, b: &Element) -> Element {
        b.sub(&self.iota_right(b))
    }

    pub fn to_diag(&self, m: &Element) -> Element {
        substitute(&self.env, &self.diag, &self.to_diag_images, m)
    }

    pub fn from_diag(&self, p: &Element) -> Element {
        substitute(&self.diag, &self.env, &self.from_diag_images, p)
    }

    pub fn in_ideal(&self, m: &Element) -> bool {
        self.pi(m).is_zero()
    }

    fn t_length(&self, m: &Monomial) -> u32 {
        let n = self.b.num_generators();
        m.support().filter(|&(i, _)| i >= n).map(|(_, e)| e as u32).sum()
    }

    /// Number of `t` factors in each term of `m` (diagonal coordinates);
    /// the filtration by powers of J.
    pub fn j_order(&self, m: &Element) -> Option<u32> {
        let d = self.to_diag(m);
        d.terms().map(|(mono, _)| self.t_length(mono)).min()
    }

    /// Writes `j ∈ J` as `Σ_k c_k · δ(X_k)`, splitting each diagonal monomial
    /// at its first `t` factor (`last = false`) or its last one.
    pub fn factor(&self, j: &Element, last: bool) -> Result<Vec<Element>, Error> {
        let n = self.b.num_generators();
        let mut coeffs = vec![Element::zero(); self.ext.len()];
        let d = self.to_diag(j);
        for (m, c) in d.terms() {
            let ts: Vec<(usize, u16)> = m.support().filter(|&(i, _)| i >= n).collect();
            let Some(&(i, e)) = (if last { ts.last() } else { ts.first() }) else {
                return Err(Error::Mismatch(format!(
                    "{} is not in the diagonal ideal",
                    self.env.format(j)
                )));
            };
            let rest = m.with_exponent(i, e - 1);
            let sign = if last {
                false
            } else {
                // move t_i past the remaining t factors
                self.diag.is_odd(i) && self.diag.monomial_is_odd(&Monomial::from_exponents(
                    rest.exponents().iter().enumerate().map(|(k, &x)| if k >= n { x } else { 0 }).collect(),
                ))
            };
            coeffs[i - n].add_term(rest, c.signed(sign));
        }
        Ok(coeffs.iter().map(|c| self.from_diag(c)).collect())
    }

    /// `DG` map checks: `π_B` and the right inclusion commute with the
    /// differentials, the coordinate changes are inverse to each other.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        for (i, g) in self.env.generators().iter().enumerate() {
            let x = self.env.gen(i);
            let lhs = self.pi(&self.env.differential(&x));
            let rhs = self.b.differential(&self.pi(&x));
            report.record("pi-chain-map", &g.name, lhs == rhs, "");
            let round = self.from_diag(&self.to_diag(&x));
            report.record("coordinates", &g.name, round == x, "");
        }
        for g in self.b.generators() {
            let i = self.b.index_of(&g.name).expect("own generator");
            let x = self.b.gen(i);
            let lhs = self.iota_right(&self.b.differential(&x));
            let rhs = self.env.differential(&self.iota_right(&x));
            report.record("right-inclusion-chain-map", &g.name, lhs == rhs, "");
        }
        report.extend(self.env.validate());
        report
    }
}
