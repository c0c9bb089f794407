use std::collections::HashSet;
use std::sync::Arc;

use crate::gca::{format_terms, Algebra, Element, Part};
use crate::report::ValidationReport;
use crate::Error;

/// Element of a semifree module: coefficient `c_λ` of each basis element,
/// read as `Σ e_λ c_λ` with coefficients acting on the right.
pub type ModuleElement = Vec<Element>;

/// A finite-rank semifree DG module over B with ordered basis
/// `e_0 < e_1 < ...` and `∂(e_λ) = Σ_{μ<λ} e_μ b_{μλ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemifreeModule {
    algebra: Arc<Algebra>,
    names: Vec<String>,
    degrees: Vec<i32>,
    /// `diff[λ][μ] = b_{μλ}`.
    diff: Vec<Vec<Element>>,
}

impl SemifreeModule {
    /// `columns[λ]` lists `(μ, b_{μλ})`. Only shape errors are rejected
    /// here; the algebraic conditions are checked by [`Self::validate`].
    pub fn new(
        algebra: Arc<Algebra>,
        basis: Vec<(String, i32)>,
        columns: Vec<Vec<(usize, Element)>>,
    ) -> Result<Self, Error> {
        let rank = basis.len();
        if columns.len() > rank {
            return Err(Error::Mismatch(format!(
                "{} differential columns for a basis of size {rank}",
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for (name, _) in &basis {
            if !seen.insert(name.clone()) {
                return Err(Error::Mismatch(format!("basis element `{name}` is declared twice")));
            }
        }
        let mut diff = vec![vec![Element::zero(); rank]; rank];
        for (lambda, col) in columns.into_iter().enumerate() {
            for (mu, b) in col {
                if mu >= rank {
                    return Err(Error::Mismatch(format!("basis index {mu} out of range")));
                }
                diff[lambda][mu].add_assign(&b);
            }
        }
        let (names, degrees) = basis.into_iter().unzip();
        Ok(SemifreeModule {
            algebra,
            names,
            degrees,
            diff,
        })
    }

    /// Free module with zero differential on the given basis degrees.
    pub fn free(algebra: Arc<Algebra>, degrees: &[i32]) -> Self {
        let basis = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| (format!("e{i}"), d))
            .collect();
        SemifreeModule::new(algebra, basis, Vec::new()).expect("free module shape")
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, lambda: usize) -> &str {
        &self.names[lambda]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree(&self, lambda: usize) -> i32 {
        self.degrees[lambda]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn is_odd(&self, lambda: usize) -> bool {
        self.degrees[lambda].rem_euclid(2) == 1
    }

    /// `b_{μλ}`.
    pub fn coefficient(&self, mu: usize, lambda: usize) -> &Element {
        &self.diff[lambda][mu]
    }

    /// Nonzero `(μ, b_{μλ})` for a fixed λ.
    pub fn column(&self, lambda: usize) -> impl Iterator<Item = (usize, &Element)> {
        self.diff[lambda]
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_zero())
    }

    /// True when every basis element is a cycle.
    pub fn is_free(&self) -> bool {
        self.diff.iter().flatten().all(Element::is_zero)
    }

    /// True when every differential coefficient lies in the base algebra,
    /// i.e. the module is extended from a module over A.
    pub fn is_base_change(&self) -> bool {
        self.diff.iter().flatten().all(|b| {
            b.terms().all(|(m, _)| {
                m.support()
                    .all(|(i, _)| self.algebra.generator(i).part == Part::Base)
            })
        })
    }

    pub fn zero(&self) -> ModuleElement {
        vec![Element::zero(); self.rank()]
    }

    pub fn basis_element(&self, lambda: usize) -> ModuleElement {
        let mut v = self.zero();
        v[lambda] = self.algebra.one();
        v
    }

    /// `e_λ · b`.
    pub fn basis_times(&self, lambda: usize, b: &Element) -> ModuleElement {
        let mut v = self.zero();
        v[lambda] = b.clone();
        v
    }

    /// `∂(e_λ) = Σ_μ e_μ b_{μλ}`.
    pub fn basis_image(&self, lambda: usize) -> ModuleElement {
        self.diff[lambda].clone()
    }

    /// `∂(Σ e_λ c_λ) = Σ ∂(e_λ) c_λ + (-1)^{|e_λ|} e_λ d(c_λ)`.
    pub fn differential(&self, x: &ModuleElement) -> ModuleElement {
        let b = &self.algebra;
        let mut out = self.zero();
        for (lambda, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (mu, coeff) in self.column(lambda) {
                out[mu].add_assign(&b.mul(coeff, c));
            }
            out[lambda].add_assign(&b.differential(c).signed(self.is_odd(lambda)));
        }
        out
    }

    pub fn right_mul(&self, x: &ModuleElement, b: &Element) -> ModuleElement {
        x.iter().map(|c| self.algebra.mul(c, b)).collect()
    }

    /// `b · x = Σ (-1)^{|b||e_λ|} e_λ (b c_λ)` for homogeneous `b`.
    pub fn left_mul(&self, b: &Element, x: &ModuleElement) -> ModuleElement {
        let odd = self.algebra.degree(b).value().is_some_and(|d| d % 2 != 0);
        x.iter()
            .enumerate()
            .map(|(lambda, c)| self.algebra.mul(b, c).signed(odd && self.is_odd(lambda)))
            .collect()
    }

    /// Degree of `x` when it is homogeneous.
    pub fn element_degree(&self, x: &ModuleElement) -> Option<i32> {
        let mut deg = None;
        for (lambda, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.algebra.degree(c).value()? + self.degrees[lambda];
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Degree bookkeeping, strict triangularity and `∂² = 0`.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = self.algebra.num_generators();
        for lambda in 0..self.rank() {
            let subject = self.names[lambda].as_str();
            for (mu, b) in self.column(lambda) {
                let known = b.terms().all(|(m, _)| m.exponents().len() <= n);
                if !known {
                    report.record("coefficients", subject, false, "coefficient uses an unknown generator");
                    continue;
                }
                let triangular = mu < lambda;
                report.record(
                    "triangularity",
                    subject,
                    triangular,
                    if triangular {
                        String::new()
                    } else {
                        format!("d {} involves {}", self.names[lambda], self.names[mu])
                    },
                );
                let want = self.degrees[lambda] - self.degrees[mu] - 1;
                let ok = self.algebra.degree(b).fits(want);
                report.record(
                    "degree",
                    subject,
                    ok,
                    if ok {
                        String::new()
                    } else {
                        format!(
                            "coefficient of {} in d {} should have degree {want}",
                            self.names[mu], self.names[lambda]
                        )
                    },
                );
            }
            if report.is_valid() {
                let dd = self.differential(&self.basis_image(lambda));
                let zero = dd.iter().all(Element::is_zero);
                report.record(
                    "d-squared",
                    subject,
                    zero,
                    if zero {
                        String::new()
                    } else {
                        format!("d(d {}) = {}", self.names[lambda], self.format(&dd))
                    },
                );
            }
        }
        report
    }

    /// The shifted module `M(n)`: degrees lowered by `n`, differential
    /// multiplied by `(-1)^n`.
    pub fn shift(&self, n: i32) -> SemifreeModule {
        let odd = n.rem_euclid(2) == 1;
        SemifreeModule {
            algebra: self.algebra.clone(),
            names: self.names.clone(),
            degrees: self.degrees.iter().map(|d| d - n).collect(),
            diff: self
                .diff
                .iter()
                .map(|col| col.iter().map(|b| b.signed(odd)).collect())
                .collect(),
        }
    }

    /// Block sum; the basis of `other` follows that of `self` and its names
    /// get a trailing apostrophe on collision.
    pub fn direct_sum(&self, other: &SemifreeModule) -> SemifreeModule {
        let r = self.rank();
        let mut names = self.names.clone();
        for name in &other.names {
            let mut n = name.clone();
            while names.contains(&n) {
                n.push('\'');
            }
            names.push(n);
        }
        let total = r + other.rank();
        let mut diff = vec![vec![Element::zero(); total]; total];
        for lambda in 0..r {
            diff[lambda][..r].clone_from_slice(&self.diff[lambda]);
        }
        for lambda in 0..other.rank() {
            diff[r + lambda][r..].clone_from_slice(&other.diff[lambda]);
        }
        let mut degrees = self.degrees.clone();
        degrees.extend(&other.degrees);
        SemifreeModule {
            algebra: self.algebra.clone(),
            names,
            degrees,
            diff,
        }
    }

    /// Canonical printing such as `e0*x*y - 2*e1`.
    pub fn format(&self, x: &ModuleElement) -> String {
        let terms = x.iter().enumerate().flat_map(|(lambda, c)| {
            c.terms().map(move |(m, s)| {
                let mono = self.algebra.format_monomial(m);
                let body = if mono.is_empty() {
                    self.names[lambda].clone()
                } else {
                    format!("{}*{mono}", self.names[lambda])
                };
                (body, s.clone())
            })
        });
        format_terms(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::Generator;
    use crate::scalar::Field;

    fn k1() -> SemifreeModule {
        let q = Field::Rationals;
        let b = Arc::new(
            Algebra::new(q, vec![Generator::new("x", 2, Part::Extension, Element::zero())]).unwrap(),
        );
        let x = b.gen(0);
        SemifreeModule::new(b, vec![("e0".into(), 0), ("e1".into(), 3)], vec![vec![], vec![(0, x)]]).unwrap()
    }

    #[test]
    fn k1_validates() {
        let n = k1();
        assert!(n.validate().is_valid());
        assert_eq!(n.format(&n.basis_image(1)), "e0*x");
        assert!(!n.is_free());
    }

    #[test]
    fn diagonal_entry_is_rejected() {
        let n = k1();
        let b = n.algebra().clone();
        let bad = SemifreeModule::new(
            b.clone(),
            vec![("e0".into(), 0), ("e1".into(), 3)],
            vec![vec![], vec![(1, b.gen(0))]],
        )
        .unwrap();
        let r = bad.validate();
        assert!(r.has_failure("triangularity"));
    }

    #[test]
    fn shift_negates_odd() {
        let n = k1();
        let s = n.shift(1);
        assert_eq!(s.degrees(), &[-1, 2]);
        assert_eq!(s.coefficient(0, 1), &n.coefficient(0, 1).neg());
        assert_eq!(s.shift(-1), n);
        assert_eq!(n.shift(0), n);
    }
}
