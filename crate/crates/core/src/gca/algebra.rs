use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::element::{Element, Monomial};
use super::GcaError;
use crate::report::ValidationReport;
use crate::scalar::{Field, Scalar};

/// Whether a generator belongs to the base algebra A or is adjoined in B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Base,
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub part: Part,
    /// Image under the differential.
    pub d: Element,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32, part: Part, d: Element) -> Self {
        Generator {
            name: name.into(),
            degree,
            part,
            d,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Homogeneity of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(i32),
    Mixed,
}

impl Degree {
    pub fn value(self) -> Option<i32> {
        match self {
            Degree::Homogeneous(d) => Some(d),
            _ => None,
        }
    }

    /// Whether the element may be regarded as living in degree `d`.
    pub fn fits(self, d: i32) -> bool {
        match self {
            Degree::Zero => true,
            Degree::Homogeneous(e) => e == d,
            Degree::Mixed => false,
        }
    }
}

/// A free strongly graded-commutative DG algebra over a field: even
/// generators are polynomial, odd generators exterior.
#[derive(Debug)]
pub struct Algebra {
    field: Field,
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
    basis_cache: RwLock<HashMap<i32, Arc<Vec<Monomial>>>>,
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        Algebra {
            field: self.field,
            gens: self.gens.clone(),
            by_name: self.by_name.clone(),
            basis_cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.gens == other.gens
    }
}

impl Algebra {
    /// Builds an algebra; only structural problems (duplicate names,
    /// generators of degree 0 or below) are errors. Everything else is left
    /// to [`Algebra::validate`].
    pub fn new(field: Field, gens: Vec<Generator>) -> Result<Self, GcaError> {
        let mut by_name = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.degree < 1 {
                return Err(GcaError::NonPositiveDegree(g.name.clone(), g.degree));
            }
            if by_name.insert(g.name.clone(), i).is_some() {
                return Err(GcaError::DuplicateName(g.name.clone()));
            }
        }
        Ok(Algebra {
            field,
            gens,
            by_name,
            basis_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn extension_indices(&self) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&i| self.gens[i].part == Part::Extension)
            .collect()
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&i| self.gens[i].part == Part::Base)
            .collect()
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }

    pub fn one(&self) -> Element {
        Element::one(self.field)
    }

    pub fn scalar(&self, n: i64) -> Element {
        Element::constant(self.field.from_i64(n))
    }

    pub fn gen(&self, i: usize) -> Element {
        Element::generator(i, self.field)
    }

    pub fn gen_named(&self, name: &str) -> Option<Element> {
        self.index_of(name).map(|i| self.gen(i))
    }

    fn check_monomial(&self, m: &Monomial) -> Result<(), GcaError> {
        if m.exponents().len() > self.gens.len() {
            return Err(GcaError::UnknownGenerator(m.exponents().len() - 1));
        }
        Ok(())
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i32 {
        m.support().map(|(i, e)| self.gens[i].degree * e as i32).sum()
    }

    pub fn degree(&self, a: &Element) -> Degree {
        let mut deg = None;
        for (m, _) in a.terms() {
            let d = self.monomial_degree(m);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Degree::Mixed,
                _ => {}
            }
        }
        match deg {
            None => Degree::Zero,
            Some(d) => Degree::Homogeneous(d),
        }
    }

    /// Parity of the (homogeneous) degree of a monomial.
    pub fn monomial_is_odd(&self, m: &Monomial) -> bool {
        m.support()
            .filter(|&(i, e)| self.gens[i].is_odd() && e % 2 == 1)
            .count()
            % 2
            == 1
    }

    /// Sorts a word in the generators into canonical order, returning the
    /// Koszul sign (`true` for negative) or `None` when an odd generator
    /// repeats.
    pub fn normalize_monomial(&self, factors: &[usize]) -> Result<Option<(bool, Monomial)>, GcaError> {
        if let Some(&bad) = factors.iter().find(|&&i| i >= self.gens.len()) {
            return Err(GcaError::UnknownGenerator(bad));
        }
        let mut word = factors.to_vec();
        let mut negative = false;
        // insertion sort; each adjacent swap of two odd letters flips the sign
        for i in 1..word.len() {
            let mut j = i;
            while j > 0 && word[j - 1] > word[j] {
                if self.is_odd(word[j - 1]) && self.is_odd(word[j]) {
                    negative = !negative;
                }
                word.swap(j - 1, j);
                j -= 1;
            }
        }
        let mut exps = vec![0u16; self.gens.len()];
        for &g in &word {
            exps[g] += 1;
            if self.is_odd(g) && exps[g] > 1 {
                return Ok(None);
            }
        }
        Ok(Some((negative, Monomial::from_exponents(exps))))
    }

    /// Canonical factor word of a monomial (generators repeated by exponent).
    pub fn factors(&self, m: &Monomial) -> Vec<usize> {
        let mut out = Vec::with_capacity(m.length() as usize);
        for (i, e) in m.support() {
            for _ in 0..e {
                out.push(i);
            }
        }
        out
    }

    /// Product of two monomials with its Koszul sign, or `None` if an odd
    /// generator would be squared.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let ea = a.exponents();
        let eb = b.exponents();
        let n = ea.len().max(eb.len());
        let mut exps = vec![0u16; n];
        let mut odd_in_a_after = 0usize;
        let mut negative = false;
        // scan from the right so that `odd_in_a_after` counts odd letters of
        // `a` with larger index than the current position
        for i in (0..n).rev() {
            let x = a.exponent(i);
            let y = b.exponent(i);
            let odd = self.gens[i].is_odd();
            if odd {
                if x > 0 && y > 0 {
                    return None;
                }
                if y > 0 && odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
                if x > 0 {
                    odd_in_a_after += 1;
                }
            }
            exps[i] = x + y;
        }
        Some((negative, Monomial::from_exponents(exps)))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        if a.is_zero() || b.is_zero() {
            return out;
        }
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    out.add_term(m, ca.mul(cb).signed(neg));
                }
            }
        }
        out
    }

    /// Multiplication that rejects elements referencing generators this
    /// algebra does not have.
    pub fn try_mul(&self, a: &Element, b: &Element) -> Result<Element, GcaError> {
        for (m, _) in a.terms().chain(b.terms()) {
            self.check_monomial(m)?;
        }
        Ok(self.mul(a, b))
    }

    pub fn mul_all<'a>(&self, parts: impl IntoIterator<Item = &'a Element>) -> Element {
        parts
            .into_iter()
            .fold(self.one(), |acc, p| self.mul(&acc, p))
    }

    pub fn pow(&self, a: &Element, k: u32) -> Element {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    fn monomial_element(&self, m: Monomial) -> Element {
        Element::term(m, self.field.one())
    }

    /// Differential extended from the generators by the Leibniz rule.
    pub fn differential(&self, a: &Element) -> Element {
        a.map_monomials(|m| self.differential_monomial(m))
    }

    fn differential_monomial(&self, m: &Monomial) -> Element {
        let mut out = Element::zero();
        let mut prefix = vec![0u16; m.exponents().len()];
        let mut prefix_odd = false;
        for (i, e) in m.support() {
            let g = &self.gens[i];
            if !g.d.is_zero() {
                // even generators are central, so d(g^e) = e g^(e-1) dg
                let mut rest = m.exponents().to_vec();
                rest[..i].fill(0);
                rest[i] = e - 1;
                let p = self.monomial_element(Monomial::from_exponents(prefix.clone()));
                let r = self.monomial_element(Monomial::from_exponents(rest));
                let term = self.mul(&p, &self.mul(&g.d, &r));
                let coeff = self.field.from_i64(e as i64).signed(prefix_odd);
                out.add_scaled(&term, &coeff);
            }
            prefix[i] = e;
            if g.is_odd() && e % 2 == 1 {
                prefix_odd = !prefix_odd;
            }
        }
        out
    }

    /// All canonical monomials of total degree `n`, in monomial order.
    pub fn monomial_basis(&self, n: i32) -> Arc<Vec<Monomial>> {
        if n < 0 {
            return Arc::new(Vec::new());
        }
        if let Some(b) = self.basis_cache.read().expect("basis cache").get(&n) {
            return b.clone();
        }
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.gens.len()];
        let reach = self.reachability(n);
        self.enumerate(0, n, &reach, &mut exps, &mut out);
        out.sort();
        let out = Arc::new(out);
        self.basis_cache
            .write()
            .expect("basis cache")
            .entry(n)
            .or_insert_with(|| out.clone());
        out
    }

    /// Size of the degree `n` monomial basis, computed without enumerating.
    pub fn count_monomials(&self, n: i32) -> usize {
        if n < 0 {
            return 0;
        }
        let n = n as usize;
        let mut ways = vec![0usize; n + 1];
        ways[0] = 1;
        for g in &self.gens {
            let d = g.degree as usize;
            if d > n {
                continue;
            }
            if g.is_odd() {
                for k in (d..=n).rev() {
                    ways[k] = ways[k].saturating_add(ways[k - d]);
                }
            } else {
                for k in d..=n {
                    ways[k] = ways[k].saturating_add(ways[k - d]);
                }
            }
        }
        ways[n]
    }

    /// `reach[i][r]`: some monomial in generators `i..` has degree `r`.
    fn reachability(&self, n: i32) -> Vec<Vec<bool>> {
        let n = n as usize;
        let k = self.gens.len();
        let mut reach = vec![vec![false; n + 1]; k + 1];
        reach[k][0] = true;
        for i in (0..k).rev() {
            let d = self.gens[i].degree as usize;
            let max = if self.gens[i].is_odd() { 1 } else { n };
            for r in 0..=n {
                reach[i][r] = (0..=max).take_while(|e| e * d <= r).any(|e| reach[i + 1][r - e * d]);
            }
        }
        reach
    }

    fn enumerate(&self, i: usize, remaining: i32, reach: &[Vec<bool>], exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if !reach[i][remaining as usize] {
            return;
        }
        if remaining == 0 {
            out.push(Monomial::from_exponents(exps.clone()));
            return;
        }
        let d = self.gens[i].degree;
        let max = if self.gens[i].is_odd() { 1.min(remaining / d) } else { remaining / d };
        for e in 0..=max {
            exps[i] = e as u16;
            self.enumerate(i + 1, remaining - e * d, reach, exps, out);
        }
        exps[i] = 0;
    }

    /// Dual-basis derivation `∂/∂X_i` of degree `-|X_i|` applied to `p`.
    pub fn partial_derivative(&self, i: usize, p: &Element) -> Result<Element, GcaError> {
        if i >= self.gens.len() {
            return Err(GcaError::UnknownGenerator(i));
        }
        if self.gens[i].part != Part::Extension {
            return Err(GcaError::NotExtensionGenerator(self.gens[i].name.clone()));
        }
        let odd = self.gens[i].is_odd();
        Ok(p.map_monomials(|m| {
            let e = m.exponent(i);
            if e == 0 {
                return Element::zero();
            }
            let rest = m.with_exponent(i, e - 1);
            let coeff = if odd {
                // sign from moving the odd derivation past the earlier factors
                let before = m
                    .support()
                    .take_while(|&(j, _)| j < i)
                    .filter(|&(j, x)| self.gens[j].is_odd() && x % 2 == 1)
                    .count();
                self.field.one().signed(before % 2 == 1)
            } else {
                self.field.from_i64(e as i64)
            };
            Element::term(rest, coeff)
        }))
    }

    /// Structural and differential checks on every generator.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let mut last_ext_degree = 0;
        for (i, g) in self.gens.iter().enumerate() {
            let subject = g.name.as_str();
            let refs_ok = g.d.terms().all(|(m, _)| m.exponents().len() <= i);
            report.record(
                "well-founded",
                subject,
                refs_ok,
                if refs_ok { "" } else { "differential references a later or the same generator" },
            );
            let deg = self.degree(&g.d);
            let deg_ok = deg.fits(g.degree - 1);
            report.record(
                "degree",
                subject,
                deg_ok,
                match deg {
                    Degree::Homogeneous(d) if !deg_ok => format!("d{} has degree {d}, expected {}", g.name, g.degree - 1),
                    Degree::Mixed => format!("d{} is not homogeneous", g.name),
                    _ => String::new(),
                },
            );
            if g.part == Part::Extension {
                let ok = g.degree >= last_ext_degree;
                report.record(
                    "extension-order",
                    subject,
                    ok,
                    if ok { "" } else { "extension generators must be declared in weakly increasing degree" },
                );
                last_ext_degree = g.degree;
            }
            let dd = self.differential(&g.d);
            report.record(
                "d-squared",
                subject,
                dd.is_zero(),
                if dd.is_zero() { String::new() } else { format!("d(d{}) = {}", g.name, self.format(&dd)) },
            );
        }
        report
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, e) in m.support() {
            let name = self.gens.get(i).map(|g| g.name.as_str()).unwrap_or("?");
            if e == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }

    /// Canonical printing, e.g. `3/2*x^2*y1 - y1*y2`.
    pub fn format(&self, a: &Element) -> String {
        format_terms(a.terms().map(|(m, c)| (self.format_monomial(m), c.clone())))
    }
}

/// Joins `(factor string, coefficient)` terms into canonical sum notation.
pub fn format_terms(terms: impl Iterator<Item = (String, Scalar)>) -> String {
    let mut s = String::new();
    for (k, (body, c)) in terms.enumerate() {
        let neg = c.is_negative();
        let abs = if neg { c.neg() } else { c.clone() };
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if body.is_empty() {
            let _ = write!(s, "{abs}");
        } else if abs.is_one() {
            s.push_str(&body);
        } else {
            let _ = write!(s, "{abs}*{body}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Sends each generator to an element of a target algebra and extends
/// multiplicatively. Images must have the parity of their generators.
pub fn substitute(source: &Algebra, target: &Algebra, images: &[Element], a: &Element) -> Element {
    a.map_monomials(|m| {
        let mut acc = target.one();
        for (i, e) in m.support() {
            for _ in 0..e {
                acc = target.mul(&acc, &images[i]);
            }
        }
        debug_assert!(m.exponents().len() <= source.num_generators());
        acc
    })
}
