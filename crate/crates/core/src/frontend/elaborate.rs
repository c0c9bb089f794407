use std::sync::Arc;

use crate::derivations::{make_derivation, Derivation};
use crate::dgmod::{ModuleElement, SemifreeModule};
use crate::enveloping::Extension;
use crate::gca::{Algebra, Element, Generator, Part};
use crate::report::ValidationReport;
use crate::scalar::Field;
use crate::target::AlgebraTarget;
use crate::Error;

use super::ast::{Document, Expr, FieldSpec};
use super::FrontendError;

/// Kernel objects described by a document. Nothing here has been validated
/// yet; [`Instance::validate`] runs every check and [`Instance::extension`]
/// refuses invalid algebras.
#[derive(Clone, Debug)]
pub struct Instance {
    pub field: Field,
    /// B, with the generators of A first.
    pub algebra: Arc<Algebra>,
    pub modules: Vec<(String, Arc<SemifreeModule>)>,
    /// Name, degree and image of every extension generator.
    pub derivations: Vec<(String, i32, Vec<Element>)>,
}

enum Value {
    Poly(Element),
    Module(ModuleElement),
}

struct Scope<'a> {
    algebra: &'a Algebra,
    basis: &'a [(String, i32)],
    context: String,
}

impl Scope<'_> {
    fn err(&self, message: impl Into<String>) -> FrontendError {
        FrontendError::Elaborate {
            context: self.context.clone(),
            message: message.into(),
        }
    }

    fn module_zero(&self) -> ModuleElement {
        vec![Element::zero(); self.basis.len()]
    }

    fn eval(&self, e: &Expr) -> Result<Value, FrontendError> {
        let field = self.algebra.field();
        Ok(match e {
            Expr::Num(n, d) => {
                let c = field
                    .fraction(n, d)
                    .ok_or_else(|| self.err(format!("{n}/{d} is not defined over {field}")))?;
                Value::Poly(Element::constant(c))
            }
            Expr::Var(v) => {
                if let Some(g) = self.algebra.gen_named(v) {
                    Value::Poly(g)
                } else if let Some(pos) = self.basis.iter().position(|(b, _)| b == v) {
                    let mut x = self.module_zero();
                    x[pos] = Element::one(field);
                    Value::Module(x)
                } else {
                    return Err(self.err(format!("unknown name '{v}'")));
                }
            }
            Expr::Neg(a) => match self.eval(a)? {
                Value::Poly(p) => Value::Poly(p.neg()),
                Value::Module(x) => Value::Module(x.iter().map(Element::neg).collect()),
            },
            Expr::Add(a, b) => self.combine(self.eval(a)?, self.eval(b)?, false)?,
            Expr::Sub(a, b) => self.combine(self.eval(a)?, self.eval(b)?, true)?,
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Poly(p), Value::Poly(q)) => Value::Poly(self.algebra.try_mul(&p, &q)?),
                (Value::Module(x), Value::Poly(q)) => Value::Module(self.right_mul(&x, &q)?),
                (Value::Poly(p), Value::Module(x)) => Value::Module(self.left_mul(&p, &x)?),
                (Value::Module(_), Value::Module(_)) => {
                    return Err(self.err("product of two module elements"));
                }
            },
            Expr::Pow(a, k) => match self.eval(a)? {
                Value::Poly(p) => Value::Poly(self.algebra.pow(&p, *k)),
                Value::Module(x) if *k == 1 => Value::Module(x),
                Value::Module(_) => return Err(self.err("power of a module element")),
            },
        })
    }

    fn combine(&self, a: Value, b: Value, subtract: bool) -> Result<Value, FrontendError> {
        let b = match b {
            Value::Poly(p) => Value::Poly(p.signed(subtract)),
            Value::Module(x) => Value::Module(x.iter().map(|c| c.signed(subtract)).collect()),
        };
        Ok(match (a, b) {
            (Value::Poly(p), Value::Poly(q)) => Value::Poly(p.add(&q)),
            (Value::Module(x), Value::Module(y)) => Value::Module(x.iter().zip(&y).map(|(a, b)| a.add(b)).collect()),
            (Value::Poly(p), Value::Module(x)) | (Value::Module(x), Value::Poly(p)) => {
                if !p.is_zero() {
                    return Err(self.err("sum of a module element and an algebra element"));
                }
                Value::Module(x)
            }
        })
    }

    fn right_mul(&self, x: &ModuleElement, b: &Element) -> Result<ModuleElement, FrontendError> {
        x.iter().map(|c| Ok(self.algebra.try_mul(c, b)?)).collect()
    }

    /// `b·(e_λ c) = (−1)^{|b||e_λ|} e_λ (b c)`, term by term.
    fn left_mul(&self, b: &Element, x: &ModuleElement) -> Result<ModuleElement, FrontendError> {
        let mut out = self.module_zero();
        for (m, s) in b.terms() {
            let bm_odd = self.algebra.monomial_is_odd(m);
            let mono = Element::term(m.clone(), s.clone());
            for (lambda, c) in x.iter().enumerate() {
                let sign = bm_odd && self.basis[lambda].1.rem_euclid(2) == 1;
                out[lambda].add_assign(&self.algebra.try_mul(&mono, c)?.signed(sign));
            }
        }
        Ok(out)
    }

    fn poly(&self, e: &Expr) -> Result<Element, FrontendError> {
        match self.eval(e)? {
            Value::Poly(p) => Ok(p),
            Value::Module(_) => Err(self.err("expected an algebra element")),
        }
    }
}

impl From<crate::gca::GcaError> for FrontendError {
    fn from(e: crate::gca::GcaError) -> Self {
        FrontendError::Kernel(Error::Gca(e))
    }
}

/// Builds the kernel objects of a parsed document.
pub fn elaborate(doc: &Document) -> Result<Instance, FrontendError> {
    let field = match doc.field {
        FieldSpec::Q => Field::Rationals,
        FieldSpec::Fp(p) => Field::Prime(p),
    };
    // A lone algebra is an extension of the ground field.
    let has_base = doc.algebras.len() == 2;
    let mut gens: Vec<Generator> = Vec::new();
    for (k, alg) in doc.algebras.iter().enumerate() {
        let part = if has_base && k == 0 { Part::Base } else { Part::Extension };
        for g in &alg.gens {
            let partial = Algebra::new(field, gens.clone())?;
            let scope = Scope {
                algebra: &partial,
                basis: &[],
                context: format!("algebra {}, gen {}", alg.name, g.name),
            };
            let d = scope.poly(&g.d)?;
            gens.push(Generator::new(g.name.clone(), g.degree, part, d));
        }
    }
    let algebra = Arc::new(Algebra::new(field, gens)?);

    let mut modules = Vec::new();
    for m in &doc.modules {
        let mut columns = vec![Vec::new(); m.basis.len()];
        for (target, e) in &m.diffs {
            let lambda = m.basis.iter().position(|(b, _)| b == target).expect("checked by the parser");
            let scope = Scope {
                algebra: &algebra,
                basis: &m.basis,
                context: format!("module {}, d {}", m.name, target),
            };
            let col = match scope.eval(e)? {
                Value::Module(x) => x,
                Value::Poly(p) if p.is_zero() => scope.module_zero(),
                Value::Poly(_) => return Err(scope.err("expected a combination of basis elements")),
            };
            columns[lambda] = col.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        }
        let module = SemifreeModule::new(algebra.clone(), m.basis.clone(), columns).map_err(FrontendError::Kernel)?;
        modules.push((m.name.clone(), Arc::new(module)));
    }

    let mut derivations = Vec::new();
    for d in &doc.derivations {
        let ext = algebra.extension_indices();
        let mut images = vec![Element::zero(); ext.len()];
        for (g, e) in &d.images {
            let scope = Scope {
                algebra: &algebra,
                basis: &[],
                context: format!("derivation {}, image {}", d.name, g),
            };
            let i = algebra.index_of(g).expect("checked by the parser");
            let k = ext.iter().position(|&j| j == i).ok_or_else(|| scope.err("not an extension generator"))?;
            images[k] = scope.poly(e)?;
        }
        derivations.push((d.name.clone(), d.degree, images));
    }
    Ok(Instance {
        field,
        algebra,
        modules,
        derivations,
    })
}

impl Instance {
    /// Every check on the algebra, its enveloping data, each module and each
    /// derivation. Later stages are skipped when an earlier one fails.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.algebra.validate();
        if !report.is_valid() {
            return report;
        }
        match Extension::new(self.algebra.clone()) {
            Ok(_) => report.record("extension", "B", true, ""),
            Err(e) => {
                report.record("extension", "B", false, e.to_string());
                return report;
            }
        }
        for (name, m) in &self.modules {
            for mut c in m.validate().checks {
                c.subject = format!("{name}.{}", c.subject);
                report.push(c);
            }
        }
        for (name, _, _) in &self.derivations {
            let detail = match self.derivation(name) {
                Ok(_) => String::new(),
                Err(e) => e.to_string(),
            };
            report.record("derivation", name, detail.is_empty(), detail);
        }
        report
    }

    pub fn extension(&self) -> Result<Extension, Error> {
        Extension::new(self.algebra.clone())
    }

    /// The named module, or the only one when no name is given.
    pub fn module(&self, name: Option<&str>) -> Result<Arc<SemifreeModule>, Error> {
        match name {
            Some(n) => self
                .modules
                .iter()
                .find(|(m, _)| m == n)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| Error::Mismatch(format!("unknown module '{n}'"))),
            None => match self.modules.as_slice() {
                [(_, m)] => Ok(m.clone()),
                [] => Err(Error::Mismatch("the document declares no module".into())),
                _ => Err(Error::Mismatch("several modules declared; pick one with --module".into())),
            },
        }
    }

    pub fn module_name(&self, name: Option<&str>) -> Option<String> {
        match name {
            Some(n) => Some(n.to_string()),
            None => self.modules.first().map(|(n, _)| n.clone()),
        }
    }

    pub fn derivation(&self, name: &str) -> Result<Derivation<Element>, Error> {
        let (_, degree, images) = self
            .derivations
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| Error::Mismatch(format!("unknown derivation '{name}'")))?;
        make_derivation(&AlgebraTarget::new(self.algebra.clone()), *degree, images.clone())
    }
}
