use num_bigint::BigInt;

/// A polynomial expression over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// `num/den` in lowest terms with positive denominator.
    Num(BigInt, BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(BigInt::from(0), BigInt::from(1))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(n, _) if n == &BigInt::from(0))
    }

    /// Names referenced, in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Num(..) => {}
            Expr::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Q,
    Fp(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenDecl {
    pub name: String,
    pub degree: i32,
    pub d: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: String,
    pub extends: Option<String>,
    pub gens: Vec<GenDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDecl {
    pub name: String,
    pub over: String,
    pub basis: Vec<(String, i32)>,
    pub diffs: Vec<(String, Expr)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationDecl {
    pub name: String,
    pub degree: i32,
    pub images: Vec<(String, Expr)>,
}

/// An instance description: a field, a base algebra A and an extension B,
/// modules, and derivations of B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub field: FieldSpec,
    pub algebras: Vec<AlgebraDecl>,
    pub modules: Vec<ModuleDecl>,
    pub derivations: Vec<DerivationDecl>,
}
