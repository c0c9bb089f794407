//! Line-oriented document parser with a recursive-descent expression
//! parser. Errors carry 1-based line and column.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use super::ast::{AlgebraDecl, DerivationDecl, Document, Expr, FieldSpec, GenDecl, ModuleDecl};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Rational(BigInt, BigInt),
    Sym(char),
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    /// Tokens of one line, each with its 1-based column.
    fn tokens(src: &'a str, line: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer {
            chars: src.char_indices().collect(),
            pos: 0,
            line,
            src,
        };
        let mut out = Vec::new();
        while let Some(&(_, c)) = lx.chars.get(lx.pos) {
            let col = lx.pos + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                lx.pos += 1;
            } else if c.is_ascii_alphabetic() {
                let start = lx.pos;
                while lx
                    .chars
                    .get(lx.pos)
                    .is_some_and(|&(_, c)| c.is_ascii_alphanumeric() || c == '_')
                {
                    lx.pos += 1;
                }
                out.push((col, Tok::Ident(lx.slice(start, lx.pos))));
            } else if c.is_ascii_digit() {
                let num = lx.integer();
                if lx.peek() == Some('/') {
                    lx.pos += 1;
                    if !lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(lx.error(lx.pos + 1, "expected a denominator after '/'"));
                    }
                    let den = lx.integer();
                    if den.is_zero() {
                        return Err(lx.error(col, "zero denominator"));
                    }
                    out.push((col, Tok::Rational(num, den)));
                } else {
                    out.push((col, Tok::Int(num)));
                }
            } else if "+-*^()=".contains(c) {
                lx.pos += 1;
                out.push((col, Tok::Sym(c)));
            } else {
                return Err(lx.error(col, &format!("unexpected character '{c}'")));
            }
        }
        Ok(out)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn slice(&self, a: usize, b: usize) -> String {
        let start = self.chars[a].0;
        let end = self.chars.get(b).map(|&(i, _)| i).unwrap_or(self.src.len());
        self.src[start..end].to_string()
    }

    fn integer(&mut self) -> BigInt {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.slice(start, self.pos).parse().expect("digits")
    }

    fn error(&self, column: usize, message: &str) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.to_string(),
        }
    }
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected '{kw}'"))),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn int(&mut self, what: &str) -> Result<i32, ParseError> {
        let neg = if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v: i32 = n.try_into().map_err(|_| self.err(format!("{what} out of range")))?;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary ('*' unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Sym('*')) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        match self.peek() {
            Some(Tok::Ident(_) | Tok::Int(_) | Tok::Rational(..)) | Some(Tok::Sym('(')) => {
                Err(self.err("juxtaposition is not allowed; use '*'"))
            }
            _ => Ok(lhs),
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' INT)?
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Int(n)) => {
                    let e: u32 = (&n).try_into().map_err(|_| self.err("exponent out of range"))?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected a non-negative integer exponent"));
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(Expr::Var(s)),
            Some(Tok::Int(n)) => Ok(Expr::Num(n, BigInt::from(1))),
            Some(Tok::Rational(n, d)) => {
                let g = n.gcd(&d);
                Ok(Expr::Num(&n / &g, &d / &g))
            }
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => Err(ParseError {
                line: self.line,
                column: col,
                message: "expected an expression".into(),
            }),
        }
    }
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text, 1)?;
    let mut c = Cursor {
        toks,
        pos: 0,
        line: 1,
        end_col: text.chars().count() + 1,
    };
    let e = c.expr()?;
    c.finish()?;
    Ok(e)
}

enum Block {
    None,
    Algebra,
    Module,
    Derivation,
}

/// Parses an instance document. Name resolution (forward references,
/// unknown names) is checked here; degrees and differentials are checked
/// when the document is elaborated and validated.
pub fn parse_instance(text: &str) -> Result<Document, ParseError> {
    let mut field = None;
    let mut algebras: Vec<AlgebraDecl> = Vec::new();
    let mut modules: Vec<ModuleDecl> = Vec::new();
    let mut derivations: Vec<DerivationDecl> = Vec::new();
    let mut block = Block::None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let toks = Lexer::tokens(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            toks,
            pos: 0,
            line,
            end_col: raw.chars().count() + 1,
        };
        let head = c.ident("a keyword")?;
        match head.as_str() {
            "field" => {
                if field.is_some() {
                    return Err(ParseError {
                        line,
                        column: 1,
                        message: "field declared twice".into(),
                    });
                }
                let kind = c.ident("'Q' or 'Fp'")?;
                field = Some(match kind.as_str() {
                    "Q" => FieldSpec::Q,
                    "Fp" => {
                        let p = c.int("a prime")?;
                        if p < 3 || !is_prime(p as u64) {
                            c.pos -= 1;
                            return Err(c.err("the characteristic must be an odd prime"));
                        }
                        FieldSpec::Fp(p as u64)
                    }
                    _ => {
                        c.pos -= 1;
                        return Err(c.err("expected 'Q' or 'Fp'"));
                    }
                });
                block = Block::None;
            }
            "algebra" => {
                let name = c.ident("an algebra name")?;
                if algebras.iter().any(|a| a.name == name) {
                    c.pos -= 1;
                    return Err(c.err(format!("algebra '{name}' declared twice")));
                }
                let extends = if c.peek().is_some() {
                    c.keyword("extends")?;
                    let base = c.ident("an algebra name")?;
                    if !algebras.iter().any(|a| a.name == base) {
                        c.pos -= 1;
                        return Err(c.err(format!("unknown algebra '{base}'")));
                    }
                    Some(base)
                } else {
                    None
                };
                if algebras.len() == 2 || (algebras.len() == 1 && extends.is_none()) {
                    return Err(ParseError {
                        line,
                        column: 1,
                        message: "a document has one base algebra and at most one extension of it".into(),
                    });
                }
                algebras.push(AlgebraDecl {
                    name,
                    extends,
                    gens: Vec::new(),
                });
                block = Block::Algebra;
            }
            "gen" => {
                if !matches!(block, Block::Algebra) {
                    return Err(c_err_at(line, 1, "'gen' outside an algebra block"));
                }
                let name = c.ident("a generator name")?;
                c.keyword("deg")?;
                let degree = c.int("a degree")?;
                c.keyword("d")?;
                let d = c.expr()?;
                c.finish()?;
                let known: Vec<&str> = algebras.iter().flat_map(|a| a.gens.iter().map(|g| g.name.as_str())).collect();
                if known.contains(&name.as_str()) {
                    return Err(c_err_at(line, 5, &format!("generator '{name}' declared twice")));
                }
                check_names(&d, &known, line, raw, "generator")?;
                algebras.last_mut().expect("algebra block").gens.push(GenDecl { name, degree, d });
            }
            "module" => {
                let name = c.ident("a module name")?;
                c.keyword("over")?;
                let over = c.ident("an algebra name")?;
                if !algebras.iter().any(|a| a.name == over) {
                    c.pos -= 1;
                    return Err(c.err(format!("unknown algebra '{over}'")));
                }
                c.finish()?;
                if modules.iter().any(|m| m.name == name) {
                    return Err(c_err_at(line, 1, &format!("module '{name}' declared twice")));
                }
                modules.push(ModuleDecl {
                    name,
                    over,
                    basis: Vec::new(),
                    diffs: Vec::new(),
                });
                block = Block::Module;
            }
            "basis" => {
                if !matches!(block, Block::Module) {
                    return Err(c_err_at(line, 1, "'basis' outside a module block"));
                }
                let m = modules.last_mut().expect("module block");
                if !m.diffs.is_empty() {
                    return Err(c_err_at(line, 1, "basis lines must precede 'd' lines"));
                }
                let name = c.ident("a basis name")?;
                c.keyword("deg")?;
                let degree = c.int("a degree")?;
                c.finish()?;
                let clash = m.basis.iter().any(|(b, _)| b == &name)
                    || algebras.iter().any(|a| a.gens.iter().any(|g| g.name == name));
                if clash {
                    return Err(c_err_at(line, 7, &format!("name '{name}' already in use")));
                }
                m.basis.push((name, degree));
            }
            "d" => {
                if !matches!(block, Block::Module) {
                    return Err(c_err_at(line, 1, "'d' outside a module block"));
                }
                let target = c.ident("a basis name")?;
                c.sym('=')?;
                let e = c.expr()?;
                c.finish()?;
                let m = modules.last_mut().expect("module block");
                let Some(pos) = m.basis.iter().position(|(b, _)| b == &target) else {
                    return Err(c_err_at(line, 3, &format!("unknown basis element '{target}'")));
                };
                if m.diffs.iter().any(|(t, _)| t == &target) {
                    return Err(c_err_at(line, 3, &format!("differential of '{target}' given twice")));
                }
                let mut known: Vec<&str> = m.basis[..pos].iter().map(|(b, _)| b.as_str()).collect();
                let over_idx = algebras.iter().position(|a| a.name == m.over).expect("checked");
                known.extend(algebras[..=over_idx].iter().flat_map(|a| a.gens.iter().map(|g| g.name.as_str())));
                check_names(&e, &known, line, raw, "basis element or generator")?;
                m.diffs.push((target, e));
            }
            "derivation" => {
                let name = c.ident("a derivation name")?;
                c.keyword("deg")?;
                let degree = c.int("a degree")?;
                c.finish()?;
                if algebras.is_empty() {
                    return Err(c_err_at(line, 1, "derivation declared before any algebra"));
                }
                derivations.push(DerivationDecl {
                    name,
                    degree,
                    images: Vec::new(),
                });
                block = Block::Derivation;
            }
            "image" => {
                if !matches!(block, Block::Derivation) {
                    return Err(c_err_at(line, 1, "'image' outside a derivation block"));
                }
                let g = c.ident("a generator name")?;
                c.sym('=')?;
                let e = c.expr()?;
                c.finish()?;
                let ext = algebras.last().expect("algebra");
                if !ext.gens.iter().any(|x| x.name == g) {
                    return Err(c_err_at(line, 7, &format!("'{g}' is not an extension generator")));
                }
                let known: Vec<&str> = algebras.iter().flat_map(|a| a.gens.iter().map(|g| g.name.as_str())).collect();
                check_names(&e, &known, line, raw, "generator")?;
                let d = derivations.last_mut().expect("derivation block");
                if d.images.iter().any(|(x, _)| x == &g) {
                    return Err(c_err_at(line, 7, &format!("image of '{g}' given twice")));
                }
                d.images.push((g, e));
            }
            other => {
                return Err(c_err_at(line, 1, &format!("unknown keyword '{other}'")));
            }
        }
    }
    let Some(field) = field else {
        return Err(c_err_at(last_line.max(1), 1, "missing 'field' declaration"));
    };
    if algebras.is_empty() {
        return Err(c_err_at(last_line.max(1), 1, "missing 'algebra' declaration"));
    }
    Ok(Document {
        field,
        algebras,
        modules,
        derivations,
    })
}

fn c_err_at(line: usize, column: usize, message: &str) -> ParseError {
    ParseError {
        line,
        column,
        message: message.to_string(),
    }
}

/// Every variable must already be declared; a name declared later (or the
/// element being defined) is a forward reference.
fn check_names(e: &Expr, known: &[&str], line: usize, raw: &str, what: &str) -> Result<(), ParseError> {
    for v in e.variables() {
        if !known.contains(&v) {
            let column = find_word(raw, v).unwrap_or(1);
            return Err(ParseError {
                line,
                column,
                message: format!("'{v}' is not a previously declared {what} (forward or self reference)"),
            });
        }
    }
    Ok(())
}

/// Column of the last whole-word occurrence of `w` (the right-hand side
/// comes after the defined name).
fn find_word(raw: &str, w: &str) -> Option<usize> {
    let chars: Vec<char> = raw.chars().collect();
    let wc: Vec<char> = w.chars().collect();
    let is_word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    (0..chars.len().saturating_sub(wc.len() - 1)).rev().find_map(|i| {
        let hit = chars[i..i + wc.len()] == wc[..]
            && (i == 0 || !is_word(chars[i - 1]))
            && chars.get(i + wc.len()).is_none_or(|&c| !is_word(c));
        hit.then_some(i + 1)
    })
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
