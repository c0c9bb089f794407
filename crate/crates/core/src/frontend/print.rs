use std::fmt::Write as _;

use num_traits::{One, Signed};

use super::ast::{Document, Expr, FieldSpec};

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(n, _) if n.is_negative() => 0,
        Expr::Num(..) | Expr::Var(_) => 5,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let wrap = precedence(e) < min;
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Num(n, d) => {
            if d.is_one() {
                let _ = write!(out, "{n}");
            } else {
                let _ = write!(out, "{n}/{d}");
            }
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Neg(a) => {
            out.push('-');
            write_expr(out, a, 3);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(out, a, 1);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_expr(out, b, 2);
        }
        Expr::Mul(a, b) => {
            write_expr(out, a, 2);
            out.push('*');
            write_expr(out, b, 3);
        }
        Expr::Pow(a, k) => {
            write_expr(out, a, 5);
            let _ = write!(out, "^{k}");
        }
    }
    if wrap {
        out.push(')');
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 1);
    s
}

/// Canonical text of a document; parsing it gives back the same document.
pub fn print_instance(doc: &Document) -> String {
    let mut s = String::new();
    match doc.field {
        FieldSpec::Q => s.push_str("field Q\n"),
        FieldSpec::Fp(p) => {
            let _ = writeln!(s, "field Fp {p}");
        }
    }
    for a in &doc.algebras {
        match &a.extends {
            Some(base) => {
                let _ = writeln!(s, "algebra {} extends {base}", a.name);
            }
            None => {
                let _ = writeln!(s, "algebra {}", a.name);
            }
        }
        for g in &a.gens {
            let _ = writeln!(s, "  gen {} deg {} d {}", g.name, g.degree, print_expr(&g.d));
        }
    }
    for m in &doc.modules {
        let _ = writeln!(s, "\nmodule {} over {}", m.name, m.over);
        for (b, d) in &m.basis {
            let _ = writeln!(s, "  basis {b} deg {d}");
        }
        for (b, e) in &m.diffs {
            let _ = writeln!(s, "  d {b} = {}", print_expr(e));
        }
    }
    for d in &doc.derivations {
        let _ = writeln!(s, "\nderivation {} deg {}", d.name, d.degree);
        for (g, e) in &d.images {
            let _ = writeln!(s, "  image {g} = {}", print_expr(e));
        }
    }
    s
}
