//! Canonical text for identities. `parse_identity(print_identity(s)) == s`
//! for every parsed `s`.

use std::fmt::Write;

use num_traits::Signed;

use super::ast::{Domain, Expr, Guard, GuardAtom, IdentitySpec};

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) | Expr::SignPow(_) => POW,
        Expr::Int(v) if v.is_negative() => UNARY,
        Expr::Rat(r) if r.is_negative() => UNARY,
        _ => ATOM,
    }
}

fn child(out: &mut String, e: &Expr, min: u8) {
    if prec(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn call(out: &mut String, name: &str, args: &[&Expr]) {
    out.push_str(name);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

pub fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(v) if v.is_negative() => write!(out, "({v})").unwrap(),
        Expr::Int(v) => write!(out, "{v}").unwrap(),
        Expr::Rat(r) if r.is_negative() => write!(out, "({r})").unwrap(),
        Expr::Rat(r) => write!(out, "{r}").unwrap(),
        Expr::Param(n) => out.push_str(n),
        Expr::Sqrt5 => out.push_str("sqrt5"),
        Expr::Alpha => out.push_str("alpha"),
        Expr::Beta => out.push_str("beta"),
        Expr::Neg(x) => {
            out.push('-');
            child(out, x, POW);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            child(out, a, ADD);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            child(out, b, MUL);
        }
        Expr::Mul(a, b) => {
            child(out, a, MUL);
            out.push('*');
            child(out, b, UNARY);
        }
        Expr::Div(a, b) => {
            child(out, a, MUL);
            out.push('/');
            // `3/2` would re-parse as a rational literal
            let mut rhs = String::new();
            child(&mut rhs, b, UNARY);
            if rhs.starts_with(|c: char| c.is_ascii_digit()) {
                write!(out, "({rhs})").unwrap();
            } else {
                out.push_str(&rhs);
            }
        }
        Expr::Pow(a, b) => {
            if matches!(**a, Expr::Rat(_)) {
                // `4/5^n` would re-parse as `4/(5^n)`
                out.push('(');
                write_expr(out, a);
                out.push(')');
            } else {
                child(out, a, ATOM);
            }
            out.push('^');
            let mut core = &**b;
            while let Expr::Neg(x) = core {
                core = x;
            }
            if matches!(core, Expr::Rat(_)) {
                out.push('(');
                write_expr(out, b);
                out.push(')');
            } else {
                child(out, b, UNARY);
            }
        }
        Expr::SignPow(x) => {
            out.push_str("(-1)^(");
            write_expr(out, x);
            out.push(')');
        }
        Expr::Fib(x) => call(out, "F", &[x]),
        Expr::Lucas(x) => call(out, "L", &[x]),
        Expr::Binom(n, k) => call(out, "C", &[n, k]),
        Expr::FloorDiv(a, b) => call(out, "fdiv", &[a, b]),
        Expr::CeilDiv(a, b) => call(out, "cdiv", &[a, b]),
        Expr::RePow(x, y, m) => call(out, "re", &[x, y, m]),
        Expr::ImPow(x, y, m) => call(out, "im", &[x, y, m]),
        Expr::Sum { var, lo, hi, body } => {
            write!(out, "sum({var}=").unwrap();
            write_expr(out, lo);
            out.push_str("..");
            write_expr(out, hi);
            out.push_str("; ");
            write_expr(out, body);
            out.push(')');
        }
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

pub fn guard_to_string(g: &Guard) -> String {
    if g.is_default() {
        return "else".to_string();
    }
    let atoms: Vec<String> =
        g.0.iter()
            .map(|a| match a {
                GuardAtom::Even(e) => format!("even({})", expr_to_string(e)),
                GuardAtom::Odd(e) => format!("odd({})", expr_to_string(e)),
                GuardAtom::Le(a, b) => format!("{} <= {}", expr_to_string(a), expr_to_string(b)),
                GuardAtom::Eq(a, b) => format!("{} == {}", expr_to_string(a), expr_to_string(b)),
            })
            .collect();
    atoms.join(" && ")
}

fn domain_to_string(d: &Domain) -> String {
    match d {
        Domain::Any => "int".to_string(),
        Domain::AtLeast(lo) => format!("{lo}..."),
        Domain::Range(lo, hi) => format!("{lo}..{hi}"),
    }
}

pub fn print_identity(spec: &IdentitySpec) -> String {
    let mut out = format!("identity {} {{\n", spec.id);
    if !spec.params.is_empty() {
        let params: Vec<String> = spec
            .params
            .iter()
            .map(|p| format!("{} in {}", p.name, domain_to_string(&p.domain)))
            .collect();
        writeln!(out, "  params {};", params.join(", ")).unwrap();
    }
    for g in &spec.require {
        writeln!(out, "  require {};", guard_to_string(g)).unwrap();
    }
    writeln!(out, "  lhs = {};", expr_to_string(&spec.lhs)).unwrap();
    if spec.is_piecewise() {
        let cases: Vec<String> = spec
            .rhs
            .iter()
            .map(|c| format!("{} -> {}", guard_to_string(&c.guard), expr_to_string(&c.expr)))
            .collect();
        writeln!(out, "  rhs = cases {{ {} }}", cases.join("; ")).unwrap();
    } else {
        writeln!(out, "  rhs = {}", expr_to_string(&spec.rhs[0].expr)).unwrap();
    }
    out.push_str("}\n");
    out
}
