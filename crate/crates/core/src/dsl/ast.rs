use std::collections::BTreeSet;
use std::fmt;

use crate::bigfib::Integer;
use crate::golden::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(Integer),
    Rat(Rat),
    Param(String),
    Sqrt5,
    Alpha,
    Beta,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer exponent only.
    Pow(Box<Expr>, Box<Expr>),
    /// `(-1)^e`, defined for every integer `e`.
    SignPow(Box<Expr>),
    Fib(Box<Expr>),
    Lucas(Box<Expr>),
    Binom(Box<Expr>, Box<Expr>),
    Sum {
        var: String,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
    FloorDiv(Box<Expr>, Box<Expr>),
    CeilDiv(Box<Expr>, Box<Expr>),
    /// `Re((x + iy)^m)`
    RePow(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `Im((x + iy)^m)`
    ImPow(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(v.into())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    /// Free variables, i.e. parameters not bound by an enclosing `sum`.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) | Expr::Rat(_) | Expr::Sqrt5 | Expr::Alpha | Expr::Beta => {}
            Expr::Param(name) => {
                if !bound.iter().any(|b| b == name) {
                    out.insert(name.clone());
                }
            }
            Expr::Neg(e) | Expr::SignPow(e) | Expr::Fib(e) | Expr::Lucas(e) => e.collect_free(bound, out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Binom(a, b)
            | Expr::FloorDiv(a, b)
            | Expr::CeilDiv(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::RePow(a, b, c) | Expr::ImPow(a, b, c) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Expr::Sum { var, lo, hi, body } => {
                lo.collect_free(bound, out);
                hi.collect_free(bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when the expression mentions `sqrt5`, `alpha`, `beta`, `re` or
    /// `im`; otherwise its value is always rational.
    pub fn has_irrational_atoms(&self) -> bool {
        match self {
            Expr::Sqrt5 | Expr::Alpha | Expr::Beta | Expr::RePow(..) | Expr::ImPow(..) => true,
            Expr::Int(_) | Expr::Rat(_) | Expr::Param(_) => false,
            Expr::Neg(e) | Expr::SignPow(e) | Expr::Fib(e) | Expr::Lucas(e) => e.has_irrational_atoms(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Binom(a, b)
            | Expr::FloorDiv(a, b)
            | Expr::CeilDiv(a, b) => a.has_irrational_atoms() || b.has_irrational_atoms(),
            Expr::Sum { lo, hi, body, .. } => {
                lo.has_irrational_atoms() || hi.has_irrational_atoms() || body.has_irrational_atoms()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardAtom {
    Even(Expr),
    Odd(Expr),
    Eq(Expr, Expr),
    Le(Expr, Expr),
}

/// A conjunction of atoms. The empty conjunction is the `else` case.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard(pub Vec<GuardAtom>);

impl Guard {
    pub fn always() -> Guard {
        Guard(Vec::new())
    }

    pub fn is_default(&self) -> bool {
        self.0.is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for atom in &self.0 {
            match atom {
                GuardAtom::Even(e) | GuardAtom::Odd(e) => out.extend(e.free_vars()),
                GuardAtom::Eq(a, b) | GuardAtom::Le(a, b) => {
                    out.extend(a.free_vars());
                    out.extend(b.free_vars());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Any,
    AtLeast(i64),
    Range(i64, i64),
}

impl Domain {
    pub fn contains(&self, v: i64) -> bool {
        match *self {
            Domain::Any => true,
            Domain::AtLeast(lo) => v >= lo,
            Domain::Range(lo, hi) => lo <= v && v <= hi,
        }
    }

    /// Intersection with the inclusive range `[lo, hi]`, if non-empty.
    pub fn clip(&self, lo: i64, hi: i64) -> Option<(i64, i64)> {
        let (lo, hi) = match *self {
            Domain::Any => (lo, hi),
            Domain::AtLeast(min) => (lo.max(min), hi),
            Domain::Range(min, max) => (lo.max(min), hi.min(max)),
        };
        (lo <= hi).then_some((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub guard: Guard,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentitySpec {
    pub id: String,
    pub params: Vec<Param>,
    pub require: Vec<Guard>,
    pub lhs: Expr,
    /// A single default case is an unconditional right-hand side.
    pub rhs: Vec<Case>,
}

impl IdentitySpec {
    pub fn is_piecewise(&self) -> bool {
        !(self.rhs.len() == 1 && self.rhs[0].guard.is_default())
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Integer values for the parameters of one identity, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Binding(Vec<(String, i64)>);

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn set(&mut self, name: &str, value: i64) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.set(name, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `n=2,s=0`.
    pub fn parse(text: &str) -> Result<Binding, String> {
        let mut out = Binding::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got `{part}`"))?;
            let value: i64 = value
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not an integer", value.trim()))?;
            out.set(name.trim(), value);
        }
        Ok(out)
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}
