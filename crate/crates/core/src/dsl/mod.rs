//! The identity description language: lexer, parser, printer, evaluator.

pub mod ast;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod print;

use thiserror::Error;

use crate::golden::{FieldError, GoldenNum};

pub use ast::{Binding, Case, Domain, Expr, Guard, GuardAtom, IdentitySpec, Param};
pub use eval::{eval_expr, eval_side, Evaluator, Side, Value};
pub use parser::{parse_expr, parse_file, parse_identity, ParsedBlock};
pub use print::{expr_to_string, guard_to_string, print_identity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: unexpected {found}, expected {}", .expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("identity `{id}`: unbound variable `{name}`")]
    Unbound { id: String, name: String },
    #[error("identity `{id}`: parameter `{name}` declared twice")]
    DuplicateParam { id: String, name: String },
    #[error("identity `{id}`: `{name}` is a reserved word")]
    Reserved { id: String, name: String },
    #[error("identity `{id}`: parameter `{name}` has an empty range")]
    EmptyDomain { id: String, name: String },
    #[error("identity `{id}`: right-hand cases are not exhaustive (add an `else` case or cover both parities)")]
    NonExhaustive { id: String },
}

impl DslError {
    pub fn syntax(line: usize, col: usize, found: String, expected: &[&str]) -> DslError {
        DslError::Syntax {
            line,
            col,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{position} `{expr}` evaluates to {value}, not an integer")]
    NonInteger {
        position: &'static str,
        expr: String,
        value: String,
    },
    #[error("in `{expr}`: {source}")]
    Field { expr: String, source: FieldError },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{expr}` has negative upper index {n}")]
    NegativeBinomial { expr: String, n: i64 },
    #[error("`{expr}` has negative power {m}")]
    NegativeGaussPower { expr: String, m: i64 },
    #[error("cannot order irrational values in `{expr}`")]
    IrrationalComparison { expr: String },
    #[error("no right-hand case applies")]
    NoActiveCase,
    #[error("right-hand cases {0:?} all apply")]
    AmbiguousCases(Vec<usize>),
}

/// Reads a constant such as `1/2 + 1/2*sqrt5` or `alpha^3`.
pub fn parse_golden(text: &str) -> Result<GoldenNum, String> {
    let e = parse_expr(text).map_err(|e| e.to_string())?;
    eval_expr(&e, &Binding::new()).map_err(|e| e.to_string())
}
