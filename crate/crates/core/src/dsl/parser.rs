use std::collections::{BTreeMap, BTreeSet};

use crate::bigfib::Integer;
use crate::golden::Rat;

use super::ast::{Case, Domain, Expr, Guard, GuardAtom, IdentitySpec, Param};
use super::lexer::{tokenize, Tok, Token};
use super::DslError;

/// Words that cannot name a parameter or summation variable.
pub const RESERVED: &[&str] = &[
    "identity", "params", "require", "lhs", "rhs", "cases", "in", "int", "else", "even", "odd", "sqrt5", "alpha",
    "beta", "sum", "fdiv", "cdiv", "re", "im", "F", "L", "C",
];

/// One `identity` block of a file together with the `# key: value` comment
/// lines directly above it.
#[derive(Debug, Clone)]
pub struct ParsedBlock {
    pub spec: IdentitySpec,
    pub pragmas: Vec<(String, String)>,
    pub line: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn skip_comments(&mut self) {
        while matches!(self.toks[self.pos].tok, Tok::Comment(_)) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> &Tok {
        self.skip_comments();
        &self.toks[self.pos].tok
    }

    fn peek_at(&mut self, ahead: usize) -> &Tok {
        self.skip_comments();
        let mut idx = self.pos;
        let mut left = ahead;
        while left > 0 && idx + 1 < self.toks.len() {
            idx += 1;
            if !matches!(self.toks[idx].tok, Tok::Comment(_)) {
                left -= 1;
            }
        }
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Token {
        self.skip_comments();
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, expected: &[&str]) -> DslError {
        self.skip_comments();
        let t = &self.toks[self.pos];
        DslError::syntax(t.line, t.col, t.tok.to_string(), expected)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    fn is_word(&mut self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.is_word(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(v) => {
                let v = i64::try_from(v).map_err(|_| self.error(&["a 64-bit integer"]))?;
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn identity(&mut self) -> PResult<IdentitySpec> {
        self.expect_word("identity")?;
        let id = match self.peek().clone() {
            Tok::Name(n) => {
                self.bump();
                n
            }
            _ => return Err(self.error(&["identity name"])),
        };
        self.expect(Tok::LBrace)?;

        let mut params = Vec::new();
        if self.is_word("params") {
            self.bump();
            loop {
                params.push(self.param()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
        }

        let mut require = Vec::new();
        while self.is_word("require") {
            self.bump();
            require.push(self.guard()?);
            self.expect(Tok::Semi)?;
        }

        self.expect_word("lhs")?;
        self.expect(Tok::Assign)?;
        let lhs = self.expr()?;
        self.expect(Tok::Semi)?;

        self.expect_word("rhs")?;
        self.expect(Tok::Assign)?;
        let rhs = if self.is_word("cases") && self.peek_at(1) == &Tok::LBrace {
            self.bump();
            self.bump();
            let mut cases = Vec::new();
            loop {
                let guard = self.guard()?;
                self.expect(Tok::Arrow)?;
                let expr = self.expr()?;
                cases.push(Case { guard, expr });
                let more = self.eat(&Tok::Semi);
                if self.eat(&Tok::RBrace) {
                    break;
                }
                if !more {
                    return Err(self.error(&["`;`", "`}`"]));
                }
            }
            cases
        } else {
            vec![Case {
                guard: Guard::always(),
                expr: self.expr()?,
            }]
        };
        self.eat(&Tok::Semi);
        self.expect(Tok::RBrace)?;

        let spec = IdentitySpec {
            id,
            params,
            require,
            lhs,
            rhs,
        };
        check_semantics(&spec)?;
        Ok(spec)
    }

    fn param(&mut self) -> PResult<Param> {
        let name = self.ident()?;
        self.expect_word("in")?;
        let domain = if self.is_word("int") {
            self.bump();
            Domain::Any
        } else {
            let lo = self.signed_int()?;
            if self.eat(&Tok::Ellipsis) {
                Domain::AtLeast(lo)
            } else if self.eat(&Tok::DotDot) {
                Domain::Range(lo, self.signed_int()?)
            } else {
                return Err(self.error(&["`...`", "`..`"]));
            }
        };
        Ok(Param { name, domain })
    }

    fn guard(&mut self) -> PResult<Guard> {
        if self.is_word("else") {
            self.bump();
            return Ok(Guard::always());
        }
        let mut atoms = vec![self.guard_atom()?];
        while self.eat(&Tok::AndAnd) {
            atoms.push(self.guard_atom()?);
        }
        Ok(Guard(atoms))
    }

    fn guard_atom(&mut self) -> PResult<GuardAtom> {
        for (word, even) in [("even", true), ("odd", false)] {
            if self.is_word(word) && self.peek_at(1) == &Tok::LParen {
                self.bump();
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(if even { GuardAtom::Even(e) } else { GuardAtom::Odd(e) });
            }
        }
        let left = self.expr()?;
        if self.eat(&Tok::Le) {
            Ok(GuardAtom::Le(left, self.expr()?))
        } else if self.eat(&Tok::EqEq) {
            Ok(GuardAtom::Eq(left, self.expr()?))
        } else {
            Err(self.error(&["`<=`", "`==`"]))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                left = Expr::Add(Box::new(left), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                left = Expr::Sub(Box::new(left), Box::new(self.term()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut left = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                left = Expr::Mul(Box::new(left), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                left = Expr::Div(Box::new(left), Box::new(self.unary()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.unary_in(false)
    }

    /// `exponent` is set for the operand of `^`, where an integer literal
    /// never starts a rational literal: `a^3/2` is `(a^3)/2`.
    fn unary_in(&mut self, exponent: bool) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary_in(exponent)?)));
        }
        self.power(exponent)
    }

    fn power(&mut self, exponent: bool) -> PResult<Expr> {
        // (-1)^e
        if self.peek() == &Tok::LParen
            && self.peek_at(1) == &Tok::Minus
            && matches!(self.peek_at(2), Tok::Int(v) if *v == Integer::from(1))
            && self.peek_at(3) == &Tok::RParen
            && self.peek_at(4) == &Tok::Caret
        {
            for _ in 0..5 {
                self.bump();
            }
            return Ok(Expr::SignPow(Box::new(self.unary_in(true)?)));
        }
        let base = self.atom(!exponent)?;
        if self.eat(&Tok::Caret) {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary_in(true)?)));
        }
        Ok(base)
    }

    fn args<const N: usize>(&mut self) -> PResult<[Expr; N]> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::with_capacity(N);
        for i in 0..N {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out.try_into().expect("N arguments"))
    }

    fn atom(&mut self, allow_rational: bool) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                // INT/INT is a rational literal unless a power follows it.
                if allow_rational && self.peek() == &Tok::Slash && self.peek_at(2) != &Tok::Caret {
                    if let Tok::Int(d) = self.peek_at(1).clone() {
                        if d == Integer::from(0) {
                            return Err(self.error(&["non-zero denominator"]));
                        }
                        self.bump();
                        self.bump();
                        return Ok(Expr::Rat(Rat::new(v, d)));
                    }
                }
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(word) => {
                let call = self.peek_at(1) == &Tok::LParen;
                match word.as_str() {
                    "sqrt5" => {
                        self.bump();
                        Ok(Expr::Sqrt5)
                    }
                    "alpha" => {
                        self.bump();
                        Ok(Expr::Alpha)
                    }
                    "beta" => {
                        self.bump();
                        Ok(Expr::Beta)
                    }
                    "F" | "L" | "C" | "fdiv" | "cdiv" | "re" | "im" | "sum" if call => {
                        self.bump();
                        self.call(&word)
                    }
                    w if RESERVED.contains(&w) => Err(self.error(&["expression"])),
                    _ => {
                        self.bump();
                        Ok(Expr::Param(word))
                    }
                }
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn call(&mut self, word: &str) -> PResult<Expr> {
        let b = Box::new;
        Ok(match word {
            "F" => {
                let [e] = self.args()?;
                Expr::Fib(b(e))
            }
            "L" => {
                let [e] = self.args()?;
                Expr::Lucas(b(e))
            }
            "C" => {
                let [n, k] = self.args()?;
                Expr::Binom(b(n), b(k))
            }
            "fdiv" => {
                let [x, y] = self.args()?;
                Expr::FloorDiv(b(x), b(y))
            }
            "cdiv" => {
                let [x, y] = self.args()?;
                Expr::CeilDiv(b(x), b(y))
            }
            "re" => {
                let [x, y, m] = self.args()?;
                Expr::RePow(b(x), b(y), b(m))
            }
            "im" => {
                let [x, y, m] = self.args()?;
                Expr::ImPow(b(x), b(y), b(m))
            }
            "sum" => {
                self.expect(Tok::LParen)?;
                let var = self.ident()?;
                if RESERVED.contains(&var.as_str()) {
                    return Err(DslError::Reserved {
                        id: String::new(),
                        name: var,
                    });
                }
                self.expect(Tok::Assign)?;
                let lo = self.expr()?;
                self.expect(Tok::DotDot)?;
                let hi = self.expr()?;
                self.expect(Tok::Semi)?;
                let body = self.expr()?;
                self.expect(Tok::RParen)?;
                Expr::Sum {
                    var,
                    lo: b(lo),
                    hi: b(hi),
                    body: b(body),
                }
            }
            _ => unreachable!("dispatch covers every call word"),
        })
    }
}

fn check_semantics(spec: &IdentitySpec) -> PResult<()> {
    let mut seen = BTreeSet::new();
    for p in &spec.params {
        if RESERVED.contains(&p.name.as_str()) {
            return Err(DslError::Reserved {
                id: spec.id.clone(),
                name: p.name.clone(),
            });
        }
        if !seen.insert(p.name.clone()) {
            return Err(DslError::DuplicateParam {
                id: spec.id.clone(),
                name: p.name.clone(),
            });
        }
        if let Domain::Range(lo, hi) = p.domain {
            if lo > hi {
                return Err(DslError::EmptyDomain {
                    id: spec.id.clone(),
                    name: p.name.clone(),
                });
            }
        }
    }

    let mut used = spec.lhs.free_vars();
    for g in &spec.require {
        used.extend(g.free_vars());
    }
    for case in &spec.rhs {
        used.extend(case.guard.free_vars());
        used.extend(case.expr.free_vars());
    }
    if let Some(name) = used.iter().find(|v| !seen.contains(*v)) {
        return Err(DslError::Unbound {
            id: spec.id.clone(),
            name: name.clone(),
        });
    }

    if !cases_exhaustive(spec) {
        return Err(DslError::NonExhaustive { id: spec.id.clone() });
    }
    Ok(())
}

/// Syntactic exhaustiveness: either some case is `else`, or every parity
/// assignment to the expressions named in `even`/`odd` atoms (consistent
/// with the parity atoms of `require`) satisfies some case made only of
/// parity atoms. Expressions are compared structurally.
fn cases_exhaustive(spec: &IdentitySpec) -> bool {
    if spec.rhs.iter().any(|c| c.guard.is_default()) {
        return true;
    }
    let parity = |atom: &GuardAtom| match atom {
        GuardAtom::Even(e) => Some((super::print::expr_to_string(e), false)),
        GuardAtom::Odd(e) => Some((super::print::expr_to_string(e), true)),
        _ => None,
    };

    let mut keys = BTreeMap::new();
    let mut note = |atoms: &[GuardAtom]| {
        for a in atoms {
            if let Some((k, _)) = parity(a) {
                let next = keys.len();
                keys.entry(k).or_insert(next);
            }
        }
    };
    for g in &spec.require {
        note(&g.0);
    }
    for c in &spec.rhs {
        note(&c.guard.0);
    }
    if keys.len() > 12 {
        return false;
    }

    let consistent = |atoms: &[GuardAtom], assignment: u32| {
        atoms.iter().all(|a| match parity(a) {
            Some((k, odd)) => ((assignment >> keys[&k]) & 1 == 1) == odd,
            None => false,
        })
    };
    (0..1u32 << keys.len()).all(|assignment| {
        let admissible = spec.require.iter().all(|g| {
            g.0.iter()
                .all(|a| parity(a).is_none() || consistent(std::slice::from_ref(a), assignment))
        });
        !admissible || spec.rhs.iter().any(|c| consistent(&c.guard.0, assignment))
    })
}

pub fn parse_identity(text: &str) -> Result<IdentitySpec, DslError> {
    let mut p = Parser::new(text)?;
    let spec = p.identity()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(spec)
}

/// Parses a sequence of identity blocks, collecting `# key: value` comment
/// lines immediately preceding each block.
pub fn parse_file(text: &str) -> Result<Vec<ParsedBlock>, DslError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    loop {
        let mut pragmas = Vec::new();
        while let Tok::Comment(c) = &p.toks[p.pos].tok {
            if let Some((k, v)) = c.trim().split_once(':') {
                let key = k.trim();
                if !key.is_empty() && key.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-') {
                    pragmas.push((key.to_string(), v.trim().to_string()));
                }
            }
            p.pos += 1;
        }
        if p.toks[p.pos].tok == Tok::Eof {
            return Ok(out);
        }
        let line = p.toks[p.pos].line;
        let spec = p.identity()?;
        out.push(ParsedBlock { spec, pragmas, line });
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, DslError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T2F: &str = "identity T2F { params n in 0..., s in int; \
        lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s)); \
        rhs = F(2*n+s) - (-1)^(s)*F(n-s) }";

    #[test]
    fn parses_t2f() {
        let spec = parse_identity(T2F).unwrap();
        assert_eq!(spec.id, "T2F");
        assert_eq!(spec.params.len(), 2);
        assert_eq!(spec.params[0].domain, Domain::AtLeast(0));
        assert_eq!(spec.params[1].domain, Domain::Any);
        assert_eq!(spec.rhs.len(), 1);
        assert!(!spec.is_piecewise());
    }

    #[test]
    fn unclosed_argument() {
        let err = parse_identity("identity bad { lhs = F( }").unwrap_err();
        match err {
            DslError::Syntax {
                line, col, expected, ..
            } => {
                assert_eq!((line, col), (1, 25));
                assert!(expected.iter().any(|e| e == "expression"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-2^n*3 + 1").unwrap();
        let expect = Expr::Add(
            Box::new(Expr::Mul(
                Box::new(Expr::Neg(Box::new(Expr::Pow(
                    Box::new(Expr::int(2)),
                    Box::new(Expr::param("n")),
                )))),
                Box::new(Expr::int(3)),
            )),
            Box::new(Expr::int(1)),
        );
        assert_eq!(e, expect);
        assert_eq!(
            parse_expr("a^3/2").unwrap(),
            Expr::Div(
                Box::new(Expr::Pow(Box::new(Expr::param("a")), Box::new(Expr::int(3)))),
                Box::new(Expr::int(2))
            )
        );
        // right-associative power
        assert_eq!(parse_expr("2^3^n").unwrap(), parse_expr("2^(3^n)").unwrap());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_expr("3/2").unwrap(), Expr::Rat(Rat::new(3.into(), 2.into())));
        // a power after the denominator binds to the denominator
        assert_eq!(
            parse_expr("1/5^k").unwrap(),
            Expr::Div(
                Box::new(Expr::int(1)),
                Box::new(Expr::Pow(Box::new(Expr::int(5)), Box::new(Expr::param("k"))))
            )
        );
        assert!(parse_expr("1/0").is_err());
    }

    #[test]
    fn sign_power() {
        assert_eq!(
            parse_expr("(-1)^(k+s)").unwrap(),
            Expr::SignPow(Box::new(parse_expr("k+s").unwrap()))
        );
        assert_eq!(parse_expr("(-1)").unwrap(), Expr::Neg(Box::new(Expr::int(1))));
    }

    #[test]
    fn unbound_variable() {
        let err = parse_identity("identity x { params n in int; lhs = F(m); rhs = 0 }").unwrap_err();
        assert!(matches!(err, DslError::Unbound { name, .. } if name == "m"));
        // summation variables are bound inside the body only
        let err = parse_identity("identity x { params n in int; lhs = sum(k=0..n; k) + k; rhs = 0 }").unwrap_err();
        assert!(matches!(err, DslError::Unbound { name, .. } if name == "k"));
    }

    #[test]
    fn exhaustiveness() {
        let ok = "identity x { params n in int, j in int; lhs = 0; rhs = cases { \
            odd(j) -> 0; even(j) && even(n) -> 0; even(j) && odd(n) -> 0 } }";
        assert!(parse_identity(ok).is_ok());
        let missing = "identity x { params n in int; lhs = 0; rhs = cases { even(n) -> 0; } }";
        assert!(matches!(parse_identity(missing), Err(DslError::NonExhaustive { .. })));
        let with_require = "identity x { params n in int; require odd(n); lhs = 0; \
            rhs = cases { odd(n) -> 0; } }";
        assert!(parse_identity(with_require).is_ok());
        let with_default = "identity x { params n in int; lhs = 0; \
            rhs = cases { n <= 3 -> 0; else -> 1 } }";
        assert!(parse_identity(with_default).is_ok());
        let comparison_only = "identity x { params n in int; lhs = 0; \
            rhs = cases { n <= 3 -> 0; 4 <= n -> 1 } }";
        assert!(parse_identity(comparison_only).is_err());
    }

    #[test]
    fn duplicate_and_reserved_params() {
        assert!(matches!(
            parse_identity("identity x { params n in int, n in int; lhs = 0; rhs = 0 }"),
            Err(DslError::DuplicateParam { .. })
        ));
        assert!(parse_identity("identity x { params F in int; lhs = 0; rhs = 0 }").is_err());
    }

    #[test]
    fn file_pragmas() {
        let src = "# group: G-P1\n# source: somewhere\nidentity a { lhs = 1; rhs = 1 }\n\
                   # status: suspect\nidentity b { lhs = 1; rhs = 1 }\n";
        let blocks = parse_file(src).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].pragmas.len(), 2);
        assert_eq!(blocks[0].line, 3);
        assert_eq!(blocks[1].pragmas, vec![("status".into(), "suspect".into())]);
    }
}
