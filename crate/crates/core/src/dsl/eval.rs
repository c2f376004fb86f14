//! Exact evaluation of identity expressions over Q(sqrt5).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};

use crate::bigfib::{self, BinomialCursor, Integer, SequenceCursor};
use crate::gauss::re_im_pow;
use crate::golden::{alpha_pow, beta_pow, FieldError, GoldenNum, Rat};

use super::ast::{Binding, Expr, GuardAtom, IdentitySpec};
use super::print::expr_to_string;
use super::EvalError;

/// Intermediate value. Integers stay in machine words while they fit and
/// only become field elements when an irrational atom or an inexact
/// division forces it; the represented number is the same either way.
#[derive(Debug, Clone)]
pub enum Value {
    Small(i128),
    Big(BigInt),
    Field(GoldenNum),
}

impl Value {
    pub fn to_golden(&self) -> GoldenNum {
        match self {
            Value::Small(v) => GoldenNum::from_integer(BigInt::from(*v)),
            Value::Big(v) => GoldenNum::from_integer(v.clone()),
            Value::Field(g) => g.clone(),
        }
    }

    pub fn into_golden(self) -> GoldenNum {
        match self {
            Value::Field(g) => g,
            other => other.to_golden(),
        }
    }

    fn to_bigint(&self) -> Option<BigInt> {
        match self {
            Value::Small(v) => Some(BigInt::from(*v)),
            Value::Big(v) => Some(v.clone()),
            Value::Field(g) => g.to_integer(),
        }
    }

    fn to_i64(&self) -> Option<i64> {
        match self {
            Value::Small(v) => i64::try_from(*v).ok(),
            Value::Big(v) => v.to_i64(),
            Value::Field(g) => g.to_integer().and_then(|v| v.to_i64()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Value::Small(v) => *v == 0,
            Value::Big(v) => v.is_zero(),
            Value::Field(g) => g.is_zero(),
        }
    }

    /// A field element, demoted to an integer variant when it is one.
    fn field(g: GoldenNum) -> Value {
        match g.to_integer() {
            Some(v) => Value::big(v),
            None => Value::Field(g),
        }
    }

    fn big(v: BigInt) -> Value {
        match v.to_i128() {
            Some(s) => Value::Small(s),
            None => Value::Big(v),
        }
    }

    fn neg(self) -> Value {
        match self {
            Value::Small(v) => match v.checked_neg() {
                Some(n) => Value::Small(n),
                None => Value::Big(-BigInt::from(v)),
            },
            Value::Big(v) => Value::Big(-v),
            Value::Field(g) => Value::Field(-g),
        }
    }

    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Small(a), Value::Small(b)) => match a.checked_add(b) {
                Some(v) => Value::Small(v),
                None => Value::Big(BigInt::from(a) + b),
            },
            (Value::Big(a), Value::Small(b)) | (Value::Small(b), Value::Big(a)) => Value::Big(a + b),
            (Value::Big(a), Value::Big(b)) => Value::Big(a + b),
            (Value::Field(mut a), b) => {
                a += &b.into_golden();
                Value::field(a)
            }
            (a, Value::Field(mut b)) => {
                b += &a.into_golden();
                Value::field(b)
            }
        }
    }

    fn sub(self, rhs: Value) -> Value {
        self.add(rhs.neg())
    }

    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Small(a), Value::Small(b)) => match a.checked_mul(b) {
                Some(v) => Value::Small(v),
                None => Value::Big(BigInt::from(a) * b),
            },
            (Value::Big(a), Value::Small(b)) | (Value::Small(b), Value::Big(a)) => Value::Big(a * b),
            (Value::Big(a), Value::Big(b)) => Value::Big(a * b),
            (Value::Field(a), b) | (b, Value::Field(a)) => Value::field(&a * &b.into_golden()),
        }
    }

    fn div(self, rhs: Value) -> Result<Value, FieldError> {
        if rhs.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match (&self, &rhs) {
            (Value::Small(a), Value::Small(b)) if a % b == 0 => {
                return Ok(match a.checked_div(*b) {
                    Some(v) => Value::Small(v),
                    None => Value::Big(BigInt::from(*a) / b),
                })
            }
            (Value::Field(_), _) | (_, Value::Field(_)) => {}
            _ => {
                let (a, b) = (self.to_bigint().unwrap(), rhs.to_bigint().unwrap());
                let (q, r) = a.div_rem(&b);
                if r.is_zero() {
                    return Ok(Value::big(q));
                }
                return Ok(Value::Field(GoldenNum::from_rat(Rat::new(a, b))));
            }
        }
        Ok(Value::field(self.into_golden().checked_div(&rhs.into_golden())?))
    }

    fn pow(self, e: i64) -> Result<Value, FieldError> {
        match self {
            Value::Small(b) if e >= 0 => {
                if let Ok(e32) = u32::try_from(e) {
                    if let Some(v) = b.checked_pow(e32) {
                        return Ok(Value::Small(v));
                    }
                }
                Ok(Value::Big(num_traits::pow(BigInt::from(b), e as usize)))
            }
            Value::Big(b) if e >= 0 => Ok(Value::Big(num_traits::pow(b, e as usize))),
            other => Ok(Value::field(other.into_golden().pow(e)?)),
        }
    }

    /// Exact equality of the represented numbers.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Small(a), Value::Small(b)) => a == b,
            (Value::Field(a), Value::Field(b)) => a == b,
            (Value::Field(g), v) | (v, Value::Field(g)) => *g == v.to_golden(),
            _ => self.to_bigint() == other.to_bigint(),
        }
    }

    fn cmp_rational(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Small(a), Value::Small(b)) => Some(a.cmp(b)),
            _ => {
                let (a, b) = (self.to_golden(), other.to_golden());
                if !a.is_rational() || !b.is_rational() {
                    return None;
                }
                Some(a.rational_part().cmp(b.rational_part()))
            }
        }
    }
}

/// `F_j`, `L_j` for small `|j|` and `C(n, k)` for small `n`, all taken from
/// the big-integer routines once and then served as machine words.
struct Tables {
    fib: Vec<i128>,
    lucas: Vec<i128>,
    pascal: Vec<Vec<i128>>,
}

const SEQ_REACH: i64 = 180;
const PASCAL_ROWS: i64 = 120;

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let word = |v: Integer| v.to_i128().expect("table value fits in i128");
        let range = -SEQ_REACH..=SEQ_REACH;
        Tables {
            fib: range.clone().map(|j| word(bigfib::fib(j))).collect(),
            lucas: range.map(|j| word(bigfib::lucas(j))).collect(),
            pascal: (0..=PASCAL_ROWS)
                .map(|n| (0..=n).map(|k| word(bigfib::binom(n, k).unwrap())).collect())
                .collect(),
        }
    })
}

/// Reusable evaluator. Holds caches only; results never depend on what
/// was evaluated before.
#[derive(Debug, Default)]
pub struct Evaluator {
    binomials: BinomialCursor,
    gauss: HashMap<(GoldenNum, GoldenNum, u64), (GoldenNum, GoldenNum)>,
    // one cursor per sequence a summand walks, e.g. F(k+r) and F(k+s)
    sequences: [SequenceCursor; 4],
    next_cursor: usize,
}

/// Grid sweeps revisit the same few Gaussian powers; past this many the
/// memo is dropped rather than grown.
const GAUSS_MEMO_LIMIT: usize = 4096;

type Scope<'a> = Vec<(&'a str, i64)>;

impl Evaluator {
    pub fn new() -> Self {
        Evaluator::default()
    }

    pub fn eval(&mut self, e: &Expr, env: &Binding) -> Result<GoldenNum, EvalError> {
        self.eval_value(e, env).map(Value::into_golden)
    }

    pub fn eval_value(&mut self, e: &Expr, env: &Binding) -> Result<Value, EvalError> {
        let mut scope: Scope<'_> = env.iter().collect();
        self.value(e, &mut scope)
    }

    /// `(F_j, L_j)` for indices beyond the tables.
    fn sequence(&mut self, j: i64) -> (Integer, Integer) {
        let near = self
            .sequences
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.distance(j).map(|d| (d, i)))
            .min();
        let slot = match near {
            Some((d, i)) if d <= 64 => i,
            _ => {
                let i = self.next_cursor;
                self.next_cursor = (i + 1) % self.sequences.len();
                self.sequences[i] = SequenceCursor::new();
                i
            }
        };
        self.sequences[slot].get(j)
    }

    fn index<'a>(&mut self, e: &'a Expr, scope: &mut Scope<'a>, what: &'static str) -> Result<i64, EvalError> {
        let v = self.value(e, scope)?;
        v.to_i64().ok_or_else(|| EvalError::NonInteger {
            position: what,
            expr: expr_to_string(e),
            value: v.to_golden().to_string(),
        })
    }

    fn integer<'a>(&mut self, e: &'a Expr, scope: &mut Scope<'a>, what: &'static str) -> Result<BigInt, EvalError> {
        let v = self.value(e, scope)?;
        v.to_bigint().ok_or_else(|| EvalError::NonInteger {
            position: what,
            expr: expr_to_string(e),
            value: v.to_golden().to_string(),
        })
    }

    fn value<'a>(&mut self, e: &'a Expr, scope: &mut Scope<'a>) -> Result<Value, EvalError> {
        let field = |r: Result<Value, FieldError>, e: &Expr| {
            r.map_err(|err| EvalError::Field {
                expr: expr_to_string(e),
                source: err,
            })
        };
        Ok(match e {
            Expr::Int(v) => Value::big(v.clone()),
            Expr::Rat(r) => Value::Field(GoldenNum::from_rat(r.clone())),
            Expr::Param(name) => match scope.iter().rev().find(|(n, _)| *n == name.as_str()) {
                Some((_, v)) => Value::Small(*v as i128),
                None => return Err(EvalError::Unbound(name.clone())),
            },
            Expr::Sqrt5 => Value::Field(GoldenNum::sqrt5()),
            Expr::Alpha => Value::Field(GoldenNum::alpha()),
            Expr::Beta => Value::Field(GoldenNum::beta()),
            Expr::Neg(x) => self.value(x, scope)?.neg(),
            Expr::Add(a, b) => {
                let a = self.value(a, scope)?;
                a.add(self.value(b, scope)?)
            }
            Expr::Sub(a, b) => {
                let a = self.value(a, scope)?;
                a.sub(self.value(b, scope)?)
            }
            Expr::Mul(a, b) => {
                let a = self.value(a, scope)?;
                a.mul(self.value(b, scope)?)
            }
            Expr::Div(a, b) => {
                let a = self.value(a, scope)?;
                let b = self.value(b, scope)?;
                field(a.div(b), e)?
            }
            Expr::Pow(base, exp) => {
                let m = self.index(exp, scope, "exponent")?;
                match **base {
                    Expr::Alpha => Value::Field(alpha_pow(m)),
                    Expr::Beta => Value::Field(beta_pow(m)),
                    _ => {
                        let b = self.value(base, scope)?;
                        field(b.pow(m), e)?
                    }
                }
            }
            Expr::SignPow(x) => {
                let m = self.integer(x, scope, "exponent")?;
                Value::Small(if m.is_odd() { -1 } else { 1 })
            }
            Expr::Fib(x) => {
                let j = self.index(x, scope, "index")?;
                if j.abs() <= SEQ_REACH {
                    Value::Small(tables().fib[(j + SEQ_REACH) as usize])
                } else {
                    Value::Big(self.sequence(j).0)
                }
            }
            Expr::Lucas(x) => {
                let j = self.index(x, scope, "index")?;
                if j.abs() <= SEQ_REACH {
                    Value::Small(tables().lucas[(j + SEQ_REACH) as usize])
                } else {
                    Value::Big(self.sequence(j).1)
                }
            }
            Expr::Binom(n, k) => {
                let n_val = self.index(n, scope, "index")?;
                let k_val = self.index(k, scope, "index")?;
                if n_val < 0 {
                    return Err(EvalError::NegativeBinomial {
                        expr: expr_to_string(e),
                        n: n_val,
                    });
                }
                if k_val < 0 || k_val > n_val {
                    Value::Small(0)
                } else if n_val <= PASCAL_ROWS {
                    Value::Small(tables().pascal[n_val as usize][k_val as usize])
                } else {
                    let v = self
                        .binomials
                        .get(n_val, k_val)
                        .expect("upper index checked non-negative");
                    Value::Big(v)
                }
            }
            Expr::Sum { var, lo, hi, body } => {
                let lo = self.index(lo, scope, "bound")?;
                let hi = self.index(hi, scope, "bound")?;
                let mut acc = Value::Small(0);
                for k in lo..=hi {
                    scope.push((var.as_str(), k));
                    let term = self.value(body, scope);
                    scope.pop();
                    acc = acc.add(term?);
                }
                acc
            }
            Expr::FloorDiv(a, b) | Expr::CeilDiv(a, b) => {
                let x = self.integer(a, scope, "division argument")?;
                let y = self.integer(b, scope, "division argument")?;
                if y.is_zero() {
                    return Err(EvalError::Field {
                        expr: expr_to_string(e),
                        source: FieldError::DivisionByZero,
                    });
                }
                Value::big(if matches!(e, Expr::FloorDiv(..)) {
                    x.div_floor(&y)
                } else {
                    x.div_ceil(&y)
                })
            }
            Expr::RePow(x, y, m) | Expr::ImPow(x, y, m) => {
                let xv = self.value(x, scope)?.into_golden();
                let yv = self.value(y, scope)?.into_golden();
                let mv = self.index(m, scope, "exponent")?;
                if mv < 0 {
                    return Err(EvalError::NegativeGaussPower {
                        expr: expr_to_string(e),
                        m: mv,
                    });
                }
                if self.gauss.len() >= GAUSS_MEMO_LIMIT {
                    self.gauss.clear();
                }
                let (re, im) = self
                    .gauss
                    .entry((xv, yv, mv as u64))
                    .or_insert_with_key(|(x, y, m)| re_im_pow(x, y, *m));
                Value::field(if matches!(e, Expr::RePow(..)) {
                    re.clone()
                } else {
                    im.clone()
                })
            }
        })
    }

    pub fn holds(&mut self, atom: &GuardAtom, env: &Binding) -> Result<bool, EvalError> {
        let mut scope: Scope<'_> = env.iter().collect();
        match atom {
            GuardAtom::Even(x) | GuardAtom::Odd(x) => {
                let v = self.integer(x, &mut scope, "parity argument")?;
                Ok(v.is_even() == matches!(atom, GuardAtom::Even(_)))
            }
            GuardAtom::Eq(a, b) => {
                let av = self.value(a, &mut scope)?;
                let bv = self.value(b, &mut scope)?;
                Ok(av.same(&bv))
            }
            GuardAtom::Le(a, b) => {
                let av = self.value(a, &mut scope)?;
                let bv = self.value(b, &mut scope)?;
                match av.cmp_rational(&bv) {
                    Some(ord) => Ok(ord != Ordering::Greater),
                    None => Err(EvalError::IrrationalComparison {
                        expr: format!("{} <= {}", expr_to_string(a), expr_to_string(b)),
                    }),
                }
            }
        }
    }

    pub fn guard_holds(&mut self, guard: &super::ast::Guard, env: &Binding) -> Result<bool, EvalError> {
        for atom in &guard.0 {
            if !self.holds(atom, env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `env` lies in the declared parameter domains and satisfies
    /// every `require` clause of `spec`.
    pub fn admissible(&mut self, spec: &IdentitySpec, env: &Binding) -> Result<bool, EvalError> {
        if spec
            .params
            .iter()
            .any(|p| env.get(&p.name).is_some_and(|v| !p.domain.contains(v)))
        {
            return Ok(false);
        }
        for g in &spec.require {
            if !self.guard_holds(g, env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Index of the unique right-hand case whose guard holds. `else` cases
    /// apply only when no other guard does.
    pub fn active_case(&mut self, spec: &IdentitySpec, env: &Binding) -> Result<usize, EvalError> {
        let mut hits = Vec::new();
        let mut fallback = None;
        for (i, case) in spec.rhs.iter().enumerate() {
            if case.guard.is_default() {
                fallback.get_or_insert(i);
            } else if self.guard_holds(&case.guard, env)? {
                hits.push(i);
            }
        }
        match (hits.as_slice(), fallback) {
            ([only], _) => Ok(*only),
            ([], Some(i)) => Ok(i),
            ([], None) => Err(EvalError::NoActiveCase),
            _ => Err(EvalError::AmbiguousCases(hits)),
        }
    }
}

/// Evaluates `e` under `env` with a fresh evaluator.
pub fn eval_expr(e: &Expr, env: &Binding) -> Result<GoldenNum, EvalError> {
    Evaluator::new().eval(e, env)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

/// Evaluates one side of an identity. The right side uses the active case.
pub fn eval_side(spec: &IdentitySpec, env: &Binding, side: Side) -> Result<GoldenNum, EvalError> {
    let mut ev = Evaluator::new();
    match side {
        Side::Lhs => ev.eval(&spec.lhs, env),
        Side::Rhs => {
            let case = ev.active_case(spec, env)?;
            ev.eval(&spec.rhs[case].expr, env)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_expr, parse_identity};

    fn ev(src: &str, env: &Binding) -> GoldenNum {
        eval_expr(&parse_expr(src).unwrap(), env).unwrap()
    }

    const T2F: &str = "identity T2F { params n in 0..., s in int; \
        lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s)); \
        rhs = F(2*n+s) - (-1)^(s)*F(n-s) }";

    #[test]
    fn t2f_at_small_point() {
        let spec = parse_identity(T2F).unwrap();
        let env = Binding::new().with("n", 2).with("s", 0);
        assert_eq!(eval_side(&spec, &env, Side::Lhs).unwrap(), GoldenNum::from_int(2));
        assert_eq!(eval_side(&spec, &env, Side::Rhs).unwrap(), GoldenNum::from_int(2));
    }

    #[test]
    fn fib_of_index_expression() {
        let env = Binding::new().with("k", 3).with("s", 1);
        assert_eq!(ev("F(2*k+s)", &env), GoldenNum::from_int(13));
        assert_eq!(ev("F(-(2*k+s)) + L(-1)", &env), GoldenNum::from_int(12));
        assert_eq!(ev("F(400) - F(399) - F(398)", &env), GoldenNum::zero());
    }

    #[test]
    fn floor_and_ceiling() {
        let env = Binding::new().with("n", -7);
        assert_eq!(ev("fdiv(n, 2)", &env), GoldenNum::from_int(-4));
        assert_eq!(ev("cdiv(n, 2)", &env), GoldenNum::from_int(-3));
        assert_eq!(ev("fdiv(7, 2) + cdiv(7, 2)", &env), GoldenNum::from_int(7));
    }

    #[test]
    fn sign_power_accepts_negative_exponents() {
        let env = Binding::new().with("s", -3);
        assert_eq!(ev("(-1)^(s)", &env), GoldenNum::from_int(-1));
        assert_eq!(ev("(-1)^(s+1)", &env), GoldenNum::from_int(1));
    }

    #[test]
    fn field_atoms() {
        let env = Binding::new();
        assert_eq!(ev("alpha*beta", &env), GoldenNum::from_int(-1));
        assert_eq!(ev("alpha^6", &env), ev("9 + 4*sqrt5", &env));
        assert_eq!(ev("alpha^(-1)", &env), ev("alpha - 1", &env));
        assert_eq!(ev("(4/5)^2", &env), GoldenNum::ratio(16, 25));
        assert_eq!(ev("2^(-3)", &env), GoldenNum::ratio(1, 8));
        assert_eq!(ev("re(1, 1, 4) + im(1, 2, 2)", &env), GoldenNum::zero());
    }

    #[test]
    fn empty_sum_is_zero() {
        let env = Binding::new().with("n", 3);
        assert_eq!(ev("sum(k=n..n-1; F(k))", &env), GoldenNum::zero());
    }

    #[test]
    fn large_values_switch_to_big_integers() {
        let env = Binding::new();
        let v = ev("2^200 - 2^199 - 2^199", &env);
        assert!(v.is_zero());
        assert_eq!(ev("C(300, 150) / C(300, 150)", &env), GoldenNum::one());
        assert_eq!(ev("F(90)*F(90)*F(90) / F(90)^3", &env), GoldenNum::one());
    }

    #[test]
    fn errors() {
        let env = Binding::new().with("n", 3);
        let err = eval_expr(&parse_expr("F(n/2)").unwrap(), &env).unwrap_err();
        assert!(matches!(err, EvalError::NonInteger { ref expr, .. } if expr == "n/(2)"));
        let err = eval_expr(&parse_expr("1/(n-3)").unwrap(), &env).unwrap_err();
        assert!(matches!(
            err,
            EvalError::Field {
                source: FieldError::DivisionByZero,
                ..
            }
        ));
        let err = eval_expr(&parse_expr("0^(-1)").unwrap(), &env).unwrap_err();
        assert!(matches!(err, EvalError::Field { .. }));
        let err = eval_expr(&parse_expr("C(n-4, 1)").unwrap(), &env).unwrap_err();
        assert!(matches!(err, EvalError::NegativeBinomial { n: -1, .. }));
        let err = eval_expr(&parse_expr("re(1, 1, n-4)").unwrap(), &env).unwrap_err();
        assert!(matches!(err, EvalError::NegativeGaussPower { .. }));
        let err = eval_expr(&parse_expr("m").unwrap(), &env).unwrap_err();
        assert!(matches!(err, EvalError::Unbound(_)));
    }

    #[test]
    fn case_selection() {
        let spec = parse_identity("identity x { params n in int; lhs = 0; rhs = cases { even(n) -> 1; odd(n) -> 2 } }")
            .unwrap();
        let mut ev = Evaluator::new();
        assert_eq!(ev.active_case(&spec, &Binding::new().with("n", -4)).unwrap(), 0);
        assert_eq!(ev.active_case(&spec, &Binding::new().with("n", -3)).unwrap(), 1);
        let overlapping = parse_identity(
            "identity y { params n in int; lhs = 0; rhs = cases { even(n) -> 1; n <= 2 -> 2; else -> 3 } }",
        )
        .unwrap();
        assert_eq!(ev.active_case(&overlapping, &Binding::new().with("n", 3)).unwrap(), 2);
        assert!(matches!(
            ev.active_case(&overlapping, &Binding::new().with("n", 2)),
            Err(EvalError::AmbiguousCases(_))
        ));
    }
}
