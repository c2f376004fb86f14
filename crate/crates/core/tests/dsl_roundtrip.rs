//! parse(print(x)) == x, over the shipped catalog and over random trees.

use fibsum::catalog::{default_catalog_dir, load_catalog};
use fibsum::dsl::{expr_to_string, parse_expr, parse_identity, print_identity, Expr};
use fibsum::golden::Rat;
use proptest::prelude::*;

#[test]
fn every_catalog_entry_roundtrips() {
    let catalog = load_catalog(&default_catalog_dir()).unwrap();
    assert!(catalog.len() >= 150);
    for e in &catalog.entries {
        let printed = print_identity(&e.spec);
        let back = parse_identity(&printed).unwrap_or_else(|err| panic!("{}: {err}\n{printed}", e.id()));
        assert_eq!(back, e.spec, "{}", e.id());
        // printing is a fixed point after one pass
        assert_eq!(print_identity(&back), printed);
    }
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..1000).prop_map(Expr::int),
        (1i64..50, 2i64..9)
            .prop_filter("proper fraction", |(n, d)| n % d != 0)
            .prop_map(|(n, d)| Expr::Rat(Rat::new(n.into(), d.into()))),
        prop::sample::select(vec!["n", "s", "k", "j_2"]).prop_map(Expr::param),
        Just(Expr::Sqrt5),
        Just(Expr::Alpha),
        Just(Expr::Beta),
    ]
}

fn is_minus_one(e: &Expr) -> bool {
    matches!(e, Expr::Neg(x) if **x == Expr::int(1))
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| Expr::Neg(b(x))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), inner.clone())
                .prop_filter("(-1)^e is its own node", |(x, _)| !is_minus_one(x))
                .prop_map(|(x, y)| Expr::Pow(b(x), b(y))),
            inner.clone().prop_map(|x| Expr::SignPow(b(x))),
            inner.clone().prop_map(|x| Expr::Fib(b(x))),
            inner.clone().prop_map(|x| Expr::Lucas(b(x))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Binom(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::FloorDiv(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::CeilDiv(b(x), b(y))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(x, y, m)| Expr::RePow(b(x), b(y), b(m))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(x, y, m)| Expr::ImPow(b(x), b(y), b(m))),
            (inner.clone(), inner.clone(), inner).prop_map(|(lo, hi, body)| Expr::Sum {
                var: "k".into(),
                lo: b(lo),
                hi: b(hi),
                body: b(body),
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn random_trees_roundtrip(e in expr()) {
        let printed = expr_to_string(&e);
        let back = parse_expr(&printed);
        prop_assert!(back.is_ok(), "{} does not parse: {:?}", printed, back);
        prop_assert_eq!(back.unwrap(), e, "{}", printed);
    }
}
