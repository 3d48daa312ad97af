use motive_workbench_cli::expr::{parse, BinOp, Expr, ExprKind};
use num_bigint::BigInt;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|v| ExprKind::Int(BigInt::from(v))),
        (0u32..50, 1u32..50).prop_map(|(n, d)| ExprKind::Fraction(BigInt::from(n), BigInt::from(d))),
        prop::sample::select(vec!["sigma1", "sigma3", "g2", "g5", "h4", "pt", "H", "rho", "r", "σ2"])
            .prop_map(|n| ExprKind::Name(n.to_string())),
        prop::collection::vec(0u32..5, 0..3).prop_map(ExprKind::Schubert),
    ]
    .prop_map(Expr::new)
}

fn tree() -> impl Strategy<Value = Expr> {
    let ops = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Compose, BinOp::External, BinOp::Mul]);
    leaf().prop_recursive(5, 48, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| ExprKind::Neg(Box::new(e))),
            (inner.clone(), 0u32..5).prop_map(|(e, k)| ExprKind::Pow(Box::new(e), k)),
            inner.clone().prop_map(|e| ExprKind::Transpose(Box::new(e))),
            (inner.clone(), 2u64..20).prop_map(|(e, m)| ExprKind::Mod(Box::new(e), m)),
            (ops.clone(), inner.clone(), inner).prop_map(|(op, a, b)| ExprKind::Binary(op, Box::new(a), Box::new(b))),
        ]
        .prop_map(Expr::new)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_inverts_render(e in tree()) {
        let rendered = e.to_string();
        let parsed = parse(&rendered).map_err(|err| TestCaseError::fail(format!("{rendered}: {err}")))?;
        prop_assert_eq!(&parsed, &e, "{}", rendered);
        prop_assert_eq!(parsed.to_string(), rendered);
    }

    #[test]
    fn whitespace_is_insignificant(e in tree()) {
        let spaced: String = e.to_string().chars().flat_map(|c| [c, ' ']).collect();
        let respaced = spaced.replace("m o d", "mod");
        if let Ok(p) = parse(&respaced) {
            prop_assert_eq!(p, e);
        }
    }
}
