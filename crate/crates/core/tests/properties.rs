//! Algebraic invariants on randomly generated operators.

use kpcalc::cli::{parse_op, parse_value, Value};
use kpcalc::diffring::{
    antiderivative, euler_derivative, integrate_total_derivative, Context, DiffExpr, Gen,
};
use kpcalc::psido::PsiDO;
use proptest::prelude::*;

/// Term recipe: coefficient and up to two (generator index, jet order) factors.
type TermSpec = (i64, Vec<(usize, u32)>);

fn term_spec() -> impl Strategy<Value = TermSpec> {
    (-4i64..=4, prop::collection::vec((0usize..2, 0u32..3), 0..3))
}

/// Differential coefficients by order, then optional dyad legs.
type OpSpec = (Vec<Vec<TermSpec>>, Option<(Vec<TermSpec>, Vec<TermSpec>)>);

fn expr_spec() -> impl Strategy<Value = Vec<TermSpec>> {
    prop::collection::vec(term_spec(), 0..4)
}

fn op_spec() -> impl Strategy<Value = OpSpec> {
    (
        prop::collection::vec(expr_spec(), 0..3),
        prop::option::of((expr_spec(), prop::collection::vec(term_spec(), 1..2))),
    )
}

fn build_expr(gens: &[Gen], spec: &[TermSpec]) -> DiffExpr {
    let mut out = DiffExpr::zero();
    for (c, factors) in spec {
        let mut t = DiffExpr::int(*c);
        for &(g, k) in factors {
            t = &t * &DiffExpr::jet(gens[g], k);
        }
        out += &t;
    }
    out
}

fn build_op(gens: &[Gen], spec: &OpSpec) -> PsiDO {
    let mut op = PsiDO::zero();
    for (k, c) in spec.0.iter().enumerate() {
        op.add_diff(k as u32, build_expr(gens, c));
    }
    if let Some((l, r)) = &spec.1 {
        op.add_dyad(&build_expr(gens, l), &build_expr(gens, r));
    }
    op
}

fn setup() -> (Context, [Gen; 2]) {
    let mut ctx = Context::new();
    let gens = [ctx.var("u"), ctx.var("v")];
    (ctx, gens)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        ..ProptestConfig::default()
    })]

    #[test]
    fn associativity(a in op_spec(), b in op_spec(), c in op_spec()) {
        let (_, g) = setup();
        let (a, b, c) = (build_op(&g, &a), build_op(&g, &b), build_op(&g, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn adjoint_reverses_products(a in op_spec(), b in op_spec()) {
        let (_, g) = setup();
        let (a, b) = (build_op(&g, &a), build_op(&g, &b));
        prop_assert_eq!((&a * &b).adjoint(), &b.adjoint() * &a.adjoint());
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn residue_of_commutator_is_exact(a in op_spec(), b in op_spec()) {
        let (_, g) = setup();
        let (a, b) = (build_op(&g, &a), build_op(&g, &b));
        prop_assert!(integrate_total_derivative(&a.commutator(&b).residue()).is_some());
    }

    // A dyad acts on functions only up to an integration constant (∂⁻¹∂
    // kills constants), so the action is exact when the left factor is
    // differential.
    #[test]
    fn apply_matches_composition(a in op_spec(), b in op_spec(), f in expr_spec()) {
        let (_, g) = setup();
        let (a, b, f) = (build_op(&g, &a), build_op(&g, &b), build_expr(&g, &f));
        let pa = a.plus();
        prop_assert_eq!((&pa * &b).apply(&f), pa.apply(&b.apply(&f)));
    }

    #[test]
    fn projections_split_operators(a in op_spec()) {
        let (_, g) = setup();
        let a = build_op(&g, &a);
        prop_assert_eq!(&a.plus() + &a.minus(), a.clone());
        prop_assert!(a.plus().is_differential());
        prop_assert_eq!(a.minus().order0(), DiffExpr::zero());
    }

    #[test]
    fn euler_derivative_kills_total_derivatives(f in expr_spec()) {
        let (_, g) = setup();
        let df = build_expr(&g, &f).derivative();
        for x in g {
            prop_assert!(euler_derivative(&df, x).is_zero());
        }
    }

    #[test]
    fn integration_inverts_differentiation(f in expr_spec()) {
        let (_, g) = setup();
        let f = build_expr(&g, &f);
        let df = f.derivative();
        let back = integrate_total_derivative(&df).expect("derivative is exact");
        prop_assert!((&back - &f).as_constant().is_some());
        prop_assert_eq!(antiderivative(&f).derivative(), f);
    }

    #[test]
    fn leibniz_rule(f in expr_spec(), h in expr_spec()) {
        let (_, g) = setup();
        let (f, h) = (build_expr(&g, &f), build_expr(&g, &h));
        prop_assert_eq!((&f * &h).derivative(), &(&f.derivative() * &h) + &(&f * &h.derivative()));
    }

    #[test]
    fn expressions_round_trip_through_text(f in expr_spec()) {
        let (mut ctx, g) = setup();
        let f = build_expr(&g, &f);
        let text = f.display(&ctx).to_string();
        match parse_value(&mut ctx, &text).unwrap() {
            Value::Expr(e) => prop_assert_eq!(e, f),
            Value::Op(_) => prop_assert!(false, "{} parsed as an operator", text),
        }
    }

    #[test]
    fn operators_round_trip_through_text(a in op_spec()) {
        let (mut ctx, g) = setup();
        let a = build_op(&g, &a);
        let text = a.display(&ctx).to_string();
        prop_assert_eq!(parse_op(&mut ctx, &text).unwrap(), a);
    }
}
