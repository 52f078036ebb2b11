use super::*;
use crate::diffring::{q, qr, Context, Gen};

fn v(g: Gen) -> DiffExpr {
    DiffExpr::var(g)
}

#[test]
fn del_past_function() {
    let mut ctx = Context::new();
    let f = ctx.var("f");
    let lhs = PsiDO::del(1).compose(&PsiDO::func(v(f)));
    let rhs = &PsiDO::term(v(f), 1) + &PsiDO::func(DiffExpr::jet(f, 1));
    assert_eq!(lhs, rhs);
    let lhs = PsiDO::del(2).compose(&PsiDO::func(v(f)));
    assert_eq!(lhs.coeff(1), DiffExpr::jet(f, 1).scale(&q(2)));
    assert_eq!(lhs.coeff(0), DiffExpr::jet(f, 2));
}

#[test]
fn del_past_dyad() {
    let mut ctx = Context::new();
    let qg = ctx.var("q");
    let r = ctx.var("r");
    // ∂ q∂⁻¹r = q r + q'∂⁻¹r
    let lhs = PsiDO::del(1).compose(&PsiDO::dinv(v(qg), v(r)));
    let rhs = &PsiDO::func(v(qg) * v(r)) + &PsiDO::dinv(DiffExpr::jet(qg, 1), v(r));
    assert_eq!(lhs, rhs);
    // q∂⁻¹r∂ = q r - q∂⁻¹r'
    let lhs = PsiDO::dinv(v(qg), v(r)).compose(&PsiDO::del(1));
    let rhs = &PsiDO::func(v(qg) * v(r)) - &PsiDO::dinv(v(qg), DiffExpr::jet(r, 1));
    assert_eq!(lhs, rhs);
}

#[test]
fn dyad_times_dyad_is_associative_with_del() {
    let mut ctx = Context::new();
    let a = ctx.var("a");
    let b = ctx.var("b");
    let c = ctx.var("c");
    let d = ctx.var("d");
    let x = PsiDO::dinv(v(a), v(b));
    let y = PsiDO::dinv(v(c), v(d));
    let dl = PsiDO::del(1);
    let lhs = dl.compose(&x.compose(&y));
    let rhs = dl.compose(&x).compose(&y);
    assert_eq!(lhs, rhs);
    // ∂⁻¹ ∂⁻¹ composed with ∂ on the right collapses.
    let one = PsiDO::dinv(DiffExpr::one(), DiffExpr::one());
    assert_eq!(one.compose(&dl), PsiDO::one());
    assert_eq!(dl.compose(&one), PsiDO::one());
}

#[test]
fn adjoint_rules() {
    let mut ctx = Context::new();
    let a = ctx.var("a");
    let b = ctx.var("b");
    assert_eq!(PsiDO::del(1).adjoint(), -PsiDO::del(1));
    assert_eq!(PsiDO::dinv(v(a), v(b)).adjoint(), -PsiDO::dinv(v(b), v(a)));
    let x = &PsiDO::term(v(a), 2) + &PsiDO::dinv(v(a), v(b));
    let y = &PsiDO::term(v(b), 1) + &PsiDO::func(v(a));
    assert_eq!(x.compose(&y).adjoint(), y.adjoint().compose(&x.adjoint()));
    assert_eq!(x.adjoint().adjoint(), x);
}

#[test]
fn projections_split_exactly() {
    let mut ctx = Context::new();
    let u = ctx.var("u");
    let x = &(&PsiDO::del(2) + &PsiDO::func(v(u))) + &PsiDO::dinv(v(u), v(u));
    assert_eq!(&x.plus() + &x.minus(), x);
    assert_eq!(x.geq1(), PsiDO::del(2));
    assert_eq!(x.order0(), v(u));
    assert_eq!(x.residue(), v(u).pow(2));
}

#[test]
fn tail_expansion_matches_series() {
    let mut ctx = Context::new();
    let a = ctx.var("a");
    let b = ctx.var("b");
    let view = PsiDO::dinv(v(a), v(b)).expand_tail(3);
    assert_eq!(view.coeff(-1), v(a) * v(b));
    assert_eq!(view.coeff(-2), -(v(a) * DiffExpr::jet(b, 1)));
    assert_eq!(view.coeff(-3), v(a) * DiffExpr::jet(b, 2));
    assert_eq!(view.coeff(-4), DiffExpr::zero());
}

#[test]
fn monic_linear_inverse_is_two_sided() {
    let mut ctx = Context::new();
    let b = ctx.var("b");
    let lin = &PsiDO::del(1) - &PsiDO::func(v(b));
    let inv = PsiDO::invert_monic_linear(&v(b));
    assert_eq!(lin.compose(&inv), PsiDO::one());
    assert_eq!(inv.compose(&lin), PsiDO::one());
}

#[test]
fn gauge_conjugation() {
    let mut ctx = Context::new();
    let p = ctx.declare("phi1", true);
    let psi = ctx.var("psi1");
    let l = &PsiDO::del(1) + &PsiDO::dinv(v(p), v(psi));
    let k = l.conjugate_by(&v(p)).unwrap();
    // φ⁻¹(∂ + φ∂⁻¹ψ)φ = ∂ + φ'/φ + ∂⁻¹ φψ
    let pinv = v(p).unit_inverse().unwrap();
    let expect = &(&PsiDO::del(1) + &PsiDO::func(DiffExpr::jet(p, 1) * pinv))
        + &PsiDO::dinv(DiffExpr::one(), v(p) * v(psi));
    assert_eq!(k, expect);
    assert!(l.conjugate_by(&v(psi)).is_err());
}

#[test]
fn square_root_of_schrodinger() {
    let mut ctx = Context::new();
    let u = ctx.var("u");
    let l = &PsiDO::del(2) + &PsiDO::func(v(u));
    let r = nth_root(&l, 2, 4).unwrap();
    assert_eq!(r.coeff(1), DiffExpr::one());
    assert_eq!(r.coeff(0), DiffExpr::zero());
    assert_eq!(r.coeff(-1), v(u).scale(&qr(1, 2)));
    assert_eq!(r.coeff(-2), DiffExpr::jet(u, 1).scale(&qr(-1, 4)));
    let sq = r.power(2);
    let lv = l.expand_tail(2);
    for k in sq.low()..=2 {
        assert_eq!(sq.coeff(k), lv.coeff(k), "order {k}");
    }
    assert!(nth_root(&PsiDO::term(DiffExpr::int(2), 2), 2, 3).is_err());
}

#[test]
fn nonstandard_square_projection() {
    let mut ctx = Context::new();
    let v1 = ctx.var("v1");
    let v2 = ctx.var("v2");
    let k = &(&PsiDO::del(1) + &PsiDO::func(v(v1))) + &PsiDO::dinv(DiffExpr::one(), v(v2));
    let k2 = k.power(2);
    assert_eq!(
        k2.geq1(),
        &PsiDO::del(2) + &PsiDO::term(v(v1).scale(&q(2)), 1)
    );
}

#[test]
fn apply_acts_with_antiderivative() {
    let mut ctx = Context::new();
    let a = ctx.var("a");
    let f = ctx.var("f");
    let op = PsiDO::dinv(v(a), DiffExpr::jet(a, 1));
    let op2 = PsiDO::dinv(v(a), DiffExpr::one());
    assert_eq!(op2.apply(&DiffExpr::jet(f, 1)), v(a) * v(f));
    let out = op.apply(&v(f));
    assert!(out.has_prim());
    assert_eq!(PsiDO::del(2).apply(&v(f)), DiffExpr::jet(f, 2));
}

#[test]
fn residue_of_commutator_skips_dyad_pairs_safely() {
    let mut ctx = Context::new();
    let a = ctx.var("a");
    let b = ctx.var("b");
    let c = ctx.var("c");
    let x = &PsiDO::term(v(c), 2) + &PsiDO::dinv(v(a), v(b));
    let y = &PsiDO::del(1) + &PsiDO::dinv(v(b), v(c));
    assert_eq!(x.residue_of_product(&y), x.compose(&y).residue());
    assert_eq!(x.compose_plus(&y), x.compose(&y).plus());
}

#[test]
fn hidden_constants_commute_through_dinv() {
    let mut ctx = Context::new();
    let u = ctx.var("u");
    let w = ctx.var("w");
    let ju = antiderivative(&v(u).pow(2));
    let jw = antiderivative(&v(w).pow(2));
    // c = J(u^2)J(w^2) - ∫u^2 J(w^2) - ∫w^2 J(u^2) has zero derivative.
    let c = &(&ju * &jw)
        - &(antiderivative(&(&v(u).pow(2) * &jw)) + antiderivative(&(&v(w).pow(2) * &ju)));
    assert!(!c.is_zero());
    assert!(c.derivative().is_zero());
    let a = DiffExpr::jet(u, 1);
    let b = v(w);
    let lhs = PsiDO::dinv(&a * &c, b.clone());
    let rhs = PsiDO::dinv(a.clone(), &c * &b);
    assert_eq!(lhs, rhs);
    assert_ne!(lhs, PsiDO::dinv(a.clone(), b.clone()));
    assert!((&lhs - &rhs).is_zero());
}
