//! The relation between gradients on `K_(1,2)` and on `L_(2,1) = ∂K_(1,2)`.

use std::time::Instant;

use super::maps::{ns_map, omega_map};
use super::report::{Check, VerificationReport};
use crate::diffring::{
    antiderivative, euler_derivative, integrate_total_derivative, Context, DiffExpr, Gen,
};
use crate::error::Result;
use crate::psido::{format_op, PsiDO};

/// A generic gradient `X_K = ∂⁻¹ w' + c + a1 ∂ + a2 ∂²` on `K_(1,2)`.
/// Writing the `∂⁻¹` slot as a derivative keeps `X_K ∂⁻¹` free of `J`.
struct Gradient {
    xk: PsiDO,
    a: PsiDO,
    x_v1: DiffExpr,
    x_v2: DiffExpr,
    x_q: DiffExpr,
    x_r: DiffExpr,
}

fn gradient(ctx: &mut Context, tag: &str, q: Gen, r: Gen) -> Gradient {
    let mut g = |n: &str| DiffExpr::var(ctx.var(&format!("{n}{tag}")));
    let w = g("w");
    let c = g("c");
    let a1 = g("a");
    let a2 = g("b");
    let mut xk = PsiDO::dinv(DiffExpr::one(), w.derivative());
    xk.add_diff(0, c);
    xk.add_diff(1, a1);
    xk.add_diff(2, a2);
    let one = DiffExpr::one;
    let x_v1 = xk.residue();
    let x_v2 = xk.residue_of_product(&PsiDO::dinv(one(), one()));
    let x_q = PsiDO::dinv(one(), DiffExpr::var(r)).residue_of_product(&xk);
    let x_r = xk.residue_of_product(&PsiDO::dinv(DiffExpr::var(q), one()));
    let a = &(&xk - &PsiDO::dinv(one(), x_v1.clone())) - &PsiDO::func(x_v2.clone());
    Gradient {
        xk,
        a,
        x_v1,
        x_v2,
        x_q,
        x_r,
    }
}

fn is_total_derivative(e: &DiffExpr) -> bool {
    if e.has_prim() {
        return integrate_total_derivative(e).is_some();
    }
    e.generators()
        .into_iter()
        .all(|g| euler_derivative(e, g).is_zero())
}

/// Checks, on generic gradients: `(A)_0 = 0` and `A` differential; the
/// chain-rule slots of `L_(2,1)`; `X_K ∂⁻¹ = X_L + O(∂⁻³)`;
/// `(Bφ)_0 = δH/δψ`, `(B*ψ)_0 = δH/δφ` for `B = A∂⁻¹`; and equality of the
/// bilinear forms of the nonstandard map on `K` and `Ω` on `L`.
pub fn verify_appendix_identity(ctx: &mut Context) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("gradient identity K(1,2) / L(2,1)", "appendix");
    let v1 = ctx.var("v1");
    let v2 = ctx.var("v2");
    let q = ctx.var("q");
    let r = ctx.var("r");
    let v = DiffExpr::var;
    let mut k = &PsiDO::del(1) + &PsiDO::func(v(v1));
    k.add_dyad(&DiffExpr::one(), &v(v2));
    k.add_dyad(&v(q), &v(r));
    let l = PsiDO::del(1).compose(&k);
    let phi = DiffExpr::jet(q, 1);
    let psi = v(r);

    let gf = gradient(ctx, "F", q, r);
    let gg = gradient(ctx, "G", q, r);

    for (name, g) in [("F", &gf), ("G", &gg)] {
        report.push(Check::from_residual(
            format!("(A)_0 = 0 [{name}]"),
            g.a.order0().display(ctx).to_string(),
        ));
        report.push(if g.a.is_differential() {
            Check::verified(format!("A is differential [{name}]"))
        } else {
            Check::mismatch(
                format!("A is differential [{name}]"),
                format_op(&g.a.minus(), ctx),
            )
        });

        // slots of L(2,1) from the chain rule
        let x_u2 = g.x_v2.clone();
        let x_u1 = &g.x_v1 + &g.x_v2.derivative();
        let x_psi = &g.x_r - &(&v(q) * &g.x_v2);
        let dphi = &g.x_q - &(&v(r) * &g.x_v2);
        let x_phi = -antiderivative(&dphi);
        report.push(if x_phi.has_prim() {
            Check::mismatch(
                format!("dH/dq - r dH/dv2 is exact [{name}]"),
                dphi.display(ctx).to_string(),
            )
        } else {
            Check::verified(format!("dH/dq - r dH/dv2 is exact [{name}]"))
        });

        let a_op = &g.a;
        report.push(Check::from_residual(
            format!("(A q)_0 = dH/dpsi [{name}]"),
            (&a_op.apply(&v(q)) - &x_psi).display(ctx).to_string(),
        ));
        report.push(Check::from_residual(
            format!("(A* r)_0 = -(dH/dphi)' [{name}]"),
            (&a_op.adjoint().apply(&v(r)) + &x_phi.derivative())
                .display(ctx)
                .to_string(),
        ));

        let b = a_op.compose(&PsiDO::dinv(DiffExpr::one(), DiffExpr::one()));
        report.push(if b.is_differential() {
            Check::verified(format!("B = A dinv is differential [{name}]"))
        } else {
            Check::mismatch(
                format!("B = A dinv is differential [{name}]"),
                format_op(&b.minus(), ctx),
            )
        });
        report.push(Check::from_residual(
            format!("(B phi)_0 = dH/dpsi [{name}]"),
            (&b.apply(&phi) - &x_psi).display(ctx).to_string(),
        ));
        report.push(Check::from_residual(
            format!("(B* psi)_0 = dH/dphi [{name}]"),
            (&b.adjoint().apply(&psi) - &x_phi).display(ctx).to_string(),
        ));

        // X_K ∂⁻¹ against (δH/δL)_- + B on orders ≥ -2
        let xl = g.xk.compose(&PsiDO::dinv(DiffExpr::one(), DiffExpr::one()));
        let view = xl.expand_tail(3);
        let mut diff_terms = Vec::new();
        for (ord, want) in [(-1, x_u2.clone()), (-2, &x_u1 - &x_u2.derivative())] {
            let d = &view.coeff(ord) - &want;
            if !d.is_zero() {
                diff_terms.push(format!("order {ord}: {}", d.display(ctx)));
            }
        }
        for (ord, c) in b.diff_terms() {
            let d = &view.coeff(ord as i64) - c;
            if !d.is_zero() {
                diff_terms.push(format!("order {ord}: {}", d.display(ctx)));
            }
        }
        if view.top() > b.order().filter(|o| *o >= 0) {
            diff_terms.push("extra positive orders".into());
        }
        report.push(if diff_terms.is_empty() {
            Check::verified(format!("X_K dinv - X_L = O(del^-3) [{name}]"))
        } else {
            Check::mismatch(
                format!("X_K dinv - X_L = O(del^-3) [{name}]"),
                diff_terms.join("; "),
            )
        });

        // the L(2,1) pairing slots of X_K ∂⁻¹ are the chain-rule slots
        let one = DiffExpr::one;
        let pairs = [
            ("u1", PsiDO::del(1).residue_of_product(&xl), &x_u1),
            ("u2", xl.residue(), &x_u2),
            (
                "phi",
                PsiDO::dinv(one(), psi.clone()).residue_of_product(&xl),
                &x_phi,
            ),
            (
                "psi",
                xl.residue_of_product(&PsiDO::dinv(phi.clone(), one())),
                &x_psi,
            ),
        ];
        for (f, got, want) in pairs {
            report.push(Check::from_residual(
                format!("slot {f} of X_K dinv [{name}]"),
                (&got - want).display(ctx).to_string(),
            ));
        }
    }

    // ∫res(X_K^F Θ_NS(X_K^G)) = ∫res(X_L^F Ω(X_L^G))
    let dinv = PsiDO::dinv(DiffExpr::one(), DiffExpr::one());
    let lhs = gf.xk.residue_of_product(&ns_map(&k, &gg.xk));
    let xlf = gf.xk.compose(&dinv);
    let xlg = gg.xk.compose(&dinv);
    let rhs = xlf.residue_of_product(&omega_map(&l, &xlg));
    let d = &lhs - &rhs;
    report.push(if is_total_derivative(&d) {
        Check::verified("bilinear forms agree modulo total derivatives")
    } else {
        Check::mismatch(
            "bilinear forms agree modulo total derivatives",
            d.display(ctx).to_string(),
        )
    });
    let lhs_swapped = gg.xk.residue_of_product(&ns_map(&k, &gf.xk));
    let s = &lhs + &lhs_swapped;
    report.push(if is_total_derivative(&s) {
        Check::verified("nonstandard bilinear form is antisymmetric")
    } else {
        Check::mismatch(
            "nonstandard bilinear form is antisymmetric",
            s.display(ctx).to_string(),
        )
    });
    report.elapsed = start.elapsed();
    Ok(report)
}
