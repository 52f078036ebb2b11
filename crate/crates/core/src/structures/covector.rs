use std::collections::BTreeMap;

use super::family::{FamilyKind, LaxFamily};
use crate::diffring::{euler_derivative, Context, DiffExpr, Gen};
use crate::error::{Error, Result};
use crate::psido::{format_op, PsiDO};

/// A gradient operator `X = δH/δL` together with the slots `x_f = δH/δf`
/// it induces through `∫res(X δL) = Σ ∫ x_f δf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covector {
    pub op: PsiDO,
    pub slots: BTreeMap<Gen, DiffExpr>,
}

/// Slots of `x` for the family: `res(∂^k X)` for a coefficient of `∂^k`,
/// `res(X ∂⁻¹)` for a `∂⁻¹ v` field, `res(∂⁻¹ψ X)` and `res(X φ∂⁻¹)` for a
/// pair `φ ∂⁻¹ ψ`.
pub fn slots_of(family: &LaxFamily, x: &PsiDO) -> BTreeMap<Gen, DiffExpr> {
    let one = DiffExpr::one;
    let mut out = BTreeMap::new();
    for (k, g) in &family.coeffs {
        out.insert(*g, PsiDO::del(*k).residue_of_product(x));
    }
    if let Some(v) = family.dinv_field {
        out.insert(v, x.residue_of_product(&PsiDO::dinv(one(), one())));
    }
    for (a, b) in &family.pairs {
        out.insert(
            *a,
            PsiDO::dinv(one(), DiffExpr::var(*b)).residue_of_product(x),
        );
        out.insert(
            *b,
            x.residue_of_product(&PsiDO::dinv(DiffExpr::var(*a), one())),
        );
    }
    out
}

impl Covector {
    pub fn from_op(family: &LaxFamily, op: PsiDO) -> Self {
        let slots = slots_of(family, &op);
        Covector { op, slots }
    }

    /// Fields whose pairing identity fails: the Euler derivative of
    /// `res(X δL) - Σ x_f δf` with respect to each variation `δf`.
    pub fn pairing_defects(&self, family: &LaxFamily, ctx: &mut Context) -> Vec<(Gen, DiffExpr)> {
        let deltas: BTreeMap<Gen, Gen> = family
            .fields
            .iter()
            .map(|f| (*f, ctx.var(&format!("d_{}", ctx.name(*f)))))
            .collect();
        let dexpr: BTreeMap<Gen, DiffExpr> = deltas
            .iter()
            .map(|(f, d)| (*f, DiffExpr::var(*d)))
            .collect();
        let mut density = self.op.residue_of_product(&family.tangent(&dexpr));
        for (f, d) in &dexpr {
            if let Some(x) = self.slots.get(f) {
                density -= &(x * d);
            }
        }
        deltas
            .iter()
            .filter_map(|(f, d)| {
                let e = euler_derivative(&density, *d);
                (!e.is_zero()).then_some((*f, e))
            })
            .collect()
    }

    pub fn check_pairing(&self, family: &LaxFamily, ctx: &mut Context) -> Result<()> {
        let defects = self.pairing_defects(family, ctx);
        if defects.is_empty() {
            return Ok(());
        }
        let detail = defects
            .iter()
            .map(|(f, e)| format!("{}: {}", ctx.name(*f), e.display(ctx)))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Pairing(format!(
            "{} on X = {}: {detail}",
            family.name,
            format_op(&self.op, ctx)
        )))
    }
}

/// Monomial pieces spanning a generic gradient of the family: one fresh
/// generator per piece. Dyadic pieces `∂⁻¹ s` and `w ∂⁻¹` reach the
/// coefficient slots; differential pieces `c_k ∂^k` fill up the rest so
/// that the slot map has full rank.
pub fn generic_pieces(family: &LaxFamily, ctx: &mut Context) -> Result<Vec<Covector>> {
    let mut ops = Vec::new();
    let nc = family.coeffs.len();
    let unsupported = || {
        Error::Config(format!(
            "generic covectors for {} need more than two coefficient slots",
            family.name
        ))
    };
    match family.kind {
        FamilyKind::Standard | FamilyKind::Nonstandard if nc > 2 => return Err(unsupported()),
        _ => {}
    }
    if nc >= 1 {
        let s = ctx.var("s");
        ops.push(PsiDO::dinv(DiffExpr::one(), DiffExpr::var(s)));
    }
    if nc >= 2 {
        let w = ctx.var("w");
        ops.push(PsiDO::dinv(DiffExpr::var(w), DiffExpr::one()));
    }
    let nd = family.fields.len() - ops.len();
    for k in 0..nd {
        let c = ctx.var(&format!("c{k}"));
        ops.push(PsiDO::term(DiffExpr::var(c), k as u32));
    }
    Ok(ops
        .into_iter()
        .map(|op| Covector::from_op(family, op))
        .collect())
}
