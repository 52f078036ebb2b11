//! Lax flows, the gauge map `L_(1,2) → K_(1,2)` and the map `K ↦ ∂K`.

use std::collections::BTreeMap;

use crate::diffring::{antiderivative, frechet, Context, DiffExpr, Gen, Substitution};
use crate::error::{Error, Result};
use crate::psido::{format_op, nth_root, PsiDO};
use crate::structures::{Check, FamilyKind, LaxFamily, VerificationReport};

/// Time derivatives of the coordinate fields under the `k`-th flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub k: u32,
    pub flows: Vec<(Gen, DiffExpr)>,
}

impl FlowResult {
    pub fn get(&self, g: Gen) -> Option<&DiffExpr> {
        self.flows.iter().find(|(h, _)| *h == g).map(|(_, e)| e)
    }

    pub fn as_map(&self) -> BTreeMap<Gen, DiffExpr> {
        self.flows.iter().cloned().collect()
    }

    pub fn to_text(&self, ctx: &Context) -> String {
        self.flows
            .iter()
            .map(|(g, e)| format!("{}: {}\n", ctx.name(*g), e.display(ctx)))
            .collect()
    }
}

/// Invertible change of coordinates between two families.
#[derive(Clone, Debug)]
pub struct ChangeOfVariables {
    /// New fields as expressions in the old ones.
    pub forward: Vec<(Gen, DiffExpr)>,
    /// Old fields as expressions in the new ones.
    pub inverse: Vec<(Gen, DiffExpr)>,
}

impl ChangeOfVariables {
    pub fn forward_subst(&self) -> Substitution {
        Substitution::from_pairs(self.forward.iter().cloned())
    }

    pub fn inverse_subst(&self) -> Substitution {
        Substitution::from_pairs(self.inverse.iter().cloned())
    }

    pub fn to_text(&self, ctx: &Context) -> String {
        self.forward
            .iter()
            .map(|(g, e)| format!("{} = {}\n", ctx.name(*g), e.display(ctx)))
            .collect()
    }
}

/// The differential operator driving the `k`-th flow: `(L^{k/N})_+` for the
/// standard kind and `(K^{k/N})_{≥1}` for the nonstandard one. Fractional
/// powers go through an `N`-th root expanded to `N + k + 2` orders.
pub fn flow_generator(family: &LaxFamily, k: u32) -> Result<PsiDO> {
    flow_generator_at_depth(family, k, family.order + k + 2)
}

/// As [`flow_generator`], with the root expanded to `depth` orders (never
/// fewer than `N + k + 2`).
pub fn flow_generator_at_depth(family: &LaxFamily, k: u32, depth: u32) -> Result<PsiDO> {
    let l = family.template();
    let n = family.order;
    let project = |p: &PsiDO| match family.kind {
        FamilyKind::Standard => p.plus(),
        FamilyKind::Nonstandard => p.geq1(),
    };
    if k.is_multiple_of(n) {
        return Ok(project(&l.power(k / n)));
    }
    let view = nth_root(&l, n, depth.max(n + k + 2))?.power(k);
    Ok(match family.kind {
        FamilyKind::Standard => view.plus(),
        FamilyKind::Nonstandard => view.geq1(),
    })
}

fn flow_with(family: &LaxFamily, k: u32, b: &PsiDO) -> Result<FlowResult> {
    let l = family.template();
    let comm = b.commutator(&l);
    let mut flows = BTreeMap::new();
    for (ord, g) in &family.coeffs {
        flows.insert(*g, comm.coeff(*ord));
    }
    let b_adj = b.adjoint();
    if let Some(v) = family.dinv_field {
        flows.insert(v, -b_adj.apply(&DiffExpr::var(v)));
    }
    for (a, c) in &family.pairs {
        flows.insert(*a, b.apply(&DiffExpr::var(*a)));
        flows.insert(*c, -b_adj.apply(&DiffExpr::var(*c)));
    }
    let rest = &comm - &family.tangent(&flows);
    if !rest.is_zero() {
        return Err(Error::Decomposition {
            family: family.name.clone(),
            detail: format!(
                "flow {k} leaves the tangent space (residual with {} differential terms and {} dyads)",
                rest.diff_terms().count(),
                rest.dyad_count()
            ),
        });
    }
    Ok(FlowResult {
        k,
        flows: family
            .fields
            .iter()
            .map(|g| (*g, flows[g].clone()))
            .collect(),
    })
}

/// `∂_k L = [B, L]` with `B = (L^{k/N})_+`; eigenfunctions move by `B φ`,
/// adjoint eigenfunctions by `-B* ψ`.
pub fn standard_flow(family: &LaxFamily, k: u32) -> Result<FlowResult> {
    if family.kind != FamilyKind::Standard {
        return Err(Error::Config(format!(
            "{} is not a standard family",
            family.name
        )));
    }
    flow_with(family, k, &flow_generator(family, k)?)
}

/// `∂_k K = [(K^k)_{≥1}, K]`; `q` moves by `B q`, `r` and the `∂⁻¹` field by `-B* ·`.
pub fn nonstandard_flow(family: &LaxFamily, k: u32) -> Result<FlowResult> {
    if family.kind != FamilyKind::Nonstandard {
        return Err(Error::Config(format!(
            "{} is not a nonstandard family",
            family.name
        )));
    }
    flow_with(family, k, &flow_generator(family, k)?)
}

/// The `k`-th flow of either kind, with fractional powers expanded to
/// `depth` orders.
pub fn lax_flow(family: &LaxFamily, k: u32, depth: u32) -> Result<FlowResult> {
    flow_with(family, k, &flow_generator_at_depth(family, k, depth)?)
}

/// `L_(1,2)` with `φ1` invertible, `K_(1,2)`, and the substitutions
/// `v1 = φ1'/φ1, v2 = φ1ψ1, q = φ2/φ1, r = φ1ψ2` (inverse via `φ1 = E(v1)`).
pub fn gauge_transform(ctx: &mut Context) -> (LaxFamily, LaxFamily, ChangeOfVariables) {
    gauge_transform_m(ctx, 2)
}

/// The same gauge transformation for `L_(1,M)`: `q_i = φ_{i+1}/φ1`,
/// `r_i = φ1ψ_{i+1}`.
pub fn gauge_transform_m(ctx: &mut Context, m: u32) -> (LaxFamily, LaxFamily, ChangeOfVariables) {
    ctx.declare(if m == 1 { "phi" } else { "phi1" }, true);
    let l = LaxFamily::standard(ctx, 1, m);
    let k = LaxFamily::nonstandard(ctx, 1, m);
    let (phi1, psi1) = l.pairs[0];
    let [v1, v2] = [k.fields[0], k.fields[1]];
    let v = DiffExpr::var;
    let inv_phi1 = v(phi1).unit_inverse().expect("phi1 is declared invertible");
    let e = DiffExpr::exp(&v(v1));
    let e_inv = DiffExpr::exp(&-v(v1));
    let mut forward = vec![
        (v1, DiffExpr::jet(phi1, 1) * inv_phi1.clone()),
        (v2, v(phi1) * v(psi1)),
    ];
    let mut inverse = vec![(phi1, e.clone()), (psi1, v(v2) * e_inv.clone())];
    for ((phi, psi), (q, r)) in l.pairs[1..].iter().zip(&k.pairs) {
        forward.push((*q, v(*phi) * inv_phi1.clone()));
        forward.push((*r, v(phi1) * v(*psi)));
        inverse.push((*phi, v(*q) * e.clone()));
        inverse.push((*psi, v(*r) * e_inv.clone()));
    }
    (l, k, ChangeOfVariables { forward, inverse })
}

/// `∂ ∘ K_(N,M) = L_(N+1,M-1)` (with a `∂^N` coefficient `u1`). The forward
/// substitution is read off the product; the inverse integrates
/// `q_i = J(φ_i)` and solves the triangular system for the `v`'s.
pub fn multiply_by_del(
    ctx: &mut Context,
    n: u32,
    m: u32,
) -> Result<(LaxFamily, LaxFamily, ChangeOfVariables)> {
    if m == 0 {
        return Err(Error::Config("multiply_by_del needs M ≥ 1".into()));
    }
    let k = LaxFamily::nonstandard(ctx, n, m);
    let l = LaxFamily::with_u1(ctx, n + 1, m - 1);
    let prod = PsiDO::del(1).compose(&k.template());
    let mut forward = Vec::new();
    for (ord, g) in &l.coeffs {
        forward.push((*g, prod.coeff(*ord)));
    }
    for ((phi, psi), (qg, rg)) in l.pairs.iter().zip(&k.pairs) {
        forward.push((*phi, DiffExpr::jet(*qg, 1)));
        forward.push((*psi, DiffExpr::var(*rg)));
    }
    // check the product has exactly the template's shape
    let mut fs = Substitution::from_pairs(forward.iter().cloned());
    let shaped = fs.apply_op(&l.template())?;
    if shaped != prod {
        return Err(Error::Decomposition {
            family: l.name.clone(),
            detail: "del*K is not of the expected shape".into(),
        });
    }
    // inverse: r_i = ψ_i, q_i = J(φ_i), v_j = u_j - v_{j-1}', v_{N+1} = u_{N+1} - v_N' - Σ q_i r_i
    let mut inverse: Vec<(Gen, DiffExpr)> = Vec::new();
    let mut qs = Vec::new();
    for ((phi, psi), (qg, rg)) in l.pairs.iter().zip(&k.pairs) {
        let jq = antiderivative(&DiffExpr::var(*phi));
        inverse.push((*qg, jq.clone()));
        inverse.push((*rg, DiffExpr::var(*psi)));
        qs.push((jq, DiffExpr::var(*psi)));
    }
    let mut prev = DiffExpr::zero();
    let vs: Vec<Gen> = k
        .coeffs
        .iter()
        .map(|(_, g)| *g)
        .chain(k.dinv_field)
        .collect();
    for (j, vg) in vs.iter().enumerate() {
        let ug = l.coeffs[j].1;
        let mut e = &DiffExpr::var(ug) - &prev.derivative();
        if j == vs.len() - 1 {
            for (jq, r) in &qs {
                e -= &(jq * r);
            }
        }
        inverse.push((*vg, e.clone()));
        prev = e;
    }
    Ok((k, l, ChangeOfVariables { forward, inverse }))
}

/// Image of a flow under a change of variables: `∂_k f_new = Σ F(∂_k f_old)`.
pub fn push_flow(flow: &FlowResult, change: &[(Gen, DiffExpr)]) -> Vec<(Gen, DiffExpr)> {
    change
        .iter()
        .map(|(g, e)| {
            let mut acc = DiffExpr::zero();
            for (h, dh) in &flow.flows {
                let f = frechet(e, *h);
                if !f.is_zero() {
                    acc += &f.apply(dh);
                }
            }
            (*g, acc)
        })
        .collect()
}

/// Pushes the `L_(1,2)` flow through the gauge substitutions and compares it
/// with the `K_(1,2)` flow written in `φ, ψ` coordinates. The `(·)_{≥1}`
/// projection already carries the correction from `∂_k φ1`; the report
/// also notes how far the uncorrected `(K^k)_+` flow is off.
pub fn check_gauge_covariance(ctx: &mut Context, k: u32) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let (lf, kf, change) = gauge_transform(ctx);
    let mut report = VerificationReport::new(format!("gauge covariance k={k}"), "L(1,2) -> K(1,2)");
    let fl = standard_flow(&lf, k)?;
    let fk = nonstandard_flow(&kf, k)?;
    let pushed = push_flow(&fl, &change.forward);
    let mut back = change.forward_subst();
    for (g, e) in &pushed {
        let target = back.apply(fk.get(*g).expect("flow covers every field"))?;
        let res = e - &target;
        report.push(Check::from_residual(
            format!("d_{k} {}", ctx.name(*g)),
            res.display(ctx).to_string(),
        ));
    }
    // uncorrected variant: B = (K^k)_+
    if k > 0 {
        let b = kf.template().power(k).plus();
        let uncorrected = flow_with(&kf, k, &b);
        match uncorrected {
            Ok(fu) => {
                let mut differs = Vec::new();
                for (g, e) in &pushed {
                    let t = back.apply(fu.get(*g).expect("flow covers every field"))?;
                    if &t != e {
                        differs.push(ctx.name(*g).to_string());
                    }
                }
                if differs.is_empty() {
                    report.note("the (K^k)_+ flow agrees as well");
                } else {
                    report.note(format!(
                        "without the correction, (K^k)_+ flows differ on: {}",
                        differs.join(", ")
                    ));
                }
            }
            Err(e) => report.note(format!("the (K^k)_+ flow does not decompose: {e}")),
        }
        let kl = lf.template().conjugate_by(&DiffExpr::var(lf.fields[0]))?;
        let kt = change.forward_subst().apply_op(&kf.template())?;
        report.push(Check::from_residual(
            "phi1^(-1) L phi1 = K",
            format_op(&(&kl - &kt), ctx),
        ));
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
