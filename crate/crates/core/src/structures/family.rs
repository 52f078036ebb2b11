use std::collections::BTreeMap;

use num_traits::One;

use crate::diffring::{Context, DiffExpr, Gen, Monomial};
use crate::error::{Error, Result};
use crate::psido::PsiDO;

/// Whether the hierarchy uses `(·)_+` or `(·)_{≥1}` projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Standard,
    Nonstandard,
}

/// A Lax operator `∂^N + Σ c_k ∂^k + ∂⁻¹ v + Σ φ_i ∂⁻¹ ψ_i` whose
/// coefficient functions are coordinate fields.
#[derive(Clone, Debug)]
pub struct LaxFamily {
    pub name: String,
    pub kind: FamilyKind,
    pub order: u32,
    /// Coefficient fields with the order of `∂` they multiply.
    pub coeffs: Vec<(u32, Gen)>,
    /// Field `v` of a `∂⁻¹ v` term.
    pub dinv_field: Option<Gen>,
    pub pairs: Vec<(Gen, Gen)>,
    /// Coordinate order used by tables and reports.
    pub fields: Vec<Gen>,
}

fn pair_names(m: u32, left: &str, right: &str) -> Vec<(String, String)> {
    if m == 1 {
        return vec![(left.to_string(), right.to_string())];
    }
    (1..=m)
        .map(|i| (format!("{left}{i}"), format!("{right}{i}")))
        .collect()
}

impl LaxFamily {
    /// `L_(N,M) = ∂^N + Σ_{k=0}^{N-2} u_{N-k} ∂^k + Σ_{i=1}^M φ_i ∂⁻¹ ψ_i`,
    /// the constrained form without a `∂^{N-1}` term.
    pub fn standard(ctx: &mut Context, n: u32, m: u32) -> Self {
        let mut fam = Self::general(ctx, n, m, 2);
        fam.name = format!("L({n},{m})");
        fam
    }

    /// `∂^N + Σ_{k=0}^{N-1} u_{N-k} ∂^k + Σ φ_i ∂⁻¹ ψ_i`, including `u1`.
    pub fn with_u1(ctx: &mut Context, n: u32, m: u32) -> Self {
        let mut fam = Self::general(ctx, n, m, 1);
        fam.name = format!("L({n},{m})+u1");
        fam
    }

    fn general(ctx: &mut Context, n: u32, m: u32, first_u: u32) -> Self {
        let mut coeffs = Vec::new();
        for j in first_u..=n {
            coeffs.push((n - j, ctx.var(&format!("u{j}"))));
        }
        let pairs: Vec<(Gen, Gen)> = pair_names(m, "phi", "psi")
            .iter()
            .map(|(a, b)| (ctx.var(a), ctx.var(b)))
            .collect();
        let mut fields: Vec<Gen> = coeffs.iter().map(|(_, g)| *g).collect();
        for (a, b) in &pairs {
            fields.push(*a);
            fields.push(*b);
        }
        LaxFamily {
            name: String::new(),
            kind: FamilyKind::Standard,
            order: n,
            coeffs,
            dinv_field: None,
            pairs,
            fields,
        }
    }

    /// `K_(N,M) = ∂^N + Σ_{j=1}^N v_j ∂^{N-j} + ∂⁻¹ v_{N+1} + Σ_{i=1}^{M-1} q_i ∂⁻¹ r_i`.
    pub fn nonstandard(ctx: &mut Context, n: u32, m: u32) -> Self {
        let mut coeffs = Vec::new();
        for j in 1..=n {
            coeffs.push((n - j, ctx.var(&format!("v{j}"))));
        }
        let v_last = ctx.var(&format!("v{}", n + 1));
        let pairs: Vec<(Gen, Gen)> = if m >= 2 {
            pair_names(m - 1, "q", "r")
                .iter()
                .map(|(a, b)| (ctx.var(a), ctx.var(b)))
                .collect()
        } else {
            Vec::new()
        };
        let mut fields: Vec<Gen> = coeffs.iter().map(|(_, g)| *g).collect();
        fields.push(v_last);
        for (a, b) in &pairs {
            fields.push(*a);
            fields.push(*b);
        }
        LaxFamily {
            name: format!("K({n},{m})"),
            kind: FamilyKind::Nonstandard,
            order: n,
            coeffs,
            dinv_field: Some(v_last),
            pairs,
            fields,
        }
    }

    pub fn template(&self) -> PsiDO {
        let mut op = PsiDO::del(self.order);
        for (k, g) in &self.coeffs {
            op.add_diff(*k, DiffExpr::var(*g));
        }
        if let Some(v) = self.dinv_field {
            op.add_dyad(&DiffExpr::one(), &DiffExpr::var(v));
        }
        for (a, b) in &self.pairs {
            op.add_dyad(&DiffExpr::var(*a), &DiffExpr::var(*b));
        }
        op
    }

    /// Linear part of the template in the field variations; missing
    /// entries are zero.
    pub fn tangent(&self, delta: &BTreeMap<Gen, DiffExpr>) -> PsiDO {
        let d = |g: &Gen| delta.get(g).cloned().unwrap_or_default();
        let mut op = PsiDO::zero();
        for (k, g) in &self.coeffs {
            op.add_diff(*k, d(g));
        }
        if let Some(v) = self.dinv_field {
            op.add_dyad(&DiffExpr::one(), &d(&v));
        }
        for (a, b) in &self.pairs {
            op.add_dyad(&d(a), &DiffExpr::var(*b));
            op.add_dyad(&DiffExpr::var(*a), &d(b));
        }
        op
    }

    pub fn field_names(&self, ctx: &Context) -> Vec<String> {
        self.fields
            .iter()
            .map(|g| ctx.name(*g).to_string())
            .collect()
    }

    pub fn position(&self, g: Gen) -> Option<usize> {
        self.fields.iter().position(|f| *f == g)
    }

    /// Coordinates of a tangent vector, read off the differential part and
    /// the dyads. Exact when the dyads split uniquely, which holds for a
    /// single pair or a single `∂⁻¹` field; otherwise fails.
    pub fn coordinates_of(&self, t: &PsiDO) -> Result<BTreeMap<Gen, DiffExpr>> {
        let fail = |detail: String| Error::Decomposition {
            family: self.name.clone(),
            detail,
        };
        let mut out = BTreeMap::new();
        let mut rest = t.clone();
        for (k, g) in &self.coeffs {
            let c = rest.coeff(*k);
            rest.add_diff(*k, -&c);
            out.insert(*g, c);
        }
        if rest.diff_terms().next().is_some() {
            return Err(fail(
                "differential part outside the coefficient slots".into(),
            ));
        }
        let dyadic_fields = self.pairs.len() * 2 + usize::from(self.dinv_field.is_some());
        match (self.dinv_field, self.pairs.as_slice()) {
            (Some(v), []) => {
                // ∂⁻¹ δv: left legs all constant 1
                let mut dv = DiffExpr::zero();
                for (l, m) in rest.dyads() {
                    if l.as_constant().is_none() {
                        return Err(fail("dyad with non-constant left leg".into()));
                    }
                    dv += &l.mul_monomial(m, &One::one());
                }
                out.insert(v, dv);
                Ok(out)
            }
            (None, [(a, b)]) => {
                // δφ ∂⁻¹ ψ + φ ∂⁻¹ δψ is blind to (δφ, δψ) = c(φ, -ψ) for
                // constant c; the split puts the whole ψ-leg into δφ.
                let phi = DiffExpr::var(*a);
                let psi_m = Monomial::jet(*b, 0);
                let mut dphi = DiffExpr::zero();
                let mut dpsi = DiffExpr::zero();
                for (l, m) in rest.dyads() {
                    if *m == psi_m {
                        dphi += l;
                        continue;
                    }
                    let Some(c) = divide_exact(l, &phi) else {
                        return Err(fail(
                            "dyad whose left leg is not a multiple of the eigenfunction".into(),
                        ));
                    };
                    dpsi += &c.mul_monomial(m, &One::one());
                }
                out.insert(*a, dphi);
                out.insert(*b, dpsi);
                Ok(out)
            }
            _ if dyadic_fields == 0 && rest.is_zero() => Ok(out),
            _ => Err(fail(
                "dyadic part does not split uniquely for this family".into(),
            )),
        }
    }
}

/// `l / f` when `f` is a single monomial dividing every term of `l`.
fn divide_exact(l: &DiffExpr, f: &DiffExpr) -> Option<DiffExpr> {
    let (fm, fc) = f.as_single()?;
    let mut out = DiffExpr::zero();
    for (m, c) in l.terms() {
        let qm = m.div(fm)?;
        out.add_term(qm, c / fc);
    }
    Some(out)
}
