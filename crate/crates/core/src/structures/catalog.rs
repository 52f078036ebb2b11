//! Tables shipped with the crate and tables generated by closed formulas.

use super::family::LaxFamily;
use super::table::BracketMatrix;
use crate::diffring::{frechet, Context, DiffExpr};
use crate::error::{Error, Result};
use crate::psido::PsiDO;

/// Tables stored as text under `tables/`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownTable {
    /// Second bracket of `L_(1,2)`.
    L12,
    /// Nonstandard bracket of `K_(1,2)`.
    Pov,
    /// The entries of the `L_(2,1)` bracket as commonly printed.
    BracPrinted,
    /// All ten entries of the `L_(2,1)` bracket.
    BracFull,
    /// One-constraint second bracket of `L_(2,1)`, printed entries only.
    Gd2Printed,
}

impl KnownTable {
    pub const ALL: [KnownTable; 5] = [
        KnownTable::L12,
        KnownTable::Pov,
        KnownTable::BracPrinted,
        KnownTable::BracFull,
        KnownTable::Gd2Printed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KnownTable::L12 => "l12",
            KnownTable::Pov => "pov",
            KnownTable::BracPrinted => "brac",
            KnownTable::BracFull => "brac-full",
            KnownTable::Gd2Printed => "gd2-comparison",
        }
    }

    pub fn from_name(s: &str) -> Option<KnownTable> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn source(self) -> &'static str {
        match self {
            KnownTable::L12 => include_str!("../../tables/gd2_L12.txt"),
            KnownTable::Pov => include_str!("../../tables/pov_K12.txt"),
            KnownTable::BracPrinted => include_str!("../../tables/brac_L21_printed.txt"),
            KnownTable::BracFull => include_str!("../../tables/brac_L21_full.txt"),
            KnownTable::Gd2Printed => include_str!("../../tables/gd2_L21_printed.txt"),
        }
    }

    pub fn load(self, ctx: &mut Context) -> Result<BracketMatrix> {
        BracketMatrix::from_text(ctx, self.source())
    }

    /// The Lax family whose fields the table uses.
    pub fn family(self, ctx: &mut Context) -> LaxFamily {
        match self {
            KnownTable::L12 => LaxFamily::standard(ctx, 1, 2),
            KnownTable::Pov => LaxFamily::nonstandard(ctx, 1, 2),
            _ => LaxFamily::with_u1(ctx, 2, 1),
        }
    }
}

/// `{φi,φj} = -(φi∂⁻¹φj + φj∂⁻¹φi)`, the same for `ψ`, and
/// `{φi,ψj} = δij L + φi∂⁻¹ψj` on `L_(1,M)`.
pub fn one_constraint_table(family: &LaxFamily) -> Result<BracketMatrix> {
    if family.order != 1 || !family.coeffs.is_empty() || family.dinv_field.is_some() {
        return Err(Error::Shape(format!(
            "{} is not of the form L(1,M)",
            family.name
        )));
    }
    let l = family.template();
    let v = DiffExpr::var;
    let mut t = BracketMatrix::new(family.fields.clone());
    let sym = |a: &DiffExpr, b: &DiffExpr| {
        -(&PsiDO::dinv(a.clone(), b.clone()) + &PsiDO::dinv(b.clone(), a.clone()))
    };
    for (i, (phi_i, psi_i)) in family.pairs.iter().enumerate() {
        for (j, (phi_j, psi_j)) in family.pairs.iter().enumerate() {
            let mut pp = PsiDO::dinv(v(*phi_i), v(*psi_j));
            if i == j {
                pp = &pp + &l;
            }
            t.set_by(*phi_i, *psi_j, pp)?;
            if i <= j {
                t.set_by(*phi_i, *phi_j, sym(&v(*phi_i), &v(*phi_j)))?;
                t.set_by(*psi_i, *psi_j, sym(&v(*psi_i), &v(*psi_j)))?;
            }
        }
    }
    Ok(t)
}

/// Bracket of the third map `X ↦ [L, ∫res[L,X]]` as `-T∂⁻¹T*`, where `T`
/// is the column of coordinates of `[L, h]`.
pub fn gd3_table(ctx: &mut Context, family: &LaxFamily) -> Result<BracketMatrix> {
    let h = ctx.var("h");
    let l = family.template();
    let hop = PsiDO::func(DiffExpr::var(h));
    let coords = family.coordinates_of(&l.commutator(&hop))?;
    let cols: Vec<PsiDO> = family
        .fields
        .iter()
        .map(|g| frechet(&coords.get(g).cloned().unwrap_or_default(), h))
        .collect();
    let dinv = PsiDO::dinv(DiffExpr::one(), DiffExpr::one());
    let mut t = BracketMatrix::new(family.fields.clone());
    for i in 0..cols.len() {
        for j in i..cols.len() {
            let e = cols[i].compose(&dinv).compose(&cols[j].adjoint());
            t.set(i, j, -e);
        }
    }
    Ok(t)
}
