//! Factorization of Lax operators into first-order factors, the induced
//! Miura substitutions, Kupershmidt-Wilson transfers and free fields.

mod kw;
mod matrix;

use crate::diffring::{antiderivative, Context, DiffExpr, Gen, Substitution};
use crate::error::{Error, Result};
use crate::hierarchy::multiply_by_del;
use crate::psido::{format_op, PsiDO};
use crate::structures::LaxFamily;

pub use kw::{induced_bracket, kw_transfer, printed_miura_comparison, third_bilinear_form};
pub use matrix::{congruence, determinant, diagonalize, ConstantPoissonMatrix, Diagonalization};

/// `[∂⁻¹] (∂-a1)⋯(∂-an) (∂-b1)⁻¹⋯(∂-bm)⁻¹` matched against a Lax family.
#[derive(Clone, Debug)]
pub struct MiuraSpec {
    pub n: usize,
    pub m: usize,
    pub prefix: bool,
    pub a: Vec<Gen>,
    pub b: Vec<Gen>,
    pub family: LaxFamily,
    /// Family fields in terms of the `a`'s and `b`'s.
    pub substitutions: Vec<(Gen, DiffExpr)>,
    pub product: PsiDO,
}

impl MiuraSpec {
    /// `a1..an, b1..bm`, the index order of modified matrices.
    pub fn modified_fields(&self) -> Vec<Gen> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn get(&self, g: Gen) -> Option<&DiffExpr> {
        self.substitutions
            .iter()
            .find(|(h, _)| *h == g)
            .map(|(_, e)| e)
    }

    pub fn subst(&self) -> Substitution {
        Substitution::from_pairs(self.substitutions.iter().cloned())
    }

    pub fn to_text(&self, ctx: &Context) -> String {
        let mut out = format!(
            "{}: n = {}, m = {}{}\n",
            self.family.name,
            self.n,
            self.m,
            if self.prefix {
                ", with dinv prefix"
            } else {
                ""
            }
        );
        for (g, e) in &self.substitutions {
            out.push_str(&format!("{} = {}\n", ctx.name(*g), e.display(ctx)));
        }
        out
    }
}

/// Rank-one pieces of `(∂-b1)⁻¹⋯(∂-bm)⁻¹`, peeled from the right: the
/// factor `j` contributes the pair with index `j`, and earlier pairs keep
/// their right legs while their left legs absorb `E(bj)J(E(-bj)·)`.
fn peel_inverse_factors(b: &[DiffExpr]) -> Vec<(DiffExpr, DiffExpr)> {
    let m = b.len();
    let mut pieces: Vec<(usize, DiffExpr, DiffExpr)> = Vec::new();
    for j in (0..m).rev() {
        let e = DiffExpr::exp(&b[j]);
        let einv = DiffExpr::exp(&-&b[j]);
        let mut new_right = DiffExpr::zero();
        for (_, l, r) in pieces.iter_mut() {
            let jk = antiderivative(&(&einv * l));
            new_right -= &(&jk * r);
            *l = &e * &jk;
        }
        if pieces.is_empty() {
            new_right = einv;
        }
        pieces.push((j, e, new_right));
    }
    pieces.sort_by_key(|(j, _, _)| *j);
    pieces.into_iter().map(|(_, l, r)| (l, r)).collect()
}

/// Expands the factor product and reads off the substitutions.
///
/// Without prefix the target is `L_(n-m, m)` with a `u1` term; with the
/// `∂⁻¹` prefix it is `K_(n-m-1, m+1)`, obtained by inverting `L = ∂K`.
pub fn expand_factorization(
    ctx: &mut Context,
    n: usize,
    m: usize,
    prefix: bool,
) -> Result<MiuraSpec> {
    let order = n as i64 - m as i64 - i64::from(prefix);
    if order < 1 {
        return Err(Error::Shape(format!(
            "n - m{} = {order} is not a positive order",
            if prefix { " - 1" } else { "" }
        )));
    }
    let a: Vec<Gen> = (1..=n).map(|i| ctx.var(&format!("a{i}"))).collect();
    let b: Vec<Gen> = (1..=m).map(|j| ctx.var(&format!("b{j}"))).collect();
    let l_order = (n - m) as u32;

    let mut d = PsiDO::one();
    for &ai in &a {
        d = d.compose(&(&PsiDO::del(1) - &PsiDO::func(DiffExpr::var(ai))));
    }
    let bs: Vec<DiffExpr> = b.iter().map(|g| DiffExpr::var(*g)).collect();
    let pieces = peel_inverse_factors(&bs);
    let mut r = PsiDO::zero();
    for (l, rr) in &pieces {
        r = &r + &PsiDO::dinv(l.clone(), rr.clone());
    }
    if m > 0 {
        let mut direct = PsiDO::one();
        for bj in &bs {
            direct = direct.compose(&PsiDO::invert_monic_linear(bj));
        }
        if direct != r {
            return Err(Error::Decomposition {
                family: format!("({n},{m}) factorization"),
                detail: format!(
                    "peeled inverse factors differ: {}",
                    format_op(&(&direct - &r), ctx)
                ),
            });
        }
    }
    let product = if m > 0 { d.compose(&r) } else { d.clone() };

    let family = LaxFamily::with_u1(ctx, l_order, m as u32);
    let mut substitutions = Vec::new();
    for (k, g) in &family.coeffs {
        substitutions.push((*g, product.coeff(*k)));
    }
    for ((phi, psi), (l, rr)) in family.pairs.iter().zip(&pieces) {
        substitutions.push((*phi, d.apply(l)));
        substitutions.push((*psi, rr.clone()));
    }
    let spec = MiuraSpec {
        n,
        m,
        prefix: false,
        a,
        b,
        family,
        substitutions,
        product,
    };
    check_product(ctx, &spec)?;
    if !prefix {
        return Ok(spec);
    }

    let (kf, lf, change) = multiply_by_del(ctx, order as u32, (m + 1) as u32)?;
    debug_assert_eq!(lf.fields, spec.family.fields);
    let mut s = spec.subst();
    let mut substitutions = Vec::new();
    for g in &kf.fields {
        let e = change
            .inverse
            .iter()
            .find(|(h, _)| h == g)
            .map(|(_, e)| e.clone())
            .ok_or_else(|| Error::Shape("incomplete inverse change".into()))?;
        substitutions.push((*g, s.apply(&e)?));
    }
    let product = PsiDO::dinv(DiffExpr::one(), DiffExpr::one()).compose(&spec.product);
    let spec = MiuraSpec {
        prefix: true,
        family: kf,
        substitutions,
        product,
        ..spec
    };
    check_product(ctx, &spec)?;
    Ok(spec)
}

fn check_product(ctx: &Context, spec: &MiuraSpec) -> Result<()> {
    let shaped = spec.subst().apply_op(&spec.family.template())?;
    if shaped != spec.product {
        return Err(Error::Decomposition {
            family: spec.family.name.clone(),
            detail: format!(
                "factor product is not of the template's shape: {}",
                format_op(&(&spec.product - &shaped), ctx)
            ),
        });
    }
    Ok(())
}

/// `n = N + m + 1`, `m = M - 1` for `K_(N,M) = ∂⁻¹(∂-a1)⋯(∂-an)(∂-b1)⁻¹⋯`.
pub fn factor_counts(big_n: usize, big_m: usize) -> Result<(usize, usize)> {
    if big_n == 0 || big_m == 0 {
        return Err(Error::Config("K(N,M) needs N >= 1 and M >= 1".into()));
    }
    let m = big_m - 1;
    Ok((big_n + m + 1, m))
}
