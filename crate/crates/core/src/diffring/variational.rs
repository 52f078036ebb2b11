//! Euler and Fréchet derivatives, and substitution of fields by expressions.

use std::collections::{BTreeMap, HashMap};

use super::expr::{q, Atom, DiffExpr, Monomial};
use super::integrate::antiderivative;
use super::Gen;
use crate::error::{Error, Result};
use crate::psido::PsiDO;

/// Fréchet operators of one expression, keyed by the field they act on.
pub type LocalOperatorRow = BTreeMap<Gen, PsiDO>;

/// `Σ_k (-∂)^k ∂e/∂g^(k)`. `J` and `E` symbols are treated as constants, so
/// callers should pass local densities.
pub fn euler_derivative(density: &DiffExpr, g: Gen) -> DiffExpr {
    let mut by_order: BTreeMap<u32, DiffExpr> = BTreeMap::new();
    for (m, c) in density.terms() {
        for (a, _) in m.factors() {
            if let Atom::Jet(h, k) = a {
                if *h == g {
                    if let Some((e, rest)) = m.partial_jet(g, *k) {
                        by_order.entry(*k).or_default().add_term(rest, e * c);
                    }
                }
            }
        }
    }
    let mut out = DiffExpr::zero();
    for (k, p) in by_order {
        let d = p.nth_derivative(k);
        if k % 2 == 0 {
            out += &d;
        } else {
            out -= &d;
        }
    }
    out
}

/// Linearization of `e` in the direction of `g`: the operator `D` with
/// `δe = D(δg)`. `J(p)` varies by `∂⁻¹ δp` and `E(h)` by `E(h) ∂⁻¹ δh`.
pub fn frechet(e: &DiffExpr, g: Gen) -> PsiDO {
    let mut out = PsiDO::zero();
    for (m, c) in e.terms() {
        out = &out + &frechet_monomial(m, g).scale(c);
    }
    out
}

fn frechet_monomial(m: &Monomial, g: Gen) -> PsiDO {
    let mut out = PsiDO::zero();
    for (a, e) in m.factors() {
        let rest = DiffExpr::from_monomial(m.with_power(a, -1)).scale(&q(e as i64));
        match a {
            Atom::Jet(h, k) if *h == g => out.add_diff(*k, rest),
            Atom::Jet(..) => {}
            Atom::Prim(inner) => {
                let f = frechet_monomial(inner, g);
                if !f.is_zero() {
                    out = &out + &PsiDO::dinv(rest, DiffExpr::one()).compose(&f);
                }
            }
        }
    }
    if let Some(h) = m.exp_part() {
        let f = frechet(h, g);
        if !f.is_zero() {
            let whole = DiffExpr::from_monomial(m.clone());
            out = &out + &PsiDO::dinv(whole, DiffExpr::one()).compose(&f);
        }
    }
    out
}

/// Fréchet operators of `e` with respect to each of `fields` (zero entries kept).
pub fn frechet_row(e: &DiffExpr, fields: &[Gen]) -> LocalOperatorRow {
    fields.iter().map(|&g| (g, frechet(e, g))).collect()
}

/// Simultaneous replacement of generators by expressions, extended to jets
/// by differentiation, to `J(p)` by antiderivative and to `E(h)` by `E` of
/// the image.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    map: BTreeMap<Gen, DiffExpr>,
    jets: HashMap<(Gen, u32), DiffExpr>,
    monos: HashMap<Monomial, DiffExpr>,
}

impl Substitution {
    pub fn new(map: BTreeMap<Gen, DiffExpr>) -> Self {
        Self {
            map,
            ..Self::default()
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Gen, DiffExpr)>) -> Self {
        Self::new(pairs.into_iter().collect())
    }

    pub fn get(&self, g: Gen) -> Option<&DiffExpr> {
        self.map.get(&g)
    }

    pub fn image(&self) -> &BTreeMap<Gen, DiffExpr> {
        &self.map
    }

    fn jet(&mut self, g: Gen, k: u32) -> DiffExpr {
        if let Some(hit) = self.jets.get(&(g, k)) {
            return hit.clone();
        }
        let v = match self.map.get(&g) {
            None => DiffExpr::jet(g, k),
            Some(e) if k == 0 => e.clone(),
            Some(_) => self.jet(g, k - 1).derivative(),
        };
        self.jets.insert((g, k), v.clone());
        v
    }

    pub fn apply(&mut self, e: &DiffExpr) -> Result<DiffExpr> {
        let mut out = DiffExpr::zero();
        for (m, c) in e.terms() {
            let img = self.monomial(m)?;
            out += &img.scale(c);
        }
        Ok(out)
    }

    fn monomial(&mut self, m: &Monomial) -> Result<DiffExpr> {
        if let Some(hit) = self.monos.get(m) {
            return Ok(hit.clone());
        }
        let mut out = DiffExpr::one();
        for (a, e) in m.factors() {
            let base = match a {
                Atom::Jet(g, k) => self.jet(*g, *k),
                Atom::Prim(inner) => {
                    let p = self.monomial(inner)?;
                    antiderivative(&p)
                }
            };
            let factor = if e < 0 {
                base.unit_inverse()
                    .ok_or_else(|| Error::NotAUnit(format!("{base:?}")))?
                    .pow((-e) as u32)
            } else {
                base.pow(e as u32)
            };
            out = &out * &factor;
        }
        if let Some(h) = m.exp_part() {
            let h = self.apply(h)?;
            out = &out * &DiffExpr::exp(&h);
        }
        self.monos.insert(m.clone(), out.clone());
        Ok(out)
    }

    /// Substitutes into every coefficient and leg of an operator.
    pub fn apply_op(&mut self, op: &PsiDO) -> Result<PsiDO> {
        let mut err = None;
        let out = op.map_coefficients(|c| match self.apply(c) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                DiffExpr::zero()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffring::{qr, Context};

    #[test]
    fn euler_of_kdv_hamiltonian() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let h = DiffExpr::jet(u, 1).pow(2);
        assert_eq!(euler_derivative(&h, u), DiffExpr::jet(u, 2).scale(&q(-2)));
        let h = DiffExpr::var(u).pow(3).scale(&qr(1, 3));
        assert_eq!(euler_derivative(&h, u), DiffExpr::var(u).pow(2));
    }

    #[test]
    fn frechet_of_exp_and_prim() {
        let mut ctx = Context::new();
        let b = ctx.var("b");
        let e = DiffExpr::exp(&-DiffExpr::var(b));
        let f = frechet(&e, b);
        assert_eq!(f, PsiDO::dinv(-&e, DiffExpr::one()));
        let j = antiderivative(&DiffExpr::var(b).pow(2));
        let f = frechet(&j, b);
        assert_eq!(
            f,
            PsiDO::dinv(DiffExpr::one(), DiffExpr::var(b).scale(&q(2)))
        );
    }

    #[test]
    fn substitution_respects_derivatives_and_units() {
        let mut ctx = Context::new();
        let p = ctx.declare("p", true);
        let v = ctx.var("v");
        let mut s = Substitution::from_pairs([(
            v,
            DiffExpr::jet(p, 1) * DiffExpr::var(p).unit_inverse().unwrap(),
        )]);
        let img = s.apply(&DiffExpr::jet(v, 1)).unwrap();
        let direct = s.apply(&DiffExpr::var(v)).unwrap().derivative();
        assert_eq!(img, direct);
        let mut bad = Substitution::from_pairs([(p, DiffExpr::var(v))]);
        assert!(bad
            .apply(&DiffExpr::var(p).unit_inverse().unwrap())
            .is_err());
    }
}
