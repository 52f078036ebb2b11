//! Pseudo-differential operators with exact dyadic tails.
//!
//! An operator is a finite differential part `Σ c_k ∂^k` (k ≥ 0) plus a sum of
//! rank-one Volterra terms `a ∂⁻¹ b`. Dyads are stored keyed by the monomial
//! of their right leg with all scalar content moved into the left leg; since
//! distinct monomials are linearly independent over the constants, an
//! operator is zero exactly when every differential coefficient and every
//! left leg vanishes. Equality is therefore structural.

mod view;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::diffring::{antiderivative, format_expr, Atom, Context, DiffExpr, Monomial, Q};
use crate::error::{Error, Result};

pub use view::{nth_root, OperatorView};

/// Generalized binomial coefficient `C(n, k)` for integer `n`, `k ≥ 0`.
pub fn binomial(n: i64, k: u32) -> Q {
    let mut num = Q::one();
    for i in 0..k as i64 {
        num *= Q::from_integer((n - i).into());
        num /= Q::from_integer((i + 1).into());
    }
    num
}

/// Equality is equality of operators: when the dyad parts differ
/// structurally and a leg carries `J` symbols, the difference is expanded
/// and tested on as many negative orders as it has dyads (enough by a
/// Wronskian argument), since products of `J` symbols can hide constants.
#[derive(Clone, Debug, Default)]
pub struct PsiDO {
    diff: BTreeMap<u32, DiffExpr>,
    dyads: BTreeMap<Monomial, DiffExpr>,
}

/// Which part of an operator to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// Differential part, orders ≥ 0.
    Plus,
    /// Integral (dyadic) part.
    Minus,
    /// Orders ≥ 1.
    Geq1,
    /// The order-0 coefficient, as a multiplication operator.
    Order0,
}

impl PsiDO {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::func(DiffExpr::one())
    }

    pub fn func(f: DiffExpr) -> Self {
        let mut op = Self::zero();
        op.add_diff(0, f);
        op
    }

    /// `∂^k`.
    pub fn del(k: u32) -> Self {
        let mut op = Self::zero();
        op.add_diff(k, DiffExpr::one());
        op
    }

    /// `c ∂^k`.
    pub fn term(c: DiffExpr, k: u32) -> Self {
        let mut op = Self::zero();
        op.add_diff(k, c);
        op
    }

    /// `left ∂⁻¹ right`.
    pub fn dinv(left: DiffExpr, right: DiffExpr) -> Self {
        let mut op = Self::zero();
        op.add_dyad(&left, &right);
        op
    }

    /// Exact inverse of `∂ - b`, namely `E(b) ∂⁻¹ E(-b)`.
    pub fn invert_monic_linear(b: &DiffExpr) -> Self {
        Self::dinv(DiffExpr::exp(b), DiffExpr::exp(&-b))
    }

    pub fn add_diff(&mut self, k: u32, c: DiffExpr) {
        if c.is_zero() {
            return;
        }
        let slot = self.diff.entry(k).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.diff.remove(&k);
        }
    }

    pub fn add_dyad(&mut self, left: &DiffExpr, right: &DiffExpr) {
        if left.is_zero() {
            return;
        }
        for (m, c) in right.terms() {
            let l = left.scale(c);
            let slot = self.dyads.entry(m.clone()).or_default();
            *slot += &l;
            if slot.is_zero() {
                self.dyads.remove(m);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.diff.is_empty() && self.dyads_vanish()
    }

    fn dyads_vanish(&self) -> bool {
        if self.dyads.is_empty() {
            return true;
        }
        let hidden = self.dyads.iter().any(|(m, l)| m.has_prim() || l.has_prim());
        if !hidden {
            return false;
        }
        let dyads = split_prim_products(&self.dyads);
        if dyads.is_empty() {
            return true;
        }
        if !dyads.iter().any(|(m, l)| m.has_prim() || l.has_prim()) {
            return false;
        }
        // Order -(k+1) carries Σ a b^(k) up to sign; stop at the first nonzero.
        let mut legs: Vec<(&DiffExpr, DiffExpr)> = dyads
            .iter()
            .map(|(m, l)| (l, DiffExpr::from_monomial(m.clone())))
            .collect();
        for _ in 0..legs.len() {
            let mut c = DiffExpr::zero();
            for (l, r) in &legs {
                c += &(*l * r);
            }
            if !c.is_zero() {
                return false;
            }
            for (_, r) in legs.iter_mut() {
                *r = r.derivative();
            }
        }
        true
    }

    pub fn diff_terms(&self) -> impl DoubleEndedIterator<Item = (u32, &DiffExpr)> {
        self.diff.iter().map(|(k, c)| (*k, c))
    }

    /// Dyads as `(left, right-monomial)` pairs.
    pub fn dyads(&self) -> impl Iterator<Item = (&DiffExpr, &Monomial)> {
        self.dyads.iter().map(|(m, l)| (l, m))
    }

    pub fn dyad_count(&self) -> usize {
        self.dyads.len()
    }

    pub fn coeff(&self, k: u32) -> DiffExpr {
        self.diff.get(&k).cloned().unwrap_or_default()
    }

    /// Highest order of the differential part, `-1` for purely integral
    /// operators and `None` for zero.
    pub fn order(&self) -> Option<i64> {
        if let Some((&k, _)) = self.diff.iter().next_back() {
            Some(k as i64)
        } else if self.dyads.is_empty() {
            None
        } else {
            Some(-1)
        }
    }

    pub fn is_differential(&self) -> bool {
        self.dyads.is_empty()
    }

    pub fn project(&self, part: Part) -> PsiDO {
        match part {
            Part::Plus => PsiDO {
                diff: self.diff.clone(),
                dyads: BTreeMap::new(),
            },
            Part::Minus => PsiDO {
                diff: BTreeMap::new(),
                dyads: self.dyads.clone(),
            },
            Part::Geq1 => PsiDO {
                diff: self.diff.range(1..).map(|(k, c)| (*k, c.clone())).collect(),
                dyads: BTreeMap::new(),
            },
            Part::Order0 => PsiDO::func(self.coeff(0)),
        }
    }

    pub fn plus(&self) -> PsiDO {
        self.project(Part::Plus)
    }

    pub fn minus(&self) -> PsiDO {
        self.project(Part::Minus)
    }

    pub fn geq1(&self) -> PsiDO {
        self.project(Part::Geq1)
    }

    pub fn order0(&self) -> DiffExpr {
        self.coeff(0)
    }

    /// Coefficient of `∂⁻¹`.
    pub fn residue(&self) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (m, l) in &self.dyads {
            out += &l.mul_monomial(m, &Q::one());
        }
        out
    }

    /// `f ∘ self`.
    pub fn left_mul(&self, f: &DiffExpr) -> PsiDO {
        PsiDO {
            diff: self
                .diff
                .iter()
                .map(|(k, c)| (*k, f * c))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            dyads: self
                .dyads
                .iter()
                .map(|(m, l)| (m.clone(), f * l))
                .filter(|(_, l)| !l.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> PsiDO {
        self.left_mul(&DiffExpr::constant(c.clone()))
    }

    /// Maps every coefficient and leg through `f`. Right legs are re-split
    /// into monomials afterwards.
    pub fn map_coefficients(&self, mut f: impl FnMut(&DiffExpr) -> DiffExpr) -> PsiDO {
        let mut out = PsiDO::zero();
        for (k, c) in &self.diff {
            out.add_diff(*k, f(c));
        }
        for (m, l) in &self.dyads {
            out.add_dyad(&f(l), &f(&DiffExpr::from_monomial(m.clone())));
        }
        out
    }

    pub fn compose(&self, other: &PsiDO) -> PsiDO {
        mul_parts(self, other, true, true)
    }

    /// `(self ∘ other)_+` without forming the dyad products it discards.
    pub fn compose_plus(&self, other: &PsiDO) -> PsiDO {
        mul_parts(self, other, false, false).plus()
    }

    /// `res(self ∘ other)`; products of two dyads have order ≤ -2 and are skipped.
    pub fn residue_of_product(&self, other: &PsiDO) -> DiffExpr {
        mul_parts(self, other, false, true).residue()
    }

    pub fn commutator(&self, other: &PsiDO) -> PsiDO {
        &self.compose(other) - &other.compose(self)
    }

    pub fn power(&self, n: u32) -> PsiDO {
        let mut out = PsiDO::one();
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    /// Formal adjoint: `∂* = -∂`, `f* = f`, `(AB)* = B*A*`.
    pub fn adjoint(&self) -> PsiDO {
        let mut out = PsiDO::zero();
        for (&k, c) in &self.diff {
            let ds = c.derivatives(k);
            let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
            for l in 0..=k {
                out.add_diff(
                    k - l,
                    ds[l as usize].scale(&(binomial(k as i64, l) * &sign)),
                );
            }
        }
        for (m, l) in &self.dyads {
            out.add_dyad(&-DiffExpr::from_monomial(m.clone()), l);
        }
        out
    }

    /// Action on a function: differential part acts classically, a dyad
    /// `a∂⁻¹b` sends `f` to `a·∫(b f)`.
    pub fn apply(&self, f: &DiffExpr) -> DiffExpr {
        let top = self.diff.keys().next_back().copied().unwrap_or(0);
        let ds = f.derivatives(top);
        let mut out = DiffExpr::zero();
        for (&k, c) in &self.diff {
            out += &(c * &ds[k as usize]);
        }
        for (m, l) in &self.dyads {
            let inner = f.mul_monomial(m, &Q::one());
            out += &(l * &antiderivative(&inner));
        }
        out
    }

    /// `g⁻¹ ∘ self ∘ g` for a unit `g`.
    pub fn conjugate_by(&self, g: &DiffExpr) -> Result<PsiDO> {
        let inv = g
            .unit_inverse()
            .ok_or_else(|| Error::NotAUnit(format!("{g:?}")))?;
        Ok(PsiDO::func(inv).compose(&self.compose(&PsiDO::func(g.clone()))))
    }

    pub fn map_exprs_mut(&mut self, f: impl Fn(&DiffExpr) -> DiffExpr) {
        *self = self.map_coefficients(f);
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> OpDisplay<'a> {
        OpDisplay { op: self, ctx }
    }
}

/// Core product. `dyad_dyad` enables the `∂⁻¹f∂⁻¹` rewrite; `want_minus`
/// keeps dyadic output of the other pairings.
fn mul_parts(a: &PsiDO, b: &PsiDO, dyad_dyad: bool, want_minus: bool) -> PsiDO {
    let mut out = PsiDO::zero();
    let a_top = a.diff.keys().next_back().copied().unwrap_or(0);

    // derivative tables of b's coefficients and right-leg monomials
    let b_diff_ders: BTreeMap<u32, Vec<DiffExpr>> = b
        .diff
        .iter()
        .map(|(k, c)| (*k, c.derivatives(a_top)))
        .collect();

    // ∂^i c ∂^j
    for (&i, ac) in &a.diff {
        for &j in b.diff.keys() {
            let ds = &b_diff_ders[&j];
            for l in 0..=i {
                let coef = binomial(i as i64, l);
                out.add_diff(i + j - l, (ac * &ds[l as usize]).scale(&coef));
            }
        }
    }

    // a∂^i ∘ c∂⁻¹m = Σ_{l<i} C(i,l) a c^(l) ∂^{i-l-1} m + a c^(i) ∂⁻¹ m
    if !b.dyads.is_empty() && !a.diff.is_empty() {
        for (m, c) in &b.dyads {
            let cds = c.derivatives(a_top);
            let mexpr = DiffExpr::from_monomial(m.clone());
            let mds = mexpr.derivatives(a_top.saturating_sub(1));
            for (&i, ac) in &a.diff {
                for l in 0..i {
                    let p = i - l - 1;
                    let pref = (ac * &cds[l as usize]).scale(&binomial(i as i64, l));
                    for s in 0..=p {
                        out.add_diff(
                            p - s,
                            (&pref * &mds[s as usize]).scale(&binomial(p as i64, s)),
                        );
                    }
                }
                if want_minus {
                    out.add_dyad(&(ac * &cds[i as usize]), &mexpr);
                }
            }
        }
    }

    // c∂⁻¹m ∘ b∂^j = Σ_{l<j} (-1)^l c h^(l) ∂^{j-1-l} + (-1)^j c ∂⁻¹ h^(j), h = m b
    if !a.dyads.is_empty() && !b.diff.is_empty() {
        for (m, c) in &a.dyads {
            for (&j, bc) in &b.diff {
                let h = bc.mul_monomial(m, &Q::one());
                let hds = h.derivatives(j);
                for l in 0..j {
                    let t = if l % 2 == 0 { c.clone() } else { -c };
                    out.add_diff(j - 1 - l, &t * &hds[l as usize]);
                }
                if want_minus {
                    let t = if j % 2 == 0 { c.clone() } else { -c };
                    out.add_dyad(&t, &hds[j as usize]);
                }
            }
        }
    }

    // c∂⁻¹m ∘ d∂⁻¹n = c P ∂⁻¹ n - c ∂⁻¹ P n,  P = ∫ m d
    if dyad_dyad {
        for (m, c) in &a.dyads {
            for (n, d) in &b.dyads {
                let p = antiderivative(&d.mul_monomial(m, &Q::one()));
                if p.is_zero() {
                    continue;
                }
                let nexpr = DiffExpr::from_monomial(n.clone());
                out.add_dyad(&(c * &p), &nexpr);
                out.add_dyad(&-c, &(&p * &nexpr));
            }
        }
    }
    out
}

/// Rewrites right legs `J(x)J(y)w` as `(∫xJ(y) + ∫yJ(x))w` plus `c·w`, where
/// `c = J(x)J(y) - ∫xJ(y) - ∫yJ(x)` has zero derivative and so moves to the
/// left leg. The result is the same operator; most hidden constants from
/// composition cancel structurally afterwards.
fn split_prim_products(dyads: &BTreeMap<Monomial, DiffExpr>) -> BTreeMap<Monomial, DiffExpr> {
    const MAX_STEPS: usize = 400;
    let mut out = dyads.clone();
    let mut stuck: BTreeSet<Monomial> = BTreeSet::new();
    for _ in 0..MAX_STEPS {
        let Some((m, pair)) = out
            .keys()
            .filter(|m| !stuck.contains(*m))
            .find_map(|m| prim_pair(m).map(|p| (m.clone(), p)))
        else {
            break;
        };
        let (x, y) = pair;
        let jx = Atom::Prim(Box::new(x.clone()));
        let jy = Atom::Prim(Box::new(y.clone()));
        let jxy = Monomial::one().with_power(&jx, 1).with_power(&jy, 1);
        let w = m.with_power(&jx, -1).with_power(&jy, -1);
        let a = antiderivative(&DiffExpr::from_monomial(x.with_power(&jy, 1)))
            + antiderivative(&DiffExpr::from_monomial(y.with_power(&jx, 1)));
        if !a.coeff(&jxy).is_zero() {
            stuck.insert(m);
            continue;
        }
        let c = &DiffExpr::from_monomial(jxy) - &a;
        let left = out.remove(&m).expect("key present");
        let mut op = PsiDO::zero();
        op.dyads = out;
        op.add_dyad(&left, &a.mul_monomial(&w, &Q::one()));
        op.add_dyad(&(&left * &c), &DiffExpr::from_monomial(w));
        out = op.dyads;
    }
    out
}

/// Two `J` factors of `m` (the same one twice if squared).
fn prim_pair(m: &Monomial) -> Option<(Monomial, Monomial)> {
    let mut prims = m.factors().filter_map(|(a, e)| match a {
        Atom::Prim(x) => Some(((**x).clone(), e)),
        _ => None,
    });
    let (x, e) = prims.next()?;
    if e >= 2 {
        return Some((x.clone(), x));
    }
    prims.next().map(|(y, _)| (x, y))
}

impl PartialEq for PsiDO {
    fn eq(&self, other: &Self) -> bool {
        if self.diff != other.diff {
            return false;
        }
        self.dyads == other.dyads || (self - other).dyads_vanish()
    }
}

impl Eq for PsiDO {}

impl<'a> Add<&'a PsiDO> for &'a PsiDO {
    type Output = PsiDO;
    fn add(self, rhs: &PsiDO) -> PsiDO {
        let mut out = self.clone();
        for (k, c) in &rhs.diff {
            out.add_diff(*k, c.clone());
        }
        for (m, l) in &rhs.dyads {
            let slot = out.dyads.entry(m.clone()).or_default();
            *slot += l;
            if slot.is_zero() {
                out.dyads.remove(m);
            }
        }
        out
    }
}

impl Add for PsiDO {
    type Output = PsiDO;
    fn add(self, rhs: PsiDO) -> PsiDO {
        &self + &rhs
    }
}

impl Neg for &PsiDO {
    type Output = PsiDO;
    fn neg(self) -> PsiDO {
        self.scale(&-Q::one())
    }
}

impl Neg for PsiDO {
    type Output = PsiDO;
    fn neg(self) -> PsiDO {
        -&self
    }
}

impl<'a> Sub<&'a PsiDO> for &'a PsiDO {
    type Output = PsiDO;
    fn sub(self, rhs: &PsiDO) -> PsiDO {
        self + &(-rhs)
    }
}

impl Sub for PsiDO {
    type Output = PsiDO;
    fn sub(self, rhs: PsiDO) -> PsiDO {
        &self - &rhs
    }
}

impl<'a> Mul<&'a PsiDO> for &'a PsiDO {
    type Output = PsiDO;
    fn mul(self, rhs: &PsiDO) -> PsiDO {
        self.compose(rhs)
    }
}

impl Mul for PsiDO {
    type Output = PsiDO;
    fn mul(self, rhs: PsiDO) -> PsiDO {
        self.compose(&rhs)
    }
}

pub struct OpDisplay<'a> {
    op: &'a PsiDO,
    ctx: &'a Context,
}

impl std::fmt::Display for OpDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_op(self.op, self.ctx))
    }
}

fn wrap(e: &DiffExpr, ctx: &Context) -> String {
    let s = format_expr(e, ctx);
    if e.len() > 1 {
        format!("({s})")
    } else {
        s
    }
}

/// Canonical operator text in the parser's grammar: differential terms by
/// descending order, then dyads as `dinv(left, right)`.
pub fn format_op(op: &PsiDO, ctx: &Context) -> String {
    if op.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<String> = Vec::new();
    for (k, c) in op.diff.iter().rev() {
        let d = match k {
            0 => String::new(),
            1 => "del".to_string(),
            _ => format!("del^{k}"),
        };
        let t = if d.is_empty() {
            wrap(c, ctx)
        } else if c.as_constant() == Some(Q::one()) {
            d
        } else if c.as_constant() == Some(-Q::one()) {
            format!("-{d}")
        } else {
            format!("{}*{d}", wrap(c, ctx))
        };
        terms.push(t);
    }
    for (m, l) in op.dyads.iter().rev() {
        terms.push(format!(
            "dinv({}, {})",
            format_expr(l, ctx),
            format_expr(&DiffExpr::from_monomial(m.clone()), ctx)
        ));
    }
    join_signed(&terms)
}

pub(crate) fn join_signed(terms: &[String]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

#[cfg(test)]
mod tests;
