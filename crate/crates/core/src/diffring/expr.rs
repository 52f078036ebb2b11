use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::{Context, Gen};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Multiplicative building block of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `g^(k)`, the k-th derivative of a generator.
    Jet(Gen, u32),
    /// Formal antiderivative `J(m)` of a reduced monomial; `J(m)' = m`.
    Prim(Box<Monomial>),
}

/// Product of atoms times an optional exp-integral factor `E(g)`.
///
/// Negative exponents are only admitted on order-0 jets of invertible
/// generators; `E(g)` is always a unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: BTreeMap<Atom, i32>,
    exp: Option<Box<DiffExpr>>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // J-heavy monomials rank highest so reduction eliminates them first.
        self.prim_weight()
            .cmp(&other.prim_weight())
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| self.factors.cmp(&other.factors))
            .then_with(|| self.exp.cmp(&other.exp))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(a, 1);
        Monomial { factors, exp: None }
    }

    pub fn jet(g: Gen, k: u32) -> Self {
        Self::atom(Atom::Jet(g, k))
    }

    pub fn exp_of(g: &DiffExpr) -> Self {
        Monomial {
            factors: BTreeMap::new(),
            exp: if g.is_zero() {
                None
            } else {
                Some(Box::new(g.clone()))
            },
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp.is_none()
    }

    pub fn degree(&self) -> i32 {
        self.factors.values().sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Atom, i32)> {
        self.factors.iter().map(|(a, &e)| (a, e))
    }

    pub fn exponent_of(&self, a: &Atom) -> i32 {
        self.factors.get(a).copied().unwrap_or(0)
    }

    pub fn exp_part(&self) -> Option<&DiffExpr> {
        self.exp.as_deref()
    }

    fn prim_weight(&self) -> i32 {
        self.factors
            .iter()
            .map(|(a, &e)| match a {
                Atom::Prim(x) => e * (1 + x.prim_weight()),
                _ => 0,
            })
            .sum()
    }

    pub fn has_prim(&self) -> bool {
        self.factors.keys().any(|a| matches!(a, Atom::Prim(_)))
    }

    /// True when no `J` or `E` symbol occurs.
    pub fn is_polynomial(&self) -> bool {
        self.exp.is_none() && !self.has_prim()
    }

    pub fn max_order(&self) -> u32 {
        self.factors
            .keys()
            .filter_map(|a| match a {
                Atom::Jet(_, k) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = self.factors.clone();
        for (a, e) in &other.factors {
            let slot = factors.entry(a.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                factors.remove(a);
            }
        }
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(g), None) | (None, Some(g)) => Some(g.clone()),
            (Some(g), Some(h)) => {
                let s = g.as_ref() + h.as_ref();
                if s.is_zero() {
                    None
                } else {
                    Some(Box::new(s))
                }
            }
        };
        Monomial { factors, exp }
    }

    /// Multiplies in `a^e` (e may be negative).
    pub fn with_power(&self, a: &Atom, e: i32) -> Monomial {
        let mut out = self.clone();
        let slot = out.factors.entry(a.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            out.factors.remove(a);
        }
        out
    }

    /// Whether every exponent is admissible (negative powers only on
    /// order-0 jets of invertible generators).
    pub fn is_admissible(&self) -> bool {
        self.factors
            .iter()
            .all(|(a, &e)| e > 0 || matches!(a, Atom::Jet(g, 0) if g.is_invertible()))
    }

    /// `self / other` when the quotient is admissible.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let inv = other.formal_inverse();
        let out = self.mul(&inv);
        out.is_admissible().then_some(out)
    }

    fn formal_inverse(&self) -> Monomial {
        Monomial {
            factors: self.factors.iter().map(|(a, &e)| (a.clone(), -e)).collect(),
            exp: self.exp.as_ref().map(|g| Box::new(-g.as_ref())),
        }
    }

    /// A monomial is a unit when it is built from invertible order-0 jets
    /// and `E` symbols only.
    pub fn is_unit(&self) -> bool {
        self.factors
            .keys()
            .all(|a| matches!(a, Atom::Jet(g, 0) if g.is_invertible()))
    }

    pub fn inverse(&self) -> Option<Monomial> {
        self.is_unit().then(|| self.formal_inverse())
    }

    pub fn derivative(&self) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (a, &e) in &self.factors {
            let rest = self.with_power(a, -1);
            match a {
                Atom::Jet(g, k) => {
                    let m = rest.with_power(&Atom::Jet(*g, k + 1), 1);
                    out.add_term(m, q(e as i64));
                }
                Atom::Prim(inner) => {
                    out.add_term(rest.mul(inner), q(e as i64));
                }
            }
        }
        if let Some(g) = &self.exp {
            out += &(g.as_ref() * &DiffExpr::from_monomial(self.clone()));
        }
        out
    }

    /// Partial derivative with respect to the jet `g^(k)`, treating every
    /// other atom as independent.
    pub fn partial_jet(&self, g: Gen, k: u32) -> Option<(Q, Monomial)> {
        let a = Atom::Jet(g, k);
        let e = self.exponent_of(&a);
        (e != 0).then(|| (q(e as i64), self.with_power(&a, -1)))
    }
}

/// Normal-form element of the differential fraction field: a finite sum of
/// rational multiples of distinct monomials.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffExpr {
    terms: BTreeMap<Monomial, Q>,
}

impl DiffExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn var(g: Gen) -> Self {
        Self::jet(g, 0)
    }

    pub fn jet(g: Gen, k: u32) -> Self {
        Self::from_monomial(Monomial::jet(g, k))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut e = Self::zero();
        e.add_term(m, Q::one());
        e
    }

    /// `E(g)`: the exp-integral symbol `exp(∫ g)`. `E(0) = 1`.
    pub fn exp(g: &DiffExpr) -> Self {
        Self::from_monomial(Monomial::exp_of(g))
    }

    /// Raw `J(m)` atom for a monomial; callers normally go through
    /// [`crate::diffring::antiderivative`].
    pub fn prim_atom(m: Monomial) -> Self {
        Self::from_monomial(Monomial::atom(Atom::Prim(Box::new(m))))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_single(&self) -> Option<(&Monomial, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Q) -> DiffExpr {
        if c.is_zero() {
            return DiffExpr::zero();
        }
        DiffExpr {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (n, v) in &self.terms {
            out.add_term(n.mul(m), v * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> DiffExpr {
        let mut out = DiffExpr::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (m, c) in &self.terms {
            out += &m.derivative().scale(c);
        }
        out
    }

    pub fn nth_derivative(&self, n: u32) -> DiffExpr {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.derivative();
        }
        out
    }

    /// `[e, e', e'', ..., e^(n)]`.
    pub fn derivatives(&self, n: u32) -> Vec<DiffExpr> {
        let mut v = Vec::with_capacity(n as usize + 1);
        v.push(self.clone());
        for i in 0..n as usize {
            let d = v[i].derivative();
            v.push(d);
        }
        v
    }

    /// Inverse of a unit (single monomial built from invertible generators
    /// and `E` symbols).
    pub fn unit_inverse(&self) -> Option<DiffExpr> {
        let (m, c) = self.as_single()?;
        let inv = m.inverse()?;
        let mut out = DiffExpr::zero();
        out.add_term(inv, c.recip());
        Some(out)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    pub fn has_prim(&self) -> bool {
        self.terms.keys().any(Monomial::has_prim)
    }

    /// Generators occurring in jets anywhere, including inside `J` and `E`.
    pub fn generators(&self) -> std::collections::BTreeSet<Gen> {
        let mut out = std::collections::BTreeSet::new();
        fn walk_m(m: &Monomial, out: &mut std::collections::BTreeSet<Gen>) {
            for (a, _) in m.factors() {
                match a {
                    Atom::Jet(g, _) => {
                        out.insert(*g);
                    }
                    Atom::Prim(inner) => walk_m(inner, out),
                }
            }
            if let Some(g) = m.exp_part() {
                for (n, _) in g.terms() {
                    walk_m(n, out);
                }
            }
        }
        for m in self.terms.keys() {
            walk_m(m, &mut out);
        }
        out
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> ExprDisplay<'a> {
        ExprDisplay { e: self, ctx }
    }
}

impl From<Gen> for DiffExpr {
    fn from(g: Gen) -> Self {
        DiffExpr::var(g)
    }
}

impl<'a> Add<&'a DiffExpr> for &'a DiffExpr {
    type Output = DiffExpr;
    fn add(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffExpr {
    type Output = DiffExpr;
    fn add(mut self, rhs: DiffExpr) -> DiffExpr {
        self += &rhs;
        self
    }
}

impl<'a> Sub<&'a DiffExpr> for &'a DiffExpr {
    type Output = DiffExpr;
    fn sub(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffExpr {
    type Output = DiffExpr;
    fn sub(mut self, rhs: DiffExpr) -> DiffExpr {
        self -= &rhs;
        self
    }
}

impl AddAssign<&DiffExpr> for DiffExpr {
    fn add_assign(&mut self, rhs: &DiffExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&DiffExpr> for DiffExpr {
    fn sub_assign(&mut self, rhs: &DiffExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Neg for &DiffExpr {
    type Output = DiffExpr;
    fn neg(self) -> DiffExpr {
        DiffExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for DiffExpr {
    type Output = DiffExpr;
    fn neg(self) -> DiffExpr {
        -&self
    }
}

impl<'a> Mul<&'a DiffExpr> for &'a DiffExpr {
    type Output = DiffExpr;
    fn mul(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

impl Mul for DiffExpr {
    type Output = DiffExpr;
    fn mul(self, rhs: DiffExpr) -> DiffExpr {
        &self * &rhs
    }
}

pub struct ExprDisplay<'a> {
    e: &'a DiffExpr,
    ctx: &'a Context,
}

impl std::fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_expr(self.e, self.ctx))
    }
}

fn format_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn format_monomial(m: &Monomial, ctx: &Context) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (a, e) in m.factors() {
        let base = match a {
            Atom::Jet(g, k) => {
                let mut s = ctx.name(*g).to_string();
                for _ in 0..*k {
                    s.push('\'');
                }
                s
            }
            Atom::Prim(inner) => {
                format!(
                    "J({})",
                    format_expr(&DiffExpr::from_monomial((**inner).clone()), ctx)
                )
            }
        };
        if e == 1 {
            parts.push(base);
        } else if e > 0 {
            parts.push(format!("{base}^{e}"));
        } else {
            parts.push(format!("{base}^({e})"));
        }
    }
    if let Some(g) = m.exp_part() {
        parts.push(format!("E({})", format_expr(g, ctx)));
    }
    parts.join("*")
}

/// Canonical text: monomials in descending order, `+`/`-` separated.
pub(crate) fn format_expr(e: &DiffExpr, ctx: &Context) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&format_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&format_monomial(m, ctx));
        } else {
            let _ = write!(out, "{}*{}", format_rational(&mag), format_monomial(m, ctx));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz_on_product() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let e = DiffExpr::var(u) * DiffExpr::jet(u, 1);
        let want = DiffExpr::jet(u, 1).pow(2) + DiffExpr::var(u) * DiffExpr::jet(u, 2);
        assert_eq!(e.derivative(), want);
    }

    #[test]
    fn exp_symbol_rules() {
        let mut ctx = Context::new();
        let b = ctx.var("b");
        let eb = DiffExpr::exp(&DiffExpr::var(b));
        assert_eq!(eb.derivative(), DiffExpr::var(b) * eb.clone());
        let prod = &eb * &DiffExpr::exp(&-DiffExpr::var(b));
        assert_eq!(prod, DiffExpr::one());
        assert_eq!(DiffExpr::exp(&DiffExpr::zero()), DiffExpr::one());
    }

    #[test]
    fn quotient_rule_on_invertible() {
        let mut ctx = Context::new();
        let p = ctx.declare("phi1", true);
        let inv = DiffExpr::var(p).unit_inverse().unwrap();
        let v1 = &DiffExpr::jet(p, 1) * &inv;
        // (p'/p)' = p''/p - p'^2/p^2
        let want = &DiffExpr::jet(p, 2) * &inv - &DiffExpr::jet(p, 1).pow(2) * &inv.pow(2);
        assert_eq!(v1.derivative(), want);
        assert_eq!(format_expr(&v1, &ctx), "phi1^(-1)*phi1'");
    }

    #[test]
    fn non_units_have_no_inverse() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        assert!(DiffExpr::var(u).unit_inverse().is_none());
        assert!((DiffExpr::var(u) + DiffExpr::one())
            .unit_inverse()
            .is_none());
    }
}
