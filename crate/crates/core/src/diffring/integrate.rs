//! Reduction modulo total derivatives.
//!
//! For an expression `p` we look for `P` and a remainder `R` with
//! `p = P' + R`, where `R` is the unique element of `p + image(∂)` that
//! avoids every leading monomial of `image(∂)`. The image is spanned by the
//! derivatives of "preimage" monomials; the candidate set is the connected
//! component of `p`'s monomials under the preimage/image incidence, which
//! makes the remainder canonical (elimination decouples across components).

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use num_traits::Zero;

use super::expr::{Atom, DiffExpr, Monomial, Q};

/// Closure size above which reduction gives up and keeps `p` as remainder.
const MAX_CLOSURE: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// `P` with `p = P' + remainder`.
    pub primitive: DiffExpr,
    pub remainder: DiffExpr,
    /// False when the candidate closure overflowed; the remainder is then `p`
    /// itself and not canonical.
    pub complete: bool,
}

thread_local! {
    static CACHE: RefCell<HashMap<DiffExpr, Rc<Reduction>>> = RefCell::new(HashMap::new());
}

pub fn reduce(p: &DiffExpr) -> Rc<Reduction> {
    if let Some(hit) = CACHE.with(|c| c.borrow().get(p).cloned()) {
        return hit;
    }
    let red = Rc::new(reduce_uncached(p));
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 200_000 {
            c.clear();
        }
        c.insert(p.clone(), red.clone());
    });
    red
}

/// `P` with `P' = e`, if `e` is an exact total derivative.
pub fn integrate_total_derivative(e: &DiffExpr) -> Option<DiffExpr> {
    let red = reduce(e);
    (red.complete && red.remainder.is_zero()).then(|| red.primitive.clone())
}

/// Right inverse of differentiation: exact part plus `J` symbols of the
/// canonical remainder monomials.
pub fn antiderivative(e: &DiffExpr) -> DiffExpr {
    let red = reduce(e);
    let mut out = red.primitive.clone();
    for (m, c) in red.remainder.terms() {
        out += &DiffExpr::prim_atom(m.clone()).scale(c);
    }
    out
}

fn collect_prims(m: &Monomial, out: &mut BTreeSet<Monomial>) {
    for (a, _) in m.factors() {
        if let Atom::Prim(inner) = a {
            if out.insert((**inner).clone()) {
                collect_prims(inner, out);
            }
        }
    }
}

fn preimages(m: &Monomial, prims: &BTreeSet<Monomial>) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (a, _) in m.factors() {
        if let Atom::Jet(g, k) = a {
            if *k >= 1 {
                let n = m.with_power(a, -1).with_power(&Atom::Jet(*g, k - 1), 1);
                if n.is_admissible() {
                    out.push(n);
                }
            }
        }
    }
    for r in prims {
        // J(1) divides everything; only powers of it are useful preimages.
        if r.is_one()
            && !m
                .factors()
                .all(|(a, _)| matches!(a, Atom::Prim(x) if x.is_one()))
        {
            continue;
        }
        if let Some(n) = m.div(r) {
            out.push(n.with_power(&Atom::Prim(Box::new(r.clone())), 1));
        }
    }
    if let Some(h) = m.exp_part() {
        for (t, _) in h.terms() {
            if t.exp_part().is_some() {
                continue;
            }
            if let Some(n) = m.div(t) {
                out.push(n);
            }
        }
    }
    out.retain(|n| !n.is_one());
    out
}

fn leading(e: &DiffExpr) -> Option<(Monomial, Q)> {
    e.terms().next_back().map(|(m, c)| (m.clone(), c.clone()))
}

fn reduce_uncached(p: &DiffExpr) -> Reduction {
    if p.is_zero() {
        return Reduction {
            primitive: DiffExpr::zero(),
            remainder: DiffExpr::zero(),
            complete: true,
        };
    }
    let mut prims = BTreeSet::new();
    for (m, _) in p.terms() {
        collect_prims(m, &mut prims);
    }

    let mut seen: BTreeSet<Monomial> = BTreeSet::new();
    let mut cands: BTreeMap<Monomial, DiffExpr> = BTreeMap::new();
    let mut queue: VecDeque<Monomial> = VecDeque::new();
    for (m, _) in p.terms() {
        if seen.insert(m.clone()) {
            queue.push_back(m.clone());
        }
    }
    while let Some(m) = queue.pop_front() {
        for n in preimages(&m, &prims) {
            if cands.contains_key(&n) {
                continue;
            }
            let d = n.derivative();
            for (t, _) in d.terms() {
                if seen.insert(t.clone()) {
                    queue.push_back(t.clone());
                }
            }
            cands.insert(n, d);
            if seen.len() + cands.len() > MAX_CLOSURE {
                return Reduction {
                    primitive: DiffExpr::zero(),
                    remainder: p.clone(),
                    complete: false,
                };
            }
        }
    }

    // Echelon basis of the image keyed by leading monomial, normalized to 1.
    let mut pivots: BTreeMap<Monomial, (DiffExpr, DiffExpr)> = BTreeMap::new();
    for (n, d) in cands {
        let mut vec = d;
        let mut tag = DiffExpr::from_monomial(n);
        while let Some((lm, lc)) = leading(&vec) {
            if let Some((pv, pt)) = pivots.get(&lm) {
                vec -= &pv.scale(&lc);
                tag -= &pt.scale(&lc);
            } else {
                let inv = lc.recip();
                pivots.insert(lm, (vec.scale(&inv), tag.scale(&inv)));
                break;
            }
        }
    }

    let mut rem = p.clone();
    let mut prim = DiffExpr::zero();
    let mut bound: Option<Monomial> = None;
    loop {
        let next = {
            let it: Box<dyn DoubleEndedIterator<Item = (&Monomial, &Q)>> = match &bound {
                Some(b) => Box::new(rem.terms().filter(move |(m, _)| *m < b)),
                None => Box::new(rem.terms()),
            };
            it.rev()
                .find(|(m, _)| pivots.contains_key(*m))
                .map(|(m, c)| (m.clone(), c.clone()))
        };
        let Some((m, c)) = next else { break };
        let (pv, pt) = &pivots[&m];
        rem -= &pv.scale(&c);
        prim += &pt.scale(&c);
        bound = Some(m);
    }
    // Constants carry no information in a primitive.
    let c0 = prim.coeff(&Monomial::one());
    if !c0.is_zero() {
        prim.add_term(Monomial::one(), -c0);
    }
    debug_assert!(rem.terms().all(|(m, _)| !pivots.contains_key(m)));
    Reduction {
        primitive: prim,
        remainder: rem,
        complete: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffring::expr::qr;
    use crate::diffring::{euler_derivative, Context};

    #[test]
    fn exact_products_integrate() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let v = ctx.var("v");
        let uu = DiffExpr::var(u) * DiffExpr::jet(u, 1);
        assert_eq!(
            integrate_total_derivative(&uu),
            Some(DiffExpr::var(u).pow(2).scale(&qr(1, 2)))
        );
        let uv = DiffExpr::jet(u, 1) * DiffExpr::var(v) + DiffExpr::var(u) * DiffExpr::jet(v, 1);
        assert_eq!(
            integrate_total_derivative(&uv),
            Some(DiffExpr::var(u) * DiffExpr::var(v))
        );
        assert_eq!(integrate_total_derivative(&DiffExpr::var(u).pow(2)), None);
    }

    #[test]
    fn antiderivative_forces_symbol_and_is_right_inverse() {
        let mut ctx = Context::new();
        let qg = ctx.var("q");
        let r = ctx.var("r");
        let q2 = DiffExpr::var(qg).pow(2);
        let a = antiderivative(&q2);
        assert!(a.has_prim());
        assert_eq!(a.derivative(), q2);
        let mixed = DiffExpr::jet(qg, 1) * DiffExpr::var(r)
            + DiffExpr::var(qg) * DiffExpr::jet(r, 1)
            + DiffExpr::jet(qg, 2) * DiffExpr::jet(r, 1);
        let a = antiderivative(&mixed);
        assert_eq!(a.derivative(), mixed);
        assert_eq!(antiderivative(&DiffExpr::zero()), DiffExpr::zero());
    }

    #[test]
    fn remainders_are_canonical_across_representatives() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let v = ctx.var("v");
        // u'v and -uv' differ by (uv)'.
        let a = DiffExpr::jet(u, 1) * DiffExpr::var(v);
        let b = -(DiffExpr::var(u) * DiffExpr::jet(v, 1));
        assert_eq!(reduce(&a).remainder, reduce(&b).remainder);
        let ja = antiderivative(&a);
        let jb = antiderivative(&b);
        assert_eq!(&ja - &jb, DiffExpr::var(u) * DiffExpr::var(v));
    }

    #[test]
    fn exact_iff_euler_vanishes_on_samples() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let v = ctx.var("v");
        let samples = [
            DiffExpr::jet(u, 2) * DiffExpr::var(v).pow(2),
            (DiffExpr::var(u).pow(2) * DiffExpr::jet(v, 1)).derivative(),
            DiffExpr::jet(u, 1) * DiffExpr::jet(v, 1),
            DiffExpr::jet(u, 3) * DiffExpr::var(u),
        ];
        for s in samples {
            let exact = integrate_total_derivative(&s).is_some();
            let euler_zero = euler_derivative(&s, u).is_zero() && euler_derivative(&s, v).is_zero();
            assert_eq!(exact, euler_zero);
        }
    }

    #[test]
    fn exp_weighted_integration() {
        let mut ctx = Context::new();
        let b = ctx.var("b");
        let a = ctx.var("a");
        // (a E(b))' = a' E(b) + a b E(b)
        let e = DiffExpr::exp(&DiffExpr::var(b));
        let target = &DiffExpr::var(a) * &e;
        let d = target.derivative();
        assert_eq!(integrate_total_derivative(&d), Some(target));
        // E(b) itself is not exact in this ring.
        assert!(integrate_total_derivative(&e).is_none());
    }

    #[test]
    fn coordinate_symbol_does_not_blow_up_closure() {
        let mut ctx = Context::new();
        let u = ctx.var("u");
        let x = antiderivative(&DiffExpr::one());
        let target = &x * &DiffExpr::jet(u, 1).pow(2);
        let red = reduce(&target.derivative());
        assert!(red.complete);
        assert!(red.remainder.is_zero());
        assert_eq!(
            integrate_total_derivative(&(x.pow(2) * DiffExpr::int(3)).derivative()),
            Some(x.pow(2) * DiffExpr::int(3))
        );
    }
}
