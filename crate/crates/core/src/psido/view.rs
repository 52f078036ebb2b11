//! Truncated Laurent-series views of operators.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{binomial, PsiDO};
use crate::diffring::{Context, DiffExpr, Q};
use crate::error::{Error, Result};

/// Coefficients `c_k` of `Σ c_k ∂^k`, exact on all orders `≥ low`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorView {
    coeffs: BTreeMap<i64, DiffExpr>,
    low: i64,
}

impl OperatorView {
    pub fn new(low: i64) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            low,
        }
    }

    /// Lowest order on which the view is exact.
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn coeff(&self, k: i64) -> DiffExpr {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, k: i64, c: DiffExpr) {
        if k < self.low || c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    fn add(&mut self, k: i64, c: &DiffExpr) {
        if k < self.low || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &DiffExpr)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowers the exactness bound, forgetting nothing.
    pub fn truncate(&self, low: i64) -> OperatorView {
        let low = low.max(self.low);
        OperatorView {
            coeffs: self
                .coeffs
                .range(low..)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            low,
        }
    }

    /// Product; the result is exact down to
    /// `min over factors of (own low + other's top order)`.
    pub fn mul(&self, other: &OperatorView) -> OperatorView {
        let (Some(ta), Some(tb)) = (self.top(), other.top()) else {
            return OperatorView::new(self.low.max(other.low));
        };
        let low = (self.low + tb).max(other.low + ta);
        let mut out = OperatorView::new(low);
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let mut l = 0u32;
                while i + j - l as i64 >= low {
                    let c = binomial(i, l);
                    if c.is_zero() {
                        break;
                    }
                    let d = b.nth_derivative(l);
                    if d.is_zero() {
                        break;
                    }
                    out.add(i + j - l as i64, &(a * &d).scale(&c));
                    l += 1;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &OperatorView) -> OperatorView {
        let mut out = OperatorView::new(self.low.max(other.low));
        for (&k, c) in &self.coeffs {
            out.add(k, c);
        }
        for (&k, c) in &other.coeffs {
            out.add(k, &-c);
        }
        out
    }

    pub fn power(&self, n: u32) -> OperatorView {
        let mut out = OperatorView::new(i64::MIN / 4);
        out.set(0, DiffExpr::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Differential part as an exact operator.
    pub fn plus(&self) -> PsiDO {
        let mut out = PsiDO::zero();
        for (&k, c) in self.coeffs.range(0..) {
            out.add_diff(k as u32, c.clone());
        }
        out
    }

    /// Orders `≥ 1` as an exact operator.
    pub fn geq1(&self) -> PsiDO {
        let mut out = PsiDO::zero();
        for (&k, c) in self.coeffs.range(1..) {
            out.add_diff(k as u32, c.clone());
        }
        out
    }

    pub fn display(&self, ctx: &Context) -> String {
        let mut parts = Vec::new();
        for (&k, c) in self.coeffs.iter().rev() {
            let cs = crate::diffring::format_expr(c, ctx);
            let cs = if c.len() > 1 { format!("({cs})") } else { cs };
            let d = if k == 1 {
                "del".to_string()
            } else {
                format!("del^{k}")
            };
            parts.push(match (k, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => d,
                (_, "-1") => format!("-{d}"),
                _ => format!("{cs}*{d}"),
            });
        }
        parts.push(format!("O(del^{})", self.low - 1));
        super::join_signed(&parts)
    }
}

impl PsiDO {
    /// Laurent expansion exact down to `∂^{-depth}`: each dyad `a∂⁻¹b`
    /// contributes `Σ_{k≥1} (-1)^{k-1} a b^{(k-1)} ∂^{-k}`.
    pub fn expand_tail(&self, depth: u32) -> OperatorView {
        let mut out = OperatorView::new(-(depth as i64));
        for (k, c) in self.diff_terms() {
            out.add(k as i64, c);
        }
        for (l, m) in self.dyads() {
            let ds = DiffExpr::from_monomial(m.clone()).derivatives(depth.saturating_sub(1));
            for k in 1..=depth {
                let t = l * &ds[(k - 1) as usize];
                let t = if k % 2 == 1 { t } else { -t };
                out.add(-(k as i64), &t);
            }
        }
        out
    }
}

/// `R = ∂ + Σ_{s≥0} r_s ∂^{-s}` with `R^n = a` on all orders `≥ n - depth`.
pub fn nth_root(a: &PsiDO, n: u32, depth: u32) -> Result<OperatorView> {
    if n == 0 || a.order() != Some(n as i64) || a.coeff(n) != DiffExpr::one() {
        return Err(Error::NotMonic(n));
    }
    let n_i = n as i64;
    let target = a.expand_tail(depth.saturating_sub(n).max(1));
    let mut r = OperatorView::new(-(depth as i64));
    r.set(1, DiffExpr::one());
    let inv_n = Q::one() / Q::from_integer(n_i.into());
    for s in 0..depth as i64 {
        let p = r.power(n);
        let k = n_i - 1 - s;
        let diff = &target.coeff(k) - &p.coeff(k);
        r.set(-s, diff.scale(&inv_n));
    }
    Ok(r.truncate(1 - depth as i64))
}
