//! Hamiltonian maps `X ↦ Θ(X)` from covectors to tangent operators.

use crate::diffring::{antiderivative, q, DiffExpr, Q};
use crate::psido::PsiDO;

/// `res[A, X]`, computed without forming products of two dyads.
pub fn res_commutator(a: &PsiDO, x: &PsiDO) -> DiffExpr {
    &a.residue_of_product(x) - &x.residue_of_product(a)
}

/// Commutator of `a` with the multiplication operator `f`.
fn commutator_with(a: &PsiDO, f: &DiffExpr) -> PsiDO {
    let fo = PsiDO::func(f.clone());
    &a.compose(&fo) - &fo.compose(a)
}

/// `(LX)_+ L - L (XL)_+`.
pub fn gd2(l: &PsiDO, x: &PsiDO) -> PsiDO {
    &l.compose_plus(x).compose(l) - &l.compose(&x.compose_plus(l))
}

/// `[L, ∫ res[L, X]]`.
pub fn gd3(l: &PsiDO, x: &PsiDO) -> PsiDO {
    let w = antiderivative(&res_commutator(l, x));
    commutator_with(l, &w)
}

/// Second map with the Dirac term `(1/N)[L, ∫ res[L, X]]`.
pub fn gd2_dirac(l: &PsiDO, x: &PsiDO, n: u32) -> PsiDO {
    &gd2(l, x) + &gd3(l, x).scale(&(Q::from_integer(1.into()) / q(n as i64)))
}

/// `Ω = GD2 + GD3`.
pub fn omega_map(l: &PsiDO, x: &PsiDO) -> PsiDO {
    &gd2(l, x) + &gd3(l, x)
}

/// Nonstandard second structure
/// `(KX)_+K - K(XK)_+ + [K, (KX)_0] + ∂⁻¹res[K,X] K + [K, ∫res[K,X]]`.
pub fn ns_map(k: &PsiDO, x: &PsiDO) -> PsiDO {
    let kx_plus = k.compose_plus(x);
    let rho = res_commutator(k, x);
    let mut out = &kx_plus.compose(k) - &k.compose(&x.compose_plus(k));
    out = &out + &commutator_with(k, &kx_plus.coeff(0));
    out = &out + &PsiDO::dinv(DiffExpr::one(), rho.clone()).compose(k);
    &out + &commutator_with(k, &antiderivative(&rho))
}

/// The nonstandard map with the third term read literally as `[K, KX]`.
pub fn ns_map_literal(k: &PsiDO, x: &PsiDO) -> PsiDO {
    let kx = k.compose(x);
    let rho = res_commutator(k, x);
    let mut out = &k.compose_plus(x).compose(k) - &k.compose(&x.compose_plus(k));
    out = &out + &k.commutator(&kx);
    out = &out + &PsiDO::dinv(DiffExpr::one(), rho.clone()).compose(k);
    &out + &commutator_with(k, &antiderivative(&rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianMap {
    Gd2,
    /// Second map with the Dirac term for a Lax operator of the given order.
    Gd2Dirac(u32),
    Gd3,
    Omega,
    Ns,
    NsLiteral,
}

impl HamiltonianMap {
    pub fn apply(self, l: &PsiDO, x: &PsiDO) -> PsiDO {
        match self {
            HamiltonianMap::Gd2 => gd2(l, x),
            HamiltonianMap::Gd2Dirac(n) => gd2_dirac(l, x, n),
            HamiltonianMap::Gd3 => gd3(l, x),
            HamiltonianMap::Omega => omega_map(l, x),
            HamiltonianMap::Ns => ns_map(l, x),
            HamiltonianMap::NsLiteral => ns_map_literal(l, x),
        }
    }

    pub fn name(self) -> String {
        match self {
            HamiltonianMap::Gd2 => "GD2".into(),
            HamiltonianMap::Gd2Dirac(n) => format!("GD2+Dirac(N={n})"),
            HamiltonianMap::Gd3 => "GD3".into(),
            HamiltonianMap::Omega => "Omega".into(),
            HamiltonianMap::Ns => "NS".into(),
            HamiltonianMap::NsLiteral => "NS(literal [K,KX])".into(),
        }
    }
}
