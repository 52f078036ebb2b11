use std::collections::BTreeMap;

use super::table::BracketMatrix;
use crate::diffring::{frechet, DiffExpr, Gen, Substitution};
use crate::error::{Error, Result};
use crate::psido::PsiDO;

/// Pushes a bracket through a change of variables. `change` lists the new
/// fields with their expressions in the old ones; the result
/// `P_new = F P F*`, `F_ak = frechet(new_a, old_k)`, is indexed by the new
/// fields with coefficients still in the old ones.
pub fn transfer_bracket(
    table: &BracketMatrix,
    change: &[(Gen, DiffExpr)],
) -> Result<BracketMatrix> {
    let old = table.fields();
    let n = old.len();
    let mut full = vec![vec![PsiDO::zero(); n]; n];
    for (k, row) in full.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            *cell = table
                .get(k, l)
                .ok_or_else(|| Error::Shape("transfer needs a complete table".into()))?;
        }
    }
    let rows: Vec<Vec<PsiDO>> = change
        .iter()
        .map(|(_, e)| old.iter().map(|&g| frechet(e, g)).collect())
        .collect();
    let adj: Vec<Vec<PsiDO>> = rows
        .iter()
        .map(|r| r.iter().map(PsiDO::adjoint).collect())
        .collect();
    // F P, then (F P) F*
    let fp: Vec<Vec<PsiDO>> = rows
        .iter()
        .map(|r| {
            (0..n)
                .map(|l| {
                    let mut acc = PsiDO::zero();
                    for (k, fk) in r.iter().enumerate() {
                        if !fk.is_zero() && !full[k][l].is_zero() {
                            acc = &acc + &fk.compose(&full[k][l]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = BracketMatrix::new(change.iter().map(|(g, _)| *g).collect());
    for a in 0..change.len() {
        for b in a..change.len() {
            let mut acc = PsiDO::zero();
            for l in 0..n {
                if !fp[a][l].is_zero() && !adj[b][l].is_zero() {
                    acc = &acc + &fp[a][l].compose(&adj[b][l]);
                }
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Rewrites every entry's coefficients through `subst`.
pub fn substitute_table(table: &BracketMatrix, subst: &mut Substitution) -> Result<BracketMatrix> {
    table.map_entries(|op| subst.apply_op(op))
}

/// Builds a substitution from `(generator, image)` pairs.
pub fn substitution(pairs: &[(Gen, DiffExpr)]) -> Substitution {
    Substitution::new(pairs.iter().cloned().collect::<BTreeMap<_, _>>())
}
