use std::collections::BTreeSet;
use std::time::Instant;

use super::covector::{generic_pieces, Covector};
use super::family::LaxFamily;
use super::maps::HamiltonianMap;
use super::report::{Check, VerificationReport};
use super::table::BracketMatrix;
use crate::diffring::{Context, Gen};
use crate::error::{Error, Result};
use crate::psido::{format_op, PsiDO};

/// `map(L, X) - tangent(P x)` for one covector.
pub fn residual(
    family: &LaxFamily,
    map: HamiltonianMap,
    table: &BracketMatrix,
    x: &Covector,
) -> PsiDO {
    let l = family.template();
    let actual = map.apply(&l, &x.op);
    let expected = family.tangent(&table.apply(&x.slots));
    &actual - &expected
}

/// Fields whose variation is visibly wrong in a residual tangent vector.
fn dirty_rows(family: &LaxFamily, r: &PsiDO) -> BTreeSet<Gen> {
    let mut out = BTreeSet::new();
    if r.is_zero() {
        return out;
    }
    let coeff_orders: BTreeSet<u32> = family.coeffs.iter().map(|(k, _)| *k).collect();
    if r.diff_terms().any(|(k, _)| !coeff_orders.contains(&k)) {
        return family.fields.iter().copied().collect();
    }
    for (k, g) in &family.coeffs {
        if !r.coeff(*k).is_zero() {
            out.insert(*g);
        }
    }
    if r.dyad_count() > 0 {
        match family.coordinates_of(&r.minus()) {
            Ok(coords) => {
                for (g, e) in coords {
                    if !e.is_zero() {
                        out.insert(g);
                    }
                }
            }
            Err(_) => {
                out.extend(family.dinv_field);
                for (a, b) in &family.pairs {
                    out.insert(*a);
                    out.insert(*b);
                }
            }
        }
    }
    out
}

/// Checks `map(L, X) = tangent(P x)` on a generic covector, piece by piece.
/// An entry `{f,g}` is reported verified when the row of `f` or of `g` is
/// clean on every piece (the table and the true structure are both skew).
pub fn verify_bracket_table(
    ctx: &mut Context,
    family: &LaxFamily,
    map: HamiltonianMap,
    table: &BracketMatrix,
    anchor: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let table = table.reordered(family.fields.clone())?;
    if !table.is_complete() {
        return Err(Error::Shape(format!(
            "table for {} has {} of {} entries",
            family.name,
            table.len(),
            family.fields.len() * (family.fields.len() + 1) / 2
        )));
    }
    let pieces = generic_pieces(family, ctx)?;
    let mut dirty: Vec<(Gen, String)> = Vec::new();
    for x in &pieces {
        x.check_pairing(family, ctx)?;
        let r = residual(family, map, &table, x);
        for g in dirty_rows(family, &r) {
            if !dirty.iter().any(|(h, _)| *h == g) {
                dirty.push((
                    g,
                    format!("X = {}: {}", format_op(&x.op, ctx), format_op(&r, ctx)),
                ));
            }
        }
    }
    let mut report = VerificationReport::new(format!("{} / {}", family.name, map.name()), anchor);
    for (i, j, _) in table.entries() {
        let (f, g) = (family.fields[i], family.fields[j]);
        let name = format!("{{{},{}}}", ctx.name(f), ctx.name(g));
        let df = dirty.iter().find(|(h, _)| *h == f);
        let dg = dirty.iter().find(|(h, _)| *h == g);
        match (df, dg) {
            (Some((_, rf)), Some(_)) => report.push(Check::mismatch(name, rf.clone())),
            _ => report.push(Check::verified(name)),
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Entrywise comparison over the entries of `expected`.
pub fn compare_tables(
    ctx: &Context,
    subject: &str,
    anchor: &str,
    actual: &BracketMatrix,
    expected: &BracketMatrix,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let actual = actual.reordered(expected.fields().to_vec())?;
    let mut report = VerificationReport::new(subject, anchor);
    for (i, j, e) in expected.entries() {
        let f = expected.fields()[i];
        let g = expected.fields()[j];
        let name = format!("{{{},{}}}", ctx.name(f), ctx.name(g));
        match actual.get(i, j) {
            Some(a) => report.push(Check::from_residual(name, format_op(&(&a - e), ctx))),
            None => report.push(Check::skipped(name, "entry unknown on the computed side")),
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
