//! The verification suite: each criterion builds its own context and
//! returns the reports that decide it plus informational ones.

use serde::Serialize;

use crate::conformal::{general_virasoro, Extension};
use crate::diffring::{Context, DiffExpr};
use crate::error::{Error, Result};
use crate::hierarchy::{
    check_gauge_covariance, gauge_transform, gauge_transform_m, lax_flow, multiply_by_del,
};
use crate::miura::{
    expand_factorization, induced_bracket, kw_transfer, printed_miura_comparison,
    third_bilinear_form, ConstantPoissonMatrix,
};
use crate::structures::{
    compare_tables, gd3_table, one_constraint_table, substitute_table, transfer_bracket,
    verify_appendix_identity, verify_bracket_table, BracketMatrix, Check, HamiltonianMap,
    KnownTable, LaxFamily, VerificationReport,
};

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "second bracket of L(1,2) under GD2 with Dirac term"),
    (
        2,
        "nonstandard bracket of K(1,2), directly and by gauge transfer",
    ),
    (
        3,
        "bracket of L(2,1) under Omega, by transfer, and the one-constraint comparison",
    ),
    (4, "gradient identity between K(1,2) and L(2,1)"),
    (5, "Miura substitutions of the (3,1) factorization"),
    (6, "Kupershmidt-Wilson transfer and its second/third split"),
    (7, "the (1,3) family"),
    (8, "Virasoro extensions"),
    (9, "flows and gauge covariance"),
    (10, "randomized algebra properties"),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    /// Reports that decide the criterion.
    pub reports: Vec<VerificationReport>,
    /// Reports printed alongside without affecting the verdict.
    pub extra: Vec<VerificationReport>,
}

impl CriterionOutcome {
    fn new(id: u8, reports: Vec<VerificationReport>, extra: Vec<VerificationReport>) -> Self {
        CriterionOutcome {
            id,
            title: title(id).to_string(),
            passed: reports.iter().all(VerificationReport::passed),
            reports,
            extra,
        }
    }

    pub fn summary_line(&self) -> String {
        let (ok, total) = self.reports.iter().fold((0, 0), |(a, b), r| {
            (a + r.verified_count(), b + r.checks.len())
        });
        format!(
            "criterion {:>2}: {} ({ok}/{total} checks) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = self.summary_line();
        out.push('\n');
        for r in &self.reports {
            out.push_str(&r.to_text());
        }
        for r in &self.extra {
            out.push_str("(informational) ");
            out.push_str(&r.to_text());
        }
        out
    }
}

fn title(id: u8) -> &'static str {
    CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .unwrap_or("")
}

/// Keeps only the checks named `{f,g}` for entries of `table`.
fn restrict_to_entries(
    ctx: &Context,
    mut report: VerificationReport,
    table: &BracketMatrix,
) -> VerificationReport {
    let names: Vec<String> = table
        .entries()
        .map(|(i, j, _)| {
            format!(
                "{{{},{}}}",
                ctx.name(table.fields()[i]),
                ctx.name(table.fields()[j])
            )
        })
        .collect();
    report.checks.retain(|c| names.contains(&c.name));
    report
}

/// A table checked against the map it is stated for.
pub fn verify_known_table(ctx: &mut Context, which: KnownTable) -> Result<VerificationReport> {
    let table = which.load(ctx)?;
    let family = which.family(ctx);
    let map = match which {
        KnownTable::L12 => HamiltonianMap::Gd2Dirac(1),
        KnownTable::Pov => HamiltonianMap::Ns,
        KnownTable::Gd2Printed => HamiltonianMap::Gd2,
        _ => HamiltonianMap::Omega,
    };
    if table.is_complete() {
        return verify_bracket_table(
            ctx,
            &family,
            map,
            &table,
            &format!("table {}", which.name()),
        );
    }
    let full = match which {
        KnownTable::Gd2Printed => gd2_part(ctx)?,
        _ => KnownTable::BracFull.load(ctx)?,
    };
    let mut report = compare_tables(
        ctx,
        &format!("{} within its full table", which.name()),
        "printed entries",
        &full,
        &table,
    )?;
    let verified =
        verify_bracket_table(ctx, &family, map, &full, &format!("table {}", which.name()))?;
    report.extend_checks(restrict_to_entries(ctx, verified, &table));
    Ok(report)
}

/// `brac` minus the bracket of the third map.
fn gd2_part(ctx: &mut Context) -> Result<BracketMatrix> {
    let family = LaxFamily::with_u1(ctx, 2, 1);
    let full = KnownTable::BracFull.load(ctx)?;
    full.difference(&gd3_table(ctx, &family)?)
}

fn criterion_1() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let r = verify_known_table(&mut ctx, KnownTable::L12)?;
    let fam = LaxFamily::standard(&mut ctx, 1, 2);
    let table = KnownTable::L12.load(&mut ctx)?;
    let plain = verify_bracket_table(
        &mut ctx,
        &fam,
        HamiltonianMap::Gd2,
        &table,
        "table l12 without Dirac term",
    )?;
    Ok(CriterionOutcome::new(1, vec![r], vec![plain]))
}

fn criterion_2() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let direct = verify_known_table(&mut ctx, KnownTable::Pov)?;
    let (_, kf, change) = gauge_transform(&mut ctx);
    let l12t = KnownTable::L12.load(&mut ctx)?;
    let pov = KnownTable::Pov.load(&mut ctx)?;
    let moved = transfer_bracket(&l12t, &change.forward)?;
    let moved = substitute_table(&moved, &mut change.inverse_subst())?;
    let route = compare_tables(
        &ctx,
        "l12 through the gauge substitutions",
        "table pov",
        &moved,
        &pov,
    )?;
    let literal =
        verify_bracket_table(&mut ctx, &kf, HamiltonianMap::NsLiteral, &pov, "table pov")?;
    Ok(CriterionOutcome::new(2, vec![direct, route], vec![literal]))
}

fn criterion_3() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let fam = LaxFamily::with_u1(&mut ctx, 2, 1);
    let full = KnownTable::BracFull.load(&mut ctx)?;
    let omega = verify_bracket_table(
        &mut ctx,
        &fam,
        HamiltonianMap::Omega,
        &full,
        "table brac, all entries",
    )?;
    let printed = KnownTable::BracPrinted.load(&mut ctx)?;
    let within = compare_tables(&ctx, "printed brac entries", "table brac", &full, &printed)?;

    let (_, _, change) = multiply_by_del(&mut ctx, 1, 2)?;
    let pov = KnownTable::Pov.load(&mut ctx)?;
    let moved = transfer_bracket(&pov, &change.forward)?;
    let moved = substitute_table(&moved, &mut change.inverse_subst())?;
    let route = compare_tables(
        &ctx,
        "pov through u = v-substitutions",
        "table brac",
        &moved,
        &full,
    )?;

    let cmp = KnownTable::Gd2Printed.load(&mut ctx)?;
    let gd2 = gd2_part(&mut ctx)?;
    let dirac = verify_bracket_table(
        &mut ctx,
        &fam,
        HamiltonianMap::Gd2Dirac(2),
        &gd2,
        "one-constraint comparison",
    )?;
    let dirac = restrict_to_entries(&ctx, dirac, &cmp);

    let p3 = gd3_table(&mut ctx, &fam)?;
    let third = verify_bracket_table(
        &mut ctx,
        &fam,
        HamiltonianMap::Gd3,
        &p3,
        "third map, -T dinv T*",
    )?;
    let second = verify_bracket_table(
        &mut ctx,
        &fam,
        HamiltonianMap::Gd2,
        &gd2,
        "brac minus third map",
    )?;
    let cmp_gd2 = compare_tables(
        &ctx,
        "one-constraint comparison within GD2 part",
        "printed comparison",
        &gd2,
        &cmp,
    )?;
    let mut contrast = VerificationReport::new(
        "sign contrast with the one-constraint bracket",
        "u1 brackets",
    );
    for (i, j, e) in cmp.entries() {
        let (f, g) = (cmp.fields()[i], cmp.fields()[j]);
        if let Some(b) = full.get_by(f, g) {
            let name = format!("{{{},{}}} differs", ctx.name(f), ctx.name(g));
            contrast.push(if &b == e {
                Check::mismatch(name, "entries coincide")
            } else {
                Check::verified(name)
            });
        }
    }
    Ok(CriterionOutcome::new(
        3,
        vec![omega, within, route, dirac],
        vec![third, second, cmp_gd2, contrast],
    ))
}

fn criterion_4() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    Ok(CriterionOutcome::new(
        4,
        vec![verify_appendix_identity(&mut ctx)?],
        vec![],
    ))
}

fn criterion_5() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, 3, 1, false)?;
    let full = printed_miura_comparison(&ctx, &spec)?;
    let mut exact =
        VerificationReport::new("Miura (3,1) exact substitutions", "factorization of L(2,1)");
    exact.push(Check::verified(
        "factor product equals the template after substitution",
    ));
    let mut printed =
        VerificationReport::new("Miura (3,1) printed u2 and phi", "comparison targets");
    for c in full.checks {
        if c.name.starts_with("u1") || c.name.starts_with("psi") {
            exact.push(c);
        } else {
            printed.push(c);
        }
    }
    for c in printed.mismatches() {
        exact.note(format!("deviation from the printed formula: {}", c.name));
    }
    Ok(CriterionOutcome::new(5, vec![exact], vec![printed]))
}

fn criterion_6() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, 3, 1, false)?;
    let fam = spec.family.clone();
    let full = KnownTable::BracFull.load(&mut ctx)?;
    let pokw = ConstantPoissonMatrix::general(3, 1);
    let kw = kw_transfer(&ctx, &pokw, &spec, &full, "table pokw")?;

    let second = ConstantPoissonMatrix::second(3, 1);
    let third = ConstantPoissonMatrix::third(3, 1);
    let i2 = induced_bracket(&second, &spec)?;
    let i3 = induced_bracket(&third, &spec)?;
    let sum = compare_tables(
        &ctx,
        "2nd + 3rd transfers",
        "table pokw transfer",
        &i2.sum(&i3)?,
        &induced_bracket(&pokw, &spec)?,
    )?;
    let mut matrices = VerificationReport::new("2nd + 3rd matrices", "table pokw");
    matrices.push(if second.sum(&third)? == pokw {
        Check::verified("2nd + 3rd = pokw")
    } else {
        Check::mismatch("2nd + 3rd = pokw", "matrices differ")
    });

    let p3 = gd3_table(&mut ctx, &fam)?;
    let gd2 = full.difference(&p3)?;
    let kw2 = kw_transfer(&ctx, &second, &spec, &gd2, "2nd table against the GD2 part")?;
    let kw3 = kw_transfer(&ctx, &third, &spec, &p3, "3rd table against the third map")?;
    let bil = third_bilinear_form(&mut ctx, 3, 1);
    Ok(CriterionOutcome::new(
        6,
        vec![kw, sum, matrices],
        vec![kw2, kw3, bil],
    ))
}

fn criterion_7() -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let (l13, k13, change) = gauge_transform_m(&mut ctx, 3);
    let t6 = one_constraint_table(&l13)?;
    let analogue = verify_bracket_table(
        &mut ctx,
        &l13,
        HamiltonianMap::Gd2Dirac(1),
        &t6,
        "table l12 analogue",
    )?;
    let vir = general_virasoro(&mut ctx, 3)?;

    let tk = transfer_bracket(&t6, &change.forward)?;
    let tk = substitute_table(&tk, &mut change.inverse_subst())?;
    let ns = verify_bracket_table(
        &mut ctx,
        &k13,
        HamiltonianMap::Ns,
        &tk,
        "table pov analogue",
    )?;
    let (_, l22, to_l) = multiply_by_del(&mut ctx, 1, 3)?;
    let tl = transfer_bracket(&tk, &to_l.forward)?;
    let tl = substitute_table(&tl, &mut to_l.inverse_subst())?;
    let spec = expand_factorization(&mut ctx, 4, 2, false)?;
    let kw = kw_transfer(
        &ctx,
        &ConstantPoissonMatrix::general(4, 2),
        &spec,
        &tl,
        "bracket matrix, (n,m) = (4,2)",
    )?;
    let omega = verify_bracket_table(&mut ctx, &l22, HamiltonianMap::Omega, &tl, "del K(1,3)")?;
    Ok(CriterionOutcome::new(
        7,
        vec![analogue, vir, ns, kw],
        vec![omega],
    ))
}

fn criterion_8() -> Result<CriterionOutcome> {
    let mut reports = Vec::new();
    for e in Extension::ALL {
        let mut ctx = Context::new();
        reports.push(e.verify(&mut ctx)?);
    }
    Ok(CriterionOutcome::new(8, reports, vec![]))
}

fn criterion_9(depth: u32) -> Result<CriterionOutcome> {
    let mut ctx = Context::new();
    let (lf, kf, _) = gauge_transform(&mut ctx);
    let mut flows = VerificationReport::new("flows k = 1, 2", "L(1,2) and K(1,2)");
    for fam in [&lf, &kf] {
        let f1 = lax_flow(fam, 1, depth)?;
        for (g, e) in &f1.flows {
            let name = format!("{}: d_1 {} = {}'", fam.name, ctx.name(*g), ctx.name(*g));
            flows.push(Check::from_residual(
                name,
                (e - &DiffExpr::jet(*g, 1)).display(&ctx).to_string(),
            ));
        }
        let f2 = lax_flow(fam, 2, depth)?;
        flows.note(format!(
            "{} k=2:\n{}",
            fam.name,
            f2.to_text(&ctx).trim_end()
        ));
    }
    let (q, v1) = (kf.pairs[0].0, kf.fields[0]);
    let f2 = lax_flow(&kf, 2, depth)?;
    let want = &DiffExpr::jet(q, 2)
        + &(&DiffExpr::var(v1) * &DiffExpr::jet(q, 1)).scale(&crate::diffring::qr(2, 1));
    flows.push(Check::from_residual(
        "K(1,2): d_2 q = q'' + 2 v1 q'",
        (f2.get(q).cloned().unwrap_or_default() - want)
            .display(&ctx)
            .to_string(),
    ));
    let mut reports = vec![flows];
    for k in 1..=2 {
        reports.push(check_gauge_covariance(&mut ctx, k)?);
    }
    Ok(CriterionOutcome::new(9, reports, vec![]))
}

/// Runs criterion `id` (1 to 9; the randomized properties of criterion 10
/// live in the test suite).
pub fn run_criterion(id: u8, depth: u32) -> Result<CriterionOutcome> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(depth),
        10 => Err(Error::Config(
            "criterion 10 is the randomized property suite; run it with `cargo test`".into(),
        )),
        _ => Err(Error::Config(format!(
            "no criterion {id}; expected 1 to 10"
        ))),
    }
}
