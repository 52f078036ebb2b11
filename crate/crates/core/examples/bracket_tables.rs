//! Checks the bundled bracket tables against the Hamiltonian maps, and
//! transfers the L(1,2) structure to K(1,2) through the gauge change.

use kpcalc::cli::verify_known_table;
use kpcalc::diffring::Context;
use kpcalc::hierarchy::gauge_transform;
use kpcalc::structures::{
    compare_tables, transfer_bracket, verify_bracket_table, HamiltonianMap, KnownTable,
};

fn main() -> kpcalc::Result<()> {
    for table in KnownTable::ALL {
        let mut ctx = Context::new();
        let report = verify_known_table(&mut ctx, table)?;
        print!("{}", report.to_text());
    }

    let mut ctx = Context::new();
    let (l12, k12, change) = gauge_transform(&mut ctx);
    let l12t = KnownTable::L12.load(&mut ctx)?;
    let direct = verify_bracket_table(
        &mut ctx,
        &l12,
        HamiltonianMap::Gd2Dirac(1),
        &l12t,
        "table l12",
    )?;
    println!(
        "\n{} on {}: {}",
        l12.name,
        k12.name,
        if direct.passed() { "ok" } else { "mismatch" }
    );
    let moved = transfer_bracket(&l12t, &change.forward)?;
    let pov = KnownTable::Pov.load(&mut ctx)?;
    let report = compare_tables(&ctx, "l12 pushed to K(1,2)", "table pov", &moved, &pov)?;
    print!("{}", report.to_text());
    Ok(())
}
