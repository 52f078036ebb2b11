//! Lax flows of constrained families and their gauge covariance.

use kpcalc::diffring::Context;
use kpcalc::hierarchy::{check_gauge_covariance, lax_flow};
use kpcalc::structures::LaxFamily;

fn main() -> kpcalc::Result<()> {
    let mut ctx = Context::new();
    let families = [
        LaxFamily::standard(&mut ctx, 1, 2),
        LaxFamily::nonstandard(&mut ctx, 1, 2),
        LaxFamily::standard(&mut ctx, 2, 1),
    ];
    for fam in &families {
        for k in 2..=3 {
            let flow = lax_flow(fam, k, 8)?;
            println!("{} flow {k}", fam.name);
            print!("{}", flow.to_text(&ctx));
        }
    }
    for k in 1..=2 {
        let mut ctx = Context::new();
        print!("{}", check_gauge_covariance(&mut ctx, k)?.to_text());
    }
    Ok(())
}
