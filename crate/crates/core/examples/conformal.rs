//! Virasoro generators built from the fields of constrained families.

use kpcalc::conformal::{composite_bracket, general_virasoro, Extension};
use kpcalc::diffring::Context;

fn main() -> kpcalc::Result<()> {
    for ext in Extension::ALL {
        let mut ctx = Context::new();
        print!("{}", ext.verify(&mut ctx)?.to_text());
        let (table, t) = ext.setup(&mut ctx)?;
        let tt = composite_bracket(&t.definition, &t.definition, &table)?;
        println!("  {{t,t}} = {}", tt.display(&ctx));
    }
    for m in 1..=3 {
        let mut ctx = Context::new();
        print!("{}", general_virasoro(&mut ctx, m)?.to_text());
    }
    Ok(())
}
