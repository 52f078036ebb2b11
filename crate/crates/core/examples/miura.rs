//! Factorization of L(2,1) into linear factors, the induced local bracket,
//! and the signature of its constant Poisson matrix.

use kpcalc::diffring::Context;
use kpcalc::miura::{
    diagonalize, expand_factorization, factor_counts, kw_transfer, ConstantPoissonMatrix,
};
use kpcalc::structures::KnownTable;

fn main() -> kpcalc::Result<()> {
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, 3, 1, false)?;
    print!("{}", spec.to_text(&ctx));

    let general = ConstantPoissonMatrix::general(3, 1);
    print!("\nmodified bracket\n{}", general.to_text());
    let target = KnownTable::BracFull.load(&mut ctx)?;
    print!(
        "{}",
        kw_transfer(&ctx, &general, &spec, &target, "table brac-full")?.to_text()
    );
    print!("\n{}", diagonalize(&general).to_text());

    let (n, m) = factor_counts(1, 2)?;
    let mut ctx = Context::new();
    let k12 = expand_factorization(&mut ctx, n, m, true)?;
    print!("\n{}", k12.to_text(&ctx));
    Ok(())
}
