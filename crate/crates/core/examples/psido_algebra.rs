//! Products, adjoints, residues and truncated views of operators.

use kpcalc::cli::parse_op;
use kpcalc::diffring::{integrate_total_derivative, Context};
use kpcalc::psido::nth_root;

fn main() -> kpcalc::Result<()> {
    let mut ctx = Context::new();
    for name in ["u", "v", "phi", "psi"] {
        ctx.var(name);
    }
    let l = parse_op(&mut ctx, "del^2 + u + phi*dinv(1, psi)")?;
    let x = parse_op(&mut ctx, "v*del + dinv(phi, 1)")?;

    println!("L      = {}", l.display(&ctx));
    println!("X      = {}", x.display(&ctx));
    println!("L X    = {}", (&l * &x).display(&ctx));
    println!("L*     = {}", l.adjoint().display(&ctx));
    println!("(L^2)+ = {}", l.power(2).plus().display(&ctx));

    let res = l.commutator(&x).residue();
    let primitive = integrate_total_derivative(&res).expect("res[L,X] is a total derivative");
    println!("res[L,X] = ({})'", primitive.display(&ctx));

    // Square root, exact down to del^-4.
    let root = nth_root(&l, 2, 5)?;
    println!("L^(1/2) = {}", root.display(&ctx));
    println!("L X to del^-3: {}", (&l * &x).expand_tail(3).display(&ctx));
    Ok(())
}
