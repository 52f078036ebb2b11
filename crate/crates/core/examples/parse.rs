//! The text syntax: expressions, operators and table files.

use kpcalc::cli::{parse_value, Parser, Value};
use kpcalc::diffring::{reduce, Context};
use kpcalc::structures::{BracketMatrix, KnownTable};

fn main() -> kpcalc::Result<()> {
    let mut ctx = Context::new();
    for src in [
        "u*u' + 1/2*u''",
        "(del - a)*(del - b)",
        "dinv(q, r)*del",
        "E(b)*J(u^2)",
        "inv(del - b)",
    ] {
        let v = Parser::new(&mut ctx, src, true)?.parse()?;
        match v {
            Value::Expr(e) => {
                let red = reduce(&e);
                println!(
                    "{src:>22}  =>  {}   (mod d/dx: {})",
                    e.display(&ctx),
                    red.remainder.display(&ctx)
                );
            }
            Value::Op(o) => println!("{src:>22}  =>  {}", o.display(&ctx)),
        }
    }
    // Unknown names are an error unless declared.
    if let Err(e) = parse_value(&mut ctx, "w + 1") {
        println!("error: {e}");
    }
    let table = BracketMatrix::from_text(&mut ctx, KnownTable::Pov.source())?;
    print!("\n{}", table.to_text(&ctx));
    Ok(())
}
