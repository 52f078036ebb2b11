//! Runs every acceptance criterion and prints one line per criterion.
//!
//! Criteria 1 to 9 go through the same driver as `kpcalc verify`; criterion
//! 10 is a fixed-seed randomized check of the operator algebra.

use kpcalc::cli::{run_criterion, CRITERIA};
use kpcalc::diffring::{euler_derivative, integrate_total_derivative, q, Context, DiffExpr, Gen};
use kpcalc::psido::PsiDO;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0010;
const CASES: usize = 200;
const DEPTH: u32 = 6;

fn poly(rng: &mut ChaCha8Rng, gens: &[Gen], max_terms: usize) -> DiffExpr {
    let mut out = DiffExpr::zero();
    for _ in 0..rng.gen_range(0..=max_terms) {
        let mut t = DiffExpr::int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=2) {
            let g = gens[rng.gen_range(0..gens.len())];
            t = &t * &DiffExpr::jet(g, rng.gen_range(0..=2));
        }
        out += &t;
    }
    out
}

fn operator(rng: &mut ChaCha8Rng, gens: &[Gen]) -> PsiDO {
    let mut op = PsiDO::zero();
    for k in 0..=rng.gen_range(0..=2u32) {
        op.add_diff(k, poly(rng, gens, 2));
    }
    if rng.gen_bool(0.6) {
        op.add_dyad(&poly(rng, gens, 2), &poly(rng, gens, 1));
    }
    op
}

/// Coefficients of two views agree on every order where both are exact.
fn views_agree(a: &kpcalc::psido::OperatorView, b: &kpcalc::psido::OperatorView) -> bool {
    let low = a.low().max(b.low());
    let top = a.top().into_iter().chain(b.top()).max().unwrap_or(low);
    (low..=top).all(|k| a.coeff(k) == b.coeff(k))
}

struct Tally {
    passed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(what());
        }
    }
}

fn randomized_algebra() -> Tally {
    let mut ctx = Context::new();
    let gens = [ctx.var("u"), ctx.var("v")];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut tally = Tally {
        passed: 0,
        failures: Vec::new(),
    };
    for case in 0..CASES {
        let a = operator(&mut rng, &gens);
        let b = operator(&mut rng, &gens);
        let c = operator(&mut rng, &gens);

        let ab = &a * &b;
        tally.check((&ab * &c) == (&a * &(&b * &c)), || {
            format!("case {case}: associativity")
        });
        tally.check(ab.adjoint() == &b.adjoint() * &a.adjoint(), || {
            format!("case {case}: adjoint of product")
        });
        tally.check(a.adjoint().adjoint() == a, || {
            format!("case {case}: adjoint involution")
        });

        let res = a.commutator(&b).residue();
        tally.check(integrate_total_derivative(&res).is_some(), || {
            format!(
                "case {case}: res[A,B] = {} is not a total derivative",
                res.display(&ctx)
            )
        });

        let f = poly(&mut rng, &gens, 3);
        let df = f.derivative();
        tally.check(
            gens.iter().all(|&g| euler_derivative(&df, g).is_zero()),
            || {
                format!(
                    "case {case}: Euler derivative of ({})' is nonzero",
                    f.display(&ctx)
                )
            },
        );

        let exact = ab.expand_tail(DEPTH);
        let viewed = a.expand_tail(DEPTH).mul(&b.expand_tail(DEPTH));
        tally.check(views_agree(&exact, &viewed), || {
            format!("case {case}: view product differs from exact")
        });

        let s = q(rng.gen_range(-4..=4));
        let lhs = (&a + &b).scale(&s) * c.clone();
        let rhs = &(&a * &c).scale(&s) + &(&b * &c).scale(&s);
        tally.check(lhs == rhs, || format!("case {case}: bilinearity"));
    }
    tally
}

#[test]
fn acceptance() {
    let depth = 8;
    let mut lines = Vec::new();
    let mut all_passed = true;
    for (id, title) in CRITERIA {
        if id == 10 {
            let tally = randomized_algebra();
            let ok = tally.failures.is_empty();
            all_passed &= ok;
            lines.push(format!(
                "criterion {id:02}: {} ({}/{} checks) {title}",
                if ok { "PASS" } else { "FAIL" },
                tally.passed,
                tally.passed + tally.failures.len()
            ));
            for f in tally.failures.iter().take(10) {
                println!("  {f}");
            }
            continue;
        }
        match run_criterion(id, depth) {
            Ok(outcome) => {
                if !outcome.passed {
                    print!("{}", outcome.to_text());
                }
                all_passed &= outcome.passed;
                lines.push(outcome.summary_line());
            }
            Err(e) => {
                all_passed = false;
                lines.push(format!("criterion {id:02}: FAIL (error: {e}) {title}"));
            }
        }
    }
    println!();
    for l in &lines {
        println!("{l}");
    }
    assert!(
        all_passed,
        "some acceptance criteria failed:\n{}",
        lines.join("\n")
    );
}
