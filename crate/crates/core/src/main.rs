use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kpcalc::cli::{
    depth_from_env, parse_family, parse_map, run_verification, validate_depth, ExitStatus,
    OutputFormat, Selection, Value, VerifyConfig, DEPTH_VAR,
};
use kpcalc::conformal::{
    check_spin, composite_bracket, general_virasoro, CompositeField, Extension,
};
use kpcalc::diffring::{reduce, Context, Q};
use kpcalc::hierarchy::lax_flow;
use kpcalc::miura::{diagonalize, expand_factorization, factor_counts, ConstantPoissonMatrix};
use kpcalc::structures::{BracketMatrix, KnownTable, VerificationReport};
use kpcalc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "kpcalc",
    version,
    about = "Exact pseudo-differential calculus for constrained KP hierarchies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify bracket tables or acceptance criteria
    Verify(VerifyArgs),
    /// Print the time derivatives of a Lax flow
    Flow(FlowArgs),
    /// Expand a Miura factorization, or diagonalize its Poisson matrix
    Miura(MiuraArgs),
    /// Check a Virasoro algebra of composite fields
    Conformal(ConformalArgs),
    /// Parse an expression, operator or table file and print its normal form
    Parse(ParseArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Table name: l12, pov, brac, brac-full, gd2-comparison
    #[arg(long, conflicts_with_all = ["criterion", "all"])]
    table: Option<String>,
    /// Criterion number 1..=9
    #[arg(long, conflicts_with = "all")]
    criterion: Option<u8>,
    /// Run criteria 1..=9
    #[arg(long)]
    all: bool,
    /// Map to check a table against: gd2, gd2-dirac[:N], gd3, omega, ns, ns-literal
    #[arg(long, requires = "table")]
    map: Option<String>,
    /// Truncation depth (default from KPCALC_DEPTH, else 8)
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    json: bool,
    /// Include wall-clock times
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct FlowArgs {
    /// L(N,M), L(N,M)+u1, K(N,M), or compact L12 / K12
    #[arg(long)]
    family: String,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct MiuraArgs {
    #[command(subcommand)]
    action: Option<MiuraAction>,
    /// Number of (del - a_i) factors
    #[arg(long)]
    n: Option<usize>,
    /// Number of (del - b_j)^-1 factors
    #[arg(long)]
    m: Option<usize>,
    /// Target K(N,M) instead of giving n and m directly
    #[arg(long, value_name = "N,M", conflicts_with_all = ["n", "m"])]
    target: Option<String>,
    /// Prefix the product with dinv, targeting a nonstandard operator
    #[arg(long)]
    prefix_dinv: bool,
}

#[derive(Subcommand)]
enum MiuraAction {
    /// Diagonalize a constant Poisson matrix of the modified fields
    Diag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// general, second, third
        #[arg(long, default_value = "general")]
        matrix: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ConformalArgs {
    /// extv1, extv2, extv3, or virasoro-M for the general L(1,M) algebra
    #[arg(long)]
    context: String,
    /// Composite field whose bracket with t is printed
    #[arg(long)]
    field: Option<String>,
    /// Expected spin of --field
    #[arg(long, requires = "field")]
    spin: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ParseArgs {
    /// Expression or operator text
    #[arg(required_unless_present = "table", conflicts_with = "table")]
    text: Option<String>,
    /// Bracket table file
    #[arg(long)]
    table: Option<PathBuf>,
}

/// Result of a subcommand: text to print and whether the mathematics held.
struct Outcome {
    output: String,
    status: ExitStatus,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            output,
            status: ExitStatus::Success,
        }
    }

    fn report(r: &VerificationReport, json: bool) -> Result<Self> {
        let output = if json {
            serde_json::to_string_pretty(r).map_err(|e| Error::Config(e.to_string()))? + "\n"
        } else {
            r.to_text()
        };
        let status = if r.passed() {
            ExitStatus::Success
        } else {
            ExitStatus::Mismatch
        };
        Ok(Outcome { output, status })
    }
}

fn depth(arg: Option<u32>) -> Result<u32> {
    match arg {
        Some(d) => validate_depth(d),
        None => depth_from_env(),
    }
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let selection =
        match (a.table, a.criterion, a.all) {
            (Some(t), _, _) => Selection::Table(KnownTable::from_name(&t).ok_or_else(|| {
                let names: Vec<&str> = KnownTable::ALL.iter().map(|t| t.name()).collect();
                Error::Config(format!("unknown table {t:?}; known: {}", names.join(", ")))
            })?),
            (None, Some(10), _) => return Err(Error::Config(
                "criterion 10 is a randomized property suite; run `cargo test --test acceptance`"
                    .into(),
            )),
            (None, Some(c), _) if (1..=9).contains(&c) => Selection::Criterion(c),
            (None, Some(c), _) => {
                return Err(Error::Config(format!("no criterion {c}; expected 1..=9")))
            }
            (None, None, true) => Selection::All,
            (None, None, false) => {
                return Err(Error::Config(
                    "nothing to verify: pass --table NAME, --criterion N or --all".into(),
                ))
            }
        };
    let cfg = VerifyConfig {
        selection,
        map: a.map.as_deref().map(parse_map).transpose()?,
        depth: depth(a.depth)?,
        format: if a.json {
            OutputFormat::Json
        } else {
            OutputFormat::Text
        },
        timings: a.timings,
    };
    let run = run_verification(&cfg)?;
    Ok(Outcome {
        output: run.output,
        status: run.status,
    })
}

fn flow(a: FlowArgs) -> Result<Outcome> {
    let d = depth(a.depth)?;
    if a.k == 0 {
        return Err(Error::Config("flow index k must be at least 1".into()));
    }
    let mut ctx = Context::new();
    let family = parse_family(&mut ctx, &a.family)?;
    let f = lax_flow(&family, a.k, d)?;
    Ok(Outcome::ok(format!(
        "{} flow {}\n{}",
        family.name,
        a.k,
        f.to_text(&ctx)
    )))
}

fn miura(a: MiuraArgs) -> Result<Outcome> {
    if let Some(MiuraAction::Diag { n, m, matrix, json }) = a.action {
        let mat = match matrix.as_str() {
            "general" => ConstantPoissonMatrix::general(n, m),
            "second" => ConstantPoissonMatrix::second(n, m),
            "third" => ConstantPoissonMatrix::third(n, m),
            _ => {
                return Err(Error::Config(format!(
                    "unknown matrix {matrix:?}; expected general, second or third"
                )))
            }
        };
        let d = diagonalize(&mat);
        let output = if json {
            serde_json::to_string_pretty(&d).map_err(|e| Error::Config(e.to_string()))? + "\n"
        } else {
            format!("M =\n{}{}", mat.to_text(), d.to_text())
        };
        return Ok(Outcome::ok(output));
    }
    let (n, m, prefix) = match (a.target, a.n, a.m) {
        (Some(t), _, _) => {
            let nums: Vec<usize> = t
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad --target {t:?}; expected N,M")))
                })
                .collect::<Result<_>>()?;
            let [big_n, big_m] = nums[..] else {
                return Err(Error::Config(format!("bad --target {t:?}; expected N,M")));
            };
            let (n, m) = factor_counts(big_n, big_m)?;
            (n, m, true)
        }
        (None, Some(n), Some(m)) => (n, m, a.prefix_dinv),
        _ => return Err(Error::Config("pass --n and --m, or --target N,M".into())),
    };
    let mut ctx = Context::new();
    let spec = expand_factorization(&mut ctx, n, m, prefix)?;
    Ok(Outcome::ok(spec.to_text(&ctx)))
}

fn conformal(a: ConformalArgs) -> Result<Outcome> {
    let mut ctx = Context::new();
    if let Some(m) = a.context.strip_prefix("virasoro-") {
        let m: u32 = m.parse().map_err(|_| {
            Error::Config(format!("bad context {:?}; expected virasoro-M", a.context))
        })?;
        if a.field.is_some() {
            return Err(Error::Config(
                "--field needs one of extv1, extv2, extv3".into(),
            ));
        }
        return Outcome::report(&general_virasoro(&mut ctx, m)?, a.json);
    }
    let ext = Extension::from_name(&a.context).ok_or_else(|| {
        Error::Config(format!(
            "unknown context {:?}; expected extv1, extv2, extv3 or virasoro-M",
            a.context
        ))
    })?;
    let Some(src) = a.field else {
        return Outcome::report(&ext.verify(&mut ctx)?, a.json);
    };
    let (table, t) = ext.setup(&mut ctx)?;
    let def = kpcalc::cli::parse_expr(&mut ctx, &src)?;
    let f = CompositeField::new(src.clone(), def)?;
    match a.spin {
        Some(s) => {
            let s: Q = s
                .parse()
                .map_err(|_| Error::Config(format!("bad spin {s:?}")))?;
            Outcome::report(&check_spin(&ctx, &f, &s, &t, &table)?, a.json)
        }
        None => {
            let op = composite_bracket(&f.definition, &t.definition, &table)?;
            Ok(Outcome::ok(format!(
                "{{{},t}} = {}\n",
                f.name,
                op.display(&ctx)
            )))
        }
    }
}

fn parse(a: ParseArgs) -> Result<Outcome> {
    let mut ctx = Context::new();
    if let Some(path) = a.table {
        let src = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let table = BracketMatrix::from_text(&mut ctx, &src)?;
        return Ok(Outcome::ok(table.to_text(&ctx)));
    }
    let text = a.text.unwrap_or_default();
    let out = match kpcalc::cli::Parser::new(&mut ctx, &text, true)?.parse()? {
        Value::Expr(e) => {
            let red = reduce(&e);
            let mut s = format!("{}\n", e.display(&ctx));
            if red.complete && !e.is_zero() {
                s.push_str(&format!(
                    "modulo total derivatives: {}\n",
                    red.remainder.display(&ctx)
                ));
            }
            s
        }
        Value::Op(o) => format!("{}\n", o.display(&ctx)),
    };
    Ok(Outcome::ok(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Flow(a) => flow(a),
        Command::Miura(a) => miura(a),
        Command::Conformal(a) => conformal(a),
        Command::Parse(a) => parse(a),
    };
    match result {
        Ok(o) => {
            print!("{}", o.output);
            ExitCode::from(o.status.code() as u8)
        }
        Err(e) => {
            let status = ExitStatus::of_error(&e);
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) && e.to_string().contains("depth") {
                eprintln!("hint: the default depth comes from {DEPTH_VAR}");
            }
            ExitCode::from(status.code() as u8)
        }
    }
}
