//! Configuration, exit codes and output for the command-line driver.

use serde::Serialize;

use super::suite::{run_criterion, verify_known_table, CriterionOutcome, CRITERIA};
use crate::diffring::Context;
use crate::error::{Error, Result};
use crate::structures::{verify_bracket_table, HamiltonianMap, KnownTable, VerificationReport};

pub const DEPTH_VAR: &str = "KPCALC_DEPTH";
pub const DEFAULT_DEPTH: u32 = 8;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Mismatch = 1,
    Usage = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Mathematical failures map to 1, everything else to 2.
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Decomposition { .. } | Error::Pairing(_) => ExitStatus::Mismatch,
            _ => ExitStatus::Usage,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    Criterion(u8),
    Table(KnownTable),
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub selection: Selection,
    /// Overrides the map a table is checked against.
    pub map: Option<HamiltonianMap>,
    pub depth: u32,
    pub format: OutputFormat,
    /// Include wall-clock times, which makes output vary between runs.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            selection: Selection::All,
            map: None,
            depth: DEFAULT_DEPTH,
            format: OutputFormat::Text,
            timings: false,
        }
    }
}

/// Checks a truncation depth; below 2 no operator identity is decidable.
pub fn validate_depth(depth: u32) -> Result<u32> {
    if depth < 2 {
        return Err(Error::Config(format!(
            "depth {depth} is too small: truncated views need at least 2 orders below the top; \
             use --depth 2 or more (default {DEFAULT_DEPTH})"
        )));
    }
    Ok(depth)
}

/// Default depth from the environment, or 8 when unset.
pub fn depth_from_env() -> Result<u32> {
    match std::env::var(DEPTH_VAR) {
        Ok(s) => {
            let d = s.trim().parse::<u32>().map_err(|_| {
                Error::Config(format!("{DEPTH_VAR}={s:?} is not a non-negative integer"))
            })?;
            validate_depth(d)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_DEPTH),
        Err(e) => Err(Error::Config(format!("{DEPTH_VAR}: {e}"))),
    }
}

pub fn parse_map(s: &str) -> Result<HamiltonianMap> {
    Ok(match s {
        "gd2" => HamiltonianMap::Gd2,
        "gd3" => HamiltonianMap::Gd3,
        "omega" => HamiltonianMap::Omega,
        "ns" => HamiltonianMap::Ns,
        "ns-literal" => HamiltonianMap::NsLiteral,
        _ => match s.strip_prefix("gd2-dirac") {
            Some("") => HamiltonianMap::Gd2Dirac(1),
            Some(rest) => HamiltonianMap::Gd2Dirac(
                rest.trim_start_matches([':', '=', '-'])
                    .parse()
                    .map_err(|_| Error::Config(format!("bad Dirac order in {s:?}")))?,
            ),
            None => {
                return Err(Error::Config(format!(
                    "unknown map {s:?}; expected gd2, gd2-dirac[:N], gd3, omega, ns or ns-literal"
                )))
            }
        },
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
enum Item {
    Criterion(CriterionOutcome),
    Report(VerificationReport),
}

impl Item {
    fn passed(&self) -> bool {
        match self {
            Item::Criterion(c) => c.passed,
            Item::Report(r) => r.passed(),
        }
    }

    fn strip_timings(&mut self) {
        let zero = std::time::Duration::ZERO;
        match self {
            Item::Criterion(c) => {
                for r in c.reports.iter_mut().chain(c.extra.iter_mut()) {
                    r.elapsed = zero;
                }
            }
            Item::Report(r) => r.elapsed = zero,
        }
    }
}

/// Rendered output and the exit status it implies.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: String,
    pub status: ExitStatus,
}

/// Runs the selected checks; errors are configuration problems (or hard
/// mathematical failures that abort a check).
pub fn run_verification(cfg: &VerifyConfig) -> Result<RunOutcome> {
    validate_depth(cfg.depth)?;
    let mut items = Vec::new();
    match &cfg.selection {
        Selection::All => {
            for (id, _) in CRITERIA.iter().filter(|(id, _)| *id != 10) {
                items.push(Item::Criterion(run_criterion(*id, cfg.depth)?));
            }
        }
        Selection::Criterion(id) => items.push(Item::Criterion(run_criterion(*id, cfg.depth)?)),
        Selection::Table(t) => {
            let mut ctx = Context::new();
            let report = match cfg.map {
                None => verify_known_table(&mut ctx, *t)?,
                Some(map) => {
                    let table = t.load(&mut ctx)?;
                    let family = t.family(&mut ctx);
                    verify_bracket_table(
                        &mut ctx,
                        &family,
                        map,
                        &table,
                        &format!("table {}", t.name()),
                    )?
                }
            };
            items.push(Item::Report(report));
        }
    }
    if !cfg.timings {
        items.iter_mut().for_each(Item::strip_timings);
    }
    let passed = items.iter().all(Item::passed);
    let output = match cfg.format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&items)
                .map_err(|e| Error::Config(format!("json output: {e}")))?
                + "\n"
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for it in &items {
                match it {
                    Item::Criterion(c) => out.push_str(&c.to_text()),
                    Item::Report(r) => out.push_str(&r.to_text()),
                }
            }
            if items.len() > 1 {
                out.push_str("\nsummary\n");
                for it in &items {
                    if let Item::Criterion(c) = it {
                        out.push_str(&c.summary_line());
                        out.push('\n');
                    }
                }
                out.push_str(
                    "criterion 10 (randomized algebra properties) runs under `cargo test`\n",
                );
            }
            out
        }
    };
    Ok(RunOutcome {
        output,
        status: if passed {
            ExitStatus::Success
        } else {
            ExitStatus::Mismatch
        },
    })
}

/// Parses `L(N,M)`, `L(N,M)+u1`, `K(N,M)` or the compact `L12`/`K12`.
pub fn parse_family(ctx: &mut Context, s: &str) -> Result<crate::structures::LaxFamily> {
    use crate::structures::LaxFamily;
    let bad = || {
        Error::Config(format!(
            "unknown family {s:?}; expected L(N,M), L(N,M)+u1 or K(N,M)"
        ))
    };
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (t, u1) = match t.strip_suffix("+u1") {
        Some(rest) => (rest.to_string(), true),
        None => (t, false),
    };
    let mut chars = t.chars();
    let kind = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
    let rest: String = chars.collect();
    let nums: Vec<u32> =
        if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            inner
                .split(',')
                .map(|x| x.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else if rest.len() == 2 && rest.chars().all(|c| c.is_ascii_digit()) {
            rest.chars().map(|c| c.to_digit(10).unwrap()).collect()
        } else {
            return Err(bad());
        };
    let [n, m] = nums[..] else { return Err(bad()) };
    if n == 0 {
        return Err(Error::Config(format!(
            "{s}: the order N must be at least 1"
        )));
    }
    match (kind, u1) {
        ('L', false) => Ok(LaxFamily::standard(ctx, n, m)),
        ('L', true) => Ok(LaxFamily::with_u1(ctx, n, m)),
        ('K', false) if m >= 1 => Ok(LaxFamily::nonstandard(ctx, n, m)),
        ('K', false) => Err(Error::Config(format!("{s}: K(N,M) needs M >= 1"))),
        _ => Err(bad()),
    }
}
