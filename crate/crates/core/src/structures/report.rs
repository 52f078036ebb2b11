use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Verified,
    /// The residual in normal form; never empty.
    Mismatch {
        residual: String,
    },
    Skipped {
        reason: String,
    },
}

impl Status {
    pub fn is_verified(&self) -> bool {
        matches!(self, Status::Verified)
    }

    pub fn is_mismatch(&self) -> bool {
        matches!(self, Status::Mismatch { .. })
    }
}

/// One named check, e.g. a table entry `{q,r}` or a substitution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub status: Status,
}

impl Check {
    pub fn verified(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Verified,
        }
    }

    pub fn mismatch(name: impl Into<String>, residual: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Mismatch {
                residual: residual.into(),
            },
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped {
                reason: reason.into(),
            },
        }
    }

    /// Verified when `residual` is `"0"`, mismatch otherwise.
    pub fn from_residual(name: impl Into<String>, residual: String) -> Self {
        if residual == "0" {
            Check::verified(name)
        } else {
            Check::mismatch(name, residual)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    /// Where the checked statement comes from, e.g. `"table pov"`.
    pub anchor: String,
    pub checks: Vec<Check>,
    /// Informational findings that do not affect the verdict.
    pub notes: Vec<String>,
    #[serde(
        serialize_with = "ser_millis",
        skip_serializing_if = "Duration::is_zero"
    )]
    pub elapsed: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, anchor: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            anchor: anchor.into(),
            checks: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_mismatch())
    }

    pub fn verified_count(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status.is_verified())
            .count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status.is_mismatch())
    }

    pub fn extend(&mut self, other: VerificationReport) {
        let prefix = other.subject.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.checks.push(c);
        }
        self.notes.extend(other.notes);
        self.elapsed += other.elapsed;
    }

    /// Appends the checks and notes of `other` without renaming them.
    pub fn extend_checks(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} [{}]: {}/{} verified{}\n",
            self.subject,
            self.anchor,
            self.verified_count(),
            self.checks.len(),
            if self.passed() { "" } else { ", MISMATCH" }
        );
        for c in &self.checks {
            match &c.status {
                Status::Verified => out.push_str(&format!("  ok       {}\n", c.name)),
                Status::Mismatch { residual } => out.push_str(&format!(
                    "  MISMATCH {}\n           residual: {}\n",
                    c.name,
                    shorten(residual, 400)
                )),
                Status::Skipped { reason } => {
                    out.push_str(&format!("  skipped  {} ({reason})\n", c.name))
                }
            }
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

/// Cuts long residuals for text output; JSON keeps them whole.
fn shorten(s: &str, max: usize) -> String {
    if s.chars().count() <= max {
        return s.to_string();
    }
    let head: String = s.chars().take(max).collect();
    format!("{head} ... ({} more characters)", s.chars().count() - max)
}
