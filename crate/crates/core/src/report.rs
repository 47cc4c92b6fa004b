//! Check outcomes shared by every verifier.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// First counterexample of a failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub args: Vec<String>,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, written out.
    #[serde(rename = "paper_ref")]
    pub identity: String,
    pub status: Status,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>, identity: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            identity: identity.into(),
            status: Status::Pass,
            cases: 0,
            failures: 0,
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Records one case; the closures run only for the first failure.
    pub fn record<A, R>(&mut self, ok: bool, args: A, residual: R)
    where
        A: FnOnce() -> Vec<String>,
        R: FnOnce() -> String,
    {
        self.cases += 1;
        if ok {
            return;
        }
        self.failures += 1;
        self.status = Status::Fail;
        if self.witness.is_none() {
            self.witness = Some(Witness { args: args(), residual: residual() });
        }
    }

    /// Records a case whose residual must be zero.
    pub fn record_zero<T: IsZero + fmt::Display, A: FnOnce() -> Vec<String>>(
        &mut self,
        residual: &T,
        args: A,
    ) {
        self.record(residual.is_zero_value(), args, || residual.to_string());
    }

    /// Marks a failure that is not tied to a battery case.
    pub fn fail(&mut self, args: Vec<String>, residual: impl Into<String>) {
        self.record(false, || args, || residual.into());
    }
}

pub trait IsZero {
    fn is_zero_value(&self) -> bool;
}

impl IsZero for crate::Scalar {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl IsZero for crate::linalg::Matrix<crate::Scalar> {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {} ({} cases)  {}", c.name, c.cases, c.identity)?;
            if let Some(w) = &c.witness {
                writeln!(f, "     at ({})", w.args.join(", "))?;
                writeln!(f, "     residual {}", w.residual)?;
            }
        }
        Ok(())
    }
}

/// Alias kept for the algebroid verifier.
pub type AxiomReport = Report;
