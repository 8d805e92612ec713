//! Outcome records for individual checks.

use alloc::string::String;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// The check itself is malformed (bad prime, non-integral offset, ...).
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skipped",
            Status::Error => "error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub p: Option<u64>,
    pub alpha: Option<u32>,
    pub j_range: Option<(u64, u64)>,
    pub n_terms: Option<usize>,
    pub order: Option<usize>,
    pub modulus: Option<u64>,
}

/// Where a comparison first went wrong. `n` is the position in the
/// extracted sequence; `index` is the exponent in the underlying series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstFailure {
    pub n: usize,
    pub j: Option<u64>,
    pub index: Option<u64>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub id: String,
    pub label: String,
    pub params: Params,
    pub status: Status,
    pub first_failure: Option<FirstFailure>,
    pub note: Option<String>,
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    fn with(id: &str, label: &str, params: Params, status: Status) -> Self {
        VerificationReport {
            id: id.into(),
            label: label.into(),
            params,
            status,
            first_failure: None,
            note: None,
            elapsed_ms: None,
        }
    }

    pub fn pass(id: &str, label: &str, params: Params) -> Self {
        Self::with(id, label, params, Status::Pass)
    }

    pub fn fail(id: &str, label: &str, params: Params, failure: FirstFailure) -> Self {
        let mut r = Self::with(id, label, params, Status::Fail);
        r.first_failure = Some(failure);
        r
    }

    pub fn skip(id: &str, label: &str, params: Params, note: String) -> Self {
        let mut r = Self::with(id, label, params, Status::Skip);
        r.note = Some(note);
        r
    }

    pub fn error(id: &str, label: &str, params: Params, note: String) -> Self {
        let mut r = Self::with(id, label, params, Status::Error);
        r.note = Some(note);
        r
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds several reports on one claim into one: the first non-pass wins.
    pub fn combine(id: &str, label: &str, params: Params, parts: &[VerificationReport]) -> Self {
        match parts.iter().find(|r| r.status != Status::Pass) {
            None => Self::pass(id, label, params),
            Some(bad) => {
                let mut r = bad.clone();
                r.id = id.into();
                r.label = label.into();
                r.params = params;
                let note = match &bad.note {
                    Some(n) => alloc::format!("{}: {}", bad.label, n),
                    None => bad.label.clone(),
                };
                r.note = Some(note);
                r
            }
        }
    }
}
