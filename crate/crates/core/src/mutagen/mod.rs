//! Mutant generation for one C function.
//!
//! Sites are discovered at token level (comments and literals are separate
//! tokens, so they are never mutated). Each mutant is the whole source file
//! with one site rewritten and the function renamed to `mut_<name>`.

mod elf;
mod mutants;
mod sites;
mod tce;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbody::ScanError;

pub use mutants::{generate_mutants, mutant_file_name, MUTANT_PREFIX};
pub use sites::{enumerate_sites, SiteOptions};
pub use tce::{object_code_hash, tce_filter, CompileTemplate, TceClass, TceOutcome, TceReport};

/// Mutation operator classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Operator {
    /// Arithmetic operator replacement.
    Aor,
    /// Relational operator replacement.
    Ror,
    /// Logical connector replacement.
    Lcr,
    /// Bitwise operator replacement.
    Bwr,
    /// Unary operator insertion.
    Uoi,
    /// Integer constant replacement.
    Icr,
    /// Statement deletion.
    Sdl,
}

impl Operator {
    pub const ALL: [Operator; 7] =
        [Operator::Aor, Operator::Ror, Operator::Lcr, Operator::Bwr, Operator::Uoi, Operator::Icr, Operator::Sdl];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Aor => "AOR",
            Operator::Ror => "ROR",
            Operator::Lcr => "LCR",
            Operator::Bwr => "BWR",
            Operator::Uoi => "UOI",
            Operator::Icr => "ICR",
            Operator::Sdl => "SDL",
        }
    }

    pub fn site_kind(self) -> SiteKind {
        match self {
            Operator::Aor => SiteKind::BinaryArith,
            Operator::Ror => SiteKind::Relational,
            Operator::Lcr => SiteKind::Logical,
            Operator::Bwr => SiteKind::Bitwise,
            Operator::Uoi => SiteKind::UnaryInsert,
            Operator::Icr => SiteKind::Constant,
            Operator::Sdl => SiteKind::Statement,
        }
    }

    /// Token class for the replacement operators; empty for operators whose
    /// replacements depend on the site.
    pub fn class(self) -> &'static [&'static str] {
        match self {
            Operator::Aor => &["+", "-", "*", "/", "%"],
            Operator::Ror => &["<", "<=", ">", ">=", "==", "!="],
            Operator::Lcr => &["&&", "||"],
            Operator::Bwr => &["&", "|", "^"],
            Operator::Uoi => &["!", "-", "~"],
            Operator::Icr | Operator::Sdl => &[],
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = MutagenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| MutagenError::UnknownOperator(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteKind {
    BinaryArith,
    Relational,
    Logical,
    Bitwise,
    UnaryInsert,
    Constant,
    Statement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MutationSite {
    pub file: String,
    pub function: String,
    /// Byte span `[start, end)` in the source file.
    pub start: usize,
    pub end: usize,
    pub kind: SiteKind,
    pub operator: Operator,
    /// Source text of the span.
    pub original: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantStatus {
    Pending,
    Killed,
    Live,
    TceEquivalent,
    TceDuplicate,
    /// Did not compile.
    Stillborn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: u32,
    pub site: MutationSite,
    pub operator: Operator,
    pub original_token: String,
    pub replacement_token: String,
    pub mutated_source: String,
    pub status: MutantStatus,
}

impl Mutant {
    pub fn file_name(&self) -> String {
        mutant_file_name(&self.site.function, self.id, self.operator)
    }
}

#[derive(Debug, Error)]
pub enum MutagenError {
    #[error("parse failure: {0}")]
    ParseFailure(#[from] ScanError),
    #[error("unknown mutation operator `{0}`")]
    UnknownOperator(String),
    #[error("compiler unavailable: {0}")]
    CompilerUnavailable(String),
    #[error("original source does not compile: {0}")]
    OriginalCompileFailure(String),
    #[error("invalid compile template: {0}")]
    BadTemplate(String),
    #[error("object file: {0}")]
    Object(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_names_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
        }
        assert!("XYZ".parse::<Operator>().is_err());
        assert_eq!("ror".parse::<Operator>().unwrap(), Operator::Ror);
    }
}
