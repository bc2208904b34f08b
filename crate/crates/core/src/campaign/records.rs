//! Append-only newline-delimited JSON results log.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fuzz::KillOrigin;
use crate::mutagen::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantVerdict {
    KilledGenuine,
    Live,
    LiveFpOnly,
    TceDropped,
    Stillborn,
}

impl MutantVerdict {
    pub const ALL: [MutantVerdict; 5] = [
        MutantVerdict::KilledGenuine,
        MutantVerdict::Live,
        MutantVerdict::LiveFpOnly,
        MutantVerdict::TceDropped,
        MutantVerdict::Stillborn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutantVerdict::KilledGenuine => "killed-genuine",
            MutantVerdict::Live => "live",
            MutantVerdict::LiveFpOnly => "live-fp-only",
            MutantVerdict::TceDropped => "tce-dropped",
            MutantVerdict::Stillborn => "stillborn",
        }
    }

    /// Counted in the mutation score denominator.
    pub fn is_scored(self) -> bool {
        matches!(self, MutantVerdict::KilledGenuine | MutantVerdict::Live | MutantVerdict::LiveFpOnly)
    }
}

/// One line of the results log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub run_id: String,
    pub function: String,
    pub mutant_id: u32,
    pub operator: Operator,
    pub file: String,
    pub verdict: MutantVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_kill_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kill_origin: Option<KillOrigin>,
    #[serde(default)]
    pub executions: u64,
    #[serde(default)]
    pub false_positives: u64,
    /// Paths of saved killing inputs, relative to the output directory.
    #[serde(default)]
    pub killing_inputs: Vec<String>,
    /// Id of the mutant whose killing input killed this one on replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replayed_from: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Append `records` to the log, one JSON object per line. Each record is a
/// single `write` on a file opened for appending.
pub fn append_records(path: &Path, records: &[CampaignRecord]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    for r in records {
        let mut line = serde_json::to_string(r).map_err(std::io::Error::other)?;
        line.push('\n');
        f.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Every record in the log. Blank lines are skipped; a malformed line is an
/// error naming its line number.
pub fn read_records(path: &Path) -> std::io::Result<Vec<CampaignRecord>> {
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(id: u32, verdict: MutantVerdict, t: Option<f64>) -> CampaignRecord {
        CampaignRecord {
            run_id: "r".into(),
            function: "f".into(),
            mutant_id: id,
            operator: Operator::Aor,
            file: format!("f.mut{id}.AOR.c"),
            verdict,
            first_kill_seconds: t,
            kill_origin: t.map(|_| KillOrigin::Fuzzed),
            executions: 10,
            false_positives: 0,
            killing_inputs: Vec::new(),
            replayed_from: None,
            diagnostic: None,
        }
    }

    #[test]
    fn append_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("results.ndjson");
        append_records(&p, &[rec(1, MutantVerdict::KilledGenuine, Some(0.5))]).unwrap();
        append_records(&p, &[rec(2, MutantVerdict::Live, None)]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("\"verdict\":\"killed-genuine\""));
        let back = read_records(&p).unwrap();
        assert_eq!(back[1], rec(2, MutantVerdict::Live, None));
    }

    #[test]
    fn malformed_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ndjson");
        std::fs::write(&p, "\n{oops}\n").unwrap();
        let e = read_records(&p).unwrap_err().to_string();
        assert!(e.contains(":2:"), "{e}");
    }
}
