//! Summaries, kill curves and store comparison.

use std::collections::BTreeSet;
use std::fmt::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::fisher::fisher_exact;
use super::records::{CampaignRecord, MutantVerdict};
use crate::fuzz::KillOrigin;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub counts: IndexMap<String, usize>,
    pub killed: usize,
    /// Killed, live and live-fp-only mutants.
    pub scored: usize,
    pub score: Option<f64>,
    pub seed_kills: usize,
    pub fuzzed_kills: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillCurve {
    pub run_id: String,
    /// `(seconds, percent of scored mutants killed by then)`.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub runs: Vec<RunSummary>,
    pub mean_killed: f64,
    pub mean_scored: f64,
    pub score: Option<f64>,
    pub curves: Vec<KillCurve>,
}

pub fn mutation_score(killed: f64, scored: f64) -> Option<f64> {
    (scored > 0.0).then(|| 100.0 * killed / scored)
}

pub fn format_score(score: Option<f64>) -> String {
    score.map_or_else(|| "n/a".to_string(), |s| format!("{s:.2}%"))
}

fn by_run(records: &[CampaignRecord]) -> IndexMap<&str, Vec<&CampaignRecord>> {
    let mut runs: IndexMap<&str, Vec<&CampaignRecord>> = IndexMap::new();
    for r in records {
        runs.entry(r.run_id.as_str()).or_default().push(r);
    }
    runs
}

fn summarize_run(run_id: &str, recs: &[&CampaignRecord]) -> RunSummary {
    let mut counts: IndexMap<String, usize> = MutantVerdict::ALL.iter().map(|v| (v.name().to_string(), 0)).collect();
    for r in recs {
        *counts.entry(r.verdict.name().to_string()).or_default() += 1;
    }
    let killed = recs.iter().filter(|r| r.verdict == MutantVerdict::KilledGenuine).count();
    let scored = recs.iter().filter(|r| r.verdict.is_scored()).count();
    let origin = |o| {
        recs.iter().filter(|r| r.verdict == MutantVerdict::KilledGenuine && r.kill_origin == Some(o)).count()
    };
    RunSummary {
        run_id: run_id.to_string(),
        counts,
        killed,
        scored,
        score: mutation_score(killed as f64, scored as f64),
        seed_kills: origin(KillOrigin::Seed),
        fuzzed_kills: origin(KillOrigin::Fuzzed),
    }
}

fn kill_times(recs: &[&CampaignRecord]) -> Vec<f64> {
    let mut t: Vec<f64> = recs
        .iter()
        .filter(|r| r.verdict == MutantVerdict::KilledGenuine)
        .map(|r| r.first_kill_seconds.unwrap_or(0.0))
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

/// Cumulative share of scored mutants killed, one point per distinct kill
/// time plus the origin.
pub fn kill_curve(run_id: &str, recs: &[&CampaignRecord]) -> KillCurve {
    let scored = recs.iter().filter(|r| r.verdict.is_scored()).count();
    let times = kill_times(recs);
    let mut points = Vec::new();
    if scored > 0 {
        let pct = |k: usize| 100.0 * k as f64 / scored as f64;
        points.push((0.0, pct(times.iter().filter(|&&t| t <= 0.0).count())));
        for (i, &t) in times.iter().enumerate() {
            if t <= 0.0 {
                continue;
            }
            let k = i + 1;
            match points.last_mut() {
                Some(last) if last.0 == t => last.1 = pct(k),
                _ => points.push((t, pct(k))),
            }
        }
    }
    KillCurve { run_id: run_id.to_string(), points }
}

pub fn summarize(records: &[CampaignRecord]) -> Report {
    let runs = by_run(records);
    let summaries: Vec<RunSummary> = runs.iter().map(|(id, recs)| summarize_run(id, recs)).collect();
    let n = summaries.len().max(1) as f64;
    let mean_killed = summaries.iter().map(|s| s.killed as f64).sum::<f64>() / n;
    let mean_scored = summaries.iter().map(|s| s.scored as f64).sum::<f64>() / n;
    Report {
        curves: runs.iter().map(|(id, recs)| kill_curve(id, recs)).collect(),
        runs: summaries,
        mean_killed,
        mean_scored,
        score: mutation_score(mean_killed, mean_scored),
    }
}

pub fn curves_csv(curves: &[KillCurve]) -> String {
    let mut out = String::from("run_id,t_seconds,pct_killed\n");
    for c in curves {
        for (t, p) in &c.points {
            let _ = writeln!(out, "{},{t:.3},{p:.4}", c.run_id);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherRow {
    pub t_seconds: f64,
    pub killed_a: u64,
    pub total_a: u64,
    pub killed_b: u64,
    pub total_b: u64,
    pub p_value: f64,
}

/// Fisher p-value of killed vs not-killed, pooled over runs, at every time
/// some mutant in either store was first killed.
pub fn compare(a: &[CampaignRecord], b: &[CampaignRecord]) -> Vec<FisherRow> {
    let pooled = |recs: &[CampaignRecord]| {
        let refs: Vec<&CampaignRecord> = recs.iter().collect();
        (kill_times(&refs), recs.iter().filter(|r| r.verdict.is_scored()).count() as u64)
    };
    let (ta, na) = pooled(a);
    let (tb, nb) = pooled(b);
    let mut grid: BTreeSet<u64> = ta.iter().chain(&tb).map(|t| t.to_bits()).collect();
    grid.insert(0f64.to_bits());
    let mut grid: Vec<f64> = grid.into_iter().map(f64::from_bits).collect();
    grid.sort_by(f64::total_cmp);
    grid.into_iter()
        .map(|t| {
            let ka = ta.iter().filter(|&&x| x <= t).count() as u64;
            let kb = tb.iter().filter(|&&x| x <= t).count() as u64;
            FisherRow {
                t_seconds: t,
                killed_a: ka,
                total_a: na,
                killed_b: kb,
                total_b: nb,
                p_value: fisher_exact(ka, na - ka, kb, nb - kb),
            }
        })
        .collect()
}

pub fn fisher_table(rows: &[FisherRow], label_a: &str, label_b: &str) -> String {
    let mut out = format!("{:>10}  {:>14}  {:>14}  {:>10}\n", "t_seconds", label_a, label_b, "p_value");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>10.3}  {:>14}  {:>14}  {:>10.4e}",
            r.t_seconds,
            format!("{}/{}", r.killed_a, r.total_a),
            format!("{}/{}", r.killed_b, r.total_b),
            r.p_value
        );
    }
    out
}

/// Human-readable summary.
pub fn render_summary(report: &Report) -> String {
    let mut out = String::new();
    for s in &report.runs {
        let counts: Vec<String> = s.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "run {}: {}", s.run_id, counts.join(" "));
        let _ = writeln!(
            out,
            "  score {} ({}/{}), kills by seed {} fuzzed {}",
            format_score(s.score),
            s.killed,
            s.scored,
            s.seed_kills,
            s.fuzzed_kills
        );
    }
    let _ = writeln!(
        out,
        "mutation score: {} (mean killed {:.1} of {:.1})",
        format_score(report.score),
        report.mean_killed,
        report.mean_scored
    );
    out
}
