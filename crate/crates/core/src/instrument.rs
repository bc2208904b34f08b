//! Source-level coverage instrumentation.
//!
//! Every unbraced `if`/`else`/loop body is wrapped in braces, then a call
//! `__motif_cov(ID);` is inserted after each `{` that opens a block (so at
//! function entry too) and after each `case`/`default`/named label.

use std::collections::BTreeSet;

use crate::cbody::{ScanError, Stmt, StmtParser, TokenizedSource};

pub const COVERAGE_CALLBACK: &str = "__motif_cov";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instrumented {
    pub source: String,
    /// Block ids in insertion order.
    pub block_ids: Vec<u16>,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Edit {
    Close,
    Open,
    Probe,
}

/// Instrument every function definition in `source`. Ids are derived from
/// `seed`, so two calls with the same arguments give the same text.
pub fn instrument(source: &str, type_names: &BTreeSet<String>, seed: u64) -> Result<Instrumented, ScanError> {
    let ts = TokenizedSource::new(source)?;
    let parser = StmtParser::new(&ts, type_names);
    let mut edits: Vec<(usize, Edit)> = Vec::new();
    for def in ts.function_definitions()? {
        let body = parser.body(&def)?;
        body.walk(&mut |s| {
            let mut wrap = |inner: &Stmt| {
                if !matches!(inner, Stmt::Compound { .. }) {
                    let span = ts.span(inner.range().clone());
                    edits.push((span.start, Edit::Open));
                    edits.push((span.end, Edit::Close));
                }
            };
            match s {
                Stmt::Compound { range, .. } => edits.push((ts.toks[range.start].span.end, Edit::Probe)),
                Stmt::If { then, els, .. } => {
                    wrap(then);
                    if let Some(e) = els {
                        wrap(e);
                    }
                }
                Stmt::While { body, .. } | Stmt::DoWhile { body, .. } | Stmt::For { body, .. } => wrap(body),
                Stmt::Labeled { colon, .. } => edits.push((ts.toks[*colon].span.end, Edit::Probe)),
                _ => {}
            }
        });
    }
    edits.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut ids = Vec::new();
    let next_id = |ids: &mut Vec<u16>| {
        let id = (splitmix64(seed ^ (ids.len() as u64).wrapping_mul(0x1000_0000_01b3)) & 0xffff) as u16;
        ids.push(id);
        id
    };
    let mut out = String::with_capacity(source.len() + edits.len() * 24);
    out.push_str(&format!("extern void {COVERAGE_CALLBACK}(unsigned short);\n"));
    let mut at = 0;
    for (offset, edit) in edits {
        out.push_str(&source[at..offset]);
        at = offset;
        match edit {
            Edit::Close => out.push_str(" }"),
            Edit::Open => {
                let id = next_id(&mut ids);
                out.push_str(&format!("{{ {COVERAGE_CALLBACK}({id}); "));
            }
            Edit::Probe => {
                let id = next_id(&mut ids);
                out.push_str(&format!(" {COVERAGE_CALLBACK}({id});"));
            }
        }
    }
    out.push_str(&source[at..]);
    Ok(Instrumented { source: out, block_ids: ids })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_ids(s: &str) -> String {
        let mut out = String::new();
        let mut rest = s;
        while let Some(i) = rest.find("__motif_cov(") {
            out.push_str(&rest[..i + 12]);
            rest = &rest[i + 12..];
            let close = rest.find(')').unwrap();
            if rest[..close].chars().all(|c| c.is_ascii_digit()) {
                out.push('N');
            } else {
                out.push_str(&rest[..close]);
            }
            rest = &rest[close..];
        }
        out.push_str(rest);
        out
    }

    #[test]
    fn braces_and_probes() {
        let src = "int f(int x){ if (x) x++; else x--; while (x > 3) x -= 2; return x; }";
        let got = instrument(src, &BTreeSet::new(), 1).unwrap();
        let body = strip_ids(got.source.lines().nth(1).unwrap());
        assert_eq!(
            body,
            "int f(int x){ __motif_cov(N); if (x) { __motif_cov(N); x++; } else { __motif_cov(N); x--; } \
             while (x > 3) { __motif_cov(N); x -= 2; } return x; }"
        );
        assert_eq!(got.block_ids.len(), 4);
    }

    #[test]
    fn switch_labels_and_else_if() {
        let src = "int f(int x){ switch (x) { case 1: return 2; default: break; } if (x) return 1; else if (x > 2) return 3; return 0; }";
        let got = instrument(src, &BTreeSet::new(), 7).unwrap();
        let s = strip_ids(&got.source);
        assert!(s.contains("case 1: __motif_cov(N); return 2;"));
        assert!(s.contains("default: __motif_cov(N); break;"));
        assert!(s.contains("else { __motif_cov(N); if (x > 2) { __motif_cov(N); return 3; } }"));
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let src = "int f(int x){ do x--; while (x); return x; }";
        let a = instrument(src, &BTreeSet::new(), 3).unwrap();
        assert_eq!(a, instrument(src, &BTreeSet::new(), 3).unwrap());
        assert_ne!(a.block_ids, instrument(src, &BTreeSet::new(), 4).unwrap().block_ids);
        assert!(strip_ids(&a.source).contains("do { __motif_cov(N); x--; } while (x);"));
    }
}
