use std::ops::Range;

use super::{Mutant, MutantStatus, MutagenError, MutationSite, Operator};
use crate::cbody::TokenizedSource;
use crate::lexer::{self, TokenKind};

pub const MUTANT_PREFIX: &str = "mut_";

/// `<function>.mut<id>.<operator>.c`
pub fn mutant_file_name(function: &str, id: u32, op: Operator) -> String {
    format!("{function}.mut{id}.{op}.c")
}

fn replacements(site: &MutationSite) -> Vec<String> {
    let op = site.operator;
    match op {
        Operator::Aor | Operator::Ror | Operator::Lcr | Operator::Bwr => op
            .class()
            .iter()
            .filter(|t| **t != site.original)
            .map(|t| t.to_string())
            .collect(),
        Operator::Uoi => op.class().iter().map(|u| format!("({u}{})", site.original)).collect(),
        Operator::Icr => {
            let Some((value, suffix)) = lexer::parse_int_literal(&site.original) else { return Vec::new() };
            let c = value as i128;
            let mut out: Vec<i128> = Vec::new();
            for v in [0, 1, -1, c + 1, c - 1] {
                if v != c && !out.contains(&v) && v <= u64::MAX as i128 {
                    out.push(v);
                }
            }
            out.into_iter()
                .map(|v| if v < 0 { format!("(-{}{suffix})", -v) } else { format!("{v}{suffix}") })
                .collect()
        }
        Operator::Sdl => vec![";".to_string()],
    }
}

fn rename_spans(source: &str, function: &str) -> Result<Vec<Range<usize>>, MutagenError> {
    let ts = TokenizedSource::new(source)?;
    let def = ts.find_definition(function)?;
    Ok((def.name_tok..def.body.end)
        .filter(|&i| ts.kind(i) == Some(TokenKind::Ident) && ts.text(i) == function)
        .map(|i| ts.toks[i].span.clone())
        .collect())
}

fn splice(source: &str, site: &Range<usize>, replacement: &str, renames: &[Range<usize>], new_name: &str) -> String {
    let mut edits: Vec<(Range<usize>, &str)> = renames
        .iter()
        .filter(|r| r.end <= site.start || r.start >= site.end)
        .map(|r| (r.clone(), new_name))
        .collect();
    edits.push((site.clone(), replacement));
    edits.sort_by_key(|(r, _)| r.start);
    let mut out = String::with_capacity(source.len() + 16);
    let mut at = 0;
    for (r, text) in edits {
        out.push_str(&source[at..r.start]);
        out.push_str(text);
        at = r.end;
    }
    out.push_str(&source[at..]);
    out
}

/// One mutant per alternative of each site, numbered from 1 in site order.
pub fn generate_mutants(source: &str, sites: &[MutationSite]) -> Result<Vec<Mutant>, MutagenError> {
    let mut out = Vec::new();
    let mut renames: Option<(String, Vec<Range<usize>>)> = None;
    for site in sites {
        if renames.as_ref().map(|(f, _)| f != &site.function).unwrap_or(true) {
            renames = Some((site.function.clone(), rename_spans(source, &site.function)?));
        }
        let (_, spans) = renames.as_ref().expect("set above");
        let new_name = format!("{MUTANT_PREFIX}{}", site.function);
        for replacement in replacements(site) {
            let id = out.len() as u32 + 1;
            out.push(Mutant {
                id,
                mutated_source: splice(source, &(site.start..site.end), &replacement, spans, &new_name),
                site: site.clone(),
                operator: site.operator,
                original_token: site.original.clone(),
                replacement_token: replacement,
                status: MutantStatus::Pending,
            });
        }
    }
    Ok(out)
}
