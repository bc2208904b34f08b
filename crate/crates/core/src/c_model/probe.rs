//! Layout probe: a generated C program whose output is the compiler's view
//! of each type's layout, and the comparison against computed layouts.
//!
//! Probe output grammar, one record per line:
//!
//! ```text
//! <name> <sizeof> <alignof> [<offsetof field>...]
//! ```
//!
//! Field offsets appear for structs only, in declaration order.

use std::fmt::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{render_declarations, render_type, CModelError, CType, EnumDef, Layout, Record, TypeEnvironment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeTarget {
    pub name: String,
    pub ty: CType,
}

impl ProbeTarget {
    pub fn new(name: impl Into<String>, ty: CType) -> Self {
        ProbeTarget { name: name.into(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRecord {
    pub name: String,
    pub size: u64,
    pub align: u64,
    pub offsets: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchWhat {
    Size,
    Align,
    Offset,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub type_name: String,
    pub field: Option<String>,
    pub what: MismatchWhat,
    pub computed: u64,
    pub observed: u64,
}

/// Tagged definitions already printed with the environment are referenced
/// by tag instead of being redefined.
fn as_reference(ty: &CType, env: &TypeEnvironment) -> CType {
    match ty {
        CType::Struct(Record { tag: Some(t), fields: Some(_) }) if env.tags.contains_key(t) => {
            CType::Struct(Record { tag: Some(t.clone()), fields: None })
        }
        CType::Union(Record { tag: Some(t), fields: Some(_) }) if env.tags.contains_key(t) => {
            CType::Union(Record { tag: Some(t.clone()), fields: None })
        }
        CType::Enum(EnumDef { tag: Some(t), enumerators: Some(_) }) if env.tags.contains_key(t) => {
            CType::Enum(EnumDef { tag: Some(t.clone()), enumerators: None })
        }
        CType::Pointer { pointee } => CType::pointer(as_reference(pointee, env)),
        CType::Array { element, length } => CType::array(as_reference(element, env), *length),
        other => other.clone(),
    }
}

/// Emit a standalone C program printing one probe record per target.
pub fn emit_layout_probe(env: &TypeEnvironment, targets: &[ProbeTarget]) -> Result<String, CModelError> {
    let mut out = String::from("#include <stdio.h>\n#include <stddef.h>\n\n");
    out.push_str(&render_declarations(env, false));
    let mut body = String::new();
    for (i, t) in targets.iter().enumerate() {
        if t.name.is_empty() || t.name.chars().any(char::is_whitespace) {
            return Err(CModelError::MalformedProbeOutput(format!("probe name `{}` must be a single word", t.name)));
        }
        let alias = format!("probe_t{i}");
        let resolved = env.resolve(&t.ty)?;
        let _ = writeln!(out, "typedef {};", render_type(&as_reference(&t.ty, env), &alias));
        let mut fmt = String::from("%s %zu %zu");
        let mut args = format!("\"{}\", sizeof({alias}), _Alignof({alias})", t.name);
        if let CType::Struct(Record { fields: Some(fields), .. }) = resolved {
            for f in fields {
                fmt.push_str(" %zu");
                let _ = write!(args, ", offsetof({alias}, {})", f.name);
            }
        }
        let _ = writeln!(body, "    printf(\"{fmt}\\n\", {args});");
    }
    let _ = write!(out, "\nint main(void)\n{{\n{body}    return 0;\n}}\n");
    Ok(out)
}

pub fn parse_probe_output(text: &str) -> Result<Vec<ProbeRecord>, CModelError> {
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let name = words.next().expect("non-empty line").to_string();
        let nums: Result<Vec<u64>, _> = words.map(str::parse::<u64>).collect();
        let nums = nums.map_err(|e| CModelError::MalformedProbeOutput(format!("line {}: {e}", n + 1)))?;
        if nums.len() < 2 {
            return Err(CModelError::MalformedProbeOutput(format!("line {}: expected size and alignment", n + 1)));
        }
        records.push(ProbeRecord { name, size: nums[0], align: nums[1], offsets: nums[2..].to_vec() });
    }
    Ok(records)
}

/// Compare computed layouts with probe output. Every computed entry must
/// have a probe record; a missing record means the output is truncated.
pub fn reconcile_layouts(computed: &IndexMap<String, Layout>, probe_output: &str) -> Result<Vec<Mismatch>, CModelError> {
    let records = parse_probe_output(probe_output)?;
    let by_name: IndexMap<&str, &ProbeRecord> = records.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut out = Vec::new();
    for (name, layout) in computed {
        let rec = by_name
            .get(name.as_str())
            .ok_or_else(|| CModelError::MalformedProbeOutput(format!("no record for `{name}`")))?;
        if rec.offsets.len() != layout.field_offsets.len() {
            return Err(CModelError::MalformedProbeOutput(format!(
                "`{name}`: {} offsets, expected {}",
                rec.offsets.len(),
                layout.field_offsets.len()
            )));
        }
        let mut push = |field: Option<&String>, what, computed: u64, observed: u64| {
            if computed != observed {
                out.push(Mismatch { type_name: name.clone(), field: field.cloned(), what, computed, observed });
            }
        };
        push(None, MismatchWhat::Size, layout.size, rec.size);
        push(None, MismatchWhat::Align, layout.align, rec.align);
        for ((field, &off), &seen) in layout.field_offsets.iter().zip(&rec.offsets) {
            push(Some(field), MismatchWhat::Offset, off, seen);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c_model::{layout_of, parse_declarations, AbiProfile, IntWidth, ParseConfig};

    fn computed(pairs: &[(&str, u64, u64, &[(&str, u64)])]) -> IndexMap<String, Layout> {
        pairs
            .iter()
            .map(|(n, s, a, offs)| {
                let field_offsets = offs.iter().map(|(f, o)| (f.to_string(), *o)).collect();
                (n.to_string(), Layout { size: *s, align: *a, field_offsets })
            })
            .collect()
    }

    #[test]
    fn emits_fixed_template_for_int() {
        let src = emit_layout_probe(&TypeEnvironment::default(), &[ProbeTarget::new("int32", CType::int(true, IntWidth::W32))]).unwrap();
        assert!(src.contains("typedef int probe_t0;"));
        assert!(src.contains("printf(\"%s %zu %zu\\n\", \"int32\", sizeof(probe_t0), _Alignof(probe_t0));"));
    }

    #[test]
    fn struct_probe_lists_offsets() {
        let env = parse_declarations("typedef struct { char c; int i; } s;", &ParseConfig::default()).unwrap().env;
        let src = emit_layout_probe(&env, &[ProbeTarget::new("s", CType::alias("s"))]).unwrap();
        assert!(src.contains("offsetof(probe_t0, c), offsetof(probe_t0, i)"));
    }

    #[test]
    fn empty_probe_prints_nothing() {
        let src = emit_layout_probe(&TypeEnvironment::default(), &[]).unwrap();
        assert!(!src.contains("printf"));
        assert!(src.contains("return 0;"));
    }

    #[test]
    fn tagged_definitions_are_not_redefined() {
        let env = parse_declarations("struct p { int x; };", &ParseConfig::default()).unwrap().env;
        let def = env.tags["p"].clone();
        let src = emit_layout_probe(&env, &[ProbeTarget::new("p", def)]).unwrap();
        assert!(src.contains("typedef struct p probe_t0;"));
    }

    #[test]
    fn matching_inputs_reconcile_cleanly() {
        let c = computed(&[("int32", 4, 4, &[]), ("s", 8, 4, &[("c", 0), ("i", 4)])]);
        assert_eq!(reconcile_layouts(&c, "int32 4 4\ns 8 4 0 4\n").unwrap(), vec![]);
    }

    #[test]
    fn size_difference_is_one_mismatch() {
        let c = computed(&[("s", 8, 4, &[("c", 0), ("i", 4)])]);
        let m = reconcile_layouts(&c, "s 12 4 0 4\n").unwrap();
        assert_eq!(m, vec![Mismatch { type_name: "s".into(), field: None, what: MismatchWhat::Size, computed: 8, observed: 12 }]);
    }

    #[test]
    fn truncated_output_is_malformed() {
        let c = computed(&[("int32", 4, 4, &[]), ("s", 8, 4, &[("c", 0), ("i", 4)])]);
        assert!(matches!(reconcile_layouts(&c, "int32 4 4\ns 8"), Err(CModelError::MalformedProbeOutput(_))));
        assert!(matches!(reconcile_layouts(&c, "int32 4 4\n"), Err(CModelError::MalformedProbeOutput(_))));
        assert!(matches!(reconcile_layouts(&c, "int32 4 x\n"), Err(CModelError::MalformedProbeOutput(_))));
    }

    #[test]
    fn computed_layouts_feed_reconcile() {
        let env = parse_declarations("typedef struct { char c; int i; } s;", &ParseConfig::default()).unwrap().env;
        let l = layout_of(&CType::alias("s"), &env, &AbiProfile::lp64()).unwrap();
        let mut c = IndexMap::new();
        c.insert("s".to_string(), l);
        assert!(reconcile_layouts(&c, "s 8 4 0 4").unwrap().is_empty());
    }
}
