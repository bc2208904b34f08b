use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{CModelError, CType, IntWidth, Record, TypeEnvironment};

/// Size and alignment of every primitive kind. Aggregates use natural
/// alignment with trailing padding up to the aggregate's alignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbiProfile {
    pub name: String,
    pub bool_: (u64, u64),
    pub char_: (u64, u64),
    pub int8: (u64, u64),
    pub int16: (u64, u64),
    pub int32: (u64, u64),
    pub int64: (u64, u64),
    pub float32: (u64, u64),
    pub float64: (u64, u64),
    pub pointer: (u64, u64),
    pub enum_: (u64, u64),
}

impl AbiProfile {
    /// 64-bit little-endian, natural alignment (x86-64 / AArch64 SysV).
    pub fn lp64() -> Self {
        AbiProfile {
            name: "lp64".into(),
            bool_: (1, 1),
            char_: (1, 1),
            int8: (1, 1),
            int16: (2, 2),
            int32: (4, 4),
            int64: (8, 8),
            float32: (4, 4),
            float64: (8, 8),
            pointer: (8, 8),
            enum_: (4, 4),
        }
    }

    /// 32-bit i386 SysV: 8-byte scalars are only 4-byte aligned.
    pub fn ilp32_i386() -> Self {
        AbiProfile { name: "ilp32-i386".into(), int64: (8, 4), float64: (8, 4), pointer: (4, 4), ..Self::lp64() }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "lp64" => Some(Self::lp64()),
            "ilp32-i386" => Some(Self::ilp32_i386()),
            _ => None,
        }
    }

    fn int(&self, width: IntWidth) -> (u64, u64) {
        match width {
            IntWidth::W8 => self.int8,
            IntWidth::W16 => self.int16,
            IntWidth::W32 => self.int32,
            IntWidth::W64 => self.int64,
        }
    }
}

impl Default for AbiProfile {
    fn default() -> Self {
        Self::lp64()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub size: u64,
    pub align: u64,
    /// Struct fields only, in declaration order.
    pub field_offsets: IndexMap<String, u64>,
}

impl Layout {
    fn scalar((size, align): (u64, u64)) -> Self {
        Layout { size, align, field_offsets: IndexMap::new() }
    }
}

fn round_up(n: u64, align: u64) -> u64 {
    n.div_ceil(align) * align
}

/// Compute the layout of `ty` under `abi`.
pub fn layout_of(ty: &CType, env: &TypeEnvironment, abi: &AbiProfile) -> Result<Layout, CModelError> {
    let mut active = Vec::new();
    layout_inner(ty, env, abi, &mut active)
}

fn layout_inner(ty: &CType, env: &TypeEnvironment, abi: &AbiProfile, active: &mut Vec<String>) -> Result<Layout, CModelError> {
    let resolved = env.resolve(ty)?;
    Ok(match resolved {
        CType::Void => return Err(CModelError::UnresolvableType("void has no size".into())),
        CType::Bool => Layout::scalar(abi.bool_),
        CType::Char => Layout::scalar(abi.char_),
        CType::Int { width, .. } => Layout::scalar(abi.int(*width)),
        CType::Float32 => Layout::scalar(abi.float32),
        CType::Float64 => Layout::scalar(abi.float64),
        CType::Enum(_) => Layout::scalar(abi.enum_),
        CType::Pointer { .. } => Layout::scalar(abi.pointer),
        CType::Array { element, length } => {
            let e = layout_inner(element, env, abi, active)?;
            Layout { size: e.size * length, align: e.align, field_offsets: IndexMap::new() }
        }
        CType::Struct(rec) | CType::Union(rec) => {
            let is_union = matches!(resolved, CType::Union(_));
            let Record { tag, fields } = rec;
            let fields = fields.as_ref().expect("resolve returns definitions");
            if let Some(tag) = tag {
                if active.contains(tag) {
                    return Err(CModelError::UnresolvableType(format!("{tag} contains itself")));
                }
                active.push(tag.clone());
            }
            let mut size = 0u64;
            let mut align = 1u64;
            let mut offsets = IndexMap::new();
            for f in fields {
                let fl = layout_inner(&f.ty, env, abi, active)?;
                align = align.max(fl.align);
                if is_union {
                    size = size.max(fl.size);
                } else {
                    let off = round_up(size, fl.align);
                    offsets.insert(f.name.clone(), off);
                    size = off + fl.size;
                }
            }
            if tag.is_some() {
                active.pop();
            }
            Layout { size: round_up(size, align), align, field_offsets: offsets }
        }
        CType::Alias { .. } => unreachable!("resolve strips aliases"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c_model::{parse_declarations, ParseConfig};

    fn env_of(src: &str) -> TypeEnvironment {
        let p = parse_declarations(src, &ParseConfig::default()).unwrap();
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        p.env
    }

    fn layout(src: &str, name: &str) -> Layout {
        let env = env_of(src);
        layout_of(&CType::alias(name), &env, &AbiProfile::lp64()).unwrap()
    }

    #[test]
    fn int32_is_four_bytes() {
        let l = layout_of(&CType::int(true, IntWidth::W32), &TypeEnvironment::default(), &AbiProfile::lp64()).unwrap();
        assert_eq!((l.size, l.align), (4, 4));
    }

    #[test]
    fn char_int_struct_is_padded() {
        let l = layout("typedef struct { char c; int i; } s;", "s");
        assert_eq!((l.size, l.align), (8, 4));
        assert_eq!(l.field_offsets["c"], 0);
        assert_eq!(l.field_offsets["i"], 4);
    }

    #[test]
    fn union_takes_largest_member_rounded_to_alignment() {
        // a 4-byte member and an 8,052-byte struct member
        let l = layout("typedef struct { int n; int a[2012]; } big; typedef union { int x; big b; } u;", "u");
        assert_eq!((l.size, l.align), (8052, 4));
        let l = layout("typedef union { char c[5]; int i; } u;", "u");
        assert_eq!((l.size, l.align), (8, 4));
    }

    #[test]
    fn trailing_padding_and_nested_alignment() {
        let l = layout("typedef struct { double d; char c; } s;", "s");
        assert_eq!((l.size, l.align), (16, 8));
        let l = layout("typedef struct { char a; struct { short s; char t; } in; char b; } s;", "s");
        assert_eq!(l.field_offsets.values().copied().collect::<Vec<_>>(), [0, 2, 6]);
        assert_eq!(l.size, 8);
    }

    #[test]
    fn i386_profile_packs_doubles() {
        let env = env_of("typedef struct { char c; double d; } s;");
        let l = layout_of(&CType::alias("s"), &env, &AbiProfile::ilp32_i386()).unwrap();
        assert_eq!((l.size, l.align), (12, 4));
    }

    #[test]
    fn self_containing_struct_is_unresolvable_but_pointer_is_fine() {
        let env = env_of("struct n { struct n *next; int v; };");
        let l = layout_of(&CType::Struct(Record { tag: Some("n".into()), fields: None }), &env, &AbiProfile::lp64()).unwrap();
        assert_eq!(l.size, 16);
        let mut env = env;
        let bad = CType::Struct(Record {
            tag: Some("m".into()),
            fields: Some(vec![super::super::Field { name: "m".into(), ty: CType::Struct(Record { tag: Some("m".into()), fields: None }) }]),
        });
        env.tags.insert("m".into(), bad.clone());
        assert!(layout_of(&bad, &env, &AbiProfile::lp64()).is_err());
    }

    #[test]
    fn enum_is_int_sized() {
        let l = layout("typedef enum { A, B } e;", "e");
        assert_eq!((l.size, l.align), (4, 4));
    }
}
