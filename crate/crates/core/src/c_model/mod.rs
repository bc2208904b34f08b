//! Type model for the supported subset of C declarations.
//!
//! The subset covers typedefs, struct/union/enum definitions, the primitive
//! integer and floating kinds, pointers, fixed-length arrays and function
//! prototypes or definitions. Bitfields, function pointers, variadics,
//! `_Atomic`, VLAs and anonymous members are diagnosed.

mod layout;
mod parser;
mod probe;
mod render;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexer::{LexError, Location};

pub use layout::{layout_of, AbiProfile, Layout};
pub use parser::{parse_declarations, ParseConfig, Parsed};
pub use probe::{emit_layout_probe, parse_probe_output, reconcile_layouts, Mismatch, MismatchWhat, ProbeRecord, ProbeTarget};
pub use render::{render_declarations, render_type, TypeRenderer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntWidth {
    W8,
    W16,
    W32,
    W64,
}

impl IntWidth {
    pub fn bytes(self) -> u64 {
        match self {
            IntWidth::W8 => 1,
            IntWidth::W16 => 2,
            IntWidth::W32 => 4,
            IntWidth::W64 => 8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bytes() as u32 * 8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub ty: CType,
}

/// A struct or union. `fields == None` is a reference to a tag defined
/// elsewhere (`struct node *next`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Record {
    pub tag: Option<String>,
    pub fields: Option<Vec<Field>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Enumerator {
    pub name: String,
    pub value: i64,
}

/// Enums always have a 32-bit signed underlying type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumDef {
    pub tag: Option<String>,
    pub enumerators: Option<Vec<Enumerator>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CType {
    Void,
    Bool,
    Char,
    Int { signed: bool, width: IntWidth },
    Float32,
    Float64,
    Enum(EnumDef),
    Struct(Record),
    Union(Record),
    Pointer { pointee: Box<CType> },
    Array { element: Box<CType>, length: u64 },
    Alias { name: String },
}

impl CType {
    pub fn int(signed: bool, width: IntWidth) -> Self {
        CType::Int { signed, width }
    }

    pub fn pointer(pointee: CType) -> Self {
        CType::Pointer { pointee: Box::new(pointee) }
    }

    pub fn array(element: CType, length: u64) -> Self {
        CType::Array { element: Box::new(element), length }
    }

    pub fn alias(name: impl Into<String>) -> Self {
        CType::Alias { name: name.into() }
    }

    pub fn is_pointer(&self) -> bool {
        matches!(self, CType::Pointer { .. })
    }

    /// Primitive scalar kinds (no aggregates, enums, pointers or aliases).
    pub fn is_primitive(&self) -> bool {
        matches!(
            self,
            CType::Bool | CType::Char | CType::Int { .. } | CType::Float32 | CType::Float64
        )
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_type(self, ""))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    #[default]
    Auto,
    Input,
    Output,
    InOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: CType,
    #[serde(default)]
    pub role: Role,
    /// Number of pointed elements the drivers read, compare and print.
    pub pointed_length: Option<u64>,
    /// Declared with array syntax (`int a[]`, `int a[8]`) and decayed to a pointer.
    #[serde(default)]
    pub array_decl: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionSignature {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: CType,
}

impl FunctionSignature {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Declaration order entry, kept so the environment can be printed back.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "decl", content = "name", rename_all = "snake_case")]
pub enum Decl {
    Typedef(String),
    Tag(String),
    Function(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEnvironment {
    pub typedefs: IndexMap<String, CType>,
    /// struct/union/enum definitions by tag (one shared namespace, as in C).
    pub tags: IndexMap<String, CType>,
    pub signatures: IndexMap<String, FunctionSignature>,
    pub order: Vec<Decl>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum CModelError {
    #[error("{location}: syntax error: {message}")]
    Syntax { location: Location, message: String },
    #[error("{location}: unsupported construct: {construct}")]
    Unsupported { location: Location, construct: String },
    #[error("unresolvable type: {0}")]
    UnresolvableType(String),
    #[error("malformed probe output: {0}")]
    MalformedProbeOutput(String),
}

impl From<LexError> for CModelError {
    fn from(e: LexError) -> Self {
        CModelError::Syntax { location: e.location, message: e.message }
    }
}

const MAX_RESOLVE_DEPTH: usize = 64;

impl TypeEnvironment {
    /// Follow aliases and tag references until a concrete type is reached.
    pub fn resolve<'a>(&'a self, ty: &'a CType) -> Result<&'a CType, CModelError> {
        let mut cur = ty;
        for _ in 0..MAX_RESOLVE_DEPTH {
            cur = match cur {
                CType::Alias { name } => self
                    .typedefs
                    .get(name)
                    .ok_or_else(|| CModelError::UnresolvableType(name.clone()))?,
                CType::Struct(Record { tag: Some(tag), fields: None })
                | CType::Union(Record { tag: Some(tag), fields: None })
                | CType::Enum(EnumDef { tag: Some(tag), enumerators: None }) => {
                    let def = self
                        .tags
                        .get(tag)
                        .ok_or_else(|| CModelError::UnresolvableType(format!("tag {tag}")))?;
                    let same_kind = std::mem::discriminant(def) == std::mem::discriminant(cur);
                    if !same_kind {
                        return Err(CModelError::UnresolvableType(format!("tag {tag} used with the wrong kind")));
                    }
                    def
                }
                CType::Struct(Record { tag: None, fields: None }) | CType::Union(Record { tag: None, fields: None }) => {
                    return Err(CModelError::UnresolvableType("anonymous record without body".into()))
                }
                other => return Ok(other),
            };
        }
        Err(CModelError::UnresolvableType(format!("cyclic alias chain at {ty}")))
    }

    /// Name the alias chain from `ty` ends with, if `ty` passes through
    /// `name` on the way to its concrete type.
    pub fn alias_chain_contains(&self, ty: &CType, name: &str) -> bool {
        let mut cur = ty;
        for _ in 0..MAX_RESOLVE_DEPTH {
            match cur {
                CType::Alias { name: n } if n == name => return true,
                CType::Alias { name: n } => match self.typedefs.get(n) {
                    Some(t) => cur = t,
                    None => return false,
                },
                _ => return false,
            }
        }
        false
    }

    /// Value of every enumerator visible in the environment.
    pub fn enum_constants(&self) -> IndexMap<String, i64> {
        fn collect(ty: &CType, out: &mut IndexMap<String, i64>) {
            match ty {
                CType::Enum(EnumDef { enumerators: Some(list), .. }) => {
                    for e in list {
                        out.insert(e.name.clone(), e.value);
                    }
                }
                CType::Struct(Record { fields: Some(fields), .. }) | CType::Union(Record { fields: Some(fields), .. }) => {
                    for f in fields {
                        collect(&f.ty, out);
                    }
                }
                CType::Pointer { pointee: t } | CType::Array { element: t, .. } => collect(t, out),
                _ => {}
            }
        }
        let mut out = IndexMap::new();
        for ty in self.typedefs.values().chain(self.tags.values()) {
            collect(ty, &mut out);
        }
        out
    }

    /// Check the environment-level invariants: every alias chain resolves
    /// and every signature's types resolve.
    pub fn validate(&self) -> Result<(), CModelError> {
        for ty in self.typedefs.values() {
            self.resolve(ty)?;
        }
        for sig in self.signatures.values() {
            for p in &sig.params {
                self.resolve_deep(&p.ty)?;
            }
            self.resolve_deep(&sig.return_type)?;
        }
        Ok(())
    }

    fn resolve_deep(&self, ty: &CType) -> Result<(), CModelError> {
        match self.resolve(ty)? {
            CType::Pointer { pointee } => match pointee.as_ref() {
                // incomplete pointee types are legal behind a pointer
                CType::Void => Ok(()),
                other => self.resolve(other).map(|_| ()),
            },
            CType::Array { element, .. } => self.resolve_deep(element),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_follows_alias_chain() {
        let mut env = TypeEnvironment::default();
        env.typedefs.insert("a".into(), CType::int(true, IntWidth::W32));
        env.typedefs.insert("b".into(), CType::alias("a"));
        assert_eq!(env.resolve(&CType::alias("b")).unwrap(), &CType::int(true, IntWidth::W32));
        assert!(env.alias_chain_contains(&CType::alias("b"), "a"));
        assert!(!env.alias_chain_contains(&CType::alias("a"), "b"));
    }

    #[test]
    fn cyclic_alias_is_unresolvable() {
        let mut env = TypeEnvironment::default();
        env.typedefs.insert("a".into(), CType::alias("b"));
        env.typedefs.insert("b".into(), CType::alias("a"));
        assert!(matches!(env.resolve(&CType::alias("a")), Err(CModelError::UnresolvableType(_))));
        assert!(env.validate().is_err());
    }

    #[test]
    fn missing_tag_is_unresolvable() {
        let env = TypeEnvironment::default();
        let r = CType::Struct(Record { tag: Some("nope".into()), fields: None });
        assert!(env.resolve(&r).is_err());
    }
}
