//! Generation of the C programs that exercise one function under test: the
//! differential fuzzing driver, the false-positive driver (original against
//! itself) and the test driver (original only, prints outputs).

mod emit;

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c_model::{layout_of, AbiProfile, CModelError, CType, FunctionSignature, IntWidth, TypeEnvironment};

pub use emit::{gen_false_positive_driver, gen_fuzzing_driver, gen_test_driver, RUNTIME_HEADER};

pub const DEFAULT_ARRAY_LENGTH: u64 = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckpointChannel {
    Stderr,
    #[default]
    File,
}

/// How many elements a pointer parameter designates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointerLengths {
    /// Used for parameters declared with array syntax and no size.
    pub array_default_length: u64,
    /// Per-parameter overrides.
    pub lengths: IndexMap<String, u64>,
}

impl Default for PointerLengths {
    fn default() -> Self {
        PointerLengths { array_default_length: DEFAULT_ARRAY_LENGTH, lengths: IndexMap::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriverSpec {
    pub signature: FunctionSignature,
    pub env: TypeEnvironment,
    pub abi: AbiProfile,
    pub lengths: PointerLengths,
    /// C statements run between the original and the mutated call.
    pub reset_snippet: Option<String>,
    pub checkpoint_channel: CheckpointChannel,
    /// Parameters left out of the output comparison.
    pub exclude_compare: BTreeSet<String>,
}

impl DriverSpec {
    pub fn new(signature: FunctionSignature, env: TypeEnvironment) -> Self {
        DriverSpec {
            signature,
            env,
            abi: AbiProfile::lp64(),
            lengths: PointerLengths::default(),
            reset_snippet: None,
            checkpoint_channel: CheckpointChannel::default(),
            exclude_compare: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverKind {
    Fuzzing,
    FalsePositive,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedDriver {
    pub kind: DriverKind,
    pub source: String,
    /// Bytes read from the input file for one set of arguments.
    pub consumed_input_bytes: u64,
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),
    #[error(transparent)]
    Model(#[from] CModelError),
}

/// Region of the input file that initializes one parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSlot {
    pub param: String,
    pub offset: u64,
    /// Total bytes of the region.
    pub size: u64,
    /// Type stored in the region: the parameter's type for values, the
    /// pointee for pointers (`unsigned char` for `void *`).
    pub value_type: CType,
    /// Element count when the parameter is a pointer.
    pub count: Option<u64>,
}

impl InputSlot {
    pub fn element_size(&self) -> u64 {
        self.size / self.count.unwrap_or(1).max(1)
    }
}

/// Element count for pointer parameter `name`.
pub fn pointer_length(sig: &FunctionSignature, name: &str, lengths: &PointerLengths) -> u64 {
    if let Some(n) = lengths.lengths.get(name) {
        return *n;
    }
    match sig.param(name) {
        Some(p) if p.array_decl => p.pointed_length.unwrap_or(lengths.array_default_length),
        Some(p) => p.pointed_length.unwrap_or(1),
        None => 1,
    }
}

/// Byte layout of the input file shared by every driver and seed file.
pub fn input_slots(
    sig: &FunctionSignature,
    env: &TypeEnvironment,
    abi: &AbiProfile,
    lengths: &PointerLengths,
) -> Result<Vec<InputSlot>, DriverError> {
    let mut offset = 0;
    let mut out = Vec::with_capacity(sig.params.len());
    for p in &sig.params {
        let resolved = env.resolve(&p.ty)?;
        let (value_type, count) = match resolved {
            CType::Void => {
                return Err(DriverError::UnsupportedSignature(format!("parameter `{}` has type void", p.name)))
            }
            CType::Pointer { pointee } => {
                let n = pointer_length(sig, &p.name, lengths);
                if n == 0 {
                    return Err(DriverError::UnsupportedSignature(format!("pointer `{}` has length 0", p.name)));
                }
                let target = match pointee.as_ref() {
                    CType::Void if lengths.lengths.contains_key(&p.name) => CType::int(false, IntWidth::W8),
                    CType::Void => {
                        return Err(DriverError::UnsupportedSignature(format!(
                            "`void *{}` needs a configured length",
                            p.name
                        )))
                    }
                    other => other.clone(),
                };
                match env.resolve(&target) {
                    Ok(CType::Pointer { .. }) => {
                        return Err(DriverError::UnsupportedSignature(format!(
                            "`{}` points to a pointer",
                            p.name
                        )))
                    }
                    Ok(CType::Void) => {
                        return Err(DriverError::UnsupportedSignature(format!("`{}` points to void", p.name)))
                    }
                    Ok(_) => {}
                    Err(e) => {
                        return Err(DriverError::UnsupportedSignature(format!(
                            "pointee of `{}` is not a complete type: {e}",
                            p.name
                        )))
                    }
                }
                (target, Some(n))
            }
            _ => (p.ty.clone(), None),
        };
        let elem = layout_of(&value_type, env, abi)?.size;
        let size = elem * count.unwrap_or(1);
        out.push(InputSlot { param: p.name.clone(), offset, size, value_type, count });
        offset += size;
    }
    Ok(out)
}

/// Sum of all slot sizes.
pub fn consumed_input_bytes(slots: &[InputSlot]) -> u64 {
    slots.iter().map(|s| s.size).sum()
}
