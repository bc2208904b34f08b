//! Seed files: every parameter region filled with the first, second and
//! third seed value of its type.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c_model::{layout_of, AbiProfile, CModelError, CType, FunctionSignature, IntWidth, TypeEnvironment};
use crate::driver_synth::{input_slots, DriverError, PointerLengths};

/// Seconds of 2038-01-01T00:00:00Z.
const Y2038: i64 = 2_145_916_800;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTable {
    /// Typedef names holding ISO8601 timestamps, encoded as 64-bit epoch
    /// seconds followed by 32-bit nanoseconds.
    pub timestamp_types: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFile {
    /// 1-based.
    pub index: u8,
    pub bytes: Vec<u8>,
}

impl SeedFile {
    pub fn file_name(&self) -> String {
        format!("seed_{}", self.index)
    }
}

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Model(#[from] CModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn int_seeds(bytes: usize) -> Vec<Vec<u8>> {
    let mut one = vec![0u8; bytes];
    one[0] = 1;
    vec![vec![0xFF; bytes], vec![0; bytes], one]
}

fn timestamp(secs: i64, nanos: u32) -> Vec<u8> {
    let mut v = secs.to_le_bytes().to_vec();
    v.extend_from_slice(&nanos.to_le_bytes());
    v
}

/// How a pattern covers a region larger than itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    /// Repeat the pattern (aggregates, arrays).
    Tile,
    /// Pattern once, rest zero (timestamps inside wider records).
    Pad,
}

/// Seed byte patterns for `ty`, with the way they fill a region. Aggregates
/// and enums use the 4-byte int pattern; arrays of primitives use their
/// element's pattern.
pub fn seed_pattern(
    ty: &CType,
    env: &TypeEnvironment,
    abi: &AbiProfile,
    table: &SeedTable,
) -> Result<(Vec<Vec<u8>>, Fill), SeedError> {
    if table.timestamp_types.iter().any(|t| env.alias_chain_contains(ty, t)) {
        let seeds = vec![timestamp(Y2038, 999_999_999), timestamp(0, 0), timestamp(Y2038, 0)];
        return Ok((seeds, Fill::Pad));
    }
    let resolved = env.resolve(ty)?;
    let seeds = match resolved {
        CType::Void => return Err(SeedError::UnsupportedType("void".into())),
        CType::Bool => vec![vec![0], vec![1]],
        CType::Char | CType::Int { width: IntWidth::W8, .. } => vec![vec![0xFF], vec![0x00], vec![0x41]],
        CType::Int { width, .. } => int_seeds(width.bytes() as usize),
        CType::Float32 => [-3_230_283_776.0f32, 0.0, 1_072_693_248.0].iter().map(|v| v.to_le_bytes().to_vec()).collect(),
        CType::Float64 => [13_826_050_856_027_422_720.0f64, 0.0, 4_602_891_378_046_628_864.0]
            .iter()
            .map(|v| v.to_le_bytes().to_vec())
            .collect(),
        CType::Array { element, .. } if env.resolve(element).map(CType::is_primitive).unwrap_or(false) => {
            return seed_pattern(element, env, abi, table).map(|(s, _)| (s, Fill::Tile))
        }
        CType::Pointer { .. } => return Err(SeedError::UnsupportedType(format!("pointer value {ty}"))),
        CType::Enum(_) | CType::Struct(_) | CType::Union(_) | CType::Array { .. } => int_seeds(4),
        CType::Alias { .. } => unreachable!("resolved"),
    };
    debug_assert!(
        !resolved.is_primitive() || seeds.iter().all(|s| s.len() as u64 == layout_of(resolved, env, abi).map_or(0, |l| l.size)),
        "pattern size differs from layout for {ty}"
    );
    Ok((seeds, Fill::Tile))
}

fn fill(region: &mut [u8], pattern: &[u8], how: Fill) {
    match how {
        Fill::Tile => {
            for (dst, src) in region.iter_mut().zip(pattern.iter().cycle()) {
                *dst = *src;
            }
        }
        Fill::Pad => {
            let n = region.len().min(pattern.len());
            region[..n].copy_from_slice(&pattern[..n]);
            region[n..].fill(0);
        }
    }
}

/// At most three seed files covering every seed value of every parameter.
pub fn generate_seeds(
    sig: &FunctionSignature,
    env: &TypeEnvironment,
    abi: &AbiProfile,
    lengths: &PointerLengths,
    table: &SeedTable,
) -> Result<Vec<SeedFile>, SeedError> {
    let slots = input_slots(sig, env, abi, lengths)?;
    let total: u64 = slots.iter().map(|s| s.size).sum();
    let patterns = slots
        .iter()
        .map(|s| seed_pattern(&s.value_type, env, abi, table))
        .collect::<Result<Vec<_>, _>>()?;
    let files = patterns.iter().map(|(p, _)| p.len()).max().unwrap_or(1);
    let mut out = Vec::with_capacity(files);
    for k in 0..files {
        let mut bytes = vec![0u8; total as usize];
        for (slot, (pats, how)) in slots.iter().zip(&patterns) {
            let pattern = &pats[k.min(pats.len() - 1)];
            let region = &mut bytes[slot.offset as usize..(slot.offset + slot.size) as usize];
            fill(region, pattern, *how);
        }
        out.push(SeedFile { index: k as u8 + 1, bytes });
    }
    Ok(out)
}

/// Write `seed_1`.. into `dir`.
pub fn write_seeds(dir: &Path, seeds: &[SeedFile]) -> Result<Vec<PathBuf>, SeedError> {
    std::fs::create_dir_all(dir)?;
    seeds
        .iter()
        .map(|s| {
            let path = dir.join(s.file_name());
            std::fs::write(&path, &s.bytes)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c_model::{parse_declarations, ParseConfig};

    fn seeds(src: &str, table: &SeedTable) -> Vec<Vec<u8>> {
        let env = parse_declarations(src, &ParseConfig::default()).unwrap().env;
        let sig = env.signatures.values().next().unwrap().clone();
        generate_seeds(&sig, &env, &AbiProfile::lp64(), &PointerLengths::default(), table)
            .unwrap()
            .into_iter()
            .map(|s| s.bytes)
            .collect()
    }

    #[test]
    fn bool_gives_two_files() {
        assert_eq!(seeds("int f(_Bool b);", &SeedTable::default()), [vec![0], vec![1]]);
    }

    #[test]
    fn bool_reuses_second_seed_when_int_needs_third() {
        let got = seeds("int f(_Bool b, short s);", &SeedTable::default());
        assert_eq!(got, [vec![0, 0xFF, 0xFF], vec![1, 0, 0], vec![1, 1, 0]]);
    }

    #[test]
    fn chars_and_doubles() {
        let got = seeds("int f(char c, double d);", &SeedTable::default());
        assert_eq!(got[2][0], 0x41);
        assert_eq!(f64::from_le_bytes(got[0][1..].try_into().unwrap()), 13_826_050_856_027_422_720.0);
    }

    #[test]
    fn timestamps_from_config() {
        let table = SeedTable { timestamp_types: ["stamp_t".to_string()].into() };
        let got = seeds("typedef struct { long long s; unsigned ns; } stamp_t; int f(stamp_t t);", &table);
        assert_eq!(got[0].len(), 16);
        assert_eq!(i64::from_le_bytes(got[0][..8].try_into().unwrap()), 2_145_916_800);
        assert_eq!(u32::from_le_bytes(got[0][8..12].try_into().unwrap()), 999_999_999);
        assert_eq!(&got[0][12..], [0, 0, 0, 0]);
        assert!(got[1].iter().all(|&b| b == 0));
    }

    #[test]
    fn no_params_gives_one_empty_file() {
        assert_eq!(seeds("int f(void);", &SeedTable::default()), [Vec::<u8>::new()]);
    }

    #[test]
    fn void_is_unsupported() {
        let env = TypeEnvironment::default();
        let e = seed_pattern(&CType::Void, &env, &AbiProfile::lp64(), &SeedTable::default());
        assert!(matches!(e, Err(SeedError::UnsupportedType(_))));
    }
}
