//! Input mutation stages.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const ARITH_MAX: u32 = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum Stage {
    BitFlip { bits: u8 },
    ByteFlip { bytes: u8 },
    Arith { width: u8 },
    Interesting { width: u8 },
    Havoc,
    Splice,
}

impl Stage {
    pub const ALL: [Stage; 14] = [
        Stage::BitFlip { bits: 1 },
        Stage::BitFlip { bits: 2 },
        Stage::BitFlip { bits: 4 },
        Stage::ByteFlip { bytes: 1 },
        Stage::ByteFlip { bytes: 2 },
        Stage::ByteFlip { bytes: 4 },
        Stage::Arith { width: 1 },
        Stage::Arith { width: 2 },
        Stage::Arith { width: 4 },
        Stage::Interesting { width: 1 },
        Stage::Interesting { width: 2 },
        Stage::Interesting { width: 4 },
        Stage::Havoc,
        Stage::Splice,
    ];
}

const INTERESTING_8: [i8; 5] = [-1, 0, 1, i8::MIN, i8::MAX];
const INTERESTING_16: [i16; 7] = [-1, 0, 1, i16::MIN, i16::MAX, i8::MIN as i16, i8::MAX as i16];
const INTERESTING_32: [i32; 9] =
    [-1, 0, 1, i32::MIN, i32::MAX, i16::MIN as i32, i16::MAX as i32, i8::MIN as i32, i8::MAX as i32];

/// Flip `n` consecutive bits starting at bit `pos`; bit 0 is the least
/// significant bit of byte 0.
pub fn flip_bits(buf: &mut [u8], pos: usize, n: usize) {
    for b in pos..pos + n {
        if let Some(byte) = buf.get_mut(b / 8) {
            *byte ^= 1 << (b % 8);
        }
    }
}

/// Add `delta` to the little-endian integer of `width` bytes at `pos`
/// (big-endian when `big` is set), wrapping.
pub fn add_at(buf: &mut [u8], pos: usize, width: usize, delta: i64, big: bool) {
    let Some(slot) = buf.get_mut(pos..pos + width) else { return };
    let mut raw = [0u8; 8];
    if big {
        for (i, b) in slot.iter().rev().enumerate() {
            raw[i] = *b;
        }
    } else {
        raw[..width].copy_from_slice(slot);
    }
    let v = u64::from_le_bytes(raw).wrapping_add(delta as u64).to_le_bytes();
    if big {
        for (i, b) in slot.iter_mut().rev().enumerate() {
            *b = v[i];
        }
    } else {
        slot.copy_from_slice(&v[..width]);
    }
}

fn set_int(buf: &mut [u8], pos: usize, width: usize, value: i64, big: bool) {
    let Some(slot) = buf.get_mut(pos..pos + width) else { return };
    let le = value.to_le_bytes();
    if big {
        for (i, b) in slot.iter_mut().rev().enumerate() {
            *b = le[i];
        }
    } else {
        slot.copy_from_slice(&le[..width]);
    }
}

fn interesting(rng: &mut ChaCha8Rng, width: usize) -> i64 {
    match width {
        1 => INTERESTING_8[rng.random_range(0..INTERESTING_8.len())] as i64,
        2 => INTERESTING_16[rng.random_range(0..INTERESTING_16.len())] as i64,
        _ => INTERESTING_32[rng.random_range(0..INTERESTING_32.len())] as i64,
    }
}

fn delta(rng: &mut ChaCha8Rng) -> i64 {
    let d = rng.random_range(1..=ARITH_MAX) as i64;
    if rng.random() {
        d
    } else {
        -d
    }
}

fn pick_width(rng: &mut ChaCha8Rng, len: usize) -> Option<usize> {
    let fits: Vec<usize> = [1, 2, 4].into_iter().filter(|w| *w <= len).collect();
    (!fits.is_empty()).then(|| fits[rng.random_range(0..fits.len())])
}

/// Length limits for havoc: `[1, max_len]`.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_len: usize,
}

impl Bounds {
    /// Twice the driver's consumed bytes, at least 1.
    pub fn for_consumed(consumed: u64) -> Self {
        Bounds { max_len: (2 * consumed as usize).max(1) }
    }
}

fn havoc(buf: &mut Vec<u8>, rng: &mut ChaCha8Rng, bounds: Bounds) {
    let edits = 1usize << rng.random_range(1..=7);
    for _ in 0..edits {
        let len = buf.len();
        match rng.random_range(0..9) {
            0 if len > 0 => flip_bits(buf, rng.random_range(0..len * 8), 1),
            1 => {
                if let Some(w) = pick_width(rng, len) {
                    let pos = rng.random_range(0..=len - w);
                    let v = interesting(rng, w);
                    let big = rng.random();
                    set_int(buf, pos, w, v, big);
                }
            }
            2 => {
                if let Some(w) = pick_width(rng, len) {
                    let pos = rng.random_range(0..=len - w);
                    let d = delta(rng);
                    let big = rng.random();
                    add_at(buf, pos, w, d, big);
                }
            }
            3 if len > 0 => {
                let pos = rng.random_range(0..len);
                buf[pos] ^= rng.random_range(1..=255u8);
            }
            4 if len > 1 => {
                let n = rng.random_range(1..len);
                let pos = rng.random_range(0..=len - n);
                buf.drain(pos..pos + n);
            }
            5 if len < bounds.max_len => {
                let n = rng.random_range(1..=(bounds.max_len - len).min(len.max(1) * 2).min(64));
                let at = rng.random_range(0..=len);
                let block: Vec<u8> = if len > 0 && rng.random() {
                    let n = n.min(len);
                    let from = rng.random_range(0..=len - n);
                    buf[from..from + n].to_vec()
                } else {
                    let byte = rng.random();
                    vec![byte; n]
                };
                buf.splice(at..at, block);
            }
            6 if len > 1 => {
                let n = rng.random_range(1..len);
                let from = rng.random_range(0..=len - n);
                let to = rng.random_range(0..=len - n);
                buf.copy_within(from..from + n, to);
            }
            7 if len > 0 => {
                let pos = rng.random_range(0..len);
                buf[pos] = rng.random();
            }
            _ => {
                if len == 0 {
                    buf.push(rng.random());
                }
            }
        }
    }
    if buf.is_empty() {
        buf.push(rng.random());
    }
    buf.truncate(bounds.max_len);
}

/// Apply `stage` to a copy of `input`. `other` is the splice partner.
pub fn mutate_input(input: &[u8], rng: &mut ChaCha8Rng, stage: Stage, bounds: Bounds, other: Option<&[u8]>) -> Vec<u8> {
    let mut buf = input.to_vec();
    let len = buf.len();
    match stage {
        Stage::BitFlip { bits } if len * 8 >= bits as usize => {
            let pos = rng.random_range(0..=len * 8 - bits as usize);
            flip_bits(&mut buf, pos, bits as usize);
        }
        Stage::ByteFlip { bytes } if len >= bytes as usize => {
            let pos = rng.random_range(0..=len - bytes as usize);
            buf[pos..pos + bytes as usize].iter_mut().for_each(|b| *b ^= 0xFF);
        }
        Stage::Arith { width } if len >= width as usize => {
            let pos = rng.random_range(0..=len - width as usize);
            let d = delta(rng);
            let big = width > 1 && rng.random();
            add_at(&mut buf, pos, width as usize, d, big);
        }
        Stage::Interesting { width } if len >= width as usize => {
            let pos = rng.random_range(0..=len - width as usize);
            let v = interesting(rng, width as usize);
            set_int(&mut buf, pos, width as usize, v, false);
        }
        Stage::Splice => {
            if let Some(other) = other.filter(|o| o.len() > 1 && len > 1) {
                let cut = rng.random_range(1..len.min(other.len()));
                buf.truncate(cut);
                buf.extend_from_slice(&other[cut..]);
            }
            havoc(&mut buf, rng, bounds);
        }
        _ => havoc(&mut buf, rng, bounds),
    }
    buf
}

/// Uniformly chosen stage.
pub fn choose_stage(rng: &mut ChaCha8Rng) -> Stage {
    Stage::ALL[rng.random_range(0..Stage::ALL.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bit_order_is_lsb_first() {
        let mut b = [0u8];
        flip_bits(&mut b, 0, 1);
        assert_eq!(b, [1]);
        let mut b = [0u8, 0];
        flip_bits(&mut b, 6, 4);
        assert_eq!(b, [0xC0, 0x03]);
    }

    #[test]
    fn arith_little_endian() {
        let mut b = [0xFF, 0x00];
        add_at(&mut b, 0, 2, 1, false);
        assert_eq!(b, [0x00, 0x01]);
        let mut b = [0x00, 0xFF];
        add_at(&mut b, 0, 2, 1, true);
        assert_eq!(b, [0x01, 0x00]);
        let mut b = [0u8; 4];
        add_at(&mut b, 0, 4, -1, false);
        assert_eq!(b, [0xFF; 4]);
    }

    #[test]
    fn havoc_grows_empty_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let out = mutate_input(&[], &mut rng, Stage::Havoc, Bounds::for_consumed(4), None);
            assert!(!out.is_empty() && out.len() <= 8);
        }
    }

    #[test]
    fn same_stream_same_output() {
        let input = [1u8, 2, 3, 4, 5, 6, 7, 8];
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    let s = choose_stage(&mut rng);
                    mutate_input(&input, &mut rng, s, Bounds::for_consumed(8), Some(&[9, 9, 9]))
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }
}
