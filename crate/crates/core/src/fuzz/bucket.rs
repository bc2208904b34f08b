//! Hit-count buckets and the map of (edge, bucket) pairs seen so far.

use serde::{Deserialize, Serialize};

pub const MAP_SIZE: usize = 65536;

/// Hit-count class of one edge, one bit per class so a byte can hold the
/// set of classes seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Bucket {
    Zero = 0,
    One = 1,
    Two = 2,
    Three = 4,
    From4To7 = 8,
    From8To15 = 16,
    From16To31 = 32,
    From32To127 = 64,
    From128 = 128,
}

impl Bucket {
    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Bucket::Zero => "0",
            Bucket::One => "1",
            Bucket::Two => "2",
            Bucket::Three => "3",
            Bucket::From4To7 => "4-7",
            Bucket::From8To15 => "8-15",
            Bucket::From16To31 => "16-31",
            Bucket::From32To127 => "32-127",
            Bucket::From128 => "128+",
        }
    }
}

pub fn bucketize(count: u32) -> Bucket {
    match count {
        0 => Bucket::Zero,
        1 => Bucket::One,
        2 => Bucket::Two,
        3 => Bucket::Three,
        4..=7 => Bucket::From4To7,
        8..=15 => Bucket::From8To15,
        16..=31 => Bucket::From16To31,
        32..=127 => Bucket::From32To127,
        _ => Bucket::From128,
    }
}

/// Non-empty (edge, bucket) pairs of a raw coverage snapshot.
pub fn signature(trace: &[u8]) -> Vec<(u16, Bucket)> {
    trace
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as u16, bucketize(c as u32)))
        .collect()
}

/// Bucket classes observed per edge across admitted inputs.
#[derive(Debug, Clone)]
pub struct VirginMap {
    seen: Vec<u8>,
}

impl Default for VirginMap {
    fn default() -> Self {
        VirginMap { seen: vec![0; MAP_SIZE] }
    }
}

impl VirginMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_interesting(&self, trace: &[u8]) -> bool {
        trace.chunks(8).zip(self.seen.chunks(8)).any(|(t, s)| {
            t.iter().any(|&c| c != 0) && t.iter().zip(s).any(|(&c, &seen)| c != 0 && seen & bucketize(c as u32).bit() == 0)
        })
    }

    /// Record the classes in `trace`; returns how many were new.
    pub fn mark(&mut self, trace: &[u8]) -> usize {
        let mut fresh = 0;
        for (&c, seen) in trace.iter().zip(self.seen.iter_mut()) {
            if c != 0 {
                let bit = bucketize(c as u32).bit();
                if *seen & bit == 0 {
                    *seen |= bit;
                    fresh += 1;
                }
            }
        }
        fresh
    }

    /// Number of (edge, bucket) pairs seen.
    pub fn count(&self) -> usize {
        self.seen.iter().map(|b| b.count_ones() as usize).sum()
    }
}
