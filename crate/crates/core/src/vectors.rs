//! Known-answer test vectors.
//!
//! One record per line:
//!
//! ```text
//! variant,seed_hex,length,generator,digest_hex
//! 24,000102...1f,1344,splitmix:1344,9f3c...
//! ```
//!
//! `seed_hex` is the 32-byte master seed, `generator` names how the input is
//! produced (`splitmix:<n>` is the little-endian byte stream of splitmix64
//! started at `n`), and `digest_hex` is the expected output. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt;

use crate::hasher::{hash, SeedBuffer, SplitMix64};
use crate::params::{HashParams, Variant};
use crate::{Error, Result};

/// The standard grid as shipped with the crate.
pub const BUNDLED: &str = include_str!("../tests/data/vectors.txt");

/// Input lengths in the standard grid, chosen around instance and tree
/// level boundaries.
pub const GRID_LENGTHS: [u64; 9] = [
    0,
    1,
    1024,
    1336,
    1344,
    (1 << 20) - 1,
    1 << 20,
    (1 << 20) + 1,
    4 << 20,
];

/// Master seeds in the standard grid.
pub fn grid_seeds() -> [[u8; 32]; 2] {
    let mut counting = [0u8; 32];
    for (i, b) in counting.iter_mut().enumerate() {
        *b = i as u8;
    }
    [[0u8; 32], counting]
}

/// `len` bytes of splitmix64 output starting from `seed`.
pub fn generate_input(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(len + 8);
    while out.len() < len {
        out.extend_from_slice(&rng.next_u64().to_le_bytes());
    }
    out.truncate(len);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorRecord {
    pub variant: Variant,
    pub master: [u8; 32],
    pub length: u64,
    pub generator_seed: u64,
    pub digest: Vec<u8>,
}

impl VectorRecord {
    /// Hashes the generated input and records the result.
    pub fn compute(
        variant: Variant,
        master: [u8; 32],
        length: u64,
        generator_seed: u64,
    ) -> Result<Self> {
        let digest = Self::digest_of(variant, &master, length, generator_seed)?;
        Ok(Self {
            variant,
            master,
            length,
            generator_seed,
            digest,
        })
    }

    fn digest_of(
        variant: Variant,
        master: &[u8; 32],
        length: u64,
        generator_seed: u64,
    ) -> Result<Vec<u8>> {
        let params = HashParams::of(variant);
        let seed = SeedBuffer::for_input_len(master, &params, length);
        let input = generate_input(generator_seed, length as usize);
        Ok(hash(&input, &seed, &params)?.as_bytes().to_vec())
    }

    /// Recomputes the digest and compares it with the stored one.
    pub fn verify(&self) -> Result<bool> {
        Ok(
            Self::digest_of(self.variant, &self.master, self.length, self.generator_seed)?
                == self.digest,
        )
    }

    /// Parses one record; `line` is only used in error messages.
    pub fn parse(text: &str, line: usize) -> Result<Self> {
        let bad = |reason: String| Error::VectorFormat { line, reason };
        let fields: Vec<&str> = text.trim().split(',').collect();
        let [variant, seed, length, generator, digest] = fields[..] else {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        };
        let bytes: usize = variant
            .parse()
            .map_err(|_| bad(format!("bad variant {variant:?}")))?;
        let variant = Variant::try_from(bytes).map_err(|e| bad(e.to_string()))?;
        let master: [u8; 32] = hex::decode(seed)
            .ok()
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| bad("seed must be 64 hex digits".into()))?;
        let length = length
            .parse()
            .map_err(|_| bad(format!("bad length {length:?}")))?;
        let generator_seed = generator
            .strip_prefix("splitmix:")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad(format!("unknown generator {generator:?}")))?;
        let digest = hex::decode(digest).map_err(|_| bad("digest is not hex".into()))?;
        if digest.len() != variant.output_bytes() {
            return Err(bad(format!(
                "digest has {} bytes, variant {variant} needs {}",
                digest.len(),
                variant.output_bytes()
            )));
        }
        Ok(Self {
            variant,
            master,
            length,
            generator_seed,
            digest,
        })
    }
}

impl fmt::Display for VectorRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},splitmix:{},{}",
            self.variant.output_bytes(),
            hex::encode(self.master),
            self.length,
            self.generator_seed,
            hex::encode(&self.digest)
        )
    }
}

/// Every variant, grid seed and grid length; the generator seed is the length.
pub fn standard_grid() -> Result<Vec<VectorRecord>> {
    let mut out = Vec::new();
    for variant in Variant::ALL {
        for master in grid_seeds() {
            for len in GRID_LENGTHS {
                out.push(VectorRecord::compute(variant, master, len, len)?);
            }
        }
    }
    Ok(out)
}

/// Renders records in the file format, with a header comment.
pub fn emit(records: &[VectorRecord]) -> String {
    let mut out = String::from("# variant,seed_hex,length,generator,digest_hex\n");
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_file(text: &str) -> Result<Vec<VectorRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| VectorRecord::parse(l, i + 1))
        .collect()
}

/// Records whose recomputed digest differs from the stored one.
pub fn check(records: &[VectorRecord]) -> Result<Vec<&VectorRecord>> {
    let mut failed = Vec::new();
    for r in records {
        if !r.verify()? {
            failed.push(r);
        }
    }
    Ok(failed)
}
