//! HalftimeHash: a family of almost-universal hash functions for long
//! strings, producing 16, 24, 32 or 40 byte digests using only 32x32->64 bit
//! multiplication, shifts, additions and XOR.
//!
//! The hash runs in three stages:
//!
//! 1. Encode-Hash-Combine ([`ehc`]) over fixed-size instances of the input:
//!    erasure-encode, NH-hash every encoded item, then mix the hashes down to
//!    `k` blocks with a small integer matrix.
//! 2. `k` independent NH tree hashes ([`tree`]) over the EHC output, using a
//!    stack of partially filled levels so any number of blocks is accepted.
//! 3. A final NH over the pending tree levels and the input length, plus a
//!    Toeplitz-keyed NH over the input tail that did not fill an instance.
//!
//! Besides the hash itself, the crate carries the machinery to check the
//! algebra it depends on: [`analysis`] computes determinant valuations, code
//! distances and the entropy/seed/cost formulas, and [`oracle`] runs the same
//! code paths at 4 or 8 bit half-words where the universality bounds can be
//! enumerated exhaustively.
//!
//! ```
//! use halftime::{hash, HashParams, SeedBuffer};
//!
//! let params = HashParams::variant(24).unwrap();
//! let input = b"some long input string";
//! let seed = SeedBuffer::for_input_len(&[7u8; 32], &params, input.len() as u64);
//! let digest = hash(input, &seed, &params).unwrap();
//! assert_eq!(digest.as_bytes().len(), 24);
//! ```

pub mod analysis;
pub mod count;
pub mod ehc;
mod error;
pub mod hasher;
pub mod nh;
pub mod oracle;
pub mod params;
pub mod tree;
pub mod vectors;

pub use error::{Error, Result};
pub use hasher::{expand_seed, hash, hash_reference, Digest, SeedBuffer};
pub use nh::NhWidth;
pub use params::{coefficient_multiply, ErasureCode, HashParams, TransformMatrix, Variant};
