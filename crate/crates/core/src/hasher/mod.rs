//! The top-level hash: EHC over whole instances, `k` trees over the EHC
//! output, NH finalization, and a Toeplitz-keyed NH over the input tail.
//!
//! Two implementations produce identical digests. [`hash_reference`] is the
//! width-generic scalar path built from the stage functions in [`crate::ehc`]
//! and [`crate::tree`], instrumented with multiplication counters.
//! [`hash`] dispatches to a fixed-width lane path for the shipped geometry.

mod lanes;
mod seed;

pub use seed::{
    expand_seed, fold_master, levels_for_len, seed_words_for_len, SeedBuffer, SeedLayout,
    SplitMix64,
};

use crate::count::{MulCounter, StageTally};
use crate::ehc::{ehc_into, EhcInstance, EhcScratch};
use crate::nh::{nh_words, NhWidth};
use crate::params::HashParams;
use crate::tree::{stack_levels, tree_finalize_counted, TreeLevelStack};
use crate::{Error, Result};

/// A digest of `8 * k` bytes: `k` words serialized little-endian.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digest {
    words: Vec<u64>,
    bytes: Vec<u8>,
}

impl Digest {
    pub fn from_words(words: Vec<u64>) -> Self {
        let bytes = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        Self { words, bytes }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Little-endian 64-bit words of `input`, the last one zero-padded.
pub fn words_from_bytes(input: &[u8]) -> Vec<u64> {
    input
        .chunks(8)
        .map(|c| {
            let mut buf = [0u8; 8];
            buf[..c.len()].copy_from_slice(c);
            u64::from_le_bytes(buf)
        })
        .collect()
}

/// Hashes `input` with the fastest available path.
pub fn hash(input: &[u8], seed: &SeedBuffer, params: &HashParams) -> Result<Digest> {
    if params.b() == lanes::LANES {
        lanes::hash_lanes(input, seed, params)
    } else {
        hash_reference(input, seed, params)
    }
}

/// Hashes `input` with the scalar reference path.
pub fn hash_reference(input: &[u8], seed: &SeedBuffer, params: &HashParams) -> Result<Digest> {
    let words = words_from_bytes(input);
    let out = hash_words_counted(
        NhWidth::PRODUCTION,
        params,
        &words,
        input.len() as u64,
        seed,
        &mut StageTally::default(),
    )?;
    Ok(Digest::from_words(out))
}

/// Like [`hash_reference`], also returning per-stage multiplication counts.
pub fn hash_instrumented(
    input: &[u8],
    seed: &SeedBuffer,
    params: &HashParams,
) -> Result<(Digest, StageTally)> {
    let words = words_from_bytes(input);
    let mut tally = StageTally::default();
    let out = hash_words_counted(
        NhWidth::PRODUCTION,
        params,
        &words,
        input.len() as u64,
        seed,
        &mut tally,
    )?;
    Ok((Digest::from_words(out), tally))
}

pub(crate) fn check_seed(params: &HashParams, seed: &SeedBuffer, instances: u64) -> Result<usize> {
    if *seed.layout() != SeedLayout::of(params) {
        return Err(Error::SeedLayoutMismatch);
    }
    let needed = stack_levels(instances, params.f() as u64) as usize;
    if seed.levels() < needed {
        return Err(Error::SeedTooSmall {
            available: seed.levels(),
            needed,
        });
    }
    Ok(needed)
}

/// The full pipeline over words at any NH width; returns the `k` output words.
///
/// `n_tag` is the length mixed into the result, the byte length for real
/// inputs. With no complete instance there is no tree; the tag is then
/// appended to the tail before the remainder hash instead.
pub fn hash_words_counted(
    width: NhWidth,
    params: &HashParams,
    words: &[u64],
    n_tag: u64,
    seed: &SeedBuffer,
    tally: &mut StageTally,
) -> Result<Vec<u64>> {
    let instance_words = params.instance_words();
    let instances = words.len() / instance_words;
    let levels = check_seed(params, seed, instances as u64)?;
    let (k, b) = (params.k(), params.b());

    let mut out = vec![0u64; k];
    if instances > 0 {
        let mut stacks: Vec<TreeLevelStack> =
            (0..k).map(|_| TreeLevelStack::new(params.f(), b)).collect();
        let level_keys: Vec<Vec<&[u64]>> = (0..k)
            .map(|t| (0..levels).map(|l| seed.tree_keys(t, l)).collect())
            .collect();
        let mut scratch = EhcScratch::new(params);
        let mut combined = vec![0u64; k * b];
        for chunk in words.chunks_exact(instance_words) {
            let instance = EhcInstance::new(params, chunk, seed.ehc_keys())?;
            ehc_into(
                width,
                params,
                &instance,
                &mut scratch,
                &mut combined,
                &mut tally.ehc,
            );
            for (t, stack) in stacks.iter_mut().enumerate() {
                stack.push(
                    width,
                    &combined[t * b..(t + 1) * b],
                    &level_keys[t],
                    &mut tally.tree,
                )?;
            }
        }
        for (t, stack) in stacks.iter().enumerate() {
            let keys: Vec<&[u64]> = (0..levels).map(|l| seed.finalize_keys(t, l)).collect();
            out[t] = tree_finalize_counted(width, stack, n_tag, &keys, &mut tally.finalize)?;
        }
    }

    let tail = &words[instances * instance_words..];
    let remainder = if instances == 0 {
        let mut tagged = tail.to_vec();
        tagged.push(n_tag & width.full_mask());
        hash_remainder_counted(
            width,
            &tagged,
            seed.remainder_keys(),
            k,
            &mut tally.remainder,
        )
    } else {
        hash_remainder_counted(width, tail, seed.remainder_keys(), k, &mut tally.remainder)
    };
    for (o, r) in out.iter_mut().zip(remainder) {
        *o = o.wrapping_add(r) & width.full_mask();
    }
    Ok(out)
}

/// NH over the tail `k` times with overlapping key windows `r[i, len + i)`.
pub fn hash_remainder(width: NhWidth, tail: &[u64], keys: &[u64], k: usize) -> Vec<u64> {
    hash_remainder_counted(width, tail, keys, k, &mut ())
}

/// # Panics
///
/// If `keys` has fewer than `tail.len() + k - 1` words.
pub fn hash_remainder_counted<C: MulCounter>(
    width: NhWidth,
    tail: &[u64],
    keys: &[u64],
    k: usize,
    counter: &mut C,
) -> Vec<u64> {
    assert!(keys.len() + 1 >= tail.len() + k, "remainder keys too short");
    (0..k)
        .map(|i| nh_words(width, tail, &keys[i..i + tail.len()], counter))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Variant;
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const W: NhWidth = NhWidth::PRODUCTION;

    #[test]
    fn remainder_examples() {
        let keys: Vec<u64> = (1..=20).collect();
        assert_eq!(hash_remainder(W, &[], &keys, 3), vec![0, 0, 0]);
        let tail = [0x0000_0002_0000_0003u64, 5];
        let one = hash_remainder(W, &tail, &keys, 1);
        assert_eq!(one, vec![nh_words(W, &tail, &keys[..2], &mut ())]);
        let three = hash_remainder(W, &tail, &keys, 3);
        for (i, &h) in three.iter().enumerate() {
            assert_eq!(h, nh_words(W, &tail, &keys[i..i + 2], &mut ()));
        }
    }

    #[test]
    fn toeplitz_windows_overlap() {
        // Window i is keys[i, L + i): windows i and i' share L - |i - i'| words,
        // and all k windows together span L + k - 1 words.
        let p = HashParams::of(Variant::V40);
        let len = p.instance_words() - 1;
        let k = p.k();
        let windows: Vec<std::ops::Range<usize>> = (0..k).map(|i| i..len + i).collect();
        for a in 0..k {
            for b in 0..k {
                let shared =
                    windows[a].start.max(windows[b].start)..windows[a].end.min(windows[b].end);
                assert_eq!(shared.len(), len - a.abs_diff(b));
            }
        }
        assert_eq!(windows[k - 1].end, len + k - 1);
        let s = SeedBuffer::new(&[0; 32], &p, 0);
        assert_eq!(s.remainder_keys().len(), p.instance_words() + k - 1);
    }

    #[test]
    fn digest_serialization() {
        let d = Digest::from_words(vec![0x0807060504030201, 0x100f0e0d0c0b0a09]);
        assert_eq!(d.as_bytes(), &(1..=16).collect::<Vec<u8>>()[..]);
        assert_eq!(d.to_hex(), "0102030405060708090a0b0c0d0e0f10");
        assert_eq!(format!("{d}"), d.to_hex());
    }

    #[test]
    fn words_are_little_endian_and_padded() {
        assert_eq!(words_from_bytes(&[]), Vec::<u64>::new());
        assert_eq!(words_from_bytes(&[1, 2, 3]), vec![0x030201]);
        assert_eq!(words_from_bytes(&[0; 9]).len(), 2);
    }

    #[test]
    fn output_length_per_variant() {
        for v in Variant::ALL {
            let p = HashParams::of(v);
            for len in [0usize, 7, 5000] {
                let s = SeedBuffer::for_input_len(&[3; 32], &p, len as u64);
                let d = hash(&vec![0xab; len], &s, &p).unwrap();
                assert_eq!(d.as_bytes().len(), v.output_bytes());
            }
        }
    }

    #[test]
    fn seed_too_small_and_mismatch() {
        let p = HashParams::of(Variant::V24);
        let s = SeedBuffer::for_input_len(&[0; 32], &p, 100);
        let err = hash(&vec![0; 4096], &s, &p).unwrap_err();
        assert_eq!(
            err,
            Error::SeedTooSmall {
                available: 0,
                needed: 1
            }
        );
        assert_eq!(hash_reference(&vec![0; 4096], &s, &p).unwrap_err(), err);
        let other = HashParams::of(Variant::V16);
        assert_eq!(
            hash(&[1, 2, 3], &s, &other).unwrap_err(),
            Error::SeedLayoutMismatch
        );
    }

    #[test]
    fn larger_buffer_gives_same_digest() {
        let p = HashParams::of(Variant::V32);
        let input: Vec<u8> = (0..10_000u32).map(|i| i as u8).collect();
        let tight = SeedBuffer::for_input_len(&[5; 32], &p, input.len() as u64);
        let roomy = SeedBuffer::for_input_len(&[5; 32], &p, 1 << 30);
        assert_eq!(
            hash(&input, &tight, &p).unwrap(),
            hash(&input, &roomy, &p).unwrap()
        );
    }

    #[test]
    fn length_separates_zero_padding() {
        // "", "\0", "\0\0\0\0" and "\0" x 8 all load as the same words modulo padding.
        let p = HashParams::of(Variant::V24);
        let s = SeedBuffer::for_input_len(&[1; 32], &p, 4096);
        let mut seen = std::collections::HashSet::new();
        for len in [0usize, 1, 4, 8, 1344, 1345, 1352] {
            assert!(
                seen.insert(hash(&vec![0; len], &s, &p).unwrap()),
                "len {len}"
            );
        }
    }

    #[test]
    fn lane_path_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for v in Variant::ALL {
            let p = HashParams::of(v);
            let iw = p.instance_words() * 8;
            for len in [0, 1, 8, iw - 1, iw, iw + 1, 8 * iw, 8 * iw + 3, 65 * iw - 5] {
                let mut input = vec![0u8; len];
                rng.fill_bytes(&mut input);
                let mut master = [0u8; 32];
                rng.fill_bytes(&mut master);
                let s = SeedBuffer::for_input_len(&master, &p, len as u64);
                assert_eq!(
                    lanes::hash_lanes(&input, &s, &p).unwrap(),
                    hash_reference(&input, &s, &p).unwrap(),
                    "{v} len {len}"
                );
            }
        }
    }

    #[test]
    fn reduced_width_pipeline_runs() {
        let m = crate::params::TransformMatrix::from_rows(&[[1, 0, 1], [0, 1, 4]]).unwrap();
        let code = crate::params::ErasureCode::xor_parity(2, 1).unwrap();
        let p = HashParams::custom(1, 1, 2, m, code).unwrap();
        let width = NhWidth::new(4).unwrap();
        let s = SeedBuffer::new(&[2; 32], &p, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let words: Vec<u64> = (0..13).map(|_| rng.gen::<u64>() & 0xff).collect();
        let mut tally = StageTally::default();
        let out = hash_words_counted(width, &p, &words, 13, &s, &mut tally).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|&x| x <= 0xff));
        assert_eq!(tally.ehc, 6 * 3);
    }
}
