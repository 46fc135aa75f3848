//! Generalized Encode-Hash-Combine, the leaf stage of the hash.
//!
//! An instance is `d` items of `w` blocks, each block `b` lanes wide, laid out
//! item-major then block-major: lane `j` of block `l` of item `c` is word
//! `(c * w + l) * b + j`. Every lane is an independent EHC execution; lanes
//! share the entropy words.

use crate::count::MulCounter;
use crate::nh::{nh_words, NhWidth};
use crate::params::{coefficient_multiply, ErasureCode, HashParams, TransformMatrix};
use crate::{Error, Result};

/// One EHC input: `d * w * b` input words and `e * w` entropy words.
#[derive(Debug, Clone, Copy)]
pub struct EhcInstance<'a> {
    items: &'a [u64],
    entropy: &'a [u64],
}

impl<'a> EhcInstance<'a> {
    pub fn new(params: &HashParams, items: &'a [u64], entropy: &'a [u64]) -> Result<Self> {
        let want_items = params.d() * params.w() * params.b();
        if items.len() != want_items {
            return Err(Error::WrongBlockCount {
                expected: params.d() * params.w(),
                actual: items.len() / params.b(),
            });
        }
        if entropy.len() < params.e() * params.w() {
            return Err(Error::SeedTooShort {
                seed: 2 * entropy.len(),
                needed: 2 * params.e() * params.w(),
            });
        }
        Ok(Self { items, entropy })
    }

    pub fn items(&self) -> &'a [u64] {
        self.items
    }

    pub fn entropy(&self) -> &'a [u64] {
        self.entropy
    }
}

/// The `e` encoded items of one instance, same layout as the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedInstance {
    words: Vec<u64>,
    item_words: usize,
}

impl EncodedInstance {
    pub fn item_count(&self) -> usize {
        self.words.len() / self.item_words
    }

    pub fn item(&self, i: usize) -> &[u64] {
        &self.words[i * self.item_words..(i + 1) * self.item_words]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Erasure-encodes `d` items into `e`; the first `d` are copied verbatim.
pub fn encode(code: &ErasureCode, lanes: usize, items: &[u64]) -> EncodedInstance {
    let item_words = code.item_blocks() * lanes;
    let mut words = vec![0; code.total_items() * item_words];
    encode_into(code, lanes, items, &mut words);
    EncodedInstance { words, item_words }
}

/// # Panics
///
/// If `items` is not `d * w * lanes` words or `out` is not `e * w * lanes`.
pub fn encode_into(code: &ErasureCode, lanes: usize, items: &[u64], out: &mut [u64]) {
    let data_words = code.data_items() * code.item_blocks() * lanes;
    assert_eq!(items.len(), data_words, "encode: wrong input size");
    assert_eq!(
        out.len(),
        code.total_items() * code.item_blocks() * lanes,
        "encode: wrong output size"
    );
    let (systematic, parity) = out.split_at_mut(data_words);
    systematic.copy_from_slice(items);
    for (block, terms) in parity.chunks_exact_mut(lanes).zip(code.parity_terms()) {
        block.fill(0);
        for &t in terms {
            let src = &items[t * lanes..(t + 1) * lanes];
            for (o, &s) in block.iter_mut().zip(src) {
                *o ^= s;
            }
        }
    }
}

/// NH-hashes every encoded item down to one block.
///
/// Item `i` is keyed by `entropy[i * w .. (i + 1) * w]`; lane `j` of the
/// output is NH over the `w` words of lane `j` of the item.
pub fn hash_encoded(
    width: NhWidth,
    item_blocks: usize,
    lanes: usize,
    encoded: &[u64],
    entropy: &[u64],
) -> Vec<u64> {
    let items = encoded.len() / (item_blocks * lanes);
    let mut out = vec![0; items * lanes];
    hash_encoded_into(
        width,
        item_blocks,
        lanes,
        encoded,
        entropy,
        &mut out,
        &mut (),
    );
    out
}

pub fn hash_encoded_into<C: MulCounter>(
    width: NhWidth,
    item_blocks: usize,
    lanes: usize,
    encoded: &[u64],
    entropy: &[u64],
    out: &mut [u64],
    counter: &mut C,
) {
    let item_words = item_blocks * lanes;
    assert_eq!(encoded.len() % item_words, 0);
    let items = encoded.len() / item_words;
    assert_eq!(out.len(), items * lanes);
    assert!(
        entropy.len() >= items * item_blocks,
        "hash_encoded: not enough entropy"
    );
    let mut column = vec![0u64; item_blocks];
    for i in 0..items {
        let item = &encoded[i * item_words..(i + 1) * item_words];
        let keys = &entropy[i * item_blocks..(i + 1) * item_blocks];
        for lane in 0..lanes {
            for (l, c) in column.iter_mut().enumerate() {
                *c = item[l * lanes + lane];
            }
            out[i * lanes + lane] = nh_words(width, &column, keys, counter);
        }
    }
}

/// Applies the combine matrix lane by lane, modulo `2^full_bits`.
pub fn combine(width: NhWidth, matrix: &TransformMatrix, lanes: usize, hashed: &[u64]) -> Vec<u64> {
    let mut out = vec![0; matrix.rows() * lanes];
    combine_into(width, matrix, lanes, hashed, &mut out);
    out
}

pub fn combine_into(
    width: NhWidth,
    matrix: &TransformMatrix,
    lanes: usize,
    hashed: &[u64],
    out: &mut [u64],
) {
    assert_eq!(
        hashed.len(),
        matrix.cols() * lanes,
        "combine: need e blocks"
    );
    assert_eq!(out.len(), matrix.rows() * lanes);
    let mask = width.full_mask();
    for (r, row_out) in out.chunks_exact_mut(lanes).enumerate() {
        row_out.fill(0);
        for (c, &coef) in matrix.row(r).iter().enumerate() {
            if coef == 0 {
                continue;
            }
            let src = &hashed[c * lanes..(c + 1) * lanes];
            for (o, &x) in row_out.iter_mut().zip(src) {
                *o = o.wrapping_add(coefficient_multiply(coef, x));
            }
        }
        for o in row_out.iter_mut() {
            *o &= mask;
        }
    }
}

/// `combine(hash_encoded(encode(items), entropy))`: `k` blocks.
pub fn ehc(width: NhWidth, params: &HashParams, instance: &EhcInstance<'_>) -> Vec<u64> {
    let mut scratch = EhcScratch::new(params);
    let mut out = vec![0; params.k() * params.b()];
    ehc_into(width, params, instance, &mut scratch, &mut out, &mut ());
    out
}

/// Reusable buffers for [`ehc_into`].
#[derive(Debug, Clone)]
pub struct EhcScratch {
    encoded: Vec<u64>,
    hashed: Vec<u64>,
}

impl EhcScratch {
    pub fn new(params: &HashParams) -> Self {
        Self {
            encoded: vec![0; params.e() * params.w() * params.b()],
            hashed: vec![0; params.e() * params.b()],
        }
    }
}

pub fn ehc_into<C: MulCounter>(
    width: NhWidth,
    params: &HashParams,
    instance: &EhcInstance<'_>,
    scratch: &mut EhcScratch,
    out: &mut [u64],
    counter: &mut C,
) {
    let lanes = params.b();
    encode_into(params.code(), lanes, instance.items, &mut scratch.encoded);
    hash_encoded_into(
        width,
        params.w(),
        lanes,
        &scratch.encoded,
        instance.entropy,
        &mut scratch.hashed,
        counter,
    );
    combine_into(width, params.matrix(), lanes, &scratch.hashed, out);
}
