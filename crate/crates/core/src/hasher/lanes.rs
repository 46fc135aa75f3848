// Fixed-width path for 8-lane blocks and 32-bit half-words. Every loop runs
// over one [u64; 8] block so the compiler can keep it in vector registers.
// Results must stay bit-identical to the reference path in mod.rs.

use super::{check_seed, hash_remainder, words_from_bytes, Digest, SeedBuffer};
use crate::nh::{nh_words, NhWidth};
use crate::params::HashParams;
use crate::tree::finalize_key_words;
use crate::Result;

pub(crate) const LANES: usize = 8;

type Block = [u64; LANES];

#[inline(always)]
fn load(bytes: &[u8]) -> Block {
    let mut out = [0u64; LANES];
    for (o, c) in out.iter_mut().zip(bytes.chunks_exact(8)) {
        *o = u64::from_le_bytes(c.try_into().unwrap());
    }
    out
}

#[inline(always)]
fn nh_accumulate(acc: &mut Block, x: &Block, key: u64) {
    let (slo, shi) = (key as u32, (key >> 32) as u32);
    for j in 0..LANES {
        let lo = (x[j] as u32).wrapping_add(slo) as u64;
        let hi = ((x[j] >> 32) as u32).wrapping_add(shi) as u64;
        acc[j] = acc[j].wrapping_add(lo * hi);
    }
}

// acc += c * x for c = 2^a, 2^a + 2^b or 2^a - 2^b, with the split done
// once per matrix entry rather than once per lane.
#[derive(Clone, Copy)]
struct Term {
    col: usize,
    shift: u32,
    second: Option<(bool, u32)>,
}

fn split_coefficient(col: usize, c: u8) -> Option<Term> {
    let c = c as u64;
    if c == 0 {
        return None;
    }
    let low = c.trailing_zeros();
    let rest = c - (1 << low);
    let second = if rest == 0 {
        None
    } else if rest.is_power_of_two() {
        return Some(Term {
            col,
            shift: rest.trailing_zeros(),
            second: Some((true, low)),
        });
    } else {
        // c = 2^a - 2^low
        let a = (c + (1 << low)).trailing_zeros();
        return Some(Term {
            col,
            shift: a,
            second: Some((false, low)),
        });
    };
    Some(Term {
        col,
        shift: low,
        second,
    })
}

#[inline(always)]
fn mul_add(acc: &mut Block, x: &Block, t: Term) {
    match t.second {
        None => {
            for j in 0..LANES {
                acc[j] = acc[j].wrapping_add(x[j] << t.shift);
            }
        }
        Some((true, b)) => {
            for j in 0..LANES {
                acc[j] = acc[j].wrapping_add(x[j] << t.shift).wrapping_add(x[j] << b);
            }
        }
        Some((false, b)) => {
            for j in 0..LANES {
                acc[j] = acc[j].wrapping_add(x[j] << t.shift).wrapping_sub(x[j] << b);
            }
        }
    }
}

#[inline(always)]
fn xor_into(acc: &mut Block, x: &Block) {
    for j in 0..LANES {
        acc[j] ^= x[j];
    }
}

struct Tree {
    levels: Vec<Vec<Block>>,
}

impl Tree {
    #[inline(always)]
    fn push(&mut self, block: Block, fanout: usize, keys: &[&[u64]]) {
        if self.levels.is_empty() {
            self.levels.push(Vec::with_capacity(fanout));
        }
        self.levels[0].push(block);
        let mut level = 0;
        while self.levels[level].len() == fanout {
            let pending = &self.levels[level];
            let mut acc = pending[fanout - 1];
            for (x, &k) in pending[..fanout - 1].iter().zip(keys[level]) {
                nh_accumulate(&mut acc, x, k);
            }
            self.levels[level].clear();
            if self.levels.len() == level + 1 {
                self.levels.push(Vec::with_capacity(fanout));
            }
            self.levels[level + 1].push(acc);
            level += 1;
        }
    }

    fn finalize(&self, fanout: usize, n_tag: u64, keys: &[&[u64]]) -> u64 {
        let slot_words = (fanout - 1) * LANES;
        let mut acc = 0u64;
        let mut padded = vec![0u64; slot_words];
        for (level, keys) in keys.iter().enumerate() {
            padded.fill(0);
            if let Some(pending) = self.levels.get(level) {
                for (dst, blk) in padded.chunks_exact_mut(LANES).zip(pending) {
                    dst.copy_from_slice(blk);
                }
            }
            acc = acc.wrapping_add(nh_words(
                NhWidth::PRODUCTION,
                &padded,
                &keys[..slot_words],
                &mut (),
            ));
        }
        let tag_key = &keys[0][slot_words..finalize_key_words(fanout, LANES, 0)];
        acc.wrapping_add(nh_words(NhWidth::PRODUCTION, &[n_tag], tag_key, &mut ()))
    }
}

#[inline(always)]
fn tree_outputs(
    input: &[u8],
    instances: usize,
    levels: usize,
    seed: &SeedBuffer,
    params: &HashParams,
    out: &mut [u64],
) {
    let (w, d, e, k, f) = (params.w(), params.d(), params.e(), params.k(), params.f());
    let instance_bytes = params.instance_words() * 8;
    let n_tag = input.len() as u64;
    let entropy = seed.ehc_keys();
    let terms = params.code().parity_terms();
    let matrix = params.matrix();
    let rows: Vec<Vec<Term>> = (0..k)
        .map(|r| {
            let row = matrix.row(r).iter().enumerate();
            row.filter_map(|(c, &coef)| split_coefficient(c, coef))
                .collect()
        })
        .collect();
    let level_keys: Vec<Vec<&[u64]>> = (0..k)
        .map(|t| (0..levels).map(|l| seed.tree_keys(t, l)).collect())
        .collect();
    let mut trees: Vec<Tree> = (0..k).map(|_| Tree { levels: Vec::new() }).collect();
    let mut data = vec![[0u64; LANES]; d * w];
    let mut parity = vec![[0u64; LANES]; (e - d) * w];
    let mut hashed = vec![[0u64; LANES]; e];

    let mut padded_last: Vec<u8>;
    for i in 0..instances {
        let chunk = match input.get(i * instance_bytes..(i + 1) * instance_bytes) {
            Some(c) => c,
            None => {
                padded_last = input[i * instance_bytes..].to_vec();
                padded_last.resize(instance_bytes, 0);
                &padded_last
            }
        };
        for (blk, bytes) in data.iter_mut().zip(chunk.chunks_exact(8 * LANES)) {
            *blk = load(bytes);
        }
        for (p, t) in parity.iter_mut().zip(terms) {
            *p = [0; LANES];
            for &src in t {
                xor_into(p, &data[src]);
            }
        }
        for (i, h) in hashed.iter_mut().enumerate() {
            *h = [0; LANES];
            for l in 0..w {
                let x = if i < d {
                    &data[i * w + l]
                } else {
                    &parity[(i - d) * w + l]
                };
                nh_accumulate(h, x, entropy[i * w + l]);
            }
        }
        for (r, tree) in trees.iter_mut().enumerate() {
            let mut row = [0u64; LANES];
            for &t in &rows[r] {
                mul_add(&mut row, &hashed[t.col], t);
            }
            tree.push(row, f, &level_keys[r]);
        }
    }
    for (t, tree) in trees.iter().enumerate() {
        let keys: Vec<&[u64]> = (0..levels).map(|l| seed.finalize_keys(t, l)).collect();
        out[t] = tree.finalize(f, n_tag, &keys);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn tree_outputs_avx512(
    input: &[u8],
    instances: usize,
    levels: usize,
    seed: &SeedBuffer,
    params: &HashParams,
    out: &mut [u64],
) {
    tree_outputs(input, instances, levels, seed, params, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn tree_outputs_avx2(
    input: &[u8],
    instances: usize,
    levels: usize,
    seed: &SeedBuffer,
    params: &HashParams,
    out: &mut [u64],
) {
    tree_outputs(input, instances, levels, seed, params, out)
}

fn dispatch_tree_outputs(
    input: &[u8],
    instances: usize,
    levels: usize,
    seed: &SeedBuffer,
    params: &HashParams,
    out: &mut [u64],
) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx512f") {
        // SAFETY: the CPU supports AVX-512F, checked just above.
        return unsafe { tree_outputs_avx512(input, instances, levels, seed, params, out) };
    }
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2, checked just above.
        return unsafe { tree_outputs_avx2(input, instances, levels, seed, params, out) };
    }
    tree_outputs(input, instances, levels, seed, params, out)
}

pub(crate) fn hash_lanes(input: &[u8], seed: &SeedBuffer, params: &HashParams) -> Result<Digest> {
    assert_eq!(params.b(), LANES);
    let k = params.k();
    let instance_bytes = params.instance_words() * 8;
    // Counted in zero-padded words, so the last instance may end mid-word.
    let instances = input.len().div_ceil(8) / params.instance_words();
    let levels = check_seed(params, seed, instances as u64)?;
    let n_tag = input.len() as u64;

    let mut out = vec![0u64; k];
    if instances > 0 {
        dispatch_tree_outputs(input, instances, levels, seed, params, &mut out);
    }

    let mut tail = words_from_bytes(input.get(instances * instance_bytes..).unwrap_or(&[]));
    if instances == 0 {
        tail.push(n_tag);
    }
    let remainder = hash_remainder(NhWidth::PRODUCTION, &tail, seed.remainder_keys(), k);
    for (o, r) in out.iter_mut().zip(remainder) {
        *o = o.wrapping_add(r);
    }
    Ok(Digest::from_words(out))
}
