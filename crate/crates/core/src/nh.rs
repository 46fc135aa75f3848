//! The NH multiply-add family, parametric in the half-word width.
//!
//! Production hashing uses 32-bit half-words and 64-bit sums. The same code
//! runs at 4 or 8 bit half-words so that the universality bounds can be
//! checked by exhaustive enumeration of the seed space.
//!
//! Values are carried in `u64` and masked to the active width. A full word
//! holds two half-words, low half first.

use crate::count::MulCounter;
use crate::{Error, Result};

/// Half-word width for NH: additions wrap at `half_bits`, products and sums
/// wrap at `2 * half_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NhWidth {
    half_bits: u32,
}

impl NhWidth {
    pub const PRODUCTION: NhWidth = NhWidth { half_bits: 32 };

    pub fn new(half_bits: u32) -> Result<Self> {
        if half_bits == 0 || half_bits > 32 {
            return Err(Error::Config(format!(
                "NH half-word width must be 1..=32 bits, got {half_bits}"
            )));
        }
        Ok(Self { half_bits })
    }

    pub fn half_bits(self) -> u32 {
        self.half_bits
    }

    pub fn full_bits(self) -> u32 {
        2 * self.half_bits
    }

    #[inline(always)]
    pub fn half_mask(self) -> u64 {
        (1u64 << self.half_bits) - 1
    }

    #[inline(always)]
    pub fn full_mask(self) -> u64 {
        if self.half_bits == 32 {
            u64::MAX
        } else {
            (1u64 << (2 * self.half_bits)) - 1
        }
    }

    /// Splits a full word into its (low, high) half-words.
    #[inline(always)]
    pub fn split(self, word: u64) -> (u64, u64) {
        (
            word & self.half_mask(),
            (word >> self.half_bits) & self.half_mask(),
        )
    }

    /// `lo + 2^half * hi`, the inverse of [`NhWidth::split`].
    #[inline(always)]
    pub fn join(self, lo: u64, hi: u64) -> u64 {
        ((lo & self.half_mask()) | ((hi & self.half_mask()) << self.half_bits)) & self.full_mask()
    }

    /// Expands full words into the half-word sequence NH is defined over.
    pub fn half_words(self, words: &[u64]) -> Vec<u64> {
        words
            .iter()
            .flat_map(|&w| {
                let (lo, hi) = self.split(w);
                [lo, hi]
            })
            .collect()
    }

    #[inline(always)]
    fn pair(self, a: u64, b: u64, sa: u64, sb: u64) -> u64 {
        let h = self.half_mask();
        (a.wrapping_add(sa) & h).wrapping_mul(b.wrapping_add(sb) & h)
    }
}

impl Default for NhWidth {
    fn default() -> Self {
        Self::PRODUCTION
    }
}

fn check_pairs(data: &[u64], seed: &[u64], hashed: usize) -> Result<()> {
    if !data.len().is_multiple_of(2) {
        return Err(Error::OddLength(data.len()));
    }
    if seed.len() < hashed {
        return Err(Error::SeedTooShort {
            seed: seed.len(),
            needed: hashed,
        });
    }
    Ok(())
}

/// `sum_i (d[2i] + s[2i]) * (d[2i+1] + s[2i+1])` over half-words.
pub fn nh_full(width: NhWidth, data: &[u64], seed: &[u64]) -> Result<u64> {
    nh_full_counted(width, data, seed, &mut ())
}

pub fn nh_full_counted<C: MulCounter>(
    width: NhWidth,
    data: &[u64],
    seed: &[u64],
    counter: &mut C,
) -> Result<u64> {
    check_pairs(data, seed, data.len())?;
    let mut acc = 0u64;
    for (d, s) in data.chunks_exact(2).zip(seed.chunks_exact(2)) {
        acc = acc.wrapping_add(width.pair(d[0], d[1], s[0], s[1]));
    }
    counter.record((data.len() / 2) as u64);
    Ok(acc & width.full_mask())
}

/// NH with the last pair added in unhashed as `d[2m] + 2^half * d[2m+1]`.
///
/// Needs a seed for every half-word except the last two.
pub fn nh_tree_node(width: NhWidth, data: &[u64], seed: &[u64]) -> Result<u64> {
    if !data.len().is_multiple_of(2) {
        return Err(Error::OddLength(data.len()));
    }
    if data.len() < 4 {
        return Err(Error::InputTooShort {
            len: data.len(),
            min: 4,
        });
    }
    let (hashed, last) = data.split_at(data.len() - 2);
    check_pairs(hashed, seed, hashed.len())?;
    let mut acc = 0u64;
    for (d, s) in hashed.chunks_exact(2).zip(seed.chunks_exact(2)) {
        acc = acc.wrapping_add(width.pair(d[0], d[1], s[0], s[1]));
    }
    acc = acc.wrapping_add(width.join(last[0], last[1]));
    Ok(acc & width.full_mask())
}

/// [`nh_full`] over full words, each word supplying one half-word pair and
/// each key word the matching seed pair.
///
/// # Panics
///
/// If `keys` is shorter than `words`.
#[inline]
pub fn nh_words<C: MulCounter>(
    width: NhWidth,
    words: &[u64],
    keys: &[u64],
    counter: &mut C,
) -> u64 {
    assert!(
        keys.len() >= words.len(),
        "NH needs one key word per input word"
    );
    let mut acc = 0u64;
    for (&x, &s) in words.iter().zip(keys) {
        let (lo, hi) = width.split(x);
        let (slo, shi) = width.split(s);
        acc = acc.wrapping_add(width.pair(lo, hi, slo, shi));
    }
    counter.record(words.len() as u64);
    acc & width.full_mask()
}

/// [`nh_tree_node`] over full words: every word but the last is hashed with
/// the matching key word, the last word is added as is.
#[inline]
pub fn nh_node_words<C: MulCounter>(
    width: NhWidth,
    words: &[u64],
    keys: &[u64],
    counter: &mut C,
) -> u64 {
    let (last, hashed) = words
        .split_last()
        .expect("tree node needs at least one word");
    nh_words(width, hashed, keys, counter).wrapping_add(*last) & width.full_mask()
}

/// Applies the tree-node NH lane by lane to `fanout` blocks of `lanes` words.
///
/// `blocks` is block-major: word `j` of block `i` is `blocks[i * lanes + j]`.
/// The `fanout - 1` key words are shared by every lane.
pub fn nh_blockwise(
    width: NhWidth,
    fanout: usize,
    lanes: usize,
    blocks: &[u64],
    seed: &[u64],
) -> Result<Vec<u64>> {
    let mut out = vec![0; lanes];
    nh_blockwise_into(width, fanout, lanes, blocks, seed, &mut out, &mut ())?;
    Ok(out)
}

pub fn nh_blockwise_into<C: MulCounter>(
    width: NhWidth,
    fanout: usize,
    lanes: usize,
    blocks: &[u64],
    seed: &[u64],
    out: &mut [u64],
    counter: &mut C,
) -> Result<()> {
    if lanes == 0 || blocks.len() != fanout * lanes {
        return Err(Error::WrongBlockCount {
            expected: fanout,
            actual: blocks.len().checked_div(lanes).unwrap_or(0),
        });
    }
    if fanout < 2 {
        return Err(Error::InputTooShort {
            len: 2 * fanout,
            min: 4,
        });
    }
    if seed.len() < fanout - 1 {
        return Err(Error::SeedTooShort {
            seed: 2 * seed.len(),
            needed: 2 * (fanout - 1),
        });
    }
    assert_eq!(out.len(), lanes);
    let h = width.half_mask();
    let hb = width.half_bits();
    for (lane, o) in out.iter_mut().enumerate() {
        let mut acc = 0u64;
        for (i, &s) in seed[..fanout - 1].iter().enumerate() {
            let x = blocks[i * lanes + lane];
            let lo = x.wrapping_add(s) & h;
            let hi = (x >> hb).wrapping_add(s >> hb) & h;
            acc = acc.wrapping_add(lo.wrapping_mul(hi));
        }
        acc = acc.wrapping_add(blocks[(fanout - 1) * lanes + lane]);
        *o = acc & width.full_mask();
    }
    counter.record(((fanout - 1) * lanes) as u64);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(bits: u32) -> NhWidth {
        NhWidth::new(bits).unwrap()
    }

    // Direct evaluation of the NH sum with u128 arithmetic and explicit
    // reductions, independent of the masking tricks above.
    fn nh_direct(half: u32, d: &[u64], s: &[u64]) -> u64 {
        let hm = 1u128 << half;
        let fm = 1u128 << (2 * half);
        let mut acc = 0u128;
        for i in 0..d.len() / 2 {
            let a = (d[2 * i] as u128 + s[2 * i] as u128) % hm;
            let b = (d[2 * i + 1] as u128 + s[2 * i + 1] as u128) % hm;
            acc = (acc + a * b) % fm;
        }
        acc as u64
    }

    #[test]
    fn zero_input_is_seed_product() {
        let width = NhWidth::PRODUCTION;
        let (a, b) = (0xdead_beefu64, 0x1234_5678u64);
        assert_eq!(nh_full(width, &[0, 0], &[a, b]).unwrap(), a * b);
    }

    #[test]
    fn zero_seed_is_input_product() {
        let width = NhWidth::PRODUCTION;
        let (x, y) = (0xffff_ffffu64, 0xffff_fffeu64);
        assert_eq!(nh_full(width, &[x, y], &[0, 0]).unwrap(), x.wrapping_mul(y));
    }

    #[test]
    fn width4_example_matches_direct_evaluation() {
        let d = [3, 5, 2, 7];
        let s = [1, 2, 3, 4];
        // (3+1)(5+2) + (2+3)(7+4) = 28 + 55
        assert_eq!(nh_direct(4, &d, &s), 83);
        assert_eq!(nh_full(w(4), &d, &s).unwrap(), 83);
    }

    #[test]
    fn tree_node_examples() {
        let width = NhWidth::PRODUCTION;
        let (x, y) = (0x0123_4567u64, 0x89ab_cdefu64);
        assert_eq!(
            nh_tree_node(width, &[0, 0, x, y], &[99, 42]).unwrap(),
            99 * 42 + x + (y << 32)
        );
        assert_eq!(nh_tree_node(width, &[6, 7, 0, 0], &[0, 0]).unwrap(), 42);
        // (3+1)(5+2) + 2 + 16 * 7
        assert_eq!(nh_tree_node(w(4), &[3, 5, 2, 7], &[1, 2]).unwrap(), 142);
    }

    #[test]
    fn errors() {
        let width = NhWidth::PRODUCTION;
        assert_eq!(
            nh_full(width, &[1, 2, 3], &[0; 4]),
            Err(Error::OddLength(3))
        );
        assert_eq!(
            nh_tree_node(width, &[1, 2, 3], &[0; 4]),
            Err(Error::OddLength(3))
        );
        assert!(matches!(
            nh_tree_node(width, &[1, 2], &[]),
            Err(Error::InputTooShort { .. })
        ));
        assert!(matches!(
            nh_full(width, &[1, 2], &[0]),
            Err(Error::SeedTooShort { .. })
        ));
        assert!(matches!(
            nh_blockwise(width, 8, 2, &[0; 14], &[0; 7]),
            Err(Error::WrongBlockCount {
                expected: 8,
                actual: 7
            })
        ));
        assert!(NhWidth::new(0).is_err());
        assert!(NhWidth::new(33).is_err());
    }

    #[test]
    fn additions_wrap_at_half_width() {
        for half in [4u32, 8, 16, 32] {
            let width = w(half);
            let top = width.half_mask();
            // (top + 1) wraps to 0, so the product vanishes.
            assert_eq!(nh_full(width, &[top, 5], &[1, 3]).unwrap(), 0);
            // (top + top) wraps to top - 1 at half width.
            let expect = ((top - 1) as u128 * (top - 1) as u128 % (1u128 << (2 * half))) as u64;
            assert_eq!(nh_full(width, &[top, top], &[top, top]).unwrap(), expect);
        }
    }

    #[test]
    fn blockwise_zero_blocks_give_zero() {
        let out = nh_blockwise(NhWidth::PRODUCTION, 8, 8, &[0; 64], &[0; 7]).unwrap();
        assert_eq!(out, vec![0; 8]);
        let out = nh_blockwise(NhWidth::PRODUCTION, 8, 8, &[0; 64], &[u64::MAX; 7]).unwrap();
        // (0 + 0xffffffff)^2 per pair, seven pairs per lane
        let pair = 0xffff_ffffu64 * 0xffff_ffff;
        assert_eq!(out, vec![pair.wrapping_mul(7); 8]);
    }

    #[test]
    fn exhaustive_delta_universality_width4_sample() {
        // every (x, y) with x != y differing in the first pair, every delta
        let width = w(4);
        let mut worst = 0usize;
        for x in 0..256u64 {
            for y in (0..256u64).step_by(7) {
                if x == y {
                    continue;
                }
                let (x0, x1) = width.split(x);
                let (y0, y1) = width.split(y);
                let mut hist = [0usize; 256];
                for s in 0..256u64 {
                    let (s0, s1) = width.split(s);
                    let hx = nh_full(width, &[x0, x1], &[s0, s1]).unwrap();
                    let hy = nh_full(width, &[y0, y1], &[s0, s1]).unwrap();
                    hist[(hx.wrapping_sub(hy) & 0xff) as usize] += 1;
                }
                worst = worst.max(*hist.iter().max().unwrap());
            }
        }
        assert!(worst <= 16, "max count {worst} over 256 seeds");
    }

    proptest! {
        #[test]
        fn word_form_matches_half_word_form(
            half in prop::sample::select(vec![4u32, 8, 16, 32]),
            words in prop::collection::vec(any::<u64>(), 1..12),
            keys in prop::collection::vec(any::<u64>(), 12),
        ) {
            let width = w(half);
            let words: Vec<u64> = words.iter().map(|x| x & width.full_mask()).collect();
            let d = width.half_words(&words);
            let s = width.half_words(&keys);
            let direct = nh_direct(half, &d, &s);
            prop_assert_eq!(nh_full(width, &d, &s).unwrap(), direct);
            prop_assert_eq!(nh_words(width, &words, &keys, &mut ()), direct);
            if words.len() >= 2 {
                prop_assert_eq!(
                    nh_node_words(width, &words, &keys, &mut ()),
                    nh_tree_node(width, &d, &s).unwrap()
                );
            }
        }

        #[test]
        fn blockwise_lanes_match_scalar_tree_node(
            lanes in 1usize..9,
            blocks in prop::collection::vec(any::<u64>(), 64),
            seed in prop::collection::vec(any::<u64>(), 7),
        ) {
            let width = NhWidth::PRODUCTION;
            let fanout = 8;
            let blocks = &blocks[..fanout * lanes];
            let out = nh_blockwise(width, fanout, lanes, blocks, &seed).unwrap();
            let s = width.half_words(&seed);
            for lane in 0..lanes {
                let column: Vec<u64> = (0..fanout).map(|i| blocks[i * lanes + lane]).collect();
                prop_assert_eq!(out[lane], nh_tree_node(width, &width.half_words(&column), &s).unwrap());
            }
        }
    }

    #[test]
    fn blockwise_single_lane_is_tree_node_1e5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let width = NhWidth::PRODUCTION;
        for _ in 0..100_000 {
            let blocks: [u64; 8] = rng.gen();
            let seed: [u64; 7] = rng.gen();
            let out = nh_blockwise(width, 8, 1, &blocks, &seed).unwrap();
            let expect =
                nh_tree_node(width, &width.half_words(&blocks), &width.half_words(&seed)).unwrap();
            assert_eq!(out[0], expect);
        }
    }
}
