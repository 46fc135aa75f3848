use crate::params::HashParams;
use crate::tree::{finalize_key_words, stack_levels};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The splitmix64 stream: add the golden gamma to the state, then mix.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        splitmix_mix(self.state)
    }
}

/// XOR of the four little-endian words of a 32-byte master seed.
pub fn fold_master(master: &[u8; 32]) -> u64 {
    master
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .fold(0, |acc, w| acc ^ w)
}

/// Expands a 32-byte master seed into `needed` pseudo-random words.
///
/// Longer expansions extend shorter ones, so a buffer sized for a long input
/// keys a short input exactly as a buffer sized for the short input would.
pub fn expand_seed(master: &[u8; 32], needed: usize) -> Vec<u64> {
    let mut rng = SplitMix64::new(fold_master(master));
    (0..needed).map(|_| rng.next_u64()).collect()
}

/// Where each kind of key lives in the expanded seed.
///
/// The EHC entropy (`e * w` words) comes first, then the remainder keys
/// (`b * d * w + k - 1`), then one segment per tree level holding the level
/// keys of all `k` trees (`f - 1` each) followed by their finalize keys
/// (`b * f` each). Offsets never depend on how many levels were expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedLayout {
    ehc_words: usize,
    remainder_words: usize,
    trees: usize,
    fanout: usize,
    lanes: usize,
}

impl SeedLayout {
    pub fn of(params: &HashParams) -> Self {
        Self {
            ehc_words: params.e() * params.w(),
            remainder_words: params.instance_words() + params.k() - 1,
            trees: params.k(),
            fanout: params.f(),
            lanes: params.b(),
        }
    }

    fn level_words(&self) -> usize {
        self.trees * ((self.fanout - 1) + self.lanes * self.fanout)
    }

    fn levels_start(&self) -> usize {
        self.ehc_words + self.remainder_words
    }

    /// Total words for a buffer covering `levels` tree levels:
    /// `e w + (f - 1) h k + b f h k + b d w + k - 1` with `h = levels`.
    pub fn words_for_levels(&self, levels: usize) -> usize {
        self.levels_start() + levels * self.level_words()
    }

    fn tree_key_offset(&self, tree: usize, level: usize) -> usize {
        self.levels_start() + level * self.level_words() + tree * (self.fanout - 1)
    }

    fn finalize_key_offset(&self, tree: usize, level: usize) -> usize {
        self.levels_start()
            + level * self.level_words()
            + self.trees * (self.fanout - 1)
            + tree * self.lanes * self.fanout
    }
}

/// Tree levels needed to hash `n_bytes` bytes.
pub fn levels_for_len(params: &HashParams, n_bytes: u64) -> usize {
    let words = n_bytes.div_ceil(8);
    let instances = words / params.instance_words() as u64;
    stack_levels(instances, params.f() as u64) as usize
}

/// Seed words needed to hash inputs of up to `n_bytes` bytes.
pub fn seed_words_for_len(params: &HashParams, n_bytes: u64) -> usize {
    SeedLayout::of(params).words_for_levels(levels_for_len(params, n_bytes))
}

/// An expanded seed, partitioned for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedBuffer {
    master: [u8; 32],
    layout: SeedLayout,
    levels: usize,
    words: Vec<u64>,
}

impl SeedBuffer {
    /// Expands enough words for `levels` tree levels.
    pub fn new(master: &[u8; 32], params: &HashParams, levels: usize) -> Self {
        let layout = SeedLayout::of(params);
        Self {
            master: *master,
            layout,
            levels,
            words: expand_seed(master, layout.words_for_levels(levels)),
        }
    }

    /// Expands enough words for any input of at most `max_len` bytes.
    pub fn for_input_len(master: &[u8; 32], params: &HashParams, max_len: u64) -> Self {
        Self::new(master, params, levels_for_len(params, max_len))
    }

    pub fn master(&self) -> &[u8; 32] {
        &self.master
    }

    pub fn layout(&self) -> &SeedLayout {
        &self.layout
    }

    /// Tree levels covered.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The `e * w` EHC entropy words.
    pub fn ehc_keys(&self) -> &[u64] {
        &self.words[..self.layout.ehc_words]
    }

    /// The `b * d * w + k - 1` Toeplitz keys for the input tail.
    pub fn remainder_keys(&self) -> &[u64] {
        let start = self.layout.ehc_words;
        &self.words[start..start + self.layout.remainder_words]
    }

    /// The `f - 1` node keys of `tree` at `level`.
    pub fn tree_keys(&self, tree: usize, level: usize) -> &[u64] {
        assert!(level < self.levels && tree < self.layout.trees);
        let at = self.layout.tree_key_offset(tree, level);
        &self.words[at..at + self.layout.fanout - 1]
    }

    /// The `b * f` finalize keys of `tree` at `level`.
    pub fn finalize_keys(&self, tree: usize, level: usize) -> &[u64] {
        assert!(level < self.levels && tree < self.layout.trees);
        let at = self.layout.finalize_key_offset(tree, level);
        let len = self.layout.lanes * self.layout.fanout;
        debug_assert!(len >= finalize_key_words(self.layout.fanout, self.layout.lanes, 0));
        &self.words[at..at + len]
    }
}
