//! Carter-Wegman tree hashing over blocks with NH nodes, generalized to
//! fanout `f` and arbitrary input lengths.
//!
//! Blocks are pushed onto a stack of levels. Level `i` holds the roots of
//! complete subtrees over `f^i` consecutive blocks; when a level fills up with
//! `f` roots they are hashed by one NH node into a root on level `i + 1`. After
//! `N` blocks, level `i` holds exactly digit `i` of `N` written in base `f`,
//! which is the stack construction generalized from binary to `f`-ary.
//! A final NH over all pending roots, with empty positions read as zero,
//! plus the input length, produces one word per tree.

use crate::count::MulCounter;
use crate::nh::{nh_blockwise_into, nh_words, NhWidth};
use crate::{Error, Result};

/// Pending subtree roots, one vector of up to `f - 1` blocks per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLevelStack {
    fanout: usize,
    lanes: usize,
    levels: Vec<Vec<u64>>,
    blocks_seen: u64,
    scratch: Vec<u64>,
}

impl TreeLevelStack {
    pub fn new(fanout: usize, lanes: usize) -> Self {
        assert!(fanout >= 2 && lanes >= 1);
        Self {
            fanout,
            lanes,
            levels: Vec::new(),
            blocks_seen: 0,
            scratch: vec![0; lanes],
        }
    }

    /// A stack with the given pending roots, e.g. to probe [`tree_finalize`].
    pub fn from_pending(fanout: usize, lanes: usize, levels: Vec<Vec<u64>>) -> Result<Self> {
        let mut stack = Self::new(fanout, lanes);
        for (i, level) in levels.iter().enumerate() {
            if level.len() % lanes != 0 || level.len() / lanes >= fanout {
                return Err(Error::Config(format!(
                    "level {i} holds {} words; expected fewer than {fanout} blocks of {lanes}",
                    level.len()
                )));
            }
            stack.blocks_seen += (level.len() / lanes) as u64 * (fanout as u64).pow(i as u32);
        }
        stack.levels = levels;
        Ok(stack)
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    /// Number of levels ever reached: the base-`f` digit count of the blocks seen.
    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn blocks_seen(&self) -> u64 {
        self.blocks_seen
    }

    /// Roots pending at `level`.
    pub fn pending(&self, level: usize) -> usize {
        self.levels.get(level).map_or(0, |l| l.len() / self.lanes)
    }

    /// The `index`-th pending root at `level`, or `None` for an empty slot.
    pub fn slot(&self, level: usize, index: usize) -> Option<&[u64]> {
        let l = self.levels.get(level)?;
        l.get(index * self.lanes..(index + 1) * self.lanes)
    }

    /// Pushes one block; `level_keys[i]` keys the nodes that combine level `i`.
    pub fn push<C: MulCounter>(
        &mut self,
        width: NhWidth,
        block: &[u64],
        level_keys: &[&[u64]],
        counter: &mut C,
    ) -> Result<()> {
        assert_eq!(
            block.len(),
            self.lanes,
            "block has the wrong number of lanes"
        );
        if self.levels.is_empty() {
            self.levels
                .push(Vec::with_capacity(self.fanout * self.lanes));
        }
        self.levels[0].extend_from_slice(block);
        self.blocks_seen += 1;
        let full = self.fanout * self.lanes;
        let mut level = 0;
        while self.levels[level].len() == full {
            let keys = level_keys.get(level).ok_or(Error::SeedTooSmall {
                available: level_keys.len(),
                needed: level + 1,
            })?;
            nh_blockwise_into(
                width,
                self.fanout,
                self.lanes,
                &self.levels[level],
                keys,
                &mut self.scratch,
                counter,
            )?;
            self.levels[level].clear();
            if self.levels.len() == level + 1 {
                self.levels.push(Vec::with_capacity(full));
            }
            self.levels[level + 1].extend_from_slice(&self.scratch);
            level += 1;
        }
        Ok(())
    }
}

/// Runs the stack construction over `blocks` (block-major, `lanes` words each).
pub fn tree_reduce(
    width: NhWidth,
    fanout: usize,
    lanes: usize,
    blocks: &[u64],
    level_keys: &[&[u64]],
) -> Result<TreeLevelStack> {
    tree_reduce_counted(width, fanout, lanes, blocks, level_keys, &mut ())
}

pub fn tree_reduce_counted<C: MulCounter>(
    width: NhWidth,
    fanout: usize,
    lanes: usize,
    blocks: &[u64],
    level_keys: &[&[u64]],
    counter: &mut C,
) -> Result<TreeLevelStack> {
    if blocks.is_empty() {
        return Err(Error::EmptyStream);
    }
    if !blocks.len().is_multiple_of(lanes) {
        return Err(Error::Config(format!(
            "{} words is not a whole number of {lanes}-lane blocks",
            blocks.len()
        )));
    }
    let mut stack = TreeLevelStack::new(fanout, lanes);
    for block in blocks.chunks_exact(lanes) {
        stack.push(width, block, level_keys, counter)?;
    }
    Ok(stack)
}

/// Key words [`tree_finalize`] reads from `finalize_keys[level]`.
pub fn finalize_key_words(fanout: usize, lanes: usize, level: usize) -> usize {
    (fanout - 1) * lanes + usize::from(level == 0)
}

/// NH over every pending slot (empty slots as zero words), then the length tag.
///
/// Level `i` is keyed by the first `(f - 1) * b` words of `finalize_keys[i]`;
/// the tag uses the word after that in `finalize_keys[0]`.
pub fn tree_finalize(
    width: NhWidth,
    stack: &TreeLevelStack,
    n_tag: u64,
    finalize_keys: &[&[u64]],
) -> Result<u64> {
    tree_finalize_counted(width, stack, n_tag, finalize_keys, &mut ())
}

pub fn tree_finalize_counted<C: MulCounter>(
    width: NhWidth,
    stack: &TreeLevelStack,
    n_tag: u64,
    finalize_keys: &[&[u64]],
    counter: &mut C,
) -> Result<u64> {
    let (f, lanes) = (stack.fanout, stack.lanes);
    let slot_words = (f - 1) * lanes;
    let levels = stack.levels().max(1);
    if finalize_keys.len() < levels {
        return Err(Error::SeedTooSmall {
            available: finalize_keys.len(),
            needed: levels,
        });
    }
    for (i, keys) in finalize_keys[..levels].iter().enumerate() {
        if keys.len() < finalize_key_words(f, lanes, i) {
            return Err(Error::SeedTooShort {
                seed: 2 * keys.len(),
                needed: 2 * finalize_key_words(f, lanes, i),
            });
        }
    }
    let mut padded = vec![0u64; slot_words];
    let mut acc = 0u64;
    for (i, keys) in finalize_keys[..levels].iter().enumerate() {
        let pending = stack.levels.get(i).map_or(&[][..], |l| &l[..]);
        padded[..pending.len()].copy_from_slice(pending);
        padded[pending.len()..].fill(0);
        acc = acc.wrapping_add(nh_words(width, &padded, &keys[..slot_words], counter));
    }
    let tag = n_tag & width.full_mask();
    acc = acc.wrapping_add(nh_words(
        width,
        &[tag],
        &finalize_keys[0][slot_words..],
        counter,
    ));
    Ok(acc & width.full_mask())
}

/// `ceil(log_f(n_blocks))`: 0 for a single block.
pub fn tree_height(n_blocks: u64, fanout: u64) -> u32 {
    assert!(fanout >= 2);
    let mut h = 0;
    let mut cap = 1u128;
    while cap < n_blocks as u128 {
        cap *= fanout as u128;
        h += 1;
    }
    h
}

/// `floor(log_f(n_blocks))`, the alternative reading of the height; 0 for no blocks.
pub fn tree_height_floor(n_blocks: u64, fanout: u64) -> u32 {
    assert!(fanout >= 2);
    let mut h = 0;
    let mut cap = fanout as u128;
    while cap <= n_blocks as u128 {
        cap *= fanout as u128;
        h += 1;
    }
    h
}

/// Levels a stack reaches after `n_blocks` pushes: the base-`f` digit count.
pub fn stack_levels(n_blocks: u64, fanout: u64) -> u32 {
    if n_blocks == 0 {
        0
    } else {
        tree_height_floor(n_blocks, fanout) + 1
    }
}
