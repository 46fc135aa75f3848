//! Empirical collision and difference probabilities at reduced word widths.
//!
//! Everything here drives the production stage functions with narrow
//! [`NhWidth`]s, so that seed spaces are small enough to enumerate and the
//! measured probabilities can be compared to their analytic bounds.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ehc::{ehc, encode, EhcInstance};
use crate::nh::{nh_words, NhWidth};
use crate::params::HashParams;
use crate::tree::tree_reduce;
use crate::{Error, Result};

/// Largest seed space enumerated exhaustively, in bits.
pub const MAX_SEED_BITS: u32 = 32;

/// A pair of distinct inputs whose output difference is measured, with an
/// optional difference of particular interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaProbe {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub target: Option<Vec<u64>>,
}

impl DeltaProbe {
    pub fn new(x: Vec<u64>, y: Vec<u64>) -> Self {
        Self { x, y, target: None }
    }

    pub fn with_target(mut self, delta: Vec<u64>) -> Self {
        self.target = Some(delta);
        self
    }
}

/// The function under test.
#[derive(Debug, Clone, Copy)]
pub enum Stage<'a> {
    /// NH over whole words, one key word per input word.
    Nh { width: NhWidth },
    /// Encode, hash and combine one instance, `e w` entropy words.
    Ehc {
        width: NhWidth,
        params: &'a HashParams,
    },
}

impl Stage<'_> {
    fn width(&self) -> NhWidth {
        match *self {
            Stage::Nh { width } | Stage::Ehc { width, .. } => width,
        }
    }

    fn seed_words(&self, probe: &DeltaProbe) -> usize {
        match self {
            Stage::Nh { .. } => probe.x.len(),
            Stage::Ehc { params, .. } => params.e() * params.w(),
        }
    }

    fn eval(&self, input: &[u64], seed: &[u64]) -> Result<Vec<u64>> {
        match *self {
            Stage::Nh { width } => Ok(vec![nh_words(width, input, seed, &mut ())]),
            Stage::Ehc { width, params } => {
                Ok(ehc(width, params, &EhcInstance::new(params, input, seed)?))
            }
        }
    }

    // Seed words that carry the randomness for this probe: the first `k`
    // positions whose inputs differ.
    fn free_seed_words(&self, probe: &DeltaProbe) -> Vec<usize> {
        match self {
            Stage::Nh { .. } => probe
                .x
                .iter()
                .zip(&probe.y)
                .position(|(a, b)| a != b)
                .into_iter()
                .collect(),
            Stage::Ehc { params, .. } => {
                let (w, b) = (params.w(), params.b());
                let ex = encode(params.code(), b, &probe.x);
                let ey = encode(params.code(), b, &probe.y);
                (0..ex.item_count())
                    .filter(|&i| ex.item(i) != ey.item(i))
                    .take(params.k())
                    .flat_map(|i| i * w..(i + 1) * w)
                    .collect()
            }
        }
    }
}

/// How seeds are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every value of the seed words at the first `k` differing positions,
    /// remaining seed words fixed from `rng_seed`.
    Exhaustive { rng_seed: u64 },
    /// Fully random seeds.
    Random { samples: u64, rng_seed: u64 },
}

/// The most likely output difference over the seeds, for one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEstimate {
    pub delta: Vec<u64>,
    pub hits: u64,
    pub seeds: u64,
    /// Seeds giving the probe's target difference, if it has one.
    pub target_hits: Option<u64>,
    /// Upper end of the 95% Wilson interval; equal to the point estimate
    /// when the enumeration was exhaustive.
    pub upper: f64,
}

impl DeltaEstimate {
    pub fn probability(&self) -> f64 {
        self.hits as f64 / self.seeds as f64
    }
}

/// 95% Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = p + z * z / (2.0 * n_f);
    let spread = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt();
    (
        ((centre - spread) / denom).max(0.0),
        ((centre + spread) / denom).min(1.0),
    )
}

/// `max_δ Pr_seed[H(x) - H(y) = δ]` for one probe, differences taken
/// component-wise mod `2^full_bits`.
pub fn max_delta_probability(
    stage: Stage<'_>,
    probe: &DeltaProbe,
    sampling: Sampling,
) -> Result<DeltaEstimate> {
    if probe.x.len() != probe.y.len() {
        return Err(Error::Config("probe inputs differ in length".into()));
    }
    let width = stage.width();
    let mask = width.full_mask();
    let diff = |seed: &[u64]| -> Result<Vec<u64>> {
        let hx = stage.eval(&probe.x, seed)?;
        let hy = stage.eval(&probe.y, seed)?;
        Ok(hx
            .iter()
            .zip(&hy)
            .map(|(a, b)| a.wrapping_sub(*b) & mask)
            .collect())
    };
    let mut seed = vec![0u64; stage.seed_words(probe)];
    let mut histogram: HashMap<Vec<u64>, u64> = HashMap::new();

    let seeds = match sampling {
        Sampling::Exhaustive { rng_seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            for s in seed.iter_mut() {
                *s = rng.gen::<u64>() & mask;
            }
            let free = stage.free_seed_words(probe);
            let bits = free.len() as u32 * width.full_bits();
            if bits > MAX_SEED_BITS {
                return Err(Error::EnumerationTooLarge {
                    bits,
                    limit: MAX_SEED_BITS,
                });
            }
            let fb = width.full_bits();
            for v in 0u64..(1u64 << bits) {
                for (j, &pos) in free.iter().enumerate() {
                    seed[pos] = (v >> (j as u32 * fb)) & mask;
                }
                *histogram.entry(diff(&seed)?).or_default() += 1;
            }
            1u64 << bits
        }
        Sampling::Random { samples, rng_seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            for _ in 0..samples {
                for s in seed.iter_mut() {
                    *s = rng.gen::<u64>() & mask;
                }
                *histogram.entry(diff(&seed)?).or_default() += 1;
            }
            samples
        }
    };

    let target_hits = probe
        .target
        .as_ref()
        .map(|t| histogram.get(t).copied().unwrap_or(0));
    let (delta, hits) = histogram
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .ok_or_else(|| Error::Config("no seeds sampled".into()))?;
    let upper = match sampling {
        Sampling::Exhaustive { .. } => hits as f64 / seeds as f64,
        Sampling::Random { .. } => wilson_interval(hits, seeds).1,
    };
    Ok(DeltaEstimate {
        delta,
        hits,
        seeds,
        target_hits,
        upper,
    })
}

/// How an estimate compares to its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Between one and two times the bound, or the interval reaches past
    /// twice the bound.
    Inconclusive,
    /// More than twice the bound.
    Fail,
}

/// Collision rate of `k` independent `f`-ary trees of height `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEstimate {
    pub trials: u64,
    pub collisions: u64,
    pub rate: f64,
    pub interval: (f64, f64),
    /// `h^k 2^(-half_bits k)`.
    pub bound: f64,
    pub verdict: Verdict,
}

pub fn verdict(rate: f64, upper: f64, bound: f64) -> Verdict {
    if rate > 2.0 * bound {
        Verdict::Fail
    } else if rate > bound || upper > 2.0 * bound {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

/// Hashes random pairs of `f^h`-block inputs that differ in one block
/// through `k` trees with fresh keys each trial, counting pairs whose roots
/// agree in every tree.
pub fn tree_collision_estimate(
    width: NhWidth,
    fanout: usize,
    height: u32,
    k: usize,
    trials: u64,
    rng_seed: u64,
) -> Result<TreeEstimate> {
    tree_collision_estimate_with(width, fanout, height, k, trials, rng_seed, |rng, x| {
        let mut y = x.to_vec();
        let pos = rng.gen_range(0..y.len());
        y[pos] ^= rng.gen_range(1..=width.full_mask());
        y
    })
}

/// As [`tree_collision_estimate`] with a caller-chosen second input.
pub fn tree_collision_estimate_with(
    width: NhWidth,
    fanout: usize,
    height: u32,
    k: usize,
    trials: u64,
    rng_seed: u64,
    mut partner: impl FnMut(&mut ChaCha8Rng, &[u64]) -> Vec<u64>,
) -> Result<TreeEstimate> {
    if fanout < 2 || height == 0 || k == 0 {
        return Err(Error::Config(
            "tree estimate needs f >= 2, h >= 1, k >= 1".into(),
        ));
    }
    let n = fanout.pow(height);
    let mask = width.full_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut collisions = 0;
    for _ in 0..trials {
        let x: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & mask).collect();
        let y = partner(&mut rng, &x);
        let mut all_equal = true;
        for _ in 0..k {
            let keys: Vec<Vec<u64>> = (0..height)
                .map(|_| (0..fanout - 1).map(|_| rng.gen::<u64>() & mask).collect())
                .collect();
            let refs: Vec<&[u64]> = keys.iter().map(Vec::as_slice).collect();
            let rx = tree_reduce(width, fanout, 1, &x, &refs)?;
            let ry = tree_reduce(width, fanout, 1, &y, &refs)?;
            if rx.slot(height as usize, 0) != ry.slot(height as usize, 0) {
                all_equal = false;
            }
        }
        collisions += all_equal as u64;
    }
    let rate = collisions as f64 / trials as f64;
    let interval = wilson_interval(collisions, trials);
    let bound = (height as f64).powi(k as i32) * (-(width.half_bits() as f64) * k as f64).exp2();
    Ok(TreeEstimate {
        trials,
        collisions,
        rate,
        interval,
        bound,
        verdict: verdict(rate, interval.1, bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ErasureCode, TransformMatrix};

    fn w(bits: u32) -> NhWidth {
        NhWidth::new(bits).unwrap()
    }

    #[test]
    fn single_word_nh_is_exactly_half_width_bound() {
        let stage = Stage::Nh { width: w(4) };
        let mut worst = 0;
        for x in 0..256u64 {
            for y in [0u64, 1, 0x10, 0xff] {
                if x == y {
                    continue;
                }
                let est = max_delta_probability(
                    stage,
                    &DeltaProbe::new(vec![x], vec![y]),
                    Sampling::Exhaustive { rng_seed: 0 },
                )
                .unwrap();
                assert_eq!(est.seeds, 256);
                worst = worst.max(est.hits);
            }
        }
        assert_eq!(worst, 16);
    }

    #[test]
    fn multiword_nh_enumerates_first_differing_word() {
        let stage = Stage::Nh { width: w(4) };
        let probe = DeltaProbe::new(vec![1, 2, 3, 4], vec![1, 2, 0x93, 7]);
        let est =
            max_delta_probability(stage, &probe, Sampling::Exhaustive { rng_seed: 5 }).unwrap();
        assert_eq!(est.seeds, 256);
        assert!(est.probability() <= 1.0 / 16.0);
        let aimed = probe.clone().with_target(est.delta.clone());
        let again =
            max_delta_probability(stage, &aimed, Sampling::Exhaustive { rng_seed: 5 }).unwrap();
        assert_eq!(again.target_hits, Some(est.hits));
        let missing = probe.with_target(vec![0x1ff]);
        let none =
            max_delta_probability(stage, &missing, Sampling::Exhaustive { rng_seed: 5 }).unwrap();
        assert_eq!(none.target_hits, Some(0));
    }

    #[test]
    fn equal_inputs_always_collide() {
        let stage = Stage::Nh { width: w(4) };
        let probe = DeltaProbe::new(vec![9, 9], vec![9, 9]);
        let est = max_delta_probability(
            stage,
            &probe,
            Sampling::Random {
                samples: 100,
                rng_seed: 1,
            },
        )
        .unwrap();
        assert_eq!((est.hits, est.delta.clone()), (100, vec![0]));
        let exact =
            max_delta_probability(stage, &probe, Sampling::Exhaustive { rng_seed: 1 }).unwrap();
        assert_eq!((exact.seeds, exact.probability()), (1, 1.0));
    }

    #[test]
    fn toy_ehc_respects_bound() {
        let m = TransformMatrix::from_rows(&[[1, 0, 1], [0, 1, 4]]).unwrap();
        let params =
            HashParams::custom(1, 1, 2, m, ErasureCode::xor_parity(2, 1).unwrap()).unwrap();
        assert_eq!(params.p(), 2);
        let stage = Stage::Ehc {
            width: w(4),
            params: &params,
        };
        let bound = (2f64).powi(2 * (2 - 4));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = vec![rng.gen::<u64>() & 0xff, rng.gen::<u64>() & 0xff];
            let mut y = x.clone();
            y[rng.gen_range(0..2)] ^= rng.gen_range(1..=0xffu64);
            let est = max_delta_probability(
                stage,
                &DeltaProbe::new(x, y),
                Sampling::Exhaustive { rng_seed: 9 },
            )
            .unwrap();
            assert_eq!(est.seeds, 1 << 16);
            assert!(est.probability() <= bound, "{}", est.probability());
        }
    }

    #[test]
    fn oversized_enumeration_is_refused() {
        let stage = Stage::Nh { width: w(32) };
        let probe = DeltaProbe::new(vec![1], vec![2]);
        assert_eq!(
            max_delta_probability(stage, &probe, Sampling::Exhaustive { rng_seed: 0 }),
            Err(Error::EnumerationTooLarge {
                bits: 64,
                limit: 32
            })
        );
    }

    #[test]
    fn wilson_interval_brackets_estimate() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert!(wilson_interval(10, 10).1 <= 1.0);
    }

    #[test]
    fn tree_rate_is_under_bound() {
        let est = tree_collision_estimate(w(4), 2, 2, 1, 20_000, 11).unwrap();
        assert!(est.rate <= est.bound, "{est:?}");
        assert_ne!(est.verdict, Verdict::Fail);
    }

    #[test]
    fn identical_tree_inputs_always_collide() {
        let est = tree_collision_estimate_with(w(4), 2, 2, 2, 500, 1, |_, x| x.to_vec()).unwrap();
        assert_eq!(est.rate, 1.0);
        assert_eq!(est.verdict, Verdict::Fail);
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(verdict(0.01, 0.015, 0.01), Verdict::Pass);
        assert_eq!(verdict(0.015, 0.018, 0.01), Verdict::Inconclusive);
        assert_eq!(verdict(0.005, 0.03, 0.01), Verdict::Inconclusive);
        assert_eq!(verdict(0.03, 0.04, 0.01), Verdict::Fail);
    }
}
