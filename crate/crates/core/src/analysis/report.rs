use std::fmt::Write as _;

use crate::hasher::{levels_for_len, SeedLayout};
use crate::params::HashParams;
use crate::tree::{tree_height, tree_height_floor};

/// Closed-form figures for hashing one input of `n_bytes` bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub output_bytes: usize,
    pub n_bytes: u64,
    pub instances: u64,
    /// `ceil(log_f(instances))`.
    pub height: u32,
    /// `floor(log_f(instances))`.
    pub height_floor: u32,
    /// `32 k - lg(2^(k p) + h^k + 1)` at the ceiling height.
    pub epsilon_log2: f64,
    /// Same, at the floor height.
    pub epsilon_log2_floor: f64,
    /// `e w + (f - 1) h k + b f h k + b d w + k - 1` at the ceiling height.
    pub seed_words: usize,
    /// What the hasher actually expands: one segment per stack level.
    pub hasher_seed_words: usize,
    /// `(e w + k) b` per instance, times the instance count.
    pub multiplications: u128,
    /// `b f h k + b d w k`, the finalization and remainder overhead.
    pub multiplications_log_term: u128,
}

/// Lower bound on the log2 of the inverse collision probability.
pub fn epsilon_log2(k: usize, p: u32, height: u32) -> f64 {
    let kp = (k as u32 * p) as f64;
    let hk = (height as f64).powi(k as i32);
    32.0 * k as f64 - (kp.exp2() + hk + 1.0).log2()
}

pub fn entropy_report(params: &HashParams, n_bytes: u64) -> EntropyReport {
    let (k, b, f) = (params.k(), params.b(), params.f());
    let instances = n_bytes.div_ceil(8) / params.instance_words() as u64;
    let height = tree_height(instances, f as u64);
    let height_floor = tree_height_floor(instances, f as u64);
    let layout = SeedLayout::of(params);
    let seed_words = layout.words_for_levels(height as usize);
    let per_instance = ((params.e() * params.w() + k) * b) as u128;
    EntropyReport {
        output_bytes: params.output_bytes(),
        n_bytes,
        instances,
        height,
        height_floor,
        epsilon_log2: epsilon_log2(k, params.p(), height),
        epsilon_log2_floor: epsilon_log2(k, params.p(), height_floor),
        seed_words,
        hasher_seed_words: layout.words_for_levels(levels_for_len(params, n_bytes)),
        multiplications: per_instance * instances as u128,
        multiplications_log_term: (b * f * height as usize * k + params.instance_words() * k)
            as u128,
    }
}

impl EntropyReport {
    pub fn seed_bytes(&self) -> usize {
        self.seed_words * 8
    }

    pub const CSV_HEADER: &'static str = "output_bytes,n_bytes,instances,height,height_floor,\
epsilon_log2,epsilon_log2_floor,seed_words,seed_bytes,hasher_seed_words,multiplications,multiplications_log_term";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4},{},{},{},{},{}",
            self.output_bytes,
            self.n_bytes,
            self.instances,
            self.height,
            self.height_floor,
            self.epsilon_log2,
            self.epsilon_log2_floor,
            self.seed_words,
            self.seed_bytes(),
            self.hasher_seed_words,
            self.multiplications,
            self.multiplications_log_term
        )
    }

    pub fn table(&self) -> String {
        let rows: [(&str, String); 11] = [
            ("output bytes", self.output_bytes.to_string()),
            ("input bytes", self.n_bytes.to_string()),
            ("instances", self.instances.to_string()),
            ("tree height", self.height.to_string()),
            ("tree height (floor)", self.height_floor.to_string()),
            ("entropy bits", format!("{:.2}", self.epsilon_log2)),
            (
                "entropy bits (floor h)",
                format!("{:.2}", self.epsilon_log2_floor),
            ),
            ("seed words", self.seed_words.to_string()),
            ("seed bytes", self.seed_bytes().to_string()),
            ("multiplications", self.multiplications.to_string()),
            ("  + log term", self.multiplications_log_term.to_string()),
        ];
        let mut out = String::new();
        for (label, value) in rows {
            let _ = writeln!(out, "{label:<24}{value:>24}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hasher::seed_words_for_len;
    use crate::params::Variant;

    const MIB: u64 = 1 << 20;
    const EIB: u64 = 1 << 60;

    #[test]
    fn one_mebibyte_v24() {
        let r = entropy_report(&HashParams::of(Variant::V24), MIB);
        assert_eq!(r.instances, 780);
        assert_eq!(r.height, 4);
        assert_eq!(r.height_floor, 3);
        assert_eq!(r.seed_words, 1049);
        assert_eq!(r.seed_bytes(), 8392);
        assert_eq!(
            r.hasher_seed_words,
            seed_words_for_len(&HashParams::of(Variant::V24), MIB)
        );
        assert_eq!(r.multiplications, 187_200);
    }

    #[test]
    fn one_exbibyte_v24() {
        let r = entropy_report(&HashParams::of(Variant::V24), EIB);
        assert_eq!(r.height, 17);
        assert!(r.epsilon_log2 > 83.0, "{}", r.epsilon_log2);
        assert!(
            (r.seed_bytes() as f64 - 34_000.0).abs() <= 0.15 * 34_000.0,
            "{}",
            r.seed_bytes()
        );
    }

    #[test]
    fn worked_height_four() {
        assert!((epsilon_log2(3, 2, 4) - (96.0 - 129f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_length() {
        for v in Variant::ALL {
            let p = HashParams::of(v);
            let mut prev = entropy_report(&p, 1);
            for shift in 1..=60 {
                let r = entropy_report(&p, 1u64 << shift);
                assert!(r.epsilon_log2 <= prev.epsilon_log2 + 1e-12);
                assert!(r.seed_words >= prev.seed_words);
                assert!(r.height_floor <= r.height);
                prev = r;
            }
        }
    }

    #[test]
    fn short_inputs_have_no_tree() {
        let r = entropy_report(&HashParams::of(Variant::V40), 64);
        assert_eq!((r.instances, r.height, r.multiplications), (0, 0, 0));
        assert_eq!(r.epsilon_log2, 160.0 - (2f64.powi(15) + 1.0).log2());
    }

    #[test]
    fn renderings() {
        let r = entropy_report(&HashParams::of(Variant::V24), MIB);
        let cols = EntropyReport::CSV_HEADER.split(',').count();
        assert_eq!(r.csv_row().split(',').count(), cols);
        assert!(r.table().contains("8392"));
    }
}
