use std::hint::black_box;
use std::time::Instant;

use halftime::hasher::SplitMix64;
use halftime::{hash, HashParams, SeedBuffer, Variant};

pub const CSV_HEADER: &str = "size_bytes,variant,bytes_per_second,bytes_per_cycle";

#[cfg(target_arch = "x86_64")]
fn cycles() -> Option<u64> {
    #[allow(unused_unsafe)]
    // SAFETY: rdtsc has no preconditions on x86_64.
    Some(unsafe { core::arch::x86_64::_rdtsc() })
}

#[cfg(not(target_arch = "x86_64"))]
fn cycles() -> Option<u64> {
    None
}

pub struct Row {
    pub size: u64,
    pub variant: Variant,
    pub bytes_per_second: f64,
    pub bytes_per_cycle: Option<f64>,
}

impl Row {
    pub fn csv(&self) -> String {
        let bpc = self
            .bytes_per_cycle
            .map_or(String::new(), |b| format!("{b:.3}"));
        format!(
            "{},{},{:.0},{bpc}",
            self.size, self.variant, self.bytes_per_second
        )
    }
}

/// Times `reps` hashes of one random input per size and variant, keeping
/// the fastest repetition.
pub fn measure(sizes: &[u64], variants: &[Variant], reps: u32) -> Vec<Row> {
    let mut rng = SplitMix64::new(0xbe4c);
    let mut rows = Vec::new();
    for &size in sizes {
        let input: Vec<u8> = (0..size.div_ceil(8))
            .flat_map(|_| rng.next_u64().to_le_bytes())
            .take(size as usize)
            .collect();
        for &variant in variants {
            let params = HashParams::of(variant);
            let seed = SeedBuffer::for_input_len(&[0x5e; 32], &params, size);
            let mut best_secs = f64::INFINITY;
            let mut best_cycles = u64::MAX;
            for _ in 0..reps.max(1) {
                let c0 = cycles();
                let t0 = Instant::now();
                black_box(hash(black_box(&input), &seed, &params).expect("seed sized for input"));
                let secs = t0.elapsed().as_secs_f64();
                if let (Some(a), Some(b)) = (c0, cycles()) {
                    best_cycles = best_cycles.min(b.saturating_sub(a).max(1));
                }
                best_secs = best_secs.min(secs.max(1e-9));
            }
            rows.push(Row {
                size,
                variant,
                bytes_per_second: size as f64 / best_secs,
                bytes_per_cycle: (best_cycles != u64::MAX)
                    .then(|| size as f64 / best_cycles as f64),
            });
        }
    }
    rows
}
