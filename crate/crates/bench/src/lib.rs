//! Criterion benchmarks for the hash and its stages.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use halftime::hasher::SplitMix64;
use halftime::{hash, hash_reference, HashParams, SeedBuffer, Variant};

pub const SIZES: [usize; 4] = [64, 1 << 10, 64 << 10, 1 << 20];

pub fn random_input(len: usize) -> Vec<u8> {
    let mut rng = SplitMix64::new(len as u64);
    let mut out: Vec<u8> = (0..len.div_ceil(8))
        .flat_map(|_| rng.next_u64().to_le_bytes())
        .collect();
    out.truncate(len);
    out
}

pub fn bench_variants(c: &mut Criterion) {
    for v in Variant::ALL {
        let params = HashParams::of(v);
        let mut group = c.benchmark_group(format!("halftime{v}"));
        for size in SIZES {
            let input = random_input(size);
            let seed = SeedBuffer::for_input_len(&[7; 32], &params, size as u64);
            group.throughput(Throughput::Bytes(size as u64));
            group.bench_with_input(BenchmarkId::from_parameter(size), &input, |b, input| {
                b.iter(|| hash(black_box(input), &seed, &params).unwrap())
            });
        }
        group.finish();
    }
}

pub fn bench_reference(c: &mut Criterion) {
    let params = HashParams::of(Variant::V24);
    let size = 64 << 10;
    let input = random_input(size);
    let seed = SeedBuffer::for_input_len(&[7; 32], &params, size as u64);
    let mut group = c.benchmark_group("reference24");
    group.throughput(Throughput::Bytes(size as u64));
    group.bench_function("65536", |b| {
        b.iter(|| hash_reference(black_box(&input), &seed, &params).unwrap())
    });
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    bench_variants(c);
    bench_reference(c);
}
