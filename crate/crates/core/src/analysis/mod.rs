//! Exact checks of the algebraic preconditions the hash relies on, and the
//! closed-form entropy, seed-size and cost formulas.

mod report;

pub use report::{entropy_report, EntropyReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ehc::encode_into;
use crate::hasher::seed_words_for_len;
use crate::params::{ErasureCode, HashParams, TransformMatrix};
use crate::{Error, Result};

/// Largest enumeration [`verify_min_distance`] will attempt, in input bits.
pub const MAX_EXHAUSTIVE_BITS: u32 = 28;

/// Determinant by fraction-free (Bareiss) elimination; every division is exact.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Exponent of the largest power of two dividing `n`; `None` for zero.
pub fn two_adic_valuation(n: i128) -> Option<u32> {
    (n != 0).then(|| n.trailing_zeros())
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Determinant of every `k`-column submatrix, keyed by its columns.
pub fn subset_determinants(matrix: &TransformMatrix) -> Vec<(Vec<usize>, i128)> {
    let mut out = Vec::new();
    for_each_combination(matrix.cols(), matrix.rows(), |cols| {
        out.push((cols.to_vec(), determinant(&matrix.columns(cols))));
    });
    out
}

/// `p`: the largest 2-adic valuation over all `k`-column determinants.
///
/// Fails on the first singular subset, since then some pair of inputs
/// differing in those columns cannot be told apart.
pub fn max_two_adic_valuation(matrix: &TransformMatrix, k: usize) -> Result<u32> {
    if k != matrix.rows() {
        return Err(Error::Config(format!(
            "k = {k} but the matrix has {} rows",
            matrix.rows()
        )));
    }
    let mut p = 0;
    for (columns, det) in subset_determinants(matrix) {
        match two_adic_valuation(det) {
            Some(v) => p = p.max(v),
            None => return Err(Error::SingularSubset { columns }),
        }
    }
    Ok(p)
}

/// `k * (half_bits - p)`: output entropy bits of EHC with NH at the given
/// half-word width.
pub fn ehc_bound(params: &HashParams, half_bits: u32) -> i64 {
    ehc_bound_bits(params.k(), params.p(), half_bits)
}

pub fn ehc_bound_bits(k: usize, p: u32, half_bits: u32) -> i64 {
    k as i64 * (half_bits as i64 - p as i64)
}

/// Seed words the hasher needs for inputs of up to `n_bytes` bytes.
pub fn seed_words(params: &HashParams, n_bytes: u64) -> usize {
    seed_words_for_len(params, n_bytes)
}

/// Outcome of [`verify_min_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReport {
    pub declared: usize,
    pub symbol_bits: u32,
    /// Minimum weight over all nonzero reduced-width inputs.
    pub exhaustive_min: usize,
    pub random_trials: usize,
    /// Minimum distance seen across the full-width random pairs, if any ran.
    pub random_min: Option<usize>,
}

impl DistanceReport {
    pub fn min_distance(&self) -> usize {
        self.random_min
            .map_or(self.exhaustive_min, |r| r.min(self.exhaustive_min))
    }
}

fn nonzero_items(encoded: &[u64], item_words: usize) -> usize {
    encoded
        .chunks_exact(item_words)
        .filter(|item| item.iter().any(|&x| x != 0))
        .count()
}

fn differing_items(a: &[u64], b: &[u64], item_words: usize) -> usize {
    a.chunks_exact(item_words)
        .zip(b.chunks_exact(item_words))
        .filter(|(x, y)| x != y)
        .count()
}

/// Measures the minimum distance of `code`.
///
/// Each item is shrunk to `symbol_bits` bits (`symbol_bits / w` bits per
/// block) and every nonzero input is encoded; for a linear code the smallest
/// number of nonzero output items is the minimum distance. Because the codes
/// here act on every bit position of a block independently, the value at one
/// bit per block is already the full-width distance. `random_trials` pairs of
/// full 64-bit inputs differing in a random set of items are encoded as a
/// cross-check.
pub fn verify_min_distance(
    code: &ErasureCode,
    symbol_bits: u32,
    random_trials: usize,
) -> Result<DistanceReport> {
    let w = code.item_blocks();
    if symbol_bits == 0 || symbol_bits > 8 || !(symbol_bits as usize).is_multiple_of(w) {
        return Err(Error::Config(format!(
            "symbol width {symbol_bits} must be in 1..=8 and a multiple of w = {w}"
        )));
    }
    let lane_bits = symbol_bits as usize / w;
    let (d, e) = (code.data_items(), code.total_items());
    let bits = d as u32 * symbol_bits;
    if bits > MAX_EXHAUSTIVE_BITS {
        return Err(Error::EnumerationTooLarge {
            bits,
            limit: MAX_EXHAUSTIVE_BITS,
        });
    }

    let block_mask = (1u64 << lane_bits) - 1;
    let mut input = vec![0u64; d * w];
    let mut encoded = vec![0u64; e * w];
    let mut exhaustive_min = e;
    for v in 1u64..(1u64 << bits) {
        for (i, blk) in input.iter_mut().enumerate() {
            *blk = (v >> (i * lane_bits)) & block_mask;
        }
        encode_into(code, 1, &input, &mut encoded);
        exhaustive_min = exhaustive_min.min(nonzero_items(&encoded, w));
    }

    let mut random_min = None;
    if random_trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6469_7374_616e_6365);
        let mut x = vec![0u64; d * w];
        let mut y = vec![0u64; d * w];
        let mut ex = vec![0u64; e * w];
        let mut ey = vec![0u64; e * w];
        let mut order: Vec<usize> = (0..d).collect();
        let mut min = e;
        for _ in 0..random_trials {
            rng.fill(&mut x[..]);
            y.copy_from_slice(&x);
            let changed = rng.gen_range(1..=d);
            for i in 0..changed {
                let j = rng.gen_range(i..d);
                order.swap(i, j);
            }
            for &c in &order[..changed] {
                // at least one block of the item changes
                let hit = rng.gen_range(0..w);
                for l in 0..w {
                    let delta: u64 = if l == hit {
                        rng.gen_range(1..=u64::MAX)
                    } else {
                        rng.gen()
                    };
                    y[c * w + l] ^= delta;
                }
            }
            encode_into(code, 1, &x, &mut ex);
            encode_into(code, 1, &y, &mut ey);
            min = min.min(differing_items(&ex, &ey, w));
        }
        random_min = Some(min);
    }

    let report = DistanceReport {
        declared: code.min_distance(),
        symbol_bits,
        exhaustive_min,
        random_trials,
        random_min,
    };
    if report.min_distance() < report.declared {
        return Err(Error::DistanceDeficient {
            declared: report.declared,
            measured: report.min_distance(),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Variant;

    // Cofactor expansion, only for cross-checking Bareiss on small inputs.
    fn det_laplace(m: &[Vec<i64>]) -> i128 {
        if m.is_empty() {
            return 1;
        }
        let mut acc = 0i128;
        for j in 0..m.len() {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let term = m[0][j] as i128 * det_laplace(&minor);
            acc += if j % 2 == 0 { term } else { -term };
        }
        acc
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        for v in Variant::ALL {
            let m = HashParams::of(v).matrix().clone();
            for (cols, det) in subset_determinants(&m) {
                assert_eq!(det, det_laplace(&m.columns(&cols)), "{v} {cols:?}");
            }
        }
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(determinant(&[vec![2, 4], vec![1, 2]]), 0);
        assert_eq!(
            determinant(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]),
            -1
        );
    }

    #[test]
    fn published_valuations() {
        let got: Vec<u32> = Variant::ALL
            .iter()
            .map(|&v| {
                let p = HashParams::of(v);
                max_two_adic_valuation(p.matrix(), p.k()).unwrap()
            })
            .collect();
        assert_eq!(got, [2, 2, 3, 3]);
    }

    #[test]
    fn identity_has_valuation_zero() {
        for k in 1..6 {
            assert_eq!(
                max_two_adic_valuation(&TransformMatrix::identity(k), k).unwrap(),
                0
            );
        }
    }

    #[test]
    fn three_by_nine_forces_an_even_determinant() {
        // Only 7 nonzero columns exist over GF(2)^3, so two of the nine
        // columns agree mod 2 and any subset holding both has an even det.
        let p = HashParams::of(Variant::V24);
        let m = p.matrix();
        let parity: Vec<Vec<u8>> = (0..m.cols())
            .map(|c| (0..3).map(|r| m.get(r, c) % 2).collect())
            .collect();
        let mut twins = None;
        for a in 0..m.cols() {
            for b in a + 1..m.cols() {
                if parity[a] == parity[b] {
                    twins = Some((a, b));
                }
            }
        }
        let (a, b) = twins.expect("pigeonhole");
        let third = (0..m.cols()).find(|&c| c != a && c != b).unwrap();
        let mut cols = vec![a, b, third];
        cols.sort();
        assert_eq!(determinant(&m.columns(&cols)) % 2, 0);
        assert!(max_two_adic_valuation(m, 3).unwrap() >= 1);
    }

    #[test]
    fn singular_subset_is_reported() {
        let m = TransformMatrix::from_rows(&[[1, 2, 1, 0], [0, 1, 0, 1]]).unwrap();
        assert_eq!(
            max_two_adic_valuation(&m, 2),
            Err(Error::SingularSubset {
                columns: vec![0, 2]
            })
        );
        assert!(max_two_adic_valuation(&m, 3).is_err());
    }

    #[test]
    fn combinations_enumerate_binomial_count() {
        let mut n = 0;
        for_each_combination(10, 4, |_| n += 1);
        assert_eq!(n, 210);
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut empty = 0;
        for_each_combination(2, 3, |_| empty += 1);
        assert_eq!(empty, 0);
    }

    #[test]
    fn distance_of_simple_codes() {
        let xor = ErasureCode::xor_parity(2, 1).unwrap();
        assert_eq!(
            verify_min_distance(&xor, 8, 1000).unwrap().min_distance(),
            2
        );
        let rep = ErasureCode::repetition(1).unwrap();
        assert_eq!(
            verify_min_distance(&rep, 8, 1000).unwrap().min_distance(),
            2
        );
    }

    #[test]
    fn deficient_code_is_rejected() {
        // Two parity items that are the same XOR: still only distance 2.
        let weak = ErasureCode::linear(3, 1, 3, vec![vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(
            verify_min_distance(&weak, 4, 0),
            Err(Error::DistanceDeficient {
                declared: 3,
                measured: 2
            })
        );
    }

    #[test]
    fn shipped_codes_reach_declared_distance() {
        for v in Variant::ALL {
            let p = HashParams::of(v);
            let r = verify_min_distance(p.code(), p.w() as u32, 10_000).unwrap();
            assert_eq!(r.exhaustive_min, p.k(), "{v}");
            assert!(r.min_distance() >= p.k());
        }
    }

    #[test]
    fn distance_argument_checks() {
        let p = HashParams::of(Variant::V24);
        assert!(matches!(
            verify_min_distance(p.code(), 4, 0),
            Err(Error::Config(_))
        ));
        assert_eq!(
            verify_min_distance(p.code(), 6, 0),
            Err(Error::EnumerationTooLarge {
                bits: 42,
                limit: 28
            })
        );
    }

    #[test]
    fn ehc_bounds() {
        assert_eq!(ehc_bound(&HashParams::of(Variant::V24), 32), 90);
        assert_eq!(ehc_bound(&HashParams::of(Variant::V24), 4), 6);
        assert_eq!(ehc_bound_bits(1, 0, 32), 32);
        assert_eq!(ehc_bound_bits(1, 0, 4), 4);
    }
}
