use crate::{Error, Result};

/// Which construction an [`ErasureCode`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// One extra item equal to the XOR of all inputs; distance 2.
    XorParity,
    /// Systematic code whose parity items are GF(2^w)-linear combinations of
    /// the inputs, with each item's `w` blocks read as a bit-sliced field
    /// element.
    RepoDefinedLinear,
}

/// A systematic, bitwise-linear erasure code over items of `w` blocks.
///
/// The first `d` output items are the inputs. Parity item `r` is
/// `sum_c P[r][c] * item_c` where the coefficients live in GF(2^w) and an item
/// is read as a field element whose coefficient of `x^l` is block `l`, one
/// bit per lane bit. Multiplying by a constant is therefore a fixed pattern of
/// block XORs, and the code acts on every bit position independently: its
/// minimum distance at full width equals its minimum distance with one bit per
/// block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureCode {
    kind: CodeKind,
    data_items: usize,
    total_items: usize,
    min_distance: usize,
    item_blocks: usize,
    field_poly: u16,
    coefficients: Vec<Vec<u8>>,
    // For parity block `r * w + j`, the input blocks `c * w + l` XORed into it.
    parity_terms: Vec<Vec<usize>>,
}

/// Irreducible polynomials for GF(2^w), indexed by w.
const FIELD_POLYS: [u16; 9] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b100_0011,
    0b1000_0011,
    0b1_0001_1011,
];

/// Carryless product of `a` and `b` reduced modulo `poly` of degree `w`.
pub fn gf_mul(a: u16, b: u16, w: usize, poly: u16) -> u16 {
    let mut acc = 0u32;
    for i in 0..w {
        if (b >> i) & 1 == 1 {
            acc ^= (a as u32) << i;
        }
    }
    for bit in (w..2 * w).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= (poly as u32) << (bit - w);
        }
    }
    acc as u16
}

impl ErasureCode {
    /// `d` inputs followed by their XOR.
    pub fn xor_parity(data_items: usize, item_blocks: usize) -> Result<Self> {
        let mut code = Self::linear(data_items, item_blocks, 2, vec![vec![1; data_items]])?;
        code.kind = CodeKind::XorParity;
        Ok(code)
    }

    /// One item followed by a copy of it; distance 2.
    pub fn repetition(item_blocks: usize) -> Result<Self> {
        Self::linear(1, item_blocks, 2, vec![vec![1]])
    }

    /// A systematic code with the given parity coefficients over GF(2^w).
    ///
    /// The declared `min_distance` is not checked here; run
    /// [`crate::analysis::verify_min_distance`] before trusting it.
    pub fn linear(
        data_items: usize,
        item_blocks: usize,
        min_distance: usize,
        coefficients: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if data_items == 0 || item_blocks == 0 || item_blocks > 8 {
            return Err(Error::Config(format!(
                "erasure code needs d >= 1 and 1 <= w <= 8, got d={data_items} w={item_blocks}"
            )));
        }
        if coefficients.iter().any(|row| row.len() != data_items) {
            return Err(Error::Config(
                "parity coefficient rows must have d entries".into(),
            ));
        }
        let limit = 1u16 << item_blocks;
        if coefficients.iter().flatten().any(|&c| c as u16 >= limit) {
            return Err(Error::Config(format!(
                "parity coefficient outside GF(2^{item_blocks})"
            )));
        }
        let poly = FIELD_POLYS[item_blocks];
        let w = item_blocks;
        let mut parity_terms = Vec::with_capacity(coefficients.len() * w);
        for row in &coefficients {
            for j in 0..w {
                let mut terms = Vec::new();
                for (c, &coef) in row.iter().enumerate() {
                    for l in 0..w {
                        // Column l of the multiply-by-coef map is coef * x^l.
                        if (gf_mul(coef as u16, 1 << l, w, poly) >> j) & 1 == 1 {
                            terms.push(c * w + l);
                        }
                    }
                }
                parity_terms.push(terms);
            }
        }
        Ok(Self {
            kind: CodeKind::RepoDefinedLinear,
            data_items,
            total_items: data_items + coefficients.len(),
            min_distance,
            item_blocks,
            field_poly: poly,
            coefficients,
            parity_terms,
        })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// `d`: items per instance before encoding.
    pub fn data_items(&self) -> usize {
        self.data_items
    }

    /// `e`: items after encoding.
    pub fn total_items(&self) -> usize {
        self.total_items
    }

    /// Declared minimum distance `k`.
    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// `w`: blocks per item.
    pub fn item_blocks(&self) -> usize {
        self.item_blocks
    }

    pub fn field_poly(&self) -> u16 {
        self.field_poly
    }

    pub fn coefficients(&self) -> &[Vec<u8>] {
        &self.coefficients
    }

    /// Input block indices XORed into each parity block, in parity block order.
    pub fn parity_terms(&self) -> &[Vec<usize>] {
        &self.parity_terms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf8_arithmetic() {
        let p = FIELD_POLYS[3];
        // x * x^2 = x^3 = x + 1
        assert_eq!(gf_mul(0b010, 0b100, 3, p), 0b011);
        for a in 1..8u16 {
            assert_eq!(gf_mul(a, 1, 3, p), a);
            // every nonzero element has an inverse
            assert_eq!((1..8u16).filter(|&b| gf_mul(a, b, 3, p) == 1).count(), 1);
        }
    }

    #[test]
    fn field_polys_are_irreducible() {
        for (w, &p) in FIELD_POLYS.iter().enumerate().skip(1) {
            assert_eq!(p >> w, 1, "degree of poly for w={w}");
            // irreducible iff the field has no zero divisors
            for a in 1..(1u16 << w) {
                for b in 1..(1u16 << w) {
                    assert_ne!(gf_mul(a, b, w, p), 0, "w={w} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn xor_parity_terms_are_identity_per_block() {
        let code = ErasureCode::xor_parity(3, 2).unwrap();
        assert_eq!(code.kind(), CodeKind::XorParity);
        assert_eq!(code.total_items(), 4);
        assert_eq!(code.parity_terms(), &[vec![0, 2, 4], vec![1, 3, 5]]);
    }

    #[test]
    fn rejects_out_of_field_coefficients() {
        assert!(ErasureCode::linear(2, 2, 2, vec![vec![1, 4]]).is_err());
        assert!(ErasureCode::linear(2, 2, 2, vec![vec![1]]).is_err());
        assert!(ErasureCode::linear(0, 2, 2, vec![]).is_err());
    }
}
