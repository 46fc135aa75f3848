//! The four published parameterizations and their combine matrices and
//! erasure codes.

mod code;
mod matrix;

pub use code::{gf_mul, CodeKind, ErasureCode};
pub use matrix::{coefficient_multiply, is_shift_add, TransformMatrix};

use crate::{analysis, Error, Result};

/// One of the published output widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    V16,
    V24,
    V32,
    V40,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::V16, Variant::V24, Variant::V32, Variant::V40];

    pub fn output_bytes(self) -> usize {
        match self {
            Variant::V16 => 16,
            Variant::V24 => 24,
            Variant::V32 => 32,
            Variant::V40 => 40,
        }
    }
}

impl TryFrom<usize> for Variant {
    type Error = Error;

    fn try_from(bytes: usize) -> Result<Self> {
        match bytes {
            16 => Ok(Variant::V16),
            24 => Ok(Variant::V24),
            32 => Ok(Variant::V32),
            40 => Ok(Variant::V40),
            other => Err(Error::UnsupportedWidth(other)),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.output_bytes())
    }
}

// Geometry per variant. Only the 24-byte tuple is published in full; w, b and
// f for the other widths are choices of this crate. b = 8 words (512 bits) and
// f = 8 everywhere; w = 2 for the 16-byte variant and 3 otherwise.
//
//          (w, b, f, published p)
const GEOMETRY_16: (usize, usize, usize, u32) = (2, 8, 8, 2);
const GEOMETRY_24: (usize, usize, usize, u32) = (3, 8, 8, 2);
const GEOMETRY_32: (usize, usize, usize, u32) = (3, 8, 8, 3);
const GEOMETRY_40: (usize, usize, usize, u32) = (3, 8, 8, 3);

const MATRIX_16: [[u8; 7]; 2] = [[1, 0, 1, 1, 2, 1, 4], [0, 1, 1, 2, 1, 4, 1]];

const MATRIX_24: [[u8; 9]; 3] = [
    [0, 0, 1, 4, 1, 1, 2, 2, 1],
    [1, 1, 0, 0, 1, 4, 1, 2, 2],
    [1, 4, 1, 1, 0, 0, 2, 1, 2],
];

const MATRIX_32: [[u8; 10]; 4] = [
    [0, 0, 0, 1, 1, 4, 2, 4, 1, 1],
    [0, 1, 2, 0, 0, 1, 1, 2, 4, 1],
    [2, 0, 1, 0, 4, 0, 1, 1, 1, 1],
    [1, 1, 0, 1, 0, 0, 4, 1, 2, 8],
];

const MATRIX_40: [[u8; 9]; 5] = [
    [1, 0, 0, 0, 0, 1, 1, 2, 4],
    [0, 1, 0, 0, 0, 1, 2, 1, 7],
    [0, 0, 1, 0, 0, 1, 3, 8, 5],
    [0, 0, 0, 1, 0, 1, 4, 9, 8],
    [0, 0, 0, 0, 1, 1, 5, 3, 9],
];

// Parity coefficients over GF(8) = GF(2)[x]/(x^3 + x + 1), written as the
// integer whose bit l is the coefficient of x^l. Every square submatrix is
// nonsingular, which makes [I | P^T] an MDS code: distance = parity rows + 1.
const PARITY_24: [[u8; 7]; 2] = [[1, 1, 1, 1, 1, 1, 1], [1, 2, 3, 4, 5, 6, 7]];

const PARITY_32: [[u8; 7]; 3] = [
    [1, 1, 1, 1, 1, 1, 1],
    [1, 2, 3, 4, 5, 6, 7],
    [1, 3, 5, 2, 6, 7, 4],
];

const PARITY_40: [[u8; 5]; 4] = [
    [1, 1, 1, 1, 1],
    [1, 2, 5, 6, 7],
    [1, 3, 7, 4, 2],
    [1, 4, 3, 5, 6],
];

/// The full parameter tuple `(w, d, e, k, b, f, p)` for one hash variant,
/// together with its combine matrix and erasure code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashParams {
    variant: Option<Variant>,
    w: usize,
    d: usize,
    e: usize,
    k: usize,
    b: usize,
    f: usize,
    p: u32,
    matrix: TransformMatrix,
    code: ErasureCode,
}

impl HashParams {
    /// The published parameter set for a digest of `output_bytes` bytes.
    pub fn variant(output_bytes: usize) -> Result<Self> {
        Ok(Self::of(Variant::try_from(output_bytes)?))
    }

    pub fn of(variant: Variant) -> Self {
        fn rows<const C: usize>(m: &[[u8; C]]) -> Vec<Vec<u8>> {
            m.iter().map(|r| r.to_vec()).collect()
        }
        let ((w, b, f, p), matrix, parity) = match variant {
            Variant::V16 => (GEOMETRY_16, rows(&MATRIX_16), None),
            Variant::V24 => (GEOMETRY_24, rows(&MATRIX_24), Some(rows(&PARITY_24))),
            Variant::V32 => (GEOMETRY_32, rows(&MATRIX_32), Some(rows(&PARITY_32))),
            Variant::V40 => (GEOMETRY_40, rows(&MATRIX_40), Some(rows(&PARITY_40))),
        };
        let matrix = TransformMatrix::from_rows(&matrix).expect("published matrix is well formed");
        let k = matrix.rows();
        let e = matrix.cols();
        let d = e + 1 - k;
        let code = match parity {
            None => ErasureCode::xor_parity(d, w),
            Some(parity) => ErasureCode::linear(d, w, k, parity),
        }
        .expect("shipped code is well formed");
        Self {
            variant: Some(variant),
            w,
            d,
            e,
            k,
            b,
            f,
            p,
            matrix,
            code,
        }
    }

    /// A non-published geometry, e.g. a scaled-down toy for exhaustive checks.
    ///
    /// `p` is computed from the matrix; a singular column subset is an error.
    pub fn custom(
        item_blocks: usize,
        lanes: usize,
        fanout: usize,
        matrix: TransformMatrix,
        code: ErasureCode,
    ) -> Result<Self> {
        let k = matrix.rows();
        let e = matrix.cols();
        if code.total_items() != e || code.min_distance() != k {
            return Err(Error::Config(format!(
                "code ({} -> {} items, distance {}) does not fit a {k} x {e} matrix",
                code.data_items(),
                code.total_items(),
                code.min_distance()
            )));
        }
        if code.item_blocks() != item_blocks {
            return Err(Error::Config(format!(
                "code items have {} blocks, geometry says {item_blocks}",
                code.item_blocks()
            )));
        }
        if lanes == 0 || fanout < 2 {
            return Err(Error::Config(format!(
                "need b >= 1 and f >= 2, got b={lanes} f={fanout}"
            )));
        }
        let p = analysis::max_two_adic_valuation(&matrix, k)?;
        Ok(Self {
            variant: None,
            w: item_blocks,
            d: code.data_items(),
            e,
            k,
            b: lanes,
            f: fanout,
            p,
            matrix,
            code,
        })
    }

    pub fn variant_tag(&self) -> Option<Variant> {
        self.variant
    }

    /// Blocks per EHC item.
    pub fn w(&self) -> usize {
        self.w
    }

    /// Items per EHC instance before encoding.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Items per EHC instance after encoding.
    pub fn e(&self) -> usize {
        self.e
    }

    /// Output blocks of the Combine step, also the code's minimum distance.
    pub fn k(&self) -> usize {
        self.k
    }

    /// 64-bit words per block (lanes).
    pub fn b(&self) -> usize {
        self.b
    }

    /// Tree fanout in blocks.
    pub fn f(&self) -> usize {
        self.f
    }

    /// Largest 2-adic valuation of any `k`-column determinant of the matrix.
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn output_bytes(&self) -> usize {
        8 * self.k
    }

    pub fn matrix(&self) -> &TransformMatrix {
        &self.matrix
    }

    pub fn code(&self) -> &ErasureCode {
        &self.code
    }

    /// 64-bit words consumed by one EHC instance, `b * d * w`.
    pub fn instance_words(&self) -> usize {
        self.b * self.d * self.w
    }

    pub fn tuple(&self) -> (usize, usize, usize, usize, usize, usize, u32) {
        (self.w, self.d, self.e, self.k, self.b, self.f, self.p)
    }
}
