use crate::{Error, Result};

/// Multiplies a 64-bit word by a combine-matrix coefficient, modulo 2^64.
///
/// Every coefficient that appears in the shipped matrices is 0, a power of
/// two, or a sum/difference of two powers of two, so each product is at most
/// two shifts and one addition or subtraction.
#[inline(always)]
pub fn coefficient_multiply(c: u8, x: u64) -> u64 {
    match c {
        0 => 0,
        1 => x,
        2 => x << 1,
        3 => (x << 1).wrapping_add(x),
        4 => x << 2,
        5 => (x << 2).wrapping_add(x),
        6 => (x << 2).wrapping_add(x << 1),
        7 => (x << 3).wrapping_sub(x),
        8 => x << 3,
        9 => (x << 3).wrapping_add(x),
        _ => x.wrapping_mul(c as u64),
    }
}

/// True when `c` is 0, 2^a, or 2^a +/- 2^b.
pub fn is_shift_add(c: u64) -> bool {
    if c == 0 || c.is_power_of_two() {
        return true;
    }
    let low = c & c.wrapping_neg();
    let rest = c - low;
    if rest.is_power_of_two() {
        return true;
    }
    // 2^a - 2^b: adding the lowest set bit carries through one run of ones.
    c.wrapping_add(low).is_power_of_two()
}

/// The `k x e` matrix applied in the Combine step.
///
/// Entries are small nonnegative integers cheap to multiply by. That every
/// `k`-column subset is nonsingular is a property checked by
/// [`crate::analysis::max_two_adic_valuation`], not by the constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl TransformMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols < rows {
            return Err(Error::Config(format!(
                "combine matrix must be k x e with 1 <= k <= e, got {rows} x {cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Config(format!(
                "combine matrix {rows} x {cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&c| !is_shift_add(c as u64)) {
            return Err(Error::Config(format!(
                "coefficient {bad} needs more than two shifts and one addition"
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::Config("ragged combine matrix".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn identity(k: usize) -> Self {
        let mut entries = vec![0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1;
        }
        Self {
            rows: k,
            cols: k,
            entries,
        }
    }

    /// The `k x k` integer submatrix made of the given columns.
    pub fn columns(&self, cols: &[usize]) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| cols.iter().map(|&c| self.get(r, c) as i64).collect())
            .collect()
    }
}
