//! Bit-packed elimination over GF(2).

/// Dense bit vectors of a fixed length.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    words: usize,
    bits: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(bits: usize) -> Self {
        BitMatrix {
            words: bits.div_ceil(64),
            bits,
            data: Vec::new(),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.words).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Appends a vector with ones at `positions` (repeated positions cancel).
    pub fn push_ones(&mut self, positions: impl IntoIterator<Item = usize>) {
        let start = self.data.len();
        self.data.resize(start + self.words, 0);
        for p in positions {
            debug_assert!(p < self.bits);
            self.data[start + p / 64] ^= 1u64 << (p % 64);
        }
    }

    /// Rank of the span of the stored vectors. Zero-length vectors have rank 0.
    pub fn rank(&self) -> usize {
        if self.words == 0 {
            return 0;
        }
        let rows = self.data.len() / self.words;
        // basis vectors keyed by their lowest set bit
        let mut pivot: Vec<u32> = vec![u32::MAX; self.bits];
        let mut basis: Vec<u64> = Vec::new();
        let mut scratch = vec![0u64; self.words];
        for r in 0..rows {
            scratch.copy_from_slice(&self.data[r * self.words..(r + 1) * self.words]);
            while let Some(low) = lowest_bit(&scratch) {
                let p = pivot[low];
                if p == u32::MAX {
                    pivot[low] = (basis.len() / self.words) as u32;
                    basis.extend_from_slice(&scratch);
                    break;
                }
                let b = &basis[p as usize * self.words..(p as usize + 1) * self.words];
                // bits below `low` are zero in both vectors
                for (x, y) in scratch[low / 64..].iter_mut().zip(&b[low / 64..]) {
                    *x ^= *y;
                }
            }
        }
        basis.len() / self.words
    }
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// GF(2) rank of a matrix given by the row positions of its nonzero entries per column.
pub fn rank_of_columns<'a, I>(nrows: usize, columns: I) -> usize
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let mut m = BitMatrix::new(nrows);
    for col in columns {
        m.push_ones(col.iter().copied());
    }
    m.rank()
}
