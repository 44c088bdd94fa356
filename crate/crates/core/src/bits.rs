//! Word-packed bit vectors and binary matrices over GF(2).

/// Number of bits per storage word.
pub const WORD_BITS: usize = 64;

/// Number of `u64` words needed to hold `bits` bits.
#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i % WORD_BITS);
    if value {
        words[i / WORD_BITS] |= mask;
    } else {
        words[i / WORD_BITS] &= !mask;
    }
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
}

/// Index of the lowest set bit, if any.
pub(crate) fn first_set(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, &w)| k * WORD_BITS + w.trailing_zeros() as usize)
}

/// Iterator over the indices of set bits, in increasing order.
pub(crate) fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD_BITS + tz)
            }
        })
    })
}

/// Bit `b` of the result is the parity of bits `0..b` of `words`.
pub(crate) fn exclusive_prefix_parity(words: &[u64], out: &mut [u64]) {
    let mut carry = 0u64;
    for (o, &w) in out.iter_mut().zip(words) {
        let mut p = w;
        p ^= p << 1;
        p ^= p << 2;
        p ^= p << 4;
        p ^= p << 8;
        p ^= p << 16;
        p ^= p << 32;
        *o = (p << 1) ^ carry.wrapping_neg();
        carry ^= p >> 63;
    }
}

/// A dense binary matrix with word-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from already-packed rows of `cols` bits each.
    ///
    /// Bits beyond `cols` in the last word of each row are ignored.
    pub fn from_packed_rows<'a, I>(cols: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [u64]>,
    {
        let stride = words_for(cols);
        let tail_mask = match cols % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        };
        let mut data = Vec::new();
        let mut count = 0;
        for row in rows {
            let start = data.len();
            data.extend(row.iter().take(stride).copied());
            data.resize(start + stride, 0);
            if stride > 0 {
                data[start + stride - 1] &= tail_mask;
            }
            count += 1;
        }
        Self {
            rows: count,
            cols,
            stride,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "bit index out of range");
        get_bit(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "bit index out of range");
        let stride = self.stride;
        set_bit(&mut self.data[r * stride..(r + 1) * stride], c, value);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// GF(2) rank. Works on a copy of the rows; `self` is left untouched.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.data.clone(), self.rows, self.stride)
    }
}

/// Rank of `rows` packed rows of `stride` words each, eliminating in place.
pub(crate) fn rank_of_rows(mut data: Vec<u64>, rows: usize, stride: usize) -> usize {
    let mut rank = 0;
    for w in 0..stride {
        let mut bits = 0u64;
        for r in rank..rows {
            bits |= data[r * stride + w];
        }
        while bits != 0 && rank < rows {
            let b = bits.trailing_zeros();
            bits &= bits - 1;
            let mask = 1u64 << b;
            let Some(pivot) = (rank..rows).find(|&r| data[r * stride + w] & mask != 0) else {
                continue;
            };
            if pivot != rank {
                for k in w..stride {
                    data.swap(pivot * stride + k, rank * stride + k);
                }
            }
            let (head, tail) = data.split_at_mut((rank + 1) * stride);
            let pivot_row = &head[rank * stride..];
            for row in tail.chunks_exact_mut(stride) {
                if row[w] & mask != 0 {
                    for k in w..stride {
                        row[k] ^= pivot_row[k];
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// GF(2) rank of a bit-packed matrix.
pub fn rank_gf2(matrix: &BitMatrix) -> usize {
    matrix.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Plain elimination on a Vec<Vec<bool>>.
    fn naive_rank(mut m: Vec<Vec<bool>>) -> usize {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| m[r][c]) else {
                continue;
            };
            m.swap(p, rank);
            for r in 0..rows {
                if r != rank && m[r][c] {
                    for k in 0..cols {
                        let v = m[rank][k];
                        m[r][k] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(rank_gf2(&BitMatrix::identity(4)), 4);
        assert_eq!(rank_gf2(&BitMatrix::zeros(3, 7)), 0);
        assert_eq!(rank_gf2(&BitMatrix::zeros(0, 0)), 0);
    }

    #[test]
    fn random_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for (rows, cols) in [(20, 20), (5, 130), (130, 5), (70, 70), (1, 1)] {
            for density in [0.05, 0.5] {
                let m = BitMatrix::from_fn(rows, cols, |_, _| rng.random_bool(density));
                let plain: Vec<Vec<bool>> = (0..rows)
                    .map(|r| (0..cols).map(|c| m.get(r, c)).collect())
                    .collect();
                assert_eq!(m.rank(), naive_rank(plain), "{rows}x{cols} p={density}");
            }
        }
    }

    #[test]
    fn rank_does_not_mutate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = BitMatrix::from_fn(9, 9, |_, _| rng.random_bool(0.5));
        let before = m.clone();
        let _ = m.rank();
        assert_eq!(m, before);
    }

    #[test]
    fn packed_rows_mask_tail() {
        let m = BitMatrix::from_packed_rows(3, [&[0b1111_0001u64][..], &[0b0000_0001u64][..]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn prefix_parity() {
        let w = [0b1011u64, 1u64 << 63, 1];
        let mut out = [0u64; 3];
        exclusive_prefix_parity(&w, &mut out);
        let mut parity = false;
        for i in 0..192 {
            assert_eq!(get_bit(&out, i), parity, "bit {i}");
            parity ^= get_bit(&w, i);
        }
    }

    #[test]
    fn ones_iterator() {
        let w = [0b101u64, 1 << 3];
        assert_eq!(iter_ones(&w).collect::<Vec<_>>(), vec![0, 2, 67]);
        assert_eq!(first_set(&w), Some(0));
        assert_eq!(first_set(&[0, 0]), None);
    }
}
