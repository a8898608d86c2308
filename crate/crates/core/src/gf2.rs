//! Incremental Gaussian elimination over the binary field.

/// Row-echelon basis of a subspace of GF(2)^width, with an optional
/// right-hand-side bit carried along each row.
///
/// Each stored row has its lowest set bit at its pivot column and is
/// zero below it.
#[derive(Debug, Clone)]
pub struct Gf2Basis {
    width: usize,
    words: usize,
    rows: Vec<Option<(Vec<u64>, bool)>>,
    rank: usize,
}

impl Gf2Basis {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            words: width.div_ceil(64),
            rows: vec![None; width],
            rank: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.width
    }

    /// Reduces `row` against the basis and inserts it if independent.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut row: Vec<u64>, mut rhs: bool) -> bool {
        debug_assert_eq!(row.len(), self.words);
        let mut w = 0;
        while w < self.words {
            let word = row[w];
            if word == 0 {
                w += 1;
                continue;
            }
            let pivot = w * 64 + word.trailing_zeros() as usize;
            match &self.rows[pivot] {
                Some((basis_row, basis_rhs)) => {
                    for (a, b) in row[w..].iter_mut().zip(&basis_row[w..]) {
                        *a ^= b;
                    }
                    rhs ^= basis_rhs;
                }
                None => {
                    self.rows[pivot] = Some((row, rhs));
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }

    /// Solves for the unique assignment once the basis has full rank.
    pub fn solve(&self) -> Option<Vec<u64>> {
        if !self.is_full() {
            return None;
        }
        let mut x = vec![0u64; self.words];
        for col in (0..self.width).rev() {
            let (row, rhs) = self.rows[col].as_ref()?;
            // row has bit `col` set plus bits above it, all already solved
            let w = col / 64;
            let mut parity = *rhs as u32;
            let above = row[w] & !(1u64 << (col % 64));
            parity ^= (above & x[w]).count_ones();
            for (a, b) in row[w + 1..].iter().zip(&x[w + 1..]) {
                parity ^= (a & b).count_ones();
            }
            if parity & 1 == 1 {
                x[w] |= 1u64 << (col % 64);
            }
        }
        Some(x)
    }
}
