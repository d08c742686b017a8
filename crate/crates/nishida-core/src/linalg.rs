//! Bit-packed incremental row reduction over F2.
//!
//! Rows are inserted one at a time and the matrix is kept in reduced
//! row-echelon form, pivoting on the lowest set column. Callers order
//! their columns so that the monomials they want rewritten away come
//! first; the quotient basis is then the non-pivot columns. Every
//! reduced row remembers which inserted rows combine to it, so
//! membership queries can return an exact witness.

fn bit_get(words: &[u64], i: usize) -> bool {
    words.get(i / 64).map_or(false, |w| w >> (i % 64) & 1 == 1)
}

fn bit_toggle(words: &mut Vec<u64>, i: usize) {
    if words.len() <= i / 64 {
        words.resize(i / 64 + 1, 0);
    }
    words[i / 64] ^= 1 << (i % 64);
}

fn bit_xor(dst: &mut Vec<u64>, src: &[u64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn lowest_set(words: &[u64]) -> Option<usize> {
    for (i, w) in words.iter().enumerate() {
        if *w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

fn support(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let mut w = *w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

struct Row {
    pivot: usize,
    bits: Vec<u64>,
    came_from: Vec<u64>,
}

pub struct F2Matrix {
    cols: usize,
    rows: Vec<Row>,
    inserted: usize,
}

impl F2Matrix {
    pub fn new(cols: usize) -> Self {
        F2Matrix {
            cols,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.binary_search_by_key(&col, |r| r.pivot).is_ok()
    }

    /// Insert a row given by its support. Returns true when the rank grew.
    pub fn insert(&mut self, cols: &[usize]) -> bool {
        let mut bits = Vec::new();
        for &c in cols {
            assert!(c < self.cols, "column out of range");
            bit_toggle(&mut bits, c);
        }
        let mut came_from = Vec::new();
        bit_toggle(&mut came_from, self.inserted);
        self.inserted += 1;

        for row in &self.rows {
            if bit_get(&bits, row.pivot) {
                bit_xor(&mut bits, &row.bits);
                bit_xor(&mut came_from, &row.came_from);
            }
        }
        let Some(pivot) = lowest_set(&bits) else {
            return false;
        };
        for row in &mut self.rows {
            if bit_get(&row.bits, pivot) {
                bit_xor(&mut row.bits, &bits);
                bit_xor(&mut row.came_from, &came_from);
            }
        }
        let at = self
            .rows
            .binary_search_by_key(&pivot, |r| r.pivot)
            .unwrap_err();
        self.rows.insert(
            at,
            Row {
                pivot,
                bits,
                came_from,
            },
        );
        true
    }

    /// Normal form of a vector modulo the row space, as sorted support.
    pub fn reduce(&self, cols: &[usize]) -> Vec<usize> {
        self.reduce_with_witness(cols).0
    }

    /// Normal form plus the set of inserted-row indices whose sum was
    /// subtracted. XORing those original rows onto the input yields the
    /// returned residual exactly.
    pub fn reduce_with_witness(&self, cols: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut bits = Vec::new();
        for &c in cols {
            assert!(c < self.cols, "column out of range");
            bit_toggle(&mut bits, c);
        }
        let mut used = Vec::new();
        for row in &self.rows {
            if bit_get(&bits, row.pivot) {
                bit_xor(&mut bits, &row.bits);
                bit_xor(&mut used, &row.came_from);
            }
        }
        (support(&bits), support(&used))
    }

    pub fn contains(&self, cols: &[usize]) -> bool {
        self.reduce(cols).is_empty()
    }

    /// Support of the reduced row pivoting at the given column.
    pub fn row_support(&self, pivot: usize) -> Option<Vec<usize>> {
        self.rows
            .binary_search_by_key(&pivot, |r| r.pivot)
            .ok()
            .map(|i| support(&self.rows[i].bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_pivots() {
        let mut m = F2Matrix::new(4);
        assert!(m.insert(&[0, 1]));
        assert!(m.insert(&[1, 2]));
        assert!(!m.insert(&[0, 2]));
        assert_eq!(m.rank(), 2);
        assert_eq!(m.pivots(), vec![0, 1]);
        assert!(m.is_pivot(0));
        assert!(!m.is_pivot(2));
    }

    #[test]
    fn reduce_gives_normal_form() {
        let mut m = F2Matrix::new(5);
        m.insert(&[0, 2]);
        m.insert(&[1, 3]);
        assert_eq!(m.reduce(&[0, 1]), vec![2, 3]);
        assert!(m.contains(&[0, 2]));
        assert!(!m.contains(&[4]));
    }

    #[test]
    fn witness_reconstructs_input() {
        let rows: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]];
        let mut m = F2Matrix::new(4);
        for r in &rows {
            m.insert(r);
        }
        let target = vec![0, 2];
        let (residual, used) = m.reduce_with_witness(&target);
        assert!(residual.is_empty());
        // xor of the witnessed original rows equals the target
        let mut acc = Vec::new();
        for &idx in &used {
            for &c in &rows[idx] {
                bit_toggle(&mut acc, c);
            }
        }
        assert_eq!(support(&acc), target);
    }
}
