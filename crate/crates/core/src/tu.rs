//! Total unimodularity: exhaustive and sampled subdeterminant tests, the
//! I-sum construction and the standard TU-preserving matrix operations.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::BoundaryMatrix;
use crate::error::TuError;

/// Largest entry magnitude accepted by [`IntMatrix`].
pub const MAX_ENTRY: i64 = 10;
/// Largest `min(rows, cols)` the exhaustive test accepts.
pub const MAX_EXHAUSTIVE_DIM: usize = 12;
/// Largest number of square submatrices the exhaustive test will visit.
pub const MAX_EXHAUSTIVE_MINORS: u128 = 20_000_000;
/// Default number of submatrices drawn by [`sample_totally_unimodular`].
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Dense integer matrix with small entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

/// Square submatrix whose determinant lies outside `{-1, 0, 1}`.
/// Indices are 0-based and ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuVerdict {
    Unimodular,
    NotUnimodular(TuWitness),
}

impl TuVerdict {
    pub fn is_unimodular(&self) -> bool {
        matches!(self, TuVerdict::Unimodular)
    }

    pub fn witness(&self) -> Option<&TuWitness> {
        match self {
            TuVerdict::Unimodular => None,
            TuVerdict::NotUnimodular(w) => Some(w),
        }
    }
}

impl IntMatrix {
    /// Row-major construction.
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, TuError> {
        if data.len() != rows * cols {
            return Err(TuError::Shape { expected: rows * cols, got: data.len() });
        }
        if let Some(&v) = data.iter().find(|v| v.abs() > MAX_ENTRY) {
            return Err(TuError::EntryTooLarge(v));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, TuError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(TuError::Shape { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_boundary(b: &BoundaryMatrix) -> Self {
        let mut m = Self::zeros(b.rows(), b.cols());
        for (j, col) in b.columns().iter().enumerate() {
            for &(i, e) in col {
                m.data[i * m.cols + j] = i64::from(e);
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

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<IntMatrix, TuError> {
        self.check_rows(rows)?;
        self.check_cols(cols)?;
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        Ok(Self { rows: rows.len(), cols: cols.len(), data })
    }

    /// Exact determinant of a square matrix by fraction-free elimination.
    pub fn determinant(&self) -> Result<i128, TuError> {
        if self.rows != self.cols {
            return Err(TuError::Shape { expected: self.rows, got: self.cols });
        }
        let rows: Vec<Vec<i128>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| i128::from(v)).collect())
            .collect();
        Ok(bareiss(rows))
    }

    fn check_rows(&self, idx: &[usize]) -> Result<(), TuError> {
        match idx.iter().find(|&&i| i >= self.rows) {
            Some(&index) => Err(TuError::IndexOutOfRange { index, len: self.rows }),
            None => Ok(()),
        }
    }

    fn check_cols(&self, idx: &[usize]) -> Result<(), TuError> {
        match idx.iter().find(|&&j| j >= self.cols) {
            Some(&index) => Err(TuError::IndexOutOfRange { index, len: self.cols }),
            None => Ok(()),
        }
    }

    // TU-preserving operations.

    pub fn transpose(&self) -> IntMatrix {
        let data = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| self.get(i, j)))
            .collect();
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Row `k` of the result is row `perm[k]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<IntMatrix, TuError> {
        check_permutation(perm, self.rows)?;
        self.submatrix(perm, &(0..self.cols).collect::<Vec<_>>())
    }

    /// Column `k` of the result is column `perm[k]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Result<IntMatrix, TuError> {
        check_permutation(perm, self.cols)?;
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), perm)
    }

    pub fn negate_row(&self, i: usize) -> Result<IntMatrix, TuError> {
        self.check_rows(&[i])?;
        let mut m = self.clone();
        m.data[i * self.cols..(i + 1) * self.cols].iter_mut().for_each(|v| *v = -*v);
        Ok(m)
    }

    pub fn negate_col(&self, j: usize) -> Result<IntMatrix, TuError> {
        Ok(self.transpose().negate_row(j)?.transpose())
    }

    pub fn append_zero_row(&self) -> IntMatrix {
        let mut m = self.clone();
        m.data.extend(std::iter::repeat_n(0, self.cols));
        m.rows += 1;
        m
    }

    pub fn append_zero_col(&self) -> IntMatrix {
        self.transpose().append_zero_row().transpose()
    }

    /// Appends a row whose only nonzero is `-1` (when `negative`) or `1` in column `j`.
    pub fn append_unit_row(&self, j: usize, negative: bool) -> Result<IntMatrix, TuError> {
        self.check_cols(&[j])?;
        let mut m = self.append_zero_row();
        m.data[self.rows * self.cols + j] = if negative { -1 } else { 1 };
        Ok(m)
    }

    pub fn append_unit_col(&self, i: usize, negative: bool) -> Result<IntMatrix, TuError> {
        Ok(self.transpose().append_unit_row(i, negative)?.transpose())
    }

    pub fn repeat_row(&self, i: usize) -> Result<IntMatrix, TuError> {
        self.check_rows(&[i])?;
        let mut m = self.clone();
        m.data.extend_from_slice(self.row(i));
        m.rows += 1;
        Ok(m)
    }

    pub fn repeat_col(&self, j: usize) -> Result<IntMatrix, TuError> {
        Ok(self.transpose().repeat_row(j)?.transpose())
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<(), TuError> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(TuError::BadPermutation);
    }
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(TuError::BadPermutation);
        }
    }
    Ok(())
}

fn bareiss(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
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

/// The `n_fold`-fold I-sum: `n_fold` copies of the identity across the top,
/// `a` repeated block-diagonally below.
pub fn i_sum(a: &IntMatrix, n_fold: usize) -> Result<IntMatrix, TuError> {
    if n_fold < 1 {
        return Err(TuError::BadFold);
    }
    let (m, n) = (a.rows, a.cols);
    let mut out = IntMatrix::zeros(m * n_fold + n, n * n_fold);
    let cols = out.cols;
    for h in 0..n_fold {
        for i in 0..n {
            out.data[i * cols + h * n + i] = 1;
        }
        for i in 0..m {
            for j in 0..n {
                out.data[(n + h * m + i) * cols + h * n + j] = a.get(i, j);
            }
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of square submatrices of an `rows x cols` matrix.
pub fn square_submatrix_count(rows: usize, cols: usize) -> u128 {
    (1..=rows.min(cols)).map(|k| binomial(rows, k) * binomial(cols, k)).sum()
}

fn mask_indices(mask: u128) -> Vec<usize> {
    (0..128).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exhaustive test of every square subdeterminant.
///
/// Minors of size `k` are expanded along their first row into minors of size
/// `k - 1`, which are kept from the previous level, so each minor costs at
/// most `k` lookups. Stops at the first determinant outside `{-1, 0, 1}`.
pub fn is_totally_unimodular(m: &IntMatrix) -> Result<TuVerdict, TuError> {
    for i in 0..m.rows {
        for j in 0..m.cols {
            let v = m.get(i, j);
            if v.abs() > 1 {
                return Ok(TuVerdict::NotUnimodular(TuWitness { rows: vec![i], cols: vec![j], det: v }));
            }
        }
    }
    let too_large = || TuError::TooLarge { rows: m.rows, cols: m.cols };
    if m.rows.min(m.cols) > MAX_EXHAUSTIVE_DIM
        || m.rows.max(m.cols) > 128
        || square_submatrix_count(m.rows, m.cols) > MAX_EXHAUSTIVE_MINORS
    {
        return Err(too_large());
    }

    let row_sets = |k: usize| subsets(m.rows, k);
    let col_sets = |k: usize| subsets(m.cols, k);
    // Level 1 minors are the entries themselves.
    let mut prev: HashMap<(u128, u128), i8> = HashMap::new();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let v = m.get(i, j);
            if v != 0 {
                prev.insert((1 << i, 1 << j), v as i8);
            }
        }
    }
    for k in 2..=m.rows.min(m.cols) {
        let mut next = HashMap::new();
        let cs = col_sets(k);
        for rmask in row_sets(k) {
            let r0 = rmask.trailing_zeros() as usize;
            let rest = rmask & !(1 << r0);
            for &cmask in &cs {
                let mut det: i64 = 0;
                for (pos, j) in mask_indices(cmask).into_iter().enumerate() {
                    let a = m.get(r0, j);
                    if a == 0 {
                        continue;
                    }
                    if let Some(&minor) = prev.get(&(rest, cmask & !(1 << j))) {
                        let term = a * i64::from(minor);
                        det += if pos % 2 == 0 { term } else { -term };
                    }
                }
                match det {
                    0 => {}
                    -1 | 1 => {
                        next.insert((rmask, cmask), det as i8);
                    }
                    _ => {
                        return Ok(TuVerdict::NotUnimodular(TuWitness {
                            rows: mask_indices(rmask),
                            cols: mask_indices(cmask),
                            det,
                        }))
                    }
                }
            }
        }
        prev = next;
    }
    Ok(TuVerdict::Unimodular)
}

/// All `k`-subsets of `0..n` as bitmasks, in increasing numeric order.
fn subsets(n: usize, k: usize) -> Vec<u128> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut mask: u128 = (1u128 << k) - 1;
    let limit: u128 = if n == 128 { u128::MAX } else { 1u128 << n };
    while mask < limit {
        out.push(mask);
        // Gosper's hack
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        if r == 0 {
            break;
        }
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

/// Randomized test on `samples` square submatrices: the size is drawn
/// uniformly from `1..=min(rows, cols)`, then rows and columns uniformly.
/// A `Unimodular` verdict is evidence only.
pub fn sample_totally_unimodular(m: &IntMatrix, samples: usize, seed: u64) -> TuVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_k = m.rows.min(m.cols);
    if max_k == 0 {
        return TuVerdict::Unimodular;
    }
    for _ in 0..samples {
        let k = rng.gen_range(1..=max_k);
        let mut rows = sample(&mut rng, m.rows, k).into_vec();
        let mut cols = sample(&mut rng, m.cols, k).into_vec();
        rows.sort_unstable();
        cols.sort_unstable();
        let det = m.submatrix(&rows, &cols).and_then(|s| s.determinant()).expect("indices in range");
        if det.abs() > 1 {
            return TuVerdict::NotUnimodular(TuWitness { rows, cols, det: det as i64 });
        }
    }
    TuVerdict::Unimodular
}

/// Exhaustive test when within the guard, otherwise sampling.
pub fn check_totally_unimodular(m: &IntMatrix, samples: usize, seed: u64) -> (TuVerdict, bool) {
    match is_totally_unimodular(m) {
        Ok(v) => (v, true),
        Err(_) => (sample_totally_unimodular(m, samples, seed), false),
    }
}

/// The 3x4 matrix used to show that I-sums can break total unimodularity.
pub fn isum_counterexample() -> IntMatrix {
    IntMatrix::from_rows(&[vec![0, 1, -1, 1], vec![1, 0, 1, 0], vec![1, 1, 0, 0]]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_tu() {
        for n in 1..=6 {
            assert!(is_totally_unimodular(&IntMatrix::identity(n)).unwrap().is_unimodular());
        }
    }

    #[test]
    fn counterexample_and_its_isum() {
        let a = isum_counterexample();
        assert!(is_totally_unimodular(&a).unwrap().is_unimodular());
        let s = i_sum(&a, 2).unwrap();
        assert_eq!((s.rows(), s.cols()), (10, 8));
        let expected = [
            [1, 0, 0, 0, 1, 0, 0, 0],
            [0, 1, 0, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 0, 1, 0],
            [0, 0, 0, 1, 0, 0, 0, 1],
            [0, 1, -1, 1, 0, 0, 0, 0],
            [1, 0, 1, 0, 0, 0, 0, 0],
            [1, 1, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 1, -1, 1],
            [0, 0, 0, 0, 1, 0, 1, 0],
            [0, 0, 0, 0, 1, 1, 0, 0],
        ];
        assert_eq!(s.to_rows(), expected.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        let verdict = is_totally_unimodular(&s).unwrap();
        let w = verdict.witness().expect("not TU");
        assert_eq!(w.det.abs(), 2);
        assert_eq!(i128::from(w.det), s.submatrix(&w.rows, &w.cols).unwrap().determinant().unwrap());
        // the submatrix singled out in the literature, 1-based rows 1,4,5,7,8,9 and cols 1,2,4,5,7,8
        let sub = s.submatrix(&[0, 3, 4, 6, 7, 8], &[0, 1, 3, 4, 6, 7]).unwrap();
        assert_eq!(sub.determinant().unwrap().abs(), 2);
        // printed after reordering rows 1,7,5,4,8,9 and cols 1,2,4,8,7,5
        let printed = s.submatrix(&[0, 6, 4, 3, 7, 8], &[0, 1, 3, 7, 6, 4]).unwrap();
        assert_eq!(printed.determinant().unwrap(), -2);
    }

    #[test]
    fn isum_shape_and_fold_one() {
        let a = IntMatrix::from_rows(&[vec![1, -1], vec![0, 1], vec![1, 0]]).unwrap();
        for n in 1..=4 {
            let s = i_sum(&a, n).unwrap();
            assert_eq!((s.rows(), s.cols()), (3 * n + 2, 2 * n));
        }
        let one = i_sum(&a, 1).unwrap();
        assert_eq!(one.submatrix(&[0, 1], &[0, 1]).unwrap(), IntMatrix::identity(2));
        assert_eq!(one.submatrix(&[2, 3, 4], &[0, 1]).unwrap(), a);
        assert_eq!(i_sum(&a, 0), Err(TuError::BadFold));
    }

    #[test]
    fn entries_outside_unit_range() {
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2]]).unwrap();
        let v = is_totally_unimodular(&m).unwrap();
        assert_eq!(v.witness().unwrap(), &TuWitness { rows: vec![1], cols: vec![1], det: 2 });
        assert_eq!(IntMatrix::from_rows(&[vec![11]]), Err(TuError::EntryTooLarge(11)));
    }

    #[test]
    fn guard() {
        let big = IntMatrix::zeros(13, 13);
        assert!(matches!(is_totally_unimodular(&big), Err(TuError::TooLarge { .. })));
        assert!(sample_totally_unimodular(&big, 100, 1).is_unimodular());
        assert_eq!(square_submatrix_count(2, 2), 5);
        assert_eq!(square_submatrix_count(16, 8), binomial(24, 8) - 1);
    }

    #[test]
    fn operations() {
        let a = isum_counterexample();
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.negate_row(1).unwrap().negate_row(1).unwrap(), a);
        assert_eq!(a.negate_col(3).unwrap().get(0, 3), -1);
        assert_eq!(a.repeat_col(2).unwrap().cols(), 5);
        assert_eq!(a.append_unit_row(2, true).unwrap().row(3), &[0, 0, -1, 0]);
        assert_eq!(a.append_unit_col(0, false).unwrap().row(0), &[0, 1, -1, 1, 1]);
        assert_eq!(a.permute_rows(&[2, 0, 1]).unwrap().row(0), a.row(2));
        assert_eq!(a.permute_rows(&[0, 0, 1]), Err(TuError::BadPermutation));
        assert!(matches!(a.negate_row(5), Err(TuError::IndexOutOfRange { .. })));
    }

    #[test]
    fn sampling_finds_counterexample() {
        let s = i_sum(&isum_counterexample(), 2).unwrap();
        let v = sample_totally_unimodular(&s, 100_000, 3);
        assert_eq!(v.witness().map(|w| w.det.abs()), Some(2));
    }
}
