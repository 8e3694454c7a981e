//! Bit-packed linear algebra over the field with two elements.
//!
//! Vectors store 64 coordinates per word; all elimination is word-level XOR.
//! Pivots are always chosen at the lowest available column so that bases,
//! kernels and solutions are reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A vector over F2 of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// `self[offset .. offset + other.len()] ^= other`.
    pub fn xor_at(&mut self, offset: usize, other: &BitVec) {
        debug_assert!(offset + other.len <= self.len);
        if other.len == 0 {
            return;
        }
        let shift = offset % WORD_BITS;
        let base = offset / WORD_BITS;
        if shift == 0 {
            for (i, &w) in other.words.iter().enumerate() {
                self.words[base + i] ^= w;
            }
        } else {
            for (i, &w) in other.words.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                self.words[base + i] ^= w << shift;
                let hi = w >> (WORD_BITS - shift);
                if hi != 0 {
                    self.words[base + i + 1] ^= hi;
                }
            }
        }
    }

    /// Copy of the coordinates `start .. start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        debug_assert!(start + len <= self.len);
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.xor_at(0, self);
        out.xor_at(self.len, other);
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over F2 with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Output of [`F2Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: F2Matrix,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: (0..rows).map(|_| BitVec::zeros(cols)).collect() }
    }

    pub fn identity(n: usize) -> Self {
        Self { cols: n, rows: (0..n).map(|i| BitVec::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { cols, rows }
    }

    pub fn from_bools(rows: &[&[bool]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| BitVec::from_bools(r)).collect())
    }

    #[inline]
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn col_count(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.rows[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Ordinary matrix product `self · other`.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.cols != other.rows.len() {
            return Err(F2Error::DimensionMismatch { expected: self.cols, found: other.rows.len() });
        }
        let rows = self.rows.iter().map(|r| other.vec_mul_unchecked(r)).collect();
        Ok(F2Matrix { cols: other.cols, rows })
    }

    /// Column action `self · x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, F2Error> {
        if x.len() != self.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Row action `x · self`: the sum of the rows selected by `x`.
    pub fn vec_mul(&self, x: &BitVec) -> Result<BitVec, F2Error> {
        if x.len() != self.rows.len() {
            return Err(F2Error::DimensionMismatch { expected: self.rows.len(), found: x.len() });
        }
        Ok(self.vec_mul_unchecked(x))
    }

    pub(crate) fn vec_mul_unchecked(&self, x: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let pivots = reduced.rref_in_place();
        Rref { rank: pivots.len(), pivots, reduced }
    }

    /// Reduces in place and returns the pivot columns. Zero rows end up last.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows.len() {
                break;
            }
            let Some(p) = (next..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next, p);
            let pivot_row = self.rows[next].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Some `x` with `self · x = b`, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>, F2Error> {
        if b.len() != self.rows.len() {
            return Err(F2Error::DimensionMismatch { expected: self.rows.len(), found: b.len() });
        }
        let aug = F2Matrix {
            cols: self.cols + 1,
            rows: self.rows.iter().enumerate().map(|(i, r)| r.concat(&BitVec::from_bools(&[b.get(i)]))).collect(),
        };
        let Rref { pivots, reduced, .. } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if reduced.rows[r].get(self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let Rref { pivots, reduced, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVec::unit(self.cols, free);
                for (r, &p) in pivots.iter().enumerate() {
                    if reduced.rows[r].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Basis of `{x : x · self = 0}`.
    pub fn left_kernel(&self) -> Vec<BitVec> {
        self.transpose().kernel_basis()
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// A subspace held in fully reduced echelon form.
///
/// Every stored row may carry a tag vector recording which inputs were combined to
/// produce it, so membership queries can also return coordinates.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    tag_len: usize,
    rows: Vec<BitVec>,
    tags: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self::with_tags(ambient, 0)
    }

    pub fn with_tags(ambient: usize, tag_len: usize) -> Self {
        Self { ambient, tag_len, rows: Vec::new(), tags: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut s = Self::new(ambient);
        for v in vs {
            s.add(v.clone());
        }
        s
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    /// Reduces `v` modulo the subspace; returns the tag combination used.
    pub fn reduce(&self, v: &mut BitVec) -> BitVec {
        let mut tag = BitVec::zeros(self.tag_len);
        for (i, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.rows[i]);
                if self.tag_len > 0 {
                    tag.xor_assign(&self.tags[i]);
                }
            }
        }
        tag
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Tag combination expressing `v`, if `v` lies in the subspace.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let mut w = v.clone();
        let tag = self.reduce(&mut w);
        w.is_zero().then_some(tag)
    }

    pub fn add(&mut self, v: BitVec) -> bool {
        let tag = BitVec::zeros(self.tag_len);
        self.add_tagged(v, tag).is_none()
    }

    /// Inserts `v` with `tag`. When `v` is already in the span, returns the tag
    /// combination of the relation `tag + (combination) = 0` and leaves the space unchanged.
    pub fn add_tagged(&mut self, mut v: BitVec, mut tag: BitVec) -> Option<BitVec> {
        debug_assert_eq!(v.len(), self.ambient);
        let t = self.reduce(&mut v);
        if self.tag_len > 0 {
            tag.xor_assign(&t);
        }
        let Some(p) = v.first_one() else {
            return Some(tag);
        };
        for i in 0..self.rows.len() {
            if self.rows[i].get(p) {
                self.rows[i].xor_assign(&v);
                if self.tag_len > 0 {
                    self.tags[i].xor_assign(&tag);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        self.tags.insert(at, tag);
        None
    }

    /// Standard basis vectors whose span complements this subspace.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> F2Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        F2Matrix::from_rows(
            cols,
            rows.iter().map(|r| BitVec::from_bools(&r.iter().map(|&b| b == 1).collect::<Vec<_>>())).collect(),
        )
    }

    #[test]
    fn rref_small_cases() {
        let r = F2Matrix::identity(3).rref();
        assert_eq!((r.rank, r.pivots), (3, vec![0, 1, 2]));
        let r = m(&[&[1, 1], &[1, 1]]).rref();
        assert_eq!((r.rank, r.pivots), (1, vec![0]));
        let r = F2Matrix::zeros(3, 4).rref();
        assert_eq!((r.rank, r.pivots), (0, vec![]));
    }

    #[test]
    fn solve_small_cases() {
        let b = BitVec::from_bools(&[true, false]);
        assert_eq!(F2Matrix::identity(2).solve(&b).unwrap(), Some(b.clone()));
        let z = F2Matrix::zeros(1, 1);
        assert_eq!(z.solve(&BitVec::from_bools(&[true])).unwrap(), None);
        let x = m(&[&[1, 1]]).solve(&BitVec::zeros(1)).unwrap().unwrap();
        assert_eq!(x, BitVec::zeros(2));
        assert_eq!(
            F2Matrix::identity(2).solve(&BitVec::zeros(3)),
            Err(F2Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn kernel_small_cases() {
        assert_eq!(m(&[&[1, 1]]).kernel_basis(), vec![BitVec::from_bools(&[true, true])]);
        assert!(F2Matrix::identity(4).kernel_basis().is_empty());
        assert_eq!(F2Matrix::zeros(2, 2).kernel_basis().len(), 2);
    }

    #[test]
    fn xor_at_crosses_words() {
        let mut v = BitVec::zeros(200);
        let w = BitVec::from_ones(70, [0, 63, 64, 69]);
        v.xor_at(61, &w);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![61, 124, 125, 130]);
        assert_eq!(v.slice(61, 70), w);
    }

    #[test]
    fn subspace_tags_track_combinations() {
        let mut s = Subspace::with_tags(3, 3);
        let a = BitVec::from_ones(3, [0, 1]);
        let b = BitVec::from_ones(3, [1, 2]);
        assert!(s.add_tagged(a.clone(), BitVec::unit(3, 0)).is_none());
        assert!(s.add_tagged(b.clone(), BitVec::unit(3, 1)).is_none());
        let mut c = a.clone();
        c.xor_assign(&b);
        let rel = s.add_tagged(c.clone(), BitVec::unit(3, 2)).unwrap();
        assert_eq!(rel, BitVec::from_ones(3, [0, 1, 2]));
        assert_eq!(s.express(&c), Some(BitVec::from_ones(3, [0, 1])));
        assert_eq!(s.complement_indices(), vec![2]);
    }

    fn arb_matrix() -> impl Strategy<Value = F2Matrix> {
        (0usize..9, 0usize..140).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r)
                .prop_map(move |rows| F2Matrix::from_rows(c, rows.iter().map(|r| BitVec::from_bools(r)).collect()))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let ker = a.kernel_basis();
            prop_assert_eq!(a.rank() + ker.len(), a.col_count());
            for v in &ker {
                prop_assert!(a.mul_vec(v).unwrap().is_zero());
            }
            prop_assert_eq!(F2Matrix::from_rows(a.col_count(), ker).rank(), a.col_count() - a.rank());
        }

        #[test]
        fn rref_is_idempotent(a in arb_matrix()) {
            let once = a.rref().reduced;
            prop_assert_eq!(once.rref().reduced, once);
        }

        #[test]
        fn solve_reproduces_rhs(a in arb_matrix(), seed in any::<u64>()) {
            let mut x = BitVec::zeros(a.col_count());
            for i in 0..a.col_count() {
                if (seed >> (i % 64)) & 1 == 1 { x.set(i, true); }
            }
            let b = a.mul_vec(&x).unwrap();
            let y = a.solve(&b).unwrap().expect("b is in the column space");
            prop_assert_eq!(a.mul_vec(&y).unwrap(), b);
        }
    }
}
