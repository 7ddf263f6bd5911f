//! Exact linear algebra over the rationals.
//!
//! Two representations live here: a dense row-major [`RationalMatrix`] with
//! the classical operations, and sparse vectors with an incrementally
//! maintained reduced echelon basis ([`Echelon`]) which the path-space code
//! uses for speed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Ground-field scalar. Always kept in lowest terms with positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` into a reduced rational.
pub fn parse_scalar(s: &str) -> Option<Scalar> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Lowest-terms text form; integers print without a denominator.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_scalar).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RationalMatrix {
    /// Panics if `entries.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        RationalMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r.iter().cloned());
        }
        RationalMatrix { rows: rows.len(), cols, entries }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: RationalMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination to the unique reduced row-echelon form.
pub fn rref(m: &RationalMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for k in 0..cols {
                a.entries.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = a.get(r, c).recip();
        for k in c..cols {
            let v = a.get(r, k) * &inv;
            a.set(r, k, v);
        }
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for k in c..cols {
                if a.get(r, k).is_zero() {
                    continue;
                }
                let v = a.get(i, k) - &f * a.get(r, k);
                a.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { rank: pivots.len(), reduced: a, pivots }
}

/// Basis of the right null space, one vector per free column, in the
/// standard form read off the reduced echelon matrix.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Scalar>> {
    let Rref { reduced, pivots, .. } = rref(m);
    let cols = m.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -reduced.get(row, f).clone();
            }
            v
        })
        .collect()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut ech = Echelon::new();
    for b in basis {
        assert_eq!(b.len(), v.len(), "vectors must share a length");
        ech.insert(dense_to_sparse(b));
    }
    ech.reduce(&dense_to_sparse(v)).is_empty()
}

/// Sparse vector: strictly increasing indices, no zero values.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn dense_to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn unit(i: usize) -> SparseVec {
    vec![(i, Scalar::one())]
}

/// `a + c*b`.
pub fn axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + c * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(a: &SparseVec, c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// Accumulates `c * v` into a map-based accumulator.
pub fn accumulate(acc: &mut BTreeMap<usize, Scalar>, c: &Scalar, v: &SparseVec) {
    for (i, x) in v {
        let e = acc.entry(*i).or_insert_with(Scalar::zero);
        *e += c * x;
    }
}

pub fn from_accumulator(acc: BTreeMap<usize, Scalar>) -> SparseVec {
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

/// Relabels indices through `map`, summing collisions, and re-sorts.
pub fn remap(v: &SparseVec, map: impl Fn(usize) -> usize) -> SparseVec {
    let mut acc = BTreeMap::new();
    for (i, x) in v {
        let e = acc.entry(map(*i)).or_insert_with(Scalar::zero);
        *e += x;
    }
    from_accumulator(acc)
}

/// A subspace held as fully reduced echelon rows (every pivot column is zero
/// in every other row, every pivot entry is one).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    /// Rows in pivot order.
    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    pub fn row_for_pivot(&self, c: usize) -> Option<&SparseVec> {
        self.rows.get(&c)
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        // Rows are fully reduced, so one pass over pivots in increasing order
        // suffices: eliminating pivot p only touches non-pivot columns.
        let mut k = 0;
        while k < cur.len() {
            let (c, x) = (cur[k].0, cur[k].1.clone());
            if let Some(row) = self.rows.get(&c) {
                cur = axpy(&cur, &-x, row);
            } else {
                k += 1;
            }
        }
        cur
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns false if it was already contained.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(&v);
        let Some((p, lead)) = r.first().cloned() else {
            return false;
        };
        let r = scale(&r, &lead.recip());
        for row in self.rows.values_mut() {
            if let Some(x) = coeff(row, p) {
                *row = axpy(row, &-x, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }
}

/// Coefficient at index `i`, if nonzero.
pub fn coeff(v: &SparseVec, i: usize) -> Option<Scalar> {
    v.binary_search_by_key(&i, |(j, _)| *j).ok().map(|k| v[k].1.clone())
}

/// Kernel of the linear map sending the k-th domain basis vector to
/// `images[k]`, returned as reduced echelon rows over the domain.
pub fn kernel_of_images(images: &[SparseVec]) -> Vec<SparseVec> {
    // Each stored row keeps its image (in echelon form by leading index) and
    // the domain combination producing it.
    let mut rows: BTreeMap<usize, (SparseVec, SparseVec)> = BTreeMap::new();
    let mut kernel = Echelon::new();
    for (k, img) in images.iter().enumerate() {
        let mut im = img.clone();
        let mut combo = unit(k);
        while let Some((lead, x)) = im.first().cloned() {
            match rows.get(&lead) {
                Some((rim, rco)) => {
                    let f = -(x / &rim[0].1);
                    im = axpy(&im, &f, rim);
                    combo = axpy(&combo, &f, rco);
                }
                None => break,
            }
        }
        if im.is_empty() {
            kernel.insert(combo);
        } else {
            rows.insert(im[0].0, (im, combo));
        }
    }
    kernel.rows().cloned().collect()
}

pub fn is_positive(x: &Scalar) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    /// Rank by exhaustive minors: the largest k with a nonzero k x k minor.
    fn rank_by_minors(a: &RationalMatrix) -> usize {
        fn det(a: &[Vec<Scalar>]) -> Scalar {
            let n = a.len();
            if n == 0 {
                return Scalar::one();
            }
            // Laplace expansion along the first row; sizes here are tiny.
            let mut acc = Scalar::zero();
            for c in 0..n {
                if a[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Scalar>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &a[0][c] * det(&minor);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=a.rows().min(a.cols())).rev() {
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    let sub: Vec<Vec<Scalar>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| a.get(r, c).clone()).collect()).collect();
                    if !det(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rref_identity_and_proportional_rows() {
        let i = RationalMatrix::identity(2);
        let r = rref(&i);
        assert_eq!(r.reduced, i);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);

        let r = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.reduced, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn rank_of_fixed_random_matrix_matches_minor_oracle() {
        // Frozen 4x6 instance; the minor oracle gives rank 3 (row 3 = row 0 + row 1).
        let a = RationalMatrix::from_rows(&[
            vec![ratio(1, 2), int(3), int(-1), int(0), ratio(2, 3), int(5)],
            vec![int(2), int(-1), int(4), ratio(1, 3), int(0), int(1)],
            vec![int(0), int(7), ratio(-5, 2), int(1), int(1), int(-2)],
            vec![ratio(5, 2), int(2), int(3), ratio(1, 3), ratio(2, 3), int(6)],
        ]);
        assert_eq!(rank_by_minors(&a), 3);
        assert_eq!(rref(&a).rank, 3);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RationalMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&RationalMatrix::zeros(2, 3)).len(), 3);
        let k = kernel_basis(&m(&[&[1, 1, 0], &[0, 1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![int(1), int(-1), int(1)]);
    }

    #[test]
    fn span_examples() {
        assert!(in_span(&[], &[int(0), int(0)]));
        assert!(!in_span(&[vec![int(1), int(0)]], &[int(0), int(1)]));
        let b = vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(1)]];
        assert!(in_span(&b, &[int(1), int(0), int(-1)]));
    }

    #[test]
    fn scalar_text_round_trip() {
        assert_eq!(parse_scalar("6/-4"), Some(ratio(-3, 2)));
        assert_eq!(format_scalar(&ratio(-3, 2)), "-3/2");
        assert_eq!(format_scalar(&int(4)), "4");
        assert_eq!(parse_scalar("1/0"), None);
    }

    #[test]
    fn kernel_of_images_matches_dense_kernel() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let images: Vec<SparseVec> = (0..a.cols())
            .map(|c| dense_to_sparse(&(0..a.rows()).map(|r| a.get(r, c).clone()).collect::<Vec<_>>()))
            .collect();
        let k = kernel_of_images(&images);
        assert_eq!(k.len(), 2);
        for v in &k {
            let d = sparse_to_dense(v, 4);
            assert!(a.mul_vec(&d).iter().all(Zero::is_zero));
        }
    }

    fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..4, 1i64..3), r * c).prop_map(move |v| {
                RationalMatrix::new(r, c, v.into_iter().map(|(n, d)| ratio(n, d)).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rref_idempotent_and_rank_nullity(a in small_matrix()) {
            let r = rref(&a);
            prop_assert_eq!(&rref(&r.reduced).reduced, &r.reduced);
            prop_assert_eq!(r.rank, rref(&a.transpose()).rank);
            let k = kernel_basis(&a);
            prop_assert_eq!(k.len() + r.rank, a.cols());
            for v in &k {
                prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn echelon_rank_matches_rref(a in small_matrix()) {
            let mut e = Echelon::new();
            for r in 0..a.rows() {
                e.insert(dense_to_sparse(a.row(r)));
            }
            prop_assert_eq!(e.rank(), rref(&a).rank);
        }
    }
}
