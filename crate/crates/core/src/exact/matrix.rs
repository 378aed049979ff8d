//! Dense rational and integer matrices.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize};

use super::rat::Rat;

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MatQ {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawMat<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<'de> Deserialize<'de> for MatQ {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawMat::<Rat>::deserialize(deserializer)?;
        MatQ::from_entries(raw.rows, raw.cols, raw.entries).ok_or_else(|| {
            de::Error::custom("matrix entry count does not match rows * cols")
        })
    }
}

/// Reduced row-echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: MatQ,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatQ {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatQ::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from row-major entries; `None` if the length is wrong.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rat>) -> Option<Self> {
        (entries.len() == rows * cols).then_some(MatQ {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        MatQ {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        MatQ::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from(x)).collect())
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Rat>]) -> Self {
        let mut m = MatQ::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> MatQ {
        let mut t = MatQ::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = MatQ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &MatQ) -> MatQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatQ {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &MatQ) -> MatQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatQ {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> MatQ {
        MatQ {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Row-major flattening, used when matrices are themselves unknowns.
    pub fn to_flat(&self) -> Vec<Rat> {
        self.entries.clone()
    }

    /// The unique reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// A basis of the right null space, one vector per free column in
    /// increasing column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -&reduced[(r, f)];
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self * x = b`, free variables set to zero; `None` when
    /// the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = MatQ::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let Rref {
            reduced, pivots, ..
        } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Rat {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &pivot;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<MatQ> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = MatQ::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let Rref {
            reduced, pivots, ..
        } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = MatQ::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = reduced[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Principal submatrix on the given index set.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> MatQ {
        let mut m = MatQ::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for MatQ {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatQ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatZ {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl MatZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatZ {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatZ::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = MatZ::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
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

    pub fn mul(&self, other: &MatZ) -> MatZ {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = MatZ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    pub fn to_rational(&self) -> MatQ {
        MatQ::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().cloned().map(Rat::from).collect(),
        )
        .expect("shape is preserved")
    }

    pub fn determinant(&self) -> BigInt {
        let d = self.to_rational().determinant();
        debug_assert!(d.is_integer());
        d.numer().clone()
    }

    /// Diagonal entries `d[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += factor * row[src]`
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += factor * col[src]`
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * factor;
            self[(i, dst)] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl Index<(usize, usize)> for MatZ {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatZ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Serialize for MatZ {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("MatZ", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let entries: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}
