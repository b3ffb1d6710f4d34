use std::fmt;

use super::field::Field;
use super::LinAlgError;

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Output of [`Matrix::row_reduce`].
#[derive(Clone, PartialEq, Eq)]
pub struct RowReduced<F> {
    pub reduced: Matrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::Ragged);
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| F::from_i64(v)).collect()).collect())
            .expect("ragged literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinAlgError> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinAlgError> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, s: &F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    fn same_shape(&self, other: &Self) -> Result<(), LinAlgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinAlgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.rows != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form by Gauss-Jordan elimination.
    pub fn row_reduce(&self) -> RowReduced<F> {
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
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].mul(&inv);
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(i, j)] = m[(i, j)].sub(&factor.mul(&m[(r, j)]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        RowReduced { rank: pivots.len(), reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Columns form a basis of the right null space.
    pub fn kernel_basis(&self) -> Matrix<F> {
        let rr = self.row_reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (col, &f) in free.iter().enumerate() {
            k[(f, col)] = F::one();
            for (row, &p) in rr.pivots.iter().enumerate() {
                k[(p, col)] = rr.reduced[(row, f)].neg();
            }
        }
        k
    }

    /// Some `x` with `self * x = rhs`, or `None` when `rhs` leaves the column space.
    pub fn solve(&self, rhs: &Self) -> Result<Option<Self>, LinAlgError> {
        if self.rows != rhs.rows {
            return Err(LinAlgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let aug = self.hstack(rhs)?;
        let rr = aug.row_reduce();
        if rr.pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &p) in rr.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = rr.reduced[(row, self.cols + j)].clone();
            }
        }
        debug_assert!(self.mul(&x).map(|p| &p == rhs).unwrap_or(false), "solve verification failed");
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve(&Self::identity(self.rows)).ok()??;
        Some(x)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> fmt::Debug for RowReduced<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RowReduced")
            .field("reduced", &self.reduced)
            .field("rank", &self.rank)
            .field("pivots", &self.pivots)
            .finish()
    }
}

/// A subspace of `F^n` given by independent spanning vectors, with fast
/// coordinate extraction.
#[derive(Clone, Debug)]
pub struct Span<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    // Reduced echelon rows of the basis-as-rows matrix together with the
    // transform that expresses them in basis coordinates.
    echelon: Vec<(usize, Vec<F>, Vec<F>)>,
}

impl<F: Field> Span<F> {
    /// Extracts a basis of the span of `vectors`; the kept vectors are a
    /// subset of the input in input order.
    pub fn new(ambient: usize, vectors: &[Vec<F>]) -> Self {
        let mut span = Span { ambient, basis: Vec::new(), echelon: Vec::new() };
        for v in vectors {
            span.try_push(v.clone());
        }
        span
    }

    pub fn empty(ambient: usize) -> Self {
        Span { ambient, basis: Vec::new(), echelon: Vec::new() }
    }

    /// Adds `v` if it is independent of the current basis; returns whether it was added.
    pub fn try_push(&mut self, v: Vec<F>) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let k = self.basis.len();
        let mut coords = vec![F::zero(); k + 1];
        coords[k] = F::one();
        let mut w = v.clone();
        for (p, row, tr) in &self.echelon {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            axpy(&mut w, &f.neg(), row);
            for (c, t) in coords.iter_mut().zip(tr) {
                if !t.is_zero() {
                    *c = c.sub(&f.mul(t));
                }
            }
        }
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero");
        for x in w.iter_mut() {
            *x = x.mul(&inv);
        }
        for c in coords.iter_mut() {
            *c = c.mul(&inv);
        }
        // keep rows fully reduced against the new pivot
        for (_, row, tr) in self.echelon.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            axpy(row, &f.neg(), &w);
            tr.push(F::zero());
            for (t, c) in tr.iter_mut().zip(&coords) {
                if !c.is_zero() {
                    *t = t.sub(&f.mul(c));
                }
            }
        }
        for (_, _, tr) in self.echelon.iter_mut() {
            tr.resize(k + 1, F::zero());
        }
        self.echelon.push((p, w, coords));
        self.basis.push(v);
        true
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Coordinates of `v` in the basis, `None` if `v` is outside the span.
    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut w = v.to_vec();
        let mut coords = vec![F::zero(); self.basis.len()];
        for (p, row, tr) in &self.echelon {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            axpy(&mut w, &f.neg(), row);
            for (c, t) in coords.iter_mut().zip(tr) {
                if !t.is_zero() {
                    *c = c.add(&f.mul(t));
                }
            }
        }
        if w.iter().all(F::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.coords(v).is_some()
    }
}

/// `y += a * x`
pub fn axpy<F: Field>(y: &mut [F], a: &F, x: &[F]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = yi.add(&a.mul(xi));
        }
    }
}

/// Basis of the kernel of the linear map whose columns are `images`
/// (vectors of length `target_dim`), as coefficient vectors.
pub fn kernel_of_images<F: Field>(target_dim: usize, images: &[Vec<F>]) -> Vec<Vec<F>> {
    Matrix::from_columns(target_dim, images).kernel_basis().columns()
}

/// Rank of the family of vectors.
pub fn rank_of<F: Field>(ambient: usize, vectors: &[Vec<F>]) -> usize {
    Span::new(ambient, vectors).dim()
}

#[cfg(test)]
mod tests {
    use super::super::field::Q;
    use super::*;

    type M = Matrix<Q>;

    #[test]
    fn row_reduce_examples() {
        let id = M::identity(2);
        let rr = id.row_reduce();
        assert_eq!((rr.reduced, rr.rank, rr.pivots), (id.clone(), 2, vec![0, 1]));

        let z = M::zeros(3, 4);
        let rr = z.row_reduce();
        assert_eq!((rr.reduced, rr.rank, rr.pivots), (z, 0, vec![]));

        let rr = M::from_i64(&[&[1, 2], &[2, 4]]).row_reduce();
        assert_eq!(rr.reduced, M::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(rr.rank, 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(M::identity(3).kernel_basis().cols(), 0);
        assert_eq!(M::zeros(3, 3).kernel_basis(), M::identity(3));
        let k = M::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, M::from_i64(&[&[-1], &[1]]));
    }

    #[test]
    fn solve_examples() {
        let rhs = M::from_i64(&[&[3, 1], &[5, 0]]);
        assert_eq!(M::identity(2).solve(&rhs).unwrap(), Some(rhs));
        assert_eq!(M::zeros(2, 2).solve(&M::from_i64(&[&[1], &[0]])).unwrap(), None);
        let x = M::from_i64(&[&[2]]).solve(&M::from_i64(&[&[3]])).unwrap().unwrap();
        assert_eq!(x[(0, 0)], Q::new(3, 2).unwrap());
        assert!(matches!(
            M::identity(2).solve(&M::zeros(3, 1)),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn span_coordinates() {
        let q = |v: &[i64]| v.iter().map(|&x| Q::from_int(x)).collect::<Vec<_>>();
        let s = Span::new(3, &[q(&[1, 1, 0]), q(&[2, 2, 0]), q(&[0, 1, 1])]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.coords(&q(&[1, 2, 1])), Some(q(&[1, 1])));
        assert_eq!(s.coords(&q(&[0, 0, 1])), None);
    }
}
