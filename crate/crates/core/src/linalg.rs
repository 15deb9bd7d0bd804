//! Dense matrices over a [`Field`] with exact Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::LinalgError;
use crate::field::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    ctx: F::Ctx,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Row-reduced echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(ctx: F::Ctx, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            ctx,
            data: vec![F::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: F::Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = F::one(ctx);
        }
        m
    }

    pub fn from_fn(ctx: F::Ctx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, ctx, data }
    }

    pub fn from_vec(ctx: F::Ctx, rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Matrix { rows, cols, ctx, data }
    }

    /// Build from integer rows. All rows must have equal length.
    pub fn from_i64(ctx: F::Ctx, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(ctx, r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            F::from_i64(ctx, rows[i][j])
        })
    }

    pub fn column_vector(ctx: F::Ctx, v: Vec<F>) -> Self {
        let n = v.len();
        Matrix { rows: n, cols: 1, ctx, data: v }
    }

    /// The matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(ctx: F::Ctx, rows: usize, columns: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(ctx, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
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

    pub fn ctx(&self) -> F::Ctx {
        self.ctx
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[F] {
        &self.data
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
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ: {:?} * {:?}", self.shape(), rhs.shape());
        let mut out = Self::zeros(self.ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero(self.ctx);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn sub(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        let data = self.data.iter().map(|a| a.clone() * s.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn neg(&self) -> Matrix<F> {
        let data = self.data.iter().map(|a| -a.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn transpose(&self) -> Matrix<F> {
        Self::from_fn(self.ctx, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Kronecker product; row index `i * rhs.rows + k`, column `j * rhs.cols + l`.
    pub fn kron(&self, rhs: &Matrix<F>) -> Matrix<F> {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(self.ctx, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = &rhs[(k, l)];
                        if !b.is_zero() {
                            out[(i * rhs.rows + k, j * rhs.cols + l)] = a.clone() * b.clone();
                        }
                    }
                }
            }
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<F> {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(self.ctx, rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<F>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix<F>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                let b = &block[(i, j)];
                if !b.is_zero() {
                    let cur = self[(r0 + i, c0 + j)].clone();
                    self[(r0 + i, c0 + j)] = cur + b.clone();
                }
            }
        }
    }

    pub fn hstack(ctx: F::Ctx, rows: usize, parts: &[&Matrix<F>]) -> Matrix<F> {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(ctx, rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows);
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn vstack(ctx: F::Ctx, cols: usize, parts: &[&Matrix<F>]) -> Matrix<F> {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(ctx, rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols);
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    pub fn block_diag(ctx: F::Ctx, parts: &[&Matrix<F>]) -> Matrix<F> {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(ctx, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Row-major flattening, the coordinates of a linear map `k^cols -> k^rows`.
    pub fn vectorize(&self) -> Vec<F> {
        self.data.clone()
    }

    pub fn rref(&self) -> Rref<F> {
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
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let x = m[(r, j)].clone();
                m[(r, j)] = x * inv.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let pr = &m.data[r * m.cols + j];
                    if pr.is_zero() {
                        continue;
                    }
                    let delta = factor.clone() * pr.clone();
                    let cur = m[(i, j)].clone();
                    m[(i, j)] = cur - delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
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
        self.rref().pivots.len()
    }

    /// Columns form a basis of the right kernel.
    pub fn kernel_basis(&self) -> Matrix<F> {
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Self::zeros(self.ctx, self.cols, free.len());
        for (idx, &f) in free.iter().enumerate() {
            k[(f, idx)] = F::one(self.ctx);
            for (row, &p) in pivots.iter().enumerate() {
                k[(p, idx)] = -r[(row, f)].clone();
            }
        }
        k
    }

    /// A basis of the column space, taken from the original pivot columns.
    pub fn column_space(&self) -> Matrix<F> {
        let pivots = self.rref().pivots;
        Self::from_fn(self.ctx, self.rows, pivots.len(), |i, j| self[(i, pivots[j])].clone())
    }

    /// Indices of standard basis vectors extending the column space to all of `k^rows`.
    pub fn complement_indices(&self) -> Vec<usize> {
        let id = Self::identity(self.ctx, self.rows);
        let aug = Self::hstack(self.ctx, self.rows, &[self, &id]);
        aug.rref()
            .pivots
            .into_iter()
            .filter(|&p| p >= self.cols)
            .map(|p| p - self.cols)
            .collect()
    }

    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let rhs = Self::column_vector(self.ctx, b.to_vec());
        Ok(self.solve_matrix(&rhs)?.map(|x| x.column(0)))
    }

    /// Solve `self * X = rhs` for a matrix `X`, or report that no solution exists.
    pub fn solve_matrix(&self, rhs: &Matrix<F>) -> Result<Option<Matrix<F>>, LinalgError> {
        if rhs.rows != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let aug = Self::hstack(self.ctx, self.rows, &[self, rhs]);
        let Rref { matrix: r, pivots } = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(self.ctx, self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if !self.is_square() {
            return None;
        }
        let id = Self::identity(self.ctx, self.rows);
        let x = self.solve_matrix(&id).ok()??;
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

/// Coordinates with respect to a fixed set of linearly independent columns.
///
/// Stores a row operation `T` with `T * B = [I; 0]`, so a vector `v` lies in
/// the span iff the tail of `T v` vanishes, and then the head is its
/// coordinate vector.
#[derive(Clone, Debug)]
pub struct ColumnBasis<F: Field> {
    basis: Matrix<F>,
    transform: Matrix<F>,
}

impl<F: Field> ColumnBasis<F> {
    pub fn new(basis: Matrix<F>) -> Result<Self, LinalgError> {
        let n = basis.rows();
        let r = basis.cols();
        let id = Matrix::identity(basis.ctx(), n);
        let aug = Matrix::hstack(basis.ctx(), n, &[&basis, &id]);
        let red = aug.rref();
        if red.pivots.len() < r || red.pivots[..r] != (0..r).collect::<Vec<_>>()[..] {
            return Err(LinalgError::DependentColumns);
        }
        let transform = red.matrix.submatrix(0, r, n, n);
        Ok(ColumnBasis { basis, transform })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        let w = self.transform.mul_vec(v);
        let r = self.dim();
        if w[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(w[..r].to_vec())
    }

    /// Coordinates of every column of `m`, as the columns of the result.
    pub fn coords_matrix(&self, m: &Matrix<F>) -> Option<Matrix<F>> {
        let w = self.transform.mul(m);
        let r = self.dim();
        for i in r..w.rows() {
            if w.row(i).iter().any(|x| !x.is_zero()) {
                return None;
            }
        }
        Some(w.submatrix(0, 0, r, m.cols()))
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.coords(v).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Prime, Rational};
    use proptest::prelude::*;

    fn p() -> Prime {
        Prime::DEFAULT
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = Matrix::<Fp>::identity(p(), 3).kernel_basis();
        assert_eq!(k.shape(), (3, 0));
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = Matrix::<Fp>::zeros(p(), 2, 3).kernel_basis();
        assert_eq!(k.cols(), 3);
        assert_eq!(k.rank(), 3);
    }

    #[test]
    fn kernel_of_all_ones() {
        let m = Matrix::<Fp>::from_i64(p(), &[vec![1, 1], vec![1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert_eq!(v[0].clone() + v[1].clone(), Fp::new(p(), 0));
        assert!(!v[0].is_zero());
    }

    #[test]
    fn solve_identity() {
        let m = Matrix::<Fp>::identity(p(), 3);
        let b: Vec<Fp> = [4, -2, 9].iter().map(|&x| Fp::new(p(), x)).collect();
        assert_eq!(m.solve(&b).unwrap().unwrap(), b);
    }

    #[test]
    fn solve_unreachable() {
        let m = Matrix::<Fp>::from_i64(p(), &[vec![1, 0], vec![0, 0]]);
        let b = vec![Fp::new(p(), 0), Fp::new(p(), 1)];
        assert_eq!(m.solve(&b).unwrap(), None);
    }

    #[test]
    fn solve_in_f5() {
        let p5 = Prime::new(5).unwrap();
        let m = Matrix::<Fp>::from_i64(p5, &[vec![2]]);
        let x = m.solve(&[Fp::new(p5, 1)]).unwrap().unwrap();
        assert_eq!(x, vec![Fp::new(p5, 3)]);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = Matrix::<Fp>::identity(p(), 2);
        assert!(m.solve(&[Fp::new(p(), 1)]).is_err());
    }

    #[test]
    fn rationals_inverse() {
        let m = Matrix::<Rational>::from_i64((), &[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity((), 2));
    }

    #[test]
    fn column_basis_coordinates() {
        let b = Matrix::<Fp>::from_i64(p(), &[vec![1, 0], vec![1, 1], vec![0, 1]]);
        let cb = ColumnBasis::new(b).unwrap();
        let v: Vec<Fp> = [2, 5, 3].iter().map(|&x| Fp::new(p(), x)).collect();
        assert_eq!(cb.coords(&v).unwrap(), vec![Fp::new(p(), 2), Fp::new(p(), 3)]);
        let w: Vec<Fp> = [1, 0, 0].iter().map(|&x| Fp::new(p(), x)).collect();
        assert!(cb.coords(&w).is_none());
    }

    #[test]
    fn complement_of_a_line() {
        let b = Matrix::<Fp>::from_i64(p(), &[vec![1], vec![1], vec![0]]);
        let c = b.complement_indices();
        assert_eq!(c.len(), 2);
        let cols: Vec<Vec<Fp>> = c
            .iter()
            .map(|&i| (0..3).map(|r| Fp::new(p(), (r == i) as i64)).collect())
            .collect();
        let ext = Matrix::hstack(p(), 3, &[&b, &Matrix::from_columns(p(), 3, &cols)]);
        assert!(ext.is_invertible());
    }

    fn small_prime_matrix() -> impl Strategy<Value = Matrix<Fp>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                let p7 = Prime::new(7).unwrap();
                Matrix::from_vec(p7, r, c, v.into_iter().map(|x| Fp::new(p7, x)).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_prime_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!(m.mul(&k).is_zero());
            prop_assert_eq!(k.rank(), k.cols());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }

        #[test]
        fn solve_is_exact(m in small_prime_matrix(), seed in proptest::collection::vec(-3i64..4, 6)) {
            let ctx = m.ctx();
            let x: Vec<Fp> = (0..m.cols()).map(|i| Fp::new(ctx, seed[i])).collect();
            let b = m.mul_vec(&x);
            let y = m.solve(&b).unwrap().expect("constructed to be solvable");
            prop_assert_eq!(m.mul_vec(&y), b);
        }
    }
}
