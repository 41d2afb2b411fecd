use std::fmt;

use super::echelon::{solve_left, transpose, Rref};
use super::scalar::{FieldSpec, Scalar};
use super::sparse::SparseVec;
use crate::error::{Error, Result};

/// A dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Contract("ragged matrix rows".into()));
        }
        let nrows = rows.len();
        Ok(Matrix {
            field,
            rows: nrows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.int(x)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("rectangular literal")
    }

    pub(crate) fn from_sparse_rows(field: FieldSpec, cols: usize, rows: &[SparseVec]) -> Self {
        let zero = field.zero();
        let entries = rows.iter().flat_map(|r| r.to_dense(cols, &zero)).collect();
        Matrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn sparse_rows(&self) -> Vec<SparseVec> {
        (0..self.rows).map(|r| SparseVec::from_dense(self.row(r))).collect()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn rank(&self) -> usize {
        rref(self).0
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = Matrix::identity(self.field, self.rows);
        solve(self, &id).ok().flatten()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{} over {}]", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form: `(rank, reduced, pivot columns)`.
pub fn rref(m: &Matrix) -> (usize, Matrix, Vec<usize>) {
    let r = Rref::of_rows(m.cols, m.sparse_rows());
    let mut rows = r.rows.clone();
    rows.resize(m.rows, SparseVec::new());
    let reduced = Matrix::from_sparse_rows(m.field, m.cols, &rows);
    (r.rank(), reduced, r.pivots)
}

/// Canonical basis (as rows) of `{v : m · vᵀ = 0}`: free variables set to
/// unit vectors, read off the reduced form.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let r = Rref::of_rows(m.cols, m.sparse_rows());
    let basis = r.kernel_basis(&m.field.one());
    Matrix::from_sparse_rows(m.field, m.cols, &basis)
}

/// Solves `m · x = rhs` column by column. The returned solution has every
/// non-pivot coordinate zero; `None` when some column is inconsistent.
pub fn solve(m: &Matrix, rhs: &Matrix) -> Result<Option<Matrix>> {
    if rhs.rows != m.rows {
        return Err(Error::Contract(format!(
            "right-hand side has {} rows, system has {}",
            rhs.rows, m.rows
        )));
    }
    // m · x = b  <=>  xᵀ · mᵀ = bᵀ with mᵀ's rows being m's columns.
    let images = transpose(&m.sparse_rows(), m.cols);
    let targets = transpose(&rhs.sparse_rows(), rhs.cols);
    let sols = solve_left(&images, m.rows, &targets);
    let mut cols = Vec::with_capacity(sols.len());
    for s in sols {
        match s {
            Some(v) => cols.push(v),
            None => return Ok(None),
        }
    }
    let xt = Matrix::from_sparse_rows(m.field, m.cols, &cols);
    Ok(Some(xt.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn rref_identity() {
        let (rank, reduced, pivots) = rref(&Matrix::identity(Q, 2));
        assert_eq!(rank, 2);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(reduced, Matrix::identity(Q, 2));
    }

    #[test]
    fn rref_dependent_rows() {
        let (rank, reduced, pivots) = rref(&Matrix::from_i64(Q, &[&[1, 2], &[2, 4]]));
        assert_eq!(rank, 1);
        assert_eq!(pivots, vec![0]);
        assert_eq!(reduced, Matrix::from_i64(Q, &[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rref_over_f2_merges_rows() {
        let f2 = FieldSpec::prime(2).unwrap();
        let (rank, reduced, pivots) = rref(&Matrix::from_i64(f2, &[&[1, 1], &[1, -1]]));
        assert_eq!(rank, 1);
        assert_eq!(pivots, vec![0]);
        assert_eq!(reduced, Matrix::from_i64(f2, &[&[1, 1], &[0, 0]]));
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert_eq!(kernel_basis(&Matrix::identity(Q, 3)).nrows(), 0);
    }

    #[test]
    fn kernel_of_difference() {
        let k = kernel_basis(&Matrix::from_i64(Q, &[&[1, -1]]));
        assert_eq!(k, Matrix::from_i64(Q, &[&[1, 1]]));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::from_i64(Q, &[&[1, 2, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.nrows(), 2);
        assert!(m.mul(&k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn solve_examples() {
        let b = Matrix::from_i64(Q, &[&[4], &[-1]]);
        assert_eq!(solve(&Matrix::identity(Q, 2), &b).unwrap().unwrap(), b);

        let x = solve(&Matrix::from_i64(Q, &[&[1, 1]]), &Matrix::from_i64(Q, &[&[2]]))
            .unwrap()
            .unwrap();
        assert_eq!(x, Matrix::from_i64(Q, &[&[2], &[0]]));

        let none = solve(&Matrix::from_i64(Q, &[&[1], &[1]]), &Matrix::from_i64(Q, &[&[0], &[1]]))
            .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn solve_rejects_shape_mismatch() {
        let err = solve(&Matrix::identity(Q, 2), &Matrix::identity(Q, 3));
        assert!(matches!(err, Err(Error::Contract(_))));
    }
}
