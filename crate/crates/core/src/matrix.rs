//! Dense row-major matrices of element codes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::Code;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Code>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Code>) -> Result<Matrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty matrix ({rows}x{cols})")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Code>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    /// A single column.
    pub fn column(values: &[Code]) -> Result<Matrix> {
        Matrix::new(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Code {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Code] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Code]> {
        self.data.chunks(self.cols)
    }

    pub fn col(&self, c: usize) -> Vec<Code> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[Code] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Code>> {
        self.row_iter().map(<[Code]>::to_vec).collect()
    }

    /// Rows `start..end`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Matrix> {
        if start >= end || end > self.rows {
            return Err(Error::Shape(format!(
                "row range {start}..{end} outside 0..{}",
                self.rows
            )));
        }
        Matrix::new(
            end - start,
            self.cols,
            self.data[start * self.cols..end * self.cols].to_vec(),
        )
    }

    /// Row blocks of `size` rows each.
    pub fn row_blocks(&self, size: usize) -> Result<Vec<Matrix>> {
        if size == 0 || !self.rows.is_multiple_of(size) {
            return Err(Error::Shape(format!(
                "{} rows do not split into blocks of {size}",
                self.rows
            )));
        }
        (0..self.rows / size)
            .map(|b| self.slice_rows(b * size, (b + 1) * size))
            .collect()
    }

    pub fn vstack(parts: &[Matrix]) -> Result<Matrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("nothing to stack".into()))?;
        if let Some(bad) = parts.iter().find(|m| m.cols != first.cols) {
            return Err(Error::Shape(format!(
                "cannot stack {} columns onto {}",
                bad.cols, first.cols
            )));
        }
        let data: Vec<Code> = parts.iter().flat_map(|m| m.data.iter().copied()).collect();
        Matrix::new(data.len() / first.cols, first.cols, data)
    }

    /// Columns placed side by side.
    pub fn hstack(parts: &[Matrix]) -> Result<Matrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("nothing to stack".into()))?;
        if let Some(bad) = parts.iter().find(|m| m.rows != first.rows) {
            return Err(Error::Shape(format!(
                "cannot place {} rows beside {}",
                bad.rows, first.rows
            )));
        }
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut data = Vec::with_capacity(first.rows * cols);
        for r in 0..first.rows {
            for m in parts {
                data.extend_from_slice(m.row(r));
            }
        }
        Matrix::new(first.rows, cols, data)
    }

    pub fn map(&self, f: impl Fn(Code) -> Code) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.get(r, c)));
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn max_code(&self) -> Code {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in self.row_iter() {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert!(Matrix::from_rows(&[]).is_err());
        assert!(Matrix::from_rows(&[vec![]]).is_err());
        assert!(Matrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
        let m = Matrix::from_rows(&[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        assert_eq!(m.col(1), vec![2, 4, 6]);
        assert_eq!(m.transpose().row(0), &[1, 3, 5]);
        assert_eq!(
            m.slice_rows(1, 3).unwrap().to_rows(),
            vec![vec![3, 4], vec![5, 6]]
        );
        assert!(m.row_blocks(2).is_err());
        let s = Matrix::vstack(&[m.clone(), m.clone()]).unwrap();
        assert_eq!(s.rows(), 6);
        assert_eq!(s.row_blocks(3).unwrap()[1], m);
        let h = Matrix::hstack(&[m.clone(), m.clone()]).unwrap();
        assert_eq!(h.row(2), &[5, 6, 5, 6]);
        assert!(Matrix::hstack(&[m, s]).is_err());
    }
}
