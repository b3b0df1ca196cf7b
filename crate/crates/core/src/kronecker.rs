//! Kronecker sums over an additive group.
//!
//! `A ⊕ B` stacks the blocks `a_ij J + B`: row `i·u + k`, column `j·c + l`
//! holds `a_ij + b_kl`, so rows of `A` vary slowest. The column-wise sum
//! `A ⊕_c B` requires equal column counts and pairs column `j` of `A` with
//! column `j` of `B`.

use crate::error::{Error, Result};
use crate::groups::{AdditiveGroup, Code};
use crate::matrix::Matrix;

fn check_codes<G: AdditiveGroup + ?Sized>(group: &G, m: &Matrix, name: &str) -> Result<()> {
    match m.data().iter().find(|&&c| !group.contains(c)) {
        Some(c) => Err(Error::GroupMismatch(format!(
            "{name} holds code {c}, outside a group of order {}",
            group.order()
        ))),
        None => Ok(()),
    }
}

/// `A ⊕ B = (a_ij J + B)`.
pub fn kron_sum<G: AdditiveGroup + ?Sized>(group: &G, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    check_codes(group, a, "left operand")?;
    check_codes(group, b, "right operand")?;
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut data = Vec::with_capacity(rows * cols);
    for ar in a.row_iter() {
        for br in b.row_iter() {
            for &x in ar {
                data.extend(br.iter().map(|&y| group.add(x, y)));
            }
        }
    }
    Matrix::new(rows, cols, data)
}

/// Column-wise Kronecker sum: row `i·u + k`, column `j` holds `a_ij + b_kj`.
pub fn col_kron_sum<G: AdditiveGroup + ?Sized>(
    group: &G,
    a: &Matrix,
    b: &Matrix,
) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "column-wise sum needs equal column counts, got {} and {}",
            a.cols(),
            b.cols()
        )));
    }
    check_codes(group, a, "left operand")?;
    check_codes(group, b, "right operand")?;
    let mut data: Vec<Code> = Vec::with_capacity(a.rows() * b.rows() * a.cols());
    for ar in a.row_iter() {
        for br in b.row_iter() {
            data.extend(ar.iter().zip(br).map(|(&x, &y)| group.add(x, y)));
        }
    }
    Matrix::new(a.rows() * b.rows(), a.cols(), data)
}

/// `V_1 ⊕ V_2 ⊕ ...` of column vectors.
pub fn kron_sum_all<G: AdditiveGroup + ?Sized>(group: &G, parts: &[Matrix]) -> Result<Matrix> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::Shape("empty Kronecker sum".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, m| kron_sum(group, &acc, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupChain;

    fn chain() -> GroupChain {
        GroupChain::field_tower(2, &[1, 2, 3], None).unwrap()
    }

    fn col(c: &GroupChain, texts: &[&str]) -> Matrix {
        Matrix::column(
            &texts
                .iter()
                .map(|t| c.parse(t).unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn show(c: &GroupChain, m: &Matrix) -> Vec<String> {
        m.data().iter().map(|&x| c.format(x)).collect()
    }

    #[test]
    fn vector_sums() {
        let c = chain();
        let s = kron_sum(&c, &col(&c, &["0", "1"]), &col(&c, &["0", "x"])).unwrap();
        assert_eq!(show(&c, &s), ["0", "x", "1", "x+1"]);
        let s = kron_sum(&c, &col(&c, &["0", "x"]), &col(&c, &["0", "x^2"])).unwrap();
        assert_eq!(show(&c, &s), ["0", "x^2", "x", "x^2+x"]);
    }

    #[test]
    fn block_layout() {
        let g = crate::groups::Radix::new(vec![10]);
        let a = Matrix::from_rows(&[vec![0, 1], vec![2, 3]]).unwrap();
        let b = Matrix::from_rows(&[vec![0, 5]]).unwrap();
        let s = kron_sum(&g, &a, &b).unwrap();
        assert_eq!(s.to_rows(), vec![vec![0, 5, 1, 6], vec![2, 7, 3, 8]]);
        let b2 = Matrix::from_rows(&[vec![0, 0], vec![5, 5]]).unwrap();
        let s = col_kron_sum(&g, &a, &b2).unwrap();
        assert_eq!(
            s.to_rows(),
            vec![vec![0, 1], vec![5, 6], vec![2, 3], vec![7, 8]]
        );
    }

    #[test]
    fn errors() {
        let c = chain();
        let a = Matrix::from_rows(&[vec![0, 9]]).unwrap();
        let b = Matrix::from_rows(&[vec![0, 1]]).unwrap();
        assert!(matches!(kron_sum(&c, &a, &b), Err(Error::GroupMismatch(_))));
        let b3 = Matrix::from_rows(&[vec![0, 1, 1]]).unwrap();
        assert!(matches!(col_kron_sum(&c, &b, &b3), Err(Error::Shape(_))));
        assert!(kron_sum_all(&c, &[]).is_err());
    }
}
