//! Column-wise Kronecker-sum constructions over a group tower whose
//! transversals `T_i = Ω_i` carry the input arrays.
//!
//! `B_i = A_i ⊕_c B_{i-1}` with `B_1 = A_1`. Since `A_i` varies slowest, the
//! blocks of `B_i` are shifts of `B_{i-1}`; when the first row of `A_i` is
//! zero the first block is `B_{i-1}` itself and the family is nested by row
//! prefixes.

use crate::error::{Error, Result};
use crate::groups::{Code, GroupChain};
use crate::kronecker::col_kron_sum;
use crate::matrix::Matrix;
use crate::verify::{self, VerificationReport};

use super::{ArrayKind, Construction, NestedArray, SlicedArray};

fn check_inputs(chain: &GroupChain, arrays: &[Matrix]) -> Result<()> {
    if arrays.len() != chain.layers() {
        return Err(Error::Shape(format!(
            "{} input arrays for a tower with {} layers",
            arrays.len(),
            chain.layers()
        )));
    }
    let m = arrays[0].cols();
    for (i, a) in arrays.iter().enumerate() {
        if a.cols() != m {
            return Err(Error::Shape(format!(
                "array {} has {} columns, expected {m}",
                i + 1,
                a.cols()
            )));
        }
        let t = chain.transversal(i + 1);
        if let Some(&c) = a.data().iter().find(|c| !t.contains(c)) {
            return Err(Error::GroupMismatch(format!(
                "array {} holds {}, which is not in Ω_{}",
                i + 1,
                chain.format(c),
                i + 1
            )));
        }
    }
    Ok(())
}

fn require_zero_first_rows(arrays: &[Matrix]) -> Result<()> {
    match arrays
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| a.row(0).iter().any(|&c| c != 0))
    {
        Some((i, _)) => Err(Error::Precondition(format!(
            "the first row of array {} must be zero so that each B_i starts with B_(i-1)",
            i + 1
        ))),
        None => Ok(()),
    }
}

fn precondition(label: &str, r: VerificationReport) -> Result<()> {
    if r.passed {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{label}: {r}")))
    }
}

/// `B_1, ..., B_I` for `B_i = A_i ⊕_c B_{i-1}`.
fn stack(chain: &GroupChain, arrays: &[Matrix]) -> Result<Vec<Matrix>> {
    let mut out = vec![arrays[0].clone()];
    for a in &arrays[1..] {
        let next = col_kron_sum(chain, a, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

fn sliced_family(
    chain: &GroupChain,
    family: &[Matrix],
    kind: ArrayKind,
    strength: usize,
) -> Vec<SlicedArray> {
    let top = family.last().unwrap();
    let mut sliced = Vec::new();
    for i in 1..family.len() {
        for j in 1..=i {
            sliced.push(SlicedArray {
                chain: chain.clone(),
                top: top.clone(),
                slice_size: family[i - 1].rows(),
                projection_layer: j,
                kind,
                strength,
            });
        }
    }
    sliced
}

/// The two-layer result: `B` sliced into `B_1, ..., B_{n_2}` and the prefix
/// families `(B^l, B; ρ_1, ρ_2)`.
#[derive(Clone, Debug)]
pub struct KronSoa {
    pub b: Matrix,
    pub sliced: SlicedArray,
    pub prefixes: Vec<NestedArray>,
}

impl KronSoa {
    pub fn verify(&self) -> VerificationReport {
        let s = self.sliced.chain.layer_order(2);
        let r = verify::check_oa_strength(&self.b, s, self.sliced.strength);
        if !r.passed {
            return r;
        }
        let r = self.sliced.verify();
        if !r.passed {
            return r;
        }
        for p in &self.prefixes {
            let r = p.verify();
            if !r.passed {
                return r;
            }
        }
        VerificationReport::pass("sliced Kronecker-sum array")
    }
}

/// `B = A_2 ⊕_c A_1` for `A_i` an `OA(n_i, m, s_i, t)` over `Ω_i`.
pub fn construct_soa_kron(
    chain: &GroupChain,
    a2: &Matrix,
    a1: &Matrix,
    t: usize,
) -> Result<KronSoa> {
    if chain.layers() != 2 {
        return Err(Error::InvalidChain(format!(
            "a sliced Kronecker sum needs two layers, got {}",
            chain.layers()
        )));
    }
    let inputs = [a1.clone(), a2.clone()];
    check_inputs(chain, &inputs)?;
    for (i, a) in inputs.iter().enumerate() {
        precondition(
            &format!("array {}", i + 1),
            verify::check_oa_strength(a, chain.transversal(i + 1).len(), t),
        )?;
    }
    let b = col_kron_sum(chain, a2, a1)?;
    let n1 = a1.rows();
    let prefixes = (1..a2.rows())
        .map(|l| {
            Ok(NestedArray {
                chain: chain.clone(),
                layers: vec![b.slice_rows(0, l * n1)?, b.clone()],
                projection_layers: vec![1, 2],
                kind: ArrayKind::Oa,
                strength: t,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = KronSoa {
        sliced: SlicedArray {
            chain: chain.clone(),
            top: b.clone(),
            slice_size: n1,
            projection_layer: 1,
            kind: ArrayKind::Oa,
            strength: t,
        },
        b,
        prefixes,
    };
    out.verify().into_result()?;
    Ok(out)
}

/// `B_i = A_i ⊕_c ... ⊕_c A_1`: an NOA with `I` layers and slices
/// `Γ^i_l` of `n_1 ... n_i` rows.
pub fn construct_noa_kron_multi(
    chain: &GroupChain,
    arrays: &[Matrix],
    t: usize,
) -> Result<Construction> {
    check_inputs(chain, arrays)?;
    for (i, a) in arrays.iter().enumerate() {
        precondition(
            &format!("array {}", i + 1),
            verify::check_oa_strength(a, chain.transversal(i + 1).len(), t),
        )?;
    }
    require_zero_first_rows(arrays)?;
    let family = stack(chain, arrays)?;
    let out = Construction {
        sliced: sliced_family(chain, &family, ArrayKind::Oa, t),
        nested: NestedArray::new(chain, family, ArrayKind::Oa, t),
    };
    out.verify().into_result()?;
    Ok(out)
}

/// `E_i = D_i ⊕_c ... ⊕_c D_1` for difference matrices `D_i` over `Ω_i`:
/// an NDM with `I` layers and slices `Δ^i_l` of `r_1 ... r_i` rows.
pub fn construct_ndm_kron(chain: &GroupChain, dms: &[Matrix]) -> Result<Construction> {
    check_inputs(chain, dms)?;
    let radices = chain.radix().radices();
    for (i, d) in dms.iter().enumerate() {
        let group: Vec<Code> = chain.transversal(i + 1).to_vec();
        precondition(
            &format!("matrix {}", i + 1),
            verify::check_difference_matrix(d, radices, &group),
        )?;
    }
    require_zero_first_rows(dms)?;
    let family = stack(chain, dms)?;
    let out = Construction {
        sliced: sliced_family(chain, &family, ArrayKind::Dm, 2),
        nested: NestedArray::new(chain, family, ArrayKind::Dm, 2),
    };
    out.verify().into_result()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::BaseGroup;

    fn z2z2() -> GroupChain {
        GroupChain::omega_ring(vec![BaseGroup::Cyclic(2), BaseGroup::Cyclic(2)]).unwrap()
    }

    fn oa4(chain: &GroupChain, layer: usize) -> Matrix {
        let w = chain.transversal(layer)[1];
        Matrix::from_rows(&[vec![0, 0, 0], vec![0, w, w], vec![w, 0, w], vec![w, w, 0]]).unwrap()
    }

    #[test]
    fn two_binary_layers() {
        let c = z2z2();
        let out = construct_noa_kron_multi(&c, &[oa4(&c, 1), oa4(&c, 2)], 2).unwrap();
        assert!(verify::check_oa_strength(out.top(), 4, 2).passed);
        assert_eq!(out.nested.layer_prefixes(), Some(vec![4, 16]));
        assert_eq!(out.sliced.len(), 1);
        let soa = construct_soa_kron(&c, &oa4(&c, 2), &oa4(&c, 1), 2).unwrap();
        assert_eq!(soa.b, *out.top());
        assert_eq!(soa.prefixes.len(), 3);
    }

    #[test]
    fn single_layer_and_degenerate() {
        let c = GroupChain::omega_ring(vec![BaseGroup::Cyclic(2)]).unwrap();
        let a = oa4(&c, 1);
        let out = construct_noa_kron_multi(&c, std::slice::from_ref(&a), 2).unwrap();
        assert_eq!(*out.top(), a);
        let d = Matrix::from_rows(&[vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(
            *construct_ndm_kron(&c, std::slice::from_ref(&d))
                .unwrap()
                .top(),
            d
        );

        // One run in the outer array shifts the inner one.
        let c = z2z2();
        let row = Matrix::from_rows(&[vec![2, 2, 2]]).unwrap();
        let a1 = oa4(&c, 1);
        let b = col_kron_sum(&c, &row, &a1).unwrap();
        assert_eq!(b.row(1), &[2, 3, 3]);
    }

    #[test]
    fn rejections() {
        let c = z2z2();
        let a1 = oa4(&c, 1);
        assert!(matches!(
            construct_noa_kron_multi(&c, &[a1.clone(), a1.clone()], 2),
            Err(Error::GroupMismatch(_))
        ));
        let w = c.transversal(2)[1];
        let shifted =
            Matrix::from_rows(&[vec![w, w, 0], vec![0, 0, 0], vec![0, w, w], vec![w, 0, w]])
                .unwrap();
        assert!(matches!(
            construct_noa_kron_multi(&c, &[a1.clone(), shifted.clone()], 2),
            Err(Error::Precondition(_))
        ));
        // Without a zero first row the prefix families still hold.
        assert!(construct_soa_kron(&c, &shifted, &a1, 2).is_ok());
        let narrow = Matrix::from_rows(&[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert!(matches!(
            construct_noa_kron_multi(&c, &[narrow, oa4(&c, 2)], 2),
            Err(Error::Shape(_))
        ));
        let weak = Matrix::from_rows(&[vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        assert!(matches!(
            construct_noa_kron_multi(&c, &[weak, oa4(&c, 2)], 2),
            Err(Error::Precondition(_))
        ));
    }
}
