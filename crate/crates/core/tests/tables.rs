mod common;

use common::*;
use nestfill::arrays::{construct_ndm_kron, construct_noa_rh, construct_soa_kron, project_matrix};
use nestfill::spacefill::{
    build_ssfd_grouped, check_strata, compose_qual_quant, relabel_grouped, relabel_nested,
    relabel_sliced, NestedPermutation, SlicedPermutation, Stratum,
};
use nestfill::verify::{
    check_difference_matrix, check_latin_hypercube, check_oa_strength, check_sliced,
};
use nestfill::{Code, Matrix};

const LAYERS: [usize; 3] = [2, 4, 8];

fn nested_perms() -> Vec<NestedPermutation> {
    NESTED_PERMS
        .iter()
        .map(|p| NestedPermutation::new(p.to_vec(), &LAYERS).unwrap())
        .collect()
}

fn sliced_perms() -> Vec<SlicedPermutation> {
    SLICED_PERMS
        .iter()
        .map(|p| SlicedPermutation::new(p.to_vec(), &LAYERS).unwrap())
        .collect()
}

#[test]
fn binary_three_layer_noa_matches_fixture() {
    let chain = binary_chain();
    let out = construct_noa_rh(&chain, 2, None).unwrap();
    assert_eq!(
        *out.top(),
        text_fixture(&chain, "binary_three_layer_noa.txt")
    );
    assert_eq!(out.nested.layer_prefixes(), Some(vec![4, 16, 64]));
}

#[test]
fn binary_family_projections_and_slices() {
    let chain = binary_chain();
    let out = construct_noa_rh(&chain, 2, None).unwrap();
    for i in 1..=3 {
        let a_i = out.top().slice_rows(0, 4usize.pow(i as u32)).unwrap();
        for j in 1..=i {
            let projected = project_matrix(&chain, j, &a_i).unwrap();
            assert!(
                check_oa_strength(&projected, 1 << j, 2).passed,
                "ρ_{j}(A_{i})"
            );
        }
    }
    for i in 1..=2 {
        for j in 1..=i {
            let r = check_sliced(
                out.top(),
                4usize.pow(i as u32),
                chain.projection_table(j),
                1 << j,
                2,
            );
            assert!(r.passed, "slices of layer {i} under ρ_{j}: {r}");
        }
    }
}

#[test]
fn sliced_kronecker_sum_over_z6_z2() {
    let chain = z6_z2();
    let a1 = text_fixture(&chain, "omega_a1.txt");
    let a2 = text_fixture(&chain, "omega_a2.txt");
    assert!(check_oa_strength(&a1, 6, 2).passed);
    let out = construct_soa_kron(&chain, &a2, &a1, 2).unwrap();
    assert_eq!(out.b.rows(), 144);
    assert!(check_oa_strength(&out.b, 12, 2).passed);
    for slice in out.b.row_blocks(36).unwrap() {
        let projected = project_matrix(&chain, 1, &slice).unwrap();
        assert!(check_oa_strength(&projected, 6, 2).passed);
    }
    assert_eq!(out.prefixes.len(), 3);
    assert!(out.prefixes.iter().all(|p| p.verify().passed));
}

#[test]
fn omega_ndm_matches_fixture() {
    let chain = gf4_z3_z2();
    let dms = [text(&chain, D1), text(&chain, D2), text(&chain, D3)];
    let out = construct_ndm_kron(&chain, &dms).unwrap();
    let e3 = out.top();
    assert_eq!(*e3, text_fixture(&chain, "omega_ndm_e3.txt"));
    let row5: Vec<String> = e3.row(4).iter().map(|&c| chain.format(c)).collect();
    assert_eq!(row5, ["0", "w", "2w"]);

    let e2 = e3.slice_rows(0, 12).unwrap();
    let copies = Matrix::vstack(&[e2.clone(), e2.clone(), e2.clone(), e2]).unwrap();
    assert_eq!(project_matrix(&chain, 2, e3).unwrap(), copies);

    let radices = chain.radix().radices().to_vec();
    for (i, size) in [(1, 4), (2, 12)] {
        for block in e3.row_blocks(size).unwrap() {
            for j in 1..=i {
                let projected = project_matrix(&chain, j, &block).unwrap();
                let group: Vec<Code> = chain.members(j);
                assert!(check_difference_matrix(&projected, &radices, &group).passed);
            }
        }
    }
}

#[test]
fn nested_relabel_matches_fixture() {
    let chain = binary_chain();
    let a3 = text_fixture(&chain, "binary_three_layer_noa.txt");
    let m3 = relabel_nested(&chain, &a3, &nested_perms()).unwrap();
    assert_eq!(m3, int_fixture("nested_relabel.txt"));
    assert_eq!(m3.row(0), &[4, 5, 2]);
    assert_eq!(m3.row(32), &[6, 5, 3]);
}

#[test]
fn published_nested_lh_is_consistent() {
    let l3 = int_fixture("nested_lh.txt");
    let m3 = int_fixture("nested_relabel.txt");
    assert!(check_latin_hypercube(&l3).passed);
    assert_eq!(l3.map(|v| v / 8), m3);
    let strata: Vec<Stratum> = [(4, 2), (16, 4), (64, 8)]
        .into_iter()
        .map(|(rows, grid)| Stratum {
            rows,
            grid,
            prefix_only: true,
        })
        .collect();
    assert!(check_strata(&l3, 64, &strata).passed);
}

#[test]
fn sliced_relabel_matches_fixture() {
    let chain = binary_chain();
    let a3 = text_fixture(&chain, "binary_three_layer_noa.txt");
    let m = relabel_sliced(&chain, &a3, &sliced_perms()).unwrap();
    assert_eq!(m, int_fixture("sliced_relabel.txt"));
    assert_eq!(m.row(0), &[0, 7, 0]);
    assert_eq!(m.row(40), &[3, 7, 2]);
}

#[test]
fn published_mixed_design_is_consistent() {
    let mixed = int_fixture("mixed_design.txt");
    let qual = int_fixture("qualitative_oa.txt");
    let cols = |range: std::ops::Range<usize>| {
        let rows: Vec<Vec<u32>> = mixed
            .row_iter()
            .map(|r| r[range.clone()].to_vec())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    };
    let s = cols(0..3);
    assert!(check_latin_hypercube(&s).passed);
    assert_eq!(s.map(|v| v / 8), int_fixture("sliced_relabel.txt"));
    let strata = [
        Stratum {
            rows: 4,
            grid: 2,
            prefix_only: false,
        },
        Stratum {
            rows: 16,
            grid: 2,
            prefix_only: false,
        },
        Stratum {
            rows: 16,
            grid: 4,
            prefix_only: false,
        },
        Stratum {
            rows: 64,
            grid: 8,
            prefix_only: false,
        },
    ];
    assert!(check_strata(&s, 64, &strata).passed);
    assert_eq!(compose_qual_quant(&s, 4, &qual).unwrap(), mixed);
    for r in 0..4 {
        assert_eq!(&mixed.row(r)[3..], &[0, 0, 0, 0, 0, 0]);
    }
    for r in 60..64 {
        assert_eq!(&mixed.row(r)[3..], &[1, 1, 0, 3, 3, 0]);
    }
}

#[test]
fn grouped_relabeling_by_first_layer() {
    let chain = binary_chain();
    let out = construct_noa_rh(&chain, 2, None).unwrap();
    // Φ^1_0 = {0, x, x^2, x^2+x} goes to 0..3, Φ^1_1 to 4..7.
    let probe = Matrix::column(&(0..8).collect::<Vec<_>>()).unwrap();
    let m = relabel_grouped(&chain, &probe, 1, None).unwrap();
    for code in 0..8u32 {
        let label = m.get(code as usize, 0);
        assert_eq!(label / 4, code % 2, "code {code}");
    }
    let soa = out
        .sliced
        .iter()
        .find(|s| s.slice_size == 4 && s.projection_layer == 1)
        .unwrap();
    let design = build_ssfd_grouped(soa, None, 3).unwrap();
    assert!(
        check_strata(
            &design.design,
            64,
            &[Stratum {
                rows: 4,
                grid: 2,
                prefix_only: false
            }]
        )
        .passed
    );
}

#[test]
fn grouped_relabeling_with_both_slicings() {
    let chain = binary_chain();
    let out = construct_noa_rh(&chain, 2, None).unwrap();
    let x = chain.parse("x").unwrap();
    let order = [0, x, 1, x + 1];
    let soa = out
        .sliced
        .iter()
        .find(|s| s.slice_size == 16 && s.projection_layer == 2)
        .unwrap();
    let design = build_ssfd_grouped(soa, Some(&order), 7).unwrap();
    let strata = [
        Stratum {
            rows: 4,
            grid: 2,
            prefix_only: false,
        },
        Stratum {
            rows: 16,
            grid: 4,
            prefix_only: false,
        },
        Stratum {
            rows: 64,
            grid: 8,
            prefix_only: false,
        },
    ];
    assert!(check_strata(&design.design, 64, &strata).passed);
}
