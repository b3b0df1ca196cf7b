#![allow(dead_code)]

use nestfill::format::parse_text_matrix;
use nestfill::{BaseGroup, Field, GroupChain, Matrix};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn int_fixture(name: &str) -> Matrix {
    let rows: Vec<Vec<u32>> = fixture(name)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|c| c.parse().unwrap()).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn text_fixture(chain: &GroupChain, name: &str) -> Matrix {
    parse_text_matrix(chain, &fixture(name)).unwrap()
}

pub fn text(chain: &GroupChain, rows: &str) -> Matrix {
    parse_text_matrix(chain, rows).unwrap()
}

pub fn binary_chain() -> GroupChain {
    GroupChain::field_tower(2, &[1, 2, 3], None).unwrap()
}

pub fn z6_z2() -> GroupChain {
    GroupChain::omega_ring(vec![BaseGroup::Cyclic(6), BaseGroup::Cyclic(2)]).unwrap()
}

pub fn gf4_z3_z2() -> GroupChain {
    GroupChain::omega_ring(vec![
        BaseGroup::Field(Field::new(2, 2, None).unwrap()),
        BaseGroup::Cyclic(3),
        BaseGroup::Cyclic(2),
    ])
    .unwrap()
}

pub const D1: &str = "0 0 0\n0 1 x\n0 x x+1\n0 x+1 1\n";
pub const D2: &str = "0 0 0\n0 w 2w\n0 2w w\n";
pub const D3: &str = "0 0 0\n0 0 w^2\n0 w^2 0\n0 w^2 w^2\n";

pub const NESTED_PERMS: [[u32; 8]; 3] = [
    [4, 1, 2, 7, 6, 5, 3, 0],
    [5, 2, 0, 7, 3, 4, 1, 6],
    [2, 6, 1, 4, 3, 5, 7, 0],
];

pub const SLICED_PERMS: [[u32; 8]; 3] = [
    [0, 1, 2, 3, 7, 6, 5, 4],
    [7, 6, 5, 4, 1, 0, 2, 3],
    [0, 1, 3, 2, 4, 5, 7, 6],
];
