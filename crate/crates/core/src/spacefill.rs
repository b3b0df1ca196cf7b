//! Space-filling designs lifted from nested and sliced arrays.
//!
//! A design is produced in two stages. Relabeling maps the group elements of
//! each column onto `0..s_I` through a nested or sliced permutation (or a
//! grouping by `ρ_j`); lifting then expands every level `r` into the block
//! `r q .. (r+1) q` of an OA-based Latin hypercube. The relabeled matrices
//! are deterministic, the lifted ones depend only on the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrays::{NestedArray, SlicedArray};
use crate::error::{Error, Result};
use crate::groups::{Code, GroupChain, Nesting};
use crate::matrix::Matrix;
use crate::verify::{self, VerificationReport};

/// Independent RNG stream for one column.
pub fn column_rng(seed: u64, column: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(column as u64);
    rng
}

fn check_layer_sizes(layers: &[usize]) -> Result<usize> {
    let top = *layers
        .last()
        .ok_or_else(|| Error::Permutation("no layer sizes".into()))?;
    if layers[0] == 0 || layers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Permutation(format!(
            "layer sizes {layers:?} must be positive and strictly increasing"
        )));
    }
    if let Some(s) = layers.iter().find(|&&s| top % s != 0) {
        return Err(Error::Permutation(format!(
            "layer size {s} does not divide {top}"
        )));
    }
    Ok(top)
}

fn is_permutation(values: &[u32]) -> bool {
    let mut seen = vec![false; values.len()];
    values.iter().all(|&v| {
        let v = v as usize;
        v < seen.len() && !std::mem::replace(&mut seen[v], true)
    })
}

/// A permutation of `0..s_I` whose first `s_i` entries hit each of the `s_i`
/// blocks of size `s_I / s_i` exactly once, for every layer `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedPermutation {
    values: Vec<u32>,
    layers: Vec<usize>,
}

impl NestedPermutation {
    pub fn new(values: Vec<u32>, layers: &[usize]) -> Result<Self> {
        if !Self::is_valid(&values, layers) {
            return Err(Error::Permutation(format!(
                "{values:?} is not a nested permutation for layers {layers:?}"
            )));
        }
        Ok(NestedPermutation {
            values,
            layers: layers.to_vec(),
        })
    }

    pub fn is_valid(values: &[u32], layers: &[usize]) -> bool {
        let Ok(top) = check_layer_sizes(layers) else {
            return false;
        };
        if values.len() != top || !is_permutation(values) {
            return false;
        }
        layers.iter().all(|&s| {
            let width = top / s;
            let mut hit = vec![false; s];
            values[..s]
                .iter()
                .all(|&v| !std::mem::replace(&mut hit[v as usize / width], true))
        })
    }

    /// Sequential greedy draw: position `t` takes a value from an unused
    /// block of the coarsest layer that still constrains `t`.
    pub fn generate<R: Rng>(layers: &[usize], rng: &mut R) -> Result<Self> {
        let top = check_layer_sizes(layers)?;
        let mut used = vec![false; top];
        let mut values = Vec::with_capacity(top);
        for t in 1..=top {
            let s = *layers.iter().find(|&&s| s >= t).unwrap();
            let width = top / s;
            let free: Vec<usize> = (0..s)
                .filter(|&b| (b * width..(b + 1) * width).all(|v| !used[v]))
                .collect();
            let block = free[rng.random_range(0..free.len())];
            let open: Vec<usize> = (block * width..(block + 1) * width)
                .filter(|&v| !used[v])
                .collect();
            let v = open[rng.random_range(0..open.len())];
            used[v] = true;
            values.push(v as u32);
        }
        Self::new(values, layers)
    }

    pub fn from_seed(layers: &[usize], seed: u64) -> Result<Self> {
        Self::generate(layers, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }
}

/// A permutation of `0..s_I` mapping each position block of size
/// `s_I / s_j` onto one aligned value block of the same size, for `j < I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicedPermutation {
    values: Vec<u32>,
    layers: Vec<usize>,
}

impl SlicedPermutation {
    pub fn new(values: Vec<u32>, layers: &[usize]) -> Result<Self> {
        if !Self::is_valid(&values, layers) {
            return Err(Error::Permutation(format!(
                "{values:?} is not a sliced permutation for layers {layers:?}"
            )));
        }
        Ok(SlicedPermutation {
            values,
            layers: layers.to_vec(),
        })
    }

    pub fn is_valid(values: &[u32], layers: &[usize]) -> bool {
        let Ok(top) = check_layer_sizes(layers) else {
            return false;
        };
        if values.len() != top || !is_permutation(values) {
            return false;
        }
        layers[..layers.len() - 1].iter().all(|&s| {
            let q = top / s;
            values.chunks(q).all(|chunk| {
                chunk
                    .iter()
                    .all(|&v| v as usize / q == chunk[0] as usize / q)
            })
        })
    }

    /// Independent shuffles of sub-blocks within each block, level by level.
    pub fn generate<R: Rng>(layers: &[usize], rng: &mut R) -> Result<Self> {
        let top = check_layer_sizes(layers)?;
        let mut values: Vec<u32> = (0..top as u32).collect();
        let mut parent = top;
        for &s in layers {
            let unit = top / s;
            for block in values.chunks_mut(parent) {
                let mut units: Vec<Vec<u32>> = block.chunks(unit).map(<[u32]>::to_vec).collect();
                units.shuffle(rng);
                for (dst, src) in block.chunks_mut(unit).zip(units) {
                    dst.copy_from_slice(&src);
                }
            }
            parent = unit;
        }
        Self::new(values, layers)
    }

    pub fn from_seed(layers: &[usize], seed: u64) -> Result<Self> {
        Self::generate(layers, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }
}

/// Replaces each column's codes through `label[column][code]`.
fn relabel_columns(a: &Matrix, labels: &[Vec<u32>]) -> Result<Matrix> {
    if labels.len() != a.cols() {
        return Err(Error::Shape(format!(
            "{} relabelings for {} columns",
            labels.len(),
            a.cols()
        )));
    }
    let mut data = Vec::with_capacity(a.data().len());
    for row in a.row_iter() {
        for (c, &code) in row.iter().enumerate() {
            let v = labels[c]
                .get(code as usize)
                .copied()
                .filter(|&v| v != u32::MAX)
                .ok_or(Error::NotInLayer { code, layer: 0 })?;
            data.push(v);
        }
    }
    Matrix::new(a.rows(), a.cols(), data)
}

fn enumeration_labels(order: &[Code], perm: &[u32]) -> Vec<u32> {
    let mut label = vec![u32::MAX; order.len()];
    for (r, &g) in order.iter().enumerate() {
        label[g as usize] = perm[r];
    }
    label
}

fn check_perm_layers(chain: &GroupChain, layers: &[usize], l: usize) -> Result<()> {
    if layers != chain.layer_orders() {
        return Err(Error::Permutation(format!(
            "permutation {} has layers {layers:?}, the tower has {:?}",
            l + 1,
            chain.layer_orders()
        )));
    }
    Ok(())
}

/// Column `l` relabeled by `Ṽ(r) → π^l(r)`, with `Ṽ` the outer-first
/// enumeration of `F_I`.
pub fn relabel_nested(
    chain: &GroupChain,
    a: &Matrix,
    perms: &[NestedPermutation],
) -> Result<Matrix> {
    let order = chain.enumerate_ordered(Nesting::OuterFirst);
    let labels = perms
        .iter()
        .enumerate()
        .map(|(l, p)| {
            check_perm_layers(chain, p.layers(), l)?;
            Ok(enumeration_labels(&order, p.values()))
        })
        .collect::<Result<Vec<_>>>()?;
    relabel_columns(a, &labels)
}

/// Column `l` relabeled by `V_{F_I}(r) → π^l(r)`, with `V_{F_I}` the
/// inner-first enumeration.
pub fn relabel_sliced(
    chain: &GroupChain,
    a: &Matrix,
    perms: &[SlicedPermutation],
) -> Result<Matrix> {
    let order = chain.enumerate_ordered(Nesting::InnerFirst);
    let labels = perms
        .iter()
        .enumerate()
        .map(|(l, p)| {
            check_perm_layers(chain, p.layers(), l)?;
            Ok(enumeration_labels(&order, p.values()))
        })
        .collect::<Result<Vec<_>>>()?;
    relabel_columns(a, &labels)
}

/// The groups `Φ^j_α = ρ_j^{-1}(α)` sent to consecutive blocks of size
/// `s_I / s_j`: the `g`-th group in `group_order` (default: ascending code of
/// `α`) takes `g q .. (g+1) q`, its members in ascending code.
pub fn relabel_grouped(
    chain: &GroupChain,
    a: &Matrix,
    j: usize,
    group_order: Option<&[Code]>,
) -> Result<Matrix> {
    chain.check_layer(j)?;
    let reps = chain.members(j);
    let order: Vec<Code> = match group_order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != reps {
                return Err(Error::Precondition(format!(
                    "group order must list each element of F_{j} exactly once"
                )));
            }
            o.to_vec()
        }
        None => reps,
    };
    let size = chain.layer_order(chain.layers());
    let q = size / chain.layer_order(j);
    let table = chain.projection_table(j);
    let mut label = vec![u32::MAX; size];
    for (g, &alpha) in order.iter().enumerate() {
        let members = (0..size as Code).filter(|&c| table[c as usize] == alpha);
        for (w, c) in members.enumerate() {
            label[c as usize] = (g * q + w) as u32;
        }
    }
    relabel_columns(a, &vec![label; a.cols()])
}

/// OA-based Latin hypercube: in each column the `q = n / s` occurrences of
/// level `r`, in row order, receive a random arrangement of `r q .. (r+1) q`.
pub fn oa_based_lh(m: &Matrix, s: usize, seed: u64) -> Result<Matrix> {
    let n = m.rows();
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::Shape(format!(
            "{n} runs cannot be split over {s} levels"
        )));
    }
    let q = n / s;
    let mut cols = Vec::with_capacity(m.cols());
    for c in 0..m.cols() {
        let col = m.col(c);
        let mut counts = vec![0usize; s];
        for &v in &col {
            if v as usize >= s {
                return Err(Error::Shape(format!(
                    "column {} holds level {v} outside 0..{s}",
                    c + 1
                )));
            }
            counts[v as usize] += 1;
        }
        if let Some(r) = counts.iter().position(|&k| k != q) {
            return Err(Error::Shape(format!(
                "column {} has level {r} {} times, expected {q}",
                c + 1,
                counts[r]
            )));
        }
        let mut rng = column_rng(seed, c);
        let mut pools: Vec<Vec<u32>> = (0..s)
            .map(|r| {
                let mut block: Vec<u32> = ((r * q) as u32..((r + 1) * q) as u32).collect();
                block.shuffle(&mut rng);
                block
            })
            .collect();
        cols.push(
            col.iter()
                .map(|&v| pools[v as usize].pop().unwrap())
                .collect::<Vec<u32>>(),
        );
    }
    let data: Vec<u32> = cols.concat();
    Ok(Matrix::new(m.cols(), n, data)?.transpose())
}

/// A lifted design together with the row partitions it is claimed to
/// stratify: each `(rows, g)` asks every block of `rows` consecutive rows to
/// stratify the `g × g` grids.
#[derive(Clone, Debug)]
pub struct LiftedDesign {
    pub relabeled: Matrix,
    pub design: Matrix,
    pub levels: usize,
    pub strata: Vec<Stratum>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub rows: usize,
    pub grid: usize,
    /// Only the leading block is claimed (nested layers) instead of every block.
    #[serde(default)]
    pub prefix_only: bool,
}

impl LiftedDesign {
    pub fn verify(&self) -> VerificationReport {
        let lh = verify::check_latin_hypercube(&self.design);
        if !lh.passed {
            return lh;
        }
        let q = self.design.rows() / self.levels;
        if self.design.map(|v| v / q as u32) != self.relabeled {
            return VerificationReport::structural(
                "lifted design",
                "floor(L / q) differs from the relabeled design",
            );
        }
        check_strata(&self.design, self.design.rows(), &self.strata)
    }
}

/// Every stratum claim on a design whose entries lie in `0..range`.
pub fn check_strata(design: &Matrix, range: usize, strata: &[Stratum]) -> VerificationReport {
    let n = design.rows();
    for s in strata {
        if s.rows == 0 || !n.is_multiple_of(s.rows) {
            return VerificationReport::structural(
                "stratification",
                format!("blocks of {} rows do not tile {n} rows", s.rows),
            );
        }
        let blocks = if s.prefix_only { 1 } else { n / s.rows };
        for b in 0..blocks {
            let part = design
                .slice_rows(b * s.rows, (b + 1) * s.rows)
                .expect("block in range");
            let mut r = verify::check_stratification(&part, range, s.grid);
            if !r.passed {
                r.check = format!("rows {}..{}: {}", b * s.rows + 1, (b + 1) * s.rows, r.check);
                return r;
            }
        }
    }
    VerificationReport::pass(format!("stratification on {} partitions", strata.len()))
}

fn lift(relabeled: Matrix, levels: usize, strata: Vec<Stratum>, seed: u64) -> Result<LiftedDesign> {
    let design = oa_based_lh(&relabeled, levels, seed)?;
    let out = LiftedDesign {
        relabeled,
        design,
        levels,
        strata,
        seed,
    };
    out.verify().into_result()?;
    Ok(out)
}

fn prefix_sizes(noa: &NestedArray) -> Result<Vec<usize>> {
    noa.layer_prefixes().ok_or_else(|| {
        Error::Precondition("the layers must be row prefixes of the top array".into())
    })
}

/// Nested space-filling design: `L_i` (the first `|A_i|` rows) stratifies
/// the `s_i × s_i` grids.
pub fn build_nsfd(
    noa: &NestedArray,
    perms: &[NestedPermutation],
    seed: u64,
) -> Result<LiftedDesign> {
    let prefixes = prefix_sizes(noa)?;
    let relabeled = relabel_nested(&noa.chain, noa.top(), perms)?;
    let strata = prefixes
        .iter()
        .zip(noa.chain.layer_orders())
        .map(|(&rows, &grid)| Stratum {
            rows,
            grid,
            prefix_only: true,
        })
        .collect();
    lift(
        relabeled,
        noa.chain.layer_order(noa.chain.layers()),
        strata,
        seed,
    )
}

/// Sliced design for one partition: slices of `soa.slice_size` rows
/// stratify the `s_j × s_j` grids, the whole design the `s_I × s_I` grids.
pub fn build_ssfd_grouped(
    soa: &SlicedArray,
    group_order: Option<&[Code]>,
    seed: u64,
) -> Result<LiftedDesign> {
    let chain = &soa.chain;
    let top = chain.layer_order(chain.layers());
    let relabeled = relabel_grouped(chain, &soa.top, soa.projection_layer, group_order)?;
    let strata = vec![
        Stratum {
            rows: soa.slice_size,
            grid: soa.levels(),
            prefix_only: false,
        },
        Stratum {
            rows: soa.top.rows(),
            grid: top,
            prefix_only: false,
        },
    ];
    lift(relabeled, top, strata, seed)
}

/// Sliced design for every partition at once: for each `i < I` the blocks of
/// `|A_i|` rows stratify the `s_j × s_j` grids for all `j ≤ i`.
pub fn build_ssfd_multi(
    noa: &NestedArray,
    perms: &[SlicedPermutation],
    seed: u64,
) -> Result<LiftedDesign> {
    let prefixes = prefix_sizes(noa)?;
    let chain = &noa.chain;
    let relabeled = relabel_sliced(chain, noa.top(), perms)?;
    let mut strata = Vec::new();
    for (i, &rows) in prefixes.iter().enumerate() {
        for &grid in &chain.layer_orders()[..=i] {
            strata.push(Stratum {
                rows,
                grid,
                prefix_only: false,
            });
        }
    }
    lift(relabeled, chain.layer_order(chain.layers()), strata, seed)
}

/// Appends qualitative row `l` to every run of slice `l`.
pub fn compose_qual_quant(design: &Matrix, slice_size: usize, qual: &Matrix) -> Result<Matrix> {
    if slice_size == 0 || !design.rows().is_multiple_of(slice_size) {
        return Err(Error::Shape(format!(
            "{} runs do not split into slices of {slice_size}",
            design.rows()
        )));
    }
    let slices = design.rows() / slice_size;
    if slices != qual.rows() {
        return Err(Error::Shape(format!(
            "{slices} slices but {} qualitative runs",
            qual.rows()
        )));
    }
    let mut rows = Vec::with_capacity(design.rows());
    for (r, run) in design.row_iter().enumerate() {
        let mut row = run.to_vec();
        row.extend_from_slice(qual.row(r / slice_size));
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::construct_noa_rh;

    const LAYERS: [usize; 3] = [2, 4, 8];

    #[test]
    fn nested_permutation_examples() {
        assert!(NestedPermutation::is_valid(
            &[4, 1, 2, 7, 6, 5, 3, 0],
            &LAYERS
        ));
        assert!(NestedPermutation::is_valid(
            &[5, 2, 0, 7, 3, 4, 1, 6],
            &LAYERS
        ));
        assert!(NestedPermutation::is_valid(
            &[2, 6, 1, 4, 3, 5, 7, 0],
            &LAYERS
        ));
        assert!(!NestedPermutation::is_valid(
            &[0, 1, 2, 3, 4, 5, 6, 7],
            &LAYERS
        ));
        assert!(!NestedPermutation::is_valid(
            &[4, 1, 2, 7, 6, 5, 3, 3],
            &LAYERS
        ));
        assert!(!NestedPermutation::is_valid(&[4, 1, 2, 7], &LAYERS));
        assert!(NestedPermutation::new(vec![0, 1], &[3, 2]).is_err());
    }

    #[test]
    fn sliced_permutation_examples() {
        assert!(SlicedPermutation::is_valid(
            &[7, 6, 5, 4, 1, 0, 2, 3],
            &LAYERS
        ));
        assert!(SlicedPermutation::is_valid(
            &[0, 1, 2, 3, 7, 6, 5, 4],
            &LAYERS
        ));
        assert!(SlicedPermutation::is_valid(
            &[0, 1, 3, 2, 4, 5, 7, 6],
            &LAYERS
        ));
        assert!(SlicedPermutation::is_valid(
            &[0, 1, 2, 3, 4, 5, 6, 7],
            &LAYERS
        ));
        assert!(!SlicedPermutation::is_valid(
            &[4, 1, 2, 7, 6, 5, 3, 0],
            &LAYERS
        ));
    }

    #[test]
    fn generators_are_valid_and_seeded() {
        for seed in 0..200 {
            let p = NestedPermutation::from_seed(&LAYERS, seed).unwrap();
            assert!(NestedPermutation::is_valid(p.values(), &LAYERS));
            let p = SlicedPermutation::from_seed(&[3, 6, 36], seed).unwrap();
            assert!(SlicedPermutation::is_valid(p.values(), &[3, 6, 36]));
        }
        assert_eq!(
            NestedPermutation::from_seed(&LAYERS, 9).unwrap(),
            NestedPermutation::from_seed(&LAYERS, 9).unwrap()
        );
        assert_eq!(
            SlicedPermutation::from_seed(&LAYERS, 9).unwrap(),
            SlicedPermutation::from_seed(&LAYERS, 9).unwrap()
        );
    }

    #[test]
    fn lh_from_balanced_columns() {
        let m = Matrix::column(&[0, 1]).unwrap();
        assert_eq!(oa_based_lh(&m, 2, 3).unwrap(), m);
        let m = Matrix::from_rows(&[vec![0, 1], vec![1, 0], vec![0, 0], vec![1, 1]]).unwrap();
        let l = oa_based_lh(&m, 2, 11).unwrap();
        assert!(verify::check_latin_hypercube(&l).passed);
        assert_eq!(l.map(|v| v / 2), m);
        assert_eq!(l, oa_based_lh(&m, 2, 11).unwrap());
        let unbalanced = Matrix::column(&[0, 0, 0, 1]).unwrap();
        assert!(oa_based_lh(&unbalanced, 2, 0).is_err());
    }

    #[test]
    fn nsfd_and_ssfd_on_binary_family() {
        let chain = GroupChain::field_tower(2, &[1, 2, 3], None).unwrap();
        let out = construct_noa_rh(&chain, 2, None).unwrap();
        let nps: Vec<NestedPermutation> = (0..3)
            .map(|l| NestedPermutation::from_seed(&LAYERS, l).unwrap())
            .collect();
        let nsfd = build_nsfd(&out.nested, &nps, 5).unwrap();
        assert_eq!(nsfd.design.rows(), 64);

        let sps: Vec<SlicedPermutation> = (0..3)
            .map(|l| SlicedPermutation::from_seed(&LAYERS, l).unwrap())
            .collect();
        assert!(build_ssfd_multi(&out.nested, &sps, 5).is_ok());

        for soa in &out.sliced {
            assert!(build_ssfd_grouped(soa, None, 1).is_ok());
        }
        // Wrong permutation count.
        assert!(build_nsfd(&out.nested, &nps[..2], 5).is_err());
    }

    #[test]
    fn identity_sliced_relabel_is_inner_first_rank() {
        let chain = GroupChain::field_tower(2, &[1, 2, 3], None).unwrap();
        let out = construct_noa_rh(&chain, 2, None).unwrap();
        let id = SlicedPermutation::new((0..8).collect(), &LAYERS).unwrap();
        let m = relabel_sliced(&chain, out.top(), &[id.clone(), id.clone(), id]).unwrap();
        let order = chain.enumerate_ordered(Nesting::InnerFirst);
        let rank = |c: Code| order.iter().position(|&g| g == c).unwrap() as u32;
        assert_eq!(m, out.top().map(rank));
    }

    #[test]
    fn grouped_order_override() {
        let chain = GroupChain::field_tower(2, &[1, 2, 3], None).unwrap();
        let a = Matrix::column(&(0..8).collect::<Vec<_>>()).unwrap();
        let m = relabel_grouped(&chain, &a, 2, Some(&[0, 2, 1, 3])).unwrap();
        assert_eq!(m.col(0), vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert!(relabel_grouped(&chain, &a, 2, Some(&[0, 1, 2])).is_err());
    }

    #[test]
    fn qualitative_composition() {
        let d = Matrix::from_rows(&[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        let q = Matrix::from_rows(&[vec![7, 7]]).unwrap();
        let c = compose_qual_quant(&d, 4, &q).unwrap();
        assert!(c.row_iter().all(|r| r[1..] == [7, 7]));
        let q2 = Matrix::from_rows(&[vec![0], vec![1]]).unwrap();
        assert_eq!(
            compose_qual_quant(&d, 2, &q2).unwrap().col(1),
            vec![0, 0, 1, 1]
        );
        assert!(compose_qual_quant(&d, 3, &q2).is_err());
        assert!(compose_qual_quant(&d, 1, &q2).is_err());
    }
}
