//! Nested and sliced orthogonal arrays and difference matrices.
//!
//! Field towers go through the `H`-tower: `H_1 = F_1^k` in lexicographic
//! order and `H_i` stacks `H_{i-1}` with its shifts `β ⊕_c H_{i-1}` for the
//! nonzero `β ∈ T_i^k`. Multiplying by a generator matrix (Rao–Hamming) or by
//! the Vandermonde-style matrix (Bush) gives the nested family `A_i = H_i C`,
//! whose row blocks `Γ^i_l` of size `s_i^k` are the slices. The difference
//! matrix route builds `D = V V_{T_1}'` from the outer-first enumeration of
//! `F_I`. Kronecker-sum constructions over ω-rings live in [`kron`].
//!
//! Every constructor re-verifies its output with [`crate::verify`] and
//! returns [`Error::Verification`] instead of an array that fails.

pub mod kron;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::Field;
use crate::groups::{Code, GroupChain, Nesting};
use crate::kronecker::{col_kron_sum, kron_sum};
use crate::matrix::Matrix;
use crate::verify::{self, VerificationReport};

pub use kron::{construct_ndm_kron, construct_noa_kron_multi, construct_soa_kron, KronSoa};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayKind {
    /// Orthogonal arrays of a given strength.
    Oa,
    /// Difference matrices.
    Dm,
}

/// `ρ_j` applied entry-wise.
pub fn project_matrix(chain: &GroupChain, j: usize, m: &Matrix) -> Result<Matrix> {
    chain.check_layer(j)?;
    if let Some(&c) = m
        .data()
        .iter()
        .find(|&&c| c as usize >= chain.projection_table(j).len())
    {
        return Err(Error::NotInLayer {
            code: c,
            layer: chain.layers(),
        });
    }
    let table = chain.projection_table(j);
    Ok(m.map(|c| table[c as usize]))
}

/// A family `A_1 ⊂ ... ⊂ A_L` checked under projections `ρ_{j_1}, ..., ρ_{j_L}`.
#[derive(Clone, Debug)]
pub struct NestedArray {
    pub chain: GroupChain,
    pub layers: Vec<Matrix>,
    /// 1-based chain layer of the projection attached to each array layer.
    pub projection_layers: Vec<usize>,
    pub kind: ArrayKind,
    pub strength: usize,
}

impl NestedArray {
    fn new(chain: &GroupChain, layers: Vec<Matrix>, kind: ArrayKind, strength: usize) -> Self {
        let projection_layers = (1..=layers.len()).collect();
        NestedArray {
            chain: chain.clone(),
            layers,
            projection_layers,
            kind,
            strength,
        }
    }

    pub fn top(&self) -> &Matrix {
        self.layers
            .last()
            .expect("nested arrays have at least one layer")
    }

    /// `|F_j|` for each array layer's projection.
    pub fn levels(&self) -> Vec<usize> {
        self.projection_layers
            .iter()
            .map(|&j| self.chain.layer_order(j))
            .collect()
    }

    /// Row counts of the layers if each one is a row prefix of the top.
    pub fn layer_prefixes(&self) -> Option<Vec<usize>> {
        let top = self.top();
        self.layers
            .iter()
            .all(|l| top.data().starts_with(l.data()) && l.cols() == top.cols())
            .then(|| self.layers.iter().map(Matrix::rows).collect())
    }

    pub fn verify(&self) -> VerificationReport {
        let tables: Vec<&[Code]> = self
            .projection_layers
            .iter()
            .map(|&j| self.chain.projection_table(j))
            .collect();
        match self.kind {
            ArrayKind::Oa => {
                verify::check_nested(&self.layers, &tables, &self.levels(), self.strength)
            }
            ArrayKind::Dm => {
                let groups: Vec<Vec<Code>> = self
                    .projection_layers
                    .iter()
                    .map(|&j| self.chain.members(j))
                    .collect();
                verify::check_nested_dm(
                    &self.layers,
                    &tables,
                    self.chain.radix().radices(),
                    &groups,
                )
            }
        }
    }
}

/// Row blocks of `top`, each collapsing under `ρ_j` to an OA (or a
/// difference matrix) over `F_j`.
#[derive(Clone, Debug)]
pub struct SlicedArray {
    pub chain: GroupChain,
    pub top: Matrix,
    pub slice_size: usize,
    /// 1-based chain layer `j` of the collapsing projection.
    pub projection_layer: usize,
    pub kind: ArrayKind,
    pub strength: usize,
}

impl SlicedArray {
    pub fn slices(&self) -> Vec<Matrix> {
        self.top
            .row_blocks(self.slice_size)
            .expect("slice size divides the row count")
    }

    pub fn slice_count(&self) -> usize {
        self.top.rows() / self.slice_size
    }

    pub fn levels(&self) -> usize {
        self.chain.layer_order(self.projection_layer)
    }

    pub fn verify(&self) -> VerificationReport {
        let table = self.chain.projection_table(self.projection_layer);
        match self.kind {
            ArrayKind::Oa => verify::check_sliced(
                &self.top,
                self.slice_size,
                table,
                self.levels(),
                self.strength,
            ),
            ArrayKind::Dm => {
                let group = self.chain.members(self.projection_layer);
                for (l, slice) in self.slices().iter().enumerate() {
                    let projected = slice.map(|c| table[c as usize]);
                    let mut r = verify::check_difference_matrix(
                        &projected,
                        self.chain.radix().radices(),
                        &group,
                    );
                    if !r.passed {
                        r.check = format!("sliced DM, slice {}: {}", l + 1, r.check);
                        return r;
                    }
                }
                VerificationReport::pass(format!(
                    "sliced DM with slices of {} rows",
                    self.slice_size
                ))
            }
        }
    }
}

/// A nested family plus the sliced structures read off its top layer.
#[derive(Clone, Debug)]
pub struct Construction {
    pub nested: NestedArray,
    pub sliced: Vec<SlicedArray>,
}

impl Construction {
    pub fn top(&self) -> &Matrix {
        self.nested.top()
    }

    pub fn verify(&self) -> VerificationReport {
        let r = self.nested.verify();
        if !r.passed {
            return r;
        }
        for s in &self.sliced {
            let r = s.verify();
            if !r.passed {
                return r;
            }
        }
        VerificationReport::pass(format!(
            "nested family with {} layers and {} sliced structures",
            self.nested.layers.len(),
            self.sliced.len()
        ))
    }
}

fn field_of(chain: &GroupChain) -> Result<&Field> {
    chain
        .field()
        .ok_or_else(|| Error::Precondition("this construction needs a field tower".into()))
}

/// `F_1` as a scalar field: its elements in canonical order, after checking
/// that `F_1` is a subfield and every layer is closed under `F_1`-scaling.
fn scalars_of(chain: &GroupChain) -> Result<Vec<Code>> {
    field_of(chain)?;
    if !chain.supports_scalars() {
        return Err(Error::Precondition(
            "F_1 must be a subfield and every F_i closed under F_1 scaling \
             (use a subfield tower with u_1 dividing every u_i)"
                .into(),
        ));
    }
    Ok(chain.members(1))
}

/// Prime-field scalars `0, 1, ..., p-1`.
fn prime_scalars(chain: &GroupChain) -> Result<Vec<Code>> {
    Ok((0..field_of(chain)?.characteristic()).collect())
}

/// The columns `c_j` of a generator matrix over a scalar subfield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    k: usize,
    columns: Vec<Vec<Code>>,
}

impl GeneratorMatrix {
    /// All admissible columns (first nonzero entry 1): the identity columns
    /// first, then the rest in lexicographic order of element codes.
    pub fn rao_hamming(scalars: &[Code], k: usize) -> Result<GeneratorMatrix> {
        if k == 0 {
            return Err(Error::Generator("k must be at least 1".into()));
        }
        let mut sorted = scalars.to_vec();
        sorted.sort_unstable();
        let identity: Vec<Vec<Code>> = (0..k).map(|j| unit(k, j)).collect();
        let mut columns = identity.clone();
        let mut tuple = vec![0usize; k];
        loop {
            let col: Vec<Code> = tuple.iter().map(|&i| sorted[i]).collect();
            if admissible(&col) && !identity.contains(&col) {
                columns.push(col);
            }
            if !next_tuple(&mut tuple, sorted.len()) {
                break;
            }
        }
        Ok(GeneratorMatrix { k, columns })
    }

    /// Explicit columns, each with entries in `scalars` and first nonzero
    /// entry 1; the identity columns must be among them.
    pub fn with_columns(
        scalars: &[Code],
        k: usize,
        columns: Vec<Vec<Code>>,
    ) -> Result<GeneratorMatrix> {
        if k == 0 {
            return Err(Error::Generator("k must be at least 1".into()));
        }
        for (i, c) in columns.iter().enumerate() {
            if c.len() != k {
                return Err(Error::Generator(format!(
                    "column {} has {} entries, expected {k}",
                    i + 1,
                    c.len()
                )));
            }
            if let Some(v) = c.iter().find(|v| !scalars.contains(v)) {
                return Err(Error::Generator(format!(
                    "column {} holds {v}, not a scalar",
                    i + 1
                )));
            }
            if !admissible(c) {
                return Err(Error::Generator(format!(
                    "column {} {c:?} must be nonzero with first nonzero entry 1",
                    i + 1
                )));
            }
            if columns[..i].contains(c) {
                return Err(Error::Generator(format!(
                    "column {} {c:?} is repeated",
                    i + 1
                )));
            }
        }
        if let Some(j) = (0..k).find(|&j| !columns.contains(&unit(k, j))) {
            return Err(Error::Generator(format!(
                "identity column e_{} is missing",
                j + 1
            )));
        }
        Ok(GeneratorMatrix { k, columns })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn columns(&self) -> &[Vec<Code>] {
        &self.columns
    }

    /// The `k × m` matrix.
    pub fn matrix(&self) -> Matrix {
        let data = (0..self.k)
            .flat_map(|r| self.columns.iter().map(move |c| c[r]))
            .collect();
        Matrix::new(self.k, self.columns.len(), data).expect("generator matrices are nonempty")
    }
}

fn unit(k: usize, j: usize) -> Vec<Code> {
    (0..k).map(|i| Code::from(i == j)).collect()
}

fn admissible(col: &[Code]) -> bool {
    col.iter().find(|&&v| v != 0) == Some(&1)
}

/// Advances a mixed counter with the last position fastest.
fn next_tuple(tuple: &mut [usize], base: usize) -> bool {
    for d in tuple.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// The `k × (s_1 + 1)` matrix with columns `(1, v, ..., v^{k-1})'` for
/// `v ∈ F_1` in canonical order and a final `(0, ..., 0, 1)'`.
pub fn bush_matrix(field: &Field, scalars: &[Code], k: usize) -> Result<Matrix> {
    if k < 2 {
        return Err(Error::Precondition(
            "the Bush construction needs k >= 2".into(),
        ));
    }
    if scalars.len() + 1 < k {
        return Err(Error::Precondition(format!(
            "s_1 = {} < k - 1 = {}",
            scalars.len(),
            k - 1
        )));
    }
    let mut sorted = scalars.to_vec();
    sorted.sort_unstable();
    let m = sorted.len() + 1;
    let mut data = Vec::with_capacity(k * m);
    for r in 0..k {
        data.extend(sorted.iter().map(|&v| field.pow_code(v, r as u64)));
        data.push(Code::from(r == k - 1));
    }
    Matrix::new(k, m, data)
}

/// `k`-tuples over `elements` in lexicographic order (first coordinate slowest).
fn tuples(elements: &[Code], k: usize) -> Result<Matrix> {
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    let mut rows = Vec::new();
    let mut t = vec![0usize; k];
    loop {
        rows.push(t.iter().map(|&i| sorted[i]).collect::<Vec<_>>());
        if !next_tuple(&mut t, sorted.len()) {
            break;
        }
    }
    Matrix::from_rows(&rows)
}

/// `H_1, ..., H_I`; `H_i` has `s_i^k` rows and is a row prefix of `H_I`.
pub fn build_h_tower(chain: &GroupChain, k: usize) -> Result<Vec<Matrix>> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let mut tower = vec![tuples(chain.transversal(1), k)?];
    for i in 2..=chain.layers() {
        let w = tuples(chain.transversal(i), k)?;
        let h = col_kron_sum(chain, &w, tower.last().unwrap())?;
        tower.push(h);
    }
    Ok(tower)
}

/// `H C` with field arithmetic.
pub fn multiply(field: &Field, h: &Matrix, c: &Matrix) -> Result<Matrix> {
    if h.cols() != c.rows() {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            h.rows(),
            h.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let mut data = Vec::with_capacity(h.rows() * c.cols());
    for row in h.row_iter() {
        for col in 0..c.cols() {
            let mut acc = 0;
            for (j, &x) in row.iter().enumerate() {
                acc = field.add_codes(acc, field.mul_codes(x, c.get(j, col)));
            }
            data.push(acc);
        }
    }
    Matrix::new(h.rows(), c.cols(), data)
}

fn check_scalar_matrix(c: &Matrix, scalars: &[Code], k: usize) -> Result<()> {
    if c.rows() != k {
        return Err(Error::Generator(format!(
            "{} rows, expected k = {k}",
            c.rows()
        )));
    }
    if let Some(v) = c.data().iter().find(|v| !scalars.contains(v)) {
        return Err(Error::Generator(format!(
            "entry {v} is outside the scalar field"
        )));
    }
    Ok(())
}

/// `A_i = H_i C` with slices `Γ^i_l` for every `j ≤ i ≤ I-1`.
fn h_tower_family(
    chain: &GroupChain,
    k: usize,
    c: &Matrix,
    strength: usize,
) -> Result<Construction> {
    let field = field_of(chain)?;
    let h = build_h_tower(chain, k)?;
    let top = multiply(field, h.last().unwrap(), c)?;
    let layers = h
        .iter()
        .map(|hi| top.slice_rows(0, hi.rows()))
        .collect::<Result<Vec<_>>>()?;
    let mut sliced = Vec::new();
    for i in 1..chain.layers() {
        for j in 1..=i {
            sliced.push(SlicedArray {
                chain: chain.clone(),
                top: top.clone(),
                slice_size: layers[i - 1].rows(),
                projection_layer: j,
                kind: ArrayKind::Oa,
                strength,
            });
        }
    }
    let out = Construction {
        nested: NestedArray::new(chain, layers, ArrayKind::Oa, strength),
        sliced,
    };
    out.verify().into_result()?;
    Ok(out)
}

/// Rao–Hamming NOA with a generator matrix over the prime field. Works on
/// any field tower; `generator` defaults to all admissible columns.
pub fn construct_noa_rh(
    chain: &GroupChain,
    k: usize,
    generator: Option<&GeneratorMatrix>,
) -> Result<Construction> {
    let scalars = prime_scalars(chain)?;
    let c = match generator {
        Some(g) => g.clone(),
        None => GeneratorMatrix::rao_hamming(&scalars, k)?,
    };
    if c.k() != k {
        return Err(Error::Generator(format!(
            "generator has k = {}, expected {k}",
            c.k()
        )));
    }
    let c = c.matrix();
    check_scalar_matrix(&c, &scalars, k)?;
    let strength = if generator.is_some() {
        explicit_strength(&c, chain, k)?
    } else {
        2
    };
    h_tower_family(chain, k, &c, strength)
}

/// Rao–Hamming NOA with a generator matrix over `F_1 = GF(s_1)`.
pub fn construct_noa_subfield(
    chain: &GroupChain,
    k: usize,
    generator: Option<&GeneratorMatrix>,
) -> Result<Construction> {
    let scalars = scalars_of(chain)?;
    let c = match generator {
        Some(g) => g.clone(),
        None => GeneratorMatrix::rao_hamming(&scalars, k)?,
    };
    if c.k() != k {
        return Err(Error::Generator(format!(
            "generator has k = {}, expected {k}",
            c.k()
        )));
    }
    let c = c.matrix();
    check_scalar_matrix(&c, &scalars, k)?;
    let strength = if generator.is_some() {
        explicit_strength(&c, chain, k)?
    } else {
        2
    };
    h_tower_family(chain, k, &c, strength)
}

/// Strength claimed for explicit column choices: the largest `t ≤ k` such
/// that every `t` columns are linearly independent, found on `H_1 C`.
fn explicit_strength(c: &Matrix, chain: &GroupChain, k: usize) -> Result<usize> {
    let field = field_of(chain)?;
    let h1 = tuples(chain.transversal(1), k)?;
    let a1 = multiply(field, &h1, c)?;
    let s1 = chain.layer_order(1);
    let mut t = 1;
    while t < k.min(c.cols()) && verify::check_oa_strength(&a1, s1, t + 1).passed {
        t += 1;
    }
    Ok(t.max(2).min(c.cols()))
}

/// Bush NOA of strength `k`: every `ρ_j(A_i)` is an `OA(s_i^k, s_1 + 1, s_j, k)`.
pub fn construct_noa_bush(chain: &GroupChain, k: usize) -> Result<Construction> {
    let scalars = scalars_of(chain)?;
    let v = bush_matrix(field_of(chain)?, &scalars, k)?;
    h_tower_family(chain, k, &v, k)
}

/// The Rao–Hamming `OA(s^k, (s^k - 1)/(s - 1), s, 2)` over a whole field.
pub fn rao_hamming_oa(field: &Field, k: usize) -> Result<Matrix> {
    let elements: Vec<Code> = (0..field.order()).collect();
    let c = GeneratorMatrix::rao_hamming(&elements, k)?.matrix();
    multiply(field, &tuples(&elements, k)?, &c)
}

/// Everything derived from one difference matrix `D = V V_{T_1}'`.
#[derive(Clone, Debug)]
pub struct NdmConstruction {
    pub chain: GroupChain,
    pub a: Matrix,
    pub d: Matrix,
    /// `(Δ^1_1, ..., Δ^{I-1}_1, D)`.
    pub ndm: NestedArray,
    /// `A ⊕ D`.
    pub oa: Matrix,
    /// `(A ⊕ Δ^1_1, ..., A ⊕ Δ^{I-1}_1, A ⊕ D)`.
    pub noa: NestedArray,
    /// `(Δ^i_1, ..., Δ^i_{s_I/s_i}; ρ_j)` as difference matrices.
    pub dm_sliced: Vec<SlicedArray>,
    /// `(A ⊕ Δ^i_1, ..., A ⊕ Δ^i_{s_I/s_i}; ρ_j)`.
    pub sliced: Vec<SlicedArray>,
}

impl NdmConstruction {
    /// `Δ^i_l`, rows `(l-1) s_i .. l s_i` of `D`.
    pub fn delta(&self, i: usize, l: usize) -> Result<Matrix> {
        self.chain.check_layer(i)?;
        let s = self.chain.layer_order(i);
        self.d.slice_rows((l - 1) * s, l * s)
    }

    /// `Δ(i, k)`: the first `k` blocks `Δ^i_1, ..., Δ^i_k`.
    pub fn delta_prefix(&self, i: usize, k: usize) -> Result<Matrix> {
        self.chain.check_layer(i)?;
        self.d.slice_rows(0, k * self.chain.layer_order(i))
    }

    /// The two-layer NDM `(Δ(i, k), D; ρ_j, ρ_I)`.
    pub fn two_layer_ndm(&self, i: usize, k: usize, j: usize) -> Result<NestedArray> {
        self.two_layer(self.delta_prefix(i, k)?, self.d.clone(), j, ArrayKind::Dm)
    }

    /// The two-layer NOA `(A ⊕ Δ(i, k), A ⊕ D; ρ_j, ρ_I)`.
    pub fn two_layer_noa(&self, i: usize, k: usize, j: usize) -> Result<NestedArray> {
        let small = kron_sum(&self.chain, &self.a, &self.delta_prefix(i, k)?)?;
        self.two_layer(small, self.oa.clone(), j, ArrayKind::Oa)
    }

    fn two_layer(
        &self,
        small: Matrix,
        top: Matrix,
        j: usize,
        kind: ArrayKind,
    ) -> Result<NestedArray> {
        self.chain.check_layer(j)?;
        let last = self.chain.layers();
        if j >= last {
            return Err(Error::LayerOutOfRange {
                layer: j,
                layers: last - 1,
            });
        }
        Ok(NestedArray {
            chain: self.chain.clone(),
            layers: vec![small, top],
            projection_layers: vec![j, last],
            kind,
            strength: 2,
        })
    }

    pub fn verify(&self) -> VerificationReport {
        let s_top = self.chain.layer_order(self.chain.layers());
        let top = verify::check_difference_matrix(
            &self.d,
            self.chain.radix().radices(),
            &self.chain.members(self.chain.layers()),
        );
        if !top.passed {
            return top;
        }
        let oa = verify::check_oa_strength(&self.oa, s_top, 2);
        if !oa.passed {
            return oa;
        }
        for r in [self.ndm.verify(), self.noa.verify()] {
            if !r.passed {
                return r;
            }
        }
        for s in self.dm_sliced.iter().chain(&self.sliced) {
            let r = s.verify();
            if !r.passed {
                return r;
            }
        }
        VerificationReport::pass("difference-matrix family")
    }
}

/// NOAs and SOAs from `A ⊕ D`, where `A` is an `OA(n, m, s_I, 2)` over `F_I`.
pub fn construct_from_ndm(chain: &GroupChain, a: &Matrix) -> Result<NdmConstruction> {
    let field = field_of(chain)?.clone();
    scalars_of(chain)?;
    let layers = chain.layers();
    let s_top = chain.layer_order(layers);
    if let Some(&c) = a.data().iter().find(|&&c| c as usize >= s_top) {
        return Err(Error::NotInLayer {
            code: c,
            layer: layers,
        });
    }
    let pre = verify::check_oa_strength(a, s_top, 2);
    if !pre.passed {
        return Err(Error::Precondition(format!("input array: {pre}")));
    }
    let v = chain.enumerate_ordered(Nesting::OuterFirst);
    let mut t1 = chain.transversal(1).to_vec();
    t1.sort_unstable();
    let rows: Vec<Vec<Code>> = v
        .iter()
        .map(|&x| t1.iter().map(|&t| field.mul_codes(x, t)).collect())
        .collect();
    let d = Matrix::from_rows(&rows)?;
    let oa = kron_sum(chain, a, &d)?;

    let first_blocks: Vec<Matrix> = (1..=layers)
        .map(|i| d.slice_rows(0, chain.layer_order(i)))
        .collect::<Result<_>>()?;
    let ndm = NestedArray::new(chain, first_blocks.clone(), ArrayKind::Dm, 2);
    let noa_layers = first_blocks
        .iter()
        .map(|b| kron_sum(chain, a, b))
        .collect::<Result<Vec<_>>>()?;
    let noa = NestedArray::new(chain, noa_layers, ArrayKind::Oa, 2);

    let mut dm_sliced = Vec::new();
    let mut sliced = Vec::new();
    for i in 1..layers {
        let s_i = chain.layer_order(i);
        let blocks = d.row_blocks(s_i)?;
        let stacked = Matrix::vstack(
            &blocks
                .iter()
                .map(|b| kron_sum(chain, a, b))
                .collect::<Result<Vec<_>>>()?,
        )?;
        for j in 1..=i {
            dm_sliced.push(SlicedArray {
                chain: chain.clone(),
                top: d.clone(),
                slice_size: s_i,
                projection_layer: j,
                kind: ArrayKind::Dm,
                strength: 2,
            });
            sliced.push(SlicedArray {
                chain: chain.clone(),
                top: stacked.clone(),
                slice_size: a.rows() * s_i,
                projection_layer: j,
                kind: ArrayKind::Oa,
                strength: 2,
            });
        }
    }
    let out = NdmConstruction {
        chain: chain.clone(),
        a: a.clone(),
        d,
        ndm,
        oa,
        noa,
        dm_sliced,
        sliced,
    };
    out.verify().into_result()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> GroupChain {
        GroupChain::field_tower(2, &[1, 2, 3], None).unwrap()
    }

    fn text_rows(chain: &GroupChain, m: &Matrix) -> Vec<Vec<String>> {
        m.row_iter()
            .map(|r| r.iter().map(|&c| chain.format(c)).collect())
            .collect()
    }

    #[test]
    fn default_generator_columns() {
        let g = GeneratorMatrix::rao_hamming(&[0, 1], 2).unwrap();
        assert_eq!(g.columns(), &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let g = GeneratorMatrix::rao_hamming(&[0, 1], 3).unwrap();
        assert_eq!(g.columns().len(), 7);
        assert_eq!(
            &g.columns()[..3],
            &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        let g = GeneratorMatrix::rao_hamming(&[0, 1, 2], 2).unwrap();
        assert_eq!(
            g.columns(),
            &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]]
        );
        assert!(GeneratorMatrix::rao_hamming(&[0, 1], 0).is_err());
    }

    #[test]
    fn explicit_generator_rules() {
        let cols = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]];
        assert!(GeneratorMatrix::with_columns(&[0, 1], 3, cols).is_ok());
        let bad_lead = vec![vec![1, 0], vec![0, 1], vec![0, 2]];
        assert!(GeneratorMatrix::with_columns(&[0, 1, 2], 2, bad_lead).is_err());
        let missing = vec![vec![1, 0], vec![1, 1]];
        assert!(GeneratorMatrix::with_columns(&[0, 1], 2, missing).is_err());
        let repeated = vec![vec![1, 0], vec![0, 1], vec![1, 0]];
        assert!(GeneratorMatrix::with_columns(&[0, 1], 2, repeated).is_err());
        let short = vec![vec![1]];
        assert!(GeneratorMatrix::with_columns(&[0, 1], 2, short).is_err());
    }

    #[test]
    fn h_tower_blocks() {
        let c = binary();
        let h = build_h_tower(&c, 2).unwrap();
        assert_eq!(
            h[0].to_rows(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        let heads: Vec<Vec<String>> = (0..4)
            .map(|b| text_rows(&c, &h[1])[4 * b].clone())
            .collect();
        assert_eq!(heads, [["0", "0"], ["0", "x"], ["x", "0"], ["x", "x"]]);
        assert_eq!(h[2].rows(), 64);
        assert_eq!(h[2].slice_rows(0, 16).unwrap(), h[1]);
        assert!(h.iter().all(|m| m.row(0).iter().all(|&v| v == 0)));
    }

    #[test]
    fn rh_family_rows() {
        let c = binary();
        let out = construct_noa_rh(&c, 2, None).unwrap();
        let rows = text_rows(&c, out.top());
        assert_eq!(rows[4], ["0", "x", "x"]);
        assert_eq!(rows[32], ["x^2", "0", "x^2"]);
        assert_eq!(out.nested.layer_prefixes(), Some(vec![4, 16, 64]));
        assert_eq!(out.sliced.len(), 3);
        // Unprojected A_2 is not an OA over eight levels.
        assert!(!verify::check_oa_strength(&out.nested.layers[1], 8, 2).passed);
    }

    #[test]
    fn subfield_family() {
        let c = GroupChain::subfield_tower(2, &[2, 4], None).unwrap();
        let out = construct_noa_subfield(&c, 2, None).unwrap();
        assert_eq!((out.top().rows(), out.top().cols()), (256, 5));
        let rho1 = project_matrix(&c, 1, &out.nested.layers[0]).unwrap();
        assert!(verify::check_oa_strength(&rho1, 4, 2).passed);
        let mono = GroupChain::field_tower(2, &[2, 4], None).unwrap();
        assert!(matches!(
            construct_noa_subfield(&mono, 2, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bush_family() {
        let c = GroupChain::field_tower(2, &[1, 2], None).unwrap();
        let v = bush_matrix(c.field().unwrap(), &[0, 1], 2).unwrap();
        assert_eq!(v.to_rows(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
        let out = construct_noa_bush(&c, 2).unwrap();
        assert!(verify::check_oa_strength(&out.nested.layers[0], 2, 2).passed);
        assert!(matches!(
            construct_noa_bush(&c, 4),
            Err(Error::Precondition(_))
        ));
        assert!(construct_noa_bush(&c, 3).is_ok());
    }

    #[test]
    fn remark_generator_strength_three() {
        let c = binary();
        let cols = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]];
        let g = GeneratorMatrix::with_columns(&[0, 1], 3, cols).unwrap();
        let out = construct_noa_rh(&c, 3, Some(&g)).unwrap();
        assert_eq!(out.nested.strength, 3);
        assert!(verify::check_oa_strength(out.top(), 8, 3).passed);
    }

    #[test]
    fn ndm_small_instance() {
        let c = GroupChain::field_tower(2, &[1, 2], None).unwrap();
        let a = rao_hamming_oa(c.field().unwrap(), 2).unwrap();
        assert_eq!((a.rows(), a.cols()), (16, 5));
        let out = construct_from_ndm(&c, &a).unwrap();
        assert_eq!(
            text_rows(&c, &out.d),
            [["0", "0"], ["0", "1"], ["0", "x"], ["0", "x+1"]]
        );
        assert_eq!((out.oa.rows(), out.oa.cols()), (64, 10));
        let d1 = out.delta(1, 1).unwrap();
        let rho = project_matrix(&c, 1, &d1).unwrap();
        assert!(verify::check_difference_matrix(&rho, c.radix().radices(), &[0, 1]).passed);
        assert!(out.two_layer_noa(1, 1, 1).unwrap().verify().passed);
        assert!(out.two_layer_ndm(1, 1, 1).unwrap().verify().passed);
        // An input that is not a strength-2 array is rejected.
        let bad = Matrix::from_rows(&vec![vec![0, 0]; 16]).unwrap();
        assert!(matches!(
            construct_from_ndm(&c, &bad),
            Err(Error::Precondition(_))
        ));
    }
}
