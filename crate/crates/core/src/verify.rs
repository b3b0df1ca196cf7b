//! Brute-force checkers for every structural claim a design makes.
//!
//! The checkers work on raw code matrices plus lookup tables and never call
//! the construction code. Column subsets are scanned in lexicographic order
//! and the first failure (by that order, regardless of scheduling) is
//! reported together with a counterexample.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::groups::Code;
use crate::matrix::Matrix;

/// Where a check failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// 0-based column indices.
    pub columns: Vec<usize>,
    /// Level tuple (or difference value) whose count is wrong.
    pub levels: Vec<Code>,
    pub observed: usize,
    pub expected: usize,
    pub context: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    pub fn pass(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            passed: true,
            counterexample: None,
        }
    }

    pub fn fail(check: impl Into<String>, counterexample: Counterexample) -> Self {
        VerificationReport {
            check: check.into(),
            passed: false,
            counterexample: Some(counterexample),
        }
    }

    pub fn structural(check: impl Into<String>, context: impl Into<String>) -> Self {
        VerificationReport::fail(
            check,
            Counterexample {
                columns: Vec::new(),
                levels: Vec::new(),
                observed: 0,
                expected: 0,
                context: context.into(),
            },
        )
    }

    /// Prefixes the check name and the counterexample context.
    fn within(mut self, check: impl Into<String>, context: &str) -> Self {
        let outer = check.into();
        self.check = format!("{outer}: {}", self.check);
        if let Some(ce) = self.counterexample.as_mut() {
            ce.context = if ce.context.is_empty() {
                context.to_string()
            } else {
                format!("{context}; {}", ce.context)
            };
        }
        self
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.passed {
            Ok(())
        } else {
            Err(crate::Error::Verification(Box::new(self)))
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            self.check,
            if self.passed { "passed" } else { "FAILED" }
        )?;
        if let Some(ce) = &self.counterexample {
            if !ce.context.is_empty() {
                write!(f, " ({})", ce.context)?;
            }
            if !ce.columns.is_empty() || !ce.levels.is_empty() {
                write!(
                    f,
                    " at columns {:?}, levels {:?}: observed {}, expected {}",
                    ce.columns, ce.levels, ce.observed, ce.expected
                )?;
            }
        }
        Ok(())
    }
}

/// All `t`-subsets of `0..m` in lexicographic order.
pub fn column_subsets(m: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..t).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..t).rev().find(|&i| cur[i] < m - t + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..t {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `OA(n, m, s, t)`: every `t`-subset of columns shows each of the `s^t`
/// level tuples exactly `n / s^t` times.
pub fn check_oa_strength(a: &Matrix, s: usize, t: usize) -> VerificationReport {
    check_oa_mixed(a, &vec![s; a.cols()], t)
}

/// Strength check for mixed-level arrays; `levels[c]` is the alphabet size of
/// column `c`.
pub fn check_oa_mixed(a: &Matrix, levels: &[usize], t: usize) -> VerificationReport {
    let name = if levels.iter().all(|&l| Some(&l) == levels.first()) {
        format!(
            "OA({}, {}, {}, {t})",
            a.rows(),
            a.cols(),
            levels.first().copied().unwrap_or(0)
        )
    } else {
        format!("OA({}, {}, {levels:?}, {t})", a.rows(), a.cols())
    };
    if levels.len() != a.cols() {
        return VerificationReport::structural(
            name,
            format!("{} level counts for {} columns", levels.len(), a.cols()),
        );
    }
    if t > a.cols() {
        return VerificationReport::structural(
            name,
            format!("strength {t} exceeds {} columns", a.cols()),
        );
    }
    if t == 0 {
        return VerificationReport::pass(name);
    }
    let alphabets: Vec<Vec<Code>> = (0..a.cols())
        .map(|c| {
            let set: BTreeSet<Code> = a.col(c).into_iter().collect();
            set.into_iter().collect()
        })
        .collect();
    for (c, (alpha, &s)) in alphabets.iter().zip(levels).enumerate() {
        if alpha.len() != s {
            return VerificationReport::fail(
                name,
                Counterexample {
                    columns: vec![c],
                    levels: alpha.clone(),
                    observed: alpha.len(),
                    expected: s,
                    context: "number of distinct symbols".into(),
                },
            );
        }
    }
    let subsets = column_subsets(a.cols(), t);
    let failure = subsets.par_iter().find_map_first(|cols| {
        let cells: usize = cols.iter().map(|&c| levels[c]).product();
        if !a.rows().is_multiple_of(cells) {
            return Some(Counterexample {
                columns: cols.clone(),
                levels: Vec::new(),
                observed: a.rows(),
                expected: cells,
                context: format!("{} runs not divisible by {cells} level tuples", a.rows()),
            });
        }
        let index: Vec<HashMap<Code, usize>> = cols
            .iter()
            .map(|&c| {
                alphabets[c]
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, i))
                    .collect()
            })
            .collect();
        let mut counts = vec![0usize; cells];
        for row in a.row_iter() {
            let mut cell = 0;
            for (k, &c) in cols.iter().enumerate() {
                cell = cell * levels[c] + index[k][&row[c]];
            }
            counts[cell] += 1;
        }
        let expected = a.rows() / cells;
        counts.iter().position(|&n| n != expected).map(|cell| {
            let mut rest = cell;
            let mut tuple = vec![0; cols.len()];
            for k in (0..cols.len()).rev() {
                let l = levels[cols[k]];
                tuple[k] = alphabets[cols[k]][rest % l];
                rest /= l;
            }
            Counterexample {
                columns: cols.clone(),
                levels: tuple,
                observed: counts[cell],
                expected,
                context: String::new(),
            }
        })
    });
    match failure {
        Some(ce) => VerificationReport::fail(name, ce),
        None => VerificationReport::pass(name),
    }
}

fn digit_sub(radices: &[u32], mut a: Code, mut b: Code) -> Code {
    let mut out = 0;
    let mut place = 1;
    for &r in radices {
        out += ((a % r + r - b % r) % r) * place;
        a /= r;
        b /= r;
        place *= r;
    }
    out
}

/// `D(r, c, s)`: for each ordered pair of distinct columns the entry-wise
/// differences hit every element of the group exactly `r / s` times.
/// Differences are taken in the mixed-radix group with the given radices;
/// `group` lists the `s` elements of the (sub)group the differences must
/// cover.
pub fn check_difference_matrix(d: &Matrix, radices: &[u32], group: &[Code]) -> VerificationReport {
    let s = group.len();
    let name = format!("D({}, {}, {s})", d.rows(), d.cols());
    if s == 0 || !d.rows().is_multiple_of(s) {
        return VerificationReport::structural(
            name,
            format!("{} rows not divisible by group order {s}", d.rows()),
        );
    }
    let expected = d.rows() / s;
    let pairs: Vec<(usize, usize)> = (0..d.cols())
        .flat_map(|i| (0..d.cols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let failure = pairs.par_iter().find_map_first(|&(i, j)| {
        let mut counts: BTreeMap<Code, usize> = group.iter().map(|&g| (g, 0)).collect();
        for row in d.row_iter() {
            *counts
                .entry(digit_sub(radices, row[i], row[j]))
                .or_insert(0) += 1;
        }
        counts
            .iter()
            .find(|&(g, &n)| n != expected || !group.contains(g))
            .map(|(&g, &n)| Counterexample {
                columns: vec![i, j],
                levels: vec![g],
                observed: n,
                expected: if group.contains(&g) { expected } else { 0 },
                context: "column difference count".into(),
            })
    });
    match failure {
        Some(ce) => VerificationReport::fail(name, ce),
        None => VerificationReport::pass(name),
    }
}

/// Every column is a permutation of `0..n`.
pub fn check_latin_hypercube(l: &Matrix) -> VerificationReport {
    let n = l.rows();
    let name = format!("Latin hypercube {}x{}", n, l.cols());
    for c in 0..l.cols() {
        let mut seen = vec![0usize; n];
        for v in l.col(c) {
            if (v as usize) >= n {
                return VerificationReport::fail(
                    name,
                    Counterexample {
                        columns: vec![c],
                        levels: vec![v],
                        observed: 1,
                        expected: 0,
                        context: format!("value outside 0..{n}"),
                    },
                );
            }
            seen[v as usize] += 1;
        }
        if let Some(v) = seen.iter().position(|&k| k != 1) {
            return VerificationReport::fail(
                name,
                Counterexample {
                    columns: vec![c],
                    levels: vec![v as Code],
                    observed: seen[v],
                    expected: 1,
                    context: "value count".into(),
                },
            );
        }
    }
    VerificationReport::pass(name)
}

/// Every pair of columns puts exactly `rows / g^2` points into each cell of
/// the `g × g` grid over `0..n`; the cell of value `v` is `floor(v g / n)`.
pub fn check_stratification(l: &Matrix, n: usize, g: usize) -> VerificationReport {
    let name = format!(
        "stratification of {} rows on {g}x{g} grid over 0..{n}",
        l.rows()
    );
    if g == 0 || n == 0 || !l.rows().is_multiple_of(g * g) {
        return VerificationReport::structural(
            name,
            format!("{} rows not divisible by {g}^2", l.rows()),
        );
    }
    if let Some(&v) = l.data().iter().find(|&&v| v as usize >= n) {
        return VerificationReport::structural(name, format!("value {v} outside 0..{n}"));
    }
    let expected = l.rows() / (g * g);
    let cell = |v: Code| v as usize * g / n;
    for cols in column_subsets(l.cols(), 2) {
        let mut counts = vec![0usize; g * g];
        for row in l.row_iter() {
            counts[cell(row[cols[0]]) * g + cell(row[cols[1]])] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c != expected) {
            return VerificationReport::fail(
                name,
                Counterexample {
                    columns: cols,
                    levels: vec![(k / g) as Code, (k % g) as Code],
                    observed: counts[k],
                    expected,
                    context: "grid cell count".into(),
                },
            );
        }
    }
    VerificationReport::pass(name)
}

/// Whether `small` is a sub-multiset of `large` (as row sets).
pub fn check_row_containment(small: &Matrix, large: &Matrix) -> VerificationReport {
    let name = format!(
        "{}-row array contained in {}-row array",
        small.rows(),
        large.rows()
    );
    if small.cols() != large.cols() {
        return VerificationReport::structural(name, "column counts differ");
    }
    let mut pool: HashMap<&[Code], usize> = HashMap::new();
    for r in large.row_iter() {
        *pool.entry(r).or_insert(0) += 1;
    }
    for (i, r) in small.row_iter().enumerate() {
        match pool.get_mut(r) {
            Some(k) if *k > 0 => *k -= 1,
            _ => {
                return VerificationReport::fail(
                    name,
                    Counterexample {
                        columns: Vec::new(),
                        levels: r.to_vec(),
                        observed: 0,
                        expected: 1,
                        context: format!("row {i} of the smaller array is missing"),
                    },
                )
            }
        }
    }
    VerificationReport::pass(name)
}

/// `ρ_i(α) = ρ_i(β)` implies `ρ_j(α) = ρ_j(β)` for all `j ≤ i`.
pub fn check_projection_compatibility(projections: &[&[Code]]) -> VerificationReport {
    let name = "projection compatibility";
    for i in 0..projections.len() {
        for j in 0..i {
            let mut image: HashMap<Code, (Code, Code)> = HashMap::new();
            for (alpha, (&pi, &pj)) in projections[i].iter().zip(projections[j]).enumerate() {
                match image.get(&pi) {
                    Some(&(beta, pjb)) if pjb != pj => {
                        return VerificationReport::fail(
                            name,
                            Counterexample {
                                columns: vec![i + 1, j + 1],
                                levels: vec![beta, alpha as Code],
                                observed: 0,
                                expected: 0,
                                context: format!(
                                    "ρ_{} agrees on elements {beta} and {alpha} but ρ_{} does not",
                                    i + 1,
                                    j + 1
                                ),
                            },
                        )
                    }
                    Some(_) => {}
                    None => {
                        image.insert(pi, (alpha as Code, pj));
                    }
                }
            }
        }
    }
    VerificationReport::pass(name)
}

fn project(m: &Matrix, table: &[Code]) -> Option<Matrix> {
    if m.data().iter().any(|&c| c as usize >= table.len()) {
        return None;
    }
    Some(m.map(|c| table[c as usize]))
}

fn check_family_shape(
    name: &str,
    layers: &[Matrix],
    projections: &[&[Code]],
) -> Option<VerificationReport> {
    if layers.is_empty() || layers.len() != projections.len() {
        return Some(VerificationReport::structural(
            name,
            format!(
                "{} layers but {} projections",
                layers.len(),
                projections.len()
            ),
        ));
    }
    if layers.windows(2).any(|w| w[0].rows() >= w[1].rows()) {
        return Some(VerificationReport::structural(
            name,
            "run sizes must strictly increase",
        ));
    }
    let compat = check_projection_compatibility(projections);
    if !compat.passed {
        return Some(compat.within(name, ""));
    }
    for w in layers.windows(2) {
        let r = check_row_containment(&w[0], &w[1]);
        if !r.passed {
            return Some(r.within(name, "nesting"));
        }
    }
    None
}

/// NOA conditions: `A_{i-1} ⊂ A_i` as row multisets, each `ρ_j(A_i)` is an
/// `OA(n_i, m, s_j, t)` for `j ≤ i`, and the projections are compatible.
/// `projections[j]` is the lookup table of `ρ_{j+1}` and `levels[j] = s_{j+1}`.
pub fn check_nested(
    layers: &[Matrix],
    projections: &[&[Code]],
    levels: &[usize],
    t: usize,
) -> VerificationReport {
    let name = format!("NOA with {} layers", layers.len());
    if levels.len() != projections.len() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return VerificationReport::structural(
            name,
            "level counts must strictly increase, one per layer",
        );
    }
    if let Some(r) = check_family_shape(&name, layers, projections) {
        return r;
    }
    for (i, a) in layers.iter().enumerate() {
        for j in 0..=i {
            let Some(pa) = project(a, projections[j]) else {
                return VerificationReport::structural(
                    name,
                    format!("layer {} holds codes outside the group", i + 1),
                );
            };
            let r = check_oa_strength(&pa, levels[j], t);
            if !r.passed {
                return r.within(name, &format!("ρ_{}(A_{})", j + 1, i + 1));
            }
        }
    }
    VerificationReport::pass(name)
}

/// NDM conditions: nesting plus `ρ_j(D_i)` a difference matrix over `F_j`,
/// where `groups[j]` lists the elements of `F_{j+1}`.
pub fn check_nested_dm(
    layers: &[Matrix],
    projections: &[&[Code]],
    radices: &[u32],
    groups: &[Vec<Code>],
) -> VerificationReport {
    let name = format!("NDM with {} layers", layers.len());
    if groups.len() != projections.len() {
        return VerificationReport::structural(name, "one group per layer required");
    }
    if let Some(r) = check_family_shape(&name, layers, projections) {
        return r;
    }
    for (i, d) in layers.iter().enumerate() {
        for j in 0..=i {
            let Some(pd) = project(d, projections[j]) else {
                return VerificationReport::structural(
                    name,
                    format!("layer {} holds codes outside the group", i + 1),
                );
            };
            let r = check_difference_matrix(&pd, radices, &groups[j]);
            if !r.passed {
                return r.within(name, &format!("ρ_{}(D_{})", j + 1, i + 1));
            }
        }
    }
    VerificationReport::pass(name)
}

/// SOA condition: every block of `slice_size` consecutive rows becomes an
/// `OA(slice_size, m, s, t)` after applying `projection`.
pub fn check_sliced(
    top: &Matrix,
    slice_size: usize,
    projection: &[Code],
    s: usize,
    t: usize,
) -> VerificationReport {
    let name = format!("SOA with slices of {slice_size} rows");
    if slice_size == 0 || !top.rows().is_multiple_of(slice_size) {
        return VerificationReport::structural(
            name,
            format!(
                "{} rows do not split into slices of {slice_size}",
                top.rows()
            ),
        );
    }
    let Some(projected) = project(top, projection) else {
        return VerificationReport::structural(name, "codes outside the group");
    };
    for l in 0..top.rows() / slice_size {
        let slice = projected
            .slice_rows(l * slice_size, (l + 1) * slice_size)
            .expect("slice inside bounds");
        let r = check_oa_strength(&slice, s, t);
        if !r.passed {
            return r.within(name, &format!("slice {}", l + 1));
        }
    }
    VerificationReport::pass(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[Code]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn full_factorial(s: Code) -> Matrix {
        let rows: Vec<Vec<Code>> = (0..s * s)
            .map(|i| vec![i / s, i % s, (i / s + i % s) % s])
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn subsets_in_lex_order() {
        assert_eq!(
            column_subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(column_subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(column_subsets(2, 3).is_empty());
    }

    #[test]
    fn oa_strength() {
        let a = full_factorial(3);
        assert!(check_oa_strength(&a, 3, 2).passed);
        assert!(check_oa_strength(&a, 3, 1).passed);
        let r = check_oa_strength(&a, 3, 3);
        assert!(!r.passed);
        assert_eq!(r.counterexample.unwrap().columns, vec![0, 1, 2]);
        assert!(!check_oa_strength(&a, 3, 4).passed);
        assert!(check_oa_strength(&a, 5, 0).passed);

        let bad = m(&[&[0, 0], &[0, 1], &[1, 0], &[1, 0]]);
        let r = check_oa_strength(&bad, 2, 2);
        let ce = r.counterexample.unwrap();
        assert_eq!(
            (ce.columns, ce.levels, ce.observed, ce.expected),
            (vec![0, 1], vec![1, 0], 2, 1)
        );
    }

    #[test]
    fn oa_structural_failures() {
        let a = m(&[&[0, 0], &[1, 1], &[0, 1]]);
        assert!(!check_oa_strength(&a, 2, 2).passed);
        let a = m(&[&[0], &[1], &[2], &[0]]);
        let r = check_oa_strength(&a, 2, 1);
        assert_eq!(
            r.counterexample.unwrap().context,
            "number of distinct symbols"
        );
    }

    #[test]
    fn difference_matrices() {
        let radices = [2, 2];
        let group: Vec<Code> = (0..4).collect();
        // Multiplication table of GF(4): a D(4, 4, 4).
        let mul = m(&[&[0, 0, 0, 0], &[0, 1, 2, 3], &[0, 2, 3, 1], &[0, 3, 1, 2]]);
        assert!(check_difference_matrix(&mul, &radices, &group).passed);
        let constant = m(&[&[1, 1], &[1, 1], &[1, 1], &[1, 1]]);
        assert!(!check_difference_matrix(&constant, &radices, &group).passed);
        let z3 = m(&[&[0, 0], &[0, 1], &[0, 2]]);
        assert!(check_difference_matrix(&z3, &[3], &[0, 1, 2]).passed);
    }

    #[test]
    fn latin_and_strata() {
        let id = Matrix::column(&(0..8).collect::<Vec<_>>()).unwrap();
        assert!(check_latin_hypercube(&id).passed);
        let rep = Matrix::column(&[0, 1, 1, 3]).unwrap();
        assert!(!check_latin_hypercube(&rep).passed);

        let l = m(&[&[0, 0], &[1, 2], &[2, 1], &[3, 3]]);
        assert!(check_stratification(&l, 4, 2).passed);
        assert!(check_stratification(&l, 4, 1).passed);
        let diag = m(&[&[0, 0], &[1, 1], &[2, 2], &[3, 3]]);
        assert!(!check_stratification(&diag, 4, 2).passed);
        assert!(!check_stratification(&diag, 4, 3).passed);
    }

    #[test]
    fn nested_family() {
        // Z_4 ⊃ {0, 2}: ρ_1 collapses v to v mod 2.
        let rho1: Vec<Code> = vec![0, 1, 0, 1];
        let rho2: Vec<Code> = vec![0, 1, 2, 3];
        let top = full_factorial(4);
        let rows: Vec<Vec<Code>> = top
            .to_rows()
            .into_iter()
            .filter(|r| r.iter().all(|&v| v % 2 == 0))
            .collect();
        let small = Matrix::from_rows(&rows).unwrap();
        // The subarray is not an OA over four levels.
        assert!(!check_oa_strength(&small, 4, 2).passed);
        let r = check_nested(&[small.clone(), top.clone()], &[&rho1, &rho2], &[2, 4], 2);
        assert!(!r.passed, "{r}");
        let halves: Vec<Code> = vec![0, 0, 1, 1];
        let r = check_nested(&[small.clone(), top.clone()], &[&halves, &rho2], &[2, 4], 2);
        assert!(r.passed, "{r}");
        assert!(check_nested(std::slice::from_ref(&top), &[&rho2], &[4], 2).passed);
        let outside = Matrix::from_rows(&vec![vec![1, 2, 3]; 4]).unwrap();
        assert!(!check_nested(&[outside, top], &[&halves, &rho2], &[2, 4], 2).passed);
    }

    #[test]
    fn projection_compatibility() {
        let fine: Vec<Code> = vec![0, 1, 2, 3];
        let coarse: Vec<Code> = vec![0, 0, 1, 1];
        assert!(check_projection_compatibility(&[&coarse, &fine]).passed);
        let bad: Vec<Code> = vec![0, 1, 0, 1];
        assert!(!check_projection_compatibility(&[&bad, &coarse]).passed);
    }

    #[test]
    fn sliced() {
        let top = full_factorial(4);
        let halves: Vec<Code> = vec![0, 0, 1, 1];
        assert!(check_sliced(&top, 16, &halves, 2, 2).passed);
        assert!(!check_sliced(&top, 5, &halves, 2, 2).passed);
        assert!(!check_sliced(&top, 4, &halves, 2, 2).passed);
    }

    #[test]
    fn report_serializes() {
        let r = check_oa_strength(&m(&[&[0], &[0]]), 2, 1);
        let json = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(r.into_result().is_err());
    }
}
